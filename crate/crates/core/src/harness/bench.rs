use std::sync::Arc;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

use super::scenario::{vocabulary, BASE_TIME};
use crate::algebra::{Encode, SystemParams};
use crate::credential::{randomize, show_verify, CaKeyPair, Credential};
use crate::error::{Error, Result};
use crate::homomorphic::{hom_keygen, PaillierKeyPair};
use crate::ledger::Ledger;
use crate::scheme::{
    keygen_ca, keygen_tgc, keygen_tr, keygen_user, peks_encrypt, record_validate, reg_issue, reg_request, setup, test,
    trace, trapdoor_request, trapdoor_respond, AuthorityKeys, Ciphertext, IdTable, KeywordTable, TgcKeyPair,
    TracerKeyPair, Trapdoor, TrapdoorRecord, UserKeyPair,
};
use crate::Scalar;

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub n_values: Vec<usize>,
    /// Timed repetitions per measurement; the median is reported.
    pub reps: usize,
    /// Blind trapdoor flows timed per `n`; `None` runs `n` of them.
    pub trapdoors: Option<usize>,
    pub seed: u64,
    pub paillier_bits: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_values: vec![10, 20, 30, 40, 50],
            reps: 5,
            trapdoors: None,
            seed: 7,
            paillier_bits: crate::homomorphic::MIN_MODULUS_BITS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub n: usize,
    pub setup: Duration,
    /// CA, TGC, tracer and one user key pair.
    pub keygen: Duration,
    pub reg: Duration,
    pub trapdoors: usize,
    /// Median over the individual flows.
    pub trapdoor_median: Duration,
    pub trapdoor_total: Duration,
    /// Encrypting the whole vocabulary.
    pub peks: Duration,
    /// One trapdoor against the whole vocabulary.
    pub test: Duration,
    pub validate: Duration,
    pub trace: Duration,
    pub record_bytes: usize,
    pub ledger_bytes: usize,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

#[derive(Clone, Debug)]
pub struct ScalingCheck {
    pub name: String,
    pub ratio: f64,
    pub passed: bool,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn check(what: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::RecordRejected(format!("{what}: correctness check failed during benchmark")))
    }
}

/// Times one run of `f`, which must report success.
fn timed<F: FnOnce() -> Result<bool>>(what: &str, samples: &mut Vec<Duration>, f: F) -> Result<()> {
    let start = Instant::now();
    let ok = f()?;
    samples.push(start.elapsed());
    check(what, ok)
}

#[derive(Default)]
struct Samples {
    setup: Vec<Duration>,
    keygen: Vec<Duration>,
    reg: Vec<Duration>,
    trapdoor: Vec<Duration>,
    peks: Vec<Duration>,
    test: Vec<Duration>,
    validate: Vec<Duration>,
    trace: Vec<Duration>,
}

/// Fixtures and samples for one vocabulary size.
struct Case {
    n: usize,
    rng: ChaCha20Rng,
    words: Vec<String>,
    pp: SystemParams,
    table: KeywordTable,
    ca: CaKeyPair,
    tgc: TgcKeyPair,
    tracer: TracerKeyPair,
    keys: AuthorityKeys,
    user: UserKeyPair,
    ids: IdTable,
    cred: Credential,
    hom: Arc<PaillierKeyPair>,
    cts: Vec<Ciphertext>,
    ledger: Ledger,
    /// Last issued `(record, trapdoor, keyword index)`.
    last: Option<(TrapdoorRecord, Trapdoor, usize)>,
    samples: Samples,
}

impl Case {
    fn new(n: usize, cfg: &BenchConfig) -> Result<Self> {
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed ^ n as u64);
        let words = vocabulary(n);
        let (pp, table) = setup(&words)?;
        let ca = keygen_ca(&mut rng);
        let tgc = keygen_tgc(&pp, &mut rng);
        let tracer = keygen_tr(&pp, &mut rng);
        let keys = AuthorityKeys { ca: *ca.public(), tracer: *tracer.public() };
        let user = keygen_user("bench-user", &pp, &mut rng);
        let mut ids = IdTable::new();
        let cred = reg_issue(&ca, &reg_request(&user, &pp, &mut rng), &mut ids, &pp, &mut rng)?;
        let hom = Arc::new(hom_keygen(cfg.paillier_bits, &mut rng)?);
        let cts = words.iter().map(|w| peks_encrypt(tgc.public(), w, &pp, &mut rng)).collect();
        Ok(Self {
            n,
            rng,
            words,
            pp,
            table,
            ca,
            tgc,
            tracer,
            keys,
            user,
            ids,
            cred,
            hom,
            cts,
            ledger: Ledger::new(),
            last: None,
            samples: Samples::default(),
        })
    }

    fn flows(&self) -> usize {
        self.samples.trapdoor.len()
    }

    fn trapdoor_flow(&mut self) -> Result<()> {
        let idx = self.flows() % self.n;
        let keyword = &self.words[idx];
        let now = BASE_TIME + self.ledger.len() as u64;
        let start = Instant::now();
        let (record, mut session, m1) =
            trapdoor_request(&self.user, &self.cred, keyword, &self.keys, Arc::clone(&self.hom), &self.pp, &mut self.rng)?;
        let (tgc_session, m2) =
            trapdoor_respond(&self.tgc, &self.keys, &record, &m1, &mut self.ledger, now, &self.pp, &mut self.rng)?;
        let m3 = session.answer(&m2)?;
        let td = session.finalize(&tgc_session.complete(&m3))?;
        self.samples.trapdoor.push(start.elapsed());
        // checked after the clock stops so that only issuance is measured
        check("trapdoor", test(&td, &self.cts[idx]))?;
        self.last = Some((record, td, idx));
        Ok(())
    }

    /// One timed run of every algorithm except trapdoor issuance.
    fn round(&mut self) -> Result<()> {
        let n = self.n;
        let Case { rng, words, pp, table, ca, tgc, tracer, keys, user, ids, cts, last, samples, .. } = self;
        timed("setup", &mut samples.setup, || Ok(setup(words)?.1.len() == n))?;
        timed("keygen", &mut samples.keygen, || {
            let ca = keygen_ca(rng);
            let tgc = keygen_tgc(pp, rng);
            let tr = keygen_tr(pp, rng);
            let u = keygen_user("bench", pp, rng);
            Ok(!ca.public().x.is_identity()
                && !tgc.public().omega.is_identity()
                && !tr.public().is_identity()
                && !u.public().is_identity())
        })?;
        timed("registration", &mut samples.reg, || {
            let req = reg_request(user, pp, rng);
            let cred = reg_issue(ca, &req, ids, pp, rng)?;
            let rc = randomize(&cred, &Scalar::one(), &Scalar::one())?;
            Ok(show_verify(&rc, &keys.ca, pp))
        })?;
        timed("peks", &mut samples.peks, || {
            let batch: Vec<_> = words.iter().map(|w| peks_encrypt(tgc.public(), w, pp, rng)).collect();
            Ok(batch.len() == n)
        })?;
        let (record, td, idx) = last.as_ref().expect("a trapdoor is issued before the first round");
        timed("test", &mut samples.test, || {
            let hits: Vec<usize> = cts.iter().enumerate().filter(|(_, ct)| test(td, ct)).map(|(i, _)| i).collect();
            Ok(hits == [*idx])
        })?;
        timed("record validation", &mut samples.validate, || Ok(record_validate(record, keys, pp)))?;
        let expected = (user.id().to_owned(), words[*idx].clone());
        timed("trace", &mut samples.trace, || Ok(trace(record, tracer.secret(), table, ids)? == expected))?;
        Ok(())
    }

    fn row(&self) -> BenchRow {
        let s = &self.samples;
        let record = &self.last.as_ref().expect("a trapdoor was issued").0;
        BenchRow {
            n: self.n,
            setup: median(s.setup.clone()),
            keygen: median(s.keygen.clone()),
            reg: median(s.reg.clone()),
            trapdoors: self.flows(),
            trapdoor_median: median(s.trapdoor.clone()),
            trapdoor_total: s.trapdoor.iter().sum(),
            peks: median(s.peks.clone()),
            test: median(s.test.clone()),
            validate: median(s.validate.clone()),
            trace: median(s.trace.clone()),
            record_bytes: record.encode().len(),
            ledger_bytes: self.ledger.to_bytes().len(),
        }
    }
}

/// Times the eight algorithms for each `n`. Rounds are interleaved across
/// the `n` values so that slow drift of the machine affects all of them
/// alike, and every timed run is checked for correctness.
pub fn bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut cases = cfg.n_values.iter().map(|&n| Case::new(n, cfg)).collect::<Result<Vec<_>>>()?;
    let reps = cfg.reps.max(1);
    for r in 0..reps {
        for case in &mut cases {
            let target = cfg.trapdoors.unwrap_or(case.n).max(1);
            // spread the flows evenly over the rounds, at least one before the first
            let due = (target * (r + 1)).div_ceil(reps).max(1);
            while case.flows() < due {
                case.trapdoor_flow()?;
            }
            case.round()?;
        }
    }
    Ok(BenchReport { rows: cases.iter().map(Case::row).collect() })
}

const COLUMNS: [&str; 12] = [
    "n", "setup_ms", "keygen_ms", "reg_ms", "trapdoor_ms_median", "trapdoor_total_ms", "peks_ms", "test_ms",
    "validate_ms", "trace_ms", "record_bytes", "ledger_bytes",
];

impl BenchReport {
    fn values(row: &BenchRow) -> [String; 12] {
        [
            row.n.to_string(),
            format!("{:.3}", ms(row.setup)),
            format!("{:.3}", ms(row.keygen)),
            format!("{:.3}", ms(row.reg)),
            format!("{:.3}", ms(row.trapdoor_median)),
            format!("{:.3}", ms(row.trapdoor_total)),
            format!("{:.3}", ms(row.peks)),
            format!("{:.3}", ms(row.test)),
            format!("{:.3}", ms(row.validate)),
            format!("{:.3}", ms(row.trace)),
            row.record_bytes.to_string(),
            row.ledger_bytes.to_string(),
        ]
    }

    pub fn table(&self) -> String {
        let rows: Vec<[String; 12]> = self.rows.iter().map(Self::values).collect();
        let widths: Vec<usize> = (0..12)
            .map(|c| rows.iter().map(|r| r[c].len()).chain([COLUMNS[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &[String]| -> String {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            parts.join("  ") + "\n"
        };
        let mut out = line(&COLUMNS.map(String::from));
        for r in &rows {
            out += &line(r);
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut out = COLUMNS.join(",") + "\n";
        for row in &self.rows {
            out += &(Self::values(row).join(",") + "\n");
        }
        out
    }

    /// Shape checks between the smallest and largest `n`: constant costs
    /// within 2x, linear costs with a ratio in `[3, 7]`.
    pub fn scaling_checks(&self) -> Vec<ScalingCheck> {
        let (Some(lo), Some(hi)) = (self.rows.iter().min_by_key(|r| r.n), self.rows.iter().max_by_key(|r| r.n)) else {
            return Vec::new();
        };
        let spread = |f: &dyn Fn(&BenchRow) -> Duration| {
            let v: Vec<f64> = self.rows.iter().map(|r| ms(f(r))).collect();
            let max = v.iter().cloned().fold(f64::MIN, f64::max);
            let min = v.iter().cloned().fold(f64::MAX, f64::min);
            max / min
        };
        let mut checks = Vec::new();
        for (name, f) in [
            ("reg constant", &(|r: &BenchRow| r.reg) as &dyn Fn(&BenchRow) -> Duration),
            ("record validation constant", &|r: &BenchRow| r.validate),
            ("trapdoor per item constant", &|r: &BenchRow| r.trapdoor_median),
        ] {
            let ratio = spread(f);
            checks.push(ScalingCheck { name: name.into(), ratio, passed: ratio <= 2.0 });
        }
        for (name, f) in [
            ("setup linear", &(|r: &BenchRow| r.setup) as &dyn Fn(&BenchRow) -> Duration),
            ("peks linear", &|r: &BenchRow| r.peks),
            ("test linear", &|r: &BenchRow| r.test),
        ] {
            let ratio = ms(f(hi)) / ms(f(lo));
            checks.push(ScalingCheck { name: name.into(), ratio, passed: (3.0..=7.0).contains(&ratio) });
        }
        checks
    }
}
