use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest as _, Sha256};

use crate::algebra::{Decode, Encode, SystemParams, Writer};
use crate::credential::Credential;
use crate::error::{Error, Result};
use crate::homomorphic::{hom_keygen, Msg1, Msg2, Msg3, PaillierKeyPair};
use crate::ledger::{Digest, Ledger};
use crate::scheme::{
    keygen_ca, keygen_tgc, keygen_tr, keygen_user, peks_encrypt, record_check, reg_issue, reg_request, setup, trace,
    trapdoor_request, trapdoor_respond, AuthorityKeys, BlindedTrapdoor, Ciphertext, IdTable, PreparedTrapdoor,
    RegRequest, Trapdoor, TrapdoorRecord, UserKeyPair,
};

/// Ledger timestamps start here and advance by one second per block.
pub const BASE_TIME: u64 = 1_700_000_000;

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub n: usize,
    pub users: usize,
    pub queries: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub dump_transcripts: bool,
    /// `(block, bit)` to flip after all records are ledgered.
    pub tamper: Option<(usize, usize)>,
    pub paillier_bits: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n: 10,
            users: 2,
            queries: 1,
            seed: 7,
            out: None,
            dump_transcripts: false,
            tamper: None,
            paillier_bits: crate::homomorphic::MIN_MODULUS_BITS,
        }
    }
}

/// `n` distinct keyword strings.
pub fn vocabulary(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("keyword-{i:03}")).collect()
}

/// Every message that crossed between parties, in order.
#[derive(Clone, Debug, Default)]
pub struct Transcript {
    messages: Vec<(String, Vec<u8>)>,
}

impl Transcript {
    fn send<T: Encode + ?Sized>(&mut self, label: impl Into<String>, msg: &T) -> Vec<u8> {
        let bytes = msg.encode();
        self.messages.push((label.into(), bytes.clone()));
        bytes
    }

    pub fn messages(&self) -> &[(String, Vec<u8>)] {
        &self.messages
    }

    pub fn digest(&self) -> Digest {
        let mut w = Writer::new();
        for (label, bytes) in &self.messages {
            w.put_str(label).put_bytes(bytes);
        }
        Sha256::digest(w.as_bytes()).into()
    }

    /// One file per message, `NNNN-label.bin`.
    pub fn dump(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (i, (label, bytes)) in self.messages.iter().enumerate() {
            fs::write(dir.join(format!("{i:04}-{label}.bin")), bytes)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryOutcome {
    pub user: String,
    pub keyword: String,
    pub block: u64,
    /// Test result against the ciphertext of every vocabulary keyword.
    pub matches: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TamperOutcome {
    pub block: usize,
    pub bit: usize,
    pub detected: bool,
}

#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub n: usize,
    pub users: usize,
    pub queries: Vec<QueryOutcome>,
    pub true_positives: usize,
    pub false_negatives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub records_validated: usize,
    pub records_traced: usize,
    pub chain_verified: bool,
    pub tamper: Option<TamperOutcome>,
    pub ledger_len: usize,
    pub ledger_tip: Digest,
    pub ledger_bytes: usize,
    pub record_bytes: usize,
    pub transcript: Transcript,
    pub failures: Vec<String>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn transcript_digest(&self) -> Digest {
        self.transcript.digest()
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let q = self.queries.len();
        s += &format!("keywords            {}\n", self.n);
        s += &format!("users               {}\n", self.users);
        s += &format!("trapdoors           {q}\n");
        s += &format!("test matches        {}/{} (expected {q})\n", self.true_positives, q);
        s += &format!("false positives     {}/{}\n", self.false_positives, self.false_positives + self.true_negatives);
        s += &format!("records validated   {}/{}\n", self.records_validated, self.ledger_len);
        s += &format!("records traced      {}/{}\n", self.records_traced, self.ledger_len);
        s += &format!("chain verified      {}\n", self.chain_verified);
        if let Some(t) = self.tamper {
            s += &format!("tamper {}:{}        {}\n", t.block, t.bit, if t.detected { "detected" } else { "NOT detected" });
        }
        s += &format!("record bytes        {}\n", self.record_bytes);
        s += &format!("ledger bytes        {}\n", self.ledger_bytes);
        s += &format!("ledger tip          {}\n", hex::encode(self.ledger_tip));
        s += &format!("transcript digest   {}\n", hex::encode(self.transcript_digest()));
        for f in &self.failures {
            s += &format!("FAILED: {f}\n");
        }
        s
    }
}

struct User {
    keys: UserKeyPair,
    cred: Credential,
    hom: Arc<PaillierKeyPair>,
}

fn abort(step: &str, e: Error) -> Error {
    Error::RecordRejected(format!("{step}: {e}"))
}

/// Runs every party in-process, exchanging encoded messages. Protocol
/// rejections in the honest flow abort with an error naming the step;
/// assertion failures are collected in the report.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    if cfg.n == 0 {
        return Err(Error::EmptyVocabulary);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut wire = Transcript::default();
    let words = vocabulary(cfg.n);

    let (pp, keyword_table) = setup(&words)?;
    let pp = SystemParams::decode(&wire.send("params", &pp))?;
    let ca = keygen_ca(&mut rng);
    let tgc = keygen_tgc(&pp, &mut rng);
    let tracer = keygen_tr(&pp, &mut rng);
    let keys = AuthorityKeys { ca: *ca.public(), tracer: *tracer.public() };
    let keys = AuthorityKeys::decode(&wire.send("authority-keys", &keys))?;
    let tgc_pk = crate::scheme::TgcPublicKey::decode(&wire.send("tgc-pk", tgc.public()))?;

    let mut ids = IdTable::new();
    let mut users = Vec::with_capacity(cfg.users);
    for u in 0..cfg.users {
        let keys_u = keygen_user(format!("user{u:02}"), &pp, &mut rng);
        let req = RegRequest::decode(&wire.send(format!("reg-request-{u}"), &reg_request(&keys_u, &pp, &mut rng)))?;
        let cred = reg_issue(&ca, &req, &mut ids, &pp, &mut rng).map_err(|e| abort("registration", e))?;
        let cred = Credential::decode(&wire.send(format!("credential-{u}"), &cred))?;
        let hom = Arc::new(hom_keygen(cfg.paillier_bits, &mut rng)?);
        users.push(User { keys: keys_u, cred, hom });
    }

    let mut ledger = Ledger::new();
    let mut issued: Vec<(String, String, u64, Trapdoor)> = Vec::new();
    for (u, user) in users.iter().enumerate() {
        for q in 0..cfg.queries {
            let tag = format!("{u}-{q}");
            let keyword = &words[(rng.next_u64() % cfg.n as u64) as usize];
            let (record, mut session, m1) =
                trapdoor_request(&user.keys, &user.cred, keyword, &keys, Arc::clone(&user.hom), &pp, &mut rng)
                    .map_err(|e| abort("trapdoor request", e))?;

            let record_in = TrapdoorRecord::decode(&wire.send(format!("record-{tag}"), &record))?;
            let m1_in = Msg1::decode(&wire.send(format!("msg1-{tag}"), &m1))?;
            let now = BASE_TIME + ledger.len() as u64;
            let (tgc_session, m2) = trapdoor_respond(&tgc, &keys, &record_in, &m1_in, &mut ledger, now, &pp, &mut rng)
                .map_err(|e| abort("trapdoor response", e))?;
            let block = tgc_session.block_index();

            let m2_in = Msg2::decode_for(&wire.send(format!("msg2-{tag}"), &m2), user.hom.public())?;
            let m3 = session.answer(&m2_in).map_err(|e| abort("exchange round three", e))?;
            let m3_in = Msg3::decode(&wire.send(format!("msg3-{tag}"), &m3))?;
            let blinded = tgc_session.complete(&m3_in);
            let blinded_in = BlindedTrapdoor::decode(&wire.send(format!("blinded-{tag}"), &blinded))?;
            let td = session.finalize(&blinded_in).map_err(|e| abort("trapdoor finalization", e))?;
            wire.send(format!("trapdoor-{tag}"), &td);
            issued.push((user.keys.id().to_owned(), keyword.clone(), block, td));
        }
    }

    let mut cts = Vec::with_capacity(cfg.n);
    for (i, w) in words.iter().enumerate() {
        let ct = peks_encrypt(&tgc_pk, w, &pp, &mut rng);
        cts.push(Ciphertext::decode(&wire.send(format!("ciphertext-{i}"), &ct))?);
    }

    let mut report = ScenarioReport {
        n: cfg.n,
        users: cfg.users,
        queries: Vec::new(),
        true_positives: 0,
        false_negatives: 0,
        false_positives: 0,
        true_negatives: 0,
        records_validated: 0,
        records_traced: 0,
        chain_verified: false,
        tamper: None,
        ledger_len: 0,
        ledger_tip: ledger.tip(),
        ledger_bytes: 0,
        record_bytes: 0,
        transcript: Transcript::default(),
        failures: Vec::new(),
    };

    for (user, keyword, block, td) in &issued {
        let prepared = PreparedTrapdoor::new(td);
        let matches: Vec<bool> = cts.iter().map(|ct| prepared.test(ct)).collect();
        for (w, &hit) in words.iter().zip(&matches) {
            match (w == keyword, hit) {
                (true, true) => report.true_positives += 1,
                (true, false) => {
                    report.false_negatives += 1;
                    report.failures.push(format!("trapdoor of {user} for {keyword} does not match its ciphertext"));
                }
                (false, true) => {
                    report.false_positives += 1;
                    report.failures.push(format!("trapdoor of {user} for {keyword} matches ciphertext of {w}"));
                }
                (false, false) => report.true_negatives += 1,
            }
        }
        report.queries.push(QueryOutcome { user: user.clone(), keyword: keyword.clone(), block: *block, matches });
    }

    report.chain_verified = ledger.verify_chain();
    if !report.chain_verified {
        report.failures.push("ledger chain does not verify".into());
    }
    for (user, keyword, block, _) in &issued {
        let payload = &ledger.fetch(*block as usize)?.payload;
        report.record_bytes = report.record_bytes.max(payload.len());
        let record = match TrapdoorRecord::decode(payload) {
            Ok(r) => r,
            Err(e) => {
                report.failures.push(format!("block {block}: {e}"));
                continue;
            }
        };
        match record_check(&record, &keys, &pp) {
            Ok(()) => report.records_validated += 1,
            Err(f) => report.failures.push(format!("block {block}: {f}")),
        }
        match trace(&record, tracer.secret(), &keyword_table, &ids) {
            Ok((id, kw)) if id == *user && kw == *keyword => report.records_traced += 1,
            Ok((id, kw)) => report.failures.push(format!("block {block} traced to ({id}, {kw}), expected ({user}, {keyword})")),
            Err(e) => report.failures.push(format!("block {block}: trace failed: {e}")),
        }
    }
    report.ledger_len = ledger.len();
    report.ledger_tip = ledger.tip();
    report.ledger_bytes = ledger.to_bytes().len();

    if let Some((block, bit)) = cfg.tamper {
        ledger.tamper(block, bit)?;
        let detected = !ledger.verify_chain();
        if !detected {
            report.failures.push(format!("bit flip {block}:{bit} not detected"));
        }
        report.tamper = Some(TamperOutcome { block, bit, detected });
    }

    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir)?;
        ledger.save(&dir.join("ledger.bin"))?;
        fs::write(dir.join("keywords.tbl"), keyword_table.to_lines())?;
        fs::write(dir.join("ids.tbl"), ids.to_lines())?;
        fs::write(dir.join("report.txt"), report.summary())?;
        if cfg.dump_transcripts {
            wire.dump(&dir.join("transcripts"))?;
        }
    }
    report.transcript = wire;
    Ok(report)
}
