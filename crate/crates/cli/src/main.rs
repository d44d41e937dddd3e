use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use bp3ksest_core::credential::{CaKeyPair, Credential};
use bp3ksest_core::harness::{bench, run_scenario, vocabulary, BenchConfig, ScenarioConfig, BASE_TIME};
use bp3ksest_core::homomorphic::{hom_keygen, MIN_MODULUS_BITS};
use bp3ksest_core::ledger::Ledger;
use bp3ksest_core::scheme::{
    self, keygen_ca, keygen_tgc, keygen_tr, keygen_user, peks_encrypt, record_check, reg_issue, reg_request, setup,
    trace, trapdoor_request, trapdoor_respond, AuthorityKeys, Ciphertext, IdTable, KeywordTable, TgcKeyPair,
    TgcPublicKey, TracerKeyPair, Trapdoor, TrapdoorRecord, UserKeyPair,
};
use bp3ksest_core::{Decode, Encode, SystemParams};

#[derive(Parser)]
#[command(name = "bp3ksest", version, about = "Blind traceable trapdoor issuance for keyword search")]
struct Cli {
    /// State directory holding keys, tables and the ledger.
    #[arg(long, global = true, default_value = "bp3ksest-state")]
    out: PathBuf,
    /// Seed for all randomness; OS entropy when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive public parameters and build the keyword table.
    Setup {
        /// Comma-separated keywords.
        #[arg(long, value_delimiter = ',', conflicts_with = "n")]
        keywords: Vec<String>,
        /// Generate a vocabulary of this many keywords instead.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Generate CA, TGC and tracer keys.
    Keygen,
    /// Create a user key and register it with the CA.
    Register {
        #[arg(long)]
        id: String,
    },
    /// Run the blind trapdoor flow for a registered user and ledger the record.
    Trapdoor {
        #[arg(long)]
        id: String,
        #[arg(long)]
        keyword: String,
        /// Where to write the trapdoor; defaults to trapdoors/<id>-<block>.td.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Encrypt a keyword under the TGC public key.
    Peks {
        #[arg(long)]
        keyword: String,
        #[arg(long)]
        file: PathBuf,
    },
    /// Test a trapdoor against a ciphertext.
    Test {
        #[arg(long)]
        trapdoor: PathBuf,
        #[arg(long)]
        ciphertext: PathBuf,
    },
    /// Verify the ledger chain and validate ledgered records.
    Validate {
        #[arg(long)]
        block: Option<usize>,
    },
    /// Recover the requester and keyword of a ledgered record.
    Trace {
        #[arg(long)]
        block: usize,
    },
    /// End-to-end run of all parties with assertions.
    Scenario(ScenarioArgs),
    /// Time the eight algorithms for several vocabulary sizes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    users: usize,
    #[arg(long, default_value_t = 1)]
    queries: usize,
    #[arg(long)]
    dump_transcripts: bool,
    /// Flip one ledger bit after the run, as `block:bit`.
    #[arg(long, value_parser = parse_tamper)]
    tamper: Option<(usize, usize)>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Blind trapdoor flows timed per n; defaults to n.
    #[arg(long)]
    trapdoors: Option<usize>,
}

fn parse_tamper(s: &str) -> Result<(usize, usize), String> {
    let (b, bit) = s.split_once(':').ok_or("expected block:bit")?;
    Ok((b.parse().map_err(|e| format!("block: {e}"))?, bit.parse().map_err(|e| format!("bit: {e}"))?))
}

struct State {
    dir: PathBuf,
}

impl State {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
    }

    fn read(&self, name: &str) -> anyhow::Result<Vec<u8>> {
        let path = self.path(name);
        fs::read(&path).with_context(|| format!("reading {} (run the earlier steps first)", path.display()))
    }

    fn params(&self) -> anyhow::Result<SystemParams> {
        Ok(SystemParams::decode(&self.read("params.bin")?)?)
    }

    fn keywords(&self, pp: &SystemParams) -> anyhow::Result<KeywordTable> {
        Ok(KeywordTable::from_lines(&String::from_utf8(self.read("keywords.tbl")?)?, pp)?)
    }

    fn ids(&self) -> anyhow::Result<IdTable> {
        match fs::read_to_string(self.path("ids.tbl")) {
            Ok(text) => Ok(IdTable::from_lines(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(IdTable::new()),
            Err(e) => Err(e.into()),
        }
    }

    fn authority(&self) -> anyhow::Result<AuthorityKeys> {
        Ok(AuthorityKeys::decode(&self.read("authority.pub")?)?)
    }

    fn ledger(&self) -> anyhow::Result<Ledger> {
        Ok(Ledger::load(&self.path("ledger.bin"))?)
    }
}

fn user_file(id: &str, ext: &str) -> anyhow::Result<String> {
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        bail!("user id must be non-empty ASCII letters, digits, '-' or '_'");
    }
    Ok(format!("users/{id}.{ext}"))
}

fn read_file<T: Decode>(path: &Path) -> anyhow::Result<T> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(T::decode(&bytes)?)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut rng = match cli.seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    };
    let state = State { dir: cli.out.clone() };

    match cli.command {
        Command::Setup { keywords, n } => {
            let words = match n {
                Some(n) => vocabulary(n),
                None => keywords,
            };
            let (pp, table) = setup(&words)?;
            state.write("params.bin", &pp.encode())?;
            state.write("keywords.tbl", table.to_lines().as_bytes())?;
            println!("{} keywords written to {}", table.len(), state.path("keywords.tbl").display());
        }
        Command::Keygen => {
            let pp = state.params()?;
            let ca = keygen_ca(&mut rng);
            let tgc = keygen_tgc(&pp, &mut rng);
            let tracer = keygen_tr(&pp, &mut rng);
            let keys = AuthorityKeys { ca: *ca.public(), tracer: *tracer.public() };
            state.write("ca.key", &ca.encode())?;
            state.write("tgc.key", &tgc.encode())?;
            state.write("tgc.pub", &tgc.public().encode())?;
            state.write("tracer.key", &tracer.encode())?;
            state.write("authority.pub", &keys.encode())?;
            println!("keys written to {}", state.dir.display());
        }
        Command::Register { id } => {
            let pp = state.params()?;
            let ca = CaKeyPair::decode(&state.read("ca.key")?)?;
            let mut ids = state.ids()?;
            let user = keygen_user(id.as_str(), &pp, &mut rng);
            let req = reg_request(&user, &pp, &mut rng);
            let cred = reg_issue(&ca, &req, &mut ids, &pp, &mut rng)?;
            state.write(&user_file(&id, "key")?, &user.encode())?;
            state.write(&user_file(&id, "cred")?, &cred.encode())?;
            state.write("ids.tbl", ids.to_lines().as_bytes())?;
            println!("registered {id}");
        }
        Command::Trapdoor { id, keyword, file } => {
            let pp = state.params()?;
            let keys = state.authority()?;
            let tgc = TgcKeyPair::decode(&state.read("tgc.key")?, &pp)?;
            let user = UserKeyPair::decode(&state.read(&user_file(&id, "key")?)?, &pp)?;
            let cred = Credential::decode(&state.read(&user_file(&id, "cred")?)?)?;
            let mut ledger = state.ledger()?;
            let hom = Arc::new(hom_keygen(MIN_MODULUS_BITS, &mut rng)?);

            let (record, mut session, m1) = trapdoor_request(&user, &cred, &keyword, &keys, hom, &pp, &mut rng)?;
            let now = BASE_TIME + ledger.len() as u64;
            let (tgc_session, m2) = trapdoor_respond(&tgc, &keys, &record, &m1, &mut ledger, now, &pp, &mut rng)?;
            ledger.save(&state.path("ledger.bin"))?;
            let block = tgc_session.block_index();
            let m3 = session.answer(&m2)?;
            let td = session.finalize(&tgc_session.complete(&m3))?;
            let name = format!("trapdoors/{id}-{block}.td");
            match file {
                Some(path) => fs::write(&path, td.encode())?,
                None => state.write(&name, &td.encode())?,
            }
            println!("record ledgered as block {block}");
        }
        Command::Peks { keyword, file } => {
            let pp = state.params()?;
            let tgc_pk = TgcPublicKey::decode(&state.read("tgc.pub")?)?;
            fs::write(&file, peks_encrypt(&tgc_pk, &keyword, &pp, &mut rng).encode())?;
            println!("ciphertext written to {}", file.display());
        }
        Command::Test { trapdoor, ciphertext } => {
            let td: Trapdoor = read_file(&trapdoor)?;
            let ct: Ciphertext = read_file(&ciphertext)?;
            println!("{}", u8::from(scheme::test(&td, &ct)));
        }
        Command::Validate { block } => {
            let pp = state.params()?;
            let keys = state.authority()?;
            let ledger = match state.ledger() {
                Ok(l) => l,
                Err(e) => {
                    println!("ledger: {e}");
                    return Ok(false);
                }
            };
            println!("chain of {} blocks verifies", ledger.len());
            let range = match block {
                Some(b) => b..b + 1,
                None => 0..ledger.len(),
            };
            let mut ok = true;
            for i in range {
                let record = TrapdoorRecord::decode(&ledger.fetch(i)?.payload)?;
                match record_check(&record, &keys, &pp) {
                    Ok(()) => println!("block {i}: valid"),
                    Err(f) => {
                        ok = false;
                        println!("block {i}: INVALID ({f})");
                    }
                }
            }
            return Ok(ok);
        }
        Command::Trace { block } => {
            let pp = state.params()?;
            let tracer = TracerKeyPair::decode(&state.read("tracer.key")?, &pp)?;
            let ledger = state.ledger()?;
            let record = TrapdoorRecord::decode(&ledger.fetch(block)?.payload)?;
            let (id, kw) = trace(&record, tracer.secret(), &state.keywords(&pp)?, &state.ids()?)?;
            println!("{id} {kw}");
        }
        Command::Scenario(a) => {
            let cfg = ScenarioConfig {
                n: a.n,
                users: a.users,
                queries: a.queries,
                seed: cli.seed.unwrap_or(7),
                out: Some(cli.out),
                dump_transcripts: a.dump_transcripts,
                tamper: a.tamper,
                paillier_bits: MIN_MODULUS_BITS,
            };
            let report = run_scenario(&cfg)?;
            print!("{}", report.summary());
            return Ok(report.passed());
        }
        Command::Bench(a) => {
            let cfg = BenchConfig {
                n_values: a.n,
                reps: a.reps,
                trapdoors: a.trapdoors,
                seed: cli.seed.unwrap_or(7),
                paillier_bits: MIN_MODULUS_BITS,
            };
            let report = bench(&cfg)?;
            print!("{}", report.table());
            state.write("bench.csv", report.csv().as_bytes())?;
            for c in report.scaling_checks() {
                println!("{:<28} ratio {:>6.2}  {}", c.name, c.ratio, if c.passed { "ok" } else { "outside expected shape" });
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
