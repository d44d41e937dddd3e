use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bp3ksest"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = bin(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn individual_subcommands_compose() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["--seed", "1", "setup", "--keywords", "flu,asthma,diabetes"]);
    ok(dir, &["--seed", "2", "keygen"]);
    ok(dir, &["--seed", "3", "register", "--id", "alice"]);
    let out = ok(dir, &["--seed", "4", "trapdoor", "--id", "alice", "--keyword", "flu"]);
    assert!(out.contains("block 0"), "{out}");

    let ct_flu = dir.join("flu.ct");
    let ct_other = dir.join("asthma.ct");
    ok(dir, &["--seed", "5", "peks", "--keyword", "flu", "--file", ct_flu.to_str().unwrap()]);
    ok(dir, &["--seed", "6", "peks", "--keyword", "asthma", "--file", ct_other.to_str().unwrap()]);
    let td = dir.join("trapdoors/alice-0.td");
    assert_eq!(ok(dir, &["test", "--trapdoor", td.to_str().unwrap(), "--ciphertext", ct_flu.to_str().unwrap()]).trim(), "1");
    assert_eq!(ok(dir, &["test", "--trapdoor", td.to_str().unwrap(), "--ciphertext", ct_other.to_str().unwrap()]).trim(), "0");

    assert!(ok(dir, &["validate"]).contains("block 0: valid"));
    assert_eq!(ok(dir, &["trace", "--block", "0"]).trim(), "alice flu");

    // re-registering the same identity with a new key is refused
    assert!(!bin(dir, &["--seed", "7", "register", "--id", "alice"]).status.success());

    let ledger = dir.join("ledger.bin");
    let mut bytes = fs::read(&ledger).unwrap();
    bytes[20] ^= 0x10;
    fs::write(&ledger, bytes).unwrap();
    assert!(!bin(dir, &["validate"]).status.success());
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir.join("transcripts"))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.push(("ledger.bin".into(), fs::read(dir.join("ledger.bin")).unwrap()));
    out.sort();
    out
}

#[test]
fn scenario_is_reproducible_and_reports_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let sa = ok(&a, &["--seed", "7", "scenario", "--dump-transcripts"]);
    let sb = ok(&b, &["--seed", "7", "scenario", "--dump-transcripts"]);
    assert_eq!(sa, sb);
    assert_eq!(tree(&a), tree(&b));
    assert!(sa.contains("test matches        2/2"), "{sa}");

    let t = tmp.path().join("t");
    let st = ok(&t, &["--seed", "7", "scenario", "--tamper", "1:77"]);
    assert!(st.contains("detected") && !st.contains("NOT detected"), "{st}");
    assert!(!bin(&t, &["validate"]).status.success());
}
