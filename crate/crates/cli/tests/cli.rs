use std::process::{Command, Output};

use tempfile::TempDir;

fn qfhe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfhe"))
        .args(args)
        .env_remove("QFHE_SEED")
        .env_remove("QFHE_RUN_ID")
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(p: &str, text: &str) {
    std::fs::write(p, text).unwrap();
}

fn amplitudes(p: &str) -> Vec<[f64; 2]> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    serde_json::from_value(v["amplitudes"].clone()).unwrap()
}

fn keygen(dir: &TempDir, name: &str, n: &str, m: &str, seed: &str) -> String {
    let key = path(dir, name);
    let out = qfhe(&["keygen", "--n", n, "--m", m, "--seed", seed, "--out", &key]);
    assert!(out.status.success(), "{out:?}");
    key
}

#[test]
fn keygen_rejects_zero_width() {
    let out = qfhe(&["keygen", "--n", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn keygen_is_deterministic_and_roundtrips() {
    let dir = TempDir::new().unwrap();
    let a = keygen(&dir, "a.key", "2", "1", "7");
    let b = keygen(&dir, "b.key", "2", "1", "7");
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    assert!(String::from_utf8(text).unwrap().starts_with("qfhe-key v1 n=2 m=1 "));

    let cipher = path(&dir, "c.json");
    let out = qfhe(&["encrypt", "--key", &a, "--data", "|01⟩", "--encoding", "1", "--out", &cipher]);
    assert!(out.status.success(), "{out:?}");
    // no gates: dk == ek
    let out = qfhe(&["decrypt", "--key", &a, "--data", &cipher, "--encoding", "1"]);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).contains("[[0.0,0.0],[1.0,0.0],[0.0,0.0],[0.0,0.0]]"));
}

#[test]
fn seed_falls_back_to_env() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_qfhe"))
            .args(["keygen", "--n", "4"])
            .env("QFHE_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("11"), run("11"));
    assert_eq!(run("11"), qfhe(&["keygen", "--n", "4", "--seed", "11"]).stdout);
}

fn demo(dir: &TempDir) -> String {
    let fixtures = path(dir, "fixtures");
    let out = qfhe(&["demo", "--out", &fixtures]);
    assert!(out.status.success(), "{out:?}");
    fixtures
}

#[test]
fn selector_menu_flips_data() {
    let dir = TempDir::new().unwrap();
    let fixtures = demo(&dir);
    let circuit = format!("{fixtures}/menu_ix.json");
    let key = keygen(&dir, "k", "1", "1", "3");
    let result = path(&dir, "out.json");
    let out = qfhe(&[
        "run", "--circuit", &circuit, "--key", &key, "--data", "|0>", "--encoding", "1",
        "--seed", "5", "--out", &result,
    ]);
    assert!(out.status.success(), "{out:?}");
    let amps = amplitudes(&result);
    assert_eq!(amps.len(), 2);
    assert!(amps[0][0].abs() < 1e-12 && amps[0][1].abs() < 1e-12);
    assert!((amps[1][0] - 1.0).abs() < 1e-12 && amps[1][1].abs() < 1e-12);

    let by_label = path(&dir, "sel.json");
    let out = qfhe(&[
        "run", "--circuit", &circuit, "--select", "X", "--key", &key, "--data", "0",
        "--seed", "5", "--out", &by_label,
    ]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(std::fs::read(&result).unwrap(), std::fs::read(&by_label).unwrap());
}

#[test]
fn every_demo_fixture_validates() {
    let dir = TempDir::new().unwrap();
    let fixtures = demo(&dir);
    for entry in std::fs::read_dir(&fixtures).unwrap() {
        let p = entry.unwrap().path();
        let out = qfhe(&["validate", "--fixture", &p.to_string_lossy()]);
        assert!(out.status.success(), "{}: {out:?}", p.display());
    }
}

fn two_r_circuit(dir: &TempDir) -> String {
    let circuit = path(dir, "two_r.json");
    write(
        &circuit,
        r#"{"n":2,"m":0,"gates":[{"g":"H","q":[1]},{"g":"R","q":[1]},{"g":"CNOT","q":[1,2]},{"g":"R","q":[2]},{"g":"H","q":[2]}]}"#,
    );
    circuit
}

#[test]
fn transcript_trailer_counts_messages() {
    let dir = TempDir::new().unwrap();
    let circuit = two_r_circuit(&dir);
    let key = keygen(&dir, "k", "2", "0", "1");
    let transcript = path(&dir, "t.jsonl");
    let out = qfhe(&[
        "run", "--circuit", &circuit, "--key", &key, "--data", "|10⟩", "--reps", "2",
        "--seed", "9", "--transcript", &transcript,
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(&transcript).unwrap();
    let trailer: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(trailer["trailer"], true);
    assert_eq!(trailer["messages"], 8);
    assert_eq!(trailer["gates"], 10);
    assert_eq!(trailer["mask_ops"], 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("messages=8"));
}

#[test]
fn seeded_runs_repeat_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let circuit = two_r_circuit(&dir);
    let key = keygen(&dir, "k", "2", "0", "1");
    let run = |tag: &str, transport: &str| {
        let (out, tr) = (path(&dir, &format!("{tag}.json")), path(&dir, &format!("{tag}.jsonl")));
        let o = qfhe(&[
            "run", "--circuit", &circuit, "--key", &key, "--data", "01", "--seed", "4",
            "--run-id", "12", "--transport", transport, "--out", &out, "--transcript", &tr,
        ]);
        assert!(o.status.success(), "{o:?}");
        (std::fs::read(out).unwrap(), std::fs::read(tr).unwrap())
    };
    let a = run("a", "inproc");
    assert_eq!(a, run("b", "inproc"));
    assert_eq!(a, run("c", "socket"));
}

#[test]
fn empty_circuit_returns_amplitude_file() {
    let dir = TempDir::new().unwrap();
    let circuit = path(&dir, "empty.json");
    write(&circuit, r#"{"n":1,"m":0,"gates":[]}"#);
    let data = path(&dir, "d.json");
    write(&data, "[[0.6, 0.0], [0.0, 0.8]]");
    let key = keygen(&dir, "k", "1", "0", "2");
    let result = path(&dir, "r.json");
    let out = qfhe(&["run", "--circuit", &circuit, "--key", &key, "--data", &data, "--seed", "1", "--out", &result]);
    assert!(out.status.success(), "{out:?}");
    let amps = amplitudes(&result);
    // canonical phase makes the largest amplitude real and positive
    assert!(amps[0][0].abs() < 1e-12 && (amps[0][1] + 0.6).abs() < 1e-12);
    assert!((amps[1][0] - 0.8).abs() < 1e-12 && amps[1][1].abs() < 1e-12);
}

#[test]
fn exit_codes_by_failure_kind() {
    let dir = TempDir::new().unwrap();
    let key = keygen(&dir, "k", "1", "0", "2");
    let bad_json = path(&dir, "bad.json");
    write(&bad_json, r#"{"n":1,"m":0,"gates":[{"g":"Q","q":[1]}]}"#);
    let out = qfhe(&["run", "--circuit", &bad_json, "--key", &key, "--data", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));

    let unnormalized = path(&dir, "d.json");
    write(&unnormalized, "[[1.0, 0.0], [1.0, 0.0]]");
    let circuit = path(&dir, "c.json");
    write(&circuit, r#"{"n":1,"m":0,"gates":[]}"#);
    let out = qfhe(&["run", "--circuit", &circuit, "--key", &key, "--data", &unnormalized, "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = path(&dir, "missing.json");
    let out = qfhe(&["run", "--circuit", &missing, "--key", &key, "--data", "0", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));

    // a wrong decryption key leaves the encoding register off |e⟩
    let key2 = keygen(&dir, "k2", "1", "1", "2");
    let cipher = path(&dir, "cipher.json");
    assert!(qfhe(&["encrypt", "--key", &key2, "--data", "0", "--encoding", "1", "--out", &cipher]).status.success());
    let out = qfhe(&["decrypt", "--key", &key2, "--data", &cipher, "--encoding", "0"]);
    assert_eq!(out.status.code(), Some(4));

    let out = qfhe(&["run", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn conjugation_audit_reports_every_case() {
    let out = qfhe(&["audit", "conjugation"]);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).contains("52 of 52 cases pass"));

    let out = qfhe(&["audit", "conjugation", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn mixing_audit_on_zero_state() {
    let out = qfhe(&["audit", "mixing", "--n", "1", "--states", "0", "--seed", "1", "--json"]);
    assert!(out.status.success(), "{out:?}");
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["mixing"]["states"][0]["deviation"], 0.0);

    let out = qfhe(&["audit", "mixing", "--n", "4", "--samples", "512", "--states", "1", "--seed", "2"]);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).contains("sampled deviation"));
}

#[test]
fn audit_all_passes() {
    let out = qfhe(&["audit", "all", "--n", "2", "--seed", "3"]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    for suite in ["conjugation", "mixing", "privacy"] {
        assert!(text.contains(&format!("== {suite} ==")));
    }
    assert!(text.trim_end().ends_with("audit PASS"));
}

#[test]
fn no_seed_reports_drawn_seed() {
    let out = qfhe(&["keygen", "--n", "1"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    let seed: u64 = err.trim().strip_prefix("seed: ").unwrap().parse().unwrap();
    let again = qfhe(&["keygen", "--n", "1", "--seed", &seed.to_string()]);
    assert_eq!(out.stdout, again.stdout);
}
