use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ccft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccft")).args(args).output().expect("run ccft")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn hex_symbols(path: &Path) -> Vec<u32> {
    fs::read_to_string(path).unwrap().split_whitespace().map(|t| u32::from_str_radix(t, 16).unwrap()).collect()
}

fn write_hex(path: &Path, symbols: &[u32]) {
    let text: Vec<String> = symbols.iter().map(|s| format!("{s:x}")).collect();
    fs::write(path, text.join(" ") + "\n").unwrap();
}

#[test]
fn plan_search_lists_the_two_tier_candidate() {
    let o = ccft(&["plan", "--m", "12", "--code", "2720,2550", "--top", "5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("63x65"), "{out}");
    assert!(out.contains("chosen 63x65 (scfft+scfft)"), "{out}");
    assert!(out.contains("total=409448"), "{out}");
}

#[test]
fn plan_file_records_wanted_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.json");
    let o = ccft(&["plan", "--m", "4", "--code", "15,11", "--factors", "15", "--out", p(&file)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("chosen 15 "));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(json["pruning"]["wanted_outputs"], serde_json::json!([0, 1, 2, 3]));
}

#[test]
fn encode_decode_round_trip_with_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (msg, cw, rx, out) =
        (dir.path().join("msg.hex"), dir.path().join("cw.hex"), dir.path().join("rx.hex"), dir.path().join("out.hex"));
    let message: Vec<u32> = (0..3 * 11).map(|i| (i * 7 + 3) % 16).collect();
    write_hex(&msg, &message);
    let o = ccft(&["encode", "--m", "4", "--code", "15,11", "--input", p(&msg), "--output", p(&cw)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let clean = hex_symbols(&cw);
    assert_eq!(clean.len(), 45);
    // systematic: message sits above the parity in each block
    for b in 0..3 {
        assert_eq!(&clean[15 * b + 4..15 * b + 15], &message[11 * b..11 * b + 11]);
    }

    // clean stream
    let o = ccft(&["decode", "--input", p(&cw), "--output", p(&out)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("block 0: corrected, 0 errors"), "{}", stdout(&o));

    // two errors in block 0, one error plus two erasures in block 2
    let mut received = clean.clone();
    received[1] ^= 5;
    received[9] ^= 12;
    received[30] ^= 1;
    received[35] ^= 9;
    received[40] ^= 3;
    write_hex(&rx, &received);
    fs::copy(dir.path().join("cw.hex.hdr"), dir.path().join("rx.hex.hdr")).unwrap();
    let er = dir.path().join("erasures.txt");
    fs::write(&er, "# block positions\n2 5 10\n").unwrap();
    for backend in ["plan", "horner"] {
        let o = ccft(&["decode", "--input", p(&rx), "--output", p(&out), "--erasures", p(&er), "--backend", backend]);
        assert!(o.status.success(), "{}", stdout(&o));
        let text = stdout(&o);
        assert!(text.contains("block 0: corrected, 2 errors"), "{text}");
        assert!(text.contains("block 2: corrected, 3 errors, 2 erasures"), "{text}");
        assert_eq!(hex_symbols(&out), clean);
    }
}

#[test]
fn too_many_errors_never_yield_a_wrong_claim() {
    let dir = tempfile::tempdir().unwrap();
    let (msg, cw, rx, out) =
        (dir.path().join("msg.hex"), dir.path().join("cw.hex"), dir.path().join("rx.hex"), dir.path().join("out.hex"));
    write_hex(&msg, &(0..11).collect::<Vec<_>>());
    assert!(ccft(&["encode", "--m", "4", "--code", "15,11", "--input", p(&msg), "--output", p(&cw)]).status.success());
    let mut received = hex_symbols(&cw);
    for (i, pos) in [0usize, 6, 13].into_iter().enumerate() {
        received[pos] ^= i as u32 + 1;
    }
    write_hex(&rx, &received);
    fs::copy(dir.path().join("cw.hex.hdr"), dir.path().join("rx.hex.hdr")).unwrap();
    let o = ccft(&["decode", "--input", p(&rx), "--output", p(&out)]);
    let text = stdout(&o);
    if text.contains("failure detected") {
        assert_eq!(o.status.code(), Some(1));
    } else {
        assert!(o.status.success());
        // whatever it returned must itself decode cleanly
        fs::copy(dir.path().join("cw.hex.hdr"), dir.path().join("out.hex.hdr")).unwrap();
        let again = dir.path().join("again.hex");
        let o2 = ccft(&["decode", "--input", p(&out), "--output", p(&again)]);
        assert!(stdout(&o2).contains("corrected, 0 errors"));
    }
}

#[test]
fn verify_is_deterministic() {
    let a = ccft(&["verify", "--suite", "all", "--seed", "42"]);
    let b = ccft(&["verify", "--suite", "all", "--seed", "42"]);
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("seed 42\n"));
    assert!(stdout(&a).contains("all suites passed"));
}

#[test]
fn verify_exhaustive_single_errors() {
    let o = ccft(&["verify", "--suite", "decode", "--code", "15,11", "--exhaustive-single", "--trials", "5"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("460 decodes"), "{}", stdout(&o));
}

#[test]
fn bench_with_no_trials_prints_only_the_header() {
    let o = ccft(&["bench", "--m", "8", "--code", "255,223", "--trials", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2, "{text}");
    assert!(text.contains("vectors/s"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(ccft(&["plan", "--m", "4", "--code", "15,16"]).status.code(), Some(2));
    assert_eq!(ccft(&["plan", "--m", "4", "--n", "15", "--factors", "4x4"]).status.code(), Some(2));
    assert_eq!(ccft(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(ccft(&["--jobs", "0", "verify"]).status.code(), Some(2));
}
