use std::path::Path;
use std::process::{Command, Output};

use zhkit::diagram::{self as dg, to_zhd};
use zhkit::{contract, Scalar};

fn zhkit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zhkit")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_diagram(dir: &Path, name: &str, g: &zhkit::Diagram) {
    std::fs::write(dir.join(name), to_zhd(g)).unwrap();
}

#[test]
fn eval_prints_the_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let g = dg::h_box_w(3, 1, 1);
    write_diagram(dir.path(), "h.zhd", &g);
    let o = zhkit(&["eval", "h.zhd"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), contract(&g).unwrap().to_json().to_string());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_diagram(dir.path(), "g.zhd", &dg::z_spider(3, 2, 2));
    assert_eq!(zhkit(&["eval", "missing.zhd"], dir.path()).status.code(), Some(2));
    assert_eq!(zhkit(&["eval", "g.zhd", "--d", "5"], dir.path()).status.code(), Some(2));
    assert_eq!(zhkit(&["frobnicate"], dir.path()).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.zhd"), "{\"d\": 3}").unwrap();
    assert_eq!(zhkit(&["eval", "bad.zhd"], dir.path()).status.code(), Some(2));
    let capped = Command::new(env!("CARGO_BIN_EXE_zhkit"))
        .args(["eval", "g.zhd"])
        .current_dir(dir.path())
        .env("ZHKIT_RANK_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));
    assert_eq!(zhkit(&["eval", "g.zhd"], dir.path()).status.code(), Some(0));
}

#[test]
fn compile_perm_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compile-perm", "--random", "2", "--d", "3", "--seed", "11", "--stats"];
    let a = zhkit(&args, dir.path());
    let b = zhkit(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("lower bound = "));
    assert!(text.contains("native gates = "));
    let c = zhkit(&["compile-perm", "--random", "2", "--d", "3", "--seed", "12"], dir.path());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn compile_perm_from_file_simulates_back() {
    let dir = tempfile::tempdir().unwrap();
    let images: Vec<usize> = vec![1, 0, 2, 3, 4, 5, 6, 8, 7];
    let perm = serde_json::json!({ "d": 3, "n": 2, "images": images });
    std::fs::write(dir.path().join("p.json"), perm.to_string()).unwrap();
    let o = zhkit(&["compile-perm", "p.json", "-o", "p.qc"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let qc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.qc")).unwrap()).unwrap();
    let wires = qc["wires"].as_u64().unwrap() as usize;
    let mut input = vec!["0"; wires];
    input[0] = "2";
    input[1] = "1";
    let s = zhkit(&["simulate", "p.qc", "--input", &input.join(",")], dir.path());
    assert!(s.status.success());
    let out: serde_json::Value = serde_json::from_str(&stdout(&s)).unwrap();
    let basis = out[0]["basis"].as_str().unwrap();
    assert_eq!(&basis[..2], "22");
    assert!(basis[2..].chars().all(|c| c == '0'));
}

#[test]
fn extract_embed_simulate_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mut g = dg::h_box_w(3, 2, 1);
    g.scale(&Scalar::omega(3, 1));
    write_diagram(dir.path(), "g.zhd", &g);
    let e = zhkit(&["extract", "g.zhd", "-o", "g.qc"], dir.path());
    assert!(e.status.success(), "{}", String::from_utf8_lossy(&e.stderr));
    let k_line = stdout(&e);
    assert!(k_line.starts_with("k = "));
    let sim = zhkit(&["simulate", "g.qc"], dir.path());
    assert!(sim.status.success());
    let want = contract(&g).unwrap().to_json().to_string();
    assert_eq!(stdout(&sim).trim(), want);
    let m = zhkit(&["embed", "g.qc", "-o", "back.zhd"], dir.path());
    assert!(m.status.success());
    assert_eq!(stdout(&m), k_line);
    let back = zhkit(&["eval", "back.zhd"], dir.path());
    let k: i64 = k_line.trim()["k = ".len()..].parse().unwrap();
    let scaled =
        contract(&zhkit::diagram::from_zhd(&std::fs::read_to_string(dir.path().join("back.zhd")).unwrap()).unwrap())
            .unwrap()
            .scale(&Scalar::sqrt_d_pow(3, k));
    assert!(back.status.success());
    assert_eq!(scaled.to_json().to_string(), want);
}

#[test]
fn synth_report() {
    let dir = tempfile::tempdir().unwrap();
    let s = |c: [i64; 3]| serde_json::json!({ "coeffs": c, "halfpow": 0 });
    let mat =
        serde_json::json!({ "d": 3, "in": 0, "out": 1, "entries": [[s([1, 0, 0])], [s([0, 0, 0])], [s([1, 0, 0])]] });
    std::fs::write(dir.path().join("v.mat"), mat.to_string()).unwrap();
    let o = zhkit(&["synth", "v.mat", "-o", "v.zhd", "--report"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("phase-free = true"));
    let k: i64 = text.lines().find_map(|l| l.strip_prefix("k = ")).unwrap().parse().unwrap();
    let ev = zhkit(&["eval", "v.zhd"], dir.path());
    let t: serde_json::Value = serde_json::from_str(&stdout(&ev)).unwrap();
    let halfpows: Vec<i64> = t.as_array().unwrap().iter().map(|e| e["halfpow"].as_i64().unwrap()).collect();
    assert_eq!(halfpows, vec![-k, 0, -k]);
}

#[test]
fn check_rules_and_selftest() {
    let dir = tempfile::tempdir().unwrap();
    let o = zhkit(&["check-rules", "--d", "3", "--max-arity", "2"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains(" 0 unsound"));
    assert_eq!(zhkit(&["check-rules", "--rule", "nonsense"], dir.path()).status.code(), Some(2));
    let s = zhkit(&["selftest", "--d", "3", "--only", "3,8"], dir.path());
    assert!(s.status.success());
    let text = stdout(&s);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
    assert_eq!(zhkit(&["selftest", "--only", "12"], dir.path()).status.code(), Some(2));
}
