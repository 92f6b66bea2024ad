use std::path::Path;

use weldlab::cli::run;

fn wl(args: &[&str]) -> i32 {
    run(std::iter::once("weldlab").chain(args.iter().copied()))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_test_accepts_and_parity_advice_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.wg");
    assert_eq!(wl(&["gen", "--k", "3", "--variant", "g1", "--seed", "7", "-o", p(&a)]), 0);
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("weldlab-graph v1 n=812 k=3 variant=g1"));
    assert!(dir.path().join("a.wg.advice").exists());
    assert_eq!(wl(&["test", "--graph", p(&a), "--advice", "quantum", "--k", "3", "--eps", "0.1"]), 0);
    let side = dir.path().join("a.wg.advice");
    assert_eq!(wl(&["test", "--graph", p(&a), "--advice", p(&side)]), 0);
    assert_eq!(wl(&["mark", "--graph", p(&a), "-o", p(&dir.path().join("m.out")), "--audit"]), 0);
    assert_eq!(wl(&["census", "--graph", p(&a), "--csv", p(&dir.path().join("c.csv"))]), 0);

    let b = dir.path().join("b.wg");
    assert_eq!(wl(&["gen", "--k", "4", "--variant", "g2", "--seed", "3", "-o", p(&b)]), 0);
    let csv = dir.path().join("t.csv");
    assert_eq!(wl(&["test", "--graph", p(&b), "--advice", "parity", "--csv", p(&csv)]), 1);
    let out = std::fs::read_to_string(&csv).unwrap();
    assert!(out.starts_with("seed,verdict,reason,oracle_queries,advice_queries\n"));
    assert!(out.contains(",reject,"));
}

#[test]
fn identical_config_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"seed": 5, "k": 6, "t": 2, "trials": 40, "strategy": "bfs"}"#).unwrap();
    let (x, y) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
    assert_eq!(wl(&["distinguish", "--config", p(&cfg), "--csv", p(&x)]), 0);
    assert_eq!(wl(&["distinguish", "--config", p(&cfg), "--csv", p(&y)]), 0);
    assert_eq!(std::fs::read(&x).unwrap(), std::fs::read(&y).unwrap());
    let text = std::fs::read_to_string(&x).unwrap();
    assert!(text.starts_with("k,t,trials,wins,win_prob,stderr,advantage,advantage_upper\n6,2,40,"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"k": 3, "colour": "red"}"#).unwrap();
    assert_eq!(wl(&["walk", "--config", p(&cfg)]), 2);
    assert_eq!(wl(&["suite", "nonsense"]), 2);
    assert_eq!(wl(&["gen", "--variant", "g7", "-o", p(&dir.path().join("z"))]), 2);
    assert_eq!(wl(&["test", "--graph", p(&dir.path().join("missing.wg"))]), 2);
    assert_eq!(wl(&["games", "--k", "4", "--t", "100"]), 2);
    assert_eq!(wl(&["--bogus-flag"]), 2);
}

#[test]
fn walk_csv_uses_fixed_precision() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    assert_eq!(wl(&["walk", "--k", "2", "--t-max", "1", "--dt", "0.5", "--csv", p(&out)]), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "t,p_entrance,p_exit");
    assert_eq!(lines[1], "0.000000000000,1.000000000000,0.000000000000");
    assert_eq!(lines.len(), 4);
}

#[test]
fn suite_walk_writes_summary_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    assert_eq!(wl(&["suite", "walk", "-o", p(&out)]), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    let table = v["criteria"][0]["details"]["p_star_table"].as_array().unwrap();
    assert_eq!(table.len(), 11);
}
