use std::path::Path;
use std::process::{Command, Output};

fn symshadow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symshadow")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const XXZ: &str = r#"{"experiment": "xxz_energy", "n": 4, "noise": ["none", "bit_flip:0.05"],
                      "samples": 4000, "seed": 9, "bootstrap": 20}"#;

#[test]
fn runs_are_reproducible_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "xxz.json", XXZ);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let first = symshadow(&["run", &cfg, "--out", a.to_str().unwrap(), "--workers", "1"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = symshadow(&["--workers", "3", "run", &cfg, "--out", b.to_str().unwrap()]);
    assert!(second.status.success());
    let (ca, cb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(ca, cb);
    assert!(ca.starts_with("experiment,size,noise,p,T,seed,pipeline,observable,truth,estimate,sigma\n"));
    assert_eq!(ca.lines().count(), 1 + 2 * 4);

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.with_extension("json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 9);
    assert_eq!(meta["shards"], 8);
    assert_eq!(meta["experiment"], "xxz_energy");
    assert_eq!(meta["columns"].as_array().unwrap().len(), 11);
    assert_eq!(meta["summary"]["results"].as_array().unwrap().len(), 2);
}

#[test]
fn default_output_path_follows_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bench.json", r#"{"experiment": "compile_bench", "n": [2, 3], "trials": 2}"#);
    let out = symshadow(&["run", &cfg]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);
    assert!(dir.path().join("bench.json").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.json", r#"{"experiment": "xxz_energy", "n": 3, "samples": 100}"#);
    assert_eq!(symshadow(&["run", &bad]).status.code(), Some(2));
    assert_eq!(symshadow(&["run", "/nonexistent/config.json"]).status.code(), Some(2));
    assert_eq!(symshadow(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(symshadow(&["enumerate-oracle", "5", "matchgate"]).status.code(), Some(2));
    assert_eq!(symshadow(&["enumerate-oracle", "2", "matchgate", "--noise", "bitflip:1.5"]).status.code(), Some(2));
    let skew = write_config(dir.path(), "m.txt", "1 1\n0 1\n");
    assert_eq!(symshadow(&["compile", "--matrix", &skew]).status.code(), Some(2));
}

#[test]
fn enumerate_oracle_prints_attenuated_eigenvalues() {
    let out = symshadow(&["enumerate-oracle", "2", "matchgate", "--noise", "bit_flip:0.2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value = |label: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("{label},"))).unwrap();
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    assert!((value("2") - 0.6 / 3.0).abs() < 1e-12);
    assert!((value("4") - 0.36).abs() < 1e-12);
    assert!(text.contains("leakage"));
}

#[test]
fn compile_emits_gate_lines_and_metrics() {
    let improved = stdout(&symshadow(&["compile", "--random", "3", "--seed", "4"]));
    let naive = stdout(&symshadow(&["compile", "--random", "3", "--seed", "4", "--naive"]));
    for text in [&improved, &naive] {
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("kind,targets,angle"));
        for line in text.lines().skip(1).filter(|l| !l.starts_with('#')) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 3, "{line}");
            assert!(matches!(fields[0], "z" | "xx" | "pauli"));
            fields[2].parse::<f64>().unwrap();
        }
        let err_line = text.lines().find(|l| l.starts_with("# dense action error")).unwrap();
        let err: f64 = err_line.rsplit(' ').next().unwrap().parse().unwrap();
        assert!(err < 1e-9);
    }

    let dir = tempfile::tempdir().unwrap();
    let swap = write_config(dir.path(), "swap.txt", "# exchange of the two Majoranas\n0, 1\n1, 0\n");
    let out = symshadow(&["compile", "--matrix", &swap]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("# modes 1"));
}

#[test]
fn selftest_passes() {
    let out = symshadow(&["selftest"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.contains("FAIL"));
    assert!(text.lines().last().unwrap().ends_with("checks passed"));
}
