use std::process::Command;

fn asep2(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_asep2"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

#[test]
fn verify_all_single_bond() {
    let (code, text) = asep2(&["verify", "all", "--L", "1"]);
    assert_eq!(code, 0);
    assert!(text
        .lines()
        .all(|l| l.starts_with("RELATION ") && l.ends_with(" PASS")));
    assert!(text.contains("RELATION DH=HtD PASS"));
}

#[test]
fn verify_duality_two_bonds() {
    let (code, text) = asep2(&["verify", "duality", "--L", "2"]);
    assert_eq!(code, 0);
    assert!(text.contains("RELATION DH=HtD PASS"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(asep2(&["verify", "all", "--L", "0"]).0, 2);
    assert_eq!(asep2(&["verify", "nonsense"]).0, 2);
    assert_eq!(asep2(&["measure", "canonical", "--r", "1", "--q", "2"]).0, 2);
    assert_eq!(asep2(&["verify", "algebra", "--L", "3"]).0, 2);
}

#[test]
fn measure_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.csv");
    let (code, _) = asep2(&[
        "measure",
        "partition",
        "--L",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("N,M,Z"));
    assert_eq!(text.lines().count(), 16);
    assert!(text.contains("\n1,0,1*q^-3 + 1*q^-1 + 1*q^1 + 1*q^3\n"));
    let lambda = std::fs::read_to_string(dir.path().join("z.lambda.csv")).unwrap();
    assert_eq!(lambda.lines().next(), Some("N,M,Nprime,Mprime,lambda_poly"));

    let (_, text) = asep2(&["measure", "canonical", "--N", "0", "--M", "0"]);
    assert_eq!(text, "config,weight\n0000,1*q^0\n");

    let (code, text) = asep2(&["measure", "profile", "--species", "A", "--nu", "0", "--L", "3"]);
    assert_eq!(code, 0);
    let rows: Vec<(i64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (k, d) = l.split_once(',').unwrap();
            (k.parse().unwrap(), d.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 6);
    for (k, d) in rows {
        // default q = 2
        let x = 2f64.powi(2 * k as i32 - 1);
        assert!((d - x / (1.0 + x)).abs() < 1e-12);
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# measure a sector\nL = 1\nN = 1\nM = 0\nring = float\n").unwrap();
    let (code, text) = asep2(&["measure", "canonical", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(text.lines().count(), 3);
    let (_, text) = asep2(&[
        "measure",
        "canonical",
        "--config",
        cfg.to_str().unwrap(),
        "--M",
        "1",
    ]);
    assert!(text.contains("AB,") && text.contains("BA,"));
}

#[test]
fn simulate_is_reproducible_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let (code, _) = asep2(&[
            "simulate",
            "--trajectories",
            "20000",
            "--seed",
            "5",
            "--t",
            "0,1",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let records: Vec<serde_json::Value> = serde_json::from_slice(&ta).unwrap();
    assert_eq!(records.len(), 10);
    for r in &records {
        for key in ["z", "t", "mean", "stderr", "n", "prediction", "z_score"] {
            assert!(r.get(key).is_some());
        }
        if r["t"].as_f64() == Some(0.0) {
            assert_eq!(r["z_score"].as_f64(), Some(0.0));
        }
    }
}

#[test]
fn dumps() {
    let (code, text) = asep2(&["dump-generator", "--L", "1"]);
    assert_eq!(code, 0);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("9 full 1 * * q q^-1"));
    assert_eq!(lines.count(), 12);
    let (_, text) = asep2(&[
        "dump-generator",
        "--L",
        "1",
        "--N",
        "1",
        "--M",
        "0",
        "--ring",
        "float",
    ]);
    assert!(text.starts_with("2 sector 1 1 0 2 0.5\n"));
    let (code, text) = asep2(&["dump-symmetry", "--L", "1", "--which", "S"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("9 full 1 * * q q^-1\n"));
    assert_eq!(asep2(&["dump-symmetry", "--which", "X"]).0, 2);
}
