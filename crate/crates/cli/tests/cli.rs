use std::process::{Command, Output};

use weakmax::{bounds, ConstraintTriple, Exponents};

fn weakmax(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakmax"))
        .args(args.split_whitespace())
        .output()
        .expect("binary runs")
}

fn stdout(args: &str) -> String {
    let out = weakmax(args);
    assert!(out.status.success(), "{args}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let body = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, body)
}

#[test]
fn bound_example() {
    let (header, body) = rows(&stdout("bound p=3 q=2 f=0.5 A=0.3 F=1 lambda=1"));
    assert_eq!(header.join(","), "lambda,G,k,branch,T,residual");
    assert_eq!(body.len(), 1);
    let t: f64 = body[0][4].parse().unwrap();
    assert!((t - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(body[0][3], "k_root");
}

#[test]
fn check_example() {
    let (_, body) = rows(&stdout("check p=3 q=2 f=0.5 A=0.25 F=1"));
    assert_eq!(body[0], ["true", "lower", "false"]);
    let json: serde_json::Value = serde_json::from_str(&stdout("check p=3 q=2 f=0.5 A=0.95 format=json")).unwrap();
    assert_eq!(json["member"], false);
    assert_eq!(json["boundary"], "exterior");
}

#[test]
fn sweep_rows_are_ordered_monotone_and_lossless() {
    let (_, body) = rows(&stdout("sweep p=3 q=2 f=0.5 A=0.3 lambda=0.1:3.0:30"));
    assert_eq!(body.len(), 30);
    let x = Exponents::new(3.0, 2.0).unwrap();
    let c = ConstraintTriple::unit(0.5, 0.3).unwrap();
    let mut prev = f64::INFINITY;
    for row in &body {
        let lambda: f64 = row[0].parse().unwrap();
        let t: f64 = row[4].parse().unwrap();
        assert!(t <= prev);
        prev = t;
        // Parsing the printed digits gives back the exact library values.
        let r = bounds::t_scaled(&x, &c, lambda).unwrap();
        assert_eq!(t.to_bits(), r.t_value.to_bits());
        assert_eq!(row[1].parse::<f64>().unwrap().to_bits(), r.g_value.to_bits());
        assert_eq!(row[2].is_empty(), r.k.is_none());
        if let Some(k) = r.k {
            assert_eq!(row[2].parse::<f64>().unwrap().to_bits(), k.to_bits());
        }
        assert_eq!(row[3], r.branch.as_str());
    }
    let lambdas: Vec<f64> = body.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(lambdas.windows(2).all(|w| w[0] < w[1]));
    assert_eq!((lambdas[0], lambdas[29]), (0.1, 3.0));
}

#[test]
fn sweep_with_simulation_adds_columns() {
    let (header, body) = rows(&stdout("sweep p=3 q=2 f=0.5 A=0.9 lambda=0.5:2:4 N=10"));
    assert_eq!(header.join(","), "lambda,G,k,branch,T,residual,simulated,gap,level");
    assert!(body.iter().all(|r| r.len() == 9 && r[8] == "10"));
    assert!(body.iter().all(|r| r[7].parse::<f64>().unwrap() >= 0.0));
}

#[test]
fn verify_and_extremal_reports() {
    let (_, body) = rows(&stdout("verify p=3 q=2 f=0.5 A=0.3 lambda=1 N=14"));
    let gap: f64 = body[0][7].parse().unwrap();
    assert!((0.0..=7e-3).contains(&gap));

    let json: serde_json::Value =
        serde_json::from_str(&stdout("extremal p=3 q=2 f=0.5 A=0.9 lambda=1.5 format=json")).unwrap();
    assert_eq!(json["recipe"]["branch"], "weak_case_ii");
    assert_eq!(json["profile"]["segments"][0]["kind"], "power");

    let json: serde_json::Value =
        serde_json::from_str(&stdout("verify p=3 q=2 f=1 A=1.2 F=2 lambda=2 N=12 format=json")).unwrap();
    assert!((json["formula_t"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn same_seed_same_bytes() {
    let args = "oracle p=3 q=2 f=0.6 A=0.5 lambda=1.3 N=8 seed=42 steps=100 seeds=3";
    assert_eq!(stdout(args), stdout(args));
    let sweep = "sweep p=4 q=2.5 f=0.4 A=0.3 lambda=0.2:4:64 N=9";
    assert_eq!(stdout(sweep), stdout(sweep));
}

#[test]
fn witness_exports() {
    let dir = std::env::temp_dir().join(format!("weakmax-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (json_path, bin_path) = (dir.join("w.json"), dir.join("w.bin"));
    let base = "oracle p=3 q=2 f=1 A=1.2 F=2 lambda=2 N=6 steps=50 seeds=2";
    stdout(&format!("{base} witness={}", json_path.display()));
    stdout(&format!("{base} witness={}", bin_path.display()));
    let from_json: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let bytes = std::fs::read(&bin_path).unwrap();
    let from_bin: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    assert_eq!(from_json.len(), 64);
    assert_eq!(from_json, from_bin);
    // Unnormalized witness: ∫ φ = f = 1 and ∫ φ² = A = 1.2.
    let mean = from_json.iter().sum::<f64>() / 64.0;
    let sq = from_json.iter().map(|v| v * v).sum::<f64>() / 64.0;
    assert!((mean - 1.0).abs() < 1e-9 && (sq - 1.2).abs() < 1e-5, "{mean} {sq}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("weakmax-out-{}.csv", std::process::id()));
    let args = "sweep p=3 q=2 f=0.5 A=0.3 lambda=0.5:1.5:5";
    stdout(&format!("{args} output={}", path.display()));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(args));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn precondition_failures_exit_one_with_one_line() {
    for args in [
        "bound p=3 q=2 f=0.5 A=0.95 lambda=1",
        "bound p=2 q=3 f=0.5 A=0.3 lambda=1",
        "bound p=3 q=2 f=0.5 A=0.1 lambda=1",
        "bound p=3 q=2 f=0.5 A=0.25 lambda=1",
        "oracle p=3 q=2 f=0.5 A=0.3 lambda=1 N=13",
        "verify p=3 q=2 f=0.5 A=0.3 lambda=1.0:2.0:3",
    ] {
        let out = weakmax(args);
        assert_eq!(out.status.code(), Some(1), "{args}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{args}: {err}");
        assert!(out.stdout.is_empty());
    }
    let err = String::from_utf8(weakmax("bound p=3 q=2 f=0.5 A=0.1 lambda=1").stderr).unwrap();
    assert!(err.contains("f^q ≤ A"), "{err}");
}

#[test]
fn gamma_output() {
    let (_, body) = rows(&stdout("gamma p=3 q=2"));
    assert_eq!(body[0][2].parse::<f64>().unwrap(), 4.0 / 3.0);
}
