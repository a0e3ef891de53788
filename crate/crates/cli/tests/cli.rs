use std::path::Path;
use std::process::{Command, Output};

fn morsekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morsekit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = morsekit(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

/// Density values from `density.csv`, row-major with y fastest.
fn density_values(dir: &Path) -> Vec<f64> {
    let mut reader = csv::Reader::from_path(dir.join("density.csv")).unwrap();
    reader
        .records()
        .map(|r| r.unwrap()[2].parse::<f64>().unwrap())
        .collect()
}

fn transposed(values: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = values[i * n + j];
        }
    }
    out
}

#[test]
fn three_pi_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let stdout = run_ok(&[
        "spectrum",
        "--p",
        "3pi",
        "--mode",
        "irrational",
        "--out",
        out,
    ]);
    assert!(stdout.contains("xi = 54"));
    assert!(stdout.contains("states 100 swap-reduced 55 distinct 55 accidental 0"));
    let csv = read(&dir.path().join("spectrum.csv"));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 55);
    assert!(rows[0].starts_with("0,0,0,1,singlet,"));
    let energies: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(7).unwrap().parse().unwrap())
        .collect();
    assert!(energies.windows(2).all(|w| w[0] < w[1]));
    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("spectrum.json"))).unwrap();
    assert_eq!(json["levels"].as_array().unwrap().len(), 55);
}

#[test]
fn integer_spectrum_has_the_triple_level() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "spectrum",
        "--p",
        "9",
        "--mode",
        "integer",
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "csv",
    ]);
    let csv = read(&dir.path().join("spectrum.csv"));
    assert!(
        csv.lines()
            .any(|l| l.contains(",8;2;4,2;8;4,3,accidental,")),
        "{csv}"
    );
    assert!(!dir.path().join("spectrum.json").exists());
}

#[test]
fn ground_only_well() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "spectrum",
        "--p",
        "0.5",
        "--mode",
        "irrational",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let csv = read(&dir.path().join("spectrum.csv"));
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("0,0,0,1,singlet"));
}

#[test]
fn degeneracy_censuses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let big = run_ok(&["degeneracy", "--p", "28", "--mode", "integer", "--out", out]);
    assert_eq!(big.lines().next().unwrap(), "841 435 360 75");
    let irrational = run_ok(&[
        "degeneracy",
        "--p",
        "3pi",
        "--mode",
        "irrational",
        "--out",
        out,
    ]);
    assert_eq!(irrational.lines().next().unwrap(), "100 55 55 0");
    run_ok(&[
        "degeneracy",
        "--p",
        "7.5",
        "--mode",
        "rational",
        "1/2",
        "--out",
        out,
        "--format",
        "csv,json",
    ]);
    let list = read(&dir.path().join("accidental.csv"));
    assert!(list.contains("(6 2);(2 6);(4 3);(3 4),4,"), "{list}");
    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("accidental.json"))).unwrap();
    assert_eq!(json["census"]["total_states"], 64);
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        run_ok(&[
            "spectrum",
            "--p",
            "3pi",
            "--mode",
            "irrational",
            "--out",
            out,
        ]);
        run_ok(&[
            "density",
            "--p",
            "3pi",
            "--mode",
            "irrational",
            "--mu",
            "18",
            "--grid",
            "40x40",
            "--out",
            out,
        ]);
        run_ok(&[
            "uncertainty",
            "--p",
            "3pi",
            "--mode",
            "irrational",
            "--psi",
            "0.5,2",
            "--out",
            out,
        ]);
    }
    for name in [
        "spectrum.csv",
        "spectrum.json",
        "density.csv",
        "density.pgm",
        "density.json",
        "uncertainty.csv",
    ] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn mixing_symmetry_of_densities() {
    let sym = tempfile::tempdir().unwrap();
    let skew = tempfile::tempdir().unwrap();
    let mirror = tempfile::tempdir().unwrap();
    let base = [
        "density",
        "--p",
        "3pi",
        "--mode",
        "irrational",
        "--mu",
        "18",
        "--grid",
        "50x50",
    ];
    let with = |extra: &[&str], dir: &tempfile::TempDir| {
        let mut args: Vec<&str> = base.to_vec();
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out", dir.path().to_str().unwrap(), "--format", "csv"]);
        run_ok(&args);
        density_values(dir.path())
    };
    let s = with(&[], &sym);
    let st = transposed(&s, 50);
    let max = s.iter().copied().fold(0.0, f64::max);
    assert!(s.iter().zip(&st).all(|(a, b)| (a - b).abs() <= 1e-12 * max));

    let a = with(
        &["--gamma", "0.8660254037844386,0", "--delta", "0.5,0"],
        &skew,
    );
    let b = with(
        &["--gamma", "0.5", "--delta", "0.8660254037844386"],
        &mirror,
    );
    let bt = transposed(&b, 50);
    let max = a.iter().copied().fold(0.0, f64::max);
    assert!(a.iter().zip(&bt).all(|(x, y)| (x - y).abs() <= 1e-12 * max));
    assert!(a
        .iter()
        .zip(&transposed(&a, 50))
        .any(|(x, y)| (x - y).abs() > 1e-3 * max));
}

#[test]
fn coherent_density_localization() {
    let small = tempfile::tempdir().unwrap();
    let large = tempfile::tempdir().unwrap();
    let fraction = |psi: &str, dir: &tempfile::TempDir| {
        let stdout = run_ok(&[
            "density",
            "--p",
            "3pi",
            "--mode",
            "irrational",
            "--psi",
            psi,
            "--grid",
            "120x120",
            "--xrange",
            "-1.6:12",
            "--yrange",
            "-1.6:12",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        let values = density_values(dir.path());
        let max = values.iter().copied().fold(0.0, f64::max);
        let json: serde_json::Value =
            serde_json::from_str(&read(&dir.path().join("density.json"))).unwrap();
        assert_eq!(
            json["psi"][0].as_f64().unwrap(),
            psi.parse::<f64>().unwrap()
        );
        assert!(stdout.contains("coherent"));
        values.iter().filter(|&&v| v > 1e-6 * max).count() as f64 / values.len() as f64
    };
    assert!(fraction("0.1", &small) < fraction("5", &large));
}

#[test]
fn uncertainty_sweeps() {
    let sym = tempfile::tempdir().unwrap();
    run_ok(&[
        "uncertainty",
        "--p",
        "3pi",
        "--mode",
        "irrational",
        "--out",
        sym.path().to_str().unwrap(),
    ]);
    let mut reader = csv::Reader::from_path(sym.path().join("uncertainty.csv")).unwrap();
    let rows: Vec<(f64, String, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (
                r[0].parse().unwrap(),
                r[1].to_string(),
                r[4].parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 100);
    for pair in rows.chunks(2) {
        assert_eq!((pair[0].1.as_str(), pair[1].1.as_str()), ("x", "y"));
        assert!((pair[0].2 - pair[1].2).abs() < 1e-9);
        assert!(pair[0].2 >= 0.25);
    }

    let skew = tempfile::tempdir().unwrap();
    let stdout = run_ok(&[
        "uncertainty",
        "--p",
        "3pi",
        "--mode",
        "irrational",
        "--gamma",
        "0.8660254037844386,0",
        "--delta",
        "0.5,0",
        "--out",
        skew.path().to_str().unwrap(),
    ]);
    let line = stdout
        .lines()
        .find(|l| l.contains("first differ"))
        .expect("separation reported");
    let psi: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((psi - 1.4).abs() <= 0.3 + 1e-9, "{line}");
}

#[test]
fn coherent_dump() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = run_ok(&[
        "coherent",
        "--p",
        "3pi",
        "--mode",
        "irrational",
        "--psi",
        "2@0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(stdout.contains("xi = 54"));
    let json: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("coherent.json"))).unwrap();
    let coefficients = json["coefficients"].as_array().unwrap();
    assert_eq!(coefficients.len(), 55);
    let total: f64 = coefficients
        .iter()
        .map(|c| c["magnitude"].as_f64().unwrap().powi(2))
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!((coefficients[3]["phase"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = |args: &[&str]| morsekit(args).status.code();
    assert_eq!(
        code(&["spectrum", "--p", "3pi", "--mode", "sideways", "--out", out]),
        Some(2)
    );
    assert_eq!(
        code(&["spectrum", "--p", "3.5", "--mode", "integer", "--out", out]),
        Some(2)
    );
    assert_eq!(code(&["spectrum", "--out", out]), Some(2));
    assert_eq!(
        code(&[
            "density",
            "--p",
            "3pi",
            "--mode",
            "irrational",
            "--mu",
            "55",
            "--out",
            out
        ]),
        Some(2)
    );
    assert_eq!(
        code(&["density", "--p", "9", "--mode", "integer", "--mu", "1", "--out", out]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "spectrum",
            "--p",
            "3.5",
            "--mode",
            "irrational",
            "--out",
            out
        ]),
        Some(3)
    );
    assert_eq!(
        code(&[
            "uncertainty",
            "--p",
            "3pi",
            "--mode",
            "irrational",
            "--psi",
            "1",
            "--panels",
            "1",
            "--order",
            "3",
            "--out",
            out
        ]),
        Some(4)
    );
    assert_eq!(
        code(&[
            "coherent",
            "--p",
            "3pi",
            "--mode",
            "irrational",
            "--gamma",
            "0",
            "--delta",
            "0",
            "--psi",
            "1",
            "--out",
            out
        ]),
        Some(2)
    );
}

#[test]
fn config_file_and_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "p = \"28\"\nmode = \"irrational\"\nformat = \"json\"\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_morsekit"))
        .args([
            "degeneracy",
            "--mode",
            "integer",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .env("MORSEKIT_THREADS", "1")
        .output()
        .unwrap();
    assert!(output.status.success());
    // the flag's integer mode wins over the file's irrational one
    assert!(String::from_utf8(output.stdout)
        .unwrap()
        .starts_with("841 435 360 75"));
    assert!(out.join("accidental.json").exists());
    assert!(!out.join("accidental.csv").exists());

    let bad = Command::new(env!("CARGO_BIN_EXE_morsekit"))
        .args([
            "degeneracy",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .env("MORSEKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
