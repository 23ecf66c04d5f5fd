use std::path::Path;
use std::process::{Command, Output};

fn rqeom(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqeom")).args(args).current_dir(dir).env_remove("RQEOM_THREADS").output().expect("binary runs")
}

fn rqeom_threads(args: &[&str], dir: &Path, threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqeom")).args(args).current_dir(dir).env("RQEOM_THREADS", threads).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header row and data rows of a CSV written with its manifest line.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn count_reports_observables_and_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let r = rqeom(&["count", "--method", "rqeom", "--n", "14"], dir.path());
    assert_eq!(code(&r), 0);
    assert!(stdout(&r).contains("observables=1568"));
    assert!(stdout(&r).contains("ratio qeom/rqeom=2.0"));
    let q = rqeom(&["count", "--method", "qeom", "--n", "14"], dir.path());
    assert!(stdout(&q).contains("observables=3136"));
    let pool = rqeom(&["count", "--orbitals", "8", "--pool", "off-diagonal"], dir.path());
    assert!(stdout(&pool).contains("n=56 observables=25088"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&rqeom(&["count", "--orbitals", "3"], dir.path())), 1);
    assert_eq!(code(&rqeom(&["bands", "--method", "vqe"], dir.path())), 1);
    assert_eq!(code(&rqeom(&["frobnicate"], dir.path())), 1);
    assert_eq!(code(&rqeom(&["--help"], dir.path())), 0);
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("m.toml"), "name = \"x\"\nlattice_constant = 5.0\nbogus = 1\n").unwrap();
    let r = rqeom(&["bands", "--material", "m.toml", "--path", "G,G", "--points", "2"], d);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("bogus"));

    std::fs::write(d.join("cal.csv"), "qubit,T1_us,T2_us,freq_GHz,readout_err,p01,p10\n0,100,80,5,0.01,0.01,0.01\n1,abc,80,5,0.01,0.01,0.01\n").unwrap();
    let r = rqeom(&["bands", "--backend", "hardware", "--calibration", "cal.csv", "--path", "G,G", "--points", "2"], d);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("row 3"));

    for args in [
        &["bands", "--backend", "noisy", "--p", "1.5", "--path", "G,G", "--points", "2"][..],
        &["bands", "--rank-tol", "2", "--path", "G,G", "--points", "2"],
        &["bands", "--path", "G,Q", "--points", "2"],
        &["bands", "--material", "missing.toml"],
        &["trials", "--backend", "exact", "--trials", "3"],
        &["bands", "--backend", "hardware", "--qubits", "0,1"],
    ] {
        assert_eq!(code(&rqeom(args, d)), 2, "{args:?}");
    }
    assert_eq!(code(&rqeom_threads(&["bands", "--path", "G,G", "--points", "2"], d, "many")), 2);
}

#[test]
fn overflowing_hamiltonian_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let toml = "name = \"huge\"\nlattice_constant = 5.0\nE_s_a = 0.0\nE_s_c = 0.0\nE_p_a = 0.0\nE_p_c = 0.0\n\
                V_ss = -1.0\nV_sc_pa = 1.0\nV_sa_pc = 1.0\nV_xx = 1.7e308\nV_xy = 1.7e308\n";
    std::fs::write(dir.path().join("huge.toml"), toml).unwrap();
    let r = rqeom(&["bands", "--material", "huge.toml", "--path", "G,X", "--points", "2"], dir.path());
    assert_eq!(code(&r), 3, "{}", String::from_utf8_lossy(&r.stderr));
}

#[test]
fn exact_gamma_gaps_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let r = rqeom(&["bands", "--path", "G,G", "--points", "2"], dir.path());
    assert_eq!(code(&r), 0);
    let text = stdout(&r);
    assert!(text.starts_with("# rqeom manifest {"));
    assert!(!text.contains('\r'));
    let (header, rows) = table(&text);
    assert_eq!(rows.len(), 2);
    assert!(!header.iter().any(|h| h.ends_with("_std")));
    for (n, want) in [12.16, 12.16, 12.16, 16.26, 18.5, 18.5, 18.5].iter().enumerate() {
        let got: f64 = rows[0][column(&header, &format!("E0{}", n + 1))].parse().unwrap();
        assert!((got - want).abs() < 1e-9, "gap {}: {got}", n + 1);
    }
}

#[test]
fn spread_columns_appear_with_trials() {
    let dir = tempfile::tempdir().unwrap();
    let r = rqeom(&["bands", "--backend", "shots", "--shots", "4096", "--trials", "3", "--path", "G,G", "--points", "2"], dir.path());
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let (header, rows) = table(&stdout(&r));
    let std: f64 = rows[0][column(&header, "E01_std")].parse().unwrap();
    assert!(std > 0.0 && std < 0.5);
}

#[test]
fn default_path_has_labelled_ticks() {
    let dir = tempfile::tempdir().unwrap();
    let r = rqeom(&["bands", "--points", "4"], dir.path());
    assert_eq!(code(&r), 0);
    let (header, rows) = table(&stdout(&r));
    assert_eq!(rows.len(), 4 * 4);
    let tick = column(&header, "tick");
    let labels: Vec<&str> = rows.iter().map(|r| r[tick].as_str()).filter(|t| !t.is_empty()).collect();
    assert_eq!(labels, ["L", "Γ", "Γ", "X", "X", "U|K", "U|K", "Γ"]);
}

#[test]
fn seeds_agree_within_shot_noise() {
    let dir = tempfile::tempdir().unwrap();
    let stats = |seed: &str| -> serde_json::Value {
        let r = rqeom(&["trials", "--backend", "shots", "--shots", "2048", "--trials", "40", "--seed", seed], dir.path());
        assert_eq!(code(&r), 0);
        serde_json::from_slice::<serde_json::Value>(&r.stdout).unwrap()["statistics"]["gaps"].clone()
    };
    let (a, b) = (stats("1"), stats("2"));
    for (x, y) in a.as_array().unwrap().iter().zip(b.as_array().unwrap()) {
        let (ma, mb) = (x["mean"].as_f64().unwrap(), y["mean"].as_f64().unwrap());
        let spread = x["std"].as_f64().unwrap().max(y["std"].as_f64().unwrap());
        assert!((ma - mb).abs() <= 3.0 * spread * (2.0f64 / 40.0).sqrt(), "{ma} vs {mb}, std {spread}");
    }
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["bands", "--backend", "shots", "--p", "0.02", "--trials", "2", "--path", "L,G", "--points", "3", "--seed", "7"];
    let one = rqeom_threads(&args, dir.path(), "1");
    let three = rqeom_threads(&args, dir.path(), "3");
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, three.stdout);
    let other_seed = rqeom_threads(&[&args[..11], &["8"]].concat(), dir.path(), "1");
    assert_ne!(one.stdout, other_seed.stdout);
}

#[test]
fn replay_reproduces_every_output_kind() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r = rqeom(&["bands", "--backend", "hardware", "--trials", "2", "--path", "G,X", "--points", "3", "--out", "b.csv", "--svg", "b.svg"], d);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let r = rqeom(&["trials", "--backend", "shots", "--trials", "5", "--outliers", "3", "--group", "--out", "t.json", "--scatter", "s.csv"], d);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let r = rqeom(&["eta-sweep", "--orbitals", "1", "--etas", "0.25,1", "--kpoints", "G", "--out", "e.csv"], d);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));

    for f in ["b.csv", "b.svg", "t.json", "s.csv", "e.csv"] {
        let r = rqeom(&["replay", f], d);
        assert_eq!(code(&r), 0, "{f}: {}", String::from_utf8_lossy(&r.stderr));
        assert!(stdout(&r).contains("identical"));
    }

    let svg = std::fs::read_to_string(d.join("b.svg")).unwrap();
    assert!(svg.contains("<polyline") && svg.contains("<circle"));

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("t.json")).unwrap()).unwrap();
    assert_eq!(json["statistics"]["trials"], 5);
    assert_eq!(json["grouped_means"].as_array().unwrap().len(), 7);

    let tampered = std::fs::read_to_string(d.join("b.csv")).unwrap().replacen("0,0,0", "0,0,1", 1);
    std::fs::write(d.join("b.csv"), tampered).unwrap();
    assert_eq!(code(&rqeom(&["replay", "b.csv"], d)), 2);
}

#[test]
fn global_channel_leaves_gaps_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let r = rqeom(&["eta-sweep", "--scope", "global", "--orbitals", "2", "--etas", "0.25,0.5", "--kpoints", "L,U"], dir.path());
    assert_eq!(code(&r), 0);
    let (header, rows) = table(&stdout(&r));
    let dev = column(&header, "deviation_meV");
    assert_eq!(rows.len(), 2 * 2 * 7);
    for row in rows {
        assert!(row[dev].parse::<f64>().unwrap().abs() < 1e-6, "{row:?}");
    }
}
