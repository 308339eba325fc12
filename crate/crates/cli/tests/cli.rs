use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quantum_bouncer::spectrum::Basis;
use quantum_bouncer::wavepacket::CoefficientSet;

fn bouncer(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bouncer"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("BOUNCER_OUT")
        .output()
        .expect("running bouncer")
}

fn manifest_value(dir: &Path, key: &str) -> String {
    let text = fs::read_to_string(dir.join("manifest.txt")).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(str::to_string))
        .unwrap_or_else(|| panic!("no {key} in manifest"))
}

fn data_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn spectrum_respects_nmax() {
    let dir = tempfile::tempdir().unwrap();
    let o = bouncer(&["spectrum", "--nmax", "5"], dir.path());
    assert!(o.status.success());
    let rows = data_rows(&dir.path().join("energies.csv"));
    assert_eq!(rows.len(), 5);
    assert!((rows[0][1] - 2.3381).abs() < 1e-4);
    let report = String::from_utf8(o.stdout).unwrap();
    assert!(report.contains("orthonormality residual"));
}

#[test]
fn no_compute_reports_a_cache_miss() {
    let dir = tempfile::tempdir().unwrap();
    let o = bouncer(&["fig", "3", "--no-compute"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("cache miss"));
}

#[test]
fn unknown_figure_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!bouncer(&["fig", "8"], dir.path()).status.success());
}

#[test]
fn figure_bundles_for_the_released_packet() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert!(bouncer(&["project"], out).status.success());

    assert!(bouncer(&["fig", "3", "--no-compute"], out).status.success());
    let series = data_rows(&out.join("fig3/series.csv"));
    assert_eq!(series[0][0], 0.0);
    assert!((series[0][1] - 25.0).abs() <= 1e-3);
    assert_eq!(series.len(), 1601);
    assert_eq!(manifest_value(&out.join("fig3"), "config.z0"), "25");

    assert!(bouncer(&["fig", "5", "--no-compute"], out).status.success());
    let table = Basis::load(out.join("coefficients.basis")).unwrap();
    let cs = CoefficientSet::load(out.join("coefficients.txt"), &table).unwrap();
    let plateau: f64 = manifest_value(&out.join("fig5"), "plateau.autocorr2")
        .parse()
        .unwrap();
    assert_eq!(plateau, cs.collapsed_plateau());
    assert_eq!(manifest_value(&out.join("fig5"), "basis"), cs.basis_id());

    assert!(bouncer(&["fig", "1", "--no-compute"], out).status.success());
    for t in 0..=10 {
        assert!(out.join(format!("fig1/psi_t{t}.csv")).exists());
        assert!(out.join(format!("fig1/phi_t{t}.csv")).exists());
    }
    let psi0 = data_rows(&out.join("fig1/psi_t0.csv"));
    let peak = psi0
        .iter()
        .fold((0.0, 0.0), |b, r| if r[1] > b.1 { (r[0], r[1]) } else { b });
    assert!((peak.0 - 25.0).abs() < 0.1);

    assert!(bouncer(&["fig", "2", "--no-compute"], out).status.success());
    let band = data_rows(&out.join("fig2/band.csv"));
    assert_eq!(band[0][1..], [-1.0, -0.5, 0.0, 0.5, 1.0]);
}

#[test]
fn revival_window_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert!(bouncer(&["fig", "7"], out).status.success());
    let lag: f64 = manifest_value(&out.join("fig7"), "lag_z").parse().unwrap();
    assert!((0.0..10.0).contains(&lag));
    let overlays = data_rows(&out.join("fig7/overlays.csv"));
    // the comparison column starts from the initial overlap
    assert!((overlays[0][3] - 1.0).abs() < 1e-9);
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# small packet\nz0 = 6\ntol = 1e-4\nnmax = 30\n").unwrap();
    let env_out = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_bouncer"))
        .args(["project", "--config"])
        .arg(&cfg)
        .env("BOUNCER_OUT", &env_out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(env_out.join("coefficients.txt")).unwrap();
    assert!(text.starts_with("# packet z0=6 dz0=1 p0=0"));
    assert!(text.contains("n_max=30"));

    fs::write(&cfg, "z0 = 6\ncolour = red\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_bouncer"))
        .args(["project", "--config"])
        .arg(&cfg)
        .env("BOUNCER_OUT", &env_out)
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
}

#[test]
fn report_summarizes_and_signals_violations() {
    let dir = tempfile::tempdir().unwrap();
    let o = bouncer(&["report"], dir.path());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("T_cl = 10.00  T_rev = 795.77  T_coll = 125.00"));
    assert!(text.contains("plateau mean_z"));
    // exit status mirrors the checks
    let all_ok = !text.contains("FAILED");
    assert_eq!(o.status.success(), all_ok);
    assert_eq!(
        fs::read_to_string(dir.path().join("report.txt")).unwrap(),
        text
    );
}
