//! End-to-end tests of the `lasercom` binary: every subcommand against
//! the shipped default scenario, the output-file contracts, exit
//! codes, and the determinism acceptance criterion.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_lasercom")
}

fn default_scenario() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/default.json")
}

fn run_cmd(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("failed to spawn lasercom")
}

fn run_default(subcommand: &str, out: &Path, extra: &[&str]) -> Output {
    let scenario = default_scenario();
    let mut args = vec![
        subcommand,
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    run_cmd(&args)
}

/// Parse an emitted CSV back: header plus fully numeric rows.
fn parse_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    assert!(text.ends_with('\n'), "{path:?} must end with LF");
    assert!(!text.contains('\r'), "{path:?} must use LF endings");
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), header.len(), "ragged row in {path:?}");
            fields
                .iter()
                .map(|f| f.parse::<f64>().unwrap_or_else(|_| panic!("non-numeric field '{f}' in {path:?}")))
                .collect()
        })
        .collect();
    (header, rows)
}

#[test]
fn link_writes_budget_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_default("link", dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(dir.path().join("link_budget.csv")).unwrap();
    let snr_line = text.lines().find(|l| l.starts_with("snr,")).unwrap();
    let snr_db: f64 = snr_line.split(',').nth(2).unwrap().parse().unwrap();
    assert!((snr_db - 7.4508).abs() < 1e-3, "{snr_db}");
    let lp_line = text.lines().find(|l| l.starts_with("pointing_loss,")).unwrap();
    let lp: f64 = lp_line.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(lp, 1.0); // on-axis scenario

    let (header, rows) = parse_csv(&dir.path().join("link_sweep.csv"));
    assert_eq!(header, ["d_m", "snr_db", "snr_tilde_db", "threshold_db"]);
    assert_eq!(rows.len(), 60);
    // SNR falls with distance; threshold column is flat
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
    assert!(rows.iter().all(|r| (r[3] - 3.0).abs() < 1e-9));
}

#[test]
fn acquire_sweep_contract_holds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_default("acquire", dir.path(), &[]);
    assert!(out.status.success());

    let (header, rows) = parse_csv(&dir.path().join("acquire_sweep.csv"));
    assert_eq!(header, ["d_m", "zeta_rad", "p_ij", "p_ij_optimized"]);
    assert_eq!(rows.len(), 40 * 40);
    for row in &rows {
        assert!((0.0..=1.0).contains(&row[2]));
        assert!((0.0..=1.0).contains(&row[3]));
        assert!(row[3] >= row[2] - 1e-15, "optimized below plain: {row:?}");
    }
    // far unoptimized cells are dead, optimization revives small zeta
    let far = rows.iter().filter(|r| r[0] > 1.6e9).collect::<Vec<_>>();
    assert!(!far.is_empty());
    assert!(far.iter().all(|r| r[2] < 1e-6));
    assert!(far.iter().any(|r| r[3] > 0.1));
}

#[test]
fn constellation_tables_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_default("constellation", dir.path(), &[]);
    assert!(out.status.success());

    let (header, rings) = parse_csv(&dir.path().join("rings.csv"));
    assert_eq!(header, ["ring_index", "a_k_m", "n_k", "omega_k_rad_s"]);
    assert_eq!(rings.len(), 11);
    let total: f64 = rings.iter().map(|r| r[2]).sum();

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("constellation_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["n_exact"].as_u64().unwrap(), total as u64);
    assert_eq!(total as u64, 1733);

    let (header, grid) = parse_csv(&dir.path().join("cost_grid.csv"));
    assert_eq!(header, ["spacing_m", "extent_m", "n_exact", "cost_over_tfu"]);
    assert_eq!(grid.len(), 9 * 5);
    // cost grows with extent at fixed spacing
    for rows in grid.chunks(5) {
        assert!(rows.windows(2).all(|w| w[1][3] >= w[0][3]));
    }
}

#[test]
fn attitude_tables_have_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_default("attitude", dir.path(), &[]);
    assert!(out.status.success());

    let (header, rows) = parse_csv(&dir.path().join("attitude_grid.csv"));
    assert_eq!(
        header,
        ["gyro_arw", "gyro_rrw", "st_noise_rad", "st_cadence_s", "zeta_kno_rad"]
    );
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r[4] > 0.0 && r[4] < r[2]));

    let (header, mems) = parse_csv(&dir.path().join("mems_arw.csv"));
    assert_eq!(header, ["temperature_k", "quality_factor", "arw_rad_per_s_sqrt_hz"]);
    assert_eq!(mems.len(), 6 * 9);
    // hotter is noisier at fixed quality factor
    let q0 = mems[0][1];
    let at_q0: Vec<&Vec<f64>> = mems.iter().filter(|r| r[1] == q0).collect();
    assert!(at_q0.windows(2).all(|w| w[1][2] > w[0][2]));
}

#[test]
fn mc_outputs_and_summary_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_default("mc", dir.path(), &["--seed", "99"]);
    assert!(out.status.success());

    let (header, rows) = parse_csv(&dir.path().join("mc_events.csv"));
    assert_eq!(
        header,
        ["run_id", "t_s", "dtheta_a_rad", "sigma_a_rad", "dtheta_b_rad", "sigma_b_rad"]
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mc_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["runs"].as_u64().unwrap(), 3000);
    assert_eq!(summary["acquisitions"].as_u64().unwrap(), rows.len() as u64);
    // events are ordered by run id
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
}

// -----------------------------------------------------------------------
// criterion 10: identical bytes across seeds, runs, and thread counts
// -----------------------------------------------------------------------

#[test]
fn criterion_10_mc_byte_identical_across_threads() {
    let mut outputs: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for threads in ["1", "4", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run_default("mc", dir.path(), &["--seed", "12345", "--threads", threads]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push((
            std::fs::read(dir.path().join("mc_events.csv")).unwrap(),
            std::fs::read(dir.path().join("mc_summary.json")).unwrap(),
        ));
    }
    let pass = outputs.windows(2).all(|w| w[0] == w[1]);
    println!(
        "criterion 10 (mc outputs byte-identical across --threads 1/4/4): {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
    assert!(!outputs[0].0.is_empty());
}

// -----------------------------------------------------------------------
// validation and exit codes
// -----------------------------------------------------------------------

fn write_scenario(dir: &Path, mutate: impl Fn(&mut serde_json::Value)) -> PathBuf {
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(default_scenario()).unwrap()).unwrap();
    mutate(&mut value);
    let path = dir.join("scenario.json");
    std::fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    path
}

#[test]
fn unknown_keys_are_rejected_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), |v| {
        v["terminal"]["emitter"]["colour"] = serde_json::json!("mauve");
    });
    let out = run_cmd(&["link", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("colour"), "{stderr}");
}

#[test]
fn invalid_values_report_field_path_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), |v| {
        v["terminal"]["emitter"]["power_w"] = serde_json::json!(-1.0);
    });
    let out = run_cmd(&["link", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("terminal.emitter"), "{stderr}");
    assert!(stderr.contains("power_w"), "{stderr}");
}

#[test]
fn zero_runs_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), |v| {
        v["mc"]["runs"] = serde_json::json!(0);
    });
    let out = run_cmd(&["mc", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_sweep_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), |v| {
        v["acquire"]["distances"] = serde_json::json!([]);
    });
    let out = run_cmd(&["acquire", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_unit_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), |v| {
        v["link"]["distance"] = serde_json::json!("2 parsec");
    });
    let out = run_cmd(&["link", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parsec"));
}

#[test]
fn missing_scenario_flag_is_exit_2() {
    let out = run_cmd(&["link"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_section_names_the_section() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), |v| {
        v.as_object_mut().unwrap().remove("mc");
    });
    let out = run_cmd(&["mc", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`mc`"));
}

#[test]
fn optimize_beamwidth_improves_far_link() {
    // at 20 x GEO the hardware beam cannot close the link; the
    // optimized beam restores a positive margin
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), |v| {
        v["link"]["distance"] = serde_json::json!("20 GEO");
        v["link"].as_object_mut().unwrap().remove("sweep");
    });
    let args_base = ["link", "--scenario", path.to_str().unwrap(), "--out"];

    let plain_dir = tempfile::tempdir().unwrap();
    let out = run_cmd(&[&args_base[..], &[plain_dir.path().to_str().unwrap()]].concat());
    assert!(out.status.success());
    let plain = std::fs::read_to_string(plain_dir.path().join("link_budget.csv")).unwrap();

    let opt_dir = tempfile::tempdir().unwrap();
    let out = run_cmd(&[&args_base[..], &[opt_dir.path().to_str().unwrap(), "--optimize-beamwidth"]].concat());
    assert!(out.status.success());
    let optimized = std::fs::read_to_string(opt_dir.path().join("link_budget.csv")).unwrap();

    let snr_of = |text: &str| -> f64 {
        text.lines()
            .find(|l| l.starts_with("snr_tilde,"))
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    let thr = 10f64.powf(0.3);
    assert!(snr_of(&plain) < thr);
    assert!(snr_of(&optimized) > thr);
}
