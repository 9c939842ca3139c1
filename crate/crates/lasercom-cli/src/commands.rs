//! One function per subcommand. Each takes the validated scenario plus
//! the output directory and writes its tables.

use std::path::Path;

use serde::Serialize;

use lasercom::acquisition::{TerminalSpec, Threshold};
use lasercom::beam_control::{
    acquisition_probability_sweep, optimal_sigma_acquisition, run_mc_acquisition, ModulationPolicy,
};
use lasercom::constants::to_db;
use lasercom::constellation::{
    build_rings, relative_cost, total_terminals_approx, total_terminals_exact, ApproxForm,
    ConstellationSpec,
};
use lasercom::link_budget::{received_power, snr, snr_tilde, EmitterParams, LinkState};
use lasercom::Error;

use crate::output::{fmt_f64, write_json, CsvWriter};
use crate::scenario::{McPlan, ModulationPlan, Scenario, Sigma0};
use crate::CliError;

fn lift(e: Error) -> CliError {
    match e {
        Error::Numerical(msg) => CliError::Numerical(msg),
        other => CliError::Validation(other.to_string()),
    }
}

fn require<'a, T>(section: Option<&'a T>, name: &str) -> Result<&'a T, CliError> {
    section.ok_or_else(|| {
        CliError::Validation(format!("scenario is missing the `{name}` section"))
    })
}

/// Beam width the emitter should use: hardware diffraction width, or
/// the per-link acquisition optimum under `--optimize-beamwidth`.
fn effective_emitter(
    tx: &TerminalSpec,
    rx: &TerminalSpec,
    distance_m: f64,
    thr: &Threshold,
    optimize: bool,
) -> Result<EmitterParams, CliError> {
    if !optimize {
        return Ok(tx.emitter);
    }
    let sigma = optimal_sigma_acquisition(tx, rx, distance_m, thr).map_err(lift)?;
    // same wavelength and power, waist chosen so the diffraction
    // spreading equals the optimal beam width
    let waist = tx.emitter.wavelength_m / (2.0 * std::f64::consts::PI * sigma);
    EmitterParams::new(tx.emitter.power_w, tx.emitter.wavelength_m, waist).map_err(lift)
}

pub fn cmd_link(scenario: &Scenario, out: &Path, optimize: bool) -> Result<(), CliError> {
    let plan = require(scenario.link.as_ref(), "link")?;
    let a = &scenario.terminal_a;
    let b = &scenario.terminal_b;
    let thr = &scenario.threshold;
    let emitter = effective_emitter(a, b, plan.distance_m, thr, optimize)?;

    let link = LinkState::new(plan.distance_m, plan.offpoint_rad).map_err(lift)?;
    let budget = received_power(&emitter, &b.detector, &link).map_err(lift)?;
    let snr_val = snr(&emitter, &b.detector, &link, b.snr_model).map_err(lift)?;
    let snr_tilde_val = snr_tilde(&emitter, &b.detector, plan.distance_m, b.snr_model).map_err(lift)?;

    let mut csv = CsvWriter::new(&["quantity", "linear", "db"]);
    for (name, value) in [
        ("space_loss", budget.space_loss),
        ("tx_gain", budget.tx_gain),
        ("rx_gain", budget.rx_gain),
        ("pointing_loss", budget.pointing_loss),
        ("received_power_w", budget.received_power_w),
        ("snr", snr_val),
        ("snr_tilde", snr_tilde_val),
    ] {
        csv.row(&[name.to_string(), fmt_f64(value), fmt_f64(to_db(value))]);
    }
    csv.write_to(&out.join("link_budget.csv"))?;

    println!("link budget at d = {} m (offpoint {} rad):", plan.distance_m, plan.offpoint_rad);
    println!("  space loss     {:>12.4} dB", budget.space_loss_db());
    println!("  tx gain        {:>12.4} dB", budget.tx_gain_db());
    println!("  rx gain        {:>12.4} dB", budget.rx_gain_db());
    println!("  pointing loss  {:>12.4} dB", budget.pointing_loss_db());
    println!("  received power {:>12.4} dBW", budget.received_power_dbw());
    println!("  snr            {:>12.4} dB", to_db(snr_val));
    println!("  snr (no L_p)   {:>12.4} dB", to_db(snr_tilde_val));
    println!("  threshold      {:>12.4} dB", thr.snr_star_db());

    if let Some(sweep) = &plan.sweep_m {
        let mut csv = CsvWriter::new(&["d_m", "snr_db", "snr_tilde_db", "threshold_db"]);
        for &d in sweep {
            let emitter_d = effective_emitter(a, b, d, thr, optimize)?;
            let s = snr(
                &emitter_d,
                &b.detector,
                &LinkState::new(d, plan.offpoint_rad).map_err(lift)?,
                b.snr_model,
            )
            .map_err(lift)?;
            let st = snr_tilde(&emitter_d, &b.detector, d, b.snr_model).map_err(lift)?;
            csv.row(&[
                fmt_f64(d),
                fmt_f64(to_db(s)),
                fmt_f64(to_db(st)),
                fmt_f64(thr.snr_star_db()),
            ]);
        }
        csv.write_to(&out.join("link_sweep.csv"))?;
    }
    Ok(())
}

pub fn cmd_acquire(scenario: &Scenario, out: &Path) -> Result<(), CliError> {
    let plan = require(scenario.acquire.as_ref(), "acquire")?;
    let a = &scenario.terminal_a;
    let b = &scenario.terminal_b;
    let thr = &scenario.threshold;
    let plain = acquisition_probability_sweep(a, b, &plan.distances_m, &plan.zetas_rad, thr, false)
        .map_err(lift)?;
    let optimized =
        acquisition_probability_sweep(a, b, &plan.distances_m, &plan.zetas_rad, thr, true)
            .map_err(lift)?;

    let mut csv = CsvWriter::new(&["d_m", "zeta_rad", "p_ij", "p_ij_optimized"]);
    for (p, o) in plain.iter().zip(&optimized) {
        csv.row(&[
            fmt_f64(p.distance_m),
            fmt_f64(p.zeta_rad),
            fmt_f64(p.p_ij),
            fmt_f64(o.p_ij),
        ]);
    }
    csv.write_to(&out.join("acquire_sweep.csv"))?;
    println!(
        "acquire sweep: {} distances x {} pointing errors -> acquire_sweep.csv",
        plan.distances_m.len(),
        plan.zetas_rad.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct McSummaryOut {
    runs: u32,
    acquisitions: u32,
    acq_fraction: f64,
    mean_time_s: Option<f64>,
}

fn build_policy(
    plan: &ModulationPlan,
    tx: &TerminalSpec,
    rx: &TerminalSpec,
    mc: &McPlan,
    thr: &Threshold,
    optimize: bool,
) -> Result<ModulationPolicy, CliError> {
    let sigma0 = match plan.sigma0 {
        Sigma0::Fixed(angle) => angle.0,
        Sigma0::Auto => {
            if optimize {
                optimal_sigma_acquisition(tx, rx, mc.distance_m, thr).map_err(lift)?
            } else {
                tx.emitter.diffraction_sigma()
            }
        }
    };
    let period = plan.period_s.unwrap_or(200.0 * mc.config.dt_s);
    ModulationPolicy::new(sigma0, plan.amplitude_frac, period, plan.phase_rad).map_err(lift)
}

pub fn cmd_mc(scenario: &Scenario, out: &Path, optimize: bool) -> Result<(), CliError> {
    let plan = require(scenario.mc.as_ref(), "mc")?;
    let a = &scenario.terminal_a;
    let b = &scenario.terminal_b;
    let thr = &scenario.threshold;
    let policy_a = build_policy(&plan.modulation_a, a, b, plan, thr, optimize)?;
    let policy_b = build_policy(&plan.modulation_b, b, a, plan, thr, optimize)?;

    let outcome = run_mc_acquisition(a, b, plan.distance_m, thr, &policy_a, &policy_b, &plan.config)
        .map_err(lift)?;

    let mut csv = CsvWriter::new(&[
        "run_id",
        "t_s",
        "dtheta_a_rad",
        "sigma_a_rad",
        "dtheta_b_rad",
        "sigma_b_rad",
    ]);
    for e in &outcome.events {
        csv.row(&[
            e.run_id.to_string(),
            fmt_f64(e.time_s),
            fmt_f64(e.dtheta_a_rad),
            fmt_f64(e.sigma_a_rad),
            fmt_f64(e.dtheta_b_rad),
            fmt_f64(e.sigma_b_rad),
        ]);
    }
    csv.write_to(&out.join("mc_events.csv"))?;

    let summary = McSummaryOut {
        runs: outcome.summary.runs,
        acquisitions: outcome.summary.acquisitions,
        acq_fraction: outcome.summary.acq_fraction,
        mean_time_s: outcome.summary.mean_time_s,
    };
    write_json(&out.join("mc_summary.json"), &summary)?;
    println!(
        "mc: {} runs, {} acquisitions (fraction {}), mean time {:?} s",
        summary.runs, summary.acquisitions, summary.acq_fraction, summary.mean_time_s
    );
    Ok(())
}

#[derive(Serialize)]
struct ConstellationSummaryOut {
    n_exact: u64,
    n_approx: f64,
    tfu: f64,
    learning_pct: f64,
    learning_exponent: f64,
    cost_over_tfu: f64,
    cost: f64,
}

pub fn cmd_constellation(scenario: &Scenario, out: &Path) -> Result<(), CliError> {
    let plan = require(scenario.constellation.as_ref(), "constellation")?;
    let rings = build_rings(&plan.spec).map_err(lift)?;

    let mut csv = CsvWriter::new(&["ring_index", "a_k_m", "n_k", "omega_k_rad_s"]);
    for r in &rings {
        csv.row(&[
            r.index.to_string(),
            fmt_f64(r.semimajor_axis_m),
            r.count.to_string(),
            fmt_f64(r.mean_motion_rad_s),
        ]);
    }
    csv.write_to(&out.join("rings.csv"))?;

    let mut grid = CsvWriter::new(&["spacing_m", "extent_m", "n_exact", "cost_over_tfu"]);
    for &spacing in &plan.grid_spacings_m {
        for &extent in &plan.grid_extents_m {
            let spec = ConstellationSpec::new(plan.spec.a_inner_m, extent, spacing)
                .map_err(lift)?;
            let n = total_terminals_exact(&spec).map_err(lift)?;
            let rel = relative_cost(&plan.cost, n).map_err(lift)?;
            grid.row(&[
                fmt_f64(spacing),
                fmt_f64(extent),
                n.to_string(),
                fmt_f64(rel),
            ]);
        }
    }
    grid.write_to(&out.join("cost_grid.csv"))?;

    let n_exact = total_terminals_exact(&plan.spec).map_err(lift)?;
    let n_approx = total_terminals_approx(
        plan.spec.a_inner_m,
        plan.spec.a_outer_m,
        plan.spec.spacing_m,
        ApproxForm::Precise,
    )
    .map_err(lift)?;
    let cost_over_tfu = relative_cost(&plan.cost, n_exact).map_err(lift)?;
    let summary = ConstellationSummaryOut {
        n_exact,
        n_approx,
        tfu: plan.cost.tfu,
        learning_pct: plan.cost.learning_pct,
        learning_exponent: lasercom::constellation::learning_exponent(plan.cost.learning_pct)
            .map_err(lift)?,
        cost_over_tfu,
        cost: plan.cost.tfu * cost_over_tfu,
    };
    write_json(&out.join("constellation_summary.json"), &summary)?;
    println!(
        "constellation: {} rings, {} terminals (approx {:.1}), cost/TFU {:.1}",
        rings.len(),
        n_exact,
        n_approx,
        cost_over_tfu
    );
    Ok(())
}

pub fn cmd_attitude(scenario: &Scenario, out: &Path) -> Result<(), CliError> {
    use lasercom::attitude::{mems_thermal_arw, steady_state_knowledge_error};

    let plan = require(scenario.attitude.as_ref(), "attitude")?;
    let mut csv = CsvWriter::new(&[
        "gyro_arw",
        "gyro_rrw",
        "st_noise_rad",
        "st_cadence_s",
        "zeta_kno_rad",
    ]);
    for g in &plan.gyros {
        for st in &plan.trackers {
            let z = steady_state_knowledge_error(g, st).map_err(lift)?;
            csv.row(&[
                fmt_f64(g.arw),
                fmt_f64(g.rrw),
                fmt_f64(st.noise_rad),
                fmt_f64(st.cadence_s),
                fmt_f64(z),
            ]);
        }
    }
    csv.write_to(&out.join("attitude_grid.csv"))?;
    println!(
        "attitude: {} gyros x {} trackers -> attitude_grid.csv",
        plan.gyros.len(),
        plan.trackers.len()
    );

    if let Some(mems) = &plan.mems {
        let mut csv = CsvWriter::new(&["temperature_k", "quality_factor", "arw_rad_per_s_sqrt_hz"]);
        for &t in &mems.temperatures_k {
            for &q in &mems.quality_factors {
                let mut p = mems.base;
                p.temperature_k = t;
                p.quality_factor = q;
                let arw = mems_thermal_arw(&p).map_err(lift)?;
                csv.row(&[fmt_f64(t), fmt_f64(q), fmt_f64(arw)]);
            }
        }
        csv.write_to(&out.join("mems_arw.csv"))?;
        println!(
            "attitude: {} temperatures x {} quality factors -> mems_arw.csv",
            mems.temperatures_k.len(),
            mems.quality_factors.len()
        );
    }
    Ok(())
}
