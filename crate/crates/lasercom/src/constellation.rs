//! Heliocentric ring-constellation geometry and production cost.
//!
//! Terminals sit equally spaced on concentric circular rings whose
//! radii step outward by the inter-terminal spacing `d`, so that both
//! neighbors on a ring and the nearest terminal on the adjacent ring
//! are within one link distance. Ring populations follow the chord
//! criterion `n = ceil(pi / asin(d / 2a))`, and production cost follows
//! the learning curve `cost = TFU * N^B` with `B = 1 - log2(1/S)`.

use crate::constants::GM_SUN_M3_S2;
use crate::error::{Error, Result};

/// Constellation extent and spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationSpec {
    /// Innermost semimajor axis \[m\].
    pub a_inner_m: f64,
    /// Outermost semimajor axis \[m\]; rings are generated while they fit.
    pub a_outer_m: f64,
    /// Inter-terminal and inter-ring spacing \[m\].
    pub spacing_m: f64,
    /// Per-ring phase offsets \[rad\]; rings beyond the list default to 0.
    pub phase_offsets_rad: Vec<f64>,
}

impl ConstellationSpec {
    pub fn new(a_inner_m: f64, a_outer_m: f64, spacing_m: f64) -> Result<Self> {
        let s = Self {
            a_inner_m,
            a_outer_m,
            spacing_m,
            phase_offsets_rad: Vec::new(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_inner_m > 0.0) {
            return Err(Error::geometry(format!(
                "a_inner_m must be > 0, got {}",
                self.a_inner_m
            )));
        }
        if !(self.a_outer_m >= self.a_inner_m) {
            return Err(Error::geometry(format!(
                "a_outer_m ({}) must be >= a_inner_m ({})",
                self.a_outer_m, self.a_inner_m
            )));
        }
        if !(self.spacing_m > 0.0 && self.spacing_m < 2.0 * self.a_inner_m) {
            return Err(Error::geometry(format!(
                "spacing_m ({}) must be in (0, 2 a_inner_m)",
                self.spacing_m
            )));
        }
        Ok(())
    }

    /// Phase offset of ring `k` (1-based).
    pub fn phase_offset(&self, ring_index: u32) -> f64 {
        self.phase_offsets_rad
            .get(ring_index as usize - 1)
            .copied()
            .unwrap_or(0.0)
    }
}

/// One populated ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    /// 1-based ring index.
    pub index: u32,
    /// Orbit radius \[m\].
    pub semimajor_axis_m: f64,
    /// Terminals on the ring.
    pub count: u64,
    /// Keplerian mean motion `sqrt(GM_sun / a^3)` \[rad/s\].
    pub mean_motion_rad_s: f64,
}

/// Learning-curve cost model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    /// Theoretical-first-unit cost.
    pub tfu: f64,
    /// Learning-curve slope S as a fraction, in (0.5, 1].
    pub learning_pct: f64,
}

impl CostModel {
    pub fn new(tfu: f64, learning_pct: f64) -> Result<Self> {
        if !(tfu > 0.0) {
            return Err(Error::domain(format!("tfu must be > 0, got {tfu}")));
        }
        learning_exponent(learning_pct)?;
        Ok(Self { tfu, learning_pct })
    }
}

/// Terminals needed so that neighbors on a ring of radius `a` sit at
/// most `spacing` apart: `ceil(pi / asin(spacing / 2a))`, never below 3.
pub fn ring_count(semimajor_axis_m: f64, spacing_m: f64) -> Result<u64> {
    if !(semimajor_axis_m > 0.0) {
        return Err(Error::geometry(format!(
            "semimajor_axis_m must be > 0, got {semimajor_axis_m}"
        )));
    }
    if !(spacing_m > 0.0 && spacing_m < 2.0 * semimajor_axis_m) {
        return Err(Error::geometry(format!(
            "spacing_m ({spacing_m}) must be in (0, 2a) for a ring of radius {semimajor_axis_m}"
        )));
    }
    let n = (std::f64::consts::PI / (spacing_m / (2.0 * semimajor_axis_m)).asin()).ceil() as u64;
    Ok(n.max(3))
}

/// All rings from `a_inner` stepping by `spacing` while they stay
/// within `a_outer` (truncation, never rounding outward).
pub fn build_rings(spec: &ConstellationSpec) -> Result<Vec<Ring>> {
    spec.validate()?;
    let m = ((spec.a_outer_m - spec.a_inner_m) / spec.spacing_m + 1e-9).floor() as u32;
    (0..=m)
        .map(|k| {
            let a = spec.a_inner_m + k as f64 * spec.spacing_m;
            Ok(Ring {
                index: k + 1,
                semimajor_axis_m: a,
                count: ring_count(a, spec.spacing_m)?,
                mean_motion_rad_s: (GM_SUN_M3_S2 / (a * a * a)).sqrt(),
            })
        })
        .collect()
}

/// Exact terminal total: the sum of the ring counts.
pub fn total_terminals_exact(spec: &ConstellationSpec) -> Result<u64> {
    Ok(build_rings(spec)?.iter().map(|r| r.count).sum())
}

/// Which bracketed form of the closed-form terminal count to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxForm {
    /// `m + (d/2a_i) m (m + 1)` — the more precise form.
    Precise,
    /// `m + (d/2a_i) m^2` — the coarser large-m form.
    Coarse,
}

/// Closed-form terminal total
/// `N ~ (2 pi a_i / d) \[m + (d/2a_i) m(m+1)\]` with `m = (a_f - a_i)/d`.
///
/// The form approximates each ring count by `2 pi a_k / d` and sums the
/// rings beyond the innermost; the innermost ring's own count is not
/// included (at `a_f = a_i` it returns 0).
pub fn total_terminals_approx(
    a_inner_m: f64,
    a_outer_m: f64,
    spacing_m: f64,
    form: ApproxForm,
) -> Result<f64> {
    if !(a_inner_m > 0.0 && a_outer_m >= a_inner_m) {
        return Err(Error::geometry(format!(
            "need 0 < a_inner_m <= a_outer_m, got {a_inner_m}, {a_outer_m}"
        )));
    }
    if !(spacing_m > 0.0 && spacing_m < 2.0 * a_inner_m) {
        return Err(Error::geometry(format!(
            "spacing_m ({spacing_m}) must be in (0, 2 a_inner_m)"
        )));
    }
    let m = (a_outer_m - a_inner_m) / spacing_m;
    let half_ratio = spacing_m / (2.0 * a_inner_m);
    let bracket = match form {
        ApproxForm::Precise => m + half_ratio * m * (m + 1.0),
        ApproxForm::Coarse => m + half_ratio * m * m,
    };
    Ok(2.0 * std::f64::consts::PI * a_inner_m / spacing_m * bracket)
}

/// Sun-subtended angle of terminal `i` (0-based) on a ring at time `t`:
/// `theta0 + 2 pi i / n + Omega t`, reduced into `[0, 2 pi)`.
pub fn terminal_angle(ring: &Ring, i: u64, phase_offset_rad: f64, t_s: f64) -> Result<f64> {
    if i >= ring.count {
        return Err(Error::domain(format!(
            "terminal index {i} out of range for ring with {} terminals",
            ring.count
        )));
    }
    let angle = phase_offset_rad
        + std::f64::consts::TAU * i as f64 / ring.count as f64
        + ring.mean_motion_rad_s * t_s;
    Ok(angle.rem_euclid(std::f64::consts::TAU))
}

fn check_alignment_pair(ring_k: &Ring, ring_k1: &Ring, i: u64, j: u64) -> Result<()> {
    if ring_k.mean_motion_rad_s == ring_k1.mean_motion_rad_s {
        return Err(Error::degenerate(
            "alignment time undefined for rings with equal mean motion".to_string(),
        ));
    }
    if i >= ring_k.count || j >= ring_k1.count {
        return Err(Error::domain(format!(
            "terminal pair ({i}, {j}) out of range for rings with ({}, {}) terminals",
            ring_k.count, ring_k1.count
        )));
    }
    Ok(())
}

/// Literal alignment time of terminals `i` and `j` on adjacent rings:
/// `t = \[Delta + 2 pi (i/n_k + j/n_k1)\] / (Omega_k - Omega_k1)`.
pub fn alignment_time(
    ring_k: &Ring,
    ring_k1: &Ring,
    delta_phase_rad: f64,
    i: u64,
    j: u64,
) -> Result<f64> {
    check_alignment_pair(ring_k, ring_k1, i, j)?;
    let bracket = delta_phase_rad
        + std::f64::consts::TAU
            * (i as f64 / ring_k.count as f64 + j as f64 / ring_k1.count as f64);
    Ok(bracket / (ring_k.mean_motion_rad_s - ring_k1.mean_motion_rad_s))
}

/// Smallest non-negative alignment time: the literal time reduced
/// modulo the synodic period `2 pi / |Omega_k - Omega_k1|`.
pub fn min_alignment_time(
    ring_k: &Ring,
    ring_k1: &Ring,
    delta_phase_rad: f64,
    i: u64,
    j: u64,
) -> Result<f64> {
    let t = alignment_time(ring_k, ring_k1, delta_phase_rad, i, j)?;
    let period =
        std::f64::consts::TAU / (ring_k.mean_motion_rad_s - ring_k1.mean_motion_rad_s).abs();
    Ok(t.rem_euclid(period))
}

/// Exhaustive search for the terminal pair with the earliest
/// non-negative alignment; ties break to the lexicographically
/// smallest `(i, j)`.
pub fn min_alignment_pair(
    ring_k: &Ring,
    ring_k1: &Ring,
    delta_phase_rad: f64,
) -> Result<(u64, u64, f64)> {
    check_alignment_pair(ring_k, ring_k1, 0, 0)?;
    let mut best: Option<(u64, u64, f64)> = None;
    for i in 0..ring_k.count {
        for j in 0..ring_k1.count {
            let t = min_alignment_time(ring_k, ring_k1, delta_phase_rad, i, j)?;
            if best.is_none_or(|(_, _, tb)| t < tb) {
                best = Some((i, j, t));
            }
        }
    }
    Ok(best.expect("rings have at least one terminal each"))
}

/// Learning-curve exponent `B = 1 - log2(1/S)` for `S` in (0.5, 1].
pub fn learning_exponent(learning_pct: f64) -> Result<f64> {
    if !(learning_pct > 0.5 && learning_pct <= 1.0) {
        return Err(Error::domain(format!(
            "learning_pct must be in (0.5, 1], got {learning_pct}"
        )));
    }
    Ok(1.0 + learning_pct.log2())
}

/// Production cost `TFU * N^B`.
pub fn production_cost(model: &CostModel, n_terminals: u64) -> Result<f64> {
    Ok(model.tfu * relative_cost(model, n_terminals)?)
}

/// Cost relative to the first unit, `N^B`.
pub fn relative_cost(model: &CostModel, n_terminals: u64) -> Result<f64> {
    if n_terminals < 1 {
        return Err(Error::domain("n_terminals must be >= 1".to_string()));
    }
    let b = learning_exponent(model.learning_pct)?;
    Ok((n_terminals as f64).powf(b))
}
