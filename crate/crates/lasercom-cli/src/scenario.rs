//! Scenario file schema: a single JSON tree describing terminals,
//! threshold, and the per-command sections. Unknown keys are rejected.
//!
//! Lengths and angles accept either a plain SI number or a string with
//! an explicit unit suffix: `"8.4328e7 m"`, `"2 GEO"`, `"0.05 AU"`,
//! `"1 arcsec"`, `"4.85e-6 rad"`. Everything is converted to SI at
//! load; outputs are always SI.

use serde::Deserialize;

use lasercom::acquisition::{PointingError, TerminalSpec, Threshold};
use lasercom::attitude::{GyroParams, MemsThermalParams, StarTrackerParams};
use lasercom::beam_control::{McConfig, PointingProcess};
use lasercom::constants::{ARCSEC_RAD, AU_M, GEO_RADIUS_M};
use lasercom::constellation::{ConstellationSpec, CostModel};
use lasercom::link_budget::{DetectorParams, EmitterParams, SnrModel};

use crate::CliError;

fn val(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{path}: {msg}"))
}

// ---------------------------------------------------------------------
// quantities with unit suffixes
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawQuantity {
    Number(f64),
    Text(String),
}

fn parse_with_units(raw: &RawQuantity, units: &[(&str, f64)], kind: &str) -> Result<f64, String> {
    match raw {
        RawQuantity::Number(x) => Ok(*x),
        RawQuantity::Text(s) => {
            let mut parts = s.split_whitespace();
            let number = parts
                .next()
                .ok_or_else(|| format!("empty {kind} quantity"))?;
            let unit = parts
                .next()
                .ok_or_else(|| format!("missing unit in {kind} quantity '{s}'"))?;
            if parts.next().is_some() {
                return Err(format!("trailing text in {kind} quantity '{s}'"));
            }
            let value: f64 = number
                .parse()
                .map_err(|_| format!("bad number in {kind} quantity '{s}'"))?;
            let scale = units
                .iter()
                .find(|(name, _)| *name == unit)
                .map(|(_, scale)| *scale)
                .ok_or_else(|| {
                    let names: Vec<&str> = units.iter().map(|(n, _)| *n).collect();
                    format!("unknown {kind} unit '{unit}' (expected one of {names:?})")
                })?;
            Ok(value * scale)
        }
    }
}

/// Length in meters; accepts `m`, `km`, `AU`, `GEO`.
#[derive(Debug, Clone, Copy)]
pub struct Length(pub f64);

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawQuantity::deserialize(d)?;
        parse_with_units(
            &raw,
            &[("m", 1.0), ("km", 1e3), ("AU", AU_M), ("GEO", GEO_RADIUS_M)],
            "length",
        )
        .map(Length)
        .map_err(serde::de::Error::custom)
    }
}

/// Angle in radians; accepts `rad`, `mrad`, `urad`, `arcsec`.
#[derive(Debug, Clone, Copy)]
pub struct Angle(pub f64);

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawQuantity::deserialize(d)?;
        parse_with_units(
            &raw,
            &[
                ("rad", 1.0),
                ("mrad", 1e-3),
                ("urad", 1e-6),
                ("arcsec", ARCSEC_RAD),
            ],
            "angle",
        )
        .map(Angle)
        .map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------
// ranges
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Deserialize, Default, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    #[default]
    Log,
}

/// Either an explicit list or a `{start, stop, count, scale}` range
/// (log-spaced unless `scale` says otherwise).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RangeOrList<T> {
    List(Vec<T>),
    Range {
        start: T,
        stop: T,
        count: usize,
        #[serde(default)]
        scale: Scale,
    },
}

fn materialize(values: &RangeOrList<f64>, path: &str) -> Result<Vec<f64>, CliError> {
    let out = match values {
        RangeOrList::List(list) => list.clone(),
        RangeOrList::Range {
            start,
            stop,
            count,
            scale,
        } => {
            if *count == 0 {
                return Err(val(path, "range count must be >= 1"));
            }
            if *count == 1 {
                vec![*start]
            } else {
                (0..*count)
                    .map(|i| {
                        let f = i as f64 / (*count - 1) as f64;
                        match scale {
                            Scale::Linear => start + (stop - start) * f,
                            Scale::Log => start * (stop / start).powf(f),
                        }
                    })
                    .collect()
            }
        }
    };
    if out.is_empty() {
        return Err(val(path, "range is empty"));
    }
    Ok(out)
}

impl RangeOrList<Length> {
    fn meters(&self, path: &str) -> Result<Vec<f64>, CliError> {
        materialize(&self.as_f64(), path)
    }
    fn as_f64(&self) -> RangeOrList<f64> {
        match self {
            RangeOrList::List(v) => RangeOrList::List(v.iter().map(|l| l.0).collect()),
            RangeOrList::Range {
                start,
                stop,
                count,
                scale,
            } => RangeOrList::Range {
                start: start.0,
                stop: stop.0,
                count: *count,
                scale: *scale,
            },
        }
    }
}

impl RangeOrList<Angle> {
    fn radians(&self, path: &str) -> Result<Vec<f64>, CliError> {
        let as_f64 = match self {
            RangeOrList::List(v) => RangeOrList::List(v.iter().map(|a| a.0).collect()),
            RangeOrList::Range {
                start,
                stop,
                count,
                scale,
            } => RangeOrList::Range {
                start: start.0,
                stop: stop.0,
                count: *count,
                scale: *scale,
            },
        };
        materialize(&as_f64, path)
    }
}

// ---------------------------------------------------------------------
// schema
// ---------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub terminal: TerminalSection,
    /// Second terminal; identical to `terminal` when omitted.
    #[serde(default)]
    pub terminal_b: Option<TerminalSection>,
    pub threshold: ThresholdSection,
    #[serde(default)]
    pub link: Option<LinkSection>,
    #[serde(default)]
    pub acquire: Option<AcquireSection>,
    #[serde(default)]
    pub mc: Option<McSection>,
    #[serde(default)]
    pub constellation: Option<ConstellationSection>,
    #[serde(default)]
    pub attitude: Option<AttitudeSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalSection {
    pub emitter: EmitterSection,
    pub detector: DetectorSection,
    pub pointing: PointingSection,
    pub snr_model: SnrModelName,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSection {
    pub power_w: f64,
    pub wavelength: Length,
    pub waist: Length,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub area_m2: f64,
    pub apd_gain: f64,
    pub responsivity_a_per_w: f64,
    pub excess_noise: f64,
    pub bandwidth_hz: f64,
    #[serde(default)]
    pub qe: Option<f64>,
    #[serde(default)]
    pub noise_electron_rate: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointingSection {
    pub control: Angle,
    pub knowledge: Angle,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrModelName {
    ApdElectrical,
    PhotoelectronCount,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub snr_linear: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub distance: Length,
    #[serde(default)]
    pub offpoint: Option<Angle>,
    /// Distance sweep for the SNR-vs-distance table.
    #[serde(default)]
    pub sweep: Option<RangeOrList<Length>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcquireSection {
    pub distances: RangeOrList<Length>,
    pub zetas: RangeOrList<Angle>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub distance: Length,
    #[serde(default = "default_runs")]
    pub runs: u32,
    pub dt_s: f64,
    pub max_time_s: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub pointing_process: PointingProcessSection,
    #[serde(default)]
    pub modulation: ModulationSection,
    /// Overrides `modulation` for terminal b when present.
    #[serde(default)]
    pub modulation_b: Option<ModulationSection>,
}

fn default_runs() -> u32 {
    3000
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PointingProcessSection {
    #[default]
    IidGaussian,
    OrnsteinUhlenbeck {
        correlation_time_s: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSection {
    /// Center beam width; `"auto"` (default) uses the hardware beam
    /// width, or the acquisition optimum under `--optimize-beamwidth`.
    #[serde(default)]
    pub sigma0: Sigma0,
    #[serde(default = "default_amplitude")]
    pub amplitude_frac: f64,
    /// Defaults to 200 time steps.
    #[serde(default)]
    pub period_s: Option<f64>,
    /// Fixed initial phase; omitted means a fresh seeded draw per run.
    #[serde(default)]
    pub phase_rad: Option<f64>,
}

fn default_amplitude() -> f64 {
    0.9
}

impl Default for ModulationSection {
    fn default() -> Self {
        Self {
            sigma0: Sigma0::Auto,
            amplitude_frac: default_amplitude(),
            period_s: None,
            phase_rad: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sigma0 {
    #[default]
    Auto,
    #[serde(untagged)]
    Fixed(Angle),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSection {
    pub a_inner: Length,
    pub a_outer: Length,
    pub spacing: Length,
    #[serde(default)]
    pub phase_offsets_rad: Vec<f64>,
    pub cost: CostSection,
    #[serde(default)]
    pub grid: Option<ConstellationGridSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSection {
    pub tfu: f64,
    pub learning_pct: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationGridSection {
    pub spacings: RangeOrList<Length>,
    pub extents: RangeOrList<Length>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttitudeSection {
    pub gyros: Vec<GyroSection>,
    pub trackers: Vec<TrackerSection>,
    #[serde(default)]
    pub mems: Option<MemsSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GyroSection {
    pub arw: f64,
    pub rrw: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackerSection {
    pub noise: Angle,
    pub cadence_s: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemsSection {
    pub proof_mass_kg: f64,
    pub drive_amplitude_m: f64,
    pub resonant_freq_rad_s: f64,
    pub angular_gain: f64,
    pub temperatures_k: RangeOrList<f64>,
    pub quality_factors: RangeOrList<f64>,
}

// ---------------------------------------------------------------------
// validated view handed to the commands
// ---------------------------------------------------------------------

pub struct Scenario {
    pub terminal_a: TerminalSpec,
    pub terminal_b: TerminalSpec,
    pub threshold: Threshold,
    pub link: Option<LinkPlan>,
    pub acquire: Option<AcquirePlan>,
    pub mc: Option<McPlan>,
    pub constellation: Option<ConstellationPlan>,
    pub attitude: Option<AttitudePlan>,
}

pub struct LinkPlan {
    pub distance_m: f64,
    pub offpoint_rad: f64,
    pub sweep_m: Option<Vec<f64>>,
}

pub struct AcquirePlan {
    pub distances_m: Vec<f64>,
    pub zetas_rad: Vec<f64>,
}

pub struct ModulationPlan {
    pub sigma0: Sigma0,
    pub amplitude_frac: f64,
    pub period_s: Option<f64>,
    pub phase_rad: Option<f64>,
}

pub struct McPlan {
    pub distance_m: f64,
    pub config: McConfig,
    pub modulation_a: ModulationPlan,
    pub modulation_b: ModulationPlan,
}

pub struct ConstellationPlan {
    pub spec: ConstellationSpec,
    pub cost: CostModel,
    pub grid_spacings_m: Vec<f64>,
    pub grid_extents_m: Vec<f64>,
}

pub struct AttitudePlan {
    pub gyros: Vec<GyroParams>,
    pub trackers: Vec<StarTrackerParams>,
    pub mems: Option<MemsPlan>,
}

pub struct MemsPlan {
    pub base: MemsThermalParams,
    pub temperatures_k: Vec<f64>,
    pub quality_factors: Vec<f64>,
}

fn build_terminal(section: &TerminalSection, path: &str) -> Result<TerminalSpec, CliError> {
    let emitter = EmitterParams::new(
        section.emitter.power_w,
        section.emitter.wavelength.0,
        section.emitter.waist.0,
    )
    .map_err(|e| val(&format!("{path}.emitter"), e))?;
    let mut detector = DetectorParams::new_apd(
        section.detector.area_m2,
        section.detector.apd_gain,
        section.detector.responsivity_a_per_w,
        section.detector.excess_noise,
        section.detector.bandwidth_hz,
    )
    .map_err(|e| val(&format!("{path}.detector"), e))?;
    if section.detector.qe.is_some() || section.detector.noise_electron_rate.is_some() {
        let qe = section
            .detector
            .qe
            .ok_or_else(|| val(&format!("{path}.detector.qe"), "required with noise_electron_rate"))?;
        let rate = section.detector.noise_electron_rate.ok_or_else(|| {
            val(
                &format!("{path}.detector.noise_electron_rate"),
                "required with qe",
            )
        })?;
        detector = detector
            .with_photoelectron_model(qe, rate)
            .map_err(|e| val(&format!("{path}.detector"), e))?;
    }
    let pointing = PointingError::new(section.pointing.control.0, section.pointing.knowledge.0)
        .map_err(|e| val(&format!("{path}.pointing"), e))?;
    let snr_model = match section.snr_model {
        SnrModelName::ApdElectrical => SnrModel::ApdElectrical,
        SnrModelName::PhotoelectronCount => SnrModel::PhotoelectronCount,
    };
    TerminalSpec::new(emitter, detector, pointing, snr_model)
        .map_err(|e| val(path, e))
}

impl ScenarioFile {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read scenario {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!("scenario {}: {e}", path.display()))
        })
    }

    /// Validate every section and convert to SI library types.
    pub fn into_scenario(self, seed_override: Option<u64>) -> Result<Scenario, CliError> {
        let terminal_a = build_terminal(&self.terminal, "terminal")?;
        let terminal_b = match &self.terminal_b {
            Some(section) => build_terminal(section, "terminal_b")?,
            None => terminal_a,
        };

        let threshold = match (self.threshold.snr_db, self.threshold.snr_linear) {
            (Some(db), None) => Threshold::from_db(db).map_err(|e| val("threshold.snr_db", e))?,
            (None, Some(linear)) => {
                Threshold::from_linear(linear).map_err(|e| val("threshold.snr_linear", e))?
            }
            _ => {
                return Err(val(
                    "threshold",
                    "specify exactly one of snr_db or snr_linear",
                ))
            }
        };

        let link = match &self.link {
            None => None,
            Some(section) => Some(LinkPlan {
                distance_m: section.distance.0,
                offpoint_rad: section.offpoint.map(|a| a.0).unwrap_or(0.0),
                sweep_m: section
                    .sweep
                    .as_ref()
                    .map(|r| r.meters("link.sweep"))
                    .transpose()?,
            }),
        };

        let acquire = match &self.acquire {
            None => None,
            Some(section) => Some(AcquirePlan {
                distances_m: section.distances.meters("acquire.distances")?,
                zetas_rad: section.zetas.radians("acquire.zetas")?,
            }),
        };

        let mc = match &self.mc {
            None => None,
            Some(section) => {
                let config = McConfig {
                    runs: section.runs,
                    dt_s: section.dt_s,
                    max_time_s: section.max_time_s,
                    seed: seed_override.unwrap_or(section.seed),
                    pointing_process: match section.pointing_process {
                        PointingProcessSection::IidGaussian => PointingProcess::IidGaussian,
                        PointingProcessSection::OrnsteinUhlenbeck { correlation_time_s } => {
                            PointingProcess::OrnsteinUhlenbeck { correlation_time_s }
                        }
                    },
                };
                config.validate().map_err(|e| val("mc", e))?;
                let plan_of = |m: &ModulationSection| ModulationPlan {
                    sigma0: m.sigma0,
                    amplitude_frac: m.amplitude_frac,
                    period_s: m.period_s,
                    phase_rad: m.phase_rad,
                };
                Some(McPlan {
                    distance_m: section.distance.0,
                    config,
                    modulation_a: plan_of(&section.modulation),
                    modulation_b: plan_of(
                        section.modulation_b.as_ref().unwrap_or(&section.modulation),
                    ),
                })
            }
        };

        let constellation = match &self.constellation {
            None => None,
            Some(section) => {
                let mut spec = ConstellationSpec::new(
                    section.a_inner.0,
                    section.a_outer.0,
                    section.spacing.0,
                )
                .map_err(|e| val("constellation", e))?;
                spec.phase_offsets_rad = section.phase_offsets_rad.clone();
                let cost = CostModel::new(section.cost.tfu, section.cost.learning_pct)
                    .map_err(|e| val("constellation.cost", e))?;
                let (grid_spacings_m, grid_extents_m) = match &section.grid {
                    Some(grid) => (
                        grid.spacings.meters("constellation.grid.spacings")?,
                        grid.extents.meters("constellation.grid.extents")?,
                    ),
                    None => (vec![spec.spacing_m], vec![spec.a_outer_m]),
                };
                Some(ConstellationPlan {
                    spec,
                    cost,
                    grid_spacings_m,
                    grid_extents_m,
                })
            }
        };

        let attitude = match &self.attitude {
            None => None,
            Some(section) => {
                let gyros = section
                    .gyros
                    .iter()
                    .enumerate()
                    .map(|(i, g)| {
                        GyroParams::new(g.arw, g.rrw)
                            .map_err(|e| val(&format!("attitude.gyros[{i}]"), e))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let trackers = section
                    .trackers
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        StarTrackerParams::new(t.noise.0, t.cadence_s)
                            .map_err(|e| val(&format!("attitude.trackers[{i}]"), e))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if gyros.is_empty() || trackers.is_empty() {
                    return Err(val("attitude", "gyros and trackers must be non-empty"));
                }
                let mems = match &section.mems {
                    None => None,
                    Some(m) => {
                        let base = MemsThermalParams {
                            temperature_k: 300.0,
                            quality_factor: 1e4,
                            proof_mass_kg: m.proof_mass_kg,
                            drive_amplitude_m: m.drive_amplitude_m,
                            resonant_freq_rad_s: m.resonant_freq_rad_s,
                            angular_gain: m.angular_gain,
                        };
                        base.validate().map_err(|e| val("attitude.mems", e))?;
                        Some(MemsPlan {
                            base,
                            temperatures_k: materialize(
                                &m.temperatures_k,
                                "attitude.mems.temperatures_k",
                            )?,
                            quality_factors: materialize(
                                &m.quality_factors,
                                "attitude.mems.quality_factors",
                            )?,
                        })
                    }
                };
                Some(AttitudePlan {
                    gyros,
                    trackers,
                    mems,
                })
            }
        };

        Ok(Scenario {
            terminal_a,
            terminal_b,
            threshold,
            link,
            acquire,
            mc,
            constellation,
            attitude,
        })
    }
}
