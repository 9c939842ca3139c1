//! Analytical models for optical beacon links between small satellites:
//! Gaussian-beam link budgets, mutual-acquisition probability,
//! beam-width optimization with a Monte Carlo acquisition simulator,
//! heliocentric ring-constellation sizing and cost, and steady-state
//! attitude-knowledge estimation.
//!
//! Everything is SI internally (m, W, Hz, rad, s, K) and decibels are
//! power decibels, `10 log10`. All functions are pure; values are
//! immutable after construction and safe to share across threads.
//!
//! ```
//! use lasercom::constants::GEO_RADIUS_M;
//! use lasercom::link_budget::{self, EmitterParams, DetectorParams, LinkState, SnrModel};
//!
//! let emitter = EmitterParams::new(2.02, 1.55e-6, 0.05)?;
//! let detector = DetectorParams::new_apd(0.0025, 10.0, 0.99, 4.3, 300e6)?;
//! let link = LinkState::new(2.0 * GEO_RADIUS_M, 0.0)?;
//! let snr = link_budget::snr(&emitter, &detector, &link, SnrModel::ApdElectrical)?;
//! assert!((lasercom::constants::to_db(snr) - 7.45).abs() < 0.01);
//! # Ok::<(), lasercom::Error>(())
//! ```
//!
//! The narrative guide in `book/` walks through each model; its code
//! snippets compile and run as part of `cargo test --doc`.

// validation uses `!(x > 0.0)` throughout: unlike `x <= 0.0` it also
// rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acquisition;
pub mod attitude;
pub mod beam_control;
pub mod constants;
pub mod constellation;
pub mod error;
pub mod link_budget;

pub use error::{Error, Result};

// The mdbook chapters double as doc-tests so the guide can never
// drift from the API it documents.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(link_budget, "../../../book/src/link-budget.md");
    chapter!(acquisition, "../../../book/src/acquisition.md");
    chapter!(beam_width, "../../../book/src/beam-width.md");
    chapter!(monte_carlo, "../../../book/src/monte-carlo.md");
    chapter!(constellation, "../../../book/src/constellation.md");
    chapter!(attitude, "../../../book/src/attitude.md");
    chapter!(cli, "../../../book/src/cli.md");
}
