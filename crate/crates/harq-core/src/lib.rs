//! Performance analysis of HARQ with incremental redundancy over a
//! three-node amplify-and-forward relay channel.
//!
//! The crate is layered:
//!
//! * [`channel`]: link profile, fading draws and the single-round SNR law.
//! * [`special`]: complex incomplete gamma, Meijer G and the upper incomplete
//!   Fox H function evaluated by Mellin–Barnes contour quadrature.
//! * [`analytic`]: outage (exact and Minkowski bound), average number of
//!   transmissions, rate, energy efficiency and queueing delay.
//! * [`oracle`]: special-function-free recursive quadrature for the same
//!   distributions, used as an independent check.
//! * [`sim`]: protocol and queue Monte Carlo.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod oracle;
pub mod quad;
pub mod sim;
pub mod special;

pub use analytic::{DerivedMetrics, Evaluator, OutageFamily, OutageResult, PerfReport};
pub use channel::{BaselinePower, LinkProfile, LinkStreams, RoundDraw, ScenarioParams};
pub use error::{Error, Result};
pub use special::ContourConfig;
