//! Special functions evaluated by Mellin–Barnes contour quadrature.

mod contour;
mod foxh;
pub mod gamma;
mod incgamma;
mod meijer;

pub use contour::{mellin_barnes_integrate, ContourConfig};
pub use foxh::{fox_h, fox_h_scaled, FoxHSpec, FoxTriple, ScaledValue};
pub use gamma::{gamma, ln_gamma};
pub use incgamma::{lower_series, scaled_upper_gamma, upper_incomplete_gamma};
pub use meijer::{meijer_g, MeijerGSpec};

pub(crate) use foxh::fox_h_eval;
pub(crate) use meijer::meijer_g_eval;
