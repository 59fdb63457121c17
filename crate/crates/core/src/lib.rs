//! Hermite-Gaussian mode structure of photon pairs from thin-crystal
//! spontaneous parametric down-conversion.
//!
//! - [`special_math`]: Hermite/Laguerre polynomials, half-integer factorials,
//!   Gauss-Hermite rules.
//! - [`transverse_modes`]: normalized HG and LG fields and beam parameters.
//! - [`spdc_overlap`]: decomposition coefficients, the mode-match probability
//!   `Q_m` and conservation-law reports.
//! - [`photon_states`]: two-photon states, HG/LG conversion blocks, Schmidt
//!   entropy.
//! - [`hom_teleport`]: parity-qubit Hong-Ou-Mandel coincidences and the
//!   parity-encoded teleportation protocol.
//! - [`cli`]: the `hg-entangle` command line.

pub mod cli;
pub mod error;
pub mod hom_teleport;
pub mod photon_states;
pub mod spdc_overlap;
pub mod special_math;
pub mod transverse_modes;

pub use error::{Error, Result};
pub use special_math::QuadratureSpec;
pub use transverse_modes::{LGIndex, ModeIndex, WaistRatio};
