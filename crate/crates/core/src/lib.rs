//! One-dimensional transfer-matrix optics for arrays of thick dielectric
//! membranes, alone or inside a Fabry–Pérot cavity.
//!
//! Lengths are in nanometres and wavenumbers in rad/nm throughout.

pub mod array;
pub mod cavity;
pub mod error;
pub mod experiment;
pub mod membrane;
pub mod optomech;
pub mod search;
pub mod tmm;

pub use array::{Branch, MembraneArray, MembraneModel, RootSearch, TransmissiveWavelength};
pub use cavity::{mirror_zeta_from_finesse, CavityConfig, Parity, ResonanceRecord};
pub use error::{Error, Result};
pub use membrane::{FresnelPair, SlabMembrane, ThinMembrane};
pub use optomech::{
    analytic_g_pm, extract_couplings, AnalyticCoupling, CouplingOptions, CouplingResult,
};
pub use tmm::{Element, FieldSample, StackLayout, TransferMatrix, WaveState};
