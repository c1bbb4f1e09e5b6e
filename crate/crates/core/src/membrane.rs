//! Membrane models: the full dielectric slab and the effective thin
//! scatterer with a padding phase on each side.
//!
//! The two models have identical transfer matrices once the padding phase is
//! chosen correctly, so any stack containing one can swap in the other
//! without changing the field outside the membrane.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tmm::{Element, StackLayout, TransferMatrix};

/// Normal-incidence Fresnel coefficients of the vacuum/dielectric interfaces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FresnelPair {
    /// Amplitude reflection `(1-n)/(1+n)` of the entry face; the exit face has `-rho`.
    pub rho: f64,
    pub tau_l: f64,
    pub tau_r: f64,
}

impl FresnelPair {
    pub fn new(index: f64) -> Self {
        FresnelPair {
            rho: (1.0 - index) / (1.0 + index),
            tau_l: 2.0 / (1.0 + index),
            tau_r: 2.0 * index / (1.0 + index),
        }
    }

    /// Interface matrix from vacuum (left) into the dielectric (right).
    pub fn entry_matrix(&self) -> TransferMatrix {
        interface(self.rho, self.tau_l)
    }

    /// Interface matrix from the dielectric (left) back into vacuum (right).
    pub fn exit_matrix(&self) -> TransferMatrix {
        interface(-self.rho, self.tau_r)
    }
}

fn interface(rho: f64, tau: f64) -> TransferMatrix {
    let a = (1.0 / tau).into();
    let b = (rho / tau).into();
    TransferMatrix::new(a, b, b, a)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabMembrane {
    /// Real refractive index, at least 1.
    pub n: f64,
    /// Physical thickness in nm.
    pub l: f64,
}

impl SlabMembrane {
    pub fn new(n: f64, l: f64) -> Result<Self> {
        let m = SlabMembrane { n, l };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n.is_finite() && self.n >= 1.0) {
            return Err(Error::invalid(
                "n",
                format!("refractive index must be >= 1, got {}", self.n),
            ));
        }
        if !(self.l.is_finite() && self.l > 0.0) {
            return Err(Error::invalid(
                "l",
                format!("thickness must be > 0 nm, got {}", self.l),
            ));
        }
        Ok(())
    }

    pub fn fresnel(&self) -> FresnelPair {
        FresnelPair::new(self.n)
    }

    /// Round-trip-free optical phase `k n l` across the slab.
    pub fn optical_phase(&self, k: f64) -> f64 {
        k * self.n * self.l
    }

    pub fn element(&self) -> Element {
        Element::Slab {
            index: self.n,
            thickness: self.l,
        }
    }

    /// `M_l · M_fs(nl) · M_r`.
    pub fn matrix(&self, k: f64) -> TransferMatrix {
        slab_matrix(self, k)
    }

    pub fn polarizability(&self, k: f64) -> f64 {
        polarizability(self, k)
    }

    pub fn padding_phase(&self, k: f64) -> f64 {
        padding_phase(self, k)
    }

    /// The equivalent thin membrane at wavenumber `k`.
    pub fn thin(&self, k: f64) -> ThinMembrane {
        ThinMembrane {
            zeta: self.polarizability(k),
            padding_phase: self.padding_phase(k),
        }
    }
}

/// Thin scatterer with polarizability `zeta` and padding phase `padding_phase`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThinMembrane {
    pub zeta: f64,
    pub padding_phase: f64,
}

impl ThinMembrane {
    pub fn matrix(&self, k: f64, include_padding: bool) -> TransferMatrix {
        thin_matrix(self, k, include_padding)
    }

    /// Padding length `φ/k` added on each side.
    pub fn padding_length(&self, k: f64) -> f64 {
        self.padding_phase / k
    }

    /// Gap–scatterer–gap elements realising the padded model.
    pub fn push_padded(&self, stack: &mut StackLayout, k: f64) {
        let pad = self.padding_length(k);
        stack
            .push(Element::Gap { length: pad })
            .push(Element::Scatterer { zeta: self.zeta })
            .push(Element::Gap { length: pad });
    }
}

pub fn slab_matrix(m: &SlabMembrane, k: f64) -> TransferMatrix {
    m.element().matrix(k)
}

/// `ζ = (n²-1)/(2n) sin(knl)`.
pub fn polarizability(m: &SlabMembrane, k: f64) -> f64 {
    (m.n * m.n - 1.0) / (2.0 * m.n) * m.optical_phase(k).sin()
}

/// Base padding angle `φ₀ ∈ [0, π/2]` with `cos 2φ₀ = [(n²-1)+(n²+1)cos knl] / [(n²+1)+(n²-1)cos knl]`.
///
/// Evaluated through `atan2` rather than `arccos`, which loses half of the
/// significant digits when `knl` is close to a multiple of 2π.
pub fn padding_base_angle(n: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let s = s.abs();
    let a = (n * n + 1.0) / (2.0 * n);
    let b = (n * n - 1.0) / (2.0 * n);
    (0.5 * ((a * s).atan2(c) - (b * s).atan())).max(0.0)
}

/// Padding phase `φ` such that `M_fs(φ/k) M̃ M_fs(φ/k)` equals the slab matrix.
///
/// Grows by π for every full optical wavelength inside the slab, which keeps
/// `φ` continuous in `l`. At `sin(knl) = 0` the `sin > 0` branch is used.
pub fn padding_phase(m: &SlabMembrane, k: f64) -> f64 {
    let theta = m.optical_phase(k);
    let turns = (theta / (2.0 * PI)).floor();
    let phi0 = padding_base_angle(m.n, theta);
    let winding = PI * turns;
    // branch from the reduced angle so it always agrees with the winding
    if theta - 2.0 * PI * turns < PI {
        phi0 + winding
    } else {
        PI - phi0 + winding
    }
}

pub fn thin_matrix(t: &ThinMembrane, _k: f64, include_padding: bool) -> TransferMatrix {
    let core = TransferMatrix::scatterer(t.zeta);
    if include_padding {
        // M_fs(φ/k) accumulates exactly the phase φ
        let pad = TransferMatrix::phase(t.padding_phase);
        pad * core * pad
    } else {
        core
    }
}

/// Largest element-wise deviation between the slab matrix and the padded
/// thin-membrane matrix.
pub fn verify_equivalence(m: &SlabMembrane, k: f64) -> f64 {
    let thin = m.thin(k);
    slab_matrix(m, k).max_abs_diff(&thin_matrix(&thin, k, true))
}
