//! Periodic arrays of identical membranes: transfer matrix, transmission
//! spectrum and the search for wavelengths of unit transmission.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::membrane::SlabMembrane;
use crate::search::{bisect, golden_min, linspace, logspace_per_decade};
use crate::tmm::{StackLayout, TransferMatrix};

/// Degeneracy threshold on `|ζ|`.
pub const DEFAULT_DEGENERACY_EPS: f64 = 1e-3;
/// Bracketing grid density for the transmissive-wavelength search.
pub const DEFAULT_SAMPLES_PER_DECADE: usize = 20_000;
/// Final bracket width of a transmissive root, nm.
pub const DEFAULT_ROOT_TOL_NM: f64 = 1e-9;
/// Required `|1 - T|` at an accepted root.
pub const UNITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MembraneModel {
    /// Dielectric slabs.
    #[default]
    #[serde(rename = "full")]
    FullSlab,
    /// Thin scatterers with padding.
    #[serde(rename = "thin-padded")]
    ThinPadded,
}

impl fmt::Display for MembraneModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MembraneModel::FullSlab => "full",
            MembraneModel::ThinPadded => "thin-padded",
        })
    }
}

/// Transmissive-point family, `cos ν± = ∓ζ/√(1+ζ²)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
    Unclassified,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
            Branch::Unclassified => "unclassified",
        })
    }
}

/// `N` identical membranes separated by vacuum gaps.
///
/// `spacing` is the vacuum gap between facing membrane surfaces, not the
/// period: the period of the full-slab array is `spacing + l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembraneArray {
    pub membrane: SlabMembrane,
    pub count: usize,
    pub spacing: f64,
    pub model: MembraneModel,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmissiveWavelength {
    pub wavelength: f64,
    pub branch: Branch,
    pub zeta_at: f64,
    pub degenerate: bool,
}

/// Tuning of [`MembraneArray::find_transmissive_wavelengths`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootSearch {
    pub samples_per_decade: usize,
    pub bracket_tol: f64,
    pub degeneracy_eps: f64,
}

impl Default for RootSearch {
    fn default() -> Self {
        RootSearch {
            samples_per_decade: DEFAULT_SAMPLES_PER_DECADE,
            bracket_tol: DEFAULT_ROOT_TOL_NM,
            degeneracy_eps: DEFAULT_DEGENERACY_EPS,
        }
    }
}

fn wavenumber(lambda: f64) -> f64 {
    2.0 * PI / lambda
}

pub(crate) fn check_range(min: f64, max: f64, samples: usize) -> Result<()> {
    if !(min.is_finite() && max.is_finite() && min > 0.0 && min < max) || samples < 2 {
        return Err(Error::InvalidRange { min, max, samples });
    }
    Ok(())
}

impl MembraneArray {
    pub fn new(
        membrane: SlabMembrane,
        count: usize,
        spacing: f64,
        model: MembraneModel,
    ) -> Result<Self> {
        membrane.validate()?;
        if count < 1 {
            return Err(Error::invalid(
                "count",
                "an array needs at least one membrane",
            ));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid(
                "spacing",
                format!("gap must be > 0 nm, got {spacing}"),
            ));
        }
        Ok(MembraneArray {
            membrane,
            count,
            spacing,
            model,
        })
    }

    pub fn with_model(self, model: MembraneModel) -> Self {
        MembraneArray { model, ..self }
    }

    /// Physical extent of the full-slab array, `N l + (N-1) d`.
    pub fn extent(&self) -> f64 {
        self.count as f64 * self.membrane.l + (self.count - 1) as f64 * self.spacing
    }

    /// Appends the array's elements (membranes separated by `gaps`) to `stack`.
    /// `gaps` must hold `count - 1` entries.
    pub(crate) fn push_with_gaps(&self, stack: &mut StackLayout, k: f64, gaps: &[f64]) {
        debug_assert_eq!(gaps.len() + 1, self.count);
        let thin = self.membrane.thin(k);
        for j in 0..self.count {
            if j > 0 {
                stack.push(crate::tmm::Element::Gap {
                    length: gaps[j - 1],
                });
            }
            match self.model {
                MembraneModel::FullSlab => {
                    stack.push(self.membrane.element());
                }
                MembraneModel::ThinPadded => thin.push_padded(stack, k),
            }
        }
    }

    pub fn layout(&self, k: f64) -> StackLayout {
        let mut stack = StackLayout::new();
        let gaps = vec![self.spacing; self.count - 1];
        self.push_with_gaps(&mut stack, k, &gaps);
        stack
    }

    /// `M_m M_fs(d) M_m ⋯ M_m` with the membrane matrix of the chosen model.
    pub fn matrix(&self, k: f64) -> TransferMatrix {
        array_matrix(self, k)
    }

    pub fn transmittance(&self, lambda: f64) -> Result<f64> {
        self.matrix(wavenumber(lambda)).transmittance()
    }

    /// Padding-corrected spacing phase `ν_eff = k d + 2φ(k)`.
    pub fn effective_spacing_phase(&self, k: f64) -> f64 {
        k * self.spacing + 2.0 * self.membrane.padding_phase(k)
    }

    /// Two-membrane array polarizability `χ = 2ζ(cos ν - ζ sin ν)` at `ν_eff`.
    pub fn effective_chi(&self, k: f64) -> f64 {
        crate::optomech::chi(
            self.membrane.polarizability(k),
            self.effective_spacing_phase(k),
        )
    }

    /// `(|cos ν_eff + ζ/√(1+ζ²)|, |cos ν_eff - ζ/√(1+ζ²)|)`: distance from
    /// the plus and minus transmissive conditions.
    pub fn transmissive_residuals(&self, lambda: f64) -> (f64, f64) {
        let k = wavenumber(lambda);
        let zeta = self.membrane.polarizability(k);
        let c = self.effective_spacing_phase(k).cos();
        let s = zeta / zeta.hypot(1.0);
        ((c + s).abs(), (c - s).abs())
    }

    pub fn transmittance_spectrum(
        &self,
        lambda_min: f64,
        lambda_max: f64,
        samples: usize,
    ) -> Result<Vec<(f64, f64)>> {
        transmittance_spectrum(self, lambda_min, lambda_max, samples)
    }

    pub fn find_transmissive_wavelengths(
        &self,
        lambda_min: f64,
        lambda_max: f64,
        search: &RootSearch,
    ) -> Result<Vec<TransmissiveWavelength>> {
        find_transmissive_wavelengths(self, lambda_min, lambda_max, search)
    }

    /// Imaginary part of `m12`. The array is palindromic and lossless, so
    /// `m12` is purely imaginary and `T = 1/(1 + Im(m12)²)`; unlike `1 - T`
    /// this changes sign at every simple transmissive root.
    fn signed_reflection(&self, lambda: f64) -> f64 {
        self.matrix(wavenumber(lambda)).m12.im
    }

    fn classify(&self, lambda: f64, eps: f64) -> TransmissiveWavelength {
        let zeta = self.membrane.polarizability(wavenumber(lambda));
        let degenerate = zeta.abs() < eps;
        let branch = if self.count == 2 && !degenerate {
            let (plus, minus) = self.transmissive_residuals(lambda);
            if plus < minus {
                Branch::Plus
            } else {
                Branch::Minus
            }
        } else {
            Branch::Unclassified
        };
        TransmissiveWavelength {
            wavelength: lambda,
            branch,
            zeta_at: zeta,
            degenerate,
        }
    }
}

pub fn array_matrix(a: &MembraneArray, k: f64) -> TransferMatrix {
    let membrane = match a.model {
        MembraneModel::FullSlab => a.membrane.matrix(k),
        MembraneModel::ThinPadded => a.membrane.thin(k).matrix(k, true),
    };
    let gap = TransferMatrix::free_space(k, a.spacing);
    let mut m = membrane;
    for _ in 1..a.count {
        m = m * gap * membrane;
    }
    m
}

pub fn transmittance_spectrum(
    a: &MembraneArray,
    lambda_min: f64,
    lambda_max: f64,
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    check_range(lambda_min, lambda_max, samples)?;
    linspace(lambda_min, lambda_max, samples)
        .into_par_iter()
        .map(|lam| Ok((lam, a.transmittance(lam)?)))
        .collect()
}

pub fn find_transmissive_wavelengths(
    a: &MembraneArray,
    lambda_min: f64,
    lambda_max: f64,
    search: &RootSearch,
) -> Result<Vec<TransmissiveWavelength>> {
    check_range(lambda_min, lambda_max, 2)?;
    let grid = logspace_per_decade(lambda_min, lambda_max, search.samples_per_decade.max(2));
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&lam| a.signed_reflection(lam))
        .collect();

    let f = |lam: f64| a.signed_reflection(lam);
    let unity = |lam: f64| (1.0 - 1.0 / (1.0 + f(lam).powi(2))).abs() < UNITY_TOL;

    let brackets: Vec<(f64, f64)> = (0..grid.len() - 1)
        .filter(|&i| values[i] == 0.0 || (values[i] < 0.0) != (values[i + 1] < 0.0))
        .map(|i| (grid[i], grid[i + 1]))
        .collect();

    // touching zeros never change sign; refine grid minima of |Im m12| that
    // come close to unit transmission
    let touching: Vec<(f64, f64)> = (1..grid.len() - 1)
        .filter(|&i| {
            let v = values[i].abs();
            v <= values[i - 1].abs()
                && v <= values[i + 1].abs()
                && (values[i - 1] < 0.0) == (values[i + 1] < 0.0)
                && (values[i - 1] < 0.0) == (values[i] < 0.0)
                && v * v / (1.0 + v * v) < 1e-3
        })
        .map(|i| (grid[i - 1], grid[i + 1]))
        .collect();

    let mut roots: Vec<f64> = brackets
        .par_iter()
        .map(|&(lo, hi)| {
            if f(lo) == 0.0 {
                lo
            } else {
                bisect(f, lo, hi, search.bracket_tol, unity)
            }
        })
        .collect();

    for (lo, hi) in touching {
        let sub = linspace(lo, hi, 65);
        let vals: Vec<f64> = sub.iter().map(|&x| f(x)).collect();
        let mut found = false;
        for i in 0..sub.len() - 1 {
            if (vals[i] < 0.0) != (vals[i + 1] < 0.0) {
                roots.push(bisect(f, sub[i], sub[i + 1], search.bracket_tol, unity));
                found = true;
            }
        }
        if !found {
            let x = golden_min(|x| f(x).abs(), lo, hi, search.bracket_tol);
            if unity(x) {
                roots.push(x);
            }
        }
    }

    // a root on the window edge leaves only rounding noise in the last sample
    let n = grid.len();
    for (lo, hi, edge) in [
        (grid[0], grid[1], grid[0]),
        (grid[n - 2], grid[n - 1], grid[n - 1]),
    ] {
        if unity(edge) && !roots.iter().any(|&r| r >= lo && r <= hi) {
            let x = golden_min(|x| f(x).abs(), lo, hi, search.bracket_tol);
            roots.push(if unity(x) { x } else { edge });
        }
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() < 2.0 * search.bracket_tol);
    Ok(roots
        .into_iter()
        .map(|lam| a.classify(lam, search.degeneracy_eps))
        .collect())
}
