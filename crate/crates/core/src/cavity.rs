//! Fabry–Pérot cavity loaded with a membrane array: assembly, resonance
//! search in wavenumber and mode-parity classification.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{MembraneArray, MembraneModel};
use crate::error::{Error, Result};
use crate::search::{bisect, golden_max, linspace};
use crate::tmm::{Element, StackField, StackLayout, TransferMatrix, WaveState};

/// Default resonance bracket width, relative to the wavenumber.
pub const DEFAULT_RESONANCE_TOL: f64 = 1e-12;
/// Coarse samples of the resonance locator per free spectral range.
pub const SAMPLES_PER_FSR: usize = 40;
/// The cavity must be this many times longer than the array.
pub const MIN_LENGTH_RATIO: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of_mode(m: i64) -> Self {
        if m.rem_euclid(2) == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

/// Intensity reflectance of a thin mirror, `R = ζ²/(1+ζ²)`.
pub fn mirror_reflectance(zeta: f64) -> f64 {
    zeta * zeta / (1.0 + zeta * zeta)
}

/// Airy finesse `π√R/(1-R)` of two identical lossless mirrors.
pub fn finesse_from_reflectance(r: f64) -> f64 {
    PI * r.sqrt() / (1.0 - r)
}

/// Airy finesse of a mirror of polarizability `ζ`, `πζ√(1+ζ²)`.
pub fn finesse_from_mirror_zeta(zeta: f64) -> f64 {
    PI * zeta.abs() * zeta.hypot(1.0)
}

/// Mirror polarizability giving finesse `F`: the positive root of
/// `ζ²(1+ζ²) = (F/π)²`.
pub fn mirror_zeta_from_finesse(finesse: f64) -> Result<f64> {
    if !(finesse.is_finite() && finesse > 1.0) {
        return Err(Error::InvalidFinesse(finesse));
    }
    let q = finesse / PI;
    // (√(1+4q²) - 1)/2 without cancellation
    let zeta_sq = 2.0 * q * q / (1.0 + (1.0 + 4.0 * q * q).sqrt());
    Ok(zeta_sq.sqrt())
}

/// A symmetric cavity of length `length` between two thin mirrors, with an
/// optional membrane array whose center sits `center_offset` nm right of
/// the cavity center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityConfig {
    pub length: f64,
    pub mirror_zeta: f64,
    pub array: Option<MembraneArray>,
    pub center_offset: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResonanceRecord {
    pub k_res: f64,
    pub mode_number: i64,
    pub parity: Parity,
    pub peak_transmittance: f64,
    /// Ordinal within the scan window.
    pub index: usize,
}

impl ResonanceRecord {
    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.k_res
    }
}

impl CavityConfig {
    pub fn new(length: f64, mirror_zeta: f64, array: Option<MembraneArray>) -> Result<Self> {
        let c = CavityConfig {
            length,
            mirror_zeta,
            array,
            center_offset: 0.0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_finesse(length: f64, finesse: f64, array: Option<MembraneArray>) -> Result<Self> {
        Self::new(length, mirror_zeta_from_finesse(finesse)?, array)
    }

    pub fn with_offset(self, center_offset: f64) -> Result<Self> {
        let c = CavityConfig {
            center_offset,
            ..self
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::invalid(
                "length",
                format!("must be > 0 nm, got {}", self.length),
            ));
        }
        if !(self.mirror_zeta.is_finite() && self.mirror_zeta > 0.0) {
            return Err(Error::invalid(
                "mirror_zeta",
                format!("must be > 0, got {}", self.mirror_zeta),
            ));
        }
        if !self.center_offset.is_finite() {
            return Err(Error::invalid("center_offset", "must be finite"));
        }
        if let Some(a) = &self.array {
            let extent = a.extent();
            if self.length <= MIN_LENGTH_RATIO * extent {
                return Err(Error::Geometry(format!(
                    "cavity length {} nm must exceed {MIN_LENGTH_RATIO} x array extent {extent} nm",
                    self.length
                )));
            }
            let (lm, lp) = self.outer_gaps();
            if lm <= 0.0 || lp <= 0.0 {
                return Err(Error::Geometry(format!(
                    "center offset {} nm leaves outer gaps {lm} nm and {lp} nm",
                    self.center_offset
                )));
            }
        }
        Ok(())
    }

    pub fn finesse(&self) -> f64 {
        finesse_from_mirror_zeta(self.mirror_zeta)
    }

    /// Free spectral range in wavenumber, `π/L`.
    pub fn free_spectral_range(&self) -> f64 {
        PI / self.length
    }

    pub fn membrane_count(&self) -> usize {
        self.array.map_or(0, |a| a.count)
    }

    /// Outer gaps `(L-, L+)` at equilibrium. Without an array both are `L/2`.
    pub fn outer_gaps(&self) -> (f64, f64) {
        let extent = self.array.map_or(0.0, |a| a.extent());
        let half = 0.5 * (self.length - extent);
        (half + self.center_offset, half - self.center_offset)
    }

    /// Vacuum gaps `g0..gN` with membrane `j` displaced by `displacements[j]`.
    pub fn gaps(&self, displacements: &[f64]) -> Result<Vec<f64>> {
        let n = self.membrane_count();
        if displacements.len() != n {
            return Err(Error::invalid(
                "displacements",
                format!("expected {n} entries, got {}", displacements.len()),
            ));
        }
        let Some(a) = self.array else {
            return Ok(vec![self.length]);
        };
        if n >= 2 {
            if let Some(j) = displacements
                .iter()
                .position(|dx| dx.abs() >= 0.5 * a.spacing)
            {
                return Err(Error::Geometry(format!(
                    "displacement {} nm of membrane {j} reaches half the spacing {} nm",
                    displacements[j], a.spacing
                )));
            }
        }
        let (lm, lp) = self.outer_gaps();
        let mut gaps = Vec::with_capacity(n + 1);
        gaps.push(lm + displacements[0]);
        for j in 1..n {
            gaps.push(a.spacing - displacements[j - 1] + displacements[j]);
        }
        gaps.push(lp - displacements[n - 1]);
        if let Some(g) = gaps.iter().find(|g| !(**g > 0.0)) {
            return Err(Error::Geometry(format!(
                "displacements leave a gap of {g} nm"
            )));
        }
        Ok(gaps)
    }

    pub fn layout(&self, k: f64, displacements: &[f64]) -> Result<StackLayout> {
        let gaps = self.gaps(displacements)?;
        let mut stack = StackLayout::new();
        stack.push(Element::Mirror {
            zeta: self.mirror_zeta,
        });
        stack.push(Element::Gap { length: gaps[0] });
        if let Some(a) = &self.array {
            a.push_with_gaps(&mut stack, k, &gaps[1..gaps.len() - 1]);
            stack.push(Element::Gap {
                length: gaps[gaps.len() - 1],
            });
        }
        stack.push(Element::Mirror {
            zeta: self.mirror_zeta,
        });
        Ok(stack)
    }

    fn interior_with_gaps(&self, k: f64, gaps: &[f64]) -> TransferMatrix {
        let mut m = TransferMatrix::free_space(k, gaps[0]);
        if let Some(a) = &self.array {
            let membrane = match a.model {
                MembraneModel::FullSlab => a.membrane.matrix(k),
                MembraneModel::ThinPadded => a.membrane.thin(k).matrix(k, true),
            };
            for g in &gaps[1..] {
                m = m * membrane * TransferMatrix::free_space(k, *g);
            }
        }
        m
    }

    fn matrix_with_gaps(&self, k: f64, gaps: &[f64]) -> TransferMatrix {
        let mirror = TransferMatrix::scatterer(self.mirror_zeta);
        mirror * self.interior_with_gaps(k, gaps) * mirror
    }

    /// `M_c M_fs(L-) M_N M_fs(L+) M_c`, with the gaps adjusted for the
    /// membrane displacements.
    pub fn matrix(&self, k: f64, displacements: &[f64]) -> Result<TransferMatrix> {
        Ok(self.matrix_with_gaps(k, &self.gaps(displacements)?))
    }

    pub fn transmittance(&self, k: f64, displacements: &[f64]) -> Result<f64> {
        self.matrix(k, displacements)?.transmittance()
    }

    fn transmittance_with_gaps(&self, k: f64, gaps: &[f64]) -> f64 {
        self.matrix_with_gaps(k, gaps).m22.norm_sqr().recip()
    }

    /// Resonance locator `Im(a - b)` of the interior matrix `[[a, b], [b̄, ā]]`.
    /// It is the leading term of `m22` for reflective mirrors and changes sign
    /// once per resonance.
    fn locator(&self, k: f64, gaps: &[f64]) -> f64 {
        let m = self.interior_with_gaps(k, gaps);
        (m.m11 - m.m12).im
    }

    /// Transmission maxima in `[k_center - window/2, k_center + window/2]`
    /// for the displaced geometry, each refined to a bracket narrower than
    /// `tol_rel * k_center`. Returns `(k, T)` pairs in increasing `k`.
    pub fn locate_peaks(
        &self,
        k_center: f64,
        window: f64,
        displacements: &[f64],
        tol_rel: f64,
    ) -> Result<Vec<(f64, f64)>> {
        let lo = k_center - 0.5 * window;
        let hi = k_center + 0.5 * window;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::invalid(
                "window",
                format!("[{lo}, {hi}] rad/nm is not a positive wavenumber interval"),
            ));
        }
        let gaps = self.gaps(displacements)?;
        let fsr = self.free_spectral_range();
        let samples = ((window / fsr) * SAMPLES_PER_FSR as f64).ceil() as usize + 1;
        let grid = linspace(lo, hi, samples.max(3));
        let h: Vec<f64> = grid.iter().map(|&k| self.locator(k, &gaps)).collect();
        let zeros: Vec<f64> = (0..grid.len() - 1)
            .filter(|&i| h[i] == 0.0 || (h[i] < 0.0) != (h[i + 1] < 0.0))
            .map(|i| {
                bisect(
                    |k| self.locator(k, &gaps),
                    grid[i],
                    grid[i + 1],
                    1e-6 * fsr,
                    |_| true,
                )
            })
            .collect();
        let tol = tol_rel * k_center;
        Ok(zeros
            .iter()
            .enumerate()
            .map(|(j, &z)| {
                let mut w = 0.25 * fsr;
                if j > 0 {
                    w = w.min(0.5 * (z - zeros[j - 1]));
                }
                if j + 1 < zeros.len() {
                    w = w.min(0.5 * (zeros[j + 1] - z));
                }
                let k = golden_max(
                    |k| self.transmittance_with_gaps(k, &gaps),
                    z - w,
                    z + w,
                    tol,
                );
                (k, self.transmittance_with_gaps(k, &gaps))
            })
            .collect())
    }

    /// All resonances with `T > 0.5 max T` in the window, each with its mode
    /// number and parity.
    pub fn find_resonances(&self, k_center: f64, window: f64) -> Result<Vec<ResonanceRecord>> {
        self.find_resonances_with_tol(k_center, window, DEFAULT_RESONANCE_TOL)
    }

    pub fn find_resonances_with_tol(
        &self,
        k_center: f64,
        window: f64,
        tol_rel: f64,
    ) -> Result<Vec<ResonanceRecord>> {
        let fsr = self.free_spectral_range();
        if !(window >= 2.0 * fsr) {
            return Err(Error::invalid(
                "window",
                format!(
                    "{window} rad/nm spans fewer than two free spectral ranges ({fsr} rad/nm each)"
                ),
            ));
        }
        let zeros = vec![0.0; self.membrane_count()];
        let peaks = self.locate_peaks(k_center, window, &zeros, tol_rel)?;
        let t_max = peaks.iter().map(|p| p.1).fold(0.0, f64::max);
        peaks
            .into_iter()
            .filter(|p| p.1 > 0.5 * t_max)
            .enumerate()
            .map(|(index, (k_res, peak_transmittance))| {
                let (mode_number, parity) = self.classify_parity(k_res)?;
                Ok(ResonanceRecord {
                    k_res,
                    mode_number,
                    parity,
                    peak_transmittance,
                    index,
                })
            })
            .collect()
    }

    /// Full width at half maximum of the transmission peak at `k_res`.
    pub fn linewidth(&self, k_res: f64) -> Result<f64> {
        let gaps = self.gaps(&vec![0.0; self.membrane_count()])?;
        let t = |k: f64| self.transmittance_with_gaps(k, &gaps);
        let half = 0.5 * t(k_res);
        let f = |k: f64| t(k) - half;
        let reach = 0.5 * self.free_spectral_range();
        if f(k_res - reach) >= 0.0 || f(k_res + reach) >= 0.0 {
            return Err(Error::Unsupported(format!(
                "no half-maximum crossing within half a free spectral range of k = {k_res}"
            )));
        }
        let tol = 1e-9 * reach / self.finesse().max(1.0);
        let left = bisect(f, k_res - reach, k_res, tol, |_| true);
        let right = bisect(f, k_res, k_res + reach, tol, |_| true);
        Ok(right - left)
    }

    /// Mode number and parity of the resonance at `k_res`.
    ///
    /// The mode number is the accumulated standing-wave phase between the
    /// mirrors in units of π; odd modes are symmetric about the cavity
    /// center. For a centered array the field symmetry is checked against
    /// the mode number.
    pub fn classify_parity(&self, k_res: f64) -> Result<(i64, Parity)> {
        let layout = self.layout(k_res, &vec![0.0; self.membrane_count()])?;
        let field = layout.solve(k_res)?;
        let psi = standing_wave_phase(&field);
        let mode_number = (psi / PI).round() as i64;
        let index_parity = Parity::of_mode(mode_number);
        if self.center_offset == 0.0 {
            if let Some(symmetry_parity) = symmetry_parity(&field) {
                if symmetry_parity != index_parity {
                    return Err(Error::ParityConflict {
                        k_res,
                        index_parity,
                        symmetry_parity,
                    });
                }
            }
        }
        Ok((mode_number, index_parity))
    }

    /// Mean `|E|²` in each vacuum gap `g0..gN` of the full-slab cavity at
    /// wavenumber `k`, for unit incident amplitude.
    pub fn gap_mean_intensities(&self, k: f64) -> Result<Vec<f64>> {
        let full = CavityConfig {
            array: self.array.map(|a| a.with_model(MembraneModel::FullSlab)),
            ..*self
        };
        let layout = full.layout(k, &vec![0.0; self.membrane_count()])?;
        let field = layout.solve(k)?;
        Ok(layout
            .elements()
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match *e {
                Element::Gap { length } => {
                    Some(mean_intensity(field.state_in_element(i, 0.0), k, length))
                }
                _ => None,
            })
            .collect())
    }
}

/// Exact mean of `|f e^{iκu} + b e^{-iκu}|²` over `0 ≤ u ≤ D`.
fn mean_intensity(s: WaveState, kappa: f64, length: f64) -> f64 {
    let base = s.forward.norm_sqr() + s.backward.norm_sqr();
    if length <= 0.0 {
        return s.field().norm_sqr();
    }
    let x = 2.0 * kappa * length;
    let osc = (Complex64::from_polar(1.0, x) - 1.0) / Complex64::new(0.0, x);
    base + 2.0 * (s.forward * s.backward.conj() * osc).re
}

fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Prüfer phase accumulated by the (real, rotated) standing wave between the
/// first and last mirror of the stack.
fn standing_wave_phase(field: &StackField<'_>) -> f64 {
    let k = field.wavenumber();
    let elements = field.stack().elements();
    let segments: Vec<(usize, f64, f64)> = elements
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.local_wavenumber(k).map(|kappa| (i, kappa, e.extent())))
        .collect();
    let Some(&(first, _, _)) = segments.first() else {
        return 0.0;
    };
    let s0 = field.state_in_element(first, 0.0);
    let rot = Complex64::from_polar(1.0, -0.5 * (s0.forward.arg() + s0.backward.arg()));
    // angle of (y, -y'/κ) for y = Re(rot E)
    let angle = |s: WaveState| {
        let y = (rot * (s.forward + s.backward)).re;
        let z = (rot * (s.forward - s.backward)).im;
        z.atan2(y)
    };
    let mut total = 0.0;
    let mut prev_end: Option<f64> = None;
    for &(i, kappa, len) in &segments {
        let start = angle(field.state_in_element(i, 0.0));
        if let Some(end) = prev_end {
            total += wrap_pi(start - end);
        }
        total += kappa * len;
        prev_end = Some(start + kappa * len);
    }
    total
}

/// Parity from comparing the symmetric and antisymmetric parts of the field
/// about the stack center; `None` when the field is too weak to decide.
fn symmetry_parity(field: &StackField<'_>) -> Option<Parity> {
    let extent = *field.boundaries().last()?;
    let center = 0.5 * extent;
    const SAMPLES: usize = 1024;
    let (mut sym, mut anti) = (0.0, 0.0);
    for j in 0..SAMPLES {
        let u = center * (j as f64 + 0.371) / SAMPLES as f64;
        let a = field.sample(center + u).ok()?.amplitude;
        let b = field.sample(center - u).ok()?.amplitude;
        sym += (a + b).norm_sqr();
        anti += (a - b).norm_sqr();
    }
    if sym + anti <= f64::MIN_POSITIVE {
        return None;
    }
    Some(if sym > anti {
        Parity::Odd
    } else {
        Parity::Even
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::membrane::SlabMembrane;

    fn two_membranes() -> MembraneArray {
        MembraneArray::new(
            SlabMembrane::new(2.0, 100.0).unwrap(),
            2,
            9000.0,
            MembraneModel::FullSlab,
        )
        .unwrap()
    }

    #[test]
    fn finesse_round_trip() {
        for f in [1.5, 10.0, 3000.0, 1e6] {
            let z = mirror_zeta_from_finesse(f).unwrap();
            assert!((finesse_from_mirror_zeta(z) - f).abs() < 1e-9 * f);
            assert!((finesse_from_reflectance(mirror_reflectance(z)) - f).abs() < 1e-9 * f);
        }
        let z = mirror_zeta_from_finesse(3000.0).unwrap();
        assert!((z - 30.894).abs() < 1e-3, "{z}");
    }

    #[test]
    fn mirror_zeta_grows_with_finesse() {
        let zs: Vec<f64> = [2.0, 5.0, 50.0, 500.0, 5e3, 5e4]
            .iter()
            .map(|&f| mirror_zeta_from_finesse(f).unwrap())
            .collect();
        assert!(zs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn finesse_must_exceed_one() {
        for f in [1.0, 0.5, -3.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                mirror_zeta_from_finesse(f),
                Err(Error::InvalidFinesse(_))
            ));
        }
    }

    #[test]
    fn geometry_validation() {
        let a = two_membranes();
        assert!(CavityConfig::new(9e4, 30.0, Some(a)).is_err());
        let c = CavityConfig::new(5e6, 30.0, Some(a)).unwrap();
        assert!(c.with_offset(3e6).is_err());
        assert!(c.gaps(&[0.0]).is_err());
        assert!(matches!(c.gaps(&[4500.0, 0.0]), Err(Error::Geometry(_))));
        assert!(CavityConfig::new(-1.0, 30.0, None).is_err());
        assert!(CavityConfig::new(1e3, 0.0, None).is_err());
    }

    #[test]
    fn length_bookkeeping() {
        let a = two_membranes();
        let c = CavityConfig::new(5e6, 30.0, Some(a))
            .unwrap()
            .with_offset(1234.5)
            .unwrap();
        for d in [[0.0, 0.0], [3.0, -2.0], [-4000.0, 4400.0]] {
            let gaps = c.gaps(&d).unwrap();
            let total: f64 = gaps.iter().sum::<f64>() + 2.0 * a.membrane.l;
            assert!((total - c.length).abs() < 1e-12 * c.length);
            let layout = c.layout(0.01, &d).unwrap();
            assert!((layout.extent() - c.length).abs() < 1e-12 * c.length);
        }
    }

    #[test]
    fn matrix_matches_layout() {
        let c = CavityConfig::with_finesse(5e5, 100.0, Some(two_membranes())).unwrap();
        let k = 2.0 * PI / 612.3;
        let d = [0.5, -0.25];
        let a = c.matrix(k, &d).unwrap();
        let b = c.layout(k, &d).unwrap().matrix(k);
        assert!(a.max_abs_diff(&b) < 1e-9);
    }

    #[test]
    fn empty_cavity_resonances() {
        let c = CavityConfig::with_finesse(1e5, 3000.0, None).unwrap();
        let fsr = c.free_spectral_range();
        let k0 = 2.0 * PI / 500.0;
        let res = c.find_resonances(k0, 6.0 * fsr).unwrap();
        assert!(res.len() >= 5);
        let offset = (1.0 / c.mirror_zeta).atan() / c.length;
        for r in &res {
            let m = r.mode_number as f64;
            assert!(
                (r.k_res - (m * PI / c.length + offset)).abs() < 1e-9 * r.k_res,
                "{r:?}"
            );
            assert!((r.peak_transmittance - 1.0).abs() < 1e-9);
            assert_eq!(r.parity, Parity::of_mode(r.mode_number));
        }
        for w in res.windows(2) {
            assert!(((w[1].k_res - w[0].k_res) - fsr).abs() < 1e-9 * fsr);
            assert_eq!(w[1].mode_number, w[0].mode_number + 1);
            assert_ne!(w[1].parity, w[0].parity);
        }
    }

    #[test]
    fn empty_cavity_linewidth_matches_finesse() {
        let c = CavityConfig::with_finesse(1e5, 3000.0, None).unwrap();
        let fsr = c.free_spectral_range();
        let res = c.find_resonances(2.0 * PI / 700.0, 3.0 * fsr).unwrap();
        let fwhm = c.linewidth(res[0].k_res).unwrap();
        let expected = fsr / 3000.0;
        assert!(
            (fwhm / expected - 1.0).abs() < 0.01,
            "{fwhm:e} vs {expected:e}"
        );
    }

    #[test]
    fn window_must_cover_two_fsr() {
        let c = CavityConfig::with_finesse(1e5, 30.0, None).unwrap();
        assert!(c.find_resonances(0.01, c.free_spectral_range()).is_err());
    }

    #[test]
    fn resonance_robust_to_tolerance() {
        let c = CavityConfig::with_finesse(5e6, 3000.0, Some(two_membranes())).unwrap();
        let k0 = 2.0 * PI / 503.6;
        let w = 3.0 * c.free_spectral_range();
        let a = c.find_resonances_with_tol(k0, w, 1e-12).unwrap();
        let b = c.find_resonances_with_tol(k0, w, 1e-13).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.k_res - y.k_res).abs() < 1e-12 * k0);
        }
    }

    #[test]
    fn loaded_cavity_parity_agrees_with_symmetry() {
        let c = CavityConfig::with_finesse(5e6, 3000.0, Some(two_membranes())).unwrap();
        let k0 = 2.0 * PI / 503.6;
        let res = c
            .find_resonances(k0, 4.0 * c.free_spectral_range())
            .unwrap();
        assert!(res.len() >= 3);
        for w in res.windows(2) {
            assert_eq!(w[1].mode_number, w[0].mode_number + 1);
            assert_ne!(w[1].parity, w[0].parity);
        }
    }

    #[test]
    fn thin_model_cavity_has_the_same_resonances() {
        let full = CavityConfig::with_finesse(5e6, 3000.0, Some(two_membranes())).unwrap();
        let thin = CavityConfig {
            array: full.array.map(|a| a.with_model(MembraneModel::ThinPadded)),
            ..full
        };
        let k0 = 2.0 * PI / 620.0;
        let w = 3.0 * full.free_spectral_range();
        let a = full.find_resonances(k0, w).unwrap();
        let b = thin.find_resonances(k0, w).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.k_res - y.k_res).abs() < 1e-12 * k0);
            assert_eq!(x.parity, y.parity);
        }
    }

    #[test]
    fn mean_intensity_of_traveling_and_standing_waves() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert!((mean_intensity(WaveState::new(zero, one), 0.01, 1234.0) - 1.0).abs() < 1e-15);
        // |2 cos(κu)|² averages to 2 over whole periods
        let s = WaveState::new(one, one);
        assert!((mean_intensity(s, PI, 5.0) - 2.0).abs() < 1e-12);
    }
}
