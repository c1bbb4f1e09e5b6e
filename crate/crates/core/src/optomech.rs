//! Linear optomechanical couplings: finite-difference extraction from the
//! full cavity, two-membrane analytics and their comparison.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::array::{Branch, RootSearch, TransmissiveWavelength};
use crate::cavity::{CavityConfig, Parity, ResonanceRecord};
use crate::error::{Error, Result};

/// Speed of light in nm/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e17;
/// Default finite-difference step as a fraction of the wavelength.
pub const DEFAULT_STEP_FRACTION: f64 = 1e-6;
/// Bracket width of the displaced-resonance search, relative to `k`.
pub const TRACKING_TOL: f64 = 1e-15;
/// Required ratio of resonance shift to tracking resolution.
pub const MIN_SHIFT_RATIO: f64 = 1e3;
/// Allowed relative change between steps `h` and `h/2`.
pub const RICHARDSON_TOL: f64 = 1e-3;
/// Largest finite-difference step as a fraction of the wavelength.
pub const MAX_STEP_FRACTION: f64 = 1e-2;
/// Precondition on `|χ|` for the analytic frequency pull.
pub const CHI_TOL: f64 = 1e-9;
/// Pole guard on `1 ± 4(d/L)ζ√(1+ζ²)`.
pub const POLE_TOL: f64 = 1e-12;

/// Per-membrane couplings at one cavity resonance.
///
/// All `g` values are frequency shifts per nm of displacement; `normalized`
/// divides by `g_reference = 2ω/L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingResult {
    pub wavelength: f64,
    pub k_res: f64,
    pub g_per_membrane: Vec<f64>,
    pub g_collective: f64,
    pub g_reference: f64,
    pub normalized: Vec<f64>,
    pub branch: Branch,
    pub parity: Parity,
    /// Finite-difference step actually used, nm.
    pub step: f64,
}

impl CouplingResult {
    /// Signed breathing-mode coupling `(g1 - g2)/√2` in units of `g`.
    pub fn breathing_normalized(&self) -> Option<f64> {
        match self.normalized.as_slice() {
            [a, b] => Some((a - b) / SQRT_2),
            _ => None,
        }
    }
}

/// Analytic two-membrane couplings at a transmissive point, in units of `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalyticCoupling {
    pub zeta: f64,
    pub nu: f64,
    pub d_over_l: f64,
    pub g_plus: f64,
    pub g_minus: f64,
}

impl AnalyticCoupling {
    pub fn new(zeta: f64, d_over_l: f64, branch: Branch) -> Result<Self> {
        let (g_plus, g_minus) = analytic_g_pm(zeta, d_over_l)?;
        Ok(AnalyticCoupling {
            zeta,
            nu: transmissive_nu(zeta, branch),
            d_over_l,
            g_plus,
            g_minus,
        })
    }

    pub fn on_branch(&self, branch: Branch) -> Option<f64> {
        match branch {
            Branch::Plus => Some(self.g_plus),
            Branch::Minus => Some(self.g_minus),
            Branch::Unclassified => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingOptions {
    pub step_fraction: f64,
    pub tracking_tol: f64,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        CouplingOptions {
            step_fraction: DEFAULT_STEP_FRACTION,
            tracking_tol: TRACKING_TOL,
        }
    }
}

/// Two-membrane polarizability `χ = 2ζ(cos ν - ζ sin ν)`.
pub fn chi(zeta: f64, nu: f64) -> f64 {
    2.0 * zeta * (nu.cos() - zeta * nu.sin())
}

/// `∂χ/∂ν = -2ζ(sin ν + ζ cos ν)`.
pub fn chi_derivative(zeta: f64, nu: f64) -> f64 {
    -2.0 * zeta * (nu.sin() + zeta * nu.cos())
}

/// Spacing phase in `[0, 2π)` of the given transmissive family:
/// `cos ν± = ∓ζ/√(1+ζ²)`, `sin ν± = ∓1/√(1+ζ²)`.
pub fn transmissive_nu(zeta: f64, branch: Branch) -> f64 {
    let s = zeta.hypot(1.0);
    let sign = match branch {
        Branch::Minus => 1.0,
        _ => -1.0,
    };
    (sign / s).atan2(sign * zeta / s).rem_euclid(2.0 * PI)
}

/// `g± / g = √2 ζ(±√(1+ζ²) + ζ) / (1 ± 4(d/L)ζ√(1+ζ²))`.
pub fn analytic_g_pm(zeta: f64, d_over_l: f64) -> Result<(f64, f64)> {
    let s = zeta.hypot(1.0);
    let x = 4.0 * d_over_l * zeta * s;
    for (den, sign) in [(1.0 + x, '+'), (1.0 - x, '-')] {
        if den.abs() < POLE_TOL {
            return Err(Error::Pole {
                zeta,
                d_over_l,
                sign,
            });
        }
    }
    // ζ(ζ - s) = -ζ/(s + ζ) avoids cancellation for large ζ > 0
    let minus_num = if zeta >= 0.0 {
        -zeta / (s + zeta)
    } else {
        zeta * (zeta - s)
    };
    let plus_num = if zeta >= 0.0 {
        zeta * (s + zeta)
    } else {
        zeta / (s - zeta)
    };
    Ok((
        SQRT_2 * plus_num / (1.0 + x),
        SQRT_2 * minus_num / (1.0 - x),
    ))
}

/// Large-`|ζ|` form `g+ / g ≈ 2√2 ζ² / (1 + 4(d/L)ζ²)`.
pub fn g_plus_limit(zeta: f64, d_over_l: f64) -> f64 {
    2.0 * SQRT_2 * zeta * zeta / (1.0 + 4.0 * d_over_l * zeta * zeta)
}

/// Large-`|ζ|` form `g- / g ≈ -(1/√2) / (1 - 4(d/L)ζ²)`.
pub fn g_minus_limit(zeta: f64, d_over_l: f64) -> f64 {
    -1.0 / (SQRT_2 * (1.0 - 4.0 * d_over_l * zeta * zeta))
}

/// `∂k/∂δx1 = -Im{β - e^{iν}α} / (L + 2d ∂χ/∂ν)` with `α = 2ikζ²e^{-iν}`
/// and `β = -2kζ(1 - iζ)e^{-iν}`, valid where `χ(ν) = 0`.
pub fn analytic_frequency_pull(zeta: f64, nu: f64, d: f64, length: f64, k: f64) -> Result<f64> {
    let x = chi(zeta, nu);
    if !(x.abs() < CHI_TOL) {
        return Err(Error::NotTransmissive(x));
    }
    let i = Complex64::i();
    let e = Complex64::from_polar(1.0, -nu);
    let alpha = 2.0 * i * k * zeta * zeta * e;
    let beta = -2.0 * k * zeta * (1.0 - i * zeta) * e;
    let num = beta - Complex64::from_polar(1.0, nu) * alpha;
    Ok(-num.im / (length + 2.0 * d * chi_derivative(zeta, nu)))
}

/// Closed form of [`analytic_frequency_pull`] on a transmissive branch,
/// `2kζ(±√(1+ζ²) + ζ) / (L[1 ± 4(d/L)ζ√(1+ζ²)])`.
pub fn closed_form_pull(zeta: f64, d: f64, length: f64, k: f64, branch: Branch) -> Result<f64> {
    let (gp, gm) = analytic_g_pm(zeta, d / length)?;
    let g = match branch {
        Branch::Plus => gp,
        Branch::Minus => gm,
        Branch::Unclassified => return Err(Error::invalid("branch", "needs plus or minus")),
    };
    Ok(pull_from_normalized(g, k, length))
}

/// Frequency pull `∂k/∂δx1` from a normalized breathing coupling:
/// `δω = g±(δx1 - δx2)/√2` and `g = 2ck/L`.
pub fn pull_from_normalized(g_over_ref: f64, k: f64, length: f64) -> f64 {
    g_over_ref * 2.0 * k / (SQRT_2 * length)
}

/// Coupling branch of a numeric breathing coupling: `g+` carries the sign
/// of `ζ`, `g-` the opposite one.
pub fn pair_branch(breathing: f64, zeta: f64) -> Branch {
    if (breathing >= 0.0) == (zeta >= 0.0) {
        Branch::Plus
    } else {
        Branch::Minus
    }
}

fn track(
    c: &CavityConfig,
    k_res: f64,
    displacements: &[f64],
    membrane: usize,
    tol: f64,
) -> Result<f64> {
    let fsr = c.free_spectral_range();
    let peaks = c.locate_peaks(k_res, fsr, displacements, tol)?;
    let nearest = peaks
        .iter()
        .map(|p| p.0)
        .min_by(|a, b| (a - k_res).abs().total_cmp(&(b - k_res).abs()));
    match nearest {
        Some(k) if (k - k_res).abs() <= 0.25 * fsr => Ok(k),
        _ => Err(Error::TrackingLost { k_res, membrane }),
    }
}

/// Central difference `[k(+h) - k(-h)] / 2h` for membrane `j`.
fn central_difference(
    c: &CavityConfig,
    k_res: f64,
    j: usize,
    h: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut disp = vec![0.0; c.membrane_count()];
    disp[j] = h;
    let kp = track(c, k_res, &disp, j, tol)?;
    disp[j] = -h;
    let km = track(c, k_res, &disp, j, tol)?;
    Ok(((kp - km) / (2.0 * h), 0.5 * (kp - km).abs()))
}

/// Per-membrane couplings at resonance `r` by displacing each membrane in
/// turn and tracking the resonance.
///
/// The step starts at `step_fraction * λ` and grows tenfold until the shift
/// exceeds `MIN_SHIFT_RATIO` times the tracking resolution. Each derivative
/// is repeated at half the step and must agree within `RICHARDSON_TOL`.
pub fn extract_couplings(
    c: &CavityConfig,
    r: &ResonanceRecord,
    options: &CouplingOptions,
) -> Result<CouplingResult> {
    let n = c.membrane_count();
    if n == 0 {
        return Err(Error::Unsupported(
            "couplings need at least one membrane".into(),
        ));
    }
    if !(options.step_fraction > 0.0 && options.step_fraction < MAX_STEP_FRACTION) {
        return Err(Error::invalid(
            "fd_step_fraction",
            format!(
                "must lie in (0, {MAX_STEP_FRACTION}), got {}",
                options.step_fraction
            ),
        ));
    }
    let k = r.k_res;
    let lambda = 2.0 * PI / k;
    let resolution = options.tracking_tol * k;
    let max_step = MAX_STEP_FRACTION * lambda;

    let mut step = options.step_fraction * lambda;
    let mut derivatives = Vec::with_capacity(n);
    let mut j = 0;
    while j < n {
        let (d, shift) = central_difference(c, k, j, step, options.tracking_tol)?;
        if shift < MIN_SHIFT_RATIO * resolution {
            if step * 10.0 > max_step {
                return Err(Error::StepDegenerate {
                    shift,
                    resolution,
                    step,
                });
            }
            // restart so every membrane shares one step
            step *= 10.0;
            derivatives.clear();
            j = 0;
            continue;
        }
        derivatives.push(d);
        j += 1;
    }
    let scale = derivatives.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    for (j, d) in derivatives.iter().enumerate() {
        let (half, _) = central_difference(c, k, j, 0.5 * step, options.tracking_tol)?;
        let change = (half - d).abs() / scale;
        if !(change < RICHARDSON_TOL) {
            return Err(Error::NotConverged {
                membrane: j,
                relative_change: change,
            });
        }
    }

    let g_reference = 2.0 * SPEED_OF_LIGHT * k / c.length;
    let g: Vec<f64> = derivatives.iter().map(|d| SPEED_OF_LIGHT * d).collect();
    let normalized: Vec<f64> = g.iter().map(|x| x / g_reference).collect();
    let branch = match (c.array, normalized.as_slice()) {
        (Some(a), [g1, g2]) => pair_branch((g1 - g2) / SQRT_2, a.membrane.polarizability(k)),
        _ => Branch::Unclassified,
    };
    Ok(CouplingResult {
        wavelength: lambda,
        k_res: k,
        g_collective: g.iter().map(|x| x * x).sum::<f64>().sqrt(),
        g_per_membrane: g,
        g_reference,
        normalized,
        branch,
        parity: r.parity,
        step,
    })
}

/// The two resonances closest to `k0`, in increasing `k`.
pub fn resonance_pair(c: &CavityConfig, k0: f64) -> Result<Vec<ResonanceRecord>> {
    let mut res = c.find_resonances(k0, 3.0 * c.free_spectral_range())?;
    res.sort_by(|a, b| (a.k_res - k0).abs().total_cmp(&(b.k_res - k0).abs()));
    res.truncate(2);
    res.sort_by(|a, b| a.k_res.total_cmp(&b.k_res));
    Ok(res)
}

/// One numeric/analytic comparison point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub wavelength: f64,
    pub zeta: f64,
    /// Transmissive family of the wavelength itself.
    pub root_branch: Branch,
    /// Coupling branch realized by this resonance.
    pub branch: Branch,
    pub parity: Parity,
    pub g_numeric: f64,
    pub g_analytic: f64,
    pub rel_dev: f64,
    /// Mean intensity between the membranes over that of the outer gaps.
    pub center_enhancement: f64,
    pub couplings: CouplingResult,
}

/// A resonance at a transmissive wavelength with `|ζ|` below the
/// degeneracy threshold. `g_numeric` is `None` when the shift is below
/// numerical resolution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerateRow {
    pub wavelength: f64,
    pub zeta: f64,
    pub parity: Parity,
    pub g_numeric: Option<f64>,
    pub couplings: Option<CouplingResult>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub degenerate: Vec<DegenerateRow>,
}

impl Comparison {
    pub fn max_rel_dev(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_dev).fold(0.0, f64::max)
    }
}

fn enhancement(c: &CavityConfig, k: f64) -> Result<f64> {
    let m = c.gap_mean_intensities(k)?;
    let outer = 0.5 * (m[0] + m[m.len() - 1]);
    let inner = m[1..m.len() - 1].iter().sum::<f64>() / (m.len() - 2) as f64;
    Ok(inner / outer)
}

enum Point {
    Rows(Vec<ComparisonRow>),
    Degenerate(Vec<DegenerateRow>),
}

fn compare_at(
    c: &CavityConfig,
    root: &TransmissiveWavelength,
    options: &CouplingOptions,
) -> Result<Point> {
    let a = c.array.expect("checked by caller");
    let k0 = 2.0 * PI / root.wavelength;
    let pair = resonance_pair(c, k0)?;
    if root.degenerate {
        let rows = pair
            .iter()
            .map(|r| match extract_couplings(c, r, options) {
                Ok(cr) => Ok(DegenerateRow {
                    wavelength: root.wavelength,
                    zeta: root.zeta_at,
                    parity: r.parity,
                    g_numeric: cr.breathing_normalized(),
                    couplings: Some(cr),
                }),
                Err(Error::StepDegenerate { .. }) => Ok(DegenerateRow {
                    wavelength: root.wavelength,
                    zeta: root.zeta_at,
                    parity: r.parity,
                    g_numeric: None,
                    couplings: None,
                }),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        return Ok(Point::Degenerate(rows));
    }
    let analytic = analytic_g_pm(root.zeta_at, a.spacing / c.length)?;
    let mut rows = pair
        .iter()
        .map(|r| {
            let cr = extract_couplings(c, r, options)?;
            let g_numeric = cr.breathing_normalized().expect("two membranes");
            let branch = pair_branch(g_numeric, root.zeta_at);
            let g_analytic = if branch == Branch::Plus {
                analytic.0
            } else {
                analytic.1
            };
            Ok(ComparisonRow {
                wavelength: root.wavelength,
                zeta: root.zeta_at,
                root_branch: root.branch,
                branch,
                parity: r.parity,
                g_numeric,
                g_analytic,
                rel_dev: (g_numeric - g_analytic).abs() / g_analytic.abs(),
                center_enhancement: enhancement(c, r.k_res)?,
                couplings: cr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.branch != Branch::Plus);
    Ok(Point::Rows(rows))
}

/// Numeric couplings of both resonances nearest every transmissive
/// wavelength in the window, each paired with its analytic branch.
/// Rows are ordered by wavelength, plus branch first.
pub fn compare_numeric_analytic(
    c: &CavityConfig,
    lambda_min: f64,
    lambda_max: f64,
    search: &RootSearch,
    options: &CouplingOptions,
) -> Result<Comparison> {
    let a = match c.array {
        Some(a) if a.count == 2 => a,
        _ => {
            return Err(Error::Unsupported(
                "the analytic comparison is defined for two-membrane arrays only".into(),
            ))
        }
    };
    let roots = a.find_transmissive_wavelengths(lambda_min, lambda_max, search)?;
    let points = roots
        .par_iter()
        .map(|root| compare_at(c, root, options))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Comparison::default();
    for p in points {
        match p {
            Point::Rows(r) => out.rows.extend(r),
            Point::Degenerate(d) => out.degenerate.extend(d),
        }
    }
    Ok(out)
}
