//! Complex 2×2 transfer-matrix algebra and field propagation through a
//! one-dimensional stack.
//!
//! A transfer matrix maps the wave amplitudes on the right of an element to
//! those on its left:
//!
//! ```text
//! (backward_left, forward_left)ᵀ = M · (backward_right, forward_right)ᵀ
//! ```
//!
//! Amplitudes are electric-field amplitudes, so the total field
//! `backward + forward` is continuous across every interface. Lengths are in
//! nanometres and wavenumbers in rad/nm throughout.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::membrane::FresnelPair;

/// Guard against `m22` underflow. Not a physics tolerance.
pub const DEGENERATE_M22: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(1.0, 0.0),
    };

    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        TransferMatrix { m11, m12, m21, m22 }
    }

    /// Free propagation over `d` nm at vacuum wavenumber `k`.
    pub fn free_space(k: f64, d: f64) -> Self {
        Self::phase(k * d)
    }

    /// `diag(e^{iθ}, e^{-iθ})`: propagation accumulating phase `θ`.
    pub fn phase(theta: f64) -> Self {
        let e = Complex64::from_polar(1.0, theta);
        TransferMatrix::new(
            e,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            e.conj(),
        )
    }

    /// Infinitely thin lossless scatterer of polarizability `zeta`.
    pub fn scatterer(zeta: f64) -> Self {
        let iz = Complex64::new(0.0, zeta);
        TransferMatrix::new(1.0 + iz, iz, -iz, 1.0 - iz)
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        TransferMatrix::new(
            self.m22 / det,
            -self.m12 / det,
            -self.m21 / det,
            self.m11 / det,
        )
    }

    pub fn apply(&self, state: WaveState) -> WaveState {
        WaveState {
            backward: self.m11 * state.backward + self.m12 * state.forward,
            forward: self.m21 * state.backward + self.m22 * state.forward,
        }
    }

    /// Largest modulus of the element-wise difference.
    pub fn max_abs_diff(&self, other: &TransferMatrix) -> f64 {
        [
            self.m11 - other.m11,
            self.m12 - other.m12,
            self.m21 - other.m21,
            self.m22 - other.m22,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }

    fn checked_m22(&self) -> Result<Complex64> {
        let norm = self.m22.norm();
        if norm.is_nan() || norm < DEGENERATE_M22 {
            return Err(Error::DegenerateMatrix(norm));
        }
        Ok(self.m22)
    }

    /// `(r, t)` for a wave incident from the left: `t = 1/m22`, `r = m12/m22`.
    pub fn reflectivity_transmissivity(&self) -> Result<(Complex64, Complex64)> {
        let m22 = self.checked_m22()?;
        Ok((self.m12 / m22, m22.inv()))
    }

    /// Reflection coefficient for a wave incident from the right, `-m21/m22`.
    ///
    /// Sign conventions for this coefficient vary between references.
    pub fn reflectivity_from_right(&self) -> Result<Complex64> {
        let m22 = self.checked_m22()?;
        Ok(-self.m21 / m22)
    }

    /// Intensity transmittance `1/|m22|²`.
    pub fn transmittance(&self) -> Result<f64> {
        let m22 = self.checked_m22()?;
        Ok(1.0 / m22.norm_sqr())
    }
}

impl Default for TransferMatrix {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, b: TransferMatrix) -> TransferMatrix {
        let a = self;
        TransferMatrix::new(
            a.m11 * b.m11 + a.m12 * b.m21,
            a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21,
            a.m21 * b.m12 + a.m22 * b.m22,
        )
    }
}

pub fn free_space(k: f64, d: f64) -> TransferMatrix {
    TransferMatrix::free_space(k, d)
}

pub fn multiply(a: &TransferMatrix, b: &TransferMatrix) -> TransferMatrix {
    *a * *b
}

pub fn reflectivity_transmissivity(m: &TransferMatrix) -> Result<(Complex64, Complex64)> {
    m.reflectivity_transmissivity()
}

/// Backward and forward amplitudes at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveState {
    pub backward: Complex64,
    pub forward: Complex64,
}

impl WaveState {
    pub fn new(backward: Complex64, forward: Complex64) -> Self {
        WaveState { backward, forward }
    }

    /// Total field, the superposition of both waves.
    pub fn field(&self) -> Complex64 {
        self.backward + self.forward
    }

    fn scale(self, s: Complex64) -> Self {
        WaveState::new(self.backward * s, self.forward * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    pub position: f64,
    pub amplitude: Complex64,
    pub intensity: f64,
}

impl FieldSample {
    fn new(position: f64, amplitude: Complex64) -> Self {
        FieldSample {
            position,
            amplitude,
            intensity: amplitude.re * amplitude.re + amplitude.im * amplitude.im,
        }
    }
}

/// One element of a one-dimensional stack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    /// Vacuum gap.
    Gap { length: f64 },
    /// Dielectric slab of real index `index` and physical `thickness`.
    Slab { index: f64, thickness: f64 },
    /// Zero-thickness scatterer of polarizability `zeta`.
    Scatterer { zeta: f64 },
    /// End mirror, modelled as a thin scatterer.
    Mirror { zeta: f64 },
}

impl Element {
    pub fn extent(&self) -> f64 {
        match *self {
            Element::Gap { length } => length,
            Element::Slab { thickness, .. } => thickness,
            Element::Scatterer { .. } | Element::Mirror { .. } => 0.0,
        }
    }

    /// Local wavenumber inside the element, if it has an interior.
    pub fn local_wavenumber(&self, k: f64) -> Option<f64> {
        match *self {
            Element::Gap { .. } => Some(k),
            Element::Slab { index, .. } => Some(index * k),
            _ => None,
        }
    }

    pub fn matrix(&self, k: f64) -> TransferMatrix {
        match *self {
            Element::Gap { length } => TransferMatrix::free_space(k, length),
            Element::Slab { index, thickness } => {
                let f = FresnelPair::new(index);
                f.entry_matrix() * TransferMatrix::phase(k * index * thickness) * f.exit_matrix()
            }
            Element::Scatterer { zeta } | Element::Mirror { zeta } => {
                TransferMatrix::scatterer(zeta)
            }
        }
    }

    /// Wave state at offset `u` inside the element, given the state just to
    /// its right. Amplitudes inside a slab refer to the dielectric.
    fn interior_state(&self, k: f64, u: f64, right: WaveState) -> WaveState {
        match *self {
            Element::Gap { length } => TransferMatrix::free_space(k, length - u).apply(right),
            Element::Slab { index, thickness } => {
                let inner = FresnelPair::new(index).exit_matrix().apply(right);
                TransferMatrix::phase(k * index * (thickness - u)).apply(inner)
            }
            _ => right,
        }
    }
}

/// Ordered sequence of elements starting at position 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StackLayout {
    elements: Vec<Element>,
}

impl StackLayout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_elements(elements: Vec<Element>) -> Self {
        StackLayout { elements }
    }

    pub fn push(&mut self, element: Element) -> &mut Self {
        self.elements.push(element);
        self
    }

    pub fn gap(mut self, length: f64) -> Self {
        self.elements.push(Element::Gap { length });
        self
    }

    pub fn slab(mut self, index: f64, thickness: f64) -> Self {
        self.elements.push(Element::Slab { index, thickness });
        self
    }

    pub fn scatterer(mut self, zeta: f64) -> Self {
        self.elements.push(Element::Scatterer { zeta });
        self
    }

    pub fn mirror(mut self, zeta: f64) -> Self {
        self.elements.push(Element::Mirror { zeta });
        self
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn extent(&self) -> f64 {
        self.elements.iter().map(Element::extent).sum()
    }

    /// Left-edge position of every element, plus the total extent.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.elements.len() + 1);
        let mut x = 0.0;
        out.push(x);
        for e in &self.elements {
            x += e.extent();
            out.push(x);
        }
        out
    }

    /// Product of element matrices in stack order.
    pub fn matrix(&self, k: f64) -> TransferMatrix {
        self.elements
            .iter()
            .fold(TransferMatrix::IDENTITY, |acc, e| acc * e.matrix(k))
    }

    /// Solve for the field driven by a unit forward wave from the left with
    /// no input from the right.
    pub fn solve(&self, k: f64) -> Result<StackField<'_>> {
        let total = self.matrix(k);
        let (_, t) = total.reflectivity_transmissivity()?;
        let n = self.elements.len();
        let mut states = vec![WaveState::new(Complex64::new(0.0, 0.0), t); n + 1];
        for i in (0..n).rev() {
            states[i] = self.elements[i].matrix(k).apply(states[i + 1]);
        }
        // pin the incident amplitude to exactly 1
        let norm = states[0].forward.inv();
        for s in &mut states {
            *s = s.scale(norm);
        }
        Ok(StackField {
            stack: self,
            k,
            starts: self.boundaries(),
            states,
        })
    }

    pub fn field_profile(&self, k: f64, positions: &[f64]) -> Result<Vec<FieldSample>> {
        let field = self.solve(k)?;
        positions.iter().map(|&x| field.sample(x)).collect()
    }
}

/// Solved field inside a stack.
#[derive(Clone, Debug)]
pub struct StackField<'a> {
    stack: &'a StackLayout,
    k: f64,
    starts: Vec<f64>,
    /// `states[i]` sits at the left edge of element `i`; the last entry is
    /// the state on the far right.
    states: Vec<WaveState>,
}

impl<'a> StackField<'a> {
    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    pub fn stack(&self) -> &StackLayout {
        self.stack
    }

    /// State at the left edge of element `i` (or the right end for `i == len`).
    pub fn boundary_state(&self, i: usize) -> WaveState {
        self.states[i]
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.starts
    }

    pub fn reflectivity(&self) -> Complex64 {
        self.states[0].backward
    }

    pub fn transmissivity(&self) -> Complex64 {
        self.states[self.states.len() - 1].forward
    }

    /// Field value inside element `i` at offset `u` from its left edge.
    pub fn field_in_element(&self, i: usize, u: f64) -> Complex64 {
        self.stack.elements[i]
            .interior_state(self.k, u, self.states[i + 1])
            .field()
    }

    /// Local wave state inside element `i` at offset `u`, in the element's
    /// own medium.
    pub fn state_in_element(&self, i: usize, u: f64) -> WaveState {
        self.stack.elements[i].interior_state(self.k, u, self.states[i + 1])
    }

    pub fn sample(&self, x: f64) -> Result<FieldSample> {
        let extent = self.starts[self.starts.len() - 1];
        if !(0.0..=extent).contains(&x) {
            return Err(Error::PositionOutOfRange {
                position: x,
                extent,
            });
        }
        let n = self.stack.elements.len();
        if n == 0 {
            return Ok(FieldSample::new(x, self.states[0].field()));
        }
        // last element whose left edge is at or before x
        let i = match self.starts[..n].partition_point(|&s| s <= x) {
            0 => 0,
            p => p - 1,
        };
        let u = (x - self.starts[i]).clamp(0.0, self.stack.elements[i].extent());
        Ok(FieldSample::new(x, self.field_in_element(i, u)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn free_space_zero_and_full_wave_are_identity() {
        let lam = 633.0;
        let k = 2.0 * PI / lam;
        assert!(free_space(k, 0.0).max_abs_diff(&TransferMatrix::IDENTITY) == 0.0);
        assert!(free_space(k, lam).max_abs_diff(&TransferMatrix::IDENTITY) < 1e-14);
    }

    #[test]
    fn free_space_quarter_wave() {
        let lam = 500.0;
        let m = free_space(2.0 * PI / lam, lam / 4.0);
        assert!(close(m.m11, I, 1e-15));
        assert!(close(m.m22, -I, 1e-15));
        assert_eq!(m.m12, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn multiply_identity_and_phase_additivity() {
        let m = TransferMatrix::scatterer(0.3) * free_space(0.01, 17.0);
        assert_eq!(multiply(&TransferMatrix::IDENTITY, &m), m);
        let k = 0.0123;
        let sum = multiply(&free_space(k, 12.5), &free_space(k, 40.25));
        assert!(sum.max_abs_diff(&free_space(k, 52.75)) < 1e-14);
    }

    #[test]
    fn empty_stack_transmits_fully() {
        let (r, t) = TransferMatrix::IDENTITY
            .reflectivity_transmissivity()
            .unwrap();
        assert_eq!(r, Complex64::new(0.0, 0.0));
        assert_eq!(t, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn thin_scatterer_transmittance() {
        let (r, t) = TransferMatrix::scatterer(0.75)
            .reflectivity_transmissivity()
            .unwrap();
        assert!((t.norm_sqr() - 0.64).abs() < 1e-15);
        assert!((r.norm_sqr() - 0.36).abs() < 1e-15);
    }

    #[test]
    fn degenerate_m22_is_an_error() {
        let zero = Complex64::new(0.0, 0.0);
        let m = TransferMatrix::new(zero, zero, zero, zero);
        assert!(matches!(
            m.reflectivity_transmissivity(),
            Err(Error::DegenerateMatrix(_))
        ));
        assert!(matches!(m.transmittance(), Err(Error::DegenerateMatrix(_))));
    }

    #[test]
    fn mirrored_reflection_of_asymmetric_stack() {
        let k = 2.0 * PI / 700.0;
        let stack = StackLayout::new().scatterer(0.4).gap(55.0).scatterer(-1.1);
        let m = stack.matrix(k);
        let reversed = StackLayout::new().scatterer(-1.1).gap(55.0).scatterer(0.4);
        let (r_rev, _) = reversed.matrix(k).reflectivity_transmissivity().unwrap();
        // reflection from the right of a stack equals reflection from the
        // left of the reversed stack up to the sign convention
        let r_right = m.reflectivity_from_right().unwrap();
        assert!((r_right.norm() - r_rev.norm()).abs() < 1e-12);
    }

    #[test]
    fn vacuum_field_is_a_unit_traveling_wave() {
        let k = 2.0 * PI / 800.0;
        let stack = StackLayout::new().gap(3000.0);
        let xs: Vec<f64> = (0..=30).map(|i| i as f64 * 100.0).collect();
        for s in stack.field_profile(k, &xs).unwrap() {
            assert!((s.intensity - 1.0).abs() < 1e-13);
            assert!(close(
                s.amplitude,
                Complex64::from_polar(1.0, k * s.position),
                1e-12
            ));
        }
    }

    #[test]
    fn field_profile_rejects_positions_outside_stack() {
        let stack = StackLayout::new().gap(10.0);
        let err = stack.field_profile(0.01, &[11.0]).unwrap_err();
        assert!(matches!(err, Error::PositionOutOfRange { .. }));
        assert!(stack.field_profile(0.01, &[-1e-9]).is_err());
    }

    #[test]
    fn field_continuity_at_slab_interfaces() {
        let k = 2.0 * PI / 640.0;
        let stack = StackLayout::new()
            .gap(300.0)
            .slab(2.3, 145.0)
            .gap(80.0)
            .scatterer(0.9)
            .gap(200.0);
        let field = stack.solve(k).unwrap();
        for i in 0..stack.elements().len() - 1 {
            let left = field.field_in_element(i, stack.elements()[i].extent());
            let right = field.field_in_element(i + 1, 0.0);
            assert!(
                close(left, right, 1e-12),
                "interface {i}: {left} vs {right}"
            );
        }
    }

    #[test]
    fn solved_field_reproduces_reflection_and_incident_normalisation() {
        let k = 2.0 * PI / 555.0;
        let stack = StackLayout::new().gap(100.0).slab(2.0, 100.0).gap(50.0);
        let field = stack.solve(k).unwrap();
        let (r, t) = stack.matrix(k).reflectivity_transmissivity().unwrap();
        assert_eq!(field.boundary_state(0).forward, Complex64::new(1.0, 0.0));
        assert!(close(field.reflectivity(), r, 1e-14));
        assert!(close(field.transmissivity(), t, 1e-14));
        assert!(
            (field.reflectivity().norm_sqr() + field.transmissivity().norm_sqr() - 1.0).abs()
                < 1e-13
        );
    }

    #[test]
    fn intensity_is_modulus_squared() {
        let s = FieldSample::new(0.0, Complex64::new(0.3, -1.7));
        assert_eq!(s.intensity, 0.3 * 0.3 + 1.7 * 1.7);
    }
}
