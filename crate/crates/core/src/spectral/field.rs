use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::grid::GridSpec;
use super::transform;
use crate::error::{Error, Result};

/// A real vector field on the lattice, stored as three arrays of Fourier
/// coefficients `û_j(k)` in the grid's storage order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    comps: [Vec<Complex64>; 3],
}

/// A real scalar field in Fourier space.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalar {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

/// Samples of a real vector field at the grid points `x = (L/n)·(i, j, l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    comps: [Vec<f64>; 3],
}

/// The solver state `(u, B)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolenoidalState {
    pub u: SpectralField,
    pub b: SpectralField,
    pub time: f64,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        let z = vec![Complex64::default(); grid.len()];
        Self {
            grid,
            comps: [z.clone(), z.clone(), z],
        }
    }

    pub fn from_components(grid: GridSpec, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    found: c.len(),
                });
            }
        }
        Ok(Self { grid, comps })
    }

    /// Builds a field from a per-mode rule `(idx, k) -> [û₁, û₂, û₃]`.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, [f64; 3]) -> [Complex64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(idx, grid.wavevector(idx));
            for a in 0..3 {
                out.comps[a][idx] = v[a];
            }
        }
        out
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn component(&self, a: usize) -> &[Complex64] {
        &self.comps[a]
    }

    #[inline]
    pub fn component_mut(&mut self, a: usize) -> &mut [Complex64] {
        &mut self.comps[a]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: [Complex64; 3]) {
        for a in 0..3 {
            self.comps[a][idx] = v[a];
        }
    }

    pub fn from_physical(field: &PhysicalField) -> Result<Self> {
        let grid = field.grid;
        let (c0, c1) = transform::forward_real_pair(&grid, &field.comps[0], &field.comps[1])?;
        let c2 = transform::forward_real(&grid, &field.comps[2])?;
        Ok(Self {
            grid,
            comps: [c0, c1, c2],
        })
    }

    pub fn to_physical(&self) -> PhysicalField {
        let grid = self.grid;
        let (p0, p1) = transform::inverse_real_pair(&grid, &self.comps[0], &self.comps[1])
            .expect("component lengths match the grid");
        let p2 = transform::inverse_real(&grid, &self.comps[2]).expect("length checked");
        PhysicalField {
            grid,
            comps: [p0, p1, p2],
        }
    }

    /// `‖f‖₂² = L³ Σ_k |f̂(k)|²`.
    pub fn norm_sq(&self) -> f64 {
        self.weighted_norm_sq(|_| 1.0)
    }

    /// `L³ Σ_k w(k) |f̂(k)|²` for a real weight evaluated per flat index.
    pub fn weighted_norm_sq(&self, mut w: impl FnMut(usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for idx in 0..self.grid.len() {
            let m = self.comps[0][idx].norm_sqr()
                + self.comps[1][idx].norm_sqr()
                + self.comps[2][idx].norm_sqr();
            if m != 0.0 {
                acc += w(idx) * m;
            }
        }
        acc * self.grid.volume()
    }

    /// `⟨f, g⟩ = ∫ f·g dx = L³ Σ_k Re(f̂(k)·conj ĝ(k))`.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.weighted_inner(other, |_| 1.0)
    }

    pub fn weighted_inner(
        &self,
        other: &SpectralField,
        mut w: impl FnMut(usize) -> f64,
    ) -> Result<f64> {
        self.check_grid(other)?;
        let mut acc = 0.0;
        for idx in 0..self.grid.len() {
            let mut s = 0.0;
            for a in 0..3 {
                s += (self.comps[a][idx] * other.comps[a][idx].conj()).re;
            }
            if s != 0.0 {
                acc += w(idx) * s;
            }
        }
        Ok(acc * self.grid.volume())
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &SpectralField, b: f64) -> Result<SpectralField> {
        self.check_grid(other)?;
        let mut out = self.clone();
        for c in 0..3 {
            for (o, x) in out.comps[c].iter_mut().zip(&other.comps[c]) {
                *o = *o * a + *x * b;
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale_in_place(s);
        out
    }

    pub fn scale_in_place(&mut self, s: f64) {
        for c in self.comps.iter_mut() {
            c.iter_mut().for_each(|x| *x *= s);
        }
    }

    /// Multiplies every coefficient by a real per-mode factor.
    pub fn apply_multiplier(&self, mut factor: impl FnMut(usize) -> f64) -> SpectralField {
        let mut out = self.clone();
        for idx in 0..self.grid.len() {
            let f = factor(idx);
            for c in 0..3 {
                out.comps[c][idx] *= f;
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        (0..self.grid.len())
            .map(|idx| mode_norm(&self.at(idx)))
            .fold(0.0, f64::max)
    }

    /// `max_k |f̂(-k) - conj f̂(k)|`; zero for a real field.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for idx in 0..self.grid.len() {
                let d = (c[self.grid.neg_index(idx)] - c[idx].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `max_k |k·f̂(k)|`.
    pub fn divergence_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.derivative_wavevector(idx);
            let v = self.at(idx);
            let d = v[0] * k[0] + v[1] * k[1] + v[2] * k[2];
            worst = worst.max(d.norm());
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|x| x.re.is_finite() && x.im.is_finite()))
    }

    /// Largest coefficientwise distance to `other`, relative to the larger
    /// of the two fields' largest coefficient.
    pub fn max_rel_diff(&self, other: &SpectralField) -> f64 {
        let scale = self.max_abs_coeff().max(other.max_abs_coeff());
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for c in 0..3 {
            for (x, y) in self.comps[c].iter().zip(&other.comps[c]) {
                worst = worst.max((x - y).norm());
            }
        }
        worst / scale
    }
}

#[inline]
pub(crate) fn mode_norm(v: &[Complex64; 3]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

impl Add for &SpectralField {
    type Output = SpectralField;

    /// Panics on a grid mismatch; use [`SpectralField::combine`] to get an error instead.
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.combine(1.0, rhs, 1.0).expect("fields on the same grid")
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.combine(1.0, rhs, -1.0).expect("fields on the same grid")
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl SpectralScalar {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn from_physical(grid: GridSpec, samples: &[f64]) -> Result<Self> {
        Ok(Self {
            grid,
            coeffs: transform::forward_real(&grid, samples)?,
        })
    }

    pub fn to_physical(&self) -> Vec<f64> {
        transform::inverse_real(&self.grid, &self.coeffs).expect("length checked")
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.volume()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl PhysicalField {
    pub fn zeros(grid: GridSpec) -> Self {
        let z = vec![0.0; grid.len()];
        Self {
            grid,
            comps: [z.clone(), z.clone(), z],
        }
    }

    pub fn from_components(grid: GridSpec, comps: [Vec<f64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    found: c.len(),
                });
            }
        }
        Ok(Self { grid, comps })
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let (i, j, l) = grid.unflatten(idx);
            let v = f([grid.coordinate(i), grid.coordinate(j), grid.coordinate(l)]);
            for a in 0..3 {
                out.comps[a][idx] = v[a];
            }
        }
        out
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn component(&self, a: usize) -> &[f64] {
        &self.comps[a]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    /// Riemann-sum `∫|f|² dx`.
    pub fn norm_sq(&self) -> f64 {
        let s: f64 = (0..self.grid.len())
            .map(|i| {
                let v = self.at(i);
                v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
            })
            .sum();
        s * self.grid.cell_volume()
    }

    /// Largest pointwise magnitude `max_x |f(x)|`.
    pub fn max_magnitude(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                let v = self.at(i);
                (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

impl SolenoidalState {
    pub fn new(u: SpectralField, b: SpectralField, time: f64) -> Result<Self> {
        u.check_grid(&b)?;
        Ok(Self { u, b, time })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            u: SpectralField::zeros(grid),
            b: SpectralField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    /// `E = ‖u‖₂² + ‖B‖₂²`.
    pub fn energy(&self) -> f64 {
        self.u.norm_sq() + self.b.norm_sq()
    }

    /// Largest `|k·f̂(k)|` over both fields, relative to the largest coefficient.
    pub fn divergence_defect(&self) -> f64 {
        let scale = self.u.max_abs_coeff().max(self.b.max_abs_coeff());
        if scale == 0.0 {
            return 0.0;
        }
        self.u.divergence_defect().max(self.b.divergence_defect()) / scale
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.b.is_finite()
    }

    /// Componentwise `self - other` at matching times.
    pub fn difference(&self, other: &SolenoidalState) -> Result<SolenoidalState> {
        if (self.time - other.time).abs() > 1e-12 * (1.0 + self.time.abs()) {
            return Err(Error::TimeMismatch {
                left: self.time,
                right: other.time,
            });
        }
        Ok(SolenoidalState {
            u: self.u.combine(1.0, &other.u, -1.0)?,
            b: self.b.combine(1.0, &other.b, -1.0)?,
            time: self.time,
        })
    }

    pub fn scaled(&self, s: f64) -> SolenoidalState {
        SolenoidalState {
            u: self.u.scaled(s),
            b: self.b.scaled(s),
            time: self.time,
        }
    }
}
