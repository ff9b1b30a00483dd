use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry and resolution of the periodic box `[0, L)^3`.
///
/// Modes are stored in FFT order along each axis: index `i` carries the
/// integer mode `m = i` for `i < n/2` and `m = i - n` otherwise, so the
/// lattice is `k = (2π/L)·m` with every component of `m` in `[-n/2, n/2)`.
/// Flat indices are row-major, `idx = (i·n + j)·n + l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_per_axis: usize,
    pub box_length: f64,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

fn default_dealias() -> f64 {
    2.0 / 3.0
}

impl GridSpec {
    pub fn new(n_per_axis: usize, box_length: f64) -> Result<Self> {
        Self::with_dealias(n_per_axis, box_length, default_dealias())
    }

    pub fn with_dealias(n_per_axis: usize, box_length: f64, dealias_fraction: f64) -> Result<Self> {
        let grid = Self {
            n_per_axis,
            box_length,
            dealias_fraction,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_per_axis < 2 || self.n_per_axis % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "n_per_axis must be a positive even integer, got {}",
                self.n_per_axis
            )));
        }
        if !(self.box_length > 0.0 && self.box_length.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "box_length must be positive, got {}",
                self.box_length
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dealias_fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n_per_axis
    }

    /// Number of lattice points, `n^3`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n_per_axis.pow(3)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice spacing in wavenumber, `2π/L`.
    #[inline]
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// `L^3`, the factor in `‖f‖² = L³ Σ |f̂(k)|²`.
    #[inline]
    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Physical cell volume `(L/n)^3`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        (self.box_length / self.n_per_axis as f64).powi(3)
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.box_length / self.n_per_axis as f64
    }

    /// Integer mode number of axis index `i`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.n_per_axis;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Wavenumbers `(2π/L)·m` along one axis in storage order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = self.dk();
        (0..self.n_per_axis).map(|i| dk * self.mode(i) as f64).collect()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n_per_axis + j) * self.n_per_axis + l
    }

    #[inline]
    pub fn unflatten(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n_per_axis;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Flat index of `-k` for the mode at `idx`.
    #[inline]
    pub fn neg_index(&self, idx: usize) -> usize {
        let n = self.n_per_axis;
        let (i, j, l) = self.unflatten(idx);
        self.index((n - i) % n, (n - j) % n, (n - l) % n)
    }

    /// Integer mode triple at `idx`.
    #[inline]
    pub fn modes(&self, idx: usize) -> [i64; 3] {
        let (i, j, l) = self.unflatten(idx);
        [self.mode(i), self.mode(j), self.mode(l)]
    }

    /// Flat index of the integer mode `m`, wrapping into `[-n/2, n/2)`.
    pub fn index_of_mode(&self, m: [i64; 3]) -> usize {
        let n = self.n_per_axis as i64;
        let w = |x: i64| x.rem_euclid(n) as usize;
        self.index(w(m[0]), w(m[1]), w(m[2]))
    }

    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let dk = self.dk();
        let m = self.modes(idx);
        [dk * m[0] as f64, dk * m[1] as f64, dk * m[2] as f64]
    }

    /// Wavevector used by odd (first-derivative) operators: identical to
    /// [`GridSpec::wavevector`] except that the Nyquist component `m = -n/2`,
    /// which has no partner of opposite sign, is set to zero. This keeps
    /// gradients, curls and the Leray projector Hermitian-symmetric.
    #[inline]
    pub fn derivative_wavevector(&self, idx: usize) -> [f64; 3] {
        let dk = self.dk();
        let half = (self.n_per_axis / 2) as i64;
        let m = self.modes(idx);
        let f = |x: i64| if x == -half { 0.0 } else { dk * x as f64 };
        [f(m[0]), f(m[1]), f(m[2])]
    }

    #[inline]
    pub fn k2(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    /// Largest retained `|m_i|`: `floor(fraction · n/2)`.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.dealias_fraction * (self.n_per_axis / 2) as f64 + 1e-9).floor() as i64
    }

    /// Whether the mode at `idx` survives dealiasing.
    #[inline]
    pub fn retained(&self, idx: usize) -> bool {
        let c = self.dealias_cutoff();
        self.modes(idx).iter().all(|m| m.abs() <= c)
    }

    /// Magnitude of the largest retained wavevector (a cube corner).
    pub fn k_max_retained(&self) -> f64 {
        3f64.sqrt() * self.dealias_cutoff() as f64 * self.dk()
    }

    /// `(L/2π)^2`: times comparable to this feel the lowest-mode cutoff.
    pub fn torus_time_scale(&self) -> f64 {
        (self.box_length / (2.0 * PI)).powi(2)
    }

    /// Default decay-fit window `[2, 0.5·(L/2π)²]`.
    pub fn default_fit_window(&self) -> (f64, f64) {
        (2.0, 0.5 * self.torus_time_scale())
    }

    /// Physical coordinate of grid index `i` along any axis.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn center(&self) -> f64 {
        0.5 * self.box_length
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.n_per_axis == other.n_per_axis
            && self.box_length == other.box_length
            && self.dealias_fraction == other.dealias_fraction
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_nonpositive() {
        assert!(GridSpec::new(15, 1.0).is_err());
        assert!(GridSpec::new(0, 1.0).is_err());
        assert!(GridSpec::new(16, 0.0).is_err());
        assert!(GridSpec::with_dealias(16, 1.0, 0.0).is_err());
        assert!(GridSpec::with_dealias(16, 1.0, 1.5).is_err());
    }

    #[test]
    fn lattice_covers_half_open_range() {
        let g = GridSpec::new(8, 2.0 * PI).unwrap();
        let ms: Vec<i64> = (0..8).map(|i| g.mode(i)).collect();
        assert_eq!(ms, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.dk(), 1.0);
    }

    #[test]
    fn cutoff_for_sixteen_is_five() {
        let g = GridSpec::new(16, 1.0).unwrap();
        assert_eq!(g.dealias_cutoff(), 5);
        let g = GridSpec::new(64, 1.0).unwrap();
        assert_eq!(g.dealias_cutoff(), 21);
    }

    #[test]
    fn negation_is_involutive() {
        let g = GridSpec::new(6, 1.0).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.neg_index(g.neg_index(idx)), idx);
            let m = g.modes(idx);
            let mn = g.modes(g.neg_index(idx));
            for a in 0..3 {
                // the Nyquist mode -n/2 is its own partner
                assert!(mn[a] == -m[a] || (m[a] == -3 && mn[a] == -3));
            }
        }
        assert_eq!(g.index_of_mode([1, -1, 2]), g.index(1, 5, 2));
    }
}
