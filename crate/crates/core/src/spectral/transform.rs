//! Three-dimensional FFTs on the periodic lattice.
//!
//! The forward transform carries the `1/n³` factor, so coefficients
//! approximate `(1/L³)∫ f e^{-ik·x} dx` and Parseval reads
//! `‖f‖₂² = L³ Σ_k |f̂(k)|²`. The inverse is the plain Fourier sum.
//!
//! Real fields are transformed two at a time by packing them into the real
//! and imaginary parts of one complex array.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::GridSpec;
use crate::error::{Error, Result};

type Plan = Arc<dyn Fft<f64>>;

thread_local! {
    static PLANS: RefCell<HashMap<usize, (Plan, Plan)>> = RefCell::new(HashMap::new());
}

fn plans(n: usize) -> (Plan, Plan) {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
            })
            .clone()
    })
}

/// Unnormalized in-place 3D transform of an `n³` row-major array.
pub fn fft3(data: &mut [Complex64], n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n * n * n);
    let (fwd, inv) = plans(n);
    let fft = if inverse { inv } else { fwd };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let nn = n * n;

    // last axis: contiguous rows
    fft.process_with_scratch(data, &mut scratch);

    // middle axis: transpose each i-plane, transform rows, transpose back
    let mut plane = vec![Complex64::default(); nn];
    for i in 0..n {
        let block = &mut data[i * nn..(i + 1) * nn];
        for j in 0..n {
            for l in 0..n {
                plane[l * n + j] = block[j * n + l];
            }
        }
        fft.process_with_scratch(&mut plane, &mut scratch);
        for j in 0..n {
            for l in 0..n {
                block[j * n + l] = plane[l * n + j];
            }
        }
    }

    // first axis: gather one j-slab at a time
    for j in 0..n {
        for i in 0..n {
            let row = (i * n + j) * n;
            for l in 0..n {
                plane[l * n + i] = data[row + l];
            }
        }
        fft.process_with_scratch(&mut plane, &mut scratch);
        for i in 0..n {
            let row = (i * n + j) * n;
            for l in 0..n {
                data[row + l] = plane[l * n + i];
            }
        }
    }
}

fn check_len(grid: &GridSpec, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: len,
        });
    }
    Ok(())
}

/// Forward transform of complex samples, normalized by `1/n³`.
pub fn forward(grid: &GridSpec, samples: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(grid, samples.len())?;
    let mut data = samples.to_vec();
    fft3(&mut data, grid.n(), false);
    let norm = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|c| *c *= norm);
    Ok(data)
}

/// Inverse transform (Fourier sum) to complex samples.
pub fn inverse(grid: &GridSpec, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(grid, coeffs.len())?;
    let mut data = coeffs.to_vec();
    fft3(&mut data, grid.n(), true);
    Ok(data)
}

/// Forward transforms of two real sample arrays through one complex FFT.
///
/// The outputs are exactly Hermitian: each coefficient is assembled from
/// `Z(k)` and `conj Z(-k)` symmetrically.
pub fn forward_real_pair(
    grid: &GridSpec,
    a: &[f64],
    b: &[f64],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_len(grid, a.len())?;
    check_len(grid, b.len())?;
    let mut z: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    fft3(&mut z, grid.n(), false);
    let norm = 0.5 / grid.len() as f64;
    let mut fa = vec![Complex64::default(); z.len()];
    let mut fb = vec![Complex64::default(); z.len()];
    for idx in 0..z.len() {
        let zk = z[idx];
        let zm = z[grid.neg_index(idx)].conj();
        fa[idx] = (zk + zm) * norm;
        // (Z(k) - conj Z(-k)) / 2i
        let d = (zk - zm) * norm;
        fb[idx] = Complex64::new(d.im, -d.re);
    }
    Ok((fa, fb))
}

/// Forward transform of one real sample array.
pub fn forward_real(grid: &GridSpec, a: &[f64]) -> Result<Vec<Complex64>> {
    let zeros = vec![0.0; a.len()];
    Ok(forward_real_pair(grid, a, &zeros)?.0)
}

/// Inverse transforms of two Hermitian coefficient arrays through one
/// complex FFT; imaginary round-off of each field is discarded.
pub fn inverse_real_pair(
    grid: &GridSpec,
    a: &[Complex64],
    b: &[Complex64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(grid, a.len())?;
    check_len(grid, b.len())?;
    let mut z: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
        .collect();
    fft3(&mut z, grid.n(), true);
    Ok((z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect()))
}

/// Inverse transform of one Hermitian coefficient array.
pub fn inverse_real(grid: &GridSpec, a: &[Complex64]) -> Result<Vec<f64>> {
    let mut z = a.to_vec();
    check_len(grid, z.len())?;
    fft3(&mut z, grid.n(), true);
    Ok(z.iter().map(|c| c.re).collect())
}

/// Transforms any number of real arrays, pairing them up.
pub fn forward_real_many(grid: &GridSpec, fields: &[&[f64]]) -> Result<Vec<Vec<Complex64>>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        if let [a, b] = pair {
            let (fa, fb) = forward_real_pair(grid, a, b)?;
            out.push(fa);
            out.push(fb);
        } else {
            out.push(forward_real(grid, pair[0])?);
        }
    }
    Ok(out)
}

/// Inverse counterpart of [`forward_real_many`].
pub fn inverse_real_many(grid: &GridSpec, fields: &[&[Complex64]]) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        if let [a, b] = pair {
            let (fa, fb) = inverse_real_pair(grid, a, b)?;
            out.push(fa);
            out.push(fb);
        } else {
            out.push(inverse_real(grid, pair[0])?);
        }
    }
    Ok(out)
}
