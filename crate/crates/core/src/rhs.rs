//! Right-hand side of the viscous resistive Hall-MHD system
//!
//! ```text
//! ∂t u + u·∇u + ∇π = B·∇B + Δu
//! ∂t B − ∇×(u×B) + ∇×((∇×B)×B) = ΔB
//! div u = div B = 0
//! ```
//!
//! in spectral space, with the pressure removed by the Leray projector.
//!
//! Two independent evaluation routes exist. [`rhs`] works from the
//! advective products `u·∇u`, `B·∇B`, `u·∇B`, `B·∇u` and the Hall term
//! `∇×(J×B)`. [`symbol_fields`] works from the flux matrices
//! `(u_k u_j − B_k B_j)^`, `(u_j B_k − B_j u_k)^` and `(B_j B_k)^`,
//!
//! ```text
//! Ĥ(k) = i (I − kkᵀ/|k|²) (uu − BB)^ k
//! M̂(k) = i (uB − Bu)^ k − k × ((B_j B)^ k_j)
//! ```
//!
//! and is the one the time stepper uses. Both return dealiased fields.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::field::mode_norm;
use crate::spectral::ops::{curl, dealias_in_place, laplacian, leray_project, partial};
use crate::spectral::transform::{forward_real_many, inverse_real_many};
use crate::spectral::{GridSpec, SolenoidalState, SpectralField};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which bilinear product [`nonlinear_product`] forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductForm {
    /// `(a·∇) b`
    Advection,
    /// `a × b`
    Cross,
}

/// What [`rhs`] includes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RhsOptions {
    pub laplacian: bool,
    pub nonlinear: bool,
}

impl Default for RhsOptions {
    fn default() -> Self {
        Self {
            laplacian: true,
            nonlinear: true,
        }
    }
}

/// Every nonlinear term of the system at one state.
#[derive(Clone, Debug)]
pub struct RhsTerms {
    /// `u·∇u`
    pub advection: SpectralField,
    /// `B·∇B`
    pub lorentz: SpectralField,
    /// `B·∇u`
    pub induction_stretch: SpectralField,
    /// `u·∇B`
    pub induction_advect: SpectralField,
    /// `∇×((∇×B)×B)`
    pub hall: SpectralField,
    /// `P(u·∇u − B·∇B)`
    pub h_hat: SpectralField,
    /// `u·∇B − B·∇u + ∇×((∇×B)×B)`
    pub m_hat: SpectralField,
}

fn physical(fields: &[&SpectralField]) -> Result<Vec<Vec<f64>>> {
    let comps: Vec<&[Complex64]> = fields
        .iter()
        .flat_map(|f| (0..3).map(move |a| f.component(a)))
        .collect();
    inverse_real_many(fields[0].grid(), &comps)
}

fn spectral_vector(grid: &GridSpec, comps: [Vec<f64>; 3]) -> Result<SpectralField> {
    let refs: Vec<&[f64]> = comps.iter().map(|c| c.as_slice()).collect();
    let mut out = forward_real_many(grid, &refs)?.into_iter();
    let mut f = SpectralField::from_components(
        *grid,
        [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()],
    )?;
    dealias_in_place(&mut f);
    Ok(f)
}

fn cross_physical(a: &[Vec<f64>], b: &[Vec<f64>]) -> [Vec<f64>; 3] {
    let n = a[0].len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for x in 0..n {
        out[0][x] = a[1][x] * b[2][x] - a[2][x] * b[1][x];
        out[1][x] = a[2][x] * b[0][x] - a[0][x] * b[2][x];
        out[2][x] = a[0][x] * b[1][x] - a[1][x] * b[0][x];
    }
    out
}

/// `(a·∇)b` from `a` and the nine physical derivatives `∂_l b_i` (index `3l + i`).
fn advect_physical(a: &[Vec<f64>], grad_b: &[Vec<f64>]) -> [Vec<f64>; 3] {
    let n = a[0].len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (i, o) in out.iter_mut().enumerate() {
        for x in 0..n {
            o[x] = a[0][x] * grad_b[i][x] + a[1][x] * grad_b[3 + i][x] + a[2][x] * grad_b[6 + i][x];
        }
    }
    out
}

fn gradient_physical(b: &SpectralField) -> Result<Vec<Vec<f64>>> {
    let d: Vec<SpectralField> = (0..3).map(|l| partial(b, l)).collect();
    physical(&[&d[0], &d[1], &d[2]])
}

/// Pseudospectral bilinear product: inverse transform, pointwise product,
/// forward transform, dealias.
pub fn nonlinear_product(
    a: &SpectralField,
    b: &SpectralField,
    form: ProductForm,
) -> Result<SpectralField> {
    a.check_grid(b)?;
    let grid = *a.grid();
    match form {
        ProductForm::Cross => {
            let p = physical(&[a, b])?;
            spectral_vector(&grid, cross_physical(&p[0..3], &p[3..6]))
        }
        ProductForm::Advection => {
            let pa = physical(&[a])?;
            let gb = gradient_physical(b)?;
            spectral_vector(&grid, advect_physical(&pa, &gb))
        }
    }
}

/// `∇×((∇×B)×B)`: current `J = ∇×B` spectrally, `J×B` on the grid, then
/// the curl of the dealiased product.
pub fn hall_term(b: &SpectralField) -> Result<SpectralField> {
    let j = curl(b);
    let jxb = nonlinear_product(&j, b, ProductForm::Cross)?;
    Ok(curl(&jxb))
}

/// Induction nonlinearity in its curl form `∇×(u×B)`.
pub fn induction_curl_form(u: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    Ok(curl(&nonlinear_product(u, b, ProductForm::Cross)?))
}

/// Induction nonlinearity in its advective form `−(u·∇B − B·∇u)`.
pub fn induction_advective_form(u: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let ub = nonlinear_product(u, b, ProductForm::Advection)?;
    let bu = nonlinear_product(b, u, ProductForm::Advection)?;
    bu.combine(1.0, &ub, -1.0)
}

/// All nonlinear terms through the advective route.
pub fn rhs_terms(state: &SolenoidalState) -> Result<RhsTerms> {
    let grid = *state.grid();
    let pu = physical(&[&state.u, &state.b])?;
    let (u, b) = pu.split_at(3);
    let gu = gradient_physical(&state.u)?;
    let gb = gradient_physical(&state.b)?;
    let advection = spectral_vector(&grid, advect_physical(u, &gu))?;
    let lorentz = spectral_vector(&grid, advect_physical(b, &gb))?;
    let induction_stretch = spectral_vector(&grid, advect_physical(b, &gu))?;
    let induction_advect = spectral_vector(&grid, advect_physical(u, &gb))?;
    let hall = hall_term(&state.b)?;
    let h_hat = leray_project(&advection.combine(1.0, &lorentz, -1.0)?);
    let m_hat = induction_advect
        .combine(1.0, &induction_stretch, -1.0)?
        .combine(1.0, &hall, 1.0)?;
    Ok(RhsTerms {
        advection,
        lorentz,
        induction_stretch,
        induction_advect,
        hall,
        h_hat,
        m_hat,
    })
}

/// `(du/dt, dB/dt)`:
///
/// ```text
/// du/dt = −P(u·∇u − B·∇B) (+ Δu)
/// dB/dt = −(u·∇B − B·∇u) − ∇×((∇×B)×B) (+ ΔB)
/// ```
pub fn rhs(state: &SolenoidalState, opts: RhsOptions) -> Result<(SpectralField, SpectralField)> {
    let grid = *state.grid();
    let (mut du, mut db) = if opts.nonlinear {
        let t = rhs_terms(state)?;
        (t.h_hat.scaled(-1.0), t.m_hat.scaled(-1.0))
    } else {
        (SpectralField::zeros(grid), SpectralField::zeros(grid))
    };
    if opts.laplacian {
        du = du.combine(1.0, &laplacian(&state.u), 1.0)?;
        db = db.combine(1.0, &laplacian(&state.b), 1.0)?;
    }
    Ok((du, db))
}

/// Ĥ and the two pieces of M̂, from the flux-matrix route.
#[derive(Clone, Debug)]
pub struct SymbolParts {
    pub h_hat: SpectralField,
    /// `i (uB − Bu)^ k`, the first-order part of M̂.
    pub m_linear: SpectralField,
    /// `−k × ((B_j B)^ k_j)`, the Hall part of M̂.
    pub m_hall: SpectralField,
    /// `max_x |u(x)|`, a by-product used for time-step control.
    pub u_max: f64,
    /// `max_x |B(x)|`.
    pub b_max: f64,
}

impl SymbolParts {
    pub fn m_hat(&self) -> SpectralField {
        &self.m_linear + &self.m_hall
    }
}

// index pairs of the six independent entries of a symmetric 3×3 matrix
const SYM: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

#[inline]
fn sym_slot(k: usize, j: usize) -> usize {
    let (a, b) = if k <= j { (k, j) } else { (j, k) };
    SYM.iter().position(|&p| p == (a, b)).unwrap()
}

/// Flux-matrix evaluation of Ĥ and M̂.
pub fn symbol_parts(state: &SolenoidalState) -> Result<SymbolParts> {
    let grid = *state.grid();
    let p = physical(&[&state.u, &state.b])?;
    let (u, b) = p.split_at(3);
    let npts = grid.len();
    let mut u_max: f64 = 0.0;
    let mut b_max: f64 = 0.0;

    // 6 entries of uu − BB, 6 of BB, 3 of E_kj = u_j B_k − B_j u_k (k < j)
    let mut prods: Vec<Vec<f64>> = (0..15).map(|_| vec![0.0; npts]).collect();
    for x in 0..npts {
        let uv = [u[0][x], u[1][x], u[2][x]];
        let bv = [b[0][x], b[1][x], b[2][x]];
        u_max = u_max.max((uv[0] * uv[0] + uv[1] * uv[1] + uv[2] * uv[2]).sqrt());
        b_max = b_max.max((bv[0] * bv[0] + bv[1] * bv[1] + bv[2] * bv[2]).sqrt());
        for (s, &(k, j)) in SYM.iter().enumerate() {
            let bb = bv[k] * bv[j];
            prods[s][x] = uv[k] * uv[j] - bb;
            prods[6 + s][x] = bb;
        }
        prods[12][x] = uv[1] * bv[0] - bv[1] * uv[0]; // E_01
        prods[13][x] = uv[2] * bv[0] - bv[2] * uv[0]; // E_02
        prods[14][x] = uv[2] * bv[1] - bv[2] * uv[1]; // E_12
    }
    let refs: Vec<&[f64]> = prods.iter().map(|v| v.as_slice()).collect();
    let hat = forward_real_many(&grid, &refs)?;
    drop(prods);

    let zero = Complex64::default();
    let mut h_hat = SpectralField::zeros(grid);
    let mut m_linear = SpectralField::zeros(grid);
    let mut m_hall = SpectralField::zeros(grid);
    for idx in 0..npts {
        if !grid.retained(idx) {
            continue;
        }
        let k = grid.derivative_wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let s = |a: usize, c: usize| hat[sym_slot(a, c)][idx];
        let bb = |a: usize, c: usize| hat[6 + sym_slot(a, c)][idx];
        let e = |a: usize, c: usize| -> Complex64 {
            match (a, c) {
                (0, 1) => hat[12][idx],
                (0, 2) => hat[13][idx],
                (1, 2) => hat[14][idx],
                (1, 0) => -hat[12][idx],
                (2, 0) => -hat[13][idx],
                (2, 1) => -hat[14][idx],
                _ => zero,
            }
        };
        let mut h = [zero; 3];
        let mut ml = [zero; 3];
        let mut q = [zero; 3];
        for a in 0..3 {
            for c in 0..3 {
                h[a] += s(a, c) * k[c];
                ml[a] += e(a, c) * k[c];
                q[a] += bb(c, a) * k[c];
            }
            h[a] *= I;
            ml[a] *= I;
        }
        let d = (h[0] * k[0] + h[1] * k[1] + h[2] * k[2]) / k2;
        h_hat.set(idx, [h[0] - d * k[0], h[1] - d * k[1], h[2] - d * k[2]]);
        m_linear.set(idx, ml);
        m_hall.set(
            idx,
            [
                -(q[2] * k[1] - q[1] * k[2]),
                -(q[0] * k[2] - q[2] * k[0]),
                -(q[1] * k[0] - q[0] * k[1]),
            ],
        );
    }
    Ok(SymbolParts {
        h_hat,
        m_linear,
        m_hall,
        u_max,
        b_max,
    })
}

/// `(Ĥ, M̂)` through the flux-matrix route.
pub fn symbol_fields(state: &SolenoidalState) -> Result<(SpectralField, SpectralField)> {
    let p = symbol_parts(state)?;
    let m = p.m_hat();
    Ok((p.h_hat, m))
}

/// Observed constants in the symbol bounds
///
/// ```text
/// |Ĥ(k)| ≤ C E |k|,   |M̂(k)| ≤ C E |k| + C ‖B‖² |k|²,   E = ‖u‖² + ‖B‖².
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolBoundReport {
    /// `sup_k |Ĥ(k)| / (|k| E)`
    pub ratio_h: f64,
    /// `sup_k |M̂_lin(k)| / (|k| E)`
    pub ratio_m_linear: f64,
    /// `sup_k |M̂_Hall(k)| / (|k|² ‖B‖²)`
    pub ratio_m_quadratic: f64,
}

/// The constant every [`SymbolBoundReport`] ratio stays below under the
/// `1/n³` transform normalization: `2/L³`.
///
/// Each coefficient of a grid product is bounded by the mean of its
/// pointwise magnitude, which discrete Parseval turns into `‖·‖²/L³`; the
/// ratios in fact stay below `1/L³`, and the factor two leaves room for
/// splitting `E` into its two fields.
pub fn symbol_bound_constant(grid: &GridSpec) -> f64 {
    2.0 / grid.volume()
}

pub fn symbol_bound_report(state: &SolenoidalState) -> Result<SymbolBoundReport> {
    let grid = *state.grid();
    let e_u = state.u.norm_sq();
    let e_b = state.b.norm_sq();
    let e = e_u + e_b;
    if e == 0.0 {
        return Ok(SymbolBoundReport {
            ratio_h: 0.0,
            ratio_m_linear: 0.0,
            ratio_m_quadratic: 0.0,
        });
    }
    let p = symbol_parts(state)?;
    let mut rep = SymbolBoundReport {
        ratio_h: 0.0,
        ratio_m_linear: 0.0,
        ratio_m_quadratic: 0.0,
    };
    for idx in 0..grid.len() {
        let k2 = grid.k2(idx);
        if k2 == 0.0 {
            continue;
        }
        let k = k2.sqrt();
        rep.ratio_h = rep.ratio_h.max(mode_norm(&p.h_hat.at(idx)) / (k * e));
        rep.ratio_m_linear = rep.ratio_m_linear.max(mode_norm(&p.m_linear.at(idx)) / (k * e));
        if e_b > 0.0 {
            rep.ratio_m_quadratic = rep
                .ratio_m_quadratic
                .max(mode_norm(&p.m_hall.at(idx)) / (k2 * e_b));
        }
    }
    Ok(rep)
}
