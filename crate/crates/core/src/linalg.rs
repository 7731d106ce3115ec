//! Dense complex linear algebra used throughout the crate.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{Float, One, Zero};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tol::RankPolicy;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = Float::ceil(Float::log2(norm / 0.5)) as u32;
    }
    let scale = Float::powi(2.0f64, -(squarings as i32));
    let scaled = a * Complex64::new(scale, 0.0);

    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..40 {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
        if frobenius(&term) <= 1e-18 * frobenius(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Fréchet derivative of the exponential at `y` in direction `z`, read off the
/// upper-right block of the exponential of `[[y, z], [0, y]]`.
pub fn expm_frechet(y: &CMatrix, z: &CMatrix) -> (CMatrix, CMatrix) {
    let n = y.nrows();
    let mut block = CMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(y);
    block.view_mut((n, n), (n, n)).copy_from(y);
    block.view_mut((0, n), (n, n)).copy_from(z);
    let e = expm(&block);
    (e.view((0, 0), (n, n)).into_owned(), e.view((0, n), (n, n)).into_owned())
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    let scale = frobenius(m);
    if scale == 0.0 {
        return Err(Error::Singular);
    }
    let inv = m.clone().try_inverse().ok_or(Error::Singular)?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(inv)
}

pub fn determinant(m: &CMatrix) -> Complex64 {
    m.clone().determinant()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().copied().sum()
}

/// Principal n-th root of a nonzero complex number.
pub fn principal_root(z: Complex64, n: usize) -> Complex64 {
    if n == 1 {
        return z;
    }
    Complex64::from_polar(Float::powf(z.norm(), 1.0 / n as f64), z.arg() / n as f64)
}

/// Singular values in descending order together with a full set of right
/// singular vectors (columns of `v`).
#[derive(Debug, Clone)]
pub struct FullSvd {
    pub values: Vec<f64>,
    pub v: CMatrix,
}

/// SVD of `m`; wide matrices are zero-padded with rows so that the right
/// singular vectors span the whole domain.
pub fn full_svd(m: &CMatrix) -> FullSvd {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd_unordered(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut v = CMatrix::zeros(cols, cols);
    let mut values = Vec::with_capacity(cols);
    for (k, &idx) in order.iter().enumerate() {
        values.push(svd.singular_values[idx]);
        for i in 0..cols {
            v[(i, k)] = v_t[(idx, i)].conj();
        }
    }
    FullSvd { values, v }
}

/// Number of singular values above the cutoff, measured relative to
/// `max(largest, 1)`. Values inside the indeterminate band are refused.
pub fn decide_rank(values: &[f64], policy: &RankPolicy) -> Result<usize> {
    let largest = values.iter().copied().fold(0.0, f64::max);
    let scale = largest.max(1.0);
    let mut rank = 0;
    for &s in values {
        let x = s / scale;
        if x >= policy.band_low && x <= policy.band_high {
            return Err(Error::RankAmbiguous(x));
        }
        if x > policy.tol {
            rank += 1;
        }
    }
    Ok(rank)
}

pub fn rank(m: &CMatrix, policy: &RankPolicy) -> Result<usize> {
    let svd = full_svd(m);
    decide_rank(&svd.values, policy)
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space(m: &CMatrix, policy: &RankPolicy) -> Result<CMatrix> {
    let cols = m.ncols();
    if m.nrows() == 0 || m.iter().all(|z| z.is_zero()) {
        return Ok(identity(cols));
    }
    let svd = full_svd(m);
    let r = decide_rank(&svd.values, policy)?;
    Ok(svd.v.columns(r, cols - r).into_owned())
}

/// Bilinear (not sesquilinear) dot product.
pub fn bilinear_dot(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn is_identity(m: &CMatrix, tol: f64) -> bool {
    frobenius(&(m - identity(m.nrows()))) <= tol
}

/// Vector with independent standard complex Gaussian entries.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVector {
    CVector::from_fn(len, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

pub fn complex_one() -> Complex64 {
    Complex64::one()
}
