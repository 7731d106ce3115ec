//! Twisted group cohomology `H•(π₁, 𝔤_Ad∘ρ)` through the Fox-calculus cochain
//! complex `𝔤 → 𝔤^{2g} → 𝔤`.
//!
//! Conventions: a 1-cochain is a coordinate vector of length `2g · dim G`,
//! block `j` holding `u(x_j)` in the algebra basis. Cocycles satisfy
//! `u(xy) = u(x) + Ad(ρ(x)) u(y)`; coboundaries are `(δ⁰s)(x) = s − Ad(ρ(x)) s`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lie;
use crate::linalg::{self, CMatrix, CVector};
use crate::rep::Representation;
use crate::surface_group::{self, Word};
use crate::tol::RankPolicy;

/// Cochain block for generator `j` as an algebra element.
pub fn cochain_value(rep: &Representation, u: &CVector, j: usize) -> CMatrix {
    let dim = rep.spec().dim();
    rep.spec().from_coords(&u.rows(j * dim, dim).into_owned())
}

/// Cochain from per-generator algebra values.
pub fn cochain_from_values(rep: &Representation, values: &[CMatrix]) -> Result<CVector> {
    if values.len() != 2 * rep.genus() {
        return Err(Error::DimensionMismatch { expected: 2 * rep.genus(), found: values.len() });
    }
    let dim = rep.spec().dim();
    let mut u = CVector::zeros(rep.cochain_len());
    for (j, x) in values.iter().enumerate() {
        u.rows_mut(j * dim, dim).copy_from(&rep.spec().coords(x));
    }
    Ok(u)
}

/// Value `u(w)` of the crossed homomorphism determined by `u` on generators.
pub fn extend_cocycle(rep: &Representation, u: &CVector, w: &Word) -> Result<CVector> {
    Ok(surface_group::word_extension_matrix(rep, w)? * u)
}

/// `δ⁰`, size `2g·dim × dim`; block `j` is `I − Ad(ρ(x_j))`.
pub fn coboundary_matrix(rep: &Representation) -> CMatrix {
    let spec = rep.spec();
    let dim = spec.dim();
    let mut m = CMatrix::zeros(rep.cochain_len(), dim);
    for j in 0..2 * rep.genus() {
        let ad = lie::ad_matrix_with_inverse(spec, rep.generator(j), rep.generator_inverse(j));
        let block = linalg::identity(dim) - ad;
        m.view_mut((j * dim, 0), (dim, dim)).copy_from(&block);
    }
    m
}

/// `δ¹`, size `dim × 2g·dim`: the Fox jacobian of the relator, so that
/// `δ¹ u = u(R)`.
pub fn cocycle_matrix(rep: &Representation) -> CMatrix {
    let r = surface_group::relator(rep.genus()).expect("validated genus");
    surface_group::word_extension_matrix(rep, &r).expect("relator letters are in range")
}

/// Cochain spaces and cohomology dimensions at a flat representation.
#[derive(Debug, Clone)]
pub struct CohomologySpaces {
    pub delta0: CMatrix,
    pub delta1: CMatrix,
    /// Orthonormal columns spanning the Hermitian complement of `B¹` in `Z¹`.
    pub representatives: CMatrix,
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub delta0_singular_values: Vec<f64>,
    pub delta1_singular_values: Vec<f64>,
}

impl CohomologySpaces {
    pub fn representative(&self, i: usize) -> CVector {
        self.representatives.column(i).into_owned()
    }

    /// `‖δ¹ u‖`.
    pub fn cocycle_residual(&self, u: &CVector) -> f64 {
        linalg::vector_norm(&(&self.delta1 * u))
    }

    pub fn coboundary(&self, s: &CVector) -> CVector {
        &self.delta0 * s
    }

    /// `h0 − h1 + h2`.
    pub fn euler_characteristic(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64
    }

    /// `‖δ¹ δ⁰‖`.
    pub fn composition_residual(&self) -> f64 {
        linalg::frobenius(&(&self.delta1 * &self.delta0))
    }
}

/// Cohomology at a flat representation. Rank decisions use `policy`; a
/// singular value inside the indeterminate band is an error.
pub fn cohomology(rep: &Representation, flat_tol: f64, policy: &RankPolicy) -> Result<CohomologySpaces> {
    if !rep.is_flat(flat_tol) {
        return Err(Error::NotFlat(rep.residual()));
    }
    let dim = rep.spec().dim();
    let total = rep.cochain_len();
    let delta0 = coboundary_matrix(rep);
    let delta1 = cocycle_matrix(rep);
    let svd0 = linalg::full_svd(&delta0);
    let svd1 = linalg::full_svd(&delta1);
    let rank0 = linalg::decide_rank(&svd0.values, policy)?;
    let rank1 = linalg::decide_rank(&svd1.values, policy)?;
    let h0 = dim - rank0;
    let h2 = dim - rank1;
    let h1 = total - rank1 - rank0;

    let representatives = if rank0 == 0 && rank1 == 0 {
        linalg::identity(total)
    } else {
        // Null space of [δ¹; δ⁰ᴴ]: cocycles orthogonal to every coboundary.
        let mut stacked = CMatrix::zeros(dim + dim, total);
        stacked.view_mut((0, 0), (dim, total)).copy_from(&delta1);
        stacked.view_mut((dim, 0), (dim, total)).copy_from(&delta0.adjoint());
        let svd = linalg::full_svd(&stacked);
        svd.v.columns(total - h1, h1).into_owned()
    };

    Ok(CohomologySpaces {
        delta0,
        delta1,
        representatives,
        h0,
        h1,
        h2,
        delta0_singular_values: svd0.values,
        delta1_singular_values: svd1.values,
    })
}

/// Expected `h1` at an irreducible point: `2·dim G·(g − 1) + 2·dim Z`.
pub fn expected_irreducible_h1(rep: &Representation) -> usize {
    let spec = rep.spec();
    2 * spec.dim() * (rep.genus() - 1) + 2 * spec.center_dim()
}
