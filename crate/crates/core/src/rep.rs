//! Points of the representation variety `Hom(π₁, G)`: relation residuals,
//! Gauss-Newton refinement onto the relation variety, conjugation and the
//! irreducibility test.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lie::{self, GroupKind, LieGroupSpec};
use crate::linalg::{self, CMatrix, CVector};
use crate::surface_group;
use crate::tol::{RankPolicy, FLAT_TOL, MAX_ITER};

/// Generator matrices `ρ(a1), ρ(b1), ..., ρ(ag), ρ(bg)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    spec: LieGroupSpec,
    genus: usize,
    matrices: Vec<CMatrix>,
    inverses: Vec<CMatrix>,
    residual: f64,
}

impl Representation {
    pub fn new(spec: LieGroupSpec, genus: usize, matrices: Vec<CMatrix>) -> Result<Self> {
        if genus < 2 {
            return Err(Error::GenusTooSmall(genus));
        }
        if matrices.len() != 2 * genus {
            return Err(Error::DimensionMismatch { expected: 2 * genus, found: matrices.len() });
        }
        for m in &matrices {
            spec.check_element(m)?;
        }
        let inverses = matrices.iter().map(linalg::inverse).collect::<Result<Vec<_>>>()?;
        let mut rep = Self { spec, genus, matrices, inverses, residual: 0.0 };
        rep.residual = relation_residual(&rep);
        Ok(rep)
    }

    /// All generators sent to the identity.
    pub fn trivial(spec: LieGroupSpec, genus: usize) -> Self {
        let id = linalg::identity(spec.n());
        Self {
            spec,
            genus,
            matrices: alloc::vec![id.clone(); 2 * genus],
            inverses: alloc::vec![id; 2 * genus],
            residual: 0.0,
        }
    }

    pub fn spec(&self) -> &LieGroupSpec {
        &self.spec
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn generator(&self, j: usize) -> &CMatrix {
        &self.matrices[j]
    }

    pub fn generator_inverse(&self, j: usize) -> &CMatrix {
        &self.inverses[j]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// Cached `relation_residual`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn is_flat(&self, flat_tol: f64) -> bool {
        self.residual <= flat_tol
    }

    /// Length of a cochain coordinate vector, `2g · dim G`.
    pub fn cochain_len(&self) -> usize {
        2 * self.genus * self.spec.dim()
    }
}

/// Frobenius norm of `∏[A_i, B_i] − I`.
pub fn relation_residual(rep: &Representation) -> f64 {
    let r = surface_group::relator(rep.genus).expect("genus validated at construction");
    let value = surface_group::evaluate_word(rep, &r).expect("relator letters are in range");
    linalg::frobenius(&(value - linalg::identity(rep.spec.n())))
}

/// Generators `exp(scale · X_j)` with Gaussian algebra elements `X_j`; not
/// refined.
pub fn random_representation(spec: LieGroupSpec, genus: usize, seed: u64, scale: f64) -> Result<Representation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrices = (0..2 * genus).map(|_| spec.random_element(&mut rng, scale)).collect();
    Representation::new(spec, genus, matrices)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub flat_tol: f64,
    pub max_iter: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self { flat_tol: FLAT_TOL, max_iter: MAX_ITER }
    }
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub rep: Representation,
    /// Gauss-Newton iterations of the successful run.
    pub iterations: usize,
    /// Starting points tried, including the successful one.
    pub attempts: usize,
}

/// Residual vector `coords(π_𝔤(R − I))` and the relator value `R`.
fn relation_defect(rep: &Representation) -> (CVector, CMatrix) {
    let r = surface_group::relator(rep.genus).expect("validated genus");
    let value = surface_group::evaluate_word(rep, &r).expect("relator letters are in range");
    let defect = rep.spec.coords(&rep.spec.project(&(&value - linalg::identity(rep.spec.n()))));
    (defect, value)
}

/// Jacobian of the relation defect with respect to left-trivialized
/// perturbations `A_j ← exp(η_j) A_j`, expressed on `η` coordinates.
pub(crate) fn defect_jacobian_left(rep: &Representation, relator_value: &CMatrix) -> Result<CMatrix> {
    let spec = rep.spec;
    let r = surface_group::relator(rep.genus)?;
    let delta1 = surface_group::word_extension_matrix(rep, &r)?;
    let mut jac = CMatrix::zeros(spec.dim(), delta1.ncols());
    for col in 0..delta1.ncols() {
        let x = spec.from_coords(&delta1.column(col).into_owned());
        jac.set_column(col, &spec.coords(&spec.project(&(x * relator_value))));
    }
    Ok(jac)
}

fn step_generators(rep: &Representation, step: &CVector, alpha: f64) -> Result<Representation> {
    let spec = rep.spec;
    let dim = spec.dim();
    let matrices = rep
        .matrices
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let xi = spec.from_coords(&step.rows(j * dim, dim).into_owned()) * Complex64::new(alpha, 0.0);
            spec.normalize(&(a * linalg::expm(&xi)))
        })
        .collect();
    Representation::new(spec, rep.genus, matrices)
}

/// Least-squares solution of `J x = b` through the SVD, discarding singular
/// values below `1e-12` relative to the largest.
pub(crate) fn least_squares(jac: &CMatrix, rhs: &CVector) -> CVector {
    let svd = jac.clone().svd(true, true);
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.solve(rhs, largest * 1e-12).unwrap_or_else(|_| CVector::zeros(jac.ncols()))
}

/// Retraction-based Gauss-Newton: `A_j ← A_j · exp(ξ_j)` with the minimum-norm
/// step, damped by halving until the residual decreases.
pub fn refine(rep: &Representation, options: &RefineOptions) -> Result<Refinement> {
    let spec = rep.spec;
    let mut current = rep.clone();
    for iteration in 0..=options.max_iter {
        if current.residual <= options.flat_tol {
            return Ok(Refinement { rep: current, iterations: iteration, attempts: 1 });
        }
        if iteration == options.max_iter {
            break;
        }
        let (defect, value) = relation_defect(&current);
        let left = defect_jacobian_left(&current, &value)?;
        // η_j = Ad(A_j) ξ_j converts left perturbations into right ones.
        let dim = spec.dim();
        let mut jac = CMatrix::zeros(dim, left.ncols());
        for j in 0..2 * current.genus {
            let ad = lie::ad_matrix_with_inverse(&spec, &current.matrices[j], &current.inverses[j]);
            let block = left.columns(j * dim, dim) * ad;
            jac.view_mut((0, j * dim), (dim, dim)).copy_from(&block);
        }
        let step = -least_squares(&jac, &defect);

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            // Huge steps can lose the group constraint numerically; treat
            // them like any other rejected step.
            let candidate = match step_generators(&current, &step, alpha) {
                Ok(c) => c,
                Err(Error::NotInGroup(_) | Error::Singular) => {
                    alpha *= 0.5;
                    continue;
                }
                Err(e) => return Err(e),
            };
            if candidate.residual < current.residual {
                accepted = Some(candidate);
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some(next) => current = next,
            None => {
                return Err(Error::NonConvergence { iterations: iteration + 1, residual: current.residual });
            }
        }
    }
    Err(Error::NonConvergence { iterations: options.max_iter, residual: current.residual })
}

/// A random point of the relation variety, deterministic in `seed`.
pub fn random_flat_representation(spec: LieGroupSpec, genus: usize, seed: u64, scale: f64) -> Result<Representation> {
    random_flat_representation_with(spec, genus, seed, scale, &RefineOptions::default()).map(|r| r.rep)
}

/// Number of starting points drawn before giving up on a seed.
pub const MAX_RESTARTS: usize = 8;

/// Gauss-Newton can stall at non-flat critical points (for SL(2) typically
/// where the relator evaluates to `−I`); on failure a fresh starting point is
/// drawn from the same seeded stream.
pub fn random_flat_representation_with(
    spec: LieGroupSpec,
    genus: usize,
    seed: u64,
    scale: f64,
    options: &RefineOptions,
) -> Result<Refinement> {
    if genus < 2 {
        return Err(Error::GenusTooSmall(genus));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = Error::NonConvergence { iterations: 0, residual: f64::INFINITY };
    for attempt in 0..MAX_RESTARTS {
        let matrices = (0..2 * genus).map(|_| spec.random_element(&mut rng, scale)).collect();
        let start = Representation::new(spec, genus, matrices)?;
        match refine(&start, options) {
            Ok(mut r) => {
                r.attempts = attempt + 1;
                return Ok(r);
            }
            Err(e @ Error::NonConvergence { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Every generator conjugated by `g`.
pub fn conjugate(rep: &Representation, g: &CMatrix) -> Result<Representation> {
    let g_inv = linalg::inverse(g)?;
    let matrices = rep.matrices.iter().map(|a| g * a * &g_inv).collect();
    Representation::new(rep.spec, rep.genus, matrices)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    Reducible,
    /// A spanning decision fell inside the indeterminate band.
    Indeterminate,
}

/// Burnside criterion: the generators have no common invariant subspace iff
/// the algebra they generate is all of `M_n(C)`. Words up to length `2n²`
/// are explored; the torus is always irreducible.
pub fn irreducibility(rep: &Representation, policy: &RankPolicy) -> Irreducibility {
    let n = rep.spec.n();
    if rep.spec.is_abelian() || n == 1 {
        return Irreducibility::Irreducible;
    }
    let full = n * n;
    let flatten = |m: &CMatrix| CVector::from_iterator(full, (0..n).flat_map(|i| (0..n).map(move |j| m[(i, j)])));

    let mut basis: Vec<CVector> = Vec::new();
    let mut ambiguous = false;
    let mut try_add = |m: &CMatrix, basis: &mut Vec<CVector>| -> bool {
        let v = flatten(m);
        let norm = linalg::vector_norm(&v);
        if norm == 0.0 {
            return false;
        }
        let mut r = v / Complex64::new(norm, 0.0);
        for _ in 0..2 {
            for q in basis.iter() {
                let coef = q.dotc(&r);
                r -= q * coef;
            }
        }
        let rel = linalg::vector_norm(&r);
        if rel > policy.band_high {
            basis.push(r / Complex64::new(rel, 0.0));
            true
        } else {
            if rel >= policy.band_low {
                ambiguous = true;
            }
            false
        }
    };

    let id = linalg::identity(n);
    try_add(&id, &mut basis);
    let mut frontier = alloc::vec![id];
    for _ in 0..2 * full {
        if basis.len() == full || frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for w in &frontier {
            for a in &rep.matrices {
                let candidate = w * a;
                if try_add(&candidate, &mut basis) {
                    next.push(candidate);
                }
            }
        }
        frontier = next;
    }
    if basis.len() == full {
        Irreducibility::Irreducible
    } else if ambiguous {
        Irreducibility::Indeterminate
    } else {
        Irreducibility::Reducible
    }
}

/// `Ok(true)` iff irreducible; an indeterminate decision is an error.
pub fn is_irreducible(rep: &Representation, policy: &RankPolicy) -> Result<bool> {
    match irreducibility(rep, policy) {
        Irreducibility::Irreducible => Ok(true),
        Irreducibility::Reducible => Ok(false),
        Irreducibility::Indeterminate => Err(Error::RankAmbiguous(policy.tol)),
    }
}

/// A flat, reducible rank-2 representation: upper-triangular generators
/// `[[λ_j, c_j], [0, μ_j]]` built from two C*-characters (`μ = 1/λ` for SL),
/// with `c_0` solved so that the relator holds.
pub fn block_triangular_representation(
    spec: LieGroupSpec,
    genus: usize,
    seed: u64,
    scale: f64,
) -> Result<Representation> {
    if spec.n() != 2 || spec.kind() == GroupKind::Torus {
        return Err(Error::InvalidGroup("block-triangular samples need SL(2) or GL(2)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
    };
    let count = 2 * genus;
    let diag: Vec<(Complex64, Complex64)> = (0..count)
        .map(|_| {
            let l = (gauss() * scale).exp();
            let m = if spec.kind() == GroupKind::SL { l.inv() } else { (gauss() * scale).exp() };
            (l, m)
        })
        .collect();
    let mut off: Vec<Complex64> = (0..count).map(|_| gauss() * scale).collect();
    let build = |off: &[Complex64]| -> Result<Representation> {
        let mats = diag
            .iter()
            .zip(off)
            .map(|(&(l, m), &c)| CMatrix::from_row_slice(2, 2, &[l, c, Complex64::new(0.0, 0.0), m]))
            .collect();
        Representation::new(spec, genus, mats)
    };
    let relator = surface_group::relator(genus)?;
    // The (0,1) entry of the relator is affine in the off-diagonal entries.
    let corner =
        |off: &[Complex64]| -> Result<Complex64> { Ok(surface_group::evaluate_word(&build(off)?, &relator)?[(0, 1)]) };
    off[0] = Complex64::new(0.0, 0.0);
    let at_zero = corner(&off)?;
    off[0] = Complex64::new(1.0, 0.0);
    let at_one = corner(&off)?;
    let slope = at_one - at_zero;
    if slope.norm() < 1e-12 {
        return Err(Error::Singular);
    }
    off[0] = -at_zero / slope;
    build(&off)
}
