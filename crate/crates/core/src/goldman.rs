//! The Goldman pairing on `H¹(π₁, 𝔤_Ad∘ρ)`: cup product of cocycles paired by
//! the invariant form and evaluated on a fundamental 2-cycle of the bar
//! complex.
//!
//! The 2-cycle is read off the Fox derivatives of the relator,
//! `Σ_j (∂R/∂x_j) ⊗ [x_j]`: a letter `x` after prefix `w` contributes
//! `+[w | x]`, a letter `x⁻¹` after prefix `w` contributes `−[w x⁻¹ | x]`.
//! Its boundary vanishes because `Σ_j (∂R/∂x_j)(x_j − 1) = R − 1` and every
//! generator has exponent sum zero in `R`. With this sign the abelian pairing
//! satisfies `ω(e_a1, e_b1) = +1`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cohomology::{self, CohomologySpaces};
use crate::error::{Error, Result};
use crate::lie::{self, InvariantForm, LieGroupSpec};
use crate::linalg::{self, CMatrix, CVector};
use crate::rep::{self, Representation};
use crate::surface_group::{self, SurfaceGroupPresentation, Word};
use crate::tol::{RankPolicy, COCYCLE_TOL, FLAT_TOL};

/// One term `coefficient · [prefix | x_generator]` of a bar 2-chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarEntry {
    pub prefix: Word,
    pub generator: usize,
    pub coefficient: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarTwoChain {
    genus: usize,
    entries: Vec<BarEntry>,
}

/// Descent self-test threshold applied when constructing the fundamental cycle.
const DESCENT_TOL: f64 = 1e-10;

impl BarTwoChain {
    /// The Fox-derivative 2-chain of a relator, without self-test.
    pub fn from_relator(genus: usize, relator: &Word) -> Self {
        let mut entries = Vec::with_capacity(relator.len());
        let mut prefix = Word::identity();
        for &l in relator.letters() {
            if l.inverse {
                prefix.push(l);
                entries.push(BarEntry { prefix: prefix.clone(), generator: l.generator, coefficient: -1 });
            } else {
                entries.push(BarEntry { prefix: prefix.clone(), generator: l.generator, coefficient: 1 });
                prefix.push(l);
            }
        }
        Self { genus, entries }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn entries(&self) -> &[BarEntry] {
        &self.entries
    }
}

/// The fundamental 2-cycle of the surface, certified by a descent self-test
/// against five random flat SL(2) representations.
pub fn fundamental_cycle(presentation: &SurfaceGroupPresentation) -> Result<BarTwoChain> {
    let cycle = BarTwoChain::from_relator(presentation.genus(), presentation.relator());
    let spec = LieGroupSpec::sl(2);
    for seed in 0..5 {
        let rep = rep::random_flat_representation(spec, presentation.genus(), 1000 + seed, 0.5)?;
        let residual = descent_residual(&rep, &cycle, &InvariantForm::trace_form(spec), seed, 4)?;
        if residual > DESCENT_TOL {
            return Err(Error::DescentFailure(residual));
        }
    }
    Ok(cycle)
}

/// The cochain-level pairing `ω(u, v) = uᵀ W v` at a fixed representation.
#[derive(Debug, Clone)]
pub struct CochainPairing {
    matrix: CMatrix,
}

impl CochainPairing {
    /// Assemble `W = Σ c · E_pᵀ G Ad(ρ(p)) S_x` over the chain entries, where
    /// `E_p` extends cochains to the prefix word `p` and `S_x` picks the
    /// generator block.
    pub fn new(rep: &Representation, cycle: &BarTwoChain, form: &InvariantForm) -> Result<Self> {
        if cycle.genus() != rep.genus() {
            return Err(Error::DimensionMismatch { expected: rep.genus(), found: cycle.genus() });
        }
        let spec = rep.spec();
        let dim = spec.dim();
        let total = rep.cochain_len();
        let gram = form.gram();
        let mut w = CMatrix::zeros(total, total);
        for entry in cycle.entries() {
            let ext = surface_group::word_extension_matrix(rep, &entry.prefix)?;
            let (g, g_inv) = surface_group::evaluate_word_with_inverse(rep, &entry.prefix)?;
            let ad = lie::ad_matrix_with_inverse(spec, &g, &g_inv);
            let block = ext.transpose() * &gram * ad * Complex64::new(entry.coefficient as f64, 0.0);
            let j = entry.generator;
            let mut cols = w.columns_mut(j * dim, dim);
            cols += block;
        }
        Ok(Self { matrix: w })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn pair(&self, u: &CVector, v: &CVector) -> Complex64 {
        linalg::bilinear_dot(u, &(&self.matrix * v))
    }
}

/// Direct evaluation `Σ c · B(u(prefix), Ad(ρ(prefix)) v(x))` over the chain.
pub fn goldman_pairing(
    rep: &Representation,
    u: &CVector,
    v: &CVector,
    cycle: &BarTwoChain,
    form: &InvariantForm,
) -> Result<Complex64> {
    if !rep.is_flat(FLAT_TOL) {
        return Err(Error::NotFlat(rep.residual()));
    }
    let delta1 = cohomology::cocycle_matrix(rep);
    for x in [u, v] {
        if x.len() != rep.cochain_len() {
            return Err(Error::DimensionMismatch { expected: rep.cochain_len(), found: x.len() });
        }
        let residual = linalg::vector_norm(&(&delta1 * x));
        if residual > COCYCLE_TOL * linalg::vector_norm(x).max(1.0) {
            return Err(Error::NotCocycle(residual));
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for entry in cycle.entries() {
        let (g, _) = surface_group::evaluate_word_with_inverse(rep, &entry.prefix)?;
        let left = rep.spec().from_coords(&cohomology::extend_cocycle(rep, u, &entry.prefix)?);
        let right = lie::ad_action(&g, &cohomology::cochain_value(rep, v, entry.generator))?;
        total += form.eval(&left, &right) * entry.coefficient as f64;
    }
    Ok(total)
}

/// `|ω(δ⁰s, v)|` maximized over random cocycles `v` and 0-cochains `s`,
/// normalized by `‖δ⁰s‖ ‖v‖ max(‖W‖, 1)`.
pub fn descent_residual(
    rep: &Representation,
    cycle: &BarTwoChain,
    form: &InvariantForm,
    seed: u64,
    samples: usize,
) -> Result<f64> {
    let pairing = CochainPairing::new(rep, cycle, form)?;
    let delta0 = cohomology::coboundary_matrix(rep);
    let cocycles = linalg::null_space(&cohomology::cocycle_matrix(rep), &RankPolicy::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = linalg::frobenius(pairing.matrix()).max(1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let v = &cocycles * linalg::random_vector(&mut rng, cocycles.ncols());
        let ds = &delta0 * linalg::random_vector(&mut rng, delta0.ncols());
        let norm = linalg::vector_norm(&ds) * linalg::vector_norm(&v) * scale;
        if norm == 0.0 {
            continue;
        }
        worst = worst.max(pairing.pair(&ds, &v).norm() / norm);
    }
    Ok(worst)
}

/// The matrix `Ω[i][j] = ω(r_i, r_j)` on the H¹ representatives.
#[derive(Debug, Clone)]
pub struct GoldmanMatrix {
    pub omega: CMatrix,
}

impl GoldmanMatrix {
    /// `‖Ω + Ωᵀ‖ / ‖Ω‖`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let norm = linalg::frobenius(&self.omega);
        if norm == 0.0 {
            return 0.0;
        }
        linalg::frobenius(&(&self.omega + self.omega.transpose())) / norm
    }

    /// Smallest over largest singular value.
    pub fn singular_ratio(&self) -> f64 {
        let values = linalg::full_svd(&self.omega).values;
        let largest = values.first().copied().unwrap_or(0.0);
        if largest == 0.0 {
            return 0.0;
        }
        values.last().copied().unwrap_or(0.0) / largest
    }

    pub fn size(&self) -> usize {
        self.omega.nrows()
    }
}

pub fn goldman_matrix(
    rep: &Representation,
    spaces: &CohomologySpaces,
    cycle: &BarTwoChain,
    form: &InvariantForm,
) -> Result<GoldmanMatrix> {
    let pairing = CochainPairing::new(rep, cycle, form)?;
    let r = &spaces.representatives;
    Ok(GoldmanMatrix { omega: r.transpose() * pairing.matrix() * r })
}

/// A three-parameter chart of the relation variety through a flat point:
/// `A_j(t) = exp(Y_j(t, c(t))) A_j` with `Y = Σ t_i d_i + Σ c_k ν_k`, where the
/// `ν_k` span the orthogonal complement of `ker δ¹` and `c(t)` is solved by
/// Newton's method so that the relator holds.
struct Chart<'a> {
    base: &'a Representation,
    directions: [CVector; 3],
    normals: CMatrix,
}

struct ChartPoint {
    rep: Representation,
    tangents: [CVector; 3],
}

impl<'a> Chart<'a> {
    fn new(base: &'a Representation, directions: &[CVector; 3]) -> Result<Self> {
        let delta1 = cohomology::cocycle_matrix(base);
        let svd = linalg::full_svd(&delta1);
        let r = linalg::decide_rank(&svd.values, &RankPolicy::default())?;
        Ok(Self { base, directions: directions.clone(), normals: svd.v.columns(0, r).into_owned() })
    }

    fn generators(&self, y: &CVector) -> Result<Representation> {
        let spec = self.base.spec();
        let dim = spec.dim();
        let mats = (0..2 * self.base.genus())
            .map(|j| linalg::expm(&spec.from_coords(&y.rows(j * dim, dim).into_owned())) * self.base.generator(j))
            .collect();
        Representation::new(*spec, self.base.genus(), mats)
    }

    /// Block-diagonal map from chart displacements `Z` to left-trivialized
    /// tangent vectors `dA_j A_j⁻¹ = Dexp_{Y_j}[Z_j] exp(−Y_j)`.
    fn left_trivialization(&self, y: &CVector) -> CMatrix {
        let spec = self.base.spec();
        let dim = spec.dim();
        let total = y.len();
        let basis = spec.algebra_basis();
        let mut l = CMatrix::zeros(total, total);
        for j in 0..2 * self.base.genus() {
            let yj = spec.from_coords(&y.rows(j * dim, dim).into_owned());
            let minus = linalg::expm(&(-&yj));
            for (k, e) in basis.iter().enumerate() {
                let (_, d) = linalg::expm_frechet(&yj, e);
                l.view_mut((j * dim, j * dim + k), (dim, 1)).copy_from(&spec.coords(&(d * &minus)));
            }
        }
        l
    }

    fn point(&self, t: [f64; 3]) -> Result<ChartPoint> {
        let total = self.base.cochain_len();
        let mut drift = CVector::zeros(total);
        for (d, ti) in self.directions.iter().zip(t) {
            drift += d * Complex64::new(ti, 0.0);
        }
        let spec = *self.base.spec();
        let relator = surface_group::relator(self.base.genus())?;
        let mut c = CVector::zeros(self.normals.ncols());
        let mut solved = None;
        for _ in 0..60 {
            let y = &drift + &self.normals * &c;
            let rep = self.generators(&y)?;
            let value = surface_group::evaluate_word(&rep, &relator)?;
            let defect = spec.coords(&spec.project(&(&value - linalg::identity(spec.n()))));
            let jac = rep::defect_jacobian_left(&rep, &value)? * self.left_trivialization(&y);
            if rep.residual() <= 1e-14 || self.normals.ncols() == 0 {
                solved = Some((rep, y, jac));
                break;
            }
            let step = rep::least_squares(&(&jac * &self.normals), &defect);
            let next = &c - step;
            if linalg::vector_norm(&(&next - &c)) <= 1e-16 * linalg::vector_norm(&c).max(1.0) {
                solved = Some((rep, y, jac));
                break;
            }
            c = next;
        }
        let (rep, y, jac) = solved.ok_or(Error::NonConvergence { iterations: 60, residual: f64::NAN })?;
        if rep.residual() > FLAT_TOL {
            return Err(Error::NonConvergence { iterations: 60, residual: rep.residual() });
        }
        let l = self.left_trivialization(&y);
        let jac_c = &jac * &self.normals;
        let tangents = [0, 1, 2].map(|i| {
            let d = &self.directions[i];
            let dc =
                if self.normals.ncols() == 0 { CVector::zeros(0) } else { -rep::least_squares(&jac_c, &(&jac * d)) };
            &l * (d + &self.normals * dc)
        });
        Ok(ChartPoint { rep, tangents })
    }
}

/// Central-difference estimate of `|dω(X, Y, Z)|` for the coordinate fields
/// of a chart along three tangent directions (brackets of coordinate fields
/// vanish): `∂₁ω₂₃ − ∂₂ω₁₃ + ∂₃ω₁₂` with step `h`.
pub fn closedness_residual(
    rep: &Representation,
    directions: &[CVector; 3],
    h: f64,
    cycle: &BarTwoChain,
    form: &InvariantForm,
) -> Result<f64> {
    if !rep.is_flat(FLAT_TOL) {
        return Err(Error::NotFlat(rep.residual()));
    }
    let chart = Chart::new(rep, directions)?;
    let omega = |t: [f64; 3], a: usize, b: usize| -> Result<Complex64> {
        let p = chart.point(t)?;
        let pairing = CochainPairing::new(&p.rep, cycle, form)?;
        Ok(pairing.pair(&p.tangents[a], &p.tangents[b]))
    };
    let derivative = |axis: usize, a: usize, b: usize| -> Result<Complex64> {
        let mut plus = [0.0; 3];
        let mut minus = [0.0; 3];
        plus[axis] = h;
        minus[axis] = -h;
        Ok((omega(plus, a, b)? - omega(minus, a, b)?) / (2.0 * h))
    };
    let d = derivative(0, 1, 2)? - derivative(1, 0, 2)? + derivative(2, 0, 1)?;
    Ok(d.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn sample(seed: u64) -> Representation {
        rep::random_flat_representation(LieGroupSpec::sl(2), 2, seed, 0.5).unwrap()
    }

    #[test]
    fn chain_has_one_entry_per_relator_letter() {
        let p = SurfaceGroupPresentation::new(2).unwrap();
        let cycle = fundamental_cycle(&p).unwrap();
        assert_eq!(cycle.entries().len(), 8);
        assert!(cycle.entries().len() <= 2 * 4 * 2);
        assert_eq!(cycle.entries()[2].prefix.to_signed(), alloc::vec![1, 2, -1]);
        assert_eq!(cycle.entries()[2].coefficient, -1);
    }

    #[test]
    fn abelian_orientation() {
        let p = SurfaceGroupPresentation::new(2).unwrap();
        let cycle = fundamental_cycle(&p).unwrap();
        let spec = LieGroupSpec::torus();
        let rep = rep::random_flat_representation(spec, 2, 3, 1.0).unwrap();
        let form = InvariantForm::trace_form(spec);
        let e = |j: usize| {
            let mut v = CVector::zeros(4);
            v[j] = c(1.0, 0.0);
            v
        };
        assert_eq!(goldman_pairing(&rep, &e(0), &e(1), &cycle, &form).unwrap(), c(1.0, 0.0));
        assert_eq!(goldman_pairing(&rep, &e(0), &e(2), &cycle, &form).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn trivial_rep_pairing_is_intersection_form_tensor_b() {
        let spec = LieGroupSpec::sl(2);
        let rep = Representation::trivial(spec, 2);
        let cycle = fundamental_cycle(&SurfaceGroupPresentation::new(2).unwrap()).unwrap();
        let form = InvariantForm::trace_form(spec);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = linalg::random_vector(&mut rng, 12);
        let v = linalg::random_vector(&mut rng, 12);
        let got = goldman_pairing(&rep, &u, &v, &cycle, &form).unwrap();
        let mut expected = c(0.0, 0.0);
        for i in 0..2 {
            let (a, b) = (2 * i, 2 * i + 1);
            let val = |x: &CVector, j: usize| cohomology::cochain_value(&rep, x, j);
            expected += form.eval(&val(&u, a), &val(&v, b)) - form.eval(&val(&u, b), &val(&v, a));
        }
        assert!((got - expected).norm() < 1e-12);
    }

    #[test]
    fn pairing_is_alternating_and_descends() {
        let rep = sample(1);
        let spec = *rep.spec();
        let cycle = fundamental_cycle(&SurfaceGroupPresentation::new(2).unwrap()).unwrap();
        let form = InvariantForm::trace_form(spec);
        let spaces = cohomology::cohomology(&rep, 1e-10, &RankPolicy::default()).unwrap();
        let u = spaces.representative(0) + spaces.representative(3) * c(0.5, -1.0);
        let w = goldman_pairing(&rep, &u, &u, &cycle, &form).unwrap();
        assert!(w.norm() < 1e-10);
        let s = CVector::from_vec(alloc::vec![c(1.0, 0.2), c(-0.3, 0.0), c(0.4, 0.9)]);
        let ds = spaces.coboundary(&s);
        let v = spaces.representative(2);
        assert!(goldman_pairing(&rep, &ds, &v, &cycle, &form).unwrap().norm() < 1e-10);
    }

    #[test]
    fn direct_and_assembled_pairings_agree() {
        let rep = sample(2);
        let spec = *rep.spec();
        let cycle = fundamental_cycle(&SurfaceGroupPresentation::new(2).unwrap()).unwrap();
        let form = InvariantForm::trace_form(spec);
        let spaces = cohomology::cohomology(&rep, 1e-10, &RankPolicy::default()).unwrap();
        let pairing = CochainPairing::new(&rep, &cycle, &form).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let (u, v) = (spaces.representative(i), spaces.representative(j));
                let a = goldman_pairing(&rep, &u, &v, &cycle, &form).unwrap();
                let b = pairing.pair(&u, &v);
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_cocycle_input_is_rejected() {
        let rep = sample(3);
        let cycle = BarTwoChain::from_relator(2, &surface_group::relator(2).unwrap());
        let form = InvariantForm::trace_form(*rep.spec());
        let mut u = CVector::zeros(12);
        u[0] = c(1.0, 0.0);
        let err = goldman_pairing(&rep, &u, &u, &cycle, &form).unwrap_err();
        assert!(matches!(err, Error::NotCocycle(r) if r > 1e-3));
    }

    #[test]
    fn torus_goldman_matrix_is_standard_symplectic() {
        let spec = LieGroupSpec::torus();
        let rep = rep::random_flat_representation(spec, 2, 0, 1.0).unwrap();
        let spaces = cohomology::cohomology(&rep, 1e-10, &RankPolicy::default()).unwrap();
        let cycle = fundamental_cycle(&SurfaceGroupPresentation::new(2).unwrap()).unwrap();
        let m = goldman_matrix(&rep, &spaces, &cycle, &InvariantForm::trace_form(spec)).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        for i in 0..2 {
            expected[(2 * i, 2 * i + 1)] = c(1.0, 0.0);
            expected[(2 * i + 1, 2 * i)] = c(-1.0, 0.0);
        }
        assert_eq!(m.omega, expected);
    }

    #[test]
    fn torus_chart_is_closed() {
        let spec = LieGroupSpec::torus();
        let rep = rep::random_flat_representation(spec, 2, 5, 1.0).unwrap();
        let cycle = BarTwoChain::from_relator(2, &surface_group::relator(2).unwrap());
        let dirs = [0, 1, 2].map(|j| {
            let mut v = CVector::zeros(4);
            v[j] = c(1.0, 0.0);
            v[3] = c(0.3, 0.1);
            v
        });
        let r = closedness_residual(&rep, &dirs, 1e-3, &cycle, &InvariantForm::trace_form(spec)).unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn repeated_direction_gives_zero() {
        let rep = sample(1);
        let spaces = cohomology::cohomology(&rep, 1e-10, &RankPolicy::default()).unwrap();
        let cycle = BarTwoChain::from_relator(2, &surface_group::relator(2).unwrap());
        let d = spaces.representative(0);
        let dirs = [d.clone(), d, spaces.representative(1)];
        let r = closedness_residual(&rep, &dirs, 1e-3, &cycle, &InvariantForm::trace_form(*rep.spec())).unwrap();
        assert!(r <= 1e-9, "residual {r}");
    }
}
