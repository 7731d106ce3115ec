//! The rank-one abelian model on hyperelliptic curves `y² = ∏(x − λᵢ)`:
//! holomorphic differentials, their periods, the Serre-duality pairing on
//! `H⁰(K) ⊕ H¹(𝒪)` and its comparison with the topological pairing of the
//! associated de Rham classes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::tol::{QUADRATURE_DRIFT_TOL, RIEMANN_RELATION_TOL};

/// Smallest accepted quadrature order.
pub const MIN_QUADRATURE_ORDER: usize = 16;

/// Default quadrature order.
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;

/// Minimum separation between branch points, and between a branch point and
/// an integration segment it does not bound.
pub const MIN_BRANCH_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct HyperellipticCurve {
    branch_points: Vec<Complex64>,
    experimental: bool,
}

impl HyperellipticCurve {
    /// Real branch points in any order; they are sorted.
    pub fn new(points: &[f64]) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidCurve("branch points must be finite".into()));
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let branch_points = sorted.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let curve = Self { branch_points, experimental: false };
        curve.validate()?;
        Ok(curve)
    }

    /// Complex branch points, integrated along the polyline through them in
    /// the given order. The path layout is not validated beyond clearance
    /// checks.
    pub fn new_experimental(points: &[Complex64]) -> Result<Self> {
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::InvalidCurve("branch points must be finite".into()));
        }
        let curve = Self { branch_points: points.to_vec(), experimental: true };
        curve.validate()?;
        let n = points.len();
        for k in 0..n - 1 {
            let (a, b) = (points[k], points[k + 1]);
            for (i, &p) in points.iter().enumerate() {
                if i != k && i != k + 1 && segment_distance(a, b, p) <= MIN_BRANCH_GAP {
                    return Err(Error::InvalidCurve(format!("branch point {i} lies on the integration path")));
                }
            }
        }
        Ok(curve)
    }

    fn validate(&self) -> Result<()> {
        let n = self.branch_points.len();
        if n % 2 == 1 {
            return Err(Error::InvalidCurve(format!("odd number of branch points ({n}) is not supported")));
        }
        if n < 6 {
            return Err(Error::InvalidCurve(format!("need at least 6 branch points for genus >= 2, got {n}")));
        }
        for i in 0..n {
            for j in i + 1..n {
                if (self.branch_points[i] - self.branch_points[j]).norm() <= MIN_BRANCH_GAP {
                    return Err(Error::InvalidCurve(format!("branch points {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    pub fn genus(&self) -> usize {
        self.branch_points.len() / 2 - 1
    }

    pub fn branch_points(&self) -> &[Complex64] {
        &self.branch_points
    }

    pub fn is_experimental(&self) -> bool {
        self.experimental
    }

    /// The same curve with every branch point multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        let points: Vec<_> = self.branch_points.iter().map(|p| p * t).collect();
        let curve = Self { branch_points: points, experimental: self.experimental };
        curve.validate()?;
        Ok(curve)
    }
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let s = ((p - a) * d.conj()).re / d.norm_sqr();
    let s = s.clamp(0.0, 1.0);
    (a + d * s - p).norm()
}

/// The differential `x^power dx / y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HolomorphicDifferential {
    pub power: usize,
}

impl fmt::Display for HolomorphicDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            0 => write!(f, "dx/y"),
            1 => write!(f, "x dx/y"),
            p => write!(f, "x^{p} dx/y"),
        }
    }
}

pub fn holomorphic_basis(curve: &HyperellipticCurve) -> Vec<HolomorphicDifferential> {
    (0..curve.genus()).map(|power| HolomorphicDifferential { power }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    A,
    B,
}

/// A homology cycle written as twice the sum of the path segments between the
/// listed pairs of branch-point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub kind: CycleKind,
    pub index: usize,
    pub segments: Vec<(usize, usize)>,
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            CycleKind::A => "A",
            CycleKind::B => "B",
        };
        write!(f, "{kind}{} = 2(", self.index + 1)?;
        for (n, (a, b)) in self.segments.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{},{}]", a + 1, b + 1)?;
        }
        write!(f, ")")
    }
}

/// Standard layout: `Aᵢ` circles `(λ_{2i−1}, λ_{2i})`, `Bᵢ` runs through the
/// gaps from `λ_{2i}` to `λ_{2g+1}`.
pub fn standard_cycles(genus: usize) -> (Vec<Cycle>, Vec<Cycle>) {
    let a =
        (0..genus).map(|i| Cycle { kind: CycleKind::A, index: i, segments: alloc::vec![(2 * i, 2 * i + 1)] }).collect();
    let b = (0..genus)
        .map(|i| Cycle { kind: CycleKind::B, index: i, segments: (i..genus).map(|m| (2 * m + 1, 2 * m + 2)).collect() })
        .collect();
    (a, b)
}

/// Standard symplectic intersection matrix in the order `A₁, B₁, …, A_g, B_g`.
pub fn standard_intersection(genus: usize) -> Vec<Vec<i32>> {
    let mut j = alloc::vec![alloc::vec![0; 2 * genus]; 2 * genus];
    for i in 0..genus {
        j[2 * i][2 * i + 1] = 1;
        j[2 * i + 1][2 * i] = -1;
    }
    j
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodData {
    genus: usize,
    a_cycles: Vec<Cycle>,
    b_cycles: Vec<Cycle>,
    /// `pi_a[(k, j)]`: period of the `j`-th differential over `A_k`.
    pi_a: CMatrix,
    pi_b: CMatrix,
    intersection: Vec<Vec<i32>>,
    order: usize,
    drift: f64,
    orientation: i8,
    relation_i: f64,
    relation_ii_eigenvalues: Vec<f64>,
}

impl PeriodData {
    /// Assembles period data from matrices and computes the bilinear-relation
    /// diagnostics. Invariants are not enforced here; see [`PeriodData::validate`].
    pub fn from_matrices(pi_a: CMatrix, pi_b: CMatrix, order: usize, drift: f64) -> Result<Self> {
        let genus = pi_a.nrows();
        if pi_a.shape() != (genus, genus) || pi_b.shape() != (genus, genus) {
            return Err(Error::DimensionMismatch { expected: genus, found: pi_b.nrows() });
        }
        let (a_cycles, b_cycles) = standard_cycles(genus);
        let mut data = Self {
            genus,
            a_cycles,
            b_cycles,
            pi_a,
            pi_b,
            intersection: standard_intersection(genus),
            order,
            drift,
            orientation: 1,
            relation_i: 0.0,
            relation_ii_eigenvalues: Vec::new(),
        };
        data.refresh();
        Ok(data)
    }

    fn refresh(&mut self) {
        let (a, b) = (&self.pi_a, &self.pi_b);
        let scale = (linalg::frobenius(a) * linalg::frobenius(b)).max(f64::MIN_POSITIVE);
        self.relation_i = linalg::frobenius(&(a.transpose() * b - b.transpose() * a)) / scale;
        let i = Complex64::new(0.0, 1.0);
        let h = (a.transpose() * b.conjugate() - b.transpose() * a.conjugate()) * i;
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let mut eig: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        self.relation_ii_eigenvalues = eig;
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn a_cycles(&self) -> &[Cycle] {
        &self.a_cycles
    }

    pub fn b_cycles(&self) -> &[Cycle] {
        &self.b_cycles
    }

    pub fn pi_a(&self) -> &CMatrix {
        &self.pi_a
    }

    pub fn pi_b(&self) -> &CMatrix {
        &self.pi_b
    }

    pub fn intersection(&self) -> &[Vec<i32>] {
        &self.intersection
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Largest relative period change when the quadrature order is doubled.
    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// `−1` when the B-cycles were reversed to make the second relation
    /// positive definite.
    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    /// `‖Π_Aᵀ Π_B − Π_Bᵀ Π_A‖ / (‖Π_A‖ ‖Π_B‖)`.
    pub fn relation_i_residual(&self) -> f64 {
        self.relation_i
    }

    /// Eigenvalues (ascending) of the Hermitian matrix
    /// `i(Π_Aᵀ conj Π_B − Π_Bᵀ conj Π_A)`.
    pub fn relation_ii_eigenvalues(&self) -> &[f64] {
        &self.relation_ii_eigenvalues
    }

    pub fn relation_ii_definite(&self) -> bool {
        let e = &self.relation_ii_eigenvalues;
        let big = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let floor = big * 1e-12;
        e.iter().all(|&x| x > floor) || e.iter().all(|&x| x < -floor)
    }

    /// Rejects data violating either bilinear relation or with singular `Π_A`.
    pub fn validate(&self) -> Result<()> {
        if self.relation_i > RIEMANN_RELATION_TOL {
            return Err(Error::DegeneratePeriods(format!("first bilinear relation residual {:e}", self.relation_i)));
        }
        if !self.relation_ii_definite() {
            return Err(Error::DegeneratePeriods("second bilinear relation is not definite".into()));
        }
        let sv = self.pi_a.singular_values();
        let max = sv.max();
        if sv.min().is_nan() || sv.min() <= max * 1e-12 {
            return Err(Error::DegeneratePeriods("A-period matrix is singular".into()));
        }
        Ok(())
    }

    /// Relabels the handles: handle `k` of the result is handle `perm[k]` of
    /// `self`. The A- and B-rows move together so the intersection matrix is
    /// unchanged.
    pub fn permute_handles(&self, perm: &[usize]) -> Result<Self> {
        let g = self.genus;
        let mut seen = alloc::vec![false; g];
        if perm.len() != g || perm.iter().any(|&p| p >= g || core::mem::replace(&mut seen[p], true)) {
            return Err(Error::DimensionMismatch { expected: g, found: perm.len() });
        }
        let mut out = self.clone();
        for (k, &p) in perm.iter().enumerate() {
            out.pi_a.set_row(k, &self.pi_a.row(p));
            out.pi_b.set_row(k, &self.pi_b.row(p));
            out.a_cycles[k] = Cycle { index: k, ..self.a_cycles[p].clone() };
            out.b_cycles[k] = Cycle { index: k, ..self.b_cycles[p].clone() };
        }
        out.refresh();
        Ok(out)
    }

    fn flip_b(&mut self) {
        self.pi_b = -&self.pi_b;
        self.orientation = -self.orientation;
        self.refresh();
    }
}

/// Value of `√(x − λ)` continued along the path: tracked as a modulus and
/// an argument per branch point.
struct PathIntegrator<'a> {
    points: &'a [Complex64],
    genus: usize,
}

impl PathIntegrator<'_> {
    /// Integrals of `x^{j} dx / y`, `j < g`, along every polyline segment
    /// `[λ_k, λ_{k+1}]`, with `y` continued from the start of the path.
    fn segment_integrals(&self, order: usize) -> Vec<Vec<Complex64>> {
        let pts = self.points;
        let n = pts.len();
        let start = pts[0];
        // Argument of (x − λ_i) at the current position, continued.
        let mut theta: Vec<f64> = pts
            .iter()
            .enumerate()
            .map(|(i, &p)| if i == 0 { (pts[1] - pts[0]).arg() } else { (start - p).arg() })
            .collect();

        // Gauss-Chebyshev nodes on [0, 1] for the weight 1/√(s(1−s)).
        let nodes: Vec<f64> =
            (0..order).map(|m| 0.5 * (1.0 - Float::cos((m as f64 + 0.5) * PI / order as f64))).collect();

        let mut out = Vec::with_capacity(n - 1);
        for k in 0..n - 1 {
            let (a, b) = (pts[k], pts[k + 1]);
            let d = b - a;
            let mut sums = alloc::vec![Complex64::new(0.0, 0.0); self.genus];
            for &s in &nodes {
                let x = a + d * s;
                let mut modulus = 1.0;
                let mut phase = theta[k] + theta[k + 1];
                for (i, &p) in pts.iter().enumerate() {
                    if i == k || i == k + 1 {
                        continue;
                    }
                    modulus *= Float::sqrt((x - p).norm());
                    phase += theta[i] + ((x - p) / (a - p)).arg();
                }
                let y_reduced = Complex64::from_polar(modulus, 0.5 * phase);
                let mut power = Complex64::new(1.0, 0.0);
                for sum in sums.iter_mut() {
                    *sum += power / y_reduced;
                    power *= x;
                }
            }
            // dx / √((x−a)(x−b)) with x = a + d s contributes d/|d| ds/√(s(1−s)).
            let factor = d / d.norm() * (PI / order as f64);
            out.push(sums.into_iter().map(|s| s * factor).collect());

            // Move to b: continue every argument along the segment, then turn.
            for (i, &p) in pts.iter().enumerate() {
                if i != k && i != k + 1 {
                    theta[i] += ((b - p) / (a - p)).arg();
                }
            }
            if k + 2 < n {
                let incoming = d.arg() + PI;
                let outgoing = (pts[k + 2] - b).arg();
                let mut turn = (incoming - outgoing) % (2.0 * PI);
                if turn < 0.0 {
                    turn += 2.0 * PI;
                }
                // Pass the vertex keeping it on the right.
                theta[k + 1] -= if turn == 0.0 { 2.0 * PI } else { turn };
            }
        }
        out
    }
}

fn period_matrices(curve: &HyperellipticCurve, order: usize) -> (CMatrix, CMatrix) {
    let g = curve.genus();
    let seg = PathIntegrator { points: curve.branch_points(), genus: g }.segment_integrals(order);
    let (a_cycles, b_cycles) = standard_cycles(g);
    let assemble = |cycles: &[Cycle]| {
        CMatrix::from_fn(g, g, |k, j| cycles[k].segments.iter().map(|&(s, _)| seg[s][j]).sum::<Complex64>() * 2.0)
    };
    (assemble(&a_cycles), assemble(&b_cycles))
}

/// Periods at quadrature orders `N` and `2N`; the `2N` values are returned
/// and the drift between the two is recorded.
pub fn periods(curve: &HyperellipticCurve, order: usize) -> Result<PeriodData> {
    if order < MIN_QUADRATURE_ORDER {
        return Err(Error::InvalidCurve(format!("quadrature order {order} below minimum {MIN_QUADRATURE_ORDER}")));
    }
    let (a1, b1) = period_matrices(curve, order);
    let (a2, b2) = period_matrices(curve, 2 * order);
    let scale = a2.iter().chain(b2.iter()).fold(0.0f64, |m, z| m.max(z.norm()));
    let drift = (&a1 - &a2).iter().chain((&b1 - &b2).iter()).fold(0.0f64, |m, z| m.max(z.norm()))
        / scale.max(f64::MIN_POSITIVE);
    if drift.is_nan() || drift > QUADRATURE_DRIFT_TOL {
        return Err(Error::QuadratureNotConverged { order, doubled: 2 * order, drift });
    }
    let mut data = PeriodData::from_matrices(a2, b2, order, drift)?;
    if data.relation_ii_eigenvalues.iter().all(|&x| x < 0.0) {
        data.flip_b();
    }
    data.validate()?;
    Ok(data)
}

/// A tangent vector to the abelian moduli space: coefficients of a
/// holomorphic form in the basis `x^{j−1}dx/y` and of an antiholomorphic
/// representative of `H¹(𝒪)` in the conjugate basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub holomorphic: CVector,
    pub antiholomorphic: CVector,
}

impl TangentVector {
    pub fn new(holomorphic: CVector, antiholomorphic: CVector) -> Self {
        Self { holomorphic, antiholomorphic }
    }

    /// The `i`-th of the `2g` coordinate vectors (holomorphic ones first).
    pub fn basis(genus: usize, i: usize) -> Self {
        let mut v = Self::new(CVector::zeros(genus), CVector::zeros(genus));
        if i < genus {
            v.holomorphic[i] = Complex64::new(1.0, 0.0);
        } else {
            v.antiholomorphic[i - genus] = Complex64::new(1.0, 0.0);
        }
        v
    }
}

/// A- and B-period vectors of a closed 1-form.
struct PeriodVector {
    a: CVector,
    b: CVector,
}

fn holomorphic_periods(p: &PeriodData, c: &CVector) -> PeriodVector {
    PeriodVector { a: &p.pi_a * c, b: &p.pi_b * c }
}

fn antiholomorphic_periods(p: &PeriodData, c: &CVector) -> PeriodVector {
    PeriodVector { a: p.pi_a.conjugate() * c, b: p.pi_b.conjugate() * c }
}

/// `∫α∧β = Σᵢ [Aᵢ(α)Bᵢ(β) − Bᵢ(α)Aᵢ(β)]`.
fn wedge(x: &PeriodVector, y: &PeriodVector) -> Complex64 {
    x.a.iter().zip(&x.b).zip(y.a.iter().zip(&y.b)).map(|((xa, xb), (ya, yb))| xa * yb - xb * ya).sum()
}

fn check_tangent(p: &PeriodData, v: &TangentVector) -> Result<()> {
    for part in [&v.holomorphic, &v.antiholomorphic] {
        if part.len() != p.genus {
            return Err(Error::DimensionMismatch { expected: p.genus, found: part.len() });
        }
    }
    Ok(())
}

/// `Θ(v, w) = c [∫η_v∧φ_w + ∫φ_v∧η_w]`, where `c` scales the invariant form.
pub fn serre_pairing(periods: &PeriodData, v: &TangentVector, w: &TangentVector, scale: f64) -> Result<Complex64> {
    periods.validate()?;
    check_tangent(periods, v)?;
    check_tangent(periods, w)?;
    let (eta_v, phi_v) =
        (holomorphic_periods(periods, &v.holomorphic), antiholomorphic_periods(periods, &v.antiholomorphic));
    let (eta_w, phi_w) =
        (holomorphic_periods(periods, &w.holomorphic), antiholomorphic_periods(periods, &w.antiholomorphic));
    Ok((wedge(&eta_v, &phi_w) + wedge(&phi_v, &eta_w)) * scale)
}

/// Gram matrix of `Θ` on the `2g` coordinate vectors.
pub fn serre_gram(periods: &PeriodData, scale: f64) -> Result<CMatrix> {
    let n = 2 * periods.genus;
    let basis: Vec<_> = (0..n).map(|i| TangentVector::basis(periods.genus, i)).collect();
    let mut gram = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = serre_pairing(periods, &basis[i], &basis[j], scale)?;
        }
    }
    Ok(gram)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullbackCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub relative_error: f64,
}

/// Compares `Θ(v, w)` with the topological pairing `c ∫α_v∧α_w` of the total
/// de Rham classes `α = η + φ`.
pub fn rh_pullback_check(
    periods: &PeriodData,
    v: &TangentVector,
    w: &TangentVector,
    scale: f64,
) -> Result<PullbackCheck> {
    let lhs = serre_pairing(periods, v, w, scale)?;
    let total = |t: &TangentVector| {
        let eta = holomorphic_periods(periods, &t.holomorphic);
        let phi = antiholomorphic_periods(periods, &t.antiholomorphic);
        PeriodVector { a: eta.a + phi.a, b: eta.b + phi.b }
    };
    let rhs = wedge(&total(v), &total(w)) * scale;
    let relative_error = (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300);
    Ok(PullbackCheck { lhs, rhs, relative_error })
}

/// Standard sample curve used by the checks.
pub fn sample_curve() -> HyperellipticCurve {
    HyperellipticCurve::new(&[-5.0, -3.0, -1.0, 1.0, 3.0, 5.0]).expect("valid sample curve")
}

/// Human-readable cycle list, A-cycles first.
pub fn describe_cycles(p: &PeriodData) -> Vec<String> {
    p.a_cycles.iter().chain(&p.b_cycles).map(|c| format!("{c}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_sizes_and_rejections() {
        let c = sample_curve();
        assert_eq!(c.genus(), 2);
        let basis = holomorphic_basis(&c);
        assert_eq!(basis.len(), 2);
        assert_eq!(format!("{}", basis[0]), "dx/y");
        assert_eq!(format!("{}", basis[1]), "x dx/y");
        let c3 = HyperellipticCurve::new(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).unwrap();
        assert_eq!(holomorphic_basis(&c3).len(), 3);
        assert!(HyperellipticCurve::new(&[0.0, 1.0, 2.0, 3.0, 4.0]).is_err());
        assert!(HyperellipticCurve::new(&[0.0, 1.0, 2.0, 3.0]).is_err());
        assert!(HyperellipticCurve::new(&[0.0, 1.0, 2.0, 3.0, 4.0, 4.0 + 1e-9]).is_err());
    }

    #[test]
    fn bilinear_relations_on_sample_curve() {
        let p = periods(&sample_curve(), DEFAULT_QUADRATURE_ORDER).unwrap();
        assert!(p.relation_i_residual() < 1e-12, "{}", p.relation_i_residual());
        assert!(p.relation_ii_eigenvalues().iter().all(|&e| e > 0.0));
        assert!(p.drift() < 1e-12);
        assert_eq!(p.orientation(), 1);
    }

    #[test]
    fn genus_three_relations() {
        let c = HyperellipticCurve::new(&[-4.0, -2.5, -1.0, 0.3, 1.0, 2.2, 3.5, 6.0]).unwrap();
        let p = periods(&c, DEFAULT_QUADRATURE_ORDER).unwrap();
        assert!(p.relation_i_residual() < 1e-10);
        assert!(p.relation_ii_definite());
    }

    #[test]
    fn low_order_reports_non_convergence() {
        let c = HyperellipticCurve::new(&[-5.0, -3.0, -1.0, -0.99, 3.0, 5.0]).unwrap();
        assert!(matches!(periods(&c, 16), Err(Error::QuadratureNotConverged { .. })));
        assert!(periods(&sample_curve(), 8).is_err());
    }

    #[test]
    fn scaling_branch_points() {
        let c = sample_curve();
        let t = 2.0;
        let p = periods(&c, 64).unwrap();
        let q = periods(&c.scaled(t).unwrap(), 64).unwrap();
        let g = c.genus() as i32;
        for k in 0..2 {
            for j in 0..2 {
                let factor = t.powi(j as i32 + 1 - g - 1);
                let expected = p.pi_a()[(k, j)] * factor;
                assert!((q.pi_a()[(k, j)] - expected).norm() < 1e-12 * expected.norm().max(1.0));
                let expected = p.pi_b()[(k, j)] * factor;
                assert!((q.pi_b()[(k, j)] - expected).norm() < 1e-12 * expected.norm().max(1.0));
            }
        }
    }

    #[test]
    fn relabeling_handles_permutes_rows() {
        let p = periods(&sample_curve(), 64).unwrap();
        let q = p.permute_handles(&[1, 0]).unwrap();
        for j in 0..2 {
            assert_eq!(q.pi_a()[(0, j)], p.pi_a()[(1, j)]);
            assert_eq!(q.pi_b()[(1, j)], p.pi_b()[(0, j)]);
        }
        assert!(q.validate().is_ok());
        assert!(p.permute_handles(&[0, 0]).is_err());
    }

    #[test]
    fn serre_pairing_structure() {
        let p = periods(&sample_curve(), 64).unwrap();
        let gram = serre_gram(&p, 1.0).unwrap();
        assert!(linalg::frobenius(&(&gram + gram.transpose())) < 1e-12 * linalg::frobenius(&gram));
        let sv = gram.singular_values();
        assert!(sv.min() > 1e-6 * sv.max());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = TangentVector::new(random_vector(&mut rng, 2), random_vector(&mut rng, 2));
        assert!(serre_pairing(&p, &v, &v, 1.0).unwrap().norm() < 1e-12);
        let w = TangentVector::new(random_vector(&mut rng, 2), CVector::zeros(2));
        let v0 = TangentVector::new(v.holomorphic.clone(), CVector::zeros(2));
        assert_eq!(serre_pairing(&p, &v0, &w, 1.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn pullback_identity_and_scaling() {
        let p = periods(&sample_curve(), 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let v = TangentVector::new(random_vector(&mut rng, 2), random_vector(&mut rng, 2));
            let w = TangentVector::new(random_vector(&mut rng, 2), random_vector(&mut rng, 2));
            let r1 = rh_pullback_check(&p, &v, &w, 1.0).unwrap();
            assert!(r1.relative_error < 1e-10);
            let r2 = rh_pullback_check(&p, &v, &w, 2.0).unwrap();
            assert!((r2.lhs - r1.lhs * 2.0).norm() < 1e-12 * r1.lhs.norm());
            assert!((r2.rhs - r1.rhs * 2.0).norm() < 1e-12 * r1.rhs.norm());
        }
    }

    #[test]
    fn degenerate_periods_rejected() {
        let p = PeriodData::from_matrices(linalg::identity(2), linalg::identity(2), 64, 0.0).unwrap();
        let v = TangentVector::basis(2, 0);
        assert!(matches!(serre_pairing(&p, &v, &v, 1.0), Err(Error::DegeneratePeriods(_))));
    }

    #[test]
    fn experimental_complex_points_near_real_layout() {
        let pts: Vec<Complex64> = [-5.0, -3.0, -1.0, 1.0, 3.0, 5.0]
            .iter()
            .enumerate()
            .map(|(i, &x)| Complex64::new(x, if i % 2 == 0 { 0.3 } else { -0.2 }))
            .collect();
        let c = HyperellipticCurve::new_experimental(&pts).unwrap();
        assert!(c.is_experimental());
        let p = periods(&c, 64).unwrap();
        assert!(p.relation_i_residual() < 1e-10, "{}", p.relation_i_residual());
        assert!(p.relation_ii_definite());
    }

    #[test]
    fn cycle_descriptions() {
        let p = periods(&sample_curve(), 64).unwrap();
        assert_eq!(describe_cycles(&p), ["A1 = 2([1,2])", "A2 = 2([3,4])", "B1 = 2([2,3] + [4,5])", "B2 = 2([4,5])"]);
    }
}
