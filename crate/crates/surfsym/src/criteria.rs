//! The acceptance criteria as runnable checks. Each criterion produces a list
//! of [`Check`]s plus free-form diagnostics; runtimes are measured by the
//! caller-facing [`run`].

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use surfsym_core::abelian::{self, PeriodData, TangentVector};
use surfsym_core::cohomology::{self, CohomologySpaces};
use surfsym_core::goldman::{self, BarTwoChain};
use surfsym_core::lie::{self, InvariantForm, LieGroupSpec};
use surfsym_core::linalg::{self, random_vector, CMatrix, CVector};
use surfsym_core::rep::{self, Irreducibility, Representation};
use surfsym_core::simplicial::{self, TriangulatedSurfaceComplex};
use surfsym_core::surface_group::SurfaceGroupPresentation;
use surfsym_core::tol::{self, RankPolicy};
use surfsym_core::Result;

use crate::report::Check;

/// Scale of the random starting points fed to the Gauss-Newton solver.
pub const SAMPLE_SCALE: f64 = 0.5;
/// Finite-difference steps of the closedness check.
pub const CLOSEDNESS_STEPS: [f64; 2] = [2e-3, 1e-3];
pub const CLOSEDNESS_TOL: f64 = 1e-4;
/// Minimum observed convergence order between the two closedness steps.
pub const CLOSEDNESS_MIN_ORDER: f64 = 1.8;
pub const DESCENT_TOL: f64 = 1e-10;
pub const NONDEGENERACY_TOL: f64 = 1e-6;
pub const PULLBACK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcceptanceConfig {
    pub seed: u64,
    pub flat_tol: f64,
    pub rank_tol: f64,
    pub pairing_tol: f64,
    pub quadrature_order: usize,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            flat_tol: tol::FLAT_TOL,
            rank_tol: tol::RANK_TOL,
            pairing_tol: tol::PAIRING_TOL,
            quadrature_order: abelian::DEFAULT_QUADRATURE_ORDER,
        }
    }
}

impl AcceptanceConfig {
    fn policy(&self) -> RankPolicy {
        RankPolicy::new(self.rank_tol)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub details: Value,
    pub error: Option<String>,
}

impl CriterionReport {
    pub fn first_failure(&self) -> Option<String> {
        if let Some(e) = &self.error {
            return Some(format!("numeric failure: {e}"));
        }
        crate::report::first_failure(&self.checks).map(|c| c.name.clone())
    }
}

#[derive(Debug, Clone)]
pub struct CriterionRun {
    pub report: CriterionReport,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CriterionRun {
    pub fn within_limit(&self) -> bool {
        self.elapsed <= self.limit
    }

    pub fn passed(&self) -> bool {
        self.report.passed && self.within_limit()
    }

    /// One-line summary, e.g. `criterion 3 PASS  oracle equivalence  (1.2 s / 60 s)`.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut line = format!(
            "criterion {} {verdict}  {}  ({:.2} s / {} s)",
            self.report.id,
            self.report.title,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        );
        if let Some(f) = self.report.first_failure() {
            line.push_str(&format!("  first failure: {f}"));
        } else if !self.within_limit() {
            line.push_str("  first failure: runtime limit");
        }
        line
    }
}

pub const CRITERIA: [(u32, &str, u64); 9] = [
    (1, "dimension formula", 10),
    (2, "Goldman form antisymmetry and nondegeneracy", 30),
    (3, "bar vs simplicial oracle equivalence", 60),
    (4, "descent and conjugation invariance", 30),
    (5, "abelian intersection form", 5),
    (6, "Riemann bilinear relations", 30),
    (7, "Serre pairing equals Goldman pairing on abelian classes", 30),
    (8, "closedness by finite differences", 300),
    (9, "reducibility detection", 10),
];

pub fn run(id: u32, cfg: &AcceptanceConfig) -> CriterionRun {
    let (_, title, limit) = CRITERIA.iter().copied().find(|c| c.0 == id).expect("known criterion id");
    let start = Instant::now();
    let outcome = match id {
        1 => dimension_formula(cfg),
        2 => goldman_properties(cfg),
        3 => oracle_equivalence(cfg),
        4 => descent_and_conjugation(cfg),
        5 => abelian_intersection(cfg),
        6 => riemann_relations(cfg),
        7 => pullback_identity(cfg),
        8 => closedness(cfg),
        9 => reducibility(cfg),
        _ => unreachable!(),
    };
    let elapsed = start.elapsed();
    let report = match outcome {
        Ok((checks, details)) => {
            CriterionReport { id, title, passed: checks.iter().all(|c| c.passed), checks, details, error: None }
        }
        Err(e) => CriterionReport {
            id,
            title,
            passed: false,
            checks: Vec::new(),
            details: Value::Null,
            error: Some(e.to_string()),
        },
    };
    CriterionRun { report, elapsed, limit: Duration::from_secs(limit) }
}

pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionRun> {
    CRITERIA.iter().map(|c| run(c.0, cfg)).collect()
}

type Outcome = Result<(Vec<Check>, Value)>;

fn cycle(genus: usize) -> Result<BarTwoChain> {
    goldman::fundamental_cycle(&SurfaceGroupPresentation::new(genus)?)
}

fn sample(spec: LieGroupSpec, genus: usize, seed: u64) -> Result<Representation> {
    rep::random_flat_representation(spec, genus, seed, SAMPLE_SCALE)
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// A random element of `Z¹`: a random combination of cohomology
/// representatives plus a random coboundary.
fn random_cocycle(spaces: &CohomologySpaces, rng: &mut ChaCha8Rng) -> CVector {
    &spaces.representatives * random_vector(rng, spaces.h1) + &spaces.delta0 * random_vector(rng, spaces.delta0.ncols())
}

fn dimension_formula(cfg: &AcceptanceConfig) -> Outcome {
    let cases = [(LieGroupSpec::sl(2), 2, 6usize), (LieGroupSpec::sl(2), 3, 12), (LieGroupSpec::torus(), 2, 4)];
    let mut checks = Vec::new();
    let mut details = Vec::new();
    for (spec, genus, expected) in cases {
        let mut observed = Vec::new();
        let mut matches = 0;
        for k in 0..5 {
            let seed = cfg.seed + k;
            let r = sample(spec, genus, seed)?;
            let irreducible = rep::is_irreducible(&r, &cfg.policy())?;
            let spaces = cohomology::cohomology(&r, cfg.flat_tol, &cfg.policy())?;
            if irreducible && spaces.h1 == expected {
                matches += 1;
            }
            observed.push(
                json!({"seed": seed, "irreducible": irreducible, "h0": spaces.h0, "h1": spaces.h1, "h2": spaces.h2}),
            );
        }
        let label = format!("{}({}) g={genus}", spec.kind().name(), spec.n());
        checks.push(Check::equals(format!("{label}: irreducible samples with h1 = {expected}"), matches as f64, 5.0));
        details.push(json!({"group": label, "expected_h1": expected, "samples": observed}));
    }
    Ok((checks, Value::Array(details)))
}

fn goldman_properties(cfg: &AcceptanceConfig) -> Outcome {
    let spec = LieGroupSpec::sl(2);
    let form = InvariantForm::trace_form(spec);
    let cyc = cycle(2)?;
    let mut worst_antisymmetry: f64 = 0.0;
    let mut worst_ratio = f64::INFINITY;
    let mut points = Vec::new();
    for k in 0..5 {
        let seed = cfg.seed + k;
        let r = sample(spec, 2, seed)?;
        if !rep::is_irreducible(&r, &cfg.policy())? {
            return Err(surfsym_core::Error::Reducible);
        }
        let spaces = cohomology::cohomology(&r, cfg.flat_tol, &cfg.policy())?;
        let m = goldman::goldman_matrix(&r, &spaces, &cyc, &form)?;
        let (a, s) = (m.antisymmetry_residual(), m.singular_ratio());
        worst_antisymmetry = worst_antisymmetry.max(a);
        worst_ratio = worst_ratio.min(s);
        points.push(json!({"seed": seed, "size": m.size(), "antisymmetry": a, "singular_ratio": s}));
    }
    Ok((
        vec![
            Check::at_most("antisymmetry |Ω+Ωᵀ|/|Ω|", worst_antisymmetry, cfg.pairing_tol),
            Check::at_least("singular value ratio", worst_ratio, NONDEGENERACY_TOL),
        ],
        Value::Array(points),
    ))
}

struct OracleStats {
    bar_vs_simplicial: f64,
    refinement_stability: f64,
    pairs: usize,
}

/// Compares the bar pairing with simplicial pairings at refinements 0 and 1 on
/// `pairs` random cocycle pairs.
pub fn oracle_statistics(r: &Representation, pairs: usize, seed: u64, cfg: &AcceptanceConfig) -> Result<Value> {
    let stats = oracle_stats(r, pairs, seed, cfg)?;
    Ok(json!({
        "pairs": stats.pairs,
        "max_relative_bar_vs_simplicial": stats.bar_vs_simplicial,
        "max_relative_refinement_0_vs_1": stats.refinement_stability,
    }))
}

fn oracle_stats(r: &Representation, pairs: usize, seed: u64, cfg: &AcceptanceConfig) -> Result<OracleStats> {
    let form = InvariantForm::trace_form(*r.spec());
    let cyc = cycle(r.genus())?;
    let spaces = cohomology::cohomology(r, cfg.flat_tol, &cfg.policy())?;
    let complexes: [TriangulatedSurfaceComplex; 2] =
        [simplicial::build_complex(r.genus(), 0)?, simplicial::build_complex(r.genus(), 1)?];
    let twisted = [
        simplicial::TwistedComplex::new(&complexes[0], r, &form)?,
        simplicial::TwistedComplex::new(&complexes[1], r, &form)?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = OracleStats { bar_vs_simplicial: 0.0, refinement_stability: 0.0, pairs };
    for _ in 0..pairs {
        let u = random_cocycle(&spaces, &mut rng);
        let v = random_cocycle(&spaces, &mut rng);
        let bar = goldman::goldman_pairing(r, &u, &v, &cyc, &form)?;
        let mut simp = [Complex64::new(0.0, 0.0); 2];
        for level in 0..2 {
            let f = simplicial::transport_cocycle(r, &u, &complexes[level])?;
            let h = simplicial::transport_cocycle(r, &v, &complexes[level])?;
            let scale = f.iter().chain(&h).map(linalg::vector_norm).fold(1.0, f64::max);
            for x in [&f, &h] {
                let residual = twisted[level].cocycle_residual(x);
                if residual > tol::COCYCLE_TOL * scale {
                    return Err(surfsym_core::Error::NotCocycle(residual));
                }
            }
            simp[level] = twisted[level].pairing(&f, &h);
        }
        stats.bar_vs_simplicial = stats.bar_vs_simplicial.max(relative(bar, simp[0])).max(relative(bar, simp[1]));
        stats.refinement_stability = stats.refinement_stability.max(relative(simp[0], simp[1]));
    }
    Ok(stats)
}

fn oracle_equivalence(cfg: &AcceptanceConfig) -> Outcome {
    let mut checks = Vec::new();
    let mut details = Vec::new();
    for spec in [LieGroupSpec::sl(2), LieGroupSpec::torus()] {
        for k in 0..2 {
            let seed = cfg.seed + k;
            let r = sample(spec, 2, seed)?;
            let stats = oracle_stats(&r, 100, seed, cfg)?;
            let label = format!("{}({}) seed {seed}", spec.kind().name(), spec.n());
            checks.push(Check::at_least(format!("{label}: random pairs"), stats.pairs as f64, 100.0));
            checks.push(Check::at_most(
                format!("{label}: bar vs simplicial"),
                stats.bar_vs_simplicial,
                cfg.pairing_tol,
            ));
            checks.push(Check::at_most(
                format!("{label}: refinement 0 vs 1"),
                stats.refinement_stability,
                cfg.pairing_tol,
            ));
            details.push(json!({
                "rep": label,
                "pairs": stats.pairs,
                "max_relative_bar_vs_simplicial": stats.bar_vs_simplicial,
                "max_relative_refinement_0_vs_1": stats.refinement_stability,
            }));
        }
    }
    Ok((checks, Value::Array(details)))
}

/// Applies `Ad(g)` blockwise to a 1-cochain.
fn transport_by(r: &Representation, g: &CMatrix, u: &CVector) -> Result<CVector> {
    let ad = lie::ad_matrix(r.spec(), g)?;
    let dim = r.spec().dim();
    let mut out = u.clone();
    for j in 0..2 * r.genus() {
        out.rows_mut(j * dim, dim).copy_from(&(&ad * u.rows(j * dim, dim)));
    }
    Ok(out)
}

fn descent_and_conjugation(cfg: &AcceptanceConfig) -> Outcome {
    let spec = LieGroupSpec::sl(2);
    let form = InvariantForm::trace_form(spec);
    let cyc = cycle(2)?;
    let mut descent: f64 = 0.0;
    let mut conjugation: f64 = 0.0;
    let mut instances = 0usize;
    for k in 0..5 {
        let seed = cfg.seed + k;
        let r = sample(spec, 2, seed)?;
        let spaces = cohomology::cohomology(&r, cfg.flat_tol, &cfg.policy())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..10 {
            let u = random_cocycle(&spaces, &mut rng);
            let v = random_cocycle(&spaces, &mut rng);
            let s = random_vector(&mut rng, spaces.delta0.ncols());
            let base = goldman::goldman_pairing(&r, &u, &v, &cyc, &form)?;
            let shifted = goldman::goldman_pairing(&r, &(&u + &spaces.delta0 * s), &v, &cyc, &form)?;
            descent = descent.max(relative(base, shifted));

            let g = spec.random_element(&mut rng, 0.6);
            let conj = rep::conjugate(&r, &g)?;
            let moved =
                goldman::goldman_pairing(&conj, &transport_by(&r, &g, &u)?, &transport_by(&r, &g, &v)?, &cyc, &form)?;
            conjugation = conjugation.max(relative(base, moved));
            instances += 1;
        }
    }
    Ok((
        vec![
            Check::at_least("random instances", instances as f64, 50.0),
            Check::at_most("descent ω(u+δ⁰s,v) vs ω(u,v)", descent, DESCENT_TOL),
            Check::at_most("conjugation transport", conjugation, cfg.pairing_tol),
        ],
        json!({"instances": instances, "max_relative_descent": descent, "max_relative_conjugation": conjugation}),
    ))
}

/// Goldman matrix at a ℂ* point of genus `genus`, normalized so that
/// `Ω[0][1]` is positive, together with the sign used.
pub fn abelian_goldman_matrix(genus: usize, seed: u64, cfg: &AcceptanceConfig) -> Result<(CMatrix, f64)> {
    let r = sample(LieGroupSpec::torus(), genus, seed)?;
    let spaces = cohomology::cohomology(&r, cfg.flat_tol, &cfg.policy())?;
    let m = goldman::goldman_matrix(&r, &spaces, &cycle(genus)?, &InvariantForm::trace_form(LieGroupSpec::torus()))?;
    let sign = if m.omega[(0, 1)].re < 0.0 { -1.0 } else { 1.0 };
    Ok((m.omega * Complex64::new(sign, 0.0), sign))
}

fn abelian_intersection(cfg: &AcceptanceConfig) -> Outcome {
    let (omega, sign) = abelian_goldman_matrix(2, cfg.seed, cfg)?;
    let expected = abelian::standard_intersection(2);
    let mut deviation: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            deviation = deviation.max((omega[(i, j)] - Complex64::new(expected[i][j] as f64, 0.0)).norm());
        }
    }
    Ok((
        vec![Check::equals("max |Ω − J| (exact)", deviation, 0.0)],
        json!({"sign": sign, "omega": crate::schema::matrix_rows(&omega)}),
    ))
}

fn sample_periods(cfg: &AcceptanceConfig) -> Result<PeriodData> {
    abelian::periods(&abelian::sample_curve(), cfg.quadrature_order)
}

fn riemann_relations(cfg: &AcceptanceConfig) -> Outcome {
    let p = sample_periods(cfg)?;
    Ok((
        vec![
            Check::at_most("relation I relative residual", p.relation_i_residual(), tol::RIEMANN_RELATION_TOL),
            Check::holds("relation II definite", p.relation_ii_definite()),
            Check::at_most("quadrature doubling drift", p.drift(), tol::QUADRATURE_DRIFT_TOL),
        ],
        json!({
            "quadrature_order": p.order(),
            "relation_i_residual": p.relation_i_residual(),
            "relation_ii_eigenvalues": p.relation_ii_eigenvalues(),
            "drift": p.drift(),
        }),
    ))
}

/// Largest relative error of `rh_pullback_check` over `pairs` random tangent
/// pairs, and the largest scaled `|rhs|` over pure-type pairs (where the
/// left side must vanish exactly).
pub struct PullbackStats {
    pub pairs: usize,
    pub max_relative_error: f64,
    pub pure_type_pairs: usize,
    pub pure_type_lhs_all_zero: bool,
    pub pure_type_max_scaled_rhs: f64,
}

fn period_norm(p: &PeriodData, v: &TangentVector) -> f64 {
    let eta = (p.pi_a() * &v.holomorphic, p.pi_b() * &v.holomorphic);
    let phi = (p.pi_a().conjugate() * &v.antiholomorphic, p.pi_b().conjugate() * &v.antiholomorphic);
    [eta.0 + phi.0, eta.1 + phi.1].iter().map(|x| linalg::vector_norm(x).powi(2)).sum::<f64>().sqrt()
}

pub fn pullback_stats(p: &PeriodData, pairs: usize, seed: u64) -> Result<PullbackStats> {
    let g = p.genus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_relative_error: f64 = 0.0;
    for _ in 0..pairs {
        let v = TangentVector::new(random_vector(&mut rng, g), random_vector(&mut rng, g));
        let w = TangentVector::new(random_vector(&mut rng, g), random_vector(&mut rng, g));
        max_relative_error = max_relative_error.max(abelian::rh_pullback_check(p, &v, &w, 1.0)?.relative_error);
    }
    let mut all_zero = true;
    let mut scaled_rhs: f64 = 0.0;
    let mut pure = 0;
    for holomorphic in [true, false] {
        for _ in 0..10 {
            let make = |rng: &mut ChaCha8Rng| {
                let x = random_vector(rng, g);
                if holomorphic {
                    TangentVector::new(x, CVector::zeros(g))
                } else {
                    TangentVector::new(CVector::zeros(g), x)
                }
            };
            let (v, w) = (make(&mut rng), make(&mut rng));
            let check = abelian::rh_pullback_check(p, &v, &w, 1.0)?;
            all_zero &= check.lhs == Complex64::new(0.0, 0.0);
            scaled_rhs = scaled_rhs.max(check.rhs.norm() / (period_norm(p, &v) * period_norm(p, &w)));
            pure += 1;
        }
    }
    Ok(PullbackStats {
        pairs,
        max_relative_error,
        pure_type_pairs: pure,
        pure_type_lhs_all_zero: all_zero,
        pure_type_max_scaled_rhs: scaled_rhs,
    })
}

pub fn pullback_checks(stats: &PullbackStats) -> Vec<Check> {
    vec![
        Check::at_least("random tangent pairs", stats.pairs as f64, 100.0),
        Check::at_most("pullback relative error", stats.max_relative_error, PULLBACK_TOL),
        Check::holds("pure-type Serre pairing exactly zero", stats.pure_type_lhs_all_zero),
        Check::at_most("pure-type wedge |rhs| / (|α_v||α_w|)", stats.pure_type_max_scaled_rhs, PULLBACK_TOL),
    ]
}

pub fn pullback_json(stats: &PullbackStats) -> Value {
    json!({
        "pairs": stats.pairs,
        "max_relative_error": stats.max_relative_error,
        "pure_type_pairs": stats.pure_type_pairs,
        "pure_type_lhs_all_zero": stats.pure_type_lhs_all_zero,
        "pure_type_max_scaled_rhs": stats.pure_type_max_scaled_rhs,
    })
}

fn pullback_identity(cfg: &AcceptanceConfig) -> Outcome {
    let p = sample_periods(cfg)?;
    let stats = pullback_stats(&p, 100, cfg.seed)?;
    Ok((pullback_checks(&stats), pullback_json(&stats)))
}

/// dω residuals at both closedness steps along representatives 0, 2 and 4
/// (or the first three if `h¹ < 5`).
pub fn closedness_residuals(r: &Representation, cfg: &AcceptanceConfig) -> Result<[f64; 2]> {
    let spaces = cohomology::cohomology(r, cfg.flat_tol, &cfg.policy())?;
    let picks = if spaces.h1 >= 5 { [0, 2, 4] } else { [0, 1, 2] };
    let directions = picks.map(|i| spaces.representative(i));
    let form = InvariantForm::trace_form(*r.spec());
    let cyc = cycle(r.genus())?;
    let mut out = [0.0; 2];
    for (slot, h) in out.iter_mut().zip(CLOSEDNESS_STEPS) {
        *slot = goldman::closedness_residual(r, &directions, h, &cyc, &form)?;
    }
    Ok(out)
}

pub fn closedness_checks(residuals: [f64; 2]) -> (Vec<Check>, f64) {
    let order = (residuals[0] / residuals[1]).log2();
    (
        vec![
            Check::at_most(format!("dω residual at h = {:e}", CLOSEDNESS_STEPS[1]), residuals[1], CLOSEDNESS_TOL),
            Check::at_least("observed convergence order", order, CLOSEDNESS_MIN_ORDER),
        ],
        order,
    )
}

fn closedness(cfg: &AcceptanceConfig) -> Outcome {
    let r = sample(LieGroupSpec::sl(2), 2, cfg.seed)?;
    if !rep::is_irreducible(&r, &cfg.policy())? {
        return Err(surfsym_core::Error::Reducible);
    }
    let residuals = closedness_residuals(&r, cfg)?;
    let (checks, order) = closedness_checks(residuals);
    Ok((checks, json!({"seed": cfg.seed, "steps": CLOSEDNESS_STEPS, "residuals": residuals, "observed_order": order})))
}

fn reducibility(cfg: &AcceptanceConfig) -> Outcome {
    let spec = LieGroupSpec::sl(2);
    let mut reducible = 0;
    let mut irreducible = 0;
    let mut worst_residual: f64 = 0.0;
    for k in 0..20 {
        let seed = cfg.seed + k;
        let b = rep::block_triangular_representation(spec, 2, seed, SAMPLE_SCALE)?;
        worst_residual = worst_residual.max(b.residual());
        if rep::irreducibility(&b, &cfg.policy()) == Irreducibility::Reducible {
            reducible += 1;
        }
        let r = sample(spec, 2, seed)?;
        if rep::irreducibility(&r, &cfg.policy()) == Irreducibility::Irreducible {
            irreducible += 1;
        }
    }
    Ok((
        vec![
            Check::equals("block-triangular flagged reducible", reducible as f64, 20.0),
            Check::equals("refined random flagged irreducible", irreducible as f64, 20.0),
            Check::at_most("block-triangular relation residual", worst_residual, cfg.flat_tol),
        ],
        json!({"reducible": reducible, "irreducible": irreducible}),
    ))
}
