use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use surfsym_core::abelian::{self, TangentVector};
use surfsym_core::cohomology;
use surfsym_core::goldman::{self, CochainPairing};
use surfsym_core::lie::{self, InvariantForm, LieGroupSpec};
use surfsym_core::linalg::{self, random_vector, CMatrix, CVector};
use surfsym_core::rep::{self, Representation};
use surfsym_core::surface_group::{self, Letter, SurfaceGroupPresentation, Word};
use surfsym_core::tol::{RankPolicy, FLAT_TOL};

fn word(genus: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..2 * genus, any::<bool>()), 0..max_len)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect()))
}

fn flat_sl2(seed: u64) -> Representation {
    rep::random_flat_representation(LieGroupSpec::sl(2), 2, seed, 0.5).expect("refinement converges")
}

fn cycle() -> goldman::BarTwoChain {
    goldman::fundamental_cycle(&SurfaceGroupPresentation::new(2).unwrap()).unwrap()
}

/// Applies `Ad(g)` to every generator block of a 1-cochain.
fn transport(rep: &Representation, g: &CMatrix, u: &CVector) -> CVector {
    let ad = lie::ad_matrix(rep.spec(), g).unwrap();
    let dim = rep.spec().dim();
    let mut out = u.clone();
    for j in 0..2 * rep.genus() {
        out.rows_mut(j * dim, dim).copy_from(&(&ad * u.rows(j * dim, dim)));
    }
    out
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn word_evaluation_is_a_homomorphism(seed in 0u64..10_000, u in word(2, 10), v in word(2, 10)) {
        let rep = rep::random_representation(LieGroupSpec::sl(2), 2, seed, 0.7).unwrap();
        let uv = surface_group::evaluate_word(&rep, &u.concat(&v)).unwrap();
        let split = surface_group::evaluate_word(&rep, &u).unwrap() * surface_group::evaluate_word(&rep, &v).unwrap();
        prop_assert!(linalg::frobenius(&(&uv - &split)) < 1e-9 * linalg::frobenius(&uv).max(1.0));
        let back = surface_group::evaluate_word(&rep, &u.concat(&u.inverse())).unwrap();
        prop_assert!(linalg::is_identity(&back, 1e-9));
    }

    #[test]
    fn fox_derivative_product_rule(seed in 0u64..10_000, u in word(2, 8), v in word(2, 8), j in 0usize..4) {
        let rep = rep::random_representation(LieGroupSpec::gl(2), 2, seed, 0.5).unwrap();
        let lhs = surface_group::fox_derivative(&rep, &u.concat(&v), j).unwrap();
        let ad_u = lie::ad_matrix(rep.spec(), &surface_group::evaluate_word(&rep, &u).unwrap()).unwrap();
        let rhs = surface_group::fox_derivative(&rep, &u, j).unwrap()
            + ad_u * surface_group::fox_derivative(&rep, &v, j).unwrap();
        prop_assert!(linalg::frobenius(&(&lhs - &rhs)) < 1e-8 * linalg::frobenius(&lhs).max(1.0));
    }

    #[test]
    fn crossed_homomorphism_identity(seed in 0u64..10_000, u in word(2, 8), v in word(2, 8)) {
        let rep = rep::random_representation(LieGroupSpec::sl(2), 2, seed, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_vector(&mut rng, rep.cochain_len());
        let whole = cohomology::extend_cocycle(&rep, &c, &u.concat(&v)).unwrap();
        let ad_u = lie::ad_matrix(rep.spec(), &surface_group::evaluate_word(&rep, &u).unwrap()).unwrap();
        let split = cohomology::extend_cocycle(&rep, &c, &u).unwrap() + ad_u * cohomology::extend_cocycle(&rep, &c, &v).unwrap();
        prop_assert!(linalg::vector_norm(&(&whole - &split)) < 1e-8 * linalg::vector_norm(&whole).max(1.0));
    }

    #[test]
    fn free_reduction_preserves_value(seed in 0u64..10_000, u in word(3, 16)) {
        let rep = rep::random_representation(LieGroupSpec::sl(3), 3, seed, 0.4).unwrap();
        let a = surface_group::evaluate_word(&rep, &u).unwrap();
        let b = surface_group::evaluate_word(&rep, &u.free_reduce()).unwrap();
        prop_assert!(linalg::frobenius(&(&a - &b)) < 1e-9 * linalg::frobenius(&a).max(1.0));
        prop_assert_eq!(Word::from_signed(&u.to_signed()).unwrap(), u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn conjugation_invariance(seed in 0u64..500, conj_seed in 0u64..10_000) {
        let rep = flat_sl2(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(conj_seed);
        let g = LieGroupSpec::sl(2).random_element(&mut rng, 0.6);
        let conj = rep::conjugate(&rep, &g).unwrap();
        prop_assert!(conj.residual() < 1e-8);
        let policy = RankPolicy::default();
        let a = cohomology::cohomology(&rep, FLAT_TOL, &policy).unwrap();
        let b = cohomology::cohomology(&conj, 1e-8, &policy).unwrap();
        prop_assert_eq!((a.h0, a.h1, a.h2), (b.h0, b.h1, b.h2));
        prop_assert_eq!(rep::irreducibility(&rep, &policy), rep::irreducibility(&conj, &policy));
    }

    #[test]
    fn pairing_is_natural_under_conjugation(seed in 0u64..500, conj_seed in 0u64..10_000) {
        let rep = flat_sl2(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(conj_seed);
        let g = LieGroupSpec::sl(2).random_element(&mut rng, 0.6);
        let conj = rep::conjugate(&rep, &g).unwrap();
        let spaces = cohomology::cohomology(&rep, FLAT_TOL, &RankPolicy::default()).unwrap();
        let form = InvariantForm::trace_form(LieGroupSpec::sl(2));
        let cyc = cycle();
        let w = CochainPairing::new(&rep, &cyc, &form).unwrap();
        let w_conj = CochainPairing::new(&conj, &cyc, &form).unwrap();
        let k = spaces.h1;
        let u = &spaces.representatives * random_vector(&mut rng, k);
        let v = &spaces.representatives * random_vector(&mut rng, k);
        let before = w.pair(&u, &v);
        let after = w_conj.pair(&transport(&rep, &g, &u), &transport(&rep, &g, &v));
        prop_assert!(rel_err(before, after) < 1e-8, "{} vs {}", before, after);
    }

    #[test]
    fn pairing_ignores_coboundaries(seed in 0u64..500, draw in 0u64..10_000) {
        let rep = flat_sl2(seed);
        let spaces = cohomology::cohomology(&rep, FLAT_TOL, &RankPolicy::default()).unwrap();
        let form = InvariantForm::trace_form(LieGroupSpec::sl(2));
        let w = CochainPairing::new(&rep, &cycle(), &form).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(draw);
        let u = &spaces.representatives * random_vector(&mut rng, spaces.h1);
        let v = &spaces.representatives * random_vector(&mut rng, spaces.h1);
        let s = random_vector(&mut rng, 3);
        let t = random_vector(&mut rng, 3);
        let shifted = w.pair(&(&u + spaces.coboundary(&s)), &(&v + spaces.coboundary(&t)));
        let scale = linalg::vector_norm(&u) * linalg::vector_norm(&v) * linalg::frobenius(w.matrix());
        prop_assert!((shifted - w.pair(&u, &v)).norm() < 1e-10 * scale);
    }

    #[test]
    fn doubling_the_form_doubles_both_pairings(seed in 0u64..500, draw in 0u64..10_000) {
        let rep = flat_sl2(seed);
        let spaces = cohomology::cohomology(&rep, FLAT_TOL, &RankPolicy::default()).unwrap();
        let spec = LieGroupSpec::sl(2);
        let cyc = cycle();
        let mut rng = ChaCha8Rng::seed_from_u64(draw);
        let u = &spaces.representatives * random_vector(&mut rng, spaces.h1);
        let v = &spaces.representatives * random_vector(&mut rng, spaces.h1);
        let one = goldman::goldman_pairing(&rep, &u, &v, &cyc, &InvariantForm::trace_form(spec)).unwrap();
        let two = goldman::goldman_pairing(&rep, &u, &v, &cyc, &InvariantForm::scaled(spec, 2.0)).unwrap();
        prop_assert!(rel_err(two, one * 2.0) < 1e-12);

        let periods = abelian::periods(&abelian::sample_curve(), 32).unwrap();
        let a = TangentVector::new(random_vector(&mut rng, 2), random_vector(&mut rng, 2));
        let b = TangentVector::new(random_vector(&mut rng, 2), random_vector(&mut rng, 2));
        let t1 = abelian::serre_pairing(&periods, &a, &b, 1.0).unwrap();
        let t2 = abelian::serre_pairing(&periods, &a, &b, 2.0).unwrap();
        prop_assert!(rel_err(t2, t1 * 2.0) < 1e-12);
    }

    #[test]
    fn serre_pairing_is_antisymmetric(draw in 0u64..10_000) {
        let periods = abelian::periods(&abelian::sample_curve(), 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(draw);
        let a = TangentVector::new(random_vector(&mut rng, 2), random_vector(&mut rng, 2));
        let b = TangentVector::new(random_vector(&mut rng, 2), random_vector(&mut rng, 2));
        let ab = abelian::serre_pairing(&periods, &a, &b, 1.0).unwrap();
        let ba = abelian::serre_pairing(&periods, &b, &a, 1.0).unwrap();
        prop_assert!((ab + ba).norm() < 1e-12 * ab.norm().max(1.0));
    }
}
