use std::sync::Arc;

use super::*;
use crate::algebra::characters;
use crate::exec::ExecutionMode;
use crate::group::{FiniteGroup, Subgroup};
use crate::markov::Distribution;
use crate::scalar::Cyclotomic;
use crate::shuffles::{self, weight_from};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn id(g: &Arc<FiniteGroup>, s: &str) -> usize {
    g.parse_element(s).unwrap()
}

fn sym4_problem() -> (Arc<FiniteGroup>, LumpingProblem) {
    let g = shuffles::sym4();
    let p = LumpingProblem::new(&shuffles::top_card_subgroup(&g)).unwrap();
    (g, p)
}

fn eta_t(g: &Arc<FiniteGroup>) -> Element<Rational> {
    Element::eta_subgroup(&shuffles::middle_swap_subgroup(g))
}

fn primed(g: &Arc<FiniteGroup>, lambda: Rational) -> Weight {
    let w = shuffles::frustrating_shuffle(g, &lambda);
    Weight::new(eta_t(g).convolve(&w).unwrap()).unwrap()
}

/// Uniform on `{sigma, sigma^2, tau}`: irreducible, not weakly lumping.
fn dihedral_bad_weight(d10: &Arc<FiniteGroup>) -> Weight {
    let sigma = id(d10, "(1,2,3,4,5)");
    let tau = id(d10, "(2,5)(3,4)");
    let ids = [sigma, d10.mul(sigma, sigma), tau];
    let terms: Vec<(Rational, usize)> = ids.iter().map(|&i| (q(1, 3), i)).collect();
    Weight::new(Element::from_terms(d10, &terms)).unwrap()
}

#[test]
fn card_shuffles_strong_exact() {
    let (g, p) = sym4_problem();
    assert!(p.test_strong(&shuffles::random_to_top(&g)).unwrap().is_none());
    assert!(p.test_exact(&shuffles::random_to_top(&g)).unwrap().is_some());
    assert!(p.test_exact(&shuffles::top_to_random(&g)).unwrap().is_none());
    assert!(p.test_strong(&shuffles::top_to_random(&g)).unwrap().is_some());
    for lambda in [q(1, 4), q(3, 4), q(1, 1)] {
        let w = shuffles::frustrating_shuffle(&g, &lambda);
        assert!(p.test_strong(&w).unwrap().is_some());
        assert!(p.test_exact(&w).unwrap().is_some());
        assert!(p.test_weak_weight(&w).unwrap().holds, "lambda {lambda}");
        let report = p.analyze(&w).unwrap();
        assert_eq!((report.strong, report.exact, report.weak), (false, false, Some(true)));
        assert_eq!(report.stable_ideal_dim, Some(12));
    }
    assert!(p.test_strong(&primed(&g, q(3, 4))).unwrap().is_none());
}

#[test]
fn hecke_weights_lump_both_ways() {
    let (g, p) = sym4_problem();
    let eta = Element::eta_subgroup(p.subgroup());
    let w = shuffles::frustrating_shuffle(&g, &q(1, 2));
    let hwh = Weight::new(eta.convolve(&w).unwrap().convolve(&eta).unwrap()).unwrap();
    assert!(p.test_strong(&hwh).unwrap().is_none());
    assert!(p.test_exact(&hwh).unwrap().is_none());
    assert_eq!(p.compute_lw(&hwh).unwrap(), p.ideal_of(&eta));
}

#[test]
fn violation_certificate() {
    let (g, p) = sym4_problem();
    let v = p.test_strong(&shuffles::top_to_random(&g)).unwrap().unwrap();
    assert_eq!(v.double_coset, 1);
    let sums = shuffles::top_to_random(&g).coset_sums(p.left_cosets());
    assert_ne!(sums[v.first], sums[v.second]);
}

#[test]
fn minimal_ideal_for_frustrating_shuffle() {
    let (g, p) = sym4_problem();
    let target = p.ideal_of(&eta_t(&g));
    assert_eq!(target.dim(), 12);
    for lambda in [q(1, 4), q(1, 2), q(3, 4)] {
        let lw = p.compute_lw(&shuffles::frustrating_shuffle(&g, &lambda)).unwrap();
        assert_eq!(lw, target);
    }
    assert_eq!(p.compute_lw(&primed(&g, q(1, 3))).unwrap(), target);
}

#[test]
fn first_projection_of_the_iteration() {
    let (g, p) = sym4_problem();
    let w = shuffles::frustrating_shuffle(&g, &q(3, 4));
    let eta_w = Element::eta_subgroup(p.subgroup()).convolve(&w).unwrap();
    let c = p.left_cosets().coset_of[id(&g, "(1,2)")];
    let piece = eta_w.project_coset(c, p.left_cosets()).normalized().unwrap();
    let expected = Element::from_terms(&g, &[(q(1, 2), id(&g, "(1,4,2)")), (q(1, 2), id(&g, "(1,4,3,2)"))]);
    assert_eq!(piece, expected);
}

#[test]
fn maximal_ideal_and_trace() {
    let (g, p) = sym4_problem();
    let (jw, trace) = p.compute_jw(&shuffles::frustrating_shuffle(&g, &q(3, 4))).unwrap();
    assert_eq!(jw, p.ideal_of(&eta_t(&g)));
    assert_eq!(trace.a_circ[0], 5);
    assert_eq!(trace.b_circ[0], 3);
    assert_eq!(trace.a_circ[1], 2);
    assert_eq!(*trace.a_circ.last().unwrap(), 2);

    let (full, _) = p.compute_jw(&primed(&g, q(3, 4))).unwrap();
    assert_eq!(full.dim(), 24);
}

#[test]
fn maximal_ideal_contains_minimal() {
    let (g, p) = sym4_problem();
    for w in [shuffles::random_to_top(&g), shuffles::top_to_random(&g), shuffles::frustrating_shuffle(&g, &q(1, 3))] {
        let lw = p.compute_lw(&w).unwrap();
        let (jw, _) = p.compute_jw(&w).unwrap();
        assert!(lw.local().is_subspace_of(jw.local()));
    }
    // strong iff J_w is everything
    let (jw, _) = p.compute_jw(&shuffles::random_to_top(&g)).unwrap();
    assert_eq!(jw.dim(), 24);
    // exact iff L_w = C[G] eta_H
    let lw = p.compute_lw(&shuffles::top_to_random(&g)).unwrap();
    assert_eq!(lw.dim(), 4);
}

#[test]
fn initial_distribution_verdicts() {
    let (g, p) = sym4_problem();
    let w = shuffles::frustrating_shuffle(&g, &q(3, 4));
    let t = shuffles::middle_swap_subgroup(&g);
    assert!(p.test_weak_distribution(&w, &Distribution::uniform(24)).unwrap());
    assert!(p.test_weak_distribution(&w, &Distribution::uniform_on(24, t.members()).unwrap()).unwrap());
    assert!(!p.test_weak_distribution(&w, &Distribution::point(24, 0)).unwrap());
    // not weakly lumping at all: every distribution fails
    let d10 = shuffles::dihedral10();
    let pd = LumpingProblem::new(&shuffles::dihedral_reflection_subgroup(&d10)).unwrap();
    let bad = dihedral_bad_weight(&d10);
    assert!(!pd.test_weak_distribution(&bad, &Distribution::uniform(10)).unwrap());
}

#[test]
fn ideal_containing_a_distribution() {
    let (g, p) = sym4_problem();
    let w = shuffles::frustrating_shuffle(&g, &q(3, 4));
    let lw = p.compute_lw(&w).unwrap();
    assert_eq!(p.compute_l_alpha_w(&w, &Distribution::uniform(24)).unwrap().ideal, lw);

    let t = shuffles::middle_swap_subgroup(&g);
    let v = p.compute_l_alpha_w(&w, &Distribution::uniform_on(24, t.members()).unwrap()).unwrap();
    assert!(v.holds);
    assert_eq!(v.ideal, p.ideal_of(&eta_t(&g)));

    let v = p.compute_l_alpha_w(&w, &Distribution::point(24, 0)).unwrap();
    assert!(!v.holds);
    assert!(v.ideal.dim() > 12);
    let (u, c) = v.certificate.unwrap();
    assert!(v.ideal.local().contains(&u));
    assert!(c < 4);
}

#[test]
fn reducible_weights_are_refused() {
    let (g, p) = sym4_problem();
    let w = weight_from(&g, &[(q(1, 2), "()"), (q(1, 2), "(2,3)")]);
    assert!(matches!(p.compute_lw(&w), Err(Error::Domain(_))));
    assert!(matches!(p.test_weak_weight(&w), Err(Error::Domain(_))));
    assert!(matches!(p.compute_jw(&w), Err(Error::Domain(_))));
    // strong and exact do not need irreducibility
    assert!(p.test_strong(&w).unwrap().is_none());
    assert!(p.test_exact(&w).unwrap().is_none());
    let report = p.analyze(&w).unwrap();
    assert_eq!(report.weak, Some(true));
}

#[test]
fn maximal_ideal_needs_weak_lumping() {
    let d10 = shuffles::dihedral10();
    let p = LumpingProblem::new(&shuffles::dihedral_reflection_subgroup(&d10)).unwrap();
    let bad = dihedral_bad_weight(&d10);
    assert!(!p.test_weak_weight(&bad).unwrap().holds);
    assert!(matches!(p.compute_jw(&bad), Err(Error::Domain(_))));
    let report = p.analyze(&bad).unwrap();
    assert_eq!(report.weak, Some(false));
    assert!(report.certificate.is_some());
    assert!(report.lumped_matrix.is_none());
}

#[test]
fn stable_ideal_checks() {
    let (g, p) = sym4_problem();
    let w = shuffles::frustrating_shuffle(&g, &q(3, 4));
    assert!(p.stable_ideal_check(&w, &eta_t(&g)).unwrap().holds());
    let at_eta_h = p.stable_ideal_check(&w, &Element::<Rational>::eta_subgroup(p.subgroup())).unwrap();
    assert!(!at_eta_h.holds());
    assert!(!at_eta_h.ideal_closed);
    assert!(at_eta_h.circ_closed);
    assert!(p.stable_ideal_check(&w, &Element::<Rational>::one(&g)).unwrap().holds() == p.test_strong(&w).unwrap().is_none());
    let not_idempotent = Element::<Rational>::delta(&g, id(&g, "(2,3)"));
    assert!(matches!(p.stable_ideal_check(&w, &not_idempotent), Err(Error::Domain(_))));
}

#[test]
fn die_stable_ideal() {
    let g = shuffles::sym4();
    let p = LumpingProblem::new(&shuffles::die_subgroup(&g)).unwrap();
    let table = characters(p.subgroup()).unwrap();
    let e = &(&table.idempotent(0) + &table.idempotent(1)) + &table.idempotent(3);
    let w = shuffles::die_weight(&g);
    assert!(p.stable_ideal_check(&w, &e).unwrap().holds());
    assert!(p.test_weak_weight(&w).unwrap().holds);
    assert!(p.test_strong(&w).unwrap().is_some());
    assert!(p.test_exact(&w).unwrap().is_some());
}

#[test]
fn dual_idempotents() {
    let (g, p) = sym4_problem();
    let eta_h = Element::<Rational>::eta_subgroup(p.subgroup());
    let one = Element::<Rational>::one(&g);
    assert_eq!(p.dual_idempotent(&eta_h).unwrap(), one);
    assert_eq!(p.dual_idempotent(&one).unwrap(), eta_h);
    let dual = p.dual_idempotent(&eta_t(&g)).unwrap();
    assert_eq!(dual, &(&one - &eta_t(&g)) + &eta_h);
    assert!(dual.in_e_bullet(p.subgroup()));
    let reversed = shuffles::frustrating_shuffle_reversed(&g, &q(3, 4));
    assert!(p.stable_ideal_check(&reversed, &dual).unwrap().holds());
    assert!(!p.stable_ideal_check(&reversed, &eta_t(&g)).unwrap().holds());
}

#[test]
fn interpolation_for_bottom_card_shuffle() {
    let (g, w) = shuffles::bottom_card_shuffle(4);
    let p = LumpingProblem::new(&shuffles::top_card_subgroup(&g)).unwrap();
    let t = shuffles::top_and_bottom_subgroup(&g);
    assert_eq!(t.order(), 2);
    assert!(p.interpolation_test(&t, &w).unwrap().holds());
    assert!(p.test_weak_weight(&w).unwrap().holds);
    assert!(p.test_strong(&w).unwrap().is_some());
    assert!(p.test_exact(&w).unwrap().is_some());
    let outside = Subgroup::stabilizer(&g, &[1]);
    assert!(matches!(p.interpolation_test(&outside, &w), Err(Error::Domain(_))));
}

#[test]
fn interpolation_extremes() {
    let (g, p) = sym4_problem();
    let trivial = Subgroup::from_ids(&g, &[]);
    for w in [
        shuffles::random_to_top(&g),
        shuffles::top_to_random(&g),
        shuffles::frustrating_shuffle(&g, &q(1, 2)),
        primed(&g, q(1, 2)),
    ] {
        assert_eq!(p.interpolation_test(p.subgroup(), &w).unwrap().holds(), p.test_exact(&w).unwrap().is_none());
        assert_eq!(p.interpolation_test(&trivial, &w).unwrap().holds(), p.test_strong(&w).unwrap().is_none());
    }
}

#[test]
fn lumped_matrix_is_uniform() {
    let (g, p) = sym4_problem();
    let q_mat = p.lumped_matrix(&shuffles::frustrating_shuffle(&g, &q(3, 4))).unwrap();
    for row in q_mat {
        assert!(row.iter().all(|x| *x == q(1, 4)));
    }
}

#[test]
fn theta_dimensions() {
    let (_, p) = sym4_problem();
    let eta = Element::<Rational>::eta_subgroup(p.subgroup());
    for mode in [ExecutionMode::Sequential, ExecutionMode::Parallel] {
        let d = theta_dimension(&p, &eta, mode).unwrap();
        assert_eq!(d.total, 22);
        assert_eq!(d.per_double_coset.iter().sum::<usize>(), 22);
    }
    assert_eq!(theta_dimension_direct(&p, &eta).unwrap(), 22);

    let g = shuffles::sym4();
    let die = LumpingProblem::new(&shuffles::die_subgroup(&g)).unwrap();
    let mut sizes = die.double_cosets().sizes.clone();
    sizes.sort();
    assert_eq!(sizes, vec![4, 4, 16]);
    let table = characters(die.subgroup()).unwrap();
    let one = Element::<Cyclotomic>::one(&g);
    let eta = table.idempotent(0);
    let e_p = &(&table.idempotent(0) + &table.idempotent(1)) + &table.idempotent(3);
    for (e, expected) in [(one, 21), (eta, 21), (e_p, 19)] {
        let d = theta_dimension(&die, &e, ExecutionMode::default()).unwrap();
        assert_eq!(d.total, expected);
        assert_eq!(theta_dimension_direct(&die, &e).unwrap(), expected);
    }
    // |H\G/H| + |G| - [G:H]
    assert_eq!(3 + 24 - 6, 21);
}

#[test]
fn theta_dimension_rejects_non_idempotents() {
    let (g, p) = sym4_problem();
    assert!(theta_dimension(&p, &Element::<Rational>::zero(&g), ExecutionMode::Sequential).is_err());
}

#[test]
fn abelian_witnesses() {
    let g = shuffles::sym4();
    let p = LumpingProblem::new(&shuffles::die_subgroup(&g)).unwrap();
    let w = shuffles::die_weight(&g);
    let v = abelian_weak_test(&p, &w, SubsetMode::All, ExecutionMode::default()).unwrap();
    assert!(v.holds);
    assert_eq!(v.witness, Some(vec![0, 1, 3]));
    let e = v.idempotent.unwrap();
    assert!(p.stable_ideal_check(&w, &e).unwrap().holds());

    let star = w.star();
    let v = abelian_weak_test(&p, &star, SubsetMode::All, ExecutionMode::Sequential).unwrap();
    assert!(v.holds);
    assert_eq!(v.witness, Some(vec![0, 2]));

    let real = abelian_weak_test(&p, &w, SubsetMode::RealOnly, ExecutionMode::Sequential).unwrap();
    assert_eq!(real.witness, Some(vec![0, 1, 3]));
    assert!(real.subsets_tried < 8);
}

#[test]
fn abelian_test_fails_for_perturbed_die() {
    let g = shuffles::sym4();
    let p = LumpingProblem::new(&shuffles::die_subgroup(&g)).unwrap();
    let mut e = shuffles::die_weight(&g).into_element();
    let x = id(&g, "(1,2)");
    e.set_coeff(x, e.coeff(x) + &q(1, 12));
    let w = Weight::new(e).unwrap();
    let v = abelian_weak_test(&p, &w, SubsetMode::All, ExecutionMode::Sequential).unwrap();
    assert!(!v.holds);
    assert!(!p.test_weak_weight(&w).unwrap().holds);
}

#[test]
fn abelian_test_needs_abelian_subgroup() {
    let (g, p) = sym4_problem();
    let w = shuffles::random_to_top(&g);
    assert!(matches!(abelian_weak_test(&p, &w, SubsetMode::All, ExecutionMode::Sequential), Err(Error::Domain(_))));
}

#[test]
fn dihedral_small_subgroup() {
    let d10 = shuffles::dihedral10();
    let p = LumpingProblem::new(&shuffles::dihedral_reflection_subgroup(&d10)).unwrap();
    let sigma = id(&d10, "(1,2,3,4,5)");
    let tau = id(&d10, "(2,5)(3,4)");
    let sigma_inv = d10.inv(sigma);
    let uniform = |ids: &[usize]| {
        let c = q(1, ids.len() as i64);
        let terms: Vec<(Rational, usize)> = ids.iter().map(|&i| (c.clone(), i)).collect();
        Weight::new(Element::from_terms(&d10, &terms)).unwrap()
    };
    // mass 1 on sigma H and 0 on tau sigma H = sigma^-1 H: constant on right cosets only
    let left = uniform(&[sigma, d10.mul(sigma, tau)]);
    let right = uniform(&[sigma, d10.mul(tau, sigma)]);
    let both = uniform(&[d10.mul(sigma, tau), d10.mul(sigma_inv, tau)]);
    assert_eq!(p.small_subgroup_verdict(&left).unwrap(), SmallVerdict::Exact);
    assert_eq!(p.small_subgroup_verdict(&right).unwrap(), SmallVerdict::Strong);
    assert_eq!(p.small_subgroup_verdict(&both).unwrap(), SmallVerdict::StrongAndExact);
    // row sums equal on the right cosets of H sigma H, so this one is exact
    let exact = uniform(&[sigma, d10.mul(sigma, tau), tau]);
    assert_eq!(p.small_subgroup_verdict(&exact).unwrap(), SmallVerdict::Exact);
    assert_eq!(p.small_subgroup_verdict(&dihedral_bad_weight(&d10)).unwrap(), SmallVerdict::NotWeak);

    let (g, p4) = sym4_problem();
    assert!(matches!(p4.small_subgroup_verdict(&shuffles::random_to_top(&g)), Err(Error::Domain(_))));
}

#[test]
fn weight_from_another_group_is_rejected() {
    let (_, p) = sym4_problem();
    let other = shuffles::sym4();
    assert!(matches!(p.test_strong(&shuffles::random_to_top(&other)), Err(Error::Domain(_))));
}

mod chains {
    use proptest::prelude::*;

    use super::*;
    use crate::group::{cosets, Side};
    use crate::markov::{
        conditional_distribution, lumped_transition_matrix, sequence_probability, stationary_distribution,
        transition_from_weight, LumpingFunction,
    };

    fn random_weight(g: &Arc<FiniteGroup>, terms: &[(usize, i64)]) -> Element<Rational> {
        let mut w = Element::<Rational>::zero(g);
        for &(x, c) in terms {
            let x = x % g.order();
            w.set_coeff(x, w.coeff(x).add(&Rational::from_int(c)));
        }
        w
    }

    fn terms() -> impl Strategy<Value = Vec<(usize, i64)>> {
        prop::collection::vec((0usize..24, 1i64..4), 1..6)
    }

    fn lumps(p: &LumpingProblem) -> LumpingFunction {
        LumpingFunction::from_cosets(&cosets(p.subgroup(), Side::Left))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        // strong lumping: the future lumps depend on the present only through its lump
        #[test]
        fn strong_future_forgets_the_state(t in terms(), path in prop::collection::vec(0usize..4, 3)) {
            let (g, p) = sym4_problem();
            let eta = Element::eta_subgroup(p.subgroup());
            let w = Weight::new(eta.convolve(&random_weight(&g, &t)).unwrap().normalized().unwrap()).unwrap();
            prop_assert!(p.test_strong(&w).unwrap().is_none());
            let f = lumps(&p);
            let chain = transition_from_weight(&w);
            let b = path[0];
            let probs: Vec<Rational> = f
                .members(b)
                .iter()
                .map(|&x| sequence_probability(&f, &chain, &Distribution::point(24, x), &path))
                .collect();
            prop_assert!(probs.iter().all(|v| *v == probs[0]));
        }

        // exact lumping: starting uniform within lumps, the state is uniform on the observed lump
        #[test]
        fn exact_state_is_uniform_on_its_lump(
            t in terms(),
            mass in prop::collection::vec(1i64..5, 4),
            path in prop::collection::vec(0usize..4, 1..4),
        ) {
            let (g, p) = sym4_problem();
            let eta = Element::eta_subgroup(p.subgroup());
            let w = Weight::new(random_weight(&g, &t).convolve(&eta).unwrap().normalized().unwrap()).unwrap();
            prop_assert!(p.test_exact(&w).unwrap().is_none());
            let f = lumps(&p);
            let chain = transition_from_weight(&w);
            let total: i64 = mass.iter().sum::<i64>() * 6;
            let alpha = Distribution::new((0..24).map(|x| Rational::new(mass[f.lump_of(x)], total)).collect()).unwrap();
            if sequence_probability(&f, &chain, &alpha, &path).is_zero() {
                return Ok(());
            }
            let law = conditional_distribution(&f, &chain, &alpha, &path).unwrap();
            let last = *path.last().unwrap();
            for &x in f.members(last) {
                prop_assert_eq!(&law.probabilities()[x], &Rational::new(1, 6));
            }
        }

        // weak lumping: every start in the stable ideal sees the same lumped matrix
        #[test]
        fn lumped_matrix_is_constant_on_the_stable_ideal(
            mix in prop::collection::vec((0usize..24, 1i64..4), 1..5),
            lambda in 1i64..4,
            steps in 0usize..3,
        ) {
            let (g, p) = sym4_problem();
            let w = shuffles::frustrating_shuffle(&g, &q(lambda, 4));
            let f = lumps(&p);
            let chain = transition_from_weight(&w);
            let q_stat = lumped_transition_matrix(&f, &chain, &stationary_distribution(&chain).unwrap()).unwrap();
            let mut alpha = Element::<Rational>::zero(&g);
            for (x, c) in &mix {
                let piece = Element::delta(&g, *x).convolve(&eta_t(&g)).unwrap().scale(&Rational::from_int(*c));
                alpha = alpha.try_add(&piece).unwrap();
            }
            let mut v = alpha.normalized().unwrap().into_coeffs();
            for _ in 0..steps {
                v = chain.apply(&v);
            }
            let lumped = lumped_transition_matrix(&f, &chain, &Distribution::new(v).unwrap()).unwrap();
            for (row, expected) in lumped.rows.iter().zip(&q_stat.rows) {
                if let Some(row) = row {
                    prop_assert_eq!(Some(row), expected.as_ref());
                }
            }
        }
    }
}
