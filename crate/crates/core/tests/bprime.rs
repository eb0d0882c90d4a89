use std::sync::Arc;

use ncprob_core::bprime::*;
use ncprob_core::indep::*;
use ncprob_core::moments::{all_words, Functional, Letter, Poly, PowerFunctional, RandomFunctional};
use ncprob_core::scalars::{q, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type F = Arc<dyn Functional<Q>>;

fn l(i: u16) -> Letter {
    Letter::new(i)
}

fn semicircle(x: Letter) -> F {
    let m = [1, 0, 1, 0, 2, 0, 5, 0, 14, 0, 42];
    Arc::new(PowerFunctional::new(x, m.iter().map(|&v| q(v, 1)).collect()))
}

fn rnd(seed: u64) -> F {
    Arc::new(RandomFunctional::new(seed))
}

/// Mains a₁ = #0, a₂ = #1 (free semicirculars); perts f₁ = #2, f₂ = #3.
fn scenario(law: Law, correlated: bool) -> Scenario<Q> {
    let joint = rnd(99);
    let (p1, p2): (F, F) = if correlated { (joint.clone(), joint.clone()) } else { (rnd(1), rnd(2)) };
    let gs = vec![
        Group::new("A1", vec![l(0)], Role::Main, semicircle(l(0))),
        Group::new("A2", vec![l(1)], Role::Main, semicircle(l(1))),
        Group::new("F1", vec![l(2)], Role::Perturbation, p1),
        Group::new("F2", vec![l(3)], Role::Perturbation, p2),
    ];
    let s = Scenario::new(law, gs).unwrap();
    if correlated {
        s.with_pert_joint(joint)
    } else {
        s
    }
}

fn random_poly(rng: &mut ChaCha8Rng, letters: &[Letter]) -> Poly<Q> {
    let mut p = Poly::zero();
    for _ in 0..3 {
        let len = rng.random_range(0..3);
        let w: Vec<Letter> = (0..len).map(|_| letters[rng.random_range(0..letters.len())]).collect();
        p = p.add(&Poly::term(w, q(rng.random_range(-3..4), rng.random_range(1..3))));
    }
    p
}

#[test]
fn bprime_product_is_associative_and_unital() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mains = [l(0), l(1)];
    let perts = [l(2), l(3)];
    let all = [l(0), l(1), l(2), l(3)];
    for _ in 0..40 {
        let el = |rng: &mut ChaCha8Rng| {
            let pert = random_poly(rng, &all).filter(|w| w.iter().any(|x| perts.contains(x)));
            BPrimeElement { main: random_poly(rng, &mains), pert }
        };
        let (x, y, z) = (el(&mut rng), el(&mut rng), el(&mut rng));
        assert_eq!(bprime_mul(&bprime_mul(&x, &y), &z), bprime_mul(&x, &bprime_mul(&y, &z)));
        assert_eq!(bprime_mul(&BPrimeElement::one(), &x), x);
        assert_eq!(bprime_mul(&x, &BPrimeElement::one()), x);
        // the ideal is closed and the product is the ordinary one on a + f
        let xy = bprime_mul(&x, &y);
        assert_eq!(xy.total(), x.total().mul(&y.total()));
    }
}

#[test]
fn phi_prime_of_products() {
    let s = scenario(Law::Bprime, false);
    let e = s.bprime_engine().unwrap();
    let all = s.letters(None);
    let is_pert = |x: &Letter| x.id >= 2;
    for w1 in all_words(&all, 2) {
        for w2 in all_words(&all, 3) {
            let b1 = BPrimeElement::split(&Poly::word(w1.clone()), is_pert);
            let b2 = BPrimeElement::split(&Poly::word(w2.clone()), is_pert);
            let prod = bprime_mul(&b1, &b2);
            let w: Vec<Letter> = w1.iter().chain(&w2).copied().collect();
            let direct = if e.has_pert(&w) { e.big_phi(&w).unwrap() } else { q(0, 1) };
            assert_eq!(phi_prime_of(&prod, &e).unwrap(), direct);
            let direct = if e.has_pert(&w) { q(0, 1) } else { e.phi(&w).unwrap() };
            assert_eq!(phi_of(&prod, &e).unwrap(), direct);
        }
    }
}

fn projection_scenario() -> (Scenario<Q>, Letter, Letter) {
    let a = l(0);
    let qq = Letter::projection(1);
    let gs = vec![
        Group::new("A", vec![a], Role::Main, Arc::new(PowerFunctional::new(a, vec![q(1, 1), q(2, 3), q(5, 2), q(-1, 1)]))),
        Group::new("Q", vec![qq], Role::Perturbation, Arc::new(PowerFunctional::new(qq, vec![q(0, 1), q(1, 1)]))),
    ];
    (Scenario::new(Law::Bprime, gs).unwrap(), a, qq)
}

#[test]
fn functionals_on_elements() {
    let (s, a, qq) = projection_scenario();
    let e = s.bprime_engine().unwrap();
    let main = BPrimeElement { main: Poly::letter(a), pert: Poly::zero() };
    assert_eq!(phi_prime_of(&main, &e).unwrap(), q(0, 1));
    let proj = BPrimeElement { main: Poly::zero(), pert: Poly::letter(qq) };
    assert_eq!(phi_prime_of(&proj, &e).unwrap(), q(1, 1));
    let with_f = BPrimeElement { main: Poly::letter(a), pert: Poly::word(vec![qq, a]) };
    assert_eq!(phi_of(&with_f, &e).unwrap(), phi_of(&main, &e).unwrap());
    // φ′(p a p) = −φ(a)
    let c: BPrimeElement<Q> = compress(&[a], qq);
    assert_eq!(phi_prime_of(&c, &e).unwrap(), q(-2, 3));
}

#[test]
fn phi_p_basics() {
    let (s, a, qq) = projection_scenario();
    let e = Arc::new(s.bprime_engine().unwrap());
    let pp = PhiP::new(e.clone(), Poly::letter(qq)).unwrap();
    assert_eq!(pp.of(&BPrimeElement::one()).unwrap(), q(1, 1));
    for n in 1..4 {
        let an = vec![a; n];
        assert_eq!(pp.eval(&an).unwrap(), e.phi(&an).unwrap());
    }
    let f = vec![a, qq, a];
    assert_eq!(pp.eval(&f).unwrap(), e.big_phi(&[qq, a, qq, a]).unwrap());
    assert!(matches!(
        PhiP::new(e.clone(), Poly::word(vec![qq, a]).sub(&Poly::word(vec![a, qq]))),
        Err(ncprob_core::Error::UndefinedFunctional(_))
    ));
}

#[test]
fn bprime_matches_infinitesimal_freeness() {
    let s = scenario(Law::Bprime, false);
    let r = check_bprime_iff_inf_free(&s, 5, Variant::Full).unwrap();
    assert!(r.ok() && r.checked > 1000, "{r}");
    assert!(check_bprime_iff_inf_free(&s, 5, Variant::Weak).unwrap().ok());
}

#[test]
fn correlated_perturbations_are_only_weakly_bprime() {
    let s = scenario(Law::WeakBprime, true);
    let weak = check_bprime_iff_inf_free(&s, 5, Variant::Weak).unwrap();
    assert!(weak.ok(), "{weak}");
    let full = check_bprime_iff_inf_free(&s, 5, Variant::Full).unwrap();
    assert!(!full.ok());
    assert!(full.violations.iter().any(|v| v.witness == "#2 #3" || v.witness == "#3 #2"), "{full}");
}

#[test]
fn no_perturbation_is_plain_freeness() {
    let gs = vec![
        Group::new("A1", vec![l(0)], Role::Main, semicircle(l(0))),
        Group::new("A2", vec![l(1)], Role::Main, rnd(4)),
    ];
    let s = Scenario::new(Law::Bprime, gs).unwrap();
    assert!(check_bprime_iff_inf_free(&s, 5, Variant::Full).unwrap().ok());
    let e = s.bprime_engine().unwrap();
    for w in all_words(&[l(0), l(1)], 5) {
        assert_eq!(e.phi(&w).unwrap(), mm_free(&s, &w).unwrap());
    }
}

#[test]
fn engine_passes_type_bprime_definitions() {
    for (law, corr) in [(Law::Bprime, false), (Law::WeakBprime, true)] {
        let s = scenario(law, corr);
        let e = s.bprime_engine().unwrap();
        let phi = ncprob_core::moments::FnFunctional::new(|w: &[Letter]| e.phi(w));
        let big = ncprob_core::moments::FnFunctional::new(|w: &[Letter]| e.big_phi(w));
        let r = verify_independence(&Joint::new(&phi).with_second(&big), &s, 5).unwrap();
        assert!(r.ok(), "{r}");
    }
    // correlated perturbations violate trivial independence
    let weak = scenario(Law::WeakBprime, true);
    let e = weak.bprime_engine().unwrap();
    let as_full = scenario(Law::Bprime, false);
    let phi = ncprob_core::moments::FnFunctional::new(|w: &[Letter]| e.phi(w));
    let big = ncprob_core::moments::FnFunctional::new(|w: &[Letter]| e.big_phi(w));
    assert!(!verify_independence(&Joint::new(&phi).with_second(&big), &as_full, 4).unwrap().ok());
}

#[test]
fn observation_phi_p_is_antimonotone() {
    let gs = vec![
        Group::new("A", vec![l(0), l(1)], Role::Main, rnd(7)),
        Group::new("F", vec![l(2), l(3)], Role::Perturbation, rnd(8)),
    ];
    let s = Scenario::new(Law::WeakBprime, gs).unwrap();
    let e = Arc::new(s.bprime_engine().unwrap());
    let pp = PhiP::new(e.clone(), Poly::letter(l(2)).add(&Poly::word(vec![l(3), l(0), l(2)]))).unwrap();
    for w in all_words(&[l(0), l(1)], 4) {
        assert_eq!(pp.eval(&w).unwrap(), e.phi(&w).unwrap());
    }
    let pair = Scenario::new(
        Law::Antimonotone,
        vec![
            Group::new("A", vec![l(0), l(1)], Role::Main, rnd(7)),
            Group::new("F", vec![l(2), l(3)], Role::Main, rnd(8)),
        ],
    )
    .unwrap();
    let r = verify_independence(&Joint::new(&pp), &pair, 5).unwrap();
    assert!(r.ok() && r.checked > 0, "{r}");
}

#[test]
fn trivially_independent_perturbations_are_boolean_under_phi_p() {
    let s = scenario(Law::Bprime, false);
    let e = Arc::new(s.bprime_engine().unwrap());
    let pp = PhiP::new(e, Poly::letter(l(2))).unwrap();
    let pair = Scenario::new(
        Law::Boolean,
        vec![Group::new("F1", vec![l(2)], Role::Main, rnd(1)), Group::new("F2", vec![l(3)], Role::Main, rnd(2))],
    )
    .unwrap();
    let r = verify_independence(&Joint::new(&pp), &pair, 5).unwrap();
    assert!(r.ok() && r.checked > 0, "{r}");
}

#[test]
fn cfree_theorem_equivalence() {
    let pairs = [(0, 2), (1, 3)];
    let s = scenario(Law::Bprime, false);
    let rep = check_cfree_theorem(&s, &pairs, &Poly::letter(l(2)), 5).unwrap();
    assert!(rep.holds());
    assert!(rep.cfree.ok() && rep.boolean.ok(), "{}\n{}", rep.cfree, rep.boolean);

    let s = scenario(Law::WeakBprime, true);
    let rep = check_cfree_theorem(&s, &pairs, &Poly::letter(l(2)), 4).unwrap();
    assert!(rep.holds(), "{}", rep.summary());
    assert!(!rep.cfree.ok() && !rep.boolean.ok());

    let single = check_cfree_theorem(&scenario(Law::Bprime, false), &[(0, 2)], &Poly::letter(l(2)), 5).unwrap();
    assert!(single.holds() && single.cfree.checked == 0 && single.boolean.checked == 0);
}

#[test]
fn cfree_theorem_with_separate_p_group() {
    // P in its own perturbation group, jointly distributed with the others
    let joint = rnd(123);
    let gs = vec![
        Group::new("A1", vec![l(0)], Role::Main, semicircle(l(0))),
        Group::new("A2", vec![l(1)], Role::Main, semicircle(l(1))),
        Group::new("F1", vec![l(2)], Role::Perturbation, joint.clone()),
        Group::new("F2", vec![l(3)], Role::Perturbation, joint.clone()),
        Group::new("P", vec![l(4)], Role::Perturbation, joint.clone()),
    ];
    let s = Scenario::new(Law::WeakBprime, gs).unwrap().with_pert_joint(joint);
    let rep = check_cfree_theorem(&s, &[(0, 2), (1, 3)], &Poly::letter(l(4)), 4).unwrap();
    assert!(rep.holds(), "{}", rep.summary());
}
