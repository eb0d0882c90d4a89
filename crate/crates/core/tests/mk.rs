use std::sync::Arc;

use ncprob_core::conv::Dist;
use ncprob_core::indep::{Group, Role};
use ncprob_core::mk::*;
use ncprob_core::moments::{random_q, Functional, Letter, PowerFunctional, RandomFunctional};
use ncprob_core::ncpart::{enumerate_nc, NcPartition};
use ncprob_core::scalars::{q, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type F = Arc<dyn Functional<Q>>;

fn l(i: u16) -> Letter {
    Letter::new(i)
}

fn random_dist(seed: u64, k: usize) -> Dist<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = vec![q(1, 1)];
    m.extend((0..k).map(|_| random_q(&mut rng, 4, 3)));
    Dist::new(m).unwrap()
}

fn semicircle(k: usize) -> Dist<Q> {
    let cat = [1, 1, 2, 5, 14, 42, 132];
    Dist::new((0..=k).map(|n| if n % 2 == 1 { q(0, 1) } else { q(cat[n / 2], 1) }).collect()).unwrap()
}

fn power(x: Letter, d: &Dist<Q>) -> F {
    Arc::new(PowerFunctional::new(x, d.moments().to_vec()))
}

fn two_free(d1: &Dist<Q>, d2: &Dist<Q>) -> CompressionContext<Q> {
    CompressionContext::from_mains(vec![
        Group::new("A1", vec![l(0)], Role::Main, power(l(0), d1)),
        Group::new("A2", vec![l(1)], Role::Main, power(l(1), d2)),
    ])
    .unwrap()
}

#[test]
fn theorem_main_three_routes() {
    for seed in 0..2 {
        let ctx = two_free(&random_dist(seed, 6), &random_dist(10 + seed, 6));
        let r = check_theorem_main(&ctx, &[l(0), l(1)], 6).unwrap();
        assert!(r.ok() && r.checked == 2 * 126, "{r}");
    }
}

#[test]
fn theorem_main_examples() {
    let ctx = two_free(&semicircle(6), &semicircle(6));
    assert_eq!(compressed_phi_prime(&[l(0)], &ctx).unwrap(), q(0, 1));
    assert_eq!(compressed_phi_prime(&[l(0), l(0)], &ctx).unwrap(), q(-2, 1));
    assert_eq!(compressed_phi_prime(&[l(0), l(1)], &ctx).unwrap(), q(0, 1));
    let ctx = two_free(&random_dist(3, 4), &random_dist(4, 4));
    assert_eq!(compressed_phi_prime(&[l(0)], &ctx).unwrap(), -random_dist(3, 4).moments()[1].clone());
}

#[test]
fn projection_lemma_up_to_seven() {
    let ctx = two_free(&semicircle(2), &semicircle(2));
    for n in 1..=7 {
        for sigma in enumerate_nc(n).unwrap() {
            assert_eq!(ctx.projection_lemma_sum(&sigma).unwrap(), q(-(sigma.len() as i64), 1), "{sigma}");
        }
    }
    let one = NcPartition::one(4);
    assert_eq!(ctx.projection_lemma_sum(&one).unwrap(), q(-1, 1));
}

#[test]
fn compressed_cumulants() {
    let ctx = two_free(&random_dist(5, 5), &random_dist(6, 5));
    let r = check_compressed_cumulants(&ctx, &[l(0), l(1)], 4).unwrap();
    assert!(r.ok(), "{r}");
    let sc = two_free(&semicircle(4), &semicircle(4));
    assert_eq!(compressed_inf_cumulant(&[l(0)], &sc).unwrap(), q(0, 1));
    assert_eq!(compressed_inf_cumulant(&[l(0), l(0)], &sc).unwrap(), q(-1, 1));
    // free Poisson(1): every κₙ = 1
    let fp = Dist::new([1, 1, 2, 5, 14].iter().map(|&v| q(v, 1)).collect()).unwrap();
    let ctx = two_free(&fp, &semicircle(4));
    assert_eq!(compressed_inf_cumulant(&[l(0), l(0), l(0)], &ctx).unwrap(), q(-2, 1));
}

#[test]
fn free_compression_is_infinitesimally_free() {
    let ctx = Arc::new(two_free(&random_dist(7, 6), &random_dist(8, 6)));
    let r = check_free_compression(ctx, &[vec![l(0)], vec![l(1)]], 5).unwrap();
    assert!(r.ok() && r.checked > 0, "{r}");
}

#[test]
fn univariate_equals_multivariate_diagonal() {
    for (seed, d) in [(0, random_dist(20, 10)), (1, semicircle(10))] {
        let a = l(0);
        let f = PowerFunctional::new(a, d.moments().to_vec());
        let tau = inverse_mk_uni(&d, 10).unwrap();
        for n in 1..=10 {
            assert_eq!(inverse_mk_multi(&vec![a; n], &f).unwrap(), tau.moments()[n], "seed {seed} n={n}");
        }
    }
    let centered = PowerFunctional::new(l(0), vec![q(1, 1), q(0, 1), q(3, 2)]);
    assert_eq!(inverse_mk_multi(&[l(0), l(0)], &centered).unwrap(), q(3, 1));
    assert_eq!(inverse_mk_multi(&[l(0)], &centered).unwrap(), q(0, 1));
}

#[test]
fn core_lemma() {
    for n in 1..=4 {
        let a: Vec<Letter> = (0..n).map(|i| l(i as u16)).collect();
        let b: Vec<Letter> = (0..n).map(|i| l((n + i) as u16)).collect();
        let ka: F = Arc::new(RandomFunctional::new(40 + n as u64).free_unit());
        let kb: F = Arc::new(RandomFunctional::new(50 + n as u64).free_unit());
        let r = check_core_lemma(&a, &b, ka, kb).unwrap();
        assert!(r.ok(), "{r}");
    }
    // semicircle × free Poisson at n = 3, single variables
    let (a, b) = (l(0), l(1));
    let ka: F = Arc::new(ncprob_core::moments::FnFunctional::new(move |w: &[Letter]| Ok(if w.len() == 2 { q(1, 1) } else { q(0, 1) })));
    let kb: F = Arc::new(ncprob_core::moments::FnFunctional::new(|_: &[Letter]| Ok(q(1, 1))));
    assert!(check_core_lemma(&[a; 3], &[b; 3], ka, kb).unwrap().ok());
}

#[test]
fn mk_propositions() {
    let r = check_mk_propositions(&semicircle(8), &semicircle(8), 8, 4).unwrap();
    assert!(r.ok(), "{r}");
    let r = check_mk_propositions(&random_dist(60, 8), &Dist::delta(q(1, 1), 8), 8, 4).unwrap();
    assert!(r.ok(), "{r}");
    let bern = Dist::new(vec![q(1, 1), q(1, 2), q(1, 2), q(1, 2), q(1, 2), q(1, 2), q(1, 2)]).unwrap();
    let r = check_mk_propositions(&bern, &bern, 6, 6).unwrap();
    assert!(r.ok(), "{r}");
}

#[test]
fn anticommutator() {
    let a = anticommutator_counterexample().unwrap();
    assert_eq!((a.phi_prime_x2.clone(), a.phi_prime_big_x2.clone()), (q(-4, 1), q(-6, 1)));
    assert_eq!((a.mk_x2.clone(), a.mk_big_x2.clone()), (q(4, 1), q(6, 1)));
    assert_eq!(a.terms_x2[0], a.terms_big_x2[0]);
    assert_eq!(a.terms_x2[3], a.terms_big_x2[3]);
    let d0 = Dist::delta(q(0, 1), 8);
    let ctx = two_free(&d0, &d0);
    let z = ncprob_core::mk::anticommutator(&ctx, l(0), l(1)).unwrap();
    assert_eq!((z.phi_prime_x2, z.phi_prime_big_x2), (q(0, 1), q(0, 1)));
}
