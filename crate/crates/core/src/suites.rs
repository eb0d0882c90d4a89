//! Verification suites: each returns one report over exhaustive or seeded
//! randomized instances, sized by the caller.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bprime::{check_bprime_iff_inf_free, check_cfree_theorem, Variant};
use crate::conv::*;
use crate::error::{Error, Result};
use crate::indep::{self_check, Group, Law, Role, Scenario};
use crate::mk::*;
use crate::moments::*;
use crate::ncpart::*;
use crate::report::Report;
use crate::scalars::{q, Dual, Q};

type F = Arc<dyn Functional<Q>>;

fn l(i: u16) -> Letter {
    Letter::new(i)
}

fn rnd(seed: u64) -> F {
    Arc::new(RandomFunctional::new(seed))
}

fn random_dist(rng: &mut ChaCha8Rng, k: usize) -> Dist<Q> {
    let mut m = vec![q(1, 1)];
    m.extend((0..k).map(|_| random_q(rng, 4, 3)));
    Dist::new(m).expect("m₀ = 1")
}

fn random_seq(rng: &mut ChaCha8Rng, k: usize) -> Vec<Q> {
    let mut m = vec![q(0, 1)];
    m.extend((0..k).map(|_| random_q(rng, 4, 3)));
    m
}

fn semicircle(k: usize) -> Dist<Q> {
    let mut m = vec![q(1, 1)];
    for n in 1..=k {
        m.push(if n % 2 == 1 { q(0, 1) } else { q(catalan(n / 2) as i64, 1) });
    }
    Dist::new(m).expect("m₀ = 1")
}

fn power(x: Letter, d: &Dist<Q>) -> F {
    Arc::new(PowerFunctional::new(x, d.moments().to_vec()))
}

/// Catalan counts up to `max_catalan`; Kreweras cardinality, the relative
/// Kreweras cardinality identity and the interval isomorphism
/// `[σ, π] ≅ [0, Kr_π(σ)]` exhaustively up to `max_n`.
pub fn lattice(max_catalan: usize, max_n: usize) -> Result<Report> {
    let mut r = Report::new("lattice");
    for n in 1..=max_catalan {
        let c = enumerate_nc(n)?.len() as u64;
        r.check("|NC(n)| = Catalan(n)", || format!("n={n}"), &catalan(n), &c);
    }
    for n in 1..=max_n {
        let all = nc_cached(n)?;
        for pi in all.iter() {
            let kr = kreweras(pi);
            r.check("|π| + |Kr(π)| = n + 1", || pi.to_string(), &(n + 1), &(pi.len() + kr.len()));
            r.check("Kr(π) by permutation = by search", || pi.to_string(), &kreweras_by_search(pi)?, &kr);
            for sigma in interval(&NcPartition::zero(n), pi)?.elements {
                let rel = relative_kreweras(&sigma, pi)?;
                let want = kreweras(&sigma).len() + kreweras(&rel).len() - 1;
                r.check("|Kr(π)| = |Kr(σ)| + |Kr(Kr_π(σ))| − 1", || format!("σ={sigma} π={pi}"), &want, &kr.len());
                let up = interval(&sigma, pi)?.elements;
                let images: Vec<NcPartition> = up.iter().map(|t| relative_kreweras(&sigma, t)).collect::<Result<_>>()?;
                let got: BTreeSet<&NcPartition> = images.iter().collect();
                let down = interval(&NcPartition::zero(n), &rel)?.elements;
                let want: BTreeSet<&NcPartition> = down.iter().collect();
                let bij = got == want && got.len() == up.len();
                r.check("τ ↦ Kr_τ(σ) maps [σ,π] onto [0,Kr_π(σ)]", || format!("σ={sigma} π={pi}"), &true, &bij);
                let mut monotone = true;
                for (i, a) in up.iter().enumerate() {
                    for (j, b) in up.iter().enumerate() {
                        if leq(a, b)? != leq(&images[i], &images[j])? {
                            monotone = false;
                        }
                    }
                }
                r.check("τ ↦ Kr_τ(σ) is an order isomorphism", || format!("σ={sigma} π={pi}"), &true, &monotone);
            }
        }
    }
    Ok(r)
}

/// Moment ↔ cumulant round trips, Möbius vs recursive cumulants, and
/// `κ′_π` from dual numbers vs the Leibniz form, on `count` random
/// functionals over two letters, word lengths `1..=max_n`.
pub fn cumulants(count: usize, max_n: usize, seed: u64) -> Result<Report> {
    let mut r = Report::new("cumulants");
    let letters = [l(0), l(1)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let f = RandomFunctional::dual(seed.wrapping_mul(1000).wrapping_add(k as u64));
        let std = StdPart(&f);
        let inf = InfPart(&f);
        let kap = CumulantsOf::new(&std);
        let table = RandomFunctional::new(seed.wrapping_mul(1000).wrapping_add(500_000 + k as u64)).free_unit();
        let from_table = FromCumulants(&table);
        let back = CumulantsOf::new(&from_table);
        for n in 1..=max_n {
            let w: Word = (0..n).map(|_| letters[rng.random_range(0..2)]).collect();
            let shown = || format!("functional {k}, word {}", w.iter().map(|x| x.id.to_string()).collect::<Vec<_>>().join(""));
            let all = nc_cached(n)?;
            let pi = &all[rng.random_range(0..all.len())];
            let entries: Vec<Poly<Q>> = w.iter().map(|&x| Poly::letter(x)).collect();

            let m = moments_from_cumulants(&kap, &w)?;
            r.check("moments(cumulants(φ)) = φ", shown, &std.eval(&w)?, &m);
            r.check("cumulants(moments(κ)) = κ", shown, &Functional::<Q>::eval(&table, &w)?, &back.eval(&w)?);

            let mut eng = CumulantEngine::new(entries.clone(), &std);
            r.check("κ_π recursive = Möbius", shown, &free_cumulant(pi, &entries, &std)?, &eng.kappa_pi(pi)?);

            let dual_entries: Vec<Poly<Dual<Q>>> = w.iter().map(|&x| Poly::letter(x)).collect();
            let via_dual = CumulantEngine::new(dual_entries, &f as &dyn Functional<Dual<Q>>).kappa_pi(pi)?.inf;
            r.check("κ′_π dual = Leibniz", shown, &kappa_prime_leibniz(pi, &entries, &std, &inf)?, &via_dual);
        }
    }
    Ok(r)
}

fn projection_context() -> Result<CompressionContext<Q>> {
    CompressionContext::from_mains(vec![Group::new("A", vec![l(0)], Role::Main, power(l(0), &semicircle(2)))])
}

/// `Σ_{π≤σ} κ′_π[p,…,p] = −|σ|` for every `σ ∈ NC(n)`, `n ≤ max_n`.
pub fn projection_lemma(max_n: usize) -> Result<Report> {
    let mut r = Report::new("projection lemma");
    let ctx = projection_context()?;
    for n in 1..=max_n {
        for sigma in nc_cached(n)?.iter() {
            r.check("Σ_{π≤σ} κ′_π[p…p] = −|σ|", || sigma.to_string(), &q(-(sigma.len() as i64), 1), &ctx.projection_lemma_sum(sigma)?);
        }
    }
    Ok(r)
}

fn two_free(d1: &Dist<Q>, d2: &Dist<Q>) -> Result<CompressionContext<Q>> {
    CompressionContext::from_mains(vec![
        Group::new("A1", vec![l(0)], Role::Main, power(l(0), d1)),
        Group::new("A2", vec![l(1)], Role::Main, power(l(1), d2)),
    ])
}

/// Compressed `φ′` by expansion, by `−Σ|Kr|κ` and by the projection-lemma
/// route, on all words over two free generators with random marginals.
pub fn theorem_main(max_n: usize, seeds: u64) -> Result<Report> {
    let mut r = Report::new("compressed φ′ three ways");
    for s in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + s);
        let ctx = two_free(&random_dist(&mut rng, max_n), &random_dist(&mut rng, max_n))?;
        r.absorb(check_theorem_main(&ctx, &[l(0), l(1)], max_n)?);
        r.absorb(check_compressed_cumulants(&ctx, &[l(0), l(1)], max_n.min(5))?);
    }
    let ctx = Arc::new(two_free(&semicircle(max_n), &random_dist(&mut ChaCha8Rng::seed_from_u64(799), max_n))?);
    r.absorb(check_free_compression(ctx, &[vec![l(0)], vec![l(1)]], max_n.min(5))?);
    Ok(r)
}

/// The core lemma for `n ≤ max_n` with random cumulant tables.
pub fn core_lemma(max_n: usize, seeds: u64) -> Result<Report> {
    let mut r = Report::new("core lemma");
    for s in 0..seeds {
        for n in 1..=max_n {
            let a: Vec<Letter> = (0..n).map(|i| l(i as u16)).collect();
            let b: Vec<Letter> = (0..n).map(|i| l((n + i) as u16)).collect();
            let ka: F = Arc::new(RandomFunctional::new(900 + 10 * s + n as u64).free_unit());
            let kb: F = Arc::new(RandomFunctional::new(950 + 10 * s + n as u64).free_unit());
            r.absorb(check_core_lemma(&a, &b, ka, kb)?);
        }
    }
    Ok(r)
}

/// The anti-commutator example. The second infinitesimal moments are
/// `−(Σ|Kr|κ)`, so `(−φ′(x²), −φ′(X²))` and the Kreweras sums must both be `(4, 6)`.
pub fn anticommutator_suite() -> Result<Report> {
    let mut r = Report::new("anti-commutator");
    let a = anticommutator_counterexample()?;
    r.check("−φ′(x²)", String::new, &q(4, 1), &-a.phi_prime_x2.clone());
    r.check("−φ′(X²)", String::new, &q(6, 1), &-a.phi_prime_big_x2.clone());
    r.check("Σ|Kr|κ for x²", String::new, &q(4, 1), &a.mk_x2);
    r.check("Σ|Kr|κ for X²", String::new, &q(6, 1), &a.mk_big_x2);
    r.check("first terms agree", String::new, &a.terms_x2[0], &a.terms_big_x2[0]);
    r.check("fourth terms agree", String::new, &a.terms_x2[3], &a.terms_big_x2[3]);
    let d0 = Dist::delta(q(0, 1), 4);
    let z = anticommutator(&two_free(&d0, &d0)?, l(0), l(1))?;
    r.check("δ₀ marginals give φ′(x²) = 0", String::new, &q(0, 1), &z.phi_prime_x2);
    r.check("δ₀ marginals give φ′(X²) = 0", String::new, &q(0, 1), &z.phi_prime_big_x2);
    Ok(r)
}

/// Semicircle `τ(x²) = 2`, `τ(x⁴) = 6` two ways; `inverse_mk_uni` against
/// the diagonal of `inverse_mk_multi` to `order`; the propositions.
pub fn markov_krein(order: usize) -> Result<Report> {
    let mut r = Report::new("Markov–Krein");
    let sc = semicircle(order.max(4));
    let tau = inverse_mk_uni(&sc, order.max(4))?;
    let f = PowerFunctional::new(l(0), sc.moments().to_vec());
    for (n, v) in [(2, 2), (4, 6)] {
        r.check("semicircle τ(xⁿ), recursion", || format!("n={n}"), &q(v, 1), &tau.moments()[n]);
        r.check("semicircle τ(xⁿ), NC formula", || format!("n={n}"), &q(v, 1), &inverse_mk_multi(&vec![l(0); n], &f)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for d in [sc.truncate(order)?, random_dist(&mut rng, order), random_dist(&mut rng, order)] {
        let tau = inverse_mk_uni(&d, order)?;
        let f = PowerFunctional::new(l(0), d.moments().to_vec());
        for n in 1..=order {
            r.check("uni = multi diagonal", || format!("n={n}"), &tau.moments()[n], &inverse_mk_multi(&vec![l(0); n], &f)?);
        }
    }
    let k = order.min(8);
    r.absorb(check_mk_propositions(&semicircle(k), &semicircle(k), k, k.min(4))?);
    let bern = Dist::new(vec![q(1, 1); 1].into_iter().chain(vec![q(1, 2); k]).collect())?;
    r.absorb(check_mk_propositions(&bern, &bern, k, k.min(6))?);
    r.absorb(check_mk_propositions(&random_dist(&mut rng, k), &Dist::delta(q(1, 1), k), k, k.min(4))?);
    Ok(r)
}

/// The two convolution identities to `order`, the c-free degenerations,
/// and the two routes to `⊞` to `dual_order`.
pub fn convolution(order: usize, dual_order: usize, seeds: u64) -> Result<Report> {
    let mut r = Report::new("convolution identities");
    for s in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(1200 + s);
        let k = order;
        let (m1, m2) = (random_dist(&mut rng, k), random_dist(&mut rng, k));
        let (v1, v2) = (random_seq(&mut rng, k), random_seq(&mut rng, k));
        let (n1, n2) = (random_dist(&mut rng, k), random_dist(&mut rng, k));
        let w = || format!("seed {s}");

        let d1 = InfDist::new(m1.clone(), cyclic_antimonotone_conv(&m1, &v1, k)?)?;
        let d2 = InfDist::new(m2.clone(), cyclic_antimonotone_conv(&m2, &v2, k)?)?;
        let lhs = inf_free_add(&d1, &d2, k)?;
        let vsum: Vec<Q> = v1.iter().zip(&v2).map(|(a, b)| a + b).collect();
        let rhs = cyclic_antimonotone_conv(&free_add(&m1, &m2, k)?, &vsum, k)?;
        for n in 0..=k {
            r.check("⊞ of (μᵢ, μᵢ ◁̃ νᵢ) = (μ₁⊞μ₂) ◁̃ (ν₁+ν₂)", || format!("seed {s}, n={n}"), &rhs[n], &lhs.inf[n]);
        }

        let (l1, l2) = (monotone_add(&n1, &m1, k)?, monotone_add(&n2, &m2, k)?);
        let lhs = cfree_add(&m1, &l1, &m2, &l2, k)?;
        let rhs = monotone_add(&boolean_add(&n1, &n2, k)?, &free_add(&m1, &m2, k)?, k)?;
        r.check("c-free sum of (μᵢ ◁ νᵢ) = (μ₁⊞μ₂) ◁ (ν₁⊎ν₂)", w, &rhs, &lhs);

        r.check("ν = μ gives ⊞", w, &free_add(&m1, &m2, k)?, &cfree_add(&m1, &m1, &m2, &m2, k)?);
        let d0 = Dist::delta(q(0, 1), k);
        r.check("μ = δ₀ gives ⊎", w, &boolean_add(&n1, &n2, k)?, &cfree_add(&d0, &n1, &d0, &n2, k)?);

        let (a, b) = (random_dist(&mut rng, dual_order), random_dist(&mut rng, dual_order));
        r.check("⊞ by cumulants = by F⁻¹", w, &free_add(&a, &b, dual_order)?, &free_add_via_f(&a, &b, dual_order)?);
    }
    Ok(r)
}

fn two_groups(law: Law) -> Result<Scenario<Q>> {
    Scenario::new(
        law,
        vec![
            Group::new("A", vec![l(0), l(1)], Role::Main, rnd(60)),
            Group::new("B", vec![l(2)], Role::Main, rnd(61)),
        ],
    )
}

fn bprime_scenario(law: Law, correlated: bool) -> Result<Scenario<Q>> {
    let joint = rnd(99);
    let (p1, p2) = if correlated { (joint.clone(), joint.clone()) } else { (rnd(1), rnd(2)) };
    let s = Scenario::new(
        law,
        vec![
            Group::new("A1", vec![l(0)], Role::Main, power(l(0), &semicircle(12))),
            Group::new("A2", vec![l(1)], Role::Main, rnd(3)),
            Group::new("F1", vec![l(2)], Role::Perturbation, p1),
            Group::new("F2", vec![l(3)], Role::Perturbation, p2),
        ],
    )?;
    Ok(if correlated { s.with_pert_joint(joint) } else { s })
}

/// Every engine against the defining rules of its own law.
pub fn engines(max_len: usize) -> Result<Report> {
    let mut r = Report::new("engine closure");
    for law in [Law::Free, Law::Boolean, Law::Monotone, Law::Antimonotone] {
        r.absorb(self_check(&two_groups(law)?, max_len)?);
    }
    let trivial = Scenario::new(
        Law::Trivial,
        vec![
            Group::new("F1", vec![l(0), l(1)], Role::Perturbation, rnd(62)),
            Group::new("F2", vec![l(2)], Role::Perturbation, rnd(63)),
        ],
    )?;
    r.absorb(self_check(&trivial, max_len)?);
    let cfree = Scenario::new(
        Law::CFree,
        vec![
            Group::new("A", vec![l(0), l(1)], Role::Main, rnd(64)).with_psi(rnd(65)),
            Group::new("B", vec![l(2)], Role::Main, rnd(66)).with_psi(rnd(67)),
        ],
    )?;
    r.absorb(self_check(&cfree, max_len)?);
    for traced in [false, true] {
        let cyc = Scenario::new(
            Law::CyclicAntimonotone,
            vec![
                Group::new("A", vec![l(0), l(1)], Role::Main, rnd(68)),
                Group::new("F", vec![l(2)], Role::Perturbation, rnd(69)),
            ],
        )?
        .with_traced(traced);
        r.absorb(self_check(&cyc, max_len)?);
    }
    let inf: Vec<Group<Dual<Q>>> = (0..2u16)
        .map(|i| {
            let letters = if i == 0 { vec![l(0), l(1)] } else { vec![l(2)] };
            Group::new(&format!("G{i}"), letters, Role::Main, Arc::new(RandomFunctional::dual(70 + i as u64)) as Arc<dyn Functional<Dual<Q>>>)
        })
        .collect();
    r.absorb(self_check(&Scenario::new(Law::InfFree, inf)?, max_len)?);
    r.absorb(self_check(&bprime_scenario(Law::WeakBprime, true)?, max_len)?);
    r.absorb(self_check(&bprime_scenario(Law::Bprime, false)?, max_len)?);
    Ok(r)
}

/// B′ ⇔ infinitesimal freeness and the c-free theorem, both directions.
pub fn bprime(max_len: usize) -> Result<Report> {
    let mut r = Report::new("type-B′ equivalences");
    let s = bprime_scenario(Law::Bprime, false)?;
    r.absorb(check_bprime_iff_inf_free(&s, max_len, Variant::Full)?);
    r.absorb(check_bprime_iff_inf_free(&s, max_len, Variant::Weak)?);
    let weak = bprime_scenario(Law::WeakBprime, true)?;
    r.absorb(check_bprime_iff_inf_free(&weak, max_len, Variant::Weak)?);
    let full = check_bprime_iff_inf_free(&weak, max_len, Variant::Full)?;
    r.check("correlated perturbations are not B′-free", || "F1, F2".into(), &false, &full.ok());

    let pairs = [(0, 2), (1, 3)];
    let p = Poly::letter(l(2));
    for (s, both) in [(s, true), (weak, false)] {
        let rep = check_cfree_theorem(&s, &pairs, &p, max_len)?;
        r.check("c-free ⇔ Boolean", || format!("{:?}", s.law), &true, &rep.holds());
        r.check("c-free side", || format!("{:?}", s.law), &both, &rep.cfree.ok());
        r.check("Boolean side", || format!("{:?}", s.law), &both, &rep.boolean.ok());
    }
    Ok(r)
}

pub const SUITES: [&str; 6] = ["lattice", "cumulants", "engines", "bprime", "conv", "mk"];

/// A named suite scaled by `max_n`, as run by `verify`.
pub fn run(name: &str, max_n: usize) -> Result<Vec<Report>> {
    let n = max_n.max(1);
    Ok(match name {
        "lattice" => vec![lattice(n.max(10).min(12), n.min(6))?],
        "cumulants" => vec![cumulants(200, n.min(6), 1)?, projection_lemma(n.min(7))?],
        "engines" => vec![engines(n.min(6))?],
        "bprime" => vec![bprime(n.min(5))?],
        "conv" => vec![convolution(n.clamp(2, 8), n.clamp(2, 10), 3)?],
        "mk" => vec![
            theorem_main(n.min(6), 2)?,
            core_lemma(n.min(4), 2)?,
            anticommutator_suite()?,
            markov_krein(n.clamp(4, 10))?,
        ],
        "all" => {
            let mut v = Vec::new();
            for s in SUITES {
                v.extend(run(s, max_n)?);
            }
            v
        }
        other => return Err(Error::Malformed(format!("unknown suite `{other}`"))),
    })
}
