//! Inverse Markov–Krein transforms and the compressed functionals
//! `ψ = φ`, `ψ′ = φ + φ′` on `p𝒜p` with `p = 1 − q`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::bprime::{compress, p_of, phi_of, phi_prime_of, BPrimeElement};
use crate::conv::{free_add, free_mult, inf_free_add, Dist, InfDist};
use crate::error::{Error, Result};
use crate::indep::{verify_independence, BPrimeEngine, Group, Joint, Law, Role, Scenario};
use crate::moments::{
    kappa_prime_leibniz, CumulantEngine, FnFunctional, FromCumulants, Functional, Letter, Poly, PowerFunctional,
    VanishingMixed,
};
use crate::ncpart::{interval, kreweras, nc_cached, NcPartition};
use crate::report::Report;
use crate::scalars::{q, Dual, Scalar, Q};

/// `τ` with `G_μ′ = −G_τ G_μ`: `t₀ = 1`, `tₙ = (n+1)mₙ − Σ_{j<n} t_j m_{n−j}`.
pub fn inverse_mk_uni<S: Scalar>(mu: &Dist<S>, k: usize) -> Result<Dist<S>> {
    let mu = mu.truncate(k)?;
    let m = mu.moments();
    let mut t = vec![S::one()];
    for n in 1..=k {
        let mut v = S::from_i64(n as i64 + 1) * m[n].clone();
        for j in 0..n {
            v = v - t[j].clone() * m[n - j].clone();
        }
        t.push(v);
    }
    Dist::new(t)
}

/// `Σ_{π∈NC(n)} |Kr(π)| κ_π[b₁,…,bₙ]`.
pub fn kreweras_weighted<S: Scalar>(entries: Vec<Poly<S>>, f: &dyn Functional<S>) -> Result<S> {
    let n = entries.len();
    let mut eng = CumulantEngine::new(entries, f);
    let mut acc = S::zero();
    for pi in nc_cached(n)?.iter() {
        let k = eng.kappa_pi(pi)?;
        if !k.is_zero() {
            acc = acc + S::from_i64(kreweras(pi).len() as i64) * k;
        }
    }
    Ok(acc)
}

/// `M_n[a₁,…,aₙ] = Σ_{π∈NC(n)} |Kr(π)| κ_π[a₁,…,aₙ]` under `f`.
pub fn inverse_mk_multi<S: Scalar>(w: &[Letter], f: &dyn Functional<S>) -> Result<S> {
    if w.is_empty() {
        return Err(Error::Malformed("empty word".into()));
    }
    kreweras_weighted(w.iter().map(|&l| Poly::letter(l)).collect(), f)
}

/// A type-B′ engine together with a projection `q` with `Φ(q) = 1`,
/// cyclic-antimonotone from the main algebra. As a functional it evaluates
/// `(ψ, ψ′)` on words read as products `ã₁ã₂⋯ãₙ = p a₁ p ⋯ p aₙ p`.
pub struct CompressionContext<S: Scalar> {
    engine: Arc<BPrimeEngine<S>>,
    q: Letter,
    lemma: Mutex<HashMap<Vec<usize>, S>>,
}

impl<S: Scalar> CompressionContext<S> {
    pub fn new(engine: Arc<BPrimeEngine<S>>, q: Letter) -> Result<Self> {
        if !q.idempotent {
            return Err(Error::Malformed("q must be a projection".into()));
        }
        if !engine.cyclic().is_pert(&q) || !engine.big_phi(&[q])?.is_one() {
            return Err(Error::Malformed("q must be a perturbation letter with Φ(q) = 1".into()));
        }
        Ok(CompressionContext { engine, q, lemma: Mutex::new(HashMap::new()) })
    }

    /// Mains from `groups` (free), plus a fresh projection `q` with `Φ(qⁿ) = 1`.
    pub fn from_mains(mut groups: Vec<Group<S>>) -> Result<Self> {
        let next = groups.iter().flat_map(|g| g.letters.iter()).map(|l| l.id + 1).max().unwrap_or(0);
        let q = Letter::projection(next);
        groups.push(Group::new("Q", vec![q], Role::Perturbation, Arc::new(PowerFunctional::new(q, vec![S::one(), S::one()]))));
        let s = Scenario::new(Law::Bprime, groups)?;
        Self::new(Arc::new(s.bprime_engine()?), q)
    }

    pub fn engine(&self) -> &Arc<BPrimeEngine<S>> {
        &self.engine
    }

    pub fn q(&self) -> Letter {
        self.q
    }

    pub fn p(&self) -> Poly<S> {
        p_of(self.q)
    }

    fn split(&self, x: &Poly<S>) -> BPrimeElement<S> {
        BPrimeElement::split(x, |l| *l == self.q)
    }

    /// `φ` on the main algebra.
    pub fn phi(&self) -> impl Functional<S> + '_ {
        FnFunctional::new(move |w: &[Letter]| self.engine.phi(w))
    }

    pub fn phi_poly(&self, x: &Poly<S>) -> Result<S> {
        phi_of(&self.split(x), &self.engine)
    }

    pub fn phi_prime_poly(&self, x: &Poly<S>) -> Result<S> {
        phi_prime_of(&self.split(x), &self.engine)
    }

    /// `(ψ, ψ′)(x)` for `x ∈ p𝒜p`.
    pub fn psi_poly(&self, x: &Poly<S>) -> Result<Dual<S>> {
        let b = self.split(x);
        let v = phi_of(&b, &self.engine)?;
        let d = phi_prime_of(&b, &self.engine)?;
        Ok(Dual::new(v.clone(), v + d))
    }

    /// `Σ_{ρ≤σ} κ′_ρ[p,…,p]`, cached by block sizes (all entries agree).
    pub fn projection_lemma_sum(&self, sigma: &NcPartition) -> Result<S> {
        let key = sigma.type_key();
        if let Some(v) = self.lemma.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let n = sigma.n();
        let entries = vec![self.p(); n];
        let phi = self.phi();
        let phi_prime = FnFunctional::new(|w: &[Letter]| self.engine.phi_prime(w));
        let mut per_type: HashMap<Vec<usize>, S> = HashMap::new();
        let mut acc = S::zero();
        for rho in interval(&NcPartition::zero(n), sigma)?.elements {
            let t = rho.type_key();
            let v = match per_type.get(&t) {
                Some(v) => v.clone(),
                None => {
                    let v = kappa_prime_leibniz(&rho, &entries, &phi, &phi_prime)?;
                    per_type.insert(t, v.clone());
                    v
                }
            };
            acc = acc + v;
        }
        self.lemma.lock().unwrap().insert(key, acc.clone());
        Ok(acc)
    }
}

impl<S: Scalar> Functional<Dual<S>> for CompressionContext<S> {
    fn eval(&self, w: &[Letter]) -> Result<Dual<S>> {
        self.psi_poly(&compress::<S>(w, self.q).total())
    }
}

/// `φ′(ã₁⋯ãₙ)` by expanding `p a₁ p ⋯ aₙ p` and evaluating in the B′ engine.
pub fn compressed_phi_prime<S: Scalar>(w: &[Letter], ctx: &CompressionContext<S>) -> Result<S> {
    phi_prime_of(&compress(w, ctx.q), ctx.engine())
}

/// `Σ_{π∈NC(n+1)} κ_π[1, a₁,…,aₙ] Σ_{ρ≤Kr(π)} κ′_ρ[p,…,p]`, with the inner
/// sums computed from `(φ, φ′)` on words in `q`.
pub fn appendix_route<S: Scalar>(w: &[Letter], ctx: &CompressionContext<S>) -> Result<S> {
    let mut entries = vec![Poly::one()];
    entries.extend(w.iter().map(|&l| Poly::letter(l)));
    let phi = ctx.phi();
    let mut eng = CumulantEngine::new(entries, &phi);
    let mut acc = S::zero();
    for pi in nc_cached(w.len() + 1)?.iter() {
        let k = eng.kappa_pi(pi)?;
        if k.is_zero() {
            continue;
        }
        acc = acc + k * ctx.projection_lemma_sum(&kreweras(pi))?;
    }
    Ok(acc)
}

/// `κ̆′ₙ[ã₁,…,ãₙ]`: the infinitesimal free cumulant under `(ψ, ψ′)`.
pub fn compressed_inf_cumulant<S: Scalar>(w: &[Letter], ctx: &CompressionContext<S>) -> Result<S> {
    let entries: Vec<Poly<Dual<S>>> = w.iter().map(|&l| Poly::letter(l)).collect();
    let idx: Vec<usize> = (0..w.len()).collect();
    Ok(CumulantEngine::new(entries, ctx).kappa(&idx)?.inf)
}

/// The three routes to `φ′(ã₁⋯ãₙ)` on every word over `letters` up to `max_len`.
pub fn check_theorem_main<S: Scalar>(ctx: &CompressionContext<S>, letters: &[Letter], max_len: usize) -> Result<Report> {
    let mut r = Report::new("compressed φ′ = −Σ|Kr(π)|κ_π");
    let phi = ctx.phi();
    for w in crate::moments::all_words(letters, max_len) {
        let direct = compressed_phi_prime(&w, ctx)?;
        let formula = -inverse_mk_multi(&w, &phi)?;
        let appendix = appendix_route(&w, ctx)?;
        let name = || w.iter().map(|l| format!("#{}", l.id)).collect::<Vec<_>>().join(" ");
        r.check("direct = formula", name, &formula, &direct);
        r.check("appendix = formula", name, &formula, &appendix);
    }
    Ok(r)
}

/// `κ̆′ₙ = (1 − n)κₙ` on every word over `letters` up to `max_len`.
pub fn check_compressed_cumulants<S: Scalar>(ctx: &CompressionContext<S>, letters: &[Letter], max_len: usize) -> Result<Report> {
    let mut r = Report::new("κ̆′ₙ[ã…] = (1−n)κₙ[a…]");
    let phi = ctx.phi();
    for w in crate::moments::all_words(letters, max_len) {
        let n = w.len();
        let idx: Vec<usize> = (0..n).collect();
        let kn = CumulantEngine::new(w.iter().map(|&l| Poly::letter(l)).collect(), &phi).kappa(&idx)?;
        let want = S::from_i64(1 - n as i64) * kn;
        let got = compressed_inf_cumulant(&w, ctx)?;
        r.check("κ̆′", || w.iter().map(|l| format!("#{}", l.id)).collect::<Vec<_>>().join(" "), &want, &got);
    }
    Ok(r)
}

/// The compressed main groups are infinitesimally free under `(ψ, ψ′)`.
pub fn check_free_compression<S: Scalar>(ctx: Arc<CompressionContext<S>>, groups: &[Vec<Letter>], max_len: usize) -> Result<Report> {
    let gs = groups
        .iter()
        .enumerate()
        .map(|(i, ls)| Group::new(&format!("pA{}p", i + 1), ls.clone(), Role::Main, ctx.clone() as Arc<dyn Functional<Dual<S>>>))
        .collect();
    let s = Scenario::new(Law::InfFree, gs)?;
    let mut r = verify_independence(&Joint::new(&*ctx), &s, max_len)?;
    r.name = "compressed families are infinitesimally free".into();
    Ok(r)
}

fn join_with(sigma_hat: &[usize], pi: &NcPartition) -> bool {
    // union-find over the pieces of σ̂ linked by the blocks of π
    let n = sigma_hat.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for b in pi.blocks() {
        for w in b.windows(2) {
            let (x, y) = (find(&mut parent, sigma_hat[w[0] - 1]), find(&mut parent, sigma_hat[w[1] - 1]));
            parent[x] = y;
        }
    }
    let root = find(&mut parent, sigma_hat[0]);
    sigma_hat.iter().all(|&s| find(&mut parent, s) == root)
}

/// `κ_m` of products of pairs, by `Σ_{Π∈NC(2m), Π∨σ̂=1} κ_Π`.
fn kappa_of_pairs<S: Scalar>(letters: &[Letter], k: &dyn Functional<S>) -> Result<S> {
    let n = letters.len();
    let sigma_hat: Vec<usize> = (0..n).map(|i| i / 2).collect();
    let mut acc = S::zero();
    for pi in nc_cached(n)?.iter() {
        if join_with(&sigma_hat, pi) {
            acc = acc + kappa_pi_letters(pi, letters, k)?;
        }
    }
    Ok(acc)
}

fn kappa_pi_letters<S: Scalar>(pi: &NcPartition, letters: &[Letter], k: &dyn Functional<S>) -> Result<S> {
    let mut acc = S::one();
    for b in pi.blocks() {
        let sub: Vec<Letter> = b.iter().map(|&i| letters[i - 1]).collect();
        acc = acc * k.eval(&sub)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// `Σ_{π∈NC(n)} |Kr(π)| κ_π[a₁b₁,…,aₙbₙ] = Σ_{Π∈NC(2n)} |Kr(Π)| κ_Π[a₁,b₁,…,aₙ,bₙ]`
/// for free `{aᵢ}`, `{bᵢ}` with the given cumulants. The left side is
/// computed twice: by the product formula and from moments.
pub fn check_core_lemma<S: Scalar>(a: &[Letter], b: &[Letter], ka: Arc<dyn Functional<S>>, kb: Arc<dyn Functional<S>>) -> Result<Report> {
    let n = a.len();
    if b.len() != n || n == 0 {
        return Err(Error::Dimension { expected: n, got: b.len() });
    }
    let mut r = Report::new(format!("core lemma, n = {n}"));
    let kappa = VanishingMixed::new(&[a.to_vec(), b.to_vec()], vec![ka, kb])?;
    let inter: Vec<Letter> = (0..n).flat_map(|i| [a[i], b[i]]).collect();

    let mut rhs = S::zero();
    for pi in nc_cached(2 * n)?.iter() {
        let k = kappa_pi_letters(pi, &inter, &kappa)?;
        if !k.is_zero() {
            rhs = rhs + S::from_i64(kreweras(pi).len() as i64) * k;
        }
    }

    let mut lhs = S::zero();
    for pi in nc_cached(n)?.iter() {
        let mut k = S::one();
        for blk in pi.blocks() {
            let sub: Vec<Letter> = blk.iter().flat_map(|&i| [a[i - 1], b[i - 1]]).collect();
            k = k * kappa_of_pairs(&sub, &kappa)?;
        }
        lhs = lhs + S::from_i64(kreweras(pi).len() as i64) * k;
    }

    let moments = FromCumulants(kappa);
    let entries: Vec<Poly<S>> = (0..n).map(|i| Poly::word(vec![a[i], b[i]])).collect();
    let via_moments = kreweras_weighted(entries, &moments)?;

    r.check("product formula = moments", || format!("n={n}"), &via_moments, &lhs);
    r.check("left = right", || format!("n={n}"), &rhs, &lhs);
    Ok(r)
}

fn power<S: Scalar>(x: Letter, d: &Dist<S>) -> Arc<dyn Functional<S>> {
    Arc::new(PowerFunctional::new(x, d.moments().to_vec()))
}

fn pow_poly<S: Scalar>(x: &Poly<S>, n: usize) -> Poly<S> {
    x.pow(n)
}

/// The Markov–Krein propositions for `a₁ ~ μ₁`, `a₂ ~ μ₂` free:
/// the law of `ã` under `(ψ, ψ′)` is `(μ, μ − τ)`, additively and
/// multiplicatively. Engine words are expanded up to `engine_order`.
pub fn check_mk_propositions<S: Scalar>(mu1: &Dist<S>, mu2: &Dist<S>, k: usize, engine_order: usize) -> Result<Report> {
    let mut r = Report::new("Markov–Krein propositions");
    let (a1, a2) = (Letter::new(0), Letter::new(1));
    let ctx = CompressionContext::from_mains(vec![
        Group::new("A1", vec![a1], Role::Main, power(a1, mu1)),
        Group::new("A2", vec![a2], Role::Main, power(a2, mu2)),
    ])?;
    let with_tau = |mu: &Dist<S>| -> Result<InfDist<S>> {
        let tau = inverse_mk_uni(mu, k)?;
        let inf = mu.moments()[..=k].iter().zip(tau.moments()).map(|(m, t)| m.clone() - t.clone()).collect();
        InfDist::new(mu.truncate(k)?, inf)
    };
    let p = ctx.p();
    let tilde = |x: &Poly<S>| p.mul(x).mul(&p);

    // (ψ, ψ′)(ãⁿ) = (μₙ, μₙ − τₙ)
    let d1 = with_tau(mu1)?;
    for n in 1..=engine_order.min(k) {
        let v = ctx.eval(&vec![a1; n])?;
        r.check("ψ(ãⁿ) = μ(xⁿ)", || format!("n={n}"), &d1.std.moments()[n], &v.std);
        r.check("ψ′(ãⁿ) = μ(xⁿ) − τ(xⁿ)", || format!("n={n}"), &d1.inf[n], &v.inf);
    }

    // additive
    let d2 = with_tau(mu2)?;
    let sum = inf_free_add(&d1, &d2, k)?;
    let want = with_tau(&free_add(mu1, mu2, k)?)?;
    for n in 1..=k {
        r.check("(μ₁,μ₁−τ₁) ⊞ (μ₂,μ₂−τ₂) = (μ,μ−τ), std", || format!("n={n}"), &want.std.moments()[n], &sum.std.moments()[n]);
        r.check("(μ₁,μ₁−τ₁) ⊞ (μ₂,μ₂−τ₂) = (μ,μ−τ), inf", || format!("n={n}"), &want.inf[n], &sum.inf[n]);
    }
    let s_tilde = tilde(&Poly::letter(a1)).add(&tilde(&Poly::letter(a2)));
    for n in 1..=engine_order.min(k) {
        let v = ctx.psi_poly(&pow_poly(&s_tilde, n))?;
        r.check("ψ′((ã₁+ã₂)ⁿ)", || format!("n={n}"), &want.inf[n], &v.inf);
    }

    // multiplicative
    let prod = free_mult(mu1, mu2, k)?;
    let tau = inverse_mk_uni(&prod, k)?;
    let x = tilde(&Poly::word(vec![a1, a2]));
    let big_x = tilde(&Poly::letter(a1)).mul(&tilde(&Poly::letter(a2)));
    for n in 1..=engine_order.min(k) {
        let (xn, bxn) = (pow_poly(&x, n), pow_poly(&big_x, n));
        let lhs = ctx.phi_prime_poly(&xn)?;
        let rhs = ctx.phi_prime_poly(&bxn)?;
        r.check("φ′((pa₁a₂p)ⁿ) = φ′((pa₁pa₂p)ⁿ)", || format!("n={n}"), &lhs, &rhs);
        r.check("ψ((pa₁a₂p)ⁿ) = (μ₁⊠μ₂)(xⁿ)", || format!("n={n}"), &prod.moments()[n], &ctx.phi_poly(&xn)?);
        r.check("φ′((pa₁a₂p)ⁿ) = −τ(xⁿ)", || format!("n={n}"), &-tau.moments()[n].clone(), &lhs);
    }
    Ok(r)
}

/// Second infinitesimal moments of `x = pa₁a₂p + pa₂a₁p` and
/// `X = ã₁ã₂ + ã₂ã₁`, termwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Anticommutator<S> {
    /// `φ′(x²)` and its four terms.
    pub phi_prime_x2: S,
    pub terms_x2: [S; 4],
    /// `φ′(X²)` and its four terms.
    pub phi_prime_big_x2: S,
    pub terms_big_x2: [S; 4],
    /// `Σ|Kr(π)|κ_π` summed over the same four terms.
    pub mk_x2: S,
    pub mk_big_x2: S,
}

pub fn anticommutator<S: Scalar>(ctx: &CompressionContext<S>, a1: Letter, a2: Letter) -> Result<Anticommutator<S>> {
    let p = ctx.p();
    let tilde = |x: Poly<S>| p.mul(&x).mul(&p);
    let (u, v) = (tilde(Poly::word(vec![a1, a2])), tilde(Poly::word(vec![a2, a1])));
    let (t1, t2) = (tilde(Poly::letter(a1)), tilde(Poly::letter(a2)));
    let (big_u, big_v) = (t1.mul(&t2), t2.mul(&t1));
    let pairs = |x: &Poly<S>, y: &Poly<S>| [x.mul(x), x.mul(y), y.mul(x), y.mul(y)];
    let eval4 = |ps: [Poly<S>; 4]| -> Result<[S; 4]> {
        Ok([ctx.phi_prime_poly(&ps[0])?, ctx.phi_prime_poly(&ps[1])?, ctx.phi_prime_poly(&ps[2])?, ctx.phi_prime_poly(&ps[3])?])
    };
    let terms_x2 = eval4(pairs(&u, &v))?;
    let terms_big_x2 = eval4(pairs(&big_u, &big_v))?;
    let sum = |t: &[S; 4]| t.iter().cloned().fold(S::zero(), |a, b| a + b);

    let phi = ctx.phi();
    let (w12, w21) = (Poly::word(vec![a1, a2]), Poly::word(vec![a2, a1]));
    let mut mk_x2 = S::zero();
    for (x, y) in [(&w12, &w12), (&w12, &w21), (&w21, &w12), (&w21, &w21)] {
        mk_x2 = mk_x2 + kreweras_weighted(vec![x.clone(), y.clone()], &phi)?;
    }
    let mut mk_big_x2 = S::zero();
    for w in [[a1, a2, a1, a2], [a1, a2, a2, a1], [a2, a1, a1, a2], [a2, a1, a2, a1]] {
        mk_big_x2 = mk_big_x2 + inverse_mk_multi(&w, &phi)?;
    }
    Ok(Anticommutator {
        phi_prime_x2: sum(&terms_x2),
        terms_x2,
        phi_prime_big_x2: sum(&terms_big_x2),
        terms_big_x2,
        mk_x2,
        mk_big_x2,
    })
}

/// Standard semicircular `a₁, a₂`, free.
pub fn anticommutator_counterexample() -> Result<Anticommutator<Q>> {
    let sc: Vec<Q> = [1, 0, 1, 0, 2, 0, 5, 0, 14].iter().map(|&v| q(v, 1)).collect();
    let (a1, a2) = (Letter::new(0), Letter::new(1));
    let ctx = CompressionContext::from_mains(vec![
        Group::new("A1", vec![a1], Role::Main, Arc::new(PowerFunctional::new(a1, sc.clone()))),
        Group::new("A2", vec![a2], Role::Main, Arc::new(PowerFunctional::new(a2, sc))),
    ])?;
    anticommutator(&ctx, a1, a2)
}
