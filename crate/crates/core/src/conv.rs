//! Convolutions of truncated moment sequences through `G`, `F = 1/G` and
//! `F⁻¹`. Every result is checked against the exact order its inputs
//! determine; asking for more is an [`Error::OrderShortfall`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{Scalar, TruncSeries};

/// Moments `m₀ = 1, m₁, …, m_K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dist<S> {
    moments: Vec<S>,
}

impl<S: Scalar> std::fmt::Display for Dist<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let m: Vec<String> = self.moments.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", m.join(", "))
    }
}

impl<S: Scalar> Dist<S> {
    pub fn new(moments: Vec<S>) -> Result<Self> {
        match moments.first() {
            Some(m0) if m0.is_one() => Ok(Dist { moments }),
            _ => Err(Error::NotADistribution("m₀ must equal 1".into())),
        }
    }

    /// `δ_c` to order `k`.
    pub fn delta(c: S, k: usize) -> Self {
        let mut m = vec![S::one()];
        for _ in 0..k {
            let next = m.last().unwrap().clone() * c.clone();
            m.push(next);
        }
        Dist { moments: m }
    }

    pub fn order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn moments(&self) -> &[S] {
        &self.moments
    }

    pub fn moment(&self, n: usize) -> Option<&S> {
        self.moments.get(n)
    }

    pub fn truncate(&self, k: usize) -> Result<Self> {
        need(self.order(), k)?;
        Ok(Dist { moments: self.moments[..=k].to_vec() })
    }

    fn g(&self) -> Result<TruncSeries<S>> {
        TruncSeries::g_from_moments(&self.moments, self.order())
    }

    fn f(&self) -> Result<TruncSeries<S>> {
        self.g()?.reciprocal()
    }
}

/// `(μ, ν)` with `ν(1) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfDist<S> {
    pub std: Dist<S>,
    pub inf: Vec<S>,
}

impl<S: Scalar> InfDist<S> {
    pub fn new(std: Dist<S>, inf: Vec<S>) -> Result<Self> {
        if inf.first().map(|v| !v.is_zero()).unwrap_or(true) {
            return Err(Error::NotADistribution("infinitesimal part must vanish at 1".into()));
        }
        Ok(InfDist { std, inf })
    }
}

fn need(have: usize, k: usize) -> Result<()> {
    if have < k {
        Err(Error::OrderShortfall { need: k, have })
    } else {
        Ok(())
    }
}

fn from_g<S: Scalar>(g: &TruncSeries<S>, k: usize) -> Result<Vec<S>> {
    let m = g.moments_from_g()?;
    if m.len() < k + 1 {
        return Err(Error::OrderShortfall { need: k, have: m.len().saturating_sub(1) });
    }
    Ok(m[..=k].to_vec())
}

fn dist_from_f<S: Scalar>(f: &TruncSeries<S>, k: usize) -> Result<Dist<S>> {
    Dist::new(from_g(&f.reciprocal()?, k)?)
}

fn g_of_sequence<S: Scalar>(nu: &[S]) -> Result<TruncSeries<S>> {
    if nu.is_empty() {
        return Err(Error::OrderShortfall { need: 0, have: 0 });
    }
    TruncSeries::g_from_sequence(nu, nu.len() - 1)
}

/// `[M(z)^s]_j` for `s ≤ k`, `j ≤ k − s`, with `M(z) = Σ mₙzⁿ`.
fn power_table<S: Scalar>(m: &[S], k: usize) -> Vec<Vec<S>> {
    let mut t = vec![vec![S::one()]];
    for s in 1..=k {
        let len = k - s + 1;
        let prev = &t[s - 1];
        let row: Vec<S> = (0..len)
            .map(|j| {
                let mut acc = S::zero();
                for i in 0..=j {
                    if i < m.len() && j - i < prev.len() {
                        acc = acc + m[i].clone() * prev[j - i].clone();
                    }
                }
                acc
            })
            .collect();
        t.push(row);
    }
    t
}

/// Free cumulants `κ₁, …, κ_K` (index 0 is unused and zero), from
/// `mₙ = Σ_{s=1}^{n} κ_s [M(z)^s]_{n−s}`.
pub fn free_cumulants<S: Scalar>(mu: &Dist<S>) -> Vec<S> {
    let k = mu.order();
    let m = mu.moments();
    let t = power_table(m, k);
    let mut kappa = vec![S::zero(); k + 1];
    for n in 1..=k {
        let mut v = m[n].clone();
        for s in 1..n {
            v = v - kappa[s].clone() * t[s][n - s].clone();
        }
        kappa[n] = v;
    }
    kappa
}

/// Inverse of [`free_cumulants`].
pub fn moments_from_free_cumulants<S: Scalar>(kappa: &[S]) -> Dist<S> {
    let k = kappa.len().saturating_sub(1);
    let mut m = vec![S::one()];
    for n in 1..=k {
        let t = power_table(&m, n);
        let mut v = kappa[n].clone();
        for s in 1..n {
            v = v + kappa[s].clone() * t[s][n - s].clone();
        }
        m.push(v);
    }
    Dist { moments: m }
}

/// `μ₁ ⊞ μ₂` by adding free cumulants.
pub fn free_add<S: Scalar>(m1: &Dist<S>, m2: &Dist<S>, k: usize) -> Result<Dist<S>> {
    need(m1.order().min(m2.order()), k)?;
    let (k1, k2) = (free_cumulants(&m1.truncate(k)?), free_cumulants(&m2.truncate(k)?));
    let sum: Vec<S> = k1.into_iter().zip(k2).map(|(a, b)| a + b).collect();
    Ok(moments_from_free_cumulants(&sum))
}

/// `μ₁ ⊞ μ₂` from `F⁻¹ = F₁⁻¹ + F₂⁻¹ − z`.
pub fn free_add_via_f<S: Scalar>(m1: &Dist<S>, m2: &Dist<S>, k: usize) -> Result<Dist<S>> {
    need(m1.order().min(m2.order()), k)?;
    let (f1, f2) = (m1.f()?, m2.f()?);
    let inv = f1.comp_inverse()?.add(&f2.comp_inverse()?).sub(&TruncSeries::z(f1.prec().min(f2.prec())));
    dist_from_f(&inv.with_kind(crate::scalars::SeriesKind::F).comp_inverse()?, k)
}

/// `μ₁ ⊎ μ₂`: `F = F₁ + F₂ − z`.
pub fn boolean_add<S: Scalar>(m1: &Dist<S>, m2: &Dist<S>, k: usize) -> Result<Dist<S>> {
    need(m1.order().min(m2.order()), k)?;
    let (f1, f2) = (m1.f()?, m2.f()?);
    let f = f1.add(&f2).sub(&TruncSeries::z(f1.prec()));
    dist_from_f(&f, k)
}

/// `μ₁ ▷ μ₂`: `F = F₁ ∘ F₂`. Note `μ₁ ▷ μ₂ = μ₂ ◁ μ₁`.
pub fn monotone_add<S: Scalar>(m1: &Dist<S>, m2: &Dist<S>, k: usize) -> Result<Dist<S>> {
    need(m1.order().min(m2.order()), k)?;
    dist_from_f(&m1.f()?.compose(&m2.f()?)?, k)
}

/// Moments of `(ab)ⁿ` for free `a ~ μ₁`, `b ~ μ₂`, `n ≤ K`.
///
/// Each moment is evaluated in the free product through vanishing mixed
/// cumulants, splitting off the block of the first letter.
pub fn free_mult<S: Scalar>(m1: &Dist<S>, m2: &Dist<S>, k: usize) -> Result<Dist<S>> {
    need(m1.order().min(m2.order()), k)?;
    let kap = [free_cumulants(&m1.truncate(k)?), free_cumulants(&m2.truncate(k)?)];
    let mut m = vec![S::one()];
    for n in 1..=k {
        let word: Vec<usize> = (0..2 * n).map(|i| i % 2).collect();
        m.push(FreeWord { word: &word, kappa: &kap, memo: HashMap::new() }.interval(0, 2 * n));
    }
    Dist::new(m)
}

struct FreeWord<'a, S> {
    word: &'a [usize],
    kappa: &'a [Vec<S>],
    memo: HashMap<(usize, usize), S>,
}

impl<S: Scalar> FreeWord<'_, S> {
    fn interval(&mut self, i: usize, j: usize) -> S {
        if i >= j {
            return S::one();
        }
        if let Some(v) = self.memo.get(&(i, j)) {
            return v.clone();
        }
        let mut chain: HashMap<(usize, usize), S> = HashMap::new();
        let v = self.blocks_from(i, 1, j, &mut chain);
        self.memo.insert((i, j), v.clone());
        v
    }

    // Sum over the rest of the block through `v` (already holding `s`
    // elements) and the gaps it leaves inside `[v, j)`.
    fn blocks_from(&mut self, v: usize, s: usize, j: usize, chain: &mut HashMap<(usize, usize), S>) -> S {
        if let Some(x) = chain.get(&(v, s)) {
            return x.clone();
        }
        let g = self.word[v];
        let kap = self.kappa[g].get(s).cloned().unwrap_or_else(S::zero);
        let mut acc = if kap.is_zero() { S::zero() } else { kap * self.interval(v + 1, j) };
        for u in v + 1..j {
            if self.word[u] != g {
                continue;
            }
            let gap = self.interval(v + 1, u);
            if gap.is_zero() {
                continue;
            }
            acc = acc + gap * self.blocks_from(u, s + 1, j, chain);
        }
        chain.insert((v, s), acc.clone());
        acc
    }
}

/// The c-free sum: `F = F_{ν₁}∘ω₁ + F_{ν₂}∘ω₂ − F_{μ₁⊞μ₂}` with
/// `ωᵢ = F_{μᵢ}⁻¹ ∘ F_{μ₁⊞μ₂}`.
pub fn cfree_add<S: Scalar>(mu1: &Dist<S>, nu1: &Dist<S>, mu2: &Dist<S>, nu2: &Dist<S>, k: usize) -> Result<Dist<S>> {
    let order = [mu1, nu1, mu2, nu2].iter().map(|d| d.order()).min().unwrap();
    need(order, k)?;
    let fb = free_add(mu1, mu2, order)?.f()?;
    let w1 = mu1.f()?.comp_inverse()?.compose(&fb)?;
    let w2 = mu2.f()?.comp_inverse()?.compose(&fb)?;
    let f = nu1.f()?.compose(&w1)?.add(&nu2.f()?.compose(&w2)?).sub(&fb);
    dist_from_f(&f, k)
}

/// The subordination functions `ωᵢ = F_{μᵢ}⁻¹ ∘ F_{μ₁⊞μ₂}`.
pub fn subordination<S: Scalar>(mu1: &Dist<S>, mu2: &Dist<S>) -> Result<(TruncSeries<S>, TruncSeries<S>)> {
    let order = mu1.order().min(mu2.order());
    let fb = free_add(mu1, mu2, order)?.f()?;
    Ok((mu1.f()?.comp_inverse()?.compose(&fb)?, mu2.f()?.comp_inverse()?.compose(&fb)?))
}

/// `(μ₁, ν₁) ⊞ (μ₂, ν₂)` with `G_ν = G_{ν₁}(ω₁)ω₁′ + G_{ν₂}(ω₂)ω₂′`.
pub fn inf_free_add<S: Scalar>(d1: &InfDist<S>, d2: &InfDist<S>, k: usize) -> Result<InfDist<S>> {
    let order = [d1.std.order(), d2.std.order(), d1.inf.len().saturating_sub(1), d2.inf.len().saturating_sub(1)]
        .into_iter()
        .min()
        .unwrap();
    need(order, k)?;
    let std = free_add(&d1.std, &d2.std, order)?;
    let (w1, w2) = subordination(&d1.std, &d2.std)?;
    let g = g_of_sequence(&d1.inf)?
        .compose(&w1)?
        .mul(&w1.derivative())
        .add(&g_of_sequence(&d2.inf)?.compose(&w2)?.mul(&w2.derivative()));
    InfDist::new(std.truncate(k)?, from_g(&g, k)?)
}

/// `μ ◁̃ ν`: the infinitesimal law of `a + f` for cyclic-antimonotone
/// `(a, f)`, `G = G_ν(F_μ) F_μ′`. `ν` need not vanish at 1.
pub fn cyclic_antimonotone_conv<S: Scalar>(mu: &Dist<S>, nu: &[S], k: usize) -> Result<Vec<S>> {
    need(mu.order().min(nu.len().saturating_sub(1)), k)?;
    let f = mu.f()?;
    from_g(&g_of_sequence(nu)?.compose(&f)?.mul(&f.derivative()), k)
}
