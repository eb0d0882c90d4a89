//! Moment–cumulant formulas over `NC(n)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{canonicalize, eval_poly, Functional, Letter, Poly, Word};
use crate::error::{Error, Result};
use crate::ncpart::{interval, mobius, mobius_full, nc_cached, NcPartition};
use crate::scalars::Scalar;

fn check_len(pi: &NcPartition, n: usize) -> Result<()> {
    if pi.n() != n {
        Err(Error::Dimension { expected: pi.n(), got: n })
    } else {
        Ok(())
    }
}

fn block_product<S: Scalar>(entries: &[Poly<S>], block: &[usize]) -> Poly<S> {
    let mut acc = Poly::one();
    for &i in block {
        acc = acc.mul(&entries[i - 1]);
    }
    acc
}

fn block_mask(block: &[usize]) -> u64 {
    block.iter().fold(0u64, |m, &i| m | 1 << (i - 1))
}

/// `φ_π[b₁,…,bₙ] = Π_{V∈π} φ(Π_{i∈V} bᵢ)`.
pub fn phi_pi<S: Scalar>(pi: &NcPartition, entries: &[Poly<S>], f: &(impl Functional<S> + ?Sized)) -> Result<S> {
    check_len(pi, entries.len())?;
    let mut acc = S::one();
    for b in pi.blocks() {
        acc = acc * eval_poly(f, &block_product(entries, b))?;
    }
    Ok(acc)
}

/// `κ_π[b₁,…,bₙ] = Σ_{σ≤π} φ_σ μ(σ,π)`, literally.
pub fn free_cumulant<S: Scalar>(pi: &NcPartition, entries: &[Poly<S>], f: &(impl Functional<S> + ?Sized)) -> Result<S> {
    check_len(pi, entries.len())?;
    let n = pi.n();
    let mut block_values: HashMap<u64, S> = HashMap::new();
    let mut acc = S::zero();
    for sigma in interval(&NcPartition::zero(n), pi)?.elements {
        let mu = mobius(&sigma, pi)?;
        let mut term = S::from_i64(mu);
        for b in sigma.blocks() {
            let key = block_mask(b);
            let v = match block_values.get(&key) {
                Some(v) => v.clone(),
                None => {
                    let v = eval_poly(f, &block_product(entries, b))?;
                    block_values.insert(key, v.clone());
                    v
                }
            };
            term = term * v;
        }
        acc = acc + term;
    }
    Ok(acc)
}

/// Free cumulants of a fixed list of entries, memoized by index tuple.
/// `κₙ` comes from `φ(b_{i₁}⋯b_{iₙ}) = Σ_{π∈NC(n)} κ_π`.
pub struct CumulantEngine<'a, S> {
    entries: Vec<Poly<S>>,
    f: &'a (dyn Functional<S> + 'a),
    memo: HashMap<Vec<usize>, S>,
}

impl<'a, S: Scalar> CumulantEngine<'a, S> {
    pub fn new(entries: Vec<Poly<S>>, f: &'a (dyn Functional<S> + 'a)) -> Self {
        CumulantEngine { entries, f, memo: HashMap::new() }
    }

    pub fn entries(&self) -> &[Poly<S>] {
        &self.entries
    }

    /// `κ_k[b_{i₁},…,b_{i_k}]` for 0-based indices.
    pub fn kappa(&mut self, idx: &[usize]) -> Result<S> {
        if idx.is_empty() {
            return Err(Error::Malformed("cumulant of no entries".into()));
        }
        if let Some(v) = self.memo.get(idx) {
            return Ok(v.clone());
        }
        let mut prod = Poly::one();
        for &i in idx {
            prod = prod.mul(self.entries.get(i).ok_or(Error::Dimension { expected: self.entries.len(), got: i + 1 })?);
        }
        let mut v = eval_poly(self.f, &prod)?;
        let k = idx.len();
        if k > 1 {
            for pi in nc_cached(k)?.iter() {
                if pi.len() == 1 {
                    continue;
                }
                v = v - self.kappa_pi_idx(pi, idx)?;
            }
        }
        self.memo.insert(idx.to_vec(), v.clone());
        Ok(v)
    }

    fn kappa_pi_idx(&mut self, pi: &NcPartition, idx: &[usize]) -> Result<S> {
        let mut acc = S::one();
        for b in pi.blocks() {
            let sub: Vec<usize> = b.iter().map(|&x| idx[x - 1]).collect();
            acc = acc * self.kappa(&sub)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// `κ_π` on the entries in their given order.
    pub fn kappa_pi(&mut self, pi: &NcPartition) -> Result<S> {
        check_len(pi, self.entries.len())?;
        let idx: Vec<usize> = (0..self.entries.len()).collect();
        self.kappa_pi_idx(pi, &idx)
    }
}

/// `φ′_σ` by the Leibniz rule: one primed block at a time.
fn phi_prime_sigma<S: Scalar>(vals: &[(S, S)]) -> S {
    let mut acc = S::zero();
    for (j, (_, d)) in vals.iter().enumerate() {
        let mut term = d.clone();
        for (k, (v, _)) in vals.iter().enumerate() {
            if k != j {
                term = term * v.clone();
            }
        }
        acc = acc + term;
    }
    acc
}

/// `κ′_π` computed without dual numbers: `κ_V` and `κ′_V` by Möbius inversion
/// with the Leibniz form of `φ′_σ`, then `κ′_π = Σ_V κ′_V Π_{W≠V} κ_W`.
pub fn kappa_prime_leibniz<S: Scalar>(
    pi: &NcPartition,
    entries: &[Poly<S>],
    phi: &(impl Functional<S> + ?Sized),
    phi_prime: &(impl Functional<S> + ?Sized),
) -> Result<S> {
    check_len(pi, entries.len())?;
    let mut block_values: HashMap<u64, (S, S)> = HashMap::new();
    let mut value = |elems: &[usize]| -> Result<(S, S)> {
        let key = block_mask(elems);
        if let Some(v) = block_values.get(&key) {
            return Ok(v.clone());
        }
        let p = block_product(entries, elems);
        let v = (eval_poly(phi, &p)?, eval_poly(phi_prime, &p)?);
        block_values.insert(key, v.clone());
        Ok(v)
    };
    let mut per_block = Vec::new();
    for v in pi.blocks() {
        let k = v.len();
        let (mut kap, mut kap_d) = (S::zero(), S::zero());
        for sigma in nc_cached(k)?.iter() {
            let mu = S::from_i64(sigma_mobius(sigma)?);
            let mut vals = Vec::with_capacity(sigma.len());
            let mut prod = S::one();
            for b in sigma.blocks() {
                let elems: Vec<usize> = b.iter().map(|&x| v[x - 1]).collect();
                let pv = value(&elems)?;
                prod = prod * pv.0.clone();
                vals.push(pv);
            }
            kap = kap + mu.clone() * prod;
            kap_d = kap_d + mu * phi_prime_sigma(&vals);
        }
        per_block.push((kap, kap_d));
    }
    Ok(phi_prime_sigma(&per_block))
}

fn sigma_mobius(sigma: &NcPartition) -> Result<i64> {
    // μ(σ, 1_k) is the product of μ(0,1) over the blocks of Kr(σ)
    Ok(crate::ncpart::kreweras(sigma).blocks().iter().map(|b| mobius_full(b.len())).product())
}

/// `φ(w) = Σ_{σ∈NC(n)} κ_σ[w]`, with `kappa` giving `κ_k` on sub-words
/// (letter sequences, not canonicalized).
pub fn moments_from_cumulants<S: Scalar>(kappa: &(impl Functional<S> + ?Sized), w: &[Letter]) -> Result<S> {
    let n = w.len();
    if n == 0 {
        return Ok(S::one());
    }
    let mut acc = S::zero();
    let mut memo: HashMap<u64, S> = HashMap::new();
    'outer: for sigma in nc_cached(n)?.iter() {
        let mut term = S::one();
        for b in sigma.blocks() {
            let key = block_mask(b);
            let v = match memo.get(&key) {
                Some(v) => v.clone(),
                None => {
                    let sub: Word = b.iter().map(|&x| w[x - 1]).collect();
                    let v = kappa.eval(&sub)?;
                    memo.insert(key, v.clone());
                    v
                }
            };
            if v.is_zero() {
                continue 'outer;
            }
            term = term * v;
        }
        acc = acc + term;
    }
    Ok(acc)
}

/// Cumulants of a moment functional, as a functional on letter sequences:
/// `w ↦ κ_{|w|}[w₁,…,w_k]`.
pub struct CumulantsOf<F, S> {
    f: F,
    memo: Mutex<HashMap<Word, S>>,
}

impl<F: Functional<S>, S: Scalar> CumulantsOf<F, S> {
    pub fn new(f: F) -> Self {
        CumulantsOf { f, memo: Mutex::new(HashMap::new()) }
    }
}

impl<F: Functional<S>, S: Scalar> Functional<S> for CumulantsOf<F, S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        if w.is_empty() {
            return Err(Error::Malformed("cumulant of the empty word".into()));
        }
        if let Some(v) = self.memo.lock().unwrap().get(w) {
            return Ok(v.clone());
        }
        let mut c = w.to_vec();
        canonicalize(&mut c);
        let mut v = self.f.eval(&c)?;
        if w.len() > 1 {
            for pi in nc_cached(w.len())?.iter() {
                if pi.len() == 1 {
                    continue;
                }
                let mut term = S::one();
                for b in pi.blocks() {
                    let sub: Word = b.iter().map(|&x| w[x - 1]).collect();
                    term = term * self.eval(&sub)?;
                    if term.is_zero() {
                        break;
                    }
                }
                v = v - term;
            }
        }
        self.memo.lock().unwrap().insert(w.to_vec(), v.clone());
        Ok(v)
    }
}

/// Cumulants that vanish on any letter sequence touching two groups.
pub struct VanishingMixed<S> {
    group_of: HashMap<Letter, usize>,
    per_group: Vec<Arc<dyn Functional<S>>>,
}

impl<S: Scalar> VanishingMixed<S> {
    /// `groups[i]` lists the letters whose cumulants are `cumulants[i]`.
    pub fn new(groups: &[Vec<Letter>], cumulants: Vec<Arc<dyn Functional<S>>>) -> Result<Self> {
        if groups.len() != cumulants.len() {
            return Err(Error::Dimension { expected: groups.len(), got: cumulants.len() });
        }
        let mut group_of = HashMap::new();
        for (g, ls) in groups.iter().enumerate() {
            for &l in ls {
                if group_of.insert(l, g).is_some_and(|h| h != g) {
                    return Err(Error::Malformed(format!("letter #{} in two groups", l.id)));
                }
            }
        }
        Ok(VanishingMixed { group_of, per_group: cumulants })
    }
}

impl<S: Scalar> Functional<S> for VanishingMixed<S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        let g0 = *self
            .group_of
            .get(&w[0])
            .ok_or_else(|| Error::UnknownGenerator(format!("#{}", w[0].id)))?;
        for l in &w[1..] {
            match self.group_of.get(l) {
                Some(&g) if g == g0 => {}
                Some(_) => return Ok(S::zero()),
                None => return Err(Error::UnknownGenerator(format!("#{}", l.id))),
            }
        }
        self.per_group[g0].eval(w)
    }
}

/// The moment functional of a cumulant functional.
pub struct FromCumulants<K>(pub K);

impl<S: Scalar, K: Functional<S>> Functional<S> for FromCumulants<K> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        moments_from_cumulants(&self.0, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{DualOf, InfPart, PowerFunctional, RandomFunctional, StdPart};
    use crate::ncpart::{enumerate_nc, leq, NcPartition};
    use crate::scalars::{q, Dual, Q};

    fn semicircle(x: Letter) -> PowerFunctional<Q> {
        PowerFunctional::new(x, [1, 0, 1, 0, 2, 0, 5].iter().map(|&v| q(v, 1)).collect())
    }

    #[test]
    fn semicircle_cumulants() {
        let x = Letter::new(0);
        let f = semicircle(x);
        for n in 1..=6 {
            let entries = vec![Poly::letter(x); n];
            let k = free_cumulant(&NcPartition::one(n), &entries, &f).unwrap();
            assert_eq!(k, q(if n == 2 { 1 } else { 0 }, 1), "n={n}");
        }
    }

    #[test]
    fn free_poisson_moments_are_catalan() {
        let x = Letter::new(0);
        let kappa = PowerFunctional::new(x, vec![q(1, 1); 9]);
        for n in 1..=8 {
            let m: Q = moments_from_cumulants(&kappa, &vec![x; n]).unwrap();
            assert_eq!(m, q(crate::ncpart::catalan(n) as i64, 1));
        }
        let semi = PowerFunctional::new(x, (0..9).map(|k| q((k == 2) as i64, 1)).collect());
        for k in 1..=4 {
            let m: Q = moments_from_cumulants(&semi, &vec![x; 2 * k]).unwrap();
            assert_eq!(m, q(crate::ncpart::catalan(k) as i64, 1));
        }
    }

    #[test]
    fn kappa_prime_at_two() {
        let (a, b) = (Letter::new(0), Letter::new(1));
        let f = RandomFunctional::dual(3);
        let entries: Vec<Poly<Dual<Q>>> = vec![Poly::letter(a), Poly::letter(b)];
        let k = free_cumulant(&NcPartition::one(2), &entries, &f).unwrap();
        let v = |w: &[Letter]| -> Dual<Q> { f.eval(w).unwrap() };
        let expect = v(&[a, b]).inf - v(&[a]).inf * v(&[b]).std - v(&[a]).std * v(&[b]).inf;
        assert_eq!(k.inf, expect);
        let k1 = free_cumulant(&NcPartition::one(1), &entries[..1], &f).unwrap();
        assert_eq!(k1, v(&[a]));
    }

    #[test]
    fn leibniz_route_matches_dual_route() {
        let letters = [Letter::new(0), Letter::new(1), Letter::projection(2)];
        for seed in 0..20u64 {
            let f = RandomFunctional::dual(seed);
            let n = 2 + (seed as usize % 3);
            let entries: Vec<Poly<Dual<Q>>> =
                (0..n).map(|i| Poly::letter(letters[(i + seed as usize) % 3])).collect();
            let plain: Vec<Poly<Q>> = entries.iter().map(|p| p.map(|c| c.std.clone())).collect();
            for pi in enumerate_nc(n).unwrap() {
                let dual = free_cumulant(&pi, &entries, &f).unwrap();
                let lz = kappa_prime_leibniz(&pi, &plain, &StdPart(&f), &InfPart(&f)).unwrap();
                assert_eq!(dual.inf, lz, "π={pi}");
            }
        }
    }

    #[test]
    fn engine_matches_mobius_sum() {
        let (a, b) = (Letter::new(0), Letter::new(1));
        let f = RandomFunctional::new(11);
        let entries: Vec<Poly<Q>> = vec![
            Poly::letter(a),
            Poly::letter(b).add(&Poly::letter(a)),
            Poly::word(vec![a, b]),
            Poly::letter(b),
        ];
        let mut eng = CumulantEngine::new(entries.clone(), &f);
        for pi in enumerate_nc(4).unwrap() {
            assert_eq!(eng.kappa_pi(&pi).unwrap(), free_cumulant(&pi, &entries, &f).unwrap());
        }
    }

    #[test]
    fn round_trip_through_cumulants() {
        let letters = [Letter::new(0), Letter::new(1)];
        let f = RandomFunctional::new(5);
        let kap = CumulantsOf::new(&f);
        for w in crate::moments::all_words(&letters, 5) {
            let m: Q = moments_from_cumulants(&kap, &w).unwrap();
            assert_eq!(m, Functional::<Q>::eval(&f, &w).unwrap());
        }
    }

    #[test]
    fn multiplicativity_over_disjoint_grounds() {
        let f = RandomFunctional::new(2);
        let ls: Vec<Poly<Q>> = (0..5).map(|i| Poly::letter(Letter::new(i))).collect();
        let pi = NcPartition::new(2, vec![vec![1, 2]]).unwrap();
        let rho = NcPartition::new(3, vec![vec![1, 3], vec![2]]).unwrap();
        let joint = NcPartition::new(5, vec![vec![1, 2], vec![3, 5], vec![4]]).unwrap();
        let lhs = phi_pi(&pi, &ls[..2], &f).unwrap() * phi_pi(&rho, &ls[2..], &f).unwrap();
        assert_eq!(lhs, phi_pi(&joint, &ls, &f).unwrap());
    }

    // Σ_{π≤σ} κ′_π[p,…,p] = −|σ| with p = 1 − q, φ̃(qᵏ) = ε.
    #[test]
    fn projection_lemma_small() {
        let qq = Letter::projection(0);
        let f = DualOf(
            PowerFunctional::new(qq, vec![q(1, 1), q(0, 1)]),
            PowerFunctional::new(qq, vec![q(0, 1), q(1, 1)]),
        );
        let p: Poly<Dual<Q>> = Poly::one().sub(&Poly::letter(qq));
        for n in 1..=5 {
            let entries = vec![p.clone(); n];
            for sigma in enumerate_nc(n).unwrap() {
                let mut sum = q(0, 1);
                for pi in enumerate_nc(n).unwrap() {
                    if leq(&pi, &sigma).unwrap() {
                        sum += free_cumulant(&pi, &entries, &f).unwrap().inf;
                    }
                }
                assert_eq!(sum, q(-(sigma.len() as i64), 1));
            }
            let one = free_cumulant(&NcPartition::one(n), &entries, &f).unwrap();
            assert_eq!(one.inf, q(if n % 2 == 0 { 1 } else { -1 }, 1));
        }
    }
}
