use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::moments::{canonicalize, Functional, Letter, Word};
use crate::scalars::{Dual, Scalar};

struct Groups<S> {
    group_of: HashMap<Letter, usize>,
    marg: Vec<Arc<dyn Functional<S>>>,
}

impl<S: Scalar> Groups<S> {
    fn new(letters: &[Vec<Letter>], marg: Vec<Arc<dyn Functional<S>>>) -> Result<Self> {
        if letters.len() != marg.len() {
            return Err(Error::Dimension { expected: letters.len(), got: marg.len() });
        }
        let mut group_of = HashMap::new();
        for (g, ls) in letters.iter().enumerate() {
            for &l in ls {
                if group_of.insert(l, g).is_some() {
                    return Err(Error::Malformed(format!("generator #{} in two groups", l.id)));
                }
            }
        }
        Ok(Groups { group_of, marg })
    }

    fn runs(&self, w: &[Letter]) -> Result<Vec<(usize, Word)>> {
        let mut out: Vec<(usize, Word)> = Vec::new();
        for &l in w {
            let g = *self
                .group_of
                .get(&l)
                .ok_or_else(|| Error::UnknownGenerator(format!("#{}", l.id)))?;
            match out.last_mut() {
                Some((h, run)) if *h == g => run.push(l),
                _ => out.push((g, vec![l])),
            }
        }
        Ok(out)
    }
}

fn join<'a>(parts: impl Iterator<Item = &'a Word>) -> Word {
    let mut w: Word = parts.flatten().copied().collect();
    canonicalize(&mut w);
    w
}

/// Products of all runs outside `mask`, merged and canonicalized.
fn remaining(runs: &[(usize, Word)], mask: usize) -> Word {
    join(runs.iter().enumerate().filter(|(k, _)| mask & (1 << k) == 0).map(|(_, r)| &r.1))
}

/// Freeness by the centering recursion
/// `φ(b₁⋯b_m) = −Σ_{T≠∅} Π_{k∈T}(−φ(b_k)) φ(Π_{k∉T} b_k)`,
/// which is `φ(Π(b_k − φ(b_k))) = 0` solved for the leading term.
/// Over [`Dual`] scalars this is infinitesimal freeness.
pub struct FreeEngine<S> {
    g: Groups<S>,
    memo: Mutex<HashMap<Word, S>>,
}

impl<S: Scalar> FreeEngine<S> {
    pub fn new(letters: &[Vec<Letter>], marg: Vec<Arc<dyn Functional<S>>>) -> Result<Self> {
        Ok(FreeEngine { g: Groups::new(letters, marg)?, memo: Mutex::new(HashMap::new()) })
    }
}

impl<S: Scalar> Functional<S> for FreeEngine<S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        if w.is_empty() {
            return Ok(S::one());
        }
        let runs = self.g.runs(w)?;
        if runs.len() == 1 {
            return self.g.marg[runs[0].0].eval(w);
        }
        if let Some(v) = self.memo.lock().unwrap().get(w) {
            return Ok(v.clone());
        }
        let c: Vec<S> = runs.iter().map(|(g, r)| self.g.marg[*g].eval(r)).collect::<Result<_>>()?;
        let zero_mask = c.iter().enumerate().fold(0usize, |m, (k, v)| if v.is_zero() { m | 1 << k } else { m });
        let mut acc = S::zero();
        for mask in 1..(1usize << runs.len()) {
            if mask & zero_mask != 0 {
                continue;
            }
            let mut coef = S::one();
            for (k, ck) in c.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    coef = coef * -ck.clone();
                }
            }
            acc = acc + coef * self.eval(&remaining(&runs, mask))?;
        }
        let v = -acc;
        self.memo.lock().unwrap().insert(w.to_vec(), v.clone());
        Ok(v)
    }
}

/// Rule (B): the product of the marginals over maximal runs.
pub struct BooleanEngine<S> {
    g: Groups<S>,
}

impl<S: Scalar> BooleanEngine<S> {
    pub fn new(letters: &[Vec<Letter>], marg: Vec<Arc<dyn Functional<S>>>) -> Result<Self> {
        Ok(BooleanEngine { g: Groups::new(letters, marg)? })
    }
}

impl<S: Scalar> Functional<S> for BooleanEngine<S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        let mut acc = S::one();
        for (g, r) in self.g.runs(w)? {
            acc = acc * self.g.marg[g].eval(&r)?;
        }
        Ok(acc)
    }
}

/// Rule (M): `φ(y₀x₁y₁⋯xₙyₙ) = φ(x₁⋯xₙ) Π φ(y_k)`, `x` from group `x`.
pub struct MonotoneEngine<S> {
    g: Groups<S>,
    x: usize,
}

impl<S: Scalar> MonotoneEngine<S> {
    pub fn new(letters: &[Vec<Letter>], marg: Vec<Arc<dyn Functional<S>>>, x: usize) -> Result<Self> {
        if letters.len() != 2 || x > 1 {
            return Err(Error::Malformed("rule (M) needs an ordered pair of groups".into()));
        }
        Ok(MonotoneEngine { g: Groups::new(letters, marg)?, x })
    }
}

impl<S: Scalar> Functional<S> for MonotoneEngine<S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        let runs = self.g.runs(w)?;
        let xs = join(runs.iter().filter(|(g, _)| *g == self.x).map(|(_, r)| r));
        let mut acc = if xs.is_empty() { S::one() } else { self.g.marg[self.x].eval(&xs)? };
        for (g, r) in &runs {
            if *g != self.x {
                acc = acc * self.g.marg[*g].eval(r)?;
            }
        }
        Ok(acc)
    }
}

/// Trivial independence for non-unital `Φ`: zero as soon as two groups appear.
pub struct TrivialEngine<S> {
    g: Groups<S>,
}

impl<S: Scalar> TrivialEngine<S> {
    pub fn new(letters: &[Vec<Letter>], marg: Vec<Arc<dyn Functional<S>>>) -> Result<Self> {
        Ok(TrivialEngine { g: Groups::new(letters, marg)? })
    }
}

impl<S: Scalar> Functional<S> for TrivialEngine<S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        let runs = self.g.runs(w)?;
        match runs.len() {
            0 => Ok(S::zero()),
            1 => self.g.marg[runs[0].0].eval(w),
            _ => Ok(S::zero()),
        }
    }
}

/// `Φ(a₀f₁a₁⋯fₙaₙ) = φ(a₀aₙ) Π_{1≤i<n} φ(aᵢ) Φ(f₁⋯fₙ)` on words with at
/// least one perturbation letter; missing `a₀`, `aₙ` are units.
pub struct CyclicEngine<S> {
    main: Arc<dyn Functional<S>>,
    pert: Arc<dyn Functional<S>>,
    perts: HashSet<Letter>,
    traced: bool,
}

impl<S: Scalar> CyclicEngine<S> {
    pub fn new(main: Arc<dyn Functional<S>>, pert: Arc<dyn Functional<S>>, perts: &[Letter], traced: bool) -> Self {
        CyclicEngine { main, pert, perts: perts.iter().copied().collect(), traced }
    }

    pub fn is_pert(&self, l: &Letter) -> bool {
        self.perts.contains(l)
    }

    pub fn main(&self) -> &Arc<dyn Functional<S>> {
        &self.main
    }

    pub fn pert(&self) -> &Arc<dyn Functional<S>> {
        &self.pert
    }
}

impl<S: Scalar> Functional<S> for CyclicEngine<S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        let first = w.iter().position(|l| self.is_pert(l));
        let last = w.iter().rposition(|l| self.is_pert(l));
        let (Some(first), Some(last)) = (first, last) else {
            return Err(Error::WrongEngine("word has no perturbation letter".into()));
        };
        let (a0, an) = (&w[..first], &w[last + 1..]);
        let outer: Word = if self.traced { [an, a0].concat() } else { [a0, an].concat() };
        let mut acc = self.main.eval(&canonical(outer))?;
        let mut fs = Vec::new();
        let mut run: Word = Vec::new();
        for &l in &w[first..=last] {
            if self.is_pert(&l) {
                if !run.is_empty() {
                    acc = acc * self.main.eval(&canonical(std::mem::take(&mut run)))?;
                }
                fs.push(l);
            } else {
                run.push(l);
            }
        }
        if acc.is_zero() {
            return Ok(acc);
        }
        Ok(acc * self.pert.eval(&canonical(fs))?)
    }
}

fn canonical(mut w: Word) -> Word {
    canonicalize(&mut w);
    w
}

/// Rule (CF): `ψ` on words, given `φ` and `ψ` marginals, by
/// `ψ(Π(b_k − φ(b_k))) = Π(ψ(b_k) − φ(b_k))` solved for the leading term.
pub struct CFreeEngine<S> {
    g: Groups<S>,
    psi: Vec<Arc<dyn Functional<S>>>,
    memo: Mutex<HashMap<Word, S>>,
}

impl<S: Scalar> CFreeEngine<S> {
    pub fn new(
        letters: &[Vec<Letter>],
        phi: Vec<Arc<dyn Functional<S>>>,
        psi: Vec<Arc<dyn Functional<S>>>,
    ) -> Result<Self> {
        if psi.len() != phi.len() {
            return Err(Error::Dimension { expected: phi.len(), got: psi.len() });
        }
        Ok(CFreeEngine { g: Groups::new(letters, phi)?, psi, memo: Mutex::new(HashMap::new()) })
    }
}

impl<S: Scalar> Functional<S> for CFreeEngine<S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        if w.is_empty() {
            return Ok(S::one());
        }
        let runs = self.g.runs(w)?;
        if runs.len() == 1 {
            return self.psi[runs[0].0].eval(w);
        }
        if let Some(v) = self.memo.lock().unwrap().get(w) {
            return Ok(v.clone());
        }
        let c: Vec<S> = runs.iter().map(|(g, r)| self.g.marg[*g].eval(r)).collect::<Result<_>>()?;
        let mut v = S::one();
        for ((g, r), ck) in runs.iter().zip(&c) {
            v = v * (self.psi[*g].eval(r)? - ck.clone());
        }
        for mask in 1..(1usize << runs.len()) {
            let mut coef = S::one();
            for (k, ck) in c.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    coef = coef * -ck.clone();
                }
            }
            if coef.is_zero() {
                continue;
            }
            v = v - coef * self.eval(&remaining(&runs, mask))?;
        }
        self.memo.lock().unwrap().insert(w.to_vec(), v.clone());
        Ok(v)
    }
}

/// `(φ, φ′)` on the type-B′ algebra: `φ` vanishes on words with a
/// perturbation letter, `φ′` vanishes on main words.
pub struct BPrimeEngine<S> {
    main: Arc<dyn Functional<S>>,
    cyclic: CyclicEngine<S>,
}

impl<S: Scalar> BPrimeEngine<S> {
    pub fn new(main: Arc<dyn Functional<S>>, cyclic: CyclicEngine<S>) -> Self {
        BPrimeEngine { main, cyclic }
    }

    pub fn has_pert(&self, w: &[Letter]) -> bool {
        w.iter().any(|l| self.cyclic.is_pert(l))
    }

    pub fn phi(&self, w: &[Letter]) -> Result<S> {
        if self.has_pert(w) {
            Ok(S::zero())
        } else {
            self.main.eval(w)
        }
    }

    /// `Φ`, defined on words with a perturbation letter.
    pub fn big_phi(&self, w: &[Letter]) -> Result<S> {
        self.cyclic.eval(w)
    }

    pub fn phi_prime(&self, w: &[Letter]) -> Result<S> {
        if self.has_pert(w) {
            self.cyclic.eval(w)
        } else {
            Ok(S::zero())
        }
    }

    pub fn cyclic(&self) -> &CyclicEngine<S> {
        &self.cyclic
    }
}

impl<S: Scalar> Functional<Dual<S>> for BPrimeEngine<S> {
    fn eval(&self, w: &[Letter]) -> Result<Dual<S>> {
        Ok(Dual::new(self.phi(w)?, self.phi_prime(w)?))
    }
}

/// Rule (IF) in closed form for `b̊ⱼ = wⱼ − φ(wⱼ)` along an alternating
/// tuple, from the marginals alone: zero unless `n` is odd and the group
/// pattern is a palindrome, in which case
/// `φ′(b̊₁⋯b̊ₙ) = φ(b̊₁b̊ₙ)φ(b̊₂b̊ₙ₋₁)⋯φ′(b̊_{(n+1)/2})`.
pub fn if_closed_form<S: Scalar>(marg: &[Arc<dyn Functional<Dual<S>>>], tuple: &[(usize, Word)]) -> Result<Dual<S>> {
    let n = tuple.len();
    if tuple.windows(2).any(|p| p[0].0 == p[1].0) {
        return Err(Error::Malformed("tuple is not alternating".into()));
    }
    let get = |g: usize| marg.get(g).ok_or(Error::Dimension { expected: marg.len(), got: g + 1 });
    if n == 0 {
        return Ok(Dual::new(S::one(), S::zero()));
    }
    if n % 2 == 0 || (0..n / 2).any(|j| tuple[j].0 != tuple[n - 1 - j].0) {
        return Ok(Dual::new(S::zero(), S::zero()));
    }
    let mut v = S::one();
    for j in 0..n / 2 {
        let (g, a) = &tuple[j];
        let (_, b) = &tuple[n - 1 - j];
        let f = get(*g)?;
        let ab = f.eval(&canonical([a.as_slice(), b.as_slice()].concat()))?.std;
        v = v * (ab - f.eval(a)?.std * f.eval(b)?.std);
    }
    let (g, mid) = &tuple[n / 2];
    v = v * get(*g)?.eval(mid)?.inf;
    Ok(Dual::new(S::zero(), v))
}
