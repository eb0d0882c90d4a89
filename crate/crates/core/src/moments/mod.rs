//! Words over a generator alphabet, noncommutative polynomials and
//! (possibly infinitesimal) moment functionals.

pub mod cumulants;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalars::{Dual, Scalar, Q};

pub use cumulants::{
    free_cumulant, kappa_prime_leibniz, moments_from_cumulants, phi_pi, CumulantEngine,
    CumulantsOf, FromCumulants, VanishingMixed,
};

/// A generator. Idempotent letters satisfy `q² = q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub id: u16,
    pub idempotent: bool,
}

impl Letter {
    pub const fn new(id: u16) -> Self {
        Letter { id, idempotent: false }
    }

    pub const fn projection(id: u16) -> Self {
        Letter { id, idempotent: true }
    }
}

/// A monomial; the empty word is the unit.
pub type Word = Vec<Letter>;

/// Collapses adjacent equal idempotent letters.
pub fn canonicalize(w: &mut Word) {
    w.dedup_by(|b, a| a == b && a.idempotent);
}

pub fn concat(a: &[Letter], b: &[Letter]) -> Word {
    let mut w = Vec::with_capacity(a.len() + b.len());
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    canonicalize(&mut w);
    w
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenKind {
    Main,
    Perturbation,
    Projection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub group: String,
    pub kind: GenKind,
    pub letter: Letter,
}

/// Named generators with their group and kind.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    gens: Vec<Generator>,
    by_name: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a generator; projections are idempotent.
    pub fn add(&mut self, name: &str, group: &str, kind: GenKind) -> Result<Letter> {
        if self.by_name.contains_key(name) {
            return Err(Error::Malformed(format!("generator `{name}` declared twice")));
        }
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::Malformed(format!("bad generator name `{name}`")));
        }
        let id = u16::try_from(self.gens.len())
            .map_err(|_| Error::Malformed("too many generators".into()))?;
        let letter = Letter { id, idempotent: kind == GenKind::Projection };
        self.by_name.insert(name.to_string(), self.gens.len());
        self.gens.push(Generator { name: name.into(), group: group.into(), kind, letter });
        Ok(letter)
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.by_name
            .get(name)
            .map(|&i| self.gens[i].letter)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn generator(&self, l: Letter) -> Result<&Generator> {
        self.gens
            .get(l.id as usize)
            .filter(|g| g.letter == l)
            .ok_or_else(|| Error::UnknownGenerator(format!("#{}", l.id)))
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn name(&self, l: Letter) -> &str {
        self.gens.get(l.id as usize).map(|g| g.name.as_str()).unwrap_or("?")
    }

    /// Parses whitespace-separated generator names; `"1"` or `""` is the unit.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut w = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            w.push(self.letter(tok)?);
        }
        canonicalize(&mut w);
        Ok(w)
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&l| self.name(l)).collect::<Vec<_>>().join(" ")
    }
}

/// Linear combination of canonical words.
#[derive(Clone, PartialEq)]
pub struct Poly<S> {
    terms: BTreeMap<Word, S>,
}

impl<S: Scalar> fmt::Debug for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| format!("({c})·{:?}", w.iter().map(|l| l.id).collect::<Vec<_>>()))
            .collect();
        write!(f, "{}", if parts.is_empty() { "0".into() } else { parts.join(" + ") })
    }
}

impl<S: Scalar> Default for Poly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> Poly<S> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::word(Vec::new())
    }

    pub fn word(mut w: Word) -> Self {
        canonicalize(&mut w);
        let mut terms = BTreeMap::new();
        terms.insert(w, S::one());
        Poly { terms }
    }

    pub fn letter(l: Letter) -> Self {
        Self::word(vec![l])
    }

    pub fn constant(c: S) -> Self {
        Self::term(Vec::new(), c)
    }

    pub fn term(mut w: Word, c: S) -> Self {
        canonicalize(&mut w);
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    fn add_term(&mut self, w: Word, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &S)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[Letter]) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero();
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                out.add_term(concat(w1, w2), c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Keeps the terms whose word satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&[Letter]) -> bool) -> Self {
        Poly { terms: self.terms.iter().filter(|(w, _)| keep(w)).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        let mut out = Poly::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    pub fn format(&self, a: &Alphabet) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("({c}) {}", a.format_word(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A linear functional on words. Implementations need not be unital.
pub trait Functional<S>: Send + Sync {
    fn eval(&self, w: &[Letter]) -> Result<S>;
}

impl<S, F: Functional<S> + ?Sized> Functional<S> for Arc<F> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        (**self).eval(w)
    }
}

impl<S, F: Functional<S> + ?Sized> Functional<S> for &F {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        (**self).eval(w)
    }
}

/// Linear extension to polynomials.
pub fn eval_poly<S: Scalar>(f: &(impl Functional<S> + ?Sized), p: &Poly<S>) -> Result<S> {
    let mut acc = S::zero();
    for (w, c) in p.terms() {
        acc = acc + c.clone() * f.eval(w)?;
    }
    Ok(acc)
}

/// Explicit word → value table. The unit evaluates to 1 unless overridden.
#[derive(Clone, Debug, Default)]
pub struct MomentTable<S> {
    values: HashMap<Word, S>,
    unital: bool,
}

impl<S: Scalar> MomentTable<S> {
    pub fn unital() -> Self {
        MomentTable { values: HashMap::new(), unital: true }
    }

    /// A table whose unit value is 0, for non-unital functionals such as `Φ`.
    pub fn non_unital() -> Self {
        MomentTable { values: HashMap::new(), unital: false }
    }

    pub fn insert(&mut self, mut w: Word, v: S) {
        canonicalize(&mut w);
        self.values.insert(w, v);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: Scalar> Functional<S> for MomentTable<S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        if let Some(v) = self.values.get(w) {
            return Ok(v.clone());
        }
        if w.is_empty() {
            return Ok(if self.unital { S::one() } else { S::zero() });
        }
        Err(Error::MissingData(format!(
            "no value for word {:?}",
            w.iter().map(|l| l.id).collect::<Vec<_>>()
        )))
    }
}

/// Distribution of a single generator: `w = xⁿ ↦ m_n`.
#[derive(Clone, Debug)]
pub struct PowerFunctional<S> {
    pub letter: Letter,
    pub moments: Vec<S>,
}

impl<S: Scalar> PowerFunctional<S> {
    pub fn new(letter: Letter, moments: Vec<S>) -> Self {
        PowerFunctional { letter, moments }
    }
}

impl<S: Scalar> Functional<S> for PowerFunctional<S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        if w.iter().any(|&l| l != self.letter) {
            return Err(Error::UnknownGenerator(format!("#{} is not the generator of this law", w[0].id)));
        }
        // q² = q: every nonempty power equals q
        let n = if self.letter.idempotent { w.len().min(1) } else { w.len() };
        self.moments
            .get(n)
            .cloned()
            .ok_or(Error::OrderShortfall { need: n, have: self.moments.len().saturating_sub(1) })
    }
}

/// A functional given by a closure.
pub struct FnFunctional<S, F>(pub F, std::marker::PhantomData<fn() -> S>);

impl<S, F> FnFunctional<S, F>
where
    F: Fn(&[Letter]) -> Result<S> + Send + Sync,
{
    pub fn new(f: F) -> Self {
        FnFunctional(f, std::marker::PhantomData)
    }
}

impl<S, F> Functional<S> for FnFunctional<S, F>
where
    F: Fn(&[Letter]) -> Result<S> + Send + Sync,
{
    fn eval(&self, w: &[Letter]) -> Result<S> {
        (self.0)(w)
    }
}

/// The `ε⁰` layer of a dual-valued functional.
pub struct StdPart<F>(pub F);
/// The `ε¹` layer of a dual-valued functional.
pub struct InfPart<F>(pub F);

impl<S: Scalar, F: Functional<Dual<S>>> Functional<S> for StdPart<F> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        Ok(self.0.eval(w)?.std)
    }
}

impl<S: Scalar, F: Functional<Dual<S>>> Functional<S> for InfPart<F> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        Ok(self.0.eval(w)?.inf)
    }
}

/// Combines `φ` and `φ′` into `φ̃ = φ + εφ′`.
pub struct DualOf<F, G>(pub F, pub G);

impl<S: Scalar, F: Functional<S>, G: Functional<S>> Functional<Dual<S>> for DualOf<F, G> {
    fn eval(&self, w: &[Letter]) -> Result<Dual<S>> {
        Ok(Dual::new(self.0.eval(w)?, self.1.eval(w)?))
    }
}

/// Embeds a plain functional as `φ + ε·0`.
pub struct Real<F>(pub F);

impl<S: Scalar, F: Functional<S>> Functional<Dual<S>> for Real<F> {
    fn eval(&self, w: &[Letter]) -> Result<Dual<S>> {
        Ok(Dual::real(self.0.eval(w)?))
    }
}

/// Small random rational `p/q` with `|p| ≤ span`, `1 ≤ q ≤ den`.
pub fn random_q(rng: &mut impl Rng, span: i64, den: i64) -> Q {
    crate::scalars::q(rng.random_range(-span..=span), rng.random_range(1..=den))
}

/// Lazily generated random values, fixed once drawn: a "generic" functional
/// for randomized identity checks. The unit is pinned by `unit`.
pub struct RandomFunctional {
    seed: u64,
    unit: Option<Dual<Q>>,
    dual: bool,
    cache: Mutex<HashMap<Word, Dual<Q>>>,
}

impl RandomFunctional {
    /// Plain rational values, unital.
    pub fn new(seed: u64) -> Self {
        RandomFunctional { seed, unit: Some(Dual::real(Q::from_i64(1))), dual: false, cache: Mutex::new(HashMap::new()) }
    }

    /// Values in `ℚ[ε]`, with `φ̃(1) = 1`.
    pub fn dual(seed: u64) -> Self {
        RandomFunctional { dual: true, ..Self::new(seed) }
    }

    /// No normalization at the unit; useful for cumulant tables.
    pub fn free_unit(mut self) -> Self {
        self.unit = None;
        self
    }

    fn value(&self, w: &[Letter]) -> Dual<Q> {
        if w.is_empty() {
            if let Some(u) = &self.unit {
                return u.clone();
            }
        }
        let mut cache = self.cache.lock().unwrap();
        if let Some(v) = cache.get(w) {
            return v.clone();
        }
        // seed derived from the word so values do not depend on query order
        let mut h: u64 = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        for l in w {
            h = h.rotate_left(17) ^ (l.id as u64 + 1).wrapping_mul(0xff51_afd7_ed55_8ccd);
            h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
        }
        h ^= w.len() as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let std = random_q(&mut rng, 5, 4);
        let inf = if self.dual { random_q(&mut rng, 5, 4) } else { Q::from_i64(0) };
        let v = Dual::new(std, inf);
        cache.insert(w.to_vec(), v.clone());
        v
    }
}

impl Functional<Q> for RandomFunctional {
    fn eval(&self, w: &[Letter]) -> Result<Q> {
        Ok(self.value(w).std)
    }
}

impl Functional<Dual<Q>> for RandomFunctional {
    fn eval(&self, w: &[Letter]) -> Result<Dual<Q>> {
        Ok(self.value(w))
    }
}

/// Every word of length `1..=max_len` over `letters`, shortest first.
pub fn all_words(letters: &[Letter], max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in letters {
                if l.idempotent && w.last() == Some(&l) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
