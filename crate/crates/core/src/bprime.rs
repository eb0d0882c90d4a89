//! The type-B′ algebra `𝒜⟨ℱ⟩`: elements `a + f`, the functionals `φ`, `φ′`
//! and `φ_P`, compression by `p = 1 − q`, and the equivalence checkers.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::indep::{BPrimeEngine, FreeEngine, Law, Role, Scenario};
use crate::moments::{all_words, canonicalize, eval_poly, FnFunctional, Functional, Letter, Poly, Word};
use crate::report::Report;
use crate::scalars::{Dual, Scalar};

/// `a + f` with `a` in the main algebra and `f` in the perturbation ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct BPrimeElement<S: Scalar> {
    pub main: Poly<S>,
    pub pert: Poly<S>,
}

impl<S: Scalar> BPrimeElement<S> {
    pub fn one() -> Self {
        BPrimeElement { main: Poly::one(), pert: Poly::zero() }
    }

    pub fn zero() -> Self {
        BPrimeElement { main: Poly::zero(), pert: Poly::zero() }
    }

    /// Sorts the terms of `p` by whether their word contains a perturbation letter.
    pub fn split(p: &Poly<S>, is_pert: impl Fn(&Letter) -> bool) -> Self {
        BPrimeElement {
            main: p.filter(|w| !w.iter().any(&is_pert)),
            pert: p.filter(|w| w.iter().any(&is_pert)),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        BPrimeElement { main: self.main.add(&o.main), pert: self.pert.add(&o.pert) }
    }

    pub fn scale(&self, c: &S) -> Self {
        BPrimeElement { main: self.main.scale(c), pert: self.pert.scale(c) }
    }

    /// The element as one polynomial `a + f`.
    pub fn total(&self) -> Poly<S> {
        self.main.add(&self.pert)
    }
}

/// `(a₁, f₁)(a₂, f₂) = (a₁a₂, a₁f₂ + f₁a₂ + f₁f₂)`.
pub fn bprime_mul<S: Scalar>(b1: &BPrimeElement<S>, b2: &BPrimeElement<S>) -> BPrimeElement<S> {
    BPrimeElement {
        main: b1.main.mul(&b2.main),
        pert: b1.main.mul(&b2.pert).add(&b1.pert.mul(&b2.main)).add(&b1.pert.mul(&b2.pert)),
    }
}

/// `(a, ξ)` in the link algebra `𝒜 ⊕ ℳ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeBElement<S: Scalar> {
    pub main: Poly<S>,
    pub pert: Poly<S>,
}

/// `(a, ξ)(b, η) = (ab, aη + ξb)`; the `ξη` term is absent.
pub fn typeb_mul<S: Scalar>(m1: &TypeBElement<S>, m2: &TypeBElement<S>) -> TypeBElement<S> {
    TypeBElement { main: m1.main.mul(&m2.main), pert: m1.main.mul(&m2.pert).add(&m1.pert.mul(&m2.main)) }
}

/// `φ(a + f) = φ(a)`.
pub fn phi_of<S: Scalar>(b: &BPrimeElement<S>, e: &BPrimeEngine<S>) -> Result<S> {
    let mut acc = S::zero();
    for (w, c) in b.main.terms() {
        if e.has_pert(w) {
            return Err(Error::Malformed("main part contains a perturbation letter".into()));
        }
        acc = acc + c.clone() * e.phi(w)?;
    }
    Ok(acc)
}

/// `φ′(a + f) = Φ(f)`.
pub fn phi_prime_of<S: Scalar>(b: &BPrimeElement<S>, e: &BPrimeEngine<S>) -> Result<S> {
    let mut acc = S::zero();
    for (w, c) in b.pert.terms() {
        if !e.has_pert(w) {
            return Err(Error::Malformed("perturbation part contains a main word".into()));
        }
        acc = acc + c.clone() * e.big_phi(w)?;
    }
    Ok(acc)
}

/// `φ_P(b) = Φ(P·b)/Φ(P)`.
pub struct PhiP<S: Scalar> {
    engine: Arc<BPrimeEngine<S>>,
    p: Poly<S>,
    inv_norm: S,
}

impl<S: Scalar> PhiP<S> {
    pub fn new(engine: Arc<BPrimeEngine<S>>, p: Poly<S>) -> Result<Self> {
        if p.terms().any(|(w, _)| !engine.has_pert(w)) {
            return Err(Error::Malformed("P must lie in the perturbation ideal".into()));
        }
        let norm = eval_poly(&FnFunctional::new(|w: &[Letter]| engine.big_phi(w)), &p)?;
        let inv_norm = norm.try_inv().ok_or_else(|| Error::UndefinedFunctional("Φ(P) = 0".into()))?;
        Ok(PhiP { engine, p, inv_norm })
    }

    pub fn of(&self, b: &BPrimeElement<S>) -> Result<S> {
        eval_poly(self, &b.total())
    }
}

impl<S: Scalar> Functional<S> for PhiP<S> {
    fn eval(&self, w: &[Letter]) -> Result<S> {
        let mut acc = S::zero();
        for (u, c) in self.p.terms() {
            let mut uw: Word = u.iter().chain(w).copied().collect();
            canonicalize(&mut uw);
            acc = acc + c.clone() * self.engine.big_phi(&uw)?;
        }
        Ok(acc * self.inv_norm.clone())
    }
}

/// `p = 1 − q`.
pub fn p_of<S: Scalar>(q: Letter) -> Poly<S> {
    Poly::one().sub(&Poly::letter(q))
}

/// `p x p`.
pub fn sandwich<S: Scalar>(x: &Poly<S>, q: Letter) -> Poly<S> {
    let p = p_of(q);
    p.mul(x).mul(&p)
}

/// `p a₁ p a₂ p ⋯ p aₙ p`, split into main and perturbation parts.
pub fn compress<S: Scalar>(w: &[Letter], q: Letter) -> BPrimeElement<S> {
    let p = p_of(q);
    let mut acc = p.clone();
    for &a in w {
        acc = acc.mul(&Poly::letter(a)).mul(&p);
    }
    BPrimeElement::split(&acc, |l| *l == q)
}

/// Which side of Theorem B′ ⇔ IF to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `𝒜ᵢ′` and each `ℱⱼ′ = ℂ1 ⊕ ℱⱼ` infinitesimally free.
    Full,
    /// `𝒜ᵢ′` and `ℱ′ = ⟨ℱⱼ′⟩` infinitesimally free.
    Weak,
}

struct PertMarginal<S>(Arc<dyn Functional<S>>);

impl<S: Scalar> Functional<Dual<S>> for PertMarginal<S> {
    fn eval(&self, w: &[Letter]) -> Result<Dual<S>> {
        if w.is_empty() {
            return Ok(Dual::real(S::one()));
        }
        Ok(Dual::new(S::zero(), self.0.eval(w)?))
    }
}

struct MainMarginal<S>(Arc<dyn Functional<S>>);

impl<S: Scalar> Functional<Dual<S>> for MainMarginal<S> {
    fn eval(&self, w: &[Letter]) -> Result<Dual<S>> {
        Ok(Dual::real(self.0.eval(w)?))
    }
}

/// The infinitesimally free engine over `𝒜ᵢ′` and the `ℱⱼ′` (or `ℱ′`).
pub fn inf_free_model<S: Scalar>(s: &Scenario<S>, variant: Variant) -> Result<FreeEngine<Dual<S>>> {
    let mut letters = Vec::new();
    let mut marg: Vec<Arc<dyn Functional<Dual<S>>>> = Vec::new();
    for g in s.groups.iter().filter(|g| g.role == Role::Main) {
        letters.push(g.letters.clone());
        marg.push(Arc::new(MainMarginal(g.phi.clone())));
    }
    let perts: Vec<_> = s.groups.iter().filter(|g| g.role == Role::Perturbation).collect();
    match variant {
        Variant::Full => {
            for g in perts {
                letters.push(g.letters.clone());
                marg.push(Arc::new(PertMarginal(g.phi.clone())));
            }
        }
        Variant::Weak if !perts.is_empty() => {
            letters.push(perts.iter().flat_map(|g| g.letters.iter().copied()).collect());
            let joint = s.cyclic_engine(s.law)?.pert().clone();
            marg.push(Arc::new(PertMarginal(joint)));
        }
        Variant::Weak => {}
    }
    FreeEngine::new(&letters, marg)
}

/// Compares the type-B′ engine with the infinitesimally free model on all
/// words up to `max_len`.
pub fn check_bprime_iff_inf_free<S: Scalar>(s: &Scenario<S>, max_len: usize, variant: Variant) -> Result<Report> {
    let bp = s.bprime_engine()?;
    let model = inf_free_model(s, variant)?;
    let mut r = Report::new(format!("type B′ vs infinitesimal freeness ({variant:?})"));
    for w in all_words(&s.letters(None), max_len) {
        let lhs: Dual<S> = bp.eval(&w)?;
        let rhs = model.eval(&w)?;
        r.check("(φ, φ′) agree", || s.format_word(&w), &lhs, &rhs);
    }
    Ok(r)
}

/// The three parts of the conditional-freeness theorem.
#[derive(Clone, Debug)]
pub struct CFreeTheoremReport {
    /// `ℬᵢ = 𝒜ᵢ⟨ℱᵢ⟩` c-free w.r.t. `(φ, φ_P)`.
    pub cfree: Report,
    /// `ℱᵢ` Boolean independent w.r.t. `φ_P`.
    pub boolean: Report,
    /// `φ_P(b₁⋯bₙ) = φ_P(F₁⋯Fₙ)` for `φ`-centered `bⱼ = aⱼ + Fⱼ`.
    pub lemma: Report,
}

impl CFreeTheoremReport {
    pub fn holds(&self) -> bool {
        self.lemma.ok() && self.cfree.ok() == self.boolean.ok()
    }

    pub fn summary(&self) -> Report {
        let mut r = Report::new("c-free theorem");
        r.checked = self.cfree.checked + self.boolean.checked + self.lemma.checked;
        if self.cfree.ok() != self.boolean.ok() {
            r.fail(
                "c-free ⇔ Boolean",
                String::new(),
                format!("c-free {}", self.boolean.ok()),
                format!("c-free {}", self.cfree.ok()),
            );
        }
        r.absorb(Report { checked: 0, ..self.lemma.clone() });
        r
    }
}

/// Checks the equivalence for the algebras `ℬᵢ` generated by the paired
/// `(main group, perturbation group)` indices in `pairs`, with `φ_P` built
/// from `p`. The scenario must be weak-B′ or B′ with `P`'s letters declared
/// on the perturbation side.
pub fn check_cfree_theorem<S: Scalar>(
    s: &Scenario<S>,
    pairs: &[(usize, usize)],
    p: &Poly<S>,
    max_len: usize,
) -> Result<CFreeTheoremReport> {
    if !matches!(s.law, Law::WeakBprime | Law::Bprime) {
        return Err(Error::WrongEngine("the c-free theorem needs a type-B′ scenario".into()));
    }
    let bp = Arc::new(s.bprime_engine()?);
    let phi_p = PhiP::new(bp.clone(), p.clone())?;
    let mut pair_of: HashMap<Letter, usize> = HashMap::new();
    let mut witness_letter = Vec::new();
    for (k, &(m, f)) in pairs.iter().enumerate() {
        let (gm, gf) = (s.groups.get(m), s.groups.get(f));
        let (Some(gm), Some(gf)) = (gm, gf) else {
            return Err(Error::Dimension { expected: s.groups.len(), got: m.max(f) + 1 });
        };
        if gm.role != Role::Main || gf.role != Role::Perturbation {
            return Err(Error::Malformed("pairs must be (main, perturbation) groups".into()));
        }
        for &l in gm.letters.iter().chain(&gf.letters) {
            pair_of.insert(l, k);
        }
        witness_letter.push(gf.letters[0]);
    }
    let tuples = |letters: &[Letter]| -> Vec<Vec<(usize, Word)>> {
        all_words(letters, max_len)
            .into_iter()
            .map(|w| {
                let mut t: Vec<(usize, Word)> = Vec::new();
                for l in w {
                    let k = pair_of[&l];
                    match t.last_mut() {
                        Some((h, run)) if *h == k => run.push(l),
                        _ => t.push((k, vec![l])),
                    }
                }
                t
            })
            .filter(|t| t.len() >= 2)
            .collect()
    };
    let show = |t: &[(usize, Word)]| t.iter().map(|(_, w)| s.format_word(w)).collect::<Vec<_>>().join(" | ");
    let phi = FnFunctional::new(|w: &[Letter]| bp.phi(w));
    let centered = |w: &Word| -> Result<Poly<S>> { Ok(Poly::word(w.clone()).sub(&Poly::constant(bp.phi(w)?))) };

    let mut cfree = Report::new("c-free w.r.t. (φ, φ_P)");
    let mut lemma = Report::new("φ_P on centered products");
    let b_letters: Vec<Letter> = pair_of.keys().copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    for t in tuples(&b_letters) {
        let b: Vec<Poly<S>> = t.iter().map(|(_, w)| centered(w)).collect::<Result<_>>()?;
        let prod = b.iter().fold(Poly::one(), |acc, x| acc.mul(x));
        cfree.check("φ-freeness", || show(&t), &S::zero(), &eval_poly(&phi, &prod)?);
        let mut expected = S::one();
        for x in &b {
            expected = expected * eval_poly(&phi_p, x)?;
        }
        cfree.check("rule (CF) for φ_P", || show(&t), &expected, &eval_poly(&phi_p, &prod)?);

        let bs: Vec<Poly<S>> = t.iter().zip(&b).map(|((k, _), x)| x.add(&Poly::letter(witness_letter[*k]))).collect();
        let full = bs.iter().fold(Poly::one(), |acc, x| acc.mul(x));
        let fs = bs.iter().fold(Poly::one(), |acc, x| acc.mul(&x.filter(|w| bp.has_pert(w))));
        lemma.check("φ_P(b₁⋯bₙ) = φ_P(F₁⋯Fₙ)", || show(&t), &eval_poly(&phi_p, &fs)?, &eval_poly(&phi_p, &full)?);
    }
    let mut boolean = Report::new("Boolean w.r.t. φ_P");
    let f_letters: Vec<Letter> = b_letters.iter().copied().filter(|l| bp.has_pert(&[*l])).collect();
    for t in tuples(&f_letters) {
        let w: Word = t.iter().flat_map(|(_, w)| w.iter().copied()).collect();
        let mut expected = S::one();
        for (_, x) in &t {
            expected = expected * phi_p.eval(x)?;
        }
        boolean.check("rule (B) for φ_P", || show(&t), &expected, &phi_p.eval(&canon(w))?);
    }
    Ok(CFreeTheoremReport { cfree, boolean, lemma })
}

fn canon(mut w: Word) -> Word {
    canonicalize(&mut w);
    w
}
