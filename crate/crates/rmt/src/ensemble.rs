//! An ensemble at one size: the deterministic inputs, the sampler, and the
//! limiting `(φ, φ′)` of its type-B′ scenario.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use nalgebra::DMatrix;
use ncprob_core::indep::{BPrimeEngine, Group, Law, Role, Scenario};
use ncprob_core::moments::{Alphabet, FnFunctional, Functional, GenKind, Letter, Poly, Word};
use ncprob_core::ncpart::catalan;
use ncprob_core::scalars::{q, q_to_f64, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cmat::{CMat, Op, C64};
use crate::haar::{haar_columns, sample_haar};
use crate::spec::{EnsembleSpec, Model, Spectrum};
use crate::{Error, Result};

const UNITARY_TOL: f64 = 1e-10;

struct MainLetter {
    letter: Letter,
    group: usize,
    diag: Vec<f64>,
}

struct PertLetter {
    letter: Letter,
    group: usize,
    values: Vec<f64>,
}

pub struct Ensemble {
    spec: EnsembleSpec,
    alphabet: Alphabet,
    engine: BPrimeEngine<Q>,
    mains: Vec<MainLetter>,
    main_groups: usize,
    perts: Vec<PertLetter>,
    pert_ranks: Vec<usize>,
    q: Option<Letter>,
}

fn index_of(labels: &mut Vec<String>, g: &str) -> usize {
    match labels.iter().position(|l| l == g) {
        Some(i) => i,
        None => {
            labels.push(g.to_string());
            labels.len() - 1
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Standard semicircle (radius 2) quantile by bisection.
fn semicircle_quantile(u: f64) -> f64 {
    let cdf = |x: f64| 0.5 + x * (4.0 - x * x).max(0.0).sqrt() / (4.0 * std::f64::consts::PI) + (x / 2.0).asin() / std::f64::consts::PI;
    let (mut lo, mut hi) = (-2.0, 2.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `list[⌊kL/n⌋]` for `k < n`.
fn blocks<T: Clone>(list: &[T], n: usize) -> Vec<T> {
    (0..n).map(|k| list[k * list.len() / n].clone()).collect()
}

/// `w ↦ Σ_{k<r} Π_{x∈w} vals[x][k]`, the trace of a product of commuting
/// diagonal matrices, over `len` slots and normalized by `norm`.
fn diagonal_functional(vals: HashMap<Letter, Vec<Q>>, len: usize, norm: Q) -> Arc<dyn Functional<Q>> {
    Arc::new(FnFunctional::new(move |w: &[Letter]| {
        let mut total = q(0, 1);
        for k in 0..len {
            let mut p = q(1, 1);
            for l in w {
                let v = vals.get(l).ok_or_else(|| ncprob_core::Error::UnknownGenerator(format!("#{}", l.id)))?;
                p *= v.get(k).cloned().unwrap_or_else(|| q(0, 1));
            }
            total += p;
        }
        Ok(total / norm.clone())
    }))
}

impl Ensemble {
    pub fn new(spec: &EnsembleSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n;
        let mut alphabet = Alphabet::new();
        let mut main_labels = Vec::new();
        let mut pert_labels = Vec::new();

        let mut mains = Vec::new();
        let mut main_exact: Vec<(usize, Letter, Spectrum)> = Vec::new();
        for m in &spec.mains {
            let g = index_of(&mut main_labels, &m.group);
            let letter = alphabet.add(&m.name, &format!("a:{}", m.group), GenKind::Main)?;
            let diag = match &m.spectrum {
                Spectrum::Eigenvalues(v) => {
                    let v: Vec<f64> = v.iter().map(|x| x.to_q().map(|x| q_to_f64(&x))).collect::<std::result::Result<_, _>>()?;
                    blocks(&v, n)
                }
                Spectrum::Semicircle(var) => {
                    let s = q_to_f64(&var.to_q()?).sqrt();
                    (0..n).map(|k| s * semicircle_quantile((k as f64 + 0.5) / n as f64)).collect()
                }
            };
            mains.push(MainLetter { letter, group: g, diag });
            main_exact.push((g, letter, m.spectrum.clone()));
        }

        let mut perts = Vec::new();
        let mut pert_exact: Vec<(usize, Letter, Vec<Q>)> = Vec::new();
        for p in &spec.perts {
            let g = index_of(&mut pert_labels, &p.group);
            let letter = alphabet.add(&p.name, &format!("f:{}", p.group), GenKind::Perturbation)?;
            let exact: Vec<Q> = p.eigenvalues.iter().map(|x| x.to_q()).collect::<std::result::Result<_, _>>()?;
            perts.push(PertLetter { letter, group: g, values: exact.iter().map(q_to_f64).collect() });
            pert_exact.push((g, letter, exact));
        }
        let q_letter = match spec.model {
            Model::Minor => Some(alphabet.add("q", "q", GenKind::Perturbation)?),
            _ => None,
        };

        let mut groups = Vec::new();
        for (g, label) in main_labels.iter().enumerate() {
            let members: Vec<&(usize, Letter, Spectrum)> = main_exact.iter().filter(|m| m.0 == g).collect();
            let letters: Vec<Letter> = members.iter().map(|m| m.1).collect();
            let phi: Arc<dyn Functional<Q>> = match &members[0].2 {
                Spectrum::Semicircle(var) => {
                    let var = var.to_q()?;
                    Arc::new(FnFunctional::new(move |w: &[Letter]| {
                        Ok(if w.len() % 2 == 1 {
                            q(0, 1)
                        } else {
                            num_pow(&var, w.len() / 2) * q(catalan(w.len() / 2) as i64, 1)
                        })
                    }))
                }
                Spectrum::Eigenvalues(_) => {
                    let mut lists = HashMap::new();
                    let mut period = 1;
                    for m in &members {
                        let Spectrum::Eigenvalues(v) = &m.2 else { unreachable!("semicircles are alone in their group") };
                        let v: Vec<Q> = v.iter().map(|x| x.to_q()).collect::<std::result::Result<_, _>>()?;
                        period = period / gcd(period, v.len()) * v.len();
                        lists.insert(m.1, v);
                    }
                    let vals = lists.into_iter().map(|(l, v)| (l, blocks(&v, period))).collect();
                    diagonal_functional(vals, period, q(period as i64, 1))
                }
            };
            groups.push(Group::new(&format!("a:{label}"), letters, Role::Main, phi));
        }

        let joint_over = |members: &[&(usize, Letter, Vec<Q>)]| {
            let len = members.iter().map(|m| m.2.len()).max().unwrap_or(0);
            diagonal_functional(members.iter().map(|m| (m.1, m.2.clone())).collect(), len, q(1, 1))
        };
        let all: Vec<&(usize, Letter, Vec<Q>)> = pert_exact.iter().collect();
        let joint = joint_over(&all);
        for (g, label) in pert_labels.iter().enumerate() {
            let members: Vec<&(usize, Letter, Vec<Q>)> = pert_exact.iter().filter(|m| m.0 == g).collect();
            let phi = match spec.model {
                Model::Bprime => joint_over(&members),
                _ => joint.clone(),
            };
            groups.push(Group::new(&format!("f:{label}"), members.iter().map(|m| m.1).collect(), Role::Perturbation, phi));
        }
        if let Some(ql) = q_letter {
            let phi: Arc<dyn Functional<Q>> = Arc::new(FnFunctional::new(|w: &[Letter]| Ok(if w.is_empty() { q(0, 1) } else { q(1, 1) })));
            groups.push(Group::new("q", vec![ql], Role::Perturbation, phi));
        }

        let law = if spec.model == Model::Bprime { Law::Bprime } else { Law::WeakBprime };
        let mut scenario = Scenario::new(law, groups)?;
        if spec.model == Model::WeakBprime && !perts.is_empty() {
            scenario = scenario.with_pert_joint(joint);
        }
        let engine = scenario.bprime_engine()?;

        let pert_ranks = (0..pert_labels.len())
            .map(|g| perts.iter().filter(|p| p.group == g).map(|p| p.values.len()).max().unwrap_or(0))
            .collect();
        Ok(Ensemble { spec: spec.clone(), alphabet, engine, mains, main_groups: main_labels.len(), perts, pert_ranks, q: q_letter })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn engine(&self) -> &BPrimeEngine<Q> {
        &self.engine
    }

    /// Parses a word into a polynomial; in the minor model `p` stands for `1 − q`.
    pub fn expand(&self, word: &str) -> Result<Poly<Q>> {
        let mut out = Poly::one();
        let mut any = false;
        for tok in word.split_whitespace() {
            any = true;
            let factor = match (tok, self.q) {
                ("p", Some(ql)) => Poly::one().sub(&Poly::letter(ql)),
                _ => Poly::letter(self.alphabet.letter(tok).map_err(|_| Error::UnknownLetter(tok.to_string()))?),
            };
            out = out.mul(&factor);
        }
        if !any {
            return Err(Error::Config("empty word".into()));
        }
        Ok(out)
    }

    pub fn has_pert(&self, w: &[Letter]) -> bool {
        self.engine.has_pert(w)
    }

    /// Exact limiting `(φ, φ′)` of a polynomial.
    pub fn predict(&self, p: &Poly<Q>) -> Result<(Q, Q)> {
        let (mut phi, mut phi_prime) = (q(0, 1), q(0, 1));
        for (w, c) in p.terms() {
            if w.is_empty() {
                phi += c.clone();
                continue;
            }
            phi += c.clone() * self.engine.phi(w)?;
            phi_prime += c.clone() * self.engine.phi_prime(w)?;
        }
        Ok((phi, phi_prime))
    }

    fn check_isometry(&self, u: &CMat, what: &str) -> Result<()> {
        if !self.spec.check_unitary {
            return Ok(());
        }
        let g = u.adj_mul(u);
        let mut err: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let d = if i == j { 1.0 } else { 0.0 };
                err = err.max((C64::new(g.re[(i, j)], g.im[(i, j)]) - d).norm());
            }
        }
        if err < UNITARY_TOL {
            Ok(())
        } else {
            Err(Error::Numerical(format!("{what}: ‖U*U − I‖ = {err:e}")))
        }
    }

    /// The letter matrices of sample `index`, indexed by letter id. Each
    /// sample draws from its own ChaCha stream of the master seed.
    pub fn sample(&self, index: u64) -> Result<Vec<Op>> {
        let n = self.spec.n;
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        rng.set_stream(index);
        let mut ops: Vec<Option<Op>> = vec![None; self.alphabet.generators().len()];

        for g in 0..self.main_groups {
            let u = CMat::from_complex(&sample_haar(n, &mut rng));
            self.check_isometry(&u, "Haar unitary")?;
            let ut = u.adjoint();
            for m in self.mains.iter().filter(|m| m.group == g) {
                ops[m.letter.id as usize] = Some(Op::Dense(u.scale_columns(&m.diag).mul(&ut)));
            }
        }
        match self.spec.model {
            Model::Bprime => {
                for (g, &r) in self.pert_ranks.iter().enumerate() {
                    let v = CMat::from_complex(&haar_columns(n, r, &mut rng));
                    self.check_isometry(&v, "Haar columns")?;
                    for p in self.perts.iter().filter(|p| p.group == g) {
                        let mut d = p.values.clone();
                        d.resize(r, 0.0);
                        ops[p.letter.id as usize] = Some(Op::LowRank { l: v.scale_columns(&d), r: v.clone() });
                    }
                }
            }
            _ => {
                for p in &self.perts {
                    let r = p.values.len();
                    let e = CMat { re: DMatrix::identity(n, r), im: DMatrix::zeros(n, r) };
                    ops[p.letter.id as usize] = Some(Op::LowRank { l: e.scale_columns(&p.values), r: e });
                }
            }
        }
        if let Some(ql) = self.q {
            let mut e = CMat::zeros(n, 1);
            e.re[(n - 1, 0)] = 1.0;
            ops[ql.id as usize] = Some(Op::LowRank { l: e.clone(), r: e });
        }
        ops.into_iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| Error::UnknownLetter(self.alphabet.name(Letter::new(i as u16)).to_string())))
            .collect()
    }

    /// `Tr_N` of each monomial on one sample.
    pub fn traces(&self, ops: &[Op], monomials: &[Word]) -> Vec<C64> {
        let mut memo: HashMap<Word, Rc<Op>> = HashMap::new();
        monomials.iter().map(|w| trace(w, ops, &mut memo, self.spec.n)).collect()
    }
}

fn num_pow(v: &Q, k: usize) -> Q {
    (0..k).fold(q(1, 1), |acc, _| acc * v.clone())
}

fn product(w: &[Letter], ops: &[Op], memo: &mut HashMap<Word, Rc<Op>>) -> Rc<Op> {
    if w.len() == 1 {
        return Rc::new(ops[w[0].id as usize].clone());
    }
    if let Some(p) = memo.get(w) {
        return p.clone();
    }
    let k = w.len() / 2;
    let p = Rc::new(product(&w[..k], ops, memo).mul(&product(&w[k..], ops, memo)));
    memo.insert(w.to_vec(), p.clone());
    p
}

fn trace(w: &[Letter], ops: &[Op], memo: &mut HashMap<Word, Rc<Op>>, n: usize) -> C64 {
    match w.len() {
        0 => C64::new(n as f64, 0.0),
        1 => ops[w[0].id as usize].trace(),
        len => {
            let k = len / 2;
            product(&w[..k], ops, memo).trace_mul(&product(&w[k..], ops, memo))
        }
    }
}
