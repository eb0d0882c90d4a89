//! Sampling runs, convergence tables and CSV output.

use std::collections::HashMap;
use std::io::Write;

use ncprob_core::moments::Word;
use ncprob_core::report::Report;
use ncprob_core::scalars::q_to_f64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::Ensemble;
use crate::spec::{EnsembleSpec, Experiment, Model};
use crate::Result;

/// Streaming mean and variance; `merge` is Chan's parallel update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Stats {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Stats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, o: &Stats) -> Stats {
        if self.count == 0 {
            return *o;
        }
        if o.count == 0 {
            return *self;
        }
        let count = self.count + o.count;
        let d = o.mean - self.mean;
        let (na, nb) = (self.count as f64, o.count as f64);
        Stats { count, mean: self.mean + d * nb / count as f64, m2: self.m2 + o.m2 + d * d * na * nb / count as f64 }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordResult {
    pub word: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    pub emp_tr_mean: f64,
    pub emp_tr_stderr: f64,
    pub pred_phi: f64,
    #[serde(rename = "emp_Trdiff_mean")]
    pub emp_trdiff_mean: f64,
    #[serde(rename = "emp_Trdiff_stderr")]
    pub emp_trdiff_stderr: f64,
    pub pred_phi_prime: f64,
    pub abs_err_phi: f64,
    pub abs_err_phi_prime: f64,
}

impl WordResult {
    pub fn degree(&self) -> usize {
        self.word.split_whitespace().count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    #[serde(rename = "N")]
    pub n: usize,
    pub model: Model,
    pub samples: usize,
    pub words: Vec<WordResult>,
}

/// Samples per parallel task; fixed so that results do not depend on the
/// thread count.
const CHUNK: usize = 4;

/// Runs `spec.samples` independent samples and compares `tr_N(w)` with
/// `φ(w)` and `Tr_N(w − main part of w)` with `φ′(w)`.
pub fn run(spec: &EnsembleSpec, words: &[String]) -> Result<SimResult> {
    let ens = Ensemble::new(spec)?;
    let polys = words.iter().map(|w| ens.expand(w)).collect::<Result<Vec<_>>>()?;
    let preds = polys.iter().map(|p| ens.predict(p)).collect::<Result<Vec<_>>>()?;

    let mut monomials: Vec<Word> = Vec::new();
    let mut index: HashMap<Word, usize> = HashMap::new();
    // per word: (monomial index or None for the unit, coefficient, has perturbation)
    let mut plan: Vec<Vec<(Option<usize>, f64, bool)>> = Vec::new();
    for p in &polys {
        let mut terms = Vec::new();
        for (w, c) in p.terms() {
            let c = q_to_f64(c);
            if w.is_empty() {
                terms.push((None, c, false));
                continue;
            }
            let i = *index.entry(w.clone()).or_insert_with(|| {
                monomials.push(w.clone());
                monomials.len() - 1
            });
            terms.push((Some(i), c, ens.has_pert(w)));
        }
        plan.push(terms);
    }

    let n = spec.n as f64;
    let chunks = spec.samples.div_ceil(CHUNK);
    let partial: Vec<Vec<(Stats, Stats)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![(Stats::default(), Stats::default()); words.len()];
            for s in c * CHUNK..((c + 1) * CHUNK).min(spec.samples) {
                let ops = ens.sample(s as u64)?;
                let tr = ens.traces(&ops, &monomials);
                for (k, terms) in plan.iter().enumerate() {
                    let (mut small, mut big) = (0.0, 0.0);
                    for &(i, c, pert) in terms {
                        match i {
                            None => small += c,
                            Some(i) => {
                                small += c * tr[i].re / n;
                                if pert {
                                    big += c * tr[i].re;
                                }
                            }
                        }
                    }
                    acc[k].0.push(small);
                    acc[k].1.push(big);
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![(Stats::default(), Stats::default()); words.len()];
    for part in &partial {
        for (t, p) in total.iter_mut().zip(part) {
            *t = (t.0.merge(&p.0), t.1.merge(&p.1));
        }
    }

    let rows = words
        .iter()
        .zip(total)
        .zip(preds)
        .map(|((w, (small, big)), (phi, phi_prime))| {
            let (phi, phi_prime) = (q_to_f64(&phi), q_to_f64(&phi_prime));
            WordResult {
                word: w.clone(),
                n: spec.n,
                samples: spec.samples,
                emp_tr_mean: small.mean,
                emp_tr_stderr: small.stderr(),
                pred_phi: phi,
                emp_trdiff_mean: big.mean,
                emp_trdiff_stderr: big.stderr(),
                pred_phi_prime: phi_prime,
                abs_err_phi: (small.mean - phi).abs(),
                abs_err_phi_prime: (big.mean - phi_prime).abs(),
            }
        })
        .collect();
    Ok(SimResult { n: spec.n, model: spec.model, samples: spec.samples, words: rows })
}

/// An error that grew from one size to the next by more than
/// `3·√(se₁² + se₂²)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Anomaly {
    pub word: String,
    pub quantity: &'static str,
    pub from_n: usize,
    pub to_n: usize,
    pub err_from: f64,
    pub err_to: f64,
    pub noise: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<WordResult>,
    pub anomalies: Vec<Anomaly>,
}

impl ConvergenceTable {
    pub fn sizes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        v.dedup();
        v
    }
}

/// Floating-point slack for comparisons of deterministic quantities.
const SLACK: f64 = 1e-9;

pub fn convergence_study(exp: &Experiment) -> Result<ConvergenceTable> {
    let runs = exp.sizes.iter().map(|&n| run(&exp.ensemble(n), &exp.words)).collect::<Result<Vec<_>>>()?;
    let mut anomalies = Vec::new();
    for pair in runs.windows(2) {
        for (a, b) in pair[0].words.iter().zip(&pair[1].words) {
            let sides = [
                ("phi", a.abs_err_phi, b.abs_err_phi, a.emp_tr_stderr, b.emp_tr_stderr),
                ("phi_prime", a.abs_err_phi_prime, b.abs_err_phi_prime, a.emp_trdiff_stderr, b.emp_trdiff_stderr),
            ];
            for (quantity, ea, eb, sa, sb) in sides {
                let noise = 3.0 * (sa * sa + sb * sb).sqrt() + SLACK;
                if eb > ea + noise {
                    anomalies.push(Anomaly { word: a.word.clone(), quantity, from_n: a.n, to_n: b.n, err_from: ea, err_to: eb, noise });
                }
            }
        }
    }
    Ok(ConvergenceTable { rows: runs.into_iter().flat_map(|r| r.words).collect(), anomalies })
}

/// `|E tr_N(w) − φ(w)| ≤ 3·se + c/N` for words of degree `≤ phi_degree`,
/// the same for `φ′` up to `phi_prime_degree`, and no convergence anomaly.
pub fn tolerance_report(table: &ConvergenceTable, c: f64, phi_degree: usize, phi_prime_degree: usize) -> Report {
    let mut r = Report::new("random-matrix tolerances");
    for row in &table.rows {
        let bound = |se: f64| 3.0 * se + c / row.n as f64 + SLACK;
        let cases = [
            ("|E tr_N − φ| ≤ 3se + c/N", phi_degree, row.abs_err_phi, bound(row.emp_tr_stderr)),
            ("|E Tr_N diff − φ′| ≤ 3se + c/N", phi_prime_degree, row.abs_err_phi_prime, bound(row.emp_trdiff_stderr)),
        ];
        for (cond, max_deg, err, tol) in cases {
            if row.degree() > max_deg {
                continue;
            }
            if err <= tol {
                r.checked += 1;
            } else {
                r.fail(cond, format!("{} at N={}", row.word, row.n), format!("≤ {tol:.3e}"), format!("{err:.3e}"));
            }
        }
    }
    let pairs = table.sizes().len().saturating_sub(1) * table.rows.len() / table.sizes().len().max(1) * 2;
    r.checked += pairs - table.anomalies.len().min(pairs);
    for a in &table.anomalies {
        r.fail(
            "error non-increasing in N up to noise",
            format!("{} ({}) N={}→{}", a.word, a.quantity, a.from_n, a.to_n),
            format!("≤ {:.3e}", a.err_from + a.noise),
            format!("{:.3e}", a.err_to),
        );
    }
    r
}

pub fn write_csv(rows: &[WordResult], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_serial() {
        let xs: Vec<f64> = (0..37).map(|i| ((i * 13) % 7) as f64 - 1.5).collect();
        let mut all = Stats::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Stats::default(), Stats::default());
        xs[..10].iter().for_each(|&x| a.push(x));
        xs[10..].iter().for_each(|&x| b.push(x));
        let m = a.merge(&b);
        assert_eq!(m.count, all.count);
        assert!((m.mean - all.mean).abs() < 1e-12 && (m.m2 - all.m2).abs() < 1e-9);
        assert_eq!(Stats::default().merge(&all), all);
    }
}
