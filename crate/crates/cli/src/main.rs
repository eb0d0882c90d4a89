//! `ncprob`: partitions, cumulants, convolutions, Markov–Krein transforms,
//! verification suites and random-matrix runs.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad usage or input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ncprob_core::bprime::{check_bprime_iff_inf_free, Variant};
use ncprob_core::conv::{self, Dist};
use ncprob_core::indep::{self_check, Law};
use ncprob_core::io::{parse_partition, partition_json, MomentFile, Num, ScenarioSpec, SCHEMA_VERSION};
use ncprob_core::mk::inverse_mk_uni;
use ncprob_core::ncpart::{enumerate_nc, kreweras, relative_kreweras};
use ncprob_core::report::Report;
use ncprob_core::scalars::{Dual, Q};
use ncprob_core::suites;
use serde_json::json;

#[derive(Parser)]
#[command(name = "ncprob", version, about = "Type-B′ free probability toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Noncrossing partitions
    Nc {
        #[command(subcommand)]
        cmd: NcCmd,
    },
    /// Free cumulants (and infinitesimal ones when the file has `inf`)
    Cumulants {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Additive and multiplicative convolutions
    Conv {
        #[arg(value_enum)]
        op: ConvOp,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// ψ moments of the first variable (cfree)
        #[arg(long)]
        psi_a: Option<PathBuf>,
        /// ψ moments of the second variable (cfree)
        #[arg(long)]
        psi_b: Option<PathBuf>,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Markov–Krein transforms
    Mk {
        #[command(subcommand)]
        cmd: MkCmd,
    },
    /// Run verification suites, or the engine checks of a scenario file
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Random-matrix convergence study
    Rmt {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the seed in the config
        #[arg(long)]
        seed: Option<u64>,
        /// `C` in the tolerance `3·stderr + C/N`
        #[arg(long, default_value_t = 5.0)]
        tolerance: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum NcCmd {
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Kreweras complement, or the relative one inside `--within`
    Kreweras {
        #[arg(long)]
        partition: String,
        #[arg(long)]
        within: Option<String>,
    },
}

#[derive(Subcommand)]
enum MkCmd {
    Inverse {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvOp {
    Free,
    Boolean,
    Monotone,
    Boxtimes,
    Cfree,
    Inf,
    Cam,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Lattice,
    Cumulants,
    Engines,
    Bprime,
    Conv,
    Mk,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Lattice => "lattice",
            Suite::Cumulants => "cumulants",
            Suite::Engines => "engines",
            Suite::Bprime => "bprime",
            Suite::Conv => "conv",
            Suite::Mk => "mk",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// A failed check, as opposed to bad input.
#[derive(Debug)]
struct Violations;

impl std::fmt::Display for Violations {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed")
    }
}

impl std::error::Error for Violations {}

fn read_moments(path: &Path) -> Result<MomentFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    MomentFile::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_dist(path: &Path, order: usize) -> Result<Dist<Q>> {
    Ok(read_moments(path)?.dist()?.truncate(order)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, v: &impl serde::Serialize) -> Result<()> {
    emit(out, &serde_json::to_string_pretty(v)?)
}

fn nums(v: &[Q]) -> Vec<Num> {
    v.iter().map(Num::from_q).collect()
}

fn cumulants(moments: &Path, order: usize) -> Result<serde_json::Value> {
    let f = read_moments(moments)?;
    let d = f.dist()?.truncate(order)?;
    let mut v = json!({"version": SCHEMA_VERSION, "order": order, "cumulants": nums(&conv::free_cumulants(&d)[1..])});
    if let Some(inf) = &f.inf {
        let inf: Vec<Q> = inf.iter().map(Num::to_q).collect::<std::result::Result<_, _>>()?;
        let duals: Vec<Dual<Q>> = d.moments().iter().zip(&inf).map(|(m, i)| Dual::new(m.clone(), i.clone())).collect();
        let k = conv::free_cumulants(&Dist::new(duals)?);
        let inf_k: Vec<Q> = k[1..].iter().map(|x| x.inf.clone()).collect();
        v["inf_cumulants"] = json!(nums(&inf_k));
    }
    Ok(v)
}

fn convolve(op: ConvOp, a: &Path, b: &Path, psi: (Option<&Path>, Option<&Path>), k: usize) -> Result<MomentFile> {
    Ok(match op {
        ConvOp::Inf => {
            let (x, y) = (read_moments(a)?.inf_dist()?, read_moments(b)?.inf_dist()?);
            MomentFile::from_inf_dist(&conv::inf_free_add(&x, &y, k)?)
        }
        ConvOp::Cam => {
            let nu = read_moments(b)?.sequence()?;
            MomentFile::from_sequence(&conv::cyclic_antimonotone_conv(&read_dist(a, k)?, &nu, k)?)
        }
        ConvOp::Cfree => {
            let (Some(pa), Some(pb)) = psi else { bail!("cfree needs --psi-a and --psi-b") };
            let r = conv::cfree_add(&read_dist(a, k)?, &read_dist(pa, k)?, &read_dist(b, k)?, &read_dist(pb, k)?, k)?;
            MomentFile::from_dist(&r)
        }
        _ => {
            let (x, y) = (read_dist(a, k)?, read_dist(b, k)?);
            let r = match op {
                ConvOp::Free => conv::free_add(&x, &y, k)?,
                ConvOp::Boolean => conv::boolean_add(&x, &y, k)?,
                ConvOp::Monotone => conv::monotone_add(&x, &y, k)?,
                _ => conv::free_mult(&x, &y, k)?,
            };
            MomentFile::from_dist(&r)
        }
    })
}

fn scenario_reports(path: &Path, max_n: usize) -> Result<Vec<Report>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = ScenarioSpec::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    let len = spec.max_len.unwrap_or(max_n);
    let loaded = spec.load()?;
    let s = &loaded.scenario;
    let mut out = vec![self_check(s, len)?];
    match s.law {
        Law::Bprime => out.push(check_bprime_iff_inf_free(s, len, Variant::Full)?),
        Law::WeakBprime => out.push(check_bprime_iff_inf_free(s, len, Variant::Weak)?),
        _ => {}
    }
    Ok(out)
}

fn verify(suite: Suite, max_n: usize, scenario: Option<&Path>, format: Format) -> Result<()> {
    let reports = match scenario {
        Some(p) => scenario_reports(p, max_n)?,
        None => suites::run(suite.name(), max_n)?,
    };
    match format {
        Format::Json => emit_json(None, &reports)?,
        _ => reports.iter().try_for_each(|r| emit(None, &r.to_string()))?,
    }
    if reports.iter().all(Report::ok) {
        Ok(())
    } else {
        Err(Violations.into())
    }
}

fn rmt(config: &Path, out: Option<&Path>, seed: Option<u64>, c: f64, format: Format) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let mut exp = ncprob_rmt::Experiment::parse(&text).with_context(|| format!("parsing {}", config.display()))?;
    if let Some(s) = seed {
        exp.seed = s;
    }
    let table = ncprob_rmt::convergence_study(&exp)?;
    match (format, out) {
        (Format::Json, _) => emit_json(out, &table)?,
        (_, Some(p)) => ncprob_rmt::write_csv(&table.rows, fs::File::create(p).with_context(|| format!("writing {}", p.display()))?)?,
        (_, None) => ncprob_rmt::write_csv(&table.rows, std::io::stdout().lock())?,
    }
    let report = ncprob_rmt::tolerance_report(&table, c, 4, 3);
    eprintln!("{report}");
    if report.ok() {
        Ok(())
    } else {
        Err(Violations.into())
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Nc { cmd: NcCmd::Enumerate { n, format } } => {
            let all = enumerate_nc(n)?;
            if format == Format::Json {
                let parts: Vec<_> = all.iter().map(partition_json).collect();
                emit_json(None, &json!({"version": SCHEMA_VERSION, "n": n, "count": all.len(), "partitions": parts}))
            } else {
                all.iter().try_for_each(|p| emit(None, &p.to_string()))
            }
        }
        Cmd::Nc { cmd: NcCmd::Kreweras { partition, within } } => {
            let sigma = parse_partition(&partition)?;
            let (kr, pi) = match within {
                Some(w) => {
                    let pi = parse_partition(&w)?;
                    (relative_kreweras(&sigma, &pi)?, Some(partition_json(&pi)))
                }
                None => (kreweras(&sigma), None),
            };
            let mut v = json!({"version": SCHEMA_VERSION, "partition": partition_json(&sigma), "kreweras": partition_json(&kr)});
            if let Some(pi) = pi {
                v["within"] = pi;
            }
            emit_json(None, &v)
        }
        Cmd::Cumulants { moments, order, out } => emit_json(out.as_deref(), &cumulants(&moments, order)?),
        Cmd::Conv { op, a, b, psi_a, psi_b, order, out } => {
            emit_json(out.as_deref(), &convolve(op, &a, &b, (psi_a.as_deref(), psi_b.as_deref()), order)?)
        }
        Cmd::Mk { cmd: MkCmd::Inverse { moments, order, out } } => {
            let tau = inverse_mk_uni(&read_dist(&moments, order)?, order)?;
            emit_json(out.as_deref(), &MomentFile::from_dist(&tau))
        }
        Cmd::Verify { suite, max_n, scenario, format } => verify(suite, max_n, scenario.as_deref(), format),
        Cmd::Rmt { config, out, seed, tolerance, format } => rmt(&config, out.as_deref(), seed, tolerance, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = std::env::var("NCPROB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Violations>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
