//! Command implementations behind the `ips` binary.
//!
//! Exit codes: 0 ok, 1 semantic failure (invalid certificate, refuted
//! claim), 2 satisfiable input, 3 usage, parse or resource error.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ips_core::circuit::Circuit;
use ips_core::ips::{
    build_mlformula_refutation, build_roabp_refutation, simulate_sparse_linips, subset_sum_axiom, subset_sum_witness, AxiomSystem,
    IpsCertificate, Verdict,
};
use ips_core::measure::{coeff_dim, coefficient_matrix, eval_dim, leading_diagonal, trailing_diagonal, PartitionSpec};
use ips_core::poly::Budget;
use ips_core::{Error, FieldElement, FieldSpec, Monomial, MonomialOrder, SparsePoly};

use crate::certfile::{parse_certificate, parse_field, write_certificate};
use crate::experiment::{parse_manifest, run_jobs, write_csv, DEFAULT_MANIFEST};
use crate::text::{parse_poly, poly_to_text, InferredNames, Names};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_SATISFIABLE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ips", version, about = "Ideal Proof System workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// `rational` or `p=<prime>`.
    #[arg(long, default_value = "rational")]
    pub field: String,
    /// Seed for every random choice; `random` draws one from the clock.
    #[arg(long, default_value = "0")]
    pub seed: String,
    /// Maximum number of monomial products an expansion may perform.
    #[arg(long, default_value_t = 1 << 28)]
    pub budget: u128,
    /// Print extra diagnostics to stderr.
    #[arg(short, long)]
    pub verbose: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build, self-verify and write a refutation of `Σ α_i x_i = β` with booleans.
    Refute {
        kind: RefuteKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: String,
        /// Comma-separated weights; defaults to all ones.
        #[arg(long)]
        alpha: Option<String>,
        /// Variable order for roABPs as 1-based indices, e.g. `3,1,2`.
        #[arg(long)]
        order: Option<String>,
        /// Certificate path; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a certificate file.
    Verify {
        cert: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: VerifyMode,
        #[arg(long, default_value_t = 20)]
        trials: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Print one CSV row `measure,partition,shape,value` for a polynomial.
    Measure {
        which: MeasureKind,
        /// Inline polynomial text.
        #[arg(long, conflicts_with = "file")]
        poly: Option<String>,
        /// File holding the polynomial text.
        #[arg(long)]
        file: Option<PathBuf>,
        /// `x|y`, or explicit names such as `x1,y2|x2,y1`; a third part is ignored.
        #[arg(long)]
        partition: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a manifest of claim checks and write a CSV.
    Experiment {
        /// Manifest path; the shipped default suite when absent.
        manifest: Option<PathBuf>,
        /// CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        parallelism: usize,
        /// Write 0 in the millis column so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefuteKind {
    Roabp,
    Mlf,
    SparseSim,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exact,
    Pit,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureKind {
    Coeffdim,
    Evaldim,
    Lm,
    Tm,
    Ld,
    Td,
    Sparsity,
    Degree,
}

/// Validated settings shared by the commands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub field: FieldSpec,
    pub budget: u128,
    pub seed: u64,
    pub verbose: bool,
}

impl RunConfig {
    pub fn from_common(c: &Common) -> Result<Self, Error> {
        if c.budget == 0 {
            return Err(Error::Precondition("budget must be positive".into()));
        }
        let seed = if c.seed == "random" {
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_nanos() as u64).unwrap_or(0)
        } else {
            c.seed.parse().map_err(|_| Error::Parse(format!("seed must be an integer or 'random', got '{}'", c.seed)))?
        };
        Ok(RunConfig { field: parse_field(&c.field)?, budget: c.budget, seed, verbose: c.verbose })
    }

    fn budget(&self) -> Budget {
        Budget::new(self.budget)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Satisfiable(_) => EXIT_SATISFIABLE,
        Error::InvalidCertificate(_) => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Output streams, so commands can run in-process under test.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Run a parsed command line.
pub fn run(cli: Cli, io: &mut Io) -> i32 {
    let res = match cli.command {
        Command::Refute { kind, n, beta, alpha, order, out, common } => {
            RunConfig::from_common(&common).and_then(|cfg| cmd_refute(&cfg, kind, n, &beta, alpha.as_deref(), order.as_deref(), out, io))
        }
        Command::Verify { cert, mode, trials, common } => RunConfig::from_common(&common).and_then(|cfg| cmd_verify(&cfg, &cert, mode, trials, io)),
        Command::Measure { which, poly, file, partition, common } => {
            RunConfig::from_common(&common).and_then(|cfg| cmd_measure(&cfg, which, poly, file, partition.as_deref(), io))
        }
        Command::Experiment { manifest, out, parallelism, no_timing } => cmd_experiment(manifest, out, parallelism, !no_timing, io),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Precondition(format!("io: {e}"))
}

fn parse_list(spec: FieldSpec, s: &str) -> Result<Vec<FieldElement>, Error> {
    s.split(',').map(|t| spec.parse(t)).collect()
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_refute(
    cfg: &RunConfig,
    kind: RefuteKind,
    n: usize,
    beta: &str,
    alpha: Option<&str>,
    order: Option<&str>,
    out: Option<PathBuf>,
    io: &mut Io,
) -> Result<i32, Error> {
    let spec = cfg.field;
    let beta = spec.parse(beta)?;
    let alpha = match alpha {
        Some(a) => parse_list(spec, a)?,
        None => vec![spec.one(); n],
    };
    if alpha.len() != n {
        return Err(Error::Precondition(format!("--alpha has {} entries, --n is {n}", alpha.len())));
    }
    let start = Instant::now();
    let mut extra = String::new();
    let cert = match kind {
        RefuteKind::Roabp => {
            let order = match order {
                Some(o) => o
                    .split(',')
                    .map(|t| match t.trim().parse::<usize>() {
                        Ok(k) if k >= 1 => Ok(k - 1),
                        _ => Err(Error::Parse(format!("bad order entry '{t}'"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                None => (0..n).collect(),
            };
            let r = build_roabp_refutation(&alpha, &beta, &order)?;
            extra = format!("ml_width {}\n", r.ml_g_width);
            r.cert
        }
        RefuteKind::Mlf => build_mlformula_refutation(&alpha, &beta)?,
        RefuteKind::SparseSim => {
            let w = subset_sum_witness(&alpha, &beta)?;
            let sys = AxiomSystem::new(spec, n, vec![subset_sum_axiom(&alpha, &beta)], true)?;
            simulate_sparse_linips(&sys, &[w.f_ml], &mut cfg.budget())?
        }
    };
    if !cert.verify_exact(&mut cfg.budget())?.is_valid() {
        return Err(Error::InvalidCertificate("constructed refutation failed self-verification".into()));
    }
    let text = write_certificate(&cert)?;
    let stats = format!("VALID\n{}{extra}millis {}\n", stats(&cert), start.elapsed().as_millis());
    // with no --out the certificate owns stdout
    match out {
        Some(p) => {
            std::fs::write(&p, &text).map_err(io_err)?;
            io.out.write_all(stats.as_bytes()).map_err(io_err)?;
        }
        None => {
            io.out.write_all(text.as_bytes()).map_err(io_err)?;
            io.err.write_all(stats.as_bytes()).map_err(io_err)?;
        }
    }
    Ok(EXIT_OK)
}

fn stats(cert: &IpsCertificate) -> String {
    let width = match &cert.proof {
        Circuit::Roabp(r) => r.width().to_string(),
        _ => "-".into(),
    };
    let wires = match &cert.proof {
        Circuit::Roabp(r) => r.wires(),
        other => other.to_dag().size(),
    };
    format!(
        "size {}\nwires {wires}\nwidth {width}\ndegree {}\nlinearity {}\n",
        cert.proof.size(),
        cert.composed_degree_bound(),
        cert.linearity.name()
    )
}

fn monomial_text(m: &Monomial, names: &dyn Names) -> String {
    let mut s = String::new();
    let _ = m.write_with(&mut s, &|v| names.name(v));
    s
}

fn point_text(p: &[FieldElement]) -> String {
    p.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

pub fn cmd_verify(cfg: &RunConfig, path: &PathBuf, mode: VerifyMode, trials: u32, io: &mut Io) -> Result<i32, Error> {
    let src = std::fs::read_to_string(path).map_err(io_err)?;
    let cert = parse_certificate(&src)?;
    let start = Instant::now();
    let (line, ok, note) = match mode {
        VerifyMode::Exact => match cert.verify_exact(&mut cfg.budget())? {
            Verdict::Valid => ("VALID".to_string(), true, String::new()),
            Verdict::Invalid(c, w) => (format!("INVALID {} {}", c.name(), w.map(|p| point_text(&p)).unwrap_or_else(|| "-".into())), false, String::new()),
        },
        VerifyMode::Pit => {
            let o = cert.verify_pit(trials, cfg.seed)?;
            let note = format!("trials {}\nsample_size {}\n", o.trials, o.sample_size);
            match o.witness {
                None => ("VALID".to_string(), true, format!("{note}error_bound {:e}\n", o.per_trial_error().powi(o.trials as i32))),
                Some((c, w)) => (format!("INVALID {} {}", c.name(), point_text(&w)), false, note),
            }
        }
    };
    writeln!(io.out, "{line}").map_err(io_err)?;
    write!(io.out, "{}{note}millis {}\n", stats(&cert), start.elapsed().as_millis()).map_err(io_err)?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

/// Resolve `x|y` or explicit name lists to variable ids.
fn parse_measure_partition(names: &InferredNames, s: &str) -> Result<PartitionSpec, Error> {
    let mut sides = s.split('|');
    let mut side = |what: &str| -> Result<Vec<usize>, Error> {
        let t = sides.next().ok_or_else(|| Error::Partition(format!("'{s}' lacks the {what} side")))?.trim();
        if t.len() == 1 {
            let c = t.chars().next().unwrap();
            if matches!(c, 'x' | 'y' | 'z') {
                return Ok(names.block(c));
            }
        }
        t.split(',')
            .filter(|w| !w.trim().is_empty())
            .map(|w| {
                let w = w.trim();
                let idx: usize = w[1..].parse().map_err(|_| Error::Partition(format!("bad variable '{w}'")))?;
                names.resolve(w.chars().next().unwrap(), idx)
            })
            .collect()
    };
    let u = side("first")?;
    let v = side("second")?;
    PartitionSpec::split(u, v)
}

pub fn cmd_measure(
    cfg: &RunConfig,
    which: MeasureKind,
    poly: Option<String>,
    file: Option<PathBuf>,
    partition: Option<&str>,
    io: &mut Io,
) -> Result<i32, Error> {
    let src = match (poly, file) {
        (Some(p), _) => p,
        (None, Some(f)) => std::fs::read_to_string(f).map_err(io_err)?,
        (None, None) => return Err(Error::Precondition("give --poly or --file".into())),
    };
    let names = InferredNames::scan(&src)?;
    let n = names.nvars();
    let f: SparsePoly = parse_poly(cfg.field, n, &names, &src)?;
    let part = partition.map(|p| parse_measure_partition(&names, p)).transpose()?;
    let need_part = || part.clone().ok_or_else(|| Error::Precondition("this measure needs --partition".into()));
    let ord = MonomialOrder::graded_lex_n(n);
    let (shape, value) = match which {
        MeasureKind::Coeffdim => {
            let p = need_part()?;
            let m = coefficient_matrix(&f, &p)?;
            let (r, c) = m.shape();
            (format!("{r}x{c}"), coeff_dim(&f, &p)?.to_string())
        }
        MeasureKind::Evaldim => {
            let p = need_part()?;
            let grid = [cfg.field.zero(), cfg.field.one()];
            (format!("{}x{}", 1usize << p.u.len().min(30), 1usize << p.v.len().min(30)), eval_dim(&f, &p, &grid)?.to_string())
        }
        MeasureKind::Lm => ("-".into(), monomial_text(&f.leading_monomial(&ord)?, &names)),
        MeasureKind::Tm => ("-".into(), monomial_text(&f.trailing_monomial(&ord)?, &names)),
        MeasureKind::Ld | MeasureKind::Td => {
            let p = need_part()?;
            let po = MonomialOrder::graded_lex_n(p.u.len());
            let d = if which == MeasureKind::Ld { leading_diagonal(&f, &p, &po)? } else { trailing_diagonal(&f, &p, &po)? };
            ("-".into(), d.sparsity().to_string())
        }
        MeasureKind::Sparsity => ("-".into(), f.sparsity().to_string()),
        MeasureKind::Degree => ("-".into(), f.degree().to_string()),
    };
    let label = format!("{which:?}").to_lowercase();
    if cfg.verbose {
        let _ = writeln!(io.err, "parsed {}", poly_to_text(&f, &names));
    }
    writeln!(io.out, "{label},{},{shape},{value}", partition.unwrap_or("-")).map_err(io_err)?;
    Ok(EXIT_OK)
}

pub fn cmd_experiment(manifest: Option<PathBuf>, out: Option<PathBuf>, parallelism: usize, timing: bool, io: &mut Io) -> Result<i32, Error> {
    let src = match manifest {
        Some(p) => std::fs::read_to_string(p).map_err(io_err)?,
        None => DEFAULT_MANIFEST.to_string(),
    };
    let jobs = parse_manifest(&src)?;
    let outcomes = run_jobs(&jobs, parallelism);
    let mut warnings = Vec::new();
    let summary = match out {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(io_err)?;
            write_csv(f, &jobs, &outcomes, timing, &mut |w| warnings.push(w))
        }
        None => write_csv(&mut *io.out, &jobs, &outcomes, timing, &mut |w| warnings.push(w)),
    }
    .map_err(io_err)?;
    for w in warnings {
        let _ = writeln!(io.err, "warning: {w}");
    }
    let _ = writeln!(
        io.err,
        "{} confirmed, {} refuted, {} inconclusive, {} failed, {} unknown",
        summary.confirmed, summary.refuted, summary.inconclusive, summary.failed, summary.unknown
    );
    Ok(if summary.refuted > 0 { EXIT_FAILED } else { EXIT_OK })
}
