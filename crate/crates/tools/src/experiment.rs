//! Experiment manifests and the parallel job runner.
//!
//! One job per line: `CHECK <claim> n=<n> beta=<elt> field=<spec>
//! [partition=<u>|<v>] [seed=<u64>] [claimed=<u128>]`. Blank lines and `#`
//! comments are skipped.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use ips_core::circuit::Circuit;
use ips_core::hardness::{
    certify_every_partition_roabp, certify_multiple_roabp, certify_multiple_sps, check_any_partition, check_degree_bound,
    check_eval_dim_xy, check_sparsity_bound, determinant_poly, pairwise_product, svb_build, svb_check, HardnessReport, Relation,
};
use ips_core::ips::{build_mlformula_refutation, build_roabp_refutation};
use ips_core::measure::PartitionSpec;
use ips_core::poly::Budget;
use ips_core::{Error, FieldElement, FieldSpec, Monomial, MonomialOrder, Result, SparsePoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::certfile::parse_field;

pub const CSV_HEADER: [&str; 6] = ["claim", "params", "measured", "claimed", "verdict", "millis"];

/// Constant used for the reported roABP refutation width bound `c·(n + 2)²`.
pub const ROABP_WIDTH_CONSTANT: u128 = 4;

/// Trials for the sampling part of generator checks.
pub const SVB_TRIALS: u32 = 200;

/// Expansion budget for one job.
pub const JOB_BUDGET: u128 = 1 << 27;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    pub line: usize,
    pub claim: String,
    pub n: usize,
    pub beta: Option<String>,
    pub field: FieldSpec,
    pub partition: Option<(Vec<usize>, Vec<usize>)>,
    pub seed: u64,
    pub claimed: Option<u128>,
}

impl Job {
    fn beta(&self) -> Result<FieldElement> {
        let b = self.beta.as_deref().ok_or_else(|| Error::Precondition(format!("{} needs beta=", self.claim)))?;
        self.field.parse(b)
    }

    pub fn params(&self) -> String {
        let mut s = format!("n={} field={}", self.n, self.field);
        if let Some(b) = &self.beta {
            s += &format!(" beta={b}");
        }
        if let Some((u, v)) = &self.partition {
            s += &format!(" partition={}", partition_text(u, v));
        }
        s
    }
}

fn partition_text(u: &[usize], v: &[usize]) -> String {
    let j = |w: &[usize]| w.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
    format!("{}|{}", j(u), j(v))
}

/// `1,2|3,4` with 1-based variable indices.
fn parse_partition(s: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let (u, v) = s.split_once('|').ok_or_else(|| Error::Parse(format!("partition '{s}' needs '|'")))?;
    let side = |t: &str| -> Result<Vec<usize>> {
        t.split(',')
            .map(|i| match i.trim().parse::<usize>() {
                Ok(k) if k > 0 => Ok(k - 1),
                _ => Err(Error::Parse(format!("bad partition index '{i}'"))),
            })
            .collect()
    };
    Ok((side(u)?, side(v)?))
}

pub fn parse_manifest(src: &str) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for (no, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| Error::Parse(format!("manifest line {}: {m}", no + 1));
        let mut words = line.split_whitespace();
        if words.next() != Some("CHECK") {
            return Err(err("expected CHECK".into()));
        }
        let claim = words.next().ok_or_else(|| err("missing claim id".into()))?.to_string();
        let mut kv = BTreeMap::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| err(format!("expected key=value, got '{w}'")))?;
            if kv.insert(k, v).is_some() {
                return Err(err(format!("duplicate key '{k}'")));
            }
        }
        let n = kv.remove("n").ok_or_else(|| err("missing n=".into()))?;
        let n: usize = n.parse().map_err(|_| err(format!("bad n '{n}'")))?;
        let field = parse_field(kv.remove("field").unwrap_or("rational"))?;
        let beta = kv.remove("beta").map(str::to_string);
        let partition = kv.remove("partition").map(parse_partition).transpose()?;
        let seed = kv.remove("seed").map(|s| s.parse::<u64>().map_err(|_| err(format!("bad seed '{s}'")))).transpose()?.unwrap_or(0);
        let claimed = kv.remove("claimed").map(|s| s.parse::<u128>().map_err(|_| err(format!("bad claimed '{s}'")))).transpose()?;
        if let Some(k) = kv.keys().next() {
            return Err(err(format!("unknown key '{k}'")));
        }
        jobs.push(Job { line: no + 1, claim, n, beta, field, partition, seed, claimed });
    }
    Ok(jobs)
}

type Check = fn(&Job) -> Result<HardnessReport>;

/// Claim ids understood by the runner.
pub const CLAIMS: &[(&str, Check)] = &[
    ("subset-sum-inverse-degree", |j| check_degree_bound(j.n, &j.beta()?)),
    ("subset-sum-inverse-sparsity", |j| check_sparsity_bound(j.n, &j.beta()?)),
    ("inner-product-inverse-eval-dim", |j| check_eval_dim_xy(j.n, &j.beta()?)),
    ("pairwise-inverse-any-partition", any_partition),
    ("pairwise-product-every-partition", every_partition),
    ("monomial-multiple-powering-size", monomial_sps),
    ("paired-product-multiple-roabp", paired_roabp),
    ("determinant-generator-vanishing", svb_vanishing),
    ("subset-sum-roabp-refutation-width", roabp_width),
    ("subset-sum-mlformula-refutation-depth", mlformula_depth),
];

pub fn lookup(claim: &str) -> Option<Check> {
    CLAIMS.iter().find(|(c, _)| *c == claim).map(|(_, f)| *f)
}

fn any_partition(j: &Job) -> Result<HardnessReport> {
    let (u, v) = j.partition.clone().unwrap_or_else(|| ((0..j.n).collect(), (j.n..2 * j.n).collect()));
    check_any_partition(j.n, &j.beta()?, &u, &v)
}

/// Seeded nonzero shifts, one per pair.
fn random_shifts(spec: FieldSpec, count: usize, seed: u64) -> Vec<FieldElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = match spec {
        FieldSpec::Prime(p) => p,
        FieldSpec::Rational => 100,
    };
    (0..count).map(|_| FieldElement::from_u64(spec, rng.gen_range(1..hi))).collect()
}

fn every_partition(j: &Job) -> Result<HardnessReport> {
    let alpha = random_shifts(j.field, j.n * j.n.saturating_sub(1) / 2, j.seed);
    let h = pairwise_product(j.n, &alpha, &mut Budget::new(JOB_BUDGET))?;
    let w = match &j.beta {
        Some(_) => j.beta()?,
        None => j.field.zero(),
    };
    certify_every_partition_roabp(&h, j.n, &w)
}

fn monomial_sps(j: &Job) -> Result<HardnessReport> {
    let m = SparsePoly::monomial(j.field, j.n, Monomial::from_vars(&(0..j.n).collect::<Vec<_>>()), j.field.one());
    let got = certify_multiple_sps(&m, &MonomialOrder::graded_lex_n(j.n))?;
    Ok(HardnessReport::judge(
        "monomial-multiple-powering-size",
        j.params(),
        got,
        1u128 << j.n.min(127),
        Relation::Equal,
        format!("leading monomial support {}", j.n),
    ))
}

fn paired_roabp(j: &Job) -> Result<HardnessReport> {
    let n = j.n;
    let spec = j.field;
    let mut h = SparsePoly::one(spec, 2 * n);
    let mut b = Budget::new(JOB_BUDGET);
    for i in 0..n {
        let f = &(&SparsePoly::var(spec, 2 * n, i) + &SparsePoly::var(spec, 2 * n, n + i)) + &SparsePoly::one(spec, 2 * n);
        h = h.mul_budgeted(&f, &mut b)?;
    }
    let part = PartitionSpec::split((0..n).collect(), (n..2 * n).collect())?;
    let got = certify_multiple_roabp(&h, &part, &MonomialOrder::graded_lex_n(n))?;
    Ok(HardnessReport::judge(
        "paired-product-multiple-roabp",
        j.params(),
        got as u128,
        1u128 << n.min(127),
        Relation::Equal,
        format!("leading diagonal has {got} terms"),
    ))
}

/// `det_n` composed with the generator of seed length `3(n − 1)`.
fn svb_vanishing(j: &Job) -> Result<HardnessReport> {
    if j.n < 2 {
        return Err(Error::Precondition("the determinant check needs n ≥ 2".into()));
    }
    let g = svb_build(j.n, j.n - 1, j.field)?;
    let det = determinant_poly(j.n, j.field)?;
    let c = svb_check(&det, &g, SVB_TRIALS, j.seed, &mut Budget::new(JOB_BUDGET))?;
    let evidence = match &c.witness {
        Some(s) => format!("nonzero at seed point {}", s.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")),
        None if c.exact => "composition expands to 0".into(),
        None => format!("zero on {} samples", c.trials),
    };
    let r = HardnessReport::judge("determinant-generator-vanishing", j.params(), c.vanishes as u128, 1, Relation::Equal, evidence);
    // a bound that underflowed is reported as the smallest positive value, still an upper bound
    Ok(if c.exact { r } else { r.probabilistic(c.error_bound.max(f64::MIN_POSITIVE)) })
}

fn roabp_width(j: &Job) -> Result<HardnessReport> {
    let n = j.n;
    let r = build_roabp_refutation(&vec![j.field.one(); n], &j.beta()?, &(0..n).collect::<Vec<_>>())?;
    let bound = ROABP_WIDTH_CONSTANT * ((n as u128) + 2).pow(2);
    let rep = HardnessReport::judge(
        "subset-sum-roabp-refutation-width",
        j.params(),
        r.width as u128,
        bound,
        Relation::AtMost,
        format!("width {} from a multilinear part of width {}", r.width, r.ml_g_width),
    );
    if !r.cert.verify_exact(&mut Budget::new(JOB_BUDGET))?.is_valid() {
        return Ok(rep.refuted("constructed refutation does not verify".into()));
    }
    Ok(rep)
}

fn mlformula_depth(j: &Job) -> Result<HardnessReport> {
    let cert = build_mlformula_refutation(&vec![j.field.one(); j.n], &j.beta()?)?;
    let Circuit::Multilinear(m) = &cert.proof else {
        return Err(Error::InvalidCertificate("expected a multilinear formula".into()));
    };
    let depth = m.to_dag().depth();
    let rep = HardnessReport::judge(
        "subset-sum-mlformula-refutation-depth",
        j.params(),
        depth as u128,
        3,
        Relation::AtMost,
        format!("formula of size {} and depth {depth}", m.size()),
    );
    if m.check().is_err() || !cert.verify_exact(&mut Budget::new(JOB_BUDGET))?.is_valid() {
        return Ok(rep.refuted("refutation is not a valid multilinear formula".into()));
    }
    Ok(rep)
}

/// Result of one manifest line.
#[derive(Clone, Debug)]
pub enum Outcome {
    Report(HardnessReport),
    /// The claim id is unknown; the job is skipped.
    Unknown(String),
    /// The check could not run (guard, budget).
    Failed(String),
}

pub fn run_job(job: &Job) -> Outcome {
    let Some(check) = lookup(&job.claim) else {
        return Outcome::Unknown(job.claim.clone());
    };
    let start = Instant::now();
    match check(job) {
        Ok(mut r) => {
            if let Some(c) = job.claimed {
                r = r.with_claimed(c);
            }
            r.params = job.params();
            r.millis = start.elapsed().as_millis() as u64;
            Outcome::Report(r)
        }
        Err(e) => Outcome::Failed(e.to_string()),
    }
}

/// Run every job on `threads` workers (0: rayon's default), keeping
/// manifest order in the output.
pub fn run_jobs(jobs: &[Job], threads: usize) -> Vec<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    pool.install(|| jobs.par_iter().map(run_job).collect())
}

/// Summary of a finished run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub confirmed: usize,
    pub refuted: usize,
    pub inconclusive: usize,
    pub failed: usize,
    pub unknown: usize,
}

/// Write the CSV and collect warnings. With `timing = false` the millis
/// column is written as 0 so output is byte-identical across runs.
pub fn write_csv<W: Write>(out: W, jobs: &[Job], outcomes: &[Outcome], timing: bool, warn: &mut dyn FnMut(String)) -> std::io::Result<RunSummary> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let mut s = RunSummary::default();
    for (job, o) in jobs.iter().zip(outcomes) {
        match o {
            Outcome::Report(r) => {
                if r.is_refuted() {
                    s.refuted += 1;
                } else if r.is_confirmed() {
                    s.confirmed += 1;
                } else {
                    s.inconclusive += 1;
                }
                let millis = if timing { r.millis } else { 0 };
                w.write_record([
                    r.claim.clone(),
                    r.params.clone(),
                    r.measured.to_string(),
                    r.claimed.to_string(),
                    r.verdict.to_string(),
                    millis.to_string(),
                ])?;
                if let Some(c) = &r.counterexample {
                    warn(format!("line {}: {} refuted: {c}", job.line, r.claim));
                }
            }
            Outcome::Unknown(c) => {
                s.unknown += 1;
                warn(format!("line {}: unknown claim '{c}', skipped", job.line));
            }
            Outcome::Failed(e) => {
                s.failed += 1;
                w.write_record([job.claim.clone(), job.params(), String::new(), String::new(), "inconclusive".into(), "0".into()])?;
                warn(format!("line {}: {} could not run: {e}", job.line, job.claim));
            }
        }
    }
    w.flush()?;
    Ok(s)
}

/// Manifest shipped with the tool: every registered claim at n ≤ 6.
pub const DEFAULT_MANIFEST: &str = include_str!("../manifests/default.manifest");
