//! Ideal Proof System certificates, their verification, and explicit
//! refutations of the subset-sum axiom.

mod linearize;
mod multilin;
mod subset_sum;


pub use linearize::{ips_to_linear, DivisionRoute};
pub use multilin::{
    boolean_quotients, certificate_from_multipliers, exhaustive_multilinear_linips, monomial_square_witness, multilinear_linips_exists, multilinearize_roabp,
    simulate_sparse_linips, sparse_times_formula_witness, MonomialSquareWitness,
};
pub use subset_sum::{
    appendix_inverse_poly, build_mlformula_refutation, build_roabp_refutation, reachable_sums, subset_sum_axiom, subset_sum_witness,
    RoabpRefutation, SubsetSumWitness,
};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{Budget, SparsePoly, VarLayout};

/// Axioms `f_1..f_m` over `x_1..x_n`, optionally with the boolean axioms
/// `x_i² − x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomSystem {
    pub spec: FieldSpec,
    pub nvars: usize,
    pub axioms: Vec<SparsePoly>,
    pub include_boolean: bool,
}

impl AxiomSystem {
    pub fn new(spec: FieldSpec, nvars: usize, axioms: Vec<SparsePoly>, include_boolean: bool) -> Result<Self> {
        for f in &axioms {
            if f.spec() != spec {
                return Err(Error::SpecMismatch);
            }
            if f.max_var_plus_one() > nvars {
                return Err(Error::OutOfRange(format!("axiom {f} uses a variable beyond x{nvars}")));
            }
        }
        let axioms = axioms.into_iter().map(|f| f.with_nvars(nvars)).collect();
        Ok(AxiomSystem { spec, nvars, axioms, include_boolean })
    }

    /// Ids: `x_i → i−1`, `y_j → n+j−1`, `z_i → n+m+i−1`.
    pub fn layout(&self) -> VarLayout {
        VarLayout::new(self.nvars, self.axioms.len(), if self.include_boolean { self.nvars } else { 0 })
    }

    /// Every placeholder id with the polynomial it stands for.
    pub fn placeholders(&self) -> Vec<(usize, SparsePoly)> {
        let l = self.layout();
        let t = l.total();
        let mut out: Vec<(usize, SparsePoly)> = self.axioms.iter().enumerate().map(|(j, f)| (l.y(j + 1), f.clone().with_nvars(t))).collect();
        for i in 1..=l.nz {
            let x = SparsePoly::var(self.spec, t, l.x(i));
            out.push((l.z(i), &(&x * &x) - &x));
        }
        out
    }

    /// Value of every placeholder at an x-point.
    pub fn placeholder_values(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let mut out = Vec::with_capacity(self.layout().total());
        out.extend_from_slice(x);
        for f in &self.axioms {
            out.push(f.eval(x)?);
        }
        if self.include_boolean {
            for v in x {
                out.push(v.try_mul(v)?.try_sub(v)?);
            }
        }
        Ok(out)
    }

    /// Whether `x` satisfies every axiom.
    pub fn satisfied_by(&self, x: &[FieldElement]) -> Result<bool> {
        Ok(self.placeholder_values(x)?[self.nvars..].iter().all(|v| v.is_zero()))
    }
}

/// Which placeholders the proof is promised to be linear in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Linearity {
    General,
    /// Individual degree ≤ 1 in every `y_j` and `z_i`.
    LinYZ,
    /// Individual degree ≤ 1 in every `y_j`.
    LinY,
}

impl Linearity {
    pub fn name(&self) -> &'static str {
        match self {
            Linearity::General => "general",
            Linearity::LinYZ => "lin_yz",
            Linearity::LinY => "lin_y",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Linearity::General),
            "lin_yz" => Ok(Linearity::LinYZ),
            "lin_y" => Ok(Linearity::LinY),
            _ => Err(Error::Parse(format!("unknown linearity '{s}'"))),
        }
    }
}

/// A proof circuit `C(x, y, z)` for an axiom system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpsCertificate {
    pub system: AxiomSystem,
    pub proof: Circuit,
    pub linearity: Linearity,
}

/// Which defining identity a certificate breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `C(x, 0, 0) = 0`
    Zero,
    /// `C(x, f, x² − x) = 1`
    One,
    /// The claimed linearity.
    Linearity,
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::Zero => "zero-condition",
            Condition::One => "one-condition",
            Condition::Linearity => "linearity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// The broken condition and, when available, an x-point witnessing it.
    Invalid(Condition, Option<Vec<FieldElement>>),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl IpsCertificate {
    pub fn new(system: AxiomSystem, proof: Circuit, linearity: Linearity) -> Result<Self> {
        if proof.spec() != system.spec {
            return Err(Error::SpecMismatch);
        }
        let total = system.layout().total();
        if proof.nvars() > total {
            return Err(Error::OutOfRange(format!("proof uses {} variables, layout has {total}", proof.nvars())));
        }
        Ok(IpsCertificate { system, proof, linearity })
    }

    pub fn layout(&self) -> VarLayout {
        self.system.layout()
    }

    fn expanded(&self, budget: &mut Budget) -> Result<SparsePoly> {
        Ok(self.proof.expand(budget)?.with_nvars(self.layout().total()))
    }

    /// Placeholder ids the linearity tag constrains.
    fn linear_vars(&self) -> Vec<usize> {
        let l = self.layout();
        match self.linearity {
            Linearity::General => Vec::new(),
            Linearity::LinY => (1..=l.ny).map(|j| l.y(j)).collect(),
            Linearity::LinYZ => (1..=l.ny).map(|j| l.y(j)).chain((1..=l.nz).map(|k| l.z(k))).collect(),
        }
    }

    /// Both defining identities checked by exact expansion.
    pub fn verify_exact(&self, budget: &mut Budget) -> Result<Verdict> {
        let c = self.expanded(budget)?;
        if self.linear_vars().iter().any(|&v| c.var_degree(v) > 1) {
            return Ok(Verdict::Invalid(Condition::Linearity, None));
        }
        let n = self.system.nvars;
        let subs = self.system.placeholders();
        let zeros: Vec<(usize, FieldElement)> = subs.iter().map(|(v, _)| (*v, self.system.spec.zero())).collect();
        let at_zero = c.eval_partial(&zeros)?;
        if !at_zero.is_zero() {
            return Ok(Verdict::Invalid(Condition::Zero, nonzero_point(&at_zero, n)));
        }
        let at_axioms = c.substitute_budgeted(&subs, budget)?;
        let residual = &at_axioms - &SparsePoly::one(self.system.spec, at_axioms.nvars());
        if !residual.is_zero() {
            return Ok(Verdict::Invalid(Condition::One, nonzero_point(&residual, n)));
        }
        Ok(Verdict::Valid)
    }

    /// Degree bound of `C(x, f, x² − x)`.
    pub fn composed_degree_bound(&self) -> u64 {
        let l = self.layout();
        let degs: Vec<u64> = self.system.axioms.iter().map(|f| f.degree() as u64).collect();
        self.proof.degree_bound(&|v| {
            if v < l.nx {
                1
            } else if v < l.nx + l.ny {
                degs[v - l.nx]
            } else {
                2
            }
        })
    }

    /// Randomized check of both identities at `trials` points.
    pub fn verify_pit(&self, trials: u32, seed: u64) -> Result<PitOutcome> {
        let spec = self.system.spec;
        let n = self.system.nvars;
        let deg = self.composed_degree_bound().max(1);
        let sample = SampleSet::for_degree(spec, deg)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = self.layout().total();
        for _ in 0..trials {
            let x: Vec<FieldElement> = (0..n).map(|_| sample.draw(spec, &mut rng)).collect();
            let mut zero_pt = x.clone();
            zero_pt.resize(total, spec.zero());
            if !self.proof.eval(&zero_pt)?.is_zero() {
                return Ok(PitOutcome::invalid(Condition::Zero, x, deg, sample.size));
            }
            let full = self.system.placeholder_values(&x)?;
            if !self.proof.eval(&full)?.is_one() {
                return Ok(PitOutcome::invalid(Condition::One, x, deg, sample.size));
            }
        }
        Ok(PitOutcome { witness: None, degree: deg, sample_size: sample.size, trials })
    }
}

/// Some x-point where a polynomial in x (and possibly other variables) is
/// nonzero, found on the grid {0..deg}^n when that grid is small.
fn nonzero_point(f: &SparsePoly, n: usize) -> Option<Vec<FieldElement>> {
    let spec = f.spec();
    let side = f.degree() as u64 + 1;
    if side.checked_pow(n as u32).is_none_or(|c| c > 100_000) {
        return None;
    }
    let grid: Vec<FieldElement> = (0..side).map(|v| FieldElement::from_u64(spec, v)).collect();
    let mut idx = alloc::vec![0usize; n];
    loop {
        let assign: Vec<(usize, FieldElement)> = idx.iter().enumerate().map(|(v, &i)| (v, grid[i].clone())).collect();
        if let Ok(g) = f.eval_partial(&assign) {
            if !g.is_zero() {
                return Some(assign.into_iter().map(|(_, c)| c).collect());
            }
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < grid.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return None;
        }
    }
}

/// Evaluation set for polynomial identity testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSet {
    pub size: u64,
}

impl SampleSet {
    /// The whole field when `p` exceeds the degree bound; integers
    /// `[0, 2·deg]` over the rationals.
    pub fn for_degree(spec: FieldSpec, deg: u64) -> Result<Self> {
        match spec {
            FieldSpec::Prime(p) if p > deg => Ok(SampleSet { size: p }),
            FieldSpec::Prime(p) => Err(Error::FieldTooSmall { needed: deg as u128 + 1, have: p as u128 }),
            FieldSpec::Rational => Ok(SampleSet { size: 2 * deg + 1 }),
        }
    }

    pub fn draw<R: rand::Rng + ?Sized>(&self, spec: FieldSpec, rng: &mut R) -> FieldElement {
        FieldElement::random(spec, rng, self.size)
    }
}

/// Result of randomized verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PitOutcome {
    pub witness: Option<(Condition, Vec<FieldElement>)>,
    pub degree: u64,
    pub sample_size: u64,
    pub trials: u32,
}

impl PitOutcome {
    fn invalid(c: Condition, x: Vec<FieldElement>, degree: u64, sample_size: u64) -> Self {
        PitOutcome { witness: Some((c, x)), degree, sample_size, trials: 0 }
    }

    pub fn probably_valid(&self) -> bool {
        self.witness.is_none()
    }

    /// Per-trial false-accept bound deg/|S|, capped at 1.
    pub fn per_trial_error(&self) -> f64 {
        (self.degree as f64 / self.sample_size as f64).min(1.0)
    }

    /// Bound on accepting an invalid certificate after all trials; 1 when no
    /// trial ran.
    pub fn error_bound(&self) -> f64 {
        let mut b = 1.0;
        for _ in 0..self.trials {
            b *= self.per_trial_error();
        }
        b
    }

    pub fn describe(&self) -> String {
        match &self.witness {
            None => format!("probably valid: {} trials, error ≤ {:e}", self.trials, self.error_bound()),
            Some((c, _)) => format!("invalid: {}", c.name()),
        }
    }
}
