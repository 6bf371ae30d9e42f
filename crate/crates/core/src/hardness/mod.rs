//! Small-instance checks of lower bounds: functional lower bounds for the
//! subset-sum inverse, certified bounds for multiples, the rank-restricted
//! matrix generator and the extraction of multiples from refutations.

mod extract;
mod functional;
mod multiples;
mod svb;


pub use extract::{extract_multiple_from_ips, ExtractedMultiple};
pub use functional::{check_any_partition, check_degree_bound, check_eval_dim_xy, check_sparsity_bound, inverse_on_cube};
pub use multiples::{
    balanced_partitions, certify_every_partition_roabp, certify_multiple_roabp, certify_multiple_sparse, certify_multiple_sps,
    certify_multiple_sps_t, min_multiple_sparsity_bruteforce, pairwise_product, MAX_BRUTEFORCE_CANDIDATES,
};
pub use svb::{determinant_poly, svb_build, svb_check, svb_sample, SvbCheck, SvbGenerator, SYMBOLIC_MAX_N};

use alloc::string::String;
use core::fmt;

/// How a measured value must relate to the claimed bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Equal,
    AtLeast,
    AtMost,
}

impl Relation {
    pub fn holds(&self, measured: u128, claimed: u128) -> bool {
        match self {
            Relation::Equal => measured == claimed,
            Relation::AtLeast => measured >= claimed,
            Relation::AtMost => measured <= claimed,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HardnessVerdict {
    Confirmed,
    /// Confirmed by random sampling; the bound is the false-accept probability.
    ConfirmedProbabilistic { error_bound: f64 },
    Refuted,
    Inconclusive,
}

impl HardnessVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            HardnessVerdict::Confirmed | HardnessVerdict::ConfirmedProbabilistic { .. } => "confirmed",
            HardnessVerdict::Refuted => "refuted",
            HardnessVerdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for HardnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HardnessVerdict::ConfirmedProbabilistic { error_bound } => write!(f, "confirmed (p <= {error_bound:e})"),
            v => f.write_str(v.name()),
        }
    }
}

/// Outcome of one claim checked on one instance.
///
/// `evidence` describes the measured object; it becomes the counterexample
/// when the claim is refuted.
#[derive(Clone, Debug, PartialEq)]
pub struct HardnessReport {
    pub claim: String,
    pub params: String,
    pub measured: u128,
    pub claimed: u128,
    pub relation: Relation,
    pub verdict: HardnessVerdict,
    pub evidence: String,
    pub counterexample: Option<String>,
    pub millis: u64,
}

impl HardnessReport {
    pub fn judge(claim: &str, params: String, measured: u128, claimed: u128, relation: Relation, evidence: String) -> Self {
        let mut r = HardnessReport {
            claim: claim.into(),
            params,
            measured,
            claimed,
            relation,
            verdict: HardnessVerdict::Inconclusive,
            evidence,
            counterexample: None,
            millis: 0,
        };
        r.rejudge();
        r
    }

    fn rejudge(&mut self) {
        if self.relation.holds(self.measured, self.claimed) {
            if self.verdict != HardnessVerdict::Confirmed && !matches!(self.verdict, HardnessVerdict::ConfirmedProbabilistic { .. }) {
                self.verdict = HardnessVerdict::Confirmed;
            }
            self.counterexample = None;
        } else {
            self.verdict = HardnessVerdict::Refuted;
            self.counterexample = Some(self.evidence.clone());
        }
    }

    /// Same measurement judged against another claimed bound.
    pub fn with_claimed(mut self, claimed: u128) -> Self {
        self.claimed = claimed;
        if self.verdict == HardnessVerdict::Refuted {
            self.verdict = HardnessVerdict::Inconclusive;
        }
        self.rejudge();
        self
    }

    /// Downgrade a confirmation to a probabilistic one.
    pub fn probabilistic(mut self, error_bound: f64) -> Self {
        if self.verdict == HardnessVerdict::Confirmed {
            self.verdict = HardnessVerdict::ConfirmedProbabilistic { error_bound };
        }
        self
    }

    /// Refute regardless of the numbers, e.g. when a cross-check fails.
    pub fn refuted(mut self, counterexample: String) -> Self {
        self.verdict = HardnessVerdict::Refuted;
        self.counterexample = Some(counterexample);
        self
    }

    /// Mark a claim that could not be decided, keeping the measurement.
    pub fn inconclusive(mut self) -> Self {
        self.verdict = HardnessVerdict::Inconclusive;
        self.counterexample = None;
        self
    }

    pub fn is_refuted(&self) -> bool {
        self.verdict == HardnessVerdict::Refuted
    }

    pub fn is_confirmed(&self) -> bool {
        matches!(self.verdict, HardnessVerdict::Confirmed | HardnessVerdict::ConfirmedProbabilistic { .. })
    }
}

/// `2^k`, saturating.
pub(crate) fn pow2(k: usize) -> u128 {
    1u128.checked_shl(k as u32).unwrap_or(u128::MAX)
}
