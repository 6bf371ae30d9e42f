use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::ips::IpsCertificate;
use crate::poly::{Budget, SparsePoly};

/// A nonzero multiple `h = q·f` of the first axiom `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedMultiple {
    pub multiple: SparsePoly,
    pub quotient: SparsePoly,
}

/// `h = 1 − C(x, 0, g, x² − x)` for a refutation of `{f, g, booleans}` and a
/// point satisfying `g` and the booleans.
///
/// `h(point) = 1`, so `h ≠ 0`, and `h = C(x, f, g, x² − x) − C(x, 0, g, x² − x)`
/// is divisible by `f`; the quotient is found by exact division.
pub fn extract_multiple_from_ips(cert: &IpsCertificate, point: &[FieldElement], budget: &mut Budget) -> Result<ExtractedMultiple> {
    let sys = &cert.system;
    let n = sys.nvars;
    if sys.axioms.is_empty() {
        return Err(Error::Precondition("the system has no axiom to take multiples of".into()));
    }
    if point.len() != n {
        return Err(Error::Precondition(format!("point has {} coordinates, expected {n}", point.len())));
    }
    if !cert.verify_exact(budget)?.is_valid() {
        return Err(Error::InvalidCertificate("certificate does not verify".into()));
    }
    let values = sys.placeholder_values(point)?;
    if values[n + 1..].iter().any(|v| !v.is_zero()) {
        return Err(Error::Precondition("point does not satisfy the remaining axioms and the booleans".into()));
    }
    let layout = cert.layout();
    let total = layout.total();
    let mut subs: Vec<(usize, SparsePoly)> = sys.placeholders();
    subs[0].1 = SparsePoly::zero(sys.spec, total);
    let c = cert.proof.expand(budget)?.with_nvars(total);
    let partial = c.substitute_budgeted(&subs, budget)?;
    let h = (&SparsePoly::one(sys.spec, partial.nvars()) - &partial).with_nvars(n);
    if h.max_var_plus_one() > n {
        return Err(Error::InvalidCertificate("placeholders survive the substitution".into()));
    }
    if !h.eval(point)?.is_one() {
        return Err(Error::InvalidCertificate("extracted polynomial is not 1 at the point".into()));
    }
    let f = &sys.axioms[0];
    let quotient = h.divide_exact(f)?;
    if &(&quotient * f) != &h {
        return Err(Error::NotDivisible(format!("{f} does not divide the extracted polynomial")));
    }
    Ok(ExtractedMultiple { multiple: h, quotient })
}
