use alloc::format;
use alloc::vec::Vec;

use super::{pow2, HardnessReport, Relation};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::ips::appendix_inverse_poly;
use crate::measure::{coeff_dim, eval_dim, PartitionSpec};
use crate::poly::{cube_table, interpolate_multilinear, SparsePoly};

/// The multilinear polynomial equal to `1 / form(x)` on `{0,1}^n`.
pub fn inverse_on_cube(spec: FieldSpec, n: usize, form: impl Fn(&[FieldElement]) -> FieldElement) -> Result<SparsePoly> {
    let table = cube_table(spec, n, |x| form(x).inv())?;
    interpolate_multilinear(spec, n, &table)
}

fn guards(beta: &FieldElement, bound: usize) -> Result<()> {
    let spec = beta.spec();
    if !spec.characteristic_guard(bound as u64) {
        return Err(Error::Precondition(format!("characteristic must be 0 or exceed {bound}")));
    }
    if (0..=bound).any(|j| beta == &FieldElement::from_u64(spec, j as u64)) {
        return Err(Error::Precondition(format!("β = {beta} lies in {{0..{bound}}}")));
    }
    Ok(())
}

fn sum_minus(beta: &FieldElement) -> impl Fn(&[FieldElement]) -> FieldElement + '_ {
    move |x| {
        let mut s = -beta;
        for v in x {
            s += v;
        }
        s
    }
}

/// The multilinear inverse of `Σ x_i − β`, built twice and compared.
fn inverse_witness(n: usize, beta: &FieldElement) -> Result<core::result::Result<SparsePoly, (SparsePoly, SparsePoly)>> {
    guards(beta, n)?;
    let a = appendix_inverse_poly(n, beta)?;
    let b = inverse_on_cube(beta.spec(), n, sum_minus(beta))?;
    Ok(if a == b { Ok(a) } else { Err((a, b)) })
}

fn params(n: usize, beta: &FieldElement) -> alloc::string::String {
    format!("n={n} beta={beta} field={}", beta.spec())
}

fn mismatch_report(claim: &str, n: usize, beta: &FieldElement, a: &SparsePoly, b: &SparsePoly) -> HardnessReport {
    // the two constructions disagree: report a refutation carrying both
    HardnessReport::judge(claim, params(n, beta), 0, 1, Relation::Equal, format!("closed form {a} differs from interpolation {b}"))
}

/// The multilinear inverse of `Σ x_i − β` on the cube has degree exactly `n`.
pub fn check_degree_bound(n: usize, beta: &FieldElement) -> Result<HardnessReport> {
    let claim = "subset-sum-inverse-degree";
    match inverse_witness(n, beta)? {
        Ok(f) => Ok(HardnessReport::judge(claim, params(n, beta), f.degree() as u128, n as u128, Relation::Equal, format!("witness {f}"))),
        Err((a, b)) => Ok(mismatch_report(claim, n, beta, &a, &b)),
    }
}

/// The multilinear inverse of `Σ x_i − β` on the cube has all `2^n` monomials.
pub fn check_sparsity_bound(n: usize, beta: &FieldElement) -> Result<HardnessReport> {
    let claim = "subset-sum-inverse-sparsity";
    match inverse_witness(n, beta)? {
        Ok(f) => {
            let missing: Vec<_> = (0u64..1 << n)
                .map(|t| crate::poly::Monomial::from_vars(&(0..n).filter(|i| t >> i & 1 == 1).collect::<Vec<_>>()))
                .filter(|m| f.coeff(m).is_zero())
                .collect();
            let evidence = match missing.first() {
                Some(m) => format!("monomial {m} is absent"),
                None => format!("{} monomials", f.sparsity()),
            };
            Ok(HardnessReport::judge(claim, params(n, beta), f.sparsity() as u128, pow2(n), Relation::Equal, evidence))
        }
        Err((a, b)) => Ok(mismatch_report(claim, n, beta, &a, &b)),
    }
}

/// Largest `n` for which the `2n`-variable interpolation is attempted.
pub const MAX_EVAL_DIM_N: usize = 7;

/// The inverse of `Σ x_i y_i − β` on the cube has evaluation dimension
/// `2^n` across `(x | y)` over the boolean cube; the coefficient dimension is
/// measured as well and must agree.
pub fn check_eval_dim_xy(n: usize, beta: &FieldElement) -> Result<HardnessReport> {
    if n > MAX_EVAL_DIM_N {
        return Err(Error::OutOfRange(format!("n = {n} exceeds {MAX_EVAL_DIM_N}")));
    }
    guards(beta, n)?;
    let spec = beta.spec();
    let g = inverse_on_cube(spec, 2 * n, |v| {
        let mut s = -beta;
        for i in 0..n {
            s += &(&v[i] * &v[n + i]);
        }
        s
    })?;
    let part = PartitionSpec::split((0..n).collect(), (n..2 * n).collect())?;
    let e = eval_dim(&g, &part, &[spec.zero(), spec.one()])?;
    let c = coeff_dim(&g, &part)?;
    let report = HardnessReport::judge(
        "inner-product-inverse-eval-dim",
        params(n, beta),
        e as u128,
        pow2(n),
        Relation::Equal,
        format!("evaluation dimension {e}, coefficient dimension {c}"),
    );
    Ok(if e <= c { report } else { report.refuted(format!("evaluation dimension {e} exceeds coefficient dimension {c}")) })
}

/// Largest `n` for which [`check_any_partition`] runs.
pub const MAX_ANY_PARTITION_N: usize = 3;

/// For a balanced split `u | v` of `2n` variables, fixing the pairwise
/// weights to the natural matching `u_k ~ v_k` turns the inverse of
/// `Σ_{i<j} z_ij x_i x_j − β` into the inverse of `Σ_k x_{u_k} x_{v_k} − β`,
/// whose coefficient dimension across `u | v` must be at least `2^n`.
pub fn check_any_partition(n: usize, beta: &FieldElement, u: &[usize], v: &[usize]) -> Result<HardnessReport> {
    if n > MAX_ANY_PARTITION_N {
        return Err(Error::OutOfRange(format!("n = {n} exceeds {MAX_ANY_PARTITION_N}")));
    }
    let mut all: Vec<usize> = u.iter().chain(v).copied().collect();
    all.sort_unstable();
    if u.len() != n || v.len() != n || all != (0..2 * n).collect::<Vec<_>>() {
        return Err(Error::Partition(format!("need two halves of size {n} covering 0..{}", 2 * n)));
    }
    guards(beta, n)?;
    let spec = beta.spec();
    let mut us = u.to_vec();
    let mut vs = v.to_vec();
    us.sort_unstable();
    vs.sort_unstable();
    let g = inverse_on_cube(spec, 2 * n, |x| {
        let mut s = -beta;
        for (a, b) in us.iter().zip(&vs) {
            s += &(&x[*a] * &x[*b]);
        }
        s
    })?;
    let part = PartitionSpec::split(us.clone(), vs.clone())?;
    let c = coeff_dim(&g, &part)?;
    Ok(HardnessReport::judge(
        "pairwise-inverse-any-partition",
        format!("{} partition={us:?}|{vs:?}", params(n, beta)),
        c as u128,
        pow2(n),
        Relation::AtLeast,
        format!("coefficient dimension {c}"),
    ))
}
