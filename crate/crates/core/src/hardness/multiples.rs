use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{pow2, HardnessReport, Relation};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::measure::{leading_diagonal, PartitionSpec};
use crate::poly::{Budget, Monomial, MonomialOrder, SparsePoly};

/// `2^{|supp LM(h)|}`: a powering formula computing `h` has at least this size.
pub fn certify_multiple_sps(h: &SparsePoly, ord: &MonomialOrder) -> Result<u128> {
    let lm = h.leading_monomial(ord)?;
    Ok(pow2(lm.support_size()))
}

/// `2^{⌊|supp LM(h)| / (c·t)⌋}` for sums of powers of degree-`t` polynomials,
/// with the hidden constant `c` supplied by the caller. Requires the
/// characteristic to be 0 or at least the individual degree of `LM(h)`.
pub fn certify_multiple_sps_t(h: &SparsePoly, t: u32, c: u32, ord: &MonomialOrder) -> Result<u128> {
    if t == 0 || c == 0 {
        return Err(Error::Precondition("t and c must be positive".into()));
    }
    let lm = h.leading_monomial(ord)?;
    let ideg = lm.ideg() as u64;
    if !h.spec().characteristic_guard(ideg.saturating_sub(1)) {
        return Err(Error::Precondition(format!("characteristic {} is below the individual degree {ideg}", h.spec().characteristic())));
    }
    Ok(pow2(lm.support_size() / (c as usize * t as usize)))
}

/// `2^{|supp TM(h(x + α))|}` lower-bounds the sparsity of `h` when `α` has
/// no zero entry.
pub fn certify_multiple_sparse(h: &SparsePoly, alpha: &[FieldElement], ord: &MonomialOrder) -> Result<u128> {
    if alpha.iter().any(|a| a.is_zero()) {
        return Err(Error::Precondition("translation must have full support".into()));
    }
    let n = h.nvars().max(h.max_var_plus_one());
    if alpha.len() < n {
        return Err(Error::OutOfRange(format!("translation has {} entries for {n} variables", alpha.len())));
    }
    let spec = h.spec();
    let map: Vec<(usize, SparsePoly)> = (0..n)
        .map(|i| (i, &SparsePoly::var(spec, n, i) + &SparsePoly::constant(spec, n, alpha[i].clone())))
        .collect();
    let shifted = h.substitute(&map)?;
    let tm = shifted.trailing_monomial(ord)?;
    Ok(pow2(tm.support_size()))
}

/// Cap on the number of multipliers [`min_multiple_sparsity_bruteforce`] tries.
pub const MAX_BRUTEFORCE_CANDIDATES: u128 = 10_000_000;

/// Smallest sparsity of `g·f` over all nonzero multilinear `g` in the
/// variables of `f`, with coefficients in the prime field of `f`.
pub fn min_multiple_sparsity_bruteforce(f: &SparsePoly) -> Result<(usize, SparsePoly)> {
    let spec = f.spec();
    let p = match spec {
        FieldSpec::Prime(p) => p,
        FieldSpec::Rational => return Err(Error::Precondition("enumeration needs a finite field".into())),
    };
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = f.nvars().max(f.max_var_plus_one());
    let k = 1usize << n.min(20);
    let count = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if n > 20 || count > MAX_BRUTEFORCE_CANDIDATES {
        return Err(Error::Budget { needed: count, limit: MAX_BRUTEFORCE_CANDIDATES });
    }
    let monos: Vec<Monomial> = (0..k).map(|t| Monomial::from_vars(&(0..n).filter(|i| t >> i & 1 == 1).collect::<Vec<_>>())).collect();
    let shifted: Vec<SparsePoly> = monos.iter().map(|m| f.shift(m)).collect();
    let mut digits = alloc::vec![0u64; k];
    let mut best: Option<(usize, SparsePoly)> = None;
    loop {
        // next nonzero coefficient vector
        let mut i = 0;
        while i < k {
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
        let mut prod = SparsePoly::zero(spec, n);
        for (d, s) in digits.iter().zip(&shifted) {
            if *d != 0 {
                prod = &prod + &s.scale(&FieldElement::from_u64(spec, *d));
            }
        }
        if best.as_ref().is_none_or(|(b, _)| prod.sparsity() < *b) {
            let mut g = SparsePoly::zero(spec, n);
            for (d, m) in digits.iter().zip(&monos) {
                if *d != 0 {
                    g.add_term(m.clone(), FieldElement::from_u64(spec, *d));
                }
            }
            best = Some((prod.sparsity(), g));
        }
    }
    Ok(best.expect("at least one nonzero multiplier"))
}

/// `sparsity(LD(h))` across a paired partition, a lower bound on the width
/// of any roABP for `h` that reads the u-side first.
pub fn certify_multiple_roabp(h: &SparsePoly, part: &PartitionSpec, ord: &MonomialOrder) -> Result<usize> {
    Ok(leading_diagonal(h, part, ord)?.sparsity())
}

/// Balanced partitions `u | v | w` of `0..n` with `|u| = |v| = ⌊n/2⌋` and
/// `0 ∈ u`, each unordered split listed once; `w` holds the leftover
/// variable when `n` is odd.
pub fn balanced_partitions(n: usize) -> Vec<PartitionSpec> {
    let half = n / 2;
    let mut out = Vec::new();
    if half == 0 {
        return out;
    }
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != 2 * half {
            continue;
        }
        let chosen: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let rest: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let first = chosen[0];
        let others = &chosen[1..];
        for sub in 0u32..(1 << others.len()) {
            if sub.count_ones() as usize != half - 1 {
                continue;
            }
            let mut u = alloc::vec![first];
            let mut v = Vec::new();
            for (i, &x) in others.iter().enumerate() {
                if sub >> i & 1 == 1 {
                    u.push(x);
                } else {
                    v.push(x);
                }
            }
            out.push(PartitionSpec::new(u, v, rest.clone()).expect("disjoint by construction"));
        }
    }
    out
}

/// `∏_{i<j} (x_i + x_j + α_ij)` with `alpha` listed in lexicographic pair order.
pub fn pairwise_product(n: usize, alpha: &[FieldElement], budget: &mut Budget) -> Result<SparsePoly> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    if alpha.len() != pairs.len() {
        return Err(Error::Precondition(format!("need {} shifts, got {}", pairs.len(), alpha.len())));
    }
    let spec = alpha.first().map(|a| a.spec()).ok_or_else(|| Error::Precondition("need n ≥ 2".into()))?;
    let mut h = SparsePoly::one(spec, n);
    for ((i, j), a) in pairs.iter().zip(alpha) {
        let f = &(&SparsePoly::var(spec, n, *i) + &SparsePoly::var(spec, n, *j)) + &SparsePoly::constant(spec, n, a.clone());
        h = h.mul_budgeted(&f, budget)?;
    }
    Ok(h)
}

/// Largest `n` for which every balanced partition is tried.
pub const MAX_EVERY_PARTITION_N: usize = 6;

/// For each balanced partition, evaluate the leftover variables at
/// `w_value`, then measure `sparsity(LD(h))` across the natural matching of
/// the sorted halves. Every partition must reach `2^{⌊n/2⌋}`; the report
/// carries the minimum and the partition attaining it.
pub fn certify_every_partition_roabp(h: &SparsePoly, n: usize, w_value: &FieldElement) -> Result<HardnessReport> {
    if n > MAX_EVERY_PARTITION_N {
        return Err(Error::OutOfRange(format!("n = {n} exceeds {MAX_EVERY_PARTITION_N}")));
    }
    let parts = balanced_partitions(n);
    if parts.is_empty() {
        return Err(Error::Precondition("need at least two variables".into()));
    }
    let mut worst: Option<(usize, String)> = None;
    for part in &parts {
        let assign: Vec<(usize, FieldElement)> = part.w.iter().map(|&v| (v, w_value.clone())).collect();
        let restricted = h.eval_partial(&assign)?;
        let inner = PartitionSpec::split(part.u.clone(), part.v.clone())?;
        let ord = MonomialOrder::graded_lex_n(part.u.len());
        let s = certify_multiple_roabp(&restricted, &inner, &ord)?;
        if worst.as_ref().is_none_or(|(b, _)| s < *b) {
            worst = Some((s, format!("{:?}|{:?}", part.u, part.v)));
        }
    }
    let (s, at) = worst.expect("nonempty");
    Ok(HardnessReport::judge(
        "pairwise-product-every-partition",
        format!("n={n} field={} partitions={}", h.spec(), parts.len()),
        s as u128,
        pow2(n / 2),
        Relation::AtLeast,
        format!("minimum leading-diagonal sparsity {s} at partition {at}"),
    ))
}
