use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Monomial, SparsePoly};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Guard on the cube size for interpolation.
pub const MAX_INTERPOLATION_VARS: usize = 24;

/// S_{n,k}: sum of all products of k distinct variables among x_1..x_n.
pub fn elementary_symmetric(n: usize, k: usize, spec: FieldSpec) -> Result<SparsePoly> {
    if k > n {
        return Err(Error::OutOfRange(format!("k={k} exceeds n={n}")));
    }
    let mut p = SparsePoly::zero(spec, n);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        p.add_term(Monomial::from_vars(&idx), spec.one());
        // advance to the next k-subset in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(p);
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Unique multilinear polynomial with the given cube values.
///
/// `values[t]` is the value at the point whose i-th coordinate is bit i of t.
/// Computes the expansion Σ_T f(1_T) ∏_{i∈T} x_i ∏_{i∉T} (1 − x_i) by a
/// subset-wise Möbius transform.
pub fn interpolate_multilinear(spec: FieldSpec, n: usize, values: &[FieldElement]) -> Result<SparsePoly> {
    if n > MAX_INTERPOLATION_VARS {
        return Err(Error::OutOfRange(format!("{n} variables exceed the interpolation guard")));
    }
    if values.len() != 1usize << n {
        return Err(Error::Precondition(format!(
            "table has {} entries, expected {}",
            values.len(),
            1usize << n
        )));
    }
    let mut a: Vec<FieldElement> = values.to_vec();
    for v in &a {
        if v.spec() != spec {
            return Err(Error::SpecMismatch);
        }
    }
    for i in 0..n {
        let bit = 1usize << i;
        for t in 0..a.len() {
            if t & bit != 0 {
                let lo = a[t ^ bit].clone();
                a[t] -= &lo;
            }
        }
    }
    let mut p = SparsePoly::zero(spec, n);
    for (t, c) in a.into_iter().enumerate() {
        if !c.is_zero() {
            let vars: Vec<usize> = (0..n).filter(|i| t >> i & 1 == 1).collect();
            p.add_term(Monomial::from_vars(&vars), c);
        }
    }
    Ok(p)
}

/// Table of values of `f` on {0,1}^n in the layout of [`interpolate_multilinear`].
pub fn cube_table(spec: FieldSpec, n: usize, f: impl Fn(&[FieldElement]) -> Result<FieldElement>) -> Result<Vec<FieldElement>> {
    if n > MAX_INTERPOLATION_VARS {
        return Err(Error::OutOfRange(format!("{n} variables exceed the interpolation guard")));
    }
    let mut out = Vec::with_capacity(1 << n);
    let mut pt = alloc::vec![spec.zero(); n];
    for t in 0..1usize << n {
        for (i, c) in pt.iter_mut().enumerate() {
            *c = if t >> i & 1 == 1 { spec.one() } else { spec.zero() };
        }
        out.push(f(&pt)?);
    }
    Ok(out)
}

/// Zero each variable independently with probability `1 − num/den`.
///
/// Returns the restricted polynomial and the sorted list of kept variables.
pub fn random_restriction(f: &SparsePoly, keep_num: u64, keep_den: u64, seed: u64) -> Result<(SparsePoly, Vec<usize>)> {
    if keep_den == 0 || keep_num > keep_den {
        return Err(Error::Precondition(format!("bad keep probability {keep_num}/{keep_den}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.nvars().max(f.max_var_plus_one());
    let mut kept = Vec::new();
    let mut killed = Vec::new();
    for v in 0..n {
        if rng.gen_range(0..keep_den) < keep_num {
            kept.push(v);
        } else {
            killed.push((v, f.spec().zero()));
        }
    }
    Ok((f.eval_partial(&killed)?, kept))
}

/// Random polynomial with up to `nterms` terms, each of degree ≤ `maxdeg`,
/// individual degree ≤ `maxideg`, coefficients uniform over F_p or small
/// nonzero integers for the rationals.
pub fn random_poly<R: Rng + ?Sized>(
    spec: FieldSpec,
    nvars: usize,
    nterms: usize,
    maxdeg: u32,
    maxideg: u16,
    rng: &mut R,
) -> SparsePoly {
    let mut p = SparsePoly::zero(spec, nvars);
    for _ in 0..nterms {
        let mut exps = alloc::vec![0u16; nvars];
        let target = rng.gen_range(0..=maxdeg);
        let mut deg = 0;
        if nvars > 0 {
            for _ in 0..target * 2 {
                if deg >= target {
                    break;
                }
                let v = rng.gen_range(0..nvars);
                if exps[v] < maxideg {
                    exps[v] += 1;
                    deg += 1;
                }
            }
        }
        let c = loop {
            let c = match spec {
                FieldSpec::Prime(_) => FieldElement::random(spec, rng, 0),
                FieldSpec::Rational => FieldElement::from_i64(spec, rng.gen_range(-9..=9)),
            };
            if !c.is_zero() {
                break c;
            }
        };
        p.add_term(Monomial::new(exps), c);
    }
    p.with_nvars(nvars)
}
