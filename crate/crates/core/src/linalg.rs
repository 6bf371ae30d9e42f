//! Exact rank over F_p, Q and F[w].

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::SparsePoly;

/// Rank of a matrix given as rows of field elements.
pub fn rank(spec: FieldSpec, rows: &[Vec<FieldElement>]) -> Result<usize> {
    for row in rows {
        if row.iter().any(|e| e.spec() != spec) {
            return Err(Error::SpecMismatch);
        }
    }
    Ok(match spec {
        FieldSpec::Prime(p) => {
            let m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|e| e.residue().unwrap()).collect()).collect();
            rank_mod_p(m, p)
        }
        FieldSpec::Rational => {
            let m: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
            rank_bareiss_int(m)
        }
    })
}

fn clear_denominators(row: &[FieldElement]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for e in row {
        l = l.lcm(e.as_rational().unwrap().denom());
    }
    row.iter()
        .map(|e| {
            let r = e.as_rational().unwrap();
            r.numer() * (&l / r.denom())
        })
        .collect()
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    FieldElement::Prime { v: a, p }.inv().unwrap().residue().unwrap()
}

/// Gaussian elimination over F_p.
pub fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let nrows = m.len();
    let ncols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    for r in m.iter_mut() {
        r.resize(ncols, 0);
    }
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..nrows).find(|&i| m[i][col] != 0) else { continue };
        m.swap(r, piv);
        let inv = inv_mod(m[r][col], p);
        for j in col..ncols {
            m[r][j] = mul_mod(m[r][j], inv, p);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let f = row[col];
            for j in col..ncols {
                let t = mul_mod(f, pivot_row[j], p);
                row[j] = if row[j] >= t { row[j] - t } else { row[j] + p - t };
            }
        }
        r += 1;
        if r == nrows {
            break;
        }
    }
    r
}

/// Fraction-free (Bareiss) elimination over the integers.
pub fn rank_bareiss_int(mut m: Vec<Vec<BigInt>>) -> usize {
    let nrows = m.len();
    let ncols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    for r in m.iter_mut() {
        r.resize(ncols, BigInt::zero());
    }
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(piv) = (r..nrows).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, piv);
        for i in r + 1..nrows {
            for j in col + 1..ncols {
                let v = (&m[r][col] * &m[i][j] - &m[i][col] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[r][col].clone();
        r += 1;
    }
    r
}

/// Rank over the fraction field F(w) of a matrix with polynomial entries,
/// by fraction-free elimination with exact polynomial division.
pub fn rank_poly(mut m: Vec<Vec<SparsePoly>>) -> Result<usize> {
    let nrows = m.len();
    let ncols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    let Some(spec) = m.iter().flatten().next().map(|e| e.spec()) else { return Ok(0) };
    for r in m.iter_mut() {
        r.resize(ncols, SparsePoly::zero(spec, 0));
    }
    let mut prev = SparsePoly::one(spec, 0);
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        // smallest nonzero pivot keeps intermediate entries small
        let Some(piv) = (r..nrows).filter(|&i| !m[i][col].is_zero()).min_by_key(|&i| m[i][col].sparsity()) else {
            continue;
        };
        m.swap(r, piv);
        for i in r + 1..nrows {
            for j in col + 1..ncols {
                let num = m[r][col].try_mul(&m[i][j])?.try_sub(&m[i][col].try_mul(&m[r][j])?)?;
                m[i][j] = num.divide_exact(&prev)?;
            }
            m[i][col] = SparsePoly::zero(spec, 0);
        }
        prev = m[r][col].clone();
        r += 1;
    }
    Ok(r)
}

/// Solve the square system `rows · x = rhs` by Gauss-Jordan elimination.
pub fn solve(mut rows: Vec<Vec<FieldElement>>, mut rhs: Vec<FieldElement>) -> Result<Vec<FieldElement>> {
    let n = rows.len();
    if rhs.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Precondition("system is not square".into()));
    }
    for col in 0..n {
        let piv = (col..n).find(|&i| !rows[i][col].is_zero()).ok_or(Error::DivisionByZero)?;
        rows.swap(col, piv);
        rhs.swap(col, piv);
        let inv = rows[col][col].inv()?;
        for j in col..n {
            rows[col][j] = rows[col][j].try_mul(&inv)?;
        }
        rhs[col] = rhs[col].try_mul(&inv)?;
        for i in 0..n {
            if i == col || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            for j in col..n {
                let t = f.try_mul(&rows[col][j])?;
                rows[i][j] = rows[i][j].try_sub(&t)?;
            }
            let t = f.try_mul(&rhs[col])?;
            rhs[i] = rhs[i].try_sub(&t)?;
        }
    }
    Ok(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{random_poly, MonomialOrder};
    use alloc::vec;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ints(spec: FieldSpec, rows: &[&[i64]]) -> Vec<Vec<FieldElement>> {
        rows.iter().map(|r| r.iter().map(|&v| spec.int(v)).collect()).collect()
    }

    #[test]
    fn small_ranks() {
        for spec in [FieldSpec::Prime(7), FieldSpec::Rational] {
            assert_eq!(rank(spec, &ints(spec, &[&[1, 2], &[2, 4]])).unwrap(), 1);
            assert_eq!(rank(spec, &ints(spec, &[&[1, 2, 3], &[0, 1, 1], &[1, 3, 4]])).unwrap(), 2);
            assert_eq!(rank(spec, &ints(spec, &[&[0, 0], &[0, 0]])).unwrap(), 0);
            assert_eq!(rank(spec, &[]).unwrap(), 0);
        }
        // 3 ≡ 10 mod 7 makes the rows dependent only over F_7
        let m = &[&[1i64, 3][..], &[1, 10][..]];
        assert_eq!(rank(FieldSpec::Prime(7), &ints(FieldSpec::Prime(7), m)).unwrap(), 1);
        assert_eq!(rank(FieldSpec::Rational, &ints(FieldSpec::Rational, m)).unwrap(), 2);
    }

    #[test]
    fn polynomial_rank() {
        let q = FieldSpec::Rational;
        let w = SparsePoly::var(q, 1, 0);
        let one = SparsePoly::one(q, 1);
        // [[w, 1], [w^2, w]] has determinant 0 over Q(w)
        let m = vec![vec![w.clone(), one.clone()], vec![w.pow(2), w.clone()]];
        assert_eq!(rank_poly(m).unwrap(), 1);
        let m = vec![vec![w.clone(), one.clone()], vec![one.clone(), w.clone()]];
        assert_eq!(rank_poly(m).unwrap(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Rational ranks of integer matrices agree with ranks mod a large prime
        /// for the planted low-rank products used here (entries are small).
        #[test]
        fn planted_rank(seed in any::<u64>(), r in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = FieldSpec::Rational;
            let a: Vec<Vec<i64>> = (0..5).map(|_| (0..r).map(|_| rand::Rng::gen_range(&mut rng, -3..4)).collect()).collect();
            let b: Vec<Vec<i64>> = (0..r).map(|_| (0..6).map(|_| rand::Rng::gen_range(&mut rng, -3..4)).collect()).collect();
            let prod: Vec<Vec<FieldElement>> = (0..5).map(|i| (0..6).map(|j| q.int((0..r).map(|k| a[i][k] * b[k][j]).sum())).collect()).collect();
            let got = rank(q, &prod).unwrap();
            prop_assert!(got <= r);
            let p = FieldSpec::Prime(1_000_003);
            let prod_p: Vec<Vec<FieldElement>> = prod.iter().map(|row| row.iter().map(|e| FieldElement::from_bigint(p, &e.as_rational().unwrap().to_integer())).collect()).collect();
            prop_assert_eq!(rank(p, &prod_p).unwrap(), got);
        }

        /// Span dimension equals the number of distinct leading monomials of an
        /// echelonized basis, and is at least the count among the generators.
        #[test]
        fn span_dimension_vs_leading_monomials(seed in any::<u64>()) {
            let spec = FieldSpec::Prime(101);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gens: Vec<SparsePoly> = (0..5).map(|_| random_poly(spec, 3, 3, 2, 2, &mut rng)).collect();
            let ord = MonomialOrder::graded_lex_n(3);
            let mut mons: Vec<_> = gens.iter().flat_map(|g| g.terms().keys().cloned()).collect();
            mons.sort_by(|a, b| ord.cmp(b, a));
            mons.dedup();
            let rows: Vec<Vec<FieldElement>> = gens.iter().map(|g| mons.iter().map(|m| g.coeff(m)).collect()).collect();
            let dim = rank(spec, &rows).unwrap();
            let mut gen_lms: Vec<_> = gens.iter().filter(|g| !g.is_zero()).map(|g| g.leading_monomial(&ord).unwrap()).collect();
            gen_lms.sort();
            gen_lms.dedup();
            prop_assert!(dim >= gen_lms.len());
            // reduce to echelon form with columns sorted by decreasing monomial
            let mut basis: Vec<SparsePoly> = Vec::new();
            for g in &gens {
                let mut h = g.clone();
                loop {
                    if h.is_zero() { break; }
                    let (lm, lc) = h.leading_term(&ord).unwrap();
                    match basis.iter().find(|b| b.leading_monomial(&ord).unwrap() == lm) {
                        Some(b) => {
                            let k = &lc * &b.leading_coeff(&ord).unwrap().inv().unwrap();
                            h = &h - &b.scale(&k);
                        }
                        None => { basis.push(h); break; }
                    }
                }
            }
            prop_assert_eq!(basis.len(), dim);
        }
    }
}
