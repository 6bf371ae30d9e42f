//! Coefficient and evaluation dimension, leading and trailing diagonals.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg;
use crate::poly::{Monomial, MonomialOrder, SparsePoly};

/// Variable bipartition `(u | v)` with optional residual variables `w`
/// treated as coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub w: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(u: Vec<usize>, v: Vec<usize>, w: Vec<usize>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &x in u.iter().chain(v.iter()).chain(w.iter()) {
            if !seen.insert(x) {
                return Err(Error::Partition(format!("variable {x} appears twice")));
            }
        }
        Ok(PartitionSpec { u, v, w })
    }

    pub fn split(u: Vec<usize>, v: Vec<usize>) -> Result<Self> {
        Self::new(u, v, Vec::new())
    }

    pub fn swapped(&self) -> Self {
        PartitionSpec { u: self.v.clone(), v: self.u.clone(), w: self.w.clone() }
    }

    fn covers(&self, f: &SparsePoly) -> Result<()> {
        for x in f.support_vars() {
            if !self.u.contains(&x) && !self.v.contains(&x) && !self.w.contains(&x) {
                return Err(Error::Partition(format!("variable {x} is not covered")));
            }
        }
        Ok(())
    }
}

/// Coefficients of `f` in `F[w][u, v]`, rows indexed by occurring
/// u-monomials and columns by occurring v-monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientMatrix {
    pub rows: Vec<Monomial>,
    pub cols: Vec<Monomial>,
    pub entries: Vec<Vec<SparsePoly>>,
}

impl CoefficientMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }
}

pub fn coefficient_matrix(f: &SparsePoly, part: &PartitionSpec) -> Result<CoefficientMatrix> {
    part.covers(f)?;
    let us: BTreeSet<usize> = part.u.iter().copied().collect();
    let vs: BTreeSet<usize> = part.v.iter().copied().collect();
    let mut cells: BTreeMap<(Monomial, Monomial), SparsePoly> = BTreeMap::new();
    for (m, c) in f.terms() {
        let a = m.restrict(|x| us.contains(&x));
        let b = m.restrict(|x| vs.contains(&x));
        let rest = m.restrict(|x| !us.contains(&x) && !vs.contains(&x));
        cells.entry((a, b)).or_insert_with(|| SparsePoly::zero(f.spec(), f.nvars())).add_term(rest, c.clone());
    }
    cells.retain(|_, p| !p.is_zero());
    let rows: Vec<Monomial> = cells.keys().map(|(a, _)| a.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let cols: Vec<Monomial> = cells.keys().map(|(_, b)| b.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let entries = rows
        .iter()
        .map(|a| {
            cols.iter()
                .map(|b| cells.get(&(a.clone(), b.clone())).cloned().unwrap_or_else(|| SparsePoly::zero(f.spec(), f.nvars())))
                .collect()
        })
        .collect();
    Ok(CoefficientMatrix { rows, cols, entries })
}

/// Rank of the coefficient matrix, over `F(w)` when `w` is nonempty.
pub fn coeff_dim(f: &SparsePoly, part: &PartitionSpec) -> Result<usize> {
    let m = coefficient_matrix(f, part)?;
    if m.entries.iter().flatten().all(|e| e.is_constant()) {
        let rows: Vec<Vec<FieldElement>> = m.entries.iter().map(|r| r.iter().map(|e| e.constant_term()).collect()).collect();
        linalg::rank(f.spec(), &rows)
    } else {
        linalg::rank_poly(m.entries)
    }
}

/// Largest number of grid points `eval_dim` will enumerate.
pub const MAX_GRID_POINTS: u128 = 1 << 20;

/// Dimension of the span of `f(u, β)` over `β ∈ S^|v|`.
pub fn eval_dim(f: &SparsePoly, part: &PartitionSpec, grid: &[FieldElement]) -> Result<usize> {
    if !part.w.is_empty() {
        return Err(Error::Partition("evaluation dimension needs an empty residual set".into()));
    }
    part.covers(f)?;
    let count = (grid.len() as u128).checked_pow(part.v.len() as u32).unwrap_or(u128::MAX);
    if count > MAX_GRID_POINTS {
        return Err(Error::OutOfRange(format!("{count} grid points exceed {MAX_GRID_POINTS}")));
    }
    let mut rows = Vec::new();
    let mut cols: BTreeSet<Monomial> = BTreeSet::new();
    let mut idx = alloc::vec![0usize; part.v.len()];
    loop {
        let assign: Vec<(usize, FieldElement)> = part.v.iter().zip(idx.iter()).map(|(&x, &i)| (x, grid[i].clone())).collect();
        let g = f.eval_partial(&assign)?;
        cols.extend(g.terms().keys().cloned());
        rows.push(g);
        // odometer over S^|v|
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < grid.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() || grid.is_empty() {
            break;
        }
    }
    let mat: Vec<Vec<FieldElement>> = rows.iter().map(|g| cols.iter().map(|m| g.coeff(m)).collect()).collect();
    linalg::rank(f.spec(), &mat)
}

fn paired(part: &PartitionSpec) -> Result<()> {
    if part.u.len() != part.v.len() {
        return Err(Error::Partition(format!("diagonals need paired sides, got {} and {}", part.u.len(), part.v.len())));
    }
    Ok(())
}

/// Terms of `f` grouped by their z-monomial after `u_i ← u_i z_i`, `v_i ← v_i z_i`.
fn diagonal_groups(f: &SparsePoly, part: &PartitionSpec) -> BTreeMap<Monomial, SparsePoly> {
    let mut groups: BTreeMap<Monomial, SparsePoly> = BTreeMap::new();
    for (m, c) in f.terms() {
        let z: Vec<u16> = part.u.iter().zip(part.v.iter()).map(|(&a, &b)| m.exp(a) + m.exp(b)).collect();
        groups.entry(Monomial::new(z)).or_insert_with(|| SparsePoly::zero(f.spec(), f.nvars())).add_term(m.clone(), c.clone());
    }
    groups
}

fn diagonal(f: &SparsePoly, part: &PartitionSpec, ord: &MonomialOrder, leading: bool) -> Result<SparsePoly> {
    paired(part)?;
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let groups = diagonal_groups(f, part);
    let pick = |a: &&Monomial, b: &&Monomial| ord.cmp(a, b);
    let key = if leading { groups.keys().max_by(pick) } else { groups.keys().min_by(pick) };
    Ok(groups[key.expect("nonzero polynomial")].clone())
}

/// Leading coefficient of `f(u∘z, v∘z)` in `z` under `ord` on z-indices.
pub fn leading_diagonal(f: &SparsePoly, part: &PartitionSpec, ord: &MonomialOrder) -> Result<SparsePoly> {
    diagonal(f, part, ord, true)
}

pub fn trailing_diagonal(f: &SparsePoly, part: &PartitionSpec, ord: &MonomialOrder) -> Result<SparsePoly> {
    diagonal(f, part, ord, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::random_roabp;
    use crate::field::FieldSpec;
    use crate::poly::{interpolate_multilinear, random_poly, Budget};
    use alloc::vec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: FieldSpec = FieldSpec::Prime(101);
    const Q: FieldSpec = FieldSpec::Rational;

    fn v(spec: FieldSpec, n: usize, i: usize) -> SparsePoly {
        SparsePoly::var(spec, n, i)
    }

    fn k(spec: FieldSpec, n: usize, c: i64) -> SparsePoly {
        SparsePoly::constant(spec, n, spec.int(c))
    }

    fn xy_split(n: usize) -> PartitionSpec {
        PartitionSpec::split((0..n).collect(), (n..2 * n).collect()).unwrap()
    }

    #[test]
    fn coefficient_matrix_examples() {
        let xy = &v(Q, 2, 0) * &v(Q, 2, 1);
        let m = coefficient_matrix(&xy, &xy_split(1)).unwrap();
        assert_eq!(m.shape(), (1, 1));
        assert_eq!(m.entries[0][0], k(Q, 2, 1));
        assert_eq!(coeff_dim(&xy, &xy_split(1)).unwrap(), 1);

        let f = &(&v(Q, 4, 0) * &v(Q, 4, 2)) + &(&v(Q, 4, 1) * &v(Q, 4, 3));
        assert_eq!(coeff_dim(&f, &xy_split(2)).unwrap(), 2);

        let g = &(&v(Q, 4, 0) + &v(Q, 4, 2)) * &(&v(Q, 4, 1) + &v(Q, 4, 3));
        let m = coefficient_matrix(&g, &xy_split(2)).unwrap();
        assert_eq!(m.rows, vec![Monomial::one(), Monomial::var(1), Monomial::var(0), Monomial::from_vars(&[0, 1])]);
        assert_eq!(coeff_dim(&g, &xy_split(2)).unwrap(), 4);

        assert!(coefficient_matrix(&g, &PartitionSpec::split(vec![0], vec![2]).unwrap()).is_err());
        assert!(PartitionSpec::split(vec![0, 1], vec![1]).is_err());
    }

    #[test]
    fn inverse_witness_has_full_rank() {
        // multilinear g agreeing with 1/(x1 y1 + x2 y2 − 3) on the cube; bit i is variable i
        let n = 4;
        let vals: Vec<FieldElement> = (0..1u32 << n)
            .map(|b| {
                let bit = |i: u32| (b >> i & 1) as i64;
                Q.int(bit(0) * bit(2) + bit(1) * bit(3) - 3).inv().unwrap()
            })
            .collect();
        let g = interpolate_multilinear(Q, n, &vals).unwrap();
        assert_eq!(coeff_dim(&g, &xy_split(2)).unwrap(), 4);
    }

    #[test]
    fn residual_variables_use_function_field_rank() {
        // f = w·x1y1 + x2y2 has rank 2 over F(w), and rank 1 at w = 0
        let n = 5;
        let f = &(&(&v(Q, n, 4) * &v(Q, n, 0)) * &v(Q, n, 2)) + &(&v(Q, n, 1) * &v(Q, n, 3));
        let part = PartitionSpec::new(vec![0, 1], vec![2, 3], vec![4]).unwrap();
        assert_eq!(coeff_dim(&f, &part).unwrap(), 2);
        let f0 = f.eval_partial(&[(4, Q.zero())]).unwrap();
        assert_eq!(coeff_dim(&f0, &part).unwrap(), 1);
    }

    #[test]
    fn eval_dim_examples() {
        let grid = [Q.zero(), Q.one()];
        let xy = &v(Q, 2, 0) * &v(Q, 2, 1);
        assert_eq!(eval_dim(&xy, &xy_split(1), &grid).unwrap(), 1);
        let f = &(&v(Q, 4, 0) * &v(Q, 4, 2)) + &(&v(Q, 4, 1) * &v(Q, 4, 3));
        assert_eq!(eval_dim(&f, &xy_split(2), &grid).unwrap(), 2);
        // x^2 y on S = {0, 1}: span of {0, x^2}
        let g = &v(Q, 2, 0).pow(2) * &v(Q, 2, 1);
        assert_eq!(eval_dim(&g, &xy_split(1), &grid).unwrap(), 1);
    }

    #[test]
    fn diagonal_examples() {
        let ord = MonomialOrder::default();
        let part = xy_split(1);
        let f = &(&v(Q, 2, 0) + &v(Q, 2, 1)) + &k(Q, 2, 3);
        assert_eq!(leading_diagonal(&f, &part, &ord).unwrap(), &v(Q, 2, 0) + &v(Q, 2, 1));
        assert_eq!(trailing_diagonal(&f, &part, &ord).unwrap(), k(Q, 2, 3));
        let g = &v(Q, 2, 0).pow(2) * &v(Q, 2, 1);
        assert_eq!(leading_diagonal(&g, &part, &ord).unwrap(), g);
        assert!(leading_diagonal(&SparsePoly::zero(Q, 2), &part, &ord).is_err());
        let unpaired = PartitionSpec::split(vec![0], vec![1, 2]).unwrap();
        assert!(matches!(leading_diagonal(&f, &unpaired, &ord), Err(Error::Partition(_))));
    }

    fn random_pair_ld(seed: u64) -> (SparsePoly, SparsePoly) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (random_poly(P, 4, 4, 3, 2, &mut rng), random_poly(P, 4, 4, 3, 2, &mut rng))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn coeff_dim_symmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_poly(P, 5, 8, 4, 2, &mut rng);
            let part = PartitionSpec::split(vec![0, 3], vec![1, 2, 4]).unwrap();
            prop_assert_eq!(coeff_dim(&f, &part).unwrap(), coeff_dim(&f, &part.swapped()).unwrap());
        }

        #[test]
        fn eval_dim_bounded_by_coeff_dim(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_poly(P, 4, 8, 4, 2, &mut rng);
            let part = xy_split(2);
            let cd = coeff_dim(&f, &part).unwrap();
            let small = [P.zero(), P.one()];
            prop_assert!(eval_dim(&f, &part, &small).unwrap() <= cd);
            let wide: Vec<FieldElement> = (0..3).map(|i| P.int(i)).collect();
            prop_assert_eq!(eval_dim(&f, &part, &wide).unwrap(), cd);
            let ml = f.multilinearize();
            prop_assert_eq!(eval_dim(&ml, &part, &small).unwrap(), coeff_dim(&ml, &part).unwrap());
        }

        #[test]
        fn diagonals_bound_coeff_dim(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_poly(P, 4, 10, 4, 2, &mut rng);
            prop_assume!(!f.is_zero());
            let part = xy_split(2);
            let ord = MonomialOrder::lex_n(2);
            let cd = coeff_dim(&f, &part).unwrap();
            prop_assert!(leading_diagonal(&f, &part, &ord).unwrap().sparsity() <= cd);
            prop_assert!(trailing_diagonal(&f, &part, &ord).unwrap().sparsity() <= cd);
        }

        #[test]
        fn diagonals_multiplicative(seed in any::<u64>()) {
            let (f, g) = random_pair_ld(seed);
            prop_assume!(!f.is_zero() && !g.is_zero());
            let part = xy_split(2);
            for ord in [MonomialOrder::lex_n(2), MonomialOrder::graded_lex(vec![1, 0])] {
                let fg = &f * &g;
                prop_assert_eq!(leading_diagonal(&fg, &part, &ord).unwrap(), &leading_diagonal(&f, &part, &ord).unwrap() * &leading_diagonal(&g, &part, &ord).unwrap());
                prop_assert_eq!(trailing_diagonal(&fg, &part, &ord).unwrap(), &trailing_diagonal(&f, &part, &ord).unwrap() * &trailing_diagonal(&g, &part, &ord).unwrap());
            }
        }

        /// f = Σ_{i<r} g_i(u) h_i(v) with triangular, hence independent, families has rank r.
        #[test]
        fn planted_low_rank(seed in any::<u64>(), r in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut f = SparsePoly::zero(P, 6);
            for i in 0..r {
                // g_i has x1^{i+1} as its only term of that x1-degree; same for h_i and x4
                let mut g = SparsePoly::monomial(P, 6, Monomial::new(vec![i as u16 + 1]), P.one());
                let mut h = SparsePoly::monomial(P, 6, Monomial::new(vec![0, 0, 0, i as u16 + 1]), P.one());
                for _ in 0..2 {
                    g.add_term(Monomial::new(vec![rng.gen_range(0..=i as u16), rng.gen_range(0..2), rng.gen_range(0..2)]), FieldElement::random(P, &mut rng, 0));
                    h.add_term(Monomial::new(vec![0, 0, 0, rng.gen_range(0..=i as u16), rng.gen_range(0..2), rng.gen_range(0..2)]), FieldElement::random(P, &mut rng, 0));
                }
                f = &f + &(&g * &h);
            }
            let part = PartitionSpec::split(vec![0, 1, 2], vec![3, 4, 5]).unwrap();
            prop_assert_eq!(coeff_dim(&f, &part).unwrap(), r);
        }

        #[test]
        fn roabp_width_bounds_prefix_cuts(seed in any::<u64>(), w in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let order = [2usize, 0, 3, 1];
            let a = random_roabp(P, 4, &order, w, 2, &mut rng);
            let f = a.expand(&mut Budget::default()).unwrap();
            for i in 0..=4 {
                let part = PartitionSpec::split(order[..i].to_vec(), order[i..].to_vec()).unwrap();
                prop_assert!(coeff_dim(&f, &part).unwrap() <= w);
            }
        }
    }
}
