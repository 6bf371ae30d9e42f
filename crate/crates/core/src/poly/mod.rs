//! Canonical sparse multivariate polynomials.

mod monomial;
mod multilinear;
mod order;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

pub use monomial::Monomial;
pub use multilinear::{
    cube_table, elementary_symmetric, interpolate_multilinear, random_poly, random_restriction,
    MAX_INTERPOLATION_VARS,
};
pub use order::{MonomialOrder, OrderKind};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Default cap on term-pair products during expansion.
pub const DEFAULT_BUDGET: u128 = 1 << 22;

/// Work counter for expansions; each term-pair product costs one unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub limit: u128,
    pub used: u128,
}

impl Budget {
    pub fn new(limit: u128) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget { limit: u128::MAX, used: 0 }
    }

    pub fn charge(&mut self, n: u128) -> Result<()> {
        self.used = self.used.saturating_add(n);
        if self.used > self.limit {
            return Err(Error::Budget { needed: self.used, limit: self.limit });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

/// Sparse polynomial: map from monomial to nonzero coefficient.
///
/// `nvars` is the ambient variable count. It is carried along for printing
/// and evaluation but does not take part in equality.
#[derive(Clone, Debug)]
pub struct SparsePoly {
    spec: FieldSpec,
    nvars: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl PartialEq for SparsePoly {
    fn eq(&self, o: &Self) -> bool {
        self.spec == o.spec && self.terms == o.terms
    }
}

impl Eq for SparsePoly {}

impl SparsePoly {
    pub fn zero(spec: FieldSpec, nvars: usize) -> Self {
        SparsePoly { spec, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(spec: FieldSpec, nvars: usize, c: FieldElement) -> Self {
        Self::monomial(spec, nvars, Monomial::one(), c)
    }

    pub fn one(spec: FieldSpec, nvars: usize) -> Self {
        Self::constant(spec, nvars, spec.one())
    }

    pub fn var(spec: FieldSpec, nvars: usize, v: usize) -> Self {
        Self::monomial(spec, nvars.max(v + 1), Monomial::var(v), spec.one())
    }

    pub fn monomial(spec: FieldSpec, nvars: usize, m: Monomial, c: FieldElement) -> Self {
        assert_eq!(c.spec(), spec, "field spec mismatch");
        let mut p = Self::zero(spec, nvars.max(m.arity()));
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Sum of the given terms; repeated monomials are combined.
    pub fn from_terms(spec: FieldSpec, nvars: usize, terms: impl IntoIterator<Item = (Monomial, FieldElement)>) -> Self {
        let mut p = Self::zero(spec, nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Univariate polynomial in variable `v` from low-to-high coefficients.
    pub fn univariate(spec: FieldSpec, nvars: usize, v: usize, coeffs: &[FieldElement]) -> Self {
        Self::from_terms(
            spec,
            nvars.max(v + 1),
            coeffs.iter().enumerate().map(|(k, c)| (Monomial::var_pow(v, k as u16), c.clone())),
        )
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn with_nvars(mut self, n: usize) -> Self {
        self.nvars = n.max(self.max_var_plus_one());
        self
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, FieldElement> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, FieldElement> {
        self.terms
    }

    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElement {
        self.terms.get(m).cloned().unwrap_or_else(|| self.spec.zero())
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coeff(&Monomial::one())
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Individual degree (largest single exponent).
    pub fn ideg(&self) -> u16 {
        self.terms.keys().map(|m| m.ideg()).max().unwrap_or(0)
    }

    pub fn var_degree(&self, v: usize) -> u16 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn max_var_plus_one(&self) -> usize {
        self.terms.keys().map(|m| m.arity()).max().unwrap_or(0)
    }

    /// Sorted list of variables occurring in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut seen = alloc::vec![false; self.max_var_plus_one()];
        for m in self.terms.keys() {
            for v in m.support() {
                seen[v] = true;
            }
        }
        seen.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i).collect()
    }

    pub fn is_multilinear(&self) -> bool {
        self.ideg() <= 1
    }

    pub fn add_term(&mut self, m: Monomial, c: FieldElement) {
        assert_eq!(c.spec(), self.spec, "field spec mismatch");
        if c.is_zero() {
            return;
        }
        self.nvars = self.nvars.max(m.arity());
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.spec != o.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let (mut acc, other) = if self.terms.len() >= o.terms.len() { (self.clone(), o) } else { (o.clone(), self) };
        acc.nvars = self.nvars.max(o.nvars);
        for (m, c) in &other.terms {
            acc.add_term(m.clone(), c.clone());
        }
        Ok(acc)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        self.try_add(&o.neg_ref())
    }

    fn neg_ref(&self) -> Self {
        SparsePoly {
            spec: self.spec,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        assert_eq!(c.spec(), self.spec, "field spec mismatch");
        if c.is_zero() {
            return Self::zero(self.spec, self.nvars);
        }
        SparsePoly {
            spec: self.spec,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiply every monomial by `m`.
    pub fn shift(&self, m: &Monomial) -> Self {
        SparsePoly {
            spec: self.spec,
            nvars: self.nvars.max(m.arity()),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn mul_budgeted(&self, o: &Self, budget: &mut Budget) -> Result<Self> {
        self.check(o)?;
        budget.charge(self.terms.len() as u128 * o.terms.len() as u128)?;
        let mut out = Self::zero(self.spec, self.nvars.max(o.nvars));
        if self.is_zero() || o.is_zero() {
            return Ok(out);
        }
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.mul_budgeted(o, &mut Budget::unlimited())
    }

    pub fn pow_budgeted(&self, e: u32, budget: &mut Budget) -> Result<Self> {
        let mut acc = Self::one(self.spec, self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_budgeted(&base, budget)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_budgeted(&base, budget)?;
            }
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u32) -> Self {
        self.pow_budgeted(e, &mut Budget::unlimited()).expect("unlimited budget")
    }

    /// Replace each listed variable by a polynomial; others are kept.
    pub fn substitute_budgeted(&self, map: &[(usize, SparsePoly)], budget: &mut Budget) -> Result<Self> {
        for (_, q) in map {
            self.check(q)?;
        }
        let nv = map.iter().map(|(_, q)| q.nvars).fold(self.nvars, usize::max);
        let mut slot: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, (v, _)) in map.iter().enumerate() {
            slot.insert(*v, i);
        }
        // powers[i][e] = map[i].1 ^ e, grown on demand
        let mut powers: Vec<Vec<SparsePoly>> = map.iter().map(|_| alloc::vec![Self::one(self.spec, nv)]).collect();
        let mut out = Self::zero(self.spec, nv);
        for (m, c) in &self.terms {
            let mut rest = Vec::with_capacity(m.arity());
            let mut factor = Self::constant(self.spec, nv, c.clone());
            for (v, &e) in m.exps().iter().enumerate() {
                match slot.get(&v) {
                    Some(&i) if e > 0 => {
                        while powers[i].len() <= e as usize {
                            let next = powers[i].last().unwrap().mul_budgeted(&map[i].1, budget)?;
                            powers[i].push(next);
                        }
                        factor = factor.mul_budgeted(&powers[i][e as usize], budget)?;
                        rest.push(0);
                    }
                    _ => rest.push(e),
                }
            }
            let rest = Monomial::new(rest);
            budget.charge(factor.terms.len() as u128)?;
            for (fm, fc) in factor.terms {
                out.add_term(fm.mul(&rest), fc);
            }
        }
        Ok(out)
    }

    pub fn substitute(&self, map: &[(usize, SparsePoly)]) -> Result<Self> {
        self.substitute_budgeted(map, &mut Budget::unlimited())
    }

    /// Full evaluation; `point[v]` is the value of variable `v`.
    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() < self.max_var_plus_one() {
            return Err(Error::OutOfRange(format!(
                "point has {} coordinates, polynomial uses {}",
                point.len(),
                self.max_var_plus_one()
            )));
        }
        let mut acc = self.spec.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = t.try_mul(&point[v].pow(e as u64))?;
                }
            }
            acc = acc.try_add(&t)?;
        }
        Ok(acc)
    }

    /// Substitute constants for the listed variables.
    pub fn eval_partial(&self, assign: &[(usize, FieldElement)]) -> Result<Self> {
        let mut out = Self::zero(self.spec, self.nvars);
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut exps = m.exps().to_vec();
            for (v, val) in assign {
                if let Some(e) = exps.get_mut(*v) {
                    if *e > 0 {
                        coef = coef.try_mul(&val.pow(*e as u64))?;
                        *e = 0;
                    }
                }
            }
            out.add_term(Monomial::new(exps), coef);
        }
        Ok(out)
    }

    /// The unique multilinear polynomial agreeing with `self` on the cube.
    pub fn multilinearize(&self) -> Self {
        let mut out = Self::zero(self.spec, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.multilinear(), c.clone());
        }
        out
    }

    fn extremal(&self, ord: &MonomialOrder, leading: bool) -> Result<(&Monomial, &FieldElement)> {
        let mut it = self.terms.iter();
        let mut best = it.next().ok_or(Error::ZeroPolynomial)?;
        for t in it {
            let o = ord.cmp(t.0, best.0);
            if (leading && o.is_gt()) || (!leading && o.is_lt()) {
                best = t;
            }
        }
        Ok(best)
    }

    pub fn leading_term(&self, ord: &MonomialOrder) -> Result<(Monomial, FieldElement)> {
        self.extremal(ord, true).map(|(m, c)| (m.clone(), c.clone()))
    }

    pub fn trailing_term(&self, ord: &MonomialOrder) -> Result<(Monomial, FieldElement)> {
        self.extremal(ord, false).map(|(m, c)| (m.clone(), c.clone()))
    }

    pub fn leading_monomial(&self, ord: &MonomialOrder) -> Result<Monomial> {
        self.leading_term(ord).map(|t| t.0)
    }

    pub fn trailing_monomial(&self, ord: &MonomialOrder) -> Result<Monomial> {
        self.trailing_term(ord).map(|t| t.0)
    }

    pub fn leading_coeff(&self, ord: &MonomialOrder) -> Result<FieldElement> {
        self.leading_term(ord).map(|t| t.1)
    }

    pub fn trailing_coeff(&self, ord: &MonomialOrder) -> Result<FieldElement> {
        self.trailing_term(ord).map(|t| t.1)
    }

    /// Coefficient of `y^b` reading `self` in F[rest][y], where `y = yvars`.
    pub fn coeff_in_subring(&self, yvars: &[usize], b: &Monomial) -> Result<Self> {
        if b.support().any(|v| !yvars.contains(&v)) {
            return Err(Error::Precondition(format!("monomial {b} is not supported on the given variables")));
        }
        let mut out = Self::zero(self.spec, self.nvars);
        for (m, c) in &self.terms {
            if m.restrict(|v| yvars.contains(&v)) == *b {
                out.add_term(m.restrict(|v| !yvars.contains(&v)), c.clone());
            }
        }
        Ok(out)
    }

    /// Coefficients of `y^0, y^1, ...` for a single variable `y`.
    pub fn slices(&self, y: usize) -> Vec<SparsePoly> {
        let d = self.var_degree(y) as usize;
        let mut out = alloc::vec![Self::zero(self.spec, self.nvars); d + 1];
        for (m, c) in &self.terms {
            out[m.exp(y) as usize].add_term(m.with_exp(y, 0), c.clone());
        }
        out
    }

    /// Rename variables; colliding targets multiply.
    pub fn rename(&self, nvars: usize, map: impl Fn(usize) -> usize) -> Self {
        let mut out = Self::zero(self.spec, nvars);
        for (m, c) in &self.terms {
            out.add_term(m.rename(&map), c.clone());
        }
        out
    }

    /// Exact quotient `self / g`, by division with remainder under graded-lex.
    ///
    /// With a single divisor the remainder vanishes iff `g` divides `self`.
    pub fn divide_exact(&self, g: &Self) -> Result<Self> {
        self.check(g)?;
        let ord = MonomialOrder::default();
        let (lm, lc) = g.leading_term(&ord)?;
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quo = Self::zero(self.spec, self.nvars.max(g.nvars));
        // Each step removes the current leading monomial of `rem`; terms not
        // divisible by LM(g) are moved to the remainder and make the result fail.
        while let Some((m, c)) = rem.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            let Some(q) = lm.quotient_of(&m) else {
                return Err(Error::NotDivisible(format!("term {m} survives division")));
            };
            let k = &c * &lc_inv;
            quo.add_term(q.clone(), k.clone());
            for (gm, gc) in &g.terms {
                rem.add_term(gm.mul(&q), -(gc * &k));
            }
        }
        Ok(quo)
    }

    pub fn write_with(&self, f: &mut dyn fmt::Write, name: &dyn Fn(usize) -> String) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                m.write_with(f, name)?;
            }
        }
        Ok(())
    }

    pub fn to_string_with(&self, name: &dyn Fn(usize) -> String) -> String {
        let mut s = String::new();
        self.write_with(&mut s, name).expect("string write");
        s
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &|i| format!("x{}", i + 1))
    }
}

impl<'a> Add<&'a SparsePoly> for &'a SparsePoly {
    type Output = SparsePoly;
    fn add(self, o: &SparsePoly) -> SparsePoly {
        self.try_add(o).expect("field spec mismatch")
    }
}

impl<'a> Sub<&'a SparsePoly> for &'a SparsePoly {
    type Output = SparsePoly;
    fn sub(self, o: &SparsePoly) -> SparsePoly {
        self.try_sub(o).expect("field spec mismatch")
    }
}

impl<'a> Mul<&'a SparsePoly> for &'a SparsePoly {
    type Output = SparsePoly;
    fn mul(self, o: &SparsePoly) -> SparsePoly {
        self.try_mul(o).expect("field spec mismatch")
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for SparsePoly {
            type Output = SparsePoly;
            fn $m(self, o: SparsePoly) -> SparsePoly {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $m(self, o: &SparsePoly) -> SparsePoly {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<SparsePoly> for &'a SparsePoly {
            type Output = SparsePoly;
            fn $m(self, o: SparsePoly) -> SparsePoly {
                self.$m(&o)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.neg_ref()
    }
}

impl Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.neg_ref()
    }
}

/// Variable naming for IPS certificates: `x1..xn`, then `y1..ym`, then `z1..zk`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarLayout {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl VarLayout {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        VarLayout { nx, ny, nz }
    }

    /// Only `x` variables.
    pub fn plain(nx: usize) -> Self {
        VarLayout { nx, ny: 0, nz: 0 }
    }

    pub fn total(&self) -> usize {
        self.nx + self.ny + self.nz
    }

    /// Id of `x_i`, 1-based as written.
    pub fn x(&self, i: usize) -> usize {
        i - 1
    }

    pub fn y(&self, j: usize) -> usize {
        self.nx + j - 1
    }

    pub fn z(&self, k: usize) -> usize {
        self.nx + self.ny + k - 1
    }

    pub fn name(&self, id: usize) -> String {
        if id < self.nx {
            format!("x{}", id + 1)
        } else if id < self.nx + self.ny {
            format!("y{}", id - self.nx + 1)
        } else if id < self.total() {
            format!("z{}", id - self.nx - self.ny + 1)
        } else {
            // beyond the declared layout; keep names unambiguous
            format!("x{}", id + 1)
        }
    }

    /// Resolve a name like `y3`.
    pub fn id(&self, name: &str) -> Result<usize> {
        let bad = || Error::Parse(format!("unknown variable '{name}'"));
        let (kind, idx) = name.split_at(1);
        let i: usize = idx.parse().map_err(|_| bad())?;
        let limit = match kind {
            "x" => self.nx,
            "y" => self.ny,
            "z" => self.nz,
            _ => return Err(bad()),
        };
        if i == 0 || i > limit {
            return Err(bad());
        }
        Ok(match kind {
            "x" => self.x(i),
            "y" => self.y(i),
            _ => self.z(i),
        })
    }
}

#[cfg(test)]
mod tests;
