use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{Budget, Monomial, SparsePoly};

/// Affine form `constant + Σ coeffs[v]·x_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub coeffs: Vec<FieldElement>,
    pub constant: FieldElement,
}

impl AffineForm {
    pub fn new(coeffs: Vec<FieldElement>, constant: FieldElement) -> Self {
        AffineForm { coeffs, constant }
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        let mut acc = self.constant.clone();
        for (v, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                let x = point.get(v).ok_or_else(|| Error::OutOfRange(format!("no value for variable {v}")))?;
                acc = acc.try_add(&a.try_mul(x)?)?;
            }
        }
        Ok(acc)
    }

    pub fn to_poly(&self, spec: FieldSpec, nvars: usize) -> SparsePoly {
        let mut p = SparsePoly::constant(spec, nvars, self.constant.clone());
        for (v, a) in self.coeffs.iter().enumerate() {
            p.add_term(Monomial::var(v), a.clone());
        }
        p
    }
}

/// Sum of scaled powers of affine forms, Σ c_i·ℓ_i^{d_i}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoweringFormula {
    pub spec: FieldSpec,
    pub nvars: usize,
    pub terms: Vec<(FieldElement, AffineForm, u32)>,
}

impl PoweringFormula {
    pub fn new(spec: FieldSpec, nvars: usize) -> Self {
        PoweringFormula { spec, nvars, terms: Vec::new() }
    }

    pub fn push(&mut self, form: AffineForm, d: u32) {
        let one = self.spec.one();
        self.push_scaled(one, form, d);
    }

    pub fn push_scaled(&mut self, c: FieldElement, form: AffineForm, d: u32) {
        self.nvars = self.nvars.max(form.coeffs.len());
        self.terms.push((c, form, d));
    }

    /// n·Σ(d_i + 1).
    pub fn size(&self) -> usize {
        self.nvars * self.terms.iter().map(|(_, _, d)| *d as usize + 1).sum::<usize>()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, _, d)| *d).max().unwrap_or(0)
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        let mut acc = self.spec.zero();
        for (c, l, d) in &self.terms {
            acc = acc.try_add(&c.try_mul(&l.eval(point)?.pow(*d as u64))?)?;
        }
        Ok(acc)
    }

    pub fn expand(&self, budget: &mut Budget) -> Result<SparsePoly> {
        let mut acc = SparsePoly::zero(self.spec, self.nvars);
        for (c, l, d) in &self.terms {
            let t = l.to_poly(self.spec, self.nvars).pow_budgeted(*d, budget)?;
            acc = acc.try_add(&t.scale(c))?;
        }
        Ok(acc)
    }
}

/// Sum of powers of low-degree polynomials, Σ f_i^{d_i} with deg f_i ≤ t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowDegPoweringFormula {
    pub spec: FieldSpec,
    pub nvars: usize,
    pub t: u32,
    pub terms: Vec<(SparsePoly, u32)>,
}

impl LowDegPoweringFormula {
    pub fn new(spec: FieldSpec, nvars: usize, t: u32, terms: Vec<(SparsePoly, u32)>) -> Result<Self> {
        for (f, _) in &terms {
            if f.spec() != spec {
                return Err(Error::SpecMismatch);
            }
            if f.degree() > t {
                return Err(Error::Precondition(format!("base of degree {} exceeds t = {t}", f.degree())));
            }
        }
        Ok(LowDegPoweringFormula { spec, nvars, t, terms })
    }

    /// C(n+t, t)·Σ(d_i + 1).
    pub fn size(&self) -> u128 {
        binomial((self.nvars + self.t as usize) as u64, self.t as u64)
            * self.terms.iter().map(|(_, d)| *d as u128 + 1).sum::<u128>()
    }

    pub fn degree_bound(&self) -> u64 {
        self.terms.iter().map(|(f, d)| f.degree() as u64 * *d as u64).max().unwrap_or(0)
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        let mut acc = self.spec.zero();
        for (f, d) in &self.terms {
            acc = acc.try_add(&f.eval(point)?.pow(*d as u64))?;
        }
        Ok(acc)
    }

    pub fn expand(&self, budget: &mut Budget) -> Result<SparsePoly> {
        let mut acc = SparsePoly::zero(self.spec, self.nvars);
        for (f, d) in &self.terms {
            acc = acc.try_add(&f.pow_budgeted(*d, budget)?)?;
        }
        Ok(acc)
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Binomial coefficient as a field element, via Pascal's rule so that it is
/// exact in every characteristic.
pub(crate) fn binomial_fe(spec: FieldSpec, n: u64, k: u64) -> FieldElement {
    if k > n {
        return spec.zero();
    }
    let mut row = alloc::vec![spec.one()];
    for _ in 0..n {
        let mut next = alloc::vec![spec.one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    row[k as usize].clone()
}

/// Coefficients (low to high) of `l(α)` with `l` the Lagrange functional
/// extracting [α^k] from polynomials of degree ≤ m sampled at α = 0..m.
fn coefficient_extractor(spec: FieldSpec, m: usize, k: usize) -> Result<Vec<FieldElement>> {
    // Inverse Vandermonde row k: solve V^T λ = e_k where V[t][j] = t^j.
    let pts: Vec<FieldElement> = (0..=m).map(|t| FieldElement::from_u64(spec, t as u64)).collect();
    let rows: Vec<Vec<FieldElement>> = (0..=m).map(|j| pts.iter().map(|a| a.pow(j as u64)).collect()).collect();
    let mut rhs = alloc::vec![spec.zero(); m + 1];
    rhs[k] = spec.one();
    crate::linalg::solve(rows, rhs)
}

/// Sum-of-products-of-univariates form of (x_1 + ... + x_n)^d.
///
/// Returns (nd+1)(d+1) tuples; tuple i holds f_{i,1}(x_1), ..., f_{i,n}(x_n)
/// with deg f_{i,j} ≤ d. Uses
/// (Σx)^d = [α^d] Σ_{w=0}^{d} (−1)^{d−w} C(d,w) ∏_j (1 + α x_j)^w
/// and extracts [α^d] by interpolation at α = 0..nd.
pub fn duality_decompose(n: usize, d: u32, spec: FieldSpec) -> Result<Vec<Vec<SparsePoly>>> {
    let m = n * d as usize;
    if !spec.has_elements(m as u128 + 1) {
        return Err(Error::FieldTooSmall { needed: m as u128 + 1, have: spec.size().unwrap_or(0) as u128 });
    }
    if n == 0 {
        return Err(Error::Precondition("duality needs n ≥ 1".into()));
    }
    let lambda = coefficient_extractor(spec, m, d as usize)?;
    let mut out = Vec::with_capacity((m + 1) * (d as usize + 1));
    for (t, lam) in lambda.iter().enumerate() {
        let alpha = FieldElement::from_u64(spec, t as u64);
        for w in 0..=d {
            let sign = if (d - w) % 2 == 0 { spec.one() } else { -spec.one() };
            let c = lam * &sign * binomial_fe(spec, d as u64, w as u64);
            let tuple: Vec<SparsePoly> = (0..n)
                .map(|j| {
                    let base = SparsePoly::univariate(spec, n, j, &[spec.one(), alpha.clone()]);
                    let p = base.pow(w);
                    if j == 0 {
                        p.scale(&c)
                    } else {
                        p
                    }
                })
                .collect();
            out.push(tuple);
        }
    }
    Ok(out)
}
