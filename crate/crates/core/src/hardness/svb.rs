use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::ips::SampleSet;
use crate::poly::{Budget, Monomial, SparsePoly};

/// The map `G: F^{3ℓ} → F^{n×n}` with
/// `G(x, y, z)_{ij} = Σ_k z_k·ind_i(x_k)·ind_j(y_k)`, where `ind_i` is the
/// Lagrange indicator of `ω_i` on `Ω = {ω_1..ω_n}`. Every matrix with at
/// most `ℓ` nonzero entries is in the image, and every image point has rank
/// at most `ℓ`.
///
/// Seed variables: `x_k → k`, `y_k → ℓ + k`, `z_k → 2ℓ + k` (0-based `k`).
/// Matrix variables of composed polynomials: `(i, j) → i·n + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SvbGenerator {
    pub n: usize,
    pub ell: usize,
    pub spec: FieldSpec,
    pub omega: Vec<FieldElement>,
    /// Entry polynomials in the seed variables.
    pub entries: Vec<Vec<SparsePoly>>,
}

/// Coefficients of the indicator of `omega[i]` on the points `omega`.
fn indicator(omega: &[FieldElement], i: usize) -> Result<Vec<FieldElement>> {
    let spec = omega[i].spec();
    let mut coeffs = alloc::vec![spec.one()];
    let mut denom = spec.one();
    for (m, w) in omega.iter().enumerate() {
        if m == i {
            continue;
        }
        let mut next = alloc::vec![spec.zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= &(c * w);
        }
        coeffs = next;
        denom *= &(&omega[i] - w);
    }
    let inv = denom.inv()?;
    Ok(coeffs.iter().map(|c| c * &inv).collect())
}

pub fn svb_build(n: usize, ell: usize, spec: FieldSpec) -> Result<SvbGenerator> {
    if !spec.has_elements(n as u128) {
        return Err(Error::FieldTooSmall { needed: n as u128, have: spec.size().unwrap_or(0) as u128 });
    }
    if n == 0 || ell == 0 {
        return Err(Error::Precondition("n and ℓ must be positive".into()));
    }
    let omega: Vec<FieldElement> = (0..n).map(|i| FieldElement::from_u64(spec, i as u64)).collect();
    let ind: Vec<Vec<FieldElement>> = (0..n).map(|i| indicator(&omega, i)).collect::<Result<_>>()?;
    let nv = 3 * ell;
    let mut entries = alloc::vec![alloc::vec![SparsePoly::zero(spec, nv); n]; n];
    for (i, row) in entries.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            for k in 0..ell {
                let a = SparsePoly::univariate(spec, nv, k, &ind[i]);
                let b = SparsePoly::univariate(spec, nv, ell + k, &ind[j]);
                let z = SparsePoly::var(spec, nv, 2 * ell + k);
                *e = &*e + &(&(&a * &b) * &z);
            }
        }
    }
    Ok(SvbGenerator { n, ell, spec, omega, entries })
}

impl SvbGenerator {
    pub fn seed_len(&self) -> usize {
        3 * self.ell
    }

    /// `G(seed)` as a flat row-major vector.
    pub fn eval(&self, seed: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.entries.iter().flatten().map(|e| e.eval(seed)).collect()
    }

    /// `f ∘ G` expanded in the seed variables.
    pub fn compose(&self, f: &SparsePoly, budget: &mut Budget) -> Result<SparsePoly> {
        let nn = self.n * self.n;
        if f.max_var_plus_one() > nn {
            return Err(Error::OutOfRange(format!("polynomial uses more than {nn} matrix variables")));
        }
        // every matrix variable is replaced at once, so seed ids are never captured
        let map: Vec<(usize, SparsePoly)> = (0..nn).map(|v| (v, self.entries[v / self.n][v % self.n].clone())).collect();
        f.substitute_budgeted(&map, budget)
    }

    /// Degree bound of `f ∘ G`: each entry has degree `2(n − 1) + 1`.
    pub fn composed_degree(&self, f: &SparsePoly) -> u64 {
        f.degree() as u64 * (2 * (self.n as u64 - 1) + 1)
    }
}

/// Outcome of testing whether `f ∘ G` vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct SvbCheck {
    pub vanishes: bool,
    /// Decided without error probability.
    pub exact: bool,
    /// Probability that a nonvanishing `f ∘ G` went unnoticed; 0 when exact.
    /// May underflow to 0 for many trials; see `log10_error_bound`.
    pub error_bound: f64,
    /// `log10` of the bound, `-inf` when exact.
    pub log10_error_bound: f64,
    /// A seed with `f(G(seed)) ≠ 0`.
    pub witness: Option<Vec<FieldElement>>,
    pub trials: u32,
}

/// Largest `n` decided by symbolic composition.
pub const SYMBOLIC_MAX_N: usize = 3;

/// Evaluate `f ∘ G` at `trials` random seeds.
pub fn svb_sample(f: &SparsePoly, gen: &SvbGenerator, trials: u32, seed: u64) -> Result<SvbCheck> {
    let deg = gen.composed_degree(f).max(1);
    let sample = SampleSet::for_degree(gen.spec, deg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let s: Vec<FieldElement> = (0..gen.seed_len()).map(|_| sample.draw(gen.spec, &mut rng)).collect();
        let m = gen.eval(&s)?;
        if !f.eval(&m)?.is_zero() {
            return Ok(SvbCheck { vanishes: false, exact: true, error_bound: 0.0, log10_error_bound: f64::NEG_INFINITY, witness: Some(s), trials });
        }
    }
    let per = (deg as f64 / sample.size as f64).min(1.0);
    let log = trials as f64 * libm::log10(per);
    Ok(SvbCheck { vanishes: true, exact: false, error_bound: libm::pow(10.0, log), log10_error_bound: log, witness: None, trials })
}

/// Whether `f ∘ G ≡ 0`: a nonzero sample settles survival, otherwise the
/// composition is expanded when `n ≤ 3` and the sampling verdict is kept
/// (with its error bound) above that.
pub fn svb_check(f: &SparsePoly, gen: &SvbGenerator, trials: u32, seed: u64, budget: &mut Budget) -> Result<SvbCheck> {
    let sampled = svb_sample(f, gen, trials, seed)?;
    if !sampled.vanishes || gen.n > SYMBOLIC_MAX_N {
        return Ok(sampled);
    }
    let composed = gen.compose(f, budget)?;
    Ok(SvbCheck { vanishes: composed.is_zero(), exact: true, error_bound: 0.0, log10_error_bound: f64::NEG_INFINITY, witness: None, trials })
}

/// `det` of the generic `n × n` matrix, variable `(i, j) → i·n + j`.
pub fn determinant_poly(n: usize, spec: FieldSpec) -> Result<SparsePoly> {
    if n > 8 {
        return Err(Error::OutOfRange(format!("determinant of size {n} has too many terms")));
    }
    let mut out = SparsePoly::zero(spec, n * n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = true;
    // Heap's algorithm flips the parity on every swap
    let mut c = alloc::vec![0usize; n];
    let emit = |perm: &[usize], sign: bool, out: &mut SparsePoly| {
        let vars: Vec<usize> = perm.iter().enumerate().map(|(i, &j)| i * n + j).collect();
        out.add_term(Monomial::from_vars(&vars), if sign { spec.one() } else { -spec.one() });
    };
    emit(&perm, sign, &mut out);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = !sign;
            emit(&perm, sign, &mut out);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(out)
}
