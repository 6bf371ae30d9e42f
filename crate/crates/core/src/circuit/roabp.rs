use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::circuit::powering::{binomial_fe, PoweringFormula};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{Budget, Monomial, SparsePoly};

/// Dense univariate coefficients, low to high, without trailing zeros.
pub type Uni = Vec<FieldElement>;

pub fn uni_trim(mut u: Uni) -> Uni {
    while u.last().is_some_and(|c| c.is_zero()) {
        u.pop();
    }
    u
}

pub fn uni_add(a: &Uni, b: &Uni) -> Uni {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.clone();
    for (o, s) in out.iter_mut().zip(short.iter()) {
        *o += s;
    }
    uni_trim(out)
}

pub fn uni_mul(a: &Uni, b: &Uni) -> Uni {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let spec = a[0].spec();
    let mut out = alloc::vec![spec.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    uni_trim(out)
}

pub fn uni_scale(a: &Uni, c: &FieldElement) -> Uni {
    uni_trim(a.iter().map(|x| x * c).collect())
}

pub fn uni_eval(a: &Uni, x: &FieldElement) -> FieldElement {
    let spec = x.spec();
    let mut acc = spec.zero();
    for c in a.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Univariate as a polynomial in variable `v`.
pub fn uni_to_poly(a: &Uni, spec: FieldSpec, nvars: usize, v: usize) -> SparsePoly {
    SparsePoly::univariate(spec, nvars, v, a)
}

/// Coefficients of a polynomial that only involves variable `v`.
pub fn poly_to_uni(p: &SparsePoly, v: usize) -> Result<Uni> {
    let mut out = alloc::vec![p.spec().zero(); p.var_degree(v) as usize + 1];
    for (m, c) in p.terms() {
        if m.support().any(|w| w != v) {
            return Err(Error::Precondition(format!("entry {p} is not univariate")));
        }
        out[m.exp(v) as usize] = c.clone();
    }
    Ok(uni_trim(out))
}

/// Sparse square matrix with univariate entries.
pub(crate) type SparseMat = BTreeMap<(usize, usize), Uni>;

/// One layer of an roABP: a matrix whose entries are univariates in `var`.
/// `var == None` only occurs once every variable has been substituted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub var: Option<usize>,
    pub entries: SparseMat,
}

impl Layer {
    pub fn new(var: usize, entries: SparseMat) -> Self {
        Layer { var: Some(var), entries: entries.into_iter().filter(|(_, u)| !u.is_empty()).collect() }
    }

    pub fn identity(var: Option<usize>, width: usize, spec: FieldSpec) -> Self {
        Layer { var, entries: (0..width).map(|i| ((i, i), alloc::vec![spec.one()])).collect() }
    }

    pub fn degree(&self) -> usize {
        self.entries.values().map(|u| u.len().saturating_sub(1)).max().unwrap_or(0)
    }

    fn at(&self, x: &FieldElement) -> BTreeMap<(usize, usize), FieldElement> {
        self.entries.iter().map(|(k, u)| (*k, uni_eval(u, x))).filter(|(_, v)| !v.is_zero()).collect()
    }
}

/// Product of two sparse matrices with univariate entries in a common variable.
fn mat_mul(a: &SparseMat, b: &SparseMat) -> SparseMat {
    let mut by_row: BTreeMap<usize, Vec<(usize, &Uni)>> = BTreeMap::new();
    for ((j, k), u) in b {
        by_row.entry(*j).or_default().push((*k, u));
    }
    let mut out: SparseMat = BTreeMap::new();
    for ((i, j), u) in a {
        if let Some(row) = by_row.get(j) {
            for (k, w) in row {
                let p = uni_mul(u, w);
                let e = out.entry((*i, *k)).or_default();
                *e = uni_add(e, &p);
            }
        }
    }
    out.retain(|_, u| !u.is_empty());
    out
}

/// Read-once oblivious ABP in matrix normal form.
///
/// Computes `(A_1(x_{σ1}) ··· A_D(x_{σD}))[0][0]` with all matrices
/// `width × width` and stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roabp {
    spec: FieldSpec,
    nvars: usize,
    width: usize,
    layers: Vec<Layer>,
}

impl Roabp {
    pub fn new(spec: FieldSpec, nvars: usize, width: usize, layers: Vec<Layer>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for l in &layers {
            if let Some(v) = l.var {
                if seen.insert(v, ()).is_some() {
                    return Err(Error::Precondition(format!("variable {v} is read twice")));
                }
            }
            for ((i, j), u) in &l.entries {
                if *i >= width || *j >= width {
                    return Err(Error::OutOfRange(format!("entry ({i},{j}) outside width {width}")));
                }
                if u.iter().any(|c| c.spec() != spec) {
                    return Err(Error::SpecMismatch);
                }
            }
        }
        if width == 0 {
            return Err(Error::Precondition("width must be positive".into()));
        }
        let nvars = nvars.max(seen.keys().next_back().map(|v| v + 1).unwrap_or(0));
        Ok(Roabp { spec, nvars, width, layers })
    }

    /// Width-1 roABP for ∏_i f_i(x_{order[i]}) given as univariates.
    pub fn product_of_univariates(spec: FieldSpec, nvars: usize, order: &[usize], factors: &[Uni]) -> Result<Self> {
        let layers = order
            .iter()
            .zip(factors.iter())
            .map(|(&v, u)| Layer::new(v, [((0, 0), uni_trim(u.clone()))].into_iter().collect()))
            .collect();
        Self::new(spec, nvars, 1, layers)
    }

    /// Width-1 roABP computing zero in the given order.
    pub fn zero(spec: FieldSpec, nvars: usize, order: &[usize]) -> Self {
        let layers = if order.is_empty() {
            alloc::vec![Layer { var: None, entries: BTreeMap::new() }]
        } else {
            order
                .iter()
                .enumerate()
                .map(|(i, &v)| if i == 0 { Layer::new(v, BTreeMap::new()) } else { Layer::identity(Some(v), 1, spec) })
                .collect()
        };
        Roabp { spec, nvars, width: 1, layers }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn order(&self) -> Vec<usize> {
        self.layers.iter().filter_map(|l| l.var).collect()
    }

    /// Largest entry degree.
    pub fn degree(&self) -> usize {
        self.layers.iter().map(|l| l.degree()).max().unwrap_or(0)
    }

    /// Nonzero matrix entries, i.e. edges of the branching program.
    pub fn wires(&self) -> usize {
        self.layers.iter().map(|l| l.entries.len()).sum()
    }

    /// n·r·d·D with n = D the number of variables read and d at least 1.
    pub fn dense_size(&self) -> u128 {
        let n = self.order().len() as u128;
        n * self.width as u128 * self.degree().max(1) as u128 * n
    }

    /// Degree bound with each variable `v` counted `weight(v)` times.
    pub fn degree_bound(&self, weight: &dyn Fn(usize) -> u64) -> u64 {
        self.layers.iter().map(|l| l.degree() as u64 * l.var.map(weight).unwrap_or(0)).sum()
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        let mut v: BTreeMap<usize, FieldElement> = [(0, self.spec.one())].into_iter().collect();
        for l in &self.layers {
            let zero = self.spec.zero();
            let x = match l.var {
                Some(var) => point.get(var).ok_or_else(|| Error::OutOfRange(format!("no value for variable {var}")))?,
                None => &zero,
            };
            let mut next: BTreeMap<usize, FieldElement> = BTreeMap::new();
            for ((i, j), u) in &l.entries {
                if let Some(vi) = v.get(i) {
                    let t = vi.try_mul(&uni_eval(u, x))?;
                    let e = next.entry(*j).or_insert_with(|| self.spec.zero());
                    *e = e.try_add(&t)?;
                }
            }
            next.retain(|_, c| !c.is_zero());
            v = next;
        }
        Ok(v.remove(&0).unwrap_or_else(|| self.spec.zero()))
    }

    /// Row 0 of the product of the first `k` layers, as polynomials.
    pub fn expand_prefix(&self, k: usize, budget: &mut Budget) -> Result<BTreeMap<usize, SparsePoly>> {
        let mut v: BTreeMap<usize, SparsePoly> = [(0, SparsePoly::one(self.spec, self.nvars))].into_iter().collect();
        for l in &self.layers[..k] {
            let mut next: BTreeMap<usize, SparsePoly> = BTreeMap::new();
            for ((i, j), u) in &l.entries {
                let Some(vi) = v.get(i) else { continue };
                budget.charge(vi.sparsity() as u128 * u.len() as u128)?;
                let e = next.entry(*j).or_insert_with(|| SparsePoly::zero(self.spec, self.nvars));
                for (k, c) in u.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let shift = match l.var {
                        Some(var) => Monomial::var_pow(var, k as u16),
                        None if k == 0 => Monomial::one(),
                        None => continue,
                    };
                    for (m, a) in vi.terms() {
                        e.add_term(m.mul(&shift), a * c);
                    }
                }
            }
            next.retain(|_, p| !p.is_zero());
            v = next;
        }
        Ok(v)
    }

    pub fn expand(&self, budget: &mut Budget) -> Result<SparsePoly> {
        let mut v = self.expand_prefix(self.layers.len(), budget)?;
        Ok(v.remove(&0).unwrap_or_else(|| SparsePoly::zero(self.spec, self.nvars)))
    }

    /// Insert identity layers so that the variable order becomes `order`,
    /// which must contain the current order as a subsequence.
    pub fn align(&self, order: &[usize]) -> Result<Self> {
        let mut layers = Vec::with_capacity(order.len());
        let mut it = self.layers.iter().peekable();
        for &v in order {
            match it.peek() {
                Some(l) if l.var == Some(v) => layers.push(it.next().unwrap().clone()),
                _ => layers.push(Layer::identity(Some(v), self.width, self.spec)),
            }
        }
        if it.next().is_some() {
            return Err(Error::OrderMismatch);
        }
        Roabp::new(self.spec, self.nvars, self.width, layers)
    }

    fn check_pair(&self, o: &Self) -> Result<()> {
        if self.spec != o.spec {
            return Err(Error::SpecMismatch);
        }
        if self.order() != o.order() {
            return Err(Error::OrderMismatch);
        }
        Ok(())
    }

    /// Sum; width r + s.
    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_pair(o)?;
        let r = self.width;
        let n = self.layers.len();
        let mut layers = Vec::with_capacity(n);
        for (k, (la, lb)) in self.layers.iter().zip(o.layers.iter()).enumerate() {
            let mut e = la.entries.clone();
            for ((i, j), u) in &lb.entries {
                let ii = if k == 0 && *i == 0 { 0 } else { r + i };
                let jj = if k == n - 1 && *j == 0 { 0 } else { r + j };
                let slot = e.entry((ii, jj)).or_default();
                *slot = uni_add(slot, u);
            }
            e.retain(|_, u| !u.is_empty());
            layers.push(Layer { var: la.var, entries: e });
        }
        Roabp::new(self.spec, self.nvars.max(o.nvars), r + o.width, layers)
    }

    /// Product; width r·s via per-layer Kronecker products.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_pair(o)?;
        let s = o.width;
        let layers = self
            .layers
            .iter()
            .zip(o.layers.iter())
            .map(|(la, lb)| {
                let mut e: SparseMat = BTreeMap::new();
                for ((i1, j1), a) in &la.entries {
                    for ((i2, j2), b) in &lb.entries {
                        let p = uni_mul(a, b);
                        if !p.is_empty() {
                            e.insert((i1 * s + i2, j1 * s + j2), p);
                        }
                    }
                }
                Layer { var: la.var, entries: e }
            })
            .collect();
        Roabp::new(self.spec, self.nvars.max(o.nvars), self.width * s, layers)
    }

    /// Multiply the computed polynomial by a constant.
    pub fn scale(&self, c: &FieldElement) -> Self {
        let mut out = self.clone();
        if let Some(first) = out.layers.first_mut() {
            for ((i, _), u) in first.entries.iter_mut() {
                if *i == 0 {
                    *u = uni_scale(u, c);
                }
            }
            first.entries.retain(|_, u| !u.is_empty());
        }
        out
    }

    /// Substitute constants for some variables; width is unchanged and the
    /// surviving variables keep their relative order.
    pub fn partial_eval(&self, assign: &[(usize, FieldElement)]) -> Result<Self> {
        let value: BTreeMap<usize, &FieldElement> = assign.iter().map(|(v, c)| (*v, c)).collect();
        let mut layers: Vec<Layer> = Vec::new();
        let mut pending: Option<SparseMat> = None;
        let zero = self.spec.zero();
        for l in &self.layers {
            let fixed = match l.var {
                Some(v) => value.get(&v).copied(),
                None => Some(&zero),
            };
            match fixed {
                Some(x) => {
                    let c: SparseMat = l.at(x).into_iter().map(|(k, v)| (k, alloc::vec![v])).collect();
                    pending = Some(match pending.take() {
                        Some(p) => mat_mul(&p, &c),
                        None => c,
                    });
                }
                None => {
                    let entries = match pending.take() {
                        Some(p) => mat_mul(&p, &l.entries),
                        None => l.entries.clone(),
                    };
                    layers.push(Layer { var: l.var, entries });
                }
            }
        }
        if let Some(p) = pending {
            match layers.last_mut() {
                Some(last) => last.entries = mat_mul(&last.entries, &p),
                None => layers.push(Layer { var: None, entries: p }),
            }
        }
        Roabp::new(self.spec, self.nvars, self.width, layers)
    }

    /// Substitute `z ← x·y` for each layer variable `z`, with `(x, y) = map(z)`.
    /// Each layer splits into an x-layer followed by a y-layer.
    pub fn hadamard_substitute(&self, nvars: usize, map: &dyn Fn(usize) -> (usize, usize)) -> Result<Self> {
        let d = self.degree();
        let r = self.width;
        let mut layers = Vec::with_capacity(2 * self.layers.len());
        for l in &self.layers {
            let Some(z) = l.var else {
                layers.push(l.clone());
                continue;
            };
            let (x, y) = map(z);
            let mut xe: SparseMat = BTreeMap::new();
            for ((i, j), u) in &l.entries {
                for (k, c) in u.iter().enumerate() {
                    if !c.is_zero() {
                        let mut mono = alloc::vec![self.spec.zero(); k + 1];
                        mono[k] = c.clone();
                        xe.insert((*i, k * r + j), mono);
                    }
                }
            }
            let mut ye: SparseMat = BTreeMap::new();
            for k in 0..=d {
                for j in 0..r {
                    let mut mono = alloc::vec![self.spec.zero(); k + 1];
                    mono[k] = self.spec.one();
                    ye.insert((k * r + j, j), mono);
                }
            }
            layers.push(Layer { var: Some(x), entries: xe });
            layers.push(Layer { var: Some(y), entries: ye });
        }
        Roabp::new(self.spec, nvars, r * (d + 1), layers)
    }
}

/// roABP for a powering formula in the given variable order.
///
/// Each term (a_0 + Σ a_k x_k)^d is tracked through the vector of powers
/// (s^0, ..., s^d) of the running partial sum s; reading x with coefficient
/// a maps s^i to Σ_j C(j,i)·s^i·(a x)^{j−i}. Terms are then summed, so the
/// width is Σ(d_i + 1).
pub fn powering_to_roabp(p: &PoweringFormula, order: &[usize]) -> Result<Roabp> {
    let spec = p.spec;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != order.len() {
        return Err(Error::Precondition("order repeats a variable".into()));
    }
    for (_, form, _) in &p.terms {
        for (v, a) in form.coeffs.iter().enumerate() {
            if !a.is_zero() && !order.contains(&v) {
                return Err(Error::Precondition(format!("order omits variable {v}")));
            }
        }
    }
    let mut acc: Option<Roabp> = None;
    for (c, form, d) in &p.terms {
        let t = term_roabp(spec, p.nvars, form, *d as usize, order)?.scale(c);
        acc = Some(match acc {
            Some(a) => a.add(&t)?,
            None => t,
        });
    }
    Ok(acc.unwrap_or_else(|| Roabp::zero(spec, p.nvars, order)))
}

fn term_roabp(spec: FieldSpec, nvars: usize, form: &crate::circuit::AffineForm, d: usize, order: &[usize]) -> Result<Roabp> {
    let w = d + 1;
    if order.is_empty() {
        let v = form.constant.pow(d as u64);
        let e = [((0, 0), uni_trim(alloc::vec![v]))].into_iter().collect();
        return Roabp::new(spec, nvars, 1, alloc::vec![Layer { var: None, entries: e }]);
    }
    let binom: Vec<Vec<FieldElement>> = (0..=d).map(|j| (0..=j).map(|i| binomial_fe(spec, j as u64, i as u64)).collect()).collect();
    let step = |a: &FieldElement| -> SparseMat {
        let mut m: SparseMat = BTreeMap::new();
        for j in 0..=d {
            for i in 0..=j {
                let c = &binom[j][i] * &a.pow((j - i) as u64);
                if !c.is_zero() {
                    let mut u = alloc::vec![spec.zero(); j - i + 1];
                    u[j - i] = c;
                    m.insert((i, j), u);
                }
            }
        }
        m
    };
    let zero = spec.zero();
    let coeff = |v: usize| form.coeffs.get(v).unwrap_or(&zero).clone();
    // initial state: powers of the constant term
    let init: SparseMat = (0..=d)
        .map(|j| ((0, j), alloc::vec![form.constant.pow(j as u64)]))
        .filter(|(_, u)| !u[0].is_zero())
        .collect();
    let sel: SparseMat = [((d, 0), alloc::vec![spec.one()])].into_iter().collect();
    let n = order.len();
    let mut layers = Vec::with_capacity(n);
    for (k, &v) in order.iter().enumerate() {
        let mut m = step(&coeff(v));
        if k == 0 {
            m = mat_mul(&init, &m);
        }
        if k == n - 1 {
            m = mat_mul(&m, &sel);
        }
        layers.push(Layer::new(v, m));
    }
    Roabp::new(spec, nvars, w, layers)
}

/// Random roABP with dense entries of degree ≤ `deg` in the given order.
pub fn random_roabp<R: rand::Rng + ?Sized>(spec: FieldSpec, nvars: usize, order: &[usize], width: usize, deg: usize, rng: &mut R) -> Roabp {
    let layers = order
        .iter()
        .map(|&v| {
            let mut e: SparseMat = BTreeMap::new();
            for i in 0..width {
                for j in 0..width {
                    let u: Uni = (0..=deg).map(|_| FieldElement::from_i64(spec, rng.gen_range(-3..=3))).collect();
                    let u = uni_trim(u);
                    if !u.is_empty() {
                        e.insert((i, j), u);
                    }
                }
            }
            Layer::new(v, e)
        })
        .collect();
    Roabp::new(spec, nvars, width, layers).expect("well-formed random roABP")
}
