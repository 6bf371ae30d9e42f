use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{AxiomSystem, IpsCertificate, Linearity};
use crate::circuit::roabp::{uni_trim, Layer, SparseMat, Uni};
use crate::circuit::{Circuit, CircuitDag, MlNode, MultilinearFormula, Roabp};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{Budget, Monomial, SparsePoly, VarLayout};

/// Values at 0 and 1 of a univariate given low to high.
pub(crate) fn uni_ml_parts(u: &[FieldElement], spec: FieldSpec) -> (FieldElement, FieldElement) {
    let at0 = u.first().cloned().unwrap_or_else(|| spec.zero());
    let mut at1 = spec.zero();
    for c in u {
        at1 += c;
    }
    (at0, at1)
}

/// `u = ml + (x² − x)·q` with `ml` of degree ≤ 1.
fn uni_ml_split(u: &Uni, spec: FieldSpec) -> (Uni, Uni) {
    let (at0, at1) = uni_ml_parts(u, spec);
    let ml = uni_trim(alloc::vec![at0.clone(), &at1 - &at0]);
    // q_i = Σ_{k ≥ i+2} u_k
    let mut q = alloc::vec![spec.zero(); u.len().saturating_sub(2)];
    let mut acc = spec.zero();
    for i in (0..q.len()).rev() {
        acc += &u[i + 2];
        q[i] = acc.clone();
    }
    (ml, uni_trim(q))
}

/// Entrywise split of a layer into its multilinear part and the quotient
/// by `x² − x`.
pub(crate) fn split_layer(l: &Layer) -> (Layer, Layer) {
    let mut ml: SparseMat = BTreeMap::new();
    let mut q: SparseMat = BTreeMap::new();
    for (k, u) in &l.entries {
        let spec = u[0].spec();
        let (a, b) = uni_ml_split(u, spec);
        if !a.is_empty() {
            ml.insert(*k, a);
        }
        if !b.is_empty() {
            q.insert(*k, b);
        }
    }
    (Layer { var: l.var, entries: ml }, Layer { var: l.var, entries: q })
}

/// `a = ml_a + Σ_j h_j·(x_j² − x_j)` with every piece an roABP of the same
/// width and order as `a`.
///
/// Splitting each layer as `M_j = ML_j + (x_j² − x_j)·Q_j` and telescoping,
/// `h_j = ML_1 ⋯ ML_{j−1} · Q_j · M_{j+1} ⋯ M_n`. The list pairs each read
/// variable with its `h_j`.
pub fn multilinearize_roabp(a: &Roabp) -> Result<(Roabp, Vec<(usize, Roabp)>)> {
    let split: Vec<(Layer, Layer)> = a.layers().iter().map(split_layer).collect();
    let ml = Roabp::new(a.spec(), a.nvars(), a.width(), split.iter().map(|(m, _)| m.clone()).collect())?;
    let mut hs = Vec::new();
    for (j, l) in a.layers().iter().enumerate() {
        let Some(v) = l.var else { continue };
        let layers: Vec<Layer> = (0..a.layers().len())
            .map(|k| match k.cmp(&j) {
                core::cmp::Ordering::Less => split[k].0.clone(),
                core::cmp::Ordering::Equal => split[k].1.clone(),
                core::cmp::Ordering::Greater => a.layers()[k].clone(),
            })
            .collect();
        hs.push((v, Roabp::new(a.spec(), a.nvars(), a.width(), layers)?));
    }
    Ok((ml, hs))
}

/// The witness `C(x, z) = ∏(z_i + x_i) − ∏ x_i` for `(x^1)² − x^1`, in
/// product form and expanded as `Σ_{S ≠ ∅} z_S·x_{S^c}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSquareWitness {
    /// `x_i → i−1`, `z_i → d+i−1`.
    pub layout: VarLayout,
    pub product: CircuitDag,
    pub sum: SparsePoly,
}

pub fn monomial_square_witness(spec: FieldSpec, d: usize) -> Result<MonomialSquareWitness> {
    if d == 0 {
        return Err(Error::Precondition("need d ≥ 1".into()));
    }
    if d > 20 {
        return Err(Error::Budget { needed: 1u128 << d, limit: 1 << 20 });
    }
    let layout = VarLayout::new(d, 0, d);
    let total = layout.total();
    let mut c = CircuitDag::new(spec, total);
    let one = spec.one();
    let xs: Vec<usize> = (1..=d).map(|i| c.input(layout.x(i))).collect();
    let pairs: Vec<usize> = (1..=d)
        .map(|i| {
            let z = c.input(layout.z(i));
            c.add(alloc::vec![(z, one.clone()), (xs[i - 1], one.clone())])
        })
        .collect();
    let p = c.mul_many(&pairs);
    let m = c.mul_many(&xs);
    let root = c.add(alloc::vec![(p, one.clone()), (m, -&one)]);
    c.set_outputs(alloc::vec![root]);
    let mut sum = SparsePoly::zero(spec, total);
    for mask in 1u32..(1 << d) {
        let vars: Vec<usize> = (0..d).map(|i| if mask >> i & 1 == 1 { layout.z(i + 1) } else { layout.x(i + 1) }).collect();
        sum.add_term(Monomial::from_vars(&vars), one.clone());
    }
    Ok(MonomialSquareWitness { layout, product: c, sum })
}

/// Terms `(c, x^{SΔT}, I)` of `g·f − ml(g·f) = Σ c·x^{SΔT}·(x_I² − x_I)`.
fn overlap_terms(g: &SparsePoly, f: &SparsePoly, budget: &mut Budget) -> Result<Vec<(FieldElement, Vec<usize>, Vec<usize>)>> {
    if !g.is_multilinear() || !f.is_multilinear() {
        return Err(Error::Precondition("both factors must be multilinear".into()));
    }
    let mut out = Vec::new();
    for (s, a) in g.terms() {
        for (t, b) in f.terms() {
            let both: Vec<usize> = s.support().filter(|&v| t.exp(v) > 0).collect();
            if both.is_empty() {
                continue;
            }
            budget.charge(1u128 << both.len().min(127))?;
            let sym: Vec<usize> = s.mul(t).support().filter(|v| !both.contains(v)).collect();
            out.push((a * b, sym, both));
        }
    }
    Ok(out)
}

/// `C(x, z)` with `C(x, 0) = 0` and `g·f − ml(g·f) = C(x, x² − x)` for
/// multilinear `g`, `f` over `n` variables; `z_i` has id `n + i − 1`.
pub fn sparse_times_formula_witness(g: &SparsePoly, f: &SparsePoly, budget: &mut Budget) -> Result<SparsePoly> {
    let n = g.nvars().max(f.nvars());
    let layout = VarLayout::new(n, 0, n);
    times_witness(g, f, &|i| layout.z(i + 1), layout.total(), budget)
}

fn times_witness(g: &SparsePoly, f: &SparsePoly, z_of: &dyn Fn(usize) -> usize, nvars: usize, budget: &mut Budget) -> Result<SparsePoly> {
    let spec = g.spec();
    let mut out = SparsePoly::zero(spec, nvars);
    for (c, sym, both) in overlap_terms(g, f, budget)? {
        let k = both.len();
        for mask in 1u64..(1 << k) {
            let mut vars = sym.clone();
            for (i, &v) in both.iter().enumerate() {
                vars.push(if mask >> i & 1 == 1 { z_of(v) } else { v });
            }
            out.add_term(Monomial::from_vars(&vars), c.clone());
        }
    }
    Ok(out)
}

fn product_node(spec: FieldSpec, mut kids: Vec<MlNode>) -> MlNode {
    match kids.len() {
        0 => MlNode::constant(spec.one()),
        1 => kids.pop().unwrap(),
        _ => MlNode::mul(kids),
    }
}

/// Linear-in-y refutation `Σ_j ml(g_j)·y_j − Σ_j C_j(x, z)` from witnesses
/// with `Σ_j ml(g_j)·f_j ≡ 1` on the cube, each `C_j` the witness for
/// `ml(g_j)·f_j`. The proof is a multilinear formula of product depth 1.
pub fn simulate_sparse_linips(system: &AxiomSystem, witnesses: &[SparsePoly], budget: &mut Budget) -> Result<IpsCertificate> {
    let spec = system.spec;
    let n = system.nvars;
    if witnesses.len() != system.axioms.len() {
        return Err(Error::Precondition(format!("{} witnesses for {} axioms", witnesses.len(), system.axioms.len())));
    }
    if !system.include_boolean {
        return Err(Error::Precondition("the boolean axioms are required".into()));
    }
    let gs: Vec<SparsePoly> = witnesses.iter().map(|g| g.clone().with_nvars(n).multilinearize()).collect();
    let mut total = SparsePoly::zero(spec, n);
    for (g, f) in gs.iter().zip(&system.axioms) {
        total = &total + &g.mul_budgeted(f, budget)?;
    }
    let total = total.multilinearize();
    if !(total.sparsity() == 1 && total.constant_term().is_one()) {
        return Err(Error::InvalidCertificate("witnesses do not combine to 1 on the cube".into()));
    }
    let layout = system.layout();
    let leaves = |vs: &[usize]| -> Vec<MlNode> { vs.iter().map(|&v| MlNode::var(v)).collect() };
    let mut top: Vec<(FieldElement, MlNode)> = Vec::new();
    for (j, (g, f)) in gs.iter().zip(&system.axioms).enumerate() {
        for (m, c) in g.terms() {
            let mut kids = leaves(&m.support().collect::<Vec<_>>());
            kids.push(MlNode::var(layout.y(j + 1)));
            top.push((c.clone(), product_node(spec, kids)));
        }
        for (c, sym, both) in overlap_terms(g, f, budget)? {
            let mut kids = leaves(&sym);
            for &v in &both {
                kids.push(MlNode::affine(spec.zero(), &[(layout.z(v + 1), spec.one()), (v, spec.one())]));
            }
            top.push((-&c, product_node(spec, kids)));
            let mut union = sym.clone();
            union.extend_from_slice(&both);
            top.push((c, product_node(spec, leaves(&union))));
        }
    }
    if top.is_empty() {
        top.push((spec.one(), MlNode::constant(spec.zero())));
    }
    let formula = MultilinearFormula::new(spec, layout.total(), MlNode::add(top));
    IpsCertificate::new(system.clone(), Circuit::Multilinear(formula), Linearity::LinY)
}

/// Columns of the linear system for `Σ_p g_p(x)·p(x) = 1` with multilinear
/// `g_p`, one column per (placeholder, multilinear monomial). Returns the
/// columns as coefficient maps, the column labels and the target monomial
/// index set.
#[allow(clippy::type_complexity)]
fn ansatz_columns(system: &AxiomSystem) -> Result<(Vec<BTreeMap<Monomial, FieldElement>>, Vec<(usize, Monomial)>)> {
    let n = system.nvars;
    if n > 10 {
        return Err(Error::Budget { needed: 1u128 << n, limit: 1 << 10 });
    }
    let mut polys: Vec<SparsePoly> = system.axioms.clone();
    if system.include_boolean {
        for i in 0..n {
            let x = SparsePoly::var(system.spec, n, i);
            polys.push(&(&x * &x) - &x);
        }
    }
    let mut cols = Vec::new();
    let mut labels = Vec::new();
    for (p_idx, p) in polys.iter().enumerate() {
        for mask in 0u32..(1 << n) {
            let vars: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let m = Monomial::from_vars(&vars);
            cols.push(p.shift(&m).into_terms());
            labels.push((p_idx, m));
        }
    }
    Ok((cols, labels))
}

/// Whether `Σ_p g_p·p = 1` has a solution with every `g_p` multilinear in x,
/// `p` ranging over the axioms and the boolean axioms. Decided by comparing
/// ranks of the coefficient matrix and its augmentation.
pub fn multilinear_linips_exists(system: &AxiomSystem) -> Result<bool> {
    let spec = system.spec;
    let (cols, _) = ansatz_columns(system)?;
    let mut monos: Vec<Monomial> = cols.iter().flat_map(|c| c.keys().cloned()).collect();
    monos.push(Monomial::one());
    monos.sort();
    monos.dedup();
    let matrix: Vec<Vec<FieldElement>> = monos.iter().map(|m| cols.iter().map(|c| c.get(m).cloned().unwrap_or_else(|| spec.zero())).collect()).collect();
    let aug: Vec<Vec<FieldElement>> = monos
        .iter()
        .zip(&matrix)
        .map(|(m, row)| {
            let mut r = row.clone();
            r.push(if m.is_one() { spec.one() } else { spec.zero() });
            r
        })
        .collect();
    Ok(crate::linalg::rank(spec, &matrix)? == crate::linalg::rank(spec, &aug)?)
}

/// Exhaustive search over all multilinear multipliers with coefficients in
/// the (prime) field of `system`. Returns the multipliers of a solution, the
/// axioms first and then the boolean axioms, or `None`.
pub fn exhaustive_multilinear_linips(system: &AxiomSystem, max_candidates: u128) -> Result<Option<Vec<SparsePoly>>> {
    let spec = system.spec;
    let p = match spec {
        FieldSpec::Prime(p) => p,
        FieldSpec::Rational => return Err(Error::Precondition("exhaustive search needs a finite field".into())),
    };
    let (cols, labels) = ansatz_columns(system)?;
    let k = cols.len();
    let count = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if count > max_candidates {
        return Err(Error::Budget { needed: count, limit: max_candidates });
    }
    let mut monos: Vec<Monomial> = cols.iter().flat_map(|c| c.keys().cloned()).collect();
    monos.push(Monomial::one());
    monos.sort();
    monos.dedup();
    let index: BTreeMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let dense: Vec<Vec<(usize, u64)>> = cols
        .iter()
        .map(|c| c.iter().map(|(m, v)| (index[m], v.residue().expect("prime field"))).collect())
        .collect();
    let target: Vec<u64> = monos.iter().map(|m| u64::from(m.is_one())).collect();
    let mut acc = alloc::vec![0u64; monos.len()];
    let mut digits = alloc::vec![0u64; k];
    loop {
        if acc == target {
            let n = system.nvars;
            let npolys = k >> n;
            let mut out: Vec<SparsePoly> = (0..npolys).map(|_| SparsePoly::zero(spec, n)).collect();
            for (d, (pi, m)) in digits.iter().zip(&labels) {
                if *d != 0 {
                    out[*pi].add_term(m.clone(), FieldElement::from_u64(spec, *d));
                }
            }
            return Ok(Some(out));
        }
        // odometer step: bumping digit i adds column i, a wrap to 0 adds it once more (p·col ≡ 0)
        let mut i = 0;
        loop {
            if i == k {
                return Ok(None);
            }
            for &(r, v) in &dense[i] {
                acc[r] = (acc[r] + v) % p;
            }
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// `ml(r)` and `q_1..q_n` with `r = ml(r) + Σ_i q_i·(x_i² − x_i)`, using
/// `x^k − x = (x² − x)(1 + x + ⋯ + x^{k−2})` one variable at a time.
pub fn boolean_quotients(r: &SparsePoly, n: usize) -> (SparsePoly, Vec<SparsePoly>) {
    let spec = r.spec();
    let nv = r.nvars().max(n);
    let mut rest = r.clone().with_nvars(nv);
    let mut qs = Vec::with_capacity(n);
    for i in 0..n {
        let mut q = SparsePoly::zero(spec, nv);
        let mut next = SparsePoly::zero(spec, nv);
        for (m, c) in rest.terms() {
            let k = m.exp(i);
            if k < 2 {
                next.add_term(m.clone(), c.clone());
                continue;
            }
            next.add_term(m.with_exp(i, 1), c.clone());
            for e in 0..=k - 2 {
                q.add_term(m.with_exp(i, e), c.clone());
            }
        }
        rest = next;
        qs.push(q);
    }
    (rest, qs)
}

/// Linear certificate `Σ_j a_j·y_j − Σ_i q_i·z_i` from multipliers with
/// `Σ_j a_j·f_j ≡ 1` on the cube.
pub fn certificate_from_multipliers(system: &AxiomSystem, multipliers: &[SparsePoly]) -> Result<IpsCertificate> {
    let spec = system.spec;
    let n = system.nvars;
    if multipliers.len() != system.axioms.len() {
        return Err(Error::Precondition(format!("{} multipliers for {} axioms", multipliers.len(), system.axioms.len())));
    }
    let mut r = SparsePoly::constant(spec, n, -spec.one());
    for (a, f) in multipliers.iter().zip(&system.axioms) {
        r = &r + &(a * f);
    }
    let (ml, qs) = boolean_quotients(&r, n);
    if !ml.is_zero() {
        return Err(Error::InvalidCertificate("multipliers do not combine to 1 on the cube".into()));
    }
    if !system.include_boolean && qs.iter().any(|q| !q.is_zero()) {
        return Err(Error::InvalidCertificate("identity needs the boolean axioms".into()));
    }
    let layout = system.layout();
    let total = layout.total();
    let mut c = SparsePoly::zero(spec, total);
    for (j, a) in multipliers.iter().enumerate() {
        c = &c + &(&a.clone().with_nvars(total) * &SparsePoly::var(spec, total, layout.y(j + 1)));
    }
    if system.include_boolean {
        for (i, q) in qs.iter().enumerate() {
            c = &c - &(&q.clone().with_nvars(total) * &SparsePoly::var(spec, total, layout.z(i + 1)));
        }
    }
    IpsCertificate::new(system.clone(), Circuit::Dag(CircuitDag::from_poly(&c)), Linearity::LinYZ)
}
