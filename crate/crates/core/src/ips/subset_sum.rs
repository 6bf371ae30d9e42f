use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use super::multilin::{split_layer, uni_ml_parts};
use super::{AxiomSystem, IpsCertificate, Linearity};
use crate::circuit::powering::duality_decompose;
use crate::circuit::roabp::{poly_to_uni, Layer, SparseMat};
use crate::circuit::{powering_to_roabp, AffineForm, Circuit, MlNode, MultilinearFormula, PoweringFormula, Roabp};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{elementary_symmetric, Monomial, SparsePoly, VarLayout};

/// All subset sums of `alpha`, by the dynamic program A_{j+1} = A_j ∪ (A_j + α_{j+1}).
pub fn reachable_sums(alpha: &[FieldElement]) -> Vec<FieldElement> {
    let Some(spec) = alpha.first().map(|a| a.spec()) else {
        return Vec::new();
    };
    let mut a: BTreeSet<FieldElement> = [spec.zero()].into_iter().collect();
    for x in alpha {
        let shifted: Vec<FieldElement> = a.iter().map(|s| s + x).collect();
        a.extend(shifted);
    }
    a.into_iter().collect()
}

/// Ingredients of the subset-sum refutation for `Σ α_i x_i − β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSumWitness {
    pub reachable: Vec<FieldElement>,
    /// Coefficients of p(t) = ∏_{a∈A} (t − a), low to high.
    pub p_coeffs: Vec<FieldElement>,
    /// g(x) = ((p(t) − p(β)) / (t − β)) at t = Σ α_i x_i.
    pub g: PoweringFormula,
    /// −p(β), the constant with g·(Σα_i x_i − β) ≡ scale modulo the booleans.
    pub scale: FieldElement,
    /// ml(g) / scale, the multilinear inverse of the axiom on the cube.
    pub f_ml: SparsePoly,
}

impl SubsetSumWitness {
    pub fn nvars(&self) -> usize {
        self.g.nvars
    }
}

/// The axiom `Σ α_i x_i − β`.
pub fn subset_sum_axiom(alpha: &[FieldElement], beta: &FieldElement) -> SparsePoly {
    let spec = beta.spec();
    let n = alpha.len();
    let mut f = SparsePoly::constant(spec, n, -beta);
    for (i, a) in alpha.iter().enumerate() {
        f.add_term(Monomial::var(i), a.clone());
    }
    f
}

fn check_specs(alpha: &[FieldElement], beta: &FieldElement) -> Result<FieldSpec> {
    let spec = beta.spec();
    if alpha.iter().any(|a| a.spec() != spec) {
        return Err(Error::SpecMismatch);
    }
    if alpha.is_empty() {
        return Err(Error::Precondition("need at least one variable".into()));
    }
    Ok(spec)
}

pub fn subset_sum_witness(alpha: &[FieldElement], beta: &FieldElement) -> Result<SubsetSumWitness> {
    let spec = check_specs(alpha, beta)?;
    let n = alpha.len();
    let reachable = reachable_sums(alpha);
    if reachable.contains(beta) {
        return Err(Error::Satisfiable(format!("{beta} is a subset sum")));
    }
    let mut p = alloc::vec![spec.one()];
    for a in &reachable {
        // multiply by (t − a)
        let mut next = alloc::vec![spec.zero(); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= &(c * a);
        }
        p = next;
    }
    let deg = p.len() - 1;
    // synthetic division of p(t) − p(β) by t − β
    let mut q = alloc::vec![spec.zero(); deg];
    q[deg - 1] = p[deg].clone();
    for j in (0..deg - 1).rev() {
        q[j] = &p[j + 1] + &(beta * &q[j + 1]);
    }
    let p_beta = &p[0] + &(beta * &q[0]);
    let scale = -p_beta;
    let lin = AffineForm::new(alpha.to_vec(), spec.zero());
    let mut g = PoweringFormula::new(spec, n);
    for (j, c) in q.iter().enumerate() {
        if !c.is_zero() {
            g.push_scaled(c.clone(), lin.clone(), j as u32);
        }
    }
    // ml(g) through ml(L^j) = ml(L · ml(L^{j−1}))
    let lpoly = lin.to_poly(spec, n);
    let mut power = SparsePoly::one(spec, n);
    let mut ml_g = SparsePoly::zero(spec, n);
    for (j, c) in q.iter().enumerate() {
        if j > 0 {
            power = (&power * &lpoly).multilinearize();
        }
        ml_g = &ml_g + &power.scale(c);
    }
    let f_ml = ml_g.scale(&scale.inv()?);
    let axiom = subset_sum_axiom(alpha, beta);
    if !(&f_ml * &axiom).multilinearize().is_one_poly() {
        return Err(Error::Precondition("multilinear inverse check failed".into()));
    }
    Ok(SubsetSumWitness { reachable, p_coeffs: p, g, scale, f_ml })
}

trait IsOne {
    fn is_one_poly(&self) -> bool;
}

impl IsOne for SparsePoly {
    fn is_one_poly(&self) -> bool {
        self.sparsity() == 1 && self.constant_term().is_one()
    }
}

/// −Σ_k (k! / ∏_{j=0}^{k} (β − j))·S_{n,k}, the multilinear polynomial equal
/// to 1/(Σ x_i − β) on the cube.
pub fn appendix_inverse_poly(n: usize, beta: &FieldElement) -> Result<SparsePoly> {
    let spec = beta.spec();
    if !spec.characteristic_guard(n as u64) {
        return Err(Error::Precondition(format!("characteristic must be 0 or exceed {n}")));
    }
    for j in 0..=n {
        if beta == &FieldElement::from_u64(spec, j as u64) {
            return Err(Error::Satisfiable(format!("β = {beta} lies in {{0..{n}}}")));
        }
    }
    let mut f = SparsePoly::zero(spec, n);
    let mut fact = spec.one();
    let mut denom = beta.clone();
    for k in 0..=n {
        if k > 0 {
            fact = &fact * &FieldElement::from_u64(spec, k as u64);
            denom = &denom * &(beta - &FieldElement::from_u64(spec, k as u64));
        }
        let c = -(&fact * &denom.inv()?);
        f = &f + &elementary_symmetric(n, k, spec)?.scale(&c);
    }
    Ok(f)
}

/// An roABP refutation together with its construction data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoabpRefutation {
    pub cert: IpsCertificate,
    pub witness: SubsetSumWitness,
    /// Width of the proof roABP.
    pub width: usize,
    /// Width of ml(g) alone.
    pub ml_g_width: usize,
}

/// Width-2 roABP for `Σ α_i x_i − β` in the given order.
fn axiom_roabp(spec: FieldSpec, nvars: usize, alpha: &[FieldElement], beta: &FieldElement, order: &[usize]) -> Result<Roabp> {
    let mut f = PoweringFormula::new(spec, nvars);
    let mut coeffs = alpha.to_vec();
    coeffs.resize(nvars, spec.zero());
    f.push(AffineForm::new(coeffs, -beta), 1);
    powering_to_roabp(&f, order)
}

/// Refutation `C = (ml(g)·y1 − Σ_i h_i·z_i) / scale` computed by one roABP.
///
/// `P = ml(g)·(Σα_i x_i − β)` has individual degree ≤ 2; splitting each layer
/// as `M = ML + (x² − x)·Q` and telescoping gives `P = ml(P) + Σ_i h_i·(x_i² − x_i)`
/// with `ml(P) = scale`. The sum `Σ h_i z_i` is read by one roABP whose
/// state is split into a prefix block (ML layers), a block waiting for `z_i`,
/// and a suffix block (M layers). Variables are read as the requested x
/// order with each `z_i` right after `x_i`, and `y1` last.
pub fn build_roabp_refutation(alpha: &[FieldElement], beta: &FieldElement, order: &[usize]) -> Result<RoabpRefutation> {
    let spec = check_specs(alpha, beta)?;
    let n = alpha.len();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::Precondition(format!("order must be a permutation of 0..{n}")));
    }
    let witness = subset_sum_witness(alpha, beta)?;
    let layout = VarLayout::new(n, 1, n);
    let total = layout.total();
    let y1 = layout.y(1);
    let full_order: Vec<usize> = order.iter().flat_map(|&x| [x, layout.z(x + 1)]).chain([y1]).collect();

    let g = powering_to_roabp(&witness.g, order)?;
    let ml_g = Roabp::new(spec, n, g.width(), g.layers().iter().map(|l| split_layer(l).0).collect())?;
    let prod = ml_g.mul(&axiom_roabp(spec, n, alpha, beta, order)?)?;

    // ml(g)·y1
    let y_layer = Roabp::product_of_univariates(spec, total, &[y1], &[alloc::vec![spec.zero(), spec.one()]])?;
    let first = Roabp::new(spec, total, ml_g.width(), ml_g.layers().to_vec())?.align(&full_order)?.mul(&y_layer.align(&full_order)?)?;

    // Σ h_i z_i
    let r = prod.width();
    let mut layers = Vec::with_capacity(2 * n + 1);
    for l in prod.layers() {
        let x = l.var.expect("every x is read");
        let (ml, q) = split_layer(l);
        let mut e: SparseMat = BTreeMap::new();
        for ((i, j), u) in &ml.entries {
            e.insert((*i, *j), u.clone());
        }
        for ((i, j), u) in &q.entries {
            e.insert((*i, r + j), u.clone());
        }
        for ((i, j), u) in &l.entries {
            e.insert((2 * r + i, 2 * r + j), u.clone());
        }
        layers.push(Layer::new(x, e));
        let mut ze: SparseMat = BTreeMap::new();
        for i in 0..r {
            ze.insert((i, i), alloc::vec![spec.one()]);
            ze.insert((r + i, 2 * r + i), alloc::vec![spec.zero(), spec.one()]);
            ze.insert((2 * r + i, 2 * r + i), alloc::vec![spec.one()]);
        }
        layers.push(Layer::new(layout.z(x + 1), ze));
    }
    let sel: SparseMat = [((2 * r, 0), alloc::vec![spec.one()])].into_iter().collect();
    layers.push(Layer::new(y1, sel));
    let second = Roabp::new(spec, total, 3 * r, layers)?;

    let inv = witness.scale.inv()?;
    let proof = first.scale(&inv).add(&second.scale(&-inv))?;
    let system = AxiomSystem::new(spec, n, alloc::vec![subset_sum_axiom(alpha, beta)], true)?;
    let width = proof.width();
    let cert = IpsCertificate::new(system, Circuit::Roabp(proof), Linearity::LinYZ)?;
    Ok(RoabpRefutation { cert, witness, width, ml_g_width: ml_g.width() })
}

/// Depth-3 multilinear-formula refutation `f·y1 − Σ_j h_j·z_j`.
///
/// `f = ml(g)/scale` is written as Σ_i ∏_j f_ij(x_j) with affine f_ij by
/// expanding each power of Σ α_i x_i through the duality identity and
/// multilinearizing factor by factor. With `f_ij(x)·x = f_ij(1)·x +
/// (f_ij(1) − f_ij(0))(x² − x)`, `h_j = Σ_i α_j (f_ij(1) − f_ij(0)) ∏_{k≠j} f_ik`.
pub fn build_mlformula_refutation(alpha: &[FieldElement], beta: &FieldElement) -> Result<IpsCertificate> {
    let spec = check_specs(alpha, beta)?;
    let n = alpha.len();
    let witness = subset_sum_witness(alpha, beta)?;
    let d = witness.reachable.len() as u128;
    let need = (n as u128 * d + 1) * (d + 1);
    if !spec.has_elements(need) {
        return Err(Error::FieldTooSmall { needed: need, have: spec.size().unwrap_or(0) as u128 });
    }
    let inv = witness.scale.inv()?;
    // products of affine univariates: (coefficient, [(f_j(0), f_j(1))])
    let mut products: Vec<(FieldElement, Vec<(FieldElement, FieldElement)>)> = Vec::new();
    for (c, _, k) in &witness.g.terms {
        for tuple in duality_decompose(n, *k, spec)? {
            let factors = tuple
                .iter()
                .enumerate()
                .map(|(j, f)| {
                    // f(α_j x) restricted to the cube
                    let u: Vec<FieldElement> = poly_to_uni(f, j)?.iter().enumerate().map(|(e, c)| c * &alpha[j].pow(e as u64)).collect();
                    Ok(uni_ml_parts(&u, spec))
                })
                .collect::<Result<_>>()?;
            products.push((c * &inv, factors));
        }
    }
    let layout = VarLayout::new(n, 1, n);
    let affine = |j: usize, (a0, a1): &(FieldElement, FieldElement)| MlNode::affine(a0.clone(), &[(layout.x(j + 1), a1 - a0)]);
    let mut top: Vec<(FieldElement, MlNode)> = Vec::new();
    for (c, fs) in &products {
        let mut kids: Vec<MlNode> = fs.iter().enumerate().map(|(j, f)| affine(j, f)).collect();
        kids.push(MlNode::var(layout.y(1)));
        top.push((c.clone(), MlNode::mul(kids)));
    }
    for j in 0..n {
        for (c, fs) in &products {
            let slope = &fs[j].1 - &fs[j].0;
            let w = -(c * &alpha[j] * slope);
            if w.is_zero() {
                continue;
            }
            let mut kids: Vec<MlNode> = fs.iter().enumerate().filter(|(k, _)| *k != j).map(|(k, f)| affine(k, f)).collect();
            kids.push(MlNode::var(layout.z(j + 1)));
            top.push((w, MlNode::mul(kids)));
        }
    }
    let formula = MultilinearFormula::new(spec, layout.total(), MlNode::add(top));
    let system = AxiomSystem::new(spec, n, alloc::vec![subset_sum_axiom(alpha, beta)], true)?;
    IpsCertificate::new(system, Circuit::Multilinear(formula), Linearity::LinYZ)
}
