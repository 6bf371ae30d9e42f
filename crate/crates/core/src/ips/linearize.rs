use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{IpsCertificate, Linearity};
use crate::circuit::{divide_by_var_circuit, divide_by_var_formula, Circuit, CircuitDag};
use crate::error::{Error, Result};
use crate::poly::Budget;

/// Largest placeholder degree for which the interpolation route is used.
pub const FORMULA_ROUTE_MAX_DEGREE: u64 = 64;

/// How the quotient for one placeholder was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivisionRoute {
    /// Interpolation at `degree + 1` points.
    Formula { degree: u64 },
    /// Gate splitting.
    Circuit,
    /// The placeholder does not occur.
    Skipped,
}

/// Linear-in-placeholders certificate from a valid one.
///
/// Ordering the placeholders `p_1, ..., p_k` (the y's, then the z's),
/// `D_i = C(x, 0_{<i}, p_i, p_{>i}) − C(x, 0_{≤i}, p_{>i})` is divisible by
/// `p_i`. With `Q_i = D_i / p_i`, the output is
/// `Σ_i Q_i(x, a_{≥i}(x))·p_i` where `a_j` is the polynomial placeholder
/// `p_j` stands for. Its value at the axioms telescopes to
/// `C(x, a) − C(x, 0) = 1`.
pub fn ips_to_linear(cert: &IpsCertificate, budget: &mut Budget) -> Result<(IpsCertificate, Vec<DivisionRoute>)> {
    if !cert.verify_exact(budget)?.is_valid() {
        return Err(Error::InvalidCertificate("input certificate does not verify".into()));
    }
    let spec = cert.system.spec;
    let total = cert.layout().total();
    let mut c = cert.proof.to_dag();
    c.set_nvars(total);
    let placeholders = cert.system.placeholders();
    let ids: Vec<usize> = placeholders.iter().map(|(v, _)| *v).collect();

    let mut out = CircuitDag::new(spec, total);
    // axiom circuits, appended once
    let mut axiom_nodes: BTreeMap<usize, usize> = BTreeMap::new();
    for (v, a) in &placeholders {
        let map = out.append(&CircuitDag::from_poly(a), &BTreeMap::new())?;
        axiom_nodes.insert(*v, map[map.len() - 1]);
    }
    let mut routes = Vec::with_capacity(ids.len());
    let mut parts = Vec::new();
    for (i, &p) in ids.iter().enumerate() {
        let mut d = CircuitDag::new(spec, total);
        let zero = d.constant(spec.zero());
        let with: BTreeMap<usize, usize> = ids[..i].iter().map(|&v| (v, zero)).collect();
        let without: BTreeMap<usize, usize> = ids[..=i].iter().map(|&v| (v, zero)).collect();
        let a = d.append(&c, &with)?[c.output()];
        let b = d.append(&c, &without)?[c.output()];
        let root = d.add(alloc::vec![(a, spec.one()), (b, -spec.one())]);
        d.set_outputs(alloc::vec![root]);
        let d = d.prune();
        let deg = d.degree_bound(&|v| u64::from(v == p));
        if deg == 0 {
            routes.push(DivisionRoute::Skipped);
            continue;
        }
        let q = if deg <= FORMULA_ROUTE_MAX_DEGREE && spec.has_elements(deg as u128 + 1) {
            routes.push(DivisionRoute::Formula { degree: deg });
            divide_by_var_formula(&d, p, 1, deg as u32, budget)?
        } else {
            routes.push(DivisionRoute::Circuit);
            let mut split = divide_by_var_circuit(&d, p, 1)?;
            let tail = *split.outputs().get(1).ok_or_else(|| Error::Precondition(format!("no quotient for variable {p}")))?;
            split.set_outputs(alloc::vec![tail]);
            split.prune()
        };
        let sub: BTreeMap<usize, usize> = ids[i..].iter().map(|v| (*v, axiom_nodes[v])).collect();
        let qi = out.append(&q, &sub)?[q.output()];
        let pi = out.input(p);
        parts.push(out.mul(qi, pi));
    }
    let root = if parts.is_empty() { out.constant(spec.zero()) } else { out.sum(&parts) };
    out.set_outputs(alloc::vec![root]);
    let out = out.prune();
    let lin = IpsCertificate::new(cert.system.clone(), Circuit::Dag(out), Linearity::LinYZ)?;
    Ok((lin, routes))
}
