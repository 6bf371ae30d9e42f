//! Restricted circuit classes, their evaluation and expansion, and the
//! transformations between them.

pub mod dag;
pub mod divide;
pub mod mlformula;
pub mod powering;
pub mod roabp;


pub use dag::{random_dag, CircuitDag, Node};
pub use divide::{divide_by_var_circuit, divide_by_var_formula};
pub use mlformula::{random_ml_formula, MlKind, MlNode, MultilinearFormula};
pub use powering::{duality_decompose, AffineForm, LowDegPoweringFormula, PoweringFormula};
pub use roabp::{powering_to_roabp, random_roabp, Layer, Roabp, Uni};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::Result;
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{Budget, SparsePoly};

/// Any of the supported circuit representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Circuit {
    Dag(CircuitDag),
    Powering(PoweringFormula),
    LowDeg(LowDegPoweringFormula),
    Roabp(Roabp),
    Multilinear(MultilinearFormula),
}

impl Circuit {
    pub fn spec(&self) -> FieldSpec {
        match self {
            Circuit::Dag(c) => c.spec(),
            Circuit::Powering(c) => c.spec,
            Circuit::LowDeg(c) => c.spec,
            Circuit::Roabp(c) => c.spec(),
            Circuit::Multilinear(c) => c.spec,
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            Circuit::Dag(c) => c.nvars(),
            Circuit::Powering(c) => c.nvars,
            Circuit::LowDeg(c) => c.nvars,
            Circuit::Roabp(c) => c.nvars(),
            Circuit::Multilinear(c) => c.nvars,
        }
    }

    /// Size in the class's own accounting.
    pub fn size(&self) -> u128 {
        match self {
            Circuit::Dag(c) => c.size() as u128,
            Circuit::Powering(c) => c.size() as u128,
            Circuit::LowDeg(c) => c.size(),
            Circuit::Roabp(c) => c.dense_size(),
            Circuit::Multilinear(c) => c.size() as u128,
        }
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        match self {
            Circuit::Dag(c) => c.eval(point),
            Circuit::Powering(c) => c.eval(point),
            Circuit::LowDeg(c) => c.eval(point),
            Circuit::Roabp(c) => c.eval(point),
            Circuit::Multilinear(c) => c.eval(point),
        }
    }

    /// Degree upper bound with variable `v` counted `weight(v)` times.
    pub fn degree_bound(&self, weight: &dyn Fn(usize) -> u64) -> u64 {
        match self {
            Circuit::Dag(c) => c.degree_bound(weight),
            Circuit::Powering(c) => c
                .terms
                .iter()
                .map(|(_, l, d)| {
                    let w = l.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(v, _)| weight(v)).max().unwrap_or(0);
                    w * *d as u64
                })
                .max()
                .unwrap_or(0),
            Circuit::LowDeg(c) => c
                .terms
                .iter()
                .map(|(f, d)| {
                    let w = f.terms().keys().map(|m| m.support().map(|v| m.exp(v) as u64 * weight(v)).sum::<u64>()).max().unwrap_or(0);
                    w * *d as u64
                })
                .max()
                .unwrap_or(0),
            Circuit::Roabp(c) => c.degree_bound(weight),
            Circuit::Multilinear(c) => c.to_dag().degree_bound(weight),
        }
    }

    /// The same polynomial as a general circuit.
    pub fn to_dag(&self) -> CircuitDag {
        match self {
            Circuit::Dag(c) => c.clone(),
            Circuit::Powering(c) => {
                let mut dag = CircuitDag::new(c.spec, c.nvars);
                let mut terms = Vec::new();
                for (k, l, d) in &c.terms {
                    let mut ch: Vec<(usize, FieldElement)> =
                        l.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(v, a)| (dag.input(v), a.clone())).collect();
                    ch.push((dag.constant(c.spec.one()), l.constant.clone()));
                    let base = dag.add(ch);
                    terms.push((pow_node(&mut dag, base, *d), k.clone()));
                }
                finish_sum(dag, terms)
            }
            Circuit::LowDeg(c) => {
                let mut dag = CircuitDag::new(c.spec, c.nvars);
                let mut terms = Vec::new();
                for (f, d) in &c.terms {
                    let sub = CircuitDag::from_poly(f);
                    let map = dag.append(&sub, &Default::default()).expect("same field");
                    let base = map[sub.output()];
                    terms.push((pow_node(&mut dag, base, *d), c.spec.one()));
                }
                finish_sum(dag, terms)
            }
            Circuit::Roabp(r) => roabp_to_dag(r),
            Circuit::Multilinear(c) => c.to_dag(),
        }
    }

    pub fn expand(&self, budget: &mut Budget) -> Result<SparsePoly> {
        match self {
            Circuit::Dag(c) => c.expand(budget),
            Circuit::Powering(c) => c.expand(budget),
            Circuit::LowDeg(c) => c.expand(budget),
            Circuit::Roabp(c) => c.expand(budget),
            Circuit::Multilinear(c) => c.expand(budget),
        }
    }
}

fn finish_sum(mut dag: CircuitDag, terms: Vec<(usize, FieldElement)>) -> CircuitDag {
    let out = if terms.is_empty() { dag.constant(dag.spec().zero()) } else { dag.add(terms) };
    dag.set_outputs(Vec::from([out]));
    dag
}

/// `base^e` by square-and-multiply.
fn pow_node(dag: &mut CircuitDag, base: usize, e: u32) -> usize {
    if e == 0 {
        return dag.constant(dag.spec().one());
    }
    let mut acc: Option<usize> = None;
    let mut sq = base;
    let mut e = e;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                Some(a) => dag.mul(a, sq),
                None => sq,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        sq = dag.mul(sq, sq);
    }
    acc.unwrap()
}

fn roabp_to_dag(r: &Roabp) -> CircuitDag {
    let spec = r.spec();
    let mut dag = CircuitDag::new(spec, r.nvars());
    let one = dag.constant(spec.one());
    let mut v: BTreeMap<usize, usize> = [(0, one)].into_iter().collect();
    for l in r.layers() {
        let mut pows = Vec::from([one]);
        if let Some(x) = l.var {
            let xi = dag.input(x);
            for _ in 0..l.degree() {
                let last = *pows.last().unwrap();
                pows.push(if last == one { xi } else { dag.mul(last, xi) });
            }
        }
        let mut next: BTreeMap<usize, Vec<(usize, FieldElement)>> = BTreeMap::new();
        for ((i, j), u) in &l.entries {
            let Some(&vi) = v.get(i) else { continue };
            let ch: Vec<(usize, FieldElement)> =
                u.iter().enumerate().filter(|(k, c)| !c.is_zero() && (*k == 0 || l.var.is_some())).map(|(k, c)| (pows[k], c.clone())).collect();
            if ch.is_empty() {
                continue;
            }
            let entry = dag.add(ch);
            let t = dag.mul(vi, entry);
            next.entry(*j).or_default().push((t, spec.one()));
        }
        v = next.into_iter().map(|(j, ch)| (j, dag.add(ch))).collect();
    }
    let out = v.get(&0).copied().unwrap_or_else(|| dag.constant(spec.zero()));
    dag.set_outputs(Vec::from([out]));
    dag
}
