use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::circuit::CircuitDag;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{Budget, SparsePoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MlKind {
    Var(usize),
    Const(FieldElement),
    /// Weighted sum.
    Add(Vec<(FieldElement, MlNode)>),
    Mul(Vec<MlNode>),
}

/// Formula node with its cached variable support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MlNode {
    kind: MlKind,
    support: BTreeSet<usize>,
}

impl MlNode {
    pub fn var(v: usize) -> Self {
        MlNode { kind: MlKind::Var(v), support: [v].into_iter().collect() }
    }

    pub fn constant(c: FieldElement) -> Self {
        MlNode { kind: MlKind::Const(c), support: BTreeSet::new() }
    }

    pub fn add(children: Vec<(FieldElement, MlNode)>) -> Self {
        let support = children.iter().flat_map(|(_, c)| c.support.iter().copied()).collect();
        MlNode { kind: MlKind::Add(children), support }
    }

    pub fn sum(children: Vec<MlNode>, spec: FieldSpec) -> Self {
        Self::add(children.into_iter().map(|c| (spec.one(), c)).collect())
    }

    pub fn mul(children: Vec<MlNode>) -> Self {
        let support = children.iter().flat_map(|c| c.support.iter().copied()).collect();
        MlNode { kind: MlKind::Mul(children), support }
    }

    /// Affine form `c + Σ a_v x_v` as a depth-one sum.
    pub fn affine(constant: FieldElement, coeffs: &[(usize, FieldElement)]) -> Self {
        let mut ch: Vec<(FieldElement, MlNode)> = coeffs.iter().filter(|(_, a)| !a.is_zero()).map(|(v, a)| (a.clone(), MlNode::var(*v))).collect();
        if !constant.is_zero() || ch.is_empty() {
            let one = constant.spec().one();
            ch.push((one, MlNode::constant(constant)));
        }
        Self::add(ch)
    }

    pub fn kind(&self) -> &MlKind {
        &self.kind
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    fn violation(&self, path: &mut Vec<usize>) -> bool {
        match &self.kind {
            MlKind::Var(_) | MlKind::Const(_) => false,
            MlKind::Add(ch) => ch.iter().enumerate().any(|(i, (_, c))| {
                path.push(i);
                c.violation(path) || {
                    path.pop();
                    false
                }
            }),
            MlKind::Mul(ch) => {
                let mut seen = BTreeSet::new();
                for c in ch {
                    if c.support.iter().any(|v| seen.contains(v)) {
                        return true;
                    }
                    seen.extend(c.support.iter().copied());
                }
                ch.iter().enumerate().any(|(i, c)| {
                    path.push(i);
                    c.violation(path) || {
                        path.pop();
                        false
                    }
                })
            }
        }
    }

    fn product_depth(&self) -> usize {
        match &self.kind {
            MlKind::Var(_) | MlKind::Const(_) => 0,
            MlKind::Add(ch) => ch.iter().map(|(_, c)| c.product_depth()).max().unwrap_or(0),
            MlKind::Mul(ch) => 1 + ch.iter().map(|c| c.product_depth()).max().unwrap_or(0),
        }
    }

    fn size(&self) -> usize {
        match &self.kind {
            MlKind::Var(_) | MlKind::Const(_) => 1,
            MlKind::Add(ch) => ch.iter().map(|(_, c)| c.size()).sum(),
            MlKind::Mul(ch) => ch.iter().map(|c| c.size()).sum(),
        }
    }

    fn eval(&self, point: &[FieldElement], spec: FieldSpec) -> Result<FieldElement> {
        Ok(match &self.kind {
            MlKind::Var(v) => point.get(*v).ok_or_else(|| Error::OutOfRange(format!("no value for variable {v}")))?.clone(),
            MlKind::Const(c) => c.clone(),
            MlKind::Add(ch) => {
                let mut acc = spec.zero();
                for (w, c) in ch {
                    acc = acc.try_add(&w.try_mul(&c.eval(point, spec)?)?)?;
                }
                acc
            }
            MlKind::Mul(ch) => {
                let mut acc = spec.one();
                for c in ch {
                    acc = acc.try_mul(&c.eval(point, spec)?)?;
                }
                acc
            }
        })
    }

    fn expand(&self, spec: FieldSpec, nvars: usize, budget: &mut Budget) -> Result<SparsePoly> {
        Ok(match &self.kind {
            MlKind::Var(v) => SparsePoly::var(spec, nvars, *v),
            MlKind::Const(c) => SparsePoly::constant(spec, nvars, c.clone()),
            MlKind::Add(ch) => {
                let mut acc = SparsePoly::zero(spec, nvars);
                for (w, c) in ch {
                    acc = acc.try_add(&c.expand(spec, nvars, budget)?.scale(w))?;
                }
                acc
            }
            MlKind::Mul(ch) => {
                let mut acc = SparsePoly::one(spec, nvars);
                for c in ch {
                    acc = acc.mul_budgeted(&c.expand(spec, nvars, budget)?, budget)?;
                }
                acc
            }
        })
    }

    fn to_dag(&self, dag: &mut CircuitDag) -> usize {
        match &self.kind {
            MlKind::Var(v) => dag.input(*v),
            MlKind::Const(c) => dag.constant(c.clone()),
            MlKind::Add(ch) => {
                let kids = ch.iter().map(|(w, c)| (c.to_dag(dag), w.clone())).collect();
                dag.add(kids)
            }
            MlKind::Mul(ch) => {
                let kids: Vec<usize> = ch.iter().map(|c| c.to_dag(dag)).collect();
                if kids.is_empty() {
                    dag.constant(dag.spec().one())
                } else {
                    dag.mul_many(&kids)
                }
            }
        }
    }
}

/// Formula whose products have variable-disjoint factors, which makes every
/// gate multilinear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearFormula {
    pub spec: FieldSpec,
    pub nvars: usize,
    pub root: MlNode,
}

impl MultilinearFormula {
    pub fn new(spec: FieldSpec, nvars: usize, root: MlNode) -> Self {
        let nvars = nvars.max(root.support.iter().next_back().map(|v| v + 1).unwrap_or(0));
        MultilinearFormula { spec, nvars, root }
    }

    /// `Ok(())` when every product has disjoint factors, otherwise the child
    /// indices leading from the root to the first offending product.
    pub fn check(&self) -> core::result::Result<(), Vec<usize>> {
        let mut path = Vec::new();
        if self.root.violation(&mut path) {
            Err(path)
        } else {
            Ok(())
        }
    }

    pub fn is_multilinear(&self) -> bool {
        self.check().is_ok()
    }

    /// Largest number of product gates on a root-to-leaf path.
    pub fn product_depth(&self) -> usize {
        self.root.product_depth()
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        self.root.eval(point, self.spec)
    }

    pub fn expand(&self, budget: &mut Budget) -> Result<SparsePoly> {
        self.root.expand(self.spec, self.nvars, budget)
    }

    pub fn to_dag(&self) -> CircuitDag {
        let mut dag = CircuitDag::new(self.spec, self.nvars);
        let out = self.root.to_dag(&mut dag);
        dag.set_outputs(alloc::vec![out]);
        dag
    }
}

/// Random formula whose products only combine disjoint variable sets.
pub fn random_ml_formula<R: rand::Rng + ?Sized>(spec: FieldSpec, vars: &[usize], depth: usize, rng: &mut R) -> MlNode {
    if depth == 0 || vars.len() <= 1 {
        let c = FieldElement::from_i64(spec, rng.gen_range(-3..=3));
        return match vars.first() {
            Some(&v) if rng.gen_bool(0.8) => MlNode::add(alloc::vec![(spec.one(), MlNode::var(v)), (spec.one(), MlNode::constant(c))]),
            _ => MlNode::constant(c),
        };
    }
    if rng.gen_bool(0.5) {
        let cut = rng.gen_range(1..vars.len());
        MlNode::mul(alloc::vec![random_ml_formula(spec, &vars[..cut], depth - 1, rng), random_ml_formula(spec, &vars[cut..], depth - 1, rng)])
    } else {
        let k = rng.gen_range(1..=3);
        let ch = (0..k)
            .map(|_| {
                let w = FieldElement::from_i64(spec, rng.gen_range(1..=4));
                (w, random_ml_formula(spec, vars, depth - 1, rng))
            })
            .collect();
        MlNode::add(ch)
    }
}
