use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{Budget, SparsePoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Input(usize),
    Const(FieldElement),
    /// Weighted sum of earlier nodes.
    Add(Vec<(usize, FieldElement)>),
    Mul(usize, usize),
}

/// Arithmetic circuit as a topologically ordered node list.
///
/// Multiplication has fan-in exactly two; additions carry scalar weights on
/// their wires. Size is the number of wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitDag {
    spec: FieldSpec,
    nvars: usize,
    nodes: Vec<Node>,
    outputs: Vec<usize>,
}

impl CircuitDag {
    pub fn new(spec: FieldSpec, nvars: usize) -> Self {
        CircuitDag { spec, nvars, nodes: Vec::new(), outputs: Vec::new() }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// The first output.
    pub fn output(&self) -> usize {
        self.outputs[0]
    }

    pub fn set_outputs(&mut self, outs: Vec<usize>) {
        self.outputs = outs;
    }

    pub fn set_nvars(&mut self, n: usize) {
        self.nvars = self.nvars.max(n);
    }

    pub fn push(&mut self, node: Node) -> Result<usize> {
        let id = self.nodes.len();
        match &node {
            Node::Input(v) => self.nvars = self.nvars.max(v + 1),
            Node::Const(c) if c.spec() != self.spec => return Err(Error::SpecMismatch),
            Node::Const(_) => {}
            Node::Add(ch) => {
                for (c, w) in ch {
                    if *c >= id {
                        return Err(Error::Precondition(format!("node {id} reads later node {c}")));
                    }
                    if w.spec() != self.spec {
                        return Err(Error::SpecMismatch);
                    }
                }
            }
            Node::Mul(a, b) => {
                if *a >= id || *b >= id {
                    return Err(Error::Precondition(format!("node {id} reads a later node")));
                }
            }
        }
        self.nodes.push(node);
        Ok(id)
    }

    pub fn input(&mut self, v: usize) -> usize {
        self.push(Node::Input(v)).unwrap()
    }

    pub fn constant(&mut self, c: FieldElement) -> usize {
        self.push(Node::Const(c)).expect("constant from another field")
    }

    pub fn add(&mut self, ch: Vec<(usize, FieldElement)>) -> usize {
        self.push(Node::Add(ch)).expect("malformed add")
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        self.push(Node::Mul(a, b)).expect("malformed mul")
    }

    /// Left-leaning chain of fan-in-2 products; a single factor is returned as is.
    pub fn mul_many(&mut self, factors: &[usize]) -> usize {
        assert!(!factors.is_empty(), "empty product");
        let mut acc = factors[0];
        for &f in &factors[1..] {
            acc = self.mul(acc, f);
        }
        acc
    }

    /// Unweighted sum.
    pub fn sum(&mut self, terms: &[usize]) -> usize {
        let one = self.spec.one();
        self.add(terms.iter().map(|&t| (t, one.clone())).collect())
    }

    /// Number of wires.
    pub fn size(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Add(ch) => ch.len(),
                Node::Mul(..) => 2,
                _ => 0,
            })
            .sum()
    }

    /// Wires reachable from the outputs.
    pub fn live_size(&self) -> usize {
        let live = self.live();
        self.nodes
            .iter()
            .zip(live.iter())
            .filter(|(_, &l)| l)
            .map(|(n, _)| match n {
                Node::Add(ch) => ch.len(),
                Node::Mul(..) => 2,
                _ => 0,
            })
            .sum()
    }

    fn live(&self) -> Vec<bool> {
        let mut live = alloc::vec![false; self.nodes.len()];
        for &o in &self.outputs {
            live[o] = true;
        }
        for i in (0..self.nodes.len()).rev() {
            if !live[i] {
                continue;
            }
            match &self.nodes[i] {
                Node::Add(ch) => ch.iter().for_each(|(c, _)| live[*c] = true),
                Node::Mul(a, b) => {
                    live[*a] = true;
                    live[*b] = true;
                }
                _ => {}
            }
        }
        live
    }

    /// Drop nodes not reachable from the outputs, renumbering the rest.
    pub fn prune(&self) -> Self {
        let live = self.live();
        let mut map = alloc::vec![usize::MAX; self.nodes.len()];
        let mut out = CircuitDag::new(self.spec, self.nvars);
        for (i, n) in self.nodes.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let node = match n {
                Node::Add(ch) => Node::Add(ch.iter().map(|(c, w)| (map[*c], w.clone())).collect()),
                Node::Mul(a, b) => Node::Mul(map[*a], map[*b]),
                other => other.clone(),
            };
            map[i] = out.push(node).unwrap();
        }
        out.outputs = self.outputs.iter().map(|&o| map[o]).collect();
        out
    }

    /// Values of every node at `point`.
    pub fn eval_all(&self, point: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let mut vals: Vec<FieldElement> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let v = match n {
                Node::Input(v) => point
                    .get(*v)
                    .cloned()
                    .ok_or_else(|| Error::OutOfRange(format!("no value for variable {v}")))?,
                Node::Const(c) => c.clone(),
                Node::Add(ch) => {
                    let mut acc = self.spec.zero();
                    for (c, w) in ch {
                        acc = acc.try_add(&vals[*c].try_mul(w)?)?;
                    }
                    acc
                }
                Node::Mul(a, b) => vals[*a].try_mul(&vals[*b])?,
            };
            vals.push(v);
        }
        Ok(vals)
    }

    pub fn eval_outputs(&self, point: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let vals = self.eval_all(point)?;
        Ok(self.outputs.iter().map(|&o| vals[o].clone()).collect())
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        Ok(self.eval_outputs(point)?.swap_remove(0))
    }

    /// Polynomials computed by the outputs.
    pub fn expand_outputs(&self, budget: &mut Budget) -> Result<Vec<SparsePoly>> {
        let live = self.live();
        let mut polys: Vec<Option<SparsePoly>> = alloc::vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let p = match n {
                Node::Input(v) => SparsePoly::var(self.spec, self.nvars, *v),
                Node::Const(c) => SparsePoly::constant(self.spec, self.nvars, c.clone()),
                Node::Add(ch) => {
                    let mut acc = SparsePoly::zero(self.spec, self.nvars);
                    for (c, w) in ch {
                        let t = polys[*c].as_ref().unwrap();
                        budget.charge(t.sparsity() as u128)?;
                        acc = acc.try_add(&t.scale(w))?;
                    }
                    acc
                }
                Node::Mul(a, b) => polys[*a].as_ref().unwrap().mul_budgeted(polys[*b].as_ref().unwrap(), budget)?,
            };
            polys[i] = Some(p);
        }
        Ok(self.outputs.iter().map(|&o| polys[o].clone().unwrap()).collect())
    }

    pub fn expand(&self, budget: &mut Budget) -> Result<SparsePoly> {
        Ok(self.expand_outputs(budget)?.swap_remove(0))
    }

    /// Per-node degree upper bound with `weight[v]` for each input variable.
    pub fn degree_bounds(&self, weight: &dyn Fn(usize) -> u64) -> Vec<u64> {
        let mut deg: Vec<u64> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let d = match n {
                Node::Input(v) => weight(*v),
                Node::Const(_) => 0,
                Node::Add(ch) => ch.iter().map(|(c, _)| deg[*c]).max().unwrap_or(0),
                Node::Mul(a, b) => deg[*a].saturating_add(deg[*b]),
            };
            deg.push(d);
        }
        deg
    }

    pub fn degree_bound(&self, weight: &dyn Fn(usize) -> u64) -> u64 {
        let d = self.degree_bounds(weight);
        self.outputs.iter().map(|&o| d[o]).max().unwrap_or(0)
    }

    /// True when every non-leaf node feeds at most one gate.
    pub fn is_formula(&self) -> bool {
        let mut uses = alloc::vec![0usize; self.nodes.len()];
        for n in &self.nodes {
            match n {
                Node::Add(ch) => ch.iter().for_each(|(c, _)| uses[*c] += 1),
                Node::Mul(a, b) => {
                    uses[*a] += 1;
                    uses[*b] += 1;
                }
                _ => {}
            }
        }
        self.nodes
            .iter()
            .zip(uses.iter())
            .all(|(n, &u)| matches!(n, Node::Input(_) | Node::Const(_)) || u <= 1)
    }

    /// Alternation depth of the first output: consecutive gates of the same
    /// kind count as one layer; leaves have depth 0.
    pub fn depth(&self) -> usize {
        // (depth, kind of top gate: 0 leaf, 1 add, 2 mul)
        let mut info: Vec<(usize, u8)> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let (kids, kind): (Vec<usize>, u8) = match n {
                Node::Add(ch) => (ch.iter().map(|(c, _)| *c).collect(), 1),
                Node::Mul(a, b) => (alloc::vec![*a, *b], 2),
                _ => (Vec::new(), 0),
            };
            let d = kids
                .iter()
                .map(|&c| {
                    let (cd, ck) = info[c];
                    if ck == kind {
                        cd
                    } else {
                        cd + 1
                    }
                })
                .max()
                .unwrap_or(0);
            info.push((d, kind));
        }
        self.outputs.first().map(|&o| info[o].0).unwrap_or(0)
    }

    /// Copy of `other` appended to `self`, with input `v` replaced by node
    /// `sub[v]` when present. Returns the mapping of `other`'s node ids.
    pub fn append(&mut self, other: &CircuitDag, sub: &BTreeMap<usize, usize>) -> Result<Vec<usize>> {
        if other.spec != self.spec {
            return Err(Error::SpecMismatch);
        }
        let mut map = Vec::with_capacity(other.nodes.len());
        for n in &other.nodes {
            let id = match n {
                Node::Input(v) => match sub.get(v) {
                    Some(&s) => s,
                    None => self.push(Node::Input(*v))?,
                },
                Node::Const(c) => self.push(Node::Const(c.clone()))?,
                Node::Add(ch) => self.push(Node::Add(ch.iter().map(|(c, w)| (map[*c], w.clone())).collect()))?,
                Node::Mul(a, b) => self.push(Node::Mul(map[*a], map[*b]))?,
            };
            map.push(id);
        }
        Ok(map)
    }

    /// Circuit computing a sparse polynomial term by term.
    pub fn from_poly(p: &SparsePoly) -> Self {
        let mut c = CircuitDag::new(p.spec(), p.nvars());
        let mut inputs: BTreeMap<usize, usize> = BTreeMap::new();
        let mut terms = Vec::new();
        for (m, coef) in p.terms() {
            let mut factors = Vec::new();
            for v in m.support() {
                let x = *inputs.entry(v).or_insert_with(|| c.input(v));
                for _ in 0..m.exp(v) {
                    factors.push(x);
                }
            }
            let t = if factors.is_empty() { c.constant(p.spec().one()) } else { c.mul_many(&factors) };
            terms.push((t, coef.clone()));
        }
        if terms.is_empty() {
            let z = c.constant(p.spec().zero());
            c.outputs = alloc::vec![z];
            return c;
        }
        let out = c.add(terms);
        c.outputs = alloc::vec![out];
        c
    }
}

/// Random circuit over `nvars` inputs with at most `max_wires` wires and
/// total degree at most `max_deg`.
pub fn random_dag<R: Rng + ?Sized>(spec: FieldSpec, nvars: usize, max_wires: usize, max_deg: u64, rng: &mut R) -> CircuitDag {
    let mut c = CircuitDag::new(spec, nvars);
    let mut deg: Vec<u64> = Vec::new();
    for v in 0..nvars {
        c.input(v);
        deg.push(1);
    }
    c.constant(FieldElement::from_i64(spec, rng.gen_range(1..5)));
    deg.push(0);
    let mut wires = 0;
    loop {
        let n = c.nodes.len();
        if rng.gen_bool(0.5) {
            let k = rng.gen_range(2..=3);
            if wires + k > max_wires {
                break;
            }
            let ch: Vec<(usize, FieldElement)> = (0..k)
                .map(|_| {
                    let w = FieldElement::from_i64(spec, rng.gen_range(-3..=3));
                    (rng.gen_range(0..n), if w.is_zero() { spec.one() } else { w })
                })
                .collect();
            let d = ch.iter().map(|(i, _)| deg[*i]).max().unwrap();
            c.add(ch);
            deg.push(d);
            wires += k;
        } else {
            if wires + 2 > max_wires {
                break;
            }
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if deg[a] + deg[b] > max_deg {
                continue;
            }
            c.mul(a, b);
            deg.push(deg[a] + deg[b]);
            wires += 2;
        }
    }
    let last = c.nodes.len() - 1;
    c.outputs = alloc::vec![last];
    c
}
