use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::circuit::dag::{CircuitDag, Node};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::poly::Budget;

/// Formula for `c / y^a` built by interpolation in `y`.
///
/// Writing `c = Σ_{i≤d} f_i(x) y^i`, the quotient is
/// `Σ_j c(x, β_j)·u_j(y)` with `β_j = j` and `u_j(y) = Σ_{i≥a} λ_{ij} y^{i−a}`,
/// where `λ` is the inverse Vandermonde matrix of the points. Divisibility
/// and the degree bound are checked by expanding `c`. The result is a
/// formula whenever `c` is.
pub fn divide_by_var_formula(c: &CircuitDag, y: usize, a: u32, d: u32, budget: &mut Budget) -> Result<CircuitDag> {
    let spec = c.spec();
    if !spec.has_elements(d as u128 + 1) {
        return Err(Error::FieldTooSmall { needed: d as u128 + 1, have: spec.size().unwrap_or(0) as u128 });
    }
    let f = c.expand(budget)?;
    if f.var_degree(y) as u32 > d {
        return Err(Error::Precondition(format!("degree in y is {} > {d}", f.var_degree(y))));
    }
    if f.terms().keys().any(|m| m.exp(y) < a as u16) {
        return Err(Error::NotDivisible(format!("y^{a} does not divide the input")));
    }
    let n = d as usize + 1;
    let points: Vec<FieldElement> = (0..n).map(|j| FieldElement::from_u64(spec, j as u64)).collect();
    let vander: Vec<Vec<FieldElement>> = points.iter().map(|b| (0..n).map(|i| b.pow(i as u64)).collect()).collect();
    let mut out = CircuitDag::new(spec, c.nvars().max(y + 1));
    let mut prods = Vec::new();
    for (j, beta) in points.iter().enumerate() {
        let mut e = alloc::vec![spec.zero(); n];
        e[j] = spec.one();
        let col = crate::linalg::solve(vander.clone(), e)?;
        let mut terms = Vec::new();
        for (k, lam) in col.iter().enumerate().skip(a as usize) {
            if lam.is_zero() {
                continue;
            }
            let k = k - a as usize;
            let t = if k == 0 {
                out.constant(spec.one())
            } else {
                let ys: Vec<usize> = (0..k).map(|_| out.input(y)).collect();
                out.mul_many(&ys)
            };
            terms.push((t, lam.clone()));
        }
        if terms.is_empty() {
            continue;
        }
        let u = out.add(terms);
        let b = out.constant(beta.clone());
        let map = out.append(c, &[(y, b)].into_iter().collect())?;
        let cj = map[c.output()];
        prods.push(out.mul(cj, u));
    }
    let root = if prods.is_empty() { out.constant(spec.zero()) } else { out.sum(&prods) };
    out.set_outputs(alloc::vec![root]);
    Ok(out.prune())
}

struct Splitter<'a> {
    src: &'a CircuitDag,
    out: CircuitDag,
    copies: BTreeMap<usize, usize>,
    ones: BTreeMap<usize, ()>,
    y: usize,
    y_node: Option<usize>,
}

impl Splitter<'_> {
    fn one(&mut self) -> usize {
        let id = self.out.constant(self.out.spec().one());
        self.ones.insert(id, ());
        id
    }

    fn y_input(&mut self) -> usize {
        *self.y_node.get_or_insert_with(|| self.out.input(self.y))
    }

    fn mul(&mut self, a: usize, b: usize) -> usize {
        if self.ones.contains_key(&a) {
            b
        } else if self.ones.contains_key(&b) {
            a
        } else {
            self.out.mul(a, b)
        }
    }

    fn mul_opt(&mut self, a: Option<usize>, b: Option<usize>) -> Option<usize> {
        Some(self.mul(a?, b?))
    }

    fn sum(&mut self, terms: Vec<(usize, FieldElement)>) -> Option<usize> {
        match terms.len() {
            0 => None,
            1 if terms[0].1.is_one() => Some(terms[0].0),
            _ => Some(self.out.add(terms)),
        }
    }

    fn sum_unweighted(&mut self, terms: &[Option<usize>]) -> Option<usize> {
        let one = self.out.spec().one();
        let t = terms.iter().flatten().map(|&t| (t, one.clone())).collect();
        self.sum(t)
    }

    /// `Σ_i coeffs[i]·y^i` by Horner's rule.
    fn horner(&mut self, coeffs: &[Option<usize>]) -> Option<usize> {
        let mut acc: Option<usize> = None;
        for g in coeffs.iter().rev() {
            if let Some(a) = acc {
                let y = self.y_input();
                acc = Some(self.mul(a, y));
            }
            acc = self.sum_unweighted(&[acc, *g]);
        }
        acc
    }

    /// Copy of original gate `v` inside the output circuit.
    fn copy(&mut self, v: usize) -> usize {
        if let Some(&c) = self.copies.get(&v) {
            return c;
        }
        let mut stack = alloc::vec![v];
        let mut need = Vec::new();
        while let Some(u) = stack.pop() {
            if self.copies.contains_key(&u) || need.contains(&u) {
                continue;
            }
            need.push(u);
            match &self.src.nodes()[u] {
                Node::Add(ch) => stack.extend(ch.iter().map(|(c, _)| *c)),
                Node::Mul(a, b) => stack.extend([*a, *b]),
                _ => {}
            }
        }
        need.sort_unstable();
        for u in need {
            let id = match &self.src.nodes()[u] {
                Node::Input(x) if *x == self.y => self.y_input(),
                Node::Input(x) => self.out.input(*x),
                Node::Const(c) => self.out.constant(c.clone()),
                Node::Add(ch) => {
                    let kids = ch.iter().map(|(c, w)| (self.copies[c], w.clone())).collect();
                    self.out.add(kids)
                }
                Node::Mul(a, b) => {
                    let (a, b) = (self.copies[a], self.copies[b]);
                    self.out.mul(a, b)
                }
            };
            self.copies.insert(u, id);
        }
        self.copies[&v]
    }
}

/// Split every gate `v` of `c` into gates holding the coefficients of
/// `y^0, ..., y^{a−1}` and the tail `Σ_{i≥a} f_{v,i} y^{i−a}`.
///
/// Output `i < a` of the result is the y-free coefficient of `y^i` in the
/// first output of `c`; output `a` is the tail, which is `c / y^a` when
/// `y^a` divides `c`.
pub fn divide_by_var_circuit(c: &CircuitDag, y: usize, a: u32) -> Result<CircuitDag> {
    let spec = c.spec();
    let a = a as usize;
    if a == 0 {
        return Ok(c.prune());
    }
    let mut s = Splitter {
        src: c,
        out: CircuitDag::new(spec, c.nvars().max(y + 1)),
        copies: BTreeMap::new(),
        ones: BTreeMap::new(),
        y,
        y_node: None,
    };
    let mut low: Vec<Vec<Option<usize>>> = Vec::with_capacity(c.nodes().len());
    let mut tail: Vec<Option<usize>> = Vec::with_capacity(c.nodes().len());
    let mut full_low: BTreeMap<usize, Option<usize>> = BTreeMap::new();
    for (v, node) in c.nodes().iter().enumerate() {
        let mut l: Vec<Option<usize>> = alloc::vec![None; a];
        let t: Option<usize>;
        match node {
            Node::Input(x) if *x == y => match a {
                0 => t = Some(s.y_input()),
                1 => t = Some(s.one()),
                _ => {
                    l[1] = Some(s.one());
                    t = None;
                }
            },
            Node::Input(_) | Node::Const(_) => {
                let g = s.copy(v);
                if a == 0 {
                    t = Some(g);
                } else {
                    l[0] = Some(g);
                    t = None;
                }
            }
            Node::Add(ch) => {
                for (i, slot) in l.iter_mut().enumerate() {
                    let terms = ch.iter().filter_map(|(u, w)| low[*u][i].map(|g| (g, w.clone()))).collect();
                    *slot = s.sum(terms);
                }
                let terms = ch.iter().filter_map(|(u, w)| tail[*u].map(|g| (g, w.clone()))).collect();
                t = s.sum(terms);
            }
            Node::Mul(u, w) => {
                let (u, w) = (*u, *w);
                // products of low parts, split at y^a
                let mut high: Vec<Option<usize>> = alloc::vec![None; a.saturating_sub(1)];
                for k in 0..(2 * a).saturating_sub(1) {
                    let mut terms = Vec::new();
                    for i in k.saturating_sub(a - 1)..=k.min(a - 1) {
                        let p = s.mul_opt(low[u][i], low[w][k - i]);
                        terms.push(p);
                    }
                    let g = s.sum_unweighted(&terms);
                    if k < a {
                        l[k] = g;
                    } else {
                        high[k - a] = g;
                    }
                }
                let h = s.horner(&high);
                let tu_fw = match tail[u] {
                    Some(tu) => {
                        let fw = s.copy(w);
                        Some(s.mul(tu, fw))
                    }
                    None => None,
                };
                let lu_tw = match tail[w] {
                    Some(tw) => {
                        let lu = match full_low.get(&u) {
                            Some(x) => *x,
                            None => {
                                let x = s.horner(&low[u]);
                                full_low.insert(u, x);
                                x
                            }
                        };
                        s.mul_opt(lu, Some(tw))
                    }
                    None => None,
                };
                t = s.sum_unweighted(&[h, tu_fw, lu_tw]);
            }
        }
        low.push(l);
        tail.push(t);
    }
    let o = c.output();
    let mut outs = Vec::with_capacity(a + 1);
    for g in low[o].iter().chain(core::iter::once(&tail[o])) {
        outs.push(match g {
            Some(g) => *g,
            None => s.out.constant(spec.zero()),
        });
    }
    s.out.set_outputs(outs);
    Ok(s.out.prune())
}
