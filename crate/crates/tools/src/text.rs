//! Polynomial and circuit text.
//!
//! Polynomials accept `+ - * ^`, parentheses and coefficients written as
//! `a` or `a/b`; emission always uses the flat `coeff*factor*...` form.
//! Circuits use the prefix grammar `(+ e ...)`, `(* a b)`, `(pow e k)` and
//! `(scale c e)`; roABPs have their own block format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ips_core::circuit::roabp::{poly_to_uni, uni_to_poly};
use ips_core::circuit::{Circuit, CircuitDag, Layer, Node, Roabp};
use ips_core::{Error, FieldElement, FieldSpec, Result, SparsePoly, VarLayout};

/// Maps a variable written as `<letter><index>` to its id.
pub trait Names {
    fn resolve(&self, letter: char, index: usize) -> Result<usize>;
    fn name(&self, id: usize) -> String;
}

impl Names for VarLayout {
    fn resolve(&self, letter: char, index: usize) -> Result<usize> {
        self.id(&format!("{letter}{index}"))
    }

    fn name(&self, id: usize) -> String {
        VarLayout::name(self, id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(String),
    Var(char, usize),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(src[s..i].to_string()));
        } else if matches!(c, 'x' | 'y' | 'z') {
            let s = i + 1;
            i = s;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let idx: usize = src[s..i].parse().map_err(|_| Error::Parse(format!("variable '{c}' needs an index")))?;
            out.push(Tok::Var(c, idx));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct PolyParser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    spec: FieldSpec,
    nvars: usize,
    names: &'a dyn Names,
}

impl PolyParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<SparsePoly> {
        let mut acc = SparsePoly::zero(self.spec, self.nvars);
        let mut neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        loop {
            let t = self.term()?;
            acc = if neg { &acc - &t } else { &acc + &t };
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SparsePoly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(e)) => {
                    self.pos += 1;
                    let e: u32 = e.parse().map_err(|_| Error::Parse(format!("exponent '{e}' too large")))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(Error::Parse("'^' needs an unsigned exponent".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SparsePoly> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(a)) => {
                self.pos += 1;
                let mut text = a;
                if self.eat('/') {
                    match self.toks.get(self.pos).cloned() {
                        Some(Tok::Num(d)) => {
                            self.pos += 1;
                            text = format!("{text}/{d}");
                        }
                        _ => return Err(Error::Parse("'/' needs an integer denominator".into())),
                    }
                }
                Ok(SparsePoly::constant(self.spec, self.nvars, self.spec.parse(&text)?))
            }
            Some(Tok::Var(c, i)) => {
                self.pos += 1;
                let id = self.names.resolve(c, i)?;
                if id >= self.nvars {
                    return Err(Error::Parse(format!("variable {c}{i} outside the declared layout")));
                }
                Ok(SparsePoly::var(self.spec, self.nvars, id))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of polynomial".into())),
        }
    }
}

/// Parse a polynomial in `nvars` variables.
pub fn parse_poly(spec: FieldSpec, nvars: usize, names: &dyn Names, src: &str) -> Result<SparsePoly> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut p = PolyParser { toks, pos: 0, spec, nvars, names };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input after token {}", p.pos)));
    }
    Ok(out)
}

pub fn poly_to_text(p: &SparsePoly, names: &dyn Names) -> String {
    p.to_string_with(&|v| names.name(v))
}

/// Variables named freely: `x_i`, then `y_j`, then `z_k`, each block as wide
/// as the largest index used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InferredNames(pub VarLayout);

impl InferredNames {
    pub fn scan(src: &str) -> Result<Self> {
        let mut max = [0usize; 3];
        for t in lex(src)? {
            if let Tok::Var(c, i) = t {
                if i == 0 {
                    return Err(Error::Parse(format!("variable {c}0: indices start at 1")));
                }
                let k = (c as u8 - b'x') as usize;
                max[k] = max[k].max(i);
            }
        }
        Ok(InferredNames(VarLayout::new(max[0], max[1], max[2])))
    }

    pub fn nvars(&self) -> usize {
        self.0.total()
    }

    /// Ids of all variables with the given letter.
    pub fn block(&self, letter: char) -> Vec<usize> {
        let (start, len) = match letter {
            'x' => (0, self.0.nx),
            'y' => (self.0.nx, self.0.ny),
            _ => (self.0.nx + self.0.ny, self.0.nz),
        };
        (start..start + len).collect()
    }
}

impl Names for InferredNames {
    fn resolve(&self, letter: char, index: usize) -> Result<usize> {
        self.0.resolve(letter, index)
    }

    fn name(&self, id: usize) -> String {
        self.0.name(id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

fn sexpr_tokens(src: &str) -> Vec<String> {
    src.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(str::to_string).collect()
}

fn read_sexpr(toks: &[String], pos: &mut usize) -> Result<SExpr> {
    let t = toks.get(*pos).ok_or_else(|| Error::Parse("unexpected end of circuit".into()))?;
    *pos += 1;
    match t.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match toks.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(SExpr::List(items));
                    }
                    Some(_) => items.push(read_sexpr(toks, pos)?),
                    None => return Err(Error::Parse("missing ')' in circuit".into())),
                }
            }
        }
        ")" => Err(Error::Parse("unexpected ')' in circuit".into())),
        _ => Ok(SExpr::Atom(t.clone())),
    }
}

struct DagBuilder<'a> {
    dag: CircuitDag,
    names: &'a dyn Names,
    inputs: BTreeMap<usize, usize>,
}

impl DagBuilder<'_> {
    fn atom(&mut self, a: &str) -> Result<usize> {
        let spec = self.dag.spec();
        let first = a.chars().next().unwrap_or(' ');
        if matches!(first, 'x' | 'y' | 'z') {
            let i: usize = a[1..].parse().map_err(|_| Error::Parse(format!("bad variable '{a}'")))?;
            let v = self.names.resolve(first, i)?;
            if v >= self.dag.nvars() {
                return Err(Error::Parse(format!("variable {a} outside the declared layout")));
            }
            let dag = &mut self.dag;
            return Ok(*self.inputs.entry(v).or_insert_with(|| dag.input(v)));
        }
        let c = FieldElement::parse(spec, a)?;
        Ok(self.dag.constant(c))
    }

    fn expr(&mut self, e: &SExpr) -> Result<usize> {
        let items = match e {
            SExpr::Atom(a) => return self.atom(a),
            SExpr::List(items) => items,
        };
        let head = match items.first() {
            Some(SExpr::Atom(h)) => h.as_str(),
            _ => return Err(Error::Parse("circuit list needs an operator".into())),
        };
        let args = &items[1..];
        match head {
            "+" => {
                if args.is_empty() {
                    return Err(Error::Parse("'+' needs at least one argument".into()));
                }
                let mut ch = Vec::with_capacity(args.len());
                for a in args {
                    ch.push(self.weighted(a)?);
                }
                Ok(self.dag.add(ch))
            }
            "*" => {
                if args.len() != 2 {
                    return Err(Error::Parse(format!("'*' takes two arguments, got {}", args.len())));
                }
                let a = self.expr(&args[0])?;
                let b = self.expr(&args[1])?;
                Ok(self.dag.mul(a, b))
            }
            "pow" => {
                let (base, k) = match args {
                    [b, SExpr::Atom(k)] => (b, k.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent '{k}'")))?),
                    _ => return Err(Error::Parse("'pow' takes an expression and an exponent".into())),
                };
                let b = self.expr(base)?;
                Ok(self.pow(b, k))
            }
            "scale" => {
                let (node, c) = self.weighted(e)?;
                Ok(self.dag.add(vec![(node, c)]))
            }
            _ => Err(Error::Parse(format!("unknown circuit operator '{head}'"))),
        }
    }

    fn weighted(&mut self, e: &SExpr) -> Result<(usize, FieldElement)> {
        if let SExpr::List(items) = e {
            if let Some(SExpr::Atom(h)) = items.first() {
                if h == "scale" {
                    return match &items[1..] {
                        [SExpr::Atom(c), inner] => {
                            let c = FieldElement::parse(self.dag.spec(), c)?;
                            Ok((self.expr(inner)?, c))
                        }
                        _ => Err(Error::Parse("'scale' takes a field element and an expression".into())),
                    };
                }
            }
        }
        Ok((self.expr(e)?, self.dag.spec().one()))
    }

    fn pow(&mut self, base: usize, k: u32) -> usize {
        if k == 0 {
            return self.dag.constant(self.dag.spec().one());
        }
        let mut acc: Option<usize> = None;
        let mut sq = base;
        let mut e = k;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq,
                    Some(a) => self.dag.mul(a, sq),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = self.dag.mul(sq, sq);
        }
        acc.expect("k > 0")
    }
}

/// Parse a prefix circuit over `nvars` variables into a single-output DAG.
pub fn parse_circuit(spec: FieldSpec, nvars: usize, names: &dyn Names, src: &str) -> Result<CircuitDag> {
    let toks = sexpr_tokens(src);
    let mut pos = 0;
    let e = read_sexpr(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(Error::Parse("trailing input after circuit".into()));
    }
    let mut b = DagBuilder { dag: CircuitDag::new(spec, nvars), names, inputs: BTreeMap::new() };
    let out = b.expr(&e)?;
    b.dag.set_outputs(vec![out]);
    Ok(b.dag)
}

/// Largest tree a DAG may unfold to when written as text.
pub const MAX_UNFOLDED_NODES: u128 = 1 << 22;

/// Write the output of `dag` as a prefix expression. Shared subcircuits are
/// repeated, so the DAG must unfold to at most [`MAX_UNFOLDED_NODES`] nodes.
pub fn circuit_to_text(dag: &CircuitDag, names: &dyn Names) -> Result<String> {
    let nodes = dag.nodes();
    let mut tree = vec![0u128; nodes.len()];
    for (i, n) in nodes.iter().enumerate() {
        tree[i] = match n {
            Node::Input(_) | Node::Const(_) => 1,
            Node::Add(ch) => ch.iter().fold(1u128, |a, (c, _)| a.saturating_add(tree[*c])),
            Node::Mul(a, b) => tree[*a].saturating_add(tree[*b]).saturating_add(1),
        };
    }
    let root = dag.output();
    if tree[root] > MAX_UNFOLDED_NODES {
        return Err(Error::Budget { needed: tree[root], limit: MAX_UNFOLDED_NODES });
    }
    let mut out = String::new();
    write_node(dag, root, names, &mut out);
    Ok(out)
}

fn write_node(dag: &CircuitDag, i: usize, names: &dyn Names, out: &mut String) {
    match &dag.nodes()[i] {
        Node::Input(v) => out.push_str(&names.name(*v)),
        Node::Const(c) => {
            let _ = write!(out, "{c}");
        }
        Node::Add(ch) if ch.is_empty() => out.push('0'),
        Node::Add(ch) => {
            out.push_str("(+");
            for (c, w) in ch {
                out.push(' ');
                if w.is_one() {
                    write_node(dag, *c, names, out);
                } else {
                    let _ = write!(out, "(scale {w} ");
                    write_node(dag, *c, names, out);
                    out.push(')');
                }
            }
            out.push(')');
        }
        Node::Mul(a, b) => {
            out.push_str("(* ");
            write_node(dag, *a, names, out);
            out.push(' ');
            write_node(dag, *b, names, out);
            out.push(')');
        }
    }
}

/// `roabp order=<vars> width=<r>`, then per position a `layer <var>` line
/// followed by `<row> <col> <univariate>` entry lines.
pub fn roabp_to_text(r: &Roabp, names: &dyn Names) -> String {
    let var_name = |v: Option<usize>| v.map(|v| names.name(v)).unwrap_or_else(|| "-".into());
    let order: Vec<String> = r.layers().iter().map(|l| var_name(l.var)).collect();
    let mut out = format!("roabp order={} width={}\n", order.join(","), r.width());
    for l in r.layers() {
        let _ = writeln!(out, "layer {}", var_name(l.var));
        let v = l.var.unwrap_or(0);
        for ((i, j), u) in &l.entries {
            let p = uni_to_poly(u, r.spec(), r.nvars().max(v + 1), v);
            let _ = writeln!(out, "{i} {j} {}", poly_to_text(&p, names));
        }
    }
    out
}

fn resolve_name(names: &dyn Names, s: &str) -> Result<Option<usize>> {
    if s == "-" {
        return Ok(None);
    }
    let mut c = s.chars();
    let letter = c.next().ok_or_else(|| Error::Parse("empty variable name".into()))?;
    let idx: usize = c.as_str().parse().map_err(|_| Error::Parse(format!("bad variable '{s}'")))?;
    names.resolve(letter, idx).map(Some)
}

/// Parse the block format written by [`roabp_to_text`].
pub fn parse_roabp(spec: FieldSpec, nvars: usize, names: &dyn Names, src: &str) -> Result<Roabp> {
    let mut lines = src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty roABP".into()))?;
    let mut order: Option<Vec<Option<usize>>> = None;
    let mut width: Option<usize> = None;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("roabp") {
        return Err(Error::Parse("roABP text must start with 'roabp'".into()));
    }
    for kv in parts {
        match kv.split_once('=') {
            Some(("order", o)) => order = Some(o.split(',').map(|s| resolve_name(names, s.trim())).collect::<Result<_>>()?),
            Some(("width", w)) => width = Some(w.parse().map_err(|_| Error::Parse(format!("bad width '{w}'")))?),
            _ => return Err(Error::Parse(format!("unknown roABP header field '{kv}'"))),
        }
    }
    let order = order.ok_or_else(|| Error::Parse("roABP header lacks order=".into()))?;
    let width = width.ok_or_else(|| Error::Parse("roABP header lacks width=".into()))?;
    let mut layers: Vec<Layer> = Vec::new();
    for line in lines {
        if let Some(v) = line.strip_prefix("layer") {
            let var = resolve_name(names, v.trim())?;
            layers.push(match var {
                Some(v) => Layer::new(v, BTreeMap::new()),
                None => Layer { var: None, entries: BTreeMap::new() },
            });
            continue;
        }
        let layer = layers.last_mut().ok_or_else(|| Error::Parse("matrix entry before any 'layer' line".into()))?;
        let mut f = line.splitn(3, char::is_whitespace);
        let (i, j, poly) = match (f.next(), f.next(), f.next()) {
            (Some(i), Some(j), Some(p)) => (i, j, p),
            _ => return Err(Error::Parse(format!("bad matrix entry '{line}'"))),
        };
        let i: usize = i.parse().map_err(|_| Error::Parse(format!("bad row '{i}'")))?;
        let j: usize = j.parse().map_err(|_| Error::Parse(format!("bad column '{j}'")))?;
        if i >= width || j >= width {
            return Err(Error::Parse(format!("entry ({i}, {j}) outside width {width}")));
        }
        let p = parse_poly(spec, nvars, names, poly)?;
        let v = layer.var.unwrap_or(0);
        if p.support_vars().iter().any(|&u| Some(u) != layer.var) {
            return Err(Error::Parse(format!("entry '{poly}' is not univariate in the layer variable")));
        }
        let u = poly_to_uni(&p, v)?;
        if !u.is_empty() {
            layer.entries.insert((i, j), u);
        }
    }
    let got: Vec<Option<usize>> = layers.iter().map(|l| l.var).collect();
    if got != order {
        return Err(Error::Parse("layer variables do not match the header order".into()));
    }
    Roabp::new(spec, nvars, width, layers)
}

/// Proof text: roABPs in block format, everything else as a prefix circuit.
pub fn proof_to_text(c: &Circuit, names: &dyn Names) -> Result<String> {
    match c {
        Circuit::Roabp(r) => Ok(roabp_to_text(r, names)),
        other => circuit_to_text(&other.to_dag(), names),
    }
}

pub fn parse_proof(spec: FieldSpec, nvars: usize, names: &dyn Names, src: &str) -> Result<Circuit> {
    if src.trim_start().starts_with("roabp") {
        parse_roabp(spec, nvars, names, src).map(Circuit::Roabp)
    } else {
        parse_circuit(spec, nvars, names, src).map(Circuit::Dag)
    }
}
