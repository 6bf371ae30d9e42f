use alloc::vec::Vec;
use core::cmp::Ordering;

use super::monomial::Monomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderKind {
    Lex,
    GradedLex,
}

/// A monomial order: lex or graded-lex after ranking variables by `perm`.
///
/// `perm[0]` is the most significant variable. Variables missing from `perm`
/// rank below all listed ones, in increasing id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub perm: Vec<usize>,
}

impl MonomialOrder {
    pub fn lex(perm: Vec<usize>) -> Self {
        MonomialOrder { kind: OrderKind::Lex, perm }
    }

    pub fn graded_lex(perm: Vec<usize>) -> Self {
        MonomialOrder { kind: OrderKind::GradedLex, perm }
    }

    /// Identity-permutation lex on `n` variables.
    pub fn lex_n(n: usize) -> Self {
        Self::lex((0..n).collect())
    }

    pub fn graded_lex_n(n: usize) -> Self {
        Self::graded_lex((0..n).collect())
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        if self.kind == OrderKind::GradedLex {
            match a.degree().cmp(&b.degree()) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        for &v in &self.perm {
            match a.exp(v).cmp(&b.exp(v)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        let n = a.arity().max(b.arity());
        for v in 0..n {
            if self.perm.contains(&v) {
                continue;
            }
            match a.exp(v).cmp(&b.exp(v)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl Default for MonomialOrder {
    fn default() -> Self {
        MonomialOrder::graded_lex(Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lex_vs_graded() {
        let x1 = Monomial::var(0);
        let x2sq = Monomial::var_pow(1, 2);
        assert_eq!(MonomialOrder::lex_n(2).cmp(&x1, &x2sq), Ordering::Greater);
        assert_eq!(MonomialOrder::graded_lex_n(2).cmp(&x1, &x2sq), Ordering::Less);
        let rev = MonomialOrder::lex(vec![1, 0]);
        assert_eq!(rev.cmp(&x1, &Monomial::var(1)), Ordering::Less);
    }

    #[test]
    fn empty_perm_is_identity() {
        let o = MonomialOrder::default();
        let a = Monomial::new(vec![1, 1]);
        let b = Monomial::new(vec![0, 2]);
        assert_eq!(o.cmp(&a, &b), a.cmp(&b));
    }
}
