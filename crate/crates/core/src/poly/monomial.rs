use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Exponent vector indexed by variable id, stored without trailing zeros so
/// that equal monomials compare equal regardless of the ambient arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exps: Vec<u16>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn var(v: usize) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: usize, e: u16) -> Self {
        let mut exps = alloc::vec![0; v + 1];
        exps[v] = e;
        Self::new(exps)
    }

    /// Monomial with exponent one on each listed variable.
    pub fn from_vars(vars: &[usize]) -> Self {
        let mut exps = Vec::new();
        for &v in vars {
            if exps.len() <= v {
                exps.resize(v + 1, 0);
            }
            exps[v] += 1;
        }
        Self::new(exps)
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn exp(&self, v: usize) -> u16 {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest variable id with a nonzero exponent, plus one.
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn ideg(&self) -> u16 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Number of variables with nonzero exponent.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&e| e > 0).count()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (long, short) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        let mut exps = long.0.clone();
        for (e, &s) in exps.iter_mut().zip(short.0.iter()) {
            *e = e.checked_add(s).expect("exponent overflow");
        }
        Monomial(exps)
    }

    pub fn divides(&self, o: &Self) -> bool {
        self.0.len() <= o.0.len() && self.0.iter().zip(o.0.iter()).all(|(a, b)| a <= b)
    }

    /// `o / self`, if `self` divides `o`.
    pub fn quotient_of(&self, o: &Self) -> Option<Self> {
        if !self.divides(o) {
            return None;
        }
        let mut exps = o.0.clone();
        for (e, &s) in exps.iter_mut().zip(self.0.iter()) {
            *e -= s;
        }
        Some(Self::new(exps))
    }

    /// Multilinear shadow: every positive exponent becomes 1.
    pub fn multilinear(&self) -> Self {
        Monomial(self.0.iter().map(|&e| e.min(1)).collect())
    }

    /// Keep only the variables selected by `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self::new(self.0.iter().enumerate().map(|(i, &e)| if keep(i) { e } else { 0 }).collect())
    }

    pub fn with_exp(&self, v: usize, e: u16) -> Self {
        let mut exps = self.0.clone();
        if exps.len() <= v {
            exps.resize(v + 1, 0);
        }
        exps[v] = e;
        Self::new(exps)
    }

    /// Rename variables through `map`; colliding targets add exponents.
    pub fn rename(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut exps: Vec<u16> = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let j = map(i);
            if exps.len() <= j {
                exps.resize(j + 1, 0);
            }
            exps[j] += e;
        }
        Self::new(exps)
    }

    /// Writes the monomial with `name` for each variable; `1` for the unit.
    pub fn write_with(&self, f: &mut dyn fmt::Write, name: &dyn Fn(usize) -> alloc::string::String) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(&name(i))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Graded lexicographic order with x1 > x2 > ... .
impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| lex_cmp(&self.0, &o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub(crate) fn lex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    let n = a.len().max(b.len());
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        match x.cmp(&y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &|i| alloc::format!("x{}", i + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn canonical_trailing_zeros() {
        assert_eq!(Monomial::new(alloc::vec![1, 0, 0]), Monomial::var(0));
        assert_eq!(Monomial::new(alloc::vec![0, 0]), Monomial::one());
    }

    #[test]
    fn measures() {
        let m = Monomial::new(alloc::vec![2, 0, 3]);
        assert_eq!(m.degree(), 5);
        assert_eq!(m.ideg(), 3);
        assert_eq!(m.support_size(), 2);
        assert_eq!(m.to_string(), "x1^2*x3^3");
        assert_eq!(m.multilinear(), Monomial::from_vars(&[0, 2]));
    }

    #[test]
    fn graded_lex() {
        let x1 = Monomial::var(0);
        let x2 = Monomial::var(1);
        assert!(x1 > x2);
        assert!(x2.mul(&x2) > x1);
        assert!(Monomial::one() < x2);
    }

    #[test]
    fn division() {
        let a = Monomial::new(alloc::vec![1, 2]);
        let b = Monomial::new(alloc::vec![2, 3, 1]);
        assert_eq!(a.quotient_of(&b), Some(Monomial::new(alloc::vec![1, 1, 1])));
        assert_eq!(b.quotient_of(&a), None);
    }
}
