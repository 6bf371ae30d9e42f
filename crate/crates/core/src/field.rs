//! Coefficient fields: word-size prime fields and exact rationals.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Largest modulus accepted for prime fields.
pub const MAX_PRIME: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Prime(u64),
    Rational,
}

impl FieldSpec {
    /// F_p, rejecting composite or oversized moduli.
    pub fn prime(p: u64) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn rational() -> Self {
        FieldSpec::Rational
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Prime(p) => *p,
            FieldSpec::Rational => 0,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn size(&self) -> Option<u64> {
        match self {
            FieldSpec::Prime(p) => Some(*p),
            FieldSpec::Rational => None,
        }
    }

    /// True iff the field has at least `k` elements.
    pub fn has_elements(&self, k: u128) -> bool {
        match self {
            FieldSpec::Prime(p) => (*p as u128) >= k,
            FieldSpec::Rational => true,
        }
    }

    /// True iff the characteristic is 0 or exceeds `bound`.
    pub fn characteristic_guard(&self, bound: u64) -> bool {
        match self {
            FieldSpec::Prime(p) => *p > bound,
            FieldSpec::Rational => true,
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(*self)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::one(*self)
    }

    pub fn int(&self, v: i64) -> FieldElement {
        FieldElement::from_i64(*self, v)
    }

    pub fn parse(&self, s: &str) -> Result<FieldElement> {
        FieldElement::parse(*self, s)
    }

    /// Textual form used in files and on the command line.
    pub fn describe(&self) -> String {
        match self {
            FieldSpec::Prime(p) => format!("p={p}"),
            FieldSpec::Rational => "rational".to_string(),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(p as i128) as u64)
}

/// A field element in canonical form.
///
/// Prime-field values are residues in `[0, p)`; rationals are reduced with a
/// positive denominator, so derived equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Prime { v: u64, p: u64 },
    Rational(BigRational),
}

impl FieldElement {
    pub fn zero(spec: FieldSpec) -> Self {
        Self::from_i64(spec, 0)
    }

    pub fn one(spec: FieldSpec) -> Self {
        Self::from_i64(spec, 1)
    }

    pub fn from_i64(spec: FieldSpec, v: i64) -> Self {
        match spec {
            FieldSpec::Prime(p) => FieldElement::Prime { v: (v as i128).rem_euclid(p as i128) as u64, p },
            FieldSpec::Rational => FieldElement::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_u64(spec: FieldSpec, v: u64) -> Self {
        match spec {
            FieldSpec::Prime(p) => FieldElement::Prime { v: v % p, p },
            FieldSpec::Rational => FieldElement::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_bigint(spec: FieldSpec, v: &BigInt) -> Self {
        match spec {
            FieldSpec::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                FieldElement::Prime { v: r.to_u64().unwrap_or(0), p }
            }
            FieldSpec::Rational => FieldElement::Rational(BigRational::from_integer(v.clone())),
        }
    }

    /// `num/den` embedded in the field.
    pub fn from_ratio(spec: FieldSpec, num: i64, den: i64) -> Result<Self> {
        Self::from_i64(spec, num).try_div(&Self::from_i64(spec, den))
    }

    pub fn spec(&self) -> FieldSpec {
        match self {
            FieldElement::Prime { p, .. } => FieldSpec::Prime(*p),
            FieldElement::Rational(_) => FieldSpec::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Prime { v, .. } => *v == 0,
            FieldElement::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Prime { v, .. } => *v == 1,
            FieldElement::Rational(r) => r.is_one(),
        }
    }

    /// Residue for prime fields.
    pub fn residue(&self) -> Option<u64> {
        match self {
            FieldElement::Prime { v, .. } => Some(*v),
            FieldElement::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rational(r) => Some(r),
            FieldElement::Prime { .. } => None,
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (FieldElement::Prime { v: a, p }, FieldElement::Prime { v: b, p: q }) if p == q => {
                let s = a + b;
                Ok(FieldElement::Prime { v: if s >= *p { s - p } else { s }, p: *p })
            }
            (FieldElement::Rational(a), FieldElement::Rational(b)) => Ok(FieldElement::Rational(a + b)),
            _ => Err(Error::SpecMismatch),
        }
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (FieldElement::Prime { v: a, p }, FieldElement::Prime { v: b, p: q }) if p == q => {
                Ok(FieldElement::Prime { v: if a >= b { a - b } else { a + p - b }, p: *p })
            }
            (FieldElement::Rational(a), FieldElement::Rational(b)) => Ok(FieldElement::Rational(a - b)),
            _ => Err(Error::SpecMismatch),
        }
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (FieldElement::Prime { v: a, p }, FieldElement::Prime { v: b, p: q }) if p == q => {
                Ok(FieldElement::Prime { v: mul_mod(*a, *b, *p), p: *p })
            }
            (FieldElement::Rational(a), FieldElement::Rational(b)) => Ok(FieldElement::Rational(a * b)),
            _ => Err(Error::SpecMismatch),
        }
    }

    pub fn try_div(&self, o: &Self) -> Result<Self> {
        self.try_mul(&o.inv()?)
    }

    pub fn inv(&self) -> Result<Self> {
        match self {
            FieldElement::Prime { v, p } => inv_mod(*v, *p)
                .map(|v| FieldElement::Prime { v, p: *p })
                .ok_or(Error::DivisionByZero),
            FieldElement::Rational(r) => {
                if r.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(FieldElement::Rational(r.recip()))
                }
            }
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        match self {
            FieldElement::Prime { v, p } => FieldElement::Prime { v: pow_mod(*v, e, *p), p: *p },
            FieldElement::Rational(r) => {
                let mut acc = BigRational::one();
                let mut b = r.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = &acc * &b;
                    }
                    e >>= 1;
                    if e > 0 {
                        b = &b * &b;
                    }
                }
                FieldElement::Rational(acc)
            }
        }
    }

    /// Uniform element for prime fields; for the rationals an integer in `[0, bound)`.
    pub fn random<R: Rng + ?Sized>(spec: FieldSpec, rng: &mut R, bound: u64) -> Self {
        match spec {
            FieldSpec::Prime(p) => FieldElement::Prime { v: rng.gen_range(0..p), p },
            FieldSpec::Rational => Self::from_u64(spec, rng.gen_range(0..bound.max(1))),
        }
    }

    /// Parse `a`, `-a`, or `a/b`. Prime fields reduce integers and fractions mod p.
    pub fn parse(spec: FieldSpec, s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad field element '{s}'"));
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let parse_int = |t: &str| -> Result<BigInt> {
            let digits = t.strip_prefix('-').or_else(|| t.strip_prefix('+')).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<BigInt>().map_err(|_| bad())
        };
        let n = Self::from_bigint(spec, &parse_int(num)?);
        match den {
            None => Ok(n),
            Some(d) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                n.try_div(&Self::from_bigint(spec, &d))
            }
        }
    }

    /// True for rationals that are negative; prime residues never are.
    pub fn is_negative(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_negative(),
            FieldElement::Prime { .. } => false,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Prime { v, .. } => write!(f, "{v}"),
            FieldElement::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $tm:ident, $atr:ident, $am:ident) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                self.$tm(o).expect("field spec mismatch")
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$tm(&o).expect("field spec mismatch")
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                (&self).$tm(o).expect("field spec mismatch")
            }
        }
        impl<'a> $atr<&'a FieldElement> for FieldElement {
            fn $am(&mut self, o: &FieldElement) {
                *self = (&*self).$tm(o).expect("field spec mismatch");
            }
        }
        impl $atr<FieldElement> for FieldElement {
            fn $am(&mut self, o: FieldElement) {
                *self = (&*self).$tm(&o).expect("field spec mismatch");
            }
        }
    };
}

binop!(Add, add, try_add, AddAssign, add_assign);
binop!(Sub, sub, try_sub, SubAssign, sub_assign);
binop!(Mul, mul, try_mul, MulAssign, mul_assign);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Prime { v, p } => FieldElement::Prime { v: if *v == 0 { 0 } else { p - v }, p: *p },
            FieldElement::Rational(r) => FieldElement::Rational(-r),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}
