//! Exact coefficients.
//!
//! A [`Scalar`] is an element of ℚ(a): a reduced rational function in one
//! indeterminate `a` over arbitrary-precision rationals. Constants are the
//! common case, so they are stored as machine-word rationals and promoted to
//! big integers only when an operation would overflow.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole: denominator vanishes at a = {0}")]
    Pole(String),
    #[error("cannot parse scalar {input:?} at offset {pos}: {msg}")]
    Parse {
        input: String,
        pos: usize,
        msg: String,
    },
}

/// Dense univariate polynomial, coefficients from low to high degree, no
/// trailing zeros. The zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Poly(Vec<BigRational>);

impl Poly {
    fn zero() -> Self {
        Poly(Vec::new())
    }

    fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly(vec![c])
        }
    }

    fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    fn var() -> Self {
        Poly(vec![BigRational::zero(), BigRational::one()])
    }

    fn trimmed(mut v: Vec<BigRational>) -> Self {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        Poly(v)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("lead of zero polynomial")
    }

    fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(BigRational::zero);
            let b = other.0.get(i).cloned().unwrap_or_else(BigRational::zero);
            out.push(a + b);
        }
        Poly::trimmed(out)
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::trimmed(out)
    }

    fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|x| x * c).collect())
    }

    fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut rem = self.0.clone();
        if rem.len() < d.0.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - d.0.len() + 1];
        let dl = d.lead().clone();
        for k in (0..quot.len()).rev() {
            let c = &rem[k + d.0.len() - 1] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        (Poly::trimmed(quot), Poly::trimmed(rem))
    }

    fn monic(&self) -> Poly {
        let l = self.lead().clone();
        Poly(self.0.iter().map(|c| c / &l).collect())
    }

    fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        if x.is_zero() {
            x
        } else {
            x.monic()
        }
    }

    fn eval(&self, r: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * r + c;
        }
        acc
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = deg == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{}", fmt_rational(&mag))?;
                if deg > 0 {
                    write!(f, "*")?;
                }
            }
            match deg {
                0 => {}
                1 => write!(f, "a")?,
                d => write!(f, "a^{d}")?,
            }
        }
        Ok(())
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A non-constant reduced fraction: coprime numerator and monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct RatFunc {
    num: Poly,
    den: Poly,
}

#[derive(Clone, Debug)]
enum Repr {
    Small(Ratio<i64>),
    Big(BigRational),
    Func(Arc<RatFunc>),
}

/// Element of ℚ(a), always kept in canonical form.
#[derive(Clone, Debug)]
pub struct Scalar(Repr);

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            (Repr::Func(a), Repr::Func(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
            Repr::Func(f) => {
                2u8.hash(state);
                f.hash(state);
            }
        }
    }
}

fn big(r: &Ratio<i64>) -> BigRational {
    BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Small(Ratio::from_integer(0)))
    }

    pub fn one() -> Self {
        Scalar::from_i64(1)
    }

    pub fn from_i64(n: i64) -> Self {
        Scalar(Repr::Small(Ratio::from_integer(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self, ScalarError> {
        if den == 0 {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::from_rational(BigRational::new(num.into(), den.into())))
    }

    pub fn from_rational(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Scalar(Repr::Small(Ratio::new_raw(n, d))),
            _ => Scalar(Repr::Big(r)),
        }
    }

    /// The indeterminate `a` (the identity parameter α or β).
    pub fn param() -> Self {
        Scalar(Repr::Func(Arc::new(RatFunc {
            num: Poly::var(),
            den: Poly::one(),
        })))
    }

    fn from_parts(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Scalar::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let l = den.lead().clone();
        let (num, den) = if l.is_one() {
            (num, den)
        } else {
            let inv = l.recip();
            (num.scale(&inv), den.scale(&inv))
        };
        if den.is_one() {
            if let Some(c) = num.as_constant() {
                return Scalar::from_rational(c);
            }
        }
        Scalar(Repr::Func(Arc::new(RatFunc { num, den })))
    }

    fn parts(&self) -> (Poly, Poly) {
        match &self.0 {
            Repr::Small(r) => (Poly::constant(big(r)), Poly::one()),
            Repr::Big(r) => (Poly::constant(r.clone()), Poly::one()),
            Repr::Func(f) => (f.num.clone(), f.den.clone()),
        }
    }

    /// The constant value, if this scalar does not depend on the parameter.
    pub fn as_rational(&self) -> Option<BigRational> {
        match &self.0 {
            Repr::Small(r) => Some(big(r)),
            Repr::Big(r) => Some(r.clone()),
            Repr::Func(_) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        !matches!(self.0, Repr::Func(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Small(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Small(r) if r.is_one())
    }

    fn binop(
        &self,
        other: &Scalar,
        small: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        bigop: impl Fn(&BigRational, &BigRational) -> BigRational,
        func: impl Fn((Poly, Poly), (Poly, Poly)) -> Scalar,
    ) -> Scalar {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => match small(a, b) {
                Some(r) => Scalar(Repr::Small(r)),
                None => Scalar::from_rational(bigop(&big(a), &big(b))),
            },
            (Repr::Func(_), _) | (_, Repr::Func(_)) => func(self.parts(), other.parts()),
            _ => {
                let a = self.as_rational().unwrap();
                let b = other.as_rational().unwrap();
                Scalar::from_rational(bigop(&a, &b))
            }
        }
    }

    pub fn add_ref(&self, other: &Scalar) -> Scalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        self.binop(
            other,
            |a, b| a.checked_add(b),
            |a, b| a + b,
            |(an, ad), (bn, bd)| {
                if ad == bd {
                    Scalar::from_parts(an.add(&bn), ad)
                } else {
                    Scalar::from_parts(an.mul(&bd).add(&bn.mul(&ad)), ad.mul(&bd))
                }
            },
        )
    }

    pub fn sub_ref(&self, other: &Scalar) -> Scalar {
        self.binop(
            other,
            |a, b| a.checked_sub(b),
            |a, b| a - b,
            |(an, ad), (bn, bd)| Scalar::from_parts(an.mul(&bd).sub(&bn.mul(&ad)), ad.mul(&bd)),
        )
    }

    pub fn mul_ref(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        self.binop(
            other,
            |a, b| a.checked_mul(b),
            |a, b| a * b,
            |(an, ad), (bn, bd)| Scalar::from_parts(an.mul(&bn), ad.mul(&bd)),
        )
    }

    pub fn neg_ref(&self) -> Scalar {
        match &self.0 {
            Repr::Small(r) => match r.numer().checked_neg() {
                Some(n) => Scalar(Repr::Small(Ratio::new_raw(n, *r.denom()))),
                None => Scalar::from_rational(-big(r)),
            },
            Repr::Big(r) => Scalar::from_rational(-r),
            Repr::Func(f) => Scalar(Repr::Func(Arc::new(RatFunc {
                num: f.num.neg(),
                den: f.den.clone(),
            }))),
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Small(r) => match (r.numer().checked_abs(), r.denom().checked_mul(&r.numer().signum())) {
                (Some(n), Some(d)) => Scalar(Repr::Small(Ratio::new_raw(d, n))),
                _ => Scalar::from_rational(big(r).recip()),
            },
            Repr::Big(r) => Scalar::from_rational(r.recip()),
            Repr::Func(f) => Scalar::from_parts(f.den.clone(), f.num.clone()),
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul_ref(&other.inv()?))
    }

    /// Exact evaluation at `a = r`.
    pub fn eval_at(&self, r: &BigRational) -> Result<BigRational, ScalarError> {
        match &self.0 {
            Repr::Small(x) => Ok(big(x)),
            Repr::Big(x) => Ok(x.clone()),
            Repr::Func(f) => {
                let d = f.den.eval(r);
                if d.is_zero() {
                    return Err(ScalarError::Pole(fmt_rational(r)));
                }
                Ok(f.num.eval(r) / d)
            }
        }
    }

    /// Same as [`Scalar::eval_at`] but stays in `Scalar`.
    pub fn specialize(&self, r: &BigRational) -> Result<Scalar, ScalarError> {
        self.eval_at(r).map(Scalar::from_rational)
    }

    /// Total order on constants; parameter-dependent values compare by their
    /// textual form, which is only meant for deterministic output.
    pub fn display_cmp(&self, other: &Scalar) -> Ordering {
        match (self.as_rational(), other.as_rational()) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.to_string().cmp(&other.to_string()),
        }
    }

    /// True when the leading sign of the textual form is negative.
    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_negative(),
            Repr::Big(r) => r.is_negative(),
            Repr::Func(f) => f.num.lead().is_negative(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(r) => write!(f, "{}", fmt_rational(&big(r))),
            Repr::Big(r) => write!(f, "{}", fmt_rational(r)),
            Repr::Func(rf) => {
                write!(f, "(")?;
                rf.num.write(f)?;
                write!(f, ")")?;
                if !rf.den.is_one() {
                    write!(f, "/(")?;
                    rf.den.write(f)?;
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$imp(rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$imp(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$imp(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_i64(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_rational(r)
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    /// Accepts integer arithmetic in the parameter `a` with `+ - * / ^` and
    /// parentheses, e.g. `-3/4`, `a`, `(a)/(a + 1)`, `1/(a+1)^2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = ScalarParser {
            src: s,
            chars: s.char_indices().collect(),
            pos: 0,
        };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(v)
    }
}

struct ScalarParser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl ScalarParser<'_> {
    fn error(&self, msg: &str) -> ScalarError {
        let off = self.chars.get(self.pos).map_or(self.src.len(), |c| c.0);
        ScalarError::Parse {
            input: self.src.to_string(),
            pos: off,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == '*' {
                acc * rhs
            } else {
                acc.checked_div(&rhs)?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e = e
                .to_u32()
                .ok_or_else(|| self.error("exponent must be a small non-negative integer"))?;
            let mut acc = Scalar::one();
            for _ in 0..e {
                acc = acc * &base;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, ScalarError> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        Ok(digits.parse().expect("digits parse as integer"))
    }

    fn atom(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some('a') => {
                self.pos += 1;
                Ok(Scalar::param())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Scalar::from_rational(BigRational::from_integer(n)))
            }
            _ => Err(self.error("expected a number, 'a' or '('")),
        }
    }
}

/// Parses a plain rational such as `2/3` or `-5`.
pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let v: Scalar = s.parse()?;
    v.as_rational().ok_or_else(|| ScalarError::Parse {
        input: s.to_string(),
        pos: 0,
        msg: "expected a rational constant".into(),
    })
}
