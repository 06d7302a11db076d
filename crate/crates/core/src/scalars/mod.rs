//! Exact coefficients: the rationals and the rational-function field ℚ(k)
//! in the level `k`.

mod parse;
mod poly;

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub use parse::parse_scalar;
pub use poly::Poly;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("pole at k = {0}")]
    Pole(Rational),
    #[error("scalar parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },
}

/// Exact coefficient domain used by the OPE engine.
///
/// Implemented by [`Rational`] (a fixed numeric level) and [`Scalar`]
/// (symbolic level). Floats are deliberately excluded: every check in this
/// crate is an exact equality of canonical forms.
pub trait Coefficient:
    Clone
    + fmt::Debug
    + fmt::Display
    + Eq
    + Hash
    + Ord
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_rational(r: Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    /// The value if it is a constant integer.
    fn integer_part(&self) -> Option<BigInt>;

    /// Whether the value is independent of the level.
    fn is_constant(&self) -> bool;

    /// The level `k` itself, when the domain contains it.
    fn level() -> Option<Self> {
        None
    }

    /// Text usable as the left operand of `*` in the expression grammar.
    fn factor_string(&self) -> String {
        let s = self.to_string();
        if s[1..].contains(['+', '-']) {
            format!("({s})")
        } else {
            s
        }
    }
}

impl Coefficient for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }

    fn integer_part(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.to_integer())
    }

    fn is_constant(&self) -> bool {
        true
    }
}

/// Element of ℚ(k) in canonical form: the denominator is monic and coprime
/// to the numerator, so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    /// Canonical representative of `num / den`.
    pub fn normalize(num: Poly, den: Poly) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(Self::normalize_unchecked(num, den))
    }

    fn normalize_unchecked(num: Poly, den: Poly) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        if den.is_constant() {
            let c = den.leading().recip();
            return Scalar { num: num.scale(&c), den: Poly::one() };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let l = den.leading().recip();
        Scalar { num: num.scale(&l), den: den.scale(&l) }
    }

    pub fn from_poly(p: Poly) -> Scalar {
        Scalar { num: p, den: Poly::one() }
    }

    pub fn rational(r: Rational) -> Scalar {
        Scalar::from_poly(Poly::constant(r))
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::rational(Rational::from_integer(n.into()))
    }

    pub fn frac(a: i64, b: i64) -> Scalar {
        Scalar::rational(Rational::new(a.into(), b.into()))
    }

    /// The level `k`.
    pub fn k() -> Scalar {
        Scalar::from_poly(Poly::var())
    }

    /// `k + c`, the common shape of shifted levels.
    pub fn k_plus(c: i64) -> Scalar {
        Scalar::k() + Scalar::int(c)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        Scalar::normalize(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> Result<Scalar, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        Ok(Scalar::normalize_unchecked(base.num.pow(e.unsigned_abs()), base.den.pow(e.unsigned_abs())))
    }

    /// Exact evaluation at `k = k0`.
    pub fn eval(&self, k0: &Rational) -> Result<Rational, ScalarError> {
        let d = self.den.eval(k0);
        if d.is_zero() {
            return Err(ScalarError::Pole(k0.clone()));
        }
        Ok(self.num.eval(k0) / d)
    }

    /// The constant value, if the scalar does not depend on `k`.
    pub fn as_rational(&self) -> Option<Rational> {
        (self.num.is_constant() && self.den.is_one()).then(|| self.num.constant_term())
    }

    fn write_numerator(&self, out: &mut String, product_context: bool) -> fmt::Result {
        use fmt::Write;
        let num = &self.num;
        if num.term_count() <= 1 {
            return num.write_expanded(out);
        }
        let lc = num.leading();
        let monic = num.monic();
        if lc.is_one() {
            if product_context {
                out.push('(');
                monic.write_expanded(out)?;
                out.push(')');
                return Ok(());
            }
            return monic.write_expanded(out);
        }
        if lc == -Rational::one() {
            out.push('-');
        } else {
            write!(out, "{lc}*")?;
        }
        out.push('(');
        monic.write_expanded(out)?;
        out.push(')');
        Ok(())
    }

    fn render(&self, product_context: bool) -> String {
        let mut s = String::new();
        if self.den.is_one() {
            self.write_numerator(&mut s, product_context).unwrap();
            return s;
        }
        self.write_numerator(&mut s, true).unwrap();
        s.push('/');
        if self.den.term_count() > 1 {
            s.push('(');
            self.den.write_expanded(&mut s).unwrap();
            s.push(')');
        } else {
            self.den.write_expanded(&mut s).unwrap();
        }
        s
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar { num: Poly::one(), den: Poly::one() }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.den == rhs.den {
            let num = self.num.add(&rhs.num);
            if self.den.is_one() {
                return Scalar { num, den: Poly::one() };
            }
            return Scalar::normalize_unchecked(num, self.den.clone());
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        Scalar::normalize_unchecked(num, self.den.mul(&rhs.den))
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self + &(-rhs)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: self.num.mul(&rhs.num), den: Poly::one() };
        }
        if rhs.num.is_constant() && rhs.den.is_one() {
            return Scalar { num: self.num.scale(&rhs.num.constant_term()), den: self.den.clone() };
        }
        if self.num.is_constant() && self.den.is_one() {
            return Scalar { num: rhs.num.scale(&self.num.constant_term()), den: rhs.den.clone() };
        }
        Scalar::normalize_unchecked(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Div for Scalar {
    type Output = Scalar;
    /// Panics on division by zero, like the integer types; use
    /// [`Scalar::inv`] for a fallible inverse.
    fn div(self, rhs: Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        &self * &inv
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::rational(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl std::str::FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scalar(s)
    }
}

impl Coefficient for Scalar {
    fn from_rational(r: Rational) -> Self {
        Scalar::rational(r)
    }

    fn integer_part(&self) -> Option<BigInt> {
        self.as_rational().and_then(|r| r.is_integer().then(|| r.to_integer()))
    }

    fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    fn factor_string(&self) -> String {
        self.render(true)
    }

    fn level() -> Option<Self> {
        Some(Scalar::k())
    }
}

/// Canonical representative of `num / den`.
pub fn scalar_normalize(num: Poly, den: Poly) -> Result<Scalar, ScalarError> {
    Scalar::normalize(num, den)
}

/// Exact evaluation at `k = k0`; errors at a pole.
pub fn scalar_eval(s: &Scalar, k0: &Rational) -> Result<Rational, ScalarError> {
    s.eval(k0)
}

/// The integer value of a constant integer scalar.
pub fn integer_part(s: &Scalar) -> Option<BigInt> {
    s.integer_part()
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Generalized binomial coefficient `C(m, j)` for any integer `m`.
pub fn binomial(m: i64, j: u32) -> Rational {
    let mut num = BigInt::one();
    for t in 0..j as i64 {
        num *= BigInt::from(m - t);
    }
    Rational::new(num, factorial(j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn cancels_common_factors() {
        assert_eq!(s("(k^2+4*k+4)/(k+2)"), s("k+2"));
        assert_eq!(s("0/(k+4)"), Scalar::zero());
        let c = s("-3*k*(2*k+3)/(k+4)");
        assert!(c.denominator() == &s("k+4").numerator().clone());
    }

    #[test]
    fn evaluation() {
        let one = Rational::one();
        assert_eq!(s("k+2").eval(&-one.clone()).unwrap(), one);
        assert_eq!(s("-3*k*(2*k+3)/(k+4)").eval(&Rational::zero()).unwrap(), Rational::zero());
        let pole = s("1/(k+4)").eval(&Rational::from_integer((-4).into()));
        assert!(matches!(pole, Err(ScalarError::Pole(_))));
    }

    #[test]
    fn integer_parts() {
        assert_eq!(integer_part(&Scalar::one()), Some(BigInt::one()));
        assert_eq!(integer_part(&s("-1/(k+4)")), None);
        assert_eq!(integer_part(&s("(2*k+8)/(k+4)")), Some(BigInt::from(2)));
        assert_eq!(integer_part(&s("1/2")), None);
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "2*(k+4)",
            "-3*k*(2*k+3)/(k+4)",
            "-1/(k+4)",
            "3/4",
            "k+2",
            "-(k+1)",
            "(5*k+16)/8",
            "k^2/(k^2+1)",
            "-k/(k+4)",
            "7/(3*k)",
        ] {
            let v = s(text);
            let printed = v.to_string();
            assert_eq!(s(&printed), v, "{text} printed as {printed}");
        }
        assert_eq!(s("2*k+8").to_string(), "2*(k+4)");
        assert_eq!(s("-1/(k+4)").to_string(), "-1/(k+4)");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), Rational::from_integer(10.into()));
        assert_eq!(binomial(-1, 3), Rational::from_integer((-1).into()));
        assert_eq!(binomial(2, 3), Rational::zero());
    }
}
