//! Text form of field expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' '-'? integer)?
//! atom    := integer | 'k' | name | '(' expr ')'
//!          | 'der' '(' integer ',' expr ')' | 'no' '(' expr ',' expr ')'
//!          | 'vop' '{' name ':' expr (',' name ':' expr)* '}'
//! ```
//!
//! Products and quotients need a scalar on at least one side; the normally
//! ordered product of two fields is written `no(X, Y)`.

use std::fmt::Write;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use super::engine::Engine;
use super::expr::{ExponentVector, FieldExpr, Monomial};
use super::lambda::OpeResult;
use super::presentation::Presentation;
use crate::error::{Error, Result};
use crate::scalars::{Coefficient, Rational};

/// Unreduced expression tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawExpr<C> {
    Scalar(C),
    Gen(String),
    Der(u32, Box<RawExpr<C>>),
    No(Box<RawExpr<C>>, Box<RawExpr<C>>),
    Vop(Vec<(String, C)>),
    Sum(Vec<RawExpr<C>>),
    Scale(C, Box<RawExpr<C>>),
}

impl<C: Coefficient> RawExpr<C> {
    pub fn gen(name: &str) -> Self {
        RawExpr::Gen(name.to_string())
    }

    pub fn der(n: u32, x: RawExpr<C>) -> Self {
        RawExpr::Der(n, Box::new(x))
    }

    pub fn no(x: RawExpr<C>, y: RawExpr<C>) -> Self {
        RawExpr::No(Box::new(x), Box::new(y))
    }

    pub fn scale(c: C, x: RawExpr<C>) -> Self {
        RawExpr::Scale(c, Box::new(x))
    }
}

pub fn parse_raw<C: Coefficient>(text: &str) -> Result<RawExpr<C>> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses and canonicalizes in one step.
pub fn parse_expr<C: Coefficient>(engine: &Engine<'_, C>, text: &str) -> Result<FieldExpr<C>> {
    canonicalize(engine, &parse_raw(text)?)
}

pub fn canonicalize<C: Coefficient>(engine: &Engine<'_, C>, raw: &RawExpr<C>) -> Result<FieldExpr<C>> {
    let pres = engine.presentation();
    Ok(match raw {
        RawExpr::Scalar(c) => FieldExpr::scalar(c.clone()),
        RawExpr::Gen(name) => FieldExpr::generator(pres.id(name)?),
        RawExpr::Der(n, x) => engine.derivative_pow(&canonicalize(engine, x)?, *n)?,
        RawExpr::No(x, y) => engine.normal_order(&canonicalize(engine, x)?, &canonicalize(engine, y)?)?,
        RawExpr::Vop(entries) => FieldExpr::exponential(exponent(pres, entries)?),
        RawExpr::Sum(items) => {
            let mut out = FieldExpr::zero();
            for it in items {
                out.add_scaled(&canonicalize(engine, it)?, &C::one());
            }
            out
        }
        RawExpr::Scale(c, x) => canonicalize(engine, x)?.scale(c),
    })
}

/// Canonicalizes with a random rewrite order: sums are visited in shuffled
/// order, derivatives of normally ordered products are sometimes pushed
/// inside by Leibniz, and sums inside `no` are sometimes distributed first.
/// Any schedule must produce the same result as [`canonicalize`].
pub fn canonicalize_randomized<C: Coefficient, R: Rng>(
    engine: &Engine<'_, C>,
    raw: &RawExpr<C>,
    rng: &mut R,
) -> Result<FieldExpr<C>> {
    Ok(match raw {
        RawExpr::Scalar(_) | RawExpr::Gen(_) | RawExpr::Vop(_) => canonicalize(engine, raw)?,
        RawExpr::Der(n, x) => match (&**x, *n > 0 && rng.gen_bool(0.5)) {
            (RawExpr::No(a, b), true) => {
                let inner = RawExpr::Sum(vec![
                    RawExpr::no(RawExpr::der(1, (**a).clone()), (**b).clone()),
                    RawExpr::no((**a).clone(), RawExpr::der(1, (**b).clone())),
                ]);
                canonicalize_randomized(engine, &RawExpr::der(n - 1, inner), rng)?
            }
            _ => engine.derivative_pow(&canonicalize_randomized(engine, x, rng)?, *n)?,
        },
        RawExpr::No(x, y) => {
            if let (RawExpr::Sum(items), true) = (&**x, rng.gen_bool(0.5)) {
                let split = items.iter().map(|it| RawExpr::no(it.clone(), (**y).clone())).collect();
                canonicalize_randomized(engine, &RawExpr::Sum(split), rng)?
            } else {
                let a = canonicalize_randomized(engine, x, rng)?;
                let b = canonicalize_randomized(engine, y, rng)?;
                engine.normal_order(&a, &b)?
            }
        }
        RawExpr::Sum(items) => {
            let mut order: Vec<usize> = (0..items.len()).collect();
            order.shuffle(rng);
            let mut out = FieldExpr::zero();
            for i in order {
                out.add_scaled(&canonicalize_randomized(engine, &items[i], rng)?, &C::one());
            }
            out
        }
        RawExpr::Scale(c, x) => canonicalize_randomized(engine, x, rng)?.scale(c),
    })
}

fn exponent<C: Coefficient>(pres: &Presentation<C>, entries: &[(String, C)]) -> Result<ExponentVector<C>> {
    let mut out = Vec::with_capacity(entries.len());
    for (name, c) in entries {
        let g = pres.id(name)?;
        if !pres.is_direction(g) {
            return Err(Error::ExponentPosition(format!("`{name}` is not an exponent direction")));
        }
        out.push((g, c.clone()));
    }
    Ok(ExponentVector::new(out))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { offset: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr<C: Coefficient>(&mut self) -> Result<RawExpr<C>> {
        let mut items = vec![self.term()?];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    items.push(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    items.push(negate(t));
                }
                _ => break,
            }
        }
        if items.len() == 1 {
            return Ok(items.pop().unwrap());
        }
        if items.iter().all(|i| matches!(i, RawExpr::Scalar(_))) {
            let mut acc = C::zero();
            for i in items {
                if let RawExpr::Scalar(c) = i {
                    acc = acc + c;
                }
            }
            return Ok(RawExpr::Scalar(acc));
        }
        Ok(RawExpr::Sum(items))
    }

    fn term<C: Coefficient>(&mut self) -> Result<RawExpr<C>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let at = self.pos;
                    let rhs = self.unary()?;
                    acc = match (acc, rhs) {
                        (RawExpr::Scalar(a), RawExpr::Scalar(b)) => RawExpr::Scalar(a * b),
                        (RawExpr::Scalar(a), x) | (x, RawExpr::Scalar(a)) => RawExpr::scale(a, x),
                        _ => {
                            return Err(Error::Parse {
                                offset: at,
                                msg: "product of two fields; write no(X, Y)".into(),
                            })
                        }
                    };
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let rhs: RawExpr<C> = self.unary()?;
                    let d = match rhs {
                        RawExpr::Scalar(d) if !d.is_zero() => d,
                        RawExpr::Scalar(_) => {
                            return Err(Error::Parse { offset: at, msg: "division by zero".into() })
                        }
                        _ => return Err(Error::Parse { offset: at, msg: "division by a field".into() }),
                    };
                    let inv = C::one() / d;
                    acc = match acc {
                        RawExpr::Scalar(a) => RawExpr::Scalar(a * inv),
                        x => RawExpr::scale(inv, x),
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary<C: Coefficient>(&mut self) -> Result<RawExpr<C>> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(negate(self.unary()?))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power<C: Coefficient>(&mut self) -> Result<RawExpr<C>> {
        let at = self.pos;
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let RawExpr::Scalar(b) = base else {
            return Err(Error::Parse { offset: at, msg: "only scalars can be raised to powers".into() });
        };
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let e_at = self.pos;
        let e: u32 = self
            .integer()?
            .try_into()
            .map_err(|_| Error::Parse { offset: e_at, msg: "exponent too large".into() })?;
        let mut acc = C::one();
        for _ in 0..e {
            acc = acc * b.clone();
        }
        if neg {
            if acc.is_zero() {
                return Err(Error::Parse { offset: e_at, msg: "division by zero".into() });
            }
            acc = C::one() / acc;
        }
        Ok(RawExpr::Scalar(acc))
    }

    fn atom<C: Coefficient>(&mut self) -> Result<RawExpr<C>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RawExpr::Scalar(C::from_rational(Rational::from_integer(n))))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let at = self.pos;
                let name = self.name()?;
                match name.as_str() {
                    "k" => C::level()
                        .map(RawExpr::Scalar)
                        .ok_or_else(|| Error::Parse { offset: at, msg: "the level k is not available here".into() }),
                    "der" if self.peek() == Some(b'(') => {
                        self.pos += 1;
                        let n_at = self.pos;
                        let n: u32 = self
                            .integer()?
                            .try_into()
                            .map_err(|_| Error::Parse { offset: n_at, msg: "derivative order too large".into() })?;
                        self.expect(b',')?;
                        let x = self.expr()?;
                        self.expect(b')')?;
                        Ok(RawExpr::der(n, x))
                    }
                    "no" if self.peek() == Some(b'(') => {
                        self.pos += 1;
                        let x = self.expr()?;
                        self.expect(b',')?;
                        let y = self.expr()?;
                        self.expect(b')')?;
                        Ok(RawExpr::no(x, y))
                    }
                    "vop" if self.peek() == Some(b'{') => {
                        self.pos += 1;
                        let mut entries = Vec::new();
                        loop {
                            self.skip_ws();
                            let name = self.name()?;
                            self.expect(b':')?;
                            let c_at = self.pos;
                            let RawExpr::Scalar(c) = self.expr()? else {
                                return Err(Error::Parse { offset: c_at, msg: "exponent entries must be scalars".into() });
                            };
                            entries.push((name, c));
                            match self.peek() {
                                Some(b',') => self.pos += 1,
                                Some(b'}') => {
                                    self.pos += 1;
                                    break;
                                }
                                _ => return Err(self.error("expected ',' or '}'")),
                            }
                        }
                        Ok(RawExpr::Vop(entries))
                    }
                    _ => Ok(RawExpr::Gen(name)),
                }
            }
            _ => Err(self.error("expected a number, a name or '('")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("validated digits"))
    }

    /// Identifier with an optional bracketed index such as `B[1,2]` or
    /// `P[1,+]`.
    fn name(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos || self.src[start].is_ascii_digit() {
            self.pos = start;
            return Err(self.error("expected a name"));
        }
        if self.src.get(self.pos) == Some(&b'[') {
            while self.pos < self.src.len() && self.src[self.pos] != b']' {
                let c = self.src[self.pos];
                if !(c.is_ascii_alphanumeric() || b"[,+- _".contains(&c)) {
                    return Err(self.error("invalid character in index"));
                }
                self.pos += 1;
            }
            if self.pos == self.src.len() {
                return Err(self.error("unterminated index"));
            }
            self.pos += 1;
        }
        let raw = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii name");
        Ok(raw.chars().filter(|c| !c.is_whitespace()).collect())
    }
}

fn negate<C: Coefficient>(x: RawExpr<C>) -> RawExpr<C> {
    match x {
        RawExpr::Scalar(c) => RawExpr::Scalar(-c),
        RawExpr::Scale(c, inner) => RawExpr::Scale(-c, inner),
        other => RawExpr::scale(-C::one(), other),
    }
}

// ----- printing

fn write_monomial<C: Coefficient>(pres: &Presentation<C>, m: &Monomial<C>, out: &mut String) {
    let mut tail = String::new();
    if let Some(l) = m.exponent() {
        tail.push_str("vop{");
        for (i, (g, c)) in l.entries().iter().enumerate() {
            if i > 0 {
                tail.push_str(", ");
            }
            let _ = write!(tail, "{}: {}", pres.name(*g), c);
        }
        tail.push('}');
    }
    let fs = m.factors();
    let mut opened = 0;
    for (i, f) in fs.iter().enumerate() {
        let is_last = i + 1 == fs.len();
        let inner_needed = !is_last || !tail.is_empty();
        if inner_needed {
            out.push_str("no(");
            opened += 1;
        }
        if f.der == 0 {
            out.push_str(pres.name(f.gen));
        } else {
            let _ = write!(out, "der({}, {})", f.der, pres.name(f.gen));
        }
        if inner_needed {
            out.push_str(", ");
        }
    }
    out.push_str(&tail);
    for _ in 0..opened {
        out.push(')');
    }
}

/// Prints an expression in the grammar accepted by [`parse_expr`].
pub fn format_expr<C: Coefficient>(pres: &Presentation<C>, e: &FieldExpr<C>) -> String {
    if e.is_zero() {
        return "0".into();
    }
    if let Some(c) = e.as_scalar() {
        return c.to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in e.terms().enumerate() {
        let coef = if m.is_identity() {
            c.factor_string()
        } else if c.is_one() {
            String::new()
        } else if *c == -C::one() {
            "-".into()
        } else {
            format!("{}*", c.factor_string())
        };
        let (neg, body) = match coef.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, coef),
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
        if !m.is_identity() {
            write_monomial(pres, m, &mut out);
        }
    }
    out
}

/// Prints poles as `{n: expr, …}`.
pub fn format_ope<C: Coefficient>(pres: &Presentation<C>, r: &OpeResult<C>) -> String {
    let mut out = String::from("{");
    for (i, (n, e)) in r.poles.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{n}: {}", format_expr(pres, e));
    }
    out.push('}');
    out
}
