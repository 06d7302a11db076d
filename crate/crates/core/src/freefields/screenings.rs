//! Right action of `𝔫₊` on the coordinates of `N₊` and the screening fields
//! built from it.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{beta_name, gamma_name, FreeFieldStack};
use crate::error::{Error, Result};
use crate::opecore::{Engine, ScreeningField};
use crate::rootdata::{Root, Variant};
use crate::scalars::{Rational, Scalar};
use crate::Expr;

/// Polynomial in the coordinates `x_{j,k}`: sorted multiset of coordinates
/// to coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polynomial {
    terms: BTreeMap<Vec<Root>, Rational>,
}

impl Polynomial {
    pub fn constant(c: Rational) -> Self {
        let mut p = Polynomial::default();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn coordinate(x: Root) -> Self {
        let mut p = Polynomial::default();
        p.add_term(vec![x], Rational::one());
        p
    }

    fn add_term(&mut self, mut mono: Vec<Root>, c: Rational) {
        if c.is_zero() {
            return;
        }
        mono.sort();
        let slot = self.terms.entry(mono.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Root>, &Rational)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::default();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut m = a.clone();
                m.extend_from_slice(b);
                out.add_term(m, x * y);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let xs: Vec<String> = m.iter().map(|(j, k)| format!("x[{j},{k}]")).collect();
                match (xs.is_empty(), c.is_one()) {
                    (true, _) => c.to_string(),
                    (false, true) => xs.join("*"),
                    (false, false) => format!("{c}*{}", xs.join("*")),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Σ P_{j,k}(x) ∂/∂x_{j,k}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiffOpPoly {
    pub terms: BTreeMap<Root, Polynomial>,
}

impl DiffOpPoly {
    fn add(&mut self, x: Root, p: Polynomial) {
        let sum = self.terms.get(&x).cloned().unwrap_or_default().add(&p);
        if sum.is_zero() {
            self.terms.remove(&x);
        } else {
            self.terms.insert(x, sum);
        }
    }
}

impl fmt::Display for DiffOpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.terms.iter().map(|((j, k), p)| format!("({p})*d/dx[{j},{k}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn check_index(n: usize, i: usize) -> Result<()> {
    if n == 0 || i == 0 || i > n {
        return Err(Error::OutOfRange(format!("index {i} for rank {n}")));
    }
    Ok(())
}

/// `ρ^R(e_i) = ∂/∂x_{i,i} + Σ_{j=1}^{i−1} x_{i−j,i−1} ∂/∂x_{i−j,i}`.
pub fn rho_r(n: usize, i: usize) -> Result<DiffOpPoly> {
    check_index(n, i)?;
    let mut out = DiffOpPoly::default();
    out.add((i, i), Polynomial::constant(Rational::one()));
    for j in 1..i {
        out.add((i - j, i), Polynomial::coordinate((i - j, i - 1)));
    }
    Ok(out)
}

/// The same vector field read off from the matrix product `X·M_{i,i+1}`,
/// with `X = I + Σ_{j<k} x_{j,k−1} M_{j,k}`: the coefficient of
/// `∂/∂x_{j,k}` is entry `(j, k+1)` of the product.
pub fn rho_r_bruteforce(n: usize, i: usize) -> Result<DiffOpPoly> {
    check_index(n, i)?;
    let d = n + 1;
    let mut x = vec![vec![Polynomial::default(); d]; d];
    for (r, row) in x.iter_mut().enumerate() {
        row[r] = Polynomial::constant(Rational::one());
        for (s, slot) in row.iter_mut().enumerate().skip(r + 1) {
            *slot = Polynomial::coordinate((r + 1, s));
        }
    }
    let mut e = vec![vec![Polynomial::default(); d]; d];
    e[i - 1][i] = Polynomial::constant(Rational::one());
    let mut out = DiffOpPoly::default();
    for r in 0..d {
        for s in r + 1..d {
            let mut acc = Polynomial::default();
            for t in 0..d {
                acc = acc.add(&x[r][t].mul(&e[t][s]));
            }
            if !acc.is_zero() {
                out.add((r + 1, s), acc);
            }
        }
    }
    Ok(out)
}

/// Replaces `∂/∂x_α` by `β_α` and `x_α` by `γ_α`.
fn diffop_field(stack: &FreeFieldStack, engine: &Engine<'_, Scalar>, op: &DiffOpPoly) -> Result<Expr> {
    let mut out = Expr::zero();
    for (x, p) in &op.terms {
        for (mono, c) in p.terms() {
            let mut acc = stack.gen(&beta_name(*x))?;
            for y in mono.iter().rev() {
                acc = engine.normal_order(&stack.gen(&gamma_name(*y))?, &acc)?;
            }
            out.add_scaled(&acc, &Scalar::rational(c.clone()));
        }
    }
    Ok(out)
}

fn simple_vop(stack: &FreeFieldStack, i: usize) -> Result<Expr> {
    let coef = -stack.shifted_level().inv()?;
    stack.vop(&[(&super::heis_name(i), coef)])
}

fn wakimoto_screening(stack: &FreeFieldStack, engine: &Engine<'_, Scalar>, i: usize) -> Result<ScreeningField<Scalar>> {
    let n = stack.spec().heisenberg;
    let body = diffop_field(stack, engine, &rho_r(n, i)?)?;
    ScreeningField::new(engine.normal_order(&body, &simple_vop(stack, i)?)?)
}

/// `S_i = :(β_i + Σ_{j=1}^{i−1} γ_{i−j,i−1} β_{i−j,i}) e^{−α_i/(k+n+1)}:` for
/// `i = 1, …, n` over a stack with a rank-`n` Heisenberg block.
pub fn wakimoto_screenings(stack: &FreeFieldStack) -> Result<Vec<ScreeningField<Scalar>>> {
    let n = stack.spec().heisenberg;
    let engine = stack.engine();
    (1..=n).map(|i| wakimoto_screening(stack, &engine, i)).collect()
}

/// Hook-type screenings `Q_1, …, Q_n`: `Q_i = S_i` for `i < m`, `Q_m` the
/// bare or `γ_{1,m−1}`-dressed vertex operator, and bare vertex operators
/// beyond.
pub fn hook_screenings(stack: &FreeFieldStack, m: usize, variant: Variant) -> Result<Vec<ScreeningField<Scalar>>> {
    let n = stack.spec().heisenberg;
    if m < 2 || m > n + 1 {
        return Err(Error::OutOfRange(format!("m = {m} for n = {n}")));
    }
    let engine = stack.engine();
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let q = if i < m {
            wakimoto_screening(stack, &engine, i)?
        } else if i == m && variant == Variant::Bar {
            let body = engine.normal_order(&stack.gamma((1, m - 1))?, &simple_vop(stack, i)?)?;
            ScreeningField::new(body)?
        } else {
            ScreeningField::new(simple_vop(stack, i)?)?
        };
        out.push(q);
    }
    Ok(out)
}
