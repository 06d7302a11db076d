use std::collections::BTreeMap;

use num_integer::Integer;

use super::engine::Engine;
use super::expr::{ExponentVector, FieldExpr};
use crate::error::{Error, Result};
use crate::scalars::{factorial, Coefficient, Rational};

/// `[a_λ b] = Σ_j λ^j/j! · c_{j+1}`, stored as `products[j] = a_(j) b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LambdaPoly<C> {
    products: Vec<FieldExpr<C>>,
}

impl<C: Coefficient> LambdaPoly<C> {
    pub fn from_products(mut products: Vec<FieldExpr<C>>) -> Self {
        while products.last().is_some_and(|p| p.is_zero()) {
            products.pop();
        }
        LambdaPoly { products }
    }

    pub fn zero() -> Self {
        LambdaPoly { products: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.products.is_empty()
    }

    /// `a_(j) b`.
    pub fn product(&self, j: usize) -> FieldExpr<C> {
        self.products.get(j).cloned().unwrap_or_default()
    }

    pub fn products(&self) -> &[FieldExpr<C>] {
        &self.products
    }

    /// Degree in `λ`, `None` for the zero bracket.
    pub fn degree(&self) -> Option<usize> {
        self.products.len().checked_sub(1)
    }

    /// Coefficient of `λ^j` (the product divided by `j!`).
    pub fn lambda_coefficient(&self, j: usize) -> FieldExpr<C> {
        let f = C::from_rational(Rational::new(1.into(), factorial(j as u32)));
        self.product(j).scale(&f)
    }

    pub fn to_ope(&self) -> OpeResult<C> {
        let poles = self
            .products
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| (j as u32 + 1, p.clone()))
            .collect();
        OpeResult { poles }
    }
}

/// Singular part of `a(z) b(w)`: pole order to coefficient field at `w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpeResult<C> {
    pub poles: BTreeMap<u32, FieldExpr<C>>,
}

impl<C: Coefficient> OpeResult<C> {
    pub fn pole(&self, n: u32) -> FieldExpr<C> {
        self.poles.get(&n).cloned().unwrap_or_default()
    }

    pub fn is_regular(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn to_lambda(&self) -> LambdaPoly<C> {
        let top = self.poles.keys().next_back().copied().unwrap_or(0) as usize;
        let mut products = vec![FieldExpr::zero(); top];
        for (n, p) in &self.poles {
            products[*n as usize - 1] = p.clone();
        }
        LambdaPoly::from_products(products)
    }
}

pub fn lambda_bracket<C: Coefficient>(
    engine: &Engine<'_, C>,
    a: &FieldExpr<C>,
    b: &FieldExpr<C>,
) -> Result<LambdaPoly<C>> {
    Ok(LambdaPoly::from_products(engine.products(a, b)?))
}

pub fn ope<C: Coefficient>(engine: &Engine<'_, C>, a: &FieldExpr<C>, b: &FieldExpr<C>) -> Result<OpeResult<C>> {
    Ok(lambda_bracket(engine, a, b)?.to_ope())
}

/// `−p Σ_{j≥n} (−1)^j ∂^{j−n}/(j−n)! · (a_(j) b)`, the skew-symmetric
/// partner `b_(n) a` of a bracket `[a_λ b]`.
pub fn skew<C: Coefficient>(engine: &Engine<'_, C>, ab: &LambdaPoly<C>, p_odd: bool) -> Result<LambdaPoly<C>> {
    let ps = ab.products();
    let mut out = vec![FieldExpr::zero(); ps.len()];
    for (n, slot) in out.iter_mut().enumerate() {
        for (j, pj) in ps.iter().enumerate().skip(n) {
            if pj.is_zero() {
                continue;
            }
            let t = (j - n) as u32;
            let d = engine.derivative_pow(pj, t)?;
            let mut c = C::from_rational(Rational::new(1.into(), factorial(t)));
            if p_odd == (j % 2 == 1) {
                c = -c;
            }
            slot.add_scaled(&d, &c);
        }
    }
    Ok(LambdaPoly::from_products(out))
}

/// Product of two dressed vertex operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VopProduct<C> {
    /// `⟨λ, μ⟩`, the leading power of `(z−w)`.
    pub pairing: i64,
    /// Singular part with the power absorbed into the pole orders.
    pub singular: OpeResult<C>,
    /// The `(z−w)^0` coefficient, `a_(−1) b`.
    pub regular: FieldExpr<C>,
}

/// Product of `a` (exponent `λ`) and `b` (exponent `μ`). The pairing must be
/// a constant integer.
pub fn vop_product<C: Coefficient>(
    engine: &Engine<'_, C>,
    a: &FieldExpr<C>,
    b: &FieldExpr<C>,
) -> Result<VopProduct<C>> {
    let la = common_exponent(a)?;
    let mb = common_exponent(b)?;
    let pres = engine.presentation();
    let p = pres.pairing(&la, &mb);
    let pairing = p
        .integer_part()
        .and_then(|n| i64::try_from(n).ok())
        .ok_or_else(|| Error::GeneralizedExponent(p.to_string()))?;
    Ok(VopProduct {
        pairing,
        singular: ope(engine, a, b)?,
        regular: engine.normal_order(a, b)?,
    })
}

fn common_exponent<C: Coefficient>(e: &FieldExpr<C>) -> Result<ExponentVector<C>> {
    let mut out: Option<ExponentVector<C>> = None;
    for (m, _) in e.terms() {
        let l = m.exponent().cloned().unwrap_or_else(ExponentVector::zero);
        match &out {
            None => out = Some(l),
            Some(o) if *o != l => {
                return Err(Error::ExponentPosition("terms carry different exponents".into()));
            }
            _ => {}
        }
    }
    Ok(out.unwrap_or_else(ExponentVector::zero))
}

/// A field all of whose monomials carry the same nonzero exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScreeningField<C> {
    body: FieldExpr<C>,
    exponent: ExponentVector<C>,
}

impl<C: Coefficient> ScreeningField<C> {
    pub fn new(body: FieldExpr<C>) -> Result<Self> {
        if body.is_zero() {
            return Err(Error::NotScreening("zero field".into()));
        }
        let exponent = common_exponent(&body).map_err(|_| Error::NotScreening("mixed exponents".into()))?;
        if exponent.is_zero() {
            return Err(Error::NotScreening("no exponential factor".into()));
        }
        Ok(ScreeningField { body, exponent })
    }

    pub fn body(&self) -> &FieldExpr<C> {
        &self.body
    }

    pub fn exponent(&self) -> &ExponentVector<C> {
        &self.exponent
    }
}

/// `s_(0) x`, computed from the products `x_(j) s` through
/// `s_(0) x = −p Σ_j (−1)^j ∂^j(x_(j) s)/j!`, where `p` is the Koszul sign
/// times `(−1)^⟨λ,μ⟩` for the exponent `μ` of `x`.
pub fn zero_mode_action<C: Coefficient>(
    engine: &Engine<'_, C>,
    s: &ScreeningField<C>,
    x: &FieldExpr<C>,
) -> Result<FieldExpr<C>> {
    let pres = engine.presentation();
    let mut out = FieldExpr::zero();
    // Group x by (parity, exponent) so the sign is uniform per group.
    let mut groups: BTreeMap<(bool, Option<ExponentVector<C>>), FieldExpr<C>> = BTreeMap::new();
    for (m, c) in x.terms() {
        let key = (pres.monomial_odd(m), m.exponent().cloned());
        groups.entry(key).or_default().add_term(m.clone(), c.clone());
    }
    let s_odd = pres.expr_odd(s.body()).ok_or_else(|| Error::NotScreening("inhomogeneous parity".into()))?;
    for ((x_odd, mu), part) in groups {
        let mut p_odd = s_odd && x_odd;
        if let Some(mu) = &mu {
            let p = pres.pairing(s.exponent(), mu);
            let n = p.integer_part().ok_or_else(|| Error::GeneralizedExponent(p.to_string()))?;
            if n.is_odd() {
                p_odd = !p_odd;
            }
        }
        let prods = LambdaPoly::from_products(engine.products(&part, s.body())?);
        let zero_mode = skew(engine, &prods, p_odd)?;
        out.add_scaled(&zero_mode.product(0), &C::one());
    }
    Ok(out)
}

/// `s_(0) x` computed directly by the mode recursion.
pub fn zero_mode_direct<C: Coefficient>(
    engine: &Engine<'_, C>,
    s: &ScreeningField<C>,
    x: &FieldExpr<C>,
) -> Result<FieldExpr<C>> {
    engine.nth_product(s.body(), 0, x)
}
