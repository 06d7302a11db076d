use std::collections::HashMap;

use num_traits::Zero;

use super::expr::{ExponentVector, Factor, FieldExpr, GenId, Monomial, Parity};
use crate::error::{Error, Result};
use crate::scalars::{Coefficient, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: String,
    pub parity: Parity,
    /// Grading weight used to bound pole orders. For the free-field and
    /// W-algebra presentations built here it is the conformal weight of the
    /// polynomial part.
    pub weight: Rational,
}

/// Generators with their pairwise λ-brackets, stored as the products
/// `a_(n) b` for `n = 0, 1, …`. Brackets not given for `(a, b)` are derived
/// from `(b, a)` by skew-symmetry; if neither is given they vanish.
///
/// Exponent directions are even weight-one generators whose brackets with
/// every generator are scalar double poles. The pairing `⟨x, b⟩` between a
/// generator and a direction is the coefficient of `𝟙` in `x_(1) b`.
#[derive(Clone, Debug)]
pub struct Presentation<C> {
    gens: Vec<GeneratorDecl>,
    by_name: HashMap<String, GenId>,
    brackets: HashMap<(GenId, GenId), Vec<FieldExpr<C>>>,
    directions: Vec<GenId>,
}

impl<C: Coefficient> Default for Presentation<C> {
    fn default() -> Self {
        Self::new()
    }
}

impl<C: Coefficient> Presentation<C> {
    pub fn new() -> Self {
        Presentation { gens: Vec::new(), by_name: HashMap::new(), brackets: HashMap::new(), directions: Vec::new() }
    }

    pub fn add_generator(&mut self, name: &str, parity: Parity, weight: Rational) -> Result<GenId> {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateGenerator(name.to_string()));
        }
        let id = GenId::try_from(self.gens.len())
            .map_err(|_| Error::InvalidPresentation("too many generators".into()))?;
        self.gens.push(GeneratorDecl { name: name.to_string(), parity, weight });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_even(&mut self, name: &str, weight: Rational) -> Result<GenId> {
        self.add_generator(name, Parity::Even, weight)
    }

    pub fn add_odd(&mut self, name: &str, weight: Rational) -> Result<GenId> {
        self.add_generator(name, Parity::Odd, weight)
    }

    /// Sets `a_(n) b = products[n]`. Trailing zero products are dropped.
    pub fn set_bracket(&mut self, a: GenId, b: GenId, mut products: Vec<FieldExpr<C>>) -> Result<()> {
        self.check_id(a)?;
        self.check_id(b)?;
        while products.last().is_some_and(|p| p.is_zero()) {
            products.pop();
        }
        let want_odd = self.parity(a).is_odd() ^ self.parity(b).is_odd();
        let total = &self.gens[a as usize].weight + &self.gens[b as usize].weight;
        for (n, p) in products.iter().enumerate() {
            for (m, _) in p.terms() {
                if self.monomial_odd(m) != want_odd {
                    return Err(Error::InvalidPresentation(format!(
                        "bracket ({}, {}) violates parity",
                        self.name(a),
                        self.name(b)
                    )));
                }
                if m.exponent().is_some() {
                    return Err(Error::ExponentPosition(format!(
                        "bracket ({}, {}) contains an exponential",
                        self.name(a),
                        self.name(b)
                    )));
                }
                let expect = &total - Rational::from_integer((n as i64 + 1).into());
                if self.monomial_weight(m) != expect {
                    return Err(Error::InvalidPresentation(format!(
                        "bracket ({}, {}) is inhomogeneous at pole {}",
                        self.name(a),
                        self.name(b),
                        n + 1
                    )));
                }
            }
        }
        self.brackets.insert((a, b), products);
        Ok(())
    }

    /// Sets `a_(n) b = c·𝟙` for the single pole `n + 1`.
    pub fn set_scalar_pole(&mut self, a: GenId, b: GenId, n: usize, c: C) -> Result<()> {
        let mut products = vec![FieldExpr::zero(); n + 1];
        products[n] = FieldExpr::scalar(c);
        self.set_bracket(a, b, products)
    }

    /// Declares `g` as an exponent direction. Must be called after all
    /// brackets involving `g` are set.
    pub fn declare_direction(&mut self, g: GenId) -> Result<()> {
        self.check_id(g)?;
        let decl = &self.gens[g as usize];
        if decl.parity.is_odd() || decl.weight != Rational::from_integer(1.into()) {
            return Err(Error::InvalidPresentation(format!("direction {} must be even of weight 1", decl.name)));
        }
        for x in 0..self.gens.len() as GenId {
            for (pair, flipped) in [((x, g), false), ((g, x), true)] {
                if let Some(ps) = self.brackets.get(&pair) {
                    for (n, p) in ps.iter().enumerate() {
                        let ok = if n == 1 { p.as_scalar().is_some() } else { p.is_zero() };
                        if !ok {
                            let (a, b) = if flipped { (g, x) } else { (x, g) };
                            return Err(Error::InvalidPresentation(format!(
                                "bracket ({}, {}) is not a scalar double pole, so {} cannot be an exponent direction",
                                self.name(a),
                                self.name(b),
                                self.name(g)
                            )));
                        }
                    }
                }
            }
        }
        if !self.directions.contains(&g) {
            self.directions.push(g);
            self.directions.sort_unstable();
        }
        Ok(())
    }

    fn check_id(&self, g: GenId) -> Result<()> {
        if (g as usize) < self.gens.len() {
            Ok(())
        } else {
            Err(Error::ForeignGenerator(g))
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[GeneratorDecl] {
        &self.gens
    }

    pub fn id(&self, name: &str) -> Result<GenId> {
        self.by_name.get(name).copied().ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn lookup(&self, name: &str) -> Option<GenId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, g: GenId) -> &str {
        &self.gens[g as usize].name
    }

    pub fn parity(&self, g: GenId) -> Parity {
        self.gens[g as usize].parity
    }

    pub fn weight(&self, g: GenId) -> &Rational {
        &self.gens[g as usize].weight
    }

    pub fn directions(&self) -> &[GenId] {
        &self.directions
    }

    pub fn is_direction(&self, g: GenId) -> bool {
        self.directions.binary_search(&g).is_ok()
    }

    /// The explicitly given products `a_(n) b`, without skew completion.
    pub fn given_bracket(&self, a: GenId, b: GenId) -> Option<&[FieldExpr<C>]> {
        self.brackets.get(&(a, b)).map(|v| v.as_slice())
    }

    /// Whether every bracket is a multiple of the identity.
    pub fn is_free(&self) -> bool {
        self.brackets.values().all(|ps| ps.iter().all(|p| p.as_scalar().is_some()))
    }

    /// Scalar value of `a_(n) b` in a free presentation, including the
    /// skew-symmetric completion.
    pub fn scalar_product(&self, a: GenId, b: GenId, n: usize) -> C {
        if let Some(ps) = self.brackets.get(&(a, b)) {
            return ps.get(n).and_then(|p| p.as_scalar()).unwrap_or_else(C::zero);
        }
        if let Some(ps) = self.brackets.get(&(b, a)) {
            // For scalar brackets only the j = n term of the skew formula
            // survives: a_(n) b = −p (−1)^n b_(n) a.
            let v = ps.get(n).and_then(|p| p.as_scalar()).unwrap_or_else(C::zero);
            let odd = self.parity(a).is_odd() && self.parity(b).is_odd();
            let flip = (n % 2 == 0) ^ odd;
            return if flip { -v } else { v };
        }
        C::zero()
    }

    /// `⟨x, b⟩` for a generator `x` and a direction `b`.
    pub fn pairing_gen_dir(&self, x: GenId, b: GenId) -> C {
        self.scalar_product(x, b, 1)
    }

    /// `⟨x, λ⟩`.
    pub fn pairing_gen_exp(&self, x: GenId, lambda: &ExponentVector<C>) -> C {
        let mut acc = C::zero();
        for (b, c) in lambda.entries() {
            let p = self.pairing_gen_dir(x, *b);
            if !p.is_zero() {
                acc = acc + p * c.clone();
            }
        }
        acc
    }

    /// `⟨λ, μ⟩`.
    pub fn pairing(&self, lambda: &ExponentVector<C>, mu: &ExponentVector<C>) -> C {
        let mut acc = C::zero();
        for (a, c) in lambda.entries() {
            let p = self.pairing_gen_exp(*a, mu);
            if !p.is_zero() {
                acc = acc + p * c.clone();
            }
        }
        acc
    }

    pub fn factor_odd(&self, f: Factor) -> bool {
        self.parity(f.gen).is_odd()
    }

    pub fn monomial_odd(&self, m: &Monomial<C>) -> bool {
        m.factors().iter().fold(false, |acc, f| acc ^ self.factor_odd(*f))
    }

    pub fn monomial_weight(&self, m: &Monomial<C>) -> Rational {
        let mut w = Rational::zero();
        for f in m.factors() {
            w += self.weight(f.gen) + Rational::from_integer(f.der.into());
        }
        w
    }

    /// Parity of a homogeneous expression, `None` if mixed. Zero is even.
    pub fn expr_odd(&self, e: &FieldExpr<C>) -> Option<bool> {
        let mut out: Option<bool> = None;
        for (m, _) in e.terms() {
            let p = self.monomial_odd(m);
            match out {
                None => out = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(out.unwrap_or(false))
    }

    /// Grading weight of a homogeneous expression, `None` if mixed or zero.
    pub fn expr_weight(&self, e: &FieldExpr<C>) -> Option<Rational> {
        let mut out: Option<Rational> = None;
        for (m, _) in e.terms() {
            let w = self.monomial_weight(m);
            match &out {
                None => out = Some(w),
                Some(v) if *v != w => return None,
                _ => {}
            }
        }
        out
    }

    /// Rewrites every coefficient, e.g. to specialize the level.
    pub fn try_map_coefficients<D: Coefficient, E>(
        &self,
        f: impl Fn(&C) -> std::result::Result<D, E>,
    ) -> std::result::Result<Presentation<D>, E> {
        let mut brackets = HashMap::new();
        for (k, ps) in &self.brackets {
            let mapped: std::result::Result<Vec<_>, E> = ps.iter().map(|p| p.try_map_coefficients(&f)).collect();
            brackets.insert(*k, mapped?);
        }
        Ok(Presentation {
            gens: self.gens.clone(),
            by_name: self.by_name.clone(),
            brackets,
            directions: self.directions.clone(),
        })
    }
}
