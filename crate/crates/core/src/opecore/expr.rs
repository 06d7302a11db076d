use std::collections::BTreeMap;

use smallvec::SmallVec;

use crate::scalars::Coefficient;

/// Index of a generator inside its presentation. The index order is the
/// canonical factor order.
pub type GenId = u16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn from_odd(odd: bool) -> Parity {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// A derivative `∂^der` of a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub gen: GenId,
    pub der: u16,
}

impl Factor {
    pub fn new(gen: GenId, der: u16) -> Self {
        Factor { gen, der }
    }

    pub fn raised(self, by: u16) -> Self {
        Factor { gen: self.gen, der: self.der + by }
    }
}

/// Exponent `λ` of a lattice vertex operator `e^λ`, as a finitely supported
/// map from exponent directions to coefficients. Entries are sorted and
/// nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector<C> {
    entries: Vec<(GenId, C)>,
}

impl<C: Coefficient> ExponentVector<C> {
    pub fn new(entries: impl IntoIterator<Item = (GenId, C)>) -> Self {
        let mut map: BTreeMap<GenId, C> = BTreeMap::new();
        for (g, c) in entries {
            let slot = map.entry(g).or_insert_with(C::zero);
            *slot = slot.clone() + c;
        }
        ExponentVector { entries: map.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn zero() -> Self {
        ExponentVector { entries: Vec::new() }
    }

    pub fn single(g: GenId, c: C) -> Self {
        Self::new([(g, c)])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(GenId, C)] {
        &self.entries
    }

    pub fn get(&self, g: GenId) -> C {
        self.entries.iter().find(|(h, _)| *h == g).map(|(_, c)| c.clone()).unwrap_or_else(C::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.entries.iter().chain(other.entries.iter()).cloned())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.entries.iter().map(|(g, x)| (*g, x.clone() * c.clone())))
    }

    pub fn neg(&self) -> Self {
        ExponentVector { entries: self.entries.iter().map(|(g, c)| (*g, -c.clone())).collect() }
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: &impl Fn(&C) -> D) -> ExponentVector<D> {
        ExponentVector::new(self.entries.iter().map(|(g, c)| (*g, f(c))))
    }
}

/// Right-nested normally ordered product `:f₁ :f₂ … :f_r e^λ:…::` with the
/// factors in canonical order and at most one innermost exponential.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial<C> {
    factors: SmallVec<[Factor; 4]>,
    exp: Option<ExponentVector<C>>,
}

impl<C: Coefficient> Monomial<C> {
    pub fn identity() -> Self {
        Monomial { factors: SmallVec::new(), exp: None }
    }

    pub fn from_factor(f: Factor) -> Self {
        Monomial { factors: SmallVec::from_slice(&[f]), exp: None }
    }

    pub fn exponential(lambda: ExponentVector<C>) -> Self {
        if lambda.is_zero() {
            return Self::identity();
        }
        Monomial { factors: SmallVec::new(), exp: Some(lambda) }
    }

    /// Builds a monomial without reordering. Callers must pass factors that
    /// are already canonical.
    pub(crate) fn from_parts(factors: &[Factor], exp: Option<ExponentVector<C>>) -> Self {
        Monomial { factors: SmallVec::from_slice(factors), exp: exp.filter(|e| !e.is_zero()) }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn exponent(&self) -> Option<&ExponentVector<C>> {
        self.exp.as_ref()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty() && self.exp.is_none()
    }

    /// Splits off the outermost factor.
    pub(crate) fn split_first(&self) -> Option<(Factor, Monomial<C>)> {
        let (first, rest) = self.factors.split_first()?;
        Some((*first, Monomial { factors: SmallVec::from_slice(rest), exp: self.exp.clone() }))
    }

    pub(crate) fn prepend(&self, f: Factor) -> Self {
        let mut factors = SmallVec::with_capacity(self.factors.len() + 1);
        factors.push(f);
        factors.extend_from_slice(&self.factors);
        Monomial { factors, exp: self.exp.clone() }
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: &impl Fn(&C) -> D) -> Monomial<D> {
        Monomial {
            factors: self.factors.clone(),
            exp: self.exp.as_ref().map(|e| e.map_coefficients(f)).filter(|e| !e.is_zero()),
        }
    }
}

/// Canonical linear combination of monomials with nonzero coefficients.
/// Two expressions are equal iff they are structurally identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldExpr<C> {
    terms: BTreeMap<Monomial<C>, C>,
}

impl<C: Coefficient> Default for FieldExpr<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> FieldExpr<C> {
    pub fn zero() -> Self {
        FieldExpr { terms: BTreeMap::new() }
    }

    /// `c·𝟙`.
    pub fn scalar(c: C) -> Self {
        Self::term(Monomial::identity(), c)
    }

    pub fn one() -> Self {
        Self::scalar(C::one())
    }

    pub fn term(m: Monomial<C>, c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn monomial(m: Monomial<C>) -> Self {
        Self::term(m, C::one())
    }

    pub fn generator(g: GenId) -> Self {
        Self::monomial(Monomial::from_factor(Factor::new(g, 0)))
    }

    pub fn exponential(lambda: ExponentVector<C>) -> Self {
        Self::monomial(Monomial::exponential(lambda))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<C>, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial<C>) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// The scalar `c` if the expression equals `c·𝟙` (zero included).
    pub fn as_scalar(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_identity().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial<C>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, other: &FieldExpr<C>, c: &C) {
        if c.is_zero() {
            return;
        }
        let unit = c.is_one();
        for (m, x) in &other.terms {
            let v = if unit { x.clone() } else { x.clone() * c.clone() };
            self.add_term(m.clone(), v);
        }
    }

    pub fn add(&self, other: &FieldExpr<C>) -> FieldExpr<C> {
        let mut out = self.clone();
        out.add_scaled(other, &C::one());
        out
    }

    pub fn sub(&self, other: &FieldExpr<C>) -> FieldExpr<C> {
        let mut out = self.clone();
        out.add_scaled(other, &-C::one());
        out
    }

    pub fn scale(&self, c: &C) -> FieldExpr<C> {
        let mut out = FieldExpr::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> FieldExpr<C> {
        self.scale(&-C::one())
    }

    pub fn has_exponential(&self) -> bool {
        self.terms.keys().any(|m| m.exp.is_some())
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> FieldExpr<D> {
        let mut out = FieldExpr::zero();
        for (m, c) in &self.terms {
            out.add_term(m.map_coefficients(&f), f(c));
        }
        out
    }

    /// Fallible coefficient map, used by level specialization.
    pub fn try_map_coefficients<D: Coefficient, E>(
        &self,
        f: impl Fn(&C) -> Result<D, E>,
    ) -> Result<FieldExpr<D>, E> {
        let mut out = FieldExpr::zero();
        for (m, c) in &self.terms {
            let exp = match &m.exp {
                Some(e) => {
                    let mapped: Result<Vec<_>, E> =
                        e.entries().iter().map(|(g, x)| f(x).map(|y| (*g, y))).collect();
                    Some(ExponentVector::new(mapped?))
                }
                None => None,
            };
            out.add_term(Monomial::from_parts(&m.factors, exp), f(c)?);
        }
        Ok(out)
    }
}
