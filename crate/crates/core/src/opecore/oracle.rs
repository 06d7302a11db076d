//! Brute-force check of field products by explicit mode algebra.
//!
//! For a free presentation every bracket is a scalar, so the modes satisfy
//! `[a_(m), b_(n)] = Σ_j C(m, j) (a_(j) b) δ_{m+n−j,−1}` and the vacuum
//! module is spanned by sorted words of creation modes `g_(n)`, `n < 0`.
//! Composite fields act through the normally ordered mode sums. None of
//! this shares code with the field-level recursion in the engine.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::expr::{FieldExpr, GenId, Monomial};
use super::presentation::Presentation;
use crate::error::{Error, Result};
use crate::scalars::{binomial, factorial, Coefficient, Rational};

/// Word of creation modes `(generator, mode)` in canonical order.
pub type ModeWord = Vec<(GenId, i64)>;

/// Vector in the vacuum module.
pub type State<C> = BTreeMap<ModeWord, C>;

/// Products `a_(j) b` for `j ≥ 0`, as states. Entry `n` is pole `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTable<C> {
    pub poles: BTreeMap<u32, State<C>>,
}

pub struct ModeOracle<'p, C: Coefficient> {
    pres: &'p Presentation<C>,
    truncation: i64,
}

fn add_to<C: Coefficient>(s: &mut State<C>, w: ModeWord, c: C) {
    if c.is_zero() {
        return;
    }
    let slot = s.entry(w.clone()).or_insert_with(C::zero);
    *slot = slot.clone() + c;
    if slot.is_zero() {
        s.remove(&w);
    }
}

fn add_state<C: Coefficient>(s: &mut State<C>, t: &State<C>, c: &C) {
    for (w, x) in t {
        add_to(s, w.clone(), x.clone() * c.clone());
    }
}

impl<'p, C: Coefficient> ModeOracle<'p, C> {
    pub fn new(pres: &'p Presentation<C>, truncation: usize) -> Result<Self> {
        if !pres.is_free() {
            return Err(Error::NotFree("a bracket is not a multiple of the identity".into()));
        }
        Ok(ModeOracle { pres, truncation: truncation as i64 })
    }

    fn check_mode(&self, n: i64) -> Result<()> {
        if n.abs() > self.truncation {
            Err(Error::TruncationTooSmall { needed: n.unsigned_abs() as usize, given: self.truncation as usize })
        } else {
            Ok(())
        }
    }

    fn odd(&self, g: GenId) -> bool {
        self.pres.parity(g).is_odd()
    }

    /// `[g_(m), h_(n)]` as a scalar.
    fn commutator(&self, g: GenId, m: i64, h: GenId, n: i64) -> C {
        // only j = m + n + 1 contributes
        let j = m + n + 1;
        if j < 0 {
            return C::zero();
        }
        let c = self.pres.scalar_product(g, h, j as usize);
        if c.is_zero() {
            return c;
        }
        C::from_rational(binomial(m, j as u32)) * c
    }

    /// `g_(m) v` for a single basis word.
    fn apply_word(&self, g: GenId, m: i64, w: &ModeWord) -> Result<State<C>> {
        self.check_mode(m)?;
        let mut out = State::new();
        if m < 0 {
            // creation: insert, passing odd modes
            let mut sign_neg = false;
            let mut pos = w.len();
            for (i, &(h, n)) in w.iter().enumerate() {
                if (g, m) == (h, n) && self.odd(g) {
                    return Ok(out);
                }
                if (g, m) <= (h, n) {
                    pos = i;
                    break;
                }
                if self.odd(g) && self.odd(h) {
                    sign_neg = !sign_neg;
                }
            }
            let mut nw = w.clone();
            nw.insert(pos, (g, m));
            add_to(&mut out, nw, if sign_neg { -C::one() } else { C::one() });
            return Ok(out);
        }
        let mut sign_neg = false;
        for (i, &(h, n)) in w.iter().enumerate() {
            let c = self.commutator(g, m, h, n);
            if !c.is_zero() {
                let mut nw = w.clone();
                nw.remove(i);
                add_to(&mut out, nw, if sign_neg { -c } else { c });
            }
            if self.odd(g) && self.odd(h) {
                sign_neg = !sign_neg;
            }
        }
        Ok(out)
    }

    fn apply_gen(&self, g: GenId, m: i64, v: &State<C>) -> Result<State<C>> {
        let mut out = State::new();
        for (w, c) in v {
            add_state(&mut out, &self.apply_word(g, m, w)?, c);
        }
        Ok(out)
    }

    fn energy_word(&self, w: &ModeWord) -> Rational {
        let mut e = Rational::from_integer(0.into());
        for &(g, n) in w {
            e += self.pres.weight(g) + Rational::from_integer((-n - 1).into());
        }
        e
    }

    fn energy_bound(&self, v: &State<C>) -> Rational {
        v.keys().map(|w| self.energy_word(w)).max().unwrap_or_else(|| Rational::from_integer(0.into()))
    }

    /// Mode `X_(n)` of a monomial acting on a state.
    fn apply_monomial(&self, x: &[(GenId, u16)], n: i64, v: &State<C>) -> Result<State<C>> {
        if v.is_empty() {
            return Ok(State::new());
        }
        match x {
            [] => Ok(if n == -1 { v.clone() } else { State::new() }),
            [(g, d)] => {
                // (∂^d g)_(n) = (−1)^d n(n−1)…(n−d+1) g_(n−d)
                let mut coef = Rational::from_integer(1.into());
                for t in 0..*d as i64 {
                    coef *= Rational::from_integer((-(n - t)).into());
                }
                if coef == Rational::from_integer(0.into()) {
                    return Ok(State::new());
                }
                let r = self.apply_gen(*g, n - *d as i64, v)?;
                let mut out = State::new();
                add_state(&mut out, &r, &C::from_rational(coef));
                Ok(out)
            }
            [first, rest @ ..] => {
                let w_rest: Rational = rest
                    .iter()
                    .map(|(g, d)| self.pres.weight(*g) + Rational::from_integer((*d).into()))
                    .sum();
                let w_first = self.pres.weight(first.0) + Rational::from_integer(first.1.into());
                let e = self.energy_bound(v);
                let p_neg = self.odd(first.0) && rest.iter().fold(false, |a, (g, _)| a ^ self.odd(*g));
                let mut out = State::new();
                // Σ_{j<0} x_(j) X'_(n−j−1) v
                let top_rest = (&w_rest + &e - Rational::from_integer(1.into())).floor().to_integer().to_i64().unwrap();
                let mut j = -1i64;
                while n - j - 1 <= top_rest {
                    let t = self.apply_monomial(rest, n - j - 1, v)?;
                    if !t.is_empty() {
                        add_state(&mut out, &self.apply_monomial(&[*first], j, &t)?, &C::one());
                    }
                    j -= 1;
                }
                // p Σ_{j≥0} X'_(n−j−1) x_(j) v
                let top_first = (&w_first + &e - Rational::from_integer(1.into())).floor().to_integer().to_i64().unwrap();
                let sign = if p_neg { -C::one() } else { C::one() };
                for j in 0..=top_first.max(-1) {
                    let t = self.apply_monomial(&[*first], j, v)?;
                    if !t.is_empty() {
                        add_state(&mut out, &self.apply_monomial(rest, n - j - 1, &t)?, &sign);
                    }
                }
                Ok(out)
            }
        }
    }

    fn vacuum() -> State<C> {
        let mut v = State::new();
        v.insert(Vec::new(), C::one());
        v
    }

    fn flat(m: &Monomial<C>) -> Result<Vec<(GenId, u16)>> {
        if m.exponent().is_some() {
            return Err(Error::ExponentPosition("the mode oracle is exponential-free".into()));
        }
        Ok(m.factors().iter().map(|f| (f.gen, f.der)).collect())
    }

    /// The state `X_(−1)|0⟩` of a field.
    pub fn state_of(&self, x: &FieldExpr<C>) -> Result<State<C>> {
        let mut out = State::new();
        for (m, c) in x.terms() {
            // :x₁ :x₂ …:: |0⟩ = Π d_i! g_i,(−1−d_i) |0⟩, innermost first
            let mut v = Self::vacuum();
            let fs = Self::flat(m)?;
            let mut scale = Rational::from_integer(1.into());
            for (g, d) in fs.iter().rev() {
                v = self.apply_gen(*g, -1 - *d as i64, &v)?;
                scale *= Rational::from_integer(factorial(*d as u32));
            }
            add_state(&mut out, &v, &(c.clone() * C::from_rational(scale)));
        }
        Ok(out)
    }

    /// `a_(n) b|0⟩` for an arbitrary expression `a`.
    pub fn act(&self, a: &FieldExpr<C>, n: i64, b: &State<C>) -> Result<State<C>> {
        let mut out = State::new();
        for (m, c) in a.terms() {
            add_state(&mut out, &self.apply_monomial(&Self::flat(m)?, n, b)?, c);
        }
        Ok(out)
    }

    /// Pole table of `a(z) b(w)` from explicit mode actions.
    pub fn table(&self, a: &FieldExpr<C>, b: &FieldExpr<C>) -> Result<OracleTable<C>> {
        let vb = self.state_of(b)?;
        let wa = a.terms().map(|(m, _)| self.pres.monomial_weight(m)).max();
        let wb = self.energy_bound(&vb);
        let mut poles = BTreeMap::new();
        if let Some(wa) = wa {
            let top = (wa + wb - Rational::from_integer(1.into())).floor().to_integer().to_i64().unwrap();
            for j in 0..=top.max(-1) {
                let s = self.act(a, j, &vb)?;
                if !s.is_empty() {
                    poles.insert(j as u32 + 1, s);
                }
            }
        }
        Ok(OracleTable { poles })
    }
}

/// Builds the oracle table at truncation `n`.
pub fn mode_oracle<C: Coefficient>(
    pres: &Presentation<C>,
    a: &FieldExpr<C>,
    b: &FieldExpr<C>,
    truncation: usize,
) -> Result<OracleTable<C>> {
    ModeOracle::new(pres, truncation)?.table(a, b)
}
