use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use num_traits::One;

use super::expr::{ExponentVector, Factor, FieldExpr, GenId, Monomial};
use super::presentation::Presentation;
use crate::error::{Error, Result};
use crate::scalars::{binomial, factorial, Coefficient, Rational};

pub const DEFAULT_BUDGET: usize = 1_000_000;

type Shared<C> = Rc<FieldExpr<C>>;

/// Mode calculus over one presentation.
///
/// Every composite field is a right-nested normally ordered monomial, and
/// all products reduce to three primitive actions on monomials: a generator
/// mode `g_(n)`, an exponential mode `e^λ_(n)`, and the normally ordered
/// prepend of a single factor. Results are memoized per engine, so an
/// engine is cheap to reuse and each thread should own its own.
pub struct Engine<'p, C: Coefficient> {
    pres: &'p Presentation<C>,
    budget: usize,
    spent: Cell<usize>,
    gen_products: RefCell<HashMap<(GenId, GenId), Rc<Vec<FieldExpr<C>>>>>,
    gen_on_factor: RefCell<HashMap<(GenId, u32, Factor), Shared<C>>>,
    corrections: RefCell<HashMap<(Factor, Factor), Shared<C>>>,
    derivatives: RefCell<HashMap<Monomial<C>, Shared<C>>>,
    no_factor: RefCell<HashMap<(Factor, Monomial<C>), Shared<C>>>,
    nth: RefCell<HashMap<(Monomial<C>, i64, Monomial<C>), Shared<C>>>,
    gen_mode: RefCell<HashMap<(GenId, i64, Monomial<C>), Shared<C>>>,
    exp_mode: RefCell<HashMap<(ExponentVector<C>, i64, Monomial<C>), Shared<C>>>,
    schur: RefCell<HashMap<(ExponentVector<C>, u32, ExponentVector<C>), Shared<C>>>,
}

fn inv_factorial<C: Coefficient>(n: u32) -> C {
    C::from_rational(Rational::new(1.into(), factorial(n)))
}

fn int<C: Coefficient>(n: i64) -> C {
    C::from_i64(n)
}

fn sign<C: Coefficient>(negative: bool) -> C {
    if negative {
        -C::one()
    } else {
        C::one()
    }
}

fn floor_i64(r: &Rational) -> i64 {
    use num_traits::ToPrimitive;
    r.floor().to_integer().to_i64().expect("weight fits in i64")
}

impl<'p, C: Coefficient> Engine<'p, C> {
    pub fn new(pres: &'p Presentation<C>) -> Self {
        Self::with_budget(pres, DEFAULT_BUDGET)
    }

    pub fn with_budget(pres: &'p Presentation<C>, budget: usize) -> Self {
        Engine {
            pres,
            budget,
            spent: Cell::new(0),
            gen_products: RefCell::default(),
            gen_on_factor: RefCell::default(),
            corrections: RefCell::default(),
            derivatives: RefCell::default(),
            no_factor: RefCell::default(),
            nth: RefCell::default(),
            gen_mode: RefCell::default(),
            exp_mode: RefCell::default(),
            schur: RefCell::default(),
        }
    }

    pub fn presentation(&self) -> &'p Presentation<C> {
        self.pres
    }

    /// Terms produced so far, counted against the budget.
    pub fn spent(&self) -> usize {
        self.spent.get()
    }

    fn charge(&self, terms: usize) -> Result<()> {
        let total = self.spent.get() + terms + 1;
        self.spent.set(total);
        if total > self.budget {
            Err(Error::Budget(self.budget))
        } else {
            Ok(())
        }
    }

    fn check_expr(&self, e: &FieldExpr<C>) -> Result<()> {
        let n = self.pres.len();
        for (m, _) in e.terms() {
            for f in m.factors() {
                if f.gen as usize >= n {
                    return Err(Error::ForeignGenerator(f.gen));
                }
            }
            if let Some(l) = m.exponent() {
                for (g, _) in l.entries() {
                    if !self.pres.is_direction(*g) {
                        return Err(Error::ExponentPosition(format!(
                            "generator id {g} is not an exponent direction"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn odd(&self, f: Factor) -> bool {
        self.pres.factor_odd(f)
    }

    // ----- generator brackets

    /// `a_(n) b` for `n = 0, 1, …`, completing missing entries by
    /// skew-symmetry.
    pub fn generator_products(&self, a: GenId, b: GenId) -> Result<Rc<Vec<FieldExpr<C>>>> {
        if let Some(v) = self.gen_products.borrow().get(&(a, b)) {
            return Ok(v.clone());
        }
        let out = if let Some(ps) = self.pres.given_bracket(a, b) {
            ps.to_vec()
        } else if let Some(ps) = self.pres.given_bracket(b, a) {
            // a_(n) b = −p Σ_{j≥n} (−1)^j ∂^{j−n}/(j−n)! b_(j) a
            let p_odd = self.pres.parity(a).is_odd() && self.pres.parity(b).is_odd();
            let mut out = vec![FieldExpr::zero(); ps.len()];
            for (n, slot) in out.iter_mut().enumerate() {
                for (j, bj) in ps.iter().enumerate().skip(n) {
                    if bj.is_zero() {
                        continue;
                    }
                    let t = (j - n) as u32;
                    let d = self.derivative_pow(bj, t)?;
                    let c: C = sign::<C>(!p_odd ^ (j % 2 == 1)) * inv_factorial::<C>(t);
                    slot.add_scaled(&d, &c);
                }
            }
            while out.last().is_some_and(|p| p.is_zero()) {
                out.pop();
            }
            out
        } else {
            Vec::new()
        };
        let out = Rc::new(out);
        self.gen_products.borrow_mut().insert((a, b), out.clone());
        Ok(out)
    }

    /// `g_(i)(∂^e h) = Σ_r C(e, r) · i!/(i−r)! · ∂^{e−r}(g_(i−r) h)`.
    fn gen_on_factor(&self, g: GenId, i: u32, y: Factor) -> Result<Shared<C>> {
        let key = (g, i, y);
        if let Some(v) = self.gen_on_factor.borrow().get(&key) {
            return Ok(v.clone());
        }
        let prods = self.generator_products(g, y.gen)?;
        let e = y.der as u32;
        let mut out = FieldExpr::zero();
        for r in 0..=e.min(i) {
            let idx = (i - r) as usize;
            let Some(p) = prods.get(idx) else { continue };
            if p.is_zero() {
                continue;
            }
            let falling = Rational::from_integer(factorial(i) / factorial(i - r));
            let c = C::from_rational(binomial(e as i64, r) * falling);
            let d = self.derivative_pow(p, e - r)?;
            out.add_scaled(&d, &c);
        }
        let out = Rc::new(out);
        self.gen_on_factor.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    /// `x_(j) y` for single factors, `j ≥ 0`.
    fn factor_on_factor(&self, x: Factor, j: u32, y: Factor) -> Result<FieldExpr<C>> {
        let d = x.der as u32;
        if j < d {
            return Ok(FieldExpr::zero());
        }
        let falling = Rational::from_integer(factorial(j) / factorial(j - d));
        let c = C::from_rational(falling) * sign::<C>(d % 2 == 1);
        Ok(self.gen_on_factor(x.gen, j - d, y)?.scale(&c))
    }

    /// Highest `j` with possibly nonzero `x_(j) y` for factors.
    fn factor_pole_bound(&self, x: Factor, y: Factor) -> Result<Option<u32>> {
        let n = self.generator_products(x.gen, y.gen)?.len();
        if n == 0 {
            return Ok(None);
        }
        Ok(Some(n as u32 - 1 + x.der as u32 + y.der as u32))
    }

    /// `:xy: − p:yx: = Σ_j (−1)^j ∂^{j+1}(x_(j) y)/(j+1)!`.
    fn correction(&self, x: Factor, y: Factor) -> Result<Shared<C>> {
        if let Some(v) = self.corrections.borrow().get(&(x, y)) {
            return Ok(v.clone());
        }
        let mut out = FieldExpr::zero();
        if let Some(top) = self.factor_pole_bound(x, y)? {
            for j in 0..=top {
                let p = self.factor_on_factor(x, j, y)?;
                if p.is_zero() {
                    continue;
                }
                let d = self.derivative_pow(&p, j + 1)?;
                let c = sign::<C>(j % 2 == 1) * inv_factorial::<C>(j + 1);
                out.add_scaled(&d, &c);
            }
        }
        let out = Rc::new(out);
        self.corrections.borrow_mut().insert((x, y), out.clone());
        Ok(out)
    }

    // ----- derivatives

    pub fn derivative(&self, e: &FieldExpr<C>) -> Result<FieldExpr<C>> {
        self.check_expr(e)?;
        self.derivative_expr(e)
    }

    fn derivative_expr(&self, e: &FieldExpr<C>) -> Result<FieldExpr<C>> {
        let mut out = FieldExpr::zero();
        for (m, c) in e.terms() {
            out.add_scaled(&*self.derivative_mono(m)?, c);
        }
        Ok(out)
    }

    /// `∂^t e` without the factorial.
    pub fn derivative_pow(&self, e: &FieldExpr<C>, t: u32) -> Result<FieldExpr<C>> {
        let mut cur = e.clone();
        for _ in 0..t {
            if cur.is_zero() {
                break;
            }
            cur = self.derivative_expr(&cur)?;
        }
        Ok(cur)
    }

    fn derivative_mono(&self, m: &Monomial<C>) -> Result<Shared<C>> {
        if let Some(v) = self.derivatives.borrow().get(m) {
            return Ok(v.clone());
        }
        let fs = m.factors();
        let exp = m.exponent();
        let mut out = FieldExpr::zero();
        let mut buf: Vec<Factor> = fs.to_vec();
        for i in 0..fs.len() {
            buf[i] = fs[i].raised(1);
            out.add_scaled(&self.rebuild(&buf, exp)?, &C::one());
            buf[i] = fs[i];
        }
        if let Some(l) = exp {
            for (b, c) in l.entries() {
                buf.push(Factor::new(*b, 0));
                out.add_scaled(&self.rebuild(&buf, exp)?, c);
                buf.pop();
            }
        }
        self.charge(out.len())?;
        let out = Rc::new(out);
        self.derivatives.borrow_mut().insert(m.clone(), out.clone());
        Ok(out)
    }

    /// Canonical form of `:f₁ :f₂ … :f_r e^λ:…::` for an arbitrary factor list.
    fn rebuild(&self, fs: &[Factor], exp: Option<&ExponentVector<C>>) -> Result<FieldExpr<C>> {
        let canonical = fs.windows(2).all(|w| w[0] < w[1] || (w[0] == w[1] && !self.odd(w[0])));
        if canonical {
            return Ok(FieldExpr::monomial(Monomial::from_parts(fs, exp.cloned())));
        }
        let mut z = FieldExpr::monomial(Monomial::from_parts(&[], exp.cloned()));
        for f in fs.iter().rev() {
            z = self.no_factor_expr(*f, &z)?;
        }
        Ok(z)
    }

    // ----- normal ordering

    fn no_factor_expr(&self, f: Factor, e: &FieldExpr<C>) -> Result<FieldExpr<C>> {
        let mut out = FieldExpr::zero();
        for (m, c) in e.terms() {
            out.add_scaled(&*self.no_factor(f, m)?, c);
        }
        Ok(out)
    }

    /// `:f Y:` for a single factor `f`.
    fn no_factor(&self, f: Factor, y: &Monomial<C>) -> Result<Shared<C>> {
        let Some((y1, rest)) = y.split_first() else {
            return Ok(Rc::new(FieldExpr::monomial(y.prepend(f))));
        };
        if f < y1 || (f == y1 && !self.odd(f)) {
            return Ok(Rc::new(FieldExpr::monomial(y.prepend(f))));
        }
        let key = (f, y.clone());
        if let Some(v) = self.no_factor.borrow().get(&key) {
            return Ok(v.clone());
        }
        let out = if f == y1 {
            // 2:f:fY:: = :(:ff: + :ff:) Y: for odd f
            let corr = self.correction(f, f)?;
            let half = C::from_rational(Rational::new(1.into(), 2.into()));
            self.nth_expr_mono(&corr, -1, &rest)?.scale(&half)
        } else {
            let inner = self.no_factor(f, &rest)?;
            let p = sign::<C>(self.odd(f) && self.odd(y1));
            let mut out = self.no_factor_expr(y1, &inner)?.scale(&p);
            let corr = self.correction(f, y1)?;
            out.add_scaled(&self.nth_expr_mono(&corr, -1, &rest)?, &C::one());
            out
        };
        self.charge(out.len())?;
        let out = Rc::new(out);
        self.no_factor.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    // ----- products

    /// Upper bound for `n` with possibly nonzero `X_(n) Y`.
    fn mode_bound(&self, x: &Monomial<C>, y: &Monomial<C>) -> Result<i64> {
        let w = self.pres.monomial_weight(x) + self.pres.monomial_weight(y) - Rational::one();
        let pair = match (x.exponent(), y.exponent()) {
            (Some(l), Some(m)) => self.integer_pairing(l, m)?,
            _ => 0,
        };
        Ok(floor_i64(&w) - pair)
    }

    fn integer_pairing(&self, l: &ExponentVector<C>, m: &ExponentVector<C>) -> Result<i64> {
        use num_traits::ToPrimitive;
        let p = self.pres.pairing(l, m);
        p.integer_part()
            .and_then(|n| n.to_i64())
            .ok_or_else(|| Error::GeneralizedExponent(p.to_string()))
    }

    fn nth_expr_mono(&self, x: &FieldExpr<C>, n: i64, y: &Monomial<C>) -> Result<FieldExpr<C>> {
        let mut out = FieldExpr::zero();
        for (m, c) in x.terms() {
            out.add_scaled(&*self.nth_mono(m, n, y)?, c);
        }
        Ok(out)
    }

    fn nth_mono_expr(&self, x: &Monomial<C>, n: i64, y: &FieldExpr<C>) -> Result<FieldExpr<C>> {
        let mut out = FieldExpr::zero();
        for (m, c) in y.terms() {
            out.add_scaled(&*self.nth_mono(x, n, m)?, c);
        }
        Ok(out)
    }

    /// `X_(n) Y` for monomials and any integer `n`.
    fn nth_mono(&self, x: &Monomial<C>, n: i64, y: &Monomial<C>) -> Result<Shared<C>> {
        if x.is_identity() {
            return Ok(Rc::new(if n == -1 { FieldExpr::monomial(y.clone()) } else { FieldExpr::zero() }));
        }
        let Some((x1, rest)) = x.split_first() else {
            return self.exp_mode(x.exponent().expect("non-identity"), n, y);
        };
        if rest.is_identity() {
            return Ok(Rc::new(self.factor_mode(x1, n, y)?));
        }
        if n >= 0 && n > self.mode_bound(x, y)? {
            return Ok(Rc::new(FieldExpr::zero()));
        }
        let key = (x.clone(), n, y.clone());
        if let Some(v) = self.nth.borrow().get(&key) {
            return Ok(v.clone());
        }
        // (:x₁X':)_(n) Y = Σ_i x₁_(−1−i) X'_(n+i) Y + p Σ_j X'_(n−1−j) x₁_(j) Y
        let mut out = FieldExpr::zero();
        let top = self.mode_bound(&rest, y)?;
        let mut i: u32 = 0;
        while n + i as i64 <= top {
            let t = self.nth_mono(&rest, n + i as i64, y)?;
            if !t.is_zero() {
                let d = u16::try_from(i).expect("derivative order");
                out.add_scaled(&self.no_factor_expr(x1.raised(d), &t)?, &inv_factorial::<C>(i));
            }
            i += 1;
        }
        let p = sign::<C>(self.odd(x1) && self.pres.monomial_odd(&rest));
        let top1 = self.mode_bound(&Monomial::from_factor(x1), y)?;
        for j in 0..=top1.max(-1) {
            let a = self.factor_mode(x1, j, y)?;
            if a.is_zero() {
                continue;
            }
            out.add_scaled(&self.nth_mono_expr(&rest, n - 1 - j, &a)?, &p);
        }
        self.charge(out.len())?;
        let out = Rc::new(out);
        self.nth.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    /// `(∂^d g)_(n) = (−1)^d n(n−1)…(n−d+1) g_(n−d)`.
    fn factor_mode(&self, x: Factor, n: i64, y: &Monomial<C>) -> Result<FieldExpr<C>> {
        let d = x.der as i64;
        let mut coef = C::one();
        for t in 0..d {
            coef = coef * int::<C>(-(n - t));
        }
        if coef.is_zero() {
            return Ok(FieldExpr::zero());
        }
        Ok(self.gen_mode(x.gen, n - d, y)?.scale(&coef))
    }

    fn gen_mode(&self, g: GenId, n: i64, y: &Monomial<C>) -> Result<Shared<C>> {
        if n < 0 {
            let t = (-n - 1) as u32;
            let d = u16::try_from(t).expect("derivative order");
            let nf = self.no_factor(Factor::new(g, d), y)?;
            return Ok(if t <= 1 { nf } else { Rc::new(nf.scale(&inv_factorial::<C>(t))) });
        }
        let key = (g, n, y.clone());
        if let Some(v) = self.gen_mode.borrow().get(&key) {
            return Ok(v.clone());
        }
        let out = match y.split_first() {
            None => match y.exponent() {
                Some(l) if n == 0 => FieldExpr::monomial(y.clone()).scale(&self.pres.pairing_gen_exp(g, l)),
                _ => FieldExpr::zero(),
            },
            Some((y1, rest)) => {
                // g_(n) :y₁Y': = p :y₁ g_(n)Y': + Σ_i C(n,i) (g_(i)y₁)_(n−1−i) Y'
                let inner = self.gen_mode(g, n, &rest)?;
                let p = sign::<C>(self.pres.parity(g).is_odd() && self.odd(y1));
                let mut out = self.no_factor_expr(y1, &inner)?.scale(&p);
                for i in 0..=n {
                    let z = self.gen_on_factor(g, i as u32, y1)?;
                    if z.is_zero() {
                        continue;
                    }
                    let c = C::from_rational(binomial(n, i as u32));
                    out.add_scaled(&self.nth_expr_mono(&z, n - 1 - i, &rest)?, &c);
                }
                out
            }
        };
        self.charge(out.len())?;
        let out = Rc::new(out);
        self.gen_mode.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    fn exp_mode(&self, l: &ExponentVector<C>, n: i64, y: &Monomial<C>) -> Result<Shared<C>> {
        let key = (l.clone(), n, y.clone());
        if let Some(v) = self.exp_mode.borrow().get(&key) {
            return Ok(v.clone());
        }
        let out = match y.split_first() {
            Some((y1, rest)) => {
                // [e^λ_(n), (∂^e h)_(−1)] = −e!⟨h,λ⟩ e^λ_(n−1−e)
                let inner = self.exp_mode(l, n, &rest)?;
                let mut out = self.no_factor_expr(y1, &inner)?;
                let s = self.pres.pairing_gen_exp(y1.gen, l);
                if !s.is_zero() {
                    let e = y1.der as u32;
                    let shifted = self.exp_mode(l, n - 1 - e as i64, &rest)?;
                    let c = -(s * C::from_rational(Rational::from_integer(factorial(e))));
                    out.add_scaled(&shifted, &c);
                }
                out
            }
            None => {
                let zero = ExponentVector::zero();
                let mu = y.exponent().unwrap_or(&zero);
                let pair = self.integer_pairing(l, mu)?;
                let j = -n - 1 - pair;
                if j < 0 {
                    FieldExpr::zero()
                } else {
                    (*self.schur(l, j as u32, &l.add(mu))?).clone()
                }
            }
        };
        self.charge(out.len())?;
        let out = Rc::new(out);
        self.exp_mode.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    /// Coefficient of `x^j` in `exp(Σ_r λ_(−r) x^r / r) e^ν`, built from
    /// `j S_j = Σ_r λ_(−r) S_{j−r}`.
    fn schur(&self, l: &ExponentVector<C>, j: u32, nu: &ExponentVector<C>) -> Result<Shared<C>> {
        if j == 0 {
            return Ok(Rc::new(FieldExpr::exponential(nu.clone())));
        }
        let key = (l.clone(), j, nu.clone());
        if let Some(v) = self.schur.borrow().get(&key) {
            return Ok(v.clone());
        }
        let mut out = FieldExpr::zero();
        for r in 1..=j {
            let prev = self.schur(l, j - r, nu)?;
            let d = u16::try_from(r - 1).expect("derivative order");
            for (b, c) in l.entries() {
                let t = self.no_factor_expr(Factor::new(*b, d), &prev)?;
                out.add_scaled(&t, &(c.clone() * inv_factorial::<C>(r - 1)));
            }
        }
        let out = out.scale(&(C::one() / int::<C>(j as i64)));
        self.charge(out.len())?;
        let out = Rc::new(out);
        self.schur.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    // ----- public products

    /// `a_(n) b` for any integer `n`; `n = −1` is the normally ordered
    /// product.
    pub fn nth_product(&self, a: &FieldExpr<C>, n: i64, b: &FieldExpr<C>) -> Result<FieldExpr<C>> {
        self.check_expr(a)?;
        self.check_expr(b)?;
        let mut out = FieldExpr::zero();
        for (x, cx) in a.terms() {
            for (y, cy) in b.terms() {
                let t = self.nth_mono(x, n, y)?;
                out.add_scaled(&t, &(cx.clone() * cy.clone()));
            }
        }
        Ok(out)
    }

    pub fn normal_order(&self, a: &FieldExpr<C>, b: &FieldExpr<C>) -> Result<FieldExpr<C>> {
        self.nth_product(a, -1, b)
    }

    /// All nonnegative products `a_(n) b`, trailing zeros removed. Entry `n`
    /// is the coefficient of the pole of order `n + 1`.
    pub fn products(&self, a: &FieldExpr<C>, b: &FieldExpr<C>) -> Result<Vec<FieldExpr<C>>> {
        self.check_expr(a)?;
        self.check_expr(b)?;
        let mut out: Vec<FieldExpr<C>> = Vec::new();
        for (x, cx) in a.terms() {
            for (y, cy) in b.terms() {
                let top = self.mode_bound(x, y)?;
                for n in 0..=top.max(-1) {
                    let t = self.nth_mono(x, n, y)?;
                    if t.is_zero() {
                        continue;
                    }
                    let n = n as usize;
                    if out.len() <= n {
                        out.resize(n + 1, FieldExpr::zero());
                    }
                    out[n].add_scaled(&t, &(cx.clone() * cy.clone()));
                }
            }
        }
        while out.last().is_some_and(|p| p.is_zero()) {
            out.pop();
        }
        Ok(out)
    }

    /// Highest possibly nonzero mode between two expressions, `None` if
    /// every nonnegative product vanishes for degree reasons.
    pub fn pole_bound(&self, a: &FieldExpr<C>, b: &FieldExpr<C>) -> Result<Option<i64>> {
        let mut best: Option<i64> = None;
        for (x, _) in a.terms() {
            for (y, _) in b.terms() {
                let t = self.mode_bound(x, y)?;
                if t >= 0 {
                    best = Some(best.map_or(t, |b| b.max(t)));
                }
            }
        }
        Ok(best)
    }
}
