//! Tilded generators for the inverse reduction at the hook `(n, m)`: a
//! change of free-field coordinates on Heisenberg ⊗ Π ⊗ ghosts for
//! `Δ₀⁺ ∖ θ₀`, with `θ₀ = α_{1,m−1}`.
//!
//! Tilded expressions are ordinary [`Expr`]s over the ambient presentation
//! whose generator symbols are read as the tilded generators.

use std::collections::BTreeMap;

use super::{beta_name, gamma_name, heis_name, FreeFieldStack, StackSpec, Substitution};
use crate::error::{Error, Result};
use crate::opecore::{Engine, ExponentVector};
use crate::rootdata::{Root, RootDatum};
use crate::scalars::{Rational, Scalar};
use crate::Expr;

type Shape = Vec<i64>;

fn shape(n: usize, (i, j): Root) -> Shape {
    (1..=n).map(|l| i64::from(i <= l && l <= j)).collect()
}

fn combine(terms: &[(i64, &Shape)]) -> Shape {
    let n = terms[0].1.len();
    (0..n).map(|l| terms.iter().map(|(s, v)| s * v[l]).sum()).collect()
}

/// The tilded family together with its inverse.
#[derive(Clone, Debug)]
pub struct TildeFamily {
    n: usize,
    m: usize,
    stack: FreeFieldStack,
    roots: Vec<Root>,
    definitions: Vec<(String, Expr)>,
    inverse: Vec<(String, Expr)>,
    /// `Σ :β_a β_a' e^{−c}:` over ordered pairs with `a + a' = θ₀`.
    pair_sum: Expr,
    /// `Σ :γ_a β_a' β_a'' e^{−c}:` over ordered triples with
    /// `−a + a' + a'' = θ₀`.
    triple_sum: Expr,
}

/// Builds the family for `2 ≤ m ≤ n+1`. For `m = 2` there are no ghosts
/// and only `α̃`, `c̃`, `d̃` are produced.
pub fn tilde_family(n: usize, m: usize) -> Result<TildeFamily> {
    if n == 0 || m < 2 || m > n + 1 {
        return Err(Error::OutOfRange(format!("(n, m) = ({n}, {m}) for a tilde family")));
    }
    let stack = FreeFieldStack::new(StackSpec::tilde(n, m)?)?;
    let roots = stack.spec().ghosts.clone();
    let theta = shape(n, (1, m - 1));
    let shapes: BTreeMap<Root, Shape> = roots.iter().map(|&r| (r, shape(n, r))).collect();
    let h = Scalar::int(n as i64 + 1);
    let kh = stack.shifted_level();
    let omega_coef = Scalar::rational(RootDatum::new(n)?.inverse_cartan(m - 1, m - 1));
    let half = Scalar::frac(1, 2);
    debug_assert_eq!(kh, Scalar::k() + h);

    let eng = stack.engine();
    let em = stack.vop(&[("c", Scalar::int(-1))])?;
    let c = stack.gen("c")?;
    let d = stack.gen("d")?;
    let no = |xs: &[Expr]| -> Result<Expr> {
        let mut acc = em.clone();
        for x in xs.iter().rev() {
            acc = eng.normal_order(x, &acc)?;
        }
        Ok(acc)
    };
    let b = |r: Root| stack.beta(r);
    let g = |r: Root| stack.gamma(r);

    // Σ :β_a' β_a'' e^{−c}: over ordered pairs with a' + a'' = target.
    let beta_pairs = |target: &Shape| -> Result<Expr> {
        let mut out = Expr::zero();
        for (&a1, s1) in &shapes {
            for (&a2, s2) in &shapes {
                if &combine(&[(1, s1), (1, s2)]) == target {
                    out = out.add(&no(&[b(a1)?, b(a2)?])?);
                }
            }
        }
        Ok(out)
    };
    let pair_sum = beta_pairs(&theta)?;
    let mut triple_sum = Expr::zero();
    for (&a, s) in &shapes {
        for (&a1, s1) in &shapes {
            for (&a2, s2) in &shapes {
                if combine(&[(-1, s), (1, s1), (1, s2)]) == theta {
                    triple_sum = triple_sum.add(&no(&[g(a)?, b(a1)?, b(a2)?])?);
                }
            }
        }
    }

    let mut definitions = Vec::new();
    let mut inverse = Vec::new();
    for i in 1..=n {
        let a = stack.alpha(i)?;
        let shift = if i == m - 1 { c.scale(&kh) } else { Expr::zero() };
        definitions.push((heis_name(i), a.sub(&shift)));
        inverse.push((heis_name(i), a.add(&shift)));
    }
    for (&a, s) in &shapes {
        let plus = beta_pairs(&combine(&[(1, &theta), (1, s)]))?.scale(&half);
        definitions.push((beta_name(a), b(a)?.sub(&plus)));
        inverse.push((beta_name(a), b(a)?.add(&plus)));
    }
    for (&a, s) in &shapes {
        let target = combine(&[(1, &theta), (-1, s)]);
        let mut corr = Expr::zero();
        for (&a1, s1) in &shapes {
            if *s1 == target {
                corr = corr.add(&no(&[b(a1)?])?);
            }
        }
        for (&a2, s2) in &shapes {
            for (&a3, s3) in &shapes {
                if combine(&[(1, s3), (-1, s2)]) == target {
                    corr = corr.add(&no(&[g(a2)?, b(a3)?])?);
                }
            }
        }
        definitions.push((gamma_name(a), g(a)?.add(&corr)));
        inverse.push((gamma_name(a), g(a)?.sub(&corr)));
    }
    let omega = stack.omega(m - 1)?.scale(&Scalar::int(2));
    let lin = c.scale(&(&kh * &omega_coef));
    let quad = pair_sum.add(&triple_sum);
    definitions.push(("d".into(), d.sub(&lin).add(&omega).sub(&quad)));
    inverse.push(("d".into(), d.sub(&lin).sub(&omega).add(&quad)));
    drop(eng);

    Ok(TildeFamily { n, m, stack, roots, definitions, inverse, pair_sum, triple_sum })
}

impl TildeFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta0(&self) -> Root {
        (1, self.m - 1)
    }

    /// Roots of `Δ₀⁺ ∖ θ₀`.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn stack(&self) -> &FreeFieldStack {
        &self.stack
    }

    /// `C⁻¹_{m−1,m−1}` of `sl_{n+1}`.
    pub fn omega_coefficient(&self) -> Rational {
        RootDatum::new(self.n).map(|r| r.inverse_cartan(self.m - 1, self.m - 1)).expect("rank checked")
    }

    /// Tilded generators as expressions in the untilded ones. `c̃ = c` is
    /// left implicit.
    pub fn definitions(&self) -> &[(String, Expr)] {
        &self.definitions
    }

    /// Untilded generators as expressions in the tilded ones.
    pub fn inverse(&self) -> &[(String, Expr)] {
        &self.inverse
    }

    pub fn definition(&self, name: &str) -> Result<&Expr> {
        lookup(&self.definitions, name)
    }

    pub fn pair_sum(&self) -> &Expr {
        &self.pair_sum
    }

    pub fn triple_sum(&self) -> &Expr {
        &self.triple_sum
    }

    /// Image of the exponent direction `α_i`; only `α_{m−1}` moves.
    fn exponent_image(&self, i: usize, sign: i64) -> Result<ExponentVector<Scalar>> {
        let pres = self.stack.presentation();
        let a = pres.id(&heis_name(i))?;
        if i != self.m - 1 {
            return Ok(ExponentVector::single(a, Scalar::int(1)));
        }
        let c = pres.id("c")?;
        Ok(ExponentVector::new([(a, Scalar::int(1)), (c, self.stack.shifted_level() * Scalar::int(sign))]))
    }

    fn substitute(&self, table: &[(String, Expr)], sign: i64, e: &Expr) -> Result<Expr> {
        let pres = self.stack.presentation();
        let eng = Engine::new(pres);
        let mut s = Substitution::new(pres, &eng);
        for (name, img) in table {
            s.map_generator(name, img.clone())?;
        }
        for i in 1..=self.n {
            s.map_direction(&heis_name(i), self.exponent_image(i, sign)?)?;
        }
        s.apply(e)
    }

    /// Rewrites an expression in tilded generators in terms of the
    /// untilded ones.
    pub fn untilde(&self, e: &Expr) -> Result<Expr> {
        self.substitute(&self.definitions, -1, e)
    }

    /// Rewrites an expression in untilded generators in terms of the
    /// tilded ones.
    pub fn retilde(&self, e: &Expr) -> Result<Expr> {
        self.substitute(&self.inverse, 1, e)
    }

    /// Display name of a tilded generator.
    pub fn tilde_name(name: &str) -> String {
        format!("{name}~")
    }
}

fn lookup<'a>(table: &'a [(String, Expr)], name: &str) -> Result<&'a Expr> {
    table
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, e)| e)
        .ok_or_else(|| Error::UnknownGenerator(name.into()))
}
