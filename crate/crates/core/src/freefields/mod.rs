//! Free-field algebras (Heisenberg, βγ ghosts, the half-lattice Π), the
//! abstract minimal sl₄ W-algebra, substitutions between them, FMS
//! bosonization, screening fields and the tilded field families.

mod screenings;
mod tables;
mod tilde;

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::opecore::{parse_expr, Engine, ExponentVector, FieldExpr, GenId, Presentation, ScreeningField};
use crate::rootdata::{good_grading, RootDatum, Root};
use crate::scalars::{Rational, Scalar};
use crate::Expr;

pub use screenings::{
    hook_screenings, rho_r, rho_r_bruteforce, wakimoto_screenings, DiffOpPoly, Polynomial,
};
pub use tables::{
    add_minimal_sl4, appendix_stack, appendix_table, minimal_sl4_central_charge, minimal_sl4_presentation,
    minimal_sl4_wakimoto_table, wakimoto_sl4_table, EmbeddingTable, MINIMAL_SL4_GENERATORS,
};
pub use tilde::{tilde_family, TildeFamily};

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Which free-field blocks a stack contains.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StackSpec {
    /// Rank `n` of the Heisenberg block at shifted level `k+n+1`; 0 for none.
    pub heisenberg: usize,
    /// Roots carrying a βγ pair.
    pub ghosts: Vec<Root>,
    pub pi: bool,
    pub minimal_sl4: bool,
}

impl StackSpec {
    /// Parses `+`-separated blocks: `heis:n=N`, `ghosts:n=N`,
    /// `ghosts:n=N,m=M` (roots of `Δ₀⁺`), `ghosts:roots=i.j/i.j`, `pi`,
    /// `wmin4`, and the presets `wakimoto:n=N`, `hook:n=N,m=M`,
    /// `tilde:n=N,m=M`, `appendix`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = StackSpec::default();
        for block in text.split('+').map(str::trim) {
            let (head, args) = block.split_once(':').unwrap_or((block, ""));
            let mut kv: HashMap<&str, &str> = HashMap::new();
            for a in args.split(',').filter(|a| !a.is_empty()) {
                let (k, v) = a
                    .split_once('=')
                    .ok_or_else(|| Error::Parse { offset: 0, msg: format!("bad stack argument `{a}`") })?;
                kv.insert(k.trim(), v.trim());
            }
            let num = |key: &str| -> Result<usize> {
                kv.get(key)
                    .ok_or_else(|| Error::Parse { offset: 0, msg: format!("`{head}` needs `{key}=`") })?
                    .parse()
                    .map_err(|_| Error::Parse { offset: 0, msg: format!("`{key}` must be a positive integer") })
            };
            match head {
                "heis" => spec.heisenberg = num("n")?,
                "pi" => spec.pi = true,
                "wmin4" => spec.minimal_sl4 = true,
                "ghosts" if kv.contains_key("roots") => {
                    for r in kv["roots"].split('/') {
                        let (i, j) = r
                            .split_once('.')
                            .ok_or_else(|| Error::Parse { offset: 0, msg: format!("bad root `{r}`") })?;
                        let parse = |s: &str| {
                            s.parse::<usize>().map_err(|_| Error::Parse { offset: 0, msg: format!("bad root `{r}`") })
                        };
                        spec.ghosts.push((parse(i)?, parse(j)?));
                    }
                }
                "ghosts" => {
                    let n = num("n")?;
                    spec.ghosts.extend(if kv.contains_key("m") {
                        good_grading(n, num("m")?)?.delta0_positive()
                    } else {
                        RootDatum::new(n)?.positive_roots()
                    });
                }
                "wakimoto" => spec = StackSpec::wakimoto(num("n")?)?,
                "hook" => spec = StackSpec::hook(num("n")?, num("m")?)?,
                "tilde" => spec = StackSpec::tilde(num("n")?, num("m")?)?,
                "appendix" => spec = StackSpec::appendix(),
                _ => return Err(Error::Parse { offset: 0, msg: format!("unknown stack block `{head}`") }),
            }
        }
        spec.ghosts.sort();
        spec.ghosts.dedup();
        Ok(spec)
    }

    /// Heisenberg of rank `n` with ghosts for all positive roots.
    pub fn wakimoto(n: usize) -> Result<Self> {
        Ok(StackSpec { heisenberg: n, ghosts: RootDatum::new(n)?.positive_roots(), ..Default::default() })
    }

    /// Heisenberg of rank `n` with ghosts for `Δ₀⁺`.
    pub fn hook(n: usize, m: usize) -> Result<Self> {
        Ok(StackSpec { heisenberg: n, ghosts: good_grading(n, m)?.delta0_positive(), ..Default::default() })
    }

    /// Heisenberg, Π and ghosts for `Δ₀⁺ ∖ θ₀`.
    pub fn tilde(n: usize, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::OutOfRange(format!("m = {m} for a tilde family")));
        }
        let mut s = StackSpec::hook(n, m)?;
        s.ghosts.retain(|&r| r != (1, m - 1));
        s.pi = true;
        Ok(s)
    }

    /// Minimal sl₄ W-algebra, Π and ghosts at `α_{2,3}`, `α_{3,3}`.
    pub fn appendix() -> Self {
        StackSpec { heisenberg: 0, ghosts: vec![(2, 3), (3, 3)], pi: true, minimal_sl4: true }
    }
}

impl fmt::Display for StackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.heisenberg > 0 {
            parts.push(format!("heis:n={}", self.heisenberg));
        }
        if !self.ghosts.is_empty() {
            let roots: Vec<String> = self.ghosts.iter().map(|(i, j)| format!("{i}.{j}")).collect();
            parts.push(format!("ghosts:roots={}", roots.join("/")));
        }
        if self.pi {
            parts.push("pi".into());
        }
        if self.minimal_sl4 {
            parts.push("wmin4".into());
        }
        write!(f, "{}", parts.join("+"))
    }
}

pub fn heis_name(i: usize) -> String {
    format!("a{i}")
}

pub fn beta_name((i, j): Root) -> String {
    format!("B[{i},{j}]")
}

pub fn gamma_name((i, j): Root) -> String {
    format!("G[{i},{j}]")
}

/// Presentation assembled from a [`StackSpec`]. Declaration order, and so
/// canonical order, is Heisenberg < ghosts < Π < W-generators.
#[derive(Clone, Debug)]
pub struct FreeFieldStack {
    spec: StackSpec,
    pres: Presentation<Scalar>,
}

impl FreeFieldStack {
    pub fn new(spec: StackSpec) -> Result<Self> {
        let mut pres = Presentation::new();
        let n = spec.heisenberg;
        if n > 0 {
            let r = RootDatum::new(n)?;
            let ids: Vec<GenId> = (1..=n).map(|i| pres.add_even(&heis_name(i), q(1))).collect::<Result<_>>()?;
            let level = Scalar::k_plus(n as i64 + 1);
            for i in 1..=n {
                for j in i..=n {
                    let c = r.cartan(i, j);
                    if c != 0 {
                        pres.set_scalar_pole(ids[i - 1], ids[j - 1], 1, &level * &Scalar::int(c))?;
                    }
                }
            }
            for g in ids {
                pres.declare_direction(g)?;
            }
        }
        for &root in &spec.ghosts {
            let b = pres.add_even(&beta_name(root), q(1))?;
            let g = pres.add_even(&gamma_name(root), q(0))?;
            pres.set_scalar_pole(b, g, 0, Scalar::int(-1))?;
        }
        if spec.pi {
            let c = pres.add_even("c", q(1))?;
            let d = pres.add_even("d", q(1))?;
            pres.set_scalar_pole(c, d, 1, Scalar::int(2))?;
            pres.declare_direction(c)?;
            pres.declare_direction(d)?;
        }
        if spec.minimal_sl4 {
            add_minimal_sl4(&mut pres)?;
        }
        Ok(FreeFieldStack { spec, pres })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(StackSpec::parse(text)?)
    }

    pub fn spec(&self) -> &StackSpec {
        &self.spec
    }

    pub fn presentation(&self) -> &Presentation<Scalar> {
        &self.pres
    }

    pub fn engine(&self) -> Engine<'_, Scalar> {
        Engine::new(&self.pres)
    }

    /// Shifted Heisenberg level `k+n+1`.
    pub fn shifted_level(&self) -> Scalar {
        Scalar::k_plus(self.spec.heisenberg as i64 + 1)
    }

    pub fn gen(&self, name: &str) -> Result<Expr> {
        Ok(FieldExpr::generator(self.pres.id(name)?))
    }

    pub fn alpha(&self, i: usize) -> Result<Expr> {
        self.gen(&heis_name(i))
    }

    pub fn beta(&self, r: Root) -> Result<Expr> {
        self.gen(&beta_name(r))
    }

    pub fn gamma(&self, r: Root) -> Result<Expr> {
        self.gen(&gamma_name(r))
    }

    /// `ω_j = Σ_i C⁻¹_{ji} α_i`, so that `ω_j(z)α_i(w)` has double pole
    /// `(k+n+1)δ_{ij}`.
    pub fn omega(&self, j: usize) -> Result<Expr> {
        let r = RootDatum::new(self.spec.heisenberg)?;
        let mut out = Expr::zero();
        for i in 1..=self.spec.heisenberg {
            out.add_scaled(&self.alpha(i)?, &Scalar::rational(r.inverse_cartan(j, i)));
        }
        Ok(out)
    }

    /// `e^λ` for `λ` given by direction names.
    pub fn vop(&self, entries: &[(&str, Scalar)]) -> Result<Expr> {
        Ok(FieldExpr::exponential(self.exponent(entries)?))
    }

    pub fn exponent(&self, entries: &[(&str, Scalar)]) -> Result<ExponentVector<Scalar>> {
        let mut v = Vec::new();
        for (name, c) in entries {
            let g = self.pres.id(name)?;
            if !self.pres.is_direction(g) {
                return Err(Error::ExponentPosition(format!("`{name}` is not an exponent direction")));
            }
            v.push((g, c.clone()));
        }
        Ok(ExponentVector::new(v))
    }

    pub fn parse_expr(&self, engine: &Engine<'_, Scalar>, text: &str) -> Result<Expr> {
        parse_expr(engine, text)
    }
}

/// Generator-wise map from one presentation into another, extended to
/// composite fields by rebuilding each right-nested normally ordered
/// monomial from the images of its factors. Generators without an explicit
/// image go to the target generator of the same name; exponent directions
/// map linearly.
pub struct Substitution<'s, 't> {
    source: &'s Presentation<Scalar>,
    target: &'s Engine<'t, Scalar>,
    images: HashMap<GenId, Expr>,
    directions: HashMap<GenId, ExponentVector<Scalar>>,
    cache: RefCell<HashMap<(GenId, u16), Expr>>,
}

impl<'s, 't> Substitution<'s, 't> {
    pub fn new(source: &'s Presentation<Scalar>, target: &'s Engine<'t, Scalar>) -> Self {
        Substitution { source, target, images: HashMap::new(), directions: HashMap::new(), cache: RefCell::default() }
    }

    pub fn map_generator(&mut self, name: &str, image: Expr) -> Result<()> {
        self.images.insert(self.source.id(name)?, image);
        Ok(())
    }

    pub fn map_direction(&mut self, name: &str, image: ExponentVector<Scalar>) -> Result<()> {
        let g = self.source.id(name)?;
        if !self.source.is_direction(g) {
            return Err(Error::ExponentPosition(format!("`{name}` is not an exponent direction")));
        }
        self.directions.insert(g, image);
        Ok(())
    }

    fn factor_image(&self, g: GenId, der: u16) -> Result<Expr> {
        if let Some(e) = self.cache.borrow().get(&(g, der)) {
            return Ok(e.clone());
        }
        let base = match self.images.get(&g) {
            Some(e) => e.clone(),
            None => {
                let name = self.source.name(g);
                let t = self.target.presentation().lookup(name).ok_or_else(|| Error::UnknownGenerator(name.into()))?;
                FieldExpr::generator(t)
            }
        };
        let img = self.target.derivative_pow(&base, der as u32)?;
        self.cache.borrow_mut().insert((g, der), img.clone());
        Ok(img)
    }

    fn exponent_image(&self, l: &ExponentVector<Scalar>) -> Result<ExponentVector<Scalar>> {
        let tp = self.target.presentation();
        let mut out = ExponentVector::zero();
        for (g, c) in l.entries() {
            let part = match self.directions.get(g) {
                Some(v) => v.clone(),
                None => {
                    if self.images.contains_key(g) {
                        return Err(Error::ExponentPosition(format!(
                            "direction `{}` has a non-linear image",
                            self.source.name(*g)
                        )));
                    }
                    let name = self.source.name(*g);
                    let t = tp.lookup(name).ok_or_else(|| Error::UnknownGenerator(name.into()))?;
                    if !tp.is_direction(t) {
                        return Err(Error::ExponentPosition(format!("`{name}` is not a target direction")));
                    }
                    ExponentVector::single(t, Scalar::int(1))
                }
            };
            out = out.add(&part.scale(c));
        }
        Ok(out)
    }

    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        let mut out = Expr::zero();
        for (m, c) in e.terms() {
            let mut acc = match m.exponent() {
                Some(l) => FieldExpr::exponential(self.exponent_image(l)?),
                None => FieldExpr::one(),
            };
            for f in m.factors().iter().rev() {
                let img = self.factor_image(f.gen, f.der)?;
                acc = self.target.normal_order(&img, &acc)?;
            }
            out.add_scaled(&acc, c);
        }
        Ok(out)
    }
}

/// Stack with the ghost pair at `root` traded for Π.
pub fn fms_target(source: &StackSpec, root: Root) -> Result<StackSpec> {
    if source.pi {
        return Err(Error::InvalidPresentation("the stack already contains Π".into()));
    }
    if !source.ghosts.contains(&root) {
        return Err(Error::OutOfRange(format!("ghost pair ({},{}) not in the stack", root.0, root.1)));
    }
    let mut t = source.clone();
    t.ghosts.retain(|&r| r != root);
    t.pi = true;
    Ok(t)
}

/// FMS map `β_ρ ↦ e^c`, `γ_ρ ↦ ½:(c+d)e^{−c}:` into the target of
/// [`fms_target`]; every other generator is fixed.
pub fn fms_substitution<'s, 't>(
    source: &'s FreeFieldStack,
    target: &'s Engine<'t, Scalar>,
    root: Root,
) -> Result<Substitution<'s, 't>> {
    let tp = target.presentation();
    let c = tp.id("c")?;
    let d = tp.id("d")?;
    let e_minus = FieldExpr::exponential(ExponentVector::single(c, Scalar::int(-1)));
    let cd = FieldExpr::generator(c).add(&FieldExpr::generator(d));
    let gamma_img = target.normal_order(&cd, &e_minus)?.scale(&Scalar::frac(1, 2));
    let mut s = Substitution::new(source.presentation(), target);
    s.map_generator(&beta_name(root), FieldExpr::exponential(ExponentVector::single(c, Scalar::int(1))))?;
    s.map_generator(&gamma_name(root), gamma_img)?;
    Ok(s)
}

/// Bosonizes `expr` over `source` at `root`, returning the target stack and
/// the image.
pub fn fms_bosonize(source: &FreeFieldStack, root: Root, expr: &Expr) -> Result<(FreeFieldStack, Expr)> {
    let target = FreeFieldStack::new(fms_target(source.spec(), root)?)?;
    let img = {
        let eng = target.engine();
        fms_substitution(source, &eng, root)?.apply(expr)?
    };
    Ok((target, img))
}

/// `e^{½c+½d}`, whose zero mode cuts the βγ system out of Π.
pub fn fms_screening(stack: &FreeFieldStack) -> Result<ScreeningField<Scalar>> {
    ScreeningField::new(stack.vop(&[("c", Scalar::frac(1, 2)), ("d", Scalar::frac(1, 2))])?)
}

#[cfg(test)]
mod tests;
