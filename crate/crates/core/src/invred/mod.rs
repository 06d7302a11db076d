//! Verification of the inverse-reduction embeddings: kernel checks, the
//! bosonize-and-retilde pipeline, the sl₄ embedding into the minimal
//! W-algebra, composite screening data, the leading-term specialization
//! property and the stack counts of the reduction chain.

mod campaigns;
mod report;

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freefields::{
    appendix_table, fms_substitution, fms_target, tilde_family, EmbeddingTable, FreeFieldStack, StackSpec,
};
use crate::opecore::{format_expr, ope, zero_mode_action, ScreeningField};
use crate::rootdata::{BasisElement, Root, RootDatum};
use crate::scalars::{Poly, Rational, Scalar};
use crate::Expr;

pub use campaigns::{
    axiom_presentation, brst_checks, central_charge_checks, jacobi_defect, run_campaign, screening_checks, tilde_checks, w_jacobi,
    CampaignConfig, CAMPAIGNS,
};
pub use report::{difference, nonzero, CheckResult, Status, Summary, VerificationReport};

/// A screening field with a display label.
pub type NamedScreening = (String, ScreeningField<Scalar>);

/// `zero_mode_action(s, v) = 0` for every screening `s` and image `v`.
/// Check ids are `{prefix}/{screening}/{entry}`.
pub fn kernel_check(prefix: &str, table: &EmbeddingTable, screenings: &[NamedScreening]) -> VerificationReport {
    let stack = table.stack();
    let jobs: Vec<(&NamedScreening, &(String, Expr))> =
        screenings.iter().flat_map(|s| table.entries().iter().map(move |e| (s, e))).collect();
    let checks = jobs
        .par_iter()
        .map_init(
            || stack.engine(),
            |eng, ((sname, s), (ename, img))| {
                CheckResult::run(format!("{prefix}/{sname}/{ename}"), || {
                    Ok(nonzero(stack.presentation(), &zero_mode_action(eng, s, img)?))
                })
            },
        )
        .collect();
    VerificationReport { campaign: "kernels".into(), checks }
}

/// Labels screenings `{stem}1, {stem}2, …`.
pub fn label_screenings(stem: &str, screenings: Vec<ScreeningField<Scalar>>) -> Vec<NamedScreening> {
    screenings.into_iter().enumerate().map(|(i, s)| (format!("{stem}{}", i + 1), s)).collect()
}

/// Bosonizes the ghost pair at `θ₀ = α_{1,m−1}` of every entry of `table`
/// and rewrites the result in the tilded generators of the hook `(n, m)`.
/// The returned table lives over the tilded stack and its symbols are read
/// as tilded generators; the report checks that untilding gives back the
/// bosonized image.
pub fn pipeline_bosonize_retilde(
    n: usize,
    m: usize,
    table: &EmbeddingTable,
) -> Result<(EmbeddingTable, VerificationReport)> {
    let fam = tilde_family(n, m)?;
    let theta = fam.theta0();
    if fms_target(table.stack().spec(), theta)? != *fam.stack().spec() {
        return Err(Error::MissingTable(format!(
            "a table over the hook stack ({n}, {m}); got `{}`",
            table.stack().spec()
        )));
    }
    let target = fam.stack();
    let eng = target.engine();
    let sub = fms_substitution(table.stack(), &eng, theta)?;
    let mut entries = Vec::with_capacity(table.entries().len());
    let mut report = VerificationReport::new("pipeline");
    for (name, e) in table.entries() {
        let img = sub.apply(e)?;
        let tilded = fam.retilde(&img)?;
        report.check(format!("pipeline/{n},{m}/{name}/round-trip"), || {
            Ok(difference(target.presentation(), &fam.untilde(&tilded)?, &img))
        });
        entries.push((name.clone(), tilded));
    }
    Ok((EmbeddingTable::new(target.clone(), entries), report))
}

/// Images of the whole basis of `sl_{n+1}`: the listed ones plus the
/// composite root vectors, obtained from 0-products of listed images.
pub fn basis_images(table: &EmbeddingTable, n: usize) -> Result<Vec<(BasisElement, Expr)>> {
    let r = RootDatum::new(n)?;
    let eng = table.stack().engine();
    let mut images: Vec<(BasisElement, Expr)> = Vec::new();
    let find = |imgs: &[(BasisElement, Expr)], b: BasisElement| imgs.iter().find(|(x, _)| *x == b).map(|(_, e)| e.clone());
    for b in r.basis() {
        if let Ok(e) = table.get(&b.to_string()) {
            images.push((b, e.clone()));
        }
    }
    for len in 1..n {
        for i in 1..=n - len {
            let j = i + len;
            for (target, x, y) in [
                (BasisElement::E(i, j), BasisElement::E(i, i), BasisElement::E(i + 1, j)),
                (BasisElement::F(i, j), BasisElement::F(i + 1, j), BasisElement::F(i, i)),
            ] {
                let coef = r.bracket(x, y)?.get(&target).cloned().unwrap_or_default();
                let inv = Scalar::rational(coef).inv()?;
                if find(&images, target).is_some() {
                    continue;
                }
                let (ix, iy) = (find(&images, x), find(&images, y));
                let (Some(ix), Some(iy)) = (ix, iy) else {
                    return Err(Error::MissingTable(format!("image of {x} or {y}")));
                };
                images.push((target, ope(&eng, &ix, &iy)?.pole(1).scale(&inv)));
            }
        }
    }
    images.sort_by_key(|(b, _)| *b);
    Ok(images)
}

/// Pairwise OPEs of the images of the sl₄ basis under the embedding into
/// the minimal W-algebra ⊗ Π ⊗ two ghost pairs: the simple pole must be the
/// image of the bracket, the double pole `k` times the trace form, and
/// nothing beyond. All 120 unordered pairs, self-pairs included.
pub fn verify_appendix_embedding() -> Result<VerificationReport> {
    let table = appendix_table()?;
    verify_affine_images(&table, 3, &Scalar::k(), "appendix")
}

/// Affine OPE check for a full set of basis images of `sl_{n+1}` at level
/// `level`.
pub fn verify_affine_images(
    table: &EmbeddingTable,
    n: usize,
    level: &Scalar,
    prefix: &str,
) -> Result<VerificationReport> {
    let r = RootDatum::new(n)?;
    let images = basis_images(table, n)?;
    let stack = table.stack();
    let pres = stack.presentation();
    let mut pairs = Vec::new();
    for (i, a) in images.iter().enumerate() {
        for b in &images[i..] {
            pairs.push((a, b));
        }
    }
    let image_of = |b: &BasisElement| images.iter().find(|(x, _)| x == b).map(|(_, e)| e);
    let checks = pairs
        .par_iter()
        .map_init(
            || stack.engine(),
            |eng, ((a, x), (b, y))| {
                CheckResult::run(format!("{prefix}/{a}/{b}"), || {
                    let got = ope(eng, x, y)?;
                    let mut want1 = Expr::zero();
                    for (e, c) in r.bracket(*a, *b)? {
                        let img = image_of(&e).ok_or_else(|| Error::MissingTable(e.to_string()))?;
                        want1.add_scaled(img, &Scalar::rational(c));
                    }
                    let want2 = Expr::scalar(level * &Scalar::rational(r.inner(*a, *b)));
                    if let Some(w) = difference(pres, &got.pole(1), &want1) {
                        return Ok(Some(format!("pole 1: {w}")));
                    }
                    if let Some(w) = difference(pres, &got.pole(2), &want2) {
                        return Ok(Some(format!("pole 2: {w}")));
                    }
                    for (p, e) in &got.poles {
                        if *p > 2 && !e.is_zero() {
                            return Ok(Some(format!("pole {p}: {}", format_expr(pres, e))));
                        }
                    }
                    Ok(None)
                })
            },
        )
        .collect();
    Ok(VerificationReport { campaign: "appendix-sl4".into(), checks })
}

/// The exponent `A_m` of the composite screening, in tilded generators:
/// `½(1 − (k+n+1)⟨ω_{m−1},ω_{m−1}⟩)c + ½d − ω_{m−1}` plus
/// `½Σ:ββe^{−c}: + ½Σ:γββe^{−c}:` over `Δ₀⁺ ∖ θ₀`. Never exponentiated.
#[derive(Clone, Debug)]
pub struct CompositeScreeningDatum {
    pub n: usize,
    pub m: usize,
    pub stack: FreeFieldStack,
    /// Coefficient of `c` in the linear part.
    pub c_coefficient: Scalar,
    pub linear: Expr,
    pub nonlinear: Expr,
}

impl CompositeScreeningDatum {
    pub fn body(&self) -> Expr {
        self.linear.add(&self.nonlinear)
    }
}

pub fn screening_exponent(n: usize, m: usize) -> Result<CompositeScreeningDatum> {
    let fam = tilde_family(n, m)?;
    let stack = fam.stack().clone();
    let half = Scalar::frac(1, 2);
    let omega_norm = Scalar::rational(fam.omega_coefficient());
    let c_coefficient = &half * &(Scalar::int(1) - stack.shifted_level() * omega_norm);
    let linear = stack
        .gen("c")?
        .scale(&c_coefficient)
        .add(&stack.gen("d")?.scale(&half))
        .sub(&stack.omega(m - 1)?);
    let nonlinear = fam.pair_sum().add(fam.triple_sum()).scale(&half);
    Ok(CompositeScreeningDatum { n, m, stack, c_coefficient, linear, nonlinear })
}

/// Divides out every factor `k+n+1` of `p`; returns what remains.
fn strip_critical(p: &Poly, n: usize) -> Poly {
    let crit = Poly::from_coeffs(vec![Rational::from_integer((n as i64 + 1).into()), Rational::from_integer(1.into())]);
    let mut p = p.clone();
    while !p.is_constant() {
        let (q, r) = p.div_rem(&crit);
        if !r.is_zero() {
            break;
        }
        p = q;
    }
    p
}

/// Leading-term property: no image has a pole in `k` away from
/// `k = −(n+1)`, and every image has a monomial with `k`-independent
/// coefficient.
pub fn specialization_check(table: &EmbeddingTable, n: usize) -> VerificationReport {
    let mut report = VerificationReport::new("specialization");
    for (name, e) in table.entries() {
        report.check(format!("specialization/{name}"), || {
            let mut k_free = false;
            for (_, c) in e.terms() {
                let rest = strip_critical(c.denominator(), n);
                if !rest.is_constant() {
                    return Ok(Some(format!("pole at noncritical k in coefficient {c}")));
                }
                k_free |= c.as_rational().is_some();
            }
            Ok((!k_free).then(|| "no k-independent monomial".to_string()))
        });
    }
    report
}

/// Numbers of Π factors and βγ pairs in the target of the composed chain
/// from the affine algebra (`m = n+1`) down to the hook `m`.
pub fn chain_signature(n: usize, m: usize) -> Result<(usize, usize)> {
    if m == 0 || m > n + 1 {
        return Err(Error::OutOfRange(format!("(n, m) = ({n}, {m}) for a chain")));
    }
    Ok((n + 1 - m, (n + m - 2) * (n + 1 - m) / 2))
}

/// Per-step counts read off the stacks: the step `m' → m'−1` trades the
/// hook stack at `m'` for the tilded stack, whose ghosts are those of the
/// hook `m'−1` plus `α_{i,m'−1}` for `2 ≤ i ≤ m'−1`, and one Π. The totals
/// must telescope to [`chain_signature`].
pub fn chain_report(n: usize, m_target: usize) -> Result<VerificationReport> {
    let (want_pi, want_ghosts) = chain_signature(n, m_target)?;
    let mut report = VerificationReport::new("chain");
    let mut pis = 0;
    let mut ghosts = 0;
    for step in (m_target + 1..=n + 1).rev() {
        let tilde = StackSpec::tilde(n, step)?;
        let lower = StackSpec::hook(n, step - 1)?;
        let extra: BTreeSet<Root> = tilde.ghosts.iter().filter(|r| !lower.ghosts.contains(r)).copied().collect();
        let want: BTreeSet<Root> = (2..step).map(|i| (i, step - 1)).collect();
        report.check(format!("chain/{n}/step/{step}"), || {
            if !lower.ghosts.iter().all(|r| tilde.ghosts.contains(r)) {
                return Ok(Some(format!("hook stack at m = {} is not contained in the tilded stack", step - 1)));
            }
            if !tilde.pi || tilde.heisenberg != lower.heisenberg {
                return Ok(Some("tilded stack lacks Π or changes the Heisenberg rank".into()));
            }
            if extra != want || extra.len() != step - 2 {
                return Ok(Some(format!("extra ghosts {extra:?}, expected {want:?}")));
            }
            Ok(None)
        });
        pis += 1;
        ghosts += extra.len();
    }
    report.check(format!("chain/{n}/total/{m_target}"), || {
        Ok(((pis, ghosts) != (want_pi, want_ghosts))
            .then(|| format!("steps give Π^{pis} ⊗ 𝒢^{ghosts}, expected Π^{want_pi} ⊗ 𝒢^{want_ghosts}")))
    });
    Ok(report)
}

#[cfg(test)]
mod tests;
