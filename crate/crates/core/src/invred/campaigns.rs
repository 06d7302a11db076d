//! Named verification campaigns.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::report::{difference, CheckResult, VerificationReport};
use super::{
    chain_report, kernel_check, label_screenings, pipeline_bosonize_retilde, specialization_check,
    verify_appendix_embedding,
};
use crate::brst::{brst_differential, brst_em_field, central_charge, hook_central_charge, j_level, ReductionDatum};
use crate::error::{Error, Result};
use crate::freefields::{
    appendix_table, fms_screening, fms_substitution, hook_screenings, minimal_sl4_central_charge,
    minimal_sl4_presentation, minimal_sl4_wakimoto_table, tilde_family, wakimoto_screenings, wakimoto_sl4_table,
    EmbeddingTable, FreeFieldStack, StackSpec, Substitution, TildeFamily, MINIMAL_SL4_GENERATORS,
};
use crate::opecore::{
    canonicalize, canonicalize_randomized, format_expr, lambda_bracket, ope, parse_expr, parse_raw, skew,
    zero_mode_action, Engine, FieldExpr, ModeOracle, Presentation, RawExpr, DEFAULT_BUDGET,
};
use crate::rootdata::{RootDatum, Variant};
use crate::scalars::{binomial, Rational, Scalar};
use crate::Expr;

/// Campaign names accepted by [`run_campaign`].
pub const CAMPAIGNS: [&str; 8] =
    ["appendix-sl4", "tilde", "s-equals-stilde", "kernels", "brst", "central-charges", "engine-axioms", "chain"];

/// Hook instances used when no `(n, m)` is given.
const TILDE_INSTANCES: [(usize, usize); 3] = [(3, 4), (4, 5), (4, 4)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CampaignConfig {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub variant: Variant,
    /// `sl2`, `sl3` or `sl4` for the BRST campaign.
    pub algebra: Option<String>,
    /// `prin` or `min` for the BRST campaign.
    pub f: Option<String>,
    pub seed: u64,
    /// Expansion budget of the engines in the property suites.
    pub budget: usize,
    /// Mode-oracle truncation.
    pub truncation: usize,
    /// Randomized composites per property.
    pub samples: usize,
    /// Randomized raw trees for the canonicalization property.
    pub trees: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            n: None,
            m: None,
            variant: Variant::Standard,
            algebra: None,
            f: None,
            seed: 2024,
            budget: DEFAULT_BUDGET,
            truncation: 6,
            samples: 200,
            trees: 500,
        }
    }
}

impl CampaignConfig {
    fn instances(&self, defaults: &[(usize, usize)]) -> Vec<(usize, usize)> {
        match (self.n, self.m) {
            (Some(n), Some(m)) => vec![(n, m)],
            _ => defaults.to_vec(),
        }
    }
}

pub fn run_campaign(name: &str, cfg: &CampaignConfig) -> Result<VerificationReport> {
    let mut report = match name {
        "appendix-sl4" => appendix_campaign()?,
        "tilde" => {
            let mut r = VerificationReport::default();
            for (n, m) in cfg.instances(&TILDE_INSTANCES) {
                r.extend(tilde_checks(n, m)?);
            }
            r
        }
        "s-equals-stilde" => {
            let mut r = VerificationReport::default();
            for (n, m) in cfg.instances(&TILDE_INSTANCES) {
                r.extend(screening_checks(n, m)?);
            }
            r
        }
        "kernels" => kernel_campaign()?,
        "brst" => brst_campaign(cfg)?,
        "central-charges" => central_charge_checks()?,
        "engine-axioms" => axiom_campaign(cfg)?,
        "chain" => {
            let mut r = VerificationReport::default();
            let pairs: Vec<(usize, usize)> = match (cfg.n, cfg.m) {
                (Some(n), Some(m)) => vec![(n, m)],
                (Some(n), None) => (1..=n + 1).map(|m| (n, m)).collect(),
                _ => (1..=7).flat_map(|n| (1..=n + 1).map(move |m| (n, m))).collect(),
            };
            for (n, m) in pairs {
                r.extend(chain_report(n, m)?);
            }
            r
        }
        _ => return Err(Error::OutOfRange(format!("campaign `{name}`"))),
    };
    report.campaign = name.to_string();
    Ok(report)
}

/// The embedding of `V^k(sl₄)` into the minimal W-algebra ⊗ Π ⊗ ghosts,
/// its leading-term property, and the pipeline that produces it from the
/// Wakimoto realisation.
fn appendix_campaign() -> Result<VerificationReport> {
    let mut report = verify_appendix_embedding()?;
    report.extend(specialization_check(&appendix_table()?, 3));
    let (tilded, pipe) = pipeline_bosonize_retilde(3, 4, &wakimoto_sl4_table()?)?;
    report.extend(pipe);
    let stack = tilded.stack();
    report.check("pipeline/3,4/e1/tilded-form", || {
        let want = stack.parse_expr(&stack.engine(), "no(G[2,3], vop{c: 1})")?;
        Ok(difference(stack.presentation(), tilded.get("e1")?, &want))
    });
    report.extend(appendix_agreement(&tilded)?);
    let (_, pipe) = pipeline_bosonize_retilde(3, 3, &minimal_sl4_wakimoto_table()?)?;
    report.extend(pipe);
    Ok(report)
}

/// Reads the listed embedding images through the Wakimoto realisation of
/// the minimal W-algebra (on tilded fields) and compares them with the
/// bosonized and retilded Wakimoto images of `sl₄`. Only entries whose
/// W-generators have a Wakimoto image available are compared.
pub fn appendix_agreement(tilded: &EmbeddingTable) -> Result<VerificationReport> {
    let source = appendix_table()?;
    let wtable = minimal_sl4_wakimoto_table()?;
    let stack = tilded.stack();
    let eng = stack.engine();
    let mut sub = Substitution::new(source.stack().presentation(), &eng);
    for (name, img) in wtable.entries() {
        sub.map_generator(name, img.clone())?;
    }
    let available: Vec<&str> = wtable.entries().iter().map(|(n, _)| n.as_str()).collect();
    let pres = source.stack().presentation();
    let mut report = VerificationReport::new("appendix-sl4");
    for (name, e) in source.entries() {
        let uses_missing = e.terms().any(|(m, _)| {
            m.factors().iter().any(|f| {
                let g = pres.name(f.gen);
                MINIMAL_SL4_GENERATORS.contains(&g) && !available.contains(&g)
            })
        });
        if uses_missing {
            continue;
        }
        report.check(format!("appendix/agreement/{name}"), || {
            Ok(difference(stack.presentation(), &sub.apply(e)?, tilded.get(name)?))
        });
    }
    Ok(report)
}

fn tilde_generators(fam: &TildeFamily) -> Result<Vec<(String, Expr)>> {
    let stack = fam.stack();
    let mut out: Vec<(String, Expr)> =
        fam.definitions().iter().map(|(n, _)| Ok((n.clone(), stack.gen(n)?))).collect::<Result<_>>()?;
    out.push(("c".into(), stack.gen("c")?));
    out.push(("vop{c: 1}".into(), stack.vop(&[("c", Scalar::int(1))])?));
    out.push(("vop{c: -1}".into(), stack.vop(&[("c", Scalar::int(-1))])?));
    Ok(out)
}

/// Every pair of tilded generators has the OPE of the corresponding
/// untilded pair, and the two substitutions invert each other.
pub fn tilde_checks(n: usize, m: usize) -> Result<VerificationReport> {
    let fam = tilde_family(n, m)?;
    let stack = fam.stack();
    let pres = stack.presentation();
    let gens = tilde_generators(&fam)?;
    let defs: Vec<Expr> = gens.iter().map(|(_, g)| fam.untilde(g)).collect::<Result<_>>()?;
    let mut report = VerificationReport::new("tilde");
    for (i, (name, g)) in gens.iter().enumerate() {
        report.check(format!("tilde/{n},{m}/round-trip/{name}"), || {
            if let Some(w) = difference(pres, &fam.retilde(&defs[i])?, g) {
                return Ok(Some(format!("retilde(untilde x) - x = {w}")));
            }
            Ok(difference(pres, &fam.untilde(&fam.retilde(g)?)?, g).map(|w| format!("untilde(retilde x) - x = {w}")))
        });
    }
    let pairs: Vec<(usize, usize)> = (0..gens.len()).flat_map(|i| (i..gens.len()).map(move |j| (i, j))).collect();
    let checks: Vec<CheckResult> = pairs
        .par_iter()
        .map_init(
            || stack.engine(),
            |eng, &(i, j)| {
                CheckResult::run(format!("tilde/{n},{m}/ope/{}~/{}~", gens[i].0, gens[j].0), || {
                    let target = ope(eng, &gens[i].1, &gens[j].1)?;
                    let got = ope(eng, &defs[i], &defs[j])?;
                    let orders: std::collections::BTreeSet<u32> =
                        target.poles.keys().chain(got.poles.keys()).copied().collect();
                    for p in orders {
                        if let Some(w) = difference(pres, &got.pole(p), &fam.untilde(&target.pole(p))?) {
                            return Ok(Some(format!("pole {p}: {w}")));
                        }
                    }
                    Ok(None)
                })
            },
        )
        .collect();
    report.checks.extend(checks);
    Ok(report)
}

/// The screenings `S_i`, `i ≤ m−2`, are untouched by bosonization and
/// read the same in tilded generators; `S_{m−1}` becomes
/// `:γ̃_{1,m−2} e^{−α̃_{m−1}/(k+n+1)}:`.
pub fn screening_checks(n: usize, m: usize) -> Result<VerificationReport> {
    let fam = tilde_family(n, m)?;
    let hook = FreeFieldStack::new(StackSpec::hook(n, m)?)?;
    let ss = hook_screenings(&hook, m, Variant::Standard)?;
    let target = fam.stack();
    let pres = target.presentation();
    let eng = target.engine();
    let sub = fms_substitution(&hook, &eng, fam.theta0())?;
    // Carries a field to the generators of the same name; fails on the
    // ghost pair at θ₀, which the target lacks.
    let same = Substitution::new(hook.presentation(), &eng);
    let mut report = VerificationReport::new("s-equals-stilde");
    for (i, s) in ss.iter().enumerate().take(m - 2) {
        report.check(format!("s-equals-stilde/{n},{m}/S{}", i + 1), || {
            let img = sub.apply(s.body())?;
            if let Some(w) = difference(pres, &img, &same.apply(s.body())?) {
                return Ok(Some(format!("bosonization moved S: {w}")));
            }
            Ok(difference(pres, &fam.untilde(&img)?, &img))
        });
    }
    if m >= 3 {
        report.check(format!("s-equals-stilde/{n},{m}/S{}/tilded-form", m - 1), || {
            let img = sub.apply(ss[m - 2].body())?;
            let coef = -target.shifted_level().inv()?;
            let vop = target.vop(&[(&crate::freefields::heis_name(m - 1), coef)])?;
            let tilded = eng.normal_order(&target.gamma((1, m - 2))?, &vop)?;
            Ok(difference(pres, &img, &fam.untilde(&tilded)?))
        });
    }
    Ok(report)
}

fn kernel_campaign() -> Result<VerificationReport> {
    let wak = wakimoto_sl4_table()?;
    let mut report = kernel_check("kernel/wakimoto-sl4", &wak, &label_screenings("S", wakimoto_screenings(wak.stack())?));
    let min = minimal_sl4_wakimoto_table()?;
    let qs = label_screenings("Q", hook_screenings(min.stack(), 3, Variant::Bar)?);
    report.extend(kernel_check("kernel/minimal-sl4", &min, &qs));

    let fam = tilde_family(3, 4)?;
    let target = fam.stack();
    let bosonized = {
        let eng = target.engine();
        let sub = fms_substitution(wak.stack(), &eng, fam.theta0())?;
        let entries = wak.entries().iter().map(|(n, e)| Ok((n.clone(), sub.apply(e)?))).collect::<Result<_>>()?;
        EmbeddingTable::new(target.clone(), entries)
    };
    report.extend(kernel_check("kernel/fms-wakimoto", &bosonized, &[("fms".into(), fms_screening(target)?)]));

    // e₁ replaced by γ₁ must leave the kernel of ∫S₁.
    let stack = wak.stack();
    report.check("kernel/negative-control/S1/gamma1", || {
        let eng = stack.engine();
        let s1 = &wakimoto_screenings(stack)?[0];
        let out = zero_mode_action(&eng, s1, &stack.gamma((1, 1))?)?;
        Ok(out.is_zero().then(|| "γ₁ is annihilated by ∫S₁".to_string()))
    });
    Ok(report)
}

/// `(n, m)` and label of a BRST case.
fn brst_cases(cfg: &CampaignConfig) -> Result<Vec<(usize, usize, String)>> {
    let all = [("sl2", "prin"), ("sl3", "min"), ("sl3", "prin"), ("sl4", "min")];
    let wanted: Vec<(&str, &str)> = match (&cfg.algebra, &cfg.f) {
        (None, None) => all.to_vec(),
        (a, f) => {
            let pick: Vec<(&str, &str)> = all
                .iter()
                .filter(|(x, y)| a.as_deref().map_or(true, |a| a == *x) && f.as_deref().map_or(true, |f| f == *y))
                .copied()
                .collect();
            let extra = match (a.as_deref(), f.as_deref()) {
                (Some("sl4"), Some("prin")) => vec![("sl4", "prin")],
                _ => Vec::new(),
            };
            [pick, extra].concat()
        }
    };
    if wanted.is_empty() {
        return Err(Error::OutOfRange(format!("BRST case {:?}/{:?}", cfg.algebra, cfg.f)));
    }
    Ok(wanted
        .into_iter()
        .map(|(a, f)| {
            let n = a[2..].parse::<usize>().expect("case names are slN") - 1;
            let m = if f == "prin" { 1 } else { n };
            (n, m, format!("{a}-{f}"))
        })
        .collect())
}

/// `d(z)d(w)` regular, `L` a Virasoro field with central charge
/// [`central_charge`], and `d` primary of weight 1.
pub fn brst_checks(r: &ReductionDatum, label: &str) -> VerificationReport {
    let mut report = VerificationReport::new("brst");
    let pres = r.presentation();
    let eng = r.engine();
    let d = brst_differential(r);
    let l = brst_em_field(r);
    report.check(format!("{label}/d-d"), || {
        let d = d.clone()?;
        let dd = ope(&eng, &d, &d)?;
        Ok(dd.poles.iter().find(|(_, e)| !e.is_zero()).map(|(p, e)| format!("pole {p}: {}", format_expr(pres, e))))
    });
    report.check(format!("{label}/L-L"), || {
        let l = l.clone()?;
        let ll = ope(&eng, &l, &l)?;
        let c = central_charge(r, &Scalar::k())?;
        let wants = [eng.derivative(&l)?, l.scale(&Scalar::int(2)), Expr::zero(), Expr::scalar(c / Scalar::int(2))];
        for (i, want) in wants.iter().enumerate() {
            if let Some(w) = difference(pres, &ll.pole(i as u32 + 1), want) {
                return Ok(Some(format!("pole {}: {w}", i + 1)));
            }
        }
        Ok(ll.poles.iter().find(|(p, e)| **p > 4 && !e.is_zero()).map(|(p, _)| format!("pole {p} present")))
    });
    report.check(format!("{label}/L-d"), || {
        let (l, d) = (l.clone()?, d.clone()?);
        let ld = ope(&eng, &l, &d)?;
        if let Some(w) = difference(pres, &ld.pole(1), &eng.derivative(&d)?) {
            return Ok(Some(format!("pole 1: {w}")));
        }
        if let Some(w) = difference(pres, &ld.pole(2), &d) {
            return Ok(Some(format!("pole 2: {w}")));
        }
        Ok(ld.poles.iter().find(|(p, e)| **p > 2 && !e.is_zero()).map(|(p, _)| format!("pole {p} present")))
    });
    report
}

fn brst_campaign(cfg: &CampaignConfig) -> Result<VerificationReport> {
    let mut data = Vec::new();
    for (n, m, label) in brst_cases(cfg)? {
        data.push((ReductionDatum::hook(n, m, Variant::Standard)?, format!("brst/{label}/even")));
        data.push((ReductionDatum::hook_dynkin(n, m)?, format!("brst/{label}/dynkin")));
    }
    let parts: Vec<VerificationReport> = data.par_iter().map(|(r, label)| brst_checks(r, label)).collect();
    let mut report = VerificationReport::new("brst");
    for p in parts {
        report.extend(p);
    }
    Ok(report)
}

/// Closed forms, the agreement of the KRW central charge with the hook
/// formula, and the level of `J` in the minimal sl₄ W-algebra.
pub fn central_charge_checks() -> Result<VerificationReport> {
    let k = Scalar::k();
    let mut report = VerificationReport::new("central-charges");
    report.check("central-charges/hook/3,3", || {
        let want = Scalar::int(-3) * k.clone() * (Scalar::int(2) * k.clone() + Scalar::int(3)) / Scalar::k_plus(4);
        let got = hook_central_charge(3, 3, &k)?;
        Ok((got != want).then(|| format!("{got} != {want}")))
    });
    for n in 1..=6usize {
        report.check(format!("central-charges/affine/{n}"), || {
            // Sugawara: k·dim 𝔤/(k+h∨), with dim counted from the basis.
            let dim = RootDatum::new(n)?.basis().len() as i64;
            let want = k.clone() * Scalar::int(dim) / Scalar::k_plus(n as i64 + 1);
            let got = hook_central_charge(n, n + 1, &k)?;
            Ok((got != want).then(|| format!("{got} != {want}")))
        });
    }
    for (n, m, label) in [(1, 1, "sl2-prin"), (2, 2, "sl3-min"), (2, 1, "sl3-prin"), (3, 3, "sl4-min")] {
        report.check(format!("central-charges/krw-vs-hook/{label}"), || {
            let got = central_charge(&ReductionDatum::hook_dynkin(n, m)?, &k)?;
            let want = hook_central_charge(n, m, &k)?;
            Ok((got != want).then(|| format!("{got} != {want}")))
        });
    }
    let pres = minimal_sl4_presentation()?;
    let eng = Engine::new(&pres);
    let g = |name: &str| Ok::<_, Error>(FieldExpr::generator(pres.id(name)?));
    report.check("central-charges/j-level/3,3", || {
        let got = ope(&eng, &g("J")?, &g("J")?)?.pole(2);
        if let Some(w) = difference(&pres, &got, &Expr::scalar(Scalar::k_plus(2))) {
            return Ok(Some(format!("J-J pole 2 minus (k+2): {w}")));
        }
        Ok(difference(&pres, &got, &Expr::scalar(j_level(3, 3, &k)?)))
    });
    report.check("central-charges/minimal-sl4-L", || {
        let l = g("L")?;
        let got = ope(&eng, &l, &l)?.pole(4);
        let c = hook_central_charge(3, 3, &k)?;
        if c != minimal_sl4_central_charge() {
            return Ok(Some("presentation central charge differs from the hook formula".into()));
        }
        Ok(difference(&pres, &got, &Expr::scalar(c / Scalar::int(2))))
    });
    Ok(report)
}

/// Free presentation for the property suites: two bosons at level `k+3`
/// with the sl₃ Gram matrix, a βγ pair and a bc pair.
pub fn axiom_presentation() -> Result<Presentation<Scalar>> {
    let q = |n: i64| Rational::from_integer(n.into());
    let mut p = Presentation::new();
    let a1 = p.add_even("a1", q(1))?;
    let a2 = p.add_even("a2", q(1))?;
    let b = p.add_even("B[1,2]", q(1))?;
    let g = p.add_even("G[1,2]", q(0))?;
    let phi = p.add_odd("phi", q(0))?;
    let psi = p.add_odd("psi", q(1))?;
    let kh = Scalar::k_plus(3);
    p.set_scalar_pole(a1, a1, 1, kh.clone() * Scalar::int(2))?;
    p.set_scalar_pole(a2, a2, 1, kh.clone() * Scalar::int(2))?;
    p.set_scalar_pole(a1, a2, 1, -kh)?;
    p.set_scalar_pole(b, g, 0, Scalar::int(-1))?;
    p.set_scalar_pole(phi, psi, 0, Scalar::int(1))?;
    Ok(p)
}

const AXIOM_NAMES: [&str; 6] = ["a1", "a2", "B[1,2]", "G[1,2]", "phi", "psi"];

fn random_monomial(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len);
    let mut parts: Vec<String> = (0..len)
        .map(|_| {
            let n = AXIOM_NAMES[rng.gen_range(0..AXIOM_NAMES.len())];
            if rng.gen_range(0..4) == 0 {
                format!("der(1, {n})")
            } else {
                n.to_string()
            }
        })
        .collect();
    let mut s = parts.pop().expect("len ≥ 1");
    while let Some(x) = parts.pop() {
        s = format!("no({x}, {s})");
    }
    s
}

/// A random composite: a monomial, or a sum of two with small coefficients.
fn random_composite(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    let first = random_monomial(rng, max_len);
    if rng.gen_bool(0.3) {
        let c = rng.gen_range(1..=3);
        format!("{first} + {c}*{}", random_monomial(rng, max_len))
    } else {
        first
    }
}

fn random_raw(rng: &mut ChaCha8Rng, depth: u32) -> RawExpr<Scalar> {
    let leaf = |rng: &mut ChaCha8Rng| RawExpr::gen(AXIOM_NAMES[rng.gen_range(0..AXIOM_NAMES.len())]);
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..6) {
        0 => leaf(rng),
        1 => RawExpr::der(rng.gen_range(1..=2), random_raw(rng, depth - 1)),
        2 | 3 => RawExpr::no(random_raw(rng, depth - 1), random_raw(rng, depth - 1)),
        4 => RawExpr::Sum((0..rng.gen_range(2..=3)).map(|_| random_raw(rng, depth - 1)).collect()),
        _ => {
            let c = Scalar::frac(rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=3));
            RawExpr::scale(c, random_raw(rng, depth - 1))
        }
    }
}

/// `a_(m)(b_(n)c) − p(a,b) b_(n)(a_(m)c) = Σ_i C(m,i) (a_(i)b)_(m+n−i)c` for
/// `0 ≤ m, n ≤ top`.
pub fn jacobi_defect(
    eng: &Engine<'_, Scalar>,
    a: &Expr,
    b: &Expr,
    c: &Expr,
    both_odd: bool,
    top: i64,
) -> Result<Option<String>> {
    let pres = eng.presentation();
    let ab = lambda_bracket(eng, a, b)?;
    let sign = if both_odd { Scalar::int(-1) } else { Scalar::int(1) };
    for m in 0..=top {
        for n in 0..=top {
            let lhs = eng
                .nth_product(a, m, &eng.nth_product(b, n, c)?)?
                .sub(&eng.nth_product(b, n, &eng.nth_product(a, m, c)?)?.scale(&sign));
            let mut rhs = Expr::zero();
            for i in 0..=m {
                let t = eng.nth_product(&ab.product(i as usize), m + n - i, c)?;
                rhs.add_scaled(&t, &Scalar::rational(binomial(m, i as u32)));
            }
            if let Some(w) = difference(pres, &lhs, &rhs) {
                return Ok(Some(format!("m={m} n={n}: {w}")));
            }
        }
    }
    Ok(None)
}

/// Pole tables of `ope(a, b)` and of the mode oracle agree.
fn oracle_defect(pres: &Presentation<Scalar>, eng: &Engine<'_, Scalar>, a: &Expr, b: &Expr, truncation: usize) -> Result<Option<String>> {
    let oracle = ModeOracle::new(pres, truncation)?;
    let table = oracle.table(a, b)?;
    let r = ope(eng, a, b)?;
    let mut mine = std::collections::BTreeMap::new();
    for (n, f) in &r.poles {
        let s = oracle.state_of(f)?;
        if !s.is_empty() {
            mine.insert(*n, s);
        }
    }
    Ok((mine != table.poles).then(|| {
        let orders = |m: &std::collections::BTreeMap<u32, _>| m.keys().copied().collect::<Vec<u32>>();
        format!("engine poles {:?}, oracle poles {:?} or differing states", orders(&mine), orders(&table.poles))
    }))
}

fn axiom_campaign(cfg: &CampaignConfig) -> Result<VerificationReport> {
    let pres = axiom_presentation()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let parse = |text: &str| parse_expr(&Engine::new(&pres), text);
    let weight = |e: &Expr| pres.expr_weight(e);
    let three = Rational::from_integer(3.into());

    // Composites of definite parity.
    let draw = |rng: &mut ChaCha8Rng, max_len: usize| -> Result<Expr> {
        loop {
            let e = parse(&random_composite(rng, max_len))?;
            if pres.expr_odd(&e).is_some() {
                return Ok(e);
            }
        }
    };
    let triples: Vec<[Expr; 3]> = (0..cfg.samples)
        .map(|_| Ok([draw(&mut rng, 2)?, draw(&mut rng, 2)?, draw(&mut rng, 2)?]))
        .collect::<Result<_>>()?;
    let mut pairs: Vec<[Expr; 2]> = Vec::new();
    while pairs.len() < cfg.samples {
        let a = draw(&mut rng, 2)?;
        let b = draw(&mut rng, 3)?;
        if let (Some(wa), Some(wb)) = (weight(&a), weight(&b)) {
            if &wa + &wb <= three {
                pairs.push([a, b]);
            }
        }
    }
    let trees: Vec<RawExpr<Scalar>> = (0..cfg.trees).map(|_| random_raw(&mut rng, 3)).collect();
    let seeds: Vec<u64> = (0..cfg.trees).map(|_| rng.gen()).collect();

    let budget = cfg.budget;
    let mut report = VerificationReport::new("engine-axioms");
    let skew_jacobi: Vec<CheckResult> = triples
        .par_iter()
        .enumerate()
        .map_init(
            || Engine::with_budget(&pres, budget),
            |eng, (i, [a, b, c])| {
                CheckResult::run(format!("axioms/skew-jacobi/{i}"), || {
                    let (pa, pb) = match (pres.expr_odd(a), pres.expr_odd(b)) {
                        (Some(x), Some(y)) => (x, y),
                        _ => return Ok(Some("inhomogeneous parity".into())),
                    };
                    let ab = lambda_bracket(eng, a, b)?;
                    let ba = lambda_bracket(eng, b, a)?;
                    if skew(eng, &ab, pa && pb)? != ba {
                        return Ok(Some(format!(
                            "skew-symmetry fails for {} and {}",
                            format_expr(&pres, a),
                            format_expr(&pres, b)
                        )));
                    }
                    jacobi_defect(eng, a, b, c, pa && pb, 2)
                })
            },
        )
        .collect();
    report.checks.extend(skew_jacobi);
    let truncation = cfg.truncation;
    let oracle: Vec<CheckResult> = pairs
        .par_iter()
        .enumerate()
        .map_init(
            || Engine::with_budget(&pres, budget),
            |eng, (i, [a, b])| {
                CheckResult::run(format!("axioms/oracle/{i}"), || oracle_defect(&pres, eng, a, b, truncation))
            },
        )
        .collect();
    report.checks.extend(oracle);
    let canonical: Vec<CheckResult> = trees
        .par_iter()
        .zip(seeds.par_iter())
        .enumerate()
        .map(|(i, (raw, seed))| {
            CheckResult::run(format!("axioms/canonical/{i}"), || {
                let eng = Engine::with_budget(&pres, budget);
                let base = canonicalize(&eng, raw)?;
                let again = canonicalize(&eng, &parse_raw(&format_expr(&pres, &base))?)?;
                if let Some(w) = difference(&pres, &again, &base) {
                    return Ok(Some(format!("not idempotent: {w}")));
                }
                let mut r = ChaCha8Rng::seed_from_u64(*seed);
                for _ in 0..2 {
                    let fresh = Engine::with_budget(&pres, budget);
                    let other = canonicalize_randomized(&fresh, raw, &mut r)?;
                    if let Some(w) = difference(&pres, &other, &base) {
                        return Ok(Some(format!("schedules disagree: {w}")));
                    }
                }
                Ok(None)
            })
        })
        .collect();
    report.checks.extend(canonical);
    report.extend(w_jacobi(cfg.seed, cfg.samples.min(22))?);
    Ok(report)
}

/// Jacobi identity on generator triples of the minimal sl₄ W-algebra: the
/// two required triples plus `extra` sampled ones.
pub fn w_jacobi(seed: u64, extra: usize) -> Result<VerificationReport> {
    let pres = minimal_sl4_presentation()?;
    let mut triples: Vec<[&str; 3]> = vec![["P[1,-]", "P[2,+]", "E"], ["P[1,+]", "P[2,-]", "F"]];
    let mut all: Vec<[&str; 3]> = Vec::new();
    for a in MINIMAL_SL4_GENERATORS {
        for b in MINIMAL_SL4_GENERATORS {
            for c in MINIMAL_SL4_GENERATORS {
                if !triples.contains(&[a, b, c]) {
                    all.push([a, b, c]);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    triples.extend(all.choose_multiple(&mut rng, extra).copied());
    let checks = triples
        .par_iter()
        .map_init(
            || Engine::new(&pres),
            |eng, [a, b, c]| {
                CheckResult::run(format!("axioms/w-jacobi/{a},{b},{c}"), || {
                    let g = |n: &str| Ok::<_, Error>(FieldExpr::generator(pres.id(n)?));
                    jacobi_defect(eng, &g(a)?, &g(b)?, &g(c)?, false, 2)
                })
            },
        )
        .collect();
    Ok(VerificationReport { campaign: "engine-axioms".into(), checks })
}
