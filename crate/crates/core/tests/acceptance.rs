//! Acceptance suite: one line per criterion, exact equality throughout.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use hookred::brst::{hook_central_charge, j_level};
use hookred::freefields::{appendix_table, minimal_sl4_presentation, rho_r, rho_r_bruteforce};
use hookred::invred::{
    chain_signature, run_campaign, specialization_check, verify_appendix_embedding, w_jacobi, CampaignConfig,
    VerificationReport,
};
use hookred::opecore::{ope, Engine, FieldExpr};
use hookred::{Expr, Scalar};

type Outcome = Result<String, String>;

fn require(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Fails with the first failing check of `r`.
fn all_pass(r: &VerificationReport) -> Result<(), String> {
    match r.failures().next() {
        None => Ok(()),
        Some(c) => Err(format!(
            "{} of {} checks failed; first {}: {}",
            r.summary().failed,
            r.checks.len(),
            c.id,
            c.witness.as_deref().unwrap_or("")
        )),
    }
}

fn count(r: &VerificationReport, prefix: &str) -> usize {
    r.checks.iter().filter(|c| c.id.starts_with(prefix)).count()
}

fn has(r: &VerificationReport, id: &str) -> bool {
    r.checks.iter().any(|c| c.id == id && c.passed())
}

fn campaign(name: &str) -> Result<VerificationReport, String> {
    run_campaign(name, &CampaignConfig::default()).map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let r = verify_appendix_embedding().map_err(|e| e.to_string())?;
    all_pass(&r)?;
    require(r.checks.len() == 120, format!("{} pairs, expected 120", r.checks.len()))?;
    for id in ["appendix/h2/h2", "appendix/e3/f3", "appendix/e1/e1", "appendix/f1/f3"] {
        require(has(&r, id), format!("{id} missing"))?;
    }
    let s = specialization_check(&appendix_table().map_err(|e| e.to_string())?, 3);
    all_pass(&s)?;
    let full = campaign("appendix-sl4")?;
    all_pass(&full)?;
    Ok(format!("120 pairs, 9 leading-term checks, {} checks in campaign", full.checks.len()))
}

fn criterion_2() -> Outcome {
    let r = campaign("kernels")?;
    all_pass(&r)?;
    let counts = [
        ("kernel/wakimoto-sl4/", 27),
        ("kernel/minimal-sl4/", 12),
        ("kernel/fms-wakimoto/", 9),
        ("kernel/negative-control/", 1),
    ];
    for (p, n) in counts {
        require(count(&r, p) == n, format!("{p}: {} checks, expected {n}", count(&r, p)))?;
    }
    Ok(format!("{} kernel checks incl. negative control", r.checks.len()))
}

fn criterion_3() -> Outcome {
    let r = campaign("tilde")?;
    all_pass(&r)?;
    for (n, m) in [(3, 4), (4, 5), (4, 4)] {
        require(has(&r, &format!("tilde/{n},{m}/ope/d~/d~")), format!("d~ d~ at ({n},{m})"))?;
        require(count(&r, &format!("tilde/{n},{m}/round-trip/")) > 0, "round trips")?;
    }
    Ok(format!("{} OPE and round-trip checks", r.checks.len()))
}

fn criterion_4() -> Outcome {
    let r = campaign("s-equals-stilde")?;
    all_pass(&r)?;
    // i ≤ m−2 at (3,4), (4,5), (4,4): 2 + 3 + 2 screenings.
    let plain = r.checks.iter().filter(|c| !c.id.ends_with("tilded-form")).count();
    require(plain == 7, format!("{plain} screenings, expected 7"))?;
    Ok(format!("{} checks", r.checks.len()))
}

fn criterion_5() -> Outcome {
    let r = campaign("brst")?;
    all_pass(&r)?;
    for case in ["sl2-prin", "sl3-min", "sl3-prin", "sl4-min"] {
        for grading in ["even", "dynkin"] {
            for part in ["d-d", "L-L", "L-d"] {
                let id = format!("brst/{case}/{grading}/{part}");
                require(has(&r, &id), format!("{id} missing"))?;
            }
        }
    }
    Ok(format!("{} checks over 4 cases and 2 gradings", r.checks.len()))
}

fn criterion_6() -> Outcome {
    let k = Scalar::k();
    let want = Scalar::int(-3) * k.clone() * (Scalar::int(2) * k.clone() + Scalar::int(3)) / Scalar::k_plus(4);
    require(hook_central_charge(3, 3, &k).map_err(|e| e.to_string())? == want, "c(3,3)")?;
    for n in 1..=6i64 {
        let want = k.clone() * Scalar::int(n * (n + 2)) / Scalar::k_plus(n + 1);
        let got = hook_central_charge(n as usize, n as usize + 1, &k).map_err(|e| e.to_string())?;
        require(got == want, format!("affine central charge at n = {n}: {got}"))?;
    }
    let r = campaign("central-charges")?;
    let mut part = VerificationReport::new("central-charges");
    for c in &r.checks {
        if !c.id.contains("j-level") {
            part.push(c.clone());
        }
    }
    all_pass(&part)?;
    require(count(&part, "central-charges/krw-vs-hook/") == 4, "four KRW comparisons")?;
    Ok("closed forms, n ≤ 6, KRW = hook formula for 4 cases".into())
}

fn criterion_7() -> Outcome {
    let pres = minimal_sl4_presentation().map_err(|e| e.to_string())?;
    let eng = Engine::new(&pres);
    let j = FieldExpr::generator(pres.id("J").map_err(|e| e.to_string())?);
    let got = ope(&eng, &j, &j).map_err(|e| e.to_string())?.pole(2);
    require(got == Expr::scalar(Scalar::k_plus(2)), "J-J pole 2 is not k+2")?;
    let jl = j_level(3, 3, &Scalar::k()).map_err(|e| e.to_string())?;
    require(got == Expr::scalar(jl.clone()), format!("j_level(3,3) = {jl}"))?;
    Ok("pole 2 = k+2 = j_level(3,3,k)".into())
}

fn criterion_8() -> Outcome {
    let r = campaign("engine-axioms")?;
    all_pass(&r)?;
    let (sj, or, ca) = (count(&r, "axioms/skew-jacobi/"), count(&r, "axioms/oracle/"), count(&r, "axioms/canonical/"));
    require(sj >= 200 && or >= 200 && ca >= 500, format!("counts {sj}/{or}/{ca}"))?;
    Ok(format!("{sj} skew+Jacobi, {or} oracle (N = 6), {ca} canonicalization"))
}

fn criterion_9() -> Outcome {
    let mut n_checked = 0;
    for n in 1..=5 {
        for i in 1..=n {
            let a = rho_r(n, i).map_err(|e| e.to_string())?;
            let b = rho_r_bruteforce(n, i).map_err(|e| e.to_string())?;
            require(a == b, format!("ρ^R(e_{i}) differs at n = {n}"))?;
            n_checked += 1;
        }
    }
    Ok(format!("{n_checked} vector fields"))
}

fn criterion_10() -> Outcome {
    let r = w_jacobi(2024, 22).map_err(|e| e.to_string())?;
    all_pass(&r)?;
    require(r.checks.len() >= 20, "fewer than 20 triples")?;
    for id in ["axioms/w-jacobi/P[1,-],P[2,+],E", "axioms/w-jacobi/P[1,+],P[2,-],F"] {
        require(has(&r, id), format!("{id} missing"))?;
    }
    Ok(format!("{} generator triples", r.checks.len()))
}

fn criterion_11() -> Outcome {
    let r = campaign("chain")?;
    all_pass(&r)?;
    let mut cases = 0;
    for n in 1..=7usize {
        for m in 1..=n + 1 {
            // Telescoped per-step growth: one Π and m'−2 ghosts for each m' > m.
            let pis = n + 1 - m;
            let ghosts: usize = (m + 1..=n + 1).map(|s| s - 2).sum();
            let got = chain_signature(n, m).map_err(|e| e.to_string())?;
            require(got == (pis, ghosts), format!("({n},{m}): {got:?} vs {:?}", (pis, ghosts)))?;
            require(has(&r, &format!("chain/{n}/total/{m}")), format!("total ({n},{m})"))?;
            cases += 1;
        }
    }
    require(chain_signature(3, 1) == Ok((3, 3)) && chain_signature(3, 3) == Ok((1, 2)), "examples")?;
    Ok(format!("{cases} (n, m) pairs, {} checks", r.checks.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("appendix embedding", criterion_1),
        ("kernel checks", criterion_2),
        ("tilded fields", criterion_3),
        ("S_i = S~_i", criterion_4),
        ("BRST complexes", criterion_5),
        ("central charges", criterion_6),
        ("J-level", criterion_7),
        ("engine axioms", criterion_8),
        ("rho^R closed form", criterion_9),
        ("W-algebra Jacobi", criterion_10),
        ("counting identities", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} [{name}]: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} [{name}]: FAIL ({why}; {secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
