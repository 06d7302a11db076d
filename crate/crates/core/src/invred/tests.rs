use super::*;
use crate::freefields::{minimal_sl4_wakimoto_table, wakimoto_sl4_table};

fn table(rows: &[(&str, &str)]) -> EmbeddingTable {
    EmbeddingTable::from_rows(FreeFieldStack::parse("wakimoto:n=3").unwrap(), rows).unwrap()
}

#[test]
fn specialization_controls() {
    assert!(specialization_check(&appendix_table().unwrap(), 3).all_passed());
    assert!(specialization_check(&wakimoto_sl4_table().unwrap(), 3).all_passed());
    let k_only = table(&[("x", "k*G[3,3]")]);
    assert!(!specialization_check(&k_only, 3).all_passed());
    let pole = table(&[("x", "B[3,3] + 1/(k+2)*G[3,3]")]);
    let r = specialization_check(&pole, 3);
    assert!(r.checks[0].witness.as_deref().unwrap().contains("noncritical"));
    let critical = table(&[("x", "B[3,3] + 1/(k+4)^2*G[3,3]")]);
    assert!(specialization_check(&critical, 3).all_passed());
}

#[test]
fn chain_counts() {
    assert_eq!(chain_signature(3, 1).unwrap(), (3, 3));
    assert_eq!(chain_signature(3, 3).unwrap(), (1, 2));
    assert_eq!(chain_signature(5, 6).unwrap(), (0, 0));
    assert!(chain_signature(3, 5).is_err());
    for n in 1..=7 {
        for m in 1..=n + 1 {
            let r = chain_report(n, m).unwrap();
            assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
            assert_eq!(r.checks.len(), n + 2 - m);
        }
    }
}

#[test]
fn screening_exponent_is_retilded_half_lattice_screening() {
    for (n, m) in [(3, 4), (3, 3), (4, 4), (2, 2)] {
        let a = screening_exponent(n, m).unwrap();
        let fam = tilde_family(n, m).unwrap();
        let stack = fam.stack();
        let half = Scalar::frac(1, 2);
        let s = stack.gen("c").unwrap().add(&stack.gen("d").unwrap()).scale(&half);
        assert_eq!(a.body(), fam.retilde(&s).unwrap(), "({n}, {m})");
        if m == 2 {
            assert!(a.nonlinear.is_zero());
        }
    }
    let a = screening_exponent(3, 4).unwrap();
    let want = Scalar::frac(1, 2) * (Scalar::int(1) - Scalar::k_plus(4) * Scalar::frac(3, 4));
    assert_eq!(a.c_coefficient, want);
    assert!(screening_exponent(3, 5).is_err());
}

#[test]
fn kernel_negative_control() {
    let wak = wakimoto_sl4_table().unwrap();
    let ss = label_screenings("S", crate::freefields::wakimoto_screenings(wak.stack()).unwrap());
    let bad = table(&[("e1", "G[1,1]")]);
    let r = kernel_check("kernel", &bad, &ss[..1]);
    assert_eq!(r.checks[0].status, Status::Fail);
    assert!(r.checks[0].witness.is_some());
    let ok = kernel_check("kernel", &wak, &ss[..1]);
    assert!(ok.all_passed());
}

#[test]
fn pipeline_produces_tilded_e1() {
    let (t, r) = pipeline_bosonize_retilde(3, 4, &wakimoto_sl4_table().unwrap()).unwrap();
    assert!(r.all_passed());
    let stack = t.stack();
    let want = stack.parse_expr(&stack.engine(), "no(G[2,3], vop{c: 1})").unwrap();
    assert_eq!(t.get("e1").unwrap(), &want);
    assert!(pipeline_bosonize_retilde(3, 3, &wakimoto_sl4_table().unwrap()).is_err());
    let (_, r) = pipeline_bosonize_retilde(3, 3, &minimal_sl4_wakimoto_table().unwrap()).unwrap();
    assert!(r.all_passed());
}

#[test]
fn report_json_shape() {
    let mut r = VerificationReport::new("demo");
    r.check("a", || Ok(None));
    r.check("b", || Ok(Some("w".into())));
    let j = r.to_json(&serde_json::json!({"n": 3}), false);
    assert_eq!(j["summary"]["failed"], 1);
    assert_eq!(j["checks"][1]["witness"], "w");
    assert!(j["checks"][0].get("millis").is_none());
    assert!(r.to_json(&serde_json::Value::Null, true)["checks"][0].get("millis").is_some());
    assert!(run_campaign("nope", &CampaignConfig::default()).is_err());
}

/// With `+k∂γ₃` in the image of `f₃` the embedding breaks exactly in the
/// pairs involving `f₃`.
#[test]
fn appendix_f3_sign_is_forced() {
    let t = appendix_table().unwrap();
    let stack = t.stack().clone();
    let flipped: Vec<(String, Expr)> = {
        let eng = stack.engine();
        let dg = eng.derivative(&stack.gamma((3, 3)).unwrap()).unwrap();
        t.entries()
            .iter()
            .map(|(n, e)| {
                let e = if n == "f3" { e.add(&dg.scale(&(Scalar::int(2) * Scalar::k()))) } else { e.clone() };
                (n.clone(), e)
            })
            .collect()
    };
    let r = verify_affine_images(&EmbeddingTable::new(stack, flipped), 3, &Scalar::k(), "flipped").unwrap();
    let failed: Vec<&str> = r.failures().map(|c| c.id.as_str()).collect();
    assert!(failed.contains(&"flipped/e3/f3"));
    assert!(failed.iter().all(|id| id.contains("f3") || id.contains("f13") || id.contains("f23")));
    let e3f3 = r.checks.iter().find(|c| c.id == "flipped/e3/f3").unwrap();
    assert_eq!(e3f3.witness.as_deref(), Some("pole 2: -2*k"));
}
