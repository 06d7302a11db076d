use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::scalars::{Rational, Scalar};
use crate::Error;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// βγ pair, a rank-two Heisenberg algebra at shifted level `k+3`, and a
/// fermion pair.
fn mixed() -> Presentation<Scalar> {
    let mut p = Presentation::new();
    let a1 = p.add_even("a1", q(1)).unwrap();
    let a2 = p.add_even("a2", q(1)).unwrap();
    let b = p.add_even("B[1,2]", q(1)).unwrap();
    let g = p.add_even("G[1,2]", q(0)).unwrap();
    let phi = p.add_odd("phi", q(0)).unwrap();
    let psi = p.add_odd("psi", q(1)).unwrap();
    let kh = Scalar::k_plus(3);
    p.set_scalar_pole(a1, a1, 1, kh.clone() * Scalar::int(2)).unwrap();
    p.set_scalar_pole(a2, a2, 1, kh.clone() * Scalar::int(2)).unwrap();
    p.set_scalar_pole(a1, a2, 1, -kh).unwrap();
    p.set_scalar_pole(b, g, 0, Scalar::int(-1)).unwrap();
    p.set_scalar_pole(phi, psi, 0, Scalar::int(1)).unwrap();
    p.declare_direction(a1).unwrap();
    p.declare_direction(a2).unwrap();
    p
}

/// The half-lattice algebra: `c(z)d(w) ~ 2/(z−w)²`.
fn half_lattice() -> Presentation<Scalar> {
    let mut p = Presentation::new();
    let c = p.add_even("c", q(1)).unwrap();
    let d = p.add_even("d", q(1)).unwrap();
    p.set_scalar_pole(c, d, 1, Scalar::int(2)).unwrap();
    p.declare_direction(c).unwrap();
    p.declare_direction(d).unwrap();
    p
}

fn parse(e: &Engine<'_, Scalar>, s: &str) -> FieldExpr<Scalar> {
    parse_expr(e, s).unwrap_or_else(|err| panic!("{s}: {err}"))
}

fn show(p: &Presentation<Scalar>, r: &OpeResult<Scalar>) -> String {
    format_ope(p, r)
}

#[test]
fn generator_brackets() {
    let p = mixed();
    let e = Engine::new(&p);
    let r = ope(&e, &parse(&e, "a1"), &parse(&e, "a2")).unwrap();
    assert_eq!(show(&p, &r), "{2: -(k+3)}");
    let r = ope(&e, &parse(&e, "B[1,2]"), &parse(&e, "G[1,2]")).unwrap();
    assert_eq!(show(&p, &r), "{1: -1}");
    let r = ope(&e, &parse(&e, "G[1,2]"), &parse(&e, "B[1,2]")).unwrap();
    assert_eq!(show(&p, &r), "{1: 1}");
    assert!(ope(&e, &parse(&e, "G[1,2]"), &parse(&e, "G[1,2]")).unwrap().is_regular());
    let r = ope(&e, &parse(&e, "psi"), &parse(&e, "phi")).unwrap();
    assert_eq!(show(&p, &r), "{1: 1}");
}

#[test]
fn reordering_produces_contraction() {
    let p = mixed();
    let e = Engine::new(&p);
    // the contraction is a constant, so its derivative vanishes
    assert_eq!(format_expr(&p, &parse(&e, "no(G[1,2], B[1,2])")), "no(B[1,2], G[1,2])");
    let x = parse(&e, "no(der(1, G[1,2]), B[1,2])");
    assert_eq!(format_expr(&p, &x), "no(B[1,2], der(1, G[1,2]))");
    let y = parse(&e, "no(psi, phi)");
    assert_eq!(format_expr(&p, &y), "-no(phi, psi)");
    assert!(parse(&e, "no(psi, psi)").is_zero());
    let z = parse(&e, "no(der(1, a1), a1)");
    assert_eq!(format_expr(&p, &z), "no(a1, der(1, a1))");
}

#[test]
fn derivative_rules() {
    let p = mixed();
    let e = Engine::new(&p);
    assert!(e.derivative(&FieldExpr::one()).unwrap().is_zero());
    let d = parse(&e, "der(1, no(B[1,2], G[1,2]))");
    assert_eq!(format_expr(&p, &d), "no(B[1,2], der(1, G[1,2])) + no(der(1, B[1,2]), G[1,2])");
    let v = parse(&e, "der(1, vop{a1: 3})");
    assert_eq!(format_expr(&p, &v), "3*no(a1, vop{a1: 3})");
}

#[test]
fn grammar_round_trip() {
    let p = mixed();
    let e = Engine::new(&p);
    for s in [
        "2*(k+4)*no(a1, a2) - 1/(k+3)*der(2, phi) + 3/4",
        "no(B[1,2], no(G[1,2], vop{a1: -1/(k+3), a2: 2}))",
        "-(k-1)*no(der(1, phi), psi) + k",
    ] {
        let x = parse(&e, s);
        let printed = format_expr(&p, &x);
        assert_eq!(parse(&e, &printed), x, "{printed}");
        assert_eq!(format_expr(&p, &parse(&e, &printed)), printed);
    }
    match parse_expr(&e, "no(a1, zz)") {
        Err(Error::UnknownGenerator(n)) => assert_eq!(n, "zz"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_expr(&e, "vop{B[1,2]: 1}"), Err(Error::ExponentPosition(_))));
    assert!(matches!(parse_expr(&e, "a1 * a2"), Err(Error::Parse { .. })));
}

fn oracle_agrees(p: &Presentation<Scalar>, a: &FieldExpr<Scalar>, b: &FieldExpr<Scalar>) {
    let e = Engine::new(p);
    let o = ModeOracle::new(p, 12).unwrap();
    let table = o.table(a, b).unwrap();
    let r = ope(&e, a, b).unwrap();
    let mut mine = std::collections::BTreeMap::new();
    for (n, f) in &r.poles {
        let s = o.state_of(f).unwrap();
        if !s.is_empty() {
            mine.insert(*n, s);
        }
    }
    assert_eq!(mine, table.poles, "{} with {}", format_expr(p, a), format_expr(p, b));
}

#[test]
fn oracle_matches_small_cases() {
    let p = mixed();
    let e = Engine::new(&p);
    let bg = parse(&e, "no(B[1,2], G[1,2])");
    oracle_agrees(&p, &bg, &bg);
    oracle_agrees(&p, &parse(&e, "a1"), &parse(&e, "a1"));
    oracle_agrees(&p, &parse(&e, "no(phi, psi)"), &parse(&e, "no(der(1, phi), psi)"));
    oracle_agrees(&p, &parse(&e, "no(B[1,2], no(B[1,2], G[1,2]))"), &parse(&e, "no(G[1,2], G[1,2])"));
    let o = mode_oracle(&p, &parse(&e, "a1"), &parse(&e, "a1"), 2).unwrap();
    assert_eq!(o.poles.len(), 1);
    assert_eq!(o.poles[&2].values().next(), Some(&(Scalar::k_plus(3) * Scalar::int(2))));
    assert!(matches!(
        mode_oracle(&p, &parse(&e, "no(a1, a1)"), &parse(&e, "no(a1, der(2, a1))"), 1),
        Err(Error::TruncationTooSmall { .. })
    ));
}

fn random_monomial(rng: &mut ChaCha8Rng, names: &[&str], max_len: usize) -> String {
    let len = rng.gen_range(1..=max_len);
    let mut parts: Vec<String> = (0..len)
        .map(|_| {
            let n = names[rng.gen_range(0..names.len())];
            match rng.gen_range(0..4) {
                0 => format!("der(1, {n})"),
                _ => n.to_string(),
            }
        })
        .collect();
    let mut s = parts.pop().unwrap();
    while let Some(x) = parts.pop() {
        s = format!("no({x}, {s})");
    }
    s
}

#[test]
fn oracle_matches_random_composites() {
    let p = mixed();
    let e = Engine::new(&p);
    let names = ["a1", "a2", "B[1,2]", "G[1,2]", "phi", "psi"];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 40 {
        let a = parse(&e, &random_monomial(&mut rng, &names, 2));
        let b = parse(&e, &random_monomial(&mut rng, &names, 3));
        let weight = |x: &FieldExpr<Scalar>| p.expr_weight(x);
        match (weight(&a), weight(&b)) {
            (Some(wa), Some(wb)) if &wa + &wb <= q(3) => {}
            _ => continue,
        }
        oracle_agrees(&p, &a, &b);
        checked += 1;
    }
}

#[test]
fn skew_symmetry_and_jacobi() {
    let p = mixed();
    let e = Engine::new(&p);
    let names = ["a1", "a2", "B[1,2]", "G[1,2]", "phi", "psi"];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let a = parse(&e, &random_monomial(&mut rng, &names, 2));
        let b = parse(&e, &random_monomial(&mut rng, &names, 2));
        let c = parse(&e, &random_monomial(&mut rng, &names, 2));
        let (pa, pb) = (p.expr_odd(&a).unwrap(), p.expr_odd(&b).unwrap());
        let ab = lambda_bracket(&e, &a, &b).unwrap();
        let ba = lambda_bracket(&e, &b, &a).unwrap();
        assert_eq!(skew(&e, &ab, pa && pb).unwrap(), ba);
        for m in 0..3 {
            for n in 0..3 {
                let lhs = e
                    .nth_product(&a, m, &e.nth_product(&b, n, &c).unwrap())
                    .unwrap()
                    .sub(&e.nth_product(&b, n, &e.nth_product(&a, m, &c).unwrap()).unwrap().scale(
                        &if pa && pb { Scalar::int(-1) } else { Scalar::int(1) },
                    ));
                let mut rhs = FieldExpr::zero();
                for i in 0..=m {
                    let t = e.nth_product(&ab.product(i as usize), m + n - i, &c).unwrap();
                    rhs.add_scaled(&t, &Scalar::rational(crate::scalars::binomial(m, i as u32)));
                }
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn randomized_schedules_agree() {
    let p = mixed();
    let e = Engine::new(&p);
    let raw = parse_raw::<Scalar>(
        "der(2, no(no(G[1,2], B[1,2]) + psi, no(phi, a1))) + no(no(a2, a1), no(der(1, G[1,2]), B[1,2]))",
    )
    .unwrap();
    let base = canonicalize(&e, &raw).unwrap();
    assert_eq!(canonicalize(&e, &raw).unwrap(), base);
    for seed in 0..20 {
        let fresh = Engine::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        assert_eq!(canonicalize_randomized(&fresh, &raw, &mut rng).unwrap(), base);
    }
}

#[test]
fn half_lattice_vertex_operators() {
    let p = half_lattice();
    let e = Engine::new(&p);
    assert_eq!(show(&p, &ope(&e, &parse(&e, "c"), &parse(&e, "d")).unwrap()), "{2: 2}");
    let r = ope(&e, &parse(&e, "d"), &parse(&e, "vop{c: 3}")).unwrap();
    assert_eq!(show(&p, &r), "{1: 6*vop{c: 3}}");
    let v = vop_product(&e, &parse(&e, "vop{c: 1}"), &parse(&e, "vop{c: -1}")).unwrap();
    assert_eq!(v.pairing, 0);
    assert!(v.singular.is_regular());
    assert_eq!(v.regular, FieldExpr::one());
    // e^c reproduces the ghost OPE against ½:(c+d)e^{−c}:
    let gamma = parse(&e, "1/2*no(c, vop{c: -1}) + 1/2*no(d, vop{c: -1})");
    let r = ope(&e, &parse(&e, "vop{c: 1}"), &gamma).unwrap();
    assert_eq!(show(&p, &r), "{1: -1}");
    let r = ope(&e, &gamma, &parse(&e, "vop{c: 1}")).unwrap();
    assert_eq!(show(&p, &r), "{1: 1}");
    assert!(ope(&e, &gamma, &gamma).unwrap().is_regular());
    let s = vop_product(&e, &parse(&e, "vop{c: 1/2, d: 1/2}"), &parse(&e, "vop{c: 2}")).unwrap();
    assert_eq!(s.pairing, 2);
}

#[test]
fn generalized_exponents_are_rejected() {
    let p = mixed();
    let e = Engine::new(&p);
    let x = parse(&e, "vop{a1: -1/(k+3)}");
    let y = parse(&e, "vop{a2: -1/(k+3)}");
    assert!(matches!(vop_product(&e, &x, &y), Err(Error::GeneralizedExponent(_))));
    assert!(matches!(ope(&e, &x, &y), Err(Error::GeneralizedExponent(_))));
}

#[test]
fn zero_mode_identity_matches_direct_action() {
    let p = mixed();
    let e = Engine::new(&p);
    let s = ScreeningField::new(parse(&e, "no(B[1,2], vop{a1: -1/(k+3)})")).unwrap();
    for x in ["G[1,2]", "no(G[1,2], G[1,2])", "a1", "no(a2, der(1, G[1,2]))", "no(psi, a1)"] {
        let x = parse(&e, x);
        let via_skew = zero_mode_action(&e, &s, &x).unwrap();
        assert_eq!(via_skew, zero_mode_direct(&e, &s, &x).unwrap());
        let dx = e.derivative(&x).unwrap();
        assert_eq!(zero_mode_action(&e, &s, &dx).unwrap(), e.derivative(&via_skew).unwrap());
    }
    assert!(zero_mode_action(&e, &s, &FieldExpr::zero()).unwrap().is_zero());
    assert!(!zero_mode_action(&e, &s, &parse(&e, "G[1,2]")).unwrap().is_zero());
}

#[test]
fn budget_aborts() {
    let p = mixed();
    let e = Engine::with_budget(&p, 5);
    let a = parse_raw::<Scalar>("no(no(B[1,2], G[1,2]), no(B[1,2], G[1,2]))").unwrap();
    assert!(matches!(canonicalize(&e, &a), Err(Error::Budget(5))));
}
