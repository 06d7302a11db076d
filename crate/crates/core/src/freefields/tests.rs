use super::*;
use crate::opecore::{format_expr, ope, zero_mode_action};
use crate::rootdata::{BasisElement, RootDatum, Variant};

fn parse(stack: &FreeFieldStack, text: &str) -> Expr {
    let eng = stack.engine();
    stack.parse_expr(&eng, text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

#[test]
fn stack_spec_parsing() {
    let s = StackSpec::parse("heis:n=2+ghosts:roots=1.2/1.1+pi").unwrap();
    assert_eq!(s.heisenberg, 2);
    assert_eq!(s.ghosts, vec![(1, 1), (1, 2)]);
    assert!(s.pi && !s.minimal_sl4);
    assert_eq!(StackSpec::parse(&s.to_string()).unwrap(), s);
    assert_eq!(StackSpec::parse("wakimoto:n=3").unwrap().ghosts.len(), 6);
    assert_eq!(StackSpec::parse("tilde:n=3,m=4").unwrap().ghosts.len(), 5);
    assert!(StackSpec::parse("bogus").is_err());
}

#[test]
fn heisenberg_and_omega_pairings() {
    let stack = FreeFieldStack::new(StackSpec::wakimoto(3).unwrap()).unwrap();
    let eng = stack.engine();
    for j in 1..=3 {
        for i in 1..=3 {
            let r = ope(&eng, &stack.omega(j).unwrap(), &stack.alpha(i).unwrap()).unwrap();
            let want = if i == j { Expr::scalar(Scalar::k_plus(4)) } else { Expr::zero() };
            assert_eq!(r.pole(2), want);
        }
    }
}

#[test]
fn rho_r_closed_form_matches_matrices() {
    for n in 1..=5 {
        for i in 1..=n {
            assert_eq!(rho_r(n, i).unwrap(), rho_r_bruteforce(n, i).unwrap(), "n={n} i={i}");
        }
    }
    assert!(rho_r(3, 4).is_err());
}

/// `[x_λ y] = image([x,y]) + λ k tr(xy)` for table entries whose bracket
/// stays inside the table.
fn check_affine(table: &EmbeddingTable, n: usize, level: Scalar) {
    let r = RootDatum::new(n).unwrap();
    let stack = table.stack();
    let eng = stack.engine();
    let image = |b: BasisElement| table.get(&b.to_string()).ok().cloned();
    let mut checked = 0;
    for a in r.basis() {
        for b in r.basis() {
            let (Some(x), Some(y)) = (image(a), image(b)) else { continue };
            let br = r.bracket(a, b).unwrap();
            let mut want1 = Expr::zero();
            let mut inside = true;
            for (e, c) in &br {
                match image(*e) {
                    Some(img) => want1.add_scaled(&img, &Scalar::rational(c.clone())),
                    None => inside = false,
                }
            }
            if !inside {
                continue;
            }
            let got = ope(&eng, &x, &y).unwrap();
            assert_eq!(got.pole(1), want1, "pole 1 of ({a}, {b})");
            let want2 = Expr::scalar(&level * &Scalar::rational(r.inner(a, b)));
            assert_eq!(got.pole(2), want2, "pole 2 of ({a}, {b})");
            assert!(got.pole(3).is_zero());
            checked += 1;
        }
    }
    assert!(checked > 30);
}

#[test]
fn wakimoto_sl4_is_affine() {
    let t = wakimoto_sl4_table().unwrap();
    check_affine(&t, 3, Scalar::k());
}

#[test]
fn wakimoto_sl4_is_screened() {
    let t = wakimoto_sl4_table().unwrap();
    let eng = t.stack().engine();
    for s in wakimoto_screenings(t.stack()).unwrap() {
        for (name, img) in t.entries() {
            assert!(zero_mode_action(&eng, &s, img).unwrap().is_zero(), "{name}");
        }
    }
}

#[test]
fn minimal_sl4_presentation_data() {
    let pres = minimal_sl4_presentation().unwrap();
    let eng = Engine::new(&pres);
    let g = |n: &str| FieldExpr::generator(pres.id(n).unwrap());
    assert_eq!(ope(&eng, &g("J"), &g("J")).unwrap().pole(2), Expr::scalar(Scalar::k_plus(2)));
    let r = ope(&eng, &g("P[1,-]"), &g("P[2,+]")).unwrap();
    let k1 = Scalar::k_plus(1);
    let k2 = Scalar::k_plus(2);
    assert_eq!(r.pole(3), Expr::scalar(Scalar::int(-2) * k1 * k2));
    let l = ope(&eng, &g("L"), &g("L")).unwrap();
    assert_eq!(l.pole(4), Expr::scalar(minimal_sl4_central_charge() / Scalar::int(2)));
    // Skew-completed bracket: P^{2,+}(z)E(w) ~ P^{1,+}(w)/(z−w).
    assert_eq!(ope(&eng, &g("P[2,+]"), &g("E")).unwrap().pole(1), g("P[1,+]"));
}

/// Pushes W-algebra OPEs through the minimal Wakimoto table.
#[test]
fn minimal_sl4_wakimoto_is_homomorphic() {
    let pres = minimal_sl4_presentation().unwrap();
    let weng = Engine::new(&pres);
    let table = minimal_sl4_wakimoto_table().unwrap();
    let stack = table.stack();
    let eng = stack.engine();
    let mut sub = Substitution::new(&pres, &eng);
    for (name, img) in table.entries() {
        sub.map_generator(name, img.clone()).unwrap();
    }
    let names: Vec<&str> = table.entries().iter().map(|(n, _)| n.as_str()).collect();
    for a in &names {
        for b in &names {
            let x = FieldExpr::generator(pres.id(a).unwrap());
            let y = FieldExpr::generator(pres.id(b).unwrap());
            let w = ope(&weng, &x, &y).unwrap();
            let f = ope(&eng, table.get(a).unwrap(), table.get(b).unwrap()).unwrap();
            for p in 1..=3 {
                assert_eq!(f.pole(p), sub.apply(&w.pole(p)).unwrap(), "pole {p} of ({a}, {b})");
            }
        }
    }
}

#[test]
fn minimal_sl4_wakimoto_is_screened() {
    let table = minimal_sl4_wakimoto_table().unwrap();
    let stack = table.stack();
    let eng = stack.engine();
    let qs = hook_screenings(stack, 3, Variant::Bar).unwrap();
    assert_eq!(qs.len(), 3);
    for q in &qs {
        for (name, img) in table.entries() {
            assert!(zero_mode_action(&eng, q, img).unwrap().is_zero(), "{name}");
        }
    }
}

#[test]
fn fms_bosonization() {
    let src = FreeFieldStack::parse("ghosts:roots=1.1").unwrap();
    let b = src.beta((1, 1)).unwrap();
    let g = src.gamma((1, 1)).unwrap();
    let (tgt, bi) = fms_bosonize(&src, (1, 1), &b).unwrap();
    let (_, gi) = fms_bosonize(&src, (1, 1), &g).unwrap();
    let eng = tgt.engine();
    assert_eq!(ope(&eng, &bi, &gi).unwrap().pole(1), Expr::scalar(Scalar::int(-1)));
    assert!(ope(&eng, &bi, &bi).unwrap().is_regular());
    assert!(ope(&eng, &gi, &gi).unwrap().is_regular());
    let s = fms_screening(&tgt).unwrap();
    assert!(zero_mode_action(&eng, &s, &bi).unwrap().is_zero());
    assert!(zero_mode_action(&eng, &s, &gi).unwrap().is_zero());
    let em = tgt.vop(&[("c", Scalar::int(-1))]).unwrap();
    assert!(!zero_mode_action(&eng, &s, &em).unwrap().is_zero());
}

#[test]
fn tilde_reference_instances() {
    let fam = tilde_family(4, 5).unwrap();
    let stack = fam.stack();
    let want = parse(stack, "B[2,2] - no(B[1,2], no(B[2,4], vop{c: -1}))");
    assert_eq!(fam.definition("B[2,2]").unwrap(), &want);
    assert_eq!(fam.definition("G[2,2]").unwrap(), &stack.gamma((2, 2)).unwrap());
    let want = parse(
        stack,
        "G[1,2] + no(B[3,4], vop{c: -1}) + no(G[2,2], no(B[2,4], vop{c: -1}))",
    );
    assert_eq!(fam.definition("G[1,2]").unwrap(), &want);
    assert!(tilde_family(3, 1).is_err());
    assert!(tilde_family(3, 5).is_err());
    let small = tilde_family(3, 2).unwrap();
    assert!(small.roots().is_empty());
}

fn tilde_generators(fam: &TildeFamily) -> Vec<Expr> {
    let stack = fam.stack();
    let mut out: Vec<Expr> = fam.definitions().iter().map(|(n, _)| stack.gen(n).unwrap()).collect();
    out.push(stack.gen("c").unwrap());
    out.push(stack.vop(&[("c", Scalar::int(1))]).unwrap());
    out.push(stack.vop(&[("c", Scalar::int(-1))]).unwrap());
    out
}

/// Tilded generators obey the untilded brackets, and the two
/// substitutions are mutually inverse.
fn check_tilde(n: usize, m: usize) {
    let fam = tilde_family(n, m).unwrap();
    let stack = fam.stack();
    let eng = stack.engine();
    let gens = tilde_generators(&fam);
    let defs: Vec<Expr> = gens.iter().map(|g| fam.untilde(g).unwrap()).collect();
    for (i, x) in gens.iter().enumerate() {
        assert_eq!(&fam.retilde(&defs[i]).unwrap(), x, "retilde∘untilde on {}", format_expr(stack.presentation(), x));
        assert_eq!(&fam.untilde(&fam.retilde(x).unwrap()).unwrap(), x);
        for (j, y) in gens.iter().enumerate() {
            let target = ope(&eng, x, y).unwrap();
            let got = ope(&eng, &defs[i], &defs[j]).unwrap();
            for p in 1..=3 {
                assert_eq!(got.pole(p), fam.untilde(&target.pole(p)).unwrap(), "pole {p}");
            }
        }
    }
}

#[test]
fn tilde_family_small_cases() {
    check_tilde(2, 3);
    check_tilde(3, 3);
    check_tilde(3, 2);
}

#[test]
fn tilde_screenings_unchanged_below_m_minus_one() {
    let (n, m) = (3, 4);
    let fam = tilde_family(n, m).unwrap();
    let hook = FreeFieldStack::new(StackSpec::hook(n, m).unwrap()).unwrap();
    let ss = wakimoto_screenings(&hook).unwrap();
    for s in ss.iter().take(m - 2) {
        let (tgt, img) = fms_bosonize(&hook, (1, m - 1), s.body()).unwrap();
        assert_eq!(tgt.spec(), fam.stack().spec());
        assert_eq!(fam.untilde(&img).unwrap(), img);
    }
    let (_, img) = fms_bosonize(&hook, (1, m - 1), ss[m - 2].body()).unwrap();
    let kh = fam.stack().shifted_level();
    let vop = fam.stack().vop(&[("a3", -kh.inv().unwrap())]).unwrap();
    let eng = fam.stack().engine();
    let tilded = eng.normal_order(&fam.stack().gamma((1, m - 2)).unwrap(), &vop).unwrap();
    assert_eq!(img, fam.untilde(&tilded).unwrap());
}

#[test]
fn appendix_table_parses() {
    let t = appendix_table().unwrap();
    assert_eq!(t.entries().len(), 9);
    let eng = t.stack().engine();
    let h2 = t.get("h2").unwrap();
    assert_eq!(ope(&eng, h2, h2).unwrap().pole(2), Expr::scalar(Scalar::int(2) * Scalar::k()));
    let json = t.to_json();
    assert_eq!(json["entries"][2]["image"], "B[3,3]");
}
