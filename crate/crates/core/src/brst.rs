//! The reduction complex `V^k(sl_{n+1}) ⊗ F(A_ch) ⊗ 𝒮(A_ne)`, its
//! differential field, energy–momentum field and central charges.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::opecore::{Engine, FieldExpr, Presentation};
use crate::rootdata::{good_grading, hook_nilpotent, rank, BasisElement, Combination, RootDatum, Variant};
use crate::scalars::{Rational, Scalar};
use crate::Expr;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn current_name(b: BasisElement) -> String {
    format!("J[{b}]")
}

pub fn phi_name(b: BasisElement) -> String {
    format!("phi[{b}]")
}

pub fn psi_name(b: BasisElement) -> String {
    format!("psi[{b}]")
}

pub fn neutral_name(b: BasisElement) -> String {
    format!("del[{b}]")
}

/// Grading, nilpotent and the presentation of the complex.
#[derive(Clone, Debug)]
pub struct ReductionDatum {
    n: usize,
    root: RootDatum,
    /// Eigenvalue of `ad x` on each simple root vector.
    simple_grades: Vec<Rational>,
    f: Combination,
    /// `S_+`, positively graded basis elements.
    s_plus: Vec<BasisElement>,
    /// `S_{1/2}`.
    s_half: Vec<BasisElement>,
    pres: Presentation<Scalar>,
}

impl ReductionDatum {
    /// Builds the complex for `x = Σ_i g_i ω_i^∨` and `f`, checking that the
    /// grading is good for `f`.
    pub fn new(n: usize, simple_grades: Vec<Rational>, f: Combination) -> Result<Self> {
        let root = RootDatum::new(n)?;
        if simple_grades.len() != n {
            return Err(Error::InconsistentGrading(format!("{} grades for rank {n}", simple_grades.len())));
        }
        let two = q(2);
        if simple_grades.iter().any(|g| !(g * &two).is_integer()) {
            return Err(Error::InconsistentGrading("grades must lie in ½ℤ".into()));
        }
        let mut datum = ReductionDatum {
            n,
            root,
            simple_grades,
            f,
            s_plus: Vec::new(),
            s_half: Vec::new(),
            pres: Presentation::new(),
        };
        datum.check_good()?;
        let basis = datum.root.basis();
        datum.s_plus = basis.iter().copied().filter(|b| datum.grade(*b) > Rational::zero()).collect();
        let half = Rational::new(1.into(), 2.into());
        datum.s_half = basis.iter().copied().filter(|b| datum.grade(*b) == half).collect();
        datum.pres = datum.build_presentation()?;
        Ok(datum)
    }

    /// Hook-type nilpotent `f^{(m)}` with its even good grading; `m = 1`
    /// is principal.
    pub fn hook(n: usize, m: usize, variant: Variant) -> Result<Self> {
        let g = good_grading(n, m)?;
        let f = hook_nilpotent(n, m, variant)?;
        if f.is_zero() {
            return Err(Error::InconsistentGrading(format!("f is zero for (n, m) = ({n}, {m})")));
        }
        Self::new(n, g.grades.iter().map(|&x| q(x as i64)).collect(), f.components())
    }

    /// Hook-type nilpotent `f^{(m)}` with the Dynkin grading `x = ½h` of
    /// its sl₂-triple: `x = diag(0^{m−1}, (p−1)/2, …, −(p−1)/2)` with
    /// `p = n−m+2`.
    pub fn hook_dynkin(n: usize, m: usize) -> Result<Self> {
        let f = hook_nilpotent(n, m, Variant::Standard)?;
        if f.is_zero() {
            return Err(Error::InconsistentGrading(format!("f is zero for (n, m) = ({n}, {m})")));
        }
        let p = (n + 2 - m) as i64;
        let diag: Vec<Rational> = (1..=n + 1)
            .map(|i| if i < m { Rational::zero() } else { Rational::new((p - 1 - 2 * (i - m) as i64).into(), 2.into()) })
            .collect();
        let grades = (0..n).map(|i| &diag[i] - &diag[i + 1]).collect();
        Self::new(n, grades, f.components())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root_datum(&self) -> &RootDatum {
        &self.root
    }

    pub fn f(&self) -> &Combination {
        &self.f
    }

    pub fn s_plus(&self) -> &[BasisElement] {
        &self.s_plus
    }

    pub fn s_half(&self) -> &[BasisElement] {
        &self.s_half
    }

    pub fn presentation(&self) -> &Presentation<Scalar> {
        &self.pres
    }

    pub fn engine(&self) -> Engine<'_, Scalar> {
        Engine::new(&self.pres)
    }

    /// `m_a` with `[x, J^a] = m_a J^a`.
    pub fn grade(&self, b: BasisElement) -> Rational {
        let root = |i: usize, j: usize| (i..=j).map(|t| self.simple_grades[t - 1].clone()).sum::<Rational>();
        match b {
            BasisElement::E(i, j) => root(i, j),
            BasisElement::H(_) => Rational::zero(),
            BasisElement::F(i, j) => -root(i, j),
        }
    }

    /// `x` in the Cartan–Weyl basis.
    pub fn grading_element(&self) -> Combination {
        let mut out = Combination::new();
        for (i, g) in self.simple_grades.iter().enumerate() {
            for j in 1..=self.n {
                let slot = out.entry(BasisElement::H(j)).or_insert_with(Rational::zero);
                *slot += g * self.root.inverse_cartan(i + 1, j);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn check_good(&self) -> Result<()> {
        let minus_one = q(-1);
        if let Some((b, _)) = self.f.iter().find(|(b, _)| self.grade(**b) != minus_one) {
            return Err(Error::InconsistentGrading(format!("component {b} of f is not of degree −1")));
        }
        if self.f.is_empty() {
            return Err(Error::InconsistentGrading("f is zero".into()));
        }
        let basis = self.root.basis();
        let mut grades: Vec<Rational> = basis.iter().map(|b| self.grade(*b)).collect();
        grades.sort();
        grades.dedup();
        let half = Rational::new(1.into(), 2.into());
        for j in grades {
            let src: Vec<_> = basis.iter().filter(|b| self.grade(**b) == j).collect();
            let tgt: Vec<_> = basis.iter().filter(|b| self.grade(**b) == &j - Rational::one()).collect();
            let rows: Vec<Vec<Rational>> = src
                .iter()
                .map(|b| {
                    let img = self.root.bracket_combination(&self.f, &[(**b, Rational::one())].into());
                    tgt.iter().map(|t| img.get(t).cloned().unwrap_or_else(Rational::zero)).collect()
                })
                .collect();
            let rk = if tgt.is_empty() { 0 } else { rank(&rows) };
            if j >= half && rk != src.len() {
                return Err(Error::InconsistentGrading(format!("ad f not injective on degree {j}")));
            }
            if j <= half && rk != tgt.len() {
                return Err(Error::InconsistentGrading(format!("ad f not onto degree {}", &j - Rational::one())));
            }
        }
        Ok(())
    }

    /// `(a|b)_ne = ⟨f, [a, b]⟩`.
    pub fn neutral_form(&self, a: BasisElement, b: BasisElement) -> Rational {
        let br = self.root.bracket(a, b).expect("basis elements");
        self.root.inner_combination(&self.f, &br)
    }

    fn build_presentation(&self) -> Result<Presentation<Scalar>> {
        let mut p = Presentation::new();
        let basis = self.root.basis();
        let ids: Vec<_> = basis.iter().map(|b| p.add_even(&current_name(*b), q(1))).collect::<Result<_>>()?;
        for (x, a) in basis.iter().enumerate() {
            for (y, b) in basis.iter().enumerate().skip(x) {
                let mut p0 = Expr::zero();
                for (c, coef) in self.root.bracket(*a, *b)? {
                    let id = ids[basis.iter().position(|t| *t == c).expect("basis element")];
                    p0.add_scaled(&FieldExpr::generator(id), &Scalar::rational(coef));
                }
                let p1 = Expr::scalar(Scalar::k() * Scalar::rational(self.root.inner(*a, *b)));
                p.set_bracket(ids[x], ids[y], vec![p0, p1])?;
            }
        }
        for b in &self.s_plus {
            let phi = p.add_odd(&phi_name(*b), q(0))?;
            let psi = p.add_odd(&psi_name(*b), q(1))?;
            p.set_scalar_pole(phi, psi, 0, Scalar::int(1))?;
        }
        let half = Rational::new(1.into(), 2.into());
        let del: Vec<_> =
            self.s_half.iter().map(|b| p.add_even(&neutral_name(*b), half.clone())).collect::<Result<_>>()?;
        for (x, a) in self.s_half.iter().enumerate() {
            for (y, b) in self.s_half.iter().enumerate().skip(x + 1) {
                let c = self.neutral_form(*a, *b);
                if !c.is_zero() {
                    p.set_scalar_pole(del[x], del[y], 0, Scalar::rational(c))?;
                }
            }
        }
        Ok(p)
    }

    fn gen(&self, name: &str) -> Result<Expr> {
        Ok(FieldExpr::generator(self.pres.id(name)?))
    }

    pub fn current(&self, b: BasisElement) -> Result<Expr> {
        self.gen(&current_name(b))
    }

    pub fn current_combination(&self, c: &Combination) -> Result<Expr> {
        let mut out = Expr::zero();
        for (b, x) in c {
            out.add_scaled(&self.current(*b)?, &Scalar::rational(x.clone()));
        }
        Ok(out)
    }

    pub fn phi(&self, b: BasisElement) -> Result<Expr> {
        self.gen(&phi_name(b))
    }

    pub fn psi(&self, b: BasisElement) -> Result<Expr> {
        self.gen(&psi_name(b))
    }

    pub fn neutral(&self, b: BasisElement) -> Result<Expr> {
        self.gen(&neutral_name(b))
    }

    /// `ξ^a = Σ_c X_{ac} δ^c` with `(ξ^a | δ^b)_ne = δ_{ab}`.
    fn neutral_dual(&self) -> Result<Vec<Expr>> {
        let s = &self.s_half;
        let d = s.len();
        // Solve X·G = I with G_{cb} = (c|b).
        let mut g: Vec<Vec<Rational>> = (0..d)
            .map(|c| (0..d).map(|b| self.neutral_form(s[c], s[b])).chain((0..d).map(|j| q(i64::from(j == c)))).collect())
            .collect();
        // Row-reduce [G | I] to [I | G⁻¹]; X = G⁻¹ since G⁻¹G = I.
        for col in 0..d {
            let p = (col..d)
                .find(|&r| !g[r][col].is_zero())
                .ok_or_else(|| Error::InconsistentGrading("degenerate neutral form".into()))?;
            g.swap(col, p);
            let piv = g[col][col].clone();
            for v in g[col].iter_mut() {
                *v /= &piv;
            }
            for r in 0..d {
                if r != col && !g[r][col].is_zero() {
                    let fct = g[r][col].clone();
                    for j in 0..2 * d {
                        let t = &fct * &g[col][j];
                        g[r][j] -= t;
                    }
                }
            }
        }
        (0..d)
            .map(|a| {
                let mut out = Expr::zero();
                for c in 0..d {
                    out.add_scaled(&self.neutral(s[c])?, &Scalar::rational(g[a][d + c].clone()));
                }
                Ok(out)
            })
            .collect()
    }
}

fn no(eng: &Engine<'_, Scalar>, xs: &[Expr]) -> Result<Expr> {
    let (last, rest) = xs.split_last().expect("non-empty product");
    let mut acc = last.clone();
    for x in rest.iter().rev() {
        acc = eng.normal_order(x, &acc)?;
    }
    Ok(acc)
}

/// `d = Σ :J^a ψ^a: − ½ Σ C^{a,b}_c :φ^c ψ^a ψ^b: + Σ ⟨f, J^a⟩ ψ^a + Σ :ψ^a δ^a:`.
pub fn brst_differential(r: &ReductionDatum) -> Result<Expr> {
    let eng = r.engine();
    let mut d = Expr::zero();
    let half = Scalar::frac(-1, 2);
    for a in &r.s_plus {
        d = d.add(&no(&eng, &[r.current(*a)?, r.psi(*a)?])?);
        let fa = r.root.inner_combination(&r.f, &[(*a, Rational::one())].into());
        d.add_scaled(&r.psi(*a)?, &Scalar::rational(fa));
    }
    for a in &r.s_plus {
        for b in &r.s_plus {
            for (c, coef) in r.root.bracket(*a, *b)? {
                if !r.s_plus.contains(&c) {
                    return Err(Error::InconsistentGrading(format!("[{a}, {b}] leaves A_+")));
                }
                let t = no(&eng, &[r.phi(c)?, r.psi(*a)?, r.psi(*b)?])?;
                d.add_scaled(&t, &(half.clone() * Scalar::rational(coef)));
            }
        }
    }
    for a in &r.s_half {
        d = d.add(&no(&eng, &[r.psi(*a)?, r.neutral(*a)?])?);
    }
    Ok(d)
}

/// `L = T^{Sug} + ∂x − Σ m_a :ψ^a ∂φ^a: + Σ (1−m_a) :∂ψ^a φ^a: + ½ Σ :∂δ^a ξ^a:`,
/// with `T^{Sug} = (2(k+n+1))⁻¹ Σ :J^a J_a:` over the trace-dual basis.
pub fn brst_em_field(r: &ReductionDatum) -> Result<Expr> {
    let eng = r.engine();
    let mut sug = Expr::zero();
    for a in r.root.basis() {
        sug = sug.add(&no(&eng, &[r.current(a)?, r.current_combination(&r.root.dual(a))?])?);
    }
    let kh = Scalar::k_plus(r.n as i64 + 1);
    let mut l = sug.scale(&(Scalar::int(2) * kh).inv()?);
    l = l.add(&eng.derivative(&r.current_combination(&r.grading_element())?)?);
    for a in &r.s_plus {
        let m = Scalar::rational(r.grade(*a));
        let (phi, psi) = (r.phi(*a)?, r.psi(*a)?);
        let t1 = no(&eng, &[psi.clone(), eng.derivative(&phi)?])?;
        let t2 = no(&eng, &[eng.derivative(&psi)?, phi])?;
        l.add_scaled(&t1, &-m.clone());
        l.add_scaled(&t2, &(Scalar::int(1) - m));
    }
    let xi = r.neutral_dual()?;
    for (a, x) in r.s_half.iter().zip(&xi) {
        let t = no(&eng, &[eng.derivative(&r.neutral(*a)?)?, x.clone()])?;
        l.add_scaled(&t, &Scalar::frac(1, 2));
    }
    Ok(l)
}

fn check_level(n: usize, k: &Scalar) -> Result<Scalar> {
    let kh = k + &Scalar::int(n as i64 + 1);
    if kh.is_zero() {
        return Err(Error::CriticalLevel(k.to_string()));
    }
    Ok(kh)
}

/// `c = k dim𝔤/(k+h∨) − 12k⟨x,x⟩ − Σ_{S_+}(12m_a² − 12m_a + 2) − ½ dim 𝔤_{1/2}`.
pub fn central_charge(r: &ReductionDatum, k: &Scalar) -> Result<Scalar> {
    let kh = check_level(r.n, k)?;
    let dim = Scalar::int(r.root.dim() as i64);
    let x = r.grading_element();
    let xx = Scalar::rational(r.root.inner_combination(&x, &x));
    let mut c = k * &dim / kh - Scalar::int(12) * k.clone() * xx;
    for a in &r.s_plus {
        let m = r.grade(*a);
        let t = q(12) * &m * &m - q(12) * &m + q(2);
        c = c - Scalar::rational(t);
    }
    Ok(c - Scalar::frac(r.s_half.len() as i64, 2))
}

/// Central charge of the hook-type W-algebra for the partition
/// `(n−m+2, 1^{m−1})`.
pub fn hook_central_charge(n: usize, m: usize, k: &Scalar) -> Result<Scalar> {
    if n == 0 || m == 0 || m > n + 1 {
        return Err(Error::OutOfRange(format!("(n, m) = ({n}, {m})")));
    }
    let kh = check_level(n, k)?;
    let (ni, mi) = (n as i64, m as i64);
    let s = Scalar::int;
    let p = ni - mi + 2;
    let tail = (mi - ni - 1) * (mi * mi * (ni + 2) - 2 * mi * (ni * ni + 3 * ni + 3) + ni.pow(3) + 4 * ni * ni + 5 * ni + 3);
    Ok(k * &s(ni * (ni + 2)) / kh - k.clone() * s(p * (p * p - 1)) + s(tail))
}

/// Pole-2 coefficient of `J(z)J(w)`: `−(m−1)(1 + n − (k+n+1)(n−m+2))/(n+1)`.
pub fn j_level(n: usize, m: usize, k: &Scalar) -> Result<Scalar> {
    if m < 2 || m > n + 1 {
        return Err(Error::OutOfRange(format!("m = {m} for a J-field")));
    }
    let (ni, mi) = (n as i64, m as i64);
    let kh = k + &Scalar::int(ni + 1);
    let inner = Scalar::int(1 + ni) - kh * Scalar::int(ni - mi + 2);
    Ok(Scalar::int(-(mi - 1)) * inner / Scalar::int(ni + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opecore::ope;

    fn check_complex(r: &ReductionDatum) {
        let eng = r.engine();
        let d = brst_differential(r).unwrap();
        assert!(ope(&eng, &d, &d).unwrap().is_regular(), "d(z)d(w) is singular");
        let l = brst_em_field(r).unwrap();
        let ll = ope(&eng, &l, &l).unwrap();
        let c = central_charge(r, &Scalar::k()).unwrap();
        assert_eq!(ll.pole(4), Expr::scalar(c / Scalar::int(2)));
        assert!(ll.pole(3).is_zero());
        assert_eq!(ll.pole(2), l.scale(&Scalar::int(2)));
        assert_eq!(ll.pole(1), eng.derivative(&l).unwrap());
        let ld = ope(&eng, &l, &d).unwrap();
        assert_eq!(ld.pole(1), eng.derivative(&d).unwrap());
        assert_eq!(ld.pole(2), d);
        assert!(ld.pole(3).is_zero() && ld.pole(4).is_zero());
    }

    #[test]
    fn sl2_principal() {
        let r = ReductionDatum::hook(1, 1, Variant::Standard).unwrap();
        let eng = r.engine();
        let d = brst_differential(&r).unwrap();
        let e = BasisElement::E(1, 1);
        let want = eng.normal_order(&r.current(e).unwrap(), &r.psi(e).unwrap()).unwrap().add(&r.psi(e).unwrap());
        assert_eq!(d, want);
        check_complex(&r);
        let c = central_charge(&r, &Scalar::k()).unwrap();
        let k2 = Scalar::k_plus(2);
        let want = Scalar::int(1) - Scalar::int(6) * Scalar::k_plus(1) * Scalar::k_plus(1) / k2;
        assert_eq!(c, want);
        assert_eq!(c, hook_central_charge(1, 1, &Scalar::k()).unwrap());
    }

    #[test]
    fn dynkin_gradings_match_hook_central_charge() {
        for (n, m) in [(1, 1), (2, 1), (2, 2), (3, 3), (3, 2), (4, 3)] {
            let r = ReductionDatum::hook_dynkin(n, m).unwrap();
            let c = central_charge(&r, &Scalar::k()).unwrap();
            assert_eq!(c, hook_central_charge(n, m, &Scalar::k()).unwrap(), "({n}, {m})");
        }
    }

    #[test]
    fn sl3_cases() {
        for m in [1, 2] {
            check_complex(&ReductionDatum::hook(2, m, Variant::Standard).unwrap());
            let r = ReductionDatum::hook_dynkin(2, m).unwrap();
            check_complex(&r);
            let c = central_charge(&r, &Scalar::k()).unwrap();
            assert_eq!(c, hook_central_charge(2, m, &Scalar::k()).unwrap());
        }
    }

    /// The even grading `(0, 1)` for the minimal sl₃ nilpotent moves `L` by
    /// `∂` of a Cartan current, which shifts the central charge.
    #[test]
    fn even_minimal_grading_shifts_central_charge() {
        let r = ReductionDatum::hook(2, 2, Variant::Standard).unwrap();
        let c = central_charge(&r, &Scalar::k()).unwrap();
        let want = Scalar::int(-4) * Scalar::k_plus(1) * (Scalar::int(2) * Scalar::k() + Scalar::int(3)) / Scalar::k_plus(3);
        assert_eq!(c, want);
    }

    /// sl₃ with `x = ½(ω₁^∨ + ω₂^∨)`, so `𝔤_{1/2}` is spanned by `e₁, e₂`
    /// and the neutral ghosts take part.
    #[test]
    fn half_integer_grading() {
        let half = Rational::new(1.into(), 2.into());
        let f: Combination = [(BasisElement::F(1, 2), Rational::one())].into();
        let r = ReductionDatum::new(2, vec![half.clone(), half], f).unwrap();
        assert_eq!(r.s_half().len(), 2);
        check_complex(&r);
    }

    #[test]
    fn bad_gradings_are_rejected() {
        let f: Combination = [(BasisElement::F(1, 1), Rational::one())].into();
        assert!(ReductionDatum::new(2, vec![q(0), q(1)], f).is_err());
        assert!(ReductionDatum::hook(2, 3, Variant::Bar).is_err());
    }

    #[test]
    fn closed_forms() {
        let k = Scalar::k();
        let want = Scalar::int(-3) * k.clone() * (Scalar::int(2) * k.clone() + Scalar::int(3)) / Scalar::k_plus(4);
        assert_eq!(hook_central_charge(3, 3, &k).unwrap(), want);
        for n in 1..=6usize {
            let ni = n as i64;
            let want = k.clone() * Scalar::int(ni * (ni + 2)) / Scalar::k_plus(ni + 1);
            assert_eq!(hook_central_charge(n, n + 1, &k).unwrap(), want);
        }
        assert_eq!(j_level(3, 3, &k).unwrap(), Scalar::k_plus(2));
        assert!(j_level(3, 1, &k).is_err());
        assert!(hook_central_charge(2, 2, &Scalar::int(-3)).is_err());
    }
}
