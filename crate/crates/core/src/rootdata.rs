//! The sl(n+1) root system, its Cartan–Weyl basis built from elementary
//! matrices, the trace form, hook-type nilpotents and their good gradings.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalars::Rational;

/// Positive root `α_{i,j} = α_i + … + α_j`, `1 ≤ i ≤ j ≤ n`.
pub type Root = (usize, usize);

/// Weight or root in the simple-root basis.
pub type Weight = Vec<Rational>;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Element of the Cartan–Weyl basis. `E(i,j) = M_{i,j+1}`,
/// `F(i,j) = M_{j+1,i}`, `H(i) = M_{i,i} − M_{i+1,i+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BasisElement {
    E(usize, usize),
    H(usize),
    F(usize, usize),
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElement::E(i, j) if i == j => write!(f, "e{i}"),
            BasisElement::E(i, j) => write!(f, "e{i}{j}"),
            BasisElement::H(i) => write!(f, "h{i}"),
            BasisElement::F(i, j) if i == j => write!(f, "f{i}"),
            BasisElement::F(i, j) => write!(f, "f{i}{j}"),
        }
    }
}

/// Linear combination of basis elements.
pub type Combination = BTreeMap<BasisElement, Rational>;

/// Square matrix over ℚ.
pub type Matrix = Vec<Vec<Rational>>;

fn zero_matrix(d: usize) -> Matrix {
    vec![vec![Rational::zero(); d]; d]
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let d = a.len();
    let mut out = zero_matrix(d);
    for i in 0..d {
        for t in 0..d {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..d {
                if !b[t][j].is_zero() {
                    out[i][j] += &a[i][t] * &b[t][j];
                }
            }
        }
    }
    out
}

fn mat_sub(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    mat_sub(&mat_mul(a, b), &mat_mul(b, a))
}

/// Rank of a rectangular matrix by exact elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &pivot;
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Root datum of sl(n+1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    n: usize,
}

impl RootDatum {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("rank 0".into()));
        }
        Ok(RootDatum { n })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn positive_roots(&self) -> Vec<Root> {
        (1..=self.n).flat_map(|i| (i..=self.n).map(move |j| (i, j))).collect()
    }

    pub fn highest_root(&self) -> Root {
        (1, self.n)
    }

    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        match i.abs_diff(j) {
            0 => 2,
            1 => -1,
            _ => 0,
        }
    }

    /// `C⁻¹_{ij} = min(i,j)(n+1−max(i,j))/(n+1)`.
    pub fn inverse_cartan(&self, i: usize, j: usize) -> Rational {
        let (a, b) = (i.min(j) as i64, i.max(j) as i64);
        let h = self.n as i64 + 1;
        Rational::new((a * (h - b)).into(), h.into())
    }

    pub fn root_vector(&self, (i, j): Root) -> Weight {
        (1..=self.n).map(|t| if (i..=j).contains(&t) { Rational::one() } else { Rational::zero() }).collect()
    }

    /// `ω_i = Σ_j C⁻¹_{ij} α_j`.
    pub fn fundamental_weight(&self, i: usize) -> Weight {
        (1..=self.n).map(|j| self.inverse_cartan(i, j)).collect()
    }

    /// `⟨u, v⟩ = uᵀ C v` in the simple-root basis.
    pub fn pair(&self, u: &Weight, v: &Weight) -> Rational {
        let mut s = Rational::zero();
        for (a, x) in u.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in v.iter().enumerate() {
                let c = self.cartan(a + 1, b + 1);
                if c != 0 && !y.is_zero() {
                    s += x * y * q(c);
                }
            }
        }
        s
    }

    /// Basis ordered as `e`'s, `h`'s, `f`'s.
    pub fn basis(&self) -> Vec<BasisElement> {
        let roots = self.positive_roots();
        let mut out: Vec<BasisElement> = roots.iter().map(|&(i, j)| BasisElement::E(i, j)).collect();
        out.extend((1..=self.n).map(BasisElement::H));
        out.extend(roots.iter().map(|&(i, j)| BasisElement::F(i, j)));
        out
    }

    pub fn dim(&self) -> usize {
        self.n * (self.n + 2)
    }

    fn check(&self, b: BasisElement) -> Result<()> {
        let ok = match b {
            BasisElement::E(i, j) | BasisElement::F(i, j) => 1 <= i && i <= j && j <= self.n,
            BasisElement::H(i) => 1 <= i && i <= self.n,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("basis element {b} for rank {}", self.n)))
        }
    }

    pub fn matrix(&self, b: BasisElement) -> Matrix {
        let mut m = zero_matrix(self.n + 1);
        match b {
            BasisElement::E(i, j) => m[i - 1][j] = Rational::one(),
            BasisElement::F(i, j) => m[j][i - 1] = Rational::one(),
            BasisElement::H(i) => {
                m[i - 1][i - 1] = Rational::one();
                m[i][i] = -Rational::one();
            }
        }
        m
    }

    pub fn combination_matrix(&self, c: &Combination) -> Matrix {
        let mut m = zero_matrix(self.n + 1);
        for (b, x) in c {
            let bm = self.matrix(*b);
            for (r, row) in bm.iter().enumerate() {
                for (s, y) in row.iter().enumerate() {
                    if !y.is_zero() {
                        m[r][s] += x * y;
                    }
                }
            }
        }
        m
    }

    /// Expansion of a traceless matrix in the Cartan–Weyl basis.
    pub fn decompose(&self, m: &Matrix) -> Result<Combination> {
        let d = self.n + 1;
        let trace: Rational = (0..d).map(|i| m[i][i].clone()).sum();
        if !trace.is_zero() {
            return Err(Error::OutOfRange("matrix is not traceless".into()));
        }
        let mut out = Combination::new();
        for r in 0..d {
            for s in 0..d {
                if r != s && !m[r][s].is_zero() {
                    let b = if r < s { BasisElement::E(r + 1, s) } else { BasisElement::F(s + 1, r) };
                    out.insert(b, m[r][s].clone());
                }
            }
        }
        // diag(d_1,…,d_{n+1}) = Σ_i (d_1+…+d_i) h_i
        let mut acc = Rational::zero();
        for i in 1..=self.n {
            acc += &m[i - 1][i - 1];
            if !acc.is_zero() {
                out.insert(BasisElement::H(i), acc.clone());
            }
        }
        Ok(out)
    }

    /// `[a, b]` in the Cartan–Weyl basis.
    pub fn bracket(&self, a: BasisElement, b: BasisElement) -> Result<Combination> {
        self.check(a)?;
        self.check(b)?;
        self.decompose(&commutator(&self.matrix(a), &self.matrix(b)))
    }

    pub fn bracket_combination(&self, a: &Combination, b: &Combination) -> Combination {
        let c = commutator(&self.combination_matrix(a), &self.combination_matrix(b));
        self.decompose(&c).expect("commutators are traceless")
    }

    /// Trace form `tr(ab)`, the normalized invariant form of sl(n+1).
    pub fn inner(&self, a: BasisElement, b: BasisElement) -> Rational {
        let p = mat_mul(&self.matrix(a), &self.matrix(b));
        (0..=self.n).map(|i| p[i][i].clone()).sum()
    }

    pub fn inner_combination(&self, a: &Combination, b: &Combination) -> Rational {
        let p = mat_mul(&self.combination_matrix(a), &self.combination_matrix(b));
        (0..=self.n).map(|i| p[i][i].clone()).sum()
    }

    /// Dual basis vector under the trace form.
    pub fn dual(&self, b: BasisElement) -> Combination {
        match b {
            BasisElement::E(i, j) => [(BasisElement::F(i, j), Rational::one())].into(),
            BasisElement::F(i, j) => [(BasisElement::E(i, j), Rational::one())].into(),
            BasisElement::H(i) => (1..=self.n).map(|j| (BasisElement::H(j), self.inverse_cartan(i, j))).collect(),
        }
    }
}

/// `[a, b]` for basis elements of sl(n+1).
pub fn structure_constants(n: usize, a: BasisElement, b: BasisElement) -> Result<Combination> {
    RootDatum::new(n)?.bracket(a, b)
}

/// Trace form on basis elements.
pub fn inner(n: usize, a: BasisElement, b: BasisElement) -> Result<Rational> {
    let r = RootDatum::new(n)?;
    r.check(a)?;
    r.check(b)?;
    Ok(r.inner(a, b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RootClass {
    Internal,
    Exposed,
}

/// Classifies `α_{i,j} ≠ α_{1,rank}`: internal iff neither `α_1` nor
/// `α_rank` occurs. With `rank = m−1` this is the `Δ₀` analogue.
pub fn classify_root(rank: usize, (i, j): Root) -> Result<RootClass> {
    if !(1 <= i && i <= j && j <= rank) {
        return Err(Error::OutOfRange(format!("root ({i},{j}) for rank {rank}")));
    }
    if (i, j) == (1, rank) {
        return Err(Error::OutOfRange("the highest root is not classified".into()));
    }
    Ok(if 1 < i && j < rank { RootClass::Internal } else { RootClass::Exposed })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Standard,
    Bar,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "bar" => Ok(Variant::Bar),
            _ => Err(Error::OutOfRange(format!("variant `{s}`"))),
        }
    }
}

fn check_hook(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 || m > n + 1 {
        return Err(Error::OutOfRange(format!("(n, m) = ({n}, {m})")));
    }
    Ok(())
}

/// Grading with `grade(α_i) = 0` for `i < m` and `1` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodGrading {
    pub n: usize,
    pub m: usize,
    pub grades: Vec<u8>,
}

impl GoodGrading {
    pub fn root_grade(&self, (i, j): Root) -> i64 {
        (i..=j).map(|t| self.grades[t - 1] as i64).sum()
    }

    pub fn element_grade(&self, b: BasisElement) -> i64 {
        match b {
            BasisElement::E(i, j) => self.root_grade((i, j)),
            BasisElement::H(_) => 0,
            BasisElement::F(i, j) => -self.root_grade((i, j)),
        }
    }

    /// `Δ₀⁺ = {α_{i,j} : j ≤ m−1}`.
    pub fn delta0_positive(&self) -> Vec<Root> {
        let r = RootDatum { n: self.n };
        r.positive_roots().into_iter().filter(|&(_, j)| j < self.m).collect()
    }

    /// Positive roots of grade 1 or more.
    pub fn positive_part(&self) -> Vec<Root> {
        let r = RootDatum { n: self.n };
        r.positive_roots().into_iter().filter(|&(_, j)| j >= self.m).collect()
    }

    /// `x = Σ_i grade_i ω_i^∨` as coefficients of `h_j`.
    pub fn grading_element(&self) -> Combination {
        let r = RootDatum { n: self.n };
        let mut out = Combination::new();
        for (i, g) in self.grades.iter().enumerate() {
            if *g == 0 {
                continue;
            }
            for j in 1..=self.n {
                let c = r.inverse_cartan(i + 1, j) * q(*g as i64);
                let slot = out.entry(BasisElement::H(j)).or_insert_with(Rational::zero);
                *slot += c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Checks `f ∈ 𝔤_{−1}` and that `ad f: 𝔤_j → 𝔤_{j−1}` is injective for
    /// `j ≥ 1` and surjective for `j ≤ 0`.
    pub fn check_good(&self, f: &NilpotentRep) -> Result<()> {
        let r = RootDatum { n: self.n };
        let fm: Matrix = f.matrix.iter().map(|row| row.iter().map(|&x| q(x)).collect()).collect();
        let fc = r.decompose(&fm)?;
        if let Some((b, _)) = fc.iter().find(|(b, _)| self.element_grade(**b) != -1) {
            return Err(Error::InconsistentGrading(format!("component {b} of f is not of degree −1")));
        }
        let basis = r.basis();
        let top = self.root_grade(r.highest_root());
        for j in -top..=top {
            let src: Vec<_> = basis.iter().filter(|b| self.element_grade(**b) == j).collect();
            let tgt: Vec<_> = basis.iter().filter(|b| self.element_grade(**b) == j - 1).collect();
            // matrix of ad f from 𝔤_j to 𝔤_{j−1}
            let rows: Vec<Vec<Rational>> = src
                .iter()
                .map(|b| {
                    let img = r.bracket_combination(&fc, &[(**b, Rational::one())].into());
                    tgt.iter().map(|t| img.get(t).cloned().unwrap_or_else(Rational::zero)).collect()
                })
                .collect();
            let rk = if tgt.is_empty() { 0 } else { rank(&rows) };
            if j >= 1 && rk != src.len() {
                return Err(Error::InconsistentGrading(format!("ad f not injective on degree {j}")));
            }
            if j <= 0 && rk != tgt.len() {
                return Err(Error::InconsistentGrading(format!("ad f not onto degree {}", j - 1)));
            }
        }
        Ok(())
    }
}

pub fn good_grading(n: usize, m: usize) -> Result<GoodGrading> {
    check_hook(n, m)?;
    let grades = (1..=n).map(|i| u8::from(i >= m)).collect();
    Ok(GoodGrading { n, m, grades })
}

/// Matrix representative of a hook-type nilpotent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NilpotentRep {
    pub n: usize,
    pub m: usize,
    pub variant: Variant,
    pub matrix: Vec<Vec<i64>>,
}

impl NilpotentRep {
    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    /// Cartan–Weyl components of `f`.
    pub fn components(&self) -> Combination {
        let r = RootDatum { n: self.n };
        let fm: Matrix = self.matrix.iter().map(|row| row.iter().map(|&x| q(x)).collect()).collect();
        r.decompose(&fm).expect("nilpotents are traceless")
    }
}

/// Standard: `Σ_{i=m}^{n} M_{i+1,i}`. Bar: `f_{1,m} + Σ_{i=m+1}^{n} f_i`,
/// which is zero for `m = n+1`.
pub fn hook_nilpotent(n: usize, m: usize, variant: Variant) -> Result<NilpotentRep> {
    check_hook(n, m)?;
    let mut matrix = vec![vec![0i64; n + 1]; n + 1];
    let first = match variant {
        Variant::Standard => m,
        Variant::Bar => {
            if m <= n {
                matrix[m][0] = 1;
            }
            m + 1
        }
    };
    for i in first..=n {
        matrix[i][i - 1] = 1;
    }
    Ok(NilpotentRep { n, m, variant, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(b: BasisElement) -> Combination {
        [(b, Rational::one())].into()
    }

    fn add(a: &Combination, b: &Combination, sign: i64) -> Combination {
        let mut out = a.clone();
        for (k, v) in b {
            let slot = out.entry(*k).or_insert_with(Rational::zero);
            *slot += v * q(sign);
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    #[test]
    fn structure_constant_examples() {
        use BasisElement::*;
        assert_eq!(structure_constants(3, E(1, 1), F(1, 1)).unwrap(), single(H(1)));
        assert_eq!(structure_constants(3, E(1, 1), E(2, 2)).unwrap(), single(E(1, 2)));
        assert_eq!(structure_constants(3, H(1), E(1, 1)).unwrap(), [(E(1, 1), q(2))].into());
        assert_eq!(inner(3, E(1, 1), F(1, 1)).unwrap(), q(1));
        let r = RootDatum::new(3).unwrap();
        let w3 = r.fundamental_weight(3);
        assert_eq!(r.pair(&w3, &w3), Rational::new(3.into(), 4.into()));
        let th = r.root_vector(r.highest_root());
        assert_eq!(r.pair(&th, &th), q(2));
        for i in 1..=3 {
            for j in 1..=3 {
                let p = r.pair(&r.fundamental_weight(i), &r.root_vector((j, j)));
                assert_eq!(p, if i == j { q(1) } else { q(0) });
            }
        }
    }

    #[test]
    fn jacobi_and_invariance() {
        for n in 1..=4 {
            let r = RootDatum::new(n).unwrap();
            let basis = r.basis();
            let brackets: BTreeMap<(BasisElement, BasisElement), Combination> = basis
                .iter()
                .flat_map(|a| basis.iter().map(move |b| (*a, *b)))
                .map(|(a, b)| ((a, b), r.bracket(a, b).unwrap()))
                .collect();
            let br = |x: BasisElement, c: &Combination| -> Combination {
                let mut out = Combination::new();
                for (b, v) in c {
                    for (t, w) in &brackets[&(x, *b)] {
                        let slot = out.entry(*t).or_insert_with(Rational::zero);
                        *slot += v * w;
                    }
                }
                out.retain(|_, c| !c.is_zero());
                out
            };
            for a in &basis {
                for b in &basis {
                    for c in &basis {
                        // [a,[b,c]] = [[a,b],c] + [b,[a,c]]
                        let lhs = br(*a, &brackets[&(*b, *c)]);
                        let ab = &brackets[&(*a, *b)];
                        let mut abc = Combination::new();
                        for (t, v) in ab {
                            for (u, w) in &brackets[&(*t, *c)] {
                                let slot = abc.entry(*u).or_insert_with(Rational::zero);
                                *slot += v * w;
                            }
                        }
                        abc.retain(|_, c| !c.is_zero());
                        let rhs = add(&abc, &br(*b, &brackets[&(*a, *c)]), 1);
                        assert_eq!(lhs, rhs, "Jacobi {a} {b} {c}");
                        if n <= 3 {
                            let t1 = r.inner_combination(ab, &single(*c));
                            let t2 = r.inner_combination(&single(*b), &brackets[&(*a, *c)]);
                            assert!((t1 + t2).is_zero());
                        }
                    }
                }
            }
            for a in &basis {
                for b in &basis {
                    let d = r.inner_combination(&single(*a), &r.dual(*b));
                    assert_eq!(d, if a == b { q(1) } else { q(0) });
                }
            }
        }
    }

    #[test]
    fn classification_and_gradings() {
        assert_eq!(classify_root(3, (2, 2)).unwrap(), RootClass::Internal);
        assert_eq!(classify_root(3, (1, 2)).unwrap(), RootClass::Exposed);
        assert_eq!(classify_root(3, (2, 3)).unwrap(), RootClass::Exposed);
        assert!(classify_root(3, (1, 3)).is_err());
        for n in 1..=5 {
            for m in 1..=n + 1 {
                let g = good_grading(n, m).unwrap();
                assert_eq!(g.delta0_positive().len(), m * (m - 1) / 2);
                for v in [Variant::Standard, Variant::Bar] {
                    let f = hook_nilpotent(n, m, v).unwrap();
                    g.check_good(&f).unwrap_or_else(|e| panic!("({n},{m}) {v:?}: {e}"));
                }
                if m >= 2 {
                    let r = RootDatum::new(n).unwrap();
                    let rest: Vec<Root> = r.positive_roots().into_iter().filter(|&x| x != (1, n)).collect();
                    for a in rest {
                        classify_root(n, a).unwrap();
                    }
                }
            }
        }
        let g = good_grading(3, 3).unwrap();
        assert_eq!(g.delta0_positive(), vec![(1, 1), (1, 2), (2, 2)]);
        assert_eq!(good_grading(5, 3).unwrap().grades, vec![0, 0, 1, 1, 1]);
        assert!(hook_nilpotent(3, 4, Variant::Standard).unwrap().is_zero());
        assert_eq!(good_grading(3, 4).unwrap().delta0_positive().len(), 6);
        let fb = hook_nilpotent(3, 3, Variant::Bar).unwrap();
        assert_eq!(fb.components(), single(BasisElement::F(1, 3)));
        assert!(good_grading(3, 5).is_err());
    }
}
