//! The minimal sl₄ W-algebra presentation and the sl₄ embedding tables.

use serde::Serialize;

use super::{FreeFieldStack, StackSpec};
use crate::error::{Error, Result};
use crate::opecore::{format_expr, parse_expr, Engine, FieldExpr, GenId, Presentation};
use crate::scalars::{Rational, Scalar};
use crate::Expr;

/// Generators of the minimal sl₄ W-algebra in declaration order.
pub const MINIMAL_SL4_GENERATORS: [&str; 9] = ["J", "H", "E", "F", "L", "P[1,+]", "P[1,-]", "P[2,+]", "P[2,-]"];

fn weight(name: &str) -> Rational {
    match name {
        "L" => Rational::from_integer(2.into()),
        n if n.starts_with('P') => Rational::new(3.into(), 2.into()),
        _ => Rational::from_integer(1.into()),
    }
}

/// Central charge `−3k(2k+3)/(k+4)`.
pub fn minimal_sl4_central_charge() -> Scalar {
    let k = Scalar::k();
    Scalar::int(-3) * k.clone() * (Scalar::int(2) * k + Scalar::int(3)) / Scalar::k_plus(4)
}

/// Appends the nine W-generators and their brackets to `pres`.
pub fn add_minimal_sl4(pres: &mut Presentation<Scalar>) -> Result<()> {
    for name in MINIMAL_SL4_GENERATORS {
        pres.add_even(name, weight(name))?;
    }
    // Right-hand sides are read over a copy without brackets, so that the
    // grammar only sorts factors; every product below is written with its
    // factors in canonical order.
    let mut bare = Presentation::new();
    for g in pres.generators() {
        bare.add_generator(&g.name, g.parity, g.weight.clone())?;
    }
    let eng = Engine::new(&bare);
    let parse = |t: &str| parse_expr(&eng, t);
    let id = |n: &str| pres.id(n);
    let mut brackets: Vec<(GenId, GenId, Vec<Expr>)> = Vec::new();
    let mut set = |a: &str, b: &str, ps: &[&str]| -> Result<()> {
        let ps = ps.iter().map(|t| parse(t)).collect::<Result<Vec<_>>>()?;
        brackets.push((id(a)?, id(b)?, ps));
        Ok(())
    };

    set("H", "H", &["0", "2*(k+1)"])?;
    set("E", "F", &["H", "k+1"])?;
    set("H", "E", &["2*E"])?;
    set("H", "F", &["-2*F"])?;
    set("J", "J", &["0", "k+2"])?;
    for p in ["P[1,+]", "P[1,-]"] {
        set("H", p, &[p])?;
    }
    for p in ["P[2,+]", "P[2,-]"] {
        set("H", p, &[&format!("-{p}")])?;
    }
    for i in [1, 2] {
        set("J", &format!("P[{i},+]"), &[&format!("P[{i},+]")])?;
        set("J", &format!("P[{i},-]"), &[&format!("-P[{i},-]")])?;
    }
    set("E", "P[2,-]", &["P[1,-]"])?;
    set("E", "P[2,+]", &["-P[1,+]"])?;
    set("F", "P[1,-]", &["P[2,-]"])?;
    set("F", "P[1,+]", &["-P[2,+]"])?;
    set("P[1,-]", "P[1,+]", &["2*no(J,E) - (k+2)*der(1,E)", "-2*(k+2)*E"])?;
    set("P[2,-]", "P[2,+]", &["2*no(J,F) - (k+2)*der(1,F)", "-2*(k+2)*F"])?;
    set(
        "P[1,-]",
        "P[2,+]",
        &[
            "(k+4)*L - 2*no(E,F) - 1/2*no(H,H) + no(J,H) - 3/2*no(J,J) - k/2*der(1,H) + (k+1)*der(1,J)",
            "2*(k+1)*J - (k+2)*H",
            "-2*(k+1)*(k+2)",
        ],
    )?;
    set(
        "P[1,+]",
        "P[2,-]",
        &[
            "-(k+4)*L + 2*no(E,F) + 1/2*no(H,H) + no(J,H) + 3/2*no(J,J) + k/2*der(1,H) + (k+1)*der(1,J)",
            "2*(k+1)*J + (k+2)*H",
            "2*(k+1)*(k+2)",
        ],
    )?;

    let l = id("L")?;
    let half_c = minimal_sl4_central_charge() / Scalar::int(2);
    let lg = FieldExpr::generator(l);
    brackets.push((
        l,
        l,
        vec![eng.derivative(&lg)?, lg.scale(&Scalar::int(2)), Expr::zero(), Expr::scalar(half_c)],
    ));
    for name in MINIMAL_SL4_GENERATORS.iter().filter(|n| **n != "L") {
        let x = FieldExpr::generator(id(name)?);
        let h = Scalar::rational(weight(name));
        brackets.push((l, id(name)?, vec![eng.derivative(&x)?, x.scale(&h)]));
    }
    for (a, b, ps) in brackets {
        pres.set_bracket(a, b, ps)?;
    }
    Ok(())
}

/// The minimal sl₄ W-algebra on its own.
pub fn minimal_sl4_presentation() -> Result<Presentation<Scalar>> {
    let mut pres = Presentation::new();
    add_minimal_sl4(&mut pres)?;
    Ok(pres)
}

/// Ordered list of named images over a free-field stack.
#[derive(Clone, Debug)]
pub struct EmbeddingTable {
    stack: FreeFieldStack,
    entries: Vec<(String, Expr)>,
}

#[derive(Serialize)]
struct TableEntry<'a> {
    name: &'a str,
    image: String,
}

#[derive(Serialize)]
struct TableFile<'a> {
    stack: String,
    entries: Vec<TableEntry<'a>>,
}

impl EmbeddingTable {
    pub fn new(stack: FreeFieldStack, entries: Vec<(String, Expr)>) -> Self {
        EmbeddingTable { stack, entries }
    }

    /// Parses `(name, grammar text)` rows over `stack`.
    pub fn from_rows(stack: FreeFieldStack, rows: &[(&str, &str)]) -> Result<Self> {
        let entries = {
            let eng = stack.engine();
            rows.iter()
                .map(|(n, t)| Ok((n.to_string(), parse_expr(&eng, t)?)))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(EmbeddingTable { stack, entries })
    }

    pub fn stack(&self) -> &FreeFieldStack {
        &self.stack
    }

    pub fn entries(&self) -> &[(String, Expr)] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Result<&Expr> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| Error::MissingTable(name.into()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pres = self.stack.presentation();
        let file = TableFile {
            stack: self.stack.spec().to_string(),
            entries: self
                .entries
                .iter()
                .map(|(n, e)| TableEntry { name: n, image: format_expr(pres, e) })
                .collect(),
        };
        serde_json::to_value(file).expect("table serializes")
    }
}

/// Wakimoto realisation of `V^k(sl₄)`.
pub fn wakimoto_sl4_table() -> Result<EmbeddingTable> {
    let stack = FreeFieldStack::new(StackSpec::wakimoto(3)?)?;
    EmbeddingTable::from_rows(
        stack,
        &[
            ("e1", "B[1,1] + no(B[1,2], G[2,2]) + no(B[1,3], G[2,3])"),
            ("e2", "B[2,2] + no(B[2,3], G[3,3])"),
            ("e3", "B[3,3]"),
            (
                "h1",
                "a1 + 2*no(B[1,1],G[1,1]) - no(B[2,2],G[2,2]) + no(B[1,2],G[1,2]) - no(B[2,3],G[2,3]) + no(B[1,3],G[1,3])",
            ),
            (
                "h2",
                "a2 - no(B[1,1],G[1,1]) + 2*no(B[2,2],G[2,2]) - no(B[3,3],G[3,3]) + no(B[1,2],G[1,2]) + no(B[2,3],G[2,3])",
            ),
            (
                "h3",
                "a3 - no(B[2,2],G[2,2]) + 2*no(B[3,3],G[3,3]) - no(B[1,2],G[1,2]) + no(B[2,3],G[2,3]) + no(B[1,3],G[1,3])",
            ),
            (
                "f1",
                "-no(a1,G[1,1]) - no(B[1,1],no(G[1,1],G[1,1])) + no(B[2,2],G[1,2]) + no(B[2,3],G[1,3]) - (k+2)*der(1,G[1,1])",
            ),
            (
                "f2",
                "-no(a2,G[2,2]) - no(B[2,2],no(G[2,2],G[2,2])) + no(B[1,1],no(G[1,1],G[2,2])) \
                 - no(B[1,2],no(G[2,2],G[1,2])) - no(B[1,1],G[1,2]) + no(B[3,3],G[2,3]) - (k+1)*der(1,G[2,2])",
            ),
            (
                "f3",
                "-no(a3,G[3,3]) - no(B[3,3],no(G[3,3],G[3,3])) + no(B[2,2],no(G[2,2],G[3,3])) \
                 + no(B[1,2],no(G[3,3],G[1,2])) - no(B[2,3],no(G[3,3],G[2,3])) - no(B[1,3],no(G[3,3],G[1,3])) \
                 - no(B[2,2],G[2,3]) - no(B[1,2],G[1,3]) - k*der(1,G[3,3])",
            ),
        ],
    )
}

/// Images of `E`, `J`, `H`, `P^{1,+}` in the hook-type Wakimoto realisation
/// of the minimal sl₄ W-algebra.
pub fn minimal_sl4_wakimoto_table() -> Result<EmbeddingTable> {
    let stack = FreeFieldStack::new(StackSpec::hook(3, 3)?)?;
    EmbeddingTable::from_rows(
        stack,
        &[
            ("E", "B[2,2]"),
            ("J", "1/2*a1 - 1/2*a3 + no(B[1,1],G[1,1]) + no(B[1,2],G[1,2])"),
            ("H", "a2 - no(B[1,1],G[1,1]) + no(B[1,2],G[1,2]) + 2*no(B[2,2],G[2,2])"),
            ("P[1,+]", "-no(B[1,1],B[2,2]) + no(B[1,2],no(B[1,2],G[1,2])) - no(B[1,2],a3) - (k+2)*der(1,B[1,2])"),
        ],
    )
}

/// Minimal sl₄ W-algebra ⊗ Π ⊗ βγ at `α_{2,3}`, `α_{3,3}`.
pub fn appendix_stack() -> Result<FreeFieldStack> {
    FreeFieldStack::new(StackSpec::appendix())
}

/// Inverse reduction of `V^k(sl₄)` into [`appendix_stack`]. The image of
/// `f₃` carries `−k∂γ₃`, as in the Wakimoto table it comes from; with
/// `+k∂γ₃` the double pole of `e₃·f₃` would be `−k`.
pub fn appendix_table() -> Result<EmbeddingTable> {
    EmbeddingTable::from_rows(
        appendix_stack()?,
        &[
            ("e1", "no(G[2,3], vop{c: 1})"),
            ("e2", "E + no(B[2,3], G[3,3])"),
            ("e3", "B[3,3]"),
            ("h1", "3/2*J - 1/2*H + 1/2*d - (3*k+16)/8*c - no(B[2,3],G[2,3])"),
            ("h2", "H + no(B[2,3],G[2,3]) - no(B[3,3],G[3,3])"),
            ("h3", "-1/2*J - 1/2*H + 1/2*d + (5*k+16)/8*c + no(B[2,3],G[2,3]) + 2*no(B[3,3],G[3,3])"),
            (
                "f1",
                "P[1,-] - no(E, no(B[3,3], vop{c: -1})) + 1/2*no(3*J - H, no(B[2,3], vop{c: -1})) \
                 - (11*k+16)/8*no(B[2,3], no(c, vop{c: -1})) + 1/2*no(B[2,3], no(d, vop{c: -1})) \
                 + (k+1)*no(der(1,B[2,3]), vop{c: -1})",
            ),
            ("f2", "F + no(B[3,3], G[2,3])"),
            (
                "f3",
                "-no(P[1,+], vop{c: -1}) - no(E, G[2,3]) + 1/2*no(J + H, G[3,3]) - no(B[3,3], no(G[3,3], G[3,3])) \
                 - (5*k+16)/8*no(G[3,3], c) - 1/2*no(G[3,3], d) - no(B[2,3], no(G[3,3], G[2,3])) - k*der(1, G[3,3])",
            ),
        ],
    )
}
