//! Surface-script AST. `Display` re-emits canonical script text, so
//! `parse(print(ast)) == ast` holds for every well-formed script.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub statements: Vec<Spanned<Stmt>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned<T> {
    pub node: T,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivAtom {
    /// K, a generator, a let-binding or a curve record.
    Name(String),
    /// The generic fiber `f` or a named fiber `f[P]`.
    Fiber(Option<String>),
    /// Strict transform of the exceptional over a blown-up point: `E[x]`.
    Exceptional(String),
    Mobile {
        class: Box<DivExpr>,
        candidates: Vec<String>,
    },
    Fixed {
        class: Box<DivExpr>,
        candidates: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DivExpr {
    pub terms: Vec<(i64, DivAtom)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseAtom {
    K,
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BaseExpr {
    pub terms: Vec<(i64, BaseAtom)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ge,
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LedgerStmt {
    Fact {
        class: DivExpr,
        specs: Vec<(usize, CmpOp, i64)>,
        why: Option<String>,
    },
    Ses {
        a: DivExpr,
        by: String,
        with: Option<(i64, i64)>,
        why: Option<String>,
    },
    Serre(DivExpr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Intersect(DivExpr, DivExpr),
    SelfInt(DivExpr),
    Pa(DivExpr),
    Chi(DivExpr),
    LinEq(DivExpr, DivExpr),
    NumEq(DivExpr, DivExpr),
    Degree(BaseExpr),
    H0Curve(BaseExpr),
    H1Curve(BaseExpr),
    RrCurve(BaseExpr),
    Positivity(BaseExpr),
    H0Ruled(i64, BaseExpr),
    H0AntiK,
    H0Anti2K,
    H(usize, DivExpr),
    ExpectedDimPlane(i64, Vec<i64>),
    PlaneCount(i64, Vec<i64>),
    Plucker(i64, Vec<i64>),
    CsBound(i64, i64, i64, i64),
    ProductGenus(i64, i64),
    ParityBound(i64),
    BpfDrop(DivExpr, DivExpr),
    SeparationDrop(DivExpr, DivExpr),
    Nef(DivExpr, DivExpr),
    Big(DivExpr, DivExpr),
    NegDef(Vec<String>),
    Z0Self(Vec<String>),
    Z0Pa(Vec<String>),
    SingMult(Vec<String>),
    IsRdp(Vec<String>),
    NonRationalPa(Vec<String>),
    Classify(Vec<String>),
    GenusBudget(i64, Vec<i64>),
    Reider(String, i64, Option<i64>),
    Model,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    SurfacePlane,
    SurfaceRuled {
        q: u32,
        e: i64,
        fibers: Vec<String>,
        decomposable: bool,
    },
    Torsion {
        expr: BaseExpr,
        order: u32,
        nonzero: bool,
    },
    Bundle {
        name: String,
        expr: BaseExpr,
    },
    Curve {
        name: String,
        class: DivExpr,
        pa: Option<i64>,
        smooth: bool,
        irreducible: bool,
        rational: bool,
        covers: Vec<(i64, i64)>,
    },
    Let {
        name: String,
        expr: DivExpr,
    },
    BlowUp {
        point: String,
        hosts: Vec<(String, i64)>,
        parent: Option<String>,
    },
    SetCanonical(DivExpr),
    /// Declared genericity of the base curve: (non)hyperelliptic, (no_)g14.
    Hypothesis(String),
    Assert {
        query: Query,
        expected: i64,
    },
    ExpectPaper {
        query: Query,
        expected: i64,
    },
    Query(Query),
    Note(String),
    Ledger(Vec<LedgerStmt>),
}

fn fmt_terms<A: fmt::Display>(f: &mut fmt::Formatter<'_>, terms: &[(i64, A)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (i, (c, atom)) in terms.iter().enumerate() {
        if i == 0 {
            if *c == 1 {
                write!(f, "{atom}")?;
            } else if *c == -1 {
                write!(f, "-{atom}")?;
            } else {
                write!(f, "{c}*{atom}")?;
            }
        } else if *c >= 0 {
            if *c == 1 {
                write!(f, " + {atom}")?;
            } else {
                write!(f, " + {c}*{atom}")?;
            }
        } else if *c == -1 {
            write!(f, " - {atom}")?;
        } else {
            write!(f, " - {}*{atom}", -c)?;
        }
    }
    Ok(())
}

impl fmt::Display for DivAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivAtom::Name(n) => write!(f, "{n}"),
            DivAtom::Fiber(None) => write!(f, "f"),
            DivAtom::Fiber(Some(p)) => write!(f, "f[{p}]"),
            DivAtom::Exceptional(p) => write!(f, "E[{p}]"),
            DivAtom::Mobile { class, candidates } => {
                write!(f, "mobile({class}; {})", candidates.join(", "))
            }
            DivAtom::Fixed { class, candidates } => {
                write!(f, "fixed({class}; {})", candidates.join(", "))
            }
        }
    }
}

impl fmt::Display for DivExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, &self.terms)
    }
}

impl fmt::Display for BaseAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseAtom::K => write!(f, "K"),
            BaseAtom::Name(n) => write!(f, "{n}"),
        }
    }
}

impl fmt::Display for BaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(f, &self.terms)
    }
}

fn ints(v: &[i64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Intersect(a, b) => write!(f, "intersect({a}, {b})"),
            Query::SelfInt(a) => write!(f, "selfint({a})"),
            Query::Pa(a) => write!(f, "pa({a})"),
            Query::Chi(a) => write!(f, "chi({a})"),
            Query::LinEq(a, b) => write!(f, "lineq({a}, {b})"),
            Query::NumEq(a, b) => write!(f, "numeq({a}, {b})"),
            Query::Degree(e) => write!(f, "degree({e})"),
            Query::H0Curve(e) => write!(f, "h0_curve({e})"),
            Query::H1Curve(e) => write!(f, "h1_curve({e})"),
            Query::RrCurve(e) => write!(f, "rr_curve({e})"),
            Query::Positivity(e) => write!(f, "positivity({e})"),
            Query::H0Ruled(a, e) => write!(f, "h0_ruled({a}, {e})"),
            Query::H0AntiK => write!(f, "h0_anti_k()"),
            Query::H0Anti2K => write!(f, "h0_anti_2k()"),
            Query::H(i, a) => write!(f, "h{i}({a})"),
            Query::ExpectedDimPlane(d, m) if m.is_empty() => {
                write!(f, "expected_dim_plane({d})")
            }
            Query::ExpectedDimPlane(d, m) => {
                write!(f, "expected_dim_plane({d}, {})", ints(m))
            }
            Query::PlaneCount(d, m) if m.is_empty() => write!(f, "plane_count({d})"),
            Query::PlaneCount(d, m) => write!(f, "plane_count({d}, {})", ints(m)),
            Query::Plucker(d, m) if m.is_empty() => write!(f, "plucker({d})"),
            Query::Plucker(d, m) => write!(f, "plucker({d}, {})", ints(m)),
            Query::CsBound(a, b, c, d) => write!(f, "cs_bound({a}, {b}, {c}, {d})"),
            Query::ProductGenus(a, b) => write!(f, "product_genus({a}, {b})"),
            Query::ParityBound(m) => write!(f, "parity_bound({m})"),
            Query::BpfDrop(a, b) => write!(f, "bpf_drop({a}, {b})"),
            Query::SeparationDrop(a, b) => write!(f, "separation_drop({a}, {b})"),
            Query::Nef(d, dec) => write!(f, "nef({d}; {dec})"),
            Query::Big(d, dec) => write!(f, "big({d}; {dec})"),
            Query::NegDef(n) => write!(f, "negdef({})", n.join(", ")),
            Query::Z0Self(n) => write!(f, "z0_self({})", n.join(", ")),
            Query::Z0Pa(n) => write!(f, "z0_pa({})", n.join(", ")),
            Query::SingMult(n) => write!(f, "sing_mult({})", n.join(", ")),
            Query::IsRdp(n) => write!(f, "is_rdp({})", n.join(", ")),
            Query::NonRationalPa(n) => write!(f, "nonrational_pa({})", n.join(", ")),
            Query::Classify(n) => write!(f, "classify({})", n.join(", ")),
            Query::GenusBudget(q, g) => {
                if g.is_empty() {
                    write!(f, "genus_budget({q})")
                } else {
                    write!(f, "genus_budget({q}, {})", ints(g))
                }
            }
            Query::Reider(c, b, t) => match t {
                Some(t) => write!(f, "reider({c}, {b}, {t})"),
                None => write!(f, "reider({c}, {b})"),
            },
            Query::Model => write!(f, "model()"),
        }
    }
}

impl fmt::Display for LedgerStmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LedgerStmt::Fact { class, specs, why } => {
                write!(f, "fact {class} :")?;
                for (i, (h, op, v)) in specs.iter().enumerate() {
                    let op = match op {
                        CmpOp::Eq => "=",
                        CmpOp::Ge => ">=",
                        CmpOp::Le => "<=",
                    };
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, " h{h} {op} {v}")?;
                }
                if let Some(w) = why {
                    write!(f, " because \"{w}\"")?;
                }
                Ok(())
            }
            LedgerStmt::Ses { a, by, with, why } => {
                write!(f, "ses {a} by {by}")?;
                if let Some((h0, h1)) = with {
                    write!(f, " with h0 = {h0}, h1 = {h1}")?;
                }
                if let Some(w) = why {
                    write!(f, " because \"{w}\"")?;
                }
                Ok(())
            }
            LedgerStmt::Serre(d) => write!(f, "serre {d}"),
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::SurfacePlane => write!(f, "surface plane"),
            Stmt::SurfaceRuled {
                q,
                e,
                fibers,
                decomposable,
            } => {
                write!(f, "surface ruled q = {q} e = {e}")?;
                if !fibers.is_empty() {
                    write!(f, " fibers {}", fibers.join(" "))?;
                }
                if !decomposable {
                    write!(f, " nondecomposable")?;
                }
                Ok(())
            }
            Stmt::Torsion {
                expr,
                order,
                nonzero,
            } => {
                write!(f, "torsion {expr} order {order}")?;
                if *nonzero {
                    write!(f, " nonzero")?;
                }
                Ok(())
            }
            Stmt::Bundle { name, expr } => write!(f, "bundle {name} = {expr}"),
            Stmt::Curve {
                name,
                class,
                pa,
                smooth,
                irreducible,
                rational,
                covers,
            } => {
                write!(f, "curve {name} = {class}")?;
                if let Some(p) = pa {
                    write!(f, " pa {p}")?;
                }
                if *smooth {
                    write!(f, " smooth")?;
                }
                if *irreducible {
                    write!(f, " irreducible")?;
                }
                if *rational {
                    write!(f, " rational")?;
                }
                for (d, g) in covers {
                    write!(f, " covers ({d}, {g})")?;
                }
                Ok(())
            }
            Stmt::Let { name, expr } => write!(f, "let {name} = {expr}"),
            Stmt::BlowUp {
                point,
                hosts,
                parent,
            } => {
                write!(f, "blowup {point} on ")?;
                for (i, (h, m)) in hosts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    if *m == 1 {
                        write!(f, "{h}")?;
                    } else {
                        write!(f, "{h}:{m}")?;
                    }
                }
                if let Some(p) = parent {
                    write!(f, " over {p}")?;
                }
                Ok(())
            }
            Stmt::SetCanonical(d) => write!(f, "set_canonical {d}"),
            Stmt::Hypothesis(h) => write!(f, "hypothesis {h}"),
            Stmt::Assert { query, expected } => write!(f, "assert {query} == {expected}"),
            Stmt::ExpectPaper { query, expected } => {
                write!(f, "expect_paper {query} == {expected}")
            }
            Stmt::Query(q) => write!(f, "query {q}"),
            Stmt::Note(s) => write!(f, "note \"{s}\""),
            Stmt::Ledger(items) => {
                writeln!(f, "ledger {{")?;
                for s in items {
                    writeln!(f, "  {s}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{}", s.node)?;
        }
        Ok(())
    }
}
