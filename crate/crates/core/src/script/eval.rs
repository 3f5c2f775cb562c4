//! Script evaluator: executes statements in order over an immutable model
//! chain. Assert failures are recorded and do not halt execution; every
//! result lands in the report.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::ast::*;
use super::parse::{parse_script, ParseError};
use super::report::{Report, StmtResult, Summary};
use crate::base::{BaseCurveError, DegreePositivity, H0Result, TorsionRelation, TorsionShape};
use crate::ledger::{restrict_coh, LedgerError, RestrictCoh};
use crate::linsys::{self, LinsysError, ReiderOutcome};
use crate::picard::PicardError;
use crate::ruled::{self, RuledError};
use crate::scalar::to_i64;
use crate::sing::{Classification, SingError};
use crate::{
    CurveClassExpr, CurveRecord, DivisorClass, ExceptionalConfig, Int, Interval, LedgerState,
    SurfaceModel,
};
use num_traits::Zero;

type BlowUpSpec = crate::picard::BlowUpSpec<Int>;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("no surface has been declared yet")]
    NoSurface,
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("name `{0}` is already bound")]
    NameBound(String),
    #[error("{0}")]
    Msg(String),
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error(transparent)]
    Base(#[from] BaseCurveError),
    #[error(transparent)]
    Ruled(#[from] RuledError),
    #[error(transparent)]
    Sing(#[from] SingError),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

type Result<T> = std::result::Result<T, EvalError>;

/// Evaluation environment; a `surface` statement resets it.
pub struct EvalState {
    pub model: Option<SurfaceModel>,
    pub lets: BTreeMap<String, DivisorClass>,
    pub ledger: LedgerState,
    pub bundle_name: Option<String>,
    pub trace_enabled: bool,
    pub peel_bound: u64,
}

impl EvalState {
    pub fn new(trace_enabled: bool) -> Self {
        Self {
            model: None,
            lets: BTreeMap::new(),
            ledger: LedgerState::new(trace_enabled),
            bundle_name: None,
            trace_enabled,
            peel_bound: 1000,
        }
    }

    pub fn model(&self) -> Result<&SurfaceModel> {
        self.model.as_ref().ok_or(EvalError::NoSurface)
    }

    fn model_mut(&mut self) -> Result<&mut SurfaceModel> {
        self.model.as_mut().ok_or(EvalError::NoSurface)
    }
}

fn big(v: i64) -> Int {
    Int::from(v)
}

fn int_json(v: &Int) -> Value {
    match to_i64(v) {
        Some(n) => json!(n),
        None => json!(v.to_string()),
    }
}

struct QVal {
    int: Option<Int>,
    json: Value,
}

impl QVal {
    fn int(v: Int) -> Self {
        let j = int_json(&v);
        Self {
            int: Some(v),
            json: j,
        }
    }

    fn boolean(b: bool) -> Self {
        Self::int(big(if b { 1 } else { 0 }))
    }

    fn with_extra(mut self, key: &str, extra: Value) -> Self {
        let base = self.json.clone();
        self.json = json!({ "value": base, key: extra });
        self
    }
}

pub struct Evaluator {
    pub state: EvalState,
}

impl Evaluator {
    pub fn new(trace_enabled: bool) -> Self {
        Self {
            state: EvalState::new(trace_enabled),
        }
    }

    fn reset(&mut self) {
        let trace = self.state.trace_enabled;
        let bound = self.state.peel_bound;
        self.state = EvalState::new(trace);
        self.state.peel_bound = bound;
    }

    fn eval_base_expr(&self, e: &BaseExpr) -> Result<CurveClassExpr> {
        let model = self.state.model()?;
        let mut out = CurveClassExpr::zero();
        for (c, atom) in &e.terms {
            let unit = match atom {
                BaseAtom::K => CurveClassExpr::canonical(),
                BaseAtom::Name(n) => {
                    if self.state.bundle_name.as_deref() == Some(n.as_str()) {
                        model
                            .bundle_d
                            .clone()
                            .ok_or_else(|| EvalError::UnknownName(n.clone()))?
                    } else if model.base_curve.has_point(n) {
                        CurveClassExpr::point(n)
                    } else if model.base_curve.torsion_symbol(n) {
                        CurveClassExpr::torsion_symbol(n)
                    } else {
                        return Err(EvalError::UnknownName(n.clone()));
                    }
                }
            };
            out = out.add(&unit.scale(&big(*c)));
        }
        Ok(out)
    }

    fn eval_div_expr(&self, e: &DivExpr) -> Result<DivisorClass> {
        let mut out = DivisorClass::zero();
        for (c, atom) in &e.terms {
            let unit = self.eval_div_atom(atom)?;
            out = out.add(&unit.scale(&big(*c)));
        }
        Ok(out)
    }

    fn eval_div_atom(&self, atom: &DivAtom) -> Result<DivisorClass> {
        let model = self.state.model()?;
        match atom {
            DivAtom::Name(n) if n == "K" => Ok(model.canonical().clone()),
            DivAtom::Name(n) => {
                if let Some(d) = self.state.lets.get(n) {
                    return Ok(d.clone());
                }
                if let Ok(rec) = model.curve(n) {
                    return Ok(rec.class.clone());
                }
                if model.generator(n).is_some() {
                    return Ok(model.unit_class(n)?);
                }
                Err(EvalError::UnknownName(n.clone()))
            }
            DivAtom::Fiber(None) => Ok(model.unit_class("f")?),
            DivAtom::Fiber(Some(p)) => Ok(model.unit_class(&format!("f[{p}]"))?),
            DivAtom::Exceptional(p) => Ok(model.curve(&format!("E[{p}]"))?.class.clone()),
            DivAtom::Mobile { class, candidates } => {
                let m = self.eval_div_expr(class)?;
                let out = linsys::fixed_part_peel(model, &m, candidates, self.state.peel_bound)?;
                Ok(out.mobile)
            }
            DivAtom::Fixed { class, candidates } => {
                let m = self.eval_div_expr(class)?;
                let out = linsys::fixed_part_peel(model, &m, candidates, self.state.peel_bound)?;
                Ok(out.fixed)
            }
        }
    }

    fn torsion_shape(&self, e: &BaseExpr) -> Result<TorsionShape> {
        let model = self.state.model()?;
        match e.terms.as_slice() {
            [(1, BaseAtom::Name(a))] => {
                if model.base_curve.has_point(a) {
                    Err(EvalError::Msg(format!(
                        "`{a}` is a point; a single point is not a degree-0 torsion class"
                    )))
                } else {
                    Ok(TorsionShape::Symbol(a.clone()))
                }
            }
            [(1, BaseAtom::Name(a)), (-1, BaseAtom::Name(b))] => {
                Ok(TorsionShape::PointDiff(a.clone(), b.clone()))
            }
            _ => Err(EvalError::Msg(
                "torsion declarations are `alpha` (abstract symbol) or `a - b` (point difference)"
                    .into(),
            )),
        }
    }

    /// Decomposition expression: every atom must be a declared curve record.
    fn decomposition(&self, e: &DivExpr) -> Result<Vec<(String, Int)>> {
        let model = self.state.model()?;
        let mut out = Vec::new();
        for (c, atom) in &e.terms {
            let name = match atom {
                DivAtom::Name(n) if model.curve(n).is_ok() => n.clone(),
                DivAtom::Exceptional(p) => {
                    let n = format!("E[{p}]");
                    model.curve(&n)?;
                    n
                }
                other => {
                    return Err(EvalError::Msg(format!(
                        "decomposition component `{other}` is not a declared curve"
                    )))
                }
            };
            if *c <= 0 {
                return Err(EvalError::Msg(format!(
                    "decomposition multiplicity for `{name}` must be positive"
                )));
            }
            out.push((name, big(*c)));
        }
        Ok(out)
    }

    fn config(&self, names: &[String]) -> Result<ExceptionalConfig> {
        Ok(ExceptionalConfig::from_curves(self.state.model()?, names)?)
    }

    fn h0_result(&self, r: H0Result<Int>, what: &str) -> Result<Int> {
        match r {
            H0Result::Known(v) => Ok(v),
            H0Result::NeedsDeclaration(msg) => {
                Err(EvalError::Msg(format!("{what} needs a declaration: {msg}")))
            }
        }
    }

    fn eval_query(&mut self, q: &Query) -> Result<QVal> {
        match q {
            Query::Intersect(a, b) => {
                let (a, b) = (self.eval_div_expr(a)?, self.eval_div_expr(b)?);
                Ok(QVal::int(self.state.model()?.intersect(&a, &b)?))
            }
            Query::SelfInt(a) => {
                let a = self.eval_div_expr(a)?;
                Ok(QVal::int(self.state.model()?.self_intersection(&a)?))
            }
            Query::Pa(a) => {
                let a = self.eval_div_expr(a)?;
                Ok(QVal::int(self.state.model()?.adjunction_pa(&a)?))
            }
            Query::Chi(a) => {
                let a = self.eval_div_expr(a)?;
                Ok(QVal::int(self.state.model()?.chi_rr(&a)?))
            }
            Query::LinEq(a, b) => {
                let (a, b) = (self.eval_div_expr(a)?, self.eval_div_expr(b)?);
                Ok(QVal::boolean(self.state.model()?.lin_eq(&a, &b)?))
            }
            Query::NumEq(a, b) => {
                let (a, b) = (self.eval_div_expr(a)?, self.eval_div_expr(b)?);
                Ok(QVal::boolean(self.state.model()?.num_eq(&a, &b)?))
            }
            Query::Degree(e) => {
                let e = self.eval_base_expr(e)?;
                Ok(QVal::int(self.state.model()?.base_curve.degree(&e)))
            }
            Query::H0Curve(e) => {
                let e = self.eval_base_expr(e)?;
                let r = self.state.model()?.base_curve.h0(&e);
                Ok(QVal::int(self.h0_result(r, "h0_curve")?))
            }
            Query::H1Curve(e) => {
                let e = self.eval_base_expr(e)?;
                let r = self.state.model()?.base_curve.h1(&e);
                Ok(QVal::int(self.h0_result(r, "h1_curve")?))
            }
            Query::RrCurve(e) => {
                let e = self.eval_base_expr(e)?;
                Ok(QVal::int(self.state.model()?.base_curve.rr(&e)?))
            }
            Query::Positivity(e) => {
                let e = self.eval_base_expr(e)?;
                let v = match self.state.model()?.base_curve.degree_positivity(&e) {
                    DegreePositivity::VeryAmple => 2,
                    DegreePositivity::BasePointFree => 1,
                    DegreePositivity::Unknown => 0,
                };
                Ok(QVal::int(big(v)))
            }
            Query::H0Ruled(a, e) => {
                let e = self.eval_base_expr(e)?;
                let r = ruled::h0_ruled(self.state.model()?, &big(*a), &e)?;
                Ok(QVal::int(self.h0_result(r, "h0_ruled")?))
            }
            Query::H0AntiK => {
                let r = ruled::anticanonical_h0(self.state.model()?)?;
                Ok(QVal::int(self.h0_result(r, "h0(-K)")?))
            }
            Query::H0Anti2K => {
                let r = ruled::antibicanonical_h0(self.state.model()?)?;
                Ok(QVal::int(self.h0_result(r, "h0(-2K)")?))
            }
            Query::H(i, a) => {
                let a = self.eval_div_expr(a)?;
                let model = self.state.model.as_ref().ok_or(EvalError::NoSurface)?;
                Ok(QVal::int(self.state.ledger.exact_h(model, &a, *i)?))
            }
            Query::ExpectedDimPlane(d, m) => {
                let mults: Vec<Int> = m.iter().map(|v| big(*v)).collect();
                Ok(QVal::int(linsys::expected_dim_plane(&big(*d), &mults)?))
            }
            Query::PlaneCount(d, m) => {
                let mults: Vec<Int> = m.iter().map(|v| big(*v)).collect();
                Ok(QVal::int(linsys::plane_conditions_count(&big(*d), &mults)))
            }
            Query::Plucker(d, m) => {
                let mults: Vec<Int> = m.iter().map(|v| big(*v)).collect();
                Ok(QVal::int(linsys::plucker_genus(&big(*d), &mults)?))
            }
            Query::CsBound(d1, g1, d2, g2) => Ok(QVal::int(linsys::castelnuovo_severi_bound(
                &big(*d1),
                &big(*g1),
                &big(*d2),
                &big(*g2),
            ))),
            Query::ProductGenus(a, b) => {
                Ok(QVal::int(linsys::product_curve_genus(&big(*a), &big(*b))?))
            }
            Query::ParityBound(m) => Ok(QVal::int(linsys::plurigenus_parity_bound(&big(*m))?)),
            Query::BpfDrop(a, b) => {
                let (da, db) = (self.ledger_dim(a)?, self.ledger_dim(b)?);
                Ok(QVal::boolean(linsys::bpf_drop_test(&da, &db)))
            }
            Query::SeparationDrop(a, b) => {
                let (da, db) = (self.ledger_dim(a)?, self.ledger_dim(b)?);
                Ok(QVal::boolean(linsys::separation_drop_test(&da, &db)))
            }
            Query::Nef(d, dec) => {
                let class = self.eval_div_expr(d)?;
                let decomposition = self.decomposition(dec)?;
                let cert = linsys::nef_on_effective(self.state.model()?, &class, &decomposition)?;
                let ok = cert.conclusion;
                Ok(QVal::boolean(ok)
                    .with_extra("certificate", serde_json::to_value(&cert).unwrap()))
            }
            Query::Big(d, dec) => {
                let class = self.eval_div_expr(d)?;
                let decomposition = self.decomposition(dec)?;
                let model = self.state.model()?;
                let nef = linsys::nef_on_effective(model, &class, &decomposition)?;
                if !nef.conclusion {
                    return Ok(QVal::boolean(false)
                        .with_extra("certificate", serde_json::to_value(&nef).unwrap()));
                }
                let cert = linsys::big_check(model, &class, &nef)?;
                let ok = cert.conclusion;
                Ok(QVal::boolean(ok)
                    .with_extra("certificate", serde_json::to_value(&cert).unwrap()))
            }
            Query::NegDef(names) => {
                let cfg = self.config(names)?;
                let out = cfg.is_negative_definite()?;
                let witness: Value = match &out.witness {
                    Some(v) => json!(v.iter().map(int_json).collect::<Vec<_>>()),
                    None => Value::Null,
                };
                Ok(QVal::boolean(out.is_definite).with_extra("witness", witness))
            }
            Query::Z0Self(names) => {
                let cfg = self.config(names)?;
                let (z0, _) = cfg.fundamental_cycle()?;
                Ok(QVal::int(cfg.cycle_self_intersection(&z0)?))
            }
            Query::Z0Pa(names) => {
                let cfg = self.config(names)?;
                let (z0, _) = cfg.fundamental_cycle()?;
                Ok(QVal::int(cfg.pa_cycle(&z0)?))
            }
            Query::SingMult(names) => {
                let cfg = self.config(names)?;
                match cfg.classify()? {
                    Classification::RationalDoublePoint => Ok(QVal::int(big(2))),
                    Classification::Rational { multiplicity } => Ok(QVal::int(multiplicity)),
                    other => Err(EvalError::Msg(format!(
                        "sing_mult: singularity is not rational ({other:?})"
                    ))),
                }
            }
            Query::IsRdp(names) => {
                let cfg = self.config(names)?;
                Ok(QVal::boolean(matches!(
                    cfg.classify()?,
                    Classification::RationalDoublePoint
                )))
            }
            Query::NonRationalPa(names) => {
                let cfg = self.config(names)?;
                match cfg.classify()? {
                    Classification::NonRational { pa_lower } => Ok(QVal::int(pa_lower)),
                    other => Err(EvalError::Msg(format!(
                        "nonrational_pa: singularity is rational ({other:?})"
                    ))),
                }
            }
            Query::Classify(names) => {
                let cfg = self.config(names)?;
                let (z0, _) = cfg.fundamental_cycle()?;
                let z0sq = cfg.cycle_self_intersection(&z0)?;
                let z0pa = cfg.pa_cycle(&z0)?;
                let j = match cfg.classify()? {
                    Classification::RationalDoublePoint => json!({
                        "kind": "rational_double_point",
                        "z0_self": int_json(&z0sq),
                        "z0_pa": int_json(&z0pa),
                    }),
                    Classification::Rational { multiplicity } => json!({
                        "kind": "rational",
                        "multiplicity": int_json(&multiplicity),
                        "z0_self": int_json(&z0sq),
                        "z0_pa": int_json(&z0pa),
                    }),
                    Classification::NonRational { pa_lower } => json!({
                        "kind": "non_rational",
                        "pa_lower_bound": int_json(&pa_lower),
                        "z0_self": int_json(&z0sq),
                    }),
                    Classification::Unknown => json!({ "kind": "unknown" }),
                };
                Ok(QVal { int: None, json: j })
            }
            Query::GenusBudget(q, genera) => {
                let gs: Vec<Int> = genera.iter().map(|v| big(*v)).collect();
                Ok(QVal::boolean(crate::sing::genus_budget_check(
                    &big(*q),
                    &gs,
                )))
            }
            Query::Model => {
                let model = self.state.model()?;
                let (names, gram) = model.gram_matrix();
                let gram: Vec<Vec<Value>> = gram
                    .iter()
                    .map(|row| row.iter().map(int_json).collect())
                    .collect();
                let curves: Vec<Value> = model
                    .curves
                    .values()
                    .map(|c| {
                        json!({
                            "name": c.name,
                            "class": c.class.to_string(),
                            "pa": c.declared_pa.as_ref().map(int_json),
                        })
                    })
                    .collect();
                let j = json!({
                    "kind": match model.kind {
                        crate::picard::SurfaceKind::ProjectivePlane => "plane",
                        crate::picard::SurfaceKind::Ruled => "ruled",
                    },
                    "genus": model.genus(),
                    "e": int_json(&model.e_invariant),
                    "canonical": model.canonical().to_string(),
                    "generators": names,
                    "gram": gram,
                    "curves": curves,
                    "blowups": model.blowup_log.len(),
                });
                Ok(QVal { int: None, json: j })
            }
            Query::Reider(curve, bound, threshold) => {
                let model = self.state.model()?;
                let rec = model.curve(curve)?;
                if *bound < 0 {
                    return Err(EvalError::Msg("reider bound must be nonnegative".into()));
                }
                let thr = big(threshold.unwrap_or(4));
                let (outcome, cert) = linsys::reider_search(
                    model,
                    &rec.class.clone(),
                    rec.irreducible,
                    *bound as u64,
                    &thr,
                )?;
                let found = matches!(outcome, ReiderOutcome::Witness(_));
                Ok(QVal::boolean(found)
                    .with_extra("certificate", serde_json::to_value(&cert).unwrap()))
            }
        }
    }

    /// dim |D| = h0(D) - 1, read exactly from the ledger.
    fn ledger_dim(&mut self, e: &DivExpr) -> Result<Int> {
        let d = self.eval_div_expr(e)?;
        let model = self.state.model.as_ref().ok_or(EvalError::NoSurface)?;
        Ok(self.state.ledger.exact_h(model, &d, 0)? - Int::from(1))
    }

    fn exec_ledger_stmt(&mut self, item: &LedgerStmt) -> Result<()> {
        match item {
            LedgerStmt::Fact { class, specs, why } => {
                let d = self.eval_div_expr(class)?;
                let model = self.state.model.as_ref().ok_or(EvalError::NoSurface)?;
                let why = why.clone().unwrap_or_else(|| "declared fact".into());
                for (slot, op, v) in specs {
                    let iv = match op {
                        CmpOp::Eq => Interval::exact(big(*v)),
                        CmpOp::Ge => Interval::at_least(big(*v)),
                        CmpOp::Le => Interval::at_most(big(*v)),
                    };
                    self.state.ledger.declare(model, &d, *slot, iv, &why)?;
                }
                Ok(())
            }
            LedgerStmt::Ses { a, by, with, why } => {
                let a = self.eval_div_expr(a)?;
                let model = self.state.model.as_ref().ok_or(EvalError::NoSurface)?;
                let rec = model.curve(by)?;
                let (b0, b1, rule) = match with {
                    Some((h0, h1)) => {
                        // declared restriction must satisfy curve Riemann-Roch
                        let d = model.intersect(&a, &rec.class)?;
                        let g = model.adjunction_pa(&rec.class)?;
                        let lhs = big(*h0) - big(*h1);
                        let rhs = d.clone() + Int::from(1) - g.clone();
                        if lhs != rhs {
                            return Err(EvalError::Ledger(LedgerError::RestrictionRr {
                                curve: by.clone(),
                                detail: format!("h0={h0}, h1={h1} but deg={d}, p_a={g}"),
                            }));
                        }
                        (
                            big(*h0),
                            big(*h1),
                            why.clone().unwrap_or_else(|| "declared restriction".into()),
                        )
                    }
                    None => match restrict_coh(model, rec, &a)? {
                        RestrictCoh::Pair(h0, h1) => {
                            let g = model.adjunction_pa(&rec.class)?;
                            let rule = if g.is_zero() {
                                "rational-curve restriction".to_string()
                            } else {
                                "high-degree restriction".to_string()
                            };
                            (h0, h1, rule)
                        }
                        RestrictCoh::NeedsDeclaration(msg) => {
                            return Err(EvalError::Ledger(LedgerError::RestrictionUndecided(
                                by.clone(),
                                msg,
                            )))
                        }
                    },
                };
                self.state.ledger.ses_step(model, &a, by, b0, b1, &rule)?;
                Ok(())
            }
            LedgerStmt::Serre(d) => {
                let d = self.eval_div_expr(d)?;
                let model = self.state.model.as_ref().ok_or(EvalError::NoSurface)?;
                self.state.ledger.serre_link(model, &d)?;
                Ok(())
            }
        }
    }

    fn exec_stmt(&mut self, stmt: &Stmt) -> Result<(Value, Vec<String>)> {
        match stmt {
            Stmt::SurfacePlane => {
                self.reset();
                self.state.model = Some(SurfaceModel::new_plane());
                Ok((json!("plane"), vec![]))
            }
            Stmt::SurfaceRuled {
                q,
                e,
                fibers,
                decomposable,
            } => {
                self.reset();
                self.state.model = Some(SurfaceModel::new_ruled(
                    *q,
                    big(*e),
                    fibers.clone(),
                    *decomposable,
                ));
                Ok((json!(format!("ruled q={q} e={e}")), vec![]))
            }
            Stmt::Torsion {
                expr,
                order,
                nonzero,
            } => {
                let shape = self.torsion_shape(expr)?;
                let rel = TorsionRelation {
                    shape,
                    order: *order,
                    nonzero: *nonzero,
                };
                self.state.model_mut()?.base_curve.declare_torsion(rel)?;
                Ok((Value::Null, vec![]))
            }
            Stmt::Bundle { name, expr } => {
                let d = self.eval_base_expr(expr)?;
                let model = self.state.model_mut()?;
                model.declare_bundle(d)?;
                let c1 = ruled::c1_class(model)?;
                let pa = model.adjunction_pa(&c1)?;
                let rational = pa.is_zero();
                model.declare_curve(CurveRecord {
                    name: "C1".into(),
                    class: c1,
                    declared_pa: Some(pa),
                    irreducible: true,
                    smooth: true,
                    rational,
                    covers: Vec::new(),
                })?;
                self.state.bundle_name = Some(name.clone());
                Ok((Value::Null, vec!["C1 = C0 - D*f declared".into()]))
            }
            Stmt::Curve {
                name,
                class,
                pa,
                smooth,
                irreducible,
                rational,
                covers,
            } => {
                let class = self.eval_div_expr(class)?;
                if self.state.lets.contains_key(name) {
                    return Err(EvalError::NameBound(name.clone()));
                }
                self.state.model_mut()?.declare_curve(CurveRecord {
                    name: name.clone(),
                    class,
                    declared_pa: pa.map(big),
                    irreducible: *irreducible,
                    smooth: *smooth,
                    rational: *rational,
                    covers: covers.iter().map(|(d, g)| (big(*d), big(*g))).collect(),
                })?;
                Ok((Value::Null, vec![]))
            }
            Stmt::Let { name, expr } => {
                let d = self.eval_div_expr(expr)?;
                let model = self.state.model()?;
                if self.state.lets.contains_key(name)
                    || model.curves.contains_key(name)
                    || model.generator(name).is_some()
                    || name == "K"
                {
                    return Err(EvalError::NameBound(name.clone()));
                }
                let rendered = d.to_string();
                self.state.lets.insert(name.clone(), d);
                Ok((json!(rendered), vec![]))
            }
            Stmt::BlowUp {
                point,
                hosts,
                parent,
            } => {
                let spec = BlowUpSpec {
                    point: point.clone(),
                    hosts: hosts.iter().map(|(n, m)| (n.clone(), big(*m))).collect(),
                    parent: parent.clone(),
                };
                let next = self.state.model()?.blow_up(&spec)?;
                self.state.model = Some(next);
                Ok((Value::Null, vec![]))
            }
            Stmt::SetCanonical(d) => {
                let d = self.eval_div_expr(d)?;
                self.state.model_mut()?.set_canonical(d)?;
                Ok((Value::Null, vec![]))
            }
            Stmt::Hypothesis(h) => {
                let base = &mut self.state.model_mut()?.base_curve;
                match h.as_str() {
                    "hyperelliptic" => base.hyperelliptic = Some(true),
                    "nonhyperelliptic" => base.hyperelliptic = Some(false),
                    "g14" => base.has_g14 = Some(true),
                    "no_g14" => base.has_g14 = Some(false),
                    other => {
                        return Err(EvalError::Msg(format!(
                            "unknown hypothesis `{other}`; expected hyperelliptic, nonhyperelliptic, g14 or no_g14"
                        )))
                    }
                }
                Ok((json!(h), vec![]))
            }
            Stmt::Assert { query, .. } | Stmt::ExpectPaper { query, .. } => {
                let v = self.eval_query(query)?;
                Ok((v.json, vec![]))
            }
            Stmt::Query(q) => {
                let v = self.eval_query(q)?;
                Ok((v.json, vec![]))
            }
            Stmt::Note(s) => Ok((json!(s), vec![])),
            Stmt::Ledger(items) => {
                for item in items {
                    self.exec_ledger_stmt(item)?;
                }
                let trace = std::mem::take(&mut self.state.ledger.trace);
                Ok((json!(format!("{} ledger steps", items.len())), trace))
            }
        }
    }

    pub fn run(&mut self, script_name: &str, script: &Script) -> Report {
        let mut results = Vec::new();
        let mut summary = Summary::default();
        for (idx, stmt) in script.statements.iter().enumerate() {
            let kind = stmt_kind(&stmt.node);
            let text = stmt.node.to_string();
            let mut trace = Vec::new();
            let (value, status) = match &stmt.node {
                Stmt::Assert { query, expected } => match self.eval_query(query) {
                    Ok(v) => {
                        let want = big(*expected);
                        match &v.int {
                            Some(got) if *got == want => {
                                summary.pass += 1;
                                (json!({"computed": v.json, "expected": expected}), "ok")
                            }
                            Some(got) => {
                                summary.fail += 1;
                                trace.push(format!(
                                    "assert failed: computed {got}, expected {expected}"
                                ));
                                (json!({"computed": v.json, "expected": expected}), "fail")
                            }
                            None => {
                                summary.errors += 1;
                                (json!({"error": "query has no integer value"}), "error")
                            }
                        }
                    }
                    Err(e) => {
                        summary.errors += 1;
                        (json!({ "error": e.to_string() }), "error")
                    }
                },
                Stmt::ExpectPaper { query, expected } => match self.eval_query(query) {
                    Ok(v) => {
                        let agrees = v.int.as_ref() == Some(&big(*expected));
                        if !agrees {
                            trace.push(format!(
                                "expect_paper records {expected}; engine derives {}",
                                v.int
                                    .as_ref()
                                    .map(|x| x.to_string())
                                    .unwrap_or_else(|| "non-integer".into())
                            ));
                        }
                        (
                            json!({"computed": v.json, "paper": expected, "agrees": agrees}),
                            "ok",
                        )
                    }
                    Err(e) => {
                        summary.errors += 1;
                        (json!({ "error": e.to_string() }), "error")
                    }
                },
                other => match self.exec_stmt(other) {
                    Ok((value, t)) => {
                        trace.extend(t);
                        (value, "ok")
                    }
                    Err(e) => {
                        summary.errors += 1;
                        (json!({ "error": e.to_string() }), "error")
                    }
                },
            };
            if self.state.trace_enabled {
                let drained = std::mem::take(&mut self.state.ledger.trace);
                trace.extend(drained);
            }
            results.push(StmtResult {
                stmt: idx,
                line: stmt.line,
                kind: kind.to_string(),
                text,
                value,
                status: status.to_string(),
                trace,
            });
        }
        Report::new(script_name, results, summary)
    }
}

fn stmt_kind(s: &Stmt) -> &'static str {
    match s {
        Stmt::SurfacePlane | Stmt::SurfaceRuled { .. } => "surface",
        Stmt::Torsion { .. } => "torsion",
        Stmt::Bundle { .. } => "bundle",
        Stmt::Curve { .. } => "curve",
        Stmt::Let { .. } => "let",
        Stmt::BlowUp { .. } => "blowup",
        Stmt::SetCanonical(_) => "set_canonical",
        Stmt::Hypothesis(_) => "hypothesis",
        Stmt::Assert { .. } => "assert",
        Stmt::ExpectPaper { .. } => "expect_paper",
        Stmt::Query(_) => "query",
        Stmt::Note(_) => "note",
        Stmt::Ledger(_) => "ledger",
    }
}

/// Parses and evaluates a script; the returned state allows inspection of
/// the final model (used by the acceptance suite).
pub fn evaluate(
    script_name: &str,
    text: &str,
    trace_enabled: bool,
) -> std::result::Result<(Report, EvalState), ParseError> {
    let script = parse_script(text)?;
    let mut ev = Evaluator::new(trace_enabled);
    let report = ev.run(script_name, &script);
    Ok((report, ev.state))
}
