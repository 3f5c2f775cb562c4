//! The cohomology ledger: interval-valued (h⁰, h¹, h²) entries per divisor
//! class, tightened by Riemann-Roch closure, Serre duality links, built-in
//! effectivity rules and short-exact-sequence steps
//! 0 → O(A-B) → O(A) → O_B(A) → 0.
//!
//! Every update is an interval meet, so propagation never widens; an empty
//! meet aborts with the derivation trace. Exact entries always satisfy
//! h⁰ - h¹ + h² = χ(D).

use std::collections::BTreeMap;
use std::fmt;

use crate::base::H0Result;
use crate::picard::{
    DivisorClass, GenRole, PicardError, SurfaceKind, SurfaceModel, GEN_LINE, GEN_SECTION,
};
use crate::ruled;
use crate::scalar::{int, Scalar};

/// Closed integer interval, unbounded sides as `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval<S: Scalar> {
    pub lo: Option<S>,
    pub hi: Option<S>,
}

impl<S: Scalar> Interval<S> {
    pub fn exact(v: S) -> Self {
        Self {
            lo: Some(v.clone()),
            hi: Some(v),
        }
    }

    pub fn nonneg() -> Self {
        Self {
            lo: Some(S::zero()),
            hi: None,
        }
    }

    pub fn at_least(v: S) -> Self {
        Self {
            lo: Some(v),
            hi: None,
        }
    }

    pub fn at_most(v: S) -> Self {
        Self {
            lo: None,
            hi: Some(v),
        }
    }

    pub fn bounded(lo: S, hi: S) -> Self {
        Self {
            lo: Some(lo),
            hi: Some(hi),
        }
    }

    pub fn value(&self) -> Option<&S> {
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a.clone() + b.clone()),
            _ => None,
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.clone() + b.clone()),
            _ => None,
        };
        Self { lo, hi }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: self.hi.clone().map(|v| S::zero() - v),
            hi: self.lo.clone().map(|v| S::zero() - v),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn shift(&self, c: &S) -> Self {
        Self {
            lo: self.lo.clone().map(|v| v + c.clone()),
            hi: self.hi.clone().map(|v| v + c.clone()),
        }
    }

    /// Intersection; `None` when empty.
    pub fn meet(&self, other: &Self) -> Option<Self> {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(if a >= b { a.clone() } else { b.clone() }),
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(if a <= b { a.clone() } else { b.clone() }),
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        };
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a > b {
                return None;
            }
        }
        Some(Self { lo, hi })
    }
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.value() {
            return write!(f, "{v}");
        }
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => write!(f, "[{a},{b}]"),
            (Some(a), None) => write!(f, ">={a}"),
            (None, Some(b)) => write!(f, "<={b}"),
            (None, None) => write!(f, "?"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CohEntry<S: Scalar> {
    pub class: DivisorClass<S>,
    pub h: [Interval<S>; 3],
    pub chi: S,
    pub provenance: Vec<String>,
}

impl<S: Scalar> CohEntry<S> {
    pub fn render(&self) -> String {
        format!(
            "h0={} h1={} h2={} chi={}",
            self.h[0], self.h[1], self.h[2], self.chi
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("contradiction while tightening {what} of `{class}`: {detail}")]
    Contradiction {
        what: &'static str,
        class: String,
        detail: String,
    },
    #[error(
        "ledger value {what} of `{class}` is not pinned to a single integer (currently {held})"
    )]
    NotExact {
        what: &'static str,
        class: String,
        held: String,
    },
    #[error("restriction cohomology for `{0}` needs a declaration: {1}")]
    RestrictionUndecided(String, String),
    #[error("declared restriction on `{curve}` violates Riemann-Roch: {detail}")]
    RestrictionRr { curve: String, detail: String },
    #[error(transparent)]
    Picard(#[from] PicardError),
}

type Result<T> = std::result::Result<T, LedgerError>;

/// Restriction cohomology of O_B(A) on a curve record B.
pub enum RestrictCoh<S: Scalar> {
    Pair(S, S),
    NeedsDeclaration(String),
}

/// (h⁰, h¹) of O_B(A): on a rational B it is O_{P1}(d); on an irreducible B
/// of genus g with d > 2g-2 it is nonspecial. Anything else is undecided.
pub fn restrict_coh<S: Scalar>(
    model: &SurfaceModel<S>,
    b: &crate::picard::CurveRecord<S>,
    a: &DivisorClass<S>,
) -> std::result::Result<RestrictCoh<S>, PicardError> {
    let d = model.intersect(a, &b.class)?;
    let g = model.adjunction_pa(&b.class)?;
    if !b.irreducible {
        return Ok(RestrictCoh::NeedsDeclaration(format!(
            "curve `{}` is not declared irreducible",
            b.name
        )));
    }
    if g.is_zero() {
        let zero = S::zero();
        let h0 = if d >= zero {
            d.clone() + S::one()
        } else {
            S::zero()
        };
        let h1 = if d <= int(-2) {
            S::zero() - d - S::one()
        } else {
            S::zero()
        };
        return Ok(RestrictCoh::Pair(h0, h1));
    }
    let two_g_minus_2 = g.clone() * int(2) - int::<S>(2);
    if d > two_g_minus_2 {
        return Ok(RestrictCoh::Pair(d + S::one() - g, S::zero()));
    }
    Ok(RestrictCoh::NeedsDeclaration(format!(
        "O_B(A) on `{}` has genus {g} and degree {d} <= 2g-2",
        b.name
    )))
}

#[derive(Debug, Clone, Default)]
pub struct LedgerState<S: Scalar> {
    pub entries: BTreeMap<String, CohEntry<S>>,
    pub trace: Vec<String>,
    pub trace_enabled: bool,
}

const H_NAMES: [&str; 3] = ["h0", "h1", "h2"];

impl<S: Scalar> LedgerState<S> {
    pub fn new(trace_enabled: bool) -> Self {
        Self {
            entries: BTreeMap::new(),
            trace: Vec::new(),
            trace_enabled,
        }
    }

    /// Always-recorded trace line (step headers).
    fn log(&mut self, line: String) {
        self.trace.push(line);
    }

    /// Verbose trace line, recorded only when tracing is enabled.
    fn note(&mut self, line: String) {
        if self.trace_enabled {
            self.trace.push(line);
        }
    }

    /// Linear-equivalence-invariant key: generator part plus the reduced
    /// fiber expression.
    pub fn key(model: &SurfaceModel<S>, d: &DivisorClass<S>) -> String {
        let mut normal = d.clone();
        normal.fiber = model.base_curve.reduce(&d.fiber);
        normal.to_string()
    }

    /// Built-in exact h⁰ for classes decided by effectivity alone.
    fn builtin_h0(model: &SurfaceModel<S>, d: &DivisorClass<S>) -> Option<S> {
        match model.kind {
            SurfaceKind::ProjectivePlane => {
                let l = d.coeff(GEN_LINE);
                if l.is_negative() {
                    return Some(S::zero());
                }
                if l.is_zero() {
                    return Some(Self::exceptional_only_h0(model, d));
                }
                None
            }
            SurfaceKind::Ruled => {
                let a = d.coeff(GEN_SECTION);
                if a.is_negative() {
                    return Some(S::zero());
                }
                let has_exc = d
                    .base
                    .keys()
                    .any(|k| k != GEN_SECTION && !d.coeff(k).is_zero());
                if !has_exc {
                    if model.decomposable && model.bundle_d.is_some() {
                        if let Ok(H0Result::Known(v)) = ruled::h0_ruled(model, &a, &d.fiber) {
                            return Some(v);
                        }
                    }
                    if d.is_zero() {
                        return Some(S::one());
                    }
                } else if a.is_zero() && d.fiber.is_zero() {
                    return Some(Self::exceptional_only_h0(model, d));
                }
                None
            }
        }
    }

    /// h⁰ of a purely exceptional class: 1 iff it is a nonnegative
    /// combination of strict transforms of exceptional curves (the only
    /// irreducible classes contracted by the blow-down), else 0.
    fn exceptional_only_h0(model: &SurfaceModel<S>, d: &DivisorClass<S>) -> S {
        // s(p) = c(p) + s(parent(p)), parents precede children in the list
        let mut strict: BTreeMap<String, S> = BTreeMap::new();
        for g in &model.generators {
            if let GenRole::Exceptional { parent, .. } = &g.role {
                let here = d.coeff(&g.name);
                let from_parent = parent
                    .as_ref()
                    .and_then(|p| strict.get(&SurfaceModel::<S>::exceptional_name(p)))
                    .cloned()
                    .unwrap_or_else(S::zero);
                strict.insert(g.name.clone(), here + from_parent);
            }
        }
        if strict.values().all(|s| !s.is_negative()) {
            S::one()
        } else {
            S::zero()
        }
    }

    /// Ensures an entry exists with its seeds and returns the key.
    pub fn touch(&mut self, model: &SurfaceModel<S>, d: &DivisorClass<S>) -> Result<String> {
        let key = Self::key(model, d);
        if self.entries.contains_key(&key) {
            return Ok(key);
        }
        let chi = model.chi_rr(d)?;
        let mut entry = CohEntry {
            class: d.clone(),
            h: [Interval::nonneg(), Interval::nonneg(), Interval::nonneg()],
            chi,
            provenance: Vec::new(),
        };
        if d.is_zero() {
            let q = int(model.genus() as i64);
            entry.h = [
                Interval::exact(S::one()),
                Interval::exact(q),
                Interval::exact(S::zero()),
            ];
            entry.provenance.push("structure sheaf: (1, q, 0)".into());
        } else {
            if let Some(v) = Self::builtin_h0(model, d) {
                entry.h[0] = Interval::exact(v);
                entry.provenance.push("built-in effectivity rule".into());
            }
            let kd = model.canonical().sub(d);
            if let Some(v) = Self::builtin_h0(model, &kd) {
                entry.h[2] = Interval::exact(v);
                entry
                    .provenance
                    .push("Serre duality h2 = h0(K-D) by effectivity rule".into());
            }
        }
        self.entries.insert(key.clone(), entry);
        self.euler_close(&key)?;
        let rendered = self.entries[&key].render();
        self.note(format!("touch {key}: {rendered}"));
        Ok(key)
    }

    fn tighten(&mut self, key: &str, which: usize, with: &Interval<S>, why: &str) -> Result<bool> {
        let entry = self.entries.get_mut(key).expect("touched");
        let held = entry.h[which].clone();
        let met = held.meet(with).ok_or_else(|| LedgerError::Contradiction {
            what: H_NAMES[which],
            class: key.into(),
            detail: format!("{held} vs {with}\n{}", self.trace.join("\n")),
        })?;
        if met != held {
            entry.h[which] = met.clone();
            entry.provenance.push(format!("{}: {} -> {met}", why, held));
            self.note(format!("{key}.{} := {met} via {why}", H_NAMES[which]));
            return Ok(true);
        }
        Ok(false)
    }

    /// h⁰ - h¹ + h² = χ: tighten each from the other two.
    fn euler_close(&mut self, key: &str) -> Result<bool> {
        let mut changed = false;
        loop {
            let (h, chi) = {
                let e = &self.entries[key];
                (e.h.clone(), e.chi.clone())
            };
            let chi_iv = Interval::exact(chi);
            let c0 = chi_iv.add(&h[1]).sub(&h[2]);
            let c1 = h[0].clone().add(&h[2]).sub(&chi_iv);
            let c2 = chi_iv.add(&h[1]).sub(&h[0]);
            let mut step = false;
            step |= self.tighten(key, 0, &c0, "Riemann-Roch closure")?;
            step |= self.tighten(key, 1, &c1, "Riemann-Roch closure")?;
            step |= self.tighten(key, 2, &c2, "Riemann-Roch closure")?;
            if !step {
                break;
            }
            changed = true;
        }
        Ok(changed)
    }

    /// Declares bounds on one cohomology slot of a class.
    pub fn declare(
        &mut self,
        model: &SurfaceModel<S>,
        d: &DivisorClass<S>,
        which: usize,
        iv: Interval<S>,
        why: &str,
    ) -> Result<()> {
        let key = self.touch(model, d)?;
        self.log(format!("declare [{why}] {}({key}) in {iv}", H_NAMES[which]));
        self.tighten(&key, which, &iv, why)?;
        self.euler_close(&key)?;
        Ok(())
    }

    /// Links D and K-D by Serre duality: hⁱ(D) = h²⁻ⁱ(K-D).
    pub fn serre_link(&mut self, model: &SurfaceModel<S>, d: &DivisorClass<S>) -> Result<()> {
        let kd = model.canonical().sub(d);
        let key_d = self.touch(model, d)?;
        let key_kd = self.touch(model, &kd)?;
        self.log(format!("serre duality link {key_d} <-> {key_kd}"));
        for _ in 0..8 {
            let mut changed = false;
            for (i, j) in [(0usize, 2usize), (1, 1), (2, 0)] {
                let from = self.entries[&key_kd].h[j].clone();
                changed |= self.tighten(&key_d, i, &from, "Serre duality")?;
                let back = self.entries[&key_d].h[i].clone();
                changed |= self.tighten(&key_kd, j, &back, "Serre duality")?;
            }
            changed |= self.euler_close(&key_d)?;
            changed |= self.euler_close(&key_kd)?;
            if !changed {
                break;
            }
        }
        Ok(())
    }

    /// Exact-sequence step 0 → O(A-B) → O(A) → O_B(A) → 0 with known
    /// restriction cohomology (b0, b1). The long exact sequence is encoded
    /// through the two connecting ranks r0 = rk(H⁰(A) → H⁰(O_B)) and
    /// r1 = rk(H¹(A) → H¹(O_B)):
    ///   h⁰(A) = h⁰(A-B) + r0
    ///   h¹(A) = h¹(A-B) - (b0 - r0) + r1,  with  b0 - r0 <= h¹(A-B)
    ///   h²(A) = h²(A-B) - (b1 - r1),       with  b1 - r1 <= h²(A-B)
    pub fn ses_step(
        &mut self,
        model: &SurfaceModel<S>,
        a: &DivisorClass<S>,
        b_name: &str,
        b0: S,
        b1: S,
        rule: &str,
    ) -> Result<()> {
        let b_class = model.curve(b_name)?.class.clone();
        let a_minus_b = a.sub(&b_class);
        let key_x = self.touch(model, &a_minus_b)?;
        let key_y = self.touch(model, a)?;
        self.log(format!(
            "ses [{rule}] 0 -> O({key_x}) -> O({}) -> O_{b_name} (h0={b0}, h1={b1}) -> 0",
            Self::key(model, a)
        ));
        let mut r0 = Interval::bounded(S::zero(), b0.clone());
        let mut r1 = Interval::bounded(S::zero(), b1.clone());
        let why = format!("exact sequence restricting to {b_name} [{rule}]");
        let tighten_rank =
            |r: &mut Interval<S>, with: &Interval<S>, trace: &Vec<String>| -> Result<bool> {
                match r.meet(with) {
                    Some(m) if m != *r => {
                        *r = m;
                        Ok(true)
                    }
                    Some(_) => Ok(false),
                    None => Err(LedgerError::Contradiction {
                        what: "connecting rank",
                        class: key_y.clone(),
                        detail: format!("{r} vs {with}\n{}", trace.join("\n")),
                    }),
                }
            };
        for _ in 0..64 {
            let mut changed = false;
            let x = self.entries[&key_x].h.clone();
            let y = self.entries[&key_y].h.clone();
            // y0 = x0 + r0
            changed |= self.tighten(&key_y, 0, &x[0].add(&r0), &why)?;
            changed |= self.tighten(&key_x, 0, &y[0].sub(&r0), &why)?;
            changed |= tighten_rank(&mut r0, &y[0].sub(&x[0]), &self.trace)?;
            // y1 = x1 + r0 + r1 - b0
            let neg_b0 = S::zero() - b0.clone();
            changed |= self.tighten(&key_y, 1, &x[1].add(&r0).add(&r1).shift(&neg_b0), &why)?;
            changed |= self.tighten(&key_x, 1, &y[1].shift(&b0).sub(&r0).sub(&r1), &why)?;
            changed |= tighten_rank(&mut r0, &y[1].shift(&b0).sub(&x[1]).sub(&r1), &self.trace)?;
            changed |= tighten_rank(&mut r1, &y[1].shift(&b0).sub(&x[1]).sub(&r0), &self.trace)?;
            // y2 = x2 + r1 - b1
            let neg_b1 = S::zero() - b1.clone();
            changed |= self.tighten(&key_y, 2, &x[2].add(&r1).shift(&neg_b1), &why)?;
            changed |= self.tighten(&key_x, 2, &y[2].shift(&b1).sub(&r1), &why)?;
            changed |= tighten_rank(&mut r1, &y[2].shift(&b1).sub(&x[2]), &self.trace)?;
            // the connecting image lands in the next term:
            // r0 >= b0 - h1(A-B), r1 >= b1 - h2(A-B)
            if let Some(x1hi) = x[1].hi.clone() {
                changed |=
                    tighten_rank(&mut r0, &Interval::at_least(b0.clone() - x1hi), &self.trace)?;
            }
            if let Some(x2hi) = x[2].hi.clone() {
                changed |=
                    tighten_rank(&mut r1, &Interval::at_least(b1.clone() - x2hi), &self.trace)?;
            }
            // backward: h1(A-B) >= b0 - r0, h2(A-B) >= b1 - r1
            if let Some(r0hi) = r0.hi.clone() {
                changed |= self.tighten(&key_x, 1, &Interval::at_least(b0.clone() - r0hi), &why)?;
            }
            if let Some(r1hi) = r1.hi.clone() {
                changed |= self.tighten(&key_x, 2, &Interval::at_least(b1.clone() - r1hi), &why)?;
            }
            changed |= self.euler_close(&key_x)?;
            changed |= self.euler_close(&key_y)?;
            if !changed {
                break;
            }
        }
        Ok(())
    }

    pub fn entry(&self, model: &SurfaceModel<S>, d: &DivisorClass<S>) -> Option<&CohEntry<S>> {
        self.entries.get(&Self::key(model, d))
    }

    pub fn exact_h(
        &mut self,
        model: &SurfaceModel<S>,
        d: &DivisorClass<S>,
        which: usize,
    ) -> Result<S> {
        let key = self.touch(model, d)?;
        let entry = &self.entries[&key];
        entry.h[which]
            .value()
            .cloned()
            .ok_or_else(|| LedgerError::NotExact {
                what: H_NAMES[which],
                class: key.clone(),
                held: entry.h[which].to_string(),
            })
    }

    /// Checks h⁰ - h¹ + h² = χ on every fully pinned entry.
    pub fn rr_consistent(&self) -> bool {
        self.entries
            .values()
            .all(|e| match (e.h[0].value(), e.h[1].value(), e.h[2].value()) {
                (Some(a), Some(b), Some(c)) => a.clone() - b.clone() + c.clone() == e.chi,
                _ => true,
            })
    }
}
