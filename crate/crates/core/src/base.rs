//! Divisor-class calculus on the base curve Γ.
//!
//! Classes are formal integer combinations of K_Γ, named points and declared
//! torsion symbols. The h⁰ rules are deliberately conservative: degree
//! arguments and declared torsion/genericity facts resolve a class, anything
//! else surfaces as [`H0Result::NeedsDeclaration`] instead of a silent guess.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::scalar::{int, mod_pos, Scalar};

/// Reserved symbol for "a general point of Γ"; not expressible in scripts.
pub const GENERIC_POINT: &str = "*";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TorsionShape {
    /// An abstract degree-0 class symbol, e.g. a 2-torsion `alpha`.
    Symbol(String),
    /// A difference of named points `a - b` declared torsion.
    PointDiff(String, String),
}

impl fmt::Display for TorsionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorsionShape::Symbol(s) => write!(f, "{s}"),
            TorsionShape::PointDiff(a, b) => write!(f, "{a} - {b}"),
        }
    }
}

/// A declared relation `order * shape ~ 0`, with `nonzero` meaning the shape
/// has exact order (so `c * shape` is nontrivial for 0 < c < order).
#[derive(Debug, Clone, Serialize)]
pub struct TorsionRelation {
    pub shape: TorsionShape,
    pub order: u32,
    pub nonzero: bool,
}

/// Formal divisor class on Γ: `k·K_Γ + Σ cᵢ·Pᵢ + Σ tⱼ·τⱼ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveClassExpr<S: Scalar> {
    pub k_coeff: S,
    pub point_coeffs: BTreeMap<String, S>,
    pub torsion_coeffs: BTreeMap<String, S>,
}

impl<S: Scalar> Default for CurveClassExpr<S> {
    fn default() -> Self {
        Self {
            k_coeff: S::zero(),
            point_coeffs: BTreeMap::new(),
            torsion_coeffs: BTreeMap::new(),
        }
    }
}

impl<S: Scalar> CurveClassExpr<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn canonical() -> Self {
        Self {
            k_coeff: int(1),
            ..Self::default()
        }
    }

    pub fn point(name: &str) -> Self {
        let mut e = Self::zero();
        e.point_coeffs.insert(name.to_string(), int(1));
        e
    }

    pub fn torsion_symbol(name: &str) -> Self {
        let mut e = Self::zero();
        e.torsion_coeffs.insert(name.to_string(), int(1));
        e
    }

    pub fn generic_multiple(n: S) -> Self {
        let mut e = Self::zero();
        if !n.is_zero() {
            e.point_coeffs.insert(GENERIC_POINT.to_string(), n);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.k_coeff.is_zero()
            && self.point_coeffs.values().all(|c| c.is_zero())
            && self.torsion_coeffs.values().all(|c| c.is_zero())
    }

    pub fn scale(&self, n: &S) -> Self {
        let mut out = Self::zero();
        out.k_coeff = self.k_coeff.clone() * n.clone();
        for (p, c) in &self.point_coeffs {
            out.point_coeffs.insert(p.clone(), c.clone() * n.clone());
        }
        for (t, c) in &self.torsion_coeffs {
            out.torsion_coeffs.insert(t.clone(), c.clone() * n.clone());
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.k_coeff = out.k_coeff + other.k_coeff.clone();
        for (p, c) in &other.point_coeffs {
            let e = out.point_coeffs.entry(p.clone()).or_insert_with(S::zero);
            *e = e.clone() + c.clone();
        }
        for (t, c) in &other.torsion_coeffs {
            let e = out.torsion_coeffs.entry(t.clone()).or_insert_with(S::zero);
            *e = e.clone() + c.clone();
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    fn prune(&mut self) {
        self.point_coeffs.retain(|_, c| !c.is_zero());
        self.torsion_coeffs.retain(|_, c| !c.is_zero());
    }

    /// Degree for a base curve of genus `q`; torsion symbols have degree 0.
    pub fn degree(&self, q: u32) -> S {
        let mut d = self.k_coeff.clone() * int::<S>(2 * q as i64 - 2);
        for c in self.point_coeffs.values() {
            d = d + c.clone();
        }
        d
    }
}

impl<S: Scalar> fmt::Display for CurveClassExpr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        if !self.k_coeff.is_zero() {
            terms.push(format!("{}*K", self.k_coeff));
        }
        for (p, c) in &self.point_coeffs {
            terms.push(format!("{c}*{p}"));
        }
        for (t, c) in &self.torsion_coeffs {
            terms.push(format!("{c}*{t}"));
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Outcome of an h⁰/h¹ rule cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum H0Result<S: Scalar> {
    Known(S),
    /// The rules cannot decide; the string names the missing geometric input.
    NeedsDeclaration(String),
}

impl<S: Scalar> H0Result<S> {
    pub fn known(&self) -> Option<&S> {
        match self {
            H0Result::Known(v) => Some(v),
            H0Result::NeedsDeclaration(_) => None,
        }
    }
}

/// Positivity certified purely by degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DegreePositivity {
    VeryAmple,
    BasePointFree,
    Unknown,
}

#[derive(Debug, thiserror::Error)]
pub enum BaseCurveError {
    #[error("torsion relation must have degree 0, got degree {0}")]
    TorsionDegree(String),
    #[error("declared h0 = {h0} for `{expr}` violates 0 <= h0 <= deg+1 = {bound}")]
    DeclaredFactRange {
        expr: String,
        h0: String,
        bound: String,
    },
    #[error("Riemann-Roch inconsistency for `{expr}`: h0 - h1 = {lhs} but deg+1-q = {rhs}")]
    RiemannRoch {
        expr: String,
        lhs: String,
        rhs: String,
    },
    #[error("unknown point symbol `{0}`")]
    UnknownPoint(String),
}

/// The base curve Γ: genus, named points, torsion relations, declared facts.
#[derive(Debug, Clone)]
pub struct BaseCurve<S: Scalar> {
    pub genus: u32,
    pub points: Vec<String>,
    pub torsion: Vec<TorsionRelation>,
    pub declared_h0: Vec<(CurveClassExpr<S>, S, String)>,
    pub hyperelliptic: Option<bool>,
    pub has_g14: Option<bool>,
}

impl<S: Scalar> BaseCurve<S> {
    pub fn new(genus: u32, points: Vec<String>) -> Self {
        Self {
            genus,
            points,
            torsion: Vec::new(),
            declared_h0: Vec::new(),
            hyperelliptic: None,
            has_g14: None,
        }
    }

    pub fn has_point(&self, name: &str) -> bool {
        self.points.iter().any(|p| p == name)
    }

    pub fn torsion_symbol(&self, name: &str) -> bool {
        self.torsion
            .iter()
            .any(|r| matches!(&r.shape, TorsionShape::Symbol(s) if s == name))
    }

    pub fn declare_torsion(&mut self, rel: TorsionRelation) -> Result<(), BaseCurveError> {
        if let TorsionShape::PointDiff(a, b) = &rel.shape {
            if !self.has_point(a) {
                return Err(BaseCurveError::UnknownPoint(a.clone()));
            }
            if !self.has_point(b) {
                return Err(BaseCurveError::UnknownPoint(b.clone()));
            }
        }
        self.torsion.push(rel);
        Ok(())
    }

    pub fn declare_h0(
        &mut self,
        expr: CurveClassExpr<S>,
        h0: S,
        why: String,
    ) -> Result<(), BaseCurveError> {
        let deg = expr.degree(self.genus);
        let bound = deg.clone() + S::one();
        if h0.is_negative() || (deg >= S::zero() && h0 > bound) {
            return Err(BaseCurveError::DeclaredFactRange {
                expr: expr.to_string(),
                h0: h0.to_string(),
                bound: bound.to_string(),
            });
        }
        let reduced = self.reduce(&expr);
        self.declared_h0.push((reduced, h0, why));
        Ok(())
    }

    pub fn degree(&self, e: &CurveClassExpr<S>) -> S {
        e.degree(self.genus)
    }

    /// Normal form modulo the declared torsion relations.
    ///
    /// On a rational base every class collapses to its degree; on an elliptic
    /// base K_Γ ~ 0 is applied. Reduction is idempotent and degree-preserving.
    pub fn reduce(&self, e: &CurveClassExpr<S>) -> CurveClassExpr<S> {
        let mut out = e.clone();
        if self.genus == 0 {
            return CurveClassExpr::generic_multiple(out.degree(0));
        }
        if self.genus == 1 {
            out.k_coeff = S::zero();
        }
        for rel in &self.torsion {
            let n = int::<S>(rel.order as i64);
            match &rel.shape {
                TorsionShape::Symbol(t) => {
                    if let Some(c) = out.torsion_coeffs.get(t).cloned() {
                        out.torsion_coeffs.insert(t.clone(), mod_pos(&c, &n));
                    }
                }
                TorsionShape::PointDiff(a, b) => {
                    let ca = out.point_coeffs.get(a).cloned().unwrap_or_else(S::zero);
                    if ca.is_zero() {
                        continue;
                    }
                    let cb = out.point_coeffs.get(b).cloned().unwrap_or_else(S::zero);
                    // c_a·a + c_b·b = c_a·(a-b) + (c_a+c_b)·b; reduce c_a mod n.
                    let r = mod_pos(&ca, &n);
                    out.point_coeffs.insert(a.clone(), r.clone());
                    out.point_coeffs.insert(b.clone(), ca + cb - r);
                }
            }
        }
        out.prune();
        out
    }

    /// True when the reduced class is exactly `c * shape` for one declared
    /// nonzero torsion relation, 0 < c < order.
    fn is_declared_nonzero_torsion(&self, reduced: &CurveClassExpr<S>) -> bool {
        if !reduced.degree(self.genus).is_zero() || reduced.is_zero() {
            return false;
        }
        if !reduced.k_coeff.is_zero() {
            return false;
        }
        for rel in &self.torsion {
            if !rel.nonzero {
                continue;
            }
            let n = int::<S>(rel.order as i64);
            match &rel.shape {
                TorsionShape::Symbol(t) => {
                    if reduced.point_coeffs.is_empty() && reduced.torsion_coeffs.len() == 1 {
                        if let Some(c) = reduced.torsion_coeffs.get(t) {
                            if c.is_positive() && *c < n {
                                return true;
                            }
                        }
                    }
                }
                TorsionShape::PointDiff(a, b) => {
                    if reduced.torsion_coeffs.is_empty() && reduced.point_coeffs.len() == 2 {
                        if let (Some(ca), Some(cb)) =
                            (reduced.point_coeffs.get(a), reduced.point_coeffs.get(b))
                        {
                            if ca.clone() + cb.clone() == S::zero() && ca.is_positive() && *ca < n {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    fn declared_value(&self, reduced: &CurveClassExpr<S>) -> Option<S> {
        self.declared_h0
            .iter()
            .find(|(e, _, _)| e == reduced)
            .map(|(_, v, _)| v.clone())
    }

    /// h⁰ of a class, by the rule cascade:
    /// negative degree, nonspecial degree, trivial/torsion at degree 0,
    /// canonical (+torsion) at degree 2q-2, declared facts, else undecided.
    pub fn h0(&self, e: &CurveClassExpr<S>) -> H0Result<S> {
        let q = self.genus;
        let red = self.reduce(e);
        let deg = red.degree(q);
        let qk = int::<S>(2 * q as i64 - 2);
        if deg.is_negative() {
            return H0Result::Known(S::zero());
        }
        if deg > qk {
            return H0Result::Known(deg + S::one() - int(q as i64));
        }
        if deg.is_zero() {
            if red.is_zero() {
                return H0Result::Known(S::one());
            }
            if self.is_declared_nonzero_torsion(&red) {
                return H0Result::Known(S::zero());
            }
        }
        if deg == qk && q >= 1 {
            let diff = self.reduce(&red.sub(&CurveClassExpr::canonical()));
            if diff.is_zero() {
                return H0Result::Known(int(q as i64));
            }
            if self.is_declared_nonzero_torsion(&diff) {
                return H0Result::Known(int(q as i64 - 1));
            }
        }
        if let Some(v) = self.declared_value(&red) {
            return H0Result::Known(v);
        }
        H0Result::NeedsDeclaration(format!("h0 of `{red}` on a genus-{q} curve"))
    }

    /// h¹ by Serre duality: h⁰(K_Γ - e).
    pub fn h1(&self, e: &CurveClassExpr<S>) -> H0Result<S> {
        self.h0(&CurveClassExpr::canonical().sub(e))
    }

    /// Riemann-Roch number deg+1-q; errors if declared h⁰/h¹ contradict it.
    pub fn rr(&self, e: &CurveClassExpr<S>) -> Result<S, BaseCurveError> {
        let chi = self.degree(e) + S::one() - int(self.genus as i64);
        if let (H0Result::Known(h0), H0Result::Known(h1)) = (self.h0(e), self.h1(e)) {
            let lhs = h0 - h1;
            if lhs != chi {
                return Err(BaseCurveError::RiemannRoch {
                    expr: e.to_string(),
                    lhs: lhs.to_string(),
                    rhs: chi.to_string(),
                });
            }
        }
        Ok(chi)
    }

    /// deg >= 2q+1 is very ample, deg >= 2q is base-point free.
    pub fn degree_positivity(&self, e: &CurveClassExpr<S>) -> DegreePositivity {
        let deg = self.degree(e);
        let q2 = int::<S>(2 * self.genus as i64);
        if deg >= q2.clone() + S::one() {
            DegreePositivity::VeryAmple
        } else if deg >= q2 {
            DegreePositivity::BasePointFree
        } else {
            DegreePositivity::Unknown
        }
    }
}
