//! The Picard lattice of a surface model: intersection form, canonical class,
//! blow-ups with infinitely-near points, strict transforms, adjunction and
//! surface Riemann-Roch.
//!
//! After a blow-up the retained generator names denote *pullback* (total
//! transform) classes, so the Gram form stays block diagonal: old pairings are
//! untouched and each exceptional contributes a fresh `-1`. Strict transforms
//! are tracked separately as curve records; the strict transform of a parent
//! exceptional loses 1 per infinitely-near child blown up on it.

use std::collections::BTreeMap;
use std::fmt;

use crate::base::{BaseCurve, CurveClassExpr, GENERIC_POINT};
use crate::scalar::{halve_exact, int, Scalar};

pub const GEN_LINE: &str = "l";
pub const GEN_SECTION: &str = "C0";
pub const GEN_FIBER: &str = "f";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    ProjectivePlane,
    Ruled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenRole {
    Line,
    SectionC0,
    GenericFiber,
    NamedFiber(String),
    Exceptional {
        point: String,
        parent: Option<String>,
    },
}

#[derive(Debug, Clone)]
pub struct GeneratorRecord {
    pub name: String,
    pub role: GenRole,
    pub depth: u32,
}

/// Divisor class: integer coefficients on the non-fiber generators plus a
/// fiber part recorded as a divisor class on the base curve, so torsion and
/// named-point decompositions survive numerical bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass<S: Scalar> {
    pub base: BTreeMap<String, S>,
    pub fiber: CurveClassExpr<S>,
}

impl<S: Scalar> Default for DivisorClass<S> {
    fn default() -> Self {
        Self {
            base: BTreeMap::new(),
            fiber: CurveClassExpr::default(),
        }
    }
}

impl<S: Scalar> DivisorClass<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn generator(name: &str) -> Self {
        let mut d = Self::zero();
        d.base.insert(name.to_string(), S::one());
        d
    }

    pub fn from_fiber(expr: CurveClassExpr<S>) -> Self {
        Self {
            base: BTreeMap::new(),
            fiber: expr,
        }
    }

    pub fn coeff(&self, name: &str) -> S {
        self.base.get(name).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.base.values().all(|c| c.is_zero()) && self.fiber.is_zero()
    }

    pub fn scale(&self, n: &S) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.base {
            out.base.insert(k.clone(), c.clone() * n.clone());
        }
        out.fiber = self.fiber.scale(n);
        out.prune();
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.base {
            let e = out.base.entry(k.clone()).or_insert_with(S::zero);
            *e = e.clone() + c.clone();
        }
        out.fiber = out.fiber.add(&other.fiber);
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    fn prune(&mut self) {
        self.base.retain(|_, c| !c.is_zero());
    }

    fn add_gen(&mut self, name: &str, c: S) {
        let e = self.base.entry(name.to_string()).or_insert_with(S::zero);
        *e = e.clone() + c;
        self.prune();
    }
}

impl<S: Scalar> fmt::Display for DivisorClass<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        for (k, c) in &self.base {
            terms.push(format!("{c}*{k}"));
        }
        if !self.fiber.k_coeff.is_zero() {
            terms.push(format!("{}*f[K]", self.fiber.k_coeff));
        }
        for (p, c) in &self.fiber.point_coeffs {
            if p == GENERIC_POINT {
                terms.push(format!("{c}*f"));
            } else {
                terms.push(format!("{c}*f[{p}]"));
            }
        }
        for (t, c) in &self.fiber.torsion_coeffs {
            terms.push(format!("{c}*f[{t}]"));
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// A named curve on the model. The stored class is kept in strict-transform
/// form through blow-ups whenever the curve is listed as a host.
#[derive(Debug, Clone)]
pub struct CurveRecord<S: Scalar> {
    pub name: String,
    pub class: DivisorClass<S>,
    pub declared_pa: Option<S>,
    pub irreducible: bool,
    pub smooth: bool,
    pub rational: bool,
    /// Declared covering pencils (degree, target genus), e.g. the 3:1 map to
    /// the elliptic base or the g^1_4 cut by the ruling.
    pub covers: Vec<(S, S)>,
}

#[derive(Debug, Clone)]
pub struct BlowUpRecord<S: Scalar> {
    pub point: String,
    pub hosts: BTreeMap<String, S>,
    pub parent: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BlowUpSpec<S: Scalar> {
    pub point: String,
    pub hosts: Vec<(String, S)>,
    pub parent: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum PicardError {
    #[error("generator `{0}` not found on this model")]
    UnknownGenerator(String),
    #[error("point symbol `{0}` is not declared on the base curve")]
    UnknownPoint(String),
    #[error("curve `{0}` is not declared on this model")]
    UnknownCurve(String),
    #[error("name `{0}` is already in use")]
    NameTaken(String),
    #[error("blow-up multiplicity for `{0}` must be positive")]
    NonPositiveMultiplicity(String),
    #[error("parent point `{0}` has no exceptional divisor on this model")]
    UnknownParent(String),
    #[error("odd intersection parity in `{ctx}`: {val} is not divisible by 2")]
    Parity { ctx: String, val: String },
    #[error("declared p_a = {declared} for `{name}` but adjunction gives {computed}")]
    PaMismatch {
        name: String,
        declared: String,
        computed: String,
    },
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, PicardError>;

/// A surface presented by named generators with an integer intersection form.
#[derive(Debug, Clone)]
pub struct SurfaceModel<S: Scalar> {
    pub kind: SurfaceKind,
    pub base_curve: BaseCurve<S>,
    /// Ruled invariant e = -deg D; zero and unused for the plane.
    pub e_invariant: S,
    pub decomposable: bool,
    /// The bundle divisor D with X'' = P(O + O(D)), once declared.
    pub bundle_d: Option<CurveClassExpr<S>>,
    pub generators: Vec<GeneratorRecord>,
    canonical: DivisorClass<S>,
    pub curves: BTreeMap<String, CurveRecord<S>>,
    pub blowup_log: Vec<BlowUpRecord<S>>,
}

impl<S: Scalar> SurfaceModel<S> {
    /// The projective plane: one generator l with l² = 1 and K = -3l.
    pub fn new_plane() -> Self {
        let mut canonical = DivisorClass::zero();
        canonical.base.insert(GEN_LINE.into(), int(-3));
        Self {
            kind: SurfaceKind::ProjectivePlane,
            base_curve: BaseCurve::new(0, Vec::new()),
            e_invariant: S::zero(),
            decomposable: false,
            bundle_d: None,
            generators: vec![GeneratorRecord {
                name: GEN_LINE.into(),
                role: GenRole::Line,
                depth: 0,
            }],
            canonical,
            curves: BTreeMap::new(),
            blowup_log: Vec::new(),
        }
    }

    /// A ruled surface over a genus-q base with invariant e, plus one fiber
    /// generator per named point. K = -2C0 + (K_Γ + D)·f; until a bundle is
    /// declared the fiber part is recorded as K_Γ + (-e)·(generic point).
    pub fn new_ruled(q: u32, e: S, named_points: Vec<String>, decomposable: bool) -> Self {
        let mut generators = vec![
            GeneratorRecord {
                name: GEN_SECTION.into(),
                role: GenRole::SectionC0,
                depth: 0,
            },
            GeneratorRecord {
                name: GEN_FIBER.into(),
                role: GenRole::GenericFiber,
                depth: 0,
            },
        ];
        for p in &named_points {
            generators.push(GeneratorRecord {
                name: format!("f[{p}]"),
                role: GenRole::NamedFiber(p.clone()),
                depth: 0,
            });
        }
        let mut canonical = DivisorClass::zero();
        canonical.base.insert(GEN_SECTION.into(), int(-2));
        canonical.fiber = CurveClassExpr::canonical()
            .add(&CurveClassExpr::generic_multiple(S::zero() - e.clone()));
        Self {
            kind: SurfaceKind::Ruled,
            base_curve: BaseCurve::new(q, named_points),
            e_invariant: e,
            decomposable,
            bundle_d: None,
            generators,
            canonical,
            curves: BTreeMap::new(),
            blowup_log: Vec::new(),
        }
    }

    pub fn genus(&self) -> u32 {
        self.base_curve.genus
    }

    /// χ(O) = 1 - q; every surface in scope has p_g = 0.
    pub fn chi_structure(&self) -> S {
        S::one() - int(self.genus() as i64)
    }

    pub fn generator(&self, name: &str) -> Option<&GeneratorRecord> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn exceptional_name(point: &str) -> String {
        format!("E[{point}]")
    }

    /// Declares the bundle divisor D (decomposable ruled surfaces only) and
    /// rewrites the canonical fiber part as K_Γ + D so named-point
    /// decompositions stay available.
    pub fn declare_bundle(&mut self, d: CurveClassExpr<S>) -> Result<()> {
        if self.kind != SurfaceKind::Ruled {
            return Err(PicardError::Invalid(
                "bundle divisors only exist on ruled models".into(),
            ));
        }
        self.validate_fiber_expr(&d)?;
        let deg = self.base_curve.degree(&d);
        let expect = S::zero() - self.e_invariant.clone();
        if deg != expect {
            return Err(PicardError::Invalid(format!(
                "deg(D) = {deg} but e = {} requires deg(D) = {expect}",
                self.e_invariant
            )));
        }
        if self.blowup_log.is_empty() {
            self.canonical.fiber = CurveClassExpr::canonical().add(&d);
        }
        self.bundle_d = Some(d);
        Ok(())
    }

    /// Replaces the canonical class by a linearly equivalent representative,
    /// e.g. fixing -K = 2C0 + 2ΣF_i on the Hirzebruch model.
    pub fn set_canonical(&mut self, k: DivisorClass<S>) -> Result<()> {
        self.validate(&k)?;
        if !self.lin_eq(&k, &self.canonical)? {
            return Err(PicardError::Invalid(format!(
                "proposed canonical `{k}` is not linearly equivalent to `{}`",
                self.canonical
            )));
        }
        self.canonical = k;
        Ok(())
    }

    pub fn canonical(&self) -> &DivisorClass<S> {
        &self.canonical
    }

    fn validate_fiber_expr(&self, e: &CurveClassExpr<S>) -> Result<()> {
        for p in e.point_coeffs.keys() {
            if p != GENERIC_POINT && !self.base_curve.has_point(p) {
                return Err(PicardError::UnknownPoint(p.clone()));
            }
        }
        for t in e.torsion_coeffs.keys() {
            if !self.base_curve.torsion_symbol(t) {
                return Err(PicardError::UnknownPoint(t.clone()));
            }
        }
        Ok(())
    }

    pub fn validate(&self, d: &DivisorClass<S>) -> Result<()> {
        for name in d.base.keys() {
            if self.generator(name).is_none() {
                return Err(PicardError::UnknownGenerator(name.clone()));
            }
        }
        if self.kind == SurfaceKind::ProjectivePlane && !d.fiber.is_zero() {
            return Err(PicardError::Invalid(
                "plane models have no fiber classes".into(),
            ));
        }
        self.validate_fiber_expr(&d.fiber)
    }

    fn gen_self_intersection(&self, name: &str) -> Result<S> {
        match &self
            .generator(name)
            .ok_or_else(|| PicardError::UnknownGenerator(name.into()))?
            .role
        {
            GenRole::Line => Ok(S::one()),
            GenRole::SectionC0 => Ok(S::zero() - self.e_invariant.clone()),
            GenRole::Exceptional { .. } => Ok(int(-1)),
            GenRole::GenericFiber | GenRole::NamedFiber(_) => Ok(S::zero()),
        }
    }

    /// The bilinear intersection form. Pullback generators of distinct
    /// blow-ups are orthogonal; the section meets every fiber class in its
    /// degree; fiber classes are mutually orthogonal.
    pub fn intersect(&self, d1: &DivisorClass<S>, d2: &DivisorClass<S>) -> Result<S> {
        self.validate(d1)?;
        self.validate(d2)?;
        let mut total = S::zero();
        for (name, c1) in &d1.base {
            let c2 = d2.coeff(name);
            if !c2.is_zero() {
                total = total + c1.clone() * c2 * self.gen_self_intersection(name)?;
            }
        }
        if self.kind == SurfaceKind::Ruled {
            let q = self.genus();
            let deg1 = d1.fiber.degree(q);
            let deg2 = d2.fiber.degree(q);
            total = total + d1.coeff(GEN_SECTION) * deg2 + d2.coeff(GEN_SECTION) * deg1;
        }
        Ok(total)
    }

    pub fn self_intersection(&self, d: &DivisorClass<S>) -> Result<S> {
        self.intersect(d, d)
    }

    /// Unit class of a generator; fiber generators map into the fiber part.
    pub fn unit_class(&self, name: &str) -> Result<DivisorClass<S>> {
        let g = self
            .generator(name)
            .ok_or_else(|| PicardError::UnknownGenerator(name.into()))?;
        Ok(match &g.role {
            GenRole::GenericFiber => {
                DivisorClass::from_fiber(CurveClassExpr::generic_multiple(S::one()))
            }
            GenRole::NamedFiber(p) => DivisorClass::from_fiber(CurveClassExpr::point(p)),
            _ => DivisorClass::generator(name),
        })
    }

    /// The Gram matrix over the full ordered generator list.
    pub fn gram_matrix(&self) -> (Vec<String>, Vec<Vec<S>>) {
        let names: Vec<String> = self.generators.iter().map(|g| g.name.clone()).collect();
        let units: Vec<DivisorClass<S>> = names
            .iter()
            .map(|n| self.unit_class(n).expect("generator"))
            .collect();
        let m = units
            .iter()
            .map(|a| {
                units
                    .iter()
                    .map(|b| self.intersect(a, b).expect("generators validate"))
                    .collect()
            })
            .collect();
        (names, m)
    }

    /// Arithmetic genus by adjunction: 1 + (D² + D·K)/2.
    pub fn adjunction_pa(&self, d: &DivisorClass<S>) -> Result<S> {
        let n = self.self_intersection(d)? + self.intersect(d, &self.canonical)?;
        let half = halve_exact(n).map_err(|v| PicardError::Parity {
            ctx: format!("p_a of {d}"),
            val: v.to_string(),
        })?;
        Ok(S::one() + half)
    }

    /// Surface Riemann-Roch: χ(O(D)) = χ(O) + D·(D - K)/2.
    pub fn chi_rr(&self, d: &DivisorClass<S>) -> Result<S> {
        let n = self.self_intersection(d)? - self.intersect(d, &self.canonical)?;
        let half = halve_exact(n).map_err(|v| PicardError::Parity {
            ctx: format!("chi of {d}"),
            val: v.to_string(),
        })?;
        Ok(self.chi_structure() + half)
    }

    /// Numerical equality: same coefficients after identifying all fiber
    /// classes by degree.
    pub fn num_eq(&self, d1: &DivisorClass<S>, d2: &DivisorClass<S>) -> Result<bool> {
        self.validate(d1)?;
        self.validate(d2)?;
        let diff = d1.sub(d2);
        Ok(diff.base.values().all(|c| c.is_zero()) && diff.fiber.degree(self.genus()).is_zero())
    }

    /// Linear equivalence: generator coefficients agree and the fiber parts
    /// differ by a divisor that reduces to zero on Γ (torsion included).
    pub fn lin_eq(&self, d1: &DivisorClass<S>, d2: &DivisorClass<S>) -> Result<bool> {
        self.validate(d1)?;
        self.validate(d2)?;
        let diff = d1.sub(d2);
        if !diff.base.values().all(|c| c.is_zero()) {
            return Ok(false);
        }
        Ok(self.base_curve.reduce(&diff.fiber).is_zero())
    }

    pub fn declare_curve(&mut self, rec: CurveRecord<S>) -> Result<()> {
        self.validate(&rec.class)?;
        if self.curves.contains_key(&rec.name) || self.generator(&rec.name).is_some() {
            return Err(PicardError::NameTaken(rec.name.clone()));
        }
        if let Some(pa) = &rec.declared_pa {
            let computed = self.adjunction_pa(&rec.class)?;
            if *pa != computed {
                return Err(PicardError::PaMismatch {
                    name: rec.name.clone(),
                    declared: pa.to_string(),
                    computed: computed.to_string(),
                });
            }
        }
        if rec.rational {
            let computed = self.adjunction_pa(&rec.class)?;
            if !computed.is_zero() {
                return Err(PicardError::PaMismatch {
                    name: rec.name.clone(),
                    declared: "0 (rational)".into(),
                    computed: computed.to_string(),
                });
            }
        }
        self.curves.insert(rec.name.clone(), rec);
        Ok(())
    }

    pub fn curve(&self, name: &str) -> Result<&CurveRecord<S>> {
        self.curves
            .get(name)
            .ok_or_else(|| PicardError::UnknownCurve(name.into()))
    }

    /// Blows up a point. Host curves are replaced by their strict transforms
    /// (class - m·E), the canonical class gains +E, and the strict transform
    /// of a parent exceptional loses one copy of the new exceptional.
    pub fn blow_up(&self, spec: &BlowUpSpec<S>) -> Result<SurfaceModel<S>> {
        let e_name = Self::exceptional_name(&spec.point);
        if self.generator(&e_name).is_some() {
            return Err(PicardError::NameTaken(e_name));
        }
        let mut hosts: BTreeMap<String, S> = BTreeMap::new();
        for (name, mult) in &spec.hosts {
            if !self.curves.contains_key(name) {
                return Err(PicardError::UnknownCurve(name.clone()));
            }
            if !mult.is_positive() {
                return Err(PicardError::NonPositiveMultiplicity(name.clone()));
            }
            hosts.insert(name.clone(), mult.clone());
        }
        let mut depth = 0;
        if let Some(parent) = &spec.parent {
            let parent_exc = Self::exceptional_name(parent);
            let pg = self
                .generator(&parent_exc)
                .ok_or_else(|| PicardError::UnknownParent(parent.clone()))?;
            depth = pg.depth + 1;
            // The point lies on the parent exceptional: implicit simple host.
            hosts.entry(parent_exc).or_insert_with(S::one);
        }

        let mut next = self.clone();
        next.generators.push(GeneratorRecord {
            name: e_name.clone(),
            role: GenRole::Exceptional {
                point: spec.point.clone(),
                parent: spec.parent.clone(),
            },
            depth,
        });
        next.canonical.add_gen(&e_name, S::one());
        for (name, mult) in &hosts {
            let rec = next.curves.get_mut(name).expect("validated host");
            rec.class.add_gen(&e_name, S::zero() - mult.clone());
            if let Some(pa) = rec.declared_pa.take() {
                // an ordinary m-fold point drops p_a by m(m-1)/2
                let drop =
                    halve_exact(mult.clone() * (mult.clone() - S::one())).expect("m(m-1) is even");
                rec.declared_pa = Some(pa - drop);
            }
        }
        next.curves.insert(
            e_name.clone(),
            CurveRecord {
                name: e_name.clone(),
                class: DivisorClass::generator(&e_name),
                declared_pa: Some(S::zero()),
                irreducible: true,
                smooth: true,
                rational: true,
                covers: Vec::new(),
            },
        );
        next.blowup_log.push(BlowUpRecord {
            point: spec.point.clone(),
            hosts,
            parent: spec.parent.clone(),
        });
        Ok(next)
    }

    /// Total transform of a class from an earlier model in the blow-up tower.
    /// In pullback coordinates this is the identity embedding: same
    /// coefficients, zero on every newer exceptional.
    pub fn pullback(&self, d: &DivisorClass<S>) -> Result<DivisorClass<S>> {
        self.validate(d)?;
        Ok(d.clone())
    }

    /// Pullback minus Σ mᵢ·E over the listed centers.
    pub fn strict_transform(
        &self,
        d: &DivisorClass<S>,
        mults: &[(String, S)],
    ) -> Result<DivisorClass<S>> {
        let mut out = self.pullback(d)?;
        for (point, m) in mults {
            let e_name = Self::exceptional_name(point);
            if self.generator(&e_name).is_none() {
                return Err(PicardError::UnknownParent(point.clone()));
            }
            if m.is_negative() {
                return Err(PicardError::NonPositiveMultiplicity(point.clone()));
            }
            out.add_gen(&e_name, S::zero() - m.clone());
        }
        Ok(out)
    }

    /// Multiplicities of a tracked curve at all logged centers.
    pub fn log_multiplicities(&self, curve: &str) -> Vec<(String, S)> {
        self.blowup_log
            .iter()
            .filter_map(|r| r.hosts.get(curve).map(|m| (r.point.clone(), m.clone())))
            .collect()
    }
}
