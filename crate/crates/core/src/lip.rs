//! Functions on a finite invariant metric group and the inf-convolution law.
//!
//! The cones `LIP10 ⊂ LIP1PLUS ⊂ LIP1 ⊂ LIP` are membership predicates on a
//! [`LipFn`], evaluated on demand by [`classify`]. On a finite carrier every
//! function is Lipschitz, so `LIP` is all of `ℚⁿ`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::group::FiniteGroup;
use crate::metric::InvariantMetric;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LipError {
    #[error("functions live over different contexts")]
    ContextMismatch,
    #[error("function is not in cone {0}")]
    ConeMismatch(ConeTag),
    #[error("function is not 1-Lipschitz")]
    NotLip1,
    #[error("cap value must be nonnegative")]
    NegativeCap,
    #[error("unit group of cone {0} is not described")]
    UnsupportedCone(ConeTag),
    #[error("element {0} is not in the group")]
    InvalidElement(usize),
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
}

/// The carrier of every construction: a group with a bi-invariant metric.
#[derive(Clone, PartialEq, Eq)]
pub struct Context {
    group: Arc<FiniteGroup>,
    metric: InvariantMetric,
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Context({}, {})",
            self.group.name(),
            if self.metric.is_discrete() {
                "discrete"
            } else {
                "metric"
            }
        )
    }
}

impl Context {
    pub fn new(metric: InvariantMetric) -> Arc<Self> {
        Arc::new(Context {
            group: metric.group().clone(),
            metric,
        })
    }

    pub fn discrete(group: Arc<FiniteGroup>) -> Arc<Self> {
        Context::new(InvariantMetric::discrete(group))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn metric(&self) -> &InvariantMetric {
        &self.metric
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConeTag {
    #[serde(rename = "LIP")]
    Lip,
    #[serde(rename = "LIP1")]
    Lip1,
    #[serde(rename = "LIP1PLUS")]
    Lip1Plus,
    #[serde(rename = "LIP10")]
    Lip10,
}

impl ConeTag {
    pub const ALL: [ConeTag; 4] = [
        ConeTag::Lip,
        ConeTag::Lip1,
        ConeTag::Lip1Plus,
        ConeTag::Lip10,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConeTag::Lip => "LIP",
            ConeTag::Lip1 => "LIP1",
            ConeTag::Lip1Plus => "LIP1PLUS",
            ConeTag::Lip10 => "LIP10",
        }
    }

    pub fn parse(s: &str) -> Option<ConeTag> {
        match s.to_ascii_uppercase().replace(['_', '-'], "").as_str() {
            "LIP" => Some(ConeTag::Lip),
            "LIP1" => Some(ConeTag::Lip1),
            "LIP1PLUS" => Some(ConeTag::Lip1Plus),
            "LIP10" => Some(ConeTag::Lip10),
            _ => None,
        }
    }
}

impl fmt::Display for ConeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rational-valued function on the group; `values[i] = f(g_i)`.
#[derive(Clone, PartialEq, Eq)]
pub struct LipFn {
    ctx: Arc<Context>,
    values: Vec<Rational>,
}

impl fmt::Debug for LipFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.values).finish()
    }
}

impl LipFn {
    pub fn new(ctx: &Arc<Context>, values: Vec<Rational>) -> Result<Self, LipError> {
        if values.len() != ctx.order() {
            return Err(LipError::LengthMismatch {
                expected: ctx.order(),
                found: values.len(),
            });
        }
        Ok(LipFn {
            ctx: ctx.clone(),
            values,
        })
    }

    pub(crate) fn from_parts(ctx: &Arc<Context>, values: Vec<Rational>) -> Self {
        debug_assert_eq!(values.len(), ctx.order());
        LipFn {
            ctx: ctx.clone(),
            values,
        }
    }

    pub fn constant(ctx: &Arc<Context>, r: Rational) -> Self {
        LipFn::from_parts(ctx, vec![r; ctx.order()])
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    #[inline]
    pub fn at(&self, x: usize) -> Rational {
        self.values[x]
    }

    pub fn min_value(&self) -> Rational {
        *self.values.iter().min().expect("groups are nonempty")
    }

    pub fn max_value(&self) -> Rational {
        *self.values.iter().max().expect("groups are nonempty")
    }

    pub fn map(&self, f: impl Fn(Rational) -> Rational) -> LipFn {
        LipFn::from_parts(&self.ctx, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn add_constant(&self, r: Rational) -> LipFn {
        self.map(|v| v + r)
    }

    pub fn same_context(&self, other: &LipFn) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx
    }

    fn require_same(&self, other: &LipFn) -> Result<(), LipError> {
        if self.same_context(other) {
            Ok(())
        } else {
            Err(LipError::ContextMismatch)
        }
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &LipFn) -> Result<bool, LipError> {
        self.require_same(other)?;
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a <= b))
    }

    pub fn pointwise_min(&self, other: &LipFn) -> Result<LipFn, LipError> {
        self.require_same(other)?;
        Ok(self.zip_with(other, |a, b| a.min(b)))
    }

    pub fn pointwise_max(&self, other: &LipFn) -> Result<LipFn, LipError> {
        self.require_same(other)?;
        Ok(self.zip_with(other, |a, b| a.max(b)))
    }

    fn zip_with(&self, other: &LipFn, f: impl Fn(Rational, Rational) -> Rational) -> LipFn {
        LipFn::from_parts(
            &self.ctx,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }
}

/// Min-plus convolution over a Cayley table:
/// `out[k] = min { x[i] + y[j] : i·j = k }`.
///
/// One sweep over the n² pairs; each pair lands in exactly one output slot.
/// This is the only implementation of the law in the crate.
pub fn min_plus_convolve(group: &FiniteGroup, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let n = group.order();
    assert!(
        x.len() == n && y.len() == n,
        "operand length must equal the group order"
    );
    let mut out: Vec<Option<Rational>> = vec![None; n];
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            let k = group.mul(i, j);
            let s = xi + yj;
            match &mut out[k] {
                Some(cur) if *cur <= s => {}
                slot => *slot = Some(s),
            }
        }
    }
    out.into_iter()
        .map(|v| v.expect("every element factors as i·j"))
        .collect()
}

/// `(f ⊕ g)(k) = min_{i·j = k} f(i) + g(j)`.
pub fn inf_conv(f: &LipFn, g: &LipFn) -> Result<LipFn, LipError> {
    f.require_same(g)?;
    Ok(LipFn::from_parts(
        &f.ctx,
        min_plus_convolve(&f.ctx.group, &f.values, &g.values),
    ))
}

/// `δ_x(z) = d(z, x)`.
pub fn delta(ctx: &Arc<Context>, x: usize) -> Result<LipFn, LipError> {
    if x >= ctx.order() {
        return Err(LipError::InvalidElement(x));
    }
    let m = ctx.metric();
    Ok(LipFn::from_parts(
        ctx,
        (0..ctx.order()).map(|z| m.d(z, x)).collect(),
    ))
}

/// The monoid identity `δ_e`.
pub fn delta_e(ctx: &Arc<Context>) -> LipFn {
    delta(ctx, ctx.group.identity()).expect("identity is an element")
}

fn is_lip1(f: &LipFn) -> bool {
    let m = f.ctx.metric();
    let n = f.ctx.order();
    (0..n).all(|x| ((x + 1)..n).all(|y| (f.at(x) - f.at(y)).abs() <= m.d(x, y)))
}

pub fn in_cone(f: &LipFn, cone: ConeTag) -> bool {
    match cone {
        ConeTag::Lip => true,
        ConeTag::Lip1 => is_lip1(f),
        ConeTag::Lip1Plus => f.min_value() >= Rational::ZERO && is_lip1(f),
        ConeTag::Lip10 => f.min_value().is_zero() && is_lip1(f),
    }
}

/// Exhaustive cone membership. `LIP` is always present.
pub fn classify(f: &LipFn) -> BTreeSet<ConeTag> {
    let mut tags = BTreeSet::from([ConeTag::Lip]);
    if is_lip1(f) {
        tags.insert(ConeTag::Lip1);
        let m = f.min_value();
        if m >= Rational::ZERO {
            tags.insert(ConeTag::Lip1Plus);
        }
        if m.is_zero() {
            tags.insert(ConeTag::Lip10);
        }
    }
    tags
}

pub fn d_inf(f: &LipFn, g: &LipFn) -> Result<Rational, LipError> {
    f.require_same(g)?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .map(|(&a, &b)| (a - b).abs())
        .max()
        .unwrap_or(Rational::ZERO))
}

/// `ρ(f, g) = max_i |Δ_i| / (1 + |Δ_i|)`, taken pointwise.
pub fn rho(f: &LipFn, g: &LipFn) -> Result<Rational, LipError> {
    f.require_same(g)?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .map(|(&a, &b)| {
            let diff = (a - b).abs();
            diff / (Rational::ONE + diff)
        })
        .max()
        .unwrap_or(Rational::ZERO))
}

/// `θ∞(f, g) = d∞(f − min f, g − min g) + |min f − min g|`.
pub fn theta_inf(f: &LipFn, g: &LipFn) -> Result<Rational, LipError> {
    f.require_same(g)?;
    let (mf, mg) = (f.min_value(), g.min_value());
    let shifted = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(&a, &b)| ((a - mf) - (b - mg)).abs())
        .max()
        .unwrap_or(Rational::ZERO);
    Ok(shifted + (mf - mg).abs())
}

/// Smallest `ǧ` with `f ⊕ ǧ ≥ δ_e`: `ǧ(z) = max_x δ_e(x) − f(x·z⁻¹)`.
pub fn residual_inverse(f: &LipFn) -> LipFn {
    let ctx = &f.ctx;
    let g = &*ctx.group;
    let e = g.identity();
    let m = ctx.metric();
    let values = g
        .elements()
        .map(|z| {
            let zi = g.inv(z);
            g.elements()
                .map(|x| m.d(x, e) - f.at(g.mul(x, zi)))
                .max()
                .expect("groups are nonempty")
        })
        .collect();
    LipFn::from_parts(ctx, values)
}

/// Decides invertibility of `f` inside `cone`, returning the inverse.
///
/// Any inverse `g` satisfies `f ⊕ g = δ_e`, hence `g ≥ ǧ`; monotonicity
/// then forces `f ⊕ ǧ = δ_e`, so testing the residual alone is complete.
pub fn is_unit(f: &LipFn, cone: ConeTag) -> Result<Option<LipFn>, LipError> {
    if !in_cone(f, cone) {
        return Err(LipError::ConeMismatch(cone));
    }
    let g = residual_inverse(f);
    let e = delta_e(&f.ctx);
    if inf_conv(f, &g)? == e && inf_conv(&g, f)? == e && in_cone(&g, cone) {
        Ok(Some(g))
    } else {
        Ok(None)
    }
}

/// One verified instance of `(r + δ_x) ⊕ (s + δ_y) = (r + s) + δ_{xy}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawWitness {
    pub x: usize,
    pub r: Rational,
    pub y: usize,
    pub s: Rational,
    pub product: LipFn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitGroup {
    /// `{δ_x : x ∈ G}`, indexed by `x`.
    Finite { units: Vec<LipFn> },
    /// `{r + δ_x : x ∈ G, r ∈ ℚ}` with sampled law witnesses.
    Parametric {
        deltas: Vec<LipFn>,
        law: Vec<LawWitness>,
    },
}

impl UnitGroup {
    pub fn deltas(&self) -> &[LipFn] {
        match self {
            UnitGroup::Finite { units } => units,
            UnitGroup::Parametric { deltas, .. } => deltas,
        }
    }
}

const LAW_OFFSETS: [(i128, i128); 4] = [(0, 1), (1, 2), (-1, 1), (7, 3)];

/// The unit group of a cone, each listed element checked by [`is_unit`].
pub fn units_of(ctx: &Arc<Context>, cone: ConeTag) -> Result<UnitGroup, LipError> {
    if cone == ConeTag::Lip {
        return Err(LipError::UnsupportedCone(cone));
    }
    let g = ctx.group();
    let deltas: Vec<LipFn> = g
        .elements()
        .map(|x| delta(ctx, x))
        .collect::<Result<_, _>>()?;
    for d in &deltas {
        let inv = is_unit(d, cone)?;
        assert!(inv.is_some(), "δ_x must be a unit of {cone}");
    }
    if cone != ConeTag::Lip1 {
        return Ok(UnitGroup::Finite { units: deltas });
    }
    let offset = |k: usize| {
        let (n, d) = LAW_OFFSETS[k % LAW_OFFSETS.len()];
        Rational::new(n, d)
    };
    let mut law = Vec::with_capacity(g.order() * g.order());
    for x in g.elements() {
        for y in g.elements() {
            let (r, s) = (offset(x), offset(y + 1));
            let left = deltas[x].add_constant(r);
            let right = deltas[y].add_constant(s);
            let product = inf_conv(&left, &right)?;
            assert_eq!(product, deltas[g.mul(x, y)].add_constant(r + s));
            assert!(is_unit(&left, ConeTag::Lip1)?.is_some());
            law.push(LawWitness {
                x,
                r,
                y,
                s,
                product,
            });
        }
    }
    Ok(UnitGroup::Parametric { deltas, law })
}

/// `(f − min f, min f)`, with the law `(f, c) ⊕̄ (f', c') = (f ⊕ f', c + c')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauPair {
    pub base: LipFn,
    pub offset: Rational,
}

impl TauPair {
    pub fn combine(&self, other: &TauPair) -> Result<TauPair, LipError> {
        Ok(TauPair {
            base: inf_conv(&self.base, &other.base)?,
            offset: self.offset + other.offset,
        })
    }

    /// `d∞(base, base') + |c − c'|`.
    pub fn distance(&self, other: &TauPair) -> Result<Rational, LipError> {
        Ok(d_inf(&self.base, &other.base)? + (self.offset - other.offset).abs())
    }
}

pub fn tau(f: &LipFn) -> Result<TauPair, LipError> {
    if !is_lip1(f) {
        return Err(LipError::NotLip1);
    }
    let m = f.min_value();
    Ok(TauPair {
        base: f.add_constant(-m),
        offset: m,
    })
}

pub fn tau_inv(p: &TauPair) -> LipFn {
    p.base.add_constant(p.offset)
}

/// `min(δ_e, a)` pointwise.
pub fn cap_with(ctx: &Arc<Context>, a: Rational) -> Result<LipFn, LipError> {
    if a < Rational::ZERO {
        return Err(LipError::NegativeCap);
    }
    Ok(delta_e(ctx).map(|v| v.min(a)))
}

/// `δ_e ⊕ f`: the largest 1-Lipschitz minorant of `f`.
pub fn lip_regularize(f: &LipFn) -> LipFn {
    inf_conv(&delta_e(&f.ctx), f).expect("δ_e shares the context of f")
}

/// `max f − min f`.
pub fn osc(f: &LipFn) -> Rational {
    f.max_value() - f.min_value()
}
