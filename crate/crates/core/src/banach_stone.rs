//! Composition operators `Φ_T(f) = f ∘ T⁻¹` and the isomorphism machinery
//! built on them.
//!
//! Every isometric monoid isomorphism between the `LIP1PLUS` monoids of two
//! finite invariant metric groups is a composition operator induced by an
//! isometric group isomorphism, so enumerating the latter enumerates the
//! former. The operator-level properties each `Φ_T` must have are checked by
//! [`verify_lemma_suite`].

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::group::{
    enumerate_isomorphisms, find_isomorphism, FiniteGroup, GroupError, GroupIso, OrderCap,
};
use crate::lip::{
    self, classify, d_inf, delta, delta_e, inf_conv, rho, theta_inf, ConeTag, Context, LipError,
    LipFn,
};
use crate::metric::{isometry_witness, MetricError};
use crate::rational::Rational;
use crate::report::{sampled, CheckReport};
use crate::sample::SampleConfig;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BanachStoneError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Lip(#[from] LipError),
    #[error("group isomorphism is not an isometry: distance of ({0}, {1}) changes")]
    NotIsometric(usize, usize),
}

/// `Φ_T : f ↦ f ∘ T⁻¹` from functions on `source` to functions on `target`.
#[derive(Clone)]
pub struct CompositionIso {
    t: GroupIso,
    t_inv: GroupIso,
    source: Arc<Context>,
    target: Arc<Context>,
}

impl std::fmt::Debug for CompositionIso {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CompositionIso({:?})", self.t.map())
    }
}

impl PartialEq for CompositionIso {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t && self.source == other.source && self.target == other.target
    }
}

impl CompositionIso {
    pub fn new(
        t: GroupIso,
        source: Arc<Context>,
        target: Arc<Context>,
    ) -> Result<Self, BanachStoneError> {
        if let Some((x, y)) = isometry_witness(&t, source.metric(), target.metric())? {
            return Err(BanachStoneError::NotIsometric(x, y));
        }
        Ok(Self::new_unchecked(t, source, target))
    }

    /// Skips the isometry check. The result may violate the operator
    /// properties; useful as a negative control for [`verify_lemma_suite`].
    pub fn new_unchecked(t: GroupIso, source: Arc<Context>, target: Arc<Context>) -> Self {
        let t_inv = t.inverse();
        CompositionIso {
            t,
            t_inv,
            source,
            target,
        }
    }

    pub fn identity(ctx: Arc<Context>) -> Self {
        let t = GroupIso::identity(ctx.group().clone());
        Self::new_unchecked(t, ctx.clone(), ctx)
    }

    pub fn group_iso(&self) -> &GroupIso {
        &self.t
    }

    pub fn source(&self) -> &Arc<Context> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Context> {
        &self.target
    }

    /// `Φ(f)[y] = f[T⁻¹(y)]`.
    pub fn apply(&self, f: &LipFn) -> Result<LipFn, LipError> {
        if !(Arc::ptr_eq(f.context(), &self.source) || **f.context() == *self.source) {
            return Err(LipError::ContextMismatch);
        }
        let values = (0..self.target.order())
            .map(|y| f.at(self.t_inv.apply(y)))
            .collect();
        LipFn::new(&self.target, values)
    }

    /// `Φ⁻¹ = Φ_{T⁻¹}`.
    pub fn inverse(&self) -> CompositionIso {
        CompositionIso {
            t: self.t_inv.clone(),
            t_inv: self.t.clone(),
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }

    /// First `self`, then `other`.
    pub fn then(&self, other: &CompositionIso) -> Result<CompositionIso, BanachStoneError> {
        let t = self.t.then(&other.t)?;
        Ok(Self::new_unchecked(
            t,
            self.source.clone(),
            other.target.clone(),
        ))
    }
}

/// Free-function form of [`CompositionIso::apply`].
pub fn phi_apply(phi: &CompositionIso, f: &LipFn) -> Result<LipFn, LipError> {
    phi.apply(f)
}

/// All isometric monoid isomorphisms `LIP1PLUS(X) → LIP1PLUS(Y)`, as composition operators.
pub fn enumerate_isometric_monoid_isos(
    x: &Arc<Context>,
    y: &Arc<Context>,
    cap: OrderCap,
) -> Result<Vec<CompositionIso>, BanachStoneError> {
    let mut out = Vec::new();
    for t in enumerate_isomorphisms(x.group(), y.group(), cap)? {
        if isometry_witness(&t, x.metric(), y.metric())?.is_none() {
            out.push(CompositionIso::new_unchecked(t, x.clone(), y.clone()));
        }
    }
    Ok(out)
}

/// `Is_m(LIP1PLUS(X))`: the isometric automorphisms of `X`, as operators.
pub fn is_m_group(
    x: &Arc<Context>,
    cap: OrderCap,
) -> Result<Vec<CompositionIso>, BanachStoneError> {
    enumerate_isometric_monoid_isos(x, x, cap)
}

/// Closure under composition and inverse, and presence of the identity.
pub fn check_group_closure(ops: &[CompositionIso]) -> Result<(), Value> {
    let maps: BTreeSet<Vec<usize>> = ops.iter().map(|p| p.t.map().to_vec()).collect();
    let Some(first) = ops.first() else {
        return Err(json!({"reason": "empty family"}));
    };
    let n = first.t.map().len();
    let id: Vec<usize> = (0..n).collect();
    if !maps.contains(&id) {
        return Err(json!({"reason": "identity missing"}));
    }
    for a in ops {
        if !maps.contains(a.t_inv.map()) {
            return Err(json!({"reason": "inverse missing", "map": a.t.map()}));
        }
        for b in ops {
            let c: Vec<usize> = a.t.map().iter().map(|&m| b.t.map()[m]).collect();
            if !maps.contains(&c) {
                return Err(json!({"reason": "not closed", "left": a.t.map(), "right": b.t.map()}));
            }
        }
    }
    Ok(())
}

/// Why two groups were found non-isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    OrderMismatch { left: usize, right: usize },
    ElementOrders { left: Vec<usize>, right: Vec<usize> },
    ExhaustedSearch,
}

#[derive(Debug, Clone)]
pub struct IsoDecision {
    pub verdict: bool,
    pub witness: Option<GroupIso>,
    /// `Φ_T` between the discrete contexts, for a positive verdict.
    pub operator: Option<CompositionIso>,
    pub certificate: Option<Certificate>,
}

/// Decides whether `(G*, ⊕)` and `(H*, ⊕)` are isomorphic, i.e. whether `G ≅ H`.
pub fn decide_monoid_iso(
    g: &Arc<FiniteGroup>,
    h: &Arc<FiniteGroup>,
    cap: OrderCap,
) -> Result<IsoDecision, BanachStoneError> {
    cap.check(g.order())?;
    cap.check(h.order())?;
    let negative = |c| IsoDecision {
        verdict: false,
        witness: None,
        operator: None,
        certificate: Some(c),
    };
    if g.order() != h.order() {
        return Ok(negative(Certificate::OrderMismatch {
            left: g.order(),
            right: h.order(),
        }));
    }
    let (left, right) = (g.order_profile(), h.order_profile());
    if left != right {
        return Ok(negative(Certificate::ElementOrders { left, right }));
    }
    match find_isomorphism(g, h, cap)? {
        None => Ok(negative(Certificate::ExhaustedSearch)),
        Some(t) => {
            let op = CompositionIso::new(
                t.clone(),
                Context::discrete(g.clone()),
                Context::discrete(h.clone()),
            )?;
            Ok(IsoDecision {
                verdict: true,
                witness: Some(t),
                operator: Some(op),
                certificate: None,
            })
        }
    }
}

/// `f ↦ f + min f`: an order-preserving monoid automorphism of `LIP1PLUS`
/// that is not a `ρ`-isometry.
pub fn noniso_morphism_apply(f: &LipFn) -> Result<LipFn, LipError> {
    if !lip::in_cone(f, ConeTag::Lip1Plus) {
        return Err(LipError::ConeMismatch(ConeTag::Lip1Plus));
    }
    Ok(f.add_constant(f.min_value()))
}

/// Inverse of [`noniso_morphism_apply`]: `h ↦ h − (min h)/2`.
pub fn noniso_preimage(h: &LipFn) -> Result<LipFn, LipError> {
    if !lip::in_cone(h, ConeTag::Lip1Plus) {
        return Err(LipError::ConeMismatch(ConeTag::Lip1Plus));
    }
    Ok(h.add_constant(-(h.min_value() / Rational::from(2))))
}

pub(crate) fn fn_json(f: &LipFn) -> Value {
    Value::Array(
        f.values()
            .iter()
            .map(|v| Value::String(v.to_string()))
            .collect(),
    )
}

fn mismatch(what: &str, got: &LipFn, want: &LipFn) -> Value {
    json!({"what": what, "got": fn_json(got), "expected": fn_json(want)})
}

/// Samples `LIP1PLUS` on `ctx` and confirms the shift map is a bijective,
/// order-preserving monoid morphism that fails to be a `ρ`-isometry.
pub fn verify_noniso_example(ctx: &Arc<Context>, cfg: &SampleConfig) -> Vec<CheckReport> {
    let mut s = cfg.sampler("noniso");
    let n = cfg.samples;
    let phi = |f: &LipFn| noniso_morphism_apply(f).expect("sample is in LIP1PLUS");
    let mut out = Vec::new();

    out.push(sampled("noniso_morphism", n, |_| {
        let (f, g) = (s.lip1plus(ctx), s.lip1plus(ctx));
        let lhs = phi(&inf_conv(&f, &g).unwrap());
        let rhs = inf_conv(&phi(&f), &phi(&g)).unwrap();
        if lhs == rhs {
            Ok(())
        } else {
            Err(mismatch("Φ(f⊕g)", &lhs, &rhs))
        }
    }));
    let e = delta_e(ctx);
    out.push(CheckReport::from_result(
        "noniso_identity",
        1,
        if phi(&e) == e {
            Ok(())
        } else {
            Err(mismatch("Φ(δ_e)", &phi(&e), &e))
        },
    ));
    out.push(sampled("noniso_injective", n, |_| {
        let f = s.lip1plus(ctx);
        let back = noniso_preimage(&phi(&f)).unwrap();
        if back == f {
            Ok(())
        } else {
            Err(mismatch("Φ⁻¹(Φ(f))", &back, &f))
        }
    }));
    out.push(sampled("noniso_surjective", n, |_| {
        let h = s.lip1plus(ctx);
        let pre = noniso_preimage(&h).unwrap();
        if !lip::in_cone(&pre, ConeTag::Lip1Plus) {
            return Err(json!({"what": "preimage leaves LIP1PLUS", "h": fn_json(&h)}));
        }
        let img = phi(&pre);
        if img == h {
            Ok(())
        } else {
            Err(mismatch("Φ(Φ⁻¹(h))", &img, &h))
        }
    }));
    out.push(sampled("noniso_order", n, |_| {
        let f = s.lip1plus(ctx);
        let g = f.pointwise_max(&s.lip1plus(ctx)).unwrap();
        if phi(&f).le(&phi(&g)).unwrap() {
            Ok(())
        } else {
            Err(json!({"f": fn_json(&f), "g": fn_json(&g)}))
        }
    }));

    let one = LipFn::constant(ctx, Rational::ONE);
    let zero = LipFn::constant(ctx, Rational::ZERO);
    let before = rho(&one, &zero).unwrap();
    let after = rho(&phi(&one), &phi(&zero)).unwrap();
    let detail = json!({"f": "1", "g": "0", "rho_before": before.to_string(), "rho_after": after.to_string()});
    out.push(if before != after {
        CheckReport::pass("noniso_not_isometric", 1).with_detail(detail)
    } else {
        CheckReport::fail("noniso_not_isometric", 1, detail)
    });
    out
}

/// The operator-level properties every isometric monoid isomorphism has.
/// Each failing check carries its first witness.
pub fn verify_lemma_suite(phi: &CompositionIso, cfg: &SampleConfig) -> Vec<CheckReport> {
    let src = phi.source();
    let tgt = phi.target();
    let t = phi.group_iso();
    let n = cfg.samples;
    let mut s = cfg.sampler("lemmas");
    let ap = |f: &LipFn| phi.apply(f).expect("sample lives in the source context");
    let mut out = Vec::new();

    out.push(CheckReport::from_result(
        "carrier_isometry",
        1,
        match isometry_witness(t, src.metric(), tgt.metric()) {
            Ok(None) => Ok(()),
            Ok(Some((x, y))) => Err(json!({
                "x": x, "y": y,
                "source_distance": src.metric().d(x, y).to_string(),
                "target_distance": tgt.metric().d(t.apply(x), t.apply(y)).to_string(),
            })),
            Err(e) => Err(json!({"error": e.to_string()})),
        },
    ));

    let (es, et) = (delta_e(src), delta_e(tgt));
    out.push(CheckReport::from_result(
        "identity_preserved",
        1,
        if ap(&es) == et {
            Ok(())
        } else {
            Err(mismatch("Φ(δ_e)", &ap(&es), &et))
        },
    ));

    out.push(sampled("constants", n, |_| {
        let r = s.rational(0, 5);
        let got = ap(&LipFn::constant(src, r));
        let want = LipFn::constant(tgt, r);
        if got == want {
            Ok(())
        } else {
            Err(mismatch("Φ(r)", &got, &want))
        }
    }));

    out.push(sampled("inf_preservation", n, |_| {
        let f = s.lip1plus(src);
        let (a, b) = (ap(&f).min_value(), f.min_value());
        if a == b {
            Ok(())
        } else {
            Err(json!({"f": fn_json(&f), "min_phi_f": a.to_string(), "min_f": b.to_string()}))
        }
    }));

    out.push(sampled("delta_translation", n, |_| {
        let x = s.element(src.order());
        let r = s.rational(0, 5);
        let got = ap(&delta(src, x).unwrap().add_constant(r));
        let want = delta(tgt, t.apply(x)).unwrap().add_constant(r);
        if got == want {
            Ok(())
        } else {
            Err(mismatch("Φ(r+δ_x)", &got, &want))
        }
    }));

    out.push(sampled("translation", n, |_| {
        let f = s.lip1plus(src);
        let r = s.rational(0, 5);
        let got = ap(&f.add_constant(r));
        let want = ap(&f).add_constant(r);
        if got == want {
            Ok(())
        } else {
            Err(mismatch("Φ(f+r)", &got, &want))
        }
    }));

    out.push(sampled("order_equivalence", n, |i| {
        let f = s.lip1plus(src);
        // alternate comparable pairs with arbitrary ones so both sides of ⟺ get exercised
        let g = if i % 2 == 0 {
            f.pointwise_max(&s.lip1plus(src)).unwrap()
        } else {
            s.lip1plus(src)
        };
        for (a, b) in [(&f, &g), (&g, &f)] {
            if a.le(b).unwrap() != ap(a).le(&ap(b)).unwrap() {
                return Err(json!({"f": fn_json(a), "g": fn_json(b)}));
            }
        }
        Ok(())
    }));

    out.push(sampled("finite_min_commutation", n, |_| {
        let k = 1 + s.element(4);
        let family: Vec<LipFn> = (0..k).map(|_| s.lip1plus(src)).collect();
        let min_then = family
            .iter()
            .skip(1)
            .fold(family[0].clone(), |acc, f| acc.pointwise_min(f).unwrap());
        let images: Vec<LipFn> = family.iter().map(ap).collect();
        let then_min = images
            .iter()
            .skip(1)
            .fold(images[0].clone(), |acc, f| acc.pointwise_min(f).unwrap());
        let got = ap(&min_then);
        if got == then_min {
            Ok(())
        } else {
            Err(mismatch("Φ(min f_i)", &got, &then_min))
        }
    }));

    out.push(sampled("morphism", n, |_| {
        let (f, g) = (s.lip1plus(src), s.lip1plus(src));
        let got = ap(&inf_conv(&f, &g).unwrap());
        let want = inf_conv(&ap(&f), &ap(&g)).unwrap();
        if got == want {
            Ok(())
        } else {
            Err(mismatch("Φ(f⊕g)", &got, &want))
        }
    }));

    out.push(sampled("cone_preservation", n, |i| {
        let cone = ConeTag::ALL[i % ConeTag::ALL.len()];
        let f = s.in_cone(src, cone);
        let (a, b) = (classify(&f), classify(&ap(&f)));
        if a == b {
            Ok(())
        } else {
            Err(json!({"f": fn_json(&f), "source_tags": a, "target_tags": b}))
        }
    }));

    type Dist = fn(&LipFn, &LipFn) -> Result<Rational, LipError>;
    let metrics: [(&str, Dist); 3] = [
        ("isometry_rho", rho),
        ("isometry_d_inf", d_inf),
        ("isometry_theta_inf", theta_inf),
    ];
    for (name, dist) in metrics {
        out.push(sampled(name, n, |_| {
            let (f, g) = (s.lip1plus(src), s.lip1plus(src));
            let (a, b) = (dist(&f, &g).unwrap(), dist(&ap(&f), &ap(&g)).unwrap());
            if a == b {
                Ok(())
            } else {
                Err(json!({"f": fn_json(&f), "g": fn_json(&g), "before": a.to_string(), "after": b.to_string()}))
            }
        }));
    }
    out
}
