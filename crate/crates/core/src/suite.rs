//! Seeded property suites over one or more contexts, producing check reports.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::banach_stone::{
    check_group_closure, decide_monoid_iso, enumerate_isometric_monoid_isos, fn_json, is_m_group,
    verify_lemma_suite, verify_noniso_example, BanachStoneError, CompositionIso,
};
use crate::group::{enumerate_automorphisms, enumerate_isomorphisms, OrderCap};
use crate::lip::{
    self, cap_with, classify, d_inf, delta, delta_e, in_cone, inf_conv, is_unit, lip_regularize,
    osc, residual_inverse, rho, tau, tau_inv, theta_inf, units_of, ConeTag, Context, LipFn,
    UnitGroup,
};
use crate::metric::is_isometric_iso;
use crate::rational::Rational;
use crate::report::{sampled, CheckReport};
use crate::rn_star::{RnVector, StarContext};
use crate::sample::SampleConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Monoid,
    Units,
    BanachStone,
    Lemmas,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Some(Suite::All),
            "monoid" => Some(Suite::Monoid),
            "units" => Some(Suite::Units),
            "banachstone" | "banach-stone" | "banach_stone" => Some(Suite::BanachStone),
            "lemmas" => Some(Suite::Lemmas),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Monoid => "monoid",
            Suite::Units => "units",
            Suite::BanachStone => "banachstone",
            Suite::Lemmas => "lemmas",
        }
    }
}

/// Short label for report names, e.g. `Z4:disc` or `S3:metric`.
pub fn context_label(ctx: &Context) -> String {
    let kind = if ctx.metric().is_discrete() {
        "disc"
    } else {
        "metric"
    };
    format!("{}:{kind}", ctx.group().name())
}

fn fn_pair(f: &LipFn, g: &LipFn) -> Value {
    json!({"f": fn_json(f), "g": fn_json(g)})
}

fn is_delta_form(f: &LipFn) -> bool {
    let ctx = f.context();
    ctx.group().elements().any(|x| delta(ctx, x).unwrap() == *f)
}

fn is_shifted_delta_form(f: &LipFn) -> bool {
    is_delta_form(&f.add_constant(-f.min_value()))
}

/// Monoid laws, distances, and order lemmas on one context.
pub fn monoid_suite(ctx: &Arc<Context>, cfg: &SampleConfig) -> Vec<CheckReport> {
    let mut s = cfg.sampler("monoid");
    let n = cfg.samples;
    let g = ctx.group().clone();
    let e = delta_e(ctx);
    let conv = |a: &LipFn, b: &LipFn| inf_conv(a, b).unwrap();
    let mut out = Vec::new();

    for cone in ConeTag::ALL {
        out.push(sampled(&format!("associativity/{cone}"), n, |_| {
            let (a, b, c) = (
                s.in_cone(ctx, cone),
                s.in_cone(ctx, cone),
                s.in_cone(ctx, cone),
            );
            let l = conv(&conv(&a, &b), &c);
            let r = conv(&a, &conv(&b, &c));
            if l == r {
                Ok(())
            } else {
                Err(json!({"a": fn_json(&a), "b": fn_json(&b), "c": fn_json(&c)}))
            }
        }));
        if cone == ConeTag::Lip {
            continue;
        }
        out.push(sampled(&format!("identity/{cone}"), n, |_| {
            let f = s.in_cone(ctx, cone);
            if conv(&e, &f) == f && conv(&f, &e) == f {
                Ok(())
            } else {
                Err(fn_json(&f))
            }
        }));
        out.push(sampled(&format!("closure/{cone}"), n, |_| {
            let (a, b) = (s.in_cone(ctx, cone), s.in_cone(ctx, cone));
            if in_cone(&conv(&a, &b), cone) {
                Ok(())
            } else {
                Err(fn_pair(&a, &b))
            }
        }));
    }

    out.push(match g.commutativity_witness() {
        None => sampled("commutativity", n, |_| {
            let (a, b) = (s.lip_any(ctx), s.lip_any(ctx));
            if conv(&a, &b) == conv(&b, &a) {
                Ok(())
            } else {
                Err(fn_pair(&a, &b))
            }
        }),
        Some((x, y)) => {
            let (dx, dy) = (delta(ctx, x).unwrap(), delta(ctx, y).unwrap());
            let detail = json!({"x": x, "y": y, "f": fn_json(&dx), "g": fn_json(&dy)});
            if conv(&dx, &dy) != conv(&dy, &dx) {
                CheckReport::pass("noncommutativity_witness", 1).with_detail(detail)
            } else {
                CheckReport::fail("noncommutativity_witness", 1, detail)
            }
        }
    });

    let deltas: Vec<LipFn> = g.elements().map(|x| delta(ctx, x).unwrap()).collect();
    let law = (|| {
        for x in g.elements() {
            for y in g.elements() {
                if conv(&deltas[x], &deltas[y]) != deltas[g.mul(x, y)] {
                    return Err(json!({"x": x, "y": y}));
                }
            }
        }
        Ok(())
    })();
    out.push(CheckReport::from_result(
        "delta_group_law",
        g.order() * g.order(),
        law,
    ));

    out.push(sampled("inf_additivity", n, |_| {
        let (a, b) = (s.lip_any(ctx), s.lip_any(ctx));
        if conv(&a, &b).min_value() == a.min_value() + b.min_value() {
            Ok(())
        } else {
            Err(fn_pair(&a, &b))
        }
    }));

    out.push(sampled("rho_identity", n, |_| {
        let (a, b) = (s.lip_any(ctx), s.lip_any(ctx));
        let (r, d) = (rho(&a, &b).unwrap(), d_inf(&a, &b).unwrap());
        if r * (Rational::ONE + d) == d && r < Rational::ONE {
            Ok(())
        } else {
            Err(fn_pair(&a, &b))
        }
    }));

    out.push(sampled("theta_decomposition", n, |_| {
        let (a, b) = (s.lip1(ctx), s.lip1(ctx));
        let (ta, tb) = (tau(&a).unwrap(), tau(&b).unwrap());
        if theta_inf(&a, &b).unwrap() == ta.distance(&tb).unwrap() {
            Ok(())
        } else {
            Err(fn_pair(&a, &b))
        }
    }));

    out.push(sampled("monotonicity", n, |_| {
        let f = s.lip1plus(ctx);
        let gg = f.pointwise_max(&s.lip1plus(ctx)).unwrap();
        let h = s.lip1plus(ctx);
        if !conv(&h, &f).le(&conv(&h, &gg)).unwrap() {
            return Err(json!({"f": fn_json(&f), "g": fn_json(&gg), "h": fn_json(&h)}));
        }
        // converse through the cap family: with a ≥ every value, cap ⊕ f = f
        let b = s.lip1plus(ctx);
        let a = f.max_value().max(b.max_value());
        let cap = cap_with(ctx, a).unwrap();
        if conv(&cap, &f).le(&conv(&cap, &b)).unwrap() == f.le(&b).unwrap() {
            Ok(())
        } else {
            Err(json!({"f": fn_json(&f), "g": fn_json(&b), "cap": a.to_string()}))
        }
    }));

    out.push(sampled("cap_identity", n, |_| {
        let f = s.lip1plus(ctx);
        let x = s.element(ctx.order());
        let a = f.at(x) + s.rational(0, 3);
        let got = conv(&cap_with(ctx, a).unwrap(), &f).at(x);
        if got == f.at(x) {
            Ok(())
        } else {
            Err(json!({"f": fn_json(&f), "x": x, "a": a.to_string()}))
        }
    }));

    out.push(sampled("min_distributivity", n, |_| {
        let k = 1 + s.element(4);
        let fam: Vec<LipFn> = (0..k).map(|_| s.lip_any(ctx)).collect();
        let h = s.lip_any(ctx);
        let mn = fam
            .iter()
            .skip(1)
            .fold(fam[0].clone(), |a, f| a.pointwise_min(f).unwrap());
        let lhs = conv(&mn, &h);
        let rhs = fam
            .iter()
            .map(|f| conv(f, &h))
            .reduce(|a, b| a.pointwise_min(&b).unwrap())
            .unwrap();
        if lhs == rhs {
            Ok(())
        } else {
            Err(fn_json(&h))
        }
    }));

    out.push(sampled("regularization", n, |i| {
        let f = if i % 2 == 0 {
            s.lip1(ctx)
        } else {
            s.lip_any(ctx)
        };
        let r = lip_regularize(&f);
        let lip1 = in_cone(&f, ConeTag::Lip1);
        let ok = (r == f) == lip1 && in_cone(&r, ConeTag::Lip1) && r.le(&f).unwrap();
        if ok {
            Ok(())
        } else {
            Err(fn_json(&f))
        }
    }));

    out.push(sampled("residuation_super_solution", n, |_| {
        let f = s.lip_any(ctx);
        if e.le(&conv(&f, &residual_inverse(&f))).unwrap() {
            Ok(())
        } else {
            Err(fn_json(&f))
        }
    }));

    if ctx.metric().is_discrete() {
        out.push(sampled("osc_rule", n, |_| {
            let f = s.lip_any(ctx);
            if (osc(&f) <= Rational::ONE) == classify(&f).contains(&ConeTag::Lip1) {
                Ok(())
            } else {
                Err(fn_json(&f))
            }
        }));
    }
    out
}

/// Units of each cone, rejection of non-units, the τ decomposition, and the
/// plain-vector bridge when the identity sits at index 0.
pub fn units_suite(ctx: &Arc<Context>, cfg: &SampleConfig) -> Vec<CheckReport> {
    let mut s = cfg.sampler("units");
    let n = cfg.samples;
    let g = ctx.group().clone();
    let conv = |a: &LipFn, b: &LipFn| inf_conv(a, b).unwrap();
    let mut out = Vec::new();

    for cone in [ConeTag::Lip10, ConeTag::Lip1Plus] {
        let r = match units_of(ctx, cone) {
            Ok(UnitGroup::Finite { units }) => {
                let distinct: BTreeSet<Vec<Rational>> =
                    units.iter().map(|u| u.values().to_vec()).collect();
                let law = g.elements().all(|x| {
                    g.elements()
                        .all(|y| conv(&units[x], &units[y]) == units[g.mul(x, y)])
                });
                if units.len() == g.order() && distinct.len() == g.order() && law {
                    Ok(())
                } else {
                    Err(json!({"count": units.len(), "distinct": distinct.len(), "law": law}))
                }
            }
            Ok(other) => Err(json!({"unexpected": format!("{other:?}")})),
            Err(e) => Err(json!({"error": e.to_string()})),
        };
        out.push(CheckReport::from_result(
            format!("unit_group/{cone}"),
            g.order(),
            r,
        ));
        out.push(sampled(&format!("unit_oracle/{cone}"), n, |_| {
            let f = s.in_cone(ctx, cone);
            if is_unit(&f, cone).unwrap().is_some() == is_delta_form(&f) {
                Ok(())
            } else {
                Err(fn_json(&f))
            }
        }));
    }

    out.push(sampled("unit_family/LIP1", n, |_| {
        let x = s.element(g.order());
        let r = s.rational(-5, 5);
        let f = delta(ctx, x).unwrap().add_constant(r);
        let want = delta(ctx, g.inv(x)).unwrap().add_constant(-r);
        match is_unit(&f, ConeTag::Lip1).unwrap() {
            Some(inv) if inv == want => Ok(()),
            other => Err(json!({"f": fn_json(&f), "inverse": other.as_ref().map(fn_json)})),
        }
    }));
    out.push(sampled("unit_oracle/LIP1", n, |_| {
        let f = s.lip1(ctx);
        if is_unit(&f, ConeTag::Lip1).unwrap().is_some() == is_shifted_delta_form(&f) {
            Ok(())
        } else {
            Err(fn_json(&f))
        }
    }));
    out.push(CheckReport::from_result(
        "unit_group/LIP1",
        g.order() * g.order(),
        match units_of(ctx, ConeTag::Lip1) {
            Ok(UnitGroup::Parametric { law, .. }) if law.len() == g.order() * g.order() => Ok(()),
            Ok(other) => Err(json!({"unexpected": format!("{other:?}")})),
            Err(e) => Err(json!({"error": e.to_string()})),
        },
    ));

    out.push(sampled("tau_round_trip", n, |_| {
        let f = s.lip1(ctx);
        let t = tau(&f).unwrap();
        if tau_inv(&t) == f && in_cone(&t.base, ConeTag::Lip10) {
            Ok(())
        } else {
            Err(fn_json(&f))
        }
    }));
    out.push(sampled("tau_morphism", n, |_| {
        let (a, b) = (s.lip1(ctx), s.lip1(ctx));
        let lhs = tau(&conv(&a, &b)).unwrap();
        let rhs = tau(&a).unwrap().combine(&tau(&b).unwrap()).unwrap();
        if lhs == rhs {
            Ok(())
        } else {
            Err(fn_pair(&a, &b))
        }
    }));

    if ctx.metric().is_discrete() && g.identity() == 0 {
        let star = StarContext::new(g.clone()).expect("identity at 0");
        out.push(sampled("star_bridge", n, |_| {
            let (a, b) = (s.lip_any(ctx), s.lip_any(ctx));
            let (va, vb) = (RnVector(a.values().to_vec()), RnVector(b.values().to_vec()));
            if star.star(&va, &vb).unwrap().0 == conv(&a, &b).values() {
                Ok(())
            } else {
                Err(fn_pair(&a, &b))
            }
        }));
        let sub = star.maximal_subgroup_at_e();
        let mut law_samples = Vec::with_capacity(n);
        for _ in 0..n {
            let x = s.element(g.order());
            let y = s.element(g.order());
            law_samples.push((x, s.rational(-5, 5), y, s.rational(-5, 5)));
        }
        out.push(CheckReport::from_result(
            "maximal_subgroup_law",
            n,
            sub.verify_law(&law_samples).map_err(
                |(x, r, y, t)| json!({"x": x, "r": r.to_string(), "y": y, "s": t.to_string()}),
            ),
        ));
    }
    out
}

/// Is_m structure on one context, or enumeration/decision consistency on pairs.
pub fn banach_stone_suite(
    ctxs: &[Arc<Context>],
    cfg: &SampleConfig,
    cap: OrderCap,
) -> Result<Vec<CheckReport>, BanachStoneError> {
    let mut out = Vec::new();
    if let [ctx] = ctxs {
        let ism = is_m_group(ctx, cap)?;
        out.push(
            CheckReport::from_result("is_m_closure", ism.len(), check_group_closure(&ism))
                .with_detail(json!({"cardinality": ism.len()})),
        );
        let autos = enumerate_automorphisms(ctx.group(), cap)?;
        let isometric = autos
            .iter()
            .filter(|t| is_isometric_iso(t, ctx.metric(), ctx.metric()).unwrap())
            .count();
        let detail = json!({"is_m": ism.len(), "aut": autos.len(), "isometric_aut": isometric});
        let ok =
            ism.len() == isometric && (!ctx.metric().is_discrete() || ism.len() == autos.len());
        out.push(if ok {
            CheckReport::pass("is_m_cardinality", 1).with_detail(detail)
        } else {
            CheckReport::fail("is_m_cardinality", 1, detail)
        });
        out.extend(verify_noniso_example(ctx, cfg));
        return Ok(out);
    }
    for (i, x) in ctxs.iter().enumerate() {
        for y in &ctxs[i + 1..] {
            let scope = format!("{}->{}", context_label(x), context_label(y));
            let ops = enumerate_isometric_monoid_isos(x, y, cap)?;
            let group_isos = enumerate_isomorphisms(x.group(), y.group(), cap)?;
            let isometric = group_isos
                .iter()
                .filter(|t| is_isometric_iso(t, x.metric(), y.metric()).unwrap())
                .count();
            out.push(
                CheckReport::pass("enumeration", 1)
                    .with_detail(json!({"count": ops.len()}))
                    .scoped(&scope),
            );
            let consistency = if ops.len() == isometric {
                Ok(())
            } else {
                Err(json!({"monoid_isos": ops.len(), "isometric_group_isos": isometric}))
            };
            out.push(CheckReport::from_result("consistency", 1, consistency).scoped(&scope));
            let d = decide_monoid_iso(x.group(), y.group(), cap)?;
            let detail = json!({
                "verdict": d.verdict,
                "witness": d.witness.as_ref().map(|t| t.map().to_vec()),
                "certificate": d.certificate,
            });
            let agrees = d.verdict == !group_isos.is_empty()
                && (!(x.metric().is_discrete() && y.metric().is_discrete())
                    || d.verdict == !ops.is_empty());
            out.push(if agrees {
                CheckReport::pass("decision", 1)
                    .with_detail(detail)
                    .scoped(&scope)
            } else {
                CheckReport::fail("decision", 1, detail).scoped(&scope)
            });
        }
    }
    Ok(out)
}

/// The full lemma suite for every operator in Is_m of each context, and for
/// every enumerated operator between consecutive contexts.
pub fn lemmas_suite(
    ctxs: &[Arc<Context>],
    cfg: &SampleConfig,
    cap: OrderCap,
) -> Result<Vec<CheckReport>, BanachStoneError> {
    let mut out = Vec::new();
    let mut run = |phi: &CompositionIso, scope: String| {
        for r in verify_lemma_suite(phi, cfg) {
            out.push(r.scoped(&scope));
        }
    };
    for ctx in ctxs {
        for phi in is_m_group(ctx, cap)? {
            run(
                &phi,
                format!("{}/phi{:?}", context_label(ctx), phi.group_iso().map()),
            );
        }
    }
    for pair in ctxs.windows(2) {
        let label = format!("{}->{}", context_label(&pair[0]), context_label(&pair[1]));
        for phi in enumerate_isometric_monoid_isos(&pair[0], &pair[1], cap)? {
            run(&phi, format!("{label}/phi{:?}", phi.group_iso().map()));
        }
    }
    Ok(out)
}

/// Runs `suite` over `ctxs`. Single-context suites run once per context.
pub fn run_suite(
    suite: Suite,
    ctxs: &[Arc<Context>],
    cfg: &SampleConfig,
    cap: OrderCap,
) -> Result<Vec<CheckReport>, BanachStoneError> {
    let mut out = Vec::new();
    let per_ctx = |f: fn(&Arc<Context>, &SampleConfig) -> Vec<CheckReport>,
                   out: &mut Vec<CheckReport>| {
        for ctx in ctxs {
            let label = context_label(ctx);
            out.extend(f(ctx, cfg).into_iter().map(|r| r.scoped(&label)));
        }
    };
    let banach = |out: &mut Vec<CheckReport>| -> Result<(), BanachStoneError> {
        if ctxs.len() == 1 {
            let label = context_label(&ctxs[0]);
            out.extend(
                banach_stone_suite(ctxs, cfg, cap)?
                    .into_iter()
                    .map(|r| r.scoped(&label)),
            );
        } else {
            for ctx in ctxs {
                let label = context_label(ctx);
                out.extend(
                    banach_stone_suite(std::slice::from_ref(ctx), cfg, cap)?
                        .into_iter()
                        .map(|r| r.scoped(&label)),
                );
            }
            out.extend(banach_stone_suite(ctxs, cfg, cap)?);
        }
        Ok(())
    };
    match suite {
        Suite::Monoid => per_ctx(monoid_suite, &mut out),
        Suite::Units => per_ctx(units_suite, &mut out),
        Suite::BanachStone => banach(&mut out)?,
        Suite::Lemmas => out.extend(lemmas_suite(ctxs, cfg, cap)?),
        Suite::All => {
            per_ctx(monoid_suite, &mut out);
            per_ctx(units_suite, &mut out);
            banach(&mut out)?;
            out.extend(lemmas_suite(ctxs, cfg, cap)?);
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<Context>();
    check::<LipFn>();
    check::<lip::TauPair>();
    check::<CompositionIso>();
}
