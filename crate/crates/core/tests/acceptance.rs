//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. All comparisons are exact.

mod common;

use std::collections::BTreeSet;
use std::error::Error;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use itertools::Itertools;
use liptrop::banach_stone::{
    check_group_closure, decide_monoid_iso, is_m_group, noniso_morphism_apply, noniso_preimage,
    verify_lemma_suite, verify_noniso_example,
};
use liptrop::group::{FiniteGroup, OrderCap};
use liptrop::lip::{
    cap_with, d_inf, delta, delta_e, in_cone, inf_conv, is_unit, lip_regularize, rho, tau, tau_inv,
    theta_inf, units_of, ConeTag, Context, LipFn, UnitGroup,
};
use liptrop::rational::{q, qi, Rational};
use liptrop::report::{all_passed, failures};
use liptrop::rn_star::{RnVector, StarContext};
use liptrop::sample::{SampleConfig, Sampler};
use liptrop::suite::context_label;

const SEED: u64 = 20_240_611;
const SAMPLES: usize = 1000;

type Outcome = Result<String, Box<dyn Error>>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+).into());
        }
    };
}

fn sampler(criterion: u8, ctx: &Context, tag: &str) -> Sampler {
    SampleConfig::new(SEED, SAMPLES).sampler(&format!("c{criterion}/{}/{tag}", context_label(ctx)))
}

fn label(ctx: &Context) -> String {
    context_label(ctx)
}

fn monoid_laws() -> Outcome {
    let start = Instant::now();
    let contexts = all_contexts();
    let mut triples = 0;
    let mut witnesses = 0;
    for ctx in &contexts {
        let e = delta_e(ctx);
        for cone in [
            ConeTag::Lip10,
            ConeTag::Lip1Plus,
            ConeTag::Lip1,
            ConeTag::Lip,
        ] {
            let mut s = sampler(1, ctx, cone.as_str());
            for _ in 0..SAMPLES {
                let (f, g, h) = (
                    s.in_cone(ctx, cone),
                    s.in_cone(ctx, cone),
                    s.in_cone(ctx, cone),
                );
                let left = inf_conv(&inf_conv(&f, &g)?, &h)?;
                let right = inf_conv(&f, &inf_conv(&g, &h)?)?;
                ensure!(
                    left == right,
                    "{} {cone}: associativity fails for {:?}",
                    label(ctx),
                    (f, g, h)
                );
                if cone != ConeTag::Lip {
                    ensure!(
                        inf_conv(&e, &f)? == f && inf_conv(&f, &e)? == f,
                        "{} {cone}: identity fails for {:?}",
                        label(ctx),
                        f
                    );
                }
                triples += 1;
            }
        }
        let g = ctx.group();
        let abelian = (0..g.order()).all(|a| (0..g.order()).all(|b| g.mul(a, b) == g.mul(b, a)));
        if abelian {
            let mut s = sampler(1, ctx, "commute");
            for _ in 0..SAMPLES {
                let (f, h) = (s.lip_any(ctx), s.lip_any(ctx));
                ensure!(
                    inf_conv(&f, &h)? == inf_conv(&h, &f)?,
                    "{}: abelian but ⊕ does not commute",
                    label(ctx)
                );
            }
        } else {
            let pair = g
                .elements()
                .cartesian_product(g.elements())
                .find(|&(x, y)| {
                    let (a, b) = (delta(ctx, x).unwrap(), delta(ctx, y).unwrap());
                    inf_conv(&a, &b).unwrap() != inf_conv(&b, &a).unwrap()
                });
            ensure!(
                pair.is_some(),
                "{}: nonabelian but no noncommuting pair",
                label(ctx)
            );
            witnesses += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(
        elapsed < Duration::from_secs(10),
        "runtime {elapsed:?} exceeds 10 s"
    );
    Ok(format!(
        "{} contexts, {triples} triples, {witnesses} noncommuting witnesses, {:.2} s",
        contexts.len(),
        elapsed.as_secs_f64()
    ))
}

fn delta_group_law() -> Outcome {
    let mut pairs = 0;
    for ctx in all_contexts() {
        let g = ctx.group();
        for (x, y) in g.elements().cartesian_product(g.elements()) {
            let product = inf_conv(&delta(&ctx, x)?, &delta(&ctx, y)?)?;
            ensure!(
                product.values() == brute_delta(&ctx, g.mul(x, y)).as_slice(),
                "{}: δ_{x} ⊕ δ_{y} ≠ δ_{}",
                label(&ctx),
                g.mul(x, y)
            );
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs"))
}

/// `δ_x` under the discrete metric, written out directly.
fn discrete_delta(n: usize, x: usize) -> Vec<Rational> {
    (0..n)
        .map(|z| {
            if z == x {
                Rational::ZERO
            } else {
                Rational::ONE
            }
        })
        .collect()
}

fn units_of_mn_plus() -> Outcome {
    let grid = [qi(0), q(1, 2), qi(1)];
    let mut summary = Vec::new();
    for ctx in discrete_contexts() {
        let g = ctx.group();
        let n = g.order();
        let mut found: Vec<Vec<Rational>> = Vec::new();
        for values in (0..n).map(|_| grid).multi_cartesian_product() {
            let f = LipFn::new(&ctx, values)?;
            ensure!(
                in_cone(&f, ConeTag::Lip1Plus),
                "{}: grid point outside Lip¹₊",
                label(&ctx)
            );
            if is_unit(&f, ConeTag::Lip1Plus)?.is_some() {
                found.push(f.values().to_vec());
            }
        }
        let expected: BTreeSet<Vec<Rational>> = (0..n).map(|x| discrete_delta(n, x)).collect();
        let found_set: BTreeSet<Vec<Rational>> = found.iter().cloned().collect();
        ensure!(
            found.len() == n,
            "{}: {} units, expected {n}",
            label(&ctx),
            found.len()
        );
        ensure!(
            found_set == expected,
            "{}: units are not the δ_x",
            label(&ctx)
        );

        let UnitGroup::Finite { units } = units_of(&ctx, ConeTag::Lip1Plus)? else {
            return Err("Lip¹₊ units are not finite".into());
        };
        // x ↦ δ_x is a bijection onto the units that carries products to ⊕.
        for (x, u) in units.iter().enumerate() {
            ensure!(
                u.values() == discrete_delta(n, x).as_slice(),
                "{}: unit {x} is not δ_{x}",
                label(&ctx)
            );
        }
        for (x, y) in g.elements().cartesian_product(g.elements()) {
            let product = inf_conv(&units[x], &units[y])?;
            ensure!(
                product == units[g.mul(x, y)],
                "{}: x ↦ δ_x not a homomorphism at ({x},{y})",
                label(&ctx)
            );
        }
        summary.push(format!("{}={}", g.name(), n));
    }
    Ok(format!(
        "grid {{0,1/2,1}}^n, unit counts {}",
        summary.join(" ")
    ))
}

fn units_of_mn() -> Outcome {
    let mut accepted = 0;
    let mut rejected = 0;
    let mut tau_checked = 0;
    for ctx in all_contexts() {
        let g = ctx.group();
        let n = g.order();
        let mut s = sampler(4, &ctx, "units");
        for _ in 0..200 {
            let x = s.element(n);
            let r = s.rational(-3, 3);
            let f = delta(&ctx, x)?.add_constant(r);
            let inv = is_unit(&f, ConeTag::Lip1)?;
            let expected: Vec<Rational> = brute_delta(&ctx, g.inv(x))
                .into_iter()
                .map(|v| v - r)
                .collect();
            ensure!(
                inv.as_ref().map(LipFn::values) == Some(expected.as_slice()),
                "{}: inverse of {r} + δ_{x} is not {} + δ_{}",
                label(&ctx),
                -r,
                g.inv(x)
            );
            accepted += 1;
        }
        if n > 1 {
            let mut s = sampler(4, &ctx, "nonunits");
            let mut done = 0;
            while done < 200 {
                let f = if s.coin() {
                    // Lower one value of r + δ_x and take the 1-Lipschitz minorant.
                    let x = s.element(n);
                    let z = (x + 1 + s.element(n - 1)) % n;
                    let r = s.rational(-3, 3);
                    let t = Rational::new(1 + s.element(15) as i128, 16);
                    let mut v = brute_delta(&ctx, x)
                        .into_iter()
                        .map(|v| v + r)
                        .collect::<Vec<_>>();
                    v[z] -= t * ctx.metric().d(z, x);
                    lip_regularize(&LipFn::new(&ctx, v)?)
                } else {
                    s.lip1(&ctx)
                };
                if !brute_is_lip1(&ctx, f.values())
                    || brute_shifted_delta(&ctx, f.values()).is_some()
                {
                    continue;
                }
                ensure!(
                    is_unit(&f, ConeTag::Lip1)?.is_none(),
                    "{}: non-member {:?} accepted",
                    label(&ctx),
                    f
                );
                done += 1;
                rejected += 1;
            }
        }
        let mut s = sampler(4, &ctx, "tau");
        for _ in 0..SAMPLES {
            let (f, h) = (s.lip1(&ctx), s.lip1(&ctx));
            let (tf, th) = (tau(&f)?, tau(&h)?);
            ensure!(tau_inv(&tf) == f, "{}: τ does not round-trip", label(&ctx));
            ensure!(
                tf.base.min_value() == Rational::ZERO,
                "{}: τ base not in Lip¹₀",
                label(&ctx)
            );
            ensure!(
                tau(&inf_conv(&f, &h)?)? == tf.combine(&th)?,
                "{}: τ not a morphism",
                label(&ctx)
            );
            tau_checked += 1;
        }
    }
    Ok(format!(
        "{accepted} units accepted, {rejected} non-members rejected, {tau_checked} τ pairs"
    ))
}

fn brute_isometric_automorphisms(ctx: &Context) -> usize {
    let g = ctx.group();
    let n = g.order();
    brute_isomorphisms(g, g)
        .into_iter()
        .filter(|p| {
            (0..n).all(|x| (0..n).all(|y| ctx.metric().d(p[x], p[y]) == ctx.metric().d(x, y)))
        })
        .count()
}

fn is_m_cardinalities() -> Outcome {
    let pinned = [("Z4", 2), ("Z2xZ2", 6), ("S3", 6), ("Q8", 24)];
    let mut summary = Vec::new();
    for ctx in all_contexts() {
        let g = ctx.group();
        let ops = is_m_group(&ctx, OrderCap::DEFAULT)?;
        let oracle = brute_isometric_automorphisms(&ctx);
        ensure!(
            ops.len() == oracle,
            "{}: |Is_m| = {}, oracle {oracle}",
            label(&ctx),
            ops.len()
        );
        if ctx.metric().is_discrete() {
            ensure!(
                oracle == brute_isomorphisms(g, g).len(),
                "{}: discrete Is_m differs from Aut",
                label(&ctx)
            );
            if let Some(&(_, want)) = pinned.iter().find(|(name, _)| *name == g.name()) {
                ensure!(
                    ops.len() == want,
                    "{}: |Is_m| = {}, expected {want}",
                    label(&ctx),
                    ops.len()
                );
            }
        }
        if let Err(w) = check_group_closure(&ops) {
            return Err(format!("{}: Is_m not closed: {w}", label(&ctx)).into());
        }
        summary.push(format!("{}={}", label(&ctx), ops.len()));
    }
    Ok(summary.join(" "))
}

fn is_group_iso(g: &FiniteGroup, h: &FiniteGroup, map: &[usize]) -> bool {
    let n = g.order();
    map.iter().copied().collect::<BTreeSet<_>>().len() == n
        && (0..n).all(|a| (0..n).all(|b| map[g.mul(a, b)] == h.mul(map[a], map[b])))
}

fn banach_stone_decision() -> Outcome {
    let cap = OrderCap::DEFAULT;
    for (a, b) in [("z4", "klein4"), ("s3", "z6")] {
        let d = decide_monoid_iso(&group(a), &group(b), cap)?;
        ensure!(
            !d.verdict && d.witness.is_none(),
            "{a} vs {b}: decided isomorphic"
        );
    }
    let cfg = SampleConfig::new(SEED, SAMPLES);
    let mut lemma_checks = 0;
    for g in reference_groups() {
        let mut s = SampleConfig::new(SEED, SAMPLES).sampler(&format!("c6/{}", g.name()));
        let copy = Arc::new(g.relabel(&s.permutation(g.order()))?);
        let d = decide_monoid_iso(&g, &copy, cap)?;
        ensure!(
            d.verdict,
            "{}: not isomorphic to its relabeled copy",
            g.name()
        );
        let Some(t) = d.witness else {
            return Err(format!("{}: positive verdict without witness", g.name()).into());
        };
        ensure!(
            is_group_iso(&g, &copy, t.map()),
            "{}: witness {:?} is not an isomorphism",
            g.name(),
            t.map()
        );
        let Some(op) = d.operator else {
            return Err(format!("{}: positive verdict without Φ_T", g.name()).into());
        };
        let reports = verify_lemma_suite(&op, &cfg);
        if !all_passed(&reports) {
            let bad: Vec<String> = failures(&reports).map(|r| r.check.clone()).collect();
            return Err(format!("{}: lemma failures {bad:?}", g.name()).into());
        }
        for name in [
            "constants",
            "inf_preservation",
            "order_equivalence",
            "translation",
            "finite_min_commutation",
            "isometry_rho",
            "isometry_d_inf",
            "isometry_theta_inf",
        ] {
            ensure!(
                reports.iter().any(|r| r.check == name),
                "lemma suite lacks {name}"
            );
        }
        lemma_checks += reports.len();
    }
    Ok(format!(
        "2 negative pairs, 9 relabeled copies, {lemma_checks} lemma checks at {SAMPLES} samples"
    ))
}

fn cap_identity() -> Outcome {
    let mut count = 0;
    for ctx in all_contexts() {
        let mut s = sampler(7, &ctx, "cap");
        for _ in 0..SAMPLES {
            let f = s.lip1plus(&ctx);
            let x = s.element(ctx.order());
            let a = f.at(x) + s.rational(0, 3);
            let capped = inf_conv(&cap_with(&ctx, a)?, &f)?;
            ensure!(
                capped.at(x) == f.at(x),
                "{}: cap identity fails at x={x}, a={a}",
                label(&ctx)
            );
            count += 1;
        }
    }
    Ok(format!("{count} triples"))
}

fn metric_identities() -> Outcome {
    let mut count = 0;
    for ctx in all_contexts() {
        let mut s = sampler(8, &ctx, "metric");
        for _ in 0..SAMPLES {
            let (f, h) = (s.lip_any(&ctx), s.lip_any(&ctx));
            let d = d_inf(&f, &h)?;
            ensure!(
                rho(&f, &h)? * (Rational::ONE + d) == d,
                "{}: ρ·(1+d∞) ≠ d∞",
                label(&ctx)
            );
            let (mf, mh) = (f.min_value(), h.min_value());
            let shifted = f
                .values()
                .iter()
                .zip(h.values())
                .map(|(&a, &b)| ((a - mf) - (b - mh)).abs())
                .max()
                .unwrap();
            let (lf, lh) = (s.lip1(&ctx), s.lip1(&ctx));
            let decomposition = tau(&lf)?.distance(&tau(&lh)?)?;
            ensure!(
                theta_inf(&f, &h)? == shifted + (mf - mh).abs(),
                "{}: θ∞ decomposition",
                label(&ctx)
            );
            ensure!(
                theta_inf(&lf, &lh)? == decomposition,
                "{}: θ∞ differs from τ distance",
                label(&ctx)
            );
            let m = inf_conv(&f, &h)?.min_value();
            ensure!(m == mf + mh, "{}: min(f⊕g) ≠ min f + min g", label(&ctx));
            count += 1;
        }
    }
    Ok(format!("{count} pairs"))
}

fn non_isometric_iso() -> Outcome {
    let cfg = SampleConfig::new(SEED, SAMPLES);
    let mut count = 0;
    for ctx in all_contexts() {
        let reports = verify_noniso_example(&ctx, &cfg);
        if !all_passed(&reports) {
            let bad: Vec<String> = failures(&reports).map(|r| r.check.clone()).collect();
            return Err(format!("{}: {bad:?}", label(&ctx)).into());
        }
        let mut s = sampler(9, &ctx, "noniso");
        for _ in 0..SAMPLES {
            let (f, h) = (s.lip1plus(&ctx), s.lip1plus(&ctx));
            let phi = |u: &LipFn| u.add_constant(u.min_value());
            ensure!(
                noniso_morphism_apply(&f)? == phi(&f),
                "{}: Φ(f) ≠ f + min f",
                label(&ctx)
            );
            ensure!(
                phi(&inf_conv(&f, &h)?) == inf_conv(&phi(&f), &phi(&h))?,
                "{}: Φ not a morphism",
                label(&ctx)
            );
            let above = f.pointwise_max(&h)?;
            ensure!(
                phi(&f).le(&phi(&above))?,
                "{}: Φ not order-preserving",
                label(&ctx)
            );
            ensure!(
                phi(&noniso_preimage(&f)?) == f,
                "{}: Φ not surjective at {:?}",
                label(&ctx),
                f
            );
            ensure!(
                noniso_preimage(&phi(&f))? == f,
                "{}: Φ not injective at {:?}",
                label(&ctx),
                f
            );
            count += 1;
        }
        let (one, zero) = (LipFn::constant(&ctx, qi(1)), LipFn::constant(&ctx, qi(0)));
        let before = rho(&one, &zero)?;
        let after = rho(
            &noniso_morphism_apply(&one)?,
            &noniso_morphism_apply(&zero)?,
        )?;
        ensure!(
            before == q(1, 2) && after == q(2, 3),
            "{}: ρ values {before}, {after}",
            label(&ctx)
        );
    }
    Ok(format!(
        "{count} samples, ρ(1,0) = 1/2 maps to ρ(2,0) = 2/3"
    ))
}

fn regularization_fixed_point() -> Outcome {
    let (mut fixed, mut moved) = (0, 0);
    for ctx in all_contexts() {
        let mut s = sampler(10, &ctx, "regularize");
        for _ in 0..SAMPLES {
            let f = if s.coin() {
                s.lip1(&ctx)
            } else {
                s.lip_any(&ctx)
            };
            let out = lip_regularize(&f);
            let lip = brute_is_lip1(&ctx, f.values());
            ensure!(
                (out == f) == lip,
                "{}: fixed point ≠ Lip¹ membership for {:?}",
                label(&ctx),
                f
            );
            if lip {
                fixed += 1;
            } else {
                ensure!(
                    brute_is_lip1(&ctx, out.values()),
                    "{}: output not in Lip¹",
                    label(&ctx)
                );
                ensure!(out.le(&f)?, "{}: output not below input", label(&ctx));
                moved += 1;
            }
        }
    }
    ensure!(
        fixed > 0 && moved > 0,
        "sampling missed a branch ({fixed} fixed, {moved} moved)"
    );
    Ok(format!("{fixed} fixed points, {moved} regularized"))
}

fn kernel_bridge() -> Outcome {
    let mut count = 0;
    let mut negatives = 0;
    for g in reference_groups() {
        let star = StarContext::new(g.clone())?;
        let ctx = star.lip_context().clone();
        let mut s = SampleConfig::new(SEED, SAMPLES).sampler(&format!("c11/{}", g.name()));
        for _ in 0..SAMPLES {
            let x = RnVector((0..g.order()).map(|_| s.rational(-3, 3)).collect());
            let y = RnVector((0..g.order()).map(|_| s.rational(-3, 3)).collect());
            negatives += x.0.iter().chain(&y.0).filter(|v| v.is_negative()).count();
            let starred = star.star(&x, &y)?;
            let convolved = inf_conv(&star.to_lip(&x)?, &star.to_lip(&y)?)?;
            ensure!(
                starred == star.from_lip(&convolved),
                "{}: ⋆ and ⊕ disagree",
                g.name()
            );
            ensure!(
                starred.0 == brute_conv(&g, &x.0, &y.0),
                "{}: ⋆ disagrees with brute force",
                g.name()
            );
            ensure!(
                Arc::ptr_eq(convolved.context(), &ctx),
                "{}: context changed",
                g.name()
            );
            count += 1;
        }
    }
    ensure!(negatives > 0, "no negative entries were sampled");
    Ok(format!(
        "{count} vector pairs, {negatives} negative entries"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("monoid laws", monoid_laws),
        ("δ-group law", delta_group_law),
        ("units of Mⁿ₊", units_of_mn_plus),
        ("units of Mⁿ and τ", units_of_mn),
        ("Is_m cardinalities", is_m_cardinalities),
        ("isomorphism decision", banach_stone_decision),
        ("cap identity", cap_identity),
        ("metric identities", metric_identities),
        ("non-isometric isomorphism", non_isometric_iso),
        ("regularization fixed point", regularization_fixed_point),
        ("kernel bridge", kernel_bridge),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(outcome) => outcome,
            Err(_) => Err("panicked".into()),
        };
        match outcome {
            Ok(detail) => println!("PASS  {:>2}  {name}: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {e}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
