use std::path::{Path, PathBuf};
use std::sync::Arc;

use liptrop::banach_stone::decide_monoid_iso;
use liptrop::group::{enumerate_automorphisms, FiniteGroup, GroupFamily};
use liptrop::io::{load_context, load_function, load_group, GroupFile, IoError};
use liptrop::lip::{
    classify, inf_conv, lip_regularize, tau, units_of, ConeTag, Context, LipFn, UnitGroup,
};
use liptrop::rational::Rational;
use liptrop::report::{all_passed, Status};
use liptrop::rn_star::{membership, RnVector};
use liptrop::suite::{context_label, run_suite, Suite};
use serde_json::{json, Value};

use crate::{ContextArgs, Failure, FnCmd, GroupCmd, Output, RunConfig};

type Result<T> = std::result::Result<T, Failure>;

fn line(values: &[Rational]) -> String {
    values
        .iter()
        .map(Rational::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn map_line(map: &[usize]) -> String {
    map.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Invalid mathematical content exits 1; unreadable or malformed files exit 2.
fn load_failure(e: IoError) -> Failure {
    if e.is_invalid_structure() {
        Failure::invalid(e)
    } else {
        Failure::io(e)
    }
}

fn group_file(path: &Path, run: &RunConfig) -> Result<Arc<FiniteGroup>> {
    load_group(path, run.cap())
        .map(Arc::new)
        .map_err(load_failure)
}

pub fn group(cmd: GroupCmd, run: &RunConfig) -> Result<Output> {
    match cmd {
        GroupCmd::Validate { path } => validate(&path, run),
        GroupCmd::Autos { path } => {
            let g = group_file(&path, run)?;
            let autos = enumerate_automorphisms(&g, run.cap()).map_err(Failure::io)?;
            let maps: Vec<Vec<usize>> = autos.iter().map(|t| t.map().to_vec()).collect();
            let mut text = format!("{}: {} automorphisms\n", g.name(), maps.len());
            for m in &maps {
                text.push_str(&map_line(m));
                text.push('\n');
            }
            Ok(Output {
                text,
                json: json!({"group": g.name(), "count": maps.len(), "maps": maps}),
                code: 0,
            })
        }
        GroupCmd::Iso { left, right } => {
            let (g, h) = (group_file(&left, run)?, group_file(&right, run)?);
            let d = decide_monoid_iso(&g, &h, run.cap()).map_err(Failure::io)?;
            let witness = d.witness.as_ref().map(|t| t.map().to_vec());
            let mut text = format!("{} vs {}: verdict {}\n", g.name(), h.name(), d.verdict);
            if let Some(w) = &witness {
                text.push_str(&format!("witness: {}\n", map_line(w)));
            }
            if let Some(c) = &d.certificate {
                text.push_str(&format!(
                    "certificate: {}\n",
                    serde_json::to_string(c).expect("serializes")
                ));
            }
            Ok(Output {
                text,
                json: json!({
                    "left": g.name(),
                    "right": h.name(),
                    "verdict": d.verdict,
                    "witness": witness,
                    "certificate": d.certificate,
                }),
                code: if d.verdict { 0 } else { 1 },
            })
        }
        GroupCmd::Builtin { family } => {
            let fam = GroupFamily::parse(&family).map_err(Failure::io)?;
            let g = fam.build(run.cap()).map_err(Failure::io)?;
            let json = serde_json::to_value(GroupFile::from(&g)).expect("serializes");
            let text = serde_json::to_string(&json).expect("serializes");
            Ok(Output {
                text,
                json,
                code: 0,
            })
        }
    }
}

fn validate(path: &Path, run: &RunConfig) -> Result<Output> {
    match load_group(path, run.cap()) {
        Ok(g) => Ok(Output {
            text: format!(
                "{}: valid group of order {}, identity {}, {}\n",
                g.name(),
                g.order(),
                g.identity(),
                if g.is_abelian() {
                    "abelian"
                } else {
                    "nonabelian"
                }
            ),
            json: json!({
                "valid": true,
                "name": g.name(),
                "order": g.order(),
                "identity": g.identity(),
                "abelian": g.is_abelian(),
                "element_orders": g.element_orders(),
            }),
            code: 0,
        }),
        Err(e) if e.is_invalid_structure() => {
            let IoError::Group { source, .. } = &e else {
                unreachable!("group files only raise group errors")
            };
            Ok(Output {
                text: format!("{}: invalid: {source}\n", path.display()),
                json: json!({"valid": false, "error": format!("{source:?}"), "message": source.to_string()}),
                code: 1,
            })
        }
        Err(e) => Err(Failure::io(e)),
    }
}

fn context(args: &ContextArgs, run: &RunConfig) -> Result<Arc<Context>> {
    load_context(&args.context, args.weights.as_deref(), run.cap()).map_err(load_failure)
}

fn load_fn(path: &Path, ctx: &Arc<Context>) -> Result<LipFn> {
    load_function(path, ctx).map_err(Failure::io)
}

/// The `Mⁿ` membership tag, when the context is the discrete metric with identity at 0.
fn star_membership(f: &LipFn) -> Option<String> {
    let ctx = f.context();
    (ctx.metric().is_discrete() && ctx.group().identity() == 0)
        .then(|| membership(&RnVector(f.values().to_vec())).to_string())
}

fn with_membership(f: &LipFn, mut text: String, mut json: Value) -> (String, Value) {
    if let Some(m) = star_membership(f) {
        text.push_str(&format!("membership: {m}\n"));
        json["membership"] = json!(m);
    }
    (text, json)
}

pub fn function(cmd: FnCmd, run: &RunConfig) -> Result<Output> {
    match cmd {
        FnCmd::Conv { ctx, f, g } => {
            let c = context(&ctx, run)?;
            let (f, g) = (load_fn(&f, &c)?, load_fn(&g, &c)?);
            let h = inf_conv(&f, &g).map_err(Failure::invalid)?;
            let (text, json) = with_membership(
                &h,
                format!("{}\n", line(h.values())),
                json!({"values": h.values()}),
            );
            Ok(Output {
                text,
                json,
                code: 0,
            })
        }
        FnCmd::Units { ctx, cone } => {
            let c = context(&ctx, run)?;
            let tag = ConeTag::parse(&cone)
                .ok_or_else(|| Failure::io(anyhow::anyhow!("unknown cone `{cone}`")))?;
            let units = units_of(&c, tag).map_err(Failure::invalid)?;
            Ok(units_output(tag, &units))
        }
        FnCmd::Tau { ctx, f } => {
            let c = context(&ctx, run)?;
            let f = load_fn(&f, &c)?;
            let p = tau(&f).map_err(Failure::invalid)?;
            Ok(Output {
                text: format!("base: {}\noffset: {}\n", line(p.base.values()), p.offset),
                json: json!({"base": p.base.values(), "offset": p.offset}),
                code: 0,
            })
        }
        FnCmd::Classify { ctx, f } => {
            let c = context(&ctx, run)?;
            let f = load_fn(&f, &c)?;
            let tags: Vec<&str> = classify(&f).into_iter().map(ConeTag::as_str).collect();
            let (text, json) = with_membership(
                &f,
                format!("tags: {}\n", tags.join(" ")),
                json!({"tags": tags}),
            );
            Ok(Output {
                text,
                json,
                code: 0,
            })
        }
        FnCmd::Regularize { ctx, f } => {
            let c = context(&ctx, run)?;
            let f = load_fn(&f, &c)?;
            let r = lip_regularize(&f);
            let fixed = r == f;
            let (text, json) = with_membership(
                &r,
                format!("{}\nfixed: {fixed}\n", line(r.values())),
                json!({"values": r.values(), "fixed": fixed}),
            );
            Ok(Output {
                text,
                json,
                code: 0,
            })
        }
    }
}

fn units_output(tag: ConeTag, units: &UnitGroup) -> Output {
    let deltas: Vec<&[Rational]> = units.deltas().iter().map(LipFn::values).collect();
    let mut text = String::new();
    let json = match units {
        UnitGroup::Finite { .. } => {
            text.push_str(&format!("{tag}: {} units\n", deltas.len()));
            json!({"cone": tag, "kind": "finite", "count": deltas.len(), "units": deltas})
        }
        UnitGroup::Parametric { law, .. } => {
            text.push_str(&format!(
                "{tag}: r + δ_x for r rational and {} elements x\n",
                deltas.len()
            ));
            json!({
                "cone": tag,
                "kind": "parametric",
                "count": deltas.len(),
                "deltas": deltas,
                "law_witnesses": law.len(),
            })
        }
    };
    for d in &deltas {
        text.push_str(&line(d));
        text.push('\n');
    }
    Output {
        text,
        json,
        code: 0,
    }
}

pub fn verify(
    suite: &str,
    paths: &[PathBuf],
    weights: Option<&Path>,
    run: &RunConfig,
) -> Result<Output> {
    let s = Suite::parse(suite)
        .ok_or_else(|| Failure::io(anyhow::anyhow!("unknown suite `{suite}`")))?;
    let ctxs: Vec<Arc<Context>> = paths
        .iter()
        .map(|p| load_context(p, weights, run.cap()).map_err(Failure::io))
        .collect::<Result<_>>()?;
    let cfg = run.sampling();
    let reports = run_suite(s, &ctxs, &cfg, run.cap()).map_err(Failure::io)?;
    let passed = all_passed(&reports);
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let mut text = String::new();
    for r in &reports {
        let status = if r.status == Status::Pass {
            "pass"
        } else {
            "FAIL"
        };
        text.push_str(&format!("{status}  {} ({} samples)", r.check, r.samples));
        if let Some(w) = r.witness.as_ref().filter(|_| !r.passed()) {
            text.push_str(&format!("  {w}"));
        }
        text.push('\n');
    }
    text.push_str(&format!("{} checks, {failed} failed\n", reports.len()));
    let labels: Vec<String> = ctxs.iter().map(|c| context_label(c)).collect();
    Ok(Output {
        text,
        json: json!({
            "suite": s.as_str(),
            "seed": run.seed,
            "samples": run.samples,
            "contexts": labels,
            "passed": passed,
            "checks": reports,
        }),
        code: if passed { 0 } else { 1 },
    })
}
