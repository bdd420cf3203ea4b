//! JSON file formats for groups, metrics, weights, and functions.
//!
//! Errors name the offending file and, for decode failures, the field path.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::group::{FiniteGroup, GroupError, OrderCap};
use crate::lip::{Context, LipFn};
use crate::metric::{InvariantMetric, LengthWeights, MetricError};
use crate::rational::Rational;

/// `{"name": string, "order": n, "identity": int, "table": [[int, ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub name: String,
    pub order: usize,
    pub identity: usize,
    pub table: Vec<Vec<usize>>,
}

impl From<&FiniteGroup> for GroupFile {
    fn from(g: &FiniteGroup) -> Self {
        GroupFile {
            name: g.name().to_string(),
            order: g.order(),
            identity: g.identity(),
            table: g.rows(),
        }
    }
}

/// A group file name (resolved against the referring file) or an inline group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(String),
    Inline(GroupFile),
}

/// `{"group": <ref>, "matrix": [["0", "1", ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricFile {
    pub group: GroupRef,
    pub matrix: Vec<Vec<Rational>>,
}

/// `{"weights": {"<index>": "p/q", ...}}`, optionally with a `"group"` reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupRef>,
    pub weights: BTreeMap<String, Rational>,
}

/// `{"values": ["p/q", ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub values: Vec<Rational>,
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: at `{field}`: {message}")]
    Format {
        path: PathBuf,
        field: String,
        message: String,
    },
    #[error("{path}: at `{field}`: expected {expected} entries, found {found}")]
    Dimension {
        path: PathBuf,
        field: String,
        expected: usize,
        found: usize,
    },
    #[error("{path}: invalid group: {source}")]
    Group { path: PathBuf, source: GroupError },
    #[error("{path}: invalid metric: {source}")]
    Metric { path: PathBuf, source: MetricError },
    #[error("{path}: not a group, metric, or weights file (expected a `table`, `matrix`, or `weights` field)")]
    UnknownKind { path: PathBuf },
    #[error("{path}: weights file has no `group`; pass it together with a group file")]
    MissingGroup { path: PathBuf },
}

impl IoError {
    /// True for errors about the mathematical content rather than the file format.
    pub fn is_invalid_structure(&self) -> bool {
        matches!(
            self,
            IoError::Group { source, .. } if !matches!(source, GroupError::OrderTooLarge { .. })
        ) || matches!(self, IoError::Metric { .. })
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn decode<T: DeserializeOwned>(path: &Path, value: Value) -> Result<T, IoError> {
    serde_path_to_error::deserialize(value).map_err(|e| IoError::Format {
        path: path.to_path_buf(),
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn parse_json(path: &Path, text: &str) -> Result<Value, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Format {
        path: path.to_path_buf(),
        field: ".".into(),
        message: e.to_string(),
    })
}

/// Validates a decoded group file; `path` is used for diagnostics only.
pub fn group_from_file(
    path: &Path,
    file: &GroupFile,
    cap: OrderCap,
) -> Result<FiniteGroup, IoError> {
    if file.order != file.table.len() {
        return Err(IoError::Dimension {
            path: path.to_path_buf(),
            field: "table".into(),
            expected: file.order,
            found: file.table.len(),
        });
    }
    let gerr = |source| IoError::Group {
        path: path.to_path_buf(),
        source,
    };
    cap.check(file.order).map_err(gerr)?;
    FiniteGroup::from_table(file.name.clone(), &file.table, file.identity).map_err(gerr)
}

pub fn parse_group(path: &Path, text: &str, cap: OrderCap) -> Result<FiniteGroup, IoError> {
    let file: GroupFile = decode(path, parse_json(path, text)?)?;
    group_from_file(path, &file, cap)
}

pub fn load_group(path: &Path, cap: OrderCap) -> Result<FiniteGroup, IoError> {
    parse_group(path, &read(path)?, cap)
}

fn resolve_group(referrer: &Path, r: &GroupRef, cap: OrderCap) -> Result<FiniteGroup, IoError> {
    match r {
        GroupRef::Inline(file) => group_from_file(referrer, file, cap),
        GroupRef::Path(p) => {
            let base = referrer.parent().unwrap_or_else(|| Path::new("."));
            load_group(&base.join(p), cap)
        }
    }
}

fn weights_for(
    path: &Path,
    file: &WeightsFile,
    group: &FiniteGroup,
) -> Result<LengthWeights, IoError> {
    let mut w = LengthWeights::new();
    for (key, &value) in &file.weights {
        let idx: usize = key.trim().parse().map_err(|_| IoError::Format {
            path: path.to_path_buf(),
            field: format!("weights.{key}"),
            message: "keys must be element indices".into(),
        })?;
        if idx >= group.order() {
            return Err(IoError::Metric {
                path: path.to_path_buf(),
                source: MetricError::InvalidElement(idx),
            });
        }
        w = w.with(idx, value);
    }
    Ok(w)
}

fn metric_context(path: &Path, file: &MetricFile, cap: OrderCap) -> Result<Arc<Context>, IoError> {
    let group = Arc::new(resolve_group(path, &file.group, cap)?);
    let n = group.order();
    if file.matrix.len() != n {
        return Err(IoError::Dimension {
            path: path.to_path_buf(),
            field: "matrix".into(),
            expected: n,
            found: file.matrix.len(),
        });
    }
    if let Some((i, row)) = file.matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(IoError::Dimension {
            path: path.to_path_buf(),
            field: format!("matrix[{i}]"),
            expected: n,
            found: row.len(),
        });
    }
    let metric =
        InvariantMetric::new(group, file.matrix.clone()).map_err(|source| IoError::Metric {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(Context::new(metric))
}

fn word_context(
    path: &Path,
    file: &WeightsFile,
    group: Arc<FiniteGroup>,
) -> Result<Arc<Context>, IoError> {
    let w = weights_for(path, file, &group)?;
    let metric = InvariantMetric::word(group, &w).map_err(|source| IoError::Metric {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Context::new(metric))
}

pub fn load_weights(path: &Path) -> Result<WeightsFile, IoError> {
    decode(path, parse_json(path, &read(path)?)?)
}

/// Loads a context from a group file (discrete metric, or the word metric of
/// `weights` when given), a metric file, or a weights file carrying `"group"`.
pub fn load_context(
    path: &Path,
    weights: Option<&Path>,
    cap: OrderCap,
) -> Result<Arc<Context>, IoError> {
    let value = parse_json(path, &read(path)?)?;
    let has = |k: &str| value.get(k).is_some();
    if has("matrix") {
        let file: MetricFile = decode(path, value)?;
        return metric_context(path, &file, cap);
    }
    if has("table") {
        let file: GroupFile = decode(path, value)?;
        let group = Arc::new(group_from_file(path, &file, cap)?);
        return match weights {
            None => Ok(Context::discrete(group)),
            Some(wp) => word_context(wp, &load_weights(wp)?, group),
        };
    }
    if has("weights") {
        let file: WeightsFile = decode(path, value)?;
        let group_ref = file.group.clone().ok_or_else(|| IoError::MissingGroup {
            path: path.to_path_buf(),
        })?;
        let group = Arc::new(resolve_group(path, &group_ref, cap)?);
        return word_context(path, &file, group);
    }
    Err(IoError::UnknownKind {
        path: path.to_path_buf(),
    })
}

pub fn parse_function(path: &Path, text: &str, ctx: &Arc<Context>) -> Result<LipFn, IoError> {
    let file: FunctionFile = decode(path, parse_json(path, text)?)?;
    if file.values.len() != ctx.order() {
        return Err(IoError::Dimension {
            path: path.to_path_buf(),
            field: "values".into(),
            expected: ctx.order(),
            found: file.values.len(),
        });
    }
    Ok(LipFn::new(ctx, file.values).expect("length checked"))
}

pub fn load_function(path: &Path, ctx: &Arc<Context>) -> Result<LipFn, IoError> {
    parse_function(path, &read(path)?, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupFamily;
    use crate::rational::{q, qi};

    fn p() -> &'static Path {
        Path::new("mem.json")
    }

    #[test]
    fn group_round_trip() {
        let g = GroupFamily::Symmetric(3).build(OrderCap::DEFAULT).unwrap();
        let text = serde_json::to_string(&GroupFile::from(&g)).unwrap();
        let back = parse_group(p(), &text, OrderCap::DEFAULT).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.name(), "S3");
    }

    #[test]
    fn group_errors_name_fields() {
        let err = parse_group(
            p(),
            r#"{"name":"x","order":2,"identity":0,"table":[[0,1],[1,"a"]]}"#,
            OrderCap::DEFAULT,
        )
        .unwrap_err();
        match err {
            IoError::Format { field, .. } => assert_eq!(field, "table[1][1]"),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_group(
            p(),
            r#"{"name":"x","order":3,"identity":0,"table":[[0,1],[1,0]]}"#,
            OrderCap::DEFAULT,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            IoError::Dimension {
                expected: 3,
                found: 2,
                ..
            }
        ));
        let err = parse_group(
            p(),
            r#"{"name":"x","order":2,"identity":0,"table":[[0,1],[1,1]]}"#,
            OrderCap::DEFAULT,
        )
        .unwrap_err();
        assert!(err.is_invalid_structure());
        assert!(matches!(
            err,
            IoError::Group {
                source: GroupError::MissingInverse(1),
                ..
            }
        ));
        let err = parse_group(p(), "{", OrderCap::DEFAULT).unwrap_err();
        assert!(!err.is_invalid_structure());
        let big = GroupFamily::Cyclic(5).build(OrderCap::DEFAULT).unwrap();
        let text = serde_json::to_string(&GroupFile::from(&big)).unwrap();
        let err = parse_group(p(), &text, OrderCap(4)).unwrap_err();
        assert!(!err.is_invalid_structure());
    }

    #[test]
    fn contexts_from_files() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path();
        let g = GroupFamily::Cyclic(4).build(OrderCap::DEFAULT).unwrap();
        let gp = dir.join("z4.json");
        std::fs::write(&gp, serde_json::to_string(&GroupFile::from(&g)).unwrap()).unwrap();

        let ctx = load_context(&gp, None, OrderCap::DEFAULT).unwrap();
        assert!(ctx.metric().is_discrete());

        let wp = dir.join("w.json");
        std::fs::write(&wp, r#"{"weights": {"1": "1", "3": "1"}}"#).unwrap();
        let ctx = load_context(&gp, Some(&wp), OrderCap::DEFAULT).unwrap();
        assert_eq!(ctx.metric().d(0, 2), qi(2));

        let wg = dir.join("wg.json");
        std::fs::write(
            &wg,
            r#"{"group": "z4.json", "weights": {"1": "1/2", "3": "1/2"}}"#,
        )
        .unwrap();
        let ctx = load_context(&wg, None, OrderCap::DEFAULT).unwrap();
        assert_eq!(ctx.metric().d(0, 2), qi(1));

        let mp = dir.join("m.json");
        let rows: Vec<Vec<String>> = ctx
            .metric()
            .rows()
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        std::fs::write(
            &mp,
            serde_json::json!({"group": "z4.json", "matrix": rows}).to_string(),
        )
        .unwrap();
        let from_matrix = load_context(&mp, None, OrderCap::DEFAULT).unwrap();
        assert_eq!(from_matrix, ctx);

        let fp = dir.join("f.json");
        std::fs::write(&fp, r#"{"values": ["1/2", "0", "1", "3/2"]}"#).unwrap();
        let f = load_function(&fp, &ctx).unwrap();
        assert_eq!(f.values(), &[q(1, 2), qi(0), qi(1), q(3, 2)]);
        std::fs::write(&fp, r#"{"values": ["1/2"]}"#).unwrap();
        assert!(matches!(
            load_function(&fp, &ctx).unwrap_err(),
            IoError::Dimension { .. }
        ));

        let bad = dir.join("bad.json");
        std::fs::write(&bad, r#"{"group": "z4.json", "weights": {"1": "1"}}"#).unwrap();
        assert!(matches!(
            load_context(&bad, None, OrderCap::DEFAULT).unwrap_err(),
            IoError::Metric {
                source: MetricError::NotSymmetricWeights(1),
                ..
            }
        ));
        std::fs::write(&bad, r#"{"values": []}"#).unwrap();
        assert!(matches!(
            load_context(&bad, None, OrderCap::DEFAULT).unwrap_err(),
            IoError::UnknownKind { .. }
        ));
    }
}
