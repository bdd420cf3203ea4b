//! Bi-invariant metrics on finite groups.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::Arc;

use crate::group::{FiniteGroup, GroupIso};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("matrix is {rows}x? but the group has order {order}")]
    DimensionMismatch { rows: usize, order: usize },
    #[error("d({0},{0}) is not zero")]
    NonZeroDiagonal(usize),
    #[error("d({0},{1}) is not positive")]
    NotPositive(usize, usize),
    #[error("d({0},{1}) != d({1},{0})")]
    NotSymmetric(usize, usize),
    #[error("triangle inequality fails: d({0},{2}) > d({0},{1}) + d({1},{2})")]
    TriangleViolated(usize, usize, usize),
    #[error("not bi-invariant at (x, y, z) = ({x}, {y}, {z})")]
    NotBiInvariant { x: usize, y: usize, z: usize },
    #[error("weighted set does not generate the group (element {0} unreachable)")]
    NotGenerating(usize),
    #[error("weights are not symmetric: weight({0}) != weight({0}^-1)")]
    NotSymmetricWeights(usize),
    #[error("weight of element {0} must be a positive rational")]
    NonPositiveWeight(usize),
    #[error("element {0} is not in the group")]
    InvalidElement(usize),
    #[error("isomorphism carriers do not match the metric groups")]
    CarrierMismatch,
}

/// Positive weights on a symmetric generating set, keyed by element index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LengthWeights(pub BTreeMap<usize, Rational>);

impl LengthWeights {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, element: usize, weight: Rational) -> Self {
        self.0.insert(element, weight);
        self
    }
}

impl FromIterator<(usize, Rational)> for LengthWeights {
    fn from_iter<I: IntoIterator<Item = (usize, Rational)>>(iter: I) -> Self {
        LengthWeights(iter.into_iter().collect())
    }
}

/// A validated bi-invariant metric: `d(xy, xz) = d(yx, zx) = d(y, z)`.
#[derive(Clone, PartialEq, Eq)]
pub struct InvariantMetric {
    group: Arc<FiniteGroup>,
    dist: Vec<Rational>,
}

impl std::fmt::Debug for InvariantMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InvariantMetric")
            .field("group", &self.group.name())
            .field("rows", &self.rows())
            .finish()
    }
}

impl InvariantMetric {
    /// Validates every metric axiom and bi-invariance exhaustively.
    pub fn new(group: Arc<FiniteGroup>, matrix: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let n = group.order();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(MetricError::DimensionMismatch {
                rows: matrix.len(),
                order: n,
            });
        }
        let dist: Vec<Rational> = matrix.into_iter().flatten().collect();
        let metric = InvariantMetric { group, dist };
        metric.validate()?;
        Ok(metric)
    }

    fn validate(&self) -> Result<(), MetricError> {
        let g = &*self.group;
        let n = g.order();
        for i in 0..n {
            if !self.d(i, i).is_zero() {
                return Err(MetricError::NonZeroDiagonal(i));
            }
            for j in 0..n {
                if i != j && self.d(i, j) <= Rational::ZERO {
                    return Err(MetricError::NotPositive(i, j));
                }
                if self.d(i, j) != self.d(j, i) {
                    return Err(MetricError::NotSymmetric(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.d(i, k) > self.d(i, j) + self.d(j, k) {
                        return Err(MetricError::TriangleViolated(i, j, k));
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let base = self.d(y, z);
                    if self.d(g.mul(x, y), g.mul(x, z)) != base
                        || self.d(g.mul(y, x), g.mul(z, x)) != base
                    {
                        return Err(MetricError::NotBiInvariant { x, y, z });
                    }
                }
            }
        }
        Ok(())
    }

    /// `0` on the diagonal, `1` elsewhere.
    pub fn discrete(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let dist = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    Rational::ZERO
                } else {
                    Rational::ONE
                }
            })
            .collect();
        let metric = InvariantMetric { group, dist };
        debug_assert!(metric.validate().is_ok());
        metric
    }

    /// Shortest weighted paths in the right Cayley graph: `d(x, y)` is the
    /// weighted length of `x⁻¹y`. Rejected when the result is not bi-invariant,
    /// which happens for weights that are not conjugation-invariant.
    pub fn word(group: Arc<FiniteGroup>, weights: &LengthWeights) -> Result<Self, MetricError> {
        let g = &*group;
        let n = g.order();
        for (&s, &w) in &weights.0 {
            if s >= n {
                return Err(MetricError::InvalidElement(s));
            }
            if w <= Rational::ZERO {
                return Err(MetricError::NonPositiveWeight(s));
            }
            if weights.0.get(&g.inv(s)) != Some(&w) {
                return Err(MetricError::NotSymmetricWeights(s));
            }
        }
        let lengths = shortest_lengths(g, weights);
        let mut dist = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let len = lengths[g.mul(g.inv(x), y)].ok_or(MetricError::NotGenerating(y))?;
                dist.push(len);
            }
        }
        let metric = InvariantMetric { group, dist };
        metric.validate()?;
        Ok(metric)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    #[inline]
    pub fn d(&self, x: usize, y: usize) -> Rational {
        self.dist[x * self.group.order() + y]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.dist
            .chunks(self.group.order())
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn is_discrete(&self) -> bool {
        *self == InvariantMetric::discrete(self.group.clone())
    }

    /// Largest distance between two elements.
    pub fn diameter(&self) -> Rational {
        self.dist.iter().copied().max().unwrap_or(Rational::ZERO)
    }
}

/// Dijkstra from the identity over edges `x → x·s` of cost `weight(s)`.
fn shortest_lengths(g: &FiniteGroup, weights: &LengthWeights) -> Vec<Option<Rational>> {
    let mut best: Vec<Option<Rational>> = vec![None; g.order()];
    let mut heap = BinaryHeap::new();
    best[g.identity()] = Some(Rational::ZERO);
    heap.push(Reverse((Rational::ZERO, g.identity())));
    while let Some(Reverse((len, x))) = heap.pop() {
        if best[x].is_some_and(|b| b < len) {
            continue;
        }
        for (&s, &w) in &weights.0 {
            let y = g.mul(x, s);
            let cand = len + w;
            if best[y].is_none_or(|b| cand < b) {
                best[y] = Some(cand);
                heap.push(Reverse((cand, y)));
            }
        }
    }
    best
}

/// True iff `dY(T(x), T(y)) = dX(x, y)` for all pairs.
pub fn is_isometric_iso(
    t: &GroupIso,
    dx: &InvariantMetric,
    dy: &InvariantMetric,
) -> Result<bool, MetricError> {
    Ok(isometry_witness(t, dx, dy)?.is_none())
}

/// First pair `(x, y)` whose distance `t` fails to preserve.
pub fn isometry_witness(
    t: &GroupIso,
    dx: &InvariantMetric,
    dy: &InvariantMetric,
) -> Result<Option<(usize, usize)>, MetricError> {
    if **t.source() != *dx.group || **t.target() != *dy.group {
        return Err(MetricError::CarrierMismatch);
    }
    let n = dx.group.order();
    for x in 0..n {
        for y in 0..n {
            if dy.d(t.apply(x), t.apply(y)) != dx.d(x, y) {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{enumerate_automorphisms, GroupFamily, OrderCap};
    use crate::rational::{q, qi};

    fn build(f: GroupFamily) -> Arc<FiniteGroup> {
        Arc::new(f.build(OrderCap::DEFAULT).unwrap())
    }

    fn z4_word() -> InvariantMetric {
        let w = LengthWeights::new().with(1, qi(1)).with(3, qi(1));
        InvariantMetric::word(build(GroupFamily::Cyclic(4)), &w).unwrap()
    }

    #[test]
    fn discrete_small_cases() {
        let z1 = InvariantMetric::discrete(build(GroupFamily::Cyclic(1)));
        assert_eq!(z1.rows(), vec![vec![qi(0)]]);
        let z2 = InvariantMetric::discrete(build(GroupFamily::Cyclic(2)));
        assert_eq!(z2.rows(), vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]]);
        let z3 = InvariantMetric::discrete(build(GroupFamily::Cyclic(3)));
        assert!(z3.validate().is_ok());
        assert!(z3.is_discrete());
    }

    #[test]
    fn z4_cycle_metric() {
        let m = z4_word();
        assert_eq!((m.d(0, 1), m.d(0, 2), m.d(0, 3)), (qi(1), qi(2), qi(1)));
        assert!(!m.is_discrete());
        assert_eq!(m.diameter(), qi(2));
    }

    #[test]
    fn z2_half_weight() {
        let w = LengthWeights::new().with(1, q(1, 2));
        let m = InvariantMetric::word(build(GroupFamily::Cyclic(2)), &w).unwrap();
        assert_eq!(m.rows(), vec![vec![qi(0), q(1, 2)], vec![q(1, 2), qi(0)]]);
    }

    #[test]
    fn s3_single_transposition_does_not_generate() {
        let s3 = build(GroupFamily::Symmetric(3));
        let t = (0..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let w = LengthWeights::new().with(t, qi(1));
        assert!(matches!(
            InvariantMetric::word(s3, &w),
            Err(MetricError::NotGenerating(_))
        ));
    }

    #[test]
    fn s3_two_transpositions_break_bi_invariance() {
        let s3 = build(GroupFamily::Symmetric(3));
        let ts: Vec<usize> = (0..6).filter(|&x| s3.element_order(x) == 2).collect();
        let w = LengthWeights::new().with(ts[0], qi(1)).with(ts[1], qi(1));
        assert!(matches!(
            InvariantMetric::word(s3, &w),
            Err(MetricError::NotBiInvariant { .. })
        ));
    }

    #[test]
    fn s3_all_transpositions_is_bi_invariant() {
        let s3 = build(GroupFamily::Symmetric(3));
        let w: LengthWeights = (0..6)
            .filter(|&x| s3.element_order(x) == 2)
            .map(|x| (x, qi(1)))
            .collect();
        let m = InvariantMetric::word(s3.clone(), &w).unwrap();
        for x in 0..6 {
            let expect = match s3.element_order(x) {
                1 => qi(0),
                2 => qi(1),
                _ => qi(2),
            };
            assert_eq!(m.d(s3.identity(), x), expect);
        }
    }

    #[test]
    fn weight_errors() {
        let z4 = build(GroupFamily::Cyclic(4));
        let w = LengthWeights::new().with(1, qi(1));
        assert_eq!(
            InvariantMetric::word(z4.clone(), &w).unwrap_err(),
            MetricError::NotSymmetricWeights(1)
        );
        let w = LengthWeights::new().with(2, qi(1));
        assert!(matches!(
            InvariantMetric::word(z4.clone(), &w).unwrap_err(),
            MetricError::NotGenerating(_)
        ));
        let w = LengthWeights::new().with(2, qi(0));
        assert_eq!(
            InvariantMetric::word(z4.clone(), &w).unwrap_err(),
            MetricError::NonPositiveWeight(2)
        );
        let w = LengthWeights::new().with(9, qi(1));
        assert_eq!(
            InvariantMetric::word(z4, &w).unwrap_err(),
            MetricError::InvalidElement(9)
        );
    }

    #[test]
    fn matrix_validation_errors() {
        let z2 = build(GroupFamily::Cyclic(2));
        let bad = |m: Vec<Vec<Rational>>| InvariantMetric::new(z2.clone(), m).unwrap_err();
        assert_eq!(
            bad(vec![vec![qi(1), qi(1)], vec![qi(1), qi(0)]]),
            MetricError::NonZeroDiagonal(0)
        );
        assert_eq!(
            bad(vec![vec![qi(0), qi(0)], vec![qi(0), qi(0)]]),
            MetricError::NotPositive(0, 1)
        );
        assert_eq!(
            bad(vec![vec![qi(0), qi(1)], vec![qi(2), qi(0)]]),
            MetricError::NotSymmetric(0, 1)
        );
        assert!(matches!(
            bad(vec![vec![qi(0)]]),
            MetricError::DimensionMismatch { .. }
        ));

        let z3 = build(GroupFamily::Cyclic(3));
        let tri = vec![
            vec![qi(0), qi(1), qi(3)],
            vec![qi(1), qi(0), qi(1)],
            vec![qi(3), qi(1), qi(0)],
        ];
        assert!(matches!(
            InvariantMetric::new(z3.clone(), tri).unwrap_err(),
            MetricError::TriangleViolated(..)
        ));
        // symmetric and triangle-valid, but not translation-invariant
        let skew = vec![
            vec![qi(0), qi(1), qi(1)],
            vec![qi(1), qi(0), q(3, 2)],
            vec![qi(1), q(3, 2), qi(0)],
        ];
        assert!(matches!(
            InvariantMetric::new(z3, skew).unwrap_err(),
            MetricError::NotBiInvariant { .. }
        ));
    }

    #[test]
    fn delta_compatibility() {
        for m in [
            z4_word(),
            InvariantMetric::discrete(build(GroupFamily::Symmetric(3))),
        ] {
            let g = m.group().clone();
            for x in g.elements() {
                for z in g.elements() {
                    assert_eq!(m.d(z, x), m.d(g.mul(z, g.inv(x)), g.identity()));
                }
            }
        }
    }

    #[test]
    fn isometry_checks() {
        let z4 = build(GroupFamily::Cyclic(4));
        let word = z4_word();
        let disc = InvariantMetric::discrete(z4.clone());
        for t in enumerate_automorphisms(&z4, OrderCap::DEFAULT).unwrap() {
            assert!(is_isometric_iso(&t, &disc, &disc).unwrap());
            assert!(is_isometric_iso(&t, &word, &word).unwrap());
        }
        let id = GroupIso::identity(z4.clone());
        assert_eq!(isometry_witness(&id, &word, &disc).unwrap(), Some((0, 2)));
        let z2 = InvariantMetric::discrete(build(GroupFamily::Cyclic(2)));
        assert_eq!(
            is_isometric_iso(&id, &z2, &disc),
            Err(MetricError::CarrierMismatch)
        );
    }
}
