//! Fixtures and independent oracles shared by the integration tests.
//!
//! Nothing here calls the convolution kernel, the isomorphism search, or the
//! residuation code it is used to check.

#![allow(dead_code)]

use std::sync::Arc;

use itertools::Itertools;
use liptrop::group::{FiniteGroup, GroupFamily, OrderCap};
use liptrop::lip::Context;
use liptrop::metric::{InvariantMetric, LengthWeights};
use liptrop::rational::{q, qi, Rational};

pub fn group(spec: &str) -> Arc<FiniteGroup> {
    Arc::new(
        GroupFamily::parse(spec)
            .unwrap()
            .build(OrderCap::DEFAULT)
            .unwrap(),
    )
}

/// The reference set S = {Z1, Z2, Z3, Z4, Z6, Z2×Z2, S3, D4, Q8}.
pub fn reference_groups() -> Vec<Arc<FiniteGroup>> {
    ["z1", "z2", "z3", "z4", "z6", "klein4", "s3", "d4", "q8"]
        .into_iter()
        .map(group)
        .collect()
}

fn word(g: &Arc<FiniteGroup>, weights: LengthWeights) -> Arc<Context> {
    Context::new(InvariantMetric::word(g.clone(), &weights).unwrap())
}

/// Two word metrics on Z4 and two on S3.
pub fn word_metric_contexts() -> Vec<Arc<Context>> {
    let z4 = group("z4");
    let s3 = group("s3");
    let transpositions: Vec<usize> = s3
        .elements()
        .filter(|&x| s3.element_order(x) == 2)
        .collect();
    let three_cycles: Vec<usize> = s3
        .elements()
        .filter(|&x| s3.element_order(x) == 3)
        .collect();
    vec![
        word(&z4, LengthWeights::new().with(1, qi(1)).with(3, qi(1))),
        word(
            &z4,
            LengthWeights::new()
                .with(1, qi(1))
                .with(3, qi(1))
                .with(2, q(3, 2)),
        ),
        word(&s3, transpositions.iter().map(|&t| (t, qi(1))).collect()),
        word(
            &s3,
            transpositions
                .iter()
                .map(|&t| (t, qi(1)))
                .chain(three_cycles.iter().map(|&c| (c, q(1, 2))))
                .collect(),
        ),
    ]
}

pub fn discrete_contexts() -> Vec<Arc<Context>> {
    reference_groups()
        .into_iter()
        .map(Context::discrete)
        .collect()
}

/// Every context over S: discrete on each group plus the word metrics.
pub fn all_contexts() -> Vec<Arc<Context>> {
    let mut v = discrete_contexts();
    v.extend(word_metric_contexts());
    v
}

/// `out[k] = min_i f(i) + g(i⁻¹k)`, using a linear scan for the inverse.
pub fn brute_conv(g: &FiniteGroup, f: &[Rational], h: &[Rational]) -> Vec<Rational> {
    let n = g.order();
    let e = g.identity();
    let inverse = |i: usize| (0..n).find(|&j| g.mul(i, j) == e).unwrap();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let j = g.mul(inverse(i), k);
                    f[i] + h[j]
                })
                .min()
                .unwrap()
        })
        .collect()
}

/// All product-preserving bijections, by filtering the n! permutations.
pub fn brute_isomorphisms(g: &FiniteGroup, h: &FiniteGroup) -> Vec<Vec<usize>> {
    if g.order() != h.order() {
        return Vec::new();
    }
    let n = g.order();
    (0..n)
        .permutations(n)
        .filter(|p| (0..n).all(|a| (0..n).all(|b| p[g.mul(a, b)] == h.mul(p[a], p[b]))))
        .collect()
}

/// `|f(x) − f(y)| ≤ d(x, y)` for every pair.
pub fn brute_is_lip1(ctx: &Context, f: &[Rational]) -> bool {
    let n = ctx.order();
    (0..n).all(|x| (0..n).all(|y| (f[x] - f[y]).abs() <= ctx.metric().d(x, y)))
}

/// The distance column `z ↦ d(z, x)` from the raw matrix.
pub fn brute_delta(ctx: &Context, x: usize) -> Vec<Rational> {
    (0..ctx.order()).map(|z| ctx.metric().d(z, x)).collect()
}

/// Is `f` equal to `r + δ_x` for some element `x` and rational `r`?
pub fn brute_shifted_delta(ctx: &Context, f: &[Rational]) -> Option<(usize, Rational)> {
    (0..ctx.order()).find_map(|x| {
        let d = brute_delta(ctx, x);
        let r = f[x] - d[x];
        f.iter()
            .zip(&d)
            .all(|(&a, &b)| a == b + r)
            .then_some((x, r))
    })
}
