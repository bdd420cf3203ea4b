//! Seeded sampling of exact rational test data.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lip::{self, Context, LipFn};
use crate::rational::Rational;

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_MAX_DENOMINATOR: i128 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub seed: u64,
    pub samples: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl SampleConfig {
    pub fn new(seed: u64, samples: usize) -> Self {
        SampleConfig { seed, samples }
    }

    /// A sampler whose stream depends only on the seed and `label`.
    pub fn sampler(&self, label: &str) -> Sampler {
        Sampler::new(self.seed ^ fnv1a(label))
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Rationals with denominators at most [`DEFAULT_MAX_DENOMINATOR`], and
/// functions drawn from each cone.
pub struct Sampler {
    rng: ChaCha8Rng,
    max_den: i128,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_den: DEFAULT_MAX_DENOMINATOR,
        }
    }

    /// Uniform over `{p/q : lo ≤ p/q ≤ hi, 1 ≤ q ≤ max_den}` by denominator then numerator.
    pub fn rational(&mut self, lo: i128, hi: i128) -> Rational {
        let den = self.rng.gen_range(1..=self.max_den);
        let num = self.rng.gen_range(lo * den..=hi * den);
        Rational::new(num, den)
    }

    pub fn element(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.rng.gen_range(0..=i);
            p.swap(i, j);
        }
        p
    }

    /// Arbitrary values in `[-3, 3]`: an element of `LIP`.
    pub fn lip_any(&mut self, ctx: &Arc<Context>) -> LipFn {
        let values = (0..ctx.order()).map(|_| self.rational(-3, 3)).collect();
        LipFn::new(ctx, values).expect("length matches")
    }

    /// Nonnegative and 1-Lipschitz: the regularization `δ_e ⊕ v` of a random
    /// nonnegative `v`, occasionally a raw constant.
    pub fn lip1plus(&mut self, ctx: &Arc<Context>) -> LipFn {
        let diam = ctx.metric().diameter();
        let span = (diam.numer() + diam.denom() - 1) / diam.denom();
        if self.rng.gen_ratio(1, 10) {
            let c = self.rational(0, 3);
            return LipFn::constant(ctx, c);
        }
        let values = (0..ctx.order())
            .map(|_| self.rational(0, span + 2))
            .collect();
        let raw = LipFn::new(ctx, values).expect("length matches");
        lip::lip_regularize(&raw)
    }

    /// 1-Lipschitz with minimum 0.
    pub fn lip10(&mut self, ctx: &Arc<Context>) -> LipFn {
        let f = self.lip1plus(ctx);
        let m = f.min_value();
        f.add_constant(-m)
    }

    /// 1-Lipschitz with an offset that may be negative.
    pub fn lip1(&mut self, ctx: &Arc<Context>) -> LipFn {
        let f = self.lip1plus(ctx);
        let r = self.rational(-3, 3);
        f.add_constant(r)
    }

    pub fn in_cone(&mut self, ctx: &Arc<Context>, cone: lip::ConeTag) -> LipFn {
        match cone {
            lip::ConeTag::Lip => self.lip_any(ctx),
            lip::ConeTag::Lip1 => self.lip1(ctx),
            lip::ConeTag::Lip1Plus => self.lip1plus(ctx),
            lip::ConeTag::Lip10 => self.lip10(ctx),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupFamily, OrderCap};
    use crate::lip::{in_cone, ConeTag};
    use crate::metric::{InvariantMetric, LengthWeights};
    use crate::rational::qi;

    #[test]
    fn samples_land_in_their_cones() {
        let g = Arc::new(GroupFamily::Cyclic(4).build(OrderCap::DEFAULT).unwrap());
        let w = LengthWeights::new().with(1, qi(1)).with(3, qi(1));
        let ctxs = [
            Context::discrete(g.clone()),
            Context::new(InvariantMetric::word(g, &w).unwrap()),
        ];
        let mut s = Sampler::new(3);
        for ctx in &ctxs {
            for cone in ConeTag::ALL {
                for _ in 0..200 {
                    assert!(in_cone(&s.in_cone(ctx, cone), cone));
                }
            }
        }
    }

    #[test]
    fn seeding_is_deterministic() {
        let cfg = SampleConfig::new(7, 10);
        let a: Vec<Rational> = (0..20).map(|_| cfg.sampler("x").rational(-2, 2)).collect();
        let b: Vec<Rational> = (0..20).map(|_| cfg.sampler("x").rational(-2, 2)).collect();
        assert_eq!(a, b);
        let mut s1 = cfg.sampler("x");
        let mut s2 = cfg.sampler("y");
        let a: Vec<Rational> = (0..20).map(|_| s1.rational(-2, 2)).collect();
        let b: Vec<Rational> = (0..20).map(|_| s2.rational(-2, 2)).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn denominators_are_bounded() {
        let mut s = Sampler::new(1);
        for _ in 0..500 {
            let r = s.rational(-1, 1);
            assert!(r.denom() <= DEFAULT_MAX_DENOMINATOR);
            assert!(r >= qi(-1) && r <= qi(1));
        }
    }
}
