//! Plain-vector view: `(ℚⁿ, ⋆_G)` and the monoids `Mⁿ₊ ⊂ Mⁿ`.
//!
//! A vector `x` is identified with the function `g_i ↦ x_i` on `G` under the
//! discrete metric, and `⋆_G` is the inf-convolution of [`crate::lip`]
//! evaluated by the same kernel.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::group::FiniteGroup;
use crate::lip::{self, ConeTag, Context, LipFn};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StarError {
    #[error("identity must sit at index 0, found it at {0}")]
    IdentityNotAtZero(usize),
    #[error("vector has length {found}, the group has order {expected}")]
    ContextMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RnVector(pub Vec<Rational>);

impl RnVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_constant(&self, r: Rational) -> RnVector {
        RnVector(self.0.iter().map(|&v| v + r).collect())
    }
}

impl From<Vec<Rational>> for RnVector {
    fn from(v: Vec<Rational>) -> Self {
        RnVector(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    #[serde(rename = "IN_MNPLUS")]
    InMnPlus,
    #[serde(rename = "IN_MN")]
    InMn,
    #[serde(rename = "NEITHER")]
    Neither,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::InMnPlus => "IN_MNPLUS",
            Membership::InMn => "IN_MN",
            Membership::Neither => "NEITHER",
        })
    }
}

/// `Mⁿ₊` requires nonnegative entries; both require `|x_i − x_j| ≤ 1`.
pub fn membership(x: &RnVector) -> Membership {
    let (Some(&lo), Some(&hi)) = (x.0.iter().min(), x.0.iter().max()) else {
        return Membership::Neither;
    };
    if hi - lo > Rational::ONE {
        Membership::Neither
    } else if lo >= Rational::ZERO {
        Membership::InMnPlus
    } else {
        Membership::InMn
    }
}

/// A group whose identity is `g_1`, stored at index 0.
#[derive(Debug, Clone)]
pub struct StarContext {
    ctx: Arc<Context>,
}

impl StarContext {
    /// Rejects groups whose identity is not at index 0; reordering is left to the caller.
    pub fn new(group: Arc<FiniteGroup>) -> Result<Self, StarError> {
        if group.identity() != 0 {
            return Err(StarError::IdentityNotAtZero(group.identity()));
        }
        Ok(StarContext {
            ctx: Context::discrete(group),
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.ctx.group()
    }

    /// The discrete-metric context behind the identification.
    pub fn lip_context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn dimension(&self) -> usize {
        self.ctx.order()
    }

    /// `e = (0, 1, …, 1)`.
    pub fn identity(&self) -> RnVector {
        let mut v = vec![Rational::ONE; self.dimension()];
        v[0] = Rational::ZERO;
        RnVector(v)
    }

    fn check(&self, x: &RnVector) -> Result<(), StarError> {
        if x.len() != self.dimension() {
            Err(StarError::ContextMismatch {
                expected: self.dimension(),
                found: x.len(),
            })
        } else {
            Ok(())
        }
    }

    /// `z_k = min { x_i + y_j : g_i·g_j = g_k }`.
    pub fn star(&self, x: &RnVector, y: &RnVector) -> Result<RnVector, StarError> {
        self.check(x)?;
        self.check(y)?;
        Ok(RnVector(lip::min_plus_convolve(self.group(), &x.0, &y.0)))
    }

    /// `i⁻¹`: the function on `(G, disc)` with these values.
    pub fn to_lip(&self, x: &RnVector) -> Result<LipFn, StarError> {
        self.check(x)?;
        Ok(LipFn::from_parts(&self.ctx, x.0.clone()))
    }

    /// `i`: the value vector of a function.
    pub fn from_lip(&self, f: &LipFn) -> RnVector {
        RnVector(f.values().to_vec())
    }

    pub fn maximal_subgroup_at_e(&self) -> MaximalSubgroup {
        let deltas = self
            .group()
            .elements()
            .map(|x| self.from_lip(&lip::delta(&self.ctx, x).expect("element in range")))
            .collect();
        MaximalSubgroup {
            star: self.clone(),
            deltas,
        }
    }
}

/// The maximal subgroup of `(ℚⁿ, ⋆_G)` at `e`: `{ r + δ_x : x ∈ G, r ∈ ℚ } ≅ G × ℚ`.
#[derive(Debug, Clone)]
pub struct MaximalSubgroup {
    star: StarContext,
    deltas: Vec<RnVector>,
}

impl MaximalSubgroup {
    pub fn deltas(&self) -> &[RnVector] {
        &self.deltas
    }

    /// The element `(x, r) ↦ r + δ_x`.
    pub fn element(&self, x: usize, r: Rational) -> RnVector {
        self.deltas[x].add_constant(r)
    }

    /// Recovers `(x, r)` from a member via the decomposition `v = min v + (v − min v)`.
    pub fn decompose(&self, v: &RnVector) -> Option<(usize, Rational)> {
        let r = *v.0.iter().min()?;
        let base = v.add_constant(-r);
        self.deltas.iter().position(|d| *d == base).map(|x| (x, r))
    }

    /// `v ∈ Mⁿ`, `v ⋆ e = v`, and `v` is a unit of `Mⁿ` by residuation.
    pub fn contains(&self, v: &RnVector) -> bool {
        if v.len() != self.star.dimension() || membership(v) == Membership::Neither {
            return false;
        }
        let e = self.star.identity();
        if self.star.star(v, &e).ok().as_ref() != Some(v) {
            return false;
        }
        let f = self.star.to_lip(v).expect("length checked");
        matches!(lip::is_unit(&f, ConeTag::Lip1), Ok(Some(_)))
    }

    /// Checks `(r + δ_x) ⋆ (s + δ_y) = (r + s) + δ_{xy}` and membership of
    /// both factors for each sample. Returns the first failing sample.
    pub fn verify_law(
        &self,
        samples: &[(usize, Rational, usize, Rational)],
    ) -> Result<(), (usize, Rational, usize, Rational)> {
        let g = self.star.group();
        for &(x, r, y, s) in samples {
            let a = self.element(x, r);
            let b = self.element(y, s);
            let ok = self.contains(&a)
                && self.contains(&b)
                && self.star.star(&a, &b).ok() == Some(self.element(g.mul(x, y), r + s));
            if !ok {
                return Err((x, r, y, s));
            }
        }
        Ok(())
    }
}
