//! Inf-convolution monoids of 1-Lipschitz functions over finite invariant
//! metric groups.
//!
//! Groups are dense Cayley tables ([`group`]), metrics are validated
//! bi-invariant distance matrices ([`metric`]), and functions are exact
//! rational vectors combined by the min-plus law
//! `(f ⊕ g)(k) = min_{i·j = k} f(i) + g(j)` ([`lip`]). On top of that sit the
//! plain-vector monoids `Mⁿ₊ ⊂ Mⁿ` ([`rn_star`]) and the composition
//! operators that realise every isometric monoid isomorphism
//! ([`banach_stone`]).

pub mod banach_stone;
pub mod group;
pub mod io;
pub mod lip;
pub mod metric;
pub mod rational;
pub mod report;
pub mod rn_star;
pub mod sample;
pub mod suite;

pub use banach_stone::{CompositionIso, IsoDecision};
pub use group::{FiniteGroup, GroupFamily, GroupIso, OrderCap};
pub use lip::{ConeTag, Context, LipFn};
pub use metric::{InvariantMetric, LengthWeights};
pub use rational::Rational;
