//! Operators on the truncated Fock space.
//!
//! Operators are built symbolically as [`OpExpr`] sums of creation and
//! annihilation monomials, or as custom [`FockMap`]s, and materialized into
//! block matrices ([`FockOperator`]) when norms, adjoints or dumps are needed.
//!
//! Truncation: a creation that would leave the space is dropped. Every map
//! declares its `peak`, the largest level it climbs above its source, and
//! identities are only asserted on source levels `<= depth - peak`.

mod cols;
mod elem;
mod expr;
mod modular;
mod norms;
mod operator;
mod wick;

pub use cols::{Cols, FockMap};
pub use elem::{Elem, ElemKind, OneParticleVector, Side};
pub use expr::{Monomial, OpExpr};
pub use modular::{delta_power, flip, modular_ops, ModularOps};
pub use norms::{frame_block, frame_matrix, frame_vector, min_singular, op_norm, spectrum, ComponentSpectrum};
pub use operator::{BlockRef, FockOperator, OperatorBlockDoc, OperatorDoc};
pub use wick::{wen_operator, wick, wick_by_subsets, wick_right, DEFAULT_WICK_CAP};

use crate::fock::{FockSpace, Letter};

/// `c(l)` materialized on the whole space.
pub fn creation(space: &FockSpace, v: &OneParticleVector) -> FockOperator {
    FockOperator::full(space, &OpExpr::creation(v, Side::Left))
}

pub fn annihilation(space: &FockSpace, v: &OneParticleVector) -> FockOperator {
    FockOperator::full(space, &OpExpr::annihilation(v, Side::Left))
}

pub fn right_creation(space: &FockSpace, v: &OneParticleVector) -> FockOperator {
    FockOperator::full(space, &OpExpr::creation(v, Side::Right))
}

pub fn right_annihilation(space: &FockSpace, v: &OneParticleVector) -> FockOperator {
    FockOperator::full(space, &OpExpr::annihilation(v, Side::Right))
}

pub fn field(space: &FockSpace, v: &OneParticleVector, side: Side) -> FockOperator {
    FockOperator::full(space, &OpExpr::field(v, side))
}

/// `c(l)` for a single letter as an expression.
pub fn c(l: Letter) -> OpExpr {
    OpExpr::elem(Elem::create(l))
}

/// `c(l)*` for a single letter as an expression.
pub fn c_star(l: Letter) -> OpExpr {
    OpExpr::elem(Elem::annihilate(l))
}
