//! Truncated q-deformed Araki-Woods Fock spaces.
//!
//! * [`qcomb`]: scalar q-combinatorics and the `d`/`C`/`D` constants.
//! * [`fock`]: word basis, block Gram matrices, vectors and inner products.
//! * [`ops`]: creation/annihilation, Wick and modular operators, q-adjoints and norms.
//! * [`limits`]: the operator sequences `T_n`, `S_n`, `z_n`, their limits and diagnostics.

pub mod error;
pub mod fock;
pub mod limits;
pub mod ops;
pub mod qcomb;

pub use error::{Error, Result};
pub use num_complex::Complex64;
