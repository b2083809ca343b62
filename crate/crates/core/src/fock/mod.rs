//! The truncated q-Fock space: word basis, block-diagonal Gram matrices of
//! the q-inner product, norms and per-block orthonormal frames.
//!
//! Letters are mutually orthogonal for `<., .>_U`, so two words can only
//! have a nonzero q-inner product when they are permutations of each other.
//! The Gram matrix therefore splits into blocks indexed by the letter
//! multiset ([`Signature`]); each block is the q-only Gram of the
//! corresponding unit-norm letters times the product of the letter norms.

mod basis;
mod gram;
mod space;
mod vector;
mod word;

pub use basis::{Basis, Block, BlockId};
pub use gram::{gram_brute_force, GramCache, GramFactor, CONDITION_LIMIT, CONDITION_WARNING};
pub use space::{FockSpace, GramBlockDoc, GramDoc, SpaceLimits};
pub use vector::{FockVector, LevelDoc, TermDoc, VectorDoc};
pub use word::{Letter, Signature, Word, MAX_AUX, MAX_WORD_LEN};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcomb::check_q;

/// Hard upper bound on the truncation depth.
pub const MAX_DEPTH: usize = MAX_WORD_LEN - 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub q: f64,
    pub lambda: f64,
    pub aux_letters: u8,
    pub depth: usize,
}

impl ModelParams {
    pub fn new(q: f64, lambda: f64, aux_letters: u8, depth: usize) -> Result<Self> {
        check_q(q)?;
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Parameter(format!("lambda = {lambda} is outside (0, 1)")));
        }
        if aux_letters > MAX_AUX {
            return Err(Error::Parameter(format!(
                "{aux_letters} auxiliary letters, at most {MAX_AUX} supported"
            )));
        }
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::Parameter(format!("depth {depth} is outside 1..={MAX_DEPTH}")));
        }
        Ok(Self {
            q,
            lambda,
            aux_letters,
            depth,
        })
    }

    pub fn alphabet(&self) -> Vec<Letter> {
        let mut letters = vec![Letter::E, Letter::EBar];
        letters.extend((1..=self.aux_letters).map(Letter::Aux));
        letters
    }
}
