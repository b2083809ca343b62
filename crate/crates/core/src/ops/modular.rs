use num_complex::Complex64;

use super::operator::FockOperator;
use crate::fock::{FockSpace, Word};

/// Product of `A`-eigenvalues over the letters of `w`.
fn a_weight(space: &FockSpace, w: Word) -> f64 {
    w.letters().map(|l| l.a_eigenvalue(space.lambda())).product()
}

/// The flip: word reversal.
pub fn flip(space: &FockSpace) -> FockOperator {
    FockOperator::word_map(space, |w| (w.reversed(), Complex64::new(1.0, 0.0)), false, "flip")
}

/// `Delta^t`: multiplication by `prod A^(-t)` over the letters.
pub fn delta_power(space: &FockSpace, t: f64) -> FockOperator {
    FockOperator::word_map(
        space,
        |w| (w, Complex64::new(a_weight(space, w).powf(-t), 0.0)),
        false,
        format!("Delta^{t}"),
    )
}

/// Tomita operator, modular conjugation and modular operator of the vacuum.
#[derive(Debug, Clone)]
pub struct ModularOps {
    /// Antilinear: reverses the word and bars every letter.
    pub s: FockOperator,
    /// Antilinear: `J = S Delta^(-1/2)`.
    pub j: FockOperator,
    pub delta: FockOperator,
}

pub fn modular_ops(space: &FockSpace) -> ModularOps {
    let barred = |w: Word| {
        let letters: Vec<_> = (0..w.len()).rev().map(|i| w.get(i).bar()).collect();
        Word::from_letters(&letters).expect("same length as a basis word")
    };
    let s = FockOperator::word_map(space, |w| (barred(w), Complex64::new(1.0, 0.0)), true, "S");
    let j = FockOperator::word_map(
        space,
        |w| (barred(w), Complex64::new(a_weight(space, w).sqrt(), 0.0)),
        true,
        "J",
    );
    ModularOps {
        s,
        j,
        delta: delta_power(space, 1.0).with_label("Delta"),
    }
}
