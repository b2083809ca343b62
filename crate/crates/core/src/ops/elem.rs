use num_complex::Complex64;

use crate::fock::{FockSpace, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElemKind {
    Create,
    Annihilate,
}

/// A creation or annihilation operator for a single letter, on either side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    pub kind: ElemKind,
    pub side: Side,
    pub letter: Letter,
}

impl Elem {
    pub fn create(letter: Letter) -> Elem {
        Elem {
            kind: ElemKind::Create,
            side: Side::Left,
            letter,
        }
    }

    pub fn annihilate(letter: Letter) -> Elem {
        Elem {
            kind: ElemKind::Annihilate,
            side: Side::Left,
            letter,
        }
    }

    pub fn on(self, side: Side) -> Elem {
        Elem { side, ..self }
    }

    /// Level change: +1 or -1.
    pub fn shift(self) -> i64 {
        match self.kind {
            ElemKind::Create => 1,
            ElemKind::Annihilate => -1,
        }
    }

    /// Images of a basis word, `(word, coefficient)`. Creations that would
    /// leave the truncated space are dropped.
    ///
    /// Left annihilation weighs the deleted position `p` (0-based) by
    /// `q^p <l, l>_U`; right annihilation by `q^(n-1-p) <l, l>_U`.
    pub fn for_each_image(self, space: &FockSpace, w: Word, mut f: impl FnMut(Word, f64)) {
        let n = w.len();
        match self.kind {
            ElemKind::Create => {
                if n < space.depth() {
                    let image = match self.side {
                        Side::Left => w.push_front(self.letter),
                        Side::Right => w.push_back(self.letter),
                    };
                    f(image, 1.0);
                }
            }
            ElemKind::Annihilate => {
                let norm = self.letter.u_norm_sq(space.lambda());
                let q = space.q();
                for p in 0..n {
                    if w.get(p) == self.letter {
                        let e = match self.side {
                            Side::Left => p,
                            Side::Right => n - 1 - p,
                        };
                        f(w.remove(p), q.powi(e as i32) * norm);
                    }
                }
            }
        }
    }
}

impl std::fmt::Display for Elem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let side = match self.side {
            Side::Left => "",
            Side::Right => "_r",
        };
        match self.kind {
            ElemKind::Create => write!(f, "c{side}({})", self.letter),
            ElemKind::Annihilate => write!(f, "c{side}({})*", self.letter),
        }
    }
}

/// A vector of the complexified one-particle space in the letter basis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OneParticleVector {
    pub coeffs: Vec<(Letter, Complex64)>,
}

impl OneParticleVector {
    pub fn new(coeffs: Vec<(Letter, Complex64)>) -> Self {
        Self { coeffs }
    }

    pub fn letter(l: Letter) -> Self {
        Self::new(vec![(l, Complex64::new(1.0, 0.0))])
    }

    /// `<self, other>_U`, antilinear in `self`.
    pub fn inner_u(&self, other: &OneParticleVector, lambda: f64) -> Complex64 {
        let mut acc = Complex64::default();
        for &(a, x) in &self.coeffs {
            for &(b, y) in &other.coeffs {
                if a == b {
                    acc += x.conj() * y * a.u_norm_sq(lambda);
                }
            }
        }
        acc
    }

    /// `A^t v` for real `t`.
    pub fn a_power(&self, t: f64, lambda: f64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|&(l, c)| (l, c * l.a_eigenvalue(lambda).powf(t)))
                .collect(),
        )
    }
}
