use num_complex::Complex64;

use super::cols::{Cols, FockMap};
use super::elem::{Elem, OneParticleVector, Side};
use crate::fock::FockSpace;

/// A product of elementary operators; `factors[0]` is leftmost (applied last).
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: Complex64,
    pub factors: Vec<Elem>,
}

impl Monomial {
    /// `(raise, peak)` of the product read right to left.
    pub fn reach(&self) -> (i64, usize) {
        let mut level = 0i64;
        let mut peak = 0i64;
        for f in self.factors.iter().rev() {
            level += f.shift();
            peak = peak.max(level);
        }
        (level, peak as usize)
    }
}

/// A finite linear combination of monomials in creation and annihilation
/// operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OpExpr {
    terms: Vec<Monomial>,
    label: String,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl OpExpr {
    pub fn from_terms(terms: Vec<Monomial>, label: impl Into<String>) -> OpExpr {
        let mut e = OpExpr {
            terms,
            label: label.into(),
        };
        e.simplify();
        e
    }

    pub fn identity() -> OpExpr {
        OpExpr::from_terms(
            vec![Monomial {
                coef: one(),
                factors: vec![],
            }],
            "id",
        )
    }

    pub fn zero() -> OpExpr {
        OpExpr::from_terms(vec![], "0")
    }

    pub fn elem(e: Elem) -> OpExpr {
        OpExpr::from_terms(
            vec![Monomial {
                coef: one(),
                factors: vec![e],
            }],
            e.to_string(),
        )
    }

    /// `c(v)` on the given side; linear in `v`.
    pub fn creation(v: &OneParticleVector, side: Side) -> OpExpr {
        let terms = v
            .coeffs
            .iter()
            .map(|&(l, c)| Monomial {
                coef: c,
                factors: vec![Elem::create(l).on(side)],
            })
            .collect();
        OpExpr::from_terms(terms, format!("c_{side:?}(v)"))
    }

    /// `c(v)*` on the given side; antilinear in `v`.
    pub fn annihilation(v: &OneParticleVector, side: Side) -> OpExpr {
        let terms = v
            .coeffs
            .iter()
            .map(|&(l, c)| Monomial {
                coef: c.conj(),
                factors: vec![Elem::annihilate(l).on(side)],
            })
            .collect();
        OpExpr::from_terms(terms, format!("c_{side:?}(v)*"))
    }

    /// `s(v) = c(v) + c(v)*`.
    pub fn field(v: &OneParticleVector, side: Side) -> OpExpr {
        OpExpr::creation(v, side)
            .add(&OpExpr::annihilation(v, side))
            .with_label(format!("s_{side:?}(v)"))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> OpExpr {
        self.label = label.into();
        self
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    /// Merges equal monomials and drops zero coefficients; sorts by factor list.
    fn simplify(&mut self) {
        self.terms.sort_by(|a, b| a.factors.cmp(&b.factors));
        let mut merged: Vec<Monomial> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(m) if m.factors == t.factors => m.coef += t.coef,
                _ => merged.push(t),
            }
        }
        merged.retain(|m| m.coef != Complex64::default());
        self.terms = merged;
    }

    /// `self` composed after `other`.
    pub fn mul(&self, other: &OpExpr) -> OpExpr {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend_from_slice(&b.factors);
                terms.push(Monomial {
                    coef: a.coef * b.coef,
                    factors,
                });
            }
        }
        OpExpr::from_terms(terms, format!("({})({})", self.label, other.label))
    }

    pub fn add(&self, other: &OpExpr) -> OpExpr {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        OpExpr::from_terms(terms, format!("{} + {}", self.label, other.label))
    }

    pub fn scale(&self, c: Complex64) -> OpExpr {
        let terms = self
            .terms
            .iter()
            .map(|m| Monomial {
                coef: m.coef * c,
                factors: m.factors.clone(),
            })
            .collect();
        OpExpr::from_terms(terms, self.label.clone())
    }

    pub fn pow(&self, n: usize) -> OpExpr {
        let mut acc = OpExpr::identity();
        for _ in 0..n {
            acc = self.mul(&acc);
        }
        acc.with_label(format!("({})^{n}", self.label))
    }

    /// Coefficient of the monomial with exactly these factors.
    pub fn coefficient(&self, factors: &[Elem]) -> Complex64 {
        self.terms
            .iter()
            .find(|m| m.factors == factors)
            .map_or(Complex64::default(), |m| m.coef)
    }

    // Depth-first over monomials sorted by their factor lists read from the
    // right, so common right factors are applied once.
    fn eval(&self, space: &FockSpace, order: &[(usize, usize)], x: &Cols, out: &mut Cols) {
        // order: (term index, number of factors still to apply)
        let mut i = 0;
        while i < order.len() && order[i].1 == 0 {
            out.add_scaled(self.terms[order[i].0].coef, x);
            i += 1;
        }
        while i < order.len() {
            let (t, r) = order[i];
            let f = self.terms[t].factors[r - 1];
            let mut j = i;
            let mut next = Vec::new();
            while j < order.len() && self.terms[order[j].0].factors[order[j].1 - 1] == f {
                next.push((order[j].0, order[j].1 - 1));
                j += 1;
            }
            let y = x.apply_elem(space, f);
            if !y.is_empty() {
                self.eval(space, &next, &y, out);
            }
            i = j;
        }
    }
}

impl FockMap for OpExpr {
    fn apply_cols(&self, space: &FockSpace, x: &Cols) -> Cols {
        let mut order: Vec<(usize, usize)> =
            (0..self.terms.len()).map(|t| (t, self.terms[t].factors.len())).collect();
        order.sort_by(|a, b| {
            let fa = self.terms[a.0].factors.iter().rev();
            let fb = self.terms[b.0].factors.iter().rev();
            fa.cmp(fb)
        });
        let mut out = Cols::empty(x.nvec());
        self.eval(space, &order, x, &mut out);
        out
    }

    fn raise(&self) -> i64 {
        self.terms.iter().map(|m| m.reach().0).max().unwrap_or(0)
    }

    fn peak(&self) -> usize {
        self.terms.iter().map(|m| m.reach().1).max().unwrap_or(0)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}
