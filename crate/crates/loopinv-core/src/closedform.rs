//! Closed forms: parameter-linear combinations of hypergeometric terms.
//!
//! A solved sequence is `v(n) = sum_i coeff_i * h_i(n)` for `n >= start`,
//! with each `coeff_i` a polynomial in initial-value (and possibly free
//! solver) parameters and each `h_i` a canonical hypergeometric term. This is
//! the sum-of-hypergeometric-terms normal form; grouping summands by factor
//! signature recovers the polynomial-in-(n, exponentials) times
//! falling-factorial-powers shape.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::hyper::{FactorialFactor, HypergeometricTerm};
use crate::multipoly::MultiPoly;
use crate::rational::{pow_i64, Rational};
use crate::ratfunc::RatFunc;
use crate::unipoly::UniPoly;
use crate::vars::VarId;

#[derive(Debug, Clone)]
pub struct ClosedForm {
    pub variable: VarId,
    /// `(coefficient, term)` summands; coefficients are nonzero polynomials
    /// in parameters.
    pub parts: Vec<(MultiPoly, HypergeometricTerm)>,
    /// Validity offset: evaluation and all derived identities hold from here.
    pub start: i64,
}

impl ClosedForm {
    pub fn new(variable: VarId, mut parts: Vec<(MultiPoly, HypergeometricTerm)>, start: i64) -> Self {
        parts.retain(|(c, _)| !c.is_zero());
        parts.sort_by(|(_, a), (_, b)| a.cmp_canonical(b));
        ClosedForm {
            variable,
            parts,
            start,
        }
    }

    /// Constant sequence given by a parameter polynomial.
    pub fn constant(variable: VarId, value: MultiPoly) -> Self {
        ClosedForm::new(
            variable,
            vec![(value, HypergeometricTerm::constant_one())],
            0,
        )
    }

    /// Exact value at `n >= start` under a full parameter binding.
    pub fn eval(&self, n: i64, bind: &BTreeMap<VarId, Rational>) -> Option<Rational> {
        assert!(n >= self.start, "evaluation below validity offset");
        let mut acc = Rational::zero();
        for (c, t) in &self.parts {
            let cv = c.eval(bind);
            if !cv.is_zero() {
                acc += cv * t.eval(n)?;
            }
        }
        Some(acc)
    }

    /// Distinct exponential bases other than 1.
    pub fn thetas(&self) -> BTreeSet<Rational> {
        self.parts
            .iter()
            .filter(|(_, t)| !num_traits::One::is_one(&t.theta))
            .map(|(_, t)| t.theta.clone())
            .collect()
    }

    /// Distinct factorial class representatives.
    pub fn zetas(&self) -> BTreeSet<Rational> {
        self.parts
            .iter()
            .flat_map(|(_, t)| t.factors.iter().map(|f| f.zeta.clone()))
            .collect()
    }

    /// Parameters referenced by the coefficients.
    pub fn parameters(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        for (c, _) in &self.parts {
            for v in c.vars() {
                if c.contains_var(v) {
                    out.insert(v.clone());
                }
            }
        }
        out
    }

    /// The delayed sequence `w(n) = v(n - delay)` (history registers).
    pub fn delayed(&self, delay: i64, variable: VarId) -> ClosedForm {
        assert!(delay >= 0);
        let parts = self
            .parts
            .iter()
            .map(|(c, t)| (c.clone(), shift_term_argument(t, delay)))
            .collect();
        ClosedForm::new(variable, parts, self.start + delay)
    }

    /// Summands grouped by factorial signature with per-theta rational
    /// coefficients: the Eq-(3) style view `sum_k p_k(n, thetas^n) * FFs^k`.
    pub fn grouped(&self) -> Vec<GroupedSummand> {
        let mut out: Vec<GroupedSummand> = Vec::new();
        for (c, t) in &self.parts {
            let sig: Vec<(Rational, i64)> = t
                .factors
                .iter()
                .map(|f| (f.zeta.clone(), f.exponent))
                .collect();
            let entry = (c.clone(), t.theta.clone(), t.rat.clone());
            if let Some(g) = out.iter_mut().find(|g| g.signature == sig) {
                g.pieces.push(entry);
            } else {
                out.push(GroupedSummand {
                    signature: sig,
                    pieces: vec![entry],
                });
            }
        }
        out
    }
}

/// One group of a closed form: all summands sharing a factorial signature.
#[derive(Debug, Clone)]
pub struct GroupedSummand {
    pub signature: Vec<(Rational, i64)>,
    /// `(parameter coefficient, theta, rational part)` per exponential.
    pub pieces: Vec<(MultiPoly, Rational, RatFunc)>,
}

/// `h'(n) = h(n - delay)`, re-expressed over the same factorial classes:
/// `FF(z, n-m) = FF(z, n) / ((n+z)(n-1+z)...(n-m+1+z))` folds into the
/// rational part, and the exponential contributes `theta^{-m}`.
pub fn shift_term_argument(t: &HypergeometricTerm, delay: i64) -> HypergeometricTerm {
    assert!(delay >= 0);
    if delay == 0 {
        return t.clone();
    }
    let mut rat_part = t.rat.shift(-delay);
    rat_part = &rat_part * &RatFunc::constant(pow_i64(&t.theta, -delay));
    let mut factors: Vec<FactorialFactor> = Vec::new();
    for f in &t.factors {
        let mut den = UniPoly::one();
        for i in 0..delay {
            den = &den
                * &UniPoly::from_coeffs(vec![&f.zeta - &crate::rational::rat(i), Rational::one()]);
        }
        let piece = RatFunc::new(UniPoly::one(), den);
        for _ in 0..f.exponent.unsigned_abs() {
            rat_part = if f.exponent > 0 {
                &rat_part * &piece
            } else {
                &rat_part / &piece
            };
        }
        factors.push(f.clone());
    }
    HypergeometricTerm::new(t.theta.clone(), rat_part, factors)
}
