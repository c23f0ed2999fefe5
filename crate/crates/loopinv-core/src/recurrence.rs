//! A single-variable linear recurrence with symbolic initial values.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::multipoly::MultiPoly;
use crate::ore::OreOperator;
use crate::rational::rat;
use crate::vars::VarId;

/// `operator(v) = inhomogeneous` with values `initial_values[i] = v(start+i)`
/// given as polynomials in initial-value parameters. Operator coefficients
/// must be pole-free at integers `>= start`.
#[derive(Debug, Clone)]
pub struct Recurrence {
    pub variable: VarId,
    pub counter: VarId,
    /// Monic homogeneous part.
    pub operator: OreOperator,
    /// Polynomial in (counter, parameters); zero when homogeneous.
    pub inhomogeneous: MultiPoly,
    pub initial_values: Vec<MultiPoly>,
    pub start: i64,
}

impl Recurrence {
    pub fn new(
        variable: VarId,
        counter: VarId,
        operator: OreOperator,
        inhomogeneous: MultiPoly,
        initial_values: Vec<MultiPoly>,
        start: i64,
    ) -> Self {
        let operator = operator.monic();
        assert_eq!(
            initial_values.len(),
            operator.ord(),
            "initial value count must match operator order"
        );
        Recurrence {
            variable,
            counter,
            operator,
            inhomogeneous,
            initial_values,
            start,
        }
    }

    pub fn order(&self) -> usize {
        self.operator.ord()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.inhomogeneous.is_zero()
    }

    /// Inhomogeneous part with the counter bound to a concrete index.
    pub fn inhomogeneous_at(&self, n: i64) -> MultiPoly {
        self.inhomogeneous.substitute_rational(&self.counter, &rat(n))
    }

    /// Value `v(start + len)` obtained by unrolling one step past the known
    /// values (used to extend the list):
    /// `v(n+d) = inhom(n) - sum_i l_i(n) v(n+i)`.
    fn unroll_next(&self, known: &[MultiPoly]) -> MultiPoly {
        let d = self.order();
        assert!(known.len() >= d);
        let n = self.start + (known.len() - d) as i64;
        let mut acc = self.inhomogeneous_at(n);
        for i in 0..d {
            let li = self
                .operator
                .coeff(i)
                .eval(&rat(n))
                .expect("operator coefficient pole inside validity range");
            if !li.is_zero() {
                acc = &acc - &known[known.len() - d + i].scale(&li);
            }
        }
        acc
    }

    /// Extend the initial-value list to `count` entries by unrolling.
    pub fn values_prefix(&self, count: usize) -> Vec<MultiPoly> {
        let mut vals = self.initial_values.clone();
        while vals.len() < count {
            vals.push(self.unroll_next(&vals));
        }
        vals.truncate(count);
        vals
    }

    /// Remove a polynomial inhomogeneity by left-multiplying with
    /// `Delta^(deg+1)`; the order grows by `deg+1` and the initial values are
    /// extended by unrolling.
    pub fn homogenize(&self) -> Recurrence {
        if self.is_homogeneous() {
            return self.clone();
        }
        let deg = self.inhomogeneous.degree_in(&self.counter) as usize;
        let mut ann = OreOperator::one();
        for _ in 0..=deg {
            ann = &ann * &OreOperator::delta();
        }
        let operator = (&ann * &self.operator).monic();
        let d_new = operator.ord();
        let initial_values = self.values_prefix(d_new);
        Recurrence {
            variable: self.variable.clone(),
            counter: self.counter.clone(),
            operator,
            inhomogeneous: MultiPoly::zero(),
            initial_values,
            start: self.start,
        }
    }

    /// Substitute concrete parameter values into initial data.
    pub fn bind_parameters(&self, bind: &BTreeMap<VarId, MultiPoly>) -> Recurrence {
        Recurrence {
            variable: self.variable.clone(),
            counter: self.counter.clone(),
            operator: self.operator.clone(),
            inhomogeneous: self.inhomogeneous.substitute(bind),
            initial_values: self
                .initial_values
                .iter()
                .map(|v| v.substitute(bind))
                .collect(),
            start: self.start,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfunc::RatFunc;
    use crate::vars::{SymbolTable, VarKind};
    use num_traits::One;

    fn setup() -> (SymbolTable, VarId, VarId, VarId) {
        let mut t = SymbolTable::new();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let c = t.fresh(VarKind::ProgramVar, "c");
        let c0 = t.fresh(VarKind::InitialParam, "c_0");
        (t, n, c, c0)
    }

    #[test]
    fn homogenize_constant_inhomogeneity() {
        // c(n+1) = -3 c(n) + 2  ->  (S-1)(S+3), initial {c0, -3 c0 + 2}
        let (_, n, c, c0) = setup();
        let rec = Recurrence::new(
            c,
            n,
            OreOperator::shift_minus(RatFunc::constant(rat(-3))),
            MultiPoly::constant(rat(2)),
            vec![MultiPoly::var(&c0)],
            0,
        );
        let h = rec.homogenize();
        assert_eq!(h.order(), 2);
        // (S-1)(S+3) = S^2 + 2S - 3
        assert_eq!(h.operator.coeff(0), RatFunc::constant(rat(-3)));
        assert_eq!(h.operator.coeff(1), RatFunc::constant(rat(2)));
        assert!(h.operator.coeff(2).is_one());
        let expect = &MultiPoly::var(&c0).scale(&rat(-3)) + &MultiPoly::constant(rat(2));
        assert_eq!(h.initial_values, vec![MultiPoly::var(&c0), expect]);
    }

    #[test]
    fn homogenize_already_homogeneous_is_identity() {
        let (_, n, c, c0) = setup();
        let rec = Recurrence::new(
            c,
            n,
            OreOperator::shift_minus(RatFunc::constant(rat(2))),
            MultiPoly::zero(),
            vec![MultiPoly::var(&c0)],
            0,
        );
        let h = rec.homogenize();
        assert_eq!(h.operator, rec.operator);
        assert_eq!(h.initial_values, rec.initial_values);
    }

    #[test]
    fn homogenize_counter_polynomial() {
        // v(n+1) = v(n) + n  ->  Delta^3, initial {v0, v0, v0+1}
        let (mut t, n, _, _) = setup();
        let v = t.fresh(VarKind::ProgramVar, "v");
        let v0 = t.fresh(VarKind::InitialParam, "v_0");
        let rec = Recurrence::new(
            v,
            n.clone(),
            OreOperator::delta(),
            MultiPoly::var(&n),
            vec![MultiPoly::var(&v0)],
            0,
        );
        let h = rec.homogenize();
        assert_eq!(h.order(), 3);
        // Delta^3 = S^3 - 3S^2 + 3S - 1
        assert_eq!(h.operator.coeff(0), RatFunc::constant(rat(-1)));
        assert_eq!(h.operator.coeff(1), RatFunc::constant(rat(3)));
        assert_eq!(h.operator.coeff(2), RatFunc::constant(rat(-3)));
        let v0p = MultiPoly::var(&v0);
        assert_eq!(
            h.initial_values,
            vec![v0p.clone(), v0p.clone(), &v0p + &MultiPoly::one()]
        );
        // unrolled sequence matches the original recurrence a few steps out
        let vals = h.values_prefix(6);
        let direct = rec.values_prefix(6);
        assert_eq!(vals, direct);
    }
}
