//! Exact linear-system solving over the fraction field of the parameter ring.
//!
//! Coefficients and right-hand sides are polynomials in symbolic parameters;
//! unknowns are solved by Gaussian elimination with fraction bookkeeping, so
//! the result of substituting a solution back is identically zero. In the
//! pipeline the coefficient matrix is almost always numeric (sequence values
//! at small indices) and only the right-hand side carries parameters.

use num_traits::One;

use crate::multipoly::MultiPoly;
use crate::vars::VarId;

/// A ratio of multivariate polynomials (denominator nonzero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFraction {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl PolyFraction {
    pub fn zero() -> Self {
        PolyFraction {
            num: MultiPoly::zero(),
            den: MultiPoly::one(),
        }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        PolyFraction {
            num: p,
            den: MultiPoly::one(),
        }
    }

    pub fn new(num: MultiPoly, den: MultiPoly) -> Self {
        assert!(!den.is_zero(), "fraction with zero denominator");
        let mut f = PolyFraction { num, den };
        f.normalize();
        f
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = MultiPoly::one();
            return;
        }
        if let Some(c) = self.den.as_constant() {
            self.num = self.num.scale(&c.recip());
            self.den = MultiPoly::one();
            return;
        }
        if let Some(q) = self.num.try_div(&self.den) {
            self.num = q;
            self.den = MultiPoly::one();
            return;
        }
        // keep denominators primitive so content does not pile up
        let c = self.den.content();
        if !c.is_one() {
            self.den = self.den.scale(&c.recip());
            self.num = self.num.scale(&c.recip());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The underlying polynomial when the denominator is trivial.
    pub fn as_poly(&self) -> Option<&MultiPoly> {
        self.den.as_constant().and_then(|c| c.is_one().then_some(&self.num))
    }

    pub fn add(&self, other: &Self) -> Self {
        PolyFraction::new(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        PolyFraction::new(
            &(&self.num * &other.den) - &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        PolyFraction::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero fraction");
        PolyFraction::new(&self.num * &other.den, &self.den * &other.num)
    }
}

#[derive(Debug, Clone)]
pub enum LinearSolution {
    /// `assignments[i]` expresses unknown `i`; free unknowns are assigned
    /// their own symbol and listed in `free`.
    Solved {
        assignments: Vec<PolyFraction>,
        free: Vec<usize>,
    },
    Inconsistent,
}

/// Solve `sum_j coeffs[i][j] * x_j = rhs[i]` for the unknowns `x_j`.
///
/// `unknowns[j]` names unknown `j`; the names appear in the output exactly
/// when the system is underdetermined.
pub fn solve_linear_system(
    coeffs: &[Vec<MultiPoly>],
    rhs: &[MultiPoly],
    unknowns: &[VarId],
) -> LinearSolution {
    let rows = coeffs.len();
    let cols = unknowns.len();
    assert_eq!(rows, rhs.len());
    let mut m: Vec<Vec<PolyFraction>> = (0..rows)
        .map(|i| {
            let mut row: Vec<PolyFraction> = coeffs[i]
                .iter()
                .map(|c| PolyFraction::from_poly(c.clone()))
                .collect();
            assert_eq!(row.len(), cols, "ragged coefficient matrix");
            row.push(PolyFraction::from_poly(rhs[i].clone()));
            row
        })
        .collect();

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut next_row = 0;
    for col in 0..cols {
        // prefer a constant pivot to keep fractions trivial
        let cand = (next_row..rows)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| {
                let f = &m[r][col];
                if f.as_poly().map_or(false, |p| p.is_constant()) {
                    0
                } else {
                    1
                }
            });
        let Some(r) = cand else { continue };
        m.swap(next_row, r);
        let pivot = m[next_row][col].clone();
        for rr in 0..rows {
            if rr == next_row || m[rr][col].is_zero() {
                continue;
            }
            let factor = m[rr][col].div(&pivot);
            for cc in col..=cols {
                let delta = factor.mul(&m[next_row][cc]);
                m[rr][cc] = m[rr][cc].sub(&delta);
            }
        }
        pivot_of_col[col] = Some(next_row);
        next_row += 1;
        if next_row == rows {
            break;
        }
    }

    // inconsistency: zero coefficient row with nonzero rhs
    for r in 0..rows {
        if m[r][..cols].iter().all(|f| f.is_zero()) && !m[r][cols].is_zero() {
            return LinearSolution::Inconsistent;
        }
    }

    let free: Vec<usize> = (0..cols).filter(|&c| pivot_of_col[c].is_none()).collect();
    let mut assignments = vec![PolyFraction::zero(); cols];
    for &c in &free {
        assignments[c] = PolyFraction::from_poly(MultiPoly::var(&unknowns[c]));
    }
    for col in 0..cols {
        let Some(r) = pivot_of_col[col] else { continue };
        let mut acc = m[r][cols].clone();
        for c2 in (col + 1)..cols {
            if !m[r][c2].is_zero() {
                acc = acc.sub(&m[r][c2].mul(&assignments[c2]));
            }
        }
        assignments[col] = acc.div(&m[r][col]);
    }
    LinearSolution::Solved { assignments, free }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::vars::{SymbolTable, VarKind};

    fn c(n: i64) -> MultiPoly {
        MultiPoly::constant(rat(n))
    }

    #[test]
    fn example_42_system() {
        // k1 + k2 = 2, -k1 + 6 k2 = 5  =>  k1 = 1, k2 = 1
        let mut t = SymbolTable::new();
        let k1 = t.fresh(VarKind::SolverParam, "k1");
        let k2 = t.fresh(VarKind::SolverParam, "k2");
        let sol = solve_linear_system(
            &[vec![c(1), c(1)], vec![c(-1), c(6)]],
            &[c(2), c(5)],
            &[k1, k2],
        );
        match sol {
            LinearSolution::Solved { assignments, free } => {
                assert!(free.is_empty());
                assert_eq!(assignments[0].as_poly(), Some(&c(1)));
                assert_eq!(assignments[1].as_poly(), Some(&c(1)));
            }
            _ => panic!("expected unique solution"),
        }
    }

    #[test]
    fn symbolic_rhs() {
        // k1 = s0
        let mut t = SymbolTable::new();
        let k1 = t.fresh(VarKind::SolverParam, "k1");
        let s0 = t.fresh(VarKind::InitialParam, "s0");
        let sol = solve_linear_system(&[vec![c(1)]], &[MultiPoly::var(&s0)], &[k1]);
        match sol {
            LinearSolution::Solved { assignments, .. } => {
                assert_eq!(assignments[0].as_poly(), Some(&MultiPoly::var(&s0)));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn inconsistent() {
        let mut t = SymbolTable::new();
        let k1 = t.fresh(VarKind::SolverParam, "k1");
        let k2 = t.fresh(VarKind::SolverParam, "k2");
        let sol = solve_linear_system(
            &[vec![c(1), c(1)], vec![c(1), c(1)]],
            &[c(0), c(1)],
            &[k1, k2],
        );
        assert!(matches!(sol, LinearSolution::Inconsistent));
    }

    #[test]
    fn underdetermined_keeps_free_symbol() {
        let mut t = SymbolTable::new();
        let k1 = t.fresh(VarKind::SolverParam, "k1");
        let k2 = t.fresh(VarKind::SolverParam, "k2");
        // k1 + k2 = 3: k2 free, k1 = 3 - k2
        let sol = solve_linear_system(&[vec![c(1), c(1)]], &[c(3)], &[k1, k2.clone()]);
        match sol {
            LinearSolution::Solved { assignments, free } => {
                assert_eq!(free, vec![1]);
                let expect = &c(3) - &MultiPoly::var(&k2);
                assert_eq!(assignments[0].as_poly(), Some(&expect));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn substitution_residual_is_zero() {
        // random-ish 3x3 with symbolic rhs, verify residuals vanish
        let mut t = SymbolTable::new();
        let ks: Vec<_> = (0..3)
            .map(|i| t.fresh(VarKind::SolverParam, &format!("k{}", i)))
            .collect();
        let p = t.fresh(VarKind::InitialParam, "p");
        let a = vec![
            vec![c(2), c(1), c(-1)],
            vec![c(0), c(3), c(5)],
            vec![c(1), c(1), c(1)],
        ];
        let b = vec![MultiPoly::var(&p), c(4), &MultiPoly::var(&p) + &c(1)];
        match solve_linear_system(&a, &b, &ks) {
            LinearSolution::Solved { assignments, free } => {
                assert!(free.is_empty());
                for i in 0..3 {
                    let mut acc = PolyFraction::zero();
                    for j in 0..3 {
                        acc = acc.add(&PolyFraction::from_poly(a[i][j].clone()).mul(&assignments[j]));
                    }
                    let resid = acc.sub(&PolyFraction::from_poly(b[i].clone()));
                    assert!(resid.is_zero(), "row {} residual {:?}", i, resid);
                }
            }
            _ => panic!(),
        }
    }
}
