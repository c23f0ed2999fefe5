//! Algebraic relations among exponential sequences `theta_i^n`.
//!
//! For rational bases the relation lattice is computable exactly: write each
//! `theta = sign * prod p_j^{e_j}` over the shared prime support, take the
//! integer kernel of the exponent matrix, and intersect with the parity
//! condition that the signs multiply to +1. The corresponding binomial ideal
//! is saturated with respect to the product of the exponential variables so
//! it is the full ideal of relations of the (nowhere-zero) sequences.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::groebner::{eliminate, IdealBasis, IdealError};
use crate::multipoly::MultiPoly;
use crate::order::MonomialOrder;
use crate::rational::{pow_i64, rational_prime_factors, Rational};
use crate::vars::{SymbolTable, VarId, VarKind};

/// Basis of all integer vectors `v` with `prod theta_i^{v_i} = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentLattice {
    pub thetas: Vec<Rational>,
    pub basis: Vec<Vec<i64>>,
}

impl ExponentLattice {
    /// Pointwise check of one relation vector.
    pub fn relation_holds(thetas: &[Rational], v: &[i64]) -> bool {
        let mut acc = Rational::one();
        for (t, &e) in thetas.iter().zip(v) {
            acc *= pow_i64(t, e);
        }
        acc.is_one()
    }
}

/// Complete multiplicative-relation lattice of nonzero, pairwise distinct
/// rational numbers.
pub fn exp_lattice(thetas: &[Rational]) -> ExponentLattice {
    for t in thetas {
        assert!(!t.is_zero(), "zero exponential base");
    }
    // prime support across all bases
    let mut primes: BTreeSet<BigUint> = BTreeSet::new();
    let mut signs: Vec<bool> = Vec::new(); // true = negative
    let mut factored: Vec<Vec<(BigUint, i64)>> = Vec::new();
    for t in thetas {
        let (sign, facs) = rational_prime_factors(t);
        signs.push(sign < 0);
        for (p, _) in &facs {
            primes.insert(p.clone());
        }
        factored.push(facs);
    }
    let primes: Vec<BigUint> = primes.into_iter().collect();
    // exponent matrix: one row per theta, one column per prime
    let matrix: Vec<Vec<BigInt>> = factored
        .iter()
        .map(|facs| {
            primes
                .iter()
                .map(|p| {
                    facs.iter()
                        .find(|(q, _)| q == p)
                        .map(|(_, e)| BigInt::from(*e))
                        .unwrap_or_else(BigInt::zero)
                })
                .collect()
        })
        .collect();
    let mut kernel = integer_left_kernel(&matrix, thetas.len());

    // intersect with the sign parity condition: sum of v_i over negative
    // thetas must be even
    let parity = |v: &[BigInt]| -> bool {
        let mut odd = false;
        for (x, neg) in v.iter().zip(&signs) {
            if *neg && x.is_odd_int() {
                odd = !odd;
            }
        }
        odd
    };
    if let Some(first_odd) = kernel.iter().position(|v| parity(v)) {
        let u = kernel[first_odd].clone();
        for (i, v) in kernel.iter_mut().enumerate() {
            if i != first_odd && parity(v) {
                for (x, y) in v.iter_mut().zip(&u) {
                    *x -= y;
                }
            }
        }
        for x in kernel[first_odd].iter_mut() {
            *x *= 2;
        }
    }
    let mut basis: Vec<Vec<i64>> = kernel
        .into_iter()
        .map(|v| {
            v.into_iter()
                .map(|x| i64::try_from(x).expect("lattice entry fits i64"))
                .collect()
        })
        .collect();
    basis = hermite_normalize(basis);
    ExponentLattice {
        thetas: thetas.to_vec(),
        basis,
    }
}

trait OddInt {
    fn is_odd_int(&self) -> bool;
}
impl OddInt for BigInt {
    fn is_odd_int(&self) -> bool {
        use num_integer::Integer;
        self.is_odd()
    }
}

/// Left kernel (`v M = 0`) of an integer matrix, by unimodular row
/// reduction of `[M | I]`.
fn integer_left_kernel(matrix: &[Vec<BigInt>], rows: usize) -> Vec<Vec<BigInt>> {
    let cols = matrix.first().map_or(0, |r| r.len());
    // augmented rows: [M_row | unit vector]
    let mut aug: Vec<(Vec<BigInt>, Vec<BigInt>)> = (0..rows)
        .map(|i| {
            let mut unit = vec![BigInt::zero(); rows];
            unit[i] = BigInt::one();
            (matrix[i].clone(), unit)
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..cols {
        loop {
            // find the row with the smallest nonzero magnitude in this column
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if aug[r].0[col].is_zero() {
                    continue;
                }
                if best.map_or(true, |b| aug[r].0[col].abs() < aug[b].0[col].abs()) {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            aug.swap(pivot_row, b);
            let mut done = true;
            for r in (pivot_row + 1)..rows {
                if aug[r].0[col].is_zero() {
                    continue;
                }
                let q = &aug[r].0[col] / &aug[pivot_row].0[col];
                if !q.is_zero() {
                    for c in 0..cols {
                        let d = &q * &aug[pivot_row].0[c];
                        aug[r].0[c] -= d;
                    }
                    for c in 0..rows {
                        let d = &q * &aug[pivot_row].1[c];
                        aug[r].1[c] -= d;
                    }
                }
                if !aug[r].0[col].is_zero() {
                    done = false;
                }
            }
            if done {
                pivot_row += 1;
                break;
            }
        }
        if pivot_row == rows {
            break;
        }
    }
    aug.into_iter()
        .filter(|(m, _)| m.iter().all(|x| x.is_zero()))
        .map(|(_, u)| u)
        .collect()
}

/// Canonical basis: integer row echelon with positive pivots, entries above
/// pivots reduced, rows sorted by pivot position.
fn hermite_normalize(mut basis: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    if basis.is_empty() {
        return basis;
    }
    let cols = basis[0].len();
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut rows = basis.drain(..).collect::<Vec<_>>();
    for col in 0..cols {
        loop {
            let mut idx: Option<usize> = None;
            for (i, r) in rows.iter().enumerate() {
                if r[col] != 0 && idx.map_or(true, |b| r[col].abs() < rows[b][col].abs()) {
                    idx = Some(i);
                }
            }
            let Some(i) = idx else { break };
            let pivot_row = rows.remove(i);
            let mut all_zero = true;
            for r in rows.iter_mut() {
                if r[col] != 0 {
                    let q = r[col].div_euclid(pivot_row[col]);
                    for c in 0..cols {
                        r[c] -= q * pivot_row[c];
                    }
                    if r[col] != 0 {
                        all_zero = false;
                    }
                }
            }
            rows.push(pivot_row);
            if all_zero {
                let p = rows.pop().unwrap();
                let p = if p[col] < 0 { p.iter().map(|x| -x).collect() } else { p };
                // reduce earlier rows above this pivot
                for r in out.iter_mut() {
                    if r[col] != 0 {
                        let q = r[col].div_euclid(p[col]);
                        for c in 0..cols {
                            r[c] -= q * p[c];
                        }
                    }
                }
                out.push(p);
                rows.retain(|r| r.iter().any(|&x| x != 0));
                break;
            }
        }
    }
    out
}

/// The binomial ideal of all algebraic relations among `theta_i^n` in the
/// exponential variables, saturated by the product of the variables (extra
/// variable `w`, relation `w e_1 ... e_s = 1`, then eliminate `w`).
pub fn lattice_ideal(
    lat: &ExponentLattice,
    table: &mut SymbolTable,
    step_cap: usize,
) -> Result<IdealBasis, IdealError> {
    let evars: Vec<VarId> = lat
        .thetas
        .iter()
        .map(|t| table.exponential_var(t))
        .collect();
    let mut gens: Vec<MultiPoly> = Vec::new();
    for v in &lat.basis {
        let mut pos = MultiPoly::one();
        let mut neg = MultiPoly::one();
        for (e, &k) in evars.iter().zip(v) {
            if k > 0 {
                pos = &pos * &MultiPoly::var_pow(e, k as u32);
            } else if k < 0 {
                neg = &neg * &MultiPoly::var_pow(e, (-k) as u32);
            }
        }
        gens.push(&pos - &neg);
    }
    if gens.is_empty() {
        return Ok(IdealBasis {
            vars: evars,
            generators: Vec::new(),
            order: MonomialOrder::GrevLex,
            reduced: true,
        });
    }
    let w = table.fresh(VarKind::SolverParam, "_w");
    let mut prod = MultiPoly::var(&w);
    for e in &evars {
        prod = &prod * &MultiPoly::var(e);
    }
    gens.push(&prod - &MultiPoly::one());
    let drop: BTreeSet<VarId> = [w].into_iter().collect();
    eliminate(&gens, &drop, step_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn lattice_of_paper_bases() {
        // {-1, 2, 3, 6}: relations (-1)^2 = 1 and 2*3/6 = 1
        let thetas = vec![rat(-1), rat(2), rat(3), rat(6)];
        let lat = exp_lattice(&thetas);
        assert_eq!(lat.basis, vec![vec![2, 0, 0, 0], vec![0, 1, 1, -1]]);
        for v in &lat.basis {
            assert!(ExponentLattice::relation_holds(&thetas, v));
        }
    }

    #[test]
    fn lattice_trivial_and_power() {
        // {2}: no relations
        assert!(exp_lattice(&[rat(2)]).basis.is_empty());
        // {2, 4}: 2^2 = 4
        let lat = exp_lattice(&[rat(2), rat(4)]);
        assert_eq!(lat.basis, vec![vec![2, -1]]);
    }

    #[test]
    fn lattice_with_fractions_and_signs() {
        // {1/2, 2}: product is 1
        let lat = exp_lattice(&[ratio(1, 2), rat(2)]);
        assert_eq!(lat.basis, vec![vec![1, 1]]);
        // {-3, 3}: (-3)^2 = 3^2, and (-3)(3) is not 1
        let lat = exp_lattice(&[rat(-3), rat(3)]);
        assert_eq!(lat.basis, vec![vec![2, -2]]);
        for v in &lat.basis {
            assert!(ExponentLattice::relation_holds(&[rat(-3), rat(3)], v));
        }
    }

    #[test]
    fn lattice_ideal_paper_example() {
        // <e_{-1}^2 - 1, e_2 e_3 - e_6> as a reduced basis
        let mut t = SymbolTable::new();
        let thetas = vec![rat(-1), rat(2), rat(3), rat(6)];
        let lat = exp_lattice(&thetas);
        let ideal = lattice_ideal(&lat, &mut t, 100_000).unwrap();
        assert!(ideal.reduced);
        assert_eq!(ideal.generators.len(), 2);
        let em1 = t.exponential_var(&rat(-1));
        let e2 = t.exponential_var(&rat(2));
        let e3 = t.exponential_var(&rat(3));
        let e6 = t.exponential_var(&rat(6));
        let g1 = &MultiPoly::var_pow(&em1, 2) - &MultiPoly::one();
        let g2 = &(&MultiPoly::var(&e2) * &MultiPoly::var(&e3)) - &MultiPoly::var(&e6);
        assert!(ideal.generators.contains(&g1));
        assert!(ideal.generators.contains(&g2));
    }

    #[test]
    fn lattice_ideal_empty_and_square() {
        let mut t = SymbolTable::new();
        let lat = exp_lattice(&[rat(2)]);
        let ideal = lattice_ideal(&lat, &mut t, 100_000).unwrap();
        assert!(ideal.is_zero_ideal());

        let mut t = SymbolTable::new();
        let lat = exp_lattice(&[rat(2), rat(4)]);
        let ideal = lattice_ideal(&lat, &mut t, 100_000).unwrap();
        assert_eq!(ideal.generators.len(), 1);
        let e2 = t.exponential_var(&rat(2));
        let e4 = t.exponential_var(&rat(4));
        let g = &MultiPoly::var_pow(&e2, 2) - &MultiPoly::var(&e4);
        assert_eq!(ideal.generators[0], g);
    }

    #[test]
    fn lattice_generators_vanish_pointwise() {
        let mut t = SymbolTable::new();
        let thetas = vec![ratio(-2, 3), rat(6), rat(-4), ratio(9, 4)];
        let lat = exp_lattice(&thetas);
        let ideal = lattice_ideal(&lat, &mut t, 200_000).unwrap();
        let evars: Vec<VarId> = thetas.iter().map(|x| t.exponential_var(x)).collect();
        for n in 0..=10 {
            let mut bind = std::collections::BTreeMap::new();
            for (e, th) in evars.iter().zip(&thetas) {
                bind.insert(e.clone(), pow_i64(th, n));
            }
            for g in &ideal.generators {
                assert!(g.eval(&bind).is_zero(), "generator {:?} at n={}", g, n);
            }
        }
    }
}
