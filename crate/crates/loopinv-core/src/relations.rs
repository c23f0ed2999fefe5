//! The ideal of all algebraic relations among solved sequences.
//!
//! Every solved variable is written as a rational function of the loop
//! counter, exponential variables `e = theta^n` and factorial variables
//! `h = (n+zeta)^[n]`. The relation ideal of the sequences is then the sum
//! of the exponential lattice ideal and the graph relations
//! `g_i v_i - f_i`, intersected with the ring of program variables and
//! parameters; the factorial variables satisfy no extra relations because
//! representatives with pairwise non-integer differences are algebraically
//! independent over the field generated by counter and exponentials.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::closedform::ClosedForm;
use crate::groebner::{eliminate, reduce_basis, IdealBasis, IdealError};
use crate::lattice::{exp_lattice, lattice_ideal};
use crate::multipoly::MultiPoly;
use crate::rational::Rational;
use crate::unipoly::UniPoly;
use crate::vars::{SymbolTable, VarId, VarKind};

/// Compute the relation ideal of the given closed forms, projected onto
/// `keep` plus every parameter that occurs. The result is a Groebner basis
/// over the kept variables (graded-reverse-lex), not yet reduced.
pub fn algebraic_relations(
    forms: &[ClosedForm],
    keep: &[VarId],
    counter: &VarId,
    table: &mut SymbolTable,
    step_cap: usize,
) -> Result<IdealBasis, IdealError> {
    let mut thetas: BTreeSet<Rational> = BTreeSet::new();
    let mut zetas: BTreeSet<Rational> = BTreeSet::new();
    for f in forms {
        thetas.extend(f.thetas());
        zetas.extend(f.zetas());
    }
    // allocate in sorted order so the ring layout is reproducible
    let thetas: Vec<Rational> = thetas.into_iter().collect();
    for t in &thetas {
        table.exponential_var(t);
    }
    for z in &zetas {
        table.factorial_var(z);
    }

    let mut gens: Vec<MultiPoly> = Vec::new();
    if !thetas.is_empty() {
        let lat = exp_lattice(&thetas);
        let ideal = lattice_ideal(&lat, table, step_cap)?;
        gens.extend(ideal.generators);
    }
    for f in forms {
        gens.push(defining_polynomial(f, counter, table));
    }

    let mut occurring: BTreeSet<VarId> = BTreeSet::new();
    for g in &gens {
        for v in g.vars() {
            if g.contains_var(v) {
                occurring.insert(v.clone());
            }
        }
    }
    let keep_set: BTreeSet<VarId> = keep.iter().cloned().collect();
    let drop: BTreeSet<VarId> = occurring
        .into_iter()
        .filter(|v| !keep_set.contains(v) && v.kind != VarKind::InitialParam)
        .collect();
    eliminate_raw(&gens, &drop, step_cap)
}

/// `g v - f` for one closed form `v = f/g` over (counter, e-vars, h-vars,
/// parameters), with `f` and `g` coprime.
fn defining_polynomial(form: &ClosedForm, counter: &VarId, table: &mut SymbolTable) -> MultiPoly {
    // common denominator: lcm of the rational parts' denominators and the
    // largest negative factorial powers
    let mut den_x = UniPoly::one();
    let mut neg_pow: BTreeMap<Rational, i64> = BTreeMap::new();
    for (_, t) in &form.parts {
        den_x = den_x.lcm(t.rat.den());
        for f in &t.factors {
            if f.exponent < 0 {
                let e = neg_pow.entry(f.zeta.clone()).or_insert(0);
                *e = (*e).max(-f.exponent);
            }
        }
    }

    let mut f_poly = MultiPoly::zero();
    for (coeff, t) in &form.parts {
        let mut term = coeff.clone();
        if !t.theta.is_one() {
            term = &term * &MultiPoly::var(&table.exponential_var(&t.theta));
        }
        let scaled_num = t.rat.num() * &den_x.try_div(t.rat.den()).unwrap();
        term = &term * &MultiPoly::from_unipoly(&scaled_num, counter);
        for (zeta, max_neg) in &neg_pow {
            let own = t
                .factors
                .iter()
                .find(|f| &f.zeta == zeta)
                .map(|f| f.exponent)
                .unwrap_or(0);
            let e = max_neg + own.min(0);
            debug_assert!(e >= 0);
            if e > 0 {
                term = &term * &MultiPoly::var_pow(&table.factorial_var(zeta), e as u32);
            }
        }
        for f in &t.factors {
            if f.exponent > 0 {
                term = &term
                    * &MultiPoly::var_pow(&table.factorial_var(&f.zeta), f.exponent as u32);
            }
        }
        f_poly = &f_poly + &term;
    }

    let mut g_poly = MultiPoly::from_unipoly(&den_x, counter);
    for (zeta, e) in &neg_pow {
        g_poly = &g_poly * &MultiPoly::var_pow(&table.factorial_var(zeta), *e as u32);
    }

    // cancel any common counter-polynomial content so f and g stay coprime
    if !den_x.is_constant() && !f_poly.is_zero() {
        let content = counter_content(&f_poly, counter);
        let common = content.gcd(&den_x);
        if !common.is_constant() {
            let divisor = MultiPoly::from_unipoly(&common, counter);
            f_poly = f_poly.try_div(&divisor).unwrap();
            g_poly = g_poly.try_div(&divisor).unwrap();
        }
    }

    &(&MultiPoly::var(&form.variable) * &g_poly) - &f_poly
}

/// Gcd of the polynomial's coefficients viewed as univariate polynomials in
/// the counter.
fn counter_content(p: &MultiPoly, counter: &VarId) -> UniPoly {
    let Some(ci) = p.var_index(counter) else {
        return UniPoly::one();
    };
    let mut groups: BTreeMap<Vec<u32>, Vec<(usize, Rational)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut key = m.clone();
        let e = key[ci] as usize;
        key[ci] = 0;
        groups.entry(key).or_default().push((e, c.clone()));
    }
    let mut acc: Option<UniPoly> = None;
    for (_, entries) in groups {
        let deg = entries.iter().map(|(e, _)| *e).max().unwrap_or(0);
        let mut coeffs = vec![Rational::from_integer(0.into()); deg + 1];
        for (e, c) in entries {
            coeffs[e] = c;
        }
        let poly = UniPoly::from_coeffs(coeffs);
        acc = Some(match acc {
            None => poly,
            Some(g) => g.gcd(&poly),
        });
        if acc.as_ref().is_some_and(|g| g.is_constant()) {
            break;
        }
    }
    acc.unwrap_or_else(UniPoly::one)
}

/// Elimination returning the raw (non-reduced) projected Groebner basis.
pub fn eliminate_raw(
    gens: &[MultiPoly],
    drop: &BTreeSet<VarId>,
    step_cap: usize,
) -> Result<IdealBasis, IdealError> {
    eliminate(gens, drop, step_cap)
}

/// Optionally reduce a basis in place.
pub fn finish_basis(basis: IdealBasis, reduce: bool) -> IdealBasis {
    if reduce {
        reduce_basis(&basis)
    } else {
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::{FactorialFactor, HypergeometricTerm};
    use crate::multipoly::parse_poly;
    use crate::ratfunc::RatFunc;
    use crate::rational::rat;

    #[test]
    fn single_exponential_has_no_relations() {
        // v(n) = 2^n v0: no polynomial relation in v alone
        let mut t = SymbolTable::new();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let v = t.fresh(VarKind::ProgramVar, "v");
        let v0 = t.fresh(VarKind::InitialParam, "v_0");
        let form = ClosedForm::new(
            v.clone(),
            vec![(
                MultiPoly::var(&v0),
                HypergeometricTerm::new(rat(2), RatFunc::one(), vec![]),
            )],
            0,
        );
        let basis = algebraic_relations(&[form], &[v], &n, &mut t, 100_000).unwrap();
        assert!(basis.is_zero_ideal());
    }

    #[test]
    fn paper_specialized_ideal() {
        // a = ((-1)^n + 6^n) n!, b = 2^n, c = 3^n n!, d = n!
        // relation ideal is exactly <b^2 c^2 - 2 a b c + a^2 - d^2>
        let mut t = SymbolTable::new();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let a = t.fresh(VarKind::ProgramVar, "a");
        let b = t.fresh(VarKind::ProgramVar, "b");
        let c = t.fresh(VarKind::ProgramVar, "c");
        let d = t.fresh(VarKind::ProgramVar, "d");
        let fact = |theta: i64| {
            HypergeometricTerm::new(
                rat(theta),
                RatFunc::one(),
                vec![FactorialFactor { zeta: rat(0), exponent: 1 }],
            )
        };
        let plain = |theta: i64| HypergeometricTerm::new(rat(theta), RatFunc::one(), vec![]);
        let forms = vec![
            ClosedForm::new(
                a.clone(),
                vec![(MultiPoly::one(), fact(-1)), (MultiPoly::one(), fact(6))],
                0,
            ),
            ClosedForm::new(b.clone(), vec![(MultiPoly::one(), plain(2))], 0),
            ClosedForm::new(c.clone(), vec![(MultiPoly::one(), fact(3))], 0),
            ClosedForm::new(d.clone(), vec![(MultiPoly::one(), fact(1))], 0),
        ];
        let keep = vec![a.clone(), b.clone(), c.clone(), d.clone()];
        let basis = algebraic_relations(&forms, &keep, &n, &mut t, 500_000).unwrap();
        let red = finish_basis(basis, true);
        let lk = |s: &str| keep.iter().find(|v| v.name() == s).cloned();
        let target = parse_poly("b^2*c^2 - 2*a*b*c + a^2 - d^2", &lk).unwrap();
        assert_eq!(red.generators.len(), 1);
        assert!(red.contains(&target));
        assert!(target.try_div(&red.generators[0]).is_some());
    }

    #[test]
    fn negative_powers_and_denominators() {
        // v = v0 / n!, w = 2^n w0: relation v-free, but v*u with u = n! u0
        // gives u v - u0 v0
        let mut t = SymbolTable::new();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let v = t.fresh(VarKind::ProgramVar, "v");
        let u = t.fresh(VarKind::ProgramVar, "u");
        let v0 = t.fresh(VarKind::InitialParam, "v_0");
        let u0 = t.fresh(VarKind::InitialParam, "u_0");
        let inv_fact = HypergeometricTerm::new(
            rat(1),
            RatFunc::one(),
            vec![FactorialFactor { zeta: rat(0), exponent: -1 }],
        );
        let fact = HypergeometricTerm::new(
            rat(1),
            RatFunc::one(),
            vec![FactorialFactor { zeta: rat(0), exponent: 1 }],
        );
        let forms = vec![
            ClosedForm::new(v.clone(), vec![(MultiPoly::var(&v0), inv_fact)], 0),
            ClosedForm::new(u.clone(), vec![(MultiPoly::var(&u0), fact)], 0),
        ];
        let keep = vec![v.clone(), u.clone()];
        let basis = algebraic_relations(&forms, &keep, &n, &mut t, 100_000).unwrap();
        let red = finish_basis(basis, true);
        assert_eq!(red.generators.len(), 1);
        let lk = |s: &str| match s {
            "v" => Some(v.clone()),
            "u" => Some(u.clone()),
            "v_0" => Some(v0.clone()),
            "u_0" => Some(u0.clone()),
            _ => None,
        };
        let target = parse_poly("u*v - u_0*v_0", &lk).unwrap();
        assert!(red.contains(&target));
    }

    #[test]
    fn euclid_symbolic_relations() {
        // quo(n) = quo0 + n, rem(n) = rem0 - n*y:
        // ideal <rem + quo*y - y*quo0 - rem0>
        let mut t = SymbolTable::new();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let rem = t.fresh(VarKind::ProgramVar, "rem");
        let quo = t.fresh(VarKind::ProgramVar, "quo");
        let y = t.fresh(VarKind::ProgramVar, "y"); // symbolic constant
        let quo0 = t.fresh(VarKind::InitialParam, "quo_0");
        let rem0 = t.fresh(VarKind::InitialParam, "rem_0");
        let one_term = HypergeometricTerm::constant_one();
        let linear = HypergeometricTerm::new(
            rat(1),
            RatFunc::from_poly(UniPoly::var()),
            vec![],
        );
        let forms = vec![
            ClosedForm::new(
                quo.clone(),
                vec![
                    (MultiPoly::var(&quo0), one_term.clone()),
                    (MultiPoly::one(), linear.clone()),
                ],
                0,
            ),
            ClosedForm::new(
                rem.clone(),
                vec![
                    (MultiPoly::var(&rem0), one_term),
                    (-&MultiPoly::var(&y), linear),
                ],
                0,
            ),
        ];
        let keep = vec![rem.clone(), quo.clone(), y.clone()];
        let basis = algebraic_relations(&forms, &keep, &n, &mut t, 100_000).unwrap();
        let red = finish_basis(basis, true);
        assert_eq!(red.generators.len(), 1);
        let lk = |s: &str| match s {
            "rem" => Some(rem.clone()),
            "quo" => Some(quo.clone()),
            "y" => Some(y.clone()),
            "quo_0" => Some(quo0.clone()),
            "rem_0" => Some(rem0.clone()),
            _ => None,
        };
        let target = parse_poly("rem + quo*y - y*quo_0 - rem_0", &lk).unwrap();
        assert!(red.contains(&target));
        assert!(red.generators[0] == target || target.try_div(&red.generators[0]).is_some());
    }
}
