//! Closed-form solving of linear recurrences.
//!
//! Constant-coefficient operators go through characteristic-root analysis;
//! polynomial-coefficient operators go through hypergeometric solution search
//! (candidate quotients `z * a/b * c(x+1)/c(x)` with `a` dividing the
//! trailing coefficient, `b` dividing the shifted leading coefficient, `z` a
//! rational root of the leading-coefficient polynomial in `z`, and `c` a
//! polynomial solution of the associated auxiliary recurrence). Solutions are
//! matched against initial values by exact linear algebra.
//!
//! Everything is restricted to rational data: irrational characteristic
//! roots or irrational factorial offsets are reported as structured errors,
//! not approximated.

use num_traits::{One, Zero};

use crate::closedform::{shift_term_argument, ClosedForm};
use crate::hyper::{quotient_to_term, HypergeometricTerm};
use crate::linsys::{solve_linear_system, LinearSolution};
use crate::multipoly::MultiPoly;
use crate::ore::OreOperator;
use crate::rational::{rat, Rational};
use crate::ratfunc::RatFunc;
use crate::recurrence::Recurrence;
use crate::unipoly::{LinearSplit, UniPoly};
use crate::vars::{SymbolTable, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("variable {variable}: characteristic factor {factor} has no rational roots")]
    NonRationalEigenvalue { variable: String, factor: String },
    #[error("variable {variable}: found {found} independent hypergeometric solutions, need {needed}")]
    NoHypergeometricBasis {
        variable: String,
        found: usize,
        needed: usize,
    },
    #[error("variable {variable}: initial values are inconsistent with the solution space")]
    InconsistentInitialValues { variable: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    CFinite,
    Hypergeometric,
    ExtendedPSolvable,
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub status: SolveStatus,
    pub form: ClosedForm,
}

/// Default cap on the degree of the auxiliary polynomial `c`.
pub const DEFAULT_DEGREE_CAP: u32 = 20;

/// Solve a recurrence into a closed form, dispatching on coefficient shape.
pub fn assemble_closed_form(
    rec: &Recurrence,
    table: &mut SymbolTable,
    degree_cap: u32,
) -> Result<SolverReport, SolveError> {
    let hom = rec.homogenize();
    if hom.operator.has_constant_coeffs() {
        let form = solve_cfinite(&hom, table)?;
        return Ok(SolverReport {
            status: SolveStatus::CFinite,
            form,
        });
    }

    let (core, strip) = strip_shift_factor(&hom.operator);
    let needed = core.ord();
    let raw = petkovsek_hyper_solutions(&core, degree_cap);
    let shifted: Vec<HypergeometricTerm> = raw
        .iter()
        .map(|t| shift_term_argument(t, strip as i64))
        .collect();
    let basis = reduce_independent(shifted);
    if basis.len() < needed {
        return Err(SolveError::NoHypergeometricBasis {
            variable: hom.variable.name().to_string(),
            found: basis.len(),
            needed,
        });
    }
    let form = fit_initial_values(&hom, basis, strip as i64, table)?;
    let status = if rec.order() == 1 && rec.is_homogeneous() {
        SolveStatus::Hypergeometric
    } else {
        SolveStatus::ExtendedPSolvable
    };
    Ok(SolverReport { status, form })
}

/// Closed form of a homogeneous constant-coefficient recurrence as a sum of
/// `n^j theta^n` terms. Errors when the characteristic polynomial has an
/// irreducible nonlinear part.
pub fn solve_cfinite(rec: &Recurrence, table: &mut SymbolTable) -> Result<ClosedForm, SolveError> {
    assert!(rec.is_homogeneous(), "solve_cfinite needs a homogeneous recurrence");
    let coeffs: Vec<Rational> = rec
        .operator
        .coeffs()
        .iter()
        .map(|c| c.as_constant().expect("solve_cfinite needs constant coefficients"))
        .collect();
    let mut chi = UniPoly::from_coeffs(coeffs);
    // roots at zero shift the validity offset instead of entering the form
    let mut strip = 0i64;
    while !chi.is_constant() && chi.coeff(0).is_zero() {
        chi = chi.try_div(&UniPoly::var()).unwrap();
        strip += 1;
    }
    let split = chi.linear_factor_split();
    if !split.residual.is_one() {
        return Err(SolveError::NonRationalEigenvalue {
            variable: rec.variable.name().to_string(),
            factor: split.residual.to_string_with("z"),
        });
    }
    let mut basis: Vec<HypergeometricTerm> = Vec::new();
    for (zeta, mult) in &split.factors {
        let theta = -zeta.clone(); // factor x + zeta has root -zeta
        for j in 0..*mult {
            basis.push(HypergeometricTerm::new(
                theta.clone(),
                RatFunc::from_poly(UniPoly::monomial(Rational::one(), j as usize)),
                Vec::new(),
            ));
        }
    }
    fit_initial_values(rec, basis, strip, table)
}

/// Match the solution basis against the recurrence's initial values, keeping
/// leftover freedom as solver parameters.
fn fit_initial_values(
    rec: &Recurrence,
    mut basis: Vec<HypergeometricTerm>,
    strip: i64,
    table: &mut SymbolTable,
) -> Result<ClosedForm, SolveError> {
    basis.sort_by(|a, b| a.cmp_canonical(b));
    let mut n0 = rec.start + strip;
    for t in &basis {
        n0 = n0.max(t.validity_offset());
    }
    let w = basis.len();
    let vals = rec.values_prefix((n0 - rec.start) as usize + w);
    let rhs = &vals[(n0 - rec.start) as usize..];

    let matrix: Vec<Vec<MultiPoly>> = (0..w)
        .map(|i| {
            basis
                .iter()
                .map(|t| {
                    let v = t
                        .eval(n0 + i as i64)
                        .expect("basis term pole above validity offset");
                    MultiPoly::constant(v)
                })
                .collect()
        })
        .collect();
    // leftover freedom surfaces in invariants exactly like an initial value,
    // so free coefficients are allocated in the kept parameter block
    let unknowns: Vec<_> = (0..w)
        .map(|j| table.fresh(VarKind::InitialParam, &format!("{}_c{}", rec.variable.name(), j + 1)))
        .collect();
    match solve_linear_system(&matrix, rhs, &unknowns) {
        LinearSolution::Inconsistent => Err(SolveError::InconsistentInitialValues {
            variable: rec.variable.name().to_string(),
        }),
        LinearSolution::Solved { assignments, .. } => {
            let parts = assignments
                .into_iter()
                .zip(basis)
                .map(|(c, t)| {
                    let p = c
                        .as_poly()
                        .expect("numeric solution matrix gives polynomial coefficients")
                        .clone();
                    (p, t)
                })
                .collect();
            Ok(ClosedForm::new(rec.variable.clone(), parts, n0))
        }
    }
}

/// Factor `L = L' S^m` (zero low-order coefficients) and return `(L', m)`:
/// `L' = sum_j l_{j+m}(x) S^j`, whose solutions are the original solutions
/// shifted forward by `m`.
fn strip_shift_factor(op: &OreOperator) -> (OreOperator, usize) {
    let mut strip = 0;
    while op.coeff(strip).is_zero() {
        strip += 1;
    }
    if strip == 0 {
        return (op.clone(), 0);
    }
    let coeffs: Vec<RatFunc> = (strip..=op.ord()).map(|i| op.coeff(i)).collect();
    (OreOperator::from_coeffs(coeffs), strip)
}

/// All hypergeometric solutions of `L` with rational exponential bases and
/// rational factorial offsets, as canonical terms (scale-normalized, sorted,
/// duplicates removed, annihilation re-checked).
pub fn petkovsek_hyper_solutions(op: &OreOperator, degree_cap: u32) -> Vec<HypergeometricTerm> {
    let d = op.ord();
    assert!(d >= 1, "hypergeometric search needs order >= 1");
    let polys = op.polynomial_coeffs();
    assert!(
        !polys[0].is_zero(),
        "trailing coefficient must be nonzero (strip shift factors first)"
    );

    let split0 = polys[0].linear_factor_split();
    let splitd = polys[d].shift(-(d as i64 - 1)).linear_factor_split();
    let divs_a = monic_divisors(&split0);
    let divs_b = monic_divisors(&splitd);

    let mut out: Vec<HypergeometricTerm> = Vec::new();
    for a in &divs_a {
        for b in &divs_b {
            // P_i = p_i * prod_{j<i} a(x+j) * prod_{i<=j<d} b(x+j)
            let mut pis: Vec<UniPoly> = Vec::with_capacity(d + 1);
            for i in 0..=d {
                let mut q = polys[i].clone();
                for j in 0..i {
                    q = &q * &a.shift(j as i64);
                }
                for j in i..d {
                    q = &q * &b.shift(j as i64);
                }
                pis.push(q);
            }
            let mstar = pis
                .iter()
                .filter(|p| !p.is_zero())
                .map(|p| p.deg())
                .max()
                .expect("leading auxiliary polynomial vanished");
            let zpoly =
                UniPoly::from_coeffs(pis.iter().map(|p| p.coeff(mstar)).collect::<Vec<_>>());
            if zpoly.is_zero() {
                continue;
            }
            for (zroot, _) in zpoly.rational_roots() {
                if zroot.is_zero() {
                    continue;
                }
                let scaled: Vec<UniPoly> = pis
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p.scale(&crate::rational::pow_i64(&zroot, i as i64)))
                    .collect();
                for c in polynomial_solutions(&scaled, degree_cap) {
                    let quotient = &(&RatFunc::constant(zroot.clone())
                        * &RatFunc::new(a.clone(), b.clone()))
                        * &RatFunc::new(c.shift(1), c.clone());
                    if let Some(t) = quotient_to_term(&quotient) {
                        if !out.contains(&t) {
                            out.push(t);
                        }
                    }
                }
            }
        }
    }

    // keep only genuine solutions (guards against spurious candidates)
    out.retain(|t| {
        let from = op.validity_offset().max(t.validity_offset());
        op.annihilates(
            &|n| t.eval(n).expect("term pole above validity offset"),
            from,
            from + d as i64 + 6,
        )
    });
    out.sort_by(|x, y| x.cmp_canonical(y));
    out
}

/// All monic products of the split's linear factors (up to multiplicity),
/// optionally multiplied by the indivisible nonlinear residual.
fn monic_divisors(split: &LinearSplit) -> Vec<UniPoly> {
    let mut out = vec![UniPoly::one()];
    for (zeta, mult) in &split.factors {
        let lin = UniPoly::from_coeffs(vec![zeta.clone(), Rational::one()]);
        let mut next = Vec::with_capacity(out.len() * (*mult as usize + 1));
        for div in &out {
            let mut pw = UniPoly::one();
            for _ in 0..=*mult {
                next.push(div * &pw);
                pw = &pw * &lin;
            }
        }
        out = next;
    }
    if !split.residual.is_one() {
        let with_res: Vec<UniPoly> = out.iter().map(|p| p * &split.residual).collect();
        out.extend(with_res);
    }
    out
}

/// All polynomial solutions `c` of `sum_i q_i(x) c(x+i) = 0`, up to the
/// degree bound from the indicial analysis at infinity (capped).
fn polynomial_solutions(q: &[UniPoly], degree_cap: u32) -> Vec<UniPoly> {
    let d = q.len() - 1;
    // rewrite in the difference-operator basis: r_j = sum_i C(i,j) q_i
    let mut rs: Vec<UniPoly> = vec![UniPoly::zero(); d + 1];
    for j in 0..=d {
        let mut acc = UniPoly::zero();
        for i in j..=d {
            let c = binomial(i, j);
            acc = &acc + &q[i].scale(&c);
        }
        rs[j] = acc;
    }
    let m = rs
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(j, r)| r.deg() as i64 - j as i64)
        .max();
    let Some(m) = m else { return Vec::new() };
    // phi(delta) = sum over maximizers of lc(r_j) * delta(delta-1)..(delta-j+1)
    let mut phi = UniPoly::zero();
    for (j, r) in rs.iter().enumerate() {
        if r.is_zero() || r.deg() as i64 - j as i64 != m {
            continue;
        }
        let mut ff = UniPoly::constant(r.leading_coeff());
        for i in 0..j {
            ff = &ff * &UniPoly::from_coeffs(vec![rat(-(i as i64)), Rational::one()]);
        }
        phi = &phi + &ff;
    }
    let bound = phi
        .rational_roots()
        .iter()
        .filter_map(|(r, _)| crate::rational::to_i64(r))
        .filter(|&r| r >= 0)
        .max();
    let Some(bound) = bound else { return Vec::new() };
    let bound = (bound as u32).min(degree_cap) as usize;

    // linear system on the coefficients of c
    let cols: Vec<UniPoly> = (0..=bound)
        .map(|k| {
            let mut acc = UniPoly::zero();
            for (i, qi) in q.iter().enumerate() {
                if !qi.is_zero() {
                    let xk = UniPoly::monomial(Rational::one(), k).shift(i as i64);
                    acc = &acc + &(qi * &xk);
                }
            }
            acc
        })
        .collect();
    let max_deg = cols
        .iter()
        .filter_map(|p| p.degree())
        .max()
        .map(|v| v + 1)
        .unwrap_or(0);
    let rows: Vec<Vec<Rational>> = (0..max_deg)
        .map(|r| cols.iter().map(|p| p.coeff(r)).collect())
        .collect();
    rational_kernel(&rows, bound + 1)
        .into_iter()
        .map(UniPoly::from_coeffs)
        .filter(|p| !p.is_zero())
        .collect()
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * rat((n - i) as i64) / rat((i + 1) as i64);
    }
    acc
}

/// Kernel basis of a rational matrix given by rows (deterministic: one
/// vector per free column, free coordinate set to 1).
fn rational_kernel(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut next = 0;
    for col in 0..cols {
        let Some(r) = (next..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(next, r);
        let piv = m[next][col].clone();
        for rr in 0..nrows {
            if rr == next || m[rr][col].is_zero() {
                continue;
            }
            let f = &m[rr][col] / &piv;
            for cc in col..cols {
                let delta = &f * &m[next][cc];
                m[rr][cc] -= delta;
            }
        }
        pivot_of_col[col] = Some(next);
        next += 1;
        if next == nrows {
            break;
        }
    }
    let mut out = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for col in (0..cols).rev() {
            let Some(r) = pivot_of_col[col] else { continue };
            let mut acc = Rational::zero();
            for c2 in (col + 1)..cols {
                if !m[r][c2].is_zero() && !v[c2].is_zero() {
                    acc += &m[r][c2] * &v[c2];
                }
            }
            v[col] = -acc / &m[r][col];
        }
        out.push(v);
    }
    out
}

/// Reduce to a maximal linearly independent subset. Within one similarity
/// class (same theta and factor signature) dependence is dependence of the
/// rational parts over Q; across classes terms are independent.
fn reduce_independent(terms: Vec<HypergeometricTerm>) -> Vec<HypergeometricTerm> {
    let mut kept: Vec<HypergeometricTerm> = Vec::new();
    let mut class_bases: Vec<(Rational, Vec<(Rational, i64)>, Vec<RatFunc>)> = Vec::new();
    for t in terms {
        let sig: Vec<(Rational, i64)> = t
            .factors
            .iter()
            .map(|f| (f.zeta.clone(), f.exponent))
            .collect();
        let entry = class_bases
            .iter_mut()
            .find(|(th, s, _)| *th == t.theta && *s == sig);
        let entry = match entry {
            Some(e) => &mut e.2,
            None => {
                class_bases.push((t.theta.clone(), sig, Vec::new()));
                &mut class_bases.last_mut().unwrap().2
            }
        };
        if extends_span(entry, &t.rat) {
            entry.push(t.rat.clone());
            kept.push(t);
        }
    }
    kept
}

/// Does `cand` lie outside the Q-span of `set`? (Common-denominator
/// coefficient rank test.)
fn extends_span(set: &[RatFunc], cand: &RatFunc) -> bool {
    if set.is_empty() {
        return !cand.is_zero();
    }
    let mut den = cand.den().clone();
    for r in set {
        den = den.lcm(r.den());
    }
    let to_vec = |r: &RatFunc, deg: usize| -> Vec<Rational> {
        let num = r.num() * &den.try_div(r.den()).unwrap();
        (0..=deg).map(|i| num.coeff(i)).collect()
    };
    let deg = set
        .iter()
        .chain(std::iter::once(cand))
        .map(|r| (r.num().degree().unwrap_or(0)) + den.degree().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let mut rows: Vec<Vec<Rational>> = set.iter().map(|r| to_vec(r, deg)).collect();
    let target = to_vec(cand, deg);
    // eliminate target against rows
    let mut t = target;
    for row in rows.iter_mut() {
        let Some(p) = row.iter().position(|c| !c.is_zero()) else { continue };
        if t[p].is_zero() {
            continue;
        }
        let f = &t[p] / &row[p];
        for i in 0..t.len() {
            let delta = &f * &row[i];
            t[i] -= delta;
        }
    }
    !t.iter().all(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{pow_i64, ratio};
    use crate::vars::VarKind;
    use std::collections::BTreeMap;

    fn table() -> SymbolTable {
        SymbolTable::new()
    }

    fn x_poly(coeffs: &[i64]) -> RatFunc {
        RatFunc::from_poly(UniPoly::from_i64_coeffs(coeffs))
    }

    /// order-2 operator of the factorial-exponential example:
    /// S^2 - 5(x+2) S - 6(x+1)(x+2)
    fn example_order2() -> OreOperator {
        OreOperator::from_coeffs(vec![
            x_poly(&[-12, -18, -6]),
            x_poly(&[-10, -5]),
            RatFunc::one(),
        ])
    }

    #[test]
    fn petkovsek_finds_both_factorial_solutions() {
        let terms = petkovsek_hyper_solutions(&example_order2(), DEFAULT_DEGREE_CAP);
        assert_eq!(terms.len(), 2);
        // sorted by theta: (-1)^n n! first, then 6^n n!
        assert_eq!(terms[0].theta, rat(-1));
        assert_eq!(terms[1].theta, rat(6));
        for t in &terms {
            assert!(t.rat.is_one());
            assert_eq!(t.factors.len(), 1);
            assert_eq!(t.factors[0].zeta, rat(0));
            assert_eq!(t.factors[0].exponent, 1);
        }
    }

    #[test]
    fn petkovsek_factorial_alone() {
        // S - (x+1) annihilates n!
        let op = OreOperator::shift_minus(x_poly(&[1, 1]));
        let terms = petkovsek_hyper_solutions(&op, DEFAULT_DEGREE_CAP);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].theta, rat(1));
        assert_eq!(terms[0].factors[0].zeta, rat(0));
    }

    #[test]
    fn petkovsek_fibonacci_is_empty() {
        // S^2 - S - 1: golden-ratio bases are irrational
        let op = OreOperator::from_coeffs(vec![
            RatFunc::constant(rat(-1)),
            RatFunc::constant(rat(-1)),
            RatFunc::one(),
        ]);
        assert!(petkovsek_hyper_solutions(&op, DEFAULT_DEGREE_CAP).is_empty());
    }

    #[test]
    fn petkovsek_soundness_first_order_right_factor() {
        // every returned term's quotient r gives a right factor S - r
        let op = example_order2();
        for t in petkovsek_hyper_solutions(&op, DEFAULT_DEGREE_CAP) {
            let rf = OreOperator::shift_minus(t.quotient());
            let (_, rem) = op.right_divmod(&rf);
            assert!(rem.is_zero(), "S - r does not right-divide the operator");
        }
    }

    #[test]
    fn petkovsek_similar_independent_solutions() {
        // lclm(S-(x+1), S-(x+3)) annihilates both n! and (n+2)!, two similar
        // but independent terms differing by the rational factor (n+1)(n+2)
        let op = OreOperator::shift_minus(x_poly(&[1, 1]))
            .lclm(&OreOperator::shift_minus(x_poly(&[3, 1])));
        let terms = petkovsek_hyper_solutions(&op, DEFAULT_DEGREE_CAP);
        let basis = reduce_independent(terms);
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0].theta, rat(1));
        assert_eq!(basis[1].theta, rat(1));
        assert!(crate::hyper::hg_similar(&basis[0], &basis[1]).is_some());

        // the square (S-(x+1))^2 instead has only one hypergeometric
        // solution; the second one involves harmonic numbers
        let f = OreOperator::shift_minus(x_poly(&[1, 1]));
        let op = (&f * &f).monic();
        let terms = petkovsek_hyper_solutions(&op, DEFAULT_DEGREE_CAP);
        assert_eq!(reduce_independent(terms).len(), 1);
    }

    #[test]
    fn cfinite_geometric_symbolic() {
        // b(n+1) = 2 b(n), b(0) symbolic -> b0 * 2^n
        let mut t = table();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let b = t.fresh(VarKind::ProgramVar, "b");
        let b0 = t.fresh(VarKind::InitialParam, "b_0");
        let rec = Recurrence::new(
            b,
            n,
            OreOperator::shift_minus(RatFunc::constant(rat(2))),
            MultiPoly::zero(),
            vec![MultiPoly::var(&b0)],
            0,
        );
        let rep = assemble_closed_form(&rec, &mut t, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(rep.status, SolveStatus::CFinite);
        assert_eq!(rep.form.parts.len(), 1);
        let (c, term) = &rep.form.parts[0];
        assert_eq!(c, &MultiPoly::var(&b0));
        assert_eq!(term.theta, rat(2));
        let mut bind = BTreeMap::new();
        bind.insert(b0.clone(), rat(1));
        assert_eq!(rep.form.eval(10, &bind), Some(rat(1024)));
    }

    #[test]
    fn cfinite_constant_sequence() {
        let mut t = table();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let v = t.fresh(VarKind::ProgramVar, "v");
        let v0 = t.fresh(VarKind::InitialParam, "v_0");
        let rec = Recurrence::new(
            v,
            n,
            OreOperator::delta(),
            MultiPoly::zero(),
            vec![MultiPoly::var(&v0)],
            0,
        );
        let rep = assemble_closed_form(&rec, &mut t, DEFAULT_DEGREE_CAP).unwrap();
        let mut bind = BTreeMap::new();
        bind.insert(v0.clone(), ratio(3, 7));
        assert_eq!(rep.form.eval(25, &bind), Some(ratio(3, 7)));
    }

    #[test]
    fn cfinite_inhomogeneous_example() {
        // c := -3c + 2 with c(0) = 1: c(n) = 1/2 + 1/2 (-3)^n,
        // first values 1, -1, 5, -13, 41
        let mut t = table();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let c = t.fresh(VarKind::ProgramVar, "c");
        let rec = Recurrence::new(
            c,
            n,
            OreOperator::shift_minus(RatFunc::constant(rat(-3))),
            MultiPoly::constant(rat(2)),
            vec![MultiPoly::one()],
            0,
        );
        let rep = assemble_closed_form(&rec, &mut t, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(rep.status, SolveStatus::CFinite);
        let bind = BTreeMap::new();
        let expect = [rat(1), rat(-1), rat(5), rat(-13), rat(41)];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(rep.form.eval(i as i64, &bind).as_ref(), Some(e));
        }
        // structure: 1/2 + 1/2 (-3)^n
        let consts: Vec<_> = rep.form.parts.iter().map(|(c, t)| (c.as_constant().unwrap(), t.theta.clone())).collect();
        assert!(consts.contains(&(ratio(1, 2), rat(-3))));
        assert!(consts.contains(&(ratio(1, 2), rat(1))));
    }

    #[test]
    fn cfinite_irrational_roots_error() {
        // Fibonacci via constant coefficients
        let mut t = table();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let g = t.fresh(VarKind::ProgramVar, "g");
        let rec = Recurrence::new(
            g,
            n,
            OreOperator::from_coeffs(vec![
                RatFunc::constant(rat(-1)),
                RatFunc::constant(rat(-1)),
                RatFunc::one(),
            ]),
            MultiPoly::zero(),
            vec![MultiPoly::zero(), MultiPoly::one()],
            0,
        );
        let err = assemble_closed_form(&rec, &mut t, DEFAULT_DEGREE_CAP).unwrap_err();
        assert!(matches!(err, SolveError::NonRationalEigenvalue { .. }));
    }

    #[test]
    fn assemble_order2_with_symbolic_initials() {
        // closed form (k1 (-1)^n + k2 6^n) n! with
        // k1 = (6 a0 - a1)/7, k2 = (a0 + a1)/7
        let mut t = table();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let a = t.fresh(VarKind::ProgramVar, "a");
        let a0 = t.fresh(VarKind::InitialParam, "a_0");
        let a1 = t.fresh(VarKind::InitialParam, "a_1");
        let rec = Recurrence::new(
            a,
            n,
            example_order2(),
            MultiPoly::zero(),
            vec![MultiPoly::var(&a0), MultiPoly::var(&a1)],
            0,
        );
        let rep = assemble_closed_form(&rec, &mut t, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(rep.status, SolveStatus::ExtendedPSolvable);
        assert_eq!(rep.form.parts.len(), 2);
        // the initial-value system is v(0) = k1 + k2, v(1) = -k1 + 6 k2
        let k1 = &(&MultiPoly::var(&a0).scale(&rat(6)) - &MultiPoly::var(&a1)).scale(&ratio(1, 7));
        let k2 = &(&MultiPoly::var(&a0) + &MultiPoly::var(&a1)).scale(&ratio(1, 7));
        assert_eq!(&rep.form.parts[0].0, k1); // theta = -1 term
        assert_eq!(&rep.form.parts[1].0, k2); // theta = 6 term

        // numeric spot check: a(0)=2, a(1)=5 gives k1 = k2 = 1 and
        // a(3) = ((-1)^3 + 6^3) 3! = 1290
        let mut bind = BTreeMap::new();
        bind.insert(a0.clone(), rat(2));
        bind.insert(a1.clone(), rat(5));
        assert_eq!(rep.form.eval(3, &bind), Some(rat(1290)));
    }

    #[test]
    fn assemble_first_order_factorial_forms() {
        // c(n+1) = 3(n+1) c(n) -> c0 3^n n!; d(n+1) = (n+1) d(n) -> d0 n!
        let mut t = table();
        let n = t.fresh(VarKind::LoopCounter, "n");
        let c = t.fresh(VarKind::ProgramVar, "c");
        let c0 = t.fresh(VarKind::InitialParam, "c_0");
        let rec = Recurrence::new(
            c,
            n.clone(),
            OreOperator::shift_minus(x_poly(&[3, 3])),
            MultiPoly::zero(),
            vec![MultiPoly::var(&c0)],
            0,
        );
        let rep = assemble_closed_form(&rec, &mut t, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(rep.status, SolveStatus::Hypergeometric);
        let (coeff, term) = &rep.form.parts[0];
        assert_eq!(coeff, &MultiPoly::var(&c0));
        assert_eq!(term.theta, rat(3));
        assert_eq!(term.factors[0].zeta, rat(0));

        let d = t.fresh(VarKind::ProgramVar, "d");
        let d0 = t.fresh(VarKind::InitialParam, "d_0");
        let rec = Recurrence::new(
            d,
            n,
            OreOperator::shift_minus(x_poly(&[1, 1])),
            MultiPoly::zero(),
            vec![MultiPoly::var(&d0)],
            0,
        );
        let rep = assemble_closed_form(&rec, &mut t, DEFAULT_DEGREE_CAP).unwrap();
        let mut bind = BTreeMap::new();
        bind.insert(d0.clone(), rat(2));
        assert_eq!(rep.form.eval(4, &bind), Some(rat(48))); // 2 * 4!
    }

    #[test]
    fn annihilation_and_initial_agreement_properties() {
        // solver output annihilated by its operator, agreeing with unrolled
        // values, over random rational bindings
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for case in 0..5 {
            let mut t = table();
            let n = t.fresh(VarKind::LoopCounter, "n");
            let v = t.fresh(VarKind::ProgramVar, "v");
            let v0 = t.fresh(VarKind::InitialParam, "v_0");
            let v1 = t.fresh(VarKind::InitialParam, "v_1");
            let op = match case % 3 {
                0 => example_order2(),
                1 => OreOperator::from_coeffs(vec![
                    RatFunc::constant(rat(6)),
                    RatFunc::constant(rat(-5)),
                    RatFunc::one(),
                ]),
                _ => {
                    // lclm(S - 2(x+1), S - 3): mixed factorial and geometric
                    OreOperator::shift_minus(x_poly(&[2, 2]))
                        .lclm(&OreOperator::shift_minus(RatFunc::constant(rat(3))))
                }
            };
            let d = op.ord();
            let inits = vec![MultiPoly::var(&v0), MultiPoly::var(&v1)][..d.min(2)].to_vec();
            let inits = if inits.len() < d {
                (0..d).map(|i| if i == 0 { MultiPoly::var(&v0) } else { MultiPoly::var(&v1) }).collect()
            } else {
                inits
            };
            let rec = Recurrence::new(v, n, op.clone(), MultiPoly::zero(), inits, 0);
            let rep = assemble_closed_form(&rec, &mut t, DEFAULT_DEGREE_CAP).unwrap();
            for _ in 0..5 {
                let mut bind = BTreeMap::new();
                bind.insert(v0.clone(), ratio(rng.gen_range(-20..21), rng.gen_range(1..9)));
                bind.insert(v1.clone(), ratio(rng.gen_range(-20..21), rng.gen_range(1..9)));
                let n0 = rep.form.start;
                // annihilation at n0..n0+25
                assert!(op.annihilates(
                    &|m| rep.form.eval(m, &bind).unwrap(),
                    n0,
                    n0 + 25
                ));
                // agreement with direct unrolling
                let vals = rec.values_prefix((n0 + 10) as usize + rec.order());
                for m in n0..(n0 + 10) {
                    let direct = vals[m as usize].eval(&bind);
                    assert_eq!(rep.form.eval(m, &bind), Some(direct));
                }
            }
        }
    }

    #[test]
    fn geometric_power_of_theta() {
        let v = pow_i64(&rat(2), 10);
        assert_eq!(v, rat(1024));
    }
}
