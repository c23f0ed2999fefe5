//! Buchberger's algorithm, multivariate normal forms and elimination.
//!
//! Plain Buchberger with the coprime-leading-term and chain criteria and
//! degree-ordered pair selection; the polynomial systems this crate meets
//! are small, so no matrix-based reduction is attempted. A configurable step
//! cap turns runaway computations into a structured error instead of an
//! unresponsive process.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use num_traits::{One, Zero};

use crate::multipoly::MultiPoly;
use crate::order::MonomialOrder;
use crate::rational::Rational;
use crate::vars::VarId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdealError {
    #[error("Groebner computation exceeded the step cap ({cap} reduction steps)")]
    StepLimit { cap: usize },
}

/// Default cap on reduction steps per Groebner run.
pub const DEFAULT_GB_STEP_CAP: usize = 2_000_000;

/// A generating set of an ideal over an explicit variable list, tagged with
/// the monomial order it was computed under.
#[derive(Debug, Clone)]
pub struct IdealBasis {
    pub vars: Vec<VarId>,
    pub generators: Vec<MultiPoly>,
    pub order: MonomialOrder,
    pub reduced: bool,
}

impl IdealBasis {
    pub fn is_zero_ideal(&self) -> bool {
        self.generators.is_empty()
    }

    /// Unique remainder of `p` under multivariate division by the basis
    /// (requires the basis to be a Groebner basis for uniqueness).
    pub fn normal_form(&self, p: &MultiPoly) -> MultiPoly {
        let vars = union_vars(self.vars.clone(), p.vars());
        let gens: Vec<OrdPoly> = self
            .generators
            .iter()
            .map(|g| OrdPoly::from_multi(g, &vars, &self.order))
            .collect();
        let mut steps = 0;
        let r = reduce_full(
            OrdPoly::from_multi(p, &vars, &self.order),
            &gens,
            &vars,
            &self.order,
            &mut steps,
            usize::MAX,
        )
        .expect("no cap");
        r.to_multi(&vars)
    }

    /// Ideal membership via a zero normal form.
    pub fn contains(&self, p: &MultiPoly) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Verify the Groebner property: every S-polynomial reduces to zero.
    pub fn is_groebner(&self) -> bool {
        let vars = self.vars.clone();
        let gens: Vec<OrdPoly> = self
            .generators
            .iter()
            .map(|g| OrdPoly::from_multi(g, &vars, &self.order))
            .collect();
        let mut steps = 0;
        for i in 0..gens.len() {
            for j in (i + 1)..gens.len() {
                let s = spoly(&gens[i], &gens[j], &vars, &self.order);
                let r = reduce_full(s, &gens, &vars, &self.order, &mut steps, usize::MAX)
                    .expect("no cap");
                if !r.terms.is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// Compute a Groebner basis of the given generators.
pub fn buchberger(
    gens: &[MultiPoly],
    order: &MonomialOrder,
    step_cap: usize,
) -> Result<IdealBasis, IdealError> {
    let mut vars: Vec<VarId> = Vec::new();
    for g in gens {
        vars = union_vars(vars, g.vars());
    }
    let mut basis: Vec<OrdPoly> = Vec::new();
    let mut steps = 0usize;
    let mut pairs: BinaryHeap<Pair> = BinaryHeap::new();
    let mut alive: BTreeSet<(usize, usize)> = BTreeSet::new();

    for g in gens {
        let p = OrdPoly::from_multi(&g.primitive(), &vars, order);
        if p.terms.is_empty() {
            continue;
        }
        push_with_pairs(p, &mut basis, &mut pairs, &mut alive, &vars, order);
    }

    while let Some(pair) = pairs.pop() {
        let (i, j) = (pair.i, pair.j);
        if !alive.remove(&(i, j)) {
            continue;
        }
        let (fi, fj) = (&basis[i], &basis[j]);
        let lti = &fi.terms[0].0;
        let ltj = &fj.terms[0].0;
        // first criterion: coprime leading monomials
        if lti.iter().zip(ltj.iter()).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        // chain criterion
        let lcm: Vec<u32> = lti.iter().zip(ltj.iter()).map(|(a, b)| *a.max(b)).collect();
        let mut skip = false;
        for (k, fk) in basis.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            if divides(&fk.terms[0].0, &lcm)
                && !alive.contains(&key(i, k))
                && !alive.contains(&key(j, k))
            {
                skip = true;
                break;
            }
        }
        if skip {
            continue;
        }
        let s = spoly(fi, fj, &vars, order);
        let r = reduce_full(s, &basis, &vars, order, &mut steps, step_cap)
            .ok_or(IdealError::StepLimit { cap: step_cap })?;
        if !r.terms.is_empty() {
            push_with_pairs(r.primitive(), &mut basis, &mut pairs, &mut alive, &vars, order);
        }
    }

    let generators: Vec<MultiPoly> = basis.iter().map(|p| p.to_multi(&vars)).collect();
    Ok(IdealBasis {
        vars,
        generators,
        order: order.clone(),
        reduced: false,
    })
}

/// Reduce a Groebner basis: minimal generators, monic, fully tail-reduced,
/// sorted by leading monomial. Unique for a fixed order.
pub fn reduce_basis(basis: &IdealBasis) -> IdealBasis {
    let vars = basis.vars.clone();
    let order = &basis.order;
    let mut polys: Vec<OrdPoly> = basis
        .generators
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| OrdPoly::from_multi(g, &vars, order))
        .collect();
    // minimalize: drop any generator whose lead is divisible by another lead
    let mut keep: Vec<bool> = vec![true; polys.len()];
    for i in 0..polys.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..polys.len() {
            if i == j || !keep[j] {
                continue;
            }
            if divides(&polys[j].terms[0].0, &polys[i].terms[0].0)
                && (!divides(&polys[i].terms[0].0, &polys[j].terms[0].0) || j < i)
            {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<OrdPoly> = polys
        .drain(..)
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect();
    // tail-reduce each against the others
    let mut reduced: Vec<OrdPoly> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<OrdPoly> = minimal
            .iter()
            .enumerate()
            .filter_map(|(j, p)| (j != i).then(|| p.clone()))
            .collect();
        let mut steps = 0;
        let r = reduce_full(
            minimal[i].clone(),
            &others,
            &vars,
            order,
            &mut steps,
            usize::MAX,
        )
        .expect("no cap");
        if !r.terms.is_empty() {
            reduced.push(r.monic());
        }
    }
    reduced.sort_by(|a, b| order.cmp(&vars, &a.terms[0].0, &b.terms[0].0));
    IdealBasis {
        vars: vars.clone(),
        generators: reduced.iter().map(|p| p.to_multi(&vars)).collect(),
        order: basis.order.clone(),
        reduced: true,
    }
}

/// Elimination ideal: Groebner basis under a block order, intersected with
/// the subring of variables outside `drop`. The result is a Groebner basis
/// over the kept variables under graded-reverse-lex.
pub fn eliminate(
    gens: &[MultiPoly],
    drop: &BTreeSet<VarId>,
    step_cap: usize,
) -> Result<IdealBasis, IdealError> {
    let order = MonomialOrder::Block {
        eliminated: drop.clone(),
    };
    let gb = buchberger(gens, &order, step_cap)?;
    let kept: Vec<MultiPoly> = gb
        .generators
        .iter()
        .filter(|g| drop.iter().all(|v| !g.contains_var(v)))
        .map(|g| g.compress())
        .collect();
    let mut vars: Vec<VarId> = Vec::new();
    for g in &kept {
        vars = union_vars(vars, g.vars());
    }
    let projected = IdealBasis {
        vars,
        generators: kept,
        order: MonomialOrder::GrevLex,
        reduced: false,
    };
    Ok(reduce_basis(&projected))
}

/// Resultant of two polynomials with respect to one variable, by
/// fraction-free Gaussian elimination on the Sylvester matrix. Test-side
/// oracle for elimination on small systems.
pub fn resultant_in(p: &MultiPoly, q: &MultiPoly, v: &VarId) -> MultiPoly {
    let pc = p.coeffs_in(v);
    let qc = q.coeffs_in(v);
    let m = pc.len() - 1;
    let n = qc.len() - 1;
    assert!(m > 0 && n > 0, "resultant needs positive degrees");
    let size = m + n;
    let mut mat: Vec<Vec<MultiPoly>> = vec![vec![MultiPoly::zero(); size]; size];
    for row in 0..n {
        for (k, c) in pc.iter().enumerate() {
            mat[row][row + (m - k)] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in qc.iter().enumerate() {
            mat[n + row][row + (n - k)] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

/// Fraction-free determinant (Bareiss); all divisions are exact.
fn bareiss_determinant(mut m: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one();
    }
    let mut sign = false;
    let mut prev = MultiPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return MultiPoly::zero();
            };
            m.swap(k, swap);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.try_div(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = MultiPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -&det
    } else {
        det
    }
}

// ---- internal ordered representation ----

#[derive(Debug, Clone)]
struct OrdPoly {
    /// Terms sorted descending under the active order; never empty unless
    /// the polynomial is zero.
    terms: Vec<(Vec<u32>, Rational)>,
}

impl OrdPoly {
    fn from_multi(p: &MultiPoly, vars: &[VarId], order: &MonomialOrder) -> OrdPoly {
        let emb = p.embed(vars);
        let mut terms: Vec<(Vec<u32>, Rational)> =
            emb.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        terms.sort_by(|(a, _), (b, _)| order.cmp(vars, b, a));
        OrdPoly { terms }
    }

    fn to_multi(&self, vars: &[VarId]) -> MultiPoly {
        let mut acc = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = &t * &MultiPoly::var_pow(&vars[i], e);
                }
            }
            acc = &acc + &t;
        }
        acc.embed(vars)
    }

    fn monic(&self) -> OrdPoly {
        let lc = &self.terms[0].1;
        OrdPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c / lc))
                .collect(),
        }
    }

    fn primitive(&self) -> OrdPoly {
        let mut content = crate::rational::rational_content(self.terms.iter().map(|(_, c)| c));
        if self.terms[0].1 < Rational::zero() {
            content = -content;
        }
        if content.is_one() {
            return self.clone();
        }
        OrdPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c / &content))
                .collect(),
        }
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// `p - coef * x^shift * q`, merged in order.
fn axpy(
    p: &OrdPoly,
    coef: &Rational,
    shift: &[u32],
    q: &OrdPoly,
    vars: &[VarId],
    order: &MonomialOrder,
) -> OrdPoly {
    let mut out = Vec::with_capacity(p.terms.len() + q.terms.len());
    let mut i = 0;
    let mut qi = 0;
    let shifted: Vec<(Vec<u32>, Rational)> = q
        .terms
        .iter()
        .map(|(m, c)| {
            let mm: Vec<u32> = m.iter().zip(shift).map(|(a, b)| a + b).collect();
            (mm, c * coef)
        })
        .collect();
    while i < p.terms.len() || qi < shifted.len() {
        if i == p.terms.len() {
            let (m, c) = &shifted[qi];
            out.push((m.clone(), -c));
            qi += 1;
        } else if qi == shifted.len() {
            out.push(p.terms[i].clone());
            i += 1;
        } else {
            match order.cmp(vars, &p.terms[i].0, &shifted[qi].0) {
                Ordering::Greater => {
                    out.push(p.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (m, c) = &shifted[qi];
                    out.push((m.clone(), -c));
                    qi += 1;
                }
                Ordering::Equal => {
                    let c = &p.terms[i].1 - &shifted[qi].1;
                    if !c.is_zero() {
                        out.push((p.terms[i].0.clone(), c));
                    }
                    i += 1;
                    qi += 1;
                }
            }
        }
    }
    OrdPoly { terms: out }
}

/// `lc_g * x^sf * f - lc_f * x^sg * g` where the shifts move both leading
/// terms onto their lcm (shifting preserves any admissible order, so the
/// scaled copy of `f` is sorted and `axpy` can do the merge).
fn spoly(f: &OrdPoly, g: &OrdPoly, vars: &[VarId], order: &MonomialOrder) -> OrdPoly {
    let ltf = f.terms[0].clone();
    let ltg = g.terms[0].clone();
    let lcm: Vec<u32> = ltf.0.iter().zip(&ltg.0).map(|(a, b)| *a.max(b)).collect();
    let sf: Vec<u32> = lcm.iter().zip(&ltf.0).map(|(a, b)| a - b).collect();
    let sg: Vec<u32> = lcm.iter().zip(&ltg.0).map(|(a, b)| a - b).collect();
    let f_scaled = OrdPoly {
        terms: f
            .terms
            .iter()
            .map(|(m, c)| {
                let mm: Vec<u32> = m.iter().zip(&sf).map(|(a, b)| a + b).collect();
                (mm, c * &ltg.1)
            })
            .collect(),
    };
    axpy(&f_scaled, &ltf.1, &sg, g, vars, order)
}

/// Full reduction of `p` by the basis; counts steps against the cap.
fn reduce_full(
    mut p: OrdPoly,
    basis: &[OrdPoly],
    vars: &[VarId],
    order: &MonomialOrder,
    steps: &mut usize,
    cap: usize,
) -> Option<OrdPoly> {
    let mut done: Vec<(Vec<u32>, Rational)> = Vec::new();
    'outer: while !p.terms.is_empty() {
        *steps += 1;
        if *steps > cap {
            return None;
        }
        let (lm, lc) = p.terms[0].clone();
        for g in basis {
            if g.terms.is_empty() {
                continue;
            }
            let (gm, gc) = &g.terms[0];
            if divides(gm, &lm) {
                let shift: Vec<u32> = lm.iter().zip(gm).map(|(a, b)| a - b).collect();
                let coef = &lc / gc;
                p = axpy(&p, &coef, &shift, g, vars, order);
                continue 'outer;
            }
        }
        // irreducible leading term moves to the remainder
        done.push(p.terms.remove(0));
    }
    // `done` was emitted in descending order already
    Some(OrdPoly { terms: done })
}

fn push_with_pairs(
    p: OrdPoly,
    basis: &mut Vec<OrdPoly>,
    pairs: &mut BinaryHeap<Pair>,
    alive: &mut BTreeSet<(usize, usize)>,
    vars: &[VarId],
    _order: &MonomialOrder,
) -> usize {
    let idx = basis.len();
    for (i, f) in basis.iter().enumerate() {
        let lcm_deg: u64 = f.terms[0]
            .0
            .iter()
            .zip(&p.terms[0].0)
            .map(|(a, b)| *a.max(b) as u64)
            .sum();
        pairs.push(Pair {
            lcm_deg,
            i,
            j: idx,
        });
        alive.insert((i, idx));
    }
    let _ = vars;
    basis.push(p);
    idx
}

/// Pair ordered so the heap pops the smallest lcm degree first (normal
/// selection), tie-broken by indices for determinism.
#[derive(Debug, PartialEq, Eq)]
struct Pair {
    lcm_deg: u64,
    i: usize,
    j: usize,
}

impl Ord for Pair {
    fn cmp(&self, other: &Self) -> Ordering {
        (other.lcm_deg, other.i, other.j).cmp(&(self.lcm_deg, self.i, self.j))
    }
}

impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn union_vars(mut vars: Vec<VarId>, more: &[VarId]) -> Vec<VarId> {
    for v in more {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars.sort();
    vars
}
