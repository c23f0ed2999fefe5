//! From a parsed loop body to one self-contained recurrence per variable.
//!
//! Assignments execute sequentially, so the body is first turned into one
//! simultaneous update by forward substitution: each right-hand side is
//! rewritten over start-of-iteration values. History registers
//! (`t1 := t2; t2 := a`) are recognized and folded into higher-order
//! self-recurrences of their base variable. A variable whose update still
//! mentions another evolving variable after that is reported as coupled; a
//! coefficient that is not a rational function of the counter is reported as
//! non-rational.

use std::collections::BTreeMap;

use num_traits::One;

use crate::frontend::{Expr, LoopProgram};
use crate::multipoly::MultiPoly;
use crate::ore::OreOperator;
use crate::rational::rat;
use crate::ratfunc::RatFunc;
use crate::recurrence::Recurrence;
use crate::solver::{SolveError, SolveStatus, SolverReport};
use crate::unipoly::UniPoly;
use crate::vars::{SymbolTable, VarId, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("variable {variable}: update references evolving variable {offender} (coupled system)")]
    NotSelfContained { variable: String, offender: String },
    #[error("variable {variable}: {detail}")]
    NonRationalCoefficient { variable: String, detail: String },
    #[error("counter must be updated exactly as {counter} := {counter} + 1")]
    CounterUpdate { counter: String },
    #[error("division by zero while unrolling iteration {iteration}")]
    DivisionByZero { iteration: i64 },
}

/// A history register: `variable(n) = base(n - delay)` for `n >= delay`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TempInfo {
    pub variable: VarId,
    pub base: VarId,
    pub delay: usize,
}

#[derive(Debug, Clone)]
pub struct RecurrenceSystem {
    /// One recurrence per tracked (assigned, non-register) variable, in
    /// declaration order.
    pub recurrences: Vec<Recurrence>,
    /// Variables never assigned; they stay symbolic in every ring.
    pub constants: Vec<VarId>,
    /// History registers, excluded from invariants by default.
    pub temporaries: Vec<TempInfo>,
    /// Initial-value parameter for every program variable.
    pub init_params: BTreeMap<VarId, VarId>,
}

impl RecurrenceSystem {
    pub fn recurrence_for(&self, v: &VarId) -> Option<&Recurrence> {
        self.recurrences.iter().find(|r| &r.variable == v)
    }
}

/// Rational expression over start-of-iteration variable values.
#[derive(Debug, Clone)]
struct Frac {
    num: MultiPoly,
    den: MultiPoly,
}

impl Frac {
    fn from_poly(p: MultiPoly) -> Frac {
        Frac {
            num: p,
            den: MultiPoly::one(),
        }
    }

    fn normalize(mut self) -> Frac {
        if self.num.is_zero() {
            self.den = MultiPoly::one();
            return self;
        }
        if let Some(c) = self.den.as_constant() {
            self.num = self.num.scale(&c.recip());
            self.den = MultiPoly::one();
            return self;
        }
        if let Some(q) = self.num.try_div(&self.den) {
            self.num = q;
            self.den = MultiPoly::one();
            return self;
        }
        let c = self.den.content();
        if !c.is_one() {
            self.den = self.den.scale(&c.recip());
            self.num = self.num.scale(&c.recip());
        }
        self
    }

    fn add(&self, other: &Frac) -> Frac {
        Frac {
            num: &(&self.num * &other.den) + &(&other.num * &self.den),
            den: &self.den * &other.den,
        }
        .normalize()
    }

    fn sub(&self, other: &Frac) -> Frac {
        Frac {
            num: &(&self.num * &other.den) - &(&other.num * &self.den),
            den: &self.den * &other.den,
        }
        .normalize()
    }

    fn mul(&self, other: &Frac) -> Frac {
        Frac {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
        .normalize()
    }

    fn div(&self, other: &Frac) -> Option<Frac> {
        if other.num.is_zero() {
            return None;
        }
        Some(
            Frac {
                num: &self.num * &other.den,
                den: &self.den * &other.num,
            }
            .normalize(),
        )
    }

    fn neg(&self) -> Frac {
        Frac {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

/// Evaluate an expression over the substitution state; `None` marks a
/// division whose divisor is identically zero.
fn eval_expr(e: &Expr, state: &BTreeMap<VarId, Frac>) -> Option<Frac> {
    Some(match e {
        Expr::Const(c) => Frac::from_poly(MultiPoly::constant(c.clone())),
        Expr::Var(v) => state
            .get(v)
            .cloned()
            .unwrap_or_else(|| Frac::from_poly(MultiPoly::var(v))),
        Expr::Neg(a) => eval_expr(a, state)?.neg(),
        Expr::Add(a, b) => eval_expr(a, state)?.add(&eval_expr(b, state)?),
        Expr::Sub(a, b) => eval_expr(a, state)?.sub(&eval_expr(b, state)?),
        Expr::Mul(a, b) => eval_expr(a, state)?.mul(&eval_expr(b, state)?),
        Expr::Div(a, b) => eval_expr(a, state)?.div(&eval_expr(b, state)?)?,
    })
}

/// Compile the loop into per-variable recurrences with symbolic initial
/// values (one fresh parameter per program variable).
pub fn extract_recurrences(
    prog: &LoopProgram,
    table: &mut SymbolTable,
) -> Result<RecurrenceSystem, ExtractError> {
    let counter = &prog.counter;

    // forward substitution: final value of each assigned variable in terms
    // of start-of-iteration values
    let mut state: BTreeMap<VarId, Frac> = BTreeMap::new();
    for a in &prog.body {
        let rhs = eval_expr(&a.rhs, &state).ok_or(ExtractError::NonRationalCoefficient {
            variable: a.target.name().to_string(),
            detail: "division by an identically zero expression".into(),
        })?;
        state.insert(a.target.clone(), rhs);
    }

    // the counter must advance by exactly one per iteration
    if prog.explicit_increment {
        let expect = Frac::from_poly(&MultiPoly::var(counter) + &MultiPoly::one());
        let got = state.remove(counter).expect("counter assignment recorded");
        if got.num != expect.num || !got.den.as_constant().is_some_and(|c| c.is_one()) {
            return Err(ExtractError::CounterUpdate {
                counter: counter.name().to_string(),
            });
        }
    }

    let assigned = prog.assigned_vars();
    let constants = prog.constants();

    // history registers: final update is a bare read of another assigned var
    let mut register_link: BTreeMap<VarId, VarId> = BTreeMap::new();
    for v in &assigned {
        let f = &state[v];
        if !f.den.as_constant().is_some_and(|c| c.is_one()) {
            continue;
        }
        if let Some(w) = as_bare_var(&f.num) {
            if w != *v && assigned.contains(&w) {
                register_link.insert(v.clone(), w);
            }
        }
    }
    // resolve chains to (base, delay); a cycle is a coupled system
    let mut temporaries: Vec<TempInfo> = Vec::new();
    let mut temp_of: BTreeMap<VarId, (VarId, usize)> = BTreeMap::new();
    for v in register_link.keys() {
        let mut cur = v.clone();
        let mut delay = 0usize;
        while let Some(next) = register_link.get(&cur) {
            delay += 1;
            cur = next.clone();
            if delay > register_link.len() {
                // register links form a cycle: a rotation of values, which
                // is a coupled system in this per-variable model
                return Err(ExtractError::NotSelfContained {
                    variable: v.name().to_string(),
                    offender: cur.name().to_string(),
                });
            }
        }
        temp_of.insert(v.clone(), (cur.clone(), delay));
        temporaries.push(TempInfo {
            variable: v.clone(),
            base: cur,
            delay,
        });
    }
    temporaries.sort_by_key(|t| assigned.iter().position(|v| v == &t.variable));

    // initial-value parameters for every program variable
    let mut init_params: BTreeMap<VarId, VarId> = BTreeMap::new();
    for v in &prog.variables {
        if constants.contains(v) {
            continue; // constants stay themselves
        }
        let p = table.fresh(VarKind::InitialParam, &format!("{}_0", v.name()));
        init_params.insert(v.clone(), p);
    }

    // symbolic initial state for unrolling
    let mut sym_state: BTreeMap<VarId, MultiPoly> = BTreeMap::new();
    for v in &prog.variables {
        let value = match init_params.get(v) {
            Some(p) => MultiPoly::var(p),
            None => MultiPoly::var(v),
        };
        sym_state.insert(v.clone(), value);
    }

    let tracked: Vec<VarId> = assigned
        .iter()
        .filter(|v| !temp_of.contains_key(v))
        .cloned()
        .collect();

    let mut shapes: BTreeMap<VarId, UpdateShape> = BTreeMap::new();
    for v in &tracked {
        shapes.insert(
            v.clone(),
            analyze_update(v, &state[v], counter, &assigned, &constants, &temp_of)?,
        );
    }

    // unroll enough iterations to seed the highest-order recurrences
    let max_delay = shapes.values().map(|s| s.delays()).max().unwrap_or(0);
    let mut history: Vec<BTreeMap<VarId, MultiPoly>> = vec![sym_state.clone()];
    for it in 0..max_delay {
        let next = symbolic_step(prog, history.last().unwrap(), it as i64)?;
        history.push(next);
    }

    let mut recurrences = Vec::new();
    for v in &tracked {
        let shape = &shapes[v];
        let d = shape.delays();
        let shift = d as i64;
        // v(m + d + 1) = sum_k A_k(m + d) v(m + d - k) + B(m + d), m >= 0
        let den_shifted = shape.den.shift(shift);
        let mut coeffs = vec![RatFunc::zero(); d + 2];
        coeffs[d + 1] = RatFunc::one();
        for (delay, a) in shape.linear.iter().enumerate() {
            if !a.is_zero() {
                coeffs[d - delay] = &RatFunc::zero()
                    - &RatFunc::new(a.shift(shift), den_shifted.clone());
            }
        }
        let operator = OreOperator::from_coeffs(coeffs);
        // the affine part must stay polynomial after dividing the common
        // denominator out
        let mut shift_map = BTreeMap::new();
        shift_map.insert(
            counter.clone(),
            &MultiPoly::var(counter) + &MultiPoly::constant(rat(shift)),
        );
        let inhom_shifted = shape.affine.substitute(&shift_map);
        let inhom = inhom_shifted
            .try_div(&MultiPoly::from_unipoly(&den_shifted, counter))
            .ok_or_else(|| ExtractError::NonRationalCoefficient {
                variable: v.name().to_string(),
                detail: "additive part is not polynomial in the counter".into(),
            })?;
        let initial_values: Vec<MultiPoly> = history[..=d]
            .iter()
            .map(|st| st[v].clone())
            .collect();
        recurrences.push(Recurrence::new(
            v.clone(),
            counter.clone(),
            operator,
            inhom,
            initial_values,
            0,
        ));
    }

    Ok(RecurrenceSystem {
        recurrences,
        constants,
        temporaries,
        init_params,
    })
}

/// Affine decomposition of one update: `v_next * den = sum linear[k] *
/// v(n-k) + affine`, all over (counter, constants).
#[derive(Debug, Clone)]
struct UpdateShape {
    den: UniPoly,
    /// `linear[k]` multiplies the value `k` iterations back.
    linear: Vec<UniPoly>,
    affine: MultiPoly,
}

impl UpdateShape {
    fn delays(&self) -> usize {
        self.linear.len().saturating_sub(1)
    }
}

fn as_bare_var(p: &MultiPoly) -> Option<VarId> {
    let mut found = None;
    let mut terms = 0;
    for (m, c) in p.terms() {
        terms += 1;
        if terms > 1 || !c.is_one() {
            return None;
        }
        let mut ones = 0;
        for (i, &e) in m.iter().enumerate() {
            if e == 1 {
                ones += 1;
                found = Some(p.vars()[i].clone());
            } else if e > 1 {
                return None;
            }
        }
        if ones != 1 {
            return None;
        }
    }
    found
}

fn analyze_update(
    v: &VarId,
    frac: &Frac,
    counter: &VarId,
    assigned: &[VarId],
    constants: &[VarId],
    temp_of: &BTreeMap<VarId, (VarId, usize)>,
) -> Result<UpdateShape, ExtractError> {
    // denominator: counter only
    let den = frac
        .den
        .as_unipoly_in(counter)
        .ok_or_else(|| ExtractError::NonRationalCoefficient {
            variable: v.name().to_string(),
            detail: "division by an expression containing program variables".into(),
        })?;
    let evolving: Vec<VarId> = assigned.to_vec();

    let mut linear: Vec<UniPoly> = vec![UniPoly::zero()];
    let mut affine = MultiPoly::zero();
    // split terms of the numerator by their evolving-variable part
    let vars = frac.num.vars().to_vec();
    for (m, c) in frac.num.terms() {
        let mut evolving_var: Option<(VarId, u32)> = None;
        let mut degree_evolving = 0u32;
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let w = &vars[i];
            if evolving.contains(w) {
                degree_evolving += e;
                evolving_var = Some((w.clone(), e));
            }
        }
        // rebuild this term without classification first
        let mut rest = MultiPoly::constant(c.clone());
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let w = &vars[i];
            if !evolving.contains(w) {
                rest = &rest * &MultiPoly::var_pow(w, e);
            }
        }
        match (evolving_var, degree_evolving) {
            (None, _) => {
                affine = &affine + &rest;
            }
            (Some((w, 1)), 1) => {
                // coefficient of one evolving read: must be counter-only
                let coeff = rest.as_unipoly_in(counter).ok_or_else(|| {
                    ExtractError::NonRationalCoefficient {
                        variable: v.name().to_string(),
                        detail: format!(
                            "coefficient of {} involves symbolic constants",
                            w.name()
                        ),
                    }
                })?;
                let delay = if &w == v {
                    0
                } else {
                    match temp_of.get(&w) {
                        Some((base, delay)) if base == v => *delay,
                        _ => {
                            return Err(ExtractError::NotSelfContained {
                                variable: v.name().to_string(),
                                offender: w.name().to_string(),
                            })
                        }
                    }
                };
                if linear.len() <= delay {
                    linear.resize(delay + 1, UniPoly::zero());
                }
                linear[delay] = &linear[delay] + &coeff;
            }
            _ => {
                return Err(ExtractError::NonRationalCoefficient {
                    variable: v.name().to_string(),
                    detail: "update is nonlinear in evolving variables".into(),
                })
            }
        }
    }
    // the affine part may reference counter and constants only
    for w in affine.vars() {
        if affine.contains_var(w) && w != counter && !constants.contains(w) {
            return Err(ExtractError::NotSelfContained {
                variable: v.name().to_string(),
                offender: w.name().to_string(),
            });
        }
    }
    Ok(UpdateShape {
        den,
        linear,
        affine,
    })
}

/// One exact symbolic execution of the body (parameters stay symbolic, the
/// counter is concrete).
fn symbolic_step(
    prog: &LoopProgram,
    state: &BTreeMap<VarId, MultiPoly>,
    counter_value: i64,
) -> Result<BTreeMap<VarId, MultiPoly>, ExtractError> {
    let mut frac_state: BTreeMap<VarId, Frac> = state
        .iter()
        .map(|(v, p)| (v.clone(), Frac::from_poly(p.clone())))
        .collect();
    frac_state.insert(
        prog.counter.clone(),
        Frac::from_poly(MultiPoly::constant(rat(counter_value))),
    );
    for a in &prog.body {
        let val = eval_expr(&a.rhs, &frac_state).ok_or(ExtractError::DivisionByZero {
            iteration: counter_value,
        })?;
        frac_state.insert(a.target.clone(), val);
    }
    let mut out = BTreeMap::new();
    for (v, f) in frac_state {
        if v == prog.counter {
            continue;
        }
        let f = f.normalize();
        let poly = f
            .den
            .as_constant()
            .is_some_and(|c| c.is_one())
            .then_some(f.num)
            .ok_or(ExtractError::DivisionByZero {
                iteration: counter_value,
            })?;
        out.insert(v, poly);
    }
    Ok(out)
}

/// Loop classification from per-variable solver outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    PSolvable,
    ExtendedPSolvable,
    Unsupported { variable: String, reason: String },
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::PSolvable => write!(f, "P-solvable"),
            Classification::ExtendedPSolvable => write!(f, "extended P-solvable"),
            Classification::Unsupported { variable, reason } => {
                write!(f, "unsupported ({}: {})", variable, reason)
            }
        }
    }
}

pub fn classify(results: &[(VarId, Result<SolverReport, SolveError>)]) -> Classification {
    for (v, r) in results {
        if let Err(e) = r {
            return Classification::Unsupported {
                variable: v.name().to_string(),
                reason: e.to_string(),
            };
        }
    }
    if results
        .iter()
        .all(|(_, r)| matches!(r, Ok(rep) if rep.status == SolveStatus::CFinite))
    {
        Classification::PSolvable
    } else {
        Classification::ExtendedPSolvable
    }
}
