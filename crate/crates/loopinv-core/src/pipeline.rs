//! End-to-end pipeline: parse, extract, solve, eliminate, check.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Zero;

use crate::closedform::ClosedForm;
use crate::extract::{classify, extract_recurrences, Classification, ExtractError};
use crate::frontend::{parse_loop, LoopProgram, ParseError};
use crate::groebner::{IdealBasis, IdealError};
use crate::interp::{run_loop, InterpError};
use crate::multipoly::MultiPoly;
use crate::rational::Rational;
use crate::relations::{algebraic_relations, finish_basis};
use crate::solver::{assemble_closed_form, SolveError, SolverReport};
use crate::vars::{SymbolTable, VarId, VarKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitValue {
    Rational(Rational),
    Symbolic,
    /// Symbolic with an explicit parameter name.
    Named(String),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub counter_name: String,
    pub initial_values: BTreeMap<String, InitValue>,
    /// Variables the invariants may mention; defaults to every
    /// non-temporary program variable.
    pub relevant_vars: Option<Vec<String>>,
    pub include_temporaries: bool,
    pub reduce: bool,
    /// Iterations checked by the interpreter (0 disables checking).
    pub check_iterations: u32,
    pub check_trials: u32,
    pub degree_cap: u32,
    pub gb_step_cap: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            counter_name: "n".into(),
            initial_values: BTreeMap::new(),
            relevant_vars: None,
            include_temporaries: false,
            reduce: false,
            check_iterations: 25,
            check_trials: 5,
            degree_cap: crate::solver::DEFAULT_DEGREE_CAP,
            gb_step_cap: crate::groebner::DEFAULT_GB_STEP_CAP,
            seed: 0x5eed_1001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("parse: {0}")]
    Parse(#[from] ParseError),
    #[error("extract: {0}")]
    Extract(#[from] ExtractError),
    #[error("solve: {0}")]
    Solve(#[from] SolveError),
    #[error("ideal: {0}")]
    Ideal(#[from] IdealError),
    #[error("interpret: {0}")]
    Interp(#[from] InterpError),
    #[error("config: {0}")]
    Config(String),
}

#[derive(Debug, Clone)]
pub struct CheckCounterexample {
    pub generator: String,
    pub n: i64,
    pub bindings: Vec<(String, Rational)>,
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub passed: bool,
    pub iterations: u32,
    pub trials: u32,
    pub counterexample: Option<CheckCounterexample>,
}

#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub parse_us: u128,
    pub extract_us: u128,
    pub solve_us: u128,
    pub ideal_us: u128,
    pub check_us: u128,
}

#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub basis: IdealBasis,
    pub classification: Classification,
    /// Invariants are guaranteed from this iteration on.
    pub offset: i64,
    pub check: Option<CheckOutcome>,
    pub timings: Timings,
}

/// Everything a driver needs to re-check or re-present a run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub report: InvariantReport,
    pub program: LoopProgram,
    /// Concretely configured starting values.
    pub fixed: BTreeMap<VarId, Rational>,
    /// Symbolic parameter -> the program variable whose initial value it
    /// stands for.
    pub param_owner: BTreeMap<VarId, VarId>,
}

/// Full pipeline over loop source text.
pub fn run(src: &str, cfg: &PipelineConfig) -> Result<InvariantReport, PipelineError> {
    run_full(src, cfg).map(|a| a.report)
}

pub fn run_full(src: &str, cfg: &PipelineConfig) -> Result<RunArtifacts, PipelineError> {
    let mut table = SymbolTable::new();
    let mut timings = Timings::default();

    let t0 = Instant::now();
    let prog = parse_loop(src, &cfg.counter_name, &mut table)?;
    timings.parse_us = t0.elapsed().as_micros();

    let t0 = Instant::now();
    let system = extract_recurrences(&prog, &mut table)?;
    timings.extract_us = t0.elapsed().as_micros();

    for name in cfg.initial_values.keys() {
        if !prog.variables.iter().any(|v| v.name() == name) {
            return Err(PipelineError::Config(format!(
                "initial value for unknown variable '{}'",
                name
            )));
        }
    }

    // resolve configured initial values into a parameter substitution
    let mut subst: BTreeMap<VarId, MultiPoly> = BTreeMap::new();
    let mut fixed: BTreeMap<VarId, Rational> = BTreeMap::new();
    let mut param_owner: BTreeMap<VarId, VarId> = BTreeMap::new();
    for (v, p) in &system.init_params {
        param_owner.insert(p.clone(), v.clone());
    }
    for v in &prog.variables {
        let choice = cfg.initial_values.get(v.name());
        if system.constants.contains(v) {
            match choice {
                Some(InitValue::Rational(r)) => {
                    subst.insert(v.clone(), MultiPoly::constant(r.clone()));
                    fixed.insert(v.clone(), r.clone());
                }
                Some(InitValue::Named(_)) => {
                    return Err(PipelineError::Config(format!(
                        "'{}' is a symbolic constant and already has a name",
                        v.name()
                    )));
                }
                _ => {} // a constant stays symbolic under its own name
            }
            continue;
        }
        let param = system.init_params[v].clone();
        match choice {
            Some(InitValue::Rational(r)) => {
                subst.insert(param.clone(), MultiPoly::constant(r.clone()));
                fixed.insert(v.clone(), r.clone());
                param_owner.remove(&param);
            }
            Some(InitValue::Named(name)) => {
                let named = table.fresh(VarKind::InitialParam, name);
                if named.name() != name.as_str() {
                    return Err(PipelineError::Config(format!(
                        "symbol name '{}' is already taken",
                        name
                    )));
                }
                subst.insert(param.clone(), MultiPoly::var(&named));
                param_owner.remove(&param);
                param_owner.insert(named, v.clone());
            }
            Some(InitValue::Symbolic) | None => {}
        }
    }

    let t0 = Instant::now();
    let mut results: Vec<(VarId, Result<SolverReport, SolveError>)> = Vec::new();
    for rec in &system.recurrences {
        let bound = rec.bind_parameters(&subst);
        let r = assemble_closed_form(&bound, &mut table, cfg.degree_cap);
        results.push((rec.variable.clone(), r));
    }
    let classification = classify(&results);
    if let Some((_, Err(e))) = results.iter().find(|(_, r)| r.is_err()) {
        return Err(PipelineError::Solve(e.clone()));
    }
    timings.solve_us = t0.elapsed().as_micros();

    let solved: BTreeMap<VarId, ClosedForm> = results
        .into_iter()
        .map(|(v, r)| (v, r.unwrap().form))
        .collect();

    let temp_names: Vec<&str> = system
        .temporaries
        .iter()
        .map(|t| t.variable.name())
        .collect();
    let keep: Vec<VarId> = match &cfg.relevant_vars {
        Some(names) => {
            let mut out = Vec::new();
            for name in names {
                let v = prog
                    .variables
                    .iter()
                    .find(|v| v.name() == name)
                    .ok_or_else(|| {
                        PipelineError::Config(format!("unknown relevant variable '{}'", name))
                    })?;
                out.push(v.clone());
            }
            out
        }
        None => prog
            .variables
            .iter()
            .filter(|v| cfg.include_temporaries || !temp_names.contains(&v.name()))
            .filter(|v| !fixed.contains_key(*v) || !system.constants.contains(v))
            .cloned()
            .collect(),
    };

    let mut forms: Vec<ClosedForm> = Vec::new();
    for v in &keep {
        if let Some(f) = solved.get(v) {
            forms.push(f.clone());
        } else if let Some(t) = system.temporaries.iter().find(|t| &t.variable == v) {
            let base = solved.get(&t.base).expect("temporary base is tracked");
            forms.push(base.delayed(t.delay as i64, v.clone()));
        }
        // constants need no defining relation
    }
    let offset = forms.iter().map(|f| f.start).max().unwrap_or(0);

    let t0 = Instant::now();
    let raw = algebraic_relations(&forms, &keep, &prog.counter, &mut table, cfg.gb_step_cap)?;
    let basis = finish_basis(raw, cfg.reduce);
    timings.ideal_us = t0.elapsed().as_micros();

    let t0 = Instant::now();
    let check = if cfg.check_iterations > 0 {
        Some(check_invariants(
            &prog,
            &basis,
            offset,
            &fixed,
            &param_owner,
            cfg,
        )?)
    } else {
        None
    };
    timings.check_us = t0.elapsed().as_micros();

    Ok(RunArtifacts {
        report: InvariantReport {
            basis,
            classification,
            offset,
            check,
            timings,
        },
        program: prog,
        fixed,
        param_owner,
    })
}

/// Check every basis generator against exact loop execution: all symbolic
/// parameters are instantiated with seeded random small rationals, the loop
/// is replayed, and each generator must evaluate to exactly zero at
/// `n = offset ... offset + iterations`. Uses only the interpreter and
/// polynomial evaluation, independent of the algebra stack.
pub fn check_invariants(
    prog: &LoopProgram,
    basis: &IdealBasis,
    offset: i64,
    fixed: &BTreeMap<VarId, Rational>,
    param_owner: &BTreeMap<VarId, VarId>,
    cfg: &PipelineConfig,
) -> Result<CheckOutcome, PipelineError> {
    let mut rng = SplitMix::new(cfg.seed);
    let total_iters = offset as usize + cfg.check_iterations as usize;
    for _ in 0..cfg.check_trials.max(1) {
        let mut init: BTreeMap<VarId, Rational> = BTreeMap::new();
        for v in &prog.variables {
            let val = fixed
                .get(v)
                .cloned()
                .unwrap_or_else(|| rng.small_rational());
            init.insert(v.clone(), val);
        }
        // parameter values: copy the owning variable's start value; anything
        // unowned is genuinely free and gets its own sample
        let mut param_bind: BTreeMap<VarId, Rational> = BTreeMap::new();
        for g in &basis.generators {
            for v in g.vars() {
                if !g.contains_var(v) || param_bind.contains_key(v) || init.contains_key(v) {
                    continue;
                }
                match v.kind {
                    VarKind::InitialParam | VarKind::SolverParam => {
                        let val = match param_owner.get(v) {
                            Some(owner) => init[owner].clone(),
                            None => rng.small_rational(),
                        };
                        param_bind.insert(v.clone(), val);
                    }
                    _ => {
                        return Err(PipelineError::Config(format!(
                            "auxiliary variable {} escaped elimination",
                            v
                        )))
                    }
                }
            }
        }

        let states = run_loop(prog, &init, total_iters)?;
        for n in offset..=(offset + cfg.check_iterations as i64) {
            let state = &states[n as usize];
            let mut bind = param_bind.clone();
            for (v, val) in state {
                bind.insert(v.clone(), val.clone());
            }
            for g in &basis.generators {
                let value = g.eval(&bind);
                if !value.is_zero() {
                    return Ok(CheckOutcome {
                        passed: false,
                        iterations: cfg.check_iterations,
                        trials: cfg.check_trials,
                        counterexample: Some(CheckCounterexample {
                            generator: g.to_canonical_string(),
                            n,
                            bindings: bind
                                .iter()
                                .map(|(v, r)| (v.name().to_string(), r.clone()))
                                .collect(),
                            value,
                        }),
                    });
                }
            }
        }
    }
    Ok(CheckOutcome {
        passed: true,
        iterations: cfg.check_iterations,
        trials: cfg.check_trials,
        counterexample: None,
    })
}

/// Small deterministic generator for check-mode instantiation (SplitMix64).
struct SplitMix {
    state: u64,
}

impl SplitMix {
    fn new(seed: u64) -> Self {
        SplitMix { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Rational with numerator in [-100, 100] and denominator in [1, 100].
    fn small_rational(&mut self) -> Rational {
        let num = (self.next_u64() % 201) as i64 - 100;
        let den = (self.next_u64() % 100) as i64 + 1;
        crate::rational::ratio(num, den)
    }
}
