//! Exact loop interpreter.
//!
//! Replays the loop body over rational state, completely independent of the
//! recurrence and ideal machinery, which makes it a genuine oracle for every
//! invariant the pipeline emits.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::frontend::{Expr, LoopProgram};
use crate::rational::{rat, Rational};
use crate::vars::VarId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("division by zero at iteration {iteration}")]
    DivisionByZero { iteration: i64 },
    #[error("no initial value for variable {name}")]
    Unbound { name: String },
}

fn eval(e: &Expr, state: &BTreeMap<VarId, Rational>, iteration: i64) -> Result<Rational, InterpError> {
    Ok(match e {
        Expr::Const(c) => c.clone(),
        Expr::Var(v) => state
            .get(v)
            .cloned()
            .ok_or_else(|| InterpError::Unbound {
                name: v.name().to_string(),
            })?,
        Expr::Neg(a) => -eval(a, state, iteration)?,
        Expr::Add(a, b) => eval(a, state, iteration)? + eval(b, state, iteration)?,
        Expr::Sub(a, b) => eval(a, state, iteration)? - eval(b, state, iteration)?,
        Expr::Mul(a, b) => eval(a, state, iteration)? * eval(b, state, iteration)?,
        Expr::Div(a, b) => {
            let d = eval(b, state, iteration)?;
            if d.is_zero() {
                return Err(InterpError::DivisionByZero { iteration });
            }
            eval(a, state, iteration)? / d
        }
    })
}

/// Run the loop for the given number of iterations. `states[k]` is the full
/// variable state (counter included) before iteration `k`; the result has
/// `iterations + 1` entries.
pub fn run_loop(
    prog: &LoopProgram,
    init: &BTreeMap<VarId, Rational>,
    iterations: usize,
) -> Result<Vec<BTreeMap<VarId, Rational>>, InterpError> {
    let mut state: BTreeMap<VarId, Rational> = BTreeMap::new();
    for v in &prog.variables {
        let val = init.get(v).cloned().ok_or_else(|| InterpError::Unbound {
            name: v.name().to_string(),
        })?;
        state.insert(v.clone(), val);
    }
    state.insert(prog.counter.clone(), rat(0));

    let mut out = Vec::with_capacity(iterations + 1);
    out.push(state.clone());
    for k in 0..iterations {
        for a in &prog.body {
            let v = eval(&a.rhs, &state, k as i64)?;
            state.insert(a.target.clone(), v);
        }
        if !prog.explicit_increment {
            let c = state.get_mut(&prog.counter).unwrap();
            *c += rat(1);
        }
        out.push(state.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_loop;
    use crate::vars::SymbolTable;

    #[test]
    fn euclid_trace() {
        let mut t = SymbolTable::new();
        let p = parse_loop(
            "while true do rem := rem - y; quo := quo + 1; end",
            "n",
            &mut t,
        )
        .unwrap();
        let mut init = BTreeMap::new();
        for v in &p.variables {
            init.insert(
                v.clone(),
                match v.name() {
                    "rem" => rat(17),
                    "quo" => rat(0),
                    _ => rat(5),
                },
            );
        }
        let states = run_loop(&p, &init, 3).unwrap();
        let rem = p.variables.iter().find(|v| v.name() == "rem").unwrap();
        let quo = p.variables.iter().find(|v| v.name() == "quo").unwrap();
        assert_eq!(states[3][rem], rat(2));
        assert_eq!(states[3][quo], rat(3));
        assert_eq!(states[3][&p.counter], rat(3));
    }

    #[test]
    fn division_by_zero_reports_iteration() {
        let mut t = SymbolTable::new();
        let p = parse_loop("while true do v := v / w; w := w - 1; end", "n", &mut t).unwrap();
        let mut init = BTreeMap::new();
        for v in &p.variables {
            init.insert(v.clone(), rat(2));
        }
        // w: 2, 1, 0 -> division by zero at iteration 2
        let err = run_loop(&p, &init, 5).unwrap_err();
        assert_eq!(err, InterpError::DivisionByZero { iteration: 2 });
    }

    #[test]
    fn explicit_increment_midbody() {
        // statements after the increment read the advanced counter
        let mut t = SymbolTable::new();
        let p = parse_loop(
            "while true do a := a + n; n := n + 1; b := b + n; end",
            "n",
            &mut t,
        )
        .unwrap();
        let mut init = BTreeMap::new();
        for v in &p.variables {
            init.insert(v.clone(), rat(0));
        }
        let states = run_loop(&p, &init, 2).unwrap();
        let a = p.variables.iter().find(|v| v.name() == "a").unwrap();
        let b = p.variables.iter().find(|v| v.name() == "b").unwrap();
        // a adds pre-increment n (0, 1), b adds post-increment n (1, 2)
        assert_eq!(states[2][a], rat(1));
        assert_eq!(states[2][b], rat(3));
    }
}
