//! Variable identities and the pipeline symbol table.
//!
//! Every symbol that can appear in a polynomial ring carries a kind. The kind
//! doubles as the elimination rank: solver parameters, exponential variables,
//! factorial variables and the loop counter come first (the block that gets
//! eliminated), then program variables, then initial-value parameters.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// Free coefficient left over from an underdetermined initial-value system.
    SolverParam,
    /// Stands for `theta^n`.
    Exponential,
    /// Stands for a falling-factorial sequence `(n+zeta)^[n]`.
    Factorial,
    /// The loop counter.
    LoopCounter,
    /// A program variable (including never-assigned symbolic constants).
    ProgramVar,
    /// Symbolic initial value of a program variable.
    InitialParam,
}

impl VarKind {
    /// Kinds eliminated by the invariant projection.
    pub fn is_eliminated(self) -> bool {
        matches!(
            self,
            VarKind::SolverParam | VarKind::Exponential | VarKind::Factorial | VarKind::LoopCounter
        )
    }
}

/// Interned variable identity. Ordering is (kind, allocation index) so a
/// sorted variable list is automatically a valid elimination order.
#[derive(Debug, Clone)]
pub struct VarId {
    pub kind: VarKind,
    ord: u32,
    name: Arc<str>,
}

impl VarId {
    pub fn name(&self) -> &str {
        &self.name
    }
}

impl PartialEq for VarId {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.ord == other.ord
    }
}
impl Eq for VarId {}

impl PartialOrd for VarId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for VarId {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.kind, self.ord).cmp(&(other.kind, other.ord))
    }
}

impl std::hash::Hash for VarId {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.kind, self.ord).hash(state);
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Allocator for the variables of one pipeline run. Names are unique across
/// the whole table; exponential and factorial variables remember the theta or
/// zeta they stand for so closed forms can be evaluated.
#[derive(Debug, Default, Clone)]
pub struct SymbolTable {
    names: Vec<(VarKind, Arc<str>)>,
    next: [u32; 6],
    thetas: Vec<(VarId, Rational)>,
    zetas: Vec<(VarId, Rational)>,
}

fn kind_slot(kind: VarKind) -> usize {
    match kind {
        VarKind::SolverParam => 0,
        VarKind::Exponential => 1,
        VarKind::Factorial => 2,
        VarKind::LoopCounter => 3,
        VarKind::ProgramVar => 4,
        VarKind::InitialParam => 5,
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocate a fresh variable; the name is disambiguated if taken.
    pub fn fresh(&mut self, kind: VarKind, name: &str) -> VarId {
        let mut candidate: Arc<str> = Arc::from(name);
        while self.names.iter().any(|(_, n)| **n == *candidate) {
            candidate = Arc::from(format!("{}_", candidate).as_str());
        }
        let ord = self.next[kind_slot(kind)];
        self.next[kind_slot(kind)] += 1;
        self.names.push((kind, candidate.clone()));
        VarId {
            kind,
            ord,
            name: candidate,
        }
    }

    pub fn is_taken(&self, name: &str) -> bool {
        self.names.iter().any(|(_, n)| **n == *name)
    }

    /// Variable for `theta^n`, allocating on first use.
    pub fn exponential_var(&mut self, theta: &Rational) -> VarId {
        if let Some((v, _)) = self.thetas.iter().find(|(_, t)| t == theta) {
            return v.clone();
        }
        let name = format!("e[{}]", crate::rational::display_rational(theta));
        let v = self.fresh(VarKind::Exponential, &name);
        self.thetas.push((v.clone(), theta.clone()));
        v
    }

    /// Variable for `(n+zeta)^[n]`, allocating on first use.
    pub fn factorial_var(&mut self, zeta: &Rational) -> VarId {
        if let Some((v, _)) = self.zetas.iter().find(|(_, z)| z == zeta) {
            return v.clone();
        }
        let name = format!("h[{}]", crate::rational::display_rational(zeta));
        let v = self.fresh(VarKind::Factorial, &name);
        self.zetas.push((v.clone(), zeta.clone()));
        v
    }

    pub fn theta_of(&self, v: &VarId) -> Option<&Rational> {
        self.thetas.iter().find(|(w, _)| w == v).map(|(_, t)| t)
    }

    pub fn zeta_of(&self, v: &VarId) -> Option<&Rational> {
        self.zetas.iter().find(|(w, _)| w == v).map(|(_, z)| z)
    }

    pub fn thetas(&self) -> &[(VarId, Rational)] {
        &self.thetas
    }

    pub fn zetas(&self) -> &[(VarId, Rational)] {
        &self.zetas
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn ordering_follows_kind_rank() {
        let mut t = SymbolTable::new();
        let v = t.fresh(VarKind::ProgramVar, "v");
        let x = t.fresh(VarKind::LoopCounter, "n");
        let e = t.exponential_var(&rat(2));
        let p = t.fresh(VarKind::InitialParam, "v_0");
        let mut sorted = vec![p.clone(), v.clone(), x.clone(), e.clone()];
        sorted.sort();
        assert_eq!(sorted, vec![e, x, v, p]);
    }

    #[test]
    fn names_are_unique() {
        let mut t = SymbolTable::new();
        let a = t.fresh(VarKind::ProgramVar, "a");
        let b = t.fresh(VarKind::InitialParam, "a");
        assert_ne!(a.name(), b.name());
        assert_eq!(b.name(), "a_");
    }

    #[test]
    fn exponential_vars_dedupe() {
        let mut t = SymbolTable::new();
        let e1 = t.exponential_var(&rat(2));
        let e2 = t.exponential_var(&rat(2));
        assert_eq!(e1, e2);
        assert_eq!(t.theta_of(&e1), Some(&rat(2)));
    }
}
