//! Monomial orders, including the block elimination order used to project
//! ideals onto program variables.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::multipoly::grevlex_cmp;
use crate::vars::VarId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonomialOrder {
    GrevLex,
    Lex,
    /// Any monomial containing an eliminated variable ranks above every
    /// kept-only monomial; ties break by graded-reverse-lex on each block.
    Block { eliminated: BTreeSet<VarId> },
}

impl MonomialOrder {
    /// Compare exponent vectors over the given variable list.
    pub fn cmp(&self, vars: &[VarId], a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::GrevLex => grevlex_cmp(a, b),
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::Block { eliminated } => {
                let mask: Vec<bool> = vars.iter().map(|v| eliminated.contains(v)).collect();
                let pick = |m: &[u32], inside: bool| -> Vec<u32> {
                    m.iter()
                        .zip(&mask)
                        .filter(|(_, &f)| f == inside)
                        .map(|(&e, _)| e)
                        .collect()
                };
                grevlex_cmp(&pick(a, true), &pick(b, true))
                    .then_with(|| grevlex_cmp(&pick(a, false), &pick(b, false)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vars::{SymbolTable, VarKind};

    #[test]
    fn block_order_ranks_eliminated_first() {
        let mut t = SymbolTable::new();
        let u = t.fresh(VarKind::LoopCounter, "u");
        let v = t.fresh(VarKind::ProgramVar, "v");
        let vars = vec![u.clone(), v.clone()];
        let order = MonomialOrder::Block {
            eliminated: [u].into_iter().collect(),
        };
        // u^1 > v^5 because u is eliminated
        assert_eq!(order.cmp(&vars, &[1, 0], &[0, 5]), Ordering::Greater);
        // within kept-only monomials, grevlex by degree
        assert_eq!(order.cmp(&vars, &[0, 2], &[0, 3]), Ordering::Less);
    }

    #[test]
    fn lex_vs_grevlex() {
        // x^3 vs x y^2 z, 3 vars: grevlex compares degree first
        assert_eq!(
            MonomialOrder::GrevLex.cmp(&[], &[3, 0, 0], &[1, 2, 1]),
            Ordering::Less
        );
        assert_eq!(
            MonomialOrder::Lex.cmp(&[], &[3, 0, 0], &[1, 2, 1]),
            Ordering::Greater
        );
    }
}
