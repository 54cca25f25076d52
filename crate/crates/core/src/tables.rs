//! Type-possibility tables.
//!
//! A table row records which types a tree of that depth can produce, given a
//! terminal set and the monomorphized grammar. The generator consults them to
//! guarantee that every recursion can finish before it starts.
//!
//! Lambda generation keeps a separate pair of tables per argument type: the
//! `avail` table tracks anything producible inside a body, while the
//! `contain` table tracks what is producible by a subtree that is guaranteed
//! to reach a parameter leaf, which is what makes generated lambdas always
//! use their argument.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::grammar::GrammarInstance;
use crate::types::Type;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Grow,
    Full,
}

#[derive(Clone, Debug)]
pub struct TypeTable {
    method: Method,
    rows: Vec<BTreeSet<Type>>,
}

/// Output types of signatures whose parameters are all available below.
fn expansions(grammar: &GrammarInstance, below: &BTreeSet<Type>) -> BTreeSet<Type> {
    grammar
        .signatures()
        .iter()
        .filter(|sig| sig.params.iter().all(|p| below.contains(p)))
        .map(|sig| sig.ret.clone())
        .collect()
}

impl TypeTable {
    pub fn build(
        grammar: &GrammarInstance,
        method: Method,
        max_depth: usize,
        terminal_types: &BTreeSet<Type>,
    ) -> TypeTable {
        let mut rows = Vec::with_capacity(max_depth + 1);
        rows.push(terminal_types.clone());
        for i in 1..=max_depth {
            let mut row = expansions(grammar, &rows[i - 1]);
            if method == Method::Grow {
                row.extend(rows[i - 1].iter().cloned());
            }
            rows.push(row);
        }
        TypeTable { method, rows }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn max_depth(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, depth: usize) -> &BTreeSet<Type> {
        &self.rows[depth.min(self.max_depth())]
    }

    /// Whether a tree of output type `t` fits in `budget`: for grow tables
    /// membership in the (monotone) clamped row, for full tables exact-row
    /// membership.
    pub fn can_produce(&self, t: &Type, budget: usize) -> bool {
        self.row(budget).contains(t)
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (d, row) in self.rows.iter().enumerate() {
            let types: Vec<String> = row.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(out, "depth {d}: {}", types.join(", "));
        }
        out
    }
}

/// Tables for one lambda argument type.
#[derive(Clone, Debug)]
pub struct LambdaTable {
    /// Types producible by bodies guaranteed to use the parameter.
    pub contain: TypeTable,
    /// Types producible by any body subtree.
    pub avail: TypeTable,
}

#[derive(Clone, Debug)]
pub struct LambdaTables {
    tables: BTreeMap<Type, LambdaTable>,
    max_depth: usize,
}

impl LambdaTables {
    /// One table per possible argument type. Terminals inside a body are the
    /// parameter, constants of every universe type, and identity lambdas
    /// (the only nested lambdas allowed).
    pub fn build(
        grammar: &GrammarInstance,
        universe_types: &BTreeSet<Type>,
        max_lambda_depth: usize,
    ) -> LambdaTables {
        let mut base_terminals: BTreeSet<Type> = universe_types.clone();
        base_terminals.extend(
            universe_types
                .iter()
                .map(|t| Type::fun(t.clone(), t.clone())),
        );
        let avail = TypeTable::build(grammar, Method::Grow, max_lambda_depth, &base_terminals);

        let mut tables = BTreeMap::new();
        for arg in universe_types {
            let mut contain_rows: Vec<BTreeSet<Type>> = Vec::with_capacity(max_lambda_depth + 1);
            contain_rows.push([arg.clone()].into_iter().collect());
            for i in 1..=max_lambda_depth {
                let mut row = contain_rows[i - 1].clone();
                for sig in grammar.signatures() {
                    let carrier_possible = sig.params.iter().enumerate().any(|(j, p)| {
                        contain_rows[i - 1].contains(p)
                            && sig
                                .params
                                .iter()
                                .enumerate()
                                .all(|(k, q)| k == j || avail.row(i - 1).contains(q))
                    });
                    if carrier_possible {
                        row.insert(sig.ret.clone());
                    }
                }
                contain_rows.push(row);
            }
            tables.insert(
                arg.clone(),
                LambdaTable {
                    contain: TypeTable { method: Method::Grow, rows: contain_rows },
                    avail: avail.clone(),
                },
            );
        }
        LambdaTables { tables, max_depth: max_lambda_depth }
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn table(&self, arg: &Type) -> Option<&LambdaTable> {
        self.tables.get(arg)
    }

    /// Whether a lambda of type `Fun(arg, ret)` is producible: its body must
    /// reach `ret` while using the parameter, within the lambda depth limit.
    pub fn can_produce_fun(&self, fun_ty: &Type) -> bool {
        match fun_ty {
            Type::Fun(arg, ret) => self
                .tables
                .get(arg.as_ref())
                .is_some_and(|t| t.contain.can_produce(ret, self.max_depth)),
            _ => false,
        }
    }

    /// Every producible lambda type over the universe.
    pub fn producible_fun_types(&self) -> BTreeSet<Type> {
        let mut out = BTreeSet::new();
        for (arg, table) in &self.tables {
            for ret in table.contain.row(self.max_depth) {
                out.insert(Type::fun(arg.clone(), ret.clone()));
            }
        }
        out
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (arg, table) in &self.tables {
            let _ = writeln!(out, "lambda argument {arg}:");
            out.push_str(&table.contain.dump());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{monomorphize, Func, TypeUniverse};

    fn grammar_over(types: Vec<Type>) -> (GrammarInstance, TypeUniverse) {
        let out = types[0].clone();
        let u = TypeUniverse::new(types, vec![], out).unwrap();
        (monomorphize(&Func::ALL, &u).unwrap(), u)
    }

    fn set(types: &[Type]) -> BTreeSet<Type> {
        types.iter().cloned().collect()
    }

    #[test]
    fn full_row_one_over_int_bool() {
        let (g, _) = grammar_over(vec![Type::Int, Type::Bool]);
        let t = TypeTable::build(&g, Method::Full, 3, &set(&[Type::Int, Type::Bool]));
        assert_eq!(t.row(1), &set(&[Type::Int, Type::Bool]));
    }

    #[test]
    fn missing_terminal_type_enters_through_functions() {
        let (g, _) = grammar_over(vec![Type::Int, Type::Bool]);
        let t = TypeTable::build(&g, Method::Full, 3, &set(&[Type::Int]));
        assert!(t.row(1).contains(&Type::Int));
        assert!(t.row(1).contains(&Type::Bool), "GtInt/LtInt/EqInt produce Bool");
    }

    #[test]
    fn zero_depth_table_is_terminals_only() {
        let (g, _) = grammar_over(vec![Type::Int, Type::Bool]);
        let t = TypeTable::build(&g, Method::Grow, 0, &set(&[Type::Int]));
        assert_eq!(t.max_depth(), 0);
        assert_eq!(t.row(0), &set(&[Type::Int]));
        assert!(t.can_produce(&Type::Int, 5));
        assert!(!t.can_produce(&Type::Bool, 5));
    }

    #[test]
    fn grow_rows_are_monotone_and_stabilize() {
        let (g, _) = grammar_over(vec![
            Type::Int,
            Type::Bool,
            Type::list(Type::Int),
            Type::Char,
            Type::string(),
        ]);
        let t = TypeTable::build(&g, Method::Grow, 10, &set(&[Type::Int, Type::Char]));
        let mut stable_at = None;
        for d in 1..=10 {
            assert!(t.row(d).is_superset(t.row(d - 1)));
            if stable_at.is_none() && t.row(d) == t.row(d - 1) {
                stable_at = Some(d);
            }
            if let Some(s) = stable_at {
                if d > s {
                    assert_eq!(t.row(d), t.row(s));
                }
            }
        }
        assert!(stable_at.is_some(), "rows must reach a fixpoint");
    }

    #[test]
    fn grow_agrees_with_recursive_reachability() {
        // independent formulation: memoized recursion on (type, depth)
        fn reachable(
            g: &GrammarInstance,
            terminals: &BTreeSet<Type>,
            t: &Type,
            d: usize,
            memo: &mut BTreeMap<(Type, usize), bool>,
        ) -> bool {
            if terminals.contains(t) {
                return true;
            }
            if d == 0 {
                return false;
            }
            if let Some(&hit) = memo.get(&(t.clone(), d)) {
                return hit;
            }
            memo.insert((t.clone(), d), false); // cycle guard
            let hit = g.signatures().iter().any(|sig| {
                &sig.ret == t
                    && sig
                        .params
                        .iter()
                        .all(|p| reachable(g, terminals, p, d - 1, memo))
            });
            memo.insert((t.clone(), d), hit);
            hit
        }

        let (g, u) = grammar_over(vec![Type::Int, Type::Bool]);
        let terminals = set(&[Type::Int]);
        let table = TypeTable::build(&g, Method::Grow, 3, &terminals);
        let mut memo = BTreeMap::new();
        for t in u.types() {
            for d in 0..=3 {
                assert_eq!(
                    table.can_produce(t, d),
                    reachable(&g, &terminals, t, d, &mut memo),
                    "type {t} at depth {d}"
                );
            }
        }
    }

    #[test]
    fn lambda_tables_reach_bool_from_char() {
        let (g, u) = grammar_over(vec![Type::Char, Type::Bool]);
        let lt = LambdaTables::build(&g, u.types(), 3);
        let table = lt.table(&Type::Char).unwrap();
        assert!(table.contain.row(1).contains(&Type::Bool));
        assert!(lt.can_produce_fun(&Type::fun(Type::Char, Type::Bool)));
    }

    #[test]
    fn lambda_tables_depth_one_int() {
        let (g, u) = grammar_over(vec![Type::Int, Type::Bool]);
        let lt = LambdaTables::build(&g, u.types(), 1);
        assert!(lt.can_produce_fun(&Type::fun(Type::Int, Type::Int)));
        assert!(lt.can_produce_fun(&Type::fun(Type::Int, Type::Bool)));
    }

    #[test]
    fn unreachable_types_stay_out_of_contain_rows() {
        // over {Float, Int} a Float argument cannot reach Bool
        let (g, u) = grammar_over(vec![Type::Float, Type::Int]);
        let lt = LambdaTables::build(&g, u.types(), 3);
        let table = lt.table(&Type::Float).unwrap();
        for d in 0..=3 {
            assert!(!table.contain.row(d).contains(&Type::Bool));
        }
        assert!(!lt.can_produce_fun(&Type::fun(Type::Float, Type::Bool)));
        // but Float -> Int is reachable via Floor
        assert!(lt.can_produce_fun(&Type::fun(Type::Float, Type::Int)));
    }

    #[test]
    fn identity_lambdas_are_always_producible() {
        let (g, u) = grammar_over(vec![Type::Int, Type::Bool]);
        let lt = LambdaTables::build(&g, u.types(), 3);
        let funs = lt.producible_fun_types();
        assert!(funs.contains(&Type::fun(Type::Int, Type::Int)));
        assert!(funs.contains(&Type::fun(Type::Bool, Type::Bool)));
    }
}
