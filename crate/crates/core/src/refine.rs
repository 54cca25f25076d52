//! Post-run simplification: constant folding, law rewriting, local search.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::grammar::{infer_sig, Func};
use crate::interp::{eval, EvalBudget};
use crate::problems::{accuracy_of, Case};
use crate::sexpr::{read_all, Sexpr, SexprError};
use crate::tree::{
    all_positions_postorder, main_positions, node_at, node_count, replace_at, type_of, Tree,
};
use crate::types::Type;
use crate::value::Value;

// ---------------------------------------------------------------------------
// Law rules
// ---------------------------------------------------------------------------

/// A rewrite pattern: metavariables bind whole subtrees; repeated variables
/// must match structurally equal subtrees.
#[derive(Clone, Debug, PartialEq)]
pub enum Pat {
    Var(String),
    App(Func, Vec<Pat>),
    Bool(bool),
    Int(i32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LawRule {
    pub pattern: Pat,
    pub replacement: Pat,
}

#[derive(Debug, Error, PartialEq)]
pub enum LawError {
    #[error("line {0}: expected `pattern => replacement`")]
    Shape(usize),
    #[error("line {0}: {1}")]
    Syntax(usize, SexprError),
    #[error("line {line}: unknown pattern symbol `{symbol}`")]
    UnknownSymbol { line: usize, symbol: String },
    #[error("line {line}: replacement variable ?{var} is not bound by the pattern")]
    UnboundVar { line: usize, var: String },
    #[error("line {line}: replacement may grow the tree")]
    Growing { line: usize },
}

fn pat_from_sexpr(expr: &Sexpr, line: usize) -> Result<Pat, LawError> {
    match expr {
        Sexpr::Atom(a) if a.starts_with('?') && a.len() > 1 => Ok(Pat::Var(a[1..].to_string())),
        Sexpr::Atom(a) if a == "true" => Ok(Pat::Bool(true)),
        Sexpr::Atom(a) if a == "false" => Ok(Pat::Bool(false)),
        Sexpr::Atom(a) => match a.parse::<i32>() {
            Ok(i) => Ok(Pat::Int(i)),
            Err(_) => Err(LawError::UnknownSymbol { line, symbol: a.clone() }),
        },
        Sexpr::List(items) => {
            let head = match items.first() {
                Some(Sexpr::Atom(h)) => h,
                _ => return Err(LawError::UnknownSymbol { line, symbol: "()".into() }),
            };
            let func = Func::from_name(head)
                .ok_or_else(|| LawError::UnknownSymbol { line, symbol: head.clone() })?;
            let children = items[1..]
                .iter()
                .map(|c| pat_from_sexpr(c, line))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Pat::App(func, children))
        }
        _ => Err(LawError::UnknownSymbol { line, symbol: format!("{expr:?}") }),
    }
}

fn var_occurrences(pat: &Pat, out: &mut BTreeMap<String, usize>) {
    match pat {
        Pat::Var(v) => *out.entry(v.clone()).or_default() += 1,
        Pat::App(_, children) => children.iter().for_each(|c| var_occurrences(c, out)),
        _ => {}
    }
}

fn fixed_nodes(pat: &Pat) -> usize {
    match pat {
        Pat::Var(_) => 0,
        Pat::App(_, children) => 1 + children.iter().map(fixed_nodes).sum::<usize>(),
        Pat::Bool(_) | Pat::Int(_) => 1,
    }
}

/// Parses a rules file: one `pattern => replacement` per line, `#` comments.
/// Rules are validated to never increase node count.
pub fn parse_laws(text: &str) -> Result<Vec<LawRule>, LawError> {
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let (lhs, rhs) = stripped.split_once("=>").ok_or(LawError::Shape(line))?;
        let pattern = pat_from_sexpr(
            &read_all(lhs.trim()).map_err(|e| LawError::Syntax(line, e))?,
            line,
        )?;
        let replacement = pat_from_sexpr(
            &read_all(rhs.trim()).map_err(|e| LawError::Syntax(line, e))?,
            line,
        )?;

        let mut lhs_vars = BTreeMap::new();
        let mut rhs_vars = BTreeMap::new();
        var_occurrences(&pattern, &mut lhs_vars);
        var_occurrences(&replacement, &mut rhs_vars);
        for (v, n) in &rhs_vars {
            match lhs_vars.get(v) {
                None => return Err(LawError::UnboundVar { line, var: v.clone() }),
                Some(m) if n > m => return Err(LawError::Growing { line }),
                Some(_) => {}
            }
        }
        if fixed_nodes(&replacement) > fixed_nodes(&pattern) {
            return Err(LawError::Growing { line });
        }
        rules.push(LawRule { pattern, replacement });
    }
    Ok(rules)
}

const DEFAULT_LAWS: &str = "\
(If true ?a ?b) => ?a
(If false ?a ?b) => ?b
(GtInt ?a ?a) => false
(LtInt ?a ?a) => false
(EqInt ?a ?a) => true
(EqChar ?a ?a) => true
(Len (Singleton ?b)) => 1
(Not (Not ?a)) => ?a
(And ?a true) => ?a
(And true ?a) => ?a
(Or ?a false) => ?a
(Or false ?a) => ?a
(Fst (ToPair ?a ?b)) => ?a
(Snd (ToPair ?a ?b)) => ?b
(Reverse (Reverse ?a)) => ?a
";

/// The built-in law table.
pub fn default_laws() -> &'static [LawRule] {
    static LAWS: OnceLock<Vec<LawRule>> = OnceLock::new();
    LAWS.get_or_init(|| parse_laws(DEFAULT_LAWS).expect("default law table parses"))
}

fn match_pat(pat: &Pat, tree: &Tree, binding: &mut BTreeMap<String, Tree>) -> bool {
    match pat {
        Pat::Var(v) => match binding.get(v) {
            Some(bound) => bound == tree,
            None => {
                binding.insert(v.clone(), tree.clone());
                true
            }
        },
        Pat::Bool(b) => matches!(tree, Tree::Const(Value::Bool(x), _) if x == b),
        Pat::Int(i) => matches!(tree, Tree::Const(Value::Int(x), _) if x == i),
        Pat::App(f, pats) => match tree {
            Tree::Apply(sig, children) if sig.func == *f && children.len() == pats.len() => {
                pats.iter().zip(children).all(|(p, c)| match_pat(p, c, binding))
            }
            _ => false,
        },
    }
}

fn instantiate(pat: &Pat, binding: &BTreeMap<String, Tree>) -> Option<Tree> {
    match pat {
        Pat::Var(v) => binding.get(v).cloned(),
        Pat::Bool(b) => Some(Tree::boolean(*b)),
        Pat::Int(i) => Some(Tree::int(*i)),
        Pat::App(f, pats) => {
            let children: Vec<Tree> = pats
                .iter()
                .map(|p| instantiate(p, binding))
                .collect::<Option<_>>()?;
            let tys: Vec<Type> = children.iter().map(|c| c.output_type()).collect();
            infer_sig(*f, &tys).map(|sig| Tree::Apply(sig, children))
        }
    }
}

impl LawRule {
    fn rewrite(&self, tree: &Tree) -> Option<Tree> {
        let mut binding = BTreeMap::new();
        if match_pat(&self.pattern, tree, &mut binding) {
            instantiate(&self.replacement, &binding)
        } else {
            None
        }
    }
}

/// Rewrites with the law table to a fixpoint, innermost-leftmost first. A
/// rewrite that would break a tree invariant (for example deleting a lambda
/// body's only parameter reference) is skipped.
pub fn apply_laws(tree: &Tree, laws: &[LawRule]) -> Tree {
    let mut tree = tree.clone();
    let bound = node_count(&tree) * laws.len().max(1) * 4 + 16;
    let mut rewrites = 0usize;
    'outer: while rewrites < bound {
        for pos in all_positions_postorder(&tree) {
            let node = node_at(&tree, &pos);
            for law in laws {
                if let Some(new_node) = law.rewrite(node) {
                    let candidate = replace_at(&tree, &pos, new_node);
                    if type_of(&candidate).is_ok() {
                        tree = candidate;
                        rewrites += 1;
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    tree
}

// ---------------------------------------------------------------------------
// Constant folding
// ---------------------------------------------------------------------------

fn contains_refs(tree: &Tree) -> bool {
    match tree {
        Tree::Arg(_, _) | Tree::Param(_) => true,
        Tree::Apply(_, children) => children.iter().any(contains_refs),
        Tree::Lambda { body, .. } => contains_refs(body),
        Tree::Const(_, _) => false,
    }
}

/// Evaluates every maximal subtree free of argument and parameter references
/// and replaces it with its constant value. A failing subtree is left
/// exactly as it was, preserving the error. Lambda bodies are folded under
/// the same rule, their parameters counting as references.
pub fn fold_constants(tree: &Tree, budget: &EvalBudget) -> Tree {
    if !contains_refs(tree) {
        if matches!(tree, Tree::Const(_, _)) {
            return tree.clone();
        }
        return match eval(tree, &[], budget) {
            Ok(v) => Tree::Const(v, tree.output_type()),
            Err(_) => tree.clone(),
        };
    }
    match tree {
        Tree::Apply(sig, children) => Tree::Apply(
            sig.clone(),
            children.iter().map(|c| fold_constants(c, budget)).collect(),
        ),
        Tree::Lambda { param, ret, body } => Tree::Lambda {
            param: param.clone(),
            ret: ret.clone(),
            body: Box::new(fold_constants(body, budget)),
        },
        other => other.clone(),
    }
}

// ---------------------------------------------------------------------------
// Local search
// ---------------------------------------------------------------------------

/// Hill-climbs by replacing nodes with same-typed children: walking positions
/// in pre-order, a replacement is adopted when it keeps accuracy at least as
/// high and strictly shrinks the tree; adoption re-examines the same
/// position, otherwise the walk advances. Lambdas are atomic units.
pub fn local_search(tree: &Tree, cases: &[Case], budget: &EvalBudget) -> Tree {
    let mut tree = tree.clone();
    let mut cur_accuracy = accuracy_of(&tree, cases, budget);
    let mut cur_nodes = node_count(&tree);
    let mut index = 0usize;
    loop {
        let positions = main_positions(&tree);
        if index >= positions.len() {
            return tree;
        }
        let pos = &positions[index];
        let node = node_at(&tree, pos);
        let node_ty = node.output_type();
        let children: Vec<Tree> = match node {
            Tree::Apply(_, ch) => {
                ch.iter().filter(|c| c.output_type() == node_ty).cloned().collect()
            }
            _ => Vec::new(),
        };
        let mut best: Option<(Tree, f64, usize)> = None;
        for child in children {
            let candidate = replace_at(&tree, pos, child);
            let accuracy = accuracy_of(&candidate, cases, budget);
            let nodes = node_count(&candidate);
            let (best_acc, best_nodes) = best
                .as_ref()
                .map(|(_, a, n)| (*a, *n))
                .unwrap_or((cur_accuracy, cur_nodes));
            if accuracy >= best_acc && nodes < best_nodes {
                best = Some((candidate, accuracy, nodes));
            }
        }
        match best {
            Some((better, acc, nodes)) => {
                tree = better;
                cur_accuracy = acc;
                cur_nodes = nodes;
                // stay at the same position
            }
            None => index += 1,
        }
    }
}

/// The whole pipeline: constant folding, then law rewriting, then local
/// search, with a final check that neither training accuracy dropped nor the
/// node count grew (in which case the input is returned unchanged).
pub fn refine(tree: &Tree, cases: &[Case], laws: &[LawRule], budget: &EvalBudget) -> Tree {
    let folded = fold_constants(tree, budget);
    let lawful = apply_laws(&folded, laws);
    let searched = local_search(&lawful, cases, budget);
    let ok = accuracy_of(&searched, cases, budget) >= accuracy_of(tree, cases, budget)
        && node_count(&searched) <= node_count(tree);
    if ok {
        searched
    } else {
        tree.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{accuracy_of, find_benchmark, generate_dataset};
    use crate::value::Value;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn budget() -> EvalBudget {
        EvalBudget::default()
    }

    #[test]
    fn fold_evaluates_closed_branches() {
        // head (cons (4*5) (singleton (1+2))) -> 20
        let tree = Tree::app(
            Func::Head,
            vec![Tree::app(
                Func::Cons,
                vec![
                    Tree::app(Func::MultInt, vec![Tree::int(4), Tree::int(5)]),
                    Tree::app(Func::Singleton, vec![Tree::app(Func::AddInt, vec![Tree::int(1), Tree::int(2)])]),
                ],
            )],
        );
        assert_eq!(fold_constants(&tree, &budget()), Tree::int(20));
    }

    #[test]
    fn fold_keeps_argument_dependent_parents() {
        let x0 = Tree::Arg(0, Type::Int);
        let tree = Tree::app(
            Func::AddInt,
            vec![x0.clone(), Tree::app(Func::SubInt, vec![Tree::int(3), Tree::int(1)])],
        );
        let folded = fold_constants(&tree, &budget());
        assert_eq!(folded, Tree::app(Func::AddInt, vec![x0, Tree::int(2)]));
    }

    #[test]
    fn fold_leaves_failing_subtrees_untouched() {
        let boom = Tree::app(Func::DivInt, vec![Tree::int(1), Tree::int(0)]);
        assert_eq!(fold_constants(&boom, &budget()), boom);
        // the whole closed subtree fails, so even its foldable sibling stays
        let parent = Tree::app(
            Func::AddInt,
            vec![boom.clone(), Tree::app(Func::SubInt, vec![Tree::int(3), Tree::int(1)])],
        );
        assert_eq!(fold_constants(&parent, &budget()), parent);
    }

    #[test]
    fn fold_reaches_inside_lambda_bodies() {
        let body = Tree::app(
            Func::AddInt,
            vec![
                Tree::Param(Type::Int),
                Tree::app(Func::SubInt, vec![Tree::int(3), Tree::int(1)]),
            ],
        );
        let tree = Tree::app(
            Func::Map,
            vec![
                Tree::lambda(Type::Int, Type::Int, body),
                Tree::Arg(0, Type::list(Type::Int)),
            ],
        );
        let folded = fold_constants(&tree, &budget());
        let expected_body =
            Tree::app(Func::AddInt, vec![Tree::Param(Type::Int), Tree::int(2)]);
        let expected = Tree::app(
            Func::Map,
            vec![
                Tree::lambda(Type::Int, Type::Int, expected_body),
                Tree::Arg(0, Type::list(Type::Int)),
            ],
        );
        assert_eq!(folded, expected);
    }

    #[test]
    fn laws_chain_to_a_fixpoint() {
        // if (x0 > x0) then 1 else 2  ->  2
        let x0 = Tree::Arg(0, Type::Int);
        let tree = Tree::app(
            Func::If,
            vec![
                Tree::app(Func::GtInt, vec![x0.clone(), x0.clone()]),
                Tree::int(1),
                Tree::int(2),
            ],
        );
        assert_eq!(apply_laws(&tree, default_laws()), Tree::int(2));

        let len1 = Tree::app(Func::Len, vec![Tree::app(Func::Singleton, vec![x0])]);
        assert_eq!(apply_laws(&len1, default_laws()), Tree::int(1));

        let triple_not = Tree::app(
            Func::Not,
            vec![Tree::app(
                Func::Not,
                vec![Tree::app(Func::Not, vec![Tree::Arg(0, Type::Bool)])],
            )],
        );
        assert_eq!(
            apply_laws(&triple_not, default_laws()),
            Tree::app(Func::Not, vec![Tree::Arg(0, Type::Bool)])
        );
    }

    #[test]
    fn laws_leave_unmatched_trees_alone() {
        let tree = Tree::app(Func::AddInt, vec![Tree::Arg(0, Type::Int), Tree::int(1)]);
        assert_eq!(apply_laws(&tree, default_laws()), tree);
    }

    #[test]
    fn law_that_would_break_a_lambda_is_skipped() {
        // if true then 1 else param: rewriting would delete the only
        // parameter use, so the law must not fire inside this lambda
        let body = Tree::app(
            Func::If,
            vec![Tree::boolean(true), Tree::int(1), Tree::Param(Type::Int)],
        );
        let tree = Tree::app(
            Func::Map,
            vec![
                Tree::lambda(Type::Int, Type::Int, body),
                Tree::Arg(0, Type::list(Type::Int)),
            ],
        );
        assert_eq!(apply_laws(&tree, default_laws()), tree);
    }

    #[test]
    fn law_parser_validates() {
        assert!(parse_laws("(Not (Not ?a)) => ?a").is_ok());
        assert!(matches!(parse_laws("(Not ?a) -> ?a"), Err(LawError::Shape(1))));
        assert!(matches!(
            parse_laws("(Not ?a) => ?b"),
            Err(LawError::UnboundVar { .. })
        ));
        assert!(matches!(
            parse_laws("?a => (Not ?a)"),
            Err(LawError::Growing { .. })
        ));
        assert!(matches!(
            parse_laws("(Nope ?a) => ?a"),
            Err(LawError::UnknownSymbol { .. })
        ));
        let with_comment = "# identity laws\n(And ?a true) => ?a\n";
        assert_eq!(parse_laws(with_comment).unwrap().len(), 1);
    }

    /// max -96 (min (max x1 x2) (max (min x1 x2) x0))
    fn bloated_median() -> Tree {
        let x = |i| Tree::Arg(i, Type::Int);
        Tree::app(
            Func::MaxInt,
            vec![
                Tree::int(-96),
                Tree::app(
                    Func::MinInt,
                    vec![
                        Tree::app(Func::MaxInt, vec![x(1), x(2)]),
                        Tree::app(
                            Func::MaxInt,
                            vec![Tree::app(Func::MinInt, vec![x(1), x(2)]), x(0)],
                        ),
                    ],
                ),
            ],
        )
    }

    fn median_cases(n: usize, bad: usize, seed: u64) -> Vec<Case> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cases = Vec::new();
        let median3 = |a: i32, b: i32, c: i32| {
            let mut v = [a, b, c];
            v.sort_unstable();
            v[1]
        };
        for _ in 0..bad {
            let (a, b, c) = (-100, -99, -98);
            cases.push(Case {
                args: vec![Value::Int(a), Value::Int(b), Value::Int(c)],
                expected: Value::Int(median3(a, b, c)),
            });
        }
        while cases.len() < n {
            let (a, b, c) = (
                rng.gen_range(-96..=100),
                rng.gen_range(-96..=100),
                rng.gen_range(-96..=100),
            );
            cases.push(Case {
                args: vec![Value::Int(a), Value::Int(b), Value::Int(c)],
                expected: Value::Int(median3(a, b, c)),
            });
        }
        cases
    }

    #[test]
    fn local_search_discards_the_misused_constant() {
        let tree = bloated_median();
        let cases = median_cases(20, 1, 5);
        assert_eq!(accuracy_of(&tree, &cases, &budget()), 0.95);
        let out = local_search(&tree, &cases, &budget());
        assert_eq!(node_count(&out), 9);
        assert_eq!(accuracy_of(&out, &cases, &budget()), 1.0);
    }

    #[test]
    fn local_search_keeps_minimal_correct_trees() {
        let spec = find_benchmark("median").unwrap();
        let data = generate_dataset(&spec, 30, 0, 3);
        let solution = spec.solution();
        assert_eq!(local_search(&solution, &data.train, &budget()), solution);
    }

    #[test]
    fn refine_pipeline_is_monotone_on_random_trees() {
        use crate::generate::{GenConfig, GenContext};
        use crate::tables::Method;
        let spec = find_benchmark("count-odds").unwrap();
        let ctx = GenContext::new(spec.universe.clone(), GenConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data = generate_dataset(&spec, 15, 0, 7);
        for i in 0..300 {
            let tree = ctx
                .gen_tree(spec.output(), 2 + i % 4, Method::Grow, &mut rng)
                .unwrap();
            let refined = refine(&tree, &data.train, default_laws(), &budget());
            assert!(type_of(&refined).is_ok());
            assert!(node_count(&refined) <= node_count(&tree));
            assert!(
                accuracy_of(&refined, &data.train, &budget())
                    >= accuracy_of(&tree, &data.train, &budget())
            );
        }
    }

    #[test]
    fn refine_returns_minimal_median_unchanged() {
        let spec = find_benchmark("median").unwrap();
        let data = generate_dataset(&spec, 30, 0, 9);
        let solution = spec.solution();
        assert_eq!(
            refine(&solution, &data.train, default_laws(), &budget()),
            solution
        );
    }
}
