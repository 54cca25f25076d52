//! Program trees and their structural measures.

use thiserror::Error;

use crate::grammar::ConcreteSig;
use crate::types::Type;
use crate::value::Value;

/// A typed program AST.
///
/// Lambdas are self-contained sub-programs: their bodies refer to the lambda
/// parameter (`Param`), never to the main program's arguments, must use the
/// parameter at least once, and any lambda nested inside a body is exactly
/// the identity.
#[derive(Clone, Debug, PartialEq)]
pub enum Tree {
    Apply(ConcreteSig, Vec<Tree>),
    Arg(usize, Type),
    Const(Value, Type),
    Lambda { param: Type, ret: Type, body: Box<Tree> },
    Param(Type),
}

impl Tree {
    pub fn apply(sig: ConcreteSig, children: Vec<Tree>) -> Tree {
        Tree::Apply(sig, children)
    }

    /// Builds an application, inferring the signature instantiation from the
    /// children's output types. Panics when the children do not fit; meant
    /// for hand-built trees.
    pub fn app(func: crate::grammar::Func, children: Vec<Tree>) -> Tree {
        let child_types: Vec<Type> = children.iter().map(|c| c.output_type()).collect();
        let sig = crate::grammar::infer_sig(func, &child_types)
            .unwrap_or_else(|| panic!("{} does not apply to {child_types:?}", func.name()));
        Tree::Apply(sig, children)
    }

    pub fn lambda(param: Type, ret: Type, body: Tree) -> Tree {
        Tree::Lambda { param, ret, body: Box::new(body) }
    }

    pub fn identity(param: Type) -> Tree {
        Tree::Lambda { param: param.clone(), ret: param.clone(), body: Box::new(Tree::Param(param)) }
    }

    pub fn int(i: i32) -> Tree {
        Tree::Const(Value::Int(i), Type::Int)
    }

    pub fn boolean(b: bool) -> Tree {
        Tree::Const(Value::Bool(b), Type::Bool)
    }

    /// The output type this node produces, without validating the tree.
    pub fn output_type(&self) -> Type {
        match self {
            Tree::Apply(sig, _) => sig.ret.clone(),
            Tree::Arg(_, t) | Tree::Const(_, t) | Tree::Param(t) => t.clone(),
            Tree::Lambda { param, ret, .. } => Type::fun(param.clone(), ret.clone()),
        }
    }

    pub fn is_lambda(&self) -> bool {
        matches!(self, Tree::Lambda { .. })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("at {path:?}: expected {expected}, found {actual}")]
    Mismatch { path: Vec<usize>, expected: Type, actual: Type },
    #[error("at {path:?}: {func} expects {expected} children, found {actual}")]
    Arity { path: Vec<usize>, func: &'static str, expected: usize, actual: usize },
    #[error("at {path:?}: constant value does not inhabit its annotation {annotation}")]
    BadConstant { path: Vec<usize>, annotation: Type },
    #[error("at {path:?}: argument reference inside a lambda body")]
    ArgInLambda { path: Vec<usize> },
    #[error("at {path:?}: lambda parameter reference outside any lambda")]
    ParamOutsideLambda { path: Vec<usize> },
    #[error("at {path:?}: lambda body never uses its parameter")]
    UnusedParam { path: Vec<usize> },
    #[error("at {path:?}: nested lambda is not the identity")]
    NestedNonIdentity { path: Vec<usize> },
    #[error("at {path:?}: type annotation contains a type variable")]
    PolymorphicNode { path: Vec<usize> },
}

/// True when `body` refers to its own lambda's parameter, not counting
/// references owned by nested lambdas.
fn uses_own_param(body: &Tree) -> bool {
    match body {
        Tree::Param(_) => true,
        Tree::Apply(_, children) => children.iter().any(uses_own_param),
        Tree::Lambda { .. } => false,
        _ => false,
    }
}

fn check(
    tree: &Tree,
    enclosing_param: Option<&Type>,
    path: &mut Vec<usize>,
) -> Result<Type, TypeError> {
    match tree {
        Tree::Const(v, t) => {
            if !t.is_concrete() {
                return Err(TypeError::PolymorphicNode { path: path.clone() });
            }
            if t.is_fun() || !v.conforms(t) {
                return Err(TypeError::BadConstant { path: path.clone(), annotation: t.clone() });
            }
            Ok(t.clone())
        }
        Tree::Arg(_, t) => {
            if enclosing_param.is_some() {
                return Err(TypeError::ArgInLambda { path: path.clone() });
            }
            if !t.is_concrete() {
                return Err(TypeError::PolymorphicNode { path: path.clone() });
            }
            Ok(t.clone())
        }
        Tree::Param(t) => match enclosing_param {
            None => Err(TypeError::ParamOutsideLambda { path: path.clone() }),
            Some(p) if p == t => Ok(t.clone()),
            Some(p) => Err(TypeError::Mismatch {
                path: path.clone(),
                expected: p.clone(),
                actual: t.clone(),
            }),
        },
        Tree::Lambda { param, ret, body } => {
            if enclosing_param.is_some() {
                // Constraint 2: nested lambdas are exactly the identity.
                let identity = matches!(body.as_ref(), Tree::Param(t) if t == param) && param == ret;
                if !identity {
                    return Err(TypeError::NestedNonIdentity { path: path.clone() });
                }
            }
            path.push(0);
            let body_ty = check(body, Some(param), path)?;
            path.pop();
            if !uses_own_param(body) {
                return Err(TypeError::UnusedParam { path: path.clone() });
            }
            if &body_ty != ret {
                return Err(TypeError::Mismatch {
                    path: path.clone(),
                    expected: ret.clone(),
                    actual: body_ty,
                });
            }
            Ok(Type::fun(param.clone(), ret.clone()))
        }
        Tree::Apply(sig, children) => {
            if sig.params.iter().any(|p| !p.is_concrete()) || !sig.ret.is_concrete() {
                return Err(TypeError::PolymorphicNode { path: path.clone() });
            }
            if children.len() != sig.arity() {
                return Err(TypeError::Arity {
                    path: path.clone(),
                    func: sig.func.name(),
                    expected: sig.arity(),
                    actual: children.len(),
                });
            }
            for (i, (child, expected)) in children.iter().zip(&sig.params).enumerate() {
                path.push(i);
                let actual = check(child, enclosing_param, path)?;
                if &actual != expected {
                    return Err(TypeError::Mismatch {
                        path: path.clone(),
                        expected: expected.clone(),
                        actual,
                    });
                }
                path.pop();
            }
            Ok(sig.ret.clone())
        }
    }
}

/// Returns the tree's output type, or the first violated typing invariant.
pub fn type_of(tree: &Tree) -> Result<Type, TypeError> {
    check(tree, None, &mut Vec::new())
}

/// Total node count. A lambda is a single unit: it counts one node
/// regardless of its body, mirroring how the operators treat it.
pub fn node_count(tree: &Tree) -> usize {
    match tree {
        Tree::Apply(_, children) => 1 + children.iter().map(node_count).sum::<usize>(),
        Tree::Lambda { .. } => 1,
        _ => 1,
    }
}

/// Structural depth in edges; leaves are at depth 0 and a lambda reaches
/// into its body.
pub fn depth(tree: &Tree) -> usize {
    match tree {
        Tree::Apply(_, children) => {
            1 + children.iter().map(depth).max().unwrap_or(0)
        }
        Tree::Lambda { body, .. } => 1 + depth(body),
        _ => 0,
    }
}

/// Depth of the main program structure, treating lambdas as leaves; their
/// bodies are measured separately against the lambda depth limit.
pub fn program_depth(tree: &Tree) -> usize {
    match tree {
        Tree::Apply(_, children) => 1 + children.iter().map(program_depth).max().unwrap_or(0),
        _ => 0,
    }
}

/// Checks the main-tree and per-lambda-body depth limits.
pub fn within_depth_limits(tree: &Tree, max_depth: usize, max_lambda_depth: usize) -> bool {
    fn bodies_ok(tree: &Tree, max_lambda_depth: usize) -> bool {
        match tree {
            Tree::Apply(_, children) => children.iter().all(|c| bodies_ok(c, max_lambda_depth)),
            Tree::Lambda { body, .. } => {
                program_depth(body) <= max_lambda_depth && bodies_ok(body, max_lambda_depth)
            }
            _ => true,
        }
    }
    program_depth(tree) <= max_depth && bodies_ok(tree, max_lambda_depth)
}

/// Paths of every node reachable without entering a lambda body, in
/// pre-order. Lambda nodes themselves are included (as atomic units).
pub fn main_positions(tree: &Tree) -> Vec<Vec<usize>> {
    fn walk(tree: &Tree, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        if let Tree::Apply(_, children) = tree {
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                walk(c, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(tree, &mut Vec::new(), &mut out);
    out
}

/// Paths of every node including lambda-body interiors, children before
/// parents. Law rewriting uses this for innermost-first scans.
pub fn all_positions_postorder(tree: &Tree) -> Vec<Vec<usize>> {
    fn walk(tree: &Tree, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match tree {
            Tree::Apply(_, children) => {
                for (i, c) in children.iter().enumerate() {
                    path.push(i);
                    walk(c, path, out);
                    path.pop();
                }
            }
            Tree::Lambda { body, .. } => {
                path.push(0);
                walk(body, path, out);
                path.pop();
            }
            _ => {}
        }
        out.push(path.clone());
    }
    let mut out = Vec::new();
    walk(tree, &mut Vec::new(), &mut out);
    out
}

/// The node at `path`, which must be valid.
pub fn node_at<'a>(tree: &'a Tree, path: &[usize]) -> &'a Tree {
    let mut cur = tree;
    for &i in path {
        match cur {
            Tree::Apply(_, children) => cur = &children[i],
            Tree::Lambda { body, .. } if i == 0 => cur = body,
            _ => panic!("invalid tree path"),
        }
    }
    cur
}

/// A copy of `tree` with the node at `path` replaced.
pub fn replace_at(tree: &Tree, path: &[usize], replacement: Tree) -> Tree {
    if path.is_empty() {
        return replacement;
    }
    match tree {
        Tree::Apply(sig, children) => {
            let mut children = children.clone();
            children[path[0]] = replace_at(&children[path[0]], &path[1..], replacement);
            Tree::Apply(sig.clone(), children)
        }
        Tree::Lambda { param, ret, body } if path[0] == 0 => Tree::Lambda {
            param: param.clone(),
            ret: ret.clone(),
            body: Box::new(replace_at(body, &path[1..], replacement)),
        },
        _ => panic!("invalid tree path"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{unify_output, Func, TypeUniverse};

    fn int_universe() -> TypeUniverse {
        TypeUniverse::new(
            vec![Type::Int, Type::Bool],
            vec![Type::Int, Type::Int, Type::Int],
            Type::Int,
        )
        .unwrap()
    }

    pub(crate) fn app(f: Func, target: Type, children: Vec<Tree>, u: &TypeUniverse) -> Tree {
        let sigs = unify_output(f, &target, u);
        let sig = sigs
            .into_iter()
            .find(|s| {
                s.params
                    .iter()
                    .zip(&children)
                    .all(|(p, c)| p == &c.output_type())
            })
            .expect("no matching instantiation");
        Tree::Apply(sig, children)
    }

    fn arg(i: usize) -> Tree {
        Tree::Arg(i, Type::Int)
    }

    /// min (max (min x2 x1) x0) (max x1 x2)
    pub(crate) fn median_solution() -> Tree {
        let u = int_universe();
        let inner_min = app(Func::MinInt, Type::Int, vec![arg(2), arg(1)], &u);
        let left = app(Func::MaxInt, Type::Int, vec![inner_min, arg(0)], &u);
        let right = app(Func::MaxInt, Type::Int, vec![arg(1), arg(2)], &u);
        app(Func::MinInt, Type::Int, vec![left, right], &u)
    }

    /// ((length x1) > (length x0)) && ((length x1) < (length x2))
    fn compare_string_lengths_solution() -> Tree {
        let u = TypeUniverse::new(
            vec![Type::Char, Type::Bool, Type::string(), Type::Int],
            vec![Type::string(), Type::string(), Type::string()],
            Type::Bool,
        )
        .unwrap();
        let s = |i| Tree::Arg(i, Type::string());
        let len = |t| app(Func::Len, Type::Int, vec![t], &u);
        let gt = app(Func::GtInt, Type::Bool, vec![len(s(1)), len(s(0))], &u);
        let lt = app(Func::LtInt, Type::Bool, vec![len(s(1)), len(s(2))], &u);
        app(Func::And, Type::Bool, vec![gt, lt], &u)
    }

    #[test]
    fn type_of_signature_output() {
        let u = int_universe();
        let t = app(Func::AddInt, Type::Int, vec![Tree::int(1), Tree::int(2)], &u);
        assert_eq!(type_of(&t), Ok(Type::Int));
    }

    #[test]
    fn type_of_rejects_mismatched_child() {
        let sigs = unify_output(Func::AddInt, &Type::Int, &int_universe());
        let t = Tree::Apply(sigs[0].clone(), vec![Tree::int(1), Tree::boolean(true)]);
        match type_of(&t) {
            Err(TypeError::Mismatch { path, expected, actual }) => {
                assert_eq!(path, vec![1]);
                assert_eq!(expected, Type::Int);
                assert_eq!(actual, Type::Bool);
            }
            other => panic!("expected mismatch, got {other:?}"),
        }
    }

    #[test]
    fn type_of_median_solution() {
        assert_eq!(type_of(&median_solution()), Ok(Type::Int));
    }

    #[test]
    fn node_count_matches_hand_counts() {
        assert_eq!(node_count(&median_solution()), 9);
        assert_eq!(node_count(&compare_string_lengths_solution()), 11);
        assert_eq!(node_count(&Tree::int(5)), 1);
    }

    #[test]
    fn depth_convention() {
        let u = int_universe();
        assert_eq!(depth(&Tree::int(5)), 0);
        let one = app(Func::AddInt, Type::Int, vec![Tree::int(1), Tree::int(2)], &u);
        assert_eq!(depth(&one), 1);
        let two = app(
            Func::AddInt,
            Type::Int,
            vec![
                app(Func::AddInt, Type::Int, vec![arg(0), Tree::int(1)], &u),
                Tree::int(2),
            ],
            &u,
        );
        assert_eq!(depth(&two), 2);
    }

    #[test]
    fn lambda_constraints_enforced() {
        // constant-returning lambda violates Constraint 1
        let bad = Tree::lambda(Type::Int, Type::Int, Tree::int(3));
        assert!(matches!(type_of(&bad), Err(TypeError::UnusedParam { .. })));

        // argument references may not appear inside bodies
        let bad = Tree::lambda(Type::Int, Type::Int, Tree::Arg(0, Type::Int));
        assert!(matches!(type_of(&bad), Err(TypeError::ArgInLambda { .. })));

        // a bare parameter reference outside any lambda is invalid
        assert!(matches!(
            type_of(&Tree::Param(Type::Int)),
            Err(TypeError::ParamOutsideLambda { .. })
        ));

        let ok = Tree::identity(Type::Int);
        assert_eq!(type_of(&ok), Ok(Type::fun(Type::Int, Type::Int)));
    }

    #[test]
    fn positions_treat_lambdas_as_units() {
        let lam = Tree::identity(Type::Int);
        let u = TypeUniverse::new(
            vec![Type::Int, Type::list(Type::Int)],
            vec![Type::list(Type::Int)],
            Type::list(Type::Int),
        )
        .unwrap();
        let t = app(
            Func::Map,
            Type::list(Type::Int),
            vec![lam, Tree::Arg(0, Type::list(Type::Int))],
            &u,
        );
        let ps = main_positions(&t);
        // map node, lambda unit, list argument: the body is not a position
        assert_eq!(ps.len(), 3);
        assert_eq!(node_count(&t), 3);
        assert_eq!(program_depth(&t), 1);
        assert_eq!(depth(&t), 2);
    }

    #[test]
    fn replace_at_swaps_subtree() {
        let t = median_solution();
        let swapped = replace_at(&t, &[1], Tree::int(7));
        assert_eq!(node_at(&swapped, &[1]), &Tree::int(7));
        assert_eq!(node_count(&swapped), 7);
        assert_eq!(type_of(&swapped), Ok(Type::Int));
    }
}
