//! Random creation of well-typed trees, lambdas, constants, and populations.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{monomorphize, ConcreteSig, EmptyGrammar, Func, GrammarInstance, TypeUniverse};
use crate::tables::{LambdaTables, Method, TypeTable};
use crate::tree::Tree;
use crate::types::Type;
use crate::value::Value;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub max_depth: usize,
    pub max_lambda_depth: usize,
    pub ramp_min: usize,
    pub ramp_max: usize,
    pub int_min: i32,
    pub int_max: i32,
    pub float_min: f32,
    pub float_max: f32,
    /// Mean of the geometric length distribution for list constants.
    pub list_mean_len: f64,
    pub list_max_len: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 15,
            max_lambda_depth: 3,
            ramp_min: 2,
            ramp_max: 6,
            int_min: -100,
            int_max: 100,
            float_min: -100.0,
            float_max: 100.0,
            list_mean_len: 3.0,
            list_max_len: 10,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("no tree of type {target} fits in depth budget {budget}")]
    Unproducible { target: Type, budget: usize },
    #[error("no constants of type {0}")]
    UnsupportedType(Type),
}

/// Everything needed to generate and mutate trees for one problem: the
/// monomorphized grammar, the grow/full tables, and the per-argument-type
/// lambda tables. Immutable once built; callers supply their own rngs.
#[derive(Clone, Debug)]
pub struct GenContext {
    pub universe: TypeUniverse,
    pub grammar: GrammarInstance,
    pub cfg: GenConfig,
    pub grow: TypeTable,
    pub full: TypeTable,
    pub lambdas: LambdaTables,
}

impl GenContext {
    pub fn new(universe: TypeUniverse, cfg: GenConfig) -> Result<GenContext, EmptyGrammar> {
        let grammar = monomorphize(&Func::ALL, &universe)?;
        let lambdas = LambdaTables::build(&grammar, universe.types(), cfg.max_lambda_depth);
        // lambdas behave as terminals: producible function types live in row 0
        let mut terminals: BTreeSet<Type> = universe.types().clone();
        terminals.extend(lambdas.producible_fun_types());
        let grow = TypeTable::build(&grammar, Method::Grow, cfg.max_depth, &terminals);
        let full = TypeTable::build(&grammar, Method::Full, cfg.max_depth, &terminals);
        Ok(GenContext { universe, grammar, cfg, grow, full, lambdas })
    }

    fn table(&self, method: Method) -> &TypeTable {
        match method {
            Method::Grow => &self.grow,
            Method::Full => &self.full,
        }
    }

    /// A random constant of the given first-order type.
    pub fn gen_constant(&self, ty: &Type, rng: &mut impl Rng) -> Result<Value, GenError> {
        let cfg = &self.cfg;
        match ty {
            Type::Int => Ok(Value::Int(rng.gen_range(cfg.int_min..=cfg.int_max))),
            Type::Float => Ok(Value::Float(rng.gen_range(cfg.float_min..=cfg.float_max))),
            Type::Bool => Ok(Value::Bool(rng.gen())),
            Type::Char => Ok(Value::Char(rng.gen_range(0x20u32..=0x7E) as u8 as char)),
            Type::List(elem) => {
                let continue_p = cfg.list_mean_len / (cfg.list_mean_len + 1.0);
                let mut items = Vec::new();
                while items.len() < cfg.list_max_len && rng.gen::<f64>() < continue_p {
                    items.push(self.gen_constant(elem, rng)?);
                }
                Ok(Value::List(items))
            }
            Type::Pair(a, b) => Ok(Value::pair(
                self.gen_constant(a, rng)?,
                self.gen_constant(b, rng)?,
            )),
            Type::Fun(_, _) | Type::Var(_) => Err(GenError::UnsupportedType(ty.clone())),
        }
    }

    /// A random well-typed tree of output type `target` within the depth
    /// budget. Grow may stop early; full keeps every non-lambda leaf at the
    /// exact budget depth. Function-typed slots are filled by [`Self::gen_lambda`].
    pub fn gen_tree(
        &self,
        target: &Type,
        budget: usize,
        method: Method,
        rng: &mut impl Rng,
    ) -> Result<Tree, GenError> {
        if target.is_fun() {
            return self.gen_lambda(target, rng);
        }
        let unproducible = || GenError::Unproducible { target: target.clone(), budget };

        let mut terminal_options: Vec<TerminalOption> = Vec::new();
        for (i, a) in self.universe.args().iter().enumerate() {
            if a == target {
                terminal_options.push(TerminalOption::Arg(i));
            }
        }
        if self.universe.contains(target) {
            terminal_options.push(TerminalOption::Const);
        }

        let sig_options: Vec<&ConcreteSig> = if budget == 0 {
            Vec::new()
        } else {
            let table = self.table(method);
            self.grammar
                .with_output(target)
                .filter(|sig| sig.params.iter().all(|p| self.param_available(p, table, budget - 1)))
                .collect()
        };

        match method {
            Method::Full if budget > 0 => {
                if sig_options.is_empty() {
                    return Err(unproducible());
                }
                let sig = sig_options[rng.gen_range(0..sig_options.len())].clone();
                self.expand(&sig, budget, method, rng)
            }
            _ => {
                let total = terminal_options.len() + sig_options.len();
                if total == 0 {
                    return Err(unproducible());
                }
                let choice = rng.gen_range(0..total);
                if choice < terminal_options.len() {
                    match terminal_options[choice] {
                        TerminalOption::Arg(i) => Ok(Tree::Arg(i, target.clone())),
                        TerminalOption::Const => {
                            Ok(Tree::Const(self.gen_constant(target, rng)?, target.clone()))
                        }
                    }
                } else {
                    let sig = sig_options[choice - terminal_options.len()].clone();
                    self.expand(&sig, budget, method, rng)
                }
            }
        }
    }

    fn param_available(&self, p: &Type, table: &TypeTable, budget: usize) -> bool {
        // function types live in row 0 of both tables exactly when a lambda
        // of that type is producible
        table.can_produce(p, budget)
    }

    fn expand(
        &self,
        sig: &ConcreteSig,
        budget: usize,
        method: Method,
        rng: &mut impl Rng,
    ) -> Result<Tree, GenError> {
        let mut children = Vec::with_capacity(sig.arity());
        for p in &sig.params {
            let child = if p.is_fun() {
                self.gen_lambda(p, rng)?
            } else {
                self.gen_tree(p, budget - 1, method, rng)?
            };
            children.push(child);
        }
        Ok(Tree::Apply(sig.clone(), children))
    }

    /// A random lambda of the given function type: grow-method body that is
    /// guaranteed to use the parameter, with only identity lambdas nested.
    pub fn gen_lambda(&self, fun_ty: &Type, rng: &mut impl Rng) -> Result<Tree, GenError> {
        let (arg, ret) = match fun_ty {
            Type::Fun(a, r) => (a.as_ref(), r.as_ref()),
            _ => return Err(GenError::UnsupportedType(fun_ty.clone())),
        };
        let unproducible = || GenError::Unproducible {
            target: fun_ty.clone(),
            budget: self.cfg.max_lambda_depth,
        };
        if !self.lambdas.can_produce_fun(fun_ty) {
            return Err(unproducible());
        }
        let body = self.gen_body(arg, ret, self.cfg.max_lambda_depth, true, rng)?;
        Ok(Tree::lambda(arg.clone(), ret.clone(), body))
    }

    /// Generates a lambda body subtree. When `must_use_param` holds, the
    /// result is guaranteed to contain a parameter reference.
    fn gen_body(
        &self,
        arg: &Type,
        target: &Type,
        budget: usize,
        must_use_param: bool,
        rng: &mut impl Rng,
    ) -> Result<Tree, GenError> {
        if let Type::Fun(a, r) = target {
            // nested lambdas are always the identity
            if a == r {
                return Ok(Tree::identity(a.as_ref().clone()));
            }
            return Err(GenError::Unproducible { target: target.clone(), budget });
        }
        let table = self
            .lambdas
            .table(arg)
            .expect("lambda argument type is a universe member");

        let mut options: Vec<BodyOption> = Vec::new();
        if target == arg {
            options.push(BodyOption::Param);
        }
        if !must_use_param && self.universe.contains(target) {
            options.push(BodyOption::Const);
        }
        if budget > 0 {
            for sig in self.grammar.with_output(target) {
                if must_use_param {
                    let carriers: Vec<usize> = (0..sig.arity())
                        .filter(|&j| {
                            table.contain.can_produce(&sig.params[j], budget - 1)
                                && sig.params.iter().enumerate().all(|(k, q)| {
                                    k == j || table.avail.can_produce(q, budget - 1)
                                })
                        })
                        .collect();
                    if !carriers.is_empty() {
                        options.push(BodyOption::SigCarrier(sig, carriers));
                    }
                } else if sig
                    .params
                    .iter()
                    .all(|p| table.avail.can_produce(p, budget - 1))
                {
                    options.push(BodyOption::Sig(sig));
                }
            }
        }
        if options.is_empty() {
            return Err(GenError::Unproducible { target: target.clone(), budget });
        }
        match &options[rng.gen_range(0..options.len())] {
            BodyOption::Param => Ok(Tree::Param(arg.clone())),
            BodyOption::Const => {
                Ok(Tree::Const(self.gen_constant(target, rng)?, target.clone()))
            }
            BodyOption::Sig(sig) => {
                let sig = (*sig).clone();
                let mut children = Vec::with_capacity(sig.arity());
                for p in &sig.params {
                    children.push(self.gen_body(arg, p, budget - 1, false, rng)?);
                }
                Ok(Tree::Apply(sig, children))
            }
            BodyOption::SigCarrier(sig, carriers) => {
                let sig = (*sig).clone();
                let carrier = carriers[rng.gen_range(0..carriers.len())];
                let mut children = Vec::with_capacity(sig.arity());
                for (k, p) in sig.params.iter().enumerate() {
                    children.push(self.gen_body(arg, p, budget - 1, k == carrier, rng)?);
                }
                Ok(Tree::Apply(sig, children))
            }
        }
    }

    /// Ramped half-and-half population: depths cycle over the ramp range,
    /// methods alternate, with a grow fallback when the full table cannot
    /// reach the output type at the planned depth.
    pub fn init_population(&self, size: usize, rng: &mut impl Rng) -> Result<Vec<Tree>, GenError> {
        assert!(size >= 2, "population needs at least two individuals");
        let out_ty = self.universe.output().clone();
        let mut trees = Vec::with_capacity(size);
        for (depth, method) in self.ramp_plan(size) {
            let method = match method {
                Method::Full if !self.full.can_produce(&out_ty, depth) => Method::Grow,
                m => m,
            };
            trees.push(self.gen_tree(&out_ty, depth, method, rng)?);
        }
        Ok(trees)
    }

    /// The (depth, method) schedule used by [`Self::init_population`].
    pub fn ramp_plan(&self, size: usize) -> Vec<(usize, Method)> {
        let span = self.cfg.ramp_max.saturating_sub(self.cfg.ramp_min) + 1;
        (0..size)
            .map(|i| {
                let depth = self.cfg.ramp_min + (i / 2) % span;
                let method = if i % 2 == 0 { Method::Grow } else { Method::Full };
                (depth, method)
            })
            .collect()
    }
}

enum TerminalOption {
    Arg(usize),
    Const,
}

enum BodyOption<'a> {
    Param,
    Const,
    Sig(&'a ConcreteSig),
    SigCarrier(&'a ConcreteSig, Vec<usize>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{depth, program_depth, type_of, within_depth_limits};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(types: Vec<Type>, args: Vec<Type>, output: Type) -> GenContext {
        let universe = TypeUniverse::closed(types, args, output);
        GenContext::new(universe, GenConfig::default()).unwrap()
    }

    fn median_ctx() -> GenContext {
        ctx(vec![Type::Bool], vec![Type::Int, Type::Int, Type::Int], Type::Int)
    }

    #[test]
    fn constants_respect_ranges() {
        let c = median_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..500 {
            match c.gen_constant(&Type::Int, &mut rng).unwrap() {
                Value::Int(i) => assert!((-100..=100).contains(&i)),
                other => panic!("expected int, got {other:?}"),
            }
            match c.gen_constant(&Type::Bool, &mut rng).unwrap() {
                Value::Bool(_) => {}
                other => panic!("expected bool, got {other:?}"),
            }
        }
        let lists = ctx(vec![Type::list(Type::Char)], vec![], Type::list(Type::Char));
        for _ in 0..200 {
            let v = lists.gen_constant(&Type::list(Type::Char), &mut rng).unwrap();
            match v {
                Value::List(items) => assert!(items.len() <= 10),
                other => panic!("expected list, got {other:?}"),
            }
        }
        assert_eq!(
            c.gen_constant(&Type::fun(Type::Int, Type::Int), &mut rng),
            Err(GenError::UnsupportedType(Type::fun(Type::Int, Type::Int)))
        );
    }

    #[test]
    fn budget_zero_yields_terminals() {
        let c = median_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let t = c.gen_tree(&Type::Int, 0, Method::Grow, &mut rng).unwrap();
            assert!(matches!(t, Tree::Arg(_, _) | Tree::Const(_, _)));
        }
    }

    #[test]
    fn generated_trees_typecheck() {
        let c = ctx(
            vec![Type::Bool, Type::list(Type::Int)],
            vec![Type::list(Type::Int)],
            Type::list(Type::Int),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..10_000 {
            let budget = i % (c.cfg.max_depth + 1);
            let t = c
                .gen_tree(&Type::list(Type::Int), budget, Method::Grow, &mut rng)
                .unwrap();
            assert_eq!(type_of(&t), Ok(Type::list(Type::Int)));
            assert!(program_depth(&t) <= budget);
            assert!(within_depth_limits(&t, c.cfg.max_depth, c.cfg.max_lambda_depth));
        }
    }

    #[test]
    fn unproducible_type_is_an_error() {
        let universe =
            TypeUniverse::new(vec![Type::Int], vec![Type::Int], Type::Int).unwrap();
        let c = GenContext::new(universe, GenConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            c.gen_tree(&Type::Bool, 5, Method::Grow, &mut rng),
            Err(GenError::Unproducible { .. })
        ));
    }

    #[test]
    fn full_method_hits_exact_depth() {
        let c = median_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 1..=4 {
            assert!(c.full.can_produce(&Type::Int, d));
            for _ in 0..100 {
                let t = c.gen_tree(&Type::Int, d, Method::Full, &mut rng).unwrap();
                assert_eq!(depth(&t), d, "full tree must fill its budget");
                assert_eq!(type_of(&t), Ok(Type::Int));
            }
        }
    }

    #[test]
    fn lambdas_satisfy_their_constraints() {
        let c = ctx(
            vec![Type::Bool, Type::list(Type::Int)],
            vec![Type::list(Type::Int)],
            Type::list(Type::Int),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fun_ty = Type::fun(Type::Int, Type::Bool);
        for _ in 0..2_000 {
            let lam = c.gen_lambda(&fun_ty, &mut rng).unwrap();
            // type_of enforces parameter use, identity nesting, and no args
            assert_eq!(type_of(&lam), Ok(fun_ty.clone()));
            match &lam {
                Tree::Lambda { body, .. } => {
                    assert!(program_depth(body) <= c.cfg.max_lambda_depth)
                }
                other => panic!("expected lambda, got {other:?}"),
            }
        }
    }

    #[test]
    fn unreachable_lambda_is_unproducible() {
        let c = ctx(vec![Type::Char, Type::Bool], vec![Type::Char], Type::Bool);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        // nothing maps Char to Int over this universe
        assert!(matches!(
            c.gen_lambda(&Type::fun(Type::Char, Type::Int), &mut rng),
            Err(GenError::Unproducible { .. })
        ));
    }

    #[test]
    fn population_is_ramped_and_deterministic() {
        let c = median_ctx();
        let pop = c.init_population(200, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(pop.len(), 200);
        for t in &pop {
            assert_eq!(type_of(t), Ok(Type::Int));
            assert!(program_depth(t) <= c.cfg.ramp_max);
        }
        let plan = c.ramp_plan(200);
        assert!(plan.iter().any(|(_, m)| *m == Method::Grow));
        assert!(plan.iter().any(|(_, m)| *m == Method::Full));
        assert!(plan.iter().all(|(d, _)| (2..=6).contains(d)));

        // full-planned slots really are full trees here: their depth matches
        // the planned budget exactly
        for (tree, (d, m)) in pop.iter().zip(&plan) {
            if *m == Method::Full {
                assert_eq!(depth(tree), *d);
            }
        }

        let again = c.init_population(200, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(pop, again);
    }
}
