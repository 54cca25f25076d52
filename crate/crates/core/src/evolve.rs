//! Steady-state evolutionary search with rank-based exponential selection.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fitness::Fitness;
use crate::generate::{GenContext, GenError};
use crate::interp::EvalBudget;
use crate::problems::{evaluate_cases, Case, Metric};
use crate::tables::Method;
use crate::tree::{main_positions, node_at, node_count, program_depth, replace_at, Tree};

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub tree: Tree,
    pub fitness: Fitness,
    pub accuracy: f64,
    pub nodes: usize,
    /// Creation index; earlier individuals win ties.
    pub age: u64,
}

impl Individual {
    fn key(&self) -> (Fitness, usize, u64) {
        (self.fitness, self.nodes, self.age)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub parent_scalar: f64,
    pub max_evaluations: u64,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub replacements_per_step: usize,
    /// When set, offspring only enter the population if they beat the
    /// current worst individual.
    pub replace_only_if_better: bool,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 1000,
            parent_scalar: 0.9993,
            max_evaluations: 300_000,
            crossover_rate: 0.5,
            mutation_rate: 0.5,
            replacements_per_step: 2,
            replace_only_if_better: false,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.population_size < 2 {
            return Err("population_size must be at least 2".into());
        }
        if !(self.parent_scalar > 0.0 && self.parent_scalar < 1.0) {
            return Err("parent_scalar must lie strictly between 0 and 1".into());
        }
        if (self.crossover_rate + self.mutation_rate - 1.0).abs() > 1e-9 {
            return Err("crossover_rate and mutation_rate must sum to 1".into());
        }
        if self.replacements_per_step == 0 || self.replacements_per_step % 2 != 0 {
            return Err("replacements_per_step must be a positive even number".into());
        }
        if self.max_evaluations < self.population_size as u64 {
            return Err("max_evaluations must cover the initial population".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub evaluations: u64,
    pub best_fitness: Fitness,
    pub best_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub best: Individual,
    pub evaluations: u64,
    pub solved_train: bool,
    pub trace: Vec<TracePoint>,
}

/// Ascending by (fitness, node count, age); stable.
pub fn rank_population(pop: &mut [Individual]) {
    pop.sort_by(|a, b| a.key().cmp(&b.key()));
}

/// Samples ranks with probability proportional to `parent_scalar^rank`.
pub struct ParentSelector {
    cdf: Vec<f64>,
}

impl ParentSelector {
    pub fn new(population: usize, parent_scalar: f64) -> ParentSelector {
        assert!(population > 0);
        let mut cdf = Vec::with_capacity(population);
        let mut acc = 0.0;
        let mut weight = 1.0;
        for _ in 0..population {
            acc += weight;
            cdf.push(acc);
            weight *= parent_scalar;
        }
        ParentSelector { cdf }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cdf.last().unwrap();
        let u = rng.gen::<f64>() * total;
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// Draws one parent from a ranked population.
pub fn select_parent<'a>(
    ranked: &'a [Individual],
    parent_scalar: f64,
    rng: &mut impl Rng,
) -> &'a Individual {
    let selector = ParentSelector::new(ranked.len(), parent_scalar);
    &ranked[selector.sample(rng)]
}

fn crossover_at(
    a: &Tree,
    cut: &[usize],
    b: &Tree,
    max_depth: usize,
    rng: &mut impl Rng,
) -> Tree {
    let target_ty = node_at(a, cut).output_type();
    let donors: Vec<Vec<usize>> = main_positions(b)
        .into_iter()
        .filter(|p| node_at(b, p).output_type() == target_ty)
        .collect();
    if donors.is_empty() {
        return a.clone();
    }
    let donor = node_at(b, &donors[rng.gen_range(0..donors.len())]).clone();
    let child = replace_at(a, cut, donor);
    if program_depth(&child) > max_depth {
        a.clone()
    } else {
        child
    }
}

/// Typed subtree crossover. The cut point in `a` is uniform over its nodes;
/// the donor in `b` is uniform over nodes of the same output type. Returns
/// `a` unchanged when no donor exists or the child would violate the depth
/// limit. Lambdas move in their entirety.
pub fn crossover(a: &Tree, b: &Tree, max_depth: usize, rng: &mut impl Rng) -> Tree {
    let positions = main_positions(a);
    let cut = &positions[rng.gen_range(0..positions.len())];
    crossover_at(a, cut, b, max_depth, rng)
}

/// Replaces a uniform-random node by a grow-method subtree of the same type,
/// sized to the remaining depth allowance. A chosen lambda is discarded and
/// regenerated whole.
pub fn mutate(a: &Tree, ctx: &GenContext, rng: &mut impl Rng) -> Tree {
    let positions = main_positions(a);
    let cut = &positions[rng.gen_range(0..positions.len())];
    let target_ty = node_at(a, cut).output_type();
    let replacement = if target_ty.is_fun() {
        ctx.gen_lambda(&target_ty, rng)
    } else {
        let budget = ctx.cfg.max_depth.saturating_sub(cut.len());
        ctx.gen_tree(&target_ty, budget, Method::Grow, rng)
    }
    .expect("mutation regenerates a type that already occurs in a valid tree");
    replace_at(a, cut, replacement)
}

/// Runs the steady-state loop: rank, draw a parent pair, produce two
/// offspring (each by crossover with probability `crossover_rate`, otherwise
/// mutation), replace the two worst, stop on a perfectly accurate individual
/// or when the evaluation budget is spent. Initial evaluations count against
/// the budget.
pub fn run(
    ctx: &GenContext,
    metric: Metric,
    train: &[Case],
    cfg: &EvolutionConfig,
    budget: &EvalBudget,
) -> Result<RunResult, GenError> {
    run_seeded(ctx, metric, train, cfg, budget, &[])
}

/// Like [`run`], with caller-provided trees prepended to the initial
/// population.
pub fn run_seeded(
    ctx: &GenContext,
    metric: Metric,
    train: &[Case],
    cfg: &EvolutionConfig,
    budget: &EvalBudget,
    initial: &[Tree],
) -> Result<RunResult, GenError> {
    assert!(!train.is_empty(), "training data must be nonempty");
    cfg.validate().expect("invalid evolution config");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut age = 0u64;
    let mut evaluations = 0u64;

    let evaluate = |tree: Tree, age: u64, evaluations: &mut u64| -> Individual {
        *evaluations += 1;
        let (fitness, accuracy) = evaluate_cases(&tree, train, metric, budget);
        let nodes = node_count(&tree);
        Individual { tree, fitness, accuracy, nodes, age }
    };

    let mut trees: Vec<Tree> = initial.to_vec();
    let generated = cfg.population_size.saturating_sub(trees.len());
    trees.extend(ctx.init_population(generated.max(2), &mut rng)?);
    trees.truncate(cfg.population_size);

    let mut pop: Vec<Individual> = Vec::with_capacity(cfg.population_size);
    let mut solved = false;
    for tree in trees {
        let ind = evaluate(tree, age, &mut evaluations);
        age += 1;
        solved |= ind.accuracy >= 1.0;
        pop.push(ind);
        if solved {
            break;
        }
    }
    rank_population(&mut pop);
    let mut trace = vec![TracePoint {
        evaluations,
        best_fitness: pop[0].fitness,
        best_accuracy: pop[0].accuracy,
    }];

    let selector = ParentSelector::new(pop.len(), cfg.parent_scalar);
    let pairs_per_step = cfg.replacements_per_step / 2;
    'outer: while !solved && evaluations + 2 <= cfg.max_evaluations {
        for _ in 0..pairs_per_step {
            if evaluations + 2 > cfg.max_evaluations {
                break;
            }
            let p1 = selector.sample(&mut rng);
            let p2 = selector.sample(&mut rng);
            let mut offspring = Vec::with_capacity(2);
            for (x, y) in [(p1, p2), (p2, p1)] {
                let tree = if rng.gen::<f64>() < cfg.crossover_rate {
                    crossover(&pop[x].tree, &pop[y].tree, ctx.cfg.max_depth, &mut rng)
                } else {
                    mutate(&pop[x].tree, ctx, &mut rng)
                };
                let ind = evaluate(tree, age, &mut evaluations);
                age += 1;
                offspring.push(ind);
            }
            if cfg.replace_only_if_better {
                for ind in offspring {
                    if pop.last().unwrap().key() > ind.key() {
                        pop.pop();
                        let at = pop.partition_point(|x| x.key() <= ind.key());
                        solved |= ind.accuracy >= 1.0;
                        pop.insert(at, ind);
                    }
                }
            } else {
                pop.truncate(pop.len() - 2);
                for ind in offspring {
                    let at = pop.partition_point(|x| x.key() <= ind.key());
                    solved |= ind.accuracy >= 1.0;
                    pop.insert(at, ind);
                }
            }
            debug_assert_eq!(pop.len(), cfg.population_size.max(2));
            trace.push(TracePoint {
                evaluations,
                best_fitness: pop[0].fitness,
                best_accuracy: pop[0].accuracy,
            });
            if solved {
                break 'outer;
            }
        }
    }

    rank_population(&mut pop);
    let best = pop
        .iter()
        .max_by(|a, b| {
            a.accuracy
                .partial_cmp(&b.accuracy)
                .unwrap()
                .then_with(|| b.key().cmp(&a.key()))
        })
        .filter(|i| i.accuracy >= 1.0)
        .cloned()
        .unwrap_or_else(|| pop[0].clone());
    let solved_train = best.accuracy >= 1.0;
    Ok(RunResult { best, evaluations, solved_train, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::GenConfig;
    use crate::grammar::{Func, TypeUniverse};
    use crate::problems::{find_benchmark, generate_dataset};
    use crate::tree::{type_of, within_depth_limits};
    use crate::types::Type;

    fn ind(fitness: Fitness, nodes: usize, age: u64) -> Individual {
        Individual { tree: Tree::int(0), fitness, accuracy: 0.0, nodes, age }
    }

    #[test]
    fn ranking_order() {
        let mut pop = vec![
            ind(Fitness::Worst, 1, 0),
            ind(Fitness::ErrorTotal(3.0), 9, 1),
            ind(Fitness::ErrorTotal(3.0), 2, 2),
            ind(Fitness::ErrorTotal(0.0), 5, 3),
        ];
        rank_population(&mut pop);
        assert_eq!(pop[0].age, 3);
        assert_eq!(pop[1].age, 2, "equal fitness: smaller tree first");
        assert_eq!(pop[2].age, 1);
        assert!(pop[3].fitness.is_worst(), "worst ranks last");

        let mut shuffled = vec![pop[2].clone(), pop[0].clone(), pop[3].clone(), pop[1].clone()];
        rank_population(&mut shuffled);
        assert_eq!(shuffled, pop, "ranking is permutation invariant");
    }

    #[test]
    fn selection_matches_geometric_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let selector = ParentSelector::new(3, 0.5);
        let n = 100_000usize;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[selector.sample(&mut rng)] += 1;
        }
        for (i, &p) in [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0].iter().enumerate() {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            let emp = counts[i] as f64 / n as f64;
            assert!(
                (emp - p).abs() < 3.0 * sigma + 1e-9,
                "rank {i}: {emp} vs {p} (sigma {sigma})"
            );
        }
    }

    #[test]
    fn selection_near_one_is_nearly_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let selector = ParentSelector::new(4, 0.999_999);
        let n = 40_000usize;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[selector.sample(&mut rng)] += 1;
        }
        for &c in &counts {
            let emp = c as f64 / n as f64;
            assert!((emp - 0.25).abs() < 0.01, "{emp} deviates from uniform");
        }
    }

    fn median_ctx() -> GenContext {
        let u = TypeUniverse::closed(
            vec![Type::Bool],
            vec![Type::Int, Type::Int, Type::Int],
            Type::Int,
        );
        GenContext::new(u, GenConfig::default()).unwrap()
    }

    #[test]
    fn crossover_without_donor_returns_first_parent() {
        let ctx = median_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // `a` has a Bool node, `b` is all Int
        let a = Tree::app(
            Func::If,
            vec![
                Tree::app(Func::GtInt, vec![Tree::Arg(0, Type::Int), Tree::Arg(1, Type::Int)]),
                Tree::Arg(0, Type::Int),
                Tree::Arg(1, Type::Int),
            ],
        );
        let b = Tree::int(5);
        let bool_cut = vec![0usize];
        assert_eq!(node_at(&a, &bool_cut).output_type(), Type::Bool);
        let out = crossover_at(&a, &bool_cut, &b, ctx.cfg.max_depth, &mut rng);
        assert_eq!(out, a);
    }

    #[test]
    fn crossover_at_root_adopts_the_donor() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = Tree::app(Func::AddInt, vec![Tree::int(1), Tree::int(2)]);
        let b = Tree::int(5);
        let out = crossover_at(&a, &[], &b, 15, &mut rng);
        assert_eq!(out, b);
    }

    #[test]
    fn operators_preserve_typing_and_depth() {
        let spec = find_benchmark("negative-to-zero").unwrap();
        let ctx = GenContext::new(spec.universe.clone(), GenConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let out_ty = ctx.universe.output().clone();
        let pool: Vec<Tree> = (0..60)
            .map(|i| {
                ctx.gen_tree(&out_ty, 2 + i % 5, Method::Grow, &mut rng).unwrap()
            })
            .collect();
        for i in 0..500 {
            let a = &pool[i % pool.len()];
            let b = &pool[(i * 7 + 3) % pool.len()];
            let crossed = crossover(a, b, ctx.cfg.max_depth, &mut rng);
            assert_eq!(type_of(&crossed), Ok(out_ty.clone()));
            assert!(within_depth_limits(&crossed, ctx.cfg.max_depth, ctx.cfg.max_lambda_depth));
            let mutated = mutate(a, &ctx, &mut rng);
            assert_eq!(type_of(&mutated), Ok(out_ty.clone()));
            assert!(within_depth_limits(&mutated, ctx.cfg.max_depth, ctx.cfg.max_lambda_depth));
        }
    }

    #[test]
    fn mutation_is_reproducible() {
        let ctx = median_ctx();
        let tree = Tree::app(Func::AddInt, vec![Tree::Arg(0, Type::Int), Tree::int(3)]);
        let m1 = mutate(&tree, &ctx, &mut ChaCha8Rng::seed_from_u64(9));
        let m2 = mutate(&tree, &ctx, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(m1, m2);
    }

    fn small_cfg(seed: u64) -> EvolutionConfig {
        EvolutionConfig {
            population_size: 60,
            max_evaluations: 2_000,
            seed,
            ..EvolutionConfig::default()
        }
    }

    #[test]
    fn run_respects_budget_and_is_deterministic() {
        let spec = find_benchmark("median").unwrap();
        let ctx = GenContext::new(spec.universe.clone(), GenConfig::default()).unwrap();
        let data = generate_dataset(&spec, 30, 10, 17);
        let cfg = small_cfg(21);
        let budget = EvalBudget::default();
        let r1 = run(&ctx, spec.metric, &data.train, &cfg, &budget).unwrap();
        assert!(r1.evaluations <= cfg.max_evaluations);
        let r2 = run(&ctx, spec.metric, &data.train, &cfg, &budget).unwrap();
        assert_eq!(r1, r2);

        // best-fitness trace never worsens
        for w in r1.trace.windows(2) {
            assert!(w[1].best_fitness <= w[0].best_fitness);
        }
    }

    #[test]
    fn seeded_solution_stops_immediately() {
        let spec = find_benchmark("median").unwrap();
        let ctx = GenContext::new(spec.universe.clone(), GenConfig::default()).unwrap();
        let data = generate_dataset(&spec, 30, 10, 18);
        let cfg = small_cfg(22);
        let solution = spec.solution();
        let r = run_seeded(
            &ctx,
            spec.metric,
            &data.train,
            &cfg,
            &EvalBudget::default(),
            &[solution.clone()],
        )
        .unwrap();
        assert!(r.solved_train);
        assert_eq!(r.evaluations, 1, "early stop during initialization");
        assert_eq!(r.best.tree, solution);
    }

    #[test]
    fn config_validation_rejects_bad_rates() {
        let mut cfg = EvolutionConfig::default();
        cfg.crossover_rate = 0.7;
        assert!(cfg.validate().is_err());
        cfg.crossover_rate = 0.5;
        cfg.parent_scalar = 1.0;
        assert!(cfg.validate().is_err());
    }
}
