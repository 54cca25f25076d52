//! The benchmark catalog: problem definitions, dataset generation, error
//! metrics, and fitness/accuracy computation.
//!
//! Each problem fixes argument/output types, a type universe, a metric, fixed
//! edge-case inputs, a random case generator, a native reference oracle, and
//! a hand-written solution expressed as a grammar tree. Case generators
//! approximate the usual benchmark-suite distributions with documented
//! ranges; edge cases always lead the training set.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fitness::Fitness;
use crate::grammar::{Func, TypeUniverse};
use crate::interp::{eval, EvalBudget};
use crate::tree::Tree;
use crate::types::Type;
use crate::value::Value;

/// Absolute tolerance for float equality in accuracy checks.
pub const FLOAT_TOLERANCE: f64 = 1e-4;

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    /// |a - b| over ints or floats.
    AbsNumeric,
    /// 0 when equal, 1 otherwise.
    BoolMismatch,
    /// Edit distance between character strings.
    Levenshtein,
    /// Sum of |a_i - b_i| over the common prefix plus a penalty per length
    /// difference.
    NumericListDistance { penalty: f64 },
    /// Edit distance between the newline-joined renderings of string lists.
    StringListDistance,
}

pub fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (j, cl) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = j + 1;
        for (i, cs) in short.iter().enumerate() {
            let up = row[i + 1];
            row[i + 1] = if cs == cl {
                diag
            } else {
                1 + diag.min(up).min(row[i])
            };
            diag = up;
        }
    }
    *row.last().unwrap()
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

fn numeric(v: &Value) -> f64 {
    match v {
        Value::Int(i) => *i as f64,
        Value::Float(x) => *x as f64,
        _ => unreachable!("metric applied to a non-numeric value"),
    }
}

fn string_of(v: &Value) -> String {
    v.as_string().expect("metric applied to a non-string value")
}

fn joined(v: &Value) -> String {
    match v {
        Value::List(items) => items
            .iter()
            .map(string_of)
            .collect::<Vec<_>>()
            .join("\n"),
        _ => unreachable!("metric applied to a non-list value"),
    }
}

impl Metric {
    pub fn distance(&self, actual: &Value, expected: &Value) -> f64 {
        match self {
            Metric::AbsNumeric => (numeric(actual) - numeric(expected)).abs(),
            Metric::BoolMismatch => {
                if actual == expected {
                    0.0
                } else {
                    1.0
                }
            }
            Metric::Levenshtein => levenshtein(&string_of(actual), &string_of(expected)) as f64,
            Metric::NumericListDistance { penalty } => {
                let (a, b) = match (actual, expected) {
                    (Value::List(a), Value::List(b)) => (a, b),
                    _ => unreachable!("metric applied to non-list values"),
                };
                let prefix: f64 = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (numeric(x) - numeric(y)).abs())
                    .sum();
                prefix + penalty * (a.len().abs_diff(b.len()) as f64)
            }
            Metric::StringListDistance => {
                levenshtein(&joined(actual), &joined(expected)) as f64
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::AbsNumeric => "abs-numeric",
            Metric::BoolMismatch => "bool-mismatch",
            Metric::Levenshtein => "levenshtein",
            Metric::NumericListDistance { .. } => "numeric-list-distance",
            Metric::StringListDistance => "string-list-distance",
        }
    }
}

/// Exact equality with an absolute tolerance on floats, applied recursively.
pub fn values_match(actual: &Value, expected: &Value) -> bool {
    match (actual, expected) {
        (Value::Float(a), Value::Float(b)) => (*a as f64 - *b as f64).abs() <= FLOAT_TOLERANCE,
        (Value::List(a), Value::List(b)) => {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| values_match(x, y))
        }
        (Value::Pair(a1, a2), Value::Pair(b1, b2)) => {
            values_match(a1, b1) && values_match(a2, b2)
        }
        _ => actual == expected,
    }
}

// ---------------------------------------------------------------------------
// Cases and datasets
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub args: Vec<Value>,
    pub expected: Value,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub train: Vec<Case>,
    pub test: Vec<Case>,
}

type ArgGen = fn(&mut ChaCha8Rng) -> Vec<Value>;
type Oracle = fn(&[Value]) -> Value;

#[derive(Clone)]
pub struct BenchmarkSpec {
    pub name: &'static str,
    pub universe: TypeUniverse,
    pub metric: Metric,
    pub n_train: usize,
    pub n_test: usize,
    edge_cases: fn() -> Vec<Vec<Value>>,
    gen_args: ArgGen,
    oracle: Oracle,
    solution: fn() -> Tree,
}

impl std::fmt::Debug for BenchmarkSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BenchmarkSpec").field("name", &self.name).finish()
    }
}

impl BenchmarkSpec {
    pub fn arg_types(&self) -> &[Type] {
        self.universe.args()
    }

    pub fn output(&self) -> &Type {
        self.universe.output()
    }

    pub fn oracle(&self, args: &[Value]) -> Value {
        (self.oracle)(args)
    }

    pub fn edge_cases(&self) -> Vec<Vec<Value>> {
        (self.edge_cases)()
    }

    /// The hand-written reference solution as a grammar tree.
    pub fn solution(&self) -> Tree {
        (self.solution)()
    }
}

/// Deterministic dataset: fixed edge cases lead the training set, then random
/// cases; train and test use disjoint rng streams derived from the seed.
pub fn generate_dataset(
    spec: &BenchmarkSpec,
    n_train: usize,
    n_test: usize,
    data_seed: u64,
) -> Dataset {
    let edges = spec.edge_cases();
    assert!(
        n_train >= edges.len(),
        "{}: training size {n_train} is smaller than the {} edge cases",
        spec.name,
        edges.len()
    );
    let mut train_rng = ChaCha8Rng::seed_from_u64(data_seed);
    let mut test_rng = ChaCha8Rng::seed_from_u64(data_seed ^ 0x9E37_79B9_7F4A_7C15);
    let case = |args: Vec<Value>| {
        let expected = spec.oracle(&args);
        Case { args, expected }
    };
    let mut train: Vec<Case> = edges.into_iter().map(case).collect();
    while train.len() < n_train {
        train.push(case((spec.gen_args)(&mut train_rng)));
    }
    let test: Vec<Case> = (0..n_test)
        .map(|_| case((spec.gen_args)(&mut test_rng)))
        .collect();
    Dataset { train, test }
}

// ---------------------------------------------------------------------------
// Fitness and accuracy
// ---------------------------------------------------------------------------

/// One pass over the cases computing both the error total and the fraction
/// of exactly solved cases. Any runtime error makes the fitness `Worst`;
/// accuracy still counts the remaining cases.
pub fn evaluate_cases(
    tree: &Tree,
    cases: &[Case],
    metric: Metric,
    budget: &EvalBudget,
) -> (Fitness, f64) {
    let mut total = 0.0f64;
    let mut errored = false;
    let mut hits = 0usize;
    for case in cases {
        match eval(tree, &case.args, budget) {
            Ok(actual) => {
                if !errored {
                    total += metric.distance(&actual, &case.expected);
                }
                if values_match(&actual, &case.expected) {
                    hits += 1;
                }
            }
            Err(_) => errored = true,
        }
    }
    let fitness = if errored { Fitness::Worst } else { Fitness::ErrorTotal(total) };
    let accuracy = if cases.is_empty() { 1.0 } else { hits as f64 / cases.len() as f64 };
    (fitness, accuracy)
}

pub fn fitness_of(tree: &Tree, cases: &[Case], metric: Metric, budget: &EvalBudget) -> Fitness {
    evaluate_cases(tree, cases, metric, budget).0
}

pub fn accuracy_of(tree: &Tree, cases: &[Case], budget: &EvalBudget) -> f64 {
    let mut hits = 0usize;
    for case in cases {
        if let Ok(actual) = eval(tree, &case.args, budget) {
            if values_match(&actual, &case.expected) {
                hits += 1;
            }
        }
    }
    if cases.is_empty() {
        1.0
    } else {
        hits as f64 / cases.len() as f64
    }
}

// ---------------------------------------------------------------------------
// JSON-lines import/export
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {0}: {1}")]
    Json(usize, serde_json::Error),
    #[error("line {line}: malformed value: {detail}")]
    BadValue { line: usize, detail: String },
}

pub fn value_to_json(v: &Value) -> serde_json::Value {
    use serde_json::json;
    match v {
        Value::Int(i) => json!({ "int": i }),
        Value::Float(x) => json!({ "float": x }),
        Value::Bool(b) => json!({ "bool": b }),
        Value::Char(c) => json!({ "char": c.to_string() }),
        Value::List(items) => match v.as_string() {
            Some(s) if !items.is_empty() => json!({ "string": s }),
            _ => json!({ "list": items.iter().map(value_to_json).collect::<Vec<_>>() }),
        },
        Value::Pair(a, b) => json!({ "pair": [value_to_json(a), value_to_json(b)] }),
        Value::Closure { .. } => unreachable!("closures never appear in datasets"),
    }
}

fn value_from_json_inner(j: &serde_json::Value) -> Result<Value, String> {
    let obj = j.as_object().ok_or_else(|| format!("expected tagged object, got {j}"))?;
    if obj.len() != 1 {
        return Err(format!("expected a single tag, got {j}"));
    }
    let (tag, payload) = obj.iter().next().unwrap();
    match tag.as_str() {
        "int" => payload
            .as_i64()
            .and_then(|i| i32::try_from(i).ok())
            .map(Value::Int)
            .ok_or_else(|| format!("bad int payload {payload}")),
        "float" => payload
            .as_f64()
            .map(|x| Value::Float(x as f32))
            .ok_or_else(|| format!("bad float payload {payload}")),
        "bool" => payload
            .as_bool()
            .map(Value::Bool)
            .ok_or_else(|| format!("bad bool payload {payload}")),
        "char" => {
            let s = payload.as_str().ok_or_else(|| format!("bad char payload {payload}"))?;
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(Value::Char(c)),
                _ => Err(format!("char payload must be one character, got {s:?}")),
            }
        }
        "string" => payload
            .as_str()
            .map(Value::string)
            .ok_or_else(|| format!("bad string payload {payload}")),
        "list" => payload
            .as_array()
            .ok_or_else(|| format!("bad list payload {payload}"))?
            .iter()
            .map(value_from_json_inner)
            .collect::<Result<Vec<_>, _>>()
            .map(Value::List),
        "pair" => {
            let arr = payload.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                format!("pair payload must be a two-element array, got {payload}")
            })?;
            Ok(Value::pair(
                value_from_json_inner(&arr[0])?,
                value_from_json_inner(&arr[1])?,
            ))
        }
        other => Err(format!("unknown tag {other:?}")),
    }
}

pub fn value_from_json(j: &serde_json::Value) -> Result<Value, String> {
    value_from_json_inner(j)
}

pub fn cases_to_jsonl(cases: &[Case]) -> String {
    use serde_json::json;
    let mut out = String::new();
    for case in cases {
        let line = json!({
            "args": case.args.iter().map(value_to_json).collect::<Vec<_>>(),
            "expected": value_to_json(&case.expected),
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

pub fn cases_from_jsonl(text: &str) -> Result<Vec<Case>, DataError> {
    let mut cases = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let j: serde_json::Value =
            serde_json::from_str(line).map_err(|e| DataError::Json(i + 1, e))?;
        let bad = |detail: String| DataError::BadValue { line: i + 1, detail };
        let args = j["args"]
            .as_array()
            .ok_or_else(|| bad("missing args array".into()))?
            .iter()
            .map(value_from_json_inner)
            .collect::<Result<Vec<_>, _>>()
            .map_err(bad)?;
        let expected = value_from_json_inner(&j["expected"]).map_err(bad)?;
        cases.push(Case { args, expected });
    }
    Ok(cases)
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

fn ints(rng: &mut ChaCha8Rng, n: usize, lo: i32, hi: i32) -> Vec<Value> {
    (0..n).map(|_| Value::Int(rng.gen_range(lo..=hi))).collect()
}

fn int_list(rng: &mut ChaCha8Rng, max_len: usize, lo: i32, hi: i32) -> Value {
    let len = rng.gen_range(0..=max_len);
    Value::List(ints(rng, len, lo, hi))
}

fn rand_string(rng: &mut ChaCha8Rng, max_len: usize) -> Value {
    let len = rng.gen_range(0..=max_len);
    Value::List(
        (0..len)
            .map(|_| Value::Char(rng.gen_range(0x20u32..=0x7E) as u8 as char))
            .collect(),
    )
}

fn as_i32(v: &Value) -> i32 {
    match v {
        Value::Int(i) => *i,
        _ => unreachable!(),
    }
}

fn as_f32(v: &Value) -> f32 {
    match v {
        Value::Float(x) => *x,
        _ => unreachable!(),
    }
}

fn list_i32(v: &Value) -> Vec<i32> {
    match v {
        Value::List(items) => items.iter().map(as_i32).collect(),
        _ => unreachable!(),
    }
}

fn int_list_value(xs: &[i32]) -> Value {
    Value::List(xs.iter().map(|&i| Value::Int(i)).collect())
}

fn universe(extra: Vec<Type>, args: Vec<Type>, output: Type) -> TypeUniverse {
    TypeUniverse::closed(extra, args, output)
}

fn number_io() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "number-io",
        universe: universe(vec![], vec![Type::Int, Type::Float], Type::Float),
        metric: Metric::AbsNumeric,
        n_train: 25,
        n_test: 1000,
        edge_cases: || vec![vec![Value::Int(0), Value::Float(0.0)]],
        gen_args: |rng| {
            vec![
                Value::Int(rng.gen_range(-100..=100)),
                Value::Float(rng.gen_range(-100.0..=100.0)),
            ]
        },
        oracle: |args| Value::Float(as_i32(&args[0]) as f32 + as_f32(&args[1])),
        solution: || {
            Tree::app(
                Func::AddFloat,
                vec![
                    Tree::app(Func::IntToFloat, vec![Tree::Arg(0, Type::Int)]),
                    Tree::Arg(1, Type::Float),
                ],
            )
        },
    }
}

fn smallest() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "smallest",
        universe: universe(vec![Type::Bool], vec![Type::Int; 4], Type::Int),
        metric: Metric::AbsNumeric,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            [[0, 0, 0, 0], [-100, -100, -100, -100], [0, 1, 2, 3], [3, 2, 1, 0], [7, 7, 7, 0]]
                .iter()
                .map(|xs| xs.iter().map(|&i| Value::Int(i)).collect())
                .collect()
        },
        gen_args: |rng| ints(rng, 4, -100, 100),
        oracle: |args| Value::Int(args.iter().map(as_i32).min().unwrap()),
        solution: || {
            let x = |i| Tree::Arg(i, Type::Int);
            Tree::app(
                Func::MinInt,
                vec![
                    Tree::app(Func::MinInt, vec![x(0), x(1)]),
                    Tree::app(Func::MinInt, vec![x(2), x(3)]),
                ],
            )
        },
    }
}

fn median() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "median",
        universe: universe(vec![Type::Bool], vec![Type::Int; 3], Type::Int),
        metric: Metric::AbsNumeric,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            [[0, 0, 0], [1, 1, 2], [2, 1, 1], [-5, -5, -5], [0, 1, 2], [2, 0, 1]]
                .iter()
                .map(|xs| xs.iter().map(|&i| Value::Int(i)).collect())
                .collect()
        },
        gen_args: |rng| ints(rng, 3, -100, 100),
        oracle: |args| {
            let mut xs: Vec<i32> = args.iter().map(as_i32).collect();
            xs.sort_unstable();
            Value::Int(xs[1])
        },
        solution: median_solution,
    }
}

/// min (max (min x2 x1) x0) (max x1 x2)
pub fn median_solution() -> Tree {
    let x = |i| Tree::Arg(i, Type::Int);
    Tree::app(
        Func::MinInt,
        vec![
            Tree::app(
                Func::MaxInt,
                vec![Tree::app(Func::MinInt, vec![x(2), x(1)]), x(0)],
            ),
            Tree::app(Func::MaxInt, vec![x(1), x(2)]),
        ],
    )
}

fn negative_to_zero() -> BenchmarkSpec {
    let list_int = Type::list(Type::Int);
    BenchmarkSpec {
        name: "negative-to-zero",
        universe: universe(vec![Type::Bool], vec![list_int.clone()], list_int),
        metric: Metric::NumericListDistance { penalty: 100.0 },
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            vec![
                vec![int_list_value(&[])],
                vec![int_list_value(&[0])],
                vec![int_list_value(&[-1])],
                vec![int_list_value(&[-100, -5, -2])],
                vec![int_list_value(&[1, 2, 3])],
                vec![int_list_value(&[-1, 1, -2, 2])],
            ]
        },
        gen_args: |rng| vec![int_list(rng, 15, -100, 100)],
        oracle: |args| int_list_value(&list_i32(&args[0]).iter().map(|&x| x.max(0)).collect::<Vec<_>>()),
        solution: || {
            let body = Tree::app(Func::MaxInt, vec![Tree::Param(Type::Int), Tree::int(0)]);
            Tree::app(
                Func::Map,
                vec![
                    Tree::lambda(Type::Int, Type::Int, body),
                    Tree::Arg(0, Type::list(Type::Int)),
                ],
            )
        },
    }
}

fn compare_string_lengths() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "compare-string-lengths",
        universe: universe(
            vec![Type::Int, Type::Bool],
            vec![Type::string(); 3],
            Type::Bool,
        ),
        metric: Metric::BoolMismatch,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            [["", "", ""], ["", "a", "ab"], ["a", "a", "a"], ["ab", "a", ""], ["a", "ab", "abc"]]
                .iter()
                .map(|ss| ss.iter().map(|s| Value::string(s)).collect())
                .collect()
        },
        gen_args: |rng| {
            if rng.gen_bool(0.5) {
                // strictly increasing lengths so positives are well represented
                let l0 = rng.gen_range(0..=5);
                let l1 = l0 + rng.gen_range(1..=4);
                let l2 = l1 + rng.gen_range(1..=4);
                [l0, l1, l2]
                    .iter()
                    .map(|&l| {
                        Value::List(
                            (0..l)
                                .map(|_| Value::Char(rng.gen_range(b'a'..=b'z') as char))
                                .collect(),
                        )
                    })
                    .collect()
            } else {
                (0..3).map(|_| rand_string(rng, 10)).collect()
            }
        },
        oracle: |args| {
            let len = |v: &Value| match v {
                Value::List(items) => items.len(),
                _ => unreachable!(),
            };
            Value::Bool(len(&args[0]) < len(&args[1]) && len(&args[1]) < len(&args[2]))
        },
        solution: || {
            let s = |i| Tree::Arg(i, Type::string());
            let len = |t| Tree::app(Func::Len, vec![t]);
            Tree::app(
                Func::And,
                vec![
                    Tree::app(Func::GtInt, vec![len(s(1)), len(s(0))]),
                    Tree::app(Func::LtInt, vec![len(s(1)), len(s(2))]),
                ],
            )
        },
    }
}

fn count_odds() -> BenchmarkSpec {
    let list_int = Type::list(Type::Int);
    BenchmarkSpec {
        name: "count-odds",
        universe: universe(vec![Type::Bool], vec![list_int], Type::Int),
        metric: Metric::AbsNumeric,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            vec![
                vec![int_list_value(&[])],
                vec![int_list_value(&[0])],
                vec![int_list_value(&[1])],
                vec![int_list_value(&[-1])],
                vec![int_list_value(&[2, 4, 6])],
                vec![int_list_value(&[1, 3, 5])],
            ]
        },
        gen_args: |rng| vec![int_list(rng, 15, -100, 100)],
        oracle: |args| {
            Value::Int(list_i32(&args[0]).iter().filter(|x| *x % 2 != 0).count() as i32)
        },
        solution: || {
            let body = Tree::app(
                Func::EqInt,
                vec![
                    Tree::app(Func::ModInt, vec![Tree::Param(Type::Int), Tree::int(2)]),
                    Tree::int(1),
                ],
            );
            Tree::app(
                Func::Len,
                vec![Tree::app(
                    Func::Filter,
                    vec![
                        Tree::lambda(Type::Int, Type::Bool, body),
                        Tree::Arg(0, Type::list(Type::Int)),
                    ],
                )],
            )
        },
    }
}

fn small_or_large() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "small-or-large",
        universe: universe(
            vec![Type::Bool, Type::string()],
            vec![Type::Int],
            Type::string(),
        ),
        metric: Metric::Levenshtein,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            [-10000, 0, 999, 1000, 1001, 1999, 2000, 2001, 10000]
                .iter()
                .map(|&i| vec![Value::Int(i)])
                .collect()
        },
        gen_args: |rng| vec![Value::Int(rng.gen_range(-10_000..=10_000))],
        oracle: |args| {
            let n = as_i32(&args[0]);
            Value::string(if n < 1000 {
                "small"
            } else if n >= 2000 {
                "large"
            } else {
                ""
            })
        },
        solution: || {
            let x = Tree::Arg(0, Type::Int);
            let s = |t: &str| Tree::Const(Value::string(t), Type::string());
            Tree::app(
                Func::If,
                vec![
                    Tree::app(Func::LtInt, vec![x.clone(), Tree::int(1000)]),
                    s("small"),
                    Tree::app(
                        Func::If,
                        vec![
                            Tree::app(Func::LtInt, vec![x, Tree::int(2000)]),
                            s(""),
                            s("large"),
                        ],
                    ),
                ],
            )
        },
    }
}

fn for_loop_index() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "for-loop-index",
        universe: universe(
            vec![Type::list(Type::Int), Type::list(Type::string())],
            vec![Type::Int; 3],
            Type::string(),
        ),
        metric: Metric::Levenshtein,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            [[0, 0, 1], [0, 10, 2], [-5, 5, 3], [10, 0, 1], [3, 3, 5]]
                .iter()
                .map(|xs| xs.iter().map(|&i| Value::Int(i)).collect())
                .collect()
        },
        gen_args: |rng| {
            let start = rng.gen_range(-100..=100);
            let end = start + rng.gen_range(0..=30);
            let step = rng.gen_range(1..=10);
            vec![Value::Int(start), Value::Int(end), Value::Int(step)]
        },
        oracle: |args| {
            // indices from start through end inclusive by step, one per line
            let (start, end, step) = (as_i32(&args[0]), as_i32(&args[1]), as_i32(&args[2]));
            let mut out = String::new();
            let mut v = start;
            while v <= end {
                out.push_str(&v.to_string());
                out.push('\n');
                v += step;
            }
            Value::string(&out)
        },
        solution: || {
            let x = |i| Tree::Arg(i, Type::Int);
            let show = Tree::lambda(
                Type::Int,
                Type::string(),
                Tree::app(Func::ShowInt, vec![Tree::Param(Type::Int)]),
            );
            Tree::app(
                Func::Unlines,
                vec![Tree::app(
                    Func::Map,
                    vec![show, Tree::app(Func::Range, vec![x(0), x(1), x(2)])],
                )],
            )
        },
    }
}

fn grade() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "grade",
        universe: universe(
            vec![Type::Bool, Type::string()],
            vec![Type::Int; 5],
            Type::string(),
        ),
        metric: Metric::Levenshtein,
        n_train: 200,
        n_test: 1000,
        edge_cases: || {
            [
                [80, 60, 40, 20, 80],
                [80, 60, 40, 20, 79],
                [80, 60, 40, 20, 60],
                [80, 60, 40, 20, 40],
                [80, 60, 40, 20, 20],
                [80, 60, 40, 20, 19],
                [80, 60, 40, 20, 0],
                [80, 60, 40, 20, 100],
            ]
            .iter()
            .map(|xs| xs.iter().map(|&i| Value::Int(i)).collect())
            .collect()
        },
        gen_args: |rng| {
            // four distinct descending thresholds plus a score
            let mut ts = [0i32; 4];
            loop {
                for t in ts.iter_mut() {
                    *t = rng.gen_range(1..=99);
                }
                ts.sort_unstable_by(|a, b| b.cmp(a));
                if ts.windows(2).all(|w| w[0] > w[1]) {
                    break;
                }
            }
            let score = rng.gen_range(0..=100);
            ts.iter().chain([&score]).map(|&i| Value::Int(i)).collect()
        },
        oracle: |args| {
            let t: Vec<i32> = args.iter().map(as_i32).collect();
            let s = t[4];
            Value::string(if s >= t[0] {
                "A"
            } else if s >= t[1] {
                "B"
            } else if s >= t[2] {
                "C"
            } else if s >= t[3] {
                "D"
            } else {
                "F"
            })
        },
        solution: || {
            let x = |i| Tree::Arg(i, Type::Int);
            let s = |t: &str| Tree::Const(Value::string(t), Type::string());
            let ge = |a: Tree, b: Tree| {
                Tree::app(Func::Not, vec![Tree::app(Func::LtInt, vec![a, b])])
            };
            let mut tree = s("F");
            for (i, letter) in [(3, "D"), (2, "C"), (1, "B"), (0, "A")] {
                tree = Tree::app(Func::If, vec![ge(x(4), x(i)), s(letter), tree]);
            }
            tree
        },
    }
}

fn string_lengths_backwards() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "string-lengths-backwards",
        universe: universe(
            vec![Type::Int],
            vec![Type::list(Type::string())],
            Type::string(),
        ),
        metric: Metric::Levenshtein,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            vec![
                vec![Value::List(vec![])],
                vec![Value::List(vec![Value::string("")])],
                vec![Value::List(vec![Value::string("a"), Value::string("ab")])],
            ]
        },
        gen_args: |rng| {
            let n = rng.gen_range(0..=8);
            vec![Value::List((0..n).map(|_| rand_string(rng, 8)).collect())]
        },
        oracle: |args| {
            let strs = match &args[0] {
                Value::List(items) => items,
                _ => unreachable!(),
            };
            let mut out = String::new();
            for s in strs.iter().rev() {
                out.push_str(&s.as_string().unwrap().chars().count().to_string());
                out.push('\n');
            }
            Value::string(&out)
        },
        solution: || {
            let body = Tree::app(
                Func::ShowInt,
                vec![Tree::app(Func::Len, vec![Tree::Param(Type::string())])],
            );
            Tree::app(
                Func::Unlines,
                vec![Tree::app(
                    Func::Map,
                    vec![
                        Tree::lambda(Type::string(), Type::string(), body),
                        Tree::app(
                            Func::Reverse,
                            vec![Tree::Arg(0, Type::list(Type::string()))],
                        ),
                    ],
                )],
            )
        },
    }
}

fn vector_average() -> BenchmarkSpec {
    let list_float = Type::list(Type::Float);
    BenchmarkSpec {
        name: "vector-average",
        universe: universe(vec![Type::Int], vec![list_float], Type::Float),
        metric: Metric::AbsNumeric,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            vec![
                vec![Value::List(vec![Value::Float(0.0)])],
                vec![Value::List(vec![Value::Float(5.0)])],
                vec![Value::List(vec![Value::Float(-10.0), Value::Float(10.0)])],
            ]
        },
        gen_args: |rng| {
            let n = rng.gen_range(1..=15);
            vec![Value::List(
                (0..n)
                    .map(|_| Value::Float(rng.gen_range(-100.0..=100.0)))
                    .collect(),
            )]
        },
        oracle: |args| {
            // same f32 fold the interpreted solution performs
            let items = match &args[0] {
                Value::List(items) => items,
                _ => unreachable!(),
            };
            let sum: f32 = items.iter().map(as_f32).sum();
            Value::Float(sum / items.len() as f32)
        },
        solution: || {
            let xs = Tree::Arg(0, Type::list(Type::Float));
            Tree::app(
                Func::DivFloat,
                vec![
                    Tree::app(Func::SumFloats, vec![xs.clone()]),
                    Tree::app(Func::IntToFloat, vec![Tree::app(Func::Len, vec![xs])]),
                ],
            )
        },
    }
}

fn vectors_summed() -> BenchmarkSpec {
    let list_int = Type::list(Type::Int);
    BenchmarkSpec {
        name: "vectors-summed",
        universe: universe(
            vec![Type::list(Type::pair(Type::Int, Type::Int))],
            vec![list_int.clone(), list_int.clone()],
            list_int,
        ),
        metric: Metric::NumericListDistance { penalty: 100.0 },
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            vec![
                vec![int_list_value(&[]), int_list_value(&[])],
                vec![int_list_value(&[0]), int_list_value(&[0])],
                vec![int_list_value(&[1, 2]), int_list_value(&[3, 4])],
            ]
        },
        gen_args: |rng| {
            let n = rng.gen_range(0..=10);
            vec![
                Value::List(ints(rng, n, -100, 100)),
                Value::List(ints(rng, n, -100, 100)),
            ]
        },
        oracle: |args| {
            let (a, b) = (list_i32(&args[0]), list_i32(&args[1]));
            int_list_value(
                &a.iter()
                    .zip(&b)
                    .map(|(x, y)| x.wrapping_add(*y))
                    .collect::<Vec<_>>(),
            )
        },
        solution: || {
            let pair_ty = Type::pair(Type::Int, Type::Int);
            let body = Tree::app(
                Func::AddInt,
                vec![
                    Tree::app(Func::Fst, vec![Tree::Param(pair_ty.clone())]),
                    Tree::app(Func::Snd, vec![Tree::Param(pair_ty.clone())]),
                ],
            );
            Tree::app(
                Func::Map,
                vec![
                    Tree::lambda(pair_ty, Type::Int, body),
                    Tree::app(
                        Func::Zip,
                        vec![
                            Tree::Arg(0, Type::list(Type::Int)),
                            Tree::Arg(1, Type::list(Type::Int)),
                        ],
                    ),
                ],
            )
        },
    }
}

fn sum_of_squares() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "sum-of-squares",
        universe: universe(vec![Type::list(Type::Int)], vec![Type::Int], Type::Int),
        metric: Metric::AbsNumeric,
        n_train: 50,
        n_test: 50,
        edge_cases: || [1, 2, 100].iter().map(|&i| vec![Value::Int(i)]).collect(),
        gen_args: |rng| vec![Value::Int(rng.gen_range(1..=100))],
        oracle: |args| {
            let n = as_i32(&args[0]);
            Value::Int((1..=n).map(|i| i * i).sum())
        },
        solution: || {
            let body = Tree::app(
                Func::MultInt,
                vec![Tree::Param(Type::Int), Tree::Param(Type::Int)],
            );
            Tree::app(
                Func::SumInts,
                vec![Tree::app(
                    Func::Map,
                    vec![
                        Tree::lambda(Type::Int, Type::Int, body),
                        Tree::app(
                            Func::Range,
                            vec![Tree::int(1), Tree::Arg(0, Type::Int), Tree::int(1)],
                        ),
                    ],
                )],
            )
        },
    }
}

fn mirror_image() -> BenchmarkSpec {
    let list_int = Type::list(Type::Int);
    BenchmarkSpec {
        name: "mirror-image",
        universe: universe(
            vec![Type::Bool, Type::list(Type::pair(Type::Int, Type::Int))],
            vec![list_int.clone(), list_int],
            Type::Bool,
        ),
        metric: Metric::BoolMismatch,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            vec![
                vec![int_list_value(&[]), int_list_value(&[])],
                vec![int_list_value(&[1]), int_list_value(&[1])],
                vec![int_list_value(&[1]), int_list_value(&[2])],
                vec![int_list_value(&[1, 2]), int_list_value(&[2, 1])],
                vec![int_list_value(&[1, 2]), int_list_value(&[1, 2])],
                vec![int_list_value(&[7, 1, 4]), int_list_value(&[4, 1, 7])],
            ]
        },
        gen_args: |rng| {
            let n = rng.gen_range(0..=10);
            let a = ints(rng, n, -50, 50);
            let b = if rng.gen_bool(0.5) {
                a.iter().rev().cloned().collect()
            } else {
                ints(rng, n, -50, 50)
            };
            vec![Value::List(a), Value::List(b)]
        },
        oracle: |args| {
            let (a, b) = (list_i32(&args[0]), list_i32(&args[1]));
            Value::Bool(a.len() == b.len() && a.iter().eq(b.iter().rev()))
        },
        solution: || {
            let pair_ty = Type::pair(Type::Int, Type::Int);
            let x = |i| Tree::Arg(i, Type::list(Type::Int));
            let len = |t| Tree::app(Func::Len, vec![t]);
            let body = Tree::app(
                Func::If,
                vec![
                    Tree::app(
                        Func::EqInt,
                        vec![
                            Tree::app(Func::Fst, vec![Tree::Param(pair_ty.clone())]),
                            Tree::app(Func::Snd, vec![Tree::Param(pair_ty.clone())]),
                        ],
                    ),
                    Tree::int(0),
                    Tree::int(1),
                ],
            );
            let mismatches = Tree::app(
                Func::SumInts,
                vec![Tree::app(
                    Func::Map,
                    vec![
                        Tree::lambda(pair_ty, Type::Int, body),
                        Tree::app(
                            Func::Zip,
                            vec![x(0), Tree::app(Func::Reverse, vec![x(1)])],
                        ),
                    ],
                )],
            );
            Tree::app(
                Func::And,
                vec![
                    Tree::app(Func::EqInt, vec![len(x(0)), len(x(1))]),
                    Tree::app(Func::EqInt, vec![Tree::int(0), mismatches]),
                ],
            )
        },
    }
}

fn last_index_of_zero() -> BenchmarkSpec {
    let list_int = Type::list(Type::Int);
    BenchmarkSpec {
        name: "last-index-of-zero",
        universe: universe(
            vec![Type::Bool, Type::list(Type::pair(Type::Int, Type::Int))],
            vec![list_int],
            Type::Int,
        ),
        metric: Metric::AbsNumeric,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            vec![
                vec![int_list_value(&[0])],
                vec![int_list_value(&[0, 1])],
                vec![int_list_value(&[1, 0])],
                vec![int_list_value(&[0, 0])],
                vec![int_list_value(&[5, 0, 5])],
            ]
        },
        gen_args: |rng| {
            let n = rng.gen_range(1..=10);
            let mut xs: Vec<i32> = (0..n).map(|_| rng.gen_range(-50..=50)).collect();
            let zero_at = rng.gen_range(0..n);
            xs[zero_at] = 0;
            vec![int_list_value(&xs)]
        },
        oracle: |args| {
            let xs = list_i32(&args[0]);
            Value::Int(xs.iter().rposition(|&x| x == 0).expect("a zero is present") as i32)
        },
        solution: || {
            let pair_ty = Type::pair(Type::Int, Type::Int);
            let xs = Tree::Arg(0, Type::list(Type::Int));
            let body = Tree::app(
                Func::EqInt,
                vec![
                    Tree::int(0),
                    Tree::app(Func::Snd, vec![Tree::Param(pair_ty.clone())]),
                ],
            );
            let indexed = Tree::app(
                Func::Zip,
                vec![
                    Tree::app(
                        Func::Range,
                        vec![
                            Tree::int(0),
                            Tree::app(Func::Len, vec![xs.clone()]),
                            Tree::int(1),
                        ],
                    ),
                    xs,
                ],
            );
            Tree::app(
                Func::Fst,
                vec![Tree::app(
                    Func::Head,
                    vec![Tree::app(
                        Func::Reverse,
                        vec![Tree::app(
                            Func::Filter,
                            vec![Tree::lambda(pair_ty, Type::Bool, body), indexed],
                        )],
                    )],
                )],
            )
        },
    }
}

fn replace_space_with_newline() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "replace-space-with-newline",
        universe: universe(vec![Type::Bool], vec![Type::string()], Type::string()),
        metric: Metric::Levenshtein,
        n_train: 100,
        n_test: 1000,
        edge_cases: || {
            ["", " ", "a b", "ab", "  ", "a b c"]
                .iter()
                .map(|s| vec![Value::string(s)])
                .collect()
        },
        gen_args: |rng| {
            let len = rng.gen_range(0..=15);
            let s: String = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.25) {
                        ' '
                    } else {
                        rng.gen_range(0x21u32..=0x7E) as u8 as char
                    }
                })
                .collect();
            vec![Value::string(&s)]
        },
        oracle: |args| {
            let s = args[0].as_string().unwrap();
            Value::string(&s.replace(' ', "\n"))
        },
        solution: || {
            let body = Tree::app(
                Func::If,
                vec![
                    Tree::app(
                        Func::EqChar,
                        vec![
                            Tree::Param(Type::Char),
                            Tree::Const(Value::Char(' '), Type::Char),
                        ],
                    ),
                    Tree::Const(Value::Char('\n'), Type::Char),
                    Tree::Param(Type::Char),
                ],
            );
            Tree::app(
                Func::Map,
                vec![
                    Tree::lambda(Type::Char, Type::Char, body),
                    Tree::Arg(0, Type::string()),
                ],
            )
        },
    }
}

/// The full problem catalog.
pub fn list_benchmarks() -> Vec<BenchmarkSpec> {
    vec![
        number_io(),
        smallest(),
        median(),
        negative_to_zero(),
        compare_string_lengths(),
        count_odds(),
        small_or_large(),
        for_loop_index(),
        grade(),
        string_lengths_backwards(),
        vector_average(),
        vectors_summed(),
        sum_of_squares(),
        mirror_image(),
        last_index_of_zero(),
        replace_space_with_newline(),
    ]
}

pub fn find_benchmark(name: &str) -> Option<BenchmarkSpec> {
    list_benchmarks().into_iter().find(|b| b.name == name)
}
