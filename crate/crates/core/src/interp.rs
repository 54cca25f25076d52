//! Strict, pure evaluation of program trees.
//!
//! Evaluation is bottom-up except for `If`, which only evaluates the selected
//! branch. Runtime failures are first-class: they propagate as
//! [`RuntimeError`] instead of being masked by default values, and non-finite
//! float results are treated as failures so error totals stay meaningful.

use thiserror::Error;

use crate::grammar::Func;
use crate::tree::Tree;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    DivByZero,
    ModByZero,
    EmptyListHead,
    NonFiniteFloat,
    ZeroStepRange,
    ResourceExhausted,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{kind:?} at node {path:?}")]
pub struct RuntimeError {
    pub kind: ErrorKind,
    /// Path from the root to the failing node; lambda bodies count from the
    /// node applying them.
    pub path: Vec<usize>,
}

impl RuntimeError {
    fn here(kind: ErrorKind) -> RuntimeError {
        RuntimeError { kind, path: Vec::new() }
    }

    fn through(mut self, child: usize) -> RuntimeError {
        self.path.push(child);
        self
    }
}

/// Resource limits guaranteeing every evaluation terminates quickly. Steps
/// are charged per node visit, per lambda application, and per produced list
/// element.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct EvalBudget {
    pub max_steps: u64,
    pub max_list_len: usize,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { max_steps: 100_000, max_list_len: 10_000 }
    }
}

struct EvalState<'a> {
    args: &'a [Value],
    steps_left: i64,
    max_list_len: usize,
    /// Stack of lambda parameter bindings; `Param` reads the innermost.
    params: Vec<Value>,
}

impl EvalState<'_> {
    fn charge(&mut self, n: usize) -> Result<(), RuntimeError> {
        self.steps_left -= n as i64;
        if self.steps_left < 0 {
            Err(RuntimeError::here(ErrorKind::ResourceExhausted))
        } else {
            Ok(())
        }
    }

    fn check_len(&self, n: usize) -> Result<(), RuntimeError> {
        if n > self.max_list_len {
            Err(RuntimeError::here(ErrorKind::ResourceExhausted))
        } else {
            Ok(())
        }
    }
}

/// Evaluates a well-typed tree on concrete arguments.
pub fn eval(tree: &Tree, args: &[Value], budget: &EvalBudget) -> Result<Value, RuntimeError> {
    let mut state = EvalState {
        args,
        steps_left: budget.max_steps as i64,
        max_list_len: budget.max_list_len,
        params: Vec::new(),
    };
    let mut result = eval_node(tree, &mut state);
    if let Err(e) = &mut result {
        e.path.reverse();
    }
    result
}

fn finite(x: f32) -> Result<Value, RuntimeError> {
    if x.is_finite() {
        Ok(Value::Float(x))
    } else {
        Err(RuntimeError::here(ErrorKind::NonFiniteFloat))
    }
}

fn value_is_finite(v: &Value) -> bool {
    match v {
        Value::Float(x) => x.is_finite(),
        Value::List(items) => items.iter().all(value_is_finite),
        Value::Pair(a, b) => value_is_finite(a) && value_is_finite(b),
        _ => true,
    }
}

fn div_floor(a: i32, b: i32) -> i32 {
    let q = a.wrapping_div(b);
    let r = a.wrapping_rem(b);
    if r != 0 && (r < 0) != (b < 0) {
        q.wrapping_sub(1)
    } else {
        q
    }
}

fn mod_floor(a: i32, b: i32) -> i32 {
    let r = a.wrapping_rem(b);
    if r != 0 && (r < 0) != (b < 0) {
        r.wrapping_add(b)
    } else {
        r
    }
}

fn as_bool(v: &Value) -> bool {
    match v {
        Value::Bool(b) => *b,
        _ => unreachable!("type checker guarantees a boolean"),
    }
}

fn as_int(v: &Value) -> i32 {
    match v {
        Value::Int(i) => *i,
        _ => unreachable!("type checker guarantees an integer"),
    }
}

fn as_float(v: &Value) -> f32 {
    match v {
        Value::Float(x) => *x,
        _ => unreachable!("type checker guarantees a float"),
    }
}

fn into_list(v: Value) -> Vec<Value> {
    match v {
        Value::List(items) => items,
        _ => unreachable!("type checker guarantees a list"),
    }
}

fn eval_node(tree: &Tree, state: &mut EvalState) -> Result<Value, RuntimeError> {
    state.charge(1)?;
    match tree {
        Tree::Const(v, _) => {
            if value_is_finite(v) {
                Ok(v.clone())
            } else {
                Err(RuntimeError::here(ErrorKind::NonFiniteFloat))
            }
        }
        Tree::Arg(i, _) => Ok(state.args[*i].clone()),
        Tree::Param(_) => Ok(state
            .params
            .last()
            .expect("type checker guarantees an enclosing lambda")
            .clone()),
        Tree::Lambda { param, body, .. } => Ok(Value::Closure {
            param: param.clone(),
            body: body.clone(),
        }),
        Tree::Apply(sig, children) => match sig.func {
            Func::If => {
                let cond = eval_node(&children[0], state).map_err(|e| e.through(0))?;
                if as_bool(&cond) {
                    eval_node(&children[1], state).map_err(|e| e.through(1))
                } else {
                    eval_node(&children[2], state).map_err(|e| e.through(2))
                }
            }
            _ => {
                let mut vals = Vec::with_capacity(children.len());
                for (i, c) in children.iter().enumerate() {
                    vals.push(eval_node(c, state).map_err(|e| e.through(i))?);
                }
                apply_prim(sig.func, vals, state)
            }
        },
    }
}

fn apply_closure(closure: &Value, arg: Value, state: &mut EvalState) -> Result<Value, RuntimeError> {
    let body = match closure {
        Value::Closure { body, .. } => body,
        _ => unreachable!("type checker guarantees a closure"),
    };
    state.charge(1)?;
    state.params.push(arg);
    let result = eval_node(body, state);
    state.params.pop();
    result
}

fn apply_prim(func: Func, mut vals: Vec<Value>, state: &mut EvalState) -> Result<Value, RuntimeError> {
    use Func::*;
    match func {
        AddInt => Ok(Value::Int(as_int(&vals[0]).wrapping_add(as_int(&vals[1])))),
        SubInt => Ok(Value::Int(as_int(&vals[0]).wrapping_sub(as_int(&vals[1])))),
        MultInt => Ok(Value::Int(as_int(&vals[0]).wrapping_mul(as_int(&vals[1])))),
        DivInt => {
            let (a, b) = (as_int(&vals[0]), as_int(&vals[1]));
            if b == 0 {
                Err(RuntimeError::here(ErrorKind::DivByZero))
            } else {
                Ok(Value::Int(div_floor(a, b)))
            }
        }
        ModInt => {
            let (a, b) = (as_int(&vals[0]), as_int(&vals[1]));
            if b == 0 {
                Err(RuntimeError::here(ErrorKind::ModByZero))
            } else {
                Ok(Value::Int(mod_floor(a, b)))
            }
        }
        MaxInt => Ok(Value::Int(as_int(&vals[0]).max(as_int(&vals[1])))),
        MinInt => Ok(Value::Int(as_int(&vals[0]).min(as_int(&vals[1])))),
        Not => Ok(Value::Bool(!as_bool(&vals[0]))),
        And => Ok(Value::Bool(as_bool(&vals[0]) && as_bool(&vals[1]))),
        Or => Ok(Value::Bool(as_bool(&vals[0]) || as_bool(&vals[1]))),
        If => unreachable!("handled before child evaluation"),
        Sqrt => {
            let x = as_float(&vals[0]);
            finite(x.sqrt())
        }
        AddFloat => finite(as_float(&vals[0]) + as_float(&vals[1])),
        SubFloat => finite(as_float(&vals[0]) - as_float(&vals[1])),
        MultFloat => finite(as_float(&vals[0]) * as_float(&vals[1])),
        DivFloat => finite(as_float(&vals[0]) / as_float(&vals[1])),
        Singleton => {
            state.charge(1)?;
            Ok(Value::List(vec![vals.remove(0)]))
        }
        Cons => {
            let head = vals.remove(0);
            let tail = into_list(vals.remove(0));
            state.check_len(tail.len() + 1)?;
            state.charge(tail.len() + 1)?;
            let mut out = Vec::with_capacity(tail.len() + 1);
            out.push(head);
            out.extend(tail);
            Ok(Value::List(out))
        }
        Head => {
            let items = into_list(vals.remove(0));
            items
                .into_iter()
                .next()
                .ok_or_else(|| RuntimeError::here(ErrorKind::EmptyListHead))
        }
        Reverse => {
            let mut items = into_list(vals.remove(0));
            state.charge(items.len())?;
            items.reverse();
            Ok(Value::List(items))
        }
        Concat => {
            let lists = into_list(vals.remove(0));
            let total: usize = lists.iter().map(|l| match l {
                Value::List(items) => items.len(),
                _ => unreachable!("type checker guarantees a list of lists"),
            }).sum();
            state.check_len(total)?;
            state.charge(total)?;
            let mut out = Vec::with_capacity(total);
            for l in lists {
                out.extend(into_list(l));
            }
            Ok(Value::List(out))
        }
        ToPair => {
            let fst = vals.remove(0);
            let snd = vals.remove(0);
            Ok(Value::pair(fst, snd))
        }
        Fst => match vals.remove(0) {
            Value::Pair(a, _) => Ok(*a),
            _ => unreachable!("type checker guarantees a pair"),
        },
        Snd => match vals.remove(0) {
            Value::Pair(_, b) => Ok(*b),
            _ => unreachable!("type checker guarantees a pair"),
        },
        EqChar => match (&vals[0], &vals[1]) {
            (Value::Char(a), Value::Char(b)) => Ok(Value::Bool(a == b)),
            _ => unreachable!("type checker guarantees characters"),
        },
        IsLetter => match &vals[0] {
            Value::Char(c) => Ok(Value::Bool(c.is_alphabetic())),
            _ => unreachable!("type checker guarantees a character"),
        },
        IsDigit => match &vals[0] {
            Value::Char(c) => Ok(Value::Bool(c.is_ascii_digit())),
            _ => unreachable!("type checker guarantees a character"),
        },
        IntToFloat => Ok(Value::Float(as_int(&vals[0]) as f32)),
        Floor => Ok(Value::Int(as_float(&vals[0]).floor() as i32)),
        GtInt => Ok(Value::Bool(as_int(&vals[0]) > as_int(&vals[1]))),
        LtInt => Ok(Value::Bool(as_int(&vals[0]) < as_int(&vals[1]))),
        EqInt => Ok(Value::Bool(as_int(&vals[0]) == as_int(&vals[1]))),
        Len => {
            let items = into_list(vals.remove(0));
            Ok(Value::Int(items.len() as i32))
        }
        Take => {
            let n = as_int(&vals[0]);
            let items = into_list(vals.remove(1));
            let keep = if n <= 0 { 0 } else { (n as usize).min(items.len()) };
            state.charge(keep)?;
            Ok(Value::List(items.into_iter().take(keep).collect()))
        }
        Range => {
            let (start, stop, step) =
                (as_int(&vals[0]) as i64, as_int(&vals[1]) as i64, as_int(&vals[2]) as i64);
            if step == 0 {
                return Err(RuntimeError::here(ErrorKind::ZeroStepRange));
            }
            let count = if step > 0 {
                if start > stop { 0 } else { (stop - start) / step + 1 }
            } else if start < stop {
                0
            } else {
                (start - stop) / (-step) + 1
            } as usize;
            state.check_len(count)?;
            state.charge(count)?;
            let mut out = Vec::with_capacity(count);
            let mut v = start;
            for _ in 0..count {
                out.push(Value::Int(v as i32));
                v += step;
            }
            Ok(Value::List(out))
        }
        SumInts => {
            let items = into_list(vals.remove(0));
            state.charge(items.len())?;
            Ok(Value::Int(items.iter().fold(0i32, |acc, v| acc.wrapping_add(as_int(v)))))
        }
        ProductInts => {
            let items = into_list(vals.remove(0));
            state.charge(items.len())?;
            Ok(Value::Int(items.iter().fold(1i32, |acc, v| acc.wrapping_mul(as_int(v)))))
        }
        SumFloats => {
            let items = into_list(vals.remove(0));
            state.charge(items.len())?;
            let mut acc = 0f32;
            for v in &items {
                acc += as_float(v);
                if !acc.is_finite() {
                    return Err(RuntimeError::here(ErrorKind::NonFiniteFloat));
                }
            }
            Ok(Value::Float(acc))
        }
        ProductFloats => {
            let items = into_list(vals.remove(0));
            state.charge(items.len())?;
            let mut acc = 1f32;
            for v in &items {
                acc *= as_float(v);
                if !acc.is_finite() {
                    return Err(RuntimeError::here(ErrorKind::NonFiniteFloat));
                }
            }
            Ok(Value::Float(acc))
        }
        Unlines => {
            let lines = into_list(vals.remove(0));
            let total: usize = lines
                .iter()
                .map(|l| match l {
                    Value::List(cs) => cs.len() + 1,
                    _ => unreachable!("type checker guarantees strings"),
                })
                .sum();
            state.check_len(total)?;
            state.charge(total)?;
            let mut out = Vec::with_capacity(total);
            for line in lines {
                out.extend(into_list(line));
                out.push(Value::Char('\n'));
            }
            Ok(Value::List(out))
        }
        ShowInt => {
            let rendered = as_int(&vals[0]).to_string();
            state.charge(rendered.len())?;
            Ok(Value::string(&rendered))
        }
        Zip => {
            let a = into_list(vals.remove(0));
            let b = into_list(vals.remove(0));
            let n = a.len().min(b.len());
            state.charge(n)?;
            Ok(Value::List(
                a.into_iter().zip(b).take(n).map(|(x, y)| Value::pair(x, y)).collect(),
            ))
        }
        Map => {
            let f = vals.remove(0);
            let items = into_list(vals.remove(0));
            state.charge(items.len())?;
            let mut out = Vec::with_capacity(items.len());
            for item in items {
                out.push(apply_closure(&f, item, state)?);
            }
            Ok(Value::List(out))
        }
        Filter => {
            let f = vals.remove(0);
            let items = into_list(vals.remove(0));
            state.charge(items.len())?;
            let mut out = Vec::new();
            for item in items {
                let keep = apply_closure(&f, item.clone(), state)?;
                if as_bool(&keep) {
                    out.push(item);
                }
            }
            Ok(Value::List(out))
        }
    }
}
