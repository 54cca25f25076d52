//! Runtime values.

use std::fmt;

use crate::tree::Tree;
use crate::types::Type;

/// A runtime value. Lists are homogeneous; closures only arise from
/// evaluating lambda nodes and never appear in datasets or constants.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i32),
    Float(f32),
    Bool(bool),
    Char(char),
    List(Vec<Value>),
    Pair(Box<Value>, Box<Value>),
    Closure { param: Type, body: Box<Tree> },
}

impl Value {
    pub fn pair(fst: Value, snd: Value) -> Value {
        Value::Pair(Box::new(fst), Box::new(snd))
    }

    /// Builds the `[Char]` representation of a string.
    pub fn string(s: &str) -> Value {
        Value::List(s.chars().map(Value::Char).collect())
    }

    /// Renders a `[Char]` value back into a string, if it is one.
    pub fn as_string(&self) -> Option<String> {
        match self {
            Value::List(items) => items
                .iter()
                .map(|v| match v {
                    Value::Char(c) => Some(*c),
                    _ => None,
                })
                .collect(),
            _ => None,
        }
    }

    /// True when the value inhabits `ty`. Empty lists conform to every list
    /// type; element types are checked when present.
    pub fn conforms(&self, ty: &Type) -> bool {
        match (self, ty) {
            (Value::Int(_), Type::Int) => true,
            (Value::Float(_), Type::Float) => true,
            (Value::Bool(_), Type::Bool) => true,
            (Value::Char(_), Type::Char) => true,
            (Value::List(items), Type::List(elem)) => items.iter().all(|v| v.conforms(elem)),
            (Value::Pair(a, b), Type::Pair(ta, tb)) => a.conforms(ta) && b.conforms(tb),
            (Value::Closure { param, body: _ }, Type::Fun(arg, _)) => param == arg.as_ref(),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Char(c) => write!(f, "{c:?}"),
            Value::List(items) => {
                if let Some(s) = self.as_string() {
                    return write!(f, "{s:?}");
                }
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
            Value::Closure { param, .. } => write!(f, "<closure on {param}>"),
        }
    }
}
