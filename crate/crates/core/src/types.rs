//! Object-language types.

use std::fmt;

/// A type of the object language. `Var` only occurs in the polymorphic
/// signatures of the function catalog; trees and universes are fully
/// concrete.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Int,
    Float,
    Bool,
    Char,
    List(Box<Type>),
    Pair(Box<Type>, Box<Type>),
    Fun(Box<Type>, Box<Type>),
    Var(&'static str),
}

impl Type {
    pub fn list(elem: Type) -> Type {
        Type::List(Box::new(elem))
    }

    pub fn pair(fst: Type, snd: Type) -> Type {
        Type::Pair(Box::new(fst), Box::new(snd))
    }

    pub fn fun(arg: Type, ret: Type) -> Type {
        Type::Fun(Box::new(arg), Box::new(ret))
    }

    /// `[Char]`, the representation of strings.
    pub fn string() -> Type {
        Type::list(Type::Char)
    }

    pub fn is_fun(&self) -> bool {
        matches!(self, Type::Fun(_, _))
    }

    pub fn is_concrete(&self) -> bool {
        match self {
            Type::Int | Type::Float | Type::Bool | Type::Char => true,
            Type::List(t) => t.is_concrete(),
            Type::Pair(a, b) => a.is_concrete() && b.is_concrete(),
            Type::Fun(a, r) => a.is_concrete() && r.is_concrete(),
            Type::Var(_) => false,
        }
    }

    /// Component types of a parametric type, e.g. `[Int]` has component `Int`.
    pub fn components(&self) -> Vec<&Type> {
        match self {
            Type::List(t) => vec![t],
            Type::Pair(a, b) => vec![a, b],
            Type::Fun(a, r) => vec![a, r],
            _ => vec![],
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => write!(f, "Int"),
            Type::Float => write!(f, "Float"),
            Type::Bool => write!(f, "Bool"),
            Type::Char => write!(f, "Char"),
            Type::List(t) => write!(f, "[{t}]"),
            Type::Pair(a, b) => write!(f, "({a}, {b})"),
            Type::Fun(a, r) => match a.as_ref() {
                Type::Fun(_, _) => write!(f, "({a}) -> {r}"),
                _ => write!(f, "{a} -> {r}"),
            },
            Type::Var(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(Type::list(Type::Int).to_string(), "[Int]");
        assert_eq!(Type::pair(Type::Int, Type::Bool).to_string(), "(Int, Bool)");
        assert_eq!(Type::fun(Type::Int, Type::Bool).to_string(), "Int -> Bool");
        assert_eq!(
            Type::fun(Type::fun(Type::Int, Type::Int), Type::Bool).to_string(),
            "(Int -> Int) -> Bool"
        );
        assert_eq!(Type::string().to_string(), "[Char]");
    }

    #[test]
    fn concreteness() {
        assert!(Type::list(Type::Char).is_concrete());
        assert!(!Type::list(Type::Var("a")).is_concrete());
    }
}
