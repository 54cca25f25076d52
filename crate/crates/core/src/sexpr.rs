//! Canonical s-expression serialization of trees.
//!
//! The format used by golden tests, solution artifacts, and the rules file:
//!
//! ```text
//! (MinInt (MaxInt (MinInt x2 x1) x0) (MaxInt x1 x2))
//! (Map (lambda Int (AddInt param 3)) x0)
//! (Cons -96 (typed (List Int) []))
//! ```
//!
//! Applications use catalog names; `x<i>` are program arguments, `param` is
//! the enclosing lambda's parameter. Constants are literals (`5`, `2.5`,
//! `true`, `'a'`, `"ab"`, `[1 2]`, `(pair 1 'x')`), wrapped in
//! `(typed <type> <literal>)` when the type is not inferable (empty lists).
//! Parsing re-infers every signature from child types, so a parsed tree is
//! well-typed by construction or fails loudly.

use thiserror::Error;

use crate::grammar::{infer_sig, Func};
use crate::tree::Tree;
use crate::types::Type;
use crate::value::Value;

#[derive(Debug, Error, PartialEq)]
pub enum SexprError {
    #[error("unexpected end of input")]
    Eof,
    #[error("unexpected token `{0}`")]
    Unexpected(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("argument x{0} is out of range")]
    ArgOutOfRange(usize),
    #[error("`param` used outside a lambda")]
    ParamOutsideLambda,
    #[error("cannot resolve `{0}` for child types {1:?}")]
    NoInstantiation(String, Vec<Type>),
    #[error("literal does not determine a type; use (typed <type> <literal>)")]
    AmbiguousLiteral,
    #[error("literal does not inhabit annotation {0}")]
    LiteralMismatch(Type),
    #[error("trailing input after expression")]
    Trailing,
}

// ---------------------------------------------------------------------------
// Tokenizer / reader
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Sexpr {
    Atom(String),
    Str(String),
    Chr(char),
    List(Vec<Sexpr>),
    Bracket(Vec<Sexpr>),
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl<'a> Reader<'a> {
    fn new(input: &'a str) -> Self {
        Reader { chars: input.chars().peekable() }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn read(&mut self) -> Result<Sexpr, SexprError> {
        self.skip_ws();
        match self.chars.peek().copied() {
            None => Err(SexprError::Eof),
            Some('(') => self.read_seq(')').map(Sexpr::List),
            Some('[') => self.read_seq(']').map(Sexpr::Bracket),
            Some(')') | Some(']') => Err(SexprError::Unexpected(
                self.chars.next().unwrap().to_string(),
            )),
            Some('"') => self.read_string(),
            Some('\'') => self.read_char(),
            Some(_) => self.read_atom(),
        }
    }

    fn read_seq(&mut self, close: char) -> Result<Vec<Sexpr>, SexprError> {
        self.chars.next(); // opening bracket
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.chars.peek() {
                None => return Err(SexprError::Eof),
                Some(&c) if c == close => {
                    self.chars.next();
                    return Ok(items);
                }
                Some(_) => items.push(self.read()?),
            }
        }
    }

    fn read_escape(&mut self) -> Result<char, SexprError> {
        match self.chars.next() {
            None => Err(SexprError::Eof),
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('r') => Ok('\r'),
            Some('0') => Ok('\0'),
            Some(c @ ('\\' | '\'' | '"')) => Ok(c),
            Some(c) => Err(SexprError::Unexpected(format!("\\{c}"))),
        }
    }

    fn read_string(&mut self) -> Result<Sexpr, SexprError> {
        self.chars.next(); // opening quote
        let mut s = String::new();
        loop {
            match self.chars.next() {
                None => return Err(SexprError::Eof),
                Some('"') => return Ok(Sexpr::Str(s)),
                Some('\\') => s.push(self.read_escape()?),
                Some(c) => s.push(c),
            }
        }
    }

    fn read_char(&mut self) -> Result<Sexpr, SexprError> {
        self.chars.next(); // opening quote
        let c = match self.chars.next() {
            None => return Err(SexprError::Eof),
            Some('\\') => self.read_escape()?,
            Some(c) => c,
        };
        match self.chars.next() {
            Some('\'') => Ok(Sexpr::Chr(c)),
            other => Err(SexprError::Unexpected(format!("{other:?}"))),
        }
    }

    fn read_atom(&mut self) -> Result<Sexpr, SexprError> {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | '[' | ']' | '"' | '\'') {
                break;
            }
            s.push(c);
            self.chars.next();
        }
        if s.is_empty() {
            Err(SexprError::Eof)
        } else {
            Ok(Sexpr::Atom(s))
        }
    }
}

pub(crate) fn read_all(input: &str) -> Result<Sexpr, SexprError> {
    let mut reader = Reader::new(input);
    let expr = reader.read()?;
    reader.skip_ws();
    if reader.chars.peek().is_some() {
        return Err(SexprError::Trailing);
    }
    Ok(expr)
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn escape_char(c: char, quote: char) -> String {
    match c {
        '\n' => "\\n".into(),
        '\t' => "\\t".into(),
        '\r' => "\\r".into(),
        '\0' => "\\0".into(),
        '\\' => "\\\\".into(),
        c if c == quote => format!("\\{c}"),
        c => c.to_string(),
    }
}

pub fn render_type(t: &Type) -> String {
    match t {
        Type::Int => "Int".into(),
        Type::Float => "Float".into(),
        Type::Bool => "Bool".into(),
        Type::Char => "Char".into(),
        Type::List(e) => format!("(List {})", render_type(e)),
        Type::Pair(a, b) => format!("(Pair {} {})", render_type(a), render_type(b)),
        Type::Fun(a, r) => format!("(Fun {} {})", render_type(a), render_type(r)),
        Type::Var(v) => (*v).into(),
    }
}

/// Renders a value literal following its type annotation. `[Char]` lists use
/// string syntax so their element type survives even when empty.
fn render_value(v: &Value, ty: &Type) -> String {
    match (v, ty) {
        (Value::Int(i), _) => i.to_string(),
        (Value::Float(x), _) => format!("{x:?}"),
        (Value::Bool(b), _) => b.to_string(),
        (Value::Char(c), _) => format!("'{}'", escape_char(*c, '\'')),
        (Value::List(_), Type::List(e)) if **e == Type::Char => {
            let s = v.as_string().expect("annotation says [Char]");
            let body: String = s.chars().map(|c| escape_char(c, '"')).collect();
            format!("\"{body}\"")
        }
        (Value::List(items), Type::List(e)) => {
            let body: Vec<String> = items.iter().map(|i| render_value(i, e)).collect();
            format!("[{}]", body.join(" "))
        }
        (Value::Pair(a, b), Type::Pair(ta, tb)) => {
            format!("(pair {} {})", render_value(a, ta), render_value(b, tb))
        }
        _ => unreachable!("constant values conform to their annotations"),
    }
}

/// True when the literal alone pins down the value's type (no bare empty
/// lists outside string syntax).
fn literal_unambiguous(v: &Value, ty: &Type) -> bool {
    match (v, ty) {
        (Value::List(_), Type::List(e)) if **e == Type::Char => true,
        (Value::List(items), Type::List(e)) => {
            !items.is_empty() && items.iter().all(|i| literal_unambiguous(i, e))
        }
        (Value::Pair(a, b), Type::Pair(ta, tb)) => {
            literal_unambiguous(a, ta) && literal_unambiguous(b, tb)
        }
        _ => true,
    }
}

pub fn render_tree(tree: &Tree) -> String {
    match tree {
        Tree::Arg(i, _) => format!("x{i}"),
        Tree::Param(_) => "param".into(),
        Tree::Const(v, ty) => {
            if literal_unambiguous(v, ty) {
                render_value(v, ty)
            } else {
                format!("(typed {} {})", render_type(ty), render_value(v, ty))
            }
        }
        Tree::Lambda { param, body, .. } => {
            format!("(lambda {} {})", render_type(param), render_tree(body))
        }
        Tree::Apply(sig, children) => {
            let mut out = format!("({}", sig.func.name());
            for c in children {
                out.push(' ');
                out.push_str(&render_tree(c));
            }
            out.push(')');
            out
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

fn parse_type(expr: &Sexpr) -> Result<Type, SexprError> {
    match expr {
        Sexpr::Atom(a) => match a.as_str() {
            "Int" => Ok(Type::Int),
            "Float" => Ok(Type::Float),
            "Bool" => Ok(Type::Bool),
            "Char" => Ok(Type::Char),
            other => Err(SexprError::UnknownSymbol(other.into())),
        },
        Sexpr::List(items) => match items.as_slice() {
            [Sexpr::Atom(head), e] if head == "List" => Ok(Type::list(parse_type(e)?)),
            [Sexpr::Atom(head), a, b] if head == "Pair" => {
                Ok(Type::pair(parse_type(a)?, parse_type(b)?))
            }
            [Sexpr::Atom(head), a, r] if head == "Fun" => {
                Ok(Type::fun(parse_type(a)?, parse_type(r)?))
            }
            _ => Err(SexprError::Unexpected("malformed type".into())),
        },
        _ => Err(SexprError::Unexpected("malformed type".into())),
    }
}

/// Parses a value literal. With an expected type it validates against it;
/// without one it infers the type from the literal's structure.
fn parse_value(expr: &Sexpr, expected: Option<&Type>) -> Result<(Value, Type), SexprError> {
    let mismatch = || SexprError::LiteralMismatch(expected.cloned().unwrap_or(Type::Int));
    match expr {
        Sexpr::Atom(a) => {
            let (v, t) = if a == "true" {
                (Value::Bool(true), Type::Bool)
            } else if a == "false" {
                (Value::Bool(false), Type::Bool)
            } else if let Ok(i) = a.parse::<i32>() {
                (Value::Int(i), Type::Int)
            } else if let Ok(x) = a.parse::<f32>() {
                (Value::Float(x), Type::Float)
            } else {
                return Err(SexprError::UnknownSymbol(a.clone()));
            };
            // an integer-looking token conforms to an expected Float
            if let (Value::Int(i), Some(Type::Float)) = (&v, expected) {
                return Ok((Value::Float(*i as f32), Type::Float));
            }
            match expected {
                Some(t2) if t2 != &t => Err(mismatch()),
                _ => Ok((v, t)),
            }
        }
        Sexpr::Chr(c) => match expected {
            Some(Type::Char) | None => Ok((Value::Char(*c), Type::Char)),
            Some(_) => Err(mismatch()),
        },
        Sexpr::Str(s) => match expected {
            Some(t @ Type::List(e)) if **e == Type::Char => Ok((Value::string(s), t.clone())),
            None => Ok((Value::string(s), Type::string())),
            Some(_) => Err(mismatch()),
        },
        Sexpr::Bracket(items) => {
            let elem_expected = match expected {
                Some(Type::List(e)) => Some(e.as_ref().clone()),
                Some(_) => return Err(mismatch()),
                None => None,
            };
            let mut elems = Vec::with_capacity(items.len());
            let mut elem_ty = elem_expected;
            for item in items {
                let (v, t) = parse_value(item, elem_ty.as_ref())?;
                elem_ty.get_or_insert(t);
                elems.push(v);
            }
            match elem_ty {
                Some(t) => Ok((Value::List(elems), Type::list(t))),
                None => Err(SexprError::AmbiguousLiteral),
            }
        }
        Sexpr::List(items) => match items.as_slice() {
            [Sexpr::Atom(head), a, b] if head == "pair" => {
                let (ea, eb) = match expected {
                    Some(Type::Pair(x, y)) => (Some(x.as_ref().clone()), Some(y.as_ref().clone())),
                    Some(_) => return Err(mismatch()),
                    None => (None, None),
                };
                let (va, ta) = parse_value(a, ea.as_ref())?;
                let (vb, tb) = parse_value(b, eb.as_ref())?;
                Ok((Value::pair(va, vb), Type::pair(ta, tb)))
            }
            _ => Err(SexprError::Unexpected("malformed value literal".into())),
        },
    }
}

fn parse_node(
    expr: &Sexpr,
    arg_types: &[Type],
    lambda_param: Option<&Type>,
) -> Result<Tree, SexprError> {
    match expr {
        Sexpr::Atom(a) if a == "param" => match lambda_param {
            Some(t) => Ok(Tree::Param(t.clone())),
            None => Err(SexprError::ParamOutsideLambda),
        },
        Sexpr::Atom(a) if a.starts_with('x') && a[1..].chars().all(|c| c.is_ascii_digit()) && a.len() > 1 => {
            let i: usize = a[1..].parse().map_err(|_| SexprError::UnknownSymbol(a.clone()))?;
            match arg_types.get(i) {
                Some(t) => Ok(Tree::Arg(i, t.clone())),
                None => Err(SexprError::ArgOutOfRange(i)),
            }
        }
        Sexpr::Atom(_) | Sexpr::Str(_) | Sexpr::Chr(_) | Sexpr::Bracket(_) => {
            let (v, t) = parse_value(expr, None)?;
            Ok(Tree::Const(v, t))
        }
        Sexpr::List(items) => {
            let head = match items.first() {
                Some(Sexpr::Atom(h)) => h.clone(),
                _ => return Err(SexprError::Unexpected("empty application".into())),
            };
            match head.as_str() {
                "typed" => {
                    if items.len() != 3 {
                        return Err(SexprError::Unexpected("typed needs a type and a literal".into()));
                    }
                    let ty = parse_type(&items[1])?;
                    let (v, t) = parse_value(&items[2], Some(&ty))?;
                    Ok(Tree::Const(v, t))
                }
                "pair" => {
                    let (v, t) = parse_value(expr, None)?;
                    Ok(Tree::Const(v, t))
                }
                "lambda" => {
                    if items.len() != 3 {
                        return Err(SexprError::Unexpected("lambda needs a type and a body".into()));
                    }
                    let param = parse_type(&items[1])?;
                    let body = parse_node(&items[2], arg_types, Some(&param))?;
                    let ret = body.output_type();
                    Ok(Tree::lambda(param, ret, body))
                }
                name => {
                    let func = Func::from_name(name)
                        .ok_or_else(|| SexprError::UnknownSymbol(name.into()))?;
                    let children: Vec<Tree> = items[1..]
                        .iter()
                        .map(|c| parse_node(c, arg_types, lambda_param))
                        .collect::<Result<_, _>>()?;
                    let child_types: Vec<Type> =
                        children.iter().map(|c| c.output_type()).collect();
                    let sig = infer_sig(func, &child_types)
                        .ok_or_else(|| SexprError::NoInstantiation(name.into(), child_types))?;
                    Ok(Tree::Apply(sig, children))
                }
            }
        }
    }
}

/// Parses the canonical s-expression form. `arg_types` supplies the types of
/// `x0..xn`; everything else is inferred bottom-up.
pub fn parse_tree(input: &str, arg_types: &[Type]) -> Result<Tree, SexprError> {
    let expr = read_all(input)?;
    parse_node(&expr, arg_types, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::type_of;

    #[test]
    fn median_form_round_trips() {
        let text = "(MinInt (MaxInt (MinInt x2 x1) x0) (MaxInt x1 x2))";
        let args = vec![Type::Int, Type::Int, Type::Int];
        let tree = parse_tree(text, &args).unwrap();
        assert_eq!(type_of(&tree), Ok(Type::Int));
        assert_eq!(render_tree(&tree), text);
    }

    #[test]
    fn lambda_and_literals_round_trip() {
        let args = vec![Type::list(Type::Int)];
        let text = "(Map (lambda Int (AddInt param -3)) x0)";
        let tree = parse_tree(text, &args).unwrap();
        assert_eq!(type_of(&tree), Ok(Type::list(Type::Int)));
        assert_eq!(render_tree(&tree), text);
    }

    #[test]
    fn ambiguous_empty_list_needs_annotation() {
        let args = vec![];
        assert_eq!(parse_tree("[]", &args), Err(SexprError::AmbiguousLiteral));
        let tree = parse_tree("(typed (List Int) [])", &args).unwrap();
        assert_eq!(type_of(&tree), Ok(Type::list(Type::Int)));
        assert_eq!(render_tree(&tree), "(typed (List Int) [])");
    }

    #[test]
    fn strings_survive_even_when_empty() {
        let tree = parse_tree("(Unlines (Cons \"ab\" (Singleton \"\")))", &[]).unwrap();
        assert_eq!(type_of(&tree), Ok(Type::string()));
        let text = render_tree(&tree);
        assert_eq!(parse_tree(&text, &[]).unwrap(), tree);
    }

    #[test]
    fn escapes_and_pairs() {
        let text = "(Fst (pair '\\n' [1 2]))";
        let tree = parse_tree(text, &[]).unwrap();
        assert_eq!(type_of(&tree), Ok(Type::Char));
        assert_eq!(render_tree(&tree), text);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(parse_tree("(AddInt 1 true)", &[]).is_err());
        assert!(parse_tree("(Bogus 1)", &[]).is_err());
        assert!(parse_tree("x0", &[]).is_err());
        assert!(parse_tree("param", &[]).is_err());
        assert!(parse_tree("(AddInt 1 2) junk", &[]).is_err());
    }

    #[test]
    fn float_literals() {
        let tree = parse_tree("(AddFloat 1.5 -2.25)", &[]).unwrap();
        assert_eq!(render_tree(&tree), "(AddFloat 1.5 -2.25)");
        // integer-looking literal in a float slot stays an Int constant and
        // fails inference, so it must be written with a decimal point
        assert!(parse_tree("(AddFloat 1 2.0)", &[]).is_err());
    }
}
