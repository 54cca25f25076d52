//! Pretty-printing trees as compilable functional source.
//!
//! Arguments are named `x0, x1, ...`; arithmetic, comparison, and boolean
//! symbols render as infix operators; lambdas as `\y -> ...` (a nested
//! lambda, always the identity, uses `z`). `Range` renders as a plain
//! `range` application.

use crate::grammar::Func;
use crate::tree::Tree;
use crate::types::Type;
use crate::value::Value;

enum Surface {
    /// name, minimum precedence to stay bare (10 = application)
    Prefix(&'static str),
    /// operator, precedence, left/right child contexts
    Infix(&'static str, u8, u8, u8),
    IfThenElse,
    Tuple,
}

fn surface(f: Func) -> Surface {
    use Surface::*;
    match f {
        Func::AddInt | Func::AddFloat => Infix("+", 6, 6, 7),
        Func::SubInt | Func::SubFloat => Infix("-", 6, 6, 7),
        Func::MultInt | Func::MultFloat => Infix("*", 7, 7, 8),
        Func::DivFloat => Infix("/", 7, 7, 8),
        Func::DivInt => Prefix("div"),
        Func::ModInt => Prefix("mod"),
        Func::MaxInt => Prefix("max"),
        Func::MinInt => Prefix("min"),
        Func::GtInt => Infix(">", 4, 5, 5),
        Func::LtInt => Infix("<", 4, 5, 5),
        Func::EqInt | Func::EqChar => Infix("==", 4, 5, 5),
        Func::And => Infix("&&", 3, 4, 3),
        Func::Or => Infix("||", 2, 3, 2),
        Func::Not => Prefix("not"),
        Func::If => IfThenElse,
        Func::Sqrt => Prefix("sqrt"),
        Func::Singleton => Prefix("singleton"),
        Func::Cons => Infix(":", 5, 6, 5),
        Func::Head => Prefix("head"),
        Func::Reverse => Prefix("reverse"),
        Func::Concat => Prefix("concat"),
        Func::ToPair => Tuple,
        Func::Fst => Prefix("fst"),
        Func::Snd => Prefix("snd"),
        Func::IsLetter => Prefix("isLetter"),
        Func::IsDigit => Prefix("isDigit"),
        Func::IntToFloat => Prefix("fromIntegral"),
        Func::Floor => Prefix("floor"),
        Func::Len => Prefix("length"),
        Func::Take => Prefix("take"),
        Func::Range => Prefix("range"),
        Func::SumInts | Func::SumFloats => Prefix("sum"),
        Func::ProductInts | Func::ProductFloats => Prefix("product"),
        Func::Unlines => Prefix("unlines"),
        Func::ShowInt => Prefix("show"),
        Func::Zip => Prefix("zip"),
        Func::Map => Prefix("map"),
        Func::Filter => Prefix("filter"),
    }
}

fn escape(c: char, quote: char) -> String {
    match c {
        '\n' => "\\n".into(),
        '\t' => "\\t".into(),
        '\r' => "\\r".into(),
        '\\' => "\\\\".into(),
        c if c == quote => format!("\\{c}"),
        c => c.to_string(),
    }
}

fn render_value(v: &Value, ty: &Type) -> String {
    match (v, ty) {
        (Value::Int(i), _) => i.to_string(),
        (Value::Float(x), _) => format!("{x:?}"),
        (Value::Bool(b), _) => if *b { "True" } else { "False" }.into(),
        (Value::Char(c), _) => format!("'{}'", escape(*c, '\'')),
        (Value::List(_), Type::List(e)) if **e == Type::Char => {
            let s = v.as_string().expect("annotation says [Char]");
            let body: String = s.chars().map(|c| escape(c, '"')).collect();
            format!("\"{body}\"")
        }
        (Value::List(items), Type::List(e)) => {
            let body: Vec<String> = items.iter().map(|i| render_value(i, e)).collect();
            format!("[{}]", body.join(", "))
        }
        (Value::Pair(a, b), Type::Pair(ta, tb)) => {
            format!("({}, {})", render_value(a, ta), render_value(b, tb))
        }
        _ => unreachable!("constant values conform to their annotations"),
    }
}

fn wrap(s: String, own: u8, ctx: u8) -> String {
    if own < ctx {
        format!("({s})")
    } else {
        s
    }
}

/// `lambda_depth` tracks lambda nesting for parameter naming: 0 outside, the
/// innermost parameter is `y` then `z`.
fn param_name(lambda_depth: usize) -> &'static str {
    if lambda_depth <= 1 {
        "y"
    } else {
        "z"
    }
}

fn render_expr(tree: &Tree, ctx: u8, lambda_depth: usize) -> String {
    match tree {
        Tree::Arg(i, _) => format!("x{i}"),
        Tree::Param(_) => param_name(lambda_depth).into(),
        Tree::Const(v, ty) => {
            let s = render_value(v, ty);
            // negative literals need parens anywhere an operand would
            if s.starts_with('-') {
                wrap(s, 0, ctx)
            } else {
                s
            }
        }
        Tree::Lambda { body, .. } => {
            let inner = lambda_depth + 1;
            let s = format!(
                "\\{} -> {}",
                param_name(inner),
                render_expr(body, 0, inner)
            );
            wrap(s, 0, ctx)
        }
        Tree::Apply(sig, children) => match surface(sig.func) {
            Surface::Prefix(name) => {
                let mut s = String::from(name);
                for c in children {
                    s.push(' ');
                    s.push_str(&render_expr(c, 11, lambda_depth));
                }
                if children.is_empty() {
                    s
                } else {
                    wrap(s, 10, ctx)
                }
            }
            Surface::Infix(op, prec, lctx, rctx) => {
                let s = format!(
                    "{} {op} {}",
                    render_expr(&children[0], lctx, lambda_depth),
                    render_expr(&children[1], rctx, lambda_depth)
                );
                wrap(s, prec, ctx)
            }
            Surface::IfThenElse => {
                let s = format!(
                    "if {} then {} else {}",
                    render_expr(&children[0], 0, lambda_depth),
                    render_expr(&children[1], 0, lambda_depth),
                    render_expr(&children[2], 0, lambda_depth)
                );
                wrap(s, 0, ctx)
            }
            Surface::Tuple => format!(
                "({}, {})",
                render_expr(&children[0], 0, lambda_depth),
                render_expr(&children[1], 0, lambda_depth)
            ),
        },
    }
}

/// Renders a tree as a self-contained `solution` definition over `n_args`
/// arguments.
pub fn render_source(tree: &Tree, n_args: usize) -> String {
    let mut header = String::from("solution");
    for i in 0..n_args {
        header.push_str(&format!(" x{i}"));
    }
    format!("{header} = {}", render_expr(tree, 0, 0))
}

/// The bare expression, without the definition header.
pub fn render_expression(tree: &Tree) -> String {
    render_expr(tree, 0, 0)
}
