//! The function catalog, type universes, and monomorphization.
//!
//! Every nonterminal the engine can use is listed in [`Func`]. Signatures may
//! contain the type variables `a` and `b`; [`monomorphize`] instantiates them
//! over a problem's [`TypeUniverse`] to obtain the concrete signature set a
//! run works with.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::types::Type;

/// Catalog of supported functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    AddInt,
    SubInt,
    MultInt,
    DivInt,
    ModInt,
    MaxInt,
    MinInt,
    Not,
    And,
    Or,
    If,
    Sqrt,
    AddFloat,
    SubFloat,
    MultFloat,
    DivFloat,
    Singleton,
    Cons,
    Head,
    Reverse,
    Concat,
    ToPair,
    Fst,
    Snd,
    EqChar,
    IsLetter,
    IsDigit,
    IntToFloat,
    Floor,
    GtInt,
    LtInt,
    EqInt,
    Len,
    Take,
    Range,
    SumInts,
    ProductInts,
    SumFloats,
    ProductFloats,
    Unlines,
    ShowInt,
    Zip,
    Map,
    Filter,
}

const VAR_A: Type = Type::Var("a");
const VAR_B: Type = Type::Var("b");

impl Func {
    pub const ALL: [Func; 44] = [
        Func::AddInt,
        Func::SubInt,
        Func::MultInt,
        Func::DivInt,
        Func::ModInt,
        Func::MaxInt,
        Func::MinInt,
        Func::Not,
        Func::And,
        Func::Or,
        Func::If,
        Func::Sqrt,
        Func::AddFloat,
        Func::SubFloat,
        Func::MultFloat,
        Func::DivFloat,
        Func::Singleton,
        Func::Cons,
        Func::Head,
        Func::Reverse,
        Func::Concat,
        Func::ToPair,
        Func::Fst,
        Func::Snd,
        Func::EqChar,
        Func::IsLetter,
        Func::IsDigit,
        Func::IntToFloat,
        Func::Floor,
        Func::GtInt,
        Func::LtInt,
        Func::EqInt,
        Func::Len,
        Func::Take,
        Func::Range,
        Func::SumInts,
        Func::ProductInts,
        Func::SumFloats,
        Func::ProductFloats,
        Func::Unlines,
        Func::ShowInt,
        Func::Zip,
        Func::Map,
        Func::Filter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::AddInt => "AddInt",
            Func::SubInt => "SubInt",
            Func::MultInt => "MultInt",
            Func::DivInt => "DivInt",
            Func::ModInt => "ModInt",
            Func::MaxInt => "MaxInt",
            Func::MinInt => "MinInt",
            Func::Not => "Not",
            Func::And => "And",
            Func::Or => "Or",
            Func::If => "If",
            Func::Sqrt => "Sqrt",
            Func::AddFloat => "AddFloat",
            Func::SubFloat => "SubFloat",
            Func::MultFloat => "MultFloat",
            Func::DivFloat => "DivFloat",
            Func::Singleton => "Singleton",
            Func::Cons => "Cons",
            Func::Head => "Head",
            Func::Reverse => "Reverse",
            Func::Concat => "Concat",
            Func::ToPair => "ToPair",
            Func::Fst => "Fst",
            Func::Snd => "Snd",
            Func::EqChar => "EqChar",
            Func::IsLetter => "IsLetter",
            Func::IsDigit => "IsDigit",
            Func::IntToFloat => "IntToFloat",
            Func::Floor => "Floor",
            Func::GtInt => "GtInt",
            Func::LtInt => "LtInt",
            Func::EqInt => "EqInt",
            Func::Len => "Len",
            Func::Take => "Take",
            Func::Range => "Range",
            Func::SumInts => "SumInts",
            Func::ProductInts => "ProductInts",
            Func::SumFloats => "SumFloats",
            Func::ProductFloats => "ProductFloats",
            Func::Unlines => "Unlines",
            Func::ShowInt => "ShowInt",
            Func::Zip => "Zip",
            Func::Map => "Map",
            Func::Filter => "Filter",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// Parameter and output types, possibly containing `Var("a")`/`Var("b")`.
    pub fn signature(self) -> (Vec<Type>, Type) {
        use Type::{Bool, Char, Float, Int};
        match self {
            Func::AddInt | Func::SubInt | Func::MultInt | Func::DivInt | Func::ModInt
            | Func::MaxInt | Func::MinInt => (vec![Int, Int], Int),
            Func::Not => (vec![Bool], Bool),
            Func::And | Func::Or => (vec![Bool, Bool], Bool),
            Func::If => (vec![Bool, VAR_A, VAR_A], VAR_A),
            Func::Sqrt => (vec![Float], Float),
            Func::AddFloat | Func::SubFloat | Func::MultFloat | Func::DivFloat => {
                (vec![Float, Float], Float)
            }
            Func::Singleton => (vec![VAR_A], Type::list(VAR_A)),
            Func::Cons => (vec![VAR_A, Type::list(VAR_A)], Type::list(VAR_A)),
            Func::Head => (vec![Type::list(VAR_A)], VAR_A),
            Func::Reverse => (vec![Type::list(VAR_A)], Type::list(VAR_A)),
            Func::Concat => (vec![Type::list(Type::list(VAR_A))], Type::list(VAR_A)),
            Func::ToPair => (vec![VAR_A, VAR_B], Type::pair(VAR_A, VAR_B)),
            Func::Fst => (vec![Type::pair(VAR_A, VAR_B)], VAR_A),
            Func::Snd => (vec![Type::pair(VAR_A, VAR_B)], VAR_B),
            Func::EqChar => (vec![Char, Char], Bool),
            Func::IsLetter | Func::IsDigit => (vec![Char], Bool),
            Func::IntToFloat => (vec![Int], Float),
            Func::Floor => (vec![Float], Int),
            Func::GtInt | Func::LtInt | Func::EqInt => (vec![Int, Int], Bool),
            Func::Len => (vec![Type::list(VAR_A)], Int),
            Func::Take => (vec![Int, Type::list(VAR_A)], Type::list(VAR_A)),
            Func::Range => (vec![Int, Int, Int], Type::list(Int)),
            Func::SumInts | Func::ProductInts => (vec![Type::list(Int)], Int),
            Func::SumFloats | Func::ProductFloats => (vec![Type::list(Float)], Float),
            Func::Unlines => (vec![Type::list(Type::string())], Type::string()),
            Func::ShowInt => (vec![Int], Type::string()),
            Func::Zip => (
                vec![Type::list(VAR_A), Type::list(VAR_B)],
                Type::list(Type::pair(VAR_A, VAR_B)),
            ),
            Func::Map => (
                vec![Type::fun(VAR_A, VAR_B), Type::list(VAR_A)],
                Type::list(VAR_B),
            ),
            Func::Filter => (
                vec![Type::fun(VAR_A, Type::Bool), Type::list(VAR_A)],
                Type::list(VAR_A),
            ),
        }
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully monomorphic function signature, as carried by `Tree::Apply` nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConcreteSig {
    pub func: Func,
    pub params: Vec<Type>,
    pub ret: Type,
}

impl ConcreteSig {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

impl fmt::Display for ConcreteSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :", self.func)?;
        for p in &self.params {
            match p {
                Type::Fun(_, _) => write!(f, " ({p}) ->")?,
                _ => write!(f, " {p} ->")?,
            }
        }
        write!(f, " {}", self.ret)
    }
}

#[derive(Debug, Error)]
pub enum UniverseError {
    #[error("universe is not closed under components: {0} requires {1}")]
    NotClosed(Type, Type),
    #[error("universe types must be concrete and first-order, got {0}")]
    BadMember(Type),
    #[error("{role} type {ty} is not a universe member")]
    MissingType { role: &'static str, ty: Type },
}

#[derive(Debug, Error)]
#[error("no function signature survives monomorphization over this universe")]
pub struct EmptyGrammar;

/// The finite set of concrete types a synthesis run may use, together with
/// the program's argument and output types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeUniverse {
    types: BTreeSet<Type>,
    args: Vec<Type>,
    output: Type,
}

impl TypeUniverse {
    /// Builds a universe, validating closure under components. Function types
    /// are never universe members; lambdas are handled by the generator.
    pub fn new(
        types: impl IntoIterator<Item = Type>,
        args: Vec<Type>,
        output: Type,
    ) -> Result<TypeUniverse, UniverseError> {
        let types: BTreeSet<Type> = types.into_iter().collect();
        for t in &types {
            if !t.is_concrete() || t.is_fun() {
                return Err(UniverseError::BadMember(t.clone()));
            }
            for c in t.components() {
                if !types.contains(c) {
                    return Err(UniverseError::NotClosed(t.clone(), c.clone()));
                }
            }
        }
        for a in &args {
            if !types.contains(a) {
                return Err(UniverseError::MissingType { role: "argument", ty: a.clone() });
            }
        }
        if !types.contains(&output) {
            return Err(UniverseError::MissingType { role: "output", ty: output });
        }
        Ok(TypeUniverse { types, args, output })
    }

    /// Convenience constructor that adds argument/output types and all
    /// component types automatically.
    pub fn closed(
        types: impl IntoIterator<Item = Type>,
        args: Vec<Type>,
        output: Type,
    ) -> TypeUniverse {
        let mut all: BTreeSet<Type> = types.into_iter().collect();
        all.extend(args.iter().cloned());
        all.insert(output.clone());
        let mut stack: Vec<Type> = all.iter().cloned().collect();
        while let Some(t) = stack.pop() {
            for c in t.components() {
                if all.insert(c.clone()) {
                    stack.push(c.clone());
                }
            }
        }
        TypeUniverse::new(all, args, output).expect("closure construction is valid")
    }

    pub fn types(&self) -> &BTreeSet<Type> {
        &self.types
    }

    pub fn contains(&self, t: &Type) -> bool {
        self.types.contains(t)
    }

    pub fn args(&self) -> &[Type] {
        &self.args
    }

    pub fn output(&self) -> &Type {
        &self.output
    }
}

/// The monomorphized set of concrete signatures available over a universe.
#[derive(Clone, Debug)]
pub struct GrammarInstance {
    sigs: Vec<ConcreteSig>,
    by_output: BTreeMap<Type, Vec<usize>>,
}

impl GrammarInstance {
    pub fn signatures(&self) -> &[ConcreteSig] {
        &self.sigs
    }

    pub fn with_output<'a>(&'a self, target: &Type) -> impl Iterator<Item = &'a ConcreteSig> {
        self.by_output
            .get(target)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|&i| &self.sigs[i])
    }

    /// One signature per line, deterministic order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for sig in &self.sigs {
            out.push_str(&sig.to_string());
            out.push('\n');
        }
        out
    }
}

fn sig_vars(params: &[Type], ret: &Type) -> Vec<&'static str> {
    fn walk(t: &Type, out: &mut Vec<&'static str>) {
        match t {
            Type::Var(v) => {
                if !out.contains(v) {
                    out.push(v);
                }
            }
            _ => t.components().into_iter().for_each(|c| walk(c, out)),
        }
    }
    let mut vars = Vec::new();
    for p in params {
        walk(p, &mut vars);
    }
    walk(ret, &mut vars);
    vars.sort_unstable();
    vars
}

fn substitute(t: &Type, binding: &BTreeMap<&'static str, Type>) -> Type {
    match t {
        Type::Var(v) => binding[v].clone(),
        Type::List(e) => Type::list(substitute(e, binding)),
        Type::Pair(a, b) => Type::pair(substitute(a, binding), substitute(b, binding)),
        Type::Fun(a, r) => Type::fun(substitute(a, binding), substitute(r, binding)),
        _ => t.clone(),
    }
}

/// One-way matching of a signature pattern against a concrete type.
fn match_type(
    pattern: &Type,
    target: &Type,
    binding: &mut BTreeMap<&'static str, Type>,
) -> bool {
    match (pattern, target) {
        (Type::Var(v), _) => match binding.get(v) {
            Some(bound) => bound == target,
            None => {
                binding.insert(v, target.clone());
                true
            }
        },
        (Type::List(p), Type::List(t)) => match_type(p, t, binding),
        (Type::Pair(pa, pb), Type::Pair(ta, tb)) => {
            match_type(pa, ta, binding) && match_type(pb, tb, binding)
        }
        (Type::Fun(pa, pr), Type::Fun(ta, tr)) => {
            match_type(pa, ta, binding) && match_type(pr, tr, binding)
        }
        _ => pattern == target,
    }
}

/// Resolves the concrete signature of `f` applied to children of the given
/// types. Every catalog variable occurs in a parameter position, so the
/// children always determine the instantiation.
pub fn infer_sig(f: Func, child_types: &[Type]) -> Option<ConcreteSig> {
    let (params, ret) = f.signature();
    if params.len() != child_types.len() {
        return None;
    }
    let mut binding = BTreeMap::new();
    for (p, c) in params.iter().zip(child_types) {
        if !match_type(p, c, &mut binding) {
            return None;
        }
    }
    Some(ConcreteSig {
        func: f,
        params: child_types.to_vec(),
        ret: substitute(&ret, &binding),
    })
}

/// A parameter is admissible when it is a universe member, or a function type
/// whose argument and result are universe members (the lambda slots of the
/// higher-order functions).
fn param_ok(t: &Type, universe: &TypeUniverse) -> bool {
    match t {
        Type::Fun(a, r) => universe.contains(a) && universe.contains(r),
        _ => universe.contains(t),
    }
}

fn instantiations(f: Func, universe: &TypeUniverse) -> Vec<ConcreteSig> {
    let (params, ret) = f.signature();
    let vars = sig_vars(&params, &ret);
    let mut out = Vec::new();
    let members: Vec<&Type> = universe.types().iter().collect();
    let mut counters = vec![0usize; vars.len()];
    loop {
        let binding: BTreeMap<&'static str, Type> = vars
            .iter()
            .zip(&counters)
            .map(|(v, &i)| (*v, members[i].clone()))
            .collect();
        let cand = ConcreteSig {
            func: f,
            params: params.iter().map(|p| substitute(p, &binding)).collect(),
            ret: substitute(&ret, &binding),
        };
        if universe.contains(&cand.ret) && cand.params.iter().all(|p| param_ok(p, universe)) {
            out.push(cand);
        }
        // advance the mixed-radix counter over variable bindings
        let mut i = 0;
        loop {
            if i == counters.len() {
                out.sort_by(|x, y| {
                    (x.func.name(), &x.params, &x.ret).cmp(&(y.func.name(), &y.params, &y.ret))
                });
                out.dedup();
                return out;
            }
            counters[i] += 1;
            if counters[i] < members.len() {
                break;
            }
            counters[i] = 0;
            i += 1;
        }
        if vars.is_empty() {
            // a var-free signature yields exactly one candidate
            out.sort_by(|x, y| {
                (x.func.name(), &x.params, &x.ret).cmp(&(y.func.name(), &y.params, &y.ret))
            });
            out.dedup();
            return out;
        }
    }
}

/// Instantiates every catalog signature over the universe, keeping those
/// whose parameter and output types all lie in it. Deterministic order: by
/// name, then parameter types, then output type.
pub fn monomorphize(
    catalog: &[Func],
    universe: &TypeUniverse,
) -> Result<GrammarInstance, EmptyGrammar> {
    let mut sigs: Vec<ConcreteSig> = catalog
        .iter()
        .flat_map(|&f| instantiations(f, universe))
        .collect();
    sigs.sort_by(|x, y| (x.func.name(), &x.params, &x.ret).cmp(&(y.func.name(), &y.params, &y.ret)));
    sigs.dedup();
    if sigs.is_empty() {
        return Err(EmptyGrammar);
    }
    let mut by_output: BTreeMap<Type, Vec<usize>> = BTreeMap::new();
    for (i, sig) in sigs.iter().enumerate() {
        by_output.entry(sig.ret.clone()).or_default().push(i);
    }
    Ok(GrammarInstance { sigs, by_output })
}

/// All monomorphized instances of `f` whose output type equals `target`;
/// variables not fixed by the output are enumerated over the universe.
pub fn unify_output(f: Func, target: &Type, universe: &TypeUniverse) -> Vec<ConcreteSig> {
    instantiations(f, universe)
        .into_iter()
        .filter(|sig| &sig.ret == target)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universe(types: Vec<Type>) -> TypeUniverse {
        let out = types[0].clone();
        TypeUniverse::new(types, vec![], out).unwrap()
    }

    #[test]
    fn int_bool_universe() {
        let u = universe(vec![Type::Int, Type::Bool]);
        let g = monomorphize(&Func::ALL, &u).unwrap();
        let names: Vec<&str> = g.signatures().iter().map(|s| s.func.name()).collect();
        assert!(names.contains(&"AddInt"));
        assert!(!names.contains(&"Head"));
        let ifs: Vec<_> = g.signatures().iter().filter(|s| s.func == Func::If).collect();
        assert_eq!(ifs.len(), 2);
        assert!(ifs.iter().any(|s| s.ret == Type::Int));
        assert!(ifs.iter().any(|s| s.ret == Type::Bool));
    }

    #[test]
    fn output_outside_universe_drops_signature() {
        let u = universe(vec![Type::Int]);
        let g = monomorphize(&Func::ALL, &u).unwrap();
        assert!(g.signatures().iter().all(|s| s.func != Func::GtInt));
        assert!(g.signatures().iter().any(|s| s.func == Func::AddInt));
    }

    #[test]
    fn string_universe_keeps_char_functions() {
        let u = universe(vec![Type::Char, Type::Bool, Type::string(), Type::Int]);
        let g = monomorphize(&Func::ALL, &u).unwrap();
        assert!(g.signatures().iter().any(|s| s.func == Func::EqChar));
        assert!(g.signatures().iter().any(|s| s.func == Func::IsLetter));
        assert!(g
            .signatures()
            .iter()
            .any(|s| s.func == Func::Len && s.params == vec![Type::string()]));
    }

    #[test]
    fn unify_output_fixes_variables() {
        let u = universe(vec![Type::Int, Type::Bool, Type::list(Type::Int)]);
        let heads = unify_output(Func::Head, &Type::Int, &u);
        assert_eq!(heads.len(), 1);
        assert_eq!(heads[0].params, vec![Type::list(Type::Int)]);

        let adds = unify_output(Func::AddInt, &Type::Bool, &u);
        assert!(adds.is_empty());

        // b is forced to Int; a is free but `[a]` must be a universe member,
        // leaving one instance per list type present
        let u2 = universe(vec![
            Type::Int,
            Type::Bool,
            Type::list(Type::Int),
            Type::list(Type::Bool),
        ]);
        let maps = unify_output(Func::Map, &Type::list(Type::Int), &u2);
        assert_eq!(maps.len(), 2);
        for m in &maps {
            assert_eq!(m.ret, Type::list(Type::Int));
            assert!(matches!(&m.params[0], Type::Fun(_, r) if **r == Type::Int));
        }
    }

    #[test]
    fn monomorphize_equals_union_of_unify_output() {
        let u = universe(vec![Type::Int, Type::Bool, Type::list(Type::Int)]);
        let g = monomorphize(&Func::ALL, &u).unwrap();
        let mut from_unify: Vec<ConcreteSig> = u
            .types()
            .iter()
            .flat_map(|t| Func::ALL.iter().flat_map(|&f| unify_output(f, t, &u)))
            .collect();
        from_unify.sort_by(|x, y| {
            (x.func.name(), &x.params, &x.ret).cmp(&(y.func.name(), &y.params, &y.ret))
        });
        from_unify.dedup();
        assert_eq!(g.signatures(), from_unify.as_slice());
    }

    #[test]
    fn deterministic_order() {
        let u = universe(vec![Type::Int, Type::Bool, Type::list(Type::Int)]);
        let g1 = monomorphize(&Func::ALL, &u).unwrap();
        let g2 = monomorphize(&Func::ALL, &u).unwrap();
        assert_eq!(g1.signatures(), g2.signatures());
    }

    #[test]
    fn empty_grammar_is_reported() {
        // A universe with no Int/Bool/Char/Float leaves nothing: impossible to
        // build since members must be closed, so use a pair-only universe.
        let u = TypeUniverse::new(
            vec![Type::Float],
            vec![],
            Type::Float,
        )
        .unwrap();
        // Float alone still keeps Sqrt/AddFloat etc.
        assert!(monomorphize(&Func::ALL, &u).is_ok());
        let g = monomorphize(&[Func::ShowInt], &u);
        assert!(g.is_err());
    }

    #[test]
    fn universe_validation() {
        assert!(TypeUniverse::new(vec![Type::list(Type::Int)], vec![], Type::list(Type::Int))
            .is_err());
        assert!(TypeUniverse::new(
            vec![Type::fun(Type::Int, Type::Int), Type::Int],
            vec![],
            Type::Int
        )
        .is_err());
        let closed = TypeUniverse::closed(
            vec![Type::list(Type::list(Type::Char))],
            vec![Type::Int],
            Type::Bool,
        );
        assert!(closed.contains(&Type::Char));
        assert!(closed.contains(&Type::list(Type::Char)));
        assert!(closed.contains(&Type::Int));
        assert!(closed.contains(&Type::Bool));
    }
}
