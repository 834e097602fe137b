//! First-order terms, positions, replacement maps, substitutions, matching
//! and syntactic unification.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// An interned identifier naming a variable, function symbol or predicate.
pub type Sym = Arc<str>;

/// Builds a [`Sym`] from a string slice.
pub fn sym(name: &str) -> Sym {
    Arc::from(name)
}

/// A first-order term: a variable or a function symbol applied to arguments.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Sym),
    App(Sym, Vec<Term>),
}

/// Errors raised by structural term operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermError {
    /// The position does not address a node of the term.
    InvalidPosition(Position),
}

impl fmt::Display for TermError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermError::InvalidPosition(p) => write!(f, "position {p} is not valid in the term"),
        }
    }
}

impl Term {
    /// A variable named `name`.
    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    /// The application `f(args)`.
    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(sym(f), args)
    }

    /// The constant `c`.
    pub fn constant(c: &str) -> Term {
        Term::App(sym(c), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// The variable name, if this term is a variable.
    pub fn as_var(&self) -> Option<&Sym> {
        match self {
            Term::Var(x) => Some(x),
            Term::App(..) => None,
        }
    }

    /// The root function symbol, or `None` for a variable.
    pub fn root(&self) -> Option<&Sym> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    /// The immediate arguments (empty for variables and constants).
    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// The subterm at `p`, if `p` is a position of the term.
    pub fn subterm(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &p.0 {
            t = t.args().get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// The term obtained by putting `s` at position `p`.
    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term, TermError> {
        fn go(t: &Term, path: &[usize], s: Term) -> Option<Term> {
            match path.split_first() {
                None => Some(s),
                Some((&i, rest)) => match t {
                    Term::App(f, args) if i >= 1 && i <= args.len() => {
                        let mut args = args.clone();
                        args[i - 1] = go(&args[i - 1], rest, s)?;
                        Some(Term::App(f.clone(), args))
                    }
                    _ => None,
                },
            }
        }
        go(self, &p.0, s).ok_or_else(|| TermError::InvalidPosition(p.clone()))
    }

    /// All positions in pre-order, which is also lexicographic order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&mut Vec::new(), &mut out, &|_, _| true);
        out
    }

    /// The active positions `Pos^μ(t)` in lexicographic order.
    pub fn active_positions(&self, mu: &ReplacementMap) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&mut Vec::new(), &mut out, &|f, i| mu.is_active(f, i));
        out
    }

    /// The active non-variable positions `Pos^μ_F(t)`.
    pub fn active_nonvar_positions(&self, mu: &ReplacementMap) -> Vec<Position> {
        self.active_positions(mu).into_iter().filter(|p| !self.subterm(p).is_some_and(Term::is_var)).collect()
    }

    /// The active positions at which variable `x` occurs.
    pub fn active_positions_of(&self, x: &Sym, mu: &ReplacementMap) -> Vec<Position> {
        self.active_positions(mu).into_iter().filter(|p| self.subterm(p).and_then(Term::as_var) == Some(x)).collect()
    }

    fn collect_positions(&self, path: &mut Vec<usize>, out: &mut Vec<Position>, active: &dyn Fn(&Sym, usize) -> bool) {
        out.push(Position(path.clone()));
        if let Term::App(f, args) = self {
            for (i, a) in args.iter().enumerate() {
                if active(f, i + 1) {
                    path.push(i + 1);
                    a.collect_positions(path, out, active);
                    path.pop();
                }
            }
        }
    }

    /// Variables in left-to-right first-occurrence order.
    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.push_vars(&mut out);
        out
    }

    pub(crate) fn push_vars(&self, out: &mut Vec<Sym>) {
        match self {
            Term::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.push_vars(out)),
        }
    }

    pub fn var_set(&self) -> BTreeSet<Sym> {
        self.vars().into_iter().collect()
    }

    /// `Var^μ(t)`: variables with an occurrence at an active position.
    pub fn active_vars(&self, mu: &ReplacementMap) -> BTreeSet<Sym> {
        self.active_positions(mu).iter().filter_map(|p| self.subterm(p).and_then(Term::as_var).cloned()).collect()
    }

    /// Variables with an occurrence at a frozen position.
    pub fn frozen_vars(&self, mu: &ReplacementMap) -> BTreeSet<Sym> {
        let active: BTreeSet<Position> = self.active_positions(mu).into_iter().collect();
        self.positions()
            .iter()
            .filter(|p| !active.contains(*p))
            .filter_map(|p| self.subterm(p).and_then(Term::as_var).cloned())
            .collect()
    }

    /// Number of occurrences of variable `x`.
    pub fn occurrences(&self, x: &Sym) -> usize {
        match self {
            Term::Var(y) => usize::from(y == x),
            Term::App(_, args) => args.iter().map(|a| a.occurrences(x)).sum(),
        }
    }

    /// True when no variable occurs twice.
    pub fn is_linear(&self) -> bool {
        self.vars().iter().all(|x| self.occurrences(x) == 1)
    }

    /// Function symbols occurring in the term.
    pub fn symbols(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.push_symbols(&mut out);
        out
    }

    pub(crate) fn push_symbols(&self, out: &mut BTreeSet<Sym>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|a| a.push_symbols(out));
        }
    }

    /// True when some variable satisfying `pred` occurs in the term.
    pub fn has_var_where(&self, pred: &dyn Fn(&Sym) -> bool) -> bool {
        match self {
            Term::Var(x) => pred(x),
            Term::App(_, args) => args.iter().any(|a| a.has_var_where(pred)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::App(c, args) if args.is_empty() => f.write_str(c),
            Term::App(g, args) => {
                write!(f, "({g}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A position: a path of 1-based argument indices, empty for the root.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// The position `self.i`.
    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    /// `self ≤ other` in the prefix order.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Neither position is a prefix of the other.
    pub fn is_parallel_to(&self, other: &Position) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("^");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Error returned when a position string cannot be parsed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionParseError(pub String);

impl fmt::Display for PositionParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid position `{}`", self.0)
    }
}

impl FromStr for Position {
    type Err = PositionParseError;

    fn from_str(s: &str) -> Result<Position, PositionParseError> {
        if matches!(s, "^" | "L" | "Λ") {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| match part.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(PositionParseError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

/// A replacement map: the active argument indices of each function symbol.
/// Symbols without an entry have all their arguments active.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct ReplacementMap {
    active: BTreeMap<Sym, BTreeSet<usize>>,
}

impl ReplacementMap {
    /// The map with every argument active.
    pub fn top() -> ReplacementMap {
        ReplacementMap::default()
    }

    /// Restricts `f` to the given active indices.
    pub fn set(&mut self, f: Sym, indices: impl IntoIterator<Item = usize>) {
        self.active.insert(f, indices.into_iter().collect());
    }

    pub fn is_active(&self, f: &Sym, i: usize) -> bool {
        self.active.get(f).is_none_or(|s| s.contains(&i))
    }

    /// Active indices of `f` given its arity.
    pub fn active_indices(&self, f: &Sym, arity: usize) -> Vec<usize> {
        (1..=arity).filter(|&i| self.is_active(f, i)).collect()
    }

    /// The explicitly restricted symbols and their active indices.
    pub fn entries(&self) -> impl Iterator<Item = (&Sym, &BTreeSet<usize>)> {
        self.active.iter()
    }

    pub fn is_top(&self) -> bool {
        self.active.is_empty()
    }
}

/// A finite map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subst(BTreeMap<Sym, Term>);

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn get(&self, x: &Sym) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: Sym, t: Term) {
        self.0.insert(x, t);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Sym> {
        self.0.keys()
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(x) => self.0.get(x).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    /// The substitution `other ∘ self`: apply `self` first, then `other`.
    pub fn then(&self, other: &Subst) -> Subst {
        let mut out: BTreeMap<Sym, Term> = self.0.iter().map(|(x, t)| (x.clone(), other.apply(t))).collect();
        for (x, t) in &other.0 {
            out.entry(x.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|x, t| t.as_var() != Some(x));
        Subst(out)
    }

    /// Keeps only the bindings of variables in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<Sym>) -> Subst {
        Subst(self.0.iter().filter(|(x, _)| keep.contains(*x)).map(|(x, t)| (x.clone(), t.clone())).collect())
    }

    /// True when `apply(apply(t)) = apply(t)` for every term.
    pub fn is_idempotent(&self) -> bool {
        self.0.values().all(|t| !t.has_var_where(&|y| self.0.contains_key(y)))
    }

    /// A renaming built from `(old, new)` variable name pairs.
    pub fn renaming(pairs: impl IntoIterator<Item = (Sym, Sym)>) -> Subst {
        Subst(pairs.into_iter().map(|(x, y)| (x, Term::Var(y))).collect())
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (x, t)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} -> {t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<(Sym, Term)> for Subst {
    fn from_iter<I: IntoIterator<Item = (Sym, Term)>>(iter: I) -> Subst {
        Subst(iter.into_iter().collect())
    }
}

/// Syntactic matching: the least `σ` with `σ(pattern) = subject`.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Subst> {
    match_with(pattern, subject, Subst::new(), &|_| true)
}

/// Matching that extends `sigma`; only pattern variables accepted by `flex`
/// may be bound, the others behave like constants.
pub fn match_with(pattern: &Term, subject: &Term, mut sigma: Subst, flex: &dyn Fn(&Sym) -> bool) -> Option<Subst> {
    fn go(p: &Term, s: &Term, sigma: &mut Subst, flex: &dyn Fn(&Sym) -> bool) -> bool {
        match p {
            Term::Var(x) if flex(x) => match sigma.get(x) {
                Some(bound) => bound == s,
                None => {
                    sigma.insert(x.clone(), s.clone());
                    true
                }
            },
            Term::Var(_) => p == s,
            Term::App(f, args) => match s {
                Term::App(g, sargs) if f == g && args.len() == sargs.len() => {
                    args.iter().zip(sargs).all(|(a, b)| go(a, b, sigma, flex))
                }
                _ => false,
            },
        }
    }
    go(pattern, subject, &mut sigma, flex).then_some(sigma)
}

/// Syntactic unification with occurs check; returns an idempotent mgu.
pub fn unify(s: &Term, t: &Term) -> Option<Subst> {
    unify_flex(s, t, &|_| true)
}

/// Unification in which only variables accepted by `flex` may be bound.
pub fn unify_flex(s: &Term, t: &Term, flex: &dyn Fn(&Sym) -> bool) -> Option<Subst> {
    unify_all(&[(s.clone(), t.clone())], Subst::new(), flex)
}

/// Simultaneous unification of several equations, extending `sigma`.
pub fn unify_all(eqs: &[(Term, Term)], sigma: Subst, flex: &dyn Fn(&Sym) -> bool) -> Option<Subst> {
    let mut sigma = sigma;
    let mut work: Vec<(Term, Term)> = eqs.iter().rev().cloned().collect();
    while let Some((a, b)) = work.pop() {
        let a = sigma.apply(&a);
        let b = sigma.apply(&b);
        if a == b {
            continue;
        }
        match (&a, &b) {
            (Term::Var(x), _) if flex(x) => bind(&mut sigma, x, &b)?,
            (_, Term::Var(y)) if flex(y) => bind(&mut sigma, y, &a)?,
            (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
                for pair in xs.iter().cloned().zip(ys.iter().cloned()).rev() {
                    work.push(pair);
                }
            }
            _ => return None,
        }
    }
    Some(sigma)
}

fn bind(sigma: &mut Subst, x: &Sym, t: &Term) -> Option<()> {
    if t.has_var_where(&|y| y == x) {
        return None;
    }
    let single = Subst::new().with(x.clone(), t.clone());
    *sigma = sigma.then(&single);
    Some(())
}

impl Subst {
    fn with(mut self, x: Sym, t: Term) -> Subst {
        self.insert(x, t);
        self
    }
}

/// Strips a trailing `$k` renaming suffix.
pub fn base_name(x: &str) -> &str {
    match x.rfind('$') {
        Some(i) if x[i + 1..].chars().all(|c| c.is_ascii_digit()) && i + 1 < x.len() => &x[..i],
        _ => x,
    }
}

/// A renaming of `vars` away from `avoid`. Clashing variables get the name
/// `base$k` with the smallest `k ≥ 1` not used so far, assigned in the order
/// of `vars`. Non-clashing variables are left alone.
pub fn fresh_renaming(avoid: &BTreeSet<Sym>, vars: &[Sym]) -> Subst {
    let mut used: BTreeSet<Sym> = avoid.iter().chain(vars.iter()).cloned().collect();
    let mut out = Subst::new();
    for x in vars {
        if !avoid.contains(x) {
            continue;
        }
        let base = base_name(x);
        let mut k = 1usize;
        let fresh = loop {
            let candidate: Sym = sym(&alloc::format!("{base}${k}"));
            if !used.contains(&candidate) {
                break candidate;
            }
            k += 1;
        };
        used.insert(fresh.clone());
        out.insert(x.clone(), Term::Var(fresh));
    }
    out
}

/// Objects whose variables can be listed and renamed.
pub trait HasVars: Sized {
    /// Variables in first-occurrence order.
    fn variables(&self) -> Vec<Sym>;
    /// Applies a substitution to every term inside.
    fn substitute(&self, sigma: &Subst) -> Self;
}

impl HasVars for Term {
    fn variables(&self) -> Vec<Sym> {
        self.vars()
    }

    fn substitute(&self, sigma: &Subst) -> Term {
        sigma.apply(self)
    }
}

/// Renames the variables of `second` apart from those of `first`.
/// `first` is returned unchanged; only clashing variables of `second` move.
pub fn rename_apart<A: HasVars + Clone, B: HasVars>(first: &A, second: &B) -> (A, B) {
    let avoid: BTreeSet<Sym> = first.variables().into_iter().collect();
    let rho = fresh_renaming(&avoid, &second.variables());
    (first.clone(), second.substitute(&rho))
}
