//! The EGTRS model: signature, predicates, equations, Horn clauses and rules,
//! together with equation orientation, the `rm`/`ps` condition transforms and
//! the syntactic side conditions used by the confluence criteria.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::terms::{sym, HasVars, ReplacementMap, Subst, Sym, Term};

/// Which computational reading a predicate refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    /// Plain rewriting with the rules.
    Plain,
    /// Peterson–Stickel rewriting (`->ps`, `#ps`).
    Ps,
    /// Rewriting modulo the equations (`->rm`, `#rm`).
    Rm,
}

impl Flavor {
    fn suffix(self) -> &'static str {
        match self {
            Flavor::Plain => "",
            Flavor::Ps => "ps",
            Flavor::Rm => "rm",
        }
    }
}

/// A predicate symbol.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pred {
    /// Equality modulo the equations, `=`.
    Eq,
    /// One rewrite step: `->`, `->ps` or `->rm`.
    Rew(Flavor),
    /// Many rewrite steps: `->*`, `->*ps` or `->*rm`.
    RewStar(Flavor),
    /// One inner (non-root) rewrite step, `->inner`.
    Inner,
    /// One oriented-equation step, `=1=`.
    EqOne,
    /// A user predicate, possibly renamed with `#ps` or `#rm`.
    User(Sym, Flavor),
}

/// Spellings of the built-in predicates; user predicates may not use them.
pub const BUILTIN_SPELLINGS: [&str; 9] = ["=", "->", "->*", "->ps", "->*ps", "->rm", "->*rm", "->inner", "=1="];

impl Pred {
    pub fn name(&self) -> String {
        match self {
            Pred::Eq => "=".into(),
            Pred::Rew(fl) => format!("->{}", fl.suffix()),
            Pred::RewStar(fl) => format!("->*{}", fl.suffix()),
            Pred::Inner => "->inner".into(),
            Pred::EqOne => "=1=".into(),
            Pred::User(p, Flavor::Plain) => p.to_string(),
            Pred::User(p, fl) => format!("{p}#{}", fl.suffix()),
        }
    }

    /// Parses any spelling produced by [`Pred::name`].
    pub fn parse(name: &str) -> Pred {
        match name {
            "=" => Pred::Eq,
            "->" => Pred::Rew(Flavor::Plain),
            "->ps" => Pred::Rew(Flavor::Ps),
            "->rm" => Pred::Rew(Flavor::Rm),
            "->*" => Pred::RewStar(Flavor::Plain),
            "->*ps" => Pred::RewStar(Flavor::Ps),
            "->*rm" => Pred::RewStar(Flavor::Rm),
            "->inner" => Pred::Inner,
            "=1=" => Pred::EqOne,
            _ => {
                if let Some(base) = name.strip_suffix("#ps") {
                    Pred::User(sym(base), Flavor::Ps)
                } else if let Some(base) = name.strip_suffix("#rm") {
                    Pred::User(sym(base), Flavor::Rm)
                } else {
                    Pred::User(sym(name), Flavor::Plain)
                }
            }
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, Pred::User(..))
    }

    /// Built-ins that denote a computation with the rules.
    pub fn is_rewriting(&self) -> bool {
        matches!(self, Pred::Rew(_) | Pred::RewStar(_) | Pred::Inner)
    }

    /// The arity fixed for built-ins.
    pub fn builtin_arity(&self) -> Option<usize> {
        self.is_builtin().then_some(2)
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Debug for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// An atomic formula `P(t1, ..., tn)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: Pred,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: Pred, args: Vec<Term>) -> Atom {
        Atom { pred, args }
    }

    /// The binary atom `s P t`.
    pub fn binary(pred: Pred, s: Term, t: Term) -> Atom {
        Atom { pred, args: alloc::vec![s, t] }
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.args.iter().for_each(|a| a.push_vars(&mut out));
        out
    }

    pub fn has_var_where(&self, pred: &dyn Fn(&Sym) -> bool) -> bool {
        self.args.iter().any(|a| a.has_var_where(pred))
    }

    pub fn apply(&self, sigma: &Subst) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| sigma.apply(a)).collect() }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl HasVars for Vec<Atom> {
    fn variables(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        for a in self {
            a.args.iter().for_each(|t| t.push_vars(&mut out));
        }
        out
    }

    fn substitute(&self, sigma: &Subst) -> Vec<Atom> {
        self.iter().map(|a| a.apply(sigma)).collect()
    }
}

/// Orientation of an equation used as a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    /// Left to right.
    Lr,
    /// Right to left.
    Rl,
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::Lr => "lr",
            Dir::Rl => "rl",
        })
    }
}

/// Where a rule comes from: the `k`-th rule, or the `k`-th equation in a
/// direction. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Rule(usize),
    Eq(usize, Dir),
}

impl Origin {
    /// `r3` or `e1`.
    pub fn token(&self) -> String {
        match self {
            Origin::Rule(k) => format!("r{k}"),
            Origin::Eq(k, _) => format!("e{k}"),
        }
    }

    /// `lr`, `rl`, or `-` for rules.
    pub fn dir_token(&self) -> &'static str {
        match self {
            Origin::Rule(_) => "-",
            Origin::Eq(_, Dir::Lr) => "lr",
            Origin::Eq(_, Dir::Rl) => "rl",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Rule(k) => write!(f, "r{k}"),
            Origin::Eq(k, d) => write!(f, "e{k}{d}"),
        }
    }
}

/// A conditional rule `lhs -> rhs <= cond`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    pub cond: Vec<Atom>,
    pub origin: Origin,
}

/// Syntactic properties of a rule relative to a replacement map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleProperties {
    pub left_mu_homogeneous: bool,
    pub mu_compatible: bool,
    pub mu_left_linear: bool,
    pub two_rule: bool,
    pub collapsing: bool,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term, cond: Vec<Atom>, origin: Origin) -> Rule {
        Rule { lhs, rhs, cond, origin }
    }

    pub fn properties(&self, mu: &ReplacementMap) -> RuleProperties {
        let active_l = self.lhs.active_vars(mu);
        let frozen_l = self.lhs.frozen_vars(mu);
        let frozen_r = self.rhs.frozen_vars(mu);
        let cond_vars: BTreeSet<Sym> = self.cond.variables().into_iter().collect();
        let lhs_vars = self.lhs.var_set();
        RuleProperties {
            left_mu_homogeneous: active_l.is_disjoint(&frozen_l),
            mu_compatible: active_l.is_disjoint(&frozen_r) && lhs_vars.is_disjoint(&cond_vars),
            mu_left_linear: active_l.iter().all(|x| self.lhs.occurrences(x) == 1),
            two_rule: self.rhs.var_set().is_subset(&lhs_vars),
            collapsing: self.rhs.is_var(),
        }
    }

    /// Variables of the condition and right-hand side missing from the left.
    pub fn extra_vars(&self) -> Vec<Sym> {
        let lhs = self.lhs.var_set();
        let mut all = self.cond.variables();
        self.rhs.push_vars(&mut all);
        all.into_iter().filter(|x| !lhs.contains(x)).collect()
    }
}

impl HasVars for Rule {
    fn variables(&self) -> Vec<Sym> {
        let mut out = self.lhs.vars();
        self.rhs.push_vars(&mut out);
        for a in &self.cond {
            a.args.iter().for_each(|t| t.push_vars(&mut out));
        }
        out
    }

    fn substitute(&self, sigma: &Subst) -> Rule {
        Rule {
            lhs: sigma.apply(&self.lhs),
            rhs: sigma.apply(&self.rhs),
            cond: self.cond.substitute(sigma),
            origin: self.origin,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cond.is_empty() {
            write!(f, "(-> {} {})", self.lhs, self.rhs)
        } else {
            write!(f, "(=> (-> {} {})", self.lhs, self.rhs)?;
            for a in &self.cond {
                write!(f, " {a}")?;
            }
            f.write_str(")")
        }
    }
}

/// A conditional equation `lhs = rhs <= cond`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    pub cond: Vec<Atom>,
}

/// A definite Horn clause `head <= body`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HornClause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl HasVars for HornClause {
    fn variables(&self) -> Vec<Sym> {
        let mut out = self.head.vars();
        for a in &self.body {
            a.args.iter().for_each(|t| t.push_vars(&mut out));
        }
        out
    }

    fn substitute(&self, sigma: &Subst) -> HornClause {
        HornClause { head: self.head.apply(sigma), body: self.body.substitute(sigma) }
    }
}

/// Function and predicate declarations, in declaration order.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Signature {
    pub funs: Vec<(Sym, usize)>,
    pub preds: Vec<(Sym, usize)>,
}

impl Signature {
    pub fn fun_arity(&self, f: &str) -> Option<usize> {
        self.funs.iter().find(|(g, _)| &**g == f).map(|(_, n)| *n)
    }

    pub fn pred_arity(&self, p: &str) -> Option<usize> {
        self.preds.iter().find(|(q, _)| &**q == p).map(|(_, n)| *n)
    }
}

/// Problems found while assembling a system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemError {
    DuplicateSymbol(String),
    ReservedName(String),
    UnknownFunction(String),
    UnknownPredicate(String),
    ArityMismatch { name: String, expected: usize, found: usize },
    VariableNamesFunction(String),
    BadReplacementMap { symbol: String, index: usize },
    VariableLhs(usize),
    BuiltinHead(usize),
    TransformedPredicate(String),
}

impl fmt::Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemError::DuplicateSymbol(s) => write!(f, "symbol `{s}` is declared twice"),
            SystemError::ReservedName(s) => write!(f, "`{s}` is a reserved name"),
            SystemError::UnknownFunction(s) => write!(f, "function symbol `{s}` is not declared"),
            SystemError::UnknownPredicate(s) => write!(f, "predicate `{s}` is not declared"),
            SystemError::ArityMismatch { name, expected, found } => {
                write!(f, "`{name}` expects {expected} arguments but got {found}")
            }
            SystemError::VariableNamesFunction(s) => {
                write!(f, "`{s}` is used both as a variable and a function symbol")
            }
            SystemError::BadReplacementMap { symbol, index } => {
                write!(f, "replacement map index {index} is out of range for `{symbol}`")
            }
            SystemError::VariableLhs(k) => write!(f, "rule r{k} has a variable left-hand side"),
            SystemError::BuiltinHead(k) => write!(f, "Horn clause {k} has a built-in predicate in its head"),
            SystemError::TransformedPredicate(s) => write!(f, "predicate `{s}` cannot appear in input"),
        }
    }
}

/// Checks that `name` is usable as an identifier.
pub fn check_identifier(name: &str) -> Result<(), SystemError> {
    let bad = name.is_empty()
        || name.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ';' | '$' | '#' | '%' | ':' | ','))
        || BUILTIN_SPELLINGS.contains(&name)
        || matches!(name, "=>" | "<=");
    if bad {
        Err(SystemError::ReservedName(name.into()))
    } else {
        Ok(())
    }
}

/// An equational generalized term rewriting system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Egtrs {
    pub sig: Signature,
    pub mu: ReplacementMap,
    pub eqs: Vec<Equation>,
    pub horn: Vec<HornClause>,
    pub rules: Vec<Rule>,
}

/// A warning about a side condition that voids E-termination claims.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    /// Short machine-readable code.
    pub code: &'static str,
    pub message: String,
}

impl Egtrs {
    /// Validates and assembles a system. Rule origins are renumbered by
    /// position in `rules`.
    pub fn new(
        sig: Signature,
        mu: ReplacementMap,
        eqs: Vec<Equation>,
        horn: Vec<HornClause>,
        rules: Vec<(Term, Term, Vec<Atom>)>,
    ) -> Result<Egtrs, SystemError> {
        let rules =
            rules.into_iter().enumerate().map(|(k, (l, r, c))| Rule::new(l, r, c, Origin::Rule(k + 1))).collect();
        let sys = Egtrs { sig, mu, eqs, horn, rules };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<(), SystemError> {
        let mut seen = BTreeSet::new();
        for (name, _) in self.sig.funs.iter().chain(self.sig.preds.iter()) {
            check_identifier(name)?;
            if !seen.insert(name.clone()) {
                return Err(SystemError::DuplicateSymbol(name.to_string()));
            }
        }
        for (f, idx) in self.mu.entries() {
            let arity = self.sig.fun_arity(f).ok_or_else(|| SystemError::UnknownFunction(f.to_string()))?;
            if let Some(&i) = idx.iter().find(|&&i| i == 0 || i > arity) {
                return Err(SystemError::BadReplacementMap { symbol: f.to_string(), index: i });
            }
        }
        for e in &self.eqs {
            self.check_term(&e.lhs)?;
            self.check_term(&e.rhs)?;
            self.check_atoms(&e.cond)?;
        }
        for (k, h) in self.horn.iter().enumerate() {
            if h.head.pred.is_builtin() {
                return Err(SystemError::BuiltinHead(k + 1));
            }
            self.check_atom(&h.head)?;
            self.check_atoms(&h.body)?;
        }
        for (k, r) in self.rules.iter().enumerate() {
            if r.lhs.is_var() {
                return Err(SystemError::VariableLhs(k + 1));
            }
            self.check_term(&r.lhs)?;
            self.check_term(&r.rhs)?;
            self.check_atoms(&r.cond)?;
        }
        Ok(())
    }

    fn check_term(&self, t: &Term) -> Result<(), SystemError> {
        match t {
            Term::Var(x) => {
                check_identifier(x)?;
                if self.sig.fun_arity(x).is_some() {
                    return Err(SystemError::VariableNamesFunction(x.to_string()));
                }
                Ok(())
            }
            Term::App(f, args) => {
                let arity = self.sig.fun_arity(f).ok_or_else(|| SystemError::UnknownFunction(f.to_string()))?;
                if arity != args.len() {
                    return Err(SystemError::ArityMismatch { name: f.to_string(), expected: arity, found: args.len() });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    fn check_atoms(&self, atoms: &[Atom]) -> Result<(), SystemError> {
        atoms.iter().try_for_each(|a| self.check_atom(a))
    }

    fn check_atom(&self, a: &Atom) -> Result<(), SystemError> {
        let expected = match &a.pred {
            Pred::Eq | Pred::Rew(Flavor::Plain) | Pred::RewStar(Flavor::Plain) => 2,
            Pred::User(p, Flavor::Plain) => {
                self.sig.pred_arity(p).ok_or_else(|| SystemError::UnknownPredicate(p.to_string()))?
            }
            other => return Err(SystemError::TransformedPredicate(other.name())),
        };
        if expected != a.args.len() {
            return Err(SystemError::ArityMismatch { name: a.pred.name(), expected, found: a.args.len() });
        }
        a.args.iter().try_for_each(|t| self.check_term(t))
    }

    /// Equations oriented left to right.
    pub fn evec(&self) -> Vec<Rule> {
        self.oriented(&[Dir::Lr])
    }

    /// Equations oriented right to left.
    pub fn ecev(&self) -> Vec<Rule> {
        self.oriented(&[Dir::Rl])
    }

    /// Both orientations, equation by equation, `lr` before `rl`.
    pub fn eboth(&self) -> Vec<Rule> {
        self.oriented(&[Dir::Lr, Dir::Rl])
    }

    fn oriented(&self, dirs: &[Dir]) -> Vec<Rule> {
        let mut out = Vec::new();
        for (k, e) in self.eqs.iter().enumerate() {
            for &d in dirs {
                let (l, r) = match d {
                    Dir::Lr => (&e.lhs, &e.rhs),
                    Dir::Rl => (&e.rhs, &e.lhs),
                };
                out.push(Rule::new(l.clone(), r.clone(), e.cond.clone(), Origin::Eq(k + 1, d)));
            }
        }
        out
    }

    /// User predicates that depend on the rules, and whether `=` does.
    pub fn rule_dependence(&self) -> (BTreeSet<Sym>, bool) {
        let mut dep: BTreeSet<Sym> = BTreeSet::new();
        let mut eq_dep = false;
        let depends = |a: &Atom, dep: &BTreeSet<Sym>, eq_dep: bool| match &a.pred {
            Pred::Rew(_) | Pred::RewStar(_) | Pred::Inner => true,
            Pred::Eq | Pred::EqOne => eq_dep,
            Pred::User(p, _) => dep.contains(p),
        };
        loop {
            let mut changed = false;
            for h in &self.horn {
                if let Pred::User(p, _) = &h.head.pred {
                    if !dep.contains(p) && h.body.iter().any(|a| depends(a, &dep, eq_dep)) {
                        dep.insert(p.clone());
                        changed = true;
                    }
                }
            }
            if !eq_dep && self.eqs.iter().any(|e| e.cond.iter().any(|a| depends(a, &dep, eq_dep))) {
                eq_dep = true;
                changed = true;
            }
            if !changed {
                return (dep, eq_dep);
            }
        }
    }

    /// Renames the computational predicates of an atom to `flavor`.
    pub fn transform_atom(a: &Atom, flavor: Flavor, dep: &BTreeSet<Sym>) -> Atom {
        let pred = match &a.pred {
            Pred::Rew(Flavor::Plain) => Pred::Rew(flavor),
            Pred::RewStar(Flavor::Plain) => Pred::RewStar(flavor),
            Pred::User(p, Flavor::Plain) if dep.contains(p) => Pred::User(p.clone(), flavor),
            other => other.clone(),
        };
        Atom { pred, args: a.args.clone() }
    }

    /// The rules with conditions read in `flavor` (`R^rm`, `R^ps`, or `R`).
    pub fn rules_as(&self, flavor: Flavor) -> Vec<Rule> {
        let (dep, _) = self.rule_dependence();
        self.rules
            .iter()
            .map(|r| Rule { cond: r.cond.iter().map(|a| Self::transform_atom(a, flavor, &dep)).collect(), ..r.clone() })
            .collect()
    }

    /// Both orientations of the equations with conditions read in `flavor`.
    pub fn eboth_as(&self, flavor: Flavor) -> Vec<Rule> {
        let (dep, _) = self.rule_dependence();
        self.eboth()
            .into_iter()
            .map(|r| Rule { cond: r.cond.iter().map(|a| Self::transform_atom(a, flavor, &dep)).collect(), ..r })
            .collect()
    }

    /// The Horn clauses read in `flavor` (`H^rm`, `H^ps`, or `H`).
    pub fn horn_as(&self, flavor: Flavor) -> Vec<HornClause> {
        let (dep, _) = self.rule_dependence();
        self.horn
            .iter()
            .map(|h| HornClause {
                head: Self::transform_atom(&h.head, flavor, &dep),
                body: h.body.iter().map(|a| Self::transform_atom(a, flavor, &dep)).collect(),
            })
            .collect()
    }

    /// Root symbols of the non-variable left-hand sides of `rules`.
    pub fn defined_symbols(rules: &[Rule]) -> BTreeSet<Sym> {
        rules.iter().filter_map(|r| r.lhs.root().cloned()).collect()
    }

    /// Side conditions on the equations that any E-termination claim needs.
    pub fn equation_diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (k, e) in self.eqs.iter().enumerate() {
            if e.lhs.var_set() != e.rhs.var_set() {
                out.push(Diagnostic {
                    code: "non-regular-equation",
                    message: format!("equation e{} does not have the same variables on both sides", k + 1),
                });
            }
            if !e.lhs.is_linear() || !e.rhs.is_linear() {
                out.push(Diagnostic {
                    code: "non-linear-equation",
                    message: format!("equation e{} has a repeated variable on one side", k + 1),
                });
            }
        }
        if self.rule_dependence().1 {
            out.push(Diagnostic {
                code: "equality-depends-on-rules",
                message: "the predicate `=` depends on the rewrite rules through equation conditions".into(),
            });
        }
        out
    }

    /// Arity of `f`, defaulting to the number of arguments seen.
    pub fn arity(&self, f: &Sym) -> usize {
        self.sig.fun_arity(f).unwrap_or(0)
    }
}
