//! Generation, classification and deduplication of the conditional pair
//! families: critical pairs (CCPs), variable pairs (CVPs), logic-based
//! critical pairs (LCCPs) and down pairs (DCPs).
//!
//! Pairs are built from the `rm` view of the rules. Feasibility is decided
//! separately by the deduction engine.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::system::{Atom, Egtrs, Flavor, Origin, Pred, Rule};
use crate::terms::{base_name, rename_apart, sym, unify, HasVars, Position, ReplacementMap, Subst, Sym, Term};

/// The eleven pair families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    CcpR,
    CvpToR,
    CcpER,
    CcpRE,
    CvpToE,
    CvpEqR,
    LccpR,
    CvpPsR,
    DcpR,
    LccpER,
    CvpPsE,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::CcpR,
        Family::CvpToR,
        Family::CcpER,
        Family::CcpRE,
        Family::CvpToE,
        Family::CvpEqR,
        Family::LccpR,
        Family::CvpPsR,
        Family::DcpR,
        Family::LccpER,
        Family::CvpPsE,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Family::CcpR => "CCP-R",
            Family::CvpToR => "CVPto-R",
            Family::CcpER => "CCP-ER",
            Family::CcpRE => "CCP-RE",
            Family::CvpToE => "CVPto-E",
            Family::CvpEqR => "CVPeq-R",
            Family::LccpR => "LCCP-R",
            Family::CvpPsR => "CVPps-R",
            Family::DcpR => "DCP-R",
            Family::LccpER => "LCCP-ER",
            Family::CvpPsE => "CVPps-E",
        }
    }

    /// Parses a family id, ignoring case and dashes (`cvp-to-R` works).
    pub fn parse(s: &str) -> Option<Family> {
        let norm =
            |x: &str| x.chars().filter(|c| *c != '-' && *c != '_').flat_map(char::to_lowercase).collect::<String>();
        let want = norm(s);
        Family::ALL.into_iter().find(|f| norm(f.id()) == want)
    }

    /// The relation symbol heading the condition of a variable pair.
    pub fn marker(&self) -> Option<Pred> {
        match self {
            Family::CvpToR | Family::CvpToE => Some(Pred::Rew(Flavor::Plain)),
            Family::CvpEqR => Some(Pred::EqOne),
            Family::CvpPsR | Family::CvpPsE => Some(Pred::Rew(Flavor::Ps)),
            _ => None,
        }
    }

    pub fn is_cvp(&self) -> bool {
        self.marker().is_some()
    }

    pub fn is_lccp(&self) -> bool {
        matches!(self, Family::LccpR | Family::LccpER)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Where a pair comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    /// The outer rule (or oriented equation).
    pub first: Origin,
    /// The inner rule, for critical pairs.
    pub second: Option<Origin>,
    /// The overlap position, or the variable position for variable pairs.
    pub position: Position,
    /// The variable of a variable pair.
    pub var: Option<Sym>,
}

/// A conditional pair `<left, right> <= cond`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalPair {
    pub left: Term,
    pub right: Term,
    pub cond: Vec<Atom>,
    pub family: Family,
    pub provenance: Provenance,
    /// Both rules are the same and the overlap is at the root.
    pub improper: bool,
    /// The overlap is at the root.
    pub root: bool,
    /// Variables introduced by the pair construction itself.
    pub fresh: Vec<Sym>,
    /// Stable identifier.
    pub id: String,
}

impl ConditionalPair {
    /// Both sides are syntactically equal.
    pub fn trivial(&self) -> bool {
        self.left == self.right
    }

    /// The pair with its sides swapped.
    pub fn mirror(&self) -> ConditionalPair {
        ConditionalPair { left: self.right.clone(), right: self.left.clone(), ..self.clone() }
    }

    /// All variables, in first-occurrence order.
    pub fn vars(&self) -> Vec<Sym> {
        self.variables()
    }

    /// A short description of the peak the pair stands for.
    pub fn peak(&self) -> String {
        let p = &self.provenance;
        match (p.second, &p.var) {
            (Some(second), _) => format!("{} at {} with {}", p.first, p.position, second),
            (None, Some(x)) => format!("{} below {} at {}", p.first, x, p.position),
            (None, None) => format!("{} over an inner step", p.first),
        }
    }
}

impl HasVars for ConditionalPair {
    fn variables(&self) -> Vec<Sym> {
        let mut out = self.left.vars();
        self.right.push_vars(&mut out);
        for a in &self.cond {
            a.args.iter().for_each(|t| t.push_vars(&mut out));
        }
        out
    }

    fn substitute(&self, sigma: &Subst) -> ConditionalPair {
        ConditionalPair {
            left: sigma.apply(&self.left),
            right: sigma.apply(&self.right),
            cond: self.cond.substitute(sigma),
            ..self.clone()
        }
    }
}

impl fmt::Display for ConditionalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.left, self.right)?;
        for (k, a) in self.cond.iter().enumerate() {
            f.write_str(if k == 0 { " <= " } else { ", " })?;
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Why a variable pair could not be built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairError {
    /// The variable does not occur actively at the position.
    NotActiveVariable { var: String, position: Position },
    /// The position is not an active non-variable position.
    NotActiveFunctionPosition(Position),
}

impl fmt::Display for PairError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairError::NotActiveVariable { var, position } => {
                write!(f, "variable {var} does not occur actively at position {position}")
            }
            PairError::NotActiveFunctionPosition(p) => write!(f, "position {p} is not an active non-variable position"),
        }
    }
}

fn rule_token(o: Origin) -> String {
    format!("{}:{}", o.token(), o.dir_token())
}

fn critical_id(family: Family, first: Origin, p: &Position, second: Origin) -> String {
    format!("{}:{}:{}:{}", family.id(), rule_token(first), p, second)
}

/// Renames `name$k` variables back to `name` when that name is free.
fn tidy(pair: ConditionalPair) -> ConditionalPair {
    let vars = pair.vars();
    let mut used: BTreeSet<Sym> = vars.iter().cloned().collect();
    let mut rho = Subst::new();
    for x in &vars {
        let base = base_name(x);
        if base.len() == x.len() {
            continue;
        }
        let b = sym(base);
        if !used.contains(&b) {
            used.insert(b.clone());
            rho.insert(x.clone(), Term::Var(b));
        }
    }
    if rho.is_empty() {
        return pair;
    }
    let fresh = pair
        .fresh
        .iter()
        .map(|x| rho.apply(&Term::Var(x.clone())).as_var().cloned().unwrap_or_else(|| x.clone()))
        .collect();
    let mut out = pair.substitute(&rho);
    out.fresh = fresh;
    out
}

/// A fresh variable named after `base`, avoiding `taken`.
fn fresh_named(base: &str, taken: &BTreeSet<Sym>) -> Sym {
    let first = sym(base);
    if !taken.contains(&first) {
        return first;
    }
    (1..).map(|k| sym(&format!("{base}${k}"))).find(|x| !taken.contains(x)).expect("unbounded")
}

/// The critical pair of `inner` into `outer` at `p`, when they unify there.
pub fn ccp(outer: &Rule, p: &Position, inner: &Rule, family: Family) -> Option<ConditionalPair> {
    let (outer, inner) = rename_apart(outer, inner);
    let sub = outer.lhs.subterm(p)?;
    if sub.is_var() {
        return None;
    }
    let theta = unify(sub, &inner.lhs)?;
    let left = theta.apply(&outer.lhs.replace_at(p, inner.rhs.clone()).ok()?);
    let right = theta.apply(&outer.rhs);
    let cond = outer.cond.iter().chain(inner.cond.iter()).map(|a| a.apply(&theta)).collect();
    Some(tidy(ConditionalPair {
        left,
        right,
        cond,
        family,
        provenance: Provenance { first: outer.origin, second: Some(inner.origin), position: p.clone(), var: None },
        improper: outer.origin == inner.origin && p.is_root(),
        root: p.is_root(),
        fresh: Vec::new(),
        id: critical_id(family, outer.origin, p, inner.origin),
    }))
}

/// The critical pair of a variable left-hand side `inner` (an oriented
/// equation `y -> rho`) into `outer` at `p`.
fn variable_ccp(outer: &Rule, p: &Position, inner: &Rule, family: Family) -> Option<ConditionalPair> {
    let (outer, inner) = rename_apart(outer, inner);
    let y = inner.lhs.as_var()?.clone();
    let sub = outer.lhs.subterm(p)?.clone();
    if sub.is_var() {
        return None;
    }
    let theta: Subst = [(y, sub)].into_iter().collect();
    let left = outer.lhs.replace_at(p, theta.apply(&inner.rhs)).ok()?;
    let cond = outer.cond.iter().cloned().chain(inner.cond.iter().map(|a| a.apply(&theta))).collect();
    Some(tidy(ConditionalPair {
        left,
        right: outer.rhs.clone(),
        cond,
        family,
        provenance: Provenance { first: outer.origin, second: Some(inner.origin), position: p.clone(), var: None },
        improper: false,
        root: p.is_root(),
        fresh: Vec::new(),
        id: critical_id(family, outer.origin, p, inner.origin),
    }))
}

/// The variable pair `<s[x']_p, t> <= x marker x', c` of `rule`.
pub fn cvp(
    rule: &Rule,
    x: &Sym,
    p: &Position,
    family: Family,
    mu: &ReplacementMap,
) -> Result<ConditionalPair, PairError> {
    let marker = family.marker().expect("variable pair family");
    if !rule.lhs.active_positions_of(x, mu).contains(p) {
        return Err(PairError::NotActiveVariable { var: x.to_string(), position: p.clone() });
    }
    let taken: BTreeSet<Sym> = rule.variables().into_iter().collect();
    let x2 = fresh_named(&format!("{x}'"), &taken);
    let left = rule.lhs.replace_at(p, Term::Var(x2.clone())).expect("own position");
    let mut cond = alloc::vec![Atom::binary(marker, Term::Var(x.clone()), Term::Var(x2.clone()))];
    cond.extend(rule.cond.iter().cloned());
    Ok(ConditionalPair {
        left,
        right: rule.rhs.clone(),
        cond,
        family,
        provenance: Provenance { first: rule.origin, second: None, position: p.clone(), var: Some(x.clone()) },
        improper: false,
        root: p.is_root(),
        fresh: alloc::vec![x2],
        id: format!("{}:{}:{}:{}", family.id(), rule.origin, x, p),
    })
}

/// The logic-based critical pair `<s[v]_p, t> <= s|_p = u, c, d`.
pub fn lccp(
    outer: &Rule,
    p: &Position,
    inner: &Rule,
    family: Family,
    mu: &ReplacementMap,
) -> Result<ConditionalPair, PairError> {
    if !outer.lhs.active_nonvar_positions(mu).contains(p) {
        return Err(PairError::NotActiveFunctionPosition(p.clone()));
    }
    let (outer, inner) = rename_apart(outer, inner);
    let sub = outer.lhs.subterm(p).expect("own position").clone();
    let left = outer.lhs.replace_at(p, inner.rhs.clone()).expect("own position");
    let mut cond = alloc::vec![Atom::binary(Pred::Eq, sub, inner.lhs.clone())];
    cond.extend(outer.cond.iter().cloned());
    cond.extend(inner.cond.iter().cloned());
    Ok(tidy(ConditionalPair {
        left,
        right: outer.rhs.clone(),
        cond,
        family,
        provenance: Provenance { first: outer.origin, second: Some(inner.origin), position: p.clone(), var: None },
        improper: outer.origin == inner.origin && p.is_root(),
        root: p.is_root(),
        fresh: Vec::new(),
        id: critical_id(family, outer.origin, p, inner.origin),
    }))
}

/// The down pair `<r, x'> <= x = l, x ->inner x', c` with fresh `x`, `x'`.
pub fn dcp(rule: &Rule) -> ConditionalPair {
    let taken: BTreeSet<Sym> = rule.variables().into_iter().collect();
    let base = ["x", "y", "z", "w"]
        .into_iter()
        .find(|b| !taken.contains(&sym(b)) && !taken.contains(&sym(&format!("{b}'"))))
        .unwrap_or("x");
    let x = fresh_named(base, &taken);
    let mut taken2 = taken.clone();
    taken2.insert(x.clone());
    let x2 = fresh_named(&format!("{base}'"), &taken2);
    let mut cond = alloc::vec![
        Atom::binary(Pred::Eq, Term::Var(x.clone()), rule.lhs.clone()),
        Atom::binary(Pred::Inner, Term::Var(x.clone()), Term::Var(x2.clone())),
    ];
    cond.extend(rule.cond.iter().cloned());
    ConditionalPair {
        left: rule.rhs.clone(),
        right: Term::Var(x2.clone()),
        cond,
        family: Family::DcpR,
        provenance: Provenance { first: rule.origin, second: None, position: Position::root(), var: None },
        improper: false,
        root: true,
        fresh: alloc::vec![x, x2],
        id: format!("{}:{}", Family::DcpR.id(), rule.origin),
    }
}

/// All pairs of a family, deduplicated, in a deterministic order.
pub fn generate_family(sys: &Egtrs, family: Family) -> Vec<ConditionalPair> {
    let rules = sys.rules_as(Flavor::Rm);
    let eboth = sys.eboth_as(Flavor::Rm);
    let mu = &sys.mu;
    let mut out = Vec::new();
    let rank = |o: Origin| rules.iter().position(|r| r.origin == o);
    match family {
        Family::CcpR | Family::LccpR => {
            for a in &rules {
                for p in a.lhs.active_nonvar_positions(mu) {
                    for b in &rules {
                        if p.is_root() && rank(b.origin) < rank(a.origin) {
                            continue;
                        }
                        if p.is_root() && a.origin == b.origin && a.properties(mu).two_rule {
                            continue;
                        }
                        let pair = if family == Family::CcpR {
                            ccp(a, &p, b, family)
                        } else {
                            lccp(a, &p, b, family, mu).ok()
                        };
                        out.extend(pair);
                    }
                }
            }
        }
        Family::CcpER => {
            for b in &eboth {
                for p in b.lhs.active_nonvar_positions(mu) {
                    for a in &rules {
                        out.extend(ccp(b, &p, a, family));
                    }
                }
            }
        }
        Family::CcpRE => {
            for a in &rules {
                for p in a.lhs.active_nonvar_positions(mu) {
                    for b in &eboth {
                        if b.lhs.is_var() {
                            out.extend(variable_ccp(a, &p, b, family));
                        } else if !p.is_root() {
                            out.extend(ccp(a, &p, b, family));
                        }
                    }
                }
            }
        }
        Family::LccpER => {
            for b in &eboth {
                for p in b.lhs.active_nonvar_positions(mu) {
                    for a in &rules {
                        out.extend(lccp(b, &p, a, family, mu).ok());
                    }
                }
            }
        }
        Family::DcpR => out.extend(rules.iter().map(dcp)),
        Family::CvpToR | Family::CvpEqR | Family::CvpPsR | Family::CvpToE | Family::CvpPsE => {
            let source = if matches!(family, Family::CvpToE | Family::CvpPsE) { &eboth } else { &rules };
            for rule in source {
                for p in rule.lhs.active_positions(mu) {
                    if let Term::Var(x) = rule.lhs.subterm(&p).expect("own position") {
                        out.extend(cvp(rule, x, &p, family, mu).ok());
                    }
                }
            }
        }
    }
    out
}

/// Every family, in the canonical family order.
pub fn generate_all(sys: &Egtrs) -> Vec<(Family, Vec<ConditionalPair>)> {
    Family::ALL.into_iter().map(|f| (f, generate_family(sys, f))).collect()
}
