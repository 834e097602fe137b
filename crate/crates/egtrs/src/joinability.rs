//! Bounded joinability of terms and conditional pairs, with replayable
//! witnesses, non-joinability certificates and the syntactic criteria for
//! variable pairs.
//!
//! Free variables are treated as rigid constants throughout, so a witness
//! found for open terms holds for every instance of them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::deduction::{Engine, Feasibility, Truth};
use crate::pairs::{ConditionalPair, Family};
use crate::relations::Rel;
use crate::system::{Egtrs, Flavor, Origin, Rule};
use crate::terms::{Subst, Term};

/// Which sides of a joinability query must take at least one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strictness {
    None,
    Left,
    Right,
    Both,
}

impl Strictness {
    fn left(self) -> bool {
        matches!(self, Strictness::Left | Strictness::Both)
    }

    fn right(self) -> bool {
        matches!(self, Strictness::Right | Strictness::Both)
    }

    fn prefix(self) -> &'static str {
        match self {
            Strictness::None => "",
            Strictness::Left => "ls-",
            Strictness::Right => "rs-",
            Strictness::Both => "s-",
        }
    }
}

/// A joinability notion: the relation used on both sides, the strictness,
/// and whether the meeting terms need only be E-equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JoinMode {
    pub relation: Rel,
    pub strictness: Strictness,
    pub modulo_e: bool,
}

impl JoinMode {
    pub const fn new(relation: Rel, strictness: Strictness, modulo_e: bool) -> JoinMode {
        JoinMode { relation, strictness, modulo_e }
    }

    /// Joinability modulo E with `relation`, no strictness.
    pub const fn modulo(relation: Rel) -> JoinMode {
        JoinMode::new(relation, Strictness::None, true)
    }

    /// Parses `[s-|ls-|rs-][e-]REL` with `REL` one of `R`, `RE`, `RmodE`.
    pub fn parse(s: &str) -> Option<JoinMode> {
        let (strictness, rest) = [("ls-", Strictness::Left), ("rs-", Strictness::Right), ("s-", Strictness::Both)]
            .into_iter()
            .find_map(|(p, st)| s.strip_prefix(p).map(|r| (st, r)))
            .unwrap_or((Strictness::None, s));
        let (modulo_e, rel) = match rest.strip_prefix("e-") {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let relation = Rel::parse(rel).filter(|r| matches!(r, Rel::R | Rel::RE | Rel::RmodE))?;
        Some(JoinMode { relation, strictness, modulo_e })
    }

    /// Joinability in `self` entails joinability in `other`.
    pub fn implies(&self, other: &JoinMode) -> bool {
        self.relation <= other.relation
            && (self.strictness.left() || !other.strictness.left())
            && (self.strictness.right() || !other.strictness.right())
            && (!self.modulo_e || other.modulo_e)
    }
}

impl fmt::Display for JoinMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.strictness.prefix(), if self.modulo_e { "e-" } else { "" }, self.relation)
    }
}

/// Two reduction traces whose last terms are equal, or E-equal in modulo
/// modes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinWitness {
    pub left: Vec<Term>,
    pub right: Vec<Term>,
}

impl JoinWitness {
    pub fn left_end(&self) -> &Term {
        self.left.last().expect("non-empty trace")
    }

    pub fn right_end(&self) -> &Term {
        self.right.last().expect("non-empty trace")
    }
}

impl fmt::Display for JoinWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chain = |ts: &[Term]| ts.iter().map(|t| format!("{t}")).collect::<Vec<_>>().join(" -> ");
        write!(f, "{} ~ {}", chain(&self.left), chain(&self.right))
    }
}

/// Proof that two terms do not join: both reachable sets are closed, and
/// the E-classes of the left terms are closed and miss the right set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub left: Term,
    pub right: Term,
    pub left_reach: Vec<Term>,
    pub right_reach: Vec<Term>,
    /// The closed E-class of each left term, empty in syntactic modes.
    pub left_classes: Vec<Vec<Term>>,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |ts: &[Term]| ts.iter().map(|t| format!("{t}")).collect::<Vec<_>>().join(" ");
        write!(
            f,
            "reach({}) = {{{}}}, reach({}) = {{{}}}",
            self.left,
            set(&self.left_reach),
            self.right,
            set(&self.right_reach)
        )
    }
}

/// The outcome of a bounded joinability query on two terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JoinVerdict {
    Joinable(JoinWitness),
    NotJoinable(Certificate),
    Unknown,
}

/// A guarantee given by one of the syntactic criteria for variable pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Criterion {
    pub name: &'static str,
    pub mode: JoinMode,
}

/// Why a conditional pair is joinable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairEvidence {
    /// Both sides are the same term.
    Trivial,
    /// No substitution satisfies the condition.
    Infeasible(String),
    /// A syntactic criterion applies.
    Criterion(Criterion),
    /// The sides join without using the condition.
    Sides(JoinWitness),
    /// Every solution of the condition was enumerated and each instance joins.
    Instances(Vec<(Subst, JoinWitness)>),
    /// Asserted by the user.
    Annotation(Option<JoinMode>),
    /// Not needed, by a corollary on the shape of the rules.
    Waived(&'static str),
}

impl fmt::Display for PairEvidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairEvidence::Trivial => f.write_str("trivial"),
            PairEvidence::Infeasible(r) => write!(f, "infeasible ({r})"),
            PairEvidence::Criterion(c) => write!(f, "criterion {} gives {}", c.name, c.mode),
            PairEvidence::Sides(w) => write!(f, "joins unconditionally: {w}"),
            PairEvidence::Instances(ws) => {
                write!(f, "all {} condition solutions join", ws.len())?;
                for (s, w) in ws {
                    write!(f, "; {s}: {w}")?;
                }
                Ok(())
            }
            PairEvidence::Annotation(Some(m)) => write!(f, "annotation ({m})"),
            PairEvidence::Annotation(None) => f.write_str("annotation"),
            PairEvidence::Waived(why) => write!(f, "waived by {why}"),
        }
    }
}

/// The outcome of a joinability query on a conditional pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairJoin {
    Joinable(PairEvidence),
    /// The instance of the pair under `sigma` does not join.
    NotJoinable {
        sigma: Subst,
        certificate: Certificate,
    },
    Unknown(String),
}

impl PairJoin {
    pub fn is_joinable(&self) -> bool {
        matches!(self, PairJoin::Joinable(_))
    }
}

/// The terms reachable from a seed, with a trace to each.
struct Side {
    order: Vec<Term>,
    traces: BTreeMap<Term, Vec<Term>>,
    closed: bool,
}

impl Side {
    fn new() -> Side {
        Side { order: Vec::new(), traces: BTreeMap::new(), closed: true }
    }

    fn add(&mut self, t: Term, trace: Vec<Term>) {
        if !self.traces.contains_key(&t) {
            self.order.push(t.clone());
            self.traces.insert(t, trace);
        }
    }

    fn contains(&self, t: &Term) -> bool {
        self.traces.contains_key(t)
    }
}

fn side(engine: &Engine, t: &Term, rel: Rel, strict: bool) -> Side {
    let mut out = Side::new();
    if !strict {
        let reach = engine.reach_set(t, rel);
        out.closed = reach.closed;
        for n in &reach.nodes {
            out.add(n.clone(), reach.path_to(n).expect("reached"));
        }
        return out;
    }
    let steps = engine.steps(t, rel);
    out.closed = steps.complete;
    for v in steps.targets() {
        let reach = engine.reach_set(&v, rel);
        out.closed &= reach.closed;
        for n in &reach.nodes {
            let mut trace = alloc::vec![t.clone()];
            trace.extend(reach.path_to(n).expect("reached"));
            out.add(n.clone(), trace);
        }
    }
    out
}

/// Decides whether `s` and `t` join in `mode` within the engine's bounds.
pub fn join_terms(engine: &Engine, s: &Term, t: &Term, mode: JoinMode) -> JoinVerdict {
    let left = side(engine, s, mode.relation, mode.strictness.left());
    let right = side(engine, t, mode.relation, mode.strictness.right());
    let witness = |u: &Term, w: &Term| JoinWitness { left: left.traces[u].clone(), right: right.traces[w].clone() };
    for u in &left.order {
        if right.contains(u) {
            return JoinVerdict::Joinable(witness(u, u));
        }
    }
    let mut classes = Vec::new();
    let mut classes_closed = true;
    if mode.modulo_e {
        for u in &left.order {
            let class = engine.e_class(u);
            if let Some(w) = class.members.iter().find(|w| right.contains(w)) {
                return JoinVerdict::Joinable(witness(u, w));
            }
            classes_closed &= class.closed;
            classes.push(class.members.clone());
        }
        if !classes_closed && left.order.len() * right.order.len() <= 256 {
            for u in &left.order {
                for w in &right.order {
                    if engine.equal(u, w) == Truth::Proved {
                        return JoinVerdict::Joinable(witness(u, w));
                    }
                }
            }
        }
    }
    if left.closed && right.closed && classes_closed {
        JoinVerdict::NotJoinable(Certificate {
            left: s.clone(),
            right: t.clone(),
            left_reach: left.order,
            right_reach: right.order,
            left_classes: classes,
        })
    } else {
        JoinVerdict::Unknown
    }
}

/// Re-executes a witness step by step and re-proves the bridge.
pub fn verify_witness(engine: &Engine, s: &Term, t: &Term, mode: JoinMode, w: &JoinWitness) -> bool {
    let trace_ok = |trace: &[Term], seed: &Term, strict: bool| {
        trace.first() == Some(seed)
            && (!strict || trace.len() > 1)
            && trace.windows(2).all(|p| engine.steps(&p[0], mode.relation).targets().contains(&p[1]))
    };
    let bridge =
        w.left_end() == w.right_end() || (mode.modulo_e && engine.equal(w.left_end(), w.right_end()) == Truth::Proved);
    trace_ok(&w.left, s, mode.strictness.left()) && trace_ok(&w.right, t, mode.strictness.right()) && bridge
}

/// Re-derives a certificate under `engine` and checks that nothing new is
/// reachable, for instance with doubled bounds.
pub fn certificate_stable(engine: &Engine, c: &Certificate, mode: JoinMode) -> bool {
    match join_terms(engine, &c.left, &c.right, mode) {
        JoinVerdict::NotJoinable(again) => {
            let same = |a: &[Term], b: &[Term]| a.iter().collect::<BTreeSet<_>>() == b.iter().collect::<BTreeSet<_>>();
            same(&again.left_reach, &c.left_reach) && same(&again.right_reach, &c.right_reach)
        }
        _ => false,
    }
}

fn find_rule(sys: &Egtrs, origin: Origin) -> Option<Rule> {
    match origin {
        Origin::Rule(_) => sys.rules_as(Flavor::Rm).into_iter().find(|r| r.origin == origin),
        Origin::Eq(..) => sys.eboth_as(Flavor::Rm).into_iter().find(|r| r.origin == origin),
    }
}

/// The joinability a syntactic criterion guarantees for a variable pair,
/// or `None` when no criterion applies.
pub fn criterion_joinable(sys: &Egtrs, pair: &ConditionalPair) -> Option<Criterion> {
    if !pair.family.is_cvp() {
        return None;
    }
    let rule = find_rule(sys, pair.provenance.first)?;
    let x = pair.provenance.var.as_ref()?;
    let props = rule.properties(&sys.mu);
    if !(props.left_mu_homogeneous && props.mu_compatible) {
        return None;
    }
    let in_active_rhs = rule.rhs.active_vars(&sys.mu).contains(x);
    let repeated = rule.lhs.occurrences(x) > 1;
    let strict = |left: bool, right: bool| match (left, right) {
        (true, true) => Strictness::Both,
        (true, false) => Strictness::Left,
        (false, true) => Strictness::Right,
        (false, false) => Strictness::None,
    };
    let (name, mode) = match pair.family {
        Family::CvpToR => ("variable-rewriting", JoinMode::new(Rel::R, strict(true, in_active_rhs), false)),
        Family::CvpToE => {
            ("variable-coherence", JoinMode::new(Rel::R, strict(repeated, rule.rhs.var_set().contains(x)), true))
        }
        Family::CvpEqR if props.mu_left_linear => {
            ("variable-equational-linear", JoinMode::new(Rel::R, Strictness::Left, true))
        }
        Family::CvpEqR => ("variable-equational", JoinMode::new(Rel::RE, Strictness::Left, true)),
        Family::CvpPsR => ("variable-ps-rewriting", JoinMode::new(Rel::RE, strict(true, in_active_rhs), false)),
        Family::CvpPsE => ("variable-ps-coherence", JoinMode::new(Rel::RE, strict(repeated, in_active_rhs), true)),
        _ => return None,
    };
    Some(Criterion { name, mode })
}

/// Decides joinability of a conditional pair in `mode`.
///
/// A pair is only reported joinable on a universal argument: triviality,
/// infeasibility, a syntactic criterion, joinability of its sides as open
/// terms, or joinability of every instance when the solutions of the
/// condition were enumerated completely.
pub fn join_pair(engine: &Engine, pair: &ConditionalPair, mode: JoinMode) -> PairJoin {
    if mode.strictness == Strictness::None && pair.trivial() {
        return PairJoin::Joinable(PairEvidence::Trivial);
    }
    if let Feasibility::Infeasible(why) = engine.pair_feasibility(pair) {
        return PairJoin::Joinable(PairEvidence::Infeasible(why));
    }
    if let Some(c) = criterion_joinable(engine.system(), pair) {
        if c.mode.implies(&mode) {
            return PairJoin::Joinable(PairEvidence::Criterion(c));
        }
    }
    if let JoinVerdict::Joinable(w) = join_terms(engine, &pair.left, &pair.right, mode) {
        return PairJoin::Joinable(PairEvidence::Sides(w));
    }
    let sols = engine.witnesses(&pair.cond);
    let mut covered = sols.complete;
    let mut instances = Vec::new();
    for sigma in sols.substs {
        if !engine.replays(&pair.cond, &sigma) {
            covered = false;
            continue;
        }
        match join_terms(engine, &sigma.apply(&pair.left), &sigma.apply(&pair.right), mode) {
            JoinVerdict::Joinable(w) => instances.push((sigma, w)),
            JoinVerdict::NotJoinable(certificate) => return PairJoin::NotJoinable { sigma, certificate },
            JoinVerdict::Unknown => covered = false,
        }
    }
    if covered && !instances.is_empty() {
        PairJoin::Joinable(PairEvidence::Instances(instances))
    } else if covered {
        PairJoin::Joinable(PairEvidence::Infeasible("finite-closure".into()))
    } else {
        PairJoin::Unknown(format!("{} condition solutions checked, search incomplete", instances.len()))
    }
}
