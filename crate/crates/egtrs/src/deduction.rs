//! Bounded proof search over the first-order theory of a system: atom
//! provability, equality classes, condition solving and the syntactic
//! infeasibility criteria.
//!
//! All predicates are read in the `rm` view: rule conditions and Horn
//! clauses use rewriting modulo the equations. Every answer is three-valued
//! and only claims a refutation when the search space was exhausted.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::{Cell, RefCell};

use crate::pairs::{ConditionalPair, Family};
use crate::relations::{ReachSet, Rel, StepSet};
use crate::system::Atom;
use crate::system::{Egtrs, Flavor, HornClause, Origin, Pred, Rule};
use crate::terms::{match_with, sym, unify_all, unify_flex, HasVars, ReplacementMap, Subst, Sym, Term};

/// Search limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Nesting depth of condition proofs.
    pub max_depth: usize,
    /// Largest intermediate term, in nodes.
    pub max_term_size: usize,
    /// Largest equality class or reachability set.
    pub max_class_size: usize,
    /// Largest number of substitutions enumerated for one condition.
    pub max_solutions: usize,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds { max_depth: 8, max_term_size: 40, max_class_size: 64, max_solutions: 32 }
    }
}

/// Outcome of a bounded proof attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    Proved,
    /// The search space was exhausted without a proof.
    Refuted,
    Unknown,
}

/// A bounded equality class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    /// Members in discovery order; the first one is the seed.
    pub members: Vec<Term>,
    /// The enumeration stabilized within the bounds.
    pub closed: bool,
    index: BTreeSet<Term>,
}

impl Closure {
    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains(t)
    }

    /// The least member, a canonical representative when the class is closed.
    pub fn least(&self) -> &Term {
        self.index.iter().next().unwrap_or(&self.members[0])
    }
}

/// Substitutions solving a condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solutions {
    pub substs: Vec<Subst>,
    /// Every solution was enumerated.
    pub complete: bool,
}

/// Feasibility of a condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// Satisfied by the given substitution.
    Feasible(Subst),
    /// Provably unsatisfiable, with the name of the argument used.
    Infeasible(String),
    Unknown,
}

impl Feasibility {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Feasibility::Infeasible(_))
    }
}

/// A memo table split into depth-independent and depth-bounded results.
struct Table<K, V> {
    exact: BTreeMap<K, V>,
    bounded: BTreeMap<(K, usize), V>,
    active: BTreeSet<K>,
    /// Keys re-entered while active, so their computation must be iterated.
    heads: BTreeSet<K>,
    /// Best value known so far for an active key, returned on re-entry.
    provisional: BTreeMap<K, V>,
}

impl<K, V> Default for Table<K, V> {
    fn default() -> Self {
        Table {
            exact: BTreeMap::new(),
            bounded: BTreeMap::new(),
            active: BTreeSet::new(),
            heads: BTreeSet::new(),
            provisional: BTreeMap::new(),
        }
    }
}

/// How often a cyclic computation is re-run before its value is taken as is.
const FIXPOINT_ROUNDS: usize = 8;

#[derive(Default)]
struct Memo {
    atoms: Table<crate::system::Atom, Truth>,
    classes: Table<Term, Rc<Closure>>,
    steps: Table<(Term, Rel), Rc<StepSet>>,
    reach: Table<(Term, Rel), Rc<ReachSet>>,
}

/// Root symbols a term may have: any, or one of a finite set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Roots {
    Any,
    Of(BTreeSet<Sym>),
}

impl Roots {
    fn none() -> Roots {
        Roots::Of(BTreeSet::new())
    }

    fn one(f: &Sym) -> Roots {
        Roots::Of([f.clone()].into_iter().collect())
    }

    fn union(&mut self, other: &Roots) {
        match (&mut *self, other) {
            (Roots::Any, _) => {}
            (_, Roots::Any) => *self = Roots::Any,
            (Roots::Of(a), Roots::Of(b)) => a.extend(b.iter().cloned()),
        }
    }

    fn intersect(&self, other: &Roots) -> Roots {
        match (self, other) {
            (Roots::Any, o) | (o, Roots::Any) => o.clone(),
            (Roots::Of(a), Roots::Of(b)) => Roots::Of(a.intersection(b).cloned().collect()),
        }
    }

    fn is_empty(&self) -> bool {
        matches!(self, Roots::Of(s) if s.is_empty())
    }

    fn meets(&self, other: &Roots) -> bool {
        !self.intersect(other).is_empty()
    }
}

/// Static facts about the equations and rules used by the cheap criteria.
struct Shape {
    defined_e: BTreeSet<Sym>,
    /// Some equation has a variable side.
    e_collapsing: bool,
    e_edges: BTreeMap<Sym, Roots>,
    e_var_lhs_roots: Option<Roots>,
    r_edges: BTreeMap<Sym, Roots>,
    e_regular: bool,
    e_symbols: BTreeSet<Sym>,
}

/// A candidate binding produced for one condition atom, together with the
/// engine-internal variables it introduced.
struct Candidate {
    theta: Subst,
    fresh: Vec<Sym>,
}

/// The bounded deduction engine for one system.
///
/// The engine memoizes depth-independent facts across queries, so one
/// engine should be reused for all questions about a system.
pub struct Engine<'a> {
    pub(crate) sys: &'a Egtrs,
    pub(crate) mu: ReplacementMap,
    /// The rules with conditions in `rm` semantics.
    pub(crate) rules: Vec<Rule>,
    pub(crate) eboth: Vec<Rule>,
    /// The Horn clauses in `rm` semantics.
    pub(crate) horn: Vec<HornClause>,
    pub bounds: Bounds,
    shape: Shape,
    memo: RefCell<Memo>,
    depth_cut: Cell<bool>,
    cycle_cut: Cell<bool>,
    fresh: Cell<usize>,
}

impl<'a> Engine<'a> {
    pub fn new(sys: &'a Egtrs, bounds: Bounds) -> Engine<'a> {
        let rules = sys.rules_as(Flavor::Rm);
        let eboth = sys.eboth_as(Flavor::Rm);
        let horn = sys.horn_as(Flavor::Rm);
        let shape = Shape::of(sys, &rules, &eboth);
        Engine {
            sys,
            mu: sys.mu.clone(),
            rules,
            eboth,
            horn,
            bounds,
            shape,
            memo: RefCell::new(Memo::default()),
            depth_cut: Cell::new(false),
            cycle_cut: Cell::new(false),
            fresh: Cell::new(0),
        }
    }

    pub fn system(&self) -> &Egtrs {
        self.sys
    }

    /// The rule or oriented equation with the given origin, in `rm` view.
    pub fn rule(&self, origin: Origin) -> Option<&Rule> {
        self.rules.iter().chain(self.eboth.iter()).find(|r| r.origin == origin)
    }

    /// A fresh engine-internal variable.
    pub(crate) fn fresh_var(&self) -> Sym {
        let k = self.fresh.get() + 1;
        self.fresh.set(k);
        sym(&format!("%{k}"))
    }

    /// Renames `vars` to fresh internal variables.
    pub(crate) fn freshen(&self, vars: &[Sym]) -> (Subst, Vec<Sym>) {
        let mut rho = Subst::new();
        let mut news = Vec::new();
        for x in vars {
            let y = self.fresh_var();
            rho.insert(x.clone(), Term::Var(y.clone()));
            news.push(y);
        }
        (rho, news)
    }

    /// Runs `compute` under memoization and loop checking.
    /// Memoised evaluation. A key that is re-entered while being computed
    /// answers with its provisional value and is recomputed until stable.
    fn cached<K: Ord + Clone, V: Clone + PartialEq>(
        &self,
        table: fn(&mut Memo) -> &mut Table<K, V>,
        key: K,
        depth: usize,
        on_cycle: impl FnOnce() -> V,
        compute: impl Fn() -> V,
    ) -> V {
        {
            let mut memo = self.memo.borrow_mut();
            let t = table(&mut memo);
            if let Some(v) = t.exact.get(&key) {
                return v.clone();
            }
            if let Some(v) = t.bounded.get(&(key.clone(), depth)) {
                self.depth_cut.set(true);
                return v.clone();
            }
            if !t.active.insert(key.clone()) {
                self.cycle_cut.set(true);
                t.heads.insert(key.clone());
                return t.provisional.get(&key).cloned().unwrap_or_else(on_cycle);
            }
        }
        let saved_depth = self.depth_cut.replace(false);
        let saved_cycle = self.cycle_cut.replace(false);
        let mut depth_cut;
        let mut cycle_cut;
        let mut round = 0;
        let v = loop {
            self.depth_cut.set(false);
            self.cycle_cut.set(false);
            let v = compute();
            depth_cut = self.depth_cut.get();
            cycle_cut = self.cycle_cut.get();
            round += 1;
            let mut memo = self.memo.borrow_mut();
            let t = table(&mut memo);
            if !t.heads.remove(&key) {
                break v;
            }
            let stable = t.provisional.get(&key) == Some(&v);
            t.provisional.insert(key.clone(), v.clone());
            if stable || round >= FIXPOINT_ROUNDS {
                break v;
            }
        };
        self.depth_cut.set(saved_depth || depth_cut);
        self.cycle_cut.set(saved_cycle || cycle_cut);
        let mut memo = self.memo.borrow_mut();
        let t = table(&mut memo);
        t.active.remove(&key);
        t.provisional.remove(&key);
        if !cycle_cut {
            if depth_cut {
                t.bounded.insert((key, depth), v.clone());
            } else {
                t.exact.insert(key, v.clone());
            }
        }
        v
    }

    fn out_of_depth(&self) {
        self.depth_cut.set(true);
    }

    /// Proves a ground (or rigid) atom within the default depth.
    pub fn prove(&self, atom: &Atom) -> Truth {
        self.prove_at(atom, self.bounds.max_depth)
    }

    pub(crate) fn prove_at(&self, atom: &Atom, d: usize) -> Truth {
        if matches!(atom.pred, Pred::Eq | Pred::RewStar(_)) && atom.args[0] == atom.args[1] {
            return Truth::Proved;
        }
        self.cached(
            |m| &mut m.atoms,
            atom.clone(),
            d,
            || Truth::Unknown,
            || {
                if d == 0 {
                    self.out_of_depth();
                    return Truth::Unknown;
                }
                let (s, t) = (&atom.args.first(), &atom.args.get(1));
                match &atom.pred {
                    Pred::Eq => self.eq_at(s.unwrap(), t.unwrap(), d),
                    Pred::Rew(fl) => self.step_member(s.unwrap(), t.unwrap(), Rel::from_flavor(*fl), d),
                    Pred::Inner => self.step_member(s.unwrap(), t.unwrap(), Rel::Inner, d),
                    Pred::EqOne => self.step_member(s.unwrap(), t.unwrap(), Rel::EqOne, d),
                    Pred::RewStar(fl) => self.reach_member(s.unwrap(), t.unwrap(), Rel::from_flavor(*fl), d),
                    Pred::User(..) => {
                        let cands = self.user_candidates(atom, &BTreeSet::new(), d, 1);
                        if !cands.0.is_empty() {
                            Truth::Proved
                        } else if cands.1 {
                            Truth::Refuted
                        } else {
                            Truth::Unknown
                        }
                    }
                }
            },
        )
    }

    /// Bounded `s =E t`.
    pub fn equal(&self, s: &Term, t: &Term) -> Truth {
        self.eq_at(s, t, self.bounds.max_depth)
    }

    pub(crate) fn eq_at(&self, s: &Term, t: &Term, d: usize) -> Truth {
        if s == t {
            return Truth::Proved;
        }
        let cs = self.class_at(s, d);
        if cs.contains(t) {
            return Truth::Proved;
        }
        if cs.closed {
            return Truth::Refuted;
        }
        let ct = self.class_at(t, d);
        if ct.contains(s) {
            return Truth::Proved;
        }
        if ct.closed || !self.eq_possible(s, t, &|_| false, &BTreeMap::new()) {
            return Truth::Refuted;
        }
        Truth::Unknown
    }

    fn step_member(&self, s: &Term, t: &Term, rel: Rel, d: usize) -> Truth {
        let steps = self.steps_at(s, rel, d);
        if steps.records.iter().any(|r| &r.target == t) {
            return Truth::Proved;
        }
        let mut unknown = !steps.complete;
        if rel == Rel::RmodE {
            for target in steps.targets() {
                match self.eq_at(&target, t, d) {
                    Truth::Proved => return Truth::Proved,
                    Truth::Unknown => unknown = true,
                    Truth::Refuted => {}
                }
            }
        }
        if unknown {
            Truth::Unknown
        } else {
            Truth::Refuted
        }
    }

    fn reach_member(&self, s: &Term, t: &Term, rel: Rel, d: usize) -> Truth {
        let reach = self.reach_at(s, rel, d);
        if reach.contains(t) {
            return Truth::Proved;
        }
        let mut unknown = !reach.closed;
        if rel == Rel::RmodE {
            for node in reach.nodes.iter().skip(1) {
                match self.eq_at(node, t, d) {
                    Truth::Proved => return Truth::Proved,
                    Truth::Unknown => unknown = true,
                    Truth::Refuted => {}
                }
            }
        }
        if unknown {
            Truth::Unknown
        } else {
            Truth::Refuted
        }
    }

    /// The bounded equality class of `t` within the default depth.
    pub fn e_class(&self, t: &Term) -> Rc<Closure> {
        self.class_at(t, self.bounds.max_depth)
    }

    pub(crate) fn class_at(&self, t: &Term, d: usize) -> Rc<Closure> {
        let seed = t.clone();
        self.cached(
            |m| &mut m.classes,
            t.clone(),
            d,
            || Rc::new(Closure::partial(seed.clone())),
            || {
                let mut members = alloc::vec![t.clone()];
                let mut index: BTreeSet<Term> = members.iter().cloned().collect();
                let mut closed = true;
                let mut i = 0;
                'bfs: while i < members.len() {
                    let u = members[i].clone();
                    i += 1;
                    let steps = self.steps_at(&u, Rel::EqOne, d);
                    closed &= steps.complete;
                    for v in steps.targets() {
                        if index.contains(&v) {
                            continue;
                        }
                        if members.len() >= self.bounds.max_class_size {
                            closed = false;
                            break 'bfs;
                        }
                        index.insert(v.clone());
                        members.push(v);
                    }
                }
                Rc::new(Closure { members, closed, index })
            },
        )
    }

    /// Instances of `rule` whose left-hand side was matched with `sigma`:
    /// every extension of `sigma` satisfying the condition (or just one when
    /// the right-hand side is already determined).
    pub(crate) fn rule_instances(&self, rule: &Rule, sigma: &Subst, d: usize) -> (Vec<Subst>, bool) {
        let extra = rule.extra_vars();
        if rule.cond.is_empty() {
            return if extra.is_empty() { (alloc::vec![sigma.clone()], true) } else { (Vec::new(), false) };
        }
        if d == 0 {
            self.out_of_depth();
            return (Vec::new(), false);
        }
        let (rho, news) = self.freshen(&extra);
        let mut base = sigma.clone();
        for (x, t) in rho.iter() {
            base.insert(x.clone(), t.clone());
        }
        let cond: Vec<Atom> = rule.cond.iter().map(|a| a.apply(&base)).collect();
        let rhs = base.apply(&rule.rhs);
        let flex: BTreeSet<Sym> = news.iter().cloned().collect();
        let needs_all = rhs.has_var_where(&|x| flex.contains(x));
        let limit = if needs_all { self.bounds.max_solutions } else { 1 };
        let sols = self.solve_at(&cond, &flex, d - 1, limit);
        let mut out = Vec::new();
        let mut complete = sols.complete;
        for s in &sols.substs {
            let inst = base.then(s);
            let lhs_vars = inst.apply(&base.apply(&rule.lhs)).var_set();
            if needs_all && inst.apply(&rhs).has_var_where(&|x| !lhs_vars.contains(x)) {
                complete = false;
                continue;
            }
            out.push(inst);
        }
        if !needs_all && !out.is_empty() {
            complete = true;
        }
        (out, complete)
    }

    /// Solves a condition, treating the variables in `flex` as unknowns and
    /// all other variables as constants.
    pub fn solve(&self, cond: &[Atom], flex: &BTreeSet<Sym>) -> Solutions {
        self.solve_at(cond, flex, self.bounds.max_depth, self.bounds.max_solutions)
    }

    pub(crate) fn solve_at(&self, cond: &[Atom], flex: &BTreeSet<Sym>, d: usize, limit: usize) -> Solutions {
        let mut out = Vec::new();
        let complete = self.solve_rec(cond, &Subst::new(), flex, d, limit, &mut out);
        Solutions { substs: out, complete }
    }

    fn solve_rec(
        &self,
        goals: &[Atom],
        sigma: &Subst,
        flex: &BTreeSet<Sym>,
        d: usize,
        limit: usize,
        out: &mut Vec<Subst>,
    ) -> bool {
        if goals.is_empty() {
            if !out.contains(sigma) {
                out.push(sigma.clone());
            }
            return true;
        }
        let is_flex = |x: &Sym| flex.contains(x) && sigma.get(x).is_none();
        let instantiated: Vec<Atom> = goals.iter().map(|g| g.apply(sigma)).collect();
        let pick = (0..instantiated.len()).min_by_key(|&i| (rank(&instantiated[i], &is_flex), i)).unwrap_or(0);
        let goal = &instantiated[pick];
        let rest: Vec<Atom> = goals.iter().enumerate().filter(|(i, _)| *i != pick).map(|(_, g)| g.clone()).collect();
        let live: BTreeSet<Sym> = flex.iter().filter(|x| sigma.get(x).is_none()).cloned().collect();
        let (cands, mut complete) = self.candidates(goal, &live, d, limit);
        for cand in cands {
            if out.len() >= limit {
                return false;
            }
            let next = sigma.then(&cand.theta);
            let mut flex2 = flex.clone();
            flex2.extend(cand.fresh);
            complete &= self.solve_rec(&rest, &next, &flex2, d, limit, out);
        }
        complete
    }

    /// Candidate bindings for the flexible variables of one atom.
    fn candidates(&self, g: &Atom, flex: &BTreeSet<Sym>, d: usize, limit: usize) -> (Vec<Candidate>, bool) {
        let is_flex = |x: &Sym| flex.contains(x);
        let plain = |theta: Subst| Candidate { theta, fresh: Vec::new() };
        if !g.has_var_where(&is_flex) {
            return match self.prove_at(g, d) {
                Truth::Proved => (alloc::vec![plain(Subst::new())], true),
                Truth::Refuted => (Vec::new(), true),
                Truth::Unknown => (Vec::new(), false),
            };
        }
        let rigid = |t: &Term| !t.has_var_where(&is_flex);
        match &g.pred {
            Pred::Eq => {
                let (s, t) = (&g.args[0], &g.args[1]);
                let (anchor, pattern) = if rigid(s) {
                    (s, t)
                } else if rigid(t) {
                    (t, s)
                } else {
                    if !self.eq_possible(s, t, &is_flex, &BTreeMap::new()) {
                        return (Vec::new(), true);
                    }
                    let cands = unify_flex(s, t, &is_flex).map(plain).into_iter().collect();
                    return (cands, false);
                };
                let class = self.class_at(anchor, d);
                let mut out = Vec::new();
                for w in &class.members {
                    if let Some(theta) = match_with(pattern, w, Subst::new(), &is_flex) {
                        out.push(plain(theta));
                    }
                }
                (dedup(out), class.closed)
            }
            Pred::Rew(_) | Pred::Inner | Pred::EqOne => {
                let (s, t) = (&g.args[0], &g.args[1]);
                if !rigid(s) {
                    return (Vec::new(), false);
                }
                let rel = match &g.pred {
                    Pred::Rew(fl) => Rel::from_flavor(*fl),
                    Pred::Inner => Rel::Inner,
                    _ => Rel::EqOne,
                };
                let steps = self.steps_at(s, rel, d);
                let mut complete = steps.complete;
                let mut out = Vec::new();
                for target in steps.targets() {
                    if rel == Rel::RmodE {
                        let class = self.class_at(&target, d);
                        complete &= class.closed;
                        for w in &class.members {
                            out.extend(match_with(t, w, Subst::new(), &is_flex).map(plain));
                        }
                    } else {
                        out.extend(match_with(t, &target, Subst::new(), &is_flex).map(plain));
                    }
                }
                (dedup(out), complete)
            }
            Pred::RewStar(fl) => {
                let (s, t) = (&g.args[0], &g.args[1]);
                if !rigid(s) {
                    let cands = unify_flex(s, t, &is_flex).map(plain).into_iter().collect();
                    return (cands, false);
                }
                let rel = Rel::from_flavor(*fl);
                let reach = self.reach_at(s, rel, d);
                let mut complete = reach.closed;
                let mut out = Vec::new();
                for (k, node) in reach.nodes.iter().enumerate() {
                    out.extend(match_with(t, node, Subst::new(), &is_flex).map(plain));
                    if rel == Rel::RmodE && k > 0 {
                        let class = self.class_at(node, d);
                        complete &= class.closed;
                        for w in class.members.iter().skip(1) {
                            out.extend(match_with(t, w, Subst::new(), &is_flex).map(plain));
                        }
                    }
                }
                (dedup(out), complete)
            }
            Pred::User(..) => {
                let (cands, complete) = self.user_candidates(g, flex, d, limit);
                (cands, complete)
            }
        }
    }

    /// Horn-clause resolution for a user atom.
    fn user_candidates(&self, g: &Atom, flex: &BTreeSet<Sym>, d: usize, limit: usize) -> (Vec<Candidate>, bool) {
        if d == 0 {
            self.out_of_depth();
            return (Vec::new(), false);
        }
        let mut out: Vec<Candidate> = Vec::new();
        let mut complete = true;
        for clause in self.horn.iter().filter(|h| h.head.pred == g.pred) {
            let (rho, news) = self.freshen(&clause.variables());
            let clause = clause.substitute(&rho);
            let mut cflex = flex.clone();
            cflex.extend(news.iter().cloned());
            let eqs: Vec<(Term, Term)> = clause.head.args.iter().cloned().zip(g.args.iter().cloned()).collect();
            let Some(theta) = unify_all(&eqs, Subst::new(), &|x| cflex.contains(x)) else {
                continue;
            };
            let body: Vec<Atom> = clause.body.iter().map(|a| a.apply(&theta)).collect();
            let live: BTreeSet<Sym> = cflex.iter().filter(|x| theta.get(x).is_none()).cloned().collect();
            let sols = self.solve_at(&body, &live, d - 1, limit);
            complete &= sols.complete;
            for s in sols.substs {
                let full = theta.then(&s);
                let mut bound = Subst::new();
                for x in flex {
                    if let Some(t) = full.get(x) {
                        bound.insert(x.clone(), t.clone());
                    }
                }
                let mut fresh = Vec::new();
                for (_, t) in bound.iter() {
                    for y in t.vars() {
                        let unbound = news.contains(&y) || (y.starts_with('%') && !flex.contains(&y));
                        if unbound && !fresh.contains(&y) {
                            fresh.push(y);
                        }
                    }
                }
                if !out.iter().any(|c| c.theta == bound) {
                    out.push(Candidate { theta: bound, fresh });
                }
                if out.len() >= limit {
                    return (out, false);
                }
            }
        }
        (out, complete)
    }

    /// Decides feasibility of a condition whose variables are all unknowns.
    pub fn feasibility(&self, cond: &[Atom]) -> Feasibility {
        self.feasibility_with(cond, None)
    }

    /// Feasibility, also trying the root-symbol criteria for an LCCP.
    pub fn pair_feasibility(&self, pair: &ConditionalPair) -> Feasibility {
        self.feasibility_with(&pair.cond, Some(pair))
    }

    fn feasibility_with(&self, cond: &[Atom], pair: Option<&ConditionalPair>) -> Feasibility {
        if cond.is_empty() {
            return Feasibility::Feasible(Subst::new());
        }
        if cond.iter().any(|a| a.args.iter().all(Term::is_ground) && self.prove(a) == Truth::Refuted) {
            return Feasibility::Infeasible("finite-closure".into());
        }
        if let Some(p) = pair {
            if matches!(self.lccp_root_infeasibility(p), Ok(true)) {
                return Feasibility::Infeasible("root-symbol".into());
            }
        }
        if let Some(reason) = self.cheap_infeasibility(cond) {
            return Feasibility::Infeasible(reason);
        }
        let mut vars = Vec::new();
        for a in cond {
            a.args.iter().for_each(|t| t.push_vars(&mut vars));
        }
        let flex: BTreeSet<Sym> = vars.iter().cloned().collect();
        let sols = self.solve_at(cond, &flex, self.bounds.max_depth, 1);
        match sols.substs.into_iter().next() {
            Some(s) => Feasibility::Feasible(s.restrict(&flex)),
            None if sols.complete => Feasibility::Infeasible("finite-closure".into()),
            None => Feasibility::Unknown,
        }
    }

    /// Satisfying substitutions of a condition, up to the solution bound.
    pub fn witnesses(&self, cond: &[Atom]) -> Solutions {
        let mut vars = Vec::new();
        for a in cond {
            a.args.iter().for_each(|t| t.push_vars(&mut vars));
        }
        let flex: BTreeSet<Sym> = vars.into_iter().collect();
        let mut sols = self.solve(cond, &flex);
        sols.substs = sols.substs.iter().map(|s| s.restrict(&flex)).collect();
        sols
    }

    /// Re-proves every atom of `cond` under `sigma`.
    pub fn replays(&self, cond: &[Atom], sigma: &Subst) -> bool {
        cond.iter().all(|a| self.prove(&a.apply(sigma)) == Truth::Proved)
    }

    /// The registered syntactic criteria, tried before any search.
    fn cheap_infeasibility(&self, cond: &[Atom]) -> Option<String> {
        for a in cond {
            if let Pred::User(..) = a.pred {
                let flex: BTreeSet<Sym> = a.vars().into_iter().collect();
                let (cands, complete) = self.user_candidates(a, &flex, self.bounds.max_depth, 1);
                if cands.is_empty() && complete {
                    return Some("unsatisfiable-atom".into());
                }
            }
        }
        let env = self.root_constraints(cond);
        let all_flex = |_: &Sym| true;
        for a in cond {
            if !self.atom_possible(a, &all_flex, &env, 2) {
                return Some(match a.pred {
                    Pred::Eq => "decomposition".into(),
                    _ => "root-reachability".into(),
                });
            }
        }
        if self.alien_symbol_infeasible(cond) {
            return Some("alien-symbol".into());
        }
        None
    }

    /// Root constraints on variables implied by user atoms and equalities
    /// with non-variable terms.
    fn root_constraints(&self, cond: &[Atom]) -> BTreeMap<Sym, Roots> {
        let mut env: BTreeMap<Sym, Roots> = BTreeMap::new();
        let mut restrict = |x: &Sym, r: Roots| {
            let cur = env.remove(x).unwrap_or(Roots::Any);
            env.insert(x.clone(), cur.intersect(&r));
        };
        for a in cond {
            match &a.pred {
                Pred::User(..) => {
                    for (i, t) in a.args.iter().enumerate() {
                        if let Term::Var(x) = t {
                            restrict(x, self.head_roots(&a.pred, i));
                        }
                    }
                }
                Pred::Eq => {
                    for (s, t) in [(&a.args[0], &a.args[1]), (&a.args[1], &a.args[0])] {
                        if let (Term::Var(x), Some(f)) = (s, t.root()) {
                            restrict(x, self.shape.e_reach(&Roots::one(f)));
                        }
                    }
                }
                _ => {}
            }
        }
        env
    }

    fn head_roots(&self, pred: &Pred, i: usize) -> Roots {
        let mut out = Roots::none();
        for h in self.horn.iter().filter(|h| &h.head.pred == pred) {
            match h.head.args[i].root() {
                Some(f) => out.union(&Roots::one(f)),
                None => out.union(&Roots::Any),
            }
        }
        out
    }

    fn term_roots(&self, t: &Term, is_flex: &dyn Fn(&Sym) -> bool, env: &BTreeMap<Sym, Roots>) -> Roots {
        match t {
            Term::App(f, _) => Roots::one(f),
            Term::Var(x) if is_flex(x) => env.get(x).cloned().unwrap_or(Roots::Any),
            Term::Var(x) => Roots::one(&rigid_marker(x)),
        }
    }

    /// An over-approximation of whether `s =E t` can hold for some instance
    /// of the flexible variables.
    pub(crate) fn eq_possible(
        &self,
        s: &Term,
        t: &Term,
        is_flex: &dyn Fn(&Sym) -> bool,
        env: &BTreeMap<Sym, Roots>,
    ) -> bool {
        let rs = self.term_roots(s, is_flex, env);
        let rt = self.term_roots(t, is_flex, env);
        if !self.shape.e_reach(&rs).meets(&rt) {
            return false;
        }
        if self.shape.e_collapsing {
            return true;
        }
        match (s, t) {
            (Term::App(f, xs), Term::App(g, ys)) if f == g && !self.shape.defined_e.contains(f) => {
                xs.iter().zip(ys).enumerate().all(|(i, (a, b))| {
                    if self.mu.is_active(f, i + 1) {
                        self.eq_possible(a, b, is_flex, env)
                    } else {
                        unify_flex(a, b, is_flex).is_some()
                    }
                })
            }
            _ => true,
        }
    }

    /// An over-approximation of satisfiability of one atom.
    fn atom_possible(&self, a: &Atom, is_flex: &dyn Fn(&Sym) -> bool, env: &BTreeMap<Sym, Roots>, fuel: usize) -> bool {
        match &a.pred {
            Pred::Eq => self.eq_possible(&a.args[0], &a.args[1], is_flex, env),
            Pred::EqOne => {
                let rs = self.term_roots(&a.args[0], is_flex, env);
                self.shape.e_reach(&rs).meets(&self.term_roots(&a.args[1], is_flex, env))
            }
            Pred::Inner => self.term_roots(&a.args[0], is_flex, env).meets(&self.term_roots(&a.args[1], is_flex, env)),
            Pred::Rew(_) | Pred::RewStar(_) => {
                let rs = self.term_roots(&a.args[0], is_flex, env);
                self.shape.re_reach(&rs).meets(&self.term_roots(&a.args[1], is_flex, env))
            }
            Pred::User(..) => {
                if fuel == 0 {
                    return true;
                }
                for clause in self.horn.iter().filter(|h| h.head.pred == a.pred) {
                    let (rho, news) = self.freshen(&clause.variables());
                    let clause = clause.substitute(&rho);
                    let cflex = |x: &Sym| news.contains(x) || is_flex(x);
                    let eqs: Vec<(Term, Term)> = clause.head.args.iter().cloned().zip(a.args.iter().cloned()).collect();
                    let Some(theta) = unify_all(&eqs, Subst::new(), &cflex) else {
                        continue;
                    };
                    let mut env2 = env.clone();
                    let mut ok = true;
                    for (x, r) in env {
                        if let Some(bound) = theta.get(x) {
                            match bound {
                                Term::App(f, _) => ok &= r.meets(&Roots::one(f)),
                                Term::Var(y) => {
                                    env2.insert(y.clone(), r.clone());
                                }
                            }
                        }
                    }
                    for (x, t) in theta.iter() {
                        if let (true, Term::Var(y)) = (news.contains(x), t) {
                            if let Some(r) = env.get(y) {
                                env2.insert(x.clone(), r.clone());
                            }
                        }
                    }
                    if ok && clause.body.iter().all(|b| self.atom_possible(&b.apply(&theta), &cflex, &env2, fuel - 1)) {
                        return true;
                    }
                }
                false
            }
        }
    }

    /// With regular equations, symbols that occur in no equation are
    /// preserved by equality steps. A step atom `x -> y` then needs a rule
    /// whose root already occurs in the value of `x`.
    fn alien_symbol_infeasible(&self, cond: &[Atom]) -> bool {
        if !self.shape.e_regular {
            return false;
        }
        let alien = |t: &Term| -> BTreeSet<Sym> {
            t.symbols().into_iter().filter(|f| !self.shape.e_symbols.contains(f)).collect()
        };
        let mut present: BTreeMap<Sym, BTreeSet<Sym>> = BTreeMap::new();
        for a in cond {
            if a.pred == Pred::Eq {
                for (s, t) in [(&a.args[0], &a.args[1]), (&a.args[1], &a.args[0])] {
                    if let (Term::Var(x), true) = (s, t.is_ground()) {
                        present.insert(x.clone(), alien(t));
                    }
                }
            }
        }
        let rule_roots: Vec<&Sym> = self.rules.iter().filter_map(|r| r.lhs.root()).collect();
        cond.iter().any(|a| {
            let one_step = matches!(a.pred, Pred::Rew(_) | Pred::Inner);
            match (&a.args[0], one_step) {
                (Term::Var(x), true) => present
                    .get(x)
                    .is_some_and(|p| rule_roots.iter().all(|f| !self.shape.e_symbols.contains(*f) && !p.contains(*f))),
                _ => false,
            }
        })
    }

    /// The two root-symbol criteria for logic-based critical pairs.
    /// Returns `Ok(true)` when the pair is infeasible by them.
    pub fn lccp_root_infeasibility(&self, pair: &ConditionalPair) -> Result<bool, WrongFamily> {
        let (Some(first), Some(second)) =
            (self.rule(pair.provenance.first), pair.provenance.second.and_then(|o| self.rule(o)))
        else {
            return Err(WrongFamily);
        };
        let sub_root = first.lhs.subterm(&pair.provenance.position).and_then(Term::root);
        let other_root = second.lhs.root();
        let (Some(u), Some(v)) = (sub_root, other_root) else {
            return Ok(false);
        };
        let d = &self.shape.defined_e;
        match pair.family {
            Family::LccpR => Ok(!d.contains(u) && u != v && (!self.shape.e_collapsing || !d.contains(v))),
            Family::LccpER => Ok(!self.shape.e_collapsing && !d.contains(v) && u != v),
            _ => Err(WrongFamily),
        }
    }
}

/// The root-symbol criteria only apply to logic-based critical pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WrongFamily;

impl Closure {
    fn partial(t: Term) -> Closure {
        Closure { members: alloc::vec![t.clone()], closed: false, index: [t].into_iter().collect() }
    }
}

impl Shape {
    fn of(sys: &Egtrs, rules: &[Rule], eboth: &[Rule]) -> Shape {
        let mut e_edges: BTreeMap<Sym, Roots> = BTreeMap::new();
        let mut e_var_lhs_roots: Option<Roots> = None;
        let target = |r: &Rule| r.rhs.root().map_or(Roots::Any, Roots::one);
        for b in eboth {
            match b.lhs.root() {
                Some(f) => e_edges.entry(f.clone()).or_insert_with(Roots::none).union(&target(b)),
                None => e_var_lhs_roots.get_or_insert_with(Roots::none).union(&target(b)),
            }
        }
        let mut r_edges: BTreeMap<Sym, Roots> = BTreeMap::new();
        for r in rules {
            if let Some(f) = r.lhs.root() {
                r_edges.entry(f.clone()).or_insert_with(Roots::none).union(&target(r));
            }
        }
        let mut e_symbols = BTreeSet::new();
        for e in &sys.eqs {
            e.lhs.push_symbols(&mut e_symbols);
            e.rhs.push_symbols(&mut e_symbols);
        }
        Shape {
            defined_e: Egtrs::defined_symbols(eboth),
            e_collapsing: eboth.iter().any(|b| b.rhs.is_var()),
            e_edges,
            e_var_lhs_roots,
            r_edges,
            e_regular: sys.eqs.iter().all(|e| e.lhs.var_set() == e.rhs.var_set()),
            e_symbols,
        }
    }

    fn closure(&self, start: &Roots, with_rules: bool) -> Roots {
        let Roots::Of(set) = start else {
            return Roots::Any;
        };
        if set.is_empty() {
            return start.clone();
        }
        let mut seen = set.clone();
        let mut todo: Vec<Sym> = set.iter().cloned().collect();
        let mut any = false;
        let push = |r: &Roots, seen: &mut BTreeSet<Sym>, todo: &mut Vec<Sym>, any: &mut bool| match r {
            Roots::Any => *any = true,
            Roots::Of(s) => {
                for f in s {
                    if seen.insert(f.clone()) {
                        todo.push(f.clone());
                    }
                }
            }
        };
        if let Some(r) = &self.e_var_lhs_roots {
            push(r, &mut seen, &mut todo, &mut any);
        }
        while let Some(f) = todo.pop() {
            if let Some(r) = self.e_edges.get(&f) {
                push(r, &mut seen, &mut todo, &mut any);
            }
            if with_rules {
                if let Some(r) = self.r_edges.get(&f) {
                    push(r, &mut seen, &mut todo, &mut any);
                }
            }
            if any {
                return Roots::Any;
            }
        }
        Roots::Of(seen)
    }

    fn e_reach(&self, start: &Roots) -> Roots {
        self.closure(start, false)
    }

    fn re_reach(&self, start: &Roots) -> Roots {
        self.closure(start, true)
    }
}

/// A pseudo root symbol standing for a rigid variable.
fn rigid_marker(x: &Sym) -> Sym {
    sym(&format!("$var:{x}"))
}

/// Goal selection order: closed atoms first, then atoms anchored by a
/// closed argument, then Horn atoms, then the rest.
fn rank(g: &Atom, is_flex: &dyn Fn(&Sym) -> bool) -> u8 {
    if !g.has_var_where(is_flex) {
        return 0;
    }
    let closed = |t: &Term| !t.has_var_where(is_flex);
    match &g.pred {
        Pred::Eq if closed(&g.args[0]) || closed(&g.args[1]) => 1,
        Pred::Rew(_) | Pred::RewStar(_) | Pred::Inner | Pred::EqOne if closed(&g.args[0]) => 2,
        Pred::User(..) => 3,
        Pred::RewStar(_) | Pred::Eq => 4,
        _ => 5,
    }
}

fn dedup(cands: Vec<Candidate>) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    for c in cands {
        if !out.iter().any(|o| o.theta == c.theta) {
            out.push(c);
        }
    }
    out
}

impl Rel {
    pub(crate) fn from_flavor(fl: Flavor) -> Rel {
        match fl {
            Flavor::Plain => Rel::R,
            Flavor::Ps => Rel::RE,
            Flavor::Rm => Rel::RmodE,
        }
    }
}

impl<'a> Engine<'a> {
    pub(crate) fn steps_table(&self, key: (Term, Rel), d: usize, compute: impl Fn() -> StepSet) -> Rc<StepSet> {
        self.cached(|m| &mut m.steps, key, d, || Rc::new(StepSet::partial()), || Rc::new(compute()))
    }

    pub(crate) fn reach_table(&self, key: (Term, Rel), d: usize, compute: impl Fn() -> ReachSet) -> Rc<ReachSet> {
        let seed = key.0.clone();
        self.cached(|m| &mut m.reach, key, d, || Rc::new(ReachSet::partial(seed)), || Rc::new(compute()))
    }
}
