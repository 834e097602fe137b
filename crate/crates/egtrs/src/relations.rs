//! One-step and many-step computational relations of the `rm` view:
//! plain rewriting, rewriting with E-matching, rewriting modulo E, inner
//! rewriting and single equational steps.
//!
//! Steps only happen at active positions, and rule conditions are proved
//! by the deduction engine under the current bounds.

use alloc::collections::BTreeSet;
use alloc::rc::Rc;
use alloc::vec::Vec;
use core::fmt;

use crate::deduction::{Engine, Truth};
use crate::system::{Origin, Rule};
use crate::terms::{match_with, Position, Subst, Term};

/// A computational relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    /// Rewriting with syntactic matching.
    R,
    /// Rewriting with E-matching of the redex.
    RE,
    /// Rewriting modulo E.
    RmodE,
    /// Rewriting below the root.
    Inner,
    /// One equational step in either direction.
    EqOne,
}

impl Rel {
    pub fn name(&self) -> &'static str {
        match self {
            Rel::R => "R",
            Rel::RE => "RE",
            Rel::RmodE => "RmodE",
            Rel::Inner => "Inner",
            Rel::EqOne => "EqOne",
        }
    }

    pub fn parse(s: &str) -> Option<Rel> {
        [Rel::R, Rel::RE, Rel::RmodE, Rel::Inner, Rel::EqOne].into_iter().find(|r| r.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One derivable step, with enough information to re-derive it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub source: Term,
    pub target: Term,
    pub rule: Origin,
    pub position: Position,
    /// The instance of the rule's variables, including condition variables.
    pub matcher: Subst,
    pub relation: Rel,
    /// For `RE`, the E-equal redex that matched; for `RmodE`, the E-equal
    /// term that was rewritten.
    pub via: Option<Term>,
}

/// The successors of a term under one relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSet {
    pub records: Vec<StepRecord>,
    /// No successor was cut off by the bounds.
    pub complete: bool,
}

impl StepSet {
    pub(crate) fn partial() -> StepSet {
        StepSet { records: Vec::new(), complete: false }
    }

    /// Distinct targets in discovery order.
    pub fn targets(&self) -> Vec<Term> {
        let mut seen = BTreeSet::new();
        self.records.iter().filter(|r| seen.insert(r.target.clone())).map(|r| r.target.clone()).collect()
    }

    fn push(&mut self, rec: StepRecord) {
        let dup =
            self.records.iter().any(|r| r.rule == rec.rule && r.position == rec.position && r.target == rec.target);
        if !dup {
            self.records.push(rec);
        }
    }
}

/// The terms reachable from a seed in zero or more steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachSet {
    /// Reached terms in breadth-first order; the seed comes first.
    pub nodes: Vec<Term>,
    /// For each node, the index of the node it was reached from.
    pub parents: Vec<Option<usize>>,
    /// No successor was cut off by the bounds.
    pub closed: bool,
    index: BTreeSet<Term>,
}

impl ReachSet {
    pub(crate) fn partial(seed: Term) -> ReachSet {
        ReachSet {
            nodes: alloc::vec![seed.clone()],
            parents: alloc::vec![None],
            closed: false,
            index: [seed].into_iter().collect(),
        }
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains(t)
    }

    /// The chain of nodes from the seed to `t`, if `t` was reached.
    pub fn path_to(&self, t: &Term) -> Option<Vec<Term>> {
        let mut k = self.nodes.iter().position(|n| n == t)?;
        let mut out = alloc::vec![self.nodes[k].clone()];
        while let Some(p) = self.parents[k] {
            out.push(self.nodes[p].clone());
            k = p;
        }
        out.reverse();
        Some(out)
    }
}

impl<'a> Engine<'a> {
    /// One-step successors under `rel` within the default depth.
    pub fn steps(&self, t: &Term, rel: Rel) -> Rc<StepSet> {
        self.steps_at(t, rel, self.bounds.max_depth)
    }

    pub fn step_r(&self, t: &Term) -> Rc<StepSet> {
        self.steps(t, Rel::R)
    }

    pub fn step_re(&self, t: &Term) -> Rc<StepSet> {
        self.steps(t, Rel::RE)
    }

    pub fn step_rmode(&self, t: &Term) -> Rc<StepSet> {
        self.steps(t, Rel::RmodE)
    }

    pub fn step_inner(&self, t: &Term) -> Rc<StepSet> {
        self.steps(t, Rel::Inner)
    }

    pub fn step_eq_one(&self, t: &Term) -> Rc<StepSet> {
        self.steps(t, Rel::EqOne)
    }

    pub(crate) fn steps_at(&self, t: &Term, rel: Rel, d: usize) -> Rc<StepSet> {
        self.steps_table((t.clone(), rel), d, || match rel {
            Rel::R => self.syntactic_steps(t, &self.rules, rel, false, d),
            Rel::Inner => self.syntactic_steps(t, &self.rules, rel, true, d),
            Rel::EqOne => self.syntactic_steps(t, &self.eboth, rel, false, d),
            Rel::RE => self.e_matching_steps(t, d),
            Rel::RmodE => self.modulo_steps(t, d),
        })
    }

    fn syntactic_steps(&self, t: &Term, rules: &[Rule], rel: Rel, inner: bool, d: usize) -> StepSet {
        let mut out = StepSet { records: Vec::new(), complete: true };
        for p in t.active_positions(&self.mu) {
            if inner && p.is_root() {
                continue;
            }
            let u = t.subterm(&p).expect("own position");
            for rule in rules {
                let lhs_vars = rule.lhs.var_set();
                let Some(sigma) = match_with(&rule.lhs, u, Subst::new(), &|x| lhs_vars.contains(x)) else {
                    continue;
                };
                self.apply_rule(t, &p, rule, &sigma, rel, None, d, &mut out);
            }
        }
        out
    }

    fn e_matching_steps(&self, t: &Term, d: usize) -> StepSet {
        let mut out = StepSet { records: Vec::new(), complete: true };
        for p in t.active_positions(&self.mu) {
            let u = t.subterm(&p).expect("own position");
            let class = self.class_at(u, d);
            out.complete &= class.closed;
            for rule in &self.rules {
                let lhs_vars = rule.lhs.var_set();
                for w in &class.members {
                    let Some(sigma) = match_with(&rule.lhs, w, Subst::new(), &|x| lhs_vars.contains(x)) else {
                        continue;
                    };
                    let via = (w != u).then(|| w.clone());
                    self.apply_rule(t, &p, rule, &sigma, Rel::RE, via, d, &mut out);
                }
            }
        }
        out
    }

    fn modulo_steps(&self, t: &Term, d: usize) -> StepSet {
        let class = self.class_at(t, d);
        let mut out = StepSet { records: Vec::new(), complete: class.closed };
        for u in &class.members {
            let steps = self.steps_at(u, Rel::R, d);
            out.complete &= steps.complete;
            for r in &steps.records {
                out.push(StepRecord {
                    source: t.clone(),
                    target: r.target.clone(),
                    rule: r.rule,
                    position: r.position.clone(),
                    matcher: r.matcher.clone(),
                    relation: Rel::RmodE,
                    via: (u != t).then(|| u.clone()),
                });
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn apply_rule(
        &self,
        t: &Term,
        p: &Position,
        rule: &Rule,
        sigma: &Subst,
        rel: Rel,
        via: Option<Term>,
        d: usize,
        out: &mut StepSet,
    ) {
        let (instances, complete) = self.rule_instances(rule, sigma, d);
        out.complete &= complete;
        for inst in instances {
            let contractum = inst.apply(&rule.rhs);
            let target = t.replace_at(p, contractum).expect("own position");
            if target.size() > self.bounds.max_term_size {
                out.complete = false;
                continue;
            }
            out.push(StepRecord {
                source: t.clone(),
                target,
                rule: rule.origin,
                position: p.clone(),
                matcher: inst,
                relation: rel,
                via: via.clone(),
            });
        }
    }

    /// Terms reachable from `t` in zero or more `rel` steps.
    pub fn reach_set(&self, t: &Term, rel: Rel) -> Rc<ReachSet> {
        self.reach_at(t, rel, self.bounds.max_depth)
    }

    pub(crate) fn reach_at(&self, t: &Term, rel: Rel, d: usize) -> Rc<ReachSet> {
        self.reach_table((t.clone(), rel), d, || {
            let mut set = ReachSet {
                nodes: alloc::vec![t.clone()],
                parents: alloc::vec![None],
                closed: true,
                index: [t.clone()].into_iter().collect(),
            };
            let mut i = 0;
            while i < set.nodes.len() {
                let u = set.nodes[i].clone();
                let steps = self.steps_at(&u, rel, d);
                set.closed &= steps.complete;
                for v in steps.targets() {
                    if set.index.contains(&v) {
                        continue;
                    }
                    if set.nodes.len() >= self.bounds.max_class_size {
                        set.closed = false;
                        return set;
                    }
                    set.index.insert(v.clone());
                    set.nodes.push(v);
                    set.parents.push(Some(i));
                }
                i += 1;
            }
            set
        })
    }

    /// Re-derives a recorded step from its rule, position and matcher.
    pub fn replay(&self, rec: &StepRecord) -> bool {
        let Some(rule) = self.rule(rec.rule) else {
            return false;
        };
        let stepped = match (&rec.relation, &rec.via) {
            (Rel::RmodE, Some(u)) => {
                if self.equal(&rec.source, u) != Truth::Proved {
                    return false;
                }
                u
            }
            _ => &rec.source,
        };
        if !stepped.active_positions(&self.mu).contains(&rec.position) {
            return false;
        }
        if rec.relation == Rel::Inner && rec.position.is_root() {
            return false;
        }
        let Some(redex) = stepped.subterm(&rec.position) else {
            return false;
        };
        let instance = rec.matcher.apply(&rule.lhs);
        let matched = match (&rec.relation, &rec.via) {
            (Rel::RE, Some(w)) => w == &instance && self.equal(redex, w) == Truth::Proved,
            _ => redex == &instance,
        };
        let conds = rule.cond.iter().all(|a| self.prove(&a.apply(&rec.matcher)) == Truth::Proved);
        let target = stepped.replace_at(&rec.position, rec.matcher.apply(&rule.rhs));
        matched && conds && target.as_ref() == Ok(&rec.target)
    }
}
