//! First-order Horn theories of a system, for external provers and model
//! finders.
//!
//! A theory is a list of universally quantified Horn sentences, each tagged
//! with the generic sentence it instantiates. Theories can be printed in a
//! plain, re-parsable text form or as TPTP first-order problems.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::system::{Atom, Egtrs, Flavor, HornClause, Pred, Rule};
use crate::terms::{sym, HasVars, Sym, Term};

/// The available theories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoryKind {
    /// Equality modulo the equations.
    E,
    /// Plain conditional rewriting.
    R,
    /// Rewriting with E-matching.
    RE,
    /// Rewriting modulo the equations.
    RmodE,
    /// The combined theory the deduction engine works in.
    CR,
    /// The combined theory with inner rewriting and single equational steps.
    CRExt,
}

impl TheoryKind {
    pub const ALL: [TheoryKind; 6] =
        [TheoryKind::E, TheoryKind::R, TheoryKind::RE, TheoryKind::RmodE, TheoryKind::CR, TheoryKind::CRExt];

    pub fn label(&self) -> &'static str {
        match self {
            TheoryKind::E => "Th-E",
            TheoryKind::R => "Th-R",
            TheoryKind::RE => "Th-RE",
            TheoryKind::RmodE => "Th-RmodE",
            TheoryKind::CR => "CR-theory",
            TheoryKind::CRExt => "CR-ext",
        }
    }

    /// Parses a label, ignoring case and dashes.
    pub fn parse(s: &str) -> Option<TheoryKind> {
        let norm =
            |x: &str| x.chars().filter(|c| *c != '-' && *c != '_').flat_map(char::to_lowercase).collect::<String>();
        let want = norm(s);
        TheoryKind::ALL.into_iter().find(|k| {
            let l = norm(k.label());
            l == want || l.strip_prefix("th").is_some_and(|r| r == want) || (want == "cr" && *k == TheoryKind::CR)
        })
    }
}

impl fmt::Display for TheoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The generic sentence a theory sentence instantiates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    /// Reflexivity.
    Rf(Pred),
    /// Transitivity.
    Tr(Pred),
    /// Symmetry.
    Sy(Pred),
    /// One step followed by many steps gives many steps.
    Co(Pred),
    /// Propagation of a step into the `i`-th argument of `f`.
    Pr(Pred, Sym, usize),
    /// A clause, equation or rule read as a Horn sentence.
    Hc(String),
    /// A root step with E-matching of a rule.
    Rl(String),
    /// Rewriting modulo from equality and one step.
    Rm,
    /// An inner step of a rule below `f` at argument `i`.
    Ir(Sym, usize, String),
    /// One step with an oriented equation, at the root.
    Eo(String),
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Rf(p) => write!(f, "(Rf)^{p}"),
            Tag::Tr(p) => write!(f, "(Tr)^{p}"),
            Tag::Sy(p) => write!(f, "(Sy)^{p}"),
            Tag::Co(p) => write!(f, "(Co)^{p}"),
            Tag::Pr(p, g, i) => write!(f, "(Pr)^{p}_{g},{i}"),
            Tag::Hc(l) => write!(f, "(HC)_{l}"),
            Tag::Rl(l) => write!(f, "(Rl)_{l}"),
            Tag::Rm => f.write_str("(Rm)"),
            Tag::Ir(g, i, l) => write!(f, "(IR)_{g},{i},{l}"),
            Tag::Eo(l) => write!(f, "(Eo)_{l}"),
        }
    }
}

/// A universally closed Horn sentence `body => head`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub tag: Tag,
    pub vars: Vec<Sym>,
    pub body: Vec<Atom>,
    pub head: Atom,
}

impl Sentence {
    fn new(tag: Tag, body: Vec<Atom>, head: Atom) -> Sentence {
        let mut vars = Vec::new();
        for a in body.iter().chain(core::iter::once(&head)) {
            a.args.iter().for_each(|t| t.push_vars(&mut vars));
        }
        Sentence { tag, vars, body, head }
    }
}

fn var(x: &str) -> Term {
    Term::var(x)
}

fn bin(p: &Pred, s: Term, t: Term) -> Atom {
    Atom::binary(p.clone(), s, t)
}

fn star(p: &Pred) -> Pred {
    match p {
        Pred::Rew(fl) => Pred::RewStar(*fl),
        other => other.clone(),
    }
}

fn rf(p: &Pred) -> Sentence {
    Sentence::new(Tag::Rf(p.clone()), Vec::new(), bin(p, var("x"), var("x")))
}

fn sy(p: &Pred) -> Sentence {
    Sentence::new(Tag::Sy(p.clone()), alloc::vec![bin(p, var("x"), var("y"))], bin(p, var("y"), var("x")))
}

fn tr(p: &Pred) -> Sentence {
    Sentence::new(
        Tag::Tr(p.clone()),
        alloc::vec![bin(p, var("x"), var("y")), bin(p, var("y"), var("z"))],
        bin(p, var("x"), var("z")),
    )
}

fn co(p: &Pred) -> Sentence {
    let s = star(p);
    Sentence::new(
        Tag::Co(p.clone()),
        alloc::vec![bin(p, var("x"), var("y")), bin(&s, var("y"), var("z"))],
        bin(&s, var("x"), var("z")),
    )
}

/// Argument variables `x1..xk` avoiding `avoid`.
fn arg_vars(k: usize, avoid: &BTreeSet<Sym>) -> Vec<Term> {
    (1..=k)
        .map(|j| {
            let mut name = format!("x{j}");
            while avoid.contains(&sym(&name)) {
                name.push('\'');
            }
            Term::var(&name)
        })
        .collect()
}

fn propagation(sys: &Egtrs, p: &Pred) -> Vec<Sentence> {
    let mut out = Vec::new();
    for (f, k) in &sys.sig.funs {
        for i in sys.mu.active_indices(f, *k) {
            let xs = arg_vars(*k, &BTreeSet::new());
            let yi = Term::var(&format!("y{i}"));
            let mut ys = xs.clone();
            ys[i - 1] = yi.clone();
            let mut vars: Vec<Sym> = xs.iter().filter_map(|x| x.as_var().cloned()).collect();
            vars.insert(i, sym(&format!("y{i}")));
            let mut s = Sentence::new(
                Tag::Pr(p.clone(), f.clone(), i),
                alloc::vec![bin(p, xs[i - 1].clone(), yi)],
                bin(p, Term::App(f.clone(), xs), Term::App(f.clone(), ys)),
            );
            s.vars = vars;
            out.push(s);
        }
    }
    out
}

fn equality(sys: &Egtrs) -> Vec<Sentence> {
    let mut out = alloc::vec![rf(&Pred::Eq), sy(&Pred::Eq), tr(&Pred::Eq)];
    out.extend(propagation(sys, &Pred::Eq));
    for (k, e) in sys.eqs.iter().enumerate() {
        out.push(Sentence::new(
            Tag::Hc(format!("e{}", k + 1)),
            e.cond.clone(),
            bin(&Pred::Eq, e.lhs.clone(), e.rhs.clone()),
        ));
    }
    out
}

fn clauses(horn: &[HornClause]) -> Vec<Sentence> {
    horn.iter()
        .enumerate()
        .map(|(k, h)| Sentence::new(Tag::Hc(format!("h{}", k + 1)), h.body.clone(), h.head.clone()))
        .collect()
}

fn rule_clauses(rules: &[Rule]) -> Vec<Sentence> {
    let rew = Pred::Rew(Flavor::Plain);
    rules
        .iter()
        .map(|r| Sentence::new(Tag::Hc(r.origin.to_string()), r.cond.clone(), bin(&rew, r.lhs.clone(), r.rhs.clone())))
        .collect()
}

fn plain_rewriting(sys: &Egtrs, rules: &[Rule]) -> Vec<Sentence> {
    let rew = Pred::Rew(Flavor::Plain);
    let mut out = alloc::vec![rf(&star(&rew)), co(&rew)];
    out.extend(propagation(sys, &rew));
    out.extend(rule_clauses(rules));
    out
}

fn fresh_for(rule: &Rule, base: &str) -> Term {
    let taken: BTreeSet<Sym> = rule.variables().into_iter().collect();
    let mut name = String::from(base);
    while taken.contains(&sym(&name)) {
        name.push('\'');
    }
    Term::var(&name)
}

fn ps_rewriting(sys: &Egtrs, rules: &[Rule]) -> Vec<Sentence> {
    let ps = Pred::Rew(Flavor::Ps);
    let mut out = alloc::vec![rf(&star(&ps)), co(&ps)];
    out.extend(propagation(sys, &ps));
    for r in rules {
        let x = fresh_for(r, "x");
        let mut body = alloc::vec![bin(&Pred::Eq, x.clone(), r.lhs.clone())];
        body.extend(r.cond.iter().cloned());
        out.push(Sentence::new(Tag::Rl(r.origin.to_string()), body, bin(&ps, x, r.rhs.clone())));
    }
    out
}

fn modulo_rewriting(sys: &Egtrs, rules: &[Rule]) -> Vec<Sentence> {
    let rm = Pred::Rew(Flavor::Rm);
    let rew = Pred::Rew(Flavor::Plain);
    let mut out = alloc::vec![rf(&star(&rm)), co(&rm)];
    out.extend(propagation(sys, &rew));
    out.extend(rule_clauses(rules));
    out.push(Sentence::new(
        Tag::Rm,
        alloc::vec![
            bin(&Pred::Eq, var("x"), var("x'")),
            bin(&rew, var("x'"), var("y'")),
            bin(&Pred::Eq, var("y'"), var("y")),
        ],
        bin(&rm, var("x"), var("y")),
    ));
    out
}

fn inner_rewriting(sys: &Egtrs, rules: &[Rule]) -> Vec<Sentence> {
    let inner = Pred::Inner;
    let mut out = Vec::new();
    for (f, k) in &sys.sig.funs {
        for i in sys.mu.active_indices(f, *k) {
            for r in rules {
                let avoid: BTreeSet<Sym> = r.variables().into_iter().collect();
                let xs = arg_vars(*k, &avoid);
                let (mut l, mut rr) = (xs.clone(), xs);
                l[i - 1] = r.lhs.clone();
                rr[i - 1] = r.rhs.clone();
                out.push(Sentence::new(
                    Tag::Ir(f.clone(), i, r.origin.to_string()),
                    r.cond.clone(),
                    bin(&inner, Term::App(f.clone(), l), Term::App(f.clone(), rr)),
                ));
            }
        }
    }
    out.extend(propagation(sys, &inner));
    out
}

fn equational_steps(sys: &Egtrs) -> Vec<Sentence> {
    let one = Pred::EqOne;
    let mut out: Vec<Sentence> = sys
        .eboth()
        .iter()
        .map(|b| Sentence::new(Tag::Eo(b.origin.to_string()), b.cond.clone(), bin(&one, b.lhs.clone(), b.rhs.clone())))
        .collect();
    out.extend(propagation(sys, &one));
    out
}

/// Assembles the sentences of a theory, without duplicates, in a fixed
/// order.
pub fn build_theory(sys: &Egtrs, kind: TheoryKind) -> Vec<Sentence> {
    let rm_rules = sys.rules_as(Flavor::Rm);
    let mut out = equality(sys);
    match kind {
        TheoryKind::E => out.extend(clauses(&sys.horn)),
        TheoryKind::R => {
            out.extend(plain_rewriting(sys, &sys.rules));
            out.extend(clauses(&sys.horn));
        }
        TheoryKind::RE => {
            out.extend(ps_rewriting(sys, &sys.rules_as(Flavor::Ps)));
            out.extend(clauses(&sys.horn_as(Flavor::Ps)));
        }
        TheoryKind::RmodE => {
            out.extend(modulo_rewriting(sys, &rm_rules));
            out.extend(clauses(&sys.horn_as(Flavor::Rm)));
        }
        TheoryKind::CR | TheoryKind::CRExt => {
            out.extend(plain_rewriting(sys, &rm_rules));
            out.extend(ps_rewriting(sys, &rm_rules));
            out.extend(modulo_rewriting(sys, &rm_rules));
            out.extend(clauses(&sys.horn_as(Flavor::Rm)));
            if kind == TheoryKind::CRExt {
                out.extend(inner_rewriting(sys, &rm_rules));
                out.extend(equational_steps(sys));
            }
        }
    }
    let mut seen: Vec<Sentence> = Vec::new();
    for s in out {
        if !seen.iter().any(|t| t.body == s.body && t.head == s.head) {
            seen.push(s);
        }
    }
    seen
}

/// Output formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// One sentence per line, `forall x, y. A & B => C`.
    Plain,
    /// TPTP first-order form.
    Tptp,
}

fn plain_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(x),
        Term::App(f, args) => {
            out.push_str(f);
            if !args.is_empty() {
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    plain_term(a, out);
                }
                out.push(')');
            }
        }
    }
}

fn plain_atom(a: &Atom, out: &mut String) {
    if a.pred.is_builtin() {
        plain_term(&a.args[0], out);
        out.push(' ');
        out.push_str(&a.pred.name());
        out.push(' ');
        plain_term(&a.args[1], out);
    } else {
        plain_term(&Term::App(sym(&a.pred.name()), a.args.clone()), out);
    }
}

fn plain_atoms(atoms: &[Atom], out: &mut String) {
    for (k, a) in atoms.iter().enumerate() {
        if k > 0 {
            out.push_str(" & ");
        }
        plain_atom(a, out);
    }
}

fn plain_sentence(s: &Sentence) -> String {
    let mut out = String::new();
    if !s.vars.is_empty() {
        out.push_str("forall ");
        out.push_str(&s.vars.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "));
        out.push_str(". ");
    }
    if !s.body.is_empty() {
        plain_atoms(&s.body, &mut out);
        out.push_str(" => ");
    }
    plain_atom(&s.head, &mut out);
    out
}

/// A TPTP-safe name: ASCII letters and digits kept, anything else escaped.
fn tptp_name(prefix: &str, name: &str) -> String {
    let mut out = String::from(prefix);
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c);
        } else {
            out.push_str(&format!("_{:x}_", c as u32));
        }
    }
    out
}

fn tptp_pred(p: &Pred) -> String {
    match p {
        Pred::Eq => "eq".into(),
        Pred::Rew(fl) => format!("rew{}", flavor_suffix(*fl)),
        Pred::RewStar(fl) => format!("rews{}", flavor_suffix(*fl)),
        Pred::Inner => "rewinner".into(),
        Pred::EqOne => "eqone".into(),
        Pred::User(name, fl) => format!("{}{}", tptp_name("p_", name), flavor_suffix(*fl)),
    }
}

fn flavor_suffix(fl: Flavor) -> &'static str {
    match fl {
        Flavor::Plain => "",
        Flavor::Ps => "_ps",
        Flavor::Rm => "_rm",
    }
}

struct TptpVars(Vec<Sym>);

impl TptpVars {
    fn name(&self, x: &Sym) -> String {
        let k = self.0.iter().position(|y| y == x).expect("quantified variable");
        format!("X{k}")
    }
}

fn tptp_term(t: &Term, vars: &TptpVars, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(&vars.name(x)),
        Term::App(f, args) => {
            out.push_str(&tptp_name("f_", f));
            if !args.is_empty() {
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    tptp_term(a, vars, out);
                }
                out.push(')');
            }
        }
    }
}

fn tptp_atom(a: &Atom, vars: &TptpVars, out: &mut String) {
    out.push_str(&tptp_pred(&a.pred));
    if !a.args.is_empty() {
        out.push('(');
        for (k, t) in a.args.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            tptp_term(t, vars, out);
        }
        out.push(')');
    }
}

fn tptp_formula(quant: &str, vars: &[Sym], body: &[Atom], head: Option<&Atom>) -> String {
    let names = TptpVars(vars.to_vec());
    let mut out = String::new();
    if !vars.is_empty() {
        out.push_str(quant);
        out.push('[');
        out.push_str(&vars.iter().map(|v| names.name(v)).collect::<Vec<_>>().join(","));
        out.push_str("]: ");
    }
    out.push('(');
    for (k, a) in body.iter().enumerate() {
        if k > 0 {
            out.push_str(" & ");
        }
        tptp_atom(a, &names, &mut out);
    }
    if let Some(h) = head {
        if !body.is_empty() {
            out.push_str(" => ");
        }
        tptp_atom(h, &names, &mut out);
    }
    out.push(')');
    out
}

/// Prints a theory, optionally followed by an existential goal.
///
/// In TPTP form the goal becomes a conjecture, so a model of the theory
/// together with the negated goal shows that the goal is unsatisfiable.
pub fn emit_theory(sentences: &[Sentence], format: Format, goal: Option<&[Atom]>) -> String {
    let mut out = String::new();
    for (k, s) in sentences.iter().enumerate() {
        match format {
            Format::Plain => out.push_str(&plain_sentence(s)),
            Format::Tptp => {
                let f = tptp_formula("!", &s.vars, &s.body, Some(&s.head));
                out.push_str(&format!("fof(ax{}, axiom, {}). % {}", k + 1, f, s.tag));
            }
        }
        out.push('\n');
    }
    if let Some(goal) = goal {
        let mut vars = Vec::new();
        for a in goal {
            a.args.iter().for_each(|t| t.push_vars(&mut vars));
        }
        match format {
            Format::Plain => {
                out.push_str("goal ");
                if !vars.is_empty() {
                    out.push_str("exists ");
                    out.push_str(&vars.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "));
                    out.push_str(". ");
                }
                plain_atoms(goal, &mut out);
            }
            Format::Tptp => out.push_str(&format!("fof(goal, conjecture, {}).", tptp_formula("?", &vars, goal, None))),
        }
        out.push('\n');
    }
    out
}

/// A plain-format line that could not be read back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for PlainParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        let special = matches!(c, '(' | ')' | ',');
        if c.is_whitespace() || special {
            if let Some(b) = start.take() {
                out.push(&s[b..i]);
            }
            if special {
                out.push(&s[i..i + 1]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(b) = start {
        out.push(&s[b..]);
    }
    out
}

struct Reader<'t> {
    toks: &'t [&'t str],
    pos: usize,
    vars: &'t BTreeSet<Sym>,
}

impl<'t> Reader<'t> {
    fn peek(&self) -> Option<&'t str> {
        self.toks.get(self.pos).copied()
    }

    fn term(&mut self) -> Result<Term, String> {
        let name = self.peek().ok_or("unexpected end of line")?;
        if matches!(name, "(" | ")" | ",") {
            return Err(format!("unexpected `{name}`"));
        }
        self.pos += 1;
        if self.peek() == Some("(") {
            self.pos += 1;
            let mut args = alloc::vec![self.term()?];
            loop {
                match self.peek() {
                    Some(",") => {
                        self.pos += 1;
                        args.push(self.term()?);
                    }
                    Some(")") => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err("expected `,` or `)`".into()),
                }
            }
            return Ok(Term::App(sym(name), args));
        }
        let s = sym(name);
        Ok(if self.vars.contains(&s) { Term::Var(s) } else { Term::App(s, Vec::new()) })
    }

    fn atom(&mut self) -> Result<Atom, String> {
        let first = self.term()?;
        match self.peek() {
            Some(op) if !matches!(op, "&" | "=>") => {
                let pred = Pred::parse(op);
                if !pred.is_builtin() {
                    return Err(format!("`{op}` is not an infix predicate"));
                }
                self.pos += 1;
                let second = self.term()?;
                Ok(Atom::binary(pred, first, second))
            }
            _ => match first {
                Term::App(p, args) => Ok(Atom::new(Pred::parse(&p), args)),
                Term::Var(x) => Err(format!("variable `{x}` used as an atom")),
            },
        }
    }

    fn atoms(&mut self) -> Result<Vec<Atom>, String> {
        let mut out = alloc::vec![self.atom()?];
        while self.peek() == Some("&") {
            self.pos += 1;
            out.push(self.atom()?);
        }
        Ok(out)
    }
}

/// A read-back sentence: its bound variables, premises and conclusion.
pub type PlainSentence = (Vec<Sym>, Vec<Atom>, Atom);

/// Reads back the plain format, one sentence per line. Tags are not part of
/// the format, so every sentence comes back tagged `(HC)_<line>`.
pub fn parse_plain(text: &str) -> Result<Vec<PlainSentence>, PlainParseError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("goal ") {
            continue;
        }
        let err = |message: String| PlainParseError { line: n + 1, message };
        let (vars, rest) = match line.strip_prefix("forall ") {
            Some(r) => {
                let (head, rest) = r.split_once(". ").ok_or_else(|| err("missing `. ` after the variables".into()))?;
                (head.split(',').map(|v| sym(v.trim())).collect::<Vec<_>>(), rest)
            }
            None => (Vec::new(), line),
        };
        let bound: BTreeSet<Sym> = vars.iter().cloned().collect();
        let toks = tokens(rest);
        let mut r = Reader { toks: &toks, pos: 0, vars: &bound };
        let first = r.atoms().map_err(err)?;
        let (body, head) = if r.peek() == Some("=>") {
            r.pos += 1;
            let head = r.atom().map_err(err)?;
            (first, head)
        } else if first.len() == 1 {
            (Vec::new(), first.into_iter().next().expect("one atom"))
        } else {
            return Err(err("a conjunction needs `=>` and a head".into()));
        };
        if r.pos != toks.len() {
            return Err(err(format!("trailing input `{}`", toks[r.pos..].join(" "))));
        }
        out.push((vars, body, head));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deduction::tests::{abcd, c, f, peak};
    use crate::pairs::tests::{huet, sum};
    use crate::system::Signature;
    use crate::terms::ReplacementMap;

    #[test]
    fn huet_modulo_theory_has_fourteen_sentences() {
        let th = build_theory(&huet(), TheoryKind::RmodE);
        assert_eq!(th.len(), 14);
        let tags: Vec<String> = th.iter().map(|s| s.tag.to_string()).collect();
        assert_eq!(
            tags,
            [
                "(Rf)^=",
                "(Sy)^=",
                "(Tr)^=",
                "(Pr)^=_f,1",
                "(Pr)^=_f,2",
                "(Pr)^=_g,1",
                "(HC)_e1",
                "(Rf)^->*rm",
                "(Co)^->rm",
                "(Pr)^->_f,1",
                "(Pr)^->_f,2",
                "(Pr)^->_g,1",
                "(HC)_r1",
                "(Rm)",
            ]
        );
        let text = emit_theory(&th, Format::Plain, None);
        assert!(text.contains("forall x, x', y', y. x = x' & x' -> y' & y' = y => x ->rm y\n"));
        assert!(text.contains("\na = b\n"));
    }

    #[test]
    fn peak_ps_theory_has_eleven_sentences() {
        let th = build_theory(&peak(), TheoryKind::RE);
        assert_eq!(th.len(), 11);
        let text = emit_theory(&th, Format::Plain, None);
        assert!(text.ends_with("forall x. x = c => x ->ps d\nforall x. x = b => x ->ps d\n"));
    }

    #[test]
    fn empty_system_has_only_closure_axioms() {
        let sys = Egtrs::new(Signature::default(), ReplacementMap::top(), alloc::vec![], alloc::vec![], alloc::vec![])
            .unwrap();
        let th = build_theory(&sys, TheoryKind::RmodE);
        assert_eq!(th.len(), 6);
        assert!(th.iter().all(|s| matches!(s.tag, Tag::Rf(_) | Tag::Sy(_) | Tag::Tr(_) | Tag::Co(_) | Tag::Rm)));
    }

    #[test]
    fn propagation_respects_the_replacement_map() {
        let th = build_theory(&sum(), TheoryKind::E);
        let prs: Vec<String> = th.iter().filter(|s| matches!(s.tag, Tag::Pr(..))).map(|s| s.tag.to_string()).collect();
        assert!(prs.contains(&"(Pr)^=_++,1".to_string()));
        assert!(!prs.contains(&"(Pr)^=_++,2".to_string()));
        assert!(!prs.iter().any(|p| p.contains("sum")));
    }

    #[test]
    fn every_rule_appears_once_per_theory() {
        let sys = abcd();
        for kind in TheoryKind::ALL {
            let th = build_theory(&sys, kind);
            for r in &sys.rules {
                let label = r.origin.to_string();
                let hc = th.iter().filter(|s| s.tag == Tag::Hc(label.clone())).count();
                let rl = th.iter().filter(|s| s.tag == Tag::Rl(label.clone())).count();
                match kind {
                    TheoryKind::E => assert_eq!((hc, rl), (0, 0)),
                    TheoryKind::R | TheoryKind::RmodE => assert_eq!((hc, rl), (1, 0)),
                    TheoryKind::RE => assert_eq!((hc, rl), (0, 1)),
                    TheoryKind::CR | TheoryKind::CRExt => assert_eq!((hc, rl), (1, 1)),
                }
            }
        }
    }

    #[test]
    fn plain_output_reparses() {
        for sys in [huet(), peak(), sum(), abcd()] {
            for kind in TheoryKind::ALL {
                let th = build_theory(&sys, kind);
                let back = parse_plain(&emit_theory(&th, Format::Plain, None)).unwrap();
                let orig: Vec<_> = th.iter().map(|s| (s.vars.clone(), s.body.clone(), s.head.clone())).collect();
                assert_eq!(back, orig, "{kind}");
            }
        }
    }

    #[test]
    fn tptp_goal_is_a_conjecture() {
        let th = build_theory(&peak(), TheoryKind::RE);
        let goal = [Atom::binary(Pred::Rew(Flavor::Ps), c("b"), f("f", alloc::vec![c("d")]))];
        let text = emit_theory(&th, Format::Tptp, Some(&goal));
        assert!(text.ends_with("fof(goal, conjecture, (rew_ps(f_b,f_f(f_d)))).\n"));
        assert!(text.contains("fof(ax10, axiom, ![X0]: (eq(X0,f_c) => rew_ps(X0,f_d))). % (Rl)_r1"));
    }

    #[test]
    fn kinds_parse() {
        assert_eq!(TheoryKind::parse("Th-RmodE"), Some(TheoryKind::RmodE));
        assert_eq!(TheoryKind::parse("rmode"), Some(TheoryKind::RmodE));
        assert_eq!(TheoryKind::parse("CR-theory"), Some(TheoryKind::CR));
        assert_eq!(TheoryKind::parse("cr"), Some(TheoryKind::CR));
        assert_eq!(TheoryKind::parse("cr-ext"), Some(TheoryKind::CRExt));
        assert_eq!(TheoryKind::parse("th-e"), Some(TheoryKind::E));
    }
}
