//! Problem files: reading an EGTRS from s-expressions and printing it back.
//!
//! A problem is a sequence of sections, each at most once and in any order:
//!
//! ```text
//! (SIG (f 2) (a 0))          function symbols with arities
//! (RMAP (f 1))               active argument indices; absent symbols are fully active
//! (PRED (P 1))               user predicates with arities
//! (EQS (= l r) (=> (= l r) atom ...))
//! (HORN (P t) (=> (P t) atom ...))
//! (RULES (-> l r) (=> (-> l r) atom ...))
//! ```
//!
//! A bare atom that is not a declared function symbol is a variable.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use egtrs::system::{check_identifier, Signature, BUILTIN_SPELLINGS};
use egtrs::{Atom, Egtrs, Equation, HornClause, Pred, ReplacementMap, Sym, Term};

use crate::sexpr::{read_all, Loc, ReadError, Sexp};

/// The section names, in printing order.
pub const SECTIONS: [&str; 6] = ["SIG", "RMAP", "PRED", "EQS", "HORN", "RULES"];

/// A located problem-file error.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{loc}: {message}")]
pub struct ParseError {
    pub loc: Loc,
    pub message: String,
}

impl From<ReadError> for ParseError {
    fn from(e: ReadError) -> ParseError {
        ParseError { loc: e.loc, message: e.message }
    }
}

fn err<T>(loc: Loc, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { loc, message: message.into() })
}

/// Declarations that terms and atoms are checked against.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub sig: Signature,
}

impl Scope {
    pub fn of(sys: &Egtrs) -> Scope {
        Scope { sig: sys.sig.clone() }
    }

    /// Reads a term, treating undeclared bare names as variables.
    pub fn term(&self, x: &Sexp) -> Result<Term, ParseError> {
        match x {
            Sexp::Atom(name, loc) => match self.sig.fun_arity(name) {
                Some(0) => Ok(Term::constant(name)),
                Some(n) => err(*loc, format!("`{name}` expects {n} arguments but got 0")),
                None => {
                    if self.sig.pred_arity(name).is_some() {
                        return err(*loc, format!("predicate `{name}` used as a term"));
                    }
                    check_identifier(name).or_else(|_| err(*loc, format!("`{name}` is not a valid variable name")))?;
                    Ok(Term::var(name))
                }
            },
            Sexp::List(items, loc) => {
                let Some((f, args)) = items.split_first() else {
                    return err(*loc, "empty term");
                };
                let Some(name) = f.as_atom() else {
                    return err(f.loc(), "expected a function symbol");
                };
                let Some(arity) = self.sig.fun_arity(name) else {
                    return err(f.loc(), format!("function symbol `{name}` is not declared"));
                };
                if arity != args.len() {
                    return err(*loc, format!("`{name}` expects {arity} arguments but got {}", args.len()));
                }
                Ok(Term::app(name, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?))
            }
        }
    }

    /// Reads an atom. Input atoms use `=`, `->`, `->*` or declared
    /// predicates; `extended` also admits the other built-in spellings.
    pub fn atom(&self, x: &Sexp, extended: bool) -> Result<Atom, ParseError> {
        let Some(items) = x.as_list() else {
            return err(x.loc(), "expected an atom `(P t ...)`");
        };
        let Some((p, args)) = items.split_first() else {
            return err(x.loc(), "empty atom");
        };
        let Some(name) = p.as_atom() else {
            return err(p.loc(), "expected a predicate symbol");
        };
        let (pred, arity) = if BUILTIN_SPELLINGS.contains(&name) {
            if !extended && !matches!(name, "=" | "->" | "->*") {
                return err(p.loc(), format!("predicate `{name}` cannot appear in input"));
            }
            (Pred::parse(name), 2)
        } else if let Some(n) = self.sig.pred_arity(name) {
            (Pred::parse(name), n)
        } else if extended && (name.ends_with("#rm") || name.ends_with("#ps")) {
            let base = &name[..name.len() - 3];
            match self.sig.pred_arity(base) {
                Some(n) => (Pred::parse(name), n),
                None => return err(p.loc(), format!("predicate `{base}` is not declared")),
            }
        } else {
            return err(p.loc(), format!("predicate `{name}` is not declared"));
        };
        if args.len() != arity {
            return err(x.loc(), format!("`{name}` expects {arity} arguments but got {}", args.len()));
        }
        Ok(Atom::new(pred, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?))
    }

    fn atoms(&self, xs: &[Sexp]) -> Result<Vec<Atom>, ParseError> {
        xs.iter().map(|a| self.atom(a, false)).collect()
    }

    /// Reads `(op l r)` or `(=> (op l r) atom ...)`.
    fn conditional(&self, x: &Sexp, op: &str) -> Result<(Term, Term, Vec<Atom>, Loc), ParseError> {
        let (core, cond) = match x.head() {
            Some("=>") => {
                let items = x.as_list().expect("list");
                if items.len() < 2 {
                    return err(x.loc(), format!("expected `(=> ({op} l r) atom ...)`"));
                }
                (&items[1], self.atoms(&items[2..])?)
            }
            _ => (x, Vec::new()),
        };
        match core.as_list() {
            Some([o, l, r]) if o.as_atom() == Some(op) => Ok((self.term(l)?, self.term(r)?, cond, core.loc())),
            _ => err(core.loc(), format!("expected `({op} l r)`")),
        }
    }
}

fn declarations(section: &Sexp, what: &str) -> Result<Vec<(String, usize, Loc)>, ParseError> {
    let items = section.as_list().expect("section list");
    items[1..]
        .iter()
        .map(|d| match d.as_list() {
            Some([Sexp::Atom(name, loc), Sexp::Atom(n, nloc)]) => match n.parse::<usize>() {
                Ok(n) => Ok((name.clone(), n, *loc)),
                Err(_) => err(*nloc, format!("expected an arity, found `{n}`")),
            },
            _ => err(d.loc(), format!("expected a {what} declaration `(name arity)`")),
        })
        .collect()
}

/// Parses a problem file into a validated system.
pub fn parse_problem(text: &str) -> Result<Egtrs, ParseError> {
    let top = read_all(text)?;
    let mut sections: [Option<&Sexp>; 6] = Default::default();
    for x in &top {
        let Some(name) = x.head() else {
            return err(x.loc(), "expected a section `(NAME ...)`");
        };
        let Some(k) = SECTIONS.iter().position(|s| *s == name) else {
            return err(x.loc(), format!("unknown section `{name}`"));
        };
        if sections[k].is_some() {
            return err(x.loc(), format!("section `{name}` appears twice"));
        }
        sections[k] = Some(x);
    }
    let body = |k: usize| sections[k].map(|s| &s.as_list().expect("list")[1..]).unwrap_or(&[]);

    let mut scope = Scope::default();
    let mut seen = BTreeSet::new();
    for (k, what) in [(0, "function"), (2, "predicate")] {
        let Some(section) = sections[k] else { continue };
        for (name, arity, loc) in declarations(section, what)? {
            check_identifier(&name).or_else(|_| err(loc, format!("`{name}` is a reserved name")))?;
            if !seen.insert(name.clone()) {
                return err(loc, format!("symbol `{name}` is declared twice"));
            }
            let entry = (Sym::from(name.as_str()), arity);
            if k == 0 {
                scope.sig.funs.push(entry);
            } else {
                scope.sig.preds.push(entry);
            }
        }
    }

    let mut mu = ReplacementMap::top();
    let mut mapped = BTreeSet::new();
    for d in body(1) {
        let Some([Sexp::Atom(f, floc), idx @ ..]) = d.as_list() else {
            return err(d.loc(), "expected `(f i ...)`");
        };
        let Some(arity) = scope.sig.fun_arity(f) else {
            return err(*floc, format!("function symbol `{f}` is not declared"));
        };
        if !mapped.insert(f.clone()) {
            return err(*floc, format!("`{f}` is mapped twice"));
        }
        let mut set = Vec::new();
        for i in idx {
            match i.as_atom().and_then(|s| s.parse::<usize>().ok()) {
                Some(i) if (1..=arity).contains(&i) => set.push(i),
                _ => return err(i.loc(), format!("`{i}` is not an argument index of `{f}`")),
            }
        }
        mu.set(Sym::from(f.as_str()), set);
    }

    let mut eqs = Vec::new();
    for x in body(3) {
        let (lhs, rhs, cond, _) = scope.conditional(x, "=")?;
        eqs.push(Equation { lhs, rhs, cond });
    }
    let mut horn = Vec::new();
    for x in body(4) {
        let (head, body) = match x.head() {
            Some("=>") => {
                let items = x.as_list().expect("list");
                if items.len() < 2 {
                    return err(x.loc(), "expected `(=> head atom ...)`");
                }
                (&items[1], scope.atoms(&items[2..])?)
            }
            _ => (x, Vec::new()),
        };
        let head_atom = scope.atom(head, false)?;
        if head_atom.pred.is_builtin() {
            return err(head.loc(), "a Horn clause head must use a user predicate");
        }
        horn.push(HornClause { head: head_atom, body });
    }
    let mut rules = Vec::new();
    for x in body(5) {
        let (l, r, c, loc) = scope.conditional(x, "->")?;
        if l.is_var() {
            return err(loc, "the left-hand side of a rule must not be a variable");
        }
        rules.push((l, r, c));
    }
    let at = sections.iter().flatten().next().map_or(Loc { line: 1, col: 1 }, |s| s.loc());
    Egtrs::new(scope.sig, mu, eqs, horn, rules).or_else(|e| err(at, e.to_string()))
}

fn conditional_text(out: &mut String, op: &str, l: &Term, r: &Term, cond: &[Atom]) {
    if cond.is_empty() {
        let _ = write!(out, "({op} {l} {r})");
    } else {
        let _ = write!(out, "(=> ({op} {l} {r})");
        for a in cond {
            let _ = write!(out, " {a}");
        }
        out.push(')');
    }
}

/// Prints a system in problem-file syntax.
pub fn print_problem(sys: &Egtrs) -> String {
    let mut out = String::new();
    let mut section = |name: &str, items: Vec<String>| {
        if items.is_empty() {
            let _ = writeln!(out, "({name})");
        } else {
            let _ = writeln!(out, "({name}");
            for item in items {
                let _ = writeln!(out, "  {item}");
            }
            let _ = writeln!(out, ")");
        }
    };
    section("SIG", sys.sig.funs.iter().map(|(f, n)| format!("({f} {n})")).collect());
    section(
        "RMAP",
        sys.mu
            .entries()
            .map(|(f, idx)| {
                let mut s = format!("({f}");
                for i in idx {
                    let _ = write!(s, " {i}");
                }
                s.push(')');
                s
            })
            .collect(),
    );
    section("PRED", sys.sig.preds.iter().map(|(p, n)| format!("({p} {n})")).collect());
    section(
        "EQS",
        sys.eqs
            .iter()
            .map(|e| {
                let mut s = String::new();
                conditional_text(&mut s, "=", &e.lhs, &e.rhs, &e.cond);
                s
            })
            .collect(),
    );
    section(
        "HORN",
        sys.horn
            .iter()
            .map(|h| {
                if h.body.is_empty() {
                    format!("{}", h.head)
                } else {
                    let mut s = format!("(=> {}", h.head);
                    for a in &h.body {
                        let _ = write!(s, " {a}");
                    }
                    s.push(')');
                    s
                }
            })
            .collect(),
    );
    section(
        "RULES",
        sys.rules
            .iter()
            .map(|r| {
                let mut s = String::new();
                conditional_text(&mut s, "->", &r.lhs, &r.rhs, &r.cond);
                s
            })
            .collect(),
    );
    out
}
