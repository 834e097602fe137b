//! A small s-expression reader with source locations.
//!
//! Atoms are maximal runs of characters other than whitespace, parentheses
//! and `;`. A `;` starts a comment that runs to the end of the line.

use std::fmt;

/// A line and column in the source, both starting at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// An s-expression node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Loc),
    List(Vec<Sexp>, Loc),
}

impl Sexp {
    /// Where the node starts.
    pub fn loc(&self) -> Loc {
        match self {
            Sexp::Atom(_, l) | Sexp::List(_, l) => *l,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs, _) => Some(xs),
            Sexp::Atom(..) => None,
        }
    }

    /// The leading atom of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|xs| xs.first()).and_then(Sexp::as_atom)
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => f.write_str(s),
            Sexp::List(xs, _) => {
                f.write_str("(")?;
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A lexical or structural error.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{loc}: {message}")]
pub struct ReadError {
    pub loc: Loc,
    pub message: String,
}

/// Reads every top-level expression of `text`.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, ReadError> {
    let mut stack: Vec<(Vec<Sexp>, Loc)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let mut loc = Loc { line: 1, col: 1 };
    let advance = |c: char, loc: &mut Loc| {
        if c == '\n' {
            loc.line += 1;
            loc.col = 1;
        } else {
            loc.col += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let here = loc;
        match c {
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    advance(c, &mut loc);
                }
            }
            '(' => {
                chars.next();
                advance(c, &mut loc);
                stack.push((Vec::new(), here));
            }
            ')' => {
                chars.next();
                advance(c, &mut loc);
                let (items, start) =
                    stack.pop().ok_or_else(|| ReadError { loc: here, message: "unbalanced `)`".into() })?;
                let node = Sexp::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                advance(c, &mut loc);
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';') {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    advance(c, &mut loc);
                }
                let node = Sexp::Atom(word, here);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(ReadError { loc: *start, message: "unclosed `(`".into() });
    }
    Ok(top)
}

/// Reads exactly one expression.
pub fn read_one(text: &str) -> Result<Sexp, ReadError> {
    let mut all = read_all(text)?;
    match all.len() {
        1 => Ok(all.pop().expect("one element")),
        0 => Err(ReadError { loc: Loc { line: 1, col: 1 }, message: "expected an expression".into() }),
        _ => Err(ReadError { loc: all[1].loc(), message: "expected a single expression".into() }),
    }
}
