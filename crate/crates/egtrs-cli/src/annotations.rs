//! Annotation files and bound settings.
//!
//! An annotation file holds s-expressions of the forms
//!
//! ```text
//! (assume-e-terminating)
//! (assume-joinable <pair-id> [<mode>])
//! (assume-infeasible <pair-id>)
//! (bounds <name> <value>)
//! ```
//!
//! Pair ids are checked against the generated pairs when the analysis runs.

use egtrs::{Annotations, Bounds, JoinMode};

use crate::sexpr::{read_all, Loc, Sexp};

/// The bound names accepted by `--bounds` and `(bounds ...)`.
pub const BOUND_NAMES: [&str; 4] = ["depth", "size", "class", "solutions"];

/// A located annotation or bounds error.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{loc}: {message}")]
pub struct AnnotationError {
    pub loc: Loc,
    pub message: String,
}

/// The contents of an annotation file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotationFile {
    pub annotations: Annotations,
    /// Bound settings, in file order.
    pub bounds: Vec<(String, usize)>,
}

/// Sets one named bound.
pub fn set_bound(bounds: &mut Bounds, name: &str, value: usize) -> Result<(), String> {
    if value == 0 {
        return Err(format!("bound `{name}` must be positive"));
    }
    match name {
        "depth" => bounds.max_depth = value,
        "size" => bounds.max_term_size = value,
        "class" => bounds.max_class_size = value,
        "solutions" => bounds.max_solutions = value,
        _ => return Err(format!("unknown bound `{name}`; expected one of {}", BOUND_NAMES.join(", "))),
    }
    Ok(())
}

/// Parses a `depth=N,size=N,class=N,solutions=N` list, any subset in any order.
pub fn parse_bounds(list: &str, mut bounds: Bounds) -> Result<Bounds, String> {
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, value) = part.split_once('=').ok_or_else(|| format!("expected `name=value`, found `{part}`"))?;
        let value: usize = value.trim().parse().map_err(|_| format!("`{value}` is not a number"))?;
        set_bound(&mut bounds, name.trim(), value)?;
    }
    Ok(bounds)
}

/// Parses an annotation file.
pub fn parse_annotations(text: &str) -> Result<AnnotationFile, AnnotationError> {
    let fail = |loc: Loc, message: String| AnnotationError { loc, message };
    let top = read_all(text).map_err(|e| fail(e.loc, e.message))?;
    let mut out = AnnotationFile::default();
    for x in top {
        let items = x.as_list().unwrap_or(&[]);
        let words: Option<Vec<&str>> = items.iter().map(Sexp::as_atom).collect();
        let Some(words) = words else {
            return Err(fail(x.loc(), format!("malformed annotation `{x}`")));
        };
        match words.as_slice() {
            ["assume-e-terminating"] => out.annotations.e_terminating = true,
            ["assume-joinable", id] => {
                out.annotations.joinable.insert(id.to_string(), None);
            }
            ["assume-joinable", id, mode] => {
                let m = JoinMode::parse(mode).ok_or_else(|| fail(items[2].loc(), format!("unknown mode `{mode}`")))?;
                out.annotations.joinable.insert(id.to_string(), Some(m));
            }
            ["assume-infeasible", id] => {
                out.annotations.infeasible.insert(id.to_string());
            }
            ["bounds", name, value] => {
                let v: usize = value.parse().map_err(|_| fail(items[2].loc(), format!("`{value}` is not a number")))?;
                set_bound(&mut Bounds::default(), name, v).map_err(|m| fail(items[1].loc(), m))?;
                out.bounds.push((name.to_string(), v));
            }
            _ => return Err(fail(x.loc(), format!("unknown annotation `{x}`"))),
        }
    }
    Ok(out)
}
