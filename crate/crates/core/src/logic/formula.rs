use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A continuous-logic formula over the pure metric language.
///
/// Every node evaluates to a value in `[0, 1]`; a sentence "holds" in a space
/// when its value is 0.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Const(f64),
    Dist(String, String),
    /// Truncated subtraction `max(a - b, 0)`.
    Monus(Box<Formula>, Box<Formula>),
    Min(Vec<Formula>),
    Max(Vec<Formula>),
    AbsDiff(Box<Formula>, Box<Formula>),
    Sup(String, Box<Formula>),
    Inf(String, Box<Formula>),
}

impl Formula {
    pub fn constant(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Formula::Const(value))
        } else {
            Err(Error::Semantic(format!("constant {value} is outside [0, 1]")))
        }
    }

    pub fn dist(u: impl Into<String>, v: impl Into<String>) -> Self {
        Formula::Dist(u.into(), v.into())
    }

    pub fn monus(a: Formula, b: Formula) -> Self {
        Formula::Monus(Box::new(a), Box::new(b))
    }

    pub fn abs_diff(a: Formula, b: Formula) -> Self {
        Formula::AbsDiff(Box::new(a), Box::new(b))
    }

    /// `|a - b|` spelled with monus only: `max(a ∸ b, b ∸ a)`.
    pub fn abs_diff_via_monus(a: Formula, b: Formula) -> Self {
        Formula::Max(vec![
            Formula::monus(a.clone(), b.clone()),
            Formula::monus(b, a),
        ])
    }

    pub fn sup(var: impl Into<String>, body: Formula) -> Self {
        Formula::Sup(var.into(), Box::new(body))
    }

    pub fn inf(var: impl Into<String>, body: Formula) -> Self {
        Formula::Inf(var.into(), Box::new(body))
    }

    /// Free variables, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Const(_) => {}
            Formula::Dist(u, v) => {
                for name in [u, v] {
                    if !bound.contains(&name.as_str()) {
                        out.insert(name.clone());
                    }
                }
            }
            Formula::Monus(a, b) | Formula::AbsDiff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Min(children) | Formula::Max(children) => {
                for c in children {
                    c.collect_free(bound, out);
                }
            }
            Formula::Sup(var, body) | Formula::Inf(var, body) => {
                bound.push(var);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Maximum nesting depth of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Dist(..) => 0,
            Formula::Monus(a, b) | Formula::AbsDiff(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Min(cs) | Formula::Max(cs) => {
                cs.iter().map(Formula::quantifier_depth).max().unwrap_or(0)
            }
            Formula::Sup(_, body) | Formula::Inf(_, body) => 1 + body.quantifier_depth(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Dist(..) => 1,
            Formula::Monus(a, b) | Formula::AbsDiff(a, b) => 1 + a.size() + b.size(),
            Formula::Min(cs) | Formula::Max(cs) => 1 + cs.iter().map(Formula::size).sum::<usize>(),
            Formula::Sup(_, body) | Formula::Inf(_, body) => 1 + body.size(),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, name: &str, items: &[&Formula]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    f.write_str(")")
}

/// Canonical DSL text; [`crate::logic::parse`] reads it back to an equal tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(v) => write!(f, "{v}"),
            Formula::Dist(u, v) => write!(f, "d({u}, {v})"),
            Formula::Monus(a, b) => write_list(f, "monus", &[a, b]),
            Formula::AbsDiff(a, b) => write_list(f, "absdiff", &[a, b]),
            Formula::Min(cs) => write_list(f, "min", &cs.iter().collect::<Vec<_>>()),
            Formula::Max(cs) => write_list(f, "max", &cs.iter().collect::<Vec<_>>()),
            Formula::Sup(var, body) => write!(f, "sup {var} . {body}"),
            Formula::Inf(var, body) => write!(f, "inf {var} . {body}"),
        }
    }
}

/// Canonical text of a formula.
pub fn print(formula: &Formula) -> String {
    formula.to_string()
}
