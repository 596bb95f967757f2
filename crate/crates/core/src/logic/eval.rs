//! Exact evaluation of formulas on finite spaces.
//!
//! Formulas are first resolved into [`Compiled`] programs in which every
//! variable is a slot in a flat assignment array. Quantifiers range over all
//! points, so `sup`/`inf` are exact maxima/minima.
//!
//! Because every node takes values in `[0, 1]`, `min` and `inf` stop as soon
//! as they see 0 and `max` and `sup` stop at 1. The result is unchanged.

use crate::error::{Error, Result};
use crate::logic::formula::Formula;
use crate::metric_core::{DistanceVector, Distances};

#[derive(Debug, Clone)]
enum Node {
    Const(f64),
    Dist(usize, usize),
    Monus(Box<Node>, Box<Node>),
    Min(Vec<Node>),
    Max(Vec<Node>),
    AbsDiff(Box<Node>, Box<Node>),
    Sup(usize, Box<Node>),
    Inf(usize, Box<Node>),
}

/// A formula with its variables resolved to slots.
#[derive(Debug, Clone)]
pub struct Compiled {
    root: Node,
    free: Vec<String>,
    slots: usize,
}

struct Resolver<'a> {
    scope: Vec<(&'a str, usize)>,
    next_slot: usize,
    max_slot: usize,
}

impl<'a> Resolver<'a> {
    fn lookup(&self, name: &str) -> Result<usize> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| *n == name)
            .map(|&(_, slot)| slot)
            .ok_or_else(|| Error::Semantic(format!("unbound variable '{name}'")))
    }

    fn resolve(&mut self, f: &'a Formula) -> Result<Node> {
        Ok(match f {
            Formula::Const(v) => Node::Const(*v),
            Formula::Dist(u, v) => Node::Dist(self.lookup(u)?, self.lookup(v)?),
            Formula::Monus(a, b) => Node::Monus(Box::new(self.resolve(a)?), Box::new(self.resolve(b)?)),
            Formula::AbsDiff(a, b) => {
                Node::AbsDiff(Box::new(self.resolve(a)?), Box::new(self.resolve(b)?))
            }
            Formula::Min(cs) | Formula::Max(cs) => {
                if cs.is_empty() {
                    return Err(Error::Semantic("min/max needs at least one argument".into()));
                }
                let nodes = cs.iter().map(|c| self.resolve(c)).collect::<Result<Vec<_>>>()?;
                if matches!(f, Formula::Min(_)) {
                    Node::Min(nodes)
                } else {
                    Node::Max(nodes)
                }
            }
            Formula::Sup(var, body) | Formula::Inf(var, body) => {
                let slot = self.next_slot;
                self.next_slot += 1;
                self.max_slot = self.max_slot.max(self.next_slot);
                self.scope.push((var, slot));
                let body = Box::new(self.resolve(body)?);
                self.scope.pop();
                self.next_slot -= 1;
                if matches!(f, Formula::Sup(..)) {
                    Node::Sup(slot, body)
                } else {
                    Node::Inf(slot, body)
                }
            }
        })
    }
}

impl Compiled {
    /// Resolves `formula` with the given free variables bound, in order, to
    /// slots `0..free.len()`.
    pub fn new(formula: &Formula, free: &[&str]) -> Result<Self> {
        for (i, name) in free.iter().enumerate() {
            if free[..i].contains(name) {
                return Err(Error::Argument(format!("free variable '{name}' declared twice")));
            }
        }
        let mut resolver = Resolver {
            scope: free.iter().enumerate().map(|(slot, &name)| (name, slot)).collect(),
            next_slot: free.len(),
            max_slot: free.len(),
        };
        let root = resolver.resolve(formula)?;
        Ok(Compiled {
            root,
            free: free.iter().map(|s| s.to_string()).collect(),
            slots: resolver.max_slot,
        })
    }

    /// Compiles a sentence; fails naming the first free variable otherwise.
    pub fn sentence(formula: &Formula) -> Result<Self> {
        Self::new(formula, &[])
    }

    pub fn free_vars(&self) -> &[String] {
        &self.free
    }

    /// Evaluates with the free variables assigned to `points`, in order.
    pub fn eval<D: Distances + ?Sized>(&self, space: &D, points: &[usize]) -> Result<f64> {
        if points.len() != self.free.len() {
            return Err(Error::Argument(format!(
                "expected {} free-variable values, got {}",
                self.free.len(),
                points.len()
            )));
        }
        if space.is_empty() {
            return Err(Error::Argument("cannot evaluate on an empty space".into()));
        }
        if let Some(&p) = points.iter().find(|&&p| p >= space.len()) {
            return Err(Error::Argument(format!(
                "point {p} is not in a {}-point space",
                space.len()
            )));
        }
        let mut env = vec![0usize; self.slots];
        env[..points.len()].copy_from_slice(points);
        Ok(run(&self.root, space, &mut env))
    }
}

fn run<D: Distances + ?Sized>(node: &Node, space: &D, env: &mut [usize]) -> f64 {
    match node {
        Node::Const(v) => *v,
        Node::Dist(u, v) => space.dist(env[*u], env[*v]),
        Node::Monus(a, b) => (run(a, space, env) - run(b, space, env)).max(0.0),
        Node::AbsDiff(a, b) => (run(a, space, env) - run(b, space, env)).abs(),
        Node::Min(cs) => {
            let mut best = f64::INFINITY;
            for c in cs {
                best = best.min(run(c, space, env));
                if best <= 0.0 {
                    break;
                }
            }
            best
        }
        Node::Max(cs) => {
            let mut best = f64::NEG_INFINITY;
            for c in cs {
                best = best.max(run(c, space, env));
                if best >= 1.0 {
                    break;
                }
            }
            best
        }
        Node::Sup(slot, body) => {
            let mut best = f64::NEG_INFINITY;
            for p in 0..space.len() {
                env[*slot] = p;
                best = best.max(run(body, space, env));
                if best >= 1.0 {
                    break;
                }
            }
            best
        }
        Node::Inf(slot, body) => {
            let mut best = f64::INFINITY;
            for p in 0..space.len() {
                env[*slot] = p;
                best = best.min(run(body, space, env));
                if best <= 0.0 {
                    break;
                }
            }
            best
        }
    }
}

/// Value of `formula` in `space` under an assignment of its free variables.
pub fn eval<D: Distances + ?Sized>(
    formula: &Formula,
    space: &D,
    env: &[(&str, usize)],
) -> Result<f64> {
    let names: Vec<&str> = env.iter().map(|&(n, _)| n).collect();
    let points: Vec<usize> = env.iter().map(|&(_, p)| p).collect();
    Compiled::new(formula, &names)?.eval(space, &points)
}

/// Value of a sentence on the space whose distances are the coordinates of `d`.
/// The triangle inequality is not required.
pub fn eval_on_dvec(formula: &Formula, d: &DistanceVector) -> Result<f64> {
    Compiled::sentence(formula)?.eval(d, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;
    use crate::metric_core::FiniteMetricSpace;

    fn two_point(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_matrix(&[vec![0.0, d], vec![d, 0.0]]).unwrap()
    }

    #[test]
    fn constants_and_distances() {
        let s = two_point(0.3);
        assert_eq!(eval(&Formula::Const(0.25), &s, &[]).unwrap(), 0.25);
        let f = parse("d(x, y)").unwrap();
        assert_eq!(eval(&f, &s, &[("x", 0), ("y", 1)]).unwrap(), 0.3);
        assert_eq!(eval(&f, &s, &[("x", 1), ("y", 1)]).unwrap(), 0.0);
    }

    #[test]
    fn unbound_variable_is_named() {
        let f = parse("sup x . d(x, y)").unwrap();
        let err = eval(&f, &two_point(0.3), &[]).unwrap_err();
        assert!(matches!(err, Error::Semantic(_)));
        assert!(err.to_string().contains("'y'"));
    }

    #[test]
    fn bad_assignments() {
        let f = parse("d(x, y)").unwrap();
        assert!(eval(&f, &two_point(0.3), &[("x", 0), ("y", 2)]).is_err());
        assert!(eval(&f, &two_point(0.3), &[("x", 0), ("x", 1), ("y", 0)]).is_err());
    }

    #[test]
    fn quantifiers_are_exact_extrema() {
        let s = FiniteMetricSpace::from_matrix(&[
            vec![0.0, 0.5, 0.6],
            vec![0.5, 0.0, 0.7],
            vec![0.6, 0.7, 0.0],
        ])
        .unwrap();
        assert_eq!(eval(&parse("sup x . sup y . d(x,y)").unwrap(), &s, &[]).unwrap(), 0.7);
        assert_eq!(eval(&parse("inf x . sup y . d(x,y)").unwrap(), &s, &[]).unwrap(), 0.6);
        assert_eq!(eval(&parse("sup x . inf y . d(x,y)").unwrap(), &s, &[]).unwrap(), 0.0);
    }

    #[test]
    fn shadowing_uses_innermost_binder() {
        let s = two_point(0.4);
        let f = parse("sup x . inf x . d(x, x)").unwrap();
        assert_eq!(eval(&f, &s, &[]).unwrap(), 0.0);
        let f = parse("inf y . sup x . max(d(x, y), inf x . d(x, y))").unwrap();
        assert_eq!(eval(&f, &s, &[]).unwrap(), 0.4);
    }

    #[test]
    fn monus_identities() {
        let s = two_point(0.3);
        let a = parse("sup x . sup y . d(x, y)").unwrap();
        let same = Formula::monus(a.clone(), a.clone());
        assert_eq!(eval(&same, &s, &[]).unwrap(), 0.0);
        let zero = Formula::monus(a.clone(), Formula::Const(0.0));
        assert_eq!(eval(&zero, &s, &[]).unwrap(), eval(&a, &s, &[]).unwrap());
    }
}
