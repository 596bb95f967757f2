use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::formula::Formula;
use crate::metric_core::{DistanceVector, Distances, FiniteMetricSpace, OnePointExtension};

/// `Conf_X(vars)`: the largest deviation of the tuple's pairwise distances
/// from those of `x`. A space with at most one point gives `Const(0)`.
pub fn build_conf(x: &FiniteMetricSpace, vars: &[String]) -> Result<Formula> {
    if vars.len() != x.n() {
        return Err(Error::Argument(format!(
            "Conf of a {}-point space needs {} variables, got {}",
            x.n(),
            x.n(),
            vars.len()
        )));
    }
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(Error::Argument(format!("variable name '{v}' used twice")));
        }
    }
    let mut terms = Vec::new();
    for i in 0..vars.len() {
        for j in (i + 1)..vars.len() {
            terms.push(Formula::abs_diff(
                Formula::Const(x.dist(i, j)),
                Formula::dist(vars[i].clone(), vars[j].clone()),
            ));
        }
    }
    Ok(if terms.is_empty() {
        Formula::Const(0.0)
    } else {
        Formula::Max(terms)
    })
}

/// One extension axiom: `X ⊏ Y` together with a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AxiomTaskRepr", into = "AxiomTaskRepr")]
pub struct AxiomTask {
    ext: OnePointExtension,
    epsilon: f64,
}

/// File form: the base space, the distances of the new point to each base
/// point, and the tolerance.
#[derive(Serialize, Deserialize)]
struct AxiomTaskRepr {
    base: DistanceVector,
    new_point: Vec<f64>,
    epsilon: f64,
}

impl TryFrom<AxiomTaskRepr> for AxiomTask {
    type Error = Error;

    fn try_from(r: AxiomTaskRepr) -> Result<Self> {
        let base = FiniteMetricSpace::from_dvec(&r.base)?;
        AxiomTask::new(OnePointExtension::from_base(base, &r.new_point)?, r.epsilon)
    }
}

impl From<AxiomTask> for AxiomTaskRepr {
    fn from(t: AxiomTask) -> Self {
        AxiomTaskRepr {
            base: t.ext.base().to_dvec(),
            new_point: t.ext.new_point_distances(),
            epsilon: t.epsilon,
        }
    }
}

impl AxiomTask {
    pub fn new(ext: OnePointExtension, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Argument(format!("epsilon = {epsilon} must lie in (0, 1]")));
        }
        Ok(AxiomTask { ext, epsilon })
    }

    /// `X` a single point, `Y` adds one point at distance `distance`.
    pub fn singleton(distance: f64, epsilon: f64) -> Result<Self> {
        Self::new(
            OnePointExtension::from_base(FiniteMetricSpace::singleton(), &[distance])?,
            epsilon,
        )
    }

    pub fn ext(&self) -> &OnePointExtension {
        &self.ext
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k(&self) -> usize {
        self.ext.k()
    }

    pub fn sentence(&self) -> Formula {
        build_extension_axiom(self)
    }
}

/// `sup_v min(ε ∸ Conf_X(v), inf_w (Conf_Y(v, w) ∸ ε))`.
pub fn build_extension_axiom(task: &AxiomTask) -> Formula {
    let k = task.k();
    let vars: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
    let mut with_w = vars.clone();
    with_w.push("w".into());
    let eps = Formula::Const(task.epsilon());
    let conf_x = build_conf(task.ext().base(), &vars).expect("fresh distinct variables");
    let conf_y = build_conf(task.ext().extension(), &with_w).expect("fresh distinct variables");
    let body = Formula::Min(vec![
        Formula::monus(eps.clone(), conf_x),
        Formula::inf("w", Formula::monus(conf_y, eps)),
    ]);
    vars.into_iter().rev().fold(body, |acc, v| Formula::sup(v, acc))
}

/// `sup_x sup_y min(d(x,y), 1/2 ∸ d(x,y))`: zero exactly when every
/// nontrivial distance is at least 1/2.
pub fn build_phi_geq_half() -> Formula {
    Formula::sup(
        "x",
        Formula::sup(
            "y",
            Formula::Min(vec![
                Formula::dist("x", "y"),
                Formula::monus(Formula::Const(0.5), Formula::dist("x", "y")),
            ]),
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::eval::eval;
    use crate::metric_core::conf;

    fn two_point(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_matrix(&[vec![0.0, d], vec![d, 0.0]]).unwrap()
    }

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("u{i}")).collect()
    }

    #[test]
    fn conf_formula_small_cases() {
        assert_eq!(build_conf(&FiniteMetricSpace::singleton(), &names(1)).unwrap(), Formula::Const(0.0));
        let x = two_point(0.6);
        assert!(build_conf(&x, &["a".into(), "a".into()]).is_err());
        assert!(build_conf(&x, &names(3)).is_err());
        let f = build_conf(&x, &names(2)).unwrap();
        assert_eq!(eval(&f, &x, &[("u0", 0), ("u1", 1)]).unwrap(), 0.0);
    }

    #[test]
    fn conf_formula_matches_direct_conf() {
        let x = FiniteMetricSpace::from_matrix(&[
            vec![0.0, 0.5, 0.6],
            vec![0.5, 0.0, 0.7],
            vec![0.6, 0.7, 0.0],
        ])
        .unwrap();
        let z = FiniteMetricSpace::from_matrix(&[
            vec![0.0, 0.5, 0.9, 0.6],
            vec![0.5, 0.0, 0.7, 0.8],
            vec![0.9, 0.7, 0.0, 0.5],
            vec![0.6, 0.8, 0.5, 0.0],
        ])
        .unwrap();
        let vars = names(3);
        let f = build_conf(&x, &vars).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let env = [("u0", a), ("u1", b), ("u2", c)];
                    assert_eq!(eval(&f, &z, &env).unwrap(), conf(&x, &z, &[a, b, c]).unwrap());
                }
            }
        }
    }

    #[test]
    fn singleton_axiom_values() {
        let task = AxiomTask::singleton(0.6, 0.1).unwrap();
        let psi = build_extension_axiom(&task);
        assert!(psi.is_sentence());
        assert_eq!(eval(&psi, &two_point(0.6), &[]).unwrap(), 0.0);
        assert_eq!(eval(&psi, &FiniteMetricSpace::singleton(), &[]).unwrap(), 0.1);
    }

    #[test]
    fn vacuous_axiom() {
        let task = AxiomTask::singleton(0.6, 1.0).unwrap();
        let psi = build_extension_axiom(&task);
        for s in [FiniteMetricSpace::singleton(), two_point(0.2), two_point(1.0)] {
            assert_eq!(eval(&psi, &s, &[]).unwrap(), 0.0);
        }
    }

    #[test]
    fn phi_values() {
        let phi = build_phi_geq_half();
        assert_eq!(eval(&phi, &two_point(0.3), &[]).unwrap(), 0.2);
        assert_eq!(eval(&phi, &two_point(0.25), &[]).unwrap(), 0.25);
        assert_eq!(eval(&phi, &two_point(0.7), &[]).unwrap(), 0.0);
        assert_eq!(
            phi,
            crate::logic::parse("sup x . sup y . min(d(x,y), monus(0.5, d(x,y)))").unwrap()
        );
    }

    #[test]
    fn task_validation_and_serde() {
        assert!(AxiomTask::singleton(0.6, 0.0).is_err());
        assert!(AxiomTask::singleton(0.6, 1.5).is_err());
        assert!(AxiomTask::singleton(0.4, 0.1).is_err());
        let task = AxiomTask::singleton(0.6, 0.2).unwrap();
        let text = serde_json::to_string(&task).unwrap();
        assert_eq!(text, r#"{"base":{"n":1,"d":[]},"new_point":[0.6],"epsilon":0.2}"#);
        let back: AxiomTask = serde_json::from_str(&text).unwrap();
        assert_eq!(back, task);
    }
}
