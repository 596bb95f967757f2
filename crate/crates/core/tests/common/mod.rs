//! Independent reference implementations and random generators shared by the
//! integration tests. None of the oracles call into the library's evaluator,
//! solver or bound code.

#![allow(dead_code)]

use std::collections::HashMap;

use metric_zero_one::logic::Formula;
use metric_zero_one::metric_core::FiniteMetricSpace;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Direct recursive evaluation with a name-to-point environment.
pub fn brute_eval(f: &Formula, m: &[Vec<f64>], env: &mut HashMap<String, usize>) -> f64 {
    match f {
        Formula::Const(c) => *c,
        Formula::Dist(u, v) => m[env[u]][env[v]],
        Formula::Monus(a, b) => {
            let x = brute_eval(a, m, env);
            let y = brute_eval(b, m, env);
            if x > y {
                x - y
            } else {
                0.0
            }
        }
        Formula::AbsDiff(a, b) => {
            let x = brute_eval(a, m, env);
            let y = brute_eval(b, m, env);
            if x > y {
                x - y
            } else {
                y - x
            }
        }
        Formula::Min(args) => {
            let mut best = f64::INFINITY;
            for a in args {
                let v = brute_eval(a, m, env);
                if v < best {
                    best = v;
                }
            }
            best
        }
        Formula::Max(args) => {
            let mut best = f64::NEG_INFINITY;
            for a in args {
                let v = brute_eval(a, m, env);
                if v > best {
                    best = v;
                }
            }
            best
        }
        Formula::Sup(x, body) | Formula::Inf(x, body) => {
            let is_sup = matches!(f, Formula::Sup(..));
            let saved = env.get(x).copied();
            let mut best = if is_sup { f64::NEG_INFINITY } else { f64::INFINITY };
            for p in 0..m.len() {
                env.insert(x.clone(), p);
                let v = brute_eval(body, m, env);
                if (is_sup && v > best) || (!is_sup && v < best) {
                    best = v;
                }
            }
            match saved {
                Some(p) => env.insert(x.clone(), p),
                None => env.remove(x),
            };
            best
        }
    }
}

pub fn brute_sentence(f: &Formula, space: &FiniteMetricSpace) -> f64 {
    brute_eval(f, &space.rows(), &mut HashMap::new())
}

/// Plain minimax for the ε-EF game, with no memo and no pruning beyond the
/// final check.
pub fn minimax(x: &[Vec<f64>], y: &[Vec<f64>], rounds: usize, eps: f64) -> bool {
    fn ok(x: &[Vec<f64>], y: &[Vec<f64>], a: &[usize], b: &[usize], eps: f64) -> bool {
        for i in 0..a.len() {
            for j in 0..a.len() {
                if (x[a[i]][a[j]] - y[b[i]][b[j]]).abs() >= eps {
                    return false;
                }
            }
        }
        true
    }
    fn go(
        x: &[Vec<f64>],
        y: &[Vec<f64>],
        a: &mut Vec<usize>,
        b: &mut Vec<usize>,
        left: usize,
        eps: f64,
    ) -> bool {
        if left == 0 {
            return ok(x, y, a, b, eps);
        }
        let mut every_move_answered = true;
        for p in 0..x.len() {
            let mut answered = false;
            for q in 0..y.len() {
                a.push(p);
                b.push(q);
                answered |= go(x, y, a, b, left - 1, eps);
                a.pop();
                b.pop();
            }
            every_move_answered &= answered;
        }
        for q in 0..y.len() {
            let mut answered = false;
            for p in 0..x.len() {
                a.push(p);
                b.push(q);
                answered |= go(x, y, a, b, left - 1, eps);
                a.pop();
                b.pop();
            }
            every_move_answered &= answered;
        }
        every_move_answered
    }
    go(x, y, &mut Vec::new(), &mut Vec::new(), rounds, eps)
}

/// Shortest-path closure of random edge weights drawn from multiples of 1/16.
/// Dyadic weights keep every sum exact, and the coarse grid produces ties.
#[allow(clippy::needless_range_loop)]
pub fn random_metric<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = f64::from(rng.random_range(1u8..=16)) / 16.0;
            m[i][j] = w;
            m[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if m[i][k] + m[k][j] < m[i][j] {
                    m[i][j] = m[i][k] + m[k][j];
                }
            }
        }
    }
    FiniteMetricSpace::from_matrix(&m).expect("shortest-path closure is a metric")
}

const CONSTANTS: [f64; 6] = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0];
const NAMES: [&str; 4] = ["x", "y", "z", "u"];

/// A random formula whose free variables all lie in `bound`, using at most
/// `quantifiers` binders.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    bound: &mut Vec<String>,
    quantifiers: usize,
    depth: usize,
) -> Formula {
    let leaf = depth == 0 || rng.random_bool(0.25);
    if leaf {
        if bound.is_empty() || rng.random_bool(0.2) {
            return Formula::Const(*CONSTANTS.choose(rng).unwrap());
        }
        let u = bound.choose(rng).unwrap().clone();
        let v = bound.choose(rng).unwrap().clone();
        return Formula::Dist(u, v);
    }
    let choice = if quantifiers > 0 { rng.random_range(0..6) } else { rng.random_range(0..4) };
    match choice {
        0 => Formula::Monus(
            Box::new(random_formula(rng, bound, quantifiers / 2, depth - 1)),
            Box::new(random_formula(rng, bound, quantifiers - quantifiers / 2, depth - 1)),
        ),
        1 => Formula::AbsDiff(
            Box::new(random_formula(rng, bound, quantifiers / 2, depth - 1)),
            Box::new(random_formula(rng, bound, quantifiers - quantifiers / 2, depth - 1)),
        ),
        2 | 3 => {
            let arity = rng.random_range(1..=3);
            let mut left = quantifiers;
            let args = (0..arity)
                .map(|_| {
                    let q = rng.random_range(0..=left);
                    left -= q;
                    random_formula(rng, bound, q, depth - 1)
                })
                .collect();
            if choice == 2 {
                Formula::Min(args)
            } else {
                Formula::Max(args)
            }
        }
        _ => {
            let var = NAMES.choose(rng).unwrap().to_string();
            bound.push(var.clone());
            let body = random_formula(rng, bound, quantifiers - 1, depth);
            bound.pop();
            if choice == 4 {
                Formula::Sup(var, Box::new(body))
            } else {
                Formula::Inf(var, Box::new(body))
            }
        }
    }
}

pub fn random_sentence<R: Rng>(rng: &mut R, quantifiers: usize) -> Formula {
    let depth = 4;
    let mut bound = Vec::new();
    let mut f = random_formula(rng, &mut bound, quantifiers, depth);
    // Wrap in a quantifier so that most sentences actually range over the space.
    if quantifiers > 0 && f.quantifier_depth() == 0 {
        f = Formula::Sup("x".into(), Box::new(f));
    }
    f
}

/// Number of quantifier nodes in `f`.
pub fn quantifier_count(f: &Formula) -> usize {
    match f {
        Formula::Const(_) | Formula::Dist(..) => 0,
        Formula::Monus(a, b) | Formula::AbsDiff(a, b) => quantifier_count(a) + quantifier_count(b),
        Formula::Min(args) | Formula::Max(args) => args.iter().map(quantifier_count).sum(),
        Formula::Sup(_, body) | Formula::Inf(_, body) => 1 + quantifier_count(body),
    }
}
