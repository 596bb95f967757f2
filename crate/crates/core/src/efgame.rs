//! ε-Ehrenfeucht–Fraïssé games between finite metric spaces.
//!
//! In `G(X, Y, n, ε)` player I picks, each round, a point of either space and
//! player II answers with a point of the other. Player II wins a play when every
//! pair of rounds `i < j` satisfies `|d_X(a_i, a_j) - d_Y(b_i, b_j)| < ε`.
//! The solver runs backward induction over partial plays, memoized on the raw
//! index tuples, and prunes a branch as soon as a pair breaks the condition
//! (such a play can never be repaired).

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric_core::{Distances, FiniteMetricSpace};

/// A partial play: `a[i]` and `b[i]` are the points chosen in round `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GameState {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl GameState {
    pub fn initial() -> Self {
        GameState {
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    pub fn round(&self) -> usize {
        self.a.len()
    }
}

/// A move of player I.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "side", content = "point")]
pub enum Move {
    /// Player I picks a point of X; player II must answer in Y.
    X(usize),
    /// Player I picks a point of Y; player II must answer in X.
    Y(usize),
}

/// Size guard for the exhaustive solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameLimits {
    /// Upper bound on `rounds * ln(|X| * |Y|)`.
    pub max_log_size: f64,
}

impl Default for GameLimits {
    fn default() -> Self {
        GameLimits { max_log_size: 30.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub player_ii_wins: bool,
    /// Game positions evaluated (memo hits excluded).
    pub explored_states: u64,
}

pub struct Solver<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    rounds: usize,
    epsilon: f64,
    memo: HashMap<(Vec<u32>, Vec<u32>), bool>,
    explored: u64,
}

impl<'a> Solver<'a> {
    pub fn new(
        x: &'a FiniteMetricSpace,
        y: &'a FiniteMetricSpace,
        rounds: usize,
        epsilon: f64,
        limits: GameLimits,
    ) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::Argument("a game needs at least one round".into()));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::Argument(format!("epsilon = {epsilon} must be positive")));
        }
        let log_size = rounds as f64 * ((x.n() * y.n()) as f64).ln();
        if log_size > limits.max_log_size {
            return Err(Error::Resource(format!(
                "game with {rounds} rounds on {} x {} points exceeds the size budget \
                 ({log_size:.1} > {})",
                x.n(),
                y.n(),
                limits.max_log_size
            )));
        }
        Ok(Solver {
            x,
            y,
            rounds,
            epsilon,
            memo: HashMap::new(),
            explored: 0,
        })
    }

    pub fn explored_states(&self) -> u64 {
        self.explored
    }

    /// Memoized positions in which player II has a winning continuation.
    pub fn winning_states(&self) -> usize {
        self.memo.values().filter(|&&w| w).count()
    }

    /// Whether appending the pair `(p, q)` keeps every distance within ε.
    fn consistent(&self, a: &[u32], b: &[u32], p: usize, q: usize) -> bool {
        a.iter().zip(b).all(|(&ai, &bi)| {
            (self.x.dist(ai as usize, p) - self.y.dist(bi as usize, q)).abs() < self.epsilon
        })
    }

    fn wins(&mut self, a: &mut Vec<u32>, b: &mut Vec<u32>) -> bool {
        if a.len() == self.rounds {
            self.explored += 1;
            return true;
        }
        if let Some(&known) = self.memo.get(&(a.clone(), b.clone())) {
            return known;
        }
        self.explored += 1;
        let result = self.all_moves_answerable(a, b);
        self.memo.insert((a.clone(), b.clone()), result);
        result
    }

    fn all_moves_answerable(&mut self, a: &mut Vec<u32>, b: &mut Vec<u32>) -> bool {
        for p in 0..self.x.n() {
            if self.answer(a, b, Move::X(p)).is_none() {
                return false;
            }
        }
        for q in 0..self.y.n() {
            if self.answer(a, b, Move::Y(q)).is_none() {
                return false;
            }
        }
        true
    }

    /// Smallest-index winning answer to `mv` in the given position.
    fn answer(&mut self, a: &mut Vec<u32>, b: &mut Vec<u32>, mv: Move) -> Option<usize> {
        match mv {
            Move::X(p) => (0..self.y.n()).find(|&q| self.try_pair(a, b, p, q)),
            Move::Y(q) => (0..self.x.n()).find(|&p| self.try_pair(a, b, p, q)),
        }
    }

    fn try_pair(&mut self, a: &mut Vec<u32>, b: &mut Vec<u32>, p: usize, q: usize) -> bool {
        if !self.consistent(a, b, p, q) {
            return false;
        }
        a.push(p as u32);
        b.push(q as u32);
        let w = self.wins(a, b);
        a.pop();
        b.pop();
        w
    }

    pub fn solve(&mut self) -> bool {
        self.wins(&mut Vec::new(), &mut Vec::new())
    }

    /// Winning answers of player II for every position reachable when player II
    /// follows them.
    pub fn extract_strategy(&mut self) -> Result<Strategy> {
        if !self.solve() {
            return Err(Error::Logic(
                "player I wins this game, so player II has no winning strategy".into(),
            ));
        }
        let mut table = BTreeMap::new();
        let mut a = Vec::new();
        let mut b = Vec::new();
        self.fill_strategy(&mut a, &mut b, &mut table);
        Ok(Strategy {
            rounds: self.rounds,
            epsilon: self.epsilon,
            table,
        })
    }

    fn fill_strategy(
        &mut self,
        a: &mut Vec<u32>,
        b: &mut Vec<u32>,
        table: &mut BTreeMap<GameState, BTreeMap<Move, usize>>,
    ) {
        if a.len() == self.rounds {
            return;
        }
        let moves: Vec<Move> = (0..self.x.n())
            .map(Move::X)
            .chain((0..self.y.n()).map(Move::Y))
            .collect();
        let mut responses = BTreeMap::new();
        for mv in moves {
            let reply = self
                .answer(a, b, mv)
                .expect("every move has an answer in a winning position");
            responses.insert(mv, reply);
            let (p, q) = match mv {
                Move::X(p) => (p, reply),
                Move::Y(q) => (reply, q),
            };
            a.push(p as u32);
            b.push(q as u32);
            let key = state_of(a, b);
            if !table.contains_key(&key) {
                self.fill_strategy(a, b, table);
            }
            a.pop();
            b.pop();
        }
        table.insert(state_of(a, b), responses);
    }
}

fn state_of(a: &[u32], b: &[u32]) -> GameState {
    GameState {
        a: a.iter().map(|&p| p as usize).collect(),
        b: b.iter().map(|&q| q as usize).collect(),
    }
}

/// Player II's responses, keyed by position then by player I's move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub rounds: usize,
    pub epsilon: f64,
    #[serde(with = "table_serde")]
    pub table: BTreeMap<GameState, BTreeMap<Move, usize>>,
}

impl Strategy {
    pub fn respond(&self, state: &GameState, mv: Move) -> Option<usize> {
        self.table.get(state)?.get(&mv).copied()
    }

    /// Number of positions with recorded responses.
    pub fn positions(&self) -> usize {
        self.table.len()
    }

    /// Plays player I's `line` against the table; returns the final position,
    /// or `None` if the table has no answer somewhere along the line.
    pub fn replay(&self, line: &[Move]) -> Option<GameState> {
        let mut state = GameState::initial();
        for &mv in line {
            let reply = self.respond(&state, mv)?;
            match mv {
                Move::X(p) => {
                    state.a.push(p);
                    state.b.push(reply);
                }
                Move::Y(q) => {
                    state.a.push(reply);
                    state.b.push(q);
                }
            }
        }
        Some(state)
    }
}

mod table_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        a: Vec<usize>,
        b: Vec<usize>,
        #[serde(rename = "move")]
        mv: Move,
        response: usize,
    }

    pub fn serialize<S: Serializer>(
        table: &BTreeMap<GameState, BTreeMap<Move, usize>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = table
            .iter()
            .flat_map(|(state, moves)| {
                moves.iter().map(move |(&mv, &response)| Entry {
                    a: state.a.clone(),
                    b: state.b.clone(),
                    mv,
                    response,
                })
            })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<GameState, BTreeMap<Move, usize>>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        let mut table: BTreeMap<GameState, BTreeMap<Move, usize>> = BTreeMap::new();
        for e in entries {
            table
                .entry(GameState { a: e.a, b: e.b })
                .or_default()
                .insert(e.mv, e.response);
        }
        Ok(table)
    }
}

/// Decides `X ≡_{n,ε} Y` with the default size guard.
pub fn player_ii_wins(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    rounds: usize,
    epsilon: f64,
) -> Result<bool> {
    Ok(solve_game(x, y, rounds, epsilon, GameLimits::default())?.player_ii_wins)
}

pub fn solve_game(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    rounds: usize,
    epsilon: f64,
    limits: GameLimits,
) -> Result<GameOutcome> {
    let mut solver = Solver::new(x, y, rounds, epsilon, limits)?;
    let player_ii_wins = solver.solve();
    Ok(GameOutcome {
        player_ii_wins,
        explored_states: solver.explored_states(),
    })
}

pub fn extract_strategy(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    rounds: usize,
    epsilon: f64,
) -> Result<Strategy> {
    Solver::new(x, y, rounds, epsilon, GameLimits::default())?.extract_strategy()
}

/// The point `w` of `y` minimizing `max_i |d_Y(b_i, w) - targets_i|`, with
/// the achieved value. Ties go to the smallest index.
pub fn extension_responder(
    y: &FiniteMetricSpace,
    b_tuple: &[usize],
    targets: &[f64],
) -> Result<(usize, f64)> {
    if b_tuple.len() != targets.len() {
        return Err(Error::Argument(format!(
            "{} tuple points but {} target distances",
            b_tuple.len(),
            targets.len()
        )));
    }
    if y.n() == 0 {
        return Err(Error::Argument("cannot respond in an empty space".into()));
    }
    if let Some(&bad) = b_tuple.iter().find(|&&b| b >= y.n()) {
        return Err(Error::Argument(format!("point {bad} is not in a {}-point space", y.n())));
    }
    let mut best = (0, f64::INFINITY);
    for w in 0..y.n() {
        let achieved = b_tuple
            .iter()
            .zip(targets)
            .map(|(&b, &t)| (t - y.dist(b, w)).abs())
            .fold(0.0, f64::max);
        if achieved < best.1 {
            best = (w, achieved);
        }
    }
    Ok(best)
}

/// Whether player II wins `G(X, Y, n, ε)` by always answering with
/// [`extension_responder`] (targets: the distances from the picked point to
/// the earlier picks on its own side). Checks every line of player I.
pub fn responder_strategy_wins(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    rounds: usize,
    epsilon: f64,
) -> Result<bool> {
    if rounds == 0 || epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Argument("need rounds >= 1 and epsilon > 0".into()));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    responder_lines(x, y, rounds, epsilon, &mut a, &mut b)
}

fn responder_lines(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    rounds: usize,
    epsilon: f64,
    a: &mut Vec<usize>,
    b: &mut Vec<usize>,
) -> Result<bool> {
    if a.len() == rounds {
        return Ok(true);
    }
    let moves = (0..x.n()).map(Move::X).chain((0..y.n()).map(Move::Y));
    for mv in moves {
        let (p, q, achieved) = match mv {
            Move::X(p) => {
                let targets: Vec<f64> = a.iter().map(|&ai| x.dist(ai, p)).collect();
                let (q, c) = extension_responder(y, b, &targets)?;
                (p, q, c)
            }
            Move::Y(q) => {
                let targets: Vec<f64> = b.iter().map(|&bi| y.dist(bi, q)).collect();
                let (p, c) = extension_responder(x, a, &targets)?;
                (p, q, c)
            }
        };
        if achieved >= epsilon {
            return Ok(false);
        }
        a.push(p);
        b.push(q);
        let ok = responder_lines(x, y, rounds, epsilon, a, b)?;
        a.pop();
        b.pop();
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}
