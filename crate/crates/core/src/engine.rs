//! Alternating-move games and the memoized backward-induction solver.
//!
//! Every game in the crate implements [`Game`]. States are small bit-packed
//! values that double as transposition keys, and the mover is a function of
//! the state so wrappers such as [`ChooseSide`] can hand the move to either
//! seat.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// Move identifier. Games use universe or element indices; the seat choice
/// of [`ChooseSide`] uses the reserved negative ids below.
pub type Move = i32;

pub const CHOOSE_FIRST: Move = -1;
pub const CHOOSE_SECOND: Move = -2;

pub const DEFAULT_MAX_STATES: usize = 1 << 27;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Seat {
    First,
    Second,
}

impl Seat {
    pub fn other(self) -> Seat {
        match self {
            Seat::First => Seat::Second,
            Seat::Second => Seat::First,
        }
    }

    /// The outcome this seat ranks highest.
    pub fn best(self) -> Outcome {
        match self {
            Seat::First => Outcome::FirstWin,
            Seat::Second => Outcome::SecondWin,
        }
    }

    /// Rank of `outcome` for this seat, higher is better.
    pub fn rank(self, outcome: Outcome) -> u8 {
        let r = match outcome {
            Outcome::FirstWin => 2,
            Outcome::Draw => 1,
            Outcome::SecondWin => 0,
        };
        match self {
            Seat::First => r,
            Seat::Second => 2 - r,
        }
    }

    pub fn prefers(self, a: Outcome, b: Outcome) -> bool {
        self.rank(a) > self.rank(b)
    }

    /// The most preferred of `outcomes`, or `None` if empty.
    pub fn pick(self, outcomes: impl IntoIterator<Item = Outcome>) -> Option<Outcome> {
        outcomes.into_iter().max_by_key(|&o| self.rank(o))
    }
}

/// Game value, stated in terms of the seats (not of the mover).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    FirstWin,
    Draw,
    SecondWin,
}

impl Outcome {
    /// Value of the same play with the seats exchanged.
    pub fn negate(self) -> Outcome {
        match self {
            Outcome::FirstWin => Outcome::SecondWin,
            Outcome::Draw => Outcome::Draw,
            Outcome::SecondWin => Outcome::FirstWin,
        }
    }

    pub fn win_for(seat: Seat) -> Outcome {
        seat.best()
    }

    pub fn loss_for(seat: Seat) -> Outcome {
        seat.other().best()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::FirstWin => "FIRST_WIN",
            Outcome::Draw => "DRAW",
            Outcome::SecondWin => "SECOND_WIN",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "FIRST_WIN" => Ok(Outcome::FirstWin),
            "DRAW" => Ok(Outcome::Draw),
            "SECOND_WIN" => Ok(Outcome::SecondWin),
            _ => Err(Error::parse(0, format!("unknown outcome `{s}`"))),
        }
    }
}

/// A finite, acyclic two-player game.
///
/// Implementations must enumerate moves deterministically in ascending
/// order, and report an outcome exactly for the states with no moves.
pub trait Game: Sync {
    type State: Copy + Eq + Hash + Send + Sync + fmt::Debug;

    fn mover(&self, state: &Self::State) -> Seat;

    /// `Some` iff the state is terminal.
    fn terminal(&self, state: &Self::State) -> Option<Outcome>;

    fn moves(&self, state: &Self::State) -> Vec<Move>;

    fn play(&self, state: &Self::State, mv: Move) -> Self::State;
}

impl<G: Game> Game for &G {
    type State = G::State;

    fn mover(&self, state: &Self::State) -> Seat {
        (**self).mover(state)
    }

    fn terminal(&self, state: &Self::State) -> Option<Outcome> {
        (**self).terminal(state)
    }

    fn moves(&self, state: &Self::State) -> Vec<Move> {
        (**self).moves(state)
    }

    fn play(&self, state: &Self::State, mv: Move) -> Self::State {
        (**self).play(state, mv)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Ceiling on the entries of any single transposition table.
    pub max_states: usize,
    /// Worker count for root-move splitting; 1 runs on the calling thread.
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_states: DEFAULT_MAX_STATES, threads: 1 }
    }
}

impl SolverConfig {
    pub fn with_max_states(mut self, max_states: usize) -> Self {
        self.max_states = max_states;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: Outcome,
    /// Value-preserving root moves, ascending.
    pub optimal_moves: Vec<Move>,
    pub states_visited: u64,
    pub table_size: u64,
}

/// Memoized minimax with mover-preference cutoffs.
///
/// Cutoffs only stop the scan once the mover's best possible outcome is
/// found, so every stored value is exact.
pub struct Solver<G: Game> {
    game: G,
    table: FxHashMap<G::State, Outcome>,
    max_states: usize,
    visited: u64,
}

impl<G: Game> Solver<G> {
    pub fn new(game: G, max_states: usize) -> Self {
        Solver { game, table: FxHashMap::default(), max_states, visited: 0 }
    }

    pub fn solve(&mut self, state: &G::State) -> Result<Outcome> {
        self.visited += 1;
        if let Some(&o) = self.table.get(state) {
            return Ok(o);
        }
        if let Some(o) = self.game.terminal(state) {
            return Ok(o);
        }
        let mover = self.game.mover(state);
        let best = mover.best();
        let mut value: Option<Outcome> = None;
        for mv in self.game.moves(state) {
            let child = self.game.play(state, mv);
            let o = self.solve(&child)?;
            if value.is_none_or(|v| mover.prefers(o, v)) {
                value = Some(o);
                if o == best {
                    break;
                }
            }
        }
        let value = value.ok_or_else(|| {
            Error::Inconsistent(format!("non-terminal state {state:?} has no moves"))
        })?;
        if self.table.len() >= self.max_states {
            return Err(Error::ResourceBound { limit: self.max_states });
        }
        self.table.insert(*state, value);
        Ok(value)
    }

    pub fn states_visited(&self) -> u64 {
        self.visited
    }

    pub fn table_size(&self) -> usize {
        self.table.len()
    }

    pub fn game(&self) -> &G {
        &self.game
    }
}

/// Backward-induction value of `state`.
pub fn solve<G: Game>(game: &G, state: &G::State, config: &SolverConfig) -> Result<Outcome> {
    Solver::new(game, config.max_states).solve(state)
}

/// Value of `state` together with every value-preserving root move.
///
/// Each root child is solved with its own table, so the report (including
/// the counters) does not depend on `config.threads`.
pub fn optimal_moves<G: Game>(
    game: &G,
    state: &G::State,
    config: &SolverConfig,
) -> Result<SolveReport> {
    if game.terminal(state).is_some() {
        return Err(Error::Terminal);
    }
    let moves = game.moves(state);
    let solve_child = |&mv: &Move| -> Result<(Outcome, u64, u64)> {
        let mut solver = Solver::new(game, config.max_states);
        let o = solver.solve(&game.play(state, mv))?;
        Ok((o, solver.states_visited(), solver.table_size() as u64))
    };
    let children: Vec<(Outcome, u64, u64)> = if config.threads > 1 && moves.len() > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::Inconsistent(e.to_string()))?;
        pool.install(|| moves.par_iter().map(solve_child).collect::<Result<Vec<_>>>())?
    } else {
        moves.iter().map(solve_child).collect::<Result<Vec<_>>>()?
    };
    let mover = game.mover(state);
    let outcome = mover
        .pick(children.iter().map(|c| c.0))
        .ok_or_else(|| Error::Inconsistent(format!("non-terminal state {state:?} has no moves")))?;
    let mut optimal: Vec<Move> = moves
        .iter()
        .zip(&children)
        .filter(|(_, c)| c.0 == outcome)
        .map(|(&m, _)| m)
        .collect();
    optimal.sort_unstable();
    Ok(SolveReport {
        outcome,
        optimal_moves: optimal,
        states_visited: 1 + children.iter().map(|c| c.1).sum::<u64>(),
        table_size: children.iter().map(|c| c.2).sum(),
    })
}

/// Re-derives the value of `state` and compares it with `claimed`.
///
/// The top `depth` plies are expanded without cutoffs using a private memo;
/// frontier states below that are solved by a fresh [`Solver`]. Neither
/// table is shared with any other solve.
pub fn audit_strategy<G: Game>(
    game: &G,
    state: &G::State,
    claimed: Outcome,
    depth: usize,
    max_states: usize,
) -> Result<bool> {
    struct Auditor<'g, G: Game> {
        game: &'g G,
        memo: FxHashMap<G::State, Outcome>,
        frontier: Solver<&'g G>,
        max_states: usize,
    }

    impl<G: Game> Auditor<'_, G> {
        fn value(&mut self, state: &G::State, depth: usize) -> Result<Outcome> {
            if let Some(o) = self.game.terminal(state) {
                return Ok(o);
            }
            if depth == 0 {
                return self.frontier.solve(state);
            }
            if let Some(&o) = self.memo.get(state) {
                return Ok(o);
            }
            let mover = self.game.mover(state);
            let mut values = Vec::new();
            for mv in self.game.moves(state) {
                let child = self.game.play(state, mv);
                values.push(self.value(&child, depth - 1)?);
            }
            let v = mover.pick(values).ok_or_else(|| {
                Error::Inconsistent(format!("non-terminal state {state:?} has no moves"))
            })?;
            if self.memo.len() >= self.max_states {
                return Err(Error::ResourceBound { limit: self.max_states });
            }
            self.memo.insert(*state, v);
            Ok(v)
        }
    }

    let mut auditor = Auditor {
        game,
        memo: FxHashMap::default(),
        frontier: Solver::new(game, max_states),
        max_states,
    };
    Ok(auditor.value(state, depth)? == claimed)
}

/// The same game with the two seats exchanged.
#[derive(Clone, Debug)]
pub struct Swapped<G>(pub G);

impl<G: Game> Game for Swapped<G> {
    type State = G::State;

    fn mover(&self, state: &Self::State) -> Seat {
        self.0.mover(state).other()
    }

    fn terminal(&self, state: &Self::State) -> Option<Outcome> {
        self.0.terminal(state).map(Outcome::negate)
    }

    fn moves(&self, state: &Self::State) -> Vec<Move> {
        self.0.moves(state)
    }

    fn play(&self, state: &Self::State, mv: Move) -> Self::State {
        self.0.play(state, mv)
    }
}

/// A game whose first move picks the seat to play in the wrapped game.
#[derive(Clone, Debug)]
pub struct ChooseSide<G: Game> {
    inner: G,
    start: G::State,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum SideState<S> {
    Choosing,
    /// Wrapper's first player holds the first seat of the inner game.
    AsFirst(S),
    /// Wrapper's first player holds the second seat of the inner game.
    AsSecond(S),
}

/// Wraps the game starting at `start` in a seat choice.
pub fn choose_side_transform<G: Game>(inner: G, start: G::State) -> (ChooseSide<G>, SideState<G::State>) {
    (ChooseSide { inner, start }, SideState::Choosing)
}

impl<G: Game> Game for ChooseSide<G> {
    type State = SideState<G::State>;

    fn mover(&self, state: &Self::State) -> Seat {
        match state {
            SideState::Choosing => Seat::First,
            SideState::AsFirst(s) => self.inner.mover(s),
            SideState::AsSecond(s) => self.inner.mover(s).other(),
        }
    }

    fn terminal(&self, state: &Self::State) -> Option<Outcome> {
        match state {
            SideState::Choosing => None,
            SideState::AsFirst(s) => self.inner.terminal(s),
            SideState::AsSecond(s) => self.inner.terminal(s).map(Outcome::negate),
        }
    }

    fn moves(&self, state: &Self::State) -> Vec<Move> {
        match state {
            SideState::Choosing => vec![CHOOSE_SECOND, CHOOSE_FIRST],
            SideState::AsFirst(s) | SideState::AsSecond(s) => self.inner.moves(s),
        }
    }

    fn play(&self, state: &Self::State, mv: Move) -> Self::State {
        match state {
            SideState::Choosing if mv == CHOOSE_FIRST => SideState::AsFirst(self.start),
            SideState::Choosing => SideState::AsSecond(self.start),
            SideState::AsFirst(s) => SideState::AsFirst(self.inner.play(s, mv)),
            SideState::AsSecond(s) => SideState::AsSecond(self.inner.play(s, mv)),
        }
    }
}
