//! Finite posets and the poset game.
//!
//! A move picks a remaining element and deletes it together with everything
//! below it; the player facing the empty poset loses. Positions are the
//! up-closed subsets of the elements, stored as bitmasks (at most 64
//! elements).

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rustc_hash::FxHashMap;

use crate::engine::{self, Game, Move, Outcome, Seat, SolveReport, SolverConfig};
use crate::error::{Error, Result};

pub const MAX_ELEMENTS: usize = 64;

/// A strict partial order, stored transitively closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    /// `below[x]` holds every `y` with `y < x`.
    below: Vec<u64>,
}

fn bit(i: usize) -> u64 {
    1u64 << i
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

impl Poset {
    /// Builds the order generated by `relations` (pairs `(a, b)` meaning `a < b`).
    pub fn new(n: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels(labels, relations)
    }

    pub fn with_labels(labels: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        if n > MAX_ELEMENTS {
            return Err(Error::Bound { size: n, bound: MAX_ELEMENTS });
        }
        let mut below = vec![0u64; n];
        for &(a, b) in relations {
            for i in [a, b] {
                if i >= n {
                    return Err(Error::Index { index: i, size: n });
                }
            }
            below[b] |= bit(a);
        }
        // Warshall on bit rows: anything below k is below whatever k is below.
        for k in 0..n {
            for x in 0..n {
                if below[x] & bit(k) != 0 {
                    below[x] |= below[k];
                }
            }
        }
        if let Some(x) = (0..n).find(|&x| below[x] & bit(x) != 0) {
            return Err(Error::Cycle(x));
        }
        Ok(Poset { labels, below })
    }

    pub fn empty() -> Self {
        Poset { labels: Vec::new(), below: Vec::new() }
    }

    pub fn antichain(n: usize) -> Result<Self> {
        Self::new(n, &[])
    }

    pub fn chain(n: usize) -> Result<Self> {
        let rel: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &rel)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.below[y] & bit(x) != 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn full(&self) -> u64 {
        full_mask(self.len())
    }

    /// `{x}` together with every element below `x`.
    pub fn downset(&self, x: usize) -> Result<u64> {
        if x >= self.len() {
            return Err(Error::Index { index: x, size: self.len() });
        }
        Ok(self.below[x] | bit(x))
    }

    pub fn upset(&self, x: usize) -> u64 {
        (0..self.len()).filter(|&y| self.lt(x, y)).fold(bit(x), |m, y| m | bit(y))
    }

    pub fn is_up_closed(&self, set: u64) -> bool {
        bits(set).all(|x| self.upset(x) & !set == 0)
    }

    /// The element below all others, if any.
    pub fn minimum(&self) -> Option<usize> {
        let n = self.len();
        (0..n).find(|&m| (0..n).all(|x| x == m || self.lt(m, x)))
    }

    /// Covering pairs `(a, b)`: `a < b` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for b in 0..n {
            for a in bits(self.below[b]) {
                let between = bits(self.below[b]).any(|c| self.lt(a, c));
                if !between {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Serializes to the `.poset` text format, writing only covering pairs.
    pub fn to_text(&self) -> String {
        let mut s = format!("poset {}\n", self.len());
        for (i, l) in self.labels.iter().enumerate() {
            if *l != i.to_string() {
                let _ = writeln!(s, "label {i} {l}");
            }
        }
        for (a, b) in self.covers() {
            let _ = writeln!(s, "{a} < {b}");
        }
        s
    }

    /// Restriction to `keep`, renumbered in increasing index order.
    pub fn restrict(&self, keep: u64) -> Poset {
        let idx: Vec<usize> = bits(keep & self.full()).collect();
        let below = idx
            .iter()
            .map(|&x| {
                idx.iter()
                    .enumerate()
                    .filter(|&(_, &y)| self.lt(y, x))
                    .fold(0u64, |m, (j, _)| m | bit(j))
            })
            .collect();
        let labels = idx.iter().map(|&x| self.labels[x].clone()).collect();
        Poset { labels, below }
    }
}

/// Parses the `.poset` format: a `poset <n>` header, optional
/// `label <i> <name>` lines, and relation lines `<i> < <j>`. Any generating
/// set of relations is accepted; `#` starts a comment.
pub fn parse_poset(text: &str) -> Result<Poset> {
    let mut n: Option<usize> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut rel = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(size) = n else {
            match toks.as_slice() {
                ["poset", k] => {
                    let k: usize = k.parse().map_err(|_| Error::parse(lineno, "bad element count"))?;
                    if k > MAX_ELEMENTS {
                        return Err(Error::Bound { size: k, bound: MAX_ELEMENTS });
                    }
                    n = Some(k);
                    labels = (0..k).map(|i| i.to_string()).collect();
                    continue;
                }
                _ => return Err(Error::parse(lineno, "expected `poset <n>` header")),
            }
        };
        let index = |t: &str| -> Result<usize> {
            let i: usize = t.parse().map_err(|_| Error::parse(lineno, format!("bad index `{t}`")))?;
            if i >= size {
                return Err(Error::Index { index: i, size });
            }
            Ok(i)
        };
        if toks[0] == "label" {
            if toks.len() != 3 {
                return Err(Error::parse(lineno, "expected `label <i> <name>`"));
            }
            labels[index(toks[1])?] = toks[2].to_string();
        } else if let Some((a, b)) = line.split_once('<') {
            rel.push((index(a.trim())?, index(b.trim())?));
        } else {
            return Err(Error::parse(lineno, format!("unrecognized line `{line}`")));
        }
    }
    if n.is_none() {
        return Err(Error::parse(0, "missing `poset <n>` header"));
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
        return Err(Error::parse(0, format!("duplicate label `{dup}`")));
    }
    Poset::with_labels(labels, &rel)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct PosetPosition {
    pub remaining: u64,
    pub mover: Seat,
}

impl PosetPosition {
    pub fn start(p: &Poset) -> Self {
        PosetPosition { remaining: p.full(), mover: Seat::First }
    }
}

/// The poset game on a fixed order; moves are element indices.
#[derive(Clone, Debug)]
pub struct PosetGame {
    downsets: Vec<u64>,
    #[cfg(debug_assertions)]
    upsets: Vec<u64>,
}

impl PosetGame {
    pub fn new(p: &Poset) -> Self {
        PosetGame {
            downsets: (0..p.len()).map(|x| p.below[x] | bit(x)).collect(),
            #[cfg(debug_assertions)]
            upsets: (0..p.len()).map(|x| p.upset(x)).collect(),
        }
    }
}

impl Game for PosetGame {
    type State = PosetPosition;

    fn mover(&self, s: &PosetPosition) -> Seat {
        s.mover
    }

    fn terminal(&self, s: &PosetPosition) -> Option<Outcome> {
        (s.remaining == 0).then(|| Outcome::loss_for(s.mover))
    }

    fn moves(&self, s: &PosetPosition) -> Vec<Move> {
        bits(s.remaining).map(|x| x as Move).collect()
    }

    fn play(&self, s: &PosetPosition, mv: Move) -> PosetPosition {
        let remaining = s.remaining & !self.downsets[mv as usize];
        #[cfg(debug_assertions)]
        debug_assert!(
            bits(remaining).all(|x| self.upsets[x] & !remaining == 0),
            "position {remaining:#x} is not up-closed"
        );
        PosetPosition { remaining, mover: s.mover.other() }
    }
}

/// Solves the game from the full poset. Poset games have no draws.
pub fn solve_poset(p: &Poset, config: &SolverConfig) -> Result<SolveReport> {
    solve_poset_position(p, PosetPosition::start(p), config)
}

pub fn solve_poset_position(
    p: &Poset,
    pos: PosetPosition,
    config: &SolverConfig,
) -> Result<SolveReport> {
    if pos.remaining == 0 {
        return Ok(SolveReport {
            outcome: Outcome::loss_for(pos.mover),
            optimal_moves: Vec::new(),
            states_visited: 1,
            table_size: 0,
        });
    }
    engine::optimal_moves(&PosetGame::new(p), &pos, config)
}

/// Grundy values of poset-game positions, memoized by remaining set.
pub struct Grundy {
    downsets: Vec<u64>,
    memo: FxHashMap<u64, u32>,
    max_states: usize,
}

impl Grundy {
    pub fn new(p: &Poset, max_states: usize) -> Self {
        Grundy {
            downsets: (0..p.len()).map(|x| p.below[x] | bit(x)).collect(),
            memo: FxHashMap::default(),
            max_states,
        }
    }

    pub fn value(&mut self, remaining: u64) -> Result<u32> {
        if remaining == 0 {
            return Ok(0);
        }
        if let Some(&g) = self.memo.get(&remaining) {
            return Ok(g);
        }
        // values never exceed the element count, so 128 bits is enough
        let mut seen = 0u128;
        for x in bits(remaining) {
            let g = self.value(remaining & !self.downsets[x])?;
            seen |= 1u128 << g;
        }
        let mex = (!seen).trailing_zeros();
        if self.memo.len() >= self.max_states {
            return Err(Error::ResourceBound { limit: self.max_states });
        }
        self.memo.insert(remaining, mex);
        Ok(mex)
    }
}

/// Grundy value of a position (the mover is irrelevant).
pub fn grundy(p: &Poset, pos: &PosetPosition, max_states: usize) -> Result<u32> {
    Grundy::new(p, max_states).value(pos.remaining)
}

/// A poset with an element below every other one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimumPoset {
    poset: Poset,
    minimum: usize,
}

impl MinimumPoset {
    pub fn new(poset: Poset) -> Result<Self> {
        let minimum = poset
            .minimum()
            .ok_or_else(|| Error::Parameter("poset has no minimum element".into()))?;
        Ok(MinimumPoset { poset, minimum })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn minimum(&self) -> usize {
        self.minimum
    }

    pub fn into_poset(self) -> Poset {
        self.poset
    }
}

/// Appends a new element `m` below every existing element.
///
/// The new element gets index `n` and label `m` (primed until unique).
pub fn add_minimum(p: &Poset) -> MinimumPoset {
    let n = p.len();
    assert!(n < MAX_ELEMENTS, "add_minimum needs room for one more element");
    let mut label = String::from("m");
    while p.labels.contains(&label) {
        label.push('\'');
    }
    let mut labels = p.labels.clone();
    labels.push(label);
    let mut below: Vec<u64> = p.below.iter().map(|b| b | bit(n)).collect();
    below.push(0);
    MinimumPoset { poset: Poset { labels, below }, minimum: n }
}

/// All winning first moves of a minimum poset game.
pub fn mp_move(mp: &MinimumPoset, config: &SolverConfig) -> Result<SolveReport> {
    let report = solve_poset(&mp.poset, config)?;
    if report.outcome != Outcome::FirstWin {
        return Err(Error::Inconsistent(format!(
            "minimum poset game solved to {}",
            report.outcome
        )));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpHardReport {
    /// Value of the original game.
    pub original: Outcome,
    /// Winning first moves in the extended game.
    pub extended: SolveReport,
    /// Index of the added minimum.
    pub minimum: usize,
    pub minimum_wins: bool,
    pub pass: bool,
}

/// Checks that taking the added minimum wins exactly when the original game
/// is a second-player win, and is then the only winning move.
pub fn verify_mphard_instance(p: &Poset, config: &SolverConfig) -> Result<MpHardReport> {
    let original = solve_poset(p, config)?.outcome;
    let mp = add_minimum(p);
    let extended = mp_move(&mp, config)?;
    let m = mp.minimum as Move;
    let minimum_wins = extended.optimal_moves.contains(&m);
    let second_wins = original == Outcome::SecondWin;
    let pass = minimum_wins == second_wins && (!second_wins || extended.optimal_moves == [m]);
    Ok(MpHardReport { original, extended, minimum: mp.minimum, minimum_wins, pass })
}

/// Chomp on a `rows x cols` bar, poisoned square removed.
///
/// Cell `(i, j)` has index `i * cols + j` and label `r{i}c{j}`;
/// `(i, j) <= (i', j')` iff `i <= i'` and `j <= j'`. The poison is at
/// `(rows-1, cols-1)`, so it would be the last index.
pub fn gen_chomp(rows: usize, cols: usize) -> Result<MinimumPoset> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::Parameter(format!("chomp needs at least two squares, got {rows}x{cols}")));
    }
    let n = rows * cols - 1;
    if n > MAX_ELEMENTS {
        return Err(Error::Bound { size: n, bound: MAX_ELEMENTS });
    }
    let cell = |k: usize| (k / cols, k % cols);
    let labels = (0..n).map(|k| format!("r{}c{}", k / cols, k % cols)).collect();
    let mut rel = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let ((i, j), (i2, j2)) = (cell(a), cell(b));
            if a != b && i <= i2 && j <= j2 {
                rel.push((a, b));
            }
        }
    }
    MinimumPoset::new(Poset::with_labels(labels, &rel)?)
}

/// Disjoint chains; chain `c` occupies a consecutive index range.
pub fn gen_nim(chains: &[usize]) -> Result<Poset> {
    if chains.contains(&0) {
        return Err(Error::Parameter("chain lengths must be positive".into()));
    }
    let n: usize = chains.iter().sum();
    if n > MAX_ELEMENTS {
        return Err(Error::Bound { size: n, bound: MAX_ELEMENTS });
    }
    let mut rel = Vec::new();
    let mut start = 0;
    for &len in chains {
        rel.extend((start + 1..start + len).map(|i| (i - 1, i)));
        start += len;
    }
    Poset::new(n, &rel)
}

/// Every strict partial order on `{0, .., n-1}` (labeled, not up to isomorphism).
pub fn all_posets(n: usize) -> Vec<Poset> {
    assert!(n <= 5, "enumeration is exhaustive over relation subsets");
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for subset in 0u64..(1u64 << pairs.len()) {
        let mut below = vec![0u64; n];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if subset & bit(k) != 0 {
                below[b] |= bit(a);
            }
        }
        // closed: a < b < c implies a < c; antisymmetric: never both a < b and b < a
        let closed = (0..n).all(|b| bits(below[b]).all(|a| below[a] & !below[b] == 0));
        let antisym = (0..n).all(|b| bits(below[b]).all(|a| below[a] & bit(b) == 0));
        if closed && antisym {
            out.push(Poset { labels: (0..n).map(|i| i.to_string()).collect(), below });
        }
    }
    out
}

/// Random order on `n` elements: each pair of a random linear extension is
/// related with probability `density`, then closed.
pub fn random_poset<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Poset {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut rel = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                rel.push((order[i], order[j]));
            }
        }
    }
    Poset::new(n, &rel).expect("relations follow a linear extension")
}
