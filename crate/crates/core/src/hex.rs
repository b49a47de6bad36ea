//! Hex on an `n x n` rhombus.
//!
//! Cell `(r, c)` has index `r * n + c`. Row 0 is the top edge, column 0 the
//! left edge. Red joins top to bottom, Blue joins left to right, and
//! `(r, c)` touches `(r±1, c)`, `(r, c±1)`, `(r-1, c+1)` and `(r+1, c-1)`.
//! Boards are at most 8 x 8 so a colour class fits one `u64`.

use std::fmt::Write as _;

use rand::Rng;

use crate::engine::{self, Game, Move, Outcome, Seat, SolveReport, SolverConfig};
use crate::error::{Error, Result};

pub const MAX_SIDE: usize = 8;
pub const DEFAULT_THEOREM_BOUND: usize = 3;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    Empty,
    Red,
    Blue,
}

/// Edge masks and shift guards for one board size.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
struct Geometry {
    n: usize,
    full: u64,
    top: u64,
    bottom: u64,
    left: u64,
    right: u64,
}

impl Geometry {
    fn new(n: usize) -> Self {
        let cells = n * n;
        let full = if cells == 64 { u64::MAX } else { (1u64 << cells) - 1 };
        let row = (1u64 << n) - 1;
        let left = (0..n).fold(0u64, |m, r| m | 1u64 << (r * n));
        Geometry {
            n,
            full,
            top: row,
            bottom: row << (n * (n - 1)),
            left,
            right: left << (n - 1),
        }
    }

    fn neighbours(&self, m: u64) -> u64 {
        let n = self.n as u32;
        let vertical = m.checked_shl(n).unwrap_or(0) | m.checked_shr(n).unwrap_or(0);
        let east = (m << 1) & !self.left;
        let west = (m >> 1) & !self.right;
        // (r-1, c+1) and (r+1, c-1)
        let north_east = (m >> (n - 1)) & !self.left;
        let south_west = (m << (n - 1)) & !self.right;
        (vertical | east | west | north_east | south_west) & self.full
    }

    /// True iff `stones` contain a path from `from` edge to `to` edge.
    fn joins(&self, stones: u64, from: u64, to: u64) -> bool {
        let mut reach = stones & from;
        loop {
            if reach & to != 0 {
                return true;
            }
            let next = reach | (self.neighbours(reach) & stones);
            if next == reach {
                return false;
            }
            reach = next;
        }
    }

    fn red_joins(&self, stones: u64) -> bool {
        self.joins(stones, self.top, self.bottom)
    }

    fn blue_joins(&self, stones: u64) -> bool {
        self.joins(stones, self.left, self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HexPosition {
    geo: Geometry,
    red: u64,
    blue: u64,
}

impl HexPosition {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SIDE {
            return Err(Error::Bound { size: n, bound: MAX_SIDE });
        }
        Ok(HexPosition { geo: Geometry::new(n), red: 0, blue: 0 })
    }

    pub fn from_masks(n: usize, red: u64, blue: u64) -> Result<Self> {
        let mut q = Self::empty(n)?;
        if (red | blue) & !q.geo.full != 0 {
            return Err(Error::Dimension(format!("stones outside a {n}x{n} board")));
        }
        if red & blue != 0 {
            return Err(Error::Overlap((red & blue).trailing_zeros() as usize));
        }
        q.red = red;
        q.blue = blue;
        Ok(q)
    }

    pub fn side(&self) -> usize {
        self.geo.n
    }

    pub fn index(&self, r: usize, c: usize) -> usize {
        r * self.geo.n + c
    }

    pub fn cell(&self, r: usize, c: usize) -> Cell {
        let b = 1u64 << self.index(r, c);
        if self.red & b != 0 {
            Cell::Red
        } else if self.blue & b != 0 {
            Cell::Blue
        } else {
            Cell::Empty
        }
    }

    pub fn red_mask(&self) -> u64 {
        self.red
    }

    pub fn blue_mask(&self) -> u64 {
        self.blue
    }

    pub fn empty_mask(&self) -> u64 {
        self.geo.full & !(self.red | self.blue)
    }

    /// Empty cells in row-major order.
    pub fn empty_cells(&self) -> Vec<usize> {
        let e = self.empty_mask();
        (0..self.geo.n * self.geo.n).filter(|&i| e >> i & 1 == 1).collect()
    }

    pub fn red_connected(&self) -> bool {
        self.geo.red_joins(self.red)
    }

    pub fn blue_connected(&self) -> bool {
        self.geo.blue_joins(self.blue)
    }

    fn check_extra(&self, extra: u64) -> Result<()> {
        let bad = extra & !self.empty_mask();
        if bad != 0 {
            return Err(Error::Overlap(bad.trailing_zeros() as usize));
        }
        Ok(())
    }

    /// Red stones plus `extra` (a mask of empty cells) join top and bottom.
    pub fn red_complete(&self, extra: u64) -> Result<bool> {
        self.check_extra(extra)?;
        Ok(self.red_complete_unchecked(extra))
    }

    /// Blue stones plus `extra` join left and right.
    pub fn blue_complete(&self, extra: u64) -> Result<bool> {
        self.check_extra(extra)?;
        Ok(self.blue_complete_unchecked(extra))
    }

    pub(crate) fn red_complete_unchecked(&self, extra: u64) -> bool {
        self.geo.red_joins(self.red | extra)
    }

    pub(crate) fn blue_complete_unchecked(&self, extra: u64) -> bool {
        self.geo.blue_joins(self.blue | extra)
    }

    /// Reflection in the main diagonal with the colours exchanged.
    pub fn transpose(&self) -> HexPosition {
        let n = self.geo.n;
        HexPosition {
            geo: self.geo,
            red: transpose_mask(n, self.blue),
            blue: transpose_mask(n, self.red),
        }
    }

    pub fn to_text(&self) -> String {
        let n = self.geo.n;
        let mut s = format!("hex {n}\n");
        for r in 0..n {
            for c in 0..n {
                s.push(match self.cell(r, c) {
                    Cell::Empty => '.',
                    Cell::Red => 'R',
                    Cell::Blue => 'B',
                });
            }
            s.push('\n');
        }
        s
    }
}

/// Transposes a cell mask of an `n x n` board.
pub fn transpose_mask(n: usize, m: u64) -> u64 {
    (0..n * n)
        .filter(|&i| m >> i & 1 == 1)
        .fold(0u64, |acc, i| acc | 1u64 << ((i % n) * n + i / n))
}

/// Parses the `.hex` format: `hex <n>` then `n` rows over `{R, B, .}`,
/// top row first.
pub fn parse_hex(text: &str) -> Result<HexPosition> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(0, "missing `hex <n>` header"))?;
    let n: usize = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["hex", k] => k.parse().map_err(|_| Error::parse(hl, "bad board size"))?,
        _ => return Err(Error::parse(hl, "expected `hex <n>` header")),
    };
    let mut q = HexPosition::empty(n)?;
    let mut rows = 0;
    for (lineno, line) in lines {
        if rows == n {
            return Err(Error::Dimension(format!("more than {n} rows")));
        }
        let chars: Vec<char> = line.chars().filter(|c| !c.is_whitespace()).collect();
        for (c, ch) in chars.iter().enumerate() {
            let stone = match ch {
                '.' => continue,
                'R' => &mut q.red,
                'B' => &mut q.blue,
                other => return Err(Error::parse(lineno, format!("unexpected cell `{other}`"))),
            };
            if c < n {
                *stone |= 1u64 << (rows * n + c);
            }
        }
        if chars.len() != n {
            return Err(Error::Dimension(format!("row {rows} has {} cells, expected {n}", chars.len())));
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::Dimension(format!("{rows} rows, expected {n}")));
    }
    Ok(q)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct HexState {
    pub red: u64,
    pub blue: u64,
}

/// Hex from a given position with Red (the first seat) to move.
#[derive(Clone, Debug)]
pub struct HexGame {
    geo: Geometry,
    start_stones: u32,
}

impl HexGame {
    pub fn new(q: &HexPosition) -> (HexGame, HexState) {
        let game = HexGame { geo: q.geo, start_stones: (q.red | q.blue).count_ones() };
        (game, HexState { red: q.red, blue: q.blue })
    }
}

impl Game for HexGame {
    type State = HexState;

    fn mover(&self, s: &HexState) -> Seat {
        let placed = (s.red | s.blue).count_ones() - self.start_stones;
        if placed.is_multiple_of(2) {
            Seat::First
        } else {
            Seat::Second
        }
    }

    fn terminal(&self, s: &HexState) -> Option<Outcome> {
        if self.geo.red_joins(s.red) {
            Some(Outcome::FirstWin)
        } else if self.geo.blue_joins(s.blue) {
            Some(Outcome::SecondWin)
        } else if (s.red | s.blue) == self.geo.full {
            // unreachable on real boards: a full board always has a winner
            Some(Outcome::Draw)
        } else {
            None
        }
    }

    fn moves(&self, s: &HexState) -> Vec<Move> {
        let empty = self.geo.full & !(s.red | s.blue);
        (0..64).filter(|&i| empty >> i & 1 == 1).map(|i| i as Move).collect()
    }

    fn play(&self, s: &HexState, mv: Move) -> HexState {
        let b = 1u64 << mv;
        match self.mover(s) {
            Seat::First => HexState { red: s.red | b, blue: s.blue },
            Seat::Second => HexState { red: s.red, blue: s.blue | b },
        }
    }
}

/// Solves `q` with Red to move. Decided boards get an empty move list.
pub fn solve_hex(q: &HexPosition, config: &SolverConfig) -> Result<SolveReport> {
    let (game, start) = HexGame::new(q);
    if let Some(outcome) = game.terminal(&start) {
        return Ok(SolveReport { outcome, optimal_moves: Vec::new(), states_visited: 1, table_size: 0 });
    }
    engine::optimal_moves(&game, &start, config)
}

/// Does Red, moving first, have a winning strategy from `q`?
pub fn decision_hex(q: &HexPosition, config: &SolverConfig) -> Result<bool> {
    let (game, start) = HexGame::new(q);
    Ok(engine::solve(&game, &start, config)? == Outcome::FirstWin)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct HexTheoremReport {
    pub n: usize,
    pub colorings: u64,
    /// First coloring (red mask) violating exclusivity, if any.
    pub counterexample: Option<u64>,
}

impl HexTheoremReport {
    pub fn pass(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn exactly_one_joins(geo: &Geometry, red: u64) -> bool {
    let blue = geo.full & !red;
    geo.red_joins(red) != geo.blue_joins(blue)
}

/// Checks every full two-colouring of the `n x n` board has exactly one
/// winner. `n` must not exceed `bound`.
pub fn hex_no_draw_check(n: usize, bound: usize) -> Result<HexTheoremReport> {
    if n == 0 || n > bound || n > 5 {
        return Err(Error::Bound { size: n, bound: bound.min(5) });
    }
    let geo = Geometry::new(n);
    let colorings = 1u64 << (n * n);
    let counterexample = (0..colorings).find(|&red| !exactly_one_joins(&geo, red));
    Ok(HexTheoremReport { n, colorings, counterexample })
}

/// Sampled version of [`hex_no_draw_check`] for boards beyond the
/// exhaustive bound.
pub fn hex_no_draw_sample<R: Rng + ?Sized>(n: usize, samples: u64, rng: &mut R) -> Result<HexTheoremReport> {
    if n == 0 || n > MAX_SIDE {
        return Err(Error::Bound { size: n, bound: MAX_SIDE });
    }
    let geo = Geometry::new(n);
    let counterexample = (0..samples)
        .map(|_| rng.random::<u64>() & geo.full)
        .find(|&red| !exactly_one_joins(&geo, red));
    Ok(HexTheoremReport { n, colorings: samples, counterexample })
}

/// Cell list `r,c` pairs for reports.
pub fn describe_cells(q: &HexPosition, mask: u64) -> String {
    let n = q.side();
    let mut s = String::new();
    for i in (0..n * n).filter(|&i| mask >> i & 1 == 1) {
        if !s.is_empty() {
            s.push(' ');
        }
        let _ = write!(s, "{},{}", i / n, i % n);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Union-find with four virtual border nodes, independent of the
    /// bitboard flood fill.
    struct Dsu(Vec<usize>);

    impl Dsu {
        fn find(&mut self, x: usize) -> usize {
            if self.0[x] != x {
                let r = self.find(self.0[x]);
                self.0[x] = r;
            }
            self.0[x]
        }
        fn union(&mut self, a: usize, b: usize) {
            let (a, b) = (self.find(a), self.find(b));
            self.0[a] = b;
        }
    }

    fn oracle_joins(n: usize, stones: u64, vertical: bool) -> bool {
        let cells = n * n;
        let (start, end) = (cells, cells + 1);
        let mut d = Dsu((0..cells + 2).collect());
        let has = |r: isize, c: isize| {
            r >= 0 && c >= 0 && (r as usize) < n && (c as usize) < n && stones >> (r as usize * n + c as usize) & 1 == 1
        };
        for r in 0..n as isize {
            for c in 0..n as isize {
                if !has(r, c) {
                    continue;
                }
                let i = r as usize * n + c as usize;
                let along = if vertical { r } else { c } as usize;
                if along == 0 {
                    d.union(i, start);
                }
                if along == n - 1 {
                    d.union(i, end);
                }
                for (dr, dc) in [(1, 0), (0, 1), (-1, 1)] {
                    if has(r + dr, c + dc) {
                        d.union(i, ((r + dr) as usize) * n + (c + dc) as usize);
                    }
                }
            }
        }
        d.find(start) == d.find(end)
    }

    #[test]
    fn flood_fill_matches_union_find() {
        for n in 1..=4 {
            let geo = Geometry::new(n);
            for m in 0..(1u64 << (n * n)) {
                assert_eq!(geo.red_joins(m), oracle_joins(n, m, true), "n={n} m={m:#x}");
                assert_eq!(geo.blue_joins(m), oracle_joins(n, m, false), "n={n} m={m:#x}");
            }
        }
    }

    #[test]
    fn parse_examples() {
        let q = parse_hex("hex 1\n.\n").unwrap();
        assert_eq!(q.side(), 1);
        assert_eq!(q.empty_cells(), vec![0]);
        let q = parse_hex("hex 2\nR.\n.B\n").unwrap();
        assert_eq!(q.cell(0, 0), Cell::Red);
        assert_eq!(q.cell(1, 1), Cell::Blue);
        assert_eq!(q.empty_cells().len(), 2);
        assert!(matches!(parse_hex("hex 2\nXX\n..\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_hex("hex 2\n...\n..\n"), Err(Error::Dimension(_))));
        assert!(matches!(parse_hex("hex 2\n..\n"), Err(Error::Dimension(_))));
        assert!(matches!(parse_hex("hex 2\n..\n..\n..\n"), Err(Error::Dimension(_))));
        assert!(matches!(parse_hex("hex 9\n"), Err(Error::Bound { .. })));
        assert_eq!(parse_hex(&q.to_text()).unwrap(), q);
    }

    #[test]
    fn completion_examples() {
        let q = HexPosition::empty(1).unwrap();
        assert!(q.red_complete(1).unwrap());
        assert!(q.blue_complete(1).unwrap());
        let q = HexPosition::empty(2).unwrap();
        // (0,0) and (1,0)
        assert!(q.red_complete(0b0101).unwrap());
        assert!(!q.red_complete(0).unwrap());
        assert!(!q.blue_complete(0).unwrap());
        // (0,0),(1,1) are not adjacent; (0,1),(1,0) are
        assert!(!q.red_complete(0b1001).unwrap());
        assert!(q.red_complete(0b0110).unwrap());
        let q = parse_hex("hex 2\nR.\n..\n").unwrap();
        assert_eq!(q.red_complete(0b0001), Err(Error::Overlap(0)));
    }

    #[test]
    fn decision_examples() {
        let cfg = SolverConfig::default();
        assert!(decision_hex(&HexPosition::empty(1).unwrap(), &cfg).unwrap());
        assert!(decision_hex(&HexPosition::empty(2).unwrap(), &cfg).unwrap());
        assert!(!decision_hex(&parse_hex("hex 2\nBB\n..\n").unwrap(), &cfg).unwrap());
        let r = solve_hex(&parse_hex("hex 2\nBB\n..\n").unwrap(), &cfg).unwrap();
        assert_eq!(r.outcome, Outcome::SecondWin);
        assert!(r.optimal_moves.is_empty());
    }

    #[test]
    fn no_draw_small_boards() {
        for (n, count) in [(1, 2), (2, 16), (3, 512)] {
            let r = hex_no_draw_check(n, DEFAULT_THEOREM_BOUND).unwrap();
            assert!(r.pass());
            assert_eq!(r.colorings, count);
        }
        assert!(matches!(hex_no_draw_check(4, DEFAULT_THEOREM_BOUND), Err(Error::Bound { .. })));
    }

    #[test]
    fn transpose_swaps_predicates() {
        let q = parse_hex("hex 3\nR.B\n.R.\nB..\n").unwrap();
        let t = q.transpose();
        let empties = q.empty_mask();
        let mut extra = empties;
        loop {
            let te = transpose_mask(3, extra);
            assert_eq!(q.red_complete(extra).unwrap(), t.blue_complete(te).unwrap());
            assert_eq!(q.blue_complete(extra).unwrap(), t.red_complete(te).unwrap());
            if extra == 0 {
                break;
            }
            extra = (extra - 1) & empties;
        }
        assert_eq!(t.transpose(), q);
    }
}
