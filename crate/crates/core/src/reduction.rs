//! Hex to symmetric Maker-Maker.
//!
//! From a Hex position `Q` with `e` empty cells we build a game `G` on
//! `2e + 2` elements: the empty cells of two copies `Q1`, `Q2`, then `r`,
//! then `b`. Both players share the winning family; a claimed set `S` wins
//! iff
//!
//! * `r ∈ S` and `S` completes a Red win on `Q1` or on `Q2`, or
//! * `b ∈ S` and `S` completes a Blue win on both `Q1` and `Q2`, or
//! * `{r, b} ⊆ S`.
//!
//! Pre-placed stones of `Q` are not elements; they only enter through the
//! completion checks. Taking `b` is the unique winning first move when Blue
//! wins `Q`, and is never winning when Red wins `Q`.

use std::fmt::Write as _;

use crate::engine::{Move, Outcome, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::hex::{self, HexPosition};
use crate::makermaker::{
    draw_free_check, smm_move, verify_symmetry, DrawFreeReport, MakerMakerInstance, MonotonePredicate,
    WinFamily, DRAW_FREE_BOUND,
};

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionArtifact {
    source: HexPosition,
    /// Empty cells of the source, row-major.
    cells: Vec<usize>,
    instance: MakerMakerInstance,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Board {
    Q1,
    Q2,
}

impl ReductionArtifact {
    pub fn source(&self) -> &HexPosition {
        &self.source
    }

    pub fn instance(&self) -> &MakerMakerInstance {
        &self.instance
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn universe_size(&self) -> usize {
        2 * self.cells.len() + 2
    }

    pub fn cell_index(&self, copy: Board, k: usize) -> usize {
        match copy {
            Board::Q1 => k,
            Board::Q2 => self.cells.len() + k,
        }
    }

    pub fn r(&self) -> usize {
        2 * self.cells.len()
    }

    pub fn b(&self) -> usize {
        2 * self.cells.len() + 1
    }

    /// Exchanges the two board copies cell by cell, fixing `r` and `b`.
    pub fn swap_permutation(&self) -> Vec<usize> {
        let e = self.cells.len();
        (0..self.universe_size())
            .map(|i| if i < e { i + e } else if i < 2 * e { i - e } else { i })
            .collect()
    }

    /// Renders the `smmhex` descriptor pointing at `source_path`.
    pub fn to_text(&self, source_path: &str) -> String {
        let n = self.source.side();
        let mut s = format!("smmhex {source_path}\nuniverse {}\n", self.universe_size());
        for (copy, name) in [(Board::Q1, "q1"), (Board::Q2, "q2")] {
            for (k, &cell) in self.cells.iter().enumerate() {
                let _ = writeln!(s, "cell {name} {} {} {}", cell / n, cell % n, self.cell_index(copy, k));
            }
        }
        let _ = writeln!(s, "elem r {}", self.r());
        let _ = writeln!(s, "elem b {}", self.b());
        s
    }
}

/// Expands bits `offset .. offset + cells.len()` of `set` into a board mask.
fn board_extra(set: u64, offset: usize, cells: &[usize]) -> u64 {
    cells
        .iter()
        .enumerate()
        .filter(|&(k, _)| set >> (offset + k) & 1 == 1)
        .fold(0u64, |m, (_, &c)| m | 1u64 << c)
}

pub fn hex_to_smm(q: &HexPosition) -> Result<ReductionArtifact> {
    let cells = q.empty_cells();
    let e = cells.len();
    if e == 0 {
        return Err(Error::NoEmptyCell);
    }
    let n = 2 * e + 2;
    if n > 64 {
        return Err(Error::Bound { size: n, bound: 64 });
    }
    let (r, b) = (2 * e, 2 * e + 1);
    let board = q.clone();
    let layout = cells.clone();
    let wins = move |s: u64| {
        let has_r = s >> r & 1 == 1;
        let has_b = s >> b & 1 == 1;
        if has_r && has_b {
            return true;
        }
        let s1 = board_extra(s, 0, &layout);
        let s2 = board_extra(s, e, &layout);
        (has_r && (board.red_complete_unchecked(s1) || board.red_complete_unchecked(s2)))
            || (has_b && board.blue_complete_unchecked(s1) && board.blue_complete_unchecked(s2))
    };
    let family = WinFamily::Predicate(MonotonePredicate::new("hex-two-board", wins));
    let instance = MakerMakerInstance::new(n, family.clone(), family, Some((0..n).collect()))?;
    Ok(ReductionArtifact { source: q.clone(), cells, instance })
}

fn in_check<T>(check: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::InCheck { check, source: Box::new(e) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub universe: usize,
    /// `decision_hex` on the source.
    pub red_wins: bool,
    pub symmetry: bool,
    pub draw_free: DrawFreeReport,
    pub moves: SolveReport,
    /// Blue wins: optimal set is exactly `{b}`. Red wins: `b` excluded and
    /// the set nonempty.
    pub lemma: bool,
    pub swap_invariant: bool,
    pub pass: bool,
}

fn swap_invariant(art: &ReductionArtifact, moves: &[Move]) -> bool {
    let perm = art.swap_permutation();
    let mut image: Vec<Move> = moves.iter().map(|&m| perm[m as usize] as Move).collect();
    image.sort_unstable();
    image == moves
}

/// True iff the optimal first moves of `G` are invariant under exchanging
/// the board copies.
pub fn board_swap_check(art: &ReductionArtifact, config: &SolverConfig) -> Result<bool> {
    let moves = smm_move(&art.instance, config)?;
    Ok(swap_invariant(art, &moves.optimal_moves))
}

/// Builds `G` from `q` and checks symmetry, draw-freeness, the move
/// characterization in both cases, the first-player win and swap invariance.
pub fn verify_reduction(q: &HexPosition, config: &SolverConfig) -> Result<ReductionReport> {
    let art = hex_to_smm(q)?;
    verify_artifact(&art, config)
}

pub fn verify_artifact(art: &ReductionArtifact, config: &SolverConfig) -> Result<ReductionReport> {
    let inst = &art.instance;
    let symmetry = in_check("symmetry", verify_symmetry(inst))?;
    let draw_free = in_check("drawfree", draw_free_check(inst, DRAW_FREE_BOUND))?;
    let red_wins = in_check("decision", hex::decision_hex(&art.source, config))?;
    let moves = in_check("smmmove", smm_move(inst, config))?;
    let b = art.b() as Move;
    let lemma = if red_wins {
        !moves.optimal_moves.is_empty() && !moves.optimal_moves.contains(&b)
    } else {
        moves.optimal_moves == [b]
    };
    let swap = swap_invariant(art, &moves.optimal_moves);
    let pass = symmetry && draw_free.draw_free() && lemma && swap && moves.outcome == Outcome::FirstWin;
    Ok(ReductionReport {
        universe: art.universe_size(),
        red_wins,
        symmetry,
        draw_free,
        moves,
        lemma,
        swap_invariant: swap,
        pass,
    })
}

/// Parses an `smmhex` descriptor. `load` returns the source `.hex` text;
/// the layout lines must match the rebuilt artifact exactly.
pub fn parse_smmhex(text: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<ReductionArtifact> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(0, "empty descriptor"))?;
    let path = header
        .strip_prefix("smmhex")
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .ok_or_else(|| Error::parse(hl, "expected `smmhex <source>` header"))?;
    let q = hex::parse_hex(&load(path)?)?;
    let art = hex_to_smm(&q)?;
    let expected = art.to_text(path);
    let given: Vec<&str> = std::iter::once(header).chain(lines.map(|(_, l)| l)).collect();
    let want: Vec<&str> = expected.lines().collect();
    if given.len() != want.len() {
        return Err(Error::Dimension(format!(
            "descriptor has {} lines, source implies {}",
            given.len(),
            want.len()
        )));
    }
    for (k, (g, w)) in given.iter().zip(&want).enumerate() {
        let norm = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
        if norm(g) != norm(w) {
            return Err(Error::parse(k + 1, format!("layout line `{g}` does not match `{w}`")));
        }
    }
    Ok(art)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hex::parse_hex;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn universe_sizes() {
        assert_eq!(hex_to_smm(&HexPosition::empty(1).unwrap()).unwrap().universe_size(), 4);
        assert_eq!(hex_to_smm(&HexPosition::empty(2).unwrap()).unwrap().universe_size(), 10);
        let q = parse_hex("hex 2\nR.\n.B\n").unwrap();
        assert_eq!(hex_to_smm(&q).unwrap().universe_size(), 6);
        let full = parse_hex("hex 1\nR\n").unwrap();
        assert_eq!(hex_to_smm(&full), Err(Error::NoEmptyCell));
    }

    #[test]
    fn winning_sets_on_one_cell() {
        let art = hex_to_smm(&HexPosition::empty(1).unwrap()).unwrap();
        let w = art.instance().w1();
        // elements: q1 cell 0, q2 cell 1, r 2, b 3
        assert!(w.contains_winning_set(0b1100));
        assert!(w.contains_winning_set(0b0101));
        assert!(w.contains_winning_set(0b0110));
        assert!(!w.contains_winning_set(0b1001));
        assert!(w.contains_winning_set(0b1011));
        assert!(!w.contains_winning_set(0b0011));
    }

    #[test]
    fn one_cell_red_wins() {
        let r = verify_reduction(&HexPosition::empty(1).unwrap(), &cfg()).unwrap();
        assert!(r.red_wins);
        assert!(r.pass, "{r:?}");
        assert!(!r.moves.optimal_moves.contains(&3));
    }

    #[test]
    fn blue_connected_forces_b() {
        let q = parse_hex("hex 2\nBB\n..\n").unwrap();
        let r = verify_reduction(&q, &cfg()).unwrap();
        assert!(!r.red_wins);
        assert_eq!(r.moves.optimal_moves, vec![5]);
        assert!(r.pass);
    }

    #[test]
    fn empty_two_by_two() {
        let r = verify_reduction(&HexPosition::empty(2).unwrap(), &cfg()).unwrap();
        assert!(r.red_wins && r.pass);
        assert!(!r.moves.optimal_moves.contains(&9));
    }

    #[test]
    fn swap_examples() {
        for text in ["hex 1\n.\n", "hex 2\nBB\n..\n", "hex 2\nR.\n.B\n"] {
            let art = hex_to_smm(&parse_hex(text).unwrap()).unwrap();
            assert!(board_swap_check(&art, &cfg()).unwrap());
        }
        let art = hex_to_smm(&HexPosition::empty(2).unwrap()).unwrap();
        assert_eq!(art.swap_permutation(), vec![4, 5, 6, 7, 0, 1, 2, 3, 8, 9]);
    }

    #[test]
    fn descriptor_round_trip() {
        let q = parse_hex("hex 2\nR.\n..\n").unwrap();
        let art = hex_to_smm(&q).unwrap();
        let text = art.to_text("board.hex");
        assert!(text.starts_with("smmhex board.hex\nuniverse 8\ncell q1 0 1 0\n"));
        assert!(text.ends_with("cell q2 1 1 5\nelem r 6\nelem b 7\n"));
        let src = q.to_text();
        let load = |p: &str| if p == "board.hex" { Ok(src.clone()) } else { Err(Error::parse(0, "missing")) };
        let back = parse_smmhex(&text, &load).unwrap();
        assert_eq!(back.universe_size(), 8);
        assert_eq!(back.cells(), art.cells());
        let tampered = text.replace("elem b 7", "elem b 6");
        assert!(parse_smmhex(&tampered, &load).is_err());
    }
}
