//! Maker-Maker games.
//!
//! Two players alternately claim elements of a universe `{0, .., n-1}`.
//! A player wins the moment their claimed set contains one of their winning
//! sets; a full universe with no winner is a draw. Winning families are
//! given explicitly, as a monotone predicate, or as a circuit whose
//! accepted sets are closed upward.
//!
//! Pinned semantics:
//! * only the mover's family is tested, right after the mover's claim;
//! * a family containing the empty set is complete before any move, the
//!   first seat being checked first;
//! * circuit families need not be monotone; a claimed set wins iff it
//!   contains some accepted set.

pub mod circuit;
mod format;
pub mod generators;

use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::engine::{self, Game, Move, Outcome, Seat, SolveReport, SolverConfig};
use crate::error::{Error, Result};

pub use circuit::{monotone_closure_table, parse_circuit, BitTable, Circuit, Gate, TABULATION_BOUND};
pub use format::{parse_smm, parse_smm_explicit, to_smm_text};
pub use generators::{gen_ap, gen_clique, gen_hypercube_ttt, gen_tictactoe};

/// Largest universe for which families are tabulated before solving.
pub const CACHE_BOUND: usize = 24;
pub const DRAW_FREE_BOUND: usize = 22;

const MONOTONE_SAMPLES: usize = 256;

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A set predicate declared monotone by its author.
#[derive(Clone)]
pub struct MonotonePredicate {
    name: String,
    f: Arc<dyn Fn(u64) -> bool + Send + Sync>,
}

impl MonotonePredicate {
    pub fn new(name: impl Into<String>, f: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        MonotonePredicate { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, set: u64) -> bool {
        (self.f)(set)
    }

    /// Randomized check that adding an element never turns the predicate
    /// off. Returns a violating `(set, element)` if one is found.
    pub fn spot_check<R: Rng + ?Sized>(&self, n: usize, samples: usize, rng: &mut R) -> Option<(u64, usize)> {
        if n == 0 {
            return None;
        }
        (0..samples).find_map(|_| {
            let s = rng.random::<u64>() & full_mask(n);
            let e = rng.random_range(0..n);
            (self.eval(s) && !self.eval(s | 1 << e)).then_some((s, e))
        })
    }
}

impl fmt::Debug for MonotonePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonotonePredicate({})", self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitFamily {
    circuit: Circuit,
    closure: BitTable,
}

impl CircuitFamily {
    pub fn new(circuit: Circuit) -> Result<Self> {
        let closure = monotone_closure_table(&circuit, TABULATION_BOUND)?;
        Ok(CircuitFamily { circuit, closure })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn closure(&self) -> &BitTable {
        &self.closure
    }
}

#[derive(Clone, Debug)]
pub enum WinFamily {
    Explicit(Vec<u64>),
    Predicate(MonotonePredicate),
    Circuit(CircuitFamily),
}

impl PartialEq for WinFamily {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (WinFamily::Explicit(a), WinFamily::Explicit(b)) => a == b,
            (WinFamily::Predicate(a), WinFamily::Predicate(b)) => Arc::ptr_eq(&a.f, &b.f),
            (WinFamily::Circuit(a), WinFamily::Circuit(b)) => a == b,
            _ => false,
        }
    }
}

impl WinFamily {
    pub fn circuit(c: Circuit) -> Result<Self> {
        Ok(WinFamily::Circuit(CircuitFamily::new(c)?))
    }

    /// Does `claimed` contain a winning set?
    pub fn contains_winning_set(&self, claimed: u64) -> bool {
        match self {
            WinFamily::Explicit(sets) => sets.iter().any(|s| s & !claimed == 0),
            WinFamily::Predicate(p) => p.eval(claimed),
            WinFamily::Circuit(c) => c.closure.get(claimed),
        }
    }

    /// Raw membership: is `set` itself listed / accepted?
    pub fn accepts(&self, set: u64) -> bool {
        match self {
            WinFamily::Explicit(sets) => sets.contains(&set),
            WinFamily::Predicate(p) => p.eval(set),
            WinFamily::Circuit(c) => c.circuit.eval(set),
        }
    }

    /// Containment table over all `2^n` claimed sets.
    pub fn tabulate(&self, n: usize) -> BitTable {
        match self {
            WinFamily::Explicit(sets) => {
                let mut t = BitTable::zeros(n);
                for &s in sets {
                    t.set(s);
                }
                t.close_upward();
                t
            }
            WinFamily::Predicate(p) => BitTable::from_fn(n, |s| p.eval(s)),
            WinFamily::Circuit(c) => c.closure.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MakerMakerInstance {
    n: usize,
    w1: WinFamily,
    w2: WinFamily,
    /// `witness[i]` is the image of element `i`.
    witness: Option<Vec<usize>>,
}

impl MakerMakerInstance {
    pub fn new(n: usize, w1: WinFamily, w2: WinFamily, witness: Option<Vec<usize>>) -> Result<Self> {
        if n > 64 {
            return Err(Error::Bound { size: n, bound: 64 });
        }
        let outside = !full_mask(n);
        for f in [&w1, &w2] {
            match f {
                WinFamily::Explicit(sets) => {
                    if let Some(s) = sets.iter().find(|&&s| s & outside != 0) {
                        let index = 63 - (s & outside).leading_zeros() as usize;
                        return Err(Error::Index { index, size: n });
                    }
                }
                WinFamily::Circuit(c) => {
                    if c.circuit.inputs() != n {
                        return Err(Error::Dimension(format!(
                            "circuit has {} inputs, universe has {n}",
                            c.circuit.inputs()
                        )));
                    }
                }
                WinFamily::Predicate(p) => {
                    let mut rng = StdRng::seed_from_u64(0);
                    if let Some((s, e)) = p.spot_check(n, MONOTONE_SAMPLES, &mut rng) {
                        return Err(Error::Parameter(format!(
                            "predicate `{}` is not monotone: holds on {s:#x}, fails after adding {e}",
                            p.name
                        )));
                    }
                }
            }
        }
        if let Some(pi) = &witness {
            check_permutation(pi, n)?;
        }
        Ok(MakerMakerInstance { n, w1, w2, witness })
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn w1(&self) -> &WinFamily {
        &self.w1
    }

    pub fn w2(&self) -> &WinFamily {
        &self.w2
    }

    pub fn family(&self, seat: Seat) -> &WinFamily {
        match seat {
            Seat::First => &self.w1,
            Seat::Second => &self.w2,
        }
    }

    pub fn witness(&self) -> Option<&[usize]> {
        self.witness.as_deref()
    }

    pub fn with_witness(mut self, witness: Option<Vec<usize>>) -> Result<Self> {
        if let Some(pi) = &witness {
            check_permutation(pi, self.n)?;
        }
        self.witness = witness;
        Ok(self)
    }

    /// Relabels element `i` as `perm[i]`; explicit families only.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let map = |f: &WinFamily| match f {
            WinFamily::Explicit(sets) => Ok(WinFamily::Explicit(sets.iter().map(|&s| permute_mask(perm, s)).collect())),
            _ => Err(Error::Parameter("only explicit families can be relabelled".into())),
        };
        // the witness conjugates: perm ∘ pi ∘ perm⁻¹
        let witness = self.witness.as_ref().map(|pi| {
            let mut out = vec![0; self.n];
            for i in 0..self.n {
                out[perm[i]] = perm[pi[i]];
            }
            out
        });
        MakerMakerInstance::new(self.n, map(&self.w1)?, map(&self.w2)?, witness)
    }
}

fn check_permutation(pi: &[usize], n: usize) -> Result<()> {
    if pi.len() != n {
        return Err(Error::Dimension(format!("permutation has {} entries, universe has {n}", pi.len())));
    }
    let mut seen = 0u128;
    for &p in pi {
        if p >= n || seen >> p & 1 == 1 {
            return Err(Error::Parameter(format!("not a permutation of 0..{n}")));
        }
        seen |= 1 << p;
    }
    Ok(())
}

/// Image of `mask` under `i -> perm[i]`.
pub fn permute_mask(perm: &[usize], mask: u64) -> u64 {
    perm.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).fold(0, |m, (_, &p)| m | 1 << p)
}

enum Tester<'a> {
    Table(BitTable),
    Direct(&'a WinFamily),
}

impl Tester<'_> {
    fn compile(f: &WinFamily, n: usize) -> Tester<'_> {
        if n <= CACHE_BOUND {
            Tester::Table(f.tabulate(n))
        } else {
            Tester::Direct(f)
        }
    }

    #[inline]
    fn test(&self, claimed: u64) -> bool {
        match self {
            Tester::Table(t) => t.get(claimed),
            Tester::Direct(f) => f.contains_winning_set(claimed),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct SmmState {
    pub first: u64,
    pub second: u64,
}

/// Maker-Maker play on an instance; moves are element indices.
pub struct SmmGame<'a> {
    n: usize,
    full: u64,
    t1: Tester<'a>,
    t2: Tester<'a>,
}

impl<'a> SmmGame<'a> {
    pub fn new(inst: &'a MakerMakerInstance) -> (Self, SmmState) {
        let game = SmmGame {
            n: inst.n,
            full: full_mask(inst.n),
            t1: Tester::compile(&inst.w1, inst.n),
            t2: Tester::compile(&inst.w2, inst.n),
        };
        (game, SmmState { first: 0, second: 0 })
    }
}

impl Game for SmmGame<'_> {
    type State = SmmState;

    fn mover(&self, s: &SmmState) -> Seat {
        if s.first.count_ones() == s.second.count_ones() {
            Seat::First
        } else {
            Seat::Second
        }
    }

    fn terminal(&self, s: &SmmState) -> Option<Outcome> {
        let (c1, c2) = (s.first.count_ones(), s.second.count_ones());
        if c1 == 0 && c2 == 0 {
            if self.t1.test(0) {
                return Some(Outcome::FirstWin);
            }
            if self.t2.test(0) {
                return Some(Outcome::SecondWin);
            }
        } else if c1 > c2 {
            if self.t1.test(s.first) {
                return Some(Outcome::FirstWin);
            }
        } else if self.t2.test(s.second) {
            return Some(Outcome::SecondWin);
        }
        ((s.first | s.second) == self.full).then_some(Outcome::Draw)
    }

    fn moves(&self, s: &SmmState) -> Vec<Move> {
        let free = self.full & !(s.first | s.second);
        (0..self.n).filter(|&i| free >> i & 1 == 1).map(|i| i as Move).collect()
    }

    fn play(&self, s: &SmmState, mv: Move) -> SmmState {
        let b = 1u64 << mv;
        match self.mover(s) {
            Seat::First => SmmState { first: s.first | b, second: s.second },
            Seat::Second => SmmState { first: s.first, second: s.second | b },
        }
    }
}

pub fn solve_smm(inst: &MakerMakerInstance, config: &SolverConfig) -> Result<Outcome> {
    let (game, start) = SmmGame::new(inst);
    engine::solve(&game, &start, config)
}

/// All optimal first moves under Win > Draw > Loss. If the game is decided
/// before the first move (a family contains the empty set), every move is
/// reported.
pub fn smm_move(inst: &MakerMakerInstance, config: &SolverConfig) -> Result<SolveReport> {
    let (game, start) = SmmGame::new(inst);
    if let Some(outcome) = game.terminal(&start) {
        return Ok(SolveReport {
            outcome,
            optimal_moves: game.moves(&start),
            states_visited: 1,
            table_size: 0,
        });
    }
    engine::optimal_moves(&game, &start, config)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct DrawFreeReport {
    pub subsets: u64,
    /// Smallest `S` such that neither `S` wins for W1 nor `S^C` for W2.
    pub counterexample: Option<u64>,
}

impl DrawFreeReport {
    pub fn draw_free(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// For every subset `S`: `S` contains a W1 set or its complement a W2 set.
pub fn draw_free_check(inst: &MakerMakerInstance, bound: usize) -> Result<DrawFreeReport> {
    let n = inst.n;
    if n > bound {
        return Err(Error::Bound { size: n, bound });
    }
    let full = full_mask(n);
    let t1 = Tester::compile(&inst.w1, n);
    let t2 = Tester::compile(&inst.w2, n);
    let subsets = 1u64 << n;
    let counterexample = (0..subsets).find(|&s| !t1.test(s) && !t2.test(full & !s));
    Ok(DrawFreeReport { subsets, counterexample })
}

/// Checks the witness maps W1 onto W2.
///
/// Explicit families are compared as set families; any other pairing is
/// compared on raw membership over all subsets (`accepts1(S) ==
/// accepts2(pi(S))`), which needs `n <= TABULATION_BOUND`.
pub fn verify_symmetry(inst: &MakerMakerInstance) -> Result<bool> {
    let pi = inst.witness.as_deref().ok_or(Error::MissingWitness)?;
    if let (WinFamily::Explicit(a), WinFamily::Explicit(b)) = (&inst.w1, &inst.w2) {
        let mut image: Vec<u64> = a.iter().map(|&s| permute_mask(pi, s)).collect();
        let mut target = b.clone();
        image.sort_unstable();
        image.dedup();
        target.sort_unstable();
        target.dedup();
        return Ok(image == target);
    }
    if inst.n > TABULATION_BOUND {
        return Err(Error::Bound { size: inst.n, bound: TABULATION_BOUND });
    }
    Ok((0..1u64 << inst.n).all(|s| inst.w1.accepts(s) == inst.w2.accepts(permute_mask(pi, s))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    fn explicit(n: usize, w1: &[u64], w2: &[u64], pi: Option<Vec<usize>>) -> MakerMakerInstance {
        MakerMakerInstance::new(n, WinFamily::Explicit(w1.to_vec()), WinFamily::Explicit(w2.to_vec()), pi).unwrap()
    }

    #[test]
    fn containment_examples() {
        let f = WinFamily::Explicit(vec![0b011]);
        assert!(f.contains_winning_set(0b111));
        assert!(!f.contains_winning_set(0b101));
        let parity = parse_circuit("o = or x1 x2\na = and x1 x2\nna = not a\np = and o na\noutput p").unwrap();
        let f = WinFamily::circuit(parity).unwrap();
        assert!(!f.contains_winning_set(0));
        assert!(f.contains_winning_set(0b10));
        assert!(f.contains_winning_set(0b11));
    }

    #[test]
    fn single_element_game() {
        let inst = explicit(1, &[1], &[1], Some(vec![0]));
        let r = smm_move(&inst, &cfg()).unwrap();
        assert_eq!(r.outcome, Outcome::FirstWin);
        assert_eq!(r.optimal_moves, vec![0]);
        assert!(draw_free_check(&inst, DRAW_FREE_BOUND).unwrap().draw_free());
    }

    #[test]
    fn empty_winning_set_wins_before_any_move() {
        let accept_all = parse_circuit("n = not x1\no = or x1 n\noutput o").unwrap();
        let inst = MakerMakerInstance::new(
            1,
            WinFamily::circuit(accept_all.clone()).unwrap(),
            WinFamily::circuit(accept_all).unwrap(),
            Some(vec![0]),
        )
        .unwrap();
        assert_eq!(solve_smm(&inst, &cfg()).unwrap(), Outcome::FirstWin);
        let r = smm_move(&inst, &cfg()).unwrap();
        assert_eq!(r.optimal_moves, vec![0]);
    }

    #[test]
    fn only_movers_family_is_checked() {
        // Second's family {0} is never claimable by Second once First takes 0,
        // and First's family {1} can only be completed by First.
        let inst = explicit(2, &[0b10], &[0b01], Some(vec![1, 0]));
        let r = smm_move(&inst, &cfg()).unwrap();
        // Taking 0 blocks Second; then Second must take 1 and nobody wins.
        // Taking 1 wins at once.
        assert_eq!(r.outcome, Outcome::FirstWin);
        assert_eq!(r.optimal_moves, vec![1]);
    }

    #[test]
    fn tictactoe_is_a_draw() {
        let t = gen_tictactoe();
        let r = smm_move(&t, &cfg()).unwrap();
        assert_eq!(r.outcome, Outcome::Draw);
        assert_eq!(r.optimal_moves, (0..9).collect::<Vec<_>>());
        assert!(!draw_free_check(&t, DRAW_FREE_BOUND).unwrap().draw_free());
    }

    #[test]
    fn draw_free_examples() {
        let c5 = gen_clique(5, 3).unwrap();
        let r = draw_free_check(&c5, DRAW_FREE_BOUND).unwrap();
        let s = r.counterexample.expect("K5 has a triangle-free 2-colouring");
        assert!(!c5.w1().contains_winning_set(s));
        assert!(!c5.w2().contains_winning_set(0x3ff & !s));
        assert_eq!(r.subsets, 1024);
        assert!(draw_free_check(&gen_ap(9, 3).unwrap(), DRAW_FREE_BOUND).unwrap().draw_free());
        assert!(!draw_free_check(&gen_ap(8, 3).unwrap(), DRAW_FREE_BOUND).unwrap().draw_free());
        assert!(draw_free_check(&gen_hypercube_ttt(2, 2).unwrap(), DRAW_FREE_BOUND).unwrap().draw_free());
        assert!(matches!(draw_free_check(&gen_ap(23, 3).unwrap(), DRAW_FREE_BOUND), Err(Error::Bound { .. })));
    }

    #[test]
    fn symmetry_examples() {
        assert!(verify_symmetry(&explicit(2, &[0b11], &[0b11], Some(vec![0, 1]))).unwrap());
        assert!(verify_symmetry(&explicit(2, &[0b01], &[0b10], Some(vec![1, 0]))).unwrap());
        assert!(!verify_symmetry(&explicit(2, &[0b01], &[0b11], Some(vec![0, 1]))).unwrap());
        assert!(!verify_symmetry(&explicit(2, &[0b01], &[0b11], Some(vec![1, 0]))).unwrap());
        assert_eq!(verify_symmetry(&explicit(1, &[1], &[1], None)), Err(Error::MissingWitness));

        let c1 = parse_circuit("n = not x2\na = and x1 n\noutput a").unwrap();
        let c2 = parse_circuit("n = not x1\na = and x2 n\noutput a").unwrap();
        let inst = MakerMakerInstance::new(
            2,
            WinFamily::circuit(c1.clone()).unwrap(),
            WinFamily::circuit(c2.clone()).unwrap(),
            Some(vec![1, 0]),
        )
        .unwrap();
        assert!(verify_symmetry(&inst).unwrap());
        let inst = inst.with_witness(Some(vec![0, 1])).unwrap();
        assert!(!verify_symmetry(&inst).unwrap());
    }

    #[test]
    fn instance_validation() {
        let e = MakerMakerInstance::new(2, WinFamily::Explicit(vec![0]), WinFamily::Explicit(vec![1]), None);
        assert_eq!(solve_smm(&e.unwrap(), &SolverConfig::default()).unwrap(), Outcome::FirstWin);
        let e = MakerMakerInstance::new(2, WinFamily::Explicit(vec![0b100]), WinFamily::Explicit(vec![1]), None);
        assert_eq!(e, Err(Error::Index { index: 2, size: 2 }));
        let e = MakerMakerInstance::new(2, WinFamily::Explicit(vec![1]), WinFamily::Explicit(vec![1]), Some(vec![0, 0]));
        assert!(matches!(e, Err(Error::Parameter(_))));
        let anti = MonotonePredicate::new("not-full", |s| s != 0b11);
        let e = MakerMakerInstance::new(
            2,
            WinFamily::Predicate(anti.clone()),
            WinFamily::Predicate(anti),
            None,
        );
        assert!(matches!(e, Err(Error::Parameter(_))));
    }

    #[test]
    fn predicate_matches_explicit() {
        let t = gen_tictactoe();
        let lines = match t.w1() {
            WinFamily::Explicit(s) => s.clone(),
            _ => unreachable!(),
        };
        let pred = MonotonePredicate::new("ttt", move |c| lines.iter().any(|l| l & !c == 0));
        let p = MakerMakerInstance::new(9, WinFamily::Predicate(pred.clone()), WinFamily::Predicate(pred), Some((0..9).collect()))
            .unwrap();
        assert_eq!(smm_move(&p, &cfg()).unwrap().optimal_moves, smm_move(&t, &cfg()).unwrap().optimal_moves);
        assert!(verify_symmetry(&p).unwrap());
    }
}
