use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steal_core::engine::{Outcome, SolverConfig};
use steal_core::makermaker::{
    draw_free_check, gen_ap, gen_clique, gen_hypercube_ttt, gen_tictactoe, monotone_closure_table, permute_mask,
    smm_move, solve_smm, verify_symmetry, Circuit, Gate, MakerMakerInstance, WinFamily, DRAW_FREE_BOUND,
    TABULATION_BOUND,
};

fn random_circuit<R: Rng>(rng: &mut R, n: usize, gates: usize) -> Circuit {
    let mut gs = Vec::new();
    for k in 0..gates {
        let wires = n + k;
        let a = rng.random_range(0..wires);
        let b = rng.random_range(0..wires);
        gs.push(match rng.random_range(0..5) {
            0 | 1 => Gate::And(a, b),
            2 | 3 => Gate::Or(a, b),
            _ => Gate::Not(a),
        });
    }
    Circuit::new(n, gs, n + gates - 1).unwrap()
}

#[test]
fn closure_table_matches_subset_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..40 {
        let n = rng.random_range(1..=10);
        let g = rng.random_range(1..12);
        let c = random_circuit(&mut rng, n, g);
        let table = monotone_closure_table(&c, TABULATION_BOUND).unwrap();
        let accepted: Vec<u64> = (0..1u64 << n).filter(|&s| c.eval(s)).collect();
        for t in 0..1u64 << n {
            let brute = accepted.iter().any(|&s| s & !t == 0);
            assert_eq!(table.get(t), brute, "n={n} t={t:#b}");
        }
    }
}

#[test]
fn circuit_and_explicit_solves_agree() {
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut compared = 0;
    while compared < 25 {
        let n = rng.random_range(2..=8);
        let (g1, g2) = (rng.random_range(2..10), rng.random_range(2..10));
        let c1 = random_circuit(&mut rng, n, g1);
        let c2 = random_circuit(&mut rng, n, g2);
        if c1.eval(0) || c2.eval(0) {
            continue;
        }
        let sets = |c: &Circuit| -> Vec<u64> { (1..1u64 << n).filter(|&s| c.eval(s)).collect() };
        let explicit = MakerMakerInstance::new(n, WinFamily::Explicit(sets(&c1)), WinFamily::Explicit(sets(&c2)), None)
            .unwrap();
        let circuit =
            MakerMakerInstance::new(n, WinFamily::circuit(c1).unwrap(), WinFamily::circuit(c2).unwrap(), None).unwrap();
        for claimed in 0..1u64 << n {
            assert_eq!(
                explicit.w1().contains_winning_set(claimed),
                circuit.w1().contains_winning_set(claimed)
            );
        }
        assert_eq!(smm_move(&explicit, &cfg).unwrap(), smm_move(&circuit, &cfg).unwrap());
        compared += 1;
    }
}

fn random_symmetric<R: Rng>(rng: &mut R, involution: bool) -> MakerMakerInstance {
    let n = rng.random_range(2..=7);
    let full = (1u64 << n) - 1;
    let count = rng.random_range(1..=6);
    let w1: Vec<u64> = (0..count)
        .map(|_| loop {
            let s = rng.random::<u64>() & full & rng.random::<u64>();
            if s != 0 {
                break s;
            }
        })
        .collect();
    let mut pi: Vec<usize> = (0..n).collect();
    if involution {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for pair in order.chunks(2) {
            if pair.len() == 2 && rng.random_bool(0.7) {
                pi.swap(pair[0], pair[1]);
            }
        }
    } else {
        pi.shuffle(rng);
    }
    let w2 = w1.iter().map(|&s| permute_mask(&pi, s)).collect();
    MakerMakerInstance::new(n, WinFamily::Explicit(w1), WinFamily::Explicit(w2), Some(pi)).unwrap()
}

#[test]
fn symmetric_draw_free_instances_are_first_player_wins() {
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut draw_free = 0;
    for k in 0..400 {
        let inst = random_symmetric(&mut rng, k % 2 == 0);
        assert!(verify_symmetry(&inst).unwrap());
        let o = solve_smm(&inst, &cfg).unwrap();
        assert_ne!(o, Outcome::SecondWin, "{inst:?}");
        if draw_free_check(&inst, DRAW_FREE_BOUND).unwrap().draw_free() {
            assert_eq!(o, Outcome::FirstWin, "{inst:?}");
            draw_free += 1;
        }
    }
    assert!(draw_free > 20, "only {draw_free} draw-free samples");
    for inst in [gen_clique(6, 3).unwrap(), gen_ap(9, 3).unwrap(), gen_hypercube_ttt(2, 2).unwrap()] {
        assert!(verify_symmetry(&inst).unwrap());
        assert!(draw_free_check(&inst, DRAW_FREE_BOUND).unwrap().draw_free());
        assert_eq!(solve_smm(&inst, &cfg).unwrap(), Outcome::FirstWin);
    }
}

#[test]
fn relabelling_permutes_optimal_moves() {
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut instances: Vec<MakerMakerInstance> = (0..30).map(|_| random_symmetric(&mut rng, false)).collect();
    instances.push(gen_tictactoe());
    instances.push(gen_ap(7, 3).unwrap());
    for inst in instances {
        let n = inst.universe_size();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let moved = inst.permuted(&perm).unwrap();
        assert!(verify_symmetry(&moved).unwrap());
        let a = smm_move(&inst, &cfg).unwrap();
        let b = smm_move(&moved, &cfg).unwrap();
        assert_eq!(a.outcome, b.outcome);
        let mut image: Vec<i32> = a.optimal_moves.iter().map(|&m| perm[m as usize] as i32).collect();
        image.sort_unstable();
        assert_eq!(image, b.optimal_moves);
    }
}

#[test]
fn draw_free_thresholds() {
    let df = |i: &MakerMakerInstance| draw_free_check(i, DRAW_FREE_BOUND).unwrap().draw_free();
    assert!(df(&gen_clique(6, 3).unwrap()));
    assert!(!df(&gen_clique(5, 3).unwrap()));
    assert!(df(&gen_ap(9, 3).unwrap()));
    assert!(!df(&gen_ap(8, 3).unwrap()));
    assert!(df(&gen_hypercube_ttt(2, 2).unwrap()));
    assert!(!df(&gen_tictactoe()));
}

#[test]
fn clique_six_three_every_edge_wins() {
    let r = smm_move(&gen_clique(6, 3).unwrap(), &SolverConfig::default()).unwrap();
    assert_eq!(r.outcome, Outcome::FirstWin);
    assert_eq!(r.optimal_moves, (0..15).collect::<Vec<_>>());
}
