//! Classic Maker-Maker instances. All have `W1 = W2` and carry the identity
//! witness.

use crate::error::{Error, Result};

use super::{MakerMakerInstance, WinFamily};

fn symmetric(n: usize, sets: Vec<u64>) -> Result<MakerMakerInstance> {
    MakerMakerInstance::new(
        n,
        WinFamily::Explicit(sets.clone()),
        WinFamily::Explicit(sets),
        Some((0..n).collect()),
    )
}

/// Index of edge `{i, j}`, `i < j`, in lexicographic order of `K_n`.
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Edges of `K_n`; a player wins by claiming every edge of some `K_k`.
pub fn gen_clique(n: usize, k: usize) -> Result<MakerMakerInstance> {
    if k < 2 || n < k {
        return Err(Error::Parameter(format!("clique game needs n >= k >= 2, got n={n} k={k}")));
    }
    let edges = n * (n - 1) / 2;
    if edges > 64 {
        return Err(Error::Bound { size: edges, bound: 64 });
    }
    let mut sets = Vec::new();
    for vs in (0u64..1 << n).filter(|m| m.count_ones() as usize == k) {
        let verts: Vec<usize> = (0..n).filter(|&v| vs >> v & 1 == 1).collect();
        let mut s = 0u64;
        for (a, &i) in verts.iter().enumerate() {
            for &j in &verts[a + 1..] {
                s |= 1 << edge_index(n, i, j);
            }
        }
        sets.push(s);
    }
    symmetric(edges, sets)
}

/// `{1..n}` (index `i` is the integer `i+1`); winning sets are the k-term
/// arithmetic progressions with positive difference.
pub fn gen_ap(n: usize, k: usize) -> Result<MakerMakerInstance> {
    if k < 2 || n < k {
        return Err(Error::Parameter(format!("AP game needs n >= k >= 2, got n={n} k={k}")));
    }
    if n > 64 {
        return Err(Error::Bound { size: n, bound: 64 });
    }
    let mut sets = Vec::new();
    for start in 0..n {
        for d in 1..n {
            let last = start + d * (k - 1);
            if last >= n {
                break;
            }
            sets.push((0..k).fold(0u64, |m, t| m | 1 << (start + d * t)));
        }
    }
    symmetric(n, sets)
}

/// `{0..k-1}^d`, point index in mixed radix with coordinate 0 most
/// significant. Winning sets are the combinatorial lines: each coordinate
/// constant, increasing or decreasing, not all constant, one orientation
/// per line.
pub fn gen_hypercube_ttt(k: usize, d: usize) -> Result<MakerMakerInstance> {
    if k < 2 || d < 1 {
        return Err(Error::Parameter(format!("hypercube game needs k >= 2 and d >= 1, got k={k} d={d}")));
    }
    let n = k.checked_pow(d as u32).filter(|&n| n <= 64).ok_or(Error::Bound { size: usize::MAX, bound: 64 })?;
    // per coordinate: 0..k constant, k increasing, k+1 decreasing
    let kinds = k + 2;
    let mut sets = Vec::new();
    for code in 0..kinds.pow(d as u32) {
        let mut c = code;
        let pattern: Vec<usize> = (0..d)
            .map(|_| {
                let v = c % kinds;
                c /= kinds;
                v
            })
            .rev()
            .collect();
        let first_moving = pattern.iter().find(|&&v| v >= k);
        if first_moving != Some(&k) {
            // all constant, or the reversed orientation of another line
            continue;
        }
        let mut s = 0u64;
        for t in 0..k {
            let idx = pattern.iter().fold(0usize, |acc, &v| {
                let coord = match v {
                    v if v < k => v,
                    v if v == k => t,
                    _ => k - 1 - t,
                };
                acc * k + coord
            });
            s |= 1 << idx;
        }
        sets.push(s);
    }
    symmetric(n, sets)
}

/// 3 x 3 board, cell `r * 3 + c`; the 8 rows, columns and diagonals.
pub fn gen_tictactoe() -> MakerMakerInstance {
    let mut sets = Vec::new();
    for i in 0..3 {
        sets.push(0b111 << (3 * i));
        sets.push(0b001_001_001 << i);
    }
    sets.push(0b100_010_001);
    sets.push(0b001_010_100);
    symmetric(9, sets).expect("fixed instance")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(inst: &MakerMakerInstance) -> Vec<u64> {
        match inst.w1() {
            WinFamily::Explicit(s) => {
                let mut s = s.clone();
                s.sort_unstable();
                s
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn sizes() {
        let t = gen_tictactoe();
        assert_eq!(t.universe_size(), 9);
        assert_eq!(family(&t).len(), 8);
        let c = gen_clique(6, 3).unwrap();
        assert_eq!(c.universe_size(), 15);
        assert_eq!(family(&c).len(), 20);
        assert!(family(&c).iter().all(|s| s.count_ones() == 3));
        assert!(gen_clique(2, 3).is_err());
        assert!(gen_ap(5, 1).is_err());
    }

    #[test]
    fn ap_four_three() {
        let a = gen_ap(4, 3).unwrap();
        assert_eq!(family(&a), vec![0b0111, 0b1110]);
    }

    #[test]
    fn hypercube_lines() {
        let h = gen_hypercube_ttt(2, 2).unwrap();
        assert_eq!(h.universe_size(), 4);
        // every pair of the four points
        let all_pairs: Vec<u64> = {
            let mut v: Vec<u64> = (0u64..16).filter(|m| m.count_ones() == 2).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(family(&h), all_pairs);
        // (k+2)^d - k^d over 2
        for (k, d) in [(3, 2), (3, 3), (4, 2), (2, 4)] {
            let expect = ((k + 2usize).pow(d) - k.pow(d)) / 2;
            assert_eq!(family(&gen_hypercube_ttt(k, d as usize).unwrap()).len(), expect);
        }
        assert_eq!(family(&gen_hypercube_ttt(3, 2).unwrap()), family(&gen_tictactoe()));
    }

    #[test]
    fn edge_indexing_is_dense() {
        let n = 6;
        let mut seen = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                seen.push(edge_index(n, i, j));
            }
        }
        assert_eq!(seen, (0..15).collect::<Vec<_>>());
    }
}
