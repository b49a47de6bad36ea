//! `.smm` text format.
//!
//! Explicit instances:
//!
//! ```text
//! universe 3
//! perm: 1 0 2
//! w1: 0 2
//! w2: 1 2
//! ```
//!
//! Circuit instances name two `.circ` files, resolved by the caller:
//!
//! ```text
//! smmcirc
//! c1: first.circ
//! c2: second.circ
//! relabel: 1 0 2
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{parse_circuit, MakerMakerInstance, WinFamily};

fn parse_indices(lineno: usize, rest: &str) -> Result<Vec<usize>> {
    rest.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad index `{t}`"))))
        .collect()
}

fn significant(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses either form; `load` returns the text of a referenced circuit file.
pub fn parse_smm(text: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<MakerMakerInstance> {
    match significant(text).next() {
        Some((_, "smmcirc")) => parse_smm_circuit(text, load),
        _ => parse_smm_explicit(text),
    }
}

pub fn parse_smm_explicit(text: &str) -> Result<MakerMakerInstance> {
    let mut n: Option<usize> = None;
    let mut perm = None;
    let mut w1 = Vec::new();
    let mut w2 = Vec::new();
    for (lineno, line) in significant(text) {
        let Some(size) = n else {
            match line.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["universe", k] => {
                    n = Some(k.parse().map_err(|_| Error::parse(lineno, "bad universe size"))?);
                    continue;
                }
                _ => return Err(Error::parse(lineno, "expected `universe <n>` header")),
            }
        };
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(lineno, format!("unrecognized line `{line}`")))?;
        let idx = parse_indices(lineno, rest)?;
        let to_mask = |idx: &[usize]| -> Result<u64> {
            idx.iter().try_fold(0u64, |m, &i| {
                if i >= size {
                    Err(Error::Index { index: i, size })
                } else {
                    Ok(m | 1 << i)
                }
            })
        };
        match key.trim() {
            "perm" => {
                if perm.replace(idx).is_some() {
                    return Err(Error::parse(lineno, "duplicate `perm:` line"));
                }
            }
            "w1" => w1.push(to_mask(&idx)?),
            "w2" => w2.push(to_mask(&idx)?),
            other => return Err(Error::parse(lineno, format!("unknown key `{other}`"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(0, "missing `universe <n>` header"))?;
    MakerMakerInstance::new(n, WinFamily::Explicit(w1), WinFamily::Explicit(w2), perm)
}

fn parse_smm_circuit(text: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<MakerMakerInstance> {
    let mut c1 = None;
    let mut c2 = None;
    let mut relabel = None;
    for (lineno, line) in significant(text).skip(1) {
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(lineno, format!("unrecognized line `{line}`")))?;
        let rest = rest.trim();
        match key.trim() {
            "c1" => c1 = Some(parse_circuit(&load(rest)?)?),
            "c2" => c2 = Some(parse_circuit(&load(rest)?)?),
            "relabel" => relabel = Some(parse_indices(lineno, rest)?),
            other => return Err(Error::parse(lineno, format!("unknown key `{other}`"))),
        }
    }
    let c1 = c1.ok_or_else(|| Error::parse(0, "missing `c1:` line"))?;
    let c2 = c2.ok_or_else(|| Error::parse(0, "missing `c2:` line"))?;
    if c1.inputs() != c2.inputs() {
        return Err(Error::Dimension(format!(
            "circuits have {} and {} inputs",
            c1.inputs(),
            c2.inputs()
        )));
    }
    let n = c1.inputs();
    MakerMakerInstance::new(n, WinFamily::circuit(c1)?, WinFamily::circuit(c2)?, relabel)
}

/// Writes an explicit instance; `None` for predicate or circuit families.
pub fn to_smm_text(inst: &MakerMakerInstance) -> Option<String> {
    let (WinFamily::Explicit(w1), WinFamily::Explicit(w2)) = (inst.w1(), inst.w2()) else {
        return None;
    };
    let n = inst.universe_size();
    let list = |m: u64| {
        (0..n).filter(|&i| m >> i & 1 == 1).map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
    };
    let mut s = format!("universe {n}\n");
    if let Some(pi) = inst.witness() {
        let p: Vec<String> = pi.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "perm: {}", p.join(" "));
    }
    for (key, family) in [("w1", w1), ("w2", w2)] {
        for &m in family {
            let _ = writeln!(s, "{}", format!("{key}: {}", list(m)).trim_end());
        }
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::makermaker::{gen_clique, gen_tictactoe};

    fn no_files(_: &str) -> Result<String> {
        Err(Error::parse(0, "no files"))
    }

    #[test]
    fn explicit_round_trip() {
        for inst in [gen_tictactoe(), gen_clique(4, 3).unwrap()] {
            let text = to_smm_text(&inst).unwrap();
            assert_eq!(parse_smm(&text, &no_files).unwrap(), inst);
        }
    }

    #[test]
    fn explicit_errors() {
        assert!(matches!(parse_smm("w1: 0\n", &no_files), Err(Error::Parse { .. })));
        let empty = parse_smm("universe 2\nw1:\nw2: 1\n", &no_files).unwrap();
        assert_eq!(empty.w1(), &WinFamily::Explicit(vec![0]));
        assert_eq!(
            parse_smm("universe 2\nw1: 0 2\n", &no_files),
            Err(Error::Index { index: 2, size: 2 })
        );
        assert!(matches!(parse_smm("universe 2\nw3: 0\n", &no_files), Err(Error::Parse { .. })));
        assert!(matches!(parse_smm("universe 2\nperm: 0\n", &no_files), Err(Error::Dimension(_))));
    }

    #[test]
    fn circuit_instance() {
        let load = |p: &str| -> Result<String> {
            match p {
                "a.circ" => Ok("n = not x2\na = and x1 n\noutput a\n".into()),
                "b.circ" => Ok("n = not x1\na = and x2 n\noutput a\n".into()),
                _ => Err(Error::parse(0, "missing")),
            }
        };
        let inst = parse_smm("smmcirc\nc1: a.circ\nc2: b.circ\nrelabel: 1 0\n", &load).unwrap();
        assert_eq!(inst.universe_size(), 2);
        assert_eq!(inst.witness(), Some(&[1, 0][..]));
        assert!(to_smm_text(&inst).is_none());
        assert!(parse_smm("smmcirc\nc1: a.circ\n", &load).is_err());
    }
}
