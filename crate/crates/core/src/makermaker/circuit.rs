//! AND/OR/NOT circuits over inputs `x1..xn` and their acceptance tables.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Default input bound for tabulating a circuit over all `2^n` assignments.
pub const TABULATION_BOUND: usize = 16;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    And(usize, usize),
    Or(usize, usize),
    Not(usize),
}

/// A circuit whose wires are numbered inputs first (`0..n` for `x1..xn`),
/// then gates in topological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    inputs: usize,
    gates: Vec<Gate>,
    names: Vec<String>,
    output: usize,
}

impl Circuit {
    pub fn new(inputs: usize, gates: Vec<Gate>, output: usize) -> Result<Self> {
        if inputs > 64 {
            return Err(Error::Bound { size: inputs, bound: 64 });
        }
        for (k, g) in gates.iter().enumerate() {
            let args = match *g {
                Gate::And(a, b) | Gate::Or(a, b) => vec![a, b],
                Gate::Not(a) => vec![a],
            };
            if let Some(&a) = args.iter().find(|&&a| a >= inputs + k) {
                return Err(Error::UndefinedWire(format!("w{a}")));
            }
        }
        if output >= inputs + gates.len() {
            return Err(Error::UndefinedWire(format!("w{output}")));
        }
        let names = (0..gates.len()).map(|k| format!("g{}", k + 1)).collect();
        Ok(Circuit { inputs, gates, names, output })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Evaluates with input `x(i+1)` set iff bit `i` of `assignment` is set.
    pub fn eval(&self, assignment: u64) -> bool {
        let mut w: Vec<bool> = (0..self.inputs).map(|i| assignment >> i & 1 == 1).collect();
        for g in &self.gates {
            let v = match *g {
                Gate::And(a, b) => w[a] && w[b],
                Gate::Or(a, b) => w[a] || w[b],
                Gate::Not(a) => !w[a],
            };
            w.push(v);
        }
        w[self.output]
    }

    /// Evaluates 64 consecutive assignments `64*block .. 64*block+63` at once.
    fn eval_block(&self, block: u64, wires: &mut Vec<u64>) -> u64 {
        const LOW: [u64; 6] = [
            0xAAAA_AAAA_AAAA_AAAA,
            0xCCCC_CCCC_CCCC_CCCC,
            0xF0F0_F0F0_F0F0_F0F0,
            0xFF00_FF00_FF00_FF00,
            0xFFFF_0000_FFFF_0000,
            0xFFFF_FFFF_0000_0000,
        ];
        wires.clear();
        for i in 0..self.inputs {
            wires.push(if let Some(&low) = LOW.get(i) {
                low
            } else if block >> (i - 6) & 1 == 1 {
                u64::MAX
            } else {
                0
            });
        }
        for g in &self.gates {
            let v = match *g {
                Gate::And(a, b) => wires[a] & wires[b],
                Gate::Or(a, b) => wires[a] | wires[b],
                Gate::Not(a) => !wires[a],
            };
            wires.push(v);
        }
        wires[self.output]
    }

    /// Acceptance table over all `2^n` assignments.
    pub fn truth_table(&self, bound: usize) -> Result<BitTable> {
        if self.inputs > bound {
            return Err(Error::Bound { size: self.inputs, bound });
        }
        let mut table = BitTable::zeros(self.inputs);
        let mut wires = Vec::with_capacity(self.inputs + self.gates.len());
        let valid = table.valid_mask();
        for (block, word) in table.words.iter_mut().enumerate() {
            *word = self.eval_block(block as u64, &mut wires) & valid;
        }
        Ok(table)
    }

    /// Renders in the `.circ` text format.
    pub fn to_text(&self) -> String {
        let wire = |w: usize| {
            if w < self.inputs {
                format!("x{}", w + 1)
            } else {
                self.names[w - self.inputs].clone()
            }
        };
        let mut s = format!("inputs {}\n", self.inputs);
        for (k, g) in self.gates.iter().enumerate() {
            let rhs = match *g {
                Gate::And(a, b) => format!("and {} {}", wire(a), wire(b)),
                Gate::Or(a, b) => format!("or {} {}", wire(a), wire(b)),
                Gate::Not(a) => format!("not {}", wire(a)),
            };
            s.push_str(&format!("{} = {rhs}\n", self.names[k]));
        }
        s.push_str(&format!("output {}\n", wire(self.output)));
        s
    }
}

/// A `2^n`-entry bit table indexed by subsets of `n` elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitTable {
    n: usize,
    words: Vec<u64>,
}

impl BitTable {
    pub fn zeros(n: usize) -> Self {
        let words = if n >= 6 { 1usize << (n - 6) } else { 1 };
        BitTable { n, words: vec![0; words] }
    }

    pub fn from_fn(n: usize, f: impl Fn(u64) -> bool) -> Self {
        let mut t = Self::zeros(n);
        for s in 0..(1u64 << n) {
            if f(s) {
                t.set(s);
            }
        }
        t
    }

    fn valid_mask(&self) -> u64 {
        if self.n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u32 << self.n)) - 1
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, s: u64) -> bool {
        self.words[(s >> 6) as usize] >> (s & 63) & 1 == 1
    }

    pub fn set(&mut self, s: u64) {
        self.words[(s >> 6) as usize] |= 1u64 << (s & 63);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Upward closure in place: afterwards `t[T]` is set iff some `S ⊆ T`
    /// was set. Sum over subsets, one pass per element.
    pub fn close_upward(&mut self) {
        const ZERO_AT: [u64; 6] = [
            0x5555_5555_5555_5555,
            0x3333_3333_3333_3333,
            0x0F0F_0F0F_0F0F_0F0F,
            0x00FF_00FF_00FF_00FF,
            0x0000_FFFF_0000_FFFF,
            0x0000_0000_FFFF_FFFF,
        ];
        for (i, &zero) in ZERO_AT.iter().enumerate().take(self.n) {
            for w in &mut self.words {
                *w |= (*w & zero) << (1u32 << i);
            }
        }
        for i in 6..self.n {
            let stride = 1usize << (i - 6);
            for w in 0..self.words.len() {
                if w & stride != 0 {
                    self.words[w] |= self.words[w ^ stride];
                }
            }
        }
    }
}

/// Upward closure of the circuit's accepted sets.
pub fn monotone_closure_table(c: &Circuit, bound: usize) -> Result<BitTable> {
    let mut t = c.truth_table(bound)?;
    t.close_upward();
    Ok(t)
}

/// Parses the `.circ` format.
///
/// ```text
/// inputs 2            # optional; otherwise the largest xi referenced
/// g1 = and x1 x2
/// g2 = not g1
/// output g2
/// ```
///
/// Gates may appear in any order as long as the wiring is acyclic.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    enum Op {
        And,
        Or,
        Not,
    }
    struct Def {
        name: String,
        op: Op,
        args: Vec<String>,
    }
    let mut declared: Option<usize> = None;
    let mut defs: Vec<Def> = Vec::new();
    let mut output: Option<String> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["inputs", k] => {
                declared = Some(k.parse().map_err(|_| Error::parse(lineno, "bad input count"))?);
            }
            ["output", w] => {
                if output.replace(w.to_string()).is_some() {
                    return Err(Error::parse(lineno, "more than one output"));
                }
            }
            [name, "=", op, args @ ..] => {
                let op = match op.to_ascii_lowercase().as_str() {
                    "and" => Op::And,
                    "or" => Op::Or,
                    "not" => Op::Not,
                    other => return Err(Error::parse(lineno, format!("unknown gate `{other}`"))),
                };
                let arity = if matches!(op, Op::Not) { 1 } else { 2 };
                if args.len() != arity {
                    return Err(Error::parse(lineno, format!("gate `{name}` needs {arity} argument(s)")));
                }
                if input_index(name).is_some() || defs.iter().any(|d| d.name == *name) {
                    return Err(Error::parse(lineno, format!("wire `{name}` defined twice")));
                }
                defs.push(Def { name: name.to_string(), op, args: args.iter().map(|a| a.to_string()).collect() });
            }
            _ => return Err(Error::parse(lineno, format!("unrecognized line `{line}`"))),
        }
    }
    let output = output.ok_or_else(|| Error::parse(0, "missing `output` line"))?;

    let referenced = defs
        .iter()
        .flat_map(|d| d.args.iter())
        .chain(std::iter::once(&output))
        .filter_map(|w| input_index(w))
        .map(|i| i + 1)
        .max()
        .unwrap_or(0);
    let inputs = match declared {
        Some(k) if k < referenced => {
            return Err(Error::UndefinedWire(format!("x{referenced}")));
        }
        Some(k) => k,
        None => referenced,
    };

    // Topological order by depth-first search over gate definitions.
    let by_name: HashMap<&str, usize> = defs.iter().enumerate().map(|(i, d)| (d.name.as_str(), i)).collect();
    let mut wire_of: Vec<Option<usize>> = vec![None; defs.len()];
    let mut on_stack = vec![false; defs.len()];
    let mut gates: Vec<Gate> = Vec::new();

    fn resolve(
        w: &str,
        inputs: usize,
        defs: &[Def],
        by_name: &HashMap<&str, usize>,
        wire_of: &mut Vec<Option<usize>>,
        on_stack: &mut Vec<bool>,
        gates: &mut Vec<Gate>,
    ) -> Result<usize> {
        if let Some(i) = input_index(w) {
            if i < inputs {
                return Ok(i);
            }
            return Err(Error::UndefinedWire(w.to_string()));
        }
        let &d = by_name.get(w).ok_or_else(|| Error::UndefinedWire(w.to_string()))?;
        if let Some(idx) = wire_of[d] {
            return Ok(idx);
        }
        if on_stack[d] {
            return Err(Error::CircuitCycle(w.to_string()));
        }
        on_stack[d] = true;
        let mut args = Vec::new();
        for a in &defs[d].args {
            args.push(resolve(a, inputs, defs, by_name, wire_of, on_stack, gates)?);
        }
        on_stack[d] = false;
        gates.push(match defs[d].op {
            Op::And => Gate::And(args[0], args[1]),
            Op::Or => Gate::Or(args[0], args[1]),
            Op::Not => Gate::Not(args[0]),
        });
        let idx = inputs + gates.len() - 1;
        wire_of[d] = Some(idx);
        Ok(idx)
    }

    for d in &defs {
        resolve(&d.name, inputs, &defs, &by_name, &mut wire_of, &mut on_stack, &mut gates)?;
    }
    let out = resolve(&output, inputs, &defs, &by_name, &mut wire_of, &mut on_stack, &mut gates)?;
    let mut names = vec![String::new(); gates.len()];
    for (d, w) in wire_of.iter().enumerate() {
        if let Some(w) = w {
            names[w - inputs] = defs[d].name.clone();
        }
    }
    Ok(Circuit { inputs, gates, names, output: out })
}

/// `x7` -> `Some(6)`.
fn input_index(w: &str) -> Option<usize> {
    let digits = w.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse::<usize>().ok().map(|i| i - 1)
}
