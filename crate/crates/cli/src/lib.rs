//! The `steal` command line.
//!
//! Every command prints `key=value` lines sorted by key, except `gen`
//! without `-o`, which prints the generated file. Exit codes: 0 solved or
//! passed, 1 verification failure, 2 usage or input error, 3 resource bound.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use steal_core::engine::{Move, Outcome, SolveReport, Solver, SolverConfig, DEFAULT_MAX_STATES};
use steal_core::error::Error;
use steal_core::hex::{self, HexGame, HexPosition, DEFAULT_THEOREM_BOUND};
use steal_core::makermaker::{self, MakerMakerInstance, SmmGame, DRAW_FREE_BOUND};
use steal_core::poset::{self, Poset, PosetGame, PosetPosition};
use steal_core::reduction;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "steal", version, about = "Solve and audit strategy-stealing games")]
pub struct Cli {
    /// Ceiling on stored states per transposition table.
    #[arg(long, global = true, env = "STEAL_MAX_STATES", default_value_t = DEFAULT_MAX_STATES)]
    pub max_states: usize,

    /// Worker threads for root-move splitting.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum SolveKind {
    Poset,
    Hex,
    Smm,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum VerifyKind {
    Mphard,
    Reduction,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ReduceKind {
    Hex2smm,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Game value of a `.poset`, `.hex` or `.smm` file.
    Solve { kind: SolveKind, file: PathBuf },
    /// Winning first moves of a minimum poset game.
    Mpmove { file: PathBuf },
    /// Optimal first moves of a Maker-Maker game.
    Smmmove { file: PathBuf },
    /// Add a new minimum element to a poset.
    Addmin {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build the two-board Maker-Maker game from a Hex position.
    Reduce {
        kind: ReduceKind,
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    Verify { kind: VerifyKind, file: PathBuf },
    #[command(subcommand)]
    Check(CheckCommand),
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    Drawfree { file: PathBuf },
    Symmetry { file: PathBuf },
    /// Every full colouring of the n x n board has exactly one winner.
    Hextheorem {
        n: usize,
        #[arg(long, default_value_t = DEFAULT_THEOREM_BOUND)]
        bound: usize,
        /// Sample this many random colourings instead of enumerating.
        #[arg(long)]
        samples: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    Chomp {
        rows: usize,
        cols: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Nim {
        #[arg(value_delimiter = ',')]
        chains: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Clique {
        n: usize,
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Ap {
        n: usize,
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Hyperttt {
        k: usize,
        d: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Tictactoe {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommandResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Sorted `key=value` output.
#[derive(Default)]
struct Lines(Vec<(String, String)>);

impl Lines {
    fn put(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    fn render(mut self) -> String {
        self.0.sort();
        self.0.into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

enum Failure {
    Usage(String),
    Resource(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e.root() {
            Error::ResourceBound { .. } | Error::Bound { .. } => Failure::Resource(msg),
            Error::Inconsistent(_) => Failure::Other(msg),
            _ => Failure::Usage(msg),
        }
    }
}

type Outcomes = std::result::Result<(i32, String), Failure>;

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

fn mask_list(n: usize, mask: u64) -> String {
    join((0..n).filter(|&i| mask >> i & 1 == 1))
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_poset(path: &Path) -> std::result::Result<Poset, Failure> {
    Ok(poset::parse_poset(&read(path)?)?)
}

fn load_hex(path: &Path) -> std::result::Result<HexPosition, Failure> {
    Ok(hex::parse_hex(&read(path)?)?)
}

/// Loads any `.smm` form; referenced files resolve against the file's directory.
fn load_smm(path: &Path) -> std::result::Result<MakerMakerInstance, Failure> {
    let text = read(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let loader = |rel: &str| -> steal_core::Result<String> {
        let p = dir.join(rel);
        fs::read_to_string(&p).map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", p.display()) })
    };
    let header = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if header.starts_with("smmhex") {
        Ok(reduction::parse_smmhex(&text, &loader)?.instance().clone())
    } else {
        Ok(makermaker::parse_smm(&text, &loader)?)
    }
}

fn labels(p: &Poset, moves: &[Move]) -> String {
    join(moves.iter().map(|&m| p.label(m as usize)))
}

fn put_counters(out: &mut Lines, r: &SolveReport) {
    out.put("states_visited", r.states_visited).put("table_size", r.table_size);
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandResult { code, stdout: String::new(), stderr: text }
            } else {
                CommandResult { code, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok((code, stdout)) => CommandResult { code, stdout, stderr: String::new() },
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Resource(m) => (EXIT_RESOURCE, m),
                Failure::Other(m) => (EXIT_FAIL, m),
            };
            CommandResult { code, stdout: String::new(), stderr: format!("error: {msg}\n") }
        }
    }
}

fn execute(cli: &Cli) -> Outcomes {
    let config = SolverConfig::default().with_max_states(cli.max_states).with_threads(cli.threads);
    match &cli.command {
        Command::Solve { kind, file } => solve(*kind, file, &config),
        Command::Mpmove { file } => mpmove(file, &config),
        Command::Smmmove { file } => smmmove(file, &config),
        Command::Addmin { file, output } => addmin(file, output),
        Command::Reduce { kind: ReduceKind::Hex2smm, file, output } => reduce(file, output),
        Command::Verify { kind: VerifyKind::Mphard, file } => verify_mphard(file, &config),
        Command::Verify { kind: VerifyKind::Reduction, file } => verify_reduction(file, &config),
        Command::Check(c) => check(c, cli.seed),
        Command::Gen(g) => generate(g),
    }
}

fn solve(kind: SolveKind, file: &Path, config: &SolverConfig) -> Outcomes {
    let mut out = Lines::default();
    let (outcome, visited, table) = match kind {
        SolveKind::Poset => {
            let p = load_poset(file)?;
            let start = PosetPosition::start(&p);
            let g = poset::grundy(&p, &start, config.max_states)?;
            out.put("elements", p.len()).put("grundy", g);
            let mut s = Solver::new(PosetGame::new(&p), config.max_states);
            (s.solve(&start)?, s.states_visited(), s.table_size())
        }
        SolveKind::Hex => {
            let q = load_hex(file)?;
            out.put("side", q.side())
                .put("red_stones", q.red_mask().count_ones())
                .put("blue_stones", q.blue_mask().count_ones())
                .put("empty_cells", q.empty_mask().count_ones());
            let (game, start) = HexGame::new(&q);
            let mut s = Solver::new(game, config.max_states);
            let o = s.solve(&start)?;
            out.put("red_wins", o == Outcome::FirstWin);
            (o, s.states_visited(), s.table_size())
        }
        SolveKind::Smm => {
            let inst = load_smm(file)?;
            out.put("universe", inst.universe_size());
            let (game, start) = SmmGame::new(&inst);
            let mut s = Solver::new(game, config.max_states);
            (s.solve(&start)?, s.states_visited(), s.table_size())
        }
    };
    out.put("outcome", outcome).put("states_visited", visited).put("table_size", table);
    Ok((EXIT_OK, out.render()))
}

fn mpmove(file: &Path, config: &SolverConfig) -> Outcomes {
    let p = load_poset(file)?;
    let mp = poset::MinimumPoset::new(p)?;
    let r = poset::mp_move(&mp, config)?;
    let mut out = Lines::default();
    out.put("elements", mp.poset().len())
        .put("minimum", mp.poset().label(mp.minimum()))
        .put("mp_winning_moves", labels(mp.poset(), &r.optimal_moves))
        .put("outcome", r.outcome);
    put_counters(&mut out, &r);
    Ok((EXIT_OK, out.render()))
}

fn smmmove(file: &Path, config: &SolverConfig) -> Outcomes {
    let inst = load_smm(file)?;
    let r = makermaker::smm_move(&inst, config)?;
    let mut out = Lines::default();
    out.put("universe", inst.universe_size())
        .put("optimal_moves", join(&r.optimal_moves))
        .put("outcome", r.outcome);
    put_counters(&mut out, &r);
    Ok((EXIT_OK, out.render()))
}

fn addmin(file: &Path, output: &Path) -> Outcomes {
    let p = load_poset(file)?;
    if p.len() >= poset::MAX_ELEMENTS {
        return Err(Error::Bound { size: p.len() + 1, bound: poset::MAX_ELEMENTS }.into());
    }
    let mp = poset::add_minimum(&p);
    write(output, &mp.poset().to_text())?;
    let mut out = Lines::default();
    out.put("elements", mp.poset().len())
        .put("minimum", mp.poset().label(mp.minimum()))
        .put("output", output.display());
    Ok((EXIT_OK, out.render()))
}

/// How the descriptor at `output` should name `source`.
fn source_reference(source: &Path, output: &Path) -> String {
    let dir_of = |p: &Path| {
        let parent = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        fs::canonicalize(parent).ok()
    };
    match (dir_of(source), dir_of(output), source.file_name()) {
        (Some(a), Some(b), Some(name)) if a == b => name.to_string_lossy().into_owned(),
        _ => fs::canonicalize(source).unwrap_or_else(|_| source.to_path_buf()).display().to_string(),
    }
}

fn reduce(file: &Path, output: &Path) -> Outcomes {
    let q = load_hex(file)?;
    let art = reduction::hex_to_smm(&q)?;
    write(output, &art.to_text(&source_reference(file, output)))?;
    let mut out = Lines::default();
    out.put("b", art.b())
        .put("output", output.display())
        .put("r", art.r())
        .put("universe", art.universe_size());
    Ok((EXIT_OK, out.render()))
}

fn verify_mphard(file: &Path, config: &SolverConfig) -> Outcomes {
    let p = load_poset(file)?;
    if p.len() >= poset::MAX_ELEMENTS {
        return Err(Error::Bound { size: p.len() + 1, bound: poset::MAX_ELEMENTS }.into());
    }
    let r = poset::verify_mphard_instance(&p, config)?;
    let extended = poset::add_minimum(&p);
    let mut out = Lines::default();
    out.put("m", extended.poset().label(r.minimum))
        .put("minimum_wins", r.minimum_wins)
        .put("mp_winning_moves", labels(extended.poset(), &r.extended.optimal_moves))
        .put("original_outcome", r.original)
        .put("verdict", verdict(r.pass));
    Ok((if r.pass { EXIT_OK } else { EXIT_FAIL }, out.render()))
}

fn verify_reduction(file: &Path, config: &SolverConfig) -> Outcomes {
    let q = load_hex(file)?;
    let r = reduction::verify_reduction(&q, config)?;
    let mut out = Lines::default();
    out.put("drawfree", verdict(r.draw_free.draw_free()))
        .put("g_optimal_moves", join(&r.moves.optimal_moves))
        .put("g_outcome", r.moves.outcome)
        .put("lemma", verdict(r.lemma))
        .put("red_wins", r.red_wins)
        .put("swap", verdict(r.swap_invariant))
        .put("symmetry", verdict(r.symmetry))
        .put("universe", r.universe)
        .put("verdict", verdict(r.pass));
    if let Some(s) = r.draw_free.counterexample {
        out.put("counterexample", mask_list(r.universe, s));
    }
    Ok((if r.pass { EXIT_OK } else { EXIT_FAIL }, out.render()))
}

fn check(c: &CheckCommand, seed: u64) -> Outcomes {
    let mut out = Lines::default();
    let pass = match c {
        CheckCommand::Drawfree { file } => {
            let inst = load_smm(file)?;
            let r = makermaker::draw_free_check(&inst, DRAW_FREE_BOUND)?;
            out.put("subsets", r.subsets).put("universe", inst.universe_size());
            if let Some(s) = r.counterexample {
                out.put("counterexample", mask_list(inst.universe_size(), s));
            }
            r.draw_free()
        }
        CheckCommand::Symmetry { file } => {
            let inst = load_smm(file)?;
            out.put("universe", inst.universe_size());
            makermaker::verify_symmetry(&inst)?
        }
        CheckCommand::Hextheorem { n, bound, samples } => {
            let r = match samples {
                Some(k) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    out.put("mode", "sampled").put("seed", seed);
                    hex::hex_no_draw_sample(*n, *k, &mut rng)?
                }
                None => {
                    out.put("mode", "exhaustive");
                    hex::hex_no_draw_check(*n, *bound)?
                }
            };
            out.put("colorings", r.colorings).put("n", n);
            if let Some(red) = r.counterexample {
                out.put("counterexample", mask_list(n * n, red));
            }
            r.pass()
        }
    };
    out.put("verdict", verdict(pass));
    Ok((if pass { EXIT_OK } else { EXIT_FAIL }, out.render()))
}

fn generate(g: &GenCommand) -> Outcomes {
    let (text, output, kind, size) = match g {
        GenCommand::Chomp { rows, cols, output } => {
            let mp = poset::gen_chomp(*rows, *cols)?;
            (mp.poset().to_text(), output, "poset", mp.poset().len())
        }
        GenCommand::Nim { chains, output } => {
            let p = poset::gen_nim(chains)?;
            (p.to_text(), output, "poset", p.len())
        }
        GenCommand::Clique { n, k, output } => smm_text(makermaker::gen_clique(*n, *k)?, output),
        GenCommand::Ap { n, k, output } => smm_text(makermaker::gen_ap(*n, *k)?, output),
        GenCommand::Hyperttt { k, d, output } => smm_text(makermaker::gen_hypercube_ttt(*k, *d)?, output),
        GenCommand::Tictactoe { output } => smm_text(makermaker::gen_tictactoe(), output),
    };
    match output {
        None => Ok((EXIT_OK, text)),
        Some(path) => {
            write(path, &text)?;
            let mut out = Lines::default();
            out.put("format", kind).put("output", path.display()).put("size", size);
            Ok((EXIT_OK, out.render()))
        }
    }
}

fn smm_text(inst: MakerMakerInstance, output: &Option<PathBuf>) -> (String, &Option<PathBuf>, &'static str, usize) {
    let text = makermaker::to_smm_text(&inst).expect("generators produce explicit families");
    (text, output, "smm", inst.universe_size())
}
