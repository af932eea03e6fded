//! Command-line front end for the nlgames library.
//!
//! Exit codes: 0 success, 2 usage or malformed input, 3 validation failure
//! (inputs parse but violate an invariant), 4 scientific regression (a scan
//! or curve contradicts the expected analytic picture).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nlgames_core::analysis::{
    self, advantage_verdict, gisin_curve, gisin_grid, povm_singlet_scan, AdvantageVerdict,
    ScanConfig, SearchConfig,
};
use nlgames_core::game::{
    average_payoffs, find_pure_nash_in, pure_payoff_grid, EquilibriumReport, GameParams,
    PayoffPair, Player, PureStrategy, UtilityTable,
};
use nlgames_core::io::{self, fmt_sig9};
use nlgames_core::nsbox::{self, canonical_from_box, chsh, k_statistic, max_chsh_symmetry, NsBox};
use nlgames_core::quantum::box_from_strategy;
use nlgames_core::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_REGRESSION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "nlgames",
    version,
    about = "Bayesian games with no-signaling advice: equilibria, boxes, quantum strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the pure-strategy payoff table and Nash equilibria of G(kappa, tau)
    GameTable(GameTableArgs),
    /// Evaluate a box file: payoffs, CHSH, K, locality, advantage flags
    Payoff(PayoffArgs),
    /// Evaluate a quantum strategy file; optionally search best responses
    Quantum(QuantumArgs),
    /// Scan the singlet POVM region for points beating the unfair equilibrium
    ScanPovm(ScanPovmArgs),
    /// Emit the payoff curve of the CHSH-optimal Gisin settings as CSV
    GisinCurve(GisinCurveArgs),
    /// List the 24 vertices of the no-signaling polytope
    Vertices(VerticesArgs),
    /// Decide local-polytope membership of a box file
    IsLocal(IsLocalArgs),
}

#[derive(Args)]
struct GameArgs {
    /// Utility parameter kappa (> 0)
    #[arg(long, default_value_t = 0.5)]
    kappa: f64,
    /// Utility parameter tau (> 0)
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Load the game from a JSON file instead (overrides --kappa/--tau)
    #[arg(long)]
    game: Option<PathBuf>,
}

impl GameArgs {
    fn load(&self) -> Result<(UtilityTable, Option<GameParams>), Error> {
        if let Some(path) = &self.game {
            let loaded = io::load_game(path)?;
            Ok((loaded.table, loaded.params))
        } else {
            // flag-provided parameters failing validation are usage errors
            let params = GameParams::new(self.kappa, self.tau)
                .map_err(|e| Error::Malformed(e.to_string()))?;
            Ok((UtilityTable::from_params(&params), Some(params)))
        }
    }
}

#[derive(Args)]
struct GameTableArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Best-response tolerance for the equilibrium search
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Emit machine-readable JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PayoffArgs {
    /// Box file (JSON, full or canonical format)
    #[arg(long = "box")]
    box_file: PathBuf,
    #[command(flatten)]
    game: GameArgs,
    /// Locality-test tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlayerArg {
    A,
    B,
}

impl From<PlayerArg> for Player {
    fn from(p: PlayerArg) -> Self {
        match p {
            PlayerArg::A => Player::A,
            PlayerArg::B => Player::B,
        }
    }
}

#[derive(Args)]
struct QuantumArgs {
    /// Strategy file (JSON: state, alice/bob angles, optional povm)
    #[arg(long)]
    strategy: PathBuf,
    #[command(flatten)]
    game: GameArgs,
    /// Also search the named player's best response
    #[arg(long, value_enum)]
    best_response: Option<PlayerArg>,
    /// Also search the social optimum (max F_A + F_B) for this state
    #[arg(long)]
    social_optimum: bool,
    /// Equilibrium tolerance for the deviation check
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Seed for the multistart searches
    #[arg(long, env = "NLGAMES_SEED", default_value_t = 0)]
    seed: u64,
    /// Random restarts per search
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ScanPovmArgs {
    /// Grid step for alpha
    #[arg(long = "grid-alpha", default_value_t = 1e-3)]
    alpha_step: f64,
    /// Grid step for mu
    #[arg(long = "grid-mu", default_value_t = 1e-3)]
    mu_step: f64,
    /// Grid step for the sharp-settings CHSH value
    #[arg(long = "grid-bs", default_value_t = 1e-2)]
    bs_step: f64,
    /// Upper end of the alpha range
    #[arg(long, default_value_t = 2.0)]
    alpha_max: f64,
    /// Lower end of the sharp CHSH range (default -2*sqrt(2))
    #[arg(long)]
    bs_min: Option<f64>,
    /// Upper end of the sharp CHSH range (default 2*sqrt(2))
    #[arg(long)]
    bs_max: Option<f64>,
    /// Drop the POVM admissibility constraint mu <= min(alpha, 2-alpha)
    #[arg(long)]
    no_admissible: bool,
    /// Write the scan report JSON here instead of stdout
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GisinCurveArgs {
    /// Number of grid points a = k/(n+1)
    #[arg(long, default_value_t = 999)]
    points: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Emit JSON instead of CSV
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerticesArgs {
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IsLocalArgs {
    /// Box file (JSON, full or canonical format)
    #[arg(long = "box")]
    box_file: PathBuf,
    /// Feasibility tolerance for the decomposition
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GameTable(args) => cmd_game_table(args),
        Command::Payoff(args) => cmd_payoff(args),
        Command::Quantum(args) => cmd_quantum(args),
        Command::ScanPovm(args) => cmd_scan_povm(args),
        Command::GisinCurve(args) => cmd_gisin_curve(args),
        Command::Vertices(args) => cmd_vertices(args),
        Command::IsLocal(args) => cmd_is_local(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Malformed(_) => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_VALIDATION),
            }
        }
    }
}

// --- game-table ---------------------------------------------------------------

#[derive(Serialize)]
struct GameTableOutput {
    kappa: Option<f64>,
    tau: Option<f64>,
    /// rows: Alice g1..g4, cols: Bob g1..g4
    grid: [[PayoffPair; 4]; 4],
    equilibria: EquilibriumReport,
}

fn cmd_game_table(args: GameTableArgs) -> Result<u8, Error> {
    let (table, params) = args.game.load()?;
    let grid = pure_payoff_grid(&table);
    let report = find_pure_nash_in(&table, args.tol)?;

    if args.json {
        let out = GameTableOutput {
            kappa: params.map(|p| p.kappa()),
            tau: params.map(|p| p.tau()),
            grid,
            equilibria: report,
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        return Ok(0);
    }

    match params {
        Some(p) => println!(
            "pure-strategy payoffs of G({}, {})",
            fmt_sig9(p.kappa()),
            fmt_sig9(p.tau())
        ),
        None => println!("pure-strategy payoffs (custom utility table)"),
    }
    println!("rows: Alice g1..g4, cols: Bob g1..g4\n");
    for (i, g) in PureStrategy::ALL.iter().enumerate() {
        let cells: Vec<String> = grid[i]
            .iter()
            .map(|p| format!("({}, {})", fmt_sig9(p.f_a), fmt_sig9(p.f_b)))
            .collect();
        println!("{}  {}", g.label(), cells.join("  "));
    }
    println!("\nNash equilibria (tol {:e}):", args.tol);
    if report.equilibria.is_empty() {
        println!("  none");
    }
    for e in &report.equilibria {
        println!(
            "  ({}, {})  F_A={}  F_B={}  {:?}",
            e.alice.label(),
            e.bob.label(),
            fmt_sig9(e.payoffs.f_a),
            fmt_sig9(e.payoffs.f_b),
            e.fairness
        );
    }
    Ok(0)
}

// --- payoff -------------------------------------------------------------------

#[derive(Serialize)]
struct PayoffOutput {
    payoffs: PayoffPair,
    chsh: f64,
    chsh_max_variant: f64,
    k: f64,
    is_local: bool,
    advantage: AdvantageVerdict,
    canonical: CanonicalOut,
}

#[derive(Serialize)]
struct CanonicalOut {
    m: [f64; 2],
    n: [f64; 2],
    c: [f64; 4],
}

fn cmd_payoff(args: PayoffArgs) -> Result<u8, Error> {
    let b = io::load_box(&args.box_file)?;
    let (table, _) = args.game.load()?;
    let c = canonical_from_box(&b);
    let payoffs = average_payoffs(&table, &b);
    let verdict = advantage_verdict(&c);
    let local = nsbox::is_local(&b, args.tol);

    if args.json {
        let out = PayoffOutput {
            payoffs,
            chsh: chsh(&c),
            chsh_max_variant: max_chsh_symmetry(&c),
            k: k_statistic(&c),
            is_local: local.is_local,
            advantage: verdict,
            canonical: CanonicalOut {
                m: [c.m(0), c.m(1)],
                n: [c.n(0), c.n(1)],
                c: [c.c(0, 0), c.c(0, 1), c.c(1, 0), c.c(1, 1)],
            },
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        return Ok(0);
    }

    println!("F_A = {}   F_B = {}", fmt_sig9(payoffs.f_a), fmt_sig9(payoffs.f_b));
    println!(
        "CHSH = {}   max variant = {}   K = {}",
        fmt_sig9(chsh(&c)),
        fmt_sig9(max_chsh_symmetry(&c)),
        fmt_sig9(k_statistic(&c))
    );
    println!("local: {}", if local.is_local { "yes" } else { "no" });
    println!(
        "beats fair (9/16, 9/16): {}   beats unfair-to-B (11/16, 7/16): {}   \
         beats unfair-to-A (7/16, 11/16): {}",
        verdict.beats_fair, verdict.beats_unfair_to_b, verdict.beats_unfair_to_a
    );
    println!(
        "margins vs unfair-to-B: ({}, {})",
        fmt_sig9(verdict.unfair_to_b_margins.0),
        fmt_sig9(verdict.unfair_to_b_margins.1)
    );
    Ok(0)
}

// --- quantum ------------------------------------------------------------------

#[derive(Serialize)]
struct QuantumOutput {
    payoffs: PayoffPair,
    chsh: f64,
    chsh_max_variant: f64,
    k: f64,
    is_quantum_equilibrium: bool,
    equilibrium_tol: f64,
    seed: u64,
    best_response: Option<BestResponseOut>,
    social_optimum: Option<SocialOptimumOut>,
}

#[derive(Serialize)]
struct BestResponseOut {
    player: String,
    value: f64,
    gain: f64,
    payoffs: PayoffPair,
    angles: Vec<f64>,
    converged: bool,
    evaluations: u64,
}

#[derive(Serialize)]
struct SocialOptimumOut {
    sum: f64,
    payoffs: PayoffPair,
    angles: Vec<f64>,
    beats_unfair_to_b: bool,
    converged: bool,
    evaluations: u64,
}

fn cmd_quantum(args: QuantumArgs) -> Result<u8, Error> {
    let strategy = io::load_strategy(&args.strategy)?;
    let (table, params) = args.game.load()?;
    let game = params.ok_or_else(|| {
        Error::InvalidArgument(
            "quantum analysis needs a parametric game (use --kappa/--tau)".into(),
        )
    })?;
    let config = SearchConfig {
        restarts: args.restarts,
        seed: args.seed,
        ..Default::default()
    };

    let b = box_from_strategy(&strategy);
    let c = canonical_from_box(&b);
    let payoffs = average_payoffs(&table, &b);
    let equilibrium = analysis::is_quantum_equilibrium(&strategy, &game, args.tol, &config);

    let best_response = args.best_response.map(|p| {
        let player: Player = p.into();
        let r = analysis::best_response(&strategy, &game, player, &config);
        BestResponseOut {
            player: format!("{player:?}"),
            value: r.best_value,
            gain: r.best_value - payoffs.get(player),
            payoffs: r.payoffs,
            angles: r.best_params,
            converged: r.converged,
            evaluations: r.evaluations,
        }
    });

    let social_optimum = if args.social_optimum {
        let so = analysis::social_optimum(&strategy.state, &game, &config);
        Some(SocialOptimumOut {
            sum: so.result.best_value,
            payoffs: so.result.payoffs,
            angles: so.result.best_params,
            beats_unfair_to_b: so.beats_unfair_point.is_some(),
            converged: so.result.converged,
            evaluations: so.result.evaluations,
        })
    } else {
        None
    };

    if args.json {
        let out = QuantumOutput {
            payoffs,
            chsh: chsh(&c),
            chsh_max_variant: max_chsh_symmetry(&c),
            k: k_statistic(&c),
            is_quantum_equilibrium: equilibrium,
            equilibrium_tol: args.tol,
            seed: args.seed,
            best_response,
            social_optimum,
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        return Ok(0);
    }

    println!("F_A = {}   F_B = {}", fmt_sig9(payoffs.f_a), fmt_sig9(payoffs.f_b));
    println!(
        "CHSH = {}   max variant = {}   K = {}",
        fmt_sig9(chsh(&c)),
        fmt_sig9(max_chsh_symmetry(&c)),
        fmt_sig9(k_statistic(&c))
    );
    println!(
        "quantum equilibrium (tol {:e}): {}",
        args.tol,
        if equilibrium { "yes" } else { "no" }
    );
    if let Some(br) = &best_response {
        println!(
            "best response for {}: value {} (gain {}), converged: {}",
            br.player,
            fmt_sig9(br.value),
            fmt_sig9(br.gain),
            br.converged
        );
        println!(
            "  at angles (theta0, phi0, theta1, phi1) = ({}, {}, {}, {})",
            fmt_sig9(br.angles[0]),
            fmt_sig9(br.angles[1]),
            fmt_sig9(br.angles[2]),
            fmt_sig9(br.angles[3])
        );
    }
    if let Some(so) = &social_optimum {
        println!(
            "social optimum: F_A + F_B = {} at F_A = {}, F_B = {} \
             (beats unfair-to-B equilibrium: {})",
            fmt_sig9(so.sum),
            fmt_sig9(so.payoffs.f_a),
            fmt_sig9(so.payoffs.f_b),
            so.beats_unfair_to_b
        );
    }
    Ok(0)
}

// --- scan-povm ------------------------------------------------------------------

fn cmd_scan_povm(args: ScanPovmArgs) -> Result<u8, Error> {
    let defaults = ScanConfig::default();
    let cfg = ScanConfig {
        alpha_step: args.alpha_step,
        mu_step: args.mu_step,
        bs_step: args.bs_step,
        alpha_max: args.alpha_max,
        bs_min: args.bs_min.unwrap_or(defaults.bs_min),
        bs_max: args.bs_max.unwrap_or(defaults.bs_max),
        enforce_admissible: !args.no_admissible,
    };
    if cfg.alpha_step <= 0.0 || cfg.mu_step <= 0.0 || cfg.bs_step <= 0.0 {
        return Err(Error::InvalidArgument("grid steps must be positive".into()));
    }
    if cfg.alpha_max < cfg.alpha_step || cfg.bs_max < cfg.bs_min {
        return Err(Error::InvalidArgument("empty scan ranges".into()));
    }
    let result = povm_singlet_scan(&cfg);
    let json = serde_json::to_string_pretty(&result).expect("serializable");
    match &args.out {
        Some(path) => {
            std::fs::write(path, &json)
                .map_err(|e| Error::Malformed(format!("cannot write {}: {e}", path.display())))?;
            eprintln!(
                "scanned {} points, feasible {}, max min-margin {}",
                result.points_scanned,
                result.feasible_count,
                fmt_sig9(result.max_min_margin)
            );
        }
        None => println!("{json}"),
    }
    if result.feasible_count > 0 {
        eprintln!(
            "scan contradiction: {} grid points satisfy both conditions",
            result.feasible_count
        );
        return Ok(EXIT_REGRESSION);
    }
    Ok(0)
}

// --- gisin-curve ------------------------------------------------------------------

fn cmd_gisin_curve(args: GisinCurveArgs) -> Result<u8, Error> {
    if args.points == 0 {
        return Err(Error::InvalidArgument("need at least one grid point".into()));
    }
    let curve = gisin_curve(&gisin_grid(args.points))?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&curve).expect("serializable"));
    } else {
        let csv = io::curve_to_csv(&curve.points);
        match &args.csv {
            Some(path) => {
                std::fs::write(path, &csv).map_err(|e| {
                    Error::Malformed(format!("cannot write {}: {e}", path.display()))
                })?;
                eprintln!(
                    "{} points, max F_A = {}",
                    curve.points.len(),
                    fmt_sig9(curve.max_f_a)
                );
            }
            None => print!("{csv}"),
        }
    }
    if curve.max_f_a >= 11.0 / 16.0 {
        eprintln!(
            "curve contradiction: max F_A = {} reaches 11/16",
            fmt_sig9(curve.max_f_a)
        );
        return Ok(EXIT_REGRESSION);
    }
    Ok(0)
}

// --- vertices ------------------------------------------------------------------

#[derive(Serialize)]
struct VertexOut {
    name: String,
    format: &'static str,
    p: Vec<f64>,
    chsh_max_variant: f64,
}

fn vertex_list() -> Vec<(String, NsBox)> {
    let mut out = Vec::new();
    for ga in PureStrategy::ALL {
        for gb in PureStrategy::ALL {
            out.push((
                format!("det-{}-{}", ga.label(), gb.label()),
                nlgames_core::game::pure_strategy_box(ga, gb),
            ));
        }
    }
    for a in 0..2u8 {
        for b in 0..2u8 {
            for g in 0..2u8 {
                out.push((format!("pr-{a}{b}{g}"), nsbox::pr_variant(a, b, g)));
            }
        }
    }
    out
}

fn cmd_vertices(args: VerticesArgs) -> Result<u8, Error> {
    let vertices = vertex_list();
    if args.json {
        let out: Vec<VertexOut> = vertices
            .iter()
            .map(|(name, b)| VertexOut {
                name: name.clone(),
                format: "full",
                p: b.entries().to_vec(),
                chsh_max_variant: max_chsh_symmetry(&canonical_from_box(b)),
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        return Ok(0);
    }
    println!("24 vertices of the 2-2-2 no-signaling polytope:");
    for (name, b) in &vertices {
        println!(
            "  {name:<12} max CHSH variant = {}",
            fmt_sig9(max_chsh_symmetry(&canonical_from_box(b)))
        );
    }
    Ok(0)
}

// --- is-local ------------------------------------------------------------------

#[derive(Serialize)]
struct IsLocalOutput {
    is_local: bool,
    chsh_max_variant: f64,
    weights: Option<Vec<WeightOut>>,
}

#[derive(Serialize)]
struct WeightOut {
    alice: String,
    bob: String,
    weight: f64,
}

fn cmd_is_local(args: IsLocalArgs) -> Result<u8, Error> {
    let b = io::load_box(&args.box_file)?;
    let r = nsbox::is_local(&b, args.tol);
    let max_variant = max_chsh_symmetry(&canonical_from_box(&b));

    if args.json {
        let weights = r.weights.map(|w| {
            let mut out = Vec::new();
            for (i, ga) in PureStrategy::ALL.iter().enumerate() {
                for (j, gb) in PureStrategy::ALL.iter().enumerate() {
                    let weight = w[4 * i + j];
                    if weight > 1e-12 {
                        out.push(WeightOut {
                            alice: ga.label().to_string(),
                            bob: gb.label().to_string(),
                            weight,
                        });
                    }
                }
            }
            out
        });
        let out = IsLocalOutput { is_local: r.is_local, chsh_max_variant: max_variant, weights };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        return Ok(0);
    }

    println!(
        "local: {}   max CHSH variant = {}",
        if r.is_local { "yes" } else { "no" },
        fmt_sig9(max_variant)
    );
    if let Some(w) = r.weights {
        println!("deterministic decomposition:");
        for (i, ga) in PureStrategy::ALL.iter().enumerate() {
            for (j, gb) in PureStrategy::ALL.iter().enumerate() {
                let weight = w[4 * i + j];
                if weight > 1e-12 {
                    println!("  ({}, {})  {}", ga.label(), gb.label(), fmt_sig9(weight));
                }
            }
        }
    }
    Ok(0)
}
