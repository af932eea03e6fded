//! Advantage predicates, feasibility scans, and angle-space searches.
//!
//! Everything here is phrased for the conflicting-interest instance
//! G(1/2, 1), whose classical equilibria pay `(11/16, 7/16)` (unfair to
//! Bob), `(9/16, 9/16)` (fair), and `(7/16, 11/16)` (unfair to Alice).
//! In canonical box coordinates the two payoffs are
//! `F_A = (3 + (3/2)B + K)/16` and `F_B = (9 + (3/2)B - K)/16`, with `B`
//! the CHSH value and `K = 2(m0+n0) + m1+n1`, which turns
//! "beat an equilibrium on both coordinates" into simple inequalities in
//! `(B, K)`.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{average_payoffs, GameParams, PayoffPair, Player, PureStrategy, UtilityTable};
use crate::nsbox::{self, CanonicalBox, NsBox};
use crate::optimize::{multistart_max, SearchOutcome};
pub use crate::optimize::SearchConfig;
use crate::quantum::{
    box_from_effects, box_from_strategy, effects_povm, effects_projective, MeasDirection,
    PovmParams, QuantumStrategy, TwoQubitState,
};

/// Payoffs of the fair classical equilibrium of G(1/2, 1).
pub const FAIR_EQ_PAYOFF: f64 = 9.0 / 16.0;
/// Payoffs of the unfair-to-Bob classical equilibrium of G(1/2, 1).
pub const UNFAIR_EQ_PAYOFFS: (f64, f64) = (11.0 / 16.0, 7.0 / 16.0);

/// Tolerance on `K = 3` when deciding that a box has fair marginals.
pub const FAIR_MARGINAL_TOL: f64 = 1e-9;

/// Verdict of the fair-strategy comparison: a box with balanced marginals
/// (`K = 3`, so both players receive `(3/8)(1 + B/4)`) beats the best fair
/// classical strategy exactly when `B > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairAdvantage {
    pub advantageous: bool,
    pub chsh: f64,
    pub k: f64,
    /// The common payoff `(3/8)(1 + B/4)` the box would grant a fair split.
    pub fair_payoff: f64,
}

pub fn fair_advantage(c: &CanonicalBox) -> FairAdvantage {
    let b = nsbox::chsh(c);
    let k = nsbox::k_statistic(c);
    FairAdvantage {
        advantageous: (k - 3.0).abs() <= FAIR_MARGINAL_TOL && b > 2.0,
        chsh: b,
        k,
        fair_payoff: 3.0 / 8.0 * (1.0 + b / 4.0),
    }
}

/// Which unfair classical equilibrium a box is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnfairSide {
    /// The `(11/16, 7/16)` equilibrium (unfair to Bob).
    ToBob,
    /// The `(7/16, 11/16)` equilibrium (unfair to Alice), tested by the
    /// role-swapped inequalities.
    ToAlice,
}

/// Advantage over one unfair equilibrium: both players must strictly gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnfairAdvantage {
    pub side: UnfairSide,
    pub advantageous: bool,
    pub payoffs: PayoffPair,
    /// `(F_A - threshold_A, F_B - threshold_B)`.
    pub margins: (f64, f64),
}

pub fn unfair_advantage(c: &CanonicalBox, side: UnfairSide) -> UnfairAdvantage {
    let payoffs = nsbox::payoffs_closed_form(&GameParams::conflict_example(), c);
    let (ta, tb) = match side {
        UnfairSide::ToBob => UNFAIR_EQ_PAYOFFS,
        UnfairSide::ToAlice => (UNFAIR_EQ_PAYOFFS.1, UNFAIR_EQ_PAYOFFS.0),
    };
    let margins = (payoffs.f_a - ta, payoffs.f_b - tb);
    UnfairAdvantage {
        side,
        advantageous: margins.0 > 0.0 && margins.1 > 0.0,
        payoffs,
        margins,
    }
}

/// Combined comparison against all three classical equilibria of G(1/2, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvantageVerdict {
    pub payoffs: PayoffPair,
    pub beats_fair: bool,
    pub beats_unfair_to_b: bool,
    pub beats_unfair_to_a: bool,
    pub fair_margins: (f64, f64),
    pub unfair_to_b_margins: (f64, f64),
    pub unfair_to_a_margins: (f64, f64),
}

pub fn advantage_verdict(c: &CanonicalBox) -> AdvantageVerdict {
    let payoffs = nsbox::payoffs_closed_form(&GameParams::conflict_example(), c);
    let fair_margins = (payoffs.f_a - FAIR_EQ_PAYOFF, payoffs.f_b - FAIR_EQ_PAYOFF);
    let to_b = unfair_advantage(c, UnfairSide::ToBob);
    let to_a = unfair_advantage(c, UnfairSide::ToAlice);
    AdvantageVerdict {
        payoffs,
        beats_fair: fair_margins.0 > 0.0 && fair_margins.1 > 0.0,
        beats_unfair_to_b: to_b.advantageous,
        beats_unfair_to_a: to_a.advantageous,
        fair_margins,
        unfair_to_b_margins: to_b.margins,
        unfair_to_a_margins: to_a.margins,
    }
}

// ---------------------------------------------------------------------------
// singlet + POVM feasibility
// ---------------------------------------------------------------------------

/// Raw margins of the two beat-the-unfair-equilibrium conditions for a
/// singlet strategy with POVM parameters `(α, μ)` and sharp-settings CHSH
/// `bs`: the strategy's CHSH is `B = 2(α-1)² + μ²·bs` and `K = 3α`, so the
/// conditions `(3/2)B + K > 8` and `(3/2)B - K > -2` become
/// `margin8 > 0` and `margin9 > 0`.
pub fn povm_margins(alpha: f64, mu: f64, bs: f64) -> (f64, f64) {
    let b = 2.0 * (alpha - 1.0).powi(2) + mu * mu * bs;
    let k = 3.0 * alpha;
    (1.5 * b + k - 8.0, 1.5 * b - k + 2.0)
}

/// The same two conditions in normalized conic form, each satisfied iff its
/// value exceeds 1:
///
/// `(α - 1/2)²/(23/12) + μ²/(23/(6·bs))` and
/// `(α - 3/2)²/(7/12)  + μ²/(7/(6·bs))`.
///
/// Evaluated without dividing by `bs`, so `bs = 0` needs no special case;
/// the raw margins relate by `margin8 = (23/4)(lhs1 - 1)` and
/// `margin9 = (7/4)(lhs2 - 1)`.
pub fn povm_conditions(alpha: f64, mu: f64, bs: f64) -> (f64, f64) {
    let lhs1 = (3.0 * (alpha - 0.5).powi(2) + 1.5 * mu * mu * bs) / (23.0 / 4.0);
    let lhs2 = (3.0 * (alpha - 1.5).powi(2) + 1.5 * mu * mu * bs) / (7.0 / 4.0);
    (lhs1, lhs2)
}

/// Grid specification for the singlet-POVM scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub alpha_step: f64,
    pub mu_step: f64,
    pub bs_step: f64,
    pub alpha_max: f64,
    pub bs_min: f64,
    pub bs_max: f64,
    /// Restrict `μ ≤ min(α, 2-α)` (the POVM admissibility region). Dropping
    /// it is only useful to demonstrate that the raw inequalities become
    /// satisfiable outside the physical domain.
    pub enforce_admissible: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        let ts = 2.0 * 2f64.sqrt();
        Self {
            alpha_step: 1e-3,
            mu_step: 1e-3,
            bs_step: 1e-2,
            alpha_max: 2.0,
            bs_min: -ts,
            bs_max: ts,
            enforce_admissible: true,
        }
    }
}

/// A scanned grid point with its two condition margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub alpha: f64,
    pub mu: f64,
    pub bs: f64,
    pub margin8: f64,
    pub margin9: f64,
}

/// Outcome of the scan. `feasible_points` keeps at most
/// [`SCAN_POINT_CAP`] exemplars; `feasible_count` is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub config: ScanConfig,
    pub points_scanned: u64,
    pub feasible_count: u64,
    pub feasible_points: Vec<ScanPoint>,
    /// Largest `min(margin8, margin9)` over the grid; strictly negative
    /// exactly when no grid point satisfies both conditions.
    pub max_min_margin: f64,
    pub argmax: ScanPoint,
}

impl ScanResult {
    pub fn is_empty(&self) -> bool {
        self.feasible_count == 0
    }
}

/// Stored-exemplar cap for feasible points (counts stay exact).
pub const SCAN_POINT_CAP: usize = 1024;

struct SliceSummary {
    points: u64,
    feasible_count: u64,
    feasible: Vec<ScanPoint>,
    best: ScanPoint,
    best_min: f64,
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let v = start + k as f64 * step;
        if v > stop + 1e-12 {
            break;
        }
        out.push(v.min(stop));
        k += 1;
    }
    if let Some(last) = out.last() {
        if *last < stop - 1e-12 {
            out.push(stop);
        }
    }
    out
}

fn scan_alpha_slice(cfg: &ScanConfig, alpha: f64) -> SliceSummary {
    let mu_cap = if cfg.enforce_admissible {
        alpha.min(2.0 - alpha).max(0.0)
    } else {
        1.0
    };
    let mut s = SliceSummary {
        points: 0,
        feasible_count: 0,
        feasible: Vec::new(),
        best: ScanPoint { alpha, mu: 0.0, bs: cfg.bs_min, margin8: 0.0, margin9: 0.0 },
        best_min: f64::NEG_INFINITY,
    };
    for mu in grid(0.0, mu_cap, cfg.mu_step) {
        for bs in grid(cfg.bs_min, cfg.bs_max, cfg.bs_step) {
            let (m8, m9) = povm_margins(alpha, mu, bs);
            s.points += 1;
            let min = m8.min(m9);
            if min > s.best_min {
                s.best_min = min;
                s.best = ScanPoint { alpha, mu, bs, margin8: m8, margin9: m9 };
            }
            if m8 > 0.0 && m9 > 0.0 {
                s.feasible_count += 1;
                if s.feasible.len() < SCAN_POINT_CAP {
                    s.feasible.push(ScanPoint { alpha, mu, bs, margin8: m8, margin9: m9 });
                }
            }
        }
    }
    s
}

fn merge_slices(cfg: &ScanConfig, slices: Vec<SliceSummary>) -> ScanResult {
    let mut result = ScanResult {
        config: *cfg,
        points_scanned: 0,
        feasible_count: 0,
        feasible_points: Vec::new(),
        max_min_margin: f64::NEG_INFINITY,
        argmax: ScanPoint { alpha: 0.0, mu: 0.0, bs: 0.0, margin8: 0.0, margin9: 0.0 },
    };
    for s in slices {
        result.points_scanned += s.points;
        result.feasible_count += s.feasible_count;
        for p in s.feasible {
            if result.feasible_points.len() < SCAN_POINT_CAP {
                result.feasible_points.push(p);
            }
        }
        // strict > keeps the earliest slice on ties: schedule-independent
        if s.best_min > result.max_min_margin {
            result.max_min_margin = s.best_min;
            result.argmax = s.best;
        }
    }
    result
}

/// Scans the admissible `(α, μ)` region against every sharp-settings CHSH
/// value `bs` in `[bs_min, bs_max]`, asking whether any grid point
/// satisfies both beat-the-unfair-equilibrium conditions. For the singlet
/// (and any state with maximally mixed marginals) the answer is empty:
/// `max_min_margin` stays strictly negative.
pub fn povm_singlet_scan(cfg: &ScanConfig) -> ScanResult {
    let alphas = grid(cfg.alpha_step, cfg.alpha_max, cfg.alpha_step);
    #[cfg(feature = "parallel")]
    let slices: Vec<SliceSummary> = alphas
        .par_iter()
        .map(|&alpha| scan_alpha_slice(cfg, alpha))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let slices: Vec<SliceSummary> = alphas
        .iter()
        .map(|&alpha| scan_alpha_slice(cfg, alpha))
        .collect();
    merge_slices(cfg, slices)
}

/// Single-threaded variant of [`povm_singlet_scan`] (kept available for
/// benchmarking against the parallel path).
pub fn povm_singlet_scan_seq(cfg: &ScanConfig) -> ScanResult {
    let alphas = grid(cfg.alpha_step, cfg.alpha_max, cfg.alpha_step);
    let slices: Vec<SliceSummary> = alphas
        .iter()
        .map(|&alpha| scan_alpha_slice(cfg, alpha))
        .collect();
    merge_slices(cfg, slices)
}

// ---------------------------------------------------------------------------
// angle-space searches
// ---------------------------------------------------------------------------

/// Result of a best-response or social-optimum search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    /// Angles at the best point found (layout depends on the operation).
    pub best_params: Vec<f64>,
    pub best_value: f64,
    /// Both players' payoffs at the best point.
    pub payoffs: PayoffPair,
    pub evaluations: u64,
    pub converged: bool,
}

const ANGLE_BOUNDS: (f64, f64) = (-std::f64::consts::PI, std::f64::consts::PI);

fn dirs_from_params(x: &[f64]) -> [MeasDirection; 2] {
    [
        MeasDirection::new(x[0], x[1]).expect("finite angles"),
        MeasDirection::new(x[2], x[3]).expect("finite angles"),
    ]
}

fn with_player_dirs(s: &QuantumStrategy, player: Player, dirs: [MeasDirection; 2]) -> QuantumStrategy {
    let mut out = s.clone();
    match player {
        Player::A => out.alice = dirs,
        Player::B => out.bob = dirs,
    }
    out
}

fn search_outcome_to_result(
    out: SearchOutcome,
    payoffs_at: impl Fn(&[f64]) -> PayoffPair,
) -> OptimizationResult {
    OptimizationResult {
        payoffs: payoffs_at(&out.best_x),
        best_params: out.best_x,
        best_value: out.best_value,
        evaluations: out.evaluations,
        converged: out.converged,
    }
}

/// Maximizes one player's payoff over that player's four measurement angles
/// `(θ0, φ0, θ1, φ1)`, holding the state and the other player fixed.
/// Deterministic for a fixed `config.seed`.
pub fn best_response(
    strategy: &QuantumStrategy,
    game: &GameParams,
    player: Player,
    config: &SearchConfig,
) -> OptimizationResult {
    let table = UtilityTable::from_params(game);
    let objective = |x: &[f64]| {
        let s = with_player_dirs(strategy, player, dirs_from_params(x));
        average_payoffs(&table, &box_from_strategy(&s)).get(player)
    };
    let out = multistart_max(objective, &[ANGLE_BOUNDS; 4], config);
    search_outcome_to_result(out, |x| {
        let s = with_player_dirs(strategy, player, dirs_from_params(x));
        average_payoffs(&table, &box_from_strategy(&s))
    })
}

/// Best response extended to the deviator's POVM parameters: the search
/// space is `(θ0, φ0, θ1, φ1, α, t)` with `μ = t·min(α, 2-α)`, so every
/// visited point is an admissible two-outcome measurement. The sharp case
/// is the slice `α = 1, t = 1`.
pub fn best_response_povm(
    strategy: &QuantumStrategy,
    game: &GameParams,
    player: Player,
    config: &SearchConfig,
) -> OptimizationResult {
    let table = UtilityTable::from_params(game);
    let fixed_effects = |d: &MeasDirection| match &strategy.povm {
        Some(pp) => effects_povm(d, pp),
        None => effects_projective(d),
    };
    let boxed = |x: &[f64]| -> NsBox {
        let dirs = dirs_from_params(x);
        let alpha = x[4].clamp(1e-6, 2.0);
        let t = x[5].clamp(0.0, 1.0);
        let mu = t * alpha.min(2.0 - alpha);
        let pp = PovmParams::new(alpha, mu).expect("clamped parameters are admissible");
        let dev = [effects_povm(&dirs[0], &pp), effects_povm(&dirs[1], &pp)];
        match player {
            Player::A => box_from_effects(
                &strategy.state,
                &dev,
                &[fixed_effects(&strategy.bob[0]), fixed_effects(&strategy.bob[1])],
            ),
            Player::B => box_from_effects(
                &strategy.state,
                &[fixed_effects(&strategy.alice[0]), fixed_effects(&strategy.alice[1])],
                &dev,
            ),
        }
    };
    let objective = |x: &[f64]| average_payoffs(&table, &boxed(x)).get(player);
    let mut bounds = vec![ANGLE_BOUNDS; 4];
    bounds.push((0.05, 2.0));
    bounds.push((0.0, 1.0));
    let out = multistart_max(objective, &bounds, config);
    search_outcome_to_result(out, |x| average_payoffs(&table, &boxed(x)))
}

/// True iff neither player can raise their own payoff by more than `tol`
/// through measurement-angle deviations (state fixed).
pub fn is_quantum_equilibrium(
    strategy: &QuantumStrategy,
    game: &GameParams,
    tol: f64,
    config: &SearchConfig,
) -> bool {
    let table = UtilityTable::from_params(game);
    let current = average_payoffs(&table, &box_from_strategy(strategy));
    for player in [Player::A, Player::B] {
        let br = best_response(strategy, game, player, config);
        if br.best_value > current.get(player) + tol {
            return false;
        }
    }
    true
}

/// Outcome of the social-optimality search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialOptimum {
    /// Best payoff sum found; `best_params` is
    /// `(θ0_A, φ0_A, θ1_A, φ1_A, θ0_B, φ0_B, θ1_B, φ1_B)`.
    pub result: OptimizationResult,
    /// A near-optimal restart endpoint whose payoffs beat the unfair-to-Bob
    /// equilibrium `(11/16, 7/16)` on both coordinates, when one was found.
    pub beats_unfair_point: Option<(Vec<f64>, PayoffPair)>,
}

/// Maximizes `F_A + F_B` over all eight measurement angles for a fixed
/// state. For G(1/2, 1) the sum equals `(3/4)(1 + B/4)`, so this is CHSH
/// maximization in disguise.
pub fn social_optimum(
    state: &TwoQubitState,
    game: &GameParams,
    config: &SearchConfig,
) -> SocialOptimum {
    let table = UtilityTable::from_params(game);
    let payoffs_at = |x: &[f64]| -> PayoffPair {
        let s = QuantumStrategy {
            state: state.clone(),
            alice: dirs_from_params(&x[..4]),
            bob: dirs_from_params(&x[4..]),
            povm: None,
        };
        average_payoffs(&table, &box_from_strategy(&s))
    };
    let objective = |x: &[f64]| payoffs_at(x).sum();
    let out = multistart_max(objective, &[ANGLE_BOUNDS; 8], config);

    let mut beats = None;
    for fin in &out.finishers {
        if fin.value >= out.best_value - 1e-6 {
            let p = payoffs_at(&fin.x);
            if p.f_a > UNFAIR_EQ_PAYOFFS.0 && p.f_b > UNFAIR_EQ_PAYOFFS.1 {
                beats = Some((fin.x.clone(), p));
                break;
            }
        }
    }
    SocialOptimum {
        result: search_outcome_to_result(out, payoffs_at),
        beats_unfair_point: beats,
    }
}

/// Payoff a deviating player collects by discarding the advice and playing
/// the pure strategy `g`, while the other player keeps following the
/// quantum strategy. Lower-bounds any reasonable best response.
pub fn constant_response_payoff(
    strategy: &QuantumStrategy,
    game: &GameParams,
    player: Player,
    g: PureStrategy,
) -> f64 {
    let table = UtilityTable::from_params(game);
    let b = box_from_strategy(strategy);
    let mut p = [0.0; 16];
    for x_a in 0..2u8 {
        for x_b in 0..2u8 {
            for y_a in 0..2u8 {
                for y_b in 0..2u8 {
                    let prob = match player {
                        // Bob keeps his marginal, Alice plays g(x_a)
                        Player::A => {
                            if y_a == g.apply(x_a) {
                                b.prob(x_a, x_b, 0, y_b) + b.prob(x_a, x_b, 1, y_b)
                            } else {
                                0.0
                            }
                        }
                        Player::B => {
                            if y_b == g.apply(x_b) {
                                b.prob(x_a, x_b, y_a, 0) + b.prob(x_a, x_b, y_a, 1)
                            } else {
                                0.0
                            }
                        }
                    };
                    p[(8 * x_a + 4 * x_b + 2 * y_a + y_b) as usize] = prob;
                }
            }
        }
    }
    let replaced = NsBox::new(p).expect("marginal times deterministic map is a valid box");
    average_payoffs(&table, &replaced).get(player)
}

// ---------------------------------------------------------------------------
// closed forms for the pure-state projective family
// ---------------------------------------------------------------------------

fn check_amplitude(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Schmidt amplitude must satisfy 0 < a < 1, got {a}"
        )));
    }
    Ok((1.0 - a * a).sqrt())
}

/// Closed-form G(1/2,1) payoffs for projective measurements on
/// `a|00> + b|11>`, in terms of the four direction vectors
/// (`p = alice[0]`, `q = alice[1]`, `r = bob[0]`, `s = bob[1]`):
///
/// `F_{A,B} = (1/8)[3 + (3/2)ab·S + (3/4)(p3(r3+s3) + q3(r3-s3))
///            ± (1/4)(a²-b²)(q3+s3+2(p3+r3))]`
///
/// where `S = r1(p1+q1) + s1(p1-q1) - r2(p2+q2) - s2(p2-q2)`. Agrees with
/// the Born-rule evaluation to machine precision.
pub fn projective_payoffs(
    a: f64,
    alice: &[MeasDirection; 2],
    bob: &[MeasDirection; 2],
) -> Result<PayoffPair> {
    let b = check_amplitude(a)?;
    let p = alice[0].unit_vector();
    let q = alice[1].unit_vector();
    let r = bob[0].unit_vector();
    let s = bob[1].unit_vector();
    let ab = a * b;
    let d = a * a - b * b;
    let cross = r[0] * (p[0] + q[0]) + s[0] * (p[0] - q[0])
        - r[1] * (p[1] + q[1])
        - s[1] * (p[1] - q[1]);
    let z_part = p[2] * (r[2] + s[2]) + q[2] * (r[2] - s[2]);
    let bias = q[2] + s[2] + 2.0 * (p[2] + r[2]);
    let common = 3.0 + 1.5 * ab * cross + 0.75 * z_part;
    Ok(PayoffPair {
        f_a: (common + 0.25 * d * bias) / 8.0,
        f_b: (common - 0.25 * d * bias) / 8.0,
    })
}

/// The fairness defect `(a² - b²)(q3 + s3 + 2(p3 + r3))`: zero exactly when
/// the projective closed forms give `F_A = F_B`.
pub fn fair_condition_projective(
    a: f64,
    alice: &[MeasDirection; 2],
    bob: &[MeasDirection; 2],
) -> Result<f64> {
    let b = check_amplitude(a)?;
    let p = alice[0].unit_vector();
    let q = alice[1].unit_vector();
    let r = bob[0].unit_vector();
    let s = bob[1].unit_vector();
    Ok((a * a - b * b) * (q[2] + s[2] + 2.0 * (p[2] + r[2])))
}

/// Closed-form payoffs of the worked-example settings
/// (`θ⁰ = -π/15, φ⁰ = π/2, θ¹ = π/3, φ¹ = π/2` for both parties) on
/// `a|00> + b|11>`, as an explicit function of the amplitude:
///
/// `F_{A,B} = (1/8)[(2a² - 1/4 | 7/4 - 2a²)·cos(π/15) + (3/4)cos²(π/15)
///   + (3a√(3(1-a²))/2)·sin(π/15) - (3a√(1-a²)/2)·sin²(π/15)
///   + 45/16 + (9a√(1-a²))/8 ± (2a² - 1)/4]`.
pub fn example_payoff_family(a: f64) -> Result<PayoffPair> {
    check_amplitude(a)?;
    let alpha = std::f64::consts::PI / 15.0;
    let (sin_a, cos_a) = alpha.sin_cos();
    let root = (1.0 - a * a).sqrt();
    let shared = 0.75 * cos_a * cos_a + 1.5 * a * (3.0 * (1.0 - a * a)).sqrt() * sin_a
        - 1.5 * a * root * sin_a * sin_a
        + 45.0 / 16.0
        + 9.0 * a * root / 8.0;
    let d4 = (2.0 * a * a - 1.0) / 4.0;
    Ok(PayoffPair {
        f_a: ((2.0 * a * a - 0.25) * cos_a + shared + d4) / 8.0,
        f_b: ((1.75 - 2.0 * a * a) * cos_a + shared - d4) / 8.0,
    })
}

// ---------------------------------------------------------------------------
// Gisin-settings payoff curve
// ---------------------------------------------------------------------------

/// One point of the Gisin-settings payoff curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GisinPoint {
    pub a: f64,
    pub f_a: f64,
    pub f_b: f64,
}

/// Closed-form payoffs along the CHSH-optimal Gisin settings:
///
/// `F_A = (1/16)[(7 + 22a² - 24a⁴)/(2√(1+4a²-4a⁴)) + 2a² + 5]`
/// `F_B = (1/16)[(5 + 26a² - 24a⁴)/(2√(1+4a²-4a⁴)) - 2a² + 7]`
///
/// Their sum is `(3/4)(1 + B/4)` with `B = 2√(1+4a²-4a⁴)` the optimal
/// violation, yet `F_A` never reaches the `11/16` threshold.
pub fn gisin_point(a: f64) -> Result<GisinPoint> {
    check_amplitude(a)?;
    let a2 = a * a;
    let a4 = a2 * a2;
    let root = (1.0 + 4.0 * a2 - 4.0 * a4).sqrt();
    let f_a = ((7.0 + 22.0 * a2 - 24.0 * a4) / (2.0 * root) + 2.0 * a2 + 5.0) / 16.0;
    let f_b = ((5.0 + 26.0 * a2 - 24.0 * a4) / (2.0 * root) - 2.0 * a2 + 7.0) / 16.0;
    Ok(GisinPoint { a, f_a, f_b })
}

/// The curve over a grid of amplitudes, with its maximal `F_A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GisinCurve {
    pub points: Vec<GisinPoint>,
    pub max_f_a: f64,
}

pub fn gisin_curve(grid: &[f64]) -> Result<GisinCurve> {
    let mut points = Vec::with_capacity(grid.len());
    let mut max_f_a = f64::NEG_INFINITY;
    for &a in grid {
        let p = gisin_point(a)?;
        max_f_a = max_f_a.max(p.f_a);
        points.push(p);
    }
    Ok(GisinCurve { points, max_f_a })
}

/// The default curve grid: `a = k/(n+1)` for `k = 1..=n`.
pub fn gisin_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{example_strategy, gisin_settings, singlet_chsh_strategy};
    use rand::{Rng, SeedableRng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn conflict_table() -> UtilityTable {
        UtilityTable::from_params(&GameParams::conflict_example())
    }

    #[test]
    fn fair_advantage_cases() {
        // singlet at the Tsirelson point: advantageous, payoff (3/8)(1+B/4)
        let c = nsbox::canonical_from_box(&box_from_strategy(&singlet_chsh_strategy()));
        let fa = fair_advantage(&c);
        assert!(fa.advantageous);
        assert!(close(fa.fair_payoff, 0.375 * (1.0 + 2f64.sqrt() / 2.0), 1e-9));
        assert!(close(fa.fair_payoff, 0.640165, 1e-5));

        // uniform noise: B = 0
        let u = nsbox::canonical_from_box(&nsbox::uniform_box());
        assert!(!fair_advantage(&u).advantageous);

        // Werner p = 0.6: B ~ 1.697 < 2
        let s = QuantumStrategy {
            state: TwoQubitState::werner(0.6).unwrap(),
            ..singlet_chsh_strategy()
        };
        let c = nsbox::canonical_from_box(&box_from_strategy(&s));
        let fa = fair_advantage(&c);
        assert!(close(fa.chsh, 0.6 * 2.0 * 2f64.sqrt(), 1e-12));
        assert!(!fa.advantageous);
    }

    #[test]
    fn unfair_advantage_cases() {
        // PR (+) D mixture at q = 0.5 beats the unfair-to-Bob equilibrium
        let c = nsbox::canonical_from_box(&nsbox::pr_d_mixture(0.5).unwrap());
        let v = unfair_advantage(&c, UnfairSide::ToBob);
        assert!(v.advantageous);
        assert!(close(v.payoffs.f_a, 0.71875, 1e-12));
        assert!(close(v.payoffs.f_b, 0.59375, 1e-12));

        // the worked-example strategy beats it with the known margins
        let b = box_from_strategy(&example_strategy(0.9).unwrap());
        let v = unfair_advantage(&nsbox::canonical_from_box(&b), UnfairSide::ToBob);
        assert!(v.advantageous);
        assert!(close(v.margins.0, 0.0191, 2e-4), "margin A {}", v.margins.0);
        assert!(close(v.margins.1, 0.0788, 2e-4), "margin B {}", v.margins.1);

        // local boxes can never qualify
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..500 {
            let b = nsbox::random_local_box(&mut rng);
            let c = nsbox::canonical_from_box(&b);
            let v = advantage_verdict(&c);
            assert!(!v.beats_unfair_to_b);
            assert!(!v.beats_unfair_to_a);
            assert!(!v.beats_fair);
        }
    }

    #[test]
    fn advantage_implies_nonlocality_and_matches_direct_comparison() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        let table = conflict_table();
        for _ in 0..1000 {
            let b = nsbox::random_box(&mut rng);
            let c = nsbox::canonical_from_box(&b);
            let v = advantage_verdict(&c);
            let direct = average_payoffs(&table, &b);
            assert_eq!(
                v.beats_unfair_to_b,
                direct.f_a > UNFAIR_EQ_PAYOFFS.0 && direct.f_b > UNFAIR_EQ_PAYOFFS.1
            );
            assert_eq!(
                v.beats_unfair_to_a,
                direct.f_a > UNFAIR_EQ_PAYOFFS.1 && direct.f_b > UNFAIR_EQ_PAYOFFS.0
            );
            assert_eq!(
                v.beats_fair,
                direct.f_a > FAIR_EQ_PAYOFF && direct.f_b > FAIR_EQ_PAYOFF
            );
            if v.beats_unfair_to_b || v.beats_unfair_to_a {
                assert!(nsbox::chsh(&c) > 2.0, "advantage requires nonlocality");
            }
        }
    }

    #[test]
    fn povm_condition_examples() {
        // sharp singlet at near-Tsirelson sharp CHSH: condition 8 fails
        let (m8, _) = povm_margins(1.0, 1.0, 2.82);
        assert!(close(m8, 1.5 * 2.82 + 3.0 - 8.0, 1e-12));
        assert!(m8 < 0.0);

        // trivial-outcome limit: B = 2, K = 6, so 8 holds (9 > 8) while 9
        // fails ((3/2)B - K = -3, not above -2)
        let (m8, m9) = povm_margins(2.0, 0.0, 0.0);
        assert!(close(m8, 1.0, 1e-12));
        assert!(close(m9, -1.0, 1e-12));
        assert!(m8 > 0.0 && m9 < 0.0);

        // trivial POVM: both fail
        let (m8, m9) = povm_margins(1.0, 0.0, 0.0);
        assert!(m8 < 0.0 && m9 < 0.0);
    }

    #[test]
    fn povm_conditions_match_raw_margins() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        for _ in 0..1000 {
            let alpha = rng.gen_range(0.01..=2.0);
            let mu = rng.gen_range(0.0..=1.0);
            let bs = rng.gen_range(-2.9..=2.9);
            let (l1, l2) = povm_conditions(alpha, mu, bs);
            let (m8, m9) = povm_margins(alpha, mu, bs);
            assert!(close(m8, 23.0 / 4.0 * (l1 - 1.0), 1e-12));
            assert!(close(m9, 7.0 / 4.0 * (l2 - 1.0), 1e-12));
        }
        // bs = 0 works through the same code path
        let (l1, l2) = povm_conditions(1.0, 0.5, 0.0);
        assert!(l1.is_finite() && l2.is_finite());
    }

    #[test]
    fn coarse_scan_is_empty_and_admissibility_matters() {
        let coarse = ScanConfig {
            alpha_step: 0.02,
            mu_step: 0.02,
            bs_step: 0.05,
            ..Default::default()
        };
        let r = povm_singlet_scan(&coarse);
        assert!(r.is_empty());
        assert!(r.max_min_margin < 0.0);
        // analytic optimum: alpha = mu = 1, bs = 2sqrt(2), margin 3sqrt(2)-5
        assert!(close(r.max_min_margin, 3.0 * 2f64.sqrt() - 5.0, 2e-1));

        // same scan sequentially, identical result
        let rs = povm_singlet_scan_seq(&coarse);
        assert_eq!(r, rs);

        // restricted to one sharp value
        let single = ScanConfig { bs_min: 2.82, bs_max: 2.82, ..coarse };
        assert!(povm_singlet_scan(&single).is_empty());

        // dropping admissibility and widening alpha exposes feasible points
        let wide = ScanConfig {
            alpha_max: 3.0,
            enforce_admissible: false,
            ..coarse
        };
        let r = povm_singlet_scan(&wide);
        assert!(!r.is_empty());
        assert!(r.feasible_points.iter().all(|p| p.margin8 > 0.0 && p.margin9 > 0.0));
    }

    #[test]
    // quoted angles kept verbatim (clippy sees -1.5708 as ~pi/2)
    #[allow(clippy::approx_constant)]
    fn best_response_of_example_strategy() {
        let strategy = example_strategy(0.9).unwrap();
        let game = GameParams::conflict_example();
        let cfg = SearchConfig::default();
        let br = best_response(&strategy, &game, Player::B, &cfg);
        assert!(br.best_value >= 0.5213 - 1e-3, "Bob's best response {}", br.best_value);
        // reported value re-evaluates at the reported parameters
        let again = {
            let s = with_player_dirs(&strategy, Player::B, dirs_from_params(&br.best_params));
            average_payoffs(&conflict_table(), &box_from_strategy(&s)).f_b
        };
        assert!(close(br.best_value, again, 1e-9));

        // the quoted deviation angles reproduce the quoted payoffs
        let dev = with_player_dirs(
            &strategy,
            Player::B,
            [
                MeasDirection::new(0.451517, -1.5708).unwrap(),
                MeasDirection::new(1.25911, 1.5708).unwrap(),
            ],
        );
        let p = average_payoffs(&conflict_table(), &box_from_strategy(&dev));
        assert!(close(p.f_b, 0.5213, 5e-4), "f_b {}", p.f_b);
        assert!(close(p.f_a, 0.6981, 5e-4), "f_a {}", p.f_a);
    }

    #[test]
    fn example_strategy_is_not_an_equilibrium_but_singlet_point_is() {
        let game = GameParams::conflict_example();
        let cfg = SearchConfig { restarts: 48, ..Default::default() };
        assert!(!is_quantum_equilibrium(
            &example_strategy(0.9).unwrap(),
            &game,
            1e-4,
            &cfg
        ));
        let singlet = singlet_chsh_strategy();
        for tol in [1e-6, 1e-4, 1e-3] {
            assert!(is_quantum_equilibrium(&singlet, &game, tol, &cfg), "tol={tol}");
        }
    }

    #[test]
    fn deterministic_nash_strategy_is_an_equilibrium() {
        // measurements aligned with z reproduce the (Const0, Identity)
        // equilibrium up to O(b^2) corrections that cannot be exploited
        let z_plus = MeasDirection::new(0.0, 0.0).unwrap();
        let z_minus = MeasDirection::new(std::f64::consts::PI, 0.0).unwrap();
        let s = QuantumStrategy {
            state: TwoQubitState::pure(0.95).unwrap(),
            alice: [z_plus, z_plus],
            bob: [z_plus, z_minus],
            povm: None,
        };
        let game = GameParams::conflict_example();
        let cfg = SearchConfig { restarts: 48, ..Default::default() };
        assert!(is_quantum_equilibrium(&s, &game, 1e-4, &cfg));
    }

    #[test]
    fn best_response_dominates_constant_strategies() {
        let game = GameParams::conflict_example();
        let cfg = SearchConfig { restarts: 48, ..Default::default() };
        for (label, strategy) in [
            ("near-product", example_strategy(0.999).unwrap()),
            ("worked example", example_strategy(0.9).unwrap()),
            ("singlet", singlet_chsh_strategy()),
        ] {
            for player in [Player::A, Player::B] {
                let br = best_response(&strategy, &game, player, &cfg);
                let best_const = PureStrategy::ALL
                    .iter()
                    .map(|g| constant_response_payoff(&strategy, &game, player, *g))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(
                    br.best_value >= best_const - 1e-6,
                    "{label}/{player:?}: quantum {} vs constant {best_const}",
                    br.best_value
                );
            }
        }
    }

    #[test]
    fn social_optimum_tracks_the_chsh_bound() {
        let game = GameParams::conflict_example();
        let cfg = SearchConfig::default();
        for a in [0.9, std::f64::consts::FRAC_1_SQRT_2] {
            let so = social_optimum(&TwoQubitState::pure(a).unwrap(), &game, &cfg);
            let want = 0.75 * (1.0 + crate::quantum::chsh_max_pure(a) / 4.0);
            assert!(
                close(so.result.best_value, want, 1e-4),
                "a={a}: sum {} want {want}",
                so.result.best_value
            );
        }
        // maximally mixed advice cannot leave the local band
        let so = social_optimum(&TwoQubitState::werner(0.0).unwrap(), &game, &cfg);
        assert!(so.result.best_value <= 9.0 / 8.0 + 1e-9);
    }

    #[test]
    #[allow(clippy::approx_constant)] // quoted angles kept verbatim
    fn social_optimum_example_values() {
        let game = GameParams::conflict_example();
        let so = social_optimum(
            &TwoQubitState::pure(0.9).unwrap(),
            &game,
            &SearchConfig::default(),
        );
        assert!(close(so.result.best_value, 1.2266, 1e-3));

        // the quoted socially optimal settings beat the unfair equilibrium
        let alice = [
            MeasDirection::new(0.0, -2.3636).unwrap(),
            MeasDirection::new(-1.5708, 0.777996).unwrap(),
        ];
        let bob = [
            MeasDirection::new(-0.6653, -0.7780).unwrap(),
            MeasDirection::new(0.6653, -0.7780).unwrap(),
        ];
        let s = QuantumStrategy {
            state: TwoQubitState::pure(0.9).unwrap(),
            alice,
            bob,
            povm: None,
        };
        let p = average_payoffs(&conflict_table(), &box_from_strategy(&s));
        assert!(close(p.f_a, 0.6978, 5e-4), "f_a {}", p.f_a);
        assert!(close(p.f_b, 0.5288, 5e-4), "f_b {}", p.f_b);
        assert!(close(p.sum(), so.result.best_value, 1e-3));
    }

    #[test]
    fn povm_deviations_do_not_rescue_the_example_equilibrium() {
        // extending Bob's search to (alpha, mu) must not fall below the
        // projective best response (the sharp case is inside the space),
        // and the strategy stays out of equilibrium either way
        let strategy = example_strategy(0.9).unwrap();
        let game = GameParams::conflict_example();
        let cfg = SearchConfig { restarts: 48, ..Default::default() };
        let sharp = best_response(&strategy, &game, Player::B, &cfg);
        let povm = best_response_povm(&strategy, &game, Player::B, &cfg);
        assert!(povm.best_value >= sharp.best_value - 1e-6);
        let current = average_payoffs(&conflict_table(), &box_from_strategy(&strategy));
        assert!(povm.best_value > current.f_b + 1e-4);
        println!(
            "POVM best response for Bob: sharp {:.6}, general {:.6} (gain {:+.2e})",
            sharp.best_value,
            povm.best_value,
            povm.best_value - sharp.best_value
        );
    }

    #[test]
    fn projective_payoff_closed_form_matches_engine() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        let table = conflict_table();
        for _ in 0..300 {
            let a = rng.gen_range(0.05..0.999);
            let alice = [
                crate::quantum::random_direction(&mut rng),
                crate::quantum::random_direction(&mut rng),
            ];
            let bob = [
                crate::quantum::random_direction(&mut rng),
                crate::quantum::random_direction(&mut rng),
            ];
            let s = QuantumStrategy {
                state: TwoQubitState::pure(a).unwrap(),
                alice,
                bob,
                povm: None,
            };
            let engine = average_payoffs(&table, &box_from_strategy(&s));
            let closed = projective_payoffs(a, &alice, &bob).unwrap();
            assert!(close(engine.f_a, closed.f_a, 1e-12));
            assert!(close(engine.f_b, closed.f_b, 1e-12));
        }
    }

    #[test]
    fn fair_condition_behaviour() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        // a = 1/sqrt(2) balances any settings
        let a = std::f64::consts::FRAC_1_SQRT_2;
        for _ in 0..20 {
            let alice = [
                crate::quantum::random_direction(&mut rng),
                crate::quantum::random_direction(&mut rng),
            ];
            let bob = [
                crate::quantum::random_direction(&mut rng),
                crate::quantum::random_direction(&mut rng),
            ];
            assert!(close(fair_condition_projective(a, &alice, &bob).unwrap(), 0.0, 1e-12));
            let p = projective_payoffs(a, &alice, &bob).unwrap();
            assert!(close(p.f_a, p.f_b, 1e-12));
        }

        // settings with q3 + s3 + 2 p3 + 2 r3 = 0 balance any amplitude
        let x_dir = MeasDirection::new(std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let up = MeasDirection::new(0.4, 0.0).unwrap();
        let down = MeasDirection::new(std::f64::consts::PI - 0.4, 0.0).unwrap();
        let alice = [x_dir, up];
        let bob = [x_dir, down];
        for a in [0.3, 0.6, 0.9] {
            let defect = fair_condition_projective(a, &alice, &bob).unwrap();
            assert!(close(defect, 0.0, 1e-12), "a={a}: defect {defect}");
            let p = projective_payoffs(a, &alice, &bob).unwrap();
            assert!(close(p.f_a, p.f_b, 1e-12));
        }

        // the worked example is biased toward Alice and the defect agrees
        let s = example_strategy(0.9).unwrap();
        let defect = fair_condition_projective(0.9, &s.alice, &s.bob).unwrap();
        let p = projective_payoffs(0.9, &s.alice, &s.bob).unwrap();
        assert!(defect > 0.0);
        assert!(p.f_a > p.f_b);
    }

    #[test]
    fn example_family_values() {
        let p = example_payoff_family(0.9).unwrap();
        assert!(close(p.f_a, 0.7066, 5e-4));
        assert!(close(p.f_b, 0.5163, 5e-4));

        // agrees with the full engine path
        let s = example_strategy(0.9).unwrap();
        let engine = average_payoffs(&conflict_table(), &box_from_strategy(&s));
        assert!(close(engine.f_a, p.f_a, 1e-9));
        assert!(close(engine.f_b, p.f_b, 1e-9));

        // fair at the maximally entangled amplitude
        let p = example_payoff_family(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!(close(p.f_a, p.f_b, 1e-12));

        // and at a generic amplitude, against the Born-rule oracle
        let a = 0.5;
        let p = example_payoff_family(a).unwrap();
        let engine = average_payoffs(
            &conflict_table(),
            &box_from_strategy(&example_strategy(a).unwrap()),
        );
        assert!(close(engine.f_a, p.f_a, 1e-9));
        assert!(close(engine.f_b, p.f_b, 1e-9));
    }

    #[test]
    fn gisin_curve_stays_below_the_unfair_threshold() {
        let grid = gisin_grid(999);
        let curve = gisin_curve(&grid).unwrap();
        assert_eq!(curve.points.len(), 999);
        assert!(curve.max_f_a < 11.0 / 16.0, "max F_A = {}", curve.max_f_a);
        for p in &curve.points {
            let sum = p.f_a + p.f_b;
            let want = 0.75 * (1.0 + crate::quantum::chsh_max_pure(p.a) / 4.0);
            assert!(close(sum, want, 1e-9), "a={}", p.a);
        }
        // spot value at the maximally entangled point
        let p = gisin_point(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!(close(p.f_a, (12.0 / (2.0 * 2f64.sqrt()) + 6.0) / 16.0, 1e-12));
        assert!(close(p.f_a, 0.6402, 1e-4));

        // the curve's settings really achieve the optimal violation
        let s = gisin_settings(0.8).unwrap();
        let c = nsbox::canonical_from_box(&box_from_strategy(&s));
        assert!(close(
            nsbox::max_chsh_symmetry(&c),
            crate::quantum::chsh_max_pure(0.8),
            1e-9
        ));
    }

    #[test]
    fn gisin_grid_shape() {
        let g = gisin_grid(999);
        assert_eq!(g.len(), 999);
        assert!(g[0] > 0.0 && g[998] < 1.0);
        assert!(gisin_curve(&[0.0]).is_err());
        assert!(gisin_curve(&[1.0]).is_err());
    }
}
