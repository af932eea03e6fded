//! The two-parameter Bayesian game G(κ,τ) and its classical analysis.
//!
//! Each player holds a private type bit and picks an action bit. Utilities
//! depend on the AND of the types: when `x_A ∧ x_B = 0` matching actions pay
//! `(1,κ)` at `(0,0)` and `(1/2,τ)` at `(1,1)`; when `x_A ∧ x_B = 1` only
//! anti-correlated actions pay, `(3/4,3/4)` each. Types are drawn from a
//! prior (uniform by default) and shared advice is a no-signaling box over
//! `P(actions | types)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nsbox::NsBox;

/// Tolerance used when validating that a prior sums to one.
pub const PRIOR_SUM_TOL: f64 = 1e-12;

/// Parameters of the game family. Both must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    kappa: f64,
    tau: f64,
}

impl GameParams {
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(Error::InvalidGame(format!(
                "kappa must be positive and finite, got {kappa}"
            )));
        }
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::InvalidGame(format!(
                "tau must be positive and finite, got {tau}"
            )));
        }
        Ok(Self { kappa, tau })
    }

    /// The conflicting-interest instance G(1/2, 1) used by the worked examples.
    pub fn conflict_example() -> Self {
        Self { kappa: 0.5, tau: 1.0 }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Which player a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    A,
    B,
}

/// A 2x2x2x2 utility tensor pair plus a prior over joint types.
///
/// Entries are indexed `(x_a, x_b, y_a, y_b)` row-major, so flat index
/// `8*x_a + 4*x_b + 2*y_a + y_b`. The prior is indexed `2*x_a + x_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityTable {
    u_a: [f64; 16],
    u_b: [f64; 16],
    prior: [f64; 4],
}

fn idx(x_a: u8, x_b: u8, y_a: u8, y_b: u8) -> usize {
    debug_assert!(x_a < 2 && x_b < 2 && y_a < 2 && y_b < 2);
    (8 * x_a + 4 * x_b + 2 * y_a + y_b) as usize
}

impl UtilityTable {
    /// Builds a generic table, checking the prior is a distribution.
    pub fn new(u_a: [f64; 16], u_b: [f64; 16], prior: [f64; 4]) -> Result<Self> {
        if prior.iter().any(|p| *p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidGame(format!(
                "prior entries must be nonnegative, got {prior:?}"
            )));
        }
        let sum: f64 = prior.iter().sum();
        if (sum - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::InvalidGame(format!(
                "prior must sum to 1 within {PRIOR_SUM_TOL:e}, got {sum}"
            )));
        }
        if u_a.iter().chain(u_b.iter()).any(|u| !u.is_finite()) {
            return Err(Error::InvalidGame("utilities must be finite".into()));
        }
        Ok(Self { u_a, u_b, prior })
    }

    /// The G(κ,τ) utility table under the uniform prior.
    pub fn from_params(params: &GameParams) -> Self {
        let mut u_a = [0.0; 16];
        let mut u_b = [0.0; 16];
        for x_a in 0..2u8 {
            for x_b in 0..2u8 {
                if x_a & x_b == 0 {
                    u_a[idx(x_a, x_b, 0, 0)] = 1.0;
                    u_b[idx(x_a, x_b, 0, 0)] = params.kappa;
                    u_a[idx(x_a, x_b, 1, 1)] = 0.5;
                    u_b[idx(x_a, x_b, 1, 1)] = params.tau;
                } else {
                    u_a[idx(x_a, x_b, 0, 1)] = 0.75;
                    u_b[idx(x_a, x_b, 0, 1)] = 0.75;
                    u_a[idx(x_a, x_b, 1, 0)] = 0.75;
                    u_b[idx(x_a, x_b, 1, 0)] = 0.75;
                }
            }
        }
        Self { u_a, u_b, prior: [0.25; 4] }
    }

    pub fn utility(&self, player: Player, x: (u8, u8), y: (u8, u8)) -> f64 {
        let i = idx(x.0, x.1, y.0, y.1);
        match player {
            Player::A => self.u_a[i],
            Player::B => self.u_b[i],
        }
    }

    pub fn prior(&self, x: (u8, u8)) -> f64 {
        self.prior[(2 * x.0 + x.1) as usize]
    }

    /// Largest utility entry over both players; payoffs live in `[0, max]`
    /// when utilities are nonnegative.
    pub fn max_utility(&self) -> f64 {
        self.u_a
            .iter()
            .chain(self.u_b.iter())
            .fold(f64::NEG_INFINITY, |m, &u| m.max(u))
    }

    pub fn utilities(&self, player: Player) -> &[f64; 16] {
        match player {
            Player::A => &self.u_a,
            Player::B => &self.u_b,
        }
    }

    pub fn prior_vec(&self) -> &[f64; 4] {
        &self.prior
    }
}

/// The four deterministic maps from a type bit to an action bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PureStrategy {
    /// Always play 0.
    Const0,
    /// Always play 1.
    Const1,
    /// Play the type bit.
    Identity,
    /// Play the flipped type bit.
    Flip,
}

impl PureStrategy {
    pub const ALL: [PureStrategy; 4] = [
        PureStrategy::Const0,
        PureStrategy::Const1,
        PureStrategy::Identity,
        PureStrategy::Flip,
    ];

    pub fn apply(&self, x: u8) -> u8 {
        match self {
            PureStrategy::Const0 => 0,
            PureStrategy::Const1 => 1,
            PureStrategy::Identity => x,
            PureStrategy::Flip => x ^ 1,
        }
    }

    /// Conventional label `g1..g4`.
    pub fn label(&self) -> &'static str {
        match self {
            PureStrategy::Const0 => "g1",
            PureStrategy::Const1 => "g2",
            PureStrategy::Identity => "g3",
            PureStrategy::Flip => "g4",
        }
    }

    pub fn index(&self) -> usize {
        match self {
            PureStrategy::Const0 => 0,
            PureStrategy::Const1 => 1,
            PureStrategy::Identity => 2,
            PureStrategy::Flip => 3,
        }
    }
}

/// Expected utilities of the two players.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffPair {
    pub f_a: f64,
    pub f_b: f64,
}

impl PayoffPair {
    pub fn sum(&self) -> f64 {
        self.f_a + self.f_b
    }

    pub fn get(&self, player: Player) -> f64 {
        match player {
            Player::A => self.f_a,
            Player::B => self.f_b,
        }
    }
}

/// Average payoffs under shared advice: `F_i = Σ_{x,y} P(x) P(y|x) u_i(x,y)`.
pub fn average_payoffs(table: &UtilityTable, advice: &NsBox) -> PayoffPair {
    let mut f_a = 0.0;
    let mut f_b = 0.0;
    for x_a in 0..2u8 {
        for x_b in 0..2u8 {
            let px = table.prior((x_a, x_b));
            for y_a in 0..2u8 {
                for y_b in 0..2u8 {
                    let w = px * advice.prob(x_a, x_b, y_a, y_b);
                    f_a += w * table.utility(Player::A, (x_a, x_b), (y_a, y_b));
                    f_b += w * table.utility(Player::B, (x_a, x_b), (y_a, y_b));
                }
            }
        }
    }
    PayoffPair { f_a, f_b }
}

/// Embeds a pure-strategy pair as deterministic advice:
/// `P(y|x) = 1` iff `y_a = g_a(x_a)` and `y_b = g_b(x_b)`.
pub fn pure_strategy_box(g_a: PureStrategy, g_b: PureStrategy) -> NsBox {
    let mut p = [0.0; 16];
    for x_a in 0..2u8 {
        for x_b in 0..2u8 {
            p[idx(x_a, x_b, g_a.apply(x_a), g_b.apply(x_b))] = 1.0;
        }
    }
    NsBox::new(p).expect("deterministic strategy boxes are always valid")
}

/// The 4x4 grid of payoff pairs for every pure-strategy combination.
/// Rows index Alice's strategy, columns Bob's, in `g1..g4` order.
pub fn pure_payoff_grid(table: &UtilityTable) -> [[PayoffPair; 4]; 4] {
    let zero = PayoffPair { f_a: 0.0, f_b: 0.0 };
    let mut grid = [[zero; 4]; 4];
    for (i, ga) in PureStrategy::ALL.iter().enumerate() {
        for (j, gb) in PureStrategy::ALL.iter().enumerate() {
            grid[i][j] = average_payoffs(table, &pure_strategy_box(*ga, *gb));
        }
    }
    grid
}

/// `pure_payoff_grid` for a G(κ,τ) instance.
pub fn pure_payoff_table(params: &GameParams) -> [[PayoffPair; 4]; 4] {
    pure_payoff_grid(&UtilityTable::from_params(params))
}

/// Fairness classification of a payoff pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fairness {
    Fair,
    UnfairToA,
    UnfairToB,
}

/// `Fair` when the payoffs agree within `tol`; otherwise unfair to the
/// player receiving less.
pub fn classify_fairness(p: &PayoffPair, tol: f64) -> Fairness {
    if (p.f_a - p.f_b).abs() <= tol {
        Fairness::Fair
    } else if p.f_a > p.f_b {
        Fairness::UnfairToB
    } else {
        Fairness::UnfairToA
    }
}

/// One pure-strategy Nash equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub alice: PureStrategy,
    pub bob: PureStrategy,
    pub payoffs: PayoffPair,
    pub fairness: Fairness,
}

/// All pure Nash equilibria found at a given tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub equilibria: Vec<Equilibrium>,
    pub tol: f64,
}

impl EquilibriumReport {
    pub fn contains(&self, alice: PureStrategy, bob: PureStrategy) -> bool {
        self.equilibria
            .iter()
            .any(|e| e.alice == alice && e.bob == bob)
    }
}

/// Enumerates all 16 pure-strategy pairs and keeps those where no unilateral
/// deviation gains more than `tol` (weak best response, so boundary parameter
/// values report ties instead of dropping equilibria).
pub fn find_pure_nash_in(table: &UtilityTable, tol: f64) -> Result<EquilibriumReport> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let grid = pure_payoff_grid(table);
    let mut equilibria = Vec::new();
    for (i, ga) in PureStrategy::ALL.iter().enumerate() {
        for (j, gb) in PureStrategy::ALL.iter().enumerate() {
            let best_a = (0..4).map(|k| grid[k][j].f_a).fold(f64::NEG_INFINITY, f64::max);
            let best_b = (0..4).map(|k| grid[i][k].f_b).fold(f64::NEG_INFINITY, f64::max);
            if grid[i][j].f_a >= best_a - tol && grid[i][j].f_b >= best_b - tol {
                equilibria.push(Equilibrium {
                    alice: *ga,
                    bob: *gb,
                    payoffs: grid[i][j],
                    fairness: classify_fairness(&grid[i][j], tol.max(1e-12)),
                });
            }
        }
    }
    Ok(EquilibriumReport { equilibria, tol })
}

/// `find_pure_nash_in` for a G(κ,τ) instance.
pub fn find_pure_nash(params: &GameParams, tol: f64) -> Result<EquilibriumReport> {
    find_pure_nash_in(&UtilityTable::from_params(params), tol)
}

/// A deterministic post-processing of one player's recommended actions:
/// `map` encodes `d(type, recommendation) -> action`, bit `2*type + rec`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelabelMap(pub u8);

impl RelabelMap {
    pub const COUNT: u8 = 16;

    pub fn apply(&self, x: u8, rec: u8) -> u8 {
        (self.0 >> (2 * x + rec)) & 1
    }

    pub fn is_identity(&self) -> bool {
        // d(x, r) = r for all four (x, r) pairs.
        (0..2).all(|x| (0..2).all(|r| self.apply(x, r) == r))
    }
}

/// Outcome of the correlated-equilibrium style deviation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub player: Player,
    pub map: RelabelMap,
    pub gain: f64,
    pub payoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationCheck {
    pub is_equilibrium: bool,
    /// The most profitable deviation found (present even when unprofitable).
    pub best: Deviation,
}

fn deviated_payoff(
    table: &UtilityTable,
    advice: &NsBox,
    player: Player,
    map: RelabelMap,
) -> f64 {
    let mut f = 0.0;
    for x_a in 0..2u8 {
        for x_b in 0..2u8 {
            let px = table.prior((x_a, x_b));
            for y_a in 0..2u8 {
                for y_b in 0..2u8 {
                    let w = px * advice.prob(x_a, x_b, y_a, y_b);
                    let played = match player {
                        Player::A => (map.apply(x_a, y_a), y_b),
                        Player::B => (y_a, map.apply(x_b, y_b)),
                    };
                    f += w * table.utility(player, (x_a, x_b), played);
                }
            }
        }
    }
    f
}

/// Checks whether advice is stable against all 16 deterministic relabelings
/// per player: no post-processing of the recommendations may raise the
/// deviator's payoff by more than `tol`.
pub fn is_advice_equilibrium(table: &UtilityTable, advice: &NsBox, tol: f64) -> DeviationCheck {
    let base = average_payoffs(table, advice);
    let mut best = Deviation {
        player: Player::A,
        map: RelabelMap(0b1010), // identity: d(x, r) = r
        gain: f64::NEG_INFINITY,
        payoff: 0.0,
    };
    for player in [Player::A, Player::B] {
        let base_f = base.get(player);
        for m in 0..RelabelMap::COUNT {
            let map = RelabelMap(m);
            let payoff = deviated_payoff(table, advice, player, map);
            let gain = payoff - base_f;
            if gain > best.gain {
                best = Deviation { player, map, gain, payoff };
            }
        }
    }
    DeviationCheck { is_equilibrium: best.gain <= tol, best }
}
