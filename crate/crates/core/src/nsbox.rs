//! 2-2-2 no-signaling correlations.
//!
//! A box is a conditional distribution `P(y_A, y_B | x_A, x_B)` with binary
//! settings and outcomes. Outcome `0` plays the role of `+`, outcome `1` of
//! `-`. Every box here satisfies no-signaling: Alice's marginals do not
//! depend on `x_B` and vice versa, which makes the canonical parametrization
//! `(m_0, m_1, n_0, n_1, c_00, c_01, c_10, c_11)` complete — `m_i`/`n_j` are
//! the `+` marginals per setting and `c_ij` the joint `++` probabilities.
//! The set of such boxes is an 8-dimensional polytope with 24 vertices: the
//! 16 deterministic boxes plus 8 PR-type extremal boxes.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GameParams, PayoffPair, PureStrategy};

mod lp;

/// Entries this far below zero are treated as rounding noise and clamped.
pub const ENTRY_CLAMP_TOL: f64 = 1e-12;
/// Each setting's four probabilities must sum to one within this tolerance.
pub const SETTING_SUM_TOL: f64 = 1e-9;
/// Largest tolerated no-signaling violation; smaller residuals are projected
/// out by averaging the marginals.
pub const NS_TOL: f64 = 1e-9;

/// A validated no-signaling box in full form.
///
/// Entries are indexed `(x_a, x_b, y_a, y_b)` row-major like the utility
/// tensors: flat index `8*x_a + 4*x_b + 2*y_a + y_b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NsBox {
    p: [f64; 16],
}

fn idx(x_a: u8, x_b: u8, y_a: u8, y_b: u8) -> usize {
    (8 * x_a + 4 * x_b + 2 * y_a + y_b) as usize
}

impl NsBox {
    /// Validates and normalizes a raw probability tensor.
    ///
    /// Entries in `[-1e-12, 0)` are clamped to zero; lower values are
    /// rejected. Setting sums must be within `1e-9` of one. No-signaling
    /// violations up to `1e-9` are projected out by averaging marginals;
    /// larger ones are rejected with the offending constraint named.
    pub fn new(p: [f64; 16]) -> Result<Self> {
        let mut p = p;
        for (i, v) in p.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidBox(format!("entry {i} is not finite")));
            }
            if *v < 0.0 {
                if *v < -ENTRY_CLAMP_TOL {
                    return Err(Error::InvalidBox(format!(
                        "entry {i} is negative ({v}), below the {ENTRY_CLAMP_TOL:e} clamp"
                    )));
                }
                *v = 0.0;
            }
        }
        for x_a in 0..2u8 {
            for x_b in 0..2u8 {
                let s: f64 = (0..4).map(|k| p[idx(x_a, x_b, 0, 0) + k]).sum();
                if (s - 1.0).abs() > SETTING_SUM_TOL {
                    return Err(Error::InvalidBox(format!(
                        "setting ({x_a},{x_b}) sums to {s}, not 1 within {SETTING_SUM_TOL:e}"
                    )));
                }
            }
        }
        let boxed = Self { p };
        let res = boxed.ns_residual();
        if res > NS_TOL {
            return Err(Error::InvalidBox(format!(
                "no-signaling violated by {res:e} (> {NS_TOL:e}): marginals depend on the \
                 remote setting"
            )));
        }
        if res > 1e-13 {
            // project: rebuild from averaged marginals, keeping the ++ cells
            return Ok(box_from_canonical(&canonical_from_raw(&boxed)));
        }
        Ok(boxed)
    }

    pub fn prob(&self, x_a: u8, x_b: u8, y_a: u8, y_b: u8) -> f64 {
        self.p[idx(x_a, x_b, y_a, y_b)]
    }

    pub fn entries(&self) -> &[f64; 16] {
        &self.p
    }

    /// Alice's `+` marginal at her setting `x_a`, given Bob's setting `x_b`.
    pub fn alice_marginal(&self, x_a: u8, x_b: u8) -> f64 {
        self.prob(x_a, x_b, 0, 0) + self.prob(x_a, x_b, 0, 1)
    }

    /// Bob's `+` marginal at his setting `x_b`, given Alice's setting `x_a`.
    pub fn bob_marginal(&self, x_a: u8, x_b: u8) -> f64 {
        self.prob(x_a, x_b, 0, 0) + self.prob(x_a, x_b, 1, 0)
    }

    /// Worst no-signaling violation over both parties and settings.
    pub fn ns_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..2u8 {
            worst = worst.max((self.alice_marginal(x, 0) - self.alice_marginal(x, 1)).abs());
            worst = worst.max((self.bob_marginal(0, x) - self.bob_marginal(1, x)).abs());
        }
        worst
    }
}

/// Canonical `(m, n, c)` parametrization of a no-signaling box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalBox {
    m: [f64; 2],
    n: [f64; 2],
    c: [[f64; 2]; 2],
}

impl CanonicalBox {
    /// Validates positivity: all parameters in `[0,1]` and
    /// `max(0, m_i + n_j - 1) <= c_ij <= min(m_i, n_j)` for all settings.
    pub fn new(m: [f64; 2], n: [f64; 2], c: [[f64; 2]; 2]) -> Result<Self> {
        for (name, vals) in [("m", &m), ("n", &n)] {
            for (i, v) in vals.iter().enumerate() {
                if !v.is_finite() || *v < -ENTRY_CLAMP_TOL || *v > 1.0 + ENTRY_CLAMP_TOL {
                    return Err(Error::InvalidBox(format!(
                        "marginal {name}{i} = {v} outside [0,1]"
                    )));
                }
            }
        }
        let m = [m[0].clamp(0.0, 1.0), m[1].clamp(0.0, 1.0)];
        let n = [n[0].clamp(0.0, 1.0), n[1].clamp(0.0, 1.0)];
        let mut c = c;
        for i in 0..2 {
            for j in 0..2 {
                let lo = (m[i] + n[j] - 1.0).max(0.0);
                let hi = m[i].min(n[j]);
                let v = c[i][j];
                if !v.is_finite() || v < lo - ENTRY_CLAMP_TOL || v > hi + ENTRY_CLAMP_TOL {
                    return Err(Error::InvalidBox(format!(
                        "joint c{i}{j} = {v} violates positivity bounds [{lo}, {hi}]"
                    )));
                }
                c[i][j] = v.clamp(lo, hi);
            }
        }
        Ok(Self { m, n, c })
    }

    pub fn m(&self, i: usize) -> f64 {
        self.m[i]
    }

    pub fn n(&self, j: usize) -> f64 {
        self.n[j]
    }

    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.c[i][j]
    }

    /// Correlator `<ij> = P(++) - P(+-) - P(-+) + P(--)` at settings `(i,j)`.
    pub fn correlator(&self, i: usize, j: usize) -> f64 {
        1.0 + 4.0 * self.c[i][j] - 2.0 * self.m[i] - 2.0 * self.n[j]
    }
}

fn canonical_from_raw(b: &NsBox) -> CanonicalBox {
    let m = [
        0.5 * (b.alice_marginal(0, 0) + b.alice_marginal(0, 1)),
        0.5 * (b.alice_marginal(1, 0) + b.alice_marginal(1, 1)),
    ];
    let n = [
        0.5 * (b.bob_marginal(0, 0) + b.bob_marginal(1, 0)),
        0.5 * (b.bob_marginal(0, 1) + b.bob_marginal(1, 1)),
    ];
    let c = [
        [b.prob(0, 0, 0, 0), b.prob(0, 1, 0, 0)],
        [b.prob(1, 0, 0, 0), b.prob(1, 1, 0, 0)],
    ];
    CanonicalBox { m, n, c }
}

/// Canonical form of a validated box. Infallible: box validity implies the
/// positivity bounds up to rounding, which the constructor clamps.
pub fn canonical_from_box(b: &NsBox) -> CanonicalBox {
    let raw = canonical_from_raw(b);
    CanonicalBox::new(raw.m, raw.n, raw.c).expect("a valid NsBox has a valid canonical form")
}

/// Full form of a canonical box: per setting `(i,j)` the outcome
/// probabilities are `(c, m-c, n-c, 1-m-n+c)` in `(++, +-, -+, --)` order.
pub fn box_from_canonical(c: &CanonicalBox) -> NsBox {
    let mut p = [0.0; 16];
    for i in 0..2usize {
        for j in 0..2usize {
            let (m, n, cc) = (c.m[i], c.n[j], c.c[i][j]);
            p[idx(i as u8, j as u8, 0, 0)] = cc;
            p[idx(i as u8, j as u8, 0, 1)] = (m - cc).max(0.0);
            p[idx(i as u8, j as u8, 1, 0)] = (n - cc).max(0.0);
            p[idx(i as u8, j as u8, 1, 1)] = (1.0 - m - n + cc).max(0.0);
        }
    }
    NsBox { p }
}

/// The CHSH expression `B = 2 + 4(c00 + c01 + c10 - c11) - 4(m0 + n0)`.
pub fn chsh(c: &CanonicalBox) -> f64 {
    2.0 + 4.0 * (c.c[0][0] + c.c[0][1] + c.c[1][0] - c.c[1][1]) - 4.0 * (c.m[0] + c.n[0])
}

/// CHSH evaluated through the correlators, as an independent route:
/// `B = <00> + <01> + <10> - <11>`.
pub fn chsh_from_correlators(b: &NsBox) -> f64 {
    let e = |i: u8, j: u8| {
        b.prob(i, j, 0, 0) - b.prob(i, j, 0, 1) - b.prob(i, j, 1, 0) + b.prob(i, j, 1, 1)
    };
    e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1)
}

/// All 8 CHSH sign variants (the facet family of the local polytope).
///
/// Entries `k = 0..4` place the minus sign on correlator `(k>>1, k&1)`;
/// entries `4..8` are their negations. A box is local iff all eight lie in
/// `[-2, 2]`.
pub fn chsh_all_symmetries(c: &CanonicalBox) -> [f64; 8] {
    let e = [
        [c.correlator(0, 0), c.correlator(0, 1)],
        [c.correlator(1, 0), c.correlator(1, 1)],
    ];
    let total = e[0][0] + e[0][1] + e[1][0] + e[1][1];
    let mut out = [0.0; 8];
    for k in 0..4 {
        let v = total - 2.0 * e[k >> 1][k & 1];
        out[k] = v;
        out[k + 4] = -v;
    }
    out
}

/// Largest CHSH variant value; exceeds 2 exactly for nonlocal boxes.
pub fn max_chsh_symmetry(c: &CanonicalBox) -> f64 {
    chsh_all_symmetries(c)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The 16 deterministic boxes, indexed `4 * alice + bob` in `g1..g4` order.
pub fn deterministic_boxes() -> Vec<NsBox> {
    let mut out = Vec::with_capacity(16);
    for ga in PureStrategy::ALL {
        for gb in PureStrategy::ALL {
            out.push(crate::game::pure_strategy_box(ga, gb));
        }
    }
    out
}

/// PR-type extremal box with outputs satisfying
/// `y_a ⊕ y_b = x_a·x_b ⊕ a·x_a ⊕ b·x_b ⊕ g`.
pub fn pr_variant(a: u8, b: u8, g: u8) -> NsBox {
    let mut p = [0.0; 16];
    for x_a in 0..2u8 {
        for x_b in 0..2u8 {
            let target = (x_a & x_b) ^ (a & x_a) ^ (b & x_b) ^ g;
            for y_a in 0..2u8 {
                let y_b = y_a ^ target;
                p[idx(x_a, x_b, y_a, y_b)] = 0.5;
            }
        }
    }
    NsBox { p }
}

/// The standard PR box: `y_a ⊕ y_b = x_a ∧ x_b`, reaching CHSH = 4.
pub fn pr_box() -> NsBox {
    pr_variant(0, 0, 0)
}

/// The white-noise box with every outcome pair equally likely.
pub fn uniform_box() -> NsBox {
    NsBox { p: [0.25; 16] }
}

/// All 24 vertices of the no-signaling polytope: the 16 deterministic boxes
/// followed by the 8 PR variants.
pub fn ns_vertices() -> Vec<NsBox> {
    let mut v = deterministic_boxes();
    for a in 0..2u8 {
        for b in 0..2u8 {
            for g in 0..2u8 {
                v.push(pr_variant(a, b, g));
            }
        }
    }
    v
}

/// Convex mixture `q * first + (1-q) * second`.
pub fn mix(q: f64, first: &NsBox, second: &NsBox) -> Result<NsBox> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "mixing weight must lie in [0,1], got {q}"
        )));
    }
    let mut p = [0.0; 16];
    for (i, v) in p.iter_mut().enumerate() {
        *v = q * first.p[i] + (1.0 - q) * second.p[i];
    }
    Ok(NsBox { p })
}

/// The one-parameter family `q·PR + (1-q)·D`, where `D` is the deterministic
/// box of the (Const0, Identity) equilibrium pair. This is the deterministic
/// anchor that reproduces the payoff line `(11/16 + q/16, 7/16 + 5q/16)` for
/// G(1/2, 1).
pub fn pr_d_mixture(q: f64) -> Result<NsBox> {
    let d = crate::game::pure_strategy_box(PureStrategy::Const0, PureStrategy::Identity);
    mix(q, &pr_box(), &d)
}

/// Closed-form average payoffs in terms of the canonical parameters:
///
/// `F_A = (1/16)[3 + (3/2)B + 2(m0+n0) + (m1+n1)]`
/// `F_B = (1/16)[(10τ-2κ) + (τ+κ)B + 4(κ-τ)(m0+n0) + (3-4τ)(m1+n1)
///         + 4(κ+τ-3/2)c11]`
pub fn payoffs_closed_form(params: &GameParams, c: &CanonicalBox) -> PayoffPair {
    let b = chsh(c);
    let m0n0 = c.m[0] + c.n[0];
    let m1n1 = c.m[1] + c.n[1];
    let (k, t) = (params.kappa(), params.tau());
    let f_a = (3.0 + 1.5 * b + 2.0 * m0n0 + m1n1) / 16.0;
    let f_b = ((10.0 * t - 2.0 * k)
        + (t + k) * b
        + 4.0 * (k - t) * m0n0
        + (3.0 - 4.0 * t) * m1n1
        + 4.0 * (k + t - 1.5) * c.c[1][1])
        / 16.0;
    PayoffPair { f_a, f_b }
}

/// The marginal statistic `K = 2(m0 + n0) + m1 + n1`, ranging over `[0, 6]`.
pub fn k_statistic(c: &CanonicalBox) -> f64 {
    2.0 * (c.m[0] + c.n[0]) + c.m[1] + c.n[1]
}

/// Result of the local-polytope membership test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalityResult {
    pub is_local: bool,
    /// Mixture weights over the 16 deterministic boxes (index `4*alice+bob`)
    /// when the box is local.
    pub weights: Option<[f64; 16]>,
    /// Residual infeasibility found by the solver.
    pub residual: f64,
}

/// Decides membership in the local polytope by solving the linear
/// feasibility problem `P = Σ_λ w_λ D_λ`, `w ≥ 0`, `Σ w = 1` over the 16
/// deterministic boxes. By Fine's theorem this agrees with asking all 8
/// CHSH variants to stay within `[-2, 2]`.
pub fn is_local(b: &NsBox, tol: f64) -> LocalityResult {
    let dets = deterministic_boxes();
    // 17 rows: 16 probability entries plus the normalization row.
    let mut a = vec![vec![0.0; 16]; 17];
    let mut rhs = vec![0.0; 17];
    for (col, d) in dets.iter().enumerate() {
        for (row, entry) in d.p.iter().enumerate() {
            a[row][col] = *entry;
        }
        a[16][col] = 1.0;
    }
    rhs[..16].copy_from_slice(&b.p);
    rhs[16] = 1.0;

    match lp::feasible_nonneg(&a, &rhs, tol) {
        Some((w, residual)) => {
            let mut weights = [0.0; 16];
            weights.copy_from_slice(&w);
            LocalityResult { is_local: true, weights: Some(weights), residual }
        }
        None => LocalityResult { is_local: false, weights: None, residual: f64::INFINITY },
    }
}

/// A valid box drawn by sampling the canonical parametrization uniformly:
/// marginals uniform in `[0,1]`, joints uniform within their positivity
/// interval. Spans the whole no-signaling polytope.
pub fn random_box<R: Rng>(rng: &mut R) -> NsBox {
    let m: [f64; 2] = [rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)];
    let n: [f64; 2] = [rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)];
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let lo = (m[i] + n[j] - 1.0).max(0.0);
            let hi = m[i].min(n[j]);
            c[i][j] = rng.gen_range(lo..=hi);
        }
    }
    box_from_canonical(&CanonicalBox { m, n, c })
}

/// A random point of the local polytope: a Dirichlet-style mixture of the
/// 16 deterministic boxes.
pub fn random_local_box<R: Rng>(rng: &mut R) -> NsBox {
    let mut w = [0.0f64; 16];
    let mut total = 0.0;
    for v in &mut w {
        *v = -rng.gen_range(1e-12..1.0f64).ln();
        total += *v;
    }
    let dets = deterministic_boxes();
    let mut p = [0.0; 16];
    for (wi, d) in w.iter().zip(dets.iter()) {
        for (acc, &e) in p.iter_mut().zip(d.p.iter()) {
            *acc += (wi / total) * e;
        }
    }
    NsBox { p }
}
