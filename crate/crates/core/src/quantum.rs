//! Two-qubit advice states, binary measurements, and the boxes they induce.
//!
//! A quantum strategy is a shared density operator plus one measurement per
//! type per player. Measurements are either projective along a Bloch
//! direction or the general two-outcome POVM
//! `E = (α·I + μ·n̂·σ)/2` with `0 < α ≤ 2`, `0 ≤ μ ≤ min(α, 2-α)`;
//! the projective case is `α = μ = 1`. Outcome `+` (the effect carrying
//! `+μ n̂·σ`) maps to action 0. The induced box
//! `P(ab|ij) = Tr[ρ (E_i^a ⊗ F_j^b)]` is always no-signaling.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nsbox::NsBox;

type C = Complex64;
pub type Mat2 = Matrix2<Complex64>;
pub type Mat4 = Matrix4<Complex64>;

/// Density matrices must be Hermitian and unit-trace within this tolerance.
pub const STATE_TOL: f64 = 1e-12;
/// Eigenvalue floor absorbing rounding in the positivity check.
pub const PSD_EIGEN_FLOOR: f64 = -1e-10;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn r(re: f64) -> C {
    C::new(re, 0.0)
}

/// `n̂·σ` for a Bloch vector.
fn bloch_dot_sigma(n: [f64; 3]) -> Mat2 {
    Matrix2::new(r(n[2]), c(n[0], -n[1]), c(n[0], n[1]), r(-n[2]))
}

/// A two-qubit density operator (4x4, Hermitian, unit trace, PSD).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: Mat4,
}

impl TwoQubitState {
    /// Validates an arbitrary density matrix.
    pub fn from_density(rho: Mat4) -> Result<Self> {
        let herm_err = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |rho - rho^dag| = {herm_err:e}"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
        }
        let eigs = rho.symmetric_eigenvalues();
        let min_eig = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < PSD_EIGEN_FLOOR {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite: min eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { rho })
    }

    fn from_ket(v: Vector4<C>) -> Self {
        Self { rho: v * v.adjoint() }
    }

    /// The pure state `a|00> + b|11>` with `b = +sqrt(1 - a^2)`, `0 < a < 1`.
    pub fn pure(a: f64) -> Result<Self> {
        check_amplitude(a)?;
        let b = (1.0 - a * a).sqrt();
        Ok(Self::from_ket(Vector4::new(r(a), r(0.0), r(0.0), r(b))))
    }

    /// The pure state `a|01> + b|10>` with `b = +sqrt(1 - a^2)`, `0 < a < 1`.
    pub fn pure_cross(a: f64) -> Result<Self> {
        check_amplitude(a)?;
        let b = (1.0 - a * a).sqrt();
        Ok(Self::from_ket(Vector4::new(r(0.0), r(a), r(b), r(0.0))))
    }

    /// Werner state `p |ψ⁻><ψ⁻| + (1-p) I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidState(format!(
                "Werner parameter must lie in [0,1], got {p}"
            )));
        }
        let s = 1.0 / 2f64.sqrt();
        let psi_minus = Vector4::new(r(0.0), r(s), r(-s), r(0.0));
        let rho = (psi_minus * psi_minus.adjoint()) * r(p) + Mat4::identity() * r((1.0 - p) / 4.0);
        Ok(Self { rho })
    }

    /// The singlet `|ψ⁻> = (|01> - |10>)/√2`.
    pub fn singlet() -> Self {
        Self::werner(1.0).expect("p = 1 is in range")
    }

    pub fn density(&self) -> &Mat4 {
        &self.rho
    }
}

fn check_amplitude(a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidState(format!(
            "Schmidt amplitude must satisfy 0 < a < 1, got {a}"
        )));
    }
    Ok(())
}

/// A measurement direction in spherical angles; the Bloch vector is
/// `(sinθ cosφ, sinθ sinφ, cosθ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasDirection {
    theta: f64,
    phi: f64,
}

impl MeasDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidMeasurement(format!(
                "angles must be finite, got theta={theta}, phi={phi}"
            )));
        }
        Ok(Self { theta, phi })
    }

    /// Angles of a given Bloch vector (normalized first).
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm < 1e-12 || !norm.is_finite() {
            return Err(Error::InvalidMeasurement(
                "direction vector must be nonzero and finite".into(),
            ));
        }
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Parameters of the general two-outcome qubit POVM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmParams {
    alpha: f64,
    mu: f64,
}

impl PovmParams {
    pub fn new(alpha: f64, mu: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidMeasurement(format!(
                "alpha must lie in (0, 2], got {alpha}"
            )));
        }
        let cap = alpha.min(2.0 - alpha);
        if !(mu >= 0.0 && mu <= cap + 1e-12) {
            return Err(Error::InvalidMeasurement(format!(
                "mu must lie in [0, min(alpha, 2-alpha)] = [0, {cap}], got {mu}"
            )));
        }
        Ok(Self { alpha, mu: mu.min(cap) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The projective case.
    pub fn sharp() -> Self {
        Self { alpha: 1.0, mu: 1.0 }
    }
}

/// A state plus two measurement directions per player. Without `povm` the
/// measurements are projective.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    pub state: TwoQubitState,
    pub alice: [MeasDirection; 2],
    pub bob: [MeasDirection; 2],
    pub povm: Option<PovmParams>,
}

/// Projector pair `(I ± n̂·σ)/2` for a direction; outcome `+` first.
pub fn effects_projective(d: &MeasDirection) -> [Mat2; 2] {
    effects_povm(d, &PovmParams::sharp())
}

/// POVM pair `E = (α·I + μ·n̂·σ)/2` and its complement; outcome `+` first.
pub fn effects_povm(d: &MeasDirection, pp: &PovmParams) -> [Mat2; 2] {
    let ns = bloch_dot_sigma(d.unit_vector());
    let plus = (Mat2::identity() * r(pp.alpha) + ns * r(pp.mu)) * r(0.5);
    let minus = Mat2::identity() - plus;
    [plus, minus]
}

/// The box induced by explicit per-setting effect pairs:
/// `P(ab|ij) = Tr[ρ (E_i^a ⊗ F_j^b)]`.
pub fn box_from_effects(
    state: &TwoQubitState,
    alice: &[[Mat2; 2]; 2],
    bob: &[[Mat2; 2]; 2],
) -> NsBox {
    let mut p = [0.0; 16];
    for i in 0..2usize {
        for j in 0..2usize {
            for a in 0..2usize {
                for b in 0..2usize {
                    let op = alice[i][a].kronecker(&bob[j][b]);
                    let prob = (state.rho * op).trace().re;
                    p[8 * i + 4 * j + 2 * a + b] = prob;
                }
            }
        }
    }
    NsBox::new(p).expect("Born-rule statistics form a valid no-signaling box")
}

/// The box induced by a strategy through the Born rule.
pub fn box_from_strategy(s: &QuantumStrategy) -> NsBox {
    let effects = |d: &MeasDirection| match &s.povm {
        Some(pp) => effects_povm(d, pp),
        None => effects_projective(d),
    };
    let alice = [effects(&s.alice[0]), effects(&s.alice[1])];
    let bob = [effects(&s.bob[0]), effects(&s.bob[1])];
    box_from_effects(&s.state, &alice, &bob)
}

/// Closed-form joint distribution for projective measurements on
/// `a|00> + b|11>`, written directly in the direction components. Agrees
/// with the Born rule to machine precision and serves as its independent
/// cross-check.
#[allow(clippy::needless_range_loop)] // i, j are the measurement settings
pub fn closed_form_box(
    a: f64,
    alice: &[MeasDirection; 2],
    bob: &[MeasDirection; 2],
) -> Result<NsBox> {
    check_amplitude(a)?;
    let b = (1.0 - a * a).sqrt();
    let (a2, b2, ab) = (a * a, b * b, a * b);
    let mut p = [0.0; 16];
    for i in 0..2usize {
        for j in 0..2usize {
            let u = alice[i].unit_vector();
            let v = bob[j].unit_vector();
            // (++, +-, -+, --) for Alice direction u, Bob direction v
            let pp = 0.25
                * (2.0 * ab * (v[0] * u[0] - v[1] * u[1])
                    + b2 * (-1.0 + v[2]) * (u[2] - 1.0)
                    + a2 * (v[2] + 1.0) * (u[2] + 1.0));
            let pm = 0.25
                * (2.0 * ab * (-v[0] * u[0] + v[1] * u[1])
                    - b2 * (1.0 + v[2]) * (u[2] - 1.0)
                    - a2 * (v[2] - 1.0) * (u[2] + 1.0));
            let mp = 0.25
                * (2.0 * ab * (-v[0] * u[0] + v[1] * u[1])
                    - a2 * (1.0 + v[2]) * (u[2] - 1.0)
                    - b2 * (v[2] - 1.0) * (u[2] + 1.0));
            let mm = 0.25
                * (2.0 * ab * (v[0] * u[0] - v[1] * u[1])
                    + a2 * (-1.0 + v[2]) * (u[2] - 1.0)
                    + b2 * (v[2] + 1.0) * (u[2] + 1.0));
            let base = 8 * i + 4 * j;
            p[base] = pp;
            p[base + 1] = pm;
            p[base + 2] = mp;
            p[base + 3] = mm;
        }
    }
    NsBox::new(p)
}

/// Largest CHSH value reachable from `a|00> + b|11>` (and its local-unitary
/// relatives): `2·sqrt(1 + 4a²b²)`.
pub fn chsh_max_pure(a: f64) -> f64 {
    let b2 = 1.0 - a * a;
    2.0 * (1.0 + 4.0 * a * a * b2).sqrt()
}

/// Measurement settings achieving the optimal violation `2·sqrt(1+4a²b²)`
/// on `a|01> + b|10>`: Alice along z and x, Bob tilted by
/// `cos β = -cos β' = 1/sqrt(1+4a²b²)` in the x-z plane.
///
/// With these fixed sign conventions the optimum shows up as one of the
/// CHSH relabeling variants (see [`crate::nsbox::max_chsh_symmetry`]),
/// not necessarily the fixed-sign expression.
pub fn gisin_settings(a: f64) -> Result<QuantumStrategy> {
    check_amplitude(a)?;
    let b = (1.0 - a * a).sqrt();
    let x = 1.0 + 4.0 * a * a * b * b;
    let cos_beta = 1.0 / x.sqrt();
    let beta = cos_beta.acos();
    Ok(QuantumStrategy {
        state: TwoQubitState::pure_cross(a)?,
        alice: [MeasDirection::new(0.0, 0.0)?, MeasDirection::new(std::f64::consts::FRAC_PI_2, 0.0)?],
        bob: [
            MeasDirection::new(beta, 0.0)?,
            MeasDirection::new(std::f64::consts::PI - beta, 0.0)?,
        ],
        povm: None,
    })
}

/// The singlet with the standard CHSH-optimal projective settings
/// (Alice along z and x, Bob along `-(z±x)/√2`), reaching `B = 2√2`.
pub fn singlet_chsh_strategy() -> QuantumStrategy {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    QuantumStrategy {
        state: TwoQubitState::singlet(),
        alice: [
            MeasDirection::new(0.0, 0.0).unwrap(),
            MeasDirection::new(std::f64::consts::FRAC_PI_2, 0.0).unwrap(),
        ],
        bob: [
            MeasDirection::from_vector([-s, 0.0, -s]).unwrap(),
            MeasDirection::from_vector([s, 0.0, -s]).unwrap(),
        ],
        povm: None,
    }
}

/// The worked-example strategy: `a|00> + b|11>` with both parties measuring
/// `θ⁰ = -π/15, φ⁰ = π/2` and `θ¹ = π/3, φ¹ = π/2`.
pub fn example_strategy(a: f64) -> Result<QuantumStrategy> {
    let pi = std::f64::consts::PI;
    let m0 = MeasDirection::new(-pi / 15.0, pi / 2.0)?;
    let m1 = MeasDirection::new(pi / 3.0, pi / 2.0)?;
    Ok(QuantumStrategy {
        state: TwoQubitState::pure(a)?,
        alice: [m0, m1],
        bob: [m0, m1],
        povm: None,
    })
}

/// Uniformly random Bloch direction (for Monte Carlo tests).
pub fn random_direction<R: rand::Rng>(rng: &mut R) -> MeasDirection {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    MeasDirection { theta: z.clamp(-1.0, 1.0).acos(), phi }
}

/// Random density matrix `G G† / Tr[G G†]` with uniform complex entries.
/// Not a Haar-type measure; spans full-rank states, which is what the
/// Monte Carlo invariant tests need.
pub fn random_density<R: rand::Rng>(rng: &mut R) -> TwoQubitState {
    let mut g = Mat4::zeros();
    for v in g.iter_mut() {
        *v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let rho = g * g.adjoint();
    let tr = rho.trace().re;
    TwoQubitState { rho: rho * r(1.0 / tr) }
}
