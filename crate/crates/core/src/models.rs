//! Concrete kicked systems: the two-level anholonomy model, composition of
//! an adiabatic problem `(H_B, H_P)` into a kicked system on the doubled
//! space with a control qubit, and the Grover search family with optimal
//! and fair kick vectors, including the perturbative estimate of the fair
//! model's avoided-crossing gap.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::floquet::FloquetSystem;
use crate::numerics::{c64, eig_hermitian, kron, CMatrix, CVector, TOL_HERMITIAN, TOL_NORMALIZED};
use crate::spectral::{min_gap, track_curves};

/// Default energy offset of the cost sector (the Fig.-1/Fig.-2 value).
pub const DEFAULT_E_P: f64 = 2.0 * PI / 3.0;
/// Default cost energy scale.
pub const DEFAULT_ALPHA: f64 = 2.0 * PI / 3.0;

// ---------------------------------------------------------------------------
// Two-level closed forms
// ---------------------------------------------------------------------------

/// Branch-lifted eigenangle pair of the two-level kicked system with
/// `H0 = diag(0, E2)`, kick weights `(|a|^2, |b|^2) = (a_sq, 1 - a_sq)`,
/// and `e2_t = E2 * T`, valid for `s` in `[0, 2pi]`.
///
/// Follows from the characteristic equation: the angles are
/// `(e2_t + s)/2 -+ Theta(s)` with
/// `cos Theta = cos(s/2) cos(e2_t/2) + (a_sq - b_sq) sin(s/2) sin(e2_t/2)`.
/// Only the moduli of the kick amplitudes enter.
pub fn two_level_quasienergy_angles(e2_t: f64, a_sq: f64, s: f64) -> (f64, f64) {
    let beta = e2_t / 2.0;
    let cos_big =
        (s / 2.0).cos() * beta.cos() + (2.0 * a_sq - 1.0) * (s / 2.0).sin() * beta.sin();
    let big = cos_big.clamp(-1.0, 1.0).acos();
    let mean = (e2_t + s) / 2.0;
    (mean - big, mean + big)
}

/// The two quasienergy angles `E_-(s) T` and `E_+(s) T` of the optimal-kick
/// model (`|v>` an equal superposition of the two coupled levels):
/// `(E_P T + s)/2 -+ arccos(cos(E_P T / 2) cos(s / 2))`.
pub fn optimal_v_quasienergies(e_p: f64, t: f64, s: f64) -> (f64, f64) {
    two_level_quasienergy_angles(e_p * t, 0.5, s)
}

/// Two-level anholonomy model: `H0 = diag(0, E2)`, kick vector `(a, b)`.
/// Both amplitudes must be nonzero or the passage cannot move between the
/// levels.
pub fn two_level_system(e2: f64, a: Complex64, b: Complex64, t: f64) -> Result<FloquetSystem> {
    if a.norm() < 1e-15 || b.norm() < 1e-15 {
        return Err(Error::DegenerateChoice(
            "two-level kick vector needs both components nonzero".into(),
        ));
    }
    let norm_sq = a.norm_sqr() + b.norm_sqr();
    if (norm_sq - 1.0).abs() > TOL_NORMALIZED {
        return Err(Error::UnnormalizedVector {
            norm: norm_sq.sqrt(),
        });
    }
    if !(e2 * t > 0.0 && e2 * t < 2.0 * PI) {
        return Err(Error::PeriodTooLong {
            t,
            limit: 2.0 * PI / e2,
        });
    }
    FloquetSystem::new(CMatrix::diag_real(&[0.0, e2]), CVector::new(vec![a, b]), t)
}

// ---------------------------------------------------------------------------
// Composition of an adiabatic problem into a kicked system
// ---------------------------------------------------------------------------

/// Choice of the kick vector when composing an adiabatic problem.
#[derive(Debug, Clone)]
pub enum KickVectorSpec {
    /// `(|-> + |+>)/sqrt(2)`: requires the solution state, gives an
    /// `N`-independent gap.
    Optimal,
    /// `a |0_B>|0> + b |F>|1>` with a reference state `|F>` that merely
    /// overlaps the solution.
    Fair { f: CVector, a: f64, b: f64 },
    Custom(CVector),
}

/// An adiabatic problem to be run through the kicked-map construction.
#[derive(Debug, Clone)]
pub struct AaqcProblem {
    pub h_b: CMatrix,
    pub h_p: CMatrix,
    pub e_p: f64,
    pub t: f64,
    pub v_spec: KickVectorSpec,
}

/// Composed system plus the two states the passage connects.
#[derive(Debug, Clone)]
pub struct AaqcComposed {
    pub system: FloquetSystem,
    /// `|0_B> ⊗ |0>`: ground state of the composed `H0`, energy 0.
    pub minus: CVector,
    /// `|x> ⊗ |1>`: first excited state, energy `E_P`.
    pub plus: CVector,
}

/// Build `H0 = H_B ⊗ |0><0| + (E_P + H_P) ⊗ |1><1|` on the doubled space
/// (control qubit last) and attach the kick vector.
///
/// Both Hamiltonians are shifted so their ground energies are exactly zero;
/// each ground state must be non-degenerate and `E_P` must sit strictly
/// between 0 and the first excited energy of `H_B`. The period must keep
/// every eigenangle inside one period: `T * W < 2pi` for the largest
/// eigenvalue `W` of the composed `H0`.
pub fn compose_aaqc(p: &AaqcProblem) -> Result<AaqcComposed> {
    p.h_b.check_hermitian(TOL_HERMITIAN)?;
    p.h_p.check_hermitian(TOL_HERMITIAN)?;
    let ed_b = eig_hermitian(&p.h_b)?;
    let ed_p = eig_hermitian(&p.h_p)?;
    let dim = p.h_b.dim();
    assert_eq!(dim, p.h_p.dim(), "H_B and H_P dimension mismatch");

    let gap_b = ed_b.values[1] - ed_b.values[0];
    if gap_b < 1e-10 {
        return Err(Error::DegenerateGround { splitting: gap_b });
    }
    let gap_p = ed_p.values[1] - ed_p.values[0];
    if gap_p < 1e-10 {
        return Err(Error::DegenerateGround { splitting: gap_p });
    }
    if !(p.e_p > 0.0 && p.e_p < gap_b) {
        return Err(Error::GapConditionViolated(format!(
            "need 0 < E_P < {gap_b} (first excited energy of H_B), got {}",
            p.e_p
        )));
    }
    let span_b = ed_b.values[dim - 1] - ed_b.values[0];
    let span_p = ed_p.values[dim - 1] - ed_p.values[0];
    let w = span_b.max(p.e_p + span_p);
    if !(p.t > 0.0 && p.t * w < 2.0 * PI) {
        return Err(Error::PeriodTooLong {
            t: p.t,
            limit: 2.0 * PI / w,
        });
    }

    let shift = |m: &CMatrix, e0: f64| m.sub(&CMatrix::identity(dim).scaled(c64(e0, 0.0)));
    let h_b = shift(&p.h_b, ed_b.values[0]);
    let h_p = shift(&p.h_p, ed_p.values[0]);

    let ground_b = ed_b.vector(0);
    let ground_p = ed_p.vector(0);

    let proj0 = CMatrix::diag_real(&[1.0, 0.0]);
    let proj1 = CMatrix::diag_real(&[0.0, 1.0]);
    let cost_sector = h_p.add(&CMatrix::identity(dim).scaled(c64(p.e_p, 0.0)));
    let h0 = kron(&h_b, &proj0).add(&kron(&cost_sector, &proj1));

    let minus = ground_b.kron(&CVector::basis(2, 0));
    let plus = ground_p.kron(&CVector::basis(2, 1));

    let v = match &p.v_spec {
        KickVectorSpec::Optimal => {
            let mut v = minus.clone();
            v.axpy(c64(1.0, 0.0), &plus);
            v.scaled(c64(1.0 / 2.0f64.sqrt(), 0.0))
        }
        KickVectorSpec::Fair { f, a, b } => {
            f.check_normalized(TOL_NORMALIZED)?;
            if !(*b > 0.0) || *a == 0.0 {
                return Err(Error::DegenerateChoice(
                    "fair kick vector needs a != 0 and b > 0".into(),
                ));
            }
            if ((a * a + b * b) - 1.0).abs() > TOL_NORMALIZED {
                return Err(Error::UnnormalizedVector {
                    norm: (a * a + b * b).sqrt(),
                });
            }
            if f.inner(&ground_p).norm() * b < 1e-12 {
                return Err(Error::DegenerateChoice(
                    "reference state has no overlap with the solution".into(),
                ));
            }
            let mut v = ground_b.kron(&CVector::basis(2, 0)).scaled(c64(*a, 0.0));
            v.axpy(c64(*b, 0.0), &f.kron(&CVector::basis(2, 1)));
            v
        }
        KickVectorSpec::Custom(v) => {
            v.check_normalized(TOL_NORMALIZED)?;
            if v.inner(&minus).norm() < 1e-12 || v.inner(&plus).norm() < 1e-12 {
                return Err(Error::DegenerateChoice(
                    "custom kick vector must overlap both endpoints".into(),
                ));
            }
            v.clone()
        }
    };

    let system = FloquetSystem::new(h0, v, p.t)?;
    Ok(AaqcComposed {
        system,
        minus,
        plus,
    })
}

// ---------------------------------------------------------------------------
// Grover pieces
// ---------------------------------------------------------------------------

/// Grover cost Hamiltonian `alpha (1 - |x><x|)`: zero on the marked item,
/// `alpha` elsewhere.
pub fn grover_cost(n: usize, x: usize, alpha: f64) -> Result<CMatrix> {
    if x >= n {
        return Err(Error::IndexOutOfRange { index: x, dim: n });
    }
    assert!(alpha > 0.0, "cost scale must be positive");
    let mut d = vec![alpha; n];
    d[x] = 0.0;
    Ok(CMatrix::diag_real(&d))
}

/// Uniform superposition over `n` items.
pub fn uniform_state(n: usize) -> CVector {
    CVector::from_real(&vec![1.0 / (n as f64).sqrt(); n])
}

/// Mixer Hamiltonian `strength (1 - |F><F|)` with the uniform `|F>` as its
/// unique ground state.
pub fn grover_mixer(n: usize, strength: f64) -> CMatrix {
    let f = uniform_state(n);
    let mut m = crate::numerics::projector(&f).scaled(c64(-strength, 0.0));
    for i in 0..n {
        m[(i, i)] += c64(strength, 0.0);
    }
    m
}

/// Three-level truncation of the fair-kick Grover system in the ordered
/// basis `(|->, |+>, |f>)`:
/// `H0 = diag(0, E_P, E_P + alpha)` and
/// `v = (a, b e^{i theta} sin(eps), b cos(eps))` with
/// `sin(eps) = |<x|F>| = N^{-1/2}` for the uniform reference state.
pub fn fair_grover_effective(
    n: usize,
    a: f64,
    b: f64,
    alpha: f64,
    e_p: f64,
    t: f64,
    theta: f64,
) -> Result<FloquetSystem> {
    if n < 2 {
        return Err(Error::TooLarge(format!(
            "database needs at least 2 items, got {n}"
        )));
    }
    let epsilon = (1.0 / (n as f64).sqrt()).asin();
    fair_grover_effective_from_epsilon(epsilon, a, b, alpha, e_p, t, theta)
}

/// Same truncation with the overlap angle given directly.
pub fn fair_grover_effective_from_epsilon(
    epsilon: f64,
    a: f64,
    b: f64,
    alpha: f64,
    e_p: f64,
    t: f64,
    theta: f64,
) -> Result<FloquetSystem> {
    if !(epsilon > 0.0 && epsilon < PI / 2.0) {
        return Err(Error::DegenerateChoice(format!(
            "overlap angle must lie in (0, pi/2), got {epsilon}"
        )));
    }
    if a <= 0.0 || b <= 0.0 || ((a * a + b * b) - 1.0).abs() > TOL_NORMALIZED {
        return Err(Error::DegenerateChoice(
            "fair weights need a > 0, b > 0, a^2 + b^2 = 1".into(),
        ));
    }
    if !(e_p > 0.0 && alpha > 0.0 && t > 0.0 && (e_p + alpha) * t < 2.0 * PI) {
        return Err(Error::PeriodTooLong {
            t,
            limit: 2.0 * PI / (e_p + alpha),
        });
    }
    let h0 = CMatrix::diag_real(&[0.0, e_p, e_p + alpha]);
    let v = CVector::new(vec![
        c64(a, 0.0),
        Complex64::from_polar(b * epsilon.sin(), theta),
        c64(b * epsilon.cos(), 0.0),
    ]);
    FloquetSystem::new(h0, v, t)
}

/// Full-space fair Grover system plus its invariant three-level basis.
#[derive(Debug, Clone)]
pub struct FairGroverFull {
    pub composed: AaqcComposed,
    /// `|x_perp> ⊗ |1>`, completing `(|->, |+>, |f>)`.
    pub f_state: CVector,
}

/// Fair Grover search on the full `2N`-dimensional space: uniform mixer of
/// the given strength, cost `alpha (1 - |x><x|)`, kick
/// `a |F>|0> + b |F>|1>`.
pub fn fair_grover_full(
    n: usize,
    x: usize,
    a: f64,
    b: f64,
    alpha: f64,
    e_p: f64,
    t: f64,
    mixer_strength: f64,
) -> Result<FairGroverFull> {
    let problem = AaqcProblem {
        h_b: grover_mixer(n, mixer_strength),
        h_p: grover_cost(n, x, alpha)?,
        e_p,
        t,
        v_spec: KickVectorSpec::Fair {
            f: uniform_state(n),
            a,
            b,
        },
    };
    let composed = compose_aaqc(&problem)?;
    // |x_perp> = (1 - |x><x|)|F> / cos(eps)
    let f = uniform_state(n);
    let xv = CVector::basis(n, x);
    let mut xperp = f.clone();
    xperp.axpy(-xv.inner(&f), &xv);
    let xperp = xperp.normalized();
    Ok(FairGroverFull {
        composed,
        f_state: xperp.kron(&CVector::basis(2, 1)),
    })
}

// ---------------------------------------------------------------------------
// Perturbative gap analysis for the fair model
// ---------------------------------------------------------------------------

/// Inputs for the avoided-crossing analysis of the fair three-level model.
#[derive(Debug, Clone)]
pub struct FairGroverParams {
    pub epsilon: f64,
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub e_p: f64,
    pub t: f64,
    /// Initial tracking grid for the numeric gap scan.
    pub n_samples: usize,
}

impl FairGroverParams {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            theta: 0.0,
            a: (5.0f64 / 6.0).sqrt(),
            b: (1.0f64 / 6.0).sqrt(),
            alpha: DEFAULT_ALPHA,
            e_p: DEFAULT_E_P,
            t: 1.0,
            n_samples: 2001,
        }
    }

    pub fn with_database_size(n: usize) -> Self {
        Self::with_epsilon((1.0 / (n as f64).sqrt()).asin())
    }
}

/// Outcome of the avoided-crossing analysis.
#[derive(Debug, Clone)]
pub struct FairGroverAnalysis {
    /// Database size implied by the overlap angle.
    pub n: usize,
    /// `eps` with `<x|F> = e^{i theta} sin(eps)`.
    pub epsilon_overlap: f64,
    pub theta: f64,
    /// Kick strength where the reference level crosses `E_P T`.
    pub s_c: f64,
    /// The textbook estimate `2 eps b sin(s_c / 2)`.
    pub gap_perturbative: f64,
    /// Slope of the reference level at the crossing,
    /// `d W_-/ds (s_c) = |<u|w_-(s_c)>|^2`.
    pub reference_slope_at_crossing: f64,
    /// Full leading-order splitting
    /// `4 eps b sin(s_c/2) |<u|w_-(s_c)>|`: twice the coupling element
    /// `<+|s_hat|w_->` opened by the perturbation. This is the quantity the
    /// measured gap converges to as `eps -> 0`.
    pub gap_leading_order: f64,
    /// Gap measured on the tracked three-level spectrum.
    pub gap_numeric: f64,
}

/// `cos Theta` of the rotation relating the kick to its `eps -> 0`
/// reference: `1 - 8 b^2 sin^2(eps/2) (1 - b^2 sin^2(eps/2)) sin^2(s/2)`.
pub fn fair_reference_cos_rotation(b: f64, epsilon: f64, s: f64) -> f64 {
    let w = b * b * (epsilon / 2.0).sin().powi(2);
    1.0 - 8.0 * w * (1.0 - w) * (s / 2.0).sin().powi(2)
}

/// `Theta / sin Theta` for the rotation above; `1 + O(eps^2)` for small
/// overlap angles.
pub fn fair_reference_rotation_ratio(b: f64, epsilon: f64, s: f64) -> f64 {
    let c = fair_reference_cos_rotation(b, epsilon, s).clamp(-1.0, 1.0);
    let theta = c.acos();
    if theta == 0.0 {
        1.0
    } else {
        theta / theta.sin()
    }
}

/// Slope of the lifted lower two-level angle, from the closed form.
fn two_level_lower_angle_slope(e2_t: f64, a_sq: f64, s: f64) -> f64 {
    let beta = e2_t / 2.0;
    let cos_big =
        (s / 2.0).cos() * beta.cos() + (2.0 * a_sq - 1.0) * (s / 2.0).sin() * beta.sin();
    let sin_big = (1.0 - cos_big * cos_big).max(0.0).sqrt();
    let dcos =
        -0.5 * (s / 2.0).sin() * beta.cos() + 0.5 * (2.0 * a_sq - 1.0) * (s / 2.0).cos() * beta.sin();
    0.5 + dcos / sin_big
}

/// Locate the avoided crossing of the fair model and compare the
/// leading-order gap against the numerically tracked one.
///
/// The reference operator replaces the kick vector by its `eps -> 0` limit
/// `u = a |-> + b |f>`, which leaves `|+>` untouched; its moving level
/// `W_-(s)` crosses the flat `E_P T` at a single `s_c`, found here by
/// bisection of the closed-form two-level angle. The perturbation couples
/// `|+>` to `|u>` with strength `2 eps b sin(s/2)`, opening the crossing
/// into an avoided one whose full splitting is
/// `2 |<+|s_hat|w_->| = 4 eps b sin(s_c/2) |<u|w_-(s_c)>|`.
pub fn analyze_fair_grover(params: &FairGroverParams) -> Result<FairGroverAnalysis> {
    let FairGroverParams {
        epsilon,
        theta,
        a,
        b,
        alpha,
        e_p,
        t,
        n_samples,
    } = *params;

    let sys = fair_grover_effective_from_epsilon(epsilon, a, b, alpha, e_p, t, theta)?;

    // reference level in the (|->, |f>) block: two-level system with
    // excited energy E_P + alpha and weights (a^2, b^2)
    let e2_t = (e_p + alpha) * t;
    let a_sq = a * a;
    let target = e_p * t;
    let f = |s: f64| two_level_quasienergy_angles(e2_t, a_sq, s).0 - target;
    let (mut lo, mut hi) = (0.0, 2.0 * PI);
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return Err(Error::CrossingNotFound);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_c = 0.5 * (lo + hi);
    if s_c < 1e-3 || (s_c - PI).abs() < 1e-3 {
        return Err(Error::CrossingAtSingularPoint { s_c });
    }

    let gap_perturbative = (2.0 * epsilon * b * (s_c / 2.0).sin()).abs();
    let reference_slope_at_crossing = two_level_lower_angle_slope(e2_t, a_sq, s_c);
    let gap_leading_order = 2.0 * gap_perturbative * reference_slope_at_crossing.sqrt();

    let curves = track_curves(&sys, 0.0, 2.0 * PI, n_samples)?;
    let ground = curves
        .iter()
        .position(|c| c.theta_start().abs() < 1e-9)
        .expect("three-level model has a level at angle 0");
    let report = min_gap(&sys, &curves, ground);

    Ok(FairGroverAnalysis {
        n: (1.0 / epsilon.sin().powi(2)).round() as usize,
        epsilon_overlap: epsilon,
        theta,
        s_c,
        gap_perturbative,
        reference_slope_at_crossing,
        gap_leading_order,
        gap_numeric: report.min_gap,
    })
}
