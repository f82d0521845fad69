//! Rank-1-kicked Floquet operators and discretization of continuous-time
//! adiabatic sweeps into step unitaries.
//!
//! The central object is `U_s = exp(-i H0 T) * exp(-i s |v><v|)`: a free
//! evolution over one kick period followed by a rank-1 phase kick of
//! strength `s`. The kick factor has the closed form
//! `1 + (exp(-is) - 1)|v><v|`, so both the operator and its spectrum are
//! 2pi-periodic in `s`, and applying `U_s` to a state costs one dense
//! matrix-vector product plus a rank-1 update.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    exp_from_decomposition, projector, CMatrix, CVector, EigenDecomposition, TOL_HERMITIAN,
    TOL_NORMALIZED,
};

/// Anything that can act as the one-step map of a discrete adiabatic passage.
pub trait FloquetMap {
    fn dim(&self) -> usize;
    /// Apply `U_s` to a state.
    fn apply(&self, s: f64, psi: &CVector) -> CVector;
}

/// Closed-form rank-1 kick `exp(-i s |v><v|) = 1 + (exp(-is) - 1)|v><v|`.
pub fn kick_operator(v: &CVector, s: f64) -> Result<CMatrix> {
    v.check_normalized(TOL_NORMALIZED)?;
    let f = Complex64::from_polar(1.0, -s) - Complex64::new(1.0, 0.0);
    let mut m = projector(v).scaled(f);
    for i in 0..v.dim() {
        m[(i, i)] += Complex64::new(1.0, 0.0);
    }
    Ok(m)
}

/// A kicked system `(H0, |v>, T)`. The free-evolution factor `exp(-i H0 T)`
/// and the eigendecomposition of `H0` are computed once at construction.
#[derive(Debug, Clone)]
pub struct FloquetSystem {
    h0: CMatrix,
    v: CVector,
    t: f64,
    u0: CMatrix,
    h0_eig: EigenDecomposition,
}

impl FloquetSystem {
    pub fn new(h0: CMatrix, v: CVector, t: f64) -> Result<Self> {
        assert!(h0.is_square(), "H0 must be square");
        assert_eq!(h0.rows, v.dim(), "H0 and v dimension mismatch");
        h0.check_hermitian(TOL_HERMITIAN)?;
        v.check_normalized(TOL_NORMALIZED)?;
        if !(t > 0.0) {
            return Err(Error::BadGrid(format!("kick period T = {t} must be positive")));
        }
        let h0_eig = crate::numerics::eig_hermitian(&h0)?;
        let u0 = exp_from_decomposition(&h0_eig, t);
        Ok(Self { h0, v, t, u0, h0_eig })
    }

    pub fn dim(&self) -> usize {
        self.h0.rows
    }

    pub fn h0(&self) -> &CMatrix {
        &self.h0
    }

    pub fn v(&self) -> &CVector {
        &self.v
    }

    pub fn period(&self) -> f64 {
        self.t
    }

    /// Cached `exp(-i H0 T)`.
    pub fn u0(&self) -> &CMatrix {
        &self.u0
    }

    pub fn h0_eigendecomposition(&self) -> &EigenDecomposition {
        &self.h0_eig
    }

    /// Dense `U_s = exp(-i H0 T) exp(-i s |v><v|)`.
    pub fn floquet_operator(&self, s: f64) -> CMatrix {
        let kick = kick_operator(&self.v, s).expect("v validated at construction");
        self.u0.mul(&kick)
    }
}

impl FloquetMap for FloquetSystem {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn apply(&self, s: f64, psi: &CVector) -> CVector {
        let f = Complex64::from_polar(1.0, -s) - Complex64::new(1.0, 0.0);
        let mut kicked = psi.clone();
        kicked.axpy(f * self.v.inner(psi), &self.v);
        self.u0.mul_vec(&kicked)
    }
}

/// Free function mirroring `FloquetSystem::floquet_operator`.
pub fn floquet_operator(sys: &FloquetSystem, s: f64) -> CMatrix {
    sys.floquet_operator(s)
}

// ---------------------------------------------------------------------------
// Discretization of continuous-time sweeps
// ---------------------------------------------------------------------------

/// A continuous-time adiabatic problem: a Hermitian family `H(s)`, the sweep
/// profile `s(t)` with `s(0) = 0`, `s(T_max) = s_max`, and the total time.
pub struct SaqcProblem {
    pub h_of_s: Box<dyn Fn(f64) -> CMatrix + Sync>,
    pub schedule: Box<dyn Fn(f64) -> f64 + Sync>,
    pub s_max: f64,
    pub t_max: f64,
}

impl SaqcProblem {
    pub fn new(
        h_of_s: impl Fn(f64) -> CMatrix + Sync + 'static,
        schedule: impl Fn(f64) -> f64 + Sync + 'static,
        s_max: f64,
        t_max: f64,
    ) -> Self {
        Self {
            h_of_s: Box::new(h_of_s),
            schedule: Box::new(schedule),
            s_max,
            t_max,
        }
    }
}

/// Discretize a continuous sweep into step unitaries over the time grid
/// `0 < t_1 < ... < t_L = T_max` (the starting point `t_0 = 0` is implicit).
///
/// Each step evolves under the frozen midpoint value
/// `s_l = [s(t_{l-1}) + s(t_l)] / 2`:
/// `U_l = exp(-i H(s_l) (t_l - t_{l-1}))`. The product `U_L ... U_1` applied
/// to the ground state of `H(0)` converges to the continuous-time final
/// state as the grid refines.
pub fn discretize_saqc(p: &SaqcProblem, t_grid: &[f64]) -> Result<Vec<CMatrix>> {
    if t_grid.is_empty() {
        return Err(Error::BadGrid("empty time grid".into()));
    }
    if t_grid[0] <= 0.0 {
        return Err(Error::BadGrid(format!(
            "first grid time {} must be positive (t_0 = 0 is implicit)",
            t_grid[0]
        )));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::BadGrid(format!(
                "grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    let last = *t_grid.last().unwrap();
    if (last - p.t_max).abs() > 1e-12 * p.t_max.abs().max(1.0) {
        return Err(Error::BadGrid(format!(
            "grid must end at T_max = {}, got {last}",
            p.t_max
        )));
    }

    let mut ops = Vec::with_capacity(t_grid.len());
    let mut t_prev = 0.0;
    for &t in t_grid {
        let s_mid = 0.5 * ((p.schedule)(t_prev) + (p.schedule)(t));
        let h = (p.h_of_s)(s_mid);
        ops.push(crate::numerics::exp_hermitian(&h, t - t_prev)?);
        t_prev = t;
    }
    Ok(ops)
}

/// Uniform time grid `t_l = T_max * l / L`, `l = 1..=L`.
pub fn uniform_time_grid(t_max: f64, l: usize) -> Vec<f64> {
    (1..=l).map(|k| t_max * k as f64 / l as f64).collect()
}
