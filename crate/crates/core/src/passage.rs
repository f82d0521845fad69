//! Discrete adiabatic passages: iterate `U_{s_1} ... U_{s_L}` over a
//! schedule of kick strengths, measure how far the final state lands from
//! the target, and search for the running time `L(epsilon)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::floquet::FloquetMap;
use crate::numerics::{CVector, TOL_NORMALIZED};

/// Default cap for the running-time search.
pub const RUNNING_TIME_CAP: usize = 1 << 22;

/// A monotone grid of kick strengths `{s_l}`, `s_0 = 0` up to `s_max`.
#[derive(Debug, Clone)]
pub struct Schedule {
    values: Vec<f64>,
}

impl Schedule {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::BadGrid("empty schedule".into()));
        }
        if values[0] != 0.0 {
            return Err(Error::BadGrid(format!(
                "schedule must start at exactly 0, got {}",
                values[0]
            )));
        }
        for w in values.windows(2) {
            if w[1] < w[0] {
                return Err(Error::BadGrid(format!(
                    "schedule decreases from {} to {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { values })
    }

    /// Number of map applications (`len - 1`; `s_0` is never applied).
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn s_max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Uniform schedule `s_l = s_max l / L`.
pub fn linear_schedule(s_max: f64, l: usize) -> Schedule {
    assert!(l >= 1, "need at least one step");
    let values = (0..=l).map(|k| s_max * (k as f64 / l as f64)).collect();
    Schedule::new(values).expect("linear grid is monotone")
}

/// Result of one passage run.
#[derive(Debug, Clone)]
pub struct PassageResult {
    pub final_state: CVector,
    /// `sqrt(1 - |<target|Psi_L>|^2)`: operator-norm distance between the
    /// final and target pure-state projectors. Global phase never enters.
    pub error: f64,
    pub steps: usize,
    /// `|<target|Psi_l>|` after each applied step, when requested.
    pub overlap_history: Option<Vec<f64>>,
}

/// Apply `U_{s_L} ... U_{s_1}` to `psi0` and compare against `target`.
pub fn run_passage(
    map: &impl FloquetMap,
    schedule: &Schedule,
    psi0: &CVector,
    target: &CVector,
    record_history: bool,
) -> Result<PassageResult> {
    psi0.check_normalized(TOL_NORMALIZED)?;
    target.check_normalized(TOL_NORMALIZED)?;
    assert_eq!(psi0.dim(), map.dim(), "initial state dimension mismatch");
    assert_eq!(target.dim(), map.dim(), "target state dimension mismatch");

    let mut psi = psi0.clone();
    let mut history = record_history.then(|| Vec::with_capacity(schedule.steps()));
    for &s in &schedule.values()[1..] {
        psi = map.apply(s, &psi);
        // each application is unitary up to rounding; rescaling here keeps
        // million-step passages from accumulating norm drift
        let norm = psi.norm();
        psi = psi.scaled(Complex64::new(1.0 / norm, 0.0));
        if let Some(h) = history.as_mut() {
            h.push(target.inner(&psi).norm());
        }
    }
    let overlap_sq = target.inner(&psi).norm_sqr().min(1.0);
    Ok(PassageResult {
        final_state: psi,
        error: (1.0 - overlap_sq).sqrt(),
        steps: schedule.steps(),
        overlap_history: history,
    })
}

// ---------------------------------------------------------------------------
// Gap-adapted schedules
// ---------------------------------------------------------------------------

/// Schedule family with increments `Δs ∝ gap(s)^exponent`, precomputed once
/// from a fine cumulative table of `gap^{-exponent}` and inverted per `L`.
pub struct GapAdaptedFamily {
    s_grid: Vec<f64>,
    cumulative: Vec<f64>,
    s_max: f64,
}

impl GapAdaptedFamily {
    pub fn new(
        gap_fn: impl Fn(f64) -> f64,
        s_max: f64,
        exponent: f64,
        fine_grid: usize,
    ) -> Result<Self> {
        assert!(s_max > 0.0 && fine_grid >= 2);
        let m = fine_grid;
        let s_grid: Vec<f64> = (0..=m).map(|j| s_max * j as f64 / m as f64).collect();
        let density: Vec<f64> = s_grid
            .iter()
            .map(|&s| {
                let g = gap_fn(s);
                if g <= 0.0 {
                    return Err(Error::NonpositiveGap { s, value: g });
                }
                Ok(g.powf(-exponent))
            })
            .collect::<Result<_>>()?;
        let mut cumulative = Vec::with_capacity(m + 1);
        cumulative.push(0.0);
        for j in 1..=m {
            let step = (s_grid[j] - s_grid[j - 1]) * 0.5 * (density[j] + density[j - 1]);
            cumulative.push(cumulative[j - 1] + step);
        }
        Ok(Self {
            s_grid,
            cumulative,
            s_max,
        })
    }

    /// The schedule with `L` steps: invert the cumulative table at `L + 1`
    /// equally spaced levels.
    pub fn schedule(&self, l: usize) -> Schedule {
        assert!(l >= 1);
        let total = *self.cumulative.last().unwrap();
        let mut values = Vec::with_capacity(l + 1);
        values.push(0.0);
        let mut j = 0usize;
        for k in 1..l {
            let level = total * k as f64 / l as f64;
            while self.cumulative[j + 1] < level {
                j += 1;
            }
            let (c0, c1) = (self.cumulative[j], self.cumulative[j + 1]);
            let frac = if c1 > c0 { (level - c0) / (c1 - c0) } else { 0.0 };
            values.push(self.s_grid[j] + frac * (self.s_grid[j + 1] - self.s_grid[j]));
        }
        values.push(self.s_max);
        Schedule::new(values).expect("cumulative inversion is monotone")
    }
}

/// One-shot gap-adapted schedule: step density `gap(s)^{-exponent}`,
/// exponent 2 by default (the local adiabatic choice).
pub fn roland_cerf_schedule(
    gap_fn: impl Fn(f64) -> f64,
    s_max: f64,
    l: usize,
    exponent: f64,
) -> Result<Schedule> {
    let family = GapAdaptedFamily::new(gap_fn, s_max, exponent, 1 << 16)?;
    Ok(family.schedule(l))
}

// ---------------------------------------------------------------------------
// Running time
// ---------------------------------------------------------------------------

/// Minimal `L` with `error(L) < epsilon` for the given schedule family.
///
/// Doubles `L` until two consecutive ladder levels succeed (oscillatory
/// non-adiabatic ripple can make a single success misleading), then bisects
/// between the last failure and the first of the two successes. Returns the
/// smallest tested `L` that met the bound.
pub fn running_time(
    map: &impl FloquetMap,
    schedule_family: impl Fn(usize) -> Schedule,
    psi0: &CVector,
    target: &CVector,
    epsilon: f64,
    cap: usize,
) -> Result<usize> {
    assert!(epsilon > 0.0, "epsilon must be positive");
    if epsilon >= 1.0 {
        // the error metric never exceeds 1
        return Ok(1);
    }
    let err_at = |l: usize| -> Result<f64> {
        let schedule = schedule_family(l);
        Ok(run_passage(map, &schedule, psi0, target, false)?.error)
    };

    let mut last_fail = 0usize;
    let mut prev_success: Option<usize> = None;
    let mut l = 1usize;
    let (lo, hi) = loop {
        if l > cap {
            return Err(Error::NotConverged { cap });
        }
        if err_at(l)? < epsilon {
            if let Some(first) = prev_success {
                break (last_fail, first);
            }
            prev_success = Some(l);
        } else {
            last_fail = l;
            prev_success = None;
        }
        l *= 2;
    };

    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if err_at(mid)? < epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::FloquetSystem;
    use crate::numerics::{CMatrix, CVector};
    use std::f64::consts::PI;

    fn optimal_two_level(e_p: f64) -> FloquetSystem {
        let h0 = CMatrix::diag_real(&[0.0, e_p]);
        let v = CVector::from_real(&[1.0, 1.0]).normalized();
        FloquetSystem::new(h0, v, 1.0).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::new(vec![]).is_err());
        assert!(Schedule::new(vec![0.1, 0.2]).is_err());
        assert!(Schedule::new(vec![0.0, 0.5, 0.4]).is_err());
        let s = Schedule::new(vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(s.steps(), 2);
        assert_eq!(s.s_max(), 1.0);
    }

    #[test]
    fn linear_schedule_quarters() {
        let s = linear_schedule(2.0 * PI, 4);
        let expected = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0, 2.0 * PI];
        for (a, b) in s.values().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn stationary_passage_has_zero_error() {
        let sys = optimal_two_level(2.0 * PI / 3.0);
        // constant schedule at s = 0: |0> is an eigenstate of U_0
        let sched = Schedule::new(vec![0.0; 33]).unwrap();
        let psi0 = CVector::basis(2, 0);
        let res = run_passage(&sys, &sched, &psi0, &psi0, false).unwrap();
        assert!(res.error < 1e-10);
        // final state equals psi0 up to a phase
        assert!((res.final_state.inner(&psi0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sudden_single_kick_misses_orthogonal_target() {
        let sys = optimal_two_level(2.0 * PI / 3.0);
        let sched = linear_schedule(2.0 * PI, 1);
        let res = run_passage(
            &sys,
            &sched,
            &CVector::basis(2, 0),
            &CVector::basis(2, 1),
            false,
        )
        .unwrap();
        assert!((res.error - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_model_linear_passage_is_adiabatic_at_l_2000() {
        let sys = optimal_two_level(2.0 * PI / 3.0);
        let sched = linear_schedule(2.0 * PI, 2000);
        let res = run_passage(
            &sys,
            &sched,
            &CVector::basis(2, 0),
            &CVector::basis(2, 1),
            false,
        )
        .unwrap();
        assert!(res.error <= 1e-2, "error {}", res.error);
        // the ten-fold finer reference is converged as well
        let fine = run_passage(
            &sys,
            &linear_schedule(2.0 * PI, 20_000),
            &CVector::basis(2, 0),
            &CVector::basis(2, 1),
            false,
        )
        .unwrap();
        assert!(fine.error <= res.error.max(1e-6));
    }

    #[test]
    fn norm_is_conserved_along_the_way() {
        let sys = optimal_two_level(2.0 * PI / 3.0);
        let sched = linear_schedule(2.0 * PI, 500);
        let psi0 = CVector::basis(2, 0);
        let mut psi = psi0.clone();
        for &s in &sched.values()[1..] {
            psi = crate::floquet::FloquetMap::apply(&sys, s, &psi);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn error_decays_with_doubling() {
        let sys = optimal_two_level(2.0 * PI / 3.0);
        let psi0 = CVector::basis(2, 0);
        let target = CVector::basis(2, 1);
        let mut l = 64usize;
        let mut prev = f64::INFINITY;
        while l <= 1 << 16 {
            let res =
                run_passage(&sys, &linear_schedule(2.0 * PI, l), &psi0, &target, false).unwrap();
            assert!(res.error <= prev + 1e-3, "error grew at L = {l}");
            prev = res.error;
            l *= 2;
        }
        assert!(prev < 1e-3, "error at L = 2^16 is {prev}");
    }

    #[test]
    fn constant_gap_reduces_roland_cerf_to_linear() {
        let sched = roland_cerf_schedule(|_| 0.4, 2.0 * PI, 17, 2.0).unwrap();
        let lin = linear_schedule(2.0 * PI, 17);
        for (a, b) in sched.values().iter().zip(lin.values()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn roland_cerf_rejects_nonpositive_gap() {
        let res = roland_cerf_schedule(|s| s - 1.0, 2.0 * PI, 8, 2.0);
        assert!(matches!(res, Err(Error::NonpositiveGap { .. })));
    }

    #[test]
    fn gap_adapted_schedule_concentrates_steps_at_small_gap() {
        // gap dips near s = 2: most steps should land there
        let gap = |s: f64| 0.05 + (s - 2.0) * (s - 2.0);
        let sched = roland_cerf_schedule(gap, 4.0, 100, 2.0).unwrap();
        let near: usize = sched
            .values()
            .iter()
            .filter(|&&s| (s - 2.0).abs() < 0.5)
            .count();
        assert!(near > 60, "only {near} of 101 points near the dip");
    }

    #[test]
    fn running_time_degenerate_epsilon() {
        let sys = optimal_two_level(2.0 * PI / 3.0);
        let l = running_time(
            &sys,
            |l| linear_schedule(2.0 * PI, l),
            &CVector::basis(2, 0),
            &CVector::basis(2, 1),
            1.0,
            RUNNING_TIME_CAP,
        )
        .unwrap();
        assert_eq!(l, 1);
    }

    #[test]
    fn running_time_finds_minimal_l() {
        let sys = optimal_two_level(2.0 * PI / 3.0);
        let psi0 = CVector::basis(2, 0);
        let target = CVector::basis(2, 1);
        let eps = 0.05;
        let l = running_time(
            &sys,
            |l| linear_schedule(2.0 * PI, l),
            &psi0,
            &target,
            eps,
            RUNNING_TIME_CAP,
        )
        .unwrap();
        let at = run_passage(&sys, &linear_schedule(2.0 * PI, l), &psi0, &target, false)
            .unwrap()
            .error;
        assert!(at < eps);
        if l > 1 {
            let below = run_passage(
                &sys,
                &linear_schedule(2.0 * PI, l - 1),
                &psi0,
                &target,
                false,
            )
            .unwrap()
            .error;
            assert!(below >= eps, "L - 1 = {} already meets the bound", l - 1);
        }
    }

    #[test]
    fn running_time_independent_of_embedding_dimension() {
        // the same 2x2 block padded with far-away spectator levels must give
        // the same running time
        let e_p = 2.0 * PI / 3.0;
        let mut results = Vec::new();
        for extra in [0usize, 4, 12] {
            let dim = 2 + extra;
            let mut diag = vec![0.0, e_p];
            for k in 0..extra {
                diag.push(3.0 + 0.37 * k as f64);
            }
            let h0 = CMatrix::diag_real(&diag);
            let mut v = CVector::zeros(dim);
            v.entries[0] = crate::numerics::c64(1.0 / 2.0f64.sqrt(), 0.0);
            v.entries[1] = crate::numerics::c64(1.0 / 2.0f64.sqrt(), 0.0);
            let sys = FloquetSystem::new(h0, v, 0.7).unwrap();
            let l = running_time(
                &sys,
                |l| linear_schedule(2.0 * PI, l),
                &CVector::basis(dim, 0),
                &CVector::basis(dim, 1),
                0.01,
                RUNNING_TIME_CAP,
            )
            .unwrap();
            results.push(l);
        }
        assert!(results.windows(2).all(|w| w[0] == w[1]), "{results:?}");
    }

    #[test]
    fn landau_zener_scaling_of_running_time() {
        // two-level model with shrinking kick-vector weight: the minimum gap
        // scales like b, and the L needed for fixed error like gap^{-2}
        let e2 = 2.0 * PI / 3.0;
        let mut points = Vec::new();
        for &b in &[0.20, 0.10, 0.05, 0.025] {
            let a = (1.0f64 - b * b).sqrt();
            let h0 = CMatrix::diag_real(&[0.0, e2]);
            let v = CVector::from_real(&[a, b]);
            let sys = FloquetSystem::new(h0, v, 1.0).unwrap();
            let curves = crate::spectral::track_curves(&sys, 0.0, 2.0 * PI, 801).unwrap();
            let gap = crate::spectral::min_gap(&sys, &curves, 0).min_gap;
            let l = running_time(
                &sys,
                |l| linear_schedule(2.0 * PI, l),
                &CVector::basis(2, 0),
                &CVector::basis(2, 1),
                0.1,
                RUNNING_TIME_CAP,
            )
            .unwrap();
            points.push((gap.ln(), (l as f64).ln()));
        }
        let slope = fit_slope(&points);
        assert!(
            (slope + 2.0).abs() <= 0.2,
            "running time vs gap slope {slope}, expected -2 +/- 0.2"
        );
    }

    pub(crate) fn fit_slope(points: &[(f64, f64)]) -> f64 {
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }
}
