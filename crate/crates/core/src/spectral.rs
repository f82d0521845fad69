//! Eigenangle curve continuation over the kick strength `s`.
//!
//! Levels of `U_0` whose eigenvectors do not overlap the kick vector are
//! untouched by the kick, so their eigenangles stay put for every `s`; they
//! are segregated up front as flat "spectator" curves and excluded from
//! matching. The rest of the dynamics lives in the span of the per-level
//! components of `|v>`, where `U_s` reduces to a small
//! `diag(exp(-i theta_i)) * (1 + (exp(-is)-1) c c^T)` block with real
//! non-negative coefficients `c_i`. Curves are continued through `s` by
//! greedy maximum-overlap matching of eigenvectors between neighbouring
//! grid points, with local grid bisection wherever the overlap drops below
//! threshold, and branch lifting keeps each tracked angle continuous instead
//! of jumping back into `[0, 2pi)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::floquet::FloquetSystem;
use crate::numerics::{eig_unitary, CMatrix, CVector};

/// Overlap threshold below which a continuation step is bisected.
const OVERLAP_THRESHOLD: f64 = 0.7;
/// Maximum local bisection depth before tracking gives up.
const MAX_REFINEMENT_DEPTH: usize = 12;
/// Eigenvector components of `|v>` below this count as exactly zero.
const SPECTATOR_THRESHOLD: f64 = 1e-12;
/// Angles of `U_0` closer than this (circularly) form one degenerate level.
const LEVEL_CLUSTER_THRESHOLD: f64 = 1e-12;
/// Target bracket width for the gap-minimum refinement.
const GAP_REFINE_DS: f64 = 1e-6;

/// One point of a tracked curve.
#[derive(Debug, Clone)]
pub struct CurveSample {
    pub s: f64,
    /// Branch-lifted eigenangle (continuous in `s`, not wrapped).
    pub theta: f64,
    pub vector: CVector,
    /// `|<v|xi(s)>|`.
    pub overlap_v: f64,
}

/// A continuation-tracked eigenangle branch.
#[derive(Debug, Clone)]
pub struct EigenangleCurve {
    pub samples: Vec<CurveSample>,
    /// Winding count accumulated by the lift at the final sample.
    pub branch_offset: i64,
    /// Flat curve from a level with no overlap with the kick vector.
    pub spectator: bool,
}

impl EigenangleCurve {
    pub fn theta_start(&self) -> f64 {
        self.samples.first().expect("curve has samples").theta
    }

    pub fn theta_end(&self) -> f64 {
        self.samples.last().expect("curve has samples").theta
    }
}

/// Location and size of the smallest eigenangle gap found along a scan.
#[derive(Debug, Clone)]
pub struct GapReport {
    /// Minimum circular eigenangle distance, in radians.
    pub min_gap: f64,
    pub s_at_min: f64,
    /// `(target curve, closest other curve)` indices into the tracked list.
    pub curve_index_pair: (usize, usize),
}

/// Circular distance between two angles.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn wrap_to_half_open(delta: f64) -> f64 {
    // map to (-pi, pi]
    let d = delta.rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}

// ---------------------------------------------------------------------------
// Reduction onto the kick-coupled subspace
// ---------------------------------------------------------------------------

struct Reduction {
    /// Orthonormal basis of the coupled subspace (one column per coupled
    /// level of `U_0`), in the full space.
    q_basis: Vec<CVector>,
    /// Overlap of `|v>` with each basis vector; real and positive by
    /// construction of `q_basis`.
    coeffs: Vec<f64>,
    /// Eigenangles of `U_0` on the coupled levels.
    angles: Vec<f64>,
    /// Flat levels: `(eigenangle, eigenvector)`.
    spectators: Vec<(f64, CVector)>,
}

impl Reduction {
    fn active_dim(&self) -> usize {
        self.q_basis.len()
    }

    /// Restricted `U_s` on the coupled subspace.
    fn restricted_operator(&self, s: f64) -> CMatrix {
        let k = self.active_dim();
        let f = Complex64::from_polar(1.0, -s) - Complex64::new(1.0, 0.0);
        CMatrix::from_fn(k, k, |i, j| {
            let mut x = f * self.coeffs[i] * self.coeffs[j];
            if i == j {
                x += Complex64::new(1.0, 0.0);
            }
            Complex64::from_polar(1.0, -self.angles[i]) * x
        })
    }

    fn overlap_with_v(&self, restricted: &CVector) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, x) in self.coeffs.iter().zip(&restricted.entries) {
            acc += Complex64::new(*c, 0.0) * x;
        }
        acc.norm()
    }

    fn lift_to_full(&self, restricted: &CVector) -> CVector {
        let dim = self.q_basis[0].dim();
        let mut out = CVector::zeros(dim);
        for (q, x) in self.q_basis.iter().zip(&restricted.entries) {
            out.axpy(*x, q);
        }
        out
    }

    fn restrict(&self, full: &CVector) -> CVector {
        CVector::new(self.q_basis.iter().map(|q| q.inner(full)).collect())
    }
}

fn build_reduction(sys: &FloquetSystem) -> Reduction {
    let ed = sys.h0_eigendecomposition();
    let t = sys.period();
    let n = ed.dim();
    let angles: Vec<f64> = ed.values.iter().map(|l| (l * t).rem_euclid(2.0 * PI)).collect();

    // group levels that coincide on the circle
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(c) if circular_distance(angles[*c.last().unwrap()], angles[i]) < LEVEL_CLUSTER_THRESHOLD => {
                c.push(i)
            }
            _ => clusters.push(vec![i]),
        }
    }
    if clusters.len() > 1 {
        let first = clusters.first().unwrap()[0];
        let last = *clusters.last().unwrap().last().unwrap();
        if circular_distance(angles[first], angles[last]) < LEVEL_CLUSTER_THRESHOLD {
            let tail = clusters.pop().unwrap();
            clusters[0].extend(tail);
        }
    }

    let v = sys.v();
    let mut q_basis = Vec::new();
    let mut coeffs = Vec::new();
    let mut active_angles = Vec::new();
    let mut spectators = Vec::new();

    for cluster in clusters {
        let members: Vec<CVector> = cluster.iter().map(|&i| ed.vector(i)).collect();
        let angle = angles[cluster[0]];
        // component of |v> inside this eigenspace
        let mut p = CVector::zeros(n);
        for w in &members {
            p.axpy(w.inner(v), w);
        }
        let weight = p.norm();
        if weight < SPECTATOR_THRESHOLD {
            for (w, &i) in members.iter().zip(&cluster) {
                spectators.push((angles[i], w.clone()));
            }
            continue;
        }
        let q = p.scaled(Complex64::new(1.0 / weight, 0.0));
        // complete the eigenspace with vectors orthogonal to q; those stay flat
        let mut residuals: Vec<CVector> = members
            .iter()
            .map(|w| {
                let mut r = w.clone();
                r.axpy(-q.inner(w), &q);
                r
            })
            .collect();
        let mut accepted: Vec<CVector> = Vec::new();
        for _ in 1..members.len() {
            let (best, _) = residuals
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r.norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("cluster has remaining members");
            let b = residuals.swap_remove(best);
            let b = b.normalized();
            for r in residuals.iter_mut() {
                r.axpy(-b.inner(r), &b);
            }
            accepted.push(b);
        }
        for w in accepted {
            spectators.push((angle, w));
        }
        q_basis.push(q);
        coeffs.push(weight);
        active_angles.push(angle);
    }

    Reduction {
        q_basis,
        coeffs,
        angles: active_angles,
        spectators,
    }
}

// ---------------------------------------------------------------------------
// Tracking
// ---------------------------------------------------------------------------

struct ActiveState {
    s: f64,
    thetas: Vec<f64>,
    vectors: Vec<CVector>, // restricted coordinates
}

/// Greedy maximum-overlap assignment between two eigenvector sets.
/// Returns `perm[i] = j` meaning previous curve `i` continues as new column
/// `j`, together with the smallest assigned overlap.
fn greedy_match(prev: &[CVector], next: &[CVector]) -> (Vec<usize>, f64) {
    let k = prev.len();
    let mut overlap = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            overlap[i][j] = prev[i].inner(&next[j]).norm();
        }
    }
    let mut perm = vec![usize::MAX; k];
    let mut row_used = vec![false; k];
    let mut col_used = vec![false; k];
    let mut min_overlap = f64::INFINITY;
    for _ in 0..k {
        let mut best = (0, 0, -1.0);
        for i in 0..k {
            if row_used[i] {
                continue;
            }
            for j in 0..k {
                if col_used[j] {
                    continue;
                }
                if overlap[i][j] > best.2 {
                    best = (i, j, overlap[i][j]);
                }
            }
        }
        let (i, j, ov) = best;
        perm[i] = j;
        row_used[i] = true;
        col_used[j] = true;
        min_overlap = min_overlap.min(ov);
    }
    (perm, min_overlap)
}

fn eig_restricted(reduction: &Reduction, s: f64) -> Result<crate::numerics::EigenDecomposition> {
    eig_unitary(&reduction.restricted_operator(s))
}

/// Track all eigenangle curves of `U_s` from `s_from` to `s_to`.
///
/// `n_samples` sets the initial uniform grid; segments where the
/// eigenvector overlap between neighbouring points falls below 0.7 are
/// bisected (up to 12 levels) and the extra points become part of every
/// curve. A refinement cap hit means two coupled levels truly touch and is
/// reported as `TrackingFailure`.
pub fn track_curves(
    sys: &FloquetSystem,
    s_from: f64,
    s_to: f64,
    n_samples: usize,
) -> Result<Vec<EigenangleCurve>> {
    let reduction = build_reduction(sys);
    let k = reduction.active_dim();

    let frozen = s_to == s_from;
    if !frozen {
        assert!(n_samples >= 2, "need at least two samples to track a span");
    }
    let grid: Vec<f64> = if frozen {
        vec![s_from]
    } else {
        (0..n_samples)
            .map(|j| s_from + (s_to - s_from) * j as f64 / (n_samples - 1) as f64)
            .collect()
    };

    let ed0 = eig_restricted(&reduction, s_from)?;
    let mut state = ActiveState {
        s: s_from,
        thetas: ed0.values.clone(),
        vectors: (0..k).map(|j| ed0.vector(j)).collect(),
    };

    // per-curve sample storage, plus the shared list of committed s values
    let mut committed_s = vec![s_from];
    let mut tracks: Vec<Vec<(f64, CVector)>> = (0..k)
        .map(|j| vec![(state.thetas[j], state.vectors[j].clone())])
        .collect();

    for &s_target in grid.iter().skip(1) {
        advance(
            &reduction,
            &mut state,
            s_target,
            0,
            &mut committed_s,
            &mut tracks,
        )?;
    }

    let mut curves: Vec<EigenangleCurve> = Vec::with_capacity(sys.dim());
    for (j, track) in tracks.into_iter().enumerate() {
        let _ = j;
        let samples: Vec<CurveSample> = committed_s
            .iter()
            .zip(&track)
            .map(|(&s, (theta, vec))| CurveSample {
                s,
                theta: *theta,
                overlap_v: reduction.overlap_with_v(vec),
                vector: reduction.lift_to_full(vec),
            })
            .collect();
        let theta_end = samples.last().unwrap().theta;
        curves.push(EigenangleCurve {
            samples,
            branch_offset: ((theta_end - theta_end.rem_euclid(2.0 * PI)) / (2.0 * PI)).round()
                as i64,
            spectator: false,
        });
    }
    for (angle, vector) in &reduction.spectators {
        let samples: Vec<CurveSample> = committed_s
            .iter()
            .map(|&s| CurveSample {
                s,
                theta: *angle,
                vector: vector.clone(),
                overlap_v: 0.0,
            })
            .collect();
        curves.push(EigenangleCurve {
            samples,
            branch_offset: 0,
            spectator: true,
        });
    }

    curves.sort_by(|a, b| {
        a.theta_start()
            .total_cmp(&b.theta_start())
            .then(a.spectator.cmp(&b.spectator))
    });
    Ok(curves)
}

fn advance(
    reduction: &Reduction,
    state: &mut ActiveState,
    s_target: f64,
    depth: usize,
    committed_s: &mut Vec<f64>,
    tracks: &mut [Vec<(f64, CVector)>],
) -> Result<()> {
    let ed = eig_restricted(reduction, s_target)?;
    let k = reduction.active_dim();
    let next: Vec<CVector> = (0..k).map(|j| ed.vector(j)).collect();
    let (perm, min_overlap) = greedy_match(&state.vectors, &next);

    if min_overlap < OVERLAP_THRESHOLD {
        if depth >= MAX_REFINEMENT_DEPTH {
            return Err(Error::TrackingFailure { s: s_target });
        }
        let mid = 0.5 * (state.s + s_target);
        advance(reduction, state, mid, depth + 1, committed_s, tracks)?;
        return advance(reduction, state, s_target, depth + 1, committed_s, tracks);
    }

    for i in 0..k {
        let j = perm[i];
        let lifted = state.thetas[i] + wrap_to_half_open(ed.values[j] - state.thetas[i]);
        state.thetas[i] = lifted;
        state.vectors[i] = next[j].clone();
        tracks[i].push((lifted, next[j].clone()));
    }
    state.s = s_target;
    committed_s.push(s_target);
    Ok(())
}

/// Net branch-lifted angle change over a full kick-strength period.
/// Requires the curve to span exactly `s: 0 -> 2pi`.
pub fn detect_anholonomy(curve: &EigenangleCurve) -> Result<f64> {
    let first = curve.samples.first().ok_or_else(|| Error::BadSpan("empty curve".into()))?;
    let last = curve.samples.last().unwrap();
    if first.s.abs() > 1e-9 || (last.s - 2.0 * PI).abs() > 1e-9 {
        return Err(Error::BadSpan(format!(
            "curve spans [{}, {}], need [0, 2pi]",
            first.s, last.s
        )));
    }
    Ok(last.theta - first.theta)
}

// ---------------------------------------------------------------------------
// Minimum gap
// ---------------------------------------------------------------------------

/// Smallest circular eigenangle distance between the target curve and any
/// other curve, minimized over the scanned `s` range. The grid minimum is
/// refined by golden-section search down to a bracket of `1e-6` in `s`.
pub fn min_gap(sys: &FloquetSystem, curves: &[EigenangleCurve], target_index: usize) -> GapReport {
    assert!(curves.len() >= 2, "need at least two curves for a gap");
    assert!(target_index < curves.len(), "target index out of range");
    let n_samples = curves[target_index].samples.len();

    // scan the common grid
    let mut best = (f64::INFINITY, 0usize, target_index);
    for k in 0..n_samples {
        let th = curves[target_index].samples[k].theta;
        for (ci, c) in curves.iter().enumerate() {
            if ci == target_index {
                continue;
            }
            let d = circular_distance(th, c.samples[k].theta);
            if d < best.0 {
                best = (d, k, ci);
            }
        }
    }
    let (grid_gap, k_min, grid_other) = best;
    if n_samples < 2 {
        return GapReport {
            min_gap: grid_gap,
            s_at_min: curves[target_index].samples[k_min].s,
            curve_index_pair: (target_index, grid_other),
        };
    }

    let reduction = build_reduction(sys);
    let lo = curves[target_index].samples[k_min.saturating_sub(1)].s;
    let hi = curves[target_index].samples[(k_min + 1).min(n_samples - 1)].s;
    let near = &curves[target_index].samples[k_min];
    let target_restricted = if curves[target_index].spectator {
        None
    } else {
        Some(reduction.restrict(&near.vector))
    };

    let other_infos: Vec<(usize, Option<CVector>, f64)> = curves
        .iter()
        .enumerate()
        .filter(|(ci, _)| *ci != target_index)
        .map(|(ci, c)| {
            let restricted = if c.spectator {
                None
            } else {
                Some(reduction.restrict(&c.samples[k_min].vector))
            };
            (ci, restricted, c.samples[k_min].theta)
        })
        .collect();

    let evaluate = |s: f64| -> (f64, usize) {
        let ed = eig_restricted(&reduction, s).expect("restricted operator stays unitary");
        let k = reduction.active_dim();
        let vecs: Vec<CVector> = (0..k).map(|j| ed.vector(j)).collect();
        let target_angle = match &target_restricted {
            Some(tr) => {
                let j = (0..k)
                    .max_by(|&a, &b| {
                        tr.inner(&vecs[a]).norm().total_cmp(&tr.inner(&vecs[b]).norm())
                    })
                    .unwrap();
                ed.values[j]
            }
            None => near.theta,
        };
        let mut out = (f64::INFINITY, target_index);
        for (ci, restricted, flat_theta) in &other_infos {
            let angle = match restricted {
                Some(r) => {
                    let j = (0..k)
                        .max_by(|&a, &b| {
                            r.inner(&vecs[a]).norm().total_cmp(&r.inner(&vecs[b]).norm())
                        })
                        .unwrap();
                    ed.values[j]
                }
                None => *flat_theta,
            };
            let d = circular_distance(target_angle, angle);
            if d < out.0 {
                out = (d, *ci);
            }
        }
        out
    };

    // golden-section refinement of the bracket
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = evaluate(x1);
    let mut f2 = evaluate(x2);
    let mut best_pt = if f1.0 < f2.0 { (f1.0, x1, f1.1) } else { (f2.0, x2, f2.1) };
    while b - a > GAP_REFINE_DS {
        if f1.0 < f2.0 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = evaluate(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = evaluate(x2);
        }
        let cand = if f1.0 < f2.0 { (f1.0, x1, f1.1) } else { (f2.0, x2, f2.1) };
        if cand.0 < best_pt.0 {
            best_pt = cand;
        }
    }
    // endpoints can host boundary minima the interior search never visits
    for s in [lo, hi] {
        let f = evaluate(s);
        if f.0 < best_pt.0 {
            best_pt = (f.0, s, f.1);
        }
    }

    if best_pt.0 <= grid_gap {
        GapReport {
            min_gap: best_pt.0,
            s_at_min: best_pt.1,
            curve_index_pair: (target_index, best_pt.2),
        }
    } else {
        GapReport {
            min_gap: grid_gap,
            s_at_min: curves[target_index].samples[k_min].s,
            curve_index_pair: (target_index, grid_other),
        }
    }
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Write tracked curves in the long CSV layout
/// `s,curve_id,theta_lifted,theta_mod2pi,overlap_with_v`.
pub fn write_curves_csv<W: std::io::Write>(
    out: &mut W,
    curves: &[EigenangleCurve],
) -> std::io::Result<()> {
    writeln!(out, "s,curve_id,theta_lifted,theta_mod2pi,overlap_with_v")?;
    for (id, curve) in curves.iter().enumerate() {
        for sample in &curve.samples {
            writeln!(
                out,
                "{:.16e},{},{:.16e},{:.16e},{:.16e}",
                sample.s,
                id,
                sample.theta,
                sample.theta.rem_euclid(2.0 * PI),
                sample.overlap_v
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c64, eig_unitary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_level(e2: f64, a: f64, b: f64, t: f64) -> FloquetSystem {
        let h0 = CMatrix::diag_real(&[0.0, e2]);
        let v = CVector::from_real(&[a, b]).normalized();
        FloquetSystem::new(h0, v, t).unwrap()
    }

    /// Lifted two-level eigenangles from the closed-form characteristic
    /// equation; independent oracle for the tracker.
    fn two_level_oracle(e2t: f64, a_sq: f64, s: f64) -> (f64, f64) {
        let beta = e2t / 2.0;
        let cos_big = (s / 2.0).cos() * beta.cos() + (2.0 * a_sq - 1.0) * (s / 2.0).sin() * beta.sin();
        let big = cos_big.clamp(-1.0, 1.0).acos();
        let mean = (e2t + s) / 2.0;
        (mean - big, mean + big)
    }

    #[test]
    fn spectator_curve_stays_flat() {
        // v = e0 leaves e1 untouched: its curve must not move at all
        let h0 = CMatrix::diag_real(&[0.0, 1.3, 2.1]);
        let v = CVector::basis(3, 0);
        let sys = FloquetSystem::new(h0, v, 1.0).unwrap();
        let curves = track_curves(&sys, 0.0, 2.0 * PI, 41).unwrap();
        assert_eq!(curves.len(), 3);
        let flat: Vec<_> = curves.iter().filter(|c| c.spectator).collect();
        assert_eq!(flat.len(), 2);
        for c in flat {
            let th0 = c.theta_start();
            for smp in &c.samples {
                assert!((smp.theta - th0).abs() < 1e-14);
            }
        }
        // the coupled level winds up by a full period: e0 is alone in its
        // block, so its angle grows by exactly s
        let active = curves.iter().find(|c| !c.spectator).unwrap();
        assert!((active.theta_end() - active.theta_start() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn two_level_anholonomy_shift_is_e2_t() {
        let e2 = 2.0 * PI / 3.0;
        for (a, b) in [(1.0, 1.0), (0.3, 0.7), (0.9, 0.1)] {
            let sys = two_level(e2, a, b, 1.0);
            let curves = track_curves(&sys, 0.0, 2.0 * PI, 201).unwrap();
            let ground = curves
                .iter()
                .find(|c| c.theta_start().abs() < 1e-9)
                .expect("curve starting at angle 0");
            let shift = detect_anholonomy(ground).unwrap();
            assert!(
                (shift - e2).abs() < 1e-9,
                "anholonomy {shift} != {e2} for a={a}, b={b}"
            );
        }
    }

    #[test]
    fn anholonomy_of_flat_curve_is_zero() {
        let h0 = CMatrix::diag_real(&[0.0, 1.3]);
        let sys = FloquetSystem::new(h0, CVector::basis(2, 0), 1.0).unwrap();
        let curves = track_curves(&sys, 0.0, 2.0 * PI, 21).unwrap();
        let flat = curves.iter().find(|c| c.spectator).unwrap();
        assert_eq!(detect_anholonomy(flat).unwrap(), 0.0);
    }

    #[test]
    fn anholonomy_rejects_partial_span() {
        let sys = two_level(1.0, 1.0, 1.0, 1.0);
        let curves = track_curves(&sys, 0.0, PI, 21).unwrap();
        assert!(matches!(
            detect_anholonomy(&curves[0]),
            Err(Error::BadSpan(_))
        ));
    }

    #[test]
    fn tracked_two_level_matches_closed_form() {
        let e2 = 2.0 * PI / 3.0;
        for a_sq in [0.5f64, 5.0 / 6.0] {
            let sys = two_level(e2, a_sq.sqrt(), (1.0 - a_sq).sqrt(), 1.0);
            let curves = track_curves(&sys, 0.0, 2.0 * PI, 200).unwrap();
            let ground = curves.iter().find(|c| c.theta_start().abs() < 1e-9).unwrap();
            let excited = curves.iter().find(|c| (c.theta_start() - e2).abs() < 1e-9).unwrap();
            for (gs, es) in ground.samples.iter().zip(&excited.samples) {
                let (lo, hi) = two_level_oracle(e2, a_sq, gs.s);
                assert!((gs.theta - lo).abs() < 1e-8, "s={} {} vs {}", gs.s, gs.theta, lo);
                assert!((es.theta - hi).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn union_of_curves_reproduces_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let n = rng.gen_range(2..6);
            let h0 = crate::numerics::test_support::random_hermitian(&mut rng, n);
            let v = crate::numerics::test_support::random_unit_vector(&mut rng, n);
            let sys = FloquetSystem::new(h0, v, 0.9).unwrap();
            let curves = track_curves(&sys, 0.0, 2.0 * PI, 101).unwrap();
            let n_s = curves[0].samples.len();
            for k in (0..n_s).step_by(n_s / 7 + 1) {
                let s = curves[0].samples[k].s;
                let mut spectrum = eig_unitary(&sys.floquet_operator(s)).unwrap().values;
                for c in &curves {
                    let th = c.samples[k].theta.rem_euclid(2.0 * PI);
                    let (idx, d) = spectrum
                        .iter()
                        .enumerate()
                        .map(|(i, x)| (i, circular_distance(*x, th)))
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .expect("spectrum not exhausted");
                    assert!(d < 1e-8, "curve angle {th} missing from spectrum at s={s}");
                    spectrum.swap_remove(idx);
                }
                assert!(spectrum.is_empty());
            }
        }
    }

    #[test]
    fn shifts_sum_to_whole_periods() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..4 {
            let n = rng.gen_range(2..6);
            let h0 = crate::numerics::test_support::random_hermitian(&mut rng, n);
            let v = crate::numerics::test_support::random_unit_vector(&mut rng, n);
            let sys = FloquetSystem::new(h0, v, 0.8).unwrap();
            let curves = track_curves(&sys, 0.0, 2.0 * PI, 301).unwrap();
            let total: f64 = curves
                .iter()
                .map(|c| c.theta_end() - c.theta_start())
                .sum();
            let periods = total / (2.0 * PI);
            assert!(
                (periods - periods.round()).abs() < 1e-7,
                "total shift {total} is not a whole number of periods"
            );
        }
    }

    #[test]
    fn lifted_angles_are_monotone_when_all_levels_couple() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h0 = CMatrix::diag_real(&[0.0, 0.9, 1.7, 2.8]);
        let mut v = crate::numerics::test_support::random_unit_vector(&mut rng, 4);
        // keep every component well away from zero
        for x in v.entries.iter_mut() {
            if x.norm() < 0.3 {
                *x += c64(0.4, 0.0);
            }
        }
        let v = v.normalized();
        let sys = FloquetSystem::new(h0, v, 1.0).unwrap();
        let curves = track_curves(&sys, 0.0, 2.0 * PI, 401).unwrap();
        for c in &curves {
            assert!(!c.spectator);
            for w in c.samples.windows(2) {
                assert!(w[1].theta >= w[0].theta - 1e-9);
            }
        }
    }

    #[test]
    fn min_gap_on_frozen_diagonal() {
        let h0 = CMatrix::diag_real(&[0.0, PI]);
        let v = CVector::from_real(&[1.0, 1.0]).normalized();
        let sys = FloquetSystem::new(h0, v, 1.0).unwrap();
        let curves = track_curves(&sys, 0.0, 0.0, 2).unwrap();
        let report = min_gap(&sys, &curves, 0);
        assert!((report.min_gap - PI).abs() < 1e-12);
        assert_eq!(report.s_at_min, 0.0);
    }

    #[test]
    fn min_gap_optimal_two_level() {
        // gap(s) = min(2 Theta, 2pi - 2 Theta) is smallest at the endpoints
        let ep = 2.0 * PI / 3.0;
        let sys = two_level(ep, 1.0, 1.0, 1.0);
        let curves = track_curves(&sys, 0.0, 2.0 * PI, 201).unwrap();
        let target = curves.iter().position(|c| c.theta_start().abs() < 1e-9).unwrap();
        let report = min_gap(&sys, &curves, target);
        assert!((report.min_gap - ep).abs() < 1e-8, "gap {}", report.min_gap);
        let at_edge = report.s_at_min.abs() < 1e-3 || (report.s_at_min - 2.0 * PI).abs() < 1e-3;
        assert!(at_edge, "minimum at s = {}", report.s_at_min);
    }

    #[test]
    fn derivative_of_lifted_angle_matches_kick_overlap() {
        // closed form: d theta_- / ds = 1/2 - Theta'(s); the tracker's
        // overlap must reproduce it
        let e2 = 2.0 * PI / 3.0;
        let a_sq: f64 = 5.0 / 6.0;
        let sys = two_level(e2, a_sq.sqrt(), (1.0 - a_sq).sqrt(), 1.0);
        let curves = track_curves(&sys, 0.0, 2.0 * PI, 400).unwrap();
        let ground = curves.iter().find(|c| c.theta_start().abs() < 1e-9).unwrap();
        let beta = e2 / 2.0;
        let mut checked = 0;
        for smp in ground.samples.iter().filter(|s| s.s > 0.05 && s.s < 2.0 * PI - 0.05) {
            let s = smp.s;
            let cos_big =
                (s / 2.0).cos() * beta.cos() + (2.0 * a_sq - 1.0) * (s / 2.0).sin() * beta.sin();
            let sin_big = (1.0 - cos_big * cos_big).max(0.0).sqrt();
            let dcos = -0.5 * (s / 2.0).sin() * beta.cos()
                + 0.5 * (2.0 * a_sq - 1.0) * (s / 2.0).cos() * beta.sin();
            let theta_prime = 0.5 + dcos / sin_big;
            let overlap_sq = smp.overlap_v * smp.overlap_v;
            assert!(
                (overlap_sq - theta_prime).abs() <= 1e-5 * theta_prime.abs().max(1e-3),
                "s={s}: overlap^2 {overlap_sq} vs d theta/ds {theta_prime}"
            );
            checked += 1;
        }
        assert!(checked > 100);
    }

    #[test]
    fn csv_export_layout() {
        let sys = two_level(1.0, 1.0, 1.0, 1.0);
        let curves = track_curves(&sys, 0.0, 1.0, 3).unwrap();
        let mut buf = Vec::new();
        write_curves_csv(&mut buf, &curves).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "s,curve_id,theta_lifted,theta_mod2pi,overlap_with_v"
        );
        let body: Vec<_> = lines.collect();
        assert_eq!(body.len(), 2 * curves[0].samples.len());
        assert!(body[0].split(',').count() == 5);
    }
}
