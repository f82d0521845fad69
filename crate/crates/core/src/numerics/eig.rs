//! Hermitian and unitary eigendecomposition.
//!
//! The Hermitian solver is a cyclic complex Jacobi iteration: plane rotations
//! annihilate one off-diagonal element at a time until the off-diagonal
//! Frobenius norm drops below threshold. Unitary matrices are reduced to two
//! Hermitian problems: diagonalize `(U+U†)/2`, then split its (near-)
//! degenerate clusters with the projected `(U-U†)/(2i)`. This works because
//! a unitary is normal, so both Hermitian parts share an eigenbasis.

use num_complex::Complex64;

use super::{CMatrix, CVector, TOL_HERMITIAN, TOL_UNITARY};
use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm threshold, relative to the input scale.
const JACOBI_THRESHOLD: f64 = 1e-13;
/// Sweep cap for the Jacobi iteration.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this are treated as one degenerate cluster.
const CLUSTER_THRESHOLD: f64 = 1e-8;

/// Result of an eigendecomposition. `values` are real: eigenvalues in
/// ascending order for Hermitian input, eigenangles in `[0, 2pi)` for unitary
/// input (`U v = exp(-i theta) v`). `vectors` holds orthonormal eigenvectors
/// as columns, in the same order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> CVector {
        self.vectors.column(j)
    }
}

/// Diagonalize a Hermitian matrix.
pub fn eig_hermitian(h: &CMatrix) -> Result<EigenDecomposition> {
    assert!(h.is_square(), "eig_hermitian needs a square matrix");
    h.check_hermitian(TOL_HERMITIAN)?;
    let n = h.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }

    let mut a = h.clone();
    // symmetrize away the (sub-tolerance) Hermiticity defect so the
    // iteration works on an exactly Hermitian matrix
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let m = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = m;
            a[(j, i)] = m.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let threshold = JACOBI_THRESHOLD * a.frobenius_norm().max(1.0);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        // one last check: the final sweep may have finished the job
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() > threshold {
            return Err(Error::NoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &v.column(i));
    }
    canonicalize(&mut vectors, &values);
    Ok(EigenDecomposition { values, vectors })
}

/// One complex Jacobi rotation annihilating `a[(p, q)]`.
fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let beta = a[(p, q)];
    let babs = beta.norm();
    if babs == 0.0 {
        return;
    }
    let phase = beta / babs; // e^{i phi}
    let alpha = a[(p, p)].re;
    let delta = a[(q, q)].re;
    // annihilation condition: |b| (c^2 - s^2) + (delta - alpha) s c = 0
    let theta = (delta - alpha) / (2.0 * babs);
    let t = if theta == 0.0 {
        1.0
    } else {
        -theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.dim();
    let sp = phase * s; // s e^{i phi}
    let spc = phase.conj() * s; // s e^{-i phi}

    // A <- A U, with U the plane rotation [[c, -s e^{i phi}], [s e^{-i phi}, c]]
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * spc;
        a[(k, q)] = akq * c - akp * sp;
    }
    // A <- U† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * sp;
        a[(q, k)] = aqk * c - apk * spc;
    }
    // keep the Hermitian invariants exact
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    let m = (a[(p, q)] + a[(q, p)].conj()) * 0.5;
    a[(p, q)] = m;
    a[(q, p)] = m.conj();

    // V <- V U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * spc;
        v[(k, q)] = vkq * c - vkp * sp;
    }
}

/// Deterministic eigenvector conventions: within each near-degenerate value
/// cluster order columns by descending component magnitudes (first differing
/// component decides), then fix every column's phase so its first
/// non-negligible component is real positive.
fn canonicalize(vectors: &mut CMatrix, values: &[f64]) {
    let n = values.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end] - values[end - 1]).abs() < CLUSTER_THRESHOLD {
            end += 1;
        }
        if end - start > 1 {
            let mut cols: Vec<CVector> = (start..end).map(|j| vectors.column(j)).collect();
            cols.sort_by(|a, b| {
                for (x, y) in a.entries.iter().zip(&b.entries) {
                    let (nx, ny) = (x.norm(), y.norm());
                    if (nx - ny).abs() > 1e-9 {
                        return ny.total_cmp(&nx);
                    }
                }
                std::cmp::Ordering::Equal
            });
            for (off, col) in cols.into_iter().enumerate() {
                vectors.set_column(start + off, &col);
            }
        }
        start = end;
    }
    for j in 0..n {
        phase_fix_column(vectors, j);
    }
}

fn phase_fix_column(vectors: &mut CMatrix, j: usize) {
    let n = vectors.rows;
    for i in 0..n {
        let x = vectors[(i, j)];
        if x.norm() > 1e-9 {
            let ph = x.conj() / x.norm();
            for k in 0..n {
                vectors[(k, j)] = vectors[(k, j)] * ph;
            }
            return;
        }
    }
}

/// Diagonalize a unitary matrix; `values` are eigenangles in `[0, 2pi)` with
/// the convention `U v = exp(-i theta) v`.
pub fn eig_unitary(u: &CMatrix) -> Result<EigenDecomposition> {
    assert!(u.is_square(), "eig_unitary needs a square matrix");
    u.check_unitary(TOL_UNITARY)?;
    let n = u.dim();

    // Hermitian part has eigenvalues cos(theta); anti-Hermitian part
    // (divided by i) has eigenvalues -sin(theta).
    let c_part = CMatrix::from_fn(n, n, |i, j| (u[(i, j)] + u[(j, i)].conj()) * 0.5);
    let k_part = CMatrix::from_fn(n, n, |i, j| {
        (u[(i, j)] - u[(j, i)].conj()) / Complex64::new(0.0, 2.0)
    });

    let ec = eig_hermitian(&c_part)?;
    let mut pairs: Vec<(f64, CVector)> = Vec::with_capacity(n);

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (ec.values[end] - ec.values[end - 1]).abs() < CLUSTER_THRESHOLD {
            end += 1;
        }
        let m = end - start;
        if m == 1 {
            let v = ec.vector(start);
            let c = ec.values[start];
            let k = v.inner(&k_part.mul_vec(&v)).re;
            pairs.push((angle_from_parts(c, k), v));
        } else {
            // split the cos-degenerate cluster with the projected sin part
            let cluster: Vec<CVector> = (start..end).map(|j| ec.vector(j)).collect();
            let kproj = CMatrix::from_fn(m, m, |i, j| cluster[i].inner(&k_part.mul_vec(&cluster[j])));
            let ek = eig_hermitian(&kproj)?;
            for jj in 0..m {
                let mut w = CVector::zeros(n);
                for ii in 0..m {
                    w.axpy(ek.vectors[(ii, jj)], &cluster[ii]);
                }
                let c = w.inner(&c_part.mul_vec(&w)).re;
                let k = ek.values[jj];
                pairs.push((angle_from_parts(c, k), w));
            }
        }
        start = end;
    }

    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (j, (_, v)) in pairs.iter().enumerate() {
        vectors.set_column(j, v);
    }
    canonicalize(&mut vectors, &values);
    Ok(EigenDecomposition { values, vectors })
}

#[inline]
fn angle_from_parts(cos_theta: f64, k: f64) -> f64 {
    // k = -sin(theta); the +0.0 clears a possible negative zero
    let theta = (-k).atan2(cos_theta);
    let wrapped = theta.rem_euclid(2.0 * std::f64::consts::PI) + 0.0;
    if wrapped >= 2.0 * std::f64::consts::PI {
        0.0
    } else {
        wrapped
    }
}

/// `exp(-i H t)` for Hermitian `H`, via the eigendecomposition of `H`.
pub fn exp_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let ed = eig_hermitian(h)?;
    Ok(exp_from_decomposition(&ed, t))
}

/// `exp(-i H t)` assembled from a precomputed decomposition of `H`.
pub fn exp_from_decomposition(ed: &EigenDecomposition, t: f64) -> CMatrix {
    let n = ed.dim();
    let mut scaled = ed.vectors.clone();
    for j in 0..n {
        let ph = Complex64::from_polar(1.0, -ed.values[j] * t);
        for i in 0..n {
            scaled[(i, j)] *= ph;
        }
    }
    scaled.mul(&ed.vectors.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;
    use crate::numerics::test_support::random_hermitian;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    fn reconstruction_error_hermitian(h: &CMatrix, ed: &EigenDecomposition) -> f64 {
        let n = h.dim();
        let mut rebuilt = CMatrix::zeros(n, n);
        for j in 0..n {
            let v = ed.vector(j);
            let p = crate::numerics::projector(&v).scaled(c64(ed.values[j], 0.0));
            rebuilt = rebuilt.add(&p);
        }
        rebuilt.sub(h).max_abs()
    }

    fn reconstruction_error_unitary(u: &CMatrix, ed: &EigenDecomposition) -> f64 {
        let n = u.dim();
        let mut rebuilt = CMatrix::zeros(n, n);
        for j in 0..n {
            let v = ed.vector(j);
            let p = crate::numerics::projector(&v)
                .scaled(Complex64::from_polar(1.0, -ed.values[j]));
            rebuilt = rebuilt.add(&p);
        }
        rebuilt.sub(u).max_abs()
    }

    fn orthonormality_error(ed: &EigenDecomposition) -> f64 {
        ed.vectors
            .adjoint()
            .mul(&ed.vectors)
            .sub(&CMatrix::identity(ed.dim()))
            .max_abs()
    }

    #[test]
    fn hermitian_already_diagonal() {
        let e2 = 1.7;
        let ed = eig_hermitian(&CMatrix::diag_real(&[0.0, e2])).unwrap();
        assert_close(ed.values[0], 0.0, 1e-14);
        assert_close(ed.values[1], e2, 1e-14);
        assert_close(ed.vectors.sub(&CMatrix::identity(2)).max_abs(), 0.0, 1e-12);
    }

    #[test]
    fn hermitian_pauli_x_spectrum() {
        let x = CMatrix::from_fn(2, 2, |i, j| if i != j { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        let ed = eig_hermitian(&x).unwrap();
        assert_close(ed.values[0], -1.0, 1e-13);
        assert_close(ed.values[1], 1.0, 1e-13);
        assert!(reconstruction_error_hermitian(&x, &ed) < 1e-9);
    }

    #[test]
    fn hermitian_tridiagonal_laplacian_closed_form() {
        // hopping chain with open ends: diag (1/2, 1, ..., 1, 1/2), off -1/2;
        // spectrum is 1 - cos(k pi / (L+1))
        let l = 4;
        let n = l + 1;
        let mut h = CMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = c64(if i == 0 || i == n - 1 { 0.5 } else { 1.0 }, 0.0);
            if i + 1 < n {
                h[(i, i + 1)] = c64(-0.5, 0.0);
                h[(i + 1, i)] = c64(-0.5, 0.0);
            }
        }
        let ed = eig_hermitian(&h).unwrap();
        for k in 0..n {
            let expected = 1.0 - (k as f64 * PI / (n as f64)).cos();
            assert_close(ed.values[k], expected, 1e-12);
        }
    }

    #[test]
    fn hermitian_rejects_nonhermitian() {
        let mut m = CMatrix::identity(2);
        m[(0, 1)] = c64(1e-3, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn hermitian_small_dims_match_characteristic_polynomial_roots() {
        // closed-form roots for dim 2 (quadratic) and dim 3 (trigonometric
        // depressed cubic) act as an independent oracle
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let h = random_hermitian(&mut rng, 2);
            let ed = eig_hermitian(&h).unwrap();
            let tr = h.trace().re;
            let det = (h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)]).re;
            let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
            assert_close(ed.values[0], (tr - disc) / 2.0, 1e-8);
            assert_close(ed.values[1], (tr + disc) / 2.0, 1e-8);
        }
        for _ in 0..50 {
            let h = random_hermitian(&mut rng, 3);
            let ed = eig_hermitian(&h).unwrap();
            let mut roots = cubic_hermitian_roots(&h);
            roots.sort_by(f64::total_cmp);
            for k in 0..3 {
                assert_close(ed.values[k], roots[k], 1e-8);
            }
        }
    }

    /// Roots of det(H - x) for 3x3 Hermitian H, via the trigonometric method.
    fn cubic_hermitian_roots(h: &CMatrix) -> Vec<f64> {
        let q = h.trace().re / 3.0;
        let shifted = h.sub(&CMatrix::identity(3).scaled(c64(q, 0.0)));
        // det(B - x) = -x^3 + p x + d with B traceless
        let p = {
            let b2 = shifted.mul(&shifted);
            b2.trace().re / 2.0
        };
        let d = shifted.det().re;
        if p.abs() < 1e-14 {
            let r = if d >= 0.0 { d.cbrt() } else { -(-d).cbrt() };
            return vec![q + r, q + r, q + r];
        }
        let m = 2.0 * (p / 3.0).sqrt();
        let arg = (3.0 * d / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| q + m * (phi - 2.0 * PI * k as f64 / 3.0).cos())
            .collect()
    }

    #[test]
    fn unitary_identity_angles() {
        let ed = eig_unitary(&CMatrix::identity(3)).unwrap();
        for k in 0..3 {
            assert_close(ed.values[k], 0.0, 1e-14);
        }
    }

    #[test]
    fn unitary_diagonal_angles() {
        let u = CMatrix::diag(&[c64(1.0, 0.0), Complex64::from_polar(1.0, -2.0 * PI / 3.0)]);
        let ed = eig_unitary(&u).unwrap();
        assert_close(ed.values[0], 0.0, 1e-13);
        assert_close(ed.values[1], 2.0 * PI / 3.0, 1e-13);
    }

    #[test]
    fn unitary_rejects_nonunitary() {
        let m = CMatrix::diag_real(&[1.0, 0.5]);
        assert!(matches!(eig_unitary(&m), Err(Error::NonUnitary { .. })));
    }

    #[test]
    fn unitary_splits_cosine_degenerate_pairs() {
        // angles theta and 2pi - theta share cos(theta); the sin stage must
        // separate them
        let th = 1.234;
        let base = CMatrix::diag(&[
            Complex64::from_polar(1.0, -th),
            Complex64::from_polar(1.0, th),
        ]);
        // conjugate by a random-ish unitary so the structure is hidden
        let h = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c64(0.3, 0.0),
            (1, 1) => c64(-0.1, 0.0),
            (0, 1) => c64(0.2, 0.4),
            (1, 0) => c64(0.2, -0.4),
            _ => unreachable!(),
        });
        let w = exp_hermitian(&h, 1.0).unwrap();
        let u = w.mul(&base).mul(&w.adjoint());
        let ed = eig_unitary(&u).unwrap();
        assert_close(ed.values[0], th, 1e-10);
        assert_close(ed.values[1], 2.0 * PI - th, 1e-10);
        assert!(reconstruction_error_unitary(&u, &ed) < 1e-9);
    }

    #[test]
    fn exp_hermitian_examples() {
        let z = CMatrix::zeros(3, 3);
        let u = exp_hermitian(&z, 0.37).unwrap();
        assert_close(u.sub(&CMatrix::identity(3)).max_abs(), 0.0, 1e-13);

        let ep = 2.0 * PI / 3.0;
        let t = 1.0;
        let u = exp_hermitian(&CMatrix::diag_real(&[0.0, ep]), t).unwrap();
        assert_close((u[(0, 0)] - c64(1.0, 0.0)).norm(), 0.0, 1e-13);
        assert_close(
            (u[(1, 1)] - Complex64::from_polar(1.0, -ep * t)).norm(),
            0.0,
            1e-13,
        );

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(&mut rng, 4);
        let f = exp_hermitian(&h, 0.9).unwrap();
        let b = exp_hermitian(&h, -0.9).unwrap();
        assert!(f.mul(&b).sub(&CMatrix::identity(4)).max_abs() < 1e-10);
        assert!(f.is_unitary(1e-10));
    }

    #[test]
    fn unitary_angles_of_exponential_match_eigenvalues_mod_2pi() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..6);
            let mut h = random_hermitian(&mut rng, n);
            // keep ||H|| T below 2pi so angles do not wrap
            let ed = eig_hermitian(&h).unwrap();
            let spread = ed.values.last().unwrap().abs().max(ed.values[0].abs());
            let t = 0.9 * 2.0 * PI / (2.0 * spread.max(1e-6));
            h = h.sub(&CMatrix::identity(n).scaled(c64(ed.values[0], 0.0)));
            let u = exp_hermitian(&h, t).unwrap();
            let eu = eig_unitary(&u).unwrap();
            let expected: Vec<f64> = ed
                .values
                .iter()
                .map(|l| ((l - ed.values[0]) * t).rem_euclid(2.0 * PI))
                .collect();
            // greedy circular multiset match; plain sorted zip would mispair
            // angles that wrap to just below 2pi
            let mut remaining = eu.values.clone();
            for want in &expected {
                let (idx, d) = remaining
                    .iter()
                    .enumerate()
                    .map(|(i, got)| {
                        let raw = (got - want).abs();
                        (i, raw.min(2.0 * PI - raw))
                    })
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                assert!(d < 1e-9, "no computed angle near {want} (closest off by {d})");
                remaining.swap_remove(idx);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn completeness_of_unitary_decomposition(seed in 0u64..1_000, n in 2usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(&mut rng, n);
            let u = exp_hermitian(&h, 1.3).unwrap();
            let ed = eig_unitary(&u).unwrap();
            prop_assert!(orthonormality_error(&ed) < 1e-10);
            let psi = CVector::new(
                (0..n).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            );
            let total: f64 = (0..n).map(|j| ed.vector(j).inner(&psi).norm_sqr()).sum();
            prop_assert!((total - psi.norm_sqr()).abs() < 1e-9);
        }

        #[test]
        fn hermitian_reconstruction_holds(seed in 0u64..1_000, n in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(&mut rng, n);
            let ed = eig_hermitian(&h).unwrap();
            prop_assert!(reconstruction_error_hermitian(&h, &ed) < 1e-9);
            prop_assert!(orthonormality_error(&ed) < 1e-10);
            for w in ed.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
        }
    }
}
