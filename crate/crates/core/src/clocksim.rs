//! Clock-register construction: encode a gate circuit into a pair of
//! Hamiltonians whose ground states are the circuit's input and its history
//! state, then compose them into a kicked system whose passage executes the
//! circuit.
//!
//! Register layout: `n` work qubits followed by `L` clock qubits (one per
//! gate), most significant first, with the control qubit of the composed
//! system appended last (least significant). Clock qubit `l` is 1-based.
//! Valid clock states are the unary words `|1^l 0^{L-l}>`; the diagonal
//! penalty `H_clock` pins the register to that subspace, and the hopping
//! term `H_h` walks the clock forward while applying the corresponding
//! gate, so its unique ground state is the uniform history superposition.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::floquet::{FloquetMap, FloquetSystem};
use crate::numerics::{
    c64, eig_hermitian, exp_from_decomposition, kron, CMatrix, CVector, TOL_UNITARY,
};

/// Dense construction cap: work + clock qubits.
const MAX_DENSE_QUBITS: usize = 12;

// ---------------------------------------------------------------------------
// Circuits
// ---------------------------------------------------------------------------

/// One elementary gate: a 1- or 2-qubit unitary and its work-qubit targets
/// (most significant first; for `gate_cnot` the first target is the
/// control).
#[derive(Debug, Clone)]
pub struct Gate {
    pub matrix: CMatrix,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn new(matrix: CMatrix, targets: Vec<usize>) -> Result<Self> {
        let k = targets.len();
        if k == 0 || k > 2 {
            return Err(Error::TooLarge(format!(
                "gates act on 1 or 2 qubits, got {k} targets"
            )));
        }
        if matrix.rows != (1 << k) || matrix.cols != (1 << k) {
            return Err(Error::TooLarge(format!(
                "gate matrix is {}x{}, need {}x{} for {k} targets",
                matrix.rows,
                matrix.cols,
                1 << k,
                1 << k
            )));
        }
        matrix.check_unitary(TOL_UNITARY)?;
        if k == 2 && targets[0] == targets[1] {
            return Err(Error::IndexOutOfRange {
                index: targets[1],
                dim: targets[0],
            });
        }
        Ok(Self { matrix, targets })
    }
}

pub fn gate_x(target: usize) -> Gate {
    let m = CMatrix::from_fn(2, 2, |i, j| c64(if i != j { 1.0 } else { 0.0 }, 0.0));
    Gate::new(m, vec![target]).expect("X is unitary")
}

pub fn gate_h(target: usize) -> Gate {
    let r = 1.0 / 2.0f64.sqrt();
    let m = CMatrix::from_fn(2, 2, |i, j| {
        c64(if i == 1 && j == 1 { -r } else { r }, 0.0)
    });
    Gate::new(m, vec![target]).expect("H is unitary")
}

pub fn gate_phase(phi: f64, target: usize) -> Gate {
    let m = CMatrix::diag(&[c64(1.0, 0.0), Complex64::from_polar(1.0, phi)]);
    Gate::new(m, vec![target]).expect("phase is unitary")
}

pub fn gate_cnot(control: usize, target: usize) -> Gate {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c64(1.0, 0.0);
    m[(1, 1)] = c64(1.0, 0.0);
    m[(2, 3)] = c64(1.0, 0.0);
    m[(3, 2)] = c64(1.0, 0.0);
    Gate::new(m, vec![control, target]).expect("CNOT is unitary")
}

/// A circuit on `n` work qubits; the gate count sets the clock length.
#[derive(Debug, Clone)]
pub struct ClockCircuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl ClockCircuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        assert!(n >= 1, "need at least one work qubit");
        if gates.is_empty() {
            return Err(Error::TooLarge("circuit needs at least one gate".into()));
        }
        for g in &gates {
            for &t in &g.targets {
                if t >= n {
                    return Err(Error::IndexOutOfRange { index: t, dim: n });
                }
            }
        }
        Ok(Self { n, gates })
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// `U_L ... U_1 |0^n>` computed directly on the work register.
    pub fn output_state(&self) -> CVector {
        let mut psi = CVector::basis(1 << self.n, 0);
        for g in &self.gates {
            psi = apply_local(&psi, &g.matrix, &g.targets, self.n);
        }
        psi
    }
}

// ---------------------------------------------------------------------------
// Local-operator plumbing
// ---------------------------------------------------------------------------

#[inline]
fn bit_of(index: usize, qubit: usize, total: usize) -> usize {
    (index >> (total - 1 - qubit)) & 1
}

/// Apply a `k`-qubit operator to a state over `total` qubits.
/// `positions[i]` is the global qubit the i-th (most significant) local
/// qubit acts on.
pub fn apply_local(state: &CVector, local: &CMatrix, positions: &[usize], total: usize) -> CVector {
    let k = positions.len();
    let dim = 1 << total;
    assert_eq!(state.dim(), dim);
    let mut out = CVector::zeros(dim);
    for j in 0..dim {
        let amp_in = state.entries[j];
        if amp_in == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut lc = 0usize;
        for (li, &p) in positions.iter().enumerate() {
            lc |= bit_of(j, p, total) << (k - 1 - li);
        }
        for lr in 0..(1 << k) {
            let amp = local[(lr, lc)];
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut i = j;
            for (li, &p) in positions.iter().enumerate() {
                let want = (lr >> (k - 1 - li)) & 1;
                let mask = 1usize << (total - 1 - p);
                if want == 1 {
                    i |= mask;
                } else {
                    i &= !mask;
                }
            }
            out.entries[i] += amp * amp_in;
        }
    }
    out
}

/// Dense embedding of a `k`-qubit operator into the full register.
pub fn embed_local(local: &CMatrix, positions: &[usize], total: usize) -> CMatrix {
    let k = positions.len();
    let dim = 1 << total;
    let mut out = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut lc = 0usize;
        for (li, &p) in positions.iter().enumerate() {
            lc |= bit_of(j, p, total) << (k - 1 - li);
        }
        for lr in 0..(1 << k) {
            let amp = local[(lr, lc)];
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut i = j;
            for (li, &p) in positions.iter().enumerate() {
                let want = (lr >> (k - 1 - li)) & 1;
                let mask = 1usize << (total - 1 - p);
                if want == 1 {
                    i |= mask;
                } else {
                    i &= !mask;
                }
            }
            out[(i, j)] += amp;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Clock states and Hamiltonians
// ---------------------------------------------------------------------------

/// The `L + 1` valid clock words `|1^l 0^{L-l}>` as vectors in `2^L`.
pub fn clock_states(l: usize) -> Result<Vec<CVector>> {
    assert!(l >= 1);
    if l > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge(format!(
            "clock register of {l} qubits exceeds the dense cap {MAX_DENSE_QUBITS}"
        )));
    }
    Ok((0..=l).map(|k| CVector::basis(1 << l, clock_index(k, l))).collect())
}

/// Basis index of `|1^k 0^{L-k}>` in the clock register.
fn clock_index(k: usize, l: usize) -> usize {
    // the first k clock bits set, most significant first
    ((1usize << k) - 1) << (l - k)
}

/// The six operators of the construction, all dense on the work ⊗ clock
/// space, plus the hopping term restricted to the history-state span.
#[derive(Debug, Clone)]
pub struct ClockHamiltonians {
    pub h_clock: CMatrix,
    pub h_clockinit: CMatrix,
    pub h_input: CMatrix,
    pub h_b: CMatrix,
    pub h_h: CMatrix,
    pub h_p: CMatrix,
    /// `(L+1) x (L+1)` matrix `<gamma(j)| H_h |gamma(l)>`.
    pub restricted_h_h: CMatrix,
}

/// Snapshot states `|gamma(l)> = |alpha(l)> ⊗ |c(l)>` of the circuit run.
pub fn snapshot_states(circuit: &ClockCircuit) -> Result<Vec<CVector>> {
    let n = circuit.n;
    let l_total = circuit.len();
    check_dense_cap(n + l_total)?;
    let clocks = clock_states(l_total)?;
    let mut work = CVector::basis(1 << n, 0);
    let mut out = vec![work.kron(&clocks[0])];
    for (l, gate) in circuit.gates.iter().enumerate() {
        work = apply_local(&work, &gate.matrix, &gate.targets, n);
        out.push(work.kron(&clocks[l + 1]));
    }
    Ok(out)
}

fn check_dense_cap(qubits: usize) -> Result<()> {
    if qubits > MAX_DENSE_QUBITS {
        Err(Error::TooLarge(format!(
            "{qubits} work+clock qubits exceed the dense cap {MAX_DENSE_QUBITS}"
        )))
    } else {
        Ok(())
    }
}

/// Build every Hamiltonian of the construction for the given circuit.
pub fn build_clock_hamiltonians(circuit: &ClockCircuit) -> Result<ClockHamiltonians> {
    let n = circuit.n;
    let l_total = circuit.len();
    check_dense_cap(n + l_total)?;
    let m = n + l_total;
    let dim = 1usize << m;
    let clock_pos = |l: usize| n + l - 1; // clock qubit l (1-based)

    // the three diagonal penalties
    let mut d_clock = vec![0.0; dim];
    let mut d_clockinit = vec![0.0; dim];
    let mut d_input = vec![0.0; dim];
    for idx in 0..dim {
        let mut clock_pen = 0.0;
        for l in 1..l_total {
            if bit_of(idx, clock_pos(l), m) == 0 && bit_of(idx, clock_pos(l + 1), m) == 1 {
                clock_pen += 1.0;
            }
        }
        d_clock[idx] = clock_pen;
        d_clockinit[idx] = bit_of(idx, clock_pos(1), m) as f64;
        if bit_of(idx, clock_pos(1), m) == 0 {
            let work_ones: usize = (0..n).map(|q| bit_of(idx, q, m)).sum();
            d_input[idx] = work_ones as f64;
        }
    }
    let h_clock = CMatrix::diag_real(&d_clock);
    let h_clockinit = CMatrix::diag_real(&d_clockinit);
    let h_input = CMatrix::diag_real(&d_input);

    // hopping: h_l = (1 - U_l A_l^dag - U_l^dag A_l) / 2 on the gate targets
    // plus clock qubit l, sandwiched by the neighbour clock projectors
    let a_dag = CMatrix::from_fn(2, 2, |i, j| c64(if i == 1 && j == 0 { 1.0 } else { 0.0 }, 0.0));
    let a_op = a_dag.adjoint();
    let mut h_h = CMatrix::zeros(dim, dim);
    for (g_idx, gate) in circuit.gates.iter().enumerate() {
        let l = g_idx + 1;
        let mut positions: Vec<usize> = gate.targets.clone();
        positions.push(clock_pos(l));
        let raise = kron(&gate.matrix, &a_dag);
        let lower = kron(&gate.matrix.adjoint(), &a_op);
        let hop = raise.add(&lower);
        let mut local = hop.scaled(c64(-0.5, 0.0));
        for i in 0..local.rows {
            local[(i, i)] += c64(0.5, 0.0);
        }
        let mut term = embed_local(&local, &positions, m);
        // neighbour projectors keep the term inside the valid-clock span
        for idx_row in 0..dim {
            let row_ok = l == 1 || bit_of(idx_row, clock_pos(l - 1), m) == 1;
            for idx_col in 0..dim {
                if term[(idx_row, idx_col)] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let col_ok = l == l_total || bit_of(idx_col, clock_pos(l + 1), m) == 0;
                if !(row_ok && col_ok) {
                    term[(idx_row, idx_col)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        h_h = h_h.add(&term);
    }

    let h_b = h_clockinit.add(&h_input).add(&h_clock);
    let h_p = h_h.add(&h_input).add(&h_clock);

    let snapshots = snapshot_states(circuit)?;
    let restricted_h_h = CMatrix::from_fn(l_total + 1, l_total + 1, |j, l| {
        snapshots[j].inner(&h_h.mul_vec(&snapshots[l]))
    });

    Ok(ClockHamiltonians {
        h_clock,
        h_clockinit,
        h_input,
        h_b,
        h_h,
        h_p,
        restricted_h_h,
    })
}

/// Fourier transform on the valid clock span, extended by the identity on
/// its orthogonal complement; unitary on the whole clock register.
pub fn clock_fourier(l: usize) -> Result<CMatrix> {
    let states = clock_states(l)?;
    let dim = 1 << l;
    let mut f = CMatrix::identity(dim);
    // subtract the valid-span identity, add the Fourier block
    for s in &states {
        f = f.sub(&crate::numerics::projector(s));
    }
    let norm = 1.0 / ((l + 1) as f64).sqrt();
    for (k, sk) in states.iter().enumerate() {
        for (j, sj) in states.iter().enumerate() {
            let phase = Complex64::from_polar(norm, -2.0 * PI * (k as f64) * (j as f64) / (l as f64 + 1.0));
            // |c_k><c(k)| column k gets the Fourier mix of rows
            let row = sj.entries.iter().position(|x| x.norm() > 0.5).unwrap();
            let col = sk.entries.iter().position(|x| x.norm() > 0.5).unwrap();
            f[(row, col)] += phase;
            let _ = (j, sj);
        }
    }
    Ok(f)
}

/// The conditional evolution `prod_{l=L..1} (Z_l + I_l U_l)` on the
/// work ⊗ clock space: each factor applies gate `l` when clock qubit `l`
/// is set.
pub fn conditional_evolution(circuit: &ClockCircuit) -> Result<CMatrix> {
    let n = circuit.n;
    let l_total = circuit.len();
    check_dense_cap(n + l_total)?;
    let m = n + l_total;
    let mut u = CMatrix::identity(1 << m);
    for (g_idx, gate) in circuit.gates.iter().enumerate() {
        let l = g_idx + 1;
        let k = gate.targets.len();
        let mut positions = gate.targets.clone();
        positions.push(n + l - 1);
        // Z-projector branch leaves everything alone; I-projector applies U_l
        let mut local = kron(&CMatrix::identity(1 << k), &CMatrix::diag_real(&[1.0, 0.0]));
        local = local.add(&kron(&gate.matrix, &CMatrix::diag_real(&[0.0, 1.0])));
        let factor = embed_local(&local, &positions, m);
        u = factor.mul(&u);
    }
    Ok(u)
}

/// `U_h F_clock |gamma(0)>`: the uniform superposition of circuit
/// snapshots. Asserts the operator route agrees with the direct sum.
pub fn history_state(circuit: &ClockCircuit) -> Result<CVector> {
    let n = circuit.n;
    let l_total = circuit.len();
    check_dense_cap(n + l_total)?;
    let m = n + l_total;

    let f = clock_fourier(l_total)?;
    let mut psi = CVector::basis(1 << m, 0);
    let clock_positions: Vec<usize> = (0..l_total).map(|i| n + i).collect();
    psi = apply_local(&psi, &f, &clock_positions, m);
    let u_h = conditional_evolution(circuit)?;
    let psi = u_h.mul_vec(&psi);

    let snapshots = snapshot_states(circuit)?;
    let norm = 1.0 / ((l_total + 1) as f64).sqrt();
    let mut direct = CVector::zeros(1 << m);
    for s in &snapshots {
        direct.axpy(c64(norm, 0.0), s);
    }
    let deviation = psi.sub(&direct).norm();
    assert!(
        deviation < 1e-10,
        "operator-built history state differs from the direct sum by {deviation}"
    );
    Ok(psi)
}

// ---------------------------------------------------------------------------
// Composed kicked system for a circuit
// ---------------------------------------------------------------------------

/// A circuit compiled into a kicked system on work ⊗ clock ⊗ control.
/// The free factor is applied per control sector: the `|0>` sector uses the
/// diagonal `exp(-i H_B T)`, the `|1>` sector the dense
/// `exp(-i (H_P + E_P) T)`, so passages never need the doubled dense
/// operator.
pub struct CircuitAaqc {
    pub circuit: ClockCircuit,
    pub hams: ClockHamiltonians,
    pub e_p: f64,
    pub t: f64,
    /// Largest eigenvalue of the composed `H0`.
    pub w_max: f64,
    /// First excited energy of `H_P` restricted to the snapshot span.
    pub delta: f64,
    /// First excited energy of the full `H_P`. Histories grown from wrong
    /// inputs live outside the snapshot span and pay the input penalty only
    /// through their weight on the first clock word, so this can sit below
    /// the restricted value; the flat level nearest the passage endpoint is
    /// `E_P + delta_full`.
    pub delta_full: f64,
    pub minus: CVector,
    pub plus: CVector,
    pub eta: CVector,
    v: CVector,
    exp_b_diag: Vec<Complex64>,
    exp_p: CMatrix,
    base_dim: usize,
}

impl CircuitAaqc {
    pub fn v(&self) -> &CVector {
        &self.v
    }

    /// Dense composed system for eigenangle analysis.
    pub fn floquet_system(&self) -> Result<FloquetSystem> {
        let h0 = self.h0_dense();
        FloquetSystem::new(h0, self.v.clone(), self.t)
    }

    /// `H0 = H_B ⊗ |0><0| + (H_P + E_P) ⊗ |1><1|`, control last.
    pub fn h0_dense(&self) -> CMatrix {
        let proj0 = CMatrix::diag_real(&[1.0, 0.0]);
        let proj1 = CMatrix::diag_real(&[0.0, 1.0]);
        let shifted = self
            .hams
            .h_p
            .add(&CMatrix::identity(self.base_dim).scaled(c64(self.e_p, 0.0)));
        kron(&self.hams.h_b, &proj0).add(&kron(&shifted, &proj1))
    }

    /// The kick-preparation unitary `(Z_C + U_h F_clock I_C) H_C` as a
    /// dense matrix on the full space.
    pub fn g_operator(&self) -> Result<CMatrix> {
        let n = self.circuit.n;
        let l_total = self.circuit.len();
        let m = n + l_total + 1;
        let f = clock_fourier(l_total)?;
        let f_full = embed_local(&f, &(n..n + l_total).collect::<Vec<_>>(), m - 1);
        let uhf = conditional_evolution(&self.circuit)?.mul(&f_full);
        let branch = kron(&CMatrix::identity(self.base_dim), &CMatrix::diag_real(&[1.0, 0.0]))
            .add(&kron(&uhf, &CMatrix::diag_real(&[0.0, 1.0])));
        let r = 1.0 / 2.0f64.sqrt();
        let hadamard = CMatrix::from_fn(2, 2, |i, j| c64(if i == 1 && j == 1 { -r } else { r }, 0.0));
        let h_c = embed_local(&hadamard, &[m - 1], m);
        Ok(branch.mul(&h_c))
    }
}

impl FloquetMap for CircuitAaqc {
    fn dim(&self) -> usize {
        2 * self.base_dim
    }

    fn apply(&self, s: f64, psi: &CVector) -> CVector {
        // rank-1 kick in closed form
        let f = Complex64::from_polar(1.0, -s) - Complex64::new(1.0, 0.0);
        let mut kicked = psi.clone();
        kicked.axpy(f * self.v.inner(psi), &self.v);
        // free factor per control sector (control is the least significant bit)
        let mut out = CVector::zeros(psi.dim());
        for q in 0..self.base_dim {
            out.entries[2 * q] = self.exp_b_diag[q] * kicked.entries[2 * q];
        }
        for q in 0..self.base_dim {
            let row = &self.exp_p.entries[q * self.base_dim..(q + 1) * self.base_dim];
            let mut acc = Complex64::new(0.0, 0.0);
            for (r, amp) in row.iter().enumerate() {
                acc += amp * kicked.entries[2 * r + 1];
            }
            out.entries[2 * q + 1] = acc;
        }
        out
    }
}

/// Compose a circuit into a kicked system. `t` defaults to `0.9 * 2pi / W`
/// with `W` the largest eigenvalue of the composed `H0`; an explicit `t`
/// must satisfy `t W < 2pi`.
pub fn compose_circuit_aaqc(
    circuit: &ClockCircuit,
    e_p: f64,
    t: Option<f64>,
) -> Result<CircuitAaqc> {
    if !(e_p > 0.0 && e_p < 1.0) {
        return Err(Error::GapConditionViolated(format!(
            "need 0 < E_P < 1 (the first excited energy of H_B), got {e_p}"
        )));
    }
    let hams = build_clock_hamiltonians(circuit)?;
    let base_dim = hams.h_b.dim();

    let ed_p = eig_hermitian(&hams.h_p)?;
    let max_b = (0..base_dim).map(|i| hams.h_b[(i, i)].re).fold(0.0, f64::max);
    let w_max = max_b.max(e_p + ed_p.values[base_dim - 1]);
    let t = match t {
        Some(t) => {
            if !(t > 0.0 && t * w_max < 2.0 * PI) {
                return Err(Error::PeriodTooLong {
                    t,
                    limit: 2.0 * PI / w_max,
                });
            }
            t
        }
        None => 0.9 * 2.0 * PI / w_max,
    };

    let eta = history_state(circuit)?;
    let minus = CVector::basis(2 * base_dim, 0);
    let plus = eta.kron(&CVector::basis(2, 1));
    let mut v = minus.clone();
    v.axpy(c64(1.0, 0.0), &plus);
    let v = v.scaled(c64(1.0 / 2.0f64.sqrt(), 0.0));

    let ed_restricted = eig_hermitian(&hams.restricted_h_h)?;
    let delta = ed_restricted.values[1];
    let delta_full = ed_p.values[1];

    // sector exponentials: H_B is diagonal by construction
    let exp_b_diag: Vec<Complex64> = (0..base_dim)
        .map(|i| Complex64::from_polar(1.0, -hams.h_b[(i, i)].re * t))
        .collect();
    let mut shifted = ed_p.clone();
    for val in shifted.values.iter_mut() {
        *val += e_p;
    }
    let exp_p = exp_from_decomposition(&shifted, t);

    let composed = CircuitAaqc {
        circuit: circuit.clone(),
        hams,
        e_p,
        t,
        w_max,
        delta,
        delta_full,
        minus,
        plus,
        eta,
        v,
        exp_b_diag,
        exp_p,
        base_dim,
    };

    // the preparation unitary must send |-> to the kick vector
    let g = composed.g_operator()?;
    let gv = g.mul_vec(&composed.minus);
    let dev = gv.sub(&composed.v).norm();
    assert!(dev < 1e-10, "G|-> deviates from |v> by {dev}");

    Ok(composed)
}

/// Project a final state onto clock `|c(L)>` and control `|1>`; returns the
/// normalized work-register state and the projection probability (ideally
/// `1/(L+1)`).
pub fn extract_output(final_state: &CVector, circuit: &ClockCircuit) -> Result<(CVector, f64)> {
    let n = circuit.n;
    let l_total = circuit.len();
    let base_dim = 1usize << (n + l_total);
    assert_eq!(final_state.dim(), 2 * base_dim, "state dimension mismatch");
    let clock_full = clock_index(l_total, l_total);
    let mut work = CVector::zeros(1 << n);
    for q in 0..(1 << n) {
        let idx = ((q << l_total) | clock_full) * 2 + 1;
        work.entries[q] = final_state.entries[idx];
    }
    let prob = work.norm_sqr();
    if prob < 1e-12 {
        return Err(Error::ZeroProjection { weight: prob });
    }
    Ok((work.scaled(c64(1.0 / prob.sqrt(), 0.0)), prob))
}
