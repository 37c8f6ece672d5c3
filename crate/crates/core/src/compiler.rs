//! Trotter compilation of two-spin Hamiltonians onto the native gate set
//! (single-qubit rotations plus the XY exchange window).
//!
//! Spin convention: spin-up is qubit `|0>` (the easily initialized ground
//! state), `s_alpha = sigma_alpha / 2`, and the two-qubit computational
//! basis is ordered `(|00>, |10>, |01>, |11>)`. The exchange window
//! `u_xy(phi)` applies `cos phi / -i sin phi` on the `{|10>, |01>}` block;
//! its counter-rotating partner `u_xy_minus(phi)` acts the same way on
//! `{|00>, |11>}` and is realized by conjugating the window with `Rx1(pi)`
//! (only sigma_y flips sign there, which is exactly the `-` in `XX - YY`).

use num_complex::Complex64;

use crate::pulses::Qubit;
use crate::{CMatrix, Error, Result, TWO_PI};

/// Rotation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn from_char(c: char) -> Result<Axis> {
        match c {
            'x' => Ok(Axis::X),
            'y' => Ok(Axis::Y),
            'z' => Ok(Axis::Z),
            _ => Err(Error::UnsupportedAxisPair(c, c)),
        }
    }
    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// Rotation target: one qubit or both in parallel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotTarget {
    One(Qubit),
    Both,
}

/// One native gate of a compiled sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Rot { target: RotTarget, axis: Axis, angle: f64 },
    /// Exchange window with XY phase `phi` (the `cos phi` argument); the
    /// physical window duration is `4 |phi| / |Gamma_ang|` and `phi` must
    /// carry the sign of Gamma.
    Xy { phi: f64 },
}

/// Ordered native-gate list with ideal 4x4 algebra attached.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GateSequence {
    pub ops: Vec<GateOp>,
}

impl GateSequence {
    pub fn push(&mut self, op: GateOp) {
        self.ops.push(op);
    }

    pub fn extend(&mut self, other: GateSequence) {
        self.ops.extend(other.ops);
    }

    /// Exact 4x4 product of the ideal gate unitaries.
    pub fn ideal_unitary(&self) -> CMatrix {
        let mut u = CMatrix::identity(4);
        for op in &self.ops {
            u = gate_matrix(op).matmul(&u);
        }
        u
    }

    /// (two-qubit windows, single-qubit rotation windows); a parallel
    /// rotation counts one window per qubit.
    pub fn window_counts(&self) -> (usize, usize) {
        let mut two = 0;
        let mut one = 0;
        for op in &self.ops {
            match op {
                GateOp::Xy { .. } => two += 1,
                GateOp::Rot { target: RotTarget::Both, .. } => one += 2,
                GateOp::Rot { .. } => one += 1,
            }
        }
        (two, one)
    }

    /// One gate per line: kind, qubit(s), angle-or-phase.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            match op {
                GateOp::Rot { target, axis, angle } => {
                    let q = match target {
                        RotTarget::One(Qubit::Q1) => "1",
                        RotTarget::One(Qubit::Q2) => "2",
                        RotTarget::Both => "12",
                    };
                    out.push_str(&format!("r{} {q} {angle:.12}\n", axis.as_char()));
                }
                GateOp::Xy { phi } => out.push_str(&format!("xy 12 {phi:.12}\n")),
            }
        }
        out
    }
}

/// Two-spin Hamiltonian as one- and two-body terms (coefficients in MHz,
/// `H = sum c1 s_alpha^i + sum c2 T`, with `T` one of the supported
/// two-body forms).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpinHamiltonianSpec {
    pub one_body: Vec<(Qubit, Axis, f64)>,
    pub two_body: Vec<(TwoBodyKind, f64)>,
}

/// Supported two-body interaction shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoBodyKind {
    /// `s_alpha^1 s_beta^2`
    Pair(Axis, Axis),
    /// `s_x s_x + s_y s_y`
    XyPlus,
    /// `s_x s_x - s_y s_y`
    XyMinus,
}

impl SpinHamiltonianSpec {
    /// Transverse-field Ising model `L s_x1 s_x2 + b (s_z1 + s_z2)`.
    pub fn tim(lambda_mhz: f64, b_mhz: f64) -> Self {
        SpinHamiltonianSpec {
            one_body: vec![(Qubit::Q1, Axis::Z, b_mhz), (Qubit::Q2, Axis::Z, b_mhz)],
            two_body: vec![(TwoBodyKind::Pair(Axis::X, Axis::X), lambda_mhz)],
        }
    }

    /// 4x4 matrix of the spec (angular units).
    pub fn matrix(&self) -> CMatrix {
        let mut h = CMatrix::zeros(4);
        for &(q, axis, c) in &self.one_body {
            let s = single_spin(axis, q);
            h = &h + &s.scale(Complex64::new(TWO_PI * c, 0.0));
        }
        for &(kind, c) in &self.two_body {
            let t = two_body_matrix(kind);
            h = &h + &t.scale(Complex64::new(TWO_PI * c, 0.0));
        }
        h
    }
}

/// Map the spin-1 anisotropy Hamiltonian `D Sz^2 + E (Sx^2 - Sy^2)` onto two
/// qubits: `2D s_z1 s_z2 + 2E (s_x1 s_x2 - s_y1 s_y2)` (plus a constant).
pub fn map_spin1(d_mhz: f64, e_mhz: f64) -> SpinHamiltonianSpec {
    let mut spec = SpinHamiltonianSpec::default();
    if d_mhz != 0.0 {
        spec.two_body.push((TwoBodyKind::Pair(Axis::Z, Axis::Z), 2.0 * d_mhz));
    }
    if e_mhz != 0.0 {
        spec.two_body.push((TwoBodyKind::XyMinus, 2.0 * e_mhz));
    }
    spec
}

/// Trotterized evolution plan with ideal per-step reference unitaries.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    pub n_steps: usize,
    pub tau_us: f64,
    pub sequence: GateSequence,
    /// Gate-index boundaries of each Trotter step in `sequence.ops`.
    pub step_bounds: Vec<usize>,
    /// Ideal unitary after each Trotter step (exact term exponentials).
    pub prefix_unitaries: Vec<CMatrix>,
}

impl TrotterPlan {
    pub fn reference_unitary(&self) -> CMatrix {
        self.prefix_unitaries.last().cloned().unwrap_or_else(|| CMatrix::identity(4))
    }
}

// ---------------------------------------------------------------------------
// ideal 4x4 algebra
// ---------------------------------------------------------------------------

fn pauli4(axis: Axis, q: Qubit) -> CMatrix {
    // basis order (00, 10, 01, 11); qubit 1 is the first label
    let s = match axis {
        Axis::X => crate::operators::pauli(crate::operators::PauliAxis::X),
        Axis::Y => crate::operators::pauli(crate::operators::PauliAxis::Y),
        Axis::Z => {
            // spin-up = |0>: sz = diag(+1, -1) in (|0>, |1>) ordering, which
            // the operators module already uses (excited-first refers to the
            // transmon; here index 0 is |0>)
            crate::operators::pauli(crate::operators::PauliAxis::Z)
        }
    };
    let id = CMatrix::identity(2);
    let big = match q {
        Qubit::Q1 => s.kron(&id),
        Qubit::Q2 => id.kron(&s),
    };
    reorder_to_computational(&big)
}

/// kron(q1, q2) order (00, 01, 10, 11) -> computational order (00, 10, 01, 11).
fn reorder_to_computational(m: &CMatrix) -> CMatrix {
    let perm = [0usize, 2, 1, 3];
    CMatrix::from_fn(4, |r, c| m[(perm[r], perm[c])])
}

fn single_spin(axis: Axis, q: Qubit) -> CMatrix {
    pauli4(axis, q).scale(Complex64::new(0.5, 0.0))
}

fn two_body_matrix(kind: TwoBodyKind) -> CMatrix {
    let quarter = Complex64::new(0.25, 0.0);
    match kind {
        TwoBodyKind::Pair(a, b) => {
            pauli4(a, Qubit::Q1).matmul(&pauli4(b, Qubit::Q2)).scale(quarter)
        }
        TwoBodyKind::XyPlus => {
            let xx = pauli4(Axis::X, Qubit::Q1).matmul(&pauli4(Axis::X, Qubit::Q2));
            let yy = pauli4(Axis::Y, Qubit::Q1).matmul(&pauli4(Axis::Y, Qubit::Q2));
            (&xx + &yy).scale(quarter)
        }
        TwoBodyKind::XyMinus => {
            let xx = pauli4(Axis::X, Qubit::Q1).matmul(&pauli4(Axis::X, Qubit::Q2));
            let yy = pauli4(Axis::Y, Qubit::Q1).matmul(&pauli4(Axis::Y, Qubit::Q2));
            (&xx - &yy).scale(quarter)
        }
    }
}

/// Ideal matrix of one native gate.
pub fn gate_matrix(op: &GateOp) -> CMatrix {
    match *op {
        GateOp::Rot { target, axis, angle } => {
            let gen2 = match axis {
                Axis::X => crate::operators::pauli(crate::operators::PauliAxis::X),
                Axis::Y => crate::operators::pauli(crate::operators::PauliAxis::Y),
                Axis::Z => crate::operators::pauli(crate::operators::PauliAxis::Z),
            };
            let u2 = gen2
                .scale(Complex64::new(0.0, -angle / 2.0))
                .expm()
                .expect("rotation generator is finite");
            let id = CMatrix::identity(2);
            let big = match target {
                RotTarget::One(Qubit::Q1) => u2.kron(&id),
                RotTarget::One(Qubit::Q2) => id.kron(&u2),
                RotTarget::Both => u2.kron(&u2),
            };
            reorder_to_computational(&big)
        }
        GateOp::Xy { phi } => u_xy(phi),
    }
}

/// `exp(-i (phi/2) (XX + YY))`: `cos phi / -i sin phi` on `{|10>, |01>}`.
pub fn u_xy(phi: f64) -> CMatrix {
    let mut u = CMatrix::identity(4);
    u[(1, 1)] = Complex64::new(phi.cos(), 0.0);
    u[(2, 2)] = Complex64::new(phi.cos(), 0.0);
    u[(1, 2)] = Complex64::new(0.0, -phi.sin());
    u[(2, 1)] = Complex64::new(0.0, -phi.sin());
    u
}

/// `exp(-i (phi/2) (XX - YY))`: same block form on `{|00>, |11>}`.
pub fn u_xy_minus(phi: f64) -> CMatrix {
    let mut u = CMatrix::identity(4);
    u[(0, 0)] = Complex64::new(phi.cos(), 0.0);
    u[(3, 3)] = Complex64::new(phi.cos(), 0.0);
    u[(0, 3)] = Complex64::new(0.0, -phi.sin());
    u[(3, 0)] = Complex64::new(0.0, -phi.sin());
    u
}

/// Ideal sqrt-iSWAP matrix (the `phi = -pi/4` window, Gamma < 0).
pub fn sqrt_iswap_matrix() -> CMatrix {
    u_xy(-std::f64::consts::FRAC_PI_4)
}

// ---------------------------------------------------------------------------
// compilation
// ---------------------------------------------------------------------------

fn rot(target: RotTarget, axis: Axis, angle: f64) -> GateOp {
    GateOp::Rot { target, axis, angle }
}

/// Native realization of `exp(-i c_ang T t)` for a two-body shape `T`
/// expressed through `s = sigma/2` operators; `c_ang t` is the accumulated
/// angular coefficient (rad).
fn compile_two_body_angle(kind: TwoBodyKind, ct: f64, seq: &mut GateSequence) -> Result<()> {
    // target exponent in sigma language: c s-form -> phi parameters of the
    // xy window(s)
    match kind {
        TwoBodyKind::XyPlus => {
            // exp(-i ct (sx sx + sy sy)) = u_xy(ct / 2)
            seq.push(GateOp::Xy { phi: ct / 2.0 });
        }
        TwoBodyKind::XyMinus => {
            // conjugate with Rx1(pi): only sigma_y flips, giving XX - YY
            seq.push(rot(RotTarget::One(Qubit::Q1), Axis::X, -std::f64::consts::PI));
            seq.push(GateOp::Xy { phi: ct / 2.0 });
            seq.push(rot(RotTarget::One(Qubit::Q1), Axis::X, std::f64::consts::PI));
        }
        TwoBodyKind::Pair(a, b) => {
            // exp(-i ct s_a s_b) = exp(-i (ct/4) sigma_a sigma_b); the window
            // pair u_xy(phi) u_xy_minus(phi) = exp(-i phi XX), so phi = ct/4
            let phi_each = ct / 4.0;
            let mut inner = GateSequence::default();
            inner.push(GateOp::Xy { phi: phi_each });
            inner.push(rot(RotTarget::One(Qubit::Q1), Axis::X, -std::f64::consts::PI));
            inner.push(GateOp::Xy { phi: phi_each });
            inner.push(rot(RotTarget::One(Qubit::Q1), Axis::X, std::f64::consts::PI));
            // basis-change rotations mapping sigma_x -> sigma_axis per qubit;
            // gates apply right to left, so the adjoint comes first
            let pre_post = |axis: Axis, q: Qubit| -> Option<(GateOp, GateOp)> {
                match axis {
                    Axis::X => None,
                    Axis::Y => Some((
                        rot(RotTarget::One(q), Axis::Z, -std::f64::consts::FRAC_PI_2),
                        rot(RotTarget::One(q), Axis::Z, std::f64::consts::FRAC_PI_2),
                    )),
                    Axis::Z => Some((
                        rot(RotTarget::One(q), Axis::Y, std::f64::consts::FRAC_PI_2),
                        rot(RotTarget::One(q), Axis::Y, -std::f64::consts::FRAC_PI_2),
                    )),
                }
            };
            // merge per-qubit pre/post rotations of equal axis+angle into
            // parallel windows where possible
            let p1 = pre_post(a, Qubit::Q1);
            let p2 = pre_post(b, Qubit::Q2);
            match (&p1, &p2) {
                (Some((pre1, _)), Some((pre2, _))) => {
                    if let (GateOp::Rot { axis: ax1, angle: an1, .. }, GateOp::Rot { axis: ax2, angle: an2, .. }) = (pre1, pre2) {
                        if ax1 == ax2 && (an1 - an2).abs() < 1e-15 {
                            seq.push(rot(RotTarget::Both, *ax1, *an1));
                        } else {
                            seq.push(*pre1);
                            seq.push(*pre2);
                        }
                    }
                }
                (Some((pre1, _)), None) => seq.push(*pre1),
                (None, Some((pre2, _))) => seq.push(*pre2),
                (None, None) => {}
            }
            seq.extend(inner);
            match (&p1, &p2) {
                (Some((_, post1)), Some((_, post2))) => {
                    if let (GateOp::Rot { axis: ax1, angle: an1, .. }, GateOp::Rot { axis: ax2, angle: an2, .. }) = (post1, post2) {
                        if ax1 == ax2 && (an1 - an2).abs() < 1e-15 {
                            seq.push(rot(RotTarget::Both, *ax1, *an1));
                        } else {
                            seq.push(*post1);
                            seq.push(*post2);
                        }
                    }
                }
                (Some((_, post1)), None) => seq.push(*post1),
                (None, Some((_, post2))) => seq.push(*post2),
                (None, None) => {}
            }
        }
    }
    Ok(())
}

/// Compile `exp(-i 2 pi J T t)` into native gates, with `T` the spin-form
/// two-body matrix of `kind` (see [`TwoBodyKind`]; `J` in MHz, `t` in us).
pub fn compile_two_body(kind: TwoBodyKind, j_mhz: f64, t_us: f64) -> Result<GateSequence> {
    let mut seq = GateSequence::default();
    if j_mhz == 0.0 || t_us == 0.0 {
        return Ok(seq);
    }
    compile_two_body_angle(kind, TWO_PI * j_mhz * t_us, &mut seq)?;
    Ok(seq)
}

/// First-order Trotter plan for `exp(-i H t)` of a [`SpinHamiltonianSpec`].
///
/// Per step: one-body rotations first (parallel where both qubits rotate
/// about the same axis by the same angle), then the two-body factors in
/// spec order. Reference unitaries are exact term exponentials.
pub fn trotterize(spec: &SpinHamiltonianSpec, t_us: f64, n_steps: usize) -> Result<TrotterPlan> {
    if n_steps == 0 {
        return Err(Error::InvalidPulse("need at least one Trotter step"));
    }
    let tau = t_us / n_steps as f64;
    let mut seq = GateSequence::default();
    let mut bounds = Vec::with_capacity(n_steps);

    // per-step ideal unitary: product of exact term exponentials
    let mut step_u = CMatrix::identity(4);
    // one-body: group same-axis-same-coefficient pairs into one parallel window
    let mut one_body_ops: Vec<GateOp> = Vec::new();
    {
        let mut used = vec![false; spec.one_body.len()];
        for i in 0..spec.one_body.len() {
            if used[i] {
                continue;
            }
            let (q1, ax, c) = spec.one_body[i];
            let mut paired = None;
            for j in (i + 1)..spec.one_body.len() {
                let (q2, ax2, c2) = spec.one_body[j];
                if !used[j] && ax2 == ax && (c2 - c).abs() < 1e-15 && q2 != q1 {
                    paired = Some(j);
                    break;
                }
            }
            let angle = TWO_PI * c * tau;
            if let Some(j) = paired {
                used[j] = true;
                one_body_ops.push(rot(RotTarget::Both, ax, angle));
            } else {
                one_body_ops.push(rot(RotTarget::One(q1), ax, angle));
            }
            used[i] = true;
        }
    }
    for op in &one_body_ops {
        step_u = gate_matrix(op).matmul(&step_u);
    }
    let mut two_body_seq = GateSequence::default();
    for &(kind, c) in &spec.two_body {
        let ct = TWO_PI * c * tau;
        compile_two_body_angle(kind, ct, &mut two_body_seq)?;
        let term = two_body_matrix(kind).scale(Complex64::new(0.0, -TWO_PI * c * tau));
        step_u = term.expm()?.matmul(&step_u);
    }

    let mut prefix = Vec::with_capacity(n_steps);
    let mut acc = CMatrix::identity(4);
    for _ in 0..n_steps {
        for op in &one_body_ops {
            seq.push(*op);
        }
        seq.extend(two_body_seq.clone());
        bounds.push(seq.ops.len());
        acc = step_u.matmul(&acc);
        prefix.push(acc.clone());
    }
    Ok(TrotterPlan { n_steps, tau_us: tau, sequence: seq, step_bounds: bounds, prefix_unitaries: prefix })
}

/// Final ideal unitary of a plan (identity for an empty plan).
pub fn reference_unitary(plan: &TrotterPlan) -> CMatrix {
    plan.reference_unitary()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).max_abs() < tol
    }

    fn exp_two_body(kind: TwoBodyKind, ct: f64) -> CMatrix {
        two_body_matrix(kind).scale(Complex64::new(0.0, -ct)).expm().unwrap()
    }

    #[test]
    fn xy_window_matches_exponential() {
        for phi in [-0.7, 0.3, 1.9] {
            let want = exp_two_body(TwoBodyKind::XyPlus, 2.0 * phi);
            assert!(close(&u_xy(phi), &want, 1e-12));
        }
    }

    #[test]
    fn conjugation_identities_hold_to_1e10() {
        let phi = 0.37;
        // Rx1(pi) conjugation flips only sigma_y: XY -> XY-
        let mut seq = GateSequence::default();
        seq.push(rot(RotTarget::One(Qubit::Q1), Axis::X, -std::f64::consts::PI));
        seq.push(GateOp::Xy { phi });
        seq.push(rot(RotTarget::One(Qubit::Q1), Axis::X, std::f64::consts::PI));
        assert!(close(&seq.ideal_unitary(), &u_xy_minus(phi), 1e-10));

        // Ry1(pi) conjugation flips sigma_x instead: the time-reversed form
        let mut seq = GateSequence::default();
        seq.push(rot(RotTarget::One(Qubit::Q1), Axis::Y, -std::f64::consts::PI));
        seq.push(GateOp::Xy { phi });
        seq.push(rot(RotTarget::One(Qubit::Q1), Axis::Y, std::f64::consts::PI));
        assert!(close(&seq.ideal_unitary(), &u_xy_minus(-phi), 1e-10));

        // Rx12(pi/2) U_XY Rx12(-pi/2) = U_XZ
        let j = 0.81;
        let t = 0.93;
        let mut seq = GateSequence::default();
        seq.push(rot(RotTarget::Both, Axis::X, -std::f64::consts::FRAC_PI_2));
        seq.push(GateOp::Xy { phi: 2.0 * j * t });
        seq.push(rot(RotTarget::Both, Axis::X, std::f64::consts::FRAC_PI_2));
        let xx = pauli4(Axis::X, Qubit::Q1).matmul(&pauli4(Axis::X, Qubit::Q2));
        let zz = pauli4(Axis::Z, Qubit::Q1).matmul(&pauli4(Axis::Z, Qubit::Q2));
        let want = (&xx + &zz).scale(Complex64::new(0.0, -j * t)).expm().unwrap();
        assert!(close(&seq.ideal_unitary(), &want, 1e-10));
    }

    #[test]
    fn supported_pairs_compile_to_their_exponentials() {
        // random-ish samples over the supported set
        let samples = [
            (TwoBodyKind::XyPlus, 0.21, 1.7),
            (TwoBodyKind::XyMinus, -0.4, 2.3),
            (TwoBodyKind::Pair(Axis::X, Axis::X), 0.17, 0.9),
            (TwoBodyKind::Pair(Axis::Y, Axis::Y), -0.23, 1.1),
            (TwoBodyKind::Pair(Axis::Z, Axis::Z), 0.31, 0.6),
            (TwoBodyKind::Pair(Axis::X, Axis::Z), 0.11, 1.4),
            (TwoBodyKind::Pair(Axis::Y, Axis::Z), -0.09, 0.8),
            (TwoBodyKind::Pair(Axis::Z, Axis::X), 0.27, 0.5),
            (TwoBodyKind::Pair(Axis::X, Axis::Y), 0.13, 1.2),
        ];
        for (kind, j, t) in samples {
            let seq = compile_two_body(kind, j, t).unwrap();
            let u = seq.ideal_unitary();
            let want = exp_two_body(kind, TWO_PI * j * t);
            assert!(close(&u, &want, 1e-9), "{kind:?} J={j} t={t}: defect {}", (&u - &want).max_abs());
            let d = (&u.adjoint().matmul(&u) - &CMatrix::identity(4)).max_abs();
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn zero_coupling_compiles_to_identity() {
        let seq = compile_two_body(TwoBodyKind::Pair(Axis::X, Axis::X), 0.0, 1.0).unwrap();
        assert!(seq.ops.is_empty());
        let seq = compile_two_body(TwoBodyKind::XyPlus, 0.5, 0.0).unwrap();
        assert!(seq.ops.is_empty());
    }

    #[test]
    fn xy_minus_couples_only_the_even_pair() {
        let u = u_xy_minus(0.4);
        for (r, c) in [(1usize, 0usize), (2, 0), (1, 3), (2, 3), (1, 2), (2, 1)] {
            assert!(u[(r, c)].norm() < 1e-15);
        }
        assert!(u[(0, 3)].norm() > 0.1);
    }

    #[test]
    fn single_term_trotter_is_exact_for_any_step_count() {
        let spec = SpinHamiltonianSpec {
            one_body: vec![],
            two_body: vec![(TwoBodyKind::Pair(Axis::X, Axis::X), 0.05)],
        };
        let t = 11.0;
        let exact = spec.matrix().scale(Complex64::new(0.0, -t)).expm().unwrap();
        for n in [1, 3, 7] {
            let plan = trotterize(&spec, t, n).unwrap();
            assert!(close(&plan.reference_unitary(), &exact, 1e-9));
            assert!(close(&plan.sequence.ideal_unitary(), &exact, 1e-9));
        }
    }

    #[test]
    fn tim_plan_has_the_documented_window_counts() {
        let g = -0.11531802;
        let plan = trotterize(&SpinHamiltonianSpec::tim(g, g / 2.0), 35.0, 10).unwrap();
        let (two, one) = plan.sequence.window_counts();
        assert_eq!(two, 20);
        assert_eq!(one, 40);
    }

    #[test]
    fn trotter_error_halves_when_steps_double() {
        let g: f64 = -0.115;
        let spec = SpinHamiltonianSpec::tim(g, g / 2.0);
        let t = 6.0; // small enough for the asymptotic error regime
        let exact = spec.matrix().scale(Complex64::new(0.0, -t)).expm().unwrap();
        let mut errors = Vec::new();
        for n in [2usize, 4, 8, 16] {
            let plan = trotterize(&spec, t, n).unwrap();
            errors.push((&plan.reference_unitary() - &exact).max_abs());
        }
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 1.7 && ratio < 2.3, "ratios {errors:?}");
        }
    }

    #[test]
    fn spin1_triplet_sector_matches_three_level_oracle() {
        let (d, e) = (-0.115, -0.0577);
        let spec = map_spin1(d, e);
        let h4 = spec.matrix();
        // triplet basis |00>, (|10>+|01>)/sqrt2, |11>
        let mut t = CMatrix::zeros(4);
        t[(0, 0)] = Complex64::ONE;
        t[(1, 1)] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        t[(2, 1)] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        t[(3, 2)] = Complex64::ONE;
        // 3x3 restriction
        let mut h3 = CMatrix::zeros(3);
        for r in 0..3 {
            for c in 0..3 {
                let mut acc = Complex64::ZERO;
                for a in 0..4 {
                    for b in 0..4 {
                        acc += t[(a, r)].conj() * h4[(a, b)] * t[(b, c)];
                    }
                }
                h3[(r, c)] = acc;
            }
        }
        let (ev_mapped, _) = h3.hermitian_eigen();
        // spin-1 oracle: D Sz^2 + E (Sx^2 - Sy^2) in the m = +1, 0, -1 basis:
        // diag(D, 0, D) with E coupling |+1> and |-1>
        let tp = TWO_PI;
        let mut hs1 = CMatrix::zeros(3);
        hs1[(0, 0)] = Complex64::new(tp * d, 0.0);
        hs1[(2, 2)] = Complex64::new(tp * d, 0.0);
        hs1[(0, 2)] = Complex64::new(tp * e, 0.0);
        hs1[(2, 0)] = Complex64::new(tp * e, 0.0);
        let (ev_oracle, _) = hs1.hermitian_eigen();
        // spectra agree up to the dropped constant D/2 per spin pair
        let shift = ev_oracle[0] - ev_mapped[0];
        for k in 0..3 {
            assert!(
                (ev_oracle[k] - ev_mapped[k] - shift).abs() < 1e-10,
                "level {k}: {} vs {}",
                ev_oracle[k],
                ev_mapped[k] + shift
            );
        }
        assert!((shift - tp * d / 2.0).abs() < 1e-10);
    }

    #[test]
    fn empty_spin1_map_gives_identity_evolution() {
        let spec = map_spin1(0.0, 0.0);
        let plan = trotterize(&spec, 5.0, 3).unwrap();
        assert!(close(&plan.reference_unitary(), &CMatrix::identity(4), 1e-12));
        assert!(plan.sequence.ops.is_empty());
    }

    #[test]
    fn sqrt_iswap_matrix_entries() {
        let u = sqrt_iswap_matrix();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u[(1, 1)].re - s).abs() < 1e-12);
        assert!((u[(1, 2)] - Complex64::new(0.0, s)).norm() < 1e-12);
        assert!((u[(2, 1)] - Complex64::new(0.0, s)).norm() < 1e-12);
        assert_eq!(u[(0, 0)], Complex64::ONE);
        assert_eq!(u[(3, 3)], Complex64::ONE);
        // applied twice: iSWAP on the computational subspace
        let twice = u.matmul(&u);
        assert!((twice[(1, 2)] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(twice[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn plan_serialization_lists_gates_in_order() {
        let g = -0.115;
        let plan = trotterize(&SpinHamiltonianSpec::tim(g, g / 2.0), 10.0, 2).unwrap();
        let text = plan.sequence.to_text();
        assert_eq!(text.lines().count(), plan.sequence.ops.len());
        assert!(text.lines().next().unwrap().starts_with("rz 12"));
    }
}
