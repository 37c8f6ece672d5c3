//! Hamiltonians of the two-NR + transmon platform and the closed-form
//! effective quantities derived from them.
//!
//! Everything here is a pure function of immutable inputs. Frequencies are
//! MHz (quoted as `omega/2pi`), rates are Hz; angular factors enter only
//! when a matrix is assembled.

use num_complex::Complex64;

use crate::operators::{annihilation_operator, embed, pauli, PauliAxis, Subsystem, SubsystemLayout, TRANSMON_DOWN};
use crate::{CMatrix, Error, Result, TWO_PI};

/// Single-NR anharmonicity model.
///
/// The diagonal Kerr form shifts Fock level `n` by `beta n (n-1)` and leaves
/// the eigenvectors untouched; the quartic form is the standard `U x^4`
/// displacement nonlinearity, which also mixes Fock states of equal parity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NonlinearityModel {
    DiagonalKerr { beta_mhz: f64 },
    Quartic { u_mhz: f64 },
}

impl NonlinearityModel {
    /// Nonlinear term on a single mode of `dim` Fock levels (MHz units,
    /// no angular factor).
    pub fn term(&self, dim: usize) -> Result<CMatrix> {
        let b = annihilation_operator(dim)?;
        match *self {
            NonlinearityModel::DiagonalKerr { beta_mhz } => {
                // b'b'bb = n(n-1) on the diagonal
                let bb = b.matmul(&b);
                Ok(bb.adjoint().matmul(&bb).scale(Complex64::new(beta_mhz, 0.0)))
            }
            NonlinearityModel::Quartic { u_mhz } => {
                let x = &b + &b.adjoint();
                let x2 = x.matmul(&x);
                Ok(x2.matmul(&x2).scale(Complex64::new(u_mhz, 0.0)))
            }
        }
    }
}

/// Physical constants of the full two-NR + transmon system.
///
/// `gamma_*` are inverse lifetimes in Hz; `*_d` are pure-dephasing rates of
/// the corresponding Lindblad dissipators.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub omega1_mhz: f64,
    pub omega2_mhz: f64,
    pub transmon_mhz: f64,
    pub nonlinearity1: NonlinearityModel,
    pub nonlinearity2: NonlinearityModel,
    pub g1_mhz: f64,
    pub g2_mhz: f64,
    pub gamma1_hz: f64,
    pub gamma2_hz: f64,
    pub gamma1_d_hz: f64,
    pub gamma2_d_hz: f64,
    pub gamma_tr_hz: f64,
    pub gamma_tr_d_hz: f64,
}

impl Default for SystemParams {
    /// Operating point used throughout: 85/75 MHz resonators with 3 MHz Kerr
    /// shift, 10 GHz idle transmon, 6 MHz couplings, 50 Hz NR decay, 100 kHz
    /// transmon decay and dephasing, 100 Hz NR dephasing baseline.
    fn default() -> Self {
        SystemParams {
            omega1_mhz: 85.0,
            omega2_mhz: 75.0,
            transmon_mhz: 10_000.0,
            nonlinearity1: NonlinearityModel::DiagonalKerr { beta_mhz: 3.0 },
            nonlinearity2: NonlinearityModel::DiagonalKerr { beta_mhz: 3.0 },
            g1_mhz: 6.0,
            g2_mhz: 6.0,
            gamma1_hz: 50.0,
            gamma2_hz: 50.0,
            gamma1_d_hz: 100.0,
            gamma2_d_hz: 100.0,
            gamma_tr_hz: 1.0e5,
            gamma_tr_d_hz: 1.0e5,
        }
    }
}

impl SystemParams {
    pub fn detuning1_mhz(&self) -> f64 {
        self.omega1_mhz - self.transmon_mhz
    }

    pub fn detuning2_mhz(&self) -> f64 {
        self.omega2_mhz - self.transmon_mhz
    }

    /// Kerr coefficient of NR `i`, if the diagonal model is in use.
    pub fn kerr_mhz(&self, nr: usize) -> Option<f64> {
        let m = if nr == 1 { self.nonlinearity1 } else { self.nonlinearity2 };
        match m {
            NonlinearityModel::DiagonalKerr { beta_mhz } => Some(beta_mhz),
            NonlinearityModel::Quartic { .. } => None,
        }
    }

    /// Soft perturbative-validity warnings (g/Delta beyond 0.1). The
    /// simulator itself is non-perturbative, so these never block a run.
    pub fn validity_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        for (name, g, d) in [
            ("g1/Delta1", self.g1_mhz, self.detuning1_mhz()),
            ("g2/Delta2", self.g2_mhz, self.detuning2_mhz()),
        ] {
            let ratio = (g / d).abs();
            if ratio > 0.1 {
                w.push(format!("{name} = {ratio:.3} exceeds 0.1; effective-model accuracy degrades"));
            }
        }
        w
    }

    pub fn validate(&self) -> Result<()> {
        let freqs = [self.omega1_mhz, self.omega2_mhz, self.transmon_mhz, self.g1_mhz, self.g2_mhz];
        if freqs.iter().any(|f| !f.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if self.omega1_mhz <= 0.0 || self.omega2_mhz <= 0.0 || self.transmon_mhz <= 0.0 {
            return Err(Error::InvalidPulse("frequencies must be positive"));
        }
        let rates = [
            self.gamma1_hz,
            self.gamma2_hz,
            self.gamma1_d_hz,
            self.gamma2_d_hz,
            self.gamma_tr_hz,
            self.gamma_tr_d_hz,
        ];
        if rates.iter().any(|r| *r < 0.0 || !r.is_finite()) {
            return Err(Error::InvalidPulse("rates must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Parameters of the NR + low-frequency SC element used to engineer the
/// single-phonon nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams {
    pub omega_nr_mhz: f64,
    pub omega_sc_mhz: f64,
    pub g_mhz: f64,
}

impl RabiParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_sc_mhz > self.omega_nr_mhz && self.omega_nr_mhz > 0.0) {
            return Err(Error::ProtocolViolation("need omega_sc > omega_nr > 0"));
        }
        if self.g_mhz < 0.0 {
            return Err(Error::InvalidPulse("coupling must be non-negative"));
        }
        Ok(())
    }
}

/// Effective two-qubit parameters: XY coupling and single-qubit shifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    pub gamma_xy_mhz: f64,
    pub lambda1_mhz: f64,
    pub lambda2_mhz: f64,
}

/// Dressed-spectrum summary shared by the Rabi-model and quartic-model
/// diagnostics. The first three levels (ground, first, second excited) are
/// tracked; `fidelities` are amplitude overlaps `|<n|psi_n>|` against the
/// bare Fock ladder, matching the level labels 1..3 counted from the ground
/// state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues_mhz: Vec<f64>,
    pub delta_mhz: f64,
    pub p_n: [f64; 3],
    pub leakage: [f64; 3],
    pub fidelities: [f64; 3],
    pub x01: f64,
    pub x12: f64,
    pub x_diag_max: f64,
    pub calibrated_u_mhz: Option<f64>,
}

/// Full static Hamiltonian `H0 + Hint` on the given layout, in angular units
/// (rad/us). No rotating-wave approximation is applied to the coupling.
pub fn build_full_hamiltonian(params: &SystemParams, layout: &SubsystemLayout) -> Result<CMatrix> {
    params.validate()?;
    let nb = layout.fock_levels();
    if layout.dim_of(Subsystem::Transmon) != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: layout.dim_of(Subsystem::Transmon) });
    }
    let b = annihilation_operator(nb)?;
    let n = b.adjoint().matmul(&b);

    let h1 = &n.scale(Complex64::new(params.omega1_mhz, 0.0)) + &params.nonlinearity1.term(nb)?;
    let h2 = &n.scale(Complex64::new(params.omega2_mhz, 0.0)) + &params.nonlinearity2.term(nb)?;
    let x = &b + &b.adjoint();

    let mut h = embed(&h1, Subsystem::Nr1, layout)?;
    h = &h + &embed(&h2, Subsystem::Nr2, layout)?;
    h = &h + &embed(&pauli(PauliAxis::Z), Subsystem::Transmon, layout)?
        .scale(Complex64::new(params.transmon_mhz / 2.0, 0.0));

    let sx = embed(&pauli(PauliAxis::X), Subsystem::Transmon, layout)?;
    let x1 = embed(&x, Subsystem::Nr1, layout)?;
    let x2 = embed(&x, Subsystem::Nr2, layout)?;
    h = &h + &x1.matmul(&sx).scale(Complex64::new(params.g1_mhz, 0.0));
    h = &h + &x2.matmul(&sx).scale(Complex64::new(params.g2_mhz, 0.0));

    Ok(h.scale(Complex64::new(TWO_PI, 0.0)))
}

/// Single-phonon shift `delta = omega_21 - omega_10` of one anharmonic mode,
/// from exact diagonalization of `omega b'b + H_nl` at cutoff `n_max`.
pub fn nonlinear_shift(model: NonlinearityModel, omega_mhz: f64, n_max: usize) -> Result<f64> {
    if n_max < 3 {
        return Err(Error::InvalidDimension(n_max));
    }
    let dim = n_max + 1;
    let b = annihilation_operator(dim)?;
    let n = b.adjoint().matmul(&b);
    let h = &n.scale(Complex64::new(omega_mhz, 0.0)) + &model.term(dim)?;
    let (ev, _) = h.hermitian_eigen();
    Ok((ev[2] - ev[1]) - (ev[1] - ev[0]))
}

/// Calibrate the quartic coefficient `U` so its single-phonon shift equals
/// `delta_target_mhz`, then report eigenvector fidelities and `b` matrix
/// elements of the first three quartic eigenstates.
///
/// Bisection bracket is `U in [0, 0.1 omega]`, relative tolerance 1e-6.
pub fn dressed_basis_report(omega_mhz: f64, delta_target_mhz: f64, n_max: usize) -> Result<SpectrumReport> {
    if n_max < 3 {
        return Err(Error::InvalidDimension(n_max));
    }
    let mut lo = 0.0f64;
    let mut hi = 0.1 * omega_mhz;
    let shift = |u: f64| nonlinear_shift(NonlinearityModel::Quartic { u_mhz: u }, omega_mhz, n_max);
    let at_hi = shift(hi)?;
    if at_hi < delta_target_mhz {
        return Err(Error::CalibrationFailed { target_mhz: delta_target_mhz, reached_mhz: at_hi });
    }
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if shift(mid)? < delta_target_mhz {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-6 * hi.max(1e-300) {
            break;
        }
    }
    let u = 0.5 * (lo + hi);

    let dim = n_max + 1;
    let b = annihilation_operator(dim)?;
    let n = b.adjoint().matmul(&b);
    let h = &n.scale(Complex64::new(omega_mhz, 0.0))
        + &NonlinearityModel::Quartic { u_mhz: u }.term(dim)?;
    let (ev, mut v) = h.hermitian_eigen();

    // gauge: make <n|psi_n> real positive
    for k in 0..dim {
        let ph = v[(k, k)];
        if ph.norm() > 0.0 {
            let u_ph = ph.conj() / ph.norm();
            for r in 0..dim {
                v[(r, k)] *= u_ph;
            }
        }
    }
    let col = |k: usize| -> Vec<Complex64> { (0..dim).map(|r| v[(r, k)]).collect() };
    let x_elem = |k: usize, l: usize| -> f64 {
        let bl = b.apply(&col(l));
        col(k).iter().zip(&bl).map(|(a, c)| a.conj() * c).sum::<Complex64>().norm()
    };
    let fid = |k: usize| v[(k, k)].norm();

    Ok(SpectrumReport {
        eigenvalues_mhz: ev[..4.min(dim)].to_vec(),
        delta_mhz: (ev[2] - ev[1]) - (ev[1] - ev[0]),
        p_n: [fid(0).powi(2), fid(1).powi(2), fid(2).powi(2)],
        leakage: [0.0; 3],
        fidelities: [fid(0), fid(1), fid(2)],
        x01: x_elem(0, 1),
        x12: x_elem(1, 2),
        x_diag_max: (0..3).map(|k| x_elem(k, k)).fold(0.0, f64::max),
        calibrated_u_mhz: Some(u),
    })
}

/// Exact spectrum of the NR-SC Rabi model with convergence control: the
/// cutoff grows in steps of 5 until `delta` is stable to 1%.
pub fn rabi_spectrum(params: &RabiParams, n_max: usize) -> Result<SpectrumReport> {
    params.validate()?;
    let max_cutoff = 80usize;
    let mut cutoff = n_max.max(8);
    let mut prev = rabi_report_at(params, cutoff)?;
    loop {
        let next_cutoff = cutoff + 5;
        if next_cutoff > max_cutoff {
            return Err(Error::CutoffNotConverged { n_max: cutoff, rel_change: f64::NAN });
        }
        let next = rabi_report_at(params, next_cutoff)?;
        let denom = prev.delta_mhz.abs().max(1e-12);
        let rel = (next.delta_mhz - prev.delta_mhz).abs() / denom;
        if rel < 0.01 || (prev.delta_mhz.abs() < 1e-12 && next.delta_mhz.abs() < 1e-12) {
            return Ok(next);
        }
        prev = next;
        cutoff = next_cutoff;
    }
}

fn rabi_report_at(params: &RabiParams, n_max: usize) -> Result<SpectrumReport> {
    let nb = n_max + 1;
    let layout = SubsystemLayout::from_dims(vec![nb, 2])?;
    let dim = layout.total_dim();
    let b = annihilation_operator(nb)?;
    let nop = b.adjoint().matmul(&b);
    let x = &b + &b.adjoint();

    // manual 2-factor embedding: (NR, SC)
    let kron = |a: &CMatrix, c: &CMatrix| a.kron(c);
    let i2 = CMatrix::identity(2);
    let ib = CMatrix::identity(nb);
    let h = &(&kron(&nop, &i2).scale(Complex64::new(params.omega_nr_mhz, 0.0))
        + &kron(&ib, &pauli(PauliAxis::Z)).scale(Complex64::new(params.omega_sc_mhz / 2.0, 0.0)))
        + &kron(&x, &pauli(PauliAxis::X)).scale(Complex64::new(params.g_mhz, 0.0));

    let (ev, v) = h.hermitian_eigen();
    let bare = |n: usize| n * 2 + TRANSMON_DOWN;

    // dressed state k_n = argmax |<n,down|psi_k>|^2 over the low spectrum
    let mut k_of = [0usize; 4];
    for (n, k_slot) in k_of.iter_mut().enumerate() {
        let mut best = (0usize, -1.0f64);
        for k in 0..dim {
            let w = v[(bare(n), k)].norm_sqr();
            if w > best.1 {
                best = (k, w);
            }
        }
        *k_slot = best.0;
    }
    let p = |n: usize| v[(bare(n), k_of[n])].norm_sqr();
    let leak = |n: usize| {
        let mut s = 0.0;
        for m in 0..nb {
            s += v[(m * 2 + (1 - TRANSMON_DOWN), k_of[n])].norm_sqr();
        }
        s
    };
    let e = |n: usize| ev[k_of[n]];
    let delta = (e(2) - e(1)) - (e(1) - e(0));

    let bx = kron(&b, &i2);
    let col = |k: usize| -> Vec<Complex64> { (0..dim).map(|r| v[(r, k)]).collect() };
    let x_elem = |k: usize, l: usize| -> f64 {
        let bl = bx.apply(&col(k_of[l]));
        col(k_of[k]).iter().zip(&bl).map(|(a, c)| a.conj() * c).sum::<Complex64>().norm()
    };

    Ok(SpectrumReport {
        eigenvalues_mhz: (0..4).map(e).collect(),
        delta_mhz: delta,
        p_n: [p(0), p(1), p(2)],
        leakage: [leak(0), leak(1), leak(2)],
        fidelities: [p(0).sqrt(), p(1).sqrt(), p(2).sqrt()],
        x01: x_elem(0, 1),
        x12: x_elem(1, 2),
        x_diag_max: (0..3).map(|k| x_elem(k, k)).fold(0.0, f64::max),
        calibrated_u_mhz: None,
    })
}

/// 4th-order perturbative nonlinear shift of the Rabi model, all four
/// bracket terms; rotating and counter-rotating contributions both enter.
pub fn perturbative_delta(params: &RabiParams) -> Result<f64> {
    let (w, omega, g) = (params.omega_nr_mhz, params.omega_sc_mhz, params.g_mhz);
    if (omega - w).abs() < 1e-12 {
        return Err(Error::ResonantDenominator("perturbative shift (Omega = omega)"));
    }
    let d = omega - w;
    let s = omega + w;
    Ok(2.0 * g.powi(4) * (2.0 / (d * d * s) + 2.0 / (s * s * d) + 1.0 / (s * s * s) + 1.0 / (d * d * d)))
}

/// Effective XY coupling between the qubits, mediated by virtual transmon
/// excitation.
pub fn xy_coupling(w1: f64, w2: f64, omega: f64, g1: f64, g2: f64) -> Result<f64> {
    let d1 = omega * omega - w1 * w1;
    let d2 = omega * omega - w2 * w2;
    if d1.abs() < 1e-12 || d2.abs() < 1e-12 {
        return Err(Error::ResonantDenominator("XY coupling"));
    }
    Ok(4.0 * g1 * g2 * omega * (w1 * w1 + w2 * w2 - 2.0 * omega * omega) / (d1 * d2))
}

/// Transmon-induced renormalization of a single qubit frequency. The applied
/// compensation is the negative of this value.
pub fn qubit_shift(w: f64, omega: f64, g: f64, beta: f64) -> Result<f64> {
    let d1 = 2.0 * beta + omega + w;
    let d2 = omega * omega - w * w;
    if d1.abs() < 1e-12 || d2.abs() < 1e-12 {
        return Err(Error::ResonantDenominator("qubit shift"));
    }
    Ok(-2.0 * g * g * (omega * omega + w * (2.0 * beta + omega)) / (d1 * d2))
}

/// Closed-form effective parameters at the system's current operating point.
///
/// Requires the diagonal-Kerr nonlinearity (the shift formula contains beta).
pub fn effective_params(params: &SystemParams) -> Result<EffectiveParams> {
    let b1 = params.kerr_mhz(1).ok_or(Error::ProtocolViolation(
        "effective parameters need the diagonal-Kerr model",
    ))?;
    let b2 = params.kerr_mhz(2).ok_or(Error::ProtocolViolation(
        "effective parameters need the diagonal-Kerr model",
    ))?;
    Ok(EffectiveParams {
        gamma_xy_mhz: xy_coupling(
            params.omega1_mhz,
            params.omega2_mhz,
            params.transmon_mhz,
            params.g1_mhz,
            params.g2_mhz,
        )?,
        lambda1_mhz: qubit_shift(params.omega1_mhz, params.transmon_mhz, params.g1_mhz, b1)?,
        lambda2_mhz: qubit_shift(params.omega2_mhz, params.transmon_mhz, params.g2_mhz, b2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_hamiltonian_is_block_sum_of_bare_spectra() {
        let mut p = SystemParams::default();
        p.g1_mhz = 0.0;
        p.g2_mhz = 0.0;
        let layout = SubsystemLayout::with_fock_cutoff(2);
        let h = build_full_hamiltonian(&p, &layout).unwrap();
        let (ev, _) = h.hermitian_eigen();
        // ground level: -Omega/2; first excited: omega2 - Omega/2
        assert!((ev[0] / TWO_PI + p.transmon_mhz / 2.0).abs() < 1e-9);
        assert!((ev[1] / TWO_PI - (p.omega2_mhz - p.transmon_mhz / 2.0)).abs() < 1e-9);
        assert!(h.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn kerr_term_shifts_fock_levels_quadratically() {
        let m = NonlinearityModel::DiagonalKerr { beta_mhz: 3.0 };
        let t = m.term(5).unwrap();
        for n in 0..5usize {
            let want = 3.0 * (n * n.saturating_sub(1)) as f64;
            assert!((t[(n, n)].re - want).abs() < 1e-12, "level {n}");
        }
    }

    #[test]
    fn ground_state_is_vacuum_at_operating_point() {
        let p = SystemParams::default();
        let layout = SubsystemLayout::standard();
        let h = build_full_hamiltonian(&p, &layout).unwrap();
        let (_, v) = h.hermitian_eigen();
        let vac = layout.index_of(0, TRANSMON_DOWN, 0);
        assert!(v[(vac, 0)].norm_sqr() > 0.9999);
    }

    #[test]
    fn diagonal_kerr_shift_is_twice_beta() {
        let d = nonlinear_shift(NonlinearityModel::DiagonalKerr { beta_mhz: 3.0 }, 85.0, 10).unwrap();
        assert!((d - 6.0).abs() < 1e-9);
    }

    #[test]
    fn quartic_shift_matches_first_order_perturbation_for_small_u() {
        // oracle: <n|x^4|n> = 6n^2 + 6n + 3, so delta -> 12 U as U -> 0
        let omega = 85.0;
        for u in [1e-4, 1e-3] {
            let d = nonlinear_shift(NonlinearityModel::Quartic { u_mhz: u }, omega, 10).unwrap();
            assert!((d / u - 12.0).abs() < 0.02, "U={u}: delta/U = {}", d / u);
        }
    }

    #[test]
    fn quartic_exceeds_diagonal_shift_at_equal_u() {
        let omega = 85.0;
        for frac in [0.01, 0.05, 0.1] {
            let u = frac * omega;
            let dq = nonlinear_shift(NonlinearityModel::Quartic { u_mhz: u }, omega, 10).unwrap();
            let dd = nonlinear_shift(NonlinearityModel::DiagonalKerr { beta_mhz: u }, omega, 10).unwrap();
            assert!(dq > dd, "U/omega={frac}: quartic {dq} <= diagonal {dd}");
        }
    }

    #[test]
    fn nonlinear_shift_rejects_small_cutoff() {
        assert!(nonlinear_shift(NonlinearityModel::DiagonalKerr { beta_mhz: 1.0 }, 85.0, 2).is_err());
    }

    #[test]
    fn dressed_report_recovers_harmonic_limit() {
        let r = dressed_basis_report(85.0, 1e-6, 10).unwrap();
        for f in r.fidelities {
            assert!(f > 0.999999);
        }
        assert!((r.x01 - 1.0).abs() < 1e-4);
        assert!((r.x12 - 2f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn quartic_parity_forbids_diagonal_b_elements() {
        let r = dressed_basis_report(85.0, 6.0, 10).unwrap();
        assert!(r.x_diag_max < 1e-10, "X_nn = {}", r.x_diag_max);
    }

    #[test]
    fn rabi_spectrum_uncoupled_is_trivial() {
        let r = rabi_spectrum(&RabiParams { omega_nr_mhz: 100.0, omega_sc_mhz: 500.0, g_mhz: 0.0 }, 10).unwrap();
        assert!(r.delta_mhz.abs() < 1e-9);
        for n in 0..3 {
            assert!((r.p_n[n] - 1.0).abs() < 1e-12);
            assert!(r.leakage[n] < 1e-12);
        }
    }

    #[test]
    fn rabi_delta_monotone_in_coupling() {
        let mut last = -1.0;
        for g in [0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0] {
            let r = rabi_spectrum(&RabiParams { omega_nr_mhz: 100.0, omega_sc_mhz: 500.0, g_mhz: g }, 20).unwrap();
            assert!(r.delta_mhz >= last, "delta not monotone at g={g}");
            last = r.delta_mhz;
        }
    }

    #[test]
    fn perturbative_delta_limits() {
        let p0 = RabiParams { omega_nr_mhz: 100.0, omega_sc_mhz: 500.0, g_mhz: 0.0 };
        assert_eq!(perturbative_delta(&p0).unwrap(), 0.0);
        // frozen from the exact-diagonalization cross-check at g = 10 MHz
        let p = RabiParams { g_mhz: 10.0, ..p0 };
        let d = perturbative_delta(&p).unwrap();
        assert!((d - 1.09953e-3).abs() / 1.09953e-3 < 1e-4, "delta = {d}");
    }

    #[test]
    fn perturbative_delta_rejects_resonance() {
        let p = RabiParams { omega_nr_mhz: 100.0, omega_sc_mhz: 100.0, g_mhz: 1.0 };
        assert!(perturbative_delta(&p).is_err());
    }

    #[test]
    fn effective_params_trivial_and_reduced_forms() {
        let mut p = SystemParams::default();
        p.g1_mhz = 0.0;
        let e = effective_params(&p).unwrap();
        assert_eq!(e.gamma_xy_mhz, 0.0);
        assert_eq!(e.lambda1_mhz, 0.0);

        // beta = 0 reduction: lambda = -2 g^2 Omega / (Omega^2 - omega^2)
        let w = 85.0;
        let omega = 2500.0;
        let g = 6.0;
        let lam = qubit_shift(w, omega, g, 0.0).unwrap();
        let want = -2.0 * g * g * omega / (omega * omega - w * w);
        assert!((lam - want).abs() < 1e-12);
    }

    #[test]
    fn xy_coupling_at_two_qubit_operating_point() {
        // frozen closed-form value; cross-checked against the full-model
        // swap oscillation in the integration tests
        let g = xy_coupling(80.0, 80.0, 2500.0, 6.0, 6.0).unwrap();
        assert!((g + 0.11531802).abs() < 1e-6, "Gamma = {g}");
        // Gamma ~ 1/Omega asymptotics: 10 GHz value is about 4x smaller
        let g10 = xy_coupling(80.0, 80.0, 10_000.0, 6.0, 6.0).unwrap();
        assert!((g / g10 - 4.0).abs() < 0.01);
    }
}
