//! Public Lindblad-equation interface: density matrices, dissipator
//! specifications, thermal channels and the `evolve` entry points.

use num_complex::Complex64;

use super::generator::{Generator, SparseOp};
use super::integrator::{hermitize_and_trace_defect, integrate, IntegratorConfig};
use super::HZ_TO_PER_US;
use crate::operators::SubsystemLayout;
use crate::{CMatrix, Error, Result};

/// Density matrix tied to its subsystem layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub mat: CMatrix,
    pub layout: SubsystemLayout,
}

impl DensityMatrix {
    /// Pure state |psi><psi|.
    pub fn pure(psi: &[Complex64], layout: &SubsystemLayout) -> Result<Self> {
        if psi.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch { expected: layout.total_dim(), found: psi.len() });
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::UnnormalizedState(norm));
        }
        let n = psi.len();
        let mat = CMatrix::from_fn(n, |r, c| psi[r] * psi[c].conj());
        Ok(DensityMatrix { mat, layout: layout.clone() })
    }

    /// Computational product state |n1, down, n2> as a density matrix.
    pub fn basis(n1: usize, n2: usize, layout: &SubsystemLayout) -> Result<Self> {
        let mut psi = vec![Complex64::ZERO; layout.total_dim()];
        psi[layout.index_of(n1, crate::operators::TRANSMON_DOWN, n2)] = Complex64::ONE;
        Self::pure(&psi, layout)
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Population of basis index `a`.
    pub fn population(&self, a: usize) -> f64 {
        self.mat[(a, a)].re
    }

    pub fn purity(&self) -> f64 {
        self.mat.matmul(&self.mat).trace().re
    }

    /// Smallest eigenvalue (numerical-positivity diagnostic).
    pub fn min_eigenvalue(&self) -> f64 {
        let (ev, _) = self.mat.hermitian_eigen();
        ev[0]
    }

    /// Check Hermiticity, unit trace and numerical positivity.
    pub fn validate(&self, trace_tol: f64, pos_tol: f64) -> Result<()> {
        if self.mat.hermiticity_defect() > 1e-10 {
            return Err(Error::NonFiniteInput);
        }
        let td = (self.trace() - 1.0).abs();
        if td > trace_tol {
            return Err(Error::TraceDrift { t: f64::NAN, drift: td });
        }
        if self.min_eigenvalue() < -pos_tol {
            return Err(Error::NonFiniteInput);
        }
        Ok(())
    }
}

/// Jump operators with their rates in Hz.
#[derive(Debug, Clone, Default)]
pub struct LindbladSpec {
    channels: Vec<(CMatrix, f64)>,
}

impl LindbladSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, jump: CMatrix, rate_hz: f64) -> Result<()> {
        if rate_hz < 0.0 || !rate_hz.is_finite() {
            return Err(Error::InvalidPulse("dissipation rate must be finite and >= 0"));
        }
        self.channels.push((jump, rate_hz));
        Ok(())
    }

    pub fn with(mut self, jump: CMatrix, rate_hz: f64) -> Result<Self> {
        self.push(jump, rate_hz)?;
        Ok(self)
    }

    pub fn extend(&mut self, other: LindbladSpec) {
        self.channels.extend(other.channels);
    }

    pub fn channels(&self) -> &[(CMatrix, f64)] {
        &self.channels
    }

    pub(crate) fn compile(&self) -> Vec<(SparseOp, f64)> {
        self.channels
            .iter()
            .filter(|(_, r)| *r > 0.0)
            .map(|(m, r)| (SparseOp::from_dense(m, 1e-14), r * HZ_TO_PER_US))
            .collect()
    }
}

/// Standard Lindblad channels of a bosonic thermal reservoir with coupling
/// `chi` and occupation `n_bar`: downward rate `chi (n_bar + 1)` on `b`,
/// upward rate `chi n_bar` on `b^dag`.
pub fn thermal_dissipators(chi_hz: f64, n_bar: f64, b: &CMatrix) -> Result<LindbladSpec> {
    if chi_hz < 0.0 || n_bar < 0.0 {
        return Err(Error::InvalidPulse("thermal parameters must be non-negative"));
    }
    LindbladSpec::new()
        .with(b.clone(), chi_hz * (n_bar + 1.0))?
        .with(b.adjoint(), chi_hz * n_bar)
}

/// Bose occupation `1 / (exp(omega/T) - 1)`; `omega` and `T` in the same
/// frequency units.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / ((omega / temperature).exp() - 1.0)
}

/// Integrate the master equation, returning the in-frame states at `t_grid`.
///
/// Each returned state is re-Hermitized; trace drift beyond the configured
/// tolerance aborts with a diagnostic. The in-frame state coincides with the
/// lab state at `t = 0` and stays diagonal-equivalent to it (populations and
/// leakage agree; coherences carry the frame phases of
/// [`Generator::frame_phases_at`]).
pub fn lindblad_evolve(
    gen: &Generator,
    diss: &LindbladSpec,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<DensityMatrix>> {
    let mut out = Vec::with_capacity(t_grid.len());
    let layout = rho0.layout.clone();
    let n = gen.dim;
    let channels = diss.compile();
    integrate(
        gen,
        &channels,
        rho0.mat.data(),
        t_grid,
        cfg,
        |_, rho| {
            let mut snap = rho.to_vec();
            hermitize_and_trace_defect(&mut snap, n);
            out.push(DensityMatrix {
                mat: CMatrix::from_rows(n, &snap)?,
                layout: layout.clone(),
            });
            Ok(())
        },
        |_, _| Ok(()),
    )?;
    Ok(out)
}

/// Like [`lindblad_evolve`] but streaming: `observer(t, rho)` is invoked on
/// the integrator's output stride, and only the final state is returned.
pub fn lindblad_evolve_observed(
    gen: &Generator,
    diss: &LindbladSpec,
    rho0: &DensityMatrix,
    cfg: &IntegratorConfig,
    mut observer: impl FnMut(f64, &CMatrix) -> Result<()>,
) -> Result<DensityMatrix> {
    let n = gen.dim;
    let channels = diss.compile();
    let end = gen.total_duration();
    let mut final_rho = integrate(
        gen,
        &channels,
        rho0.mat.data(),
        &[end],
        cfg,
        |_, _| Ok(()),
        |t, rho| {
            let m = CMatrix::from_rows(n, rho)?;
            observer(t, &m)
        },
    )?;
    hermitize_and_trace_defect(&mut final_rho, n);
    Ok(DensityMatrix { mat: CMatrix::from_rows(n, &final_rho)?, layout: rho0.layout.clone() })
}
