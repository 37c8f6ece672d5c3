//! Bloch-Redfield master equation with partial secular approximation.
//!
//! The static Hamiltonian is diagonalized exactly, then the environment
//! couplings generate transition and dephasing rates between the true
//! eigenstates. With white, zero-temperature spectral functions upward
//! transitions are absent. Cross terms between Liouvillian elements whose
//! Bohr-frequency mismatch exceeds the secular cutoff (10x the largest rate)
//! are dropped; the population block and any residual near-degenerate
//! coherence clusters are exponentiated exactly, so the propagation is
//! uniform-grid fast regardless of how slow the decay is.

use num_complex::Complex64;

use super::lindblad::DensityMatrix;
use super::HZ_TO_PER_US;
use crate::{CMatrix, Error, Result};

/// White spectral function of one bath: `S(0) = gamma_d`, `S(w > 0) = gamma`,
/// `S(w < 0) = 0` (zero temperature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFunction {
    pub gamma_hz: f64,
    pub gamma_d_hz: f64,
}

impl SpectralFunction {
    /// Evaluate at Bohr frequency `w` (rad/us); returns a rate in 1/us.
    fn at(&self, w: f64) -> f64 {
        // tolerance window around zero: rates are ~1e-4/us, spacings ~1/us
        if w.abs() < 1e-6 {
            self.gamma_d_hz * HZ_TO_PER_US
        } else if w > 0.0 {
            self.gamma_hz * HZ_TO_PER_US
        } else {
            0.0
        }
    }
}

/// One system-bath coupling: a Hermitian system operator with its bath
/// spectrum.
#[derive(Debug, Clone)]
pub struct NoiseCoupling {
    pub op: CMatrix,
    pub spectrum: SpectralFunction,
}

impl NoiseCoupling {
    pub fn new(op: CMatrix, gamma_hz: f64, gamma_d_hz: f64) -> Result<Self> {
        if op.hermiticity_defect() > 1e-10 {
            return Err(Error::NonFiniteInput);
        }
        if gamma_hz < 0.0 || gamma_d_hz < 0.0 {
            return Err(Error::InvalidPulse("spectral rates must be non-negative"));
        }
        Ok(NoiseCoupling { op, spectrum: SpectralFunction { gamma_hz, gamma_d_hz } })
    }
}

/// Evolve `rho0` under the Bloch-Redfield equation of the static `h`
/// (angular units), sampling at `t_grid` (us). States are returned in the
/// original (lab) basis.
pub fn bloch_redfield_evolve(
    h: &CMatrix,
    couplings: &[NoiseCoupling],
    rho0: &DensityMatrix,
    t_grid: &[f64],
) -> Result<Vec<DensityMatrix>> {
    let n = h.dim();
    if rho0.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rho0.dim() });
    }
    if h.hermiticity_defect() > 1e-9 * h.max_abs().max(1.0) {
        return Err(Error::NonFiniteInput);
    }
    let (ev, v) = h.hermitian_eigen();

    // couplings in the eigenbasis
    let ops_eig: Vec<CMatrix> =
        couplings.iter().map(|c| v.adjoint().matmul(&c.op).matmul(&v)).collect();

    // downward transition rates W[a -> b] = sum_k S_k(w_ab) |<b|O_k|a>|^2
    let mut w = vec![vec![0.0f64; n]; n];
    for (c, a_eig) in couplings.iter().zip(&ops_eig) {
        for from in 0..n {
            for to in 0..n {
                if from == to {
                    continue;
                }
                let bohr = ev[from] - ev[to];
                w[from][to] += c.spectrum.at(bohr) * a_eig[(to, from)].norm_sqr();
            }
        }
    }
    let out_rate: Vec<f64> = (0..n).map(|a| w[a].iter().sum()).collect();

    // secular cutoff: 10x the largest rate
    let max_rate = out_rate
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
        .max(couplings.iter().map(|c| c.spectrum.at(0.0)).fold(0.0, f64::max));
    let cutoff = 10.0 * max_rate;

    // rho0 in the eigenbasis
    let rho_e0 = v.adjoint().matmul(&rho0.mat).matmul(&v);

    // population block: dp/dt = M p, exact propagation on the grid
    let mut grid: Vec<f64> = t_grid.to_vec();
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut m = CMatrix::zeros(n);
    for a in 0..n {
        m[(a, a)] = Complex64::new(-out_rate[a], 0.0);
        for b in 0..n {
            if a != b {
                m[(a, b)] = Complex64::new(w[b][a], 0.0);
            }
        }
    }

    // coherence clusters by Bohr-frequency degeneracy within the cutoff
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                pairs.push((a, b));
            }
        }
    }
    let bohr = |&(a, b): &(usize, usize)| ev[a] - ev[b];
    let mut cluster_of = vec![usize::MAX; pairs.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..pairs.len() {
        if cluster_of[i] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let mut members = vec![i];
        cluster_of[i] = id;
        for j in (i + 1)..pairs.len() {
            if cluster_of[j] == usize::MAX && (bohr(&pairs[i]) - bohr(&pairs[j])).abs() <= cutoff {
                cluster_of[j] = id;
                members.push(j);
            }
        }
        clusters.push(members);
    }

    // Redfield coefficient coupling coherence (a,b) to (c,d) (secular-kept)
    let r_elem = |a: usize, b: usize, c: usize, d: usize| -> Complex64 {
        let mut r = Complex64::ZERO;
        for (cpl, a_eig) in couplings.iter().zip(&ops_eig) {
            let s = &cpl.spectrum;
            let mut val = Complex64::ZERO;
            // + A_ac A_db [S(w_ca) + S(w_db)] / 2
            val += a_eig[(a, c)]
                * a_eig[(d, b)]
                * Complex64::new(0.5 * (s.at(ev[c] - ev[a]) + s.at(ev[d] - ev[b])), 0.0);
            if b == d {
                let mut acc = Complex64::ZERO;
                for e in 0..n {
                    acc += a_eig[(a, e)] * a_eig[(e, c)] * Complex64::new(s.at(ev[c] - ev[e]), 0.0);
                }
                val -= acc * Complex64::new(0.5, 0.0);
            }
            if a == c {
                let mut acc = Complex64::ZERO;
                for e in 0..n {
                    acc += a_eig[(d, e)] * a_eig[(e, b)] * Complex64::new(s.at(ev[d] - ev[e]), 0.0);
                }
                val -= acc * Complex64::new(0.5, 0.0);
            }
            r += val;
        }
        r
    };

    let mut out = Vec::with_capacity(grid.len());
    for &t in &grid {
        // populations
        let prop = m.scale(Complex64::new(t, 0.0)).expm()?;
        let mut rho_t = CMatrix::zeros(n);
        for a in 0..n {
            let mut pa = Complex64::ZERO;
            for b in 0..n {
                pa += prop[(a, b)] * rho_e0[(b, b)];
            }
            rho_t[(a, a)] = Complex64::new(pa.re.max(0.0), 0.0);
        }
        // coherences, cluster by cluster
        for members in &clusters {
            if members.len() == 1 {
                // r_elem(a,b,a,b) carries both the lifetime halves and the
                // S(0) dephasing of the pair
                let (a, b) = pairs[members[0]];
                let rate = r_elem(a, b, a, b);
                let phase = Complex64::new(0.0, -(ev[a] - ev[b]) * t);
                rho_t[(a, b)] = rho_e0[(a, b)] * (phase + rate * Complex64::new(t, 0.0)).exp();
            } else {
                let k = members.len();
                let mut block = CMatrix::zeros(k);
                for (i, &mi) in members.iter().enumerate() {
                    let (a, b) = pairs[mi];
                    for (j, &mj) in members.iter().enumerate() {
                        let (c, d) = pairs[mj];
                        let mut x = r_elem(a, b, c, d);
                        if i == j {
                            x += Complex64::new(0.0, -(ev[a] - ev[b]));
                        }
                        block[(i, j)] = x;
                    }
                }
                let prop_c = block.scale(Complex64::new(t, 0.0)).expm()?;
                for (i, &mi) in members.iter().enumerate() {
                    let (a, b) = pairs[mi];
                    let mut val = Complex64::ZERO;
                    for (j, &mj) in members.iter().enumerate() {
                        let (c, d) = pairs[mj];
                        val += prop_c[(i, j)] * rho_e0[(c, d)];
                    }
                    rho_t[(a, b)] = val;
                }
            }
        }
        // back to the lab basis
        let lab = v.matmul(&rho_t).matmul(&v.adjoint());
        out.push(DensityMatrix { mat: lab, layout: rho0.layout.clone() });
    }
    Ok(out)
}
