//! Fidelity, spin observables, leakage and gate benchmarking.

use num_complex::Complex64;

use crate::compiler::gate_matrix;
use crate::dynamics::{
    lindblad_evolve_observed, DensityMatrix, Generator, IntegratorConfig, LindbladSpec,
};
use crate::operators::{SubsystemLayout, TRANSMON_DOWN};
use crate::pulses::{render_hamiltonian, standard_dissipators, PulseSchedule};
use crate::model::SystemParams;
use crate::{CMatrix, Error, Result};

/// Per-input gate fidelities.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub per_input: Vec<(String, f64)>,
    pub mean: f64,
    pub min: f64,
    pub max_leakage: f64,
    pub max_transmon_population: f64,
    pub input_set: &'static str,
}

/// State fidelity `sqrt(<psi| rho |psi>)`, clamped into `[0, 1]` for
/// reporting.
pub fn fidelity(rho: &DensityMatrix, psi: &[Complex64]) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: psi.len() });
    }
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::UnnormalizedState(norm));
    }
    let n = rho.dim();
    let mut acc = Complex64::ZERO;
    for r in 0..n {
        for c in 0..n {
            acc += psi[r].conj() * rho.mat[(r, c)] * psi[c];
        }
    }
    Ok(acc.re.clamp(0.0, 1.0).sqrt())
}

/// Spin observables of the two-qubit register under the fixed spin-up =
/// `|0>` convention: `<S_z> = Tr[rho (s_z1 + s_z2)]`, same for x.
pub fn spin_observables(rho: &DensityMatrix) -> (f64, f64) {
    let layout = &rho.layout;
    let mut sz = 0.0;
    let mut sx = 0.0;
    let dim = layout.total_dim();
    for a in 0..dim {
        let (n1, s, n2) = layout.labels_of(a);
        // s_z eigenvalues +1/2 on |0>, -1/2 on |1>, zero outside
        let w = rho.mat[(a, a)].re;
        let sz1 = match n1 {
            0 => 0.5,
            1 => -0.5,
            _ => 0.0,
        };
        let sz2 = match n2 {
            0 => 0.5,
            1 => -0.5,
            _ => 0.0,
        };
        sz += w * (sz1 + sz2);
        // s_x couples |0> and |1> on the same NR with the partner fixed
        if n1 == 0 {
            let b = layout.index_of(1, s, n2);
            sx += rho.mat[(a, b)].re; // 2 * 1/2 * Re rho
        }
        if n2 == 0 {
            let b = layout.index_of(n1, s, 1);
            sx += rho.mat[(a, b)].re;
        }
    }
    (sz, sx)
}

/// Population outside the computational subspace (either NR above one
/// phonon, or the transmon excited).
pub fn leakage(rho: &DensityMatrix) -> f64 {
    let layout = &rho.layout;
    let mut comp = 0.0;
    for n1 in 0..2 {
        for n2 in 0..2 {
            comp += rho.population(layout.index_of(n1, TRANSMON_DOWN, n2));
        }
    }
    (1.0 - comp).max(0.0)
}

/// Transmon excited-state population.
pub fn transmon_population(rho: &DensityMatrix) -> f64 {
    let layout = &rho.layout;
    let nb = layout.fock_levels();
    let mut p = 0.0;
    for n1 in 0..nb {
        for n2 in 0..nb {
            p += rho.population(layout.index_of(n1, crate::operators::TRANSMON_UP, n2));
        }
    }
    p
}

/// Embed a 4-component computational state (basis order 00, 10, 01, 11)
/// into the full layout with the transmon down and vacuum elsewhere.
pub fn embed_computational(amps: &[Complex64; 4], layout: &SubsystemLayout) -> Vec<Complex64> {
    let mut psi = vec![Complex64::ZERO; layout.total_dim()];
    let order = [(0usize, 0usize), (1, 0), (0, 1), (1, 1)];
    for (k, (n1, n2)) in order.iter().enumerate() {
        psi[layout.index_of(*n1, TRANSMON_DOWN, *n2)] = amps[k];
    }
    psi
}

/// Computational amplitudes of a full state vector (same basis order).
pub fn computational_amplitudes(psi: &[Complex64], layout: &SubsystemLayout) -> [Complex64; 4] {
    let order = [(0usize, 0usize), (1, 0), (0, 1), (1, 1)];
    let mut out = [Complex64::ZERO; 4];
    for (k, (n1, n2)) in order.iter().enumerate() {
        out[k] = psi[layout.index_of(*n1, TRANSMON_DOWN, *n2)];
    }
    out
}

/// Deterministic input-state set for fidelity averaging: the four
/// computational basis states, the four single-qubit superpositions with the
/// partner in `|0>`, and the even two-qubit superposition.
pub fn standard_inputs() -> Vec<(String, [Complex64; 4])> {
    let one = Complex64::ONE;
    let z = Complex64::ZERO;
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ms = -s;
    vec![
        ("00".into(), [one, z, z, z]),
        ("10".into(), [z, one, z, z]),
        ("01".into(), [z, z, one, z]),
        ("11".into(), [z, z, z, one]),
        ("(00+10)/r2".into(), [s, s, z, z]),
        ("(00-10)/r2".into(), [s, ms, z, z]),
        ("(00+01)/r2".into(), [s, z, s, z]),
        ("(00-01)/r2".into(), [s, z, ms, z]),
        ("(00+11)/r2".into(), [s, z, z, s]),
    ]
}

/// Evolve every input state under the schedule's full master equation and
/// score against `target` (an ideal 4x4 computational unitary).
pub fn gate_fidelity_experiment(
    params: &SystemParams,
    schedule: &PulseSchedule,
    target: &CMatrix,
    inputs: &[(String, [Complex64; 4])],
    extra_dissipators: Option<LindbladSpec>,
    layout: &SubsystemLayout,
    cfg: &IntegratorConfig,
) -> Result<FidelityReport> {
    if target.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: target.dim() });
    }
    let gen = render_hamiltonian(schedule, params, layout, cfg.frame)?;
    let mut diss = standard_dissipators(params, layout)?;
    if let Some(extra) = extra_dissipators {
        diss.extend(extra);
    }
    // independent trajectories: one per input state
    use rayon::prelude::*;
    let runs: Result<Vec<(String, f64, f64, f64)>> = inputs
        .par_iter()
        .map(|(name, amps)| {
            let psi0 = embed_computational(amps, layout);
            let rho0 = DensityMatrix::pure(&psi0, layout)?;
            let mut leak_run: f64 = 0.0;
            let mut tr_run: f64 = 0.0;
            let final_rho = lindblad_evolve_observed(&gen, &diss, &rho0, cfg, |_, m| {
                let snap = DensityMatrix { mat: m.clone(), layout: layout.clone() };
                leak_run = leak_run.max(leakage(&snap));
                tr_run = tr_run.max(transmon_population(&snap));
                Ok(())
            })?;
            let t4 = apply4(target, amps);
            let tpsi = embed_computational(&t4, layout);
            let f = fidelity(&final_rho, &tpsi)?;
            Ok((name.clone(), f, leak_run, tr_run))
        })
        .collect();
    let runs = runs?;
    let mut per_input = Vec::with_capacity(runs.len());
    let mut max_leak: f64 = 0.0;
    let mut max_tr: f64 = 0.0;
    for (name, f, leak, tr) in runs {
        per_input.push((name, f));
        max_leak = max_leak.max(leak);
        max_tr = max_tr.max(tr);
    }
    let mean = per_input.iter().map(|(_, f)| f).sum::<f64>() / per_input.len().max(1) as f64;
    let min = per_input.iter().map(|(_, f)| *f).fold(1.0, f64::min);
    Ok(FidelityReport {
        per_input,
        mean,
        min,
        max_leakage: max_leak,
        max_transmon_population: max_tr,
        input_set: "4 basis + 4 single-qubit superpositions + (00+11)/r2",
    })
}

fn apply4(u: &CMatrix, amps: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [Complex64::ZERO; 4];
    for (r, o) in out.iter_mut().enumerate() {
        for c in 0..4 {
            *o += u[(r, c)] * amps[c];
        }
    }
    out
}

/// Track the maximum leakage along an evolution.
pub fn leakage_trace(
    gen: &Generator,
    diss: &LindbladSpec,
    rho0: &DensityMatrix,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let layout = rho0.layout.clone();
    let mut max_leak: f64 = 0.0;
    lindblad_evolve_observed(gen, diss, rho0, cfg, |_, m| {
        let snap = DensityMatrix { mat: m.clone(), layout: layout.clone() };
        max_leak = max_leak.max(leakage(&snap));
        Ok(())
    })?;
    Ok(max_leak)
}

/// Ideal product of a gate sequence as the scoring target; re-exported here
/// for callers that work with analysis types only.
pub fn sequence_target(seq: &crate::compiler::GateSequence) -> CMatrix {
    let mut u = CMatrix::identity(4);
    for op in &seq.ops {
        u = gate_matrix(op).matmul(&u);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::SubsystemLayout;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fidelity_of_pure_state_with_itself_is_one() {
        let layout = SubsystemLayout::standard();
        let amps = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0), c(0.0, 0.0)];
        let psi = embed_computational(&amps, &layout);
        let rho = DensityMatrix::pure(&psi, &layout).unwrap();
        assert!((fidelity(&rho, &psi).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_of_orthogonal_state_is_zero() {
        let layout = SubsystemLayout::standard();
        let a = embed_computational(&[Complex64::ONE, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], &layout);
        let b = embed_computational(&[c(0.0, 0.0), Complex64::ONE, c(0.0, 0.0), c(0.0, 0.0)], &layout);
        let rho = DensityMatrix::pure(&a, &layout).unwrap();
        assert!(fidelity(&rho, &b).unwrap() < 1e-12);
    }

    #[test]
    fn maximally_mixed_two_qubit_fidelity_is_half() {
        let layout = SubsystemLayout::standard();
        let dim = layout.total_dim();
        let mut m = CMatrix::zeros(dim);
        for n1 in 0..2 {
            for n2 in 0..2 {
                let i = layout.index_of(n1, TRANSMON_DOWN, n2);
                m[(i, i)] = c(0.25, 0.0);
            }
        }
        let rho = DensityMatrix { mat: m, layout: layout.clone() };
        let psi = embed_computational(
            &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
            &layout,
        );
        assert!((fidelity(&rho, &psi).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_target_is_rejected() {
        let layout = SubsystemLayout::standard();
        let mut psi = embed_computational(&[Complex64::ONE, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], &layout);
        let i00 = layout.index_of(0, TRANSMON_DOWN, 0);
        psi[i00] *= c(1.1, 0.0);
        let rho = DensityMatrix::basis(0, 0, &layout).unwrap();
        assert!(matches!(fidelity(&rho, &psi), Err(Error::UnnormalizedState(_))));
    }

    #[test]
    fn spin_observable_conventions() {
        let layout = SubsystemLayout::standard();
        // |00>: Sz = +1
        let rho = DensityMatrix::basis(0, 0, &layout).unwrap();
        let (sz, sx) = spin_observables(&rho);
        assert!((sz - 1.0).abs() < 1e-12 && sx.abs() < 1e-12);
        // Bell (|01>+|10>)/sqrt2: Sz = 0
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = embed_computational(&[c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)], &layout);
        let rho = DensityMatrix::pure(&psi, &layout).unwrap();
        let (sz, _) = spin_observables(&rho);
        assert!(sz.abs() < 1e-12);
        // |++>: Sx = +1
        let psi = embed_computational(&[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)], &layout);
        let rho = DensityMatrix::pure(&psi, &layout).unwrap();
        let (_, sx) = spin_observables(&rho);
        assert!((sx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leakage_of_computational_states_is_zero() {
        let layout = SubsystemLayout::standard();
        let rho = DensityMatrix::basis(1, 1, &layout).unwrap();
        assert!(leakage(&rho) < 1e-12);
        assert!(transmon_population(&rho) < 1e-12);
        // put weight on n = 2
        let mut psi = vec![Complex64::ZERO; layout.total_dim()];
        psi[layout.index_of(2, TRANSMON_DOWN, 0)] = Complex64::ONE;
        let rho = DensityMatrix::pure(&psi, &layout).unwrap();
        assert!((leakage(&rho) - 1.0).abs() < 1e-12);
    }
}
