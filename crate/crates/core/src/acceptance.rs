//! Acceptance checks behind `verify` and the `acceptance` test target.
//!
//! Each criterion is a self-contained check with its tolerances pinned in
//! code; `run_criterion` returns a pass/fail outcome with a numeric summary.
//! `fast` mode relaxes integration step and sweep density for smoke runs;
//! tolerances never change.

use crate::compiler::{trotterize, SpinHamiltonianSpec};
use crate::dynamics::{lindblad_evolve, DensityMatrix, IntegratorConfig, LindbladSpec};
use crate::model::{dressed_basis_report, perturbative_delta, rabi_spectrum, RabiParams};
use crate::operators::SubsystemLayout;
use crate::pulses::{render_hamiltonian, SequenceOptions};
use crate::runner::{run_experiment, validate_config, ExperimentConfig};
use crate::{CMatrix, Result};
use num_complex::Complex64;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

pub fn criterion_names() -> [(usize, &'static str); 10] {
    [
        (1, "rabi nonlinearity"),
        (2, "leakage bound"),
        (3, "quartic-model tables"),
        (4, "gate fidelities and transmon robustness"),
        (5, "fidelity vs nonlinear shift"),
        (6, "spin-1 digital simulation"),
        (7, "transverse-field Ising digital simulation"),
        (8, "bloch-redfield lifetimes"),
        (9, "thermal sensitivity"),
        (10, "property suites"),
    ]
}

fn cfg_for(experiment: &str, text: &str, fast: bool) -> Result<ExperimentConfig> {
    let mut cfg = validate_config(experiment, text)?;
    cfg.fast = fast;
    Ok(cfg)
}

pub fn run_criterion(id: usize, fast: bool) -> Result<CriterionOutcome> {
    match id {
        1 => criterion1(),
        2 => criterion2(),
        3 => criterion3(),
        4 => criterion4(fast),
        5 => criterion5(fast),
        6 => criterion6(fast),
        7 => criterion7(fast),
        8 => criterion8(fast),
        9 => criterion9(fast),
        10 => criterion10(fast),
        other => Err(crate::Error::UnknownExperiment {
            name: format!("criterion {other}"),
            registry: vec!["1..=10".into()],
        }),
    }
}

fn outcome(id: usize, passed: bool, details: String) -> Result<CriterionOutcome> {
    let name = criterion_names()[id - 1].1;
    Ok(CriterionOutcome { id, name, passed, details })
}

/// Criterion 1: exact Rabi-model shift at the engineered-nonlinearity point
/// and agreement of the 4th-order expression at weak coupling.
fn criterion1() -> Result<CriterionOutcome> {
    let at = |g: f64| RabiParams { omega_nr_mhz: 100.0, omega_sc_mhz: 500.0, g_mhz: g };
    let r50 = rabi_spectrum(&at(50.0), 20)?;
    let delta_ok = (r50.delta_mhz - 1.0).abs() <= 0.2;
    let mut pert_ok = true;
    let mut worst = 0.0f64;
    for g in [1.0, 2.0, 5.0] {
        let exact = rabi_spectrum(&at(g), 20)?.delta_mhz;
        let pert = perturbative_delta(&at(g))?;
        let rel = if exact.abs() > 0.0 { (pert - exact).abs() / exact.abs() } else { 0.0 };
        worst = worst.max(rel);
        pert_ok &= rel <= 0.02;
    }
    outcome(
        1,
        delta_ok && pert_ok,
        format!(
            "delta(g=50) = {:.4} MHz (band 1.0 +- 0.2); worst perturbative mismatch {:.3}% for g <= 5",
            r50.delta_mhz,
            100.0 * worst
        ),
    )
}

/// Criterion 2: SC-excitation probability of the computational dressed
/// states stays below 5% up to g = 50 MHz.
fn criterion2() -> Result<CriterionOutcome> {
    let mut worst = 0.0f64;
    for g in [10.0, 20.0, 30.0, 40.0, 50.0] {
        let r = rabi_spectrum(
            &RabiParams { omega_nr_mhz: 100.0, omega_sc_mhz: 500.0, g_mhz: g },
            20,
        )?;
        for l in r.leakage {
            worst = worst.max(l);
        }
    }
    outcome(2, worst <= 0.05, format!("max SC leakage over g <= 50 MHz: {worst:.4} (bound 0.05)"))
}

/// Criterion 3: quartic-model eigenvector fidelities and b matrix elements
/// at the delta-matched calibration.
fn criterion3() -> Result<CriterionOutcome> {
    let mut passed = true;
    let mut details = String::new();
    let cases = [(85.0, [0.9996, 0.9971, 0.9899], 1.0005, 1.4170), (75.0, [0.9995, 0.9963, 0.9872], 1.0007, 1.4179)];
    for (omega, fids, x01, x12) in cases {
        let r = dressed_basis_report(omega, 6.0, 10)?;
        for k in 0..3 {
            let ok = (r.fidelities[k] - fids[k]).abs() <= 0.0015;
            passed &= ok;
        }
        passed &= (r.x01 - x01).abs() <= 0.001;
        passed &= (r.x12 - x12).abs() <= 0.003;
        details.push_str(&format!(
            "omega={omega}: F=({:.4},{:.4},{:.4}) X01={:.4} X12={:.4}; ",
            r.fidelities[0], r.fidelities[1], r.fidelities[2], r.x01, r.x12
        ));
    }
    outcome(3, passed, details)
}

/// Criterion 4: benchmark-gate fidelities above 0.99 with realistic NR
/// dephasing, insensitive to two orders of magnitude of transmon dephasing.
fn criterion4(fast: bool) -> Result<CriterionOutcome> {
    use rayon::prelude::*;
    crate::runner::init_workers(None);
    let jobs: Vec<(&str, f64, f64)> = vec![
        // (gate, gamma_nr_d, gamma_tr_d)
        ("rx", 1000.0, 1.0e5),
        ("rx", 100.0, 1.0e4),
        ("rx", 100.0, 1.0e6),
        ("iswap", 1000.0, 1.0e5),
        ("iswap", 100.0, 1.0e4),
        ("iswap", 100.0, 1.0e6),
    ];
    let results: Result<Vec<(String, f64)>> = jobs
        .par_iter()
        .map(|&(gate, gn, gt)| {
            // single-point fidelity grid at exactly these rates
            let text = format!("sweep.gamma_nr_d_hz = {gn}\nsweep.gamma_tr_d_hz = {gt}\n");
            let cfg = cfg_for(if gate == "rx" { "fig3a" } else { "fig3b" }, &text, fast)?;
            let t = run_experiment(&cfg)?;
            Ok((format!("{gate}:{gn}:{gt}"), t.values("f_mean")[0]))
        })
        .collect();
    let results = results?;
    let get = |k: &str| results.iter().find(|(n, _)| n == k).map(|(_, f)| *f).unwrap();
    let rx_base = get("rx:1000:100000");
    let isw_base = get("iswap:1000:100000");
    let rx_band = (get("rx:100:10000") - get("rx:100:1000000")).abs();
    let isw_band = (get("iswap:100:10000") - get("iswap:100:1000000")).abs();
    let passed = rx_base > 0.99 && isw_base > 0.99 && rx_band < 0.002 && isw_band < 0.002;
    outcome(
        4,
        passed,
        format!(
            "Rx(pi/2) mean F = {rx_base:.5}, sqrt-iSWAP mean F = {isw_base:.5} (both > 0.99); \
             transmon-dephasing bands: rx {rx_band:.5}, iswap {isw_band:.5} (< 0.002)"
        ),
    )
}

/// Criterion 5: Rx(pi) fidelity vs nonlinear shift: above 0.99 from 1 MHz,
/// plateau above 0.999 from 3 MHz, monotone degradation below 1 MHz.
fn criterion5(fast: bool) -> Result<CriterionOutcome> {
    let cfg = cfg_for("fig4", "", fast)?;
    let t = run_experiment(&cfg)?;
    let deltas = t.values("delta_mhz");
    let f = t.values("f_mean");
    let mut ok_99 = true;
    let mut ok_999 = true;
    let mut low: Vec<(f64, f64)> = Vec::new();
    for (d, f) in deltas.iter().zip(&f) {
        if *d >= 1.0 - 1e-12 {
            ok_99 &= *f > 0.99;
        }
        if *d >= 3.0 - 1e-12 {
            ok_999 &= *f > 0.999;
        }
        if *d <= 1.0 + 1e-12 {
            low.push((*d, *f));
        }
    }
    low.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let monotone = low.windows(2).all(|w| w[0].1 <= w[1].1 + 1e-9);
    outcome(
        5,
        ok_99 && ok_999 && monotone,
        format!(
            "F >= 0.99 for delta >= 1 MHz: {ok_99}; plateau > 0.999 for delta >= 3 MHz: {ok_999}; \
             monotone below 1 MHz: {monotone}; F({:.2}) = {:.5}, F(6) = {:.5}",
            deltas[0],
            f[0],
            f[deltas.iter().position(|d| (*d - 6.0).abs() < 1e-9).unwrap_or(f.len() - 1)]
        ),
    )
}

/// Criterion 6: spin-1 digital simulation mean fidelities.
fn criterion6(fast: bool) -> Result<CriterionOutcome> {
    let cfg = cfg_for("fig5a", "", fast)?;
    let t = run_experiment(&cfg)?;
    let gammas = t.values("gamma_nr_d_hz");
    let fs = t.values("fidelity");
    let mean_for = |g: f64| {
        let sel: Vec<f64> = gammas
            .iter()
            .zip(&fs)
            .filter(|(gg, _)| (**gg - g).abs() < 1e-9)
            .map(|(_, f)| *f)
            .collect();
        sel.iter().sum::<f64>() / sel.len().max(1) as f64
    };
    let m0 = mean_for(0.0);
    let m1k = mean_for(1000.0);
    let passed = m0 >= 0.995 && m1k >= 0.98 && m1k <= 0.998;
    outcome(
        6,
        passed,
        format!("mean fidelity: {m0:.4} at gamma_d = 0 (>= 0.995), {m1k:.4} at 1 kHz (0.988 +- 0.01, >= 0.98)"),
    )
}

/// Criterion 7: TIM digital simulation at N = 10: final-point fidelities,
/// gate-window composition, total duration near 150 us.
fn criterion7(fast: bool) -> Result<CriterionOutcome> {
    let cfg = cfg_for("fig5b", "trace.points = 1\n", fast)?;
    let t = run_experiment(&cfg)?;
    let gammas = t.values("gamma_nr_d_hz");
    let fs = t.values("fidelity");
    let durs = t.values("physical_duration_us");
    let two = t.values("two_qubit_windows");
    let one = t.values("single_qubit_windows");
    let f_at = |g: f64| {
        gammas
            .iter()
            .zip(&fs)
            .find(|(gg, _)| (**gg - g).abs() < 1e-9)
            .map(|(_, f)| *f)
            .unwrap_or(f64::NAN)
    };
    let f1k = f_at(1000.0);
    let f100 = f_at(100.0);
    let dur = durs[0];
    let comp_ok = two.iter().all(|v| *v == 20.0) && one.iter().all(|v| *v == 40.0);
    let dur_ok = (dur - 150.0).abs() <= 45.0;
    let f_ok = (f1k - 0.90).abs() <= 0.03 && (f100 - 0.96).abs() <= 0.03;
    outcome(
        7,
        comp_ok && dur_ok && f_ok,
        format!(
            "final-point F: {f1k:.4} at 1 kHz (0.90 +- 0.03), {f100:.4} at 100 Hz (0.96 +- 0.03); \
             composition {}x two-qubit / {}x single-qubit (want 20/40); duration {dur:.1} us (150 +- 30%)",
            two[0], one[0]
        ),
    )
}

/// Criterion 8: Bloch-Redfield lifetimes: bare limits and bounded
/// degradation across the coupling sweep.
fn criterion8(fast: bool) -> Result<CriterionOutcome> {
    let cfg = cfg_for("fig7", "", fast)?;
    let t = run_experiment(&cfg)?;
    let t1 = t.values("t1_ms");
    let t2 = t.values("t2_ms");
    let t1_ok = (t1[0] - 20.0).abs() / 20.0 <= 0.05;
    let t2_ok = (t2[0] - 8.0).abs() / 8.0 <= 0.05;
    let t1_deg = t1[0] / t1.iter().cloned().fold(f64::MAX, f64::min);
    let t2_deg = t2[0] / t2.iter().cloned().fold(f64::MAX, f64::min);
    let passed = t1_ok && t2_ok && t1_deg < 10.0 && t2_deg < 10.0;
    outcome(
        8,
        passed,
        format!(
            "bare limits T1 = {:.2} ms (20 +- 5%), T2 = {:.2} ms (8 +- 5%); worst degradation x{:.2}/x{:.2} (< 10)",
            t1[0], t2[0], t1_deg, t2_deg
        ),
    )
}

/// Criterion 9: residual thermal occupation shifts the gate fidelity by
/// less than 0.002 at 50 Hz and by about 1% at 1 kHz.
fn criterion9(fast: bool) -> Result<CriterionOutcome> {
    let cfg = cfg_for("thermal", "", fast)?;
    let t = run_experiment(&cfg)?;
    let chi = t.values("chi_hz");
    let df = t.values("delta_f_vs_chi0");
    let at = |c: f64| {
        chi.iter().zip(&df).find(|(cc, _)| (**cc - c).abs() < 1e-9).map(|(_, d)| *d).unwrap()
    };
    let d50 = at(50.0);
    let d1k = at(1000.0);
    let passed = d50 <= 0.002 && (d1k - 0.01).abs() <= 0.005;
    outcome(
        9,
        passed,
        format!("fidelity change: {d50:.5} at chi = 50 Hz (<= 0.002), {d1k:.5} at 1 kHz (0.01 +- 0.005)"),
    )
}

/// Criterion 10: structural property suites.
fn criterion10(fast: bool) -> Result<CriterionOutcome> {
    let mut passed = true;
    let mut details = String::new();

    // (a) exchange-algebra identities to 1e-10
    {
        use crate::compiler::{compile_two_body, u_xy, u_xy_minus, Axis, TwoBodyKind};
        let mut worst = 0.0f64;
        for (kind, j, t) in [
            (TwoBodyKind::XyPlus, 0.31, 1.3),
            (TwoBodyKind::XyMinus, -0.27, 0.8),
            (TwoBodyKind::Pair(Axis::X, Axis::Z), 0.19, 1.1),
            (TwoBodyKind::Pair(Axis::Z, Axis::Z), 0.23, 0.7),
            (TwoBodyKind::Pair(Axis::Y, Axis::Y), -0.13, 0.9),
        ] {
            let seq = compile_two_body(kind, j, t)?;
            let u = seq.ideal_unitary();
            let gen = match kind {
                TwoBodyKind::XyPlus => u_xy(crate::TWO_PI * j * t),
                TwoBodyKind::XyMinus => u_xy_minus(crate::TWO_PI * j * t),
                TwoBodyKind::Pair(..) => {
                    // exact exponential of the spin-form term
                    let spec = SpinHamiltonianSpec { one_body: vec![], two_body: vec![(kind, j)] };
                    spec.matrix().scale(Complex64::new(0.0, -t)).expm()?
                }
            };
            worst = worst.max((&u - &gen).max_abs());
        }
        passed &= worst < 1e-10;
        details.push_str(&format!("exchange identities defect {worst:.1e}; "));
    }

    // (b) Trotter error halving
    {
        let g: f64 = -0.115;
        let spec = SpinHamiltonianSpec::tim(g, g / 2.0);
        let exact = spec.matrix().scale(Complex64::new(0.0, -6.0)).expm()?;
        let mut errs = Vec::new();
        for n in [2usize, 4, 8, 16] {
            let plan = trotterize(&spec, 6.0, n)?;
            errs.push((&plan.reference_unitary() - &exact).max_abs());
        }
        let ok = errs.windows(2).all(|w| {
            let r = w[0] / w[1];
            (1.6..=2.4).contains(&r)
        });
        passed &= ok;
        details.push_str(&format!("trotter halving ratios from {errs:.1?}; ", errs = errs));
    }

    // (c) analytic decay law to 1e-6
    {
        let layout = SubsystemLayout::from_dims(vec![2])?;
        let b = crate::operators::annihilation_operator(2)?;
        let gamma_hz = 2.0e5;
        let diss = LindbladSpec::new().with(b, gamma_hz)?;
        let mut psi = vec![Complex64::ZERO; 2];
        psi[1] = Complex64::ONE;
        let rho0 = DensityMatrix::pure(&psi, &layout)?;
        let g = gamma_hz * 1e-6;
        let t_end = 5.0 / g;
        let gen = crate::dynamics::Generator::new(
            2,
            vec![crate::dynamics::Segment::free(t_end, vec![0.0, 0.0])],
        );
        let cfg = IntegratorConfig { max_step_us: Some(0.02 / g), ..Default::default() };
        let traj = lindblad_evolve(&gen, &diss, &rho0, &[t_end], &cfg)?;
        let got = traj[0].population(1);
        let want = (-g * t_end).exp();
        let ok = (got - want).abs() <= 1e-6 * want;
        passed &= ok;
        details.push_str(&format!("decay law rel err {:.1e}; ", (got - want).abs() / want));
    }

    // (d) trace/hermiticity/positivity on a dissipative gate trajectory,
    //     and (e) the effective-coupling oscillation frequency
    {
        let spp = if fast { 10.0 } else { 40.0 };
        let params = crate::model::SystemParams::default();
        let layout = SubsystemLayout::standard();
        let opts = SequenceOptions::default();
        let mut builder = crate::pulses::ScheduleBuilder::new(&params, opts);
        builder.xy_window(2.0)?; // half the exchange period
        let sched = builder.finish(0.0);
        let gen = render_hamiltonian(&sched, &params, &layout, Default::default())?;
        let mut p = params.clone();
        p.gamma1_d_hz = 1000.0;
        p.gamma2_d_hz = 1000.0;
        let diss = crate::pulses::standard_dissipators(&p, &layout)?;
        let psi0 = crate::analysis::embed_computational(
            &[Complex64::ZERO, Complex64::ONE, Complex64::ZERO, Complex64::ZERO],
            &layout,
        );
        let rho0 = DensityMatrix::pure(&psi0, &layout)?;
        let icfg = IntegratorConfig { samples_per_period: spp, ..Default::default() };
        let idx01 = layout.index_of(0, crate::operators::TRANSMON_DOWN, 1);
        let mut p01: Vec<(f64, f64)> = Vec::new();
        let mut worst_herm = 0.0f64;
        let mut worst_trace = 0.0f64;
        let mut snapshots: Vec<CMatrix> = Vec::new();
        let _ = crate::dynamics::lindblad_evolve_observed(&gen, &diss, &rho0, &icfg, |t, m| {
            worst_herm = worst_herm.max(m.hermiticity_defect());
            worst_trace = worst_trace.max((m.trace().re - 1.0).abs());
            p01.push((t, m[(idx01, idx01)].re));
            if snapshots.len() < 6 {
                snapshots.push(m.clone());
            }
            Ok(())
        })?;
        let mut min_eig = 0.0f64;
        for s in &snapshots {
            let (ev, _) = s.hermitian_eigen();
            min_eig = min_eig.min(ev[0]);
        }
        let inv_ok = worst_herm < 1e-10 && worst_trace < 1e-8 && min_eig > -1e-8;
        passed &= inv_ok;
        details.push_str(&format!(
            "trajectory invariants: herm {worst_herm:.1e}, trace {worst_trace:.1e}, min eig {min_eig:.1e}; "
        ));

        // population oscillation peak vs |Gamma|/2
        let (mut t_peak, mut best) = (0.0, -1.0);
        for &(t, v) in &p01 {
            if v > best {
                best = v;
                t_peak = t;
            }
        }
        let gamma = crate::model::xy_coupling(80.0, 80.0, 2500.0, 6.0, 6.0)?;
        let measured = std::f64::consts::PI / t_peak;
        let expected = crate::TWO_PI * gamma.abs() / 2.0;
        let rel = (measured - expected).abs() / expected;
        passed &= rel <= 0.05;
        details.push_str(&format!("swap frequency off by {:.2}%;", 100.0 * rel));
    }

    outcome(10, passed, details)
}
