//! Gate protocols rendered as time-dependent control schedules.
//!
//! A [`PulseSchedule`] records piecewise controls on five channels: a
//! frequency-shift channel and a transverse-drive channel per NR, plus the
//! transmon frequency-shift channel. [`render_hamiltonian`] turns a schedule
//! into the integrator's [`Generator`]: the full instantaneous diagonal
//! (bare frequencies, Kerr shifts, the tuned transmon) becomes the rotating
//! frame, while shift steps, the automatic `-lambda_i` compensation and the
//! drives stay in the generator as slow in-frame terms.
//!
//! Two-qubit (XY) windows are aligned to the beat grid `1/(f1 - f2)`: the
//! exchange matrix element between `|10>` and `|01>` carries the phase
//! `exp(i (w1 - w2) t_on)` of the window start, so windows launch only at
//! integer beat multiples, where that phase is unity and the gate matches
//! its textbook matrix. Each XY window carries its own ramp-down bookkeeping:
//! two trailing rephasing z-steps undo the deterministic phase `xi_i * tau`
//! accumulated while the qubits sat at the common frequency.

use num_complex::Complex64;

use crate::dynamics::{Coeff, Envelope, Frame, Generator, HamTerm, Segment, SparseOp};
use crate::model::{qubit_shift, xy_coupling, NonlinearityModel, SystemParams};
use crate::operators::{
    annihilation_operator, embed, pauli, PauliAxis, Subsystem, SubsystemLayout,
};
use crate::{Error, Result, TWO_PI};

/// Qubit selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    Q1,
    Q2,
}

impl Qubit {
    pub fn index(self) -> usize {
        match self {
            Qubit::Q1 => 1,
            Qubit::Q2 => 2,
        }
    }
    fn subsystem(self) -> Subsystem {
        match self {
            Qubit::Q1 => Subsystem::Nr1,
            Qubit::Q2 => Subsystem::Nr2,
        }
    }
}

/// Envelope family for transverse drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnvelopeKind {
    Square,
    #[default]
    Gaussian,
}

/// Native gate request used by schedule builders and the compiler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateSpec {
    Rx { qubit: Qubit, angle: f64 },
    Ry { qubit: Qubit, angle: f64 },
    Rz { qubit: Qubit, angle: f64 },
    SqrtISwap,
    /// XY window lasting `fraction` of the full sqrt-iSWAP time `pi/|Gamma|`.
    XyEvolve { fraction: f64 },
}

/// Frequency-shift step on one channel (MHz amplitude, us times).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPulse {
    pub t0: f64,
    pub duration: f64,
    pub amp_mhz: f64,
}

/// Transverse drive `env(t) * V0 * cos(2 pi f_c t + phase)` on one NR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivePulse {
    pub qubit: Qubit,
    pub v0_mhz: f64,
    pub carrier_mhz: f64,
    pub phase: f64,
    pub envelope: Envelope,
}

/// Piecewise control record for one experiment run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSchedule {
    pub shifts1: Vec<StepPulse>,
    pub shifts2: Vec<StepPulse>,
    pub transmon_shifts: Vec<StepPulse>,
    pub drives: Vec<DrivePulse>,
    /// Apply the permanent `-lambda_i(omega_i(t), Omega(t))` compensation.
    pub auto_compensation: bool,
    /// Linear ramp length added to NR step edges (0 = instantaneous; control
    /// electronics switch well below the step resolution, so 0 is the
    /// default). Transmon steps always switch instantaneously.
    pub ramp_us: f64,
    pub duration: f64,
}

impl PulseSchedule {
    pub fn idle(duration: f64) -> Self {
        PulseSchedule { auto_compensation: true, duration, ..Default::default() }
    }

    fn shifts_mut(&mut self, q: Qubit) -> &mut Vec<StepPulse> {
        match q {
            Qubit::Q1 => &mut self.shifts1,
            Qubit::Q2 => &mut self.shifts2,
        }
    }

    /// Validate step layout: non-overlapping per channel, inside duration.
    pub fn validate(&self) -> Result<()> {
        for (name, ch) in
            [("nr1.shift", &self.shifts1), ("nr2.shift", &self.shifts2), ("transmon.shift", &self.transmon_shifts)]
        {
            let mut sorted: Vec<_> = ch.iter().collect();
            sorted.sort_by(|a, b| a.t0.partial_cmp(&b.t0).unwrap());
            for w in sorted.windows(2) {
                if w[0].t0 + w[0].duration > w[1].t0 + 1e-12 {
                    let _ = name;
                    return Err(Error::InvalidPulse("overlapping step segments on one channel"));
                }
            }
            for s in ch.iter() {
                if s.duration < 0.0 || s.t0 < 0.0 || s.t0 + s.duration > self.duration + 1e-9 {
                    return Err(Error::InvalidPulse("step outside schedule duration"));
                }
            }
        }
        Ok(())
    }

    /// One segment per line: channel, kind, start, duration, amplitude,
    /// carrier, phase.
    pub fn to_text(&self) -> String {
        let mut lines = Vec::new();
        let step_line = |ch: &str, s: &StepPulse| {
            format!("{ch}, step, {:.9}, {:.9}, {:.9}, 0, 0", s.t0, s.duration, s.amp_mhz)
        };
        for s in &self.shifts1 {
            lines.push(step_line("nr1.shift", s));
        }
        for s in &self.shifts2 {
            lines.push(step_line("nr2.shift", s));
        }
        for s in &self.transmon_shifts {
            lines.push(step_line("transmon.shift", s));
        }
        for d in &self.drives {
            let ch = match d.qubit {
                Qubit::Q1 => "nr1.drive",
                Qubit::Q2 => "nr2.drive",
            };
            let (kind, start, dur) = match d.envelope {
                Envelope::Square { t0, duration } => ("square", t0, duration),
                Envelope::Gaussian { center, sigma, cut, .. } => {
                    ("gaussian", center - cut * sigma, 2.0 * cut * sigma)
                }
                Envelope::Trapezoid { t0, duration, .. } => ("trapezoid", t0, duration),
            };
            lines.push(format!(
                "{ch}, {kind}, {start:.9}, {dur:.9}, {:.9}, {:.9}, {:.9}",
                d.v0_mhz, d.carrier_mhz, d.phase
            ));
        }
        lines.sort();
        lines.join("\n") + "\n"
    }
}

/// Shift-step rotation about z: duration `|angle| / |2 pi delta_omega|`,
/// sign chosen so the phase accumulated on `|1>` equals `-angle`.
pub fn schedule_rz(qubit: Qubit, angle: f64, delta_omega_mhz: f64) -> Result<PulseSchedule> {
    if delta_omega_mhz == 0.0 {
        return Err(Error::InvalidPulse("Rz needs a nonzero frequency shift"));
    }
    let mut sched = PulseSchedule::idle(0.0);
    if angle == 0.0 {
        return Ok(sched);
    }
    let amp = delta_omega_mhz.abs() * angle.signum();
    let duration = angle.abs() / (TWO_PI * delta_omega_mhz.abs());
    sched.shifts_mut(qubit).push(StepPulse { t0: 0.0, duration, amp_mhz: amp });
    sched.duration = duration;
    Ok(sched)
}

/// Transverse-drive rotation in the xy plane: axis phase `theta` (0 for x,
/// -pi/2 for y with the `exp(-i angle sigma/2)` convention), pulse area
/// equal to `angle`.
pub fn schedule_rxy(
    qubit: Qubit,
    angle: f64,
    axis_phase: f64,
    v0_mhz: f64,
    kind: EnvelopeKind,
    carrier_mhz: f64,
) -> Result<PulseSchedule> {
    if v0_mhz <= 0.0 {
        return Err(Error::InvalidPulse("drive amplitude must be positive"));
    }
    let mut sched = PulseSchedule::idle(0.0);
    if angle == 0.0 {
        return Ok(sched);
    }
    let v0_ang = TWO_PI * v0_mhz;
    let theta = if angle >= 0.0 { axis_phase } else { axis_phase + std::f64::consts::PI };
    let envelope = match kind {
        EnvelopeKind::Square => {
            let duration = angle.abs() / v0_ang;
            sched.duration = duration;
            Envelope::Square { t0: 0.0, duration }
        }
        EnvelopeKind::Gaussian => {
            let sigma = angle.abs() / ((TWO_PI).sqrt() * v0_ang);
            let cut = 3.0;
            // clipped-area renormalization: erf(3/sqrt(2)) of the full area
            let scale = 1.0 / 0.997_300_203_936_739_8;
            sched.duration = 2.0 * cut * sigma;
            Envelope::Gaussian { center: cut * sigma, sigma, cut, scale }
        }
    };
    sched.drives.push(DrivePulse { qubit, v0_mhz, carrier_mhz, phase: theta, envelope });
    Ok(sched)
}

fn wrap_pm_pi(x: f64) -> f64 {
    let two_pi = TWO_PI;
    let mut y = x % two_pi;
    if y > std::f64::consts::PI {
        y -= two_pi;
    } else if y < -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

/// Knobs of the two-qubit window and of sequenced rotations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceOptions {
    /// Transverse-drive peak amplitude (MHz).
    pub v0_mhz: f64,
    pub envelope: EnvelopeKind,
    /// |shift| used by rephasing and Rz steps (MHz).
    pub rz_shift_mhz: f64,
    /// Transmon tuning during XY windows (MHz, added to the idle frequency).
    pub delta_omega_mhz: f64,
    /// Idle padding before anything starts (us).
    pub lead_in_us: f64,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        SequenceOptions {
            v0_mhz: 0.3,
            envelope: EnvelopeKind::Gaussian,
            rz_shift_mhz: 1.0,
            delta_omega_mhz: -7500.0,
            lead_in_us: 0.0,
        }
    }
}

/// Incremental schedule assembly with a running time cursor.
pub struct ScheduleBuilder<'a> {
    params: &'a SystemParams,
    opts: SequenceOptions,
    sched: PulseSchedule,
    cursor: f64,
}

impl<'a> ScheduleBuilder<'a> {
    pub fn new(params: &'a SystemParams, opts: SequenceOptions) -> Self {
        let mut sched = PulseSchedule::idle(0.0);
        sched.duration = opts.lead_in_us;
        ScheduleBuilder { params, opts, sched, cursor: opts.lead_in_us }
    }

    pub fn cursor(&self) -> f64 {
        self.cursor
    }

    /// Beat period of the idle qubit detuning (us).
    fn beat_us(&self) -> f64 {
        1.0 / (self.params.omega1_mhz - self.params.omega2_mhz).abs()
    }

    pub fn idle(&mut self, dt: f64) -> &mut Self {
        self.cursor += dt;
        self.sched.duration = self.sched.duration.max(self.cursor);
        self
    }

    pub fn rotation(&mut self, qubit: Qubit, axis: char, angle: f64) -> Result<&mut Self> {
        self.rotation_pair(&[(qubit, axis, angle)])
    }

    /// Rotations on one or both qubits sharing one time window.
    pub fn rotation_pair(&mut self, rots: &[(Qubit, char, f64)]) -> Result<&mut Self> {
        let mut end = self.cursor;
        for &(qubit, axis, angle) in rots {
            if angle == 0.0 {
                continue;
            }
            let start = self.cursor;
            let sub = match axis {
                'z' => schedule_rz(qubit, angle, self.opts.rz_shift_mhz)?,
                'x' | 'y' => {
                    let carrier = match qubit {
                        Qubit::Q1 => self.params.omega1_mhz,
                        Qubit::Q2 => self.params.omega2_mhz,
                    };
                    let phase = if axis == 'x' { 0.0 } else { -std::f64::consts::FRAC_PI_2 };
                    schedule_rxy(qubit, angle, phase, self.opts.v0_mhz, self.opts.envelope, carrier)?
                }
                _ => return Err(Error::InvalidPulse("rotation axis must be x, y or z")),
            };
            self.splice(sub, start);
            end = end.max(start + self.windows_end(start));
        }
        self.cursor = end;
        self.sched.duration = self.sched.duration.max(self.cursor);
        Ok(self)
    }

    fn windows_end(&self, from: f64) -> f64 {
        let mut end: f64 = 0.0;
        for s in self.sched.shifts1.iter().chain(&self.sched.shifts2).chain(&self.sched.transmon_shifts) {
            if s.t0 >= from - 1e-12 {
                end = end.max(s.t0 + s.duration - from);
            }
        }
        for d in &self.sched.drives {
            let (a, b) = drive_support(&d.envelope);
            if a >= from - 1e-12 {
                end = end.max(b - from);
            }
        }
        end
    }

    fn splice(&mut self, sub: PulseSchedule, at: f64) {
        for mut s in sub.shifts1 {
            s.t0 += at;
            self.sched.shifts1.push(s);
        }
        for mut s in sub.shifts2 {
            s.t0 += at;
            self.sched.shifts2.push(s);
        }
        for mut s in sub.transmon_shifts {
            s.t0 += at;
            self.sched.transmon_shifts.push(s);
        }
        for mut d in sub.drives {
            d.envelope = shift_envelope(&d.envelope, at);
            self.sched.drives.push(d);
        }
        self.sched.duration = self.sched.duration.max(at + sub.duration);
    }

    /// XY window of `fraction` of the full sqrt-iSWAP time, with its
    /// rephasing steps. Window start snaps up to the beat grid.
    pub fn xy_window(&mut self, fraction: f64) -> Result<&mut Self> {
        if fraction <= 0.0 {
            return Ok(self);
        }
        let p = self.params;
        let omega_prime = p.transmon_mhz + self.opts.delta_omega_mhz;
        let w_r = 0.5 * (p.omega1_mhz + p.omega2_mhz);
        let margin = 10.0 * p.g1_mhz.max(p.g2_mhz);
        if omega_prime < w_r + margin {
            return Err(Error::ProtocolViolation(
                "tuned transmon frequency too close to the resonators",
            ));
        }
        let gamma = xy_coupling(w_r, w_r, omega_prime, p.g1_mhz, p.g2_mhz)?;
        if gamma == 0.0 {
            return Err(Error::ProtocolViolation("vanishing XY coupling"));
        }
        let tau = fraction * std::f64::consts::PI / (TWO_PI * gamma.abs());

        // snap to the beat grid so the exchange phase is unity
        let beat = self.beat_us();
        let k = (self.cursor / beat - 1e-9).ceil().max(0.0);
        let t_on = k * beat;
        let t_on = if t_on < self.cursor - 1e-12 { (k + 1.0) * beat } else { t_on };

        let xi1 = w_r - p.omega1_mhz;
        let xi2 = w_r - p.omega2_mhz;
        self.sched.shifts1.push(StepPulse { t0: t_on, duration: tau, amp_mhz: xi1 });
        self.sched.shifts2.push(StepPulse { t0: t_on, duration: tau, amp_mhz: xi2 });
        if self.opts.delta_omega_mhz != 0.0 {
            self.sched.transmon_shifts.push(StepPulse {
                t0: t_on,
                duration: tau,
                amp_mhz: self.opts.delta_omega_mhz,
            });
        }

        // trailing rephasing z-steps: cancel the xi_i * tau phase mod 2pi
        let mut t_next = t_on + tau;
        let mut rephase_end = t_next;
        for (qubit, xi) in [(Qubit::Q1, xi1), (Qubit::Q2, xi2)] {
            let phase = wrap_pm_pi(TWO_PI * xi * tau);
            if phase.abs() < 1e-12 {
                continue;
            }
            let amp = -phase.signum() * self.opts.rz_shift_mhz;
            let dur = phase.abs() / (TWO_PI * self.opts.rz_shift_mhz);
            self.sched.shifts_mut(qubit).push(StepPulse { t0: t_next, duration: dur, amp_mhz: amp });
            rephase_end = rephase_end.max(t_next + dur);
        }
        t_next = rephase_end;
        self.cursor = t_next;
        self.sched.duration = self.sched.duration.max(self.cursor);
        Ok(self)
    }

    pub fn gate(&mut self, g: GateSpec) -> Result<&mut Self> {
        match g {
            GateSpec::Rx { qubit, angle } => self.rotation(qubit, 'x', angle),
            GateSpec::Ry { qubit, angle } => self.rotation(qubit, 'y', angle),
            GateSpec::Rz { qubit, angle } => self.rotation(qubit, 'z', angle),
            GateSpec::SqrtISwap => self.xy_window(1.0),
            GateSpec::XyEvolve { fraction } => self.xy_window(fraction),
        }
    }

    pub fn finish(mut self, tail_us: f64) -> PulseSchedule {
        self.sched.duration = self.sched.duration.max(self.cursor + tail_us);
        self.sched
    }
}

fn drive_support(env: &Envelope) -> (f64, f64) {
    match *env {
        Envelope::Square { t0, duration } | Envelope::Trapezoid { t0, duration, .. } => {
            (t0, t0 + duration)
        }
        Envelope::Gaussian { center, sigma, cut, .. } => {
            (center - cut * sigma, center + cut * sigma)
        }
    }
}

fn shift_envelope(env: &Envelope, dt: f64) -> Envelope {
    match *env {
        Envelope::Square { t0, duration } => Envelope::Square { t0: t0 + dt, duration },
        Envelope::Gaussian { center, sigma, cut, scale } => {
            Envelope::Gaussian { center: center + dt, sigma, cut, scale }
        }
        Envelope::Trapezoid { t0, duration, ramp } => {
            Envelope::Trapezoid { t0: t0 + dt, duration, ramp }
        }
    }
}

/// Render a compiled gate sequence into one contiguous schedule.
///
/// Rotations on both qubits share a window; every XY op becomes a tuned
/// exchange window (its phase wrapped onto the branch the sign of Gamma can
/// reach) followed by its rephasing steps.
pub fn schedule_gate_sequence(
    params: &SystemParams,
    ops: &[crate::compiler::GateOp],
    opts: SequenceOptions,
) -> Result<PulseSchedule> {
    use crate::compiler::{GateOp, RotTarget};
    let w_r = 0.5 * (params.omega1_mhz + params.omega2_mhz);
    let gamma = xy_coupling(
        w_r,
        w_r,
        params.transmon_mhz + opts.delta_omega_mhz,
        params.g1_mhz,
        params.g2_mhz,
    )?;
    if gamma == 0.0 {
        return Err(Error::ProtocolViolation("vanishing XY coupling"));
    }
    let mut b = ScheduleBuilder::new(params, opts);
    for op in ops {
        match *op {
            GateOp::Rot { target, axis, angle } => {
                let ax = axis.as_char();
                // the step-pulse z convention accumulates -angle on |1>,
                // while Rz(theta) = exp(-i theta sz/2) needs +theta there
                let angle = if ax == 'z' { -angle } else { angle };
                match target {
                    RotTarget::One(q) => {
                        b.rotation(q, ax, angle)?;
                    }
                    RotTarget::Both => {
                        b.rotation_pair(&[(Qubit::Q1, ax, angle), (Qubit::Q2, ax, angle)])?;
                    }
                }
            }
            GateOp::Xy { phi } => {
                // wrap onto the realizable branch: phi' = phi mod 2pi with
                // sign(phi') = sign(gamma)
                let period = TWO_PI;
                let mut phi_w = phi % period;
                if gamma < 0.0 && phi_w > 1e-12 {
                    phi_w -= period;
                } else if gamma > 0.0 && phi_w < -1e-12 {
                    phi_w += period;
                }
                let fraction = phi_w.abs() / std::f64::consts::FRAC_PI_4;
                b.xy_window(fraction)?;
            }
        }
    }
    Ok(b.finish(0.02))
}

/// Full sqrt-iSWAP protocol: tune to the common midpoint frequency, lower
/// the transmon by `delta_omega_mhz`, interact for `tau = pi/|Gamma|`,
/// rephase.
pub fn schedule_sqrt_iswap(params: &SystemParams, delta_omega_mhz: f64) -> Result<PulseSchedule> {
    params.validate()?;
    let opts = SequenceOptions { delta_omega_mhz, ..Default::default() };
    let mut b = ScheduleBuilder::new(params, opts);
    b.xy_window(1.0)?;
    Ok(b.finish(0.05))
}

/// Time the sqrt-iSWAP interaction window lasts at the given tuning.
pub fn sqrt_iswap_tau(params: &SystemParams, delta_omega_mhz: f64) -> Result<f64> {
    let w_r = 0.5 * (params.omega1_mhz + params.omega2_mhz);
    let gamma = xy_coupling(
        w_r,
        w_r,
        params.transmon_mhz + delta_omega_mhz,
        params.g1_mhz,
        params.g2_mhz,
    )?;
    if gamma == 0.0 {
        return Err(Error::ProtocolViolation("vanishing XY coupling"));
    }
    Ok(std::f64::consts::PI / (TWO_PI * gamma.abs()))
}

/// Render a schedule into the integrator's generator.
///
/// In the interaction picture the frame carries the full instantaneous
/// diagonal of `H0` including the transmon tuning; shift steps, the
/// `-lambda_i` compensations and the transverse drives remain as in-frame
/// terms. In the lab frame everything lands in the static part.
pub fn render_hamiltonian(
    schedule: &PulseSchedule,
    params: &SystemParams,
    layout: &SubsystemLayout,
    frame: Frame,
) -> Result<Generator> {
    schedule.validate()?;
    params.validate()?;
    let dim = layout.total_dim();
    let nb = layout.fock_levels();

    // static coupling operator g1 x1 sx + g2 x2 sx (+ any off-diagonal
    // nonlinearity), angular units
    let b = annihilation_operator(nb)?;
    let x = &b + &b.adjoint();
    let sx = embed(&pauli(PauliAxis::X), Subsystem::Transmon, layout)?;
    let x1 = embed(&x, Subsystem::Nr1, layout)?;
    let x2 = embed(&x, Subsystem::Nr2, layout)?;
    let mut coupling = &x1.matmul(&sx).scale(Complex64::new(TWO_PI * params.g1_mhz, 0.0))
        + &x2.matmul(&sx).scale(Complex64::new(TWO_PI * params.g2_mhz, 0.0));

    // bare diagonal: omega_i n_i + nonlinearity diagonal + transmon
    let mut bare = vec![0.0f64; dim];
    let nl1 = params.nonlinearity1.term(nb)?;
    let nl2 = params.nonlinearity2.term(nb)?;
    let nl1e = embed(&nl1, Subsystem::Nr1, layout)?;
    let nl2e = embed(&nl2, Subsystem::Nr2, layout)?;
    for a in 0..dim {
        let (n1, s, n2) = layout.labels_of(a);
        let sz = if s == crate::operators::TRANSMON_UP { 1.0 } else { -1.0 };
        bare[a] = TWO_PI
            * (params.omega1_mhz * n1 as f64
                + params.omega2_mhz * n2 as f64
                + params.transmon_mhz / 2.0 * sz)
            + TWO_PI * (nl1e[(a, a)].re + nl2e[(a, a)].re);
    }
    // off-diagonal nonlinearity (quartic model) joins the static coupling
    let mut nl_off = &nl1e + &nl2e;
    for a in 0..dim {
        nl_off[(a, a)] = Complex64::ZERO;
    }
    coupling = &coupling + &nl_off.scale(Complex64::new(TWO_PI, 0.0));
    let coupling_op = SparseOp::from_dense(&coupling, 1e-14);

    // number operators per NR as diagonals
    let mut n1d = vec![0.0f64; dim];
    let mut n2d = vec![0.0f64; dim];
    let mut szd = vec![0.0f64; dim];
    for a in 0..dim {
        let (n1, s, n2) = layout.labels_of(a);
        n1d[a] = n1 as f64;
        n2d[a] = n2 as f64;
        szd[a] = if s == crate::operators::TRANSMON_UP { 0.5 } else { -0.5 };
    }

    // segment boundaries from every step edge and drive support edge
    let mut cuts: Vec<f64> = vec![0.0, schedule.duration];
    let mut add_cut = |t: f64| {
        cuts.push(t.clamp(0.0, schedule.duration));
    };
    for s in
        schedule.shifts1.iter().chain(&schedule.shifts2).chain(&schedule.transmon_shifts)
    {
        add_cut(s.t0);
        add_cut(s.t0 + s.duration);
    }
    for d in &schedule.drives {
        let (a, b) = drive_support(&d.envelope);
        add_cut(a);
        add_cut(b);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let ramp = schedule.ramp_us.max(0.0);
    let step_value = |steps: &[StepPulse], t: f64| -> f64 {
        let mut v = 0.0;
        for s in steps {
            if ramp == 0.0 {
                if t >= s.t0 - 1e-12 && t <= s.t0 + s.duration - 1e-12 {
                    v += s.amp_mhz;
                }
            } else {
                let env = Envelope::Trapezoid { t0: s.t0, duration: s.duration, ramp };
                v += s.amp_mhz * env.value(t);
            }
        }
        v
    };

    let mut segments = Vec::new();
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 < 1e-12 {
            continue;
        }
        let tm = 0.5 * (t0 + t1);
        let d_omega_tr = step_value(&schedule.transmon_shifts, tm);
        let shift1 = step_value(&schedule.shifts1, tm);
        let shift2 = step_value(&schedule.shifts2, tm);

        // compensation follows the current operating point
        let (lam1, lam2) = if schedule.auto_compensation {
            let beta1 = match params.nonlinearity1 {
                NonlinearityModel::DiagonalKerr { beta_mhz } => beta_mhz,
                NonlinearityModel::Quartic { .. } => 0.0,
            };
            let beta2 = match params.nonlinearity2 {
                NonlinearityModel::DiagonalKerr { beta_mhz } => beta_mhz,
                NonlinearityModel::Quartic { .. } => 0.0,
            };
            let omega_now = params.transmon_mhz + d_omega_tr;
            (
                qubit_shift(params.omega1_mhz + shift1, omega_now, params.g1_mhz, beta1)?,
                qubit_shift(params.omega2_mhz + shift2, omega_now, params.g2_mhz, beta2)?,
            )
        } else {
            (0.0, 0.0)
        };

        // transmon tuning absorbed into the frame as delta_omega * sz/2
        let mut frame_rates = vec![0.0f64; dim];
        let mut diag = vec![0.0f64; dim];
        for a in 0..dim {
            frame_rates[a] = bare[a] + TWO_PI * d_omega_tr * szd[a];
            diag[a] = TWO_PI * ((shift1 - lam1) * n1d[a] + (shift2 - lam2) * n2d[a]);
        }

        let mut terms = vec![HamTerm { op: coupling_op.clone(), coeff: Coeff::Unit }];
        for d in &schedule.drives {
            let (a, bqq) = drive_support(&d.envelope);
            if bqq <= t0 + 1e-12 || a >= t1 - 1e-12 {
                continue;
            }
            let xop = match d.qubit {
                Qubit::Q1 => &x1,
                Qubit::Q2 => &x2,
            };
            terms.push(HamTerm {
                op: SparseOp::from_dense(xop, 1e-14),
                coeff: Coeff::Drive {
                    amp_ang: TWO_PI * d.v0_mhz,
                    carrier_ang: TWO_PI * d.carrier_mhz,
                    phase: d.phase,
                    env: d.envelope,
                },
            });
        }
        // ramped steps ride as carrier-free pulse terms instead of diag
        if ramp > 0.0 {
            for a in 0..dim {
                diag[a] = -TWO_PI * (lam1 * n1d[a] + lam2 * n2d[a]);
            }
            for (steps, nd) in [(&schedule.shifts1, &n1d), (&schedule.shifts2, &n2d)] {
                for s in steps.iter() {
                    if s.t0 + s.duration <= t0 + 1e-12 || s.t0 >= t1 - 1e-12 {
                        continue;
                    }
                    let mut op = SparseOp::default();
                    for a in 0..dim {
                        if nd[a] != 0.0 {
                            op.rows.push(a as u32);
                            op.cols.push(a as u32);
                            op.vals.push(Complex64::new(nd[a], 0.0));
                        }
                    }
                    terms.push(HamTerm {
                        op,
                        coeff: Coeff::Pulse {
                            amp_ang: TWO_PI * s.amp_mhz,
                            env: Envelope::Trapezoid { t0: s.t0, duration: s.duration, ramp },
                        },
                    });
                }
            }
        }

        match frame {
            Frame::InteractionPicture => {
                segments.push(Segment { duration: t1 - t0, frame_rates, diag, terms });
            }
            Frame::Lab => {
                for a in 0..dim {
                    diag[a] += frame_rates[a];
                }
                segments.push(Segment { duration: t1 - t0, frame_rates: vec![0.0; dim], diag, terms });
            }
        }
    }
    Ok(Generator::new(dim, segments))
}

/// Standard dissipator set of [`SystemParams`]: NR decay and dephasing plus
/// transmon decay and dephasing.
pub fn standard_dissipators(
    params: &SystemParams,
    layout: &SubsystemLayout,
) -> Result<crate::dynamics::LindbladSpec> {
    let nb = layout.fock_levels();
    let b = annihilation_operator(nb)?;
    let n = b.adjoint().matmul(&b);
    let b1 = embed(&b, Subsystem::Nr1, layout)?;
    let b2 = embed(&b, Subsystem::Nr2, layout)?;
    let n1 = embed(&n, Subsystem::Nr1, layout)?;
    let n2 = embed(&n, Subsystem::Nr2, layout)?;
    let sm = embed(&pauli(PauliAxis::Minus), Subsystem::Transmon, layout)?;
    let sz = embed(&pauli(PauliAxis::Z), Subsystem::Transmon, layout)?;
    crate::dynamics::LindbladSpec::new()
        .with(b1, params.gamma1_hz)?
        .with(n1, params.gamma1_d_hz)?
        .with(b2, params.gamma2_hz)?
        .with(n2, params.gamma2_d_hz)?
        .with(sm, params.gamma_tr_hz)?
        .with(sz, params.gamma_tr_d_hz)
}
