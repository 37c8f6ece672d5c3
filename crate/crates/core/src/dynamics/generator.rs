//! Time-dependent generator representation consumed by the RK4 integrator.
//!
//! A run is a contiguous list of [`Segment`]s. Within a segment the rotating
//! frame is constant: `frame_rates[a]` is the angular rate of basis state
//! `a`, and every sparse Hamiltonian element `(r, c)` rotates at
//! `frame_rates[r] - frame_rates[c]`. Cross-segment phase continuity is the
//! integrator's job; the frame phase is the piecewise-linear integral of the
//! rates.

use num_complex::Complex64;

/// Pulse envelope in absolute time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// Unit amplitude on `[t0, t0 + duration]`.
    Square { t0: f64, duration: f64 },
    /// `scale * exp(-(t-center)^2 / 2 sigma^2)` truncated at `center +- cut*sigma`.
    ///
    /// `scale` renormalizes the clipped area so the rotation angle is exact.
    Gaussian { center: f64, sigma: f64, cut: f64, scale: f64 },
    /// Unit plateau with linear rise and fall of length `ramp` inside
    /// `[t0, t0 + duration]`.
    Trapezoid { t0: f64, duration: f64, ramp: f64 },
}

impl Envelope {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Envelope::Square { t0, duration } => {
                if t >= t0 && t <= t0 + duration {
                    1.0
                } else {
                    0.0
                }
            }
            Envelope::Gaussian { center, sigma, cut, scale } => {
                let u = (t - center) / sigma;
                if u.abs() <= cut {
                    scale * (-0.5 * u * u).exp()
                } else {
                    0.0
                }
            }
            Envelope::Trapezoid { t0, duration, ramp } => {
                let x = t - t0;
                if x < 0.0 || x > duration {
                    0.0
                } else if ramp <= 0.0 {
                    1.0
                } else if x < ramp {
                    x / ramp
                } else if x > duration - ramp {
                    (duration - x) / ramp
                } else {
                    1.0
                }
            }
        }
    }

    /// Integral of the envelope over all time (its support).
    pub fn area(&self) -> f64 {
        match *self {
            Envelope::Square { duration, .. } => duration,
            Envelope::Gaussian { sigma, cut, scale, .. } => {
                let erf_arg = cut / std::f64::consts::SQRT_2;
                scale * sigma * (2.0 * std::f64::consts::PI).sqrt() * erf(erf_arg)
            }
            Envelope::Trapezoid { duration, ramp, .. } => duration - ramp.max(0.0),
        }
    }
}

// Abramowitz-Stegun 7.1.26; 1.5e-7 absolute accuracy is plenty for an
// envelope-area normalization already renormalized exactly downstream.
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

/// Scalar coefficient multiplying a sparse term.
#[derive(Debug, Clone, PartialEq)]
pub enum Coeff {
    Unit,
    /// `amp_ang * env(t) * cos(carrier_ang * t + phase)`, absolute time.
    Drive { amp_ang: f64, carrier_ang: f64, phase: f64, env: Envelope },
    /// `amp_ang * env(t)` without a carrier (ramped steps).
    Pulse { amp_ang: f64, env: Envelope },
}

impl Coeff {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Coeff::Unit => 1.0,
            Coeff::Drive { amp_ang, carrier_ang, phase, env } => {
                amp_ang * env.value(t) * (carrier_ang * t + phase).cos()
            }
            Coeff::Pulse { amp_ang, env } => amp_ang * env.value(t),
        }
    }

    fn max_cycles_per_us(&self) -> f64 {
        match self {
            Coeff::Unit => 0.0,
            Coeff::Drive { carrier_ang, .. } => carrier_ang / crate::TWO_PI,
            Coeff::Pulse { .. } => 0.0,
        }
    }
}

/// Sparse operator as parallel element arrays.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseOp {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
    pub vals: Vec<Complex64>,
}

impl SparseOp {
    pub fn from_dense(m: &crate::CMatrix, threshold: f64) -> Self {
        let mut op = SparseOp::default();
        for r in 0..m.dim() {
            for c in 0..m.dim() {
                let v = m[(r, c)];
                if v.norm() > threshold {
                    op.rows.push(r as u32);
                    op.cols.push(c as u32);
                    op.vals.push(v);
                }
            }
        }
        op
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }
}

/// One sparse Hamiltonian term with its scalar coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct HamTerm {
    pub op: SparseOp,
    pub coeff: Coeff,
}

/// Piece of the evolution with a fixed frame and fixed term structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub duration: f64,
    /// Angular rate of each basis state absorbed into the frame (rad/us).
    pub frame_rates: Vec<f64>,
    /// Static in-frame diagonal left in the generator (rad/us).
    pub diag: Vec<f64>,
    pub terms: Vec<HamTerm>,
}

impl Segment {
    /// Static segment: frame only, nothing else.
    pub fn free(duration: f64, frame_rates: Vec<f64>) -> Self {
        let n = frame_rates.len();
        Segment { duration, frame_rates, diag: vec![0.0; n], terms: Vec::new() }
    }

    /// Fastest oscillation the RK4 stages must resolve, in cycles/us.
    pub fn max_cycles_per_us(&self) -> f64 {
        let mut fmax: f64 = 0.0;
        for term in &self.terms {
            for k in 0..term.op.len() {
                let nu = self.frame_rates[term.op.rows[k] as usize]
                    - self.frame_rates[term.op.cols[k] as usize];
                fmax = fmax.max(nu.abs() / crate::TWO_PI);
            }
            fmax = fmax.max(term.coeff.max_cycles_per_us());
        }
        let dmax = self.diag.iter().cloned().fold(f64::MIN, f64::max);
        let dmin = self.diag.iter().cloned().fold(f64::MAX, f64::min);
        if self.diag.len() > 1 {
            fmax = fmax.max((dmax - dmin).abs() / crate::TWO_PI);
        }
        fmax
    }
}

/// A full time-dependent generator: contiguous segments starting at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub dim: usize,
    pub segments: Vec<Segment>,
}

impl Generator {
    pub fn new(dim: usize, segments: Vec<Segment>) -> Self {
        Generator { dim, segments }
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Static generator from a dense Hamiltonian (lab frame, rad/us).
    pub fn from_static(h: &crate::CMatrix, duration: f64) -> Self {
        let dim = h.dim();
        let mut diag = vec![0.0; dim];
        let mut off = crate::CMatrix::zeros(dim);
        for r in 0..dim {
            diag[r] = h[(r, r)].re;
            for c in 0..dim {
                if r != c {
                    off[(r, c)] = h[(r, c)];
                }
            }
        }
        let op = SparseOp::from_dense(&off, 0.0);
        let mut terms = Vec::new();
        if !op.is_empty() {
            terms.push(HamTerm { op, coeff: Coeff::Unit });
        }
        Generator {
            dim,
            segments: vec![Segment { duration, frame_rates: vec![0.0; dim], diag, terms }],
        }
    }

    /// Accumulated frame phase of each basis state at time `t`.
    pub fn frame_phases_at(&self, t: f64) -> Vec<f64> {
        let mut phi = vec![0.0; self.dim];
        let mut t_left = t;
        for seg in &self.segments {
            let dt = t_left.min(seg.duration);
            if dt <= 0.0 {
                break;
            }
            for (p, r) in phi.iter_mut().zip(&seg.frame_rates) {
                *p += r * dt;
            }
            t_left -= dt;
        }
        phi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_area_matches_closed_form() {
        let env = Envelope::Gaussian { center: 2.0, sigma: 0.5, cut: 3.0, scale: 1.0 };
        // numeric quadrature oracle
        let n = 400_000;
        let (a, b) = (0.0, 4.0);
        let h = (b - a) / n as f64;
        let mut s = 0.0;
        for k in 0..=n {
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            s += w * env.value(a + k as f64 * h);
        }
        s *= h;
        assert!((s - env.area()).abs() < 1e-6, "quad {s} vs closed {}", env.area());
    }

    #[test]
    fn square_envelope_support() {
        let env = Envelope::Square { t0: 1.0, duration: 2.0 };
        assert_eq!(env.value(0.99), 0.0);
        assert_eq!(env.value(1.5), 1.0);
        assert_eq!(env.value(3.01), 0.0);
        assert_eq!(env.area(), 2.0);
    }

    #[test]
    fn frame_phase_accumulates_piecewise() {
        let g = Generator::new(
            2,
            vec![Segment::free(1.0, vec![1.0, 2.0]), Segment::free(0.5, vec![-2.0, 0.0])],
        );
        let phi = g.frame_phases_at(1.25);
        assert!((phi[0] - (1.0 - 0.5)).abs() < 1e-14);
        assert!((phi[1] - 2.0).abs() < 1e-14);
    }
}
