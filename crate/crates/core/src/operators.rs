//! Truncated-Fock and qubit operator algebra with tensor embedding.
//!
//! The global tensor order is fixed as (NR1, transmon, NR2) and every module
//! addresses subsystems through [`Subsystem`], never by raw slot index.
//! Transmon basis ordering puts the excited state first, so
//! `sigma_z = diag(+1, -1)` raises the excited state as in `H = Omega/2 s_z`.

use num_complex::Complex64;

use crate::{CMatrix, Error, Result};

/// Index of the transmon excited state |up> in its 2-dim factor.
pub const TRANSMON_UP: usize = 0;
/// Index of the transmon ground state |down> in its 2-dim factor.
pub const TRANSMON_DOWN: usize = 1;

/// Symbolic name of a tensor factor in the fixed (NR1, transmon, NR2) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Nr1,
    Transmon,
    Nr2,
}

impl Subsystem {
    pub fn slot(self) -> usize {
        match self {
            Subsystem::Nr1 => 0,
            Subsystem::Transmon => 1,
            Subsystem::Nr2 => 2,
        }
    }
}

/// Ordered subsystem dimensions; total Hilbert dimension is their product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    /// Layout with `n_max + 1` Fock levels on each NR and a two-level transmon.
    pub fn with_fock_cutoff(n_max: usize) -> Self {
        SubsystemLayout { dims: vec![n_max + 1, 2, n_max + 1] }
    }

    /// The default five-level-per-NR layout (n_max = 4); gate dynamics never
    /// populates the top two levels at the operating parameters.
    pub fn standard() -> Self {
        Self::with_fock_cutoff(4)
    }

    pub fn from_dims(dims: Vec<usize>) -> Result<Self> {
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidDimension(*dims.iter().min().unwrap_or(&0)));
        }
        Ok(SubsystemLayout { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_of(&self, s: Subsystem) -> usize {
        self.dims[s.slot()]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Fock levels per NR (layout is NR1 x transmon x NR2).
    pub fn fock_levels(&self) -> usize {
        self.dims[0]
    }

    /// Flat basis index of the product state |n1, s, n2>.
    pub fn index_of(&self, n1: usize, transmon: usize, n2: usize) -> usize {
        (n1 * self.dims[1] + transmon) * self.dims[2] + n2
    }

    /// Inverse of [`SubsystemLayout::index_of`].
    pub fn labels_of(&self, idx: usize) -> (usize, usize, usize) {
        let n2 = idx % self.dims[2];
        let rest = idx / self.dims[2];
        (rest / self.dims[1], rest % self.dims[1], n2)
    }
}

/// Pauli / ladder axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Bosonic annihilation operator on a truncated Fock space:
/// `<n-1|b|n> = sqrt(n)`.
pub fn annihilation_operator(dim: usize) -> Result<CMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut b = CMatrix::zeros(dim);
    for n in 1..dim {
        b[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(b)
}

/// Standard 2x2 Pauli / ladder matrix in the (|up>, |down>) ordering.
///
/// `Plus` raises |down> to |up>, `Minus` lowers |up> to |down>.
pub fn pauli(axis: PauliAxis) -> CMatrix {
    let mut m = CMatrix::zeros(2);
    let (i, one) = (Complex64::I, Complex64::ONE);
    match axis {
        PauliAxis::X => {
            m[(0, 1)] = one;
            m[(1, 0)] = one;
        }
        PauliAxis::Y => {
            m[(0, 1)] = -i;
            m[(1, 0)] = i;
        }
        PauliAxis::Z => {
            m[(0, 0)] = one;
            m[(1, 1)] = -one;
        }
        PauliAxis::Plus => {
            m[(TRANSMON_UP, TRANSMON_DOWN)] = one;
        }
        PauliAxis::Minus => {
            m[(TRANSMON_DOWN, TRANSMON_UP)] = one;
        }
    }
    m
}

/// Tensor-embed `op` at `slot`: identity on every other factor, layout order.
pub fn embed(op: &CMatrix, slot: Subsystem, layout: &SubsystemLayout) -> Result<CMatrix> {
    let s = slot.slot();
    if op.dim() != layout.dims[s] {
        return Err(Error::DimensionMismatch { expected: layout.dims[s], found: op.dim() });
    }
    let left: usize = layout.dims[..s].iter().product();
    let right: usize = layout.dims[s + 1..].iter().product();
    let mid = op.dim();
    let total = left * mid * right;
    let mut out = CMatrix::zeros(total);
    for l in 0..left {
        for r in 0..mid {
            for c in 0..mid {
                let v = op[(r, c)];
                if v == Complex64::ZERO {
                    continue;
                }
                for q in 0..right {
                    out[((l * mid + r) * right + q, (l * mid + c) * right + q)] = v;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annihilation_matrix_elements() {
        let b = annihilation_operator(2).unwrap();
        assert_eq!(b[(0, 1)], Complex64::ONE);
        assert_eq!(b[(0, 0)], Complex64::ZERO);
        assert_eq!(b[(1, 0)], Complex64::ZERO);
        let b3 = annihilation_operator(3).unwrap();
        assert!((b3[(0, 1)].re - 1.0).abs() < 1e-15);
        assert!((b3[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn number_operator_is_diagonal_count() {
        let b = annihilation_operator(4).unwrap();
        let n = b.adjoint().matmul(&b);
        for k in 0..4 {
            assert!((n[(k, k)].re - k as f64).abs() < 1e-14);
        }
        assert!(n.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn rejects_dimension_below_two() {
        assert!(matches!(annihilation_operator(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn truncation_artifact_confined_to_top_level() {
        // [b, b+] = I except on the top Fock level.
        let dim = 6;
        let b = annihilation_operator(dim).unwrap();
        let comm = &b.matmul(&b.adjoint()) - &b.adjoint().matmul(&b);
        for r in 0..dim - 1 {
            for c in 0..dim - 1 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((comm[(r, c)].re - want).abs() < 1e-14);
                assert!(comm[(r, c)].im.abs() < 1e-14);
            }
        }
        assert!((comm[(dim - 1, dim - 1)].re + (dim as f64 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn pauli_algebra() {
        let (sx, sy, sz) = (pauli(PauliAxis::X), pauli(PauliAxis::Y), pauli(PauliAxis::Z));
        let (sp, sm) = (pauli(PauliAxis::Plus), pauli(PauliAxis::Minus));
        // z convention: excited state first.
        assert_eq!(sz[(0, 0)], Complex64::ONE);
        assert_eq!(sz[(1, 1)], -Complex64::ONE);
        // ladder completeness: s+s- + s-s+ = I
        let anti = &sp.matmul(&sm) + &sm.matmul(&sp);
        assert!((&anti - &CMatrix::identity(2)).max_abs() < 1e-15);
        // [sx, sy] = 2i sz
        let comm = &sx.matmul(&sy) - &sy.matmul(&sx);
        assert!((&comm - &sz.scale(Complex64::new(0.0, 2.0))).max_abs() < 1e-15);
        // s+ + s- = sx
        assert!((&(&sp + &sm) - &sx).max_abs() < 1e-15);
    }

    #[test]
    fn embed_identity_gives_global_identity() {
        let layout = SubsystemLayout::standard();
        for slot in [Subsystem::Nr1, Subsystem::Transmon, Subsystem::Nr2] {
            let id = CMatrix::identity(layout.dim_of(slot));
            let e = embed(&id, slot, &layout).unwrap();
            assert!((&e - &CMatrix::identity(layout.total_dim())).max_abs() < 1e-15);
        }
    }

    #[test]
    fn embedded_operators_on_distinct_slots_commute() {
        let layout = SubsystemLayout::standard();
        let b = annihilation_operator(layout.fock_levels()).unwrap();
        let e1 = embed(&b, Subsystem::Nr1, &layout).unwrap();
        let ex = embed(&pauli(PauliAxis::X), Subsystem::Transmon, &layout).unwrap();
        let comm = &e1.matmul(&ex) - &ex.matmul(&e1);
        assert!(comm.max_abs() < 1e-14);
        assert_eq!(e1.dim(), layout.total_dim());
    }

    #[test]
    fn embed_preserves_hermiticity_and_norm() {
        let layout = SubsystemLayout::with_fock_cutoff(3);
        let b = annihilation_operator(4).unwrap();
        let x = &b + &b.adjoint();
        let e = embed(&x, Subsystem::Nr2, &layout).unwrap();
        assert!(e.hermiticity_defect() < 1e-15);
        // spectral norm preserved: max |eigenvalue| identical
        let (ev_small, _) = x.hermitian_eigen();
        let (ev_big, _) = e.hermitian_eigen();
        let m_small = ev_small.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let m_big = ev_big.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        assert!((m_small - m_big).abs() < 1e-10);
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        let layout = SubsystemLayout::standard();
        let b = annihilation_operator(3).unwrap();
        assert!(matches!(
            embed(&b, Subsystem::Nr1, &layout),
            Err(Error::DimensionMismatch { expected: 5, found: 3 })
        ));
    }

    #[test]
    fn layout_indexing_roundtrip() {
        let layout = SubsystemLayout::standard();
        assert_eq!(layout.total_dim(), 50);
        for idx in 0..layout.total_dim() {
            let (n1, s, n2) = layout.labels_of(idx);
            assert_eq!(layout.index_of(n1, s, n2), idx);
        }
    }
}
