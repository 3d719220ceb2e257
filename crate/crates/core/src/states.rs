//! Shared n-qubit state and density-matrix types.
//!
//! Qubit ordering convention: qubit 0 is the most significant bit of the
//! computational-basis index, i.e. basis index `b` encodes
//! |q0 q1 ... q(n-1)> with q0 = bit (n-1) of `b`. Kronecker products built
//! with [`kron`] follow the same convention (left factor = qubit 0).
//! Basis labels: 0 = H (spin up), 1 = V (spin down).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Pure state of `n` qubits, stored as a dense amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    n_qubits: usize,
    amps: CVector,
}

impl QubitState {
    pub fn new(n_qubits: usize, amps: CVector) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::InvalidArgument(format!(
                "amplitude vector of length {} does not match {} qubits",
                amps.len(),
                n_qubits
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state |b> where bit (n-1-i) of `b` is qubit i.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = CVector::zeros(1 << n_qubits);
        amps[index] = C64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn squared_norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.squared_norm();
        if n2 <= 0.0 {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amps: &self.amps / C64::new(n2.sqrt(), 0.0),
        })
    }

    /// Fails unless the squared norm is within `tol` of one.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let n2 = self.squared_norm();
        if (n2 - 1.0).abs() > tol {
            return Err(Error::NotNormalized(n2));
        }
        Ok(())
    }

    /// <self|other>.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |<self|other>|^2 for normalized inputs.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amps: self.amps.kronecker(&other.amps),
        }
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let m = &self.amps * self.amps.adjoint();
        DensityMatrix {
            n_qubits: self.n_qubits,
            m,
        }
    }

    /// Singlet (|HV> - |VH>)/sqrt(2).
    pub fn psi_minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = CVector::zeros(4);
        amps[0b01] = C64::new(s, 0.0);
        amps[0b10] = C64::new(-s, 0.0);
        Self { n_qubits: 2, amps }
    }

    /// Triplet (|HV> + |VH>)/sqrt(2).
    pub fn psi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = CVector::zeros(4);
        amps[0b01] = C64::new(s, 0.0);
        amps[0b10] = C64::new(s, 0.0);
        Self { n_qubits: 2, amps }
    }

    /// (|HH> + |VV>)/sqrt(2).
    pub fn phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = CVector::zeros(4);
        amps[0b00] = C64::new(s, 0.0);
        amps[0b11] = C64::new(s, 0.0);
        Self { n_qubits: 2, amps }
    }

    /// (|HH> - |VV>)/sqrt(2).
    pub fn phi_minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = CVector::zeros(4);
        amps[0b00] = C64::new(s, 0.0);
        amps[0b11] = C64::new(-s, 0.0);
        Self { n_qubits: 2, amps }
    }
}

/// Hermitian, PSD, trace-one matrix over n qubits.
///
/// Constructors validate the invariants up to fixed tolerances (Hermiticity
/// 1e-12, trace 1e-12, eigenvalues >= -1e-10).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    m: CMatrix,
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const PSD_TOL: f64 = -1e-10;

    /// Validates and wraps a raw matrix.
    pub fn new(m: CMatrix) -> Result<Self> {
        let dim = m.nrows();
        if dim == 0 || m.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be square with power-of-two dimension, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        let herm_dev = hermiticity_deviation(&m);
        if herm_dev > Self::HERMITICITY_TOL {
            return Err(Error::NotHermitian(herm_dev));
        }
        let tr = m.diagonal().iter().map(|z| z.re).sum::<f64>();
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::BadTrace(tr));
        }
        let evals = hermitian_eigenvalues(&m);
        let min = evals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < Self::PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { n_qubits, m })
    }

    /// Wraps without validation; for internal use where invariants hold by
    /// construction.
    pub(crate) fn from_parts_unchecked(n_qubits: usize, m: CMatrix) -> Self {
        Self { n_qubits, m }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        let m = CMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
        Self { n_qubits, m }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).diagonal().iter().map(|z| z.re).sum()
    }

    /// Convex combination p*self + (1-p)*other.
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("mixing weight {p}")));
        }
        if self.n_qubits != other.n_qubits {
            return Err(Error::InvalidArgument(
                "mixing density matrices of different size".into(),
            ));
        }
        let m = &self.m * C64::new(p, 0.0) + &other.m * C64::new(1.0 - p, 0.0);
        Ok(Self {
            n_qubits: self.n_qubits,
            m,
        })
    }

    /// <psi|rho|psi> for a normalized pure reference.
    pub fn fidelity_with_pure(&self, psi: &QubitState) -> f64 {
        let v = psi.amplitudes();
        let rv = &self.m * v;
        v.iter().zip(rv.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Trace distance (1/2)||rho - sigma||_1.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let d = &self.m - &other.m;
        let evals = hermitian_eigenvalues(&d);
        0.5 * evals.iter().map(|e| e.abs()).sum::<f64>()
    }

    /// Hermitian square root via eigendecomposition; tiny negative
    /// eigenvalues are clipped to zero.
    pub fn sqrtm(&self) -> CMatrix {
        let (evals, evecs) = hermitian_eigen(&self.m);
        let mut s = CMatrix::zeros(self.dim(), self.dim());
        for (k, &l) in evals.iter().enumerate() {
            let r = l.max(0.0).sqrt();
            if r == 0.0 {
                continue;
            }
            let v = evecs.column(k);
            s += (v * v.adjoint()) * C64::new(r, 0.0);
        }
        s
    }
}

/// Max |m - m^dagger| entry.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut evals: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    evals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    evals
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending with
/// matching eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let evals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let dim = m.nrows();
    let mut evecs = CMatrix::zeros(dim, dim);
    for (k, &i) in order.iter().enumerate() {
        evecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (evals, evecs)
}

/// Kronecker product, left factor most significant.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn pauli_i() -> CMatrix {
    CMatrix::identity(2, 2)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0), C64::new(1.0, 0.0),
        C64::new(1.0, 0.0), C64::new(0.0, 0.0),
    ])
}

/// sigma_Y = -i|0><1| + i|1><0|.
pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0), C64::new(0.0, -1.0),
        C64::new(0.0, 1.0), C64::new(0.0, 0.0),
    ])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[
        C64::new(1.0, 0.0), C64::new(0.0, 0.0),
        C64::new(0.0, 0.0), C64::new(-1.0, 0.0),
    ])
}
