//! State fidelity and χ-matrix process tomography on qubit registers.

use thiserror::Error;

use crate::exec::Exec;
use crate::gates::GateReport;
use crate::linalg::{c, cr, eigenvalues_hermitian, kron_all, psd_sqrt, CMatrix, Pauli};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TomographyError {
    #[error("matrix is not positive semidefinite (eigenvalue {0})")]
    NotPsd(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("reconstruction is unphysical (eigenvalue {0})")]
    Unphysical(f64),
    #[error("tomography supports 1 to {max} qubits, got {got}")]
    Qubits { max: usize, got: usize },
    #[error("gate action is {rows}x{cols}, expected a square qubit register")]
    GateShape { rows: usize, cols: usize },
    #[error("process matrix has zero trace")]
    ZeroTrace,
}

pub const MAX_QUBITS: usize = 3;
const PSD_TOL: f64 = 1e-8;

/// Uhlmann fidelity [Tr √(√ρ σ √ρ)]².
pub fn state_fidelity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64, TomographyError> {
    if rho.shape() != sigma.shape() {
        return Err(TomographyError::Dimension(rho.nrows(), sigma.nrows()));
    }
    for m in [rho, sigma] {
        let low = eigenvalues_hermitian(m).first().copied().unwrap_or(0.0);
        if low < -PSD_TOL {
            return Err(TomographyError::NotPsd(low));
        }
    }
    let s = psd_sqrt(rho);
    let inner = &s * sigma * &s;
    let t: f64 = eigenvalues_hermitian(&inner).iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok((t * t).min(1.0))
}

/// Pauli-product operator basis, first qubit most significant:
/// index Σ p_k 4^{n−1−k} with p ∈ (I, X, Y, Z).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliBasis {
    pub qubits: usize,
    pub labels: Vec<String>,
    pub operators: Vec<CMatrix>,
}

impl PauliBasis {
    pub fn new(qubits: usize) -> Result<Self, TomographyError> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(TomographyError::Qubits { max: MAX_QUBITS, got: qubits });
        }
        let singles = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let count = 4usize.pow(qubits as u32);
        let mut labels = Vec::with_capacity(count);
        let mut operators = Vec::with_capacity(count);
        for m in 0..count {
            let digits: Vec<Pauli> = (0..qubits).map(|k| singles[(m >> (2 * (qubits - 1 - k))) & 3]).collect();
            labels.push(digits.iter().map(|p| p.label()).collect());
            operators.push(kron_all(&digits.iter().map(|p| p.matrix()).collect::<Vec<_>>()));
        }
        Ok(PauliBasis { qubits, labels, operators })
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// χ with E(ρ) = Σ χ_mn A_m ρ A_n†.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessMatrix {
    pub basis: PauliBasis,
    pub chi: CMatrix,
}

impl ProcessMatrix {
    pub fn d(&self) -> usize {
        self.chi.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.chi.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.chi - self.chi.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigenvalues_hermitian(&self.chi).first().copied().unwrap_or(0.0)
    }

    pub fn rank(&self, tol: f64) -> usize {
        eigenvalues_hermitian(&self.chi).iter().filter(|&&l| l > tol).count()
    }

    /// max |Σ χ_mn A_n† A_m − I|.
    pub fn trace_preservation_error(&self) -> f64 {
        let dim = self.basis.dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for (m, am) in self.basis.operators.iter().enumerate() {
            for (n, an) in self.basis.operators.iter().enumerate() {
                let w = self.chi[(m, n)];
                if w != C64::new(0.0, 0.0) {
                    sum += an.adjoint() * am * w;
                }
            }
        }
        (sum - CMatrix::identity(dim, dim)).camax()
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let dim = self.basis.dim();
        let mut out = CMatrix::zeros(dim, dim);
        for (m, am) in self.basis.operators.iter().enumerate() {
            let left = am * rho;
            for (n, an) in self.basis.operators.iter().enumerate() {
                let w = self.chi[(m, n)];
                if w != C64::new(0.0, 0.0) {
                    out += &left * an.adjoint() * w;
                }
            }
        }
        out
    }

    /// Rescaled to unit trace, used for heralded (trace-decreasing) channels.
    pub fn normalized(&self) -> Result<ProcessMatrix, TomographyError> {
        let t = self.trace();
        if !(t > 0.0) {
            return Err(TomographyError::ZeroTrace);
        }
        Ok(ProcessMatrix {
            basis: self.basis.clone(),
            chi: &self.chi / cr(t),
        })
    }
}

/// χ of the unitary channel ρ ↦ UρU†.
pub fn unitary_chi(u: &CMatrix) -> Result<ProcessMatrix, TomographyError> {
    let qubits = u.nrows().trailing_zeros() as usize;
    if !u.is_square() || 1 << qubits != u.nrows() {
        return Err(TomographyError::GateShape { rows: u.nrows(), cols: u.ncols() });
    }
    let basis = PauliBasis::new(qubits)?;
    let dim = basis.dim() as f64;
    let coeffs: Vec<C64> = basis.operators.iter().map(|a| (a.adjoint() * u).trace() / cr(dim)).collect();
    let d = coeffs.len();
    let chi = CMatrix::from_fn(d, d, |m, n| coeffs[m] * coeffs[n].conj());
    Ok(ProcessMatrix { basis, chi })
}

/// U = ½(II + IX + ZI − ZX).
pub fn cnot_ideal_chi() -> ProcessMatrix {
    let basis = PauliBasis::new(2).expect("two qubits");
    let mut coeffs = vec![cr(0.0); 16];
    for (label, v) in [("II", 0.5), ("IX", 0.5), ("ZI", 0.5), ("ZX", -0.5)] {
        coeffs[basis.index_of(label).expect("label")] = cr(v);
    }
    let chi = CMatrix::from_fn(16, 16, |m, n| coeffs[m] * coeffs[n].conj());
    ProcessMatrix { basis, chi }
}

/// Single-qubit probes |0⟩, |1⟩, |+⟩, |+i⟩.
fn probe_states() -> [CMatrix; 4] {
    let h = 0.5;
    [
        CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(0.0)]),
        CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(0.0), cr(1.0)]),
        CMatrix::from_row_slice(2, 2, &[cr(h), cr(h), cr(h), cr(h)]),
        CMatrix::from_row_slice(2, 2, &[cr(h), c(0.0, -h), c(0.0, h), cr(h)]),
    ]
}

/// Coefficients expressing |a⟩⟨b| in the probes, indexed [a][b][probe].
fn unit_in_probes() -> [[[C64; 4]; 2]; 2] {
    let z = cr(0.0);
    let one = cr(1.0);
    let i = c(0.0, 1.0);
    [
        [[one, z, z, z], [-(one + i) * 0.5, -(one + i) * 0.5, one, i]],
        [[-(one - i) * 0.5, -(one - i) * 0.5, one, -i], [z, one, z, z]],
    ]
}

/// Linear-inversion tomography of a (possibly trace-decreasing) channel on
/// `qubits` qubits from the 4^n product probes.
pub fn process_tomography<F>(qubits: usize, channel: F, exec: Exec) -> Result<ProcessMatrix, TomographyError>
where
    F: Fn(&CMatrix) -> CMatrix + Sync + Send,
{
    let basis = PauliBasis::new(qubits)?;
    let dim = basis.dim();
    let probes = probe_states();
    let n_probes = 4usize.pow(qubits as u32);
    let digit = |j: usize, k: usize| (j >> (2 * (qubits - 1 - k))) & 3;
    let outputs: Vec<CMatrix> = exec.map_range(n_probes, |j| {
        let rho = kron_all(&(0..qubits).map(|k| probes[digit(j, k)].clone()).collect::<Vec<_>>());
        channel(&rho)
    });
    for o in &outputs {
        if o.shape() != (dim, dim) {
            return Err(TomographyError::Dimension(o.nrows(), dim));
        }
    }
    let units = unit_in_probes();
    let bit = |x: usize, k: usize| (x >> (qubits - 1 - k)) & 1;
    // Choi matrix Σ_ab |a⟩⟨b| ⊗ E(|a⟩⟨b|)
    let mut choi = CMatrix::zeros(dim * dim, dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            let mut e = CMatrix::zeros(dim, dim);
            for (j, out) in outputs.iter().enumerate() {
                let w: C64 = (0..qubits).map(|k| units[bit(a, k)][bit(b, k)][digit(j, k)]).product();
                if w != cr(0.0) {
                    e += out * w;
                }
            }
            choi.view_mut((a * dim, b * dim), (dim, dim)).copy_from(&e);
        }
    }
    let vecs: Vec<nalgebra::DVector<C64>> = basis
        .operators
        .iter()
        .map(|op| {
            let mut v = nalgebra::DVector::zeros(dim * dim);
            for a in 0..dim {
                for r in 0..dim {
                    v[a * dim + r] = op[(r, a)];
                }
            }
            v
        })
        .collect();
    let d = vecs.len();
    let scale = cr((dim * dim) as f64);
    let mut chi = CMatrix::from_fn(d, d, |m, n| vecs[m].dotc(&(&choi * &vecs[n])) / scale);
    chi = (&chi + chi.adjoint()) * cr(0.5);
    let pm = ProcessMatrix { basis, chi };
    let low = pm.min_eigenvalue();
    if low < -PSD_TOL * pm.trace().abs().max(1.0) {
        return Err(TomographyError::Unphysical(low));
    }
    Ok(pm)
}

/// Tr(χa χb) / (Tr χa · Tr χb).
pub fn process_fidelity(a: &ProcessMatrix, b: &ProcessMatrix) -> Result<f64, TomographyError> {
    if a.d() != b.d() {
        return Err(TomographyError::Dimension(a.d(), b.d()));
    }
    let den = a.trace() * b.trace();
    if den == 0.0 {
        return Err(TomographyError::ZeroTrace);
    }
    Ok((&a.chi * &b.chi).trace().re / den)
}

/// Heralded channel of a simulated gate, summed over its accepted signatures
/// after correction; trace-decreasing with the success probability.
pub fn heralded_channel(report: &GateReport) -> Result<impl Fn(&CMatrix) -> CMatrix + Sync + Send + '_, TomographyError> {
    for s in &report.signatures {
        let (rows, cols) = s.action.shape();
        if rows != cols || !rows.is_power_of_two() {
            return Err(TomographyError::GateShape { rows, cols });
        }
    }
    Ok(move |rho: &CMatrix| {
        let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
        for s in &report.signatures {
            out += &s.action * rho * s.action.adjoint();
        }
        out
    })
}

/// Process tomography of a simulated gate, normalized to a trace-preserving χ.
pub fn gate_tomography(report: &GateReport, exec: Exec) -> Result<ProcessMatrix, TomographyError> {
    let qubits = report
        .signatures
        .first()
        .map_or(0, |s| s.action.nrows().trailing_zeros() as usize);
    let channel = heralded_channel(report)?;
    process_tomography(qubits, channel, exec)?.normalized()
}

/// (1−ε)·ρ ↦ UρU† + ε·Tr(ρ) I/d.
pub fn depolarized_unitary(u: &CMatrix, eps: f64) -> impl Fn(&CMatrix) -> CMatrix + Sync + Send + '_ {
    move |rho: &CMatrix| {
        let d = rho.nrows();
        u * rho * u.adjoint() * cr(1.0 - eps) + CMatrix::identity(d, d) * (rho.trace() * eps / d as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cnot, cz};

    #[test]
    fn identity_channel() {
        let p = process_tomography(2, |r: &CMatrix| r.clone(), Exec::Sequential).unwrap();
        assert!((p.chi[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((p.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_pipeline() {
        let u = cnot();
        let p = process_tomography(2, |r: &CMatrix| &u * r * u.adjoint(), Exec::Sequential).unwrap();
        assert!((&p.chi - &cnot_ideal_chi().chi).camax() < 1e-10);
        assert!(p.trace_preservation_error() < 1e-10);
        let f = process_fidelity(&cnot_ideal_chi(), &unitary_chi(&cz()).unwrap()).unwrap();
        assert!((f - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fidelity_basics() {
        let zero = probe_states()[0].clone();
        let mixed = CMatrix::identity(2, 2) * cr(0.5);
        assert!((state_fidelity(&zero, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }
}
