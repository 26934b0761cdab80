//! Small dense linear-algebra helpers over complex matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub type CMatrix = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// e^{iφ}
pub fn cis(phi: f64) -> C64 {
    C64::from_polar(1.0, phi)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_all(ms: &[CMatrix]) -> CMatrix {
    ms.iter()
        .fold(CMatrix::identity(1, 1), |acc, m| acc.kronecker(m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        let z = cr(0.0);
        let o = cr(1.0);
        match self {
            Pauli::I => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            Pauli::X => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            Pauli::Y => CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
            Pauli::Z => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }
}

pub fn hadamard() -> CMatrix {
    let h = 0.5f64.sqrt();
    CMatrix::from_row_slice(2, 2, &[cr(h), cr(h), cr(h), cr(-h)])
}

pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = cr(1.0);
    m[(1, 1)] = cr(1.0);
    m[(2, 3)] = cr(1.0);
    m[(3, 2)] = cr(1.0);
    m
}

pub fn cz() -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        cr(1.0),
        cr(1.0),
        cr(1.0),
        cr(-1.0),
    ]))
}

pub fn unitarity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    (m.adjoint() * m - CMatrix::identity(n, n)).camax()
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && unitarity_error(m) <= tol
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * 0.5f64.sqrt()
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * cr(0.5)
}

/// Square root of a positive semidefinite Hermitian matrix; small negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let eig = hermitian_part(m).symmetric_eigen();
    let d = eig
        .eigenvalues
        .map(|l| cr(l.max(0.0).sqrt()));
    &eig.eigenvectors * CMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

pub fn eigenvalues_hermitian(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().cloned().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// |Tr(G†A)|² / (Tr(G†G) Tr(A†A)): overlap of two operators up to global phase and scale.
pub fn operator_overlap(g: &CMatrix, a: &CMatrix) -> f64 {
    let num = (g.adjoint() * a).trace().norm_sqr();
    let den = (g.adjoint() * g).trace().re * (a.adjoint() * a).trace().re;
    if den <= 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Von Neumann entropy in bits.
pub fn entropy_bits(rho: &CMatrix) -> f64 {
    eigenvalues_hermitian(rho)
        .into_iter()
        .filter(|&l| l > 1e-15)
        .map(|l| -l * l.log2())
        .sum()
}
