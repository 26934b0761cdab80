//! Linear optical elements acting on creation operators.
//!
//! Convention: column `j` of a [`ModeUnitary`] is the image of `a_j†`,
//! i.e. `a_j† ↦ Σ_k U[k][j] a_k†`. With this choice applying `V` and then `U`
//! equals applying the product `U·V`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_PI_4;

use thiserror::Error;

use crate::exec::Exec;
use crate::fock::{self, FockError, OccupationVector, PureState};
use crate::linalg::{cis, cr, unitarity_error, CMatrix};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("mode {0} used twice")]
    ModeCollision(usize),
    #[error("mode {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("non-finite parameter")]
    NonFinite,
    #[error("element has no linear mode transformation")]
    Nonlinear,
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbsBasis {
    HV,
    Diagonal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    matrix: CMatrix,
}

impl ModeUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self, OpticsError> {
        if !matrix.is_square() {
            return Err(OpticsError::Dimension {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(OpticsError::NonFinite);
        }
        let err = unitarity_error(&matrix);
        if err > 1e-10 {
            return Err(OpticsError::NotUnitary(err));
        }
        Ok(ModeUnitary { matrix })
    }

    #[cfg(test)]
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        ModeUnitary { matrix }
    }

    pub fn identity(n: usize) -> Self {
        ModeUnitary {
            matrix: CMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        ModeUnitary {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &ModeUnitary) -> Self {
        ModeUnitary {
            matrix: &self.matrix * &first.matrix,
        }
    }

    /// [[cosθ, i e^{−iφ} sinθ], [i e^{iφ} sinθ, cosθ]]. Also serves as a
    /// polarization rotation when applied to an (H, V) mode pair.
    pub fn beam_splitter(theta: f64, phi: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let i = C64::i();
        ModeUnitary {
            matrix: CMatrix::from_row_slice(
                2,
                2,
                &[cr(c), i * cis(-phi) * s, i * cis(phi) * s, cr(c)],
            ),
        }
    }

    pub fn polarization_rotation(theta: f64, phi: f64) -> Self {
        Self::beam_splitter(theta, phi)
    }

    pub fn phase_shifter(phi: f64) -> Self {
        ModeUnitary {
            matrix: CMatrix::from_element(1, 1, cis(phi)),
        }
    }

    /// Polarizing beam splitter on modes (aH, aV, bH, bV).
    pub fn polarizing_bs(basis: PbsBasis) -> Self {
        let mut p = CMatrix::zeros(4, 4);
        p[(0, 0)] = cr(1.0);
        p[(3, 1)] = cr(1.0);
        p[(2, 2)] = cr(1.0);
        p[(1, 3)] = cr(1.0);
        match basis {
            PbsBasis::HV => ModeUnitary { matrix: p },
            PbsBasis::Diagonal => {
                let r = Self::beam_splitter(FRAC_PI_4, std::f64::consts::FRAC_PI_2);
                let r2 = r.embed(&[0, 1], 4).unwrap().after(&r.embed(&[2, 3], 4).unwrap());
                ModeUnitary {
                    matrix: r2.matrix.adjoint() * p * &r2.matrix,
                }
            }
        }
    }

    /// Places `self` on `targets` inside an `total`-mode identity.
    pub fn embed(&self, targets: &[usize], total: usize) -> Result<Self, OpticsError> {
        check_targets(targets, total)?;
        if targets.len() != self.dim() {
            return Err(OpticsError::Dimension {
                expected: self.dim(),
                got: targets.len(),
            });
        }
        let mut m = CMatrix::identity(total, total);
        for (a, &ta) in targets.iter().enumerate() {
            for (b, &tb) in targets.iter().enumerate() {
                m[(ta, tb)] = self.matrix[(a, b)];
            }
        }
        Ok(ModeUnitary { matrix: m })
    }
}

fn check_targets(targets: &[usize], total: usize) -> Result<(), OpticsError> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= total {
            return Err(OpticsError::ModeOutOfRange { mode: t, modes: total });
        }
        if targets[..i].contains(&t) {
            return Err(OpticsError::ModeCollision(t));
        }
    }
    Ok(())
}

/// One optical element with the modes it acts on.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    BeamSplitter { modes: [usize; 2], theta: f64, phi: f64 },
    PhaseShifter { mode: usize, phi: f64 },
    /// Modes are (aH, aV, bH, bV).
    PolarizingBs { modes: [usize; 4], basis: PbsBasis },
    /// |n_s, n_p⟩ ↦ e^{iτ n_s n_p} |n_s, n_p⟩
    CrossKerr { modes: [usize; 2], tau: f64 },
    Unitary { modes: Vec<usize>, u: ModeUnitary },
}

impl Element {
    pub fn bs(a: usize, b: usize, theta: f64, phi: f64) -> Self {
        Element::BeamSplitter { modes: [a, b], theta, phi }
    }

    /// Real rotation [[c, s], [−s, c]] (the φ = π/2 beam splitter).
    pub fn rot(a: usize, b: usize, theta: f64) -> Self {
        Element::BeamSplitter {
            modes: [a, b],
            theta,
            phi: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn phase(mode: usize, phi: f64) -> Self {
        Element::PhaseShifter { mode, phi }
    }

    pub fn modes(&self) -> Vec<usize> {
        match self {
            Element::BeamSplitter { modes, .. } => modes.to_vec(),
            Element::PhaseShifter { mode, .. } => vec![*mode],
            Element::PolarizingBs { modes, .. } => modes.to_vec(),
            Element::CrossKerr { modes, .. } => modes.to_vec(),
            Element::Unitary { modes, .. } => modes.clone(),
        }
    }

    /// Same element with mode i moved to `map[i]`.
    pub fn remapped(&self, map: &[usize]) -> Element {
        let m = |i: &usize| map[*i];
        match self {
            Element::BeamSplitter { modes, theta, phi } => Element::BeamSplitter {
                modes: modes.map(|i| m(&i)),
                theta: *theta,
                phi: *phi,
            },
            Element::PhaseShifter { mode, phi } => Element::PhaseShifter { mode: m(mode), phi: *phi },
            Element::PolarizingBs { modes, basis } => Element::PolarizingBs {
                modes: modes.map(|i| m(&i)),
                basis: *basis,
            },
            Element::CrossKerr { modes, tau } => Element::CrossKerr {
                modes: modes.map(|i| m(&i)),
                tau: *tau,
            },
            Element::Unitary { modes, u } => Element::Unitary {
                modes: modes.iter().map(m).collect(),
                u: u.clone(),
            },
        }
    }

    /// Local mode transformation; `None` for the Kerr element.
    pub fn local_unitary(&self) -> Option<ModeUnitary> {
        match self {
            Element::BeamSplitter { theta, phi, .. } => Some(ModeUnitary::beam_splitter(*theta, *phi)),
            Element::PhaseShifter { phi, .. } => Some(ModeUnitary::phase_shifter(*phi)),
            Element::PolarizingBs { basis, .. } => Some(ModeUnitary::polarizing_bs(*basis)),
            Element::CrossKerr { .. } => None,
            Element::Unitary { u, .. } => Some(u.clone()),
        }
    }

    pub fn validate(&self, total: usize) -> Result<(), OpticsError> {
        let finite = match self {
            Element::BeamSplitter { theta, phi, .. } => theta.is_finite() && phi.is_finite(),
            Element::PhaseShifter { phi, .. } => phi.is_finite(),
            Element::CrossKerr { tau, .. } => tau.is_finite(),
            _ => true,
        };
        if !finite {
            return Err(OpticsError::NonFinite);
        }
        check_targets(&self.modes(), total)?;
        if let Element::Unitary { modes, u } = self {
            if modes.len() != u.dim() {
                return Err(OpticsError::Dimension {
                    expected: u.dim(),
                    got: modes.len(),
                });
            }
        }
        Ok(())
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState, OpticsError> {
        self.apply_with(state, Exec::default())
    }

    pub fn apply_with(&self, state: &PureState, exec: Exec) -> Result<PureState, OpticsError> {
        self.validate(state.modes())?;
        match self {
            Element::PhaseShifter { mode, phi } => {
                let m = *mode;
                Ok(state.map_diagonal(|k| cis(phi * k.get(m) as f64)))
            }
            Element::CrossKerr { modes: [s, p], tau } => Ok(state.map_diagonal(|k| {
                cis(tau * (k.get(*s) as f64) * (k.get(*p) as f64))
            })),
            _ => {
                let u = self.local_unitary().expect("linear element");
                apply_local_with(state, &u, &self.modes(), exec)
            }
        }
    }
}

pub fn apply_circuit(state: &PureState, elements: &[Element]) -> Result<PureState, OpticsError> {
    let mut s = state.clone();
    for e in elements {
        s = e.apply(&s)?;
    }
    Ok(s)
}

/// Total mode transformation of a purely linear circuit.
pub fn circuit_unitary(elements: &[Element], modes: usize) -> Result<ModeUnitary, OpticsError> {
    let mut u = ModeUnitary::identity(modes);
    for e in elements {
        e.validate(modes)?;
        let local = e.local_unitary().ok_or(OpticsError::Nonlinear)?;
        u = local.embed(&e.modes(), modes)?.after(&u);
    }
    Ok(u)
}

/// Multinomial expansion of ∏_j (Σ_k u[k][j] a_k†)^{n_j} / √(n_j!) acting on vacuum,
/// returned as output occupations with amplitudes.
fn expand(u: &CMatrix, input: &[u8]) -> Vec<(Vec<u8>, C64)> {
    let k = u.nrows();
    let norm: f64 = input.iter().map(|&n| fock::factorial(n as usize)).product();
    let mut poly: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
    poly.insert(vec![0; k], cr(1.0 / norm.sqrt()));
    for (j, &n) in input.iter().enumerate() {
        for _ in 0..n {
            let mut next: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
            for (mono, a) in &poly {
                for row in 0..k {
                    let x = u[(row, j)];
                    if x.norm() == 0.0 {
                        continue;
                    }
                    let mut m = mono.clone();
                    m[row] += 1;
                    *next.entry(m).or_default() += a * x;
                }
            }
            poly = next;
        }
    }
    poly.into_iter()
        .map(|(m, a)| {
            let f: f64 = m.iter().map(|&n| fock::factorial(n as usize)).product();
            (m, a * f.sqrt())
        })
        .filter(|(_, a)| a.norm() >= fock::PRUNE)
        .collect()
}

/// Applies `u` to the listed modes of `state`.
pub fn apply_local(state: &PureState, u: &ModeUnitary, targets: &[usize]) -> Result<PureState, OpticsError> {
    apply_local_with(state, u, targets, Exec::default())
}

pub fn apply_local_with(
    state: &PureState,
    u: &ModeUnitary,
    targets: &[usize],
    exec: Exec,
) -> Result<PureState, OpticsError> {
    check_targets(targets, state.modes())?;
    if targets.len() != u.dim() {
        return Err(OpticsError::Dimension {
            expected: u.dim(),
            got: targets.len(),
        });
    }
    let mut subs: Vec<Vec<u8>> = state
        .iter()
        .map(|(k, _)| k.select(targets).counts().to_vec())
        .collect();
    subs.sort();
    subs.dedup();
    let expansions = exec.map(&subs, |s| expand(u.matrix(), s));
    let table: HashMap<&[u8], &Vec<(Vec<u8>, C64)>> =
        subs.iter().map(|s| s.as_slice()).zip(expansions.iter()).collect();

    let terms: Vec<(&OccupationVector, &C64)> = state.iter().collect();
    let pieces = exec.map(&terms, |(k, a)| {
        let sub = k.select(targets);
        let images = table[sub.counts()];
        images
            .iter()
            .map(|(m, x)| {
                let mut occ = (*k).clone();
                for (i, &t) in targets.iter().enumerate() {
                    occ.set(t, m[i]);
                }
                (occ, *a * x)
            })
            .collect::<Vec<_>>()
    });
    let mut out = PureState::zero(state.modes(), state.cutoff());
    for piece in pieces {
        for (occ, a) in piece {
            out.add_term(occ, a);
        }
    }
    out.prune();
    Ok(out)
}

/// Applies a full-register mode unitary.
pub fn apply_unitary(state: &PureState, u: &ModeUnitary) -> Result<PureState, OpticsError> {
    apply_unitary_with(state, u, Exec::default())
}

pub fn apply_unitary_with(state: &PureState, u: &ModeUnitary, exec: Exec) -> Result<PureState, OpticsError> {
    if u.dim() != state.modes() {
        return Err(OpticsError::Dimension {
            expected: state.modes(),
            got: u.dim(),
        });
    }
    let targets: Vec<usize> = (0..u.dim()).collect();
    apply_local_with(state, u, &targets, exec)
}

/// Permanent by Glynn's formula with Gray-code ordering, O(2^n n).
pub fn permanent(m: &CMatrix) -> C64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "permanent needs a square matrix");
    if n == 0 {
        return cr(1.0);
    }
    let mut row_comb: Vec<C64> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).sum()).collect();
    let mut total = row_comb.iter().product::<C64>();
    let mut sign = 1.0;
    let mut delta = vec![1.0; n];
    let count = 1u64 << (n - 1);
    for g in 1..count {
        // Gray code: flip bit at the position of the lowest set bit of g.
        let bit = g.trailing_zeros() as usize + 1;
        delta[bit] = -delta[bit];
        for (j, rc) in row_comb.iter_mut().enumerate() {
            *rc += m[(bit, j)] * (2.0 * delta[bit]);
        }
        sign = -sign;
        total += row_comb.iter().product::<C64>() * sign;
    }
    total / count as f64
}

/// ⟨output| U |input⟩ through the permanent of the repeated-index submatrix.
pub fn permanent_amplitude(u: &ModeUnitary, input: &OccupationVector, output: &OccupationVector) -> C64 {
    if input.total() != output.total() {
        return cr(0.0);
    }
    let rows: Vec<usize> = repeat_indices(output);
    let cols: Vec<usize> = repeat_indices(input);
    let n = rows.len();
    let sub = CMatrix::from_fn(n, n, |r, c| u.matrix()[(rows[r], cols[c])]);
    permanent(&sub) / (input.factorial_product() * output.factorial_product()).sqrt()
}

fn repeat_indices(occ: &OccupationVector) -> Vec<usize> {
    occ.counts()
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize))
        .collect()
}

/// Evolution through permanents over every output occupation; an independent
/// cross-check of [`apply_unitary`].
pub fn apply_unitary_permanent(state: &PureState, u: &ModeUnitary) -> Result<PureState, OpticsError> {
    apply_unitary_permanent_with(state, u, Exec::default())
}

pub fn apply_unitary_permanent_with(
    state: &PureState,
    u: &ModeUnitary,
    exec: Exec,
) -> Result<PureState, OpticsError> {
    if u.dim() != state.modes() {
        return Err(OpticsError::Dimension {
            expected: state.modes(),
            got: u.dim(),
        });
    }
    let mut totals: Vec<usize> = state.iter().map(|(k, _)| k.total()).collect();
    totals.sort();
    totals.dedup();
    let outputs: Vec<OccupationVector> = totals
        .iter()
        .flat_map(|&n| fock::sector(state.modes(), n))
        .collect();
    let amps = exec.map(&outputs, |out| {
        state
            .iter()
            .map(|(k, a)| a * permanent_amplitude(u, k, out))
            .sum::<C64>()
    });
    Ok(PureState::from_terms(
        state.modes(),
        state.cutoff(),
        outputs.into_iter().zip(amps),
    )?)
}

/// Beam splitter between modes `modes.0` and `modes.1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReckElement {
    pub modes: (usize, usize),
    pub theta: f64,
    pub phi: f64,
}

#[derive(Clone, Debug)]
pub struct ReckDecomposition {
    pub n: usize,
    /// Beam splitters in the order light meets them.
    pub elements: Vec<ReckElement>,
    /// Phase on each output mode after the last beam splitter.
    pub residual_phases: Vec<f64>,
}

impl ReckDecomposition {
    pub fn to_elements(&self) -> Vec<Element> {
        let mut out: Vec<Element> = self
            .elements
            .iter()
            .map(|e| Element::bs(e.modes.0, e.modes.1, e.theta, e.phi))
            .collect();
        out.extend(
            self.residual_phases
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != 0.0)
                .map(|(m, &p)| Element::phase(m, p)),
        );
        out
    }

    pub fn recompose(&self) -> ModeUnitary {
        circuit_unitary(&self.to_elements(), self.n).expect("decomposition modes are in range")
    }
}

/// Triangular decomposition into at most N(N−1)/2 beam splitters.
///
/// The last row is nulled left to right by right-multiplying beam splitters on
/// (j, N); the procedure then recurses on the leading block. Whatever phases
/// remain on the diagonal are stored separately.
pub fn reck_decompose(u: &ModeUnitary) -> Result<ReckDecomposition, OpticsError> {
    let err = unitarity_error(u.matrix());
    if err > 1e-8 {
        return Err(OpticsError::NotUnitary(err));
    }
    let n = u.dim();
    let mut w = u.matrix().clone();
    let mut nulling = Vec::new();
    for last in (1..n).rev() {
        for j in 0..last {
            let a = w[(last, j)];
            let b = w[(last, last)];
            let (theta, phi) = if a.norm() < 1e-15 {
                (0.0, 0.0)
            } else if b.norm() < 1e-15 {
                (std::f64::consts::FRAC_PI_2, 0.0)
            } else {
                ((a.norm() / b.norm()).atan(), (C64::i() * a / b).arg())
            };
            let t = ModeUnitary::beam_splitter(theta, phi);
            for r in 0..n {
                let x = w[(r, j)];
                let y = w[(r, last)];
                w[(r, j)] = t.matrix[(0, 0)] * x + t.matrix[(1, 0)] * y;
                w[(r, last)] = t.matrix[(0, 1)] * x + t.matrix[(1, 1)] * y;
            }
            nulling.push(ReckElement {
                modes: (j, last),
                theta,
                phi,
            });
        }
    }
    let residual_phases = (0..n).map(|k| w[(k, k)].arg()).collect();
    // BS(θ, φ)† = BS(−θ, φ); the first nulling element is undone first.
    let elements = nulling
        .into_iter()
        .map(|e| ReckElement {
            theta: -e.theta,
            ..e
        })
        .collect();
    Ok(ReckDecomposition {
        n,
        elements,
        residual_phases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, haar_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn balanced_splitter_on_single_photon() {
        let s = PureState::basis_state([1, 0], 4).unwrap();
        let out = Element::bs(0, 1, FRAC_PI_4, 0.0).apply(&s).unwrap();
        let h = 0.5f64.sqrt();
        assert!(close(out.amp(&[1, 0]), cr(h)));
        assert!(close(out.amp(&[0, 1]), c(0.0, h)));
    }

    #[test]
    fn bunching_real_convention() {
        let s = PureState::basis_state([1, 1], 4).unwrap();
        let out = Element::rot(0, 1, FRAC_PI_4).apply(&s).unwrap();
        let h = 0.5f64.sqrt();
        assert!(close(out.amp(&[2, 0]), cr(h)));
        assert!(close(out.amp(&[0, 2]), cr(-h)));
        assert!(out.amp(&[1, 1]).norm() < 1e-15);
    }

    #[test]
    fn bunching_symmetric_convention_has_no_coincidence() {
        let s = PureState::basis_state([1, 1], 4).unwrap();
        let out = Element::bs(0, 1, FRAC_PI_4, 0.0).apply(&s).unwrap();
        assert!(out.amp(&[1, 1]).norm() < 1e-15);
        assert!((out.amp(&[2, 0]).norm_sqr() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn phase_shifter_on_fock() {
        let s = PureState::basis_state([2], 4).unwrap();
        let out = Element::phase(0, PI).apply(&s).unwrap();
        assert!(close(out.amp(&[2]), cr(1.0)));
        let s = PureState::basis_state([1], 4).unwrap();
        let out = Element::phase(0, FRAC_PI_2).apply(&s).unwrap();
        assert!(close(out.amp(&[1]), c(0.0, 1.0)));
    }

    #[test]
    fn pbs_routes_polarizations() {
        let pbs = Element::PolarizingBs { modes: [0, 1, 2, 3], basis: PbsBasis::HV };
        let h = PureState::basis_state([1, 0, 0, 0], 4).unwrap();
        assert!(close(pbs.apply(&h).unwrap().amp(&[1, 0, 0, 0]), cr(1.0)));
        let v = PureState::basis_state([0, 1, 0, 0], 4).unwrap();
        assert!(close(pbs.apply(&v).unwrap().amp(&[0, 0, 0, 1]), cr(1.0)));
        for basis in [PbsBasis::HV, PbsBasis::Diagonal] {
            let p = ModeUnitary::polarizing_bs(basis);
            assert!((p.after(&p).matrix() - CMatrix::identity(4, 4)).camax() < 1e-12);
        }
    }

    #[test]
    fn diagonal_pbs_transmits_plus() {
        let h = 0.5f64.sqrt();
        let plus = PureState::from_terms(
            4,
            4,
            [
                (OccupationVector::from([1, 0, 0, 0]), cr(h)),
                (OccupationVector::from([0, 1, 0, 0]), cr(h)),
            ],
        )
        .unwrap();
        let out = Element::PolarizingBs { modes: [0, 1, 2, 3], basis: PbsBasis::Diagonal }
            .apply(&plus)
            .unwrap();
        assert!(out.distance_inf(&plus) < 1e-12);
    }

    #[test]
    fn cross_kerr_phases() {
        let s = PureState::basis_state([1, 1], 4).unwrap();
        let out = Element::CrossKerr { modes: [0, 1], tau: PI }.apply(&s).unwrap();
        assert!(close(out.amp(&[1, 1]), cr(-1.0)));
        let s = PureState::basis_state([0, 3], 4).unwrap();
        let out = Element::CrossKerr { modes: [0, 1], tau: 0.7 }.apply(&s).unwrap();
        assert!(close(out.amp(&[0, 3]), cr(1.0)));
    }

    #[test]
    fn embed_into_outer_modes() {
        let u = ModeUnitary::beam_splitter(FRAC_PI_4, 0.0).embed(&[0, 2], 3).unwrap();
        let h = 0.5f64.sqrt();
        let m = u.matrix();
        assert!(close(m[(0, 0)], cr(h)));
        assert!(close(m[(0, 2)], c(0.0, h)));
        assert!(close(m[(2, 0)], c(0.0, h)));
        assert!(close(m[(1, 1)], cr(1.0)));
        assert!(close(m[(0, 1)], cr(0.0)));
        assert!(ModeUnitary::identity(2).embed(&[1, 1], 3).is_err());
        assert!(ModeUnitary::identity(2).embed(&[0, 3], 3).is_err());
    }

    #[test]
    fn permanent_small_cases() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(2.0), cr(3.0), cr(4.0)]);
        assert!(close(permanent(&m), cr(10.0)));
        let ones = CMatrix::from_element(4, 4, cr(1.0));
        assert!(close(permanent(&ones), cr(24.0)));
    }

    #[test]
    fn reck_on_beam_splitter_and_haar() {
        let bs = ModeUnitary::beam_splitter(0.3, 1.1);
        let d = reck_decompose(&bs).unwrap();
        assert_eq!(d.elements.len(), 1);
        assert!((d.recompose().matrix() - bs.matrix()).camax() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = ModeUnitary::new(haar_unitary(3, &mut rng)).unwrap();
        let d = reck_decompose(&u).unwrap();
        assert!(d.elements.len() <= 3);
        assert!((d.recompose().matrix() - u.matrix()).camax() < 1e-10);
    }

    #[test]
    fn reck_rejects_non_unitary() {
        let m = CMatrix::from_element(2, 2, cr(1.0));
        assert!(reck_decompose(&ModeUnitary::from_matrix_unchecked(m)).is_err());
    }
}
