//! Near-deterministic teleportation with the |t_n⟩ resource, and the
//! teleported controlled-sign built on |cz_n⟩.

use std::f64::consts::PI;

use nalgebra::DVector;
use thiserror::Error;

use crate::exec::{kahan_sum, Exec};
use crate::fock::{FockError, OccupationVector, PureState};
use crate::linalg::{c, cis, cr, cz, operator_overlap, CMatrix};
use crate::measure::split_by_counts;
use crate::optics::{apply_local_with, ModeUnitary, OpticsError};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TeleportError {
    #[error("resource size n must be at least 1")]
    ZeroSize,
    #[error("input amplitudes have norm {0}, expected 1")]
    NotNormalized(f64),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

#[derive(Clone, Debug)]
pub struct TeleportResource {
    pub n: usize,
    pub state: PureState,
}

/// Occupations |1⟩^j |0⟩^{n−j} |0⟩^j |1⟩^{n−j}.
fn tn_branch(n: usize, j: usize) -> Vec<u8> {
    let mut v = vec![0u8; 2 * n];
    for x in v.iter_mut().take(j) {
        *x = 1;
    }
    for x in v.iter_mut().skip(n + j) {
        *x = 1;
    }
    v
}

fn check_n(n: usize) -> Result<(), TeleportError> {
    if n == 0 {
        Err(TeleportError::ZeroSize)
    } else {
        Ok(())
    }
}

/// Uniform superposition of the n+1 branches over 2n modes.
pub fn build_tn(n: usize, cutoff: usize) -> Result<TeleportResource, TeleportError> {
    check_n(n)?;
    let a = cr(1.0 / ((n + 1) as f64).sqrt());
    let terms = (0..=n).map(|j| (OccupationVector::new(tn_branch(n, j)), a));
    Ok(TeleportResource {
        n,
        state: PureState::from_terms(2 * n, cutoff, terms)?,
    })
}

/// Two interleaved |t_n⟩ blocks with the sign (−1)^{(n−i)(n−j)}, over 4n modes.
pub fn build_czn(n: usize, cutoff: usize) -> Result<TeleportResource, TeleportError> {
    check_n(n)?;
    let a = 1.0 / (n + 1) as f64;
    let mut terms = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..=n {
        for j in 0..=n {
            let sign = if ((n - i) * (n - j)) % 2 == 0 { 1.0 } else { -1.0 };
            let mut occ = tn_branch(n, i);
            occ.extend(tn_branch(n, j));
            terms.push((OccupationVector::new(occ), cr(sign * a)));
        }
    }
    Ok(TeleportResource {
        n,
        state: PureState::from_terms(4 * n, cutoff, terms)?,
    })
}

/// Discrete Fourier transform on `n` modes.
pub fn qft(n: usize) -> ModeUnitary {
    let s = 1.0 / (n as f64).sqrt();
    let m = CMatrix::from_fn(n, n, |j, k| cis(2.0 * PI * (j * k % n.max(1)) as f64 / n as f64) * s);
    ModeUnitary::new(m).expect("Fourier matrix is unitary")
}

/// Phase on the output mode's one-photon amplitude after detecting `pattern`
/// on the n+1 Fourier outputs: 2π Σ_r r·n_r / (n+1).
pub fn correction_phase(pattern: &[u8]) -> f64 {
    let d = pattern.len();
    let s: usize = pattern.iter().enumerate().map(|(r, &k)| r * k as usize).sum();
    2.0 * PI * (s % d) as f64 / d as f64
}

/// Success as an exact fraction, by counting resource branches that leave
/// 0 < m < n+1 for each logical input.
/// Returns (numerator, denominator) per logical input value.
pub fn success_fraction(n: usize) -> [(u64, u64); 2] {
    let den = (n + 1) as u64;
    [0usize, 1].map(|k| {
        let good = (0..=n).filter(|&j| j + k > 0 && j + k < n + 1).count() as u64;
        (good, den)
    })
}

#[derive(Clone, Debug)]
pub struct TeleportOutcome {
    pub pattern: Vec<u8>,
    pub m: usize,
    pub success: bool,
    /// Output mode on success, counted in the full 2n+1 register.
    pub output_mode: Option<usize>,
    pub correction: f64,
    pub probability: f64,
    /// Corrected qubit amplitudes on success; the collapsed basis state on failure.
    pub qubit: [C64; 2],
    pub fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct TeleportReport {
    pub n: usize,
    pub outcomes: Vec<TeleportOutcome>,
}

impl TeleportReport {
    pub fn success_probability(&self) -> f64 {
        kahan_sum(self.outcomes.iter().filter(|o| o.success).map(|o| o.probability))
    }

    pub fn total_probability(&self) -> f64 {
        kahan_sum(self.outcomes.iter().map(|o| o.probability))
    }

    pub fn min_success_fidelity(&self) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.success)
            .map(|o| o.fidelity)
            .fold(1.0, f64::min)
    }
}

fn check_qubit(q: &[C64; 2]) -> Result<(), TeleportError> {
    let norm = q[0].norm_sqr() + q[1].norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        Err(TeleportError::NotNormalized(norm))
    } else {
        Ok(())
    }
}

/// Remaining-mode occupations for a successful branch: the output mode holds
/// `k`, earlier outputs are empty, later ones hold one photon.
fn tail_occupation(n: usize, m: usize, k: u8) -> OccupationVector {
    let mut v = vec![0u8; n];
    v[m - 1] = k;
    for x in v.iter_mut().skip(m) {
        *x = 1;
    }
    OccupationVector::new(v)
}

fn fidelity(a: &[C64; 2], b: &[C64; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

/// Teleports α|0⟩+β|1⟩ on mode 0 through |t_n⟩ on modes 1..=2n.
pub fn teleport(input: [C64; 2], n: usize) -> Result<TeleportReport, TeleportError> {
    teleport_with(input, n, Exec::default())
}

pub fn teleport_with(input: [C64; 2], n: usize, exec: Exec) -> Result<TeleportReport, TeleportError> {
    check_qubit(&input)?;
    let cutoff = n + 1;
    let res = build_tn(n, cutoff)?;
    let qubit = PureState::from_terms(
        1,
        cutoff,
        [
            (OccupationVector::from([0]), input[0]),
            (OccupationVector::from([1]), input[1]),
        ],
    )?;
    let state = qubit.compose(&res.state)?;
    let fourier: Vec<usize> = (0..=n).collect();
    let out = apply_local_with(&state, &qft(n + 1), &fourier, exec)?;
    let groups: Vec<(Vec<u8>, (f64, PureState))> = split_by_counts(&out, &fourier).into_iter().collect();
    let outcomes = exec.map(&groups, |(pattern, (p, cond))| {
        let m: usize = pattern.iter().map(|&x| x as usize).sum();
        if m == 0 || m == n + 1 {
            let q = if m == 0 { [cr(1.0), cr(0.0)] } else { [cr(0.0), cr(1.0)] };
            return TeleportOutcome {
                pattern: pattern.clone(),
                m,
                success: false,
                output_mode: None,
                correction: 0.0,
                probability: *p,
                qubit: q,
                fidelity: fidelity(&input, &q),
            };
        }
        let phi = correction_phase(pattern);
        let a0 = cond.amplitude(&tail_occupation(n, m, 0));
        let a1 = cond.amplitude(&tail_occupation(n, m, 1)) * cis(phi);
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        let q = [a0 / norm, a1 / norm];
        TeleportOutcome {
            pattern: pattern.clone(),
            m,
            success: true,
            output_mode: Some(n + m),
            correction: phi,
            probability: *p,
            qubit: q,
            fidelity: fidelity(&input, &q),
        }
    });
    Ok(TeleportReport { n, outcomes })
}

#[derive(Clone, Debug)]
pub struct CzOutcome {
    pub patterns: (Vec<u8>, Vec<u8>),
    pub probability: f64,
    /// Corrected 4×4 action on the logical basis, normalized.
    pub action: CMatrix,
    pub fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct TeleportedCzReport {
    pub n: usize,
    pub success_probability: f64,
    pub failure_probability: f64,
    pub outcomes: Vec<CzOutcome>,
}

impl TeleportedCzReport {
    pub fn min_fidelity(&self) -> f64 {
        self.outcomes.iter().map(|o| o.fidelity).fold(1.0, f64::min)
    }
}

/// Teleports two single-rail qubits (modes 0 and 1) through |cz_n⟩ on modes
/// 2..4n+2 and reports the corrected action of every successful outcome.
pub fn teleported_cz(n: usize) -> Result<TeleportedCzReport, TeleportError> {
    teleported_cz_with(n, Exec::default())
}

pub fn teleported_cz_with(n: usize, exec: Exec) -> Result<TeleportedCzReport, TeleportError> {
    let cutoff = 2 * n + 2;
    let res = build_czn(n, cutoff)?;
    let total = 4 * n + 2;
    let block_a: Vec<usize> = std::iter::once(0).chain(2..2 + n).collect();
    let block_b: Vec<usize> = std::iter::once(1).chain(2 + 2 * n..2 + 3 * n).collect();
    let detected: Vec<usize> = block_a.iter().chain(&block_b).copied().collect();
    let f = qft(n + 1);

    // Unnormalized heralded amplitudes, keyed by (pattern A, pattern B), per basis input.
    let mut columns: Vec<std::collections::BTreeMap<Vec<u8>, PureState>> = Vec::new();
    let mut failure = Vec::new();
    for b in 0..4u8 {
        let inputs = PureState::basis_state(OccupationVector::from([b >> 1, b & 1]), cutoff)?;
        let state = inputs.compose(&res.state)?;
        let state = apply_local_with(&state, &f, &block_a, exec)?;
        let state = apply_local_with(&state, &f, &block_b, exec)?;
        let mut col = std::collections::BTreeMap::new();
        let mut fail = 0.0;
        for (pattern, (p, cond)) in split_by_counts(&state, &detected) {
            let m1: usize = pattern[..n + 1].iter().map(|&x| x as usize).sum();
            let m2: usize = pattern[n + 1..].iter().map(|&x| x as usize).sum();
            if m1 == 0 || m1 == n + 1 || m2 == 0 || m2 == n + 1 {
                fail += p;
                continue;
            }
            col.insert(pattern, cond.scaled(cr(p.sqrt())));
        }
        failure.push(fail);
        columns.push(col);
    }
    debug_assert_eq!(total - detected.len(), 2 * n);

    let mut keys: Vec<Vec<u8>> = columns.iter().flat_map(|c| c.keys().cloned()).collect();
    keys.sort();
    keys.dedup();
    let outcomes: Vec<CzOutcome> = exec.map(&keys, |pattern| {
        let (pa, pb) = pattern.split_at(n + 1);
        let m1: usize = pa.iter().map(|&x| x as usize).sum();
        let m2: usize = pb.iter().map(|&x| x as usize).sum();
        // Fourier phases plus the Z fixes from the resource sign.
        let z1 = if (n - m2) % 2 == 1 { PI } else { 0.0 };
        let z2 = if (n - m1) % 2 == 1 { PI } else { 0.0 };
        let phi1 = correction_phase(pa) + z1;
        let phi2 = correction_phase(pb) + z2;
        let mut action = CMatrix::zeros(4, 4);
        for (b, col) in columns.iter().enumerate() {
            let Some(cond) = col.get(pattern) else { continue };
            for a in 0..4u8 {
                let (k1, k2) = (a >> 1, a & 1);
                let occ = tail_occupation(n, m1, k1).concat(&tail_occupation(n, m2, k2));
                let mut amp = cond.amplitude(&occ);
                if k1 == 1 {
                    amp *= cis(phi1);
                }
                if k2 == 1 {
                    amp *= cis(phi2);
                }
                action[(a as usize, b)] = amp;
            }
        }
        let probability = (action.adjoint() * &action).trace().re / 4.0;
        let fid = operator_overlap(&cz(), &action);
        let scale = (probability * 4.0).sqrt();
        CzOutcome {
            patterns: (pa.to_vec(), pb.to_vec()),
            probability,
            action: if scale > 0.0 { action / c(scale / 2.0, 0.0) } else { action },
            fidelity: fid,
        }
    });
    Ok(TeleportedCzReport {
        n,
        success_probability: kahan_sum(outcomes.iter().map(|o| o.probability)),
        failure_probability: failure.iter().sum::<f64>() / 4.0,
        outcomes,
    })
}

/// Output of `teleport` summarized as a logical Z-basis readout: the
/// probability of reading 1, whether from a success branch or a failure.
pub fn z_readout_after_teleport(report: &TeleportReport) -> f64 {
    kahan_sum(report.outcomes.iter().map(|o| o.probability * o.qubit[1].norm_sqr()))
}

/// Applies the ideal CZ to a two-qubit vector.
pub fn apply_cz(v: &DVector<C64>) -> DVector<C64> {
    cz() * v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t1_is_bell_like() {
        let t = build_tn(1, 2).unwrap();
        let h = 0.5f64.sqrt();
        assert!((t.state.amp(&[0, 1]).re - h).abs() < 1e-15);
        assert!((t.state.amp(&[1, 0]).re - h).abs() < 1e-15);
    }

    #[test]
    fn qft2_is_hadamard_like() {
        let f = qft(2);
        let h = 0.5f64.sqrt();
        assert!((f.matrix()[(1, 1)] - cr(-h)).norm() < 1e-15);
    }

    #[test]
    fn success_n_over_n_plus_1() {
        let a = [cr(0.6), c(0.0, 0.8)];
        for n in 1..=3 {
            let r = teleport(a, n).unwrap();
            let want = n as f64 / (n + 1) as f64;
            assert!((r.success_probability() - want).abs() < 1e-12);
            assert!(r.min_success_fidelity() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn cz3() {
        let r = teleported_cz(3).unwrap();
        assert!((r.success_probability - 9.0 / 16.0).abs() < 1e-12);
        assert!(r.min_fidelity() > 1.0 - 1e-10);
    }

    #[test]
    fn cz1() {
        let r = teleported_cz(1).unwrap();
        assert!((r.success_probability - 0.25).abs() < 1e-12);
        assert!(r.min_fidelity() > 1.0 - 1e-10);
    }
}
