//! Parity and redundant (GHZ-of-parity) encodings: construction, physical
//! measurements, fusion growth of blocks, lossy readout, and the analytic
//! failure recursion for encoded teleporters.

use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use thiserror::Error;

use crate::exec::{kahan_sum, monte_carlo, Exec};
use crate::fock::{FockError, OccupationVector, PureState};
use crate::gates::Fix;
use crate::linalg::cr;
use crate::measure::split_by_counts;
use crate::optics::{apply_circuit, Element, OpticsError, PbsBasis};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodingError {
    #[error("logical amplitudes have norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("block size must be at least {min}, got {got}")]
    BlockSize { min: usize, got: usize },
    #[error("photon index {index} outside a block of {n}")]
    Index { index: usize, n: usize },
    #[error("efficiency {0} outside (0, 1]")]
    Efficiency(f64),
    #[error("failure probability {0} outside [0, 1]")]
    FailureProbability(f64),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

fn check_amplitudes(alpha: C64, beta: C64) -> Result<(), EncodingError> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(EncodingError::NotNormalized(norm));
    }
    Ok(())
}

/// Amplitude of the V-pattern `bits` (bit k set: photon k is V) in the
/// logical state `value` of an n-photon parity block.
fn parity_coefficient(bits: usize, n: usize, value: u8) -> f64 {
    if (bits.count_ones() % 2) as u8 == value {
        0.5f64.powf((n as f64 - 1.0) / 2.0)
    } else {
        0.0
    }
}

/// Polarization register of `qubits` photons, photon k on modes (2k, 2k+1),
/// from a coefficient function over V-patterns (photon 0 is the high bit).
pub fn polarization_state(qubits: usize, coeff: impl Fn(usize) -> C64) -> Result<PureState, FockError> {
    let terms = (0..1usize << qubits).filter_map(|x| {
        let a = coeff(x);
        if a.norm_sqr() == 0.0 {
            return None;
        }
        let mut occ = vec![0u8; 2 * qubits];
        for k in 0..qubits {
            let v = (x >> (qubits - 1 - k)) & 1;
            occ[2 * k + v] = 1;
        }
        Some((OccupationVector::new(occ), a))
    });
    PureState::from_terms(2 * qubits, qubits.max(1), terms)
}

/// α|0⟩^(n) + β|1⟩^(n) with |0⟩^(n) = (|+⟩^n + |−⟩^n)/√2 and
/// |1⟩^(n) = (|+⟩^n − |−⟩^n)/√2.
#[derive(Clone, Debug)]
pub struct ParityQubit {
    pub n: usize,
    pub alpha: C64,
    pub beta: C64,
    pub state: PureState,
}

pub fn parity_encode(alpha: C64, beta: C64, n: usize) -> Result<ParityQubit, EncodingError> {
    check_amplitudes(alpha, beta)?;
    if n == 0 {
        return Err(EncodingError::BlockSize { min: 1, got: 0 });
    }
    let state = polarization_state(n, |x| {
        alpha * parity_coefficient(x, n, 0) + beta * parity_coefficient(x, n, 1)
    })?;
    Ok(ParityQubit { n, alpha, beta, state })
}

impl ParityQubit {
    /// Probability that reading every photon in H/V gives even V-parity.
    pub fn even_parity_probability(&self) -> f64 {
        self.state
            .iter()
            .filter(|(k, _)| (0..self.n).map(|i| k.get(2 * i + 1) as usize).sum::<usize>() % 2 == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

fn apply_fix(fix: Fix, alpha: C64, beta: C64) -> (C64, C64) {
    match fix {
        Fix::I => (alpha, beta),
        Fix::X => (beta, alpha),
        Fix::Z => (alpha, -beta),
        Fix::XZ => (-beta, alpha),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhysicalBasis {
    Computational,
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhysicalOutcome {
    H,
    V,
    Plus,
    Minus,
}

#[derive(Clone, Debug)]
pub enum Reduced {
    /// Still a parity block; `flipped` marks a heralded logical bit flip.
    Parity { qubit: ParityQubit, flipped: bool },
    /// A diagonal measurement leaves the rest of the block in |±⟩^(n−1).
    Disentangled(PureState),
}

#[derive(Clone, Debug)]
pub struct PhysicalMeasurement {
    pub outcome: PhysicalOutcome,
    pub probability: f64,
    pub reduced: Reduced,
    /// Overlap of the simulated post-measurement state with the expected one.
    pub fidelity: f64,
}

/// Measures photon `index` (0-based) of a parity block and returns every
/// outcome with its conditional state.
pub fn measure_physical(
    q: &ParityQubit,
    index: usize,
    basis: PhysicalBasis,
) -> Result<Vec<PhysicalMeasurement>, EncodingError> {
    if index >= q.n {
        return Err(EncodingError::Index { index, n: q.n });
    }
    let pair = [2 * index, 2 * index + 1];
    let state = match basis {
        PhysicalBasis::Computational => q.state.clone(),
        // + is read at the H port, − at the V port.
        PhysicalBasis::Diagonal => apply_circuit(&q.state, &[Element::rot(pair[0], pair[1], FRAC_PI_4)])?,
    };
    let mut out = Vec::new();
    for (pattern, (p, cond)) in split_by_counts(&state, &pair) {
        let is_h = pattern == [1, 0];
        let m = q.n - 1;
        let (outcome, reduced, expected) = match basis {
            PhysicalBasis::Computational => {
                let flipped = !is_h;
                let (a, b) = if flipped { (q.beta, q.alpha) } else { (q.alpha, q.beta) };
                if m == 0 {
                    let vac = PureState::vacuum(0, 1);
                    (
                        if is_h { PhysicalOutcome::H } else { PhysicalOutcome::V },
                        Reduced::Disentangled(vac.clone()),
                        vac,
                    )
                } else {
                    let expected = parity_encode(a, b, m)?;
                    let st = expected.state.clone();
                    (
                        if is_h { PhysicalOutcome::H } else { PhysicalOutcome::V },
                        Reduced::Parity { qubit: expected, flipped },
                        st,
                    )
                }
            }
            PhysicalBasis::Diagonal => {
                let sign = if is_h { 1.0 } else { -1.0 };
                let h = 0.5f64.sqrt();
                let expected = polarization_state(m, |x| {
                    let s = if x.count_ones() % 2 == 1 { sign } else { 1.0 };
                    cr(s * h.powi(m as i32))
                })?;
                (
                    if is_h { PhysicalOutcome::Plus } else { PhysicalOutcome::Minus },
                    Reduced::Disentangled(expected.clone()),
                    expected,
                )
            }
        };
        let fidelity = if m == 0 { 1.0 } else { expected.overlap(&cond)? };
        out.push(PhysicalMeasurement {
            outcome,
            probability: p,
            reduced,
            fidelity,
        });
    }
    Ok(out)
}

/// One step of the failure recursion: F ↦ F²(2−F)/(1−F(1−F)).
pub fn fz_map(f: f64) -> f64 {
    f * f * (2.0 - f) / (1.0 - f * (1.0 - f))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FzLevel {
    pub level: usize,
    pub f_z: f64,
    pub p_z: f64,
    pub p_cz: f64,
}

/// Failure probability of an encoded Z_{π/2} at concatenation `level`
/// (0 = plain parity code) for teleporter failure probability `f`.
pub fn fz_success(f: f64, level: usize) -> Result<FzLevel, EncodingError> {
    if !(0.0..=1.0).contains(&f) {
        return Err(EncodingError::FailureProbability(f));
    }
    let mut fz = fz_map(f);
    for _ in 0..level {
        fz = fz_map(fz);
    }
    Ok(FzLevel {
        level,
        f_z: fz,
        p_z: 1.0 - fz,
        p_cz: (1.0 - fz) * (1.0 - fz),
    })
}

pub fn fz_table(f: f64, levels: usize) -> Result<Vec<FzLevel>, EncodingError> {
    (0..levels).map(|l| fz_success(f, l)).collect()
}

/// P_Z and P_CZ after one concatenation at f = 1/4, the setting quoted as
/// giving a CZ above 95%. Only P_Z clears that bar.
pub fn concatenated_cz_claim() -> (f64, f64) {
    let l = fz_success(0.25, 1).expect("valid f");
    (l.p_z, l.p_cz)
}

#[derive(Clone, Debug)]
pub struct FusionBranch {
    pub signature: Vec<u8>,
    pub success: bool,
    pub probability: f64,
    /// Block sizes of the surviving state.
    pub blocks: Vec<usize>,
    /// σ_z applied to each surviving photon of the second block.
    pub tail_z: bool,
    /// Logical Pauli relating the input to the (tail-corrected) output.
    pub fix: Fix,
    /// Logical value left in the second block on failure.
    pub zero_block_value: Option<u8>,
    pub fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct FusionResult {
    pub branches: Vec<FusionBranch>,
}

impl FusionResult {
    pub fn success_probability(&self) -> f64 {
        kahan_sum(self.branches.iter().filter(|b| b.success).map(|b| b.probability))
    }

    pub fn min_fidelity(&self) -> f64 {
        self.branches.iter().map(|b| b.fidelity).fold(1.0, f64::min)
    }
}

/// Fuses the last photon of `psi` with the first photon of a fresh |0⟩^(m)
/// block on an H/V polarizing beam splitter, reading both outputs in the
/// diagonal basis. One photon per output is success.
pub fn f2_fusion_action(psi: &ParityQubit, m: usize) -> Result<FusionResult, EncodingError> {
    let n = psi.n;
    if n < 2 {
        return Err(EncodingError::BlockSize { min: 2, got: n });
    }
    if m < 2 {
        return Err(EncodingError::BlockSize { min: 2, got: m });
    }
    let zero = parity_encode(cr(1.0), cr(0.0), m)?;
    let cutoff = n + m;
    let joint = psi
        .state
        .clone()
        .with_cutoff(cutoff)?
        .compose(&zero.state.clone().with_cutoff(cutoff)?)?;
    let a = 2 * n - 2;
    let b = 2 * n;
    let elements = [
        Element::PolarizingBs {
            modes: [a, a + 1, b, b + 1],
            basis: PbsBasis::HV,
        },
        Element::rot(a, a + 1, FRAC_PI_4),
        Element::rot(b, b + 1, FRAC_PI_4),
    ];
    let out = apply_circuit(&joint, &elements)?;
    let detected = [a, a + 1, b, b + 1];
    let mut branches = Vec::new();
    for (signature, (p, cond)) in split_by_counts(&out, &detected) {
        let success = signature[0] + signature[1] == 1;
        // Opposite diagonal outcomes leave a relative sign between the HH and
        // VV projections, removed by σ_z on every photon of the second block.
        let tail_z = success && signature[..2] != signature[2..];
        let cond = if tail_z {
            let tail = 2 * n - 2..2 * (n + m - 2);
            cond.map_diagonal(|k| {
                let v: usize = tail.clone().skip(1).step_by(2).map(|i| k.get(i) as usize).sum();
                cr(if v % 2 == 1 { -1.0 } else { 1.0 })
            })
        } else {
            cond
        };
        let mut best = (Fix::I, None, 0.0);
        for fix in [Fix::I, Fix::X, Fix::Z, Fix::XZ] {
            let (al, be) = apply_fix(fix, psi.alpha, psi.beta);
            if success {
                let target = parity_encode(al, be, n + m - 2)?;
                let f = target.state.with_cutoff(cutoff)?.overlap(&cond)?;
                if f > best.2 + 1e-12 {
                    best = (fix, None, f);
                }
            } else {
                for v in 0..2u8 {
                    let left = parity_encode(al, be, n - 1)?;
                    let right = if v == 0 {
                        parity_encode(cr(1.0), cr(0.0), m - 1)?
                    } else {
                        parity_encode(cr(0.0), cr(1.0), m - 1)?
                    };
                    let target = left.state.with_cutoff(cutoff)?.compose(&right.state)?;
                    let f = target.overlap(&cond)?;
                    if f > best.2 + 1e-12 {
                        best = (fix, Some(v), f);
                    }
                }
            }
        }
        branches.push(FusionBranch {
            signature,
            success,
            probability: p,
            blocks: if success { vec![n + m - 2] } else { vec![n - 1, m - 1] },
            tail_z,
            fix: best.0,
            zero_block_value: best.1,
            fidelity: best.2,
        });
    }
    Ok(FusionResult { branches })
}

/// Symbolic block arithmetic of the same fusion.
pub fn f2_block_rule(n: usize, m: usize, success: bool) -> Vec<usize> {
    if success {
        vec![n + m - 2]
    } else {
        vec![n - 1, m - 1]
    }
}

/// GHZ state of q parity blocks of n photons each.
#[derive(Clone, Debug)]
pub struct RedundantQubit {
    pub q: usize,
    pub n: usize,
    pub alpha: C64,
    pub beta: C64,
}

impl RedundantQubit {
    pub fn new(alpha: C64, beta: C64, n: usize, q: usize) -> Result<Self, EncodingError> {
        check_amplitudes(alpha, beta)?;
        if n == 0 || q == 0 {
            return Err(EncodingError::BlockSize { min: 1, got: n.min(q) });
        }
        Ok(RedundantQubit { q, n, alpha, beta })
    }

    /// Explicit optical state over 2nq modes.
    pub fn fock_state(&self) -> Result<PureState, EncodingError> {
        let (n, q) = (self.n, self.q);
        let mask = (1usize << n) - 1;
        let coeff = |x: usize| {
            let blocks: Vec<usize> = (0..q).map(|k| (x >> ((q - 1 - k) * n)) & mask).collect();
            let c0: f64 = blocks.iter().map(|&b| parity_coefficient(b, n, 0)).product();
            let c1: f64 = blocks.iter().map(|&b| parity_coefficient(b, n, 1)).product();
            self.alpha * c0 + self.beta * c1
        };
        Ok(polarization_state(n * q, coeff)?)
    }
}

#[derive(Clone, Debug)]
pub struct LossBranch {
    /// Outcome of the lost photon when its trace is unravelled in ±.
    pub lost: PhysicalOutcome,
    pub diagonal: PhysicalOutcome,
    pub probability: f64,
    /// Fidelity of the remaining q−1 blocks with α|0…⟩ ± β|1…⟩, the sign
    /// being that of the diagonal outcome.
    pub fidelity: f64,
}

/// Loses photon `lost` of the first block, reads the next photon of that
/// block diagonally and the rest of it in the same basis, and compares the
/// remaining blocks with the expected smaller GHZ encoding.
pub fn loss_recovery(r: &RedundantQubit, lost: usize) -> Result<Vec<LossBranch>, EncodingError> {
    if r.q < 2 {
        return Err(EncodingError::BlockSize { min: 2, got: r.q });
    }
    if lost + 1 >= r.n {
        return Err(EncodingError::Index { index: lost + 1, n: r.n });
    }
    let state = r.fock_state()?;
    // Photons before `lost` are read in H/V, every photon from `lost` on in ±.
    let rotations: Vec<Element> = (lost..r.n).map(|k| Element::rot(2 * k, 2 * k + 1, FRAC_PI_4)).collect();
    let rotated = apply_circuit(&state, &rotations)?;
    let block_modes: Vec<usize> = (0..2 * r.n).collect();
    let sign_of = |pair: &[u8]| if pair == [1, 0] { PhysicalOutcome::Plus } else { PhysicalOutcome::Minus };
    let mut out = Vec::new();
    for (pattern, (p, cond)) in split_by_counts(&rotated, &block_modes) {
        let lost_out = sign_of(&pattern[2 * lost..2 * lost + 2]);
        let diag_out = sign_of(&pattern[2 * lost + 2..2 * lost + 4]);
        let beta = if diag_out == PhysicalOutcome::Plus { r.beta } else { -r.beta };
        let expected = RedundantQubit {
            q: r.q - 1,
            beta,
            ..r.clone()
        }
        .fock_state()?;
        out.push(LossBranch {
            lost: lost_out,
            diagonal: diag_out,
            probability: p,
            fidelity: expected.overlap(&cond)?,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutOutcome {
    /// Block (0-based) whose full detection fixed the logical value.
    pub block: Option<usize>,
    pub value: Option<u8>,
    /// Whether every lossy block before it was disentangled coherently.
    pub coherent: bool,
    pub probability: f64,
}

#[derive(Clone, Debug)]
pub struct ReadoutDistribution {
    pub entries: Vec<ReadoutOutcome>,
}

impl ReadoutDistribution {
    pub fn success_probability(&self) -> f64 {
        kahan_sum(self.entries.iter().filter(|e| e.value.is_some()).map(|e| e.probability))
    }

    pub fn total_probability(&self) -> f64 {
        kahan_sum(self.entries.iter().map(|e| e.probability))
    }
}

/// Per-block detection statistics: (all detected, lost but disentangled,
/// lost and dephased), by enumerating every detect/lose pattern.
fn block_statistics(n: usize, eta: f64) -> (f64, f64, f64) {
    let mut all = 0.0;
    let mut coherent = 0.0;
    let mut dephased = 0.0;
    for pattern in 0..1usize << n {
        let detected = |k: usize| (pattern >> k) & 1 == 1;
        let p: f64 = (0..n).map(|k| if detected(k) { eta } else { 1.0 - eta }).product();
        match (0..n).find(|&k| !detected(k)) {
            None => all += p,
            Some(first) => {
                if (first + 1..n).any(detected) {
                    coherent += p;
                } else {
                    dephased += p;
                }
            }
        }
    }
    (all, coherent, dephased)
}

fn check_eta(eta: f64) -> Result<(), EncodingError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(EncodingError::Efficiency(eta));
    }
    Ok(())
}

/// Exact readout distribution of a redundant qubit measured block by block
/// with photon efficiency `eta`.
pub fn lossy_logical_readout(r: &RedundantQubit, eta: f64) -> Result<ReadoutDistribution, EncodingError> {
    check_eta(eta)?;
    let (all, coherent, dephased) = block_statistics(r.n, eta);
    let p0 = r.alpha.norm_sqr();
    let mut entries = Vec::new();
    // Probability mass reaching block k, split by whether coherence survived.
    let mut reach = [1.0, 0.0];
    for k in 0..r.q {
        for (c, &mass) in reach.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (value, pv) in [(0u8, p0), (1u8, 1.0 - p0)] {
                entries.push(ReadoutOutcome {
                    block: Some(k),
                    value: Some(value),
                    coherent: c == 0,
                    probability: mass * all * pv,
                });
            }
        }
        reach = [reach[0] * coherent, reach[1] * coherent + (reach[0] + reach[1]) * dephased];
    }
    for (c, &mass) in reach.iter().enumerate() {
        entries.push(ReadoutOutcome {
            block: None,
            value: None,
            coherent: c == 0,
            probability: mass,
        });
    }
    Ok(ReadoutDistribution { entries })
}

/// 1 − (1 − ηⁿ)^q
pub fn readout_success_closed_form(n: usize, q: usize, eta: f64) -> f64 {
    1.0 - (1.0 - eta.powi(n as i32)).powi(q as i32)
}

/// Monte Carlo estimate of the readout success probability.
pub fn readout_monte_carlo(r: &RedundantQubit, eta: f64, trials: u64, seed: u64, exec: Exec) -> Result<(f64, f64), EncodingError> {
    check_eta(eta)?;
    let (n, q) = (r.n, r.q);
    let scores = monte_carlo(exec, seed, trials, |rng| {
        for _ in 0..q {
            if (0..n).all(|_| rng.random::<f64>() < eta) {
                return 1.0;
            }
        }
        0.0
    });
    let mean = kahan_sum(scores.iter().copied()) / trials as f64;
    let sigma = (mean * (1.0 - mean) / trials as f64).sqrt();
    Ok((mean, sigma))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicalGate {
    XTheta,
    Z,
    ZPi2,
    Cnot,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCost {
    pub cnot_p: usize,
    pub zpi2_p: usize,
    /// Fusion attempts at one per Z_{π/2}^(p) and two per CNOT^(p).
    pub fusions: usize,
    pub single_photon_ops: usize,
}

/// Block-level operations needed for a logical gate on q blocks of n photons.
pub fn gate_cost(gate: LogicalGate, n: usize, q: usize) -> Result<GateCost, EncodingError> {
    if n == 0 || q == 0 {
        return Err(EncodingError::BlockSize { min: 1, got: n.min(q) });
    }
    let mut c = match gate {
        LogicalGate::XTheta => GateCost {
            cnot_p: 2 * (q - 1),
            single_photon_ops: 1,
            ..Default::default()
        },
        LogicalGate::Z => GateCost {
            single_photon_ops: n,
            ..Default::default()
        },
        LogicalGate::ZPi2 => GateCost {
            zpi2_p: 1,
            ..Default::default()
        },
        LogicalGate::Cnot => GateCost {
            cnot_p: q,
            ..Default::default()
        },
    };
    c.fusions = c.zpi2_p + 2 * c.cnot_p;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn two_photon_zero() {
        let q = parity_encode(cr(1.0), cr(0.0), 2).unwrap();
        let h = 0.5f64.sqrt();
        assert!((q.state.amp(&[1, 0, 1, 0]).re - h).abs() < 1e-14);
        assert!((q.state.amp(&[0, 1, 0, 1]).re - h).abs() < 1e-14);
        assert_eq!(q.state.len(), 2);
    }

    #[test]
    fn z_measurement_reduces() {
        let q = parity_encode(cr(0.6), c(0.0, 0.8), 3).unwrap();
        let r = measure_physical(&q, 1, PhysicalBasis::Computational).unwrap();
        assert_eq!(r.len(), 2);
        for m in r {
            assert!((m.probability - 0.5).abs() < 1e-12);
            assert!(m.fidelity > 1.0 - 1e-12);
        }
    }

    #[test]
    fn fz_values() {
        let l0 = fz_success(0.25, 0).unwrap();
        assert!((l0.f_z - 7.0 / 52.0).abs() < 1e-15);
        let l1 = fz_success(0.25, 1).unwrap();
        assert!((l1.f_z - 4753.0 / 124228.0).abs() < 1e-15);
    }

    #[test]
    fn fusion_grows_block() {
        let psi = parity_encode(cr(0.6), c(0.0, 0.8), 2).unwrap();
        let r = f2_fusion_action(&psi, 3).unwrap();
        assert!((r.success_probability() - 0.5).abs() < 1e-12);
        assert!(r.min_fidelity() > 1.0 - 1e-12);
    }

    #[test]
    fn readout_matches_closed_form() {
        let r = RedundantQubit::new(cr(0.6), cr(0.8), 3, 3).unwrap();
        let d = lossy_logical_readout(&r, 0.8).unwrap();
        assert!((d.total_probability() - 1.0).abs() < 1e-12);
        assert!((d.success_probability() - readout_success_closed_form(3, 3, 0.8)).abs() < 1e-12);
    }

    #[test]
    fn loss_keeps_information() {
        let r = RedundantQubit::new(cr(0.6), c(0.0, 0.8), 2, 2).unwrap();
        let b = loss_recovery(&r, 0).unwrap();
        assert!((b.iter().map(|x| x.probability).sum::<f64>() - 1.0).abs() < 1e-12);
        for x in b {
            assert_eq!(x.lost, x.diagonal);
            assert!(x.fidelity > 1.0 - 1e-12);
        }
    }

    #[test]
    fn costs() {
        assert_eq!(gate_cost(LogicalGate::XTheta, 2, 3).unwrap().cnot_p, 4);
        assert_eq!(gate_cost(LogicalGate::Cnot, 2, 2).unwrap().cnot_p, 2);
        assert_eq!(gate_cost(LogicalGate::XTheta, 2, 1).unwrap().cnot_p, 0);
    }
}
