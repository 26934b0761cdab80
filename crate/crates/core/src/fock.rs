//! Sparse multimode Fock states.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::C64;

pub const DEFAULT_CUTOFF: usize = 12;
/// Amplitudes below this magnitude are dropped.
pub const PRUNE: f64 = 1e-14;
/// Largest basis for which dense matrices are built.
pub const DENSE_LIMIT: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("{photons} photons exceed cutoff {cutoff}")]
    CutoffExceeded { photons: usize, cutoff: usize },
    #[error("mode count mismatch: {0} vs {1}")]
    ModeMismatch(usize, usize),
    #[error("mode {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("state is the zero vector")]
    ZeroVector,
    #[error("basis of {size} states exceeds dense limit {limit}")]
    DenseLimit { size: usize, limit: usize },
    #[error("ensemble probabilities sum to {0}")]
    BadProbabilities(f64),
    #[error("empty collection")]
    Empty,
}

/// Photon count per mode; the Fock basis label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector(Vec<u8>);

impl OccupationVector {
    pub fn new(counts: Vec<u8>) -> Self {
        OccupationVector(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        OccupationVector(vec![0; modes])
    }

    pub fn from_slice(counts: &[u8]) -> Self {
        OccupationVector(counts.to_vec())
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub fn get(&self, mode: usize) -> u8 {
        self.0[mode]
    }

    pub fn set(&mut self, mode: usize, n: u8) {
        self.0[mode] = n;
    }

    /// Keeps only the listed modes, in the listed order.
    pub fn select(&self, modes: &[usize]) -> Self {
        OccupationVector(modes.iter().map(|&m| self.0[m]).collect())
    }

    /// Drops the listed modes.
    pub fn remove(&self, modes: &[usize]) -> Self {
        OccupationVector(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !modes.contains(i))
                .map(|(_, &n)| n)
                .collect(),
        )
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        OccupationVector(v)
    }

    /// ∏ n_i!
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n as usize)).product()
    }
}

impl fmt::Debug for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

impl From<&[u8]> for OccupationVector {
    fn from(v: &[u8]) -> Self {
        OccupationVector(v.to_vec())
    }
}

impl<const N: usize> From<[u8; N]> for OccupationVector {
    fn from(v: [u8; N]) -> Self {
        OccupationVector(v.to_vec())
    }
}

/// Every occupation vector of `modes` modes holding exactly `n` photons,
/// in lexicographic order.
pub fn sector(modes: usize, n: usize) -> Vec<OccupationVector> {
    fn rec(modes: usize, n: usize, prefix: &mut Vec<u8>, out: &mut Vec<OccupationVector>) {
        if prefix.len() + 1 == modes {
            prefix.push(n as u8);
            out.push(OccupationVector(prefix.clone()));
            prefix.pop();
            return;
        }
        for k in 0..=n {
            prefix.push(k as u8);
            rec(modes, n - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if modes == 0 {
        return out;
    }
    rec(modes, n, &mut Vec::with_capacity(modes), &mut out);
    out
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// Result of a ladder operator: the unnormalized image plus bookkeeping.
#[derive(Clone, Debug)]
pub struct LadderOutput {
    pub state: PureState,
    /// Squared norm dropped because a raised term passed the cutoff.
    pub truncation_loss: f64,
    /// Set when every term was annihilated.
    pub is_zero: bool,
}

/// Sparse amplitude map over occupation vectors.
///
/// Keys are kept ordered so iteration, and hence every floating point
/// reduction built on it, is reproducible.
#[derive(Clone, PartialEq)]
pub struct PureState {
    modes: usize,
    cutoff: usize,
    amps: BTreeMap<OccupationVector, C64>,
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in &self.amps {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i){:?}", a.re, a.im, k)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl PureState {
    /// The zero vector; a starting point for accumulation.
    pub fn zero(modes: usize, cutoff: usize) -> Self {
        PureState {
            modes,
            cutoff,
            amps: BTreeMap::new(),
        }
    }

    pub fn vacuum(modes: usize, cutoff: usize) -> Self {
        let mut s = Self::zero(modes, cutoff);
        s.amps.insert(OccupationVector::vacuum(modes), C64::new(1.0, 0.0));
        s
    }

    pub fn basis_state(occ: impl Into<OccupationVector>, cutoff: usize) -> Result<Self, FockError> {
        let occ = occ.into();
        if occ.modes() == 0 {
            return Err(FockError::Empty);
        }
        if occ.total() > cutoff {
            return Err(FockError::CutoffExceeded {
                photons: occ.total(),
                cutoff,
            });
        }
        let mut s = Self::zero(occ.modes(), cutoff);
        s.amps.insert(occ, C64::new(1.0, 0.0));
        Ok(s)
    }

    /// Builds an unnormalized state from terms, summing duplicates.
    pub fn from_terms<I>(modes: usize, cutoff: usize, terms: I) -> Result<Self, FockError>
    where
        I: IntoIterator<Item = (OccupationVector, C64)>,
    {
        let mut s = Self::zero(modes, cutoff);
        for (occ, a) in terms {
            if occ.modes() != modes {
                return Err(FockError::ModeMismatch(occ.modes(), modes));
            }
            if occ.total() > cutoff {
                return Err(FockError::CutoffExceeded {
                    photons: occ.total(),
                    cutoff,
                });
            }
            *s.amps.entry(occ).or_insert(C64::new(0.0, 0.0)) += a;
        }
        s.prune();
        Ok(s)
    }

    /// Normalized linear combination.
    pub fn superpose(terms: &[(C64, &PureState)]) -> Result<Self, FockError> {
        let (_, first) = terms.first().ok_or(FockError::Empty)?;
        let mut acc = Self::zero(first.modes, first.cutoff);
        for (c, s) in terms {
            if s.modes != acc.modes {
                return Err(FockError::ModeMismatch(s.modes, acc.modes));
            }
            acc.cutoff = acc.cutoff.max(s.cutoff);
            acc.add_scaled(*c, s);
        }
        acc.normalize()?;
        Ok(acc)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Result<Self, FockError> {
        if let Some(n) = self.max_photons() {
            if n > cutoff {
                return Err(FockError::CutoffExceeded { photons: n, cutoff });
            }
        }
        self.cutoff = cutoff;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, &C64)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, occ: &OccupationVector) -> C64 {
        self.amps.get(occ).copied().unwrap_or_default()
    }

    pub fn amp(&self, counts: &[u8]) -> C64 {
        self.amplitude(&OccupationVector::from_slice(counts))
    }

    pub fn max_photons(&self) -> Option<usize> {
        self.amps.keys().map(|k| k.total()).max()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() >= PRUNE);
    }

    pub fn normalize(&mut self) -> Result<(), FockError> {
        let n = self.norm_sqr().sqrt();
        if n < PRUNE {
            return Err(FockError::ZeroVector);
        }
        for a in self.amps.values_mut() {
            *a /= n;
        }
        self.prune();
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self, FockError> {
        self.normalize()?;
        Ok(self)
    }

    pub fn scale(&mut self, c: C64) {
        for a in self.amps.values_mut() {
            *a *= c;
        }
        self.prune();
    }

    pub fn scaled(mut self, c: C64) -> Self {
        self.scale(c);
        self
    }

    /// self += c·other (no renormalization).
    pub fn add_scaled(&mut self, c: C64, other: &PureState) {
        for (k, a) in &other.amps {
            *self.amps.entry(k.clone()).or_insert(C64::new(0.0, 0.0)) += c * a;
        }
        self.prune();
    }

    pub fn add_term(&mut self, occ: OccupationVector, a: C64) {
        *self.amps.entry(occ).or_insert(C64::new(0.0, 0.0)) += a;
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &PureState) -> Result<C64, FockError> {
        if self.modes != other.modes {
            return Err(FockError::ModeMismatch(self.modes, other.modes));
        }
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = C64::new(0.0, 0.0);
        for (k, a) in &small.amps {
            if let Some(b) = large.amps.get(k) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Tensor product; modes of `other` follow those of `self`.
    pub fn compose(&self, other: &PureState) -> Result<Self, FockError> {
        let cutoff = self.cutoff.max(other.cutoff);
        let mut out = Self::zero(self.modes + other.modes, cutoff);
        for (ka, a) in &self.amps {
            for (kb, b) in &other.amps {
                let k = ka.concat(kb);
                if k.total() > cutoff {
                    return Err(FockError::CutoffExceeded {
                        photons: k.total(),
                        cutoff,
                    });
                }
                out.amps.insert(k, a * b);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Places this state's modes at `positions` inside a register of `total` modes,
    /// the remaining modes holding vacuum.
    pub fn embed(&self, positions: &[usize], total: usize) -> Result<Self, FockError> {
        if positions.len() != self.modes {
            return Err(FockError::ModeMismatch(positions.len(), self.modes));
        }
        if let Some(&m) = positions.iter().find(|&&m| m >= total) {
            return Err(FockError::ModeOutOfRange { mode: m, modes: total });
        }
        let mut out = Self::zero(total, self.cutoff);
        for (k, a) in &self.amps {
            let mut v = vec![0u8; total];
            for (i, &p) in positions.iter().enumerate() {
                v[p] = k.get(i);
            }
            out.amps.insert(OccupationVector(v), *a);
        }
        Ok(out)
    }

    /// Product state of several parts, each placed on its own modes of a
    /// `total`-mode register. Unlisted modes hold vacuum.
    pub fn product_on(parts: &[(&PureState, &[usize])], total: usize, cutoff: usize) -> Result<Self, FockError> {
        let mut acc = PureState::vacuum(total, cutoff);
        for (part, positions) in parts {
            let placed = part.embed(positions, total)?;
            let mut next = PureState::zero(total, cutoff);
            for (ka, a) in &acc.amps {
                for (kb, b) in &placed.amps {
                    let v: Vec<u8> = ka.0.iter().zip(&kb.0).map(|(x, y)| x + y).collect();
                    let occ = OccupationVector(v);
                    if occ.total() > cutoff {
                        return Err(FockError::CutoffExceeded {
                            photons: occ.total(),
                            cutoff,
                        });
                    }
                    next.add_term(occ, a * b);
                }
            }
            next.prune();
            acc = next;
        }
        Ok(acc)
    }

    /// Keeps the terms whose counts on `modes` equal `pattern` and removes those
    /// modes. The result is not renormalized.
    pub fn project(&self, modes: &[usize], pattern: &[u8]) -> PureState {
        let mut out = PureState::zero(self.modes - modes.len(), self.cutoff);
        for (k, a) in &self.amps {
            if modes.iter().zip(pattern).all(|(&m, &n)| k.get(m) == n) {
                out.add_term(k.remove(modes), *a);
            }
        }
        out
    }

    /// Applies â or â† on one mode. Raised terms beyond the cutoff are dropped
    /// and their weight reported.
    pub fn ladder(&self, mode: usize, dir: Ladder) -> Result<LadderOutput, FockError> {
        if mode >= self.modes {
            return Err(FockError::ModeOutOfRange {
                mode,
                modes: self.modes,
            });
        }
        let mut out = Self::zero(self.modes, self.cutoff);
        let mut lost = 0.0;
        for (k, a) in &self.amps {
            let n = k.get(mode);
            match dir {
                Ladder::Lower => {
                    if n == 0 {
                        continue;
                    }
                    let mut k2 = k.clone();
                    k2.set(mode, n - 1);
                    out.amps.insert(k2, a * (n as f64).sqrt());
                }
                Ladder::Raise => {
                    let f = (n as f64 + 1.0).sqrt();
                    if k.total() + 1 > self.cutoff {
                        lost += (a * f).norm_sqr();
                        continue;
                    }
                    let mut k2 = k.clone();
                    k2.set(mode, n + 1);
                    out.amps.insert(k2, a * f);
                }
            }
        }
        out.prune();
        let is_zero = out.is_empty();
        Ok(LadderOutput {
            state: out,
            truncation_loss: lost,
            is_zero,
        })
    }

    /// Multiplies each term by `f(occupation)`.
    pub fn map_diagonal(&self, f: impl Fn(&OccupationVector) -> C64) -> Self {
        let mut out = self.clone();
        for (k, a) in out.amps.iter_mut() {
            *a *= f(k);
        }
        out.prune();
        out
    }

    /// Expectation of the photon number in `mode`.
    pub fn mean_photons(&self, mode: usize) -> f64 {
        self.amps
            .iter()
            .map(|(k, a)| a.norm_sqr() * k.get(mode) as f64)
            .sum()
    }

    /// Largest |amplitude difference| between two states.
    pub fn distance_inf(&self, other: &PureState) -> f64 {
        let mut d: f64 = 0.0;
        for (k, a) in &self.amps {
            d = d.max((a - other.amplitude(k)).norm());
        }
        for (k, b) in &other.amps {
            if !self.amps.contains_key(k) {
                d = d.max(b.norm());
            }
        }
        d
    }

    /// |⟨self|other⟩|² for normalized inputs.
    pub fn overlap(&self, other: &PureState) -> Result<f64, FockError> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

/// Probabilistic mixture of pure states.
#[derive(Clone, Debug)]
pub struct StateEnsemble {
    branches: Vec<(f64, PureState)>,
}

impl StateEnsemble {
    pub fn new(branches: Vec<(f64, PureState)>) -> Result<Self, FockError> {
        if branches.is_empty() {
            return Err(FockError::Empty);
        }
        let modes = branches[0].1.modes();
        if let Some((_, s)) = branches.iter().find(|(_, s)| s.modes() != modes) {
            return Err(FockError::ModeMismatch(s.modes(), modes));
        }
        let total: f64 = branches.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-12 || branches.iter().any(|(p, _)| *p < 0.0) {
            return Err(FockError::BadProbabilities(total));
        }
        Ok(StateEnsemble { branches })
    }

    /// Builds from unnormalized weights, rescaling them to sum to one.
    pub fn from_weights(branches: Vec<(f64, PureState)>) -> Result<Self, FockError> {
        let total: f64 = branches.iter().map(|(p, _)| p).sum();
        if total <= 0.0 {
            return Err(FockError::BadProbabilities(total));
        }
        let kept = branches
            .into_iter()
            .filter(|(p, _)| *p > 0.0)
            .map(|(p, s)| (p / total, s))
            .collect();
        Self::new(kept)
    }

    pub fn pure(state: PureState) -> Self {
        StateEnsemble {
            branches: vec![(1.0, state)],
        }
    }

    /// p|1⟩⟨1| + (1−p)|0⟩⟨0| on one mode.
    pub fn imperfect_single_photon(p: f64, cutoff: usize) -> Result<Self, FockError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(FockError::BadProbabilities(p));
        }
        Self::from_weights(vec![
            (p, PureState::basis_state([1], cutoff)?),
            (1.0 - p, PureState::basis_state([0], cutoff)?),
        ])
    }

    pub fn branches(&self) -> &[(f64, PureState)] {
        &self.branches
    }

    pub fn modes(&self) -> usize {
        self.branches[0].1.modes()
    }

    /// Fidelity with a pure target: Σ p_i |⟨target|ψ_i⟩|².
    pub fn fidelity_with(&self, target: &PureState) -> Result<f64, FockError> {
        let mut f = 0.0;
        for (p, s) in &self.branches {
            f += p * s.overlap(target)?;
        }
        Ok(f)
    }
}

/// Dense density matrix over an explicit basis.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    pub basis: Vec<OccupationVector>,
    pub matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn from_ensemble(e: &StateEnsemble) -> Result<Self, FockError> {
        Self::from_ensemble_with_limit(e, DENSE_LIMIT)
    }

    pub fn from_ensemble_with_limit(e: &StateEnsemble, limit: usize) -> Result<Self, FockError> {
        let mut keys: Vec<OccupationVector> = e
            .branches()
            .iter()
            .flat_map(|(_, s)| s.amps.keys().cloned())
            .collect();
        keys.sort();
        keys.dedup();
        Self::build(e, keys, limit)
    }

    /// Density operator over a caller-chosen basis (terms outside it are dropped).
    pub fn over_basis(e: &StateEnsemble, basis: Vec<OccupationVector>) -> Result<Self, FockError> {
        Self::build(e, basis, DENSE_LIMIT)
    }

    fn build(
        e: &StateEnsemble,
        basis: Vec<OccupationVector>,
        limit: usize,
    ) -> Result<Self, FockError> {
        if basis.len() > limit {
            return Err(FockError::DenseLimit {
                size: basis.len(),
                limit,
            });
        }
        let d = basis.len();
        let mut rho = DMatrix::<C64>::zeros(d, d);
        for (p, s) in e.branches() {
            let v: Vec<C64> = basis.iter().map(|k| s.amplitude(k)).collect();
            for i in 0..d {
                if v[i].norm() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    rho[(i, j)] += *p * v[i] * v[j].conj();
                }
            }
        }
        Ok(DensityOperator { basis, matrix: rho })
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

/// ρ = Σ p_i |ψ_i⟩⟨ψ_i| over the union basis.
pub fn to_density(e: &StateEnsemble) -> Result<DensityOperator, FockError> {
    DensityOperator::from_ensemble(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn basis_state_respects_cutoff() {
        assert!(PureState::basis_state([2, 1], 2).is_err());
        let v = PureState::basis_state([0, 0, 0], 4).unwrap();
        assert_eq!(v.amp(&[0, 0, 0]), c(1.0));
    }

    #[test]
    fn superpose_cancellation_is_rejected() {
        let a = PureState::basis_state([1, 0], 4).unwrap();
        let r = PureState::superpose(&[(c(1.0), &a), (c(-1.0), &a)]);
        assert_eq!(r.unwrap_err(), FockError::ZeroVector);
    }

    #[test]
    fn superpose_symmetric_pair() {
        let a = PureState::basis_state([1, 0], 4).unwrap();
        let b = PureState::basis_state([0, 1], 4).unwrap();
        let s = PureState::superpose(&[(c(1.0), &a), (c(1.0), &b)]).unwrap();
        assert!((s.amp(&[1, 0]).re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_factors() {
        let one = PureState::basis_state([1], 4).unwrap();
        let up = one.ladder(0, Ladder::Raise).unwrap().state;
        assert!((up.amp(&[2]).re - 2f64.sqrt()).abs() < 1e-15);
        let down = one.ladder(0, Ladder::Lower).unwrap().state;
        assert_eq!(down.amp(&[0]), c(1.0));
        let vac = PureState::basis_state([0], 4).unwrap();
        assert!(vac.ladder(0, Ladder::Lower).unwrap().is_zero);
    }

    #[test]
    fn ladder_reports_truncation() {
        let s = PureState::basis_state([2], 2).unwrap();
        let out = s.ladder(0, Ladder::Raise).unwrap();
        assert!(out.is_zero);
        assert!((out.truncation_loss - 3.0).abs() < 1e-12);
    }

    #[test]
    fn plus_overlap_with_zero() {
        let z = PureState::basis_state([0], 4).unwrap();
        let o = PureState::basis_state([1], 4).unwrap();
        let plus = PureState::superpose(&[(c(1.0), &z), (c(1.0), &o)]).unwrap();
        assert!((plus.inner(&z).unwrap().re - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn compose_prepends_vacuum() {
        let vac = PureState::vacuum(2, 4);
        let psi = PureState::basis_state([1, 2], 4).unwrap();
        let s = vac.compose(&psi).unwrap();
        assert_eq!(s.amp(&[0, 0, 1, 2]), c(1.0));
        let wide = PureState::basis_state([1, 2], 6).unwrap();
        assert_eq!(wide.compose(&wide).unwrap().amp(&[1, 2, 1, 2]), c(1.0));
        let big = PureState::basis_state([3], 4).unwrap();
        assert!(big.compose(&big).is_err());
    }

    #[test]
    fn density_of_diagonal_mixture() {
        let e = StateEnsemble::imperfect_single_photon(0.3, 4).unwrap();
        let rho = to_density(&e).unwrap();
        assert_eq!(rho.basis[0], OccupationVector::from([0]));
        assert!((rho.matrix[(0, 0)].re - 0.7).abs() < 1e-15);
        assert!((rho.matrix[(1, 1)].re - 0.3).abs() < 1e-15);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_limit_enforced() {
        let branches: Vec<_> = (0..5)
            .map(|n| (0.2, PureState::basis_state([n], 8).unwrap()))
            .collect();
        let e = StateEnsemble::new(branches).unwrap();
        assert!(DensityOperator::from_ensemble_with_limit(&e, 4).is_err());
    }

    #[test]
    fn sector_sizes() {
        assert_eq!(sector(3, 2).len(), 6);
        assert_eq!(sector(1, 4), vec![OccupationVector::from([4])]);
        assert!(sector(4, 3).iter().all(|o| o.total() == 3));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(factorial(4), 24.0);
    }
}
