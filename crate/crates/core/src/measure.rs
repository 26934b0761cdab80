//! Photon counting: detector POVMs, outcome enumeration, post-selection and
//! checks on measurement-induced operations.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fock::{binomial, FockError, PureState, StateEnsemble};
use crate::linalg::{cr, CMatrix};
use crate::optics::{apply_circuit, Element, OpticsError};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("efficiency {0} outside [0, 1]")]
    Efficiency(f64),
    #[error("dark count mean {0} is negative")]
    DarkCounts(f64),
    #[error("no modes to measure")]
    NoModes,
    #[error("detector cutoff {detector} below state cutoff {state}")]
    DetectorCutoff { detector: usize, state: usize },
    #[error("pattern length {pattern} does not match {modes} modes")]
    PatternLength { pattern: usize, modes: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectorKind {
    NumberResolving,
    Bucket,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorModel {
    pub kind: DetectorKind,
    pub efficiency: f64,
    /// Mean number of dark counts per detection window.
    pub dark_mean: f64,
    pub cutoff: usize,
}

impl DetectorModel {
    pub fn ideal(cutoff: usize) -> Self {
        DetectorModel {
            kind: DetectorKind::NumberResolving,
            efficiency: 1.0,
            dark_mean: 0.0,
            cutoff,
        }
    }

    pub fn number_resolving(efficiency: f64, cutoff: usize) -> Self {
        DetectorModel {
            efficiency,
            ..Self::ideal(cutoff)
        }
    }

    pub fn bucket(efficiency: f64, cutoff: usize) -> Self {
        DetectorModel {
            kind: DetectorKind::Bucket,
            efficiency,
            dark_mean: 0.0,
            cutoff,
        }
    }

    pub fn with_dark_counts(self, dark_mean: f64) -> Self {
        DetectorModel { dark_mean, ..self }
    }

    pub fn validate(&self) -> Result<(), MeasureError> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(MeasureError::Efficiency(self.efficiency));
        }
        if !(self.dark_mean >= 0.0) {
            return Err(MeasureError::DarkCounts(self.dark_mean));
        }
        Ok(())
    }

    /// Number of distinct signatures one detector can report.
    pub fn signature_count(&self) -> usize {
        match self.kind {
            DetectorKind::NumberResolving => self.cutoff + 1,
            DetectorKind::Bucket => 2,
        }
    }

    /// P(signature | k photons arrive). Number-resolving signatures above the
    /// cutoff are lumped into the top bin.
    pub fn response(&self, k: usize) -> Vec<f64> {
        let eta = self.efficiency;
        let detected: Vec<f64> = (0..=k)
            .map(|j| binomial(k, j) * eta.powi(j as i32) * (1.0 - eta).powi((k - j) as i32))
            .collect();
        let top = self.cutoff;
        let mut counts = vec![0.0; top + 1];
        if self.dark_mean == 0.0 {
            for (j, p) in detected.iter().enumerate() {
                counts[j.min(top)] += p;
            }
        } else {
            let nu = self.dark_mean;
            let mut dark = Vec::with_capacity(top + 1);
            let mut pmf = (-nu).exp();
            for d in 0..=top {
                dark.push(pmf);
                pmf *= nu / (d + 1) as f64;
            }
            let tail = 1.0 - dark.iter().sum::<f64>();
            for (j, p) in detected.iter().enumerate() {
                for (d, q) in dark.iter().enumerate() {
                    counts[(j + d).min(top)] += p * q;
                }
                counts[top] += p * tail.max(0.0);
            }
        }
        match self.kind {
            DetectorKind::NumberResolving => counts,
            DetectorKind::Bucket => {
                let none = counts[0];
                vec![none, 1.0 - none]
            }
        }
    }

    /// POVM elements, each diagonal in the photon number 0..=cutoff.
    pub fn povm(&self) -> Result<Povm, MeasureError> {
        self.validate()?;
        let mut elements = vec![vec![0.0; self.cutoff + 1]; self.signature_count()];
        for k in 0..=self.cutoff {
            for (s, p) in self.response(k).into_iter().enumerate() {
                elements[s][k] = p;
            }
        }
        Ok(Povm { elements })
    }
}

/// Diagonal POVM: `elements[s][k] = ⟨k|Ê_s|k⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    pub elements: Vec<Vec<f64>>,
}

impl Povm {
    /// max_k |Σ_s ⟨k|Ê_s|k⟩ − 1|
    pub fn completeness_error(&self) -> f64 {
        let dim = self.elements.first().map_or(0, |e| e.len());
        (0..dim)
            .map(|k| (self.elements.iter().map(|e| e[k]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn matrix(&self, s: usize) -> CMatrix {
        let v: Vec<C64> = self.elements[s].iter().map(|&x| cr(x)).collect();
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(v))
    }
}

/// Ê_n = Σ_{k≥n} C(k,n) η^n (1−η)^{k−n} |k⟩⟨k|
pub fn povm_number_resolving(eta: f64, cutoff: usize) -> Result<Povm, MeasureError> {
    DetectorModel::number_resolving(eta, cutoff).povm()
}

/// (Ê_0, Ê_1) with Ê_0 = Σ (1−η)^n |n⟩⟨n|.
pub fn povm_bucket(eta: f64, cutoff: usize) -> Result<Povm, MeasureError> {
    DetectorModel::bucket(eta, cutoff).povm()
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub signature: Vec<u8>,
    pub probability: f64,
    /// State of the unmeasured modes given the signature.
    pub conditional: StateEnsemble,
}

#[derive(Clone, Debug)]
pub struct OutcomeDistribution {
    pub modes: Vec<usize>,
    pub entries: Vec<Outcome>,
}

impl OutcomeDistribution {
    pub fn get(&self, signature: &[u8]) -> Option<&Outcome> {
        self.entries.iter().find(|o| o.signature == signature)
    }

    pub fn probability(&self, signature: &[u8]) -> f64 {
        self.get(signature).map_or(0.0, |o| o.probability)
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|o| o.probability).sum()
    }
}

/// Splits a state by its photon counts on `modes`: count pattern ↦ (weight,
/// normalized state of the remaining modes).
pub fn split_by_counts(state: &PureState, modes: &[usize]) -> BTreeMap<Vec<u8>, (f64, PureState)> {
    let mut groups: BTreeMap<Vec<u8>, PureState> = BTreeMap::new();
    for (k, a) in state.iter() {
        let key = k.select(modes).counts().to_vec();
        groups
            .entry(key)
            .or_insert_with(|| PureState::zero(state.modes() - modes.len(), state.cutoff()))
            .add_term(k.remove(modes), *a);
    }
    groups
        .into_iter()
        .filter_map(|(key, s)| {
            let p = s.norm_sqr();
            s.normalized().ok().map(|s| (key, (p, s)))
        })
        .collect()
}

/// Enumerates every detector signature on `modes` with its probability and
/// the conditional state of the rest.
pub fn measure_modes(
    state: &PureState,
    modes: &[usize],
    detector: &DetectorModel,
) -> Result<OutcomeDistribution, MeasureError> {
    if modes.is_empty() {
        return Err(MeasureError::NoModes);
    }
    detector.validate()?;
    if detector.cutoff < state.cutoff() {
        return Err(MeasureError::DetectorCutoff {
            detector: detector.cutoff,
            state: state.cutoff(),
        });
    }
    for (i, &m) in modes.iter().enumerate() {
        if m >= state.modes() {
            return Err(FockError::ModeOutOfRange { mode: m, modes: state.modes() }.into());
        }
        if modes[..i].contains(&m) {
            return Err(MeasureError::Dimension(format!("mode {m} listed twice")));
        }
    }
    let norm = state.norm_sqr();
    let mut sigs: BTreeMap<Vec<u8>, Vec<(f64, PureState)>> = BTreeMap::new();
    for (counts, (p, rest)) in split_by_counts(state, modes) {
        let responses: Vec<Vec<f64>> = counts.iter().map(|&n| detector.response(n as usize)).collect();
        let mut stack: Vec<(Vec<u8>, f64)> = vec![(Vec::new(), p / norm)];
        for r in &responses {
            let mut next = Vec::new();
            for (sig, w) in &stack {
                for (s, q) in r.iter().enumerate() {
                    if *q > 0.0 {
                        let mut sig2 = sig.clone();
                        sig2.push(s as u8);
                        next.push((sig2, w * q));
                    }
                }
            }
            stack = next;
        }
        for (sig, w) in stack {
            sigs.entry(sig).or_default().push((w, rest.clone()));
        }
    }
    let entries = sigs
        .into_iter()
        .filter_map(|(signature, branches)| {
            let probability: f64 = branches.iter().map(|(w, _)| w).sum();
            StateEnsemble::from_weights(branches).ok().map(|conditional| Outcome {
                signature,
                probability,
                conditional,
            })
        })
        .collect();
    Ok(OutcomeDistribution {
        modes: modes.to_vec(),
        entries,
    })
}

#[derive(Clone, Debug)]
pub struct PostSelection {
    pub probability: f64,
    /// `None` when the pattern cannot occur.
    pub state: Option<PureState>,
}

/// Probability of an ideal count pattern and the renormalized state of the
/// remaining modes.
pub fn post_select(state: &PureState, modes: &[usize], pattern: &[u8]) -> Result<PostSelection, MeasureError> {
    if modes.len() != pattern.len() {
        return Err(MeasureError::PatternLength {
            pattern: pattern.len(),
            modes: modes.len(),
        });
    }
    if let Some(&m) = modes.iter().find(|&&m| m >= state.modes()) {
        return Err(FockError::ModeOutOfRange { mode: m, modes: state.modes() }.into());
    }
    let projected = state.project(modes, pattern);
    let probability = projected.norm_sqr() / state.norm_sqr();
    Ok(PostSelection {
        probability,
        state: projected.normalized().ok(),
    })
}

#[derive(Clone, Debug)]
pub struct TestOperator {
    pub matrix: CMatrix,
    /// True when the matrix is proportional to the identity.
    pub unitary: bool,
    /// Proportionality constant, i.e. the success probability.
    pub d: f64,
}

/// Setup for a measurement-induced operation: system inputs, ancilla
/// preparation, a circuit and a herald pattern.
#[derive(Clone, Debug)]
pub struct HeraldedSetup<'a> {
    pub total_modes: usize,
    pub cutoff: usize,
    pub system_modes: &'a [usize],
    pub ancilla: &'a PureState,
    pub ancilla_modes: &'a [usize],
    pub circuit: &'a [Element],
    pub herald_modes: &'a [usize],
    pub pattern: &'a [u8],
}

impl HeraldedSetup<'_> {
    /// P_k U |input, σ⟩ with the herald modes removed (unnormalized).
    pub fn heralded_output(&self, input: &PureState) -> Result<PureState, MeasureError> {
        let full = PureState::product_on(
            &[(input, self.system_modes), (self.ancilla, self.ancilla_modes)],
            self.total_modes,
            self.cutoff,
        )?;
        let out = apply_circuit(&full, self.circuit)?;
        Ok(out.project(self.herald_modes, self.pattern))
    }
}

/// T̂ = Tr_A(σ U† P_k U) restricted to the span of `inputs`.
pub fn test_operator(setup: &HeraldedSetup, inputs: &[PureState]) -> Result<TestOperator, MeasureError> {
    if inputs.is_empty() {
        return Err(MeasureError::Dimension("no inputs".into()));
    }
    let outs: Vec<PureState> = inputs
        .iter()
        .map(|s| setup.heralded_output(s))
        .collect::<Result<_, _>>()?;
    let n = outs.len();
    let mut t = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            t[(a, b)] = outs[a].inner(&outs[b])?;
        }
    }
    let d = t.trace().re / n as f64;
    let dev = (&t - CMatrix::identity(n, n) * cr(d)).camax();
    Ok(TestOperator {
        matrix: t,
        unitary: dev <= 1e-8,
        d,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub k: usize,
    pub l: usize,
    /// Modes whose number operators appear in the product.
    pub modes: Vec<usize>,
    pub value: C64,
}

/// Checks ⟨χ_k| n̂_{j1} ⋯ n̂_{jr} |χ_l⟩ = 0 for k ≠ l and r ≤ `max_order`.
pub fn distinguishability_check(states: &[PureState], max_order: usize) -> Result<Vec<Violation>, MeasureError> {
    if max_order > 3 {
        return Err(MeasureError::Dimension(format!("order {max_order} above 3")));
    }
    let Some(first) = states.first() else {
        return Ok(Vec::new());
    };
    let modes = first.modes();
    if let Some(s) = states.iter().find(|s| s.modes() != modes) {
        return Err(FockError::ModeMismatch(s.modes(), modes).into());
    }
    let mut products: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for p in &frontier {
            let start = p.last().copied().unwrap_or(0);
            for j in start..modes {
                let mut q = p.clone();
                q.push(j);
                next.push(q);
            }
        }
        products.extend(next.iter().cloned());
        frontier = next;
    }
    let mut out = Vec::new();
    for k in 0..states.len() {
        for l in (k + 1)..states.len() {
            for prod in &products {
                let mut v = C64::new(0.0, 0.0);
                for (occ, a) in states[k].iter() {
                    let b = states[l].amplitude(occ);
                    if b.norm() == 0.0 {
                        continue;
                    }
                    let w: f64 = prod.iter().map(|&j| occ.get(j) as f64).product();
                    v += a.conj() * b * w;
                }
                if v.norm() > 1e-10 {
                    out.push(Violation {
                        k,
                        l,
                        modes: prod.clone(),
                        value: v,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::OccupationVector;
    use std::f64::consts::FRAC_PI_4;

    fn pair(a: [u8; 2], b: [u8; 2], sign: f64) -> PureState {
        let h = 0.5f64.sqrt();
        PureState::from_terms(
            2,
            4,
            [(OccupationVector::from(a), cr(h)), (OccupationVector::from(b), cr(sign * h))],
        )
        .unwrap()
    }

    #[test]
    fn number_resolving_limits() {
        let p = povm_number_resolving(1.0, 4).unwrap();
        for n in 0..=4 {
            for k in 0..=4 {
                assert_eq!(p.elements[n][k], if n == k { 1.0 } else { 0.0 });
            }
        }
        let p = povm_number_resolving(0.0, 4).unwrap();
        assert!(p.elements[0].iter().all(|&x| x == 1.0));
        assert!(p.elements[3].iter().all(|&x| x == 0.0));
        let p = povm_number_resolving(0.5, 4).unwrap();
        assert!((p.elements[1][2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bucket_values() {
        let p = povm_bucket(0.5, 4).unwrap();
        assert!((p.elements[1][2] - 0.75).abs() < 1e-15);
        assert!(p.completeness_error() < 1e-15);
        let p = povm_bucket(1.0, 4).unwrap();
        assert_eq!(p.elements[1][0], 0.0);
        assert_eq!(p.elements[1][3], 1.0);
        assert!(povm_bucket(1.2, 4).is_err());
    }

    #[test]
    fn dark_counts_keep_completeness() {
        let d = DetectorModel::number_resolving(0.7, 6).with_dark_counts(0.3);
        assert!(d.povm().unwrap().completeness_error() < 1e-12);
        let d = DetectorModel::bucket(0.7, 6).with_dark_counts(0.3);
        let p = d.povm().unwrap();
        assert!((p.elements[1][0] - (1.0 - (-0.3f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn born_rule_split() {
        let s = pair([1, 0], [0, 1], 1.0);
        let d = measure_modes(&s, &[0], &DetectorModel::ideal(4)).unwrap();
        assert!((d.probability(&[1]) - 0.5).abs() < 1e-12);
        let c = &d.get(&[0]).unwrap().conditional;
        assert_eq!(c.branches()[0].1.amp(&[1]), cr(1.0));
    }

    #[test]
    fn hom_output_has_no_coincidence() {
        let s = pair([2, 0], [0, 2], -1.0);
        let d = measure_modes(&s, &[0, 1], &DetectorModel::ideal(4)).unwrap();
        assert_eq!(d.probability(&[1, 1]), 0.0);
        assert!((d.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lossy_bucket_on_single_photon() {
        let s = PureState::basis_state([1], 4).unwrap();
        let d = measure_modes(&s, &[0], &DetectorModel::bucket(0.5, 4)).unwrap();
        assert!((d.probability(&[1]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn post_select_cases() {
        let s = PureState::basis_state([1, 0], 4).unwrap();
        let r = post_select(&s, &[1], &[0]).unwrap();
        assert_eq!(r.probability, 1.0);
        assert_eq!(r.state.unwrap().amp(&[1]), cr(1.0));
        let r = post_select(&s, &[1], &[5]).unwrap();
        assert_eq!(r.probability, 0.0);
        assert!(r.state.is_none());
    }

    #[test]
    fn trivial_test_operator() {
        let anc = PureState::vacuum(1, 4);
        let inputs: Vec<PureState> = (0..3).map(|n| PureState::basis_state([n], 4).unwrap()).collect();
        let setup = HeraldedSetup {
            total_modes: 2,
            cutoff: 4,
            system_modes: &[0],
            ancilla: &anc,
            ancilla_modes: &[1],
            circuit: &[],
            herald_modes: &[1],
            pattern: &[0],
        };
        let t = test_operator(&setup, &inputs).unwrap();
        assert!(t.unitary);
        assert!((t.d - 1.0).abs() < 1e-15);
        let lossy = [Element::bs(0, 1, FRAC_PI_4, 0.0)];
        let setup = HeraldedSetup { circuit: &lossy, ..setup };
        assert!(!test_operator(&setup, &inputs).unwrap().unitary);
    }

    #[test]
    fn distinguishability() {
        let one = PureState::basis_state([1], 4).unwrap();
        let two = PureState::basis_state([2], 4).unwrap();
        assert!(distinguishability_check(&[one.clone(), two], 3).unwrap().is_empty());
        assert!(distinguishability_check(&[one], 2).unwrap().is_empty());
    }
}
