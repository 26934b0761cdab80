//! Graph states and their measurement rules, fusion-based growth statistics,
//! micro-clusters, loss-tolerant trees and heralded GHZ preparation.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_4;

use nalgebra::DVector;
use rand::Rng;
use thiserror::Error;

use crate::encoding::polarization_state;
use crate::exec::{kahan_sum, monte_carlo, Exec, KahanSum};
use crate::fock::{FockError, OccupationVector, PureState, StateEnsemble};
use crate::gates::{fusion, FusionVariant};
use crate::linalg::{c, cr, CMatrix, Pauli};
use crate::measure::{measure_modes, split_by_counts, DetectorModel, MeasureError};
use crate::optics::{apply_circuit, Element, ModeUnitary, OpticsError, PbsBasis};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("vertex {0} is not in the graph")]
    MissingVertex(usize),
    #[error("vertex {heir} is not a neighbour of {vertex}")]
    NotNeighbour { vertex: usize, heir: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("success probability {0} outside (0, 1]")]
    Probability(f64),
    #[error("efficiency {0} outside (0, 1]")]
    Efficiency(f64),
    #[error("tree branching entries must be at least 1")]
    Branching,
    #[error("at least one trial is required")]
    NoTrials,
    #[error("state-vector checks are limited to {0} qubits")]
    TooLarge(usize),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Simple undirected graph on arbitrary vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphState {
    adj: BTreeMap<usize, BTreeSet<usize>>,
}

impl GraphState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(n: usize) -> Self {
        GraphState {
            adj: (0..n).map(|v| (v, BTreeSet::new())).collect(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, ClusterError> {
        let mut g = Self::with_vertices(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn chain(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("chain edges are valid")
    }

    /// Centre 0 joined to leaves 1..=k.
    pub fn star(k: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..=k).map(|i| (0, i)).collect();
        Self::from_edges(k + 1, &edges).expect("star edges are valid")
    }

    pub fn add_vertex(&mut self, v: usize) {
        self.adj.entry(v).or_default();
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), ClusterError> {
        if a == b {
            return Err(ClusterError::SelfLoop(a));
        }
        for v in [a, b] {
            if !self.adj.contains_key(&v) {
                return Err(ClusterError::MissingVertex(v));
            }
        }
        self.adj.get_mut(&a).expect("present").insert(b);
        self.adj.get_mut(&b).expect("present").insert(a);
        Ok(())
    }

    fn toggle_edge(&mut self, a: usize, b: usize) {
        let present = self.adj[&a].contains(&b);
        if present {
            self.adj.get_mut(&a).expect("present").remove(&b);
            self.adj.get_mut(&b).expect("present").remove(&a);
        } else {
            self.adj.get_mut(&a).expect("present").insert(b);
            self.adj.get_mut(&b).expect("present").insert(a);
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.adj.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> Result<&BTreeSet<usize>, ClusterError> {
        self.adj.get(&v).ok_or(ClusterError::MissingVertex(v))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .flat_map(|(&a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn remove_vertex(&mut self, v: usize) -> Result<(), ClusterError> {
        let ns = self.adj.remove(&v).ok_or(ClusterError::MissingVertex(v))?;
        for n in ns {
            self.adj.get_mut(&n).expect("symmetric adjacency").remove(&v);
        }
        Ok(())
    }

    /// Complements the subgraph induced on the neighbourhood of `v`.
    pub fn local_complement(&mut self, v: usize) -> Result<(), ClusterError> {
        let ns: Vec<usize> = self.neighbors(v)?.iter().copied().collect();
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                self.toggle_edge(a, b);
            }
        }
        Ok(())
    }

    /// Position of each vertex in `vertices()`.
    fn index(&self) -> BTreeMap<usize, usize> {
        self.adj.keys().enumerate().map(|(i, &v)| (v, i)).collect()
    }
}

/// Generator X_v ⊗ Z_{N(v)}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    pub vertex: usize,
    pub ops: BTreeMap<usize, Pauli>,
}

impl Stabilizer {
    pub fn commutes(&self, other: &Stabilizer) -> bool {
        let clashes = self
            .ops
            .iter()
            .filter(|(q, p)| other.ops.get(q).is_some_and(|o| o != *p))
            .count();
        clashes % 2 == 0
    }

    pub fn label(&self) -> String {
        self.ops
            .iter()
            .map(|(q, p)| format!("{}{}", p.label(), q))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn stabilizers(g: &GraphState) -> Vec<Stabilizer> {
    g.adj
        .iter()
        .map(|(&v, ns)| {
            let mut ops: BTreeMap<usize, Pauli> = ns.iter().map(|&n| (n, Pauli::Z)).collect();
            ops.insert(v, Pauli::X);
            Stabilizer { vertex: v, ops }
        })
        .collect()
}

/// Z measurement: the vertex and its bonds disappear.
pub fn measure_z(g: &GraphState, v: usize) -> Result<GraphState, ClusterError> {
    let mut out = g.clone();
    out.remove_vertex(v)?;
    Ok(out)
}

/// X measurement of `v` with bonds handed to `heir` (lowest-index neighbour
/// by default): the graph becomes τ_heir(τ_v(τ_heir(G)) − v).
pub fn measure_x(g: &GraphState, v: usize, heir: Option<usize>) -> Result<GraphState, ClusterError> {
    let ns = g.neighbors(v)?;
    let Some(b0) = heir.or_else(|| ns.iter().next().copied()) else {
        return measure_z(g, v);
    };
    if !ns.contains(&b0) {
        return Err(ClusterError::NotNeighbour { vertex: v, heir: b0 });
    }
    let mut out = g.clone();
    out.local_complement(b0)?;
    out.local_complement(v)?;
    out.remove_vertex(v)?;
    out.local_complement(b0)?;
    Ok(out)
}

/// Local unitaries that map the predicted graph state onto the state left
/// after measuring `v` with the given outcome (0 for +1).
pub fn measurement_frame(
    g: &GraphState,
    v: usize,
    basis: Pauli,
    outcome: u8,
    heir: Option<usize>,
) -> Result<Vec<(usize, CMatrix)>, ClusterError> {
    let ns = g.neighbors(v)?.clone();
    let z = Pauli::Z.matrix();
    match basis {
        Pauli::Z => Ok(if outcome == 0 {
            Vec::new()
        } else {
            ns.iter().map(|&n| (n, z.clone())).collect()
        }),
        Pauli::X => {
            let Some(b0) = heir.or_else(|| ns.iter().next().copied()) else {
                return Ok(Vec::new());
            };
            let nb0 = g.neighbors(b0)?.clone();
            let y = Pauli::Y.matrix();
            let h = 0.5f64.sqrt();
            let sign = if outcome == 0 { 1.0 } else { -1.0 };
            let root = (CMatrix::identity(2, 2) + y * c(0.0, sign)) * cr(h);
            let mut frame = vec![(b0, root)];
            let zs: Vec<usize> = if outcome == 0 {
                ns.iter().filter(|&&b| b != b0 && !nb0.contains(&b)).copied().collect()
            } else {
                nb0.iter().filter(|&&b| b != v && !ns.contains(&b)).copied().collect()
            };
            frame.extend(zs.into_iter().map(|b| (b, z.clone())));
            Ok(frame)
        }
        _ => Ok(Vec::new()),
    }
}

pub const STATE_VECTOR_LIMIT: usize = 12;

/// Qubit amplitudes of the graph state, vertices in ascending order,
/// first vertex the most significant bit.
pub fn graph_state_vector(g: &GraphState) -> Result<DVector<C64>, ClusterError> {
    let n = g.len();
    if n > STATE_VECTOR_LIMIT {
        return Err(ClusterError::TooLarge(STATE_VECTOR_LIMIT));
    }
    let idx = g.index();
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|(a, b)| (idx[a], idx[b])).collect();
    let amp = 1.0 / ((1usize << n) as f64).sqrt();
    Ok(DVector::from_fn(1 << n, |x, _| {
        let bit = |k: usize| (x >> (n - 1 - k)) & 1;
        let s: usize = edges.iter().map(|&(a, b)| bit(a) & bit(b)).sum();
        cr(if s % 2 == 0 { amp } else { -amp })
    }))
}

/// Applies a one-qubit matrix to qubit `k` of an n-qubit vector.
pub fn apply_one(psi: &DVector<C64>, n: usize, k: usize, u: &CMatrix) -> DVector<C64> {
    let shift = n - 1 - k;
    let mut out = DVector::zeros(psi.len());
    for x in 0..psi.len() {
        let b = (x >> shift) & 1;
        for b2 in 0..2 {
            let y = (x & !(1 << shift)) | (b2 << shift);
            out[y] += u[(b2, b)] * psi[x];
        }
    }
    out
}

/// Projects qubit `k` onto the `outcome` eigenvector of X or Z and removes it.
/// Returns the unnormalized remainder.
pub fn project_qubit(psi: &DVector<C64>, n: usize, k: usize, basis: Pauli, outcome: u8) -> DVector<C64> {
    let h = 0.5f64.sqrt();
    let bra: [C64; 2] = match (basis, outcome) {
        (Pauli::X, 0) => [cr(h), cr(h)],
        (Pauli::X, _) => [cr(h), cr(-h)],
        (_, 0) => [cr(1.0), cr(0.0)],
        _ => [cr(0.0), cr(1.0)],
    };
    let shift = n - 1 - k;
    let mut out = DVector::zeros(psi.len() / 2);
    for x in 0..psi.len() {
        let b = (x >> shift) & 1;
        let high = x >> (shift + 1);
        let low = x & ((1 << shift) - 1);
        out[(high << shift) | low] += bra[b].conj() * psi[x];
    }
    out
}

fn fidelity(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    let na = a.norm_squared();
    let nb = b.norm_squared();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.dotc(b).norm_sqr() / (na * nb)
}

/// Fidelity between the measured state vector and the graph-rule prediction
/// dressed with its local frame. `None` for an outcome that cannot occur.
pub fn verify_measurement(g: &GraphState, v: usize, basis: Pauli, outcome: u8) -> Result<Option<f64>, ClusterError> {
    let psi = graph_state_vector(g)?;
    let idx = g.index();
    let measured = project_qubit(&psi, g.len(), idx[&v], basis, outcome);
    if measured.norm_squared() < 1e-20 {
        return Ok(None);
    }
    let predicted = match basis {
        Pauli::X => measure_x(g, v, None)?,
        _ => measure_z(g, v)?,
    };
    let mut expected = graph_state_vector(&predicted)?;
    let pidx = predicted.index();
    for (q, u) in measurement_frame(g, v, basis, outcome, None)? {
        expected = apply_one(&expected, predicted.len(), pidx[&q], &u);
    }
    Ok(Some(fidelity(&expected, &measured)))
}

/// Merges `b` into `a`: the surviving vertex carries both neighbourhoods.
pub fn fuse_type1(g: &GraphState, a: usize, b: usize) -> Result<GraphState, ClusterError> {
    let nb: Vec<usize> = g.neighbors(b)?.iter().copied().filter(|&x| x != a).collect();
    g.neighbors(a)?;
    let mut out = g.clone();
    out.remove_vertex(b)?;
    for n in nb {
        out.toggle_edge(a, n);
    }
    Ok(out)
}

/// Removes `a` and `b` and joins every neighbour of one to every neighbour of
/// the other.
pub fn fuse_type2(g: &GraphState, a: usize, b: usize) -> Result<GraphState, ClusterError> {
    let na: Vec<usize> = g.neighbors(a)?.iter().copied().filter(|&x| x != b).collect();
    let nb: Vec<usize> = g.neighbors(b)?.iter().copied().filter(|&x| x != a).collect();
    let mut out = g.clone();
    out.remove_vertex(a)?;
    out.remove_vertex(b)?;
    for &x in &na {
        for &y in &nb {
            if x != y {
                out.toggle_edge(x, y);
            }
        }
    }
    Ok(out)
}

/// Von Neumann entropies of every bipartition, a local-unitary invariant.
pub fn entanglement_spectrum(psi: &DVector<C64>, n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let norm = psi.norm_squared();
    for mask in 1..(1usize << n) - 1 {
        if mask & 1 == 0 {
            continue;
        }
        let a: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        let b: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 0).collect();
        let mut m = CMatrix::zeros(1 << a.len(), 1 << b.len());
        for x in 0..psi.len() {
            let bit = |k: usize| (x >> (n - 1 - k)) & 1;
            let ra = a.iter().fold(0, |acc, &k| acc << 1 | bit(k));
            let rb = b.iter().fold(0, |acc, &k| acc << 1 | bit(k));
            m[(ra, rb)] = psi[x];
        }
        let rho = &m * m.adjoint() / c(norm, 0.0);
        out.push(crate::linalg::entropy_bits(&rho));
    }
    out
}

/// Qubit vector ↦ polarization photons, qubit k on modes (2k, 2k+1).
pub fn to_photons(psi: &DVector<C64>, n: usize) -> Result<PureState, ClusterError> {
    Ok(polarization_state(n, |x| psi[x])?)
}

#[derive(Clone, Debug)]
pub struct FusionCheck {
    pub variant: FusionVariant,
    pub success_probability: f64,
    /// Bipartite entropies of heralded outputs equal those of the graph rule.
    pub success_matches_rule: bool,
    pub failure_probability: f64,
    /// Worst case over failure outcomes of the best overlap with a product
    /// measurement of both fused qubits in Z, and in X.
    pub failure_fidelity_z: f64,
    pub failure_fidelity_x: f64,
}

impl FusionCheck {
    /// Failure acts as Z measurements (type I) or X measurements (type II).
    pub fn failure_as_expected(&self, tol: f64) -> bool {
        match self.variant {
            FusionVariant::Type1 => self.failure_fidelity_z > 1.0 - tol && self.failure_fidelity_x < 1.0 - tol,
            FusionVariant::Type2 => self.failure_fidelity_x > 1.0 - tol && self.failure_fidelity_z < 1.0 - tol,
        }
    }
}

/// Fuses the ends of two two-qubit clusters at photon level with the
/// library fusion circuit and classifies every detector outcome.
///
/// Qubit order: 0 and 1 are the fused photons, 2 and 3 their partners.
pub fn fusion_failure_check(variant: FusionVariant) -> Result<FusionCheck, ClusterError> {
    let g = GraphState::from_edges(4, &[(2, 0), (1, 3)])?;
    let psi = graph_state_vector(&g)?;
    let photons = to_photons(&psi, 4)?;
    let spec = fusion(variant);
    let out = apply_circuit(&photons, &spec.elements)?;
    let predicted = match variant {
        FusionVariant::Type1 => fuse_type1(&g, 0, 1)?,
        FusionVariant::Type2 => fuse_type2(&g, 0, 1)?,
    };
    let predicted_spectrum = entanglement_spectrum(&graph_state_vector(&predicted)?, predicted.len());

    let successes: BTreeSet<Vec<u8>> = spec.heralds.iter().map(|h| h.signature.clone()).collect();
    let mut success_p = 0.0;
    let mut failure_p = 0.0;
    let mut success_ok = true;
    let mut fz = 1.0f64;
    let mut fx = 1.0f64;
    // Both fused photons' modes are read out on failure.
    let all_fused = [0usize, 1, 2, 3];
    let detected_only = spec.detected.clone();
    for (sig, (p, cond)) in split_by_counts(&out, &detected_only) {
        if successes.contains(&sig) {
            success_p += p;
            let (rest, n_rest) = photons_to_qubits(&cond)?;
            let spectrum = entanglement_spectrum(&rest, n_rest);
            let same = spectrum.len() == predicted_spectrum.len()
                && spectrum.iter().zip(&predicted_spectrum).all(|(a, b)| (a - b).abs() < 1e-9);
            success_ok &= same;
        } else {
            failure_p += p;
        }
    }
    for (sig, (_, cond)) in split_by_counts(&out, &all_fused) {
        let detected_sig: Vec<u8> = detected_only.iter().map(|&m| sig[m]).collect();
        if successes.contains(&detected_sig) {
            continue;
        }
        let (rest, _) = photons_to_qubits(&cond)?;
        let best = |basis: Pauli| {
            let mut best: f64 = 0.0;
            for o0 in 0..2u8 {
                for o1 in 0..2u8 {
                    let m = project_qubit(&psi, 4, 0, basis, o0);
                    let m = project_qubit(&m, 3, 0, basis, o1);
                    best = best.max(fidelity(&m, &rest));
                }
            }
            best
        };
        fz = fz.min(best(Pauli::Z));
        fx = fx.min(best(Pauli::X));
    }
    Ok(FusionCheck {
        variant,
        success_probability: success_p,
        success_matches_rule: success_ok,
        failure_probability: failure_p,
        failure_fidelity_z: fz,
        failure_fidelity_x: fx,
    })
}

/// Reads a one-photon-per-pair polarization state back as a qubit vector.
fn photons_to_qubits(state: &PureState) -> Result<(DVector<C64>, usize), ClusterError> {
    let n = state.modes() / 2;
    let mut v = DVector::zeros(1 << n);
    for (occ, a) in state.iter() {
        let mut x = 0usize;
        for k in 0..n {
            let (h, vv) = (occ.get(2 * k), occ.get(2 * k + 1));
            if h + vv != 1 {
                return Err(ClusterError::Fock(FockError::ModeMismatch(2 * k, 2)));
            }
            x = x << 1 | vv as usize;
        }
        v[x] = *a;
    }
    Ok((v, n))
}

/// Symbols of the growth inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthStrategy {
    pub p: f64,
    pub d_s: usize,
    pub d_f: usize,
    pub m: usize,
}

impl GrowthStrategy {
    pub fn type1(m: usize) -> Self {
        GrowthStrategy { p: 0.5, d_s: 1, d_f: 1, m }
    }

    pub fn type2(m: usize) -> Self {
        GrowthStrategy { p: 0.5, d_s: 2, d_f: 1, m }
    }

    /// Type-II fusion read by bucket detectors.
    pub fn type2_bucket(p: f64, m: usize) -> Self {
        GrowthStrategy { p, d_s: 2, d_f: 2, m }
    }

    /// Attaching single qubits with a gate of success `p` that removes one
    /// cluster qubit on failure.
    pub fn qubit_attach(p: f64) -> Self {
        GrowthStrategy { p, d_s: 0, d_f: 1, m: 1 }
    }

    pub fn drift(&self) -> f64 {
        self.p * self.m as f64 - self.p * self.d_s as f64 - (1.0 - self.p) * self.d_f as f64
    }

    pub fn grows(&self) -> Result<bool, ClusterError> {
        Ok(self.m as f64 > growth_requirement(self.p, self.d_s, self.d_f)?)
    }
}

/// m_min = (p·d_s + (1−p)·d_f)/p
pub fn growth_requirement(p: f64, d_s: usize, d_f: usize) -> Result<f64, ClusterError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(ClusterError::Probability(p));
    }
    Ok((p * d_s as f64 + (1.0 - p) * d_f as f64) / p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthStats {
    pub strategy: GrowthStrategy,
    pub trials: u64,
    pub seed: u64,
    pub attempts: u64,
    pub drift: f64,
    pub drift_stderr: f64,
    pub analytic_drift: f64,
    /// Fraction of runs that reached the target length.
    pub reached: f64,
    /// Chain qubits consumed per final cluster qubit, over runs that reached the target.
    pub resources_per_qubit: f64,
}

impl GrowthStats {
    pub fn within_sigma(&self, k: f64) -> bool {
        (self.drift - self.analytic_drift).abs() <= k * self.drift_stderr.max(1e-12)
    }
}

/// Grows a chain from empty by repeated attachment attempts until it holds
/// `target_length` qubits or 50·target attempts have been made.
pub fn grow_chain_monte_carlo(
    strategy: GrowthStrategy,
    target_length: usize,
    trials: u64,
    seed: u64,
    exec: Exec,
) -> Result<GrowthStats, ClusterError> {
    growth_requirement(strategy.p, strategy.d_s, strategy.d_f)?;
    if trials == 0 {
        return Err(ClusterError::NoTrials);
    }
    let cap = 50 * target_length.max(1) as u64;
    let gain = strategy.m as i64 - strategy.d_s as i64;
    let loss = -(strategy.d_f as i64);
    let runs = exec.map_range(trials as usize, |t| {
        let mut rng = crate::exec::trial_rng(seed, t as u64);
        let mut n: i64 = 0;
        let mut attempts = 0u64;
        let mut sum = 0i64;
        let mut sum_sq = 0i64;
        while n < target_length as i64 && attempts < cap {
            let step = if rng.random::<f64>() < strategy.p { gain } else { loss };
            n += step;
            sum += step;
            sum_sq += step * step;
            attempts += 1;
        }
        (attempts, sum, sum_sq, n >= target_length as i64)
    });
    let attempts: u64 = runs.iter().map(|r| r.0).sum();
    let sum: i64 = runs.iter().map(|r| r.1).sum();
    let sum_sq: i64 = runs.iter().map(|r| r.2).sum();
    let mean = sum as f64 / attempts as f64;
    let var = (sum_sq as f64 / attempts as f64 - mean * mean).max(0.0);
    let reached: Vec<&(u64, i64, i64, bool)> = runs.iter().filter(|r| r.3).collect();
    let consumed = kahan_sum(reached.iter().map(|r| (r.0 * strategy.m as u64) as f64));
    let final_len = kahan_sum(reached.iter().map(|r| r.1 as f64));
    Ok(GrowthStats {
        strategy,
        trials,
        seed,
        attempts,
        drift: mean,
        drift_stderr: (var / attempts as f64).sqrt(),
        analytic_drift: strategy.drift(),
        reached: reached.len() as f64 / trials as f64,
        resources_per_qubit: if final_len > 0.0 { consumed / final_len } else { f64::INFINITY },
    })
}

/// 1 − (1−p)^k
pub fn micro_cluster_retry(k: usize, p: f64) -> Result<f64, ClusterError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ClusterError::Probability(p));
    }
    if k == 0 {
        return Err(ClusterError::Branching);
    }
    Ok(1.0 - (1.0 - p).powi(k as i32))
}

/// Monte Carlo estimate (mean, standard error) of the micro-cluster success.
pub fn micro_cluster_monte_carlo(k: usize, p: f64, trials: u64, seed: u64, exec: Exec) -> Result<(f64, f64), ClusterError> {
    micro_cluster_retry(k, p)?;
    if trials == 0 {
        return Err(ClusterError::NoTrials);
    }
    let scores = monte_carlo(exec, seed, trials, |rng| {
        if (0..k).any(|_| rng.random::<f64>() < p) {
            1.0
        } else {
            0.0
        }
    });
    Ok(mean_and_error(&scores))
}

fn mean_and_error(scores: &[f64]) -> (f64, f64) {
    let n = scores.len() as f64;
    let mean = kahan_sum(scores.iter().copied()) / n;
    let mut var = KahanSum::default();
    for s in scores {
        var.add((s - mean) * (s - mean));
    }
    let var = var.value() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Tree below a planted qubit: `branching[0]` first-level qubits, each with
/// `branching[1]` children, and so on.
#[derive(Clone, Debug, PartialEq)]
pub struct LossTree {
    pub branching: Vec<usize>,
    pub eta: f64,
}

impl LossTree {
    pub fn new(branching: Vec<usize>, eta: f64) -> Result<Self, ClusterError> {
        if branching.is_empty() || branching.contains(&0) {
            return Err(ClusterError::Branching);
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(ClusterError::Efficiency(eta));
        }
        Ok(LossTree { branching, eta })
    }

    pub fn photons(&self) -> usize {
        let mut total = 0;
        let mut level = 1;
        for &b in &self.branching {
            level *= b;
            total += level;
        }
        total
    }

    fn b(&self, k: usize) -> usize {
        self.branching.get(k).copied().unwrap_or(0)
    }

    /// Probability of learning Z of a lost level-k qubit (k ≥ 1) from one of
    /// its children read in X and that child's children read in Z.
    fn indirect(&self, k: usize, memo: &mut BTreeMap<usize, f64>) -> f64 {
        if k >= self.branching.len() {
            return 0.0;
        }
        if let Some(&r) = memo.get(&k) {
            return r;
        }
        let z = self.z_success(k + 2, memo);
        let child = self.eta * z.powi(self.b(k + 1) as i32);
        let r = 1.0 - (1.0 - child).powi(self.b(k) as i32);
        memo.insert(k, r);
        r
    }

    /// Direct or indirect Z on a level-k qubit.
    fn z_success(&self, k: usize, memo: &mut BTreeMap<usize, f64>) -> f64 {
        self.eta + (1.0 - self.eta) * self.indirect(k, memo)
    }

    /// Exact success probability of the A measurement.
    pub fn success_probability(&self) -> f64 {
        let mut memo = BTreeMap::new();
        let r1 = self.indirect(1, &mut memo);
        let z2 = self.z_success(2, &mut memo);
        let eps = 1.0 - self.eta;
        let b0 = self.b(0) as i32;
        ((self.eta + eps * r1).powi(b0) - (eps * r1).powi(b0)) * z2.powi(self.b(1) as i32)
    }

    fn sample_z<R: Rng>(&self, k: usize, rng: &mut R) -> bool {
        rng.random::<f64>() < self.eta || self.sample_indirect(k, rng)
    }

    fn sample_indirect<R: Rng>(&self, k: usize, rng: &mut R) -> bool {
        for _ in 0..self.b(k) {
            if rng.random::<f64>() < self.eta && (0..self.b(k + 1)).all(|_| self.sample_z(k + 2, rng)) {
                return true;
            }
        }
        false
    }

    /// One run of the protocol: first-level qubits are tried for A in order.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> bool {
        let b0 = self.b(0);
        for i in 0..b0 {
            if rng.random::<f64>() < self.eta {
                let children = (0..self.b(1)).all(|_| self.sample_z(2, rng));
                let earlier = (0..i).all(|_| self.sample_indirect(1, rng));
                let later = (i + 1..b0).all(|_| self.sample_z(1, rng));
                return children && earlier && later;
            }
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeStats {
    pub branching: Vec<usize>,
    pub eta: f64,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub exact: f64,
}

pub fn tree_loss_sim(tree: &LossTree, trials: u64, seed: u64, exec: Exec) -> Result<TreeStats, ClusterError> {
    if trials == 0 {
        return Err(ClusterError::NoTrials);
    }
    let scores = monte_carlo(exec, seed, trials, |rng| if tree.sample(rng) { 1.0 } else { 0.0 });
    let (mean, stderr) = mean_and_error(&scores);
    Ok(TreeStats {
        branching: tree.branching.clone(),
        eta: tree.eta,
        trials,
        seed,
        mean,
        stderr,
        exact: tree.success_probability(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GhzReport {
    pub p_s: f64,
    pub eta: f64,
    pub accept_probability: f64,
    /// Fidelity after both post-selections; `None` when nothing is accepted.
    pub fidelity: Option<f64>,
    /// Weight of runs in which all four sources fired.
    pub unfiltered: f64,
}

const GHZ_MODES: usize = 16;
/// Type-I detectors of the two three-photon attempts, then the type-II pair.
const GHZ_DETECTED: [usize; 8] = [4, 5, 12, 13, 2, 3, 10, 11];

fn ghz_circuit() -> Vec<Element> {
    let t1 = fusion(FusionVariant::Type1).elements;
    let t2 = fusion(FusionVariant::Type2).elements;
    let mut els = Vec::new();
    // Photon 2 of source 0 with photon 1 of source 1, and likewise 2 with 3.
    els.extend(t1.iter().map(|e| e.remapped(&[2, 3, 4, 5])));
    els.extend(t1.iter().map(|e| e.remapped(&[10, 11, 12, 13])));
    els.extend(t2.iter().map(|e| e.remapped(&[2, 3, 10, 11])));
    els
}

fn singlet_pair() -> PureState {
    let h = 0.5f64.sqrt();
    PureState::from_terms(
        4,
        8,
        [
            (OccupationVector::from([1, 0, 0, 1]), cr(h)),
            (OccupationVector::from([0, 1, 1, 0]), cr(-h)),
        ],
    )
    .expect("singlet")
}

fn accepted(sig: &[u8]) -> bool {
    let clicks = |a: usize, b: usize| (sig[a] > 0) as u8 + (sig[b] > 0) as u8;
    clicks(0, 1) == 1 && clicks(2, 3) == 1 && clicks(4, 5) == 1 && clicks(6, 7) == 1
}

fn ghz_outcomes(p_s: f64, eta: f64) -> Result<BTreeMap<Vec<u8>, (f64, Vec<(f64, PureState)>)>, ClusterError> {
    let detector = DetectorModel::bucket(eta, 8);
    let pair = singlet_pair();
    let vac = PureState::vacuum(4, 8);
    let circuit = ghz_circuit();
    let mut groups: BTreeMap<Vec<u8>, (f64, Vec<(f64, PureState)>)> = BTreeMap::new();
    for fired in 0..16u32 {
        let weight: f64 = (0..4)
            .map(|k| if fired >> k & 1 == 1 { 1.0 - p_s } else { p_s })
            .product();
        if weight == 0.0 {
            continue;
        }
        let parts: Vec<&PureState> = (0..4).map(|k| if fired >> k & 1 == 1 { &pair } else { &vac }).collect();
        let positions: Vec<Vec<usize>> = (0..4).map(|k| (4 * k..4 * k + 4).collect()).collect();
        let placed: Vec<(&PureState, &[usize])> = parts.iter().zip(&positions).map(|(s, p)| (*s, p.as_slice())).collect();
        let state = PureState::product_on(&placed, GHZ_MODES, 8)?;
        let out = apply_circuit(&state, &circuit)?;
        for o in measure_modes(&out, &GHZ_DETECTED, &detector)?.entries {
            if !accepted(&o.signature) {
                continue;
            }
            let entry = groups.entry(o.signature).or_insert((0.0, Vec::new()));
            let w = weight * o.probability;
            entry.0 += w;
            for (bw, st) in o.conditional.branches() {
                entry.1.push((w * bw, st.clone()));
            }
        }
    }
    Ok(groups)
}

/// Two type-I fusions post-selected on one click each feed a type-II fusion
/// post-selected on a coincidence. Sources emit vacuum with weight `p_s`.
pub fn ghz_purify_scenario(p_s: f64, eta: f64) -> Result<GhzReport, ClusterError> {
    if !(0.0..=1.0).contains(&p_s) {
        return Err(ClusterError::Probability(p_s));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(ClusterError::Efficiency(eta));
    }
    let ideal = ghz_outcomes(0.0, 1.0)?;
    let actual = ghz_outcomes(p_s, eta)?;
    let accept: f64 = actual.values().map(|(p, _)| p).sum();
    let fidelity = if accept > 0.0 {
        let mut f = 0.0;
        for (sig, (p, branches)) in &actual {
            let Some((_, target)) = ideal.get(sig) else { continue };
            let target = &target[0].1;
            let ens = StateEnsemble::from_weights(branches.clone())?;
            f += p * ens.fidelity_with(target)?;
        }
        Some(f / accept)
    } else {
        None
    };
    Ok(GhzReport {
        p_s,
        eta,
        accept_probability: accept,
        fidelity,
        unfiltered: (1.0 - p_s).powi(4),
    })
}

/// Ideal heralded four-photon output for one accepted signature, as qubits
/// (source 0 photon 1, source 1 photon 2, source 2 photon 1, source 3 photon 2).
pub fn ghz_ideal_output() -> Result<Vec<(Vec<u8>, f64, DVector<C64>)>, ClusterError> {
    let mut out = Vec::new();
    for (sig, (p, branches)) in ghz_outcomes(0.0, 1.0)? {
        let (v, _) = photons_to_qubits(&branches[0].1)?;
        out.push((sig, p, v));
    }
    Ok(out)
}

/// Polarization rotation used to read a photon diagonally.
pub fn diagonal_reader(mode_h: usize) -> Element {
    Element::Unitary {
        modes: vec![mode_h, mode_h + 1],
        u: ModeUnitary::beam_splitter(FRAC_PI_4, std::f64::consts::FRAC_PI_2),
    }
}

/// H/V polarizing beam splitter on two polarization pairs.
pub fn pbs(a_h: usize, b_h: usize) -> Element {
    Element::PolarizingBs {
        modes: [a_h, a_h + 1, b_h, b_h + 1],
        basis: PbsBasis::HV,
    }
}
