//! Single-photon wave packets over discrete frequency modes, their counting
//! statistics, two-photon interference and down-conversion sources.
//!
//! Time is measured in units where the mode spacing is one, so every
//! counting function is periodic with period 2π.

use std::f64::consts::PI;

use rand::Rng;
use thiserror::Error;

use crate::exec::{kahan_sum, Exec};
use crate::fock::{FockError, OccupationVector, PureState, StateEnsemble};
use crate::linalg::{c, cis, cr};
use crate::measure::{measure_modes, split_by_counts, DetectorModel, MeasureError};
use crate::optics::{apply_circuit, Element, OpticsError};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SourceError {
    #[error("mode cutoff must be at least 1")]
    Cutoff,
    #[error("binomial parameter {0} outside [0, 0.5]")]
    BinomialMu(f64),
    #[error("Lorentzian width {0} must be positive")]
    LorentzianMu(f64),
    #[error("time-bin indices must differ and lie in 1..={n}, got {mu} and {nu}")]
    TimeBin { mu: usize, nu: usize, n: usize },
    #[error("time {0} sits on a singularity of the time-bin functions")]
    Singular(f64),
    #[error("spectra have different lengths ({0} and {1})")]
    Length(usize, usize),
    #[error("spectrum is not normalizable")]
    Zero,
    #[error("pair amplitude |λ| = {0} must be below 1")]
    Lambda(f64),
    #[error("herald never fires")]
    NoHerald,
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Carrier {
    Binomial { mu: f64 },
    Lorentzian { mu: f64 },
    Custom,
}

/// Amplitudes f_1..f_N of a one-photon wave packet; `amplitudes[k]` belongs
/// to frequency k+1.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralAmplitude {
    pub amplitudes: Vec<C64>,
    pub carrier: Carrier,
}

impl SpectralAmplitude {
    /// Normalizes arbitrary amplitudes.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, SourceError> {
        Self::with_carrier(amplitudes, Carrier::Custom)
    }

    fn with_carrier(mut amplitudes: Vec<C64>, carrier: Carrier) -> Result<Self, SourceError> {
        if amplitudes.is_empty() {
            return Err(SourceError::Cutoff);
        }
        let norm = kahan_sum(amplitudes.iter().map(|a| a.norm_sqr())).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(SourceError::Zero);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(SpectralAmplitude { amplitudes, carrier })
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        kahan_sum(self.amplitudes.iter().map(|a| a.norm_sqr()))
    }

    /// |f_k|², k = 1..N.
    pub fn weights(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Frequency carrying the largest weight.
    pub fn dominant_frequency(&self) -> usize {
        let w = self.weights();
        let mut best = 0;
        for (k, x) in w.iter().enumerate() {
            if *x > w[best] {
                best = k;
            }
        }
        best + 1
    }

    /// Σ_n f_n g_n*.
    pub fn overlap(&self, other: &SpectralAmplitude) -> Result<C64, SourceError> {
        if self.cutoff() != other.cutoff() {
            return Err(SourceError::Length(self.cutoff(), other.cutoff()));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b.conj()).sum())
    }

    /// Same spectrum delayed by `delay`: f_k ↦ f_k e^{−ik·delay}.
    pub fn delayed(&self, delay: f64) -> SpectralAmplitude {
        SpectralAmplitude {
            amplitudes: self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(k, a)| a * cis(-((k + 1) as f64) * delay))
                .collect(),
            carrier: self.carrier,
        }
    }

    /// Random normalized spectrum with Gaussian real and imaginary parts.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, SourceError> {
        use rand_distr::{Distribution, StandardNormal};
        let amps = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                c(re, im)
            })
            .collect();
        Self::new(amps)
    }
}

/// f_m ∝ C(N,m)^{1/2} μ^{m/2} (1−μ)^{(N−m)/2}, m = 1..N, with the exact
/// normalization 1/√(1−(1−μ)^N).
pub fn binomial_amplitudes(n: usize, mu: f64) -> Result<SpectralAmplitude, SourceError> {
    if n == 0 {
        return Err(SourceError::Cutoff);
    }
    if !(0.0..=0.5).contains(&mu) || mu == 0.0 {
        return Err(SourceError::BinomialMu(mu));
    }
    let norm = 1.0 / (1.0 - (1.0 - mu).powi(n as i32)).sqrt();
    // log space keeps C(N,m) finite at large N
    let ln_fact = |k: usize| (1..=k).map(|j| (j as f64).ln()).sum::<f64>();
    let ln_n = ln_fact(n);
    let amps = (1..=n)
        .map(|m| {
            let ln = 0.5 * (ln_n - ln_fact(m) - ln_fact(n - m))
                + 0.5 * m as f64 * mu.ln()
                + 0.5 * (n - m) as f64 * (1.0 - mu).ln();
            cr(norm * ln.exp())
        })
        .collect();
    SpectralAmplitude::with_carrier(amps, Carrier::Binomial { mu })
}

/// f_n ∝ √μ/(μ + i n), n = 1..N, normalized numerically.
pub fn lorentzian_amplitudes(n: usize, mu: f64) -> Result<SpectralAmplitude, SourceError> {
    if n == 0 {
        return Err(SourceError::Cutoff);
    }
    if !(mu > 0.0) {
        return Err(SourceError::LorentzianMu(mu));
    }
    let amps = (1..=n).map(|k| cr(mu.sqrt()) / c(mu, k as f64)).collect();
    SpectralAmplitude::with_carrier(amps, Carrier::Lorentzian { mu })
}

/// Σ_{n≥1} μ/(μ²+n²) = (π coth πμ − 1/μ)/2, the squared normalization of the
/// infinite Lorentzian.
pub fn lorentzian_norm_sqr(mu: f64) -> f64 {
    0.5 * (PI / (PI * mu).tanh() - 1.0 / mu)
}

/// Partial sum Σ_{n=1}^{N} μ/(μ²+n²).
pub fn lorentzian_partial_norm_sqr(n: usize, mu: f64) -> f64 {
    kahan_sum((1..=n).map(|k| mu / (mu * mu + (k * k) as f64)))
}

/// The closed form as printed, π e^{μπ}/(2 sinh μπ) − 1/(2μ). It exceeds the
/// infinite sum by π/2.
pub fn lorentzian_norm_printed(mu: f64) -> f64 {
    PI * (mu * PI).exp() / (2.0 * (mu * PI).sinh()) - 1.0 / (2.0 * mu)
}

/// n(t) = |Σ_k f_k e^{−ikt}|².
pub fn counting_rate(f: &SpectralAmplitude, t: f64) -> f64 {
    f.amplitudes
        .iter()
        .enumerate()
        .map(|(k, a)| a * cis(-((k + 1) as f64) * t))
        .sum::<C64>()
        .norm_sqr()
}

/// Detection probability per unit time for a detector of efficiency η.
pub fn detection_rate(f: &SpectralAmplitude, t: f64, eta: f64) -> f64 {
    eta * counting_rate(f, t)
}

/// (t, n(t)) on `points` samples of [−π, π).
pub fn counting_curve(f: &SpectralAmplitude, points: usize, exec: Exec) -> Vec<(f64, f64)> {
    exec.map_range(points, |i| {
        let t = -PI + 2.0 * PI * i as f64 / points as f64;
        (t, counting_rate(f, t))
    })
}

/// Time-bin index μ ∈ 1..=N with spacing τ = 2π/N.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeBin {
    pub index: usize,
    pub n: usize,
}

impl TimeBin {
    pub fn new(index: usize, n: usize) -> Result<Self, SourceError> {
        if n == 0 || index == 0 || index > n {
            return Err(SourceError::TimeBin { mu: index, nu: index, n });
        }
        Ok(TimeBin { index, n })
    }

    pub fn tau(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// g_μ(t) = N^{−1/2} [1 − e^{i(μτ − t)}]^{−1}.
    pub fn g(&self, t: f64) -> Result<C64, SourceError> {
        let arg = self.index as f64 * self.tau() - t;
        let wrapped = arg.rem_euclid(2.0 * PI);
        if wrapped < SINGULAR_GAP || 2.0 * PI - wrapped < SINGULAR_GAP {
            return Err(SourceError::Singular(t));
        }
        Ok(cr(1.0 / (self.n as f64).sqrt()) / (cr(1.0) - cis(arg)))
    }
}

/// Sample points closer than this to a pulse centre are rejected.
pub const SINGULAR_GAP: f64 = 1e-6;

/// G²(T) = |g_μ(t) g_ν(t+T) + g_ν(t) g_μ(t+T)|² for one photon in each of two
/// time bins.
pub fn two_photon_g2(mu: usize, nu: usize, t: f64, big_t: f64, n: usize) -> Result<f64, SourceError> {
    if mu == nu {
        return Err(SourceError::TimeBin { mu, nu, n });
    }
    let a = TimeBin::new(mu, n).map_err(|_| SourceError::TimeBin { mu, nu, n })?;
    let b = TimeBin::new(nu, n).map_err(|_| SourceError::TimeBin { mu, nu, n })?;
    let v = a.g(t)? * b.g(t + big_t)? + b.g(t)? * a.g(t + big_t)?;
    Ok(v.norm_sqr())
}

/// (T, G²) over one period, skipping singular points.
pub fn g2_curve(mu: usize, nu: usize, t: f64, n: usize, points: usize, exec: Exec) -> Vec<(f64, f64)> {
    exec.map_range(points, |i| {
        let big_t = 2.0 * PI * i as f64 / points as f64;
        two_photon_g2(mu, nu, t, big_t, n).ok().map(|g| (big_t, g))
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Coincidence probability behind a balanced beam splitter for two photons
/// with spectra α and β: C = ½ − ½|Σ α_n β_n*|².
pub fn hom_coincidence(alpha: &SpectralAmplitude, beta: &SpectralAmplitude) -> Result<f64, SourceError> {
    Ok(0.5 - 0.5 * alpha.overlap(beta)?.norm_sqr())
}

/// Same coincidence probability from a two-photon Fock simulation: modes
/// 0..N are frequencies of input a, N..2N of input b, and each frequency pair
/// meets on its own balanced splitter.
pub fn hom_coincidence_brute_force(alpha: &SpectralAmplitude, beta: &SpectralAmplitude) -> Result<f64, SourceError> {
    let n = alpha.cutoff();
    if beta.cutoff() != n {
        return Err(SourceError::Length(n, beta.cutoff()));
    }
    let modes = 2 * n;
    let mut input = PureState::zero(modes, 2);
    for (i, a) in alpha.amplitudes.iter().enumerate() {
        for (j, b) in beta.amplitudes.iter().enumerate() {
            let mut occ = vec![0u8; modes];
            occ[i] += 1;
            occ[n + j] += 1;
            input.add_term(OccupationVector::new(occ), a * b);
        }
    }
    let circuit: Vec<Element> = (0..n).map(|k| Element::rot(k, n + k, std::f64::consts::FRAC_PI_4)).collect();
    let out = apply_circuit(&input, &circuit)?;
    let a_side: Vec<usize> = (0..n).collect();
    let coincidence = out
        .iter()
        .filter(|(occ, _)| a_side.iter().map(|&m| occ.get(m) as usize).sum::<usize>() == 1)
        .map(|(_, amp)| amp.norm_sqr());
    Ok(kahan_sum(coincidence))
}

/// Gaussian spectrum centred on `centre` with standard deviation `width`.
pub fn gaussian_spectrum(n: usize, centre: f64, width: f64) -> Result<SpectralAmplitude, SourceError> {
    let amps = (1..=n)
        .map(|k| {
            let x = (k as f64 - centre) / width;
            cr((-0.25 * x * x).exp())
        })
        .collect();
    SpectralAmplitude::new(amps)
}

/// (delay, C) for a spectrum against delayed copies of itself.
pub fn hom_dip(f: &SpectralAmplitude, delays: &[f64], exec: Exec) -> Result<Vec<(f64, f64)>, SourceError> {
    exec.map(delays, |&d| hom_coincidence(f, &f.delayed(d)).map(|c| (d, c)))
        .into_iter()
        .collect()
}

/// √(1−|λ|²) Σ_{n≤max_pairs} λⁿ |n,n⟩ on (signal, idler).
pub fn pdc_state(lambda: C64, max_pairs: usize) -> Result<PureState, SourceError> {
    let l2 = lambda.norm_sqr();
    if !(l2 < 1.0) {
        return Err(SourceError::Lambda(l2.sqrt()));
    }
    let pre = (1.0 - l2).sqrt();
    let mut amp = cr(pre);
    let mut terms = Vec::with_capacity(max_pairs + 1);
    for n in 0..=max_pairs {
        terms.push((OccupationVector::new(vec![n as u8, n as u8]), amp));
        amp *= lambda;
    }
    Ok(PureState::from_terms(2, 2 * max_pairs, terms)?)
}

/// p(n) = (1−|λ|²)|λ|^{2n}.
pub fn pdc_pair_probability(lambda: C64, n: usize) -> f64 {
    let l2 = lambda.norm_sqr();
    (1.0 - l2) * l2.powi(n as i32)
}

/// Weight dropped by truncating at `max_pairs`: |λ|^{2(max_pairs+1)}.
pub fn pdc_truncation_error(lambda: C64, max_pairs: usize) -> f64 {
    lambda.norm_sqr().powi(max_pairs as i32 + 1)
}

#[derive(Clone, Debug)]
pub struct HeraldedPhoton {
    pub herald_probability: f64,
    pub signal: StateEnsemble,
    pub fidelity: f64,
}

/// Signal mode conditioned on the idler detector firing. A number-resolving
/// herald accepts exactly one count; a bucket herald accepts any click.
pub fn heralded_single_photon(lambda: C64, detector: &DetectorModel, max_pairs: usize) -> Result<HeraldedPhoton, SourceError> {
    let state = pdc_state(lambda, max_pairs)?;
    let det = DetectorModel {
        cutoff: detector.cutoff.max(state.cutoff()),
        ..*detector
    };
    let dist = measure_modes(&state, &[1], &det)?;
    let accept: u8 = 1;
    let outcome = dist.get(&[accept]).ok_or(SourceError::NoHerald)?;
    if outcome.probability <= 0.0 {
        return Err(SourceError::NoHerald);
    }
    let one = PureState::basis_state([1], state.cutoff())?;
    let fidelity = outcome.conditional.fidelity_with(&one)?;
    Ok(HeraldedPhoton {
        herald_probability: outcome.probability,
        signal: outcome.conditional.clone(),
        fidelity,
    })
}

/// Pair-number distribution read directly from a state, for cross-checks.
pub fn pair_distribution(state: &PureState) -> Vec<(usize, f64)> {
    split_by_counts(state, &[0])
        .into_iter()
        .map(|(k, (p, _))| (k[0] as usize, p))
        .collect()
}

/// Total-variation distance between the binomial weights at fixed carrier
/// Ω = μN and the Poisson(Ω) weights on frequencies ≥ 1.
pub fn poisson_distance(n: usize, omega: f64) -> Result<f64, SourceError> {
    let f = binomial_amplitudes(n, omega / n as f64)?;
    let w = f.weights();
    let mut pois = Vec::with_capacity(n);
    let mut p = (-omega).exp();
    for k in 1..=n {
        p *= omega / k as f64;
        pois.push(p);
    }
    let z: f64 = kahan_sum(pois.iter().copied());
    Ok(0.5 * kahan_sum(w.iter().zip(&pois).map(|(a, b)| (a - b / z).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn binomial_normalized_and_peaked() {
        let f = binomial_amplitudes(100, 0.05).unwrap();
        assert!((f.norm_sqr() - 1.0).abs() < 1e-10);
        assert_eq!(f.dominant_frequency(), 5);
        let peak = counting_rate(&f, 0.0);
        assert!(peak > counting_rate(&f, 1.0));
        assert!((counting_rate(&f, 0.3) - counting_rate(&f, 0.3 + 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_norm() {
        let partial = lorentzian_partial_norm_sqr(1000, 1.0);
        let closed = lorentzian_norm_sqr(1.0);
        assert!((partial.sqrt() / closed.sqrt() - 1.0).abs() < 0.01);
        assert!((lorentzian_norm_printed(1.0) - closed - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn hom_matches_fock() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..3 {
            let a = SpectralAmplitude::random(3, &mut rng).unwrap();
            let b = SpectralAmplitude::random(3, &mut rng).unwrap();
            let x = hom_coincidence(&a, &b).unwrap();
            let y = hom_coincidence_brute_force(&a, &b).unwrap();
            assert!((x - y).abs() < 1e-12, "{x} {y}");
        }
    }

    #[test]
    fn herald_fidelity() {
        let h = heralded_single_photon(cr(0.01), &DetectorModel::bucket(1.0, 8), 8).unwrap();
        assert!((h.fidelity - 0.9999).abs() < 1e-12);
        let h = heralded_single_photon(cr(0.3), &DetectorModel::ideal(8), 8).unwrap();
        assert!((h.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pdc_pairs() {
        assert!((pdc_pair_probability(cr(0.1), 1) - 0.0099).abs() < 1e-15);
        let s = pdc_state(cr(0.0), 4).unwrap();
        assert!((s.amp(&[0, 0]).re - 1.0).abs() < 1e-15);
    }
}
