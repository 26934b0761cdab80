use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use loqc::exec::trial_rng;
use loqc::linalg::{c, CMatrix};
use loqc::measure::{measure_modes, post_select, DetectorModel};
use loqc::optics::{apply_circuit, PbsBasis};
use loqc::{Element, ModeUnitary, OccupationVector, PureState};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::CliError;
use crate::report::render;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub modes: usize,
    pub cutoff: usize,
    pub input: Vec<InputTerm>,
    #[serde(default)]
    pub elements: Vec<ElementSpec>,
    /// Ideal count pattern on some modes; the rest are renormalized.
    pub postselect: Option<PatternSpec>,
    pub measure: Option<MeasureSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputTerm {
    pub occupation: Vec<u8>,
    /// [re, im]
    pub amplitude: [f64; 2],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementSpec {
    Bs {
        modes: [usize; 2],
        theta: f64,
        #[serde(default = "half_pi")]
        phi: f64,
    },
    Phase {
        mode: usize,
        phi: f64,
    },
    Pbs {
        modes: [usize; 4],
        #[serde(default)]
        basis: PbsKind,
    },
    CrossKerr {
        modes: [usize; 2],
        tau: f64,
    },
    Unitary {
        modes: Vec<usize>,
        /// Rows of [re, im] entries; column j is the image of mode j.
        matrix: Vec<Vec<[f64; 2]>>,
    },
}

fn half_pi() -> f64 {
    FRAC_PI_2
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PbsKind {
    #[default]
    Hv,
    Diagonal,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    pub modes: Vec<usize>,
    pub pattern: Vec<u8>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub modes: Vec<usize>,
    #[serde(default)]
    pub detector: DetectorSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    #[serde(default)]
    pub kind: DetectorKindSpec,
    #[serde(default = "one")]
    pub efficiency: f64,
    #[serde(default)]
    pub dark_mean: f64,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        DetectorSpec {
            kind: DetectorKindSpec::Resolving,
            efficiency: 1.0,
            dark_mean: 0.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKindSpec {
    #[default]
    Resolving,
    Bucket,
}

#[derive(Clone, Debug, Serialize)]
pub struct Amplitude {
    pub occupation: Vec<u8>,
    pub amplitude: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct OutcomeRow {
    pub signature: Vec<u8>,
    pub probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircuitReport {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub postselect_probability: Option<f64>,
    /// Output state when nothing is measured.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub state: Vec<Amplitude>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outcomes: Vec<OutcomeRow>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Circuit(msg.into())
}

impl CircuitFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| bad(e.to_string()))
    }

    fn input_state(&self) -> Result<PureState, CliError> {
        if self.input.is_empty() {
            return Err(bad("input has no terms"));
        }
        let terms = self
            .input
            .iter()
            .map(|t| {
                if t.occupation.len() != self.modes {
                    return Err(bad(format!(
                        "occupation {:?} has {} modes, circuit has {}",
                        t.occupation,
                        t.occupation.len(),
                        self.modes
                    )));
                }
                Ok((OccupationVector::new(t.occupation.clone()), c(t.amplitude[0], t.amplitude[1])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let s = PureState::from_terms(self.modes, self.cutoff, terms).map_err(|e| bad(e.to_string()))?;
        s.normalized().map_err(|e| bad(e.to_string()))
    }

    fn elements(&self) -> Result<Vec<Element>, CliError> {
        self.elements
            .iter()
            .map(|e| {
                Ok(match e {
                    ElementSpec::Bs { modes, theta, phi } => Element::bs(modes[0], modes[1], *theta, *phi),
                    ElementSpec::Phase { mode, phi } => Element::phase(*mode, *phi),
                    ElementSpec::Pbs { modes, basis } => Element::PolarizingBs {
                        modes: *modes,
                        basis: match basis {
                            PbsKind::Hv => PbsBasis::HV,
                            PbsKind::Diagonal => PbsBasis::Diagonal,
                        },
                    },
                    ElementSpec::CrossKerr { modes, tau } => Element::CrossKerr { modes: *modes, tau: *tau },
                    ElementSpec::Unitary { modes, matrix } => {
                        let n = modes.len();
                        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                            return Err(bad(format!("unitary on {n} modes needs an {n}x{n} matrix")));
                        }
                        let m = CMatrix::from_fn(n, n, |r, col| c(matrix[r][col][0], matrix[r][col][1]));
                        let u = ModeUnitary::new(m).map_err(|e| bad(e.to_string()))?;
                        Element::Unitary { modes: modes.clone(), u }
                    }
                })
            })
            .collect()
    }
}

/// Simulates a circuit file. With `trials`, also samples that many
/// detector records from `seed`.
pub fn run_circuit(file: &CircuitFile, seed: Option<u64>, trials: Option<u64>) -> Result<CircuitReport, CliError> {
    let mut state = file.input_state()?;
    let elements = file.elements()?;
    state = apply_circuit(&state, &elements).map_err(|e| bad(e.to_string()))?;

    let mut remaining: Vec<usize> = (0..file.modes).collect();
    let mut postselect_probability = None;
    if let Some(ps) = &file.postselect {
        let sel = post_select(&state, &ps.modes, &ps.pattern).map_err(|e| bad(e.to_string()))?;
        postselect_probability = Some(sel.probability);
        state = sel
            .state
            .ok_or_else(|| bad(format!("post-selection pattern {:?} never occurs", ps.pattern)))?;
        remaining.retain(|m| !ps.modes.contains(m));
    }

    let mut report = CircuitReport {
        tool: "loqc".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        trials,
        postselect_probability,
        state: Vec::new(),
        outcomes: Vec::new(),
    };

    let Some(ms) = &file.measure else {
        if trials.is_some() {
            return Err(bad("sampling needs a \"measure\" block"));
        }
        let mut amps: Vec<Amplitude> = state
            .iter()
            .filter(|(_, a)| a.norm_sqr() > 1e-24)
            .map(|(k, a)| Amplitude {
                occupation: k.counts().to_vec(),
                amplitude: [a.re, a.im],
            })
            .collect();
        amps.sort_by(|a, b| a.occupation.cmp(&b.occupation));
        report.state = amps;
        return Ok(report);
    };

    // measured modes are given in the original numbering
    let local: Vec<usize> = ms
        .modes
        .iter()
        .map(|m| {
            remaining
                .iter()
                .position(|r| r == m)
                .ok_or_else(|| bad(format!("mode {m} is not available for measurement")))
        })
        .collect::<Result<_, _>>()?;
    let d = &ms.detector;
    let mut det = match d.kind {
        DetectorKindSpec::Resolving => DetectorModel::number_resolving(d.efficiency, state.cutoff()),
        DetectorKindSpec::Bucket => DetectorModel::bucket(d.efficiency, state.cutoff()),
    };
    if d.dark_mean > 0.0 {
        det = det.with_dark_counts(d.dark_mean);
    }
    let dist = measure_modes(&state, &local, &det).map_err(|e| bad(e.to_string()))?;
    let mut rows: Vec<OutcomeRow> = dist
        .entries
        .iter()
        .map(|o| OutcomeRow {
            signature: o.signature.clone(),
            probability: o.probability,
            count: None,
        })
        .collect();

    if let Some(n) = trials {
        let seed = seed.ok_or_else(|| bad("sampling needs --seed"))?;
        let cdf: Vec<f64> = rows
            .iter()
            .scan(0.0, |acc, r| {
                *acc += r.probability;
                Some(*acc)
            })
            .collect();
        let total = cdf.last().copied().unwrap_or(0.0);
        let mut counts = vec![0u64; rows.len()];
        for t in 0..n {
            let u: f64 = trial_rng(seed, t).random::<f64>() * total;
            let k = cdf.partition_point(|&x| x <= u).min(rows.len() - 1);
            counts[k] += 1;
        }
        for (r, k) in rows.iter_mut().zip(counts) {
            r.count = Some(k);
        }
    }
    report.outcomes = rows;
    Ok(report)
}

pub fn render_circuit(report: &CircuitReport, format: Format) -> Result<Vec<u8>, CliError> {
    render(report, format, || {
        let sig = |v: &[u8]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        if report.outcomes.is_empty() {
            let mut rows = vec![vec!["occupation".into(), "re".into(), "im".into()]];
            rows.extend(
                report
                    .state
                    .iter()
                    .map(|a| vec![sig(&a.occupation), a.amplitude[0].to_string(), a.amplitude[1].to_string()]),
            );
            return rows;
        }
        let mut rows = vec![vec!["signature".into(), "probability".into(), "count".into()]];
        rows.extend(report.outcomes.iter().map(|o| {
            vec![
                sig(&o.signature),
                o.probability.to_string(),
                o.count.map(|k| k.to_string()).unwrap_or_default(),
            ]
        }));
        rows
    })
}
