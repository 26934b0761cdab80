//! Probabilistic linear-optics gates as heralded circuits, and a runner that
//! extracts their heralded action and success probability.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use thiserror::Error;

use crate::fock::{OccupationVector, PureState, DEFAULT_CUTOFF};
use crate::linalg::{c, cnot, cr, cz, hadamard, kron_all, operator_overlap, CMatrix};
use crate::measure::MeasureError;
use crate::optics::{apply_circuit, Element, ModeUnitary, OpticsError, PbsBasis};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("encoding mode {0} overlaps another register")]
    Overlap(usize),
    #[error("ideal matrix is {rows}x{cols}, expected {want_rows}x{want_cols}")]
    IdealShape {
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("herald {0:?} has a correction list of the wrong length")]
    Correction(Vec<u8>),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Fock(#[from] crate::fock::FockError),
}

/// How a logical register sits in optical modes.
#[derive(Clone, Debug, PartialEq)]
pub enum Encoding {
    DualRail { zero: usize, one: usize },
    /// H on `h`, V on `h + 1`.
    Polarization { h: usize },
    /// Vacuum is 0, one photon is 1.
    SingleRail { mode: usize },
    /// Photon numbers 0..levels on a single mode.
    Fock { mode: usize, levels: usize },
}

impl Encoding {
    pub fn dim(&self) -> usize {
        match self {
            Encoding::Fock { levels, .. } => *levels,
            _ => 2,
        }
    }

    pub fn modes(&self) -> Vec<usize> {
        match self {
            Encoding::DualRail { zero, one } => vec![*zero, *one],
            Encoding::Polarization { h } => vec![*h, h + 1],
            Encoding::SingleRail { mode } | Encoding::Fock { mode, .. } => vec![*mode],
        }
    }

    /// Photon counts on `modes()` for logical value `v`.
    pub fn counts(&self, v: usize) -> Vec<u8> {
        match self {
            Encoding::DualRail { .. } | Encoding::Polarization { .. } => {
                if v == 0 {
                    vec![1, 0]
                } else {
                    vec![0, 1]
                }
            }
            Encoding::SingleRail { .. } | Encoding::Fock { .. } => vec![v as u8],
        }
    }

    fn is_qubit(&self) -> bool {
        self.dim() == 2
    }
}

/// Total logical dimension of a register list.
pub fn register_dim(regs: &[Encoding]) -> usize {
    regs.iter().map(Encoding::dim).product()
}

/// Mixed-radix digits of `index`, first register most significant.
pub fn digits(regs: &[Encoding], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; regs.len()];
    for (i, r) in regs.iter().enumerate().rev() {
        out[i] = index % r.dim();
        index /= r.dim();
    }
    out
}

/// Single-qubit Pauli correction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fix {
    I,
    X,
    Z,
    /// X·Z
    XZ,
}

impl Fix {
    pub fn matrix(self) -> CMatrix {
        let o = cr(1.0);
        let z = cr(0.0);
        match self {
            Fix::I => CMatrix::identity(2, 2),
            Fix::X => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            Fix::Z => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
            Fix::XZ => CMatrix::from_row_slice(2, 2, &[z, -o, o, z]),
        }
    }
}

/// One accepted detector signature with its classical correction.
#[derive(Clone, Debug, PartialEq)]
pub struct Herald {
    pub signature: Vec<u8>,
    /// One entry per output qubit, or empty for no correction.
    pub fixes: Vec<Fix>,
    /// Target action for this signature when it differs from the gate default.
    pub target: Option<CMatrix>,
}

impl Herald {
    pub fn plain(signature: Vec<u8>) -> Self {
        Herald {
            signature,
            fixes: Vec::new(),
            target: None,
        }
    }

    pub fn fixed(signature: Vec<u8>, fixes: Vec<Fix>) -> Self {
        Herald {
            signature,
            fixes,
            target: None,
        }
    }
}

/// A heralded gate: registers, ancilla preparation, optics, detection.
#[derive(Clone, Debug)]
pub struct CircuitSpec {
    pub name: String,
    pub modes: usize,
    pub cutoff: usize,
    pub inputs: Vec<Encoding>,
    pub outputs: Vec<Encoding>,
    pub ancilla: PureState,
    pub ancilla_modes: Vec<usize>,
    pub elements: Vec<Element>,
    pub detected: Vec<usize>,
    pub heralds: Vec<Herald>,
    /// Ideal logical action, output dimension × input dimension.
    pub ideal: CMatrix,
    pub declared_success: f64,
    /// Verified only on the post-selected output subspace.
    pub destructive: bool,
}

#[derive(Clone, Debug)]
pub struct SignatureReport {
    pub signature: Vec<u8>,
    pub fixes: Vec<Fix>,
    /// Heralded action before correction.
    pub raw_action: CMatrix,
    /// Heralded action after correction.
    pub action: CMatrix,
    /// Herald probability averaged over the logical input basis.
    pub probability: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct GateReport {
    pub name: String,
    pub declared_success: f64,
    pub measured_success: f64,
    /// Probability-weighted action fidelity over accepted signatures.
    pub action_fidelity: f64,
    /// Heralded weight that fell outside the logical output space.
    pub leakage: f64,
    pub signatures: Vec<SignatureReport>,
}

impl GateReport {
    pub fn passes(&self, success_tol: f64, fidelity_tol: f64) -> bool {
        (self.measured_success - self.declared_success).abs() <= success_tol
            && self.action_fidelity >= 1.0 - fidelity_tol
    }

    pub fn signature(&self, sig: &[u8]) -> Option<&SignatureReport> {
        self.signatures.iter().find(|s| s.signature == sig)
    }

    /// Unnormalized heralded output for a logical input vector, per signature.
    pub fn outputs_for(&self, input: &nalgebra::DVector<crate::C64>) -> Vec<(Vec<u8>, nalgebra::DVector<crate::C64>)> {
        self.signatures
            .iter()
            .map(|s| (s.signature.clone(), &s.action * input))
            .collect()
    }
}

impl CircuitSpec {
    pub fn validate(&self) -> Result<(), GateError> {
        let mut used: Vec<usize> = Vec::new();
        for m in self
            .inputs
            .iter()
            .flat_map(Encoding::modes)
            .chain(self.ancilla_modes.iter().copied())
        {
            if used.contains(&m) {
                return Err(GateError::Overlap(m));
            }
            if m >= self.modes {
                return Err(OpticsError::ModeOutOfRange { mode: m, modes: self.modes }.into());
            }
            used.push(m);
        }
        for e in &self.elements {
            e.validate(self.modes)?;
        }
        let (want_rows, want_cols) = (register_dim(&self.outputs), register_dim(&self.inputs));
        if self.ideal.nrows() != want_rows || self.ideal.ncols() != want_cols {
            return Err(GateError::IdealShape {
                rows: self.ideal.nrows(),
                cols: self.ideal.ncols(),
                want_rows,
                want_cols,
            });
        }
        let qubits = self.outputs.len();
        for h in &self.heralds {
            if !h.fixes.is_empty() && (h.fixes.len() != qubits || !self.outputs.iter().all(Encoding::is_qubit)) {
                return Err(GateError::Correction(h.signature.clone()));
            }
        }
        Ok(())
    }

    /// Full optical input for logical basis index `b`.
    pub fn input_state(&self, b: usize) -> Result<PureState, GateError> {
        let ds = digits(&self.inputs, b);
        let mut counts = vec![0u8; self.modes];
        for (reg, v) in self.inputs.iter().zip(ds) {
            for (m, n) in reg.modes().into_iter().zip(reg.counts(v)) {
                counts[m] = n;
            }
        }
        let sys = PureState::basis_state(OccupationVector::new(counts), self.cutoff)?;
        let all: Vec<usize> = (0..self.modes).collect();
        Ok(PureState::product_on(
            &[(&sys, &all), (&self.ancilla, &self.ancilla_modes)],
            self.modes,
            self.cutoff,
        )?)
    }

    /// Occupation of the undetected modes for logical output index `a`.
    fn output_occupation(&self, a: usize, remaining: &[usize]) -> OccupationVector {
        let ds = digits(&self.outputs, a);
        let mut counts = vec![0u8; remaining.len()];
        for (reg, v) in self.outputs.iter().zip(ds) {
            for (m, n) in reg.modes().into_iter().zip(reg.counts(v)) {
                let pos = remaining.iter().position(|&r| r == m).expect("output mode is detected");
                counts[pos] = n;
            }
        }
        OccupationVector::new(counts)
    }

    fn correction(&self, h: &Herald) -> CMatrix {
        if h.fixes.is_empty() {
            CMatrix::identity(register_dim(&self.outputs), register_dim(&self.outputs))
        } else {
            kron_all(&h.fixes.iter().map(|f| f.matrix()).collect::<Vec<_>>())
        }
    }
}

/// Enumerates the logical input basis through the circuit and compares each
/// heralded action with the ideal gate.
pub fn run_gate(spec: &CircuitSpec) -> Result<GateReport, GateError> {
    spec.validate()?;
    let din = register_dim(&spec.inputs);
    let dout = register_dim(&spec.outputs);
    let remaining: Vec<usize> = (0..spec.modes).filter(|m| !spec.detected.contains(m)).collect();
    let out_occ: Vec<OccupationVector> = (0..dout).map(|a| spec.output_occupation(a, &remaining)).collect();

    let evolved: Vec<PureState> = (0..din)
        .map(|b| Ok(apply_circuit(&spec.input_state(b)?, &spec.elements)?))
        .collect::<Result<_, GateError>>()?;

    let mut signatures = Vec::new();
    let mut success = 0.0;
    let mut weighted_fid = 0.0;
    let mut leakage = 0.0;
    for h in &spec.heralds {
        let mut raw = CMatrix::zeros(dout, din);
        let mut heralded_norm = 0.0;
        for (b, out) in evolved.iter().enumerate() {
            let proj = out.project(&spec.detected, &h.signature);
            heralded_norm += proj.norm_sqr();
            for (a, occ) in out_occ.iter().enumerate() {
                raw[(a, b)] = proj.amplitude(occ);
            }
        }
        let action = spec.correction(h) * &raw;
        let inside = (action.adjoint() * &action).trace().re;
        let norm = if spec.destructive { inside } else { heralded_norm };
        leakage += (heralded_norm - inside) / din as f64;
        let target = h.target.as_ref().unwrap_or(&spec.ideal);
        let fidelity = if norm > 0.0 {
            operator_overlap(target, &action) * inside / norm
        } else {
            0.0
        };
        let probability = norm / din as f64;
        success += probability;
        weighted_fid += probability * fidelity;
        signatures.push(SignatureReport {
            signature: h.signature.clone(),
            fixes: h.fixes.clone(),
            raw_action: raw,
            action,
            probability,
            fidelity,
        });
    }
    Ok(GateReport {
        name: spec.name.clone(),
        declared_success: spec.declared_success,
        measured_success: success,
        action_fidelity: if success > 0.0 { weighted_fid / success } else { 0.0 },
        leakage: if spec.destructive { 0.0 } else { leakage },
        signatures,
    })
}

fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| cr(v)),
    ))
}

fn fock_ancilla(counts: &[u8]) -> PureState {
    PureState::basis_state(OccupationVector::from_slice(counts), DEFAULT_CUTOFF).expect("ancilla within cutoff")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NsVariant {
    Klm,
    Ralph,
    RudolphPan,
}

/// KLM NS beam splitter angles: cos²θ are the printed transmissions.
pub fn klm_ns_angles() -> (f64, f64) {
    let eta1 = 1.0 / (4.0 - 2.0 * 2f64.sqrt());
    let eta2 = 3.0 - 2.0 * 2f64.sqrt();
    (eta1.sqrt().acos(), eta2.sqrt().acos())
}

/// Exact (σ, θ) for the two-splitter NS gate. Success is cos²θ = (3−√2)/7.
pub fn ralph_ns_angles() -> (f64, f64) {
    let u = (4.0 + 2f64.sqrt()) / 7.0;
    let theta = u.sqrt().asin();
    let sigma = (theta.cos() / (1.0 - 2.0 * u)).acos();
    (sigma, theta)
}

/// σ ≈ 150.5°, θ ≈ 61.5°
pub const RUDOLPH_PAN_ROUNDED: (f64, f64) = (150.5, 61.5);

pub fn ns_success(variant: NsVariant) -> f64 {
    match variant {
        NsVariant::Klm => 0.25,
        NsVariant::Ralph | NsVariant::RudolphPan => (3.0 - 2f64.sqrt()) / 7.0,
    }
}

/// Elements of an NS gate acting on `mode`, with ancillas on `anc[0]` and `anc[1]`.
/// Returns the elements, ancilla photon counts and herald pattern.
fn ns_parts(variant: NsVariant, mode: usize, anc: [usize; 2]) -> (Vec<Element>, [u8; 2], [u8; 2]) {
    match variant {
        NsVariant::Klm => {
            let (t1, t2) = klm_ns_angles();
            (
                vec![
                    Element::phase(mode, PI),
                    Element::rot(anc[0], anc[1], t1),
                    Element::rot(mode, anc[0], t2),
                    Element::rot(anc[0], anc[1], -t1),
                ],
                [1, 0],
                [1, 0],
            )
        }
        NsVariant::Ralph => {
            let (sigma, theta) = ralph_ns_angles();
            (
                vec![Element::rot(mode, anc[0], sigma), Element::rot(mode, anc[1], theta)],
                [0, 1],
                [0, 1],
            )
        }
        NsVariant::RudolphPan => {
            let (s, t) = RUDOLPH_PAN_ROUNDED;
            rudolph_pan_parts(s.to_radians(), t.to_radians(), mode, anc)
        }
    }
}

/// Polarization-rotation form: the first rotation acts on the (H, V) pair of
/// the signal path, the second mixes the signal with a single photon.
fn rudolph_pan_parts(sigma: f64, theta: f64, mode: usize, anc: [usize; 2]) -> (Vec<Element>, [u8; 2], [u8; 2]) {
    (
        vec![
            Element::Unitary {
                modes: vec![mode, anc[0]],
                u: ModeUnitary::polarization_rotation(sigma, FRAC_PI_2),
            },
            Element::rot(mode, anc[1], theta),
        ],
        [0, 1],
        [0, 1],
    )
}

fn ns_spec(name: &str, elements: Vec<Element>, anc: [u8; 2], pattern: [u8; 2], success: f64) -> CircuitSpec {
    CircuitSpec {
        name: name.into(),
        modes: 3,
        cutoff: DEFAULT_CUTOFF,
        inputs: vec![Encoding::Fock { mode: 0, levels: 3 }],
        outputs: vec![Encoding::Fock { mode: 0, levels: 3 }],
        ancilla: fock_ancilla(&anc),
        ancilla_modes: vec![1, 2],
        elements,
        detected: vec![1, 2],
        heralds: vec![Herald::plain(pattern.to_vec())],
        ideal: diag(&[1.0, 1.0, -1.0]),
        declared_success: success,
        destructive: false,
    }
}

/// α|0⟩ + β|1⟩ + γ|2⟩ ↦ α|0⟩ + β|1⟩ − γ|2⟩ on mode 0, ancillas on modes 1 and 2.
pub fn ns_gate(variant: NsVariant) -> CircuitSpec {
    let (elements, anc, pattern) = ns_parts(variant, 0, [1, 2]);
    let name = match variant {
        NsVariant::Klm => "ns-klm",
        NsVariant::Ralph => "ns-ralph",
        NsVariant::RudolphPan => "ns-rudolph-pan",
    };
    ns_spec(name, elements, anc, pattern, ns_success(variant))
}

/// Polarization-rotation NS gate at arbitrary angles (radians).
pub fn ns_rudolph_pan_with(sigma: f64, theta: f64) -> CircuitSpec {
    let (elements, anc, pattern) = rudolph_pan_parts(sigma, theta, 0, [1, 2]);
    ns_spec("ns-rudolph-pan", elements, anc, pattern, ns_success(NsVariant::RudolphPan))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CzVariant {
    TwoNs,
    /// Printed angles, rounded to two decimals.
    Knill,
    /// Closed-form angles.
    KnillRefined,
    Kerr,
}

/// θ = arccos(1/√3), φ = arccos √((3+√6)/6)
pub fn knill_refined_angles() -> (f64, f64) {
    (
        (1.0 / 3f64.sqrt()).acos(),
        ((3.0 + 6f64.sqrt()) / 6.0).sqrt().acos(),
    )
}

pub const KNILL_PRINTED_DEGREES: (f64, f64) = (54.74, 17.63);

pub fn cz_gate(variant: CzVariant) -> CircuitSpec {
    match variant {
        CzVariant::TwoNs => cz_two_ns(),
        CzVariant::Knill => {
            let (t, p) = KNILL_PRINTED_DEGREES;
            cz_knill(t.to_radians(), p.to_radians(), "cz-knill")
        }
        CzVariant::KnillRefined => {
            let (t, p) = knill_refined_angles();
            cz_knill(t, p, "cz-knill-refined")
        }
        CzVariant::Kerr => cz_kerr(),
    }
}

/// Dual-rail qubits: q1 on (zero 1, one 0), q2 on (zero 3, one 2). The one
/// rails meet on a balanced splitter, pass an NS gate each, and recombine.
fn cz_two_ns() -> CircuitSpec {
    let mut elements = vec![Element::rot(0, 2, FRAC_PI_4)];
    let (ns_a, anc_a, pat_a) = ns_parts(NsVariant::Klm, 0, [4, 5]);
    let (ns_b, anc_b, pat_b) = ns_parts(NsVariant::Klm, 2, [6, 7]);
    elements.extend(ns_a);
    elements.extend(ns_b);
    elements.push(Element::rot(0, 2, -FRAC_PI_4));
    CircuitSpec {
        name: "cz-two-ns".into(),
        modes: 8,
        cutoff: DEFAULT_CUTOFF,
        inputs: vec![
            Encoding::DualRail { zero: 1, one: 0 },
            Encoding::DualRail { zero: 3, one: 2 },
        ],
        outputs: vec![
            Encoding::DualRail { zero: 1, one: 0 },
            Encoding::DualRail { zero: 3, one: 2 },
        ],
        ancilla: fock_ancilla(&[anc_a[0], anc_a[1], anc_b[0], anc_b[1]]),
        ancilla_modes: vec![4, 5, 6, 7],
        elements,
        detected: vec![4, 5, 6, 7],
        heralds: vec![Herald::plain(vec![pat_a[0], pat_a[1], pat_b[0], pat_b[1]])],
        ideal: cz(),
        declared_success: 1.0 / 16.0,
        destructive: false,
    }
}

/// Modes: c0 = 0, c1 = 1, ancillas 2 and 3, t1 = 4, t0 = 5.
fn cz_knill(theta: f64, phi: f64, name: &str) -> CircuitSpec {
    let elements = vec![
        Element::rot(1, 2, theta),
        Element::rot(3, 4, theta),
        Element::rot(2, 3, phi),
        Element::rot(1, 4, theta),
        // The bare network gives diag(1, −1, −1, −1); local phases turn it into CZ.
        Element::phase(1, PI),
        Element::phase(4, PI),
    ];
    CircuitSpec {
        name: name.into(),
        modes: 6,
        cutoff: DEFAULT_CUTOFF,
        inputs: vec![
            Encoding::DualRail { zero: 0, one: 1 },
            Encoding::DualRail { zero: 5, one: 4 },
        ],
        outputs: vec![
            Encoding::DualRail { zero: 0, one: 1 },
            Encoding::DualRail { zero: 5, one: 4 },
        ],
        ancilla: fock_ancilla(&[1, 1]),
        ancilla_modes: vec![2, 3],
        elements,
        detected: vec![2, 3],
        heralds: vec![Herald::plain(vec![1, 1])],
        ideal: cz(),
        declared_success: 2.0 / 27.0,
        destructive: false,
    }
}

/// Polarization qubits; a cross-Kerr phase of π between the two V modes.
fn cz_kerr() -> CircuitSpec {
    CircuitSpec {
        name: "cz-kerr".into(),
        modes: 4,
        cutoff: DEFAULT_CUTOFF,
        inputs: vec![Encoding::Polarization { h: 0 }, Encoding::Polarization { h: 2 }],
        outputs: vec![Encoding::Polarization { h: 0 }, Encoding::Polarization { h: 2 }],
        ancilla: PureState::vacuum(0, DEFAULT_CUTOFF),
        ancilla_modes: vec![],
        elements: vec![Element::CrossKerr { modes: [1, 3], tau: PI }],
        detected: vec![],
        heralds: vec![Herald::plain(vec![])],
        ideal: cz(),
        declared_success: 1.0,
        destructive: false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CnotVariant {
    RalphCoincidence,
    PittmanAncilla,
}

pub fn cnot_gate(variant: CnotVariant) -> CircuitSpec {
    match variant {
        CnotVariant::RalphCoincidence => cnot_ralph(),
        CnotVariant::PittmanAncilla => cnot_pittman(),
    }
}

/// Dual-rail control (0, 1) and target (2, 3); vacuum on 4 and 5.
/// Splitters of reflectivity 1/3 between c1 and t1 and from c0 and t0 into
/// the vacuum modes, between balanced splitters on the target.
fn cnot_ralph() -> CircuitSpec {
    let third = (1.0 / 3f64.sqrt()).acos();
    CircuitSpec {
        name: "cnot-ralph".into(),
        modes: 6,
        cutoff: DEFAULT_CUTOFF,
        inputs: vec![
            Encoding::DualRail { zero: 0, one: 1 },
            Encoding::DualRail { zero: 2, one: 3 },
        ],
        outputs: vec![
            Encoding::DualRail { zero: 0, one: 1 },
            Encoding::DualRail { zero: 2, one: 3 },
        ],
        ancilla: PureState::vacuum(2, DEFAULT_CUTOFF),
        ancilla_modes: vec![4, 5],
        elements: vec![
            Element::rot(2, 3, FRAC_PI_4),
            Element::rot(1, 3, third),
            Element::rot(0, 4, third),
            Element::rot(2, 5, third),
            Element::rot(2, 3, -FRAC_PI_4),
        ],
        detected: vec![],
        heralds: vec![Herald::plain(vec![])],
        ideal: cnot(),
        declared_success: 1.0 / 9.0,
        destructive: true,
    }
}

/// Polarization control on spatial mode 0 (modes 0, 1), target on 1 (2, 3),
/// Bell ancilla |Φ+⟩ on spatial modes 2 (4, 5) and 3 (6, 7).
fn cnot_pittman() -> CircuitSpec {
    let h = 0.5f64.sqrt();
    let ancilla = PureState::from_terms(
        4,
        DEFAULT_CUTOFF,
        [
            (OccupationVector::from([1, 0, 1, 0]), cr(h)),
            (OccupationVector::from([0, 1, 0, 1]), cr(h)),
        ],
    )
    .expect("Bell pair");
    CircuitSpec {
        name: "cnot-pittman".into(),
        modes: 8,
        cutoff: DEFAULT_CUTOFF,
        inputs: vec![Encoding::Polarization { h: 0 }, Encoding::Polarization { h: 2 }],
        outputs: vec![Encoding::Polarization { h: 0 }, Encoding::Polarization { h: 2 }],
        ancilla,
        ancilla_modes: vec![4, 5, 6, 7],
        elements: vec![
            Element::PolarizingBs { modes: [0, 1, 4, 5], basis: PbsBasis::HV },
            Element::PolarizingBs { modes: [6, 7, 2, 3], basis: PbsBasis::Diagonal },
            // Diagonal-basis analysis of the first ancilla output.
            Element::rot(4, 5, FRAC_PI_4),
        ],
        detected: vec![4, 5, 6, 7],
        heralds: pittman_heralds(),
        ideal: cnot(),
        declared_success: 0.25,
        destructive: false,
    }
}

/// Corrections per (diagonal detector, H/V detector) signature, derived by
/// searching all Pauli pairs on the simulated heralded action.
pub fn pittman_heralds() -> Vec<Herald> {
    vec![
        Herald::fixed(vec![1, 0, 1, 0], vec![Fix::I, Fix::I]),
        Herald::fixed(vec![1, 0, 0, 1], vec![Fix::I, Fix::X]),
        Herald::fixed(vec![0, 1, 1, 0], vec![Fix::Z, Fix::I]),
        Herald::fixed(vec![0, 1, 0, 1], vec![Fix::Z, Fix::X]),
    ]
}

/// |q1 q2⟩ ↦ |q1⟩ δ_{q1 q2}: the two-to-one parity projection.
fn parity_projection(sign: f64) -> CMatrix {
    let mut m = CMatrix::zeros(2, 4);
    m[(0, 0)] = cr(0.5f64.sqrt());
    m[(1, 3)] = cr(sign * 0.5f64.sqrt());
    m
}

fn pbs_parity_circuit(name: &str, heralds: Vec<Herald>) -> CircuitSpec {
    CircuitSpec {
        name: name.into(),
        modes: 4,
        cutoff: DEFAULT_CUTOFF,
        inputs: vec![Encoding::Polarization { h: 0 }, Encoding::Polarization { h: 2 }],
        outputs: vec![Encoding::Polarization { h: 0 }],
        ancilla: PureState::vacuum(0, DEFAULT_CUTOFF),
        ancilla_modes: vec![],
        elements: vec![
            Element::PolarizingBs { modes: [0, 1, 2, 3], basis: PbsBasis::HV },
            Element::rot(2, 3, -FRAC_PI_4),
        ],
        detected: vec![2, 3],
        heralds,
        ideal: parity_projection(1.0),
        declared_success: 0.5,
        destructive: false,
    }
}

/// Two polarization qubits meet on a PBS; one output is analysed in the
/// diagonal basis and the other carries the surviving qubit.
pub fn parity_check() -> CircuitSpec {
    pbs_parity_circuit(
        "parity-check",
        vec![
            Herald::fixed(vec![1, 0], vec![Fix::Z]),
            Herald::fixed(vec![0, 1], vec![Fix::I]),
        ],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FusionVariant {
    Type1,
    Type2,
}

pub fn fusion(variant: FusionVariant) -> CircuitSpec {
    match variant {
        FusionVariant::Type1 => {
            let mut h = Herald::plain(vec![1, 0]);
            h.target = Some(parity_projection(-1.0));
            let mut v = Herald::plain(vec![0, 1]);
            v.target = Some(parity_projection(1.0));
            CircuitSpec {
                name: "fusion-1".into(),
                ..pbs_parity_circuit("fusion-1", vec![h, v])
            }
        }
        FusionVariant::Type2 => fusion_type2(),
    }
}

fn bell_bra(sign: f64, odd: bool) -> CMatrix {
    let h = 0.5f64.sqrt();
    let mut m = CMatrix::zeros(1, 4);
    if odd {
        m[(0, 1)] = cr(h);
        m[(0, 2)] = cr(sign * h);
    } else {
        m[(0, 0)] = cr(h);
        m[(0, 3)] = cr(sign * h);
    }
    m
}

/// Diagonal PBS with both outputs analysed in H/V. The analyser on the
/// second output is preceded by a polarization flip so the signature labels
/// follow the usual table.
fn fusion_type2() -> CircuitSpec {
    let flip = ModeUnitary::new(CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]))
        .expect("flip is unitary");
    let even = bell_bra(1.0, false);
    let odd = bell_bra(1.0, true);
    let herald = |sig: Vec<u8>, target: &CMatrix| Herald {
        signature: sig,
        fixes: vec![],
        target: Some(target.clone()),
    };
    CircuitSpec {
        name: "fusion-2".into(),
        modes: 4,
        cutoff: DEFAULT_CUTOFF,
        inputs: vec![Encoding::Polarization { h: 0 }, Encoding::Polarization { h: 2 }],
        outputs: vec![],
        ancilla: PureState::vacuum(0, DEFAULT_CUTOFF),
        ancilla_modes: vec![],
        elements: vec![
            Element::PolarizingBs { modes: [0, 1, 2, 3], basis: PbsBasis::Diagonal },
            Element::Unitary { modes: vec![2, 3], u: flip },
        ],
        detected: vec![0, 1, 2, 3],
        heralds: vec![
            herald(vec![1, 0, 0, 1], &even),
            herald(vec![0, 1, 1, 0], &even),
            herald(vec![1, 0, 1, 0], &odd),
            herald(vec![0, 1, 0, 1], &odd),
        ],
        ideal: even.clone(),
        declared_success: 0.5,
        destructive: false,
    }
}

/// Single-photon map (H1, V1, H2, V2) ↦ (H3, V3, H4, V4) separating the four
/// polarization-path Bell states.
pub fn hyper_bell_transform() -> ModeUnitary {
    let h = 0.5f64.sqrt();
    let z = cr(0.0);
    #[rustfmt::skip]
    let m = CMatrix::from_row_slice(4, 4, &[
        z,      cr(-h), z,      cr(h),
        cr(h),  z,      cr(-h), z,
        cr(h),  z,      cr(h),  z,
        z,      cr(h),  z,      cr(h),
    ]);
    ModeUnitary::new(m).expect("hyper-Bell map is unitary")
}

/// Dual-rail Hadamard from two phase shifters around a balanced splitter.
pub fn cerf_hadamard() -> CircuitSpec {
    CircuitSpec {
        name: "cerf-hadamard-demo".into(),
        modes: 2,
        cutoff: DEFAULT_CUTOFF,
        inputs: vec![Encoding::DualRail { zero: 0, one: 1 }],
        outputs: vec![Encoding::DualRail { zero: 0, one: 1 }],
        ancilla: PureState::vacuum(0, DEFAULT_CUTOFF),
        ancilla_modes: vec![],
        elements: vec![
            Element::phase(1, -FRAC_PI_2),
            Element::bs(0, 1, FRAC_PI_4, 0.0),
            Element::phase(1, -FRAC_PI_2),
        ],
        detected: vec![],
        heralds: vec![Herald::plain(vec![])],
        ideal: hadamard(),
        declared_success: 1.0,
        destructive: false,
    }
}

/// Trivial circuit used as a runner sanity check.
pub fn identity_gate() -> CircuitSpec {
    CircuitSpec {
        name: "identity".into(),
        modes: 2,
        cutoff: DEFAULT_CUTOFF,
        inputs: vec![Encoding::DualRail { zero: 0, one: 1 }],
        outputs: vec![Encoding::DualRail { zero: 0, one: 1 }],
        ancilla: PureState::vacuum(0, DEFAULT_CUTOFF),
        ancilla_modes: vec![],
        elements: vec![],
        detected: vec![],
        heralds: vec![Herald::plain(vec![])],
        ideal: CMatrix::identity(2, 2),
        declared_success: 1.0,
        destructive: false,
    }
}

/// Heralded logical output state for a logical input (normalized), with the
/// probability of that herald.
pub fn heralded_output(
    report: &GateReport,
    signature: &[u8],
    input: &nalgebra::DVector<crate::C64>,
) -> Option<(f64, nalgebra::DVector<crate::C64>)> {
    let s = report.signature(signature)?;
    let out = &s.action * input;
    let p = out.norm_squared() / input.norm_squared();
    if p == 0.0 {
        return None;
    }
    let n = out.norm();
    Some((p, out / c(n, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_runner() {
        let r = run_gate(&identity_gate()).unwrap();
        assert!((r.measured_success - 1.0).abs() < 1e-12);
        assert!((r.action_fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn klm_ns() {
        let r = run_gate(&ns_gate(NsVariant::Klm)).unwrap();
        assert!((r.measured_success - 0.25).abs() < 1e-10, "{}", r.measured_success);
        assert!((r.action_fidelity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ralph_ns() {
        let r = run_gate(&ns_gate(NsVariant::Ralph)).unwrap();
        assert!((r.measured_success - 0.2265409).abs() < 1e-7);
        assert!((r.action_fidelity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kerr_and_cerf() {
        for spec in [cz_gate(CzVariant::Kerr), cerf_hadamard()] {
            let r = run_gate(&spec).unwrap();
            assert!((r.measured_success - 1.0).abs() < 1e-12, "{}", spec.name);
            assert!((r.action_fidelity - 1.0).abs() < 1e-12, "{}", spec.name);
        }
    }

    #[test]
    fn knill_refined() {
        let r = run_gate(&cz_gate(CzVariant::KnillRefined)).unwrap();
        assert!((r.measured_success - 2.0 / 27.0).abs() < 1e-12);
        assert!(r.action_fidelity > 1.0 - 1e-12);
    }

    #[test]
    fn cnots() {
        let r = run_gate(&cnot_gate(CnotVariant::RalphCoincidence)).unwrap();
        assert!((r.measured_success - 1.0 / 9.0).abs() < 1e-12);
        assert!(r.action_fidelity > 1.0 - 1e-12);
        let r = run_gate(&cnot_gate(CnotVariant::PittmanAncilla)).unwrap();
        assert!((r.measured_success - 0.25).abs() < 1e-12);
        assert!(r.action_fidelity > 1.0 - 1e-12);
    }

    #[test]
    fn fusions_and_parity() {
        for spec in [parity_check(), fusion(FusionVariant::Type1), fusion(FusionVariant::Type2)] {
            let r = run_gate(&spec).unwrap();
            assert!((r.measured_success - 0.5).abs() < 1e-12, "{}", spec.name);
            assert!(r.action_fidelity > 1.0 - 1e-12, "{} {}", spec.name, r.action_fidelity);
        }
    }

    #[test]
    fn rounded_angle_variants() {
        let r = run_gate(&cz_gate(CzVariant::TwoNs)).unwrap();
        assert!((r.measured_success - 1.0 / 16.0).abs() < 1e-12);
        assert!(r.action_fidelity > 1.0 - 1e-12);
        let r = run_gate(&cz_gate(CzVariant::Knill)).unwrap();
        assert!((r.measured_success - 2.0 / 27.0).abs() < 1e-4);
        assert!(r.action_fidelity > 1.0 - 1e-6);
        let r = run_gate(&ns_gate(NsVariant::RudolphPan)).unwrap();
        assert!((r.measured_success - ns_success(NsVariant::RudolphPan)).abs() < 1e-3);
        assert!(r.action_fidelity > 1.0 - 1e-4);
    }

    #[test]
    fn hyper_bell_first_column() {
        let u = hyper_bell_transform();
        let h = 0.5f64.sqrt();
        assert_eq!(u.matrix()[(1, 0)], cr(h));
        assert_eq!(u.matrix()[(2, 0)], cr(h));
    }
}
