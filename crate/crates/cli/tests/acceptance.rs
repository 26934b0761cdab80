//! Acceptance suite: one PASS/FAIL line per criterion, FLAG lines for known
//! discrepancies that are reported but never fail the run.

use loqc::exec::trial_rng;
use loqc::fock::sector;
use loqc::linalg::{c, haar_unitary};
use loqc::measure::{measure_modes, povm_bucket, povm_number_resolving, DetectorModel};
use loqc::optics::{apply_unitary, apply_unitary_permanent, reck_decompose};
use loqc::sources::{hom_coincidence, hom_coincidence_brute_force, SpectralAmplitude};
use loqc::teleport::{success_fraction, teleport_with, teleported_cz_with};
use loqc::{Exec, ModeUnitary, PureState};
use loqc_cli::config::ScenarioConfig;
use loqc_cli::report::{CheckKind, Report};
use loqc_cli::scenarios::run_scenario;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
    flags: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            flags: Vec::new(),
        }
    }
}

fn scenario(cfg: ScenarioConfig) -> Report {
    let name = cfg.scenario.clone();
    run_scenario(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn measured(r: &Report, check: &str) -> f64 {
    r.check(check).unwrap_or_else(|| panic!("{} has no check {check}", r.scenario)).measured
}

fn asserted_pass(reports: &[&Report]) -> (bool, Vec<String>) {
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failed_checks().map(move |c| format!("{}:{}", r.scenario, c.name)))
        .collect();
    (failed.is_empty(), failed)
}

fn flags_of(r: &Report) -> Vec<String> {
    r.checks
        .iter()
        .filter(|c| c.kind == CheckKind::Flag)
        .map(|c| {
            format!(
                "{}:{} expected {} measured {} ({}) {}",
                r.scenario,
                c.name,
                c.expected,
                c.measured,
                if c.pass { "holds" } else { "does not hold" },
                c.note.clone().unwrap_or_default()
            )
        })
        .collect()
}

fn from_reports(reports: &[&Report], detail: String) -> Outcome {
    let (pass, failed) = asserted_pass(reports);
    let detail = if pass { detail } else { format!("{detail}; failed {failed:?}") };
    let mut o = Outcome::new(pass, detail);
    o.flags = reports.iter().flat_map(|r| flags_of(r)).collect();
    o
}

fn c1() -> Outcome {
    let r = scenario(ScenarioConfig::new("ns-klm"));
    let detail = format!(
        "success {:.12}, sign-flip overlap {:.12}",
        measured(&r, "success_probability"),
        measured(&r, "sign_flip_overlap")
    );
    from_reports(&[&r], detail)
}

fn c2() -> Outcome {
    let a = scenario(ScenarioConfig::new("ns-ralph"));
    let b = scenario(ScenarioConfig::new("ns-rudolph-pan"));
    let detail = format!(
        "two-splitter {:.10}, rounded angles {:.6}",
        measured(&a, "success_probability"),
        measured(&b, "success_probability")
    );
    from_reports(&[&a, &b], detail)
}

fn c3() -> Outcome {
    let r = scenario(ScenarioConfig::new("cz-two-ns"));
    let detail = format!(
        "success {:.12}, entropy {:.12} bit",
        measured(&r, "success_probability"),
        measured(&r, "uniform_input_entropy_bits")
    );
    from_reports(&[&r], detail)
}

fn c4() -> Outcome {
    let r = scenario(ScenarioConfig::new("cz-knill"));
    let detail = format!(
        "printed angles {:.6} (2/27 = {:.6}), refined fidelity {:.12}",
        measured(&r, "printed_success"),
        2.0 / 27.0,
        measured(&r, "refined_action_fidelity")
    );
    from_reports(&[&r], detail)
}

fn c5() -> Outcome {
    let a = scenario(ScenarioConfig::new("cnot-ralph"));
    let b = scenario(ScenarioConfig::new("cnot-pittman"));
    let detail = format!(
        "coincidence CNOT {:.12}, ancilla CNOT {:.12}, singlet fidelity {:.12}",
        measured(&a, "success_probability"),
        measured(&b, "success_probability"),
        measured(&b, "singlet_fidelity")
    );
    from_reports(&[&a, &b], detail)
}

fn c6() -> Outcome {
    let a = scenario(ScenarioConfig::new("fusion-1"));
    let b = scenario(ScenarioConfig::new("fusion-2"));
    let detail = format!(
        "type-I {} / Z {:.12}, type-II {} / X {:.12}",
        measured(&a, "cluster_success"),
        measured(&a, "failure_is_z_measurement"),
        measured(&b, "cluster_success"),
        measured(&b, "failure_is_x_measurement")
    );
    from_reports(&[&a, &b], detail)
}

fn c7() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let input = [c(0.6, 0.0), c(0.0, 0.8)];
    for n in 1..=5usize {
        let frac = success_fraction(n);
        let exact = frac.iter().all(|&f| f == (n as u64, n as u64 + 1));
        let r = teleport_with(input, n, Exec::default()).expect("teleport");
        let p = r.success_probability();
        let ok = exact && (p - n as f64 / (n + 1) as f64).abs() < 1e-12 && r.min_success_fidelity() > 1.0 - 1e-10;
        pass &= ok;
        parts.push(format!("n={n}: {}/{} sim {:.12}", frac[0].0, frac[0].1, p));
        if n == 5 {
            let modes: Vec<_> = r
                .outcomes
                .iter()
                .filter(|o| o.success && o.m == 2)
                .map(|o| o.output_mode)
                .collect();
            let on7 = !modes.is_empty() && modes.iter().all(|&m| m == Some(7));
            pass &= on7;
            parts.push(format!("n=5,m=2 -> mode 7: {on7}"));
        }
    }
    for n in 1..=2usize {
        let r = teleported_cz_with(n, Exec::default()).expect("teleported cz");
        let want = (n * n) as f64 / ((n + 1) * (n + 1)) as f64;
        let ok = (r.success_probability - want).abs() < 1e-12 && r.min_fidelity() > 1.0 - 1e-10;
        pass &= ok;
        parts.push(format!("cz n={n}: {:.12}", r.success_probability));
    }
    Outcome::new(pass, parts.join(", "))
}

fn c8() -> Outcome {
    let r = scenario(ScenarioConfig::new("hom-dip").with_param("pairs", 20.0));
    let mut rng = trial_rng(8, 0);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = SpectralAmplitude::random(5, &mut rng).unwrap();
        let b = SpectralAmplitude::random(5, &mut rng).unwrap();
        let d = hom_coincidence(&a, &b).unwrap() - hom_coincidence_brute_force(&a, &b).unwrap();
        worst = worst.max(d.abs());
    }
    let mut o = from_reports(
        &[&r],
        format!(
            "identical spectra {:.3e}, worst analytic vs Fock {:.3e} / {:.3e}",
            measured(&r, "identical_spectra_coincidence"),
            measured(&r, "analytic_vs_fock_worst"),
            worst
        ),
    );
    o.pass &= worst < 1e-10;
    o
}

fn c9() -> Outcome {
    let r = scenario(ScenarioConfig::new("growth").with_seed(9).with_trials(100_000));
    let bucket = scenario(
        ScenarioConfig::new("growth")
            .with_seed(10)
            .with_trials(100_000)
            .with_param("p", 0.25)
            .with_param("d_s", 2.0)
            .with_param("d_f", 2.0)
            .with_param("m", 10.0),
    );
    let drift = |r: &Report| r.data["drift"].as_f64().unwrap();
    let detail = format!(
        "m_min {}/{}/{}, drift {:.4} vs {:.4}, bucket drift {:.4} vs {:.4}",
        measured(&r, "m_min_type1"),
        measured(&r, "m_min_type2"),
        measured(&r, "m_min_bucket"),
        drift(&r),
        r.data["analytic_drift"].as_f64().unwrap(),
        drift(&bucket),
        bucket.data["analytic_drift"].as_f64().unwrap()
    );
    from_reports(&[&r, &bucket], detail)
}

fn c10() -> Outcome {
    let r = scenario(ScenarioConfig::new("fz-thresholds"));
    let detail = format!(
        "F_Z0 {:.12} (7/52), F_Z1 {:.10}",
        measured(&r, "fz0_at_quarter"),
        measured(&r, "fz1_at_quarter")
    );
    from_reports(&[&r], detail)
}

fn c11() -> Outcome {
    let r = scenario(ScenarioConfig::new("loss-tree").with_seed(11).with_trials(100_000));
    let rows = r.data["trees"].as_array().unwrap();
    let summary: Vec<String> = rows
        .iter()
        .map(|t| {
            format!(
                "eta {} depth {}: {:.4}",
                t["eta"],
                t["depth"],
                t["mean"].as_f64().unwrap()
            )
        })
        .collect();
    from_reports(&[&r], summary.join(", "))
}

fn c12() -> Outcome {
    let mut worst = 0.0f64;
    for eta in [0.0, 0.25, 0.5, 1.0] {
        for cutoff in [1, 4, 8] {
            worst = worst.max(povm_number_resolving(eta, cutoff).unwrap().completeness_error());
            worst = worst.max(povm_bucket(eta, cutoff).unwrap().completeness_error());
        }
    }
    let one = PureState::basis_state([1], 4).unwrap();
    let mut agree = 0.0f64;
    for eta in [0.0, 0.25, 0.5, 1.0] {
        let b = measure_modes(&one, &[0], &DetectorModel::bucket(eta, 4)).unwrap();
        let n = measure_modes(&one, &[0], &DetectorModel::number_resolving(eta, 4)).unwrap();
        for sig in [[0u8], [1u8]] {
            agree = agree.max((b.probability(&sig) - n.probability(&sig)).abs());
        }
    }
    Outcome::new(
        worst < 1e-10 && agree < 1e-15,
        format!("completeness error {worst:.3e}, bucket vs resolving {agree:.3e}"),
    )
}

fn c13() -> Outcome {
    let r = scenario(ScenarioConfig::new("tomography-cnot"));
    let detail = format!("process fidelity {:.12}", measured(&r, "process_fidelity"));
    from_reports(&[&r], detail)
}

fn c14() -> Outcome {
    let mut rng = trial_rng(14, 0);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let modes = rng.random_range(2..=6);
        let photons = rng.random_range(1..=4);
        let mut s = PureState::zero(modes, 4);
        for occ in sector(modes, photons) {
            s.add_term(occ, c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        }
        let s = s.normalized().unwrap();
        let u = ModeUnitary::new(haar_unitary(modes, &mut rng)).unwrap();
        let a = apply_unitary(&s, &u).unwrap();
        let b = apply_unitary_permanent(&s, &u).unwrap();
        worst = worst.max(a.distance_inf(&b));
    }
    let mut reck = 0.0f64;
    for n in 2..=6 {
        for _ in 0..5 {
            let u = ModeUnitary::new(haar_unitary(n, &mut rng)).unwrap();
            let d = reck_decompose(&u).unwrap();
            reck = reck.max((d.recompose().matrix() - u.matrix()).camax());
        }
    }
    Outcome::new(
        worst < 1e-10 && reck < 1e-10,
        format!("multinomial vs permanent {worst:.3e} on 50 circuits, Reck {reck:.3e}"),
    )
}

fn c15() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for name in loqc_cli::scenarios::SCENARIOS.iter().filter(|s| s.monte_carlo).map(|s| s.name) {
        let mut outputs = Vec::new();
        for (i, extra) in [None, None, Some("--sequential")].iter().enumerate() {
            let path = dir.path().join(format!("{name}-{i}.json"));
            let mut argv = vec![
                "loqc".to_string(),
                "--scenario".into(),
                name.into(),
                "--seed".into(),
                "1234".into(),
                "--trials".into(),
                "20000".into(),
                "--out".into(),
                path.display().to_string(),
            ];
            argv.extend(extra.map(String::from));
            let code = loqc_cli::run(argv, &mut std::io::sink(), &mut std::io::sink());
            pass &= code == 0;
            outputs.push(std::fs::read(&path).unwrap_or_default());
        }
        let same = !outputs[0].is_empty() && outputs.iter().all(|o| *o == outputs[0]);
        pass &= same;
        parts.push(format!("{name}: {}", if same { "identical" } else { "DIFFERS" }));
    }
    Outcome::new(pass, parts.join(", "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 15] = [
        ("NS gate (KLM) success 1/4 and sign flip", c1),
        ("NS gate (two-splitter, rounded polarization angles)", c2),
        ("CZ from two NS gates: 1/16, 1 bit entanglement", c3),
        ("Knill CZ: 2/27 at printed angles, refined fidelity", c4),
        ("Coincidence CNOT 1/9; ancilla CNOT 1/4 with fixes and singlet", c5),
        ("Fusion: 1/2, type-I fails as Z, type-II as X", c6),
        ("Teleportation n/(n+1), output mode, teleported CZ", c7),
        ("HOM dip and brute-force mode matching", c8),
        ("Cluster growth requirements and drift", c9),
        ("Encoding recursion F_Z and monotonicity", c10),
        ("Loss-tolerant trees", c11),
        ("Detector POVMs", c12),
        ("CNOT process tomography", c13),
        ("Oracle equivalence: permanents and Reck", c14),
        ("Monte Carlo determinism", c15),
    ];
    let mut failures = 0;
    for (k, (title, f)) in criteria.iter().enumerate() {
        let o = f();
        println!(
            "{} criterion {:>2}: {title} | {}",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
        for flag in &o.flags {
            println!("FLAG criterion {:>2}: {flag}", k + 1);
        }
        if !o.pass {
            failures += 1;
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
