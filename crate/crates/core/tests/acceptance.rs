//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;
use seqmeas::constructions::{dual_basis_povm, dual_basis_witness_value, paper_scenario, trine_povm, Construction};
use seqmeas::correlations::{
    analyze, construct_mns_model, dual_basis_identity_check, MnsOutcome, DEFAULT_FEASIBILITY_TOL,
};
use seqmeas::matcore::{herm_eig, psd_sqrt, ComplexMatrix, DEFAULT_TOL};
use seqmeas::optimize::{maximize, OptConfig};
use seqmeas::quantum::{Povm, Scenario};

const INSTANCES: usize = 200;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn max_table_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn trine_reproduction() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_seqmeas"))
        .args(["demo", "trine", "--json"])
        .output()
        .expect("binary runs");
    if !out.status.success() {
        return outcome(false, format!("demo exited with {}", out.status));
    }
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).expect("demo prints JSON");
    let value = doc["value"].as_f64().unwrap_or(f64::NAN);
    let nsit = doc["nsit_residual"].as_f64().unwrap_or(f64::NAN);
    outcome(
        (value - 1.0 / 3.0).abs() <= 1e-9 && nsit <= 1e-12,
        format!("S = {value:.12}, NSIT residual = {nsit:.1e}"),
    )
}

fn dual_basis_table() -> Outcome {
    let mut worst_value = 0.0_f64;
    let mut worst_nsit = 0.0_f64;
    for d in 2..=8 {
        let report = analyze(&paper_scenario(Construction::DualBasis, d).unwrap())
            .unwrap()
            .report;
        worst_value = worst_value.max((report.value - dual_basis_witness_value(d)).abs());
        worst_nsit = worst_nsit.max(report.nsit_residual);
    }
    outcome(
        worst_value <= 1e-10 && worst_nsit <= 1e-12,
        format!("d = 2..8, max |S_d - (1 - 1/d)/2| = {worst_value:.1e}, max NSIT = {worst_nsit:.1e}"),
    )
}

fn operator_identity() -> Outcome {
    let worst = (2..=8)
        .map(|d| dual_basis_identity_check(&dual_basis_povm(d).unwrap(), DEFAULT_TOL).unwrap())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-10, format!("d = 2..8, max deviation = {worst:.1e}"))
}

type AliceGen = fn(usize, usize, &mut rand_chacha::ChaCha8Rng) -> Povm;

fn no_go_family(seed: u64, alice: AliceGen, fixed_outcomes: Option<usize>) -> Vec<Scenario> {
    let mut rng = common::rng(seed);
    (0..INSTANCES)
        .map(|_| {
            let da = rng.random_range(2..=4);
            let na = fixed_outcomes.unwrap_or_else(|| rng.random_range(2..=4));
            let db = rng.random_range(2..=3);
            let nb = rng.random_range(2..=3);
            let a = alice(da, na, &mut rng);
            common::scenario(a, db, nb, &mut rng)
        })
        .collect()
}

fn no_go_suites() -> Vec<(&'static str, Vec<Scenario>)> {
    vec![
        ("projective", no_go_family(401, common::projective, None)),
        ("two-outcome", no_go_family(402, common::povm, Some(2))),
        ("self-commuting", no_go_family(403, common::self_commuting, None)),
    ]
}

fn no_go(suites: &[(&str, Vec<Scenario>)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, family) in suites {
        let worst = family
            .iter()
            .map(|s| analyze(s).unwrap().report.value)
            .fold(f64::NEG_INFINITY, f64::max);
        pass &= worst <= 1e-10;
        parts.push(format!("{name}: max S = {worst:.1e}"));
    }
    outcome(pass, format!("{} instances each; {}", INSTANCES, parts.join(", ")))
}

fn model_round_trip(suites: &[(&str, Vec<Scenario>)]) -> Outcome {
    let mut worst = 0.0_f64;
    let mut infeasible = 0;
    for s in suites.iter().flat_map(|(_, family)| family) {
        let a = analyze(s).unwrap();
        match construct_mns_model(&a.joint, &a.single, DEFAULT_FEASIBILITY_TOL).unwrap() {
            MnsOutcome::Feasible(model) => {
                let (joint, single) = model.induced_tables().unwrap();
                worst = worst
                    .max(max_table_diff(joint.values(), a.joint.values()))
                    .max(max_table_diff(single.values(), a.single.values()));
            }
            MnsOutcome::Infeasible { .. } => infeasible += 1,
        }
    }
    let trine = analyze(&paper_scenario(Construction::Trine, 2).unwrap()).unwrap();
    let trine_value = match construct_mns_model(&trine.joint, &trine.single, DEFAULT_FEASIBILITY_TOL).unwrap() {
        MnsOutcome::Infeasible { value } => value,
        MnsOutcome::Feasible(_) => f64::NAN,
    };
    outcome(
        infeasible == 0 && worst <= 1e-12 && (trine_value - 1.0 / 3.0).abs() <= 1e-9,
        format!(
            "{infeasible} infeasible, max table deviation = {worst:.1e}; trine infeasible with S = {trine_value:.12}"
        ),
    )
}

fn residual_spot_values() -> Outcome {
    let s = paper_scenario(Construction::Trine, 2).unwrap();
    let residuals = analyze(&s).unwrap().report.residuals;
    // Σ_{a0} √R_{a0} R_{a1} √R_{a0} = ⅓Π_{a1} + 𝟙/6 for the trine, with Π = (3/2) R.
    let trine = trine_povm();
    let mut oracle_worst = 0.0_f64;
    for a1 in 0..3 {
        let r = trine.element(a1);
        let lhs = r
            .scale_real(0.5)
            .add(&ComplexMatrix::identity(2).scale_real(1.0 / 6.0))
            .unwrap();
        for b in 0..2 {
            let sigma = common::bob_conditioned(s.bob_povm().element(b), s.state().matrix(), 2, 2);
            let expected = lhs.sub(r).unwrap().matmul(&sigma).unwrap().trace().re;
            oracle_worst = oracle_worst.max((expected - residuals.get(a1, b)).abs());
        }
    }
    let d00 = residuals.get(0, 0);
    let d10 = residuals.get(1, 0);
    outcome(
        (d00 + 1.0 / 12.0).abs() <= 1e-10 && (d10.abs() - 1.0 / 24.0).abs() <= 1e-10 && oracle_worst <= 1e-10,
        format!(
            "Δ(0,0) = {d00:.12}, |Δ(1,0)| = {:.12}, max oracle deviation = {oracle_worst:.1e}",
            d10.abs()
        ),
    )
}

fn numerics() -> Outcome {
    let mut rng = common::rng(700);
    let mut worst_sqrt = 0.0_f64;
    let mut worst_eig = 0.0_f64;
    let count = 500;
    for i in 0..count {
        let n = 1 + i % 16;
        let h = common::hermitian(n, &mut rng);
        let eig = herm_eig(&h, DEFAULT_TOL).unwrap();
        worst_eig = worst_eig.max(eig.reconstruct().max_abs_diff(&h).unwrap());

        let rank = rng.random_range(1..=n);
        let p = common::psd(n, rank, &mut rng);
        let root = psd_sqrt(&p, DEFAULT_TOL).unwrap();
        worst_sqrt = worst_sqrt.max(root.matmul(&root).unwrap().max_abs_diff(&p).unwrap());
    }
    outcome(
        worst_sqrt <= 1e-10 && worst_eig <= 1e-10,
        format!(
            "{count} matrices, dim 1..16: max |(√P)² - P| = {worst_sqrt:.1e}, max eig reconstruction = {worst_eig:.1e}"
        ),
    )
}

fn optimizer_recovery() -> Outcome {
    let mut cfg = OptConfig::new(2, 2, 3, 2);
    cfg.restarts = 50;
    cfg.max_iters = 2000;
    cfg.seed = 2024;
    let start = Instant::now();
    let best = maximize(&cfg).unwrap().best_value;
    let elapsed = start.elapsed().as_secs_f64();

    let mut two = OptConfig::new(2, 2, 2, 2);
    two.restarts = 50;
    two.max_iters = 2000;
    two.seed = 2024;
    let two_best = maximize(&two).unwrap().best_value;
    outcome(
        best >= 1.0 / 3.0 - 1e-3 && elapsed <= 60.0 && two_best <= 1e-6,
        format!("(2,2,3,2): best = {best:.10} in {elapsed:.1} s; two outcomes: best = {two_best:.1e}"),
    )
}

fn probability_sanity() -> Outcome {
    let mut rng = common::rng(900);
    let mut worst_norm = 0.0_f64;
    let mut min_entry = f64::INFINITY;
    let mut worst_marginal = 0.0_f64;
    for _ in 0..INSTANCES {
        let s = common::random_scenario(&mut rng);
        let joint = analyze(&s).unwrap().joint;
        worst_norm = worst_norm.max((joint.values().iter().sum::<f64>() - 1.0).abs());
        min_entry = joint.values().iter().copied().fold(min_entry, f64::min);
        for a0 in 0..s.n_alice() {
            for b in 0..s.n_bob() {
                let expected =
                    common::kron_expectation(s.alice_povm().element(a0), s.bob_povm().element(b), s.state().matrix());
                worst_marginal = worst_marginal.max((joint.sum_over_second(a0, b) - expected).abs());
            }
        }
    }
    outcome(
        worst_norm <= 1e-10 && min_entry >= -1e-12 && worst_marginal <= 1e-10,
        format!(
            "{INSTANCES} scenarios: max |Σp - 1| = {worst_norm:.1e}, min entry = {min_entry:.1e}, max marginal deviation = {worst_marginal:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    let suites = no_go_suites();
    let criteria: Vec<Criterion> = vec![
        ("trine reproduction", Box::new(trine_reproduction)),
        ("dual-basis witness table", Box::new(dual_basis_table)),
        ("dual-basis operator identity", Box::new(operator_identity)),
        ("no-go suite", Box::new(|| no_go(&suites))),
        ("model round trip", Box::new(|| model_round_trip(&suites))),
        ("trine residual spot values", Box::new(residual_spot_values)),
        ("eigensolver and square root numerics", Box::new(numerics)),
        ("optimizer recovery", Box::new(optimizer_recovery)),
        ("probability sanity", Box::new(probability_sanity)),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {}", i + 1, result.detail);
        failures += usize::from(!result.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
