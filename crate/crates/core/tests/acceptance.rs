//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Criteria 1-6 certify the structural properties (dominance, oracle
//! equivalence, horizon switching, the regret bound, concentration, the
//! future-gain bound and pull-count claims) on seeded generated inputs.
//! Criterion 7 runs the full verification battery; criterion 8 checks the
//! benchmark-scale ordering of the index policy against the non-stationary
//! baselines. The finer-grained invariant checks (curve monotonicity and
//! concavity, argmax tie and shift behavior, oracle-zero and additivity of
//! regret) live in the crate's unit tests and run in the same `cargo test`
//! invocation.

use rand::SeedableRng;
use rising_bandits::env::{intro_instance, NoiseFamily};
use rising_bandits::eval::{aggregate, optimal_arm, run_episode, sweep, SweepSpec};
use rising_bandits::policy::PolicyConfig;
use rising_bandits::theory::{
    bound_suite, claims_suite, dominance_suite, lemma_d1_suite, lemma_d2_suite, prop41_suite,
    verify_all, BoundSuiteParams, ClaimsSuiteParams, DominanceSuiteParams, LemmaD1SuiteParams,
    LemmaD2SuiteParams, Prop41SuiteParams,
};

const SEED: u64 = 7;

fn report(number: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {number} ({name}): {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// 100 seeded linear-then-flat instances, horizons 1000 / 10000 / 50000:
/// the horizon-aware deterministic policy never does worse than the slope
/// tracker, within 1e-9, on all 300 cells.
#[test]
fn criterion_1_dominance_on_generated_ltf_instances() {
    let suite = dominance_suite(&DominanceSuiteParams {
        instances: 100,
        horizons: vec![1_000, 10_000, 50_000],
        generation_horizon: 50_000,
        seed: SEED,
    })
    .expect("suite runs");
    let pass = suite.all_hold && suite.total == 300;
    report(
        1,
        "dominance",
        pass,
        &format!("{}/{} cells hold", suite.passed, suite.total),
    );
    for failed in suite.checks.iter().filter(|c| !c.holds).take(5) {
        println!(
            "  violated on {} {}: cure={} red={}",
            failed.instance, failed.params, failed.lhs, failed.rhs
        );
    }
    assert!(pass);
}

/// 200 random rising instances with K <= 3 and T <= 10: the single-arm rule
/// equals the exhaustive allocation oracle exactly.
#[test]
fn criterion_2_optimal_policy_matches_brute_force() {
    let suite = prop41_suite(&Prop41SuiteParams {
        count: 200,
        max_k: 3,
        max_horizon: 10,
        seed: SEED,
    })
    .expect("suite runs");
    let pass = suite.all_hold && suite.total == 200;
    report(
        2,
        "optimal-policy equivalence",
        pass,
        &format!("{}/{} exact matches", suite.passed, suite.total),
    );
    assert!(pass);
}

/// The two-arm example switches optimal arms between T=15000 and T=17000;
/// the deterministic horizon-aware policy stays near-optimal on both sides
/// while the slope tracker pays heavily at the short horizon.
#[test]
fn criterion_3_horizon_switch_on_the_intro_instance() {
    let intro = intro_instance(0.0, NoiseFamily::None);
    let arm_short = optimal_arm(&intro, 15_000).expect("computes");
    let arm_long = optimal_arm(&intro, 17_000).expect("computes");

    let reg = |policy: &str, horizon: u64| {
        run_episode(&intro, &PolicyConfig::bare(policy), horizon, 0)
            .expect("episode runs")
            .final_regret
    };
    let cure_10k = reg("det_cure", 10_000);
    let cure_30k = reg("det_cure", 30_000);
    let red_10k = reg("det_red", 10_000);

    let pass = arm_short == 0
        && arm_long == 1
        && cure_10k <= 1.0
        && cure_30k <= 0.02 * 30_000.0
        && red_10k > cure_10k;
    report(
        3,
        "horizon switch",
        pass,
        &format!(
            "optimal arm {}->{}; regrets cure(10k)={cure_10k:.4} cure(30k)={cure_30k:.4} red(10k)={red_10k:.1}",
            arm_short, arm_long
        ),
    );
    assert!(pass);
}

/// On 20 generated concave instances with Gaussian noise 0.1, the
/// seed-averaged regret of the index policy stays below the closed-form
/// bound for q in {0.5, 1} at T in {5000, 10000}.
#[test]
fn criterion_4_regret_bound_validity() {
    let suite = bound_suite(&BoundSuiteParams {
        instances: 20,
        generation_horizon: 50_000,
        horizons: vec![5_000, 10_000],
        q_values: vec![0.5, 1.0],
        epsilon: 0.25,
        sigma: 0.1,
        replicates: 20,
        seed: SEED,
    })
    .expect("suite runs");
    let min_slack = suite
        .checks
        .iter()
        .map(|c| c.rhs - c.lhs)
        .fold(f64::INFINITY, f64::min);
    let pass = suite.all_hold && suite.total == 80;
    report(
        4,
        "bound validity",
        pass,
        &format!(
            "{}/{} cells with non-negative slack (min slack {min_slack:.1})",
            suite.passed, suite.total
        ),
    );
    assert!(pass);
}

/// Monte Carlo concentration of the windowed estimator at three
/// (t, N, h, sigma) configurations, 1e5 trials each: empirical violation
/// frequency within 2 t^{-2}.
#[test]
fn criterion_5_estimator_concentration() {
    let suite = lemma_d1_suite(&LemmaD1SuiteParams {
        trials: 100_000,
        seed: SEED,
        ..Default::default()
    })
    .expect("suite runs");
    let detail: Vec<String> = suite
        .checks
        .iter()
        .map(|c| format!("{:.2e}<={:.2e}", c.lhs, c.rhs))
        .collect();
    let pass = suite.all_hold && suite.total == 3;
    report(5, "concentration", pass, &detail.join(", "));
    assert!(pass);
}

/// Future-gain bound on a 200x200 (t, n) grid for every arm of 10 concave
/// instances, plus the four pull-structure claims on 100 linear-then-flat
/// instances at T=50000.
#[test]
fn criterion_6_future_bound_grid_and_pull_claims() {
    let lemma = lemma_d2_suite(&LemmaD2SuiteParams {
        instances: 10,
        grid: 200,
        horizon: 10_000,
        generation_horizon: 50_000,
        seed: SEED,
    })
    .expect("suite runs");
    let claims = claims_suite(&ClaimsSuiteParams {
        instances: 100,
        horizon: 50_000,
        generation_horizon: 50_000,
        seed: SEED,
    })
    .expect("suite runs");
    let pass = lemma.all_hold && claims.all_hold && claims.total == 400;
    report(
        6,
        "future-gain bound and claims",
        pass,
        &format!(
            "grid arms {}/{}, claim checks {}/{}",
            lemma.passed, lemma.total, claims.passed, claims.total
        ),
    );
    for failed in claims.checks.iter().filter(|c| !c.holds).take(5) {
        println!("  claim failed: {} on {}", failed.name, failed.instance);
    }
    assert!(pass);
}

/// The full verification battery holds end to end.
#[test]
fn criterion_7_full_verification_battery() {
    let reports = verify_all(SEED).expect("suites run");
    let pass = reports.iter().all(|r| r.all_hold);
    let detail: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {}/{}", r.suite, r.passed, r.total))
        .collect();
    report(7, "verification battery", pass, &detail.join(", "));
    assert!(pass);
}

/// Paper-scale analogue: on 100 generated concave instances at T=50000 with
/// Gaussian noise 0.1 and 10 seeds per cell, the horizon-aware index policy
/// beats both non-stationary baselines on mean regret and mean rank.
#[test]
fn criterion_8_concave_suite_ordering() {
    let instances: Vec<_> = (0..100)
        .map(|i| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                rising_bandits::util::derive_seed(SEED, &[b"concave", &(i as u64).to_le_bytes()]),
            );
            rising_bandits::env::generate_concave_instance(
                &mut rng,
                50_000,
                0.1,
                NoiseFamily::Gaussian,
                format!("concave-{i:03}"),
            )
            .expect("generates")
        })
        .collect();
    let policies = [
        PolicyConfig::bare("cure_ucb"),
        PolicyConfig::bare("sw_ucb"),
        PolicyConfig::bare("rexp3"),
    ];
    let table = sweep(&SweepSpec {
        instances: &instances,
        policies: &policies,
        horizons: &[50_000],
        replicates: 10,
        base_seed: SEED,
    })
    .expect("sweep runs");
    assert!(table.failures.is_empty(), "{:?}", table.failures);

    let rows = aggregate(&table);
    let row = |name: &str| rows.iter().find(|r| r.policy == name).expect("present");
    let cure = row("cure_ucb");
    let sw = row("sw_ucb");
    let rexp3 = row("rexp3");
    let pass = cure.mean_regret < sw.mean_regret
        && cure.mean_regret < rexp3.mean_regret
        && cure.mean_rank < sw.mean_rank
        && cure.mean_rank < rexp3.mean_rank;
    report(
        8,
        "concave-suite ordering",
        pass,
        &format!(
            "mean regret: cure={:.0} sw={:.0} rexp3={:.0}; mean rank: cure={:.2} sw={:.2} rexp3={:.2}",
            cure.mean_regret,
            sw.mean_regret,
            rexp3.mean_regret,
            cure.mean_rank,
            sw.mean_rank,
            rexp3.mean_rank
        ),
    );
    assert!(pass);
}
