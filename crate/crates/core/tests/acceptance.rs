//! Acceptance criteria, one line each. Exits nonzero if any fails.

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use smoothlab::classes::NonDyadicRational;
use smoothlab::covering::{estimate_complexity_c, finite_class_builder, shatters, vc_dimension, ComplexityGrid};
use smoothlab::harness::{
    defaults, first_rationals, run_entropy_suite, run_pac_curve, run_regret_experiment, run_sufficiency_experiment,
    verify_compression, AdversarySpec, ClassSpec, ExperimentConfig, ExperimentKind, ExperimentReport, LearnerSpec,
};
use smoothlab::{BaseMeasure, Hypothesis, Label, ProcessFamily, SimRng};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn flags_line(reports: &[(&str, ExperimentReport)]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (label, report) in reports {
        for f in &report.flags {
            passed &= f.passed;
            parts.push(format!(
                "{label}{}{}: {:.4} vs {:.4} {}",
                if label.is_empty() { "" } else { "/" },
                f.name,
                f.observed,
                f.threshold,
                if f.passed { "ok" } else { "FAILED" }
            ));
        }
        passed &= !report.flags.is_empty();
    }
    Outcome {
        passed,
        detail: parts.join("; "),
    }
}

fn regret_config(adversary: AdversarySpec, learner: LearnerSpec, horizon: usize, trials: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::Regret);
    c.adversary = Some(adversary);
    c.learner = Some(learner);
    c.horizon = horizon;
    c.trials = trials;
    c
}

fn bits() -> Vec<Label> {
    vec![Label::Bit(false), Label::Bit(true)]
}

fn separation_lower_bound() -> Outcome {
    let start = Instant::now();
    let adversary = AdversarySpec::Separation {
        domain: BaseMeasure::UniformUnit,
    };
    let learners = [
        ("random_guess", LearnerSpec::RandomGuess { pool: bits() }),
        ("prefix_guess", LearnerSpec::PrefixGuess),
        (
            "separation_cover",
            LearnerSpec::SeparationCover {
                sequences: 4,
                per_sequence: 4,
                eps: 0.5,
            },
        ),
    ];
    let reports: Vec<(&str, ExperimentReport)> = learners
        .into_iter()
        .map(|(name, l)| (name, run_regret_experiment(&regret_config(adversary.clone(), l, 256, 200)).unwrap()))
        .collect();
    let elapsed = start.elapsed();
    let mut o = flags_line(&reports);
    o.passed &= elapsed < Duration::from_secs(60);
    o.detail = format!("{}; runtime {:.1}s (limit 60s)", o.detail, elapsed.as_secs_f64());
    o
}

fn compression_validity() -> Outcome {
    let mut c = ExperimentConfig::new(ExperimentKind::Compression);
    c.trials = 10_000;
    c.seed = 7;
    flags_line(&[("", verify_compression(&c).unwrap())])
}

fn pac_curve() -> Outcome {
    let mut c = ExperimentConfig::new(ExperimentKind::PacCurve);
    c.n_grid = vec![32, 128, 512, 2048, 4096];
    c.trials = 100;
    c.delta = 0.05;
    c.holdout = defaults::HOLDOUT;
    let report = run_pac_curve(&c).unwrap();
    let mut o = flags_line(&[("", report)]);
    o.passed &= o.detail.matches("bound_violation_rate").count() == 5 && o.detail.contains("median_error_decreases");
    o
}

fn rewa_guarantee() -> Outcome {
    let mut c = regret_config(AdversarySpec::ExpertCorpus, LearnerSpec::Rewa, 1024, 500);
    c.class = Some(ClassSpec::RandomTables { side: 8, count: 64 });
    c.runs_per_stream = 20;
    let report = run_regret_experiment(&c).unwrap();
    let bound = report.bounds.iter().find(|b| b.name == "rewa_bound").unwrap().value;
    let mut o = flags_line(&[("", report)]);
    o.passed &= (bound - 92.3).abs() < 0.05;
    o
}

fn grid_separation() -> Outcome {
    let c = regret_config(
        AdversarySpec::Separation {
            domain: BaseMeasure::UniformGrid { side: 8 },
        },
        LearnerSpec::PrefixGuess,
        8,
        500,
    );
    let report = run_regret_experiment(&c).unwrap();
    let mut o = flags_line(&[("", report)]);
    o.passed &= o.detail.contains("grid_separation_regret") && o.detail.contains("grid_distinct_frequency");
    o
}

fn coinflip() -> Outcome {
    let c = regret_config(AdversarySpec::Coinflip, LearnerSpec::RandomGuess { pool: bits() }, 512, 200);
    flags_line(&[("", run_regret_experiment(&c).unwrap())])
}

fn constant_streams() -> Outcome {
    let adversary = AdversarySpec::RealizableSmooth {
        domain: BaseMeasure::UniformUnit,
        family: ProcessFamily::Base,
    };
    let mut reports = Vec::new();
    for (name, learner) in [("memorize", LearnerSpec::MemorizeConstant), ("rewa", LearnerSpec::Rewa)] {
        let mut c = regret_config(adversary.clone(), learner, 256, 200);
        c.class = Some(ClassSpec::Constants { k: 32 });
        reports.push((name, run_regret_experiment(&c).unwrap()));
    }
    flags_line(&reports)
}

fn sufficiency() -> Outcome {
    let mut c = ExperimentConfig::new(ExperimentKind::Sufficiency);
    c.class = Some(ClassSpec::GridThresholds { side: 8 });
    c.sigmas = Some(vec![1.0, 0.5]);
    c.horizon = 1024;
    c.trials = 200;
    let report = run_sufficiency_experiment(&c).unwrap();
    let mut o = flags_line(&[("", report)]);
    o.passed &= o.detail.matches("sufficiency_bound_sigma").count() == 2;
    o
}

fn entropy_suite() -> Outcome {
    let start = Instant::now();
    let mut c = ExperimentConfig::new(ExperimentKind::EntropySuite);
    c.instances = 100;
    let report = run_entropy_suite(&c).unwrap();
    let elapsed = start.elapsed();
    let enough = report.lemmas.len() == 6 && report.lemmas.iter().all(|l| l.instances >= 100);
    let mut o = flags_line(&[("", report)]);
    o.passed &= enough && elapsed < Duration::from_secs(120);
    o.detail = format!("{}; runtime {:.1}s (limit 120s)", o.detail, elapsed.as_secs_f64());
    o
}

fn rational_indicators() -> Outcome {
    let points = first_rationals(10);
    let class: Vec<Hypothesis> = (0u32..1 << 10)
        .map(|m| {
            Hypothesis::Indicator(smoothlab::classes::IndicatorHypothesis::rationals(
                points.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, r)| *r),
            ))
        })
        .collect();
    let rows: Vec<Vec<bool>> = class
        .iter()
        .map(|h| {
            let Hypothesis::Indicator(h) = h else { unreachable!() };
            points.iter().map(|r: &NonDyadicRational| h.eval_rational(r) == Label::Bit(true)).collect()
        })
        .collect();
    let mut rng = SimRng::seed_from_u64(10);
    let mut sets = 0;
    let mut all_shattered = true;
    for size in 1..=10 {
        for _ in 0..20 {
            let set = sample(&mut rng, 10, size).into_vec();
            all_shattered &= shatters(&rows, &set);
            sets += 1;
        }
    }
    let vc = vc_dimension(&rows).unwrap();

    let eps: Vec<f64> = defaults::eps_grid().iter().map(|e| e * e).collect();
    let mut cells = 0;
    let mut worst = 1.0f64;
    let mut all_one = true;
    for sigma in [1.0, 0.5, 0.25] {
        let grid = ComplexityGrid {
            sigma,
            eps: eps.clone(),
            n_grid: vec![1, 16, 64, 256],
            families: vec![
                ProcessFamily::Base,
                ProcessFamily::SlidingWindow { width: sigma },
                ProcessFamily::HalfWindow { width: sigma },
            ],
            trials: 5,
        };
        for mu in [BaseMeasure::UniformUnit, BaseMeasure::UniformGrid { side: 8 }] {
            let est = estimate_complexity_c(finite_class_builder(class.clone()), mu, &grid, &mut rng).unwrap();
            for e in &est {
                for cell in &e.cells {
                    cells += 1;
                    all_one &= cell.mean == 1.0;
                    worst = worst.max(cell.mean);
                }
                all_one &= e.value == 1.0;
            }
        }
    }
    Outcome {
        passed: all_shattered && vc >= 10 && all_one,
        detail: format!(
            "{sets} point sets shattered: {all_shattered}; VC = {vc}; complexity 1 in all {cells} (eps, sigma, n, process) cells: {all_one} (largest {worst})"
        ),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("separation lower bound", separation_lower_bound),
        ("compression validity", compression_validity),
        ("learning curve", pac_curve),
        ("exponential weights guarantee", rewa_guarantee),
        ("grid separation", grid_separation),
        ("coin-flip counterexample", coinflip),
        ("constant-class counterexample", constant_streams),
        ("entropy sufficiency bound", sufficiency),
        ("entropy suite", entropy_suite),
        ("rational indicators", rational_indicators),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name} ({:.1}s): {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
