use smoothlab::harness::{
    replay, run_experiment, run_pac_curve, run_regret_experiment, run_sufficiency_experiment, verify_compression,
    AdversarySpec, ClassSpec, ExperimentConfig, ExperimentKind, LearnerSpec, ReplayRecord,
};
use smoothlab::covering::eval_regret_bound;
use smoothlab::{BaseMeasure, Label, ProcessFamily};

fn separation(trials: usize, horizon: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::Regret);
    c.adversary = Some(AdversarySpec::Separation {
        domain: BaseMeasure::UniformUnit,
    });
    c.learner = Some(LearnerSpec::PrefixGuess);
    c.trials = trials;
    c.horizon = horizon;
    c.seed = 11;
    c
}

#[test]
fn prefix_guessing_loses_half_the_separation_rounds() {
    let report = run_regret_experiment(&separation(100, 64)).unwrap();
    let mean = report.summary_value("all", "mean_regret").unwrap();
    // Each round guesses one fresh fair bit.
    assert!((mean.value - 32.0).abs() < 3.0 * mean.se.unwrap() + 0.5, "{mean:?}");
    assert!(report.flag("separation_regret_linear").unwrap().passed);
    assert_eq!(report.records.len(), 100);
    assert_eq!(report.records[5].seed, 16);
}

#[test]
fn reports_are_deterministic() {
    let a = run_regret_experiment(&separation(30, 32)).unwrap();
    let b = run_regret_experiment(&separation(30, 32)).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn standard_errors_shrink_with_trials() {
    let se = |trials| {
        run_regret_experiment(&separation(trials, 32))
            .unwrap()
            .summary_value("all", "mean_regret")
            .unwrap()
            .se
            .unwrap()
    };
    let ratio = se(50) / se(200);
    assert!((1.4..2.9).contains(&ratio), "ratio {ratio}");
}

fn assert_replays(records: &[ReplayRecord]) {
    assert!(!records.is_empty());
    for r in records {
        let text = serde_json::to_string(r).unwrap();
        let back: ReplayRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(replay(&back).unwrap(), r.report);
    }
}

#[test]
fn replays_reproduce_reports() {
    let mut c = separation(4, 16);
    c.learner = Some(LearnerSpec::SeparationCover {
        sequences: 2,
        per_sequence: 2,
        eps: 0.5,
    });
    assert_replays(&run_regret_experiment(&c).unwrap().replays);

    let mut c = ExperimentConfig::new(ExperimentKind::Regret);
    c.class = Some(ClassSpec::RandomTables { side: 4, count: 8 });
    c.adversary = Some(AdversarySpec::ExpertCorpus);
    c.learner = Some(LearnerSpec::Rewa);
    c.horizon = 64;
    c.trials = 3;
    c.runs_per_stream = 4;
    assert_replays(&run_regret_experiment(&c).unwrap().replays);
}

#[test]
fn tampered_replay_differs() {
    let mut record = run_regret_experiment(&separation(1, 16)).unwrap().replays.remove(0);
    record.report.learner_loss += 1;
    assert_ne!(replay(&record).unwrap(), record.report);
    record.seed += 1;
    record.bundle.stream = smoothlab::LabeledStream::default();
    assert!(replay(&record).is_err());
}

#[test]
fn coinflip_is_realizable_yet_costly() {
    let mut c = ExperimentConfig::new(ExperimentKind::Regret);
    c.adversary = Some(AdversarySpec::Coinflip);
    c.learner = Some(LearnerSpec::RandomGuess {
        pool: vec![Label::Bit(false), Label::Bit(true)],
    });
    c.horizon = 128;
    c.trials = 40;
    let report = run_regret_experiment(&c).unwrap();
    assert!(report.flag("coinflip_comparator_zero").unwrap().passed);
    assert!(report.flag("coinflip_regret_rate").unwrap().passed);
}

#[test]
fn incompatible_pairings_are_configuration_errors() {
    let mut c = ExperimentConfig::new(ExperimentKind::Regret);
    c.adversary = Some(AdversarySpec::RealizableSmooth {
        domain: BaseMeasure::UniformUnit,
        family: ProcessFamily::Base,
    });
    c.learner = Some(LearnerSpec::MemorizeConstant);
    c.class = Some(ClassSpec::Separation);
    let e = run_regret_experiment(&c).unwrap_err();
    assert!(matches!(e, smoothlab::Error::Config(_)), "{e}");
    c.adversary = Some(AdversarySpec::ExpertCorpus);
    c.class = Some(ClassSpec::Constants { k: 3 });
    assert!(matches!(run_regret_experiment(&c), Err(smoothlab::Error::Config(_))));
    c.class = Some(ClassSpec::GridThresholds { side: 4 });
    c.learner = Some(LearnerSpec::Rewa);
    c.class = None;
    assert!(matches!(run_regret_experiment(&c), Err(smoothlab::Error::Config(_))));
}

#[test]
fn small_pac_curve_decreases() {
    let mut c = ExperimentConfig::new(ExperimentKind::PacCurve);
    c.n_grid = vec![16, 2048];
    c.trials = 20;
    c.holdout = 5000;
    let report = run_pac_curve(&c).unwrap();
    assert!(report.passed(), "{:?}", report.flags);
    assert_eq!(report.records.len(), 40);
    let bound16 = report.summary_value("n=16", "bound").unwrap().value;
    assert!(bound16 > 1.0);
}

#[test]
fn rational_indicators_are_learned_for_free() {
    let mut c = ExperimentConfig::new(ExperimentKind::Sufficiency);
    c.class = Some(ClassSpec::RationalIndicators { count: 6 });
    c.horizon = 64;
    c.trials = 5;
    c.complexity_trials = 2;
    c.complexity_n_grid = vec![8, 32];
    c.sigmas = Some(vec![1.0, 0.5]);
    let report = run_sufficiency_experiment(&c).unwrap();
    assert!(report.passed());
    for profile in &report.complexity {
        assert_eq!(profile.cover_size, 1);
        assert!(profile.estimates.iter().all(|e| e.value == 1.0));
    }
    assert!(report.records.iter().all(|r| r.regret == Some(0.0)));
}

#[test]
fn halving_sigma_raises_the_bound() {
    let eps = [0.5, 0.25, 0.125];
    let c = [4.0, 16.0, 64.0];
    let one = eval_regret_bound(1024, 1.0, &eps, &c).unwrap().value;
    let half = eval_regret_bound(1024, 0.5, &eps, &c).unwrap().value;
    let quarter = eval_regret_bound(1024, 0.25, &eps, &c).unwrap().value;
    assert!(one < half && half < quarter);
}

#[test]
fn compression_wrapper_counts_failures() {
    let mut c = ExperimentConfig::new(ExperimentKind::Compression);
    c.trials = 300;
    let report = verify_compression(&c).unwrap();
    assert!(report.passed());
    assert_eq!(report.records.len(), 300);
}

#[test]
fn outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&separation(5, 8)).unwrap();
    report.write(dir.path(), "regret.csv").unwrap();
    for name in ["report.json", "summary.csv", "regret.csv", "plotdata/regret_vs_t.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let replays = std::fs::read_dir(dir.path().join("replays")).unwrap().count();
    assert_eq!(replays, 3);
    let plot = std::fs::read_to_string(dir.path().join("plotdata/regret_vs_t.csv")).unwrap();
    assert!(plot.starts_with("x,y,lo,hi"));
    assert_eq!(plot.lines().count(), 9);
    let back: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(back["records"].as_array().unwrap().len(), 5);
}
