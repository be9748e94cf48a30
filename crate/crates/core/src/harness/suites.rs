use super::config::{defaults, ExperimentConfig, ExperimentKind};
use super::report::{ExperimentReport, Flag, SummaryRow, TrialRecord};
use super::map_trials;
use crate::compression::{agrees_on_sample, compress, random_realizable_sample, reconstruct};
use crate::covering::lemmas::{self, EntropySuiteConfig};
use crate::error::{Error, Result};
use crate::game::trial_rngs;

/// Runs every randomized metric-entropy check with `config.instances`
/// instances each.
pub fn run_entropy_suite(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut config = config.clone();
    config.kind = ExperimentKind::EntropySuite;
    config.validate()?;
    if config.instances == 0 {
        return Err(Error::Config("field `instances`: must be at least 1".into()));
    }
    let suite = EntropySuiteConfig {
        instances: config.instances,
        ..EntropySuiteConfig::default()
    };
    let (mut rng, _) = trial_rngs(config.seed);
    let reports = lemmas::run_entropy_suite(&suite, &mut rng)?;
    let mut report = ExperimentReport::new(config);
    for r in &reports {
        for (statistic, value) in [
            ("instances", r.instances as f64),
            ("comparisons", r.comparisons as f64),
            ("violations", r.violations as f64),
        ] {
            report.summary.push(SummaryRow {
                group: r.name.clone(),
                statistic: statistic.into(),
                value,
                se: None,
                trials: r.instances,
            });
        }
        let mut flag = Flag::at_most(
            &format!("{}_holds", r.name),
            &r.statement,
            r.violations as f64,
            0.0,
            match &r.first_violation {
                Some(v) => format!("first violation: {v}"),
                None => format!("{} comparisons on {} instances", r.comparisons, r.instances),
            },
        );
        flag.passed = r.passed();
        report.flags.push(flag);
    }
    report.lemmas = reports;
    Ok(report)
}

/// Round-trips `config.trials` random realizable samples through the
/// size-one compression scheme.
pub fn verify_compression(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut config = config.clone();
    config.kind = ExperimentKind::Compression;
    config.validate()?;
    let records = map_trials(config.trials, |trial| {
        let seed = config.trial_seed(trial);
        let (mut rng, _) = trial_rngs(seed);
        let (_, sample) =
            random_realizable_sample(&mut rng, defaults::COMPRESSION_MAX_N, defaults::COMPRESSION_MAX_SEQ);
        let kept = compress(&sample);
        let f = reconstruct(&kept)?;
        let wrong = sample.pairs().iter().filter(|(x, y)| f.eval(x) != *y).count();
        debug_assert_eq!(wrong == 0, agrees_on_sample(&f, &sample));
        let mut record = TrialRecord::new("all", trial, seed, sample.len());
        record.error = Some(wrong as f64 / sample.len() as f64);
        record.bound = Some(0.0);
        Ok(record)
    })?;
    let failures = records.iter().filter(|r| r.error != Some(0.0)).count();
    let mut report = ExperimentReport::new(config.clone());
    report.summary.push(SummaryRow {
        group: "all".into(),
        statistic: "failed_round_trips".into(),
        value: failures as f64,
        se: None,
        trials: records.len(),
    });
    report.flags.push(Flag::at_most(
        "compression_round_trip",
        "size-one compression: the reconstruction agrees with every realizable sample",
        failures as f64,
        0.0,
        format!("{failures} of {} samples disagree somewhere", records.len()),
    ));
    report.records = records;
    Ok(report)
}
