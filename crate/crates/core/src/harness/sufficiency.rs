use rand::Rng;

use super::config::{ClassSpec, ExperimentConfig, ExperimentKind};
use super::report::{ComplexityProfile, ExperimentReport, Flag, NamedValue, PlotPoint, PlotSeries, SummaryRow, TrialRecord};
use super::{class_rng, map_trials, measure_cover, run_rng};
use crate::adversaries::realizable_smooth_stream;
use crate::covering::{estimate_complexity_c, eval_regret_bound, finite_class_builder, rewa_regret_bound, ComplexityGrid};
use crate::error::{Error, Result};
use crate::game::trial_rngs;
use crate::learners::RewaBatch;
use crate::measure::{make_smooth_process, BaseMeasure, ProcessFamily};
use crate::stats::mean_se;

/// Processes over which the complexity supremum is taken at `sigma`.
fn complexity_families(sigma: f64) -> Vec<ProcessFamily> {
    let mut families = vec![ProcessFamily::Base];
    if sigma < 1.0 {
        families.push(ProcessFamily::SlidingWindow { width: sigma });
        families.push(ProcessFamily::HalfWindow { width: sigma });
    }
    families
}

/// Estimates the complexity of a finite class, evaluates the entropy regret
/// bound from it, and plays exponential weights over a cover of the class
/// on realizable σ-smooth streams, once per σ of the sweep.
pub fn run_sufficiency_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut config = config.clone();
    config.kind = ExperimentKind::Sufficiency;
    config.validate()?;
    let spec = config.class.clone().expect("validated");
    let horizon = config.horizon;
    if horizon == 0 {
        return Err(Error::Config("field `horizon`: must be at least 1".into()));
    }
    let mut crng = class_rng(config.seed);
    let class = spec
        .materialize(&mut crng)?
        .ok_or_else(|| Error::Config("field `class`: the sufficiency experiment needs a finite class".into()))?;
    let domain = match spec.grid_side() {
        Some(side) => BaseMeasure::UniformGrid { side },
        None => BaseMeasure::UniformUnit,
    };
    if matches!(spec, ClassSpec::Separation | ClassSpec::PointIndicators) {
        return Err(Error::Config("field `class`: not a finite class".into()));
    }

    let mut report = ExperimentReport::new(config.clone());
    let trials = config.trials;
    for (k, &sigma) in config.sigma_sweep().iter().enumerate() {
        let group = format!("sigma={sigma}");
        let grid = ComplexityGrid {
            sigma,
            eps: config.eps_grid.iter().map(|e| e * e).collect(),
            n_grid: config.complexity_n_grid.clone(),
            families: complexity_families(sigma),
            trials: config.complexity_trials,
        };
        let estimates = estimate_complexity_c(finite_class_builder(class.clone()), domain, &grid, &mut crng)?;
        let c_values: Vec<f64> = estimates.iter().map(|e| e.value.max(1.0)).collect();
        let bound = eval_regret_bound(horizon, sigma, &config.eps_grid, &c_values)?;
        let cover = measure_cover(&class, &domain, bound.eps * bound.eps, &mut crng)?;
        let process = make_smooth_process(&ProcessFamily::tight(sigma), sigma, domain, horizon)?;

        let outcomes = map_trials(trials, |trial| {
            let seed = config.trial_seed(k * trials + trial);
            let (mut arng, _) = trial_rngs(seed);
            let target = &class[arng.gen_range(0..class.len())];
            let bundle = realizable_smooth_stream(target, &process, &mut arng)?;
            let batch = RewaBatch::tuned(&cover, &bundle.stream)?;
            let mut losses = Vec::with_capacity(config.runs_per_stream);
            let mut curve = Vec::new();
            for run in 0..config.runs_per_stream {
                let mut rng = run_rng(seed, run);
                if run == 0 {
                    let r = batch.play(&mut rng);
                    curve = r.cumulative_losses().into_iter().map(|l| l as f64).collect();
                    losses.push(r.learner_loss as f64);
                } else {
                    losses.push(batch.play_loss(&mut rng) as f64);
                }
            }
            let s = mean_se(&losses);
            let mut record = TrialRecord::new(group.clone(), trial, seed, horizon);
            record.learner_loss = Some(s.mean);
            record.comparator_loss = Some(0);
            record.regret = Some(s.mean);
            record.regret_se = (config.runs_per_stream > 1).then_some(s.se);
            record.bound = Some(bound.value);
            record.distinct = Some(bundle.distinct);
            Ok((record, curve))
        })?;

        let regrets: Vec<f64> = outcomes.iter().map(|(r, _)| r.regret.expect("set")).collect();
        let r = mean_se(&regrets);
        for (statistic, value, se) in [
            ("mean_regret", r.mean, Some(r.se)),
            ("bound", bound.value, None),
            ("bound_eps", bound.eps, None),
            ("cover_size", cover.len() as f64, None),
        ] {
            report.summary.push(SummaryRow {
                group: group.clone(),
                statistic: statistic.into(),
                value,
                se,
                trials,
            });
        }
        report.bounds.push(NamedValue {
            name: format!("entropy_bound_sigma{sigma}"),
            value: bound.value,
        });
        report.bounds.push(NamedValue {
            name: format!("cover_rewa_bound_sigma{sigma}"),
            value: rewa_regret_bound(horizon, cover.len()),
        });
        report.flags.push(Flag::at_most(
            &format!("sufficiency_bound_sigma{sigma}"),
            "entropy sufficiency bound 6 inf(eps T / sigma + sqrt(T ln C))",
            r.mean,
            bound.value,
            format!(
                "mean regret {:.2} ± {:.2} over {trials} trials, cover of {} at scale {:.6}",
                r.mean,
                r.se,
                cover.len(),
                bound.eps * bound.eps
            ),
        ));

        let mut points = Vec::with_capacity(horizon);
        let mut column = vec![0.0; outcomes.len()];
        for step in 0..horizon {
            for (c, (_, curve)) in column.iter_mut().zip(&outcomes) {
                *c = curve[step];
            }
            let s = mean_se(&column);
            points.push(PlotPoint {
                x: (step + 1) as f64,
                y: s.mean,
                lo: s.mean - s.se,
                hi: s.mean + s.se,
            });
        }
        report.series.push(PlotSeries {
            name: format!("regret_vs_t_sigma{sigma}"),
            x_label: "t".into(),
            y_label: "mean cumulative regret".into(),
            points,
        });
        report.series.push(PlotSeries {
            name: format!("bound_terms_sigma{sigma}"),
            x_label: "eps".into(),
            y_label: "bound at eps".into(),
            points: bound
                .terms
                .iter()
                .map(|t| PlotPoint {
                    x: t.eps,
                    y: t.value,
                    lo: t.value,
                    hi: t.value,
                })
                .collect(),
        });
        report.complexity.push(ComplexityProfile {
            sigma,
            estimates,
            bound,
            cover_size: cover.len(),
        });
        report.records.extend(outcomes.into_iter().map(|(r, _)| r));
    }
    Ok(report)
}
