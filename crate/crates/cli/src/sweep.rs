//! Overlap-versus-α sweeps over freshly generated instances.

use std::io::{self, Write};

use anyhow::{bail, Context, Result};
use cbm_core::inference::BpConfig;
use cbm_core::model::{generate, CbmParams};
use cbm_core::rng::{child_seed, tag};
use cbm_core::{detect, DetectOptions, DetectionOutcome, Method, SolverConfig};
use rayon::prelude::*;

pub const CSV_HEADER: &str = "alpha,method,mean_overlap,stderr,success_rate,trials";

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub n: usize,
    pub epsilon: f64,
    pub alphas: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub solver: SolverConfig,
    pub bp: BpConfig,
}

impl SweepSpec {
    pub fn new(n: usize, epsilon: f64, alphas: Vec<f64>, trials: usize, methods: Vec<Method>, seed: u64) -> Self {
        Self { n, epsilon, alphas, trials, methods, seed, solver: SolverConfig::default(), bp: BpConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            bail!("alpha grid is empty");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.methods.is_empty() {
            bail!("method list is empty");
        }
        for &alpha in &self.alphas {
            CbmParams::new(self.n, alpha, self.epsilon, 0).with_context(|| format!("alpha = {alpha}"))?;
        }
        if self.methods.contains(&Method::BP) && !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            bail!("BP needs 0 < epsilon < 0.5, got {}", self.epsilon);
        }
        self.solver.validate()?;
        Ok(())
    }

    /// Seed of trial `trial` at grid point `alpha_index`.
    pub fn trial_seed(&self, alpha_index: usize, trial: usize) -> u64 {
        child_seed(self.seed, tag::TRIAL, ((alpha_index as u64) << 32) | trial as u64)
    }
}

/// `min, min + step, …` up to `max` (inclusive, with a relative slack of 1e-9 steps).
pub fn alpha_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !min.is_finite() || !max.is_finite() {
        bail!("alpha grid needs finite bounds and a positive step");
    }
    if max < min {
        bail!("alpha-max {max} is below alpha-min {min}");
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| ((min + k as f64 * step) * 1e9).round() / 1e9).collect())
}

/// Every method's outcome on one generated instance.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub alpha_index: usize,
    pub alpha: f64,
    pub trial: usize,
    pub seed: u64,
    pub outcomes: Vec<DetectionOutcome>,
}

/// Run all trials, in parallel on the current rayon pool. Records come back
/// ordered by `(alpha_index, trial)` whatever the scheduling.
pub fn run_trials(spec: &SweepSpec) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> =
        (0..spec.alphas.len()).flat_map(|a| (0..spec.trials).map(move |t| (a, t))).collect();
    jobs.par_iter()
        .map(|&(alpha_index, trial)| {
            let alpha = spec.alphas[alpha_index];
            let seed = spec.trial_seed(alpha_index, trial);
            let instance = generate(&CbmParams::new(spec.n, alpha, spec.epsilon, seed)?)?;
            let options = DetectOptions {
                solver: SolverConfig { seed, ..spec.solver },
                epsilon: Some(spec.epsilon),
                bp: BpConfig { seed, ..spec.bp },
            };
            let outcomes = spec
                .methods
                .iter()
                .map(|&m| detect(&instance, m, &options).with_context(|| format!("{m} at alpha {alpha}, trial {trial}")))
                .collect::<Result<Vec<_>>>()?;
            Ok(TrialRecord { alpha_index, alpha, trial, seed, outcomes })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub method: Method,
    pub mean_overlap: f64,
    pub stderr: f64,
    pub success_rate: f64,
    pub trials: usize,
}

/// Mean overlap per `(alpha, method)`, failures scored as overlap 0. Rows sorted by alpha, then method.
pub fn aggregate(records: &[TrialRecord]) -> Vec<SweepRow> {
    let mut records: Vec<&TrialRecord> = records.iter().collect();
    records.sort_by_key(|r| (r.alpha_index, r.trial));
    let mut rows = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let alpha_index = records[start].alpha_index;
        let end = start + records[start..].iter().take_while(|r| r.alpha_index == alpha_index).count();
        let group = &records[start..end];
        let mut methods: Vec<Method> = group[0].outcomes.iter().map(|o| o.method).collect();
        methods.sort();
        for method in methods {
            let outcomes: Vec<&DetectionOutcome> =
                group.iter().filter_map(|r| r.outcomes.iter().find(|o| o.method == method)).collect();
            let k = outcomes.len() as f64;
            let values: Vec<f64> = outcomes.iter().map(|o| o.overlap_or_zero()).collect();
            let mean = values.iter().sum::<f64>() / k;
            let stderr = if outcomes.len() > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt() / k.sqrt()
            } else {
                0.0
            };
            let success_rate = outcomes.iter().filter(|o| o.success).count() as f64 / k;
            rows.push(SweepRow {
                alpha: group[0].alpha,
                method,
                mean_overlap: mean,
                stderr,
                success_rate,
                trials: outcomes.len(),
            });
        }
        start = end;
    }
    rows
}

pub fn write_csv(rows: &[SweepRow], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{},{}", r.alpha, r.method, r.mean_overlap, r.stderr, r.success_rate, r.trials)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive_and_clean() {
        assert_eq!(alpha_grid(3.0, 8.0, 0.5).unwrap().len(), 11);
        assert_eq!(alpha_grid(0.1, 0.3, 0.1).unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(alpha_grid(2.0, 2.0, 1.0).unwrap(), vec![2.0]);
        assert!(alpha_grid(3.0, 2.0, 1.0).is_err());
        assert!(alpha_grid(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let spec = SweepSpec::new(100, 0.2, vec![3.0, 4.0], 3, vec![Method::NB], 7);
        let mut seeds: Vec<u64> = (0..2).flat_map(|a| (0..3).map(move |t| (a, t))).map(|(a, t)| spec.trial_seed(a, t)).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 6);
    }

    #[test]
    fn validation() {
        let ok = SweepSpec::new(100, 0.2, vec![3.0], 1, vec![Method::NB], 0);
        assert!(ok.validate().is_ok());
        assert!(SweepSpec { methods: vec![], ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { trials: 0, ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { alphas: vec![], ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { alphas: vec![200.0], ..ok.clone() }.validate().is_err());
        assert!(SweepSpec { epsilon: 0.0, methods: vec![Method::BP], ..ok }.validate().is_err());
    }

    #[test]
    fn aggregation_scores_failures_as_zero() {
        let spec = SweepSpec::new(400, 0.1, vec![1.5, 9.0], 3, vec![Method::BH, Method::NB], 3);
        let records = run_trials(&spec).unwrap();
        let rows = aggregate(&records);
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].alpha, rows[0].method), (1.5, Method::NB));
        assert_eq!((rows[1].alpha, rows[1].method), (1.5, Method::BH));
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.mean_overlap));
            assert!((0.0..=1.0).contains(&r.success_rate));
            assert_eq!(r.trials, 3);
        }
        assert!(rows[2].mean_overlap > 0.5);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(text.lines().count(), 5);
    }
}
