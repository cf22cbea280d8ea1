//! Label recovery from a censored block model instance.

mod bp;
mod popdyn;
mod spectral;

pub use bp::{bp_run, bp_sweep, marginals, BpConfig, BpState};
pub use popdyn::{population_dynamics, PopDynConfig};
pub use spectral::{algorithm1, algorithm2, algorithm2_at};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::eigen::SolverConfig;
use crate::error::{Error, Result};
use crate::model::{overlap, CbmInstance, Labeling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Leading eigenvector of the non-backtracking operator (via `B′`).
    NB,
    /// Smallest eigenvector of the Bethe Hessian.
    BH,
    /// Loopy belief propagation with the true noise level.
    BP,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::NB, Method::BH, Method::BP];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::NB => "NB",
            Method::BH => "BH",
            Method::BP => "BP",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NB" => Ok(Method::NB),
            "BH" => Ok(Method::BH),
            "BP" => Ok(Method::BP),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?} (expected NB, BH or BP)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOutcome {
    pub method: Method,
    pub success: bool,
    pub labels: Option<Labeling>,
    /// Leading eigenvalue of `B′` (NB only).
    pub lambda1: Option<f64>,
    /// Smallest eigenvalue of the Bethe Hessian (BH only).
    pub lambda_min_h: Option<f64>,
    /// Against the planted labels, when labels were produced.
    pub overlap: Option<f64>,
    /// Matrix-vector products, or BP sweeps.
    pub iterations: usize,
    /// Eigen residual, or the last BP sweep's largest message change.
    pub residual: Option<f64>,
    pub converged: bool,
    pub seed: u64,
    /// Why detection failed.
    pub reason: Option<String>,
}

impl DetectionOutcome {
    pub(crate) fn failure(method: Method, seed: u64, reason: impl Into<String>) -> Self {
        Self {
            method,
            success: false,
            labels: None,
            lambda1: None,
            lambda_min_h: None,
            overlap: None,
            iterations: 0,
            residual: None,
            converged: false,
            seed,
            reason: Some(reason.into()),
        }
    }

    /// Fill `overlap` from the instance's planted labels.
    pub fn score(&mut self, instance: &CbmInstance) -> Result<()> {
        if let Some(labels) = &self.labels {
            self.overlap = Some(overlap(&instance.truth(), labels)?);
        }
        Ok(())
    }

    /// Overlap with failures counted as zero.
    pub fn overlap_or_zero(&self) -> f64 {
        self.overlap.unwrap_or(0.0)
    }

    /// Single-line JSON: `method, success, lambda1, lambda_min_H, overlap, iterations, residual, seed`.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line {
            method: &'static str,
            success: bool,
            lambda1: Option<f64>,
            #[serde(rename = "lambda_min_H")]
            lambda_min_h: Option<f64>,
            overlap: Option<f64>,
            iterations: usize,
            residual: Option<f64>,
            seed: u64,
        }
        let line = Line {
            method: self.method.as_str(),
            success: self.success,
            lambda1: self.lambda1,
            lambda_min_h: self.lambda_min_h,
            overlap: self.overlap,
            iterations: self.iterations,
            residual: self.residual,
            seed: self.seed,
        };
        serde_json::to_string(&line).expect("plain struct serializes")
    }
}

#[derive(Debug, Clone, Default)]
pub struct DetectOptions {
    pub solver: SolverConfig,
    /// Noise level assumed by BP; required for [`Method::BP`].
    pub epsilon: Option<f64>,
    pub bp: BpConfig,
}

/// Run `method` on `instance` and score the result against the planted labels.
pub fn detect(instance: &CbmInstance, method: Method, options: &DetectOptions) -> Result<DetectionOutcome> {
    let mut out = match method {
        Method::NB => algorithm1(instance, &options.solver)?,
        Method::BH => algorithm2(instance, &options.solver)?,
        Method::BP => {
            let eps = options.epsilon.ok_or(Error::MissingOption("epsilon"))?;
            bp_run(instance, eps, &options.bp)?
        }
    };
    out.score(instance)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate, CbmParams};

    #[test]
    fn method_parsing() {
        assert_eq!("nb".parse::<Method>().unwrap(), Method::NB);
        assert_eq!(" BH".parse::<Method>().unwrap(), Method::BH);
        assert!("xx".parse::<Method>().is_err());
        assert_eq!(Method::BP.to_string(), "BP");
    }

    #[test]
    fn json_line_field_names() {
        let mut o = DetectionOutcome::failure(Method::BH, 9, "nope");
        o.lambda_min_h = Some(0.5);
        let line = o.to_json_line();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut want = vec!["method", "success", "lambda1", "lambda_min_H", "overlap", "iterations", "residual", "seed"];
        want.sort_unstable();
        let mut keys = keys;
        keys.sort_unstable();
        assert_eq!(keys, want);
        assert_eq!(v["lambda_min_H"], 0.5);
        assert!(v["lambda1"].is_null());
    }

    #[test]
    fn bp_requires_epsilon() {
        let inst = generate(&CbmParams::new(50, 3.0, 0.1, 1).unwrap()).unwrap();
        let err = detect(&inst, Method::BP, &DetectOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingOption("epsilon")));
    }

    #[test]
    fn nb_dispatch_fills_lambda1_and_overlap() {
        let inst = generate(&CbmParams::new(2000, 8.0, 0.1, 4).unwrap()).unwrap();
        let o = detect(&inst, Method::NB, &DetectOptions::default()).unwrap();
        assert!(o.success, "{o:?}");
        assert!(o.lambda1.is_some());
        assert!(o.overlap.unwrap() > 0.5);
    }
}
