use super::{DetectionOutcome, Method};
use crate::eigen::{power_leading, smallest_symmetric, LeadingOutcome, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{CbmInstance, Labeling};
use crate::operators::{build_bethe_hessian, build_bprime, OperatorBundle};

/// Non-backtracking detection: leading eigenpair of `B′`, accepted when it is
/// real and above `√α` with `α = 2m/n`. Labels are the signs of the second
/// half of the eigenvector.
pub fn algorithm1(instance: &CbmInstance, cfg: &SolverConfig) -> Result<DetectionOutcome> {
    let n = instance.n();
    if instance.m() == 0 {
        return Ok(DetectionOutcome::failure(Method::NB, cfg.seed, "instance has no edges"));
    }
    let bundle = OperatorBundle::new(instance);
    let bprime = build_bprime(&bundle);
    let threshold = instance.empirical_alpha().sqrt();

    match power_leading(&bprime, cfg)? {
        LeadingOutcome::NoRealLeader { modulus, iterations } => {
            let mut out = DetectionOutcome::failure(
                Method::NB,
                cfg.seed,
                format!("no real leading eigenvalue (growth rate {modulus:.4}, sqrt(alpha) {threshold:.4})"),
            );
            out.iterations = iterations;
            Ok(out)
        }
        LeadingOutcome::Converged(r) => {
            let mut out = DetectionOutcome::failure(Method::NB, cfg.seed, "");
            out.lambda1 = Some(r.value);
            out.iterations = r.iterations;
            out.residual = Some(r.residual);
            out.converged = true;
            if r.value > threshold {
                out.success = true;
                out.reason = None;
                out.labels = Some(Labeling::from_signs(&r.vector[n..]));
            } else {
                out.reason = Some(format!("lambda1 {:.4} is not above sqrt(alpha) {threshold:.4}", r.value));
            }
            Ok(out)
        }
    }
}

/// Bethe Hessian detection at `x = √(2m/n)`.
pub fn algorithm2(instance: &CbmInstance, cfg: &SolverConfig) -> Result<DetectionOutcome> {
    algorithm2_at(instance, instance.empirical_alpha().sqrt(), cfg)
}

/// Bethe Hessian detection at an arbitrary `x`: succeeds iff the smallest
/// eigenvalue of `H(x)` is strictly negative; labels are the signs of its eigenvector.
pub fn algorithm2_at(instance: &CbmInstance, x: f64, cfg: &SolverConfig) -> Result<DetectionOutcome> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("x must be finite, got {x}")));
    }
    let bundle = OperatorBundle::new(instance);
    let h = build_bethe_hessian(&bundle, x);
    let r = smallest_symmetric(&h, cfg)?;
    let mut out = DetectionOutcome::failure(Method::BH, cfg.seed, "");
    out.lambda_min_h = Some(r.value);
    out.iterations = r.iterations;
    out.residual = Some(r.residual);
    out.converged = r.converged;
    if r.value < 0.0 {
        out.success = true;
        out.reason = None;
        out.labels = Some(Labeling::from_signs(&r.vector));
    } else {
        out.reason = Some(format!("smallest eigenvalue {:.3e} of H is not negative", r.value));
    }
    Ok(out)
}
