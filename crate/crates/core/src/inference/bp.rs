//! Loopy belief propagation for the Ising posterior of the model, in
//! magnetization form: `m_{i→j} = tanh(Σ_{k∈∂i∖j} atanh(tanh(β₀J_ki)·m_{k→i}))`.

use rand::Rng;

use super::{DetectionOutcome, Method};
use crate::error::{Error, Result};
use crate::model::{beta0, CbmInstance, Labeling};
use crate::operators::{DirectedEdgeIndex, OperatorBundle};
use crate::rng::{substream, tag};

const CLAMP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    /// Weight of the previous message in each update.
    pub damping: f64,
    /// Stop once the largest message change in a sweep falls below this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Messages start uniform in `[−init_scale, init_scale]`.
    pub init_scale: f64,
    pub seed: u64,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self { damping: 0.5, tol: 1e-6, max_sweeps: 500, init_scale: 0.1, seed: 0 }
    }
}

impl BpConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InvalidParameter(format!("damping must lie in [0, 1), got {}", self.damping)));
        }
        if !(self.tol > 0.0) || self.max_sweeps == 0 {
            return Err(Error::InvalidParameter("BP needs tol > 0 and at least one sweep".into()));
        }
        if !(0.0..=1.0).contains(&self.init_scale) {
            return Err(Error::InvalidParameter(format!("init_scale must lie in [0, 1], got {}", self.init_scale)));
        }
        Ok(())
    }
}

/// Messages on directed edges, indexed like [`DirectedEdgeIndex`]: `messages[k]` is `m_{source(k)→target(k)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BpState {
    pub messages: Vec<f64>,
    pub beta0: f64,
    pub sweeps: usize,
    pub max_delta: f64,
}

impl BpState {
    pub fn zeros(edges: &DirectedEdgeIndex, beta0: f64) -> Self {
        Self { messages: vec![0.0; edges.len()], beta0, sweeps: 0, max_delta: 0.0 }
    }
}

fn cavity_field(t: f64, m: f64) -> f64 {
    (t * m).clamp(-CLAMP, CLAMP).atanh()
}

/// Node fields `Σ_{k∈∂i} atanh(tanh(β₀J_ki)·m_{k→i})`, plus the per-edge terms they sum.
fn fields(bundle: &OperatorBundle, state: &BpState, terms: &mut [f64]) -> Vec<f64> {
    let edges = bundle.edges();
    let mut node = vec![0.0; bundle.n()];
    for (k, term) in terms.iter_mut().enumerate() {
        let t = (state.beta0 * edges.weight(k)).tanh();
        *term = cavity_field(t, state.messages[k]);
        node[edges.target(k)] += *term;
    }
    node
}

/// One synchronous damped sweep; returns the largest message change.
pub fn bp_sweep(bundle: &OperatorBundle, state: &mut BpState, damping: f64) -> f64 {
    let edges = bundle.edges();
    let mut terms = vec![0.0; edges.len()];
    let node = fields(bundle, state, &mut terms);
    let mut max_delta = 0.0f64;
    for k in 0..edges.len() {
        let fresh = (node[edges.source(k)] - terms[edges.reverse(k)]).tanh();
        let old = state.messages[k];
        let next = damping * old + (1.0 - damping) * fresh;
        max_delta = max_delta.max((next - old).abs());
        state.messages[k] = next;
    }
    state.sweeps += 1;
    state.max_delta = max_delta;
    max_delta
}

/// Marginal magnetizations `tanh(Σ_{k∈∂i} atanh(tanh(β₀J_ki)·m_{k→i}))`.
pub fn marginals(bundle: &OperatorBundle, state: &BpState) -> Vec<f64> {
    let mut terms = vec![0.0; bundle.edges().len()];
    fields(bundle, state, &mut terms).into_iter().map(f64::tanh).collect()
}

/// Run BP assuming noise level `epsilon_assumed`. Always yields labels; `converged`
/// records whether the sweep tolerance was met.
pub fn bp_run(instance: &CbmInstance, epsilon_assumed: f64, cfg: &BpConfig) -> Result<DetectionOutcome> {
    if epsilon_assumed == 0.0 {
        return Err(Error::InfiniteCoupling(0.0));
    }
    if !(epsilon_assumed > 0.0 && epsilon_assumed < 0.5) {
        return Err(Error::InvalidParameter(format!("BP needs 0 < epsilon < 0.5, got {epsilon_assumed}")));
    }
    cfg.validate()?;
    let bundle = OperatorBundle::new(instance);
    let mut state = BpState::zeros(bundle.edges(), beta0(epsilon_assumed)?);
    let mut rng = substream(cfg.seed, tag::BP_INIT, 0);
    for m in &mut state.messages {
        *m = rng.random_range(-cfg.init_scale..=cfg.init_scale);
    }

    let mut converged = false;
    while state.sweeps < cfg.max_sweeps {
        if bp_sweep(&bundle, &mut state, cfg.damping) < cfg.tol {
            converged = true;
            break;
        }
    }

    let mut out = DetectionOutcome::failure(Method::BP, cfg.seed, "");
    out.success = true;
    out.reason = None;
    out.labels = Some(Labeling::from_signs(&marginals(&bundle, &state)));
    out.iterations = state.sweeps;
    out.residual = Some(state.max_delta);
    out.converged = converged;
    Ok(out)
}
