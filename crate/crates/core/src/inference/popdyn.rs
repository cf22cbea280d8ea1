//! Population dynamics for the BP fixed point on the Poisson tree, with the
//! planted labels gauged to all `+1`.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::model::beta0;
use crate::rng::{substream, tag};

const CLAMP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopDynConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub pop_size: usize,
    pub equilibration_sweeps: usize,
    pub measurement_sweeps: usize,
    pub seed: u64,
    /// Replaces `β₀(ε)` as the coupling, e.g. to switch it off.
    pub beta0_override: Option<f64>,
}

impl PopDynConfig {
    pub fn new(alpha: f64, epsilon: f64, seed: u64) -> Self {
        Self {
            alpha,
            epsilon,
            pop_size: 10_000,
            equilibration_sweeps: 200,
            measurement_sweeps: 200,
            seed,
            beta0_override: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.epsilon == 0.0 {
            return Err(Error::InfiniteCoupling(0.0));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 0.5), got {}", self.epsilon)));
        }
        if self.pop_size < 100 {
            return Err(Error::InvalidParameter(format!("pop_size must be at least 100, got {}", self.pop_size)));
        }
        if self.equilibration_sweeps == 0 || self.measurement_sweeps == 0 {
            return Err(Error::InvalidParameter("sweeps must be at least 1".into()));
        }
        if let Some(b) = self.beta0_override {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter(format!("beta0 override must be finite and non-negative, got {b}")));
            }
        }
        Ok(())
    }
}

struct Sampler {
    pop: Vec<f64>,
    degree: Poisson<f64>,
    t: f64,
    epsilon: f64,
    rng: crate::rng::StreamRng,
}

impl Sampler {
    /// `tanh(Σ atanh(tanh(β₀J)·m))` over `d` random population members.
    fn field(&mut self, d: usize) -> f64 {
        let mut h = 0.0;
        for _ in 0..d {
            let m = self.pop[self.rng.random_range(0..self.pop.len())];
            let j = if self.rng.random::<f64>() < self.epsilon { -1.0 } else { 1.0 };
            h += (j * self.t * m).clamp(-CLAMP, CLAMP).atanh();
        }
        h.tanh()
    }

    fn draw_degree(&mut self) -> usize {
        self.degree.sample(&mut self.rng) as usize
    }

    fn sweep(&mut self) {
        for _ in 0..self.pop.len() {
            // excess degree of a Poisson graph is again Poisson(α)
            let d = self.draw_degree();
            let m = self.field(d);
            let slot = self.rng.random_range(0..self.pop.len());
            self.pop[slot] = m;
        }
    }
}

/// Asymptotic BP overlap `2(max(p, 1−p) − ½)`, `p = P(m > 0) + ½P(m = 0)` over full-degree marginals.
pub fn population_dynamics(cfg: &PopDynConfig) -> Result<f64> {
    cfg.validate()?;
    let b = match cfg.beta0_override {
        Some(b) => b,
        None => beta0(cfg.epsilon)?,
    };
    let mut rng = substream(cfg.seed, tag::POPDYN, 0);
    let pop = (0..cfg.pop_size).map(|_| rng.random_range(-0.1..=0.1)).collect();
    let degree = Poisson::new(cfg.alpha).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut s = Sampler { pop, degree, t: b.tanh(), epsilon: cfg.epsilon, rng };

    for _ in 0..cfg.equilibration_sweeps {
        s.sweep();
    }
    let (mut positive, mut zero, mut total) = (0u64, 0u64, 0u64);
    for _ in 0..cfg.measurement_sweeps {
        s.sweep();
        for _ in 0..cfg.pop_size {
            let d = s.draw_degree();
            let m = s.field(d);
            if m > 0.0 {
                positive += 1;
            } else if m == 0.0 {
                zero += 1;
            }
            total += 1;
        }
    }
    let p = (positive as f64 + 0.5 * zero as f64) / total as f64;
    Ok(2.0 * (p.max(1.0 - p) - 0.5))
}
