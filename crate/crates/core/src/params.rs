use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::Curvature;
use crate::scalar::Real;

/// Parameters shared by the generators and the log-loss.
///
/// `m` is the number of external links per new node and `ell` the net
/// number of internal links per step (negative for net deletion).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsoParams<F> {
    pub zeta: F,
    pub n_nodes: usize,
    pub m: F,
    pub ell: F,
    pub beta: F,
    pub temperature: F,
}

impl<F: Real> EpsoParams<F> {
    pub fn new(zeta: F, n_nodes: usize, m: F, ell: F, beta: F, temperature: F) -> Result<Self> {
        let p = Self {
            zeta,
            n_nodes,
            m,
            ell,
            beta,
            temperature,
        };
        p.validate()?;
        Ok(p)
    }

    /// PSO parameters: `zeta = 1`, `ell = 0`.
    pub fn pso(n_nodes: usize, m: F, beta: F, temperature: F) -> Result<Self> {
        Self::new(F::one(), n_nodes, m, F::zero(), beta, temperature)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        if !self.zeta.is_finite() || self.zeta <= F::zero() {
            return bad(format!("zeta must be > 0, got {}", self.zeta));
        }
        if self.n_nodes < 1 {
            return bad("N must be >= 1".into());
        }
        if !self.m.is_finite() || self.m < F::zero() {
            return bad(format!("m must be >= 0, got {}", self.m));
        }
        if !self.ell.is_finite() {
            return bad(format!("L must be finite, got {}", self.ell));
        }
        if !(self.beta > F::zero() && self.beta <= F::one()) {
            return bad(format!("beta must lie in (0, 1], got {}", self.beta));
        }
        if !(self.temperature >= F::zero() && self.temperature < F::one()) {
            return bad(format!("T must lie in [0, 1), got {}", self.temperature));
        }
        if self.m + self.ell < F::zero() {
            return bad(format!(
                "m + L must be >= 0, got {}",
                self.m + self.ell
            ));
        }
        Ok(())
    }

    pub fn curvature(&self) -> Curvature<F> {
        Curvature::new(self.zeta).expect("validated zeta")
    }

    pub fn with_n_nodes(mut self, n_nodes: usize) -> Self {
        self.n_nodes = n_nodes;
        self
    }

    /// Radius at birth, `(2/ζ) ln i` for 1-based birth index `i`.
    pub fn birth_radius(&self, i: usize) -> F {
        F::lit(2.0) / self.zeta * F::count(i).ln()
    }

    /// Radius at time `now` of the node born at `i`, after popularity fading.
    pub fn faded_radius(&self, i: usize, now: usize) -> F {
        self.beta * self.birth_radius(i) + (F::one() - self.beta) * self.birth_radius(now)
    }

    pub fn convert<G: Real>(&self) -> EpsoParams<G> {
        let c = |x: F| G::lit(x.to_f64_lossy());
        EpsoParams {
            zeta: c(self.zeta),
            n_nodes: self.n_nodes,
            m: c(self.m),
            ell: c(self.ell),
            beta: c(self.beta),
            temperature: c(self.temperature),
        }
    }
}
