//! Two-layer perceptron `y = W2 · tanh(W1 x + b1) + b2` trained on a
//! sum-of-squares loss with scaled conjugate gradient. With a square,
//! bottlenecked shape it is the autoencoder used by the imputer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Network weights. Matrices are row-major: `w1[j * input_dim + i]` connects
/// input `i` to hidden unit `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNetwork {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub output_dim: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_cycles: usize,
    /// Stop once the gradient norm falls below this.
    pub grad_tolerance: f64,
    /// Seed for weight initialization.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_cycles: 1200,
            grad_tolerance: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    /// Loss at the start and after every accepted step.
    pub losses: Vec<f64>,
    pub cycles: usize,
}

impl TrainTrace {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("trace always holds the initial loss")
    }
}

impl MlpNetwork {
    /// All-zero network.
    pub fn zeros(input_dim: usize, hidden_dim: usize, output_dim: usize) -> Result<Self> {
        if input_dim == 0 || hidden_dim == 0 || output_dim == 0 {
            return Err(Error::invalid("network dimensions must be positive"));
        }
        Ok(MlpNetwork {
            input_dim,
            hidden_dim,
            output_dim,
            w1: vec![0.0; hidden_dim * input_dim],
            b1: vec![0.0; hidden_dim],
            w2: vec![0.0; output_dim * hidden_dim],
            b2: vec![0.0; output_dim],
        })
    }

    /// Weights drawn uniformly from ±1/√fan_in of their layer.
    pub fn init(input_dim: usize, hidden_dim: usize, output_dim: usize, seed: u64) -> Result<Self> {
        let mut net = Self::zeros(input_dim, hidden_dim, output_dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r1 = 1.0 / (input_dim as f64).sqrt();
        let r2 = 1.0 / (hidden_dim as f64).sqrt();
        for w in net.w1.iter_mut().chain(net.b1.iter_mut()) {
            *w = rng.random_range(-r1..=r1);
        }
        for w in net.w2.iter_mut().chain(net.b2.iter_mut()) {
            *w = rng.random_range(-r2..=r2);
        }
        Ok(net)
    }

    /// Square network with a narrower hidden layer.
    pub fn autoencoder(dim: usize, hidden_dim: usize, seed: u64) -> Result<Self> {
        if hidden_dim >= dim {
            return Err(Error::invalid(format!(
                "autoencoder hidden layer ({hidden_dim}) must be smaller than the input ({dim})"
            )));
        }
        Self::init(dim, hidden_dim, dim, seed)
    }

    pub fn is_autoencoder(&self) -> bool {
        self.input_dim == self.output_dim && self.hidden_dim < self.input_dim
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// Parameters flattened as `[w1, b1, w2, b2]`. Gradients use the same layout.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.param_count());
        p.extend_from_slice(&self.w1);
        p.extend_from_slice(&self.b1);
        p.extend_from_slice(&self.w2);
        p.extend_from_slice(&self.b2);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.param_count());
        let (w1, rest) = p.split_at(self.w1.len());
        let (b1, rest) = rest.split_at(self.b1.len());
        let (w2, b2) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2.copy_from_slice(b2);
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::invalid(format!(
                "input has {} components, network expects {}",
                x.len(),
                self.input_dim
            )));
        }
        Ok(())
    }

    fn check_batch(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<()> {
        if inputs.len() != targets.len() {
            return Err(Error::invalid(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        for (x, t) in inputs.iter().zip(targets) {
            self.check_input(x)?;
            if t.len() != self.output_dim {
                return Err(Error::invalid(format!(
                    "target has {} components, network outputs {}",
                    t.len(),
                    self.output_dim
                )));
            }
        }
        Ok(())
    }

    fn hidden(&self, x: &[f64]) -> Vec<f64> {
        (0..self.hidden_dim)
            .map(|j| {
                let row = &self.w1[j * self.input_dim..(j + 1) * self.input_dim];
                let a: f64 = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + self.b1[j];
                a.tanh()
            })
            .collect()
    }

    fn output(&self, z: &[f64]) -> Vec<f64> {
        (0..self.output_dim)
            .map(|k| {
                let row = &self.w2[k * self.hidden_dim..(k + 1) * self.hidden_dim];
                row.iter().zip(z).map(|(w, zj)| w * zj).sum::<f64>() + self.b2[k]
            })
            .collect()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.output(&self.hidden(x)))
    }

    /// Sum over instances and outputs of the squared error.
    pub fn loss(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
        self.check_batch(inputs, targets)?;
        Ok(self.loss_unchecked(inputs, targets))
    }

    fn loss_unchecked(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> f64 {
        inputs
            .iter()
            .zip(targets)
            .map(|(x, t)| {
                let y = self.output(&self.hidden(x));
                y.iter().zip(t).map(|(yk, tk)| (yk - tk).powi(2)).sum::<f64>()
            })
            .sum()
    }

    /// Loss divided by the number of instances and outputs.
    pub fn mse(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
        Ok(self.loss(inputs, targets)? / (inputs.len() * self.output_dim).max(1) as f64)
    }

    /// Backpropagated gradient of [`MlpNetwork::loss`], flattened like
    /// [`MlpNetwork::params`].
    pub fn gradient(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.check_batch(inputs, targets)?;
        Ok(self.gradient_unchecked(inputs, targets))
    }

    fn gradient_unchecked(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Vec<f64> {
        let (ni, nh, no) = (self.input_dim, self.hidden_dim, self.output_dim);
        let mut g = vec![0.0; self.param_count()];
        let (gw1, rest) = g.split_at_mut(nh * ni);
        let (gb1, rest) = rest.split_at_mut(nh);
        let (gw2, gb2) = rest.split_at_mut(no * nh);
        let mut delta_hidden = vec![0.0; nh];
        for (x, t) in inputs.iter().zip(targets) {
            let z = self.hidden(x);
            let y = self.output(&z);
            delta_hidden.iter_mut().for_each(|d| *d = 0.0);
            for k in 0..no {
                let dk = 2.0 * (y[k] - t[k]);
                gb2[k] += dk;
                for j in 0..nh {
                    gw2[k * nh + j] += dk * z[j];
                    delta_hidden[j] += dk * self.w2[k * nh + j];
                }
            }
            for j in 0..nh {
                let dj = delta_hidden[j] * (1.0 - z[j] * z[j]);
                gb1[j] += dj;
                for i in 0..ni {
                    gw1[j * ni + i] += dj * x[i];
                }
            }
        }
        g
    }

    /// Scaled conjugate gradient (Møller) on the sum-of-squares loss.
    ///
    /// No line search: the step length comes from a finite-difference
    /// curvature estimate along the search direction, damped by an adaptive
    /// scalar λ. Only steps that lower the loss are accepted.
    pub fn train_scg(
        &mut self,
        inputs: &[Vec<f64>],
        targets: &[Vec<f64>],
        config: &TrainConfig,
    ) -> Result<TrainTrace> {
        if inputs.is_empty() {
            return Err(Error::invalid("no training data"));
        }
        if config.max_cycles == 0 {
            return Err(Error::invalid("max_cycles must be at least 1"));
        }
        self.check_batch(inputs, targets)?;

        const SIGMA0: f64 = 1e-4;
        const LAMBDA_MIN: f64 = 1e-15;
        const LAMBDA_MAX: f64 = 1e100;

        let n = self.param_count();
        let eval = |net: &mut MlpNetwork, p: &[f64]| {
            net.set_params(p);
            net.loss_unchecked(inputs, targets)
        };
        let grad_at = |net: &mut MlpNetwork, p: &[f64]| {
            net.set_params(p);
            net.gradient_unchecked(inputs, targets)
        };

        let mut x = self.params();
        let mut f_old = self.loss_unchecked(inputs, targets);
        if !f_old.is_finite() {
            return Err(Error::Divergence { cycle: 0 });
        }
        let mut trace = TrainTrace {
            losses: vec![f_old],
            cycles: 0,
        };
        let mut g_new = self.gradient_unchecked(inputs, targets);
        if dot(&g_new, &g_new).sqrt() < config.grad_tolerance {
            return Ok(trace);
        }
        let mut g_old = g_new.clone();
        let mut d: Vec<f64> = g_new.iter().map(|g| -g).collect();
        let mut lambda = 1e-6;
        let mut success = true;
        let mut n_success = 0;
        let (mut mu, mut kappa, mut gamma) = (0.0, 0.0, 0.0);

        for cycle in 1..=config.max_cycles {
            trace.cycles = cycle;
            if success {
                mu = dot(&d, &g_new);
                if mu >= 0.0 {
                    d = g_new.iter().map(|g| -g).collect();
                    mu = dot(&d, &g_new);
                }
                kappa = dot(&d, &d);
                if kappa < f64::EPSILON {
                    break;
                }
                // curvature along d by a forward difference of the gradient
                let sigma = SIGMA0 / kappa.sqrt();
                let probe: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + sigma * di).collect();
                let g_plus = grad_at(self, &probe);
                gamma = d
                    .iter()
                    .zip(g_plus.iter().zip(&g_new))
                    .map(|(di, (gp, gn))| di * (gp - gn))
                    .sum::<f64>()
                    / sigma;
            }

            // make the local Hessian estimate positive definite
            let mut delta = gamma + lambda * kappa;
            if delta <= 0.0 {
                delta = lambda * kappa;
                lambda -= gamma / kappa;
            }
            let alpha = -mu / delta;
            let x_new: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            let f_new = eval(self, &x_new);
            if !f_new.is_finite() {
                self.set_params(&x);
                return Err(Error::Divergence { cycle });
            }
            // ratio of actual to predicted reduction
            let comparison = 2.0 * (f_new - f_old) / (alpha * mu);
            if comparison >= 0.0 {
                success = true;
                n_success += 1;
                x = x_new;
                f_old = f_new;
                trace.losses.push(f_new);
                g_old = std::mem::take(&mut g_new);
                g_new = grad_at(self, &x);
                if dot(&g_new, &g_new).sqrt() < config.grad_tolerance {
                    break;
                }
            } else {
                success = false;
            }

            if comparison < 0.25 {
                lambda = (4.0 * lambda).min(LAMBDA_MAX);
            }
            if comparison > 0.75 {
                lambda = (0.5 * lambda).max(LAMBDA_MIN);
            }

            if n_success == n {
                d = g_new.iter().map(|g| -g).collect();
                n_success = 0;
            } else if success {
                let beta = (dot(&g_old, &g_new) - dot(&g_new, &g_new)) / mu;
                d = d.iter().zip(&g_new).map(|(di, gi)| beta * di - gi).collect();
            }
        }
        self.set_params(&x);
        Ok(trace)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
