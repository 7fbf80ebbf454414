use crate::codec::exhaustive_report;
use crate::error::{Error, Result};
use crate::fnn::{DenseNetwork, OutputThreshold, WeightMatrix};
use crate::task::Task;

use super::data::{Dataset, TrainSample};

/// Squared error `sum_j (target_j - output_j)^2`.
pub fn sq_loss(sample: &TrainSample, net: &DenseNetwork) -> Result<f64> {
    let out = net.forward(&sample.input)?;
    if out.len() != sample.target.len() {
        return Err(Error::shape(
            "sample target",
            out.len(),
            sample.target.len(),
        ));
    }
    Ok(out
        .iter()
        .zip(&sample.target)
        .map(|(o, t)| (t - o) * (t - o))
        .sum())
}

/// Gradient of [`sq_loss`] with respect to every weight, shaped like
/// `net.weights()`.
pub fn backprop_gradient(net: &DenseNetwork, sample: &TrainSample) -> Result<Vec<WeightMatrix>> {
    let acts = net.forward_layers(&sample.input)?;
    let layers = net.layers();
    let depth = layers.len() - 1;
    let output = &acts[depth];
    if output.len() != sample.target.len() {
        return Err(Error::shape(
            "sample target",
            output.len(),
            sample.target.len(),
        ));
    }

    // delta[j] = dLoss / d(pre-activation sum of unit j) for the current layer.
    let mut delta: Vec<f64> = output
        .iter()
        .zip(&sample.target)
        .map(|(&o, &t)| -2.0 * (t - o) * layers[depth].activation.derivative_at_output(o))
        .collect();

    let mut grads: Vec<WeightMatrix> = net
        .weights()
        .iter()
        .map(|w| WeightMatrix::zeros(w.rows(), w.cols()))
        .collect();

    for k in (1..=depth).rev() {
        let prev = &acts[k - 1];
        let grad = &mut grads[k - 1];
        for (i, &a) in prev.iter().enumerate() {
            for (j, &d) in delta.iter().enumerate() {
                grad.set(i, j, a * d);
            }
        }
        if k > 1 {
            let w = &net.weights()[k - 1];
            let act = layers[k - 1].activation;
            delta = (0..layers[k - 1].size)
                .map(|i| {
                    let back: f64 = delta
                        .iter()
                        .enumerate()
                        .map(|(j, &d)| w.get(i, j) * d)
                        .sum();
                    back * act.derivative_at_output(prev[i])
                })
                .collect();
        }
    }
    Ok(grads)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackpropConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub sample_count: usize,
    /// Stop after the first epoch whose thresholded network matches the task
    /// oracle on every input.
    pub early_stop_on_exact: bool,
    pub seed: u64,
}

impl Default for BackpropConfig {
    fn default() -> Self {
        BackpropConfig {
            learning_rate: 0.01,
            max_epochs: 7000,
            sample_count: 8000,
            early_stop_on_exact: true,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BackpropOutcome {
    pub net: DenseNetwork,
    /// Mean per-sample loss of each epoch, measured before each update.
    pub epoch_losses: Vec<f64>,
    /// Whether the final network reproduces the oracle exactly; `None` when
    /// no task was supplied.
    pub exact: Option<bool>,
}

impl BackpropOutcome {
    pub fn epochs_run(&self) -> usize {
        self.epoch_losses.len()
    }
}

/// Per-sample gradient descent in dataset order.
pub fn backprop_train(
    mut net: DenseNetwork,
    ds: &Dataset,
    cfg: &BackpropConfig,
    task: Option<&Task>,
) -> Result<BackpropOutcome> {
    if cfg.learning_rate.is_nan() || cfg.learning_rate <= 0.0 {
        return Err(Error::Invalid(format!(
            "learning rate {} must be positive",
            cfg.learning_rate
        )));
    }
    if ds.is_empty() {
        return Err(Error::Invalid("dataset is empty".into()));
    }
    if let Some(task) = task {
        task.check_network(&net)?;
    }
    let threshold = OutputThreshold::default();
    let mut epoch_losses = Vec::new();
    let mut exact = None;

    for epoch in 1..=cfg.max_epochs {
        let mut total = 0.0;
        for sample in ds.iter() {
            total += sq_loss(sample, &net)?;
            let grads = backprop_gradient(&net, sample)?;
            for (w, g) in net.weights_mut().iter_mut().zip(&grads) {
                for (wv, gv) in w.as_mut_slice().iter_mut().zip(g.as_slice()) {
                    *wv -= cfg.learning_rate * gv;
                }
            }
        }
        let mean = total / ds.len() as f64;
        if !mean.is_finite() || net.check_finite().is_err() {
            return Err(Error::Diverged { epoch });
        }
        epoch_losses.push(mean);

        if let Some(task) = task {
            let ok = exhaustive_report(&net, task, threshold)?.is_exact();
            exact = Some(ok);
            if ok && cfg.early_stop_on_exact {
                break;
            }
        }
    }
    Ok(BackpropOutcome {
        net,
        epoch_losses,
        exact,
    })
}
