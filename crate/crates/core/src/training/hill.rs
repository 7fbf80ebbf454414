//! Hill climbing over the three weights of a single linear unit.
//!
//! Each iteration draws one random sample, scores all 27 moves
//! `w + delta * e` with `e` in `{-1, 0, 1}^3`, and keeps the move with the
//! strictly lowest loss. Moves are scanned with coordinate values ordered
//! `0, -1, 1`, first coordinate most significant, so `e = (0, 0, 0)` comes
//! first and wins every tie against it.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fnn::DenseNetwork;
use crate::task::TaskSpec;

use super::backprop::sq_loss;
use super::data::TrainSample;
use super::{seeded_rng, Stream};

const STEP_VALUES: [f64; 3] = [0.0, -1.0, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct HillClimbConfig {
    pub delta: f64,
    pub iterations: usize,
    pub init_low: f64,
    pub init_high: f64,
    pub seed: u64,
    /// Starting weights; drawn from `[init_low, init_high]` when `None`.
    pub initial: Option<[f64; 3]>,
}

impl Default for HillClimbConfig {
    fn default() -> Self {
        HillClimbConfig {
            delta: 0.01,
            iterations: 6000,
            init_low: -1.0,
            init_high: 1.0,
            seed: 42,
            initial: None,
        }
    }
}

impl HillClimbConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Invalid(format!(
                "delta {} not in (0, 1)",
                self.delta
            )));
        }
        if self.init_low.is_nan() || self.init_high.is_nan() || self.init_low >= self.init_high {
            return Err(Error::Invalid(format!(
                "initialization bounds [{}, {}] are not ordered",
                self.init_low, self.init_high
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Invalid("iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HillClimbOutcome {
    pub net: DenseNetwork,
    /// Weights before the first iteration followed by the weights after each
    /// iteration.
    pub trace: Vec<[f64; 3]>,
}

impl HillClimbOutcome {
    pub fn final_weights(&self) -> [f64; 3] {
        self.trace[self.trace.len() - 1]
    }

    /// CSV with header `iter,w1,w2,w3`; row 0 holds the initial weights.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iter,w1,w2,w3\n");
        for (i, w) in self.trace.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", i, w[0], w[1], w[2]));
        }
        out
    }
}

fn moves() -> impl Iterator<Item = [f64; 3]> {
    STEP_VALUES.into_iter().flat_map(|a| {
        STEP_VALUES
            .into_iter()
            .flat_map(move |b| STEP_VALUES.into_iter().map(move |c| [a, b, c]))
    })
}

pub fn hill_climb_train(cfg: &HillClimbConfig, spec: &TaskSpec) -> Result<HillClimbOutcome> {
    cfg.validate()?;
    let mut net = DenseNetwork::zeros(spec.layers.clone())?;
    if net.weight_count() != 3 {
        return Err(Error::Unsupported(format!(
            "hill climbing needs a network with exactly 3 weights, {} has {}",
            net.architecture(),
            net.weight_count()
        )));
    }
    spec.task.check_network(&net)?;

    let mut w = match cfg.initial {
        Some(w) => w,
        None => {
            let mut rng = seeded_rng(cfg.seed, Stream::Init);
            let mut draw = || rng.gen_range(cfg.init_low..=cfg.init_high);
            [draw(), draw(), draw()]
        }
    };
    let mut samples = seeded_rng(cfg.seed, Stream::HillSamples);
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(w);

    for _ in 0..cfg.iterations {
        let input = spec.task.random_input(&mut samples);
        let target = spec.task.oracle(&input)?;
        let sample = TrainSample::from_bits(&input, &target);

        let mut best = w;
        net.set_weights_flat(&w)?;
        let mut best_loss = sq_loss(&sample, &net)?;
        for e in moves() {
            let candidate = [
                w[0] + cfg.delta * e[0],
                w[1] + cfg.delta * e[1],
                w[2] + cfg.delta * e[2],
            ];
            net.set_weights_flat(&candidate)?;
            let loss = sq_loss(&sample, &net)?;
            if loss < best_loss {
                best = candidate;
                best_loss = loss;
            }
        }
        w = best;
        trace.push(w);
    }
    net.set_weights_flat(&w)?;
    Ok(HillClimbOutcome { net, trace })
}
