//! Dense feed-forward networks.
//!
//! Layer 0 is the input layer. Every non-output layer may carry a bias unit:
//! a constant 1 appended after its `size` computed units. Bias units are never
//! computed from weights, and the output layer has none.
//!
//! The weight matrix feeding layer `k` has one row per unit of layer `k - 1`
//! (bias unit last) and one column per computed unit of layer `k`, so entry
//! `(i, j)` is the weight from source unit `i` to destination unit `j`.

mod format;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits::BitVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Linear,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Linear => x,
            Activation::Sigmoid => sigmoid(x),
        }
    }

    /// Derivative expressed through the unit's output value.
    #[inline]
    pub(crate) fn derivative_at_output(self, y: f64) -> f64 {
        match self {
            Activation::Linear => 1.0,
            Activation::Sigmoid => y * (1.0 - y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Linear => "linear",
            Activation::Sigmoid => "sigmoid",
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Activation::Linear),
            "sigmoid" => Ok(Activation::Sigmoid),
            other => Err(Error::Invalid(format!("unknown activation {:?}", other))),
        }
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    /// Computed units, not counting the bias unit.
    pub size: usize,
    pub activation: Activation,
    pub has_bias: bool,
}

impl LayerSpec {
    pub fn new(size: usize, activation: Activation, has_bias: bool) -> Self {
        LayerSpec {
            size,
            activation,
            has_bias,
        }
    }

    /// Width of this layer's output vector as seen by the next layer.
    pub fn width(&self) -> usize {
        self.size + self.has_bias as usize
    }
}

/// Parses an architecture string such as `5-12s-3b`.
///
/// Tokens are layer sizes joined by `-`. A size may be followed by `s`
/// (sigmoid) or `l` (linear, the default) and then `b`. On a non-output layer
/// `b` gives that layer a bias unit; on the output layer it gives every
/// non-output layer a bias unit. The input layer's activation is ignored.
pub fn parse_architecture(text: &str) -> Result<Vec<LayerSpec>> {
    let tokens: Vec<&str> = text.trim().split('-').collect();
    if tokens.len() < 2 {
        return Err(Error::Invalid(format!(
            "architecture {:?} needs at least an input and an output layer",
            text
        )));
    }
    let mut layers = Vec::with_capacity(tokens.len());
    let mut bias_everywhere = false;
    for (idx, token) in tokens.iter().enumerate() {
        let digits_end = token
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(token.len());
        let size: usize = token[..digits_end]
            .parse()
            .map_err(|_| Error::Invalid(format!("bad layer token {:?} in {:?}", token, text)))?;
        let mut activation = Activation::Linear;
        let mut bias = false;
        for c in token[digits_end..].chars() {
            match c {
                's' => activation = Activation::Sigmoid,
                'l' => activation = Activation::Linear,
                'b' => bias = true,
                _ => {
                    return Err(Error::Invalid(format!(
                        "bad layer token {:?} in {:?}",
                        token, text
                    )))
                }
            }
        }
        let is_output = idx + 1 == tokens.len();
        if is_output {
            bias_everywhere = bias;
            bias = false;
        }
        if idx == 0 {
            activation = Activation::Linear;
        }
        layers.push(LayerSpec::new(size, activation, bias));
    }
    if bias_everywhere {
        let last = layers.len() - 1;
        for layer in &mut layers[..last] {
            layer.has_bias = true;
        }
    }
    validate_layers(&layers)?;
    Ok(layers)
}

fn validate_layers(layers: &[LayerSpec]) -> Result<()> {
    if layers.len() < 2 {
        return Err(Error::Invalid(
            "a network needs an input and an output layer".into(),
        ));
    }
    if let Some(pos) = layers.iter().position(|l| l.size == 0) {
        return Err(Error::Invalid(format!("layer {} has size 0", pos)));
    }
    if layers[layers.len() - 1].has_bias {
        return Err(Error::Invalid(
            "the output layer cannot carry a bias unit".into(),
        ));
    }
    Ok(())
}

/// Row-major real matrix; rows are source units, columns destination units.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        WeightMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                "weight matrix entries",
                rows * cols,
                data.len(),
            ));
        }
        Ok(WeightMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseNetwork {
    layers: Vec<LayerSpec>,
    weights: Vec<WeightMatrix>,
}

impl DenseNetwork {
    /// A network with every weight set to zero.
    pub fn zeros(layers: Vec<LayerSpec>) -> Result<Self> {
        validate_layers(&layers)?;
        let weights = layers
            .windows(2)
            .map(|pair| WeightMatrix::zeros(pair[0].width(), pair[1].size))
            .collect();
        Ok(DenseNetwork { layers, weights })
    }

    pub fn with_weights(layers: Vec<LayerSpec>, weights: Vec<WeightMatrix>) -> Result<Self> {
        validate_layers(&layers)?;
        if weights.len() != layers.len() - 1 {
            return Err(Error::shape(
                "weight matrices",
                layers.len() - 1,
                weights.len(),
            ));
        }
        for (k, (pair, w)) in layers.windows(2).zip(&weights).enumerate() {
            if w.rows != pair[0].width() || w.cols != pair[1].size {
                return Err(Error::Invalid(format!(
                    "weight matrix for layer {} is {}x{}, expected {}x{}",
                    k + 1,
                    w.rows,
                    w.cols,
                    pair[0].width(),
                    pair[1].size
                )));
            }
        }
        let net = DenseNetwork { layers, weights };
        net.check_finite()?;
        Ok(net)
    }

    /// A network with every weight drawn uniformly from `[low, high]`.
    pub fn random<R: Rng + ?Sized>(
        layers: Vec<LayerSpec>,
        low: f64,
        high: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let mut net = DenseNetwork::zeros(layers)?;
        for w in net.weights_flat_mut() {
            *w = rng.gen_range(low..=high);
        }
        Ok(net)
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn weights(&self) -> &[WeightMatrix] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [WeightMatrix] {
        &mut self.weights
    }

    pub fn input_arity(&self) -> usize {
        self.layers[0].size
    }

    pub fn output_arity(&self) -> usize {
        self.layers[self.layers.len() - 1].size
    }

    pub fn weight_count(&self) -> usize {
        self.weights.iter().map(|w| w.data.len()).sum()
    }

    /// All weights, layer by layer in storage order.
    pub fn weights_flat(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights.iter().flat_map(|w| w.data.iter().copied())
    }

    pub fn weights_flat_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.weights.iter_mut().flat_map(|w| w.data.iter_mut())
    }

    pub fn set_weights_flat(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.weight_count() {
            return Err(Error::shape(
                "flat weights",
                self.weight_count(),
                values.len(),
            ));
        }
        for (w, &v) in self.weights_flat_mut().zip(values) {
            *w = v;
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.weights_flat().all(f64::is_finite) {
            Ok(())
        } else {
            Err(Error::Invalid("network contains non-finite weights".into()))
        }
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut current = self.with_bias(0, input.to_vec());
        for k in 1..self.layers.len() {
            let next = self.propagate(k, &current);
            current = self.with_bias(k, next);
        }
        Ok(current)
    }

    /// Outputs of every layer, each including its bias unit when present.
    pub(crate) fn forward_layers(&self, input: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_input(input)?;
        let mut outputs = Vec::with_capacity(self.layers.len());
        outputs.push(self.with_bias(0, input.to_vec()));
        for k in 1..self.layers.len() {
            let next = self.propagate(k, &outputs[k - 1]);
            outputs.push(self.with_bias(k, next));
        }
        Ok(outputs)
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_arity() {
            return Err(Error::shape(
                "network input",
                self.input_arity(),
                input.len(),
            ));
        }
        Ok(())
    }

    fn with_bias(&self, k: usize, mut values: Vec<f64>) -> Vec<f64> {
        if self.layers[k].has_bias {
            values.push(1.0);
        }
        values
    }

    fn propagate(&self, k: usize, previous: &[f64]) -> Vec<f64> {
        let w = &self.weights[k - 1];
        let act = self.layers[k].activation;
        let mut sums = vec![0.0; w.cols];
        for (i, &a) in previous.iter().enumerate() {
            let row = &w.data[i * w.cols..(i + 1) * w.cols];
            for (s, &wij) in sums.iter_mut().zip(row) {
                *s += wij * a;
            }
        }
        sums.into_iter().map(|s| act.apply(s)).collect()
    }

    /// Short architecture description in the `5-12s-3` style, with `b`
    /// marking layers that carry a bias unit.
    pub fn architecture(&self) -> String {
        self.layers
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let mut s = l.size.to_string();
                if k != 0 && l.activation == Activation::Sigmoid {
                    s.push('s');
                }
                if l.has_bias {
                    s.push('b');
                }
                s
            })
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for DenseNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_document())
    }
}

/// Cutoff turning a real network output into a bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputThreshold(f64);

impl OutputThreshold {
    pub fn new(theta: f64) -> Result<Self> {
        if theta > 0.0 && theta < 1.0 {
            Ok(OutputThreshold(theta))
        } else {
            Err(Error::Invalid(format!("threshold {} not in (0, 1)", theta)))
        }
    }

    pub fn theta(self) -> f64 {
        self.0
    }
}

impl Default for OutputThreshold {
    fn default() -> Self {
        OutputThreshold(0.5)
    }
}

/// `z_i >= theta` maps to 1, everything else to 0.
pub fn threshold_output(z: &[f64], threshold: OutputThreshold) -> BitVector {
    BitVector::from_bools(&z.iter().map(|&v| v >= threshold.0).collect::<Vec<_>>())
}
