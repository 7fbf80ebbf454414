//! Trained networks used as embedders and extractors, and their error rates
//! against the classical oracles.

use std::fmt::Write as _;

use crate::bits::BitVector;
use crate::classic::{BlockEmbedder, BlockExtractor};
use crate::error::{Error, Result};
use crate::fnn::{threshold_output, DenseNetwork, OutputThreshold};
use crate::task::Task;
use crate::training::{seeded_rng, Stream};

/// Largest input width enumerated exhaustively.
pub const MAX_ENUMERATION_BITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Embed,
    Extract,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub input: BitVector,
    pub expected: BitVector,
    pub actual: BitVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodecReport {
    pub direction: Direction,
    pub total_inputs: usize,
    pub total_bits: usize,
    pub mismatched_bits: usize,
    /// Every evaluated input with at least one wrong output bit.
    pub mismatches: Vec<Mismatch>,
}

impl CodecReport {
    fn empty(direction: Direction) -> Self {
        CodecReport {
            direction,
            total_inputs: 0,
            total_bits: 0,
            mismatched_bits: 0,
            mismatches: Vec::new(),
        }
    }

    /// Wrong output bits over evaluated output bits.
    pub fn error_rate(&self) -> f64 {
        if self.total_bits == 0 {
            0.0
        } else {
            self.mismatched_bits as f64 / self.total_bits as f64
        }
    }

    pub fn bember(&self) -> Option<f64> {
        (self.direction == Direction::Embed).then(|| self.error_rate())
    }

    pub fn bexter(&self) -> Option<f64> {
        (self.direction == Direction::Extract).then(|| self.error_rate())
    }

    pub fn is_exact(&self) -> bool {
        self.mismatched_bits == 0
    }

    /// Combines reports over disjoint input sets.
    pub fn merge(mut self, other: CodecReport) -> CodecReport {
        self.total_inputs += other.total_inputs;
        self.total_bits += other.total_bits;
        self.mismatched_bits += other.mismatched_bits;
        self.mismatches.extend(other.mismatches);
        self
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let name = match self.direction {
            Direction::Embed => "bember",
            Direction::Extract => "bexter",
        };
        let _ = writeln!(
            out,
            "direction={}",
            match self.direction {
                Direction::Embed => "embed",
                Direction::Extract => "extract",
            }
        );
        let _ = writeln!(out, "inputs={}", self.total_inputs);
        let _ = writeln!(out, "output_bits={}", self.total_bits);
        let _ = writeln!(out, "mismatched_bits={}", self.mismatched_bits);
        let _ = writeln!(out, "mismatched_inputs={}", self.mismatches.len());
        let _ = writeln!(out, "{}={}", name, self.error_rate());
        let _ = writeln!(
            out,
            "verdict={}",
            if self.is_exact() { "pass" } else { "fail" }
        );
        out
    }

    pub fn mismatches_csv(&self) -> String {
        let mut out = String::from("input_bits,expected_bits,actual_bits\n");
        for m in &self.mismatches {
            let _ = writeln!(out, "{},{},{}", m.input, m.expected, m.actual);
        }
        out
    }
}

/// Thresholded network outputs compared bit by bit with the task oracle.
pub fn evaluate<I>(
    net: &DenseNetwork,
    task: &Task,
    threshold: OutputThreshold,
    inputs: I,
) -> Result<CodecReport>
where
    I: IntoIterator<Item = BitVector>,
{
    task.check_network(net)?;
    let direction = if task.is_decoder() {
        Direction::Extract
    } else {
        Direction::Embed
    };
    let mut report = CodecReport::empty(direction);
    for input in inputs {
        let expected = BitVector::new(task.oracle(input.as_slice())?)?;
        let actual = threshold_output(&net.forward(&input.to_f64())?, threshold);
        let wrong = expected.hamming_distance(&actual)?;
        report.total_inputs += 1;
        report.total_bits += expected.len();
        report.mismatched_bits += wrong;
        if wrong > 0 {
            report.mismatches.push(Mismatch {
                input,
                expected,
                actual,
            });
        }
    }
    Ok(report)
}

pub fn exhaustive_report(
    net: &DenseNetwork,
    task: &Task,
    threshold: OutputThreshold,
) -> Result<CodecReport> {
    let bits = task.input_arity();
    if bits > MAX_ENUMERATION_BITS {
        return Err(Error::SpaceTooLarge {
            bits,
            limit: MAX_ENUMERATION_BITS,
        });
    }
    evaluate(net, task, threshold, task.enumerate_inputs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeuralCodec {
    net: DenseNetwork,
    threshold: OutputThreshold,
    task: Task,
}

impl NeuralCodec {
    pub fn new(net: DenseNetwork, task: Task, threshold: OutputThreshold) -> Result<Self> {
        task.check_network(&net)?;
        Ok(NeuralCodec {
            net,
            threshold,
            task,
        })
    }

    pub fn net(&self) -> &DenseNetwork {
        &self.net
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn threshold(&self) -> OutputThreshold {
        self.threshold
    }

    fn run(&self, input: &[u8]) -> Result<BitVector> {
        let input: Vec<f64> = input.iter().map(|&b| b as f64).collect();
        Ok(threshold_output(&self.net.forward(&input)?, self.threshold))
    }

    pub fn nn_embed(&self, x: &BitVector, m: &BitVector) -> Result<BitVector> {
        if self.task.is_decoder() {
            return Err(Error::Unsupported(format!(
                "{} is a decoder task",
                self.task
            )));
        }
        if x.len() != self.task.cover_arity() {
            return Err(Error::shape(
                "codec cover",
                self.task.cover_arity(),
                x.len(),
            ));
        }
        if m.len() != self.task.message_arity() {
            return Err(Error::shape(
                "codec message",
                self.task.message_arity(),
                m.len(),
            ));
        }
        self.run(x.concat(m).as_slice())
    }

    pub fn nn_extract(&self, y: &BitVector) -> Result<BitVector> {
        if !self.task.is_decoder() {
            return Err(Error::Unsupported(format!(
                "{} is not a decoder task",
                self.task
            )));
        }
        if y.len() != self.task.input_arity() {
            return Err(Error::shape(
                "codec stego",
                self.task.input_arity(),
                y.len(),
            ));
        }
        self.run(y.as_slice())
    }

    pub fn exhaustive_equivalence(&self) -> Result<CodecReport> {
        exhaustive_report(&self.net, &self.task, self.threshold)
    }

    /// Monte-Carlo error estimate over uniformly random inputs.
    pub fn sampled_error(&self, samples: usize, seed: u64) -> Result<CodecReport> {
        if samples == 0 {
            return Err(Error::Invalid("sample count must be positive".into()));
        }
        let mut rng = seeded_rng(seed, Stream::Sampling);
        let inputs: Vec<BitVector> = (0..samples)
            .map(|_| BitVector::new(self.task.random_input(&mut rng)))
            .collect::<Result<_>>()?;
        self.evaluate_inputs(inputs)
    }

    pub fn evaluate_inputs<I: IntoIterator<Item = BitVector>>(
        &self,
        inputs: I,
    ) -> Result<CodecReport> {
        evaluate(&self.net, &self.task, self.threshold, inputs)
    }
}

impl BlockEmbedder for NeuralCodec {
    fn cover_len(&self) -> usize {
        self.task.cover_arity()
    }

    fn message_len(&self) -> usize {
        self.task.layout().message_len
    }

    fn embed_block(&self, cover: &[u8], message: &[u8]) -> Result<Vec<u8>> {
        let x = BitVector::new(cover.to_vec())?;
        let m = BitVector::new(message.to_vec())?;
        Ok(self.nn_embed(&x, &m)?.into_inner())
    }

    fn pad_bit(&self, cover: &[u8], position: usize) -> u8 {
        self.task.pad_bit(cover, position)
    }
}

impl BlockExtractor for NeuralCodec {
    fn cover_len(&self) -> usize {
        self.task.cover_arity()
    }

    fn message_len(&self) -> usize {
        self.task.output_arity()
    }

    fn extract_block(&self, stego: &[u8]) -> Result<Vec<u8>> {
        Ok(self
            .nn_extract(&BitVector::new(stego.to_vec())?)?
            .into_inner())
    }
}
