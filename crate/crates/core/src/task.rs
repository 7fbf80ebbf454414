//! Learning tasks: which classical function a network should reproduce.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits::BitVector;
use crate::classic::{BlockEmbedder, BlockExtractor, BlockLayout, MatrixCode};
use crate::error::{Error, Result};
use crate::fnn::{parse_architecture, DenseNetwork, LayerSpec};
use crate::training::data::{appendix_c_embed, appendix_c_extract};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Cover bits `x` and message bits `m`, both of length `n1`; target `m`.
    Lsb { n1: usize },
    /// Cover `x` of `2^k - 1` bits and message of `k` bits; target
    /// `mc_embed(x, m)` with the position-`i`-has-syndrome-`i` code.
    MatrixCoding(MatrixCode),
    /// `k = 2` matrix coding with the three-branch parity rule in which the
    /// checks are `x1 ^ x2` and `x1 ^ x3`.
    MatrixCodingAppendixC,
    /// Stego bits to message bits for LSB substitution.
    DecoderLsb { n1: usize },
    /// Stego block to message bits for matrix coding.
    DecoderMatrix(MatrixCode),
}

impl Task {
    pub fn is_decoder(&self) -> bool {
        matches!(self, Task::DecoderLsb { .. } | Task::DecoderMatrix(_))
    }

    /// Cover bits for embedding tasks, stego bits for decoders.
    pub fn cover_arity(&self) -> usize {
        match *self {
            Task::Lsb { n1 } | Task::DecoderLsb { n1 } => n1,
            Task::MatrixCoding(c) | Task::DecoderMatrix(c) => c.n(),
            Task::MatrixCodingAppendixC => 3,
        }
    }

    /// Message bits fed to the network; zero for decoders.
    pub fn message_arity(&self) -> usize {
        match *self {
            Task::Lsb { n1 } => n1,
            Task::MatrixCoding(c) => c.k(),
            Task::MatrixCodingAppendixC => 2,
            Task::DecoderLsb { .. } | Task::DecoderMatrix(_) => 0,
        }
    }

    pub fn input_arity(&self) -> usize {
        self.cover_arity() + self.message_arity()
    }

    pub fn output_arity(&self) -> usize {
        match *self {
            Task::DecoderLsb { n1 } => n1,
            Task::DecoderMatrix(c) => c.k(),
            _ => self.cover_arity(),
        }
    }

    /// Block shape when the task runs over a stream: cover bits per block and
    /// message bits per block.
    pub fn layout(&self) -> BlockLayout {
        match *self {
            Task::Lsb { n1 } | Task::DecoderLsb { n1 } => BlockLayout {
                cover_len: n1,
                message_len: n1,
            },
            Task::MatrixCoding(c) | Task::DecoderMatrix(c) => BlockLayout {
                cover_len: c.n(),
                message_len: c.k(),
            },
            Task::MatrixCodingAppendixC => BlockLayout {
                cover_len: 3,
                message_len: 2,
            },
        }
    }

    /// The exact classical output for one network input.
    pub fn oracle(&self, input: &[u8]) -> Result<Vec<u8>> {
        if input.len() != self.input_arity() {
            return Err(Error::shape("task input", self.input_arity(), input.len()));
        }
        let (x, m) = input.split_at(self.cover_arity());
        match *self {
            Task::Lsb { .. } => Ok(m.to_vec()),
            Task::MatrixCoding(c) => c.embed(x, m),
            Task::MatrixCodingAppendixC => {
                Ok(appendix_c_embed([x[0], x[1], x[2]], [m[0], m[1]]).to_vec())
            }
            Task::DecoderLsb { .. } => Ok(x.to_vec()),
            Task::DecoderMatrix(c) => c.extract(x),
        }
    }

    /// Classical extractor matching an embedding task's code.
    pub fn message_extractor(&self) -> Box<dyn BlockExtractor> {
        match *self {
            Task::Lsb { n1 } | Task::DecoderLsb { n1 } => Box::new(crate::classic::LsbBlock { n1 }),
            Task::MatrixCoding(c) | Task::DecoderMatrix(c) => Box::new(c),
            Task::MatrixCodingAppendixC => Box::new(AppendixCCode),
        }
    }

    /// Classical embedder for an embedding task; `None` for decoders.
    pub fn classical_embedder(&self) -> Option<Box<dyn BlockEmbedder>> {
        match *self {
            Task::Lsb { n1 } => Some(Box::new(crate::classic::LsbBlock { n1 })),
            Task::MatrixCoding(c) => Some(Box::new(c)),
            Task::MatrixCodingAppendixC => Some(Box::new(AppendixCCode)),
            Task::DecoderLsb { .. } | Task::DecoderMatrix(_) => None,
        }
    }

    /// Message filler for a partial final block; LSB tasks reuse the cover
    /// bit so the padded position is left as it was.
    pub fn pad_bit(&self, cover: &[u8], position: usize) -> u8 {
        match self {
            Task::Lsb { .. } => cover[position],
            _ => 0,
        }
    }

    pub fn random_input<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        (0..self.input_arity())
            .map(|_| rng.gen_range(0..=1u8))
            .collect()
    }

    /// Every network input in lexicographic order.
    pub fn enumerate_inputs(&self) -> impl Iterator<Item = BitVector> {
        let width = self.input_arity();
        (0..1u64 << width).map(move |v| BitVector::from_index(v, width))
    }

    /// Architecture used when training this task without an explicit one.
    pub fn default_architecture(&self) -> Vec<LayerSpec> {
        let text = match *self {
            Task::Lsb { n1 } => format!("{}b-{}", 2 * n1, n1),
            Task::DecoderLsb { n1 } => format!("{}b-{}", n1, n1),
            Task::MatrixCodingAppendixC => "5-12s-3b".to_string(),
            Task::MatrixCoding(c) => {
                format!("{}-{}s-{}b", c.n() + c.k(), 4 * (c.n() + c.k()), c.n())
            }
            Task::DecoderMatrix(c) => format!("{}-{}s-{}b", c.n(), 4 * c.n(), c.k()),
        };
        parse_architecture(&text).expect("default architectures are well formed")
    }

    /// Checks that a network's arity fits this task.
    pub fn check_network(&self, net: &DenseNetwork) -> Result<()> {
        if net.input_arity() != self.input_arity() {
            return Err(Error::shape(
                "network input arity for task",
                self.input_arity(),
                net.input_arity(),
            ));
        }
        if net.output_arity() != self.output_arity() {
            return Err(Error::shape(
                "network output arity for task",
                self.output_arity(),
                net.output_arity(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Task::Lsb { n1 } => write!(f, "lsb:{}", n1),
            Task::MatrixCoding(c) => write!(f, "matrix:{}", c.k()),
            Task::MatrixCodingAppendixC => f.write_str("matrix-c"),
            Task::DecoderLsb { n1 } => write!(f, "decode-lsb:{}", n1),
            Task::DecoderMatrix(c) => write!(f, "decode-matrix:{}", c.k()),
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    /// `lsb:N`, `matrix:K`, `matrix-c`, `decode-lsb:N` or `decode-matrix:K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("unknown task {:?}", s));
        if s == "matrix-c" {
            return Ok(Task::MatrixCodingAppendixC);
        }
        let (name, arg) = s.split_once(':').ok_or_else(bad)?;
        let value: usize = arg.parse().map_err(|_| bad())?;
        if value == 0 {
            return Err(bad());
        }
        match name {
            "lsb" => Ok(Task::Lsb { n1: value }),
            "decode-lsb" => Ok(Task::DecoderLsb { n1: value }),
            "matrix" => Ok(Task::MatrixCoding(MatrixCode::new(value as u32)?)),
            "decode-matrix" => Ok(Task::DecoderMatrix(MatrixCode::new(value as u32)?)),
            _ => Err(bad()),
        }
    }
}

/// A task together with the network shape trained for it.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub task: Task,
    pub layers: Vec<LayerSpec>,
}

impl TaskSpec {
    pub fn new(task: Task, layers: Vec<LayerSpec>) -> Result<Self> {
        let first = layers.first().map(|l| l.size).unwrap_or(0);
        let last = layers.last().map(|l| l.size).unwrap_or(0);
        if first != task.input_arity() {
            return Err(Error::shape(
                "architecture input arity",
                task.input_arity(),
                first,
            ));
        }
        if last != task.output_arity() {
            return Err(Error::shape(
                "architecture output arity",
                task.output_arity(),
                last,
            ));
        }
        Ok(TaskSpec { task, layers })
    }

    pub fn with_architecture(task: Task, arch: &str) -> Result<Self> {
        TaskSpec::new(task, parse_architecture(arch)?)
    }
}

/// Classical embedder/extractor pair for the [`Task::MatrixCodingAppendixC`]
/// code.
#[derive(Debug, Clone, Copy)]
pub struct AppendixCCode;

impl BlockEmbedder for AppendixCCode {
    fn cover_len(&self) -> usize {
        3
    }

    fn message_len(&self) -> usize {
        2
    }

    fn embed_block(&self, cover: &[u8], message: &[u8]) -> Result<Vec<u8>> {
        if cover.len() != 3 || message.len() != 2 {
            return Err(Error::shape(
                "matrix-c block",
                5,
                cover.len() + message.len(),
            ));
        }
        Ok(appendix_c_embed([cover[0], cover[1], cover[2]], [message[0], message[1]]).to_vec())
    }
}

impl BlockExtractor for AppendixCCode {
    fn cover_len(&self) -> usize {
        3
    }

    fn message_len(&self) -> usize {
        2
    }

    fn extract_block(&self, stego: &[u8]) -> Result<Vec<u8>> {
        if stego.len() != 3 {
            return Err(Error::shape("matrix-c stego block", 3, stego.len()));
        }
        Ok(appendix_c_extract([stego[0], stego[1], stego[2]]).to_vec())
    }
}
