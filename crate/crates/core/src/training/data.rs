use crate::classic::MatrixCode;
use crate::error::{Error, Result};
use crate::task::Task;

use super::{seeded_rng, Stream};

/// One observation: network input (without bias) and the oracle target.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSample {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

impl TrainSample {
    pub fn from_bits(input: &[u8], target: &[u8]) -> Self {
        TrainSample {
            input: input.iter().map(|&b| b as f64).collect(),
            target: target.iter().map(|&b| b as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub samples: Vec<TrainSample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TrainSample> {
        self.samples.iter()
    }
}

/// Parity convention for `k = 2` matrix-coding labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Position `i` has syndrome `i`.
    Syndrome,
    /// Checks `x1 ^ x2 = m1` and `x1 ^ x3 = m2`, fixed by three sequential
    /// branches.
    AppendixC,
}

/// Uniform random inputs labelled by the task oracle.
pub fn gen_task_dataset(task: Task, count: usize, seed: u64) -> Result<Dataset> {
    let mut rng = seeded_rng(seed, Stream::Dataset);
    let samples = (0..count)
        .map(|_| {
            let input = task.random_input(&mut rng);
            let target = task.oracle(&input)?;
            Ok(TrainSample::from_bits(&input, &target))
        })
        .collect::<Result<_>>()?;
    Ok(Dataset { samples })
}

pub fn gen_lsb_dataset(n1: usize, count: usize, seed: u64) -> Result<Dataset> {
    if n1 == 0 {
        return Err(Error::Invalid("n1 must be positive".into()));
    }
    gen_task_dataset(Task::Lsb { n1 }, count, seed)
}

pub fn gen_mc_dataset(k: u32, count: usize, seed: u64, convention: Convention) -> Result<Dataset> {
    let task = match convention {
        Convention::Syndrome => Task::MatrixCoding(MatrixCode::new(k)?),
        Convention::AppendixC if k == 2 => Task::MatrixCodingAppendixC,
        Convention::AppendixC => {
            return Err(Error::Unsupported(format!(
                "the three-branch parity convention is only defined for k = 2, not k = {}",
                k
            )))
        }
    };
    gen_task_dataset(task, count, seed)
}

/// The three-branch rule, evaluated in order on the running stego vector.
pub fn appendix_c_embed(x: [u8; 3], m: [u8; 2]) -> [u8; 3] {
    let mut z = x;
    let p1 = |z: &[u8; 3]| (z[0] + z[1]) % 2;
    let p2 = |z: &[u8; 3]| (z[0] + z[2]) % 2;
    if p1(&z) != m[0] && p2(&z) == m[1] {
        z[1] = 1 - z[1];
    }
    if p1(&z) != m[0] && p2(&z) != m[1] {
        z[0] = 1 - z[0];
    }
    if p1(&z) == m[0] && p2(&z) != m[1] {
        z[2] = 1 - z[2];
    }
    z
}

pub fn appendix_c_extract(y: [u8; 3]) -> [u8; 2] {
    [(y[0] + y[1]) % 2, (y[0] + y[2]) % 2]
}
