//! Line-oriented text model format.
//!
//! ```text
//! fnn v1
//! layers 2 1
//! activations linear
//! bias 1
//! w 1 1 1 0
//! w 1 2 1 1
//! w 1 3 1 0
//! ```
//!
//! `w <k> <i> <j> <value>` uses 1-based indices: `k` is the destination layer,
//! `i` the source unit (the bias unit is `n_{k-1} + 1`), `j` the destination
//! unit. Values are written with shortest round-trip precision.

use std::fmt::Write as _;

use super::{Activation, DenseNetwork, LayerSpec, WeightMatrix};
use crate::error::{Error, Result};

const HEADER: &str = "fnn v1";

impl DenseNetwork {
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        let sizes: Vec<String> = self.layers.iter().map(|l| l.size.to_string()).collect();
        let _ = writeln!(out, "layers {}", sizes.join(" "));
        let acts: Vec<&str> = self.layers[1..]
            .iter()
            .map(|l| l.activation.name())
            .collect();
        let _ = writeln!(out, "activations {}", acts.join(" "));
        let last = self.layers.len() - 1;
        let bias: Vec<&str> = self.layers[..last]
            .iter()
            .map(|l| if l.has_bias { "1" } else { "0" })
            .collect();
        let _ = writeln!(out, "bias {}", bias.join(" "));
        for (k, w) in self.weights.iter().enumerate() {
            for i in 0..w.rows() {
                for j in 0..w.cols() {
                    let _ = writeln!(out, "w {} {} {} {:?}", k + 1, i + 1, j + 1, w.get(i, j));
                }
            }
        }
        out
    }

    pub fn from_document(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let mut next = |what: &str| {
            lines.next().ok_or_else(|| {
                Error::parse(text.lines().count() + 1, format!("missing {} line", what))
            })
        };

        let (n, header) = next("header")?;
        if header != HEADER {
            return Err(Error::parse(
                n,
                format!("expected {:?}, found {:?}", HEADER, header),
            ));
        }

        let (n, line) = next("layers")?;
        let sizes: Vec<usize> = keyword_fields(n, line, "layers")?
            .iter()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(n, format!("bad layer size {:?}", t)))
            })
            .collect::<Result<_>>()?;
        if sizes.len() < 2 {
            return Err(Error::parse(n, "need at least two layers"));
        }
        let depth = sizes.len() - 1;

        let (n, line) = next("activations")?;
        let acts = keyword_fields(n, line, "activations")?;
        if acts.len() != depth {
            return Err(Error::parse(
                n,
                format!("expected {} activations, found {}", depth, acts.len()),
            ));
        }
        let acts: Vec<Activation> = acts
            .iter()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::parse(n, format!("unknown activation {:?}", t)))
            })
            .collect::<Result<_>>()?;

        let (n, line) = next("bias")?;
        let bias = keyword_fields(n, line, "bias")?;
        if bias.len() != depth {
            return Err(Error::parse(
                n,
                format!("expected {} bias flags, found {}", depth, bias.len()),
            ));
        }
        let bias: Vec<bool> = bias
            .iter()
            .map(|t| match *t {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::parse(
                    n,
                    format!("bias flag must be 0 or 1, found {:?}", other),
                )),
            })
            .collect::<Result<_>>()?;

        let layers: Vec<LayerSpec> = sizes
            .iter()
            .enumerate()
            .map(|(k, &size)| {
                let activation = if k == 0 {
                    Activation::Linear
                } else {
                    acts[k - 1]
                };
                LayerSpec::new(size, activation, k < depth && bias[k])
            })
            .collect();
        let mut net = DenseNetwork::zeros(layers).map_err(|e| Error::parse(n, e.to_string()))?;

        let mut seen: Vec<Vec<bool>> = net
            .weights
            .iter()
            .map(|w| vec![false; w.rows() * w.cols()])
            .collect();
        let mut count = 0usize;
        let mut last_line = n;
        for (n, line) in lines {
            last_line = n;
            let fields = keyword_fields(n, line, "w")?;
            if fields.len() != 4 {
                return Err(Error::parse(
                    n,
                    format!("expected 4 fields after 'w', found {}", fields.len()),
                ));
            }
            let index = |t: &str| {
                t.parse::<usize>()
                    .ok()
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| Error::parse(n, format!("bad index {:?}", t)))
            };
            let (k, i, j) = (index(fields[0])?, index(fields[1])?, index(fields[2])?);
            let value: f64 = fields[3]
                .parse()
                .map_err(|_| Error::parse(n, format!("bad weight value {:?}", fields[3])))?;
            if !value.is_finite() {
                return Err(Error::parse(n, "weight is not finite"));
            }
            let w: &mut WeightMatrix = net
                .weights
                .get_mut(k - 1)
                .ok_or_else(|| Error::parse(n, format!("layer index {} out of range", k)))?;
            if i > w.rows() || j > w.cols() {
                return Err(Error::parse(
                    n,
                    format!(
                        "entry ({}, {}) outside {}x{} matrix of layer {}",
                        i,
                        j,
                        w.rows(),
                        w.cols(),
                        k
                    ),
                ));
            }
            let slot = &mut seen[k - 1][(i - 1) * w.cols() + (j - 1)];
            if *slot {
                return Err(Error::parse(
                    n,
                    format!("duplicate weight ({}, {}, {})", k, i, j),
                ));
            }
            *slot = true;
            w.set(i - 1, j - 1, value);
            count += 1;
        }
        let expected = net.weight_count();
        if count != expected {
            return Err(Error::parse(
                last_line,
                format!("declared layers need {} weights, found {}", expected, count),
            ));
        }
        Ok(net)
    }
}

fn keyword_fields<'a>(line_no: usize, line: &'a str, keyword: &str) -> Result<Vec<&'a str>> {
    let mut it = line.split_whitespace();
    match it.next() {
        Some(k) if k == keyword => Ok(it.collect()),
        _ => Err(Error::parse(
            line_no,
            format!("expected '{}' line, found {:?}", keyword, line),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitVector;
    use crate::fnn::parse_architecture;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const PERFECT: &str =
        "fnn v1\nlayers 2 1\nactivations linear\nbias 1\nw 1 1 1 0\nw 1 2 1 1\nw 1 3 1 0\n";

    #[test]
    fn writes_expected_layout() {
        let net = DenseNetwork::from_document(PERFECT).unwrap();
        assert_eq!(
            net.to_document(),
            "fnn v1\nlayers 2 1\nactivations linear\nbias 1\nw 1 1 1 0.0\nw 1 2 1 1.0\nw 1 3 1 0.0\n"
        );
    }

    #[test]
    fn perfect_net_round_trip_preserves_outputs() {
        let net = DenseNetwork::from_document(PERFECT).unwrap();
        let back = DenseNetwork::from_document(&net.to_document()).unwrap();
        for v in 0..4 {
            let input = BitVector::from_index(v, 2).to_f64();
            assert_eq!(net.forward(&input).unwrap(), back.forward(&input).unwrap());
        }
    }

    #[test]
    fn sigmoid_net_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let net =
            DenseNetwork::random(parse_architecture("5-12s-3b").unwrap(), -3.0, 3.0, &mut rng)
                .unwrap();
        let back = DenseNetwork::from_document(&net.to_document()).unwrap();
        assert_eq!(back.layers(), net.layers());
        let max_diff = net
            .weights_flat()
            .zip(back.weights_flat())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert_eq!(max_diff, 0.0);
        assert!(net
            .weights_flat()
            .zip(back.weights_flat())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn missing_weight_is_reported() {
        let doc = "fnn v1\nlayers 2 1\nactivations linear\nbias 1\nw 1 1 1 0\nw 1 2 1 1\n";
        let err = DenseNetwork::from_document(doc).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 6, .. }), "{err}");
    }

    #[test]
    fn extra_weight_is_reported() {
        let doc = format!("{PERFECT}w 1 4 1 0\n");
        let err = DenseNetwork::from_document(&doc).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 8, .. }), "{err}");
    }

    #[test]
    fn malformed_lines_name_the_line() {
        let cases = [
            ("fnn v2\n", 1),
            ("fnn v1\nlayers 2 x\n", 2),
            ("fnn v1\nlayers 2 1\nactivations tanh\n", 3),
            ("fnn v1\nlayers 2 1\nactivations linear\nbias 2\n", 4),
            (
                "fnn v1\nlayers 2 1\nactivations linear\nbias 1\nw 1 1 1 zero\n",
                5,
            ),
            (
                "fnn v1\nlayers 2 1\nactivations linear\nbias 1\nw 1 1 1 0\nw 1 1 1 0\n",
                6,
            ),
        ];
        for (doc, line) in cases {
            match DenseNetwork::from_document(doc) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{doc:?}"),
                other => panic!("{doc:?} gave {other:?}"),
            }
        }
    }
}
