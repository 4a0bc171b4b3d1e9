//! Versioned text model file.
//!
//! Layout:
//!
//! ```text
//! shm-cnn-model v1
//! hyper eta 0.001
//! hyper beta1 0.9
//! hyper beta2 0.999
//! hyper epsilon 0.00000001
//! hyper eps_clip 0.0000001
//! hyper seed 42
//! layer conv1d filters 32 in_channels 1 kernel 3 activation relu
//! weights 96
//! <one value per line, filter-major then channel then tap>
//! biases 32
//! ...
//! layer maxpool1d pool 2 stride 2
//! layer flatten
//! layer dense in 64 out 16 activation relu
//! ...
//! layer dense in 16 out 1 activation sigmoid
//! ...
//! ```
//!
//! Values are written with Rust's shortest round-trip decimal formatting, so
//! a saved model reloads bit-identically. The loader rejects any version
//! line other than `shm-cnn-model v1`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::adam::AdamConfig;
use crate::nn::layers::{Activation, Conv1d, Dense, MaxPool1d};
use crate::nn::loss::PROB_CLIP;
use crate::nn::network::Network;

pub const MODEL_MAGIC: &str = "shm-cnn-model v1";

/// Hyperparameters recorded alongside the weights for reproducibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelHyper {
    pub adam: AdamConfig,
    pub eps_clip: f64,
    pub seed: u64,
}

impl ModelHyper {
    pub fn new(adam: AdamConfig, seed: u64) -> Self {
        Self {
            adam,
            eps_clip: PROB_CLIP,
            seed,
        }
    }
}

pub fn model_to_string(net: &Network, hyper: &ModelHyper) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_MAGIC}");
    let _ = writeln!(out, "hyper eta {}", hyper.adam.learning_rate);
    let _ = writeln!(out, "hyper beta1 {}", hyper.adam.beta1);
    let _ = writeln!(out, "hyper beta2 {}", hyper.adam.beta2);
    let _ = writeln!(out, "hyper epsilon {}", hyper.adam.epsilon);
    let _ = writeln!(out, "hyper eps_clip {}", hyper.eps_clip);
    let _ = writeln!(out, "hyper seed {}", hyper.seed);

    let conv = &net.conv;
    let _ = writeln!(
        out,
        "layer conv1d filters {} in_channels {} kernel {} activation {}",
        conv.filters,
        conv.in_channels,
        conv.kernel,
        conv.activation.name()
    );
    write_tensor(&mut out, "weights", &conv.weights);
    write_tensor(&mut out, "biases", &conv.biases);

    let _ = writeln!(
        out,
        "layer maxpool1d pool {} stride {}",
        net.pool.pool, net.pool.stride
    );
    let _ = writeln!(out, "layer flatten");

    for dense in [&net.hidden, &net.output] {
        let _ = writeln!(
            out,
            "layer dense in {} out {} activation {}",
            dense.in_dim,
            dense.out_dim,
            dense.activation.name()
        );
        write_tensor(&mut out, "weights", &dense.weights);
        write_tensor(&mut out, "biases", &dense.biases);
    }
    out
}

fn write_tensor(out: &mut String, name: &str, values: &[f64]) {
    let _ = writeln!(out, "{name} {}", values.len());
    for v in values {
        let _ = writeln!(out, "{v}");
    }
}

pub fn save_model(net: &Network, hyper: &ModelHyper, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_string(net, hyper)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<(Network, ModelHyper)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text).map_err(|e| match e {
        Error::Data(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn model_from_str(text: &str) -> Result<(Network, ModelHyper)> {
    let mut lines = text.lines();
    let version = lines
        .next()
        .ok_or_else(|| Error::Data("empty model file".into()))?;
    if version != MODEL_MAGIC {
        return Err(Error::Data(format!(
            "unknown model version `{version}`, expected `{MODEL_MAGIC}`"
        )));
    }

    let mut parser = Parser { lines };
    let mut hyper = ModelHyper::new(AdamConfig::default(), 0);
    loop {
        let line = parser.peek()?;
        if !line.starts_with("hyper ") {
            break;
        }
        let line = parser.next_line()?;
        let mut parts = line.split_whitespace();
        parts.next(); // "hyper"
        let key = parts
            .next()
            .ok_or_else(|| Error::Data("hyper line missing key".into()))?;
        let value = parts
            .next()
            .ok_or_else(|| Error::Data(format!("hyper {key} missing value")))?;
        match key {
            "eta" => hyper.adam.learning_rate = parse_f64(value)?,
            "beta1" => hyper.adam.beta1 = parse_f64(value)?,
            "beta2" => hyper.adam.beta2 = parse_f64(value)?,
            "epsilon" => hyper.adam.epsilon = parse_f64(value)?,
            "eps_clip" => hyper.eps_clip = parse_f64(value)?,
            "seed" => {
                hyper.seed = value
                    .parse()
                    .map_err(|_| Error::Data(format!("bad seed `{value}`")))?
            }
            other => return Err(Error::Data(format!("unknown hyper key `{other}`"))),
        }
    }

    let conv = parse_conv(&mut parser)?;
    let pool = parse_pool(&mut parser)?;
    parser.expect("layer flatten")?;
    let hidden = parse_dense(&mut parser)?;
    let output = parse_dense(&mut parser)?;
    if parser.peek().is_ok() {
        return Err(Error::Data("trailing content after final layer".into()));
    }

    let net = Network {
        conv,
        pool,
        hidden,
        output,
    };
    net.assert_architecture();
    Ok((net, hyper))
}

struct Parser<'a> {
    lines: std::str::Lines<'a>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Result<&'a str> {
        self.lines
            .clone()
            .next()
            .ok_or_else(|| Error::Data("model file truncated".into()))
    }

    fn next_line(&mut self) -> Result<&'a str> {
        self.lines
            .next()
            .ok_or_else(|| Error::Data("model file truncated".into()))
    }

    fn expect(&mut self, exact: &str) -> Result<()> {
        let line = self.next_line()?;
        if line != exact {
            return Err(Error::Data(format!("expected `{exact}`, got `{line}`")));
        }
        Ok(())
    }

    fn tensor(&mut self, name: &str, expected_len: usize) -> Result<Vec<f64>> {
        let head = self.next_line()?;
        let mut parts = head.split_whitespace();
        if parts.next() != Some(name) {
            return Err(Error::Data(format!("expected `{name}` block, got `{head}`")));
        }
        let count: usize = parts
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| Error::Data(format!("bad tensor count in `{head}`")))?;
        if count != expected_len {
            return Err(Error::Data(format!(
                "{name} block declares {count} values, architecture needs {expected_len}"
            )));
        }
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            values.push(parse_f64(self.next_line()?)?);
        }
        Ok(values)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Data(format!("bad number `{s}`")))?;
    if !v.is_finite() {
        return Err(Error::Data(format!("non-finite number `{s}`")));
    }
    Ok(v)
}

fn parse_conv(parser: &mut Parser) -> Result<Conv1d> {
    let line = parser.next_line()?;
    let fields = key_values(line, "layer conv1d")?;
    let filters = field_usize(&fields, "filters")?;
    let in_channels = field_usize(&fields, "in_channels")?;
    let kernel = field_usize(&fields, "kernel")?;
    let activation = Activation::from_name(field(&fields, "activation")?)?;
    let weights = parser.tensor("weights", filters * in_channels * kernel)?;
    let biases = parser.tensor("biases", filters)?;
    Ok(Conv1d {
        filters,
        in_channels,
        kernel,
        activation,
        weights,
        biases,
    })
}

fn parse_pool(parser: &mut Parser) -> Result<MaxPool1d> {
    let line = parser.next_line()?;
    let fields = key_values(line, "layer maxpool1d")?;
    Ok(MaxPool1d {
        pool: field_usize(&fields, "pool")?,
        stride: field_usize(&fields, "stride")?,
    })
}

fn parse_dense(parser: &mut Parser) -> Result<Dense> {
    let line = parser.next_line()?;
    let fields = key_values(line, "layer dense")?;
    let in_dim = field_usize(&fields, "in")?;
    let out_dim = field_usize(&fields, "out")?;
    let activation = Activation::from_name(field(&fields, "activation")?)?;
    let weights = parser.tensor("weights", in_dim * out_dim)?;
    let biases = parser.tensor("biases", out_dim)?;
    Ok(Dense {
        in_dim,
        out_dim,
        activation,
        weights,
        biases,
    })
}

fn key_values<'a>(line: &'a str, prefix: &str) -> Result<Vec<(&'a str, &'a str)>> {
    let rest = line
        .strip_prefix(prefix)
        .ok_or_else(|| Error::Data(format!("expected `{prefix} ...`, got `{line}`")))?;
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    if tokens.len() % 2 != 0 {
        return Err(Error::Data(format!("malformed layer line `{line}`")));
    }
    Ok(tokens.chunks(2).map(|c| (c[0], c[1])).collect())
}

fn field<'a>(fields: &[(&'a str, &'a str)], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Data(format!("layer line missing `{key}`")))
}

fn field_usize(fields: &[(&str, &str)], key: &str) -> Result<usize> {
    field(fields, key)?
        .parse()
        .map_err(|_| Error::Data(format!("bad integer for `{key}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_identical() {
        let net = Network::init(123);
        let hyper = ModelHyper::new(AdamConfig::default(), 99);
        let text = model_to_string(&net, &hyper);
        let (loaded, loaded_hyper) = model_from_str(&text).unwrap();
        assert_eq!(net, loaded);
        assert_eq!(hyper, loaded_hyper);
        // Re-serializing reproduces the same bytes.
        assert_eq!(text, model_to_string(&loaded, &loaded_hyper));
    }

    #[test]
    fn unknown_version_is_rejected_naming_versions() {
        let err = model_from_str("shm-cnn-model v2\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("v2") && msg.contains(MODEL_MAGIC), "{msg}");
    }

    #[test]
    fn truncated_file_is_a_clean_parse_error() {
        let net = Network::init(5);
        let hyper = ModelHyper::new(AdamConfig::default(), 5);
        let text = model_to_string(&net, &hyper);
        let cut = &text[..text.len() / 2];
        let err = model_from_str(cut).unwrap_err();
        assert!(matches!(err, Error::Data(_)), "{err}");
    }

    #[test]
    fn garbage_weight_is_rejected() {
        let net = Network::init(5);
        let hyper = ModelHyper::new(AdamConfig::default(), 5);
        let text = model_to_string(&net, &hyper).replace("layer flatten", "layer waffle");
        assert!(model_from_str(&text).is_err());
    }
}
