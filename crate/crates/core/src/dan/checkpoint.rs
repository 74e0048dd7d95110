//! Text checkpoints for [`DanModel`].
//!
//! ```text
//! dan-checkpoint 1
//! noise_dim 30
//! lambda 1 1
//! steps 40
//! block generator 2
//! layer 30 64 tanh
//! w <64*30 values>
//! b <64 values>
//! ...
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! save/load cycle is lossless.

use std::io::{BufRead, Write};

use super::mlp::{Activation, Dense, Mlp};
use super::DanModel;
use crate::error::{Error, Result};

const MAGIC: &str = "dan-checkpoint 1";

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_block<W: Write>(out: &mut W, name: &str, mlp: &Mlp) -> std::io::Result<()> {
    writeln!(out, "block {name} {}", mlp.layers.len())?;
    for l in &mlp.layers {
        writeln!(out, "layer {} {} {}", l.inputs, l.outputs, l.activation.name())?;
        writeln!(out, "w {}", join(&l.weights))?;
        writeln!(out, "b {}", join(&l.bias))?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_fields(&mut self, key: &str) -> Result<Vec<String>> {
        let text = self
            .inner
            .next()
            .ok_or_else(|| Error::Parse(format!("checkpoint ended before `{key}`")))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        self.line += 1;
        let mut fields = text.split_whitespace().map(str::to_owned);
        match fields.next() {
            Some(k) if k == key => Ok(fields.collect()),
            other => Err(Error::Parse(format!(
                "line {}: expected `{key}`, found {other:?}",
                self.line
            ))),
        }
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

fn parse_all(fields: &[String], expect: usize) -> Result<Vec<f64>> {
    if fields.len() != expect {
        return Err(Error::Parse(format!(
            "expected {expect} values, found {}",
            fields.len()
        )));
    }
    fields.iter().map(|f| parse(f)).collect()
}

fn read_block<R: BufRead>(lines: &mut Lines<R>, name: &str) -> Result<Mlp> {
    let head = lines.next_fields("block")?;
    if head.len() != 2 || head[0] != name {
        return Err(Error::Parse(format!("expected block {name}, found {head:?}")));
    }
    let count: usize = parse(&head[1])?;
    let mut layers = Vec::with_capacity(count);
    for _ in 0..count {
        let spec = lines.next_fields("layer")?;
        if spec.len() != 3 {
            return Err(Error::Parse(format!("malformed layer header {spec:?}")));
        }
        let inputs: usize = parse(&spec[0])?;
        let outputs: usize = parse(&spec[1])?;
        let activation = Activation::from_name(&spec[2])
            .ok_or_else(|| Error::Parse(format!("unknown activation {:?}", spec[2])))?;
        let weights = parse_all(&lines.next_fields("w")?, inputs * outputs)?;
        let bias = parse_all(&lines.next_fields("b")?, outputs)?;
        layers.push(Dense {
            inputs,
            outputs,
            weights,
            bias,
            activation,
        });
    }
    Ok(Mlp { layers })
}

impl DanModel {
    pub fn save<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{MAGIC}")?;
        writeln!(out, "noise_dim {}", self.noise_dim)?;
        writeln!(out, "lambda {} {}", self.lambda1, self.lambda2)?;
        writeln!(out, "steps {}", self.steps)?;
        write_block(&mut out, "generator", &self.generator)?;
        write_block(&mut out, "discriminator", &self.discriminator)?;
        write_block(&mut out, "encoder", &self.encoder)?;
        write_block(&mut out, "two_sample_head", &self.two_sample_head)?;
        Ok(())
    }

    pub fn load<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = Lines {
            inner: input.lines(),
            line: 0,
        };
        let magic = lines.next_fields("dan-checkpoint")?;
        if magic != ["1"] {
            return Err(Error::Parse(format!("unsupported checkpoint version {magic:?}")));
        }
        let noise_dim = parse(&lines.next_fields("noise_dim")?.join(""))?;
        let lambda = parse_all(&lines.next_fields("lambda")?, 2)?;
        let steps = parse(&lines.next_fields("steps")?.join(""))?;
        Ok(Self {
            generator: read_block(&mut lines, "generator")?,
            discriminator: read_block(&mut lines, "discriminator")?,
            encoder: read_block(&mut lines, "encoder")?,
            two_sample_head: read_block(&mut lines, "two_sample_head")?,
            noise_dim,
            lambda1: lambda[0],
            lambda2: lambda[1],
            steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dan::DanConfig;
    use crate::rng::RngStream;

    #[test]
    fn roundtrip_is_lossless() {
        let mut rng = RngStream::new(12);
        let mut model = DanModel::new(7, &DanConfig { hidden: 5, embed_dim: 3, noise_dim: 4, ..DanConfig::default() }, &mut rng).unwrap();
        model.steps = 17;
        model.lambda2 = 0.1 + 0.2;
        let mut buf = Vec::new();
        model.save(&mut buf).unwrap();
        let back = DanModel::load(buf.as_slice()).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn truncated_checkpoint_fails() {
        let mut rng = RngStream::new(13);
        let model = DanModel::new(2, &DanConfig { hidden: 2, embed_dim: 2, noise_dim: 2, ..DanConfig::default() }, &mut rng).unwrap();
        let mut buf = Vec::new();
        model.save(&mut buf).unwrap();
        buf.truncate(buf.len() / 2);
        assert!(DanModel::load(buf.as_slice()).is_err());
    }
}
