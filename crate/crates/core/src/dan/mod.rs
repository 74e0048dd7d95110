//! Distributional adversarial network used as an offspring generator.
//!
//! The model has four parts:
//!
//! * a generator `G` mapping Gaussian noise to `(0, 1)^D`,
//! * a pointwise discriminator `Dnet`,
//! * a deep mean encoder `eta`, which embeds a *set* of samples as the mean
//!   of a learned feature map,
//! * a two-sample head `D2s` that scores `|eta(A) - eta(B)|` as the
//!   probability that `A` and `B` come from the same distribution.
//!
//! The training objective is
//!
//! ```text
//! V = l1 * (E log Dnet(x) + E log(1 - Dnet(G(z))))
//!   + l2 * (log M(X1, X2) + log M(Y1, Y2) + log(1 - M(X1, Y2)) + log(1 - M(Y1, X2)))
//! ```
//!
//! where `M(A, B) = D2s(|eta(A) - eta(B)|)` and `X1, X2` / `Y1, Y2` are
//! random halves of the real and generated batches. `Dnet`, `eta` and `D2s`
//! ascend `V`; `G` descends it.

mod checkpoint;
pub mod mlp;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{Bounds, Individual};
use mlp::{Activation, Mlp, Trace};

/// Probabilities are clamped to `[EPS, 1 - EPS]` before taking logarithms.
pub const EPS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct DanConfig {
    pub hidden: usize,
    pub embed_dim: usize,
    pub noise_dim: usize,
    pub learning_rate: f64,
    pub steps_per_generation: usize,
    /// The encoder and two-sample head are updated every `two_sample_period` steps.
    pub two_sample_period: usize,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Default for DanConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            embed_dim: 32,
            noise_dim: 30,
            learning_rate: 1e-3,
            steps_per_generation: 20,
            two_sample_period: 5,
            lambda1: 1.0,
            lambda2: 1.0,
        }
    }
}

impl DanConfig {
    pub fn validate(&self) -> Result<()> {
        let sizes = [self.hidden, self.embed_dim, self.noise_dim, self.two_sample_period];
        if sizes.contains(&0) || !(self.learning_rate >= 0.0) || self.lambda1 < 0.0 || self.lambda2 < 0.0 {
            return Err(Error::config(format!("invalid DAN configuration: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DanModel {
    pub generator: Mlp,
    pub discriminator: Mlp,
    pub encoder: Mlp,
    pub two_sample_head: Mlp,
    pub noise_dim: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub steps: u64,
}

/// Gradients of `V` for every parameter block.
#[derive(Debug, Clone)]
pub struct DanGradients {
    pub generator: Mlp,
    pub discriminator: Mlp,
    pub encoder: Mlp,
    pub two_sample_head: Mlp,
}

/// Random halving of the real and generated batches.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleSplit {
    pub real: Vec<usize>,
    pub fake: Vec<usize>,
}

impl TwoSampleSplit {
    pub fn draw(n_real: usize, n_fake: usize, rng: &mut RngStream) -> Self {
        Self {
            real: rng.permutation(n_real),
            fake: rng.permutation(n_fake),
        }
    }

    /// Split without shuffling.
    pub fn identity(n_real: usize, n_fake: usize) -> Self {
        Self {
            real: (0..n_real).collect(),
            fake: (0..n_fake).collect(),
        }
    }

    /// First and second half of a permutation; an odd last element is dropped.
    fn halves(perm: &[usize]) -> (&[usize], &[usize]) {
        let h = perm.len() / 2;
        (&perm[..h], &perm[h..2 * h])
    }
}

/// Noise and halving used by one training step.
#[derive(Debug, Clone)]
pub struct TrainingBatch {
    pub noise: Vec<Vec<f64>>,
    pub split: TwoSampleSplit,
}

impl TrainingBatch {
    pub fn draw(noise_dim: usize, n: usize, rng: &mut RngStream) -> Self {
        let noise = gaussian_batch(noise_dim, n, rng);
        let split = TwoSampleSplit::draw(n, n, rng);
        Self { noise, split }
    }
}

fn gaussian_batch(dim: usize, n: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.gaussian()).collect())
        .collect()
}

fn clamp_prob(p: f64) -> (f64, bool) {
    if p < EPS {
        (EPS, false)
    } else if p > 1.0 - EPS {
        (1.0 - EPS, false)
    } else {
        (p, true)
    }
}

/// Deep mean embedding: the encoder applied to every sample, then averaged.
pub fn dme_encode(encoder: &Mlp, samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::contract("deep mean embedding of an empty set"));
    }
    let mut mean = vec![0.0; encoder.output_dim()];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(encoder.forward(s)) {
            *m += v;
        }
    }
    let n = samples.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    Ok(mean)
}

struct EncodedSet {
    traces: Vec<Trace>,
    mean: Vec<f64>,
}

fn encode_set(encoder: &Mlp, samples: &[&[f64]]) -> EncodedSet {
    let traces: Vec<Trace> = samples.iter().map(|s| encoder.forward_trace(s)).collect();
    let mut mean = vec![0.0; encoder.output_dim()];
    for t in &traces {
        for (m, v) in mean.iter_mut().zip(t.output()) {
            *m += v;
        }
    }
    let n = traces.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    EncodedSet { traces, mean }
}

/// Result of the four-term two-sample objective, with optional gradients.
struct TwoSampleEval {
    value: f64,
    encoder: Option<Mlp>,
    head: Option<Mlp>,
    /// dT/dy for every generated sample (zero for dropped ones).
    d_fake: Vec<Vec<f64>>,
}

impl DanModel {
    /// Fresh model for `dim`-dimensional normalized decision vectors.
    pub fn new(dim: usize, config: &DanConfig, rng: &mut RngStream) -> Result<Self> {
        config.validate()?;
        if dim == 0 {
            return Err(Error::config("DAN data dimension must be positive"));
        }
        Ok(Self {
            generator: Mlp::new(&[config.noise_dim, config.hidden, dim], Activation::Sigmoid, rng),
            discriminator: Mlp::new(&[dim, config.hidden, 1], Activation::Sigmoid, rng),
            encoder: Mlp::new(&[dim, config.hidden, config.embed_dim], Activation::Linear, rng),
            two_sample_head: Mlp::new(&[config.embed_dim, 1], Activation::Sigmoid, rng),
            noise_dim: config.noise_dim,
            lambda1: config.lambda1,
            lambda2: config.lambda2,
            steps: 0,
        })
    }

    pub fn data_dim(&self) -> usize {
        self.discriminator.input_dim()
    }

    pub fn generate(&self, noise: &[Vec<f64>]) -> Vec<Vec<f64>> {
        noise.iter().map(|z| self.generator.forward(z)).collect()
    }

    /// `D2s(|eta(A) - eta(B)|)`, the probability that both sets share a distribution.
    pub fn two_sample_confidence(&self, a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
        let ea = dme_encode(&self.encoder, a)?;
        let eb = dme_encode(&self.encoder, b)?;
        let diff: Vec<f64> = ea.iter().zip(&eb).map(|(x, y)| (x - y).abs()).collect();
        Ok(self.two_sample_head.forward(&diff)[0])
    }

    /// Four-term two-sample objective on a freshly drawn random split.
    pub fn two_sample_loss(&self, real: &[Vec<f64>], fake: &[Vec<f64>], rng: &mut RngStream) -> Result<f64> {
        let split = TwoSampleSplit::draw(real.len(), fake.len(), rng);
        self.two_sample_loss_with(real, fake, &split)
    }

    pub fn two_sample_loss_with(&self, real: &[Vec<f64>], fake: &[Vec<f64>], split: &TwoSampleSplit) -> Result<f64> {
        Ok(self.two_sample_eval(real, fake, split, false)?.value)
    }

    /// Two-sample objective and its gradients for the encoder and head.
    pub fn two_sample_loss_gradients(
        &self,
        real: &[Vec<f64>],
        fake: &[Vec<f64>],
        split: &TwoSampleSplit,
    ) -> Result<(f64, Mlp, Mlp)> {
        let e = self.two_sample_eval(real, fake, split, true)?;
        Ok((e.value, e.encoder.unwrap(), e.head.unwrap()))
    }

    fn two_sample_eval(
        &self,
        real: &[Vec<f64>],
        fake: &[Vec<f64>],
        split: &TwoSampleSplit,
        with_grad: bool,
    ) -> Result<TwoSampleEval> {
        if real.len() < 2 || fake.len() < 2 {
            return Err(Error::contract(format!(
                "two-sample objective needs at least 2 samples per side, got {} and {}",
                real.len(),
                fake.len()
            )));
        }
        if split.real.len() != real.len() || split.fake.len() != fake.len() {
            return Err(Error::contract("split does not match batch sizes"));
        }
        let (x1, x2) = TwoSampleSplit::halves(&split.real);
        let (y1, y2) = TwoSampleSplit::halves(&split.fake);
        fn pick<'a>(data: &'a [Vec<f64>], idx: &[usize]) -> Vec<&'a [f64]> {
            idx.iter().map(|&i| data[i].as_slice()).collect()
        }
        // set order: X1, X2, Y1, Y2
        let index_sets = [x1, x2, y1, y2];
        let sets = [
            encode_set(&self.encoder, &pick(real, x1)),
            encode_set(&self.encoder, &pick(real, x2)),
            encode_set(&self.encoder, &pick(fake, y1)),
            encode_set(&self.encoder, &pick(fake, y2)),
        ];
        // (a, b, same distribution)
        const PAIRS: [(usize, usize, bool); 4] = [(0, 1, true), (2, 3, true), (0, 3, false), (2, 1, false)];

        let mut value = 0.0;
        let mut head_grad = with_grad.then(|| self.two_sample_head.zeros_like());
        let mut d_embed = vec![vec![0.0; self.encoder.output_dim()]; 4];
        for &(a, b, same) in &PAIRS {
            let diff: Vec<f64> = sets[a]
                .mean
                .iter()
                .zip(&sets[b].mean)
                .map(|(p, q)| (p - q).abs())
                .collect();
            let trace = self.two_sample_head.forward_trace(&diff);
            let (p, live) = clamp_prob(trace.output()[0]);
            value += if same { p.ln() } else { (1.0 - p).ln() };
            if let Some(hg) = head_grad.as_mut() {
                let dp = match (live, same) {
                    (false, _) => 0.0,
                    (true, true) => 1.0 / p,
                    (true, false) => -1.0 / (1.0 - p),
                };
                let d_diff = self.two_sample_head.backward(&trace, &[dp], hg);
                for (k, g) in d_diff.iter().enumerate() {
                    let s = sets[a].mean[k] - sets[b].mean[k];
                    let sign = if s > 0.0 {
                        1.0
                    } else if s < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                    d_embed[a][k] += g * sign;
                    d_embed[b][k] -= g * sign;
                }
            }
        }

        let mut d_fake = Vec::new();
        let mut enc_grad = None;
        if with_grad {
            let mut eg = self.encoder.zeros_like();
            d_fake = vec![vec![0.0; self.data_dim()]; fake.len()];
            for (s, set) in sets.iter().enumerate() {
                let scale = 1.0 / set.traces.len() as f64;
                let g: Vec<f64> = d_embed[s].iter().map(|v| v * scale).collect();
                for (trace, &sample) in set.traces.iter().zip(index_sets[s]) {
                    let dx = self.encoder.backward(trace, &g, &mut eg);
                    if s >= 2 {
                        for (acc, v) in d_fake[sample].iter_mut().zip(dx) {
                            *acc += v;
                        }
                    }
                }
            }
            enc_grad = Some(eg);
        }
        Ok(TwoSampleEval {
            value,
            encoder: enc_grad,
            head: head_grad,
            d_fake,
        })
    }

    /// Mean log-likelihood bracket `E log Dnet(x) + E log(1 - Dnet(y))`,
    /// with optional discriminator gradients and dBracket/dy.
    fn discriminator_eval(
        &self,
        real: &[Vec<f64>],
        fake: &[Vec<f64>],
        with_grad: bool,
    ) -> (f64, Option<Mlp>, Vec<Vec<f64>>) {
        let mut grad = with_grad.then(|| self.discriminator.zeros_like());
        let mut d_fake = Vec::new();
        let mut real_term = 0.0;
        for x in real {
            let trace = self.discriminator.forward_trace(x);
            let (p, live) = clamp_prob(trace.output()[0]);
            real_term += p.ln();
            if let Some(g) = grad.as_mut() {
                let dp = if live { 1.0 / (p * real.len() as f64) } else { 0.0 };
                self.discriminator.backward(&trace, &[dp], g);
            }
        }
        let mut fake_term = 0.0;
        for y in fake {
            let trace = self.discriminator.forward_trace(y);
            let (p, live) = clamp_prob(trace.output()[0]);
            fake_term += (1.0 - p).ln();
            if let Some(g) = grad.as_mut() {
                let dp = if live { -1.0 / ((1.0 - p) * fake.len() as f64) } else { 0.0 };
                d_fake.push(self.discriminator.backward(&trace, &[dp], g));
            }
        }
        let value = real_term / real.len() as f64 + fake_term / fake.len() as f64;
        (value, grad, d_fake)
    }

    /// The full adversarial value for explicit noise and split.
    pub fn adversarial_value_with(&self, real: &[Vec<f64>], noise: &[Vec<f64>], split: &TwoSampleSplit) -> Result<f64> {
        if real.is_empty() || noise.is_empty() {
            return Err(Error::contract("adversarial value needs non-empty batches"));
        }
        let fake = self.generate(noise);
        let (bracket, _, _) = self.discriminator_eval(real, &fake, false);
        let mut v = self.lambda1 * bracket;
        if self.lambda2 != 0.0 {
            v += self.lambda2 * self.two_sample_loss_with(real, &fake, split)?;
        }
        Ok(v)
    }

    /// The full adversarial value on a fresh random split.
    pub fn adversarial_value(&self, real: &[Vec<f64>], noise: &[Vec<f64>], rng: &mut RngStream) -> Result<f64> {
        let split = TwoSampleSplit::draw(real.len(), noise.len(), rng);
        self.adversarial_value_with(real, noise, &split)
    }

    /// Value of `V` and its gradient with respect to every parameter block.
    pub fn gradients(&self, real: &[Vec<f64>], noise: &[Vec<f64>], split: &TwoSampleSplit) -> Result<(f64, DanGradients)> {
        if real.is_empty() || noise.is_empty() {
            return Err(Error::contract("adversarial value needs non-empty batches"));
        }
        let traces: Vec<Trace> = noise.iter().map(|z| self.generator.forward_trace(z)).collect();
        let fake: Vec<Vec<f64>> = traces.iter().map(|t| t.output().to_vec()).collect();

        let (bracket, disc, d_fake_disc) = self.discriminator_eval(real, &fake, true);
        let mut disc = disc.unwrap();
        disc.scale(self.lambda1);
        let mut value = self.lambda1 * bracket;

        let (mut encoder, mut head) = (self.encoder.zeros_like(), self.two_sample_head.zeros_like());
        let mut d_fake_ts = vec![vec![0.0; self.data_dim()]; fake.len()];
        if self.lambda2 != 0.0 {
            let ts = self.two_sample_eval(real, &fake, split, true)?;
            value += self.lambda2 * ts.value;
            encoder = ts.encoder.unwrap();
            head = ts.head.unwrap();
            encoder.scale(self.lambda2);
            head.scale(self.lambda2);
            d_fake_ts = ts.d_fake;
        }

        let mut generator = self.generator.zeros_like();
        for (j, trace) in traces.iter().enumerate() {
            let dy: Vec<f64> = d_fake_disc[j]
                .iter()
                .zip(&d_fake_ts[j])
                .map(|(a, b)| self.lambda1 * a + self.lambda2 * b)
                .collect();
            self.generator.backward(trace, &dy, &mut generator);
        }
        Ok((
            value,
            DanGradients {
                generator,
                discriminator: disc,
                encoder,
                two_sample_head: head,
            },
        ))
    }

    /// One adversarial round on normalized real samples.
    pub fn train_step(&mut self, real: &[Vec<f64>], config: &DanConfig, rng: &mut RngStream) -> Result<()> {
        if real.len() < 4 {
            return Err(Error::contract(format!(
                "DAN training needs at least 4 real samples, got {}",
                real.len()
            )));
        }
        let batch = TrainingBatch::draw(self.noise_dim, real.len(), rng);
        self.train_step_with(real, &batch, config)
    }

    /// [`DanModel::train_step`] with an explicit noise batch and split.
    pub fn train_step_with(&mut self, real: &[Vec<f64>], batch: &TrainingBatch, config: &DanConfig) -> Result<()> {
        let lr = config.learning_rate;
        let (_, grads) = self.gradients(real, &batch.noise, &batch.split)?;
        check_finite(&grads.discriminator, "discriminator")?;
        self.discriminator.add_scaled(lr, &grads.discriminator);
        if self.steps % config.two_sample_period.max(1) as u64 == 0 {
            check_finite(&grads.encoder, "encoder")?;
            check_finite(&grads.two_sample_head, "two_sample_head")?;
            self.encoder.add_scaled(lr, &grads.encoder);
            self.two_sample_head.add_scaled(lr, &grads.two_sample_head);
        }
        let (_, grads) = self.gradients(real, &batch.noise, &batch.split)?;
        check_finite(&grads.generator, "generator")?;
        self.generator.add_scaled(-lr, &grads.generator);
        self.steps += 1;
        Ok(())
    }

    /// Draw `n` offspring: Gaussian noise through the generator, mapped onto the box.
    pub fn sample_offspring(&self, n: usize, bounds: &Bounds, rng: &mut RngStream) -> Vec<Individual> {
        let noise = gaussian_batch(self.noise_dim, n, rng);
        self.generate(&noise)
            .into_iter()
            .map(|z| Individual::new(bounds.denormalize(&z)))
            .collect()
    }
}

fn check_finite(grad: &Mlp, block: &'static str) -> Result<()> {
    if grad.is_finite() {
        Ok(())
    } else {
        Err(Error::Training { block })
    }
}
