// Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use csod::dan::mlp::Mlp;
use csod::dan::{DanConfig, DanModel, TwoSampleSplit};
use csod::RngStream;

pub fn random_points(n: usize, m: usize, scale: f64, rng: &mut RngStream) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..m).map(|_| scale * rng.uniform()).collect())
        .collect()
}

pub fn igd_oracle(approx: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for r in reference {
        let mut best = f64::INFINITY;
        for a in approx {
            let mut s = 0.0;
            for k in 0..r.len() {
                s += (r[k] - a[k]) * (r[k] - a[k]);
            }
            best = best.min(s.sqrt());
        }
        total += best;
    }
    total / reference.len() as f64
}

fn weakly_better_everywhere(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Peel fronts by repeatedly taking the members nobody remaining dominates.
pub fn fronts_oracle(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| {
                !left
                    .iter()
                    .any(|&j| weakly_better_everywhere(&points[j], &points[i]) && points[j] != points[i])
            })
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// Survivors of angle-penalized selection, recomputed from scratch.
pub fn selection_oracle(objectives: &[Vec<f64>], vectors: &[Vec<f64>], t: usize, t_max: usize, alpha: f64) -> Vec<usize> {
    let m = objectives[0].len();
    let zmin: Vec<f64> = (0..m)
        .map(|k| objectives.iter().map(|f| f[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let shifted: Vec<Vec<f64>> = objectives
        .iter()
        .map(|f| f.iter().zip(&zmin).map(|(a, b)| a - b).collect())
        .collect();
    let length = |f: &[f64]| f.iter().map(|c| c * c).sum::<f64>().sqrt();
    let cos = |f: &[f64], v: &[f64]| {
        let n = length(f);
        if n == 0.0 {
            1.0
        } else {
            (f.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() / n).clamp(-1.0, 1.0)
        }
    };
    let gamma: Vec<f64> = (0..vectors.len())
        .map(|j| {
            (0..vectors.len())
                .filter(|&k| k != j)
                .map(|k| cos(&vectors[j], &vectors[k]).acos())
                .fold(f64::INFINITY, f64::min)
                .max(1e-12)
        })
        .collect();
    let penalty = m as f64 * (t as f64 / t_max as f64).powf(alpha);

    let mut owner = Vec::new();
    for f in &shifted {
        let mut best = 0;
        for j in 1..vectors.len() {
            if cos(f, &vectors[j]) > cos(f, &vectors[best]) {
                best = j;
            }
        }
        owner.push(best);
    }
    let mut chosen = Vec::new();
    for j in 0..vectors.len() {
        let mut best: Option<(usize, f64)> = None;
        for (i, f) in shifted.iter().enumerate() {
            if owner[i] != j {
                continue;
            }
            let d = (1.0 + penalty * cos(f, &vectors[j]).acos() / gamma[j]) * length(f);
            if best.map_or(true, |(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        chosen.extend(best.map(|(i, _)| i));
    }
    chosen.sort_unstable();
    chosen
}

pub fn mini_config() -> DanConfig {
    DanConfig {
        hidden: 4,
        embed_dim: 2,
        noise_dim: 3,
        ..DanConfig::default()
    }
}

fn central_difference(model: &DanModel, pick: fn(&mut DanModel) -> &mut Mlp, i: usize, f: &dyn Fn(&DanModel) -> f64) -> f64 {
    let h = 1e-5;
    let mut plus = model.clone();
    *pick(&mut plus).params_mut().nth(i).unwrap() += h;
    let mut minus = model.clone();
    *pick(&mut minus).params_mut().nth(i).unwrap() -= h;
    (f(&plus) - f(&minus)) / (2.0 * h)
}

fn compare(label: &str, analytic: &Mlp, model: &DanModel, pick: fn(&mut DanModel) -> &mut Mlp, f: &dyn Fn(&DanModel) -> f64) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.params().enumerate() {
        let n = central_difference(model, pick, i, f);
        let scale = a.abs().max(n.abs());
        let rel = if scale < 1e-8 { (a - n).abs() } else { (a - n).abs() / scale };
        if !(rel < 1e-4) {
            return Err(format!("{label} parameter {i}: backprop {a:e}, finite difference {n:e}"));
        }
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// Check every block of both gradient routines on a miniature model.
/// Returns the worst relative error seen.
pub fn dan_gradient_check(seed: u64) -> Result<f64, String> {
    let mut rng = RngStream::new(seed);
    let cfg = mini_config();
    let model = DanModel::new(3, &cfg, &mut rng).map_err(|e| e.to_string())?;
    let real = random_points(4, 3, 1.0, &mut rng);
    let noise: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..cfg.noise_dim).map(|_| rng.gaussian()).collect())
        .collect();
    let split = TwoSampleSplit::draw(4, 4, &mut rng);
    let fake = model.generate(&noise);

    let value = |m: &DanModel| m.adversarial_value_with(&real, &noise, &split).unwrap();
    let (_, grads) = model.gradients(&real, &noise, &split).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    worst = worst.max(compare("V/generator", &grads.generator, &model, |m| &mut m.generator, &value)?);
    worst = worst.max(compare("V/discriminator", &grads.discriminator, &model, |m| &mut m.discriminator, &value)?);
    worst = worst.max(compare("V/encoder", &grads.encoder, &model, |m| &mut m.encoder, &value)?);
    worst = worst.max(compare("V/two_sample_head", &grads.two_sample_head, &model, |m| &mut m.two_sample_head, &value)?);

    let loss = |m: &DanModel| m.two_sample_loss_with(&real, &fake, &split).unwrap();
    let (_, enc, head) = model
        .two_sample_loss_gradients(&real, &fake, &split)
        .map_err(|e| e.to_string())?;
    worst = worst.max(compare("T/encoder", &enc, &model, |m| &mut m.encoder, &loss)?);
    worst = worst.max(compare("T/two_sample_head", &head, &model, |m| &mut m.two_sample_head, &loss)?);
    Ok(worst)
}
