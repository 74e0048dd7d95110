mod common;

use csod::dan::{DanConfig, DanModel, TrainingBatch};
use csod::{Bounds, RngStream};

use common::{dan_gradient_check, mini_config, random_points};

#[test]
fn backprop_matches_finite_differences() {
    for seed in 0..10 {
        if let Err(e) = dan_gradient_check(seed) {
            panic!("seed {seed}: {e}");
        }
    }
}

fn central_difference(model: &DanModel, real: &[Vec<f64>], batch: &TrainingBatch, generator: bool, i: usize) -> f64 {
    let h = 1e-5;
    let value = |sign: f64| {
        let mut m = model.clone();
        let block = if generator { &mut m.generator } else { &mut m.discriminator };
        *block.params_mut().nth(i).unwrap() += sign * h;
        m.adversarial_value_with(real, &batch.noise, &batch.split).unwrap()
    };
    (value(1.0) - value(-1.0)) / (2.0 * h)
}

#[test]
fn training_step_follows_the_gradient_signs() {
    let mut rng = RngStream::new(21);
    let cfg = DanConfig {
        learning_rate: 1e-2,
        two_sample_period: 1000,
        ..mini_config()
    };
    let mut model = DanModel::new(3, &cfg, &mut rng).unwrap();
    // off the two-sample schedule so only the discriminator moves before the generator
    model.steps = 1;
    let real = random_points(8, 3, 1.0, &mut rng);
    let batch = TrainingBatch::draw(cfg.noise_dim, real.len(), &mut rng.clone());

    let mut stepped = model.clone();
    stepped.train_step(&real, &cfg, &mut rng.clone()).unwrap();
    let mut explicit = model.clone();
    explicit.train_step_with(&real, &batch, &cfg).unwrap();
    assert_eq!(stepped, explicit);
    assert_eq!(stepped.steps, 2);
    assert_eq!(stepped.encoder, model.encoder);

    let params: Vec<f64> = model.discriminator.params().copied().collect();
    for (i, (before, after)) in params.iter().zip(stepped.discriminator.params()).enumerate() {
        let g = central_difference(&model, &real, &batch, false, i);
        if g.abs() > 1e-6 {
            assert_eq!((after - before).signum(), g.signum(), "discriminator parameter {i}");
        }
    }

    let mut halfway = model.clone();
    halfway.discriminator = stepped.discriminator.clone();
    let params: Vec<f64> = model.generator.params().copied().collect();
    for (i, (before, after)) in params.iter().zip(stepped.generator.params()).enumerate() {
        let g = central_difference(&halfway, &real, &batch, true, i);
        if g.abs() > 1e-6 {
            assert_eq!((after - before).signum(), -g.signum(), "generator parameter {i}");
        }
    }
}

#[test]
fn generator_mean_drifts_toward_target() {
    let mut rng = RngStream::new(16);
    let target = [0.25, 0.7];
    let real: Vec<Vec<f64>> = (0..500)
        .map(|_| target.iter().map(|&mu| (mu + 0.08 * rng.gaussian()).clamp(0.0, 1.0)).collect())
        .collect();
    let cfg = DanConfig::default();
    let mut model = DanModel::new(2, &cfg, &mut rng).unwrap();
    let bounds = Bounds::new(vec![0.0; 2], vec![1.0; 2]).unwrap();
    let mut gaps = Vec::new();
    for round in 0..=5 {
        if round > 0 {
            for _ in 0..200 {
                model.train_step(&real, &cfg, &mut rng).unwrap();
            }
        }
        let samples = model.sample_offspring(2000, &bounds, &mut RngStream::new(99));
        let gap: f64 = (0..2)
            .map(|k| (samples.iter().map(|s| s.x[k]).sum::<f64>() / samples.len() as f64 - target[k]).abs())
            .sum();
        gaps.push(gap);
    }
    // least-squares slope of the gap over the checkpoints
    let n = gaps.len() as f64;
    let mean_t = (n - 1.0) / 2.0;
    let mean_g = gaps.iter().sum::<f64>() / n;
    let slope: f64 = gaps.iter().enumerate().map(|(t, g)| (t as f64 - mean_t) * (g - mean_g)).sum();
    assert!(slope < 0.0, "gaps {gaps:?}");
    assert!(gaps[5] < gaps[0], "gaps {gaps:?}");
    assert!(gaps[5] < 1.0);
}

#[test]
fn checkpoint_survives_training() {
    let mut rng = RngStream::new(4);
    let cfg = mini_config();
    let mut model = DanModel::new(3, &cfg, &mut rng).unwrap();
    let real = random_points(6, 3, 1.0, &mut rng);
    for _ in 0..3 {
        model.train_step(&real, &cfg, &mut rng).unwrap();
    }
    let mut buf = Vec::new();
    model.save(&mut buf).unwrap();
    let back = DanModel::load(buf.as_slice()).unwrap();
    assert_eq!(back, model);
}
