//! Small fully-connected networks with manual backpropagation.

use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Linear,
    Tanh,
    Sigmoid,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Linear => z,
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        }
    }

    /// Derivative expressed through the activation's output `y`.
    fn slope(self, y: f64) -> f64 {
        match self {
            Activation::Linear => 1.0,
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Linear => "linear",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(Activation::Linear),
            "tanh" => Some(Activation::Tanh),
            "sigmoid" => Some(Activation::Sigmoid),
            _ => None,
        }
    }
}

/// Affine layer followed by an elementwise activation.
/// `weights` is row-major with one row per output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize, activation: Activation) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
            activation,
        }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot(inputs: usize, outputs: usize, activation: Activation, rng: &mut RngStream) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let weights = (0..inputs * outputs)
            .map(|_| rng.uniform_range(-limit, limit))
            .collect();
        Self {
            inputs,
            outputs,
            weights,
            bias: vec![0.0; outputs],
            activation,
        }
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.inputs)
            .zip(&self.bias)
            .map(|(row, b)| {
                let z = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b;
                self.activation.apply(z)
            })
            .collect()
    }
}

/// Per-sample activations recorded during a forward pass; `values[0]` is
/// the input and `values[l + 1]` the output of layer `l`.
#[derive(Debug, Clone)]
pub struct Trace {
    values: Vec<Vec<f64>>,
}

impl Trace {
    pub fn output(&self) -> &[f64] {
        self.values.last().expect("trace holds at least the input")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

impl Mlp {
    /// Tanh hidden layers of the given widths and one output layer.
    pub fn new(widths: &[usize], output: Activation, rng: &mut RngStream) -> Self {
        let last = widths.len() - 2;
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(l, w)| {
                let act = if l == last { output } else { Activation::Tanh };
                Dense::glorot(w[0], w[1], act, rng)
            })
            .collect();
        Self { layers }
    }

    /// Same shapes and activations with every parameter zeroed.
    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Dense::zeros(l.inputs, l.outputs, l.activation))
                .collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.outputs)
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.layers
            .iter()
            .fold(x.to_vec(), |acc, layer| layer.forward(&acc))
    }

    pub fn forward_trace(&self, x: &[f64]) -> Trace {
        let mut values = Vec::with_capacity(self.layers.len() + 1);
        values.push(x.to_vec());
        for layer in &self.layers {
            let next = layer.forward(values.last().unwrap());
            values.push(next);
        }
        Trace { values }
    }

    /// Backpropagate `grad_out` (dL/d output) through one recorded pass,
    /// accumulating parameter gradients into `grads`. Returns dL/d input.
    pub fn backward(&self, trace: &Trace, grad_out: &[f64], grads: &mut Mlp) -> Vec<f64> {
        let mut delta: Vec<f64> = grad_out.to_vec();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let input = &trace.values[l];
            let output = &trace.values[l + 1];
            for (d, &y) in delta.iter_mut().zip(output) {
                *d *= layer.activation.slope(y);
            }
            let g = &mut grads.layers[l];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                g.bias[o] += d;
                let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (w, &xi) in row.iter_mut().zip(input) {
                    *w += d * xi;
                }
            }
            let mut prev = vec![0.0; layer.inputs];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (p, &w) in prev.iter_mut().zip(row) {
                    *p += d * w;
                }
            }
            delta = prev;
        }
        delta
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()))
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn is_finite(&self) -> bool {
        self.params().all(|p| p.is_finite())
    }

    /// `self += scale * other`, parameter by parameter.
    pub fn add_scaled(&mut self, scale: f64, other: &Mlp) {
        for (p, g) in self.params_mut().zip(other.params()) {
            *p += scale * g;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for p in self.params_mut() {
            *p *= factor;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loss(net: &Mlp, x: &[f64]) -> f64 {
        net.forward(x).iter().map(|y| y * y).sum::<f64>() * 0.5
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = RngStream::new(4);
        let net = Mlp::new(&[3, 5, 2], Activation::Sigmoid, &mut rng);
        let x = [0.3, -0.7, 1.1];
        let trace = net.forward_trace(&x);
        let out = trace.output().to_vec();
        let mut grads = net.zeros_like();
        let dx = net.backward(&trace, &out, &mut grads);

        let h = 1e-6;
        for (i, g) in grads.params().enumerate() {
            let mut plus = net.clone();
            *plus.params_mut().nth(i).unwrap() += h;
            let mut minus = net.clone();
            *minus.params_mut().nth(i).unwrap() -= h;
            let fd = (loss(&plus, &x) - loss(&minus, &x)) / (2.0 * h);
            assert!((fd - g).abs() < 1e-8, "param {i}: {fd} vs {g}");
        }
        for k in 0..3 {
            let mut xp = x;
            xp[k] += h;
            let mut xm = x;
            xm[k] -= h;
            let fd = (loss(&net, &xp) - loss(&net, &xm)) / (2.0 * h);
            assert!((fd - dx[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn identity_linear_layer() {
        let mut layer = Dense::zeros(2, 2, Activation::Linear);
        layer.weights = vec![1.0, 0.0, 0.0, 1.0];
        let net = Mlp { layers: vec![layer] };
        assert_eq!(net.forward(&[2.5, -1.0]), vec![2.5, -1.0]);
    }
}
