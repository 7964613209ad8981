use rand::Rng;

use crate::error::{Error, Result};

/// Per-layer output nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub enum Activation {
    Identity,
    Relu,
    /// `bound_i * tanh(z_i)` per output component.
    BoundedTanh(Vec<f64>),
}

impl Activation {
    pub(crate) fn code(&self) -> u8 {
        match self {
            Activation::Identity => 0,
            Activation::Relu => 1,
            Activation::BoundedTanh(_) => 2,
        }
    }
}

/// Multilayer perceptron with all parameters in one flat vector.
///
/// Layer `l` maps `sizes[l]` inputs to `sizes[l + 1]` outputs; its weight
/// matrix is stored row-major (one row per output) followed by its bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    activations: Vec<Activation>,
    params: Vec<f64>,
}

/// Values recorded during a forward pass for use by [`Mlp::backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input to each layer.
    inputs: Vec<Vec<f64>>,
    /// Pre-activation of each layer.
    pre: Vec<Vec<f64>>,
    pub output: Vec<f64>,
}

impl Mlp {
    /// Network with all parameters zero.
    pub fn new(sizes: Vec<usize>, activations: Vec<Activation>) -> Result<Self> {
        if sizes.len() < 2 || sizes.iter().any(|&s| s == 0) {
            return Err(Error::Contract(format!("invalid layer sizes {sizes:?}")));
        }
        if activations.len() != sizes.len() - 1 {
            return Err(Error::Contract(format!(
                "{} layers need {} activations, got {}",
                sizes.len() - 1,
                sizes.len() - 1,
                activations.len()
            )));
        }
        for (l, a) in activations.iter().enumerate() {
            if let Activation::BoundedTanh(b) = a {
                if b.len() != sizes[l + 1] || b.iter().any(|&v| !(v > 0.0)) {
                    return Err(Error::Contract(format!(
                        "layer {l}: tanh bounds must be {} positive values",
                        sizes[l + 1]
                    )));
                }
            }
        }
        let n = sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        Ok(Self {
            sizes,
            activations,
            params: vec![0.0; n],
        })
    }

    /// Uniform `+-1/sqrt(fan_in)` initialization; the last layer is further
    /// multiplied by `final_scale`.
    pub fn random<R: Rng + ?Sized>(
        sizes: Vec<usize>,
        activations: Vec<Activation>,
        final_scale: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let mut net = Self::new(sizes, activations)?;
        let layers = net.num_layers();
        for l in 0..layers {
            let lim = 1.0 / (net.sizes[l] as f64).sqrt();
            let scale = if l + 1 == layers { final_scale } else { 1.0 };
            let (start, end) = net.layer_range(l);
            for p in &mut net.params[start..end] {
                *p = rng.gen_range(-lim..=lim) * scale;
            }
        }
        Ok(net)
    }

    /// ReLU hidden layers and a bounded-tanh output.
    pub fn actor<R: Rng + ?Sized>(
        state_dim: usize,
        hidden: &[usize],
        bounds: &[f64],
        rng: &mut R,
    ) -> Result<Self> {
        let mut sizes = vec![state_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(bounds.len());
        let mut acts = vec![Activation::Relu; hidden.len()];
        acts.push(Activation::BoundedTanh(bounds.to_vec()));
        Self::random(sizes, acts, 0.1, rng)
    }

    /// ReLU hidden layers and a single linear output over `(s, a)`.
    pub fn critic<R: Rng + ?Sized>(input_dim: usize, hidden: &[usize], rng: &mut R) -> Result<Self> {
        let mut sizes = vec![input_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut acts = vec![Activation::Relu; hidden.len()];
        acts.push(Activation::Identity);
        Self::random(sizes, acts, 1.0, rng)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn num_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn same_shape(&self, other: &Mlp) -> bool {
        self.sizes == other.sizes && self.activations == other.activations
    }

    /// Flat index range `[start, end)` of layer `l` (weights then bias).
    pub fn layer_range(&self, l: usize) -> (usize, usize) {
        let start: usize = self.sizes[..=l]
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum();
        let (i, o) = (self.sizes[l], self.sizes[l + 1]);
        (start, start + i * o + o)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_cached(x)?.output)
    }

    pub fn forward_cached(&self, x: &[f64]) -> Result<ForwardCache> {
        if x.len() != self.input_dim() {
            return Err(Error::Contract(format!(
                "network expects {} inputs, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        let layers = self.num_layers();
        let mut inputs = Vec::with_capacity(layers);
        let mut pre = Vec::with_capacity(layers);
        let mut cur = x.to_vec();
        for l in 0..layers {
            let (i, o) = (self.sizes[l], self.sizes[l + 1]);
            let (start, _) = self.layer_range(l);
            let w = &self.params[start..start + i * o];
            let b = &self.params[start + i * o..start + i * o + o];
            let z: Vec<f64> = (0..o)
                .map(|r| {
                    w[r * i..(r + 1) * i]
                        .iter()
                        .zip(&cur)
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
                        + b[r]
                })
                .collect();
            let y = match &self.activations[l] {
                Activation::Identity => z.clone(),
                Activation::Relu => z.iter().map(|&v| v.max(0.0)).collect(),
                Activation::BoundedTanh(bounds) => {
                    z.iter().zip(bounds).map(|(&v, &k)| k * v.tanh()).collect()
                }
            };
            inputs.push(std::mem::replace(&mut cur, y));
            pre.push(z);
        }
        Ok(ForwardCache {
            inputs,
            pre,
            output: cur,
        })
    }

    /// Backpropagate `d_out` (gradient of a scalar w.r.t. the output).
    ///
    /// Parameter gradients are added into `grads`; the gradient w.r.t. the
    /// network input is returned. The ReLU subgradient at 0 is 0.
    pub fn backward(&self, cache: &ForwardCache, d_out: &[f64], grads: &mut [f64]) -> Result<Vec<f64>> {
        if d_out.len() != self.output_dim() || grads.len() != self.params.len() {
            return Err(Error::Contract(format!(
                "backward expects {} output grads and {} parameter slots, got {} and {}",
                self.output_dim(),
                self.params.len(),
                d_out.len(),
                grads.len()
            )));
        }
        if cache.inputs.len() != self.num_layers() {
            return Err(Error::Contract("forward cache does not match this network".into()));
        }
        let mut delta = d_out.to_vec();
        for l in (0..self.num_layers()).rev() {
            let (i, o) = (self.sizes[l], self.sizes[l + 1]);
            let z = &cache.pre[l];
            match &self.activations[l] {
                Activation::Identity => {}
                Activation::Relu => delta
                    .iter_mut()
                    .zip(z)
                    .for_each(|(d, &v)| *d *= if v > 0.0 { 1.0 } else { 0.0 }),
                Activation::BoundedTanh(bounds) => {
                    delta.iter_mut().zip(z).zip(bounds).for_each(|((d, &v), &k)| {
                        let t = v.tanh();
                        *d *= k * (1.0 - t * t);
                    })
                }
            }
            let (start, _) = self.layer_range(l);
            let input = &cache.inputs[l];
            let (gw, gb) = grads[start..start + i * o + o].split_at_mut(i * o);
            for r in 0..o {
                let d = delta[r];
                if d == 0.0 {
                    continue;
                }
                gb[r] += d;
                gw[r * i..(r + 1) * i]
                    .iter_mut()
                    .zip(input)
                    .for_each(|(g, &x)| *g += d * x);
            }
            let w = &self.params[start..start + i * o];
            let mut prev = vec![0.0; i];
            for (r, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                prev.iter_mut()
                    .zip(&w[r * i..(r + 1) * i])
                    .for_each(|(p, &wv)| *p += d * wv);
            }
            delta = prev;
        }
        Ok(delta)
    }

    pub fn all_finite(&self) -> bool {
        self.params.iter().all(|v| v.is_finite())
    }
}
