use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{RegressionDataset, RegressionError};
use crate::approx::HolderTarget;
use crate::geometry::PointCloud;
use crate::net::{Matrix, Network};

/// Full-batch training up to this many samples, mini-batches above.
pub const FULL_BATCH_LIMIT: usize = 512;
pub const DEFAULT_BATCH: usize = 128;

/// Distribution of the initial weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightInit {
    /// `N(0, σ²)` for every layer; `Normal(1.0)` is the standard normal.
    Normal(f64),
    /// `N(0, 2/fan_in)` per layer.
    He,
}

impl Default for WeightInit {
    fn default() -> Self {
        WeightInit::Normal(1.0)
    }
}

impl WeightInit {
    fn is_valid(self) -> bool {
        match self {
            WeightInit::Normal(s) => s >= 0.0 && s.is_finite(),
            WeightInit::He => true,
        }
    }

    pub fn std_dev(self, fan_in: usize) -> f64 {
        match self {
            WeightInit::Normal(s) => s,
            WeightInit::He => libm::sqrt(2.0 / fan_in as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Hidden-layer widths; `None` means three hidden layers of width `D`.
    pub widths: Option<Vec<usize>>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub epochs: usize,
    /// `None`: full batch for `n ≤ 512`, batches of 128 otherwise.
    pub batch_size: Option<usize>,
    /// Gaussian weight initialization. Biases start at zero.
    pub init: WeightInit,
    /// `C_B`: predictions are clamped to `[−C_B, C_B]`.
    pub clip_bound: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            widths: None,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-8,
            epochs: 2000,
            batch_size: None,
            init: WeightInit::default(),
            clip_bound: f64::INFINITY,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn hidden(&self, dim: usize) -> Vec<usize> {
        self.widths.clone().unwrap_or_else(|| vec![dim; 3])
    }

    fn validate(&self, n: usize) -> Result<(), RegressionError> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.adam_epsilon > 0.0
            && self.init.is_valid()
            && self.clip_bound > 0.0
            && self.batch_size != Some(0)
            && self
                .widths
                .as_ref()
                .is_none_or(|w| w.iter().all(|&x| x > 0));
        if !ok {
            return Err(RegressionError::InvalidArgument(
                "invalid training configuration",
            ));
        }
        if n == 0 {
            return Err(RegressionError::EmptyData);
        }
        Ok(())
    }

    /// Fails if some `|f₀(x)|` over `points` exceeds `C_B`.
    pub fn check_clip_bound(
        &self,
        target: &HolderTarget,
        points: &PointCloud,
    ) -> Result<(), RegressionError> {
        let observed = points
            .iter()
            .map(|x| target.value(x).abs())
            .fold(0.0, f64::max);
        if observed > self.clip_bound {
            Err(RegressionError::ClipBoundTooSmall {
                bound: self.clip_bound,
                observed,
            })
        } else {
            Ok(())
        }
    }
}

struct Dense {
    inp: usize,
    out: usize,
    w: Vec<f64>,
    b: Vec<f64>,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }

    fn step(&mut self, params: &mut [f64], grads: &[f64], cfg: &TrainConfig, t: i32) {
        let c1 = 1.0 - libm::pow(cfg.beta1, f64::from(t));
        let c2 = 1.0 - libm::pow(cfg.beta2, f64::from(t));
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * g;
            self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * g * g;
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] -= cfg.learning_rate * mh / (libm::sqrt(vh) + cfg.adam_epsilon);
        }
    }
}

/// An ERM fit: the trained network and its clipping level.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub network: Network,
    pub clip_bound: f64,
    /// Mean squared error of the unclipped network on the training set.
    pub final_loss: f64,
}

impl TrainedModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64, RegressionError> {
        let v = self.network.evaluate_scalar(x)?;
        Ok(v.clamp(-self.clip_bound, self.clip_bound))
    }
}

struct Mlp {
    layers: Vec<Dense>,
}

struct Workspace {
    // Pre-activations and activations per layer; acts[0] is the input.
    pre: Vec<Vec<f64>>,
    acts: Vec<Vec<f64>>,
    delta: Vec<f64>,
    next_delta: Vec<f64>,
}

impl Mlp {
    fn init<R: rand::Rng>(sizes: &[usize], init: WeightInit, rng: &mut R) -> Self {
        let layers = sizes
            .windows(2)
            .map(|s| {
                let scale = init.std_dev(s[0]);
                Dense {
                    inp: s[0],
                    out: s[1],
                    w: (0..s[0] * s[1])
                        .map(|_| {
                            let z: f64 = StandardNormal.sample(rng);
                            scale * z
                        })
                        .collect(),
                    b: vec![0.0; s[1]],
                }
            })
            .collect();
        Self { layers }
    }

    fn workspace(&self) -> Workspace {
        let mut acts = vec![vec![0.0; self.layers[0].inp]];
        let mut pre = vec![Vec::new()];
        for l in &self.layers {
            acts.push(vec![0.0; l.out]);
            pre.push(vec![0.0; l.out]);
        }
        Workspace {
            pre,
            acts,
            delta: Vec::new(),
            next_delta: Vec::new(),
        }
    }

    fn forward(&self, x: &[f64], ws: &mut Workspace) -> f64 {
        ws.acts[0].copy_from_slice(x);
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let (head, tail) = ws.acts.split_at_mut(l + 1);
            let input = &head[l];
            let out = &mut tail[0];
            let pre = &mut ws.pre[l + 1];
            for r in 0..layer.out {
                let row = &layer.w[r * layer.inp..(r + 1) * layer.inp];
                let z = layer.b[r] + row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>();
                pre[r] = z;
                out[r] = if l < last { z.max(0.0) } else { z };
            }
        }
        ws.acts[last + 1][0]
    }

    /// Accumulates `∂/∂θ` of `scale·(R(x) − y)²` into `grads` (one slice per
    /// layer, weights then biases) and returns the squared residual.
    fn backward(
        &self,
        x: &[f64],
        y: f64,
        scale: f64,
        ws: &mut Workspace,
        grads: &mut [Vec<f64>],
    ) -> f64 {
        let out = self.forward(x, ws);
        let r = out - y;
        ws.delta.clear();
        ws.delta.push(2.0 * r * scale);
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let g = &mut grads[l];
            let input = &ws.acts[l];
            for (o, &d) in ws.delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &mut g[o * layer.inp..(o + 1) * layer.inp];
                for (gw, a) in row.iter_mut().zip(input) {
                    *gw += d * a;
                }
                g[layer.out * layer.inp + o] += d;
            }
            if l == 0 {
                break;
            }
            ws.next_delta.clear();
            ws.next_delta.resize(layer.inp, 0.0);
            for (o, &d) in ws.delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &layer.w[o * layer.inp..(o + 1) * layer.inp];
                for (nd, w) in ws.next_delta.iter_mut().zip(row) {
                    *nd += d * w;
                }
            }
            for (nd, &z) in ws.next_delta.iter_mut().zip(&ws.pre[l]) {
                if z <= 0.0 {
                    *nd = 0.0;
                }
            }
            core::mem::swap(&mut ws.delta, &mut ws.next_delta);
        }
        r * r
    }

    fn to_network(&self) -> Result<Network, RegressionError> {
        let parts = self
            .layers
            .iter()
            .map(|l| {
                (
                    Matrix::from_row_major(l.out, l.inp, l.w.clone()),
                    l.b.clone(),
                )
            })
            .collect();
        Ok(Network::from_parts(parts)?)
    }
}

/// Least-squares fit of a ReLU MLP by Adam, clipped to `[−C_B, C_B]`.
pub fn train_erm(
    data: &RegressionDataset,
    config: &TrainConfig,
) -> Result<TrainedModel, RegressionError> {
    let n = data.len();
    config.validate(n)?;
    let dim = data.dim();
    let mut sizes = vec![dim];
    sizes.extend(config.hidden(dim));
    sizes.push(1);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut mlp = Mlp::init(&sizes, config.init, &mut rng);
    let mut opt: Vec<Adam> = mlp
        .layers
        .iter()
        .map(|l| Adam::new(l.w.len() + l.b.len()))
        .collect();
    let mut grads: Vec<Vec<f64>> = mlp
        .layers
        .iter()
        .map(|l| vec![0.0; l.w.len() + l.b.len()])
        .collect();
    let mut params: Vec<Vec<f64>> = grads.clone();
    let batch = config
        .batch_size
        .unwrap_or(if n <= FULL_BATCH_LIMIT {
            n
        } else {
            DEFAULT_BATCH
        })
        .min(n);
    let mut order: Vec<usize> = (0..n).collect();
    let mut ws = mlp.workspace();
    let mut t = 0i32;

    for epoch in 0..config.epochs {
        if batch < n {
            order.shuffle(&mut rng);
        }
        let mut sse = 0.0;
        for chunk in order.chunks(batch) {
            grads
                .iter_mut()
                .for_each(|g| g.iter_mut().for_each(|v| *v = 0.0));
            let scale = 1.0 / chunk.len() as f64;
            for &i in chunk {
                sse += mlp.backward(data.x.point(i), data.y[i], scale, &mut ws, &mut grads);
            }
            t = t.saturating_add(1);
            for (l, layer) in mlp.layers.iter_mut().enumerate() {
                let p = &mut params[l];
                let nw = layer.w.len();
                p[..nw].copy_from_slice(&layer.w);
                p[nw..].copy_from_slice(&layer.b);
                opt[l].step(p, &grads[l], config, t);
                layer.w.copy_from_slice(&p[..nw]);
                layer.b.copy_from_slice(&p[nw..]);
            }
        }
        if !sse.is_finite() {
            return Err(RegressionError::Diverged { epoch });
        }
    }

    let mut sse = 0.0;
    for i in 0..n {
        let r = mlp.forward(data.x.point(i), &mut ws) - data.y[i];
        sse += r * r;
    }
    let final_loss = sse / n as f64;
    if !final_loss.is_finite() {
        return Err(RegressionError::Diverged {
            epoch: config.epochs,
        });
    }
    Ok(TrainedModel {
        network: mlp.to_network()?,
        clip_bound: config.clip_bound,
        final_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SupportKind;

    fn data(n: usize, f: impl Fn(&[f64]) -> f64) -> RegressionDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..2 * n)
            .map(|_| rand::Rng::random::<f64>(&mut rng))
            .collect();
        let x = PointCloud::new(2, xs).unwrap();
        let y = x.iter().map(|p| f(p)).collect();
        RegressionDataset {
            x,
            y,
            sigma2: 0.0,
            seed: 1,
            support: SupportKind::Cube { dim: 2 },
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let ds = data(1, |_| 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut mlp = Mlp::init(&[2, 3, 3, 1], WeightInit::Normal(1.0), &mut rng);
        let mut ws = mlp.workspace();
        let mut grads: Vec<Vec<f64>> = mlp
            .layers
            .iter()
            .map(|l| vec![0.0; l.w.len() + l.b.len()])
            .collect();
        let x = ds.x.point(0);
        mlp.backward(x, 0.3, 1.0, &mut ws, &mut grads);
        let h = 1e-6;
        for l in 0..mlp.layers.len() {
            for k in 0..mlp.layers[l].w.len() {
                let orig = mlp.layers[l].w[k];
                mlp.layers[l].w[k] = orig + h;
                let up = (mlp.forward(x, &mut ws) - 0.3).powi(2);
                mlp.layers[l].w[k] = orig - h;
                let down = (mlp.forward(x, &mut ws) - 0.3).powi(2);
                mlp.layers[l].w[k] = orig;
                let fd = (up - down) / (2.0 * h);
                assert!((fd - grads[l][k]).abs() < 1e-5, "layer {l} entry {k}");
            }
        }
    }

    #[test]
    fn network_export_matches_forward() {
        let ds = data(20, |p| p[0] - p[1]);
        let cfg = TrainConfig {
            epochs: 5,
            seed: 2,
            ..TrainConfig::default()
        };
        let model = train_erm(&ds, &cfg).unwrap();
        assert_eq!(model.network.depth(), 4);
        let again = train_erm(&ds, &cfg).unwrap();
        assert_eq!(model, again);
    }

    #[test]
    fn divergence_is_reported() {
        let ds = data(10, |_| 1e300);
        let cfg = TrainConfig {
            epochs: 3,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train_erm(&ds, &cfg),
            Err(RegressionError::Diverged { epoch: 0 })
        ));
    }
}
