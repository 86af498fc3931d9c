//! Named parameter store with deterministic, seeded initialization.
//!
//! Parameters are registered under hierarchical dotted names (e.g.
//! `prior.flow.step2.out.weight`) so checkpoints can be loaded partially per
//! submodule. Initialization draws from a seeded RNG in registration order,
//! which makes model construction bit-reproducible.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;
use std::rc::Rc;

use candle_core::{DType, Device, Tensor, Var};
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub enum Init {
    Zeros,
    Const(f64),
    /// Uniform in [-bound, bound] with bound = sqrt(1 / fan_in).
    KaimingUniform { fan_in: usize },
    Normal { std: f64 },
}

struct Store {
    vars: BTreeMap<String, Var>,
    device: Device,
    rng: ChaCha20Rng,
}

/// Shared handle to the parameter store.
#[derive(Clone)]
pub struct Params {
    inner: Rc<RefCell<Store>>,
}

impl Params {
    pub fn new(device: &Device, seed: u64) -> Self {
        Params {
            inner: Rc::new(RefCell::new(Store {
                vars: BTreeMap::new(),
                device: device.clone(),
                rng: ChaCha20Rng::seed_from_u64(seed),
            })),
        }
    }

    pub fn device(&self) -> Device {
        self.inner.borrow().device.clone()
    }

    pub fn scope(&self, prefix: impl Into<String>) -> Scope {
        Scope {
            params: self.clone(),
            prefix: prefix.into(),
        }
    }

    fn register(&self, name: String, shape: &[usize], init: Init) -> Result<Var> {
        let mut store = self.inner.borrow_mut();
        if store.vars.contains_key(&name) {
            return Err(Error::Other(format!("parameter `{name}` registered twice")));
        }
        let n: usize = shape.iter().product();
        let data: Vec<f32> = match init {
            Init::Zeros => vec![0.0; n],
            Init::Const(c) => vec![c as f32; n],
            Init::KaimingUniform { fan_in } => {
                let bound = (1.0 / fan_in as f64).sqrt();
                let dist = rand::distributions::Uniform::new(-bound, bound);
                (0..n).map(|_| dist.sample(&mut store.rng) as f32).collect()
            }
            Init::Normal { std } => {
                let dist = rand_distr_normal(std);
                (0..n).map(|_| dist.sample(&mut store.rng) as f32).collect()
            }
        };
        let t = Tensor::from_vec(data, shape, &store.device)?;
        let var = Var::from_tensor(&t)?;
        store.vars.insert(name, var.clone());
        Ok(var)
    }

    /// All parameters in name order.
    pub fn named_vars(&self) -> Vec<(String, Var)> {
        self.inner
            .borrow()
            .vars
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    /// Parameters whose name passes the filter, in name order.
    pub fn vars_where(&self, pred: impl Fn(&str) -> bool) -> Vec<(String, Var)> {
        self.inner
            .borrow()
            .vars
            .iter()
            .filter(|(k, _)| pred(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    pub fn n_params(&self) -> usize {
        self.inner
            .borrow()
            .vars
            .values()
            .map(|v| v.as_tensor().elem_count())
            .sum()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let store = self.inner.borrow();
        let map: std::collections::HashMap<String, Tensor> = store
            .vars
            .iter()
            .map(|(k, v)| (k.clone(), v.as_tensor().clone()))
            .collect();
        candle_core::safetensors::save(&map, path.as_ref())?;
        Ok(())
    }

    /// Loads values into existing parameters. Every stored tensor must match
    /// a registered parameter's shape; missing entries are an error unless
    /// `allow_partial` is set (used to load submodule subsets).
    pub fn load(&self, path: impl AsRef<Path>, allow_partial: bool) -> Result<()> {
        let path = path.as_ref();
        let loaded = candle_core::safetensors::load(path, &self.device())?;
        let store = self.inner.borrow();
        for (name, var) in store.vars.iter() {
            match loaded.get(name) {
                Some(t) => {
                    if t.dims() != var.as_tensor().dims() {
                        return Err(Error::Checkpoint {
                            path: path.into(),
                            message: format!(
                                "shape mismatch for `{name}`: stored {:?}, model {:?}",
                                t.dims(),
                                var.as_tensor().dims()
                            ),
                        });
                    }
                    var.set(t)?;
                }
                None if allow_partial => {}
                None => {
                    return Err(Error::Checkpoint {
                        path: path.into(),
                        message: format!("missing parameter `{name}`"),
                    })
                }
            }
        }
        Ok(())
    }
}

// rand_distr's Normal without pulling the extra crate: Box-Muller over Uniform.
struct BoxMuller {
    std: f64,
}

fn rand_distr_normal(std: f64) -> BoxMuller {
    BoxMuller { std }
}

impl Distribution<f64> for BoxMuller {
    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos() * self.std
    }
}

/// A dotted-name prefix into the parameter store.
#[derive(Clone)]
pub struct Scope {
    params: Params,
    prefix: String,
}

impl Scope {
    pub fn sub(&self, name: impl AsRef<str>) -> Scope {
        let prefix = if self.prefix.is_empty() {
            name.as_ref().to_string()
        } else {
            format!("{}.{}", self.prefix, name.as_ref())
        };
        Scope {
            params: self.params.clone(),
            prefix,
        }
    }

    pub fn param(&self, name: &str, shape: &[usize], init: Init) -> Result<Var> {
        let full = if self.prefix.is_empty() {
            name.to_string()
        } else {
            format!("{}.{name}", self.prefix)
        };
        self.params.register(full, shape, init)
    }

    pub fn device(&self) -> Device {
        self.params.device()
    }
}
