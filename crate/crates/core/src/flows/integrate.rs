use crate::error::{Error, Result};
use crate::symalg::CompiledField;

/// Fixed-step integrator settings shared by every flow computation.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    /// RK4 steps per unit of flow time; a flow for time `t` takes
    /// `max(1, ⌈|t| · steps_per_unit⌉)` steps.
    pub steps_per_unit: u32,
    pub max_time: f64,
    pub seed: u64,
    /// Divergence guard on `max_i |x_i|`.
    pub escape_bound: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { steps_per_unit: 64, max_time: 4.0, seed: 0, escape_bound: 1e6 }
    }
}

impl FlowConfig {
    pub fn with_seed(seed: u64) -> Self {
        FlowConfig { seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_unit < 8 {
            return Err(Error::Precondition(format!(
                "at least 8 steps per unit time required, got {}",
                self.steps_per_unit
            )));
        }
        if !(self.max_time > 0.0) || !(self.escape_bound > 0.0) {
            return Err(Error::Precondition("max time and escape bound must be positive".into()));
        }
        Ok(())
    }
}

/// Scratch buffers for RK4 so the hot loops do not allocate.
#[derive(Clone, Debug)]
pub(crate) struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Rk4Scratch { k1: vec![0.0; n], k2: vec![0.0; n], k3: vec![0.0; n], k4: vec![0.0; n], tmp: vec![0.0; n] }
    }
}

/// Integrates `ẋ = f(x)` for time `t` in place with classical RK4.
pub(crate) fn rk4_in_place<F>(f: F, x: &mut [f64], t: f64, cfg: &FlowConfig, s: &mut Rk4Scratch) -> Result<()>
where
    F: Fn(&[f64], &mut [f64]),
{
    if t.abs() > cfg.max_time {
        return Err(Error::FlowTimeTooLong { time: t, max: cfg.max_time });
    }
    if t == 0.0 {
        return Ok(());
    }
    let steps = ((t.abs() * cfg.steps_per_unit as f64).ceil() as usize).max(1);
    let h = t / steps as f64;
    let n = x.len();
    for step in 0..steps {
        f(x, &mut s.k1);
        for i in 0..n {
            s.tmp[i] = x[i] + 0.5 * h * s.k1[i];
        }
        f(&s.tmp, &mut s.k2);
        for i in 0..n {
            s.tmp[i] = x[i] + 0.5 * h * s.k2[i];
        }
        f(&s.tmp, &mut s.k3);
        for i in 0..n {
            s.tmp[i] = x[i] + h * s.k3[i];
        }
        f(&s.tmp, &mut s.k4);
        for i in 0..n {
            x[i] += h / 6.0 * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
        }
        if x.iter().any(|v| !v.is_finite() || v.abs() > cfg.escape_bound) {
            return Err(Error::FlowDivergence { time: h * (step + 1) as f64 });
        }
    }
    Ok(())
}

pub(crate) fn flow_field_in_place(
    field: &CompiledField,
    x: &mut [f64],
    t: f64,
    cfg: &FlowConfig,
    s: &mut Rk4Scratch,
) -> Result<()> {
    rk4_in_place(|y, out| field.eval_into(y, out), x, t, cfg, s)
}

/// `e^{tX}(x)`: the time-`t` flow of `X` starting at `x`.
pub fn flow(field: &CompiledField, x: &[f64], t: f64, cfg: &FlowConfig) -> Result<Vec<f64>> {
    if x.len() != field.dim() {
        return Err(Error::DimensionMismatch { expected: field.dim(), found: x.len() });
    }
    let mut y = x.to_vec();
    let mut s = Rk4Scratch::new(x.len());
    flow_field_in_place(field, &mut y, t, cfg, &mut s)?;
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symalg::{parse_polynomial, PolyVectorField};

    fn field(n: usize, comps: &[&str]) -> CompiledField {
        PolyVectorField::new(comps.iter().map(|c| parse_polynomial(c, n).unwrap()).collect())
            .unwrap()
            .compile()
    }

    #[test]
    fn constant_field_is_exact() {
        let x = flow(&field(3, &["1", "0", "0"]), &[0.0; 3], 0.7, &FlowConfig::default()).unwrap();
        assert!((x[0] - 0.7).abs() < 1e-15 && x[1] == 0.0 && x[2] == 0.0, "{x:?}");
    }

    #[test]
    fn linear_field_matches_exponential() {
        let x = flow(&field(1, &["x1"]), &[1.0], 1.0, &FlowConfig::default()).unwrap();
        assert!((x[0] - std::f64::consts::E).abs() < 1e-6, "{}", x[0]);
    }

    #[test]
    fn reversibility() {
        let f = field(2, &["1 + x2^2", "-x1"]);
        let cfg = FlowConfig::default();
        let y = flow(&f, &[0.3, -0.2], 0.9, &cfg).unwrap();
        let back = flow(&f, &y, -0.9, &cfg).unwrap();
        assert!((back[0] - 0.3).abs() < 1e-8 && (back[1] + 0.2).abs() < 1e-8, "{back:?}");
    }

    #[test]
    fn divergence_is_reported() {
        // ẋ = x², blows up at t = 1 from x = 1
        let cfg = FlowConfig { escape_bound: 1e3, ..Default::default() };
        match flow(&field(1, &["x1^2"]), &[1.0], 2.0, &cfg) {
            Err(Error::FlowDivergence { time }) => assert!(time > 0.9 && time <= 1.1, "{time}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn time_limit_and_config_checks() {
        let f = field(1, &["1"]);
        assert!(matches!(flow(&f, &[0.0], 5.0, &FlowConfig::default()), Err(Error::FlowTimeTooLong { .. })));
        assert!(FlowConfig { steps_per_unit: 4, ..Default::default() }.validate().is_err());
        assert!(flow(&f, &[0.0, 1.0], 1.0, &FlowConfig::default()).is_err());
    }
}
