//! The discrete generalized Caputo derivative operator.

use crate::error::{Error, Result};
use crate::functions::{GridFunction1D, ScaleWeightPair, TimeGrid};
use crate::weights::{gamma, LambdaBuilder};

/// Approximated derivative at t_1..t_N; the operator is not evaluated at t_0.
#[derive(Debug, Clone)]
pub struct DerivativeSeries {
    pub grid: TimeGrid,
    pub alpha: f64,
    /// values[n - 1] approximates the derivative at t_n
    pub values: Vec<f64>,
}

impl DerivativeSeries {
    /// Value at time level n, 1 <= n <= N.
    pub fn at(&self, n: usize) -> f64 {
        self.values[n - 1]
    }
}

/// Apply the discrete operator to samples U(t_0)..U(t_N):
/// value at t_n is sum_{l=0}^{n} lambda_l * omega_{n-l} * U_{n-l}.
pub fn gcfd_apply(
    samples: &[f64],
    pair: &ScaleWeightPair,
    grid: &TimeGrid,
    alpha: f64,
) -> Result<DerivativeSeries> {
    let n_steps = grid.subintervals();
    if n_steps == 0 || samples.len() < 2 {
        return Err(Error::EmptySeries);
    }
    assert_eq!(samples.len(), grid.num_nodes(), "samples must cover every node");
    let mut builder = LambdaBuilder::new(pair, grid, alpha);
    let mut values = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        let w = builder.lambda(n)?;
        let mut acc = 0.0;
        for (l, lam) in w.lambda.iter().enumerate() {
            acc += lam * pair.omega(n - l) * samples[n - l];
        }
        values.push(acc);
    }
    Ok(DerivativeSeries {
        grid: grid.clone(),
        alpha,
        values,
    })
}

/// Analytic derivative of t^p for the classical configuration
/// (zeta(t)=t, omega(t)=1): Gamma(p+1)/Gamma(p+1-alpha) * t^(p-alpha).
pub fn gcfd_reference(
    pair: &ScaleWeightPair,
    power: f64,
    alpha: f64,
    grid: &TimeGrid,
) -> Result<DerivativeSeries> {
    let classical = matches!(pair.scale(), GridFunction1D::Identity)
        && pair.omega_values().iter().all(|&w| w == 1.0);
    if !classical {
        return Err(Error::UnsupportedOracle);
    }
    let factor = caputo_power_factor(power, alpha)?;
    let values = (1..=grid.subintervals())
        .map(|n| factor * grid.node(n).powf(power - alpha))
        .collect();
    Ok(DerivativeSeries {
        grid: grid.clone(),
        alpha,
        values,
    })
}

/// Gamma(p+1)/Gamma(p+1-alpha), valid for any p > 0 via the recurrence
/// Gamma(x+1) = x*Gamma(x) to stay inside the gamma routine's domain.
pub fn caputo_power_factor(power: f64, alpha: f64) -> Result<f64> {
    if !(power > 0.0) {
        return Err(Error::Config(format!("power rule needs p > 0, got {power}")));
    }
    let mut num = power + 1.0;
    let mut den = power + 1.0 - alpha;
    let mut ratio = 1.0;
    while num > 12.0 || den > 12.0 {
        num -= 1.0;
        den -= 1.0;
        ratio *= num / den;
    }
    Ok(ratio * gamma(num)? / gamma(den)?)
}
