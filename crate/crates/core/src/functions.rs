//! Scale/weight function descriptors, uniform grids, and hypothesis checks.
//!
//! Scale and weight functions enter the discretization only through their
//! values at grid nodes, so they are kept as symbolic descriptors evaluated
//! pointwise. A tabulated descriptor carries its node values directly and is
//! only valid on a grid of matching size.

use crate::error::{Error, Result};

/// A scalar function of time on a closed interval, evaluable at grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum GridFunction1D {
    /// t
    Identity,
    /// p*t + q
    Affine { p: f64, q: f64 },
    /// t^sigma
    Power { sigma: f64 },
    /// e^(k*t)
    Exponential { k: f64 },
    /// Values declared on a specific grid; no interpolation between nodes.
    Tabulated { values: Vec<f64> },
}

impl GridFunction1D {
    pub fn constant_one() -> Self {
        GridFunction1D::Affine { p: 0.0, q: 1.0 }
    }

    /// Pointwise evaluation. Errors for tabulated functions, which are only
    /// defined at their declared grid nodes.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            GridFunction1D::Identity => Ok(t),
            GridFunction1D::Affine { p, q } => Ok(p * t + q),
            GridFunction1D::Power { sigma } => Ok(t.powf(*sigma)),
            GridFunction1D::Exponential { k } => Ok((k * t).exp()),
            GridFunction1D::Tabulated { values } => Err(Error::GridMismatch {
                expected: 0,
                got: values.len(),
            }),
        }
    }

    /// Evaluate at every node of `grid`.
    pub fn eval_on_grid(&self, grid: &TimeGrid) -> Result<Vec<f64>> {
        match self {
            GridFunction1D::Tabulated { values } => {
                if values.len() != grid.num_nodes() {
                    return Err(Error::GridMismatch {
                        expected: grid.num_nodes(),
                        got: values.len(),
                    });
                }
                Ok(values.clone())
            }
            _ => grid.nodes().map(|t| self.eval(t)).collect(),
        }
    }

    /// True when the descriptor is constant or affine in t. The discrete
    /// derivative weights become translation invariant for such scales.
    pub fn is_affine(&self) -> bool {
        matches!(
            self,
            GridFunction1D::Identity | GridFunction1D::Affine { .. }
        )
    }
}

/// Uniform time grid t_n = n * tau on [0, T].
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    subintervals: usize,
    tau: f64,
}

impl TimeGrid {
    pub fn new(horizon: f64, subintervals: usize) -> Result<Self> {
        if subintervals == 0 || !(horizon > 0.0) {
            return Err(Error::Config(format!(
                "time grid needs T > 0 and N >= 1, got T={horizon}, N={subintervals}"
            )));
        }
        Ok(TimeGrid {
            horizon,
            subintervals,
            tau: horizon / subintervals as f64,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn subintervals(&self) -> usize {
        self.subintervals
    }

    pub fn num_nodes(&self) -> usize {
        self.subintervals + 1
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn node(&self, n: usize) -> f64 {
        if n == self.subintervals {
            self.horizon
        } else {
            n as f64 * self.tau
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_nodes()).map(move |n| self.node(n))
    }
}

/// Uniform spatial grid x_i = i * h on [0, a].
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceGrid {
    length: f64,
    subintervals: usize,
    h: f64,
}

impl SpaceGrid {
    pub fn new(length: f64, subintervals: usize) -> Result<Self> {
        if subintervals == 0 || !(length > 0.0) {
            return Err(Error::Config(format!(
                "space grid needs a > 0 and M >= 1, got a={length}, M={subintervals}"
            )));
        }
        Ok(SpaceGrid {
            length,
            subintervals,
            h: length / subintervals as f64,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn subintervals(&self) -> usize {
        self.subintervals
    }

    pub fn num_nodes(&self) -> usize {
        self.subintervals + 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.subintervals {
            self.length
        } else {
            i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_nodes()).map(move |i| self.node(i))
    }
}

/// Scale/weight pair with node values cached on a time grid.
#[derive(Debug, Clone)]
pub struct ScaleWeightPair {
    scale: GridFunction1D,
    weight: GridFunction1D,
    zeta: Vec<f64>,
    omega: Vec<f64>,
}

impl ScaleWeightPair {
    pub fn on_grid(scale: GridFunction1D, weight: GridFunction1D, grid: &TimeGrid) -> Result<Self> {
        let zeta = scale.eval_on_grid(grid)?;
        let omega = weight.eval_on_grid(grid)?;
        Ok(ScaleWeightPair {
            scale,
            weight,
            zeta,
            omega,
        })
    }

    /// Classical Caputo configuration: zeta(t)=t, omega(t)=1.
    pub fn classical(grid: &TimeGrid) -> Self {
        Self::on_grid(GridFunction1D::Identity, GridFunction1D::constant_one(), grid)
            .expect("builtin descriptors evaluate everywhere")
    }

    pub fn scale(&self) -> &GridFunction1D {
        &self.scale
    }

    pub fn weight(&self) -> &GridFunction1D {
        &self.weight
    }

    pub fn zeta(&self, n: usize) -> f64 {
        self.zeta[n]
    }

    pub fn omega(&self, n: usize) -> f64 {
        self.omega[n]
    }

    pub fn zeta_values(&self) -> &[f64] {
        &self.zeta
    }

    pub fn omega_values(&self) -> &[f64] {
        &self.omega
    }
}

/// Which grid-point hypothesis a pair fails to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisViolation {
    /// zeta(t_n) <= zeta(t_{n-1})
    ScaleNotIncreasing { index: usize },
    /// omega(t_n) <= 0 for n >= 1
    WeightNotPositive { index: usize },
    /// omega(t_n) < omega(t_{n-1})
    WeightDecreasing { index: usize },
}

/// Check the coefficient-lemma hypotheses at the grid nodes. An empty report
/// means the pair satisfies every hypothesis; violations never abort.
///
/// Weight positivity is checked strictly for n >= 1 because 1/omega_n appears
/// in every coefficient. Behavior between nodes is not checked.
pub fn validate_pair(pair: &ScaleWeightPair) -> Vec<HypothesisViolation> {
    let mut report = Vec::new();
    let zeta = pair.zeta_values();
    let omega = pair.omega_values();
    for n in 1..zeta.len() {
        if zeta[n] <= zeta[n - 1] {
            report.push(HypothesisViolation::ScaleNotIncreasing { index: n });
        }
        if omega[n] <= 0.0 {
            report.push(HypothesisViolation::WeightNotPositive { index: n });
        }
        if omega[n] < omega[n - 1] {
            report.push(HypothesisViolation::WeightDecreasing { index: n });
        }
    }
    report
}
