//! Builtin benchmark problems with manufactured exact solutions.
//!
//! `ex51` is a derivative study: apply the discrete operator to u(t)=t^(4+a)
//! and compare with the analytic derivative. `ex52` and `ex54` are full
//! advection-diffusion problems whose sources were manufactured from known
//! exact solutions (for the classical scale/weight configuration).

use crate::error::{Error, Result};
use crate::functions::{GridFunction1D, ScaleWeightPair, TimeGrid};
use crate::gcfd::{caputo_power_factor, gcfd_apply, DerivativeSeries};
use crate::pde::AdvectionDiffusionProblem;
use crate::weights::gamma;

/// Derivative benchmark: u(t) = t^(4+alpha) on [0,1], configurable weight.
#[derive(Debug, Clone)]
pub struct DerivativeBenchmark {
    pub name: &'static str,
    pub alpha: f64,
    pub scale: GridFunction1D,
    pub weight: GridFunction1D,
}

impl DerivativeBenchmark {
    pub fn samples(&self, grid: &TimeGrid) -> Vec<f64> {
        let p = 4.0 + self.alpha;
        grid.nodes().map(|t| t.powf(p)).collect()
    }

    pub fn numeric(&self, grid: &TimeGrid) -> Result<DerivativeSeries> {
        let pair = ScaleWeightPair::on_grid(self.scale.clone(), self.weight.clone(), grid)?;
        gcfd_apply(&self.samples(grid), &pair, grid, self.alpha)
    }

    /// Analytic derivative values at t_1..t_N. Requires the identity scale;
    /// covers constant, affine, power, and exponential weights in closed form
    /// (the exponential case through a rapidly converging power series).
    pub fn exact(&self, grid: &TimeGrid) -> Result<DerivativeSeries> {
        if !matches!(self.scale, GridFunction1D::Identity) {
            return Err(Error::UnsupportedOracle);
        }
        let a = self.alpha;
        let values: Result<Vec<f64>> = (1..=grid.subintervals())
            .map(|n| exact_weighted_power_derivative(&self.weight, a, grid.node(n)))
            .collect();
        Ok(DerivativeSeries {
            grid: grid.clone(),
            alpha: a,
            values: values?,
        })
    }
}

/// Exact derivative of t^(4+alpha) under the identity scale and weight
/// omega: omega(t)^-1 * classical-Caputo[omega * t^(4+alpha)](t).
fn exact_weighted_power_derivative(weight: &GridFunction1D, alpha: f64, t: f64) -> Result<f64> {
    match weight {
        // omega = p*t + q: two power terms
        GridFunction1D::Affine { p, q } => {
            let quartic = caputo_power_factor(4.0 + alpha, alpha)? * t.powi(4);
            let quintic = caputo_power_factor(5.0 + alpha, alpha)? * t.powi(5);
            Ok((p * quintic + q * quartic) / (p * t + q))
        }
        GridFunction1D::Identity => {
            let quintic = caputo_power_factor(5.0 + alpha, alpha)? * t.powi(5);
            Ok(quintic / t)
        }
        // omega = t^sigma: single shifted power term
        GridFunction1D::Power { sigma } => {
            Ok(caputo_power_factor(4.0 + alpha + sigma, alpha)? * t.powi(4))
        }
        // omega = e^(kt): expand e^(kt) * t^(4+alpha) in powers of t
        GridFunction1D::Exponential { k } => {
            let mut coeff = caputo_power_factor(4.0 + alpha, alpha)?;
            let mut term_scale = 1.0; // k^m / m!
            let mut sum = 0.0;
            let mut m = 0usize;
            loop {
                let term = term_scale * coeff * t.powi(4 + m as i32);
                sum += term;
                if term.abs() <= 1e-18 * sum.abs() && m > 4 {
                    break;
                }
                if m > 200 {
                    return Err(Error::Config(
                        "weighted-derivative series failed to converge".into(),
                    ));
                }
                let mf = m as f64;
                coeff *= (5.0 + alpha + mf) / (5.0 + mf);
                term_scale *= k / (mf + 1.0);
                m += 1;
            }
            Ok(sum * (-k * t).exp())
        }
        GridFunction1D::Tabulated { .. } => Err(Error::UnsupportedOracle),
    }
}

/// PDE benchmark with its exact solution and the analytic pieces needed to
/// verify that the source was manufactured consistently.
pub struct PdeBenchmark {
    pub name: &'static str,
    pub problem: AdvectionDiffusionProblem,
    pub exact: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    exact_dalpha: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    exact_dx: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    exact_dxx: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl PdeBenchmark {
    /// |D^alpha u - (D u_xx - A u_x + f)| at one point, evaluated from the
    /// analytic pieces; zero (to roundoff) iff the source is consistent.
    pub fn source_residual(&self, x: f64, t: f64) -> f64 {
        let rhs = self.problem.diffusion * (self.exact_dxx)(x, t)
            - self.problem.advection * (self.exact_dx)(x, t)
            + (self.problem.source)(x, t);
        ((self.exact_dalpha)(x, t) - rhs).abs()
    }

    /// Max source residual over a fixed set of 20 pseudo-random interior
    /// points; the builtin definitions keep this at roundoff level.
    pub fn self_check(&self) -> f64 {
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let x = 0.05 + 0.9 * next() * self.problem.domain_length;
            let t = 0.05 + 0.9 * next() * self.problem.horizon;
            worst = worst.max(self.source_residual(x, t));
        }
        worst
    }
}

/// Any builtin benchmark.
pub enum BuiltinProblem {
    Derivative(DerivativeBenchmark),
    Pde(PdeBenchmark),
}

/// Look up a builtin by name: `ex51` (derivative study), `ex52`, `ex54`
/// (advection-diffusion with manufactured solutions).
pub fn builtin_problem(name: &str, alpha: f64) -> Result<BuiltinProblem> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0,1), got {alpha}")));
    }
    match name {
        "ex51" => Ok(BuiltinProblem::Derivative(DerivativeBenchmark {
            name: "ex51",
            alpha,
            scale: GridFunction1D::Identity,
            weight: GridFunction1D::constant_one(),
        })),
        "ex52" => Ok(BuiltinProblem::Pde(ex52(alpha)?)),
        "ex54" => Ok(BuiltinProblem::Pde(ex54(alpha)?)),
        "exp-quintic" => Ok(BuiltinProblem::Pde(exp_quintic(alpha)?)),
        _ => Err(Error::UnknownProblem(name.into())),
    }
}

/// Exact solution e^x * t^(5+alpha); source e^x t^5 Gamma(6+alpha)/120.
/// A lower-power variant of `ex52` used for cross-validation runs.
pub fn exp_quintic(alpha: f64) -> Result<PdeBenchmark> {
    let g6a = gamma(6.0 + alpha)?;
    let e = std::f64::consts::E;
    let problem = AdvectionDiffusionProblem {
        alpha,
        diffusion: 1.0,
        advection: 1.0,
        scale: GridFunction1D::Identity,
        weight: GridFunction1D::constant_one(),
        source: Box::new(move |x, t| x.exp() * t.powi(5) * g6a / 120.0),
        initial: Box::new(|_| 0.0),
        initial_dx: Some(Box::new(|_| 0.0)),
        initial_dxx: Some(Box::new(|_| 0.0)),
        left: Box::new(move |t| t.powf(5.0 + alpha)),
        right: Box::new(move |t| e * t.powf(5.0 + alpha)),
        domain_length: 1.0,
        horizon: 1.0,
        allow_fd_initial_derivatives: true,
    };
    Ok(PdeBenchmark {
        name: "exp-quintic",
        problem,
        exact: Box::new(move |x, t| x.exp() * t.powf(5.0 + alpha)),
        exact_dalpha: Box::new(move |x, t| x.exp() * g6a / 120.0 * t.powi(5)),
        exact_dx: Box::new(move |x, t| x.exp() * t.powf(5.0 + alpha)),
        exact_dxx: Box::new(move |x, t| x.exp() * t.powf(5.0 + alpha)),
    })
}

/// Exact solution e^x * t^(6+alpha); source e^x t^6 Gamma(7+alpha)/720.
pub fn ex52(alpha: f64) -> Result<PdeBenchmark> {
    let g7a = gamma(7.0 + alpha)?;
    let e = std::f64::consts::E;
    let problem = AdvectionDiffusionProblem {
        alpha,
        diffusion: 1.0,
        advection: 1.0,
        scale: GridFunction1D::Identity,
        weight: GridFunction1D::constant_one(),
        source: Box::new(move |x, t| x.exp() * t.powi(6) * g7a / 720.0),
        initial: Box::new(|_| 0.0),
        initial_dx: Some(Box::new(|_| 0.0)),
        initial_dxx: Some(Box::new(|_| 0.0)),
        left: Box::new(move |t| t.powf(6.0 + alpha)),
        right: Box::new(move |t| e * t.powf(6.0 + alpha)),
        domain_length: 1.0,
        horizon: 1.0,
        allow_fd_initial_derivatives: true,
    };
    // D^alpha[t^(6+alpha)] = Gamma(7+alpha)/720 * t^6
    Ok(PdeBenchmark {
        name: "ex52",
        problem,
        exact: Box::new(move |x, t| x.exp() * t.powf(6.0 + alpha)),
        exact_dalpha: Box::new(move |x, t| x.exp() * g7a / 720.0 * t.powi(6)),
        exact_dx: Box::new(move |x, t| x.exp() * t.powf(6.0 + alpha)),
        exact_dxx: Box::new(move |x, t| x.exp() * t.powf(6.0 + alpha)),
    })
}

/// Exact solution t^7 * sin(x);
/// source Gamma(8)/Gamma(8-alpha) t^(7-alpha) sin(x) + t^7 (sin(x) + cos(x)).
pub fn ex54(alpha: f64) -> Result<PdeBenchmark> {
    let factor = 5040.0 / gamma(8.0 - alpha)?;
    let problem = AdvectionDiffusionProblem {
        alpha,
        diffusion: 1.0,
        advection: 1.0,
        scale: GridFunction1D::Identity,
        weight: GridFunction1D::constant_one(),
        source: Box::new(move |x, t| {
            factor * t.powf(7.0 - alpha) * x.sin() + t.powi(7) * (x.sin() + x.cos())
        }),
        initial: Box::new(|_| 0.0),
        initial_dx: Some(Box::new(|_| 0.0)),
        initial_dxx: Some(Box::new(|_| 0.0)),
        left: Box::new(|_| 0.0),
        right: Box::new(|t| t.powi(7) * 1f64.sin()),
        domain_length: 1.0,
        horizon: 1.0,
        allow_fd_initial_derivatives: true,
    };
    Ok(PdeBenchmark {
        name: "ex54",
        problem,
        exact: Box::new(|x, t| t.powi(7) * x.sin()),
        exact_dalpha: Box::new(move |x, t| factor * t.powf(7.0 - alpha) * x.sin()),
        exact_dx: Box::new(|x, t| t.powi(7) * x.cos()),
        exact_dxx: Box::new(|x, t| -t.powi(7) * x.sin()),
    })
}
