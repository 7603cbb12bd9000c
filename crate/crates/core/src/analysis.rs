//! Error norms, observed convergence rates, the stability diagnostic, and
//! truncation-bound evaluation.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::gcfd::DerivativeSeries;
use crate::pde::SolutionField;
use crate::weights::gamma;

/// Max-norm error over interior spatial nodes at the final time level.
pub fn error_inf(numeric: &SolutionField, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let n = numeric.time.subintervals();
    let t = numeric.time.node(n);
    let m = numeric.space.subintervals();
    (1..m)
        .map(|i| (exact(numeric.space.node(i), t) - numeric.at(i, n)).abs())
        .fold(0.0, f64::max)
}

/// Discrete L2 error over interior spatial nodes at the final time level,
/// with the mesh width inside the root.
pub fn error_l2(numeric: &SolutionField, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let n = numeric.time.subintervals();
    let t = numeric.time.node(n);
    let m = numeric.space.subintervals();
    let sum: f64 = (1..m)
        .map(|i| {
            let e = exact(numeric.space.node(i), t) - numeric.at(i, n);
            e * e
        })
        .sum();
    (numeric.space.h() * sum).sqrt()
}

/// Max-norm error of a derivative series against exact values over all
/// computed time levels.
pub fn series_error_inf(numeric: &DerivativeSeries, exact: &DerivativeSeries) -> f64 {
    numeric
        .values
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Observed convergence order from a grid doubling, log2 of the error ratio.
/// Reported in the positive orientation: coarse error over fine error.
pub fn observed_rate(err_coarse: f64, err_fine: f64) -> Result<f64> {
    if !(err_coarse > 0.0) || !(err_fine > 0.0) {
        return Err(Error::UndefinedRate);
    }
    Ok((err_coarse / err_fine).log2())
}

/// Result of the scheme's stability inequality
/// lambda_1 <= lambda_0^(M-3) * (lambda_0 + D/h^2 - A/(2h)) * (lambda_0 + D/h^2 + A/(2h)).
///
/// The inequality is evaluated verbatim as a diagnostic; the solver runs
/// regardless of the verdict. When the right-hand side overflows, the
/// comparison switches to log space and `rhs` is reported as infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn stability_check(
    lambda0: f64,
    lambda1: f64,
    diffusion: f64,
    advection: f64,
    h: f64,
    m: usize,
) -> Result<StabilityReport> {
    if !(h > 0.0) || m < 3 {
        return Err(Error::Config(format!(
            "stability check needs h > 0 and M >= 3, got h={h}, M={m}"
        )));
    }
    let f1 = lambda0 + diffusion / (h * h) - advection / (2.0 * h);
    let f2 = lambda0 + diffusion / (h * h) + advection / (2.0 * h);
    let rhs = lambda0.powi(m as i32 - 3) * f1 * f2;
    let holds = if rhs.is_finite() {
        lambda1 <= rhs
    } else if lambda1 <= 0.0 {
        true
    } else if lambda0 > 0.0 && f1 > 0.0 && f2 > 0.0 {
        // log-space comparison of two positive quantities
        lambda1.ln() <= (m as f64 - 3.0) * lambda0.ln() + f1.ln() + f2.ln()
    } else {
        lambda1 <= rhs
    };
    Ok(StabilityReport { holds, lhs: lambda1, rhs })
}

/// Which level of the temporal truncation-error bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationCase {
    /// first step: linear interpolation, order tau^(2-alpha)
    NEq1,
    /// second step: quadratic interpolation, order tau^(3-alpha)
    NEq2,
    /// later steps: cubic interpolation, order tau^(4-alpha)
    NGe3,
}

/// Inputs of the truncation bound. `lipschitz` is the Lipschitz constant L of
/// the scale on [0, T]; `maxg2..maxg4` are sup norms of derivatives of
/// g = omega*U; `t_n`, `t_2` enter only the history-tail terms.
#[derive(Debug, Clone, Copy)]
pub struct TruncationInputs {
    pub alpha: f64,
    pub tau: f64,
    pub lipschitz: f64,
    pub maxg2: f64,
    pub maxg3: f64,
    pub maxg4: f64,
    pub omega_n: f64,
    pub t_n: f64,
    pub t_2: f64,
}

/// Evaluate the displayed truncation-error bound for one time level.
pub fn truncation_bound(case: TruncationCase, inp: &TruncationInputs) -> Result<f64> {
    let a = inp.alpha;
    if !(a > 0.0 && a < 1.0) || !(inp.tau > 0.0) || !(inp.lipschitz > 0.0) {
        return Err(Error::Config(format!(
            "truncation bound needs alpha in (0,1), tau > 0, L > 0; got alpha={a}, tau={}, L={}",
            inp.tau, inp.lipschitz
        )));
    }
    let prefactor = a / (inp.omega_n * gamma(1.0 - a)?);
    let l = inp.lipschitz;
    let tau = inp.tau;
    let bound = match case {
        TruncationCase::NEq1 => {
            let bracket = 1.0 / (8.0 * a) + 1.0 / (2.0 * (1.0 - a) * (2.0 - a));
            bracket * inp.maxg2 * l.powf(2.0 - a) * tau.powf(2.0 - a)
        }
        TruncationCase::NEq2 => {
            let t1 = tau;
            let t2 = 2.0 * tau;
            let tail = inp.maxg2 / 12.0 * (t2 - t1).powf(-a - 1.0) * l.powf(2.0 - a) * tau.powi(3);
            let bracket =
                1.0 / 12.0 + 1.0 / (3.0 * (1.0 - a) * (2.0 - a)) * (0.5 + 1.0 / (3.0 - a));
            tail + bracket * inp.maxg3 * l.powf(3.0 - a) * tau.powf(3.0 - a)
        }
        TruncationCase::NGe3 => {
            if !(inp.t_n > inp.t_2) {
                return Err(Error::Config(format!(
                    "case n >= 3 needs t_n > t_2, got t_n={}, t_2={}",
                    inp.t_n, inp.t_2
                )));
            }
            let tail =
                inp.maxg3 / 72.0 * (inp.t_n - inp.t_2).powf(-a - 1.0) * l.powf(3.0 - a) * tau.powi(4);
            let bracket = 3.0 / (128.0 * a)
                + 1.0 / (12.0 * (1.0 - a) * (2.0 - a))
                    * (1.0 + 3.0 / (3.0 - a) + 3.0 / ((3.0 - a) * (4.0 - a)));
            tail + bracket * inp.maxg4 * l.powf(4.0 - a) * tau.powf(4.0 - a)
        }
    };
    Ok(prefactor * bound)
}

/// Which grid axis a refinement study refines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyAxis {
    Time,
    Space,
}

/// One resolution of a refinement study.
#[derive(Debug, Clone)]
pub struct StudyRow {
    pub resolution: usize,
    pub e_inf: f64,
    pub e_2: f64,
    /// log2 error ratio against the previous row; absent on the first row,
    /// on non-doubling resolutions, and when an error vanishes
    pub rate: Option<f64>,
    /// wall-clock seconds for this row; excluded from determinism guarantees
    pub seconds: f64,
    /// solver failure message; errors are NaN in failed rows
    pub failed: Option<String>,
}

/// A refinement study: one solve per resolution, rates between consecutive
/// doublings.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub axis: StudyAxis,
    pub fixed_resolution: usize,
    pub alpha: f64,
    pub rows: Vec<StudyRow>,
}

impl ConvergenceReport {
    /// True when every row solved.
    pub fn complete(&self) -> bool {
        self.rows.iter().all(|r| r.failed.is_none())
    }

    /// CSV with header `resolution,E_inf,E_2,rate,seconds`; floats carry 17
    /// significant digits, absent rates are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("resolution,E_inf,E_2,rate,seconds\n");
        for row in &self.rows {
            let rate = row.rate.map(|r| format!("{r:.16e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{:.16e},{:.16e},{},{:.16e}",
                row.resolution, row.e_inf, row.e_2, rate, row.seconds
            )
            .expect("string write");
        }
        out
    }
}

/// Run `solve` at every resolution and assemble errors and rates.
/// `solve` returns (E_inf, E_2) for one resolution; row failures are recorded
/// and the partial report is still returned.
pub fn run_refinement_study(
    solve: impl Fn(usize) -> Result<(f64, f64)>,
    axis: StudyAxis,
    resolutions: &[usize],
    fixed_resolution: usize,
    alpha: f64,
) -> Result<ConvergenceReport> {
    if resolutions.is_empty() {
        return Err(Error::Config("refinement study needs at least one resolution".into()));
    }
    let mut rows: Vec<StudyRow> = Vec::with_capacity(resolutions.len());
    for &res in resolutions {
        let start = Instant::now();
        let outcome = solve(res);
        let seconds = start.elapsed().as_secs_f64();
        let row = match outcome {
            Ok((e_inf, e_2)) => {
                let rate = rows.last().and_then(|prev: &StudyRow| {
                    if prev.failed.is_none() && res == 2 * prev.resolution {
                        observed_rate(prev.e_inf, e_inf).ok()
                    } else {
                        None
                    }
                });
                StudyRow { resolution: res, e_inf, e_2, rate, seconds, failed: None }
            }
            Err(e) => StudyRow {
                resolution: res,
                e_inf: f64::NAN,
                e_2: f64::NAN,
                rate: None,
                seconds,
                failed: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    Ok(ConvergenceReport { axis, fixed_resolution, alpha, rows })
}
