//! Implicit finite-difference solver for the generalized fractional
//! advection-diffusion equation.
//!
//! The weighted problem is first transformed to a unity-weight problem with a
//! zero initial condition, discretized with central differences in space and
//! the high-order derivative weights in time, and marched level by level
//! through a strictly diagonally dominant tridiagonal solve. The original
//! variable is recovered by inverting the weight substitution.

use crate::error::{Error, Result};
use crate::functions::{GridFunction1D, ScaleWeightPair, SpaceGrid, TimeGrid};
use crate::weights::{LambdaBuilder, LambdaWeights};

pub type SpaceFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type TimeFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Full problem data for
/// D^alpha U = D U_xx - A U_x + g on (0, a) x (0, T]
/// with U(x,0) = U0(x), U(0,t) = rho1(t), U(a,t) = rho2(t).
pub struct AdvectionDiffusionProblem {
    pub alpha: f64,
    /// diffusivity D > 0
    pub diffusion: f64,
    /// advection constant A >= 0
    pub advection: f64,
    pub scale: GridFunction1D,
    pub weight: GridFunction1D,
    pub source: SpaceTimeFn,
    pub initial: SpaceFn,
    /// analytic U0' if available; otherwise a grid finite-difference fallback
    pub initial_dx: Option<SpaceFn>,
    /// analytic U0'' if available
    pub initial_dxx: Option<SpaceFn>,
    pub left: TimeFn,
    pub right: TimeFn,
    pub domain_length: f64,
    pub horizon: f64,
    /// permit the O(h^2) finite-difference fallback for U0', U0''
    pub allow_fd_initial_derivatives: bool,
}

/// Unity-weight form of the problem: zero initial condition, source f and
/// boundary data phi1, phi2 absorbed the weight.
pub struct TransformedProblem<'a> {
    problem: &'a AdvectionDiffusionProblem,
    space: SpaceGrid,
    omega0: f64,
    /// D*omega(0)*U0''(x_i) - A*omega(0)*U0'(x_i), per space node
    f_initial_part: Vec<f64>,
}

impl<'a> TransformedProblem<'a> {
    pub fn alpha(&self) -> f64 {
        self.problem.alpha
    }

    pub fn diffusion(&self) -> f64 {
        self.problem.diffusion
    }

    pub fn advection(&self) -> f64 {
        self.problem.advection
    }

    pub fn scale(&self) -> &GridFunction1D {
        &self.problem.scale
    }

    pub fn space(&self) -> &SpaceGrid {
        &self.space
    }

    fn omega(&self, t: f64) -> f64 {
        self.problem.weight.eval(t).expect("weight evaluable")
    }

    /// f(x_i, t) of the transformed equation.
    pub fn f_at(&self, i: usize, t: f64) -> f64 {
        let x = self.space.node(i);
        self.f_initial_part[i] + self.omega(t) * (self.problem.source)(x, t)
    }

    /// Left boundary phi1(t) = omega(t)rho1(t) - omega(0)rho1(0).
    pub fn phi1(&self, t: f64) -> f64 {
        self.omega(t) * (self.problem.left)(t) - self.omega0 * (self.problem.left)(0.0)
    }

    /// Right boundary phi2(t) = omega(t)rho2(t) - omega(0)rho2(0).
    pub fn phi2(&self, t: f64) -> f64 {
        self.omega(t) * (self.problem.right)(t) - self.omega0 * (self.problem.right)(0.0)
    }
}

/// Substitute u(x,t) = omega(t)U(x,t) - omega(0)U0(x) and collect the
/// resulting source and boundary data.
pub fn transform_problem<'a>(
    problem: &'a AdvectionDiffusionProblem,
    space: &SpaceGrid,
) -> Result<TransformedProblem<'a>> {
    let omega0 = problem
        .weight
        .eval(0.0)
        .map_err(|_| Error::Config("tabulated weights are not supported by the solver".into()))?;
    let rho1_0 = (problem.left)(0.0);
    let rho2_0 = (problem.right)(0.0);
    let u0_left = (problem.initial)(0.0);
    let u0_right = (problem.initial)(problem.domain_length);
    if (u0_left - rho1_0).abs() > 1e-10 * u0_left.abs().max(1.0)
        || (u0_right - rho2_0).abs() > 1e-10 * u0_right.abs().max(1.0)
    {
        return Err(Error::Config(format!(
            "initial/boundary data incompatible: U0(0)={u0_left} vs rho1(0)={rho1_0}, \
             U0(a)={u0_right} vs rho2(0)={rho2_0}"
        )));
    }

    let m = space.num_nodes();
    let u0: Vec<f64> = space.nodes().map(|x| (problem.initial)(x)).collect();
    let needs_derivatives = omega0 != 0.0 && u0.iter().any(|&v| v != 0.0);
    let f_initial_part = if !needs_derivatives {
        vec![0.0; m]
    } else {
        let dx: Vec<f64> = match &problem.initial_dx {
            Some(f) => space.nodes().map(|x| f(x)).collect(),
            None => {
                if !problem.allow_fd_initial_derivatives {
                    return Err(Error::Config(
                        "U0' required (non-constant weight or nonzero U0) and finite-difference \
                         fallback disabled"
                            .into(),
                    ));
                }
                fd_first_derivative(&u0, space.h())
            }
        };
        let dxx: Vec<f64> = match &problem.initial_dxx {
            Some(f) => space.nodes().map(|x| f(x)).collect(),
            None => {
                if !problem.allow_fd_initial_derivatives {
                    return Err(Error::Config(
                        "U0'' required (non-constant weight or nonzero U0) and finite-difference \
                         fallback disabled"
                            .into(),
                    ));
                }
                fd_second_derivative(&u0, space.h())
            }
        };
        (0..m)
            .map(|i| {
                problem.diffusion * omega0 * dxx[i] - problem.advection * omega0 * dx[i]
            })
            .collect()
    };

    Ok(TransformedProblem {
        problem,
        space: space.clone(),
        omega0,
        f_initial_part,
    })
}

/// Second-order first derivative on a uniform grid, one-sided at the ends.
fn fd_first_derivative(u: &[f64], h: f64) -> Vec<f64> {
    let m = u.len();
    let mut d = vec![0.0; m];
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    for i in 1..m - 1 {
        d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    }
    d[m - 1] = (3.0 * u[m - 1] - 4.0 * u[m - 2] + u[m - 3]) / (2.0 * h);
    d
}

/// Second-order second derivative on a uniform grid, one-sided at the ends.
fn fd_second_derivative(u: &[f64], h: f64) -> Vec<f64> {
    let m = u.len();
    let h2 = h * h;
    let mut d = vec![0.0; m];
    d[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h2;
    for i in 1..m - 1 {
        d[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
    }
    d[m - 1] = (2.0 * u[m - 1] - 5.0 * u[m - 2] + 4.0 * u[m - 3] - u[m - 4]) / h2;
    d
}

/// Tridiagonal system for the M-1 interior unknowns of one time level.
#[derive(Debug, Clone)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    /// Strict row-wise diagonal dominance; the first offending row otherwise.
    pub fn check_dominance(&self) -> Result<()> {
        let m = self.diag.len();
        for i in 0..m {
            let mut off = 0.0;
            if i > 0 {
                off += self.lower[i - 1].abs();
            }
            if i + 1 < m {
                off += self.upper[i].abs();
            }
            if self.diag[i].abs() <= off {
                return Err(Error::NotDiagonallyDominant(i));
            }
        }
        Ok(())
    }
}

/// 4-point grid of the solution in the marching variable, plus its grids.
#[derive(Debug, Clone)]
pub struct SolutionField {
    pub space: SpaceGrid,
    pub time: TimeGrid,
    /// column-major in time: values[n * (M+1) + i]
    values: Vec<f64>,
}

impl SolutionField {
    pub fn zeros(space: SpaceGrid, time: TimeGrid) -> Self {
        let len = space.num_nodes() * time.num_nodes();
        SolutionField {
            space,
            time,
            values: vec![0.0; len],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, n: usize) -> f64 {
        self.values[n * self.space.num_nodes() + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, n: usize, v: f64) {
        self.values[n * self.space.num_nodes() + i] = v;
    }

    pub fn column(&self, n: usize) -> &[f64] {
        let m = self.space.num_nodes();
        &self.values[n * m..(n + 1) * m]
    }
}

/// Assemble the tridiagonal system of time level n from the solution history.
///
/// The equation row is written exactly as the scheme's case display (the
/// negated PDE row): sub-diagonal D/h^2 + A/(2h), diagonal -(lambda_0 +
/// 2D/h^2), super-diagonal D/h^2 - A/(2h); the solve is unaffected by the
/// sign convention.
pub fn assemble_step(
    tp: &TransformedProblem,
    time: &TimeGrid,
    n: usize,
    history: &SolutionField,
    lambda: &LambdaWeights,
) -> Result<TridiagonalSystem> {
    let space = tp.space();
    let m = space.subintervals();
    if m < 3 {
        return Err(Error::DegenerateGrid(m));
    }
    debug_assert_eq!(lambda.n, n);
    let h = space.h();
    let sub = tp.diffusion() / (h * h) + tp.advection() / (2.0 * h);
    let sup = tp.diffusion() / (h * h) - tp.advection() / (2.0 * h);
    let diag_val = -(lambda.lambda[0] + 2.0 * tp.diffusion() / (h * h));

    let t_n = time.node(n);
    let mut rhs = vec![0.0; m - 1];
    for (i, r) in rhs.iter_mut().enumerate() {
        *r = -tp.f_at(i + 1, t_n);
    }
    // lambda_1 * u_{n-1} plus the deeper history sum
    for l in 0..n {
        let w = lambda.lambda[n - l];
        if w == 0.0 {
            continue;
        }
        let col = history.column(l);
        for (i, r) in rhs.iter_mut().enumerate() {
            *r += w * col[i + 1];
        }
    }
    // known boundary values move across
    rhs[0] -= sub * tp.phi1(t_n);
    rhs[m - 2] -= sup * tp.phi2(t_n);

    let sys = TridiagonalSystem {
        lower: vec![sub; m - 2],
        diag: vec![diag_val; m - 1],
        upper: vec![sup; m - 2],
        rhs,
    };
    sys.check_dominance()?;
    Ok(sys)
}

/// Thomas algorithm: pivot-free forward elimination and back substitution.
/// Refuses systems that are not strictly diagonally dominant.
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    sys.check_dominance()?;
    let m = sys.diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = if m > 1 { sys.upper[0] / sys.diag[0] } else { 0.0 };
    d[0] = sys.rhs[0] / sys.diag[0];
    for i in 1..m {
        let denom = sys.diag[i] - sys.lower[i - 1] * c[i - 1];
        if i + 1 < m {
            c[i] = sys.upper[i] / denom;
        }
        d[i] = (sys.rhs[i] - sys.lower[i - 1] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..m - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// March the transformed problem over the whole time grid. Column 0 is the
/// zero initial condition; boundary rows carry phi1, phi2 exactly.
pub fn time_march(tp: &TransformedProblem, time: &TimeGrid) -> Result<SolutionField> {
    let space = tp.space().clone();
    let m = space.subintervals();
    if m < 3 {
        return Err(Error::DegenerateGrid(m));
    }
    let unity_pair = ScaleWeightPair::on_grid(
        tp.scale().clone(),
        GridFunction1D::constant_one(),
        time,
    )?;
    let mut builder = LambdaBuilder::new(&unity_pair, time, tp.alpha());
    let mut field = SolutionField::zeros(space, time.clone());
    for n in 1..=time.subintervals() {
        let lambda = builder.lambda(n)?;
        let sys = assemble_step(tp, time, n, &field, &lambda)?;
        let interior = thomas_solve(&sys)?;
        let t_n = time.node(n);
        field.set(0, n, tp.phi1(t_n));
        for (i, v) in interior.iter().enumerate() {
            field.set(i + 1, n, *v);
        }
        field.set(m, n, tp.phi2(t_n));
    }
    Ok(field)
}

/// Invert the weight substitution:
/// U(x_i, t_n) = (u(x_i, t_n) + omega(0)U0(x_i)) / omega(t_n) for n >= 1,
/// and U(x_i, t_0) = U0(x_i).
pub fn recover_original(
    u: &SolutionField,
    problem: &AdvectionDiffusionProblem,
) -> Result<SolutionField> {
    let omega0 = problem
        .weight
        .eval(0.0)
        .map_err(|_| Error::Config("tabulated weights are not supported by the solver".into()))?;
    let mut field = SolutionField::zeros(u.space.clone(), u.time.clone());
    let u0: Vec<f64> = u.space.nodes().map(|x| (problem.initial)(x)).collect();
    for (i, v) in u0.iter().enumerate() {
        field.set(i, 0, *v);
    }
    for n in 1..=u.time.subintervals() {
        let w = problem.weight.eval(u.time.node(n)).unwrap();
        if w == 0.0 {
            return Err(Error::DivisionDegeneracy(n));
        }
        for i in 0..u.space.num_nodes() {
            field.set(i, n, (u.at(i, n) + omega0 * u0[i]) / w);
        }
    }
    Ok(field)
}

/// Residual of the assembled equation row for the computed column n:
/// max_i |row(u_n)_i - rhs_i|. Zero (to roundoff) means the solver solved
/// exactly the documented stencil.
pub fn scheme_residual(
    tp: &TransformedProblem,
    time: &TimeGrid,
    n: usize,
    field: &SolutionField,
    lambda: &LambdaWeights,
) -> Result<f64> {
    let sys = assemble_step(tp, time, n, field, lambda)?;
    let m = sys.diag.len();
    let col = field.column(n);
    let mut worst: f64 = 0.0;
    for i in 0..m {
        let mut lhs = sys.diag[i] * col[i + 1];
        if i > 0 {
            lhs += sys.lower[i - 1] * col[i];
        } else {
            // boundary term was moved to the rhs during assembly
        }
        if i + 1 < m {
            lhs += sys.upper[i] * col[i + 2];
        }
        worst = worst.max((lhs - sys.rhs[i]).abs());
    }
    Ok(worst)
}
