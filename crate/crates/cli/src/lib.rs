//! Config parsing and command execution for the `gcfd` binary.
//!
//! Every command reads a single config file (TOML, or a previously emitted
//! JSON manifest) and writes `<name>.csv` plus `<name>.manifest.json` into the
//! output directory. Re-running a manifest reproduces the CSV byte for byte,
//! timing fields aside.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gcfd::{
    builtin_problem, error_inf, error_l2, lambda_weights, recover_original,
    run_refinement_study, series_error_inf, stability_check, time_march, transform_problem,
    BuiltinProblem, DerivativeBenchmark, Error as CoreError, GridFunction1D, ScaleWeightPair,
    SpaceGrid, StudyAxis, TimeGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Derivative,
    Solve,
    Convergence,
    Weights,
    Stability,
}

impl Command {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "derivative" => Ok(Command::Derivative),
            "solve" => Ok(Command::Solve),
            "convergence" => Ok(Command::Convergence),
            "weights" => Ok(Command::Weights),
            "stability" => Ok(Command::Stability),
            other => Err(CliError::Config(format!("unknown command `{other}`"))),
        }
    }
}

/// Scale, weight, or sample-function descriptor as written in configs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FunctionDescriptor {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

impl FunctionDescriptor {
    pub fn to_function(&self) -> Result<GridFunction1D, CliError> {
        let bad = |msg: &str| Err(CliError::Config(format!("function `{}`: {msg}", self.kind)));
        let no_params = |s: &Self| s.p.is_none() && s.q.is_none() && s.sigma.is_none() && s.k.is_none();
        match self.kind.as_str() {
            "identity" => {
                if !no_params(self) {
                    return bad("takes no parameters");
                }
                Ok(GridFunction1D::Identity)
            }
            "one" => {
                if !no_params(self) {
                    return bad("takes no parameters");
                }
                Ok(GridFunction1D::constant_one())
            }
            "affine" => {
                if self.sigma.is_some() || self.k.is_some() {
                    return bad("takes only p and q");
                }
                let (Some(p), Some(q)) = (self.p, self.q) else {
                    return bad("needs p and q");
                };
                Ok(GridFunction1D::Affine { p, q })
            }
            "power" => {
                if self.p.is_some() || self.q.is_some() || self.k.is_some() {
                    return bad("takes only sigma");
                }
                let Some(sigma) = self.sigma else {
                    return bad("needs sigma");
                };
                Ok(GridFunction1D::Power { sigma })
            }
            "exponential" => {
                if self.p.is_some() || self.q.is_some() || self.sigma.is_some() {
                    return bad("takes only k");
                }
                let Some(k) = self.k else {
                    return bad("needs k");
                };
                Ok(GridFunction1D::Exponential { k })
            }
            other => Err(CliError::Config(format!("unknown function kind `{other}`"))),
        }
    }
}

/// One run: flat keys plus nested function-descriptor tables. Unknown keys are
/// rejected so table reproductions cannot silently drift on a typo.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// base name of the output files
    pub name: String,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<FunctionDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<FunctionDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space_cells: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolutions: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advection: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
}

/// Manifest written next to each CSV; feeding it back as the config re-runs
/// the identical command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub command: Command,
    pub config: RunConfig,
    pub csv: String,
}

#[derive(Debug)]
pub enum CliError {
    /// bad config or arguments: exit code 2
    Config(String),
    /// runtime numerical failure: exit code 3
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

/// Read a config from a TOML file or from a JSON manifest. A manifest carries
/// its own command; a TOML config relies on the command given on the CLI.
pub fn load_config(path: &Path) -> Result<(Option<Command>, RunConfig), CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok((Some(manifest.command), manifest.config))
    } else {
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok((None, config))
    }
}

fn require<T: Copy>(v: Option<T>, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(CliError::Config(format!("invalid output name `{}`", self.name)));
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0) {
                return Err(CliError::Config(format!("horizon must be positive, got {h}")));
            }
        }
        if let Some(l) = self.length {
            if !(l > 0.0) {
                return Err(CliError::Config(format!("length must be positive, got {l}")));
            }
        }
        if let Some(rs) = &self.resolutions {
            if rs.is_empty() {
                return Err(CliError::Config("resolution list is empty".into()));
            }
            for w in rs.windows(2) {
                if w[1] != 2 * w[0] {
                    return Err(CliError::Config(format!(
                        "resolutions must double at every step, got {} after {}",
                        w[1], w[0]
                    )));
                }
            }
        }
        Ok(())
    }

    fn scale_fn(&self) -> Result<GridFunction1D, CliError> {
        self.scale
            .as_ref()
            .map(|d| d.to_function())
            .unwrap_or(Ok(GridFunction1D::Identity))
    }

    fn weight_fn(&self) -> Result<GridFunction1D, CliError> {
        self.weight
            .as_ref()
            .map(|d| d.to_function())
            .unwrap_or(Ok(GridFunction1D::constant_one()))
    }

    fn forbid_pair_override(&self) -> Result<(), CliError> {
        if self.scale.is_some() || self.weight.is_some() {
            return Err(CliError::Config(
                "this problem fixes its own scale and weight; remove the [scale]/[weight] tables"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Execute one command and return the produced CSV text.
pub fn run_command(command: Command, config: &RunConfig) -> Result<String, CliError> {
    config.validate()?;
    match command {
        Command::Derivative => cmd_derivative(config),
        Command::Solve => cmd_solve(config),
        Command::Convergence => cmd_convergence(config),
        Command::Weights => cmd_weights(config),
        Command::Stability => cmd_stability(config),
    }
}

/// Execute a command and write `<name>.csv` and `<name>.manifest.json`.
/// Returns the paths written.
pub fn run_to_files(
    command: Command,
    config: &RunConfig,
    output_dir: &Path,
) -> Result<(PathBuf, PathBuf), CliError> {
    let csv = run_command(command, config)?;
    fs::create_dir_all(output_dir).map_err(|e| io_err(output_dir, e))?;
    let csv_name = format!("{}.csv", config.name);
    let csv_path = output_dir.join(&csv_name);
    fs::write(&csv_path, &csv).map_err(|e| io_err(&csv_path, e))?;
    let manifest = Manifest {
        command,
        config: config.clone(),
        csv: csv_name,
    };
    let manifest_path = output_dir.join(format!("{}.manifest.json", config.name));
    let body = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Numerical(format!("manifest serialization: {e}")))?;
    fs::write(&manifest_path, body).map_err(|e| io_err(&manifest_path, e))?;
    Ok((csv_path, manifest_path))
}

fn derivative_study(config: &RunConfig) -> Result<DerivativeBenchmark, CliError> {
    match config.problem.as_deref() {
        None | Some("ex51") => Ok(DerivativeBenchmark {
            name: "power",
            alpha: config.alpha,
            scale: config.scale_fn()?,
            weight: config.weight_fn()?,
        }),
        Some(other) => Err(CliError::Config(format!(
            "`{other}` is not a derivative study; use ex51 or omit `problem`"
        ))),
    }
}

fn cmd_derivative(config: &RunConfig) -> Result<String, CliError> {
    let n = require(config.time_steps, "time_steps")?;
    let horizon = config.horizon.unwrap_or(1.0);
    let grid = TimeGrid::new(horizon, n)?;
    let bench = derivative_study(config)?;
    let numeric = bench.numeric(&grid)?;
    let exact = bench.exact(&grid)?;
    let mut out = String::from("level,t,numeric,exact,abs_error\n");
    for lev in 1..=n {
        let (num, ex) = (numeric.at(lev), exact.at(lev));
        writeln!(
            out,
            "{lev},{},{},{},{}",
            fmt_f(grid.node(lev)),
            fmt_f(num),
            fmt_f(ex),
            fmt_f((num - ex).abs())
        )
        .expect("string write");
    }
    Ok(out)
}

fn pde_problem(config: &RunConfig) -> Result<gcfd::PdeBenchmark, CliError> {
    let name = config
        .problem
        .as_deref()
        .ok_or_else(|| CliError::Config("missing required key `problem`".into()))?;
    config.forbid_pair_override()?;
    match builtin_problem(name, config.alpha)? {
        BuiltinProblem::Pde(b) => Ok(b),
        BuiltinProblem::Derivative(_) => Err(CliError::Config(format!(
            "`{name}` is a derivative study, not a solvable problem"
        ))),
    }
}

fn solve_once(
    bench: &gcfd::PdeBenchmark,
    m: usize,
    n: usize,
) -> Result<(gcfd::SolutionField, f64, f64), CliError> {
    let space = SpaceGrid::new(bench.problem.domain_length, m)?;
    let time = TimeGrid::new(bench.problem.horizon, n)?;
    let transformed = transform_problem(&bench.problem, &space)?;
    let field = time_march(&transformed, &time)?;
    let recovered = recover_original(&field, &bench.problem)?;
    let e_inf = error_inf(&recovered, &bench.exact);
    let e_2 = error_l2(&recovered, &bench.exact);
    Ok((recovered, e_inf, e_2))
}

fn cmd_solve(config: &RunConfig) -> Result<String, CliError> {
    let m = require(config.space_cells, "space_cells")?;
    let n = require(config.time_steps, "time_steps")?;
    let bench = pde_problem(config)?;
    let (field, _, _) = solve_once(&bench, m, n)?;
    let t_final = field.time.node(n);
    let mut out = String::from("node,x,numeric,exact,abs_error\n");
    for i in 0..=m {
        let x = field.space.node(i);
        let num = field.at(i, n);
        let ex = (bench.exact)(x, t_final);
        writeln!(
            out,
            "{i},{},{},{},{}",
            fmt_f(x),
            fmt_f(num),
            fmt_f(ex),
            fmt_f((num - ex).abs())
        )
        .expect("string write");
    }
    Ok(out)
}

fn cmd_convergence(config: &RunConfig) -> Result<String, CliError> {
    let axis = match require(config.axis.as_deref(), "axis")? {
        "time" => StudyAxis::Time,
        "space" => StudyAxis::Space,
        other => {
            return Err(CliError::Config(format!(
                "axis must be `time` or `space`, got `{other}`"
            )))
        }
    };
    let resolutions = config
        .resolutions
        .clone()
        .ok_or_else(|| CliError::Config("missing required key `resolutions`".into()))?;

    let report = if config.problem.as_deref() == Some("ex51") || config.problem.is_none() {
        // derivative study: E_inf over levels, E_2 its level-weighted l2
        if axis != StudyAxis::Time {
            return Err(CliError::Config(
                "derivative studies refine the time axis only".into(),
            ));
        }
        let bench = derivative_study(config)?;
        let horizon = config.horizon.unwrap_or(1.0);
        run_refinement_study(
            |n| {
                let grid = TimeGrid::new(horizon, n)?;
                let numeric = bench.numeric(&grid)?;
                let exact = bench.exact(&grid)?;
                let e_inf = series_error_inf(&numeric, &exact);
                let sq: f64 = (1..=n)
                    .map(|l| (numeric.at(l) - exact.at(l)).powi(2))
                    .sum();
                Ok((e_inf, (grid.tau() * sq).sqrt()))
            },
            axis,
            &resolutions,
            0,
            config.alpha,
        )?
    } else {
        let fixed = require(config.fixed_resolution, "fixed_resolution")?;
        let bench = pde_problem(config)?;
        run_refinement_study(
            |res| {
                let (m, n) = match axis {
                    StudyAxis::Time => (fixed, res),
                    StudyAxis::Space => (res, fixed),
                };
                let (_, e_inf, e_2) = solve_once(&bench, m, n)
                    .map_err(|e| CoreError::Config(e.to_string()))?;
                Ok((e_inf, e_2))
            },
            axis,
            &resolutions,
            fixed,
            config.alpha,
        )?
    };
    if !report.complete() {
        let failed: Vec<&str> = report
            .rows
            .iter()
            .filter_map(|r| r.failed.as_deref())
            .collect();
        return Err(CliError::Numerical(format!(
            "{} study row(s) failed: {}",
            failed.len(),
            failed.join("; ")
        )));
    }
    Ok(report.to_csv())
}

fn cmd_weights(config: &RunConfig) -> Result<String, CliError> {
    let n = require(config.time_steps, "time_steps")?;
    let level = config.level.unwrap_or(n);
    if level == 0 || level > n {
        return Err(CliError::Config(format!(
            "level must lie in 1..=time_steps, got {level} with time_steps={n}"
        )));
    }
    let horizon = config.horizon.unwrap_or(1.0);
    let grid = TimeGrid::new(horizon, n)?;
    let pair = ScaleWeightPair::on_grid(config.scale_fn()?, config.weight_fn()?, &grid)?;
    let w = lambda_weights(level, &pair, &grid, config.alpha)?;
    let mut out = String::from("n,l,lambda\n");
    for (l, lam) in w.lambda.iter().enumerate() {
        writeln!(out, "{level},{l},{}", fmt_f(*lam)).expect("string write");
    }
    Ok(out)
}

fn cmd_stability(config: &RunConfig) -> Result<String, CliError> {
    let m = require(config.space_cells, "space_cells")?;
    let length = config.length.unwrap_or(1.0);
    let h = length / m as f64;
    let diffusion = config.diffusion.unwrap_or(1.0);
    let advection = config.advection.unwrap_or(1.0);
    let (lambda0, lambda1) = match (config.lambda0, config.lambda1) {
        (Some(l0), Some(l1)) => (l0, l1),
        (None, None) => {
            // compute the weights of the unity-weight marching operator
            let n = require(config.time_steps, "time_steps")?;
            let level = config.level.unwrap_or(n);
            if level == 0 || level > n {
                return Err(CliError::Config(format!(
                    "level must lie in 1..=time_steps, got {level} with time_steps={n}"
                )));
            }
            let horizon = config.horizon.unwrap_or(1.0);
            let grid = TimeGrid::new(horizon, n)?;
            let pair = ScaleWeightPair::on_grid(
                config.scale_fn()?,
                GridFunction1D::constant_one(),
                &grid,
            )?;
            let w = lambda_weights(level, &pair, &grid, config.alpha)?;
            (w.lambda[0], w.lambda[1])
        }
        _ => {
            return Err(CliError::Config(
                "lambda0 and lambda1 must be given together or both omitted".into(),
            ))
        }
    };
    let report = stability_check(lambda0, lambda1, diffusion, advection, h, m)?;
    let mut out = String::from("lambda0,lambda1,rhs,holds\n");
    writeln!(
        out,
        "{},{},{},{}",
        fmt_f(lambda0),
        fmt_f(lambda1),
        fmt_f(report.rhs),
        report.holds
    )
    .expect("string write");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> RunConfig {
        toml::from_str(
            r#"
            name = "t"
            alpha = 0.5
            "#,
        )
        .unwrap()
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<RunConfig>(
            r#"
            name = "t"
            alpha = 0.5
            tme_steps = 8
            "#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("tme_steps"));
    }

    #[test]
    fn unknown_descriptor_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>(
            r#"
            name = "t"
            alpha = 0.5
            [weight]
            kind = "exponential"
            rate = 2.0
            "#,
        )
        .is_err());
    }

    #[test]
    fn alpha_bounds_are_enforced() {
        for alpha in [0.0, 1.0, -0.5, 1.5] {
            let mut c = base_config();
            c.alpha = alpha;
            assert!(matches!(c.validate(), Err(CliError::Config(_))), "alpha={alpha}");
        }
    }

    #[test]
    fn resolutions_must_double() {
        let mut c = base_config();
        c.resolutions = Some(vec![8, 16, 24]);
        assert!(c.validate().is_err());
        c.resolutions = Some(vec![8, 16, 32]);
        assert!(c.validate().is_ok());
        c.resolutions = Some(vec![]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn descriptor_parameter_mismatches_are_rejected() {
        let cases = [
            r#"kind = "identity"
               p = 1.0"#,
            r#"kind = "affine"
               p = 1.0"#,
            r#"kind = "power"
               k = 1.0"#,
            r#"kind = "exponential""#,
            r#"kind = "cubic""#,
        ];
        for case in cases {
            let d: FunctionDescriptor = toml::from_str(case).unwrap();
            assert!(d.to_function().is_err(), "accepted: {case}");
        }
    }

    #[test]
    fn weights_command_emits_first_level_row() {
        let mut c = base_config();
        c.time_steps = Some(1);
        c.level = Some(1);
        let csv = run_command(Command::Weights, &c).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,l,lambda");
        // 2 / sqrt(pi), up to a few ulps of the gamma evaluation
        let l0: f64 = lines[1].strip_prefix("1,0,").unwrap().parse().unwrap();
        let l1: f64 = lines[2].strip_prefix("1,1,").unwrap().parse().unwrap();
        assert!((l0 - 1.1283791670955126).abs() <= 1e-14, "{l0}");
        assert_eq!(l1, -l0);
    }

    #[test]
    fn stability_command_arithmetic_case() {
        let mut c = base_config();
        c.space_cells = Some(4);
        c.length = Some(2.0);
        c.lambda0 = Some(2.0);
        c.lambda1 = Some(8.0);
        let csv = run_command(Command::Stability, &c).unwrap();
        // h = 0.5: rhs = 2^1 * (2 + 4 - 1) * (2 + 4 + 1) = 70 >= 8
        let row = csv.lines().nth(1).unwrap();
        assert!(row.ends_with(",true"), "{row}");
        assert!(row.contains(&fmt_f(70.0)), "{row}");
    }

    #[test]
    fn solve_command_reports_boundary_exactly() {
        let mut c = base_config();
        c.problem = Some("ex52".into());
        c.space_cells = Some(16);
        c.time_steps = Some(8);
        let csv = run_command(Command::Solve, &c).unwrap();
        let last = csv.lines().last().unwrap();
        let fields: Vec<&str> = last.split(',').collect();
        assert_eq!(fields[0], "16");
        // right boundary at final time: e * 1^(6 + alpha)
        let num: f64 = fields[2].parse().unwrap();
        assert!((num - std::f64::consts::E).abs() <= 1e-12);
        let err: f64 = fields[4].parse().unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn convergence_command_runs_a_derivative_study() {
        let mut c = base_config();
        c.axis = Some("time".into());
        c.resolutions = Some(vec![10, 20]);
        c.weight = Some(FunctionDescriptor {
            kind: "exponential".into(),
            p: None,
            q: None,
            sigma: None,
            k: Some(1.0),
        });
        c.alpha = 0.8;
        let csv = run_command(Command::Convergence, &c).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "resolution,E_inf,E_2,rate,seconds");
        let row: Vec<&str> = lines[2].split(',').collect();
        let rate: f64 = row[3].parse().unwrap();
        // coarse-grid rate for the (4 - alpha)-order operator at alpha = 0.8
        assert!(rate > 2.5 && rate < 3.6, "rate {rate}");
    }

    #[test]
    fn pair_override_on_pde_problem_is_rejected() {
        let mut c = base_config();
        c.problem = Some("ex54".into());
        c.space_cells = Some(8);
        c.time_steps = Some(4);
        c.scale = Some(FunctionDescriptor {
            kind: "identity".into(),
            p: None,
            q: None,
            sigma: None,
            k: None,
        });
        assert!(matches!(run_command(Command::Solve, &c), Err(CliError::Config(_))));
    }

    #[test]
    fn manifest_round_trip_reproduces_csv() {
        let mut c = base_config();
        c.name = "roundtrip".into();
        c.problem = Some("ex54".into());
        c.axis = Some("space".into());
        c.resolutions = Some(vec![4, 8]);
        c.fixed_resolution = Some(16);
        let dir = std::env::temp_dir().join(format!("gcfd-cli-test-{}", std::process::id()));
        let (csv_path, manifest_path) = run_to_files(Command::Convergence, &c, &dir).unwrap();
        let first = fs::read_to_string(&csv_path).unwrap();

        let (cmd, reloaded) = load_config(&manifest_path).unwrap();
        assert_eq!(cmd, Some(Command::Convergence));
        assert_eq!(reloaded, c);
        let second = run_command(cmd.unwrap(), &reloaded).unwrap();
        // identical apart from the wall-clock column
        let strip = |text: &str| -> Vec<String> {
            text.lines()
                .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap())
                .collect()
        };
        assert_eq!(strip(&first), strip(&second));
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn missing_required_keys_name_the_key() {
        let c = base_config();
        match run_command(Command::Derivative, &c) {
            Err(CliError::Config(msg)) => assert!(msg.contains("time_steps"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
