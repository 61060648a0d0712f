//! One function per subcommand. Each returns an [`Outcome`]; writing files
//! and choosing the exit code is left to [`crate::cli::run`].

use clap::Args;
use hermitex::convolution::{default_lattice_radius, rate_from_residuals, residual_seminorm, MeshLadder, ResidualWeights};
use hermitex::spaces::{classify, gs_seminorm_estimate, DerivativeOptions, Grid, Verdict};
use hermitex::tensor::{fubini_check, tensor, TensorFactorization};
use hermitex::transforms::{bargmann, bargmann_identity_check, stft_direct, stft_tensor_route, PhaseGrid};
use hermitex::{Complex, Expansion, Warning};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::function_spec::{parse_spec, Input};
use crate::report::{num, Csv, Report};

#[derive(Debug)]
pub enum Status {
    Pass,
    Fail,
    /// The command produced a report but ended in a numerical error.
    Error(CliError),
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub csv: Option<Csv>,
    /// Set by commands whose primary output is an expansion file.
    pub expansion: Option<Expansion>,
    pub status: Status,
}

impl Outcome {
    fn new(report: Report, csv: Csv, pass: bool) -> Self {
        Self { report, csv: Some(csv), expansion: None, status: if pass { Status::Pass } else { Status::Fail } }
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::FiniteExpansion => "finite_expansion",
        Verdict::FunctionClass => "function_class",
        Verdict::DistributionClass => "distribution_class",
    }
}

fn default_nodes(degree: usize) -> usize {
    2 * degree + 16
}

fn warnings(report: &mut Report, list: &[Warning]) {
    let codes: Vec<&str> = list.iter().map(|w| w.code()).collect();
    report.verdict("warnings", if codes.is_empty() { "none".to_string() } else { codes.join(",") });
}

fn shell_csv(f: &Expansion) -> Csv {
    let mut csv = Csv::new(&["degree", "shell_max"]);
    for k in 0..=f.degree() {
        csv.push(vec![k.to_string(), num(f.shell_max(k))]);
    }
    csv
}

/// Parses `spec` and resolves it to an expansion of degree `degree`.
fn expansion_input(cfg: &ExperimentConfig, spec: &str, slot: u64, degree: usize) -> Result<Expansion, CliError> {
    let input = parse_spec(spec, cfg.seed, slot)?;
    let degree = input.native_degree().unwrap_or(degree);
    cfg.check_degree(degree)?;
    input.expansion(degree, cfg.quad_nodes_or(default_nodes(degree)))
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Function spec.
    pub function: String,
    /// Truncation degree N.
    #[arg(short = 'N', long, default_value_t = 40)]
    pub degree: usize,
}

impl AnalyzeArgs {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn describe(&self, cfg: &mut ExperimentConfig) {
        cfg.input(&self.function);
        cfg.param("degree", self.degree);
    }
}

/// Hermite coefficients up to degree N. CSV columns: `degree,shell_max`.
pub fn analyze(cfg: &ExperimentConfig, args: &AnalyzeArgs) -> Result<Outcome, CliError> {
    cfg.check_degree(args.degree)?;
    let n_quad = cfg.quad_nodes_or(default_nodes(args.degree));
    let f = parse_spec(&args.function, cfg.seed, 0)?.expansion(args.degree, n_quad)?;

    let mut report = Report::new();
    cfg.echo(&mut report);
    report.result("dim", f.dim());
    report.result("degree", f.degree());
    report.result("n_quad", n_quad);
    report.result("coefficients", f.coeffs().len());
    report.result_num("max_abs", f.max_abs());
    let odd_max = f.iter().filter(|(a, _)| a.order() % 2 == 1).map(|(_, c)| c.norm()).fold(0.0, f64::max);
    report.result_num("odd_max", odd_max);
    report.result_num("top_shell_max", f.shell_max(f.degree()));

    let class = classify(&f, f64::MIN_POSITIVE);
    report.fit("verdict", verdict_name(class.verdict));
    report.fit("best_order", class.best_order);
    report.fit_num("fitted_radius", class.fitted_radius);
    report.fit_num("residual", class.residual);

    let warns: Vec<Warning> = f.check_resolution(cfg.tol).into_iter().collect();
    warnings(&mut report, &warns);
    let csv = shell_csv(&f);
    Ok(Outcome { report, csv: Some(csv), expansion: Some(f), status: Status::Pass })
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// Function spec or expansion file.
    pub input: String,
    /// Degree used when the input has to be analyzed first.
    #[arg(short = 'N', long, default_value_t = 40)]
    pub degree: usize,
}

impl ClassifyArgs {
    /// Coefficient shells at or below this magnitude count as zero.
    pub const DEFAULT_TOL: f64 = 1e-300;

    pub fn describe(&self, cfg: &mut ExperimentConfig) {
        cfg.input(&self.input);
        cfg.param("degree", self.degree);
    }
}

/// Fits the coefficient decay. Fails when the decay is too weak to resolve.
/// CSV columns: `degree,shell_max,in_fit`.
pub fn classify_cmd(cfg: &ExperimentConfig, args: &ClassifyArgs) -> Result<Outcome, CliError> {
    let f = expansion_input(cfg, &args.input, 0, args.degree)?;
    let c = classify(&f, cfg.tol);

    let mut report = Report::new();
    cfg.echo(&mut report);
    report.result("dim", f.dim());
    report.result("degree", f.degree());
    report.result("fit_points", c.fit_degrees.len());
    report.fit("best_order", c.best_order);
    report.fit_num("fitted_radius", c.fitted_radius);
    report.fit_num("residual", c.residual);
    if let Some(side) = c.side() {
        report.fit("side", format!("{side:?}").to_lowercase());
    }
    report.fit("annotation", c.annotation);
    report.verdict("class", verdict_name(c.verdict));
    report.verdict("insufficient_decay", c.insufficient_decay);

    let mut csv = Csv::new(&["degree", "shell_max", "in_fit"]);
    for (k, m) in c.degree_maxima.iter().enumerate() {
        csv.push(vec![k.to_string(), num(*m), c.fit_degrees.contains(&k).to_string()]);
    }
    Ok(Outcome::new(report, csv, !c.insufficient_decay))
}

#[derive(Debug, Clone, Args)]
pub struct TensorArgs {
    pub left: String,
    pub right: String,
    /// Degree used for inputs that have to be analyzed.
    #[arg(short = 'N', long, default_value_t = 16)]
    pub degree: usize,
}

impl TensorArgs {
    pub const DEFAULT_TOL: f64 = 1e-12;

    pub fn describe(&self, cfg: &mut ExperimentConfig) {
        cfg.input(&self.left);
        cfg.input(&self.right);
        cfg.param("degree", self.degree);
    }
}

/// f₁ ⊗ f₂ as an expansion file. CSV columns: `degree,shell_max`.
pub fn tensor_cmd(cfg: &ExperimentConfig, args: &TensorArgs) -> Result<Outcome, CliError> {
    let f1 = expansion_input(cfg, &args.left, 0, args.degree)?;
    let f2 = expansion_input(cfg, &args.right, 1, args.degree)?;
    cfg.check_degree(f1.degree() + f2.degree())?;
    let product = tensor(&f1, &f2)?;
    let defect = TensorFactorization { factors: vec![f1.clone(), f2.clone()], product: product.clone() }.defect();

    let mut report = Report::new();
    cfg.echo(&mut report);
    report.result("block_dims", format!("{},{}", f1.dim(), f2.dim()));
    report.result("dim", product.dim());
    report.result("degree", product.degree());
    report.result("coefficients", product.coeffs().len());
    report.result_num("factorization_defect", defect);
    report.verdict("criterion", "factorization_defect <= tol");
    let csv = shell_csv(&product);
    let status = if defect <= cfg.tol { Status::Pass } else { Status::Fail };
    Ok(Outcome { report, csv: Some(csv), expansion: Some(product), status })
}

#[derive(Debug, Clone, Args)]
pub struct FubiniArgs {
    pub f1: String,
    pub f2: String,
    /// Test function on the product space.
    pub phi: String,
    #[arg(short = 'N', long, default_value_t = 12)]
    pub degree: usize,
}

impl FubiniArgs {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn describe(&self, cfg: &mut ExperimentConfig) {
        cfg.input(&self.f1);
        cfg.input(&self.f2);
        cfg.input(&self.phi);
        cfg.param("degree", self.degree);
    }
}

/// ⟨f₁⊗f₂, φ⟩ three ways. CSV columns: `route,re,im`.
pub fn fubini(cfg: &ExperimentConfig, args: &FubiniArgs) -> Result<Outcome, CliError> {
    let f1 = expansion_input(cfg, &args.f1, 0, args.degree)?;
    let f2 = expansion_input(cfg, &args.f2, 1, args.degree)?;
    let phi = expansion_input(cfg, &args.phi, 2, args.degree)?;
    let check = fubini_check(&f1, &f2, &phi)?;
    let residuals = check.residuals();

    let mut report = Report::new();
    cfg.echo(&mut report);
    report.result_num("direct.re", check.direct.re);
    report.result_num("direct.im", check.direct.im);
    for (name, r) in ["direct_vs_first", "direct_vs_second", "first_vs_second"].iter().zip(residuals) {
        report.result_num(&format!("residual.{name}"), r);
    }
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    report.result_num("max_residual", worst);
    report.verdict("criterion", "max_residual < tol");

    let mut csv = Csv::new(&["route", "re", "im"]);
    for (name, v) in [("direct", check.direct), ("via_first", check.via_first), ("via_second", check.via_second)] {
        csv.push(vec![name.into(), num(v.re), num(v.im)]);
    }
    Ok(Outcome::new(report, csv, worst < cfg.tol))
}

#[derive(Debug, Clone, Args)]
pub struct StftArgs {
    pub function: String,
    pub window: String,
    /// Points per phase-space axis.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    /// The grid covers [−extent, extent]².
    #[arg(long, default_value_t = 4.0)]
    pub extent: f64,
    /// Degree used when the window has to be analyzed.
    #[arg(short = 'N', long, default_value_t = 24)]
    pub degree: usize,
}

impl StftArgs {
    pub const DEFAULT_TOL: f64 = 1e-7;
    pub const DEFAULT_NODES: usize = 64;

    pub fn describe(&self, cfg: &mut ExperimentConfig) {
        cfg.input(&self.function);
        cfg.input(&self.window);
        cfg.param("grid", self.grid);
        cfg.param("extent", num(self.extent));
        cfg.param("degree", self.degree);
    }
}

/// Direct STFT against the tensor route.
/// CSV columns: `x,xi,direct_re,direct_im,route_re,route_im`.
pub fn stft_check(cfg: &ExperimentConfig, args: &StftArgs) -> Result<Outcome, CliError> {
    let f = parse_spec(&args.function, cfg.seed, 0)?.sampled();
    let window = expansion_input(cfg, &args.window, 1, args.degree)?;
    let e = args.extent;
    let grid = PhaseGrid::uniform(-e, e, args.grid, -e, e, args.grid)?;
    let n_quad = cfg.quad_nodes_or(StftArgs::DEFAULT_NODES);
    let direct = stft_direct(&f, &window, &grid, n_quad)?;
    let route = stft_tensor_route(&f, &window, &grid, n_quad)?;
    let deviation = direct.max_deviation(&route)?;

    let mut report = Report::new();
    cfg.echo(&mut report);
    report.result("n_quad", n_quad);
    report.result("points", grid.values().len());
    report.result_num("max_abs", direct.values().iter().map(|v| v.norm()).fold(0.0, f64::max));
    report.result_num("max_deviation", deviation);
    report.verdict("criterion", "max_deviation < tol");

    let mut csv = Csv::new(&["x", "xi", "direct_re", "direct_im", "route_re", "route_im"]);
    for (ix, &x) in grid.x_axis().iter().enumerate() {
        for (ik, &xi) in grid.xi_axis().iter().enumerate() {
            let (a, b) = (direct.get(ix, ik), route.get(ix, ik));
            csv.push(vec![num(x), num(xi), num(a.re), num(a.im), num(b.re), num(b.im)]);
        }
    }
    Ok(Outcome::new(report, csv, deviation < cfg.tol))
}

#[derive(Debug, Clone, Args)]
pub struct BargmannArgs {
    pub function: String,
    /// Translation x₀, comma separated, one entry per dimension.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
    pub x0: Vec<f64>,
    /// Modulation ξ₀, comma separated, one entry per dimension.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
    pub xi0: Vec<f64>,
    /// Largest |z| sampled.
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    /// Points per axis of the square z grid.
    #[arg(long, default_value_t = 5)]
    pub points: usize,
}

impl BargmannArgs {
    pub const DEFAULT_TOL: f64 = 1e-8;
    pub const DEFAULT_NODES: usize = 96;

    pub fn describe(&self, cfg: &mut ExperimentConfig) {
        cfg.input(&self.function);
        let join = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",");
        cfg.param("x0", join(&self.x0));
        cfg.param("xi0", join(&self.xi0));
        cfg.param("radius", num(self.radius));
        cfg.param("points", self.points);
    }

    /// Square grid in the complex plane, placed on the diagonal of ℂ^d and
    /// scaled so that |z| ≤ radius.
    pub fn z_points(&self, dim: usize) -> Vec<Vec<Complex<f64>>> {
        let half = self.radius / std::f64::consts::SQRT_2;
        let n = self.points;
        let axis: Vec<f64> = (0..n)
            .map(|i| if n == 1 { 0.0 } else { -half + 2.0 * half * i as f64 / (n - 1) as f64 })
            .collect();
        let scale = 1.0 / (dim as f64).sqrt();
        let mut out = Vec::with_capacity(n * n);
        for &a in &axis {
            for &b in &axis {
                out.push(vec![Complex::new(a, b) * scale; dim]);
            }
        }
        out
    }
}

/// Translation and modulation identities of the Bargmann transform.
/// CSV columns: `z_re,z_im,abs_vf` (z given by its first coordinate).
pub fn bargmann_check(cfg: &ExperimentConfig, args: &BargmannArgs) -> Result<Outcome, CliError> {
    if !(args.radius >= 0.0 && args.radius.is_finite()) || args.points == 0 {
        return Err(CliError::Usage("--radius must be finite and non-negative, --points positive".into()));
    }
    let f = parse_spec(&args.function, cfg.seed, 0)?.sampled();
    let z = args.z_points(f.dim());
    let n_quad = cfg.quad_nodes_or(BargmannArgs::DEFAULT_NODES);
    let errors = bargmann_identity_check(&f, &args.x0, &args.xi0, &z, n_quad)?;
    let samples = bargmann(&f, &z, n_quad)?;

    let mut report = Report::new();
    cfg.echo(&mut report);
    report.result("n_quad", n_quad);
    report.result("points", z.len());
    report.result_num("translation_error", errors.translation);
    report.result_num("modulation_error", errors.modulation);
    report.verdict("criterion", "translation_error < tol and modulation_error < tol");

    let mut csv = Csv::new(&["z_re", "z_im", "abs_vf"]);
    for (zp, v) in samples.z_points().iter().zip(samples.values()) {
        csv.push(vec![num(zp[0].re), num(zp[0].im), num(v.norm())]);
    }
    let pass = errors.translation < cfg.tol && errors.modulation < cfg.tol;
    Ok(Outcome::new(report, csv, pass))
}

#[derive(Debug, Clone, Args)]
pub struct ConvArgs {
    pub phi: String,
    pub psi: String,
    /// Decreasing mesh sizes ε.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    pub ladder: Vec<f64>,
    /// Lattice cut-off |εk| ≤ radius; defaults to the library choice.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Residuals are sampled on [−extent, extent]^d.
    #[arg(long, default_value_t = 3.0)]
    pub extent: f64,
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
}

impl ConvArgs {
    /// Half-width of the accepted slope window around 1.
    pub const DEFAULT_TOL: f64 = 0.1;
    pub const MAX_RATIO: f64 = 3.0;

    pub fn describe(&self, cfg: &mut ExperimentConfig) {
        cfg.input(&self.phi);
        cfg.input(&self.psi);
        cfg.param("ladder", self.ladder.iter().map(|e| num(*e)).collect::<Vec<_>>().join(","));
        if let Some(r) = self.radius {
            cfg.param("radius", num(r));
        }
        cfg.param("extent", num(self.extent));
        cfg.param("step", num(self.step));
    }
}

/// First-order convergence of Riemann-sum convolutions.
/// CSV columns: `eps,residual,used`.
pub fn conv_rate(cfg: &ExperimentConfig, args: &ConvArgs) -> Result<Outcome, CliError> {
    let phi = parse_spec(&args.phi, cfg.seed, 0)?.sampled();
    let psi = parse_spec(&args.psi, cfg.seed, 1)?.sampled();
    let radius = args.radius.unwrap_or_else(|| default_lattice_radius(16));
    let ladder = MeshLadder::new(args.ladder.clone(), radius)?;
    if ladder.epsilons().len() < 4 {
        return Err(hermitex::Error::InvalidInput(format!("need at least 4 mesh sizes, got {}", ladder.epsilons().len())).into());
    }
    let weights = ResidualWeights::plain(Grid::new(args.extent, args.step)?);
    let residuals: Vec<f64> = ladder
        .epsilons()
        .iter()
        .map(|&e| residual_seminorm(&phi, &psi, e, radius, &weights))
        .collect::<Result<_, _>>()?;

    let mut report = Report::new();
    cfg.echo(&mut report);
    report.result_num("lattice_radius", radius);
    for (e, r) in ladder.epsilons().iter().zip(&residuals) {
        report.result_num(&format!("residual[{}]", num(*e)), *r);
    }
    report.verdict("criterion", "|slope - 1| <= tol and ratio < 3");

    let mut csv = Csv::new(&["eps", "residual", "used"]);
    let fit = rate_from_residuals(ladder.epsilons(), residuals.clone());
    let used = match &fit {
        Ok(rep) => rep.used.clone(),
        Err(_) => vec![false; residuals.len()],
    };
    for ((e, r), u) in ladder.epsilons().iter().zip(&residuals).zip(&used) {
        csv.push(vec![num(*e), num(*r), u.to_string()]);
    }
    match fit {
        Ok(rep) => {
            report.fit_num("slope", rep.slope);
            report.fit_num("constant", rep.constant);
            report.fit_num("ratio", rep.ratio);
            report.fit_num("noise_floor", rep.noise_floor);
            let pass = (rep.slope - 1.0).abs() <= cfg.tol && rep.ratio < ConvArgs::MAX_RATIO;
            Ok(Outcome::new(report, csv, pass))
        }
        Err(e) => Ok(Outcome { report, csv: Some(csv), expansion: None, status: Status::Error(e.into()) }),
    }
}

#[derive(Debug, Clone, Args)]
pub struct SeminormArgs {
    pub function: String,
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[arg(long, default_value_t = 2.0)]
    pub h: f64,
    #[arg(long, default_value_t = 4)]
    pub alpha_max: usize,
    #[arg(long, default_value_t = 4)]
    pub beta_max: usize,
    /// Grid half-width; defaults to a degree-dependent choice.
    #[arg(long)]
    pub extent: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Degree of the expansion used for derivatives.
    #[arg(short = 'N', long, default_value_t = 48)]
    pub degree: usize,
}

impl SeminormArgs {
    /// Resolution threshold for the derivative expansion.
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn describe(&self, cfg: &mut ExperimentConfig) {
        cfg.input(&self.function);
        cfg.param("s", num(self.s));
        cfg.param("sigma", num(self.sigma));
        cfg.param("h", num(self.h));
        cfg.param("alpha_max", self.alpha_max);
        cfg.param("beta_max", self.beta_max);
        if let Some(e) = self.extent {
            cfg.param("extent", num(e));
        }
        if let Some(s) = self.step {
            cfg.param("step", num(s));
        }
        cfg.param("degree", self.degree);
    }
}

/// Gelfand–Shilov seminorm estimate on a grid.
/// CSV columns: `alpha,beta,x,value` for the maximizer.
pub fn seminorm(cfg: &ExperimentConfig, args: &SeminormArgs) -> Result<Outcome, CliError> {
    cfg.check_degree(args.degree)?;
    let input: Input = parse_spec(&args.function, cfg.seed, 0)?;
    let f = input.sampled();
    let fallback = Grid::for_degree(args.degree, f.dim());
    let grid = Grid::new(args.extent.unwrap_or(fallback.extent), args.step.unwrap_or(fallback.step))?;
    let mut opts = DerivativeOptions::with_degree(args.degree);
    opts.n_quad = cfg.quad_nodes_or(opts.n_quad);
    opts.tolerance = cfg.tol;
    let est = gs_seminorm_estimate(&f, args.s, args.sigma, args.h, args.alpha_max, args.beta_max, &grid, &opts)?;

    let mut report = Report::new();
    cfg.echo(&mut report);
    report.result_num("grid.extent", grid.extent);
    report.result_num("grid.step", grid.step);
    report.result("n_quad", opts.n_quad);
    report.result_num("value", est.value);
    report.result("argmax.alpha", &est.alpha);
    report.result("argmax.beta", &est.beta);
    let point = est.point.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",");
    report.result("argmax.x", &point);
    warnings(&mut report, &est.warnings);
    report.verdict("criterion", "value finite");

    let mut csv = Csv::new(&["alpha", "beta", "x", "value"]);
    csv.push(vec![format!("\"{}\"", est.alpha), format!("\"{}\"", est.beta), format!("\"{point}\""), num(est.value)]);
    Ok(Outcome::new(report, csv, est.value.is_finite()))
}
