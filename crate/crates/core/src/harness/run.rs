//! Experiment execution: initial parameters, integration, metrics and output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{Integrator, PointsFn, PointsProvider, StepRecord, Trajectory};
use crate::error::{Error, Result};
use crate::harness::config::*;
use crate::harness::fit::{fit_initial_condition, FitOutcome};
use crate::harness::metrics::{metrics_csv, parse_theta_text, relative_l2, theta_text, write_atomic, MetricsRow};
use crate::models::{
    AdvReactSine, AdvectionReaction, Domain, FlowField, Parametrization, PdeProblem, PeriodicMlp, PointSet,
    Transport2d, WaveEquation, WaveTwoGaussian,
};
use crate::reference::{
    advreact_exact, transport_initial_condition, wave_exact, FdConfig, FdTransport, ReferenceField,
};

/// Everything produced by one in-memory run.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: ExperimentConfig,
    pub theta0: Vec<f64>,
    pub fit: Option<FitOutcome>,
    pub trajectory: Trajectory,
    pub metrics: Vec<MetricsRow>,
}

/// Files written by [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub metrics: PathBuf,
    pub theta: PathBuf,
    pub simulation: Simulation,
}

/// Initial condition `u(t0, ·)` of the configured problem.
type PointFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Sync>;
type SpaceTimeFn = Box<dyn Fn(f64, &[f64]) -> Vec<f64>>;

fn initial_target(problem: &ProblemSpec, t0: f64) -> PointFn {
    match *problem {
        ProblemSpec::Wave { rho, c } => Box::new(move |x| {
            let (u, ut) = wave_exact(t0, x[0], rho, c);
            vec![u, ut]
        }),
        ProblemSpec::AdvectionReaction { .. } => Box::new(move |x| vec![advreact_exact(t0, x[0])]),
        ProblemSpec::Transport { .. } => Box::new(|x| vec![transport_initial_condition(x[0], x[1])]),
    }
}

fn fit_points(cfg: &ExperimentConfig, fit: &FitConfig) -> Result<PointSet> {
    let domain = cfg.problem.domain();
    let sizes = match (&fit.grid, &cfg.collocation) {
        (Some(g), _) => g.clone(),
        (None, CollocationSpec::Grid { sizes }) => sizes.clone(),
        (None, CollocationSpec::Uniform { .. }) => {
            return Err(Error::Config("fit.grid is required with random collocation".into()))
        }
    };
    if sizes.len() != domain.dim() || sizes.contains(&0) {
        return Err(Error::Config(format!("fit grid {sizes:?} does not match the domain")));
    }
    Ok(domain.grid(&sizes))
}

/// Resolve `θ₀` from the `initial` table.
fn initial_theta<M: Parametrization + ?Sized>(
    cfg: &ExperimentConfig,
    model: &M,
    exact: Option<Vec<f64>>,
    random_init: &dyn Fn(u64) -> Vec<f64>,
) -> Result<(Vec<f64>, Option<FitOutcome>)> {
    let (theta, fit) = match &cfg.initial {
        InitialSpec::Exact => (
            exact.ok_or_else(|| Error::Config("no closed-form initial parameters for this model".into()))?,
            None,
        ),
        InitialSpec::Values { theta } => (theta.clone(), None),
        InitialSpec::File { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            (parse_theta_text(&text).map_err(|e| Error::Config(e.to_string()))?, None)
        }
        InitialSpec::Fit(fit) => {
            let start = match exact {
                Some(theta) => theta,
                None => random_init(fit.seed.unwrap_or(cfg.seeds.init)),
            };
            let points = fit_points(cfg, fit)?;
            let target = initial_target(&cfg.problem, cfg.time.t0);
            let outcome = fit_initial_condition(model, |x| target(x), fit, &points, start)?;
            (outcome.theta.clone(), Some(outcome))
        }
    };
    if theta.len() != model.param_count() || theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!(
            "initial parameters must be {} finite values, got {}",
            model.param_count(),
            theta.len()
        )));
    }
    Ok((theta, fit))
}

fn uniform_points(domain: &Domain, count: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = domain.dim();
    let mut coords = Vec::with_capacity(count * d);
    for _ in 0..count {
        for i in 0..d {
            coords.push(rng.random_range(domain.lower[i]..domain.upper[i]));
        }
    }
    PointSet::new(d, coords)
}

fn collocation(cfg: &ExperimentConfig) -> Box<dyn PointsProvider> {
    let domain = cfg.problem.domain();
    let seed = cfg.seeds.init;
    match cfg.collocation {
        CollocationSpec::Grid { ref sizes } => Box::new(domain.grid(sizes)),
        CollocationSpec::Uniform { count, resample: false } => Box::new(uniform_points(&domain, count, seed)),
        CollocationSpec::Uniform { count, resample: true } => Box::new(PointsFn(move |step: usize, _t: f64| {
            uniform_points(&domain, count, seed.wrapping_add((step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
        })),
    }
}

/// Ground truth on the error grid, evaluated only when asked.
enum Truth {
    Closed {
        domain: Domain,
        sizes: Vec<usize>,
        components: usize,
        f: SpaceTimeFn,
    },
    Fd {
        solver: FdTransport,
        state: ReferenceField,
        sizes: Vec<usize>,
    },
}

impl Truth {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let domain = cfg.problem.domain();
        match cfg.problem {
            ProblemSpec::Wave { rho, c } => Ok(Truth::Closed {
                domain,
                sizes: cfg.reference.grid.clone().unwrap_or_else(|| vec![600]),
                components: 2,
                f: Box::new(move |t, x| {
                    let (u, ut) = wave_exact(t, x[0], rho, c);
                    vec![u, ut]
                }),
            }),
            ProblemSpec::AdvectionReaction { .. } => Ok(Truth::Closed {
                domain,
                sizes: cfg.reference.grid.clone().unwrap_or_else(|| vec![512]),
                components: 1,
                f: Box::new(|t, x| vec![advreact_exact(t, x[0])]),
            }),
            ProblemSpec::Transport { x0, y0 } => {
                let flow = FlowField {
                    x0,
                    y0,
                    ..FlowField::default()
                };
                let fd_grid = cfg.reference.fd_grid.unwrap_or([256, 256]);
                let solver = match cfg.reference.fd_dt {
                    Some(dt) => FdTransport::new(&flow, FdConfig { sizes: fd_grid, dt })?,
                    None => (1..=100_000)
                        .find_map(|k| {
                            FdTransport::new(
                                &flow,
                                FdConfig {
                                    sizes: fd_grid,
                                    dt: cfg.dynamics.dt / k as f64,
                                },
                            )
                            .ok()
                        })
                        .ok_or_else(|| Error::Config("no stable reference step found".into()))?,
                };
                let state = ReferenceField::sample(&domain, &fd_grid, 1, cfg.time.t0, |p| {
                    vec![transport_initial_condition(p[0], p[1])]
                });
                let sizes = cfg.reference.grid.clone().unwrap_or_else(|| fd_grid.to_vec());
                if sizes.len() != 2
                    || sizes.contains(&0)
                    || !fd_grid[0].is_multiple_of(sizes[0])
                    || !fd_grid[1].is_multiple_of(sizes[1])
                {
                    return Err(Error::Config(format!(
                        "error grid {sizes:?} must divide the reference grid {fd_grid:?}"
                    )));
                }
                Ok(Truth::Fd { solver, state, sizes })
            }
        }
    }

    fn grid(&self) -> (Domain, Vec<usize>) {
        match self {
            Truth::Closed { domain, sizes, .. } => (domain.clone(), sizes.clone()),
            Truth::Fd { state, sizes, .. } => (state.domain.clone(), sizes.clone()),
        }
    }

    fn at(&mut self, t: f64) -> Result<ReferenceField> {
        match self {
            Truth::Closed {
                domain,
                sizes,
                components,
                f,
            } => Ok(ReferenceField::sample(domain, sizes, *components, t, |x| f(t, x))),
            Truth::Fd { solver, state, sizes } => {
                solver.advance(state, t)?;
                state.subsample(sizes)
            }
        }
    }
}

fn metrics_row<M: Parametrization + ?Sized>(
    model: &M,
    truth: &mut Truth,
    record: &StepRecord,
    wall_time_ms: f64,
) -> Result<MetricsRow> {
    let exact = truth.at(record.t)?;
    let (domain, sizes) = truth.grid();
    let approx = ReferenceField::from_model(model, record.theta.as_slice(), &domain, &sizes, record.t);
    let rel_l2_error = match relative_l2(&approx, &exact) {
        Ok(e) => e,
        Err(Error::UndefinedMetric) => f64::NAN,
        Err(e) => return Err(e),
    };
    Ok(MetricsRow {
        t: record.t,
        rel_l2_error,
        residual_norm: record.residual_norm,
        retained_rank: record.retained_rank,
        sigma_max: record.sigma_max,
        sigma_min_retained: record.sigma_min_retained,
        momentum_norm: record.momentum_norm,
        wall_time_ms,
    })
}

fn execute<P, M>(
    cfg: &ExperimentConfig,
    problem: &P,
    model: &M,
    exact: Option<Vec<f64>>,
    random_init: &dyn Fn(u64) -> Vec<f64>,
) -> Result<Simulation>
where
    M: Parametrization + ?Sized,
    P: PdeProblem<M> + ?Sized,
{
    let (theta0, fit) = initial_theta(cfg, model, exact, random_init)?;
    let integ = Integrator::new(problem, model, cfg.step_config()?)?;
    let mut points = collocation(cfg);
    let mut truth = Truth::new(cfg)?;
    let every = cfg.output.every;
    let start = Instant::now();
    let clock = |start: &Instant| {
        if cfg.output.wall_time {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        }
    };

    let mut metrics = Vec::new();
    let mut step = 0usize;
    let trajectory = integ.integrate_with(
        &DVector::from_vec(theta0.clone()),
        (cfg.time.t0, cfg.time.t_end),
        points.as_mut(),
        |record| {
            step += 1;
            if step.is_multiple_of(every) {
                metrics.push(metrics_row(model, &mut truth, record, clock(&start))?);
            }
            Ok(())
        },
    )?;
    if let Some(last) = trajectory.records.last() {
        if !trajectory.records.len().is_multiple_of(every) {
            metrics.push(metrics_row(model, &mut truth, last, clock(&start))?);
        }
    }
    Ok(Simulation {
        config: cfg.clone(),
        theta0,
        fit,
        trajectory,
        metrics,
    })
}

fn mlp_init(net: &PeriodicMlp) -> impl Fn(u64) -> Vec<f64> + '_ {
    move |seed| net.init(seed)
}

fn no_random_init(_seed: u64) -> Vec<f64> {
    Vec::new()
}

/// Run a validated configuration in memory.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Simulation> {
    cfg.validate()?;
    let t0 = cfg.time.t0;
    match (&cfg.problem, &cfg.model) {
        (&ProblemSpec::Wave { rho, c }, ModelSpec::TwoGaussian) => {
            let model = WaveTwoGaussian::new(rho, c);
            let exact = model.exact_parameters(t0).to_vec();
            execute(cfg, &WaveEquation::default(), &model, Some(exact), &no_random_init)
        }
        (&ProblemSpec::AdvectionReaction { c, kappa }, ModelSpec::SineAmplitude) => {
            let problem = AdvectionReaction { c, kappa };
            execute(cfg, &problem, &AdvReactSine, Some(vec![t0, t0]), &no_random_init)
        }
        (&ProblemSpec::AdvectionReaction { c, kappa }, ModelSpec::PeriodicMlp(spec)) => {
            let net = PeriodicMlp::new(spec.clone());
            let init = mlp_init(&net);
            execute(cfg, &AdvectionReaction { c, kappa }, &net, None, &init)
        }
        (&ProblemSpec::Transport { x0, y0 }, ModelSpec::PeriodicMlp(spec)) => {
            let net = PeriodicMlp::new(spec.clone());
            let problem = Transport2d {
                flow: FlowField {
                    x0,
                    y0,
                    ..FlowField::default()
                },
            };
            let init = mlp_init(&net);
            execute(cfg, &problem, &net, None, &init)
        }
        (p, m) => Err(Error::Config(format!("model {m:?} is not supported for problem {p:?}"))),
    }
}

/// Fit the initial condition only.
pub fn fit_only(cfg: &ExperimentConfig) -> Result<(Vec<f64>, FitOutcome)> {
    cfg.validate()?;
    let InitialSpec::Fit(_) = &cfg.initial else {
        return Err(Error::Config("the configuration has no [initial] fit table".into()));
    };
    let t0 = cfg.time.t0;
    let result = match &cfg.model {
        ModelSpec::TwoGaussian => {
            let ProblemSpec::Wave { rho, c } = cfg.problem else {
                unreachable!("validated combination")
            };
            let model = WaveTwoGaussian::new(rho, c);
            initial_theta(cfg, &model, Some(model.exact_parameters(t0).to_vec()), &no_random_init)?
        }
        ModelSpec::SineAmplitude => initial_theta(cfg, &AdvReactSine, Some(vec![t0, t0]), &no_random_init)?,
        ModelSpec::PeriodicMlp(spec) => {
            let net = PeriodicMlp::new(spec.clone());
            let init = mlp_init(&net);
            initial_theta(cfg, &net, None, &init)?
        }
    };
    let (theta, outcome) = result;
    Ok((theta, outcome.expect("fit requested")))
}

/// Simulate and write `metrics.csv`, `theta.txt` and the resolved
/// `config.toml` into the output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let simulation = simulate(cfg)?;
    let dir = cfg.output_dir();
    let metrics = dir.join("metrics.csv");
    let theta = dir.join("theta.txt");
    write_atomic(&dir.join("config.toml"), cfg.to_toml()?.as_bytes())?;
    write_atomic(&theta, theta_text(simulation.trajectory.theta.as_slice()).as_bytes())?;
    write_atomic(&metrics, metrics_csv(&simulation.metrics).as_bytes())?;
    Ok(RunOutput {
        dir,
        metrics,
        theta,
        simulation,
    })
}

/// Fit and write `theta0.txt` plus the loss history `fit.csv`.
pub fn run_fit(cfg: &ExperimentConfig) -> Result<(PathBuf, FitOutcome)> {
    let (theta, outcome) = fit_only(cfg)?;
    let dir = cfg.output_dir();
    let path = dir.join("theta0.txt");
    write_atomic(&path, theta_text(&theta).as_bytes())?;
    let mut log = String::from("iteration,loss\n");
    for (it, loss) in &outcome.history {
        log.push_str(&format!("{it},{loss}\n"));
    }
    log.push_str(&format!("{},{}\n", outcome.iterations, outcome.loss));
    write_atomic(&dir.join("fit.csv"), log.as_bytes())?;
    Ok((path, outcome))
}

/// Run every configuration (concurrently) and merge their error curves into
/// rows `t,method,rel_l2_error`, methods labeled by file stem.
pub fn compare(paths: &[PathBuf]) -> Result<String> {
    if paths.is_empty() {
        return Err(Error::input("compare needs at least one configuration"));
    }
    let mut configs = Vec::with_capacity(paths.len());
    let mut labels: Vec<String> = Vec::with_capacity(paths.len());
    for path in paths {
        let cfg = ExperimentConfig::load(path)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| cfg.name.clone());
        let mut label = stem.clone();
        let mut k = 1;
        while labels.contains(&label) {
            k += 1;
            label = format!("{stem}-{k}");
        }
        labels.push(label);
        configs.push(cfg);
    }
    compare_configs(&mut configs, &labels)
}

/// [`compare`] on already loaded configurations. Runs sharing an output
/// directory are moved to `<dir>-<k>` so that each run owns its directory.
pub fn compare_configs(configs: &mut [ExperimentConfig], labels: &[String]) -> Result<String> {
    if configs.is_empty() || configs.len() != labels.len() {
        return Err(Error::input("compare needs one label per configuration"));
    }
    let first = &configs[0];
    for cfg in configs.iter() {
        if cfg.problem != first.problem || cfg.time != first.time {
            return Err(Error::input(format!(
                "{} and {} differ in problem or time span",
                first.name, cfg.name
            )));
        }
    }
    let mut dirs: Vec<PathBuf> = Vec::new();
    for cfg in configs.iter_mut() {
        let base = cfg.output_dir();
        let mut dir = base.clone();
        let mut k = 1;
        while dirs.contains(&dir) {
            k += 1;
            dir = PathBuf::from(format!("{}-{k}", base.display()));
        }
        cfg.output.dir = Some(dir.clone());
        dirs.push(dir);
    }

    let results: Vec<Result<RunOutput>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs.iter().map(|cfg| scope.spawn(move || run(cfg))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::input("run panicked"))))
            .collect()
    });
    let mut curves = Vec::with_capacity(results.len());
    for r in results {
        curves.push(r?.simulation.metrics);
    }

    let mut rows: Vec<(f64, usize, f64)> = curves
        .iter()
        .enumerate()
        .flat_map(|(m, rows)| rows.iter().map(move |r| (r.t, m, r.rel_l2_error)))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = String::from("t,method,rel_l2_error\n");
    for (t, m, e) in rows {
        out.push_str(&format!("{t},{},{e}\n", labels[m]));
    }
    Ok(out)
}

/// Write a comparison to `out`.
pub fn compare_to_file(paths: &[PathBuf], out: &Path) -> Result<()> {
    let merged = compare(paths)?;
    write_atomic(out, merged.as_bytes())
}
