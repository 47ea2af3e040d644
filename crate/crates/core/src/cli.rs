//! The `cks` command line: one subcommand per check, JSON reports.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::chaos::{
    check_dist_bound, check_test_bound, random_dist_vector, random_test_vector, sample_points, BoundCheckReport,
    BoundOptions, ChaosVector, FiniteGaussianModel, NormWeights, Role,
};
use crate::error::{Error, Result};
use crate::legendre::{dual_function, verify_dual_sequence_range, LegendreTable};
use crate::measures::{
    check_positive_definite, integrability_check, ls_inclusion_check, random_points, IntegrabilityVerdict, MeasureKind,
    MeasureModel,
};
use crate::numeric::geometric_grid;
use crate::optimize::SearchStatus;
use crate::rng;
use crate::sequences::{
    alpha_from_u, bell_coefficients, bell_numbers, check_a1, check_a2, default_sigma_grid, DEFAULT_A2_THRESHOLD,
};
use crate::verify::verify_all;
use crate::weights::{classify, ClassThresholds, WeightConfig, WeightFunction};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cks", version, about = "Weight-function checks for CKS white-noise triples")]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, env = "CKS_SEED", default_value_t = 7)]
    pub seed: u64,
    /// JSON weight configuration; replaces the weight flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WeightArgs {
    /// power_exp, bell, stretched, bell_dual or custom_table.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long)]
    pub coef: Option<f64>,
    #[arg(long)]
    pub power: Option<f64>,
    /// Text table of `r, log u(r)` rows for custom_table.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Upper end of the weight's domain.
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Gaussian,
    Grey,
    Poisson,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeasureArgs {
    #[arg(long, value_enum, default_value_t = ModelName::Grey)]
    pub model: ModelName,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub intensity: f64,
    #[arg(long, default_value_t = 20)]
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Test,
    Dist,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Membership in the growth classes and (log, x^2)-convexity.
    Classify {
        #[command(flatten)]
        weight: WeightArgs,
        /// Right end of the evidence range.
        #[arg(long, default_value_t = 1e6)]
        upto: f64,
        #[arg(long, default_value_t = 64)]
        grid_points: usize,
    },
    /// Legendre transform on a t-grid (JSON, or CSV with --csv).
    Legendre {
        #[command(flatten)]
        weight: WeightArgs,
        /// Shorthand for the integer grid 0..=nmax.
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 30.0)]
        t_max: f64,
        #[arg(long, default_value_t = 31)]
        points: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Dual function u* on a geometric r-grid.
    Dual {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 1e-2)]
        from: f64,
        #[arg(long, default_value_t = 1e4)]
        to: f64,
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
    /// Dual-sequence relation for the Legendre sequences of u and u*.
    Duality {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 0)]
        nmin: usize,
        #[arg(long, default_value_t = 30)]
        nmax: usize,
    },
    /// Higher-order Bell numbers.
    Bell {
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[arg(long)]
        json: bool,
    },
    /// Conditions (A1) and (A2) for α(n) = 1/(n! ℓ_u(n)) or for Bell numbers.
    WeightsAdmissible {
        #[command(flatten)]
        weight: WeightArgs,
        /// Use the Bell numbers of this order instead of a weight function.
        #[arg(long)]
        bell_order: Option<u32>,
        #[arg(long, default_value_t = 40)]
        nmax: usize,
        #[arg(long, default_value_t = DEFAULT_A2_THRESHOLD, allow_negative_numbers = true)]
        threshold: f64,
    },
    /// Test-function and distribution bounds on random chaos vectors.
    #[command(alias = "chaos")]
    ChaosBounds {
        #[command(flatten)]
        weight: WeightArgs,
        /// Check a single chaos vector from JSON instead of random ones.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Side::Both)]
        side: Side,
        #[arg(long, default_value_t = 6)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        degree: usize,
        #[arg(long, default_value_t = 100)]
        vectors: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0.25)]
        a: f64,
        #[arg(long, default_value_t = 2.0)]
        p_test: f64,
        #[arg(long, default_value_t = 0.0)]
        q_test: f64,
        #[arg(long, default_value_t = 0.0)]
        p_dist: f64,
        #[arg(long, default_value_t = 2.0)]
        q_dist: f64,
    },
    /// Gram-matrix positivity of a characteristic functional.
    PositiveDefinite {
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 12)]
        points: usize,
        #[arg(long, default_value_t = 50)]
        sets: usize,
        /// Standard deviation of the points; defaults to 0.75 sqrt(3 / dim).
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Monte Carlo integrability of u(|x|^2_{-p})^{1/2}, or L^s moments of a
    /// chaos vector with --phi.
    #[command(alias = "measure")]
    Integrability {
        #[command(flatten)]
        measure: MeasureArgs,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Write the batch means as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Chaos vector (JSON) whose moments E|φ|^s are estimated.
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
        s: Vec<f64>,
    },
    /// Run the whole acceptance suite.
    VerifyAll,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Legendre { .. } => "legendre",
            Command::Dual { .. } => "dual",
            Command::Duality { .. } => "duality",
            Command::Bell { .. } => "bell",
            Command::WeightsAdmissible { .. } => "weights-admissible",
            Command::ChaosBounds { .. } => "chaos-bounds",
            Command::PositiveDefinite { .. } => "positive-definite",
            Command::Integrability { .. } => "integrability",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub subcommand: String,
    /// SHA-256 of the resolved configuration.
    pub config_digest: String,
    pub seed: u64,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

/// What a subcommand produced.
pub struct Output {
    pub report: RunReport,
    pub ok: bool,
    /// Plain-text rendering that replaces the JSON report.
    pub text: Option<String>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn weight_config(args: &WeightArgs, config: Option<&Path>) -> Result<WeightConfig> {
    if let Some(path) = config {
        return WeightConfig::from_json_str(&read(path)?);
    }
    let family = args
        .family
        .clone()
        .ok_or_else(|| Error::Config("a weight needs --family or --config".into()))?;
    let mut params = serde_json::Map::new();
    for (key, value) in [("beta", args.beta), ("coef", args.coef), ("power", args.power)] {
        if let Some(v) = value {
            params.insert(key.into(), json!(v));
        }
    }
    if let Some(k) = args.order {
        params.insert("order".into(), json!(k));
    }
    if let Some(path) = &args.table {
        params.insert("text".into(), json!(read(path)?));
    }
    Ok(WeightConfig {
        family,
        params: Value::Object(params),
        r_max: args.r_max,
        name: None,
    })
}

fn default_weight(m: &MeasureArgs) -> Result<WeightConfig> {
    let (family, params) = match m.model {
        ModelName::Grey => ("power_exp", json!({ "beta": 1.0 - m.lambda })),
        ModelName::Poisson => ("bell_dual", json!({ "order": 2 })),
        ModelName::Gaussian => ("stretched", json!({ "coef": 2.0, "power": 1.0 })),
    };
    Ok(WeightConfig {
        family: family.into(),
        params,
        r_max: None,
        name: None,
    })
}

fn measure_model(m: &MeasureArgs, seed: u64) -> Result<MeasureModel> {
    let kind = match m.model {
        ModelName::Gaussian => MeasureKind::Gaussian,
        ModelName::Grey => MeasureKind::Grey { lambda: m.lambda },
        ModelName::Poisson => MeasureKind::Poisson { intensity: m.intensity },
    };
    MeasureModel::new(kind, m.dim, seed)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Output> {
    let start = Instant::now();
    let seed = cli.seed;
    let config = cli.config.as_deref();
    let mut text = None;
    // resolved configuration, digested into the report
    let mut resolved = json!({ "subcommand": cli.command.name() });
    let (results, ok): (Value, bool) = match &cli.command {
        Command::Classify {
            weight,
            upto,
            grid_points,
        } => {
            let wc = weight_config(weight, config)?;
            resolved["weight"] = to_value(&wc);
            resolved["upto"] = json!(upto);
            resolved["grid_points"] = json!(grid_points);
            let th = ClassThresholds {
                grid_points: *grid_points,
                ..ClassThresholds::default()
            };
            let m = classify(&wc.build()?, *upto, &th)?;
            let ok = m.in_c_plus_log.verdict.is_consistent()
                && m.in_c_plus_half.verdict.is_consistent()
                && m.in_c_plus_half_one.verdict.is_consistent()
                && m.log_x2_convex.verdict.is_consistent();
            (to_value(&m), ok)
        }
        Command::Legendre {
            weight,
            nmax,
            t_min,
            t_max,
            points,
            csv,
        } => {
            let wc = weight_config(weight, config)?;
            let grid: Vec<f64> = match nmax {
                Some(n) => (0..=*n).map(|k| k as f64).collect(),
                None => {
                    if *points < 2 || !(t_max > t_min) {
                        return Err(Error::Config("t-grid needs at least 2 points and t_max > t_min".into()));
                    }
                    (0..*points)
                        .map(|i| t_min + (t_max - t_min) * i as f64 / (*points - 1) as f64)
                        .collect()
                }
            };
            resolved["weight"] = to_value(&wc);
            resolved["t_grid"] = json!(grid);
            let table = LegendreTable::compute(&wc.build()?, &grid)?;
            if *csv {
                text = Some(table.to_csv());
            }
            (to_value(&table), table.worst_status() == SearchStatus::Converged)
        }
        Command::Dual {
            weight,
            from,
            to,
            points,
        } => {
            let wc = weight_config(weight, config)?;
            resolved["weight"] = to_value(&wc);
            resolved["grid"] = json!([from, to, points]);
            if !(*from > 0.0 && to > from) || *points < 2 {
                return Err(Error::Config("dual grid needs 0 < from < to and at least 2 points".into()));
            }
            let u = wc.build()?;
            let pts = geometric_grid(*from, *to, *points)
                .into_par_iter()
                .map(|r| dual_function(&u, r))
                .collect::<Result<Vec<_>>>()?;
            let ok = pts.iter().all(|p| p.status == SearchStatus::Converged);
            (json!({ "weight": u.name(), "points": pts }), ok)
        }
        Command::Duality { weight, nmin, nmax } => {
            let wc = weight_config(weight, config)?;
            resolved["weight"] = to_value(&wc);
            resolved["range"] = json!([nmin, nmax]);
            let rep = verify_dual_sequence_range(&wc.build()?, *nmin, *nmax)?;
            let ok = rep.report.is_consistent();
            (to_value(&rep), ok)
        }
        Command::Bell { order, count, json } => {
            resolved["order"] = json!(order);
            resolved["count"] = json!(count);
            if *count == 0 {
                return Err(Error::Config("--count must be positive".into()));
            }
            let coeffs = bell_coefficients(*order, count - 1)?;
            let exact: Option<Vec<String>> = coeffs.iter().map(|c| c.as_integer().map(|v| v.to_string())).collect();
            if !json {
                text = Some(match &exact {
                    Some(ints) => ints.join(" ") + "\n",
                    None => coeffs.iter().map(|c| format!("{c}\n")).collect(),
                });
            }
            let ln: Vec<f64> = coeffs.iter().map(|c| c.ln()).collect();
            (json!({ "order": order, "values": coeffs, "ln": ln }), true)
        }
        Command::WeightsAdmissible {
            weight,
            bell_order,
            nmax,
            threshold,
        } => {
            let alpha = match bell_order {
                Some(k) => {
                    resolved["bell_order"] = json!(k);
                    bell_numbers(*k, *nmax)?
                }
                None => {
                    let wc = weight_config(weight, config)?;
                    resolved["weight"] = to_value(&wc);
                    alpha_from_u(&wc.build()?, *nmax)?
                }
            };
            resolved["nmax"] = json!(nmax);
            resolved["threshold"] = json!(threshold);
            let a1 = check_a1(&alpha, &default_sigma_grid())?;
            let a2 = check_a2(&alpha, *threshold)?;
            let ok = a1.verdict.is_consistent() && a2.verdict.is_consistent();
            (json!({ "provenance": alpha.provenance, "a1": a1, "a2": a2 }), ok)
        }
        Command::ChaosBounds {
            weight,
            input,
            side,
            dim,
            degree,
            vectors,
            samples,
            a,
            p_test,
            q_test,
            p_dist,
            q_dist,
        } => {
            let wc = weight_config(weight, config)?;
            let u = wc.build()?;
            let test_opts = BoundOptions {
                a: *a,
                p: *p_test,
                q: *q_test,
            };
            let dist_opts = BoundOptions {
                a: *a,
                p: *p_dist,
                q: *q_dist,
            };
            resolved["weight"] = to_value(&wc);
            resolved["options"] = json!({
                "side": side, "dim": dim, "degree": degree, "vectors": vectors, "samples": samples,
                "a": a, "test": [p_test, q_test], "dist": [p_dist, q_dist],
            });
            chaos_bounds(&u, input.as_deref(), *side, *dim, *degree, *vectors, *samples, &test_opts, &dist_opts, seed, &mut resolved)?
        }
        Command::PositiveDefinite {
            measure,
            points,
            sets,
            scale,
            tol,
        } => {
            let scale = scale.unwrap_or(0.75 * (3.0 / measure.dim as f64).sqrt());
            resolved["measure"] = to_value(measure);
            resolved["sets"] = json!([points, sets, scale, tol]);
            let model = measure_model(measure, seed)?;
            let mut r = rng::stream(seed, 10 << 48);
            let mut reports = Vec::with_capacity(*sets);
            for _ in 0..*sets {
                let pts = random_points(model.dim, *points, scale, &mut r);
                reports.push(check_positive_definite(|x| model.char_fn(x), &pts, *tol)?);
            }
            let min = reports.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min);
            let ok = reports.iter().all(|r| r.verdict.is_consistent());
            (json!({ "measure": model.kind, "min_eigenvalue": min, "sets": reports }), ok)
        }
        Command::Integrability {
            measure,
            weight,
            samples,
            p,
            csv,
            phi,
            s,
        } => {
            resolved["measure"] = to_value(measure);
            resolved["samples"] = json!(samples);
            let model = measure_model(measure, seed)?;
            if let Some(path) = phi {
                let v = ChaosVector::from_json_str(&read(path)?)?;
                resolved["phi"] = json!(crate::digest_hex(v.to_json_string().as_bytes()));
                resolved["s"] = json!(s);
                let reps = ls_inclusion_check(&model, &v, s, *samples)?;
                let ok = reps.iter().all(|r| r.verdict == IntegrabilityVerdict::Converged);
                (to_value(&reps), ok)
            } else {
                let wc = if weight.family.is_some() || config.is_some() {
                    weight_config(weight, config)?
                } else {
                    default_weight(measure)?
                };
                resolved["weight"] = to_value(&wc);
                resolved["p"] = json!(p);
                let rep = integrability_check(&model, &wc.build()?, *p, *samples)?;
                if let Some(path) = csv {
                    let mut out = String::from("batch,mean\n");
                    for (i, m) in rep.batch_means.iter().enumerate() {
                        out.push_str(&format!("{i},{m:e}\n"));
                    }
                    write(path, &out)?;
                }
                let ok = rep.verdict == IntegrabilityVerdict::Converged;
                (to_value(&rep), ok)
            }
        }
        Command::VerifyAll => {
            let suite = verify_all(seed);
            (to_value(&suite), suite.all_passed())
        }
    };
    let digest = crate::digest_hex(serde_json::to_string(&resolved).expect("config serializes").as_bytes());
    Ok(Output {
        report: RunReport {
            subcommand: cli.command.name().into(),
            config_digest: digest,
            seed,
            results,
            wall_time: cli.timing.then(|| start.elapsed().as_secs_f64()),
        },
        ok,
        text,
    })
}

#[allow(clippy::too_many_arguments)]
fn chaos_bounds(
    u: &WeightFunction,
    input: Option<&Path>,
    side: Side,
    dim: usize,
    degree: usize,
    vectors: u64,
    samples: usize,
    test_opts: &BoundOptions,
    dist_opts: &BoundOptions,
    seed: u64,
    resolved: &mut Value,
) -> Result<(Value, bool)> {
    let all_ok = |reps: &[BoundCheckReport]| reps.iter().all(|r| r.verdict.is_consistent());
    if let Some(path) = input {
        let v = ChaosVector::from_json_str(&read(path)?)?;
        resolved["input"] = json!(crate::digest_hex(v.to_json_string().as_bytes()));
        let model = *v.model();
        let nw = NormWeights::new(u, model.degree)?;
        let sample = sample_points(&model, samples, &mut rng::stream(seed, 8 << 48));
        let rep = match v.role() {
            Role::Test => check_test_bound(&v, &nw, test_opts, &sample)?,
            Role::Distribution => check_dist_bound(&v, &nw, dist_opts, &sample)?,
        };
        let ok = rep.verdict.is_consistent();
        return Ok((to_value(&rep), ok));
    }
    let model = FiniteGaussianModel::new(dim, degree)?;
    let nw = NormWeights::new(u, degree)?;
    let sample = sample_points(&model, samples, &mut rng::stream(seed, 8 << 48));
    let run_test = matches!(side, Side::Test | Side::Both);
    let run_dist = matches!(side, Side::Dist | Side::Both);
    let pairs = (0..vectors)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, (8 << 48) + i);
            let phi = random_test_vector(model, &mut r);
            let big = random_dist_vector(model, &mut r);
            let t = run_test.then(|| check_test_bound(&phi, &nw, test_opts, &sample)).transpose()?;
            let d = run_dist.then(|| check_dist_bound(&big, &nw, dist_opts, &sample)).transpose()?;
            Ok((t, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let (tests, dists): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let tests: Vec<BoundCheckReport> = tests.into_iter().flatten().collect();
    let dists: Vec<BoundCheckReport> = dists.into_iter().flatten().collect();
    let count = |reps: &[BoundCheckReport]| reps.iter().filter(|r| !r.verdict.is_consistent()).count();
    let ok = all_ok(&tests) && all_ok(&dists);
    Ok((
        json!({
            "weight": u.name(),
            "test_violations": count(&tests),
            "dist_violations": count(&dists),
            "test": tests,
            "dist": dists,
        }),
        ok,
    ))
}

/// Parses `args`, runs the subcommand, writes the report and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let out = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("cks {}: {e}", cli.command.name());
            return EXIT_USAGE;
        }
    };
    let body = match out.text {
        Some(t) => t,
        None => serde_json::to_string_pretty(&out.report).expect("report serializes") + "\n",
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = write(path, &body) {
                eprintln!("cks: {e}");
                return EXIT_USAGE;
            }
        }
        None => print!("{body}"),
    }
    if out.ok {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}
