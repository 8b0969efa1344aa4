use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use aomega::functions::{ComplexFn, HolomorphicFunction};
use aomega::grammar::{parse_function, parse_point, parse_weight};
use aomega::harness::{self, Config};
use aomega::kernels::{KernelEvaluator, KernelOptions};
use aomega::moments::{disc_moments, plane_moments};
use aomega::norms::{area_norm, hardy_norm, QuadratureSpec};
use aomega::operators::OperatorContext;
use aomega::weights::{Geometry, WeightFunction};
use aomega::{Error, Result};

#[derive(Parser)]
#[command(
    name = "aomega",
    version,
    about = "Weighted spaces A^p_ω on the disc, the plane and the half-plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Ap,
    Hp,
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long, default_value = "disc")]
    geometry: Geometry,
    #[arg(long)]
    weight: String,
}

impl WeightArgs {
    fn build(&self) -> Result<WeightFunction> {
        parse_weight(&self.weight, self.geometry)
    }
}

#[derive(Args)]
struct PointwiseArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long)]
    function: String,
    /// Evaluation point `re,im`; repeat for several.
    #[arg(long, required = true, allow_hyphen_values = true)]
    at: Vec<String>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Moment sequence Δ₀..Δ_N of a disc or plane weight.
    Moments {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "csv")]
        out: Format,
    },
    /// Cauchy-type kernel values at a point or over a grid of points.
    Kernel {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// CSV with columns re, im.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum, default_value = "csv")]
        out: Format,
    },
    /// L_ω f at the given points.
    ApplyL(PointwiseArgs),
    /// f recovered from boundary values of φ = L_ω f.
    Reconstruct(PointwiseArgs),
    /// The area-reproducing integral of f.
    Reproduce {
        #[command(flatten)]
        args: PointwiseArgs,
        /// Exponent of the space; required on the plane.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Area or Hardy norm of a function.
    Norm {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long, default_value = "disc")]
        geometry: Geometry,
        /// Needed for area norms.
        #[arg(long)]
        weight: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 1e-11)]
        tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// Run verification scenarios and write report.json and summary.csv.
    Verify {
        /// Scenario file; the built-in suite is used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct PointRecord {
    z: [f64; 2],
    value: [f64; 2],
    est_err: f64,
}

#[derive(Serialize)]
struct NormRecord {
    value: f64,
    value_unnormalized: f64,
    normalized: f64,
    est_rel_err: f64,
    ladder: Vec<(f64, f64)>,
    monotone: Option<bool>,
}

fn points(raw: &[String]) -> Result<Vec<Complex64>> {
    raw.iter().map(|s| parse_point(s)).collect()
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(std::io::stdout().lock(), "{text}")?;
    Ok(())
}

fn pointwise<F>(args: &PointwiseArgs, mut eval: F) -> Result<()>
where
    F: FnMut(&OperatorContext, &HolomorphicFunction, Complex64) -> Result<Complex64>,
{
    let w = args.weight.build()?;
    let f = parse_function(&args.function)?;
    let ctx = OperatorContext::new(&w, args.tol)?;
    let mut out = Vec::new();
    for z in points(&args.at)? {
        let v = eval(&ctx, &f, z)?;
        out.push(PointRecord {
            z: [z.re, z.im],
            value: [v.re, v.im],
            est_err: args.tol * v.norm().max(1.0),
        });
    }
    print_json(&out)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Moments { weight, n, out } => {
            let w = weight.build()?;
            let m = match w.geometry() {
                Geometry::Disc => disc_moments(&w, n)?,
                Geometry::Plane => plane_moments(&w, n)?,
                Geometry::HalfPlane => {
                    return Err(Error::Unsupported(
                        "half-plane weights have a Laplace symbol, not a moment sequence".into(),
                    ))
                }
            };
            match out {
                Format::Json => print_json(&m)?,
                Format::Csv => {
                    let mut wr = csv::Writer::from_writer(std::io::stdout());
                    wr.write_record(["n", "delta_n", "est_rel_err"])?;
                    for (k, (v, e)) in m.values.iter().zip(&m.accuracy).enumerate() {
                        wr.write_record([k.to_string(), format!("{v:e}"), format!("{e:e}")])?;
                    }
                    wr.flush()?;
                }
            }
        }
        Command::Kernel {
            weight,
            at,
            grid,
            tol,
            out,
        } => {
            let w = weight.build()?;
            let k = KernelEvaluator::auto(
                &w,
                KernelOptions {
                    tol,
                    ..KernelOptions::default()
                },
            )?;
            let mut zs = Vec::new();
            if let Some(a) = at {
                zs.push(parse_point(&a)?);
            }
            if let Some(path) = grid {
                let mut rd = csv::Reader::from_path(&path)?;
                for rec in rd.records() {
                    let rec = rec?;
                    let get = |i: usize| -> Result<f64> {
                        rec.get(i)
                            .and_then(|s| s.trim().parse().ok())
                            .ok_or_else(|| {
                                Error::Parse(format!("{}: bad grid row {rec:?}", path.display()))
                            })
                    };
                    zs.push(Complex64::new(get(0)?, get(1)?));
                }
            }
            if zs.is_empty() {
                return Err(Error::Parse("kernel needs --at or --grid".into()));
            }
            let rows = zs
                .iter()
                .map(|z| k.eval_with_error(*z).map(|(c, e)| (*z, c, e)))
                .collect::<Result<Vec<_>>>()?;
            match out {
                Format::Csv => {
                    let mut wr = csv::Writer::from_writer(std::io::stdout());
                    wr.write_record(["re", "im", "c_re", "c_im", "est_err"])?;
                    for (z, c, e) in rows {
                        wr.write_record([z.re, z.im, c.re, c.im, e].map(|x| format!("{x:e}")))?;
                    }
                    wr.flush()?;
                }
                Format::Json => {
                    let recs: Vec<PointRecord> = rows
                        .into_iter()
                        .map(|(z, c, e)| PointRecord {
                            z: [z.re, z.im],
                            value: [c.re, c.im],
                            est_err: e,
                        })
                        .collect();
                    print_json(&recs)?;
                }
            }
        }
        Command::ApplyL(args) => pointwise(&args, |ctx, f, z| ctx.apply_l(f)?.eval(z))?,
        Command::Reconstruct(args) => pointwise(&args, |ctx, f, z| {
            let phi = ctx.apply_l(f)?;
            ctx.reconstruct_boundary(&phi, z)
        })?,
        Command::Reproduce { args, p } => {
            pointwise(&args, |ctx, f, z| ctx.area_reproduce(f, z, p))?
        }
        Command::Norm {
            space,
            geometry,
            weight,
            p,
            function,
            tol,
            out,
        } => {
            let f = parse_function(&function)?;
            let spec = QuadratureSpec::default().with_tol(tol);
            let r = match space {
                SpaceArg::Ap => {
                    let spec_w =
                        weight.ok_or_else(|| Error::Parse("area norms need --weight".into()))?;
                    area_norm(&parse_weight(&spec_w, geometry)?, p, &f, &spec)?
                }
                SpaceArg::Hp => hardy_norm(geometry, p, &f, &spec)?,
            };
            let rec = NormRecord {
                value: r.value,
                value_unnormalized: r.unnormalized,
                normalized: r.normalized,
                est_rel_err: r.est_rel_err,
                ladder: r.ladder,
                monotone: r.monotone,
            };
            match out {
                Format::Json => print_json(&rec)?,
                Format::Csv => {
                    let mut wr = csv::Writer::from_writer(std::io::stdout());
                    wr.write_record(["value", "value_unnormalized", "normalized", "est_rel_err"])?;
                    wr.write_record(
                        [
                            rec.value,
                            rec.value_unnormalized,
                            rec.normalized,
                            rec.est_rel_err,
                        ]
                        .map(|x| format!("{x:e}")),
                    )?;
                    wr.flush()?;
                }
            }
        }
        Command::Verify {
            config,
            scenario,
            seed,
            out,
        } => {
            let mut cfg = match config {
                Some(path) => Config::load(&path)?,
                None => Config::default_suite(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let reports = harness::run_all(&cfg, scenario.as_deref())?;
            harness::write_outputs(&reports, &out)?;
            let mut stdout = std::io::stdout().lock();
            for r in &reports {
                let verdict = format!("{:?}", r.verdict).to_uppercase();
                let detail = r.message.as_deref().unwrap_or("");
                writeln!(
                    stdout,
                    "{verdict:8} {:28} {:.2}s {detail}",
                    r.id, r.wall_time_s
                )?;
            }
            return Ok(ExitCode::from(harness::exit_code(&reports) as u8));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
