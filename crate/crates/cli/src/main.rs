//! Command-line front end of the torus laboratory.
//!
//! Exit status: 0 on success, 1 when a verification or displacement check
//! fails, 2 on input errors.

mod config;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use inputs::{load_generator, load_isotopy};
use torusflux::flow;
use torusflux::flux;
use torusflux::generator::{self, Generator};
use torusflux::hofer::{self, LengthVersion, Region};
use torusflux::interp::InterpMethod;
use torusflux::io;
use torusflux::scenarios;
use torusflux::verify;
use torusflux::{deform, Error as CoreError};

#[derive(Parser)]
#[command(
    name = "torusflux",
    about = "Symplectic isotopies on flat tori: flows, flux, Hofer-like lengths, deformations",
    version
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// flat key = value TOML configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory (overrides the config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// grid points per axis (overrides the config)
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// time steps on [0, 1] (overrides the config)
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// RNG seed (overrides the config)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// interpolation order: linear | cubic
    #[arg(long, global = true)]
    interp: Option<String>,
    #[arg(long = "tol-closedness", global = true)]
    tol_closedness: Option<f64>,
    #[arg(long = "tol-symplectic", global = true)]
    tol_symplectic: Option<f64>,
    #[arg(long = "tol-endpoint", global = true)]
    tol_endpoint: Option<f64>,
    #[arg(long = "tol-flux", global = true)]
    tol_flux: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a generator into an isotopy and report its lengths
    Integrate {
        #[arg(long)]
        generator: PathBuf,
    },
    /// Recover the generator of a saved isotopy
    GeneratorOf {
        #[arg(long)]
        isotopy: PathBuf,
    },
    /// Group product a ⋈ b
    Product {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Group inverse of a generator
    Inverse {
        #[arg(long)]
        a: PathBuf,
    },
    /// Flux class of a generator (optionally cross-checked against the path)
    Flux {
        #[arg(long)]
        generator: PathBuf,
        /// also integrate and compute the direct pullback flux
        #[arg(long)]
        direct: bool,
    },
    /// Mass flow of a generator for the given classes, both routes
    Massflow {
        #[arg(long)]
        generator: PathBuf,
        /// classes as "m1,m2;m1,m2;…" (default: ± basis vectors)
        #[arg(long)]
        classes: Option<String>,
    },
    /// Poincaré-duality gap table over the given classes
    Duality {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long)]
        classes: Option<String>,
    },
    /// Shifted path t ↦ φ_{t+s} ∘ (φ_s)^{-1}
    Shift {
        #[arg(long)]
        isotopy: PathBuf,
        #[arg(long)]
        s: f64,
    },
    /// Hofer-like lengths of a generator
    Lengths {
        #[arg(long)]
        generator: PathBuf,
    },
    /// Upper bound on the Hofer-like norm of a target time-one map
    NormUpper {
        /// generator whose time-one map is the target
        #[arg(long)]
        target: PathBuf,
        /// candidate generators
        #[arg(long, num_args = 1..)]
        candidates: Vec<PathBuf>,
        #[arg(long, default_value = "linf")]
        version: String,
    },
    /// Strip displacement test for the rotation by (a1, 0)
    Displace {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        a1: f64,
        /// optional Hamiltonian conjugator generator
        #[arg(long)]
        conj: Option<PathBuf>,
    },
    /// Displacement-energy upper bound over a candidate family
    Energy {
        /// region: "strip:<nu>" or "ball:<c1>,<c2>,…:<radius>"
        #[arg(long)]
        region: String,
        /// family: "rotations:<start>:<stop>:<step>"
        #[arg(long, default_value = "rotations:0.00390625:0.5:0.00390625")]
        family: String,
        #[arg(long, default_value = "linf")]
        version: String,
    },
    /// Flux-killing deformation of a flux-zero generator
    Weinstein {
        #[arg(long)]
        generator: PathBuf,
        /// also dump the two-parameter family in the container format
        #[arg(long)]
        dump_family: bool,
    },
    /// Sequential-deformation gap table for scaled constant families
    Ldefor2 {
        /// base constant field, comma-separated
        #[arg(long, default_value = "0.5,0.3")]
        v: String,
        /// number of sequence members j = 1..=levels
        #[arg(long, default_value_t = 5)]
        levels: u32,
    },
    /// Cauchy gap table of the reparametrized-rotation sequence
    Cauchy {
        #[arg(long, default_value = "0.3,0.4")]
        v: String,
        #[arg(long, default_value_t = 6)]
        j_max: u32,
    },
    /// Run a verification suite; exit 1 when a check fails
    Verify {
        /// one of: group, hodge, duality, weinstein, ldefor2, examples, ugr
        #[arg(long)]
        suite: String,
    },
    /// Golden scenarios: rotation | conjugated | strip
    Example {
        #[arg(long)]
        name: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn effective_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(g) = common.grid {
        cfg.grid_size = g;
    }
    if let Some(s) = common.steps {
        cfg.time_steps = s;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(i) = &common.interp {
        cfg.interp = match i.as_str() {
            "linear" => InterpMethod::Linear,
            "cubic" => InterpMethod::Cubic,
            other => bail!("unknown interpolation {other:?} (use linear or cubic)"),
        };
    }
    if let Some(t) = common.tol_closedness {
        cfg.closedness_tol = t;
    }
    if let Some(t) = common.tol_symplectic {
        cfg.symplectic_tol = t;
    }
    if let Some(t) = common.tol_endpoint {
        cfg.endpoint_tol = t;
    }
    if let Some(t) = common.tol_flux {
        cfg.flux_tol = t;
    }
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    Ok(cfg)
}

fn parse_classes(spec: Option<&str>, ambient: usize) -> Result<Vec<Vec<i64>>> {
    match spec {
        None => Ok(flux::basis_classes(ambient)),
        Some(s) => s
            .split(';')
            .map(|row| {
                let m: Vec<i64> = row
                    .split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|e| anyhow!("class {row:?}: {e}")))
                    .collect::<Result<_>>()?;
                if m.len() != ambient {
                    bail!("class {row:?} has {} entries, expected {ambient}", m.len());
                }
                Ok(m)
            })
            .collect(),
    }
}

fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| anyhow!("vector {s:?}: {e}")))
        .collect()
}

fn parse_version(s: &str) -> Result<LengthVersion> {
    match s {
        "linf" => Ok(LengthVersion::Linf),
        "l1inf" => Ok(LengthVersion::L1inf),
        other => bail!("unknown length version {other:?} (use linf or l1inf)"),
    }
}

fn write_json<T: serde::Serialize>(cfg: &RunConfig, name: &str, value: &T) -> Result<PathBuf> {
    let path = cfg.out_dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value)?)?;
    Ok(path)
}

fn write_text(cfg: &RunConfig, name: &str, text: &str) -> Result<PathBuf> {
    let path = cfg.out_dir.join(name);
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Per-time norm table (t, osc U_t, |H_t|, vf norm) of a generator.
fn norms_csv(gen: &Generator) -> String {
    let rows: Vec<Vec<String>> = (0..gen.times().samples())
        .map(|k| {
            let osc = gen.ham(k).osc();
            let h = gen.harm(k).norm();
            vec![
                format!("{:.9}", gen.times().time(k)),
                format!("{osc:.12e}"),
                format!("{h:.12e}"),
                format!("{:.12e}", osc + h),
            ]
        })
        .collect();
    io::table_to_csv(&["t", "osc_u", "harm_norm", "vf_norm"], &rows)
}

/// Per-candidate CSV of a norm or energy search.
fn candidates_csv(entries: &[hofer::CandidateEntry]) -> String {
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|e| {
            vec![
                e.label.clone(),
                if e.accepted { "yes" } else { "no" }.into(),
                format!("{:.9e}", e.figure),
                format!("{:.9e}", e.symmetric_length),
            ]
        })
        .collect();
    io::table_to_csv(&["candidate", "accepted", "figure", "symmetric_length"], &rows)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = effective_config(&cli.common)?;
    let params = cfg.params();

    match cli.command {
        Command::Integrate { generator } => {
            let gen = load_generator(&generator, &cfg)?;
            let phi = flow::integrate(&gen, &params.flow)?;
            io::save_isotopy(&cfg.out_dir.join("isotopy"), &phi)?;
            let lengths = hofer::length_report(&gen, &params)?;
            let path = write_json(&cfg, "lengths.json", &lengths)?;
            write_text(&cfg, "norms.csv", &norms_csv(&gen))?;
            println!(
                "integrated {} samples at N={}, lengths in {}",
                phi.times().samples(),
                cfg.grid_size,
                path.display()
            );
        }
        Command::GeneratorOf { isotopy } => {
            let phi = load_isotopy(&isotopy, &cfg)?;
            let gen = flow::generator_of(&phi, &params.flow, &params.hodge)?;
            io::save_generator(&cfg.out_dir.join("generator"), &gen)?;
            let report = flux::hamiltonian_classifier(&gen, cfg.flux_tol);
            write_json(&cfg, "classifier.json", &report)?;
            println!(
                "recovered generator: |flux| = {:.3e}, max_t |H_t| = {:.3e}",
                report.flux_norm, report.max_harmonic_norm
            );
        }
        Command::Product { a, b } => {
            let ga = load_generator(&a, &cfg)?;
            let gb = load_generator(&b, &cfg)?;
            let prod = generator::group_product(&ga, &gb, &params)?;
            io::save_generator(&cfg.out_dir.join("product"), &prod)?;
            println!("product written; l_inf = {:.6}", hofer::length_linf(&prod));
        }
        Command::Inverse { a } => {
            let ga = load_generator(&a, &cfg)?;
            let inv = generator::group_inverse(&ga, &params)?;
            io::save_generator(&cfg.out_dir.join("inverse"), &inv)?;
            println!("inverse written; l_inf = {:.6}", hofer::length_linf(&inv));
        }
        Command::Flux { generator, direct } => {
            let gen = load_generator(&generator, &cfg)?;
            let class = flux::flux(&gen);
            write_json(
                &cfg,
                "classifier.json",
                &flux::hamiltonian_classifier(&gen, cfg.flux_tol),
            )?;
            let mut report = serde_json::json!({
                "harmonic_rep": class.harmonic_rep.coeffs(),
                "norm": class.norm(),
            });
            if direct {
                let phi = flow::integrate(&gen, &params.flow)?;
                let dclass = flux::flux_direct(&phi, &params.flow, &params.hodge)?;
                let gap = dclass.harmonic_rep.sub(&class.harmonic_rep).norm();
                report["direct_rep"] = serde_json::json!(dclass.harmonic_rep.coeffs());
                report["route_gap"] = serde_json::json!(gap);
            }
            let path = write_json(&cfg, "flux.json", &report)?;
            println!("flux |class| = {:.6e} → {}", class.norm(), path.display());
        }
        Command::Massflow { generator, classes } | Command::Duality { generator, classes } => {
            let gen = load_generator(&generator, &cfg)?;
            let ambient = gen.grid().dim().ambient();
            let classes = parse_classes(classes.as_deref(), ambient)?;
            let phi = flow::integrate(&gen, &params.flow)?;
            let mut rows = Vec::new();
            let mut max_gap = 0.0f64;
            for m in &classes {
                let formula = flux::mass_flow_formula(&gen, m)?;
                let direct = flux::mass_flow_direct(&phi, m)?;
                let gap = (formula - direct).abs();
                max_gap = max_gap.max(gap);
                rows.push(vec![
                    format!("{m:?}"),
                    format!("{formula:.12e}"),
                    format!("{direct:.12e}"),
                    format!("{gap:.3e}"),
                ]);
            }
            let csv = io::table_to_csv(&["class", "formula", "direct", "gap"], &rows);
            let path = write_text(&cfg, "massflow.csv", &csv)?;
            write_json(&cfg, "massflow.json", &flux::mass_flow_table(&phi, &classes)?)?;
            // intermediate-time trace of the first class, for diagnostics
            if let Some(m) = classes.first() {
                let trace = flux::mass_flow_trace(&phi, m)?;
                let rows: Vec<Vec<String>> = trace
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        vec![format!("{:.9}", phi.times().time(k)), format!("{v:.12e}")]
                    })
                    .collect();
                write_text(
                    &cfg,
                    "massflow-trace.csv",
                    &io::table_to_csv(&["t", "mass_flow"], &rows),
                )?;
            }
            println!("max duality gap {max_gap:.3e} over {} classes → {}", classes.len(), path.display());
        }
        Command::Shift { isotopy, s } => {
            let phi = load_isotopy(&isotopy, &cfg)?;
            let shifted = flow::time_shift(&phi, s, &params.flow)?;
            io::save_isotopy(&cfg.out_dir.join("shifted"), &shifted)?;
            let gen = flow::generator_of(&shifted, &params.flow, &params.hodge)?;
            io::save_generator(&cfg.out_dir.join("shifted-generator"), &gen)?;
            // per-slice toroidal distance between the shifted path and the
            // original path restricted to [0, 1−s]: zero for one-parameter
            // groups
            let rows: Vec<Vec<String>> = (0..shifted.times().samples())
                .map(|k| {
                    let d = shifted
                        .slice(k)
                        .c0_distance(&phi.slice(k))
                        .map(|v| format!("{v:.9e}"))
                        .unwrap_or_else(|_| "n/a".into());
                    vec![format!("{:.9}", shifted.times().time(k)), d]
                })
                .collect();
            write_text(
                &cfg,
                "shift-distance.csv",
                &io::table_to_csv(&["t", "d_c0_vs_original"], &rows),
            )?;
            println!(
                "shifted path has {} samples on [0, {:.4}]",
                shifted.times().samples(),
                shifted.times().t_end()
            );
        }
        Command::Lengths { generator } => {
            let gen = load_generator(&generator, &cfg)?;
            let report = hofer::length_report(&gen, &params)?;
            write_text(&cfg, "norms.csv", &norms_csv(&gen))?;
            let path = write_json(&cfg, "lengths.json", &report)?;
            println!(
                "l_inf = {:.6}, l_1inf = {:.6}, symmetric {:.6}/{:.6} → {}",
                report.l_inf,
                report.l_1inf,
                report.l_sym_inf,
                report.l_sym_1inf,
                path.display()
            );
        }
        Command::NormUpper {
            target,
            candidates,
            version,
        } => {
            let version = parse_version(&version)?;
            let target_gen = load_generator(&target, &cfg)?;
            let target_map = flow::integrate(&target_gen, &params.flow)?.time_one();
            let mut pool = Vec::new();
            for path in &candidates {
                pool.push((
                    path.display().to_string(),
                    load_generator(path, &cfg)?,
                ));
            }
            let report = hofer::norm_upper(&target_map, &pool, version, cfg.endpoint_tol, &params)?;
            let path = write_json(&cfg, "norm-upper.json", &report)?;
            write_text(&cfg, "norm-upper.csv", &candidates_csv(&report.entries))?;
            // both symmetric lengths per candidate, reported as data only
            // (whether the two norms agree is an open comparison)
            let cmp = hofer::compare_norm_versions(&pool, &params)?;
            let rows: Vec<Vec<String>> = cmp
                .iter()
                .map(|r| {
                    vec![
                        r.label.clone(),
                        format!("{:.9e}", r.sym_linf),
                        format!("{:.9e}", r.sym_l1inf),
                        format!("{:.3e}", (r.sym_linf - r.sym_l1inf).abs()),
                    ]
                })
                .collect();
            write_text(
                &cfg,
                "norm-versions.csv",
                &io::table_to_csv(&["candidate", "sym_linf", "sym_l1inf", "difference"], &rows),
            )?;
            println!(
                "UPPER BOUND {:.6} from {:?} → {}",
                report.bound,
                report.best,
                path.display()
            );
        }
        Command::Displace { nu, a1, conj } => {
            let conj_gen = conj
                .map(|p| load_generator(&p, &cfg))
                .transpose()?;
            let scenario = scenarios::build_strip_scenario(
                nu,
                a1,
                conj_gen.as_ref(),
                cfg.grid()?,
                cfg.times()?,
                &params,
            )?;
            for w in &scenario.warnings {
                eprintln!("warning: {w}");
            }
            let path = write_json(&cfg, "displace.json", &scenario)?;
            println!(
                "displaced = {}, margin {:.4} → {}",
                scenario.displacement.displaced,
                scenario.displacement.margin,
                path.display()
            );
        }
        Command::Energy {
            region,
            family,
            version,
        } => {
            let version = parse_version(&version)?;
            let region = parse_region(&region)?;
            let grid = cfg.grid()?;
            let times = cfg.times()?;
            let candidates = parse_family(&family, grid, times)?;
            match hofer::displacement_energy_upper(&region, &candidates, version, &params) {
                Ok(cert) => {
                    let path = write_json(&cfg, "energy.json", &cert)?;
                    write_text(&cfg, "energy-candidates.csv", &candidates_csv(&cert.entries))?;
                    println!(
                        "UPPER BOUND {:.6} from {:?} (margin {:.4}) → {}",
                        cert.bound,
                        cert.best,
                        cert.best_margin,
                        path.display()
                    );
                }
                Err(CoreError::NoDisplacer) => {
                    eprintln!("no candidate displaces the region");
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Weinstein {
            generator,
            dump_family,
        } => {
            let gen = load_generator(&generator, &cfg)?;
            let dparams = deform::DeformParams {
                flux_tol: cfg.flux_tol,
                ..Default::default()
            };
            match deform::weinstein_deform(&gen, &params, &dparams) {
                Ok(out) => {
                    let path = write_json(&cfg, "weinstein.json", &out.report)?;
                    io::save_isotopy(&cfg.out_dir.join("weinstein-path"), &out.ham_isotopy)?;
                    if dump_family {
                        dump_two_param_family(&cfg, "weinstein-family", &out.family)?;
                    }
                    println!(
                        "harmonic residual {:.3e}, endpoint gap {:.3e} → {}",
                        out.report.harmonic_residual,
                        out.report.endpoint_gap,
                        path.display()
                    );
                }
                Err(CoreError::FluxNotZero { value, tol }) => {
                    eprintln!("flux is not zero: |flux| = {value:.3e} > {tol:.3e}");
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Ldefor2 { v, levels } => {
            let v = parse_vector(&v)?;
            let grid = cfg.grid()?;
            let times = cfg.times()?;
            let dparams = deform::DeformParams::default();
            let bundles: Vec<_> = (1..=levels)
                .map(|j| {
                    let c = j as f64 / (1.0 + j as f64);
                    let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
                    let fields: Vec<torusflux::field::VectorFieldGrid> = (0..times.samples())
                        .map(|_| torusflux::field::VectorFieldGrid::constant(grid, &scaled))
                        .collect::<Result<_, _>>()?;
                    Ok(deform::ldefor2_family(&fields, &times, &dparams)?)
                })
                .collect::<Result<_>>()?;
            let mut rows = Vec::new();
            for (i, w) in bundles.windows(2).enumerate() {
                let rep = deform::ldefor2_gaps(&w[0], &w[1], &dparams)?;
                rows.push(vec![
                    format!("{}", i + 1),
                    format!("{:.6e}", rep.z_gap),
                    format!("{:.6e}", rep.y_gap),
                    format!("{:.6e}", rep.z_st_gap),
                    format!("{:.6e}", rep.v_gap),
                ]);
            }
            let csv = io::table_to_csv(&["i", "z_gap", "y_gap", "z_st_gap", "v_gap"], &rows);
            let path = write_text(&cfg, "ldefor2.csv", &csv)?;
            println!("{} consecutive gaps → {}", rows.len(), path.display());
        }
        Command::Cauchy { v, j_max } => {
            let v = parse_vector(&v)?;
            let grid = cfg.grid()?;
            let times = cfg.times()?;
            let seq: Vec<Generator> = (1..=j_max)
                .map(|j| {
                    scenarios::build_rotation(
                        &scenarios::RotationSpec::new(v.clone()).with_reparam(j),
                        grid,
                        times,
                    )
                })
                .collect::<Result<_, _>>()?;
            let report = generator::cauchy_report_gen(&seq, &params)?;
            let mut rows = Vec::new();
            for i in 0..report.d2_gaps.len() {
                rows.push(vec![
                    format!("{}", i + 1),
                    format!("{:.9e}", report.d2_gaps[i]),
                    format!("{:.9e}", report.linf_gaps[i]),
                    format!("{:.9e}", report.pushforward_gaps[i]),
                ]);
            }
            let csv = io::table_to_csv(&["i", "d2_gap", "linf_gap", "pushforward_gap"], &rows);
            let path = write_text(&cfg, "cauchy.csv", &csv)?;
            println!(
                "gaps monotone: d2 {}, pushforward {} → {}",
                report.d2_monotone,
                report.pushforward_monotone,
                path.display()
            );
        }
        Command::Verify { suite } => {
            let checks = verify::run_suite(&suite, cfg.seed)?;
            let mut rows = Vec::new();
            let mut all_ok = true;
            for c in &checks {
                all_ok &= c.passed;
                println!(
                    "{} {}: {:.3e} vs {:.3e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.threshold
                );
                rows.push(vec![
                    c.name.clone(),
                    if c.passed { "pass" } else { "fail" }.into(),
                    format!("{:.9e}", c.value),
                    format!("{:.9e}", c.threshold),
                    c.detail.clone(),
                ]);
            }
            let csv = io::table_to_csv(&["check", "status", "value", "threshold", "detail"], &rows);
            write_text(&cfg, &format!("verify-{suite}.csv"), &csv)?;
            if !all_ok {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Example { name } => return run_example(&name, &cfg),
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_region(s: &str) -> Result<Region> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["strip", nu] => Ok(Region::Strip { nu: nu.parse()? }),
        ["ball", center, radius] => Ok(Region::Ball {
            center: parse_vector(center)?,
            radius: radius.parse()?,
        }),
        _ => bail!("unknown region {s:?} (use strip:<nu> or ball:<center>:<radius>)"),
    }
}

fn parse_family(
    s: &str,
    grid: torusflux::GridSpec,
    times: torusflux::TimeGrid,
) -> Result<Vec<(String, Generator)>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["rotations", start, stop, step] => {
            let (start, stop, step): (f64, f64, f64) = (start.parse()?, stop.parse()?, step.parse()?);
            if !(step > 0.0 && stop >= start) {
                bail!("bad rotation family range");
            }
            let mut mags = Vec::new();
            let mut a = start;
            while a <= stop + 1e-12 {
                mags.push(a);
                a += step;
            }
            Ok(hofer::rotation_family(grid, times, &mags)?)
        }
        _ => bail!("unknown family {s:?} (use rotations:<start>:<stop>:<step>)"),
    }
}

fn dump_two_param_family(
    cfg: &RunConfig,
    name: &str,
    family: &deform::TwoParamFamily,
) -> Result<()> {
    // one isotopy container per s-row, t as the time axis
    for (si, row) in family.maps.iter().enumerate() {
        let path = cfg.out_dir.join(format!("{name}-s{si:03}"));
        let iso = flow::Isotopy::from_displacements(
            *family.grid(),
            family.t_times,
            row.clone(),
            &torusflux::flow::FlowParams::default(),
        )?;
        io::save_isotopy(&path, &iso)?;
    }
    Ok(())
}

fn run_example(name: &str, cfg: &RunConfig) -> Result<ExitCode> {
    let params = cfg.params();
    match name {
        "rotation" => {
            // the reparametrized rotation family and its closed-form lengths
            let grid = cfg.grid()?;
            let times = cfg.times()?;
            let v = vec![0.3, 0.4];
            let mut rows = Vec::new();
            for j in [1u32, 2, 10] {
                let gen = scenarios::build_rotation(
                    &scenarios::RotationSpec::new(v.clone()).with_reparam(j),
                    grid,
                    times,
                )?;
                let l = hofer::length_linf(&gen);
                let expect = j as f64 / (1.0 + j as f64) * 0.7;
                rows.push(vec![
                    format!("{j}"),
                    format!("{l:.12}"),
                    format!("{expect:.12}"),
                    format!("{:.3e}", (l - expect).abs()),
                ]);
            }
            let csv = io::table_to_csv(&["j", "l_inf", "closed_form", "gap"], &rows);
            let path = write_text(cfg, "example-rotation.csv", &csv)?;
            println!("rotation length table → {}", path.display());
        }
        "conjugated" => {
            let grid = cfg.grid()?;
            let times = cfg.times()?;
            let mut rng = torusflux::sampling::rng(cfg.seed);
            let conj = torusflux::sampling::random_hamiltonian_generator(
                grid, times, 1, 0.02, &mut rng,
            )?;
            let (gen, path) =
                scenarios::build_conjugated(&scenarios::RotationSpec::new(vec![0.3, 0.15]), &conj, &params)?;
            io::save_generator(&cfg.out_dir.join("conjugated-generator"), &gen)?;
            io::save_isotopy(&cfg.out_dir.join("conjugated-path"), &path)?;
            let report = serde_json::json!({
                "flux": flux::flux(&gen).harmonic_rep.coeffs(),
                "l_inf": hofer::length_linf(&gen),
                "max_osc_mu": gen.ham(0).osc(),
            });
            let out = write_json(cfg, "example-conjugated.json", &report)?;
            println!("conjugated scenario → {}", out.display());
        }
        "strip" => {
            let scenario = scenarios::build_strip_scenario(
                0.25,
                0.3,
                None,
                cfg.grid()?,
                cfg.times()?,
                &params,
            )?;
            let out = write_json(cfg, "example-strip.json", &scenario)?;
            println!(
                "strip scenario: displaced = {}, energy bound {:?} → {}",
                scenario.displacement.displaced,
                scenario.energy.as_ref().map(|c| c.bound),
                out.display()
            );
        }
        other => bail!("unknown example {other:?} (use rotation, conjugated or strip)"),
    }
    Ok(ExitCode::SUCCESS)
}
