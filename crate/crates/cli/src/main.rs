use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use distenergy::constructions::{behrend_collinear, elekes_bipartite, integer_grid, random_pointset};
use distenergy::energy::{
    bipartite_spectrum, bipartite_spectrum_quad, distinct_energy, energy_bruteforce, isosceles_count, max_codistance,
    multiplicity_spectrum, report_from_spectrum, rich_spectrum,
};
use distenergy::expansion::{
    additive_degeneracy, curve_family, decompose, expansion_energy, expansion_energy_bruteforce, image_spectrum, richness_incidence_check,
    translation_symmetry_search,
};
use distenergy::extraction::{curve_pointset, extract_subset, sampling_plan, CurveKind, SamplingVariant};
use distenergy::harness::{
    format_verify, run_experiment, verify_suite, CheckStatus, ExperimentDescriptor, GENERATORS, METRICS, REFERENCES,
};
use distenergy::incidence::{count_incidences, parse_curves};
use distenergy::local::{forbidden_configuration_scan, min_distinct_over_ksubsets};
use distenergy::polynomial::BivariatePolynomial;
use distenergy::rational::parse_rational_list;
use distenergy::{parse_point_file, parse_pointset, Caps, Error, PointSet, Rational};
use serde_json::json;

#[derive(Parser)]
#[command(name = "distenergy", version, about = "Exact distance energies, spectra and expansion experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the enumeration cap used by the chosen subcommand.
    #[arg(long, global = true)]
    cap: Option<u128>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Energies E_d of a point set, with the power-mean lower bound.
    Energy {
        file: PathBuf,
        /// Exponents, comma separated.
        #[arg(short, long, value_delimiter = ',', default_values_t = vec![2u32])]
        d: Vec<u32>,
        /// Also count 2d-tuples directly (cap: points).
        #[arg(long)]
        bruteforce: bool,
        /// Also compute E_d* over pairwise-distinct tuples (cap: tuples).
        #[arg(long)]
        distinct: bool,
    },
    /// Multiplicity spectrum, rich counts, and local-property scans.
    Spectrum {
        file: PathBuf,
        /// Cross distances to this second point set.
        #[arg(long)]
        with: Option<PathBuf>,
        /// Print k_j at dyadic thresholds instead of the spectrum.
        #[arg(long)]
        rich: bool,
        /// Fewest distinct distances over k-point subsets (cap: subsets).
        #[arg(long, value_name = "K")]
        min_distinct: Option<usize>,
        /// Forbidden-configuration scan with parameters c,d.
        #[arg(long, value_name = "C,D", value_delimiter = ',', num_args = 2)]
        forbidden: Option<Vec<u32>>,
    },
    /// Random subset with few repeated distances and no isosceles triple.
    Extract {
        file: PathBuf,
        #[arg(long, default_value = "plane-E5")]
        variant: SamplingVariant,
        #[arg(long, default_value = "1")]
        c: Rational,
    },
    /// Write a constructed point set.
    Construct {
        #[arg(value_enum)]
        kind: ConstructKind,
        #[arg(short, long)]
        n: Option<u64>,
        /// Line points for `elekes`.
        #[arg(short, long)]
        m: Option<u64>,
        /// Coordinate range for `random`.
        #[arg(long, default_value_t = 10)]
        range: i64,
        /// Largest denominator for `random`.
        #[arg(long, default_value_t = 1)]
        den: i64,
        /// Curve for `curve`: line, parabola or circle.
        #[arg(long, default_value = "parabola")]
        curve: CurveKind,
    },
    /// Expansion of a bivariate polynomial on a grid A x B.
    Expand {
        #[arg(value_enum)]
        action: ExpandAction,
        /// The polynomial, e.g. "x^2 + x y".
        #[arg(short, long)]
        f: BivariatePolynomial,
        /// Comma-separated rationals.
        #[arg(short, long, default_value = "")]
        a: String,
        #[arg(short, long, default_value = "")]
        b: String,
        /// Richness threshold for `family`.
        #[arg(short, long, default_value_t = 1)]
        j: u64,
        /// Check E_f by counting quadruples (cap: tuples).
        #[arg(long)]
        bruteforce: bool,
    },
    /// Point/curve incidences.
    Incidence { points: PathBuf, curves: PathBuf },
    /// Run an experiment descriptor (JSON).
    Experiment {
        descriptor: Option<PathBuf>,
        /// List registered generators, metrics and reference formulas.
        #[arg(long)]
        list: bool,
    },
    /// Run every exact invariant check (cap: sets all caps).
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructKind {
    Grid,
    Behrend,
    Random,
    Curve,
    Elekes,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpandAction {
    Energy,
    Spectrum,
    Degeneracy,
    Decompose,
    Shifts,
    Family,
}

enum Failure {
    Lib(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn points(path: &Path) -> Result<PointSet, Error> {
    parse_pointset(&read(path)?)
}

fn rationals(text: &str) -> Result<Vec<Rational>, Error> {
    if text.trim().is_empty() {
        Ok(Vec::new())
    } else {
        parse_rational_list(text)
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_energy(g: &Global, caps: &mut Caps, file: &Path, ds: &[u32], brute: bool, distinct: bool) -> Outcome {
    if let Some(c) = g.cap {
        if brute {
            caps.bruteforce_points = usize::try_from(c).unwrap_or(usize::MAX);
        } else {
            caps.tuples = c;
        }
    }
    let p = points(file)?;
    let s = multiplicity_spectrum(&p);
    let t = isosceles_count(&p);
    let codist = max_codistance(&p);
    let mut rows = Vec::new();
    for &d in ds {
        let r = report_from_spectrum(p.len(), &s, d)?;
        let bf = if brute { Some(energy_bruteforce(&p, d, caps)?) } else { None };
        let star = if distinct { Some(distinct_energy(&p, d, caps)?) } else { None };
        rows.push((r, bf, star));
    }
    Ok(match g.format {
        Format::Json => pretty(
            &rows
                .iter()
                .map(|(r, bf, star)| {
                    json!({
                        "n": r.n, "d": r.d, "D": r.distinct, "energy": r.energy.to_string(),
                        "holder_lower": r.holder_lower.to_string(), "max_m": r.max_multiplicity,
                        "t": t, "max_codistance": codist,
                        "bruteforce": bf.as_ref().map(|v| v.to_string()),
                        "distinct_energy": star.as_ref().map(|v| v.to_string()),
                    })
                })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut out = String::from("n,d,D,E,holder_lower,max_m,t,max_codistance");
            out.push_str(if brute { ",E_bruteforce" } else { "" });
            out.push_str(if distinct { ",E_star\n" } else { "\n" });
            for (r, bf, star) in &rows {
                write!(out, "{},{},{},{},{},{},{},{}", r.n, r.d, r.distinct, r.energy, r.holder_lower, r.max_multiplicity, t, codist)
                    .unwrap();
                if let Some(v) = bf {
                    write!(out, ",{v}").unwrap();
                }
                if let Some(v) = star {
                    write!(out, ",{v}").unwrap();
                }
                out.push('\n');
            }
            out
        }
    })
}

fn cmd_spectrum(
    g: &Global,
    caps: &mut Caps,
    file: &Path,
    with: Option<&Path>,
    rich: bool,
    min_distinct: Option<usize>,
    forbidden: Option<&[u32]>,
) -> Outcome {
    if let Some(c) = g.cap {
        caps.subsets = c;
    }
    let pf = parse_point_file(&read(file)?)?;
    let s = match (with, pf.quads.is_empty()) {
        (Some(other), true) => bipartite_spectrum(&pf.points, &points(other)?),
        (None, false) => bipartite_spectrum_quad(&pf.points, &pf.quads)?,
        (None, true) => multiplicity_spectrum(&pf.points),
        (Some(_), false) => return Err(Error::InvalidArgument("--with cannot be combined with `x sqrt ysq` points".into()).into()),
    };
    if let Some(k) = min_distinct {
        let r = min_distinct_over_ksubsets(&pf.points, k, caps)?;
        return Ok(match g.format {
            Format::Json => pretty(&r),
            Format::Csv => {
                let w: Vec<String> = r.witness.iter().map(|p| format!("{p}")).collect();
                format!("k,min_distinct,witness\n{k},{},\"{}\"\n", r.min_distinct, w.join(" "))
            }
        });
    }
    if let Some(cd) = forbidden {
        let r = forbidden_configuration_scan(&pf.points, &s, cd[0], cd[1])?;
        return Ok(match g.format {
            Format::Json => pretty(&r),
            Format::Csv => format!(
                "max_codistance,codistance_threshold,codistance_violation,max_pair_count,pair_ceiling,pair_violation\n{},{},{},{},{},{}\n",
                r.max_codistance, r.codistance_threshold, r.codistance_violation, r.max_pair_count, r.pair_ceiling, r.pair_violation
            ),
        });
    }
    if rich {
        let r = rich_spectrum(&s);
        return Ok(match g.format {
            Format::Json => pretty(&r),
            Format::Csv => {
                let mut out = String::from("j,k_j\n");
                for (j, k) in r.thresholds.iter().zip(&r.counts) {
                    writeln!(out, "{j},{k}").unwrap();
                }
                out
            }
        });
    }
    Ok(match g.format {
        Format::Json => pretty(&s),
        Format::Csv => s.to_csv(),
    })
}

fn cmd_extract(g: &Global, file: &Path, variant: SamplingVariant, c: &Rational) -> Outcome {
    let p = points(file)?;
    let plan = sampling_plan(p.len() as u64, variant, c, g.seed)?;
    let r = extract_subset(&p, variant.max_pairs(), &plan)?;
    Ok(match g.format {
        Format::Json => pretty(&json!({ "plan": plan, "result": r })),
        Format::Csv => {
            let mut out = format!(
                "# variant={variant} p={} sampled={} removed_isosceles={} removed_multiplicity={} size={} max_pair_multiplicity={}\n",
                plan.p,
                r.sampled,
                r.removed_isosceles,
                r.removed_multiplicity,
                r.subset.len(),
                r.max_pair_multiplicity
            );
            out.push_str(&r.subset.to_file_string());
            out
        }
    })
}

fn need(v: Option<u64>, name: &str) -> Result<u64, Error> {
    v.ok_or_else(|| Error::InvalidArgument(format!("this construction needs -{name}")))
}

fn cmd_construct(g: &Global, kind: ConstructKind, n: Option<u64>, m: Option<u64>, range: i64, den: i64, curve: CurveKind) -> Outcome {
    let as_usize = |v: u64| usize::try_from(v).map_err(|_| Error::InvalidArgument(format!("{v} is too large")));
    let set = match kind {
        ConstructKind::Grid => integer_grid(as_usize(need(n, "n")?)?),
        ConstructKind::Behrend => behrend_collinear(need(n, "n")?),
        ConstructKind::Random => random_pointset(as_usize(need(n, "n")?)?, range, den, g.seed)?,
        ConstructKind::Curve => curve_pointset(curve, as_usize(need(n, "n")?)?)?,
        ConstructKind::Elekes => {
            let m = need(m, "m")?;
            let c = elekes_bipartite(m, n.unwrap_or(4 * m.saturating_pow(3)))?;
            return Ok(match g.format {
                Format::Json => pretty(&c),
                Format::Csv => c.to_file_string(),
            });
        }
    };
    Ok(match g.format {
        Format::Json => pretty(&set),
        Format::Csv => set.to_file_string(),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_expand(
    g: &Global,
    caps: &mut Caps,
    action: ExpandAction,
    f: &BivariatePolynomial,
    a: &str,
    b: &str,
    j: u64,
    brute: bool,
) -> Outcome {
    if let Some(c) = g.cap {
        match action {
            ExpandAction::Energy => caps.tuples = c,
            ExpandAction::Decompose => caps.decompose_degree = u32::try_from(c).unwrap_or(u32::MAX),
            ExpandAction::Shifts => caps.structure = c,
            ExpandAction::Family => caps.family = c,
            ExpandAction::Spectrum | ExpandAction::Degeneracy => {}
        }
    }
    let (a, b) = (rationals(a)?, rationals(b)?);
    let json_mode = g.format == Format::Json;
    Ok(match action {
        ExpandAction::Energy => {
            let s = image_spectrum(f, &a, &b);
            let e = expansion_energy(&s);
            let bf = if brute { Some(expansion_energy_bruteforce(f, &a, &b, caps)?) } else { None };
            if json_mode {
                pretty(&json!({"E_f": e.to_string(), "D": s.distinct(), "max_m": s.max_multiplicity(), "bruteforce": bf}))
            } else {
                let extra = bf.map(|v| format!(",{v}")).unwrap_or_default();
                format!("E_f,D,max_m{}\n{e},{},{}{extra}\n", if brute { ",E_f_bruteforce" } else { "" }, s.distinct(), s.max_multiplicity())
            }
        }
        ExpandAction::Spectrum => {
            let s = image_spectrum(f, &a, &b);
            if json_mode {
                pretty(&s)
            } else {
                s.to_csv().replacen("sqdist", "value", 1)
            }
        }
        ExpandAction::Degeneracy => {
            let w = additive_degeneracy(f)?;
            if json_mode {
                pretty(&w)
            } else {
                match w {
                    Some(w) => format!("degenerate,a,b,h\ntrue,{},{},{}\n", w.a, w.b, w.h),
                    None => "degenerate,a,b,h\nfalse,,,\n".into(),
                }
            }
        }
        ExpandAction::Decompose => {
            let d = decompose(f, caps.decompose_degree)?;
            if json_mode {
                pretty(&d)
            } else {
                match d {
                    Some(d) => format!("decomposable,outer,inner\ntrue,{},{}\n", d.outer, d.inner),
                    None => "decomposable,outer,inner\nfalse,,\n".into(),
                }
            }
        }
        ExpandAction::Shifts => {
            let shifts = translation_symmetry_search(f, &a, &b, caps)?;
            if json_mode {
                pretty(&shifts)
            } else {
                let mut out = String::from("alpha,beta\n");
                for (x, y) in shifts {
                    writeln!(out, "{x},{y}").unwrap();
                }
                out
            }
        }
        ExpandAction::Family => {
            let fam = curve_family(f, &a, &b, j, caps)?;
            let rich = richness_incidence_check(&fam, caps)?;
            if json_mode {
                pretty(&json!({"family": fam, "richness": rich}))
            } else {
                format!(
                    "j,k_j,members,distinct,collisions,incidences,required,holds\n{j},{},{},{},{},{},{},{}\n",
                    fam.k_j(),
                    fam.members.len(),
                    fam.distinct,
                    fam.collisions,
                    rich.incidences,
                    rich.required,
                    rich.holds
                )
            }
        }
    })
}

fn cmd_incidence(g: &Global, caps: &mut Caps, pts: &Path, curves: &Path) -> Outcome {
    if let Some(c) = g.cap {
        caps.evaluations = c;
    }
    let p = points(pts)?;
    let cs = parse_curves(&read(curves)?)?;
    let r = count_incidences(&p, &cs, caps)?;
    Ok(match g.format {
        Format::Json => pretty(&r),
        Format::Csv => {
            let mut out =
                format!("# points={} curves={} incidences={} k22_free={}\ncurve,incidences\n", p.len(), cs.len(), r.count, r.k22_free);
            for (i, c) in r.per_curve.iter().enumerate() {
                writeln!(out, "{i},{c}").unwrap();
            }
            out
        }
    })
}

fn cmd_experiment(g: &Global, caps: &mut Caps, desc: Option<&Path>, list: bool) -> Result<(String, bool), Failure> {
    if let Some(c) = g.cap {
        caps.evaluations = c;
    }
    if list {
        let mut out = String::from("# generators\n");
        for (id, params, about) in GENERATORS {
            writeln!(out, "{id} [{}]: {about}", params.join(", ")).unwrap();
        }
        out.push_str("# metrics\n");
        for (id, about) in METRICS {
            writeln!(out, "{id}: {about}").unwrap();
        }
        out.push_str("# references\n");
        for (id, _) in REFERENCES {
            writeln!(out, "{id}").unwrap();
        }
        return Ok((out, false));
    }
    let path = desc.ok_or_else(|| Error::InvalidArgument("experiment needs a descriptor file or --list".into()))?;
    let d = ExperimentDescriptor::from_json(&read(path)?)?;
    let r = run_experiment(&d, caps)?;
    let capped = r.rows.iter().any(|row| row.status.starts_with("cap exceeded"));
    let out = match g.format {
        Format::Json => {
            let mut s = r.to_json();
            s.push('\n');
            s
        }
        Format::Csv => r.to_csv(),
    };
    Ok((out, capped))
}

fn cmd_verify(g: &Global, caps: &mut Caps) -> Outcome {
    if let Some(c) = g.cap {
        let small = usize::try_from(c).unwrap_or(usize::MAX);
        *caps = Caps {
            bruteforce_points: small,
            subsets: c,
            tuples: c,
            evaluations: c,
            family: c,
            structure: c,
            decompose_degree: u32::try_from(c).unwrap_or(u32::MAX),
        };
    }
    let rows = verify_suite(caps, distenergy::energy::energy);
    let text = match g.format {
        Format::Json => pretty(&rows),
        Format::Csv => format_verify(&rows),
    };
    if rows.iter().all(|r| r.status == CheckStatus::Pass) {
        Ok(text)
    } else {
        print!("{text}");
        Err(Failure::Checks)
    }
}

fn run(cli: Cli) -> Result<(String, bool), Failure> {
    let g = &cli.global;
    let mut caps = Caps::default();
    let text = match &cli.command {
        Command::Energy { file, d, bruteforce, distinct } => cmd_energy(g, &mut caps, file, d, *bruteforce, *distinct)?,
        Command::Spectrum { file, with, rich, min_distinct, forbidden } => {
            cmd_spectrum(g, &mut caps, file, with.as_deref(), *rich, *min_distinct, forbidden.as_deref())?
        }
        Command::Extract { file, variant, c } => cmd_extract(g, file, *variant, c)?,
        Command::Construct { kind, n, m, range, den, curve } => cmd_construct(g, *kind, *n, *m, *range, *den, *curve)?,
        Command::Expand { action, f, a, b, j, bruteforce } => cmd_expand(g, &mut caps, *action, f, a, b, *j, *bruteforce)?,
        Command::Incidence { points, curves } => cmd_incidence(g, &mut caps, points, curves)?,
        Command::Experiment { descriptor, list } => return cmd_experiment(g, &mut caps, descriptor.as_deref(), *list),
        Command::Verify => cmd_verify(g, &mut caps)?,
    };
    Ok((text, false))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok((text, capped)) => {
            print!("{text}");
            if capped {
                eprintln!("error: some rows exceeded a cap");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Checks) => {
            eprintln!("error: some checks failed");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cap_exceeded() { 3 } else { 2 })
        }
    }
}
