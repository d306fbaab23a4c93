//! Experiment descriptors, parameter sweeps, and the invariant suite.
//!
//! A descriptor names a generator, the metrics to measure, one swept
//! parameter and a list of seeds. Every (value, seed) pair becomes one row;
//! rows are computed in parallel and sorted by `(value, seed)` before output,
//! so reports are byte-identical for any thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::caps::Caps;
use crate::checks::{self, CheckOutcome};
use crate::constructions::{behrend_collinear, elekes_bipartite, integer_grid, random_pointset};
use crate::energy::{energy, isosceles_count, max_codistance, multiplicity_spectrum, EnergyFn, MultiplicitySpectrum};
use crate::error::{Error, Result};
use crate::expansion::{expansion_energy, image_spectrum};
use crate::extraction::{curve_pointset, extract_subset, sampling_plan, CurveKind, SamplingVariant};
use crate::geometry::PointSet;
use crate::incidence::{count_incidences, PlaneCurve};
use crate::polynomial::BivariatePolynomial;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub id: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDescriptor {
    pub name: String,
    pub generator: GeneratorSpec,
    pub measurements: Vec<String>,
    pub sweep: Sweep,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub reference: Option<String>,
    /// Metric divided by the reference; defaults to the first measurement.
    #[serde(default)]
    pub ratio_metric: Option<String>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

impl ExperimentDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(Some(e.line()), e.to_string()))
    }
}

/// A registered measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    N,
    M,
    Distinct,
    Energy(u32),
    Isosceles,
    MaxMultiplicity,
    Rich(u64),
    MaxCodistance,
    SubsetSize,
    ExpansionEnergy,
    Incidences,
}

/// Metric ids with the quantity each one reports.
pub const METRICS: &[(&str, &str)] = &[
    ("n", "size parameter of the instance (points, |A|, plane points, curves)"),
    ("m", "second size parameter (line points, |B|, incidence points)"),
    ("D", "distinct distances, cross distances, or |f(A,B)|"),
    ("E<d>", "distance energy E_d from the multiplicity spectrum, e.g. E2"),
    ("t", "isosceles triples"),
    ("max_m", "largest multiplicity in the spectrum"),
    ("k<j>", "number of values with multiplicity at least j, e.g. k4"),
    ("max_codistance", "most points at one distance from a single point"),
    ("subset_size", "size of the extracted subset (params: variant, c)"),
    ("E_f", "expansion energy of f on A x B"),
    ("incidences", "point/curve incidences"),
];

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let number = |rest: &str| rest.trim_start_matches('_').parse::<u64>().ok();
        Ok(match s {
            "n" => Metric::N,
            "m" => Metric::M,
            "D" => Metric::Distinct,
            "t" => Metric::Isosceles,
            "max_m" => Metric::MaxMultiplicity,
            "max_codistance" => Metric::MaxCodistance,
            "subset_size" => Metric::SubsetSize,
            "E_f" => Metric::ExpansionEnergy,
            "incidences" => Metric::Incidences,
            _ => match (s.strip_prefix('E').and_then(number), s.strip_prefix('k').and_then(number)) {
                (Some(d), _) if (1..=64).contains(&d) => Metric::Energy(d as u32),
                (_, Some(j)) if j >= 1 => Metric::Rich(j),
                _ => return Err(Error::invalid(format!("unknown metric '{s}'"))),
            },
        })
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::N => write!(f, "n"),
            Metric::M => write!(f, "m"),
            Metric::Distinct => write!(f, "D"),
            Metric::Energy(d) => write!(f, "E{d}"),
            Metric::Isosceles => write!(f, "t"),
            Metric::MaxMultiplicity => write!(f, "max_m"),
            Metric::Rich(j) => write!(f, "k{j}"),
            Metric::MaxCodistance => write!(f, "max_codistance"),
            Metric::SubsetSize => write!(f, "subset_size"),
            Metric::ExpansionEnergy => write!(f, "E_f"),
            Metric::Incidences => write!(f, "incidences"),
        }
    }
}

type RefFn = fn(f64, f64) -> f64;

/// Reference formulas in the instance sizes `n` and `m`; logarithms are
/// natural.
pub const REFERENCES: &[(&str, RefFn)] = &[
    ("n", |n, _| n),
    ("n^2", |n, _| n * n),
    ("n^3", |n, _| n.powi(3)),
    ("n^4", |n, _| n.powi(4)),
    ("n^3 log n", |n, _| n.powi(3) * n.ln()),
    ("n/sqrt(log n)", |n, _| n / n.ln().sqrt()),
    ("n/log n", |n, _| n / n.ln()),
    ("sqrt(m n)", |n, m| (m * n).sqrt()),
    ("n^(4/3)", |n, _| n.powf(4.0 / 3.0)),
    ("n^2.137", |n, _| n.powf(2.137)),
    ("n^(8/3)", |n, _| n.powf(8.0 / 3.0)),
    ("n^(11/3)", |n, _| n.powf(11.0 / 3.0)),
    ("n^(48/7) log^(13/7) n", |n, _| n.powf(48.0 / 7.0) * n.ln().powf(13.0 / 7.0)),
    ("n^(30/7) log^(9/7) n", |n, _| n.powf(30.0 / 7.0) * n.ln().powf(9.0 / 7.0)),
    ("m^(2/3) n^(2/3) + m + n", |n, m| (m * n).powf(2.0 / 3.0) + m + n),
    ("m^(6/11) n^(9/11) + m^(2/3) n^(2/3) + m + n", |n, m| m.powf(6.0 / 11.0) * n.powf(9.0 / 11.0) + (m * n).powf(2.0 / 3.0) + m + n),
    ("m^(6/11) n^(9/11) log^(2/11) n + m^(2/3) n^(2/3) + m + n", |n, m| {
        m.powf(6.0 / 11.0) * n.powf(9.0 / 11.0) * n.ln().powf(2.0 / 11.0) + (m * n).powf(2.0 / 3.0) + m + n
    }),
];

fn reference_fn(id: &str) -> Result<RefFn> {
    REFERENCES
        .iter()
        .find(|(name, _)| *name == id)
        .map(|&(_, f)| f)
        .ok_or_else(|| Error::invalid(format!("unknown reference formula '{id}'")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GeneratorKind {
    Grid,
    Behrend,
    Random,
    Curve,
    Elekes,
    Expansion,
    Circles,
}

/// Generator ids with their parameters.
pub const GENERATORS: &[(&str, &[&str], &str)] = &[
    ("grid", &["n"], "integer grid with n points"),
    ("behrend", &["N"], "3-AP-free subset of [1, N] placed on the x-axis"),
    ("random", &["n", "range", "den"], "n random points u/v with |u| <= range*v, v <= den"),
    ("curve", &["n", "kind"], "n points on a line, parabola or circle"),
    ("elekes", &["m", "n"], "m line points and n >= 4m^3 plane points (n defaults to 4m^3)"),
    ("expansion", &["f", "size", "set"], "f on A = B = a set of the given size (interval, squares, random)"),
    ("circles", &["points", "radii"], "grid points against circles at every grid point with squared radii 1..radii"),
];

impl GeneratorKind {
    fn parse(id: &str) -> Result<Self> {
        Ok(match id {
            "grid" => GeneratorKind::Grid,
            "behrend" => GeneratorKind::Behrend,
            "random" => GeneratorKind::Random,
            "curve" => GeneratorKind::Curve,
            "elekes" => GeneratorKind::Elekes,
            "expansion" => GeneratorKind::Expansion,
            "circles" => GeneratorKind::Circles,
            _ => return Err(Error::invalid(format!("unknown generator '{id}'"))),
        })
    }

    fn params(self) -> &'static [&'static str] {
        let idx = self as usize;
        GENERATORS[idx].1
    }

    fn supports(self, metric: Metric) -> bool {
        use Metric::*;
        match self {
            GeneratorKind::Grid | GeneratorKind::Behrend | GeneratorKind::Random | GeneratorKind::Curve => {
                matches!(metric, N | Distinct | Energy(_) | Isosceles | MaxMultiplicity | Rich(_) | MaxCodistance | SubsetSize)
            }
            GeneratorKind::Elekes => matches!(metric, N | M | Distinct | Energy(_) | MaxMultiplicity | Rich(_)),
            GeneratorKind::Expansion => matches!(metric, N | M | Distinct | ExpansionEnergy | MaxMultiplicity | Rich(_)),
            GeneratorKind::Circles => matches!(metric, N | M | Incidences),
        }
    }
}

enum Instance {
    Points(PointSet),
    Spectrum { n: u64, m: u64, spectrum: MultiplicitySpectrum },
    Incidence { points: PointSet, curves: Vec<PlaneCurve> },
}

struct Params<'a>(&'a BTreeMap<String, Value>);

impl Params<'_> {
    fn u64(&self, key: &str, default: Option<u64>) -> Result<u64> {
        match self.0.get(key) {
            Some(v) => v.as_u64().ok_or_else(|| Error::invalid(format!("parameter '{key}' must be a nonnegative integer"))),
            None => default.ok_or_else(|| Error::invalid(format!("missing parameter '{key}'"))),
        }
    }

    fn str<'b>(&'b self, key: &str, default: &'b str) -> Result<&'b str> {
        match self.0.get(key) {
            Some(Value::String(s)) => Ok(s),
            Some(_) => Err(Error::invalid(format!("parameter '{key}' must be a string"))),
            None => Ok(default),
        }
    }
}

fn usize_param(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::invalid(format!("{v} is too large")))
}

fn build(kind: GeneratorKind, params: &Params, seed: u64) -> Result<Instance> {
    Ok(match kind {
        GeneratorKind::Grid => Instance::Points(integer_grid(usize_param(params.u64("n", None)?)?)),
        GeneratorKind::Behrend => Instance::Points(behrend_collinear(params.u64("N", None)?)),
        GeneratorKind::Random => {
            let range = params.u64("range", Some(10))? as i64;
            let den = params.u64("den", Some(1))? as i64;
            Instance::Points(random_pointset(usize_param(params.u64("n", None)?)?, range, den.max(1), seed)?)
        }
        GeneratorKind::Curve => {
            let kind: CurveKind = params.str("kind", "parabola")?.parse()?;
            Instance::Points(curve_pointset(kind, usize_param(params.u64("n", None)?)?)?)
        }
        GeneratorKind::Elekes => {
            let m = params.u64("m", None)?;
            let n = params.u64("n", Some(4 * m.saturating_pow(3)))?;
            let c = elekes_bipartite(m, n)?;
            Instance::Spectrum { n, m, spectrum: c.cross_spectrum() }
        }
        GeneratorKind::Expansion => {
            let f: BivariatePolynomial = params.str("f", "x^2 + x y + y^2")?.parse()?;
            let size = params.u64("size", None)?;
            let set = expansion_set(params.str("set", "interval")?, size, seed)?;
            let spectrum = image_spectrum(&f, &set, &set);
            Instance::Spectrum { n: size, m: size, spectrum }
        }
        GeneratorKind::Circles => {
            let points = integer_grid(usize_param(params.u64("points", None)?)?);
            let radii = params.u64("radii", Some(3))?;
            let mut curves = Vec::with_capacity(points.len() * radii as usize);
            for c in points.points() {
                for r in 1..=radii {
                    curves.push(PlaneCurve::circle(&c.x, &c.y, &Rational::from(r))?);
                }
            }
            Instance::Incidence { points, curves }
        }
    })
}

fn expansion_set(kind: &str, size: u64, seed: u64) -> Result<Vec<Rational>> {
    let size_i = i64::try_from(size).map_err(|_| Error::invalid("set size too large"))?;
    Ok(match kind {
        "interval" => (1..=size_i).map(Rational::from).collect(),
        "squares" => (1..=size_i).map(|i| Rational::from(i * i)).collect(),
        "random" => {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut pool: Vec<i64> = (-4 * size_i..=4 * size_i).collect();
            pool.shuffle(&mut rng);
            pool.truncate(size as usize);
            pool.sort_unstable();
            pool.into_iter().map(Rational::from).collect()
        }
        _ => return Err(Error::invalid(format!("unknown set '{kind}' (interval, squares, random)"))),
    })
}

/// Exact value of one metric: an integer.
fn measure(
    metric: Metric,
    inst: &Instance,
    spectrum: &mut Option<MultiplicitySpectrum>,
    params: &Params,
    seed: u64,
    caps: &Caps,
) -> Result<BigUint> {
    let small = |v: usize| BigUint::from(v);
    let spec = |spectrum: &mut Option<MultiplicitySpectrum>| -> MultiplicitySpectrum {
        spectrum
            .get_or_insert_with(|| match inst {
                Instance::Points(p) => multiplicity_spectrum(p),
                Instance::Spectrum { spectrum, .. } => spectrum.clone(),
                Instance::Incidence { .. } => MultiplicitySpectrum::default(),
            })
            .clone()
    };
    Ok(match (metric, inst) {
        (Metric::N, Instance::Points(p)) => small(p.len()),
        (Metric::N, Instance::Spectrum { n, .. }) => BigUint::from(*n),
        (Metric::M, Instance::Spectrum { m, .. }) => BigUint::from(*m),
        (Metric::N, Instance::Incidence { curves, .. }) => small(curves.len()),
        (Metric::M, Instance::Incidence { points, .. }) => small(points.len()),
        (Metric::Distinct, _) => small(spec(spectrum).distinct()),
        (Metric::Energy(d), Instance::Points(_) | Instance::Spectrum { .. }) => energy(&spec(spectrum), d)?,
        (Metric::ExpansionEnergy, Instance::Spectrum { .. }) => expansion_energy(&spec(spectrum)),
        (Metric::MaxMultiplicity, _) => BigUint::from(spec(spectrum).max_multiplicity()),
        (Metric::Rich(j), _) => small(spec(spectrum).count_at_least(j)),
        (Metric::Isosceles, Instance::Points(p)) => BigUint::from(isosceles_count(p)),
        (Metric::MaxCodistance, Instance::Points(p)) => small(max_codistance(p)),
        (Metric::SubsetSize, Instance::Points(p)) => {
            let variant: SamplingVariant = params.str("variant", "plane-E5")?.parse()?;
            let c: Rational = params.str("c", "1")?.parse()?;
            let plan = sampling_plan(p.len() as u64, variant, &c, seed)?;
            small(extract_subset(p, variant.max_pairs(), &plan)?.subset.len())
        }
        (Metric::Incidences, Instance::Incidence { points, curves }) => BigUint::from(count_incidences(points, curves, caps)?.count),
        _ => return Err(Error::invalid(format!("metric {metric} does not apply to this generator"))),
    })
}

fn instance_sizes(inst: &Instance) -> (f64, f64) {
    match inst {
        Instance::Points(p) => (p.len() as f64, 0.0),
        Instance::Spectrum { n, m, .. } => (*n as f64, *m as f64),
        Instance::Incidence { points, curves } => (curves.len() as f64, points.len() as f64),
    }
}

/// One output row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub value: u64,
    pub seed: u64,
    /// Exact integers as decimal strings, in measurement order; empty when
    /// the row failed.
    pub metrics: Vec<String>,
    pub reference: Option<String>,
    pub ratio: Option<String>,
    /// `ok`, or the error that stopped this row (cap violations included).
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub param: String,
    pub measurements: Vec<String>,
    pub reference: Option<String>,
    pub ratio_metric: String,
    pub rows: Vec<ReportRow>,
}

/// `x` with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&exp) {
        format!("{x:.5e}")
    } else {
        format!("{:.*}", (5 - exp).max(0) as usize, x)
    }
}

struct Validated {
    kind: GeneratorKind,
    metrics: Vec<Metric>,
    ratio_index: usize,
    reference: Option<RefFn>,
}

fn validate(desc: &ExperimentDescriptor) -> Result<Validated> {
    let kind = GeneratorKind::parse(&desc.generator.id)?;
    let allowed = kind.params();
    for key in desc.generator.params.keys().chain(std::iter::once(&desc.sweep.param)) {
        // extraction parameters are read by the subset_size metric
        if !allowed.contains(&key.as_str()) && key != "variant" && key != "c" {
            return Err(Error::invalid(format!(
                "generator '{}' has no parameter '{key}' (expected one of {allowed:?})",
                desc.generator.id
            )));
        }
    }
    if desc.sweep.values.is_empty() {
        return Err(Error::invalid("sweep needs at least one value"));
    }
    if desc.seeds.is_empty() {
        return Err(Error::invalid("seed list is empty"));
    }
    if desc.measurements.is_empty() {
        return Err(Error::invalid("no measurements requested"));
    }
    let metrics: Vec<Metric> = desc.measurements.iter().map(|m| m.parse()).collect::<Result<_>>()?;
    if let Some(bad) = metrics.iter().find(|m| !kind.supports(**m)) {
        return Err(Error::invalid(format!("metric {bad} does not apply to generator '{}'", desc.generator.id)));
    }
    let ratio_index = match &desc.ratio_metric {
        None => 0,
        Some(r) => {
            let r: Metric = r.parse()?;
            metrics.iter().position(|m| *m == r).ok_or_else(|| Error::invalid(format!("ratio metric {r} is not among the measurements")))?
        }
    };
    let reference = desc.reference.as_deref().map(reference_fn).transpose()?;
    Ok(Validated { kind, metrics, ratio_index, reference })
}

fn run_row(desc: &ExperimentDescriptor, v: &Validated, value: u64, seed: u64, caps: &Caps) -> ReportRow {
    let mut params = desc.generator.params.clone();
    params.insert(desc.sweep.param.clone(), Value::from(value));
    let params = Params(&params);
    let result = build(v.kind, &params, seed).and_then(|inst| {
        let mut spectrum = None;
        let values = v.metrics.iter().map(|&m| measure(m, &inst, &mut spectrum, &params, seed, caps)).collect::<Result<Vec<_>>>()?;
        Ok((instance_sizes(&inst), values))
    });
    match result {
        Ok(((n, m), values)) => {
            let reference = v.reference.map(|f| f(n, m));
            let ratio = reference.map(|r| values[v.ratio_index].to_f64().unwrap_or(f64::INFINITY) / r);
            ReportRow {
                value,
                seed,
                metrics: values.iter().map(BigUint::to_string).collect(),
                reference: reference.map(format_sig6),
                ratio: ratio.map(format_sig6),
                status: "ok".into(),
            }
        }
        Err(e) => ReportRow { value, seed, metrics: Vec::new(), reference: None, ratio: None, status: e.to_string() },
    }
}

/// Runs every (sweep value, seed) pair. Descriptor errors fail the whole run;
/// errors while building or measuring one instance (cap violations included)
/// are recorded in that row's status.
pub fn run_experiment(desc: &ExperimentDescriptor, caps: &Caps) -> Result<Report> {
    let v = validate(desc)?;
    let mut jobs: Vec<(u64, u64)> = desc.sweep.values.iter().flat_map(|&x| desc.seeds.iter().map(move |&s| (x, s))).collect();
    jobs.sort_unstable();
    jobs.dedup();
    let rows: Vec<ReportRow> = jobs.par_iter().map(|&(x, s)| run_row(desc, &v, x, s, caps)).collect();
    Ok(Report {
        name: desc.name.clone(),
        param: desc.sweep.param.clone(),
        measurements: v.metrics.iter().map(Metric::to_string).collect(),
        reference: desc.reference.clone(),
        ratio_metric: v.metrics[v.ratio_index].to_string(),
        rows,
    })
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.param.clone(), "seed".into()];
        header.extend(self.measurements.iter().cloned());
        header.extend(["reference".into(), format!("ratio_{}", self.ratio_metric), "status".into()]);
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut fields = vec![r.value.to_string(), r.seed.to_string()];
            if r.metrics.is_empty() {
                fields.extend(std::iter::repeat_n(String::new(), self.measurements.len()));
            } else {
                fields.extend(r.metrics.iter().cloned());
            }
            fields.push(r.reference.clone().unwrap_or_default());
            fields.push(r.ratio.clone().unwrap_or_default());
            fields.push(r.status.clone());
            w.write_record(&fields).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `true` when some row stopped on an error.
    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| r.status != "ok")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub module: String,
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

type Job<'a> = (&'static str, &'static str, Box<dyn Fn() -> Result<CheckOutcome> + Send + Sync + 'a>);

/// Every exact invariant at desk scale. `energy_fn` is the energy under
/// test, normally [`crate::energy::energy`].
pub fn verify_suite(caps: &Caps, energy_fn: EnergyFn) -> Vec<VerifyRow> {
    let sets = || -> Result<Vec<PointSet>> {
        let mut v: Vec<PointSet> = [4, 16, 64, 256].iter().map(|&n| integer_grid(n)).collect();
        v.push(behrend_collinear(300));
        v.push(curve_pointset(CurveKind::Parabola, 40)?);
        for s in 0..4 {
            v.push(random_pointset(30 + 10 * s, 4, 1 + (s % 2) as i64, s as u64)?);
        }
        Ok(v)
    };
    let spectra = || -> Result<Vec<(String, MultiplicitySpectrum)>> {
        Ok(sets()?.into_iter().map(|p| (p.label.clone(), multiplicity_spectrum(&p))).collect())
    };
    let jobs: Vec<Job> = vec![
        ("exact-geometry", "sqdist symmetric, zero exactly on equal points", Box::new(|| Ok(checks::sqdist_basics(500, 1)))),
        ("exact-geometry", "spectrum invariant under rigid motions and scaling", Box::new(|| checks::spectrum_invariance(20, 25, 2))),
        (
            "energy",
            "spectrum energy equals the tuple-count oracle",
            Box::new(move || checks::oracle_equivalence(energy_fn, 40, 9, &[1, 2, 3], caps, 3)),
        ),
        ("energy", "spectrum totals", Box::new(|| checks::spectrum_totals(40, 4))),
        ("energy", "Holder lower bound", Box::new(move || checks::holder_lower(energy_fn, &sets()?, &[2, 3, 4]))),
        ("energy", "bipartite Holder lower bound", Box::new(move || checks::bipartite_holder(energy_fn, 40, &[2, 3, 4], 5))),
        ("energy", "E_d* <= E_d and E_d monotone in d", Box::new(move || checks::energy_orderings(energy_fn, 12, caps, 6))),
        ("energy", "isosceles count matches triple scan", Box::new(|| checks::isosceles_oracle(30, 7))),
        ("energy", "dyadic energy bracket and k_j monotone", Box::new(move || checks::dyadic_bracket(energy_fn, &sets()?, &[2, 3, 4]))),
        ("local-properties", "intersection lemma", Box::new(move || checks::intersection_lemma(40, 16, &[2, 3], caps, 8))),
        (
            "constructions",
            "Behrend sets AP-free, collinear sets isosceles-free",
            Box::new(move || checks::behrend_pipeline(&[10, 100, 1000], 80, caps)),
        ),
        ("constructions", "Elekes construction distance bounds", Box::new(|| checks::elekes_bounds(&[2, 3, 4]))),
        ("constructions", "grid distinct-distance density decreasing", Box::new(|| Ok(checks::grid_density(&[16, 64, 256, 1024])))),
        (
            "subset-extraction",
            "extracted subsets valid, reproducible, nondecreasing",
            Box::new(|| checks::extraction_runs(&[100, 400], 5, &[SamplingVariant::PlaneE5, SamplingVariant::PlaneE3])),
        ),
        ("subset-extraction", "interpolation inequalities", Box::new(move || checks::interpolation(&spectra()?))),
        (
            "subset-extraction",
            "curve energy ratios finite",
            Box::new(move || checks::curve_energy_ratios(&[20, 40, 80], &[2, 3], energy_fn)),
        ),
        ("expansion", "E_f matches quadruple count", Box::new(move || checks::expansion_energy_oracle(25, 8, caps, 9))),
        ("expansion", "additive degeneracy suite", Box::new(move || checks::degeneracy_suite(caps))),
        ("expansion", "decomposition suite", Box::new(move || checks::decomposition_suite(caps))),
        ("expansion", "random compositions decompose", Box::new(move || checks::random_compositions(25, caps, 10))),
        (
            "expansion",
            "curve families distinct and rich",
            Box::new(move || checks::family_distinctness(&checks::family_polynomials(), 2, 5, caps, 11)),
        ),
        ("expansion", "structured curve families distinct and rich", Box::new(move || checks::structured_families(caps))),
        ("expansion", "grid multiplicities bounded by lattice count", Box::new(|| checks::grid_multiplicity_bound(25, 12))),
        ("incidence", "axis-centred circles K22-free above the axis", Box::new(move || checks::upper_half_k22(40, caps, 13))),
        ("incidence", "lattice count bound", Box::new(|| checks::lattice_bounds(40, 14))),
        ("incidence", "incidences invariant under translation", Box::new(move || checks::incidence_translation(15, caps, 15))),
    ];
    jobs.par_iter()
        .map(|(module, name, job)| {
            let (status, detail) = match job() {
                Ok(o) => (if o.passed { CheckStatus::Pass } else { CheckStatus::Fail }, o.detail),
                Err(e) => (CheckStatus::Error, e.to_string()),
            };
            VerifyRow { module: module.to_string(), name: name.to_string(), status, detail }
        })
        .collect()
}

/// One line per check: `status  module  name  detail`.
pub fn format_verify(rows: &[VerifyRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let status = match r.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Error => "ERROR",
        };
        out.push_str(&format!("{status:<5} {:<17} {}: {}\n", r.module, r.name, r.detail));
    }
    out
}
