//! One line per acceptance criterion, each at its stated scale.
//!
//! Run with `cargo test -p distenergy --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use distenergy::checks::{self, CheckOutcome};
use distenergy::constructions::{behrend_collinear, elekes_bipartite, integer_grid, random_pointset};
use distenergy::energy::{distinct_energy, energy, isosceles_count, multiplicity_spectrum, MultiplicitySpectrum};
use distenergy::extraction::SamplingVariant;
use distenergy::harness::{format_verify, run_experiment, verify_suite, ExperimentDescriptor, Report};
use distenergy::{Caps, PointSet, Result};
use num_bigint::BigUint;

struct Line {
    id: u32,
    passed: bool,
    detail: String,
}

fn line(id: u32, outcome: Result<CheckOutcome>, elapsed: Duration, limit: Option<Duration>) -> Line {
    match outcome {
        Ok(o) => {
            let in_time = limit.is_none_or(|l| elapsed <= l);
            let mut detail = format!("{} ({:.1} s", o.detail, elapsed.as_secs_f64());
            if let Some(l) = limit {
                detail.push_str(&format!(", limit {} s", l.as_secs()));
            }
            detail.push(')');
            Line { id, passed: o.passed && in_time, detail }
        }
        Err(e) => Line { id, passed: false, detail: format!("error: {e}") },
    }
}

fn timed(f: impl FnOnce() -> Result<CheckOutcome>) -> (Result<CheckOutcome>, Duration) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed())
}

fn merge(parts: Vec<(&str, CheckOutcome)>) -> CheckOutcome {
    CheckOutcome {
        passed: parts.iter().all(|(_, o)| o.passed),
        cases: parts.iter().map(|(_, o)| o.cases).sum(),
        detail: parts.iter().map(|(name, o)| format!("{name}: {}", o.detail)).collect::<Vec<_>>().join(" | "),
    }
}

fn holder_sets() -> Result<Vec<PointSet>> {
    let mut sets: Vec<PointSet> = [16, 100, 400, 1024, 2000].iter().map(|&n| integer_grid(n)).collect();
    for n in [100, 1000, 10_000, 100_000] {
        sets.push(behrend_collinear(n));
    }
    for (i, n) in [50, 200, 800, 2000].into_iter().enumerate() {
        sets.push(random_pointset(n, 20, 1 + (i % 2) as i64, i as u64)?);
        sets.push(random_pointset(n, 30, 2, 100 + i as u64)?);
    }
    Ok(sets)
}

fn c3_fixtures() -> Result<CheckOutcome> {
    let caps = Caps::default();
    let square = PointSet::from_integers(&[(0, 0), (1, 0), (0, 1), (1, 1)], "unit square");
    let line3 = PointSet::from_integers(&[(0, 0), (1, 0), (2, 0)], "collinear");
    let s = multiplicity_spectrum(&square);
    let expect = MultiplicitySpectrum::from_counts([(1.into(), 8), (2.into(), 4)]);
    let big = |v: u32| BigUint::from(v);
    let l = multiplicity_spectrum(&line3);
    let cases = [
        ("square spectrum", s == expect),
        ("square E2 = 80", energy(&s, 2)? == big(80)),
        ("square E2* = 24", distinct_energy(&square, 2, &caps)? == big(24)),
        ("square D = 2", s.distinct() == 2),
        ("square t = 4", isosceles_count(&square) == 4),
        ("collinear E2 = 20", energy(&l, 2)? == big(20)),
        ("collinear E3 = 72", energy(&l, 3)? == big(72)),
        ("collinear t = 1", isosceles_count(&line3) == 1),
    ];
    let failed: Vec<&str> = cases.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    Ok(CheckOutcome {
        passed: failed.is_empty(),
        cases: cases.len(),
        detail: if failed.is_empty() { format!("{} fixtures", cases.len()) } else { format!("failed: {}", failed.join(", ")) },
    })
}

fn c5_elekes() -> Result<CheckOutcome> {
    let mut out = checks::elekes_bounds(&(2..=10).collect::<Vec<_>>())?;
    // the construction itself must meet n = 4m³ exactly
    for m in 2..=10u64 {
        let c = elekes_bipartite(m, 4 * m * m * m)?;
        out.cases += 1;
        if c.plane_points.len() as u64 != 4 * m * m * m || c.line_points.len() as u64 != m {
            out.passed = false;
            out.detail.push_str(&format!("; wrong sizes at m={m}"));
        }
    }
    Ok(out)
}

fn c6_behrend() -> Result<CheckOutcome> {
    let caps = Caps { subsets: 10_000_000, ..Caps::default() };
    checks::behrend_pipeline(&[10, 100, 1000, 10_000], 200, &caps)
}

fn c8_spectra() -> Result<Vec<(String, MultiplicitySpectrum)>> {
    let mut v: Vec<(String, MultiplicitySpectrum)> = holder_sets()?.iter().map(|p| (p.label.clone(), multiplicity_spectrum(p))).collect();
    for m in 2..=6 {
        v.push((format!("elekes m={m}"), elekes_bipartite(m, 4 * m * m * m)?.cross_spectrum()));
    }
    Ok(v)
}

/// Distinctness over every tested non-degenerate `f`, then separately over
/// those without a constant-difference direction, plus richness everywhere.
fn c10_families(caps: &Caps) -> Result<(CheckOutcome, CheckOutcome)> {
    let polys = checks::family_polynomials();
    let plain = checks::family_distinctness(&polys, 4, 6, caps, 21)?;
    let structured = checks::structured_families(caps)?;
    let noted = |o: &CheckOutcome| o.detail.matches("collisions (constant-difference direction)").count();
    let literal = CheckOutcome {
        passed: plain.passed && structured.passed && noted(&plain) + noted(&structured) == 0,
        cases: plain.cases + structured.cases,
        detail: format!(
            "{} family/threshold pairs with proportional members among non-degenerate f (all from x^3 + y and x + y^2)",
            noted(&plain) + noted(&structured)
        ),
    };
    Ok((literal, merge(vec![("plain", plain), ("structured", structured)])))
}

fn descriptor(json: &str) -> ExperimentDescriptor {
    ExperimentDescriptor::from_json(json).expect("descriptor parses")
}

fn c12_descriptors() -> Vec<ExperimentDescriptor> {
    let grid = "[16,64,256,1024,4096,10000]";
    vec![
        descriptor(&format!(
            r#"{{"name":"grid-E2","generator":{{"id":"grid"}},"measurements":["E2","D"],"sweep":{{"param":"n","values":{grid}}},"reference":"n^3 log n"}}"#
        )),
        descriptor(&format!(
            r#"{{"name":"grid-D","generator":{{"id":"grid"}},"measurements":["D"],"sweep":{{"param":"n","values":{grid}}},"reference":"n/sqrt(log n)"}}"#
        )),
        descriptor(&format!(
            r#"{{"name":"grid-max-m","generator":{{"id":"grid"}},"measurements":["max_m","k2","k4"],"sweep":{{"param":"n","values":{grid}}},"reference":"n^(4/3)"}}"#
        )),
        descriptor(&format!(
            r#"{{"name":"grid-t","generator":{{"id":"grid"}},"measurements":["t"],"sweep":{{"param":"n","values":{grid}}},"reference":"n^2.137"}}"#
        )),
        descriptor(&format!(
            r#"{{"name":"grid-E3","generator":{{"id":"grid"}},"measurements":["E3"],"sweep":{{"param":"n","values":{grid}}},"reference":"n^4"}}"#
        )),
        descriptor(
            r#"{"name":"random-E3","generator":{"id":"random","params":{"range":30}},"measurements":["E3"],"sweep":{"param":"n","values":[100,400,1600]},"seeds":[0,1,2],"reference":"n^4"}"#,
        ),
    ]
}

fn column(report: &Report, idx: usize) -> Vec<f64> {
    report.rows.iter().map(|r| r.metrics[idx].parse::<f64>().expect("numeric metric")).collect()
}

fn c12_reports() -> Result<(CheckOutcome, Vec<(String, String)>)> {
    let caps = Caps::default();
    let mut csvs = Vec::new();
    let mut problems = Vec::new();
    let mut sanity = 0;
    for d in c12_descriptors() {
        let r = run_experiment(&d, &caps)?;
        if r.has_errors() {
            problems.push(format!("{}: row errors", d.name));
        }
        if r.rows.iter().any(|row| row.ratio.as_deref().and_then(|x| x.parse::<f64>().ok()).is_none_or(|x| !x.is_finite())) {
            problems.push(format!("{}: missing or non-finite ratio", d.name));
        }
        match d.name.as_str() {
            "grid-D" => {
                let ns: Vec<f64> = r.rows.iter().map(|row| row.value as f64).collect();
                let dens: Vec<f64> = column(&r, 0).iter().zip(&ns).map(|(dd, n)| dd / n).collect();
                sanity += 1;
                if !dens.windows(2).all(|w| w[1] < w[0]) {
                    problems.push(format!("grid D/n not decreasing: {dens:?}"));
                }
            }
            "grid-max-m" => {
                sanity += 1;
                let (m, k2, k4) = (column(&r, 0), column(&r, 1), column(&r, 2));
                if !k2.iter().zip(&k4).all(|(a, b)| a >= b) || !m.windows(2).all(|w| w[1] >= w[0]) {
                    problems.push("k_j not monotone in j or max_m not growing".into());
                }
            }
            _ => {}
        }
        csvs.push((d.name.clone(), r.to_csv()));
    }
    let outcome = CheckOutcome {
        passed: problems.is_empty(),
        cases: csvs.len(),
        detail: if problems.is_empty() { format!("{} reports, {sanity} monotonicity checks", csvs.len()) } else { problems.join("; ") },
    };
    Ok((outcome, csvs))
}

fn c13_determinism() -> Result<CheckOutcome> {
    let caps = Caps::default();
    let pool = |k: usize| rayon::ThreadPoolBuilder::new().num_threads(k).build().expect("thread pool");
    let verify = |k: usize| pool(k).install(|| format_verify(&verify_suite(&caps, energy)));
    let experiment = |k: usize| -> Result<Vec<String>> {
        pool(k).install(|| {
            let mut descs = c12_descriptors();
            descs.push(descriptor(
                r#"{"name":"extract","generator":{"id":"grid","params":{"variant":"plane-E3"}},"measurements":["subset_size"],"sweep":{"param":"n","values":[100,400]},"seeds":[0,1,2,3]}"#,
            ));
            descs.push(descriptor(r#"{"name":"circles","generator":{"id":"circles"},"measurements":["incidences"],"sweep":{"param":"points","values":[16,64]},"reference":"m^(2/3) n^(2/3) + m + n"}"#));
            descs.iter().filter(|d| d.name != "grid-t" && d.name != "grid-E3").map(|d| Ok(run_experiment(d, &caps)?.to_csv())).collect()
        })
    };
    let v1 = verify(1);
    let v1b = verify(1);
    let v4 = verify(4);
    let e1 = experiment(1)?;
    let e4 = experiment(4)?;
    let mut failures = Vec::new();
    if v1 != v1b {
        failures.push("verify differs between runs");
    }
    if v1 != v4 {
        failures.push("verify differs between 1 and 4 threads");
    }
    if e1 != e4 {
        failures.push("experiment CSV differs between 1 and 4 threads");
    }
    Ok(CheckOutcome {
        passed: failures.is_empty(),
        cases: 3,
        detail: if failures.is_empty() { format!("verify and {} experiments byte-identical", e1.len()) } else { failures.join("; ") },
    })
}

/// Criteria whose literal statement does not hold, with the reason. The
/// test asserts that they still fail so a change in behaviour is noticed.
const KNOWN_FAILURES: &[(u32, &str)] =
    &[(10, "f = h(x) + y is not additively degenerate, yet shifting y by b adds b to f, so members of the curve family coincide")];

#[test]
fn acceptance() {
    let caps = Caps::default();
    let mut lines = Vec::new();

    let (r, t) = timed(|| checks::oracle_equivalence(energy, 200, 12, &[2, 3], &caps, 1));
    lines.push(line(1, r, t, Some(Duration::from_secs(60))));

    let (r, t) = timed(|| checks::holder_lower(energy, &holder_sets()?, &[2, 3, 4]));
    lines.push(line(2, r, t, None));

    let (r, t) = timed(c3_fixtures);
    lines.push(line(3, r, t, None));

    let (r, t) = timed(|| checks::bipartite_holder(energy, 100, &[2, 3, 4], 4));
    lines.push(line(4, r, t, None));

    let (r, t) = timed(c5_elekes);
    lines.push(line(5, r, t, Some(Duration::from_secs(30))));

    let (r, t) = timed(c6_behrend);
    lines.push(line(6, r, t, None));

    let (r, t) = timed(|| checks::extraction_runs(&[100, 400, 1600], 20, &[SamplingVariant::PlaneE5, SamplingVariant::PlaneE3]));
    lines.push(line(7, r, t, None));

    let (r, t) = timed(|| checks::interpolation(&c8_spectra()?));
    lines.push(line(8, r, t, None));

    let (r, t) = timed(|| {
        Ok(merge(vec![
            ("degeneracy", checks::degeneracy_suite(&caps)?),
            ("decompose", checks::decomposition_suite(&caps)?),
            ("compositions", checks::random_compositions(40, &caps, 9)?),
            ("E_f", checks::expansion_energy_oracle(40, 10, &caps, 9)?),
        ]))
    });
    lines.push(line(9, r, t, None));

    let start = Instant::now();
    let families = c10_families(&caps);
    let t = start.elapsed();
    let restricted = match families {
        Ok((literal, restricted)) => {
            lines.push(line(10, Ok(literal), t, None));
            Some(restricted)
        }
        Err(e) => {
            lines.push(line(10, Err(e), t, None));
            None
        }
    };

    let (r, t) = timed(|| {
        Ok(merge(vec![
            ("K22", checks::upper_half_k22(100, &caps, 11)?),
            ("lattice", checks::lattice_bounds(100, 11)?),
            ("multiplicity", checks::grid_multiplicity_bound(50, 11)?),
        ]))
    });
    lines.push(line(11, r, t, None));

    let start = Instant::now();
    let reports = c12_reports();
    let t = start.elapsed();
    match reports {
        Ok((outcome, csvs)) => {
            let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("ratio-reports");
            std::fs::create_dir_all(&dir).expect("report directory");
            for (name, csv) in &csvs {
                std::fs::write(dir.join(format!("{name}.csv")), csv).expect("write report");
            }
            let mut outcome = outcome;
            outcome.detail.push_str(&format!(", written to {}", dir.display()));
            lines.push(line(12, Ok(outcome), t, Some(Duration::from_secs(300))));
            for (name, csv) in &csvs {
                println!("--- {name}\n{csv}");
            }
        }
        Err(e) => lines.push(line(12, Err(e), t, None)),
    }

    let (r, t) = timed(c13_determinism);
    lines.push(line(13, r, t, None));

    println!();
    for l in &lines {
        println!("criterion {:>2}: {} {}", l.id, if l.passed { "PASS" } else { "FAIL" }, l.detail);
    }
    if let Some(r) = &restricted {
        println!("criterion 10 (f without a constant-difference direction): {} {}", if r.passed { "PASS" } else { "FAIL" }, r.detail);
    }
    for (id, why) in KNOWN_FAILURES {
        println!("criterion {id} is expected to fail: {why}");
    }

    for l in &lines {
        match KNOWN_FAILURES.iter().find(|(id, _)| *id == l.id) {
            Some(_) => assert!(!l.passed, "criterion {} now passes; update KNOWN_FAILURES", l.id),
            None => assert!(l.passed, "criterion {} failed: {}", l.id, l.detail),
        }
    }
    assert!(restricted.is_some_and(|r| r.passed), "curve families fail even without a constant-difference direction");
}
