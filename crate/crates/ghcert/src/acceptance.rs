//! The acceptance suite: eight criteria, each reported as pass or fail with
//! a one-line detail.

use std::f64::consts::PI;
use std::time::Instant;

use ghcert_core::bounds::{diam_diff_lower, involution_lower, round_lower};
use ghcert_core::correspondence::{nearest_point_correspondence, wrap_once};
use ghcert_core::exact::{exhaustive_gh, gh_exact, SearchOptions};
use ghcert_core::model::{antipodal_map, circle_space, segment_space, whisker_graph, LineGrid};
use ghcert_core::nonlinearity::{c_exact, lipschitz_image, ExactOptions, DEFAULT_LIP_TOL};
use ghcert_core::region::geomcalc_check;
use ghcert_core::segment_circle::{certificate, gh_formula, Grids};
use ghcert_core::{FiniteMetricSpace, LipschitzWitness, QPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sweep::sweep_parallel;

pub const CRITERIA: usize = 8;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {:<28} {}  ({:.2}s) {}",
            self.id,
            self.title,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

pub fn title(id: usize) -> &'static str {
    match id {
        1 => "formula reproduction",
        2 => "regime A tightness",
        3 => "plateau",
        4 => "regime C",
        5 => "region test equivalence",
        6 => "exact oracle equivalence",
        7 => "nonlinearity degree",
        8 => "Hausdorff construction",
        _ => "unknown",
    }
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

pub fn run(id: usize) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => formula_reproduction(),
        2 => regime_a(),
        3 => plateau(),
        4 => regime_c(),
        5 => region_equivalence(),
        6 => oracle_equivalence(),
        7 => nonlinearity(),
        8 => hausdorff_construction(),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult { id, title: title(id), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA).map(run).collect()
}

fn formula_reproduction() -> Outcome {
    let grids = Grids::default();
    let start = Instant::now();
    let reports = sweep_parallel(0.0, 3.0 * PI, 100, &grids).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(reports.len() == 100, || format!("{} rows", reports.len()))?;
    let mut worst_slack = 0.0f64;
    for r in &reports {
        worst_slack = worst_slack.max(r.slack);
        ensure(r.consistent(), || {
            format!(
                "lambda {}: lower {} formula {} upper {} slack {}",
                r.lambda, r.lower.value, r.formula, r.upper.value, r.slack
            )
        })?;
    }
    ensure(worst_slack <= 0.02, || format!("slack {worst_slack} > 0.02"))?;
    let spot = |l: f64| gh_formula(l).map_err(|e| e.to_string());
    ensure(spot(0.0)? == PI / 2.0, || "formula(0) != pi/2".into())?;
    ensure(spot(PI)? == PI / 3.0, || "formula(pi) != pi/3".into())?;
    ensure(spot(3.0 * PI)? == PI, || "formula(3pi) != pi".into())?;
    ensure(reports[0].formula == PI / 2.0 && reports[99].formula == PI, || "sweep endpoints differ".into())?;
    ensure(elapsed <= 60.0, || format!("sweep took {elapsed:.1}s"))?;
    Ok(format!("100 rows consistent, max slack {worst_slack:.5}, sweep {elapsed:.2}s"))
}

fn regime_a() -> Outcome {
    let grids = Grids::default();
    let circle = circle_space(grids.n_circle).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for lambda in [PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
        let expected = PI / 2.0 - lambda / 4.0;
        let segment = segment_space(lambda, grids.m_grid + 1).map_err(|e| e.to_string())?;
        let lower = round_lower(&circle, &segment).map_err(|e| e.to_string())?;
        ensure((lower.value - expected).abs() <= 1e-12, || format!("lambda {lambda}: round bound {}", lower.value))?;
        let map = wrap_once(lambda, grids.m_grid + 1, grids.n_circle).map_err(|e| e.to_string())?;
        let half = map.distortion() / 2.0;
        let tol = 4.0 * PI / 720.0 + 2.0 * lambda / 720.0;
        ensure((half - expected).abs() <= tol, || format!("lambda {lambda}: wrap_once {half} vs {expected}"))?;
        worst = worst.max((half - expected).abs());
    }
    Ok(format!("round bound exact, wrap_once within {worst:.2e}"))
}

fn plateau() -> Outcome {
    let grids = Grids::default();
    let circle = circle_space(grids.n_circle).map_err(|e| e.to_string())?;
    let alpha = antipodal_map(grids.n_circle).map_err(|e| e.to_string())?;
    for lambda in [2.0 * PI / 3.0, PI, 7.0 * PI / 6.0, 1.5 * PI, 5.0 * PI / 3.0] {
        let cert = certificate(lambda, &grids).map_err(|e| e.to_string())?;
        ensure(cert.half_distortion() <= PI / 3.0 + cert.slack, || {
            format!("lambda {lambda}: certificate {} slack {}", cert.half_distortion(), cert.slack)
        })?;
        let grid = LineGrid::uniform(lambda, grids.m_grid + 1).map_err(|e| e.to_string())?;
        let segment = grid.to_space();
        let witness = LipschitzWitness::from_values(&segment, grid.positions().to_vec()).map_err(|e| e.to_string())?;
        let c = witness.verify(&segment, DEFAULT_LIP_TOL).map_err(|e| e.to_string())?;
        ensure(c <= 1e-9, || format!("lambda {lambda}: c(segment) {c}"))?;
        let r = involution_lower(&circle, &alpha, &segment, &witness, grids.circle_step()).map_err(|e| e.to_string())?;
        ensure((r.value - PI / 3.0).abs() <= 1e-12, || format!("lambda {lambda}: involution bound {}", r.value))?;
        ensure(r.continuous_hypothesis && r.slack == 2.0 * PI / 720.0, || "involution bound not flagged".into())?;
    }
    Ok("certificates within slack of pi/3, involution bound pi/3 with slack 2pi/720".into())
}

fn regime_c() -> Outcome {
    let grids = Grids::default();
    let circle = circle_space(grids.n_circle).map_err(|e| e.to_string())?;
    for lambda in [11.0 * PI / 6.0, 2.0 * PI, 2.5 * PI, 3.0 * PI] {
        let target = (lambda - PI) / 2.0;
        let cert = certificate(lambda, &grids).map_err(|e| e.to_string())?;
        ensure(cert.half_distortion() <= target + cert.slack, || {
            format!("lambda {lambda}: certificate {} slack {}", cert.half_distortion(), cert.slack)
        })?;
        let segment = segment_space(lambda, grids.m_grid + 1).map_err(|e| e.to_string())?;
        let d = diam_diff_lower(&segment, &circle);
        ensure((d.value - target).abs() <= 2.0 * PI / 720.0, || format!("lambda {lambda}: diameter bound {}", d.value))?;
    }
    Ok("certificates within slack of (lambda-pi)/2, diameter bound matches".into())
}

// Discrepancy of two related points, written out from the two distances.
fn pair_gap(p: QPoint, q: QPoint) -> f64 {
    let along_segment = (p.t - q.t).abs();
    let turn = (p.phi - q.phi).abs().rem_euclid(2.0 * PI);
    let along_circle = turn.min(2.0 * PI - turn);
    (along_segment - along_circle).abs()
}

fn region_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut disagreements = 0;
    let eps = 1e-9;
    for _ in 0..200 {
        let lambda = rng.gen_range(0.1..10.0);
        let n = rng.gen_range(1..=60);
        let points: Vec<QPoint> = (0..n)
            .map(|_| QPoint::new(rng.gen_range(-lambda / 2.0..=lambda / 2.0), rng.gen_range(-PI..=PI)))
            .collect();
        let max = points
            .iter()
            .flat_map(|p| points.iter().map(move |q| pair_gap(*p, *q)))
            .fold(0.0f64, f64::max);
        for a in [max - eps, max, max + eps] {
            let brute = points.iter().all(|p| points.iter().all(|q| pair_gap(*p, *q) <= a));
            if geomcalc_check(&points, a) != brute {
                disagreements += 1;
            }
        }
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements"))?;
    Ok("0 disagreements over 200 sets".into())
}

/// A random metric on `n` points: entries `k/8` with `k` in `8..=16`.
fn random_space(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rng.gen_range(8..=16) as f64 / 8.0;
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    FiniteMetricSpace::from_matrix(&m).expect("entries in [1, 2] form a metric")
}

/// Random points in the plane with the Euclidean metric.
fn random_planar(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    loop {
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))).collect();
        let m: Vec<Vec<f64>> =
            pts.iter().map(|&(a, b)| pts.iter().map(|&(c, d)| (a - c).hypot(b - d)).collect()).collect();
        if let Ok(space) = FiniteMetricSpace::from_matrix(&m) {
            return space;
        }
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = SearchOptions { max_points: 16, ..SearchOptions::default() };
    for trial in 0..100 {
        let nx = rng.gen_range(1..=4);
        let ny = rng.gen_range(1..=16 / nx);
        let (x, y) = if trial % 2 == 0 {
            (random_space(&mut rng, nx), random_space(&mut rng, ny))
        } else {
            (random_planar(&mut rng, nx), random_planar(&mut rng, ny))
        };
        let bnb = gh_exact(&x, &y, &opts).map_err(|e| e.to_string())?;
        let (brute, _) = exhaustive_gh(&x, &y).map_err(|e| e.to_string())?;
        ensure(bnb.value == brute, || format!("trial {trial}: search {} vs enumeration {brute}", bnb.value))?;
    }
    let opts = SearchOptions::default();
    let gh = |a: &FiniteMetricSpace, b: &FiniteMetricSpace| gh_exact(a, b, &opts).map(|s| s.value);
    for trial in 0..50 {
        let spaces: Vec<FiniteMetricSpace> = (0..3)
            .map(|_| {
                let n = rng.gen_range(1..=5);
                random_planar(&mut rng, n)
            })
            .collect();
        let (x, y, z) = (&spaces[0], &spaces[1], &spaces[2]);
        let xy = gh(x, y).map_err(|e| e.to_string())?;
        let yx = gh(y, x).map_err(|e| e.to_string())?;
        let xz = gh(x, z).map_err(|e| e.to_string())?;
        let zy = gh(z, y).map_err(|e| e.to_string())?;
        ensure(xy == yx, || format!("triple {trial}: asymmetric {xy} vs {yx}"))?;
        ensure(xy <= xz + zy + 1e-12, || format!("triple {trial}: {xy} > {xz} + {zy}"))?;
    }
    Ok("100 pairs agree, 50 triples symmetric and triangular".into())
}

fn nonlinearity() -> Outcome {
    let opts = ExactOptions::default();
    for m in 2..=8 {
        let s = segment_space(2.0, m).map_err(|e| e.to_string())?;
        let c = c_exact(&s, opts).map_err(|e| e.to_string())?.objective();
        ensure(c <= 1e-9, || format!("segment grid with {m} points: c = {c}"))?;
    }
    for n in [4, 6, 8] {
        let c = c_exact(&circle_space(n).map_err(|e| e.to_string())?, opts).map_err(|e| e.to_string())?.objective();
        let lo = PI - 2.0 * PI / n as f64;
        ensure(c >= lo - 1e-9 && c <= PI + 1e-9, || format!("circle {n}: c = {c} outside [{lo}, pi]"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..20 {
        let n = rng.gen_range(2..=6);
        let x = random_planar(&mut rng, n);
        let c = c_exact(&x, opts).map_err(|e| e.to_string())?;
        let c2 = c_exact(&x.scale(2.0).map_err(|e| e.to_string())?, opts).map_err(|e| e.to_string())?;
        ensure((c2.objective() - 2.0 * c.objective()).abs() <= 1e-8, || {
            format!("trial {trial}: c(2X) = {} vs 2c(X) = {}", c2.objective(), 2.0 * c.objective())
        })?;
        let image = lipschitz_image(&x, &c).map_err(|e| e.to_string())?;
        let gh = gh_exact(&x, &image.image, &SearchOptions::default()).map_err(|e| e.to_string())?;
        ensure(gh.value <= c.objective() / 2.0 + 1e-8, || {
            format!("trial {trial}: GH to line image {} > c/2 = {}", gh.value, c.objective() / 2.0)
        })?;
    }
    Ok("segments embed, circles in range, scaling and line-image bound hold".into())
}

fn hausdorff_construction() -> Outcome {
    let step = 2.0 * PI / 720.0;
    let mut details = Vec::new();
    for lambda in [2.0 * PI, 3.0 * PI] {
        let whisker = (lambda - PI) / 2.0;
        let edges = (whisker / step).ceil() as usize;
        let w = whisker_graph(lambda, 720, edges.max(1)).map_err(|e| e.to_string())?;
        let pairing = nearest_point_correspondence(&w.y_subset(), &w.z_subset()).map_err(|e| e.to_string())?;
        ensure((pairing.hausdorff - whisker).abs() <= 2.0 * step, || {
            format!("lambda {lambda}: d_H = {} vs {whisker}", pairing.hausdorff)
        })?;
        let d = pairing.correspondence.distortion(&pairing.left, &pairing.right).map_err(|e| e.to_string())?;
        ensure(d <= lambda - PI + 4.0 * step, || format!("lambda {lambda}: distortion {d}"))?;
        details.push(format!("d_H {:.6} dis {:.6}", pairing.hausdorff, d));
    }
    Ok(details.join("; "))
}
