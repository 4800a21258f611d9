//! Subcommand implementations. Each returns the artifact text; writing it
//! out is left to the caller.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use flatcone::develop::default_probes;
use flatcone::io::{AlphaJson, ComplexJson, DivisorJson, SolutionJson};
use flatcone::local::frobenius::RESONANCE_TOL;
use flatcone::local::{cone_angle_measurement, frobenius_coefficients_with_tol, indicial_roots, residual_order};
use flatcone::sc::{sc_solve_parameters_with, smooth_vertices, PrevertexConfig, ScMap, SolverOptions};
use flatcone::{develop_samples, monodromy, BranchState, ConeParam, Error, GaussBonnet, PrymDifferential};

use crate::output::{to_csv, to_json};
use crate::spec::{GridJson, ProblemSpec};
use crate::svg::{emit_svg, SvgStyle};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Metric,
    Develop,
    Monodromy,
    ConeAngle,
    Frobenius,
    ScSolve,
    ScMap,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Metric => "metric",
            Command::Develop => "develop",
            Command::Monodromy => "monodromy",
            Command::ConeAngle => "cone-angle",
            Command::Frobenius => "frobenius",
            Command::ScSolve => "sc-solve",
            Command::ScMap => "sc-map",
            Command::Plot => "plot",
        }
    }

    /// Supported formats; the first is the default.
    pub fn formats(self) -> &'static [Format] {
        match self {
            Command::Metric => &[Format::Csv, Format::Json],
            Command::Develop => &[Format::Json, Format::Csv, Format::Svg],
            Command::ConeAngle => &[Format::Json, Format::Csv],
            Command::Plot => &[Format::Svg],
            _ => &[Format::Json],
        }
    }
}

/// The artifact text and, for a `validate` run whose divisor fails the
/// Gauss-Bonnet check, the error that sets the exit status.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failure: None }
    }
}

pub fn run(cmd: Command, spec: &ProblemSpec, format: Option<Format>, tol: Option<f64>) -> CliResult<Outcome> {
    let format = match format {
        None => cmd.formats()[0],
        Some(f) if cmd.formats().contains(&f) => f,
        Some(f) => return Err(CliError::Validation(format!("{} does not produce {f:?} output", cmd.name()))),
    };
    match cmd {
        Command::Validate => validate(spec),
        Command::Metric => metric(spec, format).map(Outcome::ok),
        Command::Develop => develop(spec, format, tol).map(Outcome::ok),
        Command::Monodromy => monodromy_cmd(spec, tol).map(Outcome::ok),
        Command::ConeAngle => cone_angle(spec, format, tol).map(Outcome::ok),
        Command::Frobenius => frobenius(spec).map(Outcome::ok),
        Command::ScSolve => sc_solve(spec, tol).map(Outcome::ok),
        Command::ScMap => sc_map(spec, tol).map(Outcome::ok),
        Command::Plot => plot(spec, tol).map(Outcome::ok),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rows<T> {
    pub rows: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub passed: bool,
    /// `true` when every parameter is rational and the check is an identity.
    pub exact: bool,
    /// `sum (alpha_j - 1)`, as `"p/q"` when exact.
    pub degree: AlphaJson,
    /// `degree + 2`.
    pub deficit: f64,
    /// Cone parameter that a point at infinity needs for the check to
    /// pass; `null` when the divisor already has one.
    pub completion_alpha: Option<AlphaJson>,
    /// The divisor repaired by a point at infinity, when it has none there.
    pub completed: Option<DivisorJson>,
    /// Indices of points with `|alpha| > 50`.
    pub large_alpha: Vec<usize>,
}

fn validate(spec: &ProblemSpec) -> CliResult<Outcome> {
    let divisor = spec.require_divisor()?.to_divisor()?;
    let check = divisor.validate_gauss_bonnet();
    let degree = match divisor.exact_degree() {
        Some(r) => AlphaJson::Text(ConeParam::Exact(r).to_string()),
        None => AlphaJson::Number(divisor.degree()),
    };
    let (passed, exact, deficit) = match check {
        GaussBonnet::Pass { exact } => (true, exact, 0.0),
        GaussBonnet::Fail { deficit } => (false, divisor.exact_degree().is_some(), deficit),
    };
    let (completion_alpha, completed) = match divisor.infinity() {
        Some(_) => (None, None),
        None => {
            let full = divisor.complete_at_infinity()?;
            let alpha = full.infinity().unwrap_or(ConeParam::integer(1));
            (Some(AlphaJson::from(alpha)), Some(DivisorJson::from(&full)))
        }
    };
    let report = ValidateReport { passed, exact, degree, deficit, completion_alpha, completed, large_alpha: divisor.large_alpha_warnings() };
    let failure = (!passed).then(|| CliError::Validation(format!("Gauss-Bonnet check failed: degree + 2 = {deficit}")));
    Ok(Outcome { text: to_json(&report)?, failure })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Density on the grid, `re`-major. At a cone point the density is
/// infinite for `alpha < 1` and zero for `alpha > 1`.
pub fn metric_rows(w: &PrymDifferential, grid: &GridJson) -> CliResult<Vec<[f64; 3]>> {
    if grid.nx == 0 || grid.ny == 0 {
        return Err(CliError::Validation("grid needs nx, ny >= 1".into()));
    }
    let xs = linspace(grid.re_min, grid.re_max, grid.nx);
    let ys = linspace(grid.im_min, grid.im_max, grid.ny);
    let blocks: Vec<CliResult<Vec<[f64; 3]>>> = xs
        .par_iter()
        .map(|&x| {
            ys.iter()
                .map(|&y| {
                    let d = match w.metric_density(Complex64::new(x, y)) {
                        Ok(d) => d,
                        Err(Error::AtConePoint { exponent, .. }) if exponent < 0.0 => f64::INFINITY,
                        Err(Error::AtConePoint { .. }) => 0.0,
                        Err(e) => return Err(e.into()),
                    };
                    Ok([x, y, d])
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(xs.len() * ys.len());
    for block in blocks {
        rows.extend(block?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub re: f64,
    pub im: f64,
    /// `null` where the density is infinite.
    pub density: Option<f64>,
}

fn metric(spec: &ProblemSpec, format: Format) -> CliResult<String> {
    let w = spec.differential()?;
    let rows = metric_rows(&w, spec.require_grid()?)?;
    match format {
        Format::Json => {
            let rows: Vec<MetricRow> = rows
                .iter()
                .map(|r| MetricRow { re: r[0], im: r[1], density: r[2].is_finite().then_some(r[2]) })
                .collect();
            to_json(&Rows { rows })
        }
        _ => Ok(to_csv(&["re", "im", "density"], &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub z: ComplexJson,
    pub value: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DevelopReport {
    pub samples: Vec<Sample>,
}

fn developed(spec: &ProblemSpec, tol: Option<f64>) -> CliResult<Vec<(Complex64, Complex64)>> {
    let w = spec.differential()?;
    let path = spec.require_path()?.to_path(w.default_clearance())?;
    let n = spec.samples.unwrap_or(101);
    Ok(develop_samples(&w, &path, n, &spec.quadrature(tol)?)?)
}

fn develop(spec: &ProblemSpec, format: Format, tol: Option<f64>) -> CliResult<String> {
    let samples = developed(spec, tol)?;
    match format {
        Format::Csv => {
            let rows: Vec<Vec<f64>> = samples.iter().map(|(z, f)| vec![z.re, z.im, f.re, f.im]).collect();
            Ok(to_csv(&["re", "im", "value_re", "value_im"], &rows))
        }
        Format::Svg => emit_svg(&samples.iter().map(|s| s.1).collect::<Vec<_>>(), &SvgStyle::default()),
        Format::Json => {
            let samples = samples.iter().map(|&(z, f)| Sample { z: z.into(), value: f.into() }).collect();
            to_json(&DevelopReport { samples })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyJson {
    /// `F_after = rotation * F_before + translation`, `F` vanishing at the
    /// loop start.
    pub rotation: ComplexJson,
    pub translation: ComplexJson,
    /// `exp(2 pi i sum winding_j alpha_j)`.
    pub predicted_rotation: ComplexJson,
    pub windings: Vec<i64>,
    pub loop_integral: ComplexJson,
}

fn monodromy_cmd(spec: &ProblemSpec, tol: Option<f64>) -> CliResult<String> {
    let w = spec.differential()?;
    let lp = spec.require_path()?.to_path(w.default_clearance())?;
    let probes: Vec<Complex64> = match &spec.probes {
        Some(p) => p.iter().map(|&z| z.into()).collect(),
        None => default_probes(&lp).to_vec(),
    };
    let b0 = BranchState::principal(&w, lp.start())?;
    let m = monodromy(&w, &lp, &b0, &probes, &spec.quadrature(tol)?)?;
    to_json(&MonodromyJson {
        rotation: m.isometry.rotation.into(),
        translation: m.isometry.translation.into(),
        predicted_rotation: m.predicted_rotation.into(),
        windings: m.windings,
        loop_integral: m.loop_integral.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeAngleRow {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub alpha: f64,
    pub eps: f64,
    /// `L / r` in radians; `null` when it cannot be measured.
    pub measured: Option<f64>,
    /// `2 pi alpha`.
    pub expected: f64,
    pub note: Option<String>,
}

fn cone_angle(spec: &ProblemSpec, format: Format, tol: Option<f64>) -> CliResult<String> {
    let w = spec.differential()?;
    let eps = spec.eps.clone().unwrap_or_else(|| vec![1e-3]);
    let settings = spec.quadrature(tol.or(spec.tolerances.tol_q).or(Some(1e-12)))?;
    let mut rows = Vec::new();
    for (j, &p) in w.centers().iter().enumerate() {
        let alpha = w.alpha(j)?;
        for &e in &eps {
            let (measured, note) =
                match cone_angle_measurement(&w, j, e, &settings).map(|m| m.angle) {
                    Ok(v) => (Some(v), None),
                    Err(err) if err.is_numerical() => return Err(err.into()),
                    Err(err) => (None, Some(err.to_string())),
                };
            rows.push(ConeAngleRow { index: j, re: p.re, im: p.im, alpha, eps: e, measured, expected: 2.0 * PI * alpha, note });
        }
    }
    match format {
        Format::Csv => {
            let table: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| vec![r.index as f64, r.re, r.im, r.alpha, r.eps, r.measured.unwrap_or(f64::NAN), r.expected])
                .collect();
            Ok(to_csv(&["index", "re", "im", "alpha", "eps", "measured", "expected"], &table))
        }
        _ => to_json(&Rows { rows }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    pub m: usize,
    pub remainder: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub root: f64,
    pub terms: usize,
    pub coefficients: Option<Vec<ComplexJson>>,
    pub resonance: Option<usize>,
    /// Log-log slope of the ODE residual between the two radii.
    pub residual_order: Option<f64>,
    /// `root + terms + 1`.
    pub expected_order: f64,
    pub obstruction: Option<Obstruction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusReport {
    pub alpha: f64,
    pub roots: [f64; 2],
    pub double_root: bool,
    pub series: Vec<SeriesJson>,
}

fn frobenius(spec: &ProblemSpec) -> CliResult<String> {
    let fj = spec.require_frobenius()?;
    let alpha = fj.alpha.to_param()?.value();
    let pair = indicial_roots(alpha);
    let mut b = vec![Complex64::new((1.0 - alpha * alpha) / 4.0, 0.0)];
    b.extend(fj.b.iter().map(|&z| Complex64::from(z)));
    let terms = fj.terms.clone().unwrap_or_else(|| vec![3, 6]);
    let [r1, r2] = fj.radii.unwrap_or([0.05, 0.02]);
    let rtol = spec.tolerances.resonance_tol.unwrap_or(RESONANCE_TOL);
    let roots = if pair.is_double() { vec![pair.s2] } else { vec![pair.larger(), pair.smaller()] };
    let mut series = Vec::new();
    for &s in &roots {
        for &n in &terms {
            let expected_order = s + n as f64 + 1.0;
            match frobenius_coefficients_with_tol(&b, s, n, rtol) {
                Ok(fs) => {
                    let order = residual_order(&fs, &b, r1, r2, 0.0)?;
                    series.push(SeriesJson {
                        root: s,
                        terms: n,
                        coefficients: Some(fs.coefficients.iter().map(|&c| c.into()).collect()),
                        resonance: fs.resonance,
                        residual_order: order.is_finite().then_some(order),
                        expected_order,
                        obstruction: None,
                    });
                }
                Err(Error::ResonanceObstruction { m, remainder }) => series.push(SeriesJson {
                    root: s,
                    terms: n,
                    coefficients: None,
                    resonance: None,
                    residual_order: None,
                    expected_order,
                    obstruction: Some(Obstruction { m, remainder }),
                }),
                Err(e) => return Err(e.into()),
            }
        }
    }
    to_json(&FrobeniusReport { alpha, roots: [pair.s1, pair.s2], double_root: pair.is_double(), series })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScSolveReport {
    #[serde(flatten)]
    pub solution: SolutionJson,
    /// Sides `2..n-2` over side 1, solved and target.
    pub side_ratios: Vec<f64>,
    pub target_ratios: Vec<f64>,
}

fn solver_options(spec: &ProblemSpec, tol: Option<f64>) -> CliResult<SolverOptions> {
    let mut opts = SolverOptions::default();
    if tol.is_some() || spec.tolerances.tol_q.is_some() {
        opts.quadrature = spec.quadrature(tol)?;
    }
    Ok(opts)
}

fn sc_solve(spec: &ProblemSpec, tol: Option<f64>) -> CliResult<String> {
    let poly = spec.require_polygon()?.to_polygon()?;
    let opts = solver_options(spec, tol)?;
    let sol = sc_solve_parameters_with(&poly, &PrevertexConfig::initial_guess(poly.len())?, &opts)?;
    let map = ScMap::new(&sol.config, poly.alphas(), Complex64::new(1.0, 0.0), opts.quadrature)?;
    let sides = map.finite_side_lengths()?;
    let target = poly.side_lengths();
    let n = poly.len();
    to_json(&ScSolveReport {
        solution: SolutionJson::from(&sol),
        side_ratios: sides.iter().map(|s| s / sides[0]).collect(),
        target_ratios: target[..n - 2].iter().map(|s| s / target[0]).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageJson {
    /// `null` for the prevertex at infinity.
    pub z: Option<ComplexJson>,
    pub value: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScMapReport {
    pub images: Vec<ImageJson>,
    /// Vertices with `alpha = 1`, which make no corner.
    pub smooth_vertices: Vec<usize>,
}

fn sc_map_of(spec: &ProblemSpec, tol: Option<f64>) -> CliResult<(ScMap, Vec<ConeParam>)> {
    let (config, alphas) = spec.require_prevertices()?.to_config()?;
    let settings = match tol.or(spec.tolerances.tol_q) {
        Some(_) => spec.quadrature(tol)?,
        None => SolverOptions::default().quadrature,
    };
    let map = ScMap::new(&config, &alphas, spec.scale.map(Into::into).unwrap_or(Complex64::new(1.0, 0.0)), settings)?;
    Ok((map, alphas))
}

fn sc_map(spec: &ProblemSpec, tol: Option<f64>) -> CliResult<String> {
    let (map, alphas) = sc_map_of(spec, tol)?;
    let images = match &spec.points {
        Some(points) => points
            .iter()
            .map(|&z| Ok(ImageJson { z: Some(z), value: map.forward(z.into())?.into() }))
            .collect::<CliResult<Vec<_>>>()?,
        None => {
            let mut out: Vec<ImageJson> = map
                .config()
                .finite()
                .iter()
                .map(|&x| Ok(ImageJson { z: Some(ComplexJson { re: x, im: 0.0 }), value: map.forward(Complex64::new(x, 0.0))?.into() }))
                .collect::<CliResult<Vec<_>>>()?;
            if map.differential().alpha_at_infinity() > 0.0 {
                out.push(ImageJson { z: None, value: map.at_infinity()?.into() });
            }
            out
        }
    };
    to_json(&ScMapReport { images, smooth_vertices: smooth_vertices(&alphas) })
}

fn plot(spec: &ProblemSpec, tol: Option<f64>) -> CliResult<String> {
    let style = SvgStyle::default();
    if spec.path.is_some() {
        let samples = developed(spec, tol)?;
        return emit_svg(&samples.iter().map(|s| s.1).collect::<Vec<_>>(), &style);
    }
    if spec.prevertices.is_some() {
        // edges map to straight segments, so the vertex images suffice
        let (map, _) = sc_map_of(spec, tol)?;
        let mut images = map.vertex_images()?;
        images.push(images[0]);
        return emit_svg(&images, &style);
    }
    if let Some(poly) = &spec.polygon {
        let poly = poly.to_polygon()?;
        let mut v = poly.vertices().to_vec();
        v.push(v[0]);
        return emit_svg(&v, &style);
    }
    Err(CliError::Validation("plot needs a \"path\", \"prevertices\" or \"polygon\" field".into()))
}
