//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its measured error and runtime; the process fails if any does.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flatcone::develop::{default_probes, local_developing_map};
use flatcone::local::{
    cone_angle_measurement, frobenius_coefficients, indicial_roots, residual_order, schwarzian_numeric,
};
use flatcone::sc::PolygonSpec;
use flatcone::{
    continue_branch, integrate_along_path, integrate_to_cone_point, monodromy, sc_side_lengths, sc_solve_parameters,
    BranchState, Complex64, ConeParam, ConePoint, Divisor, Error, GaussBonnet, Path, PrevertexConfig,
    PrymDifferential, QuadratureSettings,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn q(p: i128, d: i128) -> ConeParam {
    ConeParam::ratio(p, d).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    check(elapsed < limit, format!("{detail}; {:.3}s of {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn fail(e: Error) -> String {
    format!("error: {e}")
}

fn random_rational(rng: &mut ChaCha8Rng) -> (i64, i64) {
    (rng.gen_range(-12..=36), rng.gen_range(1..=12))
}

fn gauss_bonnet_gate() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut passing, mut mismatches) = (0, 0);
    for trial in 0..100 {
        let n = rng.gen_range(2..=6);
        let mut alphas: Vec<Ratio<i64>> =
            (0..n).map(|_| random_rational(&mut rng)).map(|(p, d)| Ratio::new(p, d)).collect();
        if trial % 2 == 0 {
            // force the last parameter so the degree is exactly -2
            let rest: Ratio<i64> = alphas[..n - 1].iter().map(|a| a - 1).sum();
            alphas[n - 1] = Ratio::from_integer(-1) - rest;
        }
        let degree: Ratio<i64> = alphas.iter().map(|a| a - 1).sum();
        let expect_pass = degree == Ratio::from_integer(-2);
        let points = alphas
            .iter()
            .enumerate()
            .map(|(k, a)| {
                ConePoint::finite(c(k as f64, rng.gen_range(-1.0..1.0)), q(*a.numer() as i128, *a.denom() as i128))
            })
            .collect();
        let d = Divisor::new(points).map_err(fail)?;
        let passed = matches!(d.validate_gauss_bonnet(), GaussBonnet::Pass { exact: true });
        passing += passed as usize;
        mismatches += (passed != expect_pass) as usize;
        let repaired = d.complete_at_infinity().map_err(fail)?;
        if !matches!(repaired.validate_gauss_bonnet(), GaussBonnet::Pass { exact: true }) {
            return Err(format!("completion of divisor {trial} is not exact"));
        }
    }
    let detail = format!("100 divisors, {passing} balanced, {mismatches} misclassified, all completions exact");
    if mismatches > 0 {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(1), detail)
}

fn beta_constant() -> Outcome {
    const REFERENCE: f64 = 5.299916250856349871941;
    let start = Instant::now();
    let g = statrs::function::gamma::gamma;
    let gamma_ratio = g(1.0 / 3.0).powi(2) / g(2.0 / 3.0);
    if ((gamma_ratio - REFERENCE) / REFERENCE).abs() > 1e-13 {
        return Err(format!("reference disagrees with the gamma ratio {gamma_ratio}"));
    }
    let third = q(1, 3);
    let sides = sc_side_lengths(&PrevertexConfig::triangle(), &[third, third, third]).map_err(fail)?;

    // the same side straight from the endpoint integrals
    let w = PrymDifferential::from_points([(c(0., 0.), third), (c(1., 0.), third)]).map_err(fail)?;
    let mid = c(0.5, 0.);
    let b0 = BranchState::principal(&w, mid).map_err(fail)?;
    let s = QuadratureSettings::with_tol(1e-12);
    let leg = |to: Complex64| {
        let p = Path::segment(mid, to, 1e-6)?;
        integrate_to_cone_point(&w, &p, &b0, &s)
    };
    let direct = (leg(c(1., 0.)).map_err(fail)? - leg(c(0., 0.)).map_err(fail)?).norm();

    let err = sides.iter().chain([&direct]).map(|v| ((v - REFERENCE) / REFERENCE).abs()).fold(0.0, f64::max);
    let detail = format!("sides {:?}, endpoint integral {direct:.15}, max rel err {err:.2e}", sides);
    if err > 1e-8 {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(5), detail)
}

fn monodromy_suite() -> Outcome {
    let set = [q(-1, 1), q(-1, 2), q(0, 1), q(1, 3), q(1, 2), q(2, 1)];
    let (p1, p2) = (c(0., 0.), c(0., 3.));
    let scale = c(0.7, 0.4);
    let settings = QuadratureSettings::with_tol(1e-12);
    let around_first = Path::circle(p1, 1.0, 48, 0.0, 1e-6).map_err(fail)?;
    let loops = [
        (around_first.clone(), [1i64, 0]),
        (Path::circle(p1, 5.0, 96, 0.0, 1e-6).map_err(fail)?, [1, 1]),
        (around_first.reversed(), [-1, 0]),
        (Path::circle(p2, 1.0, 48, 0.0, 1e-6).map_err(fail)?, [0, 1]),
    ];
    let (mut worst_modulus, mut worst_arg, mut worst_translation) = (0.0f64, 0.0f64, 0.0f64);
    let mut translation_checks = 0;
    for i in 0..20 {
        let (a1, a2) = (set[i % 6], set[(i + 1 + i / 6) % 6]);
        let (lp, windings) = &loops[i % 4];
        let w = PrymDifferential::from_points([(p1, a1), (p2, a2)])
            .and_then(|w| w.with_scale(scale))
            .map_err(fail)?;
        let b0 = BranchState::principal(&w, lp.start()).map_err(fail)?;
        let m = monodromy(&w, lp, &b0, &default_probes(lp), &settings).map_err(fail)?;
        if m.windings != windings.to_vec() {
            return Err(format!("combination {i}: windings {:?}, expected {windings:?}", m.windings));
        }
        let rho = m.isometry.rotation;
        let predicted = 2.0 * PI * (windings[0] as f64 * a1.value() + windings[1] as f64 * a2.value());
        let d = (rho.arg() - predicted).rem_euclid(2.0 * PI);
        worst_modulus = worst_modulus.max((rho.norm() - 1.0).abs());
        worst_arg = worst_arg.max(d.min(2.0 * PI - d));

        // a lone enclosed simple pole: translation is 2 pi i times the residue
        let enclosed: Vec<usize> = (0..2).filter(|&j| windings[j] != 0).collect();
        if let [j] = enclosed[..] {
            let (alpha, other, here, there) = if j == 0 { (a1, a2, p1, p2) } else { (a2, a1, p2, p1) };
            if alpha.value() == 0.0 {
                let residue = scale * (here - there).powf(other.value() - 1.0);
                let expected = c(0.0, 2.0 * PI * windings[j] as f64) * residue;
                let err = (m.isometry.translation - expected).norm() / expected.norm().max(1.0);
                worst_translation = worst_translation.max(err);
                translation_checks += 1;
            }
        }
    }
    let detail = format!(
        "20 loops: max ||rho|-1| {worst_modulus:.1e}, max arg err {worst_arg:.1e}, \
         {translation_checks} residue translations max err {worst_translation:.1e}"
    );
    check(
        worst_modulus <= 1e-10 && worst_arg <= 1e-8 && worst_translation <= 1e-9 && translation_checks >= 3,
        detail,
    )
}

fn random_divisor(rng: &mut ChaCha8Rng, n: usize, keep_out: impl Fn(Complex64) -> bool) -> PrymDifferential {
    let fractions = [q(1, 3), q(1, 2), q(3, 4), q(5, 2), q(-1, 2), q(2, 3), q(7, 5), q(0, 1)];
    loop {
        let points: Vec<(Complex64, ConeParam)> = (0..n)
            .map(|_| (c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), fractions[rng.gen_range(0..fractions.len())]))
            .collect();
        let spread = points
            .iter()
            .enumerate()
            .all(|(i, p)| !keep_out(p.0) && points[..i].iter().all(|o| (o.0 - p.0).norm() > 0.3));
        if spread {
            return PrymDifferential::from_points(points).unwrap();
        }
    }
}

fn uniqueness_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let settings = QuadratureSettings::with_tol(1e-12);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = rng.gen_range(2..=4);
        let w = random_divisor(&mut rng, n, |_| false);
        // a random walk of 10 legs that keeps away from the cone points
        let mut waypoints = vec![c(2.5, 2.5)];
        while waypoints.len() < 11 {
            let last = *waypoints.last().unwrap();
            let next = last + c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            if Path::segment(last, next, 0.1).and_then(|p| p.check_clearance(w.centers(), None)).is_ok() {
                waypoints.push(next);
            }
        }
        let b0 = BranchState::principal(&w, waypoints[0]).map_err(fail)?;
        let mut ratios = Vec::new();
        for k in 1..waypoints.len() {
            let prefix = Path::new(waypoints[..=k].to_vec(), 0.1).map_err(fail)?;
            let rebuilt = w.reconstruct_by_exponential(&prefix, &settings).map_err(fail)?;
            let b = continue_branch(&w, &prefix, &b0).map_err(fail)?;
            let direct = w.evaluate_with_branch(waypoints[k], &b).map_err(fail)?;
            ratios.push(rebuilt / direct);
        }
        let spread = ratios.iter().map(|r| (r - ratios[0]).norm() / ratios[0].norm()).fold(0.0, f64::max);
        worst = worst.max(spread);
    }
    check(worst <= 1e-9, format!("10 divisors x 10 points, max relative spread {worst:.1e}"))
}

fn schwarzian_leading_coefficient() -> Outcome {
    let x = c(1e-3, 0.0);
    let h = 1e-3 * x.norm();
    let mut worst = 0.0f64;
    let mut report = Vec::new();
    for alpha in [q(1, 3), q(1, 2), q(2, 1), q(3, 1), q(0, 1)] {
        // distant partners keep the sum balanced and perturb the coefficient by O(|x|/100)
        let w = PrymDifferential::from_points([(c(0., 0.), alpha), (c(100., 0.), q(1, 2)), (c(0., 100.), q(1, 2))])
            .map_err(fail)?;
        let b = BranchState::principal(&w, x).map_err(fail)?;
        let f = local_developing_map(&w, &b);
        let s = schwarzian_numeric(&f, x, h).map_err(fail)?;
        let a = alpha.value();
        let expected = (1.0 - a * a) / 2.0;
        let err = (x * x * s - expected).norm();
        worst = worst.max(err);
        report.push(format!("{alpha}: {:.6}", (x * x * s).re));
    }
    check(worst <= 1e-4, format!("x^2 S at |x|=1e-3 [{}], max err {worst:.1e}", report.join(", ")))
}

fn frobenius_recursion() -> Outcome {
    let re = |v: f64| c(v, 0.0);
    // alpha = 3, s = 2, b1 = 1: c1 = -b1 / h(3) = -1/4
    let series = frobenius_coefficients(&[re(-2.0), re(1.0)], 2.0, 1).map_err(fail)?;
    if series.coefficients != vec![re(1.0), re(-0.25)] {
        return Err(format!("hand case gave {:?}", series.coefficients));
    }
    let obstruction = frobenius_coefficients(&[re(-2.0), re(1.0)], -1.0, 4);
    let Err(Error::ResonanceObstruction { m: 3, remainder }) = obstruction else {
        return Err(format!("smaller root at alpha = 3 gave {obstruction:?}"));
    };

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for alpha in [1.0 / 3.0, 0.5, 0.7, 2.5] {
        let mut b = vec![re((1.0 - alpha * alpha) / 4.0)];
        b.extend((0..3).map(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))));
        let roots = indicial_roots(alpha);
        for s in [roots.larger(), roots.smaller()] {
            for n in [3, 6] {
                let Ok(series) = frobenius_coefficients(&b, s, n) else { continue };
                let slope = residual_order(&series, &b, 0.05, 0.02, 0.0).map_err(fail)?;
                worst = worst.max((slope - (s + n as f64 + 1.0)).abs());
            }
        }
    }
    check(
        worst <= 0.1,
        format!("c1 = -1/4 exact, obstruction at m=3 (R3 = {remainder}), max slope deviation {worst:.3}"),
    )
}

fn cone_angles() -> Outcome {
    let settings = QuadratureSettings::with_tol(1e-12);
    let third = q(1, 3);
    let w = PrymDifferential::from_points([(c(0., 0.), third), (c(1., 0.), third), (c(0., 1.), third)])
        .map_err(fail)?;
    let mut three_point = 0.0f64;
    for j in 0..3 {
        let m = cone_angle_measurement(&w, j, 1e-3, &settings).map_err(fail)?;
        three_point = three_point.max((m.angle - 2.0 * PI / 3.0).abs());
    }
    let mut single = 0.0f64;
    for alpha in [q(1, 3), q(1, 2), q(7, 10), q(1, 1), q(2, 1), q(5, 2), q(3, 1)] {
        let w = PrymDifferential::from_points([(c(0., 0.), alpha)]).map_err(fail)?;
        for eps in [1e-3, 0.1, 2.0] {
            let m = cone_angle_measurement(&w, 0, eps, &settings).map_err(fail)?;
            single = single.max((m.angle - 2.0 * PI * alpha.value()).abs() / (2.0 * PI * alpha.value()));
        }
    }
    check(
        three_point <= 1e-6 && single <= 1e-10,
        format!("three-point max err {three_point:.1e}, single-power max rel err {single:.1e}"),
    )
}

fn sc_parameter_problem() -> Outcome {
    let start = Instant::now();
    let half = q(1, 2);
    let rect = |w: f64| {
        PolygonSpec::new(vec![c(0., 0.), c(w, 0.), c(w, 1.), c(0., 1.)], vec![half; 4]).map_err(fail)
    };
    let mut lines = Vec::new();
    for (name, poly) in [("square", rect(1.0)?), ("2:1 rectangle", rect(2.0)?)] {
        let a = sc_solve_parameters(&poly).map_err(fail)?;
        let b = sc_solve_parameters(&poly).map_err(fail)?;
        if a != b {
            return Err(format!("{name}: repeated solves differ"));
        }
        if a.mismatch > 1e-6 || a.iterations > 200 {
            return Err(format!("{name}: mismatch {:.1e} after {} iterations", a.mismatch, a.iterations));
        }
        lines.push(format!("{name} {:.1e} in {} its", a.mismatch, a.iterations));
    }
    let third = q(1, 3);
    let tri = PolygonSpec::new(vec![c(0., 0.), c(1., 0.), Complex64::from_polar(1.0, PI / 3.0)], vec![third; 3])
        .map_err(fail)?;
    let t0 = Instant::now();
    let t = sc_solve_parameters(&tri).map_err(fail)?;
    let tri_time = t0.elapsed();
    if t.iterations != 0 || t.config != PrevertexConfig::triangle() {
        return Err(format!("triangle took {} iterations", t.iterations));
    }
    lines.push(format!("triangle 0 its in {:.1}us", tri_time.as_secs_f64() * 1e6));
    within(start.elapsed(), Duration::from_secs(30), lines.join(", "))
}

fn homotopy_invariance() -> Outcome {
    let tol_q = 1e-10;
    let settings = QuadratureSettings::with_tol(tol_q);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        // cone points avoid the band swept between the two routes
        let w = random_divisor(&mut rng, 3, |p| p.im.abs() < 0.8 && p.re.abs() < 2.6);
        let (a, b) = (c(-2.5, rng.gen_range(-0.3..0.3)), c(2.5, rng.gen_range(-0.3..0.3)));
        let upper = Path::new(vec![a, c(rng.gen_range(-1.0..1.0), 0.5), b], 1e-3).map_err(fail)?;
        let lower = Path::new(
            vec![a, c(-1.0, rng.gen_range(-0.5..0.0)), c(0.7, -0.6), c(1.5, rng.gen_range(-0.5..0.5)), b],
            1e-3,
        )
        .map_err(fail)?;
        let b0 = BranchState::principal(&w, a).map_err(fail)?;
        let f1 = integrate_along_path(&w, &upper, &b0, &settings).map_err(fail)?.value;
        let f2 = integrate_along_path(&w, &lower, &b0, &settings).map_err(fail)?.value;
        worst = worst.max((f1 - f2).norm() / f1.norm());
    }
    check(worst <= 10.0 * tol_q, format!("10 path pairs, max relative gap {worst:.1e} (limit {:.0e})", 10.0 * tol_q))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Gauss-Bonnet gate", gauss_bonnet_gate),
        ("Beta constant", beta_constant),
        ("monodromy isometries", monodromy_suite),
        ("exponential reconstruction", uniqueness_oracle),
        ("Schwarzian leading coefficient", schwarzian_leading_coefficient),
        ("Frobenius recursion", frobenius_recursion),
        ("cone angle", cone_angles),
        ("polygon parameter problem", sc_parameter_problem),
        ("homotopy invariance", homotopy_invariance),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({secs:.2}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.2}s): {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
