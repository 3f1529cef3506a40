//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use barrierlab_core::barriers::{
    build_barrier, build_exp_barrier, choose_c, eval_barrier, exp_crux, solve_profile, verify_strictness, BarrierKind, ExpProblem, ProfileKind,
    RadialBarrier, StructureBounds,
};
use barrierlab_core::counterexamples::{boundary_slope, build_gradient_blowup, build_smap_counterexample, ode_residual};
use barrierlab_core::geometry::{make_grid, Domain, Point};
use barrierlab_core::nonlinearity::{
    check_integral_condition, check_phi_b, decay_integral, default_nu_schedule, power_law_closed_form, Condition, GrowthFunction, GrowthKind,
    NU_CAP,
};
use barrierlab_core::solver::{check_weak_comparison, solve, ExponentField, FieldSpec, GridFunction, ProblemData, SolverConfig};
use barrierlab_core::spectral::EllipticityPair;
use barrierlab_core::verification::{boundary_harnack_quotient, check_smap, distance_comparability, Band, Field, Samples};
use barrierlab_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join("/")
}

fn power(k: f64) -> GrowthFunction {
    GrowthFunction::power_law(k, 1.0).unwrap()
}

fn power_law_suite() -> Check {
    let mut worst_rel: f64 = 0.0;
    for k in [1.0, 1.5, 2.0, 2.5, 3.0] {
        let phi = power(k);
        let verdict = check_phi_b(&phi, 1.0, &default_nu_schedule(NU_CAP), NU_CAP).map_err(e2s)?;
        ensure(verdict.holds() == (k <= 2.0), || format!("k = {k}: large-gradient verdict {}", verdict.label()))?;
        for nu in [1.0, 10.0, 1e3, 1e6] {
            let quad = decay_integral(&phi, 1.0, nu, 1.0).map_err(e2s)?;
            let closed = power_law_closed_form(k, 1.0, nu).map_err(e2s)?;
            // Direct integration of f(t) = ((k-1)t + ν^{1-k})^{1/(1-k)}, with
            // the layer near 0 resolved by a graded split.
            let f = |t: f64| if k == 1.0 { nu * (-t).exp() } else { ((k - 1.0) * t + nu.powf(1.0 - k)).powf(1.0 / (1.0 - k)) };
            let mut cuts = vec![0.0];
            let mut t = 1e-9;
            while t < 1.0 {
                cuts.push(t);
                t *= 4.0;
            }
            cuts.push(1.0);
            let direct: f64 = cuts.windows(2).map(|w| simpson(f, w[0], w[1], 400)).sum();
            let rel = ((quad - closed) / closed).abs();
            worst_rel = worst_rel.max(rel);
            ensure(rel <= 1e-8, || format!("k = {k}, ν = {nu}: quadrature {quad} vs closed form {closed}"))?;
            ensure(((direct - closed) / closed).abs() <= 1e-7, || format!("k = {k}, ν = {nu}: closed form {closed} vs direct {direct}"))?;
        }
        let osgood = check_integral_condition(&phi, Condition::Osgood, 1e-8).map_err(e2s)?;
        ensure(osgood.holds(), || format!("k = {k}: Osgood {}", osgood.label()))?;
        let ko = check_integral_condition(&phi, Condition::KellerOsserman, 1e-8).map_err(e2s)?;
        ensure(ko.holds() == (k <= 1.0), || format!("k = {k}: Keller-Osserman {}", ko.label()))?;
    }
    Ok(format!("worst quadrature relative error {worst_rel:.2e}"))
}

/// Same barrier with coefficient `c` and the profile re-solved from the
/// same initial value.
fn with_c(b: &RadialBarrier, phi: &GrowthFunction, c: f64) -> Result<RadialBarrier, Error> {
    let p = b.profile.as_ref().expect("profile barrier");
    let (kind, span) = match b.kind {
        BarrierKind::GrowingSuper => (ProfileKind::F, b.k - 1.0),
        _ => (ProfileKind::G, 1.0),
    };
    let profile = solve_profile(phi, c, p.initial, kind, span)?;
    let mut out = b.clone();
    out.m = profile.integral_to(span.min(profile.t_max))?;
    out.c = c;
    out.profile = Some(profile);
    Ok(out)
}

/// Coefficient at which the sufficient inequality fails by a factor two:
/// half of `(r* + Λ(n-1))/λ` for the linear φ, `r/(2λ)` for the
/// logarithmic one (its `g/φ(g)` term can be arbitrarily small).
fn c_bad(bounds: &StructureBounds, r: f64, r_star: f64) -> f64 {
    let lam = bounds.ell.lambda();
    match bounds.phi.kind() {
        GrowthKind::PowerLaw { .. } => (r_star + bounds.ell.big_lambda() * (bounds.n as f64 - 1.0)) / (2.0 * lam),
        _ => r / (2.0 * lam),
    }
}

const KINDS: [BarrierKind; 4] = [BarrierKind::SubAnnulus, BarrierKind::PositiveSubAnnulus, BarrierKind::GrowingSuper, BarrierKind::NegatedSub];

/// Largest profile coefficient for which the logarithmic φ admits a
/// sub-profile with `m <= 1` and `μ >= 1e-300` (found by scanning `C`).
const LOG_C_CAP: f64 = 7.5;

fn bounds_for(ell: EllipticityPair, n: usize, phi: &GrowthFunction, kind: BarrierKind) -> Result<StructureBounds, Error> {
    let b = StructureBounds::new(ell, n, phi.clone())?;
    if kind == BarrierKind::PositiveSubAnnulus {
        b.with_minorant(phi.clone(), 1.0)
    } else {
        Ok(b)
    }
}

/// Randomized structure bounds: λ ∈ [0.25, 1], Λ ∈ [λ, 2], n ∈ 2..=5,
/// r = r* ∈ [0.1, 1]. For the logarithmic φ, draws whose coefficient
/// exceeds `LOG_C_CAP` for some kind are redrawn.
fn random_configs(rng: &mut ChaCha8Rng, phi: &GrowthFunction, count: usize) -> Vec<(EllipticityPair, usize, f64)> {
    let mut out = Vec::new();
    while out.len() < count {
        let lambda = rng.gen_range(0.25..=1.0);
        let big = rng.gen_range(lambda..=2.0);
        let n = rng.gen_range(2..=5);
        let r = rng.gen_range(0.1..=1.0);
        let ell = EllipticityPair::new(lambda, big).unwrap();
        let capped = matches!(phi.kind(), GrowthKind::VarExpLog { .. });
        if capped && KINDS.iter().any(|&k| choose_c(&bounds_for(ell, n, phi, k).unwrap(), r) > LOG_C_CAP) {
            continue;
        }
        out.push((ell, n, r));
    }
    out
}

fn all_barriers() -> Result<Vec<(StructureBounds, RadialBarrier)>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let mut out = Vec::new();
    for phi in [power(1.0), GrowthFunction::var_exp_log(1.0).unwrap()] {
        for (ell, n, r) in random_configs(&mut rng, &phi, 20) {
            let center: Vec<f64> = (0..n).map(|i| 0.1 * i as f64).collect();
            for kind in KINDS {
                let bounds = bounds_for(ell, n, &phi, kind).map_err(e2s)?;
                let b = build_barrier(&bounds, &center, r, r, kind, 1.0, 0.0).map_err(|e| {
                    format!("{kind:?} ({}, λ={}, Λ={}, n={n}, r={r}): {e}", phi.description(), ell.lambda(), ell.big_lambda())
                })?;
                out.push((bounds, b));
            }
        }
    }
    Ok(out)
}

fn barrier_strictness() -> Check {
    let barriers = all_barriers()?;
    let mut violations = 0;
    for (bounds, b) in &barriers {
        let rep = verify_strictness(b, bounds, 10_000).map_err(|e| format!("{:?} r={}: {e}", b.kind, b.r))?;
        let sign_ok = rep.stations.iter().all(|&(_, m)| if rep.sub { m < 0.0 } else { m > 0.0 });
        ensure(rep.stations.len() == 10_000 && sign_ok, || format!("{:?}: margin of the wrong sign", b.kind))?;
        ensure(b.c >= choose_c(bounds, b.r_star), || "coefficient below the chosen value".into())?;
        let bad = with_c(b, &bounds.phi, c_bad(bounds, b.r, b.r_star)).map_err(e2s)?;
        match verify_strictness(&bad, bounds, 10_000) {
            Err(Error::StrictnessViolation { .. }) => violations += 1,
            other => return Err(format!("{:?} with halved C: expected StrictnessViolation, got {:?}", b.kind, other.map(|r| r.worst_margin))),
        }
    }
    Ok(format!("{} barriers strict, {violations} violations with halved C", barriers.len()))
}

fn fd_orders(b: &RadialBarrier, x: &[f64]) -> Result<(f64, f64), Error> {
    let n = x.len();
    let exact = eval_barrier(b, x)?;
    let errs = |h: f64| -> Result<(f64, f64), Error> {
        let (mut eg, mut eh) = (0.0f64, 0.0f64);
        for i in 0..n {
            let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
            xp[i] += h;
            xm[i] -= h;
            let g = (b.value(&xp)? - b.value(&xm)?) / (2.0 * h);
            eg = eg.max((g - exact.gradient[i]).abs());
            let (gp, gm) = (eval_barrier(b, &xp)?.gradient, eval_barrier(b, &xm)?.gradient);
            for j in 0..n {
                eh = eh.max(((gp[j] - gm[j]) / (2.0 * h) - exact.hessian.get(i, j)).abs());
            }
        }
        Ok((eg, eh))
    };
    let (a, c) = (errs(1e-3)?, errs(1e-4)?);
    Ok(((a.0 / c.0).log10(), (a.1 / c.1).log10()))
}

fn derivative_consistency() -> Check {
    let mut barriers: Vec<RadialBarrier> = all_barriers()?.into_iter().map(|(_, b)| b).collect();
    let pr = ExpProblem { p_minus: 1.5, p_plus: 2.5, q_minus: 2.0, q_plus: 2.0, grad_p_norm: 0.1, n: 2, big_m: 1.0, r: 0.1, a: 0.0 };
    barriers.push(build_exp_barrier(&pr, &[0.0, 0.0]).map_err(e2s)?.0);
    let mut worst = f64::INFINITY;
    for b in &barriers {
        let n = b.dimension();
        // Point off the coordinate axes, at a radius whose stencil does not
        // straddle profile value 1 (the kink of t(|ln t| + 1)).
        let (r0, r1) = (b.inner_radius(), b.outer_radius());
        let straddles = |rho: f64| -> Result<bool, String> {
            let lo = b.radial(rho - 0.01).map_err(e2s)?.profile - 1.0;
            let hi = b.radial(rho + 0.01).map_err(e2s)?.profile - 1.0;
            Ok(lo * hi <= 0.0)
        };
        let mut rho = 0.5 * (r0 + r1);
        for frac in [0.5, 0.3, 0.7, 0.2, 0.8] {
            rho = r0 + frac * (r1 - r0);
            if b.kind == BarrierKind::ExpSuper || !straddles(rho)? {
                break;
            }
        }
        let dir: Vec<f64> = (0..n).map(|i| 1.0 + 0.3 * i as f64).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x: Vec<f64> = b.center.iter().zip(&dir).map(|(c, d)| c + rho * d / norm).collect();
        let (og, oh) = fd_orders(b, &x).map_err(e2s)?;
        worst = worst.min(og).min(oh);
        ensure(og >= 1.9 && oh >= 1.9, || format!("{:?} r={} n={n}: orders {og:.3}, {oh:.3}", b.kind, b.r))?;
    }
    Ok(format!("{} barriers, lowest observed order {worst:.3}", barriers.len()))
}

fn counterexample_residuals() -> Check {
    let uniform = |a: f64, b: f64, h: f64| -> Vec<f64> {
        let n = ((b - a) / h).round() as usize;
        (0..=n).map(|i| a + i as f64 * h).collect()
    };
    let h = build_smap_counterexample(&power(0.5), true).map_err(e2s)?;
    // Kink-free pieces of (-3, 1), kinks at -2 and 0.
    let mut res_h: f64 = 0.0;
    for (a, b) in [(-2.99, -2.01), (-1.99, -0.01), (0.01, 0.99)] {
        res_h = res_h.max(ode_residual(&h, &uniform(a, b, 1e-3)).map_err(e2s)?);
    }
    ensure(res_h <= 1e-5, || format!("H residual {res_h:e}"))?;
    let samples = h.samples(2001).map_err(e2s)?;
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let vs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    // Independent picture: the closed form has a plateau at 1 on [-2, 0].
    for (x, v) in xs.iter().zip(&vs) {
        let expect = if *x >= 0.0 { 1.0 - x.powi(3) / 12.0 } else if *x >= -2.0 { 1.0 } else { 1.0 - (-2.0 - x).powi(3) / 12.0 };
        ensure((v - expect).abs() < 1e-12, || format!("H({x}) = {v}, expected {expect}"))?;
    }
    let smap = check_smap(&Samples::from_line(&xs, &vs).map_err(e2s)?);
    ensure(!smap.passed, || "H does not violate the strong maximum principle".into())?;

    let f = build_gradient_blowup(&power(3.0), 10.0, 1.0).map_err(e2s)?;
    let res_f = ode_residual(&f, &uniform(0.1, 0.99, 2e-4)).map_err(e2s)?;
    ensure(res_f <= 1e-5, || format!("F residual {res_f:e}"))?;
    let mut prev = 0.0;
    let mut quotients = Vec::new();
    for nu in [1e2, 1e4, 1e6] {
        let c = build_gradient_blowup(&power(3.0), nu, 1.0).map_err(e2s)?;
        let s = 1e-3 / (nu * nu);
        let q = boundary_slope(&c, s).map_err(e2s)?;
        // f = (2t + ν⁻²)^{-1/2}: exact quotient.
        let exact = ((2.0 * s + 1.0 / (nu * nu)).sqrt() - 1.0 / nu) / s;
        ensure(((q - exact) / exact).abs() < 1e-6 && q > 0.99 * nu && q > 10.0 * prev, || format!("ν = {nu}: slope quotient {q}"))?;
        ensure((c.eval(0.0).map_err(e2s)?.1 - nu).abs() <= 1e-12 * nu, || format!("ν = {nu}: F'(0) ≠ ν"))?;
        prev = q;
        quotients.push(q);
    }
    Ok(format!("H residual {res_h:.2e}, F residual {res_f:.2e}, slopes {}", sci(&quotients)))
}

fn annulus() -> Domain {
    Domain::annulus([0.0, 0.0], 1.0, 2.0).unwrap()
}

/// Radial p-harmonic function on `1 < |x| < 2` in the plane, 0 inside, 1 outside.
fn radial_exact(p: f64, rho: f64) -> f64 {
    if p == 2.0 {
        rho.ln() / 2f64.ln()
    } else {
        let e = (p - 2.0) / (p - 1.0);
        (rho.powf(e) - 1.0) / (2f64.powf(e) - 1.0)
    }
}

fn annulus_data(x: Point) -> f64 {
    if x[0].hypot(x[1]) < 1.5 {
        0.0
    } else {
        1.0
    }
}

fn constant_exp(p: f64, q: f64, a: f64) -> ExponentField {
    ExponentField::constant(p, q, a)
}

fn solve_annulus(p: f64, h: f64) -> Result<GridFunction, String> {
    let grid = make_grid(&annulus(), h).map_err(e2s)?;
    let rep = solve(&grid, &constant_exp(p, 2.0, 0.0), &annulus_data, &|_| 0.0, &SolverConfig::default()).map_err(e2s)?;
    Ok(rep.u)
}

fn solver_oracle() -> Check {
    let mut summary = Vec::new();
    for (p, mid) in [(2.0, 0.58496), (4.0, 0.52837)] {
        ensure(((radial_exact(p, 1.5) - mid) / mid).abs() < 1e-4, || format!("p = {p}: oracle value {}", radial_exact(p, 1.5)))?;
        let mut errs = Vec::new();
        for h in [0.04, 0.02, 0.01] {
            let u = solve_annulus(p, h)?;
            let err = u.rows().map(|(x, y, v)| (v - radial_exact(p, x.hypot(y))).abs()).fold(0.0, f64::max);
            errs.push(err);
            if h == 0.02 {
                ensure(err <= 5.0 * h * h, || format!("p = {p}: max error {err:e} > 5h² at h = 0.02"))?;
                let v = u.interpolate([1.5, 0.0]).map_err(e2s)?;
                ensure(((v - mid) / mid).abs() <= 0.01, || format!("p = {p}: u(1.5) = {v}"))?;
            }
        }
        let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        ensure(orders.iter().all(|&o| o >= 1.58), || format!("p = {p}: orders {orders:?}"))?;
        summary.push(format!("p={p}: errors {} orders {orders:.2?}", sci(&errs)));
    }
    Ok(summary.join("; "))
}

fn discrete_comparison() -> Check {
    let ball = Domain::ball([0.0, 0.0], 1.0).unwrap();
    let zero = |_: Point| 0.0;
    let one = |_: Point| 1.0;
    let bump = |x: Point| 1.0 - x[0] * x[0] - x[1] * x[1];
    let tilt = |x: Point| 0.5 + 0.25 * x[0];
    let tilt_up = |x: Point| 0.6 + 0.25 * x[0] + 0.1 * x[1] * x[1];
    let ring_low = |x: Point| if x[0].hypot(x[1]) < 1.5 { 0.0 } else { 1.0 };
    let ring_high = |x: Point| if x[0].hypot(x[1]) < 1.5 { 0.2 } else { 1.0 };
    let var_p = ExponentField {
        p: FieldSpec::AngularSine { base: 2.0, amplitude: 0.3, center: [0.0, 0.0] },
        q: FieldSpec::Constant { value: 2.5 },
        a: -1.0,
    };
    type Scenario<'a> = (&'a str, Domain, ExponentField, ProblemData<'a>, ProblemData<'a>, [f64; 2]);
    let scenarios: Vec<Scenario> = vec![
        (
            "p=2 ball, f 0 vs 1",
            ball,
            constant_exp(2.0, 2.0, -1.0),
            ProblemData { boundary: &zero, source: &zero },
            ProblemData { boundary: &zero, source: &one },
            [0.05, 0.025],
        ),
        (
            "p=3 ball, a=-2, q=3",
            ball,
            constant_exp(3.0, 3.0, -2.0),
            ProblemData { boundary: &tilt, source: &bump },
            ProblemData { boundary: &tilt_up, source: &one },
            [0.05, 0.025],
        ),
        (
            "p=2+0.3 sinθ annulus",
            annulus(),
            var_p,
            ProblemData { boundary: &ring_low, source: &zero },
            ProblemData { boundary: &ring_high, source: &zero },
            [0.05, 0.025],
        ),
    ];
    let cfg = SolverConfig::default();
    let mut out = Vec::new();
    for (name, domain, exp, u_data, v_data, hs) in &scenarios {
        for &h in hs {
            let grid = make_grid(domain, h).map_err(e2s)?;
            let rep = check_weak_comparison(&grid, exp, u_data, v_data, &cfg).map_err(|e| format!("{name}, h={h}: {e}"))?;
            // Recompute the gap from two direct solves.
            let u = solve(&grid, exp, u_data.boundary, u_data.source, &cfg).map_err(e2s)?.u;
            let v = solve(&grid, exp, v_data.boundary, v_data.source, &cfg).map_err(e2s)?.u;
            let gap = grid.unknowns().iter().map(|&k| v.values[k] - u.values[k]).fold(f64::INFINITY, f64::min);
            ensure((gap - rep.min_gap).abs() <= 1e-9, || format!("{name}, h={h}: reported gap {} vs {gap}", rep.min_gap))?;
            ensure(rep.passed && gap >= -10.0 * h * h, || format!("{name}, h={h}: min(v-u) = {gap:e}"))?;
            out.push(format!("{gap:.2e}"));
        }
    }
    Ok(format!("min(v-u) per scenario/resolution: {}", out.join(", ")))
}

fn boundary_estimates() -> Check {
    let domain = annulus();
    let w = [1.0, 0.0];
    let band = Band { r: 0.15, d_min: 0.005, d_max: 0.05 };
    let exact = |x: Point| radial_exact(2.0, x[0].hypot(x[1]));
    let double = |x: Point| 2.0 * radial_exact(2.0, x[0].hypot(x[1]));
    let u = Field::Analytic { f: &exact, sample_h: 0.002 };
    let v = Field::Analytic { f: &double, sample_h: 0.002 };
    let dist = distance_comparability(&u, &domain, w, &band).map_err(e2s)?;
    let c_high = dist.get("c_high").unwrap_or(f64::NAN);
    // u/d → 1/log 2 at the inner circle.
    let target = 1.0 / 2f64.ln();
    ensure(dist.passed && ((c_high - target) / target).abs() <= 0.05, || format!("oracle c_high = {c_high}"))?;
    let harnack = boundary_harnack_quotient(&u, &v, &domain, w, &band, 3.0).map_err(e2s)?;
    let (qmin, qmax) = (harnack.get("quotient_min").unwrap_or(f64::NAN), harnack.get("quotient_max").unwrap_or(f64::NAN));
    ensure(harnack.passed && qmin == 0.5 && qmax == 0.5, || format!("oracle quotient range [{qmin}, {qmax}]"))?;

    let exp = ExponentField {
        p: FieldSpec::AngularSine { base: 2.0, amplitude: 0.3, center: [0.0, 0.0] },
        q: FieldSpec::Constant { value: 2.0 },
        a: 0.0,
    };
    let band = Band { r: 0.15, d_min: 0.0, d_max: 0.15 };
    let twice = |x: Point| 2.0 * annulus_data(x);
    let mut levels = Vec::new();
    for h in [0.02, 0.01] {
        let grid = make_grid(&domain, h).map_err(e2s)?;
        let cfg = SolverConfig::default();
        let u = solve(&grid, &exp, &annulus_data, &|_| 0.0, &cfg).map_err(e2s)?.u;
        let v = solve(&grid, &exp, &twice, &|_| 0.0, &cfg).map_err(e2s)?.u;
        let d = distance_comparability(&Field::Grid(&u), &domain, w, &band).map_err(e2s)?;
        let q = boundary_harnack_quotient(&Field::Grid(&u), &Field::Grid(&v), &domain, w, &band, 3.0).map_err(e2s)?;
        ensure(d.passed && q.passed, || format!("variable p, h={h}: distance {} harnack {}", d.passed, q.passed))?;
        levels.push([
            d.get("c_high").unwrap_or(f64::NAN),
            d.get("c_low").unwrap_or(f64::NAN),
            q.get("quotient_min").unwrap_or(f64::NAN),
            q.get("quotient_max").unwrap_or(f64::NAN),
        ]);
    }
    for (i, (a, b)) in levels[0].iter().zip(&levels[1]).enumerate() {
        ensure(((a - b) / b).abs() <= 0.2, || format!("variable p: constant {i} moved {a} -> {b}"))?;
    }
    Ok(format!("oracle c_high {c_high:.5} (target {target:.5}), quotient [{qmin}, {qmax}]; variable p constants {levels:.4?}"))
}

fn exp_barrier_inequality() -> Check {
    let pr = ExpProblem { p_minus: 1.5, p_plus: 2.5, q_minus: 2.0, q_plus: 2.0, grad_p_norm: 0.1, n: 2, big_m: 1.0, r: 0.1, a: 0.0 };
    let (_, mu) = build_exp_barrier(&pr, &[0.0, 0.0]).map_err(e2s)?;
    let crux = exp_crux(&pr, mu);
    // The inequality written out for a = 0.
    let g = pr.grad_p_norm;
    let by_hand = mu * (8.0 * pr.r * g - 2.0 * (pr.p_minus - 1.0))
        + 2.0 * pr.r * g * ((4.0 / (1.0 - (-3.0 * mu).exp())).ln() + pr.big_m.ln().abs() + pr.r.ln().abs())
        + pr.n as f64
        + pr.p_plus
        - 2.0;
    ensure(mu <= 4.0 && crux <= 0.0 && (crux - by_hand).abs() <= 1e-12, || format!("μ = {mu}, crux {crux}, by hand {by_hand}"))?;
    let far = ExpProblem { r: 2.0, ..pr };
    ensure(matches!(build_exp_barrier(&far, &[0.0, 0.0]), Err(Error::RadiusTooLarge { .. })), || "r = 2 accepted".into())?;
    Ok(format!("μ = {mu}, crux {crux:.4}"))
}

fn run_cli(config: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_barrierlab"))
        .args(["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "17"])
        .env_remove("BARRIERLAB_THREADS")
        .output()
        .map_err(e2s)?
        .status;
    ensure(status.code().is_some_and(|c| c == 0 || c == 2), || format!("{}: exit {status}", config.display()))
}

fn determinism() -> Check {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().map_err(e2s)?;
    let mut compared = 0;
    for name in ["build-barrier-sub", "counterexample-h", "solve-annulus-p4", "verify-smap-grid", "reproduce-figure1", "analyze-phi-k3"] {
        let cfg = configs.join(format!("{name}.json"));
        let (a, b) = (dir.path().join(format!("{name}-1")), dir.path().join(format!("{name}-2")));
        run_cli(&cfg, &a)?;
        run_cli(&cfg, &b)?;
        let mut files: Vec<_> = std::fs::read_dir(&a).map_err(e2s)?.map(|e| e.unwrap().file_name()).collect();
        files.sort();
        for f in files.iter().filter(|f| f.to_string_lossy().ends_with(".csv")) {
            let x = std::fs::read(a.join(f)).map_err(e2s)?;
            let y = std::fs::read(b.join(f)).map_err(e2s)?;
            ensure(x == y, || format!("{name}/{}: artifacts differ", f.to_string_lossy()))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} CSV files byte-identical"))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 9] = [
        ("power-law condition suite", power_law_suite, Duration::from_secs(5)),
        ("barrier strictness", barrier_strictness, Duration::from_secs(60)),
        ("derivative consistency", derivative_consistency, Duration::from_secs(30)),
        ("counterexample residuals", counterexample_residuals, Duration::from_secs(10)),
        ("solver oracle accuracy", solver_oracle, Duration::from_secs(120)),
        ("discrete comparison", discrete_comparison, Duration::from_secs(120)),
        ("boundary estimates", boundary_estimates, Duration::from_secs(180)),
        ("exponential barrier inequality", exp_barrier_inequality, Duration::from_secs(1)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(m) if elapsed > *budget => Err(format!("{m}; took {elapsed:.1?}, budget {budget:?}")),
            r => r,
        };
        match result {
            Ok(m) => println!("criterion {} {name}: PASS ({elapsed:.2?}) {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({elapsed:.2?}) {m}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
