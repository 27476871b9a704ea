//! The ten acceptance criteria. Each test prints one PASS/FAIL line with the
//! measured residual, the tolerance and the runtime, then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use equichar::app::{self, Mode, Numerics, OutputConfig, ProfileConfig, RunConfig, Topology};
use equichar::charforms::{self, ConnectionFamily};
use equichar::matforms::{apply_germ, char_poly, exp_trace_germ, star_second, DEFAULT_SERIES_ORDER as K};
use equichar::oracle::{self, DEFAULT_FD_STEP};
use equichar::skr::{self, ProfileFn, SkrProfile};
use equichar::{AnalyticGerm, ExteriorForm, FormMatrix, QuadratureSpec};
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Writes a line straight to the process stdout, past the harness capture, so
/// every verdict shows up in a plain `cargo test`.
macro_rules! report {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn verdict(n: u32, name: &str, residual: f64, tol: f64, elapsed: Duration, limit: Option<f64>) -> bool {
    let secs = elapsed.as_secs_f64();
    let in_time = limit.map_or(true, |l| secs < l);
    let ok = residual <= tol && in_time;
    let budget = limit.map_or(String::new(), |l| format!(", budget {l} s"));
    report!(
        "acceptance {n:>2} {name}: {} residual {residual:.3e} (tolerance {tol:.0e}), {secs:.2} s{budget}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn reducible_config(rng: &mut StdRng) -> RunConfig {
    loop {
        let deg = rng.gen_range(1..=4);
        let mut q = vec![rng.gen_range(0.5..1.5)];
        q.extend((0..deg).map(|_| rng.gen_range(-0.5..0.5)));
        let cfg = RunConfig {
            profile: ProfileConfig {
                mode: Mode::Reducible,
                phi: None,
                q: Some(ProfileFn::Polynomial(q)),
                c_bar: None,
                a: rng.gen_range(0.5..2.0),
                base_curvature: rng.gen_range(-1.0..1.0),
                tau_min: rng.gen_range(-0.9..-0.2),
            },
            numerics: Numerics::default(),
            topology: Topology { signature: rng.gen_range(-3..=3), ..Topology::default() },
            output: OutputConfig::default(),
        };
        if cfg.validate().is_ok() {
            return cfg;
        }
    }
}

/// Irreducible profile with |φ|, |ψ| ≤ `bound` on its domain; c̄ on either side.
fn irreducible_profile(rng: &mut StdRng, flat: bool, bound: f64) -> SkrProfile {
    loop {
        let positive_side = rng.gen_bool(0.3);
        let sign = if positive_side { -1.0 } else { 1.0 };
        let phi = vec![sign * rng.gen_range(0.3..0.8), rng.gen_range(-0.4..0.4), rng.gen_range(-0.3..0.3)];
        let c_bar = if positive_side { rng.gen_range(0.8..2.5) } else { rng.gen_range(-2.5..-0.8) };
        let base = if flat { 0.0 } else { rng.gen_range(-1.0..1.0) };
        let Ok(p) = SkrProfile::irreducible(ProfileFn::Polynomial(phi), c_bar, rng.gen_range(0.5..2.0), base, rng.gen_range(-0.6..-0.2))
        else {
            continue;
        };
        let bounded = p.tau_grid(41).iter().all(|&t| {
            let d = skr::derived_functions(&p, t).unwrap();
            d.phi.abs() <= bound && d.psi.abs() <= bound && d.phi.abs() > 0.05
        });
        if bounded {
            return p;
        }
    }
}

#[test]
fn criterion_01_reducible_vanishing() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut residual: f64 = 0.0;
    for _ in 0..20 {
        let cfg = reducible_config(&mut rng);
        let rep = app::eta_invariant(&cfg).unwrap();
        for row in &rep.lform {
            residual = residual.max(row.l4.value.abs()).max(row.l4_sqrt_route.abs());
        }
        // TL₃ is held to 1e-10 against L₄'s 1e-12; rescale onto one scale.
        let tl = rep.boundary.tl3_closed.value.abs().max(rep.boundary.tl3_direct.value.abs());
        residual = residual.max(tl * 1e-2);
        let eta_exact = rep.eta.value == -(cfg.topology.signature as f64);
        if !eta_exact {
            residual = f64::INFINITY;
        }
    }
    let ok = verdict(1, "reducible vanishing", residual, 1e-12, start.elapsed(), Some(5.0));
    assert!(ok);
}

#[test]
fn criterion_02_closed_vs_direct_transgression() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    let quad = QuadratureSpec::new(32).unwrap();
    let tol = 1e-8;
    let mut residual: f64 = 0.0;
    let (mut admitted, mut skipped) = (0, 0);
    let mut skipped_residual: f64 = 0.0;
    while admitted < 20 {
        let p = irreducible_profile(&mut rng, false, 0.9);
        let c = skr::transgression_pullback_closed(&p, K, &quad).unwrap().value.get(&[1, 2, 3]);
        let direct = skr::transgression_pullback_direct(&p, K, &quad).unwrap();
        let d = direct.value.get(&[1, 2, 3]);
        let rel = (c - d).abs() / d.abs();
        // A comparison at this tolerance is only meaningful where the direct
        // route's own K = 16 truncation bound resolves it.
        if direct.tail <= tol * d.abs() {
            residual = residual.max(rel);
            admitted += 1;
        } else {
            skipped_residual = skipped_residual.max(rel);
            skipped += 1;
        }
    }
    let ok = verdict(2, "closed vs direct transgression", residual, tol, start.elapsed(), Some(10.0));
    report!(
        "   {admitted} profiles resolved at K = {K}; {skipped} with a larger truncation bound (worst residual {skipped_residual:.3e})"
    );
    assert!(ok);
}

#[test]
fn criterion_03_l_form_double_route() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(3);
    let mut residual: f64 = 0.0;
    for _ in 0..10 {
        let p = irreducible_profile(&mut rng, false, 0.9);
        for k in 0..10 {
            let tau = p.tau_min * (0.05 + 0.09 * k as f64);
            let closed = skr::l_form_closed(&p, tau).unwrap().top();
            let generic = skr::l_form_generic(&p, tau, K).unwrap().value.top();
            residual = residual.max((closed - generic).abs() / closed.abs().max(generic.abs()));
        }
    }
    let ok = verdict(3, "L-form double route", residual, 1e-10, start.elapsed(), Some(5.0));
    assert!(ok, "the square-root route and det^(1/2) disagree on the degree-4 coefficient");
}

/// Pfaffian of a 4×4 antisymmetric matrix of even forms.
fn pfaffian(m: &FormMatrix) -> ExteriorForm {
    let g = |i, j| *m.get(i, j);
    g(0, 1) * g(2, 3) - g(0, 2) * g(1, 3) + g(0, 3) * g(1, 2)
}

#[test]
fn criterion_04_eigenvalue_structure() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    let mut residual: f64 = 0.0;
    let mut with_pfaffian: f64 = 0.0;
    let mut profiles: Vec<SkrProfile> = (0..5).map(|_| irreducible_profile(&mut rng, false, 0.9)).collect();
    profiles.extend((0..5).map(|_| reducible_config(&mut rng).skr_profile().unwrap()));
    for p in &profiles {
        for k in 0..10 {
            let tau = p.tau_min * (0.05 + 0.09 * k as f64);
            let d = skr::derived_functions(p, tau).unwrap();
            let cc = skr::curvature_components(p, tau).unwrap();
            // R_𝔤(X) = R − ∇X carries −φ, −ψ on its diagonal blocks.
            let a = skr::a_form(-d.phi, -d.psi, &cc);
            let rg = skr::equivariant_curvature_at(p, tau).unwrap();
            let cp = char_poly(&rg).unwrap();
            let z = ExteriorForm::zero(4);
            let expect = [z, z, a, z, ExteriorForm::scalar(4, 1.0)];
            for (got, want) in cp.iter().zip(&expect) {
                residual = residual.max(got.max_abs_diff(want));
            }
            let pf = pfaffian(&rg);
            with_pfaffian = with_pfaffian.max(cp[0].max_abs_diff(&(pf * pf)));
        }
    }
    let ok = verdict(4, "eigenvalue structure", residual, 1e-12, start.elapsed(), None);
    report!("   constant term against Pf(R_g(X))^2 instead of 0: residual {with_pfaffian:.3e}");
    assert!(ok, "det(lambda - R_g(X)) has constant term Pf^2, not 0");
}

#[test]
fn criterion_05_sqrt_a_identity() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let mut residual: f64 = 0.0;
    for _ in 0..10 {
        let p = irreducible_profile(&mut rng, false, 0.9);
        for k in 0..10 {
            let tau = p.tau_min * (0.05 + 0.09 * k as f64);
            let d = skr::derived_functions(&p, tau).unwrap();
            let cc = skr::curvature_components(&p, tau).unwrap();
            let s = skr::sqrt_a_coeffs(d.phi, d.psi, &cc).unwrap().form();
            residual = residual.max((s * s).max_abs_diff(&skr::a_form(d.phi, d.psi, &cc)));
        }
    }
    let ok = verdict(5, "sqrt(A) identity", residual, 1e-13, start.elapsed(), None);
    assert!(ok);
}

#[test]
fn criterion_06_oracle_curvature() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(6);
    let mut profiles: Vec<SkrProfile> = (0..3).map(|_| irreducible_profile(&mut rng, true, 0.9)).collect();
    // One profile with c̄ > 0 and φ < 0 is always included.
    profiles.push(SkrProfile::irreducible(ProfileFn::Polynomial(vec![-0.45, 0.2, 0.1]), 1.2, 0.8, 0.0, -0.5).unwrap());
    for _ in 0..2 {
        let mut p = reducible_config(&mut rng).skr_profile().unwrap();
        p.base_curv = 0.0;
        profiles.push(p);
    }
    let mut curvature: f64 = 0.0;
    let mut vanishing: f64 = 0.0;
    for p in &profiles {
        for pt in app::oracle_points(p, 10) {
            let fd = oracle::riemann_frame_fd(p, &pt, DEFAULT_FD_STEP).unwrap();
            let cc = skr::curvature_components(p, pt.tau).unwrap();
            let closed = oracle::tensor_from_matrix(&skr::curvature_matrix(&cc));
            let flat = |t: &oracle::Tensor4| t.iter().flatten().flatten().flatten().copied().collect::<Vec<f64>>();
            let (a, b) = (flat(&fd), flat(&closed));
            let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            curvature = curvature.max(diff / scale);
            vanishing = vanishing.max(oracle::three_vertical_max(&fd));
        }
    }
    // Both bounds must hold; report the worse ratio to its tolerance.
    let residual = (curvature / 1e-5).max(vanishing / 1e-6) * 1e-5;
    let ok = verdict(6, "oracle curvature", residual, 1e-5, start.elapsed(), Some(30.0));
    report!("   curvature {curvature:.3e} (tolerance 1e-5), three-vertical components {vanishing:.3e} (tolerance 1e-6)");
    assert!(ok);
}

fn e3(c: f64, idx: &[usize]) -> ExteriorForm {
    ExteriorForm::e(3, c, idx)
}

/// Random admissible family in a 3-dim coframe with curvature R⁰ + tC₁ + t²Θ².
fn random_family(rng: &mut StdRng) -> ConnectionFamily {
    let mut theta = FormMatrix::zeros(4, 3);
    let mut r0 = FormMatrix::zeros(4, 3);
    let mut r1 = FormMatrix::zeros(4, 3);
    for i in 0..4 {
        for j in i + 1..4 {
            let th = (1..=3).fold(ExteriorForm::zero(3), |acc, k| acc + e3(rng.gen_range(-0.5..0.5), &[k]));
            let mut a = ExteriorForm::zero(3);
            let mut b = ExteriorForm::zero(3);
            for (p, q) in [(1, 2), (1, 3), (2, 3)] {
                a += e3(rng.gen_range(-1.0..1.0), &[p, q]);
                b += e3(rng.gen_range(-1.0..1.0), &[p, q]);
            }
            theta.set_antisymmetric(i, j, th);
            r0.set_antisymmetric(i, j, a);
            r1.set_antisymmetric(i, j, b);
        }
    }
    let r2 = (&theta * &theta).degree_component(2);
    let mut nx0 = FormMatrix::zeros(4, 3);
    nx0.set_antisymmetric(0, 1, ExteriorForm::scalar(3, rng.gen_range(-0.9..0.9)));
    let mut nx1 = nx0.clone();
    nx1.set_antisymmetric(2, 3, ExteriorForm::scalar(3, rng.gen_range(-0.9..0.9)));
    ConnectionFamily::new(theta, nx0, nx1, vec![r0, r1, r2]).unwrap()
}

#[test]
fn criterion_07_transgression_equivalences() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(7);
    let f = AnalyticGerm::l_log();
    let quad = QuadratureSpec::default();
    let mut residual: f64 = 0.0;
    for _ in 0..8 {
        let fam = random_family(&mut rng);
        let d3 = charforms::transgression_degree3(&f, &fam, &quad, K).unwrap().value;
        let alt = charforms::transgression_degree3_alt(&f, &fam, &quad, K).unwrap().value;
        let full = charforms::transgression(&f, &fam, &quad, K).unwrap().value.degree_component(3);
        residual = residual.max(d3.max_abs_diff(&alt)).max(d3.max_abs_diff(&full));
        for t in [0.0, 0.3, 0.7, 1.0] {
            let nx = fam.nabla_x_at(t);
            let r = fam.curvature_at(t);
            let rg = fam.equivariant_curvature_at(t);
            // exp Tr f(Rᵗ − ∇ᵗX) = exp Tr f(∇ᵗX)·(1 − Tr[f′(∇ᵗX)Rᵗ]) through degree 3.
            let lhs = exp_trace_germ(&f, &rg, K).unwrap().value;
            let e0 = exp_trace_germ(&f, &nx, K).unwrap().value;
            let fp = apply_germ(&f.derivative(), &nx, K).unwrap().value;
            let rhs = e0 * (ExteriorForm::scalar(3, 1.0) - (&fp * &r).trace());
            residual = residual.max(lhs.max_abs_diff(&rhs));
            // f′(−∇ᵗX + Rᵗ) = f′(−∇ᵗX) + f^{[2]}(−∇ᵗX)*Rᵗ, exact in a 3-dim coframe.
            let minus = nx.scale(-1.0);
            let lhs = apply_germ(&f.derivative(), &rg, K).unwrap().value;
            let rhs = &apply_germ(&f.derivative(), &minus, K).unwrap().value + &star_second(&f, &minus, &r, K).unwrap().value;
            residual = residual.max(lhs.max_abs_diff(&rhs));
        }
    }
    let ok = verdict(7, "transgression-formula equivalences", residual, 1e-10, start.elapsed(), None);
    assert!(ok);
}

#[test]
fn criterion_08_x_to_zero_limit() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(8);
    let f = AnalyticGerm::l_log();
    let quad = QuadratureSpec::default();
    let mut worst_slope = f64::INFINITY;
    for _ in 0..4 {
        let fam = random_family(&mut rng);
        let lim = charforms::transgression_degree3_x_zero(&f, &fam, &quad).unwrap();
        let scales = [0.4, 0.2, 0.1, 0.05, 0.025];
        let pts: Vec<(f64, f64)> = scales
            .iter()
            .map(|&s| {
                let t = charforms::transgression_degree3(&f, &fam.with_scaled_x(s), &quad, K).unwrap().value;
                (s.ln(), t.max_abs_diff(&lim).ln())
            })
            .collect();
        // Least-squares slope of log error against log scale.
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        worst_slope = worst_slope.min(sxy / sxx);
    }
    // Residual is the shortfall of the measured order below 1.9.
    let residual = (1.9 - worst_slope).max(0.0);
    let ok = verdict(8, "X -> 0 limit", residual, 0.0, start.elapsed(), None);
    report!("   measured convergence order {worst_slope:.4} (required >= 1.9)");
    assert!(ok);
}

type Q = Ratio<i128>;

/// Bernoulli numbers B₀..B_n from Σ_{k≤m} C(m+1,k)B_k = 0.
fn bernoulli(n: usize) -> Vec<Q> {
    let mut b = vec![Q::from_integer(1)];
    for m in 1..=n {
        let mut binom: i128 = 1;
        let mut acc = Q::from_integer(0);
        for (k, bk) in b.iter().enumerate() {
            acc += *bk * binom;
            binom = binom * (m as i128 + 1 - k as i128) / (k as i128 + 1);
        }
        b.push(-acc / Q::from_integer(m as i128 + 1));
    }
    b
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

#[test]
fn criterion_09_germ_coefficients() {
    let start = Instant::now();
    let n = 12;
    let b = bernoulli(n);
    let mut fact: i128 = 1;
    // (x/2)/tanh(x/2) = Σ B_k x^k / k! over even k.
    let mut genus = vec![Q::from_integer(0); n + 1];
    for k in 0..=n {
        if k > 0 {
            fact *= k as i128;
        }
        if k % 2 == 0 {
            genus[k] = b[k] / Q::from_integer(fact);
        }
    }
    let stated = [(0, Q::from_integer(1)), (2, Q::new(1, 12)), (4, Q::new(-1, 720)), (6, Q::new(1, 30240))];
    let mut residual: f64 = 0.0;
    for (k, v) in stated {
        assert_eq!(genus[k], v, "rational oracle disagrees with the stated coefficient of x^{k}");
    }
    let g = AnalyticGerm::l_genus();
    for (k, v) in genus.iter().enumerate() {
        residual = residual.max((g.coeff(k) - to_f64(*v)).abs());
    }
    // log: n h_n = n g_n − Σ_{k<n} k h_k g_{n−k}; the germ is ½·log.
    let mut h = vec![Q::from_integer(0); n + 1];
    for m in 1..=n {
        let mut acc = genus[m] * m as i128;
        for k in 1..m {
            acc -= h[k] * genus[m - k] * k as i128;
        }
        h[m] = acc / Q::from_integer(m as i128);
    }
    let l = AnalyticGerm::l_log();
    for (k, v) in h.iter().enumerate() {
        residual = residual.max((l.coeff(k) - to_f64(*v / 2)).abs());
    }
    residual = residual.max((l.derivative_at_zero(2) - 1.0 / 12.0).abs());
    let ok = verdict(9, "germ coefficients", residual, 1e-15, start.elapsed(), None);
    assert!(ok);
}

#[test]
fn criterion_10_volume_reduction() {
    let start = Instant::now();
    let p = SkrProfile::irreducible(ProfileFn::Polynomial(vec![0.5, 0.25, -0.1]), -1.3, 1.1, 0.0, -0.6)
        .unwrap()
        .with_topology(1.0, 2.0 * std::f64::consts::PI)
        .unwrap();
    let test_fn = |tau: f64| (1.0 + tau * tau).recip() + (3.0 * tau).sin();
    let quad = QuadratureSpec::new(32).unwrap();
    // Reduced: fiber_period · base_area · ∫ F · 2|τ − c̄| dτ.
    let reduced: f64 = quad
        .rule(p.tau_min, 0.0)
        .unwrap()
        .iter()
        .map(|&(t, w)| w * test_fn(t) * p.horizontal_weight(t))
        .sum::<f64>()
        * p.fiber_period
        * p.base_area;
    // Direct: product rule over (τ, s, x, y) ∈ [τ_min, 0] × [0, period) × [0, 1]² with √det g.
    let rt = quad.rule(p.tau_min, 0.0).unwrap();
    let rs = QuadratureSpec::new(6).unwrap().rule(0.0, p.fiber_period).unwrap();
    let rxy = QuadratureSpec::new(4).unwrap().rule(0.0, 1.0).unwrap();
    let mut direct = 0.0;
    for &(t, wt) in &rt {
        for &(s, ws) in &rs {
            for &(x, wx) in &rxy {
                for &(y, wy) in &rxy {
                    let g = oracle::metric_at(&p, &oracle::ChartPoint::new(t, s, x, y)).unwrap().g;
                    direct += wt * ws * wx * wy * test_fn(t) * g.determinant().sqrt();
                }
            }
        }
    }
    let residual = (reduced - direct).abs() / direct.abs();
    let ok = verdict(10, "volume-reduction convention", residual, 1e-4, start.elapsed(), None);
    assert!(ok);
}
