//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use blockmap::criticality::{
    critical_data, dual_dimension, hausdorff_dimensions, kpz, lqg_exponents, lqg_string_exact,
    quad_mu_residual, quantum_ball_mass, solve_tc, EllipticBlocks, Surd,
};
use blockmap::lab::{fl, np_estimate, SequenceWindow};
use blockmap::models::{
    brute_force_counts, brute_force_weighted_counts, catalan, closed_form_m1, load_external_counts,
    meander_component_counts, Family, ModelSpec,
};
use blockmap::pipeline::{eval_at, observable_at, to_floats, ucrit_from_counts, ModelSeries, Observable};
use blockmap::profile::{fisher_tail_exponent, phi, phi_contour_crosscheck, rho, small_r_constant};
use blockmap::rug::{Float, Integer, Rational};
use blockmap::IntPoly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let mut o = f();
    let dt = t.elapsed();
    if let Some(limit) = limit {
        if dt > limit {
            o.pass = false;
            o.detail.push_str(&format!("; over time limit {limit:?}"));
        }
    }
    (o, dt)
}

fn poly(cs: &[i64]) -> IntPoly {
    IntPoly::from_i64s(cs)
}

fn times_u(k: i64, inner: &[i64]) -> IntPoly {
    let mut cs = vec![0];
    cs.extend(inner.iter().map(|c| c * k));
    poly(&cs)
}

fn quad_table() -> Outcome {
    let want = [
        times_u(2, &[1]),
        times_u(1, &[1, 8]),
        times_u(2, &[1, 6, 20]),
        times_u(2, &[3, 18, 56, 112]),
        times_u(2, &[11, 70, 225, 480, 672]),
        times_u(1, &[91, 624, 2134, 4840, 7920, 8448]),
        times_u(2, &[204, 1512, 5551, 13468, 24024, 32032, 27456]),
        times_u(2, &[969, 7752, 30600, 79590, 152880, 227136, 256256, 183040]),
        times_u(2, &[4807, 41382, 175389, 488784, 1006740, 1622208, 2079168, 2036736, 1244672]),
        times_u(
            1,
            &[49335, 455400, 2067010, 6160560, 13566969, 23473056, 32868480, 37209600, 32248320, 17199104],
        ),
    ];
    let s = match ModelSeries::build(ModelSpec::default_for(Family::Quad), 10, None) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let bad: Vec<usize> = (1..=10).filter(|&n| s.m_u.coeff(n) != &want[n - 1]).collect();
    outcome(bad.is_empty(), format!("m_1..m_10 exact; mismatches at n = {bad:?}"))
}

fn oracle_equivalence() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for family in [Family::Cubic, Family::Meander] {
        let series = ModelSeries::build(ModelSpec::default_for(family), 8, None).unwrap();
        let brute = brute_force_weighted_counts(family, 8).unwrap();
        let ok = (0..=8).all(|n| series.m_u.coeff(n) == &brute[n]);
        pass &= ok;
        notes.push(format!("{family}: {}", if ok { "n <= 8 equal" } else { "MISMATCH" }));
    }
    outcome(pass, notes.join(", "))
}

fn critical_constants() -> Outcome {
    let quad = critical_data(Family::Quad).unwrap();
    let quad_ok = quad.u_cr.exact == Some(Rational::from((9, 5)))
        && quad.g_c_at_ucr.exact == Some(Rational::from((25, 432)));
    let cubic = critical_data(Family::Cubic).unwrap();
    let cubic_ok = within(cubic.u_cr.to_f64(), 3.02217, 1e-5) && within(cubic.g_c_at_ucr.to_f64(), 0.034288, 1e-5);

    // meander closed forms written out independently of the library
    let prec = 256;
    let p = Float::with_val(prec, blockmap::rug::float::Constant::Pi);
    let p2 = Float::with_val(prec, &p * &p);
    let lin = Float::with_val(prec, &p * 30u32) - Float::with_val(prec, &p2 * 3u32) - 64u32;
    let u_want = Float::with_val(prec, &p * Float::with_val(prec, &p - 2u32)) / &lin;
    let pm3 = Float::with_val(prec, &p - 3u32);
    let g_want = Float::with_val(prec, &lin * &lin) / (Float::with_val(prec, &p2 * 64u32) * Float::with_val(prec, &pm3 * &pm3));
    let t_base = Float::with_val(prec, 4u32) / &p - 1u32;
    let t_want = Float::with_val(prec, &t_base * &t_base);
    let m = critical_data(Family::Meander).unwrap();
    let err = |a: &Float, b: &Float| Float::with_val(prec, a - b).abs().to_f64();
    let (eu, eg, et) = (err(&m.u_cr.value, &u_want), err(&m.g_c_at_ucr.value, &g_want), err(&m.t_cr.value, &t_want));
    // the f64 bisection route must land on the same point
    let tc = solve_tc(m.u_cr.to_f64(), &EllipticBlocks::meander()).unwrap();
    let route = (tc.t_c - t_want.to_f64()).abs().max((tc.g_c - g_want.to_f64()).abs());
    let meander_ok = eu < 1e-10 && eg < 1e-10 && et < 1e-10 && route < 1e-10;
    outcome(
        quad_ok && cubic_ok && meander_ok,
        format!(
            "quad u_cr = {}, g_c = {}; cubic u_cr = {:.7}, g_c = {:.7}; meander errors {eu:.1e}/{eg:.1e}/{et:.1e}, solve_tc {route:.1e}",
            quad.u_cr,
            quad.g_c_at_ucr,
            cubic.u_cr.to_f64(),
            cubic.g_c_at_ucr.to_f64()
        ),
    )
}

fn duality_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0f64;
    for _ in 0..100 {
        let c = rng.gen_range(-30.0..1.0);
        let e = lqg_exponents(c).unwrap();
        let g = e.gamma;
        let x = rng.gen_range(0.0..3.0);
        let (d, dp) = (kpz(x, g), kpz(x, e.gamma_prime));
        let residuals = [
            e.gamma * e.gamma_prime - 4.0,
            (1.0 - e.gamma_s) * (1.0 - e.gamma_s_prime) - 1.0,
            d * dp - x,
            dual_dimension(d, e.gamma_s) - dp,
        ];
        worst = residuals.iter().fold(worst, |w, r| w.max(r.abs()));
    }
    let exact = |c: i64| lqg_string_exact(&Rational::from(c)).unwrap();
    let q = |a: i64, b: i64| Surd::rational(Rational::from((a, b)));
    let (s0, s0p) = exact(0);
    let (s2, s2p) = exact(-2);
    let (s1, s1p) = exact(-1);
    let one = q(1, 1);
    let product_is_one = |a: &Surd, b: &Surd| one.sub(a).mul(&one.sub(b)) == one;
    let rational_ok = s0 == q(-1, 2) && s0p == q(1, 3) && s2 == q(-1, 1) && s2p == q(1, 2);
    let surd_ok = s1.d == 13 && s1.a == Rational::from((-1, 6)) && s1.b == Rational::from((-1, 6)) && s1p.b == Rational::from((1, 6));
    let exact_ok = [(&s0, &s0p), (&s1, &s1p), (&s2, &s2p)].iter().all(|(a, b)| product_is_one(a, b));
    outcome(
        worst < 1e-12 && rational_ok && surd_ok && exact_ok,
        format!("100 random cases, worst residual {worst:.1e}; c = -1 gives {s1} and {s1p}"),
    )
}

fn estimate(seq: Vec<Float>, n: usize, p: usize, eta: f64) -> f64 {
    let w = SequenceWindow::new(seq, "t").unwrap().with_eta(eta);
    np_estimate(&w, n, p).unwrap().estimate
}

fn quad_exponents() -> Outcome {
    let s = ModelSeries::build(ModelSpec::default_for(Family::Quad), 50, None).unwrap();
    let at = |u: Rational| estimate(eval_at(&s.m_u, &fl(&u)), 50, 5, 0.0);
    let (e1, e2, e3) = (at(Rational::from(1)), at(Rational::from((9, 5))), at(Rational::from(3)));
    outcome(
        within(e1, 2.5, 0.02) && within(e2, 5.0 / 3.0, 0.05) && within(e3, 1.5, 0.05),
        format!("(50,5): u=1 {e1:.5}, u=9/5 {e2:.5}, u=3 {e3:.5}"),
    )
}

fn two_point_exponents() -> Outcome {
    let s = ModelSeries::build(ModelSpec::default_for(Family::Quad), 35, None).unwrap();
    let at = |u: Rational| estimate(observable_at(&s, Observable::TwoPoint, &fl(&u)).unwrap(), 35, 6, 0.0);
    let (e1, e2) = (at(Rational::from(1)), at(Rational::from((9, 5))));
    outcome(
        within(e1, 1.5, 0.03) && within(e2, 4.0 / 3.0, 0.05),
        format!("(35,6): u=1 {e1:.5}, u=9/5 {e2:.5}"),
    )
}

fn log_corrected() -> Outcome {
    let u_cr = critical_data(Family::Cubic).unwrap().u_cr.value;
    let cubic = ModelSeries::build(ModelSpec::default_for(Family::Cubic), 34, None).unwrap();
    let e_cubic = estimate(eval_at(&cubic.m_u, &u_cr), 34, 5, 0.5);
    let open = ModelSeries::build(ModelSpec::default_for(Family::OpenPath), 30, None).unwrap();
    let e_open = estimate(observable_at(&open, Observable::OpenPath, &u_cr).unwrap(), 30, 5, 0.25);
    outcome(
        within(e_cubic, 1.5, 0.05) && within(e_open, 1.25, 0.06),
        format!("cubic (34,5) eta=1/2: {e_cubic:.5}; open path (30,5) eta=1/4: {e_open:.5}"),
    )
}

fn quantum_ball() -> Outcome {
    let a = quantum_ball_mass(1.0, 2f64.sqrt()).unwrap();
    let b = quantum_ball_mass(2.0, 8f64.sqrt()).unwrap();
    let want_b = (-2.0 * 2f64.sqrt()).exp();
    // the dual-side dimensions ride along as a sanity check of γ' = √6
    let h = hausdorff_dimensions(6f64.sqrt(), Some(4.0));
    outcome(
        within(a, 1.0, 1e-8) && within(b, want_b, 1e-6) && within(h.whole, 3.0, 1e-12),
        format!("gamma=sqrt2: {a:.12}; gamma=sqrt8, A=2: {b:.12} (want {want_b:.12})"),
    )
}

fn profile() -> Outcome {
    let phi20 = phi(20.0).unwrap();
    let k2 = small_r_constant();
    let r = 0.05;
    let phi_ratio = phi(r).unwrap() / (r * r) / k2;
    let rho_ratio = rho(r).unwrap() / r / (2.0 * k2);
    let grid: Vec<f64> = (1..=20).map(|i| 0.2 * i as f64).collect();
    let cross = grid
        .iter()
        .map(|&r| (phi(r).unwrap() - phi_contour_crosscheck(r).unwrap()).abs())
        .fold(0.0, f64::max);
    let fit = fisher_tail_exponent(6.0, 12.0, 16).unwrap();
    outcome(
        within(phi20, 1.0, 1e-8)
            && within(phi_ratio, 1.0, 0.01)
            && within(rho_ratio, 1.0, 0.01)
            && cross < 1e-8
            && within(fit.delta, 1.2, 0.06),
        format!(
            "Phi(20)-1 = {:.1e}; Phi/(K2 r^2) = {phi_ratio:.5}, rho/(2K2 r) = {rho_ratio:.5}; contour max dev {cross:.1e}; Fisher delta on [6,12] = {:.4}",
            phi20 - 1.0,
            fit.delta
        ),
    )
}

fn bicubic_and_meander_q() -> Outcome {
    if let Ok(path) = std::env::var("BLOCKMAP_BICUBIC_FILE") {
        let table = match load_external_counts(&path, Family::Bicubic) {
            Ok(t) => t,
            Err(e) => return outcome(false, format!("file branch: {e}")),
        };
        let m1 = to_floats(&table.totals());
        return match ucrit_from_counts(&m1, 5) {
            Ok(r) => outcome(
                within(r.ucrit.estimate, 2.053, 0.01) && within(r.g1, 0.098878, 1e-4),
                format!("file branch ({} terms): g1 = {:.6}, u_cr = {:.4}", m1.len(), r.g1, r.ucrit.estimate),
            ),
            Err(e) => outcome(false, format!("file branch: {e}")),
        };
    }
    let rows = meander_component_counts(10).unwrap();
    let sum_rule = rows.iter().enumerate().all(|(n, row)| row.iter().sum::<Integer>() == catalan(n).square());
    let bicubic = brute_force_counts(Family::Bicubic, 10).unwrap();
    let cubic = closed_form_m1(Family::Cubic, 10).unwrap();
    let colored = bicubic.iter().zip(cubic.coeffs()).all(|(b, c)| b <= c);
    let r = ucrit_from_counts(&to_floats(&bicubic), 3).unwrap();
    let monotone = r.ucrit.sequence.windows(2).all(|w| w[1] < w[0]);
    outcome(
        sum_rule && colored && monotone,
        format!(
            "no BLOCKMAP_BICUBIC_FILE, brute-force branch: meander sum rule n <= 10 {sum_rule}, bicubic <= cubic {colored}, u_cr sequence monotone {monotone} (u_10 = {:.4}, extrapolated {:.3})",
            r.ucrit.sequence.last().unwrap(),
            r.ucrit.estimate
        ),
    )
}

fn remark_quartic() -> Outcome {
    let (u, g, m) = (Rational::from((9, 5)), Rational::from((25, 432)), Rational::from((8, 5)));
    let r = quad_mu_residual(&u, &g, &m);
    outcome(r == 0, format!("residual = {r}"))
}

fn main() {
    let s = |secs| Some(Duration::from_secs(secs));
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("exact quadrangulation coefficients", s(1), quad_table),
        ("oracle equivalence, cubic and meander", s(120), oracle_equivalence),
        ("critical constants", s(1), critical_constants),
        ("duality suite", None, duality_suite),
        ("quad exponent estimates", s(30), quad_exponents),
        ("two-point exponent", None, two_point_exponents),
        ("log-corrected models", None, log_corrected),
        ("quantum-ball integral", None, quantum_ball),
        ("distance profile", s(30), profile),
        ("bicubic and meander tables", None, bicubic_and_meander_q),
        ("algebraic check of M_u", None, remark_quartic),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let (o, dt) = timed(limit, f);
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name} ({:.2}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            dt.as_secs_f64(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
