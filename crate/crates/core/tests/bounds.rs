use num_traits::{One, Zero};
use primegaps::bounds::*;
use primegaps::quad::Integrator;
use primegaps::rational::{parse_rational, ratio, to_f64};
use primegaps::{Real, DD};
use proptest::prelude::*;

fn dd(s: &str) -> DD {
    DD::from_rational(&parse_rational(s).unwrap())
}

const TABLE: [(u64, &str, &str, f64); 7] = [
    (5511, "0.965", "0.973", 6.000048609),
    (35410, "0.99479", "0.85213", 7.829849259),
    (41588, "0.97878", "0.94319", 8.000001401),
    (309661, "0.98627", "0.92091", 10.00000032),
    (1649821, "1.00422", "0.80148", 11.65752556),
    (75845707, "1.00712", "0.77003", 15.48125090),
    (3473955908, "1.0079318", "0.7490925", 19.30374872),
];

fn row(k: u64, theta: &str, beta: &str) -> AsymptoticReport<DD> {
    let p = AsymptoticParams::from_theta_beta(k, dd(theta), dd(beta), Tau::Derived);
    asymptotic_lower(&p, DD::lit(1e-22)).unwrap()
}

#[test]
fn asymptotic_rows_match_published_values() {
    for (k, theta, beta, m) in TABLE {
        let r = row(k, theta, beta);
        let lb = r.lower_bound.approx();
        assert!((lb - m).abs() < 1e-6, "k={k}: {lb} vs {m}");
        assert!(r.budget.approx() < 1e-12, "k={k} budget {}", r.budget);
        assert!(r.lower_bound < mk_upper::<DD>(k));
    }
}

#[test]
fn asymptotic_moments_agree_with_quadrature() {
    for (k, theta, beta, _) in TABLE {
        let r = row(k, theta, beta);
        let (c, t) = (r.c, r.t);
        let km1 = DD::from_int(k as i64 - 1);
        let g2 = |x: DD| {
            let g = DD::one() / (c + km1 * x);
            g * g
        };
        let q = Integrator::<DD>::new(12);
        let tol = DD::lit(1e-20);
        let second = (r.sigma2 + r.mu * r.mu) * r.m2;
        let m2 = q.integrate(g2, DD::zero(), t, tol * r.m2).value;
        let mu = q.integrate(|x| x * g2(x), DD::zero(), t, tol * r.mu * r.m2).value / m2;
        let s2 = q.integrate(|x| x * x * g2(x), DD::zero(), t, tol * second).value / m2 - mu * mu;
        let rel = |a: DD, b: DD| ((a - b) / b).abs().approx();
        assert!(rel(m2, r.m2) < 1e-12, "k={k}");
        assert!(rel(mu, r.mu) < 1e-12, "k={k}");
        assert!(rel(s2, r.sigma2) < 1e-12, "k={k}");
    }
}

#[test]
fn asymptotic_conditions_are_enforced() {
    let k = 5511u64;
    // tau larger than 1 - k mu breaks the first condition
    let p = AsymptoticParams::from_theta_beta(k, dd("0.965"), dd("0.973"), Tau::Explicit(DD::lit(0.9)));
    assert!(asymptotic_lower(&p, DD::lit(1e-20)).is_err());
    // a huge T makes k mu exceed 1 - T
    let p = AsymptoticParams::from_theta_beta(k, dd("0.965"), dd("8"), Tau::Derived);
    assert!(asymptotic_lower(&p, DD::lit(1e-20)).is_err());
}

#[test]
fn special_values() {
    let m2: DD = m2_exact();
    assert_eq!(format!("{:.5}", m2.approx()), "1.38593");
    assert!(m2 < mk_upper::<DD>(2));
    assert!(m2 > DD::from_rational(&ratio(4, 3)));
    assert!((mk_upper::<f64>(2) - 1.3862943611198906).abs() < 1e-15);
    assert!((mk_upper::<f64>(54) - 4.06425).abs() < 5e-6);
    assert!((mk_upper::<f64>(100) - 4.65169).abs() < 5e-6);

    let third = DD::from_rational(&ratio(1, 3));
    let e = DD::one().exp();
    let closed = (e * DD::from_int(4) / DD::from_int(3) - DD::from_rational(&ratio(2, 3))) / (e - DD::one());
    assert!((m2_eps(third).unwrap() - closed).abs().approx() < 1e-20);
    assert!((closed.approx() - 1.7213178045795509).abs() < 1e-15);
    let below = m2_eps(third - DD::lit(1e-15)).unwrap();
    assert!((below - closed).abs().approx() < 1e-9);
    assert!((m2_eps(DD::lit(1.0 - 1e-12)).unwrap().approx() - 2.0).abs() < 1e-9);
    assert!(m2_eps(DD::zero()).is_err());

    let b2 = bessel_lower::<DD>(2);
    assert!((b2.approx() - 1.383).abs() < 5e-4);
    assert!(b2 <= m2);
    assert!(bessel_lower::<DD>(6).approx() > 2.0);
    for k in 2..=200u64 {
        assert!(bessel_lower::<f64>(k) < 4.0, "k={k}");
    }
}

#[test]
fn eps_upper_bound_family() {
    let e = 1.0 / 25.0;
    let u = mkeps_upper::<f64>(50, e, 1.0).unwrap();
    assert!((u - 50.0 / 49.0 * 99f64.ln()).abs() < 1e-12);
    assert!((u - 4.6889).abs() < 5e-5);
    let edge = mkeps_upper::<f64>(50, e, 1.0 / (1.0 + e) + 1e-12).unwrap();
    assert!((edge - (1.0 + e) * mk_upper::<f64>(50)).abs() < 1e-9);
    let tiny = 1e-9;
    let limit = mkeps_upper::<f64>(50, tiny, 1.0 / (1.0 + tiny) + 1e-15).unwrap();
    assert!((limit - mk_upper::<f64>(50)).abs() < 1e-5);
    assert!(mkeps_upper::<f64>(50, e, 0.5).is_err());
    assert!(mkeps_upper::<f64>(50, e, 1.1).is_err());
    let half = m2_eps::<DD>(DD::lit(0.5)).unwrap().approx();
    assert!(half <= mkeps_upper::<f64>(2, 0.5, 1.0).unwrap());
    assert!((mkeps_upper::<f64>(2, 0.5, 1.0).unwrap() - 2.0 * 3f64.ln()).abs() < 1e-12);
}

#[test]
fn four_dimensional_linear_cutoff() {
    let c = m4eps_check(&ratio(21, 125), &ratio(98, 125)).unwrap();
    assert!((to_f64(&c.i) - 0.00728001347).abs() < 1e-9);
    assert!((to_f64(&c.j) - 0.003650160667).abs() < 1e-9);
    // 4J/I = 2.0055790..., just short of the 2.00558 threshold
    assert!(!c.ratio_ok);
    let r = ratio(4, 1) * &c.j / &c.i;
    assert!(r > ratio(2005579, 1_000_000) && r < ratio(200558, 100_000));
    assert!(m4eps_check(&ratio(1, 2), &ratio(1, 1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m2_eps_is_increasing_and_bounded(a in 0.01f64..0.98, b in 0.01f64..0.98) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        let x = m2_eps::<DD>(DD::lit(lo)).unwrap();
        let y = m2_eps::<DD>(DD::lit(hi)).unwrap();
        prop_assert!(x < y);
        prop_assert!(x > m2_exact::<DD>() && y < DD::from_int(2));
    }

    #[test]
    fn asymptotic_bound_never_exceeds_upper(k in 50u64..100_000, theta in 0.9f64..1.0, beta in 0.7f64..0.95) {
        let p = AsymptoticParams::from_theta_beta(k, theta, beta, Tau::Derived);
        if let Ok(r) = asymptotic_lower(&p, 1e-12) {
            prop_assert!(r.lower_bound <= mk_upper::<f64>(k));
        }
    }
}
