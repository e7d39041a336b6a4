use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use primegaps::bounds::m4eps_check;
use primegaps::rational::{factorial, ratio, to_f64};
use primegaps::varprob::*;
use primegaps::Rational;

fn q(p: i64, d: i64) -> Rational {
    ratio(p, d)
}

fn fact(n: u64) -> Rational {
    Rational::from_integer(factorial(n))
}

#[test]
fn smallest_plain_pair() {
    let g = assemble_plain(2, 0).unwrap();
    assert_eq!(g.m1, vec![vec![q(1, 2)]]);
    // 2 * int_0^1 (1-t)^2 dt
    assert_eq!(g.m2, vec![vec![q(2, 3)]]);
    for k in 2..7usize {
        let g = assemble_plain(k, 0).unwrap();
        assert_eq!(g.m1[0][0], fact(k as u64).recip());
    }
}

#[test]
fn certify_examples() {
    let g = assemble_plain(2, 0).unwrap();
    assert!(certify(&g, &[q(1, 1)], &q(13, 10)).verified);
    assert!(!certify(&g, &[q(1, 1)], &q(4, 3)).verified);
    assert!(!certify(&g, &[Rational::zero()], &q(1, 1)).verified);
    let (c, _) = solve_generalized(&g, 1e-10).unwrap();
    assert!((c - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn synthetic_identity_pencil() {
    let m: Matrix = (0..3).map(|i| (0..3).map(|j| if i == j { q(1, 1) } else { Rational::zero() }).collect()).collect();
    let g = GramPair::from_matrices(Variant::Plain { k: 3 }, m.clone(), m).unwrap();
    let (c, _) = solve_generalized(&g, 1e-10).unwrap();
    assert!((c - 1.0).abs() < 1e-12);
}

#[test]
fn eps_pair_scaling_and_four_dim_cross_check() {
    let g = assemble_eps(2, 0, &q(1, 4)).unwrap();
    assert_eq!(g.m1[0][0], q(25, 32));
    // F = 1 - alpha P_(1) = (1 - alpha (1+eps)) + alpha (1 + eps - P_(1))
    let eps = q(21, 125);
    let alpha = q(98, 125);
    let g = assemble_eps(4, 1, &eps).unwrap();
    let pos = |a: u32| g.basis.iter().position(|b| b.a == a && b.alpha.is_empty()).unwrap();
    let mut v = vec![Rational::zero(); g.basis.len()];
    v[pos(0)] = Rational::one() - &alpha * (Rational::one() + &eps);
    v[pos(1)] = alpha.clone();
    let quad = |m: &Matrix| {
        let mut s = Rational::zero();
        for i in 0..v.len() {
            for j in 0..v.len() {
                s += &v[i] * &m[i][j] * &v[j];
            }
        }
        s
    };
    let check = m4eps_check(&eps, &alpha).unwrap();
    assert_eq!(quad(&g.m1), check.i);
    assert_eq!(quad(&g.m2), check.j * Rational::from_integer(BigInt::from(4)));
}

#[test]
fn eps_certificate_below_closed_form() {
    let g = assemble_eps(2, 2, &q(1, 2)).unwrap();
    let cert = lower_bound(&g, 1e-10).unwrap();
    assert!(cert.verified);
    let c = to_f64(&cert.c);
    let e = std::f64::consts::E;
    let closed = (e * 1.5 - 1.0) / (e - 1.0);
    assert!(c >= 1.76, "{c}");
    assert!(c < closed);
    assert!(c < g.variant.upper_bound());
    let wider = lower_bound(&assemble_eps(2, 5, &q(1, 2)).unwrap(), 1e-10).unwrap();
    let cw = to_f64(&wider.c);
    assert!(wider.verified && cw >= c && cw < closed, "{cw}");
}

#[test]
fn gram_matrices_symmetric_and_definite() {
    for (k, d) in [(2usize, 4u32), (3, 4), (4, 3)] {
        for full in [false, true] {
            let g = assemble_plain_with(k, d, full).unwrap();
            let n = g.dim();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(g.m1[i][j], g.m1[j][i]);
                    assert_eq!(g.m2[i][j], g.m2[j][i]);
                }
            }
            assert!(ldl(&g.m1).unwrap().d.iter().all(|d| d.is_positive()));
            // M2 is a Gram matrix of the fiber integrals; semidefinite
            let shifted: Matrix = g
                .m2
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().enumerate().map(|(j, v)| if i == j { v + &g.m1[i][i] * q(1, 1_000_000) } else { v.clone() }).collect())
                .collect();
            assert!(ldl(&shifted).is_ok());
        }
    }
}

#[test]
fn gram_bounds_grow_with_degree_and_stay_below_upper_bound() {
    for k in [2usize, 3] {
        let mut prev = Rational::zero();
        for d in 0..=6u32 {
            let g = assemble_plain(k, d).unwrap();
            let cert = lower_bound(&g, 1e-10).unwrap();
            assert!(cert.verified);
            assert!(cert.c >= prev - q(1, 1_000_000_000), "k={k} d={d}");
            assert!(to_f64(&cert.c) < g.variant.upper_bound());
            prev = cert.c.clone();
        }
        let floor = if k == 2 { 1.3859 } else { 1.64 };
        assert!(to_f64(&prev) > floor, "k={k} C={}", to_f64(&prev));
    }
}

#[test]
fn rationalize_convergents() {
    assert_eq!(rationalize(&[0.5, 0.0], 10), vec![q(1, 2), Rational::zero()]);
    // brute force: closest p/q over q <= 100 among convergents
    let x = 1.38593;
    let r = &rationalize(&[x], 100)[0];
    assert_eq!(*r, q(79, 57));
    let best = (1..=100i64)
        .map(|d| {
            let p = (x * d as f64).round() as i64;
            ((x - p as f64 / d as f64).abs(), p, d)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    // the best approximation with q <= 100 is always a convergent or semiconvergent and no worse than ours
    assert!(best.0 <= (x - to_f64(r)).abs());
    assert!(rationalize(&[x], 70)[0] == q(79, 57));
}

#[test]
fn moment_closed_forms() {
    for k in 2..=10u64 {
        let t = krylov_moments(k as usize, 4).unwrap();
        let kk = Rational::from_integer(BigInt::from(k));
        assert_eq!(t.moments[0], fact(k).recip());
        assert_eq!(t.moments[1], q(2, 1) * &kk / fact(k + 1));
        assert_eq!(t.moments[2], &kk * (q(5, 1) * &kk + q(1, 1)) / fact(k + 2));
        assert_eq!(t.moments[3], q(2, 1) * &kk * &kk * (q(7, 1) * &kk + q(5, 1)) / fact(k + 3));
        assert!(t.moments.iter().all(|m| m.is_positive()));
    }
}

#[test]
fn moment_routes_agree() {
    for k in 2..=4usize {
        let fast = krylov_moments(k, 8).unwrap().moments;
        let slow = moments_by_operator(k, 8).unwrap();
        assert_eq!(fast, slow, "k = {k}");
    }
}

#[test]
fn krylov_small_cases_and_monotonicity() {
    let c1 = krylov_lower_bound(2, 1, 1e-10).unwrap();
    assert!((to_f64(&c1.c) - 4.0 / 3.0).abs() < 1e-11);
    assert!(c1.c < q(4, 3));
    for k in 2..=5usize {
        let mut prev = Rational::zero();
        for n in 1..=10usize {
            let cert = krylov_lower_bound(k, n, 1e-10).unwrap();
            assert!(cert.verified);
            assert!(cert.c >= &prev - q(1, 1_000_000_000), "k={k} n={n}");
            prev = cert.c;
        }
    }
}

#[test]
fn certificate_text_round_trip() {
    let g = assemble_plain(3, 4).unwrap();
    let cert = lower_bound(&g, 1e-10).unwrap();
    let text = cert.to_text();
    let back = parse_certificate(&text).unwrap();
    assert!(!back.verified);
    assert_eq!(back.a, cert.a);
    assert!(verify_certificate(&back).unwrap().verified);
    let mut forged = back.clone();
    forged.c = &forged.c + q(1, 10);
    assert!(!verify_certificate(&forged).unwrap().verified);
    let kc = krylov_lower_bound(3, 5, 1e-10).unwrap();
    assert!(verify_certificate(&parse_certificate(&kc.to_text()).unwrap()).unwrap().verified);
    let eps = lower_bound(&assemble_eps(2, 2, &q(1, 3)).unwrap(), 1e-10).unwrap();
    assert!(verify_certificate(&parse_certificate(&eps.to_text()).unwrap()).unwrap().verified);
    assert!(parse_certificate("variant = plain\n").is_err());
}

#[test]
fn basis_respects_restrictions() {
    let b = basis(3, 6, false, &Rational::one());
    assert!(b.iter().all(|e| e.alpha.parts().iter().all(|&p| p % 2 == 0) && e.a + e.alpha.degree() <= 6));
    let full = basis(3, 6, true, &Rational::one());
    assert!(full.len() > b.len());
    assert!(full.iter().all(|e| !e.alpha.parts().contains(&1) && e.alpha.len() <= 3));
    assert!(assemble_plain(1, 2).is_err());
    assert!(assemble_eps(3, 2, &q(3, 2)).is_err());
    let _ = BigInt::one();
}
