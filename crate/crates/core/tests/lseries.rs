use bolhalf::arith::{with_prec, Cx, MpC, MpReal, Real, C64};
use bolhalf::bol_ops::{ell, HalfWeight};
use bolhalf::characters::{characters_mod, DirichletCharacter};
use bolhalf::forms::FormMeta;
use bolhalf::lseries::alpha::{alpha_apply, alpha_multiplier, alpha_time, AlphaMode, AlphaOutput, AlphaTime, HFunction};
use bolhalf::lseries::bessel::{bessel_half, bessel_series, Sign};
use bolhalf::lseries::laplace::{laplace, laplace_gk, talbot, talbot_checked, Bromwich};
use bolhalf::lseries::sc::{b_factor, real_grid, sc_residual, Inversion, ScOptions, ScParams};
use bolhalf::lseries::*;
use bolhalf::modular_verify::{fricke_points, fricke_relation};
use bolhalf::qseries::{delta_cusp, delta_inverse, QSeries};
use bolhalf::thetas::{theta_series, ThetaKind};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ch(s: &str) -> DirichletCharacter {
    DirichletCharacter::parse(s).unwrap()
}

fn bump() -> TestFunction {
    TestFunction::bump(1.0, 2.0).unwrap()
}

fn rel(a: &C64, b: &C64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a.clone() - b.clone()).abs() / s
    }
}

#[test]
fn indicator_closed_form() {
    let phi = TestFunction::indicator(1.0, 2.0).unwrap();
    for (re, im) in [(0.3, 0.0), (1.0, 2.0), (-0.7, 5.0), (4.0, -1.5)] {
        let s = C64::new(re, im);
        let exact = ((-s.clone()).exp() - (-(s.clone() * 2.0)).exp()) / s.clone();
        let v = laplace_gk(&phi, &s, 1e-13).unwrap().value;
        assert!(rel(&v, &exact) < 1e-12, "{s:?}");
    }
    with_prec(128, || {
        let s: MpC = Cx::from_f64(1.0, 2.0);
        let two = MpReal::from_i64(2);
        let exact = ((-s.clone()).exp() - (-s.scale(&two)).exp()) / s.clone();
        let v = laplace(&phi, &s, 1e-30).unwrap().value;
        assert!((v - exact.clone()).abs().to_f64() < 1e-28 * exact.abs().to_f64());
    });
}

#[test]
fn bump_at_zero_two_schemes() {
    let phi = bump();
    let gk = laplace_gk(&phi, &C64::zero(), 1e-13).unwrap().value;
    let ts: C64 = laplace(&phi, &C64::zero(), 1e-13).unwrap().value;
    assert!(rel(&gk, &ts) < 1e-12);
    assert!(gk.im == 0.0 && gk.re > 0.0);
}

#[test]
fn reflection() {
    let phi = TestFunction::poly_bump(0.5, 3.0, 4).unwrap();
    let s = C64::new(0.8, 3.3);
    let a = laplace_gk(&phi, &s, 1e-13).unwrap().value;
    let b = laplace_gk(&phi, &s.conj(), 1e-13).unwrap().value;
    assert!(rel(&a, &b.conj()) < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shift_law(c in 0.1f64..3.0, re in -1.0f64..3.0, im in -8.0f64..8.0) {
        let phi = bump();
        let s = C64::new(re, im);
        let shifted = laplace_gk(&phi.shift(c).unwrap(), &s, 1e-13).unwrap().value;
        let expect = (-(s.clone() * c)).exp() * laplace_gk(&phi, &s, 1e-13).unwrap().value;
        prop_assert!(rel(&shifted, &expect) < 1e-11);
    }

    #[test]
    fn linearity(x in -2.0f64..2.0, y in -2.0f64..2.0, re in 0.0f64..3.0, im in -5.0f64..5.0) {
        // L(x phi + y psi) = x L(phi) + y L(psi), with the sum integrated pointwise
        let (phi, psi) = (bump(), TestFunction::poly_bump(1.5, 2.5, 3).unwrap());
        let s = C64::new(re, im);
        let direct = bolhalf::lseries::quad::gk_adaptive(
            |t| (-(s.clone() * t)).exp() * (x * phi.eval(&t) + y * psi.eval(&t)),
            1.0, 2.5, &[1.5, 2.0], 1e-13,
        ).unwrap().value;
        let split = laplace_gk(&phi, &s, 1e-13).unwrap().value * x + laplace_gk(&psi, &s, 1e-13).unwrap().value * y;
        prop_assert!((direct.clone() - split).abs() < 1e-12 * direct.abs().max(1e-3));
    }
}

#[test]
fn fricke_support_and_double_application() {
    let phi = bump();
    let w = phi.fricke(HalfWeight::from_doubled(1), 4).unwrap();
    assert_eq!(w.support(), (1.0 / 8.0, 1.0 / 4.0));
    let w0 = phi.fricke(HalfWeight::integral(0), 1).unwrap();
    assert!((w0.eval(&0.7) - phi.eval(&(1.0 / 0.7))).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (doubled, m) in [(1, 4u64), (6, 3), (-23, 4), (27, 2)] {
        let k = HalfWeight::from_doubled(doubled);
        let ww = phi.fricke(k, m).unwrap().fricke(k, m).unwrap();
        let factor = (m as f64).powf(-k.as_f64());
        for _ in 0..20 {
            let x: f64 = rng.gen_range(1.0..2.0);
            let (a, b) = (ww.eval(&x), factor * phi.eval(&x));
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "k = {k}, x = {x}: {a} vs {b}");
        }
    }
}

#[test]
fn single_term_series() {
    with_prec(128, || {
        let c1 = BigRational::new(7.into(), 3.into());
        let f = QSeries::from_terms(1, 40, [(1, c1.clone())]);
        let v: LValue<MpReal> = lseries_value(&f, &DirichletCharacter::trivial(1), &bump(), &LOptions::default()).unwrap();
        let two_pi = MpReal::pi() * MpReal::from_i64(2);
        let expect = laplace(&bump(), &Cx::real(two_pi), 1e-30).unwrap().value.scale(&MpReal::from_rational(&c1));
        assert!((v.value - expect.clone()).abs().to_f64() < 1e-13 * expect.abs().to_f64());
    });
}

#[test]
fn certificate_threshold_for_exponential_growth() {
    // |c_n| = e^n: summable against L(phi)(2 pi n) iff a > 1/(2 pi)
    let terms: Vec<(i64, f64)> = (1..=60).map(|n| (n, (n as f64).exp())).collect();
    let f: QSeries<Cx<f64>> = QSeries::from_terms(1, 61, terms.iter().map(|(n, c)| (*n, C64::new(*c, 0.0))));
    let good = lseries_value_uncertified::<_, f64>(&f, &DirichletCharacter::trivial(1), &bump(), &LOptions::default())
        .unwrap();
    assert!(good.certificate.pass, "{:?}", good.certificate);
    let near = TestFunction::bump(0.1, 0.5).unwrap();
    let bad = lseries_value::<_, f64>(&f, &DirichletCharacter::trivial(1), &near, &LOptions::default());
    assert!(bad.is_err());
}

#[test]
fn theta0_against_direct_summation() {
    with_prec(128, || {
        let (t0, _) = theta_series::<BigRational>(ThetaKind::Theta0, &ch("triv:1"), 1, 200).unwrap();
        let phi = bump();
        let v: LValue<MpReal> = lseries_value(&t0, &DirichletCharacter::trivial(1), &phi, &LOptions::default()).unwrap();
        let mut direct: MpC = Cx::zero();
        for (n, c) in t0.terms() {
            let s = Cx::real(MpReal::pi() * MpReal::from_i64(2 * n));
            direct = direct + laplace(&phi, &s, 1e-30).unwrap().value.scale(&MpReal::from_rational(c));
        }
        let err = (v.value - direct.clone()).abs().to_f64() / direct.abs().to_f64();
        assert!(err < 1e-12, "{err:e}");
    });
}

#[test]
fn characters_mod_small() {
    for d in [1u64, 3, 5, 7, 9] {
        let chars = characters_mod(d).unwrap();
        let phi_d = (1..=d).filter(|u| num_integer::gcd(*u, d) == 1).count();
        assert_eq!(chars.len(), phi_d.max(1));
        assert!(chars[0].is_trivial());
    }
    assert!(characters_mod(8).is_err());
}

fn delta_meta() -> FormMeta {
    FormMeta::new(HalfWeight::integral(12), 1, DirichletCharacter::trivial(1), 0).unwrap()
}

#[test]
fn functional_equation_delta() {
    with_prec(128, || {
        let d: QSeries<BigRational> = delta_cusp(160).unwrap();
        for modulus in [1u64, 3, 5] {
            for chi in characters_mod(modulus).unwrap() {
                let r = fe_residual::<_, MpReal>(&d, &d, &Cx::one(), &delta_meta(), &chi, &bump(), &LOptions::default(), 1e-6)
                    .unwrap();
                assert!(r.pass, "D = {modulus}, {chi}: residual {:e}", r.residual);
            }
        }
    });
}

#[test]
fn functional_equation_theta0_d3() {
    with_prec(128, || {
        let (t0, meta) = theta_series::<BigRational>(ThetaKind::Theta0, &ch("triv:1"), 1, 600).unwrap();
        let k = meta.weight;
        let pts: Vec<MpC> = fricke_points(4, 10, 5).iter().map(Cx::from_c64).collect();
        let fit = fricke_relation(&t0, &t0, 4, k, None, &pts, 1e-10).unwrap();
        assert!(fit.spread < 1e-10);
        let c = Cx::from_f64(fit.derived_constant[0], fit.derived_constant[1]);
        for chi in characters_mod(3).unwrap() {
            let r = fe_residual::<_, MpReal>(&t0, &t0, &c, &meta, &chi, &bump(), &LOptions::default(), 1e-6).unwrap();
            assert!(r.pass, "{chi}: residual {:e}", r.residual);
        }
    });
}

#[test]
fn functional_equation_weakly_holomorphic() {
    with_prec(320, || {
        let n_g = 1100;
        let (t0, meta0) = theta_series::<BigRational>(ThetaKind::Theta0, &ch("triv:1"), 1, n_g).unwrap();
        let dinv: QSeries<BigRational> = delta_inverse(n_g).unwrap();
        let f = t0.truncate(n_g).mul(&dinv.rescale(4)).unwrap().truncate(n_g);
        let g = t0.mul(&dinv).unwrap().truncate(n_g);
        let k = HalfWeight::from_doubled(-23);
        let meta = FormMeta::new(k, 4, meta0.character.clone(), 4).unwrap();
        let pts: Vec<MpC> = fricke_points(4, 10, 9).iter().map(Cx::from_c64).collect();
        let expected = Cx::from_polar(&MpReal::from_i64(4096), &(-MpReal::pi() / MpReal::from_i64(4)));
        let fit = fricke_relation(&f, &g, 4, k, None, &pts, 1e-10).unwrap();
        let c = Cx::from_f64(fit.derived_constant[0], fit.derived_constant[1]);
        assert!((c.clone() - expected.clone()).abs().to_f64() < 1e-8 * 4096.0, "{:?}", fit.derived_constant);
        let r = fe_residual::<_, MpReal>(&f, &g, &c, &meta, &DirichletCharacter::trivial(1), &bump(), &LOptions::default(), 1e-5)
            .unwrap();
        assert!(r.pass, "residual {:e}", r.residual);
    });
}

#[test]
fn alpha_time_domain_matches_multiplier() {
    let phi = bump();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for m in 1..=3i64 {
        let k = HalfWeight::integral(m + 1);
        for d in [1u64, 3] {
            let a = match alpha_apply(&phi, d, k, &HFunction::one(), AlphaMode::TimeDomain).unwrap() {
                AlphaOutput::Time(AlphaTime::Compact(f)) => f,
                other => panic!("{other:?}"),
            };
            for _ in 0..20 {
                let p = C64::new(rng.gen_range(0.1..4.0), rng.gen_range(-6.0..6.0));
                let lhs = laplace_gk(&a, &p, 1e-13).unwrap().value;
                let rhs = alpha_multiplier(&p, d, k, &HFunction::one()).unwrap() * laplace_gk(&phi, &p, 1e-13).unwrap().value;
                assert!(rel(&lhs, &rhs) < 1e-8, "m = {m}, p = {p:?}");
            }
        }
    }
}

#[test]
fn alpha_zero_and_exponential_h() {
    let phi = bump();
    let z = alpha_time(&phi, 3, HalfWeight::integral(3), &HFunction::zero()).unwrap();
    for t in [1.2, 1.5, 1.9] {
        assert_eq!(z.eval(&t).unwrap(), 0.0);
    }
    // e^{-beta x} at x = Dp/2pi is a time shift
    let h = HFunction::ExpDecay { beta: 0.7 };
    let a = match alpha_time(&phi, 3, HalfWeight::integral(3), &h).unwrap() {
        AlphaTime::Compact(f) => f,
        other => panic!("{other:?}"),
    };
    let p = C64::new(1.1, 2.0);
    let lhs = laplace_gk(&a, &p, 1e-13).unwrap().value;
    let rhs = alpha_multiplier(&p, 3, HalfWeight::integral(3), &h).unwrap() * laplace_gk(&phi, &p, 1e-13).unwrap().value;
    assert!(rel(&lhs, &rhs) < 1e-9);
    assert!(alpha_time(&phi, 3, HalfWeight::integral(3), &HFunction::Rational { beta: 1.0 }).is_err());
}

#[test]
fn half_integer_alpha_against_inversions() {
    // Riemann-Liouville values vs Bromwich (inside the support) and Talbot (past it)
    let phi = bump();
    for doubled in [3, 5] {
        let k = HalfWeight::from_doubled(doubled);
        let a = alpha_time(&phi, 3, k, &HFunction::one()).unwrap();
        let image = |s: &C64| -> bolhalf::error::Result<C64> {
            Ok(alpha_multiplier(s, 3, k, &HFunction::one())? * laplace_gk(&phi, s, 1e-13)?.value)
        };
        let period = 16.0;
        let mult = |s: &C64| alpha_multiplier(s, 3, k, &HFunction::one());
        let br = Bromwich::from_test_function(&phi, mult, period, 18.0 / period, 1 << 17).unwrap();
        let scale = (1..40).map(|j| a.eval(&(1.0 + j as f64 / 40.0)).unwrap().abs()).fold(0.0, f64::max);
        for t in [1.2, 1.5, 1.8] {
            let (x, y) = (a.eval(&t).unwrap(), br.eval(t).re);
            assert!((x - y).abs() < 1e-7 * scale, "k = {k}, t = {t}: {x} vs {y}");
        }
        for t in [2.5, 4.0, 8.0] {
            let x = a.eval(&t).unwrap();
            let y = talbot_checked(&image, &t, 20, 1e-8).unwrap().value;
            assert!((x - y).abs() < 1e-8 * x.abs(), "k = {k}, t = {t}: {x} vs {y}");
        }
    }
}

#[test]
fn multiplier_identity_random_inputs() {
    // L_f(chi, alpha_D(phi)) = L_{f_w}(chi, phi) with w(n) = n^{k-1} h(n)
    with_prec(128, || {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let hs = [
            HFunction::Ell,
            HFunction::ExpDecay { beta: 0.3 },
            HFunction::Rational { beta: 0.5 },
            HFunction::Trig { amp: 0.4, omega: 1.3 },
            HFunction::Const { re: 0.5, im: -1.0 },
        ];
        for (i, h) in hs.iter().enumerate() {
            let k = HalfWeight::from_doubled([3, 4, 5, 3, 6][i]);
            let d = [1u64, 3, 5, 7, 3][i];
            let chi = characters_mod(d).unwrap().pop().unwrap();
            let terms: Vec<(i64, MpC)> =
                (1..=40).map(|n| (n, Cx::from_f64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect();
            let f = QSeries::from_terms(1, 41, terms.clone());
            let kr = MpReal::from_ratio(k.doubled - 2, 2);
            let fw = QSeries::from_terms(
                1,
                41,
                terms.iter().map(|(n, c)| {
                    let hn = h.eval(&Cx::<MpReal>::real(MpReal::from_i64(*n))).unwrap();
                    (*n, c.clone() * hn.scale(&MpReal::from_i64(*n).powf(&kr)))
                }),
            );
            let phi = bump();
            let img = match alpha_apply(&phi, d, k, h, AlphaMode::LaplaceDomain).unwrap() {
                AlphaOutput::Laplace(a) => a,
                other => panic!("{other:?}"),
            };
            let lhs: MpC = lseries_with_image(&f, &chi, |_, p: &MpReal| img.at(&Cx::real(p.clone()))).unwrap();
            let rhs: LValue<MpReal> = lseries_value(&fw, &chi, &phi, &LOptions::default()).unwrap();
            let err = (lhs.clone() - rhs.value.clone()).abs().to_f64() / lhs.abs().to_f64();
            assert!(err < 1e-11, "h = {h}: {err:e}");
        }
        assert_eq!(ell(9), -1);
    });
}

#[test]
fn talbot_round_trip_and_its_limits() {
    let phi = bump();
    let image = |s: &C64| Ok(laplace_gk(&phi, s, 1e-13)?.value);
    // The Bromwich trapezoid reproduces the bump on its support
    let br = Bromwich::from_test_function(&phi, |_| Ok(C64::one()), 3.0, 0.0, 1 << 13).unwrap();
    let mut sup: f64 = 0.0;
    for j in 1..40 {
        let t = 1.0 + j as f64 / 40.0;
        sup = sup.max((br.eval(t).re - phi.eval(&t)).abs());
    }
    assert!(sup < 1e-6, "Bromwich sup error {sup:e}");
    // Talbot needs decay in the left half-plane: past the support it returns 0,
    // inside it the node-doubling check refuses the value
    for t in [2.5, 5.0] {
        assert!(talbot(&image, &t, 24).unwrap().abs() < 1e-6);
    }
    for t in [1.3, 1.5, 1.7] {
        assert!(talbot_checked(&image, &t, 32, 1e-6).is_err(), "t = {t}");
    }
}

fn sc_params(k: HalfWeight, n: u64, n_prime: u64, d: u64, h: HFunction) -> ScParams {
    let level = n.max(n_prime);
    ScParams {
        k,
        n,
        n_prime,
        d,
        chi: DirichletCharacter::trivial(d),
        psi: DirichletCharacter::trivial(level),
        psi_prime: DirichletCharacter::trivial(level),
        lambda: C64::one(),
        h,
    }
}

#[test]
fn b_factor_values() {
    for doubled in [3, 5, 7] {
        let k = HalfWeight::from_doubled(doubled);
        let b = b_factor(&sc_params(k, 4, 4, 3, HFunction::one())).unwrap();
        let psi3 = DirichletCharacter::psi_d(3).unwrap().value_sign(-1).unwrap() as f64;
        assert!(rel(&b, &C64::new(psi3 * 4f64.powf(1.0 - k.as_f64()), 0.0)) < 1e-15);
        let mut p = sc_params(k, 4, 4, 3, HFunction::one());
        p.lambda = C64::new(0.0, 2.0);
        assert!(rel(&b_factor(&p).unwrap(), &(b.clone() * C64::new(0.0, 2.0))) < 1e-15);
    }
    let k = HalfWeight::integral(4);
    assert!(rel(&b_factor(&sc_params(k, 4, 4, 3, HFunction::one())).unwrap(), &C64::new(-(4f64.powi(-3)), 0.0)) < 1e-15);
    assert!(b_factor(&sc_params(HalfWeight::from_doubled(3), 4, 8, 3, HFunction::one())).unwrap().abs() > 0.0);
    assert!(b_factor(&sc_params(HalfWeight::from_doubled(3), 8, 12, 5, HFunction::one())).is_err());
    assert!(b_factor(&sc_params(HalfWeight::from_doubled(3), 4, 4, 6, HFunction::one())).is_err());
}

#[test]
fn sc_integral_weight_h_one() {
    let grid = real_grid(0.5, 5.0, 10);
    for kk in [2, 3, 4] {
        let params = sc_params(HalfWeight::integral(kk), 4, 4, 3, HFunction::one());
        let num = sc_residual(&params, &bump(), &grid, &ScOptions::default()).unwrap();
        assert!(num.max_residual < 1e-4, "k = {kk}: {:e}", num.max_residual);
        let exact = sc_residual(&params, &bump(), &grid, &ScOptions { inversion: Inversion::Exact, ..Default::default() })
            .unwrap();
        // the closed form leaves only quadrature and cancellation error
        assert!(exact.max_residual < 1e-8, "k = {kk}: {:e}", exact.max_residual);
    }
}

#[test]
fn sc_h_zero_gives_zero_sides() {
    let params = sc_params(HalfWeight::integral(3), 4, 4, 3, HFunction::zero());
    let r = sc_residual(&params, &bump(), &real_grid(1.0, 2.0, 3), &ScOptions::default()).unwrap();
    for rec in &r.records {
        assert_eq!(rec.lhs, [0.0, 0.0]);
        assert!(rec.rhs[0].abs() + rec.rhs[1].abs() < 1e-14);
    }
}

#[test]
fn sc_talbot_mode_reports_failure() {
    let params = sc_params(HalfWeight::integral(3), 4, 4, 3, HFunction::one());
    let r = sc_residual(&params, &bump(), &real_grid(1.0, 2.0, 3), &ScOptions { inversion: Inversion::Talbot, ..Default::default() });
    assert!(r.is_err());
}

#[test]
fn sc_half_integral_landscape() {
    let grid = real_grid(0.5, 5.0, 6);
    for h in [HFunction::one(), HFunction::ExpDecay { beta: 0.2 }] {
        let params = sc_params(HalfWeight::from_doubled(3), 4, 4, 3, h);
        for inversion in [Inversion::Exact, Inversion::Numerical] {
            let r = sc_residual(&params, &bump(), &grid, &ScOptions { inversion, ..Default::default() }).unwrap();
            assert_eq!(r.records.len(), grid.len());
            assert!(r.records.iter().all(|x| x.residual.is_finite() && x.quad_error < 1e-6));
        }
    }
}

#[test]
fn bessel_closed_forms_against_series() {
    with_prec(256, || {
        for n in 0..=5u32 {
            for sign in [Sign::Plus, Sign::Minus] {
                let doubled = if sign == Sign::Plus { 2 * n as i64 + 1 } else { -(2 * n as i64 + 1) };
                for j in 1..=50 {
                    let z = MpReal::from_ratio(20 * j, 50);
                    let a = bessel_half(n, sign, &z).unwrap();
                    let b = bessel_series(doubled, &z).unwrap();
                    let s = a.abs().to_f64().max(b.abs().to_f64());
                    assert!((a - b).abs().to_f64() <= 1e-12 * s, "n = {n}, {sign:?}, z = {}", 20.0 * j as f64 / 50.0);
                }
            }
        }
    });
}

#[test]
fn bessel_order_half_is_sine() {
    let z = 2.0f64;
    let v = bessel_half(0, Sign::Plus, &z).unwrap();
    assert!((v - (2.0 / (std::f64::consts::PI * z)).sqrt() * z.sin()).abs() < 1e-15);
    let w = bessel_half(0, Sign::Minus, &z).unwrap();
    assert!((w - (2.0 / (std::f64::consts::PI * z)).sqrt() * z.cos()).abs() < 1e-15);
    let s = bessel_series(3, &z).unwrap();
    assert!((bessel_half(1, Sign::Plus, &z).unwrap() - s).abs() < 1e-12);
}
