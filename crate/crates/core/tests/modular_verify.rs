use bolhalf::arith::{with_prec, Cx, MpC, MpReal, Real};
use bolhalf::bol_ops::{delta_a, delta_meta, selberg_lift, HalfWeight};
use bolhalf::characters::DirichletCharacter;
use bolhalf::forms::FormMeta;
use bolhalf::modular_verify::*;
use bolhalf::qseries::{delta_cusp, QSeries};
use bolhalf::thetas::{fricke_theta_constants, theta_series, ThetaContext, ThetaKind};
use num_rational::BigRational;

fn ch(s: &str) -> DirichletCharacter {
    DirichletCharacter::parse(s).unwrap()
}

fn mp_pairs(n: u64, c_max: u64, count: usize, seed: u64) -> Vec<(GroupElement, MpC)> {
    sample_pairs(n, c_max, count, seed).into_iter().map(|(g, z)| (g, Cx::from_c64(&z))).collect()
}

#[test]
fn identity_and_translation_are_trivial() {
    with_prec(128, || {
        let (f, meta) = theta_series::<BigRational>(ThetaKind::Theta0, &ch("triv:1"), 1, 400).unwrap();
        let z: MpC = Cx::from_f64(0.1, 0.9);
        let base = f.evaluate(&z).unwrap().value;
        let id = slash_value(&f, &GroupElement::identity(), &meta, &z, None).unwrap().value;
        assert!((id - base.clone()).abs().to_f64() < 1e-35);
        let tr = slash_value(&f, &GroupElement::translation(1), &meta, &z, None).unwrap().value;
        assert!((tr - base).abs().to_f64() < 1e-30);
        let rep = automorphy_residual(&f, &meta, &[(GroupElement::identity(), z)], 1e-10).unwrap();
        assert_eq!(rep.max_residual, 0.0);
    });
}

#[test]
fn theta0_single_element() {
    with_prec(128, || {
        let (f, meta) = theta_series::<BigRational>(ThetaKind::Theta0, &ch("triv:1"), 1, 2000).unwrap();
        let z: MpC = Cx::from_f64(0.1, 1.0);
        let g = GroupElement::new(1, 0, 4, 1).unwrap();
        let lhs = slash_value(&f, &g, &meta, &z, Some(1e-12)).unwrap().value;
        let rhs = f.evaluate(&z).unwrap().value;
        assert!((lhs - rhs).abs().to_f64() < 1e-10);
    });
}

#[test]
fn theta_automorphy() {
    with_prec(128, || {
        let (t0, m0) = theta_series::<BigRational>(ThetaKind::Theta0, &ch("triv:1"), 1, 2000).unwrap();
        let rep = automorphy_residual(&t0, &m0, &mp_pairs(4, 2, 20, 11), 1e-10).unwrap();
        assert!(rep.pass && rep.skipped == 0, "{:?}", rep.max_residual);
        let (t1, m1) = theta_series::<BigRational>(ThetaKind::Theta1, &ch("kron:-4"), 1, 6000).unwrap();
        assert_eq!(m1.level, 64);
        let rep = automorphy_residual(&t1, &m1, &mp_pairs(64, 2, 20, 12), 1e-10).unwrap();
        assert!(rep.pass && rep.skipped == 0, "{:?}", rep.max_residual);
    });
}

#[test]
fn wrong_character_is_detected() {
    with_prec(128, || {
        let (t1, m1) = theta_series::<BigRational>(ThetaKind::Theta1, &ch("kron:-8"), 1, 8000).unwrap();
        let rep = automorphy_residual(&t1, &m1, &mp_pairs(256, 1, 12, 3), 1e-8).unwrap();
        assert!(rep.pass, "{}", rep.max_residual);
        let wrong = FormMeta::new(m1.weight, 256, DirichletCharacter::trivial(256), 0).unwrap();
        let rep = automorphy_residual(&t1, &wrong, &mp_pairs(256, 1, 12, 3), 1e-8).unwrap();
        assert!(!rep.pass);
        let wrong_weight = FormMeta::new(HalfWeight::from_doubled(1), 256, m1.character.clone(), 0).unwrap();
        let rep = automorphy_residual(&t1, &wrong_weight, &mp_pairs(256, 1, 12, 3), 1e-8).unwrap();
        assert!(!rep.pass);
    });
}

#[test]
fn selberg_image_weight_24_level_2() {
    with_prec(128, || {
        let d: QSeries<BigRational> = delta_cusp(500).unwrap();
        let s = selberg_lift(&d, 12).unwrap();
        assert_eq!(s.lift_meta.weight, HalfWeight::integral(24));
        assert_eq!(s.lift_meta.level, 2);
        let rep = automorphy_residual(&s.lift, &s.lift_meta, &mp_pairs(2, 2, 20, 5), 1e-8).unwrap();
        assert!(rep.pass && rep.skipped == 0, "{}", rep.max_residual);
    });
}

#[test]
fn integral_weight_cocycle() {
    with_prec(128, || {
        let d: QSeries<BigRational> = delta_cusp(400).unwrap();
        let meta = FormMeta::new(HalfWeight::integral(12), 1, DirichletCharacter::trivial(1), 0).unwrap();
        // A non-modular function so the check is not vacuous.
        let f = d.add(&QSeries::monomial(BigRational::from_integer(3.into()), 2, 1, 400)).unwrap();
        let g1 = GroupElement::new(2, 1, 1, 1).unwrap();
        let g2 = GroupElement::new(1, -1, 3, -2).unwrap();
        let z: MpC = Cx::from_f64(-0.3, 0.8);
        let direct = slash_value(&f, &g1.mul(&g2), &meta, &z, None).unwrap().value;
        let inner = FnEval(|w: &MpC| slash_value(&f, &g1, &meta, w, None));
        let nested = slash_value(&inner, &g2, &meta, &z, None).unwrap().value;
        assert!((direct.clone() - nested).abs().to_f64() / direct.abs().to_f64() < 1e-9);
    });
}

#[test]
fn half_integral_cocycle_on_gamma0_4() {
    // theta0 is invariant, so slashing twice by elements of Gamma0(4) must
    // agree with slashing once by the product.
    with_prec(128, || {
        let (t0, m0) = theta_series::<BigRational>(ThetaKind::Theta0, &ch("triv:1"), 1, 3000).unwrap();
        let g1 = GroupElement::new(1, 0, 4, 1).unwrap();
        let g2 = GroupElement::new(-3, 1, -16, 5).unwrap();
        let z: MpC = Cx::from_f64(-0.26, 0.05);
        let direct = slash_value(&t0, &g1.mul(&g2), &m0, &z, None).unwrap().value;
        let inner = FnEval(|w: &MpC| slash_value(&t0, &g1, &m0, w, None));
        let nested = slash_value(&inner, &g2, &m0, &z, None).unwrap().value;
        assert!((direct.clone() - nested).abs().to_f64() / direct.abs().to_f64() < 1e-9);
    });
}

#[test]
fn fricke_theta0_level_4() {
    with_prec(128, || {
        let (t0, _) = theta_series::<BigRational>(ThetaKind::Theta0, &ch("triv:1"), 1, 600).unwrap();
        let pts: Vec<MpC> = fricke_points(4, 10, 1).iter().map(Cx::from_c64).collect();
        let rep = fricke_relation(&t0, &t0, 4, HalfWeight::from_doubled(1), None, &pts, 1e-10).unwrap();
        assert!(rep.pass, "spread {}", rep.spread);
        let c = rep.derived_constant;
        let e = std::f64::consts::FRAC_PI_4;
        assert!((c[0] - e.cos()).abs() < 1e-10 && (c[1] + e.sin()).abs() < 1e-10, "{c:?}");
    });
}

#[test]
fn fricke_chi8_level_256() {
    with_prec(128, || {
        let (t0, _) = theta_series::<BigRational>(ThetaKind::Theta0, &ch("kron:8"), 1, 4000).unwrap();
        let (t1, _) = theta_series::<BigRational>(ThetaKind::Theta1, &ch("kron:-8"), 1, 4000).unwrap();
        let pts: Vec<MpC> = fricke_points(256, 10, 2).iter().map(Cx::from_c64).collect();
        let c0 = fricke_theta_constants::<MpReal>(&ch("kron:8"), ThetaKind::Theta0).unwrap();
        let rep = fricke_relation(&t0, &t0, 256, HalfWeight::from_doubled(1), Some(&c0), &pts, 1e-8).unwrap();
        assert!(rep.pass, "{:?}", rep.max_residual);
        let c1 = fricke_theta_constants::<MpReal>(&ch("kron:-8"), ThetaKind::Theta1).unwrap();
        let rep = fricke_relation(&t1, &t1, 256, HalfWeight::from_doubled(3), Some(&c1), &pts, 1e-8).unwrap();
        assert!(rep.pass, "{:?}", rep.max_residual);
        // The wrong sign is rejected.
        let rep = fricke_relation(&t1, &t1, 256, HalfWeight::from_doubled(3), Some(&-c1), &pts, 1e-8).unwrap();
        assert!(!rep.pass);
    });
}

#[test]
fn fricke_double_application_pointwise() {
    with_prec(128, || {
        let (t0, _) = theta_series::<BigRational>(ThetaKind::Theta0, &ch("triv:1"), 1, 600).unwrap();
        let k = HalfWeight::from_doubled(1);
        let once = FnEval(|w: &MpC| fricke_slash_value(&t0, 4, k, w, None));
        for z in fricke_points(4, 5, 9) {
            let z: MpC = Cx::from_c64(&z);
            let twice = fricke_slash_value(&once, 4, k, &z, None).unwrap().value;
            // W_4^2 = -1 as a matrix: the result is a constant multiple of theta0.
            let ratio = twice / t0.evaluate(&z).unwrap().value;
            let c = fricke_theta_constants::<MpReal>(&ch("triv:1"), ThetaKind::Theta0).unwrap();
            assert!((ratio - c.clone() * c).abs().to_f64() < 1e-20);
        }
    });
}

#[test]
fn delta_image_pointwise_agrees_with_series() {
    // delta_0 of the holomorphic theta0^3 at k = 5/2, evaluated once from the
    // q-expansion and once from jets at a single point.
    with_prec(160, || {
        let ctx = ThetaContext::parse("triv:1", "kron:-4").unwrap();
        let t0: QSeries<BigRational> = ctx.theta0(300).unwrap();
        let t1: QSeries<BigRational> = ctx.theta1(300).unwrap();
        let f = t0.pow_int(3).unwrap().mul(&t1.inv().unwrap()).unwrap();
        let k = HalfWeight::from_doubled(5);
        let out = delta_a(&f, k, &BigRational::from_integer(0.into()), &ctx, None).unwrap().series;
        let z: MpC = Cx::from_f64(0.17, 1.1);
        let series_val = out.evaluate(&z).unwrap().value;
        let j0 = Jet::of_series(&t0, &z, 1).unwrap();
        let j1 = Jet::of_series(&t1, &z, 1).unwrap();
        let jf = j0.powi(3).unwrap().mul(&j1.inv().unwrap());
        let point = delta_pointwise(&j0, &j1, &jf, k, &MpReal::zero()).unwrap();
        assert!((point.clone() - series_val).abs().to_f64() / point.abs().to_f64() < 1e-25);
    });
}

#[test]
fn weakly_holomorphic_delta_image_is_modular() {
    // f = theta0^2 / theta1 has weight -1/2 and a pole at infinity. Its
    // delta_0 image (k = 5/2) is checked pointwise via jets, which keeps the
    // evaluation cheap near the cusps.
    with_prec(128, || {
        let ctx = ThetaContext::parse("triv:1", "kron:-4").unwrap();
        let t0: QSeries<BigRational> = ctx.theta0(4000).unwrap();
        let t1: QSeries<BigRational> = ctx.theta1(4000).unwrap();
        let k = HalfWeight::from_doubled(5);
        let f_weight = k.dual();
        let jets = |z: &MpC| -> bolhalf::Result<(Jet<MpReal>, Jet<MpReal>, Jet<MpReal>)> {
            let j0 = Jet::of_series(&t0, z, 1)?;
            let j1 = Jet::of_series(&t1, z, 1)?;
            let jf = j0.powi(2)?.mul(&j1.inv()?);
            Ok((j0, j1, jf))
        };
        let f_eval = FnEval(|z: &MpC| {
            let (_, _, jf) = jets(z)?;
            Ok(PointValue { value: jf.value(), tail_bound: jf.tail_bound, scale: jf.value().abs().to_f64() })
        });
        // theta0^2 carries (-4/.) in weight 1; dividing by theta1 contributes
        // eps_d^2 = (-4/d) through the multiplier, so f has trivial character.
        let f_char = DirichletCharacter::trivial(4);
        let f_meta = FormMeta::new(f_weight, 64, f_char.clone(), 1).unwrap();
        let pairs = mp_pairs(64, 1, 10, 21);
        let rep = automorphy_residual(&f_eval, &f_meta, &pairs, 1e-6).unwrap();
        assert!(rep.pass, "input {}", rep.max_residual);
        let d_meta = delta_meta(&f_char, k, &ctx, 1).unwrap();
        let d_eval = FnEval(|z: &MpC| {
            let (j0, j1, jf) = jets(z)?;
            let v = delta_pointwise(&j0, &j1, &jf, k, &MpReal::zero())?;
            let tail = j0.tail_bound.max(j1.tail_bound).max(jf.tail_bound);
            Ok(PointValue { scale: v.abs().to_f64(), value: v, tail_bound: tail })
        });
        let rep = automorphy_residual(&d_eval, &d_meta, &pairs, 1e-6).unwrap();
        assert!(rep.pass, "image {}", rep.max_residual);
    });
}
