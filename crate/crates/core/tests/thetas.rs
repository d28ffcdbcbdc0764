use bolhalf::arith::{rat, with_prec, MpReal, Real, C64};
use bolhalf::characters::DirichletCharacter;
use bolhalf::thetas::{enumerate_serre_stark, fricke_theta_constants, theta_series, ThetaContext, ThetaKind};
use num_rational::BigRational;

fn ch(s: &str) -> DirichletCharacter {
    DirichletCharacter::parse(s).unwrap()
}

fn coeffs(kind: ThetaKind, psi: &str, t: u64, prec: i64) -> Vec<(i64, BigRational)> {
    let (f, _) = theta_series::<BigRational>(kind, &ch(psi), t, prec).unwrap();
    f.terms().map(|(e, c)| (e, c.clone())).collect()
}

#[test]
fn theta0_trivial_has_half_constant_term() {
    let c = coeffs(ThetaKind::Theta0, "triv:1", 1, 17);
    let expect = vec![(0, rat(1, 2)), (1, rat(1, 1)), (4, rat(1, 1)), (9, rat(1, 1)), (16, rat(1, 1))];
    assert_eq!(c, expect);
}

#[test]
fn theta1_of_minus_four() {
    let c = coeffs(ThetaKind::Theta1, "kron:-4", 1, 50);
    assert_eq!(c, vec![(1, rat(1, 1)), (9, rat(-3, 1)), (25, rat(5, 1)), (49, rat(-7, 1))]);
}

#[test]
fn theta0_of_five() {
    let c = coeffs(ThetaKind::Theta0, "kron:5", 1, 17);
    assert_eq!(c, vec![(1, rat(1, 1)), (4, rat(-1, 1)), (9, rat(-1, 1)), (16, rat(1, 1))]);
}

#[test]
fn parity_is_enforced() {
    assert!(theta_series::<BigRational>(ThetaKind::Theta0, &ch("kron:-4"), 1, 10).is_err());
    assert!(theta_series::<BigRational>(ThetaKind::Theta1, &ch("kron:5"), 1, 10).is_err());
    assert!(ThetaContext::parse("kron:-3", "kron:-4").is_err());
}

#[test]
fn serre_stark_with_t_one_is_theta0() {
    for s in ["kron:5", "kron:8", "kron:12"] {
        let a = theta_series::<BigRational>(ThetaKind::SerreStark, &ch(s), 1, 300).unwrap().0;
        let b = theta_series::<BigRational>(ThetaKind::Theta0, &ch(s), 1, 300).unwrap().0;
        assert_eq!(a, b);
    }
}

#[test]
fn serre_stark_support_is_on_t_squares() {
    let (f, _) = theta_series::<BigRational>(ThetaKind::SerreStark, &ch("triv:1"), 5, 400).unwrap();
    for (e, c) in f.terms() {
        let n = ((e / 5) as f64).sqrt().round() as i64;
        assert_eq!(5 * n * n, e);
        assert!(*c == rat(1, 1) || (e == 0 && *c == rat(1, 2)));
    }
}

#[test]
fn theta1_metadata_character() {
    let (_, meta) = theta_series::<BigRational>(ThetaKind::Theta1, &ch("kron:-4"), 1, 10).unwrap();
    assert_eq!(meta.level, 64);
    assert_eq!(meta.weight.doubled, 3);
    let expect = ch("kron:-4").product(&ch("kron:-4"));
    assert_eq!(meta.character, expect);
    assert!(meta.character.is_trivial());
    let (_, meta) = theta_series::<BigRational>(ThetaKind::Theta1, &ch("kron:-8"), 1, 10).unwrap();
    assert_eq!(meta.level, 256);
    assert!(meta.character.agrees_on_units(&ch("kron:8"), 1));
}

#[test]
fn context_level() {
    let ctx = ThetaContext::parse("kron:5", "kron:-3").unwrap();
    assert_eq!(ctx.level, 900);
    let ctx = ThetaContext::parse("triv:1", "kron:-4").unwrap();
    assert_eq!(ctx.level, 64);
}

fn pairs(n0: u64, psi0: &str) -> Vec<(String, u64)> {
    let mut v: Vec<(String, u64)> = enumerate_serre_stark(n0, &ch(psi0))
        .unwrap()
        .into_iter()
        .map(|(p, t)| (if p.modulus() == 1 { "triv".to_string() } else { format!("mod{}", p.modulus()) }, t))
        .collect();
    v.sort();
    v
}

/// Direct search over every even primitive real character of conductor
/// dividing `N0` and every `t | N0^2`, checking the defining conditions.
fn brute_pairs(n0: u64, psi0: &DirichletCharacter) -> Vec<(String, u64)> {
    let mut cands = vec![DirichletCharacter::trivial(1)];
    for d in -(4 * n0 as i64)..=(4 * n0 as i64) {
        if let Ok(c) = DirichletCharacter::kronecker_discriminant(d) {
            if d != 1 && c.is_even() && n0 % c.modulus() == 0 {
                cands.push(c);
            }
        }
    }
    let mut out = Vec::new();
    for psi in &cands {
        let r = psi.modulus();
        for t in 1..=n0 * n0 {
            if (n0 * n0) % (r * r * t) != 0 {
                continue;
            }
            let chi_t = DirichletCharacter::chi_t(t).unwrap();
            let m = 4 * n0 * n0;
            let ok = (1..m as i64).filter(|u| num_integer::gcd(*u, m as i64) == 1).all(|u| {
                psi0.value(u) == psi.value(u).and_then(|a| chi_t.value(u).map(|b| a.add(b)))
            });
            if ok {
                out.push((if r == 1 { "triv".to_string() } else { format!("mod{r}") }, t));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn serre_stark_enumeration() {
    assert_eq!(pairs(1, "triv:1"), vec![("triv".to_string(), 1)]);
    assert_eq!(pairs(5, "kron:5"), vec![("mod5".to_string(), 1), ("triv".to_string(), 5)]);
    for (n0, s) in [(1, "triv:1"), (5, "kron:5"), (2, "triv:1"), (6, "triv:1"), (8, "kron:8"), (12, "kron:12"), (10, "kron:5")] {
        assert_eq!(pairs(n0, s), brute_pairs(n0, &ch(s)), "N0 = {n0}, psi0 = {s}");
    }
}

#[test]
fn square_t_forces_psi0() {
    // psi0 primitive of modulus exactly N0, as the basis statement requires.
    for (n0, s) in [(1, "triv:1"), (5, "kron:5"), (8, "kron:8"), (12, "kron:12"), (13, "kron:13"), (24, "kron:24")] {
        for (psi, t) in enumerate_serre_stark(n0, &ch(s)).unwrap() {
            if bolhalf::characters::is_square(t) {
                assert_eq!(t, 1, "N0 = {n0}");
                assert!(psi.agrees_on_units(&ch(s), 4 * n0));
            }
        }
    }
    // Without primitivity a square t > 1 does occur.
    assert!(enumerate_serre_stark(6, &ch("triv:1")).unwrap().iter().any(|(_, t)| *t == 4));
}

#[test]
fn fricke_constants_have_unit_modulus() {
    with_prec(128, || {
        let c0 = fricke_theta_constants::<MpReal>(&ch("kron:8"), ThetaKind::Theta0).unwrap();
        let expect = bolhalf::arith::Cx::from_polar(&MpReal::one(), &(-MpReal::pi() / MpReal::from_i64(4)));
        assert!((c0.clone() - expect).abs().to_f64() < 1e-30);
        let c1 = fricke_theta_constants::<MpReal>(&ch("kron:-8"), ThetaKind::Theta1).unwrap();
        // -(8i)^{-1/2} * i sqrt 8 = -e^{i pi / 4}
        let expect = -bolhalf::arith::Cx::from_polar(&MpReal::one(), &(MpReal::pi() / MpReal::from_i64(4)));
        assert!((c1.clone() - expect).abs().to_f64() < 1e-30);
        assert!((c0.abs().to_f64() - 1.0).abs() < 1e-30);
        assert!((c1.abs().to_f64() - 1.0).abs() < 1e-30);
    });
    let c = fricke_theta_constants::<f64>(&ch("triv:1"), ThetaKind::Theta0).unwrap();
    let e = C64::from_polar(&1.0, &-std::f64::consts::FRAC_PI_4);
    assert!((c - e).abs() < 1e-15);
    assert!(fricke_theta_constants::<f64>(&ch("triv:4"), ThetaKind::Theta0).is_err());
    assert!(fricke_theta_constants::<f64>(&ch("kron:8"), ThetaKind::Theta1).is_err());
}
