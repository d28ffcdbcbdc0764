use bolhalf::arith::{rat, with_prec, MpC, MpReal, Real};
use bolhalf::qseries::{eval_series, QSeries};
use num_rational::BigRational;
use proptest::prelude::*;

type Q = QSeries<BigRational>;

fn series(max_len: usize) -> impl Strategy<Value = Q> {
    (1u64..=3, -3i64..3, prop::collection::vec(-5i64..=5, 1..max_len), 0i64..4).prop_map(|(m, start, c, extra)| {
        let prec = start + c.len() as i64 + extra;
        QSeries::new(m, start, prec, c.into_iter().map(|x| rat(x, 1)).collect())
    })
}

fn unit_series(max_len: usize) -> impl Strategy<Value = Q> {
    (-2i64..3, prop::collection::vec(-4i64..=4, 1..max_len)).prop_map(|(start, mut c)| {
        c[0] = 1;
        let prec = start + c.len() as i64;
        QSeries::new(1, start, prec, c.into_iter().map(|x| rat(x, 1)).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in series(8), b in series(8), c in series(8)) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(l.agrees_with(&r));
    }

    #[test]
    fn multiplication_distributes(a in series(8), b in series(8), c in series(8)) {
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(l.agrees_with(&r));
    }

    #[test]
    fn multiplication_commutes(a in series(10), b in series(10)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn inverse_is_an_involution(f in unit_series(10)) {
        let g = f.inv().unwrap();
        prop_assert!(g.inv().unwrap().agrees_with(&f));
        let one = f.mul(&g).unwrap();
        prop_assert_eq!(one.prec_units(), f.prec_units() - f.start());
        prop_assert!(one.agrees_with(&Q::one(1000)));
    }

    #[test]
    fn cube_root_round_trip(f in unit_series(9)) {
        let g = f.pow(&rat(1, 3)).unwrap();
        prop_assert!(g.pow(&rat(3, 1)).unwrap().agrees_with(&f));
    }

    #[test]
    fn fractional_power_matches_exp_log(f in unit_series(8), p in -4i64..5, q in 1i64..4) {
        let r = rat(p, q);
        if let (Ok(a), Ok(b)) = (f.pow(&r), f.pow_explog(&r)) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn higher_precision_agrees_below_lower(f in unit_series(12), cut in 1i64..6) {
        let lo = f.truncate(f.start() + cut);
        let a = lo.pow(&rat(-3, 2)).unwrap();
        let b = f.pow(&rat(-3, 2)).unwrap();
        prop_assert!(a.prec_units() <= b.prec_units());
        prop_assert!(a.agrees_with(&b));
    }

    #[test]
    fn refine_coarsen_round_trip(f in series(10), k in 1u64..5) {
        prop_assert_eq!(f.refine(k).coarsen(), f.coarsen());
    }

    #[test]
    fn bol_scales_under_rescale(f in series(10), m in 1u32..4, s in 1u64..4) {
        // D^m (f(sz)) = s^m (D^m f)(sz)
        let l = f.rescale(s).bol(m);
        let r = f.bol(m).rescale(s).scale_rational(&num_traits::pow(rat(s as i64, 1), m as usize));
        prop_assert_eq!(l, r);
    }
}

#[test]
fn jacobi_theta_at_i_in_multiprecision() {
    // sum_{n in Z} e^{-pi n^2} = pi^{1/4} / Gamma(3/4)
    with_prec(192, || {
        let terms = (-40i64..=40).map(|n| (n * n, rat(1, 1)));
        let theta: QSeries<BigRational> = QSeries::from_terms(2, 3200, terms);
        let z = MpC::new(MpReal::zero(), MpReal::one());
        let r = eval_series(&theta, &z).unwrap();
        let expect = MpReal::parse("1.0864348112133080145753161215102234570702057072452").unwrap();
        let err = (r.value.re - expect).abs().to_f64();
        assert!(err < 1e-25, "error {err}");
        assert!(r.value.im.abs().to_f64() < 1e-40);
        assert!(r.tail_bound < 1e-25);
    });
}
