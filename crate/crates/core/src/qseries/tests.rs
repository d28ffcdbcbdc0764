use num_rational::BigRational;

use super::*;
use crate::arith::{rat, C64};

type Q = QSeries<BigRational>;

fn s(start: i64, prec: i64, c: &[i64]) -> Q {
    QSeries::new(1, start, prec, c.iter().map(|&x| rat(x, 1)).collect())
}

#[test]
fn sums_and_products() {
    let a = s(-1, 3, &[1, 1]);
    let b = s(0, 3, &[1, 1]);
    assert_eq!(a.add(&b).unwrap(), s(-1, 3, &[1, 2, 1, 0]));
    let p = s(0, 5, &[1, 1]).mul(&s(0, 5, &[1, -1])).unwrap();
    assert_eq!(p, s(0, 5, &[1, 0, -1, 0, 0]));
}

#[test]
fn product_precision_rule() {
    let f = s(1, 5, &[1, 2, 3]);
    let g = s(2, 5, &[1, 1]);
    // min(5 + 2, 5 + 1): the second term is the binding one.
    assert_eq!(f.mul(&g).unwrap().prec_units(), 6);
    assert_eq!(g.mul(&f).unwrap().prec_units(), 6);
}

#[test]
fn geometric_inverse() {
    let f = QSeries::new(1, 0, 6, vec![rat(1, 2), rat(1, 1)]);
    let g = f.inv().unwrap();
    let expect: Vec<BigRational> = [2, -4, 8, -16, 32, -64].iter().map(|&x| rat(x, 1)).collect();
    assert_eq!(g.coeffs(), &expect[..]);
    assert_eq!(f.mul(&g).unwrap(), Q::one(6));
}

#[test]
fn laurent_inverse_precision() {
    let f = s(2, 10, &[3, 1, 0, 5]);
    let g = f.inv().unwrap();
    assert_eq!((g.start(), g.prec_units()), (-2, 6));
    assert!(f.mul(&g).unwrap().agrees_with(&Q::one(100)));
}

#[test]
fn cube_root_binomial() {
    // (q - 3 q^9)^{1/3} = q^{1/3} (1 - q^8 - 3 q^16 - ...)
    let f = QSeries::from_terms(1, 30, [(1, rat(1, 1)), (9, rat(-3, 1))]);
    let g = f.pow(&rat(1, 3)).unwrap();
    assert_eq!(g.denom(), 3);
    assert_eq!(g.valuation(), rat(1, 3));
    assert_eq!(g.coeff_at(&rat(1, 3)), rat(1, 1));
    assert_eq!(g.coeff_at(&rat(25, 3)), rat(-1, 1));
    // binom(1/3, 2) * 9 = (1/3)(-2/3)/2 * 9 = -1
    assert_eq!(g.coeff_at(&rat(49, 3)), rat(-1, 1));
    assert!(g.pow(&rat(3, 1)).unwrap().agrees_with(&f));
}

#[test]
fn zeroth_power_and_explog() {
    let f = s(0, 12, &[1, 2, -1, 0, 3, 1]);
    assert!(f.pow(&rat(0, 1)).unwrap().agrees_with(&Q::one(12)));
    for r in [rat(1, 2), rat(-3, 2), rat(5, 3), rat(-2, 1)] {
        assert_eq!(f.pow(&r).unwrap(), f.pow_explog(&r).unwrap(), "r = {r}");
    }
}

#[test]
fn integer_power_paths_agree() {
    let f = QSeries::from_terms(1, 60, [(0, rat(1, 1)), (1, rat(-1, 1)), (7, rat(2, 1))]);
    assert_eq!(f.pow_int(5).unwrap(), f.pow_recurrence(&rat(5, 1)).unwrap());
}

#[test]
fn bol_examples() {
    let f = s(-1, 2, &[1, 3, 1]);
    assert_eq!(f.bol(2), s(-1, 2, &[1, 0, 1]));
    assert_eq!(f.bol(0), f);
    let g = QSeries::from_terms(3, 10, [(0, rat(5, 1)), (2, rat(1, 1))]);
    assert_eq!(g.bol(1).coeff(2), rat(2, 3));
    assert_eq!(g.bol(1).start(), 2);
}

#[test]
fn rescale_examples() {
    let f = s(-1, 3, &[1, 0, 1]);
    let g = f.rescale(4);
    assert_eq!((g.start(), g.prec_units(), g.nnz()), (-4, 12, 2));
    assert_eq!(g.coeff(4), rat(1, 1));
    assert_eq!(f.rescale(1), f);
}

#[test]
fn refine_then_coarsen() {
    let f = s(-2, 7, &[1, 0, 3, 4, 0, -5]);
    assert_eq!(f.refine(6).coarsen(), f);
}

#[test]
fn delta_coefficients() {
    let d = delta_cusp::<BigRational>(10).unwrap();
    let tau: Vec<i64> = vec![1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643];
    for (n, t) in tau.iter().enumerate() {
        assert_eq!(d.coeff(n as i64 + 1), rat(*t, 1));
    }
    let di = delta_inverse::<BigRational>(8).unwrap();
    assert_eq!(di.start(), -1);
    assert_eq!(di.coeff(0), rat(24, 1));
    assert!(d.mul(&di).unwrap().agrees_with(&Q::one(9)));
}

#[test]
fn evaluation_of_constants() {
    let one = Q::one(50);
    let r = eval_series(&one, &C64::new(0.3, 1.0)).unwrap();
    assert!((r.value.re - 1.0).abs() < 1e-15 && r.tail_bound == 0.0);
    assert!(eval_series(&one, &C64::new(0.0, -1.0)).is_err());
}

#[test]
fn interchange_round_trip_exact() {
    let f: QSeries<crate::arith::QQi> = QSeries::from_terms(
        3,
        20,
        [(-2, crate::arith::QQi::new(rat(1, 3), rat(-2, 7))), (5, crate::arith::QQi::real(rat(123456789, 2)))],
    );
    let mut buf = Vec::new();
    write_series(&f, &mut buf).unwrap();
    let back = read_series(&buf[..]).unwrap();
    assert_eq!(back, AnySeries::Exact(f));
}

#[test]
fn interchange_rejects_garbage() {
    assert!(read_series(&b"3 1 1 5 1 exact\n2 3 1 1 0 1\n"[..]).is_err());
    assert!(read_series(&b"1 0 1 5 1 wat\n"[..]).is_err());
    assert!(read_series(&b""[..]).is_err());
}
