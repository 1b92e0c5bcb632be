//! Operators of lower order than the published ones, which exist once the
//! coefficient degree exceeds two. Each is checked by exact monomial
//! annihilation and by quadrature, independently of the derivation.

use steinforge::gaussian::hermite;
use steinforge::ibp::{derive_default, verify_certificate, Status};
use steinforge::verify::{verify_quadrature, verify_symbolic, QuadratureConfig, TestFunction};
use steinforge::{DiffOperator, Polynomial};

fn independently_valid(op: &DiffOperator, p: &Polynomial) {
    assert!(verify_symbolic(op, p, 30).pass);
    let q = verify_quadrature(op, p, &TestFunction::default_suite(), &QuadratureConfig::default()).unwrap();
    assert!(q.pass, "{q:?}");
}

#[test]
fn second_order_operator_for_h4() {
    let op = DiffOperator::from_ints(&[&[24, 50, -1], &[-1008, 72, 64], &[1728, -576, -48, 16]]);
    let p = hermite(4);
    independently_valid(&op, &p);

    let r = derive_default(&p, 2, 3).unwrap();
    assert_eq!(r.status, Status::Found);
    assert_eq!(r.nullspace_dim, 1);
    assert!(verify_certificate(&r, &p));
    assert!(r.operator.unwrap().proportional_eq(&op).unwrap().equal);
    assert_eq!(derive_default(&p, 2, 2).unwrap().status, Status::InfeasibleAtBounds);
}

#[test]
fn third_order_operator_for_h3() {
    let op = DiffOperator::from_ints(&[
        &[-1560, 0, 818, 0, -1],
        &[0, -4368, 0, 1014],
        &[6480, 0, -3348, 0, 324],
        &[0, 2160, 0, -648, 0, 27],
    ]);
    let p = hermite(3);
    independently_valid(&op, &p);

    let r = derive_default(&p, 3, 6).unwrap();
    assert_eq!(r.status, Status::Found);
    assert!(verify_certificate(&r, &p));
    independently_valid(r.operator.as_ref().unwrap(), &p);

    let r4 = derive_default(&p, 4, 6).unwrap();
    assert_eq!(r4.status, Status::Found);
    assert_eq!(r4.nullspace_dim, 8);
    assert!(verify_certificate(&r4, &p));
}
