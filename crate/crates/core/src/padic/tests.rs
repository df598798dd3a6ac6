use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

use super::*;

fn fib_big(n: u64) -> BigUint {
    let (mut a, mut b) = (BigUint::from(0u32), BigUint::from(1u32));
    for _ in 0..n {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

fn small_primes() -> Vec<u64> {
    (3..200).filter(|&p| p != 5 && modfib::is_prime(p)).collect()
}

#[test]
fn sqrt5_is_canonical() {
    assert_eq!(sqrt5(11, 1).unwrap().a(), &BigUint::from(4u32));
    assert_eq!(sqrt5(29, 1).unwrap().a(), &BigUint::from(11u32));
    let r = sqrt5(11, 2).unwrap();
    assert_eq!(&r * &r, PAdic::from_int(11, 5, 2));
    assert_eq!(r.a() % 11u32, BigUint::from(4u32));
    assert!(matches!(sqrt5(7, 3), Err(Error::InvalidArgument(_))));
}

#[test]
fn hensel_examples() {
    let coeffs = [PAdic::from_int(11, -5, 6), PAdic::from_int(11, 0, 6), PAdic::from_int(11, 1, 6)];
    let root = hensel_root(&coeffs, &PAdic::from_int(11, 4, 6), 6).unwrap();
    assert_eq!(root, sqrt5(11, 6).unwrap());

    let coeffs = [PAdic::from_int(13, -1, 5), PAdic::from_int(13, 0, 5), PAdic::from_int(13, 1, 5)];
    assert_eq!(hensel_root(&coeffs, &PAdic::from_int(13, 1, 5), 5).unwrap(), PAdic::from_int(13, 1, 5));

    // y² + 1 has no root near 1 mod 13
    let coeffs = [PAdic::from_int(13, 1, 5), PAdic::from_int(13, 0, 5), PAdic::from_int(13, 1, 5)];
    assert!(matches!(
        hensel_root(&coeffs, &PAdic::from_int(13, 1, 5), 5),
        Err(Error::NoConvergence { .. })
    ));
}

#[test]
fn hensel_near_a_lucas_zero_at_seven() {
    // f(y) = y² - √5·z·y + ζ² with ζ = ω(φ)^4 and z = 3; the roots sit at
    // distance 7^(-1) from ζ, so Newton is started one digit away from ζ.
    let prec = 10;
    let ring = GoldenRing::new(7).unwrap();
    let zeta = ring.omega_phi(prec).unwrap().pow(4);
    let root5 = ring.sqrt5(prec).unwrap();
    let z = ring.int(3, prec);
    let coeffs = [&zeta * &zeta, -&(&root5 * &z), ring.int(1, prec)];
    let mut found = 0;
    for a0 in 0..7 {
        for a1 in 0..7 {
            let offset = PAdic::from_parts(7, Basis::Sqrt5, 7 * a0, 7 * a1, prec).unwrap();
            let Ok(y) = hensel_root(&coeffs, &(&zeta + &offset), prec - 4) else { continue };
            let residual = &(&(&y * &y) - &(&(&root5 * &z) * &y)) + &(&zeta * &zeta).truncate(y.prec());
            assert!(residual.is_zero());
            assert_eq!((&y - &zeta.truncate(y.prec())).valuation(), Valuation::Finite(1));
            found += 1;
        }
    }
    assert!(found > 0);
}

#[test]
fn teichmuller_at_two_matches_known_digits() {
    let w = GoldenRing::new(2).unwrap().omega_phi(4).unwrap();
    assert_eq!(w.digits_a(), vec![0, 1, 0, 0]);
    assert_eq!(w.digits_b(), vec![1, 1, 0, 1]);
}

#[test]
fn lucas_zero_branch_points_at_seven() {
    let ring = GoldenRing::new(7).unwrap();
    let two_over_root5 = ring.int(2, 10).checked_div(&ring.sqrt5(10).unwrap()).unwrap();
    let w = ring.omega_phi(10).unwrap();
    let digits = |i: u64| {
        let c = (&w.pow(i) * &two_over_root5).to_base().unwrap();
        c.truncate(8).digits_a()
    };
    assert_eq!(digits(4), vec![3, 0, 3, 4, 3, 6, 4, 1]);
    assert_eq!(digits(12), vec![4, 6, 3, 2, 3, 0, 2, 5]);
}

#[test]
fn teichmuller_rejects_bad_input() {
    assert!(matches!(teichmuller(&PAdic::from_int(7, 14, 4), 4), Err(Error::InvalidArgument(_))));
    assert!(matches!(teichmuller(&PAdic::from_int(5, 2, 4), 4), Err(Error::Unsupported(_))));
    assert_eq!(teichmuller(&PAdic::from_int(13, 1, 6), 6).unwrap(), PAdic::from_int(13, 1, 6));
}

#[test]
fn log_and_exp_basics() {
    assert!(plog(&PAdic::from_int(7, 1, 6), 6).unwrap().is_zero());
    assert_eq!(pexp(&PAdic::from_int(7, 0, 6), 6).unwrap(), PAdic::from_int(7, 1, 6));
    assert!(matches!(plog(&PAdic::from_int(7, 3, 6), 6), Err(Error::Domain(_))));
    assert!(matches!(pexp(&PAdic::from_int(7, 3, 6), 6), Err(Error::Domain(_))));
    assert!(matches!(pexp(&PAdic::from_int(2, 2, 8), 8), Err(Error::Domain(_))));
    assert!(pexp(&PAdic::from_int(2, 4, 8), 8).is_ok());
}

#[test]
fn log_of_phi_ratio_has_wall_valuation() {
    for p in small_primes() {
        let ring = GoldenRing::new(p).unwrap();
        let log = plog(&ring.phi_ratio(4).unwrap(), 4).unwrap();
        assert_eq!(log.valuation(), Valuation::Finite(1), "p = {p}");
        assert_eq!(wall_valuation(&ring, 4).unwrap(), Valuation::Finite(1), "p = {p}");
    }
}

#[test]
fn golden_ratio_identities() {
    for p in [2u64, 3, 7, 11, 13, 29] {
        let ring = GoldenRing::new(p).unwrap();
        let prec = 6;
        let phi = ring.phi(prec).unwrap();
        let phi_bar = ring.phi_bar(prec).unwrap();
        assert_eq!(&phi * &phi_bar, ring.int(-1, prec), "p = {p}");
        assert_eq!(&phi * &phi, &phi + &ring.int(1, prec), "p = {p}");
        if p != 2 {
            assert_eq!(phi.mul_int(2), &ring.int(1, prec) + &ring.sqrt5(prec).unwrap());
        }
        if ring.basis() != Basis::Rational {
            assert_eq!(phi.conj().unwrap(), phi_bar, "p = {p}");
        }
    }
}

#[test]
fn conjugation_is_an_involutive_ring_map() {
    for p in [2u64, 3, 7, 13] {
        let basis = Basis::for_prime(p).unwrap();
        for (a, b, c, d) in [(1, 2, 3, 4), (5, -7, 11, 13), (0, 1, 1, 0), (-9, 8, 6, -3)] {
            let x = PAdic::from_parts(p, basis, a, b, 7).unwrap();
            let y = PAdic::from_parts(p, basis, c, d, 7).unwrap();
            assert_eq!(x.conj().unwrap().conj().unwrap(), x);
            assert_eq!((&x * &y).conj().unwrap(), &x.conj().unwrap() * &y.conj().unwrap());
            assert_eq!((&x + &y).conj().unwrap(), &x.conj().unwrap() + &y.conj().unwrap());
            assert!(x.norm().in_base_ring());
        }
    }
}

#[test]
fn interpolation_agrees_with_fibonacci() {
    let prec = 6;
    for p in [7u64, 11, 13, 19, 3] {
        let pi = modfib::period_info(p).unwrap().pi;
        let interp = Interpolation::new(p, prec).unwrap();
        let m = BigUint::from(p).pow(prec);
        for n in 0..=50u64 {
            let value = interp.eval(n % pi, &PAdic::from_int(p, n as i64, prec)).unwrap();
            assert_eq!(value.a(), &(fib_big(n) % &m), "p = {p}, n = {n}");
        }
    }
    let at_three = interp_f(3, &PAdic::from_int(13, 3, 5), 5).unwrap();
    assert_eq!(at_three, PAdic::from_int(13, 2, 5));
    let at_eight = interp_f(8, &PAdic::from_int(7, 8, 5), 5).unwrap();
    assert_eq!(at_eight.valuation(), Valuation::Finite(1));
    assert_eq!(&at_eight.digits_a()[..2], &[0, 3]);
}

#[test]
fn interpolation_rejects_bad_arguments() {
    assert!(matches!(Interpolation::new(2, 4), Err(Error::Unsupported(_))));
    assert!(matches!(Interpolation::new(5, 4), Err(Error::Unsupported(_))));
    let interp = Interpolation::new(7, 6).unwrap();
    assert!(matches!(
        interp.eval(1, &PAdic::from_int(7, 1, 3)),
        Err(Error::Precision { needed: 6, available: 3 })
    ));
    assert!(matches!(interp.eval(1, &PAdic::from_int(11, 1, 6)), Err(Error::InvalidArgument(_))));
}

#[test]
fn two_adic_interpolation() {
    let prec = 8;
    let interp = Interpolation2::new(prec).unwrap();
    assert!(interp.log_ratio_sq().valuation() >= Valuation::Finite(2));
    let m = BigUint::from(2u32).pow(prec);
    for n in 0..=50u64 {
        assert_eq!(interp.eval_index(n).unwrap().a(), &(fib_big(n) % &m), "n = {n}");
    }
    assert!(interp.eval(0, 0, &PAdic::from_int(2, 0, prec)).unwrap().is_zero());
    assert_eq!(interp_f2(1, 1, &PAdic::from_int(2, 0, prec), prec).unwrap(), PAdic::from_int(2, 1, prec));
    assert!(matches!(interp.eval(3, 0, &PAdic::from_int(2, 0, prec)), Err(Error::InvalidArgument(_))));
}

#[test]
fn division_tracks_precision() {
    let x = PAdic::from_int(7, 98, 6);
    let y = PAdic::from_int(7, 7, 6);
    let q = x.checked_div(&y).unwrap();
    assert_eq!(q, PAdic::from_int(7, 14, 5));
    assert!(PAdic::from_int(7, 3, 6).checked_div(&y).is_err());
    assert_eq!(PAdic::from_int(7, 0, 4).valuation(), Valuation::Infinite);
    assert_eq!(PAdic::from_int(7, 49 * 3, 4).valuation(), Valuation::Finite(2));
    let big = PAdic::new(3, Basis::Sqrt5, &BigInt::from(9), &BigInt::from(-27), 5).unwrap();
    assert_eq!(big.valuation(), Valuation::Finite(2));
}

fn unit_strategy() -> impl Strategy<Value = (u64, i64, i64)> {
    (prop::sample::select(small_primes()), 1i64..1_000_000, 0i64..1_000_000)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn teichmuller_is_a_root_of_unity((p, a, b) in unit_strategy(), prec in 1u32..6) {
        let ring = GoldenRing::new(p).unwrap();
        let b = if ring.basis() == Basis::Rational { 0 } else { b };
        let x = PAdic::from_parts(p, ring.basis(), a, b, prec).unwrap();
        prop_assume!(x.is_unit());
        let w = teichmuller(&x, prec).unwrap();
        prop_assert_eq!(w.pow_big(&ring.unit_root_order()), x.one_like());
        prop_assert_eq!(w.truncate(1), x.truncate(1));
        // ν(x^(p^f) - x) = ν(x - ω(x))
        let q = BigUint::from(p).pow(ring.residue_degree());
        prop_assert_eq!((&x.pow_big(&q) - &x).valuation(), (&x - &w).valuation());
    }

    #[test]
    fn exp_and_log_invert_each_other((p, a, b) in unit_strategy(), shift in 1u32..4) {
        let prec = 6;
        let basis = Basis::for_prime(p).unwrap();
        let b = if basis == Basis::Rational { 0 } else { b };
        let t = PAdic::from_parts(p, basis, a, b, prec).unwrap().shift_up(shift);
        let back = plog(&pexp(&t, prec).unwrap(), prec).unwrap();
        prop_assert_eq!(back, t.clone());
        let x = &t.one_like() + &t;
        prop_assert_eq!(pexp(&plog(&x, prec).unwrap(), prec).unwrap(), x);
    }

    #[test]
    fn log_is_a_homomorphism((p, a, b) in unit_strategy(), c in 1i64..1_000_000) {
        let prec = 5;
        let x = &PAdic::from_int(p, 1, prec) + &PAdic::from_int(p, a, prec).shift_up(1);
        let y = &PAdic::from_int(p, 1, prec) + &PAdic::from_int(p, b + c, prec).shift_up(1);
        let sum = &plog(&x, prec).unwrap() + &plog(&y, prec).unwrap();
        prop_assert_eq!(plog(&(&x * &y), prec).unwrap(), sum);
    }
}
