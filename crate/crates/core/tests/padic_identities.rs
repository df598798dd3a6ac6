use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

use fibdens::density;
use fibdens::padic::{plog, Basis, GoldenRing, PAdic, Valuation};

const ODD_PRIMES: [u64; 10] = [3, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const INERT_PRIMES: [u64; 6] = [3, 7, 13, 17, 23, 37];

fn element(p: u64, a: i64, b: i64, prec: u32) -> PAdic {
    let basis = Basis::for_prime(p).unwrap();
    let b = if basis == Basis::Rational { 0 } else { b };
    PAdic::new(p, basis, &BigInt::from(a), &BigInt::from(b), prec).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn close_elements_stay_close_under_p_power_maps(
        p in prop::sample::select(ODD_PRIMES.to_vec()),
        a in 1i64..1_000_000, b in 0i64..1_000_000, c in 0i64..1_000_000, e in 1u32..=3,
    ) {
        let prec = e + 3;
        let x = element(p, a, b, prec);
        let y = &x + &element(p, c, a, prec).shift_up(1);
        let q = BigUint::from(p).pow(e);
        let diff = &x.pow_big(&q) - &y.pow_big(&q);
        prop_assert!(diff.valuation() >= Valuation::Finite(e + 1), "ν = {}", diff.valuation());
    }

    #[test]
    fn norm_one_logs_are_pure_sqrt5(
        p in prop::sample::select(INERT_PRIMES.to_vec()),
        a in 0i64..1_000_000, b in 1i64..1_000_000,
    ) {
        let prec = 6;
        let y = &element(p, 1, 0, prec) + &element(p, a, b, prec).shift_up(1);
        let x = y.checked_div(&y.conj().unwrap()).unwrap();
        prop_assert_eq!(x.norm(), PAdic::from_int(p, 1, prec));
        let log = plog(&x, prec).unwrap();
        prop_assert_eq!(log.a(), &BigUint::from(0u32));
        prop_assert!(PAdic::from_biguint(p, log.b(), prec).valuation() >= Valuation::Finite(1));
    }

    #[test]
    fn conjugation_is_multiplicative(
        p in prop::sample::select(INERT_PRIMES.to_vec()),
        a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000, d in -1000i64..1000,
    ) {
        let prec = 5;
        let x = element(p, a, b, prec);
        let y = element(p, c, d, prec);
        prop_assert_eq!((&x * &y).conj().unwrap(), &x.conj().unwrap() * &y.conj().unwrap());
        prop_assert_eq!(x.conj().unwrap().conj().unwrap(), x);
    }
}

#[test]
fn golden_ratio_identities() {
    for p in ODD_PRIMES.into_iter().chain([2]) {
        let ring = GoldenRing::new(p).unwrap();
        let prec = 8;
        let phi = ring.phi(prec).unwrap();
        let phi_bar = ring.phi_bar(prec).unwrap();
        assert_eq!(&phi * &phi_bar, ring.int(-1, prec), "p = {p}");
        assert_eq!(&phi - &phi_bar, ring.sqrt5(prec).unwrap(), "p = {p}");
        if p != 2 {
            assert_eq!(&phi + &phi, &ring.int(1, prec) + &ring.sqrt5(prec).unwrap(), "p = {p}");
        }
    }
}

#[test]
fn log_of_phi_ratio_has_the_wall_valuation() {
    for p in (3..600).filter(|&p| p != 5 && fibdens::modfib::is_prime(p)) {
        let ring = GoldenRing::new(p).unwrap();
        let e = density::wall_exponent(p, 6).unwrap().e;
        let log = plog(&ring.phi_ratio(e + 4).unwrap(), e + 4).unwrap();
        assert_eq!(log.valuation(), Valuation::Finite(e), "p = {p}");
    }
}
