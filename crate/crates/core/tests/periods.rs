use fibdens::density;
use fibdens::modfib::{self, attains_all_residues, fib_mod, period_info};

fn primes_below(n: u64) -> impl Iterator<Item = u64> {
    (2..n).filter(|&p| modfib::is_prime(p))
}

/// F(0..len) mod m by direct recurrence.
fn sequence(m: u64, len: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(len as usize);
    let (mut a, mut b) = (0u64, 1 % m);
    for _ in 0..len {
        out.push(a);
        (a, b) = (b, (a + b) % m);
    }
    out
}

#[test]
fn period_and_anti_period() {
    for p in primes_below(2000) {
        let info = period_info(p).unwrap();
        let f = sequence(p, 3 * info.pi + 1);
        for n in 0..=2 * info.pi as usize {
            assert_eq!(f[n + info.pi as usize], f[n], "p = {p}, n = {n}");
        }
        assert_eq!(f[info.alpha as usize], 0);
        assert!((1..info.alpha as usize).all(|n| f[n] != 0), "α is not minimal at p = {p}");
        if info.ratio_class == 2 {
            for n in 0..=info.alpha as usize {
                assert_eq!((f[n + info.alpha as usize] + f[n]) % p, 0, "p = {p}, n = {n}");
            }
        }
    }
}

#[test]
fn alpha_divides_p_minus_epsilon() {
    for p in primes_below(20_000).filter(|&p| p != 2 && p != 5) {
        let info = period_info(p).unwrap();
        let target = (p as i64 - info.epsilon as i64) as u64;
        assert_eq!(target % info.alpha, 0, "p = {p}");
    }
}

#[test]
fn vinson_classes() {
    for p in primes_below(5000).filter(|&p| p != 2) {
        let info = period_info(p).unwrap();
        let expected = match info.alpha % 4 {
            1 | 3 => 4,
            2 => 1,
            _ => 2,
        };
        assert_eq!(info.ratio_class, expected, "p = {p}");
        assert_eq!(info.pi, info.alpha * expected as u64);
    }
}

#[test]
fn two_lucas_zeros_have_distinct_fibonacci_values() {
    let mut seen = 0;
    for p in primes_below(5000) {
        let zeros = density::lucas_zeros(p).unwrap().zeros;
        if let [a, b] = zeros[..] {
            assert_ne!(fib_mod(a, p).unwrap(), fib_mod(b, p).unwrap(), "p = {p}");
            seen += 1;
        }
    }
    assert!(seen > 100);
}

#[test]
fn burr_predicate_matches_enumeration() {
    for m in 2..=200u64 {
        let info_len = 6 * m * m;
        let f = sequence(m, info_len);
        let mut hit = vec![false; m as usize];
        for &x in &f {
            hit[x as usize] = true;
        }
        assert_eq!(attains_all_residues(m).unwrap(), hit.iter().all(|&h| h), "m = {m}");
    }
}
