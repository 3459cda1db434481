//! Exact integer arithmetic: q-adic digits, orders, φ, μ, factorization and
//! cyclotomic values.
//!
//! Hot paths work on [`Word`] with 128-bit widening; [`Nat`] is used only
//! where a quantity such as e = (q^n − 1)/z has to exist in full.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Machine-width natural number.
pub type Word = u64;

/// Arbitrary-precision natural number.
pub type Nat = BigUint;

/// Digits of a number in base `base`, least significant first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digits {
    pub base: Word,
    pub coeffs: Vec<Word>,
}

impl Digits {
    pub fn sum(&self) -> Word {
        self.coeffs.iter().sum()
    }

    pub fn value(&self) -> Nat {
        let base = Nat::from(self.base);
        self.coeffs
            .iter()
            .rev()
            .fold(Nat::zero(), |acc, &c| acc * &base + Nat::from(c))
    }
}

fn check_base(q: Word) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    Ok(())
}

/// Largest `c` with `q^c` fitting a `u64`, together with `q^c`.
fn chunk_power(q: Word) -> (usize, Word) {
    let mut c = 0;
    let mut p: Word = 1;
    while let Some(next) = p.checked_mul(q) {
        p = next;
        c += 1;
    }
    (c, p)
}

fn push_digits_u128(mut x: u128, q: Word, out: &mut Vec<Word>) {
    let q = q as u128;
    while x > 0 {
        out.push((x % q) as Word);
        x /= q;
    }
}

/// q-adic expansion of `x`.
pub fn qadic_expand(x: &Nat, q: Word) -> Result<Digits> {
    check_base(q)?;
    let mut coeffs = Vec::new();
    if let Some(small) = x.to_u128() {
        push_digits_u128(small, q, &mut coeffs);
        return Ok(Digits { base: q, coeffs });
    }
    let (c, qc) = chunk_power(q);
    let qc_big = Nat::from(qc);
    let mut rest = x.clone();
    while !rest.is_zero() {
        let (quot, rem) = rest.div_rem(&qc_big);
        let mut chunk = rem.to_u64().expect("remainder below q^c");
        if quot.is_zero() {
            push_digits_u128(chunk as u128, q, &mut coeffs);
        } else {
            for _ in 0..c {
                coeffs.push(chunk % q);
                chunk /= q;
            }
        }
        rest = quot;
    }
    Ok(Digits { base: q, coeffs })
}

/// q-adic digit sum s_q(x).
pub fn digit_sum(x: &Nat, q: Word) -> Result<Word> {
    check_base(q)?;
    if let Some(small) = x.to_u128() {
        return Ok(digit_sum_u128(small, q));
    }
    Ok(qadic_expand(x, q)?.sum())
}

pub(crate) fn digit_sum_u128(mut x: u128, q: Word) -> Word {
    let q = q as u128;
    let mut s = 0;
    while x > 0 {
        s += (x % q) as Word;
        x /= q;
    }
    s
}

#[inline]
pub fn mul_mod(a: Word, b: Word, m: Word) -> Word {
    ((a as u128 * b as u128) % m as u128) as Word
}

pub fn pow_mod(mut base: Word, mut exp: Word, m: Word) -> Word {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(a: Word, b: Word) -> Word {
    a.gcd(&b)
}

pub fn lcm(a: Word, b: Word) -> Result<Word> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b))
        .checked_mul(b)
        .ok_or_else(|| Error::Overflow(format!("lcm({a}, {b})")))
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: Word) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [Word; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const TRIAL_LIMIT: Word = 10_000_000;

/// Prime factorization as sorted `(prime, exponent)` pairs.
pub fn factorize(n: Word) -> Result<Vec<(Word, u32)>> {
    if n == 0 {
        return Err(Error::arg("cannot factorize 0"));
    }
    let mut out = Vec::new();
    let mut rest = n;
    let mut take = |p: Word, rest: &mut Word| {
        let mut k = 0;
        while *rest % p == 0 {
            *rest /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
    };
    take(2, &mut rest);
    take(3, &mut rest);
    let mut p: Word = 5;
    while p <= TRIAL_LIMIT && p.saturating_mul(p) <= rest {
        take(p, &mut rest);
        take(p + 2, &mut rest);
        p += 6;
    }
    if rest > 1 {
        if p.saturating_mul(p) > rest || is_prime(rest) {
            out.push((rest, 1));
        } else {
            return Err(Error::Capacity(format!(
                "{n} has a composite cofactor {rest} without prime factors below {TRIAL_LIMIT}"
            )));
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn euler_phi(n: Word) -> Result<Word> {
    Ok(factorize(n)?
        .into_iter()
        .map(|(p, k)| (p - 1) * p.pow(k - 1))
        .product())
}

pub fn moebius(n: Word) -> Result<i32> {
    let f = factorize(n)?;
    if f.iter().any(|&(_, k)| k > 1) {
        return Ok(0);
    }
    Ok(if f.len() % 2 == 0 { 1 } else { -1 })
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: Word) -> Result<Vec<Word>> {
    let mut ds = vec![1];
    for (p, k) in factorize(n)? {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    Ok(ds)
}

/// `Some((p, k))` when `n = p^k` with `p` prime and `k ≥ 1`.
pub fn prime_power(n: Word) -> Option<(Word, u32)> {
    if n < 2 {
        return None;
    }
    match factorize(n).ok()?.as_slice() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}

/// Multiplicative order of `a` modulo `modulus`.
pub fn mult_order(a: Word, modulus: Word) -> Result<Word> {
    if modulus == 0 {
        return Err(Error::arg("modulus must be positive"));
    }
    if modulus == 1 {
        return Ok(1);
    }
    if gcd(a % modulus, modulus) != 1 {
        return Err(Error::NotAUnit(a, modulus.to_string()));
    }
    let mut t = euler_phi(modulus)?;
    for (p, _) in factorize(t)? {
        while t % p == 0 && pow_mod(a, t / p, modulus) == 1 {
            t /= p;
        }
    }
    Ok(t)
}

/// Order of `q` modulo a big `modulus`, given that it divides `n`.
pub fn order_dividing(q: Word, modulus: &Nat, n: Word) -> Result<Word> {
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    let qb = Nat::from(q);
    let one = Nat::one() % modulus;
    if qb.modpow(&Nat::from(n), modulus) != one {
        return Err(Error::NotDivisible(format!("{modulus} does not divide {q}^{n} - 1")));
    }
    let mut t = n;
    for (p, _) in factorize(n)? {
        while t % p == 0 && qb.modpow(&Nat::from(t / p), modulus) == one {
            t /= p;
        }
    }
    Ok(t)
}

pub fn nat_pow(q: Word, n: Word) -> Nat {
    let exp = u32::try_from(n).expect("exponent fits u32");
    Nat::from(q).pow(exp)
}

/// e = (q^n − 1)/z, failing unless the division is exact.
pub fn e_from_z(q: Word, n: Word, z: Word) -> Result<Nat> {
    if z == 0 {
        return Err(Error::arg("z must be positive"));
    }
    let total = nat_pow(q, n) - 1u32;
    let (e, r) = total.div_rem(&Nat::from(z));
    if !r.is_zero() {
        return Err(Error::NotDivisible(format!("{z} does not divide {q}^{n} - 1")));
    }
    Ok(e)
}

/// z = (q^n − 1)/e as a word.
pub fn z_from_e(q: Word, n: Word, e: &Nat) -> Result<Word> {
    if e.is_zero() {
        return Err(Error::arg("e must be positive"));
    }
    let total = nat_pow(q, n) - 1u32;
    let (z, r) = total.div_rem(e);
    if !r.is_zero() {
        return Err(Error::NotDivisible(format!("{e} does not divide {q}^{n} - 1")));
    }
    z.to_u64()
        .ok_or_else(|| Error::Capacity(format!("z = ({q}^{n} - 1)/{e} exceeds a machine word")))
}

/// Φ_d(q) computed as ∏_{c | d} (q^c − 1)^{μ(d/c)}.
pub fn cyclotomic_value(d: Word, q: Word) -> Result<Nat> {
    if d == 0 {
        return Err(Error::arg("cyclotomic index must be positive"));
    }
    check_base(q)?;
    let mut num = Nat::one();
    let mut den = Nat::one();
    for c in divisors(d)? {
        let term = nat_pow(q, c) - 1u32;
        match moebius(d / c)? {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    let (v, r) = num.div_rem(&den);
    debug_assert!(r.is_zero());
    Ok(v)
}

/// Primes of the form 1 + 2^a·3^b.
pub fn is_pierpont_prime(p: Word) -> bool {
    if !is_prime(p) {
        return false;
    }
    let mut r = p - 1;
    while r % 2 == 0 {
        r /= 2;
    }
    while r % 3 == 0 {
        r /= 3;
    }
    r == 1
}

pub fn is_power_of(mut n: Word, p: Word) -> bool {
    if n == 0 {
        return false;
    }
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

pub fn to_word(x: &Nat) -> Option<Word> {
    x.to_u64()
}

/// Residue of `x` modulo a word.
pub fn nat_mod(x: &Nat, m: Word) -> Word {
    (x % Nat::from(m)).to_u64().expect("residue below modulus")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(x: u64) -> Nat {
        Nat::from(x)
    }

    #[test]
    fn expansions() {
        assert_eq!(qadic_expand(&n(7592), 3).unwrap().coeffs, vec![2, 1, 0, 2, 0, 1, 1, 0, 1]);
        assert_eq!(digit_sum(&n(7592), 3).unwrap(), 8);
        assert!(qadic_expand(&n(0), 5).unwrap().coeffs.is_empty());
        assert_eq!(qadic_expand(&n(9999), 10).unwrap().coeffs, vec![9, 9, 9, 9]);
        assert_eq!(digit_sum(&n(7), 2).unwrap(), 3);
        assert!(matches!(qadic_expand(&n(5), 1), Err(Error::InvalidBase(1))));
    }

    #[test]
    fn big_expansion_matches_value() {
        let x = nat_pow(7, 200) - 5u32;
        let d = qadic_expand(&x, 7).unwrap();
        assert_eq!(d.value(), x);
        assert!(d.coeffs.iter().all(|&c| c < 7));
        assert_eq!(d.coeffs.len(), 200);
        assert_eq!(d.coeffs[0], 2);
        let y = nat_pow(1_000_003, 9);
        assert_eq!(qadic_expand(&y, 1_000_003).unwrap().coeffs, {
            let mut v = vec![0; 9];
            v.push(1);
            v
        });
    }

    #[test]
    fn orders() {
        assert_eq!(mult_order(3, 11).unwrap(), 5);
        assert_eq!(mult_order(2, 7).unwrap(), 3);
        assert_eq!(mult_order(1, 97).unwrap(), 1);
        assert_eq!(mult_order(5, 1).unwrap(), 1);
        assert!(matches!(mult_order(4, 6), Err(Error::NotAUnit(..))));
        assert_eq!(mult_order(3, 70).unwrap(), 12);
        assert_eq!(order_dividing(5, &n(33), 10).unwrap(), 10);
        assert_eq!(order_dividing(3, &n(11), 10).unwrap(), 5);
        assert!(order_dividing(3, &n(11), 4).is_err());
    }

    #[test]
    fn arithmetic_functions() {
        assert_eq!(euler_phi(121).unwrap(), 110);
        assert_eq!(moebius(12).unwrap(), 0);
        assert_eq!(moebius(30).unwrap(), -1);
        assert_eq!(moebius(1).unwrap(), 1);
        assert_eq!(
            factorize(531_440).unwrap(),
            vec![(2, 4), (5, 1), (7, 1), (13, 1), (73, 1)]
        );
        assert!(factorize(0).is_err());
        assert_eq!(factorize(18_446_744_073_709_551_557).unwrap(), vec![(18_446_744_073_709_551_557, 1)]);
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(prime_power(243), Some((3, 5)));
        assert_eq!(prime_power(12), None);
    }

    #[test]
    fn cyclotomic() {
        assert_eq!(cyclotomic_value(5, 3).unwrap(), n(121));
        assert_eq!(cyclotomic_value(6, 2).unwrap(), n(3));
        assert_eq!(cyclotomic_value(12, 5).unwrap(), n(601));
        assert_eq!(cyclotomic_value(1, 9).unwrap(), n(8));
    }

    #[test]
    fn cyclotomic_product_is_q_power_minus_one() {
        for q in 2..=20u64 {
            for m in 1..=40u64 {
                let prod = divisors(m)
                    .unwrap()
                    .into_iter()
                    .fold(Nat::one(), |acc, d| acc * cyclotomic_value(d, q).unwrap());
                assert_eq!(prod, nat_pow(q, m) - 1u32, "q={q} n={m}");
            }
        }
    }

    #[test]
    fn pierpont() {
        assert!(is_pierpont_prime(2));
        assert!(is_pierpont_prime(17));
        assert!(is_pierpont_prime(37));
        assert!(!is_pierpont_prime(11));
        assert!(!is_pierpont_prime(9));
    }

    #[test]
    fn primality_against_trial_division() {
        for x in 0..5000u64 {
            let slow = x >= 2 && (2..x).take_while(|d| d * d <= x).all(|d| x % d != 0);
            assert_eq!(is_prime(x), slow, "{x}");
        }
    }

    proptest! {
        #[test]
        fn reconstruction(x in 0u64..=1_000_000_000_000, q in 2u64..=1000) {
            let d = qadic_expand(&n(x), q).unwrap();
            prop_assert_eq!(d.value(), n(x));
            prop_assert!(d.coeffs.iter().all(|&c| c < q));
            prop_assert!(d.coeffs.last().map_or(true, |&c| c != 0));
        }

        #[test]
        fn carry_free_addition_adds_digit_sums(x in 0u64..1_000_000_000, y in 0u64..1_000_000_000, q in 2u64..50) {
            let dx = qadic_expand(&n(x), q).unwrap().coeffs;
            let dy = qadic_expand(&n(y), q).unwrap().coeffs;
            let len = dx.len().max(dy.len());
            let carry_free = (0..len).all(|i| dx.get(i).unwrap_or(&0) + dy.get(i).unwrap_or(&0) < q);
            if carry_free {
                prop_assert_eq!(
                    digit_sum(&n(x + y), q).unwrap(),
                    digit_sum(&n(x), q).unwrap() + digit_sum(&n(y), q).unwrap()
                );
            }
        }

        #[test]
        fn order_divides_phi(a in 1u64..10_000, m in 1u64..10_000) {
            if gcd(a, m) == 1 {
                let t = mult_order(a, m).unwrap();
                prop_assert_eq!(euler_phi(m).unwrap() % t, 0);
                prop_assert_eq!(pow_mod(a, t, m), 1 % m);
            }
        }
    }
}
