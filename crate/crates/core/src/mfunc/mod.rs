//! The invariant m(q,e): the least number of powers of q whose sum is
//! divisible by e.
//!
//! Three independent algorithms compute it: breadth-first search over ℤ/e,
//! a scan of the digit sums s_q(ke), and the residue formula that works
//! modulo z = (q^n − 1)/e only. Closed forms live in [`closed_form`].

mod candidates;
pub mod closed_form;
mod table;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd, mult_order, nat_pow, pow_mod, Nat, Word};
use crate::error::{Error, Result};

pub use candidates::small_e_candidates;
pub use closed_form::{classify_large_m, closed_form_rules, m_closed_form, LargeMCase, LargeMKind, Rule};
pub use table::{emit_m_table, group_by_m, MTable, ResidueGroups};

/// Largest modulus accepted by [`m_bfs`].
/// Largest z handled by the residue formula.
pub const VIA_Z_MAX: Word = 1 << 30;

pub const BFS_MAX_E: Word = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bfs,
    DigitScan,
    ResidueFormula,
    ClosedForm(Rule),
}

/// A value of m(q,e) with the algorithm that produced it.
///
/// The witness, when present, is a multiset of exponents stored as
/// `(exponent, multiplicity)` pairs: Σ multiplicity·q^exponent ≡ 0 (mod e)
/// and the multiplicities add up to `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MResult {
    pub m: Word,
    pub method: Method,
    pub witness: Option<Vec<(Word, Word)>>,
    /// The multiplier k with s_q(ke) = m, for the digit-based methods.
    pub k: Option<Word>,
}

impl MResult {
    /// Checks the witness against a modulus.
    pub fn witness_holds(&self, q: Word, e: &Nat) -> bool {
        let Some(w) = &self.witness else { return true };
        let count: Word = w.iter().map(|&(_, c)| c).sum();
        let qb = Nat::from(q);
        let sum = w.iter().fold(Nat::zero(), |acc, &(i, c)| {
            acc + Nat::from(c) * qb.modpow(&Nat::from(i), e)
        });
        count == self.m && (sum % e).is_zero()
    }
}

fn multiset(exps: impl IntoIterator<Item = Word>) -> Vec<(Word, Word)> {
    let mut v: Vec<Word> = exps.into_iter().collect();
    v.sort_unstable();
    let mut out: Vec<(Word, Word)> = Vec::new();
    for i in v {
        match out.last_mut() {
            Some((j, c)) if *j == i => *c += 1,
            _ => out.push((i, 1)),
        }
    }
    out
}

fn digits_multiset(digits: &[Word]) -> Vec<(Word, Word)> {
    digits
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i as Word, c))
        .collect()
}

fn check_unit(q: Word, e: Word) -> Result<()> {
    if gcd(q % e, e) != 1 {
        return Err(Error::NotAUnit(q, e.to_string()));
    }
    Ok(())
}

/// m(q,e) by layered breadth-first search over ℤ/eℤ.
pub fn m_bfs(q: Word, e: Word) -> Result<MResult> {
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    if e == 0 {
        return Err(Error::arg("e must be positive"));
    }
    check_unit(q, e)?;
    if e > BFS_MAX_E {
        return Err(Error::Capacity(format!(
            "e = {e} is too large for the search table; use the residue formula with z"
        )));
    }
    if e == 1 {
        return Ok(MResult { m: 1, method: Method::Bfs, witness: Some(vec![(0, 1)]), k: None });
    }
    let mut powers = Vec::new();
    let mut p = 1 % e;
    loop {
        powers.push(p);
        p = arith::mul_mod(p, q, e);
        if p == 1 {
            break;
        }
    }
    const UNSEEN: u32 = u32::MAX;
    let eu = e as usize;
    let mut parent = vec![UNSEEN; eu];
    let mut frontier = Vec::with_capacity(powers.len());
    for (i, &p) in powers.iter().enumerate() {
        parent[p as usize] = i as u32;
        frontier.push(p);
    }
    let mut layer: Word = 1;
    let mut next = Vec::new();
    let found = 'search: loop {
        next.clear();
        for &r in &frontier {
            for (i, &p) in powers.iter().enumerate() {
                let mut s = r + p;
                if s >= e {
                    s -= e;
                }
                if s == 0 {
                    parent[0] = i as u32;
                    break 'search layer + 1;
                }
                if parent[s as usize] == UNSEEN {
                    parent[s as usize] = i as u32;
                    next.push(s);
                }
            }
        }
        debug_assert!(!next.is_empty(), "0 is always reachable");
        std::mem::swap(&mut frontier, &mut next);
        layer += 1;
    };
    let mut exps = Vec::with_capacity(found as usize);
    let mut cur: Word = 0;
    for _ in 0..found {
        let i = parent[cur as usize];
        exps.push(i as Word);
        let p = powers[i as usize];
        cur = if cur >= p { cur - p } else { cur + e - p };
    }
    debug_assert_eq!(cur, 0);
    Ok(MResult { m: found, method: Method::Bfs, witness: Some(multiset(exps)), k: None })
}

/// m(q,e) as min s_q(ke) over k = 1..z, z = (q^n − 1)/e, in exact arithmetic.
pub fn m_digit_scan(q: Word, n: Word, e: &Nat) -> Result<MResult> {
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    let z = arith::z_from_e(q, n, e)?;
    let mut best = (Word::MAX, 0);
    let top = nat_pow(q, n) - 1u32;
    if let (Some(e128), true) = (num_traits::ToPrimitive::to_u128(e), num_traits::ToPrimitive::to_u128(&top).is_some()) {
        let mut x: u128 = 0;
        for k in 1..=z {
            x += e128;
            let s = arith::digit_sum_u128(x, q);
            if s < best.0 {
                best = (s, k);
            }
        }
    } else {
        let mut x = Nat::zero();
        for k in 1..=z {
            x += e;
            let s = arith::digit_sum(&x, q)?;
            if s < best.0 {
                best = (s, k);
            }
        }
    }
    let (m, k) = best;
    let digits = arith::qadic_expand(&(e * Nat::from(k)), q)?;
    Ok(MResult {
        m,
        method: Method::DigitScan,
        witness: Some(digits_multiset(&digits.coeffs)),
        k: Some(k),
    })
}

/// Digit vector of k·e computed from residues modulo z only: the
/// coefficient of q^(i−1) is ⌊(k·q^(n−i) mod z)·q / z⌋.
pub fn residue_digits(q: Word, n: Word, z: Word, k: Word) -> Vec<Word> {
    if k == z {
        return vec![q - 1; n as usize];
    }
    (1..=n)
        .map(|i| {
            let r = arith::mul_mod(k, pow_mod(q, n - i, z), z);
            ((r as u128 * q as u128) / z as u128) as Word
        })
        .collect()
}

/// m(q,e) from residues modulo z = (q^n − 1)/e:
/// (q−1)/z · n/ν · min over 1 ≤ k < z of Σ_{i=1}^{ν} (k q^i mod z).
pub fn m_via_z(q: Word, n: Word, z: Word) -> Result<MResult> {
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    if z == 0 || n == 0 {
        return Err(Error::arg("n and z must be positive"));
    }
    if pow_mod(q, n, z) != 1 % z {
        return Err(Error::NotDivisible(format!("{z} does not divide {q}^{n} - 1")));
    }
    if z == 1 {
        let m = n
            .checked_mul(q - 1)
            .ok_or_else(|| Error::Overflow(format!("n(q-1) for q={q}, n={n}")))?;
        return Ok(MResult {
            m,
            method: Method::ResidueFormula,
            witness: Some(residue_digits(q, n, 1, 1).iter().enumerate().map(|(i, &c)| (i as Word, c)).collect()),
            k: Some(1),
        });
    }
    if z > VIA_Z_MAX {
        return Err(Error::Capacity(format!("orbit walk over z = {z} residues")));
    }
    let nu = mult_order(q, z)?;
    let qz = q % z;
    let mut seen = vec![false; z as usize];
    let mut best: Option<(u128, Word)> = None;
    for k in 1..z {
        if seen[k as usize] {
            continue;
        }
        let mut r = k;
        let mut len: Word = 0;
        let mut sum: u128 = 0;
        loop {
            seen[r as usize] = true;
            sum += r as u128;
            len += 1;
            r = arith::mul_mod(r, qz, z);
            if r == k {
                break;
            }
        }
        let total = sum * (nu / len) as u128;
        if best.map_or(true, |(b, _)| total < b) {
            best = Some((total, k));
        }
    }
    let (s, k) = best.expect("z > 1 has a nonzero residue");
    let num = ((q - 1) as u128)
        .checked_mul(n as u128)
        .and_then(|x| x.checked_mul(s))
        .ok_or_else(|| Error::Overflow(format!("residue formula for q={q}, n={n}, z={z}")))?;
    let den = z as u128 * nu as u128;
    debug_assert_eq!(num % den, 0);
    let m = Word::try_from(num / den).map_err(|_| Error::Overflow("m exceeds a word".into()))?;
    Ok(MResult {
        m,
        method: Method::ResidueFormula,
        witness: Some(digits_multiset(&residue_digits(q, n, z, k))),
        k: Some(k),
    })
}

/// m(q,e) by the cheapest applicable general method.
///
/// With `n` known and z = (q^n − 1)/e smaller than e the residue formula is
/// used; otherwise breadth-first search, falling back to the residue formula
/// with n = ord_e(q) when e is beyond the search capacity.
pub fn m_auto(q: Word, n: Option<Word>, e: &Nat) -> Result<MResult> {
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    if e.is_zero() {
        return Err(Error::arg("e must be positive"));
    }
    let e_word = arith::to_word(e);
    if let Some(n) = n {
        match arith::z_from_e(q, n, e) {
            Ok(z) if e_word.map_or(true, |ew| z < ew || ew > BFS_MAX_E) => return m_via_z(q, n, z),
            Ok(_) => {}
            Err(err) if err.is_capacity() && e_word.is_some_and(|ew| ew <= BFS_MAX_E) => {}
            Err(err) => return Err(err),
        }
    }
    match e_word {
        Some(ew) if ew <= BFS_MAX_E => m_bfs(q, ew),
        Some(ew) => {
            check_unit(q, ew)?;
            let n = mult_order(q, ew)?;
            m_via_z(q, n, arith::z_from_e(q, n, e)?)
        }
        None => Err(Error::Capacity(format!(
            "e = {e} needs n to be given so that the residue formula applies"
        ))),
    }
}

/// m for e = e'·(q^n − 1)/(q^{n'} − 1), computed as (n/n')·m(q,e').
/// Returns the pair (e, m).
pub fn m_functional_equation(q: Word, n: Word, n_prime: Word, e_prime: &Nat) -> Result<(Nat, Word)> {
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    if n_prime == 0 || n % n_prime != 0 {
        return Err(Error::NotDivisible(format!("{n_prime} does not divide {n}")));
    }
    let inner = m_auto(q, Some(n_prime), e_prime)?;
    let ratio = (nat_pow(q, n) - 1u32) / (nat_pow(q, n_prime) - 1u32);
    Ok((e_prime * ratio, (n / n_prime) * inner.m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(x: u64) -> Nat {
        Nat::from(x)
    }

    #[test]
    fn bfs_examples() {
        assert_eq!(m_bfs(2, 7).unwrap().m, 3);
        assert_eq!(m_bfs(5, 33).unwrap().m, 3);
        for q in 2..10 {
            assert_eq!(m_bfs(q, 1).unwrap().m, 1);
        }
        assert!(matches!(m_bfs(4, 6), Err(Error::NotAUnit(..))));
        assert!(matches!(m_bfs(0, 5), Err(Error::InvalidBase(0))));
    }

    #[test]
    fn bfs_witness_is_valid() {
        for e in 1..200u64 {
            for q in 2..40u64 {
                if gcd(q, e) == 1 {
                    let r = m_bfs(q, e).unwrap();
                    assert!(r.witness_holds(q, &nat(e)), "q={q} e={e}");
                    assert!(r.m >= 1 && r.m <= e);
                }
            }
        }
    }

    #[test]
    fn digit_scan_examples() {
        assert_eq!(m_digit_scan(3, 12, &nat(7592)).unwrap().m, 8);
        assert_eq!(m_digit_scan(55, 8, &nat(680_763_722_688)).unwrap().m, 126);
        assert_eq!(m_digit_scan(7, 3, &nat(342)).unwrap().m, 18);
        assert!(m_digit_scan(3, 12, &nat(7593)).is_err());
    }

    #[test]
    fn residue_formula_examples() {
        assert_eq!(m_via_z(3, 12, 70).unwrap().m, 8);
        assert_eq!(m_via_z(9, 15, 5551).unwrap().m, 24);
        assert_eq!(m_via_z(6, 4, 1).unwrap().m, 20);
        assert!(m_via_z(3, 12, 71).is_err());
        let r = m_via_z(3, 12, 70).unwrap();
        assert_eq!(r.k, Some(1));
        assert!(r.witness_holds(3, &nat(7592)));
    }

    #[test]
    fn residue_digits_match_expansion() {
        let e = nat(7592);
        for k in 0..=70u64 {
            let mut d = arith::qadic_expand(&(&e * nat(k)), 3).unwrap().coeffs;
            d.resize(12, 0);
            assert_eq!(residue_digits(3, 12, 70, k), d, "k={k}");
        }
    }

    #[test]
    fn three_methods_agree_on_a_grid() {
        for e in 1..=120u64 {
            for q in 2..=30u64 {
                if gcd(q, e) != 1 {
                    continue;
                }
                let n = mult_order(q, e).unwrap();
                let z = arith::z_from_e(q, n, &nat(e));
                let Ok(z) = z else { continue };
                if z > 2_000_000 {
                    continue;
                }
                let b = m_bfs(q, e).unwrap().m;
                assert_eq!(m_via_z(q, n, z).unwrap().m, b, "q={q} e={e}");
                if z <= 20_000 {
                    assert_eq!(m_digit_scan(q, n, &nat(e)).unwrap().m, b, "q={q} e={e}");
                }
                assert_eq!(b % gcd(e, q - 1), 0);
            }
        }
    }

    #[test]
    fn auto_dispatch() {
        assert_eq!(m_auto(5, None, &nat(33)).unwrap().method, Method::Bfs);
        let r = m_auto(3, Some(12), &nat(7592)).unwrap();
        assert_eq!((r.m, r.method), (8, Method::ResidueFormula));
        let big: Nat = "380808546861411923".parse().unwrap();
        let r = m_auto(3, Some(43), &big).unwrap();
        assert_eq!(r.method, Method::ResidueFormula);
        assert!(r.witness_holds(3, &big));
        let huge = nat_pow(3, 60) - 1u32;
        assert!(m_auto(3, None, &huge).unwrap_err().is_capacity());
        let r = m_auto(41, Some(12), &nat(5)).unwrap();
        assert_eq!((r.m, r.method), (m_bfs(41, 5).unwrap().m, Method::Bfs));
    }

    #[test]
    fn functional_equation() {
        // e = (q^n − 1)/(q^n' − 1) gives m = n/n'.
        let (e, m) = m_functional_equation(3, 6, 2, &nat(1)).unwrap();
        assert_eq!(e, nat(91));
        assert_eq!(m, 3);
        assert_eq!(m_bfs(3, 91).unwrap().m, 3);
        // e = e'·(q^n − 1)/(q − 1) gives m = n·e'.
        let (e, m) = m_functional_equation(5, 3, 1, &nat(2)).unwrap();
        assert_eq!(e, nat(62));
        assert_eq!(m, 6);
        assert_eq!(m_bfs(5, 62).unwrap().m, 6);
        let (e, m) = m_functional_equation(4, 3, 3, &nat(9)).unwrap();
        assert_eq!((e, m), (nat(9), m_bfs(4, 9).unwrap().m));
        assert!(m_functional_equation(4, 3, 2, &nat(3)).is_err());
    }

    #[test]
    fn subgroup_invariance() {
        for e in 2..=500u64 {
            let mut by_subgroup = std::collections::BTreeMap::new();
            for q in 2..e + 2 {
                if gcd(q, e) != 1 {
                    continue;
                }
                let mut h = vec![1 % e];
                let mut p = q % e;
                while p != 1 % e {
                    h.push(p);
                    p = arith::mul_mod(p, q, e);
                }
                h.sort_unstable();
                if by_subgroup.contains_key(&h) {
                    continue;
                }
                let m = m_bfs(q, e).unwrap().m;
                let ord = h.len() as Word;
                for t in (2..ord).filter(|&t| gcd(t, ord) == 1).take(3) {
                    let mut g = pow_mod(q, t, e);
                    if g < 2 {
                        g += e;
                    }
                    assert_eq!(m_bfs(g, e).unwrap().m, m, "e={e} q={q} g={g}");
                }
                by_subgroup.insert(h, m);
            }
        }
    }
}
