//! Sufficient conditions that determine LL(A(q,n,e)) or certify that the
//! upper bound ⌊n(q−1)/m⌋ + 1 is attained.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, euler_phi, gcd, is_prime, mult_order, prime_power, Nat, Word};
use crate::error::{Error, Result};
use crate::mfunc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
    R16,
    R17,
    R18,
    R19,
    R20,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    BoundAttained,
    LlEquals(Word),
    Uniserial,
    /// LL = ⌊n(q−1)/m⌋ + ε.
    GapFormula(Word),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::BoundAttained => f.write_str("bound_attained"),
            Verdict::LlEquals(v) => write!(f, "ll_equals({v})"),
            Verdict::Uniserial => f.write_str("uniserial"),
            Verdict::GapFormula(eps) => write!(f, "gap_formula({eps})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub rule_id: RuleId,
    pub verdict: Verdict,
    pub hypothesis_trace: String,
}

impl fmt::Display for CriterionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} :: {}", self.rule_id, self.verdict, self.hypothesis_trace)
    }
}

/// The data every rule reads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bindings {
    pub q: Word,
    pub n: Word,
    #[serde(with = "crate::serde_nat")]
    pub e: Nat,
    pub z: Option<Word>,
    pub m: Word,
    /// ord_e(q).
    pub nu: Word,
    pub e1: Word,
    pub e2: Word,
    pub bound: Word,
}

impl Bindings {
    pub fn new(q: Word, n: Word, e: &Nat) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidBase(q));
        }
        if n == 0 || e.is_zero() {
            return Err(Error::arg("n and e must be positive"));
        }
        let nu = arith::order_dividing(q, e, n)?;
        let z = match arith::z_from_e(q, n, e) {
            Ok(z) => Some(z),
            Err(err) if err.is_capacity() => None,
            Err(err) => return Err(err),
        };
        let m = mfunc::m_auto(q, Some(n), e)?.m;
        let bound = (n as u128 * (q - 1) as u128 / m as u128 + 1)
            .try_into()
            .map_err(|_| Error::Overflow("upper bound exceeds a word".into()))?;
        Ok(Self {
            q,
            n,
            e: e.clone(),
            z,
            m,
            nu,
            e1: gcd_nat(e, q - 1),
            e2: gcd_nat(e, q + 1),
            bound,
        })
    }

    /// LL implied by a verdict.
    pub fn predicted_ll(&self, v: Verdict) -> Option<Word> {
        match v {
            Verdict::BoundAttained => Some(self.bound),
            Verdict::LlEquals(x) => Some(x),
            Verdict::Uniserial => self.z.map(|z| z + 1),
            Verdict::GapFormula(eps) => Some(self.bound - 1 + eps),
        }
    }

    fn e_divides(&self, x: &Nat) -> bool {
        (x % &self.e).is_zero()
    }

    fn pow_mod_e(&self, k: Word) -> Nat {
        Nat::from(self.q).modpow(&Nat::from(k), &self.e)
    }
}

fn gcd_nat(e: &Nat, x: Word) -> Word {
    if x == 0 {
        return arith::to_word(e).unwrap_or(Word::MAX);
    }
    gcd(x, arith::nat_mod(e, x))
}

/// Every rule whose hypothesis holds for A(q,n,e).
///
/// # Panics
///
/// Panics if two verdicts predict different Loewy lengths.
pub fn evaluate_criteria(q: Word, n: Word, e: &Nat) -> Result<Vec<CriterionVerdict>> {
    let b = Bindings::new(q, n, e)?;
    Ok(evaluate_bindings(&b))
}

pub fn evaluate_criteria_z(q: Word, n: Word, z: Word) -> Result<Vec<CriterionVerdict>> {
    let e = arith::e_from_z(q, n, z)?;
    evaluate_criteria(q, n, &e)
}

pub fn evaluate_bindings(b: &Bindings) -> Vec<CriterionVerdict> {
    let mut out = Vec::new();
    let mut push = |rule_id, verdict, trace: String| {
        out.push(CriterionVerdict { rule_id, verdict, hypothesis_trace: trace });
    };
    let Bindings { q, n, m, nu, e1, e2, .. } = *b;
    let e_word = arith::to_word(&b.e);
    let et = &b.e;

    if n <= 3 {
        push(RuleId::R1, Verdict::BoundAttained, format!("n={n}"));
    }
    if e_word.is_some_and(|e| e <= 32) {
        push(RuleId::R2, Verdict::BoundAttained, format!("e={et}"));
    }
    if let Some(d) = (1..=5u64).find(|&d| b.e_divides(&((arith::nat_pow(q, d) - 1u32) / (q - 1)))) {
        push(RuleId::R3, Verdict::BoundAttained, format!("e={et} divides (q^{d}-1)/(q-1), q={q}"));
    }
    if let Some(d) = cyclotomic_hit(b) {
        push(RuleId::R4, Verdict::BoundAttained, format!("e={et} divides Phi_{d}(q), q={q}"));
    }
    if let Some(trace) = prime_power_case(b, e_word) {
        push(RuleId::R5, Verdict::BoundAttained, trace);
    }
    if n % 2 == 0 {
        let full = arith::nat_pow(q, n) - 1u32;
        let half = arith::nat_pow(q, n / 2) - 1u32;
        if *et != full && (et % &half).is_zero() {
            push(RuleId::R6, Verdict::LlEquals(3), format!("q^{}-1 divides e={et}, e proper", n / 2));
        }
    }
    if (q - 1) % m == 0 {
        push(RuleId::R7, Verdict::BoundAttained, format!("m={m} divides q-1={}", q - 1));
    }
    if m == 2 {
        push(RuleId::R8, Verdict::BoundAttained, "m=2".into());
    }
    if Nat::from(3 * m as u128) >= *et {
        push(RuleId::R9, Verdict::BoundAttained, format!("3m={} >= e={et}", 3 * m as u128));
    }
    if let Some(trace) = special_small_m(b) {
        push(RuleId::R10, Verdict::BoundAttained, trace);
    }
    if let Some(r) = arith::divisors(n).ok().and_then(|ds| power_sum_divisor(b, &ds)) {
        push(
            RuleId::R11,
            Verdict::BoundAttained,
            format!("m={m} divides n/r with r={r} and e divides the power sum with step {}", n / (m * r)),
        );
    }
    if let Some(trace) = polynomial_case(b) {
        push(RuleId::R12, Verdict::BoundAttained, trace);
    }
    let m1 = gcd(m, q - 1);
    let step = m / m1 * nu;
    if n % step == 0 {
        let ll = (n as u128 * (q - 1) as u128 / m as u128 + 1) as Word;
        push(
            RuleId::R13,
            Verdict::LlEquals(ll),
            format!("n={n} multiple of (m/m1)*ord = ({m}/{m1})*{nu}"),
        );
    }
    if (q - 1) % m != 0 {
        let r = (q - 1) % m;
        if (r as u128) * (nu as u128) * (n as u128) < (m as u128) * (n as u128 + nu as u128) {
            push(RuleId::R14, Verdict::BoundAttained, format!("q-1={}*{m}+{r}, r < m/{nu} + m/{n}", (q - 1) / m));
        }
    }
    if let Some(qp) = decomposition_into_one(b) {
        push(RuleId::R15, Verdict::BoundAttained, format!("q'={qp} = q mod m={m}, floor(n(q'-1)/m)=1"));
    }
    if q == 5 && e_word == Some(33) {
        let eps = if n % 30 == 10 { 0 } else { 1 };
        push(RuleId::R16, Verdict::GapFormula(eps), format!("(q,e)=(5,33), n={n}, n mod 30={}", n % 30));
    }
    if n == 2 {
        let q2 = q as u128 * q as u128 - 1;
        let e_even = et.is_even();
        let other_even = e_word.is_some_and(|e| (q2 / e as u128) % 2 == 0);
        let ll = if e1 >= e2 || (e_even && other_even) { 2 * (q - 1) / e1 + 1 } else { (q - 1) / e1 + 1 };
        push(RuleId::R17, Verdict::LlEquals(ll), format!("n=2, e1={e1}, e2={e2}"));
    }
    if let Some(z) = b.z.filter(|&z| z > 1) {
        let ord_z = arith::order_dividing(q, &Nat::from(z), n).expect("z divides q^n - 1");
        if let Some((p, _)) = prime_power(z).filter(|&(p, _)| p % 2 == 1) {
            if euler_phi(z).is_ok_and(|phi| phi == ord_z) {
                push(RuleId::R18, Verdict::LlEquals(3), format!("z={z} a power of {p}, ord_z(q)={ord_z}=phi(z)"));
            }
        }
        if z % 2 == 1 && is_prime(z) && ord_z == (z - 1) / 2 {
            let ll = if z == 3 || z == 7 { 4 } else { 3 };
            push(RuleId::R19, Verdict::LlEquals(ll), format!("z={z} prime, ord_z(q)={ord_z}=(z-1)/2"));
        }
    }
    if let Some(z) = b.z {
        if q % z == 1 % z {
            push(RuleId::R20, Verdict::Uniserial, format!("q={q} = 1 mod z={z}"));
        } else if z > 2 && q % z == z - 1 {
            push(RuleId::R20, Verdict::LlEquals(3), format!("q={q} = -1 mod z={z}"));
        }
    }
    check_consistency(b, &out);
    out
}

fn check_consistency(b: &Bindings, verdicts: &[CriterionVerdict]) {
    let mut first: Option<(&CriterionVerdict, Word)> = None;
    for v in verdicts {
        let Some(ll) = b.predicted_ll(v.verdict) else { continue };
        match first {
            None => first = Some((v, ll)),
            Some((w, other)) => assert_eq!(
                ll, other,
                "contradictory verdicts for q={}, n={}, e={}, m={}, e1={}, e2={}, nu={}: [{w}] vs [{v}]",
                b.q, b.n, b.e, b.m, b.e1, b.e2, b.nu
            ),
        }
    }
}

fn cyclotomic_hit(b: &Bindings) -> Option<Word> {
    let mut ds: Vec<Word> = vec![3, 5, 6, 9, 10];
    let mut d = 1;
    while d <= 2 * b.nu {
        ds.push(d);
        d *= 2;
    }
    ds.sort_unstable();
    ds.into_iter()
        .filter(|&d| d <= 4096)
        .find(|&d| arith::cyclotomic_value(d, b.q).is_ok_and(|v| b.e_divides(&v)))
}

fn prime_power_case(b: &Bindings, e_word: Option<Word>) -> Option<String> {
    let q = b.q;
    let e = e_word?;
    if e.is_power_of_two() {
        return Some(format!("e={e} a power of 2"));
    }
    if let Some((p, k)) = prime_power(e) {
        if arith::is_pierpont_prime(p) && p > 2 {
            return Some(format!("e={p}^{k}, {p} an odd Pierpont prime"));
        }
        if p > 2 && q % p == 1 {
            return Some(format!("e={p}^{k}, q={q} = 1 mod {p}"));
        }
    }
    if e % 2 == 0 {
        if let Some((p, k)) = prime_power(e / 2).filter(|&(p, _)| p > 2) {
            if q % (2 * p) == 1 {
                return Some(format!("e=2*{p}^{k}, q={q} = 1 mod {}", 2 * p));
            }
        }
    }
    None
}

fn special_small_m(b: &Bindings) -> Option<String> {
    let one = Nat::one();
    for k in 1..=b.nu {
        let x = b.pow_mod_e(k);
        if ((&x + &one) % &b.e).is_zero() {
            return Some(format!("e={} divides q^{k}+1", b.e));
        }
        if ((&x * &x + &x + &one) % &b.e).is_zero() {
            return Some(format!("e={} divides q^{}+q^{k}+1", b.e, 2 * k));
        }
    }
    None
}

fn power_sum_divisor(b: &Bindings, divisors_of_n: &[Word]) -> Option<Word> {
    let m = b.m;
    divisors_of_n.iter().copied().find(|&r| {
        if (b.n / r) % m != 0 {
            return false;
        }
        let a = b.n / (m * r);
        let qa = b.pow_mod_e(a);
        let mut acc = Nat::zero();
        let mut p = Nat::one() % &b.e;
        for _ in 0..m {
            acc += &p;
            p = p * &qa % &b.e;
        }
        (acc % &b.e).is_zero()
    })
}

fn polynomial_case(b: &Bindings) -> Option<String> {
    let Bindings { q, n, m, .. } = *b;
    let repunit = (arith::nat_pow(q, n) - 1u32) / (q - 1);
    if !b.e_divides(&repunit) {
        return None;
    }
    if m + 1 >= n {
        return Some(format!("e divides (q^n-1)/(q-1), m={m} >= n-1={}", n - 1));
    }
    let gap = n - m;
    let fl = gap as u128 * (q - 1) as u128 / m as u128;
    if fl % gap as u128 == 0 {
        return Some(format!("e divides (q^n-1)/(q-1), n-m={gap} divides floor((n-m)(q-1)/m)={fl}"));
    }
    if m + 2 == n {
        let a = if q % m == 0 { m } else { q % m };
        if a <= m.div_ceil(2) {
            return Some(format!("e divides (q^n-1)/(q-1), m=n-2={m}, q = {a} mod m"));
        }
    }
    None
}

fn decomposition_into_one(b: &Bindings) -> Option<Word> {
    let Bindings { q, n, m, .. } = *b;
    let mut qp = q % m;
    while qp < 2 {
        qp += m;
    }
    while qp <= q {
        let f = n as u128 * (qp - 1) as u128 / m as u128;
        if f == 1 {
            return Some(qp);
        }
        if f > 1 {
            return None;
        }
        qp += m;
    }
    None
}

/// The finite reduction for a fixed pair (q,e).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTargets {
    pub m: Word,
    pub ord: Word,
    /// N = (m/d)·ord with d = gcd(m, (q−1)·ord).
    pub n_max: Word,
    /// lcm(e, m).
    pub q_cap: Word,
    /// Multiples of ord up to N not already covered by N being a multiple
    /// of (m/gcd(m,q−1))·ord.
    pub check_n: Vec<Word>,
}

pub fn reduction_targets(q: Word, e: Word) -> Result<ReductionTargets> {
    if e == 0 || gcd(q % e, e) != 1 {
        return Err(Error::NotAUnit(q, e.to_string()));
    }
    let ord = mult_order(q, e)?;
    let m = mfunc::m_bfs(q, e)?.m;
    let d = gcd(m, (q - 1) * ord);
    let n_max = m / d * ord;
    let q_cap = arith::lcm(e, m)?;
    let full = m / gcd(m, q - 1) * ord;
    let check_n = (1..=n_max / ord).map(|i| i * ord).filter(|n| n % full != 0).collect();
    Ok(ReductionTargets { m, ord, n_max, q_cap, check_n })
}
