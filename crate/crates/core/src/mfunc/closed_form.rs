//! Closed forms for m(q,e) and the classification of the pairs with
//! m(q,e) ≥ e/3.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{m_bfs, MResult, Method};
use crate::arith::{self, euler_phi, gcd, mult_order, prime_power, Word};
use crate::error::{Error, Result};

/// Closed-form rules, in evaluation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// e = 1.
    UnitModulus,
    /// e = 2^k, k ≥ 3, q odd.
    TwoPower,
    /// e = 11^k.
    ElevenPower,
    /// e = p^k for an odd Pierpont prime p.
    PierpontPower,
    /// e = p^k, p odd, q ≡ 1 (mod p).
    PrimePowerUnipotent,
    /// e = p^k, p odd, ⟨q⟩ of index 2.
    IndexTwo,
    /// e = p^k, k ≥ 2, ⟨q⟩ of index d with d | p − 1: m(q,e) = m(q,p).
    HenselLift,
    /// e = 2p^k with ord_e(q) a power of p.
    TwicePrimePower,
    /// e = 2p^k > 14, p a Pierpont prime, ord_e(q) = 3 not a power of p.
    TwicePierpontOrderThree,
    /// m ≥ e/3, one of the four classified cases.
    LargeM,
    /// e | q² − 1.
    OrderTwo,
    /// q ≡ −1 (mod e), e > 2.
    MinusOne,
    /// −1 is a power of q modulo e > 2.
    MinusOnePower,
    /// q ≡ 1 (mod e).
    OneModE,
}

impl Rule {
    pub const ALL: [Rule; 14] = [
        Rule::UnitModulus,
        Rule::TwoPower,
        Rule::ElevenPower,
        Rule::PierpontPower,
        Rule::PrimePowerUnipotent,
        Rule::IndexTwo,
        Rule::HenselLift,
        Rule::TwicePrimePower,
        Rule::TwicePierpontOrderThree,
        Rule::LargeM,
        Rule::OrderTwo,
        Rule::MinusOne,
        Rule::MinusOnePower,
        Rule::OneModE,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::UnitModulus => "unit_modulus",
            Rule::TwoPower => "two_power",
            Rule::ElevenPower => "eleven_power",
            Rule::PierpontPower => "pierpont_power",
            Rule::PrimePowerUnipotent => "prime_power_unipotent",
            Rule::IndexTwo => "index_two",
            Rule::HenselLift => "hensel_lift",
            Rule::TwicePrimePower => "twice_prime_power",
            Rule::TwicePierpontOrderThree => "twice_pierpont_order_three",
            Rule::LargeM => "large_m",
            Rule::OrderTwo => "order_two",
            Rule::MinusOne => "minus_one",
            Rule::MinusOnePower => "minus_one_power",
            Rule::OneModE => "one_mod_e",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LargeMKind {
    I,
    II,
    III,
    IV,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargeMCase {
    pub case: LargeMKind,
    pub certified_m: Option<Word>,
}

/// Residues b = q mod e with the value of m for the sporadic large-m pairs.
const SPORADIC: [(Word, Word, Word); 9] = [
    (2, 3, 2),
    (2, 5, 2),
    (2, 7, 3),
    (3, 5, 2),
    (3, 8, 4),
    (4, 5, 2),
    (4, 7, 3),
    (4, 15, 6),
    (5, 24, 8),
];

/// Decides whether m(q,e) ≥ e/3 and, if so, which case applies.
pub fn classify_large_m(q: Word, e: Word) -> Result<LargeMCase> {
    if e < 2 || gcd(q % e, e) != 1 {
        return Err(Error::NotAUnit(q, e.to_string()));
    }
    if q % e == 1 {
        return Err(Error::arg(format!("{q} ≡ 1 (mod {e}) is excluded")));
    }
    let b = q % e;
    if let Some(&(_, _, m)) = SPORADIC.iter().find(|&&(bb, ee, _)| bb == b && ee == e) {
        return Ok(LargeMCase { case: LargeMKind::IV, certified_m: Some(m) });
    }
    let q1 = q as u128 - 1;
    let e128 = e as u128;
    if q >= 3 && q % 2 == 1 && (2 * q1) % e128 == 0 {
        let k = 2 * q1 / e128;
        if k % 2 == 1 && q1 % k == 0 {
            return Ok(LargeMCase { case: LargeMKind::I, certified_m: Some(e / 2) });
        }
    }
    if q % 3 != 0 && (3 * q1) % e128 == 0 {
        let k = 3 * q1 / e128;
        if q1 % k == 0 {
            if k % 3 == 1 && q >= 4 {
                return Ok(LargeMCase { case: LargeMKind::II, certified_m: Some(e / 3) });
            }
            if k % 3 == 2 && q >= 5 {
                return Ok(LargeMCase { case: LargeMKind::III, certified_m: Some(e / 3) });
            }
        }
    }
    Ok(LargeMCase { case: LargeMKind::None, certified_m: None })
}

fn is_power_of_p(x: Word, p: Word) -> bool {
    arith::is_power_of(x, p)
}

/// Every closed-form rule whose hypothesis holds, with its value, in
/// evaluation order.
pub fn closed_form_rules(q: Word, e: Word) -> Result<Vec<(Rule, Word)>> {
    if q < 2 {
        return Err(Error::InvalidBase(q));
    }
    if e == 0 {
        return Err(Error::arg("e must be positive"));
    }
    if gcd(q % e, e) != 1 {
        return Err(Error::NotAUnit(q, e.to_string()));
    }
    let mut out = Vec::new();
    if e == 1 {
        out.push((Rule::UnitModulus, 1));
        return Ok(out);
    }
    let ord = mult_order(q, e)?;
    let g = gcd(e, q - 1);
    let b = q % e;
    let pp = prime_power(e);

    if let Some((2, k)) = pp {
        if k >= 3 {
            let m = if q % 4 == 1 {
                g
            } else if b == e - 1 {
                2
            } else {
                4
            };
            out.push((Rule::TwoPower, m));
        }
    }
    if let Some((p, k)) = pp.filter(|&(p, _)| p % 2 == 1) {
        let phi = euler_phi(e)?;
        if p == 11 {
            let m = if is_power_of_p(ord, 11) {
                g
            } else if ord % 2 == 0 {
                2
            } else if ord == 5 * 11u64.pow(k - 1) {
                3
            } else {
                5
            };
            out.push((Rule::ElevenPower, m));
        }
        if arith::is_pierpont_prime(p) {
            let m = if is_power_of_p(ord, p) {
                g
            } else if ord % 2 == 0 {
                2
            } else {
                3
            };
            out.push((Rule::PierpontPower, m));
        }
        if q % p == 1 {
            out.push((Rule::PrimePowerUnipotent, g));
        }
        if ord * 2 == phi {
            out.push((Rule::IndexTwo, if p % 4 == 1 { 2 } else { 3 }));
        }
        if k >= 2 && (p - 1) % (phi / ord) == 0 {
            out.push((Rule::HenselLift, m_bfs(q, p)?.m));
        }
    }
    if e % 2 == 0 {
        if let Some((p, _)) = prime_power(e / 2).filter(|&(p, _)| p % 2 == 1) {
            if is_power_of_p(ord, p) {
                out.push((Rule::TwicePrimePower, g));
            }
            if arith::is_pierpont_prime(p) && ord == 3 && e > 14 && !is_power_of_p(ord, p) {
                out.push((Rule::TwicePierpontOrderThree, 6));
            }
        }
    }
    if b != 1 {
        if let Some(m) = classify_large_m(q, e)?.certified_m {
            out.push((Rule::LargeM, m));
        }
    }
    let q128 = q as u128;
    let square_minus_one = q128 * q128 - 1;
    if square_minus_one % e as u128 == 0 {
        let e2 = gcd(e, q + 1);
        let other = square_minus_one / e as u128;
        let m = if g >= e2 || (e % 2 == 0 && other % 2 == 0) { g } else { 2 * g };
        out.push((Rule::OrderTwo, m));
    }
    if e > 2 && b == e - 1 {
        out.push((Rule::MinusOne, 2));
    }
    if e > 2 && ord % 2 == 0 && arith::pow_mod(q, ord / 2, e) == e - 1 {
        out.push((Rule::MinusOnePower, 2));
    }
    if b == 1 {
        out.push((Rule::OneModE, e));
    }
    Ok(out)
}

/// The value of the first closed-form rule that applies.
///
/// # Panics
///
/// Panics if two applicable rules disagree.
pub fn m_closed_form(q: Word, e: Word) -> Result<Option<MResult>> {
    let rules = closed_form_rules(q, e)?;
    let Some(&(first, m)) = rules.first() else { return Ok(None) };
    for &(rule, other) in &rules[1..] {
        assert_eq!(
            other, m,
            "closed forms disagree for q={q}, e={e}: {first} gives {m}, {rule} gives {other}"
        );
    }
    Ok(Some(MResult { m, method: Method::ClosedForm(first), witness: None, k: None }))
}
