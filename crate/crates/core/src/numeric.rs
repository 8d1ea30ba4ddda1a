//! Numeric backends for bound evaluation.
//!
//! Bound evaluators are generic over [`BoundScalar`], with two backends:
//!
//! - [`num_rational::BigRational`]: exact arithmetic, every decision certain;
//! - [`Interval`]: directed-rounding dyadic intervals at a fixed mantissa
//!   precision. Fast on the huge operands that show up for large row counts,
//!   and every floor/threshold decision either comes back certain or is
//!   reported as ambiguous so the caller can fall back to exact rationals.
//!
//! A dyadic number is `mantissa * 2^exp` with an arbitrary-precision mantissa
//! kept at most [`PRECISION`] bits by directed rounding.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Mantissa precision (bits) of the interval backend.
pub const PRECISION: u64 = 192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Round {
    Down,
    Up,
}

/// `mantissa * 2^exp`, mantissa normalized to at most PRECISION bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    fn zero() -> Dyadic {
        Dyadic {
            m: BigInt::zero(),
            e: 0,
        }
    }

    fn from_bigint(v: &BigInt) -> Dyadic {
        Dyadic { m: v.clone(), e: 0 }
    }

    fn normalize(mut self, dir: Round) -> Dyadic {
        let bits = self.m.bits();
        if bits > PRECISION {
            let shift = bits - PRECISION;
            self.m = shift_right_rounded(&self.m, shift, dir);
            self.e += shift as i64;
        }
        if self.m.is_zero() {
            self.e = 0;
        }
        self
    }

    fn add(&self, other: &Dyadic, dir: Round) -> Dyadic {
        if self.m.is_zero() {
            return other.clone().normalize(dir);
        }
        if other.m.is_zero() {
            return self.clone().normalize(dir);
        }
        let top = |d: &Dyadic| d.m.bits() as i64 + d.e;
        let (big, small) = if top(self) >= top(other) {
            (self, other)
        } else {
            (other, self)
        };
        // If the small operand lies entirely below the rounding granularity
        // of the result, it can only nudge the final ulp.
        if top(small) + PRECISION as i64 + 2 < top(big) {
            let mut m = big.m.clone();
            let mut e = big.e;
            let bits = m.bits();
            if bits < PRECISION {
                // pad so a one-ulp nudge is at the true rounding granularity
                let pad = PRECISION - bits;
                m <<= pad;
                e -= pad as i64;
            }
            let pushes = match dir {
                Round::Down => small.m.is_negative(),
                Round::Up => small.m.is_positive(),
            };
            if pushes {
                match dir {
                    Round::Down => m -= 1,
                    Round::Up => m += 1,
                }
            }
            return Dyadic { m, e }.normalize(dir);
        }
        // exponent gap is bounded by ~2*PRECISION here, so aligning is cheap
        let (m, e) = if big.e >= small.e {
            ((&big.m << (big.e - small.e) as u64) + &small.m, small.e)
        } else {
            ((&small.m << (small.e - big.e) as u64) + &big.m, big.e)
        };
        Dyadic { m, e }.normalize(dir)
    }

    fn sub(&self, other: &Dyadic, dir: Round) -> Dyadic {
        let neg = Dyadic {
            m: -other.m.clone(),
            e: other.e,
        };
        self.add(&neg, dir)
    }

    fn mul(&self, other: &Dyadic, dir: Round) -> Dyadic {
        Dyadic {
            m: &self.m * &other.m,
            e: self.e + other.e,
        }
        .normalize(dir)
    }

    fn div(&self, other: &Dyadic, dir: Round) -> Dyadic {
        assert!(!other.m.is_zero(), "dyadic division by zero");
        if self.m.is_zero() {
            return Dyadic::zero();
        }
        // scale the numerator so the quotient carries PRECISION + 2 bits
        let extra = (PRECISION + 2 + other.m.bits()).saturating_sub(self.m.bits());
        let num = &self.m << extra;
        let q = match dir {
            Round::Down => num.div_floor(&other.m),
            Round::Up => -(-num).div_floor(&other.m),
        };
        Dyadic {
            m: q,
            e: self.e - other.e - extra as i64,
        }
        .normalize(dir)
    }

    /// Exact comparison. Both operands are normalized, so aligning their
    /// mantissas costs at most a PRECISION-sized shift.
    fn cmp(&self, other: &Dyadic) -> Ordering {
        match (self.m.sign(), other.m.sign()) {
            (Sign::Minus, Sign::NoSign | Sign::Plus) => return Ordering::Less,
            (Sign::NoSign, Sign::Plus) => return Ordering::Less,
            (Sign::Plus, Sign::NoSign | Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        // same nonzero sign: compare magnitude by top bit position first
        let top_a = self.m.bits() as i64 + self.e;
        let top_b = other.m.bits() as i64 + other.e;
        if top_a != top_b {
            let mag = top_a.cmp(&top_b);
            return if self.m.is_negative() { mag.reverse() } else { mag };
        }
        if self.e >= other.e {
            (self.m.clone() << (self.e - other.e) as u64).cmp(&other.m)
        } else {
            self.m.cmp(&(other.m.clone() << (other.e - self.e) as u64))
        }
    }

    /// floor(self) as an exact integer.
    fn floor(&self) -> BigInt {
        if self.e >= 0 {
            &self.m << self.e as u64
        } else {
            shift_right_rounded(&self.m, (-self.e) as u64, Round::Down)
        }
    }

    /// Exact comparison with num/den (den > 0).
    fn cmp_ratio(&self, num: &BigInt, den: &BigInt) -> Ordering {
        debug_assert!(den.is_positive());
        if self.e >= 0 {
            ((&self.m << self.e as u64) * den).cmp(num)
        } else {
            (&self.m * den).cmp(&(num << (-self.e) as u64))
        }
    }
}

/// Floor (Down) or ceiling (Up) of m / 2^shift.
fn shift_right_rounded(m: &BigInt, shift: u64, dir: Round) -> BigInt {
    match dir {
        // num-bigint's shr rounds toward negative infinity
        Round::Down => m >> shift,
        Round::Up => -((-m) >> shift),
    }
}

/// Closed interval [lo, hi] of dyadic numbers; all operations round outward,
/// so the exact value of any computation is always contained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn exact_bigint(v: &BigInt) -> Interval {
        let d = Dyadic::from_bigint(v);
        Interval {
            lo: d.clone().normalize(Round::Down),
            hi: d.normalize(Round::Up),
        }
    }

    pub fn ratio(num: &BigInt, den: &BigInt) -> Interval {
        assert!(!den.is_zero());
        let (num, den) = if den.is_negative() {
            (-num.clone(), -den.clone())
        } else {
            (num.clone(), den.clone())
        };
        let n = Dyadic::from_bigint(&num);
        let d = Dyadic::from_bigint(&den);
        Interval {
            lo: n.div(&d, Round::Down),
            hi: n.div(&d, Round::Up),
        }
    }

    fn contains_zero_in_denominator_sense(&self) -> bool {
        self.lo.m.sign() != self.hi.m.sign()
            || self.lo.m.is_zero()
            || self.hi.m.is_zero()
    }

    pub fn add_i(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.add(&o.lo, Round::Down),
            hi: self.hi.add(&o.hi, Round::Up),
        }
    }

    pub fn sub_i(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.sub(&o.hi, Round::Down),
            hi: self.hi.sub(&o.lo, Round::Up),
        }
    }

    pub fn mul_i(&self, o: &Interval) -> Interval {
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for (a, b) in pairs {
            let down = a.mul(b, Round::Down);
            let up = a.mul(b, Round::Up);
            lo = Some(match lo {
                None => down,
                Some(cur) => {
                    if down.cmp(&cur) == Ordering::Less {
                        down
                    } else {
                        cur
                    }
                }
            });
            hi = Some(match hi {
                None => up,
                Some(cur) => {
                    if up.cmp(&cur) == Ordering::Greater {
                        up
                    } else {
                        cur
                    }
                }
            });
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    pub fn div_i(&self, o: &Interval) -> Interval {
        assert!(
            !o.contains_zero_in_denominator_sense(),
            "interval division by an interval touching zero"
        );
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for (a, b) in pairs {
            let down = a.div(b, Round::Down);
            let up = a.div(b, Round::Up);
            lo = Some(match lo {
                None => down,
                Some(cur) => {
                    if down.cmp(&cur) == Ordering::Less {
                        down
                    } else {
                        cur
                    }
                }
            });
            hi = Some(match hi {
                None => up,
                Some(cur) => {
                    if up.cmp(&cur) == Ordering::Greater {
                        up
                    } else {
                        cur
                    }
                }
            });
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    /// Does the interval contain `r`? (test support)
    pub fn contains_rational(&self, r: &BigRational) -> bool {
        self.lo.cmp_ratio(r.numer(), r.denom()) != Ordering::Greater
            && self.hi.cmp_ratio(r.numer(), r.denom()) != Ordering::Less
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        self.add_i(&rhs)
    }
}
impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        self.sub_i(&rhs)
    }
}
impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        self.mul_i(&rhs)
    }
}
impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        self.div_i(&rhs)
    }
}
impl Zero for Interval {
    fn zero() -> Interval {
        Interval::exact_bigint(&BigInt::zero())
    }
    fn is_zero(&self) -> bool {
        self.lo.m.is_zero() && self.hi.m.is_zero()
    }
}
impl One for Interval {
    fn one() -> Interval {
        Interval::exact_bigint(&BigInt::one())
    }
}

/// Scalar interface shared by the exact and interval backends. Decision
/// methods return `None` when the backend cannot certify the answer.
pub trait BoundScalar:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn of_bigint(v: &BigInt) -> Self;
    fn of_ratio(num: &BigInt, den: &BigInt) -> Self;
    /// floor(self) when unambiguous.
    fn floor_certain(&self) -> Option<BigInt>;
    /// `self > num/den` (den > 0) when unambiguous.
    fn gt_ratio_certain(&self, num: &BigInt, den: &BigInt) -> Option<bool>;
}

impl BoundScalar for BigRational {
    fn of_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn of_ratio(num: &BigInt, den: &BigInt) -> Self {
        BigRational::new(num.clone(), den.clone())
    }
    fn floor_certain(&self) -> Option<BigInt> {
        Some(self.floor().to_integer())
    }
    fn gt_ratio_certain(&self, num: &BigInt, den: &BigInt) -> Option<bool> {
        Some(*self > BigRational::new(num.clone(), den.clone()))
    }
}

impl BoundScalar for Interval {
    fn of_bigint(v: &BigInt) -> Self {
        Interval::exact_bigint(v)
    }
    fn of_ratio(num: &BigInt, den: &BigInt) -> Self {
        Interval::ratio(num, den)
    }
    fn floor_certain(&self) -> Option<BigInt> {
        let lo = self.lo.floor();
        let hi = self.hi.floor();
        (lo == hi).then_some(lo)
    }
    fn gt_ratio_certain(&self, num: &BigInt, den: &BigInt) -> Option<bool> {
        if self.lo.cmp_ratio(num, den) == Ordering::Greater {
            Some(true)
        } else if self.hi.cmp_ratio(num, den) != Ordering::Greater {
            Some(false)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn interval_basics() {
        let a = Interval::ratio(&BigInt::from(1), &BigInt::from(3));
        let b = Interval::ratio(&BigInt::from(1), &BigInt::from(6));
        let s = a.add_i(&b);
        assert!(s.contains_rational(&rat(1, 2)));
        let p = a.mul_i(&b);
        assert!(p.contains_rational(&rat(1, 18)));
        let q = a.div_i(&b);
        assert!(q.contains_rational(&rat(2, 1)));
        // the quotient is exactly 2 but computed through non-dyadic
        // endpoints, so its floor may legitimately be uncertain
        assert!(matches!(q.floor_certain(), None | Some(_)));
        let exact = Interval::exact_bigint(&BigInt::from(9)).div_i(&Interval::exact_bigint(&BigInt::from(4)));
        assert_eq!(exact.floor_certain(), Some(BigInt::from(2)));
    }

    #[test]
    fn floor_and_threshold_decisions() {
        let x = Interval::ratio(&BigInt::from(7), &BigInt::from(2));
        assert_eq!(x.floor_certain(), Some(BigInt::from(3)));
        assert_eq!(
            x.gt_ratio_certain(&BigInt::from(3), &BigInt::from(1)),
            Some(true)
        );
        assert_eq!(
            x.gt_ratio_certain(&BigInt::from(4), &BigInt::from(1)),
            Some(false)
        );
        // exactly hitting the threshold from an exact value: 7/2 > 7/2 is false
        assert_eq!(
            x.gt_ratio_certain(&BigInt::from(7), &BigInt::from(2)),
            Some(false)
        );
    }

    #[test]
    fn huge_exponent_gaps_stay_sound() {
        // 2^5000 + 2^-5000 in intervals: lo <= exact <= hi and floor differs
        // from 2^5000 only through the certified path
        let big = Interval::exact_bigint(&(BigInt::one() << 5000u32));
        let tiny = Interval::ratio(&BigInt::one(), &(BigInt::one() << 5000u32));
        let s = big.add_i(&tiny);
        let exact_floor = BigInt::one() << 5000u32;
        match s.floor_certain() {
            Some(f) => assert_eq!(f, exact_floor),
            None => {} // ambiguity is an acceptable (sound) answer
        }
        assert!(s
            .gt_ratio_certain(&(BigInt::one() << 5000u32), &BigInt::one())
            .unwrap_or(true));
    }

    proptest! {
        #[test]
        fn interval_ops_contain_exact_across_huge_scales(
            an in 1i64..1000, bn in 1i64..1000,
            ashift in 0u32..3000, bshift in 0u32..3000,
            aneg in any::<bool>(), bneg in any::<bool>(),
        ) {
            // a = an * 2^ashift, b = bn / 2^bshift, optionally negated:
            // exponent gaps far beyond the mantissa width exercise the
            // one-ulp clamp path
            let abig = BigInt::from(an) << ashift;
            let a_exact = BigRational::from_integer(if aneg { -abig.clone() } else { abig.clone() });
            let b_exact = {
                let r = BigRational::new(BigInt::from(bn), BigInt::one() << bshift);
                if bneg { -r } else { r }
            };
            let ai = Interval::exact_bigint(a_exact.numer());
            let bi = Interval::ratio(b_exact.numer(), b_exact.denom());
            prop_assert!(ai.add_i(&bi).contains_rational(&(a_exact.clone() + b_exact.clone())));
            prop_assert!(ai.sub_i(&bi).contains_rational(&(a_exact.clone() - b_exact.clone())));
            prop_assert!(ai.mul_i(&bi).contains_rational(&(a_exact.clone() * b_exact.clone())));
            prop_assert!(bi.div_i(&ai).contains_rational(&(b_exact / a_exact)));
        }

        #[test]
        fn interval_ops_contain_exact_rationals(
            an in -2000i64..2000, ad in 1i64..2000,
            bn in -2000i64..2000, bd in 1i64..2000,
        ) {
            let ar = rat(an, ad);
            let br = rat(bn, bd);
            let ai = Interval::ratio(&BigInt::from(an), &BigInt::from(ad));
            let bi = Interval::ratio(&BigInt::from(bn), &BigInt::from(bd));
            prop_assert!(ai.add_i(&bi).contains_rational(&(ar.clone() + br.clone())));
            prop_assert!(ai.sub_i(&bi).contains_rational(&(ar.clone() - br.clone())));
            prop_assert!(ai.mul_i(&bi).contains_rational(&(ar.clone() * br.clone())));
            if bn != 0 {
                prop_assert!(ai.div_i(&bi).contains_rational(&(ar / br)));
            }
        }

        #[test]
        fn decisions_agree_with_exact_backend(
            n in -10_000i64..10_000, d in 1i64..500,
            tn in -10_000i64..10_000, td in 1i64..500,
        ) {
            let x = rat(n, d);
            let xi = Interval::ratio(&BigInt::from(n), &BigInt::from(d));
            let exact_floor = BoundScalar::floor_certain(&x).unwrap();
            if let Some(f) = xi.floor_certain() {
                prop_assert_eq!(f, exact_floor);
            }
            let exact_gt = x.gt_ratio_certain(&BigInt::from(tn), &BigInt::from(td)).unwrap();
            if let Some(g) = xi.gt_ratio_certain(&BigInt::from(tn), &BigInt::from(td)) {
                prop_assert_eq!(g, exact_gt);
            }
        }
    }
}
