//! Grading monoids: exact time `(Q≥0, +, 0)`, observation counts `(N, +, 0)`,
//! and their coproduct, the monoid of sampling intervals.
//!
//! A sampling interval is an alternating word `(t0, k0, ..., tn, kn)`: let
//! time `t_i` pass, then take `k_i` observations. Words are kept in the
//! normal form where `t_i != 0` for `i >= 1` and `k_i > 0` for `i < n`, so
//! structural equality is monoid equality.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational, to_f64, Rational};

/// A nonnegative exact duration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeValue(Rational);

impl TimeValue {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::invalid(format!("negative time {}", format_rational(&value))));
        }
        Ok(TimeValue(value))
    }

    pub fn zero() -> Self {
        TimeValue(Rational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        Self::new(crate::numeric::ratio(num, den))
    }

    pub fn from_int(n: u64) -> Self {
        TimeValue(Rational::from_integer(n.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }
}

impl Add for &TimeValue {
    type Output = TimeValue;
    fn add(self, rhs: &TimeValue) -> TimeValue {
        TimeValue(&self.0 + &rhs.0)
    }
}

impl Add for TimeValue {
    type Output = TimeValue;
    fn add(self, rhs: TimeValue) -> TimeValue {
        TimeValue(self.0 + rhs.0)
    }
}

impl fmt::Display for TimeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl FromStr for TimeValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TimeValue::new(parse_rational(s)?)
    }
}

impl Serialize for TimeValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// One `(time, count)` pair of a sampling word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub time: TimeValue,
    pub count: u64,
}

impl Segment {
    pub fn new(time: TimeValue, count: u64) -> Self {
        Segment { time, count }
    }
}

/// An element of the sampling-interval monoid, always in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SamplingWord {
    segments: Vec<Segment>,
}

impl SamplingWord {
    pub fn unit() -> Self {
        SamplingWord { segments: vec![Segment::new(TimeValue::zero(), 0)] }
    }

    /// Single segment `(t, k)`; always normalized.
    pub fn segment(time: TimeValue, count: u64) -> Self {
        SamplingWord { segments: vec![Segment::new(time, count)] }
    }

    /// The generator `(t, 0)`.
    pub fn delay(time: TimeValue) -> Self {
        Self::segment(time, 0)
    }

    /// The word `(0, k)`; `observe(1)` is the observation generator.
    pub fn observe(count: u64) -> Self {
        Self::segment(TimeValue::zero(), count)
    }

    /// Normalizes an arbitrary list of pairs into the unique normal form
    /// of the monoid element it denotes.
    pub fn normalize<I>(raw: I) -> Self
    where
        I: IntoIterator<Item = (TimeValue, u64)>,
    {
        raw.into_iter()
            .fold(Self::unit(), |acc, (t, k)| acc.mul(&Self::segment(t, k)))
    }

    /// Like [`SamplingWord::normalize`] but starting from signed raw data.
    pub fn from_raw(raw: &[(Rational, i64)]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(raw.len());
        for (i, (t, k)) in raw.iter().enumerate() {
            if *k < 0 {
                return Err(Error::invalid(format!("negative count {k} in segment {i}")));
            }
            pairs.push((TimeValue::new(t.clone())?, *k as u64));
        }
        Ok(Self::normalize(pairs))
    }

    /// Concatenation followed by simplification of the junction.
    pub fn mul(&self, other: &SamplingWord) -> SamplingWord {
        let mut segments = self.segments.clone();
        let last = segments.last_mut().expect("words are nonempty");
        let mut rest = other.segments.iter();
        let first = rest.next().expect("words are nonempty");
        if last.count == 0 {
            last.time = &last.time + &first.time;
            last.count = first.count;
        } else if first.time.is_zero() {
            last.count += first.count;
        } else {
            segments.push(first.clone());
        }
        segments.extend(rest.cloned());
        SamplingWord { segments }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_unit(&self) -> bool {
        self.segments.len() == 1 && self.segments[0].time.is_zero() && self.segments[0].count == 0
    }

    pub fn is_normalized(&self) -> bool {
        let n = self.segments.len();
        n >= 1
            && self.segments.iter().enumerate().all(|(i, s)| {
                (i == 0 || !s.time.is_zero()) && (i + 1 == n || s.count > 0)
            })
    }

    /// Total elapsed time, the projection onto the time monoid.
    pub fn length(&self) -> TimeValue {
        self.segments.iter().fold(TimeValue::zero(), |acc, s| &acc + &s.time)
    }

    /// Total number of observations, the projection onto `N`.
    pub fn count(&self) -> u64 {
        self.segments.iter().map(|s| s.count).sum()
    }

    /// Number of segments carrying a positive duration.
    pub fn positive_segments(&self) -> usize {
        self.segments.iter().filter(|s| !s.time.is_zero()).count()
    }

    /// Decomposition into the generators `(t, 0)` and `(0, 1)`.
    pub fn generators(&self) -> Vec<SamplingWord> {
        let mut out = Vec::new();
        for s in &self.segments {
            if !s.time.is_zero() {
                out.push(Self::delay(s.time.clone()));
            }
            for _ in 0..s.count {
                out.push(Self::observe(1));
            }
        }
        out
    }
}

impl Default for SamplingWord {
    fn default() -> Self {
        Self::unit()
    }
}

impl PartialOrd for SamplingWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Length-lexicographic: observation count, then segment count, then segments.
impl Ord for SamplingWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.count()
            .cmp(&other.count())
            .then(self.segments.len().cmp(&other.segments.len()))
            .then_with(|| self.segments.cmp(&other.segments))
    }
}

/// `t:k` segments joined by commas.
impl fmt::Display for SamplingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", s.time, s.count)?;
        }
        Ok(())
    }
}

impl FromStr for SamplingWord {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Self::unit());
        }
        let mut raw = Vec::new();
        let mut offset = 0;
        for part in text.split(',') {
            let bad = |message: String| Error::Parse { offset, message };
            let (t, k) = part
                .split_once(':')
                .ok_or_else(|| bad(format!("segment `{}` is not of the form t:k", part.trim())))?;
            let time = parse_rational(t).map_err(|_| bad(format!("bad time `{}`", t.trim())))?;
            let count: i64 = k.trim().parse().map_err(|_| bad(format!("bad count `{}`", k.trim())))?;
            if time.is_negative() || count < 0 {
                return Err(Error::invalid(format!("negative entry in segment `{}`", part.trim())));
            }
            raw.push((time, count));
            offset += part.len() + 1;
        }
        Self::from_raw(&raw)
    }
}

impl Serialize for SamplingWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn samp_normalize(raw: &[(Rational, i64)]) -> Result<SamplingWord> {
    SamplingWord::from_raw(raw)
}

pub fn samp_mul(u: &SamplingWord, v: &SamplingWord) -> SamplingWord {
    u.mul(v)
}

pub fn length_morphism(w: &SamplingWord) -> TimeValue {
    w.length()
}

pub fn count_morphism(w: &SamplingWord) -> u64 {
    w.count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio};

    fn w(s: &str) -> SamplingWord {
        s.parse().unwrap()
    }

    fn t(n: i64, d: i64) -> TimeValue {
        TimeValue::from_ratio(n, d).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let unit = samp_normalize(&[(int(0), 0), (int(0), 0)]).unwrap();
        assert_eq!(unit, SamplingWord::unit());
        assert_eq!(samp_normalize(&[(int(1), 0), (int(2), 3)]).unwrap(), w("3:3"));
        assert_eq!(samp_normalize(&[(int(1), 2), (int(0), 3)]).unwrap(), w("1:5"));
    }

    #[test]
    fn normalize_rejects_negative() {
        assert!(samp_normalize(&[(int(-1), 0)]).is_err());
        assert!(samp_normalize(&[(int(1), -2)]).is_err());
        assert!("1:-1".parse::<SamplingWord>().is_err());
        assert!("-1:1".parse::<SamplingWord>().is_err());
    }

    #[test]
    fn mul_examples() {
        let a = SamplingWord::segment(t(3, 2), 0);
        assert_eq!(samp_mul(&a, &w("2:3")), SamplingWord::segment(t(7, 2), 3));
        assert_eq!(samp_mul(&SamplingWord::unit(), &w("1:2,3:1")), w("1:2,3:1"));
        let prod = samp_mul(&w("1:2"), &w("3:1"));
        assert_eq!(prod.segments().len(), 2);
        assert_eq!(prod, w("1:2,3:1"));
    }

    #[test]
    fn morphisms() {
        assert_eq!(length_morphism(&w("1:2,3:1")), TimeValue::from_int(4));
        assert_eq!(count_morphism(&w("1:2,3:1")), 3);
        assert_eq!(length_morphism(&SamplingWord::unit()), TimeValue::zero());
        assert_eq!(count_morphism(&SamplingWord::unit()), 0);
        assert_eq!(length_morphism(&w("7/2:3")), t(7, 2));
        assert_eq!(count_morphism(&w("1.5:0")), 0);
    }

    #[test]
    fn parse_and_print() {
        let word = w("1.5:2,3:0");
        assert_eq!(word.segments()[0], Segment::new(t(3, 2), 2));
        assert_eq!(word.segments()[1], Segment::new(TimeValue::from_int(3), 0));
        assert_eq!(word.to_string(), "1.5:2,3:0");
        assert_eq!(w(""), SamplingWord::unit());
        assert_eq!(w("0:0"), SamplingWord::unit());
        assert_eq!(w("1/3:1").segments()[0].time.value(), &ratio(1, 3));
        assert!("1.5".parse::<SamplingWord>().is_err());
    }

    #[test]
    fn generator_decomposition() {
        let gens = w("1:2,3:1").generators();
        let rebuilt = gens.iter().fold(SamplingWord::unit(), |acc, g| acc.mul(g));
        assert_eq!(rebuilt, w("1:2,3:1"));
        assert_eq!(gens.len(), 5);
        assert!(SamplingWord::unit().generators().is_empty());
    }

    #[test]
    fn ordering_is_length_lexicographic() {
        let mut words = vec![w("0:2"), w("0:1"), w("1:0"), w("0:0"), w("0:1,1:0")];
        words.sort();
        let printed: Vec<_> = words.iter().map(|x| x.to_string()).collect();
        assert_eq!(printed, ["0:0", "1:0", "0:1", "0:1,1:0", "0:2"]);
    }
}
