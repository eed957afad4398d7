//! Interval distributions: lower/upper probability bounds over a finite outcome set.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact probability value.
pub type Prob = BigRational;

pub fn prob(numer: i64, denom: i64) -> Prob {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn prob_to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// Formats a probability as `p/q` (or `p` when integral).
pub fn fmt_prob(p: &Prob) -> String {
    if p.denom().is_one() {
        p.numer().to_string()
    } else {
        format!("{}/{}", p.numer(), p.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Entry<O> {
    pub outcome: O,
    pub lower: Prob,
    pub upper: Prob,
}

/// Paired lower and upper probability bounds over distinct outcomes.
///
/// Entries keep insertion order. Outcomes whose upper bound is zero are not
/// stored, so every stored outcome is in the support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalDistribution<O> {
    entries: Vec<Entry<O>>,
}

/// Reason an interval distribution is not well formed.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("bounds of outcome {outcome} lie outside [0,1]")]
    BoundOutOfRange { outcome: String },
    #[error("lower bound exceeds upper bound for outcome {outcome}")]
    LowerAboveUpper { outcome: String },
    #[error("sum of lower bounds is {} > 1", fmt_prob(.sum))]
    LowerSumAboveOne { sum: Prob },
    #[error("sum of upper bounds is {} < 1", fmt_prob(.sum))]
    UpperSumBelowOne { sum: Prob },
    #[error("support is empty")]
    EmptySupport,
}

/// Which of the two minimality conditions fails for an outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinimalityCondition {
    /// `upper(s) + sum of other lowers <= 1`: the upper bound is attainable.
    UpperAttainable,
    /// `lower(s) + sum of other uppers >= 1`: the lower bound is attainable.
    LowerAttainable,
}

impl MinimalityCondition {
    pub fn number(self) -> u8 {
        match self {
            MinimalityCondition::UpperAttainable => 1,
            MinimalityCondition::LowerAttainable => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalityViolation {
    pub entry: usize,
    pub condition: MinimalityCondition,
}

impl<O> IntervalDistribution<O> {
    pub fn entries(&self) -> &[Entry<O>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &O> {
        self.entries.iter().map(|e| &e.outcome)
    }

    pub fn sum_lower(&self) -> Prob {
        self.entries
            .iter()
            .fold(Prob::zero(), |acc, e| acc + &e.lower)
    }

    pub fn sum_upper(&self) -> Prob {
        self.entries
            .iter()
            .fold(Prob::zero(), |acc, e| acc + &e.upper)
    }

    /// True when every bound pair is a single point.
    pub fn is_point_interval(&self) -> bool {
        self.entries.iter().all(|e| e.lower == e.upper)
    }

    pub fn map_outcomes<P>(&self, mut f: impl FnMut(&O) -> P) -> IntervalDistribution<P> {
        IntervalDistribution {
            entries: self
                .entries
                .iter()
                .map(|e| Entry {
                    outcome: f(&e.outcome),
                    lower: e.lower.clone(),
                    upper: e.upper.clone(),
                })
                .collect(),
        }
    }
}

impl<O: Clone + PartialEq + fmt::Debug> IntervalDistribution<O> {
    /// Builds a distribution from `(outcome, lower, upper)` triples.
    ///
    /// Repeated outcomes are merged by summing their bounds, with the merged
    /// upper bound capped at 1 (no conforming distribution can exceed it).
    /// Outcomes with upper bound 0 are dropped.
    pub fn from_bounds(bounds: impl IntoIterator<Item = (O, Prob, Prob)>) -> Self {
        let mut entries: Vec<Entry<O>> = Vec::new();
        for (outcome, lower, upper) in bounds {
            if let Some(e) = entries.iter_mut().find(|e| e.outcome == outcome) {
                e.lower += lower;
                e.upper += upper;
                if e.upper > Prob::one() {
                    e.upper = Prob::one();
                }
            } else {
                entries.push(Entry {
                    outcome,
                    lower,
                    upper,
                });
            }
        }
        entries.retain(|e| !e.upper.is_zero());
        IntervalDistribution { entries }
    }

    /// The distribution assigning `[1,1]` to `outcome`.
    pub fn point(outcome: O) -> Self {
        IntervalDistribution {
            entries: vec![Entry {
                outcome,
                lower: Prob::one(),
                upper: Prob::one(),
            }],
        }
    }

    /// Point-interval distribution from exact probabilities.
    pub fn from_probabilities(probs: impl IntoIterator<Item = (O, Prob)>) -> Self {
        Self::from_bounds(probs.into_iter().map(|(o, p)| (o, p.clone(), p)))
    }

    pub fn get(&self, outcome: &O) -> Option<&Entry<O>> {
        self.entries.iter().find(|e| &e.outcome == outcome)
    }

    /// Checks bounds, the sum condition `sum(lower) <= 1 <= sum(upper)` and a non-empty support.
    pub fn validate(&self) -> Result<(), Violation> {
        let zero = Prob::zero();
        let one = Prob::one();
        for e in &self.entries {
            if e.lower.is_negative() || e.upper > one || e.upper < zero {
                return Err(Violation::BoundOutOfRange {
                    outcome: format!("{:?}", e.outcome),
                });
            }
            if e.lower > e.upper {
                return Err(Violation::LowerAboveUpper {
                    outcome: format!("{:?}", e.outcome),
                });
            }
        }
        if self.entries.is_empty() {
            return Err(Violation::EmptySupport);
        }
        let lo = self.sum_lower();
        if lo > one {
            return Err(Violation::LowerSumAboveOne { sum: lo });
        }
        let hi = self.sum_upper();
        if hi < one {
            return Err(Violation::UpperSumBelowOne { sum: hi });
        }
        Ok(())
    }

    /// Every outcome whose upper or lower bound is not attainable by a conforming distribution.
    pub fn minimality_violations(&self) -> Result<Vec<MinimalityViolation>, Violation> {
        self.validate()?;
        let lo = self.sum_lower();
        let hi = self.sum_upper();
        let one = Prob::one();
        let mut out = Vec::new();
        for (i, e) in self.entries.iter().enumerate() {
            if &e.upper + (&lo - &e.lower) > one {
                out.push(MinimalityViolation {
                    entry: i,
                    condition: MinimalityCondition::UpperAttainable,
                });
            }
            if &e.lower + (&hi - &e.upper) < one {
                out.push(MinimalityViolation {
                    entry: i,
                    condition: MinimalityCondition::LowerAttainable,
                });
            }
        }
        Ok(out)
    }

    pub fn is_minimal(&self) -> Result<bool, Violation> {
        Ok(self.minimality_violations()?.is_empty())
    }

    /// Tightens every bound to the value attainable by some conforming distribution.
    ///
    /// Upper bounds become `min(upper(s), 1 - sum of other lowers)` and lower
    /// bounds `max(lower(s), 1 - sum of other uppers)`, repeated until stable.
    /// The conforming set is unchanged and the result is minimal.
    pub fn prune(&self) -> Result<Self, Violation> {
        self.validate()?;
        let one = Prob::one();
        let mut cur = self.clone();
        loop {
            let lo = cur.sum_lower();
            let hi = cur.sum_upper();
            let mut changed = false;
            let next: Vec<Entry<O>> = cur
                .entries
                .iter()
                .map(|e| {
                    let max_reach = &one - (&lo - &e.lower);
                    let min_reach = &one - (&hi - &e.upper);
                    let mut upper = e.upper.clone();
                    let mut lower = e.lower.clone();
                    if max_reach < upper {
                        upper = max_reach;
                        changed = true;
                    }
                    if min_reach > lower {
                        lower = min_reach;
                        changed = true;
                    }
                    Entry {
                        outcome: e.outcome.clone(),
                        lower,
                        upper,
                    }
                })
                .collect();
            cur = IntervalDistribution::from_bounds(
                next.into_iter().map(|e| (e.outcome, e.lower, e.upper)),
            );
            if !changed {
                return Ok(cur);
            }
        }
    }

    /// Pairwise product: bounds multiply, outcomes combine through `combine`.
    pub fn product<P, Q>(
        &self,
        other: &IntervalDistribution<P>,
        mut combine: impl FnMut(&O, &P) -> Q,
    ) -> IntervalDistribution<Q>
    where
        Q: Clone + PartialEq + fmt::Debug,
    {
        let mut bounds = Vec::with_capacity(self.entries.len() * other.entries.len());
        for a in &self.entries {
            for b in &other.entries {
                bounds.push((
                    combine(&a.outcome, &b.outcome),
                    &a.lower * &b.lower,
                    &a.upper * &b.upper,
                ));
            }
        }
        IntervalDistribution::from_bounds(bounds)
    }

    /// True when `mu` lies within the bounds and sums to exactly 1.
    ///
    /// Outcomes absent from `mu` count as probability 0.
    pub fn conforms(&self, mu: &[(O, Prob)]) -> bool {
        let zero = Prob::zero();
        let mut total = Prob::zero();
        for (o, p) in mu {
            let Some(e) = self.get(o) else {
                if !p.is_zero() {
                    return false;
                }
                continue;
            };
            if p < &e.lower || p > &e.upper {
                return false;
            }
            total += p;
        }
        for e in &self.entries {
            if e.lower > zero && !mu.iter().any(|(o, _)| o == &e.outcome) {
                return false;
            }
        }
        total.is_one()
    }
}

/// Greedy extreme point of an interval polytope for a given priority order.
///
/// `order` lists entry indices from most to least preferred. Each entry in
/// turn receives as much mass as its upper bound allows while keeping enough
/// mass for the lower bounds of the entries after it. For a valid interval
/// distribution the result conforms to the bounds and sums to 1.
pub fn greedy_extreme<T>(order: &[usize], lower: &[T], upper: &[T]) -> Vec<T>
where
    T: Clone + PartialOrd + Zero + One + std::ops::Sub<Output = T>,
{
    let n = lower.len();
    let mut mass = vec![T::zero(); n];
    let mut rest_lower = T::zero();
    for &i in order {
        rest_lower = rest_lower + lower[i].clone();
    }
    let mut assigned = T::zero();
    for &i in order {
        rest_lower = rest_lower - lower[i].clone();
        let room = T::one() - assigned.clone() - rest_lower.clone();
        let m = if upper[i] < room {
            upper[i].clone()
        } else {
            room
        };
        assigned = assigned + m.clone();
        mass[i] = m;
    }
    mass
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Outcome name with (numerator, denominator) lower and upper bounds.
    type Bounds = (&'static str, (i64, i64), (i64, i64));

    fn d(bounds: &[Bounds]) -> IntervalDistribution<&'static str> {
        IntervalDistribution::from_bounds(
            bounds
                .iter()
                .map(|&(o, (ln, ld), (un, ud))| (o, prob(ln, ld), prob(un, ud))),
        )
    }

    #[test]
    fn validate_examples() {
        let server = d(&[("s", (95, 100), (1, 1)), ("t", (0, 1), (5, 100))]);
        assert!(server.validate().is_ok());
        assert!(IntervalDistribution::point("s").validate().is_ok());
        let heavy = d(&[("s", (6, 10), (7, 10)), ("t", (6, 10), (7, 10))]);
        assert_eq!(
            heavy.validate(),
            Err(Violation::LowerSumAboveOne { sum: prob(6, 5) })
        );
    }

    #[test]
    fn validate_rejects_each_condition() {
        let inverted = d(&[("s", (6, 10), (5, 10)), ("t", (5, 10), (5, 10))]);
        assert!(matches!(
            inverted.validate(),
            Err(Violation::LowerAboveUpper { .. })
        ));
        let light = d(&[("s", (0, 1), (4, 10)), ("t", (0, 1), (4, 10))]);
        assert!(matches!(
            light.validate(),
            Err(Violation::UpperSumBelowOne { .. })
        ));
        let empty: IntervalDistribution<&str> = IntervalDistribution::from_bounds([]);
        assert_eq!(empty.validate(), Err(Violation::EmptySupport));
        let big = d(&[("s", (0, 1), (3, 2))]);
        assert!(matches!(
            big.validate(),
            Err(Violation::BoundOutOfRange { .. })
        ));
    }

    #[test]
    fn minimality_examples() {
        let loose = d(&[("s", (4, 10), (5, 10)), ("t", (4, 10), (5, 10))]);
        assert!(!loose.is_minimal().unwrap());
        let v = loose.minimality_violations().unwrap();
        assert!(v
            .iter()
            .all(|m| m.condition == MinimalityCondition::LowerAttainable));
        assert_eq!(v.len(), 2);
        // 1 + 0 <= 1 and 0.95 + 0.05 >= 1; 0.05 + 0.95 <= 1 and 0 + 1 >= 1.
        let server = d(&[("s", (95, 100), (1, 1)), ("t", (0, 1), (5, 100))]);
        assert!(server.is_minimal().unwrap());
        assert!(IntervalDistribution::point("s").is_minimal().unwrap());
    }

    #[test]
    fn minimality_requires_valid_input() {
        let heavy = d(&[("s", (6, 10), (7, 10)), ("t", (6, 10), (7, 10))]);
        assert!(heavy.is_minimal().is_err());
        assert!(heavy.prune().is_err());
    }

    #[test]
    fn prune_examples() {
        let loose = d(&[("s", (4, 10), (5, 10)), ("t", (4, 10), (5, 10))]);
        let pruned = loose.prune().unwrap();
        assert_eq!(
            pruned,
            d(&[("s", (1, 2), (1, 2)), ("t", (1, 2), (1, 2))])
        );
        let server = d(&[("s", (95, 100), (1, 1)), ("t", (0, 1), (5, 100))]);
        assert_eq!(server.prune().unwrap(), server);
        let p = IntervalDistribution::point("s");
        assert_eq!(p.prune().unwrap(), p);
    }

    #[test]
    fn prune_upper_rule_and_zero_drop() {
        // u(s) + l(t) = 0.9 + 0.3 > 1, so u(s) becomes 0.7.
        let x = d(&[("s", (0, 1), (9, 10)), ("t", (3, 10), (1, 1))]);
        let p = x.prune().unwrap();
        assert_eq!(p.get(&"s").unwrap().upper, prob(7, 10));
        // t is forced to 1, so s can only get 0 and leaves the support.
        let y = d(&[("s", (0, 1), (1, 2)), ("t", (1, 1), (1, 1))]);
        assert_eq!(y.prune().unwrap(), IntervalDistribution::point("t"));
    }

    #[test]
    fn product_examples() {
        let a = d(&[("a", (95, 100), (1, 1)), ("b", (0, 1), (5, 100))]);
        let c = IntervalDistribution::point("c");
        let p = a.product(&c, |x, y| format!("{x}{y}"));
        assert_eq!(p.len(), 2);
        assert_eq!(p.get(&"ac".to_string()).unwrap().lower, prob(95, 100));
        assert_eq!(p.get(&"bc".to_string()).unwrap().upper, prob(5, 100));

        let l = d(&[("a", (5, 10), (6, 10)), ("b", (4, 10), (5, 10))]);
        let r = d(&[("c", (5, 10), (6, 10)), ("d", (4, 10), (5, 10))]);
        let p = l.product(&r, |x, y| format!("{x}{y}"));
        let get = |k: &str| p.get(&k.to_string()).unwrap().clone();
        assert_eq!((get("ac").lower, get("ac").upper), (prob(1, 4), prob(9, 25)));
        assert_eq!((get("ad").lower, get("ad").upper), (prob(1, 5), prob(3, 10)));
        assert_eq!((get("bc").lower, get("bc").upper), (prob(1, 5), prob(3, 10)));
        assert_eq!((get("bd").lower, get("bd").upper), (prob(4, 25), prob(1, 4)));
        assert_eq!(p.sum_lower(), prob(81, 100));
        assert_eq!(p.sum_upper(), prob(121, 100));
        assert!(p.validate().is_ok());

        let pp = IntervalDistribution::point("a").product(&IntervalDistribution::point("b"), |x, y| (*x, *y));
        assert_eq!(pp, IntervalDistribution::point(("a", "b")));
    }

    #[test]
    fn point_distribution() {
        let p = IntervalDistribution::point("s");
        assert_eq!(p.entries()[0].lower, Prob::one());
        assert_eq!(p.entries()[0].upper, Prob::one());
        assert!(p.validate().is_ok());
        assert!(p.is_minimal().unwrap());
    }

    #[test]
    fn conformance() {
        let server = d(&[("s", (95, 100), (1, 1)), ("t", (0, 1), (5, 100))]);
        assert!(server.conforms(&[("s", prob(97, 100)), ("t", prob(3, 100))]));
        assert!(server.conforms(&[("s", prob(1, 1))]));
        assert!(!server.conforms(&[("s", prob(9, 10)), ("t", prob(1, 10))]));
        assert!(!server.conforms(&[("s", prob(96, 100))]));
    }

    #[test]
    fn greedy_matches_fig4_branches() {
        let lower = [prob(95, 100), prob(0, 1)];
        let upper = [prob(1, 1), prob(5, 100)];
        assert_eq!(greedy_extreme(&[0, 1], &lower, &upper), vec![prob(1, 1), prob(0, 1)]);
        assert_eq!(
            greedy_extreme(&[1, 0], &lower, &upper),
            vec![prob(95, 100), prob(5, 100)]
        );
    }
}
