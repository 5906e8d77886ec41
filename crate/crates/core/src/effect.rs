//! Standardized mean differences and Cohen's non-overlap measures.

use crate::data::{Dataset, GroupedFeature};
use crate::error::{Error, Result};
use crate::numstats::{phi, stats, SampleStats};

/// Group statistics shared by every measure.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GroupStats {
    pub m: SampleStats,
    pub b: SampleStats,
}

impl GroupStats {
    pub fn of(g: &GroupedFeature) -> Result<Self> {
        Ok(GroupStats {
            m: stats(&g.m)?,
            b: stats(&g.b)?,
        })
    }

    pub fn mean_diff(&self) -> f64 {
        self.m.mean - self.b.mean
    }

    pub fn pooled_sd(&self) -> f64 {
        let (n1, n2) = (self.m.n as f64, self.b.n as f64);
        (((n1 - 1.0) * self.m.variance() + (n2 - 1.0) * self.b.variance()) / (n1 + n2 - 2.0)).sqrt()
    }

    /// Root mean square of the two group standard deviations.
    pub fn average_sd(&self) -> f64 {
        (0.5 * (self.m.variance() + self.b.variance())).sqrt()
    }

    pub fn cohens_d(&self) -> Result<f64> {
        let sd = self.pooled_sd();
        if !(sd > 0.0) {
            return Err(degenerate("zero pooled variance"));
        }
        Ok(self.mean_diff() / sd)
    }

    pub fn cohens_dd(&self) -> Result<f64> {
        let sd = self.average_sd();
        if !(sd > 0.0) {
            return Err(degenerate("both groups have zero variance"));
        }
        Ok(self.mean_diff() / sd)
    }
}

pub(crate) fn degenerate(reason: &'static str) -> Error {
    Error::Degenerate {
        feature: String::new(),
        reason,
    }
}

/// Cohen's d: mean difference over the pooled (equal-variance) standard deviation.
pub fn cohens_d(g: &GroupedFeature) -> Result<f64> {
    GroupStats::of(g)?.cohens_d().map_err(|e| e.for_feature(&g.name))
}

/// Cohen's D: mean difference over the root mean square of the group standard
/// deviations (no equal-variance assumption).
pub fn cohens_dd(g: &GroupedFeature) -> Result<f64> {
    GroupStats::of(g)?.cohens_dd().map_err(|e| e.for_feature(&g.name))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UMeasures {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

/// U3 = Phi(d), U2 = Phi(d / 2), U1 = (2 U2 - 1) / U2, clamped at zero so all
/// three stay in [0, 1] when `d` is negative.
pub fn u_measures(d: f64) -> UMeasures {
    let u3 = phi(d);
    let u2 = phi(0.5 * d);
    let u1 = if u2 > 0.5 { (2.0 * u2 - 1.0) / u2 } else { 0.0 };
    UMeasures { u1, u2, u3 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    D,
    DD,
    U1,
    U2,
    U3,
}

impl Measure {
    pub const ALL: [Measure; 5] = [Measure::D, Measure::DD, Measure::U1, Measure::U2, Measure::U3];
    pub const U: [Measure; 3] = [Measure::U1, Measure::U2, Measure::U3];

    pub fn is_u(self) -> bool {
        matches!(self, Measure::U1 | Measure::U2 | Measure::U3)
    }

    /// Short identifier used on the command line and in reports.
    pub fn key(self) -> &'static str {
        match self {
            Measure::D => "d",
            Measure::DD => "D",
            Measure::U1 => "u1",
            Measure::U2 => "u2",
            Measure::U3 => "u3",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Measure::D => "Cohen's d",
            Measure::DD => "Cohen's D",
            Measure::U1 => "Cohen's U1",
            Measure::U2 => "Cohen's U2",
            Measure::U3 => "Cohen's U3",
        }
    }

    pub fn parse(s: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.key() == s)
    }

    pub fn pick(self, u: UMeasures) -> f64 {
        match self {
            Measure::U1 => u.u1,
            Measure::U2 => u.u2,
            Measure::U3 => u.u3,
            Measure::D | Measure::DD => panic!("{} is not a U measure", self.key()),
        }
    }
}

/// The five measures for one feature.
///
/// Values are strengths: groups are ordered so the higher-mean class comes
/// first, making `d` and `dd` non-negative. `reversed` is set when that class
/// is the negative one.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectSizes {
    pub feature: String,
    pub d: f64,
    pub dd: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub reversed: bool,
}

impl EffectSizes {
    pub fn of(g: &GroupedFeature) -> Result<Self> {
        let (g, reversed) = g.oriented();
        let s = GroupStats::of(&g)?;
        let d = s.cohens_d().map_err(|e| e.for_feature(&g.name))?;
        let dd = s.cohens_dd().map_err(|e| e.for_feature(&g.name))?;
        let u = u_measures(d);
        Ok(EffectSizes {
            feature: g.name.clone(),
            d,
            dd,
            u1: u.u1,
            u2: u.u2,
            u3: u.u3,
            reversed,
        })
    }

    pub fn get(&self, m: Measure) -> f64 {
        match m {
            Measure::D => self.d,
            Measure::DD => self.dd,
            Measure::U1 => self.u1,
            Measure::U2 => self.u2,
            Measure::U3 => self.u3,
        }
    }
}

/// Effect sizes for every feature, in dataset order.
pub fn all_effect_sizes(ds: &Dataset) -> Result<Vec<EffectSizes>> {
    (0..ds.n_features())
        .map(|i| EffectSizes::of(&ds.group(i)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;
    use proptest::prelude::*;

    fn g(m: &[f64], b: &[f64]) -> GroupedFeature {
        GroupedFeature::new("x", m.to_vec(), b.to_vec())
    }

    #[test]
    fn hand_computed_examples() {
        // Each group has variance 2, so pooled and averaged sd are both sqrt(2).
        let x = g(&[2.0, 4.0], &[0.0, 2.0]);
        assert!((cohens_d(&x).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((cohens_dd(&x).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let same = g(&[1.0, 3.0, 8.0], &[1.0, 3.0, 8.0]);
        assert_eq!(cohens_d(&same).unwrap(), 0.0);
        assert_eq!(cohens_dd(&same).unwrap(), 0.0);
    }

    #[test]
    fn u_measure_examples() {
        let u = u_measures(0.0);
        assert_eq!((u.u1, u.u2, u.u3), (0.0, 0.5, 0.5));
        // Phi(1.41421), Phi(0.707105) from 30-digit mpmath, then U1 arithmetic.
        let u = u_measures(1.41421);
        assert!((u.u3 - 0.921349873650177805).abs() < 1e-12, "{u:?}");
        assert!((u.u2 - 0.760249385497641057).abs() < 1e-12, "{u:?}");
        assert!((u.u1 - 0.684642146280165782).abs() < 1e-12, "{u:?}");
        let neg = u_measures(-0.5);
        assert_eq!(neg.u1, 0.0);
        assert!(neg.u2 < 0.5 && neg.u3 < neg.u2);
    }

    #[test]
    fn degenerate_feature_is_named() {
        let ds = Dataset::new(
            vec!["flat".into()],
            vec![vec![1.0; 4]],
            vec![Label::Positive, Label::Positive, Label::Negative, Label::Negative],
        )
        .unwrap();
        match all_effect_sizes(&ds) {
            Err(Error::Degenerate { feature, .. }) => assert_eq!(feature, "flat"),
            other => panic!("expected degenerate error, got {other:?}"),
        }
    }

    #[test]
    fn equal_variance_equal_size_reduction() {
        // Same spread, same size: pooled sd equals the averaged sd.
        let x = g(&[1.0, 2.0, 4.0, 9.0], &[-3.0, -2.0, 0.0, 5.0]);
        let (d, dd) = (cohens_d(&x).unwrap(), cohens_dd(&x).unwrap());
        assert!((d - dd).abs() < 1e-12);
    }

    #[test]
    fn dd_denominator_ignores_group_sizes() {
        let a = g(&[0.0, 2.0], &[5.0, 7.0, 5.0, 7.0, 5.0, 7.0]);
        let s = GroupStats::of(&a).unwrap();
        assert!((s.average_sd() - ((s.m.variance() + s.b.variance()) / 2.0).sqrt()).abs() < 1e-15);
        assert!(s.pooled_sd() != s.average_sd());
    }

    #[test]
    fn strengths_are_oriented() {
        let x = g(&[0.0, 1.0, 2.0], &[5.0, 6.0, 8.0]);
        let e = EffectSizes::of(&x).unwrap();
        assert!(e.reversed);
        assert!((e.d + cohens_d(&x).unwrap()).abs() < 1e-15);
        assert!(e.d > 0.0 && e.u3 > 0.5);
    }

    fn group_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (
            prop::collection::vec(-100.0f64..100.0, 2..30),
            prop::collection::vec(-100.0f64..100.0, 2..30),
        )
            .prop_filter("non-degenerate", |(m, b)| {
                let s = GroupStats::of(&g(m, b)).unwrap();
                s.pooled_sd() > 1e-6
            })
    }

    proptest! {
        #[test]
        fn group_swap_antisymmetry((m, b) in group_strategy()) {
            let x = g(&m, &b);
            let y = x.swapped();
            prop_assert!((cohens_d(&x).unwrap() + cohens_d(&y).unwrap()).abs() < 1e-9);
            prop_assert!((cohens_dd(&x).unwrap() + cohens_dd(&y).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn affine_invariance((m, b) in group_strategy(), a in 0.01f64..100.0, c in -1e3f64..1e3) {
            let x = g(&m, &b);
            let t = |v: &[f64]| v.iter().map(|x| a * x + c).collect::<Vec<_>>();
            let y = g(&t(&m), &t(&b));
            prop_assert!((cohens_d(&x).unwrap() - cohens_d(&y).unwrap()).abs() < 1e-9);
            prop_assert!((cohens_dd(&x).unwrap() - cohens_dd(&y).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn sign_flip((m, b) in group_strategy()) {
            let x = g(&m, &b);
            let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
            let y = g(&neg(&m), &neg(&b));
            prop_assert!((cohens_d(&x).unwrap() + cohens_d(&y).unwrap()).abs() < 1e-9);
            prop_assert!((cohens_dd(&x).unwrap() + cohens_dd(&y).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn u_identities(d in -10.0f64..10.0) {
            let u = u_measures(d);
            prop_assert!((u.u3 - phi(d)).abs() <= 1e-12);
            prop_assert!((u.u2 - phi(d / 2.0)).abs() <= 1e-12);
            for v in [u.u1, u.u2, u.u3] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            if d >= 0.0 {
                prop_assert!(u.u3 >= u.u2 && u.u2 >= 0.5);
                prop_assert!((0.0..1.0).contains(&u.u1));
            }
        }
    }
}
