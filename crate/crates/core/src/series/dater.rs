//! Truncated daters `k ↦ s(k)` on `0..=K` and the conversions to and from
//! periodic series.

use super::{PeriodicSeries, TailSpec};
use crate::error::SeriesError;
use crate::scalar::{Finite, NegInf, Scalar};

/// Dates `s(0), …, s(K)` of a series truncated at horizon `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DaterSlice {
    pub dates: Vec<Scalar>,
}

/// Result of [`PeriodicSeries::from_dater`]. `truncated` is set when no
/// periodic tail could be established and the series is the polynomial
/// encoding of the visible prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaterFit {
    pub series: PeriodicSeries,
    pub truncated: bool,
}

impl DaterSlice {
    pub fn new(dates: Vec<Scalar>) -> Self {
        DaterSlice { dates }
    }

    /// Horizon `K`; `None` for an empty slice.
    pub fn horizon(&self) -> Option<usize> {
        self.dates.len().checked_sub(1)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.first_decrease().is_none()
    }

    fn first_decrease(&self) -> Option<usize> {
        self.dates
            .windows(2)
            .position(|w| w[1] < w[0])
            .map(|i| i + 1)
    }
}

impl PeriodicSeries {
    /// Dates `s(0..=horizon)`.
    pub fn to_dater(&self, horizon: usize) -> DaterSlice {
        DaterSlice {
            dates: (0..=horizon as i64).map(|k| self.eval(k)).collect(),
        }
    }

    /// Smallest canonical series agreeing with `d` on `0..=K`.
    ///
    /// With a hint `(τ, ν)` the dater is extended beyond `K` by
    /// `s(k + ν) = s(k) + τ`. Without one, a tail is accepted when the last
    /// three periods of some `ν ≤ (K+1)/3` repeat with a constant increment;
    /// otherwise the polynomial encoding of the prefix is returned with
    /// `truncated = true`.
    pub fn from_dater(d: &DaterSlice, hint: Option<(i64, i64)>) -> Result<DaterFit, SeriesError> {
        if let Some(i) = d.first_decrease() {
            return Err(SeriesError::NotMonotone(i));
        }
        let dates = &d.dates;
        let len = dates.len() as i64;
        let Some(start) = dates.iter().position(|v| !v.is_eps()) else {
            return Ok(DaterFit {
                series: PeriodicSeries::eps(),
                truncated: false,
            });
        };
        if let Some(top) = dates.iter().position(|v| v.is_top()) {
            let f = |k: i64| dates[k as usize];
            let series = PeriodicSeries::from_fn(start as i64, TailSpec::TopFrom(top as i64), f);
            return Ok(DaterFit {
                series,
                truncated: false,
            });
        }
        let period = match hint {
            Some((tau, nu)) => {
                if nu < 1 || tau < 0 || nu > len {
                    return Err(SeriesError::InvalidPeriod(format!("{tau}g{nu}")));
                }
                Some((tau, nu))
            }
            None => detect_period(dates),
        };
        let Some((tau, nu)) = period else {
            let f = |k: i64| {
                if k < len {
                    dates[k as usize]
                } else {
                    dates[len as usize - 1]
                }
            };
            let series = PeriodicSeries::from_fn(
                start as i64,
                TailSpec::Periodic {
                    from: len - 1,
                    tau: 0,
                    nu: 1,
                },
                f,
            );
            return Ok(DaterFit {
                series,
                truncated: true,
            });
        };
        let from = len - nu;
        let extend = |k: i64| -> Scalar {
            if k < 0 {
                NegInf
            } else if k < len {
                dates[k as usize]
            } else {
                let j = (k - from) / nu;
                dates[(k - j * nu) as usize].mul(Finite(j * tau))
            }
        };
        if extend(len) < dates[len as usize - 1] || extend(from).is_eps() {
            return Err(SeriesError::Inconsistent(format!(
                "period hint {tau}g{nu} does not continue the dater monotonically"
            )));
        }
        let series =
            PeriodicSeries::from_fn(start as i64, TailSpec::Periodic { from, tau, nu }, extend);
        Ok(DaterFit {
            series,
            truncated: false,
        })
    }
}

fn detect_period(dates: &[Scalar]) -> Option<(i64, i64)> {
    let len = dates.len();
    (1..=len / 3).find_map(|nu| {
        let tau = dates[len - 1].finite()? - dates[len - 1 - nu].finite()?;
        let ok = (len - 3 * nu..len - nu).all(|k| match (dates[k], dates[k + nu]) {
            (Finite(a), Finite(b)) => b - a == tau,
            _ => false,
        });
        (ok && tau >= 0).then_some((tau, nu as i64))
    })
}

impl From<Vec<Scalar>> for DaterSlice {
    fn from(dates: Vec<Scalar>) -> Self {
        DaterSlice { dates }
    }
}

impl DaterSlice {
    /// Running max of arbitrary event dates: the dater of `⊕_k v(k)γ^k`.
    pub fn from_events(values: &[Scalar]) -> Self {
        let mut acc = NegInf;
        let dates = values
            .iter()
            .map(|v| {
                acc = acc.max(*v);
                acc
            })
            .collect();
        DaterSlice { dates }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: &[i64]) -> DaterSlice {
        DaterSlice::new(v.iter().map(|x| Finite(*x)).collect())
    }

    #[test]
    fn to_dater_examples() {
        assert!(PeriodicSeries::eps()
            .to_dater(5)
            .dates
            .iter()
            .all(|v| v.is_eps()));
        let a: PeriodicSeries = "(0g0).(4g1)*".parse().unwrap();
        assert_eq!(a.to_dater(3), fin(&[0, 4, 8, 12]));
        let refseries: PeriodicSeries = "(0g0+1g1+3g4)+(5g5+6g7).(3g4)*".parse().unwrap();
        assert_eq!(refseries.to_dater(8), fin(&[0, 1, 1, 1, 3, 5, 5, 6, 6]));
        assert_eq!(refseries.eval(9), Finite(8));
    }

    #[test]
    fn from_dater_examples() {
        let fit = PeriodicSeries::from_dater(&fin(&[0, 4, 8, 12]), Some((4, 1))).unwrap();
        assert_eq!(fit.series, "(0g0).(4g1)*".parse().unwrap());
        assert!(!fit.truncated);
        let eps = DaterSlice::new(vec![NegInf; 4]);
        assert!(PeriodicSeries::from_dater(&eps, None)
            .unwrap()
            .series
            .is_eps());
        let flat = PeriodicSeries::from_dater(&fin(&[0, 0, 0]), Some((0, 1))).unwrap();
        assert_eq!(flat.series, PeriodicSeries::e());
    }

    #[test]
    fn from_dater_detects_or_truncates() {
        let fit =
            PeriodicSeries::from_dater(&fin(&[0, 2, 4, 6, 9, 13, 17, 21, 25, 29]), None).unwrap();
        assert!(!fit.truncated);
        assert_eq!(fit.series.to_string(), "(0g0+2g1+4g2+6g3)+(9g4).(4g1)*");
        let fit = PeriodicSeries::from_dater(&fin(&[0, 1, 5]), None).unwrap();
        assert!(fit.truncated);
        assert_eq!(fit.series.to_dater(2), fin(&[0, 1, 5]));
    }

    #[test]
    fn from_dater_rejects_bad_input() {
        assert!(matches!(
            PeriodicSeries::from_dater(&fin(&[3, 1]), None),
            Err(SeriesError::NotMonotone(1))
        ));
        assert!(PeriodicSeries::from_dater(&fin(&[0, 10]), Some((1, 2))).is_err());
    }

    #[test]
    fn from_events_is_running_max() {
        let d = DaterSlice::from_events(&[Finite(10), NegInf, Finite(3), Finite(12)]);
        assert_eq!(d, fin(&[10, 10, 10, 12]));
    }
}
