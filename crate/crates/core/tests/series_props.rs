mod common;

use common::*;
use maxplus_observer::scalar::NegInf;
use maxplus_observer::{DaterSlice, PeriodicSeries, Slope};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const K: usize = 40;

fn raw() -> impl Strategy<Value = Raw> {
    any::<u64>().prop_map(|seed| raw_series(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn starrable() -> impl Strategy<Value = Raw> {
    any::<u64>().prop_map(|seed| raw_starrable(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn slope(s: &PeriodicSeries) -> Slope {
    s.slope().expect("non-eps series")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn encoding_matches_expansion(a in raw()) {
        let s = a.series();
        prop_assert_eq!(eval_all(&s, K), a.daters(K));
        let again: PeriodicSeries = s.to_string().parse().unwrap();
        prop_assert_eq!(again, s);
    }

    #[test]
    fn dater_round_trip(a in raw()) {
        let s = a.series();
        let d = s.to_dater(K);
        let hint = s.period().map(|r| (r.coeff.finite().unwrap(), r.exp)).unwrap_or((0, 1));
        let fit = PeriodicSeries::from_dater(&d, Some(hint)).unwrap();
        prop_assert_eq!(fit.series.to_dater(K), d);
    }

    #[test]
    fn add_meet_mul_match_oracle(a in raw(), b in raw()) {
        let (sa, sb) = (a.series(), b.series());
        let (da, db) = (a.daters(K), b.daters(K));
        prop_assert_eq!(eval_all(&sa.add(&sb), K), oracle_add(&da, &db));
        prop_assert_eq!(eval_all(&sa.meet(&sb), K), oracle_meet(&da, &db));
        prop_assert_eq!(eval_all(&sa.mul(&sb), K), oracle_mul(&da, &db));
    }

    #[test]
    fn star_matches_oracle(a in starrable()) {
        let s = a.series().star().unwrap();
        prop_assert_eq!(eval_all(&s, K), oracle_star(&a.daters(K)));
    }

    #[test]
    fn residuals_match_oracle(a in raw(), b in raw()) {
        let (sa, sb) = (a.series(), b.series());
        let x = sa.lres(&sb);
        let y = sb.rres(&sa);
        for k in -10..=K as i64 {
            let want = oracle_lres(&a, &b, k);
            prop_assert_eq!(x.eval(k), want, "lres at k = {}", k);
            prop_assert_eq!(y.eval(k), want, "rres at k = {}", k);
        }
    }

    #[test]
    fn star_laws(a in starrable(), b in starrable()) {
        let (a, b) = (a.series(), b.series());
        let sa = a.star().unwrap();
        prop_assert_eq!(sa.star().unwrap(), sa.clone());
        prop_assert_eq!(sa.mul(&sa), sa.clone());
        let lhs = a.add(&b).star().unwrap();
        let rhs = sa.mul(&b.mul(&sa).star().unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(b.mul(&a.mul(&b).star().unwrap()), b.mul(&a).star().unwrap().mul(&b));
        let pa = a.plus().unwrap();
        prop_assert_eq!(sa.clone(), PeriodicSeries::e().add(&pa));
        prop_assert!(pa.leq(&sa));
        prop_assert_eq!(pa.star().unwrap(), sa.clone());
        prop_assert_eq!(sa.plus().unwrap(), sa);
    }

    #[test]
    fn residuation_laws(a in raw(), b in raw(), x in raw(), y in raw()) {
        let (a, b, x, y) = (a.series(), b.series(), x.series(), y.series());
        let aa = a.lres(&a);
        prop_assert_eq!(aa.star().unwrap(), aa);
        let ax = a.mul(&x);
        prop_assert_eq!(a.mul(&a.lres(&ax)), ax.clone());
        prop_assert_eq!(ax.rres(&a).mul(&a), ax);
        prop_assert_eq!(b.lres(&a.lres(&x)), a.mul(&b).lres(&x));
        prop_assert_eq!(a.lres(&x).meet(&a.lres(&y)), a.lres(&x.meet(&y)));
    }

    #[test]
    fn star_residual_law(a in starrable(), x in raw()) {
        let sa = a.series().star().unwrap();
        let sx = sa.mul(&x.series());
        prop_assert_eq!(sa.lres(&sx), sx);
    }

    #[test]
    fn galois_connection(a in raw(), b in raw(), x in raw()) {
        let (a, b, x) = (a.series(), b.series(), x.series());
        prop_assert!(a.mul(&a.lres(&b)).leq(&b));
        prop_assert!(x.leq(&a.lres(&a.mul(&x))));
    }

    #[test]
    fn slope_laws(a in raw(), b in raw()) {
        let (a, b) = (a.series(), b.series());
        let (sa, sb) = (slope(&a), slope(&b));
        prop_assert_eq!(slope(&a.add(&b)), sa.min(sb));
        prop_assert_eq!(slope(&a.mul(&b)), sa.min(sb));
        prop_assert_eq!(slope(&a.meet(&b)), sa.max(sb));
        let q = a.lres(&b);
        if sa < sb {
            prop_assert!(q.is_eps());
        } else {
            prop_assert_eq!(slope(&q), sb);
        }
    }
}

#[test]
fn special_values() {
    let a: PeriodicSeries = "(0g0).(4g1)*".parse().unwrap();
    assert!(PeriodicSeries::eps().slope().is_err());
    assert_eq!(PeriodicSeries::eps().star().unwrap(), PeriodicSeries::e());
    assert!(PeriodicSeries::eps().plus().unwrap().is_eps());
    assert_eq!(PeriodicSeries::eps().add(&a), a);
    assert_eq!(PeriodicSeries::top().meet(&a), a);
    assert_eq!(PeriodicSeries::e().mul(&a), a);
    let fast: PeriodicSeries = "(0g0).(4g1)*".parse().unwrap();
    let slow: PeriodicSeries = "(0g0).(3g1)*".parse().unwrap();
    assert_eq!(fast.add(&slow), fast);
    assert_eq!(fast.meet(&slow), slow);
    assert!(fast.lres(&slow).is_eps());
    assert_eq!(slow.lres(&fast), fast);
    let d = DaterSlice::new(vec![NegInf; 3]);
    assert!(PeriodicSeries::from_dater(&d, None)
        .unwrap()
        .series
        .is_eps());
}
