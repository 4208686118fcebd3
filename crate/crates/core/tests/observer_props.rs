mod common;

use common::*;
use maxplus_observer::observer::{check_constraints, check_prop4, observer_transfer, synth_lx};
use maxplus_observer::scalar::Finite;
use maxplus_observer::simulate::{compare_estimation, earliest_state, observer_run, system_output};
use maxplus_observer::{DaterSlice, SeriesMatrix, SystemMatrices, Trajectory};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const K: usize = 40;

fn inputs(rng: &mut ChaCha8Rng, sys: &SystemMatrices) -> (Trajectory, Trajectory) {
    let u = (0..sys.b.cols())
        .map(|_| DaterSlice::new(random_dates(rng, K, 6)))
        .collect();
    let w = (0..sys.r.cols())
        .map(|_| DaterSlice::new(random_disturbance(rng, K)))
        .collect();
    let names = |p: &str, n: usize| (1..=n).map(|i| format!("{p}{i}")).collect();
    (
        Trajectory::new(names("u", sys.b.cols()), u),
        Trajectory::new(names("w", sys.r.cols()), w),
    )
}

#[test]
fn random_systems_satisfy_the_observer_guarantees() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..25 {
        let sys = random_system(&mut rng, false);
        let res = synth_lx(&sys).unwrap();
        let c = res.checks;
        assert!(c.constraint_25 && c.constraint_26, "A = {}", sys.a);
        assert!(c.output_eq_29 && c.output_eq_30, "A = {}", sys.a);
        assert!(sys.c.transpose().leq(&res.lx));
        assert_eq!(
            check_constraints(&sys, &SeriesMatrix::eps(sys.n(), sys.c.rows())).unwrap(),
            (true, true)
        );

        let (u, w) = inputs(&mut rng, &sys);
        let x = earliest_state(&sys, &u, &w, K).unwrap();
        let y = system_output(&sys, &x).unwrap();
        let xhat = observer_run(&sys, &res.lx, &u, &y, K).unwrap();
        let yhat = system_output(&sys, &xhat).unwrap();
        let report = compare_estimation(&x, &xhat, &y, &yhat);
        assert!(report.passed(), "A = {}\n{}", sys.a, report.to_text());

        // the symbolic observer transfer reproduces the run for series inputs
        let ot = observer_transfer(&sys, &res.lx).unwrap();
        let t = sys.transfer().unwrap();
        let u_series: Vec<_> = u
            .slices
            .iter()
            .map(|s| {
                maxplus_observer::PeriodicSeries::from_dater(
                    &DaterSlice::from_events(&s.dates),
                    Some((0, 1)),
                )
                .unwrap()
                .series
            })
            .collect();
        let w_series: Vec<_> = w
            .slices
            .iter()
            .map(|s| {
                maxplus_observer::PeriodicSeries::from_dater(
                    &DaterSlice::from_events(&s.dates),
                    Some((0, 1)),
                )
                .unwrap()
                .series
            })
            .collect();
        let col = |v: Vec<maxplus_observer::PeriodicSeries>| {
            SeriesMatrix::from_rows(v.into_iter().map(|s| vec![s]).collect()).unwrap()
        };
        let (uc, wc) = (col(u_series), col(w_series));
        let sym_x = t
            .a_b
            .mul(&uc)
            .unwrap()
            .add(&t.a_r.mul(&wc).unwrap())
            .unwrap();
        let sym_xhat = ot
            .from_u
            .mul(&uc)
            .unwrap()
            .add(&ot.from_w.mul(&wc).unwrap())
            .unwrap();
        for i in 0..sys.n() {
            assert_eq!(sym_x.get(i, 0).to_dater(K), x.slices[i]);
            assert_eq!(sym_xhat.get(i, 0).to_dater(K), xhat.slices[i]);
        }
    }
}

#[test]
fn gain_is_maximal() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let sys = random_system(&mut rng, false);
        let lx = synth_lx(&sys).unwrap().lx;
        for i in 0..lx.rows() {
            for j in 0..lx.cols() {
                let e = lx.get(i, j);
                if e.is_eps() || e.is_top() {
                    continue;
                }
                let mut bumped = lx.clone();
                bumped.set(i, j, e.scale(Finite(1)));
                let (c25, c26) = check_constraints(&sys, &bumped).unwrap();
                assert!(!(c25 && c26), "A = {}, entry ({i},{j})", sys.a);
            }
        }
    }
}

#[test]
fn identity_output_gives_exact_estimate() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let sys = random_system(&mut rng, true);
        assert!(check_prop4(&sys).unwrap());
        let lx = synth_lx(&sys).unwrap().lx;
        assert!(SeriesMatrix::identity(sys.n()).leq(&lx));
        let (u, w) = inputs(&mut rng, &sys);
        let x = earliest_state(&sys, &u, &w, K).unwrap();
        let y = system_output(&sys, &x).unwrap();
        assert_eq!(observer_run(&sys, &lx, &u, &y, K).unwrap(), x);
    }
}

#[test]
fn disturbances_only_delay() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let sys = random_system(&mut rng, false);
        let (u, w) = inputs(&mut rng, &sys);
        let x = earliest_state(&sys, &u, &w, K).unwrap();
        let mut later = w.clone();
        for s in &mut later.slices {
            for v in &mut s.dates {
                *v = v.mul(Finite(3));
            }
        }
        let y = earliest_state(&sys, &u, &later, K).unwrap();
        for (a, b) in x.slices.iter().zip(&y.slices) {
            assert!(a.dates.iter().zip(&b.dates).all(|(p, q)| p <= q));
        }
    }
}
