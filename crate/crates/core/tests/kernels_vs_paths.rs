//! The streaming kernels never store a path. Each must agree bit for bit
//! with the stored-path functions applied to the path drawn from the same
//! stream.

use persistence_core::functionals::{
    default_bandwidth, default_jump_threshold, excursion_passage, first_passage, homogeneous_functional,
    local_time_zero, path_first_passage, xi_process,
};
use persistence_core::kernels::{excursion_kernel, path_summary, two_grid_passage, xi_at_local_time, XiOutcome};
use persistence_core::stable::simulate_path;
use persistence_core::{FunctionalParams, Grid, RngStream, StableParams};
use proptest::prelude::*;

fn cases() -> impl Strategy<Value = (StableParams, f64, u64)> {
    (
        prop::sample::select(vec![
            (2.0, 0.5, 0.0),
            (1.5, 1.0, 1.0),
            (1.5, 1.0, -0.5),
            (1.2, 2.0, 0.3),
        ]),
        prop::sample::select(vec![-1.0, -0.5, 0.0, 1.0, 2.0]),
        0u64..10_000,
    )
        .prop_map(|((a, k, c), beta, id)| (StableParams::new(a, k, c).unwrap(), beta, id))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_grid_passage_matches_stored_path((p, beta, id) in cases(), level in 0.05f64..2.0) {
        let (horizon, n) = (8.0, 512);
        let stream = RngStream::new(42, id);
        let f = FunctionalParams::with_grid_default(&p, beta, horizon / n as f64).unwrap();
        let k = two_grid_passage(&p, Some(&f), level, Grid::new(horizon, n).unwrap(), stream).unwrap();
        let path = simulate_path(&p, horizon, n, stream).unwrap();
        let fine = first_passage(&homogeneous_functional(&path, &f).unwrap(), level).unwrap();
        let coarse_path = path.coarsen(2).unwrap();
        let coarse = first_passage(&homogeneous_functional(&coarse_path, &f).unwrap(), level).unwrap();
        prop_assert_eq!(k.fine, fine.is_crossed().then_some(fine.t_upper));
        prop_assert_eq!(k.coarse, coarse.is_crossed().then_some(coarse.t_upper));
        prop_assert_eq!(k.z_at_passage, fine.index.map(|j| path.values()[j]));

        let z = two_grid_passage(&p, None, level, Grid::new(horizon, n).unwrap(), stream).unwrap();
        let direct = path_first_passage(&path, level).unwrap();
        prop_assert_eq!(z.fine, direct.is_crossed().then_some(direct.t_upper));
    }

    #[test]
    fn path_summary_matches_stored_path((p, beta, id) in cases()) {
        let (horizon, n) = (1.0, 256);
        let stream = RngStream::new(7, id);
        let f = FunctionalParams::with_grid_default(&p, beta, horizon / n as f64).unwrap();
        let s = path_summary(&p, &f, Grid::new(horizon, n).unwrap(), stream).unwrap();
        let path = simulate_path(&p, horizon, n, stream).unwrap();
        let series = homogeneous_functional(&path, &f).unwrap();
        prop_assert_eq!(s.functional.to_bits(), series.value(n).to_bits());
        prop_assert_eq!(s.z_end.to_bits(), path.values()[n].to_bits());
        let sup = path.values().iter().cloned().fold(0.0, f64::max);
        prop_assert_eq!(s.z_sup.to_bits(), sup.to_bits());
    }

    #[test]
    fn xi_kernel_matches_stored_path((p, beta, id) in cases(), level in 0.01f64..0.5) {
        let (dt, max_steps) = (1.0 / 128.0, 4096);
        let stream = RngStream::new(3, id);
        let f = FunctionalParams::with_grid_default(&p, beta, dt).unwrap();
        let h = default_bandwidth(&p, dt);
        let k = xi_at_local_time(&p, &f, dt, h, level, max_steps, stream).unwrap();
        let path = simulate_path(&p, dt * max_steps as f64, max_steps, stream).unwrap();
        let curve = local_time_zero(&path, h).unwrap();
        let stored = xi_process(&path, &f, &curve, level).unwrap();
        match k {
            XiOutcome::Reached(v) => prop_assert_eq!(Some(v), stored),
            XiOutcome::Censored { local_time, at_cap } => {
                prop_assert_eq!(stored, None);
                prop_assert_eq!(local_time, curve.last());
                let series = homogeneous_functional(&path, &f).unwrap();
                prop_assert_eq!(at_cap.xi, series.value(max_steps));
            }
        }
    }

    #[test]
    fn excursion_kernel_matches_stored_path((p, beta, id) in cases(), level in 0.05f64..1.0) {
        prop_assume!(beta >= 0.0);
        let (horizon, n) = (4.0, 1024);
        let stream = RngStream::new(5, id);
        let f = FunctionalParams::with_grid_default(&p, beta, horizon / n as f64).unwrap();
        let j = default_jump_threshold(&p, horizon / n as f64);
        let k = excursion_kernel(&p, &f, horizon / n as f64, level, j, n, stream).unwrap();
        let path = simulate_path(&p, horizon, n, stream).unwrap();
        prop_assert_eq!(k, excursion_passage(&path, &f, level, j).unwrap());
    }
}
