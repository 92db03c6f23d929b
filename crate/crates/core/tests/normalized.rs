use gonosomal::normalized::{
    check_estimates, denormalize_fp, ec_condition, normalize_fp, scan_from, NormalizedOperator,
    ScanConfig, SimplexState, ELIMINATE_U, ELIMINATE_V,
};
use gonosomal::sampling::{stream, uniform_simplex};
use gonosomal::spectral::eigenvalues;
use gonosomal::{GonosomalOperator, InheritanceTensor, PopulationState};
use proptest::prelude::*;

const P: [f64; 4] = [0.5, 0.0, 0.5, 0.0];

fn simplex_point() -> impl Strategy<Value = [f64; 4]> {
    any::<u64>().prop_map(|seed| {
        let c = uniform_simplex(&mut stream(seed, 0), 4);
        [c[0], c[1], c[2], c[3]]
    })
}

fn distance(s: &[f64]) -> f64 {
    s.iter().zip(P).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

proptest! {
    #[test]
    fn maps_simplex_to_simplex(c in simplex_point()) {
        let v = NormalizedOperator::hemophilia();
        let s = SimplexState::quad(c[0], c[1], c[2], c[3]).unwrap();
        let image = v.apply(&s).unwrap();
        let coords = image.state().coords();
        prop_assert!(coords.iter().all(|&x| x >= 0.0));
        prop_assert!((coords.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn one_step_estimates_and_band(c in simplex_point()) {
        let r = check_estimates(&SimplexState::quad(c[0], c[1], c[2], c[3]).unwrap()).unwrap();
        prop_assert!(r.group_holds("lo."), "{}", r);
        prop_assert!(r.group_holds("ly.x(2)+y(2)"), "{}", r);
    }

    #[test]
    fn contraction_with_sharp_constant(c in simplex_point()) {
        let r = check_estimates(&SimplexState::quad(c[0], c[1], c[2], c[3]).unwrap()).unwrap();
        prop_assert!(r.group_holds("ly.contraction 7/10"), "{}", r);
    }

    #[test]
    fn correspondence_round_trip(c in simplex_point()) {
        let op = GonosomalOperator::hemophilia();
        let s = SimplexState::quad(c[0], c[1], c[2], c[3]).unwrap();
        let raw = denormalize_fp(&op, &s).unwrap();
        let back = normalize_fp(&op, &raw.state).unwrap();
        prop_assert!(back.state.state().distance(s.state()) <= 1e-12);
    }
}

#[test]
fn stated_contraction_constant_is_exceeded() {
    // v(3)/y(2) = 7/10 from this start, above 13/24.
    let r = check_estimates(&SimplexState::quad(0.0, 0.5, 0.0, 0.5).unwrap()).unwrap();
    assert!(!r.group_holds("ly.contraction 13/24"));
    let worst = r
        .checks
        .iter()
        .filter(|c| c.name.starts_with("ly.contraction 7/10"))
        .map(|c| c.lhs / (c.rhs / 0.7))
        .fold(0.0, f64::max);
    assert!((worst - 0.7).abs() < 1e-12);
}

#[test]
fn reduced_spectrum_at_p_is_elimination_invariant() {
    let v = NormalizedOperator::hemophilia();
    let p = SimplexState::quad(P[0], P[1], P[2], P[3]).unwrap();
    let eu = eigenvalues(&v.reduced_jacobian_at(&p, ELIMINATE_U).unwrap()).unwrap();
    let ev = eigenvalues(&v.reduced_jacobian_at(&p, ELIMINATE_V).unwrap()).unwrap();
    for (a, b) in eu.iter().zip(&ev) {
        assert!((a - b).norm() < 1e-12);
    }
    for (e, x) in eu.iter().zip([-0.5, 0.0, 1.0]) {
        assert!((e.re - x).abs() < 1e-12 && e.im.abs() < 1e-12);
    }
}

#[test]
fn fixed_points_correspond() {
    let op = GonosomalOperator::hemophilia();
    let p = normalize_fp(&op, &PopulationState::quad(2.0, 0.0, 2.0, 0.0)).unwrap();
    assert_eq!(p.state.state().coords(), &P);
    assert!(p.is_fixed(1e-15));
    let s2 = denormalize_fp(&op, &p.state).unwrap();
    assert_eq!(s2.state.coords(), &[2.0, 0.0, 2.0, 0.0]);
    assert!(s2.is_fixed(1e-15));
}

#[test]
fn ec_examples() {
    assert!(ec_condition(&InheritanceTensor::hemophilia()).unwrap());
    let t = InheritanceTensor::from_rows(1, 1, &[vec![1.0, 0.0]]).unwrap();
    assert!(!ec_condition(&t).unwrap());
    assert!(NormalizedOperator::new(GonosomalOperator::new(t)).is_err());
}

// The unit eigenvalue at p sits in the (y, v) block, so starts near p approach
// it algebraically: the y + v mass decays monotonically but slowly, while the
// distance to p oscillates through the -1/2 mode.
#[test]
fn local_attraction_near_p() {
    let v = NormalizedOperator::hemophilia();
    for i in 0..1_000u64 {
        let mut rng = stream(77, i);
        let dir: Vec<f64> = uniform_simplex(&mut rng, 4)
            .iter()
            .map(|d| d - 0.25)
            .collect();
        let scale = 1e-3 / dir.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let mut c: Vec<f64> = P.iter().zip(&dir).map(|(p, d)| p + scale * d).collect();
        c[1] = c[1].abs();
        c[3] = c[3].abs();
        let total: f64 = c.iter().sum();
        let mut s = SimplexState::new(
            PopulationState::from_coords(c.iter().map(|x| x / total).collect(), 2).unwrap(),
        )
        .unwrap();
        let d0 = distance(s.state().coords());
        assert!(d0 <= 2e-3);
        let mut mass = f64::INFINITY;
        for step in 0..3_000 {
            let q = s.state().coords();
            assert!(q.iter().all(|&x| x >= 0.0));
            assert!((q.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let m = q[1] + q[3];
            if step >= 2 {
                assert!(m <= mass * (1.0 + 1e-12), "start {i}, step {step}");
            }
            mass = m;
            s = v.apply(&s).unwrap();
        }
        assert!(distance(s.state().coords()) < d0.max(1e-6));
    }
}

#[test]
fn scan_from_explicit_starts() {
    let starts = vec![
        SimplexState::quad(0.5, 0.0, 0.5, 0.0).unwrap(),
        SimplexState::quad(1.0, 0.0, 0.0, 0.0)
            .unwrap_or_else(|_| SimplexState::quad(0.5, 0.0, 0.5, 0.0).unwrap()),
    ];
    let cfg = ScanConfig {
        tol: 1e-2,
        budget: 2_000,
        ..ScanConfig::default()
    };
    let r = scan_from(&starts, &cfg).unwrap();
    assert_eq!(r.converged, 2);
    assert!(r.failures.is_empty());
}

#[test]
fn off_simplex_start_is_rejected() {
    assert!(SimplexState::quad(0.5, 0.5, 0.5, 0.5).is_err());
    assert!(SimplexState::quad(1.0, 0.0, 0.0, 0.0).is_err());
    assert!(SimplexState::quad(-0.1, 0.6, 0.25, 0.25).is_err());
}
