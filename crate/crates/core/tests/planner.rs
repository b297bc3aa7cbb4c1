mod oracle;

use fibersim_core::bundle::Config;
use fibersim_core::geometry::Vec2;
use fibersim_core::planner::{fiber_plan, Piece};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn antipodal_length_matches_visibility_graph() {
    let plan = fiber_plan(
        &Config::new(Vec2::new(-3.0, 0.0), Vec2::ZERO),
        &Config::new(Vec2::new(3.0, 0.0), Vec2::ZERO),
    )
    .unwrap();
    assert_eq!(plan.piece, Piece::Degenerate);
    let brute = oracle::shortest_path_length(plan.start, plan.goal, Vec2::ZERO, 2.0);
    assert!((plan.length - brute).abs() <= 1e-3, "{} vs {}", plan.length, brute);
}

#[test]
fn random_pairs_match_visibility_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..40 {
        let cn = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let mut draw = || Config::new(cn + Vec2::from_polar(rng.gen_range(2.0..6.0), rng.gen_range(0.0..6.3)), cn);
        let (a, b) = (draw(), draw());
        let plan = fiber_plan(&a, &b).unwrap();
        let brute = oracle::shortest_path_length(a.cm, b.cm, cn, 2.0);
        assert!((plan.length - brute).abs() <= 1e-3, "{:?}: {} vs {}", plan.piece, plan.length, brute);
        // the oracle never beats the planner by more than rounding
        assert!(brute >= plan.length - 1e-9);
    }
}
