use multicut::branching::{solve_decision, solve_max};
use multicut::oracle::max_parts;
use multicut::random::{connected_gnp, gnp, rng};
use multicut::validate_multicut;
use rand::Rng;

#[test]
fn decision_matches_oracle_on_random_graphs() {
    let mut r = rng(11);
    for _ in 0..3000 {
        let n = r.gen_range(1..=9);
        let p = r.gen_range(0.15..0.7);
        let g = if r.gen_bool(0.8) { connected_gnp(n, p, &mut r) } else { gnp(n, p, &mut r) };
        let best = max_parts(&g).unwrap();
        for ell in 1..=n {
            let w = solve_decision(&g, ell);
            assert_eq!(w.is_some(), ell <= best, "ell={ell} best={best} edges={:?}", g.edges().collect::<Vec<_>>());
            if let Some(w) = w {
                validate_multicut(&g, w.part_of(), ell).unwrap();
            }
        }
        assert_eq!(solve_max(&g).0, best);
    }
}
