mod common;

use common::safe_interval_oracle;

#[test]
fn analytic_intervals_match_time_sampling() {
    let r = safe_interval_oracle(250, 0.01, 0.02, 101);
    assert_eq!(r.misclassified, 0, "{r:?}");
    assert_eq!(r.unmatched, 0, "{r:?}");
    assert!(r.max_boundary_error <= 0.02, "{r:?}");
}

#[test]
fn safe_edges_never_overlap_the_obstacle() {
    let r = safe_interval_oracle(150, 0.01, 0.02, 202);
    assert_eq!(r.missed_contacts, 0, "{r:?}");
}
