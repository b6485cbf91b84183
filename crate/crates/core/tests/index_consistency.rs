mod common;

use common::index_consistency_instance;

#[test]
fn internal_rows_match_scoped_oracle_and_boundary_is_sound() {
    let mut confirmed = 0;
    for seed in 0..60 {
        confirmed += index_consistency_instance(seed, 5).unwrap_or_else(|e| panic!("{e}"));
    }
    assert!(confirmed >= 200, "only {confirmed} boundary samples");
}
