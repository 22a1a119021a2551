//! Bench report invariants: deterministic op counts, exact chain lengths,
//! proof-size columns, and per-cell failure recording. Plus probe edge
//! cases that need no wall-clock budget.

use vdf_core::scheme::SchemeId;
use vdf_harness::bench::{bench, render_table, BenchConfig};
use vdf_harness::probe::forgery_probe_field_exhaustive;

fn small_config() -> BenchConfig {
    BenchConfig {
        schemes: vec![SchemeId::Rsw, SchemeId::Pietrzak, SchemeId::Wesolowski],
        t_grid: vec![64, 128, 256],
        lambda: 32,
        repetitions: 3,
        seed: b"bench-test".to_vec(),
    }
}

#[test]
fn op_count_columns_are_deterministic_in_the_seed() {
    let config = small_config();
    let a = bench(&config);
    let b = bench(&config);
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        assert_eq!(ra.scheme, rb.scheme);
        assert_eq!(ra.t, rb.t);
        assert_eq!(ra.eval_squarings, rb.eval_squarings);
        assert_eq!(ra.verify_group_ops, rb.verify_group_ops);
        assert_eq!(ra.proof_elements, rb.proof_elements);
        assert!(ra.error.is_none());
    }
}

#[test]
fn eval_squarings_equal_the_delay_and_double_with_it() {
    let report = bench(&small_config());
    for row in &report.rows {
        assert_eq!(row.eval_squarings, row.t, "{} at T={}", row.scheme, row.t);
    }
    for scheme in ["rsw", "pietrzak", "wesolowski"] {
        let counts: Vec<u64> = report
            .rows
            .iter()
            .filter(|r| r.scheme == scheme)
            .map(|r| r.eval_squarings)
            .collect();
        for pair in counts.windows(2) {
            assert_eq!(pair[1], 2 * pair[0], "{scheme} squarings must double with T");
        }
    }
}

#[test]
fn proof_size_and_verify_cost_columns() {
    let report = bench(&small_config());
    for row in &report.rows {
        match row.scheme.as_str() {
            "pietrzak" => {
                assert_eq!(row.proof_elements as u32, row.t.trailing_zeros());
            }
            "wesolowski" => {
                assert_eq!(row.proof_elements, 1);
                // lambda-dominated verifier cost: squarings + mults for two
                // pows with 2*lambda-bit exponents, far under 16 * lambda.
                assert!(
                    row.verify_group_ops <= 16 * u64::from(report.lambda),
                    "verify_group_ops {} too high",
                    row.verify_group_ops
                );
            }
            "rsw" => assert_eq!(row.proof_elements, 0),
            other => panic!("unexpected scheme {other}"),
        }
    }
}

#[test]
fn zero_queries_is_a_zero_rate() {
    let report = forgery_probe_field_exhaustive(8, 0, b"probe-edge").unwrap();
    assert_eq!(report.successes, 0);
    assert_eq!(report.rate, 0.0);
}

#[test]
fn toy_lambda_guard_on_the_exhaustive_probe() {
    assert!(forgery_probe_field_exhaustive(32, 10, b"probe-edge").is_err());
}

#[test]
fn invalid_cells_are_recorded_and_the_run_continues() {
    let config = BenchConfig {
        schemes: vec![SchemeId::Pietrzak, SchemeId::Rsw],
        t_grid: vec![48, 64], // 48 is not a power of two
        lambda: 32,
        repetitions: 1,
        seed: b"bench-err".to_vec(),
    };
    let report = bench(&config);
    assert_eq!(report.rows.len(), 4);
    let bad = &report.rows[0];
    assert_eq!(bad.scheme, "pietrzak");
    assert!(bad.error.as_deref().unwrap_or("").contains("power of two"));
    assert!(report.rows[1].error.is_none()); // pietrzak T=64 fine
    assert!(report.rows[2].error.is_none()); // rsw unaffected at T=48
    let table = render_table(&report);
    assert!(table.contains("error"));
    assert!(table.contains("verify_ops"));
}
