use num_bigint::BigInt;

use egc::reference::{run_table, Mark, Table};
use egc::Engine;

fn failures(t: &Table) -> Vec<(usize, BigInt)> {
    t.rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.mark == Mark::Fail)
        .map(|(k, r)| (k + 1, r.computed.clone()))
        .collect()
}

#[test]
fn plane_divisor_tables() {
    let e = Engine::default();
    assert!(failures(&run_table(&e, "ez4").unwrap()).is_empty());
    // printed 14; see the reference module
    assert_eq!(failures(&run_table(&e, "ez3").unwrap()), vec![(10, BigInt::from(12))]);
}

#[test]
fn quartic_space_curves_through_points_and_lines() {
    let e = Engine::default();
    let t = run_table(&e, "eqesc-nums").unwrap();
    let marks: Vec<Mark> = t.rows.iter().map(|r| r.mark).collect();
    let mut want = vec![Mark::Pass; 9];
    want[1] = Mark::Discrepancy;
    assert_eq!(marks, want, "{t}");
    assert_eq!(t.rows[1].computed, BigInt::from(4436268));
}

#[test]
fn quartic_full_tables() {
    let e = Engine::default();
    let t = run_table(&e, "eqesc-full").unwrap();
    assert_eq!(t.rows.len(), 102);
    // printed 28,340, the value of row 82
    assert_eq!(failures(&t), vec![(57, BigInt::from(31300))], "{t}");
    let checked = t
        .rows
        .iter()
        .filter(|r| r.note.as_deref().is_some_and(|n| n.contains("orders agree")))
        .count();
    assert!(checked > 60);
}

#[test]
fn space_curve_series() {
    let e = Engine::default();
    for name in ["p3-rational", "p3-elliptic-cubics"] {
        let t = run_table(&e, name).unwrap();
        assert!(t.all_ok(), "{t}");
    }
}
