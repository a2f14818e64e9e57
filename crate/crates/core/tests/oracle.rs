mod common;

use common::oracle::{and, imp, min_height, or, provable, Prop};

fn v(i: u8) -> Prop {
    Prop::Var(i)
}

fn not(p: Prop) -> Prop {
    imp(p, Prop::Bot)
}

#[test]
fn classics() {
    assert!(provable(&imp(v(0), v(0))));
    assert!(provable(&imp(and(v(0), v(1)), and(v(1), v(0)))));
    assert!(provable(&imp(v(0), not(not(v(0))))));
    assert!(provable(&not(not(or(v(0), not(v(0)))))));
    assert!(!provable(&or(v(0), not(v(0)))));
    assert!(!provable(&imp(not(not(v(0))), v(0))));
    assert!(!provable(&imp(imp(imp(v(0), v(1)), v(0)), v(0))));
}

#[test]
fn heights() {
    assert_eq!(min_height(&imp(v(0), v(0)), 5), Some(1));
    assert_eq!(min_height(&Prop::Top, 5), Some(0));
    assert_eq!(min_height(&imp(and(v(0), v(1)), and(v(1), v(0))), 5), Some(3));
    assert_eq!(min_height(&imp(or(v(0), v(1)), or(v(1), v(0))), 5), Some(3));
}

#[test]
fn generated_sizes_stay_in_bounds() {
    let props = common::random_props(7, 500, 8);
    assert!(props.iter().all(|p| p.size() <= 8));
    assert!(props.iter().any(|p| p.size() == 7));
}
