mod common;

use common::{composition_oracle, compose_with};
use ia_core::algebra::{composes_to_full, CompositionTables};
use ia_core::generate::InstanceRng;
use ia_core::{Basic, Composition, Label};
use proptest::prelude::*;

#[test]
fn basic_compositions_match_grid_enumeration() {
    let oracle = composition_oracle();
    let tables = CompositionTables::global();
    for r1 in Basic::ALL {
        for r2 in Basic::ALL {
            assert_eq!(tables.basic(r1, r2), oracle[r1.index()][r2.index()], "{r1} . {r2}");
        }
    }
}

#[test]
fn table_has_expected_full_entries() {
    // only b.bi, bi.b, d.di produce every relation
    let tables = CompositionTables::global();
    let full: Vec<(Basic, Basic)> = Basic::ALL
        .iter()
        .flat_map(|&a| Basic::ALL.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| tables.basic(a, b).is_full())
        .collect();
    let names: Vec<String> = full.iter().map(|(a, b)| format!("{a}.{b}")).collect();
    assert_eq!(names, ["b.bi", "bi.b", "d.di"]);
}

#[test]
fn random_label_pairs_agree_with_oracle() {
    let oracle = composition_oracle();
    let mut rng = InstanceRng::new(11);
    for _ in 0..20_000 {
        let x = Label::from_bits_truncate(rng.below(Label::COUNT as u64) as u16);
        let y = Label::from_bits_truncate(rng.below(Label::COUNT as u64) as u16);
        let want = compose_with(&oracle, x, y);
        for c in Composition::ALL {
            assert_eq!(c.compose(x, y), want, "{c} {x:?} {y:?}");
        }
    }
}

fn label() -> impl Strategy<Value = Label> {
    (0u16..8192).prop_map(Label::from_bits_truncate)
}

proptest! {
    #[test]
    fn inverse_is_an_involution(x in label()) {
        prop_assert_eq!(x.inverse().inverse(), x);
        prop_assert_eq!(x.inverse().cardinality(), x.cardinality());
    }

    #[test]
    fn composition_converse_law(x in label(), y in label()) {
        let c = Composition::Split;
        prop_assert_eq!(c.compose(x, y).inverse(), c.compose(y.inverse(), x.inverse()));
    }

    #[test]
    fn composition_distributes_over_union(x in label(), y in label(), z in label()) {
        let c = Composition::Pairwise;
        prop_assert_eq!(c.compose(x | y, z), c.compose(x, z) | c.compose(y, z));
    }

    #[test]
    fn early_exit_only_when_target_is_covered(x in label(), y in label(), t in label()) {
        for c in Composition::ALL {
            let full = c.compose(x, y);
            match c.compose_until(x, y, t) {
                Some(got) => prop_assert_eq!(got, full),
                None => prop_assert!(t.is_subset(full)),
            }
        }
    }

    #[test]
    fn full_shortcut_is_sound(x in label(), y in label()) {
        if composes_to_full(x, y) {
            prop_assert!(Composition::Split.compose(x, y).is_full());
        }
    }

    #[test]
    fn label_text_round_trips(x in label()) {
        prop_assume!(!x.is_empty());
        prop_assert_eq!(x.to_string().parse::<Label>().unwrap(), x);
    }
}
