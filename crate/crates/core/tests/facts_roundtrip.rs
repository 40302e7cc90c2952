use std::collections::BTreeMap;

use proptest::prelude::*;
use testscope_core::facts::{export_facts, import_facts};
use testscope_core::model::{FactModel, RelationKind, SourceLocation, Target};
use testscope_testkit::random_model;

type RelationKey = (RelationKind, String, String, Option<SourceLocation>);

/// Relations as a multiset keyed by endpoint names, so that id
/// renumbering on import does not matter.
fn relation_multiset(m: &FactModel) -> BTreeMap<RelationKey, usize> {
    let mut out = BTreeMap::new();
    for r in m.relations() {
        let to = match &r.to {
            Target::Resolved(id) => format!("#{}", m.entity(*id).qualified_name),
            Target::Unresolved(name) => format!("?{name}"),
        };
        let key = (r.kind, m.entity(r.from).qualified_name.clone(), to, r.site.clone());
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

fn entity_table(m: &FactModel) -> BTreeMap<(String, String), String> {
    m.entities()
        .iter()
        .map(|e| {
            let detail = format!(
                "{:?}|{:?}|{:?}|{:?}|{:?}",
                e.flags,
                e.location,
                e.declared_type,
                e.annotations,
                e.parent.map(|p| m.entity(p).qualified_name.clone())
            );
            ((format!("{:?}", e.kind), e.qualified_name.clone()), detail)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn import_export_preserves_names_flags_and_relations(seed in any::<u64>()) {
        let model = random_model(seed, 200);
        let text = export_facts(&model);
        let back = import_facts(&text).expect("exported facts import");
        prop_assert_eq!(back.len(), model.len());
        prop_assert_eq!(entity_table(&back), entity_table(&model));
        prop_assert_eq!(relation_multiset(&back), relation_multiset(&model));
        // A second trip is byte-stable.
        prop_assert_eq!(export_facts(&back), text);
    }
}

#[test]
fn rejects_wrong_format_tag() {
    let text = export_facts(&random_model(1, 20)).replacen("testscope-facts", "other-facts", 1);
    assert!(import_facts(&text).is_err());
}
