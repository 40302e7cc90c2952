use testscope_core::bundle::{build_bundle, BundleInput, DiagnosticsRecord, LoadedBundle};
use testscope_core::config::RunConfig;
use testscope_core::extract::extract_tree;
use testscope_core::facts::export_facts;
use testscope_core::views::{to_json, ViewKind};
use testscope_testkit::{
    bundle_validator, facts_validator, fixture, graph_document_validator, random_model, schema_errors,
};

fn bundle_for(rel: &str) -> String {
    let mut cfg = RunConfig::default();
    cfg.extract.roots = vec![fixture(rel)];
    let (model, diag) = extract_tree(&cfg.extract).unwrap();
    let input = BundleInput {
        name: rel.into(),
        roots: vec![rel.into()],
        timestamp: "1970-01-01T00:00:00Z".into(),
        diagnostics: DiagnosticsRecord::from(&diag),
    };
    build_bundle(input, &model, &cfg).to_json()
}

#[test]
fn random_facts_validate() {
    let v = facts_validator();
    for seed in 0..40 {
        let json: serde_json::Value = serde_json::from_str(&export_facts(&random_model(seed, 150))).unwrap();
        let errors = schema_errors(&v, &json);
        assert!(errors.is_empty(), "seed {seed}: {errors:?}");
    }
}

#[test]
fn corpus_bundles_and_their_views_validate() {
    let bundles = bundle_validator();
    let docs = graph_document_validator();
    for rel in ["mini", "broken", "buildfiletest", "indicators/IndirectTestPattern", "indicators/LargeFixture"] {
        let text = bundle_for(rel);
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        let errors = schema_errors(&bundles, &json);
        assert!(errors.is_empty(), "{rel}: {errors:?}");

        let loaded = LoadedBundle::from_json(&text).unwrap();
        let mut views = vec![loaded.view(ViewKind::SystemWide, None).unwrap()];
        for name in loaded.bundle.views.test_cases.keys() {
            views.push(loaded.view(ViewKind::TestCase, Some(name)).unwrap());
        }
        for doc in views {
            let fragment: serde_json::Value = serde_json::from_str(&to_json(&doc)).unwrap();
            let errors = schema_errors(&docs, &fragment);
            assert!(errors.is_empty(), "{rel}: {errors:?}");
        }
    }
}

#[test]
fn schema_rejects_malformed_bundles() {
    let v = bundle_validator();
    let mut json: serde_json::Value = serde_json::from_str(&bundle_for("mini")).unwrap();
    json["formatVersion"] = "testscope-bundle/2".into();
    assert!(!schema_errors(&v, &json).is_empty());
    let mut json: serde_json::Value = serde_json::from_str(&bundle_for("mini")).unwrap();
    json["views"]["systemWide"]["nodes"][0]["shape"] = "Hexagon".into();
    assert!(!schema_errors(&v, &json).is_empty());
}

#[test]
fn random_model_bundles_validate() {
    let v = bundle_validator();
    for seed in 0..10 {
        let model = random_model(seed, 120);
        let input = BundleInput {
            name: format!("random-{seed}"),
            roots: Vec::new(),
            timestamp: "1970-01-01T00:00:00Z".into(),
            diagnostics: DiagnosticsRecord::default(),
        };
        let text = build_bundle(input, &model, &RunConfig::default()).to_json();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        let errors = schema_errors(&v, &json);
        assert!(errors.is_empty(), "seed {seed}: {errors:?}");
        LoadedBundle::from_json(&text).expect("bundle reloads");
    }
}
