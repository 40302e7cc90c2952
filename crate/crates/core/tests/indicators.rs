use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use testscope_core::config::RunConfig;
use testscope_core::extract::extract_tree;
use testscope_core::indicators::{detect_design, convention_verdict, report, FindingKind, Severity, Thresholds};
use testscope_core::model::{EntityId, EntityKind};
use testscope_core::testmodel::{build_test_model, ClassifyConfig, TestModel, TestRole};
use testscope_testkit::{fixture, random_model};

fn corpus_model(rel: &str) -> TestModel {
    let mut cfg = RunConfig::default();
    cfg.extract.roots = vec![fixture(rel)];
    let (model, _) = extract_tree(&cfg.extract).unwrap();
    build_test_model(Arc::new(model), &cfg.classify)
}

fn subjects_of(tm: &TestModel, th: &Thresholds, kind: FindingKind) -> BTreeSet<Vec<EntityId>> {
    report(tm, th)
        .findings
        .into_iter()
        .filter(|f| f.kind == kind)
        .map(|f| f.subjects)
        .collect()
}

#[test]
fn build_file_test_shape_is_a_helper_with_ten_dependents() {
    let tm = corpus_model("buildfiletest");
    let m = tm.base();
    let helper = m.resolve_kind("org.apache.tools.ant.BuildFileTest", EntityKind::Class).unwrap();
    let commands: usize = tm
        .test_cases()
        .filter(|tc| *tc != helper)
        .map(|tc| tm.commands_of(tc).len())
        .sum();
    assert!(commands >= 50, "corpus has {commands} commands");
    let findings = detect_design(&tm, &Thresholds::default(), convention_verdict(&tm));
    let found: Vec<_> = findings
        .iter()
        .filter(|f| f.kind == FindingKind::TestHelper && f.subjects == [helper])
        .collect();
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].evidence["dependents"], 10.0);
    assert_eq!(found[0].severity, Severity::Opportunity);
    assert_eq!(tm.dependencies().iter().filter(|d| d.to_test == helper).count(), 10);
}

#[test]
fn lower_complexity_bar_adds_the_five_call_command() {
    let tm = corpus_model("indicators/ComplexTestScenario");
    let names = |th: &Thresholds| -> Vec<String> {
        subjects_of(&tm, th, FindingKind::ComplexTestScenario)
            .into_iter()
            .map(|s| tm.base().entity(s[0]).qualified_name.clone())
            .collect()
    };
    assert_eq!(names(&Thresholds::default()), ["flow.PipelineTest.testEverything/0"]);
    let low = Thresholds {
        complex_scenario_min_prod_methods: 3,
        ..Thresholds::default()
    };
    assert_eq!(
        names(&low),
        ["flow.PipelineTest.testEverything/0", "flow.PipelineTest.testLoadCycle/0"]
    );
}

#[test]
fn zero_test_corpus_reports_untested_packages() {
    let tm = corpus_model("broken");
    assert_eq!(tm.test_cases().count(), 0);
    let r = report(&tm, &Thresholds::default());
    assert!(r.findings.iter().any(|f| f.kind == FindingKind::UntestedComponent));
}

#[test]
fn every_kind_has_a_fixed_severity() {
    for f in FindingKind::ALL {
        let tm = corpus_model(&format!("indicators/{}", f.name()));
        for finding in report(&tm, &Thresholds::default()).findings {
            if finding.kind == FindingKind::UntestedComponent && finding.evidence["generated"] == 1.0 {
                assert_eq!(finding.severity, Severity::Info);
            } else {
                assert_eq!(finding.severity, finding.kind.severity());
            }
        }
    }
}

/// Test-side roles never end up as subjects of production-only findings.
#[test]
fn coverage_findings_name_production_classes() {
    for f in FindingKind::ALL {
        let tm = corpus_model(&format!("indicators/{}", f.name()));
        for finding in report(&tm, &Thresholds::default()).findings {
            if matches!(
                finding.kind,
                FindingKind::HighlyCoveredClass | FindingKind::MultiTestCaseCoverage | FindingKind::PartialCoverage
            ) {
                assert_eq!(tm.role(finding.subjects[0]), TestRole::Production);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Raising a minimum never adds findings of the kind it governs;
    /// raising a maximum never removes any.
    #[test]
    fn thresholds_are_monotone(seed in any::<u64>(), lo in 1u32..6, step in 1u32..4, ratio in 0.05f64..0.9) {
        let tm = build_test_model(Arc::new(random_model(seed, 200)), &ClassifyConfig::default());
        let hi = lo + step;
        let pairs: [(FindingKind, fn(&mut Thresholds, u32)); 4] = [
            (FindingKind::HighlyCoveredClass, |t, v| t.highly_covered_min_test_cases = v),
            (FindingKind::TestHelper, |t, v| t.helper_min_dependents = v),
            (FindingKind::ComplexTestScenario, |t, v| t.complex_scenario_min_prod_methods = v),
            (FindingKind::LargeFixture, |t, v| t.large_fixture_min_classes = v),
        ];
        for (kind, set) in pairs {
            let (mut a, mut b) = (Thresholds::default(), Thresholds::default());
            set(&mut a, lo);
            set(&mut b, hi);
            let strict = subjects_of(&tm, &b, kind);
            let loose = subjects_of(&tm, &a, kind);
            prop_assert!(strict.is_subset(&loose), "{:?}: {:?} not within {:?}", kind, strict, loose);
        }
        let narrow = Thresholds { partial_coverage_max: ratio / 2.0, ..Thresholds::default() };
        let wide = Thresholds { partial_coverage_max: ratio, ..Thresholds::default() };
        prop_assert!(subjects_of(&tm, &narrow, FindingKind::PartialCoverage)
            .is_subset(&subjects_of(&tm, &wide, FindingKind::PartialCoverage)));
        let tight = Thresholds { partial_fixture_use_max: ratio / 2.0, ..Thresholds::default() };
        let loose = Thresholds { partial_fixture_use_max: ratio, ..Thresholds::default() };
        prop_assert!(subjects_of(&tm, &tight, FindingKind::LargeFixture)
            .is_subset(&subjects_of(&tm, &loose, FindingKind::LargeFixture)));
    }
}
