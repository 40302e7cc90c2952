//! One line per acceptance criterion. Runs without the libtest harness so
//! the verdicts always show up in `cargo test` output; exits non-zero when
//! any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use testscope_core::config::RunConfig;
use testscope_core::extract::extract_tree;
use testscope_core::facts::{export_facts, import_facts};
use testscope_core::indicators::{convention_verdict, detect_design, FindingKind, Thresholds};
use testscope_core::layout::{default_params, layout, LayoutParams, WeightedEdge};
use testscope_core::model::{EntityKind, FactModel, Target};
use testscope_core::testmodel::{build_test_model, ClassifyConfig, TestModel, TestRole};
use testscope_core::views::{build_system_wide, build_unit_view, EdgeKind};
use testscope_testkit::{oracle_class_coverage, oracle_method_coverage, random_graph, random_model};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, started: Instant) -> Result<Duration, String> {
    let took = started.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn corpus_model(root: &std::path::Path) -> TestModel {
    let mut cfg = RunConfig::default();
    cfg.extract.roots = vec![root.to_path_buf()];
    let (model, _) = extract_tree(&cfg.extract).expect("fixture extracts");
    build_test_model(Arc::new(model), &cfg.classify)
}

fn indicator_dirs() -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(workspace_root().join("fixtures/indicators"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    out.sort();
    out
}

fn finding_set(list: &serde_json::Value, subjects_key: &str) -> BTreeSet<(String, Vec<String>)> {
    list.as_array()
        .unwrap()
        .iter()
        .map(|f| {
            (
                f["kind"].as_str().unwrap().to_string(),
                serde_json::from_value(f[subjects_key].clone()).unwrap(),
            )
        })
        .collect()
}

fn indicator_corpora() -> Outcome {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let names = indicator_dirs();
    ensure(names.len() >= 14, || format!("only {} corpora", names.len()))?;
    let kinds: BTreeSet<&str> = FindingKind::ALL.iter().map(|k| k.name()).collect();
    let covered: BTreeSet<&str> = names.iter().map(String::as_str).collect();
    ensure(kinds.is_subset(&covered), || format!("missing corpora for {:?}", kinds.difference(&covered)))?;
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for name in &names {
        let manifest = manifest(&format!("indicators/{name}/manifest.json"));
        let want = finding_set(&manifest["expected"], "subjects");
        let bundle = analyze(dir.path(), &format!("indicators/{name}"), &[]);
        let out = run(&["report", "--bundle", bundle.to_str().unwrap(), "--format", "json"]);
        ensure(code(&out) == 0, || format!("{name}: report exit {}", code(&out)))?;
        let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let got = finding_set(&report["findings"], "subjectNames");
        tp += got.intersection(&want).count();
        fp += got.difference(&want).count();
        fn_ += want.difference(&got).count();
        ensure(got == want, || {
            format!(
                "{name}: unexpected {:?}, missing {:?}",
                got.difference(&want).collect::<Vec<_>>(),
                want.difference(&got).collect::<Vec<_>>()
            )
        })?;
    }
    let took = within(Duration::from_secs(5), started)?;
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    Ok(format!(
        "{} corpora, {tp} findings, precision {precision:.2}, recall {recall:.2}, {took:.2?}",
        names.len()
    ))
}

fn coverage_oracle() -> Outcome {
    let started = Instant::now();
    let mut edges = 0;
    for seed in 0..100u64 {
        let cfg = ClassifyConfig {
            setup_coverage: !seed.is_multiple_of(3),
            constructor_coverage: !seed.is_multiple_of(5),
            ..ClassifyConfig::default()
        };
        let model = random_model(seed, 200);
        ensure(model.len() <= 200, || format!("seed {seed}: {} entities", model.len()))?;
        let tm = build_test_model(Arc::new(model), &cfg);
        let got: BTreeMap<_, _> = tm.coverage().iter().map(|e| ((e.from_test, e.to_prod), e.via_invocations)).collect();
        ensure(got == oracle_method_coverage(&tm), || format!("seed {seed}: method-level edges differ"))?;
        let classes: BTreeSet<_> = tm.class_coverage().iter().map(|c| (c.test_case, c.prod_class)).collect();
        ensure(classes == oracle_class_coverage(&tm), || format!("seed {seed}: class-level edges differ"))?;
        edges += got.len();
    }
    let took = within(Duration::from_secs(10), started)?;
    Ok(format!("100 models, {edges} method-level edges matched, {took:.2?}"))
}

fn coverage_definition() -> Outcome {
    let tm = corpus_model(&fixture("mini"));
    let m = tm.base();
    let mut checked = 0;
    let mut covered_names = BTreeSet::new();
    for tc in tm.test_cases().collect::<Vec<_>>() {
        for class in m.entities_of(EntityKind::Class).filter(|c| tm.role(c.id) == TestRole::Production) {
            let invoked = m.relations().iter().any(|r| {
                r.kind == testscope_core::model::RelationKind::Invocation
                    && m.entity(r.from).parent == Some(tc)
                    && matches!(tm.role(r.from), TestRole::TestCommand | TestRole::TestSetup)
                    && matches!(r.to, Target::Resolved(t) if m.entity(t).parent == Some(class.id))
            });
            let reported = tm.class_coverage().iter().any(|c| c.test_case == tc && c.prod_class == class.id);
            ensure(invoked == reported, || {
                format!("{} / {}: invoked {invoked}, reported {reported}", m.entity(tc).qualified_name, class.qualified_name)
            })?;
            if reported {
                covered_names.insert(class.qualified_name.clone());
            }
            checked += 1;
        }
    }
    let manifest = manifest("mini/manifest.json");
    let want: BTreeSet<String> = serde_json::from_value(manifest["coveredClasses"].clone()).unwrap();
    ensure(covered_names == want, || format!("covered {covered_names:?}, manifest {want:?}"))?;
    Ok(format!("{checked} (test case, class) pairs enumerated, covered {covered_names:?}"))
}

fn relation_multiset(m: &FactModel) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for r in m.relations() {
        let to = match &r.to {
            Target::Resolved(id) => m.entity(*id).qualified_name.clone(),
            Target::Unresolved(n) => format!("?{n}"),
        };
        *out.entry(format!("{:?} {} {to} {:?}", r.kind, m.entity(r.from).qualified_name, r.site)).or_insert(0) += 1;
    }
    out
}

fn facts_round_trip() -> Outcome {
    let mut relations = 0;
    for seed in 0..100u64 {
        let model = random_model(seed, 200);
        let back = import_facts(&export_facts(&model)).map_err(|e| format!("seed {seed}: {e}"))?;
        let names = |m: &FactModel| -> BTreeMap<String, String> {
            m.entities()
                .iter()
                .map(|e| (format!("{:?} {}", e.kind, e.qualified_name), format!("{:?}", e.flags)))
                .collect()
        };
        ensure(names(&model) == names(&back), || format!("seed {seed}: names or flags differ"))?;
        ensure(relation_multiset(&model) == relation_multiset(&back), || format!("seed {seed}: relations differ"))?;
        relations += model.relations().len();
    }
    Ok(format!("100 models, {relations} relations preserved"))
}

fn gem_layout() -> Outcome {
    let started = Instant::now();
    let single = layout(1, &[], &default_params(1), None);
    ensure(single.positions[0].x == 0.0 && single.positions[0].y == 0.0, || "single node off origin".into())?;

    let p = default_params(2);
    let two = layout(2, &[WeightedEdge { from: 0, to: 1, weight: 1.0 }], &p, None);
    let (a, b) = (two.positions[0], two.positions[1]);
    let ratio = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt() / p.desired_edge_length;
    ensure((0.8..=1.2).contains(&ratio), || format!("two-node distance ratio {ratio}"))?;

    let mut nodes = 0;
    for seed in 0..50u64 {
        let (n, edges) = random_graph(seed, 500);
        let params = LayoutParams { seed, ..default_params(n) };
        let r = layout(n, &edges, &params, None);
        ensure(r.positions.iter().all(|q| q.x.is_finite() && q.y.is_finite()), || format!("graph {seed}: non-finite"))?;
        if seed < 5 {
            let again = layout(n, &edges, &params, None);
            let bits = |ps: &[testscope_core::views::Position]| -> Vec<(u64, u64)> {
                ps.iter().map(|q| (q.x.to_bits(), q.y.to_bits())).collect()
            };
            ensure(bits(&r.positions) == bits(&again.positions), || format!("graph {seed}: not deterministic"))?;
        }
        nodes += n;
    }
    let took = within(Duration::from_secs(30), started)?;
    Ok(format!("single at origin, two-node ratio {ratio:.3}, 50 graphs / {nodes} nodes finite, {took:.2?}"))
}

fn view_filters() -> Outcome {
    let mut roots = vec![fixture("mini"), fixture("broken"), fixture("buildfiletest")];
    roots.extend(indicator_dirs().iter().map(|n| fixture(&format!("indicators/{n}"))));
    let mut units = 0;
    for root in &roots {
        let tm = corpus_model(root);
        let m = tm.base();
        let doc = build_system_wide(&tm, None).map_err(|e| e.to_string())?;
        let methods = doc
            .nodes
            .iter()
            .filter(|n| n.entity.is_some_and(|e| m.entity(e).kind == EntityKind::Method))
            .count();
        ensure(methods == 0, || format!("{}: {methods} method nodes", root.display()))?;
        for class in m.entities_of(EntityKind::Class).filter(|c| tm.role(c.id) == TestRole::Production) {
            let doc = build_unit_view(&tm, class.id).map_err(|e| e.to_string())?;
            let got: BTreeMap<(String, String), u32> =
                doc.edges_of(EdgeKind::Coverage).map(|e| ((e.from.clone(), e.to.clone()), e.weight)).collect();
            let want: BTreeMap<(String, String), u32> = oracle_method_coverage(&tm)
                .into_iter()
                .filter(|((_, to), _)| m.entity(*to).parent == Some(class.id))
                .map(|((f, t), n)| ((m.entity(f).qualified_name.clone(), m.entity(t).qualified_name.clone()), n))
                .collect();
            ensure(got == want, || format!("{}: unit {} edges differ", root.display(), class.qualified_name))?;
            units += 1;
        }
    }
    Ok(format!("{} corpora without method nodes, {units} unit views match the oracle", roots.len()))
}

fn build_file_test() -> Outcome {
    let tm = corpus_model(&fixture("buildfiletest"));
    let m = tm.base();
    let helper = m
        .resolve_kind("org.apache.tools.ant.BuildFileTest", EntityKind::Class)
        .ok_or("helper class missing")?;
    let subclasses = tm.dependencies().iter().filter(|d| d.to_test == helper).count();
    let commands: usize = tm.test_cases().filter(|t| *t != helper).map(|t| tm.commands_of(t).len()).sum();
    ensure(subclasses == 10 && commands >= 50, || format!("{subclasses} subclasses, {commands} commands"))?;
    let findings = detect_design(&tm, &Thresholds::default(), convention_verdict(&tm));
    let f = findings
        .iter()
        .find(|f| f.kind == FindingKind::TestHelper && f.subjects == [helper])
        .ok_or("no TestHelper finding")?;
    let dependents = f.evidence["dependents"];
    ensure(dependents == 10.0, || format!("dependents = {dependents}"))?;
    let mut detail = format!("TestHelper dependents=10 over {commands} commands");
    if let Some(ant) = std::env::var_os("TESTSCOPE_ANT_ROOT") {
        let tm = corpus_model(std::path::Path::new(&ant));
        let findings = detect_design(&tm, &Thresholds::default(), convention_verdict(&tm));
        let real = tm.base().resolve_kind("org.apache.tools.ant.BuildFileTest", EntityKind::Class);
        match findings.iter().find(|f| f.kind == FindingKind::TestHelper && Some(f.subjects[0]) == real) {
            Some(f) => detail.push_str(&format!(
                "; real checkout: flagged, commandUsers={} dependents={}",
                f.evidence["commandUsers"], f.evidence["dependents"]
            )),
            None => detail.push_str("; real checkout: not flagged"),
        }
    }
    Ok(detail)
}

fn end_to_end_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["analyze", "--root", "fixtures/mini", "--out", p.to_str().unwrap(), "--name", "mini", "--quiet"]);
        ensure(code(&out) == 0, || stderr(&out))?;
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    ensure(x == y, || "bundles differ".into())?;
    Ok(format!("two runs, {} identical bytes", x.len()))
}

fn exit_codes() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mini = analyze(dir.path(), "mini", &[]);
    let complex = analyze(dir.path(), "indicators/ComplexTestScenario", &[]);
    let clean = analyze(dir.path(), "indicators/TestsInSamePackage", &[]);
    let facts = dir.path().join("f.json");
    let cases: Vec<(i32, Vec<&str>)> = vec![
        (0, vec!["extract", "--root", "fixtures/mini", "--out", facts.to_str().unwrap()]),
        (0, vec!["report", "--bundle", clean.to_str().unwrap(), "--fail-on", "threat"]),
        (1, vec!["report", "--bundle", complex.to_str().unwrap(), "--fail-on", "threat"]),
        (2, vec!["extract", "--root", "fixtures/does-not-exist", "--out", "/dev/null"]),
        (2, vec!["analyze", "--root", "fixtures/mini", "--out", "/dev/null", "--set", "layout.maxRounds=0"]),
        (3, vec!["view", "--bundle", mini.to_str().unwrap(), "--kind", "unit", "--focus", "pkg.Missing"]),
    ];
    for (want, args) in &cases {
        let got = code(&run(args));
        ensure(got == *want, || format!("`{}` exited {got}, want {want}", args.join(" ")))?;
    }
    Ok(format!("{} subprocess cases over codes 0, 1, 2, 3", cases.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("indicator corpus completeness", indicator_corpora),
        ("coverage oracle equivalence", coverage_oracle),
        ("coverage definition fidelity", coverage_definition),
        ("facts round-trip", facts_round_trip),
        ("GEM layout properties", gem_layout),
        ("view filters", view_filters),
        ("BuildFileTest-pattern detection", build_file_test),
        ("end-to-end determinism", end_to_end_determinism),
        ("exit-code contract", exit_codes),
    ];
    // Keep panic messages out of the verdict lines.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
