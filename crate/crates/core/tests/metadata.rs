use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Duration;

use sparql_assist_core::client::{EndpointRef, SparqlClient};
use sparql_assist_core::metadata::{
    fetch_void, CacheConfig, CacheState, ExampleForm, MetadataCache, Provenance, QueryTemplates, SchemaSource,
    TemplateId, VoidOutcome,
};
use sparql_assist_fixture::scenarios::{taxon_void, EXAMPLES, UP};
use sparql_assist_fixture::{Dataset, Failure, FixtureEndpoint, Matcher, Object};

fn cache(config: CacheConfig) -> MetadataCache {
    MetadataCache::new(SparqlClient::default(), config)
}

fn short_ttl(ttl: Duration) -> CacheConfig {
    CacheConfig { ttl, failure_ttl: ttl, ..CacheConfig::default() }
}

fn endpoint(fixture: &FixtureEndpoint) -> EndpointRef {
    EndpointRef::new(&fixture.url()).unwrap()
}

fn people() -> Dataset {
    let mut d = Dataset::new();
    d.add_type("http://ex/alice", "http://ex/Person")
        .add_type("http://ex/bob", "http://ex/Person")
        .add_type("http://ex/acme", "http://ex/Company")
        .add("http://ex/alice", "http://ex/knows", Object::iri("http://ex/bob"))
        .add("http://ex/alice", "http://ex/worksFor", Object::iri("http://ex/acme"))
        .add("http://ex/alice", "http://ex/name", Object::string("Alice"))
        .add("http://ex/bob", "http://ex/name", Object::string("Bob"))
        .add("http://ex/acme", "http://ex/label", Object::string("ACME"));
    d
}

#[tokio::test]
async fn void_schema_and_examples() {
    let fixture = FixtureEndpoint::taxon().await.unwrap();
    let cache = cache(CacheConfig::default());
    let data = cache.get(&endpoint(&fixture)).await;
    assert_eq!(data.provenance(), Provenance::Void);
    let schema = data.schema.as_ref().unwrap();
    let taxon = &schema.classes[&format!("{UP}Taxon")];
    let preds: Vec<(&str, u64)> = taxon.predicates.values().map(|p| (p.iri.as_str(), p.triples)).collect();
    assert_eq!(preds, [(&*format!("{UP}rank"), 500), (&*format!("{UP}scientificName"), 900)]);
    assert_eq!(data.examples.len(), 5);
    let forms: Vec<ExampleForm> = data.examples.iter().map(|e| e.form).collect();
    use ExampleForm::*;
    assert_eq!(forms, [Select, Select, Construct, Ask, Describe]);
    for (example, (id, _, query, comment)) in data.examples.iter().zip(EXAMPLES) {
        assert_eq!((example.id.as_str(), example.query.as_str(), example.description.as_str()), (id, query, comment));
    }
    // VoID found, so no probes
    assert_eq!(fixture.request_count(), 2);
    assert_eq!(cache.state(&fixture.url()), CacheState::Fresh);
}

#[tokio::test]
async fn hit_within_ttl_makes_no_requests() {
    let fixture = FixtureEndpoint::taxon().await.unwrap();
    let cache = cache(CacheConfig::default());
    let ep = endpoint(&fixture);
    let first = cache.get(&ep).await;
    let second = cache.get(&ep).await;
    assert!(Arc::ptr_eq(&first, &second));
    assert_eq!(fixture.template_count(TemplateId::Void), 1);
    assert_eq!(fixture.request_count(), 2);
}

#[tokio::test]
async fn void_fetch_against_dataset_oracle() {
    let fixture = FixtureEndpoint::start().await.unwrap();
    let data = people();
    data.register_void(&fixture).unwrap();
    let VoidOutcome::Found(schema) =
        fetch_void(&SparqlClient::default(), &endpoint(&fixture), &QueryTemplates::default()).await.unwrap()
    else {
        panic!("expected VoID")
    };
    let classes: BTreeSet<String> = schema.classes.keys().cloned().collect();
    assert_eq!(classes, data.classes());
    let person = &schema.classes["http://ex/Person"];
    assert_eq!(person.instances, 2);
    assert_eq!(person.predicates["http://ex/name"].triples, 2);
    assert_eq!(person.predicates["http://ex/knows"].object_classes, BTreeSet::from(["http://ex/Person".to_string()]));
    assert_eq!(
        person.predicates["http://ex/worksFor"].object_classes,
        BTreeSet::from(["http://ex/Company".to_string()])
    );
}

#[tokio::test]
async fn sixteen_concurrent_misses_share_one_fetch() {
    let fixture = FixtureEndpoint::taxon().await.unwrap();
    fixture.inject_failure(Some(Matcher::Template(TemplateId::Void)), Failure::Delay(Duration::from_millis(100)), None);
    let cache = Arc::new(cache(CacheConfig::default()));
    let ep = endpoint(&fixture);
    let calls = (0..16).map(|_| {
        let cache = cache.clone();
        let ep = ep.clone();
        tokio::spawn(async move { cache.get(&ep).await })
    });
    let results: Vec<_> = futures_join(calls).await;
    assert!(results.windows(2).all(|w| Arc::ptr_eq(&w[0], &w[1])));
    assert_eq!(fixture.template_count(TemplateId::Void), 1);
    assert_eq!(fixture.template_count(TemplateId::Examples), 1);
}

async fn futures_join<T: Send + 'static>(handles: impl Iterator<Item = tokio::task::JoinHandle<T>>) -> Vec<T> {
    let mut out = Vec::new();
    for h in handles.collect::<Vec<_>>() {
        out.push(h.await.unwrap());
    }
    out
}

#[tokio::test]
async fn ttl_expiry_refetches() {
    let fixture = FixtureEndpoint::taxon().await.unwrap();
    let cache = cache(short_ttl(Duration::from_millis(50)));
    let ep = endpoint(&fixture);
    cache.get(&ep).await;
    tokio::time::sleep(Duration::from_millis(80)).await;
    assert_eq!(cache.state(&fixture.url()), CacheState::Stale);
    // stale entries are still served without network access
    assert!(cache.peek(&fixture.url()).is_some());
    cache.get(&ep).await;
    assert_eq!(fixture.template_count(TemplateId::Void), 2);
}

#[tokio::test]
async fn invalidate_forces_refetch() {
    let fixture = FixtureEndpoint::taxon().await.unwrap();
    let cache = cache(CacheConfig::default());
    let ep = endpoint(&fixture);
    cache.get(&ep).await;
    cache.invalidate(&fixture.url());
    assert_eq!(cache.state(&fixture.url()), CacheState::Stale);
    cache.get(&ep).await;
    assert_eq!(fixture.template_count(TemplateId::Void), 2);
    assert_eq!(cache.state(&fixture.url()), CacheState::Fresh);
}

#[tokio::test]
async fn invalidate_during_fetch_marks_result_stale() {
    let fixture = FixtureEndpoint::taxon().await.unwrap();
    fixture.inject_failure(Some(Matcher::Template(TemplateId::Void)), Failure::Delay(Duration::from_millis(150)), None);
    let cache = Arc::new(cache(CacheConfig::default()));
    let ep = endpoint(&fixture);
    let task = {
        let (cache, ep) = (cache.clone(), ep.clone());
        tokio::spawn(async move { cache.get(&ep).await })
    };
    tokio::time::sleep(Duration::from_millis(50)).await;
    assert_eq!(cache.state(&fixture.url()), CacheState::Fetching);
    cache.invalidate(&fixture.url());
    task.await.unwrap();
    assert_eq!(cache.state(&fixture.url()), CacheState::Stale);
    fixture.clear_failures();
    cache.get(&ep).await;
    assert_eq!(fixture.template_count(TemplateId::Void), 2);
}

#[tokio::test]
async fn empty_void_falls_back_to_probes() {
    let fixture = FixtureEndpoint::start().await.unwrap();
    let data = people();
    data.register_probes(&fixture).unwrap();
    let meta = cache(CacheConfig::default()).get(&endpoint(&fixture)).await;
    assert_eq!(meta.provenance(), Provenance::Probed);
    let schema = meta.schema.as_ref().unwrap();
    assert_eq!(schema.source, SchemaSource::Probed);
    assert_eq!(schema.classes.keys().cloned().collect::<BTreeSet<_>>(), data.classes());
    assert_eq!(schema.all_predicates().into_keys().collect::<BTreeSet<_>>(), data.predicates());
    assert_eq!(schema.classes["http://ex/Person"].instances, 2);
    assert_eq!(schema.global_predicates["http://ex/name"], 2);
    assert!(meta.examples.is_empty());
    assert!(meta.examples_error.is_none());
    assert_eq!(fixture.template_count(TemplateId::ProbeClassesDistinct), 0);
}

#[tokio::test]
async fn void_failure_falls_back_to_probes() {
    let fixture = FixtureEndpoint::start().await.unwrap();
    let data = people();
    data.register_void(&fixture).unwrap();
    data.register_probes(&fixture).unwrap();
    fixture.inject_failure(Some(Matcher::Template(TemplateId::Void)), Failure::Status(500), None);
    let meta = cache(CacheConfig::default()).get(&endpoint(&fixture)).await;
    assert_eq!(meta.provenance(), Provenance::Probed);
}

#[tokio::test]
async fn rejected_aggregates_retry_as_distinct() {
    let fixture = FixtureEndpoint::start().await.unwrap();
    let data = people();
    data.register_probes(&fixture).unwrap();
    for id in [TemplateId::ProbeClasses, TemplateId::ProbePredicates] {
        fixture.inject_failure(Some(Matcher::Template(id)), Failure::Status(400), None);
    }
    let meta = cache(CacheConfig::default()).get(&endpoint(&fixture)).await;
    let schema = meta.schema.as_ref().unwrap();
    assert_eq!(schema.classes.keys().cloned().collect::<BTreeSet<_>>(), data.classes());
    assert_eq!(schema.global_predicates.keys().cloned().collect::<BTreeSet<_>>(), data.predicates());
    assert!(schema.global_predicates.values().all(|n| *n == 0));
    // void + examples + 2 aggregate + 2 distinct
    assert_eq!(fixture.request_count(), 6);
}

#[tokio::test]
async fn total_failure_is_cached_as_failed() {
    let fixture = FixtureEndpoint::start().await.unwrap();
    fixture.inject_failure(None, Failure::Status(503), None);
    let cache = cache(CacheConfig::default());
    let ep = endpoint(&fixture);
    let meta = cache.get(&ep).await;
    assert!(meta.is_failed());
    assert!(meta.error.as_deref().unwrap().contains("503"));
    assert!(meta.examples_error.is_some());
    assert_eq!(cache.state(&fixture.url()), CacheState::Failed);
    let before = fixture.request_count();
    cache.get(&ep).await;
    assert_eq!(fixture.request_count(), before, "failures are cached for the failure TTL");
    let status = cache.status(&fixture.url());
    assert_eq!(status.provenance, Provenance::None);
    assert!(status.error.is_some());
}

#[tokio::test]
async fn examples_failure_does_not_poison_schema() {
    let fixture = FixtureEndpoint::start().await.unwrap();
    fixture.register_template(TemplateId::Void, &taxon_void()).unwrap();
    fixture.inject_failure(Some(Matcher::Template(TemplateId::Examples)), Failure::Status(500), None);
    let meta = cache(CacheConfig::default()).get(&endpoint(&fixture)).await;
    assert_eq!(meta.provenance(), Provenance::Void);
    assert!(meta.examples.is_empty());
    assert!(meta.examples_error.is_some());
}

#[tokio::test]
async fn request_bound_within_one_ttl_window() {
    let fixture = FixtureEndpoint::start().await.unwrap();
    people().register_probes(&fixture).unwrap();
    let cache = cache(CacheConfig::default());
    let ep = endpoint(&fixture);
    for _ in 0..20 {
        cache.get(&ep).await;
    }
    // void + examples + two probes
    assert_eq!(fixture.request_count(), 4);
}

#[tokio::test]
async fn per_endpoint_template_override() {
    let custom = "SELECT ?subjectClass ?prop WHERE { ?x ?y ?z }";
    let fixture = FixtureEndpoint::with_templates(QueryTemplates::default().with_override(TemplateId::Void, custom))
        .await
        .unwrap();
    fixture.register_template(TemplateId::Void, &taxon_void()).unwrap();
    let mut config = CacheConfig::default();
    config.endpoint_templates.insert(fixture.url(), QueryTemplates::default().with_override(TemplateId::Void, custom));
    let meta = cache(config).get(&endpoint(&fixture)).await;
    assert_eq!(meta.provenance(), Provenance::Void);
    assert!(fixture.requests().iter().any(|r| r.query == custom));
}

#[tokio::test]
async fn status_counts() {
    let fixture = FixtureEndpoint::taxon().await.unwrap();
    let cache = cache(CacheConfig::default());
    assert_eq!(cache.status(&fixture.url()).state, CacheState::Absent);
    cache.get(&endpoint(&fixture)).await;
    let status = cache.status(&fixture.url());
    assert_eq!((status.counts.classes, status.counts.predicates, status.counts.examples), (1, 2, 5));
    assert!(status.fetched_at.is_some());
    let json = serde_json::to_value(&status).unwrap();
    assert_eq!(json["state"], "fresh");
    assert_eq!(json["provenance"], "void");
    assert!(json.get("fetchedAt").is_some());
    assert!(json.get("error").is_none());
}

fn random_dataset() -> impl proptest::strategy::Strategy<Value = Dataset> {
    use proptest::prelude::*;
    let typed = prop::collection::vec((0..12u8, 0..5u8), 0..20);
    let plain = prop::collection::vec((0..12u8, 0..6u8, 0..12u8, any::<bool>()), 0..30);
    (typed, plain).prop_map(|(typed, plain)| {
        let mut d = Dataset::new();
        for (s, c) in typed {
            d.add_type(&format!("http://ex/s{s}"), &format!("http://ex/C{c}"));
        }
        for (s, p, o, literal) in plain {
            let object = if literal { Object::string(format!("v{o}")) } else { Object::iri(format!("http://ex/s{o}")) };
            d.add(&format!("http://ex/s{s}"), &format!("http://ex/p{p}"), object);
        }
        d
    })
}

proptest::proptest! {
    #![proptest_config(proptest::test_runner::Config::with_cases(24))]

    #[test]
    fn probed_sets_equal_distinct_answers(data in random_dataset(), reject_aggregates in proptest::bool::ANY) {
        let runtime = tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap();
        runtime.block_on(async {
            let fixture = FixtureEndpoint::start().await.unwrap();
            data.register_probes(&fixture).unwrap();
            if reject_aggregates {
                for id in [TemplateId::ProbeClasses, TemplateId::ProbePredicates] {
                    fixture.inject_failure(Some(Matcher::Template(id)), Failure::Status(400), None);
                }
            }
            let meta = cache(CacheConfig::default()).get(&endpoint(&fixture)).await;
            if data.is_empty() {
                // nothing to probe: an empty schema is still a probed schema
                assert_eq!(meta.provenance(), Provenance::Probed);
            }
            let schema = meta.schema.as_ref().unwrap();
            assert_eq!(schema.classes.keys().cloned().collect::<BTreeSet<_>>(), data.classes());
            assert_eq!(schema.all_predicates().into_keys().collect::<BTreeSet<_>>(), data.predicates());
        });
    }
}
