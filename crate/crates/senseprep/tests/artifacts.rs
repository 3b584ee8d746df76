use senseprep::artifacts::{to_json, DiscretizationDoc, StaticNetworkDoc, TransitionNetworkDoc};
use senseprep_core::bayesnet::{learn_static, learn_transition};
use senseprep_core::ingest::{discretize, fit_discretization, synth_generate, SynthProfile};

#[test]
fn networks_survive_json() {
    let data = synth_generate(5, 300, 6, &SynthProfile::from_name("copy-child").unwrap()).unwrap();
    let ids = data.node_ids().to_vec();
    let scheme = fit_discretization(&data, 3).unwrap();
    let states = [discretize(&data, &scheme).unwrap()];
    let net = learn_static(&states, 3).unwrap();
    let tn = learn_transition(&states, 3).unwrap();

    let doc: DiscretizationDoc = serde_json::from_slice(&to_json(&DiscretizationDoc::new(&scheme, &ids)).unwrap()).unwrap();
    assert_eq!(doc.scheme().unwrap(), scheme);
    let doc: StaticNetworkDoc = serde_json::from_slice(&to_json(&StaticNetworkDoc::new(&net, &ids, -1.0, -2.0)).unwrap()).unwrap();
    assert_eq!(doc.network().unwrap(), net);
    let doc: TransitionNetworkDoc = serde_json::from_slice(&to_json(&TransitionNetworkDoc::new(&tn, &ids)).unwrap()).unwrap();
    assert_eq!(doc.network().unwrap(), tn);
}

#[test]
fn corrupted_table_is_rejected() {
    let data = synth_generate(5, 100, 3, &SynthProfile::from_name("copy-child").unwrap()).unwrap();
    let ids = data.node_ids().to_vec();
    let scheme = fit_discretization(&data, 2).unwrap();
    let net = learn_static(&[discretize(&data, &scheme).unwrap()], 2).unwrap();
    let mut doc = StaticNetworkDoc::new(&net, &ids, 0.0, 0.0);
    doc.cpts[0].table[0] += 0.5;
    assert!(doc.network().is_err());
    let mut doc = StaticNetworkDoc::new(&net, &ids, 0.0, 0.0);
    doc.parents[0] = vec![0];
    assert!(doc.network().is_err());
}
