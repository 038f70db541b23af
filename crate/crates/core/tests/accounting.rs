use modadapt::drivers::{
    run_basic_ma, run_ma_tr, run_trust_region, BasicMaSettings, MaTrSettings, StoppingCriteria, TrustRegionSettings,
};
use modadapt::problem::catalog;

#[test]
fn trust_region_plant_probe_counts() {
    let stop = StoppingCriteria::default();
    for e in catalog() {
        let p = e.build();
        for trace in [
            run_ma_tr(&p, e.start, &MaTrSettings::default(), &stop).unwrap(),
            run_trust_region(&p, e.start, &TrustRegionSettings::default(), &stop).unwrap(),
        ] {
            let steps = trace.iterations() as u64;
            let accepted = trace.records.iter().filter(|r| r.accepted).count() as u64;
            assert_eq!(trace.plant_value_evaluations, 1 + steps, "{} {}", e.id, trace.algorithm);
            assert_eq!(trace.plant_gradient_evaluations, 1 + accepted, "{} {}", e.id, trace.algorithm);
        }
        // counters on the pair accumulate across both runs
        let total_values = p.plant().value_count();
        assert!(total_values >= 2);
    }
}

#[test]
fn basic_ma_probes_once_per_iterate() {
    let stop = StoppingCriteria::default();
    for e in catalog() {
        let p = e.build();
        let trace = run_basic_ma(&p, e.start, &BasicMaSettings::default(), &stop).unwrap();
        let n = trace.records.len() as u64;
        assert_eq!(trace.plant_value_evaluations, n, "{}", e.id);
        assert_eq!(trace.plant_gradient_evaluations, n, "{}", e.id);
    }
}

#[test]
fn plant_evaluation_cap_stops_the_run() {
    let e = &catalog()[2];
    let stop = StoppingCriteria {
        max_plant_evaluations: 25,
        ..Default::default()
    };
    let trace = run_ma_tr(&e.build(), e.start, &MaTrSettings::default(), &stop).unwrap();
    assert_eq!(trace.plant_value_evaluations, 25);
    assert_eq!(trace.iterations(), 24);
}

#[test]
fn traces_report_per_run_usage() {
    let e = &catalog()[0];
    let p = e.build();
    let stop = StoppingCriteria::default();
    let first = run_ma_tr(&p, e.start, &MaTrSettings::default(), &stop).unwrap();
    let second = run_ma_tr(&p, e.start, &MaTrSettings::default(), &stop).unwrap();
    assert_eq!(first.plant_value_evaluations, second.plant_value_evaluations);
    assert_eq!(p.plant().value_count(), 2 * first.plant_value_evaluations);
}
