use proptest::prelude::*;
use ssthreshless::cc::ControllerSpec;
use ssthreshless::experiment::{write_trace, FlowConfig};
use ssthreshless::tcp::Phase;
use ssthreshless::traffic::UdpCbrSource;
use ssthreshless::{run_scenario, ScenarioConfig, ScenarioOutcome};

fn controller() -> impl Strategy<Value = ControllerSpec> {
    prop_oneof![
        (2.0f64..1000.0).prop_map(ControllerSpec::slowstart),
        (1.0f64..30.0).prop_map(ControllerSpec::ssthreshless),
        Just(ControllerSpec::lss()),
        Just(ControllerSpec::vegas()),
        Just(ControllerSpec::hoe()),
    ]
}

prop_compose! {
    fn scenario()(
        flows in prop::collection::vec((controller(), 0.0f64..0.5, 0.0f64..0.2), 1..4),
        bw_mbps in 5.0f64..80.0,
        delay_ms in 5.0f64..60.0,
        buffer in 5usize..300,
        udp in prop::option::of(1.0f64..20.0),
        seed in any::<u64>(),
    ) -> ScenarioConfig {
        let flows = flows
            .into_iter()
            .map(|(c, start, jitter)| {
                let mut f = FlowConfig::new(c).starting_at(start);
                f.start_jitter_s = jitter;
                f
            })
            .collect();
        let mut cfg = ScenarioConfig::new("prop", 1.5, flows);
        cfg.seed = seed;
        cfg.topology.bottleneck_bw_bps = bw_mbps * 1e6;
        cfg.topology.bottleneck_delay_s = delay_ms / 1000.0;
        cfg.topology.buffer_pkts = buffer;
        cfg.cross_traffic = udp.map(|r| UdpCbrSource::new(r * 1e6, 1000, 0.2, 1.0));
        cfg.measurement.windows = vec![[0.0, 1.5], [0.5, 1.0]];
        cfg
    }
}

fn check_invariants<T: ssthreshless::Scalar>(
    cfg: &ScenarioConfig,
    o: &ScenarioOutcome<T>,
) -> Result<(), TestCaseError> {
    prop_assert!(o.conservation.is_balanced(), "{:?}", o.conservation);
    for r in &o.traces {
        prop_assert!(r.cwnd >= 1.0, "cwnd below one packet: {r:?}");
        prop_assert!(r.highest_acked <= r.highest_seq_sent, "{r:?}");
        prop_assert!(r.queue_pkts <= cfg.topology.buffer_pkts as u64, "{r:?}");
    }
    let n = cfg.flows.len() as f64;
    for rep in &o.reports {
        prop_assert!(rep.link_utilization <= 1.0 + 1e-9, "{rep:?}");
        prop_assert!(
            rep.jain_fairness >= 1.0 / n - 1e-9 && rep.jain_fairness <= 1.0 + 1e-9,
            "{rep:?}"
        );
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_scenarios_hold_invariants(cfg in scenario()) {
        let o = run_scenario::<f64>(&cfg).unwrap();
        check_invariants(&cfg, &o)?;
    }

    #[test]
    fn single_precision_runs_hold_invariants(cfg in scenario()) {
        let o = run_scenario::<f32>(&cfg).unwrap();
        check_invariants(&cfg, &o)?;
    }

    #[test]
    fn same_seed_same_trace(cfg in scenario()) {
        let bytes = |o: &ScenarioOutcome<f64>| {
            let mut v = Vec::new();
            write_trace(&o.traces, &mut v).unwrap();
            v
        };
        let a = run_scenario::<f64>(&cfg).unwrap();
        let b = run_scenario::<f64>(&cfg).unwrap();
        prop_assert_eq!(bytes(&a), bytes(&b));
        prop_assert_eq!(a.drops.len(), b.drops.len());
    }

    #[test]
    fn sequence_progress_is_monotone(cfg in scenario()) {
        let o = run_scenario::<f64>(&cfg).unwrap();
        for f in 0..cfg.flows.len() {
            let rows: Vec<_> = o.traces.iter().filter(|r| r.flow_id == f).collect();
            for w in rows.windows(2) {
                prop_assert!(w[1].time_s >= w[0].time_s);
                prop_assert!(w[1].highest_seq_sent >= w[0].highest_seq_sent);
                prop_assert!(w[1].highest_acked >= w[0].highest_acked);
            }
        }
    }
}

#[test]
fn lone_flow_on_a_deep_buffer_never_loses() {
    // A buffer larger than the whole transfer cannot overflow.
    let mut f = FlowConfig::new(ControllerSpec::slowstart(f64::INFINITY));
    f.max_packets = Some(2000);
    let mut cfg = ScenarioConfig::new("deep", 5.0, vec![f]);
    cfg.topology.buffer_pkts = 5000;
    let o = run_scenario::<f64>(&cfg).unwrap();
    assert!(o.drops.is_empty());
    assert!(o.flows[0].losses.is_empty());
    assert!(o.traces.iter().all(|r| r.phase == Phase::Startup));
    assert_eq!(o.traces.last().unwrap().highest_acked, 2000);
}
