use proptest::prelude::*;
use vodcap::capacity::{
    centralized_load, cluster_base_load, distributed_loads, inbound_bandwidth,
    provision_centralized, provision_distributed,
};
use vodcap::erlang::min_ports;
use vodcap::popularity::{p_unpopular, psi_approx};
use vodcap::{
    BitRate, BlockingProb, CapacityError, CatalogModel, ClusterParams, MessageSizes, OfferedLoad,
    Seconds, ServiceProfile,
};

/// Base parameters of the bundled centralized and distributed scenarios.
fn base() -> ClusterParams {
    ClusterParams {
        clusters: 40,
        households: 600,
        penetration: 1.0,
        normal_rate: 2.5,
        interactive_rate: 4.0,
        normal_hold: Seconds(120.0),
        interactive_hold: Seconds(6.0),
        peak_period: Seconds::from_hours(7.0),
        multicast_factor: 1.0,
    }
}

fn catalog() -> CatalogModel {
    CatalogModel::new(1000, 50, 0.7).unwrap()
}

fn target() -> BlockingProb {
    BlockingProb::new(0.05).unwrap()
}

#[test]
fn frozen_distributed_fixture() {
    let d = provision_distributed(&base(), &catalog(), &ServiceProfile::sd(), target()).unwrap();
    assert_eq!((d.local_ports.0, d.central_ports.0), (7, 9));
    assert!((d.local_load.erlangs() + d.central_load.erlangs() - 54.0 / 7.0).abs() < 1e-12);
    assert_eq!(d.cluster_bandwidth, 16.0 * 3e6);
    assert_eq!(d.total_bandwidth, 40.0 * d.cluster_bandwidth);
}

#[test]
fn frozen_centralized_fixture() {
    let c = provision_centralized(&base(), &ServiceProfile::sd(), target()).unwrap();
    assert!((c.load.erlangs() - 40.0 * 54.0 / 7.0).abs() < 1e-9);
    assert_eq!(c.ports.0, 306);
    assert_eq!(c.bandwidth, 306.0 * 3e6);
    assert_eq!(c.per_household, 306.0 * 3e6 / 24_000.0);
}

#[test]
fn hd_is_eight_thirds_of_sd() {
    let sd = provision_centralized(&base(), &ServiceProfile::sd(), target()).unwrap();
    let hd = provision_centralized(&base(), &ServiceProfile::hd(), target()).unwrap();
    assert_eq!(sd.ports, hd.ports);
    assert!((hd.bandwidth / sd.bandwidth - 8.0 / 3.0).abs() < 1e-15);
}

#[test]
fn interactive_rate_override_prices_ports_at_max() {
    let mut svc = ServiceProfile::sd();
    svc.interactive_stream_rate = Some(BitRate::mbps(5.0));
    let c = provision_centralized(&base(), &svc, target()).unwrap();
    assert_eq!(c.bandwidth, c.ports.0 as f64 * 5e6);
}

#[test]
fn invalid_multicast_factor_names_field() {
    let mut cp = base();
    cp.multicast_factor = 0.0;
    match centralized_load(&cp) {
        Err(CapacityError::Cluster { field, .. }) => assert_eq!(field, "multicast_factor"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn inbound_fixture() {
    let w = inbound_bandwidth(
        &base(),
        &MessageSizes {
            normal_bits: 400,
            interactive_bits: 200,
        },
    )
    .unwrap();
    assert!((w - 24_000.0 * (2.5 * 400.0 + 4.0 * 200.0) / 25_200.0).abs() < 1e-9);
}

#[test]
fn per_household_bandwidth_falls_with_clusters() {
    let mut prev = f64::INFINITY;
    for x in [1, 5, 10, 40, 60, 90, 250] {
        let cp = ClusterParams {
            clusters: x,
            ..base()
        };
        let c = provision_centralized(&cp, &ServiceProfile::sd(), target()).unwrap();
        assert!(c.per_household <= prev, "x={x}");
        prev = c.per_household;
    }
}

fn cluster_strategy() -> impl Strategy<Value = ClusterParams> {
    (
        1u64..=50,
        1u64..=800,
        0.01f64..=1.0,
        0.0f64..4.0,
        0.0f64..8.0,
        0.0f64..3600.0,
        0.0f64..30.0,
        3600.0f64..36_000.0,
        1.0f64..20.0,
    )
        .prop_map(|(x, h, p, ln, li, tn, ti, t, z)| ClusterParams {
            clusters: x,
            households: h,
            penetration: p,
            normal_rate: ln,
            interactive_rate: li,
            normal_hold: Seconds(tn),
            interactive_hold: Seconds(ti),
            peak_period: Seconds(t),
            multicast_factor: z,
        })
}

fn catalog_strategy() -> impl Strategy<Value = CatalogModel> {
    (1u64..5000, 0.0f64..1.0, 0.01f64..0.99).prop_map(|(n, f, a)| {
        let k = ((n as f64 * f).ceil() as u64).clamp(1, n);
        CatalogModel::new(n, k, a).unwrap()
    })
}

proptest! {
    #[test]
    fn loads_split_exactly(cp in cluster_strategy(), cat in catalog_strategy()) {
        let base = cluster_base_load(&cp).unwrap().erlangs();
        let (ml, mcl) = distributed_loads(&cp, &cat).unwrap();
        prop_assert_eq!(ml.erlangs() + mcl.erlangs(), base);
        prop_assert_eq!(psi_approx(&cat).unwrap() + p_unpopular(&cat).unwrap(), 1.0);
        prop_assert!((mcl.erlangs() - base * p_unpopular(&cat).unwrap()).abs() <= 1e-12 * base.max(1.0));
    }

    #[test]
    fn total_is_clusters_times_cluster(cp in cluster_strategy(), cat in catalog_strategy()) {
        let d = provision_distributed(&cp, &cat, &ServiceProfile::hd(), target()).unwrap();
        prop_assert_eq!(d.total_bandwidth, cp.clusters as f64 * d.cluster_bandwidth);
        prop_assert_eq!(d.cluster_bandwidth, d.local_bandwidth + d.central_bandwidth);
    }

    #[test]
    fn central_pool_beats_fragmented(cp in cluster_strategy(), p in 0.001f64..0.3) {
        let t = BlockingProb::new(p).unwrap();
        let central = min_ports(centralized_load(&cp).unwrap(), t).unwrap().0;
        let one = min_ports(cluster_base_load(&cp).unwrap(), t).unwrap().0;
        prop_assert!(central <= cp.clusters * one);
    }

    #[test]
    fn ports_grow_with_interactive_rate(cp in cluster_strategy(), extra in 0.0f64..5.0) {
        let more = ClusterParams { interactive_rate: cp.interactive_rate + extra, ..cp };
        let a = provision_centralized(&cp, &ServiceProfile::sd(), target()).unwrap();
        let b = provision_centralized(&more, &ServiceProfile::sd(), target()).unwrap();
        prop_assert!(b.ports >= a.ports);
        prop_assert!(b.load.erlangs() >= a.load.erlangs());
    }

    #[test]
    fn load_is_linear_in_clusters(cp in cluster_strategy()) {
        let one = centralized_load(&ClusterParams { clusters: 1, ..cp }).unwrap().erlangs();
        let all = centralized_load(&cp).unwrap().erlangs();
        prop_assert!((all - cp.clusters as f64 * one).abs() <= 1e-9 * all.max(1.0));
        let _ = OfferedLoad::new(all).unwrap();
    }
}
