//! Built-in invariant and oracle checks, run by `vodcap validate`.
//!
//! The Erlang-B reference here is a direct summation of the defining series
//! in the log domain, independent of the recurrence used by [`crate::erlang`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::{self, ClusterParams};
use crate::erlang::{self, BlockingProb, OfferedLoad, PortCount};
use crate::popularity::{self, CatalogModel};
use crate::simulator::{self, RunLength, SimConfig};
use crate::units::Seconds;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// `ln B(S, A)` from `ln(A^S/S!) - ln(sum_{n<=S} A^n/n!)`.
pub fn ln_erlang_b_by_summation(a: f64, s: u64) -> f64 {
    if s == 0 {
        return 0.0;
    }
    if a == 0.0 {
        return f64::NEG_INFINITY;
    }
    let ln_a = a.ln();
    let mut ln_fact = 0.0;
    let mut terms = Vec::with_capacity(s as usize + 1);
    for n in 0..=s {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        terms.push(n as f64 * ln_a - ln_fact);
    }
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_sum = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
    terms[s as usize] - ln_sum
}

pub const ORACLE_LOADS: [f64; 6] = [0.1, 1.0, 2.0, 10.0, 43.33, 100.0];

fn check_fixed_points() -> CheckResult {
    let b22 = erlang::erlang_b(OfferedLoad::new(2.0).unwrap(), PortCount(2)).value();
    let b23 = erlang::erlang_b(OfferedLoad::new(2.0).unwrap(), PortCount(3)).value();
    let ok = (b22 - 0.4).abs() <= 1e-15 && (b23 - 4.0 / 19.0).abs() <= 1e-15;
    CheckResult::new(
        "erlang fixed points",
        ok,
        format!("B(2,2)={b22}, B(2,3)={b23} (4/19={})", 4.0 / 19.0),
    )
}

fn check_recurrence_vs_summation() -> CheckResult {
    let mut worst = 0.0_f64;
    for &a in &ORACLE_LOADS {
        let load = OfferedLoad::new(a).unwrap();
        for s in 0..=120u64 {
            let oracle = ln_erlang_b_by_summation(a, s);
            // log-domain difference is the relative error of B
            let rel = (erlang::ln_erlang_b(load, PortCount(s)) - oracle).abs();
            worst = worst.max(rel);
            let exact = oracle.exp();
            if exact >= f64::MIN_POSITIVE {
                let b = erlang::erlang_b(load, PortCount(s)).value();
                worst = worst.max((b - exact).abs() / exact);
            }
        }
    }
    CheckResult::new(
        "erlang recurrence vs direct summation",
        worst <= 1e-9,
        format!("max relative error {worst:.3e} (limit 1e-9)"),
    )
}

fn check_inverse(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut bad = 0;
    for _ in 0..1000 {
        let a = rng.random_range(0.0..200.0);
        let p = rng.random_range(0.001..0.5);
        let load = OfferedLoad::new(a).unwrap();
        let s = erlang::min_ports(load, BlockingProb::new(p).unwrap()).unwrap();
        let at = erlang::erlang_b(load, s).value() <= p;
        let below = s.0 == 0 || erlang::erlang_b(load, PortCount(s.0 - 1)).value() > p;
        if !(at && below) {
            bad += 1;
        }
    }
    CheckResult::new(
        "min_ports inverse consistency",
        bad == 0,
        format!("{bad}/1000 violations"),
    )
}

fn random_cluster(rng: &mut ChaCha8Rng) -> ClusterParams {
    ClusterParams {
        clusters: rng.random_range(1..=200),
        households: rng.random_range(1..=2000),
        penetration: rng.random_range(0.01..=1.0),
        normal_rate: rng.random_range(0.0..6.0),
        interactive_rate: rng.random_range(0.0..8.0),
        normal_hold: Seconds(rng.random_range(0.0..7200.0)),
        interactive_hold: Seconds(rng.random_range(0.0..20.0)),
        peak_period: Seconds(rng.random_range(600.0..36_000.0)),
        multicast_factor: rng.random_range(1.0..20.0),
    }
}

fn random_catalog(rng: &mut ChaCha8Rng) -> CatalogModel {
    let n = rng.random_range(1..=5000);
    let k = rng.random_range(1..=n);
    CatalogModel::new(n, k, rng.random_range(0.01..0.99)).unwrap()
}

fn check_conservation(rng: &mut ChaCha8Rng) -> CheckResult {
    let target = BlockingProb::new(0.05).unwrap();
    let svc = crate::capacity::ServiceProfile::sd();
    let mut bad = 0;
    for _ in 0..1000 {
        let cp = random_cluster(rng);
        let cat = random_catalog(rng);
        let base = capacity::cluster_base_load(&cp).unwrap().erlangs();
        let (ml, mcl) = capacity::distributed_loads(&cp, &cat).unwrap();
        let d = capacity::provision_distributed(&cp, &cat, &svc, target).unwrap();
        let psi = popularity::psi_approx(&cat).unwrap();
        let pun = popularity::p_unpopular(&cat).unwrap();
        let ok = ml.erlangs() + mcl.erlangs() == base
            && d.total_bandwidth == cp.clusters as f64 * d.cluster_bandwidth
            && psi + pun == 1.0;
        if !ok {
            bad += 1;
        }
    }
    CheckResult::new(
        "conservation identities",
        bad == 0,
        format!("{bad}/1000 violations"),
    )
}

fn check_pooling(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut bad = 0;
    for _ in 0..200 {
        let clusters = rng.random_range(2..=40);
        let target = BlockingProb::new(rng.random_range(0.001..0.3)).unwrap();
        let loads: Vec<f64> = (0..clusters).map(|_| rng.random_range(0.0..50.0)).collect();
        let total: f64 = loads.iter().sum();
        let pooled = erlang::min_ports(OfferedLoad::new(total).unwrap(), target).unwrap();
        let split: u64 = loads
            .iter()
            .map(|&a| {
                erlang::min_ports(OfferedLoad::new(a).unwrap(), target)
                    .unwrap()
                    .0
            })
            .sum();
        if pooled.0 > split {
            bad += 1;
        }
    }
    CheckResult::new(
        "pooled ports <= fragmented ports",
        bad == 0,
        format!("{bad}/200 violations"),
    )
}

fn check_zipf() -> (CheckResult, Vec<String>) {
    let mut ok = true;
    for n in [1u64, 10, 1000] {
        let c = CatalogModel::new(n, n, 0.8).unwrap();
        ok &= popularity::psi_exact(&c).unwrap() == 1.0;
        ok &= popularity::psi_approx(&c).unwrap() == 1.0;
    }
    let (mut prev_e, mut prev_a) = (0.0, 0.0);
    for k in 1..=1000 {
        let c = CatalogModel::new(1000, k, 0.8).unwrap();
        let e = popularity::psi_exact(&c).unwrap();
        let a = popularity::psi_approx(&c).unwrap();
        ok &= e >= prev_e && a >= prev_a;
        prev_e = e;
        prev_a = a;
    }
    let mut table = Vec::new();
    for n in [100u64, 1000, 10_000] {
        for alpha in [0.3, 0.5, 0.7, 0.9] {
            let err = popularity::max_approximation_error(n, alpha).unwrap();
            table.push(format!(
                "N={n:<6} alpha={alpha:<4} max|psi_exact-psi_approx|={err:.5}"
            ));
        }
    }
    (
        CheckResult::new(
            "zipf normalisation and monotonicity",
            ok,
            "k=N gives 1; monotone in k at N=1000, alpha=0.8",
        ),
        table,
    )
}

fn check_simulation(seed: u64) -> CheckResult {
    let a = OfferedLoad::new(2.0).unwrap();
    let mut cfg =
        SimConfig::single_pool(a, PortCount(2), Seconds(60.0), RunLength::Offers(110_000));
    cfg.seed = seed;
    match simulator::run_sim(&cfg) {
        Ok(r) => {
            let p = &r.pools[0];
            let ok = (p.blocking_fraction - 0.4).abs() <= 3.0 * p.standard_error;
            CheckResult::new(
                "simulated B(2,2) within 3 SE of 0.4",
                ok,
                format!(
                    "measured {:.5} +/- {:.5} over {} offers",
                    p.blocking_fraction, p.standard_error, p.offered
                ),
            )
        }
        Err(e) => CheckResult::new("simulated B(2,2) within 3 SE of 0.4", false, e.to_string()),
    }
}

/// Output of [`run_all`].
#[derive(Debug, Clone)]
pub struct ValidationSummary {
    pub checks: Vec<CheckResult>,
    /// Zipf approximation-quality table, one line per `(N, alpha)`.
    pub zipf_table: Vec<String>,
}

impl ValidationSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Run every check; random cases are drawn from `seed`.
pub fn run_all(seed: u64, with_sim: bool) -> ValidationSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = vec![
        check_fixed_points(),
        check_recurrence_vs_summation(),
        check_inverse(&mut rng),
        check_conservation(&mut rng),
        check_pooling(&mut rng),
    ];
    let (zipf, zipf_table) = check_zipf();
    checks.push(zipf);
    if with_sim {
        checks.push(check_simulation(seed));
    }
    ValidationSummary { checks, zipf_table }
}
