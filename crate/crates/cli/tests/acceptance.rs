//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vodcap::capacity;
use vodcap::erlang::{erlang_b, ln_erlang_b, min_ports};
use vodcap::planner::{bundled_scenario, run_sweep, SweepResult};
use vodcap::popularity::{p_unpopular, psi_approx, psi_exact};
use vodcap::simulator::{run_sim, HoldingDist, RunLength, SimConfig};
use vodcap::{
    BlockingProb, CatalogModel, ClusterParams, OfferedLoad, PortCount, Seconds, ServiceProfile,
};

const ORACLE_REL_TOL: f64 = 1e-9;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(1);
const INVERSE_TIME_LIMIT: Duration = Duration::from_secs(5);
const SIM_TIME_LIMIT: Duration = Duration::from_secs(60);
const SIM_MIN_OFFERS: u64 = 100_000;
const SIM_SE_TOL: f64 = 3.0;
const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn load(a: f64) -> OfferedLoad {
    OfferedLoad::new(a).unwrap()
}

fn prob(p: f64) -> BlockingProb {
    BlockingProb::new(p).unwrap()
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Natural log of a positive big integer, accurate to f64 precision.
fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_ratio(r: &BigRational) -> f64 {
    ln_big(r.numer()) - ln_big(r.denom())
}

/// Exact `B(S, A)` for `S = 0..=max` by summing the defining series.
fn exact_blocking_table(a: &BigRational, max: u64) -> Vec<BigRational> {
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut out = vec![BigRational::one()];
    for n in 1..=max {
        term = term * a / BigRational::from_integer(BigInt::from(n));
        sum += &term;
        out.push(&term / &sum);
    }
    out
}

fn oracle_equivalence() -> Outcome {
    let grid = [(1, 10), (1, 1), (2, 1), (10, 1), (4333, 100), (100, 1)];
    let oracle: Vec<(f64, Vec<BigRational>)> = grid
        .iter()
        .map(|&(n, d)| (n as f64 / d as f64, exact_blocking_table(&ratio(n, d), 120)))
        .collect();

    let start = Instant::now();
    let computed: Vec<Vec<(f64, f64)>> = oracle
        .iter()
        .map(|(a, _)| {
            (0..=120u64)
                .map(|s| {
                    (
                        erlang_b(load(*a), PortCount(s)).value(),
                        ln_erlang_b(load(*a), PortCount(s)),
                    )
                })
                .collect()
        })
        .collect();
    let elapsed = start.elapsed();

    let mut worst = 0.0_f64;
    for ((_, exact), got) in oracle.iter().zip(&computed) {
        for (b, &(linear, ln)) in exact.iter().zip(got) {
            let ln_exact = ln_ratio(b);
            worst = worst.max((ln - ln_exact).abs());
            let e = b.to_f64().unwrap();
            if e >= f64::MIN_POSITIVE {
                worst = worst.max((linear - e).abs() / e);
            }
        }
    }
    outcome(
        worst <= ORACLE_REL_TOL && elapsed < ORACLE_TIME_LIMIT,
        format!(
            "max relative error {worst:.2e} <= {ORACLE_REL_TOL:e} over 6 loads x 121 port counts; {:.1} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn fixed_points() -> Outcome {
    let two = ratio(2, 1);
    let exact = exact_blocking_table(&two, 3);
    let ok_rational = exact[2] == ratio(2, 5) && exact[3] == ratio(4, 19);
    let b22 = erlang_b(load(2.0), PortCount(2)).value();
    let b23 = erlang_b(load(2.0), PortCount(3)).value();
    let ok = ok_rational && b22 == exact[2].to_f64().unwrap() && b23 == exact[3].to_f64().unwrap();
    outcome(
        ok,
        format!("B(2,2)={b22}, B(2,3)={b23}, nearest doubles of 2/5 and 4/19"),
    )
}

fn inverse_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let mut bad = 0;
    for _ in 0..1000 {
        let a = rng.random_range(0.0..=200.0);
        let p = rng.random_range(0.001..=0.5);
        let s = min_ports(load(a), prob(p)).unwrap().0;
        let meets = erlang_b(load(a), PortCount(s)).value() <= p;
        let tight = s == 0 || erlang_b(load(a), PortCount(s - 1)).value() > p;
        if !(meets && tight) {
            bad += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad == 0 && elapsed < INVERSE_TIME_LIMIT,
        format!(
            "{bad}/1000 violations; {:.1} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn random_cluster(rng: &mut ChaCha8Rng) -> ClusterParams {
    ClusterParams {
        clusters: rng.random_range(1..=250),
        households: rng.random_range(1..=1000),
        penetration: rng.random_range(0.01..=1.0),
        normal_rate: rng.random_range(0.0..=5.0),
        interactive_rate: rng.random_range(0.0..=10.0),
        normal_hold: Seconds(rng.random_range(0.0..=7200.0)),
        interactive_hold: Seconds(rng.random_range(0.0..=30.0)),
        peak_period: Seconds(rng.random_range(3600.0..=36_000.0)),
        multicast_factor: rng.random_range(1.0..=20.0),
    }
}

fn conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut bad = 0;
    for _ in 0..1000 {
        let cp = random_cluster(&mut rng);
        let n = rng.random_range(1..=5000);
        let catalog =
            CatalogModel::new(n, rng.random_range(1..=n), rng.random_range(0.01..0.99)).unwrap();
        let base = capacity::cluster_base_load(&cp).unwrap().erlangs();
        let d = capacity::provision_distributed(&cp, &catalog, &ServiceProfile::sd(), prob(0.05))
            .unwrap();
        let ok = d.local_load.erlangs() + d.central_load.erlangs() == base
            && d.total_bandwidth == cp.clusters as f64 * d.cluster_bandwidth
            && psi_approx(&catalog).unwrap() + p_unpopular(&catalog).unwrap() == 1.0;
        if !ok {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("{bad}/1000 scenarios break M_L+M_CL=B, TW=x*TW_LC or psi+P_un=1"),
    )
}

fn trunking() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut bad = 0;
    for _ in 0..200 {
        let clusters = rng.random_range(2..=100);
        let target = prob(rng.random_range(0.001..=0.5));
        let per_cluster: Vec<f64> = (0..clusters)
            .map(|_| {
                let cp = ClusterParams {
                    clusters: 1,
                    ..random_cluster(&mut rng)
                };
                capacity::centralized_load(&cp).unwrap().erlangs()
            })
            .collect();
        let total: f64 = per_cluster.iter().sum();
        let pooled = min_ports(load(total), target).unwrap().0;
        let fragmented: u64 = per_cluster
            .iter()
            .map(|&a| min_ports(load(a), target).unwrap().0)
            .sum();
        if pooled > fragmented {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("{bad}/200 scenarios where pooled ports exceed fragmented ports"),
    )
}

fn simulate_single(a: f64, s: u64, holding: HoldingDist, seed: u64) -> (f64, f64, u64, Duration) {
    let mut cfg = SimConfig::single_pool(
        load(a),
        PortCount(s),
        Seconds(100.0),
        RunLength::Offers(150_000),
    );
    cfg.holding = holding;
    cfg.seed = seed;
    let start = Instant::now();
    let r = run_sim(&cfg).unwrap();
    let p = &r.pools[0];
    (
        p.blocking_fraction,
        p.standard_error,
        p.offered,
        start.elapsed(),
    )
}

fn sim_vs_erlang_b() -> Outcome {
    let s43 = min_ports(load(43.33), prob(0.05)).unwrap().0;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (a, s)) in [(2.0, 2), (10.0, 14), (43.33, s43)].into_iter().enumerate() {
        let (measured, se, offered, took) =
            simulate_single(a, s, HoldingDist::Exponential, SEED + 10 + i as u64);
        let b = erlang_b(load(a), PortCount(s)).value();
        let z = (measured - b).abs() / se;
        ok &= z <= SIM_SE_TOL && offered >= SIM_MIN_OFFERS && took < SIM_TIME_LIMIT;
        parts.push(format!(
            "(A={a}, S={s}) {measured:.4} vs {b:.4}, {z:.2} SE, {offered} offers"
        ));
    }
    outcome(ok, parts.join("; "))
}

fn insensitivity() -> Outcome {
    let (be, se_e, _, _) = simulate_single(10.0, 14, HoldingDist::Exponential, SEED + 20);
    let (bd, se_d, _, _) = simulate_single(10.0, 14, HoldingDist::Deterministic, SEED + 21);
    let combined = (se_e * se_e + se_d * se_d).sqrt();
    let z = (be - bd).abs() / combined;
    outcome(
        z <= SIM_SE_TOL,
        format!(
            "exponential {be:.4} vs deterministic {bd:.4}: {z:.2} combined SE (limit {SIM_SE_TOL})"
        ),
    )
}

fn centralized_rows(
    result: &SweepResult,
) -> Vec<(u64, f64, String, capacity::CentralizedProvision)> {
    result
        .rows
        .iter()
        .map(|r| {
            let c = r.outcome.as_ref().unwrap().centralized.unwrap();
            (
                r.cluster.clusters,
                r.cluster.interactive_rate,
                r.service.clone(),
                c,
            )
        })
        .collect()
}

fn trends() -> Outcome {
    let scenario = bundled_scenario("sec4-centralized").unwrap().unwrap();
    let result = run_sweep(&scenario, false, 4).unwrap();
    let rows = centralized_rows(&result);
    let mut ok = result.failures().count() == 0;

    let mut w_ch_ok = true;
    for svc in ["SD", "HD"] {
        for li in [4.0, 6.0, 8.0] {
            let series: Vec<_> = rows.iter().filter(|r| r.2 == svc && r.1 == li).collect();
            w_ch_ok &= series.len() == 6;
            w_ch_ok &= series
                .windows(2)
                .all(|w| w[0].0 < w[1].0 && w[1].3.per_household <= w[0].3.per_household);
        }
    }

    let mut ratio_ok = true;
    for sd in rows.iter().filter(|r| r.2 == "SD") {
        let hd = rows
            .iter()
            .find(|r| r.2 == "HD" && r.0 == sd.0 && r.1 == sd.1)
            .unwrap();
        ratio_ok &= hd.3.ports == sd.3.ports && 3.0 * hd.3.bandwidth == 8.0 * sd.3.bandwidth;
    }

    let mut li_ok = true;
    for svc in ["SD", "HD"] {
        for x in [40, 50, 60, 70, 80, 90] {
            let series: Vec<_> = rows.iter().filter(|r| r.2 == svc && r.0 == x).collect();
            li_ok &= series.len() == 3;
            li_ok &= series
                .windows(2)
                .all(|w| w[0].1 < w[1].1 && w[1].3.bandwidth >= w[0].3.bandwidth);
        }
    }
    ok &= w_ch_ok && ratio_ok && li_ok;
    outcome(
        ok,
        format!(
            "W_ch non-increasing in x: {w_ch_ok}; W_c(8 Mb/s) = 8/3 W_c(3 Mb/s): {ratio_ok}; W_c non-decreasing in lambda_i: {li_ok}"
        ),
    )
}

fn zipf_sanity() -> Outcome {
    let mut ok = true;
    for n in [1, 10, 1000] {
        let c = CatalogModel::new(n, n, 0.8).unwrap();
        let e = psi_exact(&c).unwrap();
        ok &= e == 1.0 && e - psi_approx(&c).unwrap() == 0.0;
    }
    let mut prev = (0.0, 0.0);
    let mut monotone = true;
    for k in 1..=1000 {
        let c = CatalogModel::new(1000, k, 0.8).unwrap();
        let now = (psi_exact(&c).unwrap(), psi_approx(&c).unwrap());
        monotone &= now.0 >= prev.0 && now.1 >= prev.1;
        prev = now;
    }
    outcome(
        ok && monotone,
        format!("psi_exact(k=N)=1 and zero error at k=N: {ok}; monotone in k (N=1000, alpha=0.8): {monotone}"),
    )
}

fn run_cli(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_vodcap"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let (a, b) = (path("a.csv"), path("b.csv"));
    let base = [
        "simulate",
        "--builtin",
        "sec4-distributed",
        "--seed",
        "77",
        "--workers",
        "4",
    ];
    let (code_a, err_a) = run_cli(&[&base[..], &["--out", &a]].concat());
    let (code_b, _) = run_cli(&[&base[..], &["--out", &b]].concat());
    let bytes_a = std::fs::read(&a).unwrap_or_default();
    let bytes_b = std::fs::read(&b).unwrap_or_default();
    let ok = code_a == Some(0) && code_b == Some(0) && !bytes_a.is_empty() && bytes_a == bytes_b;
    outcome(
        ok,
        format!(
            "exit codes {code_a:?}/{code_b:?}, {} bytes, identical: {}{}",
            bytes_a.len(),
            bytes_a == bytes_b,
            if err_a.is_empty() {
                String::new()
            } else {
                format!("; stderr: {}", err_a.trim())
            }
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("erlang-b oracle equivalence", oracle_equivalence),
        ("erlang fixed points", fixed_points),
        ("inverse consistency", inverse_consistency),
        ("conservation identities", conservation),
        ("trunking efficiency", trunking),
        ("simulation vs erlang-b", sim_vs_erlang_b),
        ("holding-time insensitivity", insensitivity),
        ("trend reproduction", trends),
        ("zipf sanity", zipf_sanity),
        ("simulate determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!(
            "[{}] {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
