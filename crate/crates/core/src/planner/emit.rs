//! CSV and plain-text report output for sweep results.
//!
//! All CSV values are in canonical units: Erlangs, ports, bits/s, seconds.

use std::fmt::Write as _;
use std::io;

use crate::capacity::Architecture;
use crate::planner::sweep::{FailureKind, RowValues, SweepResult, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Report,
}

/// Column families present in a result; fixed for a given scenario.
struct Layout {
    centralized: bool,
    distributed: bool,
    inbound: bool,
    sim: bool,
}

impl Layout {
    fn of(result: &SweepResult) -> Layout {
        let s = &result.scenario;
        Layout {
            centralized: s.architectures.contains(&Architecture::Centralized),
            distributed: s.architectures.contains(&Architecture::Distributed),
            inbound: s.messages.is_some(),
            sim: result.with_sim,
        }
    }
}

/// CSV header in output order.
pub fn csv_header(result: &SweepResult) -> Vec<String> {
    let l = Layout::of(result);
    let mut h: Vec<String> = vec!["point".into()];
    h.extend(
        result
            .scenario
            .sweep
            .iter()
            .map(|a| a.param.path().to_string()),
    );
    h.extend(["service", "r", "x", "h", "population", "P_B"].map(String::from));
    if l.centralized {
        h.extend(["M_c", "S_c", "W_c", "W_ch"].map(String::from));
    }
    if l.distributed {
        let w_ch = if l.centralized { "W_ch_dist" } else { "W_ch" };
        h.extend(
            [
                "P_un", "M_L", "M_CL", "S_L", "S_CL", "W_LL", "W_LC", "TW_LC", w_ch, "TW",
            ]
            .map(String::from),
        );
    }
    if l.inbound {
        h.push("W_oc".into());
    }
    if l.sim {
        if l.centralized {
            h.extend(["B_c", "sim_B_c", "sim_SE_c", "sim_ok_c"].map(String::from));
        }
        if l.distributed {
            h.extend(
                [
                    "B_L",
                    "sim_B_L",
                    "sim_SE_L",
                    "B_CL",
                    "sim_B_CL",
                    "sim_SE_CL",
                    "sim_ok_dist",
                ]
                .map(String::from),
            );
        }
    }
    h.push("error".into());
    h
}

fn values_cells(l: &Layout, v: &RowValues, out: &mut Vec<String>) {
    if l.centralized {
        let c = v.centralized.as_ref().expect("centralized result");
        out.push(c.load.erlangs().to_string());
        out.push(c.ports.0.to_string());
        out.push(c.bandwidth.to_string());
        out.push(c.per_household.to_string());
    }
    if l.distributed {
        let d = v.distributed.as_ref().expect("distributed result");
        out.push(d.unpopular_probability.to_string());
        out.push(d.local_load.erlangs().to_string());
        out.push(d.central_load.erlangs().to_string());
        out.push(d.local_ports.0.to_string());
        out.push(d.central_ports.0.to_string());
        out.push(d.local_bandwidth.to_string());
        out.push(d.central_bandwidth.to_string());
        out.push(d.cluster_bandwidth.to_string());
        out.push(d.per_household.to_string());
        out.push(d.total_bandwidth.to_string());
    }
    if l.inbound {
        out.push(v.inbound.expect("inbound result").to_string());
    }
    if l.sim {
        for s in &v.sim {
            for p in &s.pools {
                out.push(p.analytic_blocking.to_string());
                out.push(p.measured_blocking.to_string());
                out.push(p.standard_error.to_string());
            }
            out.push(s.meets_target().to_string());
        }
    }
}

fn row_cells(l: &Layout, width: usize, row: &SweepRow) -> Vec<String> {
    let mut out = vec![row.point.to_string()];
    out.extend(row.swept.iter().map(|v| v.to_string()));
    out.push(row.service.clone());
    out.push(row.port_rate.to_string());
    out.push(row.cluster.clusters.to_string());
    out.push(row.cluster.households.to_string());
    out.push(row.population().to_string());
    out.push(row.blocking_target.to_string());
    match &row.outcome {
        Ok(v) => {
            values_cells(l, v, &mut out);
            out.push(String::new());
        }
        Err(f) => {
            out.resize(width - 1, String::new());
            out.push(format!("{}: {}", failure_tag(f.kind), f.message));
        }
    }
    out
}

fn failure_tag(kind: FailureKind) -> &'static str {
    match kind {
        FailureKind::Infeasible => "infeasible",
        FailureKind::Invalid => "invalid",
        FailureKind::Simulation => "simulation",
    }
}

pub fn write_csv<W: io::Write>(result: &SweepResult, out: W) -> io::Result<()> {
    let header = csv_header(result);
    let layout = Layout::of(result);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(&header)?;
    for row in &result.rows {
        w.write_record(row_cells(&layout, header.len(), row))?;
    }
    w.flush()
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn human_rate(bps: f64) -> String {
    if bps >= 1e9 {
        format!("{:.3} Gb/s", bps / 1e9)
    } else if bps >= 1e6 {
        format!("{:.3} Mb/s", bps / 1e6)
    } else if bps >= 1e3 {
        format!("{:.3} kb/s", bps / 1e3)
    } else {
        format!("{bps:.3} b/s")
    }
}

/// Plain-text report: scenario echo, notes, one block per row.
pub fn to_report_string(result: &SweepResult) -> String {
    let s = &result.scenario;
    let mut r = String::new();
    let _ = writeln!(r, "VOD capacity plan: {}", s.name);
    if let Some(d) = &s.description {
        let _ = writeln!(r, "{d}");
    }
    let _ = writeln!(r, "\n== scenario ==");
    for line in s.to_toml().lines() {
        let _ = writeln!(r, "  {line}");
    }
    let _ = writeln!(r, "\n== notes ==");
    let _ = writeln!(
        r,
        "  Ports are the smallest Erlang-B pools meeting the blocking target; bandwidth = ports x per-port rate."
    );
    let _ = writeln!(
        r,
        "  Only normal (multicast) traffic is divided by the multicast factor; interactive streams are unicast."
    );
    if s.architectures.contains(&Architecture::Distributed) {
        let _ = writeln!(
            r,
            "  Distributed figures are per cluster except TW; the unpopular share uses 1 - (k/N)^(1-alpha)."
        );
    }
    if result.with_sim {
        let sim = &s.simulation;
        let _ = writeln!(
            r,
            "  Simulation: seed {}, {} replication(s), {:?} holding, pass if measured <= target + {} SE.",
            sim.seed, sim.replications, sim.holding, sim.tolerance_se
        );
    }

    let _ = writeln!(r, "\n== results ==");
    for row in &result.rows {
        let swept: Vec<String> = s
            .sweep
            .iter()
            .zip(&row.swept)
            .map(|(a, v)| format!("{}={}", a.param.path(), v))
            .collect();
        let _ = writeln!(
            r,
            "\n[point {}] {} {} | x={} h={} population={}",
            row.point,
            row.service,
            swept.join(" "),
            row.cluster.clusters,
            row.cluster.households,
            row.population()
        );
        match &row.outcome {
            Err(f) => {
                let _ = writeln!(r, "  FAILED ({}): {}", failure_tag(f.kind), f.message);
            }
            Ok(v) => {
                if let Some(c) = &v.centralized {
                    let _ = writeln!(
                        r,
                        "  centralized: M_c={:.4} Erl  S_c={}  W_c={}  W_ch={}",
                        c.load.erlangs(),
                        c.ports,
                        human_rate(c.bandwidth),
                        human_rate(c.per_household)
                    );
                }
                if let Some(d) = &v.distributed {
                    let _ = writeln!(
                        r,
                        "  distributed: P_un={:.4}  M_L={:.4}  M_CL={:.4}  S_L={}  S_CL={}",
                        d.unpopular_probability,
                        d.local_load.erlangs(),
                        d.central_load.erlangs(),
                        d.local_ports,
                        d.central_ports
                    );
                    let _ = writeln!(
                        r,
                        "               W_LL={}  W_LC={}  TW_LC={}  W_ch={}  TW={}",
                        human_rate(d.local_bandwidth),
                        human_rate(d.central_bandwidth),
                        human_rate(d.cluster_bandwidth),
                        human_rate(d.per_household),
                        human_rate(d.total_bandwidth)
                    );
                }
                if let Some(w) = v.inbound {
                    let _ = writeln!(r, "  inbound: W_oc={}", human_rate(w));
                }
                for sim in &v.sim {
                    let _ = writeln!(
                        r,
                        "  simulation vs analytic ({}):",
                        sim.architecture.as_str()
                    );
                    for p in &sim.pools {
                        let _ = writeln!(
                            r,
                            "    {:<8} S={:<6} B(S,A)={:.5}  measured={:.5} +/- {:.5}  target={}  {}",
                            p.name,
                            p.ports,
                            p.analytic_blocking,
                            p.measured_blocking,
                            p.standard_error,
                            row.blocking_target,
                            if p.meets_target { "ok" } else { "EXCEEDS TARGET" }
                        );
                    }
                }
            }
        }
    }
    r
}

pub fn render(result: &SweepResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => to_csv_string(result),
        OutputFormat::Report => to_report_string(result),
    }
}
