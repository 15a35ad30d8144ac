//! Erlang-B loss formula and inverse dimensioning.
//!
//! The blocking probability of an `S`-server loss system offered `A` Erlangs
//! is evaluated with the multiplicative recurrence
//!
//! ```text
//! B(0) = 1,    B(s) = A·B(s-1) / (s + A·B(s-1))
//! ```
//!
//! which never forms `A^S` or `S!` and stays stable for port counts in the
//! millions.

use std::fmt;

use thiserror::Error;

/// Default ceiling for [`min_ports`].
pub const DEFAULT_MAX_PORTS: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ErlangError {
    #[error("offered load must be finite and non-negative, got {0}")]
    InvalidLoad(f64),
    #[error("blocking probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("blocking target must lie strictly between 0 and 1, got {0}")]
    TargetOutOfRange(f64),
    #[error("{load} Erlangs needs more than {cap} ports to reach blocking {target}")]
    Infeasible { load: f64, target: f64, cap: u64 },
}

/// Offered traffic in Erlangs.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct OfferedLoad(f64);

impl OfferedLoad {
    pub const ZERO: OfferedLoad = OfferedLoad(0.0);

    pub fn new(erlangs: f64) -> Result<Self, ErlangError> {
        if erlangs.is_finite() && erlangs >= 0.0 {
            Ok(OfferedLoad(erlangs))
        } else {
            Err(ErlangError::InvalidLoad(erlangs))
        }
    }

    pub fn erlangs(self) -> f64 {
        self.0
    }
}

impl fmt::Display for OfferedLoad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} Erl", self.0)
    }
}

/// Number of server ports, i.e. simultaneous unicast or multicast streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PortCount(pub u64);

impl PortCount {
    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for PortCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BlockingProb(f64);

impl BlockingProb {
    pub fn new(p: f64) -> Result<Self, ErlangError> {
        if (0.0..=1.0).contains(&p) {
            Ok(BlockingProb(p))
        } else {
            Err(ErlangError::InvalidProbability(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for BlockingProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Erlang-B blocking probability `B(S, A)`.
///
/// Returns exactly `1.0` for zero ports and `0.0` for zero load with at
/// least one port. For `A > 0` the result lies in `(0, 1]` as long as it is
/// representable; extremely small values may underflow, see
/// [`ln_erlang_b`] for a log-domain evaluation that does not.
pub fn erlang_b(load: OfferedLoad, ports: PortCount) -> BlockingProb {
    let a = load.0;
    if ports.0 == 0 {
        return BlockingProb(1.0);
    }
    if a == 0.0 {
        return BlockingProb(0.0);
    }
    let mut inv = 1.0;
    for s in 1..=ports.0 {
        inv = next_inverse(inv, s, a);
    }
    BlockingProb(1.0 / inv)
}

/// `1/B(s, A)` from `1/B(s-1, A)`: the recurrence `B(s) = A·B / (s + A·B)`
/// inverted. Every term is positive, and for small integer loads the
/// intermediate values are exact, so `B` is a single rounded division.
fn next_inverse(inv: f64, s: u64, a: f64) -> f64 {
    1.0 + s as f64 / a * inv
}

/// Natural logarithm of `B(S, A)`, computed with the same recurrence carried
/// in the log domain. Keeps full relative precision where `B` itself would be
/// subnormal or zero in `f64`. Returns `-inf` for zero load with `S >= 1`.
pub fn ln_erlang_b(load: OfferedLoad, ports: PortCount) -> f64 {
    let a = load.0;
    if ports.0 == 0 {
        return 0.0;
    }
    if a == 0.0 {
        return f64::NEG_INFINITY;
    }
    let ln_a = a.ln();
    let mut ln_b = 0.0_f64;
    for s in 1..=ports.0 {
        // ln(A·B) - ln(s + A·B), with the sum written as ln s + ln(1 + A·B/s)
        let ln_ab = ln_a + ln_b;
        let ln_s = (s as f64).ln();
        ln_b = ln_ab - ln_s - (ln_ab - ln_s).exp().ln_1p();
    }
    ln_b
}

/// Smallest `S` with `B(S, A) <= target`, searching up to [`DEFAULT_MAX_PORTS`].
pub fn min_ports(load: OfferedLoad, target: BlockingProb) -> Result<PortCount, ErlangError> {
    min_ports_capped(load, target, DEFAULT_MAX_PORTS)
}

/// [`min_ports`] with an explicit search ceiling.
///
/// `B` is strictly decreasing in `S` for `A > 0`, so a forward scan of the
/// recurrence stops at the first port count meeting the target.
pub fn min_ports_capped(
    load: OfferedLoad,
    target: BlockingProb,
    max_ports: u64,
) -> Result<PortCount, ErlangError> {
    let p = target.0;
    if !(p > 0.0 && p < 1.0) {
        return Err(ErlangError::TargetOutOfRange(p));
    }
    let a = load.0;
    if a == 0.0 {
        return Ok(PortCount(0));
    }
    let mut inv = 1.0;
    let mut s = 0u64;
    while 1.0 / inv > p {
        if s == max_ports {
            return Err(ErlangError::Infeasible {
                load: a,
                target: p,
                cap: max_ports,
            });
        }
        s += 1;
        inv = next_inverse(inv, s, a);
    }
    Ok(PortCount(s))
}
