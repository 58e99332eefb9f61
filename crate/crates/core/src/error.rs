use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("blow-up needs k >= 1 and ell >= 2, got k = {k}, ell = {ell}")]
    InvalidBlowup { k: usize, ell: usize },

    #[error("edge count m = {m} outside 0..={max}")]
    EdgeCountOutOfRange { m: usize, max: usize },

    #[error("enumerating C({total}, {m}) subgraphs exceeds the cap of {cap}")]
    EnumerationCap { total: usize, m: usize, cap: u64 },

    #[error("{what}: size {got} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("invalid digraph: {0}")]
    InvalidDigraph(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("target ratio r = {0} must lie strictly between 0 and 1/2")]
    RatioOutOfRange(f64),

    #[error("f_{ell}(1) = {f_at_one} is not below 1/r = {target}; no root in (1, inf)")]
    NoRoot {
        ell: u32,
        f_at_one: f64,
        target: f64,
    },

    #[error("root finder stopped after {iterations} iterations with residual {residual:e}")]
    NoConvergence { iterations: u32, residual: f64 },

    #[error("rounded edge count m = {m} is degenerate for {total} candidate edges")]
    DegeneratePlan { m: usize, total: usize },

    #[error("{field}: k = {k} exceeds the exact-computation budget of {limit}")]
    Budget {
        field: &'static str,
        k: usize,
        limit: usize,
    },
}
