//! Acceptance checks. Each criterion prints one PASS or FAIL line with the
//! measured quantity next to its tolerance; the process fails if any check does.
//!
//! `cargo test -p fxregime --test acceptance` runs every criterion. Criterion
//! numbers given after `--` restrict the run, e.g. `-- 1 2 7`.

mod common;
mod determinism;
mod evaluation;
mod ffbs;
mod geweke;
mod nesting;
mod polya_gamma;
mod protocol;
mod recovery;
mod sign;

use std::time::{Duration, Instant};

/// Outcome of one criterion.
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Verdict,
}

const fn minutes(m: u64) -> Option<Duration> {
    Some(Duration::from_secs(60 * m))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "FFBS path frequencies match enumeration", limit: Some(Duration::from_secs(60)), run: ffbs::run },
        Criterion { id: 2, name: "Polya-Gamma moments and symmetry", limit: Some(Duration::from_secs(30)), run: polya_gamma::run },
        Criterion { id: 3, name: "Geweke joint-distribution test", limit: minutes(10), run: geweke::run },
        Criterion { id: 4, name: "parameter recovery coverage", limit: minutes(30), run: recovery::run },
        Criterion { id: 5, name: "protocol constants", limit: None, run: protocol::constants },
        Criterion { id: 6, name: "theoretical prior means", limit: None, run: protocol::prior_table },
        Criterion { id: 7, name: "nesting and relabeling", limit: None, run: nesting::run },
        Criterion { id: 8, name: "evaluation arithmetic", limit: None, run: evaluation::run },
        Criterion { id: 9, name: "end-to-end determinism", limit: minutes(5), run: determinism::run },
        Criterion { id: 10, name: "transition sign on threshold data", limit: None, run: sign::run },
    ];
    // libtest flags such as --nocapture may be passed through; only numbers select.
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| selected.is_empty() || selected.contains(&c.id)) {
        let start = Instant::now();
        let v = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let pass = v.pass && in_time;
        let budget = match c.limit {
            Some(l) => format!("{:.1}s of {}s", elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.1}s", elapsed.as_secs_f64()),
        };
        println!(
            "criterion {:>2} {}: {} ({}; {budget})",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            v.detail
        );
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
