use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fxregime::distributions::RngStream;
use fxregime::experiment::{self, ExperimentConfig};
use fxregime::synthetic::{simulate_country, write_country_csv};
use fxregime::YearMonth;

use crate::Verdict;

const LIMIT: Duration = Duration::from_secs(300);

const CONFIG: &str = r#"seed = 11
t0 = "2006-06"
horizons = [1, 3, 12]
max_origins = 10

[mcmc]
iterations = 500
burn_in = 250
thin = 1

[data]
home = "home.csv"
foreign = "foreign.csv"

[grid]
families = ["kitchen-sink"]
states = [2]
transitions = ["tvp", "fixed"]
shrinkages = ["ssvs"]
variances = ["state-specific"]
linear = []
"#;

fn setup(dir: &Path) -> ExperimentConfig {
    let start = YearMonth::new(1999, 1).unwrap();
    let mut rng = RngStream::new(99);
    let home = simulate_country(120, true, &mut rng);
    let foreign = simulate_country(120, false, &mut rng);
    write_country_csv(&dir.join("home.csv"), "", start, &home).unwrap();
    write_country_csv(&dir.join("foreign.csv"), "", start, &foreign).unwrap();
    let path = dir.join("experiment.toml");
    std::fs::write(&path, CONFIG).unwrap();
    ExperimentConfig::load(&path).unwrap()
}

fn files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn execute(dir: &Path, workers: usize) -> (Duration, usize, usize) {
    let start = Instant::now();
    let mut config = setup(dir);
    config.workers = workers;
    experiment::transform(&config).unwrap();
    let summary = experiment::run(&config).unwrap();
    (start.elapsed(), summary.cells, summary.origins)
}

pub fn run() -> Verdict {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ta, cells, origins) = execute(a.path(), 1);
    let (tb, _, _) = execute(b.path(), 2);
    let (oa, ob) = (a.path().join("output"), b.path().join("output"));
    let (fa, fb) = (files(&oa), files(&ob));
    let differing: Vec<String> = fa
        .iter()
        .filter(|f| std::fs::read(oa.join(f)).ok() != std::fs::read(ob.join(f)).ok())
        .map(|f| f.display().to_string())
        .collect();
    let identical = fa == fb && differing.is_empty();
    let pass = identical && cells == 2 && origins == 10 && ta <= LIMIT && tb <= LIMIT;
    Verdict::new(
        pass,
        format!(
            "{cells} cells x {origins} origins, 500-sweep chains; {} output files byte-identical: {identical}{}; runs took {:.1}s and {:.1}s (limit 300s each)",
            fa.len(),
            if differing.is_empty() { String::new() } else { format!(" (differ: {})", differing.join(", ")) },
            ta.as_secs_f64(),
            tb.as_secs_f64()
        ),
    )
}
