//! Writes a simulated country pair and a small experiment file into a directory.
//!
//! ```text
//! cargo run -p fxregime --example simulate_pair -- demo
//! cargo run -p fxregime-cli -- transform --config demo/experiment.toml
//! cargo run -p fxregime-cli -- run --config demo/experiment.toml --smoke
//! ```

use std::path::PathBuf;

use fxregime::distributions::RngStream;
use fxregime::synthetic::{simulate_country, write_country_csv};
use fxregime::YearMonth;

const EXPERIMENT: &str = r#"pair = "HOME/FOREIGN (simulated)"
seed = 1
t0 = "2004-12"
horizons = [1, 3, 12]
max_origins = 12
workers = 2

[mcmc]
iterations = 2000
burn_in = 1000
thin = 2

[data]
home = "home.csv"
foreign = "foreign.csv"

[grid]
families = ["theoretical", "kitchen-sink"]
states = [2]
transitions = ["tvp", "fixed"]
shrinkages = ["ssvs"]
variances = ["common"]
linear = ["uip", "ppp"]
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "demo".into()));
    std::fs::create_dir_all(&dir)?;
    let start = YearMonth::new(1990, 1)?;
    let months = 25 * 12;
    let mut rng = RngStream::new(2024);
    let home = simulate_country(months, true, &mut rng);
    let foreign = simulate_country(months, false, &mut rng);
    write_country_csv(&dir.join("home.csv"), "", start, &home)?;
    write_country_csv(&dir.join("foreign.csv"), "", start, &foreign)?;
    let config = dir.join("experiment.toml");
    std::fs::write(&config, EXPERIMENT)?;
    println!("wrote {} months of data and {}", months, config.display());
    Ok(())
}
