//! Runs one search per mode and prints the final metrics.
//!
//! Usage: `search ITERATIONS SEED [flaws] [mode,mode,...]`

use std::time::Instant;

use regret_qd::orchestrator::{run_search, Mode, SearchConfig};

fn main() -> regret_qd::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let iterations = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let flaws = match args.get(3) {
        Some(s) => s.parse()?,
        None => regret_qd::policies::Flaws::all(),
    };
    let modes: Vec<Mode> = match args.get(4) {
        Some(s) => s.split(',').map(str::parse).collect::<regret_qd::Result<_>>()?,
        None => vec![Mode::MadridCmame, Mode::Targeted, Mode::Random],
    };
    for mode in modes {
        let cfg = SearchConfig::<f64> {
            mode,
            iterations,
            seed,
            target_flaws: flaws,
            ..SearchConfig::default()
        };
        let t = Instant::now();
        let r = run_search(&cfg)?;
        let m = r.metrics.last().unwrap();
        let ladder: Vec<String> = r.policy_mean_regret.iter().map(|v| format!("{v:.3}")).collect();
        let deep = r
            .archive
            .iter()
            .filter(|(k, e)| k.x_bin <= 1 && e.regret >= 0.75)
            .count();
        println!(
            "{mode:>14} mean {:+.4} cov {:.3} score {:.3} dec {} restarts {} deep>=.75 {deep} {:.1}s\n    {}",
            m.mean_archive_regret,
            m.coverage,
            m.scoring_rate,
            r.cell_decreases,
            r.emitter_restarts,
            t.elapsed().as_secs_f64(),
            ladder.join(" ")
        );
    }
    Ok(())
}
