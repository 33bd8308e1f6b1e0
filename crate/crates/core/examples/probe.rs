//! Regret statistics of random levels against each reference policy, used to
//! calibrate engine constants.
//!
//! Usage: `probe [LEVELS] [flaws]`. The env vars CS, TP, KB, KS and MS
//! override carrier_speed, tackle_prob, keeper_block_radius, keeper_speed and
//! move_speed.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regret_qd::environment::{random_level, MatchConfig};
use regret_qd::evaluation::estimate_regret;
use regret_qd::policies::{build_reference_ladder, Flaws, PolicySpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let flaws: Flaws = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(Flaws::all());
    let mut cfg = MatchConfig::<f64>::default();
    let env = |k: &str| std::env::var(k).ok().and_then(|v| v.parse::<f64>().ok());
    if let Some(v) = env("CS") {
        cfg.carrier_speed = v;
    }
    if let Some(v) = env("TP") {
        cfg.tackle_prob = v;
    }
    if let Some(v) = env("KB") {
        cfg.keeper_block_radius = v;
    }
    if let Some(v) = env("KS") {
        cfg.keeper_speed = v;
    }
    if let Some(v) = env("MS") {
        cfg.move_speed = v;
    }
    let refs = build_reference_ladder(8, true).unwrap();
    let target = PolicySpec::target(flaws);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t0 = Instant::now();
    let mut total_mean = 0.0;
    let mut eps = 0usize;
    for (p, r) in refs.iter().enumerate() {
        let (mut xp, mut sp, mut reg, mut hi, mut max) = (0.0, 0.0, 0.0, 0, -2.0f64);
        for i in 0..n {
            let l = random_level(&mut rng, 5, &cfg.field).unwrap();
            let e = estimate_regret(&l, p, r, &target, 4, i as u64 * 31 + p as u64, &cfg).unwrap();
            xp += e.xp_mean;
            sp += e.sp_mean;
            reg += e.regret;
            if e.regret >= 1.0 {
                hi += 1;
            }
            max = max.max(e.regret);
            eps += 8;
        }
        let nf = n as f64;
        total_mean += reg / nf;
        println!(
            "{:10} skill {:.2}  xp {:+.3} sp {:+.3} regret {:+.3}  P(r>=1) {:.3} max {:.2}",
            r.id,
            r.skill,
            xp / nf,
            sp / nf,
            reg / nf,
            hi as f64 / nf,
            max
        );
    }
    let dt = t0.elapsed().as_secs_f64();
    println!("mean regret over refs {:+.3}", total_mean / refs.len() as f64);
    println!("{} episodes in {:.2}s = {:.1} us/episode", eps, dt, dt / eps as f64 * 1e6);
}
