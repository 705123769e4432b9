//! Manual scaling probe: `cargo test -p symlift --test scaling_probe -- --ignored --nocapture`

use std::time::Instant;
use symlift::exact::{CensusConfig, Engine};
use symlift::model::gen_pigeonhole;

#[test]
#[ignore]
fn pigeonhole_scaling_probe() {
    for n in [5usize, 8, 10, 12, 14, 16, 18, 20] {
        let model = gen_pigeonhole(n, 2, 2.0, true).unwrap();
        let t = Instant::now();
        let engine = Engine::new(model);
        let build = t.elapsed();
        let t = Instant::now();
        let census = engine.census(&CensusConfig::default());
        println!(
            "n={n:2} vars={:3} build={build:?} census={:?} orbits={} certs={} sum_ok={}",
            2 * n,
            t.elapsed(),
            census.records.len(),
            census.stats.certificate_computations,
            census.total_states() == (num_bigint::BigUint::from(1u32) << (2 * n)),
        );
    }
}
