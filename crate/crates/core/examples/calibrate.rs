//! Measures the constants frozen in `fixtures/`: the oscillatory-integral
//! ratios per regime, the window-count constant for `P(b/r + z)` and the
//! shape values at the two comparison points.
//! Prints both fixture files to stdout.

use std::collections::BTreeMap;

use sparse_sieve::bounds::{bound_shapes, lemma4_instances, measure_lemma4_constant, ShapeParams};
use sparse_sieve::harmonic::{measure_vdc_constant, vdc_instances, VdcRegime};
use sparse_sieve::verify::{shape_regime_points, Calibration, ShapeRegime};

const SEED: u64 = 20_240_611;
const COUNT: usize = 100;
const LEMMA4_SEED: u64 = 20_240_612;
const LEMMA4_COUNT: usize = 200;

/// Rounds up to three significant digits.
fn round_up(x: f64) -> f64 {
    let scale = 10f64.powi(2 - x.log10().floor() as i32);
    (x * scale).ceil() / scale
}

fn main() -> sparse_sieve::Result<()> {
    let mut constants = BTreeMap::new();
    for regime in VdcRegime::ALL {
        let measured = measure_vdc_constant(regime, &vdc_instances(regime, SEED, COUNT))?;
        eprintln!("{}: {measured}", regime.name());
        constants.insert(regime.name().to_string(), round_up(measured));
    }
    let lemma4 = measure_lemma4_constant(&lemma4_instances(LEMMA4_SEED, LEMMA4_COUNT)?)?;
    eprintln!("lemma4: {lemma4}");
    let cal = Calibration {
        vdc_seed: SEED,
        vdc_instances: COUNT,
        vdc_constants: constants,
        lemma4_seed: LEMMA4_SEED,
        lemma4_instances: LEMMA4_COUNT,
        lemma4_constant: round_up(lemma4),
    };
    println!("{}", serde_json::to_string_pretty(&cal)?);

    let regimes: Vec<ShapeRegime> = shape_regime_points()
        .into_iter()
        .map(|(n, q, winner)| {
            let shapes = bound_shapes(&ShapeParams::new(n, q, q))?
                .into_iter()
                .filter(|(k, _)| [winner, "zhao", "Z1", "Z2"].contains(&k.as_str()))
                .collect();
            Ok(ShapeRegime {
                n,
                q,
                winner: winner.to_string(),
                shapes,
            })
        })
        .collect::<sparse_sieve::Result<_>>()?;
    println!("{}", serde_json::to_string_pretty(&regimes)?);
    Ok(())
}
