//! Seeded random instance generators for the synthetic benchmark families.

use super::{ConcaveShape, EnvError, Instance, MeanCurve, NoiseFamily};
use crate::util::bisect;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConcaveGenError {
    #[error("failed to satisfy the 75% early-growth constraint after {attempts} attempts")]
    ShapeConstraint { attempts: u32 },
}

/// Fraction of the final value every concave arm must reach by the anchor
/// pull count.
const EARLY_GROWTH_FRACTION: f64 = 0.75;
const SHAPE_RETRY_BUDGET: u32 = 100;

/// The two-arm early-peaker / late-bloomer example: a flat arm at 0.4 and a
/// linear climb to 1.0 over 20000 pulls. The optimal arm flips from the flat
/// one to the climber at horizons near 16000.
pub fn intro_instance(sigma: f64, noise_family: NoiseFamily) -> Instance {
    Instance::new(
        "intro",
        sigma,
        noise_family,
        vec![
            MeanCurve::Constant { level: 0.4 },
            MeanCurve::Ltf {
                slope: 1.0 / 20000.0,
                cap: 1.0,
            },
        ],
    )
    .expect("two arms")
}

/// Random linear-then-flat instance: 2..=5 arms, caps uniform on
/// `[0.1, 1.0]`, saturation times uniform on `[0.05 * horizon, horizon]`,
/// slope = cap / saturation time.
pub fn generate_ltf_instance<R: Rng + ?Sized>(
    rng: &mut R,
    horizon: u64,
    sigma: f64,
    noise_family: NoiseFamily,
    label: impl Into<String>,
) -> Result<Instance, EnvError> {
    if horizon < 20 {
        return Err(EnvError::HorizonTooSmall {
            family: "ltf",
            horizon,
            min: 20,
        });
    }
    let k = rng.random_range(2..=5usize);
    let t = horizon as f64;
    let arms = (0..k)
        .map(|_| {
            let cap = rng.random_range(0.1..1.0);
            let t_sat = rng.random_range(0.05 * t..t);
            MeanCurve::Ltf {
                slope: cap / t_sat,
                cap,
            }
        })
        .collect();
    Instance::new(label, sigma, noise_family, arms)
}

/// Random concave instance: 2..=5 arms of saturating curves normalized to
/// the generation horizon. Every instance contains exactly one late bloomer
/// (start 0.1, limit 0.95) and one early peaker (start 0.55, limit 0.58);
/// remaining arms draw start from `[0.05, 0.35]` and limit from
/// `[0.90, 0.99]`. Shapes are uniform over the three families and the rate is
/// picked so the curve reaches at least 75% of its final value by pull
/// 10000 (scaled proportionally when the horizon is under 50000, which only
/// makes that constraint easier).
pub fn generate_concave_instance<R: Rng + ?Sized>(
    rng: &mut R,
    horizon: u64,
    sigma: f64,
    noise_family: NoiseFamily,
    label: impl Into<String>,
) -> Result<Instance, EnvError> {
    if horizon < 10000 {
        return Err(EnvError::HorizonTooSmall {
            family: "concave",
            horizon,
            min: 10000,
        });
    }
    let k = rng.random_range(2..=5usize);
    let mut arms = Vec::with_capacity(k);
    arms.push(concave_arm(rng, 0.1, 0.95, horizon)?);
    arms.push(concave_arm(rng, 0.55, 0.58, horizon)?);
    for _ in 2..k {
        let start = rng.random_range(0.05..0.35);
        let limit = rng.random_range(0.90..0.99);
        arms.push(concave_arm(rng, start, limit, horizon)?);
    }
    arms.shuffle(rng);
    Instance::new(label, sigma, noise_family, arms)
}

/// Anchor pull count for the early-growth constraint: 10000 at the reference
/// horizon of 50000 and proportionally earlier below that, so the constraint
/// at pull 10000 always holds.
fn growth_anchor(horizon: u64) -> f64 {
    10_000f64.min(horizon as f64 / 5.0).max(1.0)
}

fn concave_arm<R: Rng + ?Sized>(
    rng: &mut R,
    start: f64,
    limit: f64,
    horizon: u64,
) -> Result<MeanCurve, ConcaveGenError> {
    let t_ref = horizon as f64;
    let anchor = growth_anchor(horizon);
    for _ in 0..SHAPE_RETRY_BUDGET {
        let shape = *ConcaveShape::ALL.choose(rng).expect("non-empty");
        // Rate at which the anchor constraint is tight, then a random push
        // toward faster saturation. Rational curves saturate faster as the
        // rate shrinks; the other two as it grows.
        let (lo, hi) = match shape {
            ConcaveShape::Rational => (1e-9, 1e12),
            ConcaveShape::Exponential | ConcaveShape::Arctangent => (1e-12, 1.0),
        };
        let tight = bisect(lo, hi, EARLY_GROWTH_FRACTION, 120, |k| {
            shape.g(anchor, k, t_ref)
        });
        let push = rng.random_range(1.0..5.0);
        let rate = match shape {
            ConcaveShape::Rational => tight / push,
            ConcaveShape::Exponential | ConcaveShape::Arctangent => tight * push,
        };
        if shape.g(anchor, rate, t_ref) >= EARLY_GROWTH_FRACTION - 1e-9 {
            return Ok(MeanCurve::Concave {
                shape,
                start,
                limit,
                rate,
                t_ref: horizon,
            });
        }
    }
    Err(ConcaveGenError::ShapeConstraint {
        attempts: SHAPE_RETRY_BUDGET,
    })
}

/// Small random rising instance for oracle cross-checks. Mixes all curve
/// variants, including tabulated rising curves with deliberately non-concave
/// increments.
pub fn generate_small_rising_instance<R: Rng + ?Sized>(
    rng: &mut R,
    max_k: usize,
    t_max: u64,
    label: impl Into<String>,
) -> Instance {
    let k = rng.random_range(1..=max_k.max(1));
    let arms = (0..k)
        .map(|_| match rng.random_range(0..4u8) {
            0 => MeanCurve::Constant {
                level: rng.random_range(0.05..0.95),
            },
            1 => MeanCurve::Ltf {
                slope: rng.random_range(0.01..0.30),
                cap: rng.random_range(0.1..1.0),
            },
            2 => MeanCurve::Concave {
                shape: *ConcaveShape::ALL.choose(rng).expect("non-empty"),
                start: rng.random_range(0.05..0.35),
                limit: rng.random_range(0.5..0.99),
                rate: rng.random_range(0.05..2.0),
                t_ref: 4 * t_max,
            },
            _ => {
                let mut level: f64 = rng.random_range(0.01..0.30);
                let values = (0..t_max)
                    .map(|_| {
                        let headroom = (1.0 - level).max(0.0);
                        level += rng.random_range(0.0..headroom / t_max as f64);
                        level
                    })
                    .collect();
                MeanCurve::Tabulated { values }
            }
        })
        .collect();
    Instance::new(label, 0.0, NoiseFamily::None, arms).expect("k >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::validate_instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn intro_matches_the_two_arm_example() {
        let inst = intro_instance(0.1, NoiseFamily::Gaussian);
        for n in [1u64, 5000, 40000] {
            assert_eq!(inst.mean(0, n).unwrap(), 0.4);
        }
        assert_eq!(inst.mean(1, 20000).unwrap(), 1.0);
        assert_eq!(inst.mean(1, 40000).unwrap(), 1.0);
    }

    #[test]
    fn ltf_saturation_times_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..50 {
            let inst =
                generate_ltf_instance(&mut rng, 50_000, 0.0, NoiseFamily::None, format!("l{i}"))
                    .unwrap();
            assert!((2..=5).contains(&inst.k()));
            for arm in &inst.arms {
                match arm {
                    MeanCurve::Ltf { slope, cap } => {
                        let c = cap / slope;
                        assert!((0.05 * 50_000.0..=50_000.0).contains(&c), "c = {c}");
                        assert!((0.1..1.0).contains(cap));
                    }
                    other => panic!("unexpected variant {other:?}"),
                }
            }
            assert!(validate_instance(&inst, 50_000).is_clean());
        }
    }

    #[test]
    fn generation_is_deterministic_given_seed() {
        let make = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = generate_ltf_instance(&mut rng, 50_000, 0.1, NoiseFamily::Gaussian, "a")
                .unwrap()
                .to_json_string()
                .unwrap();
            let b = generate_concave_instance(&mut rng, 50_000, 0.1, NoiseFamily::Gaussian, "b")
                .unwrap()
                .to_json_string()
                .unwrap();
            (a, b)
        };
        assert_eq!(make(99), make(99));
        assert_ne!(make(99), make(100));
    }

    #[test]
    fn concave_arms_satisfy_the_early_growth_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..30 {
            let inst = generate_concave_instance(
                &mut rng,
                50_000,
                0.1,
                NoiseFamily::Gaussian,
                format!("c{i}"),
            )
            .unwrap();
            assert!((2..=5).contains(&inst.k()));
            let mut saw_late_bloomer = false;
            let mut saw_early_peaker = false;
            for arm in &inst.arms {
                match arm {
                    MeanCurve::Concave {
                        shape,
                        start,
                        limit,
                        rate,
                        t_ref,
                    } => {
                        let g = shape.g(10_000.0, *rate, *t_ref as f64);
                        assert!(g >= 0.75 - 1e-9, "g(10000) = {g}");
                        if (*start - 0.1).abs() < 1e-12 && (*limit - 0.95).abs() < 1e-12 {
                            saw_late_bloomer = true;
                        }
                        if (*start - 0.55).abs() < 1e-12 && (*limit - 0.58).abs() < 1e-12 {
                            saw_early_peaker = true;
                        }
                    }
                    other => panic!("unexpected variant {other:?}"),
                }
            }
            assert!(saw_late_bloomer && saw_early_peaker);
            assert!(validate_instance(&inst, 50_000).is_clean());
        }
    }

    #[test]
    fn late_bloomer_endpoints_match_their_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let inst =
            generate_concave_instance(&mut rng, 50_000, 0.0, NoiseFamily::None, "lb").unwrap();
        let bloomer = inst
            .arms
            .iter()
            .enumerate()
            .find(|(_, a)| matches!(a, MeanCurve::Concave { start, .. } if (*start - 0.1).abs() < 1e-12))
            .map(|(i, _)| i)
            .unwrap();
        assert!((inst.mean(bloomer, 50_000).unwrap() - 0.95).abs() < 0.01);
        assert!((inst.mean(bloomer, 1).unwrap() - 0.1).abs() < 0.01);
    }

    #[test]
    fn concave_generation_requires_the_minimum_horizon() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        assert!(matches!(
            generate_concave_instance(&mut rng, 9_999, 0.0, NoiseFamily::None, "x"),
            Err(EnvError::HorizonTooSmall { .. })
        ));
    }

    #[test]
    fn small_rising_instances_are_rising() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut saw_nonconcave = false;
        for i in 0..100 {
            let inst = generate_small_rising_instance(&mut rng, 3, 10, format!("s{i}"));
            assert!((1..=3).contains(&inst.k()));
            for arm in 0..inst.k() {
                let mut prev = 0.0;
                let mut prev_gamma = f64::INFINITY;
                let mut concave = true;
                for n in 1..=10u64 {
                    let m = inst.mean(arm, n).unwrap();
                    assert!(m >= prev - 1e-12, "not rising");
                    assert!((0.0..=1.0 + 1e-12).contains(&m));
                    let gamma = m - prev;
                    if n >= 2 && gamma > prev_gamma + 1e-12 {
                        concave = false;
                    }
                    prev_gamma = gamma;
                    prev = m;
                }
                saw_nonconcave |= !concave;
            }
        }
        assert!(saw_nonconcave, "mix should include non-concave tables");
    }
}
