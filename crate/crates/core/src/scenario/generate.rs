use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ScenarioError;
use crate::joblist::{build_job_list, ConfigGrid};
use crate::model::{InterferencePattern, Interval, JobList, Task};

use super::{config_utility, Scenario, ScenarioParams, Target};

/// Random on/off pattern whose active time is exactly `duty * horizon`.
///
/// The horizon alternates free and active segments. Segment counts are drawn
/// so that each side can be split into pieces of at least `min_segment`
/// (when its total allows) and, where possible, at most `max_segment` on
/// average; each side's total is then split at random with every piece
/// keeping the minimum length.
pub fn generate_pattern<R: Rng>(
    rng: &mut R,
    horizon: f64,
    duty: f64,
    min_segment: f64,
    max_segment: f64,
) -> Result<InterferencePattern, ScenarioError> {
    if duty <= 0.0 {
        return Ok(InterferencePattern::quiet(horizon)?);
    }
    if duty >= 1.0 {
        return Ok(InterferencePattern::new(horizon, vec![Interval::new(0.0, horizon)])?);
    }
    let on = duty * horizon;
    let off = horizon - on;
    let max_count = |total: f64| ((total / min_segment).floor() as usize).max(1);
    let min_count = |total: f64| ((total / max_segment).ceil() as usize).clamp(1, max_count(total));

    let n_off = rng.random_range(min_count(off)..=max_count(off));
    // Alternation allows one more or one fewer active segment.
    let on_choices: Vec<usize> = [n_off.saturating_sub(1), n_off, n_off + 1]
        .into_iter()
        .filter(|&n| n >= 1 && n <= max_count(on))
        .collect();
    let n_on = match on_choices.as_slice() {
        [] => max_count(on),
        c => c[rng.random_range(0..c.len())],
    };
    let n_off = n_off.clamp(n_on.saturating_sub(1).max(1), n_on + 1);
    let start_active = match n_on.cmp(&n_off) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => rng.random_bool(0.5),
    };

    let on_pieces = split(rng, on, n_on, min_segment);
    let off_pieces = split(rng, off, n_off, min_segment);
    let (mut on_it, mut off_it) = (on_pieces.into_iter(), off_pieces.into_iter());
    let mut active = Vec::with_capacity(n_on);
    let mut t = 0.0;
    let mut is_active = start_active;
    loop {
        let next = if is_active { on_it.next() } else { off_it.next() };
        let Some(len) = next else { break };
        let end = (t + len).min(horizon);
        if is_active {
            active.push(Interval::new(t, end));
        }
        t = end;
        is_active = !is_active;
    }
    // Pin the final boundary to the horizon against rounding drift.
    if let Some(last) = active.last_mut() {
        if (last.end - horizon).abs() < 1e-9 {
            last.end = horizon;
        }
    }
    Ok(InterferencePattern::new(horizon, active)?)
}

/// Splits `total` into `n` random pieces, each at least `min_len` when the
/// total allows it.
fn split<R: Rng>(rng: &mut R, total: f64, n: usize, min_len: f64) -> Vec<f64> {
    let floor = if total >= n as f64 * min_len {
        min_len
    } else {
        total / n as f64
    };
    let spare = total - floor * n as f64;
    let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let sum: f64 = weights.iter().sum();
    weights
        .iter()
        .map(|w| {
            let share = if sum > 0.0 { w / sum } else { 1.0 / n as f64 };
            floor + spare * share
        })
        .collect()
}

/// Draws one scenario. Everything is a function of `seed`.
///
/// Targets get uniform azimuths and types; a target is prone when it lies in
/// the interferer's sector and the interferer is active at all. Each prone
/// task draws its own degradation factors.
pub fn generate_scenario(seed: u64, params: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pattern = generate_pattern(
        &mut rng,
        params.horizon,
        params.duty,
        params.min_segment,
        params.max_segment,
    )?;

    let lists: Vec<JobList> = params
        .target_types
        .iter()
        .map(|kind| {
            let grid = ConfigGrid::with_revisit_factors(
                params.dwell_choices.clone(),
                &params.revisit_factors,
                kind.revisit_scale,
            )?;
            Ok(build_job_list(&grid, |d, r| {
                config_utility(d, r, kind, params.dwell_scale)
            }))
        })
        .collect::<Result<_, ScenarioError>>()?;

    let interferer_present = !pattern.active().is_empty();
    let mut targets = Vec::with_capacity(params.target_count);
    let mut tasks = Vec::with_capacity(params.target_count);
    for k in 0..params.target_count {
        let azimuth = rng.random_range(0.0..=params.azimuth_span);
        let kind = rng.random_range(0..params.target_types.len());
        let range_km = rng.random_range(10.0..=100.0);
        let speed_mps = rng.random_range(50.0..=350.0);
        // Always drawn so the stream does not depend on exposure.
        let d_std = uniform(&mut rng, params.d_std_range);
        let d_alt = uniform(&mut rng, params.d_alt_range);

        let id = k as u32;
        let weight = params.target_types[kind].weight;
        let standard = lists[kind].clone();
        let prone = interferer_present && (params.sector_lo..=params.sector_hi).contains(&azimuth);
        let task = if prone {
            Task::prone(id, standard, d_std, d_alt)?
        } else {
            Task::new(id, standard)
        };
        tasks.push(task.with_weight(weight));
        targets.push(Target {
            azimuth,
            range_km,
            speed_mps,
            kind,
        });
    }

    Ok(Scenario {
        seed,
        targets,
        target_types: params.target_types.clone(),
        sector: (params.sector_lo, params.sector_hi),
        pattern,
        tasks,
        chunk: params.chunk,
    })
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_hits_duty_and_min_segment() {
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = generate_pattern(&mut rng, 1.0, 0.7, 0.05, 0.2).unwrap();
            assert!((p.duty() - 0.7).abs() < 1e-12, "seed {seed}: {}", p.duty());
            for iv in p.active().iter().chain(p.free_intervals().iter()) {
                assert!(iv.len() >= 0.05 - 1e-12, "seed {seed}: short segment {iv:?}");
            }
        }
    }

    #[test]
    fn pattern_edge_duties() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(generate_pattern(&mut rng, 1.0, 0.0, 0.05, 0.2).unwrap().duty(), 0.0);
        assert_eq!(generate_pattern(&mut rng, 1.0, 1.0, 0.05, 0.2).unwrap().duty(), 1.0);
        let p = generate_pattern(&mut rng, 1.0, 0.98, 0.05, 0.2).unwrap();
        assert!((p.duty() - 0.98).abs() < 1e-12);
    }

    #[test]
    fn reference_scenario_shape() {
        let params = ScenarioParams::default();
        let s = generate_scenario(7, &params).unwrap();
        assert_eq!(s.tasks.len(), 100);
        let in_sector = s.targets.iter().filter(|t| (20.0..=70.0).contains(&t.azimuth)).count();
        assert_eq!(s.prone_count(), in_sector);
        for t in s.tasks.iter().filter_map(|t| t.exposure.as_ref()) {
            assert!((0.0..=0.3).contains(&t.d_std));
            assert!((0.3..=0.9).contains(&t.d_alt));
        }
    }

    #[test]
    fn scenario_is_deterministic() {
        let params = ScenarioParams::default();
        assert_eq!(
            generate_scenario(42, &params).unwrap(),
            generate_scenario(42, &params).unwrap()
        );
        assert_ne!(
            generate_scenario(42, &params).unwrap(),
            generate_scenario(43, &params).unwrap()
        );
    }

    #[test]
    fn quiet_scenario_has_no_prone_tasks() {
        let params = ScenarioParams {
            duty: 0.0,
            ..Default::default()
        };
        assert_eq!(generate_scenario(3, &params).unwrap().prone_count(), 0);
    }

    #[test]
    fn bad_duty_rejected() {
        let params = ScenarioParams {
            duty: -0.1,
            ..Default::default()
        };
        assert!(generate_scenario(1, &params).is_err());
    }
}
