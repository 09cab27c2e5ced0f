use super::planner::{stats_for, PlanContext};
use super::{CoverageError, CoveragePlan};

/// Splits a plan into battery-sized sorties at line boundaries.
///
/// Greedy: lines are appended to the current sortie while its estimated
/// flight time stays within `endurance` seconds.
pub fn partition_sorties(
    plan: &CoveragePlan,
    endurance: f64,
) -> Result<Vec<CoveragePlan>, CoverageError> {
    if !(endurance.is_finite() && endurance > 0.0) {
        return Err(CoverageError::Params(format!(
            "endurance must be positive, got {endurance}"
        )));
    }
    if plan.stats.est_flight_s <= endurance {
        return Ok(vec![plan.clone()]);
    }
    let ctx = PlanContext::of(plan);
    let time =
        |lines: &[_]| stats_for(lines, ctx.trigger_distance, &ctx.params, ctx.gsd).est_flight_s;

    let mut groups = Vec::new();
    let mut current = Vec::new();
    for (index, line) in plan.lines.iter().enumerate() {
        let alone = time(std::slice::from_ref(line));
        if alone > endurance {
            return Err(CoverageError::InfeasibleSortie {
                index,
                needed_s: alone,
                endurance_s: endurance,
            });
        }
        current.push(*line);
        if time(&current) > endurance {
            current.pop();
            groups.push(std::mem::replace(&mut current, vec![*line]));
        }
    }
    if !current.is_empty() {
        groups.push(current);
    }
    groups.into_iter().map(|g| ctx.assemble(g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{CoverageParams, FlightLine, Heading};
    use crate::geodesy::{EnuPoint, GeoPoint, MissionOrigin};
    use crate::sensor::FootprintDims;

    fn six_line_plan() -> CoveragePlan {
        let lines: Vec<FlightLine> = (0..6)
            .map(|i| {
                let e = 10.0 * i as f64;
                let (s, t) = if i % 2 == 0 {
                    (0.0, 100.0)
                } else {
                    (100.0, 0.0)
                };
                FlightLine {
                    row: i,
                    start: EnuPoint::new(e, s, 50.0),
                    end: EnuPoint::new(e, t, 50.0),
                }
            })
            .collect();
        PlanContext {
            origin: MissionOrigin::new(GeoPoint::new(50.0, 6.0, 0.0).unwrap()).unwrap(),
            params: CoverageParams {
                heading: Heading::Degrees(0.0),
                cruise_speed: 5.0,
                turn_penalty: 3.0,
                ..Default::default()
            },
            heading_deg: 0.0,
            footprint: FootprintDims {
                width: 20.0,
                height: 15.0,
            },
            line_spacing: 10.0,
            trigger_distance: 10.0,
            gsd: 0.01,
        }
        .assemble(lines)
        .unwrap()
    }

    #[test]
    fn fits_in_one_sortie() {
        let plan = six_line_plan();
        let out = partition_sorties(&plan, plan.stats.est_flight_s + 1.0).unwrap();
        assert_eq!(out, vec![plan]);
    }

    #[test]
    fn two_lines_per_sortie() {
        // two 100 m lines + 10 m transit at 5 m/s plus one 3 s turn = 45 s
        let plan = six_line_plan();
        let out = partition_sorties(&plan, 45.0).unwrap();
        assert_eq!(out.len(), 3);
        for s in &out {
            assert_eq!(s.lines.len(), 2);
            assert!(s.stats.est_flight_s <= 45.0);
        }
        let joined: Vec<FlightLine> = out.iter().flat_map(|s| s.lines.clone()).collect();
        assert_eq!(joined, plan.lines);
    }

    #[test]
    fn line_longer_than_endurance() {
        let plan = six_line_plan();
        match partition_sorties(&plan, 19.0) {
            Err(CoverageError::InfeasibleSortie { index, .. }) => assert_eq!(index, 0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
