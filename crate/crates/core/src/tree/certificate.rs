use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::tree::graph::{tree_path, MetricGraphMap};
use crate::winding::{winding_field, winding_moments, WindingMoments};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsUpToTolerance,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyTCertificate {
    pub verdict: Verdict,
    pub cycles_checked: usize,
    /// First cycle (vertex ids, closed) whose moments exceed tolerance.
    pub witness: Option<Vec<u64>>,
    pub moments: Option<WindingMoments>,
}

/// Closed vertex paths, one per spanning-tree chord.
pub fn fundamental_cycles(map: &MetricGraphMap) -> Vec<Vec<usize>> {
    let (parent, chords) = map.spanning_tree();
    chords
        .into_iter()
        .map(|(a, b)| {
            let mut cycle = tree_path(&parent, a, b);
            cycle.push(a);
            cycle
        })
        .collect()
}

/// Checks that every cycle's planar image has vanishing winding moments.
/// `cycles` are vertex-id paths; a path not ending where it starts is closed
/// implicitly. Without `cycles`, the fundamental cycle basis is used.
pub fn property_t_check(
    map: &MetricGraphMap,
    cycles: Option<&[Vec<u64>]>,
    cell: f64,
    rtol: f64,
) -> Result<PropertyTCertificate> {
    if map.dim() != 2 {
        return Err(Error::invalid(format!(
            "winding moments need a planar target, got dimension {}",
            map.dim()
        )));
    }
    if !(cell > 0.0 && cell.is_finite()) {
        return Err(Error::invalid(format!("cell must be positive, got {cell}")));
    }
    let cycles: Vec<Vec<usize>> = match cycles {
        Some(list) => list
            .iter()
            .map(|c| resolve_cycle(map, c))
            .collect::<Result<_>>()?,
        None => fundamental_cycles(map),
    };
    let moments: Vec<WindingMoments> = cycles
        .par_iter()
        .map(|c| cycle_moments(map, c, cell))
        .collect::<Result<_>>()?;
    let violation = moments.iter().position(|m| !m.vanish(rtol));
    Ok(PropertyTCertificate {
        verdict: if violation.is_some() {
            Verdict::Violated
        } else {
            Verdict::HoldsUpToTolerance
        },
        cycles_checked: cycles.len(),
        witness: violation.map(|k| cycles[k].iter().map(|&v| map.ids()[v]).collect()),
        moments: violation.map(|k| moments[k].clone()),
    })
}

fn resolve_cycle(map: &MetricGraphMap, ids: &[u64]) -> Result<Vec<usize>> {
    let mut path = ids
        .iter()
        .map(|&id| {
            map.index_of(id)
                .ok_or_else(|| Error::invalid(format!("cycle refers to unknown vertex {id}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if path.len() < 2 {
        return Err(Error::invalid("cycle needs at least two vertices"));
    }
    if path.first() != path.last() {
        path.push(path[0]);
    }
    for w in path.windows(2) {
        if !map.is_adjacent(w[0], w[1]) {
            return Err(Error::invalid(format!(
                "cycle step {} -> {} is not an edge",
                map.ids()[w[0]],
                map.ids()[w[1]]
            )));
        }
    }
    Ok(path)
}

fn cycle_moments(map: &MetricGraphMap, cycle: &[usize], cell: f64) -> Result<WindingMoments> {
    let points: Vec<Vec<f64>> = cycle.iter().map(|&v| map.phi(v).to_vec()).collect();
    let times = (0..points.len()).map(|k| k as f64).collect();
    let curve = SampledCurve::new(times, points, true)?;
    Ok(winding_moments(&winding_field(&curve, cell)?))
}
