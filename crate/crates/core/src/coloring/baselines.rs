//! Baseline allocators: randomized, greedy and sequential.

use std::cmp::Reverse;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Algorithm, Coloring, Palette};
use crate::error::{Error, Result};
use crate::grid_model::SubstationId;
use crate::security_graph::DiversityGraph;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RandomizedOptions {
    /// Defaults to 100 * ceil(log2(n + 1)).
    pub round_cap: Option<usize>,
}

pub(crate) fn ceil_log2_succ(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

/// Each vertex holds a private list of its d(v)+1 strongest colors. In every
/// round the active vertices draw from their lists; a vertex whose draw clashes
/// with no active neighbor keeps it and halts. The rest drop the colors their
/// halted neighbors now hold and try again.
///
/// If the palette has fewer than max-degree + 1 colors it is extended first
/// (see [`Palette::extended_to`]).
pub fn color_randomized(g: &DiversityGraph, palette: &Palette, seed: u64, opts: RandomizedOptions) -> Result<Coloring> {
    let n = g.len();
    let universe = palette.extended_to(g.max_degree() + 1);
    let cap = opts.round_cap.unwrap_or(100 * ceil_log2_succ(n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lists: Vec<Vec<usize>> = (0..n).map(|v| (0..=g.degree(v)).collect()).collect();
    let mut color: Vec<Option<usize>> = vec![None; n];
    let mut pick = vec![0; n];
    let mut remaining = n;
    let mut rounds = 0;

    while remaining > 0 {
        if rounds == cap {
            return Err(Error::RoundCap(cap));
        }
        rounds += 1;
        for v in 0..n {
            if color[v].is_none() {
                pick[v] = lists[v][rng.gen_range(0..lists[v].len())];
            }
        }
        let halting: Vec<usize> = (0..n)
            .filter(|&v| color[v].is_none() && g.neighbors(v).iter().all(|&w| color[w].is_some() || pick[w] != pick[v]))
            .collect();
        for &v in &halting {
            color[v] = Some(pick[v]);
        }
        remaining -= halting.len();
        for v in 0..n {
            if color[v].is_none() {
                let list = &mut lists[v];
                list.retain(|&c| g.neighbors(v).iter().all(|&w| color[w] != Some(c)));
                debug_assert!(!list.is_empty());
            }
        }
    }
    tracing::debug!(n, rounds, "randomized coloring done");
    let assignment = color.into_iter().map(|c| c.expect("all vertices halted")).collect();
    Coloring::new(universe, assignment, Algorithm::Randomized, rounds, seed)
}

fn first_free(g: &DiversityGraph, v: usize, color: &[Option<usize>], k: usize) -> impl Iterator<Item = usize> {
    let mut used = vec![false; k];
    for &w in g.neighbors(v) {
        if let Some(c) = color[w] {
            used[c] = true;
        }
    }
    (0..k).filter(move |&c| !used[c])
}

/// First-fit in descending degree order (ties by vertex index), trying colors
/// strongest first.
pub fn color_greedy(g: &DiversityGraph, palette: &Palette) -> Result<Coloring> {
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&v| (Reverse(g.degree(v)), v));
    let mut color = vec![None; g.len()];
    for v in order {
        let c = first_free(g, v, &color, palette.len())
            .next()
            .ok_or(Error::PaletteExhausted { vertex: v, size: palette.len() })?;
        color[v] = Some(c);
    }
    let assignment = color.into_iter().map(Option::unwrap).collect();
    Coloring::new(palette.clone(), assignment, Algorithm::Greedy, 1, 0)
}

/// Visit vertices grouped by substation, in `substation_order` (unlisted
/// substations last, by id), and give each a uniformly random color not held
/// by an already-colored neighbor.
pub fn color_sequential(
    g: &DiversityGraph,
    palette: &Palette,
    substation_order: &[SubstationId],
    seed: u64,
) -> Result<Coloring> {
    let rank: HashMap<SubstationId, usize> = substation_order.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&v| {
        let s = g.node(v).substation_id;
        (rank.get(&s).copied().unwrap_or(usize::MAX), s, v)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut color = vec![None; g.len()];
    for v in order {
        let free: Vec<usize> = first_free(g, v, &color, palette.len()).collect();
        if free.is_empty() {
            return Err(Error::PaletteExhausted { vertex: v, size: palette.len() });
        }
        color[v] = Some(free[rng.gen_range(0..free.len())]);
    }
    let assignment = color.into_iter().map(Option::unwrap).collect();
    Coloring::new(palette.clone(), assignment, Algorithm::Sequential, 1, seed)
}
