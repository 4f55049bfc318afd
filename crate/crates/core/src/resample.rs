//! Moser–Tardos style repair: while some condition is violated, redraw the
//! random variables of the first violated event and re-check.
//!
//! Counts are maintained incrementally. Redrawing the scope `U` touches the
//! rows of `U` (recomputed) and of their neighbors outside `U` (adjusted by
//! one neighbor's old and new contribution each).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditions::{count_conditions, first_violation, ConditionCounts, Event};
use crate::graph::{Graph, Vertex};
use crate::params::ConstructionParams;
use crate::partition::{check_regular, coin_of, PartitionError, VertexPartition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResampleOutcome {
    pub partition: VertexPartition,
    pub rounds: usize,
}

/// Error carrying the last partition reached, for callers that continue
/// best-effort.
#[derive(Debug, Clone)]
pub struct Exhausted {
    pub error: PartitionError,
    pub last: VertexPartition,
}

struct Repair<'a> {
    g: &'a Graph,
    p: &'a ConstructionParams,
    vp: VertexPartition,
    counts: ConditionCounts,
    rng: ChaCha8Rng,
    in_scope: Vec<bool>,
}

impl Repair<'_> {
    fn redraw_scope(&mut self, centre: Vertex, with_coins: bool) {
        let g = self.g;
        let layout = self.vp.layout();
        let mut scope: Vec<Vertex> = g.neighbors(centre).to_vec();
        scope.push(centre);
        scope.sort_unstable();
        let old_bins: Vec<u32> = scope.iter().map(|&u| self.vp.bin(u)).collect();
        for &u in &scope {
            self.in_scope[u] = true;
            let x = self.rng.random();
            self.vp.set_x(u, x);
        }
        let old_coins: Vec<bool> = g
            .incident(centre)
            .iter()
            .map(|&e| self.vp.coins()[e])
            .collect();
        if with_coins {
            for &e in g.incident(centre) {
                let c = coin_of(self.rng.random(), self.p.alpha_num, self.p.d);
                self.vp.set_coin(e, c);
            }
        }
        for (idx, &u) in scope.iter().enumerate() {
            let (old_bin, new_bin) = (old_bins[idx], self.vp.bin(u));
            for (pos, (&w, &e)) in g.neighbors(u).iter().zip(g.incident(u)).enumerate() {
                if self.in_scope[w] {
                    continue;
                }
                let new_coin = self.vp.coins()[e];
                let old_coin = if u == centre {
                    old_coins[pos]
                } else {
                    new_coin
                };
                if old_bin == new_bin && old_coin == new_coin {
                    continue;
                }
                let own = self.vp.bin(w);
                let row = &mut self.counts.vertices[w];
                row.apply(&layout, own, old_bin, old_coin, false);
                row.apply(&layout, own, new_bin, new_coin, true);
            }
        }
        for &u in &scope {
            self.counts.vertices[u] = crate::conditions::vertex_counts(g, &self.vp, u);
        }
        for (idx, &u) in scope.iter().enumerate() {
            self.in_scope[u] = false;
            let (ob, nb) = (old_bins[idx], self.vp.bin(u));
            if ob != nb {
                self.shift_bin(ob, nb);
            }
        }
        self.refresh_level_sizes();
    }

    fn shift_bin(&mut self, from: u32, to: u32) {
        let prefix = &mut self.counts.prefix;
        // prefix[i-1] counts bins 1..=i
        if from < to {
            for p in &mut prefix[from as usize - 1..to as usize - 1] {
                *p -= 1;
            }
        } else {
            for p in &mut prefix[to as usize - 1..from as usize - 1] {
                *p += 1;
            }
        }
    }

    fn refresh_level_sizes(&mut self) {
        let layout = self.vp.layout();
        let mut sizes = [0usize; 13];
        let top = layout.big_bins();
        let mut prev = if top == 0 {
            0
        } else {
            self.counts.prefix[top - 1]
        };
        for bin in top + 1..=self.p.d {
            let cur = self.counts.prefix[bin - 1];
            let l = layout.level(bin as u32);
            sizes[l as usize - 1] += cur - prev;
            prev = cur;
        }
        self.counts.level_sizes = sizes;
    }

    fn redraw_all(&mut self) {
        for v in 0..self.g.n() {
            let x = self.rng.random();
            self.vp.set_x(v, x);
        }
        self.counts = count_conditions(self.g, self.p, &self.vp);
    }

    fn resample(&mut self, ev: Event) {
        match ev {
            Event::VertexSmallLevel { v, .. }
            | Event::VertexSmall { v }
            | Event::VertexWindow { v } => self.redraw_scope(v, false),
            Event::VertexCorrected { v } => self.redraw_scope(v, true),
            Event::BinPrefix { .. } | Event::LevelSize { .. } => self.redraw_all(),
        }
    }
}

/// Repairs `vp` until every condition holds, using at most `budget` rounds.
///
/// An already-valid partition is returned unchanged with zero rounds.
pub fn resample_until_valid(
    g: &Graph,
    p: &ConstructionParams,
    vp: VertexPartition,
    budget: usize,
    seed: u64,
) -> Result<ResampleOutcome, Box<Exhausted>> {
    if let Err(error) = check_regular(g, p) {
        return Err(Box::new(Exhausted { error, last: vp }));
    }
    let counts = count_conditions(g, p, &vp);
    let mut st = Repair {
        g,
        p,
        vp,
        counts,
        rng: ChaCha8Rng::seed_from_u64(seed),
        in_scope: vec![false; g.n()],
    };
    let mut rounds = 0;
    while let Some(ev) = first_violation(p, &st.vp, &st.counts) {
        if rounds == budget {
            st.vp.rebuild_order();
            return Err(Box::new(Exhausted {
                error: PartitionError::BudgetExhausted { budget },
                last: st.vp,
            }));
        }
        st.resample(ev);
        rounds += 1;
    }
    st.vp.rebuild_order();
    Ok(ResampleOutcome {
        partition: st.vp,
        rounds,
    })
}

/// Incrementally maintained counts, exposed for testing the bookkeeping.
#[doc(hidden)]
pub fn redraw_and_count(
    g: &Graph,
    p: &ConstructionParams,
    vp: VertexPartition,
    centres: &[(Vertex, bool)],
    seed: u64,
) -> (VertexPartition, ConditionCounts) {
    let counts = count_conditions(g, p, &vp);
    let mut st = Repair {
        g,
        p,
        vp,
        counts,
        rng: ChaCha8Rng::seed_from_u64(seed),
        in_scope: vec![false; g.n()],
    };
    for &(v, coins) in centres {
        st.redraw_scope(v, coins);
    }
    st.vp.rebuild_order();
    (st.vp, st.counts)
}
