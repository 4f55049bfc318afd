//! Distinguishing the small set.
//!
//! Every processed vertex `v` of S is pinned to a two-element class
//! `AP_v = {2λq + a, (2λ+1)q + a}` and stays inside it for the rest of the
//! run: a later neighbor may move `v` between the two members of its class by
//! adding `q` (when `v` sits on the lower member) or subtracting `q` (upper
//! member) on their shared edge, never anything else. Within each level S_l
//! the classes are pairwise distinct, so S_l ends up with distinct weights.

use std::collections::HashSet;

use thiserror::Error;

use crate::construct::order::SOrdering;
use crate::graph::{EdgeId, Graph, Vertex};
use crate::params::ConstructionParams;
use crate::partition::VertexPartition;
use crate::weighting::vertex_weights;

/// One member of the family `{2λq + a, (2λ+1)q + a}`, `0 <= a < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApClass {
    pub lambda: u64,
    pub a: u64,
    pub q: u64,
}

impl ApClass {
    /// The unique class containing `w`.
    pub fn of(w: u64, q: u64) -> Self {
        ApClass {
            lambda: (w / q) / 2,
            a: w % q,
            q,
        }
    }

    pub fn members(&self) -> (u64, u64) {
        let lo = 2 * self.lambda * self.q + self.a;
        (lo, lo + self.q)
    }

    pub fn contains(&self, w: u64) -> bool {
        let (lo, hi) = self.members();
        w == lo || w == hi
    }

    pub fn is_lower(&self, w: u64) -> bool {
        self.members().0 == w
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Step3Error {
    #[error("Step 3 infeasible at this scale: deg_S({v}) = {deg_small} < 4*|S_{level}|/q + 2 with |S_{level}| = {level_size}, q = {q}")]
    Guard {
        v: Vertex,
        deg_small: usize,
        level: u8,
        level_size: usize,
        q: u64,
    },
    #[error("Step 3 infeasible at this scale: every reachable weight of vertex {v} is blocked")]
    Blocked { v: Vertex },
    #[error(
        "Step 3 infeasible at this scale: no shift of edge {{{r}, {t}}} keeps both classes sparse"
    )]
    PairShift { r: Vertex, t: Vertex },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step3Result {
    pub f3: Vec<u64>,
    /// `AP_v` for every vertex of S; `None` for B.
    pub classes: Vec<Option<ApClass>>,
    /// Final vertex weights under `f12 + f3`.
    pub weights: Vec<u64>,
}

struct Scheduler<'a> {
    g: &'a Graph,
    vp: &'a VertexPartition,
    order: &'a SOrdering,
    q: u64,
    f3: Vec<u64>,
    w: Vec<u64>,
    classes: Vec<Option<ApClass>>,
    /// Per level (index l - 1): taken classes and per-residue counts.
    taken: Vec<HashSet<ApClass>>,
    residue_count: Vec<Vec<usize>>,
    level_size: [usize; 13],
}

impl Scheduler<'_> {
    fn small_edges(&self, v: Vertex) -> impl Iterator<Item = (Vertex, EdgeId)> + '_ {
        self.g
            .neighbors(v)
            .iter()
            .zip(self.g.incident(v))
            .filter(|(&u, _)| !self.vp.in_big(u))
            .map(|(&u, &e)| (u, e))
    }

    fn guard(&self, v: Vertex) -> Result<(), Step3Error> {
        let level = self.vp.level(v);
        let size = self.level_size[level as usize - 1];
        let deg = self.small_edges(v).count();
        // 4|S_t|/q + 2 <= deg_S(v), cleared of the division
        if 4 * size as u64 + 2 * self.q > deg as u64 * self.q {
            return Err(Step3Error::Guard {
                v,
                deg_small: deg,
                level,
                level_size: size,
                q: self.q,
            });
        }
        Ok(())
    }

    fn add(&mut self, e: EdgeId, amount: u64) {
        let (a, b) = self.g.edge(e);
        self.f3[e] += amount;
        self.w[a] += amount;
        self.w[b] += amount;
    }

    fn sub(&mut self, e: EdgeId, amount: u64) {
        let (a, b) = self.g.edge(e);
        self.f3[e] -= amount;
        self.w[a] -= amount;
        self.w[b] -= amount;
    }

    /// Splits the admissible `±q` moves of `v` into raising and lowering
    /// edges. Backward edges come first (ascending neighbor), then forward
    /// edges other than those in `skip`.
    fn moves(&self, v: Vertex, skip: &[EdgeId], allow_forward: bool) -> (Vec<EdgeId>, Vec<EdgeId>) {
        let pos = self.order.position[v];
        let mut up = Vec::new();
        let mut down = Vec::new();
        let mut forward = Vec::new();
        for (u, e) in self.small_edges(v) {
            if skip.contains(&e) {
                continue;
            }
            if self.order.position[u] < pos {
                let class = self.classes[u].expect("earlier vertices are settled");
                if class.is_lower(self.w[u]) {
                    up.push(e);
                } else {
                    down.push(e);
                }
            } else if allow_forward {
                forward.push(e);
            }
        }
        up.extend(forward);
        (up, down)
    }

    /// Moves `v` to the smallest reachable weight whose class is free in its
    /// level, then records that class.
    fn settle(&mut self, v: Vertex, up: &[EdgeId], down: &[EdgeId]) -> Result<ApClass, Step3Error> {
        let level = self.vp.level(v) as usize - 1;
        let base = self.w[v];
        let lowest = base - down.len() as u64 * self.q;
        let steps = (down.len() + up.len()) as u64;
        let chosen = (0..=steps)
            .map(|i| lowest + i * self.q)
            .find(|&val| !self.taken[level].contains(&ApClass::of(val, self.q)))
            .ok_or(Step3Error::Blocked { v })?;
        if chosen < base {
            let k = ((base - chosen) / self.q) as usize;
            for &e in &down[..k] {
                self.sub(e, self.q);
            }
        } else {
            let k = ((chosen - base) / self.q) as usize;
            for &e in &up[..k] {
                self.add(e, self.q);
            }
        }
        debug_assert_eq!(self.w[v], chosen);
        let class = ApClass::of(chosen, self.q);
        self.taken[level].insert(class);
        self.residue_count[level][class.a as usize] += 1;
        self.classes[v] = Some(class);
        debug_assert!(self.backward_neighbors_in_class(v));
        Ok(class)
    }

    fn backward_neighbors_in_class(&self, v: Vertex) -> bool {
        self.small_edges(v)
            .all(|(u, _)| self.classes[u].is_none_or(|c| c.contains(self.w[u])))
    }

    fn process_vertex(&mut self, v: Vertex) -> Result<(), Step3Error> {
        self.guard(v)?;
        let level = self.vp.level(v) as usize - 1;
        let pos = self.order.position[v];
        let first_forward = self
            .small_edges(v)
            .find(|&(u, _)| self.order.position[u] > pos)
            .map(|(_, e)| e)
            .expect("ordering guarantees a forward edge");
        let a = pick_residue(&self.residue_count[level]);
        let delta = (a + self.q - self.w[v] % self.q) % self.q;
        self.add(first_forward, delta);
        let (up, down) = self.moves(v, &[first_forward], true);
        self.settle(v, &up, &down)?;
        Ok(())
    }

    fn process_pair(&mut self, r: Vertex, t: Vertex) -> Result<(), Step3Error> {
        self.guard(r)?;
        self.guard(t)?;
        let level = self.vp.level(r) as usize - 1;
        let shared = self.g.edge_id(r, t).expect("r and t are adjacent");
        let q = self.q;
        let limit = 2 * self.level_size[level];
        let counts = &self.residue_count[level];
        let (wr, wt) = (self.w[r], self.w[t]);
        let score = |delta: u64| {
            let cr = counts[((wr + delta) % q) as usize];
            let ct = counts[((wt + delta) % q) as usize];
            (cr.max(ct), delta, cr, ct)
        };
        let (_, delta, cr, ct) = (0..q).map(score).min().unwrap();
        // each class may hold at most 2|S_13|/q earlier classes
        if cr as u64 * q > limit as u64 || ct as u64 * q > limit as u64 {
            return Err(Step3Error::PairShift { r, t });
        }
        self.add(shared, delta);
        let (up, down) = self.moves(r, &[shared], false);
        self.settle(r, &up, &down)?;
        let (up, down) = self.moves(t, &[shared], false);
        self.settle(t, &up, &down)?;
        Ok(())
    }
}

/// Residue whose congruence class holds the fewest earlier classes of the
/// level; ties go to the smallest residue.
pub fn pick_residue(counts: &[usize]) -> u64 {
    (0..counts.len())
        .min_by_key(|&a| (counts[a], a))
        .unwrap_or(0) as u64
}

pub fn step3_distinguish_small(
    g: &Graph,
    p: &ConstructionParams,
    vp: &VertexPartition,
    f12: &[u64],
    order: &SOrdering,
) -> Result<Step3Result, Step3Error> {
    let q = p.q.max(1);
    let mut f3 = vec![0u64; g.m()];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if !vp.in_big(a) && !vp.in_big(b) {
            f3[e] = q;
        }
    }
    let total: Vec<u64> = f12.iter().zip(&f3).map(|(x, y)| x + y).collect();
    let w = vertex_weights(g, &total).expect("f12 covers every edge");
    let mut level_size = [0usize; 13];
    for &v in &order.order {
        level_size[vp.level(v) as usize - 1] += 1;
    }
    let mut s = Scheduler {
        g,
        vp,
        order,
        q,
        f3,
        w,
        classes: vec![None; g.n()],
        taken: vec![HashSet::new(); 13],
        residue_count: vec![vec![0; q as usize]; 13],
        level_size,
    };
    let mut pair_of = vec![None; g.n()];
    for (&r, &t) in order.r.iter().zip(&order.t) {
        pair_of[r] = Some(t);
    }
    let mut i = 0;
    while i < order.order.len() {
        let v = order.order[i];
        if let Some(t) = pair_of[v] {
            debug_assert_eq!(order.order.get(i + 1), Some(&t));
            s.process_pair(v, t)?;
            i += 2;
        } else {
            s.process_vertex(v)?;
            i += 1;
        }
    }
    Ok(Step3Result {
        f3: s.f3,
        classes: s.classes,
        weights: s.w,
    })
}

/// Invariants every successful run satisfies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step3Violation {
    OutsideClass { v: Vertex, weight: u64 },
    SharedClass { u: Vertex, v: Vertex },
    EdgeOutOfRange { e: EdgeId, value: u64 },
    SupportOutsideSmall { e: EdgeId },
    WeightMismatch { v: Vertex },
}

pub fn check_step3(
    g: &Graph,
    p: &ConstructionParams,
    vp: &VertexPartition,
    f12: &[u64],
    res: &Step3Result,
) -> Result<(), Step3Violation> {
    let q = p.q.max(1);
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let value = res.f3[e];
        if (vp.in_big(a) || vp.in_big(b)) && value != 0 {
            return Err(Step3Violation::SupportOutsideSmall { e });
        }
        if value > 3 * q {
            return Err(Step3Violation::EdgeOutOfRange { e, value });
        }
    }
    let total: Vec<u64> = f12.iter().zip(&res.f3).map(|(x, y)| x + y).collect();
    let w = vertex_weights(g, &total).expect("layers cover every edge");
    let mut seen: Vec<std::collections::HashMap<ApClass, Vertex>> = vec![Default::default(); 13];
    for v in 0..g.n() {
        if w[v] != res.weights[v] {
            return Err(Step3Violation::WeightMismatch { v });
        }
        if vp.in_big(v) {
            continue;
        }
        let class = res.classes[v].ok_or(Step3Violation::OutsideClass { v, weight: w[v] })?;
        if !class.contains(w[v]) {
            return Err(Step3Violation::OutsideClass { v, weight: w[v] });
        }
        if let Some(&u) = seen[vp.level(v) as usize - 1].get(&class) {
            return Err(Step3Violation::SharedClass { u, v });
        }
        seen[vp.level(v) as usize - 1].insert(class, v);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::order::build_s_order;

    #[test]
    fn classes_partition_the_integers() {
        for q in 1..7u64 {
            let mut hit = vec![0; (40 * q) as usize];
            for lambda in 0..20 {
                for a in 0..q {
                    let (lo, hi) = ApClass { lambda, a, q }.members();
                    assert_ne!(lo, hi);
                    assert_eq!(lo % q, a);
                    assert_eq!(hi % q, a);
                    for x in [lo, hi] {
                        if (x as usize) < hit.len() {
                            hit[x as usize] += 1;
                        }
                    }
                }
            }
            assert!(hit.iter().all(|&h| h == 1), "q = {q}");
            for w in 0..100 {
                assert!(ApClass::of(w, q).contains(w));
            }
        }
    }

    #[test]
    fn lower_and_upper_members() {
        let c = ApClass::of(9, 4); // 9 = 2*4 + 1 -> lambda 1, a 1, lower member
        assert_eq!(
            c,
            ApClass {
                lambda: 1,
                a: 1,
                q: 4
            }
        );
        assert!(c.is_lower(9));
        assert!(!c.is_lower(13));
        assert!(c.contains(13));
    }

    #[test]
    fn residue_with_fewest_prior_classes() {
        // q = 4: three earlier classes in C_2, one in C_0, two each in C_1, C_3
        assert_eq!(pick_residue(&[1, 2, 3, 2]), 0);
        assert_eq!(pick_residue(&[3, 1, 3, 1]), 1);
        assert_eq!(pick_residue(&[0, 0, 0, 0]), 0);
    }

    fn params(d: usize, q: u64) -> ConstructionParams {
        ConstructionParams {
            n: 0,
            d,
            epsilon: 0.1,
            gamma: 0.04,
            s_star: 13,
            omega: 2,
            alpha_num: d as u64,
            q,
            step2_offset: 0,
            f2_cap: 1,
            forward_range: 3 * q,
        }
    }

    #[test]
    fn guard_rejects_low_small_degree() {
        // C_4 entirely in S_13: deg_S = 2, |S_13| = 4, q = 4 gives 4*4/4 + 2 = 6
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let mut p = params(26, 4);
        p.n = 4;
        let vp = VertexPartition::from_draws(&g, &p, vec![u64::MAX; 4], vec![false; 4]).unwrap();
        let order = build_s_order(&g, &vp).unwrap();
        let err = step3_distinguish_small(&g, &p, &vp, &[1; 4], &order).unwrap_err();
        assert!(matches!(
            err,
            Step3Error::Guard {
                deg_small: 2,
                level: 13,
                level_size: 4,
                q: 4,
                ..
            }
        ));
    }

    #[test]
    fn complete_graph_in_one_level() {
        // K_12 in S_13 with q = 1: guard 4*12 + 2 <= 11 fails; with q = 8 it holds
        let n = 12;
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let g = Graph::from_edges(n, edges).unwrap();
        let mut p = params(26, 8);
        p.n = n;
        let x: Vec<u64> = (0..n as u64).map(|v| u64::MAX - v).collect();
        let vp = VertexPartition::from_draws(&g, &p, x, vec![false; g.m()]).unwrap();
        let order = build_s_order(&g, &vp).unwrap();
        let f12 = vec![1u64; g.m()];
        let res = step3_distinguish_small(&g, &p, &vp, &f12, &order).unwrap();
        check_step3(&g, &p, &vp, &f12, &res).unwrap();
        let mut w = res.weights.clone();
        w.sort_unstable();
        w.dedup();
        assert_eq!(w.len(), n);
        p.q = 1;
        assert!(matches!(
            step3_distinguish_small(&g, &p, &vp, &f12, &order),
            Err(Step3Error::Guard { .. })
        ));
    }
}
