//! Exact evaluation of the six concentration conditions a partition must
//! satisfy before the weighting steps run.

use crate::graph::{Graph, Vertex};
use crate::par;
use crate::params::ConstructionParams;
use crate::partition::{BinLayout, Level, VertexPartition};

/// Per-vertex counts the conditions are stated in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VertexCounts {
    /// `deg_{S_l}(v)` at index `l - 1`.
    pub small: [u32; 13],
    /// Neighbors of `v` in its window (zero for v in S).
    pub window: u32,
    /// Window edges labeled corrected.
    pub corrected: u32,
}

impl VertexCounts {
    pub fn deg_small(&self) -> u32 {
        self.small.iter().sum()
    }

    /// Adds (`sign = 1`) or removes (`sign = -1`) one neighbor's contribution.
    #[inline]
    pub(crate) fn apply(
        &mut self,
        layout: &BinLayout,
        own_bin: u32,
        other_bin: u32,
        coin: bool,
        add: bool,
    ) {
        let step = |c: &mut u32| {
            if add {
                *c += 1
            } else {
                *c -= 1
            }
        };
        let l = layout.level(other_bin);
        if l > 0 {
            step(&mut self.small[l as usize - 1]);
        }
        if layout.in_window(own_bin, other_bin) {
            step(&mut self.window);
            if coin {
                step(&mut self.corrected);
            }
        }
    }
}

pub(crate) fn vertex_counts(g: &Graph, vp: &VertexPartition, v: Vertex) -> VertexCounts {
    let layout = vp.layout();
    let own = vp.bin(v);
    let mut c = VertexCounts::default();
    for (&u, &e) in g.neighbors(v).iter().zip(g.incident(v)) {
        c.apply(&layout, own, vp.bin(u), vp.coins()[e], true);
    }
    c
}

/// All counted quantities for a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionCounts {
    pub vertices: Vec<VertexCounts>,
    /// `|B_1 ∪ ... ∪ B_i|` at index `i - 1`, for `i` in `1..=d`.
    pub prefix: Vec<usize>,
    /// `|S_l|` at index `l - 1`.
    pub level_sizes: [usize; 13],
}

fn bin_summaries(vp: &VertexPartition, n: usize, d: usize) -> (Vec<usize>, [usize; 13]) {
    let mut bins = vec![0usize; d + 1];
    let mut level_sizes = [0usize; 13];
    for v in 0..n {
        bins[vp.bin(v) as usize] += 1;
        let l = vp.level(v);
        if l > 0 {
            level_sizes[l as usize - 1] += 1;
        }
    }
    let mut prefix = Vec::with_capacity(d);
    let mut acc = 0;
    for &b in &bins[1..] {
        acc += b;
        prefix.push(acc);
    }
    (prefix, level_sizes)
}

pub fn count_conditions(
    g: &Graph,
    p: &ConstructionParams,
    vp: &VertexPartition,
) -> ConditionCounts {
    let vertices = par::map_range(g.n(), |v| vertex_counts(g, vp, v));
    let (prefix, level_sizes) = bin_summaries(vp, g.n(), p.d);
    ConditionCounts {
        vertices,
        prefix,
        level_sizes,
    }
}

pub fn count_conditions_sequential(
    g: &Graph,
    p: &ConstructionParams,
    vp: &VertexPartition,
) -> ConditionCounts {
    let vertices = (0..g.n()).map(|v| vertex_counts(g, vp, v)).collect();
    let (prefix, level_sizes) = bin_summaries(vp, g.n(), p.d);
    ConditionCounts {
        vertices,
        prefix,
        level_sizes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// `deg_{S_l}(v)` concentration.
    VertexSmallLevel,
    /// `deg_S(v)` concentration.
    VertexSmall,
    /// Window count concentration for v in B.
    VertexWindow,
    /// Corrected window count concentration for v in B.
    VertexCorrected,
    /// Bin prefix sizes.
    BinPrefix,
    /// `|S_l|` sizes.
    LevelSize,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::VertexSmallLevel,
        Family::VertexSmall,
        Family::VertexWindow,
        Family::VertexCorrected,
        Family::BinPrefix,
        Family::LevelSize,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::VertexSmallLevel => "C_vSi",
            Family::VertexSmall => "C_vS",
            Family::VertexWindow => "C_vB",
            Family::VertexCorrected => "C_vB'",
            Family::BinPrefix => "C_i",
            Family::LevelSize => "C_Si",
        }
    }
}

/// A single bad event, identified by family and witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    VertexSmallLevel { v: Vertex, level: Level },
    VertexSmall { v: Vertex },
    VertexWindow { v: Vertex },
    VertexCorrected { v: Vertex },
    BinPrefix { i: usize },
    LevelSize { level: Level },
}

impl Event {
    pub fn family(&self) -> Family {
        match self {
            Event::VertexSmallLevel { .. } => Family::VertexSmallLevel,
            Event::VertexSmall { .. } => Family::VertexSmall,
            Event::VertexWindow { .. } => Family::VertexWindow,
            Event::VertexCorrected { .. } => Family::VertexCorrected,
            Event::BinPrefix { .. } => Family::BinPrefix,
            Event::LevelSize { .. } => Family::LevelSize,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyStatus {
    pub family: Family,
    pub pass: bool,
    pub checked: usize,
    pub violations: usize,
    /// Event with the smallest margin, if anything was checked.
    pub worst: Option<Event>,
    /// Smallest distance to an interval end over all checked items; negative
    /// when violated, `+inf` when nothing was checked.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub families: [FamilyStatus; 6],
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.families.iter().all(|f| f.pass)
    }

    pub fn family(&self, f: Family) -> &FamilyStatus {
        &self.families[f as usize]
    }

    pub fn total_violations(&self) -> usize {
        self.families.iter().map(|f| f.violations).sum()
    }
}

/// The closed intervals each counted quantity must fall in.
#[derive(Debug, Clone, Copy)]
pub struct Intervals {
    slack: f64,
    s_star: f64,
    alpha: f64,
    n_over_d: f64,
    prefix_slack: f64,
}

impl Intervals {
    pub fn new(p: &ConstructionParams) -> Self {
        let (n, d) = (p.n as f64, p.d as f64);
        Intervals {
            slack: p.slack(),
            s_star: p.s_star as f64,
            alpha: p.alpha(),
            n_over_d: n / d,
            prefix_slack: n * d.powf(p.gamma) / d.sqrt(),
        }
    }

    pub fn small_level(&self) -> (f64, f64) {
        let c = self.s_star / 13.0;
        (c - self.slack, c + self.slack)
    }

    pub fn small(&self) -> (f64, f64) {
        (
            self.s_star - 13.0 * self.slack,
            self.s_star + 13.0 * self.slack,
        )
    }

    /// For v in B_i.
    pub fn window(&self, bin: u32) -> (f64, f64) {
        let c = bin as f64 - 1.0;
        (c - self.slack, c + self.slack)
    }

    pub fn corrected(&self, bin: u32) -> (f64, f64) {
        let c = self.alpha * (bin as f64 - 1.0);
        (c - self.alpha * self.slack, c + self.alpha * self.slack)
    }

    pub fn prefix(&self, i: usize) -> (f64, f64) {
        let c = i as f64 * self.n_over_d;
        (c - self.prefix_slack, c + self.prefix_slack)
    }

    pub fn level_size(&self) -> (f64, f64) {
        let c = self.s_star * self.n_over_d / 13.0;
        (c - 2.0 * self.prefix_slack, c + 2.0 * self.prefix_slack)
    }
}

#[inline]
fn margin(value: f64, (lo, hi): (f64, f64)) -> f64 {
    (value - lo).min(hi - value)
}

/// Per-vertex events in family order: all `C_vSi`, then `C_vS`, then the
/// two window conditions.
pub(crate) fn vertex_margins(
    iv: &Intervals,
    vp: &VertexPartition,
    v: Vertex,
    c: &VertexCounts,
    mut visit: impl FnMut(Event, f64),
) {
    for (l, &k) in c.small.iter().enumerate() {
        visit(
            Event::VertexSmallLevel {
                v,
                level: (l + 1) as Level,
            },
            margin(k as f64, iv.small_level()),
        );
    }
    visit(
        Event::VertexSmall { v },
        margin(c.deg_small() as f64, iv.small()),
    );
    if vp.in_big(v) {
        let bin = vp.bin(v);
        visit(
            Event::VertexWindow { v },
            margin(c.window as f64, iv.window(bin)),
        );
        visit(
            Event::VertexCorrected { v },
            margin(c.corrected as f64, iv.corrected(bin)),
        );
    }
}

pub(crate) fn global_margins(
    iv: &Intervals,
    counts: &ConditionCounts,
    mut visit: impl FnMut(Event, f64),
) {
    for (i, &size) in counts.prefix.iter().enumerate() {
        visit(
            Event::BinPrefix { i: i + 1 },
            margin(size as f64, iv.prefix(i + 1)),
        );
    }
    for (l, &size) in counts.level_sizes.iter().enumerate() {
        visit(
            Event::LevelSize {
                level: (l + 1) as Level,
            },
            margin(size as f64, iv.level_size()),
        );
    }
}

/// Builds the report from precomputed counts.
pub fn evaluate(
    p: &ConstructionParams,
    vp: &VertexPartition,
    counts: &ConditionCounts,
) -> ConditionReport {
    let iv = Intervals::new(p);
    let mut families = Family::ALL.map(|family| FamilyStatus {
        family,
        pass: true,
        checked: 0,
        violations: 0,
        worst: None,
        margin: f64::INFINITY,
    });
    let mut record = |ev: Event, m: f64| {
        let st = &mut families[ev.family() as usize];
        st.checked += 1;
        if m < 0.0 {
            st.pass = false;
            st.violations += 1;
        }
        if m < st.margin {
            st.margin = m;
            st.worst = Some(ev);
        }
    };
    for (v, c) in counts.vertices.iter().enumerate() {
        vertex_margins(&iv, vp, v, c, &mut record);
    }
    global_margins(&iv, counts, &mut record);
    ConditionReport { families }
}

pub fn check_conditions(
    g: &Graph,
    p: &ConstructionParams,
    vp: &VertexPartition,
) -> ConditionReport {
    evaluate(p, vp, &count_conditions(g, p, vp))
}

pub fn check_conditions_sequential(
    g: &Graph,
    p: &ConstructionParams,
    vp: &VertexPartition,
) -> ConditionReport {
    evaluate(p, vp, &count_conditions_sequential(g, p, vp))
}

/// The first violated event in (family, witness) order, if any.
pub fn first_violation(
    p: &ConstructionParams,
    vp: &VertexPartition,
    counts: &ConditionCounts,
) -> Option<Event> {
    let iv = Intervals::new(p);
    let mut best: Option<Event> = None;
    let mut note = |ev: Event, m: f64| {
        if m < 0.0 && best.is_none_or(|b| ev < b) {
            best = Some(ev);
        }
    };
    for (v, c) in counts.vertices.iter().enumerate() {
        vertex_margins(&iv, vp, v, c, &mut note);
    }
    global_margins(&iv, counts, &mut note);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family as GraphFamily, GraphFamilySpec};
    use crate::params::derive_params;

    #[test]
    fn event_order_is_family_then_witness() {
        let a = Event::VertexSmallLevel { v: 9, level: 13 };
        let b = Event::VertexSmall { v: 0 };
        let c = Event::VertexWindow { v: 0 };
        assert!(a < b && b < c);
        assert!(Event::VertexSmall { v: 1 } < Event::VertexSmall { v: 2 });
        assert!(Event::VertexCorrected { v: 99 } < Event::BinPrefix { i: 1 });
    }

    #[test]
    fn empty_small_degree_fails_item_two() {
        // hand-built: s* large enough that s* - 13 d^(1/2+gamma) > 0
        let g = generate(&GraphFamilySpec::random_regular(1000, 500, 2)).unwrap();
        let mut p = derive_params(1000, 500, 0.24, 0.001).unwrap();
        p.s_star = 390;
        assert!(p.s_star as f64 - 13.0 * p.slack() > 0.0);
        // every vertex in bin 1 (B), so nobody has a neighbor in S
        let vp = VertexPartition::from_draws(&g, &p, vec![0; 1000], vec![false; g.m()]).unwrap();
        let report = check_conditions(&g, &p, &vp);
        let item2 = report.family(Family::VertexSmall);
        assert!(!item2.pass);
        assert_eq!(item2.violations, 1000);
        assert_eq!(item2.worst, Some(Event::VertexSmall { v: 0 }));
        assert!(!report.pass());
    }

    #[test]
    fn k4_forced_parameters_fail() {
        let g = generate(&GraphFamilySpec {
            n: Some(4),
            ..GraphFamilySpec::new(GraphFamily::Complete)
        })
        .unwrap();
        let p = derive_params(4, 3, 0.1, 0.04).unwrap();
        // all four vertices in the top bin, i.e. S_13
        let vp = VertexPartition::from_draws(&g, &p, vec![u64::MAX; 4], vec![true; 6]).unwrap();
        let report = check_conditions(&g, &p, &vp);
        assert!(!report.pass());
        let item1 = report.family(Family::VertexSmallLevel);
        assert_eq!(item1.violations, 4);
        assert_eq!(
            item1.worst,
            Some(Event::VertexSmallLevel { v: 0, level: 13 })
        );
        assert_eq!(
            first_violation(&p, &vp, &count_conditions(&g, &p, &vp)),
            Some(Event::VertexSmallLevel { v: 0, level: 13 })
        );
    }

    #[test]
    fn deterministic_and_seq_parallel_agree() {
        let g = generate(&GraphFamilySpec::random_regular(600, 200, 4)).unwrap();
        let p = derive_params(600, 200, 0.1, 0.04).unwrap();
        let vp = crate::partition::sample_partition(&g, &p, 3).unwrap();
        let a = check_conditions(&g, &p, &vp);
        let b = check_conditions(&g, &p, &vp);
        let c = check_conditions_sequential(&g, &p, &vp);
        assert_eq!(a, b);
        assert_eq!(a, c);
        for (v, row) in count_conditions(&g, &p, &vp).vertices.iter().enumerate() {
            // deg_B(v) + deg_S(v) = d
            let big = g.neighbors(v).iter().filter(|&&u| vp.in_big(u)).count() as u32;
            assert_eq!(big + row.deg_small(), 200);
        }
    }
}
