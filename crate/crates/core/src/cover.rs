//! Covers: small sets of states whose expected losses determine the expected
//! loss of every vertex in every valid state.
//!
//! Three constructions are provided, picked from the largest set size `m`:
//!
//! * `m = 1`: the all-zeros state plus the `k` indicator states.
//! * `m = 2`: for every pair set `{i, j}` and admissible `b`, an `(i, j, b)`-pair
//!   (two states differing only at `j`, with `i` pinned to `b`, everything else
//!   unfixed). Reconstruction sums pairwise differences `X^{i,j}_b`.
//! * `m >= 3`: vertex `i`'s correlated vertices are split into blocks that never
//!   share a set; for every `(i, b, J)` the cover holds one state per realizable
//!   configuration of `J`. Reconstruction sums per-block differences.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::environment::CorrelationModel;
use crate::error::{Error, Result};
use crate::model::{validate_state, CriteriaState, IncompatibilityGraph};

/// Largest block for which per-configuration family states are built.
pub const MAX_BLOCK_SIZE: usize = 16;

/// Per-vertex partition of correlated vertices into blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationBlocks {
    blocks: Vec<Vec<Vec<usize>>>,
}

impl CorrelationBlocks {
    /// Blocks of vertex `i`, each sorted, ordered by smallest member.
    pub fn of(&self, i: usize) -> &[Vec<usize>] {
        &self.blocks[i]
    }

    /// Accepts any partition of each `corr(i)` in which no correlation set has
    /// members in two different blocks. Coarser than [`correlation_blocks`] is fine.
    pub fn from_partition(model: &CorrelationModel, blocks: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if blocks.len() != model.k() {
            return Err(Error::Dimension {
                expected: model.k(),
                got: blocks.len(),
            });
        }
        let mut normalized = Vec::with_capacity(blocks.len());
        for (i, mut parts) in blocks.into_iter().enumerate() {
            let mut owner = HashMap::new();
            for (p, part) in parts.iter_mut().enumerate() {
                part.sort_unstable();
                for &v in part.iter() {
                    if owner.insert(v, p).is_some() {
                        return Err(Error::InvalidModel(format!("vertex {} appears in two blocks of {}", v + 1, i + 1)));
                    }
                }
            }
            let corr: BTreeSet<usize> = model.local_vertices(i).iter().copied().filter(|&v| v != i).collect();
            if owner.keys().copied().collect::<BTreeSet<_>>() != corr {
                return Err(Error::InvalidModel(format!("blocks of vertex {} do not partition its correlated vertices", i + 1)));
            }
            for set in model.sets() {
                let mut seen = set.members().iter().filter_map(|v| owner.get(v));
                if let Some(first) = seen.next() {
                    if seen.any(|p| p != first) {
                        return Err(Error::InvalidModel(format!(
                            "a correlation set straddles two blocks of vertex {}",
                            i + 1
                        )));
                    }
                }
            }
            parts.sort();
            normalized.push(parts);
        }
        Ok(Self { blocks: normalized })
    }
}

/// Connected components of `corr(i)` under "appears together in some set",
/// where co-occurrence is taken over every set of the model.
pub fn correlation_blocks(model: &CorrelationModel) -> CorrelationBlocks {
    let k = model.k();
    let blocks = (0..k)
        .map(|i| {
            let corr: Vec<usize> = model.local_vertices(i).iter().copied().filter(|&v| v != i).collect();
            let index: HashMap<usize, usize> = corr.iter().enumerate().map(|(p, &v)| (v, p)).collect();
            let mut parent: Vec<usize> = (0..corr.len()).collect();
            fn find(parent: &mut [usize], x: usize) -> usize {
                let mut root = x;
                while parent[root] != root {
                    root = parent[root];
                }
                let mut cur = x;
                while parent[cur] != root {
                    let next = parent[cur];
                    parent[cur] = root;
                    cur = next;
                }
                root
            }
            for set in model.sets() {
                let inside: Vec<usize> = set.members().iter().filter_map(|v| index.get(v).copied()).collect();
                for w in inside.windows(2) {
                    let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for p in 0..corr.len() {
                let root = find(&mut parent, p);
                groups.entry(root).or_default().push(corr[p]);
            }
            let mut out: Vec<Vec<usize>> = groups.into_values().collect();
            out.sort();
            out
        })
        .collect();
    CorrelationBlocks { blocks }
}

/// Which reconstruction identity a cover supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverKind {
    Singleton,
    Pairwise,
    General,
}

/// Key of an `(i, j, b)` dichotomy.
pub type PairKey = (usize, usize, u8);
/// Key of an `(i, b, J)` family; `J` is the index of the block in `blocks.of(i)`.
pub type FamilyKey = (usize, u8, usize);

#[derive(Debug, Clone)]
pub struct Cover {
    kind: CoverKind,
    k: usize,
    states: Vec<CriteriaState>,
    /// `(i, j, b)` → (index with `j` unfixed, index with `j` fixed).
    pair_index: BTreeMap<PairKey, (usize, usize)>,
    /// Pair-set partners of each vertex.
    partners: Vec<Vec<usize>>,
    /// `(i, b, J)` → configuration of `J` → state index.
    block_index: BTreeMap<FamilyKey, BTreeMap<usize, usize>>,
    blocks: CorrelationBlocks,
    touched: Vec<bool>,
    /// First cover state with bit `i` equal to `b`, per `(i, b)`.
    anchors: Vec<[Option<usize>; 2]>,
}

struct Builder<'g> {
    graph: &'g IncompatibilityGraph,
    states: Vec<CriteriaState>,
    lookup: HashMap<CriteriaState, usize>,
}

impl Builder<'_> {
    /// Adds `state` if it is valid; returns its index.
    fn add(&mut self, state: CriteriaState) -> Option<usize> {
        if let Some(&idx) = self.lookup.get(&state) {
            return Some(idx);
        }
        if !validate_state(self.graph, &state).unwrap_or(false) {
            return None;
        }
        let idx = self.states.len();
        self.lookup.insert(state.clone(), idx);
        self.states.push(state);
        Some(idx)
    }
}

/// Builds the cover matching the model's largest set size.
pub fn build_cover(g: &IncompatibilityGraph, model: &CorrelationModel) -> Result<Cover> {
    build_cover_with_blocks(g, model, correlation_blocks(model))
}

/// Like [`build_cover`] but with caller-chosen blocks (used for `m >= 3`).
pub fn build_cover_with_blocks(
    g: &IncompatibilityGraph,
    model: &CorrelationModel,
    blocks: CorrelationBlocks,
) -> Result<Cover> {
    if g.k() != model.k() {
        return Err(Error::Dimension {
            expected: g.k(),
            got: model.k(),
        });
    }
    let k = g.k();
    let kind = match model.m() {
        1 => CoverKind::Singleton,
        2 => CoverKind::Pairwise,
        _ => CoverKind::General,
    };
    let touched: Vec<bool> = (0..k).map(|v| model.touches(v)).collect();
    let mut b = Builder {
        graph: g,
        states: Vec::new(),
        lookup: HashMap::new(),
    };
    let mut pair_index = BTreeMap::new();
    let mut partners = vec![BTreeSet::new(); k];
    let mut block_index = BTreeMap::new();
    let zero = CriteriaState::zeros(k);

    match kind {
        CoverKind::Singleton => {
            b.add(zero.clone());
            for i in 0..k {
                b.add(CriteriaState::indicator(k, i));
            }
        }
        CoverKind::Pairwise => {
            for set in model.sets() {
                let members = set.members();
                if members.len() == 1 {
                    b.add(zero.clone());
                    b.add(CriteriaState::indicator(k, members[0]));
                    continue;
                }
                let (x, y) = (members[0], members[1]);
                for (i, j) in [(x, y), (y, x)] {
                    partners[i].insert(j);
                    for bit in [0u8, 1] {
                        let mut unfixed = zero.clone();
                        unfixed.set(i, bit == 1);
                        let mut fixed = unfixed.clone();
                        fixed.set(j, true);
                        let lo = b.add(unfixed).expect("at most one fixed vertex");
                        // (i, j, 1) is not a dichotomy when {i, j} is an edge.
                        if !validate_state(g, &fixed)? {
                            continue;
                        }
                        let hi = b.add(fixed).expect("validated above");
                        pair_index.insert((i, j, bit), (lo, hi));
                    }
                }
            }
        }
        CoverKind::General => {
            for i in (0..k).filter(|&i| touched[i]) {
                for bit in [0u8, 1] {
                    let mut anchor = zero.clone();
                    anchor.set(i, bit == 1);
                    b.add(anchor.clone());
                    for (jdx, block) in blocks.of(i).iter().enumerate() {
                        if block.len() > MAX_BLOCK_SIZE {
                            return Err(Error::Capacity {
                                what: "correlation block size",
                                got: block.len(),
                                limit: MAX_BLOCK_SIZE,
                            });
                        }
                        let mut family = BTreeMap::new();
                        for u in 0..1usize << block.len() {
                            let mut s = anchor.clone();
                            for (t, &v) in block.iter().enumerate() {
                                s.set(v, (u >> t) & 1 == 1);
                            }
                            if let Some(idx) = b.add(s) {
                                family.insert(u, idx);
                            }
                        }
                        block_index.insert((i, bit, jdx), family);
                    }
                }
            }
        }
    }
    // A model without sets still needs a state to reconstruct from.
    if b.states.is_empty() {
        b.add(zero);
    }
    let states = b.states;
    let anchors = (0..k)
        .map(|i| {
            let first = |bit: bool| states.iter().position(|s| s.get(i) == bit);
            [first(false), first(true)]
        })
        .collect();
    Ok(Cover {
        kind,
        k,
        states,
        pair_index,
        partners: partners.into_iter().map(|p| p.into_iter().collect()).collect(),
        block_index,
        blocks,
        touched,
        anchors,
    })
}

impl Cover {
    pub fn kind(&self) -> CoverKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn states(&self) -> &[CriteriaState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn pair_index(&self) -> &BTreeMap<PairKey, (usize, usize)> {
        &self.pair_index
    }

    pub fn block_index(&self) -> &BTreeMap<FamilyKey, BTreeMap<usize, usize>> {
        &self.block_index
    }

    pub fn blocks(&self) -> &CorrelationBlocks {
        &self.blocks
    }

    pub fn partners(&self, i: usize) -> &[usize] {
        &self.partners[i]
    }

    /// Index of the first cover state with `s(i) = bit`.
    pub fn anchor(&self, i: usize, bit: u8) -> Option<usize> {
        self.anchors[i][bit as usize]
    }

    /// Every cover state with `s(i) = bit`, in cover order.
    pub fn admissible_anchors(&self, i: usize, bit: u8) -> impl Iterator<Item = usize> + '_ {
        self.states
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.bit(i) == bit)
            .map(|(idx, _)| idx)
    }

    /// Stable text listing of the member states and the dichotomy index.
    pub fn dump(&self) -> String {
        let mut out = format!("kind {:?}\nstates {}\n", self.kind, self.states.len());
        for (idx, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "{idx} {s}");
        }
        for (&(i, j, bit), &(lo, hi)) in &self.pair_index {
            let _ = writeln!(out, "pair {} {} {} : {lo} {hi}", i + 1, j + 1, bit);
        }
        for (&(i, bit, jdx), family) in &self.block_index {
            let block: Vec<String> = self.blocks.of(i)[jdx].iter().map(|v| (v + 1).to_string()).collect();
            let members: Vec<String> = family.iter().map(|(u, idx)| format!("{u}:{idx}")).collect();
            let _ = writeln!(out, "family {} {} [{}] : {}", i + 1, bit, block.join(" "), members.join(" "));
        }
        out
    }
}

/// Differences of expected losses between cover states.
#[derive(Debug, Clone, PartialEq)]
pub struct XTable {
    /// `X^{i,j}_b = μ_i(j fixed) − μ_i(j unfixed)` over the stored `(i, j, b)`-pair.
    pair: BTreeMap<PairKey, f64>,
    /// `μ_i` at each member of an `(i, b, J)` family, keyed by configuration of `J`.
    family: BTreeMap<FamilyKey, BTreeMap<usize, f64>>,
}

impl XTable {
    /// `X^{i,j}_b`; zero when `{i, j}` is not a correlation set or the dichotomy is absent.
    pub fn pair(&self, i: usize, j: usize, bit: u8) -> f64 {
        self.pair.get(&(i, j, bit)).copied().unwrap_or(0.0)
    }

    /// `X^{i,u1,u2}_{b,J}`: `μ_i` at the `u1` member minus `μ_i` at the `u2` member.
    pub fn general(&self, key: FamilyKey, u1: usize, u2: usize) -> Option<f64> {
        let family = self.family.get(&key)?;
        Some(family.get(&u1)? - family.get(&u2)?)
    }
}

fn check_means(cover: &Cover, means: &[Vec<f64>]) -> Result<()> {
    if means.len() != cover.len() {
        return Err(Error::Incomplete(format!(
            "{} cover states but means for {}",
            cover.len(),
            means.len()
        )));
    }
    if let Some(row) = means.iter().position(|m| m.len() != cover.k()) {
        return Err(Error::Incomplete(format!("means for cover state {row} have the wrong length")));
    }
    Ok(())
}

/// Computes the X table from per-vertex means observed at every cover state.
pub fn x_values(cover: &Cover, means_at_cover: &[Vec<f64>]) -> Result<XTable> {
    check_means(cover, means_at_cover)?;
    let pair = cover
        .pair_index
        .iter()
        .map(|(&(i, j, bit), &(lo, hi))| ((i, j, bit), means_at_cover[hi][i] - means_at_cover[lo][i]))
        .collect();
    let family = cover
        .block_index
        .iter()
        .map(|(&(i, bit, jdx), members)| {
            let values = members.iter().map(|(&u, &idx)| (u, means_at_cover[idx][i])).collect();
            ((i, bit, jdx), values)
        })
        .collect();
    Ok(XTable { pair, family })
}

/// Reconstructs `μ_i^s` from cover means using the first admissible anchor.
pub fn reconstruct_mean(
    cover: &Cover,
    x: &XTable,
    means_at_cover: &[Vec<f64>],
    s: &CriteriaState,
    i: usize,
) -> Result<f64> {
    let bit = s.bit(i);
    match cover.anchor(i, bit) {
        Some(anchor) => reconstruct_from(cover, x, means_at_cover, s, i, anchor),
        // A vertex outside every set never incurs loss.
        None if !cover.touched[i] => Ok(0.0),
        None => Err(Error::Coverage { vertex: i, bit }),
    }
}

/// Reconstruction through an explicit anchor (any cover state with matching bit `i`).
pub fn reconstruct_from(
    cover: &Cover,
    x: &XTable,
    means_at_cover: &[Vec<f64>],
    s: &CriteriaState,
    i: usize,
    anchor: usize,
) -> Result<f64> {
    let bit = s.bit(i);
    let base = &cover.states[anchor];
    if base.bit(i) != bit {
        return Err(Error::Coverage { vertex: i, bit });
    }
    let mut mu = means_at_cover[anchor][i];
    match cover.kind {
        CoverKind::Singleton => {}
        CoverKind::Pairwise => {
            for &j in &cover.partners[i] {
                match (s.get(j), base.get(j)) {
                    (true, false) => mu += x.pair(i, j, bit),
                    (false, true) => mu -= x.pair(i, j, bit),
                    _ => {}
                }
            }
        }
        CoverKind::General => {
            for (jdx, block) in cover.blocks.of(i).iter().enumerate() {
                let (u, w) = (s.config_of(block), base.config_of(block));
                if u == w {
                    continue;
                }
                mu += x
                    .general((i, bit, jdx), u, w)
                    .ok_or(Error::Coverage { vertex: i, bit })?;
            }
        }
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{mean_loss_vector, CorrelationSet};

    fn st(s: &str) -> CriteriaState {
        s.parse().unwrap()
    }

    fn pair_model(k: usize, pairs: &[(usize, usize)]) -> CorrelationModel {
        let sets = pairs
            .iter()
            .enumerate()
            .map(|(n, &(a, b))| {
                let base = n as f64;
                CorrelationSet::new(vec![a, b], vec![base + 4.0, base + 3.0, base + 2.0, base + 1.0]).unwrap()
            })
            .collect();
        CorrelationModel::new(k, sets).unwrap()
    }

    fn sets_model(k: usize, sets: &[&[usize]]) -> CorrelationModel {
        let sets = sets
            .iter()
            .map(|m| CorrelationSet::new(m.to_vec(), vec![1.0; 1 << m.len()]).unwrap())
            .collect();
        CorrelationModel::new(k, sets).unwrap()
    }

    #[test]
    fn blocks_worked_examples() {
        // Pairs through vertex 1 only: 2, 3 and 4 never share a set, so the
        // component partition separates them; a single block is also admissible.
        let model = sets_model(4, &[&[0, 1], &[0, 2], &[0, 3]]);
        assert_eq!(correlation_blocks(&model).of(0), &[vec![1], vec![2], vec![3]]);
        let coarse = vec![vec![vec![1, 2, 3]], vec![vec![0]], vec![vec![0]], vec![vec![0]]];
        let blocks = CorrelationBlocks::from_partition(&model, coarse).unwrap();
        assert_eq!(blocks.of(0), &[vec![1, 2, 3]]);

        let model = sets_model(7, &[&[0, 1, 2], &[0, 2, 3], &[0, 5, 6]]);
        assert_eq!(correlation_blocks(&model).of(0), &[vec![1, 2, 3], vec![5, 6]]);

        let model = sets_model(3, &[&[0], &[1, 2]]);
        assert!(correlation_blocks(&model).of(0).is_empty());
    }

    #[test]
    fn partition_validation() {
        let model = sets_model(4, &[&[0, 1, 2], &[0, 3]]);
        // {1,2,3}: blocks {2,3} and {4}; splitting {2,3} would straddle the first set.
        let split = vec![vec![vec![1], vec![2], vec![3]], vec![vec![0, 2]], vec![vec![0, 1]], vec![vec![0]]];
        assert!(CorrelationBlocks::from_partition(&model, split).is_err());
        let missing = vec![vec![vec![1, 2]], vec![vec![0, 2]], vec![vec![0, 1]], vec![vec![0]]];
        assert!(CorrelationBlocks::from_partition(&model, missing).is_err());
        let ok = vec![vec![vec![1, 2], vec![3]], vec![vec![0, 2]], vec![vec![0, 1]], vec![vec![0]]];
        let blocks = CorrelationBlocks::from_partition(&model, ok).unwrap();
        assert_eq!(blocks, correlation_blocks(&model));
    }

    #[test]
    fn coarse_blocks_reconstruct_exactly() {
        let sets = vec![
            CorrelationSet::new(vec![0, 1], vec![3.0, 2.5, 2.0, 0.5]).unwrap(),
            CorrelationSet::new(vec![0, 2], vec![1.0, 0.7, 0.2, 0.1]).unwrap(),
            CorrelationSet::new(vec![0, 3], vec![4.0, 0.0, 1.5, 1.0]).unwrap(),
            CorrelationSet::new(vec![0, 1, 2], vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]).unwrap(),
        ];
        let model = CorrelationModel::new(4, sets).unwrap();
        let g = IncompatibilityGraph::new(4, vec![1.0; 4], &[(1, 3)]).unwrap();
        let coarse = vec![
            vec![vec![1, 2, 3]],
            vec![vec![0, 2]],
            vec![vec![0, 1]],
            vec![vec![0]],
        ];
        let blocks = CorrelationBlocks::from_partition(&model, coarse).unwrap();
        let cover = build_cover_with_blocks(&g, &model, blocks).unwrap();
        let means: Vec<Vec<f64>> = cover.states().iter().map(|s| mean_loss_vector(&model, s)).collect();
        let x = x_values(&cover, &means).unwrap();
        for s in crate::model::enumerate_valid_states(&g, 22).unwrap() {
            let truth = mean_loss_vector(&model, &s);
            for i in 0..4 {
                let r = reconstruct_mean(&cover, &x, &means, &s, i).unwrap();
                assert!((r - truth[i]).abs() < 1e-12, "state {s} vertex {i}");
            }
        }
    }

    #[test]
    fn singleton_cover_is_k_plus_one() {
        let g = IncompatibilityGraph::edgeless(vec![1.0; 5]).unwrap();
        let model = CorrelationModel::singletons(&[1.0; 5], &[0.5; 5]).unwrap();
        let cover = build_cover(&g, &model).unwrap();
        let expected: Vec<CriteriaState> = ["00000", "10000", "01000", "00100", "00010", "00001"]
            .iter()
            .map(|s| st(s))
            .collect();
        assert_eq!(cover.states(), expected.as_slice());
        assert_eq!(cover.kind(), CoverKind::Singleton);
    }

    #[test]
    fn pair_cover_without_edge() {
        let g = IncompatibilityGraph::edgeless(vec![1.0; 2]).unwrap();
        let cover = build_cover(&g, &pair_model(2, &[(0, 1)])).unwrap();
        let set: BTreeSet<_> = cover.states().iter().cloned().collect();
        assert_eq!(set, ["00", "10", "01", "11"].iter().map(|s| st(s)).collect());
        assert!(cover.len() <= 4);
        assert_eq!(cover.pair_index().len(), 4);
    }

    #[test]
    fn pair_cover_with_edge_drops_fixed_dichotomies() {
        let g = IncompatibilityGraph::new(2, vec![1.0; 2], &[(0, 1)]).unwrap();
        let cover = build_cover(&g, &pair_model(2, &[(0, 1)])).unwrap();
        let set: BTreeSet<_> = cover.states().iter().cloned().collect();
        assert_eq!(set, ["00", "10", "01"].iter().map(|s| st(s)).collect());
        assert!(cover.pair_index().contains_key(&(0, 1, 0)));
        assert!(cover.pair_index().contains_key(&(1, 0, 0)));
        assert!(!cover.pair_index().contains_key(&(0, 1, 1)));
        assert!(!cover.pair_index().contains_key(&(1, 0, 1)));
        assert!(cover.anchor(0, 1).is_some() && cover.anchor(1, 1).is_some());
    }

    #[test]
    fn pair_set_on_edge_reconstructs() {
        let g = IncompatibilityGraph::new(3, vec![1.0; 3], &[(0, 1)]).unwrap();
        let model = pair_model(3, &[(0, 1), (1, 2)]);
        let cover = build_cover(&g, &model).unwrap();
        let means: Vec<Vec<f64>> = cover.states().iter().map(|s| mean_loss_vector(&model, s)).collect();
        let x = x_values(&cover, &means).unwrap();
        for s in crate::model::enumerate_valid_states(&g, 22).unwrap() {
            let truth = mean_loss_vector(&model, &s);
            for i in 0..3 {
                assert!((reconstruct_mean(&cover, &x, &means, &s, i).unwrap() - truth[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn x_for_non_sets_is_zero_and_identical_configs_cancel() {
        let g = IncompatibilityGraph::edgeless(vec![1.0; 3]).unwrap();
        let model = pair_model(3, &[(0, 1)]);
        let cover = build_cover(&g, &model).unwrap();
        let means: Vec<Vec<f64>> = cover.states().iter().map(|s| mean_loss_vector(&model, s)).collect();
        let x = x_values(&cover, &means).unwrap();
        assert_eq!(x.pair(0, 2, 0), 0.0);
        assert_eq!(x.pair(0, 1, 0), 2.0 - 4.0);
        assert!(x_values(&cover, &means[1..]).is_err());

        let model = sets_model(4, &[&[0, 1, 2]]);
        let cover = build_cover(&g_k(4), &model).unwrap();
        let means: Vec<Vec<f64>> = cover.states().iter().map(|s| mean_loss_vector(&model, s)).collect();
        let x = x_values(&cover, &means).unwrap();
        assert_eq!(x.general((0, 0, 0), 3, 3), Some(0.0));
    }

    fn g_k(k: usize) -> IncompatibilityGraph {
        IncompatibilityGraph::edgeless(vec![1.0; k]).unwrap()
    }

    #[test]
    fn reconstruction_at_cover_states_is_exact() {
        let g = IncompatibilityGraph::new(4, vec![1.0; 4], &[(0, 3)]).unwrap();
        let model = pair_model(4, &[(0, 1), (1, 2), (2, 3)]);
        let cover = build_cover(&g, &model).unwrap();
        let means: Vec<Vec<f64>> = cover.states().iter().map(|s| mean_loss_vector(&model, s)).collect();
        let x = x_values(&cover, &means).unwrap();
        for (idx, s) in cover.states().iter().enumerate() {
            for i in 0..4 {
                let r = reconstruct_mean(&cover, &x, &means, s, i).unwrap();
                assert!((r - means[idx][i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn untouched_vertex_reconstructs_to_zero() {
        let g = g_k(3);
        let model = pair_model(3, &[(0, 1)]);
        let cover = build_cover(&g, &model).unwrap();
        let means: Vec<Vec<f64>> = cover.states().iter().map(|s| mean_loss_vector(&model, s)).collect();
        let x = x_values(&cover, &means).unwrap();
        assert_eq!(reconstruct_mean(&cover, &x, &means, &st("001"), 2).unwrap(), 0.0);
    }

    #[test]
    fn dump_is_stable() {
        let g = IncompatibilityGraph::new(2, vec![1.0; 2], &[(0, 1)]).unwrap();
        let cover = build_cover(&g, &pair_model(2, &[(0, 1)])).unwrap();
        assert_eq!(cover.dump(), build_cover(&g, &pair_model(2, &[(0, 1)])).unwrap().dump());
        assert!(cover.dump().starts_with("kind Pairwise\nstates 3\n"));
    }
}
