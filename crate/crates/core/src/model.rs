//! Incompatibility graph, criteria states and the deterministic transition rule.
//!
//! Vertices are 0-indexed in the API and 1-indexed in every text format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};

/// Default bound on `k` for exhaustive state enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 22;

/// Undirected conflict graph over `k` criteria with per-criterion fixing costs.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompatibilityGraph {
    k: usize,
    costs: Vec<f64>,
    /// Sorted `(i, j)` with `i < j`.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl IncompatibilityGraph {
    pub fn new(k: usize, costs: Vec<f64>, edges: &[(usize, usize)]) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGraph("k must be at least 1".into()));
        }
        if costs.len() != k {
            return Err(Error::InvalidGraph(format!(
                "expected {k} fixing costs, got {}",
                costs.len()
            )));
        }
        if let Some(c) = costs.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidGraph(format!("fixing cost {c} is not a finite non-negative number")));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= k || b >= k {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) references a vertex outside 1..={k}",
                    a + 1,
                    b + 1
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {}", a + 1)));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        let mut graph = Self {
            k,
            costs,
            edges: normalized,
            adjacency: Vec::new(),
        };
        graph.rebuild_adjacency();
        Ok(graph)
    }

    pub fn edgeless(costs: Vec<f64>) -> Result<Self> {
        let k = costs.len();
        Self::new(k, costs, &[])
    }

    fn rebuild_adjacency(&mut self) {
        let mut adjacency = vec![Vec::new(); self.k];
        for &(a, b) in &self.edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        self.adjacency = adjacency;
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn cost(&self, i: usize) -> f64 {
        self.costs[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Adversarial-mode validation: every fixing cost must be at least one.
    pub fn validate_adversarial(&self) -> Result<()> {
        match self.costs.iter().position(|&c| c < 1.0) {
            Some(i) => Err(Error::InvalidGraph(format!(
                "vertex {} has fixing cost {} < 1",
                i + 1,
                self.costs[i]
            ))),
            None => Ok(()),
        }
    }

    /// Whether the graph is connected (a single vertex counts as connected).
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Parses the graph text format: `k`, then `k` costs, then `i j` edge lines.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_lines(text.lines().enumerate().map(|(n, l)| (n + 1, l)))
    }

    pub(crate) fn parse_lines<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Self> {
        let mut content = lines.filter_map(|(n, raw)| {
            let line = raw.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then_some((n, line))
        });
        let (n, line) = content.next().ok_or_else(|| parse_err(0, "missing vertex count"))?;
        let k: usize = line
            .parse()
            .map_err(|_| parse_err(n, format!("expected vertex count, got {line:?}")))?;
        let (n, line) = content.next().ok_or_else(|| parse_err(n, "missing fixing costs"))?;
        let costs = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|_| parse_err(n, format!("bad cost {tok:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut edges = Vec::new();
        for (n, line) in content {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(parse_err(n, format!("expected an edge `i j`, got {line:?}")));
            }
            let parse_vertex = |tok: &str| -> Result<usize> {
                match tok.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(parse_err(n, format!("bad vertex {tok:?}"))),
                }
            };
            edges.push((parse_vertex(toks[0])?, parse_vertex(toks[1])?));
        }
        Self::new(k, costs, &edges)
    }

    /// Renders the graph text format; `parse(to_text())` reproduces the graph.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.k);
        out.push_str(&join_reals(&self.costs));
        out.push('\n');
        for &(a, b) in &self.edges {
            out.push_str(&format!("{} {}\n", a + 1, b + 1));
        }
        out
    }
}

pub(crate) fn join_reals(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Fixed/unfixed configuration of all criteria. `true` means fixed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CriteriaState(Vec<bool>);

impl CriteriaState {
    pub fn zeros(k: usize) -> Self {
        Self(vec![false; k])
    }

    pub fn indicator(k: usize, i: usize) -> Self {
        let mut bits = vec![false; k];
        bits[i] = true;
        Self(bits)
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn from_fixed(k: usize, fixed: &[usize]) -> Self {
        let mut bits = vec![false; k];
        for &i in fixed {
            bits[i] = true;
        }
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.0[i] as u8
    }

    pub fn set(&mut self, i: usize, fixed: bool) {
        self.0[i] = fixed;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn fixed(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn count_fixed(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Packs the bits of `vertices` into an integer, `vertices[t]` at bit `t`.
    pub fn config_of(&self, vertices: &[usize]) -> usize {
        vertices
            .iter()
            .enumerate()
            .fold(0, |acc, (t, &v)| acc | ((self.0[v] as usize) << t))
    }
}

impl fmt::Display for CriteriaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for CriteriaState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(parse_err(0, format!("bad state bit {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// An MDP action. `Unfix` is an extension with zero cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Null,
    Fix(usize),
    Unfix(usize),
}

impl Action {
    pub fn cost(&self, g: &IncompatibilityGraph) -> f64 {
        match *self {
            Action::Fix(i) => g.cost(i),
            Action::Null | Action::Unfix(_) => 0.0,
        }
    }
}

impl fmt::Display for Action {
    /// `0` for the null action, `i` for fixing vertex `i`, `-i` for unfixing it.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Action::Null => write!(f, "0"),
            Action::Fix(i) => write!(f, "{}", i + 1),
            Action::Unfix(i) => write!(f, "-{}", i + 1),
        }
    }
}

/// Whether `Unfix` actions are available when planning moves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitionMode {
    #[default]
    WithUnfix,
    /// Fix and null only: stale fixed vertices cannot be released.
    Strict,
}

fn check_len(g: &IncompatibilityGraph, s: &CriteriaState) -> Result<()> {
    if s.len() != g.k() {
        return Err(Error::Dimension {
            expected: g.k(),
            got: s.len(),
        });
    }
    Ok(())
}

/// True iff the fixed vertices of `s` form an independent set of `g`.
pub fn validate_state(g: &IncompatibilityGraph, s: &CriteriaState) -> Result<bool> {
    check_len(g, s)?;
    Ok(g.edges().iter().all(|&(a, b)| !(s.get(a) && s.get(b))))
}

/// Applies `a` to `s`, returning the next state and the fixing cost paid.
pub fn apply_action(
    g: &IncompatibilityGraph,
    s: &CriteriaState,
    a: Action,
) -> Result<(CriteriaState, f64)> {
    if !validate_state(g, s)? {
        return Err(Error::InvalidState(format!("{s} is not an independent set")));
    }
    let mut next = s.clone();
    apply_in_place(g, &mut next, a);
    Ok((next, a.cost(g)))
}

/// Unchecked transition used on the simulation hot path.
pub(crate) fn apply_in_place(g: &IncompatibilityGraph, s: &mut CriteriaState, a: Action) {
    match a {
        Action::Null => {}
        Action::Fix(i) => {
            s.set(i, true);
            for &j in g.neighbors(i) {
                s.set(j, false);
            }
        }
        Action::Unfix(i) => s.set(i, false),
    }
}

/// Actions that move `from` towards `to`, and the state they actually reach.
#[derive(Debug, Clone, PartialEq)]
pub struct MovePlan {
    pub actions: Vec<Action>,
    pub reached: CriteriaState,
}

impl MovePlan {
    pub fn cost(&self, g: &IncompatibilityGraph) -> f64 {
        self.actions.iter().map(|a| a.cost(g)).sum()
    }
}

/// Plans a move: fixes in ascending order, then unfixes of stale vertices in
/// ascending order. Fixing first lets conflicts do the unfixing for free.
///
/// In [`TransitionMode::Strict`] no `Unfix` is emitted and `reached` is `to`
/// plus every stale fixed vertex that no fix in `to` displaces.
pub fn move_path(
    g: &IncompatibilityGraph,
    from: &CriteriaState,
    to: &CriteriaState,
    mode: TransitionMode,
) -> Result<MovePlan> {
    check_len(g, from)?;
    check_len(g, to)?;
    let mut actions = Vec::new();
    let mut current = from.clone();
    for i in 0..g.k() {
        if to.get(i) && !current.get(i) {
            actions.push(Action::Fix(i));
            apply_in_place(g, &mut current, Action::Fix(i));
        }
    }
    if mode == TransitionMode::WithUnfix {
        for i in 0..g.k() {
            if current.get(i) && !to.get(i) {
                actions.push(Action::Unfix(i));
                current.set(i, false);
            }
        }
    }
    Ok(MovePlan {
        actions,
        reached: current,
    })
}

/// All valid states of `g` in lexicographic order (all-zeros first).
pub fn enumerate_valid_states(g: &IncompatibilityGraph, cap: usize) -> Result<Vec<CriteriaState>> {
    let mut out = Vec::new();
    for_each_valid_state(g, cap, |s| out.push(s.clone()))?;
    Ok(out)
}

/// Visits every valid state in lexicographic order without materializing the list.
pub fn for_each_valid_state(
    g: &IncompatibilityGraph,
    cap: usize,
    mut visit: impl FnMut(&CriteriaState),
) -> Result<()> {
    if g.k() > cap {
        return Err(Error::Capacity {
            what: "vertex count for enumeration",
            got: g.k(),
            limit: cap,
        });
    }
    let mut state = CriteriaState::zeros(g.k());
    // blocked[v] counts fixed neighbors of v among already-decided vertices.
    let mut blocked = vec![0u32; g.k()];
    fn recurse(
        g: &IncompatibilityGraph,
        v: usize,
        state: &mut CriteriaState,
        blocked: &mut [u32],
        visit: &mut dyn FnMut(&CriteriaState),
    ) {
        if v == g.k() {
            visit(state);
            return;
        }
        recurse(g, v + 1, state, blocked, visit);
        if blocked[v] == 0 {
            state.set(v, true);
            for &w in g.neighbors(v) {
                blocked[w] += 1;
            }
            recurse(g, v + 1, state, blocked, visit);
            for &w in g.neighbors(v) {
                blocked[w] -= 1;
            }
            state.set(v, false);
        }
    }
    recurse(g, 0, &mut state, &mut blocked, &mut visit);
    Ok(())
}
