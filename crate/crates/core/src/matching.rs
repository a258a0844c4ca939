//! Bipartite graphs, maximum matching and Hall-condition witnesses.
//!
//! Vertices are plain indices; callers keep their own labeling tables.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartite {
    left_count: usize,
    right_count: usize,
    adjacency: Vec<Vec<usize>>,
}

impl Bipartite {
    pub fn new(left_count: usize, right_count: usize) -> Self {
        Bipartite {
            left_count,
            right_count,
            adjacency: vec![Vec::new(); left_count],
        }
    }

    /// Builds from per-left adjacency lists; lists are sorted and deduplicated.
    pub fn from_adjacency(right_count: usize, mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            if let Some(&r) = list.last().filter(|&&r| r >= right_count) {
                return Err(Error::IndexOutOfRange {
                    what: "right vertex",
                    index: r,
                    bound: right_count,
                });
            }
        }
        Ok(Bipartite {
            left_count: adjacency.len(),
            right_count,
            adjacency,
        })
    }

    pub fn from_edges(left_count: usize, right_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); left_count];
        for &(l, r) in edges {
            if l >= left_count {
                return Err(Error::IndexOutOfRange {
                    what: "left vertex",
                    index: l,
                    bound: left_count,
                });
            }
            adjacency[l].push(r);
        }
        Self::from_adjacency(right_count, adjacency)
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn neighbors(&self, left: usize) -> &[usize] {
        &self.adjacency[left]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, left: usize, right: usize) -> bool {
        self.adjacency[left].binary_search(&right).is_ok()
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right_count];
        for list in &self.adjacency {
            for &r in list {
                deg[r] += 1;
            }
        }
        deg
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks that endpoints are distinct and every pair is an edge.
    pub fn is_valid_for(&self, g: &Bipartite) -> bool {
        let mut left = vec![false; g.left_count];
        let mut right = vec![false; g.right_count];
        self.pairs.iter().all(|&(l, r)| {
            l < g.left_count
                && r < g.right_count
                && g.has_edge(l, r)
                && !std::mem::replace(&mut left[l], true)
                && !std::mem::replace(&mut right[r], true)
        })
    }

    pub fn is_perfect_for(&self, g: &Bipartite) -> bool {
        g.left_count == g.right_count && self.len() == g.left_count && self.is_valid_for(g)
    }
}

const UNMATCHED: usize = usize::MAX;

struct HopcroftKarp<'a> {
    g: &'a Bipartite,
    match_left: Vec<usize>,
    match_right: Vec<usize>,
    dist: Vec<usize>,
}

impl<'a> HopcroftKarp<'a> {
    fn new(g: &'a Bipartite) -> Self {
        HopcroftKarp {
            g,
            match_left: vec![UNMATCHED; g.left_count],
            match_right: vec![UNMATCHED; g.right_count],
            dist: vec![usize::MAX; g.left_count],
        }
    }

    fn bfs(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for l in 0..self.g.left_count {
            if self.match_left[l] == UNMATCHED {
                self.dist[l] = 0;
                queue.push_back(l);
            } else {
                self.dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &self.g.adjacency[l] {
                let next = self.match_right[r];
                if next == UNMATCHED {
                    found = true;
                } else if self.dist[next] == usize::MAX {
                    self.dist[next] = self.dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        found
    }

    // Iterative layered DFS; `cursor` keeps per-vertex progress across calls.
    fn augment_from(&mut self, root: usize, cursor: &mut [usize]) -> bool {
        let mut stack = vec![root];
        while let Some(&l) = stack.last() {
            let adj = &self.g.adjacency[l];
            let mut advanced = false;
            while cursor[l] < adj.len() {
                let r = adj[cursor[l]];
                let next = self.match_right[r];
                if next == UNMATCHED {
                    // flip the path recorded on the stack
                    let mut r = r;
                    while let Some(l) = stack.pop() {
                        let prev = self.match_left[l];
                        self.match_left[l] = r;
                        self.match_right[r] = l;
                        r = prev;
                    }
                    return true;
                }
                if self.dist[next] == self.dist[l].wrapping_add(1) {
                    stack.push(next);
                    advanced = true;
                    break;
                }
                cursor[l] += 1;
            }
            if !advanced {
                self.dist[l] = usize::MAX;
                stack.pop();
                if let Some(&parent) = stack.last() {
                    cursor[parent] += 1;
                }
            }
        }
        false
    }

    fn run(mut self) -> (Vec<usize>, Vec<usize>) {
        while self.bfs() {
            let mut cursor = vec![0; self.g.left_count];
            for l in 0..self.g.left_count {
                if self.match_left[l] == UNMATCHED {
                    self.augment_from(l, &mut cursor);
                }
            }
        }
        (self.match_left, self.match_right)
    }
}

/// Maximum-cardinality matching (Hopcroft–Karp). Deterministic for a given
/// adjacency order; pairs are reported by increasing left vertex.
pub fn max_matching(g: &Bipartite) -> Matching {
    let (match_left, _) = HopcroftKarp::new(g).run();
    Matching {
        pairs: match_left
            .iter()
            .enumerate()
            .filter(|(_, &r)| r != UNMATCHED)
            .map(|(l, &r)| (l, r))
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Regularity {
    pub regular: bool,
    pub left_degree: Option<usize>,
    pub right_degree: Option<usize>,
}

/// Regular here means equal side sizes and one common degree on both sides.
/// Degrees are reported when uniform on their side.
pub fn is_regular(g: &Bipartite) -> Regularity {
    fn uniform(mut it: impl Iterator<Item = usize>) -> Option<Option<usize>> {
        match it.next() {
            None => Some(None),
            Some(first) => it.all(|d| d == first).then_some(Some(first)),
        }
    }
    let left = uniform(g.adjacency.iter().map(Vec::len));
    let right = uniform(g.right_degrees().into_iter());
    let (left_degree, right_degree) = (left.flatten(), right.flatten());
    let regular = left.is_some()
        && right.is_some()
        && g.left_count == g.right_count
        && left_degree == right_degree;
    Regularity {
        regular,
        left_degree,
        right_degree,
    }
}

/// A left set `X` with `|N(X)| < |X|`, or `None` when every left vertex can
/// be matched. Taken from the alternating-path reachability of a maximum
/// matching, so it works at any size.
pub fn hall_violator(g: &Bipartite) -> Option<Vec<usize>> {
    let (match_left, match_right) = HopcroftKarp::new(g).run();
    if match_left.iter().all(|&r| r != UNMATCHED) {
        return None;
    }
    let mut seen_left = vec![false; g.left_count];
    let mut seen_right = vec![false; g.right_count];
    let mut queue: VecDeque<usize> = (0..g.left_count)
        .filter(|&l| match_left[l] == UNMATCHED)
        .collect();
    for &l in &queue {
        seen_left[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in &g.adjacency[l] {
            if !seen_right[r] {
                seen_right[r] = true;
                // r is matched, otherwise the matching was not maximum
                let next = match_right[r];
                if !seen_left[next] {
                    seen_left[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    Some((0..g.left_count).filter(|&l| seen_left[l]).collect())
}

/// Right vertices adjacent to any vertex of `set`.
pub fn neighborhood(g: &Bipartite, set: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; g.right_count];
    for &l in set {
        for &r in &g.adjacency[l] {
            seen[r] = true;
        }
    }
    (0..g.right_count).filter(|&r| seen[r]).collect()
}

/// Capacitated matching: left vertex `l` may be used `left_cap[l]` times and
/// right vertex `r` up to `right_cap[r]` times. Returns `(left, right, count)`
/// triples of a maximum assignment.
///
/// This is a maximum matching of the graph in which every vertex is blown up
/// into `cap` copies joined completely along each edge, computed without
/// materializing the copies: a greedy assignment followed by phases of
/// shortest augmenting paths in the residual graph.
pub fn max_b_matching(
    g: &Bipartite,
    left_cap: &[usize],
    right_cap: &[usize],
) -> Result<Vec<(usize, usize, usize)>> {
    if left_cap.len() != g.left_count || right_cap.len() != g.right_count {
        return Err(Error::Dimension {
            expected: g.left_count + g.right_count,
            found: left_cap.len() + right_cap.len(),
        });
    }
    // edge e runs from edge_left[e] to edge_right[e]; left l owns start[l]..start[l+1]
    let mut start = Vec::with_capacity(g.left_count + 1);
    let mut edge_left = Vec::with_capacity(g.edge_count());
    let mut edge_right = Vec::with_capacity(g.edge_count());
    start.push(0);
    for (l, list) in g.adjacency.iter().enumerate() {
        for &r in list {
            edge_left.push(l);
            edge_right.push(r);
        }
        start.push(edge_right.len());
    }
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); g.right_count];
    for (e, &r) in edge_right.iter().enumerate() {
        incoming[r].push(e);
    }
    let mut flow = vec![0usize; edge_right.len()];
    let mut left_rem = left_cap.to_vec();
    let mut right_rem = right_cap.to_vec();

    for l in 0..g.left_count {
        for e in start[l]..start[l + 1] {
            let push = left_rem[l].min(right_rem[edge_right[e]]);
            flow[e] += push;
            left_rem[l] -= push;
            right_rem[edge_right[e]] -= push;
        }
    }

    let mut state = Residual {
        start: &start,
        edge_left: &edge_left,
        edge_right: &edge_right,
        incoming: &incoming,
        flow: &mut flow,
        left_rem: &mut left_rem,
        right_rem: &mut right_rem,
        left_level: vec![NIL; g.left_count],
        right_level: vec![NIL; g.right_count],
        left_ptr: vec![0; g.left_count],
        right_ptr: vec![0; g.right_count],
    };
    while state.levels() {
        state.left_ptr.copy_from_slice(&start[..g.left_count]);
        state.right_ptr.fill(0);
        for root in 0..g.left_count {
            while state.left_rem[root] > 0 && state.augment(root) {}
        }
    }
    Ok(flow
        .iter()
        .enumerate()
        .filter(|&(_, &f)| f > 0)
        .map(|(e, &f)| (edge_left[e], edge_right[e], f))
        .collect())
}

const NIL: usize = usize::MAX;

/// Residual graph of a capacitated matching. Forward edges are uncapacitated;
/// an edge can be walked backwards while it carries flow.
struct Residual<'a> {
    start: &'a [usize],
    edge_left: &'a [usize],
    edge_right: &'a [usize],
    incoming: &'a [Vec<usize>],
    flow: &'a mut [usize],
    left_rem: &'a mut [usize],
    right_rem: &'a mut [usize],
    left_level: Vec<usize>,
    right_level: Vec<usize>,
    left_ptr: Vec<usize>,
    right_ptr: Vec<usize>,
}

impl Residual<'_> {
    /// BFS layering from every left vertex with spare capacity. True when
    /// some right vertex with spare capacity is reachable.
    fn levels(&mut self) -> bool {
        self.left_level.fill(NIL);
        self.right_level.fill(NIL);
        let mut queue: VecDeque<usize> = (0..self.left_rem.len())
            .filter(|&l| self.left_rem[l] > 0)
            .collect();
        for &l in &queue {
            self.left_level[l] = 0;
        }
        let mut found = false;
        while let Some(x) = queue.pop_front() {
            for e in self.start[x]..self.start[x + 1] {
                let r = self.edge_right[e];
                if self.right_level[r] != NIL {
                    continue;
                }
                self.right_level[r] = self.left_level[x] + 1;
                if self.right_rem[r] > 0 {
                    found = true;
                    continue;
                }
                for &b in &self.incoming[r] {
                    let y = self.edge_left[b];
                    if self.flow[b] > 0 && self.left_level[y] == NIL {
                        self.left_level[y] = self.right_level[r] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        found
    }

    /// One unit along a level-increasing path from `root`.
    fn augment(&mut self, root: usize) -> bool {
        let mut path: Vec<(usize, usize)> = Vec::new();
        let mut x = root;
        loop {
            let mut next = None;
            while self.left_ptr[x] < self.start[x + 1] {
                let e = self.left_ptr[x];
                let r = self.edge_right[e];
                if self.right_level[r] != self.left_level[x].wrapping_add(1) {
                    self.left_ptr[x] += 1;
                    continue;
                }
                if self.right_rem[r] > 0 {
                    self.flow[e] += 1;
                    self.right_rem[r] -= 1;
                    for &(fe, be) in &path {
                        self.flow[fe] += 1;
                        self.flow[be] -= 1;
                    }
                    self.left_rem[root] -= 1;
                    return true;
                }
                let mut back = None;
                while self.right_ptr[r] < self.incoming[r].len() {
                    let b = self.incoming[r][self.right_ptr[r]];
                    let y = self.edge_left[b];
                    if self.flow[b] > 0 && self.left_level[y] == self.right_level[r] + 1 {
                        back = Some(b);
                        break;
                    }
                    self.right_ptr[r] += 1;
                }
                match back {
                    Some(b) => {
                        next = Some((e, b));
                        break;
                    }
                    None => {
                        self.right_level[r] = NIL;
                        self.left_ptr[x] += 1;
                    }
                }
            }
            match next {
                Some((e, b)) => {
                    path.push((e, b));
                    x = self.edge_left[b];
                }
                None => {
                    self.left_level[x] = NIL;
                    let Some((e, _)) = path.pop() else {
                        return false;
                    };
                    self.right_ptr[self.edge_right[e]] += 1;
                    x = self.edge_left[e];
                }
            }
        }
    }
}
