use std::fmt;

use serde::{Serialize, Serializer};

use super::data::ResolutionData;
use crate::error::{Error, Result};

pub const MAX_GRAPH_NODES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DuValType {
    A(usize),
    D(usize),
    E6,
    E7,
    E8,
    NotDuVal,
}

impl fmt::Display for DuValType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DuValType::A(n) => write!(f, "A{n}"),
            DuValType::D(n) => write!(f, "D{n}"),
            DuValType::E6 => write!(f, "E6"),
            DuValType::E7 => write!(f, "E7"),
            DuValType::E8 => write!(f, "E8"),
            DuValType::NotDuVal => write!(f, "not-du-val"),
        }
    }
}

impl Serialize for DuValType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

type Graph = Vec<Vec<usize>>;

fn encode(g: &Graph, v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = g[v].iter().filter(|&&w| w != parent).map(|&w| encode(g, w, v)).collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// AHU encoding rooted at the center(s). Assumes `g` is a tree.
fn canonical_tree(g: &Graph) -> String {
    let n = g.len();
    let mut deg: Vec<usize> = g.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &g[v] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.iter().map(|&c| encode(g, c, usize::MAX)).min().unwrap_or_default()
}

/// Star with arms of the given lengths around one central node.
fn star(arms: &[usize]) -> Graph {
    let n = 1 + arms.iter().sum::<usize>();
    let mut g = vec![Vec::new(); n];
    let mut next = 1;
    for &len in arms {
        let mut prev = 0;
        for _ in 0..len {
            g[prev].push(next);
            g[next].push(prev);
            prev = next;
            next += 1;
        }
    }
    g
}

fn shapes(n: usize) -> Vec<(DuValType, Graph)> {
    let mut out = vec![(DuValType::A(n), star(&[n - 1]))];
    if n >= 4 {
        out.push((DuValType::D(n), star(&[1, 1, n - 3])));
    }
    match n {
        6 => out.push((DuValType::E6, star(&[1, 2, 2]))),
        7 => out.push((DuValType::E7, star(&[1, 2, 3]))),
        8 => out.push((DuValType::E8, star(&[1, 2, 4]))),
        _ => {}
    }
    out
}

fn is_connected_tree(g: &Graph) -> bool {
    let edges: usize = g.iter().map(Vec::len).sum::<usize>() / 2;
    if edges + 1 != g.len() {
        return false;
    }
    let mut seen = vec![false; g.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &g[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// ADE type of a configuration of smooth rational `(−2)`-curves meeting transversally.
pub fn du_val_type(r: &ResolutionData) -> Result<DuValType> {
    let n = r.len();
    if n > MAX_GRAPH_NODES {
        return Err(Error::Unsupported(format!("dual graphs with {n} > {MAX_GRAPH_NODES} nodes")));
    }
    let q = r.gram();
    if (0..n).any(|i| q[i][i] != -2 || r.k_dot_e()[i] != 0) {
        return Ok(DuValType::NotDuVal);
    }
    let mut g: Graph = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            match q[i][j] {
                _ if i == j => {}
                0 => {}
                1 => g[i].push(j),
                _ => return Ok(DuValType::NotDuVal),
            }
        }
    }
    if !is_connected_tree(&g) {
        return Ok(DuValType::NotDuVal);
    }
    let code = canonical_tree(&g);
    Ok(shapes(n)
        .into_iter()
        .find(|(_, s)| canonical_tree(s) == code)
        .map_or(DuValType::NotDuVal, |(t, _)| t))
}

/// Gram matrix of the ADE graph `t`, for fixtures and tests.
pub fn du_val_gram(t: DuValType) -> Option<Vec<Vec<i64>>> {
    let g = match t {
        DuValType::A(n) if n >= 1 => star(&[n - 1]),
        DuValType::D(n) if n >= 4 => star(&[1, 1, n - 3]),
        DuValType::E6 => star(&[1, 2, 2]),
        DuValType::E7 => star(&[1, 2, 3]),
        DuValType::E8 => star(&[1, 2, 4]),
        _ => return None,
    };
    let n = g.len();
    let mut m = vec![vec![0; n]; n];
    for (i, nbrs) in g.iter().enumerate() {
        m[i][i] = -2;
        for &j in nbrs {
            m[i][j] = 1;
        }
    }
    Some(m)
}
