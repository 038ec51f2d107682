//! Balanced triangulations of polygons, their dual trees, and escape paths
//! from interior points to the boundary.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{closest_point_on_segment, point_distance, HPoint};
use crate::polygon::Polygon;


/// Direction in which the boundary cycle is walked while clipping ears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Decreasing vertex index.
    #[default]
    Clockwise,
    /// Increasing vertex index.
    Counterclockwise,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangulation {
    pub n: usize,
    /// Vertex index triples, each in increasing (counterclockwise) order.
    pub triangles: Vec<[usize; 3]>,
    /// Diagonals as `(i, j)` with `i < j`.
    pub diagonals: Vec<(usize, usize)>,
}

fn is_side(n: usize, i: usize, j: usize) -> bool {
    let d = i.abs_diff(j);
    d == 1 || d == n - 1
}

fn edge(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Triangulates an `n`-gon by rounds of ear clipping: each round walks the
/// current boundary cycle from its first vertex, joining every kept vertex
/// to the second-to-next one and clipping the vertex in between, until one
/// pass is complete; rounds repeat on the shrunken cycle. Clipping stops once
/// three vertices remain, and that last triangle is the root of the dual tree.
pub fn balanced_triangulate(n: usize, dir: Direction) -> Result<(Triangulation, DualTree)> {
    if n < 3 {
        return Err(Error::InvalidPolygon(format!(
            "{n} vertices; need at least 3"
        )));
    }
    let mut cycle: Vec<usize> = match dir {
        Direction::Counterclockwise => (0..n).collect(),
        Direction::Clockwise => std::iter::once(0).chain((1..n).rev()).collect(),
    };
    let mut triangles = Vec::with_capacity(n - 2);
    while cycle.len() > 3 {
        let k = cycle.len();
        let mut remaining = k;
        let mut clipped = vec![false; k];
        let mut i = 0;
        while i + 2 <= k && remaining > 3 {
            let mut t = [cycle[i], cycle[i + 1], cycle[(i + 2) % k]];
            t.sort_unstable();
            triangles.push(t);
            clipped[i + 1] = true;
            remaining -= 1;
            i += 2;
        }
        cycle = cycle
            .iter()
            .zip(&clipped)
            .filter(|(_, &c)| !c)
            .map(|(&v, _)| v)
            .collect();
    }
    let mut last = [cycle[0], cycle[1], cycle[2]];
    last.sort_unstable();
    triangles.push(last);

    let mut diagonals: Vec<(usize, usize)> = triangles
        .iter()
        .flat_map(|t| [edge(t[0], t[1]), edge(t[1], t[2]), edge(t[0], t[2])])
        .filter(|&(i, j)| !is_side(n, i, j))
        .collect();
    diagonals.sort_unstable();
    diagonals.dedup();
    let tri = Triangulation {
        n,
        triangles,
        diagonals,
    };
    let tree = DualTree::new(&tri);
    Ok((tri, tree))
}

/// Dual tree of a triangulation: one node per triangle, joined across shared
/// diagonals, rooted at the last triangle created.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    /// For each triangle and each of its sides `(t[0],t[1]), (t[1],t[2]),
    /// (t[2],t[0])`, the triangle across it (`None` on the boundary).
    pub across: Vec<[Option<usize>; 3]>,
}

fn sides(t: &[usize; 3]) -> [(usize, usize); 3] {
    [edge(t[0], t[1]), edge(t[1], t[2]), edge(t[2], t[0])]
}

impl DualTree {
    pub fn new(tri: &Triangulation) -> Self {
        let m = tri.triangles.len();
        let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, t) in tri.triangles.iter().enumerate() {
            for e in sides(t) {
                by_edge.entry(e).or_default().push(i);
            }
        }
        let across: Vec<[Option<usize>; 3]> = tri
            .triangles
            .iter()
            .enumerate()
            .map(|(i, t)| sides(t).map(|e| by_edge[&e].iter().copied().find(|&j| j != i)))
            .collect();
        let root = m - 1;
        let mut parent = vec![None; m];
        let mut children = vec![Vec::new(); m];
        let mut depth = vec![usize::MAX; m];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in across[u].iter().flatten().copied() {
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = Some(u);
                    children[u].push(v);
                    queue.push_back(v);
                }
            }
        }
        DualTree {
            root,
            parent,
            children,
            depth,
            across,
        }
    }

    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    /// Childless nodes.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.children[i].is_empty())
            .collect()
    }

    pub fn radius_from_root(&self) -> usize {
        self.leaves()
            .iter()
            .map(|&l| self.depth[l])
            .max()
            .unwrap_or(0)
    }

    pub fn min_leaf_depth(&self) -> usize {
        self.leaves()
            .iter()
            .map(|&l| self.depth[l])
            .min()
            .unwrap_or(0)
    }

    /// Tree distance from each node to the nearest leaf.
    pub fn leaf_distance(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        for l in self.leaves() {
            dist[l] = 0;
            queue.push_back(l);
        }
        while let Some(u) = queue.pop_front() {
            for v in self.across[u].iter().flatten().copied() {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Height of each node's subtree: distance to its farthest descendant leaf.
    pub fn height(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.depth[i]));
        let mut h = vec![0; self.len()];
        for u in order {
            if let Some(p) = self.parent[u] {
                h[p] = h[p].max(h[u] + 1);
            }
        }
        h
    }

    /// Triangles within tree distance `s` of some leaf.
    pub fn leaves_within(&self, s: usize) -> Vec<usize> {
        let d = self.leaf_distance();
        (0..self.len()).filter(|&i| d[i] <= s).collect()
    }

    pub fn is_valid(&self) -> bool {
        let connected = self.depth.iter().all(|&d| d != usize::MAX);
        let edges: usize = self.children.iter().map(Vec::len).sum();
        let degree_ok = self.across.iter().all(|a| a.iter().flatten().count() <= 3);
        connected && edges + 1 == self.len() && degree_ok
    }

    /// Graphviz rendering, root drawn as a double circle.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph dual {\n");
        let _ = writeln!(s, "  t{} [shape=doublecircle];", self.root);
        for (u, cs) in self.children.iter().enumerate() {
            for v in cs {
                let _ = writeln!(s, "  t{u} -- t{v};");
            }
        }
        s.push_str("}\n");
        s
    }
}

/// One row of the tree-bound table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub n: usize,
    pub radius: usize,
    pub min_leaf_depth: usize,
}

pub fn tree_stats(n: usize, dir: Direction) -> Result<TreeStats> {
    let (_, tree) = balanced_triangulate(n, dir)?;
    Ok(TreeStats {
        n,
        radius: tree.radius_from_root(),
        min_leaf_depth: tree.min_leaf_depth(),
    })
}

/// Piecewise perpendicular path from an interior point to the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapePath {
    /// Breakpoints: the start, then the foot of each segment.
    pub points: Vec<HPoint>,
    /// Triangle in which each segment runs.
    pub triangles: Vec<usize>,
    pub lengths: Vec<f64>,
    pub length: f64,
}

impl EscapePath {
    pub fn steps(&self) -> usize {
        self.lengths.len()
    }

    pub fn end(&self) -> HPoint {
        *self.points.last().expect("path has a start")
    }
}

/// A polygon with a balanced triangulation, ready for point location.
#[derive(Debug, Clone)]
pub struct TriangulatedPolygon {
    pub polygon: Polygon,
    pub triangulation: Triangulation,
    pub tree: DualTree,
    cells: Vec<Polygon>,
}

impl TriangulatedPolygon {
    pub fn new(polygon: Polygon, dir: Direction) -> Result<Self> {
        let (triangulation, tree) = balanced_triangulate(polygon.len(), dir)?;
        let cells = triangulation
            .triangles
            .iter()
            .map(|t| Polygon::new(t.iter().map(|&i| *polygon.vertex(i)).collect()))
            .collect::<Result<_>>()?;
        Ok(TriangulatedPolygon {
            polygon,
            triangulation,
            tree,
            cells,
        })
    }

    /// First triangle containing `x`.
    pub fn locate(&self, x: &HPoint) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(x))
    }

    /// Walks from `x` through triangles away from the root, each time to the
    /// nearest side that is either on the boundary or shared with a child;
    /// equidistant sides go to the one whose far triangle has the smaller
    /// index (boundary sides count as the current triangle).
    pub fn escape_path(&self, x: &HPoint) -> Result<EscapePath> {
        let mut t = self
            .locate(x)
            .ok_or_else(|| Error::Precondition("point is not inside the polygon".into()))?;
        let mut path = EscapePath {
            points: vec![*x],
            triangles: Vec::new(),
            lengths: Vec::new(),
            length: 0.0,
        };
        let mut y = *x;
        loop {
            let tri = self.triangulation.triangles[t];
            let mut best: Option<(f64, usize, usize)> = None;
            for k in 0..3 {
                let next = self.tree.across[t][k];
                if let Some(c) = next {
                    if self.tree.parent[c] != Some(t) {
                        continue;
                    }
                }
                let (a, b) = (
                    self.polygon.vertex(tri[k]),
                    self.polygon.vertex(tri[(k + 1) % 3]),
                );
                let foot = closest_point_on_segment(&y, a, b)?;
                let d = point_distance(y.vector(), foot.vector());
                let key = next.unwrap_or(t);
                let better = match best {
                    None => true,
                    Some((bd, bkey, _)) => d < bd || (d == bd && key < bkey),
                };
                if better {
                    best = Some((d, key, k));
                }
            }
            let (_, _, k) = best.expect("a node has a boundary side or a child");
            let (a, b) = (
                self.polygon.vertex(tri[k]),
                self.polygon.vertex(tri[(k + 1) % 3]),
            );
            let foot = closest_point_on_segment(&y, a, b)?;
            let d = point_distance(y.vector(), foot.vector());
            path.points.push(foot);
            path.triangles.push(t);
            path.lengths.push(d);
            path.length += d;
            y = foot;
            match self.tree.across[t][k] {
                Some(c) => t = c,
                None => return Ok(path),
            }
        }
    }

    /// Escape paths for a batch of points, evaluated in parallel.
    pub fn escape_paths(&self, xs: &[HPoint]) -> Vec<Result<EscapePath>> {
        xs.par_iter().map(|x| self.escape_path(x)).collect()
    }
}

/// JSON rendering of the triangles and diagonals.
pub fn triangulation_json(tri: &Triangulation, tree: &DualTree) -> serde_json::Value {
    serde_json::json!({
        "n": tri.n,
        "root": tree.root,
        "triangles": tri.triangles,
        "diagonals": tri.diagonals,
    })
}
