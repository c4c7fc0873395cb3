//! Shortest edge paths on the domain mesh; lengths are those of real polylines.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::surface::TriMesh;

pub(crate) struct EdgeTree {
    pub dist: Vec<f64>,
    pub pred: Vec<usize>,
    /// Source each vertex was reached from.
    pub owner: Vec<usize>,
}

impl EdgeTree {
    /// Vertex path from the owning source to `v`.
    pub fn path_to(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut u = v;
        while self.pred[u] != usize::MAX {
            u = self.pred[u];
            path.push(u);
        }
        path.reverse();
        path
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multi-source Dijkstra over mesh edges accepted by `allowed`, pruned at `limit`.
pub(crate) fn edge_dijkstra(
    mesh: &TriMesh,
    sources: &[usize],
    allowed: impl Fn(usize) -> bool,
    limit: f64,
) -> EdgeTree {
    let nv = mesh.num_vertices();
    let mut tree = EdgeTree {
        dist: vec![f64::INFINITY; nv],
        pred: vec![usize::MAX; nv],
        owner: vec![usize::MAX; nv],
    };
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if tree.dist[s] > 0.0 {
            tree.dist[s] = 0.0;
            tree.owner[s] = s;
            heap.push(Entry(0.0, s));
        }
    }
    while let Some(Entry(d, u)) = heap.pop() {
        if d > tree.dist[u] {
            continue;
        }
        for &w in mesh.neighbors(u) {
            let e = mesh.edge_id(u, w).expect("neighbour edge");
            if !allowed(e) {
                continue;
            }
            let nd = d + mesh.edge_length(e);
            if nd < tree.dist[w] && nd <= limit {
                tree.dist[w] = nd;
                tree.pred[w] = u;
                tree.owner[w] = tree.owner[u];
                heap.push(Entry(nd, w));
            }
        }
    }
    tree
}

/// Neighbours of interior vertex `v` in cyclic order around it.
pub(crate) fn ordered_ring(mesh: &TriMesh, v: usize) -> Vec<usize> {
    let mut next = std::collections::HashMap::new();
    for &f in mesh.vertex_faces(v) {
        let face = mesh.faces[f];
        let k = face.iter().position(|&c| c == v).expect("incident face");
        next.insert(face[(k + 1) % 3], face[(k + 2) % 3]);
    }
    let start = *next.keys().min().expect("vertex has faces");
    let mut ring = vec![start];
    let mut u = next[&start];
    while u != start && ring.len() <= next.len() {
        ring.push(u);
        u = match next.get(&u) {
            Some(&w) => w,
            None => break,
        };
    }
    ring
}
