//! Ordering a disc into small squares whose prefixes stay connected.
//!
//! `f` is the edge-path distance to the boundary, jittered by `JITTER_SCALE * eps`
//! so that no interior vertex ties with a neighbour. Basins are the steepest-ascent
//! cells of `f` after merging maxima of persistence below two edge lengths.
//! Cones are the cells of boundary arcs under nearest-boundary ownership, and a
//! square is one level band of one cone. Squares are unions of faces; a face
//! belongs to the square of its lowest vertex.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::paths::{edge_dijkstra, ordered_ring};
use super::DiscImmersion;
use crate::error::{Error, Result};
use crate::surface::sample::rng;
use crate::surface::TriMesh;

pub const JITTER_SCALE: f64 = 1e-6;
pub const MAX_JITTER_ATTEMPTS: usize = 8;
const MAX_REFINEMENTS: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct Square {
    pub cone: usize,
    pub band: usize,
    /// Added from the boundary towards the basin centre.
    pub inward: bool,
    pub faces: Vec<usize>,
    pub vertices: Vec<usize>,
    /// Intrinsic diameter along edge paths of the whole disc.
    pub diameter: f64,
}

/// Checks on the prefix `B_j` after square `j` is appended.
#[derive(Debug, Clone, Serialize)]
pub struct PrefixCertificate {
    pub step: usize,
    /// `B_{j-1}` meets square `j` in a nonempty connected set.
    pub overlap_connected: bool,
    pub overlap_vertices: usize,
    /// `B_j` meets the boundary in one arc.
    pub boundary_connected: bool,
    pub boundary_arc_length: f64,
    /// Longest shortest path inside `B_j` from a vertex to the boundary arc.
    pub max_path_to_boundary: f64,
    /// Length bound of the concatenated path joining any two points of `B_j`.
    pub pair_path_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SquareOrder {
    pub seed: u64,
    pub jitter_attempts: usize,
    /// Half the closed-form invertibility radius at lifts of norm `9 eps`.
    pub invertibility_scale: f64,
    /// Diameter bound imposed on squares.
    pub square_scale: f64,
    pub refinements: usize,
    pub raw_maxima: usize,
    pub raw_saddles: usize,
    /// Interior vertices whose link changes sign six or more times.
    pub multi_saddles: usize,
    /// Highest vertex of each basin.
    pub basin_centres: Vec<usize>,
    /// Boundary arcs as vertex runs, in processing order starting from `J_1`.
    pub arcs: Vec<Vec<usize>>,
    pub arc_basin: Vec<usize>,
    /// Boundary vertex `y0` of `J_1` that seeds the lift.
    pub seed_vertex: usize,
    pub squares: Vec<Square>,
    /// Steps where the planned next square was skipped for a later one.
    pub repairs: usize,
    pub certificates: Vec<PrefixCertificate>,
    pub max_square_diameter: f64,
    pub overlaps_ok: bool,
    pub boundary_ok: bool,
    pub paths_2eps_ok: bool,
    pub pairs_5eps_ok: bool,
    pub diameters_ok: bool,
    pub certified: bool,
    #[serde(skip)]
    pub height: Vec<f64>,
}

impl SquareOrder {
    pub fn num_basins(&self) -> usize {
        self.basin_centres.len()
    }
}

fn jittered_height(mesh: &TriMesh, base: &[f64], eps: f64, seed: u64) -> Result<(Vec<f64>, usize)> {
    for attempt in 0..MAX_JITTER_ATTEMPTS {
        let mut r = rng(seed.wrapping_add(attempt as u64));
        let f: Vec<f64> = (0..mesh.num_vertices())
            .map(|v| {
                let noise = JITTER_SCALE * eps * (2.0 * r.gen::<f64>() - 1.0);
                if mesh.is_boundary_vertex(v) {
                    0.0
                } else {
                    base[v] + noise
                }
            })
            .collect();
        let generic = (0..mesh.num_vertices())
            .filter(|&v| !mesh.is_boundary_vertex(v))
            .all(|v| f[v] > 0.0 && mesh.neighbors(v).iter().all(|&w| f[w] != f[v]));
        if generic {
            return Ok((f, attempt + 1));
        }
    }
    Err(Error::Degenerate(format!(
        "distance to the boundary still has ties after {MAX_JITTER_ATTEMPTS} jitters"
    )))
}

struct Basins {
    of_vertex: Vec<usize>,
    centres: Vec<usize>,
    raw_maxima: usize,
    raw_saddles: usize,
    multi_saddles: usize,
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

fn basins(mesh: &TriMesh, f: &[f64], persistence: f64) -> Result<Basins> {
    let nv = mesh.num_vertices();
    let mut up = vec![0; nv];
    for v in 0..nv {
        let best = mesh
            .neighbors(v)
            .iter()
            .copied()
            .max_by(|&a, &b| f[a].total_cmp(&f[b]).then(b.cmp(&a)))
            .expect("vertex has neighbours");
        up[v] = if f[best] > f[v] { best } else { v };
    }
    // Boundary vertices with only boundary neighbours climb through a neighbour that can.
    let mut stranded: Vec<usize> = (0..nv)
        .filter(|&v| up[v] == v && mesh.is_boundary_vertex(v))
        .collect();
    while !stranded.is_empty() {
        let before = stranded.len();
        stranded.retain(|&v| match mesh.neighbors(v).iter().find(|&&w| up[w] != w) {
            Some(&w) => {
                up[v] = w;
                false
            }
            None => true,
        });
        if stranded.len() == before {
            return Err(Error::Degenerate(
                "boundary vertices with no path into the interior".into(),
            ));
        }
    }
    let summit = |mut v: usize| {
        while up[v] != v {
            v = up[v];
        }
        v
    };
    let maxima: Vec<usize> = (0..nv).filter(|&v| up[v] == v).collect();
    let (mut raw_saddles, mut multi_saddles) = (0, 0);
    for v in (0..nv).filter(|&v| !mesh.is_boundary_vertex(v)) {
        let ring = ordered_ring(mesh, v);
        let changes = (0..ring.len())
            .filter(|&i| (f[ring[i]] > f[v]) != (f[ring[(i + 1) % ring.len()]] > f[v]))
            .count();
        if changes == 4 {
            raw_saddles += 1;
        } else if changes >= 6 {
            multi_saddles += 1;
        }
    }

    // Superlevel persistence: the younger maximum dies where two components meet.
    let mut order: Vec<usize> = (0..nv).collect();
    order.sort_by(|&a, &b| f[b].total_cmp(&f[a]).then(a.cmp(&b)));
    let mut parent: Vec<usize> = (0..nv).collect();
    let mut done = vec![false; nv];
    let mut absorbed_by = vec![usize::MAX; nv];
    for &v in &order {
        done[v] = true;
        for &w in mesh.neighbors(v) {
            if !done[w] {
                continue;
            }
            let (rv, rw) = (find(&mut parent, v), find(&mut parent, w));
            if rv == rw {
                continue;
            }
            let (old, young) = if f[rv] >= f[rw] { (rv, rw) } else { (rw, rv) };
            if f[young] - f[v] < persistence {
                absorbed_by[young] = old;
            }
            parent[young] = old;
        }
    }
    let survivor = |mut m: usize| {
        while absorbed_by[m] != usize::MAX {
            m = absorbed_by[m];
        }
        m
    };
    let mut centres: Vec<usize> = maxima.iter().map(|&m| survivor(m)).collect();
    centres.sort_unstable();
    centres.dedup();
    let of_vertex = (0..nv)
        .map(|v| {
            centres
                .binary_search(&survivor(summit(v)))
                .expect("surviving centre")
        })
        .collect();
    Ok(Basins {
        of_vertex,
        centres,
        raw_maxima: maxima.len(),
        raw_saddles,
        multi_saddles,
    })
}

/// Boundary arcs of length at most `arc_length`, never crossing a basin change.
fn boundary_arcs(mesh: &TriMesh, boundary: &[usize], basin: &[usize], arc_length: f64) -> Vec<Vec<usize>> {
    let n = boundary.len();
    let start = (0..n)
        .find(|&i| basin[boundary[i]] != basin[boundary[(i + n - 1) % n]])
        .unwrap_or(0);
    let mut arcs: Vec<Vec<usize>> = Vec::new();
    let mut current = vec![boundary[start]];
    let mut length = 0.0;
    for k in 1..n {
        let (prev, v) = (boundary[(start + k - 1) % n], boundary[(start + k) % n]);
        let e = mesh.edge_length(mesh.edge_id(prev, v).expect("boundary edge"));
        if basin[v] != basin[prev] || length + e > arc_length {
            arcs.push(std::mem::take(&mut current));
            length = 0.0;
        } else {
            length += e;
        }
        current.push(v);
    }
    arcs.push(current);
    arcs
}

fn square_diameter(mesh: &TriMesh, vertices: &[usize], limit: f64) -> f64 {
    let mut diameter: f64 = 0.0;
    for &v in vertices {
        let tree = edge_dijkstra(mesh, &[v], |_| true, limit);
        for &w in vertices {
            diameter = diameter.max(tree.dist[w]);
        }
        if diameter.is_infinite() {
            break;
        }
    }
    diameter
}

struct Layout {
    arcs: Vec<Vec<usize>>,
    arc_basin: Vec<usize>,
    squares: Vec<Square>,
    max_diameter: f64,
}

fn layout(
    mesh: &TriMesh,
    boundary: &[usize],
    f: &[f64],
    owner: &[usize],
    basin: &[usize],
    arc_length: f64,
    band_height: f64,
    scale: f64,
) -> Layout {
    let mut arcs = boundary_arcs(mesh, boundary, basin, arc_length);
    let basin_of_arc = |a: &Vec<usize>| basin[a[0]];
    // J_1 lies inside one side of its basin when both neighbours share its basin.
    let m = arcs.len();
    let first = (0..m)
        .find(|&i| {
            let b = basin_of_arc(&arcs[i]);
            basin_of_arc(&arcs[(i + m - 1) % m]) == b && basin_of_arc(&arcs[(i + 1) % m]) == b
        })
        .unwrap_or(0);
    arcs.rotate_left(first);
    let arc_basin: Vec<usize> = arcs.iter().map(basin_of_arc).collect();
    let mut arc_of = vec![usize::MAX; mesh.num_vertices()];
    for (i, a) in arcs.iter().enumerate() {
        for &v in a {
            arc_of[v] = i;
        }
    }
    let key = |v: usize| (arc_of[owner[v]], (f[v] / band_height).floor() as usize);
    let mut cells: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (fi, face) in mesh.faces.iter().enumerate() {
        let low = *face
            .iter()
            .min_by(|&&a, &&b| f[a].total_cmp(&f[b]).then(a.cmp(&b)))
            .expect("three corners");
        cells.entry(key(low)).or_default().push(fi);
    }
    let mut squares = Vec::new();
    for cone in 0..arcs.len() {
        let inward = cone == 0 || arc_basin[cone] != arc_basin[cone - 1];
        let mut bands: Vec<(usize, Vec<usize>)> = cells
            .range((cone, 0)..(cone + 1, 0))
            .map(|(&(_, b), faces)| (b, faces.clone()))
            .collect();
        if !inward {
            bands.reverse();
        }
        for (band, faces) in bands {
            let mut vertices: Vec<usize> = faces.iter().flat_map(|&fi| mesh.faces[fi]).collect();
            vertices.sort_unstable();
            vertices.dedup();
            squares.push(Square {
                cone,
                band,
                inward,
                faces,
                vertices,
                diameter: 0.0,
            });
        }
    }
    let mut max_diameter: f64 = 0.0;
    for s in &mut squares {
        s.diameter = square_diameter(mesh, &s.vertices, 2.0 * scale);
        max_diameter = max_diameter.max(s.diameter);
    }
    Layout {
        arcs,
        arc_basin,
        squares,
        max_diameter,
    }
}

fn connected_subset(mesh: &TriMesh, set: &[usize], member: &[bool]) -> bool {
    let Some(&start) = set.first() else {
        return false;
    };
    let mut seen = std::collections::HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &w in mesh.neighbors(u) {
            if member[w] && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == set.len()
}

/// Number of arcs in which the face set `in_face` meets the boundary loop.
fn boundary_components(
    mesh: &TriMesh,
    boundary: &[usize],
    in_vertex: &[bool],
    in_face: &[bool],
) -> (usize, f64) {
    let n = boundary.len();
    let mut edge_in = vec![false; n];
    let mut length = 0.0;
    for i in 0..n {
        let e = mesh
            .edge_id(boundary[i], boundary[(i + 1) % n])
            .expect("boundary edge");
        if in_face[mesh.edge_faces(e)[0]] {
            edge_in[i] = true;
            length += mesh.edge_length(e);
        }
    }
    if edge_in.iter().all(|&b| b) {
        return (1, length);
    }
    let starts = (0..n)
        .filter(|&i| in_vertex[boundary[i]] && !edge_in[(i + n - 1) % n])
        .count();
    (starts, length)
}

/// Orders the squares of `disc`, refining until every square has diameter at most
/// the square scale, then certifies each prefix.
///
/// `square_scale` overrides `min{invertibility scale, eps}`.
pub fn order_squares(disc: &DiscImmersion, seed: u64, square_scale: Option<f64>) -> Result<SquareOrder> {
    let mesh = &disc.domain;
    let eps = disc.eps;
    let boundary = mesh.boundary_loops()[0].clone();
    let nearest = edge_dijkstra(mesh, &boundary, |_| true, f64::INFINITY);
    let (f, jitter_attempts) = jittered_height(mesh, &nearest.dist, eps, seed)?;
    let persistence = 2.0 * mesh.max_edge_length();
    let basins = basins(mesh, &f, persistence)?;

    let invertibility_scale = 0.5 * disc.target.invertibility_radius(9.0 * eps);
    let scale = match square_scale {
        Some(s) if s > 0.0 => s,
        Some(s) => return Err(Error::Config(format!("square scale must be positive, got {s}"))),
        None if invertibility_scale > 0.0 => invertibility_scale.min(eps),
        None => {
            return Err(Error::Hypothesis(format!(
                "9 eps = {} reaches the conjugate locus; pass a square scale",
                9.0 * eps
            )))
        }
    };

    let mut size = 0.5 * scale;
    let mut refinements = 0;
    let lay = loop {
        let lay = layout(
            mesh,
            &boundary,
            &f,
            &nearest.owner,
            &basins.of_vertex,
            size,
            size,
            scale,
        );
        if lay.max_diameter <= scale {
            break lay;
        }
        refinements += 1;
        if refinements > MAX_REFINEMENTS {
            return Err(Error::Degenerate(format!(
                "squares still exceed diameter {scale} after {MAX_REFINEMENTS} refinements"
            )));
        }
        size *= 0.5;
    };

    let first = &lay.squares[0];
    let j1 = &lay.arcs[0];
    let seed_vertex = j1
        .iter()
        .skip(j1.len() / 2)
        .chain(j1.iter())
        .copied()
        .find(|v| first.vertices.binary_search(v).is_ok())
        .ok_or_else(|| Error::Degenerate("first square misses its boundary arc".into()))?;

    let nv = mesh.num_vertices();
    let mut in_face = vec![false; mesh.num_faces()];
    let mut in_vertex = vec![false; nv];
    in_vertex[seed_vertex] = true;
    let mut remaining: Vec<usize> = (0..lay.squares.len()).collect();
    let mut placed = Vec::with_capacity(remaining.len());
    let mut certificates = Vec::with_capacity(remaining.len());
    let mut repairs = 0;
    let mut overlap_member = vec![false; nv];
    while !remaining.is_empty() {
        let mut chosen = None;
        for (pos, &cand) in remaining.iter().enumerate() {
            let sq = &lay.squares[cand];
            let overlap: Vec<usize> = sq.vertices.iter().copied().filter(|&v| in_vertex[v]).collect();
            for &v in &overlap {
                overlap_member[v] = true;
            }
            let connected = connected_subset(mesh, &overlap, &overlap_member);
            for &v in &overlap {
                overlap_member[v] = false;
            }
            if !connected {
                continue;
            }
            let mut trial_face = in_face.clone();
            let mut trial_vertex = in_vertex.clone();
            for &fi in &sq.faces {
                trial_face[fi] = true;
                for v in mesh.faces[fi] {
                    trial_vertex[v] = true;
                }
            }
            let (components, _) = boundary_components(mesh, &boundary, &trial_vertex, &trial_face);
            if components == 1 {
                chosen = Some((pos, overlap.len(), trial_face, trial_vertex));
                break;
            }
        }
        let Some((pos, overlap_vertices, trial_face, trial_vertex)) = chosen else {
            return Err(Error::Degenerate(format!(
                "no remaining square extends the prefix after {} squares",
                placed.len()
            )));
        };
        if pos != 0 {
            repairs += 1;
        }
        in_face = trial_face;
        in_vertex = trial_vertex;
        let sq = remaining.remove(pos);
        placed.push(sq);

        let (components, boundary_arc_length) = boundary_components(mesh, &boundary, &in_vertex, &in_face);
        let sources: Vec<usize> = boundary.iter().copied().filter(|&v| in_vertex[v]).collect();
        let edge_in = |e: usize| mesh.edge_faces(e).iter().any(|&fi| in_face[fi]);
        let tree = edge_dijkstra(mesh, &sources, edge_in, f64::INFINITY);
        let max_path_to_boundary = (0..nv)
            .filter(|&v| in_vertex[v])
            .map(|v| tree.dist[v])
            .fold(0.0, f64::max);
        certificates.push(PrefixCertificate {
            step: placed.len() - 1,
            overlap_connected: true,
            overlap_vertices,
            boundary_connected: components == 1,
            boundary_arc_length,
            max_path_to_boundary,
            pair_path_bound: 2.0 * max_path_to_boundary + boundary_arc_length,
        });
    }

    let squares: Vec<Square> = placed.iter().map(|&i| lay.squares[i].clone()).collect();
    let overlaps_ok = certificates
        .iter()
        .all(|c| c.overlap_connected && c.overlap_vertices > 0);
    let boundary_ok = certificates.iter().all(|c| c.boundary_connected);
    let paths_2eps_ok = certificates.iter().all(|c| c.max_path_to_boundary <= 2.0 * eps);
    let pairs_5eps_ok = certificates.iter().all(|c| c.pair_path_bound <= 5.0 * eps);
    let diameters_ok = lay.max_diameter <= scale;
    Ok(SquareOrder {
        seed,
        jitter_attempts,
        invertibility_scale,
        square_scale: scale,
        refinements,
        raw_maxima: basins.raw_maxima,
        raw_saddles: basins.raw_saddles,
        multi_saddles: basins.multi_saddles,
        basin_centres: basins.centres,
        arcs: lay.arcs,
        arc_basin: lay.arc_basin,
        seed_vertex,
        squares,
        repairs,
        certificates,
        max_square_diameter: lay.max_diameter,
        certified: overlaps_ok && boundary_ok && paths_2eps_ok && pairs_5eps_ok && diameters_ok,
        overlaps_ok,
        boundary_ok,
        paths_2eps_ok,
        pairs_5eps_ok,
        diameters_ok,
        height: f,
    })
}
