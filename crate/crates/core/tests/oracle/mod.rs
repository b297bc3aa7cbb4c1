//! Independent shortest-path oracle for the fiber planner.
//!
//! Dijkstra over a visibility graph whose obstacle vertices are a dense ring
//! of samples on the polygon circumscribing the contact circle. Adjacent ring
//! vertices are joined by edges tangent to the circle; the endpoints connect
//! to every ring vertex they can see.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use fibersim_core::geometry::Vec2;

pub const RING_SAMPLES: usize = 10_000;

fn clearance(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (c - a).norm();
    }
    let s = ((c - a).dot(ab) / len2).clamp(0.0, 1.0);
    (a + ab * s - c).norm()
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal)
    }
}

/// Length of the shortest path from `p` to `q` avoiding the open disk of
/// radius `radius` around `c`.
pub fn shortest_path_length(p: Vec2, q: Vec2, c: Vec2, radius: f64) -> f64 {
    let visible = |a: Vec2, b: Vec2| clearance(a, b, c) >= radius * (1.0 - 1e-9);
    if visible(p, q) {
        return (q - p).norm();
    }
    let n = RING_SAMPLES;
    let ring_r = radius / (std::f64::consts::PI / n as f64).cos();
    let ring: Vec<Vec2> = (0..n)
        .map(|i| c + Vec2::from_polar(ring_r, std::f64::consts::TAU * i as f64 / n as f64))
        .collect();
    // node 0 = p, 1 = q, 2.. = ring
    let mut dist = vec![f64::INFINITY; n + 2];
    let mut heap = BinaryHeap::new();
    dist[0] = 0.0;
    heap.push(Entry(0.0, 0));
    let q_links: Vec<Option<f64>> = ring.iter().map(|v| visible(*v, q).then(|| (q - *v).norm())).collect();
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == 1 {
            return d;
        }
        let mut relax = |v: usize, w: f64, heap: &mut BinaryHeap<Entry>| {
            if d + w < dist[v] {
                dist[v] = d + w;
                heap.push(Entry(d + w, v));
            }
        };
        if u == 0 {
            for (i, v) in ring.iter().enumerate() {
                if visible(p, *v) {
                    relax(i + 2, (*v - p).norm(), &mut heap);
                }
            }
        } else {
            let i = u - 2;
            for j in [(i + 1) % n, (i + n - 1) % n] {
                relax(j + 2, (ring[j] - ring[i]).norm(), &mut heap);
            }
            if let Some(w) = q_links[i] {
                relax(1, w, &mut heap);
            }
        }
    }
    f64::INFINITY
}
