//! Independent reference implementations shared by the oracle tests and
//! the acceptance run.
#![allow(dead_code)]

use graphtrack::detection::{
    analyze_frame, Candidate, DetectedObject, DetectionParams, Shape, ShapeFilterParams,
};
use graphtrack::imaging::{BandpassParams, GrayFrame};
use graphtrack::linking::{LinkEdge, ObjectRef};
use graphtrack::trajectory::Observation;
use rand::Rng;

pub fn random_frame(rng: &mut impl Rng, w: usize, h: usize) -> GrayFrame {
    GrayFrame::from_fn(w, h, |_, _| rng.random::<f64>())
}

pub fn clamped(f: &GrayFrame, x: isize, y: isize) -> f64 {
    let x = x.clamp(0, f.width() as isize - 1) as usize;
    let y = y.clamp(0, f.height() as isize - 1) as usize;
    f.get(x, y)
}

/// Direct evaluation of `sum k(i, j) f(x + i, y + j)` with replicated edges.
pub fn correlate_2d(f: &GrayFrame, kernel: &[Vec<f64>]) -> Vec<f64> {
    let half = (kernel.len() / 2) as isize;
    let mut out = Vec::with_capacity(f.width() * f.height());
    for y in 0..f.height() as isize {
        for x in 0..f.width() as isize {
            let mut acc = 0.0;
            for (j, row) in kernel.iter().enumerate() {
                for (i, k) in row.iter().enumerate() {
                    acc += k * clamped(f, x + i as isize - half, y + j as isize - half);
                }
            }
            out.push(acc);
        }
    }
    out
}

pub fn gaussian_2d(sigma: f64) -> Vec<Vec<f64>> {
    let half = (3.0 * sigma).ceil() as i64;
    let mut k: Vec<Vec<f64>> = (-half..=half)
        .map(|j| {
            (-half..=half)
                .map(|i| (-((i * i + j * j) as f64) / (2.0 * sigma * sigma)).exp())
                .collect()
        })
        .collect();
    let total: f64 = k.iter().flatten().sum();
    k.iter_mut().flatten().for_each(|v| *v /= total);
    k
}

pub fn boxcar_2d(w: usize) -> Vec<Vec<f64>> {
    let n = 2 * w + 1;
    vec![vec![1.0 / (n * n) as f64; n]; n]
}

pub fn naive_bandpass(f: &GrayFrame, w: usize, sigma: f64) -> Vec<f64> {
    let g = correlate_2d(f, &gaussian_2d(sigma));
    let b = correlate_2d(f, &boxcar_2d(w));
    g.iter().zip(&b).map(|(g, b)| (g - b).max(0.0)).collect()
}

pub fn naive_sobel(f: &GrayFrame) -> Vec<f64> {
    let kx = vec![
        vec![-1.0, 0.0, 1.0],
        vec![-2.0, 0.0, 2.0],
        vec![-1.0, 0.0, 1.0],
    ];
    let ky = vec![
        vec![-1.0, -2.0, -1.0],
        vec![0.0, 0.0, 0.0],
        vec![1.0, 2.0, 1.0],
    ];
    let gx = correlate_2d(f, &kx);
    let gy = correlate_2d(f, &ky);
    gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect()
}

/// Disjoint-set forest over pixel indices.
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Components as sorted pixel-index lists, ordered by their first pixel.
pub fn union_find_components(f: &GrayFrame) -> Vec<Vec<usize>> {
    let (w, h) = (f.width(), f.height());
    let on = |x: usize, y: usize| f.get(x, y) != 0.0;
    let mut uf = UnionFind::new(w * h);
    for y in 0..h {
        for x in 0..w {
            if !on(x, y) {
                continue;
            }
            if x + 1 < w && on(x + 1, y) {
                uf.union(y * w + x, y * w + x + 1);
            }
            if y + 1 < h && on(x, y + 1) {
                uf.union(y * w + x, (y + 1) * w + x);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for y in 0..h {
        for x in 0..w {
            if on(x, y) {
                let i = y * w + x;
                let root = uf.find(i);
                groups.entry(root).or_default().push(i);
            }
        }
    }
    // Roots are the smallest index of each set, so map order is scan order.
    groups.into_values().collect()
}

pub const SUPERSAMPLE: usize = 8;

/// Area fraction of each pixel inside `inner <= r <= outer` around `c`,
/// estimated on an 8x8 subgrid.
pub fn rasterize(size: usize, c: (f64, f64), inner: f64, outer: f64) -> GrayFrame {
    let step = 1.0 / SUPERSAMPLE as f64;
    GrayFrame::from_fn(size, size, |x, y| {
        let mut hits = 0;
        for j in 0..SUPERSAMPLE {
            for i in 0..SUPERSAMPLE {
                let px = x as f64 - 0.5 + (i as f64 + 0.5) * step;
                let py = y as f64 - 0.5 + (j as f64 + 0.5) * step;
                let r = (px - c.0).hypot(py - c.1);
                if r >= inner && r <= outer {
                    hits += 1;
                }
            }
        }
        hits as f64 / (SUPERSAMPLE * SUPERSAMPLE) as f64
    })
}

pub fn detection_params(outer: f64, shape: Shape) -> DetectionParams {
    DetectionParams {
        bandpass: BandpassParams {
            object_size: (2.0 * outer).round() as usize,
            noise_level: 1.0,
            threshold: 0.1,
            invert: false,
        },
        shape: ShapeFilterParams {
            shape,
            r_min: 1.0,
            r_max: 3.0 * outer,
            delta_a: 0.3,
            delta_c: 5.0,
            delta_i: 0.5,
        },
    }
}

/// The measured object nearest to `c`, accepted or not.
pub fn nearest_object(
    frame: &GrayFrame,
    params: &DetectionParams,
    c: (f64, f64),
) -> DetectedObject {
    analyze_frame(frame, 0, params)
        .unwrap()
        .into_iter()
        .filter_map(|cand| match cand {
            Candidate::Accepted(o) | Candidate::Rejected(o, _) => Some(o),
            _ => None,
        })
        .min_by(|a, b| {
            let da = (a.x() - c.0).hypot(a.y() - c.1);
            let db = (b.x() - c.0).hypot(b.y() - c.1);
            da.total_cmp(&db)
        })
        .expect("an object near the planted centre")
}

pub const OFFSETS: [(f64, f64); 4] = [(0.0, 0.0), (0.3, 0.1), (0.5, 0.5), (0.77, 0.21)];

pub struct Instance {
    pub sizes: Vec<usize>,
    pub edges: Vec<LinkEdge>,
}

pub fn edge(from: ObjectRef, to: ObjectRef, cost: f64) -> LinkEdge {
    LinkEdge {
        from,
        to,
        distance: 0.0,
        radius_cost: 0.0,
        angle_deg: 0.0,
        angle_cost: 0.0,
        total_cost: cost,
    }
}

/// Up to 8 objects in each of 4 frames. Coarse costs force exact ties.
pub fn random_instance(rng: &mut impl Rng, coarse: bool) -> Instance {
    let sizes: Vec<usize> = (0..4).map(|_| rng.random_range(1..=8)).collect();
    let p = rng.random_range(0.2..0.9);
    let mut edges = Vec::new();
    for m in 0..3 {
        for i in 0..sizes[m] {
            for j in 0..sizes[m + 1] {
                if rng.random_bool(p) {
                    let cost = if coarse {
                        rng.random_range(0..=6) as f64 * 0.5
                    } else {
                        rng.random_range(0.0..3.0)
                    };
                    edges.push(edge(ObjectRef::new(m, i), ObjectRef::new(m + 1, j), cost));
                }
            }
        }
    }
    Instance { sizes, edges }
}

/// Every path from `source` through unclaimed objects, with its cost.
pub fn enumerate(
    inst: &Instance,
    source: ObjectRef,
    claimed: &[Vec<bool>],
) -> Vec<(Vec<ObjectRef>, f64)> {
    let mut done = Vec::new();
    let mut stack = vec![(vec![source], 0.0)];
    while let Some((path, cost)) = stack.pop() {
        let last = *path.last().unwrap();
        for e in inst.edges.iter().filter(|e| e.from == last) {
            if !claimed[e.to.frame][e.to.index] {
                let mut next = path.clone();
                next.push(e.to);
                stack.push((next, cost + e.total_cost));
            }
        }
        done.push((path, cost));
    }
    done
}

/// Farthest reach first, then lowest cost, then smallest label sequence.
pub fn best(paths: Vec<(Vec<ObjectRef>, f64)>) -> Vec<ObjectRef> {
    let labels =
        |p: &[ObjectRef]| -> Vec<(usize, usize)> { p.iter().map(|r| (r.frame, r.index)).collect() };
    paths
        .into_iter()
        .min_by(|(pa, ca), (pb, cb)| {
            pb.last()
                .unwrap()
                .frame
                .cmp(&pa.last().unwrap().frame)
                .then(ca.total_cmp(cb))
                .then_with(|| labels(pa).cmp(&labels(pb)))
        })
        .unwrap()
        .0
}

pub fn brute_force(
    inst: &Instance,
    min_len: usize,
    claim: impl Fn(&[ObjectRef]) -> usize,
) -> Vec<Vec<ObjectRef>> {
    let mut claimed: Vec<Vec<bool>> = inst.sizes.iter().map(|&n| vec![false; n]).collect();
    let mut kept = Vec::new();
    for m in 0..inst.sizes.len() {
        for i in 0..inst.sizes[m] {
            if claimed[m][i] {
                continue;
            }
            let raw = best(enumerate(inst, ObjectRef::new(m, i), &claimed));
            let keep = claim(&raw).min(raw.len());
            if keep < min_len {
                continue;
            }
            for r in &raw[..keep] {
                claimed[r.frame][r.index] = true;
            }
            kept.push(raw[..keep].to_vec());
        }
    }
    kept
}

/// `chi2(mu + delta) - chi2(mu)` summed term by term as
/// `(a - b)(a + b)`, which resolves changes far below the rounding error of
/// two separately evaluated sums.
pub fn chi_squared_change(obs: &[Observation], mu: f64, delta: f64, c: f64) -> f64 {
    obs.iter()
        .map(|o| {
            let r = o.y - mu * c;
            (-delta * c) * (2.0 * r - delta * c) / (o.sigma_y * o.sigma_y)
        })
        .sum()
}
