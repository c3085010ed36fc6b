//! Planar point processes and cell geometry.
//!
//! Patterns live in a finite [`Window`]. The default metric is toroidal so a
//! finite window stands in for the stationary infinite plane without edge
//! effects; the euclidean-truncated metric is there for sensitivity checks.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::rng::{derive_seed, rng_from_seed, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// Opposite edges are identified; distances take the shortest wrap.
    #[default]
    Toroidal,
    /// Plain euclidean distance; nothing exists outside the window.
    EuclideanTruncated,
}

/// Axis-aligned observation region `[0, width) x [0, height)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    width: f64,
    height: f64,
    metric: Metric,
}

impl Window {
    pub fn new(width: f64, height: f64, metric: Metric) -> Result<Self> {
        require_positive("width", width)?;
        require_positive("height", height)?;
        Ok(Self {
            width,
            height,
            metric,
        })
    }

    /// Toroidal square window of the given side.
    pub fn square(side: f64) -> Result<Self> {
        Self::new(side, side, Metric::Toroidal)
    }

    /// Toroidal square window expected to hold `mean_count` points of a PPP
    /// with the given intensity.
    pub fn for_mean_count(intensity: f64, mean_count: f64) -> Result<Self> {
        require_positive("intensity", intensity)?;
        require_positive("mean_count", mean_count)?;
        Self::square((mean_count / intensity).sqrt())
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * self.width, 0.5 * self.height)
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..self.width).contains(&p.x) && (0.0..self.height).contains(&p.y)
    }

    /// Displacement `a - b` under the window metric.
    #[inline]
    pub fn displacement(&self, a: Point, b: Point) -> (f64, f64) {
        let mut dx = a.x - b.x;
        let mut dy = a.y - b.y;
        if self.metric == Metric::Toroidal {
            dx -= self.width * (dx / self.width).round();
            dy -= self.height * (dy / self.height).round();
        }
        (dx, dy)
    }

    #[inline]
    pub fn distance_squared(&self, a: Point, b: Point) -> f64 {
        let (dx, dy) = self.displacement(a, b);
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        self.distance_squared(a, b).sqrt()
    }

    /// Maps a point back into the window (toroidal) or returns `None` when it
    /// falls outside (truncated).
    fn wrap(&self, p: Point) -> Option<Point> {
        match self.metric {
            Metric::Toroidal => Some(Point::new(
                p.x.rem_euclid(self.width) % self.width,
                p.y.rem_euclid(self.height) % self.height,
            )),
            Metric::EuclideanTruncated => self.contains(p).then_some(p),
        }
    }

    fn uniform_point(&self, rng: &mut impl Rng) -> Point {
        Point::new(
            rng.random::<f64>() * self.width,
            rng.random::<f64>() * self.height,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// A realization of a point process.
///
/// `cluster_of[i]` is the index into `parents` of the cluster that spawned
/// point `i`; both are absent for unclustered patterns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointPattern {
    pub points: Vec<Point>,
    pub cluster_of: Option<Vec<usize>>,
    pub parents: Option<Vec<Point>>,
}

impl PointPattern {
    pub fn unclustered(points: Vec<Point>) -> Self {
        Self {
            points,
            cluster_of: None,
            parents: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Writes `x,y,parent_index` rows, `-1` marking unclustered points.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y,parent_index")?;
        for (i, p) in self.points.iter().enumerate() {
            let parent = self
                .cluster_of
                .as_ref()
                .map_or(-1, |c| c[i] as i64);
            writeln!(out, "{:.17e},{:.17e},{}", p.x, p.y, parent)?;
        }
        Ok(())
    }

    /// Reads the table written by [`PointPattern::write_csv`].
    ///
    /// Parent locations are not part of the table, so `parents` comes back
    /// `None` even for clustered input.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header".into()))??;
        if header.trim() != "x,y,parent_index" {
            return Err(Error::Parse(format!("unexpected header `{header}`")));
        }
        let mut points = Vec::new();
        let mut parents = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: malformed row `{line}`", lineno + 2));
            let mut cols = line.split(',');
            let x: f64 = cols.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            let y: f64 = cols.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            let parent: i64 = cols.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            if cols.next().is_some() {
                return Err(bad());
            }
            points.push(Point::new(x, y));
            parents.push(parent);
        }
        let clustered = parents.iter().any(|&p| p >= 0);
        let cluster_of = if clustered {
            Some(
                parents
                    .iter()
                    .map(|&p| {
                        usize::try_from(p).map_err(|_| {
                            Error::Parse("mixed clustered and unclustered rows".into())
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        Ok(Self {
            points,
            cluster_of,
            parents: None,
        })
    }
}

/// Poisson cluster process parameters (Matérn-type clusters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcpParams {
    /// Parent intensity, parents per m².
    pub lambda_p: f64,
    /// Daughter intensity inside a cluster disc, users per m².
    pub lambda_c: f64,
    /// Cluster radius, m.
    pub r_c: f64,
}

impl PcpParams {
    pub fn new(lambda_p: f64, lambda_c: f64, r_c: f64) -> Result<Self> {
        let params = Self {
            lambda_p,
            lambda_c,
            r_c,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("lambda_p", self.lambda_p)?;
        require_positive("lambda_c", self.lambda_c)?;
        require_positive("r_c", self.r_c)?;
        Ok(())
    }

    /// Mean daughters per cluster, `π r_c² λ_c`.
    pub fn mean_cluster_size(&self) -> f64 {
        PI * self.r_c * self.r_c * self.lambda_c
    }

    /// Overall user intensity `π r_c² λ_c λ_p`.
    pub fn user_intensity(&self) -> f64 {
        self.mean_cluster_size() * self.lambda_p
    }
}

fn poisson_count(rng: &mut SimRng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean)
        .map(|d| d.sample(rng) as usize)
        .unwrap_or(0)
}

/// Homogeneous PPP of the given intensity in `window`.
pub fn sample_ppp(intensity: f64, window: &Window, seed: u64) -> Result<PointPattern> {
    require_non_negative("intensity", intensity)?;
    let mut rng = rng_from_seed(seed);
    Ok(PointPattern::unclustered(sample_ppp_points(
        &mut rng, intensity, window,
    )))
}

pub(crate) fn sample_ppp_points(rng: &mut SimRng, intensity: f64, window: &Window) -> Vec<Point> {
    let count = poisson_count(rng, intensity * window.area());
    (0..count).map(|_| window.uniform_point(rng)).collect()
}

/// Poisson cluster process: PPP parents, each with a Poisson number of
/// daughters uniform in the disc of radius `r_c` around it.
pub fn sample_pcp(params: &PcpParams, window: &Window, seed: u64) -> Result<PointPattern> {
    params.validate()?;
    if 2.0 * params.r_c >= window.width().min(window.height()) {
        return Err(Error::param(
            "r_c",
            format!(
                "cluster diameter {} must be below the smaller window side {}",
                2.0 * params.r_c,
                window.width().min(window.height())
            ),
        ));
    }
    let mut rng = rng_from_seed(seed);
    Ok(sample_pcp_with(&mut rng, params, window))
}

pub(crate) fn sample_pcp_with(rng: &mut SimRng, params: &PcpParams, window: &Window) -> PointPattern {
    let parents = sample_ppp_points(rng, params.lambda_p, window);
    let mean_size = params.mean_cluster_size();
    let mut points = Vec::new();
    let mut cluster_of = Vec::new();
    for (j, parent) in parents.iter().enumerate() {
        for _ in 0..poisson_count(rng, mean_size) {
            let r = params.r_c * rng.random::<f64>().sqrt();
            let phi = 2.0 * PI * rng.random::<f64>();
            let raw = Point::new(parent.x + r * phi.cos(), parent.y + r * phi.sin());
            if let Some(p) = window.wrap(raw) {
                points.push(p);
                cluster_of.push(j);
            }
        }
    }
    PointPattern {
        points,
        cluster_of: Some(cluster_of),
        parents: Some(parents),
    }
}

/// Uniform-grid bucket index answering nearest-neighbour queries under the
/// window metric. Ties go to the lowest point index.
#[derive(Debug, Clone)]
pub struct NearestIndex<'a> {
    points: &'a [Point],
    window: Window,
    nx: usize,
    ny: usize,
    cell_w: f64,
    cell_h: f64,
    starts: Vec<u32>,
    entries: Vec<u32>,
}

impl<'a> NearestIndex<'a> {
    pub fn new(points: &'a [Point], window: &Window) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPattern("nearest-neighbour index needs points"));
        }
        // about two points per bucket
        let target = (points.len() as f64 / 2.0).max(1.0);
        let aspect = window.width() / window.height();
        let nx = ((target * aspect).sqrt().round() as usize).clamp(1, 4096);
        let ny = ((target / aspect).sqrt().round() as usize).clamp(1, 4096);
        let cell_w = window.width() / nx as f64;
        let cell_h = window.height() / ny as f64;

        let bucket = |p: &Point| -> usize {
            let ix = ((p.x / cell_w) as usize).min(nx - 1);
            let iy = ((p.y / cell_h) as usize).min(ny - 1);
            iy * nx + ix
        };
        let mut counts = vec![0u32; nx * ny + 1];
        for p in points {
            counts[bucket(p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut entries = vec![0u32; points.len()];
        // ascending index order inside each bucket
        for (i, p) in points.iter().enumerate() {
            let b = bucket(p);
            entries[fill[b] as usize] = i as u32;
            fill[b] += 1;
        }
        Ok(Self {
            points,
            window: *window,
            nx,
            ny,
            cell_w,
            cell_h,
            starts,
            entries,
        })
    }

    /// Index of the nearest point to `q` and its squared distance.
    pub fn nearest(&self, q: Point) -> (usize, f64) {
        let ix = ((q.x / self.cell_w).floor() as isize).clamp(0, self.nx as isize - 1);
        let iy = ((q.y / self.cell_h).floor() as isize).clamp(0, self.ny as isize - 1);
        let toroidal = self.window.metric() == Metric::Toroidal;
        let cell_min = self.cell_w.min(self.cell_h);
        let mut best = (usize::MAX, f64::INFINITY);

        let mut ring = 0isize;
        loop {
            if toroidal && (2 * ring + 1) as usize > self.nx.min(self.ny) {
                return self.brute_force(q);
            }
            if !toroidal && ring > self.nx.max(self.ny) as isize {
                return best;
            }
            for dy in -ring..=ring {
                let edge_row = dy.abs() == ring;
                let step = if edge_row { 1 } else { (2 * ring).max(1) };
                let mut dx = -ring;
                while dx <= ring {
                    self.scan_bucket(ix + dx, iy + dy, q, toroidal, &mut best);
                    dx += step;
                }
            }
            let reach = ring as f64 * cell_min;
            if best.1 < reach * reach {
                return best;
            }
            ring += 1;
        }
    }

    fn scan_bucket(&self, bx: isize, by: isize, q: Point, toroidal: bool, best: &mut (usize, f64)) {
        let (bx, by) = if toroidal {
            (
                bx.rem_euclid(self.nx as isize) as usize,
                by.rem_euclid(self.ny as isize) as usize,
            )
        } else {
            if bx < 0 || by < 0 || bx >= self.nx as isize || by >= self.ny as isize {
                return;
            }
            (bx as usize, by as usize)
        };
        let b = by * self.nx + bx;
        for &e in &self.entries[self.starts[b] as usize..self.starts[b + 1] as usize] {
            let i = e as usize;
            let d2 = self.window.distance_squared(q, self.points[i]);
            if d2 < best.1 || (d2 == best.1 && i < best.0) {
                *best = (i, d2);
            }
        }
    }

    fn brute_force(&self, q: Point) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, p) in self.points.iter().enumerate() {
            let d2 = self.window.distance_squared(q, *p);
            if d2 < best.1 {
                best = (i, d2);
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssociationMode {
    /// Every user attaches to its own nearest BS.
    #[default]
    PerUser,
    /// Every daughter attaches to the BS nearest its cluster parent.
    PerCluster,
}

/// User-to-BS assignment. `serving_bs[u]` and `cell_members[b]` describe the
/// same relation from both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationMap {
    pub serving_bs: Vec<usize>,
    pub cell_members: Vec<Vec<usize>>,
}

impl AssociationMap {
    fn from_serving(serving_bs: Vec<usize>, bs_count: usize) -> Self {
        let mut cell_members = vec![Vec::new(); bs_count];
        for (u, &b) in serving_bs.iter().enumerate() {
            cell_members[b].push(u);
        }
        Self {
            serving_bs,
            cell_members,
        }
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        self.cell_members.iter().map(Vec::len).collect()
    }
}

pub fn associate(
    users: &PointPattern,
    bss: &PointPattern,
    window: &Window,
    mode: AssociationMode,
) -> Result<AssociationMap> {
    if bss.is_empty() {
        return Err(Error::EmptyPattern("association needs at least one BS"));
    }
    let index = NearestIndex::new(&bss.points, window)?;
    let serving = match mode {
        AssociationMode::PerUser => users.points.iter().map(|&u| index.nearest(u).0).collect(),
        AssociationMode::PerCluster => {
            let (Some(cluster_of), Some(parents)) = (&users.cluster_of, &users.parents) else {
                return Err(Error::param(
                    "mode",
                    "per-cluster association needs a clustered pattern with parent locations",
                ));
            };
            let parent_bs: Vec<usize> = parents.iter().map(|&p| index.nearest(p).0).collect();
            cluster_of.iter().map(|&c| parent_bs[c]).collect()
        }
    };
    Ok(AssociationMap::from_serving(serving, bss.len()))
}

const PROBE_CHUNK: usize = 1 << 16;

/// Monte Carlo Voronoi cell areas: `probes` uniform points are assigned to
/// their nearest BS and each cell gets its share of the window area.
pub fn estimate_cell_areas(
    bss: &PointPattern,
    window: &Window,
    probes: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if probes < 10_000 {
        return Err(Error::param("probes", format!("need at least 10^4, got {probes}")));
    }
    if bss.is_empty() {
        return Err(Error::EmptyPattern("cell areas need at least one BS"));
    }
    let index = NearestIndex::new(&bss.points, window)?;
    let chunks = probes.div_ceil(PROBE_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_from_seed(derive_seed(seed, c as u64));
            let n = PROBE_CHUNK.min(probes - c * PROBE_CHUNK);
            let mut counts = vec![0u64; bss.len()];
            for _ in 0..n {
                counts[index.nearest(window.uniform_point(&mut rng)).0] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; bss.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let per_probe = window.area() / probes as f64;
    Ok(counts.into_iter().map(|c| c as f64 * per_probe).collect())
}

/// Gamma(3.5)-shaped approximation to the PDF of a Poisson-Voronoi cell area.
pub fn cell_area_density(x: f64, lambda_b: f64) -> Result<f64> {
    require_non_negative("x", x)?;
    require_positive("lambda_b", lambda_b)?;
    let norm = 343.0 / 15.0 * (3.5 / PI).sqrt();
    let s = x * lambda_b;
    Ok(norm * s.powf(2.5) * (-3.5 * s).exp() * lambda_b)
}

/// PDF of the distance from a fixed location to the nearest point of a PPP.
pub fn nearest_distance_density(l: f64, lambda_b: f64) -> Result<f64> {
    require_non_negative("l", l)?;
    require_positive("lambda_b", lambda_b)?;
    Ok(2.0 * PI * lambda_b * l * (-lambda_b * PI * l * l).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus(side: f64) -> Window {
        Window::square(side).unwrap()
    }

    #[test]
    fn zero_intensity_is_empty() {
        let w = torus(100.0);
        assert!(sample_ppp(0.0, &w, 1).unwrap().is_empty());
        assert!(sample_ppp(-1.0, &w, 1).is_err());
        assert!(sample_ppp(f64::NAN, &w, 1).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let w = torus(1000.0);
        assert_eq!(sample_ppp(1e-4, &w, 9).unwrap(), sample_ppp(1e-4, &w, 9).unwrap());
        let pcp = PcpParams::new(1e-5, 1e-3, 30.0).unwrap();
        assert_eq!(sample_pcp(&pcp, &w, 4).unwrap(), sample_pcp(&pcp, &w, 4).unwrap());
    }

    #[test]
    fn pcp_rejects_wide_clusters() {
        let w = torus(10.0);
        let pcp = PcpParams::new(0.1, 0.1, 5.0).unwrap();
        assert!(sample_pcp(&pcp, &w, 0).is_err());
    }

    #[test]
    fn pcp_daughters_stay_near_parent() {
        let w = torus(200.0);
        let pcp = PcpParams::new(2e-3, 0.05, 8.0).unwrap();
        let pat = sample_pcp(&pcp, &w, 3).unwrap();
        let parents = pat.parents.as_ref().unwrap();
        for (p, &c) in pat.points.iter().zip(pat.cluster_of.as_ref().unwrap()) {
            assert!(w.contains(*p));
            assert!(w.distance(*p, parents[c]) <= pcp.r_c + 1e-9);
        }
    }

    #[test]
    fn truncated_pcp_keeps_points_inside() {
        let w = Window::new(100.0, 60.0, Metric::EuclideanTruncated).unwrap();
        let pcp = PcpParams::new(5e-3, 0.2, 5.0).unwrap();
        let pat = sample_pcp(&pcp, &w, 8).unwrap();
        assert!(pat.points.iter().all(|p| w.contains(*p)));
    }

    #[test]
    fn single_bs_takes_everything() {
        let w = torus(50.0);
        let bss = PointPattern::unclustered(vec![Point::new(10.0, 10.0)]);
        let users = sample_ppp(0.05, &w, 2).unwrap();
        let map = associate(&users, &bss, &w, AssociationMode::PerUser).unwrap();
        assert!(map.serving_bs.iter().all(|&b| b == 0));
        assert_eq!(map.cell_members[0].len(), users.len());

        let areas = estimate_cell_areas(&bss, &w, 10_000, 1).unwrap();
        assert_eq!(areas, vec![w.area()]);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let w = Window::new(10.0, 10.0, Metric::EuclideanTruncated).unwrap();
        let bss = PointPattern::unclustered(vec![Point::new(7.0, 5.0), Point::new(3.0, 5.0)]);
        let users = PointPattern::unclustered(vec![Point::new(5.0, 5.0)]);
        let map = associate(&users, &bss, &w, AssociationMode::PerUser).unwrap();
        assert_eq!(map.serving_bs, vec![0]);
    }

    #[test]
    fn empty_bs_pattern_is_an_error() {
        let w = torus(10.0);
        let users = PointPattern::unclustered(vec![Point::new(1.0, 1.0)]);
        let none = PointPattern::default();
        assert!(associate(&users, &none, &w, AssociationMode::PerUser).is_err());
        assert!(estimate_cell_areas(&none, &w, 10_000, 0).is_err());
    }

    #[test]
    fn per_cluster_needs_parents() {
        let w = torus(10.0);
        let users = PointPattern::unclustered(vec![Point::new(1.0, 1.0)]);
        let bss = PointPattern::unclustered(vec![Point::new(2.0, 2.0)]);
        assert!(associate(&users, &bss, &w, AssociationMode::PerCluster).is_err());
    }

    #[test]
    fn too_few_probes_rejected() {
        let w = torus(10.0);
        let bss = PointPattern::unclustered(vec![Point::new(2.0, 2.0)]);
        assert!(estimate_cell_areas(&bss, &w, 9_999, 0).is_err());
    }

    #[test]
    fn toroidal_distance_wraps() {
        let w = torus(10.0);
        let d = w.distance(Point::new(0.5, 5.0), Point::new(9.5, 5.0));
        assert!((d - 1.0).abs() < 1e-12);
        let e = Window::new(10.0, 10.0, Metric::EuclideanTruncated).unwrap();
        assert!((e.distance(Point::new(0.5, 5.0), Point::new(9.5, 5.0)) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn densities_vanish_at_origin_and_reject_negatives() {
        assert_eq!(cell_area_density(0.0, 1e-5).unwrap(), 0.0);
        assert_eq!(nearest_distance_density(0.0, 1e-5).unwrap(), 0.0);
        assert!(cell_area_density(-1.0, 1e-5).is_err());
        assert!(nearest_distance_density(-1.0, 1e-5).is_err());
    }

    #[test]
    fn csv_round_trip_keeps_cluster_labels() {
        let w = torus(100.0);
        let pcp = PcpParams::new(1e-3, 0.05, 5.0).unwrap();
        let pat = sample_pcp(&pcp, &w, 12).unwrap();
        let mut buf = Vec::new();
        pat.write_csv(&mut buf).unwrap();
        let back = PointPattern::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.points, pat.points);
        assert_eq!(back.cluster_of, pat.cluster_of);

        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y,parent_index\n"));
    }

    #[test]
    fn csv_marks_unclustered_rows() {
        let pat = PointPattern::unclustered(vec![Point::new(1.0, 2.0)]);
        let mut buf = Vec::new();
        pat.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",-1"));
        assert_eq!(PointPattern::read_csv(text.as_bytes()).unwrap(), pat);
    }
}
