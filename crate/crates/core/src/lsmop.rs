//! The LSMOP1–LSMOP9 large-scale benchmark problems.
//!
//! Every objective has the form `f_k = h_k(x_f) * (1 + g_k(L(x_s)))` where
//! `x_f` are the first `M - 1` (position) variables, `x_s` the remaining
//! distance variables, `L` a linear or nonlinear linkage that couples `x_s`
//! to `x_f[0]`, and `g_k` a landscape function averaged over the `k`-th
//! contiguous group of linked distance variables. LSMOP9 replaces the shape
//! with a disconnected front on its last objective.

use std::f64::consts::{E, PI};
use std::fmt;
use std::io::Write;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::refvec;
use crate::types::{Bounds, Problem};

/// Default number of reference points used for IGD.
pub const DEFAULT_PF_POINTS: usize = 10_000;

/// Bounds of the two Pareto-optimal intervals of the disconnected front.
const DISCONNECTED_INTERVALS: [(f64, f64); 2] = [(0.0, 0.251412), (0.631627, 0.859401)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    /// `(1 + i/|x_s|) * (x_i - l_i) - x_f[0] * (u_i - l_i)`
    Linear,
    /// `(1 + cos(pi/2 * i/|x_s|)) * (x_i - l_i) - x_f[0] * (u_i - l_i)`
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfShape {
    /// Front on the simplex `sum f = 1`.
    Linear,
    /// Front on the positive orthant of the unit sphere.
    Spherical,
    /// Disconnected front: `f_k = x_k` for `k < M`, last objective folded by a sine.
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Landscape {
    Sphere,
    Schwefel,
    Rosenbrock,
    Rastrigin,
    Griewank,
    Ackley,
}

impl Landscape {
    /// Landscape value of `y`; zero at `y = 0` and nonnegative elsewhere.
    /// Rosenbrock is shifted by one so its minimum also sits at the origin.
    pub fn value(self, y: &[f64]) -> f64 {
        if y.is_empty() {
            return 0.0;
        }
        let n = y.len() as f64;
        let v = match self {
            Landscape::Sphere => y.iter().map(|v| v * v).sum(),
            Landscape::Schwefel => y.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            Landscape::Rosenbrock => y
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0] + 1.0, w[1] + 1.0);
                    100.0 * (a * a - b).powi(2) + (a - 1.0).powi(2)
                })
                .sum(),
            Landscape::Rastrigin => y
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                .sum(),
            Landscape::Griewank => {
                let s: f64 = y.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let p: f64 = y
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                s - p + 1.0
            }
            Landscape::Ackley => {
                let s: f64 = y.iter().map(|v| v * v).sum::<f64>() / n;
                let c: f64 = y.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                20.0 - 20.0 * (-0.2 * s.sqrt()).exp() - c.exp() + E
            }
        };
        // Rounding can leave Ackley/Griewank a few ulps below zero at the optimum.
        v.max(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct LsmopInstance {
    id: usize,
    m: usize,
    d: usize,
    bounds: Bounds,
    linkage: Linkage,
    shape: PfShape,
    /// Landscapes for odd- and even-numbered objectives (1-based).
    landscapes: [Landscape; 2],
    /// Index ranges into the distance part, one per objective.
    groups: Vec<Range<usize>>,
}

impl fmt::Display for LsmopInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LSMOP{} (M={}, D={})", self.id, self.m, self.d)
    }
}

impl LsmopInstance {
    /// Build LSMOP`id` with `m` objectives and `d` variables using the
    /// default bounds `x_f in [0,1]`, `x_s in [0,10]`.
    pub fn new(id: usize, m: usize, d: usize) -> Result<Self> {
        if !(1..=9).contains(&id) {
            return Err(Error::config(format!("LSMOP id must be in 1..=9, got {id}")));
        }
        if m < 2 {
            return Err(Error::config(format!("LSMOP needs at least 2 objectives, got {m}")));
        }
        if d < m {
            return Err(Error::config(format!(
                "LSMOP with M={m} needs D > {}, got {d}",
                m - 1
            )));
        }
        let mut upper = vec![1.0; m - 1];
        upper.resize(d, 10.0);
        let bounds = Bounds::new(vec![0.0; d], upper)?;
        Self::with_bounds(id, m, bounds)
    }

    /// Build with explicit bounds; the dimension is taken from `bounds`.
    pub fn with_bounds(id: usize, m: usize, bounds: Bounds) -> Result<Self> {
        use Landscape::*;
        let d = bounds.dim();
        if !(1..=9).contains(&id) {
            return Err(Error::config(format!("LSMOP id must be in 1..=9, got {id}")));
        }
        if m < 2 || d < m {
            return Err(Error::config(format!(
                "invalid LSMOP dimensions M={m}, D={d}"
            )));
        }
        let landscapes = match id {
            1 => [Sphere, Sphere],
            2 => [Griewank, Schwefel],
            3 => [Rastrigin, Rosenbrock],
            4 => [Ackley, Griewank],
            5 => [Sphere, Sphere],
            6 => [Rosenbrock, Schwefel],
            7 => [Ackley, Rosenbrock],
            8 => [Griewank, Sphere],
            _ => [Sphere, Ackley],
        };
        let linkage = if id <= 4 {
            Linkage::Linear
        } else {
            Linkage::Nonlinear
        };
        let shape = match id {
            1..=4 => PfShape::Linear,
            5..=8 => PfShape::Spherical,
            _ => PfShape::Disconnected,
        };
        let groups = split_groups(d - (m - 1), m);
        Ok(Self {
            id,
            m,
            d,
            bounds,
            linkage,
            shape,
            landscapes,
            groups,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn xf_len(&self) -> usize {
        self.m - 1
    }

    pub fn xs_len(&self) -> usize {
        self.d - (self.m - 1)
    }

    pub fn linkage(&self) -> Linkage {
        self.linkage
    }

    pub fn shape(&self) -> PfShape {
        self.shape
    }

    pub fn landscape_for(&self, k: usize) -> Landscape {
        self.landscapes[k % 2]
    }

    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    /// Linked distance vector `L(x_s)`; zero exactly on the Pareto set.
    pub fn apply_linkage(&self, x: &[f64]) -> Vec<f64> {
        let nf = self.xf_len();
        let ns = self.xs_len() as f64;
        let lo = self.bounds.lower();
        let x1 = x[0];
        x[nf..]
            .iter()
            .enumerate()
            .map(|(j, &xi)| {
                let idx = nf + j;
                let ratio = (j + 1) as f64 / ns;
                let coef = match self.linkage {
                    Linkage::Linear => 1.0 + ratio,
                    Linkage::Nonlinear => 1.0 + (0.5 * PI * ratio).cos(),
                };
                coef * (xi - lo[idx]) - x1 * self.bounds.width(idx)
            })
            .collect()
    }

    /// Per-objective landscape values `g_k`, each averaged over its group.
    pub fn landscape_values(&self, x: &[f64]) -> Vec<f64> {
        let linked = self.apply_linkage(x);
        self.groups
            .iter()
            .enumerate()
            .map(|(k, r)| {
                if r.is_empty() {
                    0.0
                } else {
                    self.landscape_for(k).value(&linked[r.clone()]) / r.len() as f64
                }
            })
            .collect()
    }

    /// Shape values `h_k(x_f)` for the linear and spherical fronts.
    fn shape_values(&self, xf: &[f64]) -> Vec<f64> {
        let m = self.m;
        let (head, tail): (fn(f64) -> f64, fn(f64) -> f64) = match self.shape {
            PfShape::Spherical => (|v| (0.5 * PI * v).cos(), |v| (0.5 * PI * v).sin()),
            _ => (|v| v, |v| 1.0 - v),
        };
        (0..m)
            .map(|k| {
                let mut h: f64 = xf[..m - 1 - k].iter().map(|&v| head(v)).product();
                if k > 0 {
                    h *= tail(xf[m - 1 - k]);
                }
                h
            })
            .collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::contract(format!(
                "decision vector has {} entries, {} expects {}",
                x.len(),
                self,
                self.d
            )));
        }
        let g = self.landscape_values(x);
        let xf = &x[..self.xf_len()];
        let f: Vec<f64> = match self.shape {
            PfShape::Linear | PfShape::Spherical => self
                .shape_values(xf)
                .into_iter()
                .zip(&g)
                .map(|(h, gk)| h * (1.0 + gk))
                .collect(),
            PfShape::Disconnected => {
                let gsum: f64 = g.iter().sum();
                let mut f = xf.to_vec();
                let fold: f64 = xf
                    .iter()
                    .map(|&v| v / (1.0 + gsum) * (1.0 + (3.0 * PI * v).sin()))
                    .sum();
                f.push((1.0 + gsum) * (self.m as f64 - fold));
                f
            }
        };
        if let Some((index, &value)) = f.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Evaluation { index, value });
        }
        Ok(f)
    }

    /// Deterministic sample of (at most) `n` points on the true Pareto front.
    ///
    /// Linear and spherical fronts use the largest simplex lattice with at
    /// most `n` points; the disconnected front uses a grid over its `M - 1`
    /// free objectives restricted to the Pareto-optimal intervals.
    pub fn sample_pf(&self, n: usize) -> Vec<Vec<f64>> {
        let n = n.max(1);
        let m = self.m;
        let points: Vec<Vec<f64>> = match self.shape {
            PfShape::Linear | PfShape::Spherical => {
                let mut h = 1;
                while refvec::lattice_count(m, h + 1) <= n as u128 {
                    h += 1;
                }
                let mut pts = refvec::lattice_points(m, h);
                if self.shape == PfShape::Spherical {
                    for p in &mut pts {
                        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                        p.iter_mut().for_each(|v| *v /= norm);
                    }
                }
                pts
            }
            PfShape::Disconnected => {
                let axis = grid_axis_count(n, m - 1);
                let [a, b] = DISCONNECTED_INTERVALS;
                let first = a.1 - a.0;
                let pivot = first / (first + b.1 - b.0);
                let map = |t: f64| {
                    if t <= pivot {
                        a.0 + t * first / pivot
                    } else {
                        b.0 + (t - pivot) * (b.1 - b.0) / (1.0 - pivot)
                    }
                };
                let coords: Vec<f64> = (0..axis)
                    .map(|i| {
                        if axis == 1 {
                            0.0
                        } else {
                            map(i as f64 / (axis - 1) as f64)
                        }
                    })
                    .collect();
                let total = axis.pow((m - 1) as u32);
                (0..total)
                    .map(|mut idx| {
                        let mut p = Vec::with_capacity(m);
                        for _ in 0..m - 1 {
                            p.push(coords[idx % axis]);
                            idx /= axis;
                        }
                        let last: f64 = m as f64
                            - p.iter()
                                .map(|&v| v * (1.0 + (3.0 * PI * v).sin()))
                                .sum::<f64>();
                        p.push(last);
                        p
                    })
                    .collect()
            }
        };
        dedup_points(points)
    }
}

impl Problem for LsmopInstance {
    fn num_objectives(&self) -> usize {
        self.m
    }

    fn num_variables(&self) -> usize {
        self.d
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        LsmopInstance::evaluate(self, x)
    }
}

/// Split `len` indices into `parts` contiguous ranges whose sizes differ by at most one.
fn split_groups(len: usize, parts: usize) -> Vec<Range<usize>> {
    let base = len / parts;
    let extra = len % parts;
    let mut start = 0;
    (0..parts)
        .map(|k| {
            let size = base + usize::from(k < extra);
            let r = start..start + size;
            start += size;
            r
        })
        .collect()
}

/// Largest per-axis count `s` with `s^dims <= n` (at least 1).
fn grid_axis_count(n: usize, dims: usize) -> usize {
    let mut s = 1usize;
    while (s + 1).checked_pow(dims as u32).is_some_and(|p| p <= n) {
        s += 1;
    }
    s
}

fn dedup_points(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut seen = std::collections::HashSet::new();
    points
        .into_iter()
        .filter(|p| seen.insert(p.iter().map(|v| v.to_bits()).collect::<Vec<_>>()))
        .collect()
}

/// Write a point set as text: one point per line, whitespace-separated.
pub fn write_points<W: Write>(points: &[Vec<f64>], mut out: W) -> std::io::Result<()> {
    for p in points {
        let line: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Parse the text format written by [`write_points`].
pub fn read_points(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(n, line)| {
            line.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: {tok:?}: {e}", n + 1)))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_of_paper_sized_instances() {
        let p = LsmopInstance::new(1, 3, 300).unwrap();
        assert_eq!((p.xf_len(), p.xs_len()), (2, 298));
        assert_eq!(p.linkage(), Linkage::Linear);
        assert_eq!(p.shape(), PfShape::Linear);

        let p = LsmopInstance::new(9, 10, 1000).unwrap();
        assert_eq!(p.shape(), PfShape::Disconnected);
        assert_eq!(p.linkage(), Linkage::Nonlinear);

        let p = LsmopInstance::new(5, 2, 3).unwrap();
        assert_eq!((p.xf_len(), p.xs_len()), (1, 2));
    }

    #[test]
    fn invalid_instances() {
        assert!(matches!(LsmopInstance::new(0, 3, 10), Err(Error::Config(_))));
        assert!(matches!(LsmopInstance::new(10, 3, 10), Err(Error::Config(_))));
        assert!(matches!(LsmopInstance::new(1, 3, 2), Err(Error::Config(_))));
        assert!(matches!(LsmopInstance::new(1, 1, 5), Err(Error::Config(_))));
    }

    #[test]
    fn id_determines_linkage_and_shape() {
        for id in 1..=9 {
            let p = LsmopInstance::new(id, 3, 20).unwrap();
            let want = if id <= 4 { Linkage::Linear } else { Linkage::Nonlinear };
            assert_eq!(p.linkage(), want);
        }
    }

    #[test]
    fn groups_cover_distance_part() {
        let p = LsmopInstance::new(1, 3, 12).unwrap();
        let sizes: Vec<usize> = p.groups().iter().map(|r| r.len()).collect();
        assert_eq!(sizes, vec![4, 3, 3]);
        assert_eq!(p.groups()[2].end, p.xs_len());
    }

    #[test]
    fn linkage_examples() {
        // l = 0, u = 1 on every coordinate
        let b = Bounds::new(vec![0.0; 4], vec![1.0; 4]).unwrap();
        let lin = LsmopInstance::with_bounds(1, 2, b.clone()).unwrap();
        let x = [0.3, 0.0, 0.0, 0.7];
        let l = lin.apply_linkage(&x);
        assert_eq!(l.len(), 3);
        assert_eq!(l[2], 2.0 * 0.7 - 0.3);
        let at_lower = lin.apply_linkage(&[0.0, 0.0, 0.0, 0.0]);
        assert!(at_lower.iter().all(|&v| v == 0.0));

        let non = LsmopInstance::with_bounds(5, 2, b).unwrap();
        let l = non.apply_linkage(&x);
        assert!((l[2] - (0.7 - 0.3)).abs() < 1e-15);
    }

    #[test]
    fn landscapes_vanish_at_origin() {
        use Landscape::*;
        let z = [0.0; 7];
        for l in [Sphere, Schwefel, Rosenbrock, Rastrigin, Griewank, Ackley] {
            assert!(l.value(&z).abs() < 1e-12, "{l:?}");
            assert!(l.value(&[0.3, -2.0, 1.5]) > 0.0, "{l:?}");
        }
    }

    #[test]
    fn boundary_vertex_zeroes_first_objective() {
        let p = LsmopInstance::new(1, 2, 10).unwrap();
        let mut x = vec![0.0; 10];
        for v in x.iter_mut().skip(1) {
            *v = 7.3;
        }
        let f = p.evaluate(&x).unwrap();
        assert_eq!(f[0], 0.0);
        assert!(f[1] >= 1.0);
    }

    #[test]
    fn overflow_is_reported() {
        let b = Bounds::new(vec![0.0; 3], vec![1.0, 1e200, 1e200]).unwrap();
        let p = LsmopInstance::with_bounds(1, 2, b).unwrap();
        let err = p.evaluate(&[0.5, 1e200, 1e200]).unwrap_err();
        assert!(matches!(err, Error::Evaluation { .. }));
    }

    #[test]
    fn sample_pf_linear_two_objectives() {
        let p = LsmopInstance::new(1, 2, 5).unwrap();
        let pf = p.sample_pf(3);
        assert_eq!(pf.len(), 3);
        for want in [[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]] {
            assert!(pf.iter().any(|q| q[0] == want[0] && q[1] == want[1]));
        }
    }

    #[test]
    fn sample_pf_respects_front_class() {
        for id in 1..=8 {
            for m in [2, 3, 5] {
                let p = LsmopInstance::new(id, m, m + 5).unwrap();
                let pf = p.sample_pf(500);
                assert!(!pf.is_empty() && pf.len() <= 500);
                for q in &pf {
                    assert!(q.iter().all(|&v| v >= 0.0));
                    if id <= 4 {
                        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    } else {
                        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
                        assert!((n - 1.0).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn points_text_roundtrip() {
        let p = LsmopInstance::new(9, 3, 10).unwrap();
        let pts = p.sample_pf(50);
        let mut buf = Vec::new();
        write_points(&pts, &mut buf).unwrap();
        let back = read_points(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, pts);
        assert!(read_points("1 x\n").is_err());
    }
}
