//! Uniform unit reference vectors and their adaptation to objective ranges.

use crate::error::{Error, Result};

/// Range component substituted for a zero-width objective range during adaptation.
pub const MIN_RANGE: f64 = 1e-12;

/// Number of compositions of `h` into `m` nonnegative parts, `C(h+m-1, m-1)`.
pub fn lattice_count(m: usize, h: usize) -> u128 {
    if m == 0 {
        return 0;
    }
    let k = (m - 1) as u128;
    let n = (h + m - 1) as u128;
    // multiplicative form stays exact because every prefix product is a binomial
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// All points `c / h` with `c` a nonnegative integer composition of `h` into `m` parts.
pub fn lattice_points(m: usize, h: usize) -> Vec<Vec<f64>> {
    fn rec(m: usize, left: usize, h: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == m - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / h as f64).collect());
            cur.pop();
            return;
        }
        for c in (0..=left).rev() {
            cur.push(c);
            rec(m, left - c, h, cur, out);
            cur.pop();
        }
    }
    if m == 0 || h == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(m, h, h, &mut Vec::with_capacity(m), &mut out);
    out
}

fn normalized(mut w: Vec<f64>) -> Vec<f64> {
    let n = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    w.iter_mut().for_each(|v| *v /= n);
    w
}

/// Simplex-lattice design mapped onto the unit sphere.
pub fn simplex_lattice(m: usize, h: usize) -> Vec<Vec<f64>> {
    lattice_points(m, h).into_iter().map(normalized).collect()
}

/// Outer simplex lattice plus an inner lattice shrunk halfway to the centroid.
pub fn two_layer_vectors(m: usize, h_outer: usize, h_inner: usize) -> Vec<Vec<f64>> {
    let centroid = 1.0 / m as f64;
    let mut out = simplex_lattice(m, h_outer);
    for w in lattice_points(m, h_inner) {
        let v = normalized(w.into_iter().map(|wi| 0.5 * wi + 0.5 * centroid).collect());
        let dup = out
            .iter()
            .any(|o| o.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12));
        if !dup {
            out.push(v);
        }
    }
    out
}

/// Smallest angle (radians) from each vector to any other vector of the set.
pub fn min_angles(vectors: &[Vec<f64>]) -> Result<Vec<f64>> {
    if vectors.len() < 2 {
        return Err(Error::contract(format!(
            "minimum angles need at least 2 vectors, got {}",
            vectors.len()
        )));
    }
    let n = vectors.len();
    let mut best = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in i + 1..n {
            let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
            let angle = dot.clamp(-1.0, 1.0).acos();
            best[i] = best[i].min(angle);
            best[j] = best[j].min(angle);
        }
    }
    Ok(best)
}

/// How the initial vectors are laid out for a given objective count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Single(usize),
    TwoLayer(usize, usize),
}

impl Layout {
    /// Layouts giving 105, 132, 156 and 275 vectors for 3, 6, 8 and 10
    /// objectives; about a hundred vectors for other counts.
    pub fn default_for(m: usize) -> Layout {
        match m {
            0..=2 => Layout::Single(99),
            3 => Layout::Single(13),
            4 => Layout::Single(7),
            5 => Layout::Single(5),
            6 => Layout::TwoLayer(4, 1),
            7..=10 => Layout::TwoLayer(3, 2),
            _ => Layout::TwoLayer(2, 1),
        }
    }

    pub fn vectors(self, m: usize) -> Vec<Vec<f64>> {
        match self {
            Layout::Single(h) => simplex_lattice(m, h),
            Layout::TwoLayer(h1, h2) => two_layer_vectors(m, h1, h2),
        }
    }
}

/// Initial and adapted unit reference vectors with their minimum-angle cache.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceVectorSet {
    initial: Vec<Vec<f64>>,
    current: Vec<Vec<f64>>,
    min_angle: Vec<f64>,
}

impl ReferenceVectorSet {
    pub fn new(initial: Vec<Vec<f64>>) -> Result<Self> {
        for (i, v) in initial.iter().enumerate() {
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 || v.iter().any(|&c| c < 0.0) {
                return Err(Error::contract(format!(
                    "reference vector {i} is not a nonnegative unit vector"
                )));
            }
        }
        let min_angle = min_angles(&initial)?;
        Ok(Self {
            current: initial.clone(),
            initial,
            min_angle,
        })
    }

    pub fn for_objectives(m: usize) -> Result<Self> {
        Self::new(Layout::default_for(m).vectors(m))
    }

    pub fn len(&self) -> usize {
        self.current.len()
    }

    pub fn is_empty(&self) -> bool {
        self.current.is_empty()
    }

    pub fn initial(&self) -> &[Vec<f64>] {
        &self.initial
    }

    pub fn current(&self) -> &[Vec<f64>] {
        &self.current
    }

    pub fn min_angle(&self) -> &[f64] {
        &self.min_angle
    }

    /// Rescale the initial vectors by the objective range `zmax - zmin` and
    /// renormalize. Zero-width components are replaced by [`MIN_RANGE`].
    pub fn adapt(&self, zmax: &[f64], zmin: &[f64]) -> Result<Self> {
        let m = self.initial.first().map_or(0, Vec::len);
        if zmax.len() != m || zmin.len() != m {
            return Err(Error::contract(format!(
                "range vectors must have length {m}"
            )));
        }
        if zmax.iter().zip(zmin).any(|(hi, lo)| hi < lo) {
            return Err(Error::contract("zmax must be >= zmin componentwise"));
        }
        if zmax.iter().zip(zmin).all(|(hi, lo)| hi == lo) {
            return Err(Error::DegenerateRange);
        }
        let range: Vec<f64> = zmax
            .iter()
            .zip(zmin)
            .map(|(hi, lo)| {
                let r = hi - lo;
                if r > 0.0 {
                    r
                } else {
                    MIN_RANGE
                }
            })
            .collect();
        let current: Vec<Vec<f64>> = self
            .initial
            .iter()
            .map(|v| normalized(v.iter().zip(&range).map(|(a, b)| a * b).collect()))
            .collect();
        let min_angle = min_angles(&current)?;
        Ok(Self {
            initial: self.initial.clone(),
            current,
            min_angle,
        })
    }
}
