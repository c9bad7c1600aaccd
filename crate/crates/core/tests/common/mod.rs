#![allow(dead_code)]

use framecast::linalg::{self, Matrix};
use framecast::local_global::LocalSystem;
use framecast::projectors::{PartitionProjectors, Projector, ProjectorFamily};
use framecast::VectorSystem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const DEFAULT_SEED: u64 = 0x5eed_f4a3;

/// Seed from `FRAMECAST_TEST_SEED`, falling back to a fixed default.
pub fn seed() -> u64 {
    std::env::var("FRAMECAST_TEST_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

pub fn gaussian(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_row_major(rows, cols, gaussian(rng, rows * cols)).unwrap()
}

/// Orthogonal matrix from the eigenvectors of a random symmetric matrix.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Matrix {
    let a = gaussian_matrix(rng, n, n);
    let s = a.add(&a.transpose()).unwrap().scale(0.5);
    linalg::sym_eigen(&s, 1e-13, linalg::DEFAULT_MAX_SWEEPS).unwrap().vectors
}

pub fn relative_error(got: &[f64], want: &[f64]) -> f64 {
    let diff: Vec<f64> = got.iter().zip(want).map(|(a, b)| a - b).collect();
    linalg::norm2(&diff) / linalg::norm2(want).max(f64::MIN_POSITIVE)
}

/// Random block sizes in `1..=max_block` whose sum stays within `max_dim`.
pub fn random_blocks(rng: &mut impl Rng, max_dim: usize, max_block: usize) -> Vec<usize> {
    let target = rng.random_range(1..=max_dim);
    let mut sizes = Vec::new();
    let mut used = 0;
    while used < target {
        let s = rng.random_range(1..=max_block).min(max_dim - used);
        if s == 0 {
            break;
        }
        sizes.push(s);
        used += s;
    }
    sizes
}

/// A local system on a contiguous partition: each patch holds between
/// `|block|` and `|block| + 2` Gaussian generators, with block-internal
/// entries kept and off-block entries multiplied by `leak`.
pub struct LeakyInstance {
    pub partition: PartitionProjectors,
    pub inner: Vec<Vec<Vec<f64>>>,
    pub outer: Vec<Vec<Vec<f64>>>,
}

impl LeakyInstance {
    pub fn random(rng: &mut impl Rng, max_dim: usize, max_block: usize) -> Self {
        let sizes = random_blocks(rng, max_dim, max_block);
        let partition = PartitionProjectors::contiguous(&sizes).unwrap();
        let d = partition.dim();
        let mut inner = Vec::new();
        let mut outer = Vec::new();
        for block in partition.blocks() {
            let count = block.len() + rng.random_range(0..=2);
            let mut pi = Vec::new();
            let mut po = Vec::new();
            for _ in 0..count {
                let g = gaussian(rng, d);
                let mut a = vec![0.0; d];
                let mut b = vec![0.0; d];
                for i in 0..d {
                    if block.contains(&i) {
                        a[i] = g[i];
                    } else {
                        b[i] = g[i];
                    }
                }
                pi.push(a);
                po.push(b);
            }
            inner.push(pi);
            outer.push(po);
        }
        Self { partition, inner, outer }
    }

    pub fn local(&self, leak: f64) -> LocalSystem {
        let patches = self
            .inner
            .iter()
            .zip(&self.outer)
            .map(|(pi, po)| {
                pi.iter()
                    .zip(po)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + leak * y).collect())
                    .collect()
            })
            .collect();
        LocalSystem::new(self.partition.dim(), patches).unwrap()
    }
}

/// Coordinate subsets with `P_j P_k = 0` whenever `|j − k| ≥ band`: subset
/// `j` draws from `[s_j, s_{j+band})` for increasing starts `s_j`. When
/// `complete` is set every coordinate is covered.
pub fn banded_subsets(rng: &mut impl Rng, d: usize, members: usize, band: usize, complete: bool) -> Vec<Vec<usize>> {
    let mut starts: Vec<usize> = vec![0];
    let mut cuts: Vec<usize> = (1..d).collect();
    for i in (1..cuts.len()).rev() {
        cuts.swap(i, rng.random_range(0..=i));
    }
    let mut picked: Vec<usize> = cuts.into_iter().take(members.saturating_sub(1)).collect();
    picked.sort_unstable();
    starts.extend(picked);
    let n = starts.len();
    let limit = |j: usize| if j + band < n { starts[j + band] } else { d };
    let mut subsets: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            (starts[j]..limit(j))
                .filter(|_| rng.random_bool(0.6))
                .collect::<Vec<_>>()
        })
        .collect();
    for (j, s) in subsets.iter_mut().enumerate() {
        if s.is_empty() {
            s.push(starts[j]);
        }
    }
    if complete {
        for i in 0..d {
            if !subsets.iter().any(|s| s.contains(&i)) {
                let j = starts.iter().rposition(|&s| s <= i).unwrap();
                subsets[j].push(i);
                subsets[j].sort_unstable();
            }
        }
    }
    subsets
}

/// `U P Uᵀ` for every member; preserves commutation and vanishing products.
pub fn rotate_family(fam: &ProjectorFamily, u: &Matrix) -> ProjectorFamily {
    let ut = u.transpose();
    let members = fam
        .members()
        .iter()
        .map(|p| {
            let m = u.matmul(p.matrix()).unwrap().matmul(&ut).unwrap().symmetrized();
            Projector::new(m, 1e-9).unwrap()
        })
        .collect();
    ProjectorFamily::new(fam.dim(), members).unwrap()
}

/// The columns of every member as one vector system; its frame operator is
/// `Σ P_j² = Σ P_j`.
pub fn family_as_vectors(fam: &ProjectorFamily) -> VectorSystem {
    let d = fam.dim();
    let vectors = fam
        .members()
        .iter()
        .flat_map(|p| (0..d).map(move |c| p.matrix().column(c)))
        .collect();
    VectorSystem::new(d, vectors).unwrap()
}
