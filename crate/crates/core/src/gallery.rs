//! Test matrices: Grcar, seeded block-diagonal random matrices, Jordan
//! blocks, diagonal normal matrices and unit-vector pairs with a chosen
//! inner product.
//!
//! Random entries come from ChaCha8 seeded with the 64-bit seed; block `j`
//! draws from stream `j` of that generator, so adding or resizing one block
//! never changes the others.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError};
use crate::io::{complex_serde, parse_complex};
use crate::matops::{ComplexMatrix, C64};

/// A diagonal block: size and the multiple of the identity added to it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub size: usize,
    #[serde(with = "complex_serde")]
    pub shift: C64,
}

impl Block {
    pub fn new(size: usize, shift: C64) -> Self {
        Self { size, shift }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GallerySpec {
    Grcar {
        n: usize,
        #[serde(default = "three")]
        superdiags: usize,
    },
    BlockRandom {
        blocks: Vec<Block>,
        seed: u64,
        /// Drop the random part, leaving the shifts on the diagonal.
        #[serde(default)]
        zero_variance: bool,
    },
    Jordan {
        n: usize,
        #[serde(with = "complex_serde")]
        eigenvalue: C64,
    },
    NormalDiag {
        #[serde(with = "complex_serde::vec")]
        values: Vec<C64>,
    },
    /// `x y*` for the pair returned by [`rank_one_pair`].
    RankOne { n: usize, delta: f64 },
}

fn three() -> usize {
    3
}

/// Block layouts of the two-, three- and two-block examples.
pub fn preset(name: &str) -> Option<Vec<Block>> {
    let b = |size, re, im| Block::new(size, C64::new(re, im));
    match name {
        "fig4" => Some(vec![b(4, 0.0, 0.0), b(4, 8.0, 0.0)]),
        "fig5" => Some(vec![b(10, -20.0, 0.0), b(5, 0.0, 0.0), b(10, 20.0, 0.0)]),
        "fig6" => Some(vec![b(10, -5.0, 0.0), b(10, 10.0, 5.0)]),
        _ => None,
    }
}

/// Seed used when a preset is named without one. With it the documented
/// disks split each preset's numerical range.
pub const PRESET_SEED: u64 = 0;

impl GallerySpec {
    /// Parses `grcar:<n>[:<k>]`, `block:<preset>[:<seed>]`,
    /// `jordan:<n>:<lambda>`, `normal:diag(<z>,<z>,...)` and
    /// `rankone:<n>:<delta>`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let err = |msg: &str| ParseError::Gallery(format!("{msg} in {text:?}"));
        let int = |s: &str| s.trim().parse::<usize>().map_err(|_| err("bad integer"));
        let mut parts = text.trim().splitn(2, ':');
        let kind = parts.next().unwrap_or_default();
        let rest = parts.next();
        let spec = match (kind, rest) {
            ("grcar", Some(r)) => {
                let mut it = r.split(':');
                let n = int(it.next().unwrap_or_default())?;
                let superdiags = it.next().map(int).transpose()?.unwrap_or(3);
                if it.next().is_some() {
                    return Err(err("too many fields"));
                }
                GallerySpec::Grcar { n, superdiags }
            }
            ("block", Some(r)) => {
                let (name, seed) = match r.split_once(':') {
                    Some((name, s)) => (name, s.trim().parse::<u64>().map_err(|_| err("bad seed"))?),
                    None => (r, PRESET_SEED),
                };
                let blocks = preset(name).ok_or_else(|| err("unknown preset"))?;
                GallerySpec::BlockRandom {
                    blocks,
                    seed,
                    zero_variance: false,
                }
            }
            ("jordan", Some(r)) => {
                let (n, l) = r.split_once(':').ok_or_else(|| err("expected jordan:<n>:<eigenvalue>"))?;
                GallerySpec::Jordan {
                    n: int(n)?,
                    eigenvalue: parse_complex(l).map_err(|_| err("bad eigenvalue"))?,
                }
            }
            ("normal", Some(r)) => {
                let inner = r
                    .trim()
                    .strip_prefix("diag(")
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| err("expected normal:diag(...)"))?;
                let values = split_top_level(inner)
                    .into_iter()
                    .map(|s| parse_complex(s).map_err(|_| err("bad diagonal entry")))
                    .collect::<Result<Vec<_>, _>>()?;
                GallerySpec::NormalDiag { values }
            }
            ("rankone", Some(r)) => {
                let (n, d) = r.split_once(':').ok_or_else(|| err("expected rankone:<n>:<delta>"))?;
                GallerySpec::RankOne {
                    n: int(n)?,
                    delta: d.trim().parse().map_err(|_| err("bad delta"))?,
                }
            }
            _ => return Err(err("unknown matrix")),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ParseError> {
        let bad = |m: String| Err(ParseError::Gallery(m));
        let limit = crate::io::MAX_DIM;
        match self {
            GallerySpec::Grcar { n, superdiags } => {
                if *n < superdiags + 2 || *n > limit {
                    return bad(format!("grcar needs {} <= n <= {limit}, got {n}", superdiags + 2));
                }
            }
            GallerySpec::BlockRandom { blocks, .. } => {
                let total: usize = blocks.iter().map(|b| b.size).sum();
                if blocks.is_empty() || blocks.iter().any(|b| b.size == 0) || total > limit {
                    return bad(format!("block sizes must be positive with total <= {limit}"));
                }
                if blocks.iter().any(|b| !(b.shift.re.is_finite() && b.shift.im.is_finite())) {
                    return bad("block shifts must be finite".into());
                }
            }
            GallerySpec::Jordan { n, eigenvalue } => {
                if *n == 0 || *n > limit || !(eigenvalue.re.is_finite() && eigenvalue.im.is_finite()) {
                    return bad(format!("jordan needs 1 <= n <= {limit} and a finite eigenvalue"));
                }
            }
            GallerySpec::NormalDiag { values } => {
                if values.is_empty() || values.len() > limit {
                    return bad("normal:diag needs at least one value".into());
                }
            }
            GallerySpec::RankOne { n, delta } => {
                if *n < 2 || *n > limit || !(0.0..1.0).contains(delta) {
                    return bad(format!("rankone needs n >= 2 and 0 <= delta < 1, got {n}, {delta}"));
                }
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<ComplexMatrix, Error> {
        self.validate()?;
        match self {
            GallerySpec::Grcar { n, superdiags } => Ok(grcar(*n, *superdiags)),
            GallerySpec::BlockRandom {
                blocks,
                seed,
                zero_variance,
            } => Ok(block_random(blocks, *seed, *zero_variance)),
            GallerySpec::Jordan { n, eigenvalue } => Ok(jordan(*n, *eigenvalue)),
            GallerySpec::NormalDiag { values } => Ok(ComplexMatrix::diag(values)?),
            GallerySpec::RankOne { n, delta } => {
                let (x, y) = rank_one_pair(*n, *delta);
                Ok(ComplexMatrix::new(&x * y.adjoint())?)
            }
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    // Commas inside "(re,im)" literals do not separate entries.
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Toeplitz matrix with -1 on the subdiagonal and 1 on the diagonal and the
/// first `k` superdiagonals.
pub fn grcar(n: usize, k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |i, j| {
        let v = if i == j + 1 {
            -1.0
        } else if j >= i && j - i <= k {
            1.0
        } else {
            0.0
        };
        C64::new(v, 0.0)
    })
    .expect("finite entries")
}

/// Block-diagonal `shift_j I + R_j` with `R_j` real standard normal.
pub fn block_random(blocks: &[Block], seed: u64, zero_variance: bool) -> ComplexMatrix {
    let n: usize = blocks.iter().map(|b| b.size).sum();
    let mut m = nalgebra::DMatrix::<C64>::zeros(n, n);
    let mut off = 0;
    for (j, b) in blocks.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        for r in 0..b.size {
            for c in 0..b.size {
                let x: f64 = if zero_variance { 0.0 } else { StandardNormal.sample(&mut rng) };
                m[(off + r, off + c)] = C64::new(x, 0.0);
            }
            m[(off + r, off + r)] += b.shift;
        }
        off += b.size;
    }
    ComplexMatrix::new(m).expect("finite entries")
}

/// `lambda I + N` with `N` the nilpotent shift.
pub fn jordan(n: usize, eigenvalue: C64) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            eigenvalue
        } else if j == i + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
    .expect("finite entries")
}

/// Unit vectors `x = e_1`, `y = delta e_1 + sqrt(1 - delta^2) e_2`, so
/// `y* x = delta`.
pub fn rank_one_pair(n: usize, delta: f64) -> (DVector<C64>, DVector<C64>) {
    let mut x = DVector::zeros(n);
    let mut y = DVector::zeros(n);
    x[0] = C64::new(1.0, 0.0);
    y[0] = C64::new(delta, 0.0);
    y[1] = C64::new((1.0 - delta * delta).sqrt(), 0.0);
    (x, y)
}
