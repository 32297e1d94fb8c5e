//! Compressed sparse row matrices and a direct LU solver.
//!
//! Factorization is delegated to faer's supernodal sparse LU (COLAMD
//! ordering, partial pivoting), run sequentially so that repeated solves
//! are bit-reproducible. Rows and columns are equilibrated before
//! factorizing since the block systems mix moduli (~1e9) with compliances
//! (~1e-9).

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Coordinate-format accumulator. Duplicates are summed in insertion order.
#[derive(Clone, Debug, Default)]
pub struct TripletList {
    pub nrows: usize,
    pub ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletList {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletList {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_csr(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(self.nrows, self.ncols, &self.entries)
    }
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_triplets(nrows: usize, ncols: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, _, _) in entries {
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        // Bucket by row keeping insertion order, then sort each row by
        // column with a stable sort so duplicate summation order is fixed.
        let mut next = counts.clone();
        let mut bucket = vec![(0usize, 0.0f64); entries.len()];
        for &(r, c, v) in entries {
            bucket[next[r]] = (c, v);
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        row_ptr.push(0);
        for r in 0..nrows {
            let row = &mut bucket[counts[r]..counts[r + 1]];
            row.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut sum = 0.0;
                while i < row.len() && row[i].0 == c {
                    sum += row[i].1;
                    i += 1;
                }
                col_idx.push(c);
                values.push(sum);
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, m, &entries)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                d[r][c] = v;
            }
        }
        d
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// `x·(A y)`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.nrows)
            .map(|r| x[r] * self.row(r).map(|(c, v)| v * y[c]).sum::<f64>())
            .sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut entries = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                entries.push((c, r, v));
            }
        }
        Self::from_triplets(self.ncols, self.nrows, &entries)
    }

    /// `Σ coefᵢ · Aᵢ` over matrices of equal shape.
    pub fn linear_combination(terms: &[(f64, &SparseMatrix)]) -> SparseMatrix {
        let (nrows, ncols) = (terms[0].1.nrows, terms[0].1.ncols);
        let mut entries = Vec::new();
        for (coef, m) in terms {
            assert_eq!((m.nrows, m.ncols), (nrows, ncols));
            for r in 0..nrows {
                for (c, v) in m.row(r) {
                    entries.push((r, c, coef * v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &entries)
    }

    /// Zeroes the rows and columns of `dofs`, then writes `diagonal` on
    /// their diagonal entries (symmetric elimination of homogeneous
    /// Dirichlet constraints).
    pub fn eliminate(&self, dofs: &[bool], diagonal: f64) -> SparseMatrix {
        let mut entries = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            if dofs[r] {
                if diagonal != 0.0 {
                    entries.push((r, r, diagonal));
                }
                continue;
            }
            for (c, v) in self.row(r) {
                if !dofs[c] {
                    entries.push((r, c, v));
                }
            }
        }
        Self::from_triplets(self.nrows, self.ncols, &entries)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (0..self.nrows).all(|r| {
            self.row(r)
                .all(|(c, v)| (v - self.get(c, r)).abs() <= tol * scale)
        })
    }

    fn to_faer(&self, row_scale: &[f64], col_scale: &[f64]) -> Result<SparseColMat<usize, f64>> {
        let mut trip = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                trip.push(Triplet::new(r, c, row_scale[r] * v * col_scale[c]));
            }
        }
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &trip)
            .map_err(|e| Error::Assembly(format!("sparse conversion failed: {e:?}")))
    }
}

/// LU factorization of a square sparse matrix, reusable across solves.
pub struct Factorization {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization").field("n", &self.row_scale.len()).finish()
    }
}

/// Residual threshold above which a probe solve declares the matrix
/// numerically singular.
const PROBE_RESIDUAL: f64 = 1e-8;

pub fn factorize(a: &SparseMatrix) -> Result<Factorization> {
    if a.nrows != a.ncols {
        return Err(Error::Assembly(format!("cannot factorize a {}x{} matrix", a.nrows, a.ncols)));
    }
    faer::set_global_parallelism(Par::Seq);
    let n = a.nrows;
    // Ruiz-style max-norm equilibration, a few sweeps.
    let mut row_scale = vec![1.0; n];
    let mut col_scale = vec![1.0; n];
    for _ in 0..3 {
        let mut rmax = vec![0.0f64; n];
        let mut cmax = vec![0.0f64; n];
        for r in 0..n {
            for (c, v) in a.row(r) {
                let s = (row_scale[r] * v * col_scale[c]).abs();
                rmax[r] = rmax[r].max(s);
                cmax[c] = cmax[c].max(s);
            }
        }
        for i in 0..n {
            if rmax[i] == 0.0 || cmax[i] == 0.0 {
                return Err(Error::Singular {
                    dof: i,
                    block: "structurally empty row or column".into(),
                });
            }
            row_scale[i] /= rmax[i].sqrt();
            col_scale[i] /= cmax[i].sqrt();
        }
    }
    let scaled = a.to_faer(&row_scale, &col_scale)?;
    let lu = scaled.sp_lu().map_err(|e| match e {
        faer::sparse::linalg::LuError::SymbolicSingular { index } => Error::Singular {
            dof: index,
            block: "structurally singular".into(),
        },
        other => Error::Assembly(format!("LU factorization failed: {other:?}")),
    })?;
    let f = Factorization {
        lu,
        row_scale,
        col_scale,
    };
    f.probe(a)?;
    Ok(f)
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.row_scale.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| self.row_scale[i] * b[i]);
        self.lu.solve_in_place(rhs.as_mut());
        for i in 0..n {
            b[i] = self.col_scale[i] * rhs[(i, 0)];
        }
    }

    /// Solves against a smooth synthetic right-hand side and rejects the
    /// factorization when the residual is non-finite or large.
    fn probe(&self, a: &SparseMatrix) -> Result<()> {
        let n = self.dim();
        let x_true: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (i as f64 * 0.7).sin()).collect();
        let b = a.matvec(&x_true);
        let x = self.solve(&b);
        let r = a.matvec(&x);
        let mut worst = (0usize, 0.0f64);
        let mut bnorm = 0.0f64;
        for i in 0..n {
            let scaled = self.row_scale[i] * (r[i] - b[i]);
            let err = if x[i].is_finite() && scaled.is_finite() {
                scaled.abs()
            } else {
                f64::INFINITY
            };
            if err > worst.1 || (err.is_infinite() && worst.1.is_finite()) {
                worst = (i, err);
            }
            bnorm = bnorm.max((self.row_scale[i] * b[i]).abs());
        }
        if !(worst.1 <= PROBE_RESIDUAL * bnorm.max(f64::MIN_POSITIVE)) {
            return Err(Error::Singular {
                dof: worst.0,
                block: "numerically singular".into(),
            });
        }
        Ok(())
    }
}
