//! Exact linear algebra over ℚ.
//!
//! Matrices are stored as sparse rows (sorted column indices, nonzero
//! entries only). The reduced row echelon form computed here is the unique
//! canonical one, so every choice made downstream (kernel bases, cohomology
//! representatives, sections) is deterministic.

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::scalar::{q, Q};
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Strategy for deterministic choices in sections and representative
/// completion. `FirstPivot` scans columns left to right, `LastPivot` right to
/// left. Both are fully deterministic; minimal-model generator tables must
/// not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    FirstPivot,
    LastPivot,
}

type Row = Vec<(u32, Q)>;

/// A matrix over ℚ with `rows × cols` logical entries, stored sparsely.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Row>,
}

fn row_scale(row: &mut Row, c: &Q) {
    if c.is_zero() {
        row.clear();
    } else if !c.is_one() {
        for (_, v) in row.iter_mut() {
            *v *= c;
        }
    }
}

/// `target += c * src`, both sorted sparse rows.
fn row_axpy(target: &Row, c: &Q, src: &Row) -> Row {
    if c.is_zero() || src.is_empty() {
        return target.clone();
    }
    let mut out = Vec::with_capacity(target.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < src.len() {
        let (ct, vt) = &target[i];
        let (cs, vs) = &src[j];
        match ct.cmp(cs) {
            std::cmp::Ordering::Less => {
                out.push((*ct, vt.clone()));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((*cs, c * vs));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = vt + &(c * vs);
                if !v.is_zero() {
                    out.push((*ct, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(target[i..].iter().cloned());
    out.extend(src[j..].iter().map(|(cs, vs)| (*cs, c * vs)));
    out
}

fn row_get(row: &Row, col: u32) -> Q {
    match row.binary_search_by_key(&col, |e| e.0) {
        Ok(k) => row[k].1.clone(),
        Err(_) => Q::zero(),
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i as u32, Q::one())]).collect();
        QMatrix { rows: n, cols: n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data = rows
            .into_iter()
            .map(|row| {
                assert_eq!(row.len(), c, "ragged rows");
                row.into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j as u32, v))
                    .collect()
            })
            .collect();
        QMatrix { rows: r, cols: c, data }
    }

    /// Convenience for integer literals in tests.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, Q)>>(
        rows: usize,
        cols: usize,
        entries: I,
    ) -> Self {
        let mut acc: Vec<BTreeMap<u32, Q>> = vec![BTreeMap::new(); rows];
        for (i, j, v) in entries {
            assert!(i < rows && j < cols, "triplet out of range");
            if v.is_zero() {
                continue;
            }
            let slot = acc[i].entry(j as u32).or_insert_with(Q::zero);
            *slot += v;
        }
        let data = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        QMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> Q {
        row_get(&self.data[i], j as u32)
    }

    pub fn row(&self, i: usize) -> &[(u32, Q)] {
        &self.data[i]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: Q) {
        let row = &mut self.data[i];
        match row.binary_search_by_key(&(j as u32), |e| e.0) {
            Ok(k) => {
                if v.is_zero() {
                    row.remove(k);
                } else {
                    row[k].1 = v;
                }
            }
            Err(k) => {
                if !v.is_zero() {
                    row.insert(k, (j as u32, v));
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut out = vec![vec![Q::zero(); self.cols]; self.rows];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                out[i][*j as usize] = v.clone();
            }
        }
        out
    }

    pub fn col_vec(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.entry(i, j)).collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut data: Vec<Row> = vec![Vec::new(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                data[*j as usize].push((i as u32, v.clone()));
            }
        }
        QMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let one = Q::one();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| row_axpy(a, &one, b))
            .collect();
        QMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let minus_one = -Q::one();
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| row_axpy(a, &minus_one, b))
            .collect();
        QMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> QMatrix {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> QMatrix {
        let mut m = self.clone();
        for row in &mut m.data {
            row_scale(row, c);
        }
        m
    }

    pub fn mul(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in mul");
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: Row = Vec::new();
                for (k, v) in row {
                    acc = row_axpy(&acc, v, &rhs.data[*k as usize]);
                }
                acc
            })
            .collect();
        QMatrix { rows: self.rows, cols: rhs.cols, data }
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        self.data
            .iter()
            .map(|row| {
                let mut s = Q::zero();
                for (j, a) in row {
                    let x = &v[*j as usize];
                    if !x.is_zero() {
                        s += a * x;
                    }
                }
                s
            })
            .collect()
    }

    pub fn mul_sparse_vec(&self, v: &[(u32, Q)]) -> Vec<(u32, Q)> {
        // (A v) computed column-wise: sum v_j * col_j. Work via transpose-free
        // accumulation over rows instead.
        let mut acc: BTreeMap<u32, Q> = BTreeMap::new();
        for (i, row) in self.data.iter().enumerate() {
            let mut s = Q::zero();
            let mut touched = false;
            let (mut a, mut b) = (0usize, 0usize);
            while a < row.len() && b < v.len() {
                match row[a].0.cmp(&v[b].0) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        s += &row[a].1 * &v[b].1;
                        touched = true;
                        a += 1;
                        b += 1;
                    }
                }
            }
            if touched && !s.is_zero() {
                acc.insert(i as u32, s);
            }
        }
        acc.into_iter().collect()
    }

    /// Horizontal concatenation.
    pub fn hstack(parts: &[&QMatrix]) -> QMatrix {
        assert!(!parts.is_empty());
        let rows = parts[0].rows;
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut data: Vec<Row> = vec![Vec::new(); rows];
        let mut offset = 0u32;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack row mismatch");
            for (i, row) in m.data.iter().enumerate() {
                data[i].extend(row.iter().map(|(j, v)| (j + offset, v.clone())));
            }
            offset += m.cols as u32;
        }
        QMatrix { rows, cols, data }
    }

    /// Vertical concatenation.
    pub fn vstack(parts: &[&QMatrix]) -> QMatrix {
        assert!(!parts.is_empty());
        let cols = parts[0].cols;
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut data = Vec::with_capacity(rows);
        for m in parts {
            assert_eq!(m.cols, cols, "vstack col mismatch");
            data.extend(m.data.iter().cloned());
        }
        QMatrix { rows, cols, data }
    }

    /// Build the matrix whose columns are the given dense vectors.
    pub fn from_cols(ambient: usize, cols: &[Vec<Q>]) -> QMatrix {
        let mut m = QMatrix::zeros(ambient, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), ambient);
            for (i, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    m.data[i].push((j as u32, v.clone()));
                }
            }
        }
        m
    }

    /// The unique reduced row echelon form plus its pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        // Forward phase: process columns left to right so that the pivot
        // column set is the lexicographically first independent one; among
        // candidate rows pick the sparsest to limit fill-in.
        let mut pending: Vec<Row> = self.data.iter().filter(|r| !r.is_empty()).cloned().collect();
        let mut placed: Vec<Row> = Vec::new(); // normalized, leading cols strictly increasing
        let mut pivots: Vec<usize> = Vec::new();

        // Bucket pending rows by leading column.
        let mut buckets: BTreeMap<u32, Vec<Row>> = BTreeMap::new();
        for r in pending.drain(..) {
            buckets.entry(r[0].0).or_default().push(r);
        }

        while let Some((&col, _)) = buckets.iter().next() {
            let mut cands = buckets.remove(&col).unwrap();
            // sparsest candidate as pivot; ties keep first for determinism
            let mut best = 0;
            for (k, r) in cands.iter().enumerate() {
                if r.len() < cands[best].len() {
                    best = k;
                }
            }
            let mut piv = cands.swap_remove(best);
            let inv = piv[0].1.clone().recip();
            row_scale(&mut piv, &inv);
            for r in cands {
                let c = -row_get(&r, col);
                let nr = row_axpy(&r, &c, &piv);
                if !nr.is_empty() {
                    buckets.entry(nr[0].0).or_default().push(nr);
                }
            }
            pivots.push(col as usize);
            placed.push(piv);
        }

        // Back substitution: clear entries above each pivot.
        for k in (0..placed.len()).rev() {
            let piv = placed[k].clone();
            let col = piv[0].0;
            for r in placed.iter_mut().take(k) {
                let c = -row_get(r, col);
                if !c.is_zero() {
                    *r = row_axpy(r, &c, &piv);
                }
            }
        }

        placed.resize(self.rows, Vec::new());
        (QMatrix { rows: self.rows, cols: self.cols, data: placed }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis of the null space: one vector per free column, with a
    /// `1` in the free position.
    pub fn kernel_basis(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = Some(k);
            }
            v
        };
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_set[f].is_some() {
                continue;
            }
            let mut vec = vec![Q::zero(); self.cols];
            vec[f] = Q::one();
            for (k, &p) in pivots.iter().enumerate() {
                let c = r.entry(k, f);
                if !c.is_zero() {
                    vec[p] = -c;
                }
            }
            basis.push(vec);
        }
        Subspace { ambient: self.cols, basis }
    }

    /// Solve `self · x = b`; returns the canonical solution (free variables
    /// zero) or `None` when `b` is outside the image.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        let rhs = QMatrix::from_cols(self.rows, &[b.to_vec()]);
        let sol = self.solve_cols(&rhs);
        sol.map(|m| m.col_vec(0)).and_then(|v| if v.is_empty() && self.cols > 0 { None } else { Some(v) })
    }

    /// Solve `self · X = B` column-wise; `None` if any column is inconsistent.
    pub fn solve_cols(&self, b: &QMatrix) -> Option<QMatrix> {
        assert_eq!(self.rows, b.rows());
        let aug = QMatrix::hstack(&[self, b]);
        let (r, pivots) = aug.rref();
        // any pivot inside the augmented block means some column has no solution
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = QMatrix::zeros(self.cols, b.cols());
        for (k, &p) in pivots.iter().enumerate() {
            for (j, v) in r.data[k].iter() {
                let j = *j as usize;
                if j >= self.cols {
                    x.set_entry(p, j - self.cols, v.clone());
                }
            }
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let aug = QMatrix::hstack(&[self, &QMatrix::identity(self.rows)]);
        let (r, pivots) = aug.rref();
        if pivots.len() != self.rows || pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut inv = QMatrix::zeros(self.rows, self.rows);
        for (k, _) in pivots.iter().enumerate() {
            for (j, v) in r.data[k].iter() {
                let j = *j as usize;
                if j >= self.cols {
                    inv.set_entry(k, j - self.cols, v.clone());
                }
            }
        }
        Some(inv)
    }

    /// A deterministic right inverse of a surjective map: `self · s = id`.
    ///
    /// The section places, for each row of `rref(self)`, a unit at the pivot
    /// column (`FirstPivot`) or at the pivot column of the column-reversed
    /// matrix (`LastPivot`).
    pub fn linear_section(&self, strategy: Strategy) -> Result<QMatrix> {
        match strategy {
            Strategy::FirstPivot => self.linear_section_forward(),
            Strategy::LastPivot => {
                let rev = self.reverse_cols();
                let s = rev.linear_section_forward()?;
                Ok(s.reverse_rows())
            }
        }
    }

    fn linear_section_forward(&self) -> Result<QMatrix> {
        let aug = QMatrix::hstack(&[self, &QMatrix::identity(self.rows)]);
        let (r, pivots) = aug.rref();
        let lead: Vec<usize> = pivots.iter().copied().filter(|&p| p < self.cols).collect();
        if lead.len() != self.rows {
            return Err(Error::NotSurjective { rank: lead.len(), rows: self.rows });
        }
        // row k of the transform block becomes row pivot_k of the section
        let mut s = QMatrix::zeros(self.cols, self.rows);
        for (k, &p) in lead.iter().enumerate() {
            for (j, v) in r.data[k].iter() {
                let j = *j as usize;
                if j >= self.cols {
                    s.set_entry(p, j - self.cols, v.clone());
                }
            }
        }
        Ok(s)
    }

    fn reverse_cols(&self) -> QMatrix {
        let c = self.cols;
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut r: Row =
                    row.iter().map(|(j, v)| ((c - 1 - *j as usize) as u32, v.clone())).collect();
                r.sort_by_key(|e| e.0);
                r
            })
            .collect();
        QMatrix { rows: self.rows, cols: c, data }
    }

    fn reverse_rows(&self) -> QMatrix {
        let mut data = self.data.clone();
        data.reverse();
        QMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(crate::scalar::format_q).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A subspace of ℚ^ambient given by an explicit, independent basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Q>>,
}

impl Subspace {
    pub fn new(ambient: usize, basis: Vec<Vec<Q>>) -> Result<Self> {
        for v in &basis {
            if v.len() != ambient {
                return Err(Error::Dimension(format!(
                    "basis vector of length {} in ambient {}",
                    v.len(),
                    ambient
                )));
            }
        }
        let m = QMatrix::from_cols(ambient, &basis);
        if m.rank() != basis.len() {
            return Err(Error::Invalid("subspace basis is linearly dependent".into()));
        }
        Ok(Subspace { ambient, basis })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![Q::zero(); ambient];
                v[i] = Q::one();
                v
            })
            .collect();
        Subspace { ambient, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    /// Matrix with the basis vectors as columns.
    pub fn matrix(&self) -> QMatrix {
        QMatrix::from_cols(self.ambient, &self.basis)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        self.matrix().solve(v).is_some()
    }

    /// Grow the span by a vector; returns true if the dimension increased.
    pub fn extend_by(&mut self, v: &[Q]) -> bool {
        if self.contains(v) {
            false
        } else {
            self.basis.push(v.to_vec());
            true
        }
    }
}

/// Result of a two-step cohomology computation `… → C^{d-1} → C^d → C^{d+1} → …`
/// at the middle spot.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub ambient: usize,
    /// chosen cocycle representatives, one per cohomology basis vector
    pub representatives: Subspace,
    /// independent boundary basis (subset of the columns of `d_in`)
    pub boundaries: Subspace,
    /// `h × ambient` matrix sending any cocycle to its cohomology coordinates;
    /// kills boundaries, inverts the representative inclusion
    pub project: QMatrix,
}

impl Cohomology {
    pub fn h_dim(&self) -> usize {
        self.representatives.dim()
    }
}

/// Cohomology of the two-step complex `d_in: C^{d-1} → C^d`, `d_out: C^d → C^{d+1}`.
///
/// Representatives are the lexicographically-first completion of the
/// boundary basis to the cocycle space, selected through rref pivots
/// (scanning the kernel basis forwards or backwards per `strategy`).
pub fn cohomology(d_in: &QMatrix, d_out: &QMatrix, strategy: Strategy) -> Result<Cohomology> {
    let ambient = d_out.cols();
    if d_in.rows() != ambient {
        return Err(Error::Dimension(format!(
            "d_in lands in dim {}, d_out starts from dim {}",
            d_in.rows(),
            ambient
        )));
    }
    // complex check: d_out ∘ d_in = 0
    let comp = d_out.mul(d_in);
    if !comp.is_zero() {
        for i in 0..comp.rows() {
            if let Some((j, _)) = comp.row(i).first() {
                return Err(Error::NotAComplex { row: i, col: *j as usize });
            }
        }
    }

    let z = d_out.kernel_basis();
    let mut z_vecs: Vec<Vec<Q>> = z.basis().to_vec();
    if strategy == Strategy::LastPivot {
        z_vecs.reverse();
    }
    let b_cols: Vec<Vec<Q>> = (0..d_in.cols()).map(|j| d_in.col_vec(j)).collect();

    let bmat = QMatrix::from_cols(ambient, &b_cols);
    let zmat = QMatrix::from_cols(ambient, &z_vecs);
    let stacked = QMatrix::hstack(&[&bmat, &zmat]);
    let (_, pivots) = stacked.rref();

    let mut b_basis = Vec::new();
    let mut reps = Vec::new();
    for &p in &pivots {
        if p < b_cols.len() {
            b_basis.push(b_cols[p].clone());
        } else {
            reps.push(z_vecs[p - b_cols.len()].clone());
        }
    }

    let h = reps.len();
    let boundaries = Subspace { ambient, basis: b_basis.clone() };
    let representatives = Subspace { ambient, basis: reps.clone() };

    // projection: complete [B | R] to a square invertible matrix by standard
    // basis vectors, invert, and keep the representative rows
    let project = if ambient == 0 {
        QMatrix::zeros(h, 0)
    } else {
        let br_cols: Vec<Vec<Q>> = b_basis.iter().chain(reps.iter()).cloned().collect();
        let br = QMatrix::from_cols(ambient, &br_cols);
        let full = QMatrix::hstack(&[&br, &QMatrix::identity(ambient)]);
        let (_, piv2) = full.rref();
        let mut cols = br_cols;
        // completion columns come from the identity block, in pivot order
        let mut completion = Vec::new();
        for &p in &piv2 {
            if p >= br.cols() {
                let idx = p - br.cols();
                let mut v = vec![Q::zero(); ambient];
                v[idx] = Q::one();
                completion.push(v);
            }
        }
        cols.extend(completion);
        let square = QMatrix::from_cols(ambient, &cols);
        let inv = square
            .inverse()
            .ok_or_else(|| Error::Invalid("representative completion not invertible".into()))?;
        // rows b..b+h of the inverse
        let mut pr = QMatrix::zeros(h, ambient);
        for k in 0..h {
            for (j, v) in inv.row(b_basis.len() + k) {
                pr.set_entry(k, *j as usize, v.clone());
            }
        }
        pr
    };

    Ok(Cohomology { ambient, representatives, boundaries, project })
}

/// Dimension-only variant of [`cohomology`]: `dim ker(d_out) − rank(d_in)`.
pub fn cohomology_dim(d_in: &QMatrix, d_out: &QMatrix) -> Result<usize> {
    let ambient = d_out.cols();
    if d_in.rows() != ambient {
        return Err(Error::Dimension("chain dims".into()));
    }
    let comp = d_out.mul(d_in);
    if !comp.is_zero() {
        return Err(Error::NotAComplex { row: 0, col: 0 });
    }
    let z = ambient - d_out.rank();
    let b = d_in.rank();
    Ok(z - b)
}

/// A right Σₙ-action on a space of the given dimension, presented through
/// the matrices of the adjacent transpositions `s_1 … s_{n-1}`.
///
/// Matrices satisfy `A(στ) = A(τ)·A(σ)`.
#[derive(Clone, Debug)]
pub struct SigmaRep {
    pub n: usize,
    pub dim: usize,
    pub gens: Vec<QMatrix>,
}

impl SigmaRep {
    pub fn new(n: usize, dim: usize, gens: Vec<QMatrix>) -> Result<Self> {
        let expected = n.saturating_sub(1);
        if gens.len() != expected {
            return Err(Error::Dimension(format!(
                "Σ_{n} needs {expected} generator matrices, got {}",
                gens.len()
            )));
        }
        for g in &gens {
            if g.rows() != dim || g.cols() != dim {
                return Err(Error::Dimension("action matrix shape".into()));
            }
        }
        let rep = SigmaRep { n, dim, gens };
        let problems = rep.check_coxeter();
        if let Some(p) = problems.first() {
            return Err(Error::Validation(p.clone()));
        }
        Ok(rep)
    }

    /// Trivial action on a `dim`-dimensional space.
    pub fn trivial(n: usize, dim: usize) -> Self {
        SigmaRep { n, dim, gens: vec![QMatrix::identity(dim); n.saturating_sub(1)] }
    }

    /// Right regular representation on `k[Σₙ]`, basis ordered as `Perm::all(n)`.
    /// The action of σ sends the basis vector `τ` to `σ⁻¹τ`.
    pub fn regular(n: usize) -> Self {
        let all = Perm::all(n);
        let index: std::collections::HashMap<&Perm, usize> =
            all.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let gens = (0..n.saturating_sub(1))
            .map(|k| {
                let s = Perm::adjacent(n, k);
                let mut m = QMatrix::zeros(all.len(), all.len());
                for (i, t) in all.iter().enumerate() {
                    let target = s.compose(t); // s⁻¹ = s
                    m.set_entry(index[&target], i, Q::one());
                }
                m
            })
            .collect();
        SigmaRep { n, dim: all.len(), gens }
    }

    pub fn direct_sum(a: &SigmaRep, b: &SigmaRep) -> SigmaRep {
        assert_eq!(a.n, b.n);
        let gens = a
            .gens
            .iter()
            .zip(&b.gens)
            .map(|(x, y)| {
                let top = QMatrix::hstack(&[x, &QMatrix::zeros(x.rows(), y.cols())]);
                let bot = QMatrix::hstack(&[&QMatrix::zeros(y.rows(), x.cols()), y]);
                QMatrix::vstack(&[&top, &bot])
            })
            .collect();
        SigmaRep { n: a.n, dim: a.dim + b.dim, gens }
    }

    /// Conjugate the action through an isomorphism-like pair `p · A(σ) · r`,
    /// producing the induced action on a subquotient: `r` includes, `p`
    /// projects, with `p·r = id`.
    pub fn induced(&self, p: &QMatrix, r: &QMatrix) -> SigmaRep {
        let gens = self.gens.iter().map(|g| p.mul(&g.mul(r))).collect();
        SigmaRep { n: self.n, dim: p.rows(), gens }
    }

    /// Matrix of the right action of `perm`.
    pub fn matrix(&self, perm: &Perm) -> QMatrix {
        assert_eq!(perm.degree(), self.n);
        let mut acc = QMatrix::identity(self.dim);
        for k in perm.adjacent_word() {
            acc = self.gens[k].mul(&acc);
        }
        acc
    }

    /// Violations of the Coxeter relations, as human-readable strings.
    pub fn check_coxeter(&self) -> Vec<String> {
        let mut out = Vec::new();
        let id = QMatrix::identity(self.dim);
        for (k, g) in self.gens.iter().enumerate() {
            if g.mul(g) != id {
                out.push(format!("s_{}^2 != 1", k + 1));
            }
        }
        for k in 0..self.gens.len().saturating_sub(1) {
            let a = &self.gens[k];
            let b = &self.gens[k + 1];
            if a.mul(&b.mul(a)) != b.mul(&a.mul(b)) {
                out.push(format!("braid relation fails at s_{}, s_{}", k + 1, k + 2));
            }
        }
        for i in 0..self.gens.len() {
            for j in i + 2..self.gens.len() {
                let a = &self.gens[i];
                let b = &self.gens[j];
                if a.mul(b) != b.mul(a) {
                    out.push(format!("commutation fails at s_{}, s_{}", i + 1, j + 1));
                }
            }
        }
        out
    }
}

/// Project a raw linear map onto the Σₙ-equivariant maps:
/// `avg = (1/n!) Σ_σ A_tgt(σ) · raw · A_src(σ⁻¹)`.
///
/// Fixes maps that are already equivariant, and its output commutes with the
/// action on both sides.
pub fn average(src: &SigmaRep, tgt: &SigmaRep, raw: &QMatrix) -> QMatrix {
    assert_eq!(src.n, tgt.n);
    assert_eq!(raw.rows(), tgt.dim);
    assert_eq!(raw.cols(), src.dim);
    let n = src.n;
    if n <= 1 {
        return raw.clone();
    }
    let all = Perm::all(n);
    let mut acc = QMatrix::zeros(raw.rows(), raw.cols());
    for sigma in &all {
        let t = tgt.matrix(sigma);
        let s = src.matrix(&sigma.inverse());
        acc = acc.add(&t.mul(&raw.mul(&s)));
    }
    let factorial: i64 = (1..=n as i64).product();
    acc.scale(&(q(1) / q(factorial)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_ratio;

    #[test]
    fn rref_identity_and_zero() {
        let (r, p) = QMatrix::identity(2).rref();
        assert_eq!(r, QMatrix::identity(2));
        assert_eq!(p, vec![0, 1]);
        let (r, p) = QMatrix::zeros(3, 3).rref();
        assert!(r.is_zero());
        assert!(p.is_empty());
    }

    #[test]
    fn rref_hand_example() {
        // [[2,4],[1,2]] -> [[1,2],[0,0]], pivots [0]
        let m = QMatrix::from_int_rows(&[&[2, 4], &[1, 2]]);
        let (r, p) = m.rref();
        assert_eq!(r, QMatrix::from_int_rows(&[&[1, 2], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rref_idempotent_rank_counts_pivots() {
        let m = QMatrix::from_int_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let (r, p) = m.rref();
        let (r2, p2) = r.rref();
        assert_eq!(r, r2);
        assert_eq!(p, p2);
        assert_eq!(m.rank(), p.len());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(QMatrix::identity(4).kernel_basis().dim(), 0);
        assert_eq!(QMatrix::zeros(2, 3).kernel_basis().dim(), 3);
        // [[1,1]] -> span{(1,-1)}
        let k = QMatrix::from_int_rows(&[&[1, 1]]).kernel_basis();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[q(1), q(-1)]));
    }

    #[test]
    fn solve_examples() {
        let id = QMatrix::identity(3);
        let b = vec![q(5), q(-1), q(0)];
        assert_eq!(id.solve(&b).unwrap(), b);
        assert!(QMatrix::zeros(2, 2).solve(&[q(1), q(0)]).is_none());
        let d = QMatrix::from_int_rows(&[&[2, 0], &[0, 3]]);
        assert_eq!(d.solve(&[q(4), q(6)]).unwrap(), vec![q(2), q(2)]);
    }

    #[test]
    fn solve_iff_rank_condition() {
        let m = QMatrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        let b_in = vec![q(1), q(2)];
        let b_out = vec![q(1), q(3)];
        for b in [&b_in, &b_out] {
            let aug = QMatrix::hstack(&[&m, &QMatrix::from_cols(2, &[b.clone()])]);
            let consistent = aug.rank() == m.rank();
            assert_eq!(m.solve(b).is_some(), consistent);
        }
    }

    #[test]
    fn section_examples() {
        let id = QMatrix::identity(3);
        assert_eq!(id.linear_section(Strategy::FirstPivot).unwrap(), id);
        let p = QMatrix::from_int_rows(&[&[1, 0]]);
        assert_eq!(
            p.linear_section(Strategy::FirstPivot).unwrap(),
            QMatrix::from_int_rows(&[&[1], &[0]])
        );
        let p = QMatrix::from_int_rows(&[&[1, 1]]);
        assert_eq!(
            p.linear_section(Strategy::FirstPivot).unwrap(),
            QMatrix::from_int_rows(&[&[1], &[0]])
        );
        // last-pivot prefers the rightmost column
        assert_eq!(
            p.linear_section(Strategy::LastPivot).unwrap(),
            QMatrix::from_int_rows(&[&[0], &[1]])
        );
        // non-surjective is rejected
        let bad = QMatrix::from_int_rows(&[&[1, 0], &[1, 0]]);
        assert!(bad.linear_section(Strategy::FirstPivot).is_err());
    }

    #[test]
    fn section_is_right_inverse() {
        let p = QMatrix::from_int_rows(&[&[1, 2, 0, -1], &[0, 3, 1, 1]]);
        for strat in [Strategy::FirstPivot, Strategy::LastPivot] {
            let s = p.linear_section(strat).unwrap();
            assert_eq!(p.mul(&s), QMatrix::identity(2));
        }
    }

    #[test]
    fn cohomology_examples() {
        // d_in = 0, d_out = 0 on dim k
        let h = cohomology(&QMatrix::zeros(3, 0), &QMatrix::zeros(0, 3), Strategy::FirstPivot)
            .unwrap();
        assert_eq!(h.h_dim(), 3);
        // acyclic: d_in = identity
        let h = cohomology(&QMatrix::identity(2), &QMatrix::zeros(0, 2), Strategy::FirstPivot)
            .unwrap();
        assert_eq!(h.h_dim(), 0);
        // d_in = 0, d_out = [[1,1]]
        let h = cohomology(
            &QMatrix::zeros(2, 0),
            &QMatrix::from_int_rows(&[&[1, 1]]),
            Strategy::FirstPivot,
        )
        .unwrap();
        assert_eq!(h.h_dim(), 1);
        let rep = &h.representatives.basis()[0];
        // representative lies in span{(1,-1)}
        assert!(Subspace::new(2, vec![vec![q(1), q(-1)]]).unwrap().contains(rep));
        // projection of the representative is the unit coordinate
        assert_eq!(h.project.mul_vec(rep), vec![q(1)]);
    }

    #[test]
    fn cohomology_rejects_non_complex() {
        let d_in = QMatrix::identity(2);
        let d_out = QMatrix::identity(2);
        assert!(matches!(
            cohomology(&d_in, &d_out, Strategy::FirstPivot),
            Err(Error::NotAComplex { .. })
        ));
    }

    #[test]
    fn cohomology_kills_boundaries() {
        // d_in: k -> k^2, x -> (x, x); d_out = 0
        let d_in = QMatrix::from_int_rows(&[&[1], &[1]]);
        let d_out = QMatrix::zeros(0, 2);
        let h = cohomology(&d_in, &d_out, Strategy::FirstPivot).unwrap();
        assert_eq!(h.h_dim(), 1);
        assert_eq!(h.project.mul_vec(&[q(1), q(1)]), vec![q(0)]);
        assert_eq!(
            h.project.mul_vec(&h.representatives.basis()[0]),
            vec![q(1)]
        );
        // rank-nullity bookkeeping
        assert_eq!(
            d_out.kernel_basis().dim(),
            h.h_dim() + d_in.rank()
        );
    }

    #[test]
    fn average_examples() {
        // n = 1: identity
        let r1 = SigmaRep::trivial(1, 2);
        let raw = QMatrix::from_int_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(average(&r1, &r1, &raw), raw);

        // n = 2 regular rep, raw = E11 -> (1/2)(E11 + E22)
        let r2 = SigmaRep::regular(2);
        let raw = QMatrix::from_int_rows(&[&[1, 0], &[0, 0]]);
        let avg = average(&r2, &r2, &raw);
        let half = q_ratio(1, 2);
        let mut expect = QMatrix::zeros(2, 2);
        expect.set_entry(0, 0, half.clone());
        expect.set_entry(1, 1, half);
        assert_eq!(avg, expect);

        // averaging is a projector and the result is equivariant
        let avg2 = average(&r2, &r2, &avg);
        assert_eq!(avg, avg2);
        for g in &r2.gens {
            assert_eq!(avg.mul(g), g.mul(&avg));
        }
    }

    #[test]
    fn regular_rep_satisfies_coxeter_and_antihomo() {
        for n in 2..=4 {
            let r = SigmaRep::regular(n);
            assert!(r.check_coxeter().is_empty());
            let all = Perm::all(n);
            for a in &all {
                for b in &all {
                    let ab = a.compose(b);
                    assert_eq!(r.matrix(&ab), r.matrix(b).mul(&r.matrix(a)));
                }
            }
        }
    }
}
