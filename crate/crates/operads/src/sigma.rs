//! Differential graded Σ-modules and Λ-modules with finite arity/degree
//! windows, their morphisms, mapping cones and relative cohomology.
//!
//! A module stores, per arity, the dimensions of its degree blocks, the
//! action matrices of the adjacent transpositions generating Σₙ, and the
//! differential (degree +1). Everything outside the stored window is zero.
//!
//! Λ-structure adds restriction operations `δᵢ: M(n)^d → M(n-1)^d`
//! satisfying `δᵢδⱼ = δ_{j-1}δᵢ` for `i < j`, commuting with differentials,
//! and equivariant in the induced-permutation form
//! `δᵢ ∘ A(σ) = A(σ↾ᵢ) ∘ δ_{σ(i)}` (strand `i` deleted from σ).

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::qlinalg::{cohomology, Cohomology, QMatrix, SigmaRep, Strategy};
use crate::scalar::Q;
use num::Zero;
use std::collections::BTreeMap;

/// Per-arity block data of a dg Σ-module.
#[derive(Clone, Debug, Default)]
pub struct ArityData {
    /// degree -> dimension, nonzero blocks only
    pub dims: BTreeMap<i64, usize>,
    /// optional basis labels per degree block
    pub labels: BTreeMap<i64, Vec<String>>,
    /// differential `d: block^d -> block^{d+1}`, keyed by source degree
    pub diff: BTreeMap<i64, QMatrix>,
    /// action of each adjacent transposition `s_1 .. s_{n-1}` per degree
    pub actions: Vec<BTreeMap<i64, QMatrix>>,
}

#[derive(Clone, Debug)]
pub struct DgSigmaModule {
    pub max_arity: usize,
    pub arities: Vec<ArityData>,
}

/// A single located validation failure.
#[derive(Clone, Debug)]
pub struct Violation {
    pub check: String,
    pub arity: usize,
    pub degree: Option<i64>,
    pub detail: String,
}

/// Outcome of validating a module, morphism or operad.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, check: impl Into<String>, arity: usize, degree: Option<i64>, detail: impl Into<String>) {
        self.violations.push(Violation {
            check: check.into(),
            arity,
            degree,
            detail: detail.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            let mut msg = String::new();
            for v in self.violations.iter().take(8) {
                msg.push_str(&format!(
                    "[{} arity {}{}] {}; ",
                    v.check,
                    v.arity,
                    v.degree.map(|d| format!(" deg {d}")).unwrap_or_default(),
                    v.detail
                ));
            }
            if self.violations.len() > 8 {
                msg.push_str(&format!("... {} total", self.violations.len()));
            }
            Err(Error::Validation(msg))
        }
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(
                f,
                "{} at arity {}{}: {}",
                v.check,
                v.arity,
                v.degree.map(|d| format!(", degree {d}")).unwrap_or_default(),
                v.detail
            )?;
        }
        Ok(())
    }
}

impl DgSigmaModule {
    pub fn zero(max_arity: usize) -> Self {
        DgSigmaModule { max_arity, arities: vec![ArityData::default(); max_arity + 1] }
    }

    pub fn dim(&self, n: usize, d: i64) -> usize {
        if n > self.max_arity {
            return 0;
        }
        self.arities[n].dims.get(&d).copied().unwrap_or(0)
    }

    pub fn total_dim(&self, n: usize) -> usize {
        if n > self.max_arity {
            return 0;
        }
        self.arities[n].dims.values().sum()
    }

    /// Degrees with nonzero blocks at arity `n`.
    pub fn degrees(&self, n: usize) -> Vec<i64> {
        if n > self.max_arity {
            return Vec::new();
        }
        self.arities[n].dims.keys().copied().collect()
    }

    /// The differential `M(n)^d -> M(n)^{d+1}` (zero matrix by default).
    pub fn diff(&self, n: usize, d: i64) -> QMatrix {
        let rows = self.dim(n, d + 1);
        let cols = self.dim(n, d);
        if n > self.max_arity {
            return QMatrix::zeros(rows, cols);
        }
        match self.arities[n].diff.get(&d) {
            Some(m) => m.clone(),
            None => QMatrix::zeros(rows, cols),
        }
    }

    /// Action of the adjacent transposition `s_{k+1}` (0-based `k`) at
    /// arity `n`, degree `d`.
    pub fn action_gen(&self, n: usize, k: usize, d: i64) -> QMatrix {
        let dim = self.dim(n, d);
        if n < 2 {
            return QMatrix::identity(dim);
        }
        match self.arities[n].actions.get(k).and_then(|m| m.get(&d)) {
            Some(m) => m.clone(),
            None => QMatrix::identity(dim),
        }
    }

    /// The Σₙ-representation on the degree-`d` block of arity `n`.
    pub fn rep(&self, n: usize, d: i64) -> SigmaRep {
        let dim = self.dim(n, d);
        let gens = (0..n.saturating_sub(1)).map(|k| self.action_gen(n, k, d)).collect();
        SigmaRep { n, dim, gens }
    }

    /// Matrix of the right action of an arbitrary permutation.
    pub fn action(&self, n: usize, sigma: &Perm, d: i64) -> QMatrix {
        self.rep(n, d).matrix(sigma)
    }

    pub fn labels(&self, n: usize, d: i64) -> Vec<String> {
        if n <= self.max_arity {
            if let Some(l) = self.arities[n].labels.get(&d) {
                return l.clone();
            }
        }
        (0..self.dim(n, d)).map(|i| format!("b{n}_{d}_{i}")).collect()
    }

    /// Cohomology of the arity-`n` complex at degree `d`.
    pub fn cohomology_at(&self, n: usize, d: i64, strategy: Strategy) -> Result<Cohomology> {
        cohomology(&self.diff(n, d - 1), &self.diff(n, d), strategy)
    }

    /// Cohomology dimensions per degree at arity `n`.
    pub fn h_dims(&self, n: usize) -> Result<BTreeMap<i64, usize>> {
        let mut out = BTreeMap::new();
        for d in self.degrees(n) {
            let z = self.dim(n, d) - self.diff(n, d).rank();
            let b = self.diff(n, d - 1).rank();
            if z < b {
                return Err(Error::Invalid(format!("not a complex at arity {n} deg {d}")));
            }
            if z - b > 0 {
                out.insert(d, z - b);
            }
        }
        Ok(out)
    }

    /// Structural invariants: matrix shapes, ∂² = 0, Coxeter relations,
    /// equivariance of the differential.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        for n in 0..=self.max_arity {
            let data = &self.arities[n];
            for (&d, m) in &data.diff {
                if m.rows() != self.dim(n, d + 1) || m.cols() != self.dim(n, d) {
                    rep.push("diff-shape", n, Some(d), format!("{}x{}", m.rows(), m.cols()));
                }
            }
            if n >= 2 && !data.dims.is_empty() && data.actions.len() != n - 1 {
                rep.push(
                    "action-count",
                    n,
                    None,
                    format!("expected {} generators, got {}", n - 1, data.actions.len()),
                );
                continue;
            }
            for &d in data.dims.keys() {
                // ∂² = 0
                let d1 = self.diff(n, d);
                let d2 = self.diff(n, d + 1);
                if !d2.mul(&d1).is_zero() {
                    rep.push("d-squared", n, Some(d), "∂∘∂ != 0");
                }
                if n >= 2 {
                    let r = self.rep(n, d);
                    for problem in r.check_coxeter() {
                        rep.push("coxeter", n, Some(d), problem);
                    }
                    // differential commutes with the action
                    let r_up = self.rep(n, d + 1);
                    for (k, g) in r.gens.iter().enumerate() {
                        if d1.mul(g) != r_up.gens[k].mul(&d1) {
                            rep.push(
                                "diff-equivariance",
                                n,
                                Some(d),
                                format!("∂ does not commute with s_{}", k + 1),
                            );
                        }
                    }
                }
            }
        }
        rep
    }
}

/// Restriction operations on top of a [`DgSigmaModule`].
#[derive(Clone, Debug)]
pub struct LambdaData {
    /// `deltas[n][i-1]`: the map `δᵢ : M(n)^d -> M(n-1)^d` per degree,
    /// for `1 <= i <= n <= max_arity`. Index 0 is unused.
    pub deltas: Vec<Vec<BTreeMap<i64, QMatrix>>>,
    /// Augmentation `ε : M(1)^0 -> k` for Λ-modules with zero arity 0
    /// (row vector). For unitary modules `deltas[1][0]` already encodes it.
    pub augmentation: Option<QMatrix>,
}

impl LambdaData {
    pub fn empty(max_arity: usize) -> Self {
        let deltas = (0..=max_arity).map(|n| vec![BTreeMap::new(); n]).collect();
        LambdaData { deltas, augmentation: None }
    }

    /// `δᵢ` (1-based slot) at arity `n`, degree `d`, sized against `module`.
    pub fn delta(&self, module: &DgSigmaModule, n: usize, i: usize, d: i64) -> QMatrix {
        let rows = module.dim(n - 1, d);
        let cols = module.dim(n, d);
        if n == 0 || n > module.max_arity || i < 1 || i > n {
            return QMatrix::zeros(rows, cols);
        }
        match self.deltas[n].get(i - 1).and_then(|m| m.get(&d)) {
            Some(m) => m.clone(),
            None => QMatrix::zeros(rows, cols),
        }
    }

    pub fn set_delta(&mut self, n: usize, i: usize, d: i64, m: QMatrix) {
        if !m.is_zero() {
            self.deltas[n][i - 1].insert(d, m);
        }
    }

    /// Λ-axioms against the module: composition relation, chain-map
    /// property, and equivariance in the induced-permutation form.
    pub fn validate(&self, module: &DgSigmaModule) -> ValidationReport {
        let mut rep = ValidationReport::default();
        for n in 1..=module.max_arity {
            for &d in module.arities[n].dims.keys() {
                // δᵢδⱼ = δ_{j-1}δᵢ for i < j (maps M(n) -> M(n-2))
                if n >= 2 {
                    for j in 2..=n {
                        for i in 1..j {
                            let lhs = self
                                .delta(module, n - 1, i, d)
                                .mul(&self.delta(module, n, j, d));
                            let rhs = self
                                .delta(module, n - 1, j - 1, d)
                                .mul(&self.delta(module, n, i, d));
                            if lhs != rhs {
                                rep.push(
                                    "lambda-composition",
                                    n,
                                    Some(d),
                                    format!("δ_{i}δ_{j} != δ_{}δ_{i}", j - 1),
                                );
                            }
                        }
                    }
                }
                // chain map: δᵢ ∘ ∂ = ∂ ∘ δᵢ
                for i in 1..=n {
                    let lhs = self.delta(module, n, i, d + 1).mul(&module.diff(n, d));
                    let rhs = module.diff(n - 1, d).mul(&self.delta(module, n, i, d));
                    if lhs != rhs {
                        rep.push("lambda-chain", n, Some(d), format!("δ_{i} vs ∂"));
                    }
                }
                // equivariance against the adjacent-transposition generators:
                // δᵢ ∘ A(σ) = A(σ↾ᵢ) ∘ δ_{σ(i)}
                if n >= 2 {
                    for k in 0..n - 1 {
                        let sigma = Perm::adjacent(n, k);
                        let a = module.action_gen(n, k, d);
                        for i in 1..=n {
                            let (restricted, img) = sigma.delete_strand(i - 1);
                            let lhs = self.delta(module, n, i, d).mul(&a);
                            let rhs = module
                                .action(n - 1, &restricted, d)
                                .mul(&self.delta(module, n, img + 1, d));
                            if lhs != rhs {
                                rep.push(
                                    "lambda-equivariance",
                                    n,
                                    Some(d),
                                    format!("δ_{i} with s_{}", k + 1),
                                );
                            }
                        }
                    }
                }
            }
        }
        rep
    }
}

/// A morphism of dg Σ-modules (or Λ-modules): a matrix per arity-degree.
#[derive(Clone, Debug)]
pub struct ModuleMorphism {
    pub max_arity: usize,
    /// `mats[n][d]`: component `M(n)^d -> N(n)^d`
    pub mats: Vec<BTreeMap<i64, QMatrix>>,
}

impl ModuleMorphism {
    pub fn zero(max_arity: usize) -> Self {
        ModuleMorphism { max_arity, mats: vec![BTreeMap::new(); max_arity + 1] }
    }

    pub fn identity(module: &DgSigmaModule) -> Self {
        let mut m = Self::zero(module.max_arity);
        for n in 0..=module.max_arity {
            for &d in module.arities[n].dims.keys() {
                m.mats[n].insert(d, QMatrix::identity(module.dim(n, d)));
            }
        }
        m
    }

    pub fn mat(&self, src: &DgSigmaModule, tgt: &DgSigmaModule, n: usize, d: i64) -> QMatrix {
        let rows = tgt.dim(n, d);
        let cols = src.dim(n, d);
        if n > self.max_arity {
            return QMatrix::zeros(rows, cols);
        }
        match self.mats[n].get(&d) {
            Some(m) => m.clone(),
            None => QMatrix::zeros(rows, cols),
        }
    }

    pub fn set_mat(&mut self, n: usize, d: i64, m: QMatrix) {
        if !m.is_zero() {
            self.mats[n].insert(d, m);
        }
    }

    /// Chain-map property, equivariance, and (when both sides carry Λ-data)
    /// compatibility with the restriction operations.
    pub fn validate(
        &self,
        src: &DgSigmaModule,
        tgt: &DgSigmaModule,
        lambda: Option<(&LambdaData, &LambdaData)>,
    ) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let top = src.max_arity.min(tgt.max_arity).min(self.max_arity);
        for n in 0..=top {
            for &d in src.arities[n].dims.keys() {
                let f = self.mat(src, tgt, n, d);
                let f_up = self.mat(src, tgt, n, d + 1);
                if f_up.mul(&src.diff(n, d)) != tgt.diff(n, d).mul(&f) {
                    rep.push("morphism-chain", n, Some(d), "f∂ != ∂f");
                }
                if n >= 2 {
                    for k in 0..n - 1 {
                        if f.mul(&src.action_gen(n, k, d)) != tgt.action_gen(n, k, d).mul(&f) {
                            rep.push(
                                "morphism-equivariance",
                                n,
                                Some(d),
                                format!("s_{} fails", k + 1),
                            );
                        }
                    }
                }
                if let Some((ls, lt)) = lambda {
                    for i in 1..=n {
                        let f_dn = self.mat(src, tgt, n - 1, d);
                        let lhs = f_dn.mul(&ls.delta(src, n, i, d));
                        let rhs = lt.delta(tgt, n, i, d).mul(&f);
                        if lhs != rhs {
                            rep.push("morphism-lambda", n, Some(d), format!("δ_{i} fails"));
                        }
                    }
                }
            }
        }
        rep
    }
}

/// The mapping cone of a morphism `φ: M -> N`: per arity-degree the block
/// `M(n)^{d+1} ⊕ N(n)^d` with differential `[[-∂_M, 0], [-φ, ∂_N]]`.
///
/// The cone is itself a [`DgSigmaModule`] (block-diagonal action), plus the
/// bookkeeping needed to split vectors back into their two components.
#[derive(Clone, Debug)]
pub struct ConeComplex {
    pub module: DgSigmaModule,
    pub lambda: Option<LambdaData>,
    /// source block dimension per (arity, cone degree): dim M(n)^{d+1}
    pub src_dims: Vec<BTreeMap<i64, usize>>,
}

impl ConeComplex {
    /// Split a cone vector at (n, d) into its `M(n)^{d+1}` and `N(n)^d` parts.
    pub fn split(&self, n: usize, d: i64, v: &[Q]) -> (Vec<Q>, Vec<Q>) {
        let s = self.src_dims[n].get(&d).copied().unwrap_or(0);
        (v[..s].to_vec(), v[s..].to_vec())
    }

    pub fn join(&self, n: usize, d: i64, q_part: &[Q], r_part: &[Q]) -> Vec<Q> {
        let s = self.src_dims[n].get(&d).copied().unwrap_or(0);
        assert_eq!(q_part.len(), s);
        let mut v = q_part.to_vec();
        v.extend_from_slice(r_part);
        v
    }
}

/// Build the mapping cone of `φ: M -> N`. Mismatched degree windows are
/// padded with zero blocks rather than rejected. When both sides carry
/// Λ-data and φ is a Λ-morphism, the cone inherits block-diagonal
/// restriction operations.
pub fn cone(
    src: &DgSigmaModule,
    tgt: &DgSigmaModule,
    phi: &ModuleMorphism,
    lambda: Option<(&LambdaData, &LambdaData)>,
) -> ConeComplex {
    let max_arity = src.max_arity.min(tgt.max_arity);
    let mut module = DgSigmaModule::zero(max_arity);
    let mut src_dims: Vec<BTreeMap<i64, usize>> = vec![BTreeMap::new(); max_arity + 1];

    for n in 0..=max_arity {
        // cone degrees: d where M^{d+1} or N^d is nonzero
        let mut degs: Vec<i64> = Vec::new();
        for &d in src.arities[n].dims.keys() {
            degs.push(d - 1);
        }
        for &d in tgt.arities[n].dims.keys() {
            degs.push(d);
        }
        degs.sort_unstable();
        degs.dedup();

        let mut dims = BTreeMap::new();
        for &d in &degs {
            let s = src.dim(n, d + 1);
            let t = tgt.dim(n, d);
            src_dims[n].insert(d, s);
            if s + t > 0 {
                dims.insert(d, s + t);
            }
        }

        let mut diff = BTreeMap::new();
        for &d in &degs {
            let s0 = src.dim(n, d + 1);
            let t0 = tgt.dim(n, d);
            let s1 = src.dim(n, d + 2);
            let t1 = tgt.dim(n, d + 1);
            if s0 + t0 == 0 || s1 + t1 == 0 {
                continue;
            }
            let dm = src.diff(n, d + 1).neg();
            let f = phi.mat(src, tgt, n, d + 1).neg();
            let dn = tgt.diff(n, d);
            let top = QMatrix::hstack(&[&dm, &QMatrix::zeros(s1, t0)]);
            let bot = QMatrix::hstack(&[&f, &dn]);
            let m = QMatrix::vstack(&[&top, &bot]);
            if !m.is_zero() {
                diff.insert(d, m);
            }
        }

        let gen_count = n.saturating_sub(1);
        let mut actions: Vec<BTreeMap<i64, QMatrix>> = vec![BTreeMap::new(); gen_count];
        for &d in &degs {
            for (k, slot) in actions.iter_mut().enumerate() {
                let a = src.action_gen(n, k, d + 1);
                let b = tgt.action_gen(n, k, d);
                let s0 = a.rows();
                let t0 = b.rows();
                if s0 + t0 == 0 {
                    continue;
                }
                let top = QMatrix::hstack(&[&a, &QMatrix::zeros(s0, t0)]);
                let bot = QMatrix::hstack(&[&QMatrix::zeros(t0, s0), &b]);
                slot.insert(d, QMatrix::vstack(&[&top, &bot]));
            }
        }

        let mut labels = BTreeMap::new();
        for &d in &degs {
            if dims.get(&d).copied().unwrap_or(0) == 0 {
                continue;
            }
            let mut l: Vec<String> =
                src.labels(n, d + 1).iter().map(|s| format!("src+1:{s}")).collect();
            l.extend(tgt.labels(n, d).iter().map(|s| format!("tgt:{s}")));
            labels.insert(d, l);
        }

        module.arities[n] = ArityData { dims, labels, diff, actions };
    }

    let cone_lambda = lambda.map(|(ls, lt)| {
        let mut ld = LambdaData::empty(max_arity);
        for n in 1..=max_arity {
            let degs: Vec<i64> = module.arities[n].dims.keys().copied().collect();
            for &d in &degs {
                for i in 1..=n {
                    let a = ls.delta(src, n, i, d + 1);
                    let b = lt.delta(tgt, n, i, d);
                    let rows = a.rows() + b.rows();
                    let cols = a.cols() + b.cols();
                    if rows == 0 || cols == 0 {
                        continue;
                    }
                    let top = QMatrix::hstack(&[&a, &QMatrix::zeros(a.rows(), b.cols())]);
                    let bot = QMatrix::hstack(&[&QMatrix::zeros(b.rows(), a.cols()), &b]);
                    ld.set_delta(n, i, d, QMatrix::vstack(&[&top, &bot]));
                }
            }
        }
        ld
    });

    ConeComplex { module, lambda: cone_lambda, src_dims }
}

/// Relative cohomology of a cone at arity `n`: one [`Cohomology`] per cone
/// degree with nonzero ambient space.
pub fn relative_cohomology(
    c: &ConeComplex,
    n: usize,
    strategy: Strategy,
) -> Result<BTreeMap<i64, Cohomology>> {
    let mut out = BTreeMap::new();
    for d in c.module.degrees(n) {
        let h = c.module.cohomology_at(n, d, strategy)?;
        out.insert(d, h);
    }
    Ok(out)
}

/// Induced restriction operations on cohomology: for each arity `n >= 1` and
/// degree, the matrix `H(n)^d -> H(n-1)^d`, computed through representatives
/// and verified independent of the choice (δ maps boundaries to boundaries).
pub fn induced_lambda_on_h(
    module: &DgSigmaModule,
    lambda: &LambdaData,
    strategy: Strategy,
) -> Result<Vec<Vec<BTreeMap<i64, QMatrix>>>> {
    // cohomology data per arity-degree
    let mut h: Vec<BTreeMap<i64, Cohomology>> = Vec::with_capacity(module.max_arity + 1);
    for n in 0..=module.max_arity {
        let mut per = BTreeMap::new();
        for d in module.degrees(n) {
            per.insert(d, module.cohomology_at(n, d, strategy)?);
        }
        h.push(per);
    }

    let mut out: Vec<Vec<BTreeMap<i64, QMatrix>>> =
        (0..=module.max_arity).map(|n| vec![BTreeMap::new(); n]).collect();
    for n in 1..=module.max_arity {
        for d in module.degrees(n) {
            let hn = match h[n].get(&d) {
                Some(x) => x,
                None => continue,
            };
            for i in 1..=n {
                let delta = lambda.delta(module, n, i, d);
                // well-defined: boundaries go to boundaries
                for b in hn.boundaries.basis() {
                    let img = delta.mul_vec(b);
                    let target_boundaries = h[n - 1]
                        .get(&d)
                        .map(|c| c.boundaries.clone())
                        .unwrap_or_else(|| crate::qlinalg::Subspace::zero(module.dim(n - 1, d)));
                    if !img.iter().all(|x| x.is_zero()) && !target_boundaries.contains(&img) {
                        return Err(Error::Invalid(format!(
                            "δ_{i} not well-defined on cohomology at arity {n}, degree {d}"
                        )));
                    }
                }
                let hm = match h[n - 1].get(&d) {
                    Some(x) => x,
                    None => {
                        out[n][i - 1].insert(d, QMatrix::zeros(0, hn.h_dim()));
                        continue;
                    }
                };
                let reps = hn.representatives.matrix();
                let induced = hm.project.mul(&delta.mul(&reps));
                out[n][i - 1].insert(d, induced);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::Strategy;
    use crate::scalar::q;

    /// Two-arity module: arity 2 the regular rep of Σ₂ in degree 0 with zero
    /// differential, arity 1 one-dimensional.
    fn toy_module() -> DgSigmaModule {
        let mut m = DgSigmaModule::zero(2);
        m.arities[1].dims.insert(0, 1);
        m.arities[2].dims.insert(0, 2);
        m.arities[2].actions = vec![BTreeMap::new()];
        m.arities[2].actions[0]
            .insert(0, QMatrix::from_int_rows(&[&[0, 1], &[1, 0]]));
        m
    }

    #[test]
    fn zero_module_validates() {
        assert!(DgSigmaModule::zero(3).validate().is_ok());
    }

    #[test]
    fn planted_d_squared_defect_is_located() {
        let mut m = DgSigmaModule::zero(1);
        m.arities[1].dims.insert(0, 1);
        m.arities[1].dims.insert(1, 1);
        m.arities[1].dims.insert(2, 1);
        m.arities[1].diff.insert(0, QMatrix::identity(1));
        m.arities[1].diff.insert(1, QMatrix::identity(1));
        let rep = m.validate();
        assert!(!rep.is_ok());
        assert!(rep.violations.iter().any(|v| v.check == "d-squared" && v.arity == 1 && v.degree == Some(0)));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let m = toy_module();
        let id = ModuleMorphism::identity(&m);
        let c = cone(&m, &m, &id, None);
        assert!(c.module.validate().is_ok());
        for n in 0..=2 {
            let h = relative_cohomology(&c, n, Strategy::FirstPivot).unwrap();
            assert!(h.values().all(|x| x.h_dim() == 0), "arity {n}");
        }
    }

    #[test]
    fn cone_of_zero_from_zero_is_target() {
        let m = toy_module();
        let z = DgSigmaModule::zero(2);
        let phi = ModuleMorphism::zero(2);
        let c = cone(&z, &m, &phi, None);
        for n in 0..=2 {
            for d in m.degrees(n) {
                assert_eq!(c.module.dim(n, d), m.dim(n, d));
            }
        }
        let h = relative_cohomology(&c, 2, Strategy::FirstPivot).unwrap();
        assert_eq!(h.get(&0).map(|x| x.h_dim()), Some(2));
    }

    #[test]
    fn induced_lambda_identity_when_no_differential() {
        let m = toy_module();
        let mut l = LambdaData::empty(2);
        // δ₁ = δ₂ : both basis elements of arity 2 restrict to the unit
        l.set_delta(2, 1, 0, QMatrix::from_int_rows(&[&[1, 1]]));
        l.set_delta(2, 2, 0, QMatrix::from_int_rows(&[&[1, 1]]));
        let rep = l.validate(&m);
        assert!(rep.is_ok(), "{rep}");
        let ind = induced_lambda_on_h(&m, &l, Strategy::FirstPivot).unwrap();
        // zero differential: induced = original
        assert_eq!(ind[2][0].get(&0).unwrap(), &QMatrix::from_int_rows(&[&[1, 1]]));
        assert_eq!(ind[2][1].get(&0).unwrap(), &QMatrix::from_int_rows(&[&[1, 1]]));
    }

    #[test]
    fn cone_lambda_commutes_with_cone_differential() {
        // M = N = toy with a nonzero differential in arity 1 would need more
        // setup; here verify the block-diagonal δ on the cone of the identity
        // of the toy module is a chain map (degenerate but exercises shapes).
        let m = toy_module();
        let mut l = LambdaData::empty(2);
        l.set_delta(2, 1, 0, QMatrix::from_int_rows(&[&[1, 1]]));
        l.set_delta(2, 2, 0, QMatrix::from_int_rows(&[&[1, 1]]));
        let id = ModuleMorphism::identity(&m);
        let c = cone(&m, &m, &id, Some((&l, &l)));
        let ld = c.lambda.as_ref().unwrap();
        for n in 1..=2 {
            for d in c.module.degrees(n) {
                for i in 1..=n {
                    let lhs = ld.delta(&c.module, n, i, d + 1).mul(&c.module.diff(n, d));
                    let rhs = c.module.diff(n - 1, d).mul(&ld.delta(&c.module, n, i, d));
                    assert_eq!(lhs, rhs);
                }
            }
        }
        let _ = q(0);
    }
}
