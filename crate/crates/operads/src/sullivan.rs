//! The arity-wise minimal-model algorithm for dg operads, in the
//! non-unitary and the strict-unit (unitary) flavors.
//!
//! The tower starts from the initial operad and adjoins, at each arity
//! `n ≥ 2`, the relative cohomology of the previous stage map as a new
//! generator space, with differential and quasi-isomorphism components read
//! off a Σₙ-equivariant section of the relative-cocycle projection. In the
//! unitary flavor the section is first rectified — through the Kan-type
//! filling on the mapping cone — so that it is compatible with the
//! restriction operations: the new generators restrict to zero above
//! arity 2, and at arity 2 to the map induced on cohomology.

use crate::error::{Error, Result};
use crate::kan::{fill_in, ConeHost, MatrixHost, SimplicialModule};
use crate::operad::{
    builtin, initial_free, principal_extend, DgOperad, Elt, ExtensionBlock, Flavor, GenKey,
    OperadMorphism, TreeEvaluator,
};
use crate::perm::Perm;
use crate::qlinalg::{average, cohomology, cohomology_dim, Cohomology, QMatrix, SigmaRep, Strategy};
use crate::sigma::{cone, ConeComplex, ValidationReport};
use crate::scalar::Q;
use num::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Options controlling the deterministic choices of the algorithm.
#[derive(Clone, Copy, Debug, Default)]
pub struct ModelOptions {
    pub strategy: Strategy,
}

/// Per-degree block of generators adjoined at one arity.
#[derive(Clone, Debug)]
pub struct StageBlock {
    pub degree: i64,
    pub dim: usize,
    /// f_n columns: target coordinates of the quasi-isomorphism on the
    /// new generators, at (arity, degree)
    pub f_matrix: QMatrix,
    /// unitary flavor: induced restriction row per slot (arity 2 only;
    /// zero above)
    pub delta_e: Option<Vec<QMatrix>>,
}

/// One stage of the tower.
#[derive(Clone, Debug)]
pub struct StageInfo {
    pub arity: usize,
    pub blocks: Vec<StageBlock>,
}

/// The computed Sullivan minimal model `ρ: P∞ → P`.
pub struct MinimalModelResult {
    pub flavor: Flavor,
    pub max_arity: usize,
    pub target_name: String,
    pub stages: Vec<StageInfo>,
    /// the assembled minimal operad (free backend with generator data)
    pub operad: DgOperad,
    pub rho: OperadMorphism,
}

impl MinimalModelResult {
    /// Generator dimension table: arity → degree → dim E(n)^d.
    pub fn generator_table(&self) -> BTreeMap<usize, BTreeMap<i64, usize>> {
        let mut out = BTreeMap::new();
        for st in &self.stages {
            let mut per: BTreeMap<i64, usize> = BTreeMap::new();
            for b in &st.blocks {
                if b.dim > 0 {
                    per.insert(b.degree, b.dim);
                }
            }
            out.insert(st.arity, per);
        }
        out
    }
}

/// Report of a quasi-isomorphism check: relative cohomology dimensions per
/// arity and degree; passes when all vanish.
#[derive(Clone, Debug)]
pub struct QuisReport {
    pub per_arity: BTreeMap<usize, BTreeMap<i64, usize>>,
}

impl QuisReport {
    pub fn is_quis(&self) -> bool {
        self.per_arity.values().all(|m| m.values().all(|&d| d == 0))
    }

    pub fn first_failure(&self) -> Option<(usize, i64, usize)> {
        for (&n, per) in &self.per_arity {
            for (&d, &h) in per {
                if h > 0 {
                    return Some((n, d, h));
                }
            }
        }
        None
    }
}

impl fmt::Display for QuisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, per) in &self.per_arity {
            let nonzero: Vec<String> =
                per.iter().filter(|(_, &h)| h > 0).map(|(d, h)| format!("H^{d} = {h}")).collect();
            if nonzero.is_empty() {
                writeln!(f, "arity {n}: acyclic cone")?;
            } else {
                writeln!(f, "arity {n}: {}", nonzero.join(", "))?;
            }
        }
        Ok(())
    }
}

/// Relative cohomology dimensions of the cone of `rho` in arities `≤ up_to`.
pub fn verify_quis(
    src: &DgOperad,
    tgt: &DgOperad,
    rho: &OperadMorphism,
    up_to: usize,
) -> Result<QuisReport> {
    let c = cone(&src.module, &tgt.module, &rho.mor, None);
    let mut per_arity = BTreeMap::new();
    for n in 0..=up_to.min(c.module.max_arity) {
        let mut per = BTreeMap::new();
        for d in c.module.degrees(n) {
            let h = cohomology_dim(&c.module.diff(n, d - 1), &c.module.diff(n, d))?;
            per.insert(d, h);
        }
        per_arity.insert(n, per);
    }
    Ok(QuisReport { per_arity })
}

/// Cohomology of one arity of an operad, per degree.
fn arity_cohomology(
    p: &DgOperad,
    n: usize,
    strategy: Strategy,
) -> Result<BTreeMap<i64, Cohomology>> {
    let mut out = BTreeMap::new();
    for d in p.module.degrees(n) {
        out.insert(d, p.module.cohomology_at(n, d, strategy)?);
    }
    Ok(out)
}

fn hypothesis_table(p: &DgOperad, arities: &[usize]) -> Result<String> {
    let mut s = String::new();
    for &n in arities {
        let dims = p.module.h_dims(n)?;
        s.push_str(&format!("H(P({n})): {dims:?}; "));
    }
    Ok(s)
}

/// Check the cohomological hypotheses of the existence theorems:
/// `HP(1) = k` spanned by the unit class, and `HP(0) = 0` (non-unitary)
/// or `HP(0) = k` in degree 0 (unitary).
fn check_hypotheses(p: &DgOperad, flavor: Flavor) -> Result<()> {
    let h1 = p.module.h_dims(1)?;
    let ok1 = h1.len() == 1 && h1.get(&0) == Some(&1);
    if !ok1 {
        return Err(Error::Hypothesis(format!(
            "HP(1) must be the ground field in degree 0; found {}",
            hypothesis_table(p, &[1])?
        )));
    }
    // the unit must represent the generating class
    let c1 = p.module.cohomology_at(1, 0, Strategy::FirstPivot)?;
    let unit_class = c1.project.mul_vec(&p.unit.to_dense(p.dim(1, 0)));
    if unit_class.iter().all(|x| x.is_zero()) {
        return Err(Error::Hypothesis("the operadic unit is a coboundary".into()));
    }
    let h0 = p.module.h_dims(0)?;
    match flavor {
        Flavor::NonUnitary => {
            if !h0.is_empty() {
                return Err(Error::Hypothesis(format!(
                    "HP(0) must vanish for the non-unitary flavor; found {}",
                    hypothesis_table(p, &[0])?
                )));
            }
        }
        Flavor::Unitary => {
            let ok0 = h0.len() == 1 && h0.get(&0) == Some(&1);
            if !ok0 {
                return Err(Error::Hypothesis(format!(
                    "HP(0) must be the ground field in degree 0 for the unitary flavor; found {}",
                    hypothesis_table(p, &[0])?
                )));
            }
            if p.lambda.is_none() {
                return Err(Error::Hypothesis(
                    "the unitary flavor needs restriction operations on the target".into(),
                ));
            }
            if let Some(_m2) = &p.multiplication {
                let rep = p.check_unitary_multiplication();
                if !rep.is_ok() {
                    return Err(Error::Hypothesis(format!(
                        "unitary multiplication check failed: {rep}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The Sullivan minimal model of `p` through arity `max_arity`.
pub fn minimal_model(
    p: &DgOperad,
    max_arity: usize,
    flavor: Flavor,
    opts: ModelOptions,
) -> Result<MinimalModelResult> {
    if p.max_arity < max_arity {
        return Err(Error::WindowExceeded { arity: max_arity, window: p.max_arity });
    }
    check_hypotheses(p, flavor)?;
    let strategy = opts.strategy;

    let mut stage = initial_free(
        &format!("{}-minimal", p.name),
        flavor,
        max_arity.max(1),
    )?;
    let mut rho = OperadMorphism::zero(max_arity);
    // unit (and arity-0) components of ρ
    rho.set_mat(1, 0, QMatrix::from_cols(p.dim(1, 0), &[p.unit.to_dense(p.dim(1, 0))]));
    if flavor == Flavor::Unitary {
        let one_cols = vec![Elt::basis(0, 0, 0).to_dense(p.dim(0, 0))];
        rho.set_mat(0, 0, QMatrix::from_cols(p.dim(0, 0), &one_cols));
    }
    // running images of the generators in the target
    let mut images: BTreeMap<GenKey, Vec<Elt>> = BTreeMap::new();
    let mut stages: Vec<StageInfo> = Vec::new();

    for n in 2..=max_arity {
        let (next_stage, next_rho, info) = if n == 2 {
            stage_two(p, &stage, flavor, strategy, &mut images)?
        } else {
            stage_higher(p, &stage, &rho, n, flavor, strategy, &mut images)?
        };
        stage = next_stage;
        rho = next_rho;
        stages.push(info);

        // loop invariant: ρ_n is a quasi-isomorphism in arities ≤ n
        let rep = verify_quis(&stage, p, &rho, n)?;
        if !rep.is_quis() {
            let (a, d, h) = rep.first_failure().unwrap();
            return Err(Error::Validation(format!(
                "stage {n} is not a quasi-isomorphism: H^{d} of the cone at arity {a} has dimension {h}"
            )));
        }
        // eager re-validation of the morphism structure
        let vrep = rho.validate(&stage, p, false);
        if !vrep.is_ok() {
            return Err(Error::Validation(format!("stage {n} morphism invalid: {vrep}")));
        }
    }

    Ok(MinimalModelResult {
        flavor,
        max_arity,
        target_name: p.name.clone(),
        stages,
        operad: stage,
        rho,
    })
}

/// Stage 2: `E(2) = HP(2)` with a section of the cocycle projection,
/// rectified (unitary flavor) and averaged.
fn stage_two(
    p: &DgOperad,
    stage1: &DgOperad,
    flavor: Flavor,
    strategy: Strategy,
    images: &mut BTreeMap<GenKey, Vec<Elt>>,
) -> Result<(DgOperad, OperadMorphism, StageInfo)> {
    let h2 = arity_cohomology(p, 2, strategy)?;
    let h1 = arity_cohomology(p, 1, strategy)?;

    let mut blocks: Vec<ExtensionBlock> = Vec::new();
    let mut stage_blocks: Vec<StageBlock> = Vec::new();

    for (&d, coh) in &h2 {
        let h = coh.h_dim();
        if h == 0 {
            continue;
        }
        let dim2 = p.dim(2, d);
        // raw section: representatives as columns
        let mut s: QMatrix = coh.representatives.matrix();
        // induced action on E(2)^d
        let reps = coh.representatives.matrix();
        let e_rep = p.module.rep(2, d).induced(&coh.project, &reps);

        // induced restriction rows δᵢ: E(2)^d -> H(P(1))^d (nonzero only at d = 0)
        let lam = p.lambda.as_ref();
        let delta_e: Option<Vec<QMatrix>> = match (flavor, lam) {
            (Flavor::Unitary, Some(lam)) => {
                let mut per_slot = Vec::new();
                for i in 1..=2 {
                    let dm = lam.delta(&p.module, 2, i, d);
                    let ind = match h1.get(&d) {
                        Some(c1) => c1.project.mul(&dm.mul(&reps)),
                        None => QMatrix::zeros(0, h),
                    };
                    per_slot.push(ind);
                }
                Some(per_slot)
            }
            _ => None,
        };

        // unitary rectification: make δᵢ∘s equal s₁∘δᵢ on the nose
        if flavor == Flavor::Unitary {
            let lam = p.lambda.as_ref().unwrap();
            let de = delta_e.as_ref().unwrap();
            let mut new_cols: Vec<Vec<Q>> = Vec::with_capacity(h);
            for e in 0..h {
                let se = Elt::from_dense(2, d, &s.col_vec(e));
                let mut members = Vec::with_capacity(2);
                for i in 1..=2 {
                    let dse = Elt {
                        arity: 1,
                        degree: d,
                        coords: lam
                            .delta(&p.module, 2, i, d)
                            .mul_sparse_vec(&se.coords),
                    };
                    // s₁(δᵢ^E e): the unit scaled by the induced coordinate
                    let target = if d == 0 {
                        let c = de[i - 1].entry(0, e);
                        p.unit.scale(&c)
                    } else {
                        Elt::zero(1, d)
                    };
                    let w_i = dse.sub(&target);
                    // ωᵢ must be a coboundary in P(1)^d
                    if !p.differential(&w_i).is_zero() {
                        return Err(Error::Validation(
                            "stage-2 rectification family is not closed".into(),
                        ));
                    }
                    if let Some(c1) = h1.get(&d) {
                        let cls = c1.project.mul_vec(&w_i.to_dense(p.dim(1, d)));
                        if !cls.iter().all(|x| x.is_zero()) {
                            return Err(Error::Validation(
                                "stage-2 rectification family is not a coboundary".into(),
                            ));
                        }
                    }
                    members.push(w_i);
                }
                if members.iter().all(|m| m.is_zero()) {
                    new_cols.push(se.to_dense(dim2));
                    continue;
                }
                let host = crate::kan::OperadHost::new(p)?;
                let w = fill_in(&host, &members)?;
                // the filler is a coboundary, so the section property survives
                let corrected = se.sub(&w);
                new_cols.push(corrected.to_dense(dim2));
            }
            s = QMatrix::from_cols(dim2, &new_cols);
        }

        // Σ₂-equivariant averaging (preserves section, cocycle and the
        // rectified restriction equations)
        s = average(&e_rep, &p.module.rep(2, d), &s);

        // exact post-conditions
        if !p.module.diff(2, d).mul(&s).is_zero() {
            return Err(Error::Validation("stage-2 section does not land in cocycles".into()));
        }
        if coh.project.mul(&s) != QMatrix::identity(h) {
            return Err(Error::Validation("stage-2 section lost the projection property".into()));
        }
        for (k, g) in e_rep.gens.iter().enumerate() {
            if s.mul(g) != p.module.action_gen(2, k, d).mul(&s) {
                return Err(Error::Validation("stage-2 section is not equivariant".into()));
            }
        }
        if let (Flavor::Unitary, Some(de)) = (flavor, &delta_e) {
            let lam = p.lambda.as_ref().unwrap();
            for i in 1..=2 {
                let lhs = lam.delta(&p.module, 2, i, d).mul(&s);
                let unit_col = QMatrix::from_cols(p.dim(1, d), &[if d == 0 {
                    p.unit.to_dense(p.dim(1, 0))
                } else {
                    vec![Q::zero(); p.dim(1, d)]
                }]);
                let rhs = unit_col.mul(&de[i - 1]);
                if lhs != rhs {
                    return Err(Error::Validation(format!(
                        "stage-2 rectification failed at slot {i}, degree {d}"
                    )));
                }
            }
        }

        let labels: Vec<String> = (0..h).map(|i| format!("e2_{i}{}", deg_tag(d))).collect();
        let delta_values = match (flavor, &delta_e) {
            (Flavor::Unitary, Some(de)) => Some(
                (0..h)
                    .map(|e| {
                        (1..=2)
                            .map(|i| {
                                if d == 0 {
                                    stage1_unit_scaled(de[i - 1].entry(0, e))
                                } else {
                                    Elt::zero(1, d)
                                }
                            })
                            .collect()
                    })
                    .collect(),
            ),
            _ => None,
        };
        blocks.push(ExtensionBlock {
            degree: d,
            dim: h,
            labels,
            actions: e_rep.gens.clone(),
            d_values: vec![Elt::zero(2, d + 1); h],
            delta_values,
        });
        images.insert((2, d), (0..h).map(|e| Elt::from_dense(2, d, &s.col_vec(e))).collect());
        stage_blocks.push(StageBlock { degree: d, dim: h, f_matrix: s, delta_e });
    }

    let mut next = if blocks.is_empty() {
        stage1.clone()
    } else {
        principal_extend(stage1, 2, blocks)?
    };

    // the stage multiplication: the class of m₂ as an arity-2 corolla
    if flavor == Flavor::Unitary {
        if let Some(m2) = &p.multiplication {
            if let Some(c2) = h2.get(&0) {
                let cls = c2.project.mul_vec(&m2.to_dense(p.dim(2, 0)));
                if cls.iter().all(|x| x.is_zero()) {
                    return Err(Error::Hypothesis(
                        "the class of the multiplication vanishes in HP(2)".into(),
                    ));
                }
                next.multiplication = Some(Elt::from_dense(2, 0, &cls));
            }
        }
    }

    let rho = rho_from_images(&next, p, images)?;
    Ok((next, rho, StageInfo { arity: 2, blocks: stage_blocks }))
}

fn deg_tag(d: i64) -> String {
    if d == 0 {
        String::new()
    } else {
        format!("_d{d}")
    }
}

fn stage1_unit_scaled(c: Q) -> Elt {
    Elt::basis(1, 0, 0).scale(&c)
}

/// Stage `n ≥ 3`: `E(n)` is the relative cohomology of `ρ_{n-1}(n)`; the
/// section through relative cocycles is rectified on the cone (unitary
/// flavor) and averaged.
#[allow(clippy::too_many_arguments)]
fn stage_higher(
    p: &DgOperad,
    prev: &DgOperad,
    rho_prev: &OperadMorphism,
    n: usize,
    flavor: Flavor,
    strategy: Strategy,
    images: &mut BTreeMap<GenKey, Vec<Elt>>,
) -> Result<(DgOperad, OperadMorphism, StageInfo)> {
    let lambda_pair = match flavor {
        Flavor::Unitary => Some((
            prev.lambda.as_ref().ok_or(Error::NoLambdaStructure)?,
            p.lambda.as_ref().ok_or(Error::NoLambdaStructure)?,
        )),
        Flavor::NonUnitary => None,
    };
    let cone_cx = cone(&prev.module, &p.module, &rho_prev.mor, lambda_pair);

    let mut blocks: Vec<ExtensionBlock> = Vec::new();
    let mut stage_blocks: Vec<StageBlock> = Vec::new();

    for d in cone_cx.module.degrees(n) {
        let coh = cone_cx.module.cohomology_at(n, d, strategy)?;
        let h = coh.h_dim();
        if h == 0 {
            continue;
        }
        let ambient = cone_cx.module.dim(n, d);
        let mut s = coh.representatives.matrix();
        let e_rep = cone_cx.module.rep(n, d).induced(&coh.project, &coh.representatives.matrix());

        // unitary rectification on the cone: subtract a filler of the face
        // family δᵢ(s e), making δᵢ ∘ s' = 0 while staying a section
        if flavor == Flavor::Unitary {
            let mult_src = prev
                .multiplication
                .clone()
                .ok_or(Error::NoMultiplication)?;
            let mult_tgt = rho_prev.apply(prev, p, &mult_src);
            let host = ConeHost { src: prev, tgt: p, mult_src, mult_tgt };
            let cone_lambda = cone_cx.lambda.as_ref().expect("cone Λ-data");
            let mut new_cols: Vec<Vec<Q>> = Vec::with_capacity(h);
            for e in 0..h {
                let col = s.col_vec(e);
                let (q_part, r_part) = cone_cx.split(n, d, &col);
                let se = (
                    Elt::from_dense(n, d + 1, &q_part),
                    Elt::from_dense(n, d, &r_part),
                );
                let members: Vec<(Elt, Elt)> =
                    (1..=n).map(|i| host.face(&se, i)).collect::<Result<Vec<_>>>()?;
                // each member is a relative cocycle at arity n-1 (acyclic
                // there), so the componentwise filler stays a relative
                // coboundary; verify closedness
                for (i, m) in members.iter().enumerate() {
                    let joined = cone_cx.join(
                        n - 1,
                        d,
                        &m.0.to_dense(prev.dim(n - 1, d + 1)),
                        &m.1.to_dense(p.dim(n - 1, d)),
                    );
                    let img = cone_cx.module.diff(n - 1, d).mul_vec(&joined);
                    if !img.iter().all(|x| x.is_zero()) {
                        return Err(Error::Validation(format!(
                            "rectification face {} is not a relative cocycle",
                            i + 1
                        )));
                    }
                }
                let w = fill_in(&host, &members)?;
                // w must be a relative cocycle with vanishing class
                let wj = cone_cx.join(
                    n,
                    d,
                    &w.0.to_dense(prev.dim(n, d + 1)),
                    &w.1.to_dense(p.dim(n, d)),
                );
                if !cone_cx.module.diff(n, d).mul_vec(&wj).iter().all(|x| x.is_zero()) {
                    return Err(Error::Validation("cone filler is not a relative cocycle".into()));
                }
                if !coh.project.mul_vec(&wj).iter().all(|x| x.is_zero()) {
                    return Err(Error::Validation("cone filler carries a cohomology class".into()));
                }
                let corrected: Vec<Q> =
                    col.iter().zip(&wj).map(|(a, b)| a - b).collect();
                new_cols.push(corrected);
            }
            s = QMatrix::from_cols(ambient, &new_cols);
            let _ = cone_lambda;
        }

        s = average(&e_rep, &cone_cx.module.rep(n, d), &s);

        // exact post-conditions: section of the projection, relative
        // cocycles, equivariance, and (unitary) vanishing restrictions
        if coh.project.mul(&s) != QMatrix::identity(h) {
            return Err(Error::Validation(format!(
                "stage-{n} section lost the projection property (degree {d})"
            )));
        }
        if !cone_cx.module.diff(n, d).mul(&s).is_zero() {
            return Err(Error::Validation(format!(
                "stage-{n} section does not land in relative cocycles (degree {d})"
            )));
        }
        for (k, g) in e_rep.gens.iter().enumerate() {
            if s.mul(g) != cone_cx.module.action_gen(n, k, d).mul(&s) {
                return Err(Error::Validation(format!(
                    "stage-{n} section is not equivariant (degree {d})"
                )));
            }
        }
        if flavor == Flavor::Unitary {
            let cone_lambda = cone_cx.lambda.as_ref().unwrap();
            for i in 1..=n {
                if !cone_lambda.delta(&cone_cx.module, n, i, d).mul(&s).is_zero() {
                    return Err(Error::Validation(format!(
                        "stage-{n} rectified section has nonzero restriction at slot {i}"
                    )));
                }
            }
        }

        // split into d_n (previous-stage part) and f_n (target part)
        let mut d_vals = Vec::with_capacity(h);
        let mut f_cols = Vec::with_capacity(h);
        for e in 0..h {
            let col = s.col_vec(e);
            let (q_part, r_part) = cone_cx.split(n, d, &col);
            d_vals.push(Elt::from_dense(n, d + 1, &q_part));
            f_cols.push(r_part);
        }
        let f_matrix = QMatrix::from_cols(p.dim(n, d), &f_cols);

        let labels: Vec<String> = (0..h).map(|i| format!("e{n}_{i}{}", deg_tag(d))).collect();
        let delta_values = match flavor {
            Flavor::Unitary => {
                Some(vec![vec![Elt::zero(n - 1, d); n]; h])
            }
            Flavor::NonUnitary => None,
        };
        blocks.push(ExtensionBlock {
            degree: d,
            dim: h,
            labels,
            actions: e_rep.gens.clone(),
            d_values: d_vals,
            delta_values,
        });
        images.insert(
            (n, d),
            (0..h).map(|e| Elt::from_dense(n, d, &f_matrix.col_vec(e))).collect(),
        );
        stage_blocks.push(StageBlock {
            degree: d,
            dim: h,
            f_matrix,
            delta_e: if flavor == Flavor::Unitary {
                Some(vec![QMatrix::zeros(0, h); n])
            } else {
                None
            },
        });
    }

    let next = if blocks.is_empty() {
        prev.clone()
    } else {
        principal_extend(prev, n, blocks)?
    };
    let rho = rho_from_images(&next, p, images)?;
    Ok((next, rho, StageInfo { arity: n, blocks: stage_blocks }))
}

fn rho_from_images(
    stage: &DgOperad,
    p: &DgOperad,
    images: &BTreeMap<GenKey, Vec<Elt>>,
) -> Result<OperadMorphism> {
    crate::operad::induced_morphism_from_generators(stage, p, images)
}

// ---------------------------------------------------------------------------
// Lifting through principal extensions
// ---------------------------------------------------------------------------

/// Input square for [`lift_through_extension`]: `ρψ′ = ψ` and `ψ′ι = φ` are
/// solved for `ψ′` when `ρ` is a surjective quasi-isomorphism.
pub struct LiftProblem<'a> {
    /// the extension base `P` (free backend)
    pub base: &'a DgOperad,
    /// `P ⊔ Γ(E)`, the output of [`principal_extend`]
    pub ext: &'a DgOperad,
    /// the extension arity
    pub arity: usize,
    pub q_op: &'a DgOperad,
    pub r_op: &'a DgOperad,
    /// `φ: P → Q`
    pub phi: &'a OperadMorphism,
    /// `ψ: P ⊔ Γ(E) → R`
    pub psi: &'a OperadMorphism,
    /// `ρ: Q → R`, surjective quasi-isomorphism
    pub rho: &'a OperadMorphism,
}

/// Lift `ψ` through a principal extension along a surjective
/// quasi-isomorphism, per-generator: solve `∂y = φ(d e)`, `ρy = ψ(e)`,
/// average, and (unitary flavor) correct by an equivariant Kan filler so
/// that `δᵢψ′ = ψ′δᵢ` on the new generators.
pub fn lift_through_extension(pr: &LiftProblem<'_>) -> Result<OperadMorphism> {
    let window = pr.ext.max_arity.min(pr.q_op.max_arity).min(pr.r_op.max_arity);
    // ρ surjective in every arity-degree of the window
    for m in 0..=window {
        for dd in pr.r_op.module.degrees(m) {
            let mat = pr.rho.mat(pr.q_op, pr.r_op, m, dd);
            if mat.rank() != pr.r_op.dim(m, dd) {
                return Err(Error::NotSurjective { rank: mat.rank(), rows: pr.r_op.dim(m, dd) });
            }
        }
    }
    // ρ a quis
    let qrep = verify_quis(pr.q_op, pr.r_op, pr.rho, window)?;
    if !qrep.is_quis() {
        return Err(Error::Invalid("ρ is not a quasi-isomorphism".into()));
    }
    // the square commutes on the base: ρφ = ψ|P (base trees embed)
    let base_f = pr.base.free_data().unwrap();
    let ext_f = pr.ext.free_data().unwrap();
    let flavor = ext_f.flavor;

    for m in 0..=window.min(pr.base.max_arity) {
        for dd in pr.base.module.degrees(m) {
            let rphi = pr.rho.mat(pr.q_op, pr.r_op, m, dd).mul(&pr.phi.mat(
                pr.base,
                pr.q_op,
                m,
                dd,
            ));
            // embed base basis into ext basis
            let emb = embedding_matrix(pr.base, pr.ext, m, dd);
            let psi_restr = pr.psi.mat(pr.ext, pr.r_op, m, dd).mul(&emb);
            if rphi != psi_restr {
                return Err(Error::Invalid(format!(
                    "the lifting square does not commute at arity {m}, degree {dd}"
                )));
            }
        }
    }

    // images of old generators: φ of their corollas
    let mut images: BTreeMap<GenKey, Vec<Elt>> = BTreeMap::new();
    for (r, per) in base_f.gens.arities.iter().enumerate() {
        for (&deg, block) in per {
            let mut imgs = Vec::with_capacity(block.dim);
            for idx in 0..block.dim {
                let corolla = corolla_elt(pr.base, r, deg, idx)?;
                imgs.push(pr.phi.apply(pr.base, pr.q_op, &corolla));
            }
            images.insert((r, deg), imgs);
        }
    }

    // the new blocks at `arity`: everything in ext.gens not in base.gens
    let n = pr.arity;
    let new_degrees: Vec<i64> = ext_f
        .gens
        .arities
        .get(n)
        .map(|per| {
            per.keys()
                .filter(|deg| base_f.gens.block(n, **deg).is_none())
                .copied()
                .collect()
        })
        .unwrap_or_default();

    for deg in new_degrees {
        let block = ext_f.gens.block(n, deg).unwrap();
        let e_rep = SigmaRep { n, dim: block.dim, gens: block.actions.clone() };
        // stacked solve: [∂; ρ] y = (φ(d e); ψ(e))
        let diff_q = pr.q_op.module.diff(n, deg);
        let rho_q = pr.rho.mat(pr.q_op, pr.r_op, n, deg);
        let stacked = QMatrix::vstack(&[&diff_q, &rho_q]);
        let mut rhs_cols = Vec::with_capacity(block.dim);
        for idx in 0..block.dim {
            let d_val = &ext_f.d_vals[&(n, deg)][idx];
            // d-values live in ext coordinates at arities < ... same arity n:
            // the base agrees with ext below arity n, and at arity n the
            // d-value has no corolla coordinates, so it pulls back to base
            let d_base = pullback_to_base(pr.base, pr.ext, d_val)?;
            let q_img = pr.phi.apply(pr.base, pr.q_op, &d_base);
            let corolla = corolla_elt(pr.ext, n, deg, idx)?;
            let r_img = pr.psi.apply(pr.ext, pr.r_op, &corolla);
            let mut col = q_img.to_dense(pr.q_op.dim(n, deg + 1));
            col.extend(r_img.to_dense(pr.r_op.dim(n, deg)));
            rhs_cols.push(col);
        }
        let rhs = QMatrix::from_cols(stacked.rows(), &rhs_cols);
        let sol = stacked.solve_cols(&rhs).ok_or(Error::NoSolution)?;
        let mut f = average(&e_rep, &pr.q_op.module.rep(n, deg), &sol);

        if flavor == Flavor::Unitary {
            // correction family ωᵢ(e) = δᵢ(f e) − φ(δᵢ e)
            let lam_q = pr.q_op.lambda.as_ref().ok_or(Error::NoLambdaStructure)?;
            let mut family: Vec<Vec<Elt>> = Vec::with_capacity(block.dim);
            let deltas = &ext_f.delta_vals[&(n, deg)];
            for idx in 0..block.dim {
                let fe = Elt::from_dense(n, deg, &f.col_vec(idx));
                let mut members = Vec::with_capacity(n);
                for i in 1..=n {
                    let a = Elt {
                        arity: n - 1,
                        degree: deg,
                        coords: lam_q.delta(&pr.q_op.module, n, i, deg).mul_sparse_vec(&fe.coords),
                    };
                    let dv_base = pullback_to_base(pr.base, pr.ext, &deltas[idx][i - 1])?;
                    let b = pr.phi.apply(pr.base, pr.q_op, &dv_base);
                    members.push(a.sub(&b));
                }
                family.push(members);
            }
            let fills =
                crate::kan::fill_equivariant(pr.q_op, n, deg, &family, &e_rep)?;
            // fillers must be cocycles in ker ρ
            for w in &fills {
                if !pr.q_op.differential(w).is_zero() {
                    return Err(Error::Validation("lift correction is not a cocycle".into()));
                }
                if !pr.rho.apply(pr.q_op, pr.r_op, w).is_zero() {
                    return Err(Error::Validation("lift correction leaves ker ρ".into()));
                }
            }
            let cols: Vec<Vec<Q>> = (0..block.dim)
                .map(|idx| {
                    let fe = Elt::from_dense(n, deg, &f.col_vec(idx));
                    fe.sub(&fills[idx]).to_dense(pr.q_op.dim(n, deg))
                })
                .collect();
            f = QMatrix::from_cols(pr.q_op.dim(n, deg), &cols);
        }

        images.insert(
            (n, deg),
            (0..block.dim).map(|idx| Elt::from_dense(n, deg, &f.col_vec(idx))).collect(),
        );
    }

    let psi_prime = crate::operad::induced_morphism_from_generators(pr.ext, pr.q_op, &images)?;

    // both triangles, exactly
    for m in 0..=window.min(pr.base.max_arity) {
        for dd in pr.base.module.degrees(m) {
            let emb = embedding_matrix(pr.base, pr.ext, m, dd);
            let lhs = psi_prime.mat(pr.ext, pr.q_op, m, dd).mul(&emb);
            let rhs = pr.phi.mat(pr.base, pr.q_op, m, dd);
            if lhs != rhs {
                return Err(Error::Validation(format!(
                    "lift does not extend φ at arity {m}, degree {dd}"
                )));
            }
        }
    }
    for m in 0..=window {
        for dd in pr.ext.module.degrees(m) {
            let lhs = pr.rho.mat(pr.q_op, pr.r_op, m, dd).mul(&psi_prime.mat(
                pr.ext,
                pr.q_op,
                m,
                dd,
            ));
            let rhs = pr.psi.mat(pr.ext, pr.r_op, m, dd);
            if lhs != rhs {
                return Err(Error::Validation(format!(
                    "lift does not lift ψ at arity {m}, degree {dd}"
                )));
            }
        }
    }
    Ok(psi_prime)
}

/// The corolla of a generator as an element of a free operad.
fn corolla_elt(p: &DgOperad, arity: usize, degree: i64, idx: usize) -> Result<Elt> {
    let f = p.free_data().ok_or_else(|| Error::Invalid("corolla needs a free operad".into()))?;
    let shape = crate::trees::ReducedTree::corolla(arity);
    let t = crate::trees::DecoratedTree {
        shape,
        decorations: vec![crate::trees::Decoration { degree, index: idx as u32 }],
    };
    let (d, i) = f
        .tree_index(&t)
        .ok_or_else(|| Error::Invalid("corolla outside the basis".into()))?;
    Ok(Elt::basis(arity, d, i as usize))
}

/// Matrix of the basis embedding `base(m)^d ⊆ ext(m)^d` (trees are shared).
fn embedding_matrix(base: &DgOperad, ext: &DgOperad, m: usize, d: i64) -> QMatrix {
    let bf = base.free_data().unwrap();
    let ef = ext.free_data().unwrap();
    let rows = ext.dim(m, d);
    let cols = base.dim(m, d);
    let mut out = QMatrix::zeros(rows, cols);
    if m <= 1 {
        for j in 0..cols.min(rows) {
            out.set_entry(j, j, Q::from_integer(1.into()));
        }
        return out;
    }
    if let Some(trees) = bf.basis[m].get(&d) {
        for (j, t) in trees.iter().enumerate() {
            let (_, i) = ef.tree_index(t).expect("base tree embeds");
            out.set_entry(i as usize, j, Q::from_integer(1.into()));
        }
    }
    out
}

/// Pull an element of the extension back to the base (valid when it has no
/// coordinates on trees containing new generators).
fn pullback_to_base(base: &DgOperad, ext: &DgOperad, e: &Elt) -> Result<Elt> {
    if e.arity <= 1 {
        return Ok(e.clone());
    }
    let bf = base.free_data().unwrap();
    let ef = ext.free_data().unwrap();
    let mut acc: Vec<(u32, Q)> = Vec::new();
    for (i, c) in &e.coords {
        let t = ef.tree_at(e.arity, e.degree, *i as usize).unwrap();
        let (_, j) = bf
            .tree_index(t)
            .ok_or_else(|| Error::Invalid("element does not pull back to the base".into()))?;
        acc.push((j, c.clone()));
    }
    acc.sort_by_key(|x| x.0);
    Ok(Elt { arity: e.arity, degree: e.degree, coords: acc })
}
