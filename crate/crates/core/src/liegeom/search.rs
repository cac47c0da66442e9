use rayon::prelude::*;

use super::closed::{tau2_from_endomorphism, torsion_endomorphism};
use super::{ce_differential, levi_civita, validate_closed_g2, LieAlgebra};
use crate::error::{Error, Result};
use crate::g2::G2Structure;
use crate::linalg::Matrix;
use num_traits::Zero;

use crate::scalar::{Rational, Scalar};

/// A certified closed-G₂ algebra with the invariants used to deduplicate.
#[derive(Debug, Clone)]
pub struct SearchHit {
    pub alg: LieAlgebra<Rational>,
    /// Indices spanning the centre that receives all brackets.
    pub center: Vec<usize>,
    pub derived_dim: usize,
    pub tau2_norm_sq: Rational,
}

struct Block {
    center: Vec<usize>,
    vars: Vec<(usize, usize, usize)>,
    rref: Matrix<Rational>,
    pivots: Vec<usize>,
    free: Vec<usize>,
    /// τ₂ coefficients of each single bracket; τ₂ is linear in the constants.
    tau2: Vec<Vec<Rational>>,
}

struct Candidate {
    center: Vec<usize>,
    brackets: Vec<(usize, usize, usize, Rational)>,
    derived_dim: usize,
    tau2_norm_sq: Rational,
}

fn single_bracket(k: usize, i: usize, j: usize) -> LieAlgebra<Rational> {
    let mut c = vec![Rational::from_i64(0); 343];
    c[(k * 7 + i) * 7 + j] = Rational::from_i64(1);
    c[(k * 7 + j) * 7 + i] = Rational::from_i64(-1);
    LieAlgebra { dim: 7, c }
}

/// The linear system dφ = 0 for brackets F × F → S with S = `center`.
fn block(g2: &G2Structure<Rational>, center_mask: u8) -> Option<Block> {
    let center: Vec<usize> = (0..7).filter(|i| center_mask & (1 << i) != 0).collect();
    let free_idx: Vec<usize> = (0..7).filter(|i| center_mask & (1 << i) == 0).collect();
    let mut vars = Vec::new();
    for &k in &center {
        for (a, &i) in free_idx.iter().enumerate() {
            for &j in &free_idx[a + 1..] {
                vars.push((k, i, j));
            }
        }
    }
    if vars.is_empty() {
        return None;
    }
    let columns: Vec<Vec<Rational>> = vars
        .iter()
        .map(|&(k, i, j)| {
            ce_differential(&single_bracket(k, i, j), g2.phi())
                .expect("dimension 7")
                .coeffs()
                .to_vec()
        })
        .collect();
    let (rref, pivots) = Matrix::from_columns(&columns).rref(0.0);
    let free: Vec<usize> = (0..vars.len()).filter(|c| !pivots.contains(c)).collect();
    if free.is_empty() {
        return None;
    }
    let tau2 = vars
        .iter()
        .map(|&(k, i, j)| {
            let conn = levi_civita(&single_bracket(k, i, j));
            let (t, _, _) = torsion_endomorphism(g2, &conn).expect("dimension 7");
            tau2_from_endomorphism(&t).coeffs().to_vec()
        })
        .collect();
    Some(Block {
        center,
        vars,
        rref,
        pivots,
        free,
        tau2,
    })
}

fn candidate(b: &Block, x: &[Rational]) -> Candidate {
    let brackets: Vec<(usize, usize, usize, Rational)> = b
        .vars
        .iter()
        .zip(x)
        .filter(|(_, c)| !c.is_zero())
        .map(|(&(k, i, j), c)| (k, i, j, c.clone()))
        .collect();
    let mut tau2 = vec![Rational::from_i64(0); b.tau2[0].len()];
    for (col, c) in b.tau2.iter().zip(x) {
        if !c.is_zero() {
            for (t, v) in tau2.iter_mut().zip(col) {
                *t += c.clone() * v.clone();
            }
        }
    }
    let tau2_norm_sq = tau2
        .iter()
        .fold(Rational::from_i64(0), |acc, t| acc + t.clone() * t.clone());
    // rows: brackets [e_i, e_j], columns: centre index
    let mut pairs: Vec<(usize, usize)> = b.vars.iter().map(|&(_, i, j)| (i, j)).collect();
    pairs.sort_unstable();
    pairs.dedup();
    let mut rows = Matrix::zeros(pairs.len(), 7);
    for (k, i, j, c) in &brackets {
        let r = pairs
            .iter()
            .position(|p| *p == (*i, *j))
            .expect("pair listed");
        rows[(r, *k)] = c.clone();
    }
    let derived_dim = rows.rref(0.0).1.len();
    Candidate {
        center: b.center.clone(),
        brackets,
        derived_dim,
        tau2_norm_sq,
    }
}

fn candidates(b: &Block, set: &[Rational]) -> Vec<Candidate> {
    let mut out = Vec::new();
    let mut odometer = vec![0usize; b.free.len()];
    loop {
        let mut x = vec![Rational::from_i64(0); b.vars.len()];
        for (slot, &f) in odometer.iter().zip(&b.free) {
            x[f] = set[*slot].clone();
        }
        let mut ok = true;
        for (r, &p) in b.pivots.iter().enumerate() {
            let v = b.free.iter().fold(Rational::from_i64(0), |acc, &f| {
                acc - b.rref[(r, f)].clone() * x[f].clone()
            });
            if !set.contains(&v) {
                ok = false;
                break;
            }
            x[p] = v;
        }
        // every centre index must actually receive a bracket, so each
        // candidate is produced by exactly one centre set
        if ok
            && b.center
                .iter()
                .all(|&k| b.vars.iter().zip(&x).any(|(v, c)| v.0 == k && !c.is_zero()))
        {
            out.push(candidate(b, &x));
        }
        let mut pos = 0;
        loop {
            if pos == odometer.len() {
                return out;
            }
            odometer[pos] += 1;
            if odometer[pos] < set.len() {
                break;
            }
            odometer[pos] = 0;
            pos += 1;
        }
    }
}

/// Enumerates 2-step nilpotent algebras whose brackets take values in a
/// central coordinate subspace, with every structure constant drawn from
/// `coefficient_set` and dφ = 0. Since dφ is linear in the structure
/// constants, each centre choice is a rational linear system whose free
/// variables are enumerated over the set. Hits are certified by
/// [`validate_closed_g2`] and deduplicated by (dim [g,g], |τ₂|²).
///
/// `step_bound` 1 yields only the abelian algebra; larger bounds search
/// 2-step algebras (deeper nilpotent steps are not enumerated).
pub fn search_closed_g2(step_bound: usize, coefficient_set: &[Rational]) -> Result<Vec<SearchHit>> {
    if step_bound == 0 {
        return Err(Error::UnsupportedSearch(
            "step bound must be at least 1".into(),
        ));
    }
    let mut set: Vec<Rational> = Vec::new();
    for c in coefficient_set {
        if !set.contains(c) {
            set.push(c.clone());
        }
    }
    let g2 = G2Structure::<Rational>::model();
    let mut found: Vec<Candidate> = Vec::new();
    if set.iter().any(|c| c.is_zero()) {
        found.push(Candidate {
            center: Vec::new(),
            brackets: Vec::new(),
            derived_dim: 0,
            tau2_norm_sq: Rational::from_i64(0),
        });
    }
    if step_bound >= 2 && !set.is_empty() {
        let mut masks: Vec<u8> = (1u8..127).filter(|m| m.count_ones() <= 5).collect();
        masks.sort_by_key(|m| (m.count_ones(), m.reverse_bits()));
        let blocks: Vec<Block> = masks.par_iter().filter_map(|&m| block(&g2, m)).collect();
        let per_block: Vec<Vec<Candidate>> =
            blocks.par_iter().map(|b| candidates(b, &set)).collect();
        for cand in per_block.into_iter().flatten() {
            if !found
                .iter()
                .any(|h| h.derived_dim == cand.derived_dim && h.tau2_norm_sq == cand.tau2_norm_sq)
            {
                found.push(cand);
            }
        }
    }
    let mut hits: Vec<SearchHit> = found
        .into_par_iter()
        .map(|cand| {
            let alg = LieAlgebra::from_brackets(7, &cand.brackets)?;
            let closed = validate_closed_g2(&g2, &alg)?;
            if alg.derived_dim() != cand.derived_dim || closed.tau2.norm_sq() != cand.tau2_norm_sq {
                return Err(Error::Inconsistent(
                    "search invariants disagree with certification".into(),
                ));
            }
            Ok(SearchHit {
                derived_dim: cand.derived_dim,
                tau2_norm_sq: cand.tau2_norm_sq,
                center: cand.center,
                alg,
            })
        })
        .collect::<Result<_>>()?;
    hits.sort_by(|a, b| {
        (a.derived_dim, &a.tau2_norm_sq)
            .partial_cmp(&(b.derived_dim, &b.tau2_norm_sq))
            .expect("rationals are ordered")
    });
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_set_gives_only_abelian() {
        let hits = search_closed_g2(2, &[Rational::from_i64(0)]).unwrap();
        assert_eq!(hits.len(), 1);
        assert!(hits[0].alg.is_abelian());
        assert!(search_closed_g2(0, &[Rational::from_i64(0)]).is_err());
    }
}
