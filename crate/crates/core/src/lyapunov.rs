//! Complete Lyapunov functions in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cellset::CellSet;
use crate::chain::{chain_analysis, dilate, Dilation};
use crate::error::{Error, Result};
use crate::graph::Condensation;
use crate::grid::Eps;
use crate::morse::{ar_family_from, is_inward, AttractorRepellerPair};
use crate::relation::Relation;

#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovField {
    pub values: Vec<BigRational>,
    pub pairs: Vec<AttractorRepellerPair>,
    pub pair_fields: Vec<Vec<BigRational>>,
    pub weights: Vec<BigRational>,
}

impl LyapunovField {
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Recomputes `Σ weight_n · field_n`.
    pub fn weighted_sum(&self) -> Vec<BigRational> {
        let n = self.pair_fields.first().map_or(self.values.len(), Vec::len);
        let mut out = vec![BigRational::zero(); n];
        for (w, field) in self.weights.iter().zip(&self.pair_fields) {
            for (o, v) in out.iter_mut().zip(field) {
                *o += w * v;
            }
        }
        out
    }
}

/// `2 / 3^(n+1)`.
pub fn weight(n: usize) -> BigRational {
    let exp = u32::try_from(n + 1).expect("pair count fits in u32");
    BigRational::new(BigInt::from(2), BigInt::from(3).pow(exp))
}

/// A field equal to 1 on the attractor, 0 on the repeller and strictly
/// increasing along every edge of `V_eps ∘ F` between distinct strongly
/// connected components elsewhere.
pub fn pair_lyapunov(f: &Relation, pair: &AttractorRepellerPair, eps: Eps) -> Result<Vec<BigRational>> {
    let g = dilate(f, eps, Dilation::OneSided);
    let cond = Condensation::new(g.rows());
    pair_field(&g, &cond, pair)
}

fn pair_field(g: &Relation, cond: &Condensation, pair: &AttractorRepellerPair) -> Result<Vec<BigRational>> {
    let (a_set, b_set) = (&pair.attractor, &pair.repeller);
    g.space().check_set(a_set)?;
    g.space().check_set(b_set)?;
    if !a_set.is_disjoint(b_set) {
        return Err(Error::Certificate("attractor and repeller overlap".into()));
    }
    for (x, y) in g.edges() {
        if a_set.contains(x) && !a_set.contains(y) {
            return Err(Error::Certificate(format!("edge {x} -> {y} leaves the attractor")));
        }
        if !b_set.contains(x) && b_set.contains(y) {
            return Err(Error::Certificate(format!("edge {x} -> {y} enters the repeller")));
        }
    }
    let k = cond.nodes.len();
    let middle: Vec<bool> = cond.nodes.iter().map(|c| !a_set.contains(c[0]) && !b_set.contains(c[0])).collect();
    // successors precede their sources in the node order
    let mut ahead = vec![0u64; k];
    for i in 0..k {
        if middle[i] {
            ahead[i] = cond.succ[i].iter().filter(|&&s| middle[s]).map(|&s| ahead[s] + 1).max().unwrap_or(0);
        }
    }
    let mut behind = vec![0u64; k];
    for i in (0..k).rev() {
        if middle[i] {
            for &s in &cond.succ[i] {
                if middle[s] {
                    behind[s] = behind[s].max(behind[i] + 1);
                }
            }
        }
    }
    Ok((0..g.cell_count())
        .map(|x| {
            if a_set.contains(x) {
                BigRational::one()
            } else if b_set.contains(x) {
                BigRational::zero()
            } else {
                let i = cond.node_of[x];
                BigRational::new(BigInt::from(behind[i] + 1), BigInt::from(ahead[i] + behind[i] + 2))
            }
        })
        .collect())
}

pub fn complete_lyapunov(f: &Relation, eps: Eps) -> LyapunovField {
    let chain = chain_analysis(f, eps);
    let pairs = ar_family_from(f, eps, &chain);
    let g = dilate(f, eps, Dilation::OneSided);
    let cond = Condensation::new(g.rows());
    let pair_fields: Vec<Vec<BigRational>> = pairs
        .iter()
        .map(|p| pair_field(&g, &cond, p).expect("family pairs satisfy their certificates"))
        .collect();
    let weights: Vec<BigRational> = (0..pairs.len()).map(weight).collect();
    let mut field = LyapunovField { values: Vec::new(), pairs, pair_fields, weights };
    field.values = field.weighted_sum();
    field
}

#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovCheck {
    pub monotone: bool,
    /// Cells incident to an edge along which the field is constant.
    pub critical_set: CellSet,
    pub separates_components: bool,
    /// Edges along which the field decreases.
    pub violations: Vec<(usize, usize)>,
    pub pass: bool,
}

pub fn verify_lyapunov<T: PartialOrd>(f: &Relation, eps: Eps, field: &[T]) -> Result<LyapunovCheck> {
    let n = f.cell_count();
    if field.len() != n {
        return Err(Error::Precondition(format!("field has {} values for {n} cells", field.len())));
    }
    let chain = chain_analysis(f, eps);
    let g = dilate(f, eps, Dilation::OneSided);
    let mut critical_set = CellSet::empty(n);
    let mut violations = Vec::new();
    for (x, y) in g.edges() {
        match field[y].partial_cmp(&field[x]) {
            Some(std::cmp::Ordering::Greater) => {}
            Some(std::cmp::Ordering::Equal) => {
                critical_set.insert(x);
                critical_set.insert(y);
            }
            _ => violations.push((x, y)),
        }
    }
    let reps: Vec<&T> = chain.components.iter().map(|c| &field[c.first().expect("nonempty")]).collect();
    let separates_components =
        (0..reps.len()).all(|i| (i + 1..reps.len()).all(|j| reps[i].partial_cmp(reps[j]) != Some(std::cmp::Ordering::Equal)));
    let monotone = violations.is_empty();
    let pass = monotone && separates_components && critical_set == chain.recurrent;
    Ok(LyapunovCheck { monotone, critical_set, separates_components, violations, pass })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Superlevel {
    pub set: CellSet,
    pub inward: bool,
}

/// `{c : field(c) ≥ a}` together with its inwardness.
pub fn sublevel_inward(f: &Relation, field: &[BigRational], a: f64) -> Result<Superlevel> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Precondition(format!("level {a} is outside (0, 1)")));
    }
    if field.len() != f.cell_count() {
        return Err(Error::Precondition("field size does not match the space".into()));
    }
    let level = BigRational::from_float(a).expect("finite level");
    let set = CellSet::from_cells(f.cell_count(), (0..field.len()).filter(|&c| field[c] >= level));
    let inward = is_inward(f, &set)?;
    Ok(Superlevel { set, inward })
}
