//! Normalized Laplacian spectral gaps and the two-inequality property (T) criterion
//! for buildings whose links are a projective plane of order `p + 1` and a
//! generalized quadrangle of order `(p + 1, p - 1)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::diffsets::{difference_set_for_order, is_prime_power};
use crate::graphs::{self, BipartiteGraph};
use crate::group::{is_prime, GroupSpec};
use crate::polygons::heisenberg_quadrangle_subgroups;
use crate::presentations::reflection_connection;
use crate::Error;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Numeric and closed-form gaps must agree to this precision.
pub const CLOSED_FORM_AGREEMENT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGap {
    pub graph: String,
    /// Smallest eigenvalue above the zero threshold.
    pub lambda: f64,
    pub largest: f64,
    pub zero_threshold: f64,
    pub tolerance: f64,
}

/// Full spectrum of `I - D^-1/2 A D^-1/2`, ascending. Isolated vertices contribute 0
/// on the diagonal.
pub fn normalized_laplacian_spectrum(graph: &BipartiteGraph) -> Result<Vec<f64>, Error> {
    let n = graph.vertex_count();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| match graph.degree(v) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        if graph.degree(v) > 0 {
            m[(v, v)] = 1.0;
        }
    }
    for (u, v) in graph.edges() {
        let w = -inv_sqrt[u] * inv_sqrt[v];
        m[(u, v)] = w;
        m[(v, u)] = w;
    }
    let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigensolver(format!("non-finite eigenvalue on {n}x{n} Laplacian")));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Least eigenvalue exceeding `10 * tol` of the normalized Laplacian of a connected graph.
pub fn normalized_laplacian_gap(graph: &BipartiteGraph, name: &str, tol: f64) -> Result<SpectralGap, Error> {
    if graph.vertex_count() < 2 || !graphs::is_connected(graph) {
        return Err(Error::Disconnected);
    }
    let spectrum = normalized_laplacian_spectrum(graph)?;
    let zero_threshold = 10.0 * tol;
    let lambda = spectrum
        .iter()
        .copied()
        .find(|&x| x > zero_threshold)
        .ok_or_else(|| Error::Eigensolver("no positive eigenvalue".into()))?;
    Ok(SpectralGap {
        graph: name.to_string(),
        lambda,
        largest: *spectrum.last().unwrap(),
        zero_threshold,
        tolerance: tol,
    })
}

/// `(lambda_P, lambda_Q) = (1 - sqrt(p+1)/(p+2), 1 - sqrt(2/(p+2)))`.
pub fn lambda_closed_forms(p: u64) -> (f64, f64) {
    let p = p as f64;
    (1.0 - (p + 1.0).sqrt() / (p + 2.0), 1.0 - (2.0 / (p + 2.0)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OppenheimConditions {
    pub condition1: bool,
    /// `lambda_P + 2 lambda_Q - 3/2`.
    pub margin1: f64,
    pub condition2: bool,
    /// `(lambda_P + lambda_Q - 1)^2 + 2 (lambda_P + lambda_Q - 1)(2 lambda_Q - 1)`.
    pub margin2: f64,
    /// Set when a margin is within 1e-12 of zero, where rounding could flip a verdict.
    pub near_zero: bool,
}

pub fn oppenheim_conditions(lambda_p: f64, lambda_q: f64) -> OppenheimConditions {
    let margin1 = lambda_p + 2.0 * lambda_q - 1.5;
    let s = lambda_p + lambda_q - 1.0;
    let margin2 = s * s + 2.0 * s * (2.0 * lambda_q - 1.0);
    OppenheimConditions {
        condition1: margin1 > 0.0,
        margin1,
        condition2: margin2 > 0.0,
        margin2,
        near_zero: margin1.abs() < 1e-12 || margin2.abs() < 1e-12,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KazhdanVerdict {
    pub p: u64,
    #[serde(rename = "lambdaP")]
    pub lambda_p: f64,
    #[serde(rename = "lambdaQ")]
    pub lambda_q: f64,
    pub c1: bool,
    pub c2: bool,
    pub kazhdan: bool,
    pub margin1: f64,
    pub margin2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericGaps>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericGaps {
    pub plane: SpectralGap,
    pub quadrangle: SpectralGap,
}

/// Incidence graph of the plane of order `p + 1` and GQ(p+1, p-1), both as group graphs.
pub fn link_graphs_for(p: u64) -> Result<(BipartiteGraph, BipartiteGraph), Error> {
    let ds = difference_set_for_order(p + 1)?;
    let dihedral = GroupSpec::dihedral(ds.modulus())?;
    let plane = graphs::cayley_graph(&dihedral, &reflection_connection(&dihedral, &ds)?)?;
    let heis = GroupSpec::heisenberg(p)?;
    let quad = graphs::coset_graph(&heis, &heisenberg_quadrangle_subgroups(p)?)?;
    Ok((plane, quad))
}

/// Closed-form verdict; with `numeric`, the gaps are recomputed from the actual
/// link graphs and must agree with the closed forms.
pub fn property_t_report(p: u64, numeric: bool) -> Result<KazhdanVerdict, Error> {
    let (lambda_p, lambda_q) = lambda_closed_forms(p);
    let cond = oppenheim_conditions(lambda_p, lambda_q);
    let mut warnings = Vec::new();
    if !is_prime(p) {
        warnings.push(format!("p = {p} is not prime"));
    }
    if cond.near_zero {
        warnings.push("a margin is within 1e-12 of zero".to_string());
    }
    let numeric = if numeric {
        if p == 2 || !is_prime(p) || !is_prime_power(p + 1) {
            return Err(Error::Precondition(format!(
                "numeric gaps need an odd prime p with p + 1 a prime power, got {p}"
            )));
        }
        let (plane, quad) = link_graphs_for(p)?;
        let plane_gap = normalized_laplacian_gap(&plane, &format!("plane of order {}", p + 1), DEFAULT_TOLERANCE)?;
        let quad_gap = normalized_laplacian_gap(&quad, &format!("GQ({}, {})", p + 1, p - 1), DEFAULT_TOLERANCE)?;
        for (gap, closed) in [(&plane_gap, lambda_p), (&quad_gap, lambda_q)] {
            if (gap.lambda - closed).abs() > CLOSED_FORM_AGREEMENT {
                return Err(Error::SpectralDisagreement {
                    graph: gap.graph.clone(),
                    numeric: gap.lambda,
                    closed_form: closed,
                });
            }
        }
        Some(NumericGaps { plane: plane_gap, quadrangle: quad_gap })
    } else {
        None
    };
    Ok(KazhdanVerdict {
        p,
        lambda_p,
        lambda_q,
        c1: cond.condition1,
        c2: cond.condition2,
        kazhdan: cond.condition1 && cond.condition2,
        margin1: cond.margin1,
        margin2: cond.margin2,
        numeric,
        warnings,
    })
}
