//! Angle invariants between the two intermediate algebras of a forked
//! system, computed three ways — closed form in the index, the
//! Coxeter-number formula for `D_n`, and the fully numeric
//! conditional-expectation pipeline — plus fusion-dimension polynomials and
//! unitary braid-group generators.

use nalgebra::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::fork::{ForkedSystem, ForkError};
use crate::graphs::{coxeter_number, GraphError};
use crate::paths::{
    conditional_expectation, generated_subalgebra, MultiMatrix, TowerError,
};
use crate::report::VerificationReport;

#[derive(Debug, Error)]
pub enum AngleError {
    #[error("index {0} outside the range 1 < index < 4")]
    IndexOutOfRange(f64),
    #[error("the formula needs n >= 4, got {0}")]
    RankTooSmall(usize),
    #[error("numeric angle needs working level >= 2, got {0}")]
    LevelTooSmall(usize),
    #[error("braid generator count {requested} exceeds the {available} projections available")]
    TooManyGenerators { requested: usize, available: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Fork(#[from] ForkError),
}

/// How an angle value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleMethod {
    ClosedForm,
    GhjFormula,
    Numeric,
}

/// An angle between intermediate algebras: `lambda` is the squared cosine,
/// `angle = arccos(sqrt(lambda))` in radians. Indices at or below 2 give no
/// noncommuting pair; such inputs yield `degenerate = true` with angle 0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AngleResult {
    pub lambda: f64,
    pub angle: f64,
    pub method: AngleMethod,
    pub degenerate: bool,
}

/// The polynomials `T_k` with `T_0 = 0`, `T_1 = 1`,
/// `T_(k+2) = T_(k+1) - x T_k`; `T_(2k+1)(1/d) d^k` is the dimension of the
/// k-th fusion power.
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    match k {
        0 => 0.0,
        1 => 1.0,
        _ => {
            let (mut prev, mut cur) = (0.0, 1.0);
            for _ in 1..k {
                let next = cur - x * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Dimensions `dim V_k = index^k T_(2k+1)(1/index)` of the bimodule fusion
/// powers, `k = 0..=max_k`. In particular `dims[1] = index - 1` and
/// `dims[2] = index^2 - 3 index + 1`.
#[derive(Debug, Clone, Serialize)]
pub struct FusionDims {
    pub index: f64,
    pub dims: Vec<f64>,
}

pub fn fusion_dims(index: f64, max_k: usize) -> Result<FusionDims, AngleError> {
    if !(index > 1.0) {
        return Err(AngleError::IndexOutOfRange(index));
    }
    let dims = (0..=max_k)
        .map(|k| index.powi(k as i32) * chebyshev_t(2 * k + 1, index.recip()))
        .collect();
    Ok(FusionDims { index, dims })
}

/// Dimension `index * (index - 1)` of the product bimodule, equal to
/// `1 + 2 dims[1] + dims[2]` (the `V_0 + 2 V_1 + V_2` decomposition). Only
/// meaningful for `1 < index < 4`.
pub fn pq_module_dim(index: f64) -> Result<f64, AngleError> {
    if !(index > 1.0 && index < 4.0) {
        return Err(AngleError::IndexOutOfRange(index));
    }
    Ok(index * (index - 1.0))
}

/// The unique nontrivial angle for lower index `1 < index < 4`:
/// `arccos(1/(index - 1))`. Indices at or below 2 make the arccos argument
/// reach 1 and return the degenerate (angle 0) result.
pub fn angle_closed_form(index: f64) -> Result<AngleResult, AngleError> {
    if !(index > 1.0 && index < 4.0) {
        return Err(AngleError::IndexOutOfRange(index));
    }
    if index <= 2.0 {
        return Ok(AngleResult {
            lambda: 1.0,
            angle: 0.0,
            method: AngleMethod::ClosedForm,
            degenerate: true,
        });
    }
    let cosine = (index - 1.0).recip();
    Ok(AngleResult {
        lambda: cosine * cosine,
        angle: cosine.acos(),
        method: AngleMethod::ClosedForm,
        degenerate: false,
    })
}

/// The `D_n` angle through the Coxeter number: with
/// `index = 4 cos^2(pi/(2n-2))`, the angle is `arccos(1/(index - 1))`.
/// Agrees with [`angle_closed_form`] at that index.
pub fn angle_ghj(n: usize) -> Result<AngleResult, AngleError> {
    if n < 4 {
        return Err(AngleError::RankTooSmall(n));
    }
    let index = dn_index(n);
    let cosine = (index - 1.0).recip();
    Ok(AngleResult {
        lambda: cosine * cosine,
        angle: cosine.acos(),
        method: AngleMethod::GhjFormula,
        degenerate: false,
    })
}

/// Lower index of the `D_n` fork system: `4 cos^2(pi/(2n-2))`.
pub fn dn_index(n: usize) -> f64 {
    4.0 * (std::f64::consts::PI / (2.0 * n as f64 - 2.0)).cos().powi(2)
}

/// The set of angle values realized by the fork systems:
/// `arccos(1/(4 cos^2(pi/2k) - 1))` for `k = 3..=max_k`, ascending toward
/// `arccos(1/3)`.
pub fn angle_spectrum_set(max_k: usize) -> Vec<f64> {
    (3..=max_k)
        .map(|k| {
            let index = 4.0 * (std::f64::consts::PI / (2.0 * k as f64)).cos().powi(2);
            (index - 1.0).recip().acos()
        })
        .collect()
}

/// Outcome of the numeric angle pipeline, together with the diagnostic
/// residual checks it performed.
#[derive(Debug, Clone)]
pub struct NumericAngle {
    pub result: AngleResult,
    pub tau: f64,
    /// Lower index `1/tau`.
    pub index: f64,
    /// Fitted proportionality constant in `E_Q(x) = c y`; the expected value
    /// is `-tau/(1-tau)`.
    pub fit_constant: f64,
    pub report: VerificationReport,
}

/// Computes the angle numerically in the path model at the given working
/// level:
///
/// * `x = (p - tau)/(1 - tau)` and `y = (q - tau)/(1 - tau)` are the
///   trace-zero parts of the fork projections;
/// * `P` and `Q` are the subalgebras generated by `(p, e_1, ..)` and
///   `(q, e_1, ..)` up to the working level;
/// * `E_Q(x)` must equal `-(tau/(1-tau)) y`, and the Rayleigh quotient
///   `lambda = <E_P E_Q E_P x, x> / <x, x>` must equal `(tau/(1-tau))^2`.
///
/// The returned report carries the residuals of these identities at
/// tolerance `tol`; the angle itself is `arccos(sqrt(lambda))`.
pub fn angle_numeric(
    fs: &ForkedSystem,
    level: usize,
    tol: f64,
) -> Result<NumericAngle, AngleError> {
    if level < 2 {
        return Err(AngleError::LevelTooSmall(level));
    }
    let tower = fs.tower();
    if level > tower.depth() {
        return Err(TowerError::LevelOutOfRange {
            target: level,
            depth: tower.depth(),
        }
        .into());
    }
    let tau = fs.tau();
    let ratio = tau / (1.0 - tau);
    let p = fs.p_at(level)?;
    let q = fs.q_at(level)?;
    let jones: Vec<MultiMatrix<f64>> = (1..level)
        .map(|i| fs.jones_at(i, level))
        .collect::<Result<_, _>>()?;
    let identity = MultiMatrix::identity(tower, level);
    let x = p.sub(&identity.scaled(tau)).scaled((1.0 - tau).recip());
    let y = q.sub(&identity.scaled(tau)).scaled((1.0 - tau).recip());

    let cap = tower.level(level).dimension();
    let mut p_gens = vec![p.clone()];
    p_gens.extend(jones.iter().cloned());
    let mut q_gens = vec![q.clone()];
    q_gens.extend(jones.iter().cloned());
    let p_basis = generated_subalgebra(tower, level, &p_gens, cap)?;
    let q_basis = generated_subalgebra(tower, level, &q_gens, cap)?;
    let n_basis = generated_subalgebra(tower, level, &jones, cap)?;

    let mut report = VerificationReport::new();
    // x normalization: operator norm 1 (spectrum {1, -tau/(1-tau)}) and
    // squared trace norm tau/(1-tau).
    report.check("x.max_entry_one", (x.norm_max() - 1.0).abs(), tol);
    report.check(
        "x.trace_square",
        (x.inner(&x) - ratio).abs(),
        tol,
    );
    report.check(
        "y.trace_square",
        (y.inner(&y) - ratio).abs(),
        tol,
    );
    // x is trace-orthogonal to the Jones subalgebra.
    let en_x = conditional_expectation(&n_basis, &x)?;
    report.check("x.orthogonal_to_n", en_x.hs_norm(), tol);

    // E_Q(x) = c y with c = -tau/(1-tau).
    let eq_x = conditional_expectation(&q_basis, &x)?;
    let fit_constant = eq_x.inner(&y) / y.inner(&y);
    let fit_residual = eq_x.sub(&y.scaled(fit_constant)).hs_norm();
    report.check("eq_x.proportional_to_y", fit_residual, tol);
    report.check("eq_x.constant", (fit_constant + ratio).abs(), tol);

    // lambda as a Rayleigh quotient of E_P E_Q E_P on x (E_P x = x).
    let ep_eq_x = conditional_expectation(&p_basis, &eq_x)?;
    let lambda = ep_eq_x.inner(&x) / x.inner(&x);
    report.check(
        "lambda.matches_formula",
        (lambda - ratio * ratio).abs(),
        tol,
    );
    // The composite really acts as a scalar on x.
    report.check(
        "lambda.rayleigh_residual",
        ep_eq_x.sub(&x.scaled(lambda)).hs_norm(),
        tol,
    );

    let clamped = lambda.clamp(0.0, 1.0);
    Ok(NumericAngle {
        result: AngleResult {
            lambda: clamped,
            angle: clamped.sqrt().acos(),
            method: AngleMethod::Numeric,
            degenerate: false,
        },
        tau,
        index: tau.recip(),
        fit_constant,
        report,
    })
}

/// Which fork projection, if any, extends the braid generators as `g_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BraidExtension {
    None,
    P,
    Q,
}

type C64 = Complex<f64>;

/// Unitary braid generators `g_i = (t + 1) e_i - 1` with `t = exp(2 pi i/h)`
/// and `h` the Coxeter number of the tower's graph, at the working level.
/// With an extension, `g_0 = (t + 1) p - 1` (or `q`) is prefixed: the two
/// fork projections extend the representation in two different ways.
pub fn braid_generators(
    fs: &ForkedSystem,
    extension: BraidExtension,
    count: usize,
) -> Result<Vec<MultiMatrix<C64>>, AngleError> {
    let tower = fs.tower();
    let level = fs.working_level();
    let available = level - 1;
    if count > available {
        return Err(AngleError::TooManyGenerators {
            requested: count,
            available,
        });
    }
    let h = coxeter_number(tower.graph())? as f64;
    let t = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / h);
    let coeff = t + C64::new(1.0, 0.0);
    let identity = MultiMatrix::<C64>::identity(tower, level);
    let to_generator = |e: &MultiMatrix<f64>| -> MultiMatrix<C64> {
        e.to_complex().scaled(coeff).sub(&identity)
    };
    let mut out = Vec::new();
    match extension {
        BraidExtension::None => {}
        BraidExtension::P => out.push(to_generator(&fs.p_at(level)?)),
        BraidExtension::Q => out.push(to_generator(&fs.q_at(level)?)),
    }
    for i in 1..=count {
        out.push(to_generator(&fs.jones_at(i, level)?));
    }
    Ok(out)
}

/// Unitarity, braid relation, and far commutation residuals for the given
/// generator list (indexing follows the list order, so an extension's `g_0`
/// participates in the adjacent braid relation with `g_1`).
pub fn verify_braid(gens: &[MultiMatrix<C64>], tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new();
    if gens.is_empty() {
        return report;
    }
    let identity = MultiMatrix::<C64>::identity(gens[0].tower(), gens[0].level());
    for (i, g) in gens.iter().enumerate() {
        report.check(
            format!("unitary.g{i}"),
            g.mul(&g.adjoint()).sub(&identity).norm_max(),
            tol,
        );
    }
    for (i, pair) in gens.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        report.check(
            format!("braid.g{}_g{}", i, i + 1),
            a.mul(b).mul(a).sub(&b.mul(a).mul(b)).norm_max(),
            tol,
        );
    }
    for i in 0..gens.len() {
        for j in i + 2..gens.len() {
            report.check(
                format!("commutes.g{i}_g{j}"),
                gens[i].mul(&gens[j]).sub(&gens[j].mul(&gens[i])).norm_max(),
                tol,
            );
        }
    }
    report
}
