use serde::Serialize;

use super::constants::{derived_constants, rho0, tau};
use super::verify::{verify_map, MapVerification};
use super::{Branch, Family, FreeParams, TransformMap, TwoDimModel};
use crate::error::{Error, Result};
use crate::model::PuParams;

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(what.into()))
    }
}

fn free_a_y(free: &FreeParams) -> Result<f64> {
    free.a_y
        .ok_or_else(|| Error::PreconditionViolated("family a needs a_y".into()))
}

fn free_b_x(free: &FreeParams) -> Result<f64> {
    free.b_x
        .ok_or_else(|| Error::PreconditionViolated("Tb1 needs b_x".into()))
}

fn free_b_y(free: &FreeParams) -> Result<f64> {
    free.b_y
        .ok_or_else(|| Error::PreconditionViolated("Tb2 needs b_y".into()))
}

/// The tabulated closed forms, transcribed as printed. These are reference
/// data: several rows do not satisfy the defining identities (see
/// [`reconcile_family`]).
pub fn reference_family(family: Family, branch: Branch, free: FreeParams, params: &PuParams) -> Result<TransformMap> {
    let (alpha, beta) = (params.alpha(), params.beta());
    let (ax, g) = (free.a_x, free.g);
    require(ax != 0.0 && ax.is_finite(), "a_x must be finite and nonzero")?;
    let s = branch.sign();
    let r0 = s * rho0(params);

    let (model, mu0, mu2, nu0, nu2) = match family {
        Family::Ta1 | Family::Ta2 => {
            let ay = free_a_y(&free)?;
            require(ay != 0.0 && ay.is_finite(), "family a needs a_y != 0")?;
            let mu2 = 1.0 / (2.0 * ax);
            let nu2 = 1.0 / (2.0 * ay);
            if family == Family::Ta1 {
                let bx = ax / 2.0 * (alpha - 2.0 * g / ay + r0);
                let by = ay / 2.0 * (alpha - 2.0 * g / ax + r0);
                let mu0 = (alpha + r0) / (2.0 * ax);
                let nu0 = (alpha + r0) / (2.0 * ay);
                (
                    TwoDimModel {
                        a_x: ax,
                        a_y: ay,
                        b_x: bx,
                        b_y: by,
                        g,
                    },
                    mu0,
                    mu2,
                    nu0,
                    nu2,
                )
            } else {
                let probe = TwoDimModel {
                    a_x: ax,
                    a_y: ay,
                    b_x: 0.0,
                    b_y: 0.0,
                    g,
                };
                let c = derived_constants(&probe, params)?;
                let rg = if s > 0.0 { c.rho_g_plus } else { c.rho_g_minus };
                let bx = (alpha + rg) / (2.0 * ax);
                let by = (alpha + rg) / (2.0 * ay);
                let mu0 = (alpha - 2.0 * g / ay + rg) / (2.0 * ax);
                let nu0 = (alpha - 2.0 * g / ax + rg) / (2.0 * ay);
                (
                    TwoDimModel {
                        a_x: ax,
                        a_y: ay,
                        b_x: bx,
                        b_y: by,
                        g,
                    },
                    mu0,
                    mu2,
                    nu0,
                    nu2,
                )
            }
        }
        Family::Tb1 => {
            let bx = free_b_x(&free)?;
            let t = tau(ax, bx, params);
            require(t != 0.0, "Tb1 needs tau != 0")?;
            require(g != 0.0, "Tb1 needs g != 0")?;
            let mu0 = (alpha - bx / ax) / ax;
            let ay = -ax * g / (t * t);
            let by = g / t * (bx - ax * alpha);
            let nu0 = t / (g * ax * ax);
            (
                TwoDimModel {
                    a_x: ax,
                    a_y: ay,
                    b_x: bx,
                    b_y: by,
                    g,
                },
                mu0,
                1.0 / ax,
                nu0,
                0.0,
            )
        }
        Family::Tb2 => {
            let by = free_b_y(&free)?;
            require(by != 0.0, "Tb2 needs b_y != 0")?;
            let bx = g * g / by + ax / 2.0 * (alpha + r0);
            let mu0 = 2.0 * beta / (ax * (alpha + r0));
            let nu0 = 2.0 * beta * g / (ax * by * (alpha + r0));
            let nu2 = -g / (ax * by);
            (
                TwoDimModel {
                    a_x: ax,
                    a_y: 0.0,
                    b_x: bx,
                    b_y: by,
                    g,
                },
                mu0,
                1.0 / ax,
                nu0,
                nu2,
            )
        }
    };
    Ok(TransformMap::new(family, branch, mu0, mu2, nu0, nu2, model, *params))
}

/// Solves the coefficient-matching conditions directly.
///
/// Family a is normalised so that each equation maps to `phi_PU / 2`
/// (`mu2 = 1/(2 a_x)`, `nu2 = 1/(2 a_y)`); family b maps the first equation to
/// `phi_PU` itself (`mu2 = 1/a_x`). Every returned map satisfies its contract
/// identically.
pub fn solve_family(family: Family, branch: Branch, free: FreeParams, params: &PuParams) -> Result<TransformMap> {
    let (alpha, beta) = (params.alpha(), params.beta());
    let (ax, g) = (free.a_x, free.g);
    if ax == 0.0 || !ax.is_finite() {
        return Err(Error::NoSolution("a_x = 0 leaves no fourth-order term".into()));
    }
    let s = branch.sign();

    let (model, mu0, mu2, nu0, nu2) = match family {
        Family::Ta1 | Family::Ta2 => {
            let ay = free_a_y(&free)?;
            if ay == 0.0 || !ay.is_finite() {
                return Err(Error::NoSolution("family a needs a_y != 0".into()));
            }
            // u = a_x mu0, v = a_y nu0; the difference of the two q-conditions
            // factors as (u - v)(alpha - g/a_x - g/a_y - 2(u + v)) = 0.
            let (u, v) = if family == Family::Ta1 {
                let u = (alpha + s * rho0(params)) / 4.0;
                (u, u)
            } else {
                let probe = TwoDimModel {
                    a_x: ax,
                    a_y: ay,
                    b_x: 0.0,
                    b_y: 0.0,
                    g,
                };
                let rg = derived_constants(&probe, params)?.rho_g_plus;
                (
                    (alpha - 2.0 * g / ay + s * rg) / 4.0,
                    (alpha - 2.0 * g / ax - s * rg) / 4.0,
                )
            };
            let bx = ax * (alpha - g / ay) - 2.0 * ax * u;
            let by = ay * (alpha - g / ax) - 2.0 * ay * v;
            let model = TwoDimModel {
                a_x: ax,
                a_y: ay,
                b_x: bx,
                b_y: by,
                g,
            };
            (model, u / ax, 1.0 / (2.0 * ax), v / ay, 1.0 / (2.0 * ay))
        }
        Family::Tb1 => {
            let bx = free_b_x(&free)?;
            let t = tau(ax, bx, params);
            match (g == 0.0, t == 0.0) {
                (true, true) => return Err(Error::NonUnique { dimension: 2 }),
                (true, false) => return Err(Error::NoSolution("Tb1 with g = 0 needs tau = 0".into())),
                (false, true) => return Err(Error::NoSolution("Tb1 with tau = 0 needs g = 0".into())),
                (false, false) => {}
            }
            let mu0 = (alpha - bx / ax) / ax;
            let nu0 = t / (g * ax * ax);
            let ay = -g * g * ax / t;
            let by = g * g * (bx - ax * alpha) / t;
            (
                TwoDimModel {
                    a_x: ax,
                    a_y: ay,
                    b_x: bx,
                    b_y: by,
                    g,
                },
                mu0,
                1.0 / ax,
                nu0,
                0.0,
            )
        }
        Family::Tb2 => {
            let by = free_b_y(&free)?;
            if by == 0.0 {
                return Err(if g == 0.0 {
                    Error::NonUnique { dimension: 2 }
                } else {
                    Error::NoSolution("Tb2 with g != 0 needs b_y != 0".into())
                });
            }
            let w = ax * (alpha + s * rho0(params)) / 2.0;
            let mu0 = beta / w;
            let nu2 = -g / (ax * by);
            let nu0 = -g * mu0 / by;
            let bx = w + g * g / by;
            (
                TwoDimModel {
                    a_x: ax,
                    a_y: 0.0,
                    b_x: bx,
                    b_y: by,
                    g,
                },
                mu0,
                1.0 / ax,
                nu0,
                nu2,
            )
        }
    };
    Ok(TransformMap::new(family, branch, mu0, mu2, nu0, nu2, model, *params))
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamDelta {
    pub name: &'static str,
    pub reference: f64,
    pub solved: f64,
    pub delta: f64,
}

/// Side-by-side comparison of the tabulated row and the re-derived solution.
#[derive(Debug, Clone, Serialize)]
pub struct Reconciliation {
    pub family: Family,
    pub branch: Branch,
    pub free: FreeParams,
    pub reference: Option<TransformMap>,
    pub reference_error: Option<String>,
    pub reference_verification: Option<MapVerification>,
    pub solved: Option<TransformMap>,
    pub solved_error: Option<String>,
    pub solved_verification: Option<MapVerification>,
    pub deltas: Vec<ParamDelta>,
    /// The tabulated row fails its own contract.
    pub reference_discrepant: bool,
}

fn named(m: &TransformMap) -> [(&'static str, f64); 9] {
    [
        ("a_x", m.model.a_x),
        ("a_y", m.model.a_y),
        ("b_x", m.model.b_x),
        ("b_y", m.model.b_y),
        ("g", m.model.g),
        ("mu0", m.mu0),
        ("mu2", m.mu2),
        ("nu0", m.nu0),
        ("nu2", m.nu2),
    ]
}

pub fn reconcile_family(family: Family, branch: Branch, free: FreeParams, params: &PuParams) -> Reconciliation {
    let reference = reference_family(family, branch, free, params);
    let solved = solve_family(family, branch, free, params);
    let reference_verification = reference.as_ref().ok().map(verify_map);
    let solved_verification = solved.as_ref().ok().map(verify_map);
    let deltas = match (&reference, &solved) {
        (Ok(r), Ok(s)) => named(r)
            .iter()
            .zip(named(s).iter())
            .map(|(&(name, a), &(_, b))| ParamDelta {
                name,
                reference: a,
                solved: b,
                delta: b - a,
            })
            .collect(),
        _ => Vec::new(),
    };
    Reconciliation {
        family,
        branch,
        free,
        reference_discrepant: reference_verification.as_ref().is_some_and(|v| !v.contract_satisfied),
        reference: reference.as_ref().ok().copied(),
        reference_error: reference.err().map(|e| e.to_string()),
        reference_verification,
        solved: solved.as_ref().ok().copied(),
        solved_error: solved.err().map(|e| e.to_string()),
        solved_verification,
        deltas,
    }
}
