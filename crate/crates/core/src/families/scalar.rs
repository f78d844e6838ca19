//! Scalar inequalities behind the family proofs, and the grid maximizers
//! that check their numerical claims.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid points per axis for the parametrized maximizations.
pub const DEFAULT_GRID_POINTS: usize = 400;

const GOLDEN_ITERS: usize = 80;

/// `(a + b)(a x² + b y²) - a b (x + y)²`, which equals `(a x - b y)²`.
pub fn basic_inequality_gap(a: f64, b: f64, x: f64, y: f64) -> f64 {
    (a + b) * (a * x * x + b * y * y) - a * b * (x + y).powi(2)
}

/// Left-hand side `√((a1²-a2²)² + 4b1²(a1+a2)²) + √((a1²-a2²)² + 4b2²(a1+a2)²)`
/// for non-negative arguments with `a1² + a2² + b1² + b2² = 1/4`.
pub fn scalar_inequality_check(a1: f64, a2: f64, b1: f64, b2: f64) -> Result<f64> {
    if [a1, a2, b1, b2].iter().any(|&v| v.is_nan() || v < 0.0) {
        return Err(Error::Parameter("arguments must be non-negative".into()));
    }
    let norm = (a1 * a1 + a2 * a2 + b1 * b1 + b2 * b2 - 0.25).abs();
    if norm > 1e-10 {
        return Err(Error::Constraint {
            trace_a: 0.0,
            trace_b: 0.0,
            norm,
        });
    }
    let diff = (a1 * a1 - a2 * a2).powi(2);
    let sum = (a1 + a2).powi(2);
    Ok((diff + 4.0 * b1 * b1 * sum).sqrt() + (diff + 4.0 * b2 * b2 * sum).sqrt())
}

/// The Case 5 quantity `Λ(|a1|, |a2|, |a3|, |a4|, |b1|²)`, valid when
/// `|b1|² <= 3/16 - (3/4) Σ|a_j|²`.
pub fn case5_lambda(a_mag: [f64; 4], b1_sq: f64) -> Result<f64> {
    if a_mag.iter().any(|&v| v.is_nan() || v < 0.0) || b1_sq.is_nan() || b1_sq < 0.0 {
        return Err(Error::Parameter("magnitudes must be non-negative".into()));
    }
    let [a1, a2, a3, a4] = a_mag;
    let sum_sq: f64 = a_mag.iter().map(|v| v * v).sum();
    let limit = 3.0 / 16.0 - 0.75 * sum_sq;
    if b1_sq > limit + 1e-12 {
        return Err(Error::Parameter(format!("|b1|^2 = {b1_sq:.6e} exceeds {limit:.6e}")));
    }
    let r1 = ((a1 * a1 - a2 * a2).powi(2) + 4.0 * b1_sq * (a1 + a2).powi(2)).sqrt();
    let r2 = ((a3 * a3 - a4 * a4).powi(2) + 4.0 * b1_sq * (a3 + a4).powi(2)).sqrt();
    Ok(0.5 * (sum_sq + 4.0 * b1_sq + r1 + r2))
}

/// `f1(d, x, g)` of the `(x, d, g, h)` parametrization.
pub fn case5_f1(d: f64, x: f64, g: f64) -> f64 {
    let s = (2.0 * g).sin();
    let (c0, c1, c2) = f1_coefficients(d, x);
    c0 + c1 * s + c2 * s * s
}

/// `f2(d, x, h)` of the `(x, d, g, h)` parametrization.
pub fn case5_f2(d: f64, x: f64, h: f64) -> f64 {
    let s = (2.0 * h).sin();
    let (c0, c1, c2) = f2_coefficients(d, x);
    c0 + c1 * s + c2 * s * s
}

fn f1_coefficients(d: f64, x: f64) -> (f64, f64, f64) {
    let x2 = x * x;
    let c2d = (2.0 * d).cos();
    (
        3.0 - 10.0 * x2 + 2.0 * x2 * c2d,
        3.0 - 12.0 * x2,
        -2.0 * x2 - 2.0 * x2 * c2d,
    )
}

fn f2_coefficients(d: f64, x: f64) -> (f64, f64, f64) {
    let x2 = x * x;
    let c2d = (2.0 * d).cos();
    (
        3.0 - 10.0 * x2 - 2.0 * x2 * c2d,
        3.0 - 12.0 * x2,
        -2.0 * x2 + 2.0 * x2 * c2d,
    )
}

fn case5_from_f(x: f64, d: f64, f1: f64, f2: f64) -> f64 {
    (3.0 - 8.0 * x * x + 2.0 * x * d.cos() * f1.max(0.0).sqrt() + 2.0 * x * d.sin() * f2.max(0.0).sqrt()) / 8.0
}

/// `Λ` at the extremal `|b1|²`, written in `(x, d, g, h)` with
/// `|a1| = x cos d cos g`, `|a2| = x cos d sin g`, `|a3| = x sin d cos h`,
/// `|a4| = x sin d sin h`.
pub fn case5_parametrized(x: f64, d: f64, g: f64, h: f64) -> f64 {
    case5_from_f(x, d, case5_f1(d, x, g), case5_f2(d, x, h))
}

/// `(1/√(4 + (8/3)cos²d), 1/√(4 + (8/3)sin²d))`: where the maximizing `sin 2g`
/// and `sin 2h` leave the boundary value 1.
pub fn case5_x_breakpoints(d: f64) -> (f64, f64) {
    let c = d.cos();
    let s = d.sin();
    (
        1.0 / (4.0 + 8.0 / 3.0 * c * c).sqrt(),
        1.0 / (4.0 + 8.0 / 3.0 * s * s).sqrt(),
    )
}

/// The `x` ranges of the three subcases (with `d ∈ [0, π/4]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case5Range {
    /// `x ∈ [0, 1/2]`.
    Full,
    /// `x ∈ [0, lo(d)]`.
    Subcase1,
    /// `x ∈ [lo(d), hi(d)]`.
    Subcase2,
    /// `x ∈ [hi(d), 1/2]`.
    Subcase3,
    /// `x ∈ [lo(d), 1/2]`.
    Subcases2And3,
}

impl Case5Range {
    pub fn x_interval(self, d: f64) -> (f64, f64) {
        let (lo, hi) = case5_x_breakpoints(d);
        match self {
            Case5Range::Full => (0.0, 0.5),
            Case5Range::Subcase1 => (0.0, lo),
            Case5Range::Subcase2 => (lo, hi),
            Case5Range::Subcase3 => (hi, 0.5),
            Case5Range::Subcases2And3 => (lo, 0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Case5Max {
    pub range: Case5Range,
    pub grid_points: usize,
    /// Best value on the grid before refinement.
    pub grid_value: f64,
    pub value: f64,
    pub x: f64,
    pub d: f64,
    pub g: f64,
    pub h: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |k| if k + 1 == n { hi } else { lo + step * k as f64 })
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`; returns the best
/// point evaluated, including the bracket ends.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo));
    let fb = f(hi);
    if fb > best.1 {
        best = (hi, fb);
    }
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fe = f(e);
    for _ in 0..iters {
        if fc > best.1 {
            best = (c, fc);
        }
        if fe > best.1 {
            best = (e, fe);
        }
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = f(e);
        }
    }
    for (p, v) in [(c, fc), (e, fe)] {
        if v > best.1 {
            best = (p, v);
        }
    }
    best
}

/// Maximizes the Case 5 bound over `d ∈ [0, π/4]`, `g, h ∈ [0, π/2]` and the
/// `x` range of `range`, on an `n`-point grid per axis followed by one
/// golden-section pass along each axis around the grid argmax.
///
/// The bound depends on `g` only through `f1` and on `h` only through `f2`,
/// and grows with both, so the `g` and `h` axes are maximized independently;
/// the result equals the maximum over the full four-dimensional grid.
pub fn case5_grid_max(range: Case5Range, n: usize) -> Case5Max {
    assert!(n >= 2, "grid needs at least two points per axis");
    let angles: Vec<f64> = linspace(0.0, FRAC_PI_2, n).collect();
    let sines: Vec<f64> = angles.iter().map(|g| (2.0 * g).sin()).collect();
    let best_quadratic = |(c0, c1, c2): (f64, f64, f64)| {
        let mut arg = 0;
        let mut val = f64::NEG_INFINITY;
        for (k, &s) in sines.iter().enumerate() {
            let v = c0 + c1 * s + c2 * s * s;
            if v > val {
                val = v;
                arg = k;
            }
        }
        (arg, val)
    };

    let mut best = Case5Max {
        range,
        grid_points: n,
        grid_value: f64::NEG_INFINITY,
        value: f64::NEG_INFINITY,
        x: 0.0,
        d: 0.0,
        g: 0.0,
        h: 0.0,
    };
    for d in linspace(0.0, FRAC_PI_4, n) {
        let (xlo, xhi) = range.x_interval(d);
        if xlo > xhi {
            continue;
        }
        for x in linspace(xlo, xhi, n) {
            let (gk, f1) = best_quadratic(f1_coefficients(d, x));
            let (hk, f2) = best_quadratic(f2_coefficients(d, x));
            let v = case5_from_f(x, d, f1, f2);
            if v > best.grid_value {
                best.grid_value = v;
                best.x = x;
                best.d = d;
                best.g = angles[gk];
                best.h = angles[hk];
            }
        }
    }
    best.value = best.grid_value;

    let step_d = FRAC_PI_4 / (n - 1) as f64;
    let step_a = FRAC_PI_2 / (n - 1) as f64;
    let in_range = |x: f64, d: f64| {
        let (lo, hi) = range.x_interval(d);
        x >= lo && x <= hi
    };

    let (xlo, xhi) = range.x_interval(best.d);
    let step_x = (xhi - xlo) / (n - 1) as f64;
    let (x, v) = golden_section_max(
        |x| case5_parametrized(x, best.d, best.g, best.h),
        (best.x - step_x).max(xlo),
        (best.x + step_x).min(xhi),
        GOLDEN_ITERS,
    );
    if v > best.value {
        best.x = x;
        best.value = v;
    }
    let (d, v) = golden_section_max(
        |d| {
            if in_range(best.x, d) {
                case5_parametrized(best.x, d, best.g, best.h)
            } else {
                f64::NEG_INFINITY
            }
        },
        (best.d - step_d).max(0.0),
        (best.d + step_d).min(FRAC_PI_4),
        GOLDEN_ITERS,
    );
    if v > best.value {
        best.d = d;
        best.value = v;
    }
    let (g, v) = golden_section_max(
        |g| case5_parametrized(best.x, best.d, g, best.h),
        (best.g - step_a).max(0.0),
        (best.g + step_a).min(FRAC_PI_2),
        GOLDEN_ITERS,
    );
    if v > best.value {
        best.g = g;
        best.value = v;
    }
    let (h, v) = golden_section_max(
        |h| case5_parametrized(best.x, best.d, best.g, h),
        (best.h - step_a).max(0.0),
        (best.h + step_a).min(FRAC_PI_2),
        GOLDEN_ITERS,
    );
    if v > best.value {
        best.h = h;
        best.value = v;
    }
    best
}

/// `f(x1, x2) = 1/d + x1² - x2² + 2(x1 + x2)√(1/(2d) - (x1² + x2²)/2)`.
pub fn family2_d5_objective(x1: f64, x2: f64, d: usize) -> Result<f64> {
    if !(x1 >= 0.0 && x2 >= 0.0) {
        return Err(Error::Parameter("x1 and x2 must be non-negative".into()));
    }
    if d == 0 {
        return Err(Error::Dimension {
            d,
            reason: "d must be positive",
        });
    }
    let df = d as f64;
    let radicand = 0.5 / df - 0.5 * (x1 * x1 + x2 * x2);
    if radicand < -1e-15 {
        return Err(Error::Parameter(format!("x1² + x2² exceeds 1/{d}")));
    }
    Ok(1.0 / df + x1 * x1 - x2 * x2 + 2.0 * (x1 + x2) * radicand.max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D5Max {
    pub d: usize,
    pub grid_points: usize,
    pub grid_value: f64,
    pub value: f64,
    pub x1: f64,
    pub x2: f64,
}

/// Maximizes `f(x1, x2)` over the quarter disc `x1, x2 >= 0`,
/// `x1² + x2² <= 1/d` on an `n × n` polar grid, then one golden-section pass
/// along the radius and the angle.
pub fn family2_d5_grid_max(d: usize, n: usize) -> Result<D5Max> {
    assert!(n >= 2, "grid needs at least two points per axis");
    if d == 0 {
        return Err(Error::Dimension {
            d,
            reason: "d must be positive",
        });
    }
    let r_max = (1.0 / d as f64).sqrt();
    let eval = |r: f64, t: f64| {
        let r = r.clamp(0.0, r_max);
        family2_d5_objective(r * t.cos(), r * t.sin(), d).unwrap_or(f64::NEG_INFINITY)
    };
    let (mut br, mut bt, mut bv) = (0.0, 0.0, f64::NEG_INFINITY);
    let thetas: Vec<f64> = linspace(0.0, FRAC_PI_2, n).collect();
    for r in linspace(0.0, r_max, n) {
        for &t in &thetas {
            let v = eval(r, t);
            if v > bv {
                (br, bt, bv) = (r, t, v);
            }
        }
    }
    let grid_value = bv;
    let step_r = r_max / (n - 1) as f64;
    let step_t = FRAC_PI_2 / (n - 1) as f64;
    let (r, v) = golden_section_max(
        |r| eval(r, bt),
        (br - step_r).max(0.0),
        (br + step_r).min(r_max),
        GOLDEN_ITERS,
    );
    if v > bv {
        (br, bv) = (r, v);
    }
    let (t, v) = golden_section_max(
        |t| eval(br, t),
        (bt - step_t).max(0.0),
        (bt + step_t).min(FRAC_PI_2),
        GOLDEN_ITERS,
    );
    if v > bv {
        (bt, bv) = (t, v);
    }
    Ok(D5Max {
        d,
        grid_points: n,
        grid_value,
        value: bv,
        x1: br * bt.cos(),
        x2: br * bt.sin(),
    })
}
