//! Major and minor arcs for `f(alpha)^2 g(alpha)`.
//!
//! The major arcs are the neighbourhoods `|alpha - a/q| <= W/X` of reduced
//! fractions with `q <= W`. The arcs around `0/1` and `1/1` are the two halves
//! of one arc about the origin once `[0, 1)` is read modulo 1; each is kept as
//! a separate half-arc so the measures add up on `[0, 1)`.

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::euler_phi;
use crate::density::singular_series_additive;
use crate::error::{invalid, violation, Error, Result};
use crate::expsum::{
    f_on_grid, g_on_grid, gauss_sum, phase, phase_ratio, square_sum_near_rational,
    square_sum_on_grid, v_integral, OscillatoryIntegral, ThetaParams,
};
use crate::quad::{pairwise_sum, pairwise_sum_complex, GaussLegendre};

/// Neighbourhood of `a/q` of half-width `half_width`, clipped to `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FareyArc {
    pub a: u64,
    pub q: u64,
    pub center: f64,
    pub half_width: f64,
}

impl FareyArc {
    /// Range of `beta = alpha - a/q` covered inside `[0, 1)`.
    pub fn beta_range(&self) -> (f64, f64) {
        if self.a == 0 {
            (0.0, self.half_width)
        } else if self.a == self.q {
            (-self.half_width, 0.0)
        } else {
            (-self.half_width, self.half_width)
        }
    }

    pub fn measure(&self) -> f64 {
        let (lo, hi) = self.beta_range();
        hi - lo
    }

    /// Whether `alpha` (taken in `[0, 1)`) lies on this arc.
    pub fn contains(&self, alpha: f64) -> bool {
        if !(0.0..1.0).contains(&alpha) {
            return false;
        }
        let (lo, hi) = self.beta_range();
        let beta = alpha - self.center;
        lo <= beta && beta <= hi
    }
}

/// All major arcs for given `(X, W)` with the measure of the complement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcSystem {
    pub major: Vec<FareyArc>,
    pub x: f64,
    pub w: f64,
    pub minor_measure: f64,
}

impl ArcSystem {
    pub fn major_measure(&self) -> f64 {
        self.major.iter().map(FareyArc::measure).sum()
    }

    pub fn half_width(&self) -> f64 {
        self.w / self.x
    }

    /// The arc containing `alpha`, if any.
    pub fn locate(&self, alpha: f64) -> Option<&FareyArc> {
        let i = self.major.partition_point(|arc| arc.center < alpha);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter_map(|k| self.major.get(k))
            .find(|arc| arc.contains(alpha))
    }

    /// `(2W/X) sum_{q <= W} phi(q)`.
    pub fn phi_measure(&self) -> f64 {
        let total: u64 = (1..=self.w.floor() as u64).map(|q| euler_phi(q).unwrap()).sum();
        2.0 * self.half_width() * total as f64
    }
}

/// Reduced fractions `a/q` in `[0, 1]` with `q <= W`, each with half-width `W/X`.
///
/// Distinct centres are at least `1/W^2` apart, so the arcs are disjoint
/// when `2W^3 < X`; anything else is rejected.
pub fn build_major_arcs(x: f64, w: f64) -> Result<ArcSystem> {
    if !x.is_finite() || !w.is_finite() || x <= 0.0 {
        return Err(invalid!("arc parameters must be finite with X > 0"));
    }
    if w < 1.0 {
        return Err(invalid!("W = {w} must be at least 1"));
    }
    if 2.0 * w * w * w >= x {
        return Err(invalid!("W = {w} is too large for X = {x}: arcs would overlap (need 2W^3 < X)"));
    }
    let half_width = w / x;
    let qmax = w.floor() as u64;
    let mut major = Vec::new();
    for q in 1..=qmax {
        for a in 0..=q {
            if a.gcd(&q) == 1 {
                major.push(FareyArc {
                    a,
                    q,
                    center: a as f64 / q as f64,
                    half_width,
                });
            }
        }
    }
    major.sort_by(|l, r| (l.a * r.q).cmp(&(r.a * l.q)));
    for pair in major.windows(2) {
        if pair[1].center - pair[0].center <= 2.0 * half_width {
            return Err(violation!(
                "arcs at {}/{} and {}/{} overlap",
                pair[0].a,
                pair[0].q,
                pair[1].a,
                pair[1].q
            ));
        }
    }
    let measure: f64 = major.iter().map(FareyArc::measure).sum();
    Ok(ArcSystem {
        major,
        x,
        w,
        minor_measure: 1.0 - measure,
    })
}

fn check_on_arc(alpha: f64, arc: &FareyArc) -> Result<f64> {
    if !arc.contains(alpha) {
        return Err(invalid!("alpha = {alpha} is not on the arc at {}/{}", arc.a, arc.q));
    }
    Ok(alpha - arc.center)
}

fn normalized_gauss(arc: &FareyArc) -> Result<Complex64> {
    Ok(gauss_sum(arc.q, arc.a as i64)? / arc.q as f64)
}

/// `f*(alpha) = q^{-1} S(q, a) v(alpha - a/q)`.
pub fn f_star(alpha: f64, arc: &FareyArc, params: &ThetaParams) -> Result<Complex64> {
    let beta = check_on_arc(alpha, arc)?;
    Ok(normalized_gauss(arc)? * v_integral(beta, params)?)
}

/// `g*(alpha) = q^{-1} S(q, a) Y`.
pub fn g_star(alpha: f64, arc: &FareyArc, params: &ThetaParams) -> Result<Complex64> {
    check_on_arc(alpha, arc)?;
    Ok(normalized_gauss(arc)? * params.y as f64)
}

/// Largest `|f(alpha) - f*(alpha)|` over `samples` equally spaced points of
/// every major arc.
pub fn f_star_gap(params: &ThetaParams, system: &ArcSystem, samples: usize) -> Result<f64> {
    let samples = samples.max(2);
    let gaps = system
        .major
        .par_iter()
        .map(|arc| {
            let (lo, hi) = arc.beta_range();
            let gauss = normalized_gauss(arc)?;
            let v = OscillatoryIntegral::new(params);
            let mut worst = 0.0f64;
            for k in 0..samples {
                let beta = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
                let f = square_sum_near_rational(params.outer_start()..=params.p, arc.a, arc.q, beta);
                worst = worst.max((f - gauss * v.eval(beta)?).norm());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

/// Quadrature rule for `J(n; W) = Y int_{-W/X}^{W/X} v(beta)^2 e(-beta n) d beta`.
///
/// Nodes and `v(beta)^2` are computed once; each `n` then costs one pass.
/// Panels have width at most `1/(12X)`, so `e(-beta n)` turns by less than
/// `pi/4` across a panel for `n <= 1.5 X`.
#[derive(Clone, Debug)]
pub struct SingularIntegral {
    y: f64,
    x: f64,
    nodes: Vec<(f64, Complex64)>,
}

pub const SINGULAR_INTEGRAL_ORDER: usize = 10;

impl SingularIntegral {
    pub fn new(params: &ThetaParams, w: f64) -> Result<Self> {
        if !(w > 0.0) || !w.is_finite() {
            return Err(invalid!("W = {w} must be positive"));
        }
        let x = params.x;
        let bound = w / x;
        if bound > 1.0 {
            return Err(invalid!("W/X = {bound} exceeds 1"));
        }
        let panels = ((2.0 * bound * 12.0 * x).ceil() as usize).max(1);
        let rule = GaussLegendre::new(SINGULAR_INTEGRAL_ORDER);
        let v = OscillatoryIntegral::new(params);
        let nodes = rule
            .composite(-bound, bound, panels)
            .into_par_iter()
            .map(|(beta, weight)| {
                let value = v.eval(beta)?;
                Ok((beta, weight * value * value))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            y: params.y as f64,
            x,
            nodes,
        })
    }

    /// `J(n; W)` together with the imaginary part of the quadrature.
    pub fn eval_complex(&self, n: u64) -> Complex64 {
        let terms: Vec<Complex64> = self
            .nodes
            .iter()
            .map(|&(beta, wv)| wv * phase(-beta * n as f64))
            .collect();
        pairwise_sum_complex(&terms) * self.y
    }

    /// `J(n; W)`; the imaginary part must be below `1e-6 Y`.
    pub fn eval(&self, n: u64) -> Result<f64> {
        let z = self.eval_complex(n);
        if z.im.abs() >= 1e-6 * self.y {
            return Err(violation!("J({n}) has imaginary part {:e}", z.im));
        }
        Ok(z.re)
    }

    pub fn scale(&self) -> f64 {
        self.x
    }
}

/// `J(n; W)` for `X/2 < n <= X`.
pub fn singular_integral(n: u64, w: f64, params: &ThetaParams) -> Result<f64> {
    check_n_in_window(n, params)?;
    SingularIntegral::new(params, w)?.eval(n)
}

fn check_n_in_window(n: u64, params: &ThetaParams) -> Result<()> {
    let nf = n as f64;
    if !(nf > params.x / 2.0 && nf <= params.x) {
        return Err(invalid!("n = {n} must lie in (X/2, X] with X = {}", params.x));
    }
    Ok(())
}

/// `Y int_{W1/X <= |beta| <= W2/X} |v(beta)|^2 d beta`.
pub fn singular_integral_tail(params: &ThetaParams, w1: f64, w2: f64) -> Result<f64> {
    if !(0.0 <= w1 && w1 <= w2) {
        return Err(invalid!("need 0 <= W1 <= W2"));
    }
    let (lo, hi) = (w1 / params.x, w2 / params.x);
    if hi == lo {
        return Ok(0.0);
    }
    let panels = ((12.0 * (hi - lo) * params.x).ceil() as usize).max(1);
    let v = OscillatoryIntegral::new(params);
    let terms = GaussLegendre::new(SINGULAR_INTEGRAL_ORDER)
        .composite(lo, hi, panels)
        .into_par_iter()
        .map(|(beta, weight)| Ok(weight * (v.eval(beta)?.norm_sqr() + v.eval(-beta)?.norm_sqr())))
        .collect::<Result<Vec<f64>>>()?;
    Ok(params.y as f64 * pairwise_sum(&terms))
}

/// Area of `{(g1, g2) in [P/2, P]^2 : g1^2 + g2^2 <= t}`.
pub fn quarter_annulus_area(p: f64, t: f64) -> f64 {
    let lo = 0.5 * p;
    let inner = |g: f64| {
        let rest = t - g * g;
        if rest <= lo * lo {
            0.0
        } else {
            (rest.sqrt().min(p) - lo).max(0.0)
        }
    };
    let mut cuts = vec![lo, p];
    for c in [t - lo * lo, t - p * p] {
        if c > 0.0 {
            let r = c.sqrt();
            if r > lo && r < p {
                cuts.push(r);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let rule = GaussLegendre::new(20);
    cuts.windows(2)
        .map(|c| {
            rule.composite(c[0], c[1], 64)
                .into_iter()
                .map(|(g, wt)| wt * inner(g))
                .sum::<f64>()
        })
        .sum()
}

/// Smoothed count `area{|g1^2 + g2^2 - n| <= D} / (2D)` with `D = X/W`,
/// the archimedean density that `J(n; W)/Y` approximates.
pub fn singular_integral_area_oracle(n: u64, w: f64, params: &ThetaParams) -> f64 {
    let p = params.p as f64;
    let delta = params.x / w;
    let n = n as f64;
    (quarter_annulus_area(p, n + delta) - quarter_annulus_area(p, n - delta)) / (2.0 * delta)
}

/// Node layout for the major-arc quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Resolution {
    /// Panels per `1/(8X)` of arc.
    pub refinement: usize,
    /// Gauss-Legendre points per panel.
    pub order: usize,
}

impl Resolution {
    pub const STANDARD: Self = Self {
        refinement: 1,
        order: 8,
    };
    pub const HIGH: Self = Self {
        refinement: 2,
        order: 16,
    };
}

/// Largest number of nodes a major-arc quadrature may use.
pub const MAJOR_NODE_BUDGET: usize = 1 << 24;

#[derive(Clone, Copy, Debug)]
struct MajorNode {
    a: u64,
    q: u64,
    beta: f64,
    /// weight times `f(alpha)^2 g(alpha)`
    weighted: Complex64,
}

/// `int_P f(alpha)^2 g(alpha) e(-n alpha) d alpha` by per-arc Gauss-Legendre.
///
/// `f` and `g` are evaluated at `a/q + beta` with the rational phase reduced
/// exactly, and `f^2 g` is stored so many `n` can share one set of nodes.
#[derive(Clone, Debug)]
pub struct MajorArcIntegrator {
    params: ThetaParams,
    system: ArcSystem,
    nodes: Vec<MajorNode>,
}

/// One evaluation of the major-arc integral and its prediction `S(n; W) J(n; W)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorArcComparison {
    pub n: u64,
    pub integral: f64,
    pub integral_imag: f64,
    pub singular_series: f64,
    pub singular_integral: f64,
    pub predicted: f64,
    pub difference: f64,
}

impl MajorArcIntegrator {
    pub fn new(params: &ThetaParams, w: f64, resolution: Resolution) -> Result<Self> {
        let system = build_major_arcs(params.x, w)?;
        let x = params.x;
        let rule = GaussLegendre::new(resolution.order);
        let mut layout = Vec::new();
        for arc in &system.major {
            let (lo, hi) = arc.beta_range();
            let panels = ((hi - lo) * 8.0 * x).ceil().max(1.0) as usize * resolution.refinement;
            layout.push((*arc, rule.composite(lo, hi, panels)));
        }
        let total: usize = layout.iter().map(|(_, v)| v.len()).sum();
        if total > MAJOR_NODE_BUDGET {
            return Err(Error::Convergence(format!(
                "major-arc quadrature needs {total} nodes, budget {MAJOR_NODE_BUDGET}"
            )));
        }
        let outer = params.outer_start()..=params.p;
        let inner = 1..=params.y;
        let nodes = layout
            .into_par_iter()
            .flat_map_iter(|(arc, points)| {
                let outer = outer.clone();
                let inner = inner.clone();
                points.into_iter().map(move |(beta, weight)| {
                    let f = square_sum_near_rational(outer.clone(), arc.a, arc.q, beta);
                    let g = square_sum_near_rational(inner.clone(), arc.a, arc.q, beta);
                    MajorNode {
                        a: arc.a,
                        q: arc.q,
                        beta,
                        weighted: weight * f * f * g,
                    }
                })
            })
            .collect();
        Ok(Self {
            params: *params,
            system,
            nodes,
        })
    }

    pub fn system(&self) -> &ArcSystem {
        &self.system
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn integral(&self, n: u64) -> Complex64 {
        let terms: Vec<Complex64> = self
            .nodes
            .iter()
            .map(|node| {
                let na = ((n % node.q) as u128 * node.a as u128 % node.q as u128) as u64;
                let rational = phase_ratio((node.q - na) % node.q, node.q);
                node.weighted * rational * phase(-node.beta * n as f64)
            })
            .collect();
        pairwise_sum_complex(&terms)
    }

    /// Integral, `S(n; W) J(n; W)` and their difference.
    pub fn compare(&self, n: u64, j: &SingularIntegral) -> Result<MajorArcComparison> {
        check_n_in_window(n, &self.params)?;
        let z = self.integral(n);
        let singular_series = singular_series_additive(n, self.system.w)?;
        let singular_integral = j.eval(n)?;
        let predicted = singular_series * singular_integral;
        Ok(MajorArcComparison {
            n,
            integral: z.re,
            integral_imag: z.im,
            singular_series,
            singular_integral,
            predicted,
            difference: z.re - predicted,
        })
    }
}

/// Major-arc integral for one `n` with the comparison against `S(n; W) J(n; W)`.
pub fn major_arc_value(n: u64, params: &ThetaParams, w: f64) -> Result<MajorArcComparison> {
    let integrator = MajorArcIntegrator::new(params, w, Resolution::STANDARD)?;
    let j = SingularIntegral::new(params, w)?;
    integrator.compare(n, &j)
}

/// `int |f|^4 |g|^2` over the minor arcs and over all of `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinorArcMoment {
    pub x: f64,
    pub y: u64,
    pub w: f64,
    pub grid: usize,
    pub minor: f64,
    pub full: f64,
    /// `X Y log X + X Y^2 / W`
    pub reference: f64,
    pub ratio: f64,
}

pub const MAX_MOMENT_X: f64 = 1e6;

/// Grid-point indices `j` with `j/N` on some major arc.
fn major_mask(system: &ArcSystem, grid: usize) -> Vec<bool> {
    let mut mask = vec![false; grid];
    let nf = grid as f64;
    for arc in &system.major {
        let (lo, hi) = arc.beta_range();
        let start = ((arc.center + lo) * nf).ceil() as i64;
        let end = ((arc.center + hi) * nf).floor() as i64;
        for j in start..=end {
            let idx = j.rem_euclid(grid as i64) as usize;
            let alpha = idx as f64 / nf;
            if arc.contains(alpha) {
                mask[idx] = true;
            }
        }
    }
    mask
}

/// `int_p |f(alpha)^4 g(alpha)^2| d alpha` on the uniform grid of `8X` points.
///
/// The grid exceeds twice the largest frequency of `|f|^4 |g|^2`, so the
/// full-interval value is exact up to rounding.
pub fn minor_arc_moment(params: &ThetaParams, w: f64) -> Result<MinorArcMoment> {
    if params.x > MAX_MOMENT_X {
        return Err(Error::OutOfRange(format!("X = {} exceeds {MAX_MOMENT_X}", params.x)));
    }
    let system = build_major_arcs(params.x, w)?;
    let grid = (8.0 * params.x).ceil() as usize;
    let f = f_on_grid(params, grid);
    let mut integrand: Vec<f64> = f.into_iter().map(|z| z.norm_sqr().powi(2)).collect();
    let g = g_on_grid(params, grid);
    for (v, z) in integrand.iter_mut().zip(g) {
        *v *= z.norm_sqr();
    }
    let full = pairwise_sum(&integrand) / grid as f64;
    let mask = major_mask(&system, grid);
    for (v, on_major) in integrand.iter_mut().zip(mask) {
        if on_major {
            *v = 0.0;
        }
    }
    let minor = pairwise_sum(&integrand) / grid as f64;
    let (x, y) = (params.x, params.y as f64);
    let reference = x * y * x.ln() + x * y * y / w;
    Ok(MinorArcMoment {
        x,
        y: params.y,
        w,
        grid,
        minor,
        full,
        reference,
        ratio: minor / reference,
    })
}

/// Smallest grid on which `f^2 g e(-n alpha)` integrates exactly.
pub fn orthogonality_grid(params: &ThetaParams) -> usize {
    (2 * (2 * params.p * params.p + params.y * params.y) + 1) as usize
}

/// `(1/N) sum_j f(j/N)^2 g(j/N) e(-n j/N)`, which on a large enough grid is
/// the number of `(x1, x2, x3)` with `P/2 < x1, x2 <= P`, `1 <= x3 <= Y` and
/// `x1^2 + x2^2 + x3^2 = n`.
pub fn orthogonality_integral(params: &ThetaParams, n: u64, grid: Option<usize>) -> Result<Complex64> {
    let min = orthogonality_grid(params);
    let grid = grid.unwrap_or(min);
    if grid < min {
        return Err(invalid!("grid {grid} is below the exactness threshold {min}"));
    }
    let f = f_on_grid(params, grid);
    let g = g_on_grid(params, grid);
    let terms: Vec<Complex64> = f
        .iter()
        .zip(&g)
        .enumerate()
        .map(|(j, (&fj, &gj))| {
            let nj = (n as u128 * j as u128 % grid as u128) as u64;
            fj * fj * gj * phase_ratio((grid as u64 - nj) % grid as u64, grid as u64)
        })
        .collect();
    Ok(pairwise_sum_complex(&terms) / grid as f64)
}

/// `int_0^1 |g(alpha)|^4 d alpha` for `g = sum_{y <= Y} e(alpha y^2)`, on a
/// grid of `8Y^2 + 1` points.
pub fn fourth_moment_g(y: u64) -> Result<f64> {
    if y == 0 {
        return Err(invalid!("Y must be positive"));
    }
    let grid = (8 * y * y + 1) as usize;
    let g = square_sum_on_grid(1..=y, grid);
    let terms: Vec<f64> = g.iter().map(|z| z.norm_sqr().powi(2)).collect();
    Ok(pairwise_sum(&terms) / grid as f64)
}
