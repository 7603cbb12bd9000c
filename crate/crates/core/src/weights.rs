//! Discretization coefficients and per-level lambda weight vectors.
//!
//! The derivative at t_n is approximated by interpolating g(t) = omega(t)U(t)
//! piecewise: linear on the first subinterval, quadratic on the second, cubic
//! on the rest. Integrating each interpolant against the memory kernel yields
//! the coefficients a, b, c and A_1..A_4 below; collecting them per history
//! node gives the lambda weight vector for each time level.

use crate::error::{Error, Result};
use crate::functions::{ScaleWeightPair, TimeGrid};

/// Lanczos approximation (g = 7, 9 terms). Coefficients are the GNU
/// Scientific Library set.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn lanczos_gamma(x: f64) -> f64 {
    use std::f64::consts::PI;
    if x < 0.5 {
        // reflection keeps the series argument away from zero
        PI / ((PI * x).sin() * lanczos_gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEFFS[0];
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Gamma function on (0, 12], accurate to about 1e-13 relative.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 12.0) {
        return Err(Error::GammaDomain(x));
    }
    Ok(lanczos_gamma(x))
}

/// x^e with the convention 0^e = 0 for e > 0, avoiding NaN from 0^e paths.
#[inline]
fn frac_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

/// Scale differences entering the coefficient at (n, l):
/// z1 = zeta_n - zeta_{l-1}, z0 = zeta_n - zeta_l, d = zeta_l - zeta_{l-1}.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    z1: f64,
    z0: f64,
    d: f64,
}

/// For affine scales the differences are exact multiples of the slope times
/// tau, which also makes the coefficients a function of n - l alone.
fn geometry(pair: &ScaleWeightPair, grid: &TimeGrid, n: usize, l: usize) -> Result<Geometry> {
    debug_assert!(l >= 1 && l <= n);
    let g = if pair.scale().is_affine() {
        let p = match pair.scale() {
            crate::functions::GridFunction1D::Identity => 1.0,
            crate::functions::GridFunction1D::Affine { p, .. } => *p,
            _ => unreachable!(),
        };
        let tau = grid.tau();
        Geometry {
            z1: p * ((n - l + 1) as f64 * tau),
            z0: p * ((n - l) as f64 * tau),
            d: p * tau,
        }
    } else {
        Geometry {
            z1: pair.zeta(n) - pair.zeta(l - 1),
            z0: pair.zeta(n) - pair.zeta(l),
            d: pair.zeta(l) - pair.zeta(l - 1),
        }
    };
    if g.d == 0.0 {
        return Err(Error::DegenerateScale(l - 1, l));
    }
    Ok(g)
}

fn a_kernel(g: Geometry, alpha: f64, alpha0: f64) -> f64 {
    let e1 = 1.0 - alpha;
    alpha0 * ((frac_pow(g.z1, e1) - frac_pow(g.z0, e1)) / g.d)
}

fn b_kernel(g: Geometry, alpha: f64, alpha0: f64) -> f64 {
    let e1 = 1.0 - alpha;
    let e2 = 2.0 - alpha;
    alpha0
        * ((frac_pow(g.z1, e2) - frac_pow(g.z0, e2)) / (e2 * g.d * g.d)
            - 0.5 * (frac_pow(g.z1, e1) + frac_pow(g.z0, e1)) / g.d)
}

fn c_kernel(g: Geometry, alpha: f64, alpha0: f64) -> f64 {
    let e1 = 1.0 - alpha;
    let e2 = 2.0 - alpha;
    let e3 = 3.0 - alpha;
    alpha0
        * ((frac_pow(g.z1, e3) - frac_pow(g.z0, e3)) / (e2 * e3 * g.d * g.d * g.d)
            - frac_pow(g.z0, e2) / (e2 * g.d * g.d)
            - (frac_pow(g.z1, e1) + 2.0 * frac_pow(g.z0, e1)) / (6.0 * g.d))
}

fn a1_kernel(g: Geometry, alpha: f64, alpha0: f64) -> f64 {
    let e1 = 1.0 - alpha;
    let e2 = 2.0 - alpha;
    let e3 = 3.0 - alpha;
    alpha0
        * ((2.0 * frac_pow(g.z1, e1) - 11.0 * frac_pow(g.z0, e1)) / (6.0 * g.d)
            + (frac_pow(g.z1, e2) - 2.0 * frac_pow(g.z0, e2)) / (e2 * g.d * g.d)
            + (frac_pow(g.z1, e3) - frac_pow(g.z0, e3)) / (e2 * e3 * g.d * g.d * g.d))
}

fn a2_kernel(g: Geometry, alpha: f64, alpha0: f64) -> f64 {
    let e1 = 1.0 - alpha;
    let e2 = 2.0 - alpha;
    let e3 = 3.0 - alpha;
    alpha0
        * ((6.0 * frac_pow(g.z0, e1) + frac_pow(g.z1, e1)) / (2.0 * g.d)
            + (5.0 * frac_pow(g.z0, e2) - 2.0 * frac_pow(g.z1, e2)) / (e2 * g.d * g.d)
            + 3.0 * (frac_pow(g.z0, e3) - frac_pow(g.z1, e3)) / (e2 * e3 * g.d * g.d * g.d))
}

fn a3_kernel(g: Geometry, alpha: f64, alpha0: f64) -> f64 {
    let e1 = 1.0 - alpha;
    let e2 = 2.0 - alpha;
    let e3 = 3.0 - alpha;
    alpha0
        * (-(2.0 * frac_pow(g.z1, e1) + 3.0 * frac_pow(g.z0, e1)) / (2.0 * g.d)
            + (frac_pow(g.z1, e2) - 4.0 * frac_pow(g.z0, e2)) / (e2 * g.d * g.d)
            + 3.0 * (frac_pow(g.z1, e3) - frac_pow(g.z0, e3)) / (e2 * e3 * g.d * g.d * g.d))
}

fn a4_kernel(g: Geometry, alpha: f64, alpha0: f64) -> f64 {
    let e1 = 1.0 - alpha;
    let e2 = 2.0 - alpha;
    let e3 = 3.0 - alpha;
    alpha0
        * ((frac_pow(g.z1, e1) + 2.0 * frac_pow(g.z0, e1)) / (6.0 * g.d)
            + frac_pow(g.z0, e2) / (e2 * g.d * g.d)
            + (frac_pow(g.z0, e3) - frac_pow(g.z1, e3)) / (e2 * e3 * g.d * g.d * g.d))
}

fn alpha0_at(pair: &ScaleWeightPair, alpha: f64) -> impl Fn(usize) -> f64 + '_ {
    let inv_gamma = 1.0 / lanczos_gamma(2.0 - alpha);
    move |n: usize| inv_gamma / pair.omega(n)
}

/// a_{n-l}: linear-interpolant coefficient, 1 <= l <= n.
pub fn coeff_a(n: usize, l: usize, pair: &ScaleWeightPair, grid: &TimeGrid, alpha: f64) -> Result<f64> {
    Ok(a_kernel(geometry(pair, grid, n, l)?, alpha, alpha0_at(pair, alpha)(n)))
}

/// b_{n-l}: quadratic-interpolant coefficient, 2 <= l <= n.
pub fn coeff_b(n: usize, l: usize, pair: &ScaleWeightPair, grid: &TimeGrid, alpha: f64) -> Result<f64> {
    Ok(b_kernel(geometry(pair, grid, n, l)?, alpha, alpha0_at(pair, alpha)(n)))
}

/// c_{n-l}: third-difference coefficient of the cubic interpolant, 3 <= l <= n.
pub fn coeff_c(n: usize, l: usize, pair: &ScaleWeightPair, grid: &TimeGrid, alpha: f64) -> Result<f64> {
    Ok(c_kernel(geometry(pair, grid, n, l)?, alpha, alpha0_at(pair, alpha)(n)))
}

/// A_{i,n-l} for i in 1..=4: nodal-form cubic coefficients, 3 <= l <= n.
pub fn coeff_big_a(
    i: usize,
    n: usize,
    l: usize,
    pair: &ScaleWeightPair,
    grid: &TimeGrid,
    alpha: f64,
) -> Result<f64> {
    let g = geometry(pair, grid, n, l)?;
    let a0 = alpha0_at(pair, alpha)(n);
    Ok(match i {
        1 => a1_kernel(g, alpha, a0),
        2 => a2_kernel(g, alpha, a0),
        3 => a3_kernel(g, alpha, a0),
        4 => a4_kernel(g, alpha, a0),
        _ => return Err(Error::Config(format!("coefficient index A_{i} is not in 1..=4"))),
    })
}

/// All coefficients needed at time level n, indexed by the distance j = n - l.
#[derive(Debug, Clone)]
pub struct KernelCoefficients {
    pub n: usize,
    pub alpha: f64,
    /// 1 / (omega_n * Gamma(2 - alpha))
    pub alpha0: f64,
    /// a[j] for j = 0..n (l = n..1)
    pub a: Vec<f64>,
    /// b[j] for j = 0..n-1 (l = n..2); empty for n < 2
    pub b: Vec<f64>,
    /// c[j] for j = 0..n-2 (l = n..3); empty for n < 3
    pub c: Vec<f64>,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub a3: Vec<f64>,
    pub a4: Vec<f64>,
}

impl KernelCoefficients {
    pub fn compute(n: usize, pair: &ScaleWeightPair, grid: &TimeGrid, alpha: f64) -> Result<Self> {
        assert!(n >= 1 && n <= grid.subintervals());
        let alpha0 = alpha0_at(pair, alpha)(n);
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n.saturating_sub(1));
        let mut c = Vec::with_capacity(n.saturating_sub(2));
        let (mut a1, mut a2, mut a3, mut a4) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for j in 0..n {
            let l = n - j;
            let g = geometry(pair, grid, n, l)?;
            a.push(a_kernel(g, alpha, alpha0));
            if l >= 2 {
                b.push(b_kernel(g, alpha, alpha0));
            }
            if l >= 3 {
                c.push(c_kernel(g, alpha, alpha0));
                a1.push(a1_kernel(g, alpha, alpha0));
                a2.push(a2_kernel(g, alpha, alpha0));
                a3.push(a3_kernel(g, alpha, alpha0));
                a4.push(a4_kernel(g, alpha, alpha0));
            }
        }
        Ok(KernelCoefficients {
            n,
            alpha,
            alpha0,
            a,
            b,
            c,
            a1,
            a2,
            a3,
            a4,
        })
    }
}

/// Which piecewise branch of the weight tables produced a lambda vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaProvenance {
    N1,
    N2,
    N3,
    N4,
    N5,
    /// the n >= 6 case display
    General,
}

/// Per-level weight vector: the derivative at t_n is
/// sum_{l=0}^{n} lambda[l] * omega_{n-l} * U_{n-l}.
#[derive(Debug, Clone)]
pub struct LambdaWeights {
    pub n: usize,
    pub lambda: Vec<f64>,
    pub provenance: LambdaProvenance,
}

impl LambdaWeights {
    fn from_coefficients(k: &KernelCoefficients) -> Self {
        let n = k.n;
        let (a, b) = (&k.a, &k.b);
        let (a1, a2, a3, a4) = (&k.a1, &k.a2, &k.a3, &k.a4);
        let (lambda, provenance) = match n {
            1 => (vec![a[0], -a[0]], LambdaProvenance::N1),
            2 => (
                vec![a[0] + b[0], a[1] - a[0] - 2.0 * b[0], -a[1] + b[0]],
                LambdaProvenance::N2,
            ),
            3 => (
                vec![
                    a1[0],
                    a2[0] + a[1] + b[1],
                    a3[0] + a[2] - a[1] - 2.0 * b[1],
                    a4[0] - a[2] + b[1],
                ],
                LambdaProvenance::N3,
            ),
            4 => (
                vec![
                    a1[0],
                    a1[1] + a2[0],
                    a2[1] + a3[0] + a[2] + b[2],
                    a3[1] + a4[0] + a[3] - a[2] - 2.0 * b[2],
                    a4[1] - a[3] + b[2],
                ],
                LambdaProvenance::N4,
            ),
            5 => (
                vec![
                    a1[0],
                    a1[1] + a2[0],
                    a1[2] + a2[1] + a3[0],
                    a2[2] + a3[1] + a4[0] + a[3] + b[3],
                    a3[2] + a4[1] + a[4] - a[3] - 2.0 * b[3],
                    a4[2] - a[4] + b[3],
                ],
                LambdaProvenance::N5,
            ),
            _ => {
                let mut lambda = vec![0.0; n + 1];
                lambda[0] = a1[0];
                lambda[1] = a1[1] + a2[0];
                lambda[2] = a1[2] + a2[1] + a3[0];
                for l in 3..=n - 3 {
                    lambda[l] = a1[l] + a2[l - 1] + a3[l - 2] + a4[l - 3];
                }
                lambda[n - 2] = a[n - 2] + b[n - 2] + a2[n - 3] + a3[n - 4] + a4[n - 5];
                lambda[n - 1] =
                    a[n - 1] - a[n - 2] - 2.0 * b[n - 2] + a3[n - 3] + a4[n - 4];
                lambda[n] = -a[n - 1] + b[n - 2] + a4[n - 3];
                (lambda, LambdaProvenance::General)
            }
        };
        LambdaWeights {
            n,
            lambda,
            provenance,
        }
    }
}

/// Build the lambda weight vector for time level n from the piecewise tables.
pub fn lambda_weights(
    n: usize,
    pair: &ScaleWeightPair,
    grid: &TimeGrid,
    alpha: f64,
) -> Result<LambdaWeights> {
    let k = KernelCoefficients::compute(n, pair, grid, alpha)?;
    Ok(LambdaWeights::from_coefficients(&k))
}

/// Incremental lambda construction across time levels.
///
/// For affine scales the scale-dependent part of every coefficient depends on
/// n - l only, so it is cached once and reused at every level; only the
/// 1/omega_n prefactor changes. For general scales every level is recomputed.
/// Both paths evaluate the same kernels on the same inputs.
pub struct LambdaBuilder<'a> {
    pair: &'a ScaleWeightPair,
    grid: &'a TimeGrid,
    alpha: f64,
    inv_gamma: f64,
    /// unity-prefactor coefficient values by distance j, for affine scales
    cache: Option<CoeffCache>,
}

#[derive(Default)]
struct CoeffCache {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    a1: Vec<f64>,
    a2: Vec<f64>,
    a3: Vec<f64>,
    a4: Vec<f64>,
}

impl<'a> LambdaBuilder<'a> {
    pub fn new(pair: &'a ScaleWeightPair, grid: &'a TimeGrid, alpha: f64) -> Self {
        let cache = pair.scale().is_affine().then(CoeffCache::default);
        LambdaBuilder {
            pair,
            grid,
            alpha,
            inv_gamma: 1.0 / lanczos_gamma(2.0 - alpha),
            cache,
        }
    }

    pub fn lambda(&mut self, n: usize) -> Result<LambdaWeights> {
        match &mut self.cache {
            None => lambda_weights(n, self.pair, self.grid, self.alpha),
            Some(cache) => {
                // grow the j-indexed arrays up to what level n needs
                while cache.a.len() < n {
                    let j = cache.a.len();
                    // the cached value is scale-only: alpha0 = 1
                    let g = geometry(self.pair, self.grid, j + 1, 1)?;
                    cache.a.push(a_kernel(g, self.alpha, 1.0));
                    cache.b.push(b_kernel(g, self.alpha, 1.0));
                    cache.c.push(c_kernel(g, self.alpha, 1.0));
                    cache.a1.push(a1_kernel(g, self.alpha, 1.0));
                    cache.a2.push(a2_kernel(g, self.alpha, 1.0));
                    cache.a3.push(a3_kernel(g, self.alpha, 1.0));
                    cache.a4.push(a4_kernel(g, self.alpha, 1.0));
                }
                let alpha0 = self.inv_gamma / self.pair.omega(n);
                let scaled = |v: &[f64], len: usize| -> Vec<f64> {
                    v[..len].iter().map(|x| alpha0 * x).collect()
                };
                let k = KernelCoefficients {
                    n,
                    alpha: self.alpha,
                    alpha0,
                    a: scaled(&cache.a, n),
                    b: scaled(&cache.b, n.saturating_sub(1).min(cache.b.len())),
                    c: scaled(&cache.c, n.saturating_sub(2).min(cache.c.len())),
                    a1: scaled(&cache.a1, n.saturating_sub(2).min(cache.a1.len())),
                    a2: scaled(&cache.a2, n.saturating_sub(2).min(cache.a2.len())),
                    a3: scaled(&cache.a3, n.saturating_sub(2).min(cache.a3.len())),
                    a4: scaled(&cache.a4, n.saturating_sub(2).min(cache.a4.len())),
                };
                Ok(LambdaWeights::from_coefficients(&k))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{validate_pair, GridFunction1D};

    fn pair_on(scale: GridFunction1D, weight: GridFunction1D, t: f64, n: usize) -> (ScaleWeightPair, TimeGrid) {
        let grid = TimeGrid::new(t, n).unwrap();
        let pair = ScaleWeightPair::on_grid(scale, weight, &grid).unwrap();
        (pair, grid)
    }

    fn classical(t: f64, n: usize) -> (ScaleWeightPair, TimeGrid) {
        pair_on(GridFunction1D::Identity, GridFunction1D::constant_one(), t, n)
    }

    #[test]
    fn gamma_reference_values() {
        // mpmath, 20 digits
        let cases = [
            (0.5, 1.7724538509055160273),
            (1.0, 1.0),
            (1.2, 0.91816874239976062243),
            (1.5, 0.88622692545275801365),
            (2.0, 1.0),
            (3.75, 4.4229884104602505629),
            (5.5, 52.342777784553520181),
            (6.8, 496.60607757369068898),
            (7.5, 1871.2543057977883465),
            (9.0, 40320.0),
            (10.3, 716430.68906237640663),
            (11.999, 39819417.47930386014),
            (12.0, 39916800.0),
            (0.001, 999.4237724845954453),
        ];
        for (x, expect) in cases {
            let got = gamma(x).unwrap();
            assert!(
                ((got - expect) / expect).abs() <= 1e-13,
                "gamma({x}) = {got}, want {expect}"
            );
        }
    }

    #[test]
    fn gamma_domain_errors() {
        assert!(matches!(gamma(0.0), Err(Error::GammaDomain(_))));
        assert!(matches!(gamma(-1.5), Err(Error::GammaDomain(_))));
        assert!(matches!(gamma(12.5), Err(Error::GammaDomain(_))));
    }

    #[test]
    fn coeff_a_unit_cases() {
        let (pair, grid) = classical(1.0, 1);
        let a0 = coeff_a(1, 1, &pair, &grid, 0.5).unwrap();
        assert!((a0 - 1.1283791670955126).abs() <= 1e-13);

        let (pair, grid) = classical(2.0, 2); // tau = 1
        // (sqrt(2) - 1) / Gamma(1.5)
        let a1 = coeff_a(2, 1, &pair, &grid, 0.5).unwrap();
        assert!((a1 - 0.46738995451021814).abs() <= 1e-13);
    }

    #[test]
    fn coeff_scale_inversely_with_weight() {
        // alpha0 carries 1/omega_n, so a, b, c all scale by 1/k
        let make = |k: f64| {
            pair_on(
                GridFunction1D::Exponential { k: 1.0 },
                GridFunction1D::Affine { p: 0.0, q: k },
                1.0,
                6,
            )
        };
        let (p1, g1) = make(1.0);
        let (p5, g5) = make(5.0);
        for (n, l) in [(4, 1), (5, 3), (6, 6)] {
            let ratio_a =
                coeff_a(n, l, &p1, &g1, 0.3).unwrap() / coeff_a(n, l, &p5, &g5, 0.3).unwrap();
            assert!((ratio_a - 5.0).abs() < 1e-12);
            if l >= 3 {
                let ratio_c =
                    coeff_c(n, l, &p1, &g1, 0.3).unwrap() / coeff_c(n, l, &p5, &g5, 0.3).unwrap();
                assert!((ratio_c - 5.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coeff_b_unit_cases() {
        let (pair, grid) = classical(2.0, 2);
        let b0 = coeff_b(2, 2, &pair, &grid, 0.5).unwrap();
        assert!((b0 - 0.18806319451591878).abs() <= 1e-13);

        // b_0 > 0 for every alpha in (0,1)
        for i in 1..20 {
            let alpha = i as f64 / 20.0;
            let b0 = coeff_b(2, 2, &pair, &grid, alpha).unwrap();
            assert!(b0 > 0.0, "alpha={alpha}: b0={b0}");
        }

        // Lemma ordering: b_1 < b_0 at n = 3
        let (pair, grid) = classical(3.0, 3);
        let b0 = coeff_b(3, 3, &pair, &grid, 0.5).unwrap();
        let b1 = coeff_b(3, 2, &pair, &grid, 0.5).unwrap();
        assert!(b1 < b0);
    }

    #[test]
    fn coeff_c_unit_cases() {
        let (pair, grid) = classical(3.0, 3);
        let c0 = coeff_c(3, 3, &pair, &grid, 0.5).unwrap();
        // (1/Gamma(1.5)) * (4/15 - 1/6)
        assert!((c0 - 0.11283791670955126).abs() <= 1e-13);

        // c = -A4 term by term
        let (pair, grid) = pair_on(
            GridFunction1D::Exponential { k: 0.7 },
            GridFunction1D::Affine { p: 0.5, q: 1.0 },
            1.0,
            8,
        );
        // the sum cancels algebraically; roundoff scales with the largest
        // intermediate term, which carries a 1/delta^3 amplification
        let alpha = 0.4;
        for n in 3..=8 {
            for l in 3..=n {
                let c = coeff_c(n, l, &pair, &grid, alpha).unwrap();
                let a4 = coeff_big_a(4, n, l, &pair, &grid, alpha).unwrap();
                let z1 = pair.zeta(n) - pair.zeta(l - 1);
                let d = pair.zeta(l) - pair.zeta(l - 1);
                let amp = z1.powf(3.0 - alpha) / ((2.0 - alpha) * (3.0 - alpha) * d * d * d);
                let tol = 100.0 * f64::EPSILON * (amp + c.abs());
                assert!((c + a4).abs() <= tol, "n={n} l={l}: {} vs {tol}", (c + a4).abs());
            }
        }
    }

    #[test]
    fn big_a_matches_difference_form() {
        // (A1, A2, A3, A4) == (a+b+c, -a-2b-3c, b+3c, -c)
        let (pair, grid) = pair_on(
            GridFunction1D::Power { sigma: 2.0 },
            GridFunction1D::Exponential { k: 1.0 },
            1.0,
            10,
        );
        for alpha in [0.2, 0.5, 0.9] {
            for n in 3..=10 {
                for l in 3..=n {
                    let a = coeff_a(n, l, &pair, &grid, alpha).unwrap();
                    let b = coeff_b(n, l, &pair, &grid, alpha).unwrap();
                    let c = coeff_c(n, l, &pair, &grid, alpha).unwrap();
                    let big: Vec<f64> = (1..=4)
                        .map(|i| coeff_big_a(i, n, l, &pair, &grid, alpha).unwrap())
                        .collect();
                    let expect = [a + b + c, -a - 2.0 * b - 3.0 * c, b + 3.0 * c, -c];
                    // both sides cancel algebraically; roundoff follows the
                    // 1/delta^3-amplified intermediate terms
                    let z1 = pair.zeta(n) - pair.zeta(l - 1);
                    let d = pair.zeta(l) - pair.zeta(l - 1);
                    let amp =
                        z1.powf(3.0 - alpha) / ((2.0 - alpha) * (3.0 - alpha) * d * d * d);
                    let scale = big.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
                    let tol = (1e-12 * scale).max(100.0 * f64::EPSILON * amp);
                    for (got, want) in big.iter().zip(expect) {
                        assert!(
                            (got - want).abs() <= tol,
                            "n={n} l={l} alpha={alpha}: {got} vs {want}"
                        );
                    }
                    // constant-interpolant identity
                    let row_sum: f64 = big.iter().sum();
                    assert!(row_sum.abs() <= tol);
                }
            }
        }
    }

    #[test]
    fn big_a_unit_value() {
        // A1 at n = l = 3, tau = 1, alpha = 0.5 equals a0 + b0 + c0
        let (pair, grid) = classical(3.0, 3);
        let a1 = coeff_big_a(1, 3, 3, &pair, &grid, 0.5).unwrap();
        let expect = 1.1283791670955126 + 0.18806319451591878 + 0.11283791670955126;
        assert!((a1 - expect).abs() <= 1e-13);
        // same thing written as alpha0 * (1/3 + 2/3 + 4/15)
        let alpha0 = 1.0 / gamma(1.5).unwrap();
        assert!((a1 - alpha0 * (1.0 + 4.0 / 15.0)).abs() <= 1e-13);

        let a2 = coeff_big_a(2, 3, 3, &pair, &grid, 0.5).unwrap();
        let a0 = 1.1283791670955126;
        let b0 = 0.18806319451591878;
        let c0 = 0.11283791670955126;
        assert!((a2 - (-a0 - 2.0 * b0 - 3.0 * c0)).abs() <= 1e-12);
    }

    #[test]
    fn lambda_n1_table() {
        let (pair, grid) = classical(1.0, 1);
        let w = lambda_weights(1, &pair, &grid, 0.5).unwrap();
        assert_eq!(w.provenance, LambdaProvenance::N1);
        assert!((w.lambda[0] - 1.1283791670955126).abs() <= 1e-13);
        assert!((w.lambda[1] + 1.1283791670955126).abs() <= 1e-13);
    }

    /// Independent construction: accumulate each interval's interpolant
    /// contribution into per-node coefficients and read lambda off the result.
    fn lambda_by_accumulation(
        n: usize,
        pair: &ScaleWeightPair,
        grid: &TimeGrid,
        alpha: f64,
    ) -> Vec<f64> {
        let mut w = vec![0.0; n + 1]; // w[j] multiplies g_j
        let a = coeff_a(n, 1, pair, grid, alpha).unwrap();
        w[1] += a;
        w[0] -= a;
        if n >= 2 {
            let a = coeff_a(n, 2, pair, grid, alpha).unwrap();
            let b = coeff_b(n, 2, pair, grid, alpha).unwrap();
            w[2] += a + b;
            w[1] -= a + 2.0 * b;
            w[0] += b;
        }
        for l in 3..=n {
            let big: Vec<f64> = (1..=4)
                .map(|i| coeff_big_a(i, n, l, pair, grid, alpha).unwrap())
                .collect();
            w[l] += big[0];
            w[l - 1] += big[1];
            w[l - 2] += big[2];
            w[l - 3] += big[3];
        }
        (0..=n).map(|l| w[n - l]).collect()
    }

    #[test]
    fn lambda_tables_match_accumulation_oracle() {
        let (pair, grid) = pair_on(
            GridFunction1D::Exponential { k: 1.0 },
            GridFunction1D::Affine { p: 1.0, q: 1.0 },
            1.0,
            12,
        );
        assert!(validate_pair(&pair).is_empty());
        for alpha in [0.25, 0.5, 0.75] {
            for n in 1..=12 {
                let table = lambda_weights(n, &pair, &grid, alpha).unwrap();
                let oracle = lambda_by_accumulation(n, &pair, &grid, alpha);
                let scale: f64 = oracle.iter().map(|x| x.abs()).sum::<f64>();
                for (got, want) in table.lambda.iter().zip(&oracle) {
                    assert!(
                        (got - want).abs() <= 1e-12 * scale,
                        "alpha={alpha} n={n}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn lambda_provenance_branches() {
        let (pair, grid) = classical(1.0, 10);
        let cases = [
            (1, LambdaProvenance::N1),
            (2, LambdaProvenance::N2),
            (3, LambdaProvenance::N3),
            (4, LambdaProvenance::N4),
            (5, LambdaProvenance::N5),
            (6, LambdaProvenance::General),
            (10, LambdaProvenance::General),
        ];
        for (n, branch) in cases {
            let w = lambda_weights(n, &pair, &grid, 0.5).unwrap();
            assert_eq!(w.provenance, branch);
            assert_eq!(w.lambda.len(), n + 1);
        }
    }

    #[test]
    fn lambda_zero_sum_and_positive_head() {
        let configs: Vec<(GridFunction1D, GridFunction1D)> = vec![
            (GridFunction1D::Identity, GridFunction1D::constant_one()),
            (
                GridFunction1D::Exponential { k: 1.0 },
                GridFunction1D::Affine { p: 1.0, q: 1.0 },
            ),
            (
                GridFunction1D::Power { sigma: 0.5 },
                GridFunction1D::Exponential { k: 2.0 },
            ),
        ];
        for (scale, weight) in configs {
            let (pair, grid) = pair_on(scale, weight, 1.0, 24);
            for alpha in [0.1, 0.5, 0.9] {
                for n in 1..=24 {
                    let w = lambda_weights(n, &pair, &grid, alpha).unwrap();
                    assert!(w.lambda[0] > 0.0);
                    let sum: f64 = w.lambda.iter().sum();
                    let mag: f64 = w.lambda.iter().map(|x| x.abs()).sum();
                    assert!(sum.abs() <= 1e-12 * mag, "n={n} alpha={alpha}: {sum}");
                }
            }
        }
    }

    #[test]
    fn lemma_ordering_for_a_and_b() {
        let (pair, grid) = pair_on(
            GridFunction1D::Exponential { k: 1.0 },
            GridFunction1D::Affine { p: 1.0, q: 1.0 },
            1.0,
            16,
        );
        for n in 2..=16 {
            let k = KernelCoefficients::compute(n, &pair, &grid, 0.5).unwrap();
            // a[j] indexed by distance: a_0 largest, all positive
            for j in 0..k.a.len() {
                assert!(k.a[j] > 0.0);
                if j > 0 {
                    assert!(k.a[j] < k.a[j - 1], "n={n} j={j}");
                }
            }
            for j in 0..k.b.len() {
                assert!(k.b[j] > 0.0);
                if j > 0 {
                    assert!(k.b[j] < k.b[j - 1], "n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn convolution_structure_for_identity_scale() {
        // zeta = t, omega = 1: weights depend on n - l only in the interior
        let (pair, grid) = classical(1.0, 20);
        let w12 = lambda_weights(12, &pair, &grid, 0.4).unwrap();
        let w20 = lambda_weights(20, &pair, &grid, 0.4).unwrap();
        for l in 3..=9 {
            assert!((w12.lambda[l] - w20.lambda[l]).abs() <= 1e-14 * w12.lambda[l].abs().max(1e-30));
        }
    }

    #[test]
    fn builder_cache_matches_direct_path() {
        let (pair, grid) = pair_on(
            GridFunction1D::Affine { p: 2.0, q: 0.5 },
            GridFunction1D::Exponential { k: 1.0 },
            1.0,
            15,
        );
        let mut builder = LambdaBuilder::new(&pair, &grid, 0.35);
        for n in 1..=15 {
            let cached = builder.lambda(n).unwrap();
            let direct = lambda_weights(n, &pair, &grid, 0.35).unwrap();
            assert_eq!(cached.lambda, direct.lambda, "n={n}");
        }
    }

    #[test]
    fn degenerate_scale_detected() {
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let pair = ScaleWeightPair::on_grid(
            GridFunction1D::Tabulated {
                values: vec![0.0, 1.0, 1.0, 2.0, 3.0],
            },
            GridFunction1D::constant_one(),
            &grid,
        )
        .unwrap();
        assert!(matches!(
            lambda_weights(4, &pair, &grid, 0.5),
            Err(Error::DegenerateScale(1, 2))
        ));
    }
}
