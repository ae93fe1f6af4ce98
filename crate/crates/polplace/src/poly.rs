//! Real polynomials in ascending coefficient order, root finding and the
//! Routh-Hurwitz stability test.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Tolerance used when matching complex conjugate pairs.
pub const CONJUGATE_TOL: f64 = 1e-12;

/// Real polynomial; `coeffs[k]` multiplies `s^k`, leading coefficient nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Wrap an ascending coefficient vector. The leading coefficient must be
    /// nonzero (constants are allowed).
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        assert!(
            *coeffs.last().unwrap() != 0.0,
            "leading coefficient must be nonzero"
        );
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        *self.coeffs.last().unwrap() == 1.0
    }

    /// Divide through by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        let lead = *self.coeffs.last().unwrap();
        Polynomial::new(self.coeffs.iter().map(|c| c / lead).collect())
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    pub fn eval_real(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    /// Product of two polynomials (coefficient convolution).
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Largest relative coefficient deviation against `other`, with the
    /// denominator floored at 1 so small coefficients compare absolutely.
    pub fn max_relative_deviation(&self, other: &Polynomial) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Polynomial, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
        (0..len)
            .map(|i| {
                let a = at(self, i);
                let b = at(other, i);
                (a - b).abs() / b.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 && self.degree() > 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { "-" } else { "+" })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                1 if mag == 1.0 => write!(f, "s")?,
                1 => write!(f, "{mag} s")?,
                _ if mag == 1.0 => write!(f, "s^{k}")?,
                _ => write!(f, "{mag} s^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Verify that every non-real member of `roots` has its conjugate present
/// (within [`CONJUGATE_TOL`]); returns the indices of positive-imaginary
/// roots paired with their partners.
fn check_conjugate_closure(roots: &[Complex64]) -> Result<()> {
    let mut negatives: Vec<Complex64> = roots
        .iter()
        .filter(|r| r.im < -CONJUGATE_TOL)
        .copied()
        .collect();
    for r in roots.iter().filter(|r| r.im > CONJUGATE_TOL) {
        let pos = negatives.iter().position(|m| {
            (m.re - r.re).abs() <= CONJUGATE_TOL && (m.im + r.im).abs() <= CONJUGATE_TOL
        });
        match pos {
            Some(i) => {
                negatives.swap_remove(i);
            }
            None => {
                return Err(Error::UnpairedComplexRoot { re: r.re, im: r.im });
            }
        }
    }
    if let Some(m) = negatives.first() {
        return Err(Error::UnpairedComplexRoot { re: m.re, im: m.im });
    }
    Ok(())
}

/// Expand a conjugate-closed root multiset into the real monic polynomial
/// with those roots.
pub fn poly_from_roots(roots: &[Complex64]) -> Result<Polynomial> {
    check_conjugate_closure(roots)?;
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k] -= r * c;
            next[k + 1] += c;
        }
        coeffs = next;
    }
    for c in &coeffs {
        debug_assert!(c.im.abs() < 1e-10 * (1.0 + c.re.abs()));
    }
    Ok(Polynomial::new(coeffs.iter().map(|c| c.re).collect()))
}

/// Stability verdict of the Routh-Hurwitz test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    /// All roots strictly in the open left half plane.
    Stable,
    /// At least one root with positive real part.
    Unstable,
    /// Imaginary-axis roots (or a degenerate array): not strictly stable.
    Marginal,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stability::Stable => write!(f, "stable"),
            Stability::Unstable => write!(f, "unstable"),
            Stability::Marginal => write!(f, "marginal"),
        }
    }
}

/// Routh-Hurwitz test on a monic polynomial of degree >= 1.
///
/// A zero leading-column entry in a row with other nonzero entries decides
/// `Unstable`; an entirely zero row decides `Marginal`.
pub fn routh_hurwitz_stable(p: &Polynomial) -> Stability {
    assert!(p.is_monic() && p.degree() >= 1, "monic, degree >= 1 required");
    let n = p.degree();
    let scale = p.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let z_tol = 1e-12 * (1.0 + scale);

    // a monic polynomial with any strictly negative coefficient has a root
    // with positive real part
    if p.coeffs.iter().any(|&c| c < -z_tol) {
        return Stability::Unstable;
    }

    // first two rows hold the coefficients in descending degree, interleaved
    let width = n / 2 + 1;
    let mut prev: Vec<f64> = (0..width)
        .map(|i| p.coeffs.get(n.wrapping_sub(2 * i)).copied().unwrap_or(0.0))
        .collect();
    let mut curr: Vec<f64> = (0..width)
        .map(|i| {
            n.checked_sub(2 * i + 1)
                .and_then(|k| p.coeffs.get(k).copied())
                .unwrap_or(0.0)
        })
        .collect();

    let mut first_column = vec![prev[0]];
    for _row in 1..=n {
        if curr.iter().all(|v| v.abs() <= z_tol) {
            return Stability::Marginal;
        }
        if curr[0].abs() <= z_tol {
            return Stability::Unstable;
        }
        first_column.push(curr[0]);
        let mut next = vec![0.0; width];
        for i in 0..width - 1 {
            let a = prev.get(i + 1).copied().unwrap_or(0.0);
            let b = curr.get(i + 1).copied().unwrap_or(0.0);
            next[i] = (curr[0] * a - prev[0] * b) / curr[0];
        }
        prev = curr;
        curr = next;
    }

    let sign_changes = first_column
        .windows(2)
        .filter(|w| (w[0] > 0.0) != (w[1] > 0.0))
        .count();
    if sign_changes == 0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

/// Durand-Kerner iteration settings pinned for determinism.
const ROOT_ITERATION_CAP: usize = 500;
const ROOT_STEP_TOL: f64 = 1e-12;

/// All roots of `p` by simultaneous Durand-Kerner iteration, sorted by
/// (re, im).
///
/// The iteration starts on a circle of radius `1 + max |coefficient|` and
/// stops early once the largest update falls below 1e-12. Repeated roots
/// stall above that step size at their attainable accuracy, so acceptance
/// is judged by the residual bound `|p(r)| <= 1e-8 * (1 + max|coeff|)`;
/// [`Error::NoConvergence`] reports the best iterate when even that fails.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    assert!(p.degree() >= 1, "degree >= 1 required");
    let monic = if p.is_monic() { p.clone() } else { p.monic() };
    let n = monic.degree();
    let coeff_scale = p.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let radius = 1.0 + monic.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));

    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.25;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let mut best = z.clone();
    let mut best_resid = f64::INFINITY;
    let mut converged = false;
    for _ in 0..ROOT_ITERATION_CAP {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // coincident iterates: nudge deterministically
                z[i] += Complex64::new(1e-9, 1e-9);
                continue;
            }
            let step = monic.eval(z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        let resid = z
            .iter()
            .map(|&r| monic.eval(r).norm())
            .fold(0.0f64, f64::max);
        if resid < best_resid {
            best_resid = resid;
            best = z.clone();
        }
        if max_step < ROOT_STEP_TOL {
            converged = true;
            break;
        }
    }

    let bound = 1e-8 * (1.0 + coeff_scale);
    if !converged && best_resid > bound {
        return Err(Error::NoConvergence {
            iterations: ROOT_ITERATION_CAP,
            residual: best_resid,
            best,
        });
    }
    let mut roots = best;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Sort key used everywhere pole lists must be deterministic.
pub fn sort_poles(poles: &mut [Complex64]) {
    poles.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn from_roots_double_pole() {
        let p = poly_from_roots(&[c(-1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn from_roots_single() {
        let p = poly_from_roots(&[c(-2.0, 0.0)]).unwrap();
        assert_eq!(p.coeffs(), &[2.0, 1.0]);
    }

    #[test]
    fn from_roots_conjugate_pair() {
        let p = poly_from_roots(&[c(-1.0, 1.0), c(-1.0, -1.0)]).unwrap();
        assert_eq!(p.coeffs(), &[2.0, 2.0, 1.0]);
    }

    #[test]
    fn from_roots_rejects_unpaired() {
        assert!(matches!(
            poly_from_roots(&[c(-1.0, 1.0), c(-2.0, 0.0)]),
            Err(Error::UnpairedComplexRoot { .. })
        ));
    }

    #[test]
    fn routh_stable_quadratic() {
        let p = Polynomial::new(vec![1.0, 2.0, 1.0]);
        assert_eq!(routh_hurwitz_stable(&p), Stability::Stable);
    }

    #[test]
    fn routh_unstable_root_at_plus_one() {
        let p = Polynomial::new(vec![-1.0, 0.0, 1.0]);
        assert_eq!(routh_hurwitz_stable(&p), Stability::Unstable);
    }

    #[test]
    fn routh_marginal_imaginary_pair() {
        // factors as (s+1)(s^2+1): roots -1, +/-i
        let p = Polynomial::new(vec![1.0, 1.0, 1.0, 1.0]);
        assert_eq!(routh_hurwitz_stable(&p), Stability::Marginal);
    }

    #[test]
    fn routh_marginal_integrator_chain() {
        // s(s+1)^2: root at the origin
        let p = Polynomial::new(vec![0.0, 1.0, 2.0, 1.0]);
        assert_eq!(routh_hurwitz_stable(&p), Stability::Marginal);
    }

    #[test]
    fn roots_linear() {
        let p = Polynomial::new(vec![2.0, 1.0]);
        let r = poly_roots(&p).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(-2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn roots_conjugate_pair() {
        let p = Polynomial::new(vec![2.0, 2.0, 1.0]);
        let r = poly_roots(&p).unwrap();
        assert!((r[0] - c(-1.0, -1.0)).norm() < 1e-9);
        assert!((r[1] - c(-1.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn roots_recover_forward_expansion() {
        // oracle: expand from known roots first, then solve
        let p = poly_from_roots(&[c(-1.0, 0.0), c(-2.0, 0.0), c(-3.0, 0.0)]).unwrap();
        assert_eq!(p.coeffs(), &[6.0, 11.0, 6.0, 1.0]);
        let r = poly_roots(&p).unwrap();
        let expected = [-3.0, -2.0, -1.0];
        for (got, want) in r.iter().zip(expected) {
            assert!((got - c(want, 0.0)).norm() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn roots_repeated_pole_meets_residual_bound() {
        let p = poly_from_roots(&[c(-1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let r = poly_roots(&p).unwrap();
        for root in &r {
            assert!(p.eval(*root).norm() <= 1e-8 * (1.0 + 2.0));
            assert!((root - c(-1.0, 0.0)).norm() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn roots_round_trip_well_separated(reals in proptest::collection::vec(-40i32..-1, 1..6)) {
            // distinct integer roots spaced at least 1 apart
            let mut uniq: Vec<i32> = reals.clone();
            uniq.sort_unstable();
            uniq.dedup();
            let roots: Vec<Complex64> = uniq.iter().map(|&v| c(v as f64 / 4.0, 0.0)).collect();
            let p = poly_from_roots(&roots).unwrap();
            let found = poly_roots(&p).unwrap();
            prop_assert_eq!(found.len(), roots.len());
            for (got, want) in found.iter().zip(&roots) {
                prop_assert!((got - want).norm() < 1e-7);
            }
        }

        #[test]
        fn routh_agrees_with_roots(parts in proptest::collection::vec((-30i32..30, 0i32..20), 1..5)) {
            // construct conjugate-closed root sets with real parts away from zero
            let mut roots = Vec::new();
            for &(re_raw, im_raw) in &parts {
                let re = re_raw as f64 / 10.0;
                let re = if re >= 0.0 { re + 0.2 } else { re - 0.2 };
                if im_raw == 0 {
                    roots.push(c(re, 0.0));
                } else {
                    let im = im_raw as f64 / 10.0 + 0.1;
                    roots.push(c(re, im));
                    roots.push(c(re, -im));
                }
            }
            let p = poly_from_roots(&roots).unwrap();
            let verdict = routh_hurwitz_stable(&p);
            let max_re = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
            if max_re < -1e-9 {
                prop_assert_eq!(verdict, Stability::Stable);
            } else {
                prop_assert_eq!(verdict, Stability::Unstable);
            }
        }
    }
}
