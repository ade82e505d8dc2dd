//! Derivative-free one-dimensional search used by the hyperparameter fit and
//! the acquisition refinement.

use crate::scalar::Scalar;

/// Golden-section search for a maximum of `f` on `[lo, hi]` using exactly
/// `evals` evaluations (at least two). Returns the best evaluated point.
///
/// Non-finite values count as worse than any finite one. Ties keep the
/// earlier evaluation.
pub fn golden_section_max<T, F>(mut f: F, lo: T, hi: T, evals: usize) -> (T, T)
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let sanitize = |v: T| if v.is_nan() { T::neg_infinity() } else { v };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = sanitize(f(c));
    let mut fd = sanitize(f(d));
    let mut best = if fd > fc { (d, fd) } else { (c, fc) };
    for _ in 2..evals.max(2) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sanitize(f(c));
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sanitize(f(d));
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    best
}
