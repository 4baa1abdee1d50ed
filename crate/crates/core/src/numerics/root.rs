use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Unknown,
}

/// Bracket and stopping rule for [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    pub lo: f64,
    pub hi: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
    pub monotonicity: Monotonicity,
}

impl RootSpec {
    pub fn new(lo: f64, hi: f64) -> Self {
        RootSpec { lo, hi, abs_tol: 1e-12, max_iter: 200, monotonicity: Monotonicity::Unknown }
    }

    pub fn tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn monotone(mut self, m: Monotonicity) -> Self {
        self.monotonicity = m;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub root: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Brent's method (inverse quadratic interpolation guarded by bisection).
///
/// Requires `f(lo) * f(hi) <= 0`. With a monotonicity hint the endpoint
/// signs must also agree with the hint.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, spec: RootSpec) -> Result<RootResult> {
    let RootSpec { lo, hi, abs_tol, max_iter, monotonicity } = spec;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    let not_bracketed = || Error::NotBracketed { lo, hi, f_lo: fa, f_hi: fb };
    if fa.is_nan() || fb.is_nan() || fa * fb > 0.0 {
        return Err(not_bracketed());
    }
    let hint_ok = match monotonicity {
        Monotonicity::Increasing => fa <= 0.0 && fb >= 0.0,
        Monotonicity::Decreasing => fa >= 0.0 && fb <= 0.0,
        Monotonicity::Unknown => true,
    };
    if !hint_ok {
        return Err(not_bracketed());
    }
    if fa == 0.0 {
        return Ok(RootResult { root: a, value: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(RootResult { root: b, value: 0.0, iterations: 0 });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * abs_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(RootResult { root: b, value: fb, iterations: iter });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NoConvergence { method: "brent", iterations: iter });
        }
    }
    Err(Error::NoConvergence { method: "brent", iterations: max_iter })
}

/// Adjacent pairs of `points` (assumed sorted) across which `f` changes sign.
/// Non-finite evaluations never form a bracket.
pub fn sign_changes<F: FnMut(f64) -> f64>(mut f: F, points: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in points {
        let fx = f(x);
        if let Some((px, pf)) = prev {
            if pf.is_finite() && fx.is_finite() && (fx == 0.0 || pf * fx < 0.0) && px < x {
                out.push((px, x));
            }
        }
        prev = Some((x, fx));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = find_root(|x| x * x - 2.0, RootSpec::new(1.0, 2.0)).unwrap();
        assert!((r.root - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn cosine_zero() {
        let r = find_root(f64::cos, RootSpec::new(1.0, 2.0)).unwrap();
        assert!((r.root - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn not_bracketed() {
        let err = find_root(|x| x * x + 1.0, RootSpec::new(-1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::NotBracketed { .. }));
        let err = find_root(|x| x, RootSpec::new(-1.0, 1.0).monotone(Monotonicity::Decreasing));
        assert!(err.is_err());
    }

    #[test]
    fn iteration_cap() {
        let err = find_root(|x| x.powi(3) - 0.3, RootSpec::new(-10.0, 10.0).max_iter(2)).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 2, .. }));
    }

    #[test]
    fn deterministic_bits() {
        let spec = RootSpec::new(0.0, 3.0);
        let a = find_root(|x| x.exp() - 5.0, spec).unwrap();
        let b = find_root(|x| x.exp() - 5.0, spec).unwrap();
        assert_eq!(a.root.to_bits(), b.root.to_bits());
    }

    #[test]
    fn endpoint_root() {
        let r = find_root(|x| x - 1.0, RootSpec::new(1.0, 2.0)).unwrap();
        assert_eq!(r.root, 1.0);
    }

    #[test]
    fn sign_scan() {
        let pts: Vec<f64> = (0..=70).map(|i| f64::from(i) * 0.1).collect();
        let brackets = sign_changes(f64::sin, &pts);
        assert_eq!(brackets.len(), 2);
        assert!(brackets[0].0 < std::f64::consts::PI && brackets[0].1 > std::f64::consts::PI);
    }
}
