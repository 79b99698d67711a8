//! Independent numerical oracles: plain adaptive quadrature, no incomplete
//! gamma functions.

#![allow(dead_code)]

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson on `[a, b]`, relative tolerance `rtol` against a
/// first estimate of the integral.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    let tol = rtol * whole.abs() + 1e-300;
    adapt(f, a, b, fa, fm, fb, whole, tol, 30)
}

/// `∫_t^∞ (s − t)^m s^{r−1} e^{−s²/2} 1{s > 0} ds` by quadrature.
///
/// The integrand is factored as `e^{−t²/2}` times a function that is O(1)
/// near the lower limit, so the relative accuracy does not degrade in the
/// far tail. For `r < 2` and a lower limit of zero, the piece `[0, 1]` is
/// integrated after the substitution `s = v^{1/r}`.
pub fn shifted_moment(r: f64, t: f64, m: i32) -> f64 {
    let lo = t.max(0.0);
    let scale = -0.5 * lo * lo;
    let g = |s: f64| {
        if s <= 0.0 {
            return if r == 1.0 { (-t).powi(m) } else { 0.0 };
        }
        (s - t).powi(m) * ((r - 1.0) * s.ln() - 0.5 * s * s - scale).exp()
    };
    let reach = lo.max((r - 1.0).max(0.0).sqrt()) + 40.0;
    let mut total = 0.0;
    let mut a = lo;
    if r < 2.0 && lo == 0.0 {
        let h = |v: f64| {
            if v <= 0.0 {
                return (-t).powi(m) / r;
            }
            let s = v.powf(1.0 / r);
            (s - t).powi(m) * (-0.5 * s * s).exp() / r
        };
        total += integrate(&h, 0.0, 1.0, 1e-14);
        a = 1.0;
    }
    let width = if lo > 4.0 { 1.0 / lo } else { 0.25 };
    while a < reach {
        let b = a + width;
        let piece = integrate(&g, a, b, 1e-14);
        total += piece;
        if piece.abs() < 1e-18 * total.abs() && a > lo + 2.0 {
            break;
        }
        a = b;
    }
    total * scale.exp()
}

/// `C_r = 1 / (2^{(r−2)/2} Γ(r/2))` via the Lanczos-free route
/// `∫_0^∞ s^{r−1} e^{−s²/2} ds = 1/C_r`.
pub fn norm_const(r: f64) -> f64 {
    1.0 / shifted_moment(r, 0.0, 0)
}

/// Minimise `g` on `[lo, hi]` by a dense scan followed by golden-section
/// refinement around the best grid point.
pub fn minimise(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let n = 120;
    let step = (hi - lo) / n as f64;
    let mut best = (lo, g(lo));
    for i in 1..=n {
        let x = lo + step * i as f64;
        let v = g(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if g(c) < g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    (x, g(x))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
