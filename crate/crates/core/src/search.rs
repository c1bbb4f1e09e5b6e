//! Bracketing root and extremum search on scalar functions.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Bisection on `[a, b]` where `f(a)` and `f(b)` differ in sign. Stops once
/// the bracket is narrower than `x_tol` and `accept(mid)` holds, or when the
/// bracket can no longer be split.
pub fn bisect<F, A>(f: F, mut a: f64, mut b: f64, x_tol: f64, accept: A) -> f64
where
    F: Fn(f64) -> f64,
    A: Fn(f64) -> bool,
{
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return mid;
        }
        if (b - a) < x_tol && accept(mid) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`,
/// returning the midpoint of the final bracket of width `< tol`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if b - a < tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

pub fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    golden_max(|x| -f(x), a, b, tol)
}

/// Uniform grid with `samples` points including both ends.
pub fn linspace(a: f64, b: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (samples - 1) as f64;
            (0..samples)
                .map(|i| {
                    if i == samples - 1 {
                        b
                    } else {
                        a + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// Logarithmically uniform grid with at least `per_decade` points per decade.
pub fn logspace_per_decade(a: f64, b: f64, per_decade: usize) -> Vec<f64> {
    let decades = (b / a).log10();
    let samples = ((decades * per_decade as f64).ceil() as usize).max(1) + 1;
    let (la, lb) = (a.ln(), b.ln());
    (0..samples)
        .map(|i| {
            if i == 0 {
                a
            } else if i == samples - 1 {
                b
            } else {
                (la + (lb - la) * i as f64 / (samples - 1) as f64).exp()
            }
        })
        .collect()
}
