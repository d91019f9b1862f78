//! Floating-point roots of the characteristic cubic. Only used for the
//! dominant-root modulus and for size estimates, never for exact decisions.

/// A complex number as `(re, im)`.
pub type Complex = (f64, f64);

const REL_TOL: f64 = 1e-12;

fn eval(a: [f64; 3], x: f64) -> f64 {
    ((x - a[0]) * x - a[1]) * x - a[2]
}

/// A real root of `X^3 - a1 X^2 - a2 X - a3` by bisection to `1e-12`
/// relative accuracy.
pub fn real_root(a: [f64; 3]) -> f64 {
    let bound = 1.0 + a.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let (mut lo, mut hi) = (-bound, bound);
    // eval(lo) < 0 < eval(hi) by the Cauchy bound
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= REL_TOL * mid.abs().max(1e-300) || mid == lo || mid == hi {
            break;
        }
        let v = eval(a, mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All three roots, the first one real.
pub fn cubic_roots(a: [f64; 3]) -> [Complex; 3] {
    let r = real_root(a);
    // X^3 - a1 X^2 - a2 X - a3 = (X - r)(X^2 + b X + c)
    let b = r - a[0];
    let c = r * b - a[1];
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // numerically stable pair
        let q = -0.5 * (b + b.signum() * s);
        let (x1, x2) = if q == 0.0 { (0.0, -b) } else { (q, c / q) };
        [(r, 0.0), (x1, 0.0), (x2, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [(r, 0.0), (-0.5 * b, im), (-0.5 * b, -im)]
    }
}

pub fn modulus(z: Complex) -> f64 {
    z.0.hypot(z.1)
}

/// `max(|alpha|, |beta|, |gamma|)`.
pub fn dominant_modulus(a: [f64; 3]) -> f64 {
    cubic_roots(a)
        .into_iter()
        .map(modulus)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tribonacci_constant() {
        let g = dominant_modulus([1.0, 1.0, 1.0]);
        assert!((g - 1.839_286_755_214_161).abs() < 1e-11);
    }

    #[test]
    fn split_cubic_roots() {
        let mut re: Vec<f64> = cubic_roots([7.0, -14.0, 8.0]).iter().map(|z| z.0).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([1.0, 2.0, 4.0]) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn product_of_moduli_is_abs_a3() {
        for a in [[1.0, 1.0, 1.0], [3.0, -1.0, -2.0], [0.0, 0.0, 1.0], [-2.0, 5.0, -7.0]] {
            let prod: f64 = cubic_roots(a).into_iter().map(modulus).product();
            assert!((prod - a[2].abs()).abs() < 1e-8 * a[2].abs().max(1.0), "{a:?}");
        }
    }
}
