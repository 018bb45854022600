use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use noricert_core::arith::Rational;
use noricert_core::poly::Poly;
use num_traits::{ToPrimitive, Zero};

/// Largest root modulus of `p(σμ)` in units of `σ`, from the eigenvalues of
/// the companion matrix in double precision. `None` if the QR iteration does
/// not converge.
pub fn companion_max_modulus(p: &Poly, sigma: &Rational) -> Option<f64> {
    let d = p.degree().expect("nonzero");
    if d == 0 {
        return Some(0.0);
    }
    let lead = p.coeff(d) * sigma.pow(d as i32);
    let monic: Vec<f64> = (0..d)
        .map(|i| (p.coeff(i) * sigma.pow(i as i32) / &lead).to_f64().unwrap_or(0.0))
        .collect();
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for (i, c) in monic.iter().enumerate() {
        m[(i, d - 1)] = -c;
    }
    // The QR iteration can stall on cyclic companion matrices; a fixed
    // similarity keeps the spectrum and breaks the symmetry.
    let t = DMatrix::<f64>::from_fn(d, d, |i, j| match j.cmp(&i) {
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Greater => 0.5 / (1 + i + 2 * j) as f64,
        std::cmp::Ordering::Less => 0.0,
    });
    let m = t.clone().try_inverse().expect("unit triangular") * m * t;
    let schur = Schur::try_new(m, f64::EPSILON, 100_000)?;
    Some(schur.complex_eigenvalues().iter().map(|z| z.re.hypot(z.im)).fold(0.0, f64::max))
}

/// Largest root modulus of `p`, as `(σ, μ)` with the modulus `σ·μ`.
///
/// A companion matrix whose roots are far below its unit leading entry has
/// eigenvalue error near `1e-16^{1/d}`, so the estimate is refined by
/// rescaling until the roots sit at unit size. Coefficients below the f64
/// range flush to zero; μ = 0 then means the modulus is below every
/// representable scale.
pub fn max_root_modulus(p: &Poly) -> (Rational, f64) {
    let mut sigma = Rational::from_integer(1.into());
    let mut mu = companion_max_modulus(p, &sigma).expect("companion QR converges at unit scale");
    for _ in 0..16 {
        if mu.is_zero() || mu >= 0.1 {
            break;
        }
        let step = Rational::from_float(mu).expect("finite");
        let next = &sigma * step;
        match companion_max_modulus(p, &next) {
            Some(m) if m.is_finite() && m > 0.0 => {
                sigma = next;
                mu = m;
            }
            _ => break,
        }
    }
    (sigma, mu)
}
