//! Hermitian eigendecomposition (cyclic complex Jacobi) and unitary exponentials.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::scalar::{cis, cr, Real, C};

/// Hermiticity tolerance applied to generators before exponentiation.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// `h = V · diag(values) · V†` with `V` unitary.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: Operator<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// Rebuilds `V · diag(f(λ)) · V†`.
    pub fn map(&self, f: impl Fn(T) -> C<T>) -> Operator<T> {
        let n = self.values.len();
        let fv: Vec<C<T>> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        Operator::from_fn(n, |r, c| {
            (0..n).fold(C::zero(), |acc, k| acc + v[(r, k)] * fv[k] * v[(c, k)].conj())
        })
    }

    /// Eigenvalues sorted ascending.
    pub fn sorted_values(&self) -> Vec<T> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }
}

/// Diagonalizes a Hermitian operator.
pub fn hermitian_eigen<T: Real>(h: &Operator<T>) -> Result<HermitianEigen<T>> {
    if !h.is_hermitian(T::tol(HERMITIAN_TOL)) {
        return Err(Error::domain("eigendecomposition requires a Hermitian operator"));
    }
    let n = h.dim();
    let mut a = h.clone();
    let mut v = Operator::identity(n);

    let scale = a.frobenius_norm().max(T::min_positive_value());
    let stop = T::epsilon() * T::epsilon() * scale * scale;

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |s, (i, j)| s + a[(i, j)].norm_sqr());
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let values = (0..n).map(|i| a[(i, i)].re).collect();
    Ok(HermitianEigen { values, vectors: v })
}

/// One Jacobi rotation annihilating `a[p][q]`.
///
/// `G = diag-phase · real rotation` acting on the (p, q) plane:
/// `G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]` where `a_pq = |a_pq| e^{iφ}`.
fn rotate<T: Real>(a: &mut Operator<T>, v: &mut Operator<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= T::min_positive_value() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if mag <= T::epsilon() * T::lit(1e-3) * (app.abs() + aqq.abs()) {
        a[(p, q)] = C::zero();
        a[(q, p)] = C::zero();
        return;
    }
    let phase = apq / cr(mag);
    let phase_c = phase.conj();

    let theta = (aqq - app) / (T::two() * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;
    let (cc, sc) = (cr(cs), cr(sn));

    let n = a.dim();
    // A ← A·G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cc - akq * sc * phase_c;
        a[(k, q)] = akp * sc + akq * cc * phase_c;
    }
    // A ← G†·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cc - aqk * sc * phase;
        a[(q, k)] = apk * sc + aqk * cc * phase;
    }
    a[(p, q)] = C::zero();
    a[(q, p)] = C::zero();
    a[(p, p)] = cr(a[(p, p)].re);
    a[(q, q)] = cr(a[(q, q)].re);
    // V ← V·G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cc - vkq * sc * phase_c;
        v[(k, q)] = vkp * sc + vkq * cc * phase_c;
    }
}

/// `exp(i · scale · h)` for Hermitian `h`, via eigendecomposition.
pub fn expm_hermitian<T: Real>(h: &Operator<T>, scale: T) -> Result<Operator<T>> {
    if scale.is_zero() {
        if !h.is_hermitian(T::tol(HERMITIAN_TOL)) {
            return Err(Error::domain("generator is not Hermitian"));
        }
        return Ok(Operator::identity(h.dim()));
    }
    if h.is_diagonal(T::zero()) {
        if !h.is_hermitian(T::tol(HERMITIAN_TOL)) {
            return Err(Error::domain("generator is not Hermitian"));
        }
        let d: Vec<C<T>> = (0..h.dim()).map(|i| cis(scale * h[(i, i)].re)).collect();
        return Ok(Operator::diagonal(&d));
    }
    let eig = hermitian_eigen(h)?;
    Ok(eig.map(|l| cis(scale * l)))
}

/// Closed-form `exp(i·a·h) = I + (cos a − 1)·h² + i·sin a·h`, valid when `h³ = h`
/// (e.g. a Pauli factor times a projector). Fails if `h` is not of that form.
pub fn expm_involutory<T: Real>(h: &Operator<T>, scale: T) -> Result<Operator<T>> {
    let tol = T::tol(HERMITIAN_TOL);
    if !h.is_hermitian(tol) {
        return Err(Error::domain("generator is not Hermitian"));
    }
    let h2 = h * h;
    let h3 = &h2 * h;
    if h3.max_abs_diff(h) > tol {
        return Err(Error::domain("closed-form exponential needs h³ = h"));
    }
    let id = Operator::identity(h.dim());
    let quad = h2.scale_real(scale.cos() - T::one());
    let lin = h.scale(C::new(T::zero(), scale.sin()));
    Ok(&(&id + &quad) + &lin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn herm(rows: &[&[(f64, f64)]]) -> Operator<f64> {
        let rows: Vec<Vec<C<f64>>> = rows
            .iter()
            .map(|r| r.iter().map(|&(a, b)| c(a, b)).collect())
            .collect();
        Operator::from_rows(&rows).unwrap()
    }

    #[test]
    fn jacobi_reconstructs_complex_hermitian() {
        let h = herm(&[
            &[(2.0, 0.0), (1.0, -1.0), (0.0, 0.5)],
            &[(1.0, 1.0), (-1.0, 0.0), (0.3, 0.2)],
            &[(0.0, -0.5), (0.3, -0.2), (0.5, 0.0)],
        ]);
        let eig = hermitian_eigen(&h).unwrap();
        assert!(eig.vectors.is_unitary(1e-13));
        let back = eig.map(cr);
        assert!(back.max_abs_diff(&h) < 1e-13, "{}", back.max_abs_diff(&h));
        let tr: f64 = eig.values.iter().sum();
        assert!((tr - 1.5).abs() < 1e-13);
    }

    #[test]
    fn degenerate_spectrum_is_handled() {
        let h = herm(&[
            &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            &[(0.0, 0.0), (0.0, 0.0), (0.0, 1.0)],
            &[(0.0, 0.0), (0.0, -1.0), (0.0, 0.0)],
        ]);
        let eig = hermitian_eigen(&h).unwrap();
        let vals = eig.sorted_values();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        assert!((vals[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = herm(&[&[(0.0, 0.0), (1.0, 0.0)], &[(0.0, 0.0), (0.0, 0.0)]]);
        assert!(matches!(expm_hermitian(&m, 1.0), Err(Error::Domain(_))));
        assert!(hermitian_eigen(&m).is_err());
    }

    #[test]
    fn zero_scale_gives_identity() {
        let h = herm(&[&[(0.0, 0.0), (2.0, 1.0)], &[(2.0, -1.0), (3.0, 0.0)]]);
        let u = expm_hermitian(&h, 0.0).unwrap();
        assert_eq!(u, Operator::identity(2));
    }

    #[test]
    fn involutory_path_rejects_general_generators() {
        let h = herm(&[&[(2.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.0, 0.0)]]);
        assert!(expm_involutory(&h, 1.0).is_err());
    }
}
