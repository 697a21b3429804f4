use super::field::{free_mean, ElementRole};
use super::SimpError;
use crate::scalar::Scalar;

const BISECTION_MAX_ITER: usize = 200;
const VOLUME_TOL: f64 = 1e-10;
/// Accepted mismatch if the bracket collapses before `VOLUME_TOL` is met.
const VOLUME_ACCEPT: f64 = 1e-6;

/// Optimality-criteria update with a caller-supplied volume measure.
///
/// Each free element moves to `x · sqrt(−dc / (λ dv))`, clamped to the move
/// limit and to `[rho_min, 1]`; frozen elements are returned unchanged. `λ` is
/// found by bisection in log space so that `volume(candidate)` equals
/// `target`. The volume callback lets the constraint be measured on a filtered
/// and projected field rather than on the design variables themselves.
#[allow(clippy::too_many_arguments)]
pub fn oc_update_with<T: Scalar>(
    x: &[T],
    dc: &[T],
    dv: &[T],
    roles: &[ElementRole],
    move_limit: T,
    rho_min: T,
    target: T,
    mut volume: impl FnMut(&[T]) -> T,
) -> Result<Vec<T>, SimpError> {
    let n = x.len();
    if dc.len() != n || dv.len() != n || roles.len() != n {
        return Err(SimpError::LengthMismatch);
    }
    let eps = T::lit(1e-30);
    let mut ratio: Vec<T> = (0..n)
        .map(|e| {
            if !roles[e].is_free() {
                return T::zero();
            }
            let d = if dv[e].abs() > eps { dv[e] } else { T::one() };
            (-dc[e] / d).max(T::zero())
        })
        .collect();
    if ratio.iter().any(|r| !r.is_finite()) {
        return Err(SimpError::NonFinite("sensitivity"));
    }
    let r_max = ratio.iter().fold(T::zero(), |m, &r| m.max(r));
    if r_max == T::zero() {
        // No information from the objective: scale uniformly toward the target.
        for (r, role) in ratio.iter_mut().zip(roles) {
            if role.is_free() {
                *r = T::one();
            }
        }
    }
    let lower: Vec<T> = x.iter().map(|&v| (v - move_limit).max(rho_min)).collect();
    let upper: Vec<T> = x.iter().map(|&v| (v + move_limit).min(T::one())).collect();
    let candidate = |lambda: T| -> Vec<T> {
        (0..n)
            .map(|e| {
                if !roles[e].is_free() {
                    return x[e];
                }
                let v = x[e] * (ratio[e] / lambda).sqrt();
                v.max(lower[e]).min(upper[e])
            })
            .collect()
    };

    // Bracket: every free element at its upper bound below `lo`, at its lower
    // bound above `hi`.
    let mut lo = T::max_value();
    let mut hi = T::zero();
    for e in (0..n).filter(|&e| roles[e].is_free() && ratio[e] > T::zero()) {
        let xe = x[e].max(rho_min);
        let a = ratio[e] * (xe / upper[e]).powi(2);
        let b = ratio[e] * (xe / lower[e]).powi(2);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    if hi == T::zero() {
        // No free element can move; nothing to solve for.
        return Ok(x.to_vec());
    }
    let mut lo = lo * T::lit(0.5);
    let mut hi = hi * T::lit(2.0);
    let tol = T::lit(VOLUME_TOL);

    let v_lo = volume(&candidate(lo));
    if v_lo < target - T::lit(VOLUME_ACCEPT) {
        return Err(SimpError::VolumeTargetUnreachable { target: target.as_f64(), attainable: v_lo.as_f64() });
    }
    let v_hi = volume(&candidate(hi));
    if v_hi > target + T::lit(VOLUME_ACCEPT) {
        return Err(SimpError::VolumeTargetUnreachable { target: target.as_f64(), attainable: v_hi.as_f64() });
    }

    let mut best = candidate(hi);
    let mut best_err = (v_hi - target).abs();
    for _ in 0..BISECTION_MAX_ITER {
        let mid = (lo * hi).sqrt();
        let cand = candidate(mid);
        let v = volume(&cand);
        let err = (v - target).abs();
        if err < best_err {
            best_err = err;
            best = cand;
        }
        if err <= tol {
            return Ok(best);
        }
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - T::one() <= T::epsilon() * T::lit(4.0) {
            break;
        }
    }
    if best_err <= T::lit(VOLUME_ACCEPT).max(T::epsilon() * T::lit(64.0)) {
        Ok(best)
    } else {
        Err(SimpError::BisectionFailed { residual: best_err.as_f64() })
    }
}

/// Plain optimality-criteria step: `x · sqrt(−dc / λ)` with move limit and
/// bounds, `λ` set so the mean over free elements equals `vf`.
pub fn oc_update<T: Scalar>(
    rho: &[T],
    roles: &[ElementRole],
    sensitivity: &[T],
    vf: T,
    move_limit: T,
    rho_min: T,
) -> Result<Vec<T>, SimpError> {
    let ones = vec![T::one(); rho.len()];
    oc_update_with(rho, sensitivity, &ones, roles, move_limit, rho_min, vf, |c| free_mean(c, roles))
}
