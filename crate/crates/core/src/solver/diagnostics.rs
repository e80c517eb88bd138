use crate::error::{Error, Result};

/// `μ = log_{γ_inc}(1/γ_dec)` and the threshold probability
/// `p₀ = max{1/(1+μ), μ/(1+μ)}` the descent/alignment probabilities must beat.
pub fn diagnostics_mu_p0(gamma_inc: f64, gamma_dec: f64) -> Result<(f64, f64)> {
    if !(gamma_dec > 0.0 && gamma_dec < 1.0 && gamma_inc > 1.0) {
        return Err(Error::invalid("need 0 < gamma_dec < 1 < gamma_inc"));
    }
    let mu = (1.0 / gamma_dec).ln() / gamma_inc.ln();
    let p0 = (1.0 / (1.0 + mu)).max(mu / (1.0 + mu));
    Ok((mu, p0))
}

/// Step-size threshold `ᾱ = 2κη / ((L + c) P_max² D_max³)`: any iteration with
/// a descent set, a well-aligned sketch and `α_k < ᾱ ‖∇f(x_k)‖` succeeds.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn diagnostic_alpha_bar(kappa: f64, eta: f64, lipschitz: f64, c: f64, pmax: f64, dmax: f64) -> Result<f64> {
    if [kappa, eta, lipschitz, c, pmax, dmax].iter().any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("alpha-bar inputs must all be positive"));
    }
    Ok(2.0 * kappa * eta / ((lipschitz + c) * pmax * pmax * dmax.powi(3)))
}
