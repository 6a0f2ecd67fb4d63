#pragma once

namespace mcpope {

double normal_pdf(double x);
double normal_cdf(double x);

/// E[(Z - x)^+] for standard normal Z, i.e. phi(x) - x (1 - Phi(x)).
/// Accurate to full relative precision in both tails.
double normal_call_payoff(double x);

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// The x in (0, 1) with I_x(a, b) = p: bracketing search in log x, then Newton polishing.
double inverse_incomplete_beta(double a, double b, double p);

/// Quantile of the standard Student t with `dof` degrees of freedom,
/// sgn(u - 1/2) sqrt(n (1 / I^-1_{2 min(u, 1-u)}(n/2, 1/2) - 1)).
/// The complementary beta is inverted instead whenever that root would exceed 1/2.
double student_t_quantile(double u, double dof);

/// Signed VaR (losses negative) of the marginal mu + sigma sqrt((n-2)/n) T_n,
/// whose standard deviation is sigma.
double marginal_var_student(double mu, double sigma, double dof, double u);

/// Omega of a normal return with mean mu and standard deviation sigma at threshold b:
/// (phi(z) + z Phi(z) - z) / (phi(z) + z Phi(z)), z = (b - mu) / sigma.
double gaussian_omega(double mu, double sigma, double b);

} // namespace mcpope
