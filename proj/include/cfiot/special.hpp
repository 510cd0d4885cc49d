#pragma once

namespace cfiot::special {

// log Gamma(s), s > 0.
double log_gamma(double s);

// Regularized lower incomplete gamma P(s,x) = gamma(s,x)/Gamma(s).
// Series branch for x < s+1, continued fraction otherwise; both evaluated
// in the log domain so shapes up to ~1e4 stay representable.
// Throws std::domain_error on invalid input, std::runtime_error if the
// expansion fails to converge within the iteration cap.
double reg_lower_gamma(double s, double x);

// Regularized upper incomplete gamma Q(s,x) = Gamma(s,x)/Gamma(s) = 1 - P(s,x).
double reg_upper_gamma(double s, double x);

enum class GammaSide { lower, upper };

// Ratio gamma(s, c*s)/Gamma(s) (lower) or Gamma(s, c*s)/Gamma(s) (upper),
// evaluated exactly at finite s. Decays to zero as s grows when c < 1
// (lower) or c > 1 (upper).
double gamma_tail_ratio(double s, double c, GammaSide side);

}  // namespace cfiot::special
