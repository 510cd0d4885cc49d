#include "cfiot/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cfiot::special {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEps = 1e-15;

void check_domain(double s, double x) {
    if (!std::isfinite(s) || !std::isfinite(x) || s <= 0.0 || x < 0.0) {
        throw std::domain_error("incomplete gamma: require finite s > 0, x >= 0, got s=" +
                                std::to_string(s) + " x=" + std::to_string(x));
    }
}

// P(s,x) by power series, valid and fast for x < s+1.
double lower_series(double s, double x) {
    if (x == 0.0) return 0.0;
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int i = 0; i < kMaxIterations; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) {
            double log_term = s * std::log(x) - x - log_gamma(s);
            return sum * std::exp(log_term);
        }
    }
    throw std::runtime_error("reg_lower_gamma: series did not converge");
}

// Q(s,x) by modified Lentz continued fraction, valid for x >= s+1.
double upper_cf(double s, double x) {
    const double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) {
            double log_term = s * std::log(x) - x - log_gamma(s);
            return h * std::exp(log_term);
        }
    }
    throw std::runtime_error("reg_upper_gamma: continued fraction did not converge");
}

}  // namespace

double log_gamma(double s) {
    if (!std::isfinite(s) || s <= 0.0) {
        throw std::domain_error("log_gamma: require finite s > 0");
    }
    return std::lgamma(s);
}

double reg_lower_gamma(double s, double x) {
    check_domain(s, x);
    if (x < s + 1.0) return lower_series(s, x);
    return 1.0 - upper_cf(s, x);
}

double reg_upper_gamma(double s, double x) {
    check_domain(s, x);
    if (x < s + 1.0) return 1.0 - lower_series(s, x);
    return upper_cf(s, x);
}

double gamma_tail_ratio(double s, double c, GammaSide side) {
    if (!std::isfinite(c) || c <= 0.0) {
        throw std::domain_error("gamma_tail_ratio: require finite c > 0");
    }
    double x = c * s;
    return side == GammaSide::lower ? reg_lower_gamma(s, x) : reg_upper_gamma(s, x);
}

}  // namespace cfiot::special
