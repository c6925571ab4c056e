#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "growtree/errors.hpp"

namespace growtree {

namespace detail {

// Continued fraction for the incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-15;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace detail

// Regularized incomplete beta I_x(a, b). Absolute error well below 1e-10
// over a, b in (0, ~1e4).
inline double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("reg_inc_beta needs a, b > 0");
    if (!(x >= 0.0) || !(x <= 1.0)) throw DomainError("reg_inc_beta needs x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_cf(a, b, x) / a;
    }
    return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

inline double beta_cdf(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return reg_inc_beta(a, b, x);
}

// Kolmogorov limit survival function Q(t) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 t^2}.
// The alternating series stalls for small t; there the theta-transformed CDF
// sqrt(2 pi)/t sum_{k odd} e^{-k^2 pi^2 / (8 t^2)} converges in a few terms.
inline double kolmogorov_q(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 1.18) {
        const double f = M_PI * M_PI / (8.0 * t * t);
        double cdf = 0.0;
        for (int k = 1; k <= 19; k += 2) {
            const double term = std::exp(-static_cast<double>(k) * k * f);
            cdf += term;
            if (term < 1e-18) break;
        }
        cdf *= std::sqrt(2.0 * M_PI) / t;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double d = 0.0;
    double p = 1.0;
};

// One-sample KS against a continuous CDF; p from the asymptotic law with
// the Stephens small-sample correction.
inline KsResult ks_statistic(std::vector<double> samples,
                             const std::function<double(double)>& cdf) {
    if (samples.size() < 8) throw TooFewSamples("one-sample KS needs at least 8 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    const double root_n = std::sqrt(n);
    return {d, kolmogorov_q((root_n + 0.12 + 0.11 / root_n) * d)};
}

// Two-sample KS; handles ties by advancing both empirical CDFs across equal
// values before comparing.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 8 || b.size() < 8) throw TooFewSamples("two-sample KS needs 8 per sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double v = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] == v) ++ia;
        while (ib < b.size() && b[ib] == v) ++ib;
        d = std::max(d, std::fabs(static_cast<double>(ia) / na -
                                  static_cast<double>(ib) / nb));
    }
    const double n_eff = na * nb / (na + nb);
    const double root_n = std::sqrt(n_eff);
    return {d, kolmogorov_q((root_n + 0.12 + 0.11 / root_n) * d)};
}

} // namespace growtree
