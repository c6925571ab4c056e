#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "growtree/errors.hpp"
#include "growtree/models.hpp"

namespace growtree {

// Up/right walk on the integer lattice with affine step weights:
// R(i,j) proportional to alpha*i + beta, U(i,j) proportional to alpha*j + beta,
// normalized so R + U = 1 at every state.
struct WalkParams {
    mpq_class alpha;
    mpq_class beta;
    long u_ceil = 0; // ceil(beta/alpha)
    double q = 0.0;  // beta/alpha as double

    mpq_class q_exact() const { return beta / alpha; }
};

inline WalkParams make_walk_params(const mpq_class& alpha, const mpq_class& beta) {
    if (alpha <= 0) throw DomainError("walk weights need alpha > 0");
    if (alpha + beta < 0) throw DomainError("walk weights need alpha + beta >= 0");
    WalkParams p;
    p.alpha = alpha;
    p.beta = beta;
    const mpq_class ratio = beta / alpha;
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
    p.u_ceil = static_cast<long>(c.get_si());
    p.q = ratio.get_d();
    return p;
}

// Attachment laws reduced to subtree-pair walks:
//   pa   -> R = (2i-1)/(2(i+j-1)),        alpha=2,   beta=-1
//   ua   -> R = i/(i+j),                  alpha=1,   beta=0
//   diff -> R = ((d-2)i+1)/((d-2)(i+j)+2), alpha=d-2, beta=1
inline WalkParams params_for_model(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::PreferentialAttachment: return make_walk_params(2, -1);
        case ModelKind::UniformAttachment: return make_walk_params(1, 0);
        case ModelKind::DiffusionRegular:
            if (spec.d < 3) {
                throw UnsupportedModel("the d=2 walk degenerates; no finite parameters");
            }
            return make_walk_params(spec.d - 2, 1);
    }
    throw DomainError("unknown model");
}

inline mpq_class step_right_prob(const WalkParams& p, long i, long j) {
    return mpq_class(p.alpha * i + p.beta) / (p.alpha * (i + j) + 2 * p.beta);
}

inline mpq_class step_up_prob(const WalkParams& p, long i, long j) {
    return mpq_class(p.alpha * j + p.beta) / (p.alpha * (i + j) + 2 * p.beta);
}

// Count of monotone paths (A,B) -> (m,m) that stay strictly below the
// diagonal except at the endpoint (reflection principle):
//   (2m-1-A-B)! (A-B) / ((m-A)! (m-B)!)
inline mpz_class theta_paths(long A, long B, long m) {
    if (B < 1 || B >= A) throw DomainError("theta_paths needs 1 <= B < A");
    if (m < A) throw DomainError("theta_paths needs m >= A");
    mpz_class num, d1, d2;
    mpz_fac_ui(num.get_mpz_t(), static_cast<unsigned long>(2 * m - 1 - A - B));
    mpz_fac_ui(d1.get_mpz_t(), static_cast<unsigned long>(m - A));
    mpz_fac_ui(d2.get_mpz_t(), static_cast<unsigned long>(m - B));
    num *= (A - B);
    mpz_class out;
    mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), d1.get_mpz_t());
    mpz_divexact(out.get_mpz_t(), out.get_mpz_t(), d2.get_mpz_t());
    return out;
}

// Probability shared by every below-diagonal path (A,B) -> (m,m):
//   prod_{i=A}^{m-1}(i+q) prod_{j=B}^{m-1}(j+q) / prod_{k=A+B}^{2m-1}(k+2q),
// with q = beta/alpha.
inline mpq_class path_prob(const WalkParams& p, long A, long B, long m) {
    if (B < 1 || B >= A) throw DomainError("path_prob needs 1 <= B < A");
    if (m < A) throw DomainError("path_prob needs m >= A");
    const mpq_class q = p.q_exact();
    if (mpq_class(B) + q <= 0 || mpq_class(A + B) + 2 * q <= 0) {
        throw DomainError("path weights must stay positive over the range");
    }
    mpq_class num = 1, den = 1;
    for (long i = A; i < m; ++i) num *= (q + i);
    for (long j = B; j < m; ++j) num *= (q + j);
    for (long k = A + B; k < 2 * m; ++k) den *= (2 * q + k);
    return num / den;
}

struct HitProbResult {
    double value = 0.0;
    long truncation_m = 0;
    double tail_bound = 0.0;
};

// Term of the first-hit decomposition f(A) = sum_m f(A,m) with B = 1,
// evaluated exactly.
inline mpq_class hit_term_exact(const WalkParams& p, long A, long m) {
    return mpq_class(theta_paths(A, 1, m)) * path_prob(p, A, 1, m);
}

namespace detail {

// First term f(A,A): the straight-up path.
inline double hit_term_first(const WalkParams& p, long A) {
    const double q = p.q;
    double log_term = 0.0;
    for (long j = 1; j < A; ++j) log_term += std::log(j + q);
    for (long k = A + 1; k < 2 * A; ++k) log_term -= std::log(k + 2 * q);
    return std::exp(log_term);
}

} // namespace detail

// Partial sum of the hit series up to m_max with compensated summation.
// Terms follow the recurrence
//   theta(m+1)/theta(m) = (2m-A)(2m-1-A) / ((m+1-A) m)
//   p(m+1)/p(m)        = (m+q)^2 / ((2m+2q)(2m+1+2q)).
// The tail is estimated from the proved O(1/m^2) term decay by fitting
// C/m^2 over the last decade of computed terms.
inline HitProbResult hit_prob_series(const WalkParams& p, long A, long m_max = -1) {
    if (A < 2) throw DomainError("hit probability needs A >= 2");
    if (m_max < 0) m_max = std::max<long>(10000, 100 * A);
    if (m_max < A) throw DomainError("m_max must be at least A");
    const double q = p.q;
    double term = detail::hit_term_first(p, A);
    double sum = 0.0, comp = 0.0;
    auto add = [&](double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    add(term);
    const long fit_from = std::max(A, m_max - std::max<long>(10, m_max / 10));
    double c_fit = 0.0;
    for (long m = A; m < m_max; ++m) {
        const double md = static_cast<double>(m);
        const double ratio = (2 * md - A) * (2 * md - 1 - A) * (md + q) * (md + q) /
                             ((md + 1 - A) * md * (2 * md + 2 * q) * (2 * md + 1 + 2 * q));
        term *= ratio;
        add(term);
        if (m + 1 >= fit_from) c_fit = std::max(c_fit, term * (md + 1) * (md + 1));
    }
    if (c_fit == 0.0) c_fit = term * static_cast<double>(m_max) * static_cast<double>(m_max);
    HitProbResult out;
    out.value = sum;
    out.truncation_m = m_max;
    out.tail_bound = c_fit / static_cast<double>(m_max);
    return out;
}

// Independent dynamic program over the below-diagonal states, absorbing on
// the diagonal. The per-column absorption equals the series term f(A,i), so
// the tail uses the same C/m^2 extrapolation, capped by the mass that was
// pushed past the last column (a rigorous upper bound in itself).
inline HitProbResult hit_prob_dp(const WalkParams& p, long A, long m_max = -1) {
    if (A < 2) throw DomainError("hit probability needs A >= 2");
    if (m_max < 0) m_max = std::max<long>(2000, 50 * A);
    if (m_max < A) throw DomainError("m_max must be at least A");
    const double q = p.q;
    std::vector<double> inbox(static_cast<std::size_t>(m_max) + 1, 0.0);
    std::vector<double> next(static_cast<std::size_t>(m_max) + 1, 0.0);
    inbox[1] = 1.0; // start at (A, 1)
    double absorbed = 0.0, escaped = 0.0, c_fit = 0.0, last_column = 0.0;
    const long fit_from = std::max(A, m_max - std::max<long>(10, m_max / 10));
    for (long i = A; i <= m_max; ++i) {
        double carry_up = 0.0, column_absorbed = 0.0;
        for (long j = 1; j < i; ++j) {
            const double mass = inbox[static_cast<std::size_t>(j)] + carry_up;
            inbox[static_cast<std::size_t>(j)] = 0.0;
            if (mass == 0.0) {
                carry_up = 0.0;
                continue;
            }
            const double denom = (i + j) + 2 * q;
            const double right = mass * ((i + q) / denom);
            const double up = mass * ((j + q) / denom);
            if (i < m_max) {
                next[static_cast<std::size_t>(j)] += right;
            } else {
                escaped += right;
            }
            if (j + 1 == i) {
                column_absorbed += up;
                carry_up = 0.0;
            } else {
                carry_up = up;
            }
        }
        absorbed += column_absorbed;
        last_column = column_absorbed;
        if (i >= fit_from) {
            c_fit = std::max(c_fit, column_absorbed * static_cast<double>(i) *
                                        static_cast<double>(i));
        }
        std::swap(inbox, next);
    }
    if (c_fit == 0.0) {
        c_fit = last_column * static_cast<double>(m_max) * static_cast<double>(m_max);
    }
    HitProbResult out;
    out.value = absorbed;
    out.truncation_m = m_max;
    out.tail_bound = std::min(c_fit / static_cast<double>(m_max), escaped);
    return out;
}

struct EnvelopeReport {
    long a_lo = 0;
    long a_hi = 0;
    bool monotone = false;
    double gamma = 0.0;      // fitted polynomial degree in f ~ 2^c A^gamma / 2^A
    double offset = 0.0;     // fitted c
    double max_residual = 0.0;
    std::vector<double> values; // f(A) for A in [a_lo, a_hi]
};

// Validate the qualitative envelope of the hit probability: strict decay in
// A, plus a minimax fit of log2 f(A) + A against gamma*log2(A) + c. The
// fitted gamma bounds the polynomial degree of the envelope.
inline EnvelopeReport envelope_check(const WalkParams& p, long a_lo, long a_hi,
                                     long dp_m_max = -1) {
    if (a_lo < 2 || a_hi < a_lo) throw DomainError("bad A range");
    EnvelopeReport rep;
    rep.a_lo = a_lo;
    rep.a_hi = a_hi;
    rep.values.reserve(static_cast<std::size_t>(a_hi - a_lo + 1));
    for (long A = a_lo; A <= a_hi; ++A) {
        rep.values.push_back(hit_prob_dp(p, A, dp_m_max).value);
    }
    rep.monotone = true;
    for (std::size_t i = 1; i < rep.values.size(); ++i) {
        if (!(rep.values[i] < rep.values[i - 1])) rep.monotone = false;
    }
    std::vector<double> xs, ys;
    for (long A = a_lo; A <= a_hi; ++A) {
        xs.push_back(std::log2(static_cast<double>(A)));
        ys.push_back(std::log2(rep.values[static_cast<std::size_t>(A - a_lo)]) +
                     static_cast<double>(A));
    }
    auto half_range = [&](double gamma) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double resid = ys[i] - gamma * xs[i];
            lo = std::min(lo, resid);
            hi = std::max(hi, resid);
        }
        return std::pair<double, double>{(hi - lo) / 2, (hi + lo) / 2};
    };
    // (max-min)/2 is convex in gamma; ternary search pins the minimax slope.
    double lo = -8.0, hi = 24.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double m1 = lo + (hi - lo) / 3;
        const double m2 = hi - (hi - lo) / 3;
        if (half_range(m1).first <= half_range(m2).first) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    rep.gamma = (lo + hi) / 2;
    const auto [resid, center] = half_range(rep.gamma);
    rep.max_residual = resid;
    rep.offset = center;
    return rep;
}

} // namespace growtree
