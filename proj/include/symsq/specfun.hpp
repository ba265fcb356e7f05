#pragma once

// Special functions: principal-branch complex log-gamma (Lanczos), real
// digamma, the Riemann zeta function on complex arguments (Euler-Maclaurin),
// J-Bessel values of large order (ascending series / stabilized downward
// recurrence / large-argument expansion), and the gamma-quotient factor
//   G(y) = pi^{-3y/2} 2^{-y} Gamma(y/2 + 3/4) / Gamma(3/4).

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "symsq/util.hpp"

namespace symsq {

using cplx = std::complex<double>;

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// ---------------------------------------------------------------------------
// log Gamma, principal branch
// ---------------------------------------------------------------------------

namespace detail {

// Lanczos coefficients, g = 607/128, 15 terms (Godfrey's set).
inline constexpr double kLanczosG = 607.0 / 128.0;
inline constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3, -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5,
};

inline cplx log_gamma_lanczos(cplx z) {
    // valid for Re z > 0; callers handle reflection
    cplx zm1 = z - 1.0;
    cplx s = kLanczos[0];
    for (int i = 1; i < 15; ++i) s += kLanczos[i] / (zm1 + static_cast<double>(i));
    cplx t = zm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * M_PI) + (zm1 + 0.5) * std::log(t) - t + std::log(s);
}

}  // namespace detail

// Principal branch of log Gamma(z); throws at the poles. Arguments left of
// Re z = 1/2 are lifted by the recurrence log Gamma(z) = log Gamma(z+m) -
// sum log(z+j), which stays on the principal branch away from the negative
// real axis (the only region these integrands ever visit).
inline cplx log_gamma(cplx z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw numeric_error("log_gamma: pole at non-positive integer");
    if (z.real() >= 0.5) return detail::log_gamma_lanczos(z);
    int m = static_cast<int>(std::ceil(0.5 - z.real())) + 1;
    cplx shift = 0.0;
    for (int j = 0; j < m; ++j) shift += std::log(z + static_cast<double>(j));
    return detail::log_gamma_lanczos(z + static_cast<double>(m)) - shift;
}

inline cplx gamma_c(cplx z) { return std::exp(log_gamma(z)); }

// ---------------------------------------------------------------------------
// digamma (real argument)
// ---------------------------------------------------------------------------

inline double digamma(double x) {
    if (x <= 0.0) throw numeric_error("digamma: requires x > 0");
    double r = 0.0;
    while (x < 12.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    // asymptotic series with Bernoulli numbers B2..B14
    double inv = 1.0 / x, inv2 = inv * inv;
    double series = std::log(x) - 0.5 * inv -
                    inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12))))));
    return r + series;
}

// C = 2 gamma - (3/2) log pi - log 2 + psi(3/4)/2, the additive constant in
// the log main term of the central-value weight.
inline double v4_constant() {
    return 2.0 * kEulerGamma - 1.5 * std::log(M_PI) - std::log(2.0) + 0.5 * digamma(0.75);
}

// ---------------------------------------------------------------------------
// Riemann zeta, Euler-Maclaurin
// ---------------------------------------------------------------------------

namespace detail {

// B_{2j} / (2j)! for j = 1..15
inline constexpr double kBernFact[15] = {
    8.3333333333333333e-02,  -1.3888888888888889e-03, 3.3068783068783069e-05,
    -8.2671957671957672e-07, 2.0876756987868099e-08,  -5.2841901386874932e-10,
    1.3382536530684679e-11,  -3.3896802963225829e-13, 8.5860620562778446e-15,
    -2.1748686985580619e-16, 5.5090028283602295e-18,  -1.3954464685812523e-19,
    3.5347070396294675e-21,  -8.9535174270375469e-23, 2.2679524523376831e-24,
};

}  // namespace detail

// zeta(s) for s away from 1; tuned for |Im s| <= a few hundred and
// Re s >= -4 (reflection handles anything further left).
inline cplx zeta(cplx s) {
    if (std::abs(s - cplx(1.0, 0.0)) < 1e-14) throw numeric_error("zeta: pole at s = 1");
    if (s.real() < -4.0) {
        // functional equation zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)
        cplx chi = std::pow(2.0, s) * std::pow(M_PI, s - 1.0) * std::sin(M_PI * s / 2.0) *
                   gamma_c(1.0 - s);
        return chi * zeta(1.0 - s);
    }
    const int N = std::max(18, static_cast<int>(8.0 + 1.1 * std::abs(s.imag())));
    cplx sum = 0.0;
    for (int n = 1; n < N; ++n) sum += std::pow(static_cast<double>(n), -s);
    double dN = N;
    cplx Ns = std::pow(dN, -s);
    sum += dN * Ns / (s - 1.0);  // N^{1-s}/(s-1)
    sum += 0.5 * Ns;
    // correction sum: B_{2j}/(2j)! * (s)_{2j-1} * N^{-s-2j+1}
    cplx poch = s;            // (s)_1
    cplx npow = Ns / dN;      // N^{-s-1}
    for (int j = 1; j <= 15; ++j) {
        sum += detail::kBernFact[j - 1] * poch * npow;
        poch *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
        npow /= dN * dN;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// J-Bessel
// ---------------------------------------------------------------------------

namespace detail {

// Ascending series J_nu(t) = (t/2)^nu / Gamma(nu+1) * sum_m (-(t/2)^2)^m / (m! (nu+1)_m),
// with the prefactor in log-domain to survive large orders.
inline double bessel_series(unsigned nu, double t) {
    double lpre = nu * std::log(t / 2.0) - std::lgamma(static_cast<double>(nu) + 1.0);
    if (lpre < -745.0) return 0.0;  // underflows double range; true value below 1e-323
    double x2 = -(t / 2.0) * (t / 2.0);
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 400; ++m) {
        term *= x2 / (static_cast<double>(m) * (static_cast<double>(nu) + m));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::exp(lpre) * sum;
}

// Large-argument (Hankel) expansion with phase, usable when t greatly
// exceeds nu^2. Used both as a fast path and as the classical cosine
// asymptotic the contract mentions.
inline double bessel_asymptotic(unsigned nu, double t, int terms = 6) {
    // J_nu(t) = sqrt(2/(pi t)) [cos(chi) P - sin(chi) Q],
    // chi = t - (nu/2 + 1/4) pi, with P/Q the even/odd Hankel sums.
    double mu = 4.0 * static_cast<double>(nu) * static_cast<double>(nu);
    double p = 1.0, q = 0.0, term = 1.0;
    for (int m = 1; m <= 2 * terms; ++m) {
        term *= (mu - (2.0 * m - 1.0) * (2.0 * m - 1.0)) / (8.0 * t * m);
        double signed_term = ((m / 2) % 2 == 0) ? term : -term;
        if (m % 2 == 1)
            q += signed_term;
        else
            p += signed_term;
    }
    double chi = t - (0.5 * nu + 0.25) * M_PI;
    return std::sqrt(2.0 / (M_PI * t)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Stabilized downward (Miller) recurrence. Returns J_nu(t) with absolute
// accuracy near machine precision for the desk-scale ranges used here.
inline double bessel_miller(unsigned nu, double t) {
    // start far enough above both the order and the turning point that the
    // minimal solution dominates the seed contamination
    double airy_pad = 13.0 * std::cbrt(t) + 40.0;
    uint64_t m_start = static_cast<uint64_t>(std::max<double>(nu + 40.0, t + airy_pad)) + 2;
    if (m_start % 2 == 1) ++m_start;  // even start keeps the parity bookkeeping simple
    double jp = 0.0, j = 1e-280;
    double sum = 0.0;   // accumulates J_0 + 2 sum_{m>=1} J_{2m}
    double result = 0.0;
    bool captured = false;
    for (uint64_t m = m_start; m-- > 0;) {
        double jm = (2.0 * (m + 1)) / t * j - jp;
        jp = j;
        j = jm;
        if (m == nu) {
            result = j;
            captured = true;
        }
        if (m % 2 == 0) sum += (m == 0) ? j : 2.0 * j;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp *= 1e-250;
            sum *= 1e-250;
            if (captured) result *= 1e-250;
        }
    }
    if (sum == 0.0) throw numeric_error("bessel_j: normalization sum vanished");
    return result / sum;
}

}  // namespace detail

// J_{order}(t) for order >= 0, t > 0. Absolute accuracy ~1e-13 over
// order <= 2000, t <= 1e6.
inline double bessel_j(unsigned order, double t) {
    if (t <= 0.0) throw numeric_error("bessel_j: t must be positive");
    if (!std::isfinite(t)) throw numeric_error("bessel_j: t must be finite");
    if (t < 12.0 && t < 0.5 * (order + 1.0)) return detail::bessel_series(order, t);
    double nu2 = static_cast<double>(order) * static_cast<double>(order);
    if (t > 1e5 && t > 100.0 * std::max(1.0, nu2)) return detail::bessel_asymptotic(order, t);
    return detail::bessel_miller(order, t);
}

// The leading cosine approximation, exposed for the large-t contract checks.
inline double bessel_j_asymptotic_cosine(unsigned order, double t) {
    double chi = t - (0.5 * order + 0.25) * M_PI;
    return std::sqrt(2.0 / (M_PI * t)) * std::cos(chi);
}

// All orders 0..max_order at a single argument, one Miller pass.
inline std::vector<double> bessel_j_batch(unsigned max_order, double t) {
    if (t <= 0.0) throw numeric_error("bessel_j_batch: t must be positive");
    std::vector<double> out(max_order + 1, 0.0);
    double airy_pad = 13.0 * std::cbrt(t) + 40.0;
    uint64_t m_start = static_cast<uint64_t>(std::max<double>(max_order + 40.0, t + airy_pad)) + 2;
    if (m_start % 2 == 1) ++m_start;
    double jp = 0.0, j = 1e-280;
    double sum = 0.0;
    for (uint64_t m = m_start; m-- > 0;) {
        double jm = (2.0 * (m + 1)) / t * j - jp;
        jp = j;
        j = jm;
        if (m <= max_order) out[m] = j;
        if (m % 2 == 0) sum += (m == 0) ? j : 2.0 * j;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp *= 1e-250;
            sum *= 1e-250;
            for (auto& v : out) v *= 1e-250;
        }
    }
    if (sum == 0.0) throw numeric_error("bessel_j_batch: normalization sum vanished");
    for (auto& v : out) v /= sum;
    return out;
}

// ---------------------------------------------------------------------------
// G(y) = pi^{-3y/2} 2^{-y} Gamma(y/2 + 3/4) / Gamma(3/4)
// ---------------------------------------------------------------------------

inline cplx log_g_factor(cplx y) {
    cplx arg = y / 2.0 + 0.75;
    if (arg.imag() == 0.0 && arg.real() <= 0.0 && arg.real() == std::floor(arg.real()))
        throw numeric_error("g_factor: pole");
    return -1.5 * y * std::log(M_PI) - y * std::log(2.0) + log_gamma(arg) - log_gamma(cplx(0.75));
}

inline cplx g_factor(cplx y) { return std::exp(log_g_factor(y)); }

}  // namespace symsq
