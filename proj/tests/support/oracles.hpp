#pragma once

// Independent oracles for the test suites. Everything here recomputes values
// by a route different from the library implementation: trial factorization,
// brute-force divisor sums, the eta-product for Delta, the alternating
// (Dirichlet eta) series for zeta, and the Gauss digamma theorem.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using std::uint64_t;

// trial-division squarefree split d = d1 * d2^2
inline std::pair<uint64_t, uint64_t> squarefree_split_trial(uint64_t d) {
    uint64_t d1 = 1, d2 = 1;
    for (uint64_t p = 2; p * p <= d; ++p) {
        if (d % p) continue;
        unsigned e = 0;
        while (d % p == 0) {
            d /= p;
            ++e;
        }
        if (e & 1u) d1 *= p;
        for (unsigned i = 0; i < e / 2; ++i) d2 *= p;
    }
    if (d > 1) d1 *= d;
    return {d1, d2};
}

inline std::vector<uint64_t> divisors_trial(uint64_t n) {
    std::vector<uint64_t> out;
    for (uint64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        out.push_back(d);
        if (d != n / d) out.push_back(n / d);
    }
    return out;
}

// tau*(n) = sum_{d | n^2} 1/sqrt(d1), directly
inline double tau_star_brute(uint64_t n) {
    double s = 0.0;
    uint64_t n2 = n * n;
    for (uint64_t d : divisors_trial(n2)) {
        auto [d1, d2] = squarefree_split_trial(d);
        (void)d2;
        s += 1.0 / std::sqrt(static_cast<double>(d1));
    }
    return s;
}

inline int moebius_trial(uint64_t n) {
    auto [d1, d2] = squarefree_split_trial(n);
    if (d2 != 1) return 0;
    int bits = 0;
    for (uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            ++bits;
            n /= p;
        }
    if (n > 1) ++bits;
    return bits % 2 ? -1 : 1;
}

inline uint64_t divisor_count_trial(uint64_t n) { return divisors_trial(n).size(); }

// tau*(n) via the convolution route sum_{f|n} mu^2(f)/sqrt(f) d(n/f)
inline double tau_star_conv(uint64_t n) {
    double s = 0.0;
    for (uint64_t f : divisors_trial(n)) {
        int m = moebius_trial(f);
        if (m == 0) continue;
        s += 1.0 / std::sqrt(static_cast<double>(f)) *
             static_cast<double>(divisor_count_trial(n / f));
    }
    return s;
}

// first `count` coefficients of Delta via eta(q)^24, exact integers;
// out[n] = tau(n), valid for 1 <= n <= count
inline std::vector<mpz_class> delta_eta_product(long count) {
    long N = count;  // need q-coefficients of eta^24 up to N-1
    // eta(q)^3 (without the q^{1/8} prefactor) = sum (-1)^m (2m+1) q^{m(m+1)/2}
    std::vector<mpz_class> e3(N, 0);
    for (long m = 0; m * (m + 1) / 2 < N; ++m) e3[m * (m + 1) / 2] = (m % 2 ? -(2 * m + 1) : 2 * m + 1);
    auto square = [N](const std::vector<mpz_class>& a) {
        std::vector<mpz_class> out(N, 0);
        for (long i = 0; i < N; ++i) {
            if (a[i] == 0) continue;
            for (long j = 0; i + j < N; ++j) {
                if (a[j] == 0) continue;
                out[i + j] += a[i] * a[j];
            }
        }
        return out;
    };
    auto e6 = square(e3);
    auto e12 = square(e6);
    auto e24 = square(e12);
    std::vector<mpz_class> tau(count + 1, 0);
    for (long n = 1; n <= count; ++n) tau[n] = e24[n - 1];
    return tau;
}

// zeta via the alternating series with d'Alembert acceleration (Borwein),
// independent of Euler-Maclaurin; good to ~1e-12 for Re s >= 1/2, |Im s| small
inline std::complex<double> zeta_alternating(std::complex<double> s) {
    const int n = 48;
    // Borwein's d_k coefficients
    std::vector<double> d(n + 1);
    double acc = 0.0;
    // d_k = n * sum_{j=0}^{k} (n+j-1)! 4^j / ((n-j)! (2j)!)
    std::vector<double> term(n + 1);
    {
        // compute via recurrence in log-free exact doubles (n=48 stays in range)
        for (int k = 0; k <= n; ++k) {
            double sum = 0.0, t = 1.0;  // j = 0 term: (n-1)!/(n)!*... handled by recurrence below
            // t_j = (n+j-1)! 4^j / ((n-j)! (2j)!)
            t = 1.0;
            for (int j = 0; j <= k; ++j) {
                if (j > 0) {
                    t *= 4.0 * (n + j - 1.0) * (n - j + 1.0) / ((2.0 * j) * (2.0 * j - 1.0));
                    // note: (n+j-1)!/(n-j)! ratio steps by (n+j-1)*(n-j+1)
                }
                sum += t;
            }
            d[k] = n * sum;
        }
        acc = d[n];
    }
    std::complex<double> z = 0.0;
    for (int k = 0; k < n; ++k) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        z += sign * (d[k] - acc) * std::pow(static_cast<double>(k + 1), -s);
    }
    std::complex<double> denom = acc * (1.0 - std::pow(2.0, 1.0 - s));
    return -z / denom;
}

// Gauss digamma theorem at rational p/q (0 < p < q):
// psi(p/q) = -gamma - ln(2q) - (pi/2) cot(pi p/q)
//            + 2 sum_{n=1}^{floor((q-1)/2)} cos(2 pi n p / q) ln sin(pi n / q)
inline double digamma_gauss(int p, int q) {
    const double gamma = 0.57721566490153286060651209008240243;
    double s = -gamma - std::log(2.0 * q) - (M_PI / 2.0) / std::tan(M_PI * p / q);
    for (int n = 1; n <= (q - 1) / 2; ++n)
        s += 2.0 * std::cos(2.0 * M_PI * n * p / q) * std::log(std::sin(M_PI * n / q));
    return s;
}

inline std::mt19937_64 rng(uint64_t seed = 0x5eed5eedULL) { return std::mt19937_64(seed); }

}  // namespace oracle
