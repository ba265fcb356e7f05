#pragma once

// Exact integer arithmetic for multiplicative functions and complete
// exponential sums: squarefree decompositions, the divisor-like function
//   tau*(n) = sum_{d | n^2} 1/sqrt(d1)   (d = d1 d2^2, d1 squarefree),
// its Moebius companion mu*(j) = prod_{p|j} (-1 - p^{-1/2}), generalized
// von Mangoldt functions, Kloosterman sums S(n,m;c), Ramanujan sums r_c(n)
// and the twisted square average  sum_{a mod c} S(a^2,b^2,c) e(2ab/c).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <vector>

#include "symsq/util.hpp"

namespace symsq {

using std::uint64_t;

// ---------------------------------------------------------------------------
// Sieve tables (smallest prime factor, Moebius, Euler phi). Built once and
// shared immutably; concurrent readers are safe after construction. Requests
// past the current bound swap in a larger snapshot under a mutex.
// ---------------------------------------------------------------------------

struct sieve_tables {
    uint64_t bound = 0;
    std::vector<uint32_t> spf;  // smallest prime factor, spf[1] = 1
    std::vector<int8_t> mu;
    std::vector<uint32_t> phi;

    explicit sieve_tables(uint64_t n) : bound(n), spf(n + 1, 0), mu(n + 1, 0), phi(n + 1, 0) {
        std::vector<uint32_t> primes;
        mu[1] = 1;
        phi[1] = 1;
        spf[1] = 1;
        for (uint64_t i = 2; i <= n; ++i) {
            if (spf[i] == 0) {
                spf[i] = static_cast<uint32_t>(i);
                mu[i] = -1;
                phi[i] = static_cast<uint32_t>(i - 1);
                primes.push_back(static_cast<uint32_t>(i));
            }
            for (uint32_t p : primes) {
                if (p > spf[i] || i * p > n) break;
                uint64_t ip = i * p;
                spf[ip] = p;
                if (i % p == 0) {
                    mu[ip] = 0;
                    phi[ip] = phi[i] * p;
                } else {
                    mu[ip] = static_cast<int8_t>(-mu[i]);
                    phi[ip] = phi[i] * (p - 1);
                }
            }
        }
    }
};

namespace detail {

inline std::shared_ptr<const sieve_tables>& sieve_slot() {
    static std::shared_ptr<const sieve_tables> slot;
    return slot;
}
inline std::mutex& sieve_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

// Default warm-up bound; u_j / v_j sweeps hit the same small primes repeatedly.
inline constexpr uint64_t kDefaultSieveBound = 1u << 20;

inline std::shared_ptr<const sieve_tables> sieve(uint64_t need = kDefaultSieveBound) {
    auto cur = std::atomic_load(&detail::sieve_slot());
    if (cur && cur->bound >= need) return cur;
    std::lock_guard<std::mutex> lock(detail::sieve_mutex());
    cur = std::atomic_load(&detail::sieve_slot());
    if (cur && cur->bound >= need) return cur;
    uint64_t n = std::max<uint64_t>(need, kDefaultSieveBound);
    auto fresh = std::make_shared<const sieve_tables>(n);
    std::atomic_store(&detail::sieve_slot(), fresh);
    return fresh;
}

// ---------------------------------------------------------------------------
// Factorization helpers
// ---------------------------------------------------------------------------

struct prime_power {
    uint64_t p;
    unsigned e;
};

inline std::vector<prime_power> factorize(uint64_t n) {
    if (n == 0) throw numeric_error("factorize: n must be positive");
    std::vector<prime_power> out;
    if (n == 1) return out;
    auto tab = sieve();
    if (n <= tab->bound) {
        while (n > 1) {
            uint64_t p = tab->spf[n];
            unsigned e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.push_back({p, e});
        }
        return out;
    }
    for (uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

inline std::vector<uint64_t> divisors(uint64_t n) {
    std::vector<uint64_t> divs{1};
    for (const auto& [p, e] : factorize(n)) {
        std::size_t sz = divs.size();
        uint64_t q = 1;
        for (unsigned i = 1; i <= e; ++i) {
            q *= p;
            for (std::size_t j = 0; j < sz; ++j) divs.push_back(divs[j] * q);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

inline int moebius(uint64_t n) {
    auto tab = sieve();
    if (n <= tab->bound) return tab->mu[n];
    int m = 1;
    for (const auto& [p, e] : factorize(n)) {
        if (e > 1) return 0;
        m = -m;
    }
    return m;
}

inline uint64_t euler_phi(uint64_t n) {
    auto tab = sieve();
    if (n <= tab->bound) return tab->phi[n];
    uint64_t r = n;
    for (const auto& [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

inline uint64_t divisor_count(uint64_t n) {
    uint64_t d = 1;
    for (const auto& [p, e] : factorize(n)) d *= e + 1;
    return d;
}

inline bool is_squarefree(uint64_t n) { return moebius(n) != 0; }

// ---------------------------------------------------------------------------
// Squarefree decomposition d = d1 * d2^2
// ---------------------------------------------------------------------------

struct squarefree_split {
    uint64_t d1;  // squarefree part
    uint64_t d2;  // d = d1 * d2^2
};

inline squarefree_split squarefree_decompose(uint64_t d) {
    if (d == 0) throw numeric_error("squarefree_decompose: d must be positive");
    uint64_t d1 = 1, d2 = 1;
    for (const auto& [p, e] : factorize(d)) {
        if (e & 1u) d1 *= p;
        for (unsigned i = 0; i < e / 2; ++i) d2 *= p;
    }
    return {d1, d2};
}

// ---------------------------------------------------------------------------
// tau*, mu*, generalized von Mangoldt
// ---------------------------------------------------------------------------

// tau*(p^e) = (e+1) + e/sqrt(p): among d = p^j | p^{2e}, d1 = 1 for even j
// and d1 = p for odd j.
inline double tau_star(uint64_t n) {
    if (n == 0) throw numeric_error("tau_star: n must be positive");
    double r = 1.0;
    for (const auto& [p, e] : factorize(n))
        r *= (e + 1) + e / std::sqrt(static_cast<double>(p));
    return r;
}

inline double mu_star(uint64_t j) {
    if (j == 0) throw numeric_error("mu_star: j must be positive");
    double r = 1.0;
    for (const auto& [p, e] : factorize(j)) {
        if (e > 1) return 0.0;
        r *= -1.0 - 1.0 / std::sqrt(static_cast<double>(p));
    }
    return r;
}

// Lambda_j(n) = sum_{d|n} mu(d) log^j (n/d); supported on integers with at
// most j distinct prime factors. Orders above 4 are rejected.
inline double gen_von_mangoldt(unsigned order, uint64_t n) {
    if (order > 4) throw numeric_error("gen_von_mangoldt: order must be <= 4");
    if (n == 0) throw numeric_error("gen_von_mangoldt: n must be positive");
    if (order == 0) return n == 1 ? 1.0 : 0.0;
    auto fac = factorize(n);
    if (fac.size() > order) return 0.0;  // exact support property
    double s = 0.0;
    for (uint64_t d : divisors(n)) {
        int m = moebius(d);
        if (m == 0) continue;
        double l = std::log(static_cast<double>(n / d));
        double t = 1.0;
        for (unsigned i = 0; i < order; ++i) t *= l;
        s += m * t;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Exponential sums
// ---------------------------------------------------------------------------

// Value of a complete exponential sum after projecting away a (numerically
// zero) imaginary part. The projection tolerance is part of the contract.
struct exp_sum_value {
    double value;
    double imag_residue;
};

inline constexpr double kExpSumImagTol = 1e-9;

inline int64_t mod_inverse(int64_t a, int64_t m) {
    int64_t old_r = a % m, r = m;
    if (old_r < 0) old_r += m;
    int64_t old_s = 1, s = 0;
    while (r != 0) {
        int64_t q = old_r / r;
        int64_t t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1) throw numeric_error("mod_inverse: not invertible");
    return old_s < 0 ? old_s + m : old_s;
}

namespace detail {

// e(j/c) table for j in [0, c)
inline std::vector<std::complex<double>> root_table(uint64_t c) {
    std::vector<std::complex<double>> e(c);
    for (uint64_t j = 0; j < c; ++j) {
        double x = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(c);
        e[j] = {std::cos(x), std::sin(x)};
    }
    return e;
}

inline exp_sum_value project_real(std::complex<double> z, const char* what) {
    if (std::abs(z.imag()) > kExpSumImagTol * std::max(1.0, std::abs(z.real())) &&
        std::abs(z.imag()) > kExpSumImagTol)
        throw numeric_error(std::string(what) + ": imaginary residue above tolerance");
    return {z.real(), std::abs(z.imag())};
}

}  // namespace detail

// S(n,m;c) = sum_{g mod c, (g,c)=1} e((n g + m gbar)/c)
inline exp_sum_value kloosterman(int64_t n, int64_t m, uint64_t c) {
    if (c == 0) throw numeric_error("kloosterman: c must be positive");
    if (c == 1) return {1.0, 0.0};
    auto e = detail::root_table(c);
    int64_t cc = static_cast<int64_t>(c);
    auto red = [cc](int64_t x) {
        x %= cc;
        return x < 0 ? x + cc : x;
    };
    int64_t nr = red(n), mr = red(m);
    std::complex<double> s = 0.0;
    for (int64_t g = 1; g < cc; ++g) {
        if (std::gcd(g, cc) != 1) continue;
        int64_t gbar = mod_inverse(g, cc);
        s += e[red(nr * g + mr * gbar)];
    }
    return detail::project_real(s, "kloosterman");
}

// Ramanujan sum, closed form r_c(n) = mu(c/(n,c)) phi(c) / phi(c/(n,c)).
inline double ramanujan_sum_closed(uint64_t c, int64_t n) {
    if (c == 0) throw numeric_error("ramanujan_sum: c must be positive");
    uint64_t g = std::gcd(static_cast<uint64_t>(n < 0 ? -n : n), c);
    if (n == 0) g = c;
    uint64_t q = c / g;
    int mu_q = moebius(q);
    if (mu_q == 0) return 0.0;
    return static_cast<double>(mu_q) * static_cast<double>(euler_phi(c)) /
           static_cast<double>(euler_phi(q));
}

// Direct sum over units, for cross-checking the closed form.
inline exp_sum_value ramanujan_sum_direct(uint64_t c, int64_t n) {
    if (c == 0) throw numeric_error("ramanujan_sum: c must be positive");
    if (c == 1) return {1.0, 0.0};
    auto e = detail::root_table(c);
    int64_t cc = static_cast<int64_t>(c);
    int64_t nr = ((n % cc) + cc) % cc;
    std::complex<double> s = 0.0;
    for (int64_t a = 1; a < cc; ++a) {
        if (std::gcd(a, cc) != 1) continue;
        s += e[(a * nr) % cc];
    }
    return detail::project_real(s, "ramanujan_sum");
}

// Closed form checked against the direct sum before returning.
inline exp_sum_value ramanujan_sum(uint64_t c, int64_t n) {
    double closed = ramanujan_sum_closed(c, n);
    auto direct = ramanujan_sum_direct(c, n);
    if (std::abs(direct.value - closed) > kExpSumImagTol * std::max(1.0, std::abs(closed)))
        throw numeric_error("ramanujan_sum: closed form disagrees with direct sum");
    return {closed, direct.imag_residue};
}

// sum_{a mod c} S(a^2, b^2, c) e(2ab/c), evaluated directly. Equals
// phi(c) sqrt(c) when c is a square and vanishes otherwise.
inline double kloosterman_square_average(uint64_t b, uint64_t c) {
    if (b == 0 || c == 0) throw numeric_error("kloosterman_square_average: b, c must be positive");
    if (c == 1) return 1.0;
    auto e = detail::root_table(c);
    int64_t cc = static_cast<int64_t>(c);
    // collect unit inverses once
    std::vector<int64_t> units, inv;
    for (int64_t g = 1; g < cc; ++g) {
        if (std::gcd(g, cc) != 1) continue;
        units.push_back(g);
        inv.push_back(mod_inverse(g, cc));
    }
    int64_t b2 = static_cast<int64_t>((b % c) * (b % c) % c);
    std::complex<double> total = 0.0;
    for (int64_t a = 0; a < cc; ++a) {
        int64_t a2 = (a * a) % cc;
        std::complex<double> kl = 0.0;
        for (std::size_t i = 0; i < units.size(); ++i)
            kl += e[(a2 * inv[i] + b2 * units[i]) % cc];
        total += kl * e[(2 * a * static_cast<int64_t>(b % c)) % cc];
    }
    auto v = detail::project_real(total, "kloosterman_square_average");
    return v.value;
}

inline double kloosterman_square_average_closed(uint64_t c) {
    uint64_t root;
    if (!is_square(c, &root)) return 0.0;
    return static_cast<double>(euler_phi(c)) * static_cast<double>(root);
}

// Weil: |S(n,m,c)| <= d(c) sqrt(c) sqrt((n,m,c)), with (0,0,c) read as c.
inline bool weil_check(int64_t n, int64_t m, uint64_t c) {
    uint64_t an = static_cast<uint64_t>(n < 0 ? -n : n);
    uint64_t am = static_cast<uint64_t>(m < 0 ? -m : m);
    uint64_t g = std::gcd(std::gcd(an, am), c);
    if (an == 0 && am == 0) g = c;
    double bound = static_cast<double>(divisor_count(c)) * std::sqrt(static_cast<double>(c)) *
                   std::sqrt(static_cast<double>(g));
    double s = kloosterman(n, m, c).value;
    return std::abs(s) <= bound + 1e-7;
}

}  // namespace symsq
