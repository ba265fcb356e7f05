#pragma once

// The optimal mollifier: coefficients u_j, v_j on squarefree support, the
// x <-> y change of variables that diagonalizes the quadratic form
//   sum_a sum_{e|a^2} sum_{(r1,r2)=1} sqrt(e)/(a^2 r1 r2)
//     tau(r1) tau(r2) tau(a^2/e) x_{a r1} x_{a r2}  =  sum_j v_j y_j^2,
// the optimizing choice y_j = u_j / v_j, and the closed-form asymptotic
// main terms the optimized moments approach.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "symsq/arith.hpp"
#include "symsq/bump.hpp"
#include "symsq/hecke.hpp"
#include "symsq/specfun.hpp"
#include "symsq/util.hpp"

namespace symsq {

using sparse_vec = std::map<uint64_t, double>;  // squarefree index -> value

// v_j = (1/j) prod_{p|j} (1 + 2/sqrt(p) - 2/p^{3/2} - 1/p^2) for squarefree j
inline double v_coeff(uint64_t j) {
    if (j == 0 || !is_squarefree(j))
        throw numeric_error("v_coeff: defined on squarefree j only");
    double prod = 1.0;
    for (const auto& [p, e] : factorize(j)) {
        double sp = std::sqrt(static_cast<double>(p));
        prod *= 1.0 + 2.0 / sp - 2.0 / (sp * static_cast<double>(p)) -
                1.0 / (static_cast<double>(p) * static_cast<double>(p));
    }
    return prod / static_cast<double>(j);
}

// the defining double sum (1/j^2) sum_{ab=j} mu(b) tau(b)^2 sum_{e|a^2} sqrt(e) tau(a^2/e),
// kept as a cross-check route
inline double v_coeff_double_sum(uint64_t j) {
    if (j == 0 || !is_squarefree(j))
        throw numeric_error("v_coeff: defined on squarefree j only");
    double total = 0.0;
    for (uint64_t a : divisors(j)) {
        uint64_t b = j / a;
        int mb = moebius(b);
        if (mb == 0) continue;
        double tb = tau_star(b);
        double inner = 0.0;
        for (uint64_t e : divisors(a * a))
            inner += std::sqrt(static_cast<double>(e)) * tau_star(a * a / e);
        total += mb * tb * tb * inner;
    }
    return total / (static_cast<double>(j) * static_cast<double>(j));
}

// u_j = (1/hhat(0)) (1/j) sum_{n r = j} mu(n) tau(n) int h(u) (log(uK/r) + C) du
inline double u_coeff(uint64_t j, double K, const bump_weight& h) {
    if (j == 0 || !is_squarefree(j))
        throw numeric_error("u_coeff: defined on squarefree j only");
    if (!(K > 1.0)) throw numeric_error("u_coeff: K must exceed 1");
    double mass = h.mass();
    double log_u_mean = h.integrate([](double u) { return std::log(u); }) / mass;
    double C = v4_constant();
    double s = 0.0;
    for (uint64_t n : divisors(j)) {
        int mn = moebius(n);
        if (mn == 0) continue;
        uint64_t r = j / n;
        s += mn * tau_star(n) * (std::log(K / static_cast<double>(r)) + C + log_u_mean);
    }
    return s / static_cast<double>(j);
}

// ---------------------------------------------------------------------------
// change of variables
// ---------------------------------------------------------------------------

// y_j = sum_r tau(r) x_{jr} / r  (all indices squarefree, products <= M)
inline sparse_vec y_from_x(const sparse_vec& x, uint64_t M) {
    sparse_vec y;
    for (uint64_t j = 1; j <= M; ++j) {
        if (!is_squarefree(j)) continue;
        double s = 0.0;
        for (uint64_t r = 1; j * r <= M; ++r) {
            auto it = x.find(j * r);
            if (it == x.end()) continue;
            s += tau_star(r) * it->second / static_cast<double>(r);
        }
        if (s != 0.0) y[j] = s;
    }
    return y;
}

// x_r = sum_d y_{dr} tau(d) mu(d) / d
inline sparse_vec x_from_y(const sparse_vec& y, uint64_t M) {
    sparse_vec x;
    for (uint64_t r = 1; r <= M; ++r) {
        if (!is_squarefree(r)) continue;
        double s = 0.0;
        for (uint64_t d = 1; d * r <= M; ++d) {
            int md = moebius(d);
            if (md == 0) continue;
            auto it = y.find(d * r);
            if (it == y.end()) continue;
            s += it->second * tau_star(d) * md / static_cast<double>(d);
        }
        if (s != 0.0) x[r] = s;
    }
    return x;
}

// ---------------------------------------------------------------------------
// the quadratic form, brute and diagonal routes
// ---------------------------------------------------------------------------

inline double quad_form_brute(const sparse_vec& x, uint64_t M) {
    if (M > 100) throw numeric_error("quad_form_brute: brute-force route capped at M = 100");
    for (const auto& [r, v] : x)
        if (r > M || !is_squarefree(r))
            throw numeric_error("quad_form_brute: support must be squarefree and <= M");
    kahan_sum total;
    for (uint64_t alpha = 1; alpha <= M; ++alpha) {
        auto xa = [&](uint64_t r) {
            auto it = x.find(alpha * r);
            return it == x.end() ? 0.0 : it->second;
        };
        for (uint64_t e : divisors(alpha * alpha)) {
            double coef = std::sqrt(static_cast<double>(e)) * tau_star(alpha * alpha / e) /
                          (static_cast<double>(alpha) * static_cast<double>(alpha));
            for (uint64_t r1 = 1; alpha * r1 <= M; ++r1) {
                double x1 = xa(r1);
                if (x1 == 0.0) continue;
                for (uint64_t r2 = 1; alpha * r2 <= M; ++r2) {
                    if (std::gcd(r1, r2) != 1) continue;
                    double x2 = xa(r2);
                    if (x2 == 0.0) continue;
                    total.add(coef * tau_star(r1) * tau_star(r2) * x1 * x2 /
                              (static_cast<double>(r1) * static_cast<double>(r2)));
                }
            }
        }
    }
    return total.value();
}

inline double quad_form_diag(const sparse_vec& y) {
    kahan_sum s;
    for (const auto& [j, yj] : y) s.add(v_coeff(j) * yj * yj);
    return s.value();
}

// ---------------------------------------------------------------------------
// the mollifier itself
// ---------------------------------------------------------------------------

struct mollifier_spec {
    double K = 0.0;
    double a = 0.0;
    uint64_t M = 0;
    sparse_vec y;
    sparse_vec x;
    std::string h_id;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema"] = "symsq/mollifier/v1";
        j["K"] = format_g15(K);
        j["a"] = format_g15(a);
        j["M"] = M;
        j["h"] = h_id;
        nlohmann::json jy = nlohmann::json::object(), jx = nlohmann::json::object();
        for (const auto& [k, v] : y) jy[std::to_string(k)] = format_g15(v);
        for (const auto& [k, v] : x) jx[std::to_string(k)] = format_g15(v);
        j["y"] = jy;
        j["x"] = jx;
        return j;
    }

    static mollifier_spec from_json(const nlohmann::json& j) {
        if (j.value("schema", "") != "symsq/mollifier/v1")
            throw io_error("mollifier document has an unknown schema tag");
        mollifier_spec s;
        s.K = std::stod(j.at("K").get<std::string>());
        s.a = std::stod(j.at("a").get<std::string>());
        s.M = j.at("M").get<uint64_t>();
        s.h_id = j.at("h").get<std::string>();
        for (const auto& [k, v] : j.at("y").items())
            s.y[std::stoull(k)] = std::stod(v.get<std::string>());
        for (const auto& [k, v] : j.at("x").items())
            s.x[std::stoull(k)] = std::stod(v.get<std::string>());
        return s;
    }
};

// optimal choice y_j = u_j / v_j on squarefree j <= M = floor(K^a)
inline mollifier_spec optimal_mollifier(double K, double a, const bump_weight& h) {
    if (!(a > 0.0 && a < 0.5)) throw config_error("mollifier: a must lie in (0, 1/2)");
    if (!(K > 1.0)) throw config_error("mollifier: K must exceed 1");
    mollifier_spec spec;
    spec.K = K;
    spec.a = a;
    spec.M = static_cast<uint64_t>(std::floor(std::pow(K, a)));
    if (spec.M < 1) spec.M = 1;
    spec.h_id = h.id();
    for (uint64_t j = 1; j <= spec.M; ++j) {
        if (!is_squarefree(j)) continue;
        spec.y[j] = u_coeff(j, K, h) / v_coeff(j);
    }
    spec.x = x_from_y(spec.y, spec.M);
    // transform pair must be a two-sided inverse on this support
    auto back = y_from_x(spec.x, spec.M);
    for (const auto& [j, yj] : spec.y) {
        double b = back.count(j) ? back[j] : 0.0;
        if (std::abs(b - yj) > 1e-12 * std::max(1.0, std::abs(yj)))
            throw numeric_error("mollifier: x<->y transform failed to invert");
    }
    return spec;
}

// M(f) = sum_r x_r a_f(r^2) / sqrt(r)
inline double mollifier_value(const hecke_eigenform& f, const mollifier_spec& spec) {
    kahan_sum s;
    for (const auto& [r, xr] : spec.x)
        s.add(xr * f.coefficient_sq(r) / std::sqrt(static_cast<double>(r)));
    return s.value();
}

// ---------------------------------------------------------------------------
// closed-form asymptotic main terms
// ---------------------------------------------------------------------------

struct asymptotic_prediction {
    double m1_leading = 0.0;          // hhat(0) K log^3 K * a(3+3a+a^2)/6
    double m2_contributions[4] = {};  // the four log-power contributions
    double m2_leading = 0.0;          // their sum = hhat(0) K log^6 K * a(1+a)^3(3+3a+a^2)/18
    double proportion = 0.0;          // 1 - (1+a)^{-3}
};

inline asymptotic_prediction predictions(double K, double a, const bump_weight& h) {
    if (!(a > 0.0 && a < 0.5)) throw config_error("predictions: a must lie in (0, 1/2)");
    asymptotic_prediction p;
    double hh0 = h.mass();
    double lk = std::log(K);
    double base1 = hh0 * K * lk * lk * lk;
    double base2 = base1 * lk * lk * lk;
    p.m1_leading = base1 * a * (3.0 + 3.0 * a + a * a) / 6.0;
    p.m2_contributions[0] = base2 * a * (3.0 + 3.0 * a + a * a) / 18.0;
    p.m2_contributions[1] = base2 * a * a * (2.0 + a) * (2.0 + a) / 8.0;
    p.m2_contributions[2] = base2 * a * a * a * (6.0 + 7.0 * a + 2.0 * a * a) / 12.0;
    p.m2_contributions[3] = base2 * a * a * a * a * (3.0 + 2.0 * a) * (3.0 + 2.0 * a) / 72.0;
    p.m2_leading = p.m2_contributions[0] + p.m2_contributions[1] + p.m2_contributions[2] +
                   p.m2_contributions[3];
    p.proportion = 1.0 - 1.0 / std::pow(1.0 + a, 3);
    return p;
}

// exact rational arithmetic versions of the contribution polynomials
inline mpq_class m2_contribution_exact(int which, const mpq_class& a) {
    switch (which) {
        case 0: return a * (3 + 3 * a + a * a) / 18;
        case 1: return a * a * (2 + a) * (2 + a) / 8;
        case 2: return a * a * a * (6 + 7 * a + 2 * a * a) / 12;
        case 3: return a * a * a * a * (3 + 2 * a) * (3 + 2 * a) / 72;
    }
    throw numeric_error("m2_contribution_exact: index out of range");
}

// sum of the four contributions collapses to a(1+a)^3 (3+3a+a^2)/18, exactly
inline bool m2_sum_identity_exact(const mpq_class& a) {
    mpq_class lhs = m2_contribution_exact(0, a) + m2_contribution_exact(1, a) +
                    m2_contribution_exact(2, a) + m2_contribution_exact(3, a);
    mpq_class rhs = a * (1 + a) * (1 + a) * (1 + a) * (3 + 3 * a + a * a) / 18;
    lhs.canonicalize();
    rhs.canonicalize();
    return lhs == rhs;
}

inline mpq_class proportion_exact(const mpq_class& a) {
    mpq_class one(1);
    mpq_class w = (1 + a) * (1 + a) * (1 + a);
    mpq_class r = one - one / w;
    r.canonicalize();
    return r;
}

// (M1^2 / M2) / (hhat(0) K / 2) -> (1 - (1+a)^{-3}), exactly at the level of
// the leading coefficients: [a(3+3a+a^2)/6]^2 / [a(1+a)^3(3+3a+a^2)/18]
// equals (1 - (1+a)^{-3}) / 2.
inline bool ratio_identity_exact(const mpq_class& a) {
    mpq_class num = a * (3 + 3 * a + a * a) / 6;
    mpq_class lhs = num * num / (a * (1 + a) * (1 + a) * (1 + a) * (3 + 3 * a + a * a) / 18);
    mpq_class rhs = proportion_exact(a) / 2;
    lhs.canonicalize();
    rhs.canonicalize();
    return lhs == rhs;
}

}  // namespace symsq
