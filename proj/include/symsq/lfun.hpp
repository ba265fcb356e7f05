#pragma once

// Central-value machinery for the symmetric square: the smoothing weight
// V_k(xi) behind the approximate functional equation, central values
// L(1/2, sym^2 f), the value L(1, sym^2 f) entering harmonic weights, the
// Petersson trace-formula closure, the averaged-Bessel identity, and the
// two-variable weight W(xi1, xi2, v).
//
// The completed factor is
//   L_inf(s) = pi^{-3s/2} Gamma((s+1)/2) Gamma((s+k-1)/2) Gamma((s+k)/2)
//            = pi^{-3s/2 + 1/2} 2^{2-s-k} Gamma((s+1)/2) Gamma(s+k-1),
// and V_k(xi) = (1/2pi i) int_(A) [L_inf(1/2+y)/L_inf(1/2)] zeta(1+2y) xi^{-y} dy/y.
// Two numerically independent kernels are provided (three-gamma quotient and
// the duplication-collapsed G(y) Gamma(y+k-1/2)/Gamma(k-1/2)); both evaluate
// the same function and must agree, which is one of the standing contracts.
// The large-weight kernel replaces the gamma quotient by k^y; it drops an
// O(1/k) term and is kept for asymptotic diagnostics only.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "symsq/arith.hpp"
#include "symsq/bump.hpp"
#include "symsq/contour.hpp"
#include "symsq/hecke.hpp"
#include "symsq/specfun.hpp"
#include "symsq/util.hpp"

namespace symsq {

// ---------------------------------------------------------------------------
// completed gamma factor
// ---------------------------------------------------------------------------

struct completed_factors {
    int weight;

    cplx log_value(cplx s) const {
        double k = weight;
        return -1.5 * s * std::log(M_PI) + log_gamma((s + 1.0) / 2.0) +
               log_gamma((s + k - 1.0) / 2.0) + log_gamma((s + k) / 2.0);
    }
    // duplication-collapsed form
    cplx log_value_collapsed(cplx s) const {
        double k = weight;
        return (-1.5 * s + 0.5) * std::log(M_PI) + (2.0 - s - k) * std::log(2.0) +
               log_gamma((s + 1.0) / 2.0) + log_gamma(s + k - 1.0);
    }
};

// ---------------------------------------------------------------------------
// V_k evaluators
// ---------------------------------------------------------------------------

enum class v_kernel {
    full_gamma,    // L_inf(1/2+y)/L_inf(1/2) via the three-gamma form
    collapsed,     // G(y) Gamma(y+k-1/2)/Gamma(k-1/2)
    large_weight,  // G(y) k^y  (omits an O(1/k) correction)
};

namespace detail {

inline std::function<cplx(cplx)> v_base(int k, v_kernel kern) {
    double kk = k;
    switch (kern) {
        case v_kernel::full_gamma: {
            completed_factors li{k};
            double ref = li.log_value(cplx(0.5, 0.0)).real();
            return [li, ref](cplx y) {
                return std::exp(li.log_value(0.5 + y) - ref) * zeta(1.0 + 2.0 * y) / y;
            };
        }
        case v_kernel::collapsed: {
            double ref = log_gamma(cplx(kk - 0.5, 0.0)).real();
            return [kk, ref](cplx y) {
                return std::exp(log_g_factor(y) + log_gamma(y + kk - 0.5) - ref) *
                       zeta(1.0 + 2.0 * y) / y;
            };
        }
        case v_kernel::large_weight:
            return [kk](cplx y) {
                return std::exp(log_g_factor(y) + y * std::log(kk)) * zeta(1.0 + 2.0 * y) / y;
            };
    }
    throw numeric_error("v_base: unknown kernel");
}

}  // namespace detail

// Cached V_k evaluator for one weight. Carries a coarse and a refined node
// set; `check(xi)` verifies the two agree, the plain call uses the fine set.
class v_weight_evaluator {
  public:
    v_weight_evaluator(int k, v_kernel kern = v_kernel::collapsed, double abscissa = 1.0,
                       double max_log_xi = 11.0)
        : weight_(k), abscissa_(abscissa) {
        if (k < 12) throw numeric_error("v_weight: weight must be >= 12");
        auto base = detail::v_base(k, kern);
        coarse_ = mellin_evaluator(make_vertical_line(abscissa, 44.0, max_log_xi, 1), base);
        fine_ = mellin_evaluator(make_vertical_line(abscissa, 48.0, max_log_xi, 2), base);
    }

    double operator()(double xi) const {
        if (!(xi > 0.0)) throw numeric_error("v_weight: xi must be positive");
        cplx v = fine_(xi);
        if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v.real())))
            throw numeric_error("v_weight: result has non-real residue");
        return v.real();
    }

    // node-doubling convergence check
    double check(double xi, double tol = 1e-8) const {
        double a = coarse_(xi).real();
        double b = fine_(xi).real();
        if (std::abs(a - b) > tol)
            throw numeric_error("v_weight: quadrature did not converge under node doubling");
        return b;
    }

    int weight() const { return weight_; }
    double abscissa() const { return abscissa_; }

  private:
    int weight_;
    double abscissa_;
    mellin_evaluator coarse_, fine_;
};

// One-off evaluation with the convergence check. For xi far beyond k the
// contour is moved right so the tiny value is produced without cancellation.
inline double v_weight(int k, double xi, v_kernel kern = v_kernel::collapsed) {
    double abscissa = xi > 2.0 * k ? 5.0 : 1.0;
    double mlx = std::abs(std::log(std::max(xi, 2.0))) + 4.0;
    v_weight_evaluator ev(k, kern, abscissa, mlx);
    return ev.check(xi, 1e-8);
}

// ---------------------------------------------------------------------------
// central values L(1/2, sym^2 f)
// ---------------------------------------------------------------------------

struct central_value_record {
    int weight = 0;
    int index = 0;
    double value = 0.0;
    long truncation = 0;
    double tail_estimate = 0.0;
};

// L(1/2, sym^2 f) = 2 sum_{n>=1} a_f(n^2) n^{-1/2} V_k(n), truncated where the
// decay of V_k makes the tail negligible (default cap 12k).
inline central_value_record central_value(const hecke_eigenform& f,
                                          const v_weight_evaluator& vk, double tolerance = 1e-9,
                                          double trunc_factor = 12.0) {
    int k = f.weight;
    long cap = static_cast<long>(trunc_factor * k);
    kahan_sum sum;
    long n = 1;
    auto dsq_bound = [](uint64_t x) {  // d(x^2) <= d(x)^2
        double d = static_cast<double>(divisor_count(x));
        return d * d;
    };
    for (; n <= cap; ++n) {
        double v = vk(static_cast<double>(n));
        double term = 2.0 * f.coefficient_sq(static_cast<uint64_t>(n)) /
                      std::sqrt(static_cast<double>(n)) * v;
        sum.add(term);
        // V_k decays superpolynomially past k; |a(n^2)| <= d(n^2) <= d(n)^2
        if (n > k && std::abs(v) * 2.0 * dsq_bound(static_cast<uint64_t>(n)) /
                             std::sqrt(static_cast<double>(n)) <
                         tolerance * 1e-3)
            break;
    }
    // explicit tail majorant over the next block
    double tail = 0.0;
    for (long m = n + 1; m <= n + 256 && m <= 4 * cap; ++m) {
        tail += 2.0 * dsq_bound(static_cast<uint64_t>(m)) / std::sqrt(static_cast<double>(m)) *
                std::abs(vk(static_cast<double>(m)));
    }
    central_value_record rec;
    rec.weight = k;
    rec.index = f.index;
    rec.value = sum.value();
    rec.truncation = std::min(n, cap);
    rec.tail_estimate = tail;
    return rec;
}

inline central_value_record central_value(const hecke_eigenform& f, double tolerance = 1e-9,
                                          double trunc_factor = 12.0) {
    v_weight_evaluator vk(f.weight, v_kernel::collapsed, 1.0,
                          std::log(trunc_factor * f.weight * 4.0) + 2.0);
    return central_value(f, vk, tolerance, trunc_factor);
}

// ---------------------------------------------------------------------------
// L(1, sym^2 f) by a symmetric two-sided representation
// ---------------------------------------------------------------------------

// From Lambda(s) = L_inf(s) L(s) entire and Lambda(s) = Lambda(1-s):
//   Lambda(1) = (1/2pi i) int_(A) Lambda(1+y) X^y dy/y
//             + (1/2pi i) int_(A) Lambda(u) X^{-u} du/u,
// the pole at y=0 supplying Lambda(1). Expanding both integrals in the
// Dirichlet series c_m = sum_{d^2 e = m} a(e^2) gives
//   L(1) = sum_m (c_m/m) V1(m/X) + sum_m c_m V0(m X),
// with V1, V0 the Mellin pair of L_inf(1+y)/L_inf(1) and L_inf(u)/L_inf(1).
// X > 0 balances the two sums; the value is X-independent.
class l_one_evaluator {
  public:
    explicit l_one_evaluator(int k, double cutoff = 1.0) : weight_(k), cutoff_(cutoff) {
        if (cutoff <= 0.0) throw numeric_error("l_one_symsq: cutoff must be positive");
        completed_factors li{k};
        double ref = li.log_value(cplx(1.0, 0.0)).real();
        double mlx = std::log(std::max(64.0, 4.0 * k * std::max(cutoff, 1.0 / cutoff))) + 2.0;
        auto line = make_vertical_line(2.0, 48.0, mlx, 1);
        v1_ = mellin_evaluator(line, [li, ref](cplx y) {
            return std::exp(li.log_value(1.0 + y) - ref) / y;
        });
        v0_ = mellin_evaluator(line, [li, ref](cplx u) {
            return std::exp(li.log_value(u) - ref) / u;
        });
    }

    // series length is adaptive: terms stop once both weights sit at the
    // quadrature noise floor. Requires prime coverage up to the stopping
    // index and surfaces the coefficient error otherwise.
    double operator()(const hecke_eigenform& f) const {
        kahan_sum sum;
        // weights below ~1e-13 of the leading scale are quadrature noise;
        // the enforced decay of V1/V0 keeps the discarded tail ~1e-11 of it
        const double floor_scale = 1e-13 * (1.0 + std::abs(v1_(1.0 / cutoff_).real()));
        const uint64_t cap = static_cast<uint64_t>(
            2.0 * weight_ * std::max(cutoff_, 1.0 / cutoff_)) + 64;
        int quiet = 0;
        for (uint64_t m = 1; m <= cap; ++m) {
            double w1 = v1_(static_cast<double>(m) / cutoff_).real();
            double w0 = v0_(static_cast<double>(m) * cutoff_).real();
            double cm = 0.0;
            for (uint64_t d = 1; d * d <= m; ++d) {
                if (m % (d * d) == 0) cm += f.coefficient_sq(m / (d * d));
            }
            sum.add(cm / static_cast<double>(m) * w1 + cm * w0);
            double env = static_cast<double>(divisor_count(m) * 4) *
                         (std::abs(w1) + std::abs(w0));
            if (env < floor_scale) {
                if (++quiet >= 8) break;
            } else {
                quiet = 0;
            }
        }
        double val = sum.value();
        if (!(val > 0.0))
            throw numeric_error("l_one_symsq: non-positive value, coefficient data is corrupt");
        return val;
    }

    int weight() const { return weight_; }
    double cutoff() const { return cutoff_; }

  private:
    int weight_;
    double cutoff_;
    mellin_evaluator v1_, v0_;
};

inline double l_one_symsq(const hecke_eigenform& f, double cutoff = 1.0) {
    return l_one_evaluator(f.weight, cutoff)(f);
}

// fill l1_symsq on a family (no-op for forms already carrying a value)
inline void ensure_l_one(std::vector<hecke_eigenform>& forms) {
    if (forms.empty()) return;
    l_one_evaluator ev(forms.front().weight);
    for (auto& f : forms)
        if (!(f.l1_symsq > 0.0)) f.l1_symsq = ev(f);
}

// ---------------------------------------------------------------------------
// harmonic averages and the trace-formula closure
// ---------------------------------------------------------------------------

// (2 pi^2/(k-1)) sum_f alpha_f / L(1, sym^2 f)
inline double harmonic_sum(int k, const std::vector<hecke_eigenform>& forms,
                           const std::vector<double>& alpha) {
    if (forms.size() != alpha.size())
        throw numeric_error("harmonic_sum: need one alpha per form of H_k");
    std::size_t expected = static_cast<std::size_t>(dim_cusp_forms(k));
    if (forms.size() != expected)
        throw numeric_error("harmonic_sum: family is missing forms of weight " + std::to_string(k));
    kahan_sum s;
    for (std::size_t i = 0; i < forms.size(); ++i) {
        if (!(forms[i].l1_symsq > 0.0))
            throw numeric_error("harmonic_sum: forms must carry L(1, sym^2 f)");
        s.add(alpha[i] / forms[i].l1_symsq);
    }
    return 2.0 * M_PI * M_PI / (k - 1) * s.value();
}

struct petersson_report {
    double lhs = 0.0;        // harmonic sum of a(n) a(m)
    double rhs = 0.0;        // delta + Kloosterman/Bessel side
    double defect = 0.0;     // |lhs - rhs|
    double tail_bound = 0.0; // estimate for the c > c_max remainder
};

// S(n,m;c) for c = 1..c_max (the row is independent of the weight)
inline std::vector<double> kloosterman_row(uint64_t n, uint64_t m, uint64_t c_max) {
    std::vector<double> row(c_max + 1, 0.0);
    for (uint64_t c = 1; c <= c_max; ++c)
        row[c] = kloosterman(static_cast<int64_t>(n), static_cast<int64_t>(m), c).value;
    return row;
}

inline double petersson_offdiag(int k, uint64_t n, uint64_t m, const std::vector<double>& s_row) {
    double sqnm = std::sqrt(static_cast<double>(n) * static_cast<double>(m));
    double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;  // i^k for even k
    kahan_sum sum;
    for (uint64_t c = 1; c < s_row.size(); ++c) {
        double t = 4.0 * M_PI * sqnm / static_cast<double>(c);
        sum.add(s_row[c] / static_cast<double>(c) * bessel_j(static_cast<unsigned>(k - 1), t));
    }
    return 2.0 * M_PI * sign * sum.value();
}

// remainder estimate from Weil plus the small-argument Bessel envelope
inline double petersson_tail_bound(int k, uint64_t n, uint64_t m, uint64_t c_max) {
    double sqnm = std::sqrt(static_cast<double>(n) * static_cast<double>(m));
    double lg_fac = std::lgamma(static_cast<double>(k));
    double tail = 0.0;
    for (uint64_t c = c_max + 1; c <= c_max + 128; ++c) {
        double t = 4.0 * M_PI * sqnm / static_cast<double>(c);
        double lenv = (k - 1) * std::log(t / 2.0) - lg_fac;
        double g = std::sqrt(static_cast<double>(std::gcd(std::gcd(n, m), c)));
        tail += static_cast<double>(divisor_count(c)) / std::sqrt(static_cast<double>(c)) * g *
                (lenv < -745.0 ? 0.0 : std::exp(lenv));
    }
    return 2.0 * M_PI * tail * 1.02;  // the summand decays like c^{-(k-1)}, block covers the rest
}

inline petersson_report petersson_check(std::vector<hecke_eigenform>& forms, uint64_t n,
                                        uint64_t m, uint64_t c_max = 1000) {
    if (forms.empty()) throw numeric_error("petersson_check: empty family");
    int k = forms.front().weight;
    ensure_l_one(forms);
    std::vector<double> alpha;
    alpha.reserve(forms.size());
    for (const auto& f : forms) alpha.push_back(f.coefficient(n) * f.coefficient(m));
    petersson_report rep;
    rep.lhs = harmonic_sum(k, forms, alpha);
    auto row = kloosterman_row(n, m, c_max);
    rep.rhs = (n == m ? 1.0 : 0.0) + petersson_offdiag(k, n, m, row);
    rep.defect = std::abs(rep.lhs - rep.rhs);
    rep.tail_bound = petersson_tail_bound(k, n, m, c_max);
    return rep;
}

// ---------------------------------------------------------------------------
// averaged J-Bessel identity
// ---------------------------------------------------------------------------

struct bessel_average_report {
    double lhs = 0.0;          // sum over even k of 2 i^k h((k-1)/K) J_{k-1}(t)
    double main_term = 0.0;    // -(K/sqrt t) Im(e^{-2pi i/8} e^{it} hbar(K^2/2t))
    double error_budget = 0.0; // (t/K^4) int v^4 |hhat(v)| dv
};

inline bessel_average_report bessel_average_check(double K, double t, const bump_weight& h) {
    if (!(t > 0.0) || K < 20.0) throw numeric_error("bessel_average_check: need t > 0, K >= 20");
    bessel_average_report rep;

    // finite k-range from the support of h
    int k_lo = static_cast<int>(std::floor(K * h.lo())) - 2;
    int k_hi = static_cast<int>(std::ceil(K * h.hi())) + 3;
    if (k_lo < 2) k_lo = 2;
    auto js = bessel_j_batch(static_cast<unsigned>(k_hi), t);
    kahan_sum lhs;
    for (int k = k_lo + (k_lo % 2); k <= k_hi; k += 2) {
        double hv = h((k - 1.0) / K);
        if (hv == 0.0) continue;
        double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
        lhs.add(2.0 * sign * hv * js[static_cast<unsigned>(k - 1)]);
    }
    rep.lhs = lhs.value();

    cplx hb = h.hbar(0.0, K * K / (2.0 * t));
    cplx phase = std::exp(cplx(0.0, t - M_PI / 4.0));
    rep.main_term = -K / std::sqrt(t) * (phase * hb).imag();

    // int v^4 |hhat(v)| dv, truncated where the transform has decayed
    double integral = 0.0;
    const double dv = 0.125;
    double v = 0.0;
    int quiet = 0;
    while (v < 400.0) {
        double f = std::pow(v, 4) * std::abs(h.fourier(v)) +
                   std::pow(v, 4) * std::abs(h.fourier(-v));
        integral += f * dv;
        if (f < 1e-16) {
            if (++quiet > 16) break;
        } else
            quiet = 0;
        v += dv;
    }
    rep.error_budget = t / std::pow(K, 4) * integral;
    return rep;
}

// ---------------------------------------------------------------------------
// the two-variable weight W(xi1, xi2, v)
// ---------------------------------------------------------------------------

// W(xi1,xi2,v) = (1/2pi i)^2 int int G(y) G(x) [zeta(1+2y)/y][zeta(1+2x)/x]
//                xi1^{-y} xi2^{-x} hbar_{x+y}(v) dy dx
// Expanding hbar_{x+y}(v) = sqrt(2/pi) int h(w) w^{x+y} e^{i w^2 v} dw and
// swapping orders turns the double contour into a single w-quadrature of a
// product of two one-dimensional Mellin evaluations:
//   W = sqrt(2/pi) int h(w) e^{i w^2 v} GV(xi1/w) GV(xi2/w) dw,
// with GV(xi) = (1/2pi i) int G(y) zeta(1+2y)/y xi^{-y} dy.
class w_weight_evaluator {
  public:
    explicit w_weight_evaluator(const bump_weight& h, double abscissa = 0.75,
                                double max_log_xi = 12.0)
        : h_(h) {
        auto base = [](cplx y) {
            return std::exp(log_g_factor(y)) * zeta(1.0 + 2.0 * y) / y;
        };
        gv_ = mellin_evaluator(make_vertical_line(abscissa, 48.0, max_log_xi, 1), base);
        gv_fine_ = mellin_evaluator(make_vertical_line(abscissa, 52.0, max_log_xi, 2), base);
    }

    cplx operator()(double xi1, double xi2, double v, bool refined = false) const {
        if (!(xi1 > 0.0 && xi2 > 0.0)) throw numeric_error("w_weight: xi must be positive");
        const auto& gv = refined ? gv_fine_ : gv_;
        // e^{i w^2 v} phase swing over the support sets the panel count
        double osc = std::abs(v) * (h_.hi() * h_.hi() - h_.lo() * h_.lo());
        int panels = 24 + static_cast<int>(osc / 4.0);
        if (refined) panels *= 2;
        auto r = detail::composite_gl(h_.lo(), h_.hi(), std::min(panels, 6000));
        cplx s = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            double w = r.x[i];
            double hv = h_(w);
            if (hv == 0.0) continue;
            s += r.w[i] * hv * std::exp(cplx(0.0, w * w * v)) * gv(xi1 / w) * gv(xi2 / w);
        }
        return std::sqrt(2.0 / M_PI) * s;
    }

  private:
    bump_weight h_;
    mellin_evaluator gv_, gv_fine_;
};

// convergence-checked single evaluation
inline cplx w_weight(double xi1, double xi2, double v, const bump_weight& h) {
    w_weight_evaluator ev(h, 0.75,
                          std::abs(std::log(std::max(xi1, 2.0))) +
                              std::abs(std::log(std::max(xi2, 2.0))) + 6.0);
    cplx a = ev(xi1, xi2, v, false);
    cplx b = ev(xi1, xi2, v, true);
    if (std::abs(a - b) > 1e-6 * (1.0 + std::abs(b)))
        throw numeric_error("w_weight: quadrature did not converge under node doubling");
    return b;
}

}  // namespace symsq
