#pragma once

// The smooth averaging weight h and its transforms. The canonical instance is
//   h(u) = exp(1/((2u-3)^2 - 1)) on (1,2),
// optionally rescaled onto another positive support interval. Companions:
//   hhat(xi)   = int h(u) e^{-2 pi i u xi} du
//   hbar_z(v)  = int_0^inf h(sqrt u)/sqrt(2 pi u) u^{z/2} e^{iuv} du
//              = sqrt(2/pi) int h(w) w^z e^{i w^2 v} dw
//   hbar~_z(s) = Gamma(s) e^{i pi s/2} sqrt(2/pi) int h(w) w^{z-2s} dw,  0<Re s<1.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "symsq/specfun.hpp"
#include "symsq/util.hpp"

namespace symsq {

// Gauss-Legendre nodes/weights on [-1,1], 16-point rule.
namespace detail {

inline constexpr double kGL16x[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499,
};
inline constexpr double kGL16w[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541,
};

struct panel_rule {
    std::vector<double> x;
    std::vector<double> w;
};

// composite 16-point Gauss-Legendre over [a,b] with `panels` panels
inline panel_rule composite_gl(double a, double b, int panels) {
    panel_rule r;
    r.x.reserve(16 * panels);
    r.w.reserve(16 * panels);
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double mid = a + (p + 0.5) * h, half = 0.5 * h;
        for (int i = 0; i < 8; ++i) {
            r.x.push_back(mid - half * kGL16x[i]);
            r.w.push_back(half * kGL16w[i]);
            r.x.push_back(mid + half * kGL16x[i]);
            r.w.push_back(half * kGL16w[i]);
        }
    }
    return r;
}

}  // namespace detail

class bump_weight {
  public:
    // Canonical bump scaled onto (lo, hi). Rejects supports touching zero.
    static bump_weight make(double lo = 1.0, double hi = 2.0, int panels = 24) {
        if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi))
            throw numeric_error("bump_weight: support must be a bounded interval of positive reals");
        return bump_weight(lo, hi, panels);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    // identifier used in cache/report file names
    std::string id() const {
        return "bump" + format_g15(lo_) + "-" + format_g15(hi_);
    }

    double operator()(double u) const {
        if (u <= lo_ || u >= hi_) return 0.0;
        double v = 1.0 + (u - lo_) / (hi_ - lo_);  // map onto (1,2)
        double q = (2.0 * v - 3.0) * (2.0 * v - 3.0) - 1.0;
        return std::exp(1.0 / q);
    }

    // int h(u) f(u) du over the support; `refined` doubles the panel count
    // for stability checks.
    template <class F>
    double integrate(F&& f, bool refined = false) const {
        const auto& r = refined ? fine_ : rule_;
        kahan_sum s;
        for (std::size_t i = 0; i < r.x.size(); ++i) s.add(r.w[i] * (*this)(r.x[i]) * f(r.x[i]));
        return s.value();
    }

    template <class F>
    cplx integrate_c(F&& f, bool refined = false) const {
        const auto& r = refined ? fine_ : rule_;
        cplx s = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * (*this)(r.x[i]) * f(r.x[i]);
        return s;
    }

    double mass() const { return integrate([](double) { return 1.0; }); }

    // hhat(xi) = int h(u) e^{-2 pi i u xi} du, with panel count scaled to the
    // oscillation wavelength.
    cplx fourier(double xi) const {
        int panels = oscillation_panels(2.0 * M_PI * std::abs(xi) * (hi_ - lo_));
        auto r = detail::composite_gl(lo_, hi_, panels);
        cplx s = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            double ph = -2.0 * M_PI * r.x[i] * xi;
            s += r.w[i] * (*this)(r.x[i]) * cplx(std::cos(ph), std::sin(ph));
        }
        return s;
    }

    // hbar_z(v) = sqrt(2/pi) int h(w) w^z e^{i w^2 v} dw
    cplx hbar(cplx z, double v) const {
        int panels = oscillation_panels(std::abs(v) * (hi_ * hi_ - lo_ * lo_));
        auto r = detail::composite_gl(lo_, hi_, panels);
        cplx s = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            double w = r.x[i];
            double hv = (*this)(w);
            if (hv == 0.0) continue;
            cplx ph = z * std::log(w) + cplx(0.0, w * w * v);
            s += r.w[i] * hv * std::exp(ph);
        }
        return std::sqrt(2.0 / M_PI) * s;
    }

    // Mellin transform hbar~_z(s) for 0 < Re s < 1:
    //   Gamma(s) (cos(pi s/2) + i sin(pi s/2)) * sqrt(2/pi) int h(w) w^{z-2s} dw
    cplx hbar_mellin(cplx z, cplx s) const {
        if (!(s.real() > 0.0 && s.real() < 1.0))
            throw numeric_error("hbar_mellin: requires 0 < Re(s) < 1");
        // w^{z-2s} oscillates in log w; scale the panel count accordingly
        double osc = std::abs(z.imag() - 2.0 * s.imag()) * std::log(hi_ / lo_);
        auto r = detail::composite_gl(lo_, hi_, oscillation_panels(osc));
        cplx base = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            double hv = (*this)(r.x[i]);
            if (hv == 0.0) continue;
            base += r.w[i] * hv * std::exp((z - 2.0 * s) * std::log(r.x[i]));
        }
        cplx phase = std::exp(log_gamma(s) + cplx(0.0, 1.0) * M_PI * s / 2.0);
        return phase * std::sqrt(2.0 / M_PI) * base;
    }

  private:
    bump_weight(double lo, double hi, int panels)
        : lo_(lo), hi_(hi),
          rule_(detail::composite_gl(lo, hi, panels)),
          fine_(detail::composite_gl(lo, hi, 2 * panels)) {}

    // ~10 panels per oscillation period plus a smooth-integrand floor
    int oscillation_panels(double total_phase) const {
        double periods = total_phase / (2.0 * M_PI);
        int p = 24 + static_cast<int>(3.0 * periods);
        return std::min(p, 4000);
    }

    double lo_, hi_;
    detail::panel_rule rule_;
    detail::panel_rule fine_;
};

}  // namespace symsq
