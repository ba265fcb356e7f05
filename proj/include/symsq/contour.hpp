#pragma once

// Vertical-line contour quadrature: (1/(2 pi i)) int_{(A)} f(s) ds evaluated
// as (1/(2 pi)) int f(A + it) dt with composite Gauss-Legendre panels. The
// integrands here decay at least like exp(-pi |t|/4) (one small gamma factor
// survives in every kernel), so a truncation height of ~60-80 reaches the
// 1e-16 floor; node spacing is set by the oscillation exp(-it log xi).

#include <complex>
#include <functional>
#include <vector>

#include "symsq/bump.hpp"
#include "symsq/util.hpp"

namespace symsq {

struct vertical_line {
    double abscissa = 1.0;
    std::vector<double> t;  // imaginary parts of nodes
    std::vector<double> w;  // quadrature weights including the 1/(2 pi)

    cplx node(std::size_t i) const { return {abscissa, t[i]}; }
    std::size_t size() const { return t.size(); }
};

// max_log_xi bounds |log xi| over the evaluations the line will serve; the
// panel width keeps the phase swing per 16-point panel below ~18 radians.
inline vertical_line make_vertical_line(double abscissa, double height = 64.0,
                                        double max_log_xi = 8.0, int nodes_scale = 1) {
    double width = std::min(2.0, 18.0 / std::max(1.0, max_log_xi));
    int panels = static_cast<int>(2.0 * height / width) + 8;
    panels *= nodes_scale;
    auto rule = detail::composite_gl(-height, height, panels);
    vertical_line line;
    line.abscissa = abscissa;
    line.t = std::move(rule.x);
    line.w = std::move(rule.w);
    for (auto& wi : line.w) wi /= 2.0 * M_PI;
    return line;
}

template <class F>
cplx contour_integrate(const vertical_line& line, F&& f) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < line.size(); ++i) s += line.w[i] * f(line.node(i));
    return s;
}

// Precomputed-kernel evaluator: integrals of the form
//   (1/(2 pi i)) int base(s) xi^{-s} ds
// where base is fixed and xi varies. base(s_i) * w_i is frozen once; each
// evaluation is then a dot product with exp(-s log xi).
class mellin_evaluator {
  public:
    mellin_evaluator() = default;
    mellin_evaluator(const vertical_line& line, const std::function<cplx(cplx)>& base) {
        nodes_.reserve(line.size());
        coef_.reserve(line.size());
        for (std::size_t i = 0; i < line.size(); ++i) {
            cplx s = line.node(i);
            nodes_.push_back(s);
            coef_.push_back(line.w[i] * base(s));
        }
    }

    cplx operator()(double xi) const {
        double lx = std::log(xi);
        cplx sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            sum += coef_[i] * std::exp(-nodes_[i] * lx);
        return sum;
    }

    bool empty() const { return nodes_.empty(); }

  private:
    std::vector<cplx> nodes_;
    std::vector<cplx> coef_;
};

}  // namespace symsq
