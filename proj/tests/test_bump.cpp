#include <catch2/catch_amalgamated.hpp>

#include "symsq/bump.hpp"
#include "symsq/contour.hpp"

#include <cmath>
#include <complex>

using namespace symsq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("bump construction and pointwise values") {
    auto h = bump_weight::make();
    CHECK_THAT(h(1.5), WithinAbs(std::exp(-1.0), 1e-15));
    CHECK(h(1.0) == 0.0);
    CHECK(h(2.0) == 0.0);
    CHECK(h(0.5) == 0.0);
    CHECK(h(1.2) > 0.0);
    CHECK_THROWS_AS(bump_weight::make(0.0, 2.0), numeric_error);
    CHECK_THROWS_AS(bump_weight::make(-1.0, 2.0), numeric_error);
    CHECK_THROWS_AS(bump_weight::make(1.0, 1.0), numeric_error);
    CHECK_THROWS_AS(bump_weight::make(1.0, std::numeric_limits<double>::infinity()),
                    numeric_error);
}

TEST_CASE("mass is stable under node doubling") {
    auto h = bump_weight::make();
    double m1 = h.integrate([](double) { return 1.0; }, false);
    double m2 = h.integrate([](double) { return 1.0; }, true);
    CHECK(m1 > 0.0);
    CHECK_THAT(m1, WithinAbs(m2, 1e-10));
    // scaled variant integrates to scale * canonical mass
    auto h2 = bump_weight::make(2.0, 4.0);
    CHECK_THAT(h2.mass(), WithinRel(2.0 * h.mass(), 1e-10));
}

TEST_CASE("Fourier transform") {
    auto h = bump_weight::make();
    cplx f0 = h.fourier(0.0);
    CHECK(f0.real() > 0.0);
    CHECK_THAT(f0.real(), WithinAbs(h.mass(), 1e-12));
    CHECK_THAT(f0.imag(), WithinAbs(0.0, 1e-14));

    cplx fp = h.fourier(3.7);
    cplx fm = h.fourier(-3.7);
    CHECK_THAT(fp.real(), WithinAbs(fm.real(), 1e-12));
    CHECK_THAT(fp.imag(), WithinAbs(-fm.imag(), 1e-12));

    // superpolynomial decay: this bump is Gevrey-class, |hhat| ~ e^{-c sqrt(xi)}
    // (measured c ~ 2.3), so fixed ratios beat any polynomial power
    double base = std::abs(f0);
    double a10 = std::abs(h.fourier(10.0));
    double a40 = std::abs(h.fourier(40.0));
    CHECK(a10 < 2e-3 * base);
    CHECK(std::abs(h.fourier(20.0)) < 1.5e-4 * base);
    CHECK(a40 < 4e-6 * base);
    CHECK(a40 / a10 < std::pow(0.25, 4));  // beats xi^{-4} over one octave pair
}

TEST_CASE("hbar at the origin and decay in v") {
    auto h = bump_weight::make();
    cplx v0 = h.hbar(0.0, 0.0);
    CHECK(v0.real() > 0.0);
    CHECK_THAT(v0.imag(), WithinAbs(0.0, 1e-13));
    // matches int h(sqrt u)/sqrt(2 pi u) du = sqrt(2/pi) int h(w) dw
    CHECK_THAT(v0.real(), WithinAbs(std::sqrt(2.0 / M_PI) * h.mass(), 1e-11));

    double a5 = std::abs(h.hbar(0.0, 5.0));
    double a10 = std::abs(h.hbar(0.0, 10.0));
    CHECK(a10 < a5);
    // fitted v^{-2} envelope: constant from the v=5 sample must cover v=10
    double c = a5 * 25.0;
    CHECK(a10 <= 1.5 * c / 100.0);
}

TEST_CASE("hbar_mellin prefactor and domain") {
    auto h = bump_weight::make();
    CHECK_THROWS_AS(h.hbar_mellin(0.0, cplx(1.5, 0.0)), numeric_error);
    CHECK_THROWS_AS(h.hbar_mellin(0.0, cplx(-0.1, 0.0)), numeric_error);

    // at s = 1/2 the phase factor is Gamma(1/2) e^{i pi/4} = sqrt(pi) e^{i pi/4}
    cplx got = h.hbar_mellin(0.0, cplx(0.5, 0.0));
    double base = std::sqrt(2.0 / M_PI) *
                  h.integrate([](double w) { return 1.0 / w; });  // int h(w) w^{-2s}|_{s=1/2}
    cplx expect = std::sqrt(M_PI) * std::exp(cplx(0.0, M_PI / 4.0)) * base;
    CHECK(std::abs(got - expect) < 1e-10);
}

TEST_CASE("Mellin inversion reproduces hbar") {
    auto h = bump_weight::make();
    // (1/2pi i) int_(1/2) v^{-s} hbar~_0(s) ds = hbar_0(v). On the t < 0 half
    // line Gamma(s) e^{i pi s/2} has no exponential decay; only the bump
    // transform (frequency t/pi) kills the tail, so the truncation height
    // must be generous and the node density follows the gamma phase.
    auto line = make_vertical_line(0.5, 280.0, 9.0);
    for (double v : {1.0, 2.0, 5.0}) {
        cplx inv = contour_integrate(line, [&](cplx s) {
            return std::pow(v, -s) * h.hbar_mellin(0.0, s);
        });
        cplx direct = h.hbar(0.0, v);
        CHECK(std::abs(inv - direct) < 1e-6);
    }
}

TEST_CASE("hbar_mellin decay envelope on the critical line") {
    auto h = bump_weight::make();
    // |hbar~_0(s)| <= C (1+|z|)^3 |s|^{-2}; fit C at |t| = 10 and check at 40
    double a10 = std::abs(h.hbar_mellin(0.0, cplx(0.5, 10.0)));
    double a40 = std::abs(h.hbar_mellin(0.0, cplx(0.5, 40.0)));
    double c = a10 * std::norm(cplx(0.5, 10.0));
    CHECK(a40 <= 2.0 * c / std::norm(cplx(0.5, 40.0)));
}
