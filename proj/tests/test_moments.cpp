#include <catch2/catch_amalgamated.hpp>

#include "symsq/moments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace symsq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

family_provider make_provider(unsigned workers = 4) {
    return family_provider(weight_cache(""), workers);  // in-memory only
}

}  // namespace

TEST_CASE("supported weights from the bump window") {
    auto h = bump_weight::make();
    auto ks = supported_weights(20.0, h);
    REQUIRE(!ks.empty());
    CHECK(ks.front() >= 22);
    CHECK(ks.back() <= 40);
    for (int k : ks) {
        CHECK(k % 2 == 0);
        CHECK(h((k - 1.0) / 20.0) > 0.0);
    }
    // a window touching weight 14 (dim 0) is rejected
    CHECK_THROWS_AS(supported_weights(12.0, h), numeric_error);
}

TEST_CASE("harmonic counts sit near 1 for k >= 20") {
    // the trace-formula correction 2 pi J_{k-1}(4 pi) is percent-level at
    // k = 16..18 and only enters the 1% band at k = 20
    for (int k : {20, 22, 26, 32, 40}) {
        auto forms = eigenforms(k, 64);
        ensure_l_one(forms);
        std::vector<double> ones(forms.size(), 1.0);
        double count = harmonic_sum(k, forms, ones);
        CHECK(count > 0.99);
        CHECK(count < 1.01);
    }
}

TEST_CASE("harmonic-weight unit: constant alpha reproduces (K/2) hhat(0)") {
    auto h = bump_weight::make();
    double K = 20.0;
    auto provider = make_provider();
    auto weights = supported_weights(K, h);
    provider.prepare(weights, [](int) { return 64; });
    kahan_sum s;
    for (int k : weights) {
        auto& fam = provider.family(k);
        std::vector<double> ones(fam.size(), 1.0);
        s.add(h((k - 1.0) / K) * harmonic_sum(k, fam, ones));
    }
    double expect = K / 2.0 * h.fourier(0.0).real();
    CHECK_THAT(s.value(), WithinRel(expect, 5e-3));
}

TEST_CASE("first moment at desk scale") {
    auto h = bump_weight::make();
    double K = 20.0;
    auto provider = make_provider();
    double emp = first_moment_empirical(K, 1, h, provider, 4);
    double main = first_moment_main(K, 1, h);
    CHECK(emp > 0.0);
    CHECK(main > 0.0);
    CHECK(std::abs(emp - main) / main < 0.5);  // the tight gate lives at K = 40

    SECTION("empirical equals the hand-rolled block sum (linearity in h)") {
        kahan_sum manual;
        for (int k : supported_weights(K, h)) {
            auto& fam = provider.family(k);
            v_weight_evaluator vk(k, v_kernel::collapsed, 1.0, std::log(48.0 * k) + 2.0);
            std::vector<double> alpha;
            for (const auto& f : fam)
                alpha.push_back(central_value(f, vk).value * f.coefficient_sq(1));
            manual.add(h((k - 1.0) / K) * harmonic_sum(k, fam, alpha));
        }
        CHECK_THAT(emp, WithinRel(manual.value(), 1e-12));
    }

    SECTION("desk-scale guard") {
        CHECK_THROWS_AS(first_moment_empirical(K, 25, h, provider), config_error);
    }
}

TEST_CASE("first moment main term scaling in r") {
    auto h = bump_weight::make();
    double K = 40.0;
    // main(K, r) = K/(2 sqrt r) (hhat(0)(log(K/r) + C) + int h log u)
    double C = v4_constant();
    double hh0 = h.mass();
    double hlog = h.integrate([](double u) { return std::log(u); });
    for (uint64_t r : {1, 2, 3, 4}) {
        double expect = K / (2.0 * std::sqrt(static_cast<double>(r))) *
                        (hh0 * (std::log(K / static_cast<double>(r)) + C) + hlog);
        CHECK_THAT(first_moment_main(K, r, h), WithinRel(expect, 1e-12));
    }
    CHECK(first_moment_main(20.0, 1, h) > 0.0);
    CHECK(first_moment_main(20.0, 3, h) > 0.0);
}

TEST_CASE("second moment empirical: positivity, Cauchy-Schwarz, stability") {
    auto h = bump_weight::make();
    double K = 20.0;
    auto provider = make_provider();
    double m2 = second_moment_empirical(K, 1, h, provider, 4);
    CHECK(m2 > 0.0);

    double m1 = first_moment_empirical(K, 1, h, provider, 4);
    kahan_sum countsum;
    for (int k : supported_weights(K, h)) {
        auto& fam = provider.family(k);
        std::vector<double> ones(fam.size(), 1.0);
        countsum.add(h((k - 1.0) / K) * harmonic_sum(k, fam, ones));
    }
    CHECK(m1 * m1 <= countsum.value() * m2 * (1.0 + 1e-12));

    SECTION("truncation doubling moves the value by < 1e-5 relative") {
        kahan_sum doubled;
        for (int k : supported_weights(K, h)) {
            auto& fam = provider.family(k);
            v_weight_evaluator vk(k, v_kernel::collapsed, 1.0, std::log(96.0 * k) + 2.0);
            std::vector<double> alpha;
            for (const auto& f : fam) {
                double c = central_value(f, vk, 1e-9, 24.0).value;
                alpha.push_back(c * c * f.coefficient_sq(1));
            }
            doubled.add(h((k - 1.0) / K) * harmonic_sum(k, fam, alpha));
        }
        CHECK_THAT(m2, WithinRel(doubled.value(), 1e-5));
    }

    SECTION("guard r <= sqrt(K)") {
        CHECK_THROWS_AS(second_moment_empirical(K, 5, h, provider), config_error);
    }
}

TEST_CASE("second moment leading term") {
    auto h = bump_weight::make();
    double K = 40.0;
    // r = 1: single divisor d = 1, integrand collapses to (1/6) log^3(uK)
    double direct = second_moment_leading(K, 1, h);
    double expect = K * h.integrate([&](double u) {
        double l = std::log(u * K);
        return l * l * l / 6.0;
    });
    CHECK_THAT(direct, WithinRel(expect, 1e-12));

    SECTION("r = 2 runs over the three divisors of 4") {
        double manual = 0.0;
        struct {
            uint64_t d1, d2;
        } splits[3] = {{1, 1}, {2, 1}, {1, 2}};
        for (auto [d1, d2] : splits) {
            manual += 1.0 / std::sqrt(static_cast<double>(d1)) * h.integrate([&](double u) {
                double l1 = std::log(u * K / (static_cast<double>(d1) * d2));
                double l2 = std::log(u * K * d2 / 2.0);
                return 0.25 * l1 * l1 * l2 - l1 * l1 * l1 / 12.0;
            });
        }
        manual *= K / std::sqrt(2.0);
        CHECK_THAT(second_moment_leading(K, 2, h), WithinRel(manual, 1e-12));
    }

    SECTION("K log^3 K growth") {
        double r1 = second_moment_leading(40.0, 1, h) / (40.0 * std::pow(std::log(40.0), 3));
        double r2 = second_moment_leading(80.0, 1, h) / (80.0 * std::pow(std::log(80.0), 3));
        CHECK(std::abs(r2 / r1 - 1.0) < 0.10);
    }
}

TEST_CASE("mollified ratio at desk scale") {
    auto h = bump_weight::make();
    double K = 20.0;
    auto provider = make_provider();
    auto rep = mollified_ratio(K, 0.3, h, provider, 4);
    CHECK(rep.m2 > 0.0);
    CHECK(rep.ratio > 0.0);
    CHECK(rep.ratio <= rep.count * (1.0 + 1e-12));  // Cauchy-Schwarz, exact finite-sum fact
    CHECK_THAT(rep.predicted, WithinRel((1.0 - std::pow(1.3, -3.0)) * rep.count, 1e-14));

    SECTION("a -> 0 degenerates to the unmollified bound") {
        auto tiny = mollified_ratio(K, 0.01, h, provider, 4);
        REQUIRE(tiny.spec.M == 1);  // mollifier collapses to x_1 alone
        double m1 = first_moment_empirical(K, 1, h, provider, 4);
        double m2 = second_moment_empirical(K, 1, h, provider, 4);
        CHECK_THAT(tiny.ratio, WithinRel(m1 * m1 / m2, 1e-10));
    }
}

TEST_CASE("report round trip and determinism") {
    moment_report rep;
    rep.experiment = "first_moment";
    rep.K = 40.0;
    rep.a = 0.0;
    rep.r = 2;
    rep.h_id = "bump1-2";
    rep.empirical = 10.1234567890123;
    rep.main_term = 10.5;
    rep.relative_deviation = std::abs(rep.empirical - rep.main_term) / rep.main_term;
    rep.weights_used = {42, 44};
    rep.forms_count = 7;
    rep.config_echo["command"] = "moments";

    auto dir = std::filesystem::temp_directory_path() / "symsq_report_test";
    std::filesystem::remove_all(dir);
    emit_report(rep, dir);
    emit_report(rep, dir);  // appends a second CSV row, rewrites the txt

    auto txt_path = dir / (rep.file_stem() + ".txt");
    REQUIRE(std::filesystem::exists(txt_path));
    std::ifstream in(txt_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto back = parse_report_text(text);
    CHECK(back.experiment == rep.experiment);
    CHECK(back.K == rep.K);
    CHECK(back.r == rep.r);
    CHECK(back.empirical == rep.empirical);
    CHECK(back.main_term == rep.main_term);
    CHECK(back.forms_count == rep.forms_count);
    CHECK(text.find("schema = symsq/report/v1") != std::string::npos);

    // the txt render is byte-stable
    CHECK(render_report_text(rep) == render_report_text(rep));

    // CSV accumulated one row per emission plus the header
    std::ifstream csv(dir / "first_moment.csv");
    int lines = 0;
    std::string line;
    while (std::getline(csv, line)) ++lines;
    CHECK(lines == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("provider reuses families and upgrades prime bounds") {
    auto provider = make_provider(1);
    provider.prepare({24}, [](int) { return 64; });
    CHECK(provider.family(24).front().prime_bound == 64);
    provider.prepare({24}, [](int) { return 128; });
    CHECK(provider.family(24).front().prime_bound == 128);
    // downgrade requests keep the larger table
    provider.prepare({24}, [](int) { return 64; });
    CHECK(provider.family(24).front().prime_bound == 128);
}
