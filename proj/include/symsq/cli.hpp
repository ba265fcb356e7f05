#pragma once

// Command-line front end: configuration model, CLI11 wiring, and the command
// dispatcher. Exit codes: 0 success, 2 configuration, 3 numerical contract,
// 4 I/O.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "symsq/arith.hpp"
#include "symsq/cache.hpp"
#include "symsq/lfun.hpp"
#include "symsq/mollifier.hpp"
#include "symsq/moments.hpp"
#include "symsq/specfun.hpp"
#include "symsq/util.hpp"

namespace symsq {

struct help_requested {};

struct run_config {
    std::string command;
    double K = 40.0;
    double a = 0.3;
    uint64_t r = 1;
    int k = 12;
    uint64_t n = 1;
    uint64_t m = 1;
    uint64_t c_max = 1000;
    double t = 100.0;
    double tolerance = 1e-9;
    std::string cache_dir;
    std::string out_dir = "out";
    unsigned workers = 1;
    std::string h_family = "bump";
    std::vector<double> h_params;  // support endpoints, default (1,2)
    bool timing = false;           // record wall time in reports (breaks byte-identity)

    bump_weight make_h() const {
        if (h_family != "bump")
            throw config_error("unknown h family '" + h_family + "' (available: bump)");
        double lo = 1.0, hi = 2.0;
        if (!h_params.empty()) {
            if (h_params.size() != 2)
                throw config_error("--h-params expects exactly two endpoints lo hi");
            lo = h_params[0];
            hi = h_params[1];
        }
        return bump_weight::make(lo, hi);
    }

    std::map<std::string, std::string> echo() const {
        std::map<std::string, std::string> e;
        e["command"] = command;
        e["K"] = format_g15(K);
        e["a"] = format_g15(a);
        e["r"] = std::to_string(r);
        e["workers"] = std::to_string(workers);
        e["h_family"] = h_family;
        e["tolerance"] = format_g15(tolerance);
        return e;
    }
};

inline const std::vector<std::string>& cli_commands() {
    static const std::vector<std::string> cmds = {
        "eigenforms", "lvalues",  "identities", "trace-check", "bessel-check",
        "mollifier",  "moments",  "ratio",      "cache-gc",
    };
    return cmds;
}

// Flags override config-file values override defaults; unknown keys are
// rejected by the parser. Returns nullopt when CLI11 already produced help
// output (exit 0) and throws config_error on bad input.
inline run_config parse_config(const std::vector<std::string>& args) {
    run_config cfg;
    CLI::App app{"symmetric-square central value toolkit"};
    app.set_config("--config", "", "configuration file (key=value with [sections])");
    app.allow_config_extras(CLI::config_extras_mode::error);

    app.add_option("--K", cfg.K, "weight-window scale K");
    app.add_option("--a", cfg.a, "mollifier exponent a, 0 < a < 1/2");
    app.add_option("--r", cfg.r, "twist index r");
    app.add_option("--k", cfg.k, "single weight k");
    app.add_option("--n", cfg.n, "trace-check index n");
    app.add_option("--m", cfg.m, "trace-check index m");
    app.add_option("--c-max", cfg.c_max, "Kloosterman modulus cutoff");
    app.add_option("--t", cfg.t, "Bessel argument t");
    app.add_option("--tolerance", cfg.tolerance, "numeric tolerance override");
    app.add_option("--cache-dir", cfg.cache_dir, "eigenform cache directory");
    app.add_option("--out-dir", cfg.out_dir, "report output directory");
    app.add_option("--workers", cfg.workers, "worker thread count (>= 1)");
    app.add_option("--h-family", cfg.h_family, "weight family (bump)");
    app.add_option("--h-params", cfg.h_params, "weight family parameters: lo hi");
    app.add_flag("--timing", cfg.timing, "record wall-clock time in reports");

    std::string command_help;
    for (const auto& c : cli_commands()) command_help += c + " ";
    app.add_option("command", cfg.command, "one of: " + command_help)->required();

    // CLI11 wants argv-style reversed input
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        throw help_requested{};
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        throw config_error("usage error: " + msg);
    }

    bool known = false;
    for (const auto& c : cli_commands()) known = known || c == cfg.command;
    if (!known) {
        throw config_error("unknown command '" + cfg.command + "'; commands: " + command_help);
    }
    if (cfg.workers < 1) throw config_error("--workers must be >= 1");
    if ((cfg.command == "ratio" || cfg.command == "mollifier") && !(cfg.a > 0.0 && cfg.a < 0.5))
        throw config_error("a must lie in (0, 1/2)");
    if (cfg.cache_dir.empty()) {
        if (const char* env = std::getenv("SYMSQ_CACHE_DIR")) cfg.cache_dir = env;
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// identity suites for the `identities` command
// ---------------------------------------------------------------------------

struct identity_result {
    std::string family;
    bool pass = true;
    double worst = 0.0;
    void absorb(double defect, bool ok) {
        worst = std::max(worst, defect);
        pass = pass && ok;
    }
};

inline std::vector<identity_result> run_identity_suites() {
    std::vector<identity_result> out;

    {
        identity_result r{"kloosterman-square-average"};
        for (uint64_t b = 1; b <= 50; ++b)
            for (uint64_t c = 1; c <= 200; ++c) {
                double direct = kloosterman_square_average(b, c);
                double closed = kloosterman_square_average_closed(c);
                double d = std::abs(direct - closed);
                r.absorb(d, d <= 1e-6 * std::max(1.0, closed));
            }
        out.push_back(r);
    }
    {
        identity_result r{"ramanujan-closed-form"};
        for (uint64_t c = 1; c <= 300; ++c)
            for (int64_t n : {0l, 1l, 2l, 6l, 8l, 12l, 30l}) {
                auto v = ramanujan_sum(c, n);  // throws on disagreement
                r.absorb(v.imag_residue, v.imag_residue < 1e-9);
            }
        out.push_back(r);
    }
    {
        identity_result r{"weil-bound"};
        for (uint64_t c = 1; c <= 500; ++c)
            for (uint64_t n = 0; n <= 30; ++n)
                for (uint64_t m = n; m <= 30; m += (n == 0 ? 1 : 7))
                    r.absorb(0.0, weil_check(static_cast<int64_t>(n), static_cast<int64_t>(m), c));
        out.push_back(r);
    }
    {
        identity_result r{"mu-star-v-coeff"};
        auto tab = sieve(10000);
        for (uint64_t p = 2; p <= 10000; ++p) {
            if (tab->spf[p] != p) continue;
            double lhs = mu_star(p) * mu_star(p) /
                         (static_cast<double>(p) * static_cast<double>(p) * v_coeff(p));
            double d = std::abs(lhs - 1.0 / (p - 1.0)) * (p - 1.0);
            r.absorb(d, d <= 1e-12);
        }
        out.push_back(r);
    }
    {
        identity_result r{"tau-star-dual-formula"};
        for (uint64_t n = 1; n <= 10000; ++n) {
            double a = tau_star(n);
            double b = 0.0;
            for (uint64_t f : divisors(n)) {
                if (!is_squarefree(f)) continue;
                b += 1.0 / std::sqrt(static_cast<double>(f)) *
                     static_cast<double>(divisor_count(n / f));
            }
            double d = std::abs(a - b) / std::max(1.0, a);
            r.absorb(d, d <= 1e-12);
        }
        out.push_back(r);
    }
    {
        identity_result r{"mu2-over-phi-drift"};
        auto tab = sieve(1000000);
        double sum = 0.0, lo = 1e300, hi = -1e300;
        for (uint64_t j = 1; j <= 1000000; ++j) {
            if (tab->mu[j] != 0) sum += 1.0 / tab->phi[j];
            if (j >= 100) {
                double drift = sum - std::log(static_cast<double>(j));
                lo = std::min(lo, drift);
                hi = std::max(hi, drift);
            }
        }
        r.absorb(hi - lo, hi - lo <= 2.0);
        out.push_back(r);
    }
    {
        identity_result r{"g-reflection"};
        auto defect = [](cplx s) {
            cplx lhs = std::pow(8.0 * M_PI, s) * zeta(2.0 * s) * gamma_c(s) * g_factor(s) *
                       std::sin(M_PI * s / 2.0 - M_PI / 4.0);
            cplx rhs = -1.0 / std::sqrt(2.0) * zeta(1.0 - 2.0 * s) * g_factor(-s);
            return std::abs(lhs - rhs);
        };
        for (double re : {0.1, 0.3, 0.45, 0.7, 0.9})
            for (double im : {0.0, 2.0, -4.9}) {
                double d = defect(cplx(re, im));
                r.absorb(d, d <= 1e-10);
            }
        out.push_back(r);
    }
    {
        identity_result r{"gamma-duplication"};
        for (double re : {0.3, 1.5, 7.0})
            for (double im : {-3.0, 0.5, 9.0}) {
                cplx z(re, im);
                cplx lhs = log_gamma(2.0 * z);
                cplx rhs = (2.0 * z - 1.0) * std::log(2.0) - 0.5 * std::log(M_PI) +
                           log_gamma(z) + log_gamma(z + 0.5);
                double d = std::abs(std::exp(lhs - rhs) - 1.0);
                r.absorb(d, d <= 1e-10);
            }
        out.push_back(r);
    }
    {
        identity_result r{"zeta-functional-equation"};
        for (double re : {-1.5, -0.3, 0.4, 0.8})
            for (double im : {0.0, 1.0, 7.0, 23.0}) {
                cplx s(re, im);
                cplx lhs = zeta(s);
                cplx rhs = std::pow(2.0, s) * std::pow(M_PI, s - 1.0) *
                           std::sin(M_PI * s / 2.0) * gamma_c(1.0 - s) * zeta(1.0 - s);
                double d = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
                r.absorb(d, d <= 1e-9);
            }
        out.push_back(r);
    }
    {
        identity_result r{"quadratic-form-diagonalization"};
        std::mt19937_64 gen(0xd1a6);
        for (int it = 0; it < 100; ++it) {
            uint64_t M = 20 + gen() % 31;
            sparse_vec x;
            for (uint64_t idx = 1; idx <= M; ++idx) {
                if (!is_squarefree(idx) || gen() % 3 == 0) continue;
                x[idx] = -1.0 + 2.0 * ((gen() % 10000) / 10000.0);
            }
            if (x.empty()) continue;
            double brute = quad_form_brute(x, M);
            double diag = quad_form_diag(y_from_x(x, M));
            double d = std::abs(brute - diag) / std::max(1e-30, std::abs(brute));
            r.absorb(d, d <= 1e-10);
        }
        out.push_back(r);
    }
    {
        identity_result r{"transform-round-trip"};
        std::mt19937_64 gen(0x50f7);
        uint64_t M = 200;
        sparse_vec x;
        for (uint64_t idx = 1; idx <= M; ++idx) {
            if (!is_squarefree(idx) || gen() % 4 == 0) continue;
            x[idx] = -1.0 + 2.0 * ((gen() % 10000) / 10000.0);
        }
        auto x2 = x_from_y(y_from_x(x, M), M);
        for (uint64_t idx = 1; idx <= M; ++idx) {
            double a = x.count(idx) ? x.at(idx) : 0.0;
            double b = x2.count(idx) ? x2.at(idx) : 0.0;
            r.absorb(std::abs(a - b), std::abs(a - b) <= 1e-12);
        }
        out.push_back(r);
    }
    {
        identity_result r{"moment-contribution-collapse"};
        for (int i = 1; i <= 20; ++i) {
            mpq_class a(i, 41);
            r.absorb(0.0, m2_sum_identity_exact(a) && ratio_identity_exact(a));
        }
        r.absorb(0.0, proportion_exact(mpq_class(1, 2)) == mpq_class(19, 27));
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// command dispatch
// ---------------------------------------------------------------------------

inline int run(const run_config& cfg, std::ostream& os = std::cout) {
    auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        if (!cfg.timing) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };
    auto h = cfg.make_h();
    weight_cache cache(cfg.cache_dir);

    if (cfg.command == "eigenforms") {
        auto pb = default_prime_bound(cfg.k);
        auto loaded = cache.load(cfg.k, pb);
        std::vector<hecke_eigenform> forms = loaded ? *loaded : eigenforms(cfg.k, pb);
        if (!loaded) cache.store(cfg.k, forms);
        os << "weight " << cfg.k << ": " << forms.size() << " eigenforms, prime bound " << pb
           << "\n";
        for (const auto& f : forms)
            os << "  index " << f.index << "  a(2) = " << format_g15(f.coefficient(2)) << "\n";
        return 0;
    }

    if (cfg.command == "lvalues") {
        auto pb = default_prime_bound(cfg.k);
        auto loaded = cache.load(cfg.k, pb);
        std::vector<hecke_eigenform> forms = loaded ? *loaded : eigenforms(cfg.k, pb);
        ensure_l_one(forms);
        cache.store(cfg.k, forms);
        v_weight_evaluator vk(cfg.k, v_kernel::collapsed, 1.0, std::log(48.0 * cfg.k) + 2.0);
        for (const auto& f : forms) {
            auto rec = central_value(f, vk, cfg.tolerance);
            os << "k=" << cfg.k << " index=" << f.index
               << " L(1/2)=" << format_g15(rec.value)
               << " L(1)=" << format_g15(f.l1_symsq)
               << " truncation=" << rec.truncation << "\n";
        }
        return 0;
    }

    if (cfg.command == "identities") {
        auto results = run_identity_suites();
        bool all = true;
        for (const auto& r : results) {
            os << (r.pass ? "PASS" : "FAIL") << "  " << r.family
               << "  (worst defect " << format_g15(r.worst) << ")\n";
            all = all && r.pass;
        }
        if (!all) {
            os << "identity suite FAILED\n";
            return 3;
        }
        os << "all identity families passed\n";
        return 0;
    }

    if (cfg.command == "trace-check") {
        auto pb = std::max<uint64_t>(default_prime_bound(cfg.k), std::max(cfg.n, cfg.m) + 1);
        auto loaded = cache.load(cfg.k, pb);
        std::vector<hecke_eigenform> forms = loaded ? *loaded : eigenforms(cfg.k, pb);
        auto rep = petersson_check(forms, cfg.n, cfg.m, cfg.c_max);
        cache.store(cfg.k, forms);
        os << "petersson k=" << cfg.k << " n=" << cfg.n << " m=" << cfg.m
           << " c_max=" << cfg.c_max << "\n";
        os << "  lhs    = " << format_g15(rep.lhs) << "\n";
        os << "  rhs    = " << format_g15(rep.rhs) << "\n";
        os << "  defect = " << format_g15(rep.defect) << "\n";
        os << "  tail   <= " << format_g15(rep.tail_bound) << "\n";
        if (rep.defect > std::max(cfg.tolerance, 1e-6)) {
            os << "trace-check FAILED tolerance " << format_g15(std::max(cfg.tolerance, 1e-6))
               << "\n";
            return 3;
        }
        return 0;
    }

    if (cfg.command == "bessel-check") {
        auto rep = bessel_average_check(cfg.K, cfg.t, h);
        os << "bessel-average K=" << format_g15(cfg.K) << " t=" << format_g15(cfg.t) << "\n";
        os << "  lhs        = " << format_g15(rep.lhs) << "\n";
        os << "  main term  = " << format_g15(rep.main_term) << "\n";
        os << "  budget     = " << format_g15(rep.error_budget) << "\n";
        double slack = 10.0;  // recorded slack on the unspecified O-constant
        bool quiet_regime = std::abs(rep.lhs) < 1e-8 && std::abs(rep.main_term) < 1e-8;
        if (!quiet_regime && std::abs(rep.lhs - rep.main_term) > slack * rep.error_budget) {
            os << "bessel-check FAILED (slack " << slack << ")\n";
            return 3;
        }
        return 0;
    }

    if (cfg.command == "mollifier") {
        auto spec = optimal_mollifier(cfg.K, cfg.a, h);
        std::filesystem::path dir(cfg.out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw io_error("cannot create output directory " + dir.string());
        auto path = dir / ("mollifier_K" + format_g15(cfg.K) + "_a" + format_g15(cfg.a) + "_" +
                           h.id() + ".json");
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw io_error("cannot write " + path.string());
        out << spec.to_json().dump(1) << "\n";
        os << "mollifier M=" << spec.M << " written to " << path.string() << "\n";
        return 0;
    }

    if (cfg.command == "moments") {
        family_provider provider(cache, cfg.workers);
        moment_report rep;
        rep.experiment = "first_moment";
        rep.K = cfg.K;
        rep.a = 0.0;
        rep.r = cfg.r;
        rep.h_id = h.id();
        rep.empirical = first_moment_empirical(cfg.K, cfg.r, h, provider, cfg.workers);
        rep.main_term = first_moment_main(cfg.K, cfg.r, h);
        rep.relative_deviation =
            std::abs(rep.empirical - rep.main_term) / std::abs(rep.main_term);
        rep.weights_used = supported_weights(cfg.K, h);
        for (int k : rep.weights_used) rep.forms_count += dim_cusp_forms(k);
        rep.config_echo = cfg.echo();
        rep.runtime_seconds = elapsed();
        emit_report(rep, cfg.out_dir);

        moment_report rep2 = rep;
        rep2.experiment = "second_moment";
        rep2.empirical = second_moment_empirical(cfg.K, cfg.r, h, provider, cfg.workers);
        rep2.main_term = second_moment_leading(cfg.K, cfg.r, h);
        rep2.relative_deviation =
            std::abs(rep2.empirical - rep2.main_term) / std::abs(rep2.main_term);
        rep2.runtime_seconds = elapsed();
        emit_report(rep2, cfg.out_dir);

        os << render_report_text(rep) << "\n" << render_report_text(rep2);
        return 0;
    }

    if (cfg.command == "ratio") {
        family_provider provider(cache, cfg.workers);
        auto rep = mollified_ratio(cfg.K, cfg.a, h, provider, cfg.workers);
        moment_report doc;
        doc.experiment = "mollified_ratio";
        doc.K = cfg.K;
        doc.a = cfg.a;
        doc.r = 1;
        doc.h_id = h.id();
        doc.empirical = rep.ratio;
        doc.main_term = rep.predicted;
        doc.relative_deviation = std::abs(rep.ratio - rep.predicted) / std::abs(rep.predicted);
        doc.weights_used = supported_weights(cfg.K, h);
        for (int k : doc.weights_used) doc.forms_count += dim_cusp_forms(k);
        doc.config_echo = cfg.echo();
        doc.runtime_seconds = elapsed();
        emit_report(doc, cfg.out_dir);
        os << "M1 = " << format_g15(rep.m1) << "\nM2 = " << format_g15(rep.m2)
           << "\nratio = " << format_g15(rep.ratio)
           << "\npredicted = " << format_g15(rep.predicted)
           << "\nweighted count = " << format_g15(rep.count) << "\n";
        return 0;
    }

    if (cfg.command == "cache-gc") {
        if (cfg.cache_dir.empty()) throw config_error("cache-gc requires --cache-dir");
        auto s = cache.gc(true);
        os << "cache-gc: scanned " << s.scanned << ", removed " << s.removed << ", kept "
           << s.kept << "\n";
        return 0;
    }

    throw config_error("unhandled command '" + cfg.command + "'");
}

inline int run_cli(int argc, char** argv, std::ostream& os = std::cout,
                   std::ostream& err = std::cerr) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (args.empty()) {
            err << "usage: symsq <command> [flags]; commands:";
            for (const auto& c : cli_commands()) err << " " << c;
            err << "\n";
            return 2;
        }
        auto cfg = parse_config(args);
        return run(cfg, os);
    } catch (const help_requested&) {
        return 0;
    } catch (const config_error& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const io_error& e) {
        err << "io error: " << e.what() << "\n";
        return 4;
    } catch (const numeric_error& e) {
        err << "numerical contract violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace symsq
