#pragma once

// Desk-scale empirical twisted moments against their theoretical main terms,
// and the mollified ratio. Sums over the weight window run in a fixed order
// (ascending k, then form index) with compensated accumulation so that
// parallel and serial runs print identical digits.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "symsq/cache.hpp"
#include "symsq/lfun.hpp"
#include "symsq/mollifier.hpp"
#include "symsq/util.hpp"

namespace symsq {

// ---------------------------------------------------------------------------
// family provider
// ---------------------------------------------------------------------------

// Hands out eigenform families with L(1, sym^2 f) filled, backed by the disk
// cache when one is configured. Thread-compatible: call prepare() for all
// weights first (it may run the heavy construction), then families() is
// read-only.
class family_provider {
  public:
    explicit family_provider(weight_cache cache, unsigned workers = 1)
        : cache_(std::move(cache)), workers_(workers) {}

    // construct (or load) all requested weights; prime bound per weight
    void prepare(const std::vector<int>& weights,
                 const std::function<uint64_t(int)>& prime_bound) {
        std::vector<int> todo;
        for (int k : weights) {
            auto it = families_.find(k);
            if (it == families_.end() || it->second.front().prime_bound < prime_bound(k))
                todo.push_back(k);
        }
        std::vector<std::vector<hecke_eigenform>> built(todo.size());
        std::vector<char> from_cache(todo.size(), 0);
        parallel_for(todo.size(), workers_, [&](std::size_t i) {
            int k = todo[i];
            uint64_t pb = prime_bound(k);
            auto loaded = cache_.load(k, pb);
            if (loaded) {
                built[i] = std::move(*loaded);
                from_cache[i] = 1;
            } else {
                built[i] = eigenforms(k, pb);
            }
            ensure_l_one(built[i]);
        });
        for (std::size_t i = 0; i < todo.size(); ++i) {
            if (!from_cache[i]) cache_.store(todo[i], built[i]);
            families_[todo[i]] = std::move(built[i]);
        }
    }

    std::vector<hecke_eigenform>& family(int k) {
        auto it = families_.find(k);
        if (it == families_.end())
            throw numeric_error("family_provider: weight " + std::to_string(k) + " not prepared");
        return it->second;
    }

    const weight_cache& cache() const { return cache_; }

  private:
    weight_cache cache_;
    unsigned workers_;
    std::map<int, std::vector<hecke_eigenform>> families_;
};

// even weights with h((k-1)/K) != 0
inline std::vector<int> supported_weights(double K, const bump_weight& h) {
    std::vector<int> ks;
    int k_lo = static_cast<int>(std::floor(K * h.lo() + 1.0));
    int k_hi = static_cast<int>(std::ceil(K * h.hi() + 1.0));
    for (int k = std::max(4, k_lo); k <= k_hi; ++k) {
        if (k % 2 != 0) continue;
        if (h((k - 1.0) / K) == 0.0) continue;
        if (dim_cusp_forms(k) == 0)
            throw numeric_error("moments: weight " + std::to_string(k) +
                                " in the support has no cusp forms; enlarge K");
        ks.push_back(k);
    }
    if (ks.empty()) throw numeric_error("moments: no even weights in the support of h((k-1)/K)");
    return ks;
}

// default prime coverage for a weight appearing in a K-run
inline uint64_t default_prime_bound(int k, uint64_t mollifier_len = 1) {
    return std::max<uint64_t>(1000, 12ull * static_cast<uint64_t>(k) + mollifier_len + 16);
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

struct moment_report {
    std::string experiment;
    double K = 0.0;
    double a = 0.0;
    uint64_t r = 1;
    std::string h_id;
    double empirical = 0.0;
    double main_term = 0.0;
    double relative_deviation = 0.0;
    std::vector<int> weights_used;
    int forms_count = 0;
    double runtime_seconds = 0.0;  // stays 0 unless timing was requested
    std::map<std::string, std::string> config_echo;

    std::string file_stem() const {
        std::string s = experiment + "_K" + format_g15(K);
        if (a > 0.0) s += "_a" + format_g15(a);
        s += "_r" + std::to_string(r) + "_" + h_id;
        return s;
    }
};

// deterministic structured text: sorted "key = value" lines
inline std::string render_report_text(const moment_report& rep) {
    std::map<std::string, std::string> kv;
    kv["schema"] = "symsq/report/v1";
    kv["experiment"] = rep.experiment;
    kv["K"] = format_g15(rep.K);
    if (rep.a > 0.0) kv["a"] = format_g15(rep.a);
    kv["r"] = std::to_string(rep.r);
    kv["h"] = rep.h_id;
    kv["empirical"] = format_g15(rep.empirical);
    kv["main_term"] = format_g15(rep.main_term);
    kv["relative_deviation"] = format_g15(rep.relative_deviation);
    std::string ws;
    for (std::size_t i = 0; i < rep.weights_used.size(); ++i)
        ws += (i ? " " : "") + std::to_string(rep.weights_used[i]);
    kv["weights_used"] = ws;
    kv["forms_count"] = std::to_string(rep.forms_count);
    kv["runtime_seconds"] = format_g15(rep.runtime_seconds);
    for (const auto& [k, v] : rep.config_echo) kv["config." + k] = v;
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

inline std::string render_report_csv_header() {
    return "experiment,K,a,r,h,empirical,main_term,relative_deviation,forms_count,"
           "runtime_seconds\n";
}

inline std::string render_report_csv_row(const moment_report& rep) {
    return rep.experiment + "," + format_g15(rep.K) + "," + format_g15(rep.a) + "," +
           std::to_string(rep.r) + "," + rep.h_id + "," + format_g15(rep.empirical) + "," +
           format_g15(rep.main_term) + "," + format_g15(rep.relative_deviation) + "," +
           std::to_string(rep.forms_count) + "," + format_g15(rep.runtime_seconds) + "\n";
}

// write <stem>.txt and append a row to <experiment>.csv under out_dir
inline void emit_report(const moment_report& rep, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw io_error("report: cannot create " + out_dir.string());
    auto txt_path = out_dir / (rep.file_stem() + ".txt");
    {
        std::ofstream out(txt_path, std::ios::trunc);
        if (!out) throw io_error("report: cannot write " + txt_path.string());
        out << render_report_text(rep);
    }
    auto csv_path = out_dir / (rep.experiment + ".csv");
    bool fresh = !std::filesystem::exists(csv_path);
    std::ofstream csv(csv_path, std::ios::app);
    if (!csv) throw io_error("report: cannot write " + csv_path.string());
    if (fresh) csv << render_report_csv_header();
    csv << render_report_csv_row(rep);
}

inline moment_report parse_report_text(const std::string& text) {
    moment_report rep;
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    rep.experiment = kv["experiment"];
    rep.K = std::stod(kv["K"]);
    if (kv.count("a")) rep.a = std::stod(kv["a"]);
    rep.r = std::stoull(kv["r"]);
    rep.h_id = kv["h"];
    rep.empirical = std::stod(kv["empirical"]);
    rep.main_term = std::stod(kv["main_term"]);
    rep.relative_deviation = std::stod(kv["relative_deviation"]);
    rep.forms_count = std::stoi(kv["forms_count"]);
    rep.runtime_seconds = std::stod(kv["runtime_seconds"]);
    return rep;
}

// ---------------------------------------------------------------------------
// per-weight harmonic blocks
// ---------------------------------------------------------------------------

namespace detail {

struct weight_block {
    int k = 0;
    double h_value = 0.0;                 // h((k-1)/K)
    std::vector<double> central;          // L(1/2, sym^2 f) per form
    std::vector<hecke_eigenform>* forms;  // borrowed from the provider
};

// compute central values for every weight in the window, in parallel
inline std::vector<weight_block> build_blocks(double K, const bump_weight& h,
                                              family_provider& provider,
                                              const std::vector<int>& weights,
                                              unsigned workers) {
    std::vector<weight_block> blocks(weights.size());
    parallel_for(weights.size(), workers, [&](std::size_t i) {
        int k = weights[i];
        weight_block b;
        b.k = k;
        b.h_value = h((k - 1.0) / K);
        b.forms = &provider.family(k);
        v_weight_evaluator vk(k, v_kernel::collapsed, 1.0,
                              std::log(12.0 * k * 4.0) + 2.0);
        // per-weight quadrature spot check before bulk use
        vk.check(1.0);
        vk.check(static_cast<double>(k));
        for (const auto& f : *b.forms) b.central.push_back(central_value(f, vk).value);
        blocks[i] = std::move(b);
    });
    return blocks;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// first and second twisted moments
// ---------------------------------------------------------------------------

// sum_k h((k-1)/K) SUM^h L(1/2, sym^2 f) a_f(r^2)
inline double first_moment_empirical(double K, uint64_t r, const bump_weight& h,
                                     family_provider& provider, unsigned workers = 1) {
    if (!(static_cast<double>(r) <= K))
        throw config_error("first_moment: desk-scale guard requires r <= K");
    auto weights = supported_weights(K, h);
    provider.prepare(weights, [&](int k) { return default_prime_bound(k, r); });
    auto blocks = detail::build_blocks(K, h, provider, weights, workers);
    kahan_sum total;
    for (const auto& b : blocks) {
        std::vector<double> alpha;
        alpha.reserve(b.forms->size());
        for (std::size_t i = 0; i < b.forms->size(); ++i)
            alpha.push_back(b.central[i] * (*b.forms)[i].coefficient_sq(r));
        total.add(b.h_value * harmonic_sum(b.k, *b.forms, alpha));
    }
    return total.value();
}

// (K/(2 sqrt r)) int h(u) (log(uK/r) + C) du
inline double first_moment_main(double K, uint64_t r, const bump_weight& h) {
    if (r == 0) throw config_error("first_moment_main: r must be positive");
    double C = v4_constant();
    double integral =
        h.integrate([&](double u) { return std::log(u * K / static_cast<double>(r)) + C; });
    return K / (2.0 * std::sqrt(static_cast<double>(r))) * integral;
}

// sum_k h((k-1)/K) SUM^h L(1/2, sym^2 f)^2 a_f(r^2)
inline double second_moment_empirical(double K, uint64_t r, const bump_weight& h,
                                      family_provider& provider, unsigned workers = 1) {
    if (!(static_cast<double>(r) * static_cast<double>(r) <= K))
        throw config_error("second_moment: desk-scale guard requires r <= sqrt(K)");
    auto weights = supported_weights(K, h);
    provider.prepare(weights, [&](int k) { return default_prime_bound(k, r); });
    auto blocks = detail::build_blocks(K, h, provider, weights, workers);
    kahan_sum total;
    for (const auto& b : blocks) {
        std::vector<double> alpha;
        alpha.reserve(b.forms->size());
        for (std::size_t i = 0; i < b.forms->size(); ++i)
            alpha.push_back(b.central[i] * b.central[i] * (*b.forms)[i].coefficient_sq(r));
        total.add(b.h_value * harmonic_sum(b.k, *b.forms, alpha));
    }
    return total.value();
}

// The explicit cubic-in-log part of the second-moment main term ("leading
// only": the lower-degree polynomial companions are not specified):
//   (K/sqrt r) sum_{d | r^2} (1/sqrt d1) int h(u)
//     [ (1/4) log^2(uK/(d1 d2)) log(uK d2 / r) - (1/12) log^3(uK/(d1 d2)) ] du
inline double second_moment_leading(double K, uint64_t r, const bump_weight& h) {
    if (r == 0) throw config_error("second_moment_leading: r must be positive");
    kahan_sum outer;
    for (uint64_t d : divisors(r * r)) {
        auto split = squarefree_decompose(d);
        double d1 = static_cast<double>(split.d1), d2 = static_cast<double>(split.d2);
        double integral = h.integrate([&](double u) {
            double l1 = std::log(u * K / (d1 * d2));
            double l2 = std::log(u * K * d2 / static_cast<double>(r));
            return 0.25 * l1 * l1 * l2 - l1 * l1 * l1 / 12.0;
        });
        outer.add(integral / std::sqrt(d1));
    }
    return K / std::sqrt(static_cast<double>(r)) * outer.value();
}

// ---------------------------------------------------------------------------
// mollified ratio
// ---------------------------------------------------------------------------

struct mollified_ratio_report {
    double m1 = 0.0;         // mollified first moment
    double m2 = 0.0;         // mollified second moment
    double ratio = 0.0;      // m1^2 / m2
    double predicted = 0.0;  // (1 - (1+a)^{-3}) * weighted family count
    double count = 0.0;      // sum_k h((k-1)/K) SUM^h 1
    mollifier_spec spec;
};

inline mollified_ratio_report mollified_ratio(double K, double a, const bump_weight& h,
                                              family_provider& provider, unsigned workers = 1) {
    if (!(a > 0.0 && a < 0.5)) throw config_error("ratio: a must lie in (0, 1/2)");
    mollified_ratio_report rep;
    rep.spec = optimal_mollifier(K, a, h);
    auto weights = supported_weights(K, h);
    provider.prepare(weights,
                     [&](int k) { return default_prime_bound(k, rep.spec.M); });
    auto blocks = detail::build_blocks(K, h, provider, weights, workers);
    kahan_sum m1, m2, count;
    for (const auto& b : blocks) {
        std::vector<double> a1, a2, ones;
        for (std::size_t i = 0; i < b.forms->size(); ++i) {
            double mf = mollifier_value((*b.forms)[i], rep.spec);
            a1.push_back(b.central[i] * mf);
            a2.push_back(b.central[i] * b.central[i] * mf * mf);
            ones.push_back(1.0);
        }
        m1.add(b.h_value * harmonic_sum(b.k, *b.forms, a1));
        m2.add(b.h_value * harmonic_sum(b.k, *b.forms, a2));
        count.add(b.h_value * harmonic_sum(b.k, *b.forms, ones));
    }
    rep.m1 = m1.value();
    rep.m2 = m2.value();
    rep.count = count.value();
    if (rep.m2 <= 0.0) throw numeric_error("ratio: mollified second moment is not positive");
    rep.ratio = rep.m1 * rep.m1 / rep.m2;
    rep.predicted = (1.0 - std::pow(1.0 + a, -3.0)) * rep.count;
    return rep;
}

}  // namespace symsq
