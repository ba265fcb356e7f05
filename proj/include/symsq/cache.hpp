#pragma once

// Per-weight cache documents: one JSON file per weight holding the normalized
// prime eigenvalues (18 significant digits), the L-values once computed, and
// for dimensions up to 3 the exact integer characteristic polynomial of T_2.
// Writes are atomic (temp file + rename). A schema tag guards format drift.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symsq/hecke.hpp"
#include "symsq/util.hpp"

namespace symsq {

inline constexpr const char* kCacheSchema = "symsq/weight-cache/v1";

namespace detail {

inline std::string cache_file_name(int k) { return "weight_" + std::to_string(k) + ".json"; }

inline std::string format_coeff(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.18g", x);
    return buf;
}

}  // namespace detail

class weight_cache {
  public:
    explicit weight_cache(std::filesystem::path dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(dir_, ec);
            if (ec) throw io_error("cache: cannot create directory " + dir_.string());
        }
    }

    const std::filesystem::path& dir() const { return dir_; }
    bool enabled() const { return !dir_.empty(); }

    // Load the family of weight k if the cached document covers the requested
    // prime bound. Corrupt documents surface an io_error naming the file.
    std::optional<std::vector<hecke_eigenform>> load(int k, uint64_t prime_bound) const {
        if (!enabled()) return std::nullopt;
        auto path = dir_ / detail::cache_file_name(k);
        if (!std::filesystem::exists(path)) return std::nullopt;
        nlohmann::json doc;
        try {
            std::ifstream in(path);
            in >> doc;
        } catch (const std::exception& e) {
            throw io_error("cache: cannot parse " + path.string() + ": " + e.what());
        }
        if (doc.value("schema", "") != kCacheSchema) return std::nullopt;  // stale schema
        if (doc.value("prime_bound", 0ull) < prime_bound) return std::nullopt;
        try {
            std::vector<hecke_eigenform> forms;
            for (const auto& jf : doc.at("forms")) {
                hecke_eigenform f;
                f.weight = doc.at("weight").get<int>();
                f.index = jf.at("index").get<int>();
                f.prime_bound = doc.at("prime_bound").get<uint64_t>();
                for (const auto& [p, v] : jf.at("ap").items())
                    f.prime_eigenvalues[std::stoull(p)] = std::stod(v.get<std::string>());
                if (jf.contains("l1_symsq")) f.l1_symsq = std::stod(jf.at("l1_symsq").get<std::string>());
                forms.push_back(std::move(f));
            }
            if (static_cast<int>(forms.size()) != dim_cusp_forms(k))
                throw io_error("cache: " + path.string() + " holds a truncated family");
            return forms;
        } catch (const nlohmann::json::exception& e) {
            throw io_error("cache: malformed document " + path.string() + ": " + e.what());
        }
    }

    void store(int k, const std::vector<hecke_eigenform>& forms,
               const std::vector<mpz_class>* t2_charpoly = nullptr) const {
        if (!enabled()) return;
        nlohmann::json doc;
        doc["schema"] = kCacheSchema;
        doc["weight"] = k;
        doc["dimension"] = forms.size();
        doc["prime_bound"] = forms.empty() ? 0 : forms.front().prime_bound;
        nlohmann::json jforms = nlohmann::json::array();
        for (const auto& f : forms) {
            nlohmann::json jf;
            jf["index"] = f.index;
            nlohmann::json ap = nlohmann::json::object();
            for (const auto& [p, v] : f.prime_eigenvalues)
                ap[std::to_string(p)] = detail::format_coeff(v);
            jf["ap"] = ap;
            if (f.l1_symsq > 0.0) jf["l1_symsq"] = detail::format_coeff(f.l1_symsq);
            jforms.push_back(std::move(jf));
        }
        doc["forms"] = jforms;
        if (t2_charpoly && forms.size() <= 3) {
            nlohmann::json cp = nlohmann::json::array();
            for (const auto& c : *t2_charpoly) cp.push_back(c.get_str());
            doc["t2_charpoly"] = cp;
        }
        atomic_write(dir_ / detail::cache_file_name(k), doc.dump(1));
    }

    // Remove stale-schema or unreadable entries; current-schema entries are
    // kept unless keep_current is false.
    struct gc_summary {
        int scanned = 0;
        int removed = 0;
        int kept = 0;
    };
    gc_summary gc(bool keep_current = true) const {
        gc_summary s;
        if (!enabled() || !std::filesystem::exists(dir_)) return s;
        for (const auto& ent : std::filesystem::directory_iterator(dir_)) {
            if (!ent.is_regular_file() || ent.path().extension() != ".json") continue;
            ++s.scanned;
            bool current = false;
            try {
                nlohmann::json doc;
                std::ifstream in(ent.path());
                in >> doc;
                current = doc.value("schema", "") == kCacheSchema;
            } catch (...) {
                current = false;
            }
            if (current && keep_current) {
                ++s.kept;
            } else {
                std::error_code ec;
                std::filesystem::remove(ent.path(), ec);
                if (ec) throw io_error("cache: cannot remove " + ent.path().string());
                ++s.removed;
            }
        }
        return s;
    }

  private:
    static void atomic_write(const std::filesystem::path& path, const std::string& payload) {
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out) throw io_error("cache: cannot open " + tmp.string() + " for writing");
            out << payload << '\n';
            if (!out) throw io_error("cache: write failed for " + tmp.string());
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) throw io_error("cache: rename failed for " + path.string());
    }

    std::filesystem::path dir_;
};

}  // namespace symsq
