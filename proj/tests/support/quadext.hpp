#pragma once

// Exact arithmetic in Z-spans of square roots: elements are finite sums
// sum_S q_S sqrt(S) with rational q_S and squarefree S. Enough structure to
// state identities like mu*(p)^2 / (p^2 v_p) = 1/(p-1) exactly.

#include <gmpxx.h>

#include <cstdint>
#include <map>

namespace quadext {

using std::uint64_t;

inline std::pair<uint64_t, uint64_t> split_square(uint64_t n) {
    // n = s * g^2 with s squarefree
    uint64_t s = 1, g = 1;
    for (uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e & 1u) s *= p;
        for (unsigned i = 0; i < e / 2; ++i) g *= p;
    }
    if (n > 1) s *= n;
    return {s, g};
}

class number {
  public:
    number() = default;
    number(long v) {  // NOLINT: implicit by design for test readability
        if (v != 0) coef_[1] = mpq_class(v);
    }
    explicit number(const mpq_class& q) {
        if (q != 0) coef_[1] = q;
    }
    static number sqrt_of(uint64_t n) {
        auto [s, g] = split_square(n);
        number x;
        if (n != 0) x.coef_[s] = mpq_class(static_cast<unsigned long>(g));
        return x;
    }

    number operator+(const number& o) const {
        number r = *this;
        for (const auto& [s, q] : o.coef_) {
            r.coef_[s] += q;
            if (r.coef_[s] == 0) r.coef_.erase(s);
        }
        return r;
    }
    number operator-(const number& o) const { return *this + o.negate(); }
    number negate() const {
        number r = *this;
        for (auto& [s, q] : r.coef_) q = -q;
        return r;
    }
    number operator*(const number& o) const {
        number r;
        for (const auto& [s1, q1] : coef_)
            for (const auto& [s2, q2] : o.coef_) {
                uint64_t g = std::gcd(s1, s2);
                uint64_t s = (s1 / g) * (s2 / g);  // sqrt(s1) sqrt(s2) = g sqrt(s)
                mpq_class q = q1 * q2 * mpq_class(static_cast<unsigned long>(g));
                r.coef_[s] += q;
                if (r.coef_[s] == 0) r.coef_.erase(s);
            }
        return r;
    }
    number operator*(const mpq_class& q) const {
        number r;
        if (q == 0) return r;
        for (const auto& [s, c] : coef_) r.coef_[s] = c * q;
        return r;
    }

    bool operator==(const number& o) const { return coef_ == o.coef_; }
    bool is_rational() const {
        return coef_.empty() || (coef_.size() == 1 && coef_.begin()->first == 1);
    }
    mpq_class rational_part() const {
        auto it = coef_.find(1);
        return it == coef_.end() ? mpq_class(0) : it->second;
    }

    double to_double() const {
        double v = 0.0;
        for (const auto& [s, q] : coef_) v += q.get_d() * std::sqrt(static_cast<double>(s));
        return v;
    }

  private:
    std::map<uint64_t, mpq_class> coef_;  // squarefree radicand -> coefficient
};

}  // namespace quadext
