#pragma once

// Exact integer q-expansions of level-one modular forms. Coefficients are
// arbitrary-precision integers; series multiplication packs each operand into
// a single big integer (Kronecker substitution, limb-aligned windows) so GMP's
// subquadratic multiplication does the convolution.

#include <gmpxx.h>

#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "symsq/util.hpp"

namespace symsq {

class qexpansion {
  public:
    qexpansion() = default;
    qexpansion(int weight, long precision)
        : weight_(weight), coeff_(static_cast<std::size_t>(precision) + 1) {
        if (precision < 0) throw numeric_error("qexpansion: negative precision");
    }

    int weight() const { return weight_; }
    long precision() const { return static_cast<long>(coeff_.size()) - 1; }

    const mpz_class& c(long n) const {
        if (n < 0 || n > precision()) throw numeric_error("qexpansion: coefficient out of range");
        return coeff_[static_cast<std::size_t>(n)];
    }
    mpz_class& c(long n) {
        if (n < 0 || n > precision()) throw numeric_error("qexpansion: coefficient out of range");
        return coeff_[static_cast<std::size_t>(n)];
    }

    qexpansion& operator+=(const qexpansion& o) {
        shrink_to(std::min(precision(), o.precision()));
        for (long n = 0; n <= precision(); ++n) coeff_[n] += o.coeff_[n];
        return *this;
    }
    qexpansion& operator-=(const qexpansion& o) {
        shrink_to(std::min(precision(), o.precision()));
        for (long n = 0; n <= precision(); ++n) coeff_[n] -= o.coeff_[n];
        return *this;
    }
    qexpansion& operator*=(const mpz_class& s) {
        for (auto& x : coeff_) x *= s;
        return *this;
    }

    // subtract s * q^shift * o
    void submul_shifted(const mpz_class& s, const qexpansion& o, long shift = 0) {
        long lim = std::min(precision(), o.precision() + shift);
        for (long n = shift; n <= lim; ++n) coeff_[n] -= s * o.coeff_[n - shift];
    }

    void divexact(unsigned long s) {
        for (auto& x : coeff_) {
            if (x != 0) mpz_divexact_ui(x.get_mpz_t(), x.get_mpz_t(), s);
        }
    }

    friend qexpansion operator+(qexpansion a, const qexpansion& b) { return a += b; }
    friend qexpansion operator-(qexpansion a, const qexpansion& b) { return a -= b; }
    friend qexpansion operator*(const qexpansion& a, const qexpansion& b) { return mul(a, b); }

    // Product truncated to min precision. Small series go through schoolbook;
    // everything else through Kronecker substitution.
    static qexpansion mul(const qexpansion& a, const qexpansion& b) {
        long n = std::min(a.precision(), b.precision());
        qexpansion out(a.weight_ + b.weight_, n);
        if (n < 64) {
            for (long i = 0; i <= n; ++i) {
                if (a.coeff_[i] == 0) continue;
                for (long j = 0; i + j <= n; ++j) {
                    if (b.coeff_[j] == 0) continue;
                    out.coeff_[i + j] += a.coeff_[i] * b.coeff_[j];
                }
            }
            return out;
        }
        kronecker_mul(a, b, out, n);
        return out;
    }

  private:
    void shrink_to(long n) { coeff_.resize(static_cast<std::size_t>(n) + 1); }

    static std::size_t max_bits(const qexpansion& a, long n) {
        std::size_t m = 1;
        for (long i = 0; i <= n; ++i)
            m = std::max(m, mpz_sizeinbase(a.coeff_[i].get_mpz_t(), 2));
        return m;
    }

    // Pack coefficients (positive and negative parts separately) into
    // disjoint limb windows of `limbs_per` limbs each, then import as mpz.
    static void pack(const qexpansion& a, long n, std::size_t limbs_per, mpz_class& pos,
                     mpz_class& neg) {
        std::vector<mp_limb_t> bufp(limbs_per * (n + 1), 0), bufn(limbs_per * (n + 1), 0);
        std::vector<mp_limb_t> tmp(limbs_per + 1);
        for (long i = 0; i <= n; ++i) {
            const mpz_class& x = a.coeff_[i];
            if (x == 0) continue;
            std::size_t count = 0;
            mpz_export(tmp.data(), &count, -1, sizeof(mp_limb_t), 0, 0, x.get_mpz_t());
            mp_limb_t* dst = (sgn(x) > 0 ? bufp.data() : bufn.data()) + limbs_per * i;
            std::memcpy(dst, tmp.data(), count * sizeof(mp_limb_t));
        }
        mpz_import(pos.get_mpz_t(), bufp.size(), -1, sizeof(mp_limb_t), 0, 0, bufp.data());
        mpz_import(neg.get_mpz_t(), bufn.size(), -1, sizeof(mp_limb_t), 0, 0, bufn.data());
    }

    static void unpack_window(const std::vector<mp_limb_t>& buf, std::size_t limbs_per, long i,
                              mpz_class& out) {
        std::size_t off = limbs_per * static_cast<std::size_t>(i);
        std::size_t take = std::min(limbs_per, buf.size() > off ? buf.size() - off : 0);
        if (take == 0) {
            out = 0;
            return;
        }
        mpz_import(out.get_mpz_t(), take, -1, sizeof(mp_limb_t), 0, 0, buf.data() + off);
    }

    static void kronecker_mul(const qexpansion& a, const qexpansion& b, qexpansion& out, long n) {
        std::size_t bits = max_bits(a, n) + max_bits(b, n) + 64 - __builtin_clzll(static_cast<unsigned long long>(n) + 1) + 2;
        std::size_t limbs_per = (bits + GMP_NUMB_BITS - 1) / GMP_NUMB_BITS;
        mpz_class ap, an, bp, bn;
        pack(a, n, limbs_per, ap, an);
        pack(b, n, limbs_per, bp, bn);
        mpz_class P = ap * bp + an * bn;  // window slices are the nonnegative convolutions
        mpz_class Q = ap * bn + an * bp;
        auto export_limbs = [](const mpz_class& x) {
            std::vector<mp_limb_t> buf(mpz_size(x.get_mpz_t()));
            if (!buf.empty()) {
                std::size_t count = 0;
                mpz_export(buf.data(), &count, -1, sizeof(mp_limb_t), 0, 0, x.get_mpz_t());
            }
            return buf;
        };
        std::vector<mp_limb_t> pbuf = export_limbs(P), qbuf = export_limbs(Q);
        mpz_class pi, qi;
        for (long i = 0; i <= n; ++i) {
            unpack_window(pbuf, limbs_per, i, pi);
            unpack_window(qbuf, limbs_per, i, qi);
            out.coeff_[i] = pi - qi;
        }
    }

    int weight_ = 0;
    std::vector<mpz_class> coeff_;
};

// E4 = 1 + 240 sum sigma_3(n) q^n,  E6 = 1 - 504 sum sigma_5(n) q^n.
inline qexpansion eisenstein(int weight, long precision) {
    if (weight != 4 && weight != 6) throw numeric_error("eisenstein: weight must be 4 or 6");
    if (precision < 1) throw numeric_error("eisenstein: precision must be >= 1");
    qexpansion e(weight, precision);
    e.c(0) = 1;
    const int power = weight - 1;
    const long mult = weight == 4 ? 240 : -504;
    for (long d = 1; d <= precision; ++d) {
        mpz_class dk;
        mpz_ui_pow_ui(dk.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(power));
        dk *= mult;
        for (long m = d; m <= precision; m += d) e.c(m) += dk;
    }
    return e;
}

// Delta = (E4^3 - E6^2)/1728, the weight-12 cusp form with c(1)=1, c(2)=-24.
inline qexpansion delta(long precision) {
    if (precision < 1) throw numeric_error("delta: precision must be >= 1");
    qexpansion e4 = eisenstein(4, precision);
    qexpansion e6 = eisenstein(6, precision);
    qexpansion d = qexpansion::mul(qexpansion::mul(e4, e4), e4) - qexpansion::mul(e6, e6);
    d.divexact(1728);
    return d;
}

}  // namespace symsq
