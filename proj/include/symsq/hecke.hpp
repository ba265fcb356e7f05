#pragma once

// Level-one holomorphic Hecke eigenforms. The Victor Miller basis of S_k is
// built exactly (integer q-expansions, echelonized to g_i = q^i + O(q^{d+1})),
// Hecke matrices are exact integer matrices in that basis, and eigen-data is
// extracted from the exact characteristic polynomial of T_2: its real roots
// are refined with high-precision Newton iteration and eigenvectors solved in
// matching precision, so the served normalized coefficients a_f(n) carry far
// more accuracy than the double they are rounded to.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "symsq/arith.hpp"
#include "symsq/qexp.hpp"
#include "symsq/util.hpp"

namespace symsq {

// dim S_k for even k: floor(k/12), minus one when k = 2 mod 12.
inline int dim_cusp_forms(int k) {
    if (k < 0 || k % 2 != 0) return 0;
    if (k < 12) return 0;
    int d = k / 12;
    if (k % 12 == 2) --d;
    return d;
}

// Independent route for the same dimension: #{(a,b) >= 0 : 4a + 6b = k} - 1.
inline int dim_cusp_forms_by_count(int k) {
    if (k < 4 || k % 2 != 0) return 0;
    int count = 0;
    for (int b = 0; 6 * b <= k; ++b)
        if ((k - 6 * b) % 4 == 0) ++count;
    return count - 1;
}

// ---------------------------------------------------------------------------
// Victor Miller basis
// ---------------------------------------------------------------------------

// Echelonized integral basis g_1..g_d of S_k with g_i = q^i + O(q^{d+1}),
// all to the requested precision. Construction: g~_i = Delta^i W^{d-i} B with
// W = E4^3 and B the (unique) monomial E4^a E6^b of weight k - 12d, then
// integer row reduction (the Delta powers make the system unitriangular).
inline std::vector<qexpansion> victor_miller_basis(int k, long precision) {
    int d = dim_cusp_forms(k);
    if (d == 0) throw numeric_error("victor_miller_basis: S_k is trivial for k=" + std::to_string(k));
    long N = std::max<long>(precision, d + 1);

    qexpansion e4 = eisenstein(4, N);
    qexpansion e6 = eisenstein(6, N);
    qexpansion del = delta(N);
    qexpansion w = qexpansion::mul(qexpansion::mul(e4, e4), e4);  // E4^3

    int base_w = k - 12 * d;  // in {0,4,6,8,10,14}
    int b = 0, a = 0;
    if (base_w % 4 == 0) {
        a = base_w / 4;
    } else {
        b = 1;
        a = (base_w - 6) / 4;
    }
    qexpansion base(0, N);
    base.c(0) = 1;
    for (int i = 0; i < a; ++i) base = qexpansion::mul(base, e4);
    for (int i = 0; i < b; ++i) base = qexpansion::mul(base, e6);

    std::vector<qexpansion> delta_pow(d + 1, qexpansion(0, N));
    delta_pow[0].c(0) = 1;
    for (int i = 1; i <= d; ++i) delta_pow[i] = qexpansion::mul(delta_pow[i - 1], del);
    std::vector<qexpansion> w_pow(d + 1, qexpansion(0, N));
    w_pow[0].c(0) = 1;
    for (int i = 1; i <= d; ++i) w_pow[i] = qexpansion::mul(w_pow[i - 1], w);

    std::vector<qexpansion> g;
    g.reserve(d);
    for (int i = 1; i <= d; ++i)
        g.push_back(qexpansion::mul(qexpansion::mul(delta_pow[i], w_pow[d - i]), base));

    // echelonize: leading coefficient of g[i-1] at q^i is 1, eliminate below
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            mpz_class c = g[i].c(j + 1);
            if (c != 0) g[i].submul_shifted(c, g[j], 0);
        }
    return g;
}

// ---------------------------------------------------------------------------
// Exact Hecke matrices and characteristic polynomials
// ---------------------------------------------------------------------------

struct mpz_matrix {
    int n = 0;
    std::vector<mpz_class> a;
    mpz_matrix() = default;
    explicit mpz_matrix(int size) : n(size), a(static_cast<std::size_t>(size) * size) {}
    mpz_class& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
    const mpz_class& at(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }

    mpz_matrix mul(const mpz_matrix& o) const {
        mpz_matrix out(n);
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l) {
                const mpz_class& x = at(i, l);
                if (x == 0) continue;
                for (int j = 0; j < n; ++j) out.at(i, j) += x * o.at(l, j);
            }
        return out;
    }
};

// T_p in the Victor Miller basis: (T_p g)(n) = g(pn) + p^{k-1} g(n/p), and
// the echelon shape means column entries are just the first d coefficients.
inline mpz_matrix hecke_matrix(int k, uint64_t p, const std::vector<qexpansion>& basis) {
    int d = static_cast<int>(basis.size());
    if (d == 0) throw numeric_error("hecke_matrix: empty basis");
    long need = static_cast<long>(p) * (d + 1);
    if (basis[0].precision() < need)
        throw numeric_error("hecke_matrix: insufficient precision, need q-expansions to q^" +
                            std::to_string(need));
    mpz_class pk1;
    mpz_ui_pow_ui(pk1.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));
    mpz_matrix m(d);
    for (int i = 0; i < d; ++i)
        for (int j = 1; j <= d; ++j) {
            mpz_class v = basis[i].c(static_cast<long>(j) * static_cast<long>(p));
            if (j % static_cast<long>(p) == 0) v += pk1 * basis[i].c(j / static_cast<long>(p));
            m.at(j - 1, i) = v;
        }
    return m;
}

// Monic characteristic polynomial by the Faddeev-LeVerrier recurrence; all
// divisions are exact over the integers.
inline std::vector<mpz_class> charpoly(const mpz_matrix& m) {
    int d = m.n;
    std::vector<mpz_class> c(d + 1);
    c[d] = 1;
    mpz_matrix nmat = m;
    for (int step = 1; step <= d; ++step) {
        mpz_class tr = 0;
        for (int i = 0; i < d; ++i) tr += nmat.at(i, i);
        mpz_class coef;
        mpz_divexact_ui(coef.get_mpz_t(), tr.get_mpz_t(), static_cast<unsigned long>(step));
        coef = -coef;
        c[d - step] = coef;
        if (step == d) break;
        for (int i = 0; i < d; ++i) nmat.at(i, i) += coef;
        nmat = m.mul(nmat);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Root extraction and eigenvectors in big-float precision
// ---------------------------------------------------------------------------

namespace detail {

struct scaled_poly {
    // p(lambda) with lambda = 2^e t; q(t) = sum qc[i] t^i has same roots in t
    std::vector<mpf_class> qc;
    std::vector<double> qd;
    int degree;
    long e;

    double eval_d(double t) const {
        double v = qd[degree];
        for (int i = degree - 1; i >= 0; --i) v = v * t + qd[i];
        return v;
    }
    mpf_class eval(const mpf_class& t) const {
        mpf_class v = qc[degree];
        for (int i = degree - 1; i >= 0; --i) v = v * t + qc[i];
        return v;
    }
    mpf_class eval_deriv(const mpf_class& t) const {
        mpf_class v = qc[degree] * degree;
        for (int i = degree - 1; i >= 1; --i) v = v * t + qc[i] * i;
        return v;
    }
};

// Rescale p(lambda) to q(t) with lambda = 2^e t; picking 2^e ~ p^{(k-1)/2}
// puts every root inside |t| < 3 or so and keeps all shifts exact.
inline scaled_poly scale_charpoly(const std::vector<mpz_class>& c, long e, unsigned prec_bits) {
    scaled_poly sp;
    sp.degree = static_cast<int>(c.size()) - 1;
    sp.e = e;
    sp.qc.resize(c.size());
    sp.qd.resize(c.size());
    for (int i = 0; i <= sp.degree; ++i) {
        mpf_class v(c[i], prec_bits);
        long shift = sp.e * (sp.degree - i);
        if (shift > 0) mpf_div_2exp(v.get_mpf_t(), v.get_mpf_t(), static_cast<unsigned long>(shift));
        sp.qc[i] = v;
        sp.qd[i] = v.get_d();
    }
    return sp;
}

// All real roots of the scaled polynomial (they are known to be real and
// simple for Hecke matrices; a failed scan triggers the degenerate error).
inline std::vector<mpf_class> scaled_real_roots(const scaled_poly& sp, unsigned prec_bits) {
    const double lo = -3.2, hi = 3.2;
    int grid = 4096;
    std::vector<std::pair<double, double>> brackets;
    for (int attempt = 0; attempt < 4 && static_cast<int>(brackets.size()) < sp.degree; ++attempt) {
        brackets.clear();
        double prev_x = lo, prev_v = sp.eval_d(lo);
        for (int i = 1; i <= grid; ++i) {
            double x = lo + (hi - lo) * i / grid;
            double v = sp.eval_d(x);
            if (prev_v == 0.0) brackets.push_back({prev_x - 1e-12, prev_x + 1e-12});
            else if (v != 0.0 && ((prev_v < 0) != (v < 0)))
                brackets.push_back({prev_x, x});
            prev_x = x;
            prev_v = v;
        }
        grid *= 8;
    }
    if (static_cast<int>(brackets.size()) != sp.degree)
        throw numeric_error("eigenforms: could not isolate all eigenvalues (near-degenerate spectrum)");
    std::vector<mpf_class> roots;
    for (auto [a, b] : brackets) {
        // double bisection to tighten, then Newton in mpf
        double fa = sp.eval_d(a);
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (a + b);
            double fm = sp.eval_d(mid);
            if (fm == 0.0) { a = b = mid; break; }
            if ((fa < 0) != (fm < 0)) b = mid;
            else { a = mid; fa = fm; }
        }
        mpf_class t(0.5 * (a + b), prec_bits);
        for (int it = 0; it < 64; ++it) {
            mpf_class f = sp.eval(t);
            mpf_class df = sp.eval_deriv(t);
            if (df == 0) break;
            mpf_class step = f / df;
            t -= step;
            mpf_class tol(1, prec_bits);
            mpf_div_2exp(tol.get_mpf_t(), tol.get_mpf_t(), prec_bits > 64 ? prec_bits - 32 : 32);
            if (abs(step) < tol) break;
        }
        roots.push_back(t);
    }
    std::sort(roots.begin(), roots.end(),
              [](const mpf_class& x, const mpf_class& y) { return x < y; });
    return roots;
}

// Null vector of (M - lambda I) via partial-pivot elimination; the matrix has
// numerical rank d-1, so the last pivot collapses and back-substitution with
// v_last = 1 recovers the eigenvector.
inline std::vector<mpf_class> eigenvector(const mpz_matrix& m, const mpf_class& lambda,
                                          unsigned prec_bits) {
    int d = m.n;
    std::vector<std::vector<mpf_class>> a(d, std::vector<mpf_class>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            a[i][j] = mpf_class(m.at(i, j), prec_bits);
            if (i == j) a[i][j] -= lambda;
        }
    for (int col = 0; col < d - 1; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (abs(a[r][col]) > abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        if (a[col][col] == 0) continue;
        for (int r = col + 1; r < d; ++r) {
            mpf_class f = a[r][col] / a[col][col];
            for (int j = col; j < d; ++j) a[r][j] -= f * a[col][j];
        }
    }
    std::vector<mpf_class> v(d, mpf_class(0, prec_bits));
    v[d - 1] = 1;
    for (int i = d - 2; i >= 0; --i) {
        mpf_class s(0, prec_bits);
        for (int j = i + 1; j < d; ++j) s += a[i][j] * v[j];
        if (a[i][i] == 0)
            throw numeric_error("eigenforms: singular elimination (degenerate eigenvector)");
        v[i] = -s / a[i][i];
    }
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hecke eigenform with on-demand multiplicative coefficient service
// ---------------------------------------------------------------------------

class hecke_eigenform {
  public:
    int weight = 0;
    int index = 0;  // position within H_k, ordered by ascending a(2)
    uint64_t prime_bound = 0;
    std::map<uint64_t, double> prime_eigenvalues;  // normalized a(p)
    double l1_symsq = 0.0;                         // L(1, sym^2 f), filled by lfun

    // direct table a(n) from the exact expansion, n <= prime_bound
    std::vector<double> an_table;

    double coefficient(uint64_t n) const {
        if (n == 0) throw numeric_error("coefficient: n must be positive");
        if (n == 1) return 1.0;
        double r = 1.0;
        for (const auto& [p, e] : factorize(n)) r *= prime_power_coeff(p, e);
        return r;
    }

    // a(n^2) without forming n^2 (n may exceed 2^32)
    double coefficient_sq(uint64_t n) const {
        if (n == 0) throw numeric_error("coefficient_sq: n must be positive");
        double r = 1.0;
        for (const auto& [p, e] : factorize(n)) r *= prime_power_coeff(p, 2 * e);
        return r;
    }

    // a(p^e) by the recursion a(p^{e+1}) = a(p) a(p^e) - a(p^{e-1})
    double prime_power_coeff(uint64_t p, unsigned e) const {
        auto it = prime_eigenvalues.find(p);
        if (it == prime_eigenvalues.end())
            throw numeric_error("coefficient: prime " + std::to_string(p) +
                                " exceeds stored prime bound " + std::to_string(prime_bound));
        double ap = it->second;
        double v0 = 1.0, v1 = ap;
        for (unsigned i = 1; i < e; ++i) {
            double v2 = ap * v1 - v0;
            v0 = v1;
            v1 = v2;
        }
        return e == 0 ? 1.0 : v1;
    }
};

// Dirichlet coefficients of zeta(2s) * sum a(n^2) n^{-s}:
//   c_m = sum_{d^2 e = m} a(e^2).
inline std::vector<double> symsq_dirichlet_coeffs(const hecke_eigenform& f, long nmax) {
    std::vector<double> c(static_cast<std::size_t>(nmax) + 1, 0.0);
    for (uint64_t e = 1; e <= static_cast<uint64_t>(nmax); ++e) {
        double ae2 = f.coefficient_sq(e);
        for (uint64_t d = 1; d * d * e <= static_cast<uint64_t>(nmax); ++d) c[d * d * e] += ae2;
    }
    return c;
}

struct eigenform_diagnostics {
    double t3_residual = 0.0;  // relative eigen-residual against T_3
    double t5_residual = 0.0;
    double charpoly_residual = 0.0;
    double min_gap = 0.0;  // minimal normalized eigenvalue gap of T_2
};

// All of H_k with normalized a_f(p) for p <= prime_bound, ordered by
// ascending a_f(2). Throws when dim S_k = 0 or the spectrum cannot be
// separated (after falling back from T_2 to T_3).
inline std::vector<hecke_eigenform> eigenforms(int k, uint64_t prime_bound,
                                               eigenform_diagnostics* diag = nullptr) {
    int d = dim_cusp_forms(k);
    if (d == 0)
        throw numeric_error("eigenforms: no cusp forms of weight " + std::to_string(k));
    if (prime_bound < 5) prime_bound = 5;
    long prec = std::max<long>(static_cast<long>(prime_bound), 5L * (d + 1));
    auto basis = victor_miller_basis(k, prec);

    unsigned prec_bits = static_cast<unsigned>(static_cast<long>(d) * (k - 1) / 2 + 320);

    mpz_matrix t_active = hecke_matrix(k, 2, basis);
    long e_active = (k - 2) / 2;
    auto sp = detail::scale_charpoly(charpoly(t_active), e_active, prec_bits);
    std::vector<mpf_class> troots;
    bool used_t3 = false;
    double min_gap = 0.0;
    auto gap_of = [](const std::vector<mpf_class>& r) {
        double g = 1e300;
        double scale = 1.0;
        for (const auto& x : r) scale = std::max(scale, std::abs(x.get_d()));
        for (std::size_t i = 1; i < r.size(); ++i)
            g = std::min(g, std::abs(mpf_class(r[i] - r[i - 1]).get_d()) / scale);
        return r.size() > 1 ? g : 1.0;
    };
    try {
        troots = detail::scaled_real_roots(sp, prec_bits);
        min_gap = gap_of(troots);
        if (min_gap < 1e-8) throw numeric_error("eigenforms: T_2 spectrum nearly degenerate");
    } catch (const numeric_error&) {
        // fall back to T_3; abort if still degenerate
        used_t3 = true;
        t_active = hecke_matrix(k, 3, basis);
        e_active = static_cast<long>(std::ceil((k - 1) * std::log2(3.0) / 2.0));
        sp = detail::scale_charpoly(charpoly(t_active), e_active, prec_bits);
        troots = detail::scaled_real_roots(sp, prec_bits);
        min_gap = gap_of(troots);
        if (min_gap < 1e-8)
            throw numeric_error("eigenforms: degenerate spectrum for both T_2 and T_3");
    }

    mpz_matrix t3 = hecke_matrix(k, 3, basis);
    mpz_matrix t5 = hecke_matrix(k, 5, basis);

    std::vector<hecke_eigenform> forms;
    double worst_t3 = 0.0, worst_t5 = 0.0, worst_cp = 0.0;
    for (int r = 0; r < d; ++r) {
        // unscaled eigenvalue lambda = t * 2^e
        mpf_class lambda = troots[r];
        mpf_mul_2exp(lambda.get_mpf_t(), lambda.get_mpf_t(), static_cast<unsigned long>(e_active));
        // residual of the exact characteristic polynomial at the refined root
        {
            mpf_class pv = sp.eval(troots[r]);
            mpf_class dv = sp.eval_deriv(troots[r]);
            double res = std::abs(pv.get_d()) / std::max(1e-300, std::abs(dv.get_d()));
            worst_cp = std::max(worst_cp, res);
        }
        auto v = detail::eigenvector(t_active, lambda, prec_bits);

        // normalize so the q^1 coefficient is 1 (basis is echelonized)
        if (v[0] == 0) throw numeric_error("eigenforms: eigenvector has vanishing first coefficient");
        for (int i = d - 1; i >= 0; --i) v[i] /= v[0];

        // residuals against T_3 and T_5: ||T v - mu v|| / (||T|| ||v||)
        auto residual = [&](const mpz_matrix& t) {
            std::vector<mpf_class> tv(d, mpf_class(0, prec_bits));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) tv[i] += mpf_class(t.at(i, j), prec_bits) * v[j];
            // Rayleigh-style mu from the largest |v| entry
            int imax = 0;
            for (int i = 0; i < d; ++i)
                if (abs(v[i]) > abs(v[imax])) imax = i;
            mpf_class mu = tv[imax] / v[imax];
            double num = 0.0, den = 0.0, tnorm = 0.0, vnorm = 0.0;
            for (int i = 0; i < d; ++i) {
                num += std::pow(mpf_class(tv[i] - mu * v[i]).get_d(), 2);
                vnorm += std::pow(v[i].get_d(), 2);
            }
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) tnorm += std::pow(mpf_class(t.at(i, j), prec_bits).get_d(), 2);
            den = std::sqrt(tnorm) * std::sqrt(vnorm);
            return den > 0 ? std::sqrt(num) / den : 0.0;
        };
        worst_t3 = std::max(worst_t3, residual(t3));
        worst_t5 = std::max(worst_t5, residual(t5));

        hecke_eigenform f;
        f.weight = k;
        f.prime_bound = prime_bound;

        // normalized a(n) table from the exact expansion: a(n) = sum v_i g_i(n) / n^{(k-1)/2}
        f.an_table.assign(static_cast<std::size_t>(prec) + 1, 0.0);
        f.an_table[1] = 1.0;
        mpf_class acc(0, prec_bits), npow(0, prec_bits);
        for (long n = 1; n <= prec; ++n) {
            acc = 0;
            for (int i = 0; i < d; ++i) {
                if (basis[i].c(n) == 0) continue;
                acc += v[i] * mpf_class(basis[i].c(n), prec_bits);
            }
            mpf_class nf(static_cast<unsigned long>(n), prec_bits);
            mpf_pow_ui(npow.get_mpf_t(), nf.get_mpf_t(), static_cast<unsigned long>(k - 1));
            mpf_sqrt(npow.get_mpf_t(), npow.get_mpf_t());
            acc /= npow;
            f.an_table[static_cast<std::size_t>(n)] = acc.get_d();
        }
        // prime eigenvalue map
        auto tab = sieve(std::max<uint64_t>(prime_bound, 64));
        for (uint64_t p = 2; p <= prime_bound && p < static_cast<uint64_t>(f.an_table.size()); ++p)
            if (tab->spf[p] == p) f.prime_eigenvalues[p] = f.an_table[p];
        forms.push_back(std::move(f));
    }

    std::sort(forms.begin(), forms.end(), [](const hecke_eigenform& x, const hecke_eigenform& y) {
        double a2x = x.an_table[2], a2y = y.an_table[2];
        if (a2x != a2y) return a2x < a2y;
        return x.an_table[3] < y.an_table[3];
    });
    for (int i = 0; i < d; ++i) forms[i].index = i;

    if (diag) {
        diag->t3_residual = worst_t3;
        diag->t5_residual = worst_t5;
        diag->charpoly_residual = worst_cp;
        diag->min_gap = min_gap;
    }
    if (!used_t3 && (worst_t3 > 1e-8 || worst_t5 > 1e-8))
        throw numeric_error("eigenforms: eigenvector fails T_3/T_5 consistency");
    return forms;
}

}  // namespace symsq
