// Independent brute-force oracles. These stay deliberately naive and share no
// code with the library paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------------
// Gestalt pattern matching: exhaustive recursion over all tied choices of the
// longest common substring, maximizing the total matched characters.
// ---------------------------------------------------------------------------

inline std::vector<std::pair<std::size_t, std::size_t>> longest_common_positions(
    const std::string& a, const std::string& b, std::size_t& best_len) {
    best_len = 0;
    std::vector<std::pair<std::size_t, std::size_t>> positions;
    std::vector<std::vector<std::size_t>> dp(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] != b[j - 1]) continue;
            dp[i][j] = dp[i - 1][j - 1] + 1;
            if (dp[i][j] > best_len) {
                best_len = dp[i][j];
                positions.clear();
            }
            if (dp[i][j] == best_len) positions.emplace_back(i - best_len, j - best_len);
        }
    }
    return positions;
}

inline std::size_t gestalt_max_matched(const std::string& a, const std::string& b) {
    if (a.empty() || b.empty()) return 0;
    std::size_t len = 0;
    const auto positions = longest_common_positions(a, b, len);
    if (len == 0) return 0;
    std::size_t best = 0;
    for (const auto& [i, j] : positions) {
        const std::size_t m = len + gestalt_max_matched(a.substr(0, i), b.substr(0, j)) +
                              gestalt_max_matched(a.substr(i + len), b.substr(j + len));
        best = std::max(best, m);
    }
    return best;
}

inline double gestalt_similarity(const std::string& a, const std::string& b) {
    if (a.empty() && b.empty()) return 1.0;
    return 2.0 * static_cast<double>(gestalt_max_matched(a, b)) /
           static_cast<double>(a.size() + b.size());
}

// ---------------------------------------------------------------------------
// DTW: enumerate every admissible path and take the cheapest.
// ---------------------------------------------------------------------------

namespace detail {

inline void dtw_enumerate(const std::vector<double>& x, const std::vector<double>& y, std::size_t i,
                          std::size_t j, double acc, double& best) {
    acc += std::abs(x[i] - y[j]);
    if (i + 1 == x.size() && j + 1 == y.size()) {
        best = std::min(best, acc);
        return;
    }
    if (i + 1 < x.size() && j + 1 < y.size()) dtw_enumerate(x, y, i + 1, j + 1, acc, best);
    if (i + 1 < x.size()) dtw_enumerate(x, y, i + 1, j, acc, best);
    if (j + 1 < y.size()) dtw_enumerate(x, y, i, j + 1, acc, best);
}

}  // namespace detail

inline double dtw_min_cost_bruteforce(const std::vector<double>& x, const std::vector<double>& y) {
    double best = std::numeric_limits<double>::infinity();
    detail::dtw_enumerate(x, y, 0, 0, 0.0, best);
    return best;
}

// ---------------------------------------------------------------------------
// Welch t-test: textbook formulas, p-value by adaptive Simpson quadrature of
// the Student-t density (independent of any incomplete-beta implementation).
// ---------------------------------------------------------------------------

inline double student_t_pdf(double x, double df) {
    const double c = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                     0.5 * std::log(df * std::acos(-1.0));
    return std::exp(c - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(double (*f)(double, double), double df, double a, double b, double fa,
                               double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm, df), frm = f(rm, df);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, df, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, df, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

// Two-sided p: 1 - integral of the density over [-|t|, |t|].
inline double student_t_two_sided_p(double t, double df) {
    const double hi = std::abs(t);
    if (hi == 0.0) return 1.0;
    const double fa = student_t_pdf(-hi, df);
    const double fm = student_t_pdf(0.0, df);
    const double fb = student_t_pdf(hi, df);
    const double whole = detail::simpson(-hi, hi, fa, fm, fb);
    const double integral =
        detail::adaptive_simpson(student_t_pdf, df, -hi, hi, fa, fm, fb, whole, 1e-12, 40);
    return std::max(0.0, 1.0 - integral);
}

struct WelchOracle {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

inline WelchOracle welch_oracle(const std::vector<double>& a, const std::vector<double>& b) {
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    auto var = [&mean](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return s / static_cast<double>(v.size() - 1);
    };
    WelchOracle r;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = var(a) / na, vb = var(b) / nb;
    r.t = (mean(a) - mean(b)) / std::sqrt(va + vb);
    r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

// ---------------------------------------------------------------------------
// Naive DFT power spectrum (first n_bins bins of an n_fft transform).
// ---------------------------------------------------------------------------

inline std::vector<double> dft_power(const std::vector<double>& frame, std::size_t n_fft) {
    const std::size_t n_bins = n_fft / 2 + 1;
    std::vector<double> power(n_bins, 0.0);
    const double pi = std::acos(-1.0);
    for (std::size_t k = 0; k < n_bins; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t n = 0; n < frame.size(); ++n) {
            const double ang = -2.0 * pi * static_cast<double>(k) * static_cast<double>(n) /
                               static_cast<double>(n_fft);
            re += frame[n] * std::cos(ang);
            im += frame[n] * std::sin(ang);
        }
        power[k] = re * re + im * im;
    }
    return power;
}

}  // namespace oracles
