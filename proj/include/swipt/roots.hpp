#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

namespace swipt {

/// a3 p^3 + a2 p^2 + a1 p + a0
struct CubicCoeffs {
    double a3 = 0.0, a2 = 0.0, a1 = 0.0, a0 = 0.0;

    double operator()(double p) const noexcept { return ((a3 * p + a2) * p + a1) * p + a0; }
    double derivative(double p) const noexcept { return (3.0 * a3 * p + 2.0 * a2) * p + a1; }
    /// Magnitude of the largest term at p, used to judge residuals.
    double term_scale(double p) const noexcept {
        return std::max({std::abs(a3 * p * p * p), std::abs(a2 * p * p), std::abs(a1 * p), std::abs(a0)});
    }
    /// Coefficients of the same polynomial in u = p / s.
    CubicCoeffs rescaled(double s) const noexcept { return {a3 * s * s * s, a2 * s * s, a1 * s, a0}; }
};

/// a2 p^2 + a1 p + a0
struct QuadCoeffs {
    double a2 = 0.0, a1 = 0.0, a0 = 0.0;

    double operator()(double p) const noexcept { return (a2 * p + a1) * p + a0; }
    double term_scale(double p) const noexcept {
        return std::max({std::abs(a2 * p * p), std::abs(a1 * p), std::abs(a0)});
    }
    QuadCoeffs rescaled(double s) const noexcept { return {a2 * s * s, a1 * s, a0}; }
};

/// Up to three real roots, ascending.
class RootSet {
public:
    std::size_t size() const noexcept { return n_; }
    bool empty() const noexcept { return n_ == 0; }
    double operator[](std::size_t i) const noexcept { return v_[i]; }
    const double* begin() const noexcept { return v_.data(); }
    const double* end() const noexcept { return v_.data() + n_; }

    void push(double x) noexcept {
        if (n_ < v_.size()) v_[n_++] = x;
    }

    /// Sorts and merges roots closer than `rel` relative to their magnitude.
    void normalize(double rel = 1e-9) noexcept {
        std::sort(v_.begin(), v_.begin() + n_);
        std::size_t out = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (out > 0 && std::abs(v_[i] - v_[out - 1]) <= rel * std::max(std::abs(v_[i]), std::abs(v_[out - 1])))
                continue;
            v_[out++] = v_[i];
        }
        n_ = out;
    }

private:
    std::array<double, 3> v_{};
    std::size_t n_ = 0;
};

inline constexpr double kDegenerateRel = 1e-14;

/// -gamma + sum_k lambda_k zeta_k |h_{k,n}|^2
inline double omega(double gamma, std::span<const double> lambdas, std::span<const double> zetas,
                    std::span<const double> er_gains_n) {
    double sum = -gamma;
    for (std::size_t k = 0; k < lambdas.size(); ++k) sum += lambdas[k] * zetas[k] * er_gains_n[k];
    return sum;
}

/// Unclamped stationary splitting ratio 1/2 + (b - h) s / (2 b h p).
inline double alpha_star_unclamped(double h2, double b2, double p, double sigma2) {
    return 0.5 + (b2 - h2) * sigma2 / (2.0 * b2 * h2 * p);
}

/// Rate-maximizing AN fraction for a given power, clamped to [0,1].
inline double alpha_star(double h2, double b2, double p, double sigma2) {
    if (!(p > 0.0)) throw std::domain_error("alpha_star requires p > 0");
    if (!(h2 > 0.0) || !(b2 > 0.0) || !(sigma2 > 0.0)) throw std::domain_error("alpha_star requires positive gains and noise");
    return std::clamp(alpha_star_unclamped(h2, b2, p, sigma2), 0.0, 1.0);
}

/// Numerator of d/dp [w (r - r^e) + Omega p] (times -1) at a fixed
/// splitting ratio. Its positive denominator is
/// ln2 (s + b p)(s + a b p)(s + (1-a) h p).
inline CubicCoeffs cubic_coeffs(double h2, double b2, double alpha, double w, double omega_n, double sigma2) {
    constexpr double ln2 = std::numbers::ln2;
    const double s2 = sigma2, s4 = s2 * s2, s6 = s4 * s2;
    const double aa = alpha * alpha - alpha;
    const double b4 = b2 * b2;
    CubicCoeffs c;
    c.a3 = ln2 * h2 * aa * b4 * omega_n;
    c.a2 = aa * b4 * h2 * w + ln2 * b2 * s2 * ((alpha * alpha - 1.0) * h2 - b2 * alpha) * omega_n;
    c.a1 = ln2 * s4 * omega_n * ((alpha - 1.0) * (h2 - b2) - 2.0 * b2) + 2.0 * aa * b2 * h2 * w * s2;
    c.a0 = (alpha - 1.0) * (h2 - b2) * w * s4 - ln2 * s6 * omega_n;
    return c;
}

/// Stationarity condition in p once the interior alpha*(p) is substituted.
/// The substituted numerator factors as (b h p + b s + h s) times this
/// quadratic; the first factor is positive for p >= 0.
inline QuadCoeffs quadratic_coeffs(double h2, double b2, double w, double omega_n, double sigma2) {
    constexpr double ln2 = std::numbers::ln2;
    const double s2 = sigma2;
    QuadCoeffs q;
    q.a2 = ln2 * b2 * b2 * h2 * omega_n;
    q.a1 = w * b2 * b2 * h2 + ln2 * omega_n * s2 * b2 * (b2 + 2.0 * h2);
    q.a0 = s2 * (ln2 * omega_n * s2 * (b2 + h2) + w * b2 * (h2 - b2));
    return q;
}

namespace detail {

/// Real roots of a2 x^2 + a1 x + a0 via q = -(a1 + sign(a1) sqrt(D)) / 2,
/// roots q / a2 and a0 / q, which avoids cancellation in the smaller root
/// and never divides by a vanishing leading coefficient.
inline void push_quadratic(RootSet& out, double a2, double a1, double a0) {
    const double scale = std::max({std::abs(a2), std::abs(a1), std::abs(a0)});
    if (scale == 0.0) return;
    // Power-of-two normalization keeps the coefficients exact.
    const int e = std::ilogb(scale);
    a2 = std::scalbn(a2, -e), a1 = std::scalbn(a1, -e), a0 = std::scalbn(a0, -e);
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    double root_disc = 0.0;
    if (disc < 0.0) {
        // A tiny negative discriminant from rounding is a double root.
        if (disc < -1e-12 * a1 * a1) return;
    } else {
        root_disc = std::sqrt(disc);
    }
    const double q = -0.5 * (a1 + std::copysign(root_disc, a1));
    if (q == 0.0) {
        if (a0 == 0.0) out.push(0.0);
        return;
    }
    if (a2 != 0.0 && std::isfinite(q / a2)) out.push(q / a2);
    out.push(a0 / q);
}

/// Newton steps on the full cubic, accepted while the residual shrinks.
inline double newton_polish(const CubicCoeffs& c, double x) {
    double best = x, best_res = std::abs(c(x));
    for (int it = 0; it < 6 && best_res > 0.0; ++it) {
        const double d = c.derivative(x);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double nx = x - c(x) / d;
        const double res = std::abs(c(nx));
        if (!std::isfinite(nx) || !(res < best_res)) break;
        x = nx;
        best = nx;
        best_res = res;
    }
    return best;
}

inline bool meets_residual(const CubicCoeffs& c, double x, double rel = 1e-10) {
    return std::isfinite(x) && std::abs(c(x)) <= rel * std::max(c.term_scale(x), 1e-300);
}

/// Root of c on [lo, hi] given a sign change, by Newton steps safeguarded
/// with bisection.
inline double bracketed_root(const CubicCoeffs& c, double lo, double hi) {
    const bool lo_negative = c(lo) < 0.0;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = c(x);
        if (fx == 0.0) return x;
        ((fx < 0.0) == lo_negative ? lo : hi) = x;
        const double d = c.derivative(x);
        double nx = d != 0.0 ? x - fx / d : lo;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (nx == x || !(hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))))
            return nx;
        x = nx;
    }
    return x;
}

/// Critical points of a non-degenerate cubic, ascending.
inline RootSet critical_points(const CubicCoeffs& c) {
    RootSet crit;
    push_quadratic(crit, 3.0 * c.a3, 2.0 * c.a2, c.a1);
    crit.normalize(0.0);
    return crit;
}

/// Slow but unconditionally robust: one bracketed search per monotone
/// piece between the critical points, within the Cauchy root bound.
inline RootSet cubic_roots_bracketing(const CubicCoeffs& c, const RootSet& crit) {
    const double bound = std::min(
        1.0 + std::max({std::abs(c.a2 / c.a3), std::abs(c.a1 / c.a3), std::abs(c.a0 / c.a3)}), 1e150);
    std::array<double, 5> pts{};
    std::size_t m = 0;
    pts[m++] = -bound;
    for (double x : crit) pts[m++] = std::clamp(x, -bound, bound);
    pts[m++] = bound;
    RootSet out;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double u = pts[i], v = pts[i + 1], fu = c(u), fv = c(v);
        if (fu == 0.0) out.push(u);
        else if ((fu < 0.0) != (fv < 0.0) && fv != 0.0) out.push(bracketed_root(c, u, v));
    }
    if (c(pts[m - 1]) == 0.0) out.push(pts[m - 1]);
    // Tangent (double) roots sit on critical points without a sign change.
    for (double x : crit)
        if (meets_residual(c, x, 1e-12)) out.push(x);
    out.normalize();
    return out;
}

/// Number of distinct real roots implied by the critical values, or -1 when
/// a critical value is too close to zero to tell.
inline int expected_root_count(const CubicCoeffs& c, const RootSet& crit) {
    if (crit.size() < 2) return 1;
    const double f1 = c(crit[0]), f2 = c(crit[1]);
    if (meets_residual(c, crit[0], 1e-12) || meets_residual(c, crit[1], 1e-12)) return -1;
    return (f1 < 0.0) != (f2 < 0.0) ? 3 : 1;
}

}  // namespace detail

/// Real roots of a quadratic with a cancellation-free discriminant formula.
/// A vanishing leading coefficient yields the linear root.
inline RootSet real_roots_quadratic(const QuadCoeffs& q) {
    const double scale = std::max({std::abs(q.a2), std::abs(q.a1), std::abs(q.a0)});
    if (!std::isfinite(scale)) throw std::domain_error("non-finite polynomial coefficient");
    if (scale == 0.0) throw std::domain_error("all-zero polynomial");
    RootSet out;
    detail::push_quadratic(out, q.a2, q.a1, q.a0);
    out.normalize();
    return out;
}

/// Real roots of a cubic: trigonometric / Cardano on the normalized
/// polynomial with Newton polish on the original coefficients. Results are
/// checked against the root count implied by the critical points and
/// against their residuals; on any doubt, or when the leading coefficient
/// is below 1e-14 of the largest, a bracketed search is used instead.
inline RootSet real_roots_cubic(const CubicCoeffs& c) {
    const double scale = std::max({std::abs(c.a3), std::abs(c.a2), std::abs(c.a1), std::abs(c.a0)});
    if (!std::isfinite(scale)) throw std::domain_error("non-finite polynomial coefficient");
    if (scale == 0.0) throw std::domain_error("all-zero polynomial");

    RootSet out;
    if (c.a3 == 0.0) {
        detail::push_quadratic(out, c.a2, c.a1, c.a0);
        out.normalize();
        return out;
    }
    // A negligible leading coefficient makes the normalized form below
    // meaningless; the bracketed search never divides by it.
    if (std::abs(c.a3) <= kDegenerateRel * scale) return detail::cubic_roots_bracketing(c, detail::critical_points(c));

    // x^3 + B x^2 + C x + D, then x = t - B/3 gives t^3 + P t + Q.
    const double B = c.a2 / c.a3, C = c.a1 / c.a3, D = c.a0 / c.a3;
    const double shift = B / 3.0;
    const double P = C - B * B / 3.0;
    const double Q = 2.0 * B * B * B / 27.0 - B * C / 3.0 + D;
    const double half_q = Q / 2.0, third_p = P / 3.0;
    const double disc = half_q * half_q + third_p * third_p * third_p;

    RootSet raw;
    if (P == 0.0 && Q == 0.0) {
        raw.push(-shift);
    } else if (disc > 0.0) {
        // One real root; pick the cube-root branch without cancellation.
        const double A = -std::cbrt(half_q + std::copysign(std::sqrt(disc), half_q));
        const double t = A == 0.0 ? 0.0 : A - third_p / A;
        raw.push(t - shift);
    } else {
        const double r = std::sqrt(-third_p);
        const double cos_arg = std::clamp(-half_q / (r * r * r), -1.0, 1.0);
        const double phi = std::acos(cos_arg);
        for (int i = 0; i < 3; ++i) raw.push(2.0 * r * std::cos((phi + 2.0 * std::numbers::pi * i) / 3.0) - shift);
    }

    bool trusted = true;
    for (double x : raw) {
        const double y = detail::newton_polish(c, x);
        trusted = trusted && detail::meets_residual(c, y);
        out.push(y);
    }
    out.normalize();
    const RootSet crit = detail::critical_points(c);
    const int expected = detail::expected_root_count(c, crit);
    if (trusted && expected < 0) {
        // Tangency: the double root sits on a critical point.
        for (double x : crit)
            if (detail::meets_residual(c, x, 1e-12)) out.push(x);
        out.normalize();
        return out;
    }
    if (trusted && static_cast<std::size_t>(expected) == out.size()) return out;
    return detail::cubic_roots_bracketing(c, crit);
}

}  // namespace swipt
