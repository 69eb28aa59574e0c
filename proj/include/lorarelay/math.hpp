#pragma once
// Special functions and Gauss-Legendre quadrature used by the channel and
// analytic models.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace lorarelay {

// Regularized lower incomplete gamma P(a, x). Series expansion for
// x < a + 1, Lentz continued fraction otherwise. Absolute error well below
// 1e-12 for the (a, x) ranges used here.
inline double gamma_p(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("gamma_p: a must be positive");
    if (x <= 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16)
                return sum * std::exp(-x + a * std::log(x) - lg);
        }
        throw std::runtime_error("gamma_p: series failed to converge");
    }
    // Q(a,x) via continued fraction, P = 1 - Q
    if (-x + a * std::log(x) - lg < -746.0) return 1.0;  // Q underflows
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 4e-16)
            return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
    }
    throw std::runtime_error("gamma_p: continued fraction failed to converge");
}

// Inverse of x -> gamma_p(a, x) by bisection; used for support truncation.
inline double gamma_p_inverse(double a, double prob) {
    if (prob <= 0.0) return 0.0;
    if (prob >= 1.0) throw std::invalid_argument("gamma_p_inverse: prob must be < 1");
    double lo = 0.0, hi = a + 1.0;
    while (gamma_p(a, hi) < prob) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gamma_p(a, mid) < prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t n) : nodes(n), weights(n) {
        for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (std::size_t k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    static const GaussLegendre& order128() {
        static const GaussLegendre gl(128);
        return gl;
    }

    template <typename F>
    double integrate(F&& f, double a, double b) const {
        if (a >= b) return 0.0;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

// Fixed-order quadrature with one bisection refinement step for error
// estimation. Throws if the refinement changes the value by more than the
// requested relative tolerance (plus a small absolute floor).
template <typename F>
double integrate_checked(F&& f, double a, double b, double rel_tol,
                         double* err_estimate = nullptr) {
    const auto& gl = GaussLegendre::order128();
    const double coarse = gl.integrate(f, a, b);
    const double mid = 0.5 * (a + b);
    const double fine = gl.integrate(f, a, mid) + gl.integrate(f, mid, b);
    const double err = std::fabs(fine - coarse);
    if (err_estimate) *err_estimate = err;
    if (err > rel_tol * std::fabs(fine) + 1e-14)
        throw std::runtime_error("quadrature did not converge to requested tolerance");
    return fine;
}

}  // namespace lorarelay
