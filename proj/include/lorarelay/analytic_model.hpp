#pragma once
// Numerical evaluation of the measurement-loss-probability chain: direct-path
// outage (interference + fading), relay receive-window, relay buffer drop,
// and relay-to-gateway outage, composed into the MLP.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "lorarelay/channel_model.hpp"
#include "lorarelay/math.hpp"
#include "lorarelay/phy_timing.hpp"

namespace lorarelay {

// First-class distance law: uniform on [lo, hi] or a point mass.
struct DistanceLaw {
    enum class Kind { Uniform, Point };
    Kind kind = Kind::Uniform;
    double lo = 0.0;
    double hi = 0.0;

    static DistanceLaw uniform(double lo, double hi) {
        if (!(0.0 < lo && lo < hi))
            throw std::invalid_argument("uniform distance law needs 0 < lo < hi");
        return {Kind::Uniform, lo, hi};
    }
    static DistanceLaw point(double u) {
        if (u <= 0.0) throw std::invalid_argument("point distance must be positive");
        return {Kind::Point, u, u};
    }

    double pdf(double u) const {
        if (kind == Kind::Point) throw std::logic_error("pdf of a point mass");
        return (u >= lo && u <= hi) ? 1.0 / (hi - lo) : 0.0;
    }

    template <typename Rng>
    double sample(Rng& rng) const {
        if (kind == Kind::Point) return lo;
        std::uniform_real_distribution<double> d(lo, hi);
        return d(rng);
    }

    // E[g(D)]
    template <typename F>
    double expect(F&& g, double rel_tol) const {
        if (kind == Kind::Point) return g(lo);
        const double width = hi - lo;
        return integrate_checked([&](double u) { return g(u) / width; }, lo, hi,
                                 rel_tol);
    }
};

struct FadingLaw {
    double m = 1.2;
    double support_hi() const { return gamma_p_inverse(m, 1.0 - 1e-9); }
    double cdf(double x) const { return fading_cdf(m, x); }
    double pdf(double a) const {
        if (a <= 0.0) return 0.0;
        return std::exp(m * std::log(m) + (m - 1.0) * std::log(a) - m * a -
                        std::lgamma(m));
    }
};

struct AnalyticInputs {
    int n = 120;                 // sensors
    int n_channels = 3;          // n_c
    int omega = 0;               // relays
    int r = 3;                   // redundancy depth
    double capture_factor = 0.25;
    FadingLaw fading;
    PropagationParams propagation;
    DistanceLaw dist_sensor_gw = DistanceLaw::uniform(42.0, 59.0);
    DistanceLaw dist_sensor_relay = DistanceLaw::uniform(10.0, 52.0);
    DistanceLaw dist_relay_gw = DistanceLaw::uniform(14.1, 28.3);
    TrafficConfig traffic;
    RadioConfig sensor_radio;
    RadioConfig relay_radio;
    double t_rx_s = 30.0;
    double t_tx_s = 0.3;

    void validate() const {
        if (n < 1 || n_channels < 1 || omega < 0 || r < 0)
            throw std::invalid_argument("counts must be nonnegative, n and n_c >= 1");
        if (capture_factor <= 0.0 || capture_factor >= 1.0)
            throw std::invalid_argument("capture_factor must be in (0,1)");
        const double xi = t_rx_s / traffic.measurement_period_s;
        if (std::fabs(xi - std::round(xi)) > 1e-9 || xi < 1.0 - 1e-9)
            throw std::invalid_argument("t_rx must be an integer multiple of t, >= t");
    }

    int xi() const {
        return static_cast<int>(std::round(t_rx_s / traffic.measurement_period_s));
    }
    double sensor_frame_duration() const {
        return frame_duration(
            (static_cast<std::int64_t>(r) + 1) * traffic.measurement_bytes,
            sensor_radio);
    }
};

struct MlpBreakdown {
    double p_i = 0.0;      // sensor->gw interference outage
    double p_f = 0.0;      // sensor->gw fading outage
    double p_dir = 0.0;
    double p_rw = 0.0;     // receive-window probability (identical relays)
    double p_s_r = 0.0;    // sensor->relay single-frame failure
    double p_drop = 0.0;
    double p_r_g = 0.0;    // relay->gw fading outage
    double p_ri = 0.0;     // per-relay failure
    double mlp = 0.0;
};

// P_f = integral of F_A(psi u^alpha / gamma) over the distance law.
inline double outage_fading(const DistanceLaw& dist, double gamma_lin, double psi_lin,
                            double alpha, const FadingLaw& fading) {
    if (psi_lin <= 0.0) return 0.0;
    return dist.expect(
        [&](double u) { return fading.cdf(psi_lin * std::pow(u, alpha) / gamma_lin); },
        1e-6);
}

enum class LinkKind { SensorToGateway, SensorToRelay };

namespace detail {
// E_U[F_A(rho U^alpha)] tabulated over log(rho) with linear interpolation.
// The inner integral depends on (a, w) only through rho = cf * a / w^alpha,
// so one table serves the whole 2-D outer integral.
class CaptureSurvivalTable {
  public:
    CaptureSurvivalTable(const DistanceLaw& law, const FadingLaw& fading,
                         double alpha, double rho_lo, double rho_hi,
                         std::size_t points = 8192)
        : log_lo_(std::log(rho_lo)), log_hi_(std::log(rho_hi)), values_(points) {
        const double step = (log_hi_ - log_lo_) / static_cast<double>(points - 1);
        for (std::size_t i = 0; i < points; ++i) {
            const double rho = std::exp(log_lo_ + step * static_cast<double>(i));
            values_[i] = law.expect(
                [&](double u) { return fading.cdf(rho * std::pow(u, alpha)); },
                1e-6);
        }
    }

    double operator()(double rho) const {
        if (rho <= 0.0) return 0.0;
        const double lr = std::log(rho);
        if (lr <= log_lo_) return values_.front();
        if (lr >= log_hi_) return values_.back();
        const double pos = (lr - log_lo_) / (log_hi_ - log_lo_) *
                           static_cast<double>(values_.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
    }

  private:
    double log_lo_, log_hi_;
    std::vector<double> values_;
};
}  // namespace detail

// P_i = 1 - E_{A,W}[exp(-kappa(A, W))] with
// kappa = (n-1)/n_c * f(r, s_sen) * (1 - E_U[F_A(cf * a * u^alpha / w^alpha)]).
// The desired transmitter sits at distance W; interferers at i.i.d. U from
// the same population law. The fading axis uses the substitution a = s^5 to
// smooth the a^(m-1) density near zero.
inline double outage_interference(const AnalyticInputs& in, LinkKind link) {
    in.validate();
    if (in.n == 1) return 0.0;
    const DistanceLaw& law =
        link == LinkKind::SensorToGateway ? in.dist_sensor_gw : in.dist_sensor_relay;
    const double alpha = in.propagation.pathloss_exponent;
    const double rate = duty_cycle(in.r, in.sensor_radio, in.traffic) *
                        static_cast<double>(in.n - 1) / in.n_channels;
    const double a_hi = in.fading.support_hi();

    // >=20 decades below the largest rho; survival there is ~rho^m, negligible
    const double rho_hi = in.capture_factor * a_hi * std::pow(law.lo, -alpha);
    const double rho_lo = rho_hi * 1e-20;
    const detail::CaptureSurvivalTable survive(law, in.fading, alpha, rho_lo, rho_hi);

    const double s_hi = std::pow(a_hi, 0.2);
    auto exp_neg_kappa_given_w = [&](double w) {
        const double w_pow = std::pow(w, -alpha);
        return integrate_checked(
            [&](double s) {
                const double a = std::pow(s, 5.0);
                const double kappa =
                    rate * (1.0 - survive(in.capture_factor * a * w_pow));
                return std::exp(-kappa) * in.fading.pdf(a) * 5.0 * std::pow(s, 4.0);
            },
            0.0, s_hi, 1e-5);
    };
    const double mean = law.expect(exp_neg_kappa_given_w, 1e-5);
    return 1.0 - mean;
}

// Single-transmission failure: lost to interference or to fading.
inline double single_tx_failure(double p_i, double p_f) {
    return 1.0 - (1.0 - p_i) * (1.0 - p_f);
}

// P_dir = (1 - (1 - P_i)(1 - P_f))^(r+1)
inline double p_direct(double p_i, double p_f, int r) {
    if (p_i < 0.0 || p_i > 1.0 || p_f < 0.0 || p_f > 1.0)
        throw std::invalid_argument("component probabilities must be in [0,1]");
    return std::pow(single_tx_failure(p_i, p_f), r + 1);
}

// P_rw = (t_rx - t_f) / (t_rx + t_tx); uniform-start assumption.
inline double p_receive_window(double t_rx_s, double t_tx_s, double frame_s) {
    if (frame_s > t_rx_s)
        throw std::domain_error("frame longer than the receive window never fits");
    return (t_rx_s - frame_s) / (t_rx_s + t_tx_s);
}

namespace detail {
inline double log_binom(std::int64_t n, std::int64_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}
// P(X = k) for X ~ Binomial(n, q), log-space, exact at q in {0, 1}.
inline double binom_pmf(std::int64_t n, std::int64_t k, double q) {
    if (k < 0 || k > n) return 0.0;
    if (q <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (q >= 1.0) return k == n ? 1.0 : 0.0;
    return std::exp(log_binom(n, k) + k * std::log(q) +
                    (n - k) * std::log1p(-q));
}
}  // namespace detail

// Exact drop probability: Y = mu + eta with mu = n(xi-1), eta ~ Bin(n, p),
// Z | Y=y ~ Bin(y, 1-theta); a measurement is dropped w.p. max{z-v,0}/z.
// theta is the sensor->relay single-frame failure probability, p = 1 - t_f/t.
inline double p_drop_exact(int n, int xi, int v, double theta, double p) {
    if (n < 1 || xi < 1 || v < 0) throw std::invalid_argument("bad drop inputs");
    const std::int64_t mu = static_cast<std::int64_t>(n) * (xi - 1);
    if (v >= mu + n) return 0.0;
    const std::int64_t zeta = std::max<std::int64_t>(mu, v + 1);
    double total = 0.0;
    for (std::int64_t y = mu + n; y >= zeta; --y) {
        const double py = detail::binom_pmf(n, y - mu, p);
        if (py == 0.0) continue;
        double inner = 0.0;
        for (std::int64_t z = y; z >= v + 1; --z)
            inner += (1.0 - static_cast<double>(v) / static_cast<double>(z)) *
                     detail::binom_pmf(y, z, 1.0 - theta);
        total += py * inner;
    }
    return total;
}

// Approximation ignoring incomplete frames: Z ~ Bin(mu + n, 1 - theta).
inline double p_drop_approx(int n, int xi, int v, double theta) {
    if (n < 1 || xi < 1 || v < 0) throw std::invalid_argument("bad drop inputs");
    const std::int64_t trials = static_cast<std::int64_t>(n) * (xi - 1) + n;
    if (v >= trials) return 0.0;
    double total = 0.0;
    for (std::int64_t z = trials; z >= v + 1; --z)
        total += (1.0 - static_cast<double>(v) / static_cast<double>(z)) *
                 detail::binom_pmf(trials, z, 1.0 - theta);
    return total;
}

// P_ri = 1 - P_rw (1 - P_s-ri)(1 - P_drop)(1 - P_ri-g)
inline double p_via_relay(double p_rw, double p_s_r, double p_drop, double p_r_g) {
    return 1.0 - p_rw * (1.0 - p_s_r) * (1.0 - p_drop) * (1.0 - p_r_g);
}

// Full breakdown; relays are statistically identical under one input set.
inline MlpBreakdown evaluate_mlp(const AnalyticInputs& in) {
    in.validate();
    MlpBreakdown out;
    const double alpha = in.propagation.pathloss_exponent;
    const double gamma_sen = in.propagation.link_constant(in.sensor_radio.tx_power_dbm);
    const double psi_sen = in.propagation.sensitivity_mw(in.sensor_radio.spreading_factor);

    out.p_f = outage_fading(in.dist_sensor_gw, gamma_sen, psi_sen, alpha, in.fading);
    out.p_i = outage_interference(in, LinkKind::SensorToGateway);
    out.p_dir = p_direct(out.p_i, out.p_f, in.r);
    out.mlp = out.p_dir;

    if (in.omega > 0) {
        out.p_rw = p_receive_window(in.t_rx_s, in.t_tx_s, in.sensor_frame_duration());
        const double p_f_sr =
            outage_fading(in.dist_sensor_relay, gamma_sen, psi_sen, alpha, in.fading);
        const double p_i_sr = outage_interference(in, LinkKind::SensorToRelay);
        out.p_s_r = single_tx_failure(p_i_sr, p_f_sr);
        const int v = relay_capacity(in.relay_radio, in.traffic, in.t_tx_s);
        out.p_drop = p_drop_exact(in.n, in.xi(), v, out.p_s_r,
                                  1.0 - in.sensor_frame_duration() /
                                            in.traffic.measurement_period_s);
        const double gamma_rel =
            in.propagation.link_constant(in.relay_radio.tx_power_dbm);
        const double psi_rel =
            in.propagation.sensitivity_mw(in.relay_radio.spreading_factor);
        // orthogonal relay slots: fading only on the relay->gateway hop
        out.p_r_g =
            outage_fading(in.dist_relay_gw, gamma_rel, psi_rel, alpha, in.fading);
        out.p_ri = p_via_relay(out.p_rw, out.p_s_r, out.p_drop, out.p_r_g);
        for (int i = 0; i < in.omega; ++i) out.mlp *= out.p_ri;
    }
    return out;
}

}  // namespace lorarelay
