#pragma once
// Propagation and reception: pathloss, Nakagami block fading, sensitivity,
// and capture-effect collision resolution. Frames on different spreading
// factors or channels are orthogonal and never interfere.

#include <cstddef>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "lorarelay/math.hpp"

namespace lorarelay {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

struct PropagationParams {
    double pathloss_exponent = 4.0;                    // alpha
    double wavelength_m = 299792458.0 / 868e6;         // lambda
    double nakagami_m = 1.2;
    // Typical transceiver sensitivities; a calibration surface, not a given.
    std::map<int, double> sensitivity_dbm = {
        {7, -123.0}, {8, -126.0}, {9, -129.0},
        {10, -132.0}, {11, -134.5}, {12, -137.0}};
    double capture_threshold_db = 6.0;

    void validate() const {
        if (pathloss_exponent <= 0.0 || wavelength_m <= 0.0)
            throw std::invalid_argument("pathloss exponent and wavelength must be positive");
        if (nakagami_m < 0.5)
            throw std::invalid_argument("nakagami_m must be >= 0.5");
        if (capture_threshold_db <= 0.0)
            throw std::invalid_argument("capture_threshold_db must be positive");
    }

    double sensitivity_mw(int sf) const {
        auto it = sensitivity_dbm.find(sf);
        if (it == sensitivity_dbm.end())
            throw std::invalid_argument("no sensitivity entry for spreading factor");
        return dbm_to_mw(it->second);
    }

    double capture_threshold_linear() const {
        return dbm_to_mw(capture_threshold_db);  // 6 dB -> ~3.981
    }

    // gamma = (lambda / 4 pi)^alpha * P_tx, linear mW
    double link_constant(double tx_power_dbm) const {
        return std::pow(wavelength_m / (4.0 * M_PI), pathloss_exponent) *
               dbm_to_mw(tx_power_dbm);
    }
};

struct LinkDraw {
    double distance_m = 1.0;
    double fading_gain = 1.0;  // power gain A, mean 1
};

// P_rx = gamma * A * d^(-alpha), linear mW
inline double received_power_mw(double tx_power_dbm, const PropagationParams& params,
                                const LinkDraw& link) {
    if (link.distance_m <= 0.0)
        throw std::invalid_argument("distance must be positive");
    return params.link_constant(tx_power_dbm) * link.fading_gain *
           std::pow(link.distance_m, -params.pathloss_exponent);
}

// Nakagami-m power gain: Gamma(shape m, scale 1/m), unit mean.
template <typename Rng>
double sample_fading(double m, Rng& rng) {
    std::gamma_distribution<double> dist(m, 1.0 / m);
    return dist(rng);
}

// CDF of the fading power gain: P(m, m x).
inline double fading_cdf(double m, double x) {
    if (x <= 0.0) return 0.0;
    return gamma_p(m, m * x);
}

// One frame as seen by a single receiver.
struct FrameAtReceiver {
    double start_s = 0.0;
    double end_s = 0.0;
    int channel = 0;
    int spreading_factor = 7;
    double power_mw = 0.0;
};

// A frame is delivered iff its power meets the sensitivity for its SF and it
// exceeds the strongest same-channel same-SF overlapping interferer by the
// capture threshold. Any nonzero temporal overlap counts for the whole frame.
inline std::vector<bool> resolve_receptions(const std::vector<FrameAtReceiver>& frames,
                                            const PropagationParams& params) {
    const double capture = params.capture_threshold_linear();
    std::vector<bool> delivered(frames.size(), false);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& f = frames[i];
        if (f.power_mw < params.sensitivity_mw(f.spreading_factor)) continue;
        double strongest = 0.0;
        for (std::size_t j = 0; j < frames.size(); ++j) {
            if (j == i) continue;
            const auto& g = frames[j];
            if (g.channel != f.channel || g.spreading_factor != f.spreading_factor)
                continue;
            if (g.start_s < f.end_s && f.start_s < g.end_s && g.power_mw > strongest)
                strongest = g.power_mw;
        }
        delivered[i] = f.power_mw >= capture * strongest;
    }
    return delivered;
}

}  // namespace lorarelay
