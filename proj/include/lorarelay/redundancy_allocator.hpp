#pragma once
// Redundancy allocation: pick the smallest r <= r_max whose analytical MLP
// meets the target, then expand along the equal-airtime plateau.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lorarelay/analytic_model.hpp"
#include "lorarelay/phy_timing.hpp"

namespace lorarelay {

struct AllocationResult {
    int r_star = 0;
    int r_tilde = 0;
    double mlp_at_r_star = 0.0;
    bool met_target = false;
    std::vector<double> mlp_by_r;  // MLP(0), ..., MLP(r_max)
};

inline AllocationResult allocate(const AnalyticInputs& base, double p_target,
                                 int r_max) {
    if (r_max < 0) throw std::invalid_argument("r_max must be nonnegative");
    if (p_target <= 0.0 || p_target > 1.0)
        throw std::invalid_argument("p_target must be in (0,1]");

    AllocationResult res;
    // MLP is evaluated for every r; duty-cycle feedback into P_i makes
    // monotonicity in r unproven.
    res.mlp_by_r.reserve(static_cast<std::size_t>(r_max) + 1);
    for (int r = 0; r <= r_max; ++r) {
        AnalyticInputs in = base;
        in.r = r;
        res.mlp_by_r.push_back(evaluate_mlp(in).mlp);
    }

    int best = 0;
    for (int r = 0; r <= r_max; ++r) {
        if (res.mlp_by_r[r] <= p_target) {
            res.r_star = r;
            res.met_target = true;
            break;
        }
        if (res.mlp_by_r[r] < res.mlp_by_r[best]) best = r;  // ties -> smallest r
    }
    if (!res.met_target) res.r_star = best;
    res.mlp_at_r_star = res.mlp_by_r[res.r_star];

    // expand to the largest r with identical frame duration (same airtime)
    auto frame_qsym = [&](int r) {
        return frame_quarter_symbols(
            (static_cast<std::int64_t>(r) + 1) * base.traffic.measurement_bytes,
            base.sensor_radio);
    };
    res.r_tilde = res.r_star;
    for (int r = res.r_star + 1; r <= r_max; ++r)
        if (frame_qsym(r) == frame_qsym(res.r_star)) res.r_tilde = r;
    return res;
}

}  // namespace lorarelay
