#pragma once
// LoRa airtime, duty-cycle, redundancy-limit, and relay-capacity arithmetic.
// Symbol counts are kept as exact integers (quarter-symbol units); conversion
// to seconds happens only at the boundary.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lorarelay {

struct RadioConfig {
    int spreading_factor = 10;          // s in 7..12
    double bandwidth_hz = 125e3;        // w
    int n_preamble = 8;                 // n_pr, preamble symbols
    bool header_enabled = true;         // h
    bool low_data_rate_opt = false;     // l
    int code_param = 1;                 // c in 1..4 (1 = rate 4/5)
    double tx_power_dbm = 14.0;
    std::vector<double> channels_hz = {860e6, 864e6, 868e6};

    void validate() const {
        if (spreading_factor < 7 || spreading_factor > 12)
            throw std::invalid_argument("spreading_factor must be in 7..12");
        if (bandwidth_hz <= 0.0)
            throw std::invalid_argument("bandwidth_hz must be positive");
        if (code_param < 1 || code_param > 4)
            throw std::invalid_argument("code_param must be in 1..4");
        if (n_preamble < 0)
            throw std::invalid_argument("n_preamble must be nonnegative");
        if (channels_hz.empty())
            throw std::invalid_argument("channels_hz must be nonempty");
        if (spreading_factor - 2 * (low_data_rate_opt ? 1 : 0) <= 0)
            throw std::invalid_argument("s - 2l must be positive");
    }
};

struct TrafficConfig {
    double measurement_period_s = 30.0;   // t
    int measurement_bytes = 1;            // beta
    int sensor_id_bytes = 1;              // id length in relay frames
    int storage_bytes_max = 10;           // b_max
    double delay_max_s = 180.0;           // d_max
    double duty_cycle_limit = 0.01;

    void validate() const {
        if (measurement_period_s <= 0.0 || measurement_bytes <= 0 ||
            sensor_id_bytes <= 0 || storage_bytes_max <= 0)
            throw std::invalid_argument("traffic parameters must be positive");
        if (delay_max_s < measurement_period_s)
            throw std::invalid_argument("delay_max_s must be >= measurement_period_s");
        if (duty_cycle_limit <= 0.0 || duty_cycle_limit > 1.0)
            throw std::invalid_argument("duty_cycle_limit must be in (0,1]");
    }
};

inline double symbol_duration(const RadioConfig& cfg) {
    return std::ldexp(1.0, cfg.spreading_factor) / cfg.bandwidth_hz;
}

// ceil(a/b) for b > 0, exact for any sign of a
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    return a > 0 ? (a + b - 1) / b : -((-a) / b);
}

// Number of payload symbols: 8 + max{ceil((2b - s - 5h + 11)/(s - 2l)) * (c+4), 0}
inline std::int64_t payload_symbols(std::int64_t payload_bytes, const RadioConfig& cfg) {
    if (payload_bytes < 0)
        throw std::invalid_argument("payload_bytes must be nonnegative");
    const std::int64_t s = cfg.spreading_factor;
    const std::int64_t h = cfg.header_enabled ? 1 : 0;
    const std::int64_t l = cfg.low_data_rate_opt ? 1 : 0;
    const std::int64_t num = 2 * payload_bytes - s - 5 * h + 11;
    const std::int64_t extra = ceil_div(num, s - 2 * l) * (cfg.code_param + 4);
    return 8 + (extra > 0 ? extra : 0);
}

// Frame length in quarter-symbols: preamble is n_pr + 4.25 symbols.
inline std::int64_t frame_quarter_symbols(std::int64_t payload_bytes, const RadioConfig& cfg) {
    return 4 * static_cast<std::int64_t>(cfg.n_preamble) + 17 +
           4 * payload_symbols(payload_bytes, cfg);
}

inline double preamble_duration(const RadioConfig& cfg) {
    return (4 * static_cast<std::int64_t>(cfg.n_preamble) + 17) * symbol_duration(cfg) / 4.0;
}

inline double payload_duration(std::int64_t payload_bytes, const RadioConfig& cfg) {
    return static_cast<double>(payload_symbols(payload_bytes, cfg)) * symbol_duration(cfg);
}

inline double frame_duration(std::int64_t payload_bytes, const RadioConfig& cfg) {
    return static_cast<double>(frame_quarter_symbols(payload_bytes, cfg)) *
           (symbol_duration(cfg) / 4.0);
}

// Duty cycle of a sensor sending r+1 measurements of beta bytes every t seconds.
inline double duty_cycle(int r, const RadioConfig& sensor_cfg, const TrafficConfig& traffic) {
    if (r < 0)
        throw std::invalid_argument("redundancy depth must be nonnegative");
    const std::int64_t bytes =
        (static_cast<std::int64_t>(r) + 1) * traffic.measurement_bytes;
    return frame_duration(bytes, sensor_cfg) / traffic.measurement_period_s;
}

// r_max = min{storage bound, duty-cycle bound, floor(d_max/t)}.
// Storage caps total measurement payload: (r+1)*beta <= b_max.
inline int max_redundancy(const RadioConfig& sensor_cfg, const TrafficConfig& traffic) {
    sensor_cfg.validate();
    traffic.validate();
    if (duty_cycle(0, sensor_cfg, traffic) > traffic.duty_cycle_limit)
        throw std::domain_error("even r=0 violates the duty-cycle limit");
    const int r_storage =
        traffic.storage_bytes_max / traffic.measurement_bytes - 1;
    if (r_storage < 0)
        throw std::domain_error("storage cannot hold a single measurement");
    const int r_delay = static_cast<int>(
        std::floor(traffic.delay_max_s / traffic.measurement_period_s));
    int cap = r_storage < r_delay ? r_storage : r_delay;
    int r_hat = 0;
    while (r_hat < cap &&
           duty_cycle(r_hat + 1, sensor_cfg, traffic) <= traffic.duty_cycle_limit)
        ++r_hat;
    return r_hat < cap ? r_hat : cap;
}

// v = max{n : t_fr(n*(beta+l_id), s_rel) <= t_tx}. Frame duration is
// nondecreasing in payload bytes, so binary search applies.
inline int relay_capacity(const RadioConfig& relay_cfg, const TrafficConfig& traffic,
                          double t_tx_s) {
    relay_cfg.validate();
    const std::int64_t entry = traffic.measurement_bytes + traffic.sensor_id_bytes;
    // exact comparison: qsym * 2^s / (4w) <= t_tx  <=>  qsym * 2^s <= t_tx * 4w
    const double budget = t_tx_s * 4.0 * relay_cfg.bandwidth_hz;
    const double scale = std::ldexp(1.0, relay_cfg.spreading_factor);
    auto fits = [&](std::int64_t n) {
        return static_cast<double>(frame_quarter_symbols(n * entry, relay_cfg)) * scale <=
               budget;
    };
    if (!fits(1))
        throw std::domain_error("relay capacity is zero: one entry does not fit in t_tx");
    std::int64_t lo = 1, hi = 2;
    while (fits(hi)) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (fits(mid) ? lo : hi) = mid;
    }
    return static_cast<int>(lo);
}

}  // namespace lorarelay
