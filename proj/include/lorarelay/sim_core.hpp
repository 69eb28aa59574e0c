#pragma once
// Discrete-event simulation of the relayed LoRa sensor network: periodic
// unsynchronized Class-A sensors with repetition redundancy, Class-C relays
// alternating receive/transmit windows with capacity-limited forwarding, a
// gateway with capture-effect reception, and metric accounting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "lorarelay/channel_model.hpp"
#include "lorarelay/phy_timing.hpp"
#include "lorarelay/rng.hpp"

namespace lorarelay {

struct Box {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
};

struct Point {
    double x = 0.0, y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline RadioConfig default_sensor_radio() {
    RadioConfig cfg;
    cfg.spreading_factor = 10;
    return cfg;
}

inline RadioConfig default_relay_radio() {
    RadioConfig cfg;
    cfg.spreading_factor = 7;
    return cfg;
}

struct ScenarioConfig {
    int n_sensors = 120;
    int n_relays = 0;
    Box sensor_box{30.0, 42.0, 30.0, 42.0};
    Box relay_box{10.0, 20.0, 10.0, 20.0};
    double relay_min_separation_m = 1.0;
    RadioConfig sensor_radio = default_sensor_radio();
    RadioConfig relay_radio = default_relay_radio();
    TrafficConfig traffic;
    PropagationParams propagation;
    double t_rx_s = 30.0;
    double t_tx_s = 0.3;
    int redundancy = 3;
    double run_length_s = 3.0 * 3600.0;
    std::uint64_t seed = 1;

    void validate() const {
        if (n_sensors < 1 || n_relays < 0)
            throw std::invalid_argument("need >= 1 sensor and >= 0 relays");
        sensor_radio.validate();
        relay_radio.validate();
        traffic.validate();
        propagation.validate();
        if (t_rx_s <= 0.0 || t_tx_s <= 0.0 || run_length_s <= 0.0)
            throw std::invalid_argument("windows and run length must be positive");
        if (n_relays > 0 && t_tx_s / (t_rx_s + t_tx_s) > traffic.duty_cycle_limit + 1e-12)
            throw std::invalid_argument("relay tx window violates the duty-cycle limit");
        if (redundancy < 0)
            throw std::invalid_argument("redundancy must be nonnegative");
    }
};

struct Scenario {
    ScenarioConfig config;
    std::vector<Point> sensor_pos;
    std::vector<Point> relay_pos;
    std::vector<double> sensor_phase;   // uniform in [0, t)
    std::vector<double> relay_offset;   // relay i's cycle shifted by i * t_tx
    int relay_capacity_v = 0;
};

inline Scenario build_scenario(const ScenarioConfig& config) {
    config.validate();
    Scenario sc;
    sc.config = config;

    auto place_rng = make_stream(config.seed, "placement");
    auto uniform_in = [&](const Box& b) {
        std::uniform_real_distribution<double> dx(b.x_lo, b.x_hi);
        std::uniform_real_distribution<double> dy(b.y_lo, b.y_hi);
        Point p;
        p.x = dx(place_rng);
        p.y = dy(place_rng);
        return p;
    };
    sc.sensor_pos.reserve(config.n_sensors);
    for (int i = 0; i < config.n_sensors; ++i)
        sc.sensor_pos.push_back(uniform_in(config.sensor_box));

    // relays: rejection sampling for pairwise separation
    for (int j = 0; j < config.n_relays; ++j) {
        bool placed = false;
        for (int attempt = 0; attempt < 100000; ++attempt) {
            const Point p = uniform_in(config.relay_box);
            const bool ok = std::all_of(
                sc.relay_pos.begin(), sc.relay_pos.end(), [&](const Point& q) {
                    return distance(p, q) >= config.relay_min_separation_m;
                });
            if (ok) {
                sc.relay_pos.push_back(p);
                placed = true;
                break;
            }
        }
        if (!placed)
            throw std::runtime_error("relay placement rejection sampling failed");
    }

    sc.sensor_phase.resize(config.n_sensors);
    for (int i = 0; i < config.n_sensors; ++i) {
        auto rng = make_stream(config.seed, "phase", static_cast<std::uint64_t>(i));
        std::uniform_real_distribution<double> d(0.0, config.traffic.measurement_period_s);
        sc.sensor_phase[i] = d(rng);
    }

    sc.relay_offset.resize(config.n_relays);
    for (int j = 0; j < config.n_relays; ++j)
        sc.relay_offset[j] = static_cast<double>(j) * config.t_tx_s;
    if (config.n_relays > 0 &&
        static_cast<double>(config.n_relays) * config.t_tx_s > config.t_rx_s + config.t_tx_s)
        throw std::invalid_argument("too many relays for disjoint transmit slots");

    if (config.n_relays > 0)
        sc.relay_capacity_v =
            relay_capacity(config.relay_radio, config.traffic, config.t_tx_s);
    return sc;
}

struct RelayTally {
    std::uint64_t frames_in_rx_window = 0;  // fully contained sensor frames
    std::uint64_t frames_overheard = 0;     // contained and successfully received
    std::uint64_t measurements_stored = 0;
    std::uint64_t measurements_dropped = 0;
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_delivered = 0;     // relay frames received at the gateway
};

struct MetricsReport {
    double mlr = 0.0;
    double e_m_joules = 0.0;
    bool e_m_infinite = false;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t delivered_direct = 0;  // via the direct path (possibly also relayed)
    std::uint64_t delivered_relay = 0;
    std::uint64_t direct_failures = 0;   // no direct-path delivery within d_max
    std::uint64_t dropped_at_relay = 0;
    std::uint64_t sensor_frames = 0;
    std::vector<RelayTally> relay_tallies;
    std::uint64_t seed = 0;
    std::string config_digest;
};

namespace detail {

struct SimFrame {
    int sender = 0;                 // sensor index, or relay index for relay frames
    bool from_relay = false;
    double start_s = 0.0;
    double end_s = 0.0;
    int channel = 0;
    int spreading_factor = 7;
    std::vector<std::pair<int, std::int64_t>> contents;  // (sensor, seq)
};

// Sweep-based capture resolution over frames sorted by start time.
inline std::vector<bool> resolve_at_receiver(const std::vector<SimFrame>& frames,
                                             const std::vector<double>& power_mw,
                                             const PropagationParams& params) {
    const std::size_t nf = frames.size();
    std::vector<std::size_t> order(nf);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return frames[a].start_s < frames[b].start_s;
    });
    double max_dur = 0.0;
    for (const auto& f : frames) max_dur = std::max(max_dur, f.end_s - f.start_s);
    const double capture = params.capture_threshold_linear();

    std::vector<bool> delivered(nf, false);
    std::size_t lo = 0;
    for (std::size_t oi = 0; oi < nf; ++oi) {
        const std::size_t i = order[oi];
        const auto& f = frames[i];
        while (lo < nf && frames[order[lo]].start_s < f.start_s - max_dur) ++lo;
        if (power_mw[i] < params.sensitivity_mw(f.spreading_factor)) continue;
        double strongest = 0.0;
        for (std::size_t oj = lo; oj < nf; ++oj) {
            const std::size_t j = order[oj];
            if (frames[j].start_s >= f.end_s) break;
            if (j == i) continue;
            const auto& g = frames[j];
            if (g.channel != f.channel || g.spreading_factor != f.spreading_factor)
                continue;
            if (g.start_s < f.end_s && f.start_s < g.end_s)
                strongest = std::max(strongest, power_mw[j]);
        }
        delivered[i] = power_mw[i] >= capture * strongest;
    }
    return delivered;
}

// Cumulative airtime within any sliding hour must respect the duty cycle.
inline void check_duty_cycle(std::vector<std::pair<double, double>>& intervals,
                             double limit) {
    std::sort(intervals.begin(), intervals.end());
    const double window = 3600.0;
    const double budget = limit * window + 1e-9;
    std::size_t hi = 0;
    double sum = 0.0;
    for (std::size_t lo = 0; lo < intervals.size(); ++lo) {
        if (lo > 0) sum -= intervals[lo - 1].second - intervals[lo - 1].first;
        while (hi < intervals.size() &&
               intervals[hi].first < intervals[lo].first + window) {
            sum += intervals[hi].second - intervals[hi].first;
            ++hi;
        }
        if (sum > budget)
            throw std::logic_error("duty-cycle limit violated within a sliding hour");
    }
}

}  // namespace detail

inline MetricsReport run(const Scenario& sc) {
    const ScenarioConfig& cfg = sc.config;
    cfg.validate();
    const double t = cfg.traffic.measurement_period_s;
    const double t_f = frame_duration(
        (static_cast<std::int64_t>(cfg.redundancy) + 1) * cfg.traffic.measurement_bytes,
        cfg.sensor_radio);
    const double cycle = cfg.t_rx_s + cfg.t_tx_s;
    const int n_channels = static_cast<int>(cfg.sensor_radio.channels_hz.size());

    // --- sensor frames ---------------------------------------------------
    std::vector<detail::SimFrame> sframes;
    std::vector<std::int64_t> seq_count(cfg.n_sensors, 0);
    for (int i = 0; i < cfg.n_sensors; ++i) {
        auto chan_rng = make_stream(cfg.seed, "channel", static_cast<std::uint64_t>(i));
        std::uniform_int_distribution<int> pick(0, n_channels - 1);
        for (std::int64_t k = 0;; ++k) {
            const double start = sc.sensor_phase[i] + static_cast<double>(k) * t;
            if (start + t_f > cfg.run_length_s) break;
            detail::SimFrame f;
            f.sender = i;
            f.start_s = start;
            f.end_s = start + t_f;
            f.channel = pick(chan_rng);
            f.spreading_factor = cfg.sensor_radio.spreading_factor;
            for (std::int64_t q = std::max<std::int64_t>(0, k - cfg.redundancy); q <= k; ++q)
                f.contents.emplace_back(i, q);
            sframes.push_back(std::move(f));
            seq_count[i] = k + 1;
        }
    }

    // fading gains per (sensor, receiver) stream, sequential in frame order;
    // receiver ids: 0 = gateway, 1+j = relay j
    auto sensor_powers_at = [&](int receiver, const Point& rx_pos) {
        std::vector<double> power(sframes.size());
        std::vector<std::mt19937_64> streams;
        streams.reserve(cfg.n_sensors);
        for (int i = 0; i < cfg.n_sensors; ++i)
            streams.push_back(make_stream(cfg.seed, "fading-sensor",
                                          static_cast<std::uint64_t>(i),
                                          static_cast<std::uint64_t>(receiver)));
        for (std::size_t fi = 0; fi < sframes.size(); ++fi) {
            const int i = sframes[fi].sender;
            LinkDraw link;
            link.distance_m = distance(sc.sensor_pos[i], rx_pos);
            link.fading_gain = sample_fading(cfg.propagation.nakagami_m, streams[i]);
            power[fi] = received_power_mw(cfg.sensor_radio.tx_power_dbm,
                                          cfg.propagation, link);
        }
        return power;
    };

    MetricsReport rep;
    rep.seed = cfg.seed;
    rep.sensor_frames = sframes.size();
    rep.relay_tallies.resize(cfg.n_relays);

    const Point gw{0.0, 0.0};

    // --- relay overhearing and forwarding --------------------------------
    std::vector<detail::SimFrame> rframes;
    for (int j = 0; j < cfg.n_relays; ++j) {
        RelayTally& tally = rep.relay_tallies[j];
        const auto power = sensor_powers_at(1 + j, sc.relay_pos[j]);
        const auto ok = detail::resolve_at_receiver(sframes, power, cfg.propagation);
        const double offset = sc.relay_offset[j];

        // buffer per receive-window cycle: unique (sensor, seq)
        std::map<std::int64_t, std::vector<std::pair<int, std::int64_t>>> buffers;
        for (std::size_t fi = 0; fi < sframes.size(); ++fi) {
            const auto& f = sframes[fi];
            const auto c = static_cast<std::int64_t>(std::floor((f.start_s - offset) / cycle));
            const double win_start = offset + static_cast<double>(c) * cycle;
            if (f.start_s < win_start || f.end_s > win_start + cfg.t_rx_s)
                continue;  // must lie entirely within the receive window
            ++tally.frames_in_rx_window;
            if (!ok[fi]) continue;
            ++tally.frames_overheard;
            // only the current measurement of an overheard frame is stored
            const auto current = f.contents.back();
            auto& buf = buffers[c];
            if (std::find(buf.begin(), buf.end(), current) == buf.end())
                buf.push_back(current);
        }

        auto discard_rng = make_stream(cfg.seed, "discard", static_cast<std::uint64_t>(j));
        auto chan_rng = make_stream(cfg.seed, "relay-channel", static_cast<std::uint64_t>(j));
        const int n_relay_channels = static_cast<int>(cfg.relay_radio.channels_hz.size());
        std::uniform_int_distribution<int> pick(0, n_relay_channels - 1);
        for (auto& [c, buf] : buffers) {
            const double tx_start = offset + static_cast<double>(c) * cycle + cfg.t_rx_s;
            tally.measurements_stored += buf.size();
            if (static_cast<int>(buf.size()) > sc.relay_capacity_v) {
                std::shuffle(buf.begin(), buf.end(), discard_rng);
                tally.measurements_dropped += buf.size() - sc.relay_capacity_v;
                buf.resize(static_cast<std::size_t>(sc.relay_capacity_v));
            }
            if (buf.empty()) continue;
            detail::SimFrame f;
            f.sender = j;
            f.from_relay = true;
            f.start_s = tx_start;
            f.end_s = tx_start + frame_duration(
                                     static_cast<std::int64_t>(buf.size()) *
                                         (cfg.traffic.measurement_bytes +
                                          cfg.traffic.sensor_id_bytes),
                                     cfg.relay_radio);
            if (f.end_s > tx_start + cfg.t_tx_s + 1e-12)
                throw std::logic_error("relay frame exceeds its transmit window");
            if (f.end_s > cfg.run_length_s) continue;
            f.channel = pick(chan_rng);
            f.spreading_factor = cfg.relay_radio.spreading_factor;
            f.contents = buf;
            ++tally.frames_sent;
            rframes.push_back(std::move(f));
        }
    }
    rep.dropped_at_relay = std::accumulate(
        rep.relay_tallies.begin(), rep.relay_tallies.end(), std::uint64_t{0},
        [](std::uint64_t s, const RelayTally& rt) { return s + rt.measurements_dropped; });

    // relay transmissions must sit in disjoint slots
    {
        std::vector<std::pair<double, double>> spans;
        for (const auto& f : rframes) spans.emplace_back(f.start_s, f.end_s);
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 1; i < spans.size(); ++i)
            if (spans[i].first < spans[i - 1].second - 1e-12)
                throw std::logic_error("relay transmit slots overlap");
    }

    // --- gateway reception (sensor + relay frames in one pass) -----------
    std::vector<detail::SimFrame> gw_frames = sframes;
    gw_frames.insert(gw_frames.end(), rframes.begin(), rframes.end());
    std::vector<double> gw_power = sensor_powers_at(0, gw);
    {
        std::vector<std::mt19937_64> streams;
        for (int j = 0; j < cfg.n_relays; ++j)
            streams.push_back(make_stream(cfg.seed, "fading-relay",
                                          static_cast<std::uint64_t>(j)));
        for (const auto& f : rframes) {
            LinkDraw link;
            link.distance_m = distance(sc.relay_pos[f.sender], gw);
            link.fading_gain =
                sample_fading(cfg.propagation.nakagami_m, streams[f.sender]);
            gw_power.push_back(received_power_mw(cfg.relay_radio.tx_power_dbm,
                                                 cfg.propagation, link));
        }
    }
    const auto gw_ok = detail::resolve_at_receiver(gw_frames, gw_power, cfg.propagation);

    // --- delivery accounting ---------------------------------------------
    std::vector<std::vector<std::uint8_t>> direct_hit(cfg.n_sensors),
        relay_hit(cfg.n_sensors);
    for (int i = 0; i < cfg.n_sensors; ++i) {
        direct_hit[i].assign(static_cast<std::size_t>(seq_count[i]), 0);
        relay_hit[i].assign(static_cast<std::size_t>(seq_count[i]), 0);
    }
    for (std::size_t fi = 0; fi < gw_frames.size(); ++fi) {
        if (!gw_ok[fi]) continue;
        const auto& f = gw_frames[fi];
        for (const auto& [i, seq] : f.contents) {
            const double gen = sc.sensor_phase[i] + static_cast<double>(seq) * t;
            if (f.end_s - gen > cfg.traffic.delay_max_s) continue;
            (f.from_relay ? relay_hit : direct_hit)[i][static_cast<std::size_t>(seq)] = 1;
        }
        if (f.from_relay && fi >= sframes.size())
            ++rep.relay_tallies[f.sender].frames_delivered;
    }

    // --- invariants -------------------------------------------------------
    {
        for (int i = 0; i < cfg.n_sensors; ++i) {
            std::vector<std::pair<double, double>> iv;
            for (const auto& f : sframes)
                if (f.sender == i) iv.emplace_back(f.start_s, f.end_s);
            detail::check_duty_cycle(iv, cfg.traffic.duty_cycle_limit);
        }
        for (int j = 0; j < cfg.n_relays; ++j) {
            std::vector<std::pair<double, double>> iv;
            for (const auto& f : rframes)
                if (f.sender == j) iv.emplace_back(f.start_s, f.end_s);
            detail::check_duty_cycle(iv, cfg.traffic.duty_cycle_limit);
        }
    }

    // --- metrics over the steady-state window ------------------------------
    const double warmup = cfg.traffic.delay_max_s + cycle;
    const double horizon = cfg.run_length_s - cfg.traffic.delay_max_s;
    for (int i = 0; i < cfg.n_sensors; ++i) {
        for (std::int64_t k = 0; k < seq_count[i]; ++k) {
            const double gen = sc.sensor_phase[i] + static_cast<double>(k) * t;
            if (gen < warmup || gen > horizon) continue;
            ++rep.generated;
            const bool dd = direct_hit[i][static_cast<std::size_t>(k)] != 0;
            const bool dr = relay_hit[i][static_cast<std::size_t>(k)] != 0;
            if (dd || dr) ++rep.delivered;
            if (dd) ++rep.delivered_direct;
            if (dr) ++rep.delivered_relay;
            if (!dd) ++rep.direct_failures;
        }
    }
    if (rep.generated == 0) throw std::runtime_error("run too short: no measurements in window");
    rep.mlr = 1.0 - static_cast<double>(rep.delivered) / static_cast<double>(rep.generated);
    const double frame_energy_j =
        dbm_to_mw(cfg.sensor_radio.tx_power_dbm) * 1e-3 * t_f;
    if (rep.delivered == 0) {
        rep.e_m_infinite = true;
        rep.e_m_joules = std::numeric_limits<double>::infinity();
    } else {
        rep.e_m_joules = frame_energy_j / (1.0 - rep.mlr);
    }
    return rep;
}

// Empirical per-component estimates aligned with the analytic breakdown.
struct ComparisonRow {
    std::string name;
    double empirical = 0.0;
    double analytic = 0.0;
    double std_error = 0.0;
};

inline std::vector<ComparisonRow> tally_vs_analysis(const MetricsReport& rep,
                                                    double p_dir, double p_rw,
                                                    double p_s_r, double p_drop,
                                                    double p_r_g) {
    auto rate = [](std::uint64_t hits, std::uint64_t trials) {
        return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
    };
    auto se = [](double q, std::uint64_t trials) {
        return trials == 0 ? 0.0 : std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
    };
    std::vector<ComparisonRow> rows;
    {
        const double q = rate(rep.direct_failures, rep.generated);
        rows.push_back({"p_dir", q, p_dir, se(q, rep.generated)});
    }
    for (std::size_t j = 0; j < rep.relay_tallies.size(); ++j) {
        const auto& rt = rep.relay_tallies[j];
        const std::string suffix = "[r" + std::to_string(j) + "]";
        const double q_rw = rate(rt.frames_in_rx_window, rep.sensor_frames);
        rows.push_back({"p_rw" + suffix, q_rw, p_rw, se(q_rw, rep.sensor_frames)});
        const double q_sr = 1.0 - rate(rt.frames_overheard, rt.frames_in_rx_window);
        rows.push_back({"p_s_r" + suffix, q_sr, p_s_r, se(q_sr, rt.frames_in_rx_window)});
        const double q_drop = rate(rt.measurements_dropped, rt.measurements_stored);
        rows.push_back(
            {"p_drop" + suffix, q_drop, p_drop, se(q_drop, rt.measurements_stored)});
        const double q_rg = 1.0 - rate(rt.frames_delivered, rt.frames_sent);
        rows.push_back({"p_r_g" + suffix, q_rg, p_r_g, se(q_rg, rt.frames_sent)});
    }
    return rows;
}

}  // namespace lorarelay
