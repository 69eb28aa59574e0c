#pragma once
// Experiment driver behind the CLI: sweeps over (n, relays, r), simulation
// batches with loss-count stopping, redundancy allocation, and the
// Monte-Carlo-vs-analysis validation suite. Emits versioned CSV.

#include <cstdio>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "lorarelay/config.hpp"
#include "lorarelay/redundancy_allocator.hpp"

namespace lorarelay {

inline constexpr int kCsvSchemaVersion = 1;

struct SweepSpec {
    std::vector<int> n_values;      // empty -> base value
    std::vector<int> omega_values;  // empty -> base value
    std::vector<int> r_values;      // empty -> base value
    std::uint64_t base_seed = 1;
    int runs = 1;          // minimum runs per point
    int max_runs = 200;    // hard cap
    int min_losses = 100;  // keep seeding runs until this many losses
};

struct SweepPoint {
    int n = 0;
    int omega = 0;
    int r = 0;
};

inline std::vector<SweepPoint> expand_sweep(const Config& base, const SweepSpec& spec) {
    auto pick = [](const std::vector<int>& v, int fallback) {
        return v.empty() ? std::vector<int>{fallback} : v;
    };
    const auto ns = pick(spec.n_values, base.scenario.n_sensors);
    const auto omegas = pick(spec.omega_values, base.scenario.n_relays);
    const auto rs = pick(spec.r_values, base.scenario.redundancy);
    std::vector<SweepPoint> points;
    for (int n : ns)
        for (int omega : omegas)
            for (int r : rs) points.push_back({n, omega, r});
    return points;
}

inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// analyze: one row per sweep point with the full MLP breakdown.

inline void cmd_analyze(const Config& base, const SweepSpec& spec, std::ostream& out) {
    const std::string digest = config_digest(base);
    out << "schema_version,kind,n,omega,r,seed,config_digest,"
           "p_i,p_f,p_dir,p_rw,p_s_r,p_drop,p_r_g,p_ri,mlp\n";
    for (const auto& pt : expand_sweep(base, spec)) {
        AnalyticInputs in = make_analytic_inputs(base);
        in.n = pt.n;
        in.omega = pt.omega;
        in.r = pt.r;
        const MlpBreakdown b = evaluate_mlp(in);
        out << kCsvSchemaVersion << ",analysis," << pt.n << ',' << pt.omega << ','
            << pt.r << ",0," << digest << ',' << fmt(b.p_i) << ',' << fmt(b.p_f) << ','
            << fmt(b.p_dir) << ',' << fmt(b.p_rw) << ',' << fmt(b.p_s_r) << ','
            << fmt(b.p_drop) << ',' << fmt(b.p_r_g) << ',' << fmt(b.p_ri) << ','
            << fmt(b.mlp) << '\n';
    }
}

// ---------------------------------------------------------------------------
// simulate: per-run rows plus an aggregate row per sweep point. Seeds are
// consumed in order until min_losses losses are observed or max_runs is hit.

struct SimAggregate {
    int n = 0, omega = 0, r = 0;
    int runs = 0;
    std::uint64_t losses = 0;
    double mlr_mean = 0.0;
    double mlr_stderr = 0.0;
    double e_m_mean = 0.0;
    bool low_confidence = false;
    std::vector<MetricsReport> reports;
};

inline SimAggregate simulate_point(const Config& base, const SweepPoint& pt,
                                   const SweepSpec& spec) {
    SimAggregate agg;
    agg.n = pt.n;
    agg.omega = pt.omega;
    agg.r = pt.r;
    while (agg.runs < spec.max_runs &&
           (agg.runs < spec.runs || agg.losses < static_cast<std::uint64_t>(spec.min_losses))) {
        Config cfg = base;
        cfg.scenario.n_sensors = pt.n;
        cfg.scenario.n_relays = pt.omega;
        cfg.scenario.redundancy = pt.r;
        cfg.scenario.seed = spec.base_seed + static_cast<std::uint64_t>(agg.runs);
        MetricsReport rep = run(build_scenario(cfg.scenario));
        rep.config_digest = config_digest(cfg);
        agg.losses += rep.generated - rep.delivered;
        agg.reports.push_back(std::move(rep));
        ++agg.runs;
    }
    double sum = 0.0, sum_e = 0.0;
    for (const auto& r : agg.reports) {
        sum += r.mlr;
        sum_e += r.e_m_joules;
    }
    agg.mlr_mean = sum / agg.runs;
    agg.e_m_mean = sum_e / agg.runs;
    double var = 0.0;
    for (const auto& r : agg.reports) {
        const double d = r.mlr - agg.mlr_mean;
        var += d * d;
    }
    if (agg.runs > 1) var /= static_cast<double>(agg.runs - 1);
    agg.mlr_stderr = agg.runs > 1 ? std::sqrt(var / agg.runs) : 0.0;
    agg.low_confidence = agg.losses < static_cast<std::uint64_t>(spec.min_losses);
    return agg;
}

inline void cmd_simulate(const Config& base, const SweepSpec& spec, std::ostream& out) {
    out << "schema_version,kind,n,omega,r,seed,runs,config_digest,"
           "generated,delivered,losses,mlr,mlr_stderr,e_m_j,low_confidence\n";
    for (const auto& pt : expand_sweep(base, spec)) {
        const SimAggregate agg = simulate_point(base, pt, spec);
        for (const auto& rep : agg.reports)
            out << kCsvSchemaVersion << ",run," << pt.n << ',' << pt.omega << ','
                << pt.r << ',' << rep.seed << ",1," << rep.config_digest << ','
                << rep.generated << ',' << rep.delivered << ','
                << (rep.generated - rep.delivered) << ',' << fmt(rep.mlr) << ",0,"
                << fmt(rep.e_m_joules) << ",0\n";
        out << kCsvSchemaVersion << ",aggregate," << pt.n << ',' << pt.omega << ','
            << pt.r << ',' << spec.base_seed << ',' << agg.runs << ','
            << (agg.reports.empty() ? std::string("-") : agg.reports.front().config_digest)
            << ",,," << agg.losses << ',' << fmt(agg.mlr_mean) << ','
            << fmt(agg.mlr_stderr) << ',' << fmt(agg.e_m_mean) << ','
            << (agg.low_confidence ? 1 : 0) << '\n';
    }
}

// ---------------------------------------------------------------------------
// allocate: Algorithm-style redundancy choice per sweep point.

inline void cmd_allocate(const Config& base, const SweepSpec& spec, double p_target,
                         std::ostream& out) {
    const std::string digest = config_digest(base);
    out << "schema_version,kind,n,omega,p_target,r_max,r_star,r_tilde,"
           "mlp_at_r_star,met_target,config_digest\n";
    const int r_max = max_redundancy(base.scenario.sensor_radio, base.scenario.traffic);
    for (const auto& pt : expand_sweep(base, spec)) {
        AnalyticInputs in = make_analytic_inputs(base);
        in.n = pt.n;
        in.omega = pt.omega;
        const AllocationResult res = allocate(in, p_target, r_max);
        out << kCsvSchemaVersion << ",allocation," << pt.n << ',' << pt.omega << ','
            << fmt(p_target) << ',' << r_max << ',' << res.r_star << ',' << res.r_tilde
            << ',' << fmt(res.mlp_at_r_star) << ',' << (res.met_target ? 1 : 0) << ','
            << digest << '\n';
    }
}

// ---------------------------------------------------------------------------
// validate: Monte-Carlo oracles against the closed-form/numeric components.

struct ValidationCheck {
    std::string name;
    double analytic = 0.0;
    double empirical = 0.0;
    double z_score = 0.0;
};

// Fading-outage law: empirical fraction of draws with gamma A u^-alpha < psi.
inline ValidationCheck validate_fading_outage(const Config& cfg, std::uint64_t samples,
                                              std::uint64_t seed) {
    const AnalyticInputs in = make_analytic_inputs(cfg);
    const double alpha = in.propagation.pathloss_exponent;
    const double gamma = in.propagation.link_constant(in.sensor_radio.tx_power_dbm);
    const double psi = in.propagation.sensitivity_mw(in.sensor_radio.spreading_factor);
    const double p = outage_fading(in.dist_sensor_gw, gamma, psi, alpha, in.fading);

    auto rng = make_stream(seed, "validate-fading");
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const double u = in.dist_sensor_gw.sample(rng);
        const double a = sample_fading(in.fading.m, rng);
        if (gamma * a * std::pow(u, -alpha) < psi) ++hits;
    }
    const double phat = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) /
                                static_cast<double>(samples));
    return {"fading_outage", p, phat, (phat - p) / se};
}

// Receive-window geometry: uniform frame start against the rx/tx cycle.
inline ValidationCheck validate_receive_window(const Config& cfg, std::uint64_t samples,
                                               std::uint64_t seed) {
    const AnalyticInputs in = make_analytic_inputs(cfg);
    const double t_f = in.sensor_frame_duration();
    const double p = p_receive_window(in.t_rx_s, in.t_tx_s, t_f);
    auto rng = make_stream(seed, "validate-window");
    std::uniform_real_distribution<double> d(0.0, in.t_rx_s + in.t_tx_s);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i)
        if (d(rng) <= in.t_rx_s - t_f) ++hits;
    const double phat = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return {"receive_window", p, phat, (phat - p) / se};
}

// Interference outage: Poisson-thinned interferer population with a capture
// test against the strongest interferer. The override changes only the
// Monte-Carlo side, to prove the check can detect a model mismatch.
inline ValidationCheck validate_interference_outage(const Config& cfg,
                                                    std::uint64_t samples,
                                                    std::uint64_t seed,
                                                    double capture_factor_override = 0.0) {
    AnalyticInputs in = make_analytic_inputs(cfg);
    const double alpha = in.propagation.pathloss_exponent;
    const double p = outage_interference(in, LinkKind::SensorToGateway);
    if (capture_factor_override > 0.0) in.capture_factor = capture_factor_override;

    const double rate = duty_cycle(in.r, in.sensor_radio, in.traffic) *
                        static_cast<double>(in.n - 1) / in.n_channels;
    auto rng = make_stream(seed, "validate-interference");
    std::poisson_distribution<int> n_interferers(rate);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const double w = in.dist_sensor_gw.sample(rng);
        const double a = sample_fading(in.fading.m, rng);
        const double desired = in.capture_factor * a * std::pow(w, -alpha);
        const int k = n_interferers(rng);
        bool outage = false;
        for (int m = 0; m < k && !outage; ++m) {
            const double u = in.dist_sensor_gw.sample(rng);
            const double ai = sample_fading(in.fading.m, rng);
            outage = ai * std::pow(u, -alpha) > desired;
        }
        if (outage) ++hits;
    }
    const double phat = static_cast<double>(hits) / static_cast<double>(samples);
    const double se = std::sqrt(std::max(p * (1.0 - p), 1e-300) /
                                static_cast<double>(samples));
    return {"interference_outage", p, phat, (phat - p) / se};
}

// Buffer-drop chain: window counts, binomial thinning, random discard.
inline ValidationCheck validate_drop(const Config& cfg, std::uint64_t samples,
                                     std::uint64_t seed) {
    const AnalyticInputs in = make_analytic_inputs(cfg);
    const int xi = in.xi();
    const int v = relay_capacity(in.relay_radio, in.traffic, in.t_tx_s);
    const double t_f = in.sensor_frame_duration();
    const double p_complete = 1.0 - t_f / in.traffic.measurement_period_s;
    const double p_f_sr = outage_fading(
        in.dist_sensor_relay, in.propagation.link_constant(in.sensor_radio.tx_power_dbm),
        in.propagation.sensitivity_mw(in.sensor_radio.spreading_factor),
        in.propagation.pathloss_exponent, in.fading);
    const double p_i_sr = outage_interference(in, LinkKind::SensorToRelay);
    const double theta = single_tx_failure(p_i_sr, p_f_sr);
    const double p = p_drop_exact(in.n, xi, v, theta, p_complete);

    auto rng = make_stream(seed, "validate-drop");
    std::binomial_distribution<int> eta(in.n, p_complete);
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const int y = in.n * (xi - 1) + eta(rng);
        std::binomial_distribution<int> recv(y, 1.0 - theta);
        const int z = recv(rng);
        const double frac = z > v ? static_cast<double>(z - v) / z : 0.0;
        sum += frac;
        sumsq += frac * frac;
    }
    const double mean = sum / static_cast<double>(samples);
    const double var =
        (sumsq - sum * mean) / static_cast<double>(samples - 1);
    const double se = std::sqrt(std::max(var, 1e-300) / static_cast<double>(samples));
    return {"buffer_drop", p, mean, (mean - p) / se};
}

inline std::vector<ValidationCheck> cmd_validate(const Config& cfg,
                                                 const std::set<std::string>& selection,
                                                 std::uint64_t samples,
                                                 std::uint64_t seed) {
    if (selection.empty())
        throw std::invalid_argument("empty validation suite selection");
    std::vector<ValidationCheck> out;
    for (const auto& name : selection) {
        if (name == "fading")
            out.push_back(validate_fading_outage(cfg, samples, seed));
        else if (name == "window")
            out.push_back(validate_receive_window(cfg, samples, seed));
        else if (name == "interference")
            out.push_back(validate_interference_outage(cfg, samples, seed));
        else if (name == "drop")
            out.push_back(validate_drop(cfg, samples, seed));
        else
            throw std::invalid_argument("unknown validation check: " + name);
    }
    return out;
}

}  // namespace lorarelay
