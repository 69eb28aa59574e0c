// Command-line front end: analytical sweeps, simulation batches, redundancy
// allocation, and Monte-Carlo validation. JSON config in, CSV out.
// Exit codes: 0 success, 1 usage/config error, 2 validation failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lorarelay/experiment.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

void apply_sweeps(const std::vector<std::string>& sweeps, lorarelay::SweepSpec& spec) {
    for (const auto& s : sweeps) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--sweep expects key=v1,v2,... got: " + s);
        const std::string key = s.substr(0, eq);
        const auto values = parse_int_list(s.substr(eq + 1));
        if (values.empty())
            throw CLI::ValidationError("--sweep " + key + " has no values");
        if (key == "n")
            spec.n_values = values;
        else if (key == "relays")
            spec.omega_values = values;
        else if (key == "r")
            spec.r_values = values;
        else
            throw CLI::ValidationError("unknown sweep axis: " + key +
                                       " (expected n, relays, or r)");
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Duty-cycle-limited LoRa sensor network: relayed-delivery "
                 "simulator and loss analysis"};
    app.require_subcommand(1);

    std::string config_path = "paper_setup";
    std::string out_path;
    std::vector<std::string> sweeps;
    lorarelay::SweepSpec spec;
    double p_target = 0.01;
    std::string checks_csv = "fading,window,interference,drop";
    std::uint64_t samples = 1000000;

    auto add_common = [&](CLI::App* cmd, bool needs_out) {
        cmd->add_option("--config", config_path,
                        "JSON config file or the built-in 'paper_setup' profile");
        cmd->add_option("--sweep", sweeps,
                        "sweep axis, e.g. --sweep n=20,40,60 --sweep relays=0,1,2");
        cmd->add_option("--seed", spec.base_seed, "base seed");
        if (needs_out)
            cmd->add_option("--out", out_path, "output CSV path")->required();
    };

    auto* analyze = app.add_subcommand("analyze", "evaluate the loss-probability model");
    add_common(analyze, true);

    auto* simulate = app.add_subcommand("simulate", "run event-driven simulations");
    add_common(simulate, true);
    simulate->add_option("--runs", spec.runs, "minimum runs per sweep point");
    simulate->add_option("--max-runs", spec.max_runs, "hard cap on runs per point");
    simulate->add_option("--min-losses", spec.min_losses,
                         "keep seeding runs until this many losses are observed");

    auto* allocate = app.add_subcommand("allocate", "choose redundancy from the model");
    add_common(allocate, true);
    allocate->add_option("--p-target", p_target, "target loss probability")->required();

    auto* validate = app.add_subcommand("validate", "Monte-Carlo vs analysis checks");
    add_common(validate, false);
    validate->add_option("--checks", checks_csv,
                         "comma list from: fading,window,interference,drop");
    validate->add_option("--samples", samples, "Monte-Carlo sample count per check");

    CLI11_PARSE(app, argc, argv);

    try {
        const lorarelay::Config cfg = lorarelay::load_config(config_path);
        apply_sweeps(sweeps, spec);

        if (analyze->parsed()) {
            auto out = open_output(out_path);
            lorarelay::cmd_analyze(cfg, spec, out);
        } else if (simulate->parsed()) {
            auto out = open_output(out_path);
            lorarelay::cmd_simulate(cfg, spec, out);
        } else if (allocate->parsed()) {
            auto out = open_output(out_path);
            lorarelay::cmd_allocate(cfg, spec, p_target, out);
        } else if (validate->parsed()) {
            std::set<std::string> selection;
            std::stringstream ss(checks_csv);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) selection.insert(tok);
            const auto results =
                lorarelay::cmd_validate(cfg, selection, samples, spec.base_seed);
            bool ok = true;
            for (const auto& c : results) {
                std::printf("%-22s analytic=%.9g empirical=%.9g z=%+.3f %s\n",
                            c.name.c_str(), c.analytic, c.empirical, c.z_score,
                            std::fabs(c.z_score) <= 3.0 ? "ok" : "FAIL");
                ok = ok && std::fabs(c.z_score) <= 3.0;
            }
            return ok ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
