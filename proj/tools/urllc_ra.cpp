// urllc-ra: energy-efficient URLLC resource allocation and validation.
//
// Exit codes: 0 success, 2 infeasible, 3 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "urllc/experiments.hpp"

namespace {

using namespace urllc;

std::vector<int> int_range(int first, int last) {
    if (last < first) throw std::invalid_argument("empty range");
    std::vector<int> v(static_cast<std::size_t>(last - first + 1));
    std::iota(v.begin(), v.end(), first);
    return v;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError({"--out: cannot write " + path});
    out << text;
}

ScenarioFile scenario_or_default(const std::string& path) {
    if (path.empty()) {
        ScenarioFile s;
        s.users.push_back(make_user(250.0, 20, 10.0, s.config));
        return s;
    }
    return load_scenario(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-efficient URLLC downlink resource allocation"};
    app.require_subcommand(1);

    ExperimentSpec spec;
    int k_first = 1, k_last = 30, n_first = 2, n_last = 64;
    std::string csv_path;
    const std::map<std::string, Placement> placements{{"grid", Placement::Grid}, {"sample", Placement::Sample}};

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", spec.config_path, "Scenario file (key = value)");
        sub->add_option("--out", spec.output_path, "Output file (default: stdout)");
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--seed", spec.seed, "RNG seed");
        sub->add_option("--frames", spec.frames, "Frames to simulate")->check(CLI::PositiveNumber);
        sub->add_option("--streams", spec.streams, "Independent RNG streams")->check(CLI::PositiveNumber);
    };

    auto* solve = app.add_subcommand("solve", "Optimal bandwidth, power caps and antenna count (JSON)");
    add_common(solve);

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo validation of the solved policy (JSON)");
    add_common(simulate);
    add_sim(simulate);
    simulate->add_option("--csv", csv_path, "Also write required_eps_h,achieved_eps_h as CSV");
    simulate->add_option("--trace", spec.trace_path, "Per-frame CSV trace of user 0 in stream 0");

    auto* table_drop = app.add_subcommand("table-drop", "Required vs achieved proactive dropping (CSV)");
    add_common(table_drop);
    add_sim(table_drop);
    spec.eps_list = {};
    table_drop->add_option("--eps", spec.eps_list, "Required eps_h values")->default_str("1e-4 1e-5");

    auto* table_wth = app.add_subcommand("table-wth", "Bandwidth minimizer per eps_c at E^B = 1 (CSV)");
    add_common(table_wth);
    table_wth->add_option("--eps", spec.eps_list, "eps_c values")->default_str("1e-8 1e-7 1e-6 1e-5");

    auto* sweep_ant = app.add_subcommand("sweep-antennas", "E{P_tot} versus N_t per user count (CSV)");
    add_common(sweep_ant);
    sweep_ant->add_option("--seed", spec.seed, "User placement seed (with --placement sample)");
    sweep_ant->add_option("--placement", spec.placement, "User distances: grid or sample")
        ->transform(CLI::CheckedTransformer(placements, CLI::ignore_case));
    sweep_ant->add_option("--k-min", k_first)->default_val(1);
    sweep_ant->add_option("--k-max", k_last)->default_val(20);
    sweep_ant->add_option("--nt-min", n_first)->default_val(2);
    sweep_ant->add_option("--nt-max", n_last)->default_val(64);

    auto* sweep_usr = app.add_subcommand("sweep-users", "Maximal EE versus user count (CSV)");
    add_common(sweep_usr);
    sweep_usr->add_option("--seed", spec.seed, "User placement seed (with --placement sample)");
    sweep_usr->add_option("--placement", spec.placement, "User distances: grid or sample")
        ->transform(CLI::CheckedTransformer(placements, CLI::ignore_case));
    sweep_usr->add_option("--k-min", k_first)->default_val(1);
    sweep_usr->add_option("--k-max", k_last)->default_val(30);
    sweep_usr->add_option("--fixed-nt", spec.fixed_antennas, "Fixed antenna counts for comparison")
        ->default_str("8 16 32 64");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        std::vector<std::string> warnings;
        std::string text;
        if (*solve) {
            text = cmd_solve(scenario_or_default(spec.config_path));
        } else if (*simulate) {
            const auto scenario = scenario_or_default(spec.config_path);
            std::unique_ptr<std::ofstream> trace;
            if (!spec.trace_path.empty()) {
                trace = std::make_unique<std::ofstream>(spec.trace_path, std::ios::binary);
                if (!*trace) throw ConfigError({"--trace: cannot write " + spec.trace_path});
                *trace << "frame,g,P,a,s,d,Q\n";
            }
            const auto o = simulate_scenario(scenario, spec, trace.get());
            text = simulate_json(o, spec.frames, &warnings);
            if (!csv_path.empty()) {
                std::ostringstream row;
                row << provenance_line("simulate", scenario.config, spec.seed) << "required_eps_h,achieved_eps_h\n"
                    << o.required_eps_h << "," << o.report.achieved_eps_h << "\n";
                write_output(csv_path, row.str());
            }
        } else if (*table_drop) {
            if (spec.eps_list.empty()) spec.eps_list = {1e-4, 1e-5};
            text = cmd_table_drop(scenario_or_default(spec.config_path), spec, &warnings);
        } else if (*table_wth) {
            if (spec.eps_list.empty()) spec.eps_list = {1e-8, 1e-7, 1e-6, 1e-5};
            text = cmd_table_wth(scenario_or_default(spec.config_path).config, spec.eps_list);
        } else if (*sweep_ant) {
            spec.users_range = int_range(k_first, k_last);
            spec.antenna_range = int_range(n_first, n_last);
            text = cmd_sweep_antennas(scenario_or_default(spec.config_path).config, spec);
        } else if (*sweep_usr) {
            if (k_first < 1) throw ConfigError({"--k-min: K must be >= 1"});
            spec.users_range = int_range(k_first, k_last);
            text = cmd_sweep_users(scenario_or_default(spec.config_path).config, spec);
        }
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
        write_output(spec.output_path, text);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible (" << to_string(e.constraint()) << "): " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
