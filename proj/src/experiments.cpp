#include "urllc/experiments.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "urllc/fading.hpp"
#include "urllc/philox.hpp"
#include "urllc/rate_model.hpp"

namespace urllc {

namespace {

constexpr std::uint32_t kPlacementStream = 0xFFFFFFFFu;

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
}

void hash_double(std::uint64_t& h, double v) { hash_bytes(h, &v, sizeof v); }

std::string csv_number(double v) {
    if (std::isnan(v)) return "";
    return fmt::format("{:.10g}", v);
}

std::string placement_tag(const ExperimentSpec& spec) {
    return fmt::format("placement={} distances={}-{}", spec.placement == Placement::Grid ? "grid" : "sample",
                       spec.min_distance, spec.max_distance);
}

}  // namespace

std::uint64_t config_hash(const SystemConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (double v : {cfg.frame_duration, cfg.dl_fraction, cfg.e2e_delay, cfg.backhaul_delay, cfg.noise_psd,
                     cfg.total_bandwidth, cfg.max_bs_power, cfg.circuit_power_per_antenna, cfg.fixed_circuit_power,
                     cfg.amplifier_efficiency, cfg.packet_bits, cfg.loss_budget})
        hash_double(h, v);
    for (const auto& o : {cfg.eps_c, cfg.eps_q, cfg.eps_h}) hash_double(h, o.value_or(-1.0));
    hash_bytes(h, &cfg.antenna_cap, sizeof cfg.antenna_cap);
    return h;
}

std::string provenance_line(const std::string& command, const SystemConfig& cfg, std::uint64_t seed,
                            const std::string& extra) {
    return fmt::format("# urllc-ra {} {} config_hash={:016x} seed={}{}{}\n", kVersion, command, config_hash(cfg), seed,
                       extra.empty() ? "" : " ", extra);
}

std::vector<double> place_users(int count, std::uint64_t seed, double dmin, double dmax) {
    if (count < 1) throw std::invalid_argument("place_users: need at least one user");
    if (!(dmin > 0.0 && dmax >= dmin)) throw std::invalid_argument("place_users: invalid distance range");
    std::vector<double> d(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        CellRng rng(seed, kPlacementStream, static_cast<std::uint64_t>(k), 0);
        d[static_cast<std::size_t>(k)] = dmin + (dmax - dmin) * rng.uniform();
    }
    return d;
}

std::vector<double> grid_distances(int count, double dmin, double dmax) {
    if (count < 1) throw std::invalid_argument("grid_distances: need at least one user");
    if (!(dmin > 0.0 && dmax >= dmin)) throw std::invalid_argument("grid_distances: invalid distance range");
    std::vector<double> d(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) d[static_cast<std::size_t>(k)] = dmin + (dmax - dmin) * (k + 0.5) / count;
    return d;
}

std::vector<UserProfile> placed_users(int count, const ExperimentSpec& spec, const SystemConfig& cfg) {
    const auto distances = spec.placement == Placement::Grid
                               ? grid_distances(count, spec.min_distance, spec.max_distance)
                               : place_users(count, spec.seed, spec.min_distance, spec.max_distance);
    std::vector<UserProfile> users;
    for (double d : distances)
        users.push_back(make_user(d, 20, 10.0, cfg));
    return users;
}

std::string cmd_solve(const ScenarioFile& scenario) {
    const auto a = solve_allocation(scenario.config, scenario.users);
    auto j = to_json(a);
    j["feasible"] = true;
    return j.dump(2) + "\n";
}

std::string cmd_table_wth(const SystemConfig& cfg, const std::vector<double>& eps_c_list) {
    if (eps_c_list.empty()) throw std::invalid_argument("table-wth: empty eps list");
    std::string out = provenance_line("table-wth", cfg, 0);
    out += "eps_c,W_th_Hz\n";
    for (double eps : eps_c_list) {
        if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("table-wth: eps_c must lie in (0, 0.5)");
        const auto c = snr_coeffs_from_eb(1.0, eps, cfg);
        const double w = find_bandwidth_minimizer({c.l, c.v, 1.0});
        out += fmt::format("{:.6g},{}\n", eps, std::isinf(w) ? std::string("inf") : csv_number(w));
    }
    return out;
}

AntennaSweep sweep_antennas(const SystemConfig& cfg, const ExperimentSpec& spec) {
    if (spec.users_range.empty() || spec.antenna_range.empty())
        throw std::invalid_argument("sweep-antennas: empty range");
    for (int n : spec.antenna_range)
        if (n < 2 || n > cfg.antenna_cap) throw std::invalid_argument("sweep-antennas: N_t outside [2, cap]");

    const std::size_t nk = spec.users_range.size();
    const std::size_t nn = spec.antenna_range.size();
    std::vector<AntennaSweepRow> curve(nk * nn);
    std::vector<AntennaSweepRow> locus(nk);
    std::vector<std::string> errors(nk);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(nk); ++i) {
        try {
            const int K = spec.users_range[static_cast<std::size_t>(i)];
            const auto users = placed_users(K, spec, cfg);
            const auto qos = validate_config(cfg, users);
            const auto ys = build_y_functions(cfg, qos, users);
            const auto bw = allocate_bandwidth(ys, cfg.total_bandwidth);
            AntennaSweepRow best{K, 0, std::numeric_limits<double>::infinity(), false};
            for (std::size_t j = 0; j < nn; ++j) {
                const int n = spec.antenna_range[j];
                AntennaSweepRow row{K, n, mean_total_power(bw.objective, n, qos.eps_h, cfg), false};
                row.power_feasible = power_thresholds(bw, ys, n, qos.eps_h, cfg).total <= cfg.max_bs_power;
                curve[static_cast<std::size_t>(i) * nn + j] = row;
                if (row.mean_total_power < best.mean_total_power) best = row;
            }
            locus[static_cast<std::size_t>(i)] = best;
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("sweep-antennas: " + e);
    return {curve, locus};
}

std::string cmd_sweep_antennas(const SystemConfig& cfg, const ExperimentSpec& spec) {
    const auto sweep = sweep_antennas(cfg, spec);
    std::string out = provenance_line("sweep-antennas", cfg, spec.seed, placement_tag(spec));
    out += "series,K,N_t,E_Ptot_W,power_feasible\n";
    for (const auto& r : sweep.curve)
        out += fmt::format("curve,{},{},{},{}\n", r.users, r.antennas, csv_number(r.mean_total_power),
                           r.power_feasible ? 1 : 0);
    for (const auto& r : sweep.locus)
        out += fmt::format("locus,{},{},{},{}\n", r.users, r.antennas, csv_number(r.mean_total_power),
                           r.power_feasible ? 1 : 0);
    return out;
}

std::vector<UserSweepRow> sweep_users(const SystemConfig& cfg, const ExperimentSpec& spec) {
    if (spec.users_range.empty()) throw std::invalid_argument("sweep-users: empty K range");
    for (int K : spec.users_range)
        if (K < 1) throw std::invalid_argument("sweep-users: K must be >= 1");
    for (int n : spec.fixed_antennas)
        if (n < 2) throw std::invalid_argument("sweep-users: fixed N_t must be >= 2");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<UserSweepRow> rows(spec.users_range.size());
    std::vector<std::string> errors(rows.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(rows.size()); ++i) try {
        auto& row = rows[static_cast<std::size_t>(i)];
        row.users = spec.users_range[static_cast<std::size_t>(i)];
        const auto users = placed_users(row.users, spec, cfg);
        try {
            const auto a = solve_allocation(cfg, users);
            row.joint_feasible = true;
            row.ee_joint = a.energy_efficiency;
            row.antennas_joint = a.antennas;
        } catch (const InfeasibleError&) {
            row.ee_joint = nan;
        }
        for (int n : spec.fixed_antennas) {
            try {
                const auto a = solve_allocation(cfg, users, n);
                row.ee_fixed.push_back(a.energy_efficiency);
                row.fixed_feasible.push_back(true);
            } catch (const InfeasibleError&) {
                row.ee_fixed.push_back(nan);
                row.fixed_feasible.push_back(false);
            }
        }
    } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("sweep-users: " + e);
    return rows;
}

std::string cmd_sweep_users(const SystemConfig& cfg, const ExperimentSpec& spec) {
    const auto rows = sweep_users(cfg, spec);
    std::string out = provenance_line("sweep-users", cfg, spec.seed, placement_tag(spec));
    out += "K,EE_joint,N_t_joint";
    for (int n : spec.fixed_antennas) out += fmt::format(",EE_fixed_{0},feasible_{0}", n);
    out += "\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{}", r.users, csv_number(r.ee_joint), r.antennas_joint);
        for (std::size_t j = 0; j < r.ee_fixed.size(); ++j)
            out += fmt::format(",{},{}", csv_number(r.ee_fixed[j]), r.fixed_feasible[j] ? 1 : 0);
        out += "\n";
    }
    return out;
}

SimulateOutcome simulate_scenario(const ScenarioFile& scenario, const ExperimentSpec& spec, std::ostream* trace) {
    SimulateOutcome out;
    out.allocation = solve_allocation(scenario.config, scenario.users);
    const auto policy = make_policy(out.allocation, scenario.users);
    SimOptions opts;
    opts.frames = spec.frames;
    opts.seed = spec.seed;
    opts.streams = spec.streams;
    opts.trace = trace;
    out.report = run_simulation(policy, scenario.config, opts);
    out.required_eps_h = out.allocation.qos.eps_h;
    double lambda = 0.0;
    for (const auto& u : scenario.users) lambda += u.arrival_rate;
    out.expected_drop_events = static_cast<double>(spec.frames) * lambda * out.required_eps_h;
    out.resolvable = out.expected_drop_events >= 30.0;
    return out;
}

namespace {

std::string unresolvable_warning(const SimulateOutcome& o, std::uint64_t frames) {
    return fmt::format(
        "required eps_h = {:.3g} is statistically unresolvable at {} frames ({:.3g} expected drop events < 30)",
        o.required_eps_h, frames, o.expected_drop_events);
}

}  // namespace

std::string cmd_simulate(const ScenarioFile& scenario, const ExperimentSpec& spec, std::vector<std::string>* warnings) {
    return simulate_json(simulate_scenario(scenario, spec), spec.frames, warnings);
}

std::string simulate_json(const SimulateOutcome& o, std::uint64_t frames, std::vector<std::string>* warnings) {
    if (!o.resolvable && warnings) warnings->push_back(unresolvable_warning(o, frames));
    auto j = to_json(o.report);
    j["required_eps_h"] = o.required_eps_h;
    j["expected_drop_events"] = o.expected_drop_events;
    j["resolvable"] = o.resolvable;
    j["antennas"] = o.allocation.antennas;
    j["predicted_mean_tx_power"] = [&] {
        double p = 0.0;
        for (const auto& u : o.allocation.users) p += u.mean_tx_power;
        return p;
    }();
    return j.dump(2) + "\n";
}

std::string cmd_table_drop(const ScenarioFile& scenario, const ExperimentSpec& spec,
                           std::vector<std::string>* warnings) {
    if (spec.eps_list.empty()) throw std::invalid_argument("table-drop: empty eps_h list");
    std::string out = provenance_line("table-drop", scenario.config, spec.seed);
    out += "required_eps_h,achieved_eps_h,drop_events,arrivals,frames,N_t,g_th,resolvable\n";
    for (double eps : spec.eps_list) {
        // eps_c and eps_q stay at their configured values; the loss budget
        // grows to cover the swept eps_h.
        ScenarioFile s = scenario;
        const auto base = validate_config(scenario.config, scenario.users);
        s.config.eps_c = base.eps_c;
        s.config.eps_q = base.eps_q;
        s.config.eps_h = eps;
        s.config.loss_budget = base.eps_c + base.eps_q + eps;
        const auto o = simulate_scenario(s, spec);
        if (!o.resolvable && warnings) warnings->push_back(unresolvable_warning(o, spec.frames));
        out += fmt::format("{:.6g},{},{},{},{},{},{},{}\n", eps, csv_number(o.report.achieved_eps_h),
                           o.report.drop_events, csv_number(o.report.arrival_count), o.report.frames_run,
                           o.allocation.antennas, csv_number(o.allocation.users.front().gain_threshold),
                           o.resolvable ? 1 : 0);
    }
    return out;
}

}  // namespace urllc
