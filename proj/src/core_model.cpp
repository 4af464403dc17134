#include "urllc/core_model.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace urllc {

namespace {

std::string join_diagnostics(const std::vector<std::string>& diagnostics) {
    std::string out = "invalid configuration";
    for (const auto& d : diagnostics) {
        out += "\n  ";
        out += d;
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

InfeasibleError::InfeasibleError(BindingConstraint constraint, const std::string& what)
    : std::runtime_error(what), constraint_(constraint) {}

const char* to_string(BindingConstraint c) {
    switch (c) {
        case BindingConstraint::Bandwidth: return "bandwidth";
        case BindingConstraint::Power: return "power";
    }
    return "unknown";
}

const char* to_string(BandwidthCase c) {
    switch (c) {
        case BandwidthCase::SufficientBandwidth: return "SufficientBandwidth";
        case BandwidthCase::BandwidthLimited: return "BandwidthLimited";
    }
    return "unknown";
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double seconds_to_frames(double seconds, const SystemConfig& cfg) { return seconds / cfg.frame_duration; }
double frames_to_seconds(double frames, const SystemConfig& cfg) { return frames * cfg.frame_duration; }

double path_loss_gain(double distance_m) {
    if (!(distance_m > 0.0) || !std::isfinite(distance_m))
        throw std::invalid_argument("path_loss_gain: distance must be positive");
    return db_to_linear(-(35.3 + 37.6 * std::log10(distance_m)));
}

UserProfile make_user(double distance_m, int nodes, double per_node_rate, const SystemConfig& cfg) {
    UserProfile u;
    u.large_scale_gain = path_loss_gain(distance_m);
    u.distance = distance_m;
    u.node_count = nodes;
    u.arrival_rate = nodes * per_node_rate * cfg.frame_duration;
    return u;
}

QosBudget validate_config(const SystemConfig& cfg, const std::vector<UserProfile>& users) {
    std::vector<std::string> bad;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) bad.push_back(fmt::format("{}: must be finite and > 0 (got {})", name, v));
    };
    positive(cfg.frame_duration, "frame_duration");
    positive(cfg.dl_fraction, "dl_fraction");
    positive(cfg.e2e_delay, "e2e_delay");
    positive(cfg.noise_psd, "noise_psd");
    positive(cfg.total_bandwidth, "total_bandwidth");
    positive(cfg.max_bs_power, "max_bs_power");
    positive(cfg.circuit_power_per_antenna, "circuit_power_per_antenna");
    positive(cfg.fixed_circuit_power, "fixed_circuit_power");
    positive(cfg.packet_bits, "packet_bits");
    if (!(cfg.backhaul_delay >= 0.0)) bad.push_back("backhaul_delay: must be >= 0");
    if (!(cfg.dl_fraction < cfg.frame_duration))
        bad.push_back("dl_fraction: must be strictly shorter than frame_duration");
    if (!(cfg.amplifier_efficiency > 0.0 && cfg.amplifier_efficiency <= 1.0))
        bad.push_back("amplifier_efficiency: must lie in (0, 1]");
    if (!(cfg.loss_budget > 0.0 && cfg.loss_budget < 1.0)) bad.push_back("loss_budget: must lie in (0, 1)");
    if (cfg.antenna_cap < 2) bad.push_back("antenna_cap: must be >= 2");

    QosBudget qos;
    if (cfg.frame_duration > 0.0 && cfg.e2e_delay > 0.0) {
        if (cfg.e2e_delay < 2.0 * cfg.frame_duration + cfg.backhaul_delay)
            bad.push_back("e2e_delay: must be >= 2*frame_duration + backhaul_delay (queueing budget non-positive)");
        // Backhaul is absorbed in the 2 T_f allowance; partial frames are not usable.
        const double queue_frames = (cfg.e2e_delay - 2.0 * cfg.frame_duration) / cfg.frame_duration;
        qos.queue_delay_frames = static_cast<int>(std::floor(queue_frames + 1e-9));
        if (qos.queue_delay_frames < 1) bad.push_back("e2e_delay: queueing budget is shorter than one frame");
    }

    const double third = cfg.loss_budget / 3.0;
    qos.eps_c = cfg.eps_c.value_or(third);
    qos.eps_q = cfg.eps_q.value_or(third);
    qos.eps_h = cfg.eps_h.value_or(third);
    auto prob = [&](double v, const char* name, double hi) {
        if (!(v > 0.0 && v < hi)) bad.push_back(fmt::format("{}: must lie in (0, {}) (got {})", name, hi, v));
    };
    if (!(qos.eps_c > 0.0 && qos.eps_c <= 0.5))
        bad.push_back(fmt::format("eps_c: must lie in (0, 0.5] (got {})", qos.eps_c));
    prob(qos.eps_q, "eps_q", 1.0);
    prob(qos.eps_h, "eps_h", 1.0);
    if (qos.eps_c + qos.eps_q + qos.eps_h > cfg.loss_budget * (1.0 + 1e-12))
        bad.push_back("eps_c + eps_q + eps_h: exceeds loss_budget");

    if (users.empty()) bad.push_back("users: at least one user is required");
    for (std::size_t k = 0; k < users.size(); ++k) {
        const auto& u = users[k];
        if (!(u.large_scale_gain > 0.0 && u.large_scale_gain < 1.0))
            bad.push_back(fmt::format("users[{}].large_scale_gain: must lie in (0, 1)", k));
        if (!(u.arrival_rate > 0.0) || !std::isfinite(u.arrival_rate))
            bad.push_back(fmt::format("users[{}].arrival_rate: must be > 0", k));
        if (u.node_count < 1) bad.push_back(fmt::format("users[{}].node_count: must be >= 1", k));
    }

    if (!bad.empty()) throw ConfigError(std::move(bad));
    return qos;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& token, int line, const std::string& key) {
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw ConfigError({fmt::format("line {}: {}: '{}' is not a number", line, key, token)});
    return v;
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
    ScenarioFile out;
    auto& cfg = out.config;
    int nodes_per_user = 20;
    double node_packet_rate = 10.0;
    struct PendingUser {
        int line;
        bool is_gain;
        double value;
        std::optional<int> nodes;
        std::optional<double> rate;
    };
    std::vector<PendingUser> pending;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError({fmt::format("line {}: expected 'key = value'", line_no)});
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError({fmt::format("line {}: expected 'key = value'", line_no)});

        if (key == "user" || key == "user_gain_db") {
            std::istringstream fields(value);
            std::vector<std::string> parts;
            for (std::string p; fields >> p;) parts.push_back(p);
            if (parts.size() > 3)
                throw ConfigError({fmt::format("line {}: {}: expected '<value> [nodes] [rate_pps]'", line_no, key)});
            PendingUser pu{line_no, key == "user_gain_db", parse_number(parts[0], line_no, key), {}, {}};
            if (parts.size() > 1) pu.nodes = static_cast<int>(parse_number(parts[1], line_no, key));
            if (parts.size() > 2) pu.rate = parse_number(parts[2], line_no, key);
            pending.push_back(pu);
            continue;
        }

        const double v = parse_number(value, line_no, key);
        if (key == "frame_duration") cfg.frame_duration = v;
        else if (key == "dl_fraction") cfg.dl_fraction = v;
        else if (key == "e2e_delay") cfg.e2e_delay = v;
        else if (key == "backhaul_delay") cfg.backhaul_delay = v;
        else if (key == "noise_psd") cfg.noise_psd = v;
        else if (key == "noise_psd_dbm_hz") cfg.noise_psd = dbm_to_watts(v);
        else if (key == "total_bandwidth") cfg.total_bandwidth = v;
        else if (key == "max_bs_power") cfg.max_bs_power = v;
        else if (key == "max_bs_power_dbm") cfg.max_bs_power = dbm_to_watts(v);
        else if (key == "circuit_power_per_antenna") cfg.circuit_power_per_antenna = v;
        else if (key == "fixed_circuit_power") cfg.fixed_circuit_power = v;
        else if (key == "amplifier_efficiency") cfg.amplifier_efficiency = v;
        else if (key == "packet_bits") cfg.packet_bits = v;
        else if (key == "loss_budget") cfg.loss_budget = v;
        else if (key == "eps_c") cfg.eps_c = v;
        else if (key == "eps_q") cfg.eps_q = v;
        else if (key == "eps_h") cfg.eps_h = v;
        else if (key == "antenna_cap") cfg.antenna_cap = static_cast<int>(v);
        else if (key == "nodes_per_user") nodes_per_user = static_cast<int>(v);
        else if (key == "node_packet_rate") node_packet_rate = v;
        else throw ConfigError({fmt::format("line {}: unknown key '{}'", line_no, key)});
    }

    for (const auto& pu : pending) {
        const int nodes = pu.nodes.value_or(nodes_per_user);
        const double rate = pu.rate.value_or(node_packet_rate);
        if (pu.is_gain) {
            UserProfile u;
            u.large_scale_gain = db_to_linear(pu.value);
            u.node_count = nodes;
            u.arrival_rate = nodes * rate * cfg.frame_duration;
            out.users.push_back(u);
        } else {
            if (!(pu.value > 0.0))
                throw ConfigError({fmt::format("line {}: user: distance must be > 0", pu.line)});
            out.users.push_back(make_user(pu.value, nodes, rate, cfg));
        }
    }
    return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({fmt::format("{}: cannot open", path.string())});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

}  // namespace urllc
