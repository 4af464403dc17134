#pragma once

// Experiment drivers behind the urllc-ra subcommands. Each returns the full
// output document as a string so callers (and tests) can compare runs
// byte for byte.

#include <cstdint>
#include <string>
#include <vector>

#include "urllc/allocator.hpp"
#include "urllc/core_model.hpp"
#include "urllc/simulator.hpp"

namespace urllc {

inline constexpr const char* kVersion = "1.0.0";

enum class ExperimentKind { Solve, Simulate, SweepAntennas, SweepUsers, TableWth, TableDrop };

/// Grid: midpoints of K equal-probability cells of the uniform distance law.
/// Sample: seeded draws, nested in K.
enum class Placement { Grid, Sample };

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Solve;
    std::string config_path;
    std::string output_path;
    std::uint64_t seed = 1;
    std::uint64_t frames = 1000000;
    std::uint32_t streams = 8;

    std::vector<int> users_range;     // K values (sweeps)
    std::vector<int> antenna_range;   // N_t values (sweep-antennas)
    std::vector<int> fixed_antennas{8, 16, 32, 64};  // sweep-users dash curves
    std::vector<double> eps_list;     // table-wth: eps_c; table-drop: required eps_h
    double min_distance = 50.0;
    double max_distance = 250.0;
    Placement placement = Placement::Grid;
    std::string trace_path;
};

/// Stable 64-bit FNV-1a digest of every numeric config field.
std::uint64_t config_hash(const SystemConfig& cfg);

/// `# urllc-ra <version> <command> config_hash=... seed=... [extra]`
std::string provenance_line(const std::string& command, const SystemConfig& cfg, std::uint64_t seed,
                            const std::string& extra = "");

/// Seeded sample of K distances from the uniform law on [dmin, dmax]. The
/// first K entries are the same for every larger K.
std::vector<double> place_users(int count, std::uint64_t seed, double dmin, double dmax);

/// K distances dmin + (dmax - dmin) (k + 1/2) / K.
std::vector<double> grid_distances(int count, double dmin, double dmax);

std::vector<UserProfile> placed_users(int count, const ExperimentSpec& spec, const SystemConfig& cfg);

std::string cmd_solve(const ScenarioFile& scenario);

/// W^th per eps_c at an effective bandwidth of one packet per frame.
std::string cmd_table_wth(const SystemConfig& cfg, const std::vector<double>& eps_c_list);

struct AntennaSweepRow {
    int users = 0;
    int antennas = 0;
    double mean_total_power = 0.0;
    bool power_feasible = false;
};

struct AntennaSweep {
    std::vector<AntennaSweepRow> curve;
    std::vector<AntennaSweepRow> locus;  // argmin per K over the swept range
};

AntennaSweep sweep_antennas(const SystemConfig& cfg, const ExperimentSpec& spec);
std::string cmd_sweep_antennas(const SystemConfig& cfg, const ExperimentSpec& spec);

struct UserSweepRow {
    int users = 0;
    bool joint_feasible = false;
    double ee_joint = 0.0;
    int antennas_joint = 0;
    std::vector<double> ee_fixed;      // NaN where infeasible
    std::vector<bool> fixed_feasible;
};

std::vector<UserSweepRow> sweep_users(const SystemConfig& cfg, const ExperimentSpec& spec);
std::string cmd_sweep_users(const SystemConfig& cfg, const ExperimentSpec& spec);

struct SimulateOutcome {
    SimReport report;
    Allocation allocation;
    double required_eps_h = 0.0;
    double expected_drop_events = 0.0;  // frames * sum(lambda) * eps_h
    bool resolvable = false;            // expected_drop_events >= 30
};

SimulateOutcome simulate_scenario(const ScenarioFile& scenario, const ExperimentSpec& spec, std::ostream* trace = nullptr);

/// SimReport JSON for the scenario as configured.
std::string cmd_simulate(const ScenarioFile& scenario, const ExperimentSpec& spec, std::vector<std::string>* warnings);
std::string simulate_json(const SimulateOutcome& o, std::uint64_t frames, std::vector<std::string>* warnings);

/// One CSV row per required eps_h: solve with that eps_h, then simulate.
std::string cmd_table_drop(const ScenarioFile& scenario, const ExperimentSpec& spec,
                           std::vector<std::string>* warnings);

}  // namespace urllc
