#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjmsv/instruments.hpp"
#include "hjmsv/montecarlo.hpp"

namespace hjmsv {

/// Sectioned key = value text file, '#' comments. Unknown keys are rejected.
class ConfigFile {
public:
    ConfigFile() = default;
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// One batch job: instrument, curve, model, mesh, solver and MC settings.
/// Every default mirrors the reference market parameter set and metric, so an
/// empty file prices the reference setup.
struct JobConfig {
    // [instrument]
    std::string instrument = "caplet";       ///< "caplet" | "zcb"
    double expiry = 1.0;                     ///< caplet expiry / zcb maturity
    double payment = 2.0;                    ///< caplet payment date
    std::optional<double> strike;            ///< default: the forward rate
    bool zcb_full_3d = false;

    // [curve]
    std::string curve_kind = "flat";         ///< "flat" | "file"
    double curve_base = 1.04;
    std::string curve_file;

    // [model]
    ModelParams model = ModelParams::market_2007();

    // [mesh]
    MeshSpec mesh;                           ///< built per instrument defaults

    // [solver]
    SolverConfig solver;
    bool checkpoint_csv = false;

    // [mc]
    McConfig mc;

    // [ladder]
    std::vector<double> ladder_strikes;

    // [convergence]
    std::vector<double> nr_list{50, 100, 200};
    std::vector<double> nv_list;             ///< caplet only; empty = skip
    std::vector<double> ny_list{20, 40, 80};
    std::vector<double> nt_list{6, 12, 24};

    // [bench] "payment:expiry" cases
    std::vector<std::pair<double, double>> bench_cases{{2, 1}, {11, 10}, {20, 19}};

    InitialCurve make_curve() const;
    CapletSpec make_caplet(const InitialCurve& curve) const;
    /// Mesh for this job (defaults per instrument unless overridden).
    MeshSpec make_mesh(const InitialCurve& curve) const;
};

JobConfig load_job_config(const std::string& path);
JobConfig job_config_from_text(const std::string& text);

/// Global command line options shared by all commands.
struct CliOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 0;   ///< 0 = hardware concurrency
};

/// Forward rate of the [T, T_M] period implied by the curve at date 0.
double period_forward_rate(const InitialCurve& curve, double expiry, double payment);

// Command entry points; each writes its CSV artifacts under opts.out_dir and
// returns a process exit status (0 = success, all artifacts written).
int cmd_price(const JobConfig& cfg, const CliOptions& opts);
int cmd_convergence(const JobConfig& cfg, const CliOptions& opts);
int cmd_validate_mc(const JobConfig& cfg, const CliOptions& opts);
int cmd_mesh_dump(const JobConfig& cfg, const CliOptions& opts);
int cmd_bench(const JobConfig& cfg, const CliOptions& opts);

}  // namespace hjmsv
