#include "hjmsv/job.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hjmsv {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"instrument", {"kind", "expiry", "payment", "strike", "maturity", "full_3d"}},
    {"curve", {"kind", "base", "file"}},
    {"model", {"kappa", "lambda", "gamma", "epsilon", "theta", "rho", "r0_scale"}},
    {"mesh",
     {"nr", "nv", "ny", "r_max", "v_max", "y_max", "alpha_r", "alpha_v", "alpha_y",
      "k_r", "k_v", "k_y"}},
    {"solver",
     {"theta_cn", "steps_per_year", "y_boundary_order", "smoothing",
      "smoothing_subsamples", "divergence_bound", "checkpoint_csv"}},
    {"mc", {"paths", "steps_per_year", "seed", "full_truncation"}},
    {"ladder", {"strikes"}},
    {"convergence", {"nr_list", "nv_list", "ny_list", "nt_list"}},
    {"bench", {"cases"}},
};

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!kKnownKeys.count(section))
                throw std::runtime_error("config: unknown section [" + section + "]");
            cfg.sections_[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos || section.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value inside a section");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!kKnownKeys.at(section).count(key))
            throw std::runtime_error("config: unknown key '" + key + "' in [" +
                                     section + "]");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = get(section, key, "");
    try {
        std::size_t pos = 0;
        double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: [" + section + "] " + key +
                                 " is not a number: '" + raw + "'");
    }
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
    double v = get_double(section, key, fallback);
    int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-9)
        throw std::runtime_error("config: [" + section + "] " + key +
                                 " must be an integer");
    return i;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string v = get(section, key, "");
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error("config: [" + section + "] " + key +
                             " must be a boolean (on/off)");
}

std::vector<double> ConfigFile::get_list(const std::string& section,
                                         const std::string& key,
                                         const std::vector<double>& fallback) const {
    if (!has(section, key)) return fallback;
    std::vector<double> out;
    std::string raw = get(section, key, "");
    std::replace(raw.begin(), raw.end(), ',', ' ');
    std::istringstream ss(raw);
    double v;
    while (ss >> v) out.push_back(v);
    if (out.empty())
        throw std::runtime_error("config: [" + section + "] " + key + " list is empty");
    return out;
}

InitialCurve JobConfig::make_curve() const {
    if (curve_kind == "flat") return InitialCurve::flat(curve_base);
    if (curve_kind == "file") return InitialCurve::from_file(curve_file);
    throw std::runtime_error("config: curve kind must be flat or file");
}

double period_forward_rate(const InitialCurve& curve, double expiry, double payment) {
    return (curve.discount(expiry) / curve.discount(payment) - 1.0) /
           (payment - expiry);
}

CapletSpec JobConfig::make_caplet(const InitialCurve& curve) const {
    CapletSpec spec;
    spec.expiry = expiry;
    spec.payment = payment;
    spec.strike = strike ? *strike : period_forward_rate(curve, expiry, payment);
    spec.validate();
    return spec;
}

MeshSpec JobConfig::make_mesh(const InitialCurve& curve) const {
    MeshSpec m;
    const double r0 = mesh.r0;
    if (instrument == "zcb") {
        m = curve.is_flat() ? MeshSpec::zcb_default(curve.forward(0.0), r0)
                            : MeshSpec::zcb_curve_default(curve, expiry, r0);
        if (zcb_full_3d) m.nv = 21;
    } else {
        CapletSpec spec = make_caplet(curve);
        m = MeshSpec::caplet_default(spec.strike, r0);
    }
    // apply explicit overrides on top of the instrument defaults
    m.nr = mesh.nr > 0 ? mesh.nr : m.nr;
    m.nv = mesh.nv > 0 ? mesh.nv : m.nv;
    m.ny = mesh.ny > 0 ? mesh.ny : m.ny;
    if (mesh.r.z_inf > 0.0) m.r.z_inf = mesh.r.z_inf;
    if (mesh.v.z_inf > 0.0) m.v.z_inf = mesh.v.z_inf;
    if (mesh.y.z_inf > 0.0) m.y.z_inf = mesh.y.z_inf;
    if (mesh.r.alpha > 0.0) m.r.alpha = mesh.r.alpha;
    if (mesh.v.alpha > 0.0) m.v.alpha = mesh.v.alpha;
    if (mesh.y.alpha > 0.0) m.y.alpha = mesh.y.alpha;
    if (mesh.r.center >= 0.0) m.r.center = mesh.r.center;
    if (mesh.v.center >= 0.0) m.v.center = mesh.v.center;
    if (mesh.y.center >= 0.0) m.y.center = mesh.y.center;
    return m;
}

JobConfig job_config_from_text(const std::string& text) {
    ConfigFile f = ConfigFile::parse_string(text);
    JobConfig cfg;

    cfg.instrument = f.get("instrument", "kind", "caplet");
    if (cfg.instrument != "caplet" && cfg.instrument != "zcb")
        throw std::runtime_error("config: instrument kind must be caplet or zcb");
    cfg.expiry = f.get_double("instrument", "expiry",
                              f.get_double("instrument", "maturity",
                                           cfg.instrument == "zcb" ? 20.0 : 1.0));
    cfg.payment = f.get_double("instrument", "payment", cfg.expiry + 1.0);
    if (f.has("instrument", "strike"))
        cfg.strike = f.get_double("instrument", "strike", 0.0);
    cfg.zcb_full_3d = f.get_bool("instrument", "full_3d", false);

    cfg.curve_kind = f.get("curve", "kind", "flat");
    cfg.curve_base = f.get_double("curve", "base", 1.04);
    cfg.curve_file = f.get("curve", "file", "");

    cfg.model = ModelParams::constants(
        f.get_double("model", "kappa", 0.001), f.get_double("model", "lambda", 0.15),
        f.get_double("model", "gamma", 0.9), f.get_double("model", "epsilon", 1.5),
        f.get_double("model", "theta", 0.25), f.get_double("model", "rho", -0.75));

    cfg.mesh.r0 = f.get_double("model", "r0_scale", 0.01);
    // zeros mean "use the instrument default"
    cfg.mesh.nr = f.get_int("mesh", "nr", 0);
    cfg.mesh.nv = f.get_int("mesh", "nv", 0);
    cfg.mesh.ny = f.get_int("mesh", "ny", 0);
    cfg.mesh.r = {f.get_double("mesh", "k_r", -1.0), f.get_double("mesh", "alpha_r", 0.0),
                  0.0, f.get_double("mesh", "r_max", 0.0)};
    cfg.mesh.v = {f.get_double("mesh", "k_v", -1.0), f.get_double("mesh", "alpha_v", 0.0),
                  0.0, f.get_double("mesh", "v_max", 0.0)};
    cfg.mesh.y = {f.get_double("mesh", "k_y", -1.0), f.get_double("mesh", "alpha_y", 0.0),
                  0.0, f.get_double("mesh", "y_max", 0.0)};

    cfg.solver.theta_cn = f.get_double("solver", "theta_cn", 0.5);
    cfg.solver.steps_per_year = f.get_int("solver", "steps_per_year", 12);
    cfg.solver.y_boundary_order = f.get_int("solver", "y_boundary_order", 2);
    cfg.solver.smoothing = f.get_bool("solver", "smoothing", true);
    cfg.solver.smoothing_subsamples = f.get_int("solver", "smoothing_subsamples", 3);
    cfg.solver.divergence_bound = f.get_double("solver", "divergence_bound", 1e6);
    cfg.checkpoint_csv = f.get_bool("solver", "checkpoint_csv", false);
    cfg.solver.validate();

    cfg.mc.n_paths = static_cast<long>(f.get_double("mc", "paths", 200000));
    cfg.mc.steps_per_year = f.get_int("mc", "steps_per_year", 96);
    cfg.mc.seed = static_cast<std::uint64_t>(f.get_double("mc", "seed", 20070423));
    cfg.mc.full_truncation = f.get_bool("mc", "full_truncation", true);

    cfg.ladder_strikes = f.get_list("ladder", "strikes", {});

    cfg.nr_list = f.get_list("convergence", "nr_list", cfg.nr_list);
    cfg.nv_list = f.get_list("convergence", "nv_list", cfg.nv_list);
    cfg.ny_list = f.get_list("convergence", "ny_list", cfg.ny_list);
    cfg.nt_list = f.get_list("convergence", "nt_list", cfg.nt_list);

    if (f.has("bench", "cases")) {
        cfg.bench_cases.clear();
        std::string raw = f.get("bench", "cases", "");
        std::replace(raw.begin(), raw.end(), ',', ' ');
        std::istringstream ss(raw);
        std::string tok;
        while (ss >> tok) {
            auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("config: bench cases must be payment:expiry");
            cfg.bench_cases.emplace_back(std::stod(tok.substr(0, colon)),
                                         std::stod(tok.substr(colon + 1)));
        }
    }
    return cfg;
}

JobConfig load_job_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return job_config_from_text(buf.str());
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_csv(const CliOptions& opts, const std::string& name) {
    std::filesystem::create_directories(opts.out_dir);
    std::filesystem::path p = std::filesystem::path(opts.out_dir) / name;
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

void write_report_csv(const CliOptions& opts, const SolveReport& rep) {
    auto out = open_csv(opts, "report.csv");
    out << "wall_seconds,n_steps,last_max_delta,nan_guard_ok\n";
    out << fmt(rep.wall_seconds) << ',' << rep.n_steps << ','
        << fmt(rep.last_max_delta) << ',' << (rep.nan_guard_ok ? 1 : 0) << '\n';
}

void write_surface_csv(const CliOptions& opts, const std::string& name,
                       const PriceResult& res, double r0) {
    auto out = open_csv(opts, name);
    out << "r_rate,v_variance,price,rho_dprice_dr,vega_dprice_dv\n";
    const Grid3& g = res.solution;
    for (int i = 0; i < g.nr(); ++i)
        for (int j = 0; j < g.nv(); ++j)
            out << fmt(r0 * g.r.z[i]) << ',' << fmt(g.v.z[j]) << ','
                << fmt(g.at(i, j, 0)) << ',' << fmt(res.rho_grid.at(i, j, 0)) << ','
                << fmt(res.vega_grid.at(i, j, 0)) << '\n';
}

McConfig mc_with_overrides(const JobConfig& cfg, const CliOptions& opts) {
    McConfig mc = cfg.mc;
    if (opts.seed) mc.seed = *opts.seed;
    mc.threads = opts.threads;
    return mc;
}

}  // namespace

int cmd_price(const JobConfig& cfg, const CliOptions& opts) {
    try {
        InitialCurve curve = cfg.make_curve();
        MeshSpec mesh = cfg.make_mesh(curve);
        StatePoint spot = natural_spot(curve);

        std::ofstream checkpoint;
        StepObserver observer;
        if (cfg.checkpoint_csv) {
            checkpoint = open_csv(opts, "checkpoint.csv");
            checkpoint << "step,t_hat,max_delta\n";
            observer = [&checkpoint](int step, double t_hat, const Grid3&,
                                     double max_delta) {
                checkpoint << step << ',' << fmt(t_hat) << ',' << fmt(max_delta) << '\n';
            };
        }

        std::vector<std::pair<double, double>> ladder;
        PriceResult res;
        if (cfg.instrument == "zcb") {
            res = price_zcb(cfg.expiry, curve, cfg.model, mesh, cfg.solver, spot,
                            cfg.zcb_full_3d, observer);
        } else {
            CapletSpec spec = cfg.make_caplet(curve);
            res = price_caplet(spec, curve, cfg.model, mesh, cfg.solver, spot, observer);
            if (!cfg.ladder_strikes.empty())
                ladder = caplet_ladder(spec, cfg.ladder_strikes, curve, cfg.model, mesh,
                                       cfg.solver, spot, opts.threads);
        }

        auto out = open_csv(opts, "price.csv");
        out << "instrument,price,reference,abs_error,wall_seconds,n_steps\n";
        out << cfg.instrument << ',' << fmt(res.price) << ',';
        if (res.reference) {
            out << fmt(*res.reference) << ',' << fmt(std::abs(res.price - *res.reference));
        } else {
            out << ',';
        }
        out << ',' << fmt(res.report.wall_seconds) << ',' << res.report.n_steps << '\n';

        write_report_csv(opts, res.report);
        write_surface_csv(opts, "surface_y0.csv", res, mesh.r0);
        if (!ladder.empty()) {
            auto lad = open_csv(opts, "premium_by_strike.csv");
            lad << "strike_rate,premium\n";
            for (auto [k, p] : ladder) lad << fmt(k) << ',' << fmt(p) << '\n';
        }

        std::cout << cfg.instrument << " price " << fmt(res.price);
        if (res.reference)
            std::cout << "  (closed form " << fmt(*res.reference) << ", |err| "
                      << fmt(std::abs(res.price - *res.reference)) << ")";
        std::cout << "  wall " << fmt(res.report.wall_seconds) << " s\n";
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "price: " << err.what() << '\n';
        return 1;
    }
}

int cmd_convergence(const JobConfig& cfg, const CliOptions& opts) {
    try {
        InitialCurve curve = cfg.make_curve();
        MeshSpec base = cfg.make_mesh(curve);
        StatePoint spot = natural_spot(curve);

        auto out = open_csv(opts, "convergence.csv");
        out << "sweep,nr,nv,ny,steps_per_year,value,error_or_delta\n";

        auto run_one = [&](const MeshSpec& mesh, int spy) {
            SolverConfig scfg = cfg.solver;
            scfg.steps_per_year = spy;
            if (cfg.instrument == "zcb") {
                PriceResult r = price_zcb(cfg.expiry, curve, cfg.model, mesh, scfg, spot,
                                          cfg.zcb_full_3d);
                return std::pair<double, double>(r.price,
                                                 std::abs(r.price - *r.reference));
            }
            CapletSpec spec = cfg.make_caplet(curve);
            PriceResult r = price_caplet(spec, curve, cfg.model, mesh, scfg, spot);
            return std::pair<double, double>(r.price, 0.0);
        };

        auto emit = [&](const std::string& sweep, const MeshSpec& mesh, int spy,
                        double value, double err) {
            out << sweep << ',' << mesh.nr << ',' << mesh.nv << ',' << mesh.ny << ','
                << spy << ',' << fmt(value) << ',' << fmt(err) << '\n';
        };

        std::vector<double> mesh_errors;

        if (cfg.instrument == "zcb") {
            // paired (nr, ny) refinement
            for (std::size_t q = 0; q < cfg.nr_list.size() && q < cfg.ny_list.size();
                 ++q) {
                MeshSpec mesh = base;
                mesh.nr = static_cast<int>(cfg.nr_list[q]);
                mesh.ny = static_cast<int>(cfg.ny_list[q]);
                auto [value, err] = run_one(mesh, cfg.solver.steps_per_year);
                emit("mesh", mesh, cfg.solver.steps_per_year, value, err);
                mesh_errors.push_back(err);
            }
        } else {
            auto sweep_dim = [&](const std::string& name,
                                 const std::vector<double>& list, auto set) {
                double prev = 0.0;
                bool have_prev = false;
                for (double nval : list) {
                    MeshSpec mesh = base;
                    set(mesh, static_cast<int>(nval));
                    auto [value, err] = run_one(mesh, cfg.solver.steps_per_year);
                    (void)err;
                    emit(name, mesh, cfg.solver.steps_per_year, value,
                         have_prev ? std::abs(value - prev) : 0.0);
                    prev = value;
                    have_prev = true;
                }
            };
            sweep_dim("nr", cfg.nr_list, [](MeshSpec& m, int n) { m.nr = n; });
            if (!cfg.nv_list.empty())
                sweep_dim("nv", cfg.nv_list, [](MeshSpec& m, int n) { m.nv = n; });
            sweep_dim("ny", cfg.ny_list, [](MeshSpec& m, int n) { m.ny = n; });
        }

        // time-step sweep on the base mesh
        {
            double prev = 0.0;
            bool have_prev = false;
            for (double nt : cfg.nt_list) {
                auto [value, err] = run_one(base, static_cast<int>(nt));
                emit("nt", base, static_cast<int>(nt), value,
                     cfg.instrument == "zcb" ? err
                                             : (have_prev ? std::abs(value - prev) : 0.0));
                prev = value;
                have_prev = true;
            }
        }

        // observed spatial order from the error column (bond sweeps halve dx)
        if (mesh_errors.size() >= 2) {
            for (std::size_t q = 1; q < mesh_errors.size(); ++q) {
                double ratio = mesh_errors[q - 1] / std::max(mesh_errors[q], 1e-300);
                out << "order,,,,,," << fmt(std::log2(ratio)) << '\n';
            }
        }
        std::cout << "convergence table written to " << opts.out_dir << "\n";
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "convergence: " << err.what() << '\n';
        return 1;
    }
}

int cmd_validate_mc(const JobConfig& cfg, const CliOptions& opts) {
    try {
        InitialCurve curve = cfg.make_curve();
        MeshSpec mesh = cfg.make_mesh(curve);
        StatePoint spot = natural_spot(curve);
        McConfig mc = mc_with_overrides(cfg, opts);

        double pde_price, mc_mean, mc_se;
        std::string label;
        if (cfg.instrument == "zcb") {
            PriceResult r =
                price_zcb(cfg.expiry, curve, cfg.model, mesh, cfg.solver, spot, false);
            McEstimate est = simulate_zcb(cfg.expiry, curve, cfg.model, mc);
            pde_price = r.price;
            mc_mean = est.mean;
            mc_se = est.std_error;
            label = "zcb";
        } else {
            CapletSpec spec = cfg.make_caplet(curve);
            PriceResult r = price_caplet(spec, curve, cfg.model, mesh, cfg.solver, spot);
            McEstimate est = simulate_caplet(spec, curve, cfg.model, mc);
            pde_price = r.price;
            mc_mean = est.mean;
            mc_se = est.std_error;
            label = "caplet";
        }

        const double diff = pde_price - mc_mean;
        const bool degenerate = mc_se < 1e-14;
        const double z = degenerate ? 0.0 : diff / mc_se;
        const bool pass = degenerate ? std::abs(diff) <= 1e-6 : std::abs(z) <= 3.0;

        auto out = open_csv(opts, "validate_mc.csv");
        out << "instrument,pde_price,mc_mean,mc_std_error,z_score,status\n";
        out << label << ',' << fmt(pde_price) << ',' << fmt(mc_mean) << ','
            << fmt(mc_se) << ',' << fmt(z) << ',' << (pass ? "PASS" : "FAIL") << '\n';

        std::cout << label << " pde " << fmt(pde_price) << "  mc " << fmt(mc_mean)
                  << " +- " << fmt(mc_se) << "  z " << fmt(z) << "  "
                  << (pass ? "PASS" : "FAIL") << '\n';
        return pass ? 0 : 2;
    } catch (const std::exception& err) {
        std::cerr << "validate-mc: " << err.what() << '\n';
        return 1;
    }
}

int cmd_mesh_dump(const JobConfig& cfg, const CliOptions& opts) {
    try {
        InitialCurve curve = cfg.make_curve();
        MeshSpec mesh = cfg.make_mesh(curve);
        auto dump = [&](const std::string& name, const MetricParams& p, int n) {
            auto out = open_csv(opts, name);
            dump_axis_csv(build_axis(p, std::max(n, 3)), out);
        };
        dump("axis_r.csv", mesh.r, mesh.nr);
        dump("axis_v.csv", mesh.v, mesh.nv);
        dump("axis_y.csv", mesh.y, mesh.ny);
        std::cout << "axis tables written to " << opts.out_dir << '\n';
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "mesh-dump: " << err.what() << '\n';
        return 1;
    }
}

int cmd_bench(const JobConfig& cfg, const CliOptions& opts) {
    try {
        InitialCurve curve = cfg.make_curve();
        StatePoint spot = natural_spot(curve);

        auto out = open_csv(opts, "bench.csv");
        out << "payment_years,expiry_years,n_steps,wall_seconds,price\n";
        for (auto [payment, expiry] : cfg.bench_cases) {
            JobConfig one = cfg;
            one.instrument = "caplet";
            one.expiry = expiry;
            one.payment = payment;
            CapletSpec spec = one.make_caplet(curve);
            MeshSpec mesh = one.make_mesh(curve);
            PriceResult res =
                price_caplet(spec, curve, cfg.model, mesh, cfg.solver, spot);
            out << fmt(payment) << ',' << fmt(expiry) << ',' << res.report.n_steps
                << ',' << fmt(res.report.wall_seconds) << ',' << fmt(res.price) << '\n';
            std::cout << "caplet T_M=" << payment << " T=" << expiry << "  steps "
                      << res.report.n_steps << "  " << fmt(res.report.wall_seconds)
                      << " s\n";
        }
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "bench: " << err.what() << '\n';
        return 1;
    }
}

}  // namespace hjmsv
