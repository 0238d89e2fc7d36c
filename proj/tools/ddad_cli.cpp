// ddad: command-line front end for behavior-based chi-squared attack detection.
//
// Exit codes: 0 success, 2 validation error, 3 estimation failure, 4 IO error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "ddad/behavior.hpp"
#include "ddad/bound_study.hpp"
#include "ddad/detection.hpp"
#include "ddad/error.hpp"
#include "ddad/estimation.hpp"
#include "ddad/experiment.hpp"
#include "ddad/io.hpp"
#include "ddad/system_sim.hpp"

namespace fs = std::filesystem;
using ddad::io::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitIo = 4;

/// Reads a JSON run configuration. Top-level keys set global options; an
/// object under a subcommand's name sets that subcommand's options. Keys use
/// the long flag name with '-' or '_'.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        throw CLI::ConfigError("writing configuration files is not supported");
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json doc;
        try {
            doc = json::parse(input);
        } catch (const json::parse_error& e) {
            throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!doc.is_object()) throw CLI::ConfigError("config must be a JSON object");
        std::vector<CLI::ConfigItem> items;
        collect(doc, {}, items);
        return items;
    }

private:
    static std::string option_name(std::string key) {
        for (char& c : key) {
            if (c == '_') c = '-';
        }
        return key;
    }

    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void collect(const json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, value] : obj.items()) {
            if (value.is_object()) {
                auto next = parents;
                next.push_back(key);
                collect(value, next, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = option_name(key);
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(value));
            }
            out.push_back(std::move(item));
        }
    }
};

struct Globals {
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    int threads = 1;
};

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

fs::path sidecar_of(const std::string& csv) { return fs::path(csv).replace_extension(".json"); }

// ---------------------------------------------------------------- sysgen

struct SysgenArgs {
    int n = 3, m = 1, p = 1;
    std::string out = "system.json";
};

int cmd_sysgen(const Globals& g, const SysgenArgs& a) {
    const ddad::LtiSystem sys = ddad::random_stable_system(a.n, a.m, a.p, g.seed);
    const fs::path out = fs::path(a.out).is_absolute() ? fs::path(a.out) : fs::path(g.out_dir) / a.out;
    ddad::io::save_system(out, sys);
    std::cout << "wrote " << out.string() << "\n"
              << "spectral radius of A: " << fmt(ddad::spectral_radius(sys.A), 10) << "\n"
              << "controllability rank: " << sys.n() << "/" << sys.n() << " (full)\n"
              << "observability rank:   " << sys.n() << "/" << sys.n() << " (full)\n"
              << "fingerprint: " << sys.fingerprint() << "\n";
    return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string system = "system.json";
    int N = 200;
    int T = 7;
    ddad::NoiseSpec noise;
    double attack_variance = 0.0;
    std::string name = "experiments";
};

int cmd_simulate(const Globals& g, const SimulateArgs& a) {
    const ddad::LtiSystem sys = ddad::io::load_system(a.system);
    ddad::ExperimentSet data;
    if (a.attack_variance > 0.0) {
        a.noise.validate();
        for (int i = 0; i < a.N; ++i) {
            ddad::Rng rng(ddad::derive_seed(g.seed, {static_cast<std::uint64_t>(i)}));
            data.trajectories.push_back(ddad::simulate(sys, a.noise, ddad::GaussianInjection{a.attack_variance}, a.T, rng));
        }
        data.system_fingerprint = sys.fingerprint();
        data.noise = a.noise;
        data.master_seed = g.seed;
    } else {
        data = ddad::generate_experiments(sys, a.noise, a.N, a.T, g.seed);
    }
    const fs::path csv = fs::path(g.out_dir) / (a.name + ".csv");
    const fs::path meta = fs::path(g.out_dir) / (a.name + ".json");
    json sidecar = ddad::io::experiments_metadata(data);
    sidecar["attack_variance"] = a.attack_variance;
    ddad::io::write_text(csv, ddad::io::experiments_to_csv(data));
    ddad::io::write_text(meta, sidecar.dump(2) + "\n");
    std::cout << "wrote " << a.N << " trajectories of horizon " << a.T << " to " << csv.string() << "\n";
    return 0;
}

// -------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string data;
    std::string meta;
    std::string method = "direct";
    int L = 3;
    std::string name = "covariance";
};

int cmd_estimate(const Globals& g, const EstimateArgs& a) {
    const ddad::ExperimentSet data =
        ddad::io::load_experiments(a.data, a.meta.empty() ? sidecar_of(a.data) : fs::path(a.meta));
    const fs::path dir(g.out_dir);
    const auto method = ddad::covariance_method_from_string(a.method);
    ddad::CovarianceEstimate est;
    if (method == ddad::CovarianceMethod::Direct) {
        est = ddad::direct_covariance(data);
    } else if (method == ddad::CovarianceMethod::Indirect) {
        const ddad::IndirectResult res = ddad::indirect_covariance(data, a.L);
        est = res.estimate;
        ddad::io::save_matrix(dir / "M_hat.csv", res.model.M_hat);
        ddad::io::save_matrix(dir / "Sigma_eps_hat.csv", res.model.Sigma_eps_hat);
        ddad::io::save_matrix(dir / "P_hat.csv", res.model.P_hat);
        json model;
        model["L"] = a.L;
        model["T"] = res.model.T;
        model["dim"] = res.model.M_hat.rows();
        model["spectral_radius"] = res.model.spectral_radius;
        ddad::io::write_text(dir / "model.json", model.dump(2) + "\n");
        std::cout << "spectral radius of M_hat: " << fmt(res.model.spectral_radius, 10) << "\n";
    } else {
        throw ddad::InvalidArgument("estimate supports --method direct or indirect");
    }
    ddad::io::save_matrix(dir / (a.name + ".csv"), est.S);
    ddad::io::write_text(dir / (a.name + ".json"), ddad::io::covariance_metadata(est, data.master_seed).dump(2) + "\n");
    std::cout << "wrote " << est.dim() << "x" << est.dim() << " " << a.method << " estimate to "
              << (dir / (a.name + ".csv")).string() << (est.clipped ? " (negative eigenvalues clipped)" : "") << "\n";
    return 0;
}

// ---------------------------------------------------------------- detect

struct DetectArgs {
    std::string covariance;
    std::string data;
    std::string meta;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double alpha = 0.05;
    double pinv_tol = 1e-8;
    std::string name = "statistics";
};

int cmd_detect(const Globals& g, const DetectArgs& a) {
    const ddad::Matrix S = ddad::io::load_matrix(a.covariance);
    const ddad::ExperimentSet data =
        ddad::io::load_experiments(a.data, a.meta.empty() ? sidecar_of(a.data) : fs::path(a.meta));
    const ddad::PseudoInverse inv = ddad::invert_covariance(S, a.pinv_tol);
    const int dof = static_cast<int>(S.rows());
    const double lambda = std::isnan(a.lambda) ? ddad::chi2_threshold(dof, a.alpha) : a.lambda;

    std::ostringstream os;
    os << "traj_id,g,alarm\n";
    int alarms = 0;
    for (int i = 0; i < data.size(); ++i) {
        const ddad::BehaviorVector z = ddad::stack_behavior(data.trajectories[i]);
        if (z.z.size() != S.rows()) throw ddad::InvalidArgument("behavior length does not match the covariance");
        const ddad::DetectorStat stat = ddad::chi2_statistic(z.z, inv.matrix);
        const bool alarm = ddad::detect(stat, lambda) == ddad::Hypothesis::H1;
        alarms += alarm ? 1 : 0;
        os << i << ',' << ddad::io::format_double(stat.g) << ',' << (alarm ? 1 : 0) << '\n';
    }
    const fs::path out = fs::path(g.out_dir) / (a.name + ".csv");
    ddad::io::write_text(out, os.str());
    std::cout << "threshold " << fmt(lambda, 10) << " (dof " << dof << ", numerical rank " << inv.rank << ")\n"
              << "alarms: " << alarms << "/" << data.size() << " = " << fmt(static_cast<double>(alarms) / data.size()) << "\n"
              << "wrote " << out.string() << "\n";
    return 0;
}

// ------------------------------------------------------------------- roc

struct RocArgs {
    std::string nominal;
    std::string attacked;
    int points = 512;
    std::string method = "direct";
    int N = 0, T = 0, L = 0;
    std::string name = "roc";
};

std::vector<double> read_statistics(const std::string& path) {
    std::istringstream is(ddad::io::read_text(path));
    std::string line;
    std::getline(is, line);
    if (line.rfind("traj_id,g", 0) != 0) throw ddad::IoError("'" + path + "' is not a statistics file from `detect`");
    std::vector<double> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto first = line.find(',');
        const auto second = line.find(',', first + 1);
        if (first == std::string::npos) throw ddad::IoError("malformed statistics line in '" + path + "'");
        try {
            out.push_back(std::stod(line.substr(first + 1, second - first - 1)));
        } catch (const std::exception&) {
            throw ddad::IoError("malformed statistics line in '" + path + "'");
        }
    }
    return out;
}

int cmd_roc(const Globals& g, const RocArgs& a) {
    const auto nominal = read_statistics(a.nominal);
    const auto attacked = read_statistics(a.attacked);
    ddad::MethodResult r;
    r.method = ddad::covariance_method_from_string(a.method);
    r.N = a.N;
    r.T = a.T;
    r.L = a.L;
    r.roc = ddad::roc_curve(nominal, attacked, ddad::quantile_thresholds(nominal, attacked, static_cast<std::size_t>(a.points)));
    r.auc = ddad::auc(r.roc);
    r.trials = 1;
    const fs::path out = fs::path(g.out_dir) / (a.name + ".csv");
    ddad::io::write_text(out, ddad::io::roc_csv({r}));
    std::cout << "AUC " << fmt(r.auc) << " over " << nominal.size() << " nominal and " << attacked.size()
              << " attacked statistics\nwrote " << out.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
    std::string system;
    ddad::BoundStudyConfig study;
};

void print_bound_row(const ddad::BoundRow& row, std::ostream& os) {
    std::string flags = row.report.applicable ? "" : "not-applicable";
    if (!row.report.note.empty() && (!row.report.applicable || row.report.confidence == 0.0)) {
        flags += (flags.empty() ? "" : "; ") + row.report.note;
    }
    os << std::left << std::setw(15) << row.name << std::right << std::setw(14) << fmt(row.report.bound)
       << std::setw(12) << fmt(row.report.confidence) << std::setw(14) << fmt(row.median_error) << std::setw(12)
       << fmt(row.exceedance) << std::setw(7) << row.evaluated << "  " << flags << "\n";
}

json bound_row_json(const ddad::BoundRow& row) {
    json doc = ddad::io::bound_report_to_json(row.report);
    doc["median_error"] = row.median_error;
    doc["exceedance"] = row.exceedance;
    doc["evaluated"] = row.evaluated;
    return doc;
}

int cmd_bounds(const Globals& g, BoundsArgs a) {
    const ddad::LtiSystem sys =
        a.system.empty() ? ddad::random_stable_system(3, 1, 1, g.seed) : ddad::io::load_system(a.system);
    a.study.seed = g.seed;
    const ddad::BoundStudyResult res = ddad::run_bound_study(sys, a.study);

    std::cout << std::left << std::setw(15) << "bound" << std::right << std::setw(14) << "value" << std::setw(12)
              << "confidence" << std::setw(14) << "median error" << std::setw(12) << "exceedance" << std::setw(7)
              << "runs" << "  flags\n";
    for (const auto* row : {&res.direct, &res.ols, &res.sensitivity_P, &res.sensitivity_F, &res.indirect}) {
        print_bound_row(*row, std::cout);
    }
    std::cout << "indirect model bias ||S_model - S||/||S||: " << fmt(res.indirect_bias) << "\n"
              << "median ||S - S^id||: " << fmt(res.median_oracle_error) << "\n"
              << "identification failures: " << res.indirect_failures << "/" << a.study.runs << "\n";
    if (a.study.calibrate_k) {
        std::cout << "smallest k covering " << fmt(1.0 - a.study.ols_theta) << " of runs: " << fmt(res.calibrated_k) << "\n";
    }

    json doc;
    doc["config"] = {{"T", a.study.T},         {"L", a.study.L},   {"N", a.study.N},
                     {"theta", a.study.theta}, {"ols_theta", a.study.ols_theta},
                     {"k", a.study.k},         {"runs", a.study.runs}, {"seed", g.seed}};
    doc["direct"] = bound_row_json(res.direct);
    doc["ols"] = bound_row_json(res.ols);
    doc["sensitivity_P"] = bound_row_json(res.sensitivity_P);
    doc["sensitivity_F"] = bound_row_json(res.sensitivity_F);
    doc["indirect"] = bound_row_json(res.indirect);
    doc["indirect_bias"] = res.indirect_bias;
    doc["median_oracle_error"] = res.median_oracle_error;
    doc["indirect_failures"] = res.indirect_failures;
    doc["sensitivity_P_precondition_met"] = res.sensitivity_P_precondition;
    if (a.study.calibrate_k) doc["calibrated_k"] = res.calibrated_k;
    const fs::path out = fs::path(g.out_dir) / "bounds.json";
    ddad::io::write_text(out, doc.dump(2) + "\n");
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

// ------------------------------------------------------------- reproduce

struct ReproduceArgs {
    std::string which;
    int trials = 50;
    int test_samples = 2000;
    std::int64_t system_seed = -1;  // -1: use the master seed
    std::vector<int> N_grid{40, 90, 150, 200};
    double attack_variance = 1.5;
    int L = 3;
    bool include_oracle = false;
};

struct Block {
    std::string label;
    ddad::ComparisonConfig cfg;
    std::string suffix;  // file name suffix
};

void print_regime(const std::string& label, const ddad::ComparisonResult& res, const std::vector<int>& grid) {
    std::cout << label << "\n";
    for (int N : grid) {
        const double d = res.find(ddad::CovarianceMethod::Direct, N).auc;
        const double i = res.find(ddad::CovarianceMethod::Indirect, N).auc;
        std::cout << "  N=" << std::setw(4) << N << "  direct AUC " << fmt(d, 4) << "  indirect AUC " << fmt(i, 4)
                  << "  leader: " << (d >= i ? "direct" : "indirect") << "\n";
    }
}

int cmd_reproduce(const Globals& g, const ReproduceArgs& a) {
    ddad::ComparisonConfig base;
    base.master_seed = g.seed;
    base.system_seed = a.system_seed < 0 ? g.seed : static_cast<std::uint64_t>(a.system_seed);
    base.threads = g.threads;
    base.trials = a.trials;
    base.test_samples = a.test_samples;
    base.N_grid = a.N_grid;
    base.attack_variance = a.attack_variance;
    base.L = a.L;
    base.include_oracle = a.include_oracle;

    std::vector<Block> blocks;
    if (a.which == "comparison1") {
        for (int T : {7, 14}) {
            Block b{"T=" + std::to_string(T) + ", sigma_u = sigma_w = sigma_v = 1", base, ""};
            b.cfg.T = T;
            blocks.push_back(b);
        }
    } else {
        for (double su : {0.5, 2.0}) {
            Block b{"T=7, sigma_u = " + fmt(su) + ", sigma_w = sigma_v = 1", base, "_sigma_u_" + fmt(su)};
            b.cfg.noise.sigma_u = su;
            blocks.push_back(b);
        }
    }

    const fs::path dir(g.out_dir);
    json run;
    run["experiment"] = a.which;
    run["master_seed"] = base.master_seed;
    run["system_seed"] = base.system_seed;
    run["trials"] = base.trials;
    run["test_samples"] = base.test_samples;
    run["N_grid"] = base.N_grid;
    run["L"] = base.L;
    run["attack_variance"] = base.attack_variance;
    run["threshold_points"] = base.threshold_points;
    run["blocks"] = json::array();
    for (const Block& b : blocks) {
        run["blocks"].push_back({{"T", b.cfg.T},
                                 {"sigma_u", b.cfg.noise.sigma_u},
                                 {"sigma_w", b.cfg.noise.sigma_w},
                                 {"sigma_v", b.cfg.noise.sigma_v}});
    }
    ddad::io::write_text(dir / "run.json", run.dump(2) + "\n");

    std::optional<ddad::LtiSystem> system;
    std::vector<ddad::MethodResult> combined;
    for (const Block& b : blocks) {
        const ddad::ComparisonResult res = ddad::run_comparison(b.cfg, system);
        if (!system) {
            system = res.system;
            ddad::io::save_system(dir / "system.json", *system);
        }
        print_regime(b.label, res, b.cfg.N_grid);
        // Each block is written as soon as it finishes so an interrupted run keeps completed results.
        if (b.suffix.empty()) {
            combined.insert(combined.end(), res.results.begin(), res.results.end());
            ddad::io::write_text(dir / "roc.csv", ddad::io::roc_csv(combined));
            ddad::io::write_text(dir / "auc.csv", ddad::io::auc_csv(combined));
        } else {
            ddad::io::write_text(dir / ("roc" + b.suffix + ".csv"), ddad::io::roc_csv(res.results));
            ddad::io::write_text(dir / ("auc" + b.suffix + ".csv"), ddad::io::auc_csv(res.results));
        }
    }
    std::cout << "wrote results to " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behavior-based chi-squared attack detection with data-driven covariance estimates"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    Globals g;
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--out-dir", g.out_dir, "Output directory");
    app.add_option("--threads", g.threads, "Worker threads for Monte Carlo loops")->check(CLI::Range(1, 1024));
    app.set_config("--config", "", "JSON run configuration (unknown fields are rejected)");

    SysgenArgs sysgen;
    auto* c_sysgen = app.add_subcommand("sysgen", "Draw a random stable, controllable, observable plant");
    c_sysgen->add_option("--n", sysgen.n, "State dimension")->check(CLI::PositiveNumber);
    c_sysgen->add_option("--m", sysgen.m, "Input dimension")->check(CLI::PositiveNumber);
    c_sysgen->add_option("--p", sysgen.p, "Output dimension")->check(CLI::PositiveNumber);
    c_sysgen->add_option("--out", sysgen.out, "System JSON path (relative paths go under --out-dir)");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Simulate N experiments of horizon T");
    c_sim->add_option("--system", sim.system, "System JSON")->required();
    c_sim->add_option("--N", sim.N, "Number of experiments")->check(CLI::PositiveNumber);
    c_sim->add_option("--T", sim.T, "Horizon")->check(CLI::PositiveNumber);
    c_sim->add_option("--sigma-u", sim.noise.sigma_u, "Input variance")->check(CLI::NonNegativeNumber);
    c_sim->add_option("--sigma-w", sim.noise.sigma_w, "Process noise variance")->check(CLI::NonNegativeNumber);
    c_sim->add_option("--sigma-v", sim.noise.sigma_v, "Measurement noise variance")->check(CLI::NonNegativeNumber);
    c_sim->add_option("--attack-variance", sim.attack_variance, "Gaussian injection variance (0: nominal)")->check(CLI::NonNegativeNumber);
    c_sim->add_option("--name", sim.name, "Output file stem");

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Estimate the behavior covariance from a dataset");
    c_est->add_option("--data", est.data, "Experiment CSV")->required();
    c_est->add_option("--meta", est.meta, "Experiment JSON sidecar (default: CSV path with .json)");
    c_est->add_option("--method", est.method, "direct | indirect")->check(CLI::IsMember({"direct", "indirect"}));
    c_est->add_option("--L", est.L, "Minor behavior window length")->check(CLI::PositiveNumber);
    c_est->add_option("--name", est.name, "Output file stem");

    DetectArgs det;
    auto* c_det = app.add_subcommand("detect", "Score behaviors with g = z^T S^-1 z");
    c_det->add_option("--covariance", det.covariance, "Covariance CSV")->required();
    c_det->add_option("--data", det.data, "Experiment CSV")->required();
    c_det->add_option("--meta", det.meta, "Experiment JSON sidecar");
    auto* o_lambda = c_det->add_option("--lambda", det.lambda, "Alarm threshold");
    c_det->add_option("--alpha", det.alpha, "Use the chi-squared upper-alpha quantile as threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->excludes(o_lambda);
    c_det->add_option("--pinv-tol", det.pinv_tol, "Relative eigenvalue cutoff for the pseudo-inverse")->check(CLI::Range(0.0, 1.0));
    c_det->add_option("--name", det.name, "Output file stem");

    RocArgs roc;
    auto* c_roc = app.add_subcommand("roc", "ROC curve from nominal and attacked statistics");
    c_roc->add_option("--nominal", roc.nominal, "Statistics CSV from `detect` on nominal data")->required();
    c_roc->add_option("--attacked", roc.attacked, "Statistics CSV from `detect` on attacked data")->required();
    c_roc->add_option("--points", roc.points, "Number of thresholds")->check(CLI::Range(2, 1 << 20));
    c_roc->add_option("--method", roc.method, "Label for the method column")->check(CLI::IsMember({"direct", "indirect", "oracle"}));
    c_roc->add_option("--N", roc.N, "Label for the N column");
    c_roc->add_option("--T", roc.T, "Label for the T column");
    c_roc->add_option("--L", roc.L, "Label for the L column");
    c_roc->add_option("--name", roc.name, "Output file stem");

    BoundsArgs bnd;
    auto* c_bnd = app.add_subcommand("bounds", "Evaluate the error bounds against Monte Carlo errors");
    c_bnd->add_option("--system", bnd.system, "System JSON (default: random 3-state SISO plant from --seed)");
    c_bnd->add_option("--T", bnd.study.T, "Horizon")->check(CLI::Range(2, 1000));
    c_bnd->add_option("--L", bnd.study.L, "Minor behavior window length")->check(CLI::PositiveNumber);
    c_bnd->add_option("--N", bnd.study.N, "Number of experiments")->check(CLI::PositiveNumber);
    c_bnd->add_option("--theta", bnd.study.theta, "Direct bound parameter")->check(CLI::NonNegativeNumber);
    c_bnd->add_option("--ols-theta", bnd.study.ols_theta, "OLS bound failure probability")->check(CLI::Range(0.0, 1.0));
    c_bnd->add_option("--k", bnd.study.k, "OLS bound absolute constant")->check(CLI::PositiveNumber);
    c_bnd->add_option("--runs", bnd.study.runs, "Monte Carlo draws")->check(CLI::PositiveNumber);
    c_bnd->add_option("--sigma-u", bnd.study.noise.sigma_u, "Input variance")->check(CLI::NonNegativeNumber);
    c_bnd->add_option("--sigma-w", bnd.study.noise.sigma_w, "Process noise variance")->check(CLI::NonNegativeNumber);
    c_bnd->add_option("--sigma-v", bnd.study.noise.sigma_v, "Measurement noise variance")->check(CLI::NonNegativeNumber);
    c_bnd->add_flag("--calibrate-k", bnd.study.calibrate_k, "Report the smallest k meeting the OLS confidence");

    ReproduceArgs rep;
    auto* c_rep = app.add_subcommand("reproduce", "Run a direct vs indirect ROC comparison");
    c_rep->add_option("which", rep.which, "comparison1 | comparison2")
        ->required()
        ->check(CLI::IsMember({"comparison1", "comparison2"}));
    c_rep->add_option("--trials", rep.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    c_rep->add_option("--test-samples", rep.test_samples, "Nominal and attacked test behaviors per trial")->check(CLI::PositiveNumber);
    c_rep->add_option("--system-seed", rep.system_seed, "Plant seed (default: --seed)");
    c_rep->add_option("--N-grid", rep.N_grid, "Training set sizes")->check(CLI::PositiveNumber);
    c_rep->add_option("--attack-variance", rep.attack_variance, "Variance of each attack coordinate")->check(CLI::NonNegativeNumber);
    c_rep->add_option("--L", rep.L, "Minor behavior window length")->check(CLI::PositiveNumber);
    c_rep->add_flag("--include-oracle", rep.include_oracle, "Also score the detector built on the exact covariance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*c_sysgen) return cmd_sysgen(g, sysgen);
        if (*c_sim) return cmd_simulate(g, sim);
        if (*c_est) return cmd_estimate(g, est);
        if (*c_det) return cmd_detect(g, det);
        if (*c_roc) return cmd_roc(g, roc);
        if (*c_bnd) return cmd_bounds(g, bnd);
        if (*c_rep) return cmd_reproduce(g, rep);
    } catch (const ddad::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ddad::EstimationError& e) {
        std::cerr << "estimation failed: " << e.what() << "\n";
        return kExitEstimation;
    } catch (const ddad::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitValidation;
}
