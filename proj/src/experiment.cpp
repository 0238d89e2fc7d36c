#include "ddad/experiment.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "ddad/behavior.hpp"
#include "ddad/error.hpp"
#include "ddad/estimation.hpp"

namespace ddad {
namespace {

std::vector<Vector> test_behaviors(const LtiSystem& sys, const ComparisonConfig& cfg, std::uint64_t trial,
                                   StreamRole role, const AttackSpec& attack) {
    Rng rng(derive_seed(cfg.master_seed, {trial, static_cast<std::uint64_t>(role)}));
    std::vector<Vector> out;
    out.reserve(cfg.test_samples);
    for (int i = 0; i < cfg.test_samples; ++i) {
        out.push_back(stack_behavior(simulate(sys, cfg.noise, attack, cfg.T, rng)).z);
    }
    return out;
}

void score(const Matrix& S_inv, const std::vector<Vector>& behaviors, std::vector<double>& out) {
    for (const Vector& z : behaviors) out.push_back(chi2_statistic(z, S_inv).g);
}

struct Pool {
    std::vector<double> nominal;
    std::vector<double> attacked;
};

struct TrialOutput {
    // [method][N index]
    std::vector<std::vector<Pool>> pools;
    std::vector<int> failures;  // per N index
};

std::vector<CovarianceMethod> methods_of(const ComparisonConfig& cfg) {
    std::vector<CovarianceMethod> out{CovarianceMethod::Direct, CovarianceMethod::Indirect};
    if (cfg.include_oracle) out.push_back(CovarianceMethod::Oracle);
    return out;
}

TrialOutput run_trial(const LtiSystem& sys, const ComparisonConfig& cfg, const Matrix& oracle_inv,
                      std::uint64_t trial) {
    const auto methods = methods_of(cfg);
    const auto nominal = test_behaviors(sys, cfg, trial, StreamRole::TestNominal, NoAttack{});
    const auto attacked = test_behaviors(sys, cfg, trial, StreamRole::TestAttack, GaussianInjection{cfg.attack_variance});

    TrialOutput out;
    out.pools.assign(methods.size(), std::vector<Pool>(cfg.N_grid.size()));
    out.failures.assign(cfg.N_grid.size(), 0);

    for (std::size_t k = 0; k < cfg.N_grid.size(); ++k) {
        const int N = cfg.N_grid[k];
        std::vector<Matrix> inverses;
        for (int attempt = 0;; ++attempt) {
            if (attempt > cfg.max_resamples) {
                throw EstimationError(EstimationFailure::InsufficientData,
                                      "estimation failed " + std::to_string(attempt) + " times at N=" + std::to_string(N));
            }
            const auto train = generate_experiments(
                sys, cfg.noise, N, cfg.T,
                derive_seed(cfg.master_seed, {trial, static_cast<std::uint64_t>(StreamRole::Train),
                                              static_cast<std::uint64_t>(attempt)}));
            try {
                inverses.clear();
                for (CovarianceMethod method : methods) {
                    switch (method) {
                        case CovarianceMethod::Direct:
                            inverses.push_back(invert_covariance(direct_covariance(train).S, cfg.pinv_tol).matrix);
                            break;
                        case CovarianceMethod::Indirect:
                            inverses.push_back(invert_covariance(indirect_covariance(train, cfg.L).estimate.S, cfg.pinv_tol).matrix);
                            break;
                        case CovarianceMethod::Oracle:
                            inverses.push_back(oracle_inv);
                            break;
                    }
                }
                break;
            } catch (const EstimationError&) {
                ++out.failures[k];
            }
        }
        for (std::size_t j = 0; j < methods.size(); ++j) {
            Pool& pool = out.pools[j][k];
            pool.nominal.reserve(nominal.size());
            pool.attacked.reserve(attacked.size());
            score(inverses[j], nominal, pool.nominal);
            score(inverses[j], attacked, pool.attacked);
        }
    }
    return out;
}

}  // namespace

void ComparisonConfig::validate() const {
    if (n < 1 || m < 1 || p < 1) throw InvalidArgument("n, m, p must all be >= 1");
    if (T < 2) throw InvalidArgument("T must be >= 2");
    if (L < 1 || L >= T) throw InvalidArgument("L must satisfy 1 <= L < T");
    if (N_grid.empty()) throw InvalidArgument("N grid must be nonempty");
    for (int N : N_grid) {
        if (N < 1) throw InvalidArgument("every N in the grid must be >= 1");
    }
    noise.validate();
    if (!(attack_variance >= 0.0)) throw InvalidArgument("attack variance must be >= 0");
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (test_samples < 1) throw InvalidArgument("test_samples must be >= 1");
    if (threshold_points < 2) throw InvalidArgument("threshold_points must be >= 2");
    if (!(pinv_tol > 0.0 && pinv_tol < 1.0)) throw InvalidArgument("pinv_tol must lie in (0, 1)");
    if (max_resamples < 0) throw InvalidArgument("max_resamples must be >= 0");
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
}

const MethodResult& ComparisonResult::find(CovarianceMethod method, int N) const {
    for (const MethodResult& r : results) {
        if (r.method == method && r.N == N) return r;
    }
    throw InvalidArgument("no result for method " + std::string(to_string(method)) + " at N=" + std::to_string(N));
}

ComparisonResult run_comparison(const ComparisonConfig& cfg, const std::optional<LtiSystem>& system) {
    cfg.validate();
    ComparisonResult result;
    result.system = system ? *system : random_stable_system(cfg.n, cfg.m, cfg.p, cfg.system_seed);
    const LtiSystem& sys = result.system;
    if (sys.n() != cfg.n || sys.m() != cfg.m || sys.p() != cfg.p) {
        throw InvalidArgument("system dimensions disagree with the configuration");
    }
    const Matrix oracle_inv = invert_covariance(true_behavior_covariance(sys, cfg.noise, cfg.T).S, cfg.pinv_tol).matrix;

    std::vector<TrialOutput> trials(cfg.trials);
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int t = next++; t < cfg.trials; t = next++) {
            try {
                trials[t] = run_trial(sys, cfg, oracle_inv, static_cast<std::uint64_t>(t));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (cfg.threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < cfg.threads; ++i) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    const auto methods = methods_of(cfg);
    for (std::size_t j = 0; j < methods.size(); ++j) {
        for (std::size_t k = 0; k < cfg.N_grid.size(); ++k) {
            std::vector<double> nominal, attacked;
            int failures = 0;
            for (const TrialOutput& tr : trials) {
                const Pool& pool = tr.pools[j][k];
                nominal.insert(nominal.end(), pool.nominal.begin(), pool.nominal.end());
                attacked.insert(attacked.end(), pool.attacked.begin(), pool.attacked.end());
                failures += tr.failures[k];
            }
            MethodResult r;
            r.method = methods[j];
            r.N = cfg.N_grid[k];
            r.T = cfg.T;
            r.L = cfg.L;
            r.roc = roc_curve(nominal, attacked, quantile_thresholds(nominal, attacked, cfg.threshold_points));
            r.auc = auc(r.roc);
            r.trials = cfg.trials;
            r.failures = failures;
            result.results.push_back(std::move(r));
        }
    }
    return result;
}

}  // namespace ddad
