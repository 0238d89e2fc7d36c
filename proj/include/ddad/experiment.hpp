// Monte Carlo comparison of the direct and indirect detectors.
//
// Each trial draws a fresh training set per N (nested: the N = 40 set is a
// prefix of the N = 200 set), estimates S with every method, and scores a
// fresh batch of nominal and attacked test behaviors. Statistics are pooled
// over trials before the ROC is computed.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddad/detection.hpp"
#include "ddad/system_sim.hpp"
#include "ddad/types.hpp"

namespace ddad {

struct ComparisonConfig {
    std::uint64_t system_seed = 1;
    int n = 3;
    int m = 1;
    int p = 1;
    int T = 7;
    int L = 3;
    std::vector<int> N_grid{40, 90, 150, 200};
    NoiseSpec noise;
    double attack_variance = 1.5;  // per coordinate of ua_t and ya_t
    int trials = 50;
    int test_samples = 2000;  // nominal and attacked behaviors per trial
    int threshold_points = 512;
    double pinv_tol = 1e-8;
    bool include_oracle = false;
    int max_resamples = 20;  // per (trial, N)
    std::uint64_t master_seed = 1;
    int threads = 1;

    void validate() const;
};

struct MethodResult {
    CovarianceMethod method = CovarianceMethod::Direct;
    int N = 0;
    int T = 0;
    int L = 0;
    RocCurve roc;
    double auc = 0.0;
    int trials = 0;
    int failures = 0;  // resampled training sets
};

struct ComparisonResult {
    LtiSystem system;
    std::vector<MethodResult> results;

    const MethodResult& find(CovarianceMethod method, int N) const;
};

/// Stream roles for derive_seed(master, {trial, role, ...}).
enum class StreamRole : std::uint64_t { Train = 0, TestNominal = 1, TestAttack = 2 };

/// Uses `system` when given, otherwise random_stable_system(n, m, p, system_seed).
ComparisonResult run_comparison(const ComparisonConfig& cfg, const std::optional<LtiSystem>& system = std::nullopt);

}  // namespace ddad
