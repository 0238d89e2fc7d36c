#include <gtest/gtest.h>

#include "ddad/error.hpp"
#include "ddad/experiment.hpp"

using namespace ddad;

namespace {

ComparisonConfig small_config() {
    ComparisonConfig cfg;
    cfg.trials = 4;
    cfg.test_samples = 300;
    cfg.N_grid = {40, 200};
    cfg.include_oracle = true;
    return cfg;
}

}  // namespace

TEST(Comparison, ResultsCoverEveryMethodAndN) {
    const ComparisonResult res = run_comparison(small_config());
    EXPECT_EQ(res.results.size(), 6u);
    for (int N : {40, 200}) {
        for (auto method : {CovarianceMethod::Direct, CovarianceMethod::Indirect, CovarianceMethod::Oracle}) {
            const MethodResult& r = res.find(method, N);
            EXPECT_EQ(r.trials, 4);
            EXPECT_EQ(r.T, 7);
            EXPECT_EQ(r.roc.size(), 512u);
            EXPECT_GT(r.auc, 0.5);
            EXPECT_LE(r.auc, 1.0);
        }
    }
    EXPECT_THROW(res.find(CovarianceMethod::Direct, 41), InvalidArgument);
}

TEST(Comparison, OracleAucDoesNotDependOnN) {
    const ComparisonResult res = run_comparison(small_config());
    EXPECT_EQ(res.find(CovarianceMethod::Oracle, 40).auc, res.find(CovarianceMethod::Oracle, 200).auc);
}

TEST(Comparison, ThreadCountDoesNotChangeResults) {
    ComparisonConfig one = small_config();
    ComparisonConfig three = small_config();
    three.threads = 3;
    const ComparisonResult a = run_comparison(one);
    const ComparisonResult b = run_comparison(three);
    ASSERT_EQ(a.results.size(), b.results.size());
    for (std::size_t i = 0; i < a.results.size(); ++i) {
        EXPECT_EQ(a.results[i].auc, b.results[i].auc);
        for (std::size_t k = 0; k < a.results[i].roc.size(); ++k) {
            EXPECT_EQ(a.results[i].roc[k].lambda, b.results[i].roc[k].lambda);
        }
    }
}

TEST(Comparison, ConfigValidation) {
    ComparisonConfig cfg = small_config();
    cfg.L = 7;
    EXPECT_THROW(run_comparison(cfg), InvalidArgument);
    cfg = small_config();
    cfg.N_grid = {};
    EXPECT_THROW(run_comparison(cfg), InvalidArgument);
    cfg = small_config();
    cfg.noise.sigma_v = -1;
    EXPECT_THROW(run_comparison(cfg), InvalidArgument);
    cfg = small_config();
    EXPECT_THROW(run_comparison(cfg, random_stable_system(4, 1, 1, 1)), InvalidArgument);
}

TEST(Comparison, DirectAucIsInvariantToInputVariance) {
    // Rescaling u maps every behavior through one invertible linear map, which
    // leaves z^T (S^d)^-1 z unchanged on shared streams.
    ComparisonConfig lo = small_config(), hi = small_config();
    lo.include_oracle = hi.include_oracle = false;
    lo.noise.sigma_u = 0.5;
    hi.noise.sigma_u = 2.0;
    const ComparisonResult a = run_comparison(lo), b = run_comparison(hi);
    for (int N : {40, 200}) {
        EXPECT_NEAR(a.find(CovarianceMethod::Direct, N).auc, b.find(CovarianceMethod::Direct, N).auc, 1e-12);
    }
    EXPECT_NE(a.find(CovarianceMethod::Indirect, 40).auc, b.find(CovarianceMethod::Indirect, 40).auc);
}
