// Monte Carlo comparison of every bound against the error it bounds, for a
// known plant. "True" model quantities for the indirect pipeline are the
// population limits from population_indirect_model.
#pragma once

#include <cstdint>

#include "ddad/bounds.hpp"
#include "ddad/system_sim.hpp"

namespace ddad {

struct BoundStudyConfig {
    NoiseSpec noise;
    int T = 7;
    int L = 3;
    int N = 100;
    double theta = 5.0;       // direct bound
    double ols_theta = 0.1;   // OLS bound, in (0, 1)
    double k = 1.0;           // OLS absolute constant
    int runs = 200;
    bool calibrate_k = false;
    std::uint64_t seed = 1;

    void validate() const;
};

struct BoundRow {
    std::string name;
    BoundReport report;
    double median_error = 0.0;      // median measured error the bound is compared with
    double exceedance = 0.0;        // fraction of runs with error > bound
    int evaluated = 0;              // runs that entered the comparison
};

struct BoundStudyResult {
    BoundRow direct;
    BoundRow ols;
    BoundRow sensitivity_P;   // per-run bound; report.bound holds the median
    BoundRow sensitivity_F;   // per-run bound; report.bound holds the median
    BoundRow indirect;        // measured deltas substituted; compared with the model-implied S
    double indirect_bias = 0.0;            // ||S_model - S|| / ||S||
    double median_oracle_error = 0.0;      // median ||S - S^id||
    int indirect_failures = 0;             // runs where identification failed
    int sensitivity_P_precondition = 0;    // runs where dP and dSigma_eps are both PSD
    double calibrated_k = 0.0;             // 0 unless requested
};

BoundStudyResult run_bound_study(const LtiSystem& sys, const BoundStudyConfig& cfg);

}  // namespace ddad
