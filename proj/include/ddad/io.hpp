// JSON / CSV persistence for systems, datasets, covariance estimates,
// ROC tables and bound reports.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddad/bounds.hpp"
#include "ddad/experiment.hpp"
#include "ddad/system_sim.hpp"
#include "ddad/types.hpp"

namespace ddad::io {

using json = nlohmann::ordered_json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

// {n, m, p, A, B, C, Ba, Ga, seed}; matrices are flat row-major arrays.
json system_to_json(const LtiSystem& sys);
LtiSystem system_from_json(const json& doc);
void save_system(const std::filesystem::path& path, const LtiSystem& sys);
LtiSystem load_system(const std::filesystem::path& path);

// CSV columns traj_id,t,u_0..u_{m-1},y_1..y_p where row t carries u_t and
// y_{t+1}; the JSON sidecar carries N, T, m, p, noise, seed and fingerprint.
std::string experiments_to_csv(const ExperimentSet& data);
json experiments_metadata(const ExperimentSet& data);
ExperimentSet experiments_from_csv(const std::string& csv, const json& metadata);
void save_experiments(const std::filesystem::path& csv_path, const std::filesystem::path& json_path,
                      const ExperimentSet& data);
ExperimentSet load_experiments(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);

/// Row-major, comma separated, no header.
std::string matrix_to_csv(const Matrix& M);
Matrix matrix_from_csv(const std::string& csv);
void save_matrix(const std::filesystem::path& path, const Matrix& M);
Matrix load_matrix(const std::filesystem::path& path);

json covariance_metadata(const CovarianceEstimate& est, std::uint64_t seed);
CovarianceEstimate covariance_from_files(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);

/// method,N,T,L,lambda,fpr,tpr
std::string roc_csv(const std::vector<MethodResult>& results);
/// method,N,T,auc,trials,failures
std::string auc_csv(const std::vector<MethodResult>& results);

json bound_report_to_json(const BoundReport& rep);

}  // namespace ddad::io
