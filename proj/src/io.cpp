#include "ddad/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ddad/error.hpp"

namespace ddad::io {
namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    while (begin != end && *begin == ' ') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) throw IoError("malformed number '" + text + "'");
    return v;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

json matrix_to_flat(const Matrix& M) {
    json arr = json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) arr.push_back(M(i, j));
    }
    return arr;
}

Matrix flat_to_matrix(const json& arr, Index rows, Index cols, const char* name) {
    if (!arr.is_array() || static_cast<Index>(arr.size()) != rows * cols) {
        throw InvalidArgument(std::string("field '") + name + "' must be a flat array of " +
                              std::to_string(rows * cols) + " numbers");
    }
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) M(i, j) = arr.at(i * cols + j).get<double>();
    }
    return M;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw IoError("could not format number");
    return std::string(buf, ptr);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json system_to_json(const LtiSystem& sys) {
    json doc;
    doc["n"] = sys.n();
    doc["m"] = sys.m();
    doc["p"] = sys.p();
    doc["A"] = matrix_to_flat(sys.A);
    doc["B"] = matrix_to_flat(sys.B);
    doc["C"] = matrix_to_flat(sys.C);
    doc["Ba"] = matrix_to_flat(sys.Ba);
    doc["Ga"] = matrix_to_flat(sys.Ga);
    doc["seed"] = sys.seed;
    return doc;
}

LtiSystem system_from_json(const json& doc) {
    try {
        const Index n = doc.at("n").get<int>(), m = doc.at("m").get<int>(), p = doc.at("p").get<int>();
        if (n < 1 || m < 1 || p < 1) throw InvalidArgument("n, m, p must all be >= 1");
        Matrix Ba = doc.contains("Ba") ? flat_to_matrix(doc["Ba"], n, m, "Ba") : Matrix();
        Matrix Ga = doc.contains("Ga") ? flat_to_matrix(doc["Ga"], p, p, "Ga") : Matrix();
        return LtiSystem::make(flat_to_matrix(doc.at("A"), n, n, "A"), flat_to_matrix(doc.at("B"), n, m, "B"),
                               flat_to_matrix(doc.at("C"), p, n, "C"),
                               doc.contains("Ba") ? std::optional<Matrix>(std::move(Ba)) : std::nullopt,
                               doc.contains("Ga") ? std::optional<Matrix>(std::move(Ga)) : std::nullopt,
                               doc.value("seed", std::uint64_t{0}));
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed system document: ") + e.what());
    }
}

void save_system(const std::filesystem::path& path, const LtiSystem& sys) {
    write_text(path, system_to_json(sys).dump(2) + "\n");
}

LtiSystem load_system(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return system_from_json(doc);
}

std::string experiments_to_csv(const ExperimentSet& data) {
    data.validate();
    const int m = data.m(), p = data.p();
    std::ostringstream os;
    os << "traj_id,t";
    for (int c = 0; c < m; ++c) os << ",u_" << c;
    for (int c = 1; c <= p; ++c) os << ",y_" << c;
    os << '\n';
    for (int i = 0; i < data.size(); ++i) {
        const Trajectory& tr = data.trajectories[i];
        for (int t = 0; t < tr.horizon(); ++t) {
            os << i << ',' << t;
            for (int c = 0; c < m; ++c) os << ',' << format_double(tr.inputs(t, c));
            for (int c = 0; c < p; ++c) os << ',' << format_double(tr.outputs(t, c));
            os << '\n';
        }
    }
    return os.str();
}

json experiments_metadata(const ExperimentSet& data) {
    data.validate();
    json meta;
    meta["N"] = data.size();
    meta["T"] = data.horizon();
    meta["m"] = data.m();
    meta["p"] = data.p();
    meta["master_seed"] = data.master_seed;
    meta["system_fingerprint"] = data.system_fingerprint;
    meta["noise"] = {{"sigma_u", data.noise.sigma_u}, {"sigma_w", data.noise.sigma_w}, {"sigma_v", data.noise.sigma_v}};
    meta["row_convention"] = "row t holds u_t and y_{t+1}";
    return meta;
}

ExperimentSet experiments_from_csv(const std::string& csv, const json& metadata) {
    ExperimentSet data;
    int N = 0, T = 0, m = 0, p = 0;
    try {
        N = metadata.at("N").get<int>();
        T = metadata.at("T").get<int>();
        m = metadata.at("m").get<int>();
        p = metadata.at("p").get<int>();
        data.master_seed = metadata.value("master_seed", std::uint64_t{0});
        data.system_fingerprint = metadata.value("system_fingerprint", std::string());
        if (metadata.contains("noise")) {
            const auto& nz = metadata["noise"];
            data.noise = {nz.at("sigma_u").get<double>(), nz.at("sigma_w").get<double>(), nz.at("sigma_v").get<double>()};
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed experiment metadata: ") + e.what());
    }
    if (N < 1 || T < 1 || m < 1 || p < 1) throw IoError("experiment metadata has nonpositive sizes");

    const auto lines = lines_of(csv);
    if (lines.size() != static_cast<std::size_t>(N) * T + 1) {
        throw IoError("experiment CSV has " + std::to_string(lines.size()) + " lines, expected " +
                      std::to_string(static_cast<std::size_t>(N) * T + 1));
    }
    if (split(lines[0]).size() != static_cast<std::size_t>(2 + m + p)) throw IoError("experiment CSV header has the wrong width");

    data.trajectories.assign(N, Trajectory{Matrix(T, m), Matrix(T, p)});
    std::vector<int> seen(static_cast<std::size_t>(N) * T, 0);
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto cells = split(lines[l]);
        if (cells.size() != static_cast<std::size_t>(2 + m + p)) throw IoError("experiment CSV line " + std::to_string(l + 1) + " has the wrong width");
        const auto i = static_cast<int>(parse_double(cells[0]));
        const auto t = static_cast<int>(parse_double(cells[1]));
        if (i < 0 || i >= N || t < 0 || t >= T) throw IoError("experiment CSV index out of range on line " + std::to_string(l + 1));
        ++seen[static_cast<std::size_t>(i) * T + t];
        for (int c = 0; c < m; ++c) data.trajectories[i].inputs(t, c) = parse_double(cells[2 + c]);
        for (int c = 0; c < p; ++c) data.trajectories[i].outputs(t, c) = parse_double(cells[2 + m + c]);
    }
    for (int s : seen) {
        if (s != 1) throw IoError("experiment CSV does not cover every (traj_id, t) exactly once");
    }
    return data;
}

void save_experiments(const std::filesystem::path& csv_path, const std::filesystem::path& json_path,
                      const ExperimentSet& data) {
    write_text(csv_path, experiments_to_csv(data));
    write_text(json_path, experiments_metadata(data).dump(2) + "\n");
}

ExperimentSet load_experiments(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
    json meta;
    try {
        meta = json::parse(read_text(json_path));
    } catch (const json::parse_error& e) {
        throw IoError("'" + json_path.string() + "' is not valid JSON: " + e.what());
    }
    return experiments_from_csv(read_text(csv_path), meta);
}

std::string matrix_to_csv(const Matrix& M) {
    std::ostringstream os;
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j) os << ',';
            os << format_double(M(i, j));
        }
        os << '\n';
    }
    return os.str();
}

Matrix matrix_from_csv(const std::string& csv) {
    const auto lines = lines_of(csv);
    if (lines.empty()) throw IoError("matrix CSV is empty");
    const auto width = split(lines[0]).size();
    Matrix M(static_cast<Index>(lines.size()), static_cast<Index>(width));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto cells = split(lines[i]);
        if (cells.size() != width) throw IoError("matrix CSV is ragged");
        for (std::size_t j = 0; j < width; ++j) M(static_cast<Index>(i), static_cast<Index>(j)) = parse_double(cells[j]);
    }
    return M;
}

void save_matrix(const std::filesystem::path& path, const Matrix& M) { write_text(path, matrix_to_csv(M)); }

Matrix load_matrix(const std::filesystem::path& path) { return matrix_from_csv(read_text(path)); }

json covariance_metadata(const CovarianceEstimate& est, std::uint64_t seed) {
    json meta;
    meta["method"] = std::string(to_string(est.method));
    meta["N"] = est.N;
    meta["T"] = est.T;
    meta["L"] = est.L ? json(*est.L) : json(nullptr);
    meta["seed"] = seed;
    meta["dim"] = est.dim();
    meta["noise"] = {{"sigma_u", est.noise.sigma_u}, {"sigma_w", est.noise.sigma_w}, {"sigma_v", est.noise.sigma_v}};
    meta["clipped"] = est.clipped;
    return meta;
}

CovarianceEstimate covariance_from_files(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
    CovarianceEstimate est;
    est.S = load_matrix(csv_path);
    if (est.S.rows() != est.S.cols()) throw IoError("covariance CSV is not square");
    try {
        const json meta = json::parse(read_text(json_path));
        est.method = covariance_method_from_string(meta.at("method").get<std::string>());
        est.N = meta.value("N", 0);
        est.T = meta.at("T").get<int>();
        if (meta.contains("L") && !meta["L"].is_null()) est.L = meta["L"].get<int>();
        if (meta.contains("noise")) {
            const auto& nz = meta["noise"];
            est.noise = {nz.at("sigma_u").get<double>(), nz.at("sigma_w").get<double>(), nz.at("sigma_v").get<double>()};
        }
        est.clipped = meta.value("clipped", false);
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed covariance metadata: ") + e.what());
    }
    return est;
}

std::string roc_csv(const std::vector<MethodResult>& results) {
    std::ostringstream os;
    os << "method,N,T,L,lambda,fpr,tpr\n";
    for (const MethodResult& r : results) {
        for (const RocPoint& pt : r.roc) {
            os << to_string(r.method) << ',' << r.N << ',' << r.T << ',' << r.L << ',' << format_double(pt.lambda)
               << ',' << format_double(pt.fpr) << ',' << format_double(pt.tpr) << '\n';
        }
    }
    return os.str();
}

std::string auc_csv(const std::vector<MethodResult>& results) {
    std::ostringstream os;
    os << "method,N,T,auc,trials,failures\n";
    for (const MethodResult& r : results) {
        os << to_string(r.method) << ',' << r.N << ',' << r.T << ',' << format_double(r.auc) << ',' << r.trials
           << ',' << r.failures << '\n';
    }
    return os.str();
}

json bound_report_to_json(const BoundReport& rep) {
    json doc;
    doc["bound"] = rep.bound;
    doc["confidence"] = rep.confidence;
    doc["applicable"] = rep.applicable;
    doc["note"] = rep.note;
    json inputs = json::object();
    for (const auto& [k, v] : rep.inputs) inputs[k] = v;
    doc["inputs"] = inputs;
    return doc;
}

}  // namespace ddad::io
