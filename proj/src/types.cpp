#include "ddad/types.hpp"

#include <cmath>
#include <string>

#include "ddad/error.hpp"

namespace ddad {

void NoiseSpec::validate() const {
    for (double s : {sigma_u, sigma_w, sigma_v}) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw InvalidArgument("noise scales must be finite and nonnegative");
        }
    }
}

std::string_view to_string(CovarianceMethod method) {
    switch (method) {
        case CovarianceMethod::Direct: return "direct";
        case CovarianceMethod::Indirect: return "indirect";
        case CovarianceMethod::Oracle: return "oracle";
    }
    return "unknown";
}

CovarianceMethod covariance_method_from_string(std::string_view name) {
    if (name == "direct") return CovarianceMethod::Direct;
    if (name == "indirect") return CovarianceMethod::Indirect;
    if (name == "oracle") return CovarianceMethod::Oracle;
    throw InvalidArgument("unknown covariance method '" + std::string(name) + "'");
}

}  // namespace ddad
