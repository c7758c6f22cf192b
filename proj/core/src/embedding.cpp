#include "designflow/embedding.hpp"

#include "designflow/error.hpp"

#include <cmath>

namespace designflow {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw Error(Errc::invalid_argument, "embedding must have at least one dimension");
    }
    double sum_sq = 0.0;
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "embedding has a non-finite value");
        sum_sq += v * v;
    }
    const double norm = std::sqrt(sum_sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(Errc::invalid_argument, "embedding norm must be positive and finite");
    }
    for (double& v : values_) v /= norm;
}

}  // namespace designflow
