#pragma once

#include <span>
#include <vector>

namespace designflow {

/// Unit-norm feature vector. Construction normalizes; zero or non-finite
/// input is rejected with Errc::invalid_argument.
class EmbeddingVector {
public:
    explicit EmbeddingVector(std::vector<double> values);

    std::size_t dims() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

private:
    std::vector<double> values_;
};

}  // namespace designflow
