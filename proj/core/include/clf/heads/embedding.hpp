#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "clf/errors.hpp"

namespace clf::heads {

/// Per-element (pixel or BEV cell) embedding vectors with a companion
/// instance-ID field; instance 0 is background. Element i's embedding lives
/// at embeddings[i*dim .. i*dim+dim).
struct EmbeddingField {
  int dim = 0;
  std::vector<double> embeddings;
  std::vector<std::uint32_t> instance;

  std::size_t size() const { return instance.size(); }

  Eigen::Map<const Eigen::VectorXd> embedding(std::size_t i) const {
    return {embeddings.data() + i * static_cast<std::size_t>(dim), dim};
  }

  void validate() const {
    if (dim <= 0) raise(ErrorCode::invalid_argument, "embedding dimension must be positive");
    if (embeddings.size() != instance.size() * static_cast<std::size_t>(dim)) {
      raise(ErrorCode::shape_mismatch, "embedding buffer size does not match instance field");
    }
  }

  /// Distinct foreground instance ids, ascending.
  std::vector<std::uint32_t> instance_ids() const;
};

}  // namespace clf::heads
