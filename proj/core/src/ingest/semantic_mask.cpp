#include "clf/ingest/semantic_mask.hpp"

#include <cmath>
#include <string>

#include "clf/errors.hpp"

namespace clf::ingest {

SemanticMask::SemanticMask(std::uint32_t width, std::uint32_t height,
                           std::vector<std::uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width_ == 0 || height_ == 0) {
    raise(ErrorCode::invalid_argument, "mask dimensions must be positive");
  }
  if (labels_.size() != static_cast<std::size_t>(width_) * height_) {
    raise(ErrorCode::invalid_argument,
          "mask payload size " + std::to_string(labels_.size()) + " != " +
              std::to_string(width_) + "x" + std::to_string(height_));
  }
}

SemanticMask::SemanticMask(std::uint32_t width, std::uint32_t height, std::uint8_t fill)
    : SemanticMask(width, height,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, fill)) {}

std::uint8_t SemanticMask::class_at_pixel(double u, double v) const {
  const long long x = std::llround(u);
  const long long y = std::llround(v);
  if (x < 0 || y < 0 || x >= static_cast<long long>(width_) ||
      y >= static_cast<long long>(height_)) {
    raise(ErrorCode::out_of_range,
          "pixel (" + std::to_string(u) + ", " + std::to_string(v) +
              ") rounds outside the mask; upstream filtering should have dropped it");
  }
  return at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y));
}

}  // namespace clf::ingest
