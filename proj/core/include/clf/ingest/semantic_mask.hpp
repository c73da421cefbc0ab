#pragma once

#include <cstdint>
#include <vector>

namespace clf::ingest {

/// Per-pixel semantic class raster at label resolution. Class IDs are 0-254;
/// 255 marks unlabeled pixels.
class SemanticMask {
 public:
  static constexpr std::uint8_t kUnlabeled = 255;

  SemanticMask(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> labels);

  /// Uniform mask.
  SemanticMask(std::uint32_t width, std::uint32_t height, std::uint8_t fill);

  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  const std::vector<std::uint8_t>& data() const { return labels_; }

  std::uint8_t at(std::uint32_t x, std::uint32_t y) const {
    return labels_[static_cast<std::size_t>(y) * width_ + x];
  }
  void set(std::uint32_t x, std::uint32_t y, std::uint8_t class_id) {
    labels_[static_cast<std::size_t>(y) * width_ + x] = class_id;
  }

  /// Class under a sub-pixel position, looked up at the nearest integer pixel.
  /// No clamping: out-of-image positions throw OutOfRange, since the caller is
  /// expected to have filtered those already.
  std::uint8_t class_at_pixel(double u, double v) const;

 private:
  std::uint32_t width_, height_;
  std::vector<std::uint8_t> labels_;
};

}  // namespace clf::ingest
