#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace clf::heads {

/// Raw prediction-head planes over an s2 x s1 BEV grid (s1 columns, s2 rows,
/// row-major). embed holds embed_dim planes, plane-major. The .bevout fixture
/// format stores these planes bit-exactly as float32.
struct HeadOutput {
  std::uint32_t s1 = 0;         // columns
  std::uint32_t s2 = 0;         // rows
  std::uint32_t embed_dim = 0;  // N_e
  std::vector<float> conf;              // s2*s1, in [0,1]
  std::vector<float> embed;             // embed_dim * s2*s1
  std::vector<float> x_offset_logits;   // s2*s1, pre-sigmoid
  std::vector<float> height;            // s2*s1, meters

  std::size_t plane_size() const { return static_cast<std::size_t>(s1) * s2; }
  void validate() const;
};

// .bevout: "BVO1", u32le s1, s2, embed_dim, then float32le planes:
// conf, embed (plane-major), x_offset_logits, height.
std::string serialize_bevout(const HeadOutput& out);
HeadOutput parse_bevout(std::string_view bytes);

}  // namespace clf::heads
