#include "clf/heads/head_output.hpp"

#include <cmath>
#include <cstring>

#include "clf/errors.hpp"

namespace clf::heads {

namespace {
constexpr char kMagic[4] = {'B', 'V', 'O', '1'};

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f32_block(std::string& out, const std::vector<float>& block) {
  static_assert(sizeof(float) == 4);
  const auto old = out.size();
  out.resize(old + block.size() * 4);
  std::memcpy(out.data() + old, block.data(), block.size() * 4);
}

std::vector<float> read_f32_block(const unsigned char* p, std::size_t count) {
  std::vector<float> block(count);
  std::memcpy(block.data(), p, count * 4);
  return block;
}
}  // namespace

void HeadOutput::validate() const {
  if (s1 == 0 || s2 == 0 || embed_dim == 0) {
    raise(ErrorCode::invalid_argument, "head output dimensions must be positive");
  }
  const std::size_t n = plane_size();
  if (conf.size() != n || x_offset_logits.size() != n || height.size() != n ||
      embed.size() != n * embed_dim) {
    raise(ErrorCode::shape_mismatch, "head output plane sizes do not match the header");
  }
  for (const float c : conf) {
    if (!(c >= 0.0f && c <= 1.0f)) {
      raise(ErrorCode::invalid_argument, "confidence values must lie in [0,1]");
    }
  }
}

std::string serialize_bevout(const HeadOutput& out) {
  out.validate();
  std::string bytes;
  bytes.reserve(16 + 4 * (out.plane_size() * (3 + out.embed_dim)));
  bytes.append(kMagic, 4);
  append_u32le(bytes, out.s1);
  append_u32le(bytes, out.s2);
  append_u32le(bytes, out.embed_dim);
  append_f32_block(bytes, out.conf);
  append_f32_block(bytes, out.embed);
  append_f32_block(bytes, out.x_offset_logits);
  append_f32_block(bytes, out.height);
  return bytes;
}

HeadOutput parse_bevout(std::string_view bytes) {
  if (bytes.size() < 16) raise(ErrorCode::schema, "bevout: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    raise(ErrorCode::schema, "bevout: bad magic, expected 'BVO1'");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  HeadOutput out;
  out.s1 = read_u32le(p + 4);
  out.s2 = read_u32le(p + 8);
  out.embed_dim = read_u32le(p + 12);
  if (out.s1 == 0 || out.s2 == 0 || out.embed_dim == 0) {
    raise(ErrorCode::schema, "bevout: zero dimension in header");
  }
  const std::uint64_t n = static_cast<std::uint64_t>(out.s1) * out.s2;
  const std::uint64_t expected = 16 + 4 * n * (3 + static_cast<std::uint64_t>(out.embed_dim));
  if (bytes.size() != expected) {
    raise(ErrorCode::schema, "bevout: size " + std::to_string(bytes.size()) + " != expected " +
                                 std::to_string(expected));
  }
  const unsigned char* cursor = p + 16;
  out.conf = read_f32_block(cursor, n);
  cursor += 4 * n;
  out.embed = read_f32_block(cursor, n * out.embed_dim);
  cursor += 4 * n * out.embed_dim;
  out.x_offset_logits = read_f32_block(cursor, n);
  cursor += 4 * n;
  out.height = read_f32_block(cursor, n);
  try {
    out.validate();
  } catch (const Error& e) {
    raise(ErrorCode::schema, std::string("bevout: ") + e.what());
  }
  return out;
}

}  // namespace clf::heads
