#include "clf/labelgen/sampler.hpp"

#include <random>

#include "clf/errors.hpp"

namespace clf::labelgen {

std::vector<std::size_t> sample_train_frames(std::size_t n_frames, std::size_t window,
                                             std::uint64_t seed) {
  if (window == 0) raise(ErrorCode::invalid_argument, "window size must be positive");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> picks;
  picks.reserve(n_frames / window + 1);
  for (std::size_t lo = 0; lo < n_frames; lo += window) {
    const std::size_t hi = std::min(lo + window, n_frames);
    // Plain modulo draw: bias is irrelevant here and it keeps the selection
    // reproducible across standard library implementations.
    picks.push_back(lo + static_cast<std::size_t>(rng() % (hi - lo)));
  }
  return picks;
}

}  // namespace clf::labelgen
