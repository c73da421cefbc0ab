#pragma once

#include <cstdint>
#include <vector>

namespace clf::labelgen {

/// Train-set frame sampling: the sequence is split into consecutive windows
/// of `window` frames (the remainder at the end forms a final, shorter
/// window) and one frame is drawn uniformly per window. Deterministic given
/// the seed.
std::vector<std::size_t> sample_train_frames(std::size_t n_frames, std::size_t window,
                                             std::uint64_t seed);

}  // namespace clf::labelgen
