#pragma once

#include <cstdint>
#include <vector>

#include "schnapsen/encoder.hpp"

namespace schnapsen {

// One recorded decision: the encoded state-action pair and the binary deal
// outcome from the deciding player's point of view.
struct ReplaySample {
  FeatureVector x{};
  std::uint8_t g = 0;  // 1 when the deciding player won the deal

  bool operator==(const ReplaySample&) const = default;
};

using ReplayDataset = std::vector<ReplaySample>;

}  // namespace schnapsen
