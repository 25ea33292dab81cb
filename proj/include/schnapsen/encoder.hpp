#pragma once

#include <array>
#include <cstdint>

#include "schnapsen/engine.hpp"

namespace schnapsen {

// Layout: 20 cards x 6 knowledge states, opponent's on-table card (20),
// lead flag, four score scalars, trump suit (4), phase flag, talon scalar,
// two move-kind flags, move card (20) = 173.
inline constexpr int kNumFeatures = 173;

// Bumped whenever the layout changes; checkpoints and datasets record it so
// stale files are rejected on load.
inline constexpr uint16_t kEncoderVersion = 1;

using FeatureVector = std::array<float, kNumFeatures>;

// What the viewing player knows about one card's location.
enum class KnowledgeTag : uint8_t {
  Unseen = 0,
  OwnHand,
  OppKnown,
  TrumpIndicator,
  WonByMe,
  WonByOpp,
};

// Exactly one tag per card. A card on the table keeps its pre-play tag
// (normally Unseen); the on-table feature block carries its location.
KnowledgeTag knowledge_tag(Card card, const Perspective& view);

// Feature vector for considering `move` from `view`. Pure; every component
// lies in [0, 1].
FeatureVector encode(const Perspective& view, Move move);

}  // namespace schnapsen
