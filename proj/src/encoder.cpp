#include "schnapsen/encoder.hpp"

#include <algorithm>

namespace schnapsen {

KnowledgeTag knowledge_tag(Card card, const Perspective& view) {
  if (view.my_hand.contains(card)) return KnowledgeTag::OwnHand;
  if (view.opp_known.contains(card)) return KnowledgeTag::OppKnown;
  if (view.trump_indicator && *view.trump_indicator == card) return KnowledgeTag::TrumpIndicator;
  if (view.won_by_me.contains(card)) return KnowledgeTag::WonByMe;
  if (view.won_by_opp.contains(card)) return KnowledgeTag::WonByOpp;
  return KnowledgeTag::Unseen;
}

FeatureVector encode(const Perspective& view, Move move) {
  FeatureVector f{};

  for (int i = 0; i < kDeckSize; ++i) {
    const auto tag = knowledge_tag(card_from_index(i), view);
    f[i * 6 + static_cast<int>(tag)] = 1.0f;
  }

  if (view.on_table && !view.i_lead) f[120 + view.on_table->index()] = 1.0f;

  f[140] = view.i_lead ? 1.0f : 0.0f;
  f[141] = std::min(1.0f, static_cast<float>(view.my_points) / 66.0f);
  f[142] = std::min(1.0f, static_cast<float>(view.opp_points) / 66.0f);
  f[143] = std::min(1.0f, static_cast<float>(view.my_pending) / 40.0f);
  f[144] = std::min(1.0f, static_cast<float>(view.opp_pending) / 40.0f);
  f[145 + static_cast<int>(view.trump_suit)] = 1.0f;
  f[149] = view.phase == Phase::Two ? 1.0f : 0.0f;
  f[150] = static_cast<float>(view.talon_size) / 10.0f;
  f[151] = move.kind == MoveKind::Marriage ? 1.0f : 0.0f;
  f[152] = move.kind == MoveKind::TrumpExchange ? 1.0f : 0.0f;
  f[153 + move.card.index()] = 1.0f;

  return f;
}

}  // namespace schnapsen
