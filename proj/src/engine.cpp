#include "schnapsen/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace schnapsen {

std::string to_string(Move move) {
  switch (move.kind) {
    case MoveKind::PlayCard: return "play " + to_string(move.card);
    case MoveKind::Marriage: return "marriage " + to_string(move.card);
    case MoveKind::TrumpExchange: return "exchange " + to_string(move.card);
  }
  return "?";
}

DealState new_deal(uint64_t seed, int first_leader) {
  Rng rng(seed);
  std::array<Card, kDeckSize> deck;
  for (int i = 0; i < kDeckSize; ++i) deck[i] = card_from_index(i);
  rng.shuffle(deck.begin(), deck.end());

  DealState state;
  state.leader = first_leader;
  const int other = 1 - first_leader;
  for (int i = 0; i < 3; ++i) state.hands[first_leader].add(deck[i]);
  for (int i = 3; i < 6; ++i) state.hands[other].add(deck[i]);
  state.trump_indicator = deck[6];
  state.trump_suit = deck[6].suit;
  for (int i = 7; i < 9; ++i) state.hands[first_leader].add(deck[i]);
  for (int i = 9; i < 11; ++i) state.hands[other].add(deck[i]);
  // Stored so that back() is the next card drawn: deck[11] comes first.
  for (int i = kDeckSize - 1; i >= 11; --i) state.talon.push_back(deck[i]);
  return state;
}

namespace {

Card marriage_partner(Card card) {
  return Card{card.suit, card.rank == Rank::King ? Rank::Queen : Rank::King};
}

bool exchange_open(const DealState& state) {
  // Leading, phase 1, and at least two undrawn cards (one face-down + indicator).
  return state.phase == Phase::One && !state.talon.empty();
}

void append_marriages(const DealState& state, int player, MoveList& moves) {
  for (int s = 0; s < kNumSuits; ++s) {
    const Card king{static_cast<Suit>(s), Rank::King};
    const Card queen{static_cast<Suit>(s), Rank::Queen};
    if (state.hands[player].contains(king) && state.hands[player].contains(queen)) {
      moves.push_back({MoveKind::Marriage, king});
      moves.push_back({MoveKind::Marriage, queen});
    }
  }
}

CardSet follower_choices(const DealState& state, int player) {
  const CardSet hand = state.hands[player];
  if (state.phase == Phase::One) return hand;
  const Card lead = *state.on_table;
  const CardSet follow = hand & CardSet::of_suit(lead.suit);
  if (!follow.empty()) {
    CardSet beating;
    for (Card c : follow)
      if (beats_in_suit(c, lead)) beating.add(c);
    return beating.empty() ? follow : beating;
  }
  const CardSet trumps = hand & CardSet::of_suit(state.trump_suit);
  return trumps.empty() ? hand : trumps;
}

std::string illegal_reason(const DealState& state, Move move) {
  const int p = state.to_move();
  switch (move.kind) {
    case MoveKind::Marriage: {
      if (state.on_table) return "marriage only when leading";
      if (move.card.rank != Rank::King && move.card.rank != Rank::Queen)
        return "marriage must lead the king or queen";
      if (!state.hands[p].contains(move.card) || !state.hands[p].contains(marriage_partner(move.card)))
        return "marriage requires holding king and queen of one suit";
      return "marriage not available";
    }
    case MoveKind::TrumpExchange: {
      if (state.on_table) return "exchange only when leading";
      if (state.phase == Phase::Two) return "exchange closed in phase two";
      if (state.talon.empty()) return "exchange window closed";
      if (move.card != Card{state.trump_suit, Rank::Jack} || !state.hands[p].contains(move.card))
        return "exchange requires the trump jack in hand";
      return "exchange not available";
    }
    case MoveKind::PlayCard: {
      if (!state.hands[p].contains(move.card)) return "card not in hand";
      if (!state.on_table) return "illegal move";
      const Card lead = *state.on_table;
      const CardSet follow = state.hands[p] & CardSet::of_suit(lead.suit);
      if (!follow.empty()) {
        if (move.card.suit != lead.suit) return "must follow suit";
        return "must beat the led card";
      }
      return "must trump when void in the led suit";
    }
  }
  return "illegal move";
}

void draw_card(DealState& state, int player) {
  if (!state.talon.empty()) {
    state.hands[player].add(state.talon.back());
    state.talon.pop_back();
  } else if (state.trump_indicator) {
    // The face-up indicator is the last card drawn; everyone sees who got it.
    state.hands[player].add(*state.trump_indicator);
    state.revealed[player].add(*state.trump_indicator);
    state.trump_indicator.reset();
    state.phase = Phase::Two;
  }
}

}  // namespace

MoveList valid_moves(const DealState& state) {
  if (is_terminal(state)) throw std::logic_error("deal already decided");
  MoveList moves;
  const int p = state.to_move();
  if (!state.on_table) {
    for (Card c : state.hands[p]) moves.push_back({MoveKind::PlayCard, c});
    append_marriages(state, p, moves);
    if (exchange_open(state)) {
      const Card jack{state.trump_suit, Rank::Jack};
      if (state.hands[p].contains(jack)) moves.push_back({MoveKind::TrumpExchange, jack});
    }
  } else {
    for (Card c : follower_choices(state, p)) moves.push_back({MoveKind::PlayCard, c});
  }
  return moves;
}

TrickRole trick_winner(Card lead, Card reply, Suit trump) {
  if (reply.suit == lead.suit)
    return beats_in_suit(reply, lead) ? TrickRole::Follower : TrickRole::Leader;
  if (reply.suit == trump) return TrickRole::Follower;
  return TrickRole::Leader;
}

void apply_move_unchecked(DealState& state, Move move) {
  const int p = state.to_move();
  switch (move.kind) {
    case MoveKind::TrumpExchange: {
      const Card indicator = *state.trump_indicator;
      state.hands[p].remove(move.card);
      state.revealed[p].remove(move.card);
      state.trump_indicator = move.card;
      state.hands[p].add(indicator);
      state.revealed[p].add(indicator);
      break;
    }
    case MoveKind::Marriage: {
      state.marriage_points[p] += move.card.suit == state.trump_suit ? 40 : 20;
      state.revealed[p].add(marriage_partner(move.card));
      state.hands[p].remove(move.card);
      state.revealed[p].remove(move.card);
      state.on_table = move.card;
      break;
    }
    case MoveKind::PlayCard: {
      if (!state.on_table) {
        state.hands[p].remove(move.card);
        state.revealed[p].remove(move.card);
        state.on_table = move.card;
      } else {
        const Card lead = *state.on_table;
        state.hands[p].remove(move.card);
        state.revealed[p].remove(move.card);
        const TrickRole role = trick_winner(lead, move.card, state.trump_suit);
        const int winner = role == TrickRole::Leader ? state.leader : p;
        state.captured[winner].add(lead);
        state.captured[winner].add(move.card);
        state.direct_points[winner] += card_points(lead.rank) + card_points(move.card.rank);
        state.tricks_won[winner] += 1;
        state.on_table.reset();
        state.leader = winner;
        if (state.phase == Phase::One && !is_terminal(state)) {
          draw_card(state, winner);
          draw_card(state, 1 - winner);
        }
      }
      break;
    }
  }
  state.history.push_back(move);
}

void apply_move(DealState& state, Move move) {
  const MoveList moves = valid_moves(state);
  if (!moves.contains(move))
    throw std::invalid_argument("illegal move (" + to_string(move) + "): " + illegal_reason(state, move));
  apply_move_unchecked(state, move);
}

int countable_points(const DealState& state, int player) {
  return state.direct_points[player] +
         (state.tricks_won[player] >= 1 ? state.marriage_points[player] : 0);
}

bool is_terminal(const DealState& state) {
  if (countable_points(state, 0) >= 66 || countable_points(state, 1) >= 66) return true;
  return state.captured[0].size() + state.captured[1].size() == kDeckSize;
}

DealOutcome outcome(const DealState& state) {
  if (!is_terminal(state)) throw std::logic_error("deal not decided yet");
  int winner;
  DealOutcome::Reason reason;
  if (countable_points(state, 0) >= 66 || countable_points(state, 1) >= 66) {
    winner = countable_points(state, 0) >= 66 ? 0 : 1;
    reason = DealOutcome::Reason::Reached66;
  } else {
    winner = state.leader;  // the last-trick winner leads next
    reason = DealOutcome::Reason::LastTrick;
  }
  const int loser = 1 - winner;
  int game_points = 1;
  if (state.tricks_won[loser] == 0)
    game_points = 3;
  else if (countable_points(state, loser) < 33)
    game_points = 2;
  return {winner, game_points, reason};
}

Perspective perspective(const DealState& state, int player) {
  const int opp = 1 - player;
  Perspective view;
  view.me = player;
  view.my_hand = state.hands[player];
  view.trump_suit = state.trump_suit;
  view.trump_indicator = state.trump_indicator;
  view.talon_size = state.talon_size();
  view.phase = state.phase;
  view.on_table = state.on_table;
  view.my_points = countable_points(state, player);
  view.opp_points = countable_points(state, opp);
  view.my_pending = state.tricks_won[player] == 0 ? state.marriage_points[player] : 0;
  view.opp_pending = state.tricks_won[opp] == 0 ? state.marriage_points[opp] : 0;
  view.opp_known = state.revealed[opp];
  view.won_by_me = state.captured[player];
  view.won_by_opp = state.captured[opp];
  view.i_lead = state.leader == player;
  return view;
}

std::string transcript_line(int ply, int player, Move move, const DealState& after) {
  const char* kind = move.kind == MoveKind::PlayCard     ? "play"
                     : move.kind == MoveKind::Marriage   ? "marriage"
                                                         : "exchange";
  return std::to_string(ply) + ";" + std::to_string(player) + ";" + kind + ";" +
         to_string(move.card) + ";" + std::to_string(countable_points(after, 0)) + ";" +
         std::to_string(countable_points(after, 1));
}

}  // namespace schnapsen
