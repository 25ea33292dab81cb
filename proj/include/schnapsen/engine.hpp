#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "schnapsen/cards.hpp"
#include "schnapsen/rng.hpp"

namespace schnapsen {

enum class Phase : uint8_t { One, Two };

enum class MoveKind : uint8_t { PlayCard = 0, Marriage, TrumpExchange };

// Marriage carries the card that is led (king or queen of the pair);
// TrumpExchange always carries the trump jack.
struct Move {
  MoveKind kind;
  Card card;
  friend constexpr bool operator==(Move, Move) = default;
};

std::string to_string(Move move);

// Fixed-capacity move list: a hand of five admits at most 10 legal moves
// (5 plays + 4 marriage leads + 1 exchange).
class MoveList {
 public:
  void push_back(Move m) { items_[size_++] = m; }
  Move operator[](int i) const { return items_[i]; }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const Move* begin() const { return items_.data(); }
  const Move* end() const { return items_.data() + size_; }
  bool contains(Move m) const {
    for (const Move& x : *this)
      if (x == m) return true;
    return false;
  }

 private:
  std::array<Move, 12> items_;
  int size_ = 0;
};

// Full authoritative deal state. A value type: copy freely, no shared state.
struct DealState {
  std::array<CardSet, 2> hands;
  std::vector<Card> talon;  // face-down portion; back() is drawn next
  std::optional<Card> trump_indicator;
  Suit trump_suit;
  Phase phase = Phase::One;
  int leader = 0;
  std::optional<Card> on_table;  // leader's card awaiting the reply
  std::array<int, 2> direct_points{0, 0};
  std::array<int, 2> marriage_points{0, 0};
  std::array<int, 2> tricks_won{0, 0};
  std::array<CardSet, 2> revealed;  // in-hand cards publicly known to the opponent
  std::array<CardSet, 2> captured;  // trick cards won, by captor
  std::vector<Move> history;

  int to_move() const { return on_table ? 1 - leader : leader; }
  int talon_size() const { return static_cast<int>(talon.size()) + (trump_indicator ? 1 : 0); }
};

// One player's information set. Everything a bot is allowed to see.
struct Perspective {
  int me = 0;
  CardSet my_hand;
  Suit trump_suit;
  std::optional<Card> trump_indicator;  // present iff still undrawn
  int talon_size = 0;                   // face-down cards + indicator
  Phase phase = Phase::One;
  std::optional<Card> on_table;
  int my_points = 0, opp_points = 0;    // countable points
  int my_pending = 0, opp_pending = 0;  // declared marriage points not yet countable
  CardSet opp_known;                    // opponent hand cards publicly revealed
  CardSet won_by_me, won_by_opp;
  bool i_lead = true;

  friend bool operator==(const Perspective&, const Perspective&) = default;

  int opp_hand_size() const {
    return kDeckSize - my_hand.size() - won_by_me.size() - won_by_opp.size() - talon_size -
           (on_table ? 1 : 0);
  }
};

struct DealOutcome {
  enum class Reason : uint8_t { Reached66, LastTrick };
  int winner;
  int game_points;  // 1..3
  Reason reason;
};

enum class TrickRole : uint8_t { Leader, Follower };

// Deals 3+3, flips the indicator, deals 2+2; the rest forms the talon.
// Identical (seed, first_leader) yields a bit-identical state.
DealState new_deal(uint64_t seed, int first_leader);

// Legal moves in canonical order: plays, then marriage leads, then exchange,
// each sorted by card index. Throws std::logic_error on a terminal state.
MoveList valid_moves(const DealState& state);

TrickRole trick_winner(Card lead, Card reply, Suit trump);

// Applies a legal move in place. Throws std::invalid_argument naming the
// violated rule when the move is not legal in `state`.
void apply_move(DealState& state, Move move);

// Same, but trusts the caller; used on moves taken from valid_moves().
void apply_move_unchecked(DealState& state, Move move);

// Direct points plus marriage points once the player has won a trick.
int countable_points(const DealState& state, int player);

bool is_terminal(const DealState& state);

// Throws std::logic_error if the deal is not over.
DealOutcome outcome(const DealState& state);

Perspective perspective(const DealState& state, int player);

// Transcript line `<ply>;<player>;<kind>;<card>;<points0>;<points1>` where the
// points are both players' countable points after the move. Ply counts from 1.
std::string transcript_line(int ply, int player, Move move, const DealState& after);

}  // namespace schnapsen
