#pragma once

#include <functional>
#include <memory>
#include <string>

#include "schnapsen/engine.hpp"

namespace schnapsen {

// A bot picks one legal move from what its seat can see; it never touches the
// full DealState. Bots are immutable after construction and safe to share
// across games: each decision gets a caller-supplied rng stream derived from
// (bot seed, deal seed, seat).
class Bot {
 public:
  virtual ~Bot() = default;
  virtual Move choose(const Perspective& view, const MoveList& moves, Rng& rng) const = 0;
  // Canonical spec text; make_bot(name()) rebuilds an equivalent bot.
  virtual std::string name() const = 0;
  virtual uint64_t seed() const { return 0; }
};

// Uniform random over the legal moves.
Move choose_rand(const MoveList& moves, Rng& rng);

// Card-priority logic: play a random trump if holding one, else follow suit,
// else the highest-point card; rng breaks ties. Never declares a marriage or
// exchanges the trump jack.
Move choose_bully(const Perspective& view, const MoveList& moves, Rng& rng);

// Fills in the cards the viewer cannot see: the opponent's hidden cards and
// the face-down talon are drawn at random from the unseen set. Every public
// field is copied, so perspective(determinize(p, rng), p.me) == p.
// Throws std::invalid_argument when the card counts do not add up.
DealState determinize(const Perspective& view, Rng& rng);

// Applies up to `plies` uniformly random valid moves (both sides), stopping
// early at a decided deal.
DealState playout(DealState state, int plies, Rng& rng);

// Countable-point ratio in [0, 1] from `player`'s seat: 1/0 once the deal is
// decided, cp/(cp+co) otherwise, 0.5 when neither side can count yet.
double evaluate_state(const DealState& state, int player);

// Scores a leaf state from `me`'s seat; swapped between the point-ratio
// heuristic and a learned value function.
using LeafEval = std::function<double(const DealState& leaf, int me)>;

// Determinized lookahead: score(m) = mean over num_samples runs of
// leaf(playout(apply(determinize(view), m), depth - 1), me); the root move is
// ply one. Returns the first move attaining the maximum score (stable
// tie-break on canonical order). A singleton list is returned unsimulated.
Move choose_lookahead(const Perspective& view, const MoveList& moves, int depth, int num_samples,
                      Rng& rng, const LeafEval& leaf);

// choose_lookahead with the point-ratio heuristic at the leaves.
Move choose_rdeep(const Perspective& view, const MoveList& moves, int depth, int num_samples,
                  Rng& rng);

// Textual bot form: `rand:<seed>`, `bully:<seed>`,
// `rdeep:d=<depth>,s=<num_samples>,seed=<seed>`, `mlp:<path>`, `rl:<path>`,
// `rl+look:<path>,d=<depth>,s=<num_samples>,seed=<seed>`.
struct BotSpec {
  enum class Kind { Rand, Bully, Rdeep, Mlp, Rl, RlLookahead };
  Kind kind = Kind::Rand;
  int depth = 1;            // Rdeep / RlLookahead
  int num_samples = 1;      // Rdeep / RlLookahead
  std::string model_ref;    // Mlp / Rl / RlLookahead
  uint64_t seed = 0;
};

// Both throw std::invalid_argument on malformed input; format(parse(s)) == s
// for canonical spec strings.
BotSpec parse_bot_spec(const std::string& text);
std::string format_bot_spec(const BotSpec& spec);

// Builds any bot from its textual form (model-backed kinds load their
// checkpoint). Implemented alongside the value-network bots.
std::unique_ptr<Bot> make_bot(const std::string& text);
std::unique_ptr<Bot> make_bot(const BotSpec& spec);

class RandBot final : public Bot {
 public:
  explicit RandBot(uint64_t seed) : seed_(seed) {}
  Move choose(const Perspective&, const MoveList& moves, Rng& rng) const override {
    return choose_rand(moves, rng);
  }
  std::string name() const override;
  uint64_t seed() const override { return seed_; }

 private:
  uint64_t seed_;
};

class BullyBot final : public Bot {
 public:
  explicit BullyBot(uint64_t seed) : seed_(seed) {}
  Move choose(const Perspective& view, const MoveList& moves, Rng& rng) const override {
    return choose_bully(view, moves, rng);
  }
  std::string name() const override;
  uint64_t seed() const override { return seed_; }

 private:
  uint64_t seed_;
};

class RdeepBot final : public Bot {
 public:
  RdeepBot(int depth, int num_samples, uint64_t seed)
      : depth_(depth), num_samples_(num_samples), seed_(seed) {}
  Move choose(const Perspective& view, const MoveList& moves, Rng& rng) const override {
    return choose_rdeep(view, moves, depth_, num_samples_, rng);
  }
  std::string name() const override;
  uint64_t seed() const override { return seed_; }
  int depth() const { return depth_; }
  int num_samples() const { return num_samples_; }

 private:
  int depth_;
  int num_samples_;
  uint64_t seed_;
};

}  // namespace schnapsen
