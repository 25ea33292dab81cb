#include "schnapsen/bots.hpp"

#include <charconv>
#include <stdexcept>
#include <vector>

namespace schnapsen {

namespace {

void require_moves(const MoveList& moves) {
  if (moves.empty()) throw std::invalid_argument("no moves to choose from");
}

Move pick_uniform(const std::vector<Move>& moves, Rng& rng) {
  return moves[static_cast<size_t>(rng.next_below(moves.size()))];
}

}  // namespace

Move choose_rand(const MoveList& moves, Rng& rng) {
  require_moves(moves);
  return moves[static_cast<int>(rng.next_below(moves.size()))];
}

Move choose_bully(const Perspective& view, const MoveList& moves, Rng& rng) {
  require_moves(moves);
  std::vector<Move> plays;
  for (const Move& m : moves) {
    if (m.kind == MoveKind::PlayCard) plays.push_back(m);
  }

  std::vector<Move> trumps;
  for (const Move& m : plays) {
    if (m.card.suit == view.trump_suit) trumps.push_back(m);
  }
  if (!trumps.empty()) return pick_uniform(trumps, rng);

  if (view.on_table) {
    std::vector<Move> follows;
    for (const Move& m : plays) {
      if (m.card.suit == view.on_table->suit) follows.push_back(m);
    }
    if (!follows.empty()) return pick_uniform(follows, rng);
  }

  int best = -1;
  std::vector<Move> top;
  for (const Move& m : plays) {
    const int pts = card_points(m.card.rank);
    if (pts > best) {
      best = pts;
      top.clear();
    }
    if (pts == best) top.push_back(m);
  }
  return pick_uniform(top, rng);
}

DealState determinize(const Perspective& p, Rng& rng) {
  const int me = p.me;
  const int opp = 1 - me;

  DealState s;
  s.trump_suit = p.trump_suit;
  s.trump_indicator = p.trump_indicator;
  s.phase = p.phase;
  s.on_table = p.on_table;
  s.leader = p.i_lead ? me : opp;
  s.hands[me] = p.my_hand;
  s.captured[me] = p.won_by_me;
  s.captured[opp] = p.won_by_opp;
  s.tricks_won[me] = p.won_by_me.size() / 2;
  s.tricks_won[opp] = p.won_by_opp.size() / 2;
  // Direct vs pending split is not observable; any split that projects back
  // to the same countable/pending pair is equivalent.
  s.direct_points[me] = p.my_points;
  s.direct_points[opp] = p.opp_points;
  s.marriage_points[me] = p.my_pending;
  s.marriage_points[opp] = p.opp_pending;
  s.revealed[opp] = p.opp_known;

  CardSet unseen = CardSet::full() - p.my_hand - p.won_by_me - p.won_by_opp - p.opp_known;
  if (p.trump_indicator) unseen.remove(*p.trump_indicator);
  if (p.on_table) unseen.remove(*p.on_table);

  const int opp_hidden = p.opp_hand_size() - p.opp_known.size();
  const int face_down = p.talon_size - (p.trump_indicator ? 1 : 0);
  if (opp_hidden < 0 || face_down < 0 || unseen.size() != opp_hidden + face_down) {
    throw std::invalid_argument("perspective card counts do not add up");
  }

  std::vector<Card> pool;
  pool.reserve(unseen.size());
  for (Card c : unseen) pool.push_back(c);
  rng.shuffle(pool.begin(), pool.end());

  s.hands[opp] = p.opp_known;
  for (int i = 0; i < opp_hidden; ++i) s.hands[opp].add(pool[i]);
  s.talon.assign(pool.begin() + opp_hidden, pool.end());
  return s;
}

DealState playout(DealState state, int plies, Rng& rng) {
  while (plies-- > 0 && !is_terminal(state)) {
    const MoveList moves = valid_moves(state);
    apply_move_unchecked(state, moves[static_cast<int>(rng.next_below(moves.size()))]);
  }
  return state;
}

double evaluate_state(const DealState& state, int player) {
  if (is_terminal(state)) return outcome(state).winner == player ? 1.0 : 0.0;
  const int cp = countable_points(state, player);
  const int co = countable_points(state, 1 - player);
  if (cp + co == 0) return 0.5;
  return static_cast<double>(cp) / (cp + co);
}

Move choose_lookahead(const Perspective& view, const MoveList& moves, int depth, int num_samples,
                      Rng& rng, const LeafEval& leaf) {
  require_moves(moves);
  if (depth < 1 || num_samples < 1) {
    throw std::invalid_argument("depth and num_samples must be at least 1");
  }
  if (moves.size() == 1) return moves[0];

  int best = 0;
  double best_score = -1.0;
  for (int i = 0; i < moves.size(); ++i) {
    double acc = 0.0;
    for (int k = 0; k < num_samples; ++k) {
      DealState st = determinize(view, rng);
      apply_move_unchecked(st, moves[i]);
      st = playout(std::move(st), depth - 1, rng);
      acc += leaf(st, view.me);
    }
    const double score = acc / num_samples;
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return moves[best];
}

Move choose_rdeep(const Perspective& view, const MoveList& moves, int depth, int num_samples,
                  Rng& rng) {
  return choose_lookahead(view, moves, depth, num_samples, rng, &evaluate_state);
}

namespace {

[[noreturn]] void bad_spec(const std::string& text, const std::string& why) {
  throw std::invalid_argument("bad bot spec \"" + text + "\": " + why);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

template <typename Int>
Int parse_int(const std::string& text, const std::string& field, const std::string& spec) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    bad_spec(spec, "cannot parse " + field + " from \"" + text + "\"");
  }
  return value;
}

// Reads d=<depth>,s=<num_samples>,seed=<seed> into the spec, in that order.
void parse_search_params(const std::vector<std::string>& fields, size_t first, BotSpec& out,
                         const std::string& text) {
  if (fields.size() != first + 3) bad_spec(text, "expected d=,s=,seed= parameters");
  const char* names[] = {"d", "s", "seed"};
  std::string values[3];
  for (size_t i = 0; i < 3; ++i) {
    const std::string& field = fields[first + i];
    const std::string prefix = std::string(names[i]) + "=";
    if (field.rfind(prefix, 0) != 0) bad_spec(text, "expected " + prefix + "...");
    values[i] = field.substr(prefix.size());
  }
  out.depth = parse_int<int>(values[0], "depth", text);
  out.num_samples = parse_int<int>(values[1], "num_samples", text);
  out.seed = parse_int<uint64_t>(values[2], "seed", text);
  if (out.depth < 1 || out.num_samples < 1) {
    bad_spec(text, "depth and num_samples must be at least 1");
  }
}

}  // namespace

BotSpec parse_bot_spec(const std::string& text) {
  const size_t colon = text.find(':');
  if (colon == std::string::npos) bad_spec(text, "missing ':'");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);

  BotSpec out;
  if (kind == "rand" || kind == "bully") {
    out.kind = kind == "rand" ? BotSpec::Kind::Rand : BotSpec::Kind::Bully;
    out.seed = parse_int<uint64_t>(rest, "seed", text);
    return out;
  }
  if (kind == "rdeep") {
    out.kind = BotSpec::Kind::Rdeep;
    parse_search_params(split(rest, ','), 0, out, text);
    return out;
  }
  if (kind == "mlp" || kind == "rl") {
    out.kind = kind == "mlp" ? BotSpec::Kind::Mlp : BotSpec::Kind::Rl;
    if (rest.empty()) bad_spec(text, "missing checkpoint path");
    out.model_ref = rest;
    return out;
  }
  if (kind == "rl+look") {
    out.kind = BotSpec::Kind::RlLookahead;
    const std::vector<std::string> fields = split(rest, ',');
    if (fields.empty() || fields[0].empty()) bad_spec(text, "missing checkpoint path");
    out.model_ref = fields[0];
    parse_search_params(fields, 1, out, text);
    return out;
  }
  bad_spec(text, "unknown bot kind \"" + kind + "\"");
}

std::string format_bot_spec(const BotSpec& spec) {
  const std::string params = "d=" + std::to_string(spec.depth) +
                             ",s=" + std::to_string(spec.num_samples) +
                             ",seed=" + std::to_string(spec.seed);
  switch (spec.kind) {
    case BotSpec::Kind::Rand: return "rand:" + std::to_string(spec.seed);
    case BotSpec::Kind::Bully: return "bully:" + std::to_string(spec.seed);
    case BotSpec::Kind::Rdeep: return "rdeep:" + params;
    case BotSpec::Kind::Mlp: return "mlp:" + spec.model_ref;
    case BotSpec::Kind::Rl: return "rl:" + spec.model_ref;
    case BotSpec::Kind::RlLookahead: return "rl+look:" + spec.model_ref + "," + params;
  }
  throw std::invalid_argument("unknown bot kind");
}

std::string RandBot::name() const {
  return format_bot_spec({.kind = BotSpec::Kind::Rand, .seed = seed_});
}

std::string BullyBot::name() const {
  return format_bot_spec({.kind = BotSpec::Kind::Bully, .seed = seed_});
}

std::string RdeepBot::name() const {
  return format_bot_spec(
      {.kind = BotSpec::Kind::Rdeep, .depth = depth_, .num_samples = num_samples_, .seed = seed_});
}

}  // namespace schnapsen
