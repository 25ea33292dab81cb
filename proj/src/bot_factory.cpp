#include <memory>
#include <string>

#include "schnapsen/bots.hpp"
#include "schnapsen/store.hpp"
#include "schnapsen/trainer.hpp"

namespace schnapsen {

std::unique_ptr<Bot> make_bot(const BotSpec& spec) {
  switch (spec.kind) {
    case BotSpec::Kind::Rand:
      return std::make_unique<RandBot>(spec.seed);
    case BotSpec::Kind::Bully:
      return std::make_unique<BullyBot>(spec.seed);
    case BotSpec::Kind::Rdeep:
      return std::make_unique<RdeepBot>(spec.depth, spec.num_samples, spec.seed);
    case BotSpec::Kind::Mlp:
      return std::make_unique<ModelBot>(load_model(spec.model_ref), "mlp",
                                        spec.model_ref);
    case BotSpec::Kind::Rl:
      return std::make_unique<ModelBot>(load_model(spec.model_ref), "rl",
                                        spec.model_ref);
    case BotSpec::Kind::RlLookahead:
      return std::make_unique<RlLookaheadBot>(load_model(spec.model_ref),
                                              spec.model_ref, spec.depth,
                                              spec.num_samples, spec.seed);
  }
  throw std::invalid_argument("make_bot: unknown bot kind");
}

std::unique_ptr<Bot> make_bot(const std::string& text) {
  return make_bot(parse_bot_spec(text));
}

}  // namespace schnapsen
