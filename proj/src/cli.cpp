#include "schnapsen/cli.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "schnapsen/arena.hpp"
#include "schnapsen/bots.hpp"
#include "schnapsen/engine.hpp"
#include "schnapsen/rng.hpp"
#include "schnapsen/store.hpp"
#include "schnapsen/trainer.hpp"

namespace schnapsen {
namespace {

namespace fs = std::filesystem;

constexpr const char* kFooter = R"(Reproducibility:
  Every command is a pure function of its flags: identical flags (seeds
  included) yield identical outputs. train-rl is bit-reproducible with
  --workers 1; tournament results never depend on --parallelism.

Run layout convention:
  Organize outputs as runs/<name>/{checkpoints,reports,logs}. `tournament
  --out-dir runs/<name>` fills reports/ and logs/ automatically; the training
  commands take explicit paths, e.g.
    --out runs/exp1/checkpoints/mlp.snpw --log runs/exp1/logs/train.csv

Full-scale experiment presets (flag defaults already match the reference
hyperparameters; the desk-scale path is the same commands with smaller
--games/--n):
  1. Imitation baseline - 20,000-game replay between two fixed-seed searchers,
     then supervised training (one dataset per opponent depth 2/4/6):
       gen-replay --a rdeep:d=2,s=4,seed=4564654644 --b rdeep:d=2,s=4,seed=68438
                  --games 20000 --out runs/exp1/checkpoints/replay-d2.snpd
       train-mlp  --data runs/exp1/checkpoints/replay-d2.snpd
                  --out runs/exp1/checkpoints/mlp-d2.snpw
  2. Reinforcement vs. search depth - 1.2M-game runs against lookahead
     opponents of depth 2/4/6/8 at 4 samples:
       train-rl --opponent rdeep:d=8,s=4,seed=1
                --out runs/exp2/checkpoints/rl-d8.snpw
  3. Reinforcement vs. sample count - depth fixed at 4, samples 4/20/40/60/80:
       train-rl --opponent rdeep:d=4,s=80,seed=1
                --out runs/exp3/checkpoints/rl-s80.snpw
  Evaluate any result with, e.g.:
       tournament --players rl:runs/exp2/checkpoints/rl-d8.snpw
                  --opponents rdeep:d=8,s=4,seed=1 --n 10000
                  --out-dir runs/exp2)";

// "--eps start:end" (e.g. 0.23:0.02).
std::pair<double, double> parse_eps(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("--eps expects start:end, got '" + text + "'");
  }
  std::size_t used_a = 0;
  std::size_t used_b = 0;
  double start = 0.0;
  double end = 0.0;
  try {
    start = std::stod(text.substr(0, colon), &used_a);
    end = std::stod(text.substr(colon + 1), &used_b);
  } catch (const std::exception&) {
    throw std::invalid_argument("--eps expects start:end, got '" + text + "'");
  }
  if (used_a != colon || used_b != text.size() - colon - 1) {
    throw std::invalid_argument("--eps expects start:end, got '" + text + "'");
  }
  return {start, end};
}

void ensure_parent_dir(const fs::path& path) {
  const fs::path parent = path.parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_text_file(const fs::path& path, const std::string& content) {
  ensure_parent_dir(path);
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw std::runtime_error("cannot open " + path.string() + " for writing");
  stream << content;
  if (!stream) throw std::runtime_error("failed writing " + path.string());
}

void print_log(const TrainingLog& log, std::ostream& out) {
  out << "games,eps,buffer,loss,winrate\n";
  for (const TrainingLogEntry& entry : log.entries) {
    out << format_log_line(entry) << '\n';
  }
}

void maybe_save_log(const TrainingLog& log, const std::string& path) {
  if (path.empty()) return;
  std::string text = "games,eps,buffer,loss,winrate\n";
  for (const TrainingLogEntry& entry : log.entries) {
    text += format_log_line(entry);
    text += '\n';
  }
  write_text_file(path, text);
}

const char* reason_text(DealOutcome::Reason reason) {
  return reason == DealOutcome::Reason::Reached66 ? "reached 66" : "last trick";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Schnapsen bot laboratory: seeded replay generation, value-network "
               "training, and tournament statistics."};
  app.footer(kFooter);
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1);

  // --- gen-replay --------------------------------------------------------
  std::string gen_a;
  std::string gen_b;
  std::int64_t gen_games = 20'000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand(
      "gen-replay", "Play deals between two bots and record every decision, "
                    "labeled by the deciding player's final result.");
  gen->add_option("--a", gen_a, "Seat-0 bot spec (e.g. rdeep:d=2,s=4,seed=1)")->required();
  gen->add_option("--b", gen_b, "Seat-1 bot spec")->required();
  gen->add_option("--games", gen_games, "Number of deals to play")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "Deal seed for game 0; game i uses seed+i")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output dataset path (.snpd)")->required();

  // --- train-mlp ----------------------------------------------------------
  std::string mlp_data;
  int mlp_epochs = 100;
  double mlp_lr = 5e-4;
  double mlp_wd = 1e-5;
  int mlp_batch = 1'024;
  std::uint64_t mlp_seed = 0;
  std::string mlp_out;
  std::string mlp_log;
  CLI::App* mlp = app.add_subcommand(
      "train-mlp", "Supervised imitation: fit the value network to a replay "
                   "dataset with minibatch cross-entropy.");
  mlp->add_option("--data", mlp_data, "Replay dataset path (.snpd)")->required();
  mlp->add_option("--epochs", mlp_epochs, "Training epochs")->capture_default_str();
  mlp->add_option("--lr", mlp_lr, "Adam learning rate")->capture_default_str();
  mlp->add_option("--wd", mlp_wd, "L2 weight decay")->capture_default_str();
  mlp->add_option("--batch", mlp_batch, "Minibatch size")->capture_default_str();
  mlp->add_option("--seed", mlp_seed, "Weight-init and shuffle seed")
      ->capture_default_str();
  mlp->add_option("--out", mlp_out, "Output model path (.snpw)")->required();
  mlp->add_option("--log", mlp_log, "Optional CSV training-log path");

  // --- train-rl -----------------------------------------------------------
  std::string rl_opponent;
  std::int64_t rl_games = 1'200'000;
  std::string rl_eps = "0.23:0.02";
  std::size_t rl_buffer = 100'000;
  int rl_batch = 1'024;
  int rl_workers = 1;
  std::size_t rl_warmup = 10'000;
  int rl_interval = 256;
  int rl_updates = 1;
  double rl_lr = 5e-4;
  double rl_wd = 1e-5;
  std::uint64_t rl_seed = 0;
  std::string rl_out;
  std::string rl_log;
  CLI::App* rl = app.add_subcommand(
      "train-rl", "Asynchronous Monte Carlo reinforcement learning with an "
                  "experience-replay buffer and epsilon-greedy exploration.");
  rl->add_option("--opponent", rl_opponent, "Opponent bot spec")->required();
  rl->add_option("--games", rl_games, "Total training games")->capture_default_str();
  rl->add_option("--eps", rl_eps, "Linear exploration schedule start:end")
      ->capture_default_str();
  rl->add_option("--buffer", rl_buffer, "Replay buffer capacity")
      ->capture_default_str();
  rl->add_option("--batch", rl_batch, "Minibatch size")->capture_default_str();
  rl->add_option("--workers", rl_workers,
                 "Self-play worker threads (1 = bit-deterministic)")
      ->capture_default_str();
  rl->add_option("--warmup", rl_warmup, "Samples required before updates start")
      ->capture_default_str();
  rl->add_option("--interval", rl_interval,
                 "Games between weight snapshots / log entries")
      ->capture_default_str();
  rl->add_option("--updates", rl_updates, "Gradient updates per game")
      ->capture_default_str();
  rl->add_option("--lr", rl_lr, "Adam learning rate")->capture_default_str();
  rl->add_option("--wd", rl_wd, "L2 weight decay")->capture_default_str();
  rl->add_option("--seed", rl_seed, "Base seed (deals, exploration, weights)")
      ->capture_default_str();
  rl->add_option("--out", rl_out, "Output model path (.snpw)")->required();
  rl->add_option("--log", rl_log, "Optional CSV training-log path");

  // --- tournament ---------------------------------------------------------
  std::vector<std::string> tour_players;
  std::vector<std::string> tour_opponents;
  std::int64_t tour_n = 10'000;
  std::uint64_t tour_seed = 0;
  std::string tour_out_dir;
  std::string tour_format = "csv";
  int tour_parallelism = 1;
  CLI::App* tour = app.add_subcommand(
      "tournament", "Winning-rate matrix over the player/opponent cross "
                    "product with one-sample Z-tests and B/W/E verdicts.");
  // Bot specs contain commas (rdeep:d=2,s=4,seed=1), so lists are separated
  // by semicolons, spaces, or repeated flags.
  tour->add_option("--players", tour_players,
                   "Row bot specs (';'-separated, space-separated, or repeated)")
      ->required()
      ->delimiter(';');
  tour->add_option("--opponents", tour_opponents, "Column bot specs")
      ->required()
      ->delimiter(';');
  tour->add_option("--n", tour_n, "Games per pairing")->capture_default_str();
  tour->add_option("--seed", tour_seed, "First deal seed; pairing k spans seed+k*n")
      ->capture_default_str();
  tour->add_option("--out-dir", tour_out_dir,
                   "Run directory; writes reports/{matrix.csv,matrix.json,heatmap.txt} "
                   "and logs/run.log under it");
  tour->add_option("--format", tour_format, "Stdout format when --out-dir is absent")
      ->check(CLI::IsMember({"csv", "json", "heatmap"}))
      ->capture_default_str();
  tour->add_option("--parallelism", tour_parallelism,
                   "Worker threads (results are identical for any value)")
      ->capture_default_str();

  // --- match ---------------------------------------------------------------
  std::string match_a;
  std::string match_b;
  std::uint64_t match_seed = 0;
  int match_leader = 0;
  bool match_trace = false;
  CLI::App* match = app.add_subcommand(
      "match", "Play a single deal between two bots and report the outcome.");
  match->add_option("--a", match_a, "Seat-0 bot spec")->required();
  match->add_option("--b", match_b, "Seat-1 bot spec")->required();
  match->add_option("--seed", match_seed, "Deal seed")->capture_default_str();
  match->add_option("--leader", match_leader, "Seat leading the first trick")
      ->check(CLI::Range(0, 1))
      ->capture_default_str();
  match->add_flag("--trace", match_trace,
                  "Print one transcript line per move: "
                  "ply;player;kind;card;points0;points1");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (app.got_subcommand(gen)) {
      const ReplayDataset dataset =
          generate_replay(parse_bot_spec(gen_a), parse_bot_spec(gen_b), gen_games, gen_seed);
      ensure_parent_dir(gen_out);
      save_dataset(dataset, gen_out);
      out << "wrote " << dataset.size() << " samples from " << gen_games
          << " games to " << gen_out << '\n';
    } else if (app.got_subcommand(mlp)) {
      const ReplayDataset dataset = load_dataset(mlp_data);
      SupervisedConfig cfg;
      cfg.epochs = mlp_epochs;
      cfg.lr = mlp_lr;
      cfg.weight_decay = mlp_wd;
      cfg.minibatch = mlp_batch;
      cfg.shuffle_seed = mlp_seed;
      const SupervisedResult result = train_supervised(dataset, cfg, mlp_seed);
      ensure_parent_dir(mlp_out);
      save_model(result.model, mlp_out);
      print_log(result.log, out);
      maybe_save_log(result.log, mlp_log);
      out << "saved model to " << mlp_out << " (" << dataset.size() << " samples, "
          << mlp_epochs << " epochs)\n";
    } else if (app.got_subcommand(rl)) {
      RlConfig cfg;
      cfg.total_games = rl_games;
      std::tie(cfg.eps_start, cfg.eps_end) = parse_eps(rl_eps);
      cfg.minibatch = rl_batch;
      cfg.buffer_capacity = rl_buffer;
      cfg.warmup_samples = rl_warmup;
      cfg.updates_per_game = rl_updates;
      cfg.snapshot_interval = rl_interval;
      cfg.workers = rl_workers;
      cfg.base_seed = rl_seed;
      cfg.lr = rl_lr;
      cfg.weight_decay = rl_wd;
      const RlResult result = rl_train(parse_bot_spec(rl_opponent), cfg, rl_seed);
      ensure_parent_dir(rl_out);
      save_model(result.model, rl_out);
      print_log(result.log, out);
      maybe_save_log(result.log, rl_log);
      out << "saved model to " << rl_out << " (" << rl_games << " games vs "
          << rl_opponent << ")\n";
    } else if (app.got_subcommand(tour)) {
      std::vector<BotSpec> players;
      std::vector<BotSpec> opponents;
      for (const std::string& text : tour_players) players.push_back(parse_bot_spec(text));
      for (const std::string& text : tour_opponents) opponents.push_back(parse_bot_spec(text));
      const MatrixReport report =
          run_matrix(players, opponents, tour_n, tour_seed, tour_parallelism);
      if (tour_out_dir.empty()) {
        if (tour_format == "csv") out << export_csv(report);
        else if (tour_format == "json") out << export_json(report);
        else out << export_heatmap(report);
      } else {
        const fs::path dir(tour_out_dir);
        write_text_file(dir / "reports" / "matrix.csv", export_csv(report));
        write_text_file(dir / "reports" / "matrix.json", export_json(report));
        write_text_file(dir / "reports" / "heatmap.txt", export_heatmap(report));
        std::string log_text = "timestamp=" + report.meta.timestamp +
                               "\nconfig_hash=" + report.meta.config_hash +
                               "\nn=" + std::to_string(tour_n) +
                               "\nseed=" + std::to_string(tour_seed) + "\nplayers=";
        for (const BotSpec& spec : players) log_text += format_bot_spec(spec) + " ";
        log_text += "\nopponents=";
        for (const BotSpec& spec : opponents) log_text += format_bot_spec(spec) + " ";
        log_text += '\n';
        write_text_file(dir / "logs" / "run.log", log_text);
        out << "wrote " << (dir / "reports" / "matrix.csv").string() << ", "
            << (dir / "reports" / "matrix.json").string() << ", "
            << (dir / "reports" / "heatmap.txt").string() << '\n';
      }
    } else if (app.got_subcommand(match)) {
      const std::unique_ptr<Bot> bot_a = make_bot(parse_bot_spec(match_a));
      const std::unique_ptr<Bot> bot_b = make_bot(parse_bot_spec(match_b));
      Rng rng_a(mix_seed(bot_a->seed(), match_seed, 0));
      Rng rng_b(mix_seed(bot_b->seed(), match_seed, 1));
      out << bot_a->name() << " vs " << bot_b->name() << ", seed " << match_seed
          << ", seat " << match_leader << " leads\n";
      DealState state = new_deal(match_seed, match_leader);
      int ply = 0;
      while (!is_terminal(state)) {
        const int seat = state.to_move();
        const MoveList moves = valid_moves(state);
        Bot& bot = seat == 0 ? *bot_a : *bot_b;
        Rng& rng = seat == 0 ? rng_a : rng_b;
        const Move move = bot.choose(perspective(state, seat), moves, rng);
        apply_move(state, move);
        ++ply;
        if (match_trace) out << transcript_line(ply, seat, move, state) << '\n';
      }
      const DealOutcome result = outcome(state);
      out << "winner: seat " << result.winner << " ("
          << (result.winner == 0 ? bot_a->name() : bot_b->name()) << "), "
          << result.game_points << " game point" << (result.game_points == 1 ? "" : "s")
          << ", " << reason_text(result.reason) << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace schnapsen
