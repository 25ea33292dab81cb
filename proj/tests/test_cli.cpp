#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "schnapsen/arena.hpp"
#include "schnapsen/cli.hpp"
#include "schnapsen/store.hpp"
#include "schnapsen/trainer.hpp"
#include "test_util.hpp"

using namespace schnapsen;
using namespace schnapsen::test;

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun result;
  result.code = run_cli(args, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (const char c : text) n += c == '\n';
  return n;
}

std::size_t count_transcript_lines(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(stream, line)) n += line.find(';') != std::string::npos;
  return n;
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "schnapsen_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream stream(path, std::ios::binary);
  REQUIRE(stream.good());
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("tournament prints a csv matrix to stdout") {
  const CliRun r = run({"tournament", "--players", "rand:1", "--opponents", "rand:2",
                        "--n", "10", "--seed", "0"});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  CHECK(count_lines(r.out) == 2);  // header + 1 data row
  CHECK(r.out.rfind("player,opponent,n,wins,p_hat,z,p_value,verdict,seed_start\n", 0) == 0);
  CHECK(mentions(r.out, "rand:1,rand:2,10,"));

  // Byte-for-byte the arena export for the same parameters.
  const MatrixReport report =
      run_matrix({parse_bot_spec("rand:1")}, {parse_bot_spec("rand:2")}, 10, 0, 1);
  CHECK(r.out == export_csv(report));

  // Other stdout formats.
  const CliRun heat = run({"tournament", "--players", "rand:1", "--opponents", "rand:2",
                           "--n", "10", "--seed", "0", "--format", "heatmap"});
  CHECK(heat.code == 0);
  CHECK(heat.out == export_heatmap(report));
  const CliRun json = run({"tournament", "--players", "rand:1", "--opponents", "rand:2",
                           "--n", "10", "--seed", "0", "--format", "json"});
  CHECK(json.code == 0);
  CHECK(mentions(json.out, "\"schema\": 1"));
}

TEST_CASE("tournament --out-dir writes the run layout") {
  const fs::path dir = temp_dir() / "run";
  fs::remove_all(dir);
  // The ';' list delimiter keeps comma-bearing specs intact.
  const CliRun r = run({"tournament", "--players", "rand:1;rdeep:d=1,s=2,seed=2",
                        "--opponents", "rand:3", "--n", "8", "--seed", "40",
                        "--out-dir", dir.string()});
  CHECK(r.code == 0);
  REQUIRE(fs::exists(dir / "reports" / "matrix.csv"));
  REQUIRE(fs::exists(dir / "reports" / "matrix.json"));
  REQUIRE(fs::exists(dir / "reports" / "heatmap.txt"));
  REQUIRE(fs::exists(dir / "logs" / "run.log"));

  const MatrixReport report =
      run_matrix({parse_bot_spec("rand:1"), parse_bot_spec("rdeep:d=1,s=2,seed=2")},
                 {parse_bot_spec("rand:3")}, 8, 40, 1);
  CHECK(slurp(dir / "reports" / "matrix.csv") == export_csv(report));
  CHECK(slurp(dir / "reports" / "heatmap.txt") == export_heatmap(report));
  const MatrixReport loaded = load_matrix_report(slurp(dir / "reports" / "matrix.json"));
  CHECK(export_csv(loaded) == export_csv(report));
  CHECK(mentions(slurp(dir / "logs" / "run.log"), "config_hash=" + report.meta.config_hash));
}

TEST_CASE("train-mlp without --data fails with usage text") {
  const CliRun r = run({"train-mlp"});
  CHECK(r.code != 0);
  CHECK(mentions(r.err, "--data"));
  CHECK(mentions(r.err, "Usage"));
}

TEST_CASE("match --trace prints the full transcript") {
  const CliRun r = run({"match", "--a", "bully:1", "--b", "rand:2", "--seed", "7",
                        "--trace"});
  CHECK(r.code == 0);
  CHECK(count_transcript_lines(r.out) >= 10);
  CHECK(count_transcript_lines(r.out) == 10);  // frozen for this seed
  CHECK(mentions(r.out, "1;0;play;"));
  CHECK(mentions(r.out, "winner: seat"));
  CHECK(mentions(r.out, "game point"));

  // Identical flags reproduce identical output.
  CHECK(run({"match", "--a", "bully:1", "--b", "rand:2", "--seed", "7", "--trace"}).out ==
        r.out);

  // Without --trace only the header and outcome remain.
  const CliRun quiet = run({"match", "--a", "bully:1", "--b", "rand:2", "--seed", "7"});
  CHECK(quiet.code == 0);
  CHECK(count_transcript_lines(quiet.out) == 0);
  CHECK(mentions(quiet.out, "winner: seat"));
}

TEST_CASE("gen-replay and train-mlp round-trip through files") {
  const fs::path dir = temp_dir();
  const fs::path replay = dir / "replay.snpd";
  const fs::path model = dir / "model.snpw";
  const fs::path log = dir / "train.csv";
  fs::remove(replay);
  fs::remove(model);
  fs::remove(log);

  const CliRun gen = run({"gen-replay", "--a", "rand:1", "--b", "rand:2", "--games",
                          "50", "--seed", "5", "--out", replay.string()});
  CHECK(gen.code == 0);
  CHECK(mentions(gen.out, "50 games"));
  const ReplayDataset dataset = load_dataset(replay);
  CHECK(dataset.size() ==
        generate_replay(parse_bot_spec("rand:1"), parse_bot_spec("rand:2"), 50, 5).size());

  const CliRun fit = run({"train-mlp", "--data", replay.string(), "--epochs", "2",
                          "--seed", "11", "--out", model.string(), "--log", log.string()});
  CHECK(fit.code == 0);
  CHECK(mentions(fit.out, "games,eps,buffer,loss,winrate"));
  CHECK(count_lines(fit.out) == 1 + 2 + 1);  // header + 2 epochs + summary
  const Mlp net = load_model(model);
  CHECK(net.encoder_version == kEncoderVersion);
  CHECK(slurp(log).rfind("games,eps,buffer,loss,winrate\n", 0) == 0);
  CHECK(count_lines(slurp(log)) == 3);

  // The trained checkpoint is immediately playable.
  const CliRun play = run({"match", "--a", "mlp:" + model.string(), "--b", "rand:4",
                           "--seed", "3"});
  CHECK(play.code == 0);
  CHECK(mentions(play.out, "winner: seat"));
}

TEST_CASE("train-rl wires flags through to the trainer") {
  const fs::path model = temp_dir() / "rl.snpw";
  fs::remove(model);
  const CliRun r = run({"train-rl", "--opponent", "rand:3", "--games", "32",
                        "--warmup", "16", "--batch", "8", "--interval", "16",
                        "--buffer", "256", "--seed", "6", "--out", model.string()});
  CHECK(r.code == 0);
  CHECK(mentions(r.out, "saved model to"));
  CHECK(mentions(r.out, "32 games vs rand:3"));

  // Matches the library call with the same configuration.
  RlConfig cfg;
  cfg.total_games = 32;
  cfg.warmup_samples = 16;
  cfg.minibatch = 8;
  cfg.snapshot_interval = 16;
  cfg.buffer_capacity = 256;
  cfg.base_seed = 6;
  const RlResult direct = rl_train(parse_bot_spec("rand:3"), cfg, 6);
  const Mlp saved = load_model(model);
  CHECK(saved.w1 == direct.model.w1);
  CHECK(saved.b1 == direct.model.b1);
  CHECK(saved.w2 == direct.model.w2);
  CHECK(saved.b2 == direct.model.b2);
  for (const TrainingLogEntry& entry : direct.log.entries) {
    CHECK(mentions(r.out, format_log_line(entry)));
  }
}

TEST_CASE("diagnostics: bad flags, bad specs, bad files") {
  CHECK(run({}).code != 0);                            // no subcommand
  CHECK(run({"conquer"}).code != 0);                   // unknown subcommand
  CHECK(run({"--help"}).code == 0);                    // help succeeds

  const CliRun help = run({"--help"});
  for (const char* name : {"gen-replay", "train-mlp", "train-rl", "tournament", "match"}) {
    CHECK(mentions(help.out, name));
  }
  CHECK(mentions(help.out, "Reproducibility"));
  CHECK(mentions(help.out, "runs/<name>/{checkpoints,reports,logs}"));
  CHECK(mentions(help.out, "4564654644"));

  const CliRun bad_spec = run({"match", "--a", "martian:1", "--b", "rand:2"});
  CHECK(bad_spec.code != 0);
  CHECK(mentions(bad_spec.err, "martian"));

  const CliRun bad_file = run({"train-mlp", "--data", "/nonexistent/replay.snpd",
                               "--out", (temp_dir() / "x.snpw").string()});
  CHECK(bad_file.code != 0);
  CHECK(mentions(bad_file.err, "error:"));

  const CliRun bad_eps = run({"train-rl", "--opponent", "rand:1", "--games", "8",
                              "--eps", "0.23", "--out", (temp_dir() / "y.snpw").string()});
  CHECK(bad_eps.code != 0);
  CHECK(mentions(bad_eps.err, "start:end"));

  const CliRun bad_leader = run({"match", "--a", "rand:1", "--b", "rand:2",
                                 "--leader", "2"});
  CHECK(bad_leader.code != 0);
}

TEST_SUITE_END();
