// Copyright 2026 The ardata Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "ardata/action_codec.hpp"
#include "ardata/chain.hpp"
#include "ardata/depth_codec.hpp"
#include "ardata/image.hpp"
#include "ardata/mixture.hpp"
#include "ardata/overlay.hpp"
#include "ardata/rng.hpp"
#include "ardata/trace.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace ardata;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& o, bool cond, const std::string& what) {
  if (!cond && o.pass) {
    o.pass = false;
    o.detail = what;
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome action_round_trip() {
  Outcome o;
  const auto start = Clock::now();
  Rng rng(101);
  for (int s = 0; s < 50 && o.pass; ++s) {
    ActionQuantileStats stats;
    for (int d = 0; d < 7; ++d) {
      const double lo = rng.uniform(-10.0, 10.0);
      stats.q01.push_back(lo);
      stats.q99.push_back(lo + rng.uniform(1e-3, 20.0));
    }
    for (int b = 0; b < kActionBins; ++b) {
      const std::vector<std::uint8_t> bins(7, static_cast<std::uint8_t>(b));
      const auto again = encode_action(decode_action(bins, stats), stats);
      if (again != ActionTokenSeq(bins)) {
        require(o, false, "stats " + std::to_string(s) + " bin " + std::to_string(b));
        break;
      }
    }
  }
  const double t = seconds_since(start);
  require(o, t < 5.0, "took " + std::to_string(t) + " s");
  if (o.pass) o.detail = "50 stats x 256 bins in " + std::to_string(t) + " s";
  return o;
}

Outcome vocabulary_fidelity() {
  Outcome o;
  const ActionVocabulary vocab = ActionVocabulary::load_default();
  require(o, vocab.token(0) == "\xc3\xa2\xc2\xbd\xc4\xb9", "bin 0 anchor");
  require(o, vocab.token(128) == "\xc3\x9d\xc4\xb5", "bin 128 anchor");
  require(o, vocab.token(255) == "\xc3\xb0\xc5\x81\xc4\xb0\xc4\xb3", "bin 255 anchor");
  ActionTokenSeq all(256);
  std::iota(all.begin(), all.end(), 0);
  const auto tokens = vocab.bins_to_tokens(all);
  require(o, vocab.tokens_to_bins(tokens) == all, "bins -> tokens -> bins");
  require(o, vocab.bins_to_tokens(vocab.tokens_to_bins(tokens)) == tokens, "tokens -> bins -> tokens");
  if (o.pass) o.detail = "anchors 0, 128, 255; bijection on 256 entries";
  return o;
}

Outcome trace_oracle() {
  Outcome o;
  const auto start = Clock::now();
  std::size_t cases = 0;
  for (std::size_t e = 0; e <= 20; ++e) {
    for (std::size_t t = 0; t <= e; ++t) {
      ++cases;
      const auto got = subsample_indices(t, e);
      require(o, got == oracle::subsample(t, e), "t=" + std::to_string(t) + " e=" + std::to_string(e));
      if (t == e) require(o, got == std::vector<std::size_t>{t}, "t == e");
      if (e - t < 4) {
        std::vector<std::size_t> every(e - t + 1);
        std::iota(every.begin(), every.end(), t);
        require(o, got == every, "short span keeps every index");
      }
    }
  }
  const double secs = seconds_since(start);
  require(o, cases == 231, "case count " + std::to_string(cases));
  require(o, secs < 1.0, "took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = std::to_string(cases) + " cases in " + std::to_string(secs) + " s";
  return o;
}

Outcome depth_contracts() {
  Outcome o;
  const auto corpus = testing::synthetic_depth_corpus(200, 4242);
  const DepthCodebook k128 = train_codebook(corpus, 17, 128);
  const DepthCodebook again = train_codebook(corpus, 17, 128);
  require(o, k128 == again, "training not deterministic");
  const DepthCodebook k16 = train_codebook(corpus, 17, 16);
  const DepthCodebook k1 = train_codebook(corpus, 17, 1);
  double e128 = 0, e16 = 0, e1 = 0;
  for (const auto& g : corpus) {
    const auto tok = encode_depth(g, k128);
    bool ok = tok.indices.size() == 100;
    for (int v : tok.indices) ok = ok && v >= 1 && v <= 128;
    require(o, ok, "encoding outside 100 x [1,128]");
    e128 += reconstruction_mse(g, k128);
    e16 += reconstruction_mse(g, k16);
    e1 += reconstruction_mse(g, k1);
  }
  e128 /= corpus.size();
  e16 /= corpus.size();
  e1 /= corpus.size();
  require(o, e128 <= e16 && e16 <= e1, "MSE order violated");
  Rng rng(55);
  for (int i = 0; i < 1000; ++i) {
    const auto tok = testing::random_depth_tokens(rng);
    const std::string text = render_depth_string(tok);
    require(o, parse_depth_string(text) == tok && render_depth_string(parse_depth_string(text)) == text,
            "depth string round trip " + std::to_string(i));
  }
  if (o.pass) {
    std::ostringstream d;
    d << "mse k128 " << e128 << " <= k16 " << e16 << " <= k1 " << e1 << "; deterministic";
    o.detail = d.str();
  }
  return o;
}

Outcome chain_grammar() {
  Outcome o;
  const ChainCodec codec(ActionVocabulary::load_default());
  Rng rng(909);
  for (int i = 0; i < 1000; ++i) {
    const bool bimanual = i % 2 == 1;
    const std::size_t chunk = (i / 2) % 2 == 0 ? 1 : 8;
    const ReasoningChain c = testing::random_chain(rng, bimanual, chunk, bimanual ? 14 : 7);
    const std::string text = codec.render_chain(c);
    require(o, codec.parse_chain(text) == c && codec.render_chain(codec.parse_chain(text)) == text,
            "chain round trip " + std::to_string(i));
  }

  std::string depth = "<DEPTH_START>";
  for (int i = 0; i < 100; ++i) depth += "<DEPTH_1>";
  depth += "<DEPTH_END>";
  std::string short_depth = "<DEPTH_START>";
  for (int i = 0; i < 50; ++i) short_depth += "<DEPTH_1>";
  short_depth += "<DEPTH_END>";
  const std::string tok = codec.vocabulary().token(0);
  const std::vector<std::pair<std::string, ChainStage>> fixtures{
      {";TRACE=[[0,0]]" + depth + ";ACTION=" + tok, ChainStage::order},
      {depth + ";ACTION=" + tok + ";TRACE=[[0,0]]", ChainStage::order},
      {depth + ";TRACE=[[0,0],[1,1],[2,2],[3,3],[4,4],[5,5]];ACTION=" + tok, ChainStage::trace},
      {depth + ";TRACE=[[0,256]];ACTION=" + tok, ChainStage::trace},
      {depth + ";TRACE=[];ACTION=" + tok, ChainStage::trace},
      {depth + ";TRACE_L=[[0,0]];ACTION=" + tok, ChainStage::trace},
      {depth + ";TRACE=[[0,0]];ACTION=" + tok + " notatoken", ChainStage::action},
      {depth + ";TRACE=[[0,0]];ACTION=", ChainStage::action},
      {short_depth + ";TRACE=[[0,0]];ACTION=" + tok, ChainStage::depth},
      {"<DEPTH_START><DEPTH_999>" + depth.substr(13) + ";TRACE=[[0,0]];ACTION=" + tok, ChainStage::depth},
      {depth.substr(13) + ";TRACE=[[0,0]];ACTION=" + tok, ChainStage::depth},
  };
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    try {
      codec.parse_chain(fixtures[i].first);
      require(o, false, "fixture " + std::to_string(i) + " accepted");
    } catch (const ChainParseError& e) {
      require(o, e.stage() == fixtures[i].second,
              "fixture " + std::to_string(i) + " labelled " + to_string(e.stage()));
    }
  }
  if (o.pass) o.detail = "1000 chains; " + std::to_string(fixtures.size()) + " malformed fixtures labelled";
  return o;
}

Outcome mixture_statistics() {
  Outcome o;
  const MixtureConfig cfg = validate_config(fs::path(ARDATA_SOURCE_DIR) / "mixtures/pretrain.json");
  double sum = 0;
  for (const auto& e : cfg.entries) sum += e.weight;
  require(o, sum == 1.0, "weights sum to " + std::to_string(sum));
  constexpr std::size_t n = 100000;
  std::map<std::string, std::size_t> counts;
  for (const auto& name : sample_stream(cfg, n)) ++counts[name];
  double worst = 0;
  for (const auto& e : cfg.entries) {
    const double dev = std::abs(static_cast<double>(counts[e.name]) / n - e.weight);
    worst = std::max(worst, dev);
    require(o, dev <= 0.005, e.name + " off by " + std::to_string(dev));
  }
  if (o.pass) o.detail = std::to_string(cfg.entries.size()) + " streams, max deviation " + std::to_string(worst);
  return o;
}

Outcome overlay_determinism() {
  Outcome o;
  const fs::path golden(ARDATA_GOLDEN_DIR);
  const VisualTrace l{{{30, 200}, {90, 150}, {120, 60}}, Arm::left};
  const VisualTrace r{{{220, 210}, {160, 120}, {140, 70}, {100, 40}}, Arm::right};
  const std::vector<std::pair<std::string, RgbImage>> scenes{
      {"overlay_single.png", overlay_trace(RgbImage(64, 64), {{{0, 0}}, Arm::single})},
      {"overlay_horizontal.png", overlay_trace(RgbImage(256, 256), {{{0, 128}, {255, 128}}, Arm::single})},
      {"overlay_bimanual.png", overlay_bimanual(RgbImage(128, 96, Rgb{40, 40, 40}), l, r)},
  };
  for (const auto& [name, img] : scenes) {
    const auto bytes = encode_png(img);
    require(o, slurp(golden / name) == std::string(bytes.begin(), bytes.end()), name + " bytes differ");
  }
  Rng rng(31);
  for (int i = 0; i < 10000; ++i) {
    const int x0 = static_cast<int>(rng.below(300)) - 20, y0 = static_cast<int>(rng.below(300)) - 20;
    const int x1 = static_cast<int>(rng.below(300)) - 20, y1 = static_cast<int>(rng.below(300)) - 20;
    const auto got = bresenham_line({x0, y0}, {x1, y1});
    const auto want = oracle::line(x0, y0, x1, y1);
    bool same = got.size() == want.size();
    for (std::size_t k = 0; same && k < got.size(); ++k) {
      same = got[k].x == want[k].first && got[k].y == want[k].second;
    }
    require(o, same, "line " + std::to_string(i) + " differs from oracle");
  }
  if (o.pass) o.detail = "3 goldens byte-equal; 10000 lines match";
  return o;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("'") + ARDATA_CLI_PATH + "' " + args + " >> '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome end_to_end() {
  Outcome o;
  testing::TempDir dir("acceptance");
  const auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  const fs::path log = dir / "cli.log";
  const auto start = Clock::now();
  const std::vector<std::string> steps{
      "gen-fixture --out " + q(dir / "mini10"),
      "fit-stats " + q(dir / "mini10") + " --out " + q(dir / "stats.json"),
      "train-codebook " + q(dir / "mini10") + " --out " + q(dir / "codebook.bin"),
      "convert " + q(dir / "mini10") + " --stats " + q(dir / "stats.json") + " --codebook " + q(dir / "codebook.bin") +
          " --out " + q(dir / "out"),
  };
  for (const auto& step : steps) {
    if (run_cli(step, log) != 0) {
      require(o, false, "step failed: " + step.substr(0, step.find(' ')) + "\n" + slurp(log));
      return o;
    }
  }
  const double secs = seconds_since(start);
  require(o, secs < 60.0, "took " + std::to_string(secs) + " s");

  const ChainCodec codec(ActionVocabulary::load_default());
  std::size_t total = 0;
  for (SampleKind kind : kAllSampleKinds) {
    std::ifstream in(dir / "out" / (std::string(to_string(kind)) + "-00000.jsonl"));
    std::size_t n = 0;
    for (std::string line; std::getline(in, line); ++n) {
      try {
        const ReasoningSample s = sample_from_json(line);
        require(o, s.kind == kind && s.target.has_value(), "bad record kind");
        codec.parse_target(kind, *s.target);
      } catch (const std::exception& e) {
        require(o, false, std::string(to_string(kind)) + " record " + std::to_string(n) + ": " + e.what());
      }
    }
    require(o, n == 300, std::string(to_string(kind)) + " has " + std::to_string(n) + " samples");
    total += n;
  }
  if (o.pass) o.detail = std::to_string(total) + " samples re-parsed, pipeline " + std::to_string(secs) + " s";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"action round-trip", action_round_trip},     {"vocabulary fidelity", vocabulary_fidelity},
      {"trace oracle equivalence", trace_oracle},   {"depth codec contracts", depth_contracts},
      {"chain grammar", chain_grammar},             {"mixture statistics", mixture_statistics},
      {"overlay determinism", overlay_determinism}, {"end-to-end", end_to_end},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
