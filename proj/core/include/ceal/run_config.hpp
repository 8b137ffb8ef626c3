#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ceal/pool.hpp"
#include "ceal/predictor.hpp"
#include "ceal/selection.hpp"
#include "ceal/uncertainty.hpp"

namespace ceal {

enum class Strategy { kCeal, kRandom };

// Every heuristic parameter of a run. Defaults follow the reference
// protocol where it fixes a value (600/1000/400 split, T=10, p_d=0.5,
// quotas 10/10/15, 9 iterations, 2 epochs); the rest are engine choices.
struct RunConfig {
  SplitSizes split;
  McConfig mc;
  SelectionQuotas quotas;
  PseudoPolicy pseudo;
  TrainConfig train;
  std::size_t iterations = 9;
  double binarize_threshold = 0.5;
  std::uint64_t seed = 42;
  bool warm_start = true;
  Strategy strategy = Strategy::kCeal;
  ScoreKind rank_by = ScoreKind::kRaw;
  bool record_timing = false;  // elapsed_ms stays 0 so logs are reproducible
  std::size_t threads = 0;     // 0 = hardware concurrency

  void validate() const;
};

// Plain key=value lines, '#' starts a comment. Unknown keys, duplicate keys
// and malformed values raise ConfigError naming the line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Canonical key=value rendering of every key; parse_config(format_config(c))
// reproduces c.
std::string format_config(const RunConfig& cfg);

// "key  default  description" lines for --help.
std::string config_reference();

const char* strategy_name(Strategy s);

}  // namespace ceal
