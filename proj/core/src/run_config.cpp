#include "ceal/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace ceal {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Shortest text that parses back to the same double.
std::string fmt_real(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::size_t parse_count(std::string_view v) {
  std::size_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected a non-negative integer");
  return out;
}

std::uint64_t parse_u64(std::string_view v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected a non-negative integer");
  return out;
}

double parse_real(std::string_view v) {
  const std::string s(v);
  std::size_t used = 0;
  const double out = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("expected a real number");
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected true or false");
}

struct Key {
  std::string name;
  std::string help;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Field>
Key count_key(std::string name, std::string help, Field field) {
  return {std::move(name), std::move(help),
          [field](RunConfig& c, std::string_view v) { std::invoke(field, c) = parse_count(v); },
          [field](const RunConfig& c) { return std::to_string(std::invoke(field, c)); }};
}

template <typename Field>
Key real_key(std::string name, std::string help, Field field) {
  return {std::move(name), std::move(help),
          [field](RunConfig& c, std::string_view v) { std::invoke(field, c) = parse_real(v); },
          [field](const RunConfig& c) { return fmt_real(std::invoke(field, c)); }};
}

template <typename Field>
Key bool_key(std::string name, std::string help, Field field) {
  return {std::move(name), std::move(help),
          [field](RunConfig& c, std::string_view v) { std::invoke(field, c) = parse_bool(v); },
          [field](const RunConfig& c) {
            return std::string(std::invoke(field, c) ? "true" : "false");
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(count_key("split_labeled", "initial labeled set size (protocol value)",
                          [](auto& c) -> auto& { return c.split.labeled; }));
    k.push_back(count_key("split_unlabeled", "unlabeled pool size (protocol value)",
                          [](auto& c) -> auto& { return c.split.unlabeled; }));
    k.push_back(count_key("split_test", "test set size (protocol value)",
                          [](auto& c) -> auto& { return c.split.test; }));
    k.push_back(count_key("t_steps", "MC dropout passes T (protocol value)",
                          [](auto& c) -> auto& { return c.mc.t_steps; }));
    k.push_back(real_key("dropout_p", "dropout probability p_d (protocol value)",
                         [](auto& c) -> auto& { return c.mc.dropout_p; }));
    k.push_back(count_key("quota_no_detection", "oracle picks among empty predictions (protocol value)",
                          [](auto& c) -> auto& { return c.quotas.no_detection; }));
    k.push_back(count_key("quota_uncertain", "oracle picks by highest score (protocol value)",
                          [](auto& c) -> auto& { return c.quotas.most_uncertain; }));
    k.push_back(count_key("quota_random", "uniform oracle picks (protocol value)",
                          [](auto& c) -> auto& { return c.quotas.random; }));
    k.push_back(real_key("pseudo_delta0", "initial pseudo-label score threshold (engine choice)",
                         [](auto& c) -> auto& { return c.pseudo.delta0; }));
    k.push_back(real_key("pseudo_decay", "threshold decrement per iteration (engine choice)",
                         [](auto& c) -> auto& { return c.pseudo.decay; }));
    k.push_back(real_key("pseudo_floor", "minimum pseudo-label threshold (engine choice)",
                         [](auto& c) -> auto& { return c.pseudo.floor; }));
    k.push_back(count_key("iterations", "active learning iterations (protocol value)",
                          [](auto& c) -> auto& { return c.iterations; }));
    k.push_back(count_key("epochs", "training epochs per iteration (protocol value)",
                          [](auto& c) -> auto& { return c.train.epochs; }));
    k.push_back(real_key("learning_rate", "SGD learning rate (engine choice)",
                         [](auto& c) -> auto& { return c.train.learning_rate; }));
    k.push_back(bool_key("augment", "add horizontal and vertical flips when training",
                         [](auto& c) -> auto& { return c.train.augment; }));
    k.push_back(count_key("batch_size", "SGD pixel batch size (engine choice)",
                          [](auto& c) -> auto& { return c.train.batch_size; }));
    k.push_back(count_key("max_pixels_per_image", "pixel subsample cap per image and epoch (engine choice)",
                          [](auto& c) -> auto& { return c.train.max_pixels_per_image; }));
    k.push_back(real_key("binarize_threshold", "probability threshold for predicted masks",
                         [](auto& c) -> auto& { return c.binarize_threshold; }));
    k.push_back({"seed", "master seed",
                 [](RunConfig& c, std::string_view v) { c.seed = parse_u64(v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    k.push_back(bool_key("warm_start", "continue from current weights each iteration",
                         [](auto& c) -> auto& { return c.warm_start; }));
    k.push_back({"strategy", "ceal or random (random acquisition baseline)",
                 [](RunConfig& c, std::string_view v) {
                   if (v == "ceal")
                     c.strategy = Strategy::kCeal;
                   else if (v == "random")
                     c.strategy = Strategy::kRandom;
                   else
                     throw std::invalid_argument("expected ceal or random");
                 },
                 [](const RunConfig& c) { return std::string(strategy_name(c.strategy)); }});
    k.push_back({"rank_by", "raw or normalized uncertainty score",
                 [](RunConfig& c, std::string_view v) {
                   if (v == "raw")
                     c.rank_by = ScoreKind::kRaw;
                   else if (v == "normalized")
                     c.rank_by = ScoreKind::kNormalized;
                   else
                     throw std::invalid_argument("expected raw or normalized");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.rank_by == ScoreKind::kRaw ? "raw" : "normalized");
                 }});
    k.push_back(bool_key("record_timing", "write wall-clock elapsed_ms instead of 0",
                         [](auto& c) -> auto& { return c.record_timing; }));
    k.push_back(count_key("threads", "scoring threads, 0 = hardware concurrency",
                          [](auto& c) -> auto& { return c.threads; }));
    return k;
  }();
  return table;
}

}  // namespace

const char* strategy_name(Strategy s) { return s == Strategy::kCeal ? "ceal" : "random"; }

void RunConfig::validate() const {
  try {
    mc.validate();
    pseudo.validate();
    train.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  if (iterations < 1) throw ConfigError("config: iterations must be >= 1");
  if (!(binarize_threshold >= 0.0 && binarize_threshold <= 1.0))
    throw ConfigError("config: binarize_threshold must lie in [0,1]");
  if (split.test == 0) throw ConfigError("config: split_test must be positive");
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = "config line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key=value");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == key; });
    if (it == table.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    try {
      it->set(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config", path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) out += k.name + "=" + k.get(cfg) + "\n";
  return out;
}

std::string config_reference() {
  const RunConfig defaults;
  std::string out;
  for (const auto& k : keys()) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "  %-22s %-8s %s\n", k.name.c_str(), k.get(defaults).c_str(),
                  k.help.c_str());
    out += buf;
  }
  return out;
}

}  // namespace ceal
