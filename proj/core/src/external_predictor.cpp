#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "ceal/predictor.hpp"
#include "ceal/umap.hpp"

namespace ceal {
namespace fs = std::filesystem;
namespace {

std::string shell_quote(const std::string& arg) {
  std::string out = "'";
  for (const char c : arg) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += '\'';
  return out;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string pass_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "pass_%03zu.umap", index);
  return buf;
}

std::vector<ProbMap> external_predict(const std::string& cmd, const std::string& img_path,
                                      std::size_t t_steps, double dropout_p, std::uint64_t seed,
                                      const std::string& workdir) {
  if (cmd.empty()) throw ArgumentError("external predictor: empty command");
  if (t_steps == 0) throw ArgumentError("external predictor: t_steps must be positive");
  const auto image = load_pgm(img_path);

  const fs::path outdir = fs::path(workdir) / "passes";
  std::error_code ec;
  fs::remove_all(outdir, ec);
  fs::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create directory", outdir.string());

  const std::string line = cmd + " " + shell_quote(img_path) + " " + shell_quote(outdir.string()) +
                           " " + std::to_string(t_steps) + " " + format_real(dropout_p) + " " +
                           std::to_string(seed);
  std::fflush(nullptr);
  const int status = std::system(line.c_str());
  if (status == -1) throw ProtocolError("external predictor: could not spawn command");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    throw ProtocolError("external predictor: command exited with status " + std::to_string(code));
  }

  std::vector<ProbMap> passes;
  passes.reserve(t_steps);
  for (std::size_t k = 0; k < t_steps; ++k) {
    const auto path = outdir / pass_file_name(k);
    const int index = static_cast<int>(k);
    if (!fs::exists(path))
      throw ProtocolError("external predictor: missing pass " + std::to_string(k) + " (" +
                              path.string() + ")",
                          index);
    FloatMap map;
    try {
      map = load_umap(path.string());
    } catch (const std::exception& e) {
      throw ProtocolError("external predictor: pass " + std::to_string(k) + ": " + e.what(), index);
    }
    if (map.width != image.width() || map.height != image.height())
      throw ProtocolError("external predictor: pass " + std::to_string(k) +
                              " has dimensions that differ from the input image",
                          index);
    for (const float v : map.values)
      if (!(v >= 0.0f && v <= 1.0f))
        throw ProtocolError(
            "external predictor: pass " + std::to_string(k) + " has a value outside [0,1]", index);
    passes.push_back(from_float_map<ProbMap>(map));
  }
  return passes;
}

ExternalPredictor::ExternalPredictor(std::string cmd, std::string workdir)
    : cmd_(std::move(cmd)), workdir_(std::move(workdir)) {
  if (cmd_.empty()) throw ArgumentError("external predictor: empty command");
}

void ExternalPredictor::train(std::span<const TrainingExample>, const TrainConfig& cfg, Rng&) {
  cfg.validate();
  ++train_calls_;
}

std::vector<ProbMap> ExternalPredictor::predict_passes(const GrayImage& img, std::size_t t_steps,
                                                       double dropout_p, std::uint64_t seed) const {
  std::error_code ec;
  fs::create_directories(workdir_, ec);
  if (ec) throw IoError("cannot create directory", workdir_);
  const auto input = (fs::path(workdir_) / "input.pgm").string();
  save_pgm(input, img);
  return external_predict(cmd_, input, t_steps, dropout_p, seed, workdir_);
}

// Dropout off is requested as a single pass with p_d = 0.
ProbMap ExternalPredictor::predict_deterministic(const GrayImage& img) const {
  return predict_passes(img, 1, 0.0, 0).front();
}

ProbMap ExternalPredictor::predict_stochastic(const GrayImage& img, double dropout_p, Rng& rng) const {
  return predict_passes(img, 1, dropout_p, rng.next_u64()).front();
}

}  // namespace ceal
