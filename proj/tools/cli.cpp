#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ceal/distance.hpp"
#include "ceal/metrics.hpp"
#include "ceal/orchestrator.hpp"
#include "ceal/predictor.hpp"
#include "ceal/run_config.hpp"
#include "ceal/synthdata.hpp"
#include "ceal/umap.hpp"
#include "ceal/uncertainty.hpp"

namespace ceal::cli {
namespace fs = std::filesystem;
namespace {

struct GenerateArgs {
  std::string out;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  SynthParams params;
};

struct RunArgs {
  std::string data;
  std::string config;
  std::string log;
  std::string baseline;
  std::string external_cmd;
  std::string workdir;
  std::string regions;
  std::string save_model;
  bool timing = false;
  bool quiet = false;
};

struct ScoreArgs {
  std::string image;
  std::string passes;
  std::string model;
  std::size_t t_steps = 10;
  double dropout_p = 0.5;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  std::string dump_umap;
  std::string dump_dist;
};

struct ReportArgs {
  std::string log;
  std::string regions;
  std::size_t bins = 10;
};

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const auto manifest = generate_dataset(a.n, a.params, a.seed, a.out);
  out << manifest.string() << '\n';
  return kExitOk;
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
  if (!a.baseline.empty()) cfg.strategy = a.baseline == "random" ? Strategy::kRandom : Strategy::kCeal;
  if (a.timing) cfg.record_timing = true;
  cfg.validate();

  const auto dataset = load_dataset(a.data);
  PredictorFactory factory;
  if (!a.external_cmd.empty()) {
    const auto workdir = a.workdir.empty() ? (fs::path(a.log).parent_path() / "external_work").string()
                                           : a.workdir;
    factory = [cmd = a.external_cmd, workdir](const RunConfig&) {
      return std::make_unique<ExternalPredictor>(cmd, workdir);
    };
  } else {
    factory = [](const RunConfig& c) { return std::make_unique<RefPredictor>(c.mc.dropout_p); };
  }

  auto progress = [&](const IterationRecord& r) {
    if (a.quiet) return;
    err << "iteration " << r.iteration << ": labeled=" << r.n_labeled << " pseudo=" << r.n_pseudo
        << " mean_dice=" << real(r.mean_test_dice) << '\n';
  };
  std::unique_ptr<StochasticPredictor> final_model;
  const auto log = run(cfg, dataset, factory, progress, &final_model);

  {
    std::ofstream csv(a.log, std::ios::trunc);
    if (!csv) throw IoError("cannot write run log", a.log);
    write_run_log_csv(csv, log);
  }
  {
    const auto sidecar = a.log + ".config";
    std::ofstream echo(sidecar, std::ios::trunc);
    if (!echo) throw IoError("cannot write config echo", sidecar);
    echo << format_config(cfg);
  }
  if (!a.regions.empty()) {
    std::ofstream csv(a.regions, std::ios::trunc);
    if (!csv) throw IoError("cannot write region table", a.regions);
    write_region_csv(csv, log.final_regions);
  }
  if (!a.save_model.empty()) {
    const auto* ref = dynamic_cast<const RefPredictor*>(final_model.get());
    if (!ref) throw ArgumentError("--save-model needs the reference predictor");
    save_model(a.save_model, *ref);
  }
  out << a.log << '\n';
  return kExitOk;
}

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const auto image = load_pgm(a.image);
  std::vector<ProbMap> passes;
  if (!a.passes.empty()) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.passes)) {
      const auto name = entry.path().filename().string();
      if (name.starts_with("pass_") && name.ends_with(".umap")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto map = from_float_map<ProbMap>(load_umap(f.string()));
      if (!map.same_shape(image)) throw FormatError("pass " + f.string() + " does not match the image size");
      passes.push_back(std::move(map));
    }
  } else {
    const auto model = load_model(a.model);
    passes = model.predict_passes(image, a.t_steps, a.dropout_p, a.seed);
  }
  if (passes.size() < 2) throw FormatError("score: need at least two passes, got " + std::to_string(passes.size()));

  VarianceAccumulator acc(image.width(), image.height());
  for (const auto& p : passes) acc.update(p);
  const auto mc = acc.finalize();
  const auto predicted = binarize(mc.mean, a.threshold);
  const auto scored = score_sample(mc.variance, predicted);
  const bool empty = count_foreground(predicted) == 0;

  out << "passes=" << passes.size() << '\n'
      << "raw_score=" << real(scored.score.raw) << '\n'
      << "normalized_score=" << real(scored.score.normalized) << '\n'
      << "empty_prediction=" << (empty ? 1 : 0) << '\n'
      << "degenerate=" << (scored.degenerate ? 1 : 0) << '\n';

  if (!a.dump_umap.empty()) save_umap(a.dump_umap, to_float_map(mc.variance));
  if (!a.dump_dist.empty()) {
    if (empty)
      err << "score: empty prediction has no contour; distance map not written\n";
    else
      save_umap(a.dump_dist, to_float_map(edt_exact(extract_contour(predicted))));
  }
  return kExitOk;
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::ifstream in(a.log);
  if (!in) throw IoError("cannot open run log", a.log);
  const auto rows = read_run_log_csv(in);
  out << "iteration  n_labeled  n_pseudo  mean_dice  median_dice\n";
  for (const auto& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%9zu  %9zu  %8zu  %9.4f  %11.4f\n", r.iteration, r.n_labeled, r.n_pseudo,
                  r.mean_test_dice, r.median_test_dice);
    out << buf;
  }
  if (!a.regions.empty()) {
    std::ifstream rin(a.regions);
    if (!rin) throw IoError("cannot open region table", a.regions);
    const auto regions = read_region_csv(rin);
    std::vector<double> raw;
    for (const auto& r : regions) raw.push_back(r.raw_score);
    const auto h = region_histogram(raw, a.bins);
    out << "\nbin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b)
      out << real(h.edges[b]) << ',' << real(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cost-effective active learning for binary segmentation", "ceal"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic lesion dataset");
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--n", gen.n, "Number of samples")->required();
  generate->add_option("--seed", gen.seed, "Dataset seed")->required();
  generate->add_option("--size", gen.params.image_size, "Image side in pixels")->capture_default_str();
  generate->add_option("--noise", gen.params.noise_sigma, "Gaussian noise sigma")->capture_default_str();
  generate->add_option("--empty-frac", gen.params.empty_fraction, "Fraction of lesion-free samples")
      ->capture_default_str();
  generate->add_option("--min-axis", gen.params.min_axis, "Smallest ellipse semi-axis")->capture_default_str();
  generate->add_option("--max-axis", gen.params.max_axis, "Largest ellipse semi-axis")->capture_default_str();
  generate->add_option("--distractors", gen.params.distractor_count, "Lesion-free blobs per image")
      ->capture_default_str();

  RunArgs runa;
  auto* runc = app.add_subcommand("run", "Run the active learning loop");
  runc->add_option("--data", runa.data, "Dataset directory (manifest.txt + PGMs)")->required();
  runc->add_option("--config", runa.config, "key=value config file; missing keys take defaults");
  runc->add_option("--log", runa.log, "RunLog CSV output")->required();
  runc->add_option("--baseline", runa.baseline, "Acquisition strategy")
      ->check(CLI::IsMember({"ceal", "random"}));
  runc->add_option("--external-cmd", runa.external_cmd,
                   "External predictor, called as <cmd> <input.pgm> <outdir> <T> <p_d> <seed>");
  runc->add_option("--workdir", runa.workdir, "Scratch directory for the external predictor");
  runc->add_option("--regions", runa.regions, "Region table CSV of the final scoring");
  runc->add_option("--save-model", runa.save_model, "Write the final reference model");
  runc->add_flag("--timing", runa.timing, "Record wall-clock elapsed_ms");
  runc->add_flag("--quiet", runa.quiet, "No per-iteration progress on stderr");
  runc->footer("Config keys (key default description):\n" + config_reference());

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "Uncertainty score of one image");
  score->add_option("--image", sc.image, "Input PGM")->required()->check(CLI::ExistingFile);
  auto* passes_opt = score->add_option("--passes", sc.passes, "Directory of pass_NNN.umap files")
                         ->check(CLI::ExistingDirectory);
  auto* model_opt = score->add_option("--model", sc.model, "Reference model file")->check(CLI::ExistingFile);
  passes_opt->excludes(model_opt);
  score->add_option("--t", sc.t_steps, "MC passes with --model")->capture_default_str();
  score->add_option("--dropout-p", sc.dropout_p, "Dropout probability with --model")->capture_default_str();
  score->add_option("--seed", sc.seed, "Pass seed with --model")->capture_default_str();
  score->add_option("--threshold", sc.threshold, "Binarization threshold")->capture_default_str();
  score->add_option("--dump-umap", sc.dump_umap, "Write the variance map as UMAP");
  score->add_option("--dump-dist", sc.dump_dist, "Write the distance map as UMAP");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Summarize a run log");
  report->add_option("--log", rep.log, "RunLog CSV")->required();
  report->add_option("--regions", rep.regions, "Region table CSV");
  report->add_option("--bins", rep.bins, "Histogram bins")->capture_default_str()->check(CLI::PositiveNumber);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (score->parsed() && sc.passes.empty() && sc.model.empty())
      throw CLI::RequiredError("--passes or --model");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, out);
    if (runc->parsed()) return cmd_run(runa, out, err);
    if (score->parsed()) return cmd_score(sc, out, err);
    if (report->parsed()) return cmd_report(rep, out);
  } catch (const IterationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace ceal::cli
