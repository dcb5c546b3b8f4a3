// Command-line front end for the Koopman eigenfrequency detection library.
// All numerical work happens behind the C API in libkoopman.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "koopman/koopman.h"

namespace {

using nlohmann::json;

struct Options {
  std::string config_path;
  std::string source, kernel, epsilon, output_dir;
  int n = -1, delays = -1, l = -1, l0 = -1, l1 = -1;
  double dt = -1.0, delta0 = -1.0, delta1 = -1.0;
  long long seed = -1;
  bool baseline = false, no_baseline = false, cache_basis = false;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("-c,--config", opt.config_path, "JSON config file");
  cmd->add_option("-s,--source", opt.source,
                  "benchmark (torus|l63|product) or series CSV path");
  cmd->add_option("-n,--samples", opt.n, "number of samples");
  cmd->add_option("--dt", opt.dt, "sampling interval");
  cmd->add_option("-Q,--delays", opt.delays, "delay-embedding window");
  cmd->add_option("-k,--kernel", opt.kernel,
                  "kernel family: markov-gaussian|gaussian|covariance");
  cmd->add_option("-e,--epsilon", opt.epsilon,
                  "kernel bandwidth, or 'auto' to tune");
  cmd->add_option("-l,--basis", opt.l, "number of kernel eigenpairs");
  cmd->add_option("--l0", opt.l0, "lower truncation level");
  cmd->add_option("--l1", opt.l1, "upper truncation level");
  cmd->add_option("--delta0", opt.delta0, "norm threshold (step 2)");
  cmd->add_option("--delta1", opt.delta1, "growth-ratio threshold (step 3)");
  cmd->add_option("--seed", opt.seed, "eigensolver RNG seed");
  cmd->add_option("-o,--output", opt.output_dir, "output directory");
  cmd->add_flag("--baseline", opt.baseline, "also run the DFT baseline");
  cmd->add_flag("--no-baseline", opt.no_baseline, "skip the DFT baseline");
  cmd->add_flag("--cache-basis", opt.cache_basis,
                "reuse the eigenbasis cache when the kernel matches");
}

// Merge the config file (if any) with command-line overrides into one JSON
// document; the library owns validation and defaults.
std::string build_config(const Options& opt) {
  json j = json::object();
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw std::runtime_error("cannot open config: " + opt.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    j = json::parse(ss.str());
  }
  if (!opt.source.empty()) j["source"] = opt.source;
  if (opt.n >= 0) j["n"] = opt.n;
  if (opt.dt > 0.0) j["dt"] = opt.dt;
  if (opt.delays >= 0) j["delays"] = opt.delays;
  if (!opt.kernel.empty()) j["kernel"] = opt.kernel;
  if (!opt.epsilon.empty()) {
    if (opt.epsilon == "auto")
      j["epsilon"] = "auto";
    else
      j["epsilon"] = std::stod(opt.epsilon);
  }
  if (opt.l >= 0) j["l"] = opt.l;
  if (opt.l0 >= 0) j["l0"] = opt.l0;
  if (opt.l1 >= 0) j["l1"] = opt.l1;
  if (opt.delta0 >= 0.0) j["delta0"] = opt.delta0;
  if (opt.delta1 >= 0.0) j["delta1"] = opt.delta1;
  if (opt.seed >= 0) j["seed"] = opt.seed;
  if (!opt.output_dir.empty()) j["output_dir"] = opt.output_dir;
  if (opt.baseline) j["baseline"] = true;
  if (opt.no_baseline) j["baseline"] = false;
  if (opt.cache_basis) j["cache_basis"] = true;
  return j.dump();
}

int exit_code(int status) {
  switch (status) {
    case KP_OK: return 0;
    case KP_ECONFIG:
    case KP_EIO: return 1;
    default: return 2;
  }
}

int report(int status) {
  if (status != KP_OK)
    std::fprintf(stderr, "error: %s\n", kp_last_error());
  return exit_code(status);
}

void print_selection(kp_ctx* ctx) {
  int count = 0;
  if (kp_candidate_count(ctx, &count) != KP_OK) return;
  std::printf("selected %d frequencies\n", count);
  std::printf("%14s %14s %14s %14s\n", "omega", "w_l0", "w_l1", "ratio");
  for (int i = 0; i < count; ++i) {
    double omega = 0, w0 = 0, w1 = 0, ratio = 0;
    kp_candidate(ctx, i, &omega, &w0, &w1, &ratio);
    std::printf("%14.6g %14.6g %14.6g %14.6g\n", omega, w0, w1, ratio);
  }
}

void warn_degenerate(kp_ctx* ctx) {
  int flag = 0;
  if (kp_degenerate_boundary(ctx, &flag) == KP_OK && flag)
    std::fprintf(stderr,
                 "warning: eigenvalue at the truncation boundary is "
                 "degenerate; results may depend on the eigensolver seed\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Koopman eigenfrequency detection from sampled trajectories"};
  app.require_subcommand(1);

  Options opt;
  std::string weights_csv, points_csv, extend_out = "extended.csv";

  CLI::App* generate = app.add_subcommand(
      "generate", "generate benchmark data or ingest a series CSV");
  CLI::App* embed = app.add_subcommand("embed", "delay-coordinate embedding");
  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "kernel eigendecomposition and RKHS norm table");
  CLI::App* select =
      app.add_subcommand("select", "detect eigenfrequencies (Algorithm E)");
  CLI::App* baseline =
      app.add_subcommand("baseline", "DFT power spectrum baseline");
  CLI::App* extend = app.add_subcommand(
      "extend", "evaluate stored eigenfunction weights at new points");
  CLI::App* run = app.add_subcommand("run", "full pipeline with manifest");
  for (CLI::App* cmd : {generate, embed, spectrum, select, baseline, extend, run})
    add_common(cmd, opt);
  extend->add_option("--weights", weights_csv, "weights CSV (n,re,im)")
      ->required();
  extend->add_option("--points", points_csv, "series CSV to evaluate at")
      ->required();
  extend->add_option("--out", extend_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::string config_text;
  try {
    config_text = build_config(opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  kp_ctx* ctx = nullptr;
  int status = kp_ctx_create_from_json(config_text.c_str(), &ctx);
  if (status != KP_OK) return report(status);

  if (generate->parsed()) {
    status = kp_generate(ctx);
  } else if (embed->parsed()) {
    status = kp_embed(ctx);
  } else if (spectrum->parsed()) {
    status = kp_spectrum(ctx);
    if (status == KP_OK) warn_degenerate(ctx);
  } else if (select->parsed()) {
    status = kp_select(ctx);
    if (status == KP_OK) {
      warn_degenerate(ctx);
      print_selection(ctx);
    }
  } else if (baseline->parsed()) {
    status = kp_baseline(ctx);
  } else if (extend->parsed()) {
    status = kp_extend(ctx, weights_csv.c_str(), points_csv.c_str(),
                       extend_out.c_str());
  } else if (run->parsed()) {
    status = kp_run(ctx);
    if (status == KP_OK) {
      warn_degenerate(ctx);
      print_selection(ctx);
    }
  }

  const int rc = report(status);
  kp_ctx_destroy(ctx);
  return rc;
}
