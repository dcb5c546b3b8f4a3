#include "pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "csv.hpp"
#include "json.hpp"

namespace koop {

namespace fs = std::filesystem;
using nlohmann::json;

std::string library_version() { return "koopman 0.1.0"; }

namespace {

class StageClock {
 public:
  StageClock(PipelineState& state, std::string name)
      : state_(state), name_(std::move(name)),
        start_(std::chrono::steady_clock::now()) {}
  ~StageClock() {
    const auto end = std::chrono::steady_clock::now();
    state_.timings.push_back(
        {name_, std::chrono::duration<double>(end - start_).count()});
  }

 private:
  PipelineState& state_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

fs::path out_path(const PipelineState& state, const std::string& name) {
  fs::create_directories(state.cfg.output_dir);
  return fs::path(state.cfg.output_dir) / name;
}

fs::path plot_path(const PipelineState& state, const std::string& name) {
  const fs::path dir = fs::path(state.cfg.output_dir) / "plots";
  fs::create_directories(dir);
  return dir / name;
}

int effective_l1(const PipelineState& state) {
  return std::min(state.cfg.selection.l1, state.basis.l());
}

void write_series_csv(const std::string& path, const Mat& series, double dt,
                      double t0) {
  const int m = static_cast<int>(series.rows());
  const int n = static_cast<int>(series.cols());
  std::vector<std::string> header{"t"};
  for (int c = 0; c < m; ++c) header.push_back("c" + std::to_string(c));
  Mat rows(n, m + 1);
  for (int i = 0; i < n; ++i) {
    rows(i, 0) = t0 + i * dt;
    rows.row(i).tail(m) = series.col(i).transpose();
  }
  write_csv(path, header, rows);
}

}  // namespace

bool PipelineConfig::is_benchmark() const {
  return source == "torus" || source == "l63" || source == "product";
}

void PipelineConfig::validate() const {
  if (n < 2) throw std::invalid_argument("config: n must be >= 2");
  if (dt <= 0.0) throw std::invalid_argument("config: dt must be positive");
  KernelSpec::from_name(kernel, 1.0);  // validates the family name
  if (selection.l0 < 1 || selection.l1 <= selection.l0)
    throw std::invalid_argument("config: selection needs 1 <= l0 < l1");
  if (basis_size() < selection.l1)
    throw std::invalid_argument("config: l must be >= l1");
  if (!is_benchmark() && delays < 1)
    throw std::invalid_argument(
        "config: delays must be set explicitly for external data");
  if (!is_benchmark() && !fs::exists(source))
    throw std::invalid_argument("config: input file not found: " + source);
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }

  PipelineConfig cfg;
  try {
    cfg.source = j.value("source", cfg.source);
    cfg.n = j.value("n", cfg.n);
    cfg.dt = j.value("dt", cfg.dt);
    if (j.contains("x0")) cfg.x0 = j.at("x0").get<std::vector<double>>();
    cfg.spinup = j.value("spinup", cfg.spinup);
    cfg.delays = j.value("delays", cfg.delays);
    cfg.kernel = j.value("kernel", cfg.kernel);
    if (j.contains("epsilon")) {
      const json& e = j.at("epsilon");
      if (e.is_string()) {
        if (e.get<std::string>() != "auto")
          throw std::invalid_argument("config: epsilon must be a number or \"auto\"");
        cfg.epsilon = 0.0;
      } else {
        cfg.epsilon = e.get<double>();
      }
    }
    cfg.l = j.value("l", cfg.l);
    cfg.selection.l0 = j.value("l0", cfg.selection.l0);
    cfg.selection.l1 = j.value("l1", cfg.selection.l1);
    cfg.selection.delta0 = j.value("delta0", cfg.selection.delta0);
    cfg.selection.delta1 = j.value("delta1", cfg.selection.delta1);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.baseline = j.value("baseline", cfg.baseline);
    cfg.cache_basis = j.value("cache_basis", cfg.cache_basis);
    cfg.dense_threshold = j.value("dense_threshold", cfg.dense_threshold);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  // Benchmark defaults for fields left unset.
  if (cfg.is_benchmark()) {
    const FlowSpec flow = FlowSpec::from_name(cfg.source);
    if (cfg.delays < 1) cfg.delays = flow.default_delays();
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string PipelineConfig::to_json_text() const {
  json j;
  j["source"] = source;
  j["n"] = n;
  j["dt"] = dt;
  if (!x0.empty()) j["x0"] = x0;
  j["spinup"] = spinup;
  j["delays"] = delays;
  j["kernel"] = kernel;
  if (epsilon > 0.0)
    j["epsilon"] = epsilon;
  else
    j["epsilon"] = "auto";
  j["l"] = basis_size();
  j["l0"] = selection.l0;
  j["l1"] = selection.l1;
  j["delta0"] = selection.delta0;
  j["delta1"] = selection.delta1;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["baseline"] = baseline;
  j["cache_basis"] = cache_basis;
  j["dense_threshold"] = dense_threshold;
  return j.dump(2) + "\n";
}

Mat ingest_series_csv(const std::string& path, double dt) {
  const CsvTable table = read_csv(path);
  const int ncols = static_cast<int>(table.header.size());
  const int n = static_cast<int>(table.values.rows());
  if (n < 2) throw std::invalid_argument(path + ": need at least 2 samples");

  const bool has_t = table.header[0] == "t";
  const int first = has_t ? 1 : 0;
  if (ncols - first < 1)
    throw std::invalid_argument(path + ": no observable columns");

  if (has_t) {
    for (int i = 1; i < n; ++i) {
      const double spacing = table.values(i, 0) - table.values(i - 1, 0);
      if (std::abs(spacing - dt) > 1e-9 * std::max(std::abs(dt), 1.0))
        throw std::invalid_argument(
            path + ": non-uniform timestamps at row " + std::to_string(i + 2) +
            " (spacing " + format_double(spacing) + ", expected " +
            format_double(dt) + ")");
    }
  }
  return table.values.rightCols(ncols - first).transpose();
}

void stage_generate(PipelineState& state) {
  if (state.have_series) return;
  StageClock clock(state, "generate");
  const PipelineConfig& cfg = state.cfg;
  cfg.validate();

  if (cfg.is_benchmark()) {
    const FlowSpec flow = FlowSpec::from_name(cfg.source);
    TrajectoryConfig tc;
    tc.n = cfg.n;
    tc.dt = cfg.dt;
    tc.spinup = cfg.spinup;
    if (!cfg.x0.empty())
      tc.x0 = Eigen::Map<const Vec>(cfg.x0.data(),
                                    static_cast<Eigen::Index>(cfg.x0.size()));
    const Trajectory traj = generate_trajectory(flow, tc);
    state.series = traj.series;
    state.dt = traj.dt;
  } else {
    state.series = ingest_series_csv(cfg.source, cfg.dt);
    state.dt = cfg.dt;
  }
  state.have_series = true;
  write_series_csv(out_path(state, "trajectory.csv").string(), state.series,
                   state.dt, 0.0);
}

void stage_embed(PipelineState& state) {
  if (state.have_embedded) return;
  stage_generate(state);
  StageClock clock(state, "embed");
  state.embedded = delay_embed(state.series, state.cfg.delays);
  state.have_embedded = true;
  write_series_csv(out_path(state, "embedded.csv").string(),
                   state.embedded.vectors, state.dt,
                   state.embedded.source_offset * state.dt);
}

void stage_spectrum(PipelineState& state) {
  if (state.have_table) return;
  stage_embed(state);
  StageClock clock(state, "spectrum");
  const PipelineConfig& cfg = state.cfg;

  KernelSpec spec = KernelSpec::from_name(cfg.kernel, cfg.epsilon);
  if (spec.family != KernelFamily::Covariance && cfg.epsilon <= 0.0)
    spec.epsilon = tune_bandwidth(state.embedded.vectors);
  state.epsilon_used = spec.epsilon;
  state.gram = std::make_unique<GramOperator>(state.embedded.vectors, spec,
                                              cfg.dense_threshold);

  const int want = std::min(cfg.basis_size(), state.gram->size());
  const fs::path cache = out_path(state, "basis.bin");
  state.basis_from_cache = false;
  if (cfg.cache_basis) {
    auto cached = load_basis(cache.string(), state.gram->fingerprint());
    if (cached && cached->l() >= std::min(want, cached->n)) {
      state.basis = std::move(*cached);
      state.basis_from_cache = true;
    }
  }
  if (!state.basis_from_cache) {
    state.basis = top_eigenpairs(*state.gram, want, cfg.seed);
    if (cfg.cache_basis)
      save_basis(cache.string(), state.basis, state.gram->fingerprint());
  }
  state.have_basis = true;

  if (state.basis.l() < cfg.selection.l0)
    throw std::runtime_error(
        "numerical rank " + std::to_string(state.basis.l()) +
        " is below l0 = " + std::to_string(cfg.selection.l0));
  const int l1 = effective_l1(state);
  if (l1 < cfg.selection.l1)
    std::fprintf(stderr, "warning: l1 clamped to numerical rank %d\n", l1);

  const FrequencyGrid grid =
      FrequencyGrid::dft(static_cast<int>(state.embedded.vectors.cols()),
                         state.dt);
  state.table = norm_table(state.basis, grid, {cfg.selection.l0, l1});
  state.have_table = true;

  Mat rows(grid.n, 4);
  for (int i = 0; i < grid.n; ++i) {
    rows(i, 0) = grid.omegas[i];
    rows(i, 1) = state.table.w(i, 0);
    rows(i, 2) = state.table.w(i, 1);
    rows(i, 3) = growth_ratio(rows(i, 1), rows(i, 2));
  }
  write_csv(out_path(state, "norms.csv").string(),
            {"omega", "w_l0", "w_l1", "ratio"}, rows);
}

namespace {

void write_plot_data(PipelineState& state) {
  const FrequencyGrid& grid = state.table.grid;

  write_series_csv(plot_path(state, "timeseries.csv").string(), state.series,
                   state.dt, 0.0);

  Mat w0(grid.n, 2), ratio(grid.n, 2);
  for (int i = 0; i < grid.n; ++i) {
    w0(i, 0) = grid.omegas[i];
    w0(i, 1) = state.table.w(i, 0);
    ratio(i, 0) = grid.omegas[i];
    ratio(i, 1) = growth_ratio(state.table.w(i, 0), state.table.w(i, 1));
  }
  write_csv(plot_path(state, "norms_l0.csv").string(), {"omega", "w_l0"}, w0);
  write_csv(plot_path(state, "ratio.csv").string(), {"omega", "ratio"}, ratio);

  // (omega, l, w_{N,l}) surface for the selected frequencies at 20 levels
  // between l0 and l1.
  const int l0 = state.cfg.selection.l0;
  const int l1 = effective_l1(state);
  constexpr int kLevels = 20;
  Mat surface(static_cast<int>(state.candidates.size()) * kLevels, 3);
  int row = 0;
  for (const CandidateEigenpair& c : state.candidates) {
    const int freq_index = state.table.grid.index_of_r(c.r);
    for (int s = 0; s < kLevels; ++s) {
      const int l = l0 + static_cast<int>(std::lround(
                             (static_cast<double>(s) / (kLevels - 1)) * (l1 - l0)));
      surface(row, 0) = c.omega;
      surface(row, 1) = l;
      surface(row, 2) = state.table.w_at(freq_index, l);
      ++row;
    }
  }
  write_csv(plot_path(state, "surface.csv").string(), {"omega", "l", "w"},
            surface);
}

}  // namespace

void stage_select(PipelineState& state) {
  if (state.have_candidates) return;
  stage_spectrum(state);
  StageClock clock(state, "select");

  SelectionConfig sel = state.cfg.selection;
  sel.l1 = effective_l1(state);
  state.candidates = select_frequencies(state.table, sel);

  const int n_emb = static_cast<int>(state.embedded.vectors.cols());
  state.eigenfunctions.clear();
  json list = json::array();
  int index = 0;
  for (const CandidateEigenpair& c : state.candidates) {
    NystromFunction h = nystrom_extend(
        state.basis, fourier_function(c.omega, n_emb, state.dt), sel.l1, c.omega);

    char name[64];
    std::snprintf(name, sizeof name, "eigenfunction_%03d.csv", index);
    Mat rows(n_emb, 3);
    for (int m = 0; m < n_emb; ++m) {
      rows(m, 0) = m;
      rows(m, 1) = h.coeffs[m].real();
      rows(m, 2) = h.coeffs[m].imag();
    }
    write_csv(out_path(state, name).string(), {"n", "re", "im"}, rows);

    json entry;
    entry["omega"] = c.omega;
    entry["r"] = c.r;
    entry["w_l0"] = c.w_l0;
    entry["w_l1"] = c.w_l1;
    entry["ratio"] = c.ratio;
    entry["weights"] = name;
    list.push_back(entry);

    state.eigenfunctions.push_back(std::move(h));
    ++index;
  }
  std::ofstream out(out_path(state, "candidates.json"));
  out << list.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write candidates.json");
  state.have_candidates = true;

  write_plot_data(state);
}

void stage_baseline(PipelineState& state) {
  if (state.have_dft) return;
  stage_embed(state);
  StageClock clock(state, "baseline");

  const FrequencyGrid grid =
      FrequencyGrid::dft(static_cast<int>(state.series.cols()), state.dt);
  state.dft = harmonic_average(state.series, grid);
  state.have_dft = true;

  Mat rows(grid.n, 2);
  rows.col(0) = grid.omegas;
  rows.col(1) = state.dft.power;
  write_csv(out_path(state, "spectrum_dft.csv").string(), {"omega", "power"},
            rows);

  if (state.cfg.kernel == "covariance") {
    const FrequencyGrid egrid = FrequencyGrid::dft(
        static_cast<int>(state.embedded.vectors.cols()), state.dt);
    const CovarianceBaseline cb =
        covariance_rkhs_norms(state.embedded.vectors, egrid);
    Mat crows(egrid.n, 3);
    crows.col(0) = egrid.omegas;
    crows.col(1) = cb.w_rkhs;
    crows.col(2) = cb.power;
    write_csv(out_path(state, "covariance_comparison.csv").string(),
              {"omega", "w_rkhs", "power"}, crows);
  }
}

void write_manifest(PipelineState& state) {
  json m;
  m["version"] = library_version();
  m["config"] = json::parse(state.cfg.to_json_text());
  m["epsilon_used"] = state.epsilon_used;
  if (state.gram) {
    char fp[32];
    std::snprintf(fp, sizeof fp, "%016llx",
                  static_cast<unsigned long long>(state.gram->fingerprint()));
    m["kernel_fingerprint"] = fp;
  }
  if (state.have_embedded)
    m["n_embedded"] = static_cast<int>(state.embedded.vectors.cols());
  if (state.have_basis) {
    json b;
    b["l"] = state.basis.l();
    b["lambda_max"] = state.basis.lambdas.size() ? state.basis.lambdas[0] : 0.0;
    b["lambda_min"] = state.basis.lambdas.size()
                          ? state.basis.lambdas[state.basis.l() - 1]
                          : 0.0;
    b["max_residual"] =
        state.basis.residuals.size() ? state.basis.residuals.maxCoeff() : 0.0;
    b["truncated"] = state.basis.truncated;
    b["degenerate_boundary"] = state.basis.degenerate_boundary;
    b["from_cache"] = state.basis_from_cache;
    m["basis"] = b;
  }
  if (state.have_candidates)
    m["candidates"] = static_cast<int>(state.candidates.size());
  std::ofstream out(out_path(state, "manifest.json"));
  out << m.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write manifest.json");

  // Wall-clock lives in a sidecar so reruns stay byte-identical in the
  // data products and manifest.
  json t = json::array();
  for (const StageTiming& s : state.timings) {
    json e;
    e["stage"] = s.name;
    e["seconds"] = s.seconds;
    t.push_back(e);
  }
  std::ofstream tout(out_path(state, "timings.json"));
  tout << t.dump(2) << "\n";
}

void run_pipeline(PipelineState& state) {
  stage_select(state);
  if (state.cfg.baseline) stage_baseline(state);
  write_manifest(state);
}

void extend_to_points(PipelineState& state, const std::string& weights_csv,
                      const std::string& points_csv, const std::string& out_csv) {
  stage_spectrum(state);

  const CsvTable wt = read_csv(weights_csv);
  if (wt.header != std::vector<std::string>{"n", "re", "im"})
    throw std::invalid_argument(weights_csv + ": expected header n,re,im");
  const int n_emb = static_cast<int>(state.embedded.vectors.cols());
  if (static_cast<int>(wt.values.rows()) != n_emb)
    throw std::invalid_argument(weights_csv + ": weight count " +
                                std::to_string(wt.values.rows()) +
                                " does not match the run (" +
                                std::to_string(n_emb) + " embedded samples)");
  NystromFunction h;
  h.n = n_emb;
  h.coeffs.resize(n_emb);
  for (int i = 0; i < n_emb; ++i) {
    const int idx = static_cast<int>(wt.values(i, 0));
    if (idx < 0 || idx >= n_emb)
      throw std::invalid_argument(weights_csv + ": sample index out of range");
    h.coeffs[idx] = std::complex<double>(wt.values(i, 1), wt.values(i, 2));
  }

  const Mat series = ingest_series_csv(points_csv, state.dt);
  const EmbeddedSeries pts = delay_embed(series, state.cfg.delays);
  if (pts.vectors.rows() != state.embedded.vectors.rows())
    throw std::invalid_argument(points_csv + ": dimension mismatch after embedding");

  const int np = static_cast<int>(pts.vectors.cols());
  Mat rows(np, 3);
  for (int i = 0; i < np; ++i) {
    const std::complex<double> v =
        evaluate(h, *state.gram, Vec(pts.vectors.col(i)));
    rows(i, 0) = (pts.source_offset + i) * state.dt;
    rows(i, 1) = v.real();
    rows(i, 2) = v.imag();
  }
  write_csv(out_csv, {"t", "re", "im"}, rows);
}

}  // namespace koop
