#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "baseline.hpp"
#include "dynamics.hpp"
#include "embedding.hpp"
#include "selection.hpp"

namespace koop {

// Full configuration for a pipeline run. Parsed from a JSON file; every
// field has a default, and benchmark sources fill dt, Q, x0 and spinup
// from the corresponding system when left unset.
struct PipelineConfig {
  std::string source = "torus";  // benchmark name or path to a series CSV
  int n = 10000;
  double dt = 0.01;
  std::vector<double> x0;    // empty -> benchmark default
  double spinup = -1.0;      // time units; < 0 -> benchmark default
  int delays = -1;           // Q; < 0 -> benchmark default
  std::string kernel = "markov-gaussian";
  double epsilon = 0.0;      // <= 0 -> autotune
  int l = 0;                 // spectral basis size; 0 -> selection.l1
  SelectionConfig selection;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  bool baseline = true;       // also emit the DFT power spectrum
  bool cache_basis = false;   // reuse out/basis.bin across runs
  int dense_threshold = GramOperator::kDefaultDenseThreshold;

  static PipelineConfig from_json_file(const std::string& path);
  static PipelineConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  bool is_benchmark() const;
  int basis_size() const { return l > 0 ? l : selection.l1; }
  void validate() const;
};

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

// In-memory state threaded through the pipeline stages. Each stage runs its
// missing prerequisites, so the CLI subcommands can be invoked directly.
struct PipelineState {
  PipelineConfig cfg;

  Mat series;  // m x N observation series
  double dt = 0.0;
  bool have_series = false;

  EmbeddedSeries embedded;
  bool have_embedded = false;

  std::unique_ptr<GramOperator> gram;
  double epsilon_used = 0.0;

  SpectralBasis basis;
  bool have_basis = false;
  bool basis_from_cache = false;

  NormTable table;
  bool have_table = false;

  std::vector<CandidateEigenpair> candidates;
  std::vector<NystromFunction> eigenfunctions;
  bool have_candidates = false;

  PowerSpectrum dft;
  bool have_dft = false;

  std::vector<StageTiming> timings;
};

// Stage entry points; each writes its artifacts under cfg.output_dir and
// records wall-clock in state.timings.
void stage_generate(PipelineState& state);   // generate or ingest the series
void stage_embed(PipelineState& state);      // delay embedding
void stage_spectrum(PipelineState& state);   // kernel + eigensolve + norms
void stage_select(PipelineState& state);     // frequency detection
void stage_baseline(PipelineState& state);   // DFT (+ covariance comparison)
void write_manifest(PipelineState& state);   // manifest.json + timings.json

// generate .. select (+ baseline when configured) + manifest + plot data.
void run_pipeline(PipelineState& state);

// Read an observation series CSV (header `t,c0,c1,...` or `c0,c1,...`).
// When a t column is present it must be uniform with spacing dt within
// 1e-9 relative. Returns an m x N matrix, one column per sample.
Mat ingest_series_csv(const std::string& path, double dt);

// Evaluate stored per-sample weights (CSV `n,re,im`) at the delay-embedded
// points of another series CSV; writes `t,re,im` rows to out_csv.
void extend_to_points(PipelineState& state, const std::string& weights_csv,
                      const std::string& points_csv, const std::string& out_csv);

std::string library_version();

}  // namespace koop
