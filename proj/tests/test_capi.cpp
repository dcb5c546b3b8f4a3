#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "koopman/koopman.h"

namespace fs = std::filesystem;

namespace {

std::string tiny_config(const std::string& outdir) {
  return R"({
    "source": "torus", "n": 300, "dt": 0.01,
    "l": 30, "l0": 8, "l1": 30, "delta0": 0.1, "delta1": 1.0,
    "output_dir": ")" + outdir + R"("
  })";
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("version and error strings are always available") {
  CHECK(std::strlen(kp_version()) > 0);
  CHECK(kp_last_error() != nullptr);
}

TEST_CASE("context creation validates its inputs") {
  kp_ctx* ctx = nullptr;
  CHECK(kp_ctx_create_from_json("{invalid", &ctx) == KP_ECONFIG);
  CHECK(ctx == nullptr);
  CHECK(std::strlen(kp_last_error()) > 0);

  CHECK(kp_ctx_create_from_json(R"({"kernel":"nope"})", &ctx) == KP_ECONFIG);
  CHECK(kp_ctx_create_from_json(nullptr, &ctx) == KP_ECONFIG);
  CHECK(kp_ctx_create_from_file("no_such_config.json", &ctx) == KP_ECONFIG);

  CHECK(kp_ctx_create_from_json("{}", &ctx) == KP_OK);
  REQUIRE(ctx != nullptr);
  kp_ctx_destroy(ctx);
  kp_ctx_destroy(nullptr);  // must be a no-op
}

TEST_CASE("stage queries fail cleanly before the stage has run") {
  kp_ctx* ctx = nullptr;
  REQUIRE(kp_ctx_create_from_json("{}", &ctx) == KP_OK);
  int count = 0;
  double eps = 0.0;
  CHECK(kp_candidate_count(ctx, &count) == KP_ECONFIG);
  CHECK(kp_epsilon_used(ctx, &eps) == KP_ECONFIG);
  CHECK(kp_candidate(nullptr, 0, nullptr, nullptr, nullptr, nullptr) == KP_ECONFIG);
  kp_ctx_destroy(ctx);
}

TEST_CASE("full pipeline through the C interface") {
  TempDir dir("koop_capi_run");
  kp_ctx* ctx = nullptr;
  REQUIRE(kp_ctx_create_from_json(tiny_config(dir.path.string()).c_str(), &ctx) ==
          KP_OK);

  CHECK(kp_run(ctx) == KP_OK);
  CHECK(fs::exists(dir.path / "manifest.json"));
  CHECK(fs::exists(dir.path / "candidates.json"));

  double eps = 0.0;
  CHECK(kp_epsilon_used(ctx, &eps) == KP_OK);
  CHECK(eps > 0.0);
  int l = 0;
  CHECK(kp_basis_size(ctx, &l) == KP_OK);
  CHECK(l == 30);
  int degen = -1;
  CHECK(kp_degenerate_boundary(ctx, &degen) == KP_OK);
  CHECK((degen == 0 || degen == 1));

  int count = -1;
  REQUIRE(kp_candidate_count(ctx, &count) == KP_OK);
  REQUIRE(count > 0);
  double omega = -1.0, w0 = 0.0, w1 = 0.0, ratio = -1.0;
  CHECK(kp_candidate(ctx, 0, &omega, &w0, &w1, &ratio) == KP_OK);
  CHECK(w1 >= w0);
  CHECK(ratio >= 0.0);
  CHECK(kp_candidate(ctx, count, &omega, &w0, &w1, &ratio) == KP_ECONFIG);

  // Extension through the C surface.
  const std::string weights = (dir.path / "eigenfunction_000.csv").string();
  const std::string points = (dir.path / "trajectory.csv").string();
  const std::string out = (dir.path / "ext.csv").string();
  CHECK(kp_extend(ctx, weights.c_str(), points.c_str(), out.c_str()) == KP_OK);
  CHECK(fs::exists(out));
  CHECK(kp_extend(ctx, "missing.csv", points.c_str(), out.c_str()) != KP_OK);
  CHECK(kp_extend(ctx, nullptr, points.c_str(), out.c_str()) == KP_ECONFIG);

  kp_ctx_destroy(ctx);
}

TEST_CASE("individual stages run with implicit prerequisites") {
  TempDir dir("koop_capi_stages");
  kp_ctx* ctx = nullptr;
  REQUIRE(kp_ctx_create_from_json(tiny_config(dir.path.string()).c_str(), &ctx) ==
          KP_OK);
  // select runs generate/embed/spectrum implicitly.
  CHECK(kp_select(ctx) == KP_OK);
  CHECK(fs::exists(dir.path / "trajectory.csv"));
  CHECK(fs::exists(dir.path / "embedded.csv"));
  CHECK(fs::exists(dir.path / "norms.csv"));
  CHECK(fs::exists(dir.path / "candidates.json"));
  CHECK(kp_baseline(ctx) == KP_OK);
  CHECK(fs::exists(dir.path / "spectrum_dft.csv"));
  kp_ctx_destroy(ctx);
}

TEST_CASE("missing input files surface as errors, not crashes") {
  kp_ctx* ctx = nullptr;
  const std::string cfg =
      R"({"source":"torus","n":100,"l":10,"l0":2,"l1":10})";
  REQUIRE(kp_ctx_create_from_json(cfg.c_str(), &ctx) == KP_OK);
  CHECK(kp_extend(ctx, "missing_w.csv", "missing_p.csv", "o.csv") != KP_OK);
  CHECK(std::strlen(kp_last_error()) > 0);
  kp_ctx_destroy(ctx);
}
