#include "koopman/koopman.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "pipeline.hpp"

struct kp_ctx {
  koop::PipelineState state;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Map C++ exceptions onto the C status codes. std::invalid_argument marks
// configuration problems, filesystem/IO errors map to KP_EIO, everything
// else is treated as a numerical failure.
int guard(int (*body)(kp_ctx*), kp_ctx* ctx) {
  if (!ctx) return fail(KP_ECONFIG, "null context");
  try {
    return body(ctx);
  } catch (const std::invalid_argument& e) {
    return fail(KP_ECONFIG, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(KP_EIO, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(KP_EIO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(KP_ENUMERIC, "out of memory");
  } catch (const std::exception& e) {
    const std::string what = e.what();
    if (what.find("cannot open") != std::string::npos ||
        what.find("write failed") != std::string::npos ||
        what.find("cannot write") != std::string::npos)
      return fail(KP_EIO, what);
    return fail(KP_ENUMERIC, what);
  }
}

}  // namespace

extern "C" {

const char* kp_version(void) {
  static const std::string v = koop::library_version();
  return v.c_str();
}

const char* kp_last_error(void) { return g_last_error.c_str(); }

int kp_ctx_create_from_json(const char* json_text, kp_ctx** out) {
  if (!json_text || !out) return fail(KP_ECONFIG, "null argument");
  *out = nullptr;
  try {
    auto ctx = std::make_unique<kp_ctx>();
    ctx->state.cfg = koop::PipelineConfig::from_json_text(json_text);
    *out = ctx.release();
    return KP_OK;
  } catch (const std::invalid_argument& e) {
    return fail(KP_ECONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(KP_ENUMERIC, e.what());
  }
}

int kp_ctx_create_from_file(const char* config_path, kp_ctx** out) {
  if (!config_path || !out) return fail(KP_ECONFIG, "null argument");
  *out = nullptr;
  try {
    auto ctx = std::make_unique<kp_ctx>();
    ctx->state.cfg = koop::PipelineConfig::from_json_file(config_path);
    *out = ctx.release();
    return KP_OK;
  } catch (const std::invalid_argument& e) {
    return fail(KP_ECONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(KP_ENUMERIC, e.what());
  }
}

void kp_ctx_destroy(kp_ctx* ctx) { delete ctx; }

int kp_generate(kp_ctx* ctx) {
  return guard([](kp_ctx* c) {
    koop::stage_generate(c->state);
    return KP_OK;
  }, ctx);
}

int kp_embed(kp_ctx* ctx) {
  return guard([](kp_ctx* c) {
    koop::stage_embed(c->state);
    return KP_OK;
  }, ctx);
}

int kp_spectrum(kp_ctx* ctx) {
  return guard([](kp_ctx* c) {
    koop::stage_spectrum(c->state);
    return KP_OK;
  }, ctx);
}

int kp_select(kp_ctx* ctx) {
  return guard([](kp_ctx* c) {
    koop::stage_select(c->state);
    return KP_OK;
  }, ctx);
}

int kp_baseline(kp_ctx* ctx) {
  return guard([](kp_ctx* c) {
    koop::stage_baseline(c->state);
    return KP_OK;
  }, ctx);
}

int kp_run(kp_ctx* ctx) {
  return guard([](kp_ctx* c) {
    koop::run_pipeline(c->state);
    return KP_OK;
  }, ctx);
}

int kp_extend(kp_ctx* ctx, const char* weights_csv, const char* points_csv,
              const char* out_csv) {
  if (!ctx) return fail(KP_ECONFIG, "null context");
  if (!weights_csv || !points_csv || !out_csv)
    return fail(KP_ECONFIG, "null path argument");
  try {
    koop::extend_to_points(ctx->state, weights_csv, points_csv, out_csv);
    return KP_OK;
  } catch (const std::invalid_argument& e) {
    return fail(KP_ECONFIG, e.what());
  } catch (const std::exception& e) {
    const std::string what = e.what();
    if (what.find("cannot open") != std::string::npos ||
        what.find("write failed") != std::string::npos)
      return fail(KP_EIO, what);
    return fail(KP_ENUMERIC, what);
  }
}

int kp_candidate_count(kp_ctx* ctx, int* out) {
  if (!ctx || !out) return fail(KP_ECONFIG, "null argument");
  if (!ctx->state.have_candidates)
    return fail(KP_ECONFIG, "selection stage has not run");
  *out = static_cast<int>(ctx->state.candidates.size());
  return KP_OK;
}

int kp_candidate(kp_ctx* ctx, int index, double* omega, double* w_l0,
                 double* w_l1, double* ratio) {
  if (!ctx) return fail(KP_ECONFIG, "null context");
  if (!ctx->state.have_candidates)
    return fail(KP_ECONFIG, "selection stage has not run");
  if (index < 0 || index >= static_cast<int>(ctx->state.candidates.size()))
    return fail(KP_ECONFIG, "candidate index out of range");
  const koop::CandidateEigenpair& c = ctx->state.candidates[index];
  if (omega) *omega = c.omega;
  if (w_l0) *w_l0 = c.w_l0;
  if (w_l1) *w_l1 = c.w_l1;
  if (ratio) *ratio = c.ratio;
  return KP_OK;
}

int kp_epsilon_used(kp_ctx* ctx, double* out) {
  if (!ctx || !out) return fail(KP_ECONFIG, "null argument");
  if (!ctx->state.have_basis)
    return fail(KP_ECONFIG, "spectrum stage has not run");
  *out = ctx->state.epsilon_used;
  return KP_OK;
}

int kp_basis_size(kp_ctx* ctx, int* out) {
  if (!ctx || !out) return fail(KP_ECONFIG, "null argument");
  if (!ctx->state.have_basis)
    return fail(KP_ECONFIG, "spectrum stage has not run");
  *out = ctx->state.basis.l();
  return KP_OK;
}

int kp_degenerate_boundary(kp_ctx* ctx, int* out) {
  if (!ctx || !out) return fail(KP_ECONFIG, "null argument");
  if (!ctx->state.have_basis)
    return fail(KP_ECONFIG, "spectrum stage has not run");
  *out = ctx->state.basis.degenerate_boundary ? 1 : 0;
  return KP_OK;
}

}  // extern "C"
