// Copyright 2026 The rpzeno Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rpzeno/rpzeno.h"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core/commands.hpp"
#include "core/config.hpp"
#include "core/error.hpp"

struct rpz_config {
  rpzeno::RunConfig config;
};

namespace {

thread_local std::string g_last_error;
std::atomic<bool> g_cancel{false};

static_assert(std::atomic<bool>::is_always_lock_free);

rpz_status status_of(rpzeno::ErrorKind kind) {
  using rpzeno::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch: return RPZ_INVALID_ARGUMENT;
    case ErrorKind::Config:
    case ErrorKind::CapExceeded: return RPZ_CONFIG;
    case ErrorKind::DegenerateDecomposition:
    case ErrorKind::DivergentYield:
    case ErrorKind::InvalidState:
    case ErrorKind::NonConvergent:
    case ErrorKind::UndefinedSensitivity: return RPZ_NUMERICAL;
    case ErrorKind::ResumeMismatch: return RPZ_RESUME_MISMATCH;
    case ErrorKind::Io: return RPZ_IO;
  }
  return RPZ_INTERNAL;
}

template <typename F>
rpz_status guarded(F&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const rpzeno::Error& e) {
    g_last_error = std::string(rpzeno::to_string(e.kind())) + ": " + e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RPZ_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return RPZ_INTERNAL;
  } catch (...) {
    g_last_error = "unknown internal error";
    return RPZ_INTERNAL;
  }
}

rpz_status invalid(const char* message) {
  g_last_error = message;
  return RPZ_INVALID_ARGUMENT;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RPZENO_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 4096) return static_cast<unsigned>(v);
  }
  return 1;
}

using Command = rpzeno::CommandReport (*)(const rpzeno::RunConfig&, const rpzeno::CommandOptions&);

rpz_status run(Command command, const rpz_config* config, const rpz_run_options* options,
               rpz_run_report* report) {
  if (!config) return invalid("config is NULL");
  rpz_run_options defaults;
  rpz_run_options_init(&defaults);
  const rpz_run_options& o = options ? *options : defaults;
  return guarded([&] {
    rpzeno::CommandOptions co;
    if (o.out_dir) co.out_dir = o.out_dir;
    co.threads = resolve_threads(o.threads);
    co.render = o.render != 0;
    if (o.checkpoint_path) co.checkpoint_path = o.checkpoint_path;
    co.fresh = o.fresh != 0;
    co.stop_after_units = o.stop_after_units;
    co.cancel = &g_cancel;
    if (o.log) {
      const rpz_log_fn fn = o.log;
      void* user = o.log_user;
      co.log = [fn, user](const std::string& msg) { fn(user, msg.c_str()); };
    }
    const rpzeno::CommandReport r = command(config->config, co);
    if (report) {
      report->failed_cells = r.failed_cells;
      report->eigendecompositions = r.eigendecompositions;
      report->files_written = r.files.size();
      report->wall_seconds = r.wall_seconds;
    }
    switch (r.status) {
      case rpzeno::CommandStatus::Ok: return RPZ_OK;
      case rpzeno::CommandStatus::Partial:
        g_last_error = std::to_string(r.failed_cells) + " cells failed (see manifest.json)";
        return RPZ_PARTIAL;
      case rpzeno::CommandStatus::Interrupted:
        g_last_error = "interrupted; rerun to resume";
        return RPZ_INTERRUPTED;
    }
    return RPZ_INTERNAL;
  });
}

rpz_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buf) return RPZ_OK;
  if (cap < text.size() + 1) return invalid("buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return RPZ_OK;
}

}  // namespace

extern "C" {

const char* rpz_version(void) { return RPZENO_VERSION; }

const char* rpz_last_error(void) { return g_last_error.c_str(); }

const char* rpz_status_name(rpz_status status) {
  switch (status) {
    case RPZ_OK: return "ok";
    case RPZ_INVALID_ARGUMENT: return "invalid argument";
    case RPZ_CONFIG: return "config error";
    case RPZ_PARTIAL: return "partial result";
    case RPZ_NUMERICAL: return "numerical failure";
    case RPZ_IO: return "i/o error";
    case RPZ_RESUME_MISMATCH: return "checkpoint mismatch";
    case RPZ_INTERRUPTED: return "interrupted";
    case RPZ_INTERNAL: return "internal error";
  }
  return "unknown status";
}

rpz_status rpz_config_from_text(const char* text, rpz_config** out) {
  if (!text || !out) return invalid("text and out must be non-NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new rpz_config{rpzeno::parse_config(text)};
    return RPZ_OK;
  });
}

rpz_status rpz_config_from_file(const char* path, rpz_config** out) {
  if (!path || !out) return invalid("path and out must be non-NULL");
  *out = nullptr;
  return guarded([&] {
    *out = new rpz_config{rpzeno::load_config(path)};
    return RPZ_OK;
  });
}

void rpz_config_free(rpz_config* config) { delete config; }

rpz_status rpz_config_set_seed(rpz_config* config, uint64_t seed) {
  if (!config) return invalid("config is NULL");
  config->config.orientations.seed = seed;
  return RPZ_OK;
}

rpz_status rpz_config_apply_override(rpz_config* config, const char* spec) {
  if (!config || !spec) return invalid("config and spec must be non-NULL");
  return guarded([&] {
    rpzeno::RunConfig copy = config->config;
    rpzeno::apply_grid_override(copy, spec);
    config->config = std::move(copy);
    return RPZ_OK;
  });
}

rpz_status rpz_config_hilbert_dim(const rpz_config* config, size_t* out) {
  if (!config || !out) return invalid("config and out must be non-NULL");
  return guarded([&] {
    *out = config->config.system.hilbert_dim();
    return RPZ_OK;
  });
}

rpz_status rpz_config_canonical(const rpz_config* config, char* buf, size_t cap, size_t* needed) {
  if (!config) return invalid("config is NULL");
  return guarded([&] { return copy_out(rpzeno::canonical_config(config->config), buf, cap, needed); });
}

rpz_status rpz_config_hash(const rpz_config* config, char out[65]) {
  if (!config || !out) return invalid("config and out must be non-NULL");
  return guarded([&] { return copy_out(rpzeno::config_hash(config->config), out, 65, nullptr); });
}

void rpz_run_options_init(rpz_run_options* options) {
  if (!options) return;
  *options = rpz_run_options{};
  options->render = 1;
}

rpz_status rpz_run_yield(const rpz_config* c, const rpz_run_options* o, rpz_run_report* r) {
  return run(rpzeno::cmd_yield, c, o, r);
}

rpz_status rpz_run_sweep(const rpz_config* c, const rpz_run_options* o, rpz_run_report* r) {
  return run(rpzeno::cmd_sweep, c, o, r);
}

rpz_status rpz_run_eigen(const rpz_config* c, const rpz_run_options* o, rpz_run_report* r) {
  return run(rpzeno::cmd_eigen, c, o, r);
}

rpz_status rpz_run_coherence(const rpz_config* c, const rpz_run_options* o, rpz_run_report* r) {
  return run(rpzeno::cmd_coherence, c, o, r);
}

void rpz_request_cancel(void) { g_cancel.store(true, std::memory_order_relaxed); }

void rpz_clear_cancel(void) { g_cancel.store(false, std::memory_order_relaxed); }

rpz_status rpz_yield_at(const rpz_config* config, double theta, double phi, double* out) {
  if (!config || !out) return invalid("config and out must be non-NULL");
  return guarded([&] {
    const auto& c = config->config;
    const rpzeno::HamiltonianBuilder builder(c.system);
    const auto rho0 = rpzeno::initial_state(c.ciss, c.system).matrix;
    const auto projector = rpzeno::recombination_projector(c.ciss, c.system);
    const auto eig = rpzeno::eigendecompose_with_fallback(builder.hamiltonian(rpzeno::Orientation{theta, phi}),
                                                          projector, c.k_b.value);
    *out = c.relaxation.active()
               ? rpzeno::yield_relaxed(eig, c.relaxation, c.system, rho0, projector, c.k_b.value,
                                       c.k_f.value)
               : rpzeno::yield_closed_form(eig, rho0, projector, c.k_b.value, c.k_f.value);
    return RPZ_OK;
  });
}

rpz_status rpz_eigenvalues(const rpz_config* config, double theta, double phi, double k_b,
                           double* re, double* im, size_t cap, size_t* count) {
  if (!config || !count) return invalid("config and count must be non-NULL");
  return guarded([&] {
    const auto& c = config->config;
    const rpzeno::HamiltonianBuilder builder(c.system);
    const auto projector = rpzeno::recombination_projector(c.ciss, c.system);
    const auto eig =
        rpzeno::eigendecompose_with_fallback(builder.hamiltonian(rpzeno::Orientation{theta, phi}), projector, k_b);
    const auto d = static_cast<size_t>(eig.eigenvalues.size());
    *count = d;
    if (!re || !im) return RPZ_OK;
    if (cap < d) return invalid("eigenvalue buffers too small");
    for (size_t i = 0; i < d; ++i) {
      re[i] = eig.eigenvalues(static_cast<Eigen::Index>(i)).real();
      im[i] = eig.eigenvalues(static_cast<Eigen::Index>(i)).imag();
    }
    return RPZ_OK;
  });
}

}  // extern "C"
