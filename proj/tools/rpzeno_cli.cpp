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

// Command-line front end. Talks to the engine only through the C API.

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rpzeno/rpzeno.h"

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kPartial = 3, kNumerical = 4 };

int exit_code(rpz_status s) {
  switch (s) {
    case RPZ_OK: return kOk;
    case RPZ_CONFIG:
    case RPZ_RESUME_MISMATCH: return kConfig;
    case RPZ_PARTIAL:
    case RPZ_INTERRUPTED: return kPartial;
    case RPZ_NUMERICAL: return kNumerical;
    default: return kOther;
  }
}

struct Args {
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool no_render = false;
  std::vector<std::string> overrides;
  std::string checkpoint;
  bool fresh = false;
  std::size_t stop_after = 0;
  bool quiet = false;
};

void on_sigint(int) { rpz_request_cancel(); }

void log_line(void*, const char* message) { std::fprintf(stderr, "rpzeno: %s\n", message); }

void add_common(CLI::App* cmd, Args& a, bool sweep) {
  cmd->add_option("--config,-c", a.config, "Run configuration (YAML)")->required();
  cmd->add_option("--out,-o", a.out, "Output directory (default: output.directory)");
  cmd->add_option("--threads,-j", a.threads, "Worker threads (default: $RPZENO_THREADS or 1)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&a](const std::uint64_t& s) { a.seed = s, a.seed_set = true; },
      "Orientation sampling seed");
  cmd->add_flag("--no-render", a.no_render, "Skip SVG/PNG figures");
  cmd->add_option("--grid-override", a.overrides,
                  "Axis override, e.g. k_b=log:1e-3:1e6:50,k_f=1 (base units)");
  cmd->add_flag("--quiet,-q", a.quiet, "Suppress progress messages");
  if (sweep) {
    cmd->add_option("--checkpoint", a.checkpoint,
                    "Checkpoint file (default: <out>/sweep.checkpoint.json)");
    cmd->add_flag("--fresh", a.fresh, "Discard an existing checkpoint");
    cmd->add_option("--stop-after", a.stop_after, "Stop after N work units")->group("");
  }
}

int fail(rpz_status s, const char* what) {
  std::fprintf(stderr, "rpzeno: %s: %s\n", what, rpz_last_error());
  return exit_code(s);
}

int load(const Args& a, rpz_config** cfg) {
  rpz_status s = rpz_config_from_file(a.config.c_str(), cfg);
  if (s != RPZ_OK) return fail(s, "cannot load configuration");
  if (a.seed_set) rpz_config_set_seed(*cfg, a.seed);
  for (const auto& o : a.overrides) {
    s = rpz_config_apply_override(*cfg, o.c_str());
    if (s != RPZ_OK) {
      rpz_config_free(*cfg);
      *cfg = nullptr;
      return fail(s, "invalid --grid-override");
    }
  }
  return kOk;
}

using Runner = rpz_status (*)(const rpz_config*, const rpz_run_options*, rpz_run_report*);

int run(Runner runner, const char* name, const Args& a) {
  rpz_config* cfg = nullptr;
  if (const int rc = load(a, &cfg); rc != kOk) return rc;

  rpz_run_options opts;
  rpz_run_options_init(&opts);
  opts.out_dir = a.out.empty() ? nullptr : a.out.c_str();
  opts.threads = a.threads;
  opts.render = a.no_render ? 0 : 1;
  opts.checkpoint_path = a.checkpoint.empty() ? nullptr : a.checkpoint.c_str();
  opts.fresh = a.fresh ? 1 : 0;
  opts.stop_after_units = a.stop_after;
  if (!a.quiet) opts.log = log_line;

  rpz_clear_cancel();
  std::signal(SIGINT, on_sigint);
  rpz_run_report report{};
  const rpz_status s = runner(cfg, &opts, &report);
  std::signal(SIGINT, SIG_DFL);
  rpz_config_free(cfg);

  if (s == RPZ_OK || s == RPZ_PARTIAL) {
    if (!a.quiet)
      std::fprintf(stderr, "rpzeno: %s finished in %.2f s, %zu files, %llu eigendecompositions\n",
                   name, report.wall_seconds, report.files_written,
                   static_cast<unsigned long long>(report.eigendecompositions));
    if (s == RPZ_PARTIAL) std::fprintf(stderr, "rpzeno: partial result: %s\n", rpz_last_error());
    return exit_code(s);
  }
  return fail(s, name);
}

int check(const Args& a) {
  rpz_config* cfg = nullptr;
  if (const int rc = load(a, &cfg); rc != kOk) return rc;
  size_t needed = 0, dim = 0;
  rpz_config_canonical(cfg, nullptr, 0, &needed);
  std::string text(needed, '\0');
  rpz_config_canonical(cfg, text.data(), text.size(), &needed);
  char hash[65];
  rpz_config_hash(cfg, hash);
  rpz_config_hilbert_dim(cfg, &dim);
  std::printf("# hilbert_dim: %zu\n# config_hash: %s\n%s", dim, hash, text.c_str());
  rpz_config_free(cfg);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rpzeno: radical-pair yields with chiral-induced spin selectivity"};
  app.set_version_flag("--version", rpz_version());
  app.require_subcommand(1);

  Args a;
  auto* yield = app.add_subcommand("yield", "Recombination yield per field orientation");
  auto* sweep = app.add_subcommand("sweep", "Anisotropy over a (k_b, k_f, chi) grid");
  auto* eigen = app.add_subcommand("eigen", "Eigenvalues of H_eff along the k_b axis");
  auto* coherence = app.add_subcommand("coherence", "Time-integrated coherence per orientation");
  auto* chk = app.add_subcommand("check", "Validate a configuration and print its canonical form");
  add_common(yield, a, false);
  add_common(sweep, a, true);
  add_common(eigen, a, false);
  add_common(coherence, a, false);
  add_common(chk, a, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  if (*yield) return run(rpz_run_yield, "yield", a);
  if (*sweep) return run(rpz_run_sweep, "sweep", a);
  if (*eigen) return run(rpz_run_eigen, "eigen", a);
  if (*coherence) return run(rpz_run_coherence, "coherence", a);
  if (*chk) return check(a);
  return kOther;
}
