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

#include "core/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "core/checkpoint.hpp"
#include "core/error.hpp"

namespace rpzeno {

namespace {

using Clock = std::chrono::steady_clock;

std::string describe_error(std::size_t orientation, const std::exception& e) {
  std::string kind = "internal";
  if (const auto* err = dynamic_cast<const Error*>(&e)) kind = to_string(err->kind());
  return kind + " at orientation " + std::to_string(orientation) + ": " + e.what();
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void describe_matrix(std::ostream& os, const Eigen::Ref<const Eigen::MatrixXd>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << m(i, j) << ' ';
}

void describe_nuclei(std::ostream& os, const std::vector<NucleusSpec>& nuclei) {
  for (const auto& n : nuclei) {
    os << n.label << ' ' << n.multiplicity << ' ';
    describe_matrix(os, n.hyperfine_mT);
    describe_matrix(os, n.rotation);
    os << ';';
  }
  os << '|';
}

struct Context {
  const SweepInputs& inputs;
  const SweepOptions& options;
  const HamiltonianBuilder builder;
  std::vector<double> k_b, k_f, chi;
  bool relaxation = false;

  Context(const SweepInputs& in, const SweepOptions& opt)
      : inputs(in), options(opt), builder(in.system) {}
};

bool cancelled(const SweepOptions& options) {
  return options.cancel && options.cancel->load(std::memory_order_relaxed);
}

// Returns false when cancelled part way; the payload is then discarded.
bool run_unit(const Context& ctx, std::size_t i_chi, std::size_t i_kb, UnitPayload& out) {
  const auto start = Clock::now();
  const std::size_t n_kf = ctx.k_f.size();
  const auto& points = ctx.inputs.orientations.points;
  const std::size_t n_or = points.size();
  const double k_b = ctx.k_b[i_kb];

  std::vector<std::vector<double>> yields(n_kf, std::vector<double>(n_or, 0.0));
  std::vector<std::string> errors(n_kf);
  out = {};
  out.cells.assign(n_kf, {});

  CissConfig ciss = ctx.inputs.ciss;
  ciss.chi = ctx.chi[i_chi];
  CMatrix rho0, projector;
  try {
    rho0 = initial_state(ciss, ctx.inputs.system).matrix;
    projector = recombination_projector(ciss, ctx.inputs.system);
  } catch (const std::exception& e) {
    for (auto& c : out.cells) c = {.failed = true, .error = describe_error(0, e)};
    return true;
  }

  const double budget = ctx.options.cell_budget_seconds * static_cast<double>(n_kf);
  for (std::size_t o = 0; o < n_or; ++o) {
    if (cancelled(ctx.options)) return false;
    if (budget > 0.0 &&
        std::chrono::duration<double>(Clock::now() - start).count() > budget) {
      for (auto& e : errors)
        if (e.empty()) e = "wall-clock budget exceeded after " + std::to_string(o) + " orientations";
      break;
    }
    try {
      bool perturbed = false;
      const EigenSystem eig = eigendecompose_with_fallback(ctx.builder.hamiltonian(points[o]),
                                                           projector, k_b, &perturbed);
      ++out.eigendecompositions;
      if (perturbed) ++out.perturbed;
      if (ctx.relaxation) {
        for (std::size_t f = 0; f < n_kf; ++f) {
          if (!errors[f].empty()) continue;
          try {
            yields[f][o] = yield_relaxed(eig, ctx.inputs.relaxation, ctx.inputs.system, rho0,
                                         projector, k_b, ctx.k_f[f]);
          } catch (const std::exception& e) {
            errors[f] = describe_error(o, e);
          }
        }
      } else {
        const YieldKernel kernel(eig, rho0, projector);
        for (std::size_t f = 0; f < n_kf; ++f) {
          if (!errors[f].empty()) continue;
          try {
            yields[f][o] = finalize_yield(k_b * kernel.integral(ctx.k_f[f]), "recombination yield");
          } catch (const std::exception& e) {
            errors[f] = describe_error(o, e);
          }
        }
      }
    } catch (const std::exception& e) {
      for (auto& err : errors)
        if (err.empty()) err = describe_error(o, e);
    }
  }

  for (std::size_t f = 0; f < n_kf; ++f) {
    CellResult& c = out.cells[f];
    if (!errors[f].empty()) {
      c.failed = true;
      c.error = errors[f];
      continue;
    }
    bool defined = true;
    const auto stats = anisotropy_lenient(yields[f], &defined);
    c.delta_phi = stats.delta;
    c.mean_phi = stats.mean;
    c.sensitivity = stats.sensitivity;
    c.max_phi = stats.max;
    c.min_phi = stats.min;
    c.sensitivity_defined = defined;
  }
  return true;
}

}  // namespace

std::string_view to_string(AxisName name) {
  switch (name) {
    case AxisName::KB: return "k_b";
    case AxisName::KF: return "k_f";
    case AxisName::Chi: return "chi";
  }
  return "?";
}

std::string_view to_string(AxisScale scale) {
  return scale == AxisScale::Log ? "log" : "linear";
}

void AxisSpec::validate() const {
  const std::string n(to_string(name));
  if (points < 1) throw Error(ErrorKind::InvalidArgument, "axis " + n + " needs at least 1 point");
  if (!std::isfinite(min) || !std::isfinite(max) || max < min)
    throw Error(ErrorKind::InvalidArgument, "axis " + n + " needs finite min <= max");
  if (scale == AxisScale::Log && !(min > 0.0))
    throw Error(ErrorKind::InvalidArgument, "log axis " + n + " requires min > 0");
  if (name == AxisName::Chi) {
    const double half_pi = std::numbers::pi / 2.0;
    if (min < -half_pi - 1e-12 || max > half_pi + 1e-12)
      throw Error(ErrorKind::InvalidArgument, "chi axis must lie within [-pi/2, pi/2]");
  } else if (min < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "rate axis " + n + " must be >= 0");
  }
}

std::vector<double> AxisSpec::values() const {
  validate();
  std::vector<double> v(points);
  if (points == 1) {
    v[0] = min;
    return v;
  }
  const double last = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / last;
    if (scale == AxisScale::Log)
      v[i] = std::exp(std::log(min) + t * (std::log(max) - std::log(min)));
    else
      v[i] = min + t * (max - min);
  }
  v.front() = min;
  v.back() = max;
  return v;
}

void SweepGrid::validate() const {
  if (axes.size() > 2) throw Error(ErrorKind::InvalidArgument, "a sweep has at most two axes");
  for (const auto& a : axes) a.validate();
  if (axes.size() == 2 && axes[0].name == axes[1].name)
    throw Error(ErrorKind::InvalidArgument, "sweep axes must be distinct");
  if (!axis(AxisName::KB) && !(k_b >= 0.0 && std::isfinite(k_b)))
    throw Error(ErrorKind::InvalidArgument, "fixed k_b must be finite and >= 0");
  if (!axis(AxisName::KF) && !(k_f >= 0.0 && std::isfinite(k_f)))
    throw Error(ErrorKind::InvalidArgument, "fixed k_f must be finite and >= 0");
}

const AxisSpec* SweepGrid::axis(AxisName name) const {
  for (const auto& a : axes)
    if (a.name == name) return &a;
  return nullptr;
}

std::vector<double> effective_values(const SweepGrid& grid, AxisName name, bool relaxation) {
  const AxisSpec* a = grid.axis(name);
  if (!a) {
    if (name == AxisName::KB) return {grid.k_b};
    if (name == AxisName::KF) return {grid.k_f};
    throw Error(ErrorKind::InvalidArgument, "chi is not an axis of this grid");
  }
  AxisSpec spec = *a;
  if (relaxation && grid.relaxation_max_points > 0)
    spec.points = std::min(spec.points, grid.relaxation_max_points);
  return spec.values();
}

std::string sweep_fingerprint(const SweepInputs& in) {
  std::ostringstream os;
  os << std::hexfloat;
  const auto& s = in.system;
  describe_nuclei(os, s.radical_a_nuclei);
  describe_nuclei(os, s.radical_b_nuclei);
  os << static_cast<int>(s.dipolar.mode) << ' ' << s.dipolar.distance_nm << ' '
     << s.dipolar.point_dipole << ' ';
  describe_matrix(os, s.dipolar.axis);
  describe_matrix(os, s.dipolar.tensor_mT);
  os << s.field_mT << ' ' << s.gamma_a() << ' ' << s.gamma_b() << ' ';
  describe_matrix(os, s.frame_rotation);
  os << '|' << static_cast<int>(in.ciss.model) << ' ' << in.ciss.chi << ' '
     << in.ciss.channel_j << ' ' << static_cast<int>(in.ciss.precursor) << '|'
     << static_cast<int>(in.relaxation.model) << ' ' << in.relaxation.rate << ' '
     << in.relaxation.tau_c << ' ' << in.relaxation.kernel_includes_kf << '|';
  for (const auto& p : in.orientations.points) os << p.theta << ',' << p.phi << ';';
  os << '|';
  for (const auto& a : in.grid.axes)
    os << to_string(a.name) << ' ' << to_string(a.scale) << ' ' << a.min << ' ' << a.max << ' '
       << a.points << ';';
  os << in.grid.k_b << ' ' << in.grid.k_f << ' ' << in.grid.relaxation_max_points;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(os.str())));
  return buf;
}

SweepResult run_sweep(const SweepInputs& inputs, const SweepOptions& options) {
  inputs.system.validate();
  inputs.ciss.validate();
  inputs.relaxation.validate();
  inputs.grid.validate();
  if (inputs.orientations.points.empty())
    throw Error(ErrorKind::InvalidArgument, "sweep needs at least one orientation");

  Context ctx(inputs, options);
  ctx.relaxation = inputs.relaxation.active();
  if (ctx.relaxation && inputs.system.hilbert_dim() > kDefaultLiouvilleDimCap)
    throw Error(ErrorKind::CapExceeded, "relaxation sweep exceeds the Liouville dimension cap");
  ctx.k_b = effective_values(inputs.grid, AxisName::KB, ctx.relaxation);
  ctx.k_f = effective_values(inputs.grid, AxisName::KF, ctx.relaxation);
  ctx.chi = inputs.grid.axis(AxisName::Chi)
                ? effective_values(inputs.grid, AxisName::Chi, ctx.relaxation)
                : std::vector<double>{inputs.ciss.chi};

  const std::size_t unit_count = ctx.chi.size() * ctx.k_b.size();
  CheckpointState state;
  state.config_hash = options.config_hash;
  state.fingerprint = sweep_fingerprint(inputs);
  state.cells_per_unit = ctx.k_f.size();
  state.completed.assign(unit_count, false);
  state.units.assign(unit_count, {});

  if (!options.checkpoint_path.empty()) {
    if (auto loaded = load_checkpoint(options.checkpoint_path)) {
      if (loaded->config_hash != state.config_hash || loaded->fingerprint != state.fingerprint ||
          loaded->cells_per_unit != state.cells_per_unit ||
          loaded->completed.size() != unit_count)
        throw Error(ErrorKind::ResumeMismatch,
                    "checkpoint " + options.checkpoint_path +
                        " belongs to a different configuration; refusing to resume");
      state.completed = std::move(loaded->completed);
      state.units = std::move(loaded->units);
    }
  }

  std::vector<std::size_t> pending;
  for (std::size_t u = 0; u < unit_count; ++u)
    if (!state.completed[u]) pending.push_back(u);

  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::size_t done_this_run = 0;
  std::size_t since_save = 0;
  std::size_t done_total = unit_count - pending.size();
  std::exception_ptr failure;

  auto worker = [&]() {
    UnitPayload payload;
    while (!stop.load()) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pending.size()) break;
      if (cancelled(options)) {
        stop = true;
        break;
      }
      const std::size_t u = pending[k];
      try {
        if (!run_unit(ctx, u / ctx.k_b.size(), u % ctx.k_b.size(), payload)) {
          stop = true;
          break;
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
        break;
      }
      std::lock_guard lock(mutex);
      state.units[u] = std::move(payload);
      state.completed[u] = true;
      ++done_this_run;
      ++done_total;
      if (options.progress) options.progress(done_total, unit_count);
      if (options.stop_after_units > 0 && done_this_run >= options.stop_after_units) stop = true;
      if (!options.checkpoint_path.empty() && ++since_save >= options.checkpoint_every) {
        since_save = 0;
        save_checkpoint(options.checkpoint_path, state);
      }
    }
  };

  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(pending.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!options.checkpoint_path.empty() && (done_this_run > 0 || pending.empty()))
    save_checkpoint(options.checkpoint_path, state);
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  for (const auto& a : inputs.grid.axes) result.axis_order.push_back(a.name);
  result.k_b_values = ctx.k_b;
  result.k_f_values = ctx.k_f;
  result.chi_values = ctx.chi;
  for (const auto& a : inputs.grid.axes)
    if (ctx.relaxation && inputs.grid.relaxation_max_points > 0 &&
        a.points > inputs.grid.relaxation_max_points)
      result.relaxation_grid_reduced = true;
  result.cells.reserve(unit_count * ctx.k_f.size());
  for (std::size_t u = 0; u < unit_count; ++u) {
    if (!state.completed[u]) {
      result.complete = false;
      for (std::size_t f = 0; f < ctx.k_f.size(); ++f)
        result.cells.push_back({.failed = true, .error = "not computed (interrupted)"});
      continue;
    }
    const auto& p = state.units[u];
    result.eigendecompositions += p.eigendecompositions;
    result.perturbed_decompositions += p.perturbed;
    result.cells.insert(result.cells.end(), p.cells.begin(), p.cells.end());
  }
  for (const auto& c : result.cells) {
    if (c.failed) {
      ++result.failed_cells;
      continue;
    }
    result.max_delta_phi = std::max(result.max_delta_phi, c.delta_phi);
    result.max_sensitivity = std::max(result.max_sensitivity, c.sensitivity);
  }
  return result;
}

std::vector<double> factorized_kf_sweep(const EigenSystem& eig, const CMatrix& rho0,
                                        const CMatrix& projector, double k_b,
                                        std::span<const double> k_f_values,
                                        const RelaxationSpec& relaxation) {
  if (relaxation.active())
    throw Error(ErrorKind::InvalidArgument,
                "k_f factorization is invalid with relaxation; use per-cell yields");
  const YieldKernel kernel(eig, rho0, projector);
  std::vector<double> out;
  out.reserve(k_f_values.size());
  for (const double k_f : k_f_values) {
    if (!(k_f >= 0.0)) throw Error(ErrorKind::InvalidArgument, "k_f must be >= 0");
    out.push_back(finalize_yield(k_b * kernel.integral(k_f), "recombination yield"));
  }
  return out;
}

SpinSystem truncate_system(const SpinSystem& system, const std::vector<std::string>& labels) {
  auto count_label = [&](const std::string& label) {
    std::size_t n = 0;
    for (const auto* list : {&system.radical_a_nuclei, &system.radical_b_nuclei})
      for (const auto& nuc : *list) n += nuc.label == label;
    return n;
  };
  for (const auto& l : labels) {
    const auto n = count_label(l);
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "unknown nucleus label '" + l + "'");
    if (n > 1) throw Error(ErrorKind::InvalidArgument, "nucleus label '" + l + "' is ambiguous");
  }
  auto keep = [&](const std::vector<NucleusSpec>& nuclei) {
    std::vector<NucleusSpec> out;
    for (const auto& nuc : nuclei)
      if (std::find(labels.begin(), labels.end(), nuc.label) != labels.end()) out.push_back(nuc);
    return out;
  };
  SpinSystem truncated = system;
  truncated.radical_a_nuclei = keep(system.radical_a_nuclei);
  truncated.radical_b_nuclei = keep(system.radical_b_nuclei);
  return truncated;
}

std::vector<SeriesEntry> hyperfine_series(const SweepInputs& inputs,
                                          const std::vector<std::string>& order,
                                          const SweepOptions& options) {
  std::vector<std::string> labels = order;
  if (labels.empty()) {
    for (const auto* list : {&inputs.system.radical_a_nuclei, &inputs.system.radical_b_nuclei})
      for (const auto& nuc : *list) labels.push_back(nuc.label);
  }
  if (labels.empty()) throw Error(ErrorKind::InvalidArgument, "series needs at least one nucleus");

  std::vector<SeriesEntry> entries;
  for (std::size_t n = 1; n <= labels.size(); ++n) {
    SeriesEntry entry;
    entry.nucleus_count = n;
    entry.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n));
    SweepInputs stage = inputs;
    stage.system = truncate_system(inputs.system, entry.labels);
    SweepOptions stage_options = options;
    if (!options.checkpoint_path.empty())
      stage_options.checkpoint_path = options.checkpoint_path + ".n" + std::to_string(n);
    entry.result = run_sweep(stage, stage_options);
    const bool complete = entry.result.complete;
    entries.push_back(std::move(entry));
    if (!complete) break;
  }
  return entries;
}

}  // namespace rpzeno
