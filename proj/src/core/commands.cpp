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

#include "core/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "core/error.hpp"
#include "core/output.hpp"
#include "core/render.hpp"

namespace rpzeno {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

class Session {
 public:
  Session(const char* command, const RunConfig& config, const CommandOptions& options)
      : command_(command), config_(config), options_(options), start_(Clock::now()) {
    report_.out_dir = options.out_dir.empty() ? config.output.directory : options.out_dir;
    std::error_code ec;
    fs::create_directories(report_.out_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + report_.out_dir);
    metadata_ = json::object();
  }

  const std::string& dir() const { return report_.out_dir; }
  std::string path(const std::string& rel) const { return (fs::path(dir()) / rel).string(); }
  CommandReport& report() { return report_; }
  json& metadata() { return metadata_; }
  json& failures() { return failures_; }

  void log(const std::string& message) const {
    if (options_.log) options_.log(message);
  }

  void warn(const std::string& message) {
    report_.warnings.push_back(message);
    log("warning: " + message);
  }

  void write(const std::string& rel, const std::string& content) {
    write_file_atomic(path(rel), content);
    files_.push_back({rel, sha256_hex(content), content.size()});
    report_.files.push_back(rel);
  }

  // Figures are optional: failures only produce a warning.
  void render(const std::string& rel, const std::function<std::string()>& make) {
    if (!options_.render) return;
    const bool png = rel.ends_with(".png");
    if ((png && !config_.output.png) || (!png && !config_.output.svg)) return;
    try {
      write(rel, make());
    } catch (const std::exception& e) {
      warn("rendering " + rel + " failed: " + e.what());
    }
  }

  CommandReport finish() {
    report_.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    json files = json::array();
    for (const auto& f : files_)
      files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    json doc = {
        {"tool", "rpzeno"},
        {"version", RPZENO_VERSION},
        {"command", command_},
        {"status", report_.status == CommandStatus::Ok
                       ? "ok"
                       : report_.status == CommandStatus::Partial ? "partial" : "interrupted"},
        {"config_hash", config_hash(config_)},
        {"seed", config_.orientations.seed},
        {"threads", options_.threads},
        {"wall_seconds", report_.wall_seconds},
        {"files", files},
        {"failed_cells", report_.failed_cells},
        {"failures", failures_.is_null() ? json::array() : failures_},
        {"warnings", report_.warnings},
        {"metadata", metadata_},
        {"config", canonical_config(config_)},
    };
    write_file_atomic(path("manifest.json"), doc.dump(2) + "\n");
    report_.files.push_back("manifest.json");
    return report_;
  }

 private:
  const char* command_;
  const RunConfig& config_;
  const CommandOptions& options_;
  Clock::time_point start_;
  CommandReport report_;
  std::vector<ManifestFile> files_;
  json metadata_;
  json failures_ = json::array();
};

bool cancelled(const CommandOptions& options) {
  return options.cancel && options.cancel->load(std::memory_order_relaxed);
}

void require_scalar_rates(const RunConfig& config, const char* command) {
  if (config.k_b.axis || config.k_f.axis || config.chi_axis)
    throw Error(ErrorKind::Config, std::string(command) +
                                       " needs scalar kinetics.k_b, kinetics.k_f and ciss.chi");
}

std::string sensitivity_column(const RunConfig& config) {
  return config.observables.sensitivity_percent ? "S_percent" : "S";
}

double sensitivity_value(const RunConfig& config, double s) {
  return config.observables.sensitivity_percent ? 100.0 * s : s;
}

json quadrature_json(const CoherenceQuadrature& q) {
  return {{"scheme", "trapezoid on t = 0 plus a geometric grid, nested doubling"},
          {"integrand", q.survival_weighted ? "C(rho/Tr rho) * Tr rho" : "C(rho/Tr rho)"},
          {"survival_floor", q.survival_floor},
          {"relative_tolerance", q.relative_tolerance},
          {"initial_intervals", q.initial_intervals},
          {"max_intervals", q.max_intervals},
          {"entropy_base", std::string(to_string(q.base))}};
}

struct CellIndex {
  std::size_t chi, kb, kf;
};

// Cells in output order: declared axes, first axis slowest.
std::vector<CellIndex> output_order(const SweepResult& r) {
  std::vector<AxisName> order = r.axis_order;
  for (const AxisName n : {AxisName::Chi, AxisName::KB, AxisName::KF})
    if (std::find(order.begin(), order.end(), n) == order.end()) order.push_back(n);
  auto size_of = [&](AxisName n) {
    switch (n) {
      case AxisName::Chi: return r.chi_values.size();
      case AxisName::KB: return r.k_b_values.size();
      case AxisName::KF: return r.k_f_values.size();
    }
    return std::size_t{1};
  };
  std::vector<CellIndex> out;
  const std::size_t n0 = size_of(order[0]), n1 = size_of(order[1]), n2 = size_of(order[2]);
  out.reserve(n0 * n1 * n2);
  for (std::size_t a = 0; a < n0; ++a)
    for (std::size_t b = 0; b < n1; ++b)
      for (std::size_t c = 0; c < n2; ++c) {
        CellIndex idx{};
        const std::size_t v[3] = {a, b, c};
        for (int k = 0; k < 3; ++k) {
          if (order[k] == AxisName::Chi) idx.chi = v[k];
          if (order[k] == AxisName::KB) idx.kb = v[k];
          if (order[k] == AxisName::KF) idx.kf = v[k];
        }
        out.push_back(idx);
      }
  return out;
}

double axis_value(const SweepResult& r, AxisName n, const CellIndex& i) {
  switch (n) {
    case AxisName::Chi: return r.chi_values[i.chi];
    case AxisName::KB: return r.k_b_values[i.kb];
    case AxisName::KF: return r.k_f_values[i.kf];
  }
  return 0.0;
}

std::vector<AxisName> csv_axes(const SweepResult& r) {
  if (!r.axis_order.empty()) return r.axis_order;
  return {AxisName::KB, AxisName::KF};
}

std::string cell_status(const CellResult& c) {
  if (c.failed) return "failed";
  return c.sensitivity_defined ? "ok" : "undefined_sensitivity";
}

void add_sweep_rows(CsvTable& table, const RunConfig& config, const SweepResult& r,
                    const std::vector<std::string>& prefix) {
  const auto axes = csv_axes(r);
  for (const auto& idx : output_order(r)) {
    const CellResult& c = r.cell(idx.chi, idx.kb, idx.kf);
    std::vector<std::string> row = prefix;
    for (const AxisName a : axes) row.push_back(format_double(axis_value(r, a, idx)));
    if (c.failed) {
      row.insert(row.end(), {"", "", ""});
    } else {
      row.push_back(format_double(c.delta_phi));
      row.push_back(format_double(c.mean_phi));
      row.push_back(c.sensitivity_defined
                        ? format_double(sensitivity_value(config, c.sensitivity))
                        : std::string());
    }
    row.push_back(cell_status(c));
    table.add_row(std::move(row));
  }
}

std::vector<std::string> sweep_header(const RunConfig& config, const SweepResult& r,
                                      std::vector<std::string> prefix) {
  for (const AxisName a : csv_axes(r)) prefix.emplace_back(to_string(a));
  prefix.insert(prefix.end(), {"delta_phi", "mean_phi", sensitivity_column(config), "status"});
  return prefix;
}

std::string axis_label(AxisName n) {
  switch (n) {
    case AxisName::KB: return "k_b (1/us)";
    case AxisName::KF: return "k_f (1/us)";
    case AxisName::Chi: return "chi (rad)";
  }
  return "";
}

const std::vector<double>& values_of(const SweepResult& r, AxisName n) {
  switch (n) {
    case AxisName::Chi: return r.chi_values;
    case AxisName::KB: return r.k_b_values;
    case AxisName::KF: return r.k_f_values;
  }
  return r.k_b_values;
}

bool is_log(const RunConfig& config, AxisName n) {
  const AxisSpec* a = nullptr;
  if (n == AxisName::KB && config.k_b.axis) a = &*config.k_b.axis;
  if (n == AxisName::KF && config.k_f.axis) a = &*config.k_f.axis;
  if (n == AxisName::Chi && config.chi_axis) a = &*config.chi_axis;
  return a && a->scale == AxisScale::Log;
}

Heatmap sweep_heatmap(const RunConfig& config, const SweepResult& r, const std::string& title) {
  Heatmap m;
  const AxisName ya = r.axis_order[0], xa = r.axis_order[1];
  m.title = title;
  m.x_label = axis_label(xa);
  m.y_label = axis_label(ya);
  m.x = values_of(r, xa);
  m.y = values_of(r, ya);
  m.x_log = is_log(config, xa);
  m.y_log = is_log(config, ya);
  for (const auto& idx : output_order(r)) {
    const CellResult& c = r.cell(idx.chi, idx.kb, idx.kf);
    m.values.push_back(c.failed ? 0.0 : c.delta_phi);
    m.valid.push_back(!c.failed);
  }
  m.normalization = r.max_delta_phi;
  m.annotation = "max delta_phi = " + format_double(r.max_delta_phi).substr(0, 10);
  return m;
}

LineSeries sweep_line(const SweepResult& r, const std::string& name) {
  LineSeries s;
  s.name = name;
  const AxisName a = r.axis_order.empty() ? AxisName::KB : r.axis_order[0];
  for (const auto& idx : output_order(r)) {
    const CellResult& c = r.cell(idx.chi, idx.kb, idx.kf);
    s.x.push_back(axis_value(r, a, idx));
    s.y.push_back(c.failed ? std::numeric_limits<double>::quiet_NaN() : c.delta_phi);
  }
  return s;
}

void record_failures(Session& session, const SweepResult& r, const std::string& stage) {
  for (const auto& idx : output_order(r)) {
    const CellResult& c = r.cell(idx.chi, idx.kb, idx.kf);
    if (!c.failed) continue;
    json f = {{"k_b", r.k_b_values[idx.kb]},
              {"k_f", r.k_f_values[idx.kf]},
              {"chi", r.chi_values[idx.chi]},
              {"error", c.error}};
    if (!stage.empty()) f["stage"] = stage;
    session.failures().push_back(std::move(f));
  }
  session.report().failed_cells += r.failed_cells;
}

json sweep_metadata(const SweepResult& r) {
  return {{"normalization_max_delta_phi", r.max_delta_phi},
          {"max_sensitivity", r.max_sensitivity},
          {"cells", r.cells.size()},
          {"eigendecompositions", r.eigendecompositions},
          {"perturbed_decompositions", r.perturbed_decompositions},
          {"relaxation_grid_reduced", r.relaxation_grid_reduced},
          {"k_f_factorized", true}};
}

SweepOptions sweep_options(const RunConfig& config, const CommandOptions& options,
                           const Session& session) {
  SweepOptions so;
  so.threads = std::max(1u, options.threads);
  so.cell_budget_seconds = config.limits.cell_budget_us * 1e-6;
  so.checkpoint_every = config.limits.checkpoint_every;
  so.stop_after_units = options.stop_after_units;
  so.config_hash = config_hash(config);
  so.cancel = options.cancel;
  so.checkpoint_path = options.checkpoint_path.empty() ? session.path("sweep.checkpoint.json")
                                                       : options.checkpoint_path;
  if (options.log)
    so.progress = [&session](std::size_t done, std::size_t total) {
      if (done == total || done % std::max<std::size_t>(1, total / 20) == 0)
        session.log("progress " + std::to_string(done) + "/" + std::to_string(total) + " units");
    };
  return so;
}

void remove_checkpoints(const std::string& base) {
  std::error_code ec;
  fs::remove(base, ec);
  const fs::path p(base);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  if (!fs::exists(dir, ec)) return;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    const std::string name = e.path().filename().string();
    if (name.rfind(p.filename().string() + ".n", 0) == 0) fs::remove(e.path(), ec);
  }
}

}  // namespace

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (t == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mutex;
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < t; ++k)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mutex);
          if (!failure) failure = std::current_exception();
          next = n;
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Orientation direction_orientation(char axis) {
  switch (axis) {
    case 'x': return {std::numbers::pi / 2.0, 0.0};
    case 'y': return {std::numbers::pi / 2.0, std::numbers::pi / 2.0};
    case 'z': return {0.0, 0.0};
    default: throw Error(ErrorKind::InvalidArgument, std::string("unknown direction '") + axis + "'");
  }
}

CommandReport cmd_yield(const RunConfig& config, const CommandOptions& options) {
  require_scalar_rates(config, "yield");
  Session session("yield", config, options);
  const OrientationSet orientations = config_orientations(config);
  const HamiltonianBuilder builder(config.system);
  const CMatrix rho0 = initial_state(config.ciss, config.system).matrix;
  const CMatrix projector = recombination_projector(config.ciss, config.system);
  const double k_b = config.k_b.value, k_f = config.k_f.value;
  const std::size_t n = orientations.points.size();
  std::vector<double> yields(n, 0.0);
  std::atomic<std::uint64_t> eig_count{0};
  parallel_for(n, options.threads, [&](std::size_t i) {
    if (cancelled(options)) return;
    const EigenSystem eig = eigendecompose_with_fallback(
        builder.hamiltonian(orientations.points[i]), projector, k_b);
    ++eig_count;
    yields[i] = config.relaxation.active()
                    ? yield_relaxed(eig, config.relaxation, config.system, rho0, projector, k_b, k_f)
                    : yield_closed_form(eig, rho0, projector, k_b, k_f);
  });
  session.report().eigendecompositions = eig_count;
  if (cancelled(options)) {
    session.report().status = CommandStatus::Interrupted;
    return session.finish();
  }

  CsvTable table({"theta", "phi", "yield"});
  for (std::size_t i = 0; i < n; ++i)
    table.add_row({format_double(orientations.points[i].theta),
                   format_double(orientations.points[i].phi), format_double(yields[i])});
  session.write("yield.csv", table.str());

  bool defined = true;
  const auto stats = anisotropy_lenient(yields, &defined);
  CsvTable summary({"delta_phi", "mean_phi", sensitivity_column(config), "max_phi", "min_phi",
                    "status"});
  summary.add_row({format_double(stats.delta), format_double(stats.mean),
                   defined ? format_double(sensitivity_value(config, stats.sensitivity)) : "",
                   format_double(stats.max), format_double(stats.min),
                   defined ? "ok" : "undefined_sensitivity"});
  session.write("yield_summary.csv", summary.str());
  if (!defined) session.warn("mean yield is zero; sensitivity is undefined");
  session.metadata() = {{"orientations", n},
                        {"orientation_scheme", std::string(to_string(orientations.scheme))},
                        {"relaxation", config.relaxation.active()},
                        {"hilbert_dim", config.system.hilbert_dim()}};
  return session.finish();
}

CommandReport cmd_sweep(const RunConfig& config, const CommandOptions& options) {
  Session session("sweep", config, options);
  const SweepInputs inputs = sweep_inputs(config);
  const SweepOptions so = sweep_options(config, options, session);
  if (options.fresh) remove_checkpoints(so.checkpoint_path);
  session.metadata()["checkpoint"] = fs::path(so.checkpoint_path).filename().string();
  session.metadata()["orientations"] = inputs.orientations.points.size();
  session.metadata()["orientation_scheme"] = std::string(to_string(inputs.orientations.scheme));

  if (!config.series.enabled) {
    const SweepResult r = run_sweep(inputs, so);
    session.report().eigendecompositions = r.eigendecompositions;
    if (!r.complete) {
      session.report().status = CommandStatus::Interrupted;
      session.log("sweep interrupted; rerun with the same configuration to resume");
      return session.finish();
    }
    if (r.relaxation_grid_reduced)
      session.warn("relaxation is active: grid axes reduced to " +
                   std::to_string(config.limits.relaxation_max_points) + " points");
    CsvTable table(sweep_header(config, r, {}));
    add_sweep_rows(table, config, r, {});
    session.write("sweep.csv", table.str());
    record_failures(session, r, "");
    auto meta = sweep_metadata(r);
    for (auto it = meta.begin(); it != meta.end(); ++it) session.metadata()[it.key()] = it.value();
    if (r.axis_order.size() == 2) {
      const Heatmap m = sweep_heatmap(config, r, "Yield anisotropy delta_phi (normalized)");
      session.render("sweep_heatmap.svg", [&] { return render_heatmap_svg(m); });
      session.render("sweep_heatmap.png", [&] { return render_heatmap_png(m); });
    } else if (r.axis_order.size() == 1) {
      LinePlot plot{"Yield anisotropy", axis_label(r.axis_order[0]), "delta_phi",
                    is_log(config, r.axis_order[0]), false, {sweep_line(r, "delta_phi")}};
      session.render("sweep_line.svg", [&] { return render_lines_svg(plot); });
    }
  } else {
    const auto entries = hyperfine_series(inputs, config.series.order, so);
    json stages = json::array();
    LinePlot plot{"Yield anisotropy vs nucleus count", "", "delta_phi", false, false, {}};
    bool interrupted = false;
    std::vector<std::string> header_prefix{"n_nuclei", "nuclei"};
    std::optional<CsvTable> table;
    for (const auto& e : entries) {
      session.report().eigendecompositions += e.result.eigendecompositions;
      if (!e.result.complete) {
        interrupted = true;
        break;
      }
      std::string labels;
      for (const auto& l : e.labels) labels += (labels.empty() ? "" : "+") + l;
      if (!table) table.emplace(sweep_header(config, e.result, header_prefix));
      add_sweep_rows(*table, config, e.result, {std::to_string(e.nucleus_count), labels});
      record_failures(session, e.result, "N=" + std::to_string(e.nucleus_count));
      json m = sweep_metadata(e.result);
      m["n_nuclei"] = e.nucleus_count;
      m["nuclei"] = e.labels;
      stages.push_back(std::move(m));
      const std::string name = "N=" + std::to_string(e.nucleus_count);
      if (e.result.axis_order.size() == 2) {
        const Heatmap h = sweep_heatmap(config, e.result, "delta_phi, " + name + " (normalized)");
        const std::string base = "series_N" + std::to_string(e.nucleus_count);
        session.render(base + ".svg", [&] { return render_heatmap_svg(h); });
        session.render(base + ".png", [&] { return render_heatmap_png(h); });
      } else {
        plot.series.push_back(sweep_line(e.result, name));
        if (!e.result.axis_order.empty()) {
          plot.x_label = axis_label(e.result.axis_order[0]);
          plot.x_log = is_log(config, e.result.axis_order[0]);
        }
      }
    }
    if (interrupted) {
      session.report().status = CommandStatus::Interrupted;
      session.log("series interrupted; rerun with the same configuration to resume");
      return session.finish();
    }
    session.write("series.csv", table->str());
    session.metadata()["series"] = stages;
    if (!plot.series.empty())
      session.render("series_lines.svg", [&] { return render_lines_svg(plot); });
  }
  if (session.report().failed_cells > 0) {
    session.report().status = CommandStatus::Partial;
    session.warn(std::to_string(session.report().failed_cells) + " cells failed");
  }
  return session.finish();
}

CommandReport cmd_eigen(const RunConfig& config, const CommandOptions& options) {
  Session session("eigen", config, options);
  const std::vector<double> k_b =
      config.k_b.axis ? config.k_b.axis->values() : std::vector<double>{config.k_b.value};
  const HamiltonianBuilder builder(config.system);
  const CMatrix projector = recombination_projector(config.ciss, config.system);
  json perturbed = json::object();
  for (const char dir : config.eigen.directions) {
    const CMatrix h = builder.hamiltonian(direction_orientation(dir));
    std::vector<CVector> spectra(k_b.size());
    std::vector<bool> was_perturbed(k_b.size(), false);
    parallel_for(k_b.size(), options.threads, [&](std::size_t i) {
      bool p = false;
      spectra[i] = eigendecompose_with_fallback(h, projector, k_b[i], &p).eigenvalues;
      was_perturbed[i] = p;
    });
    session.report().eigendecompositions += k_b.size();
    CsvTable table({"k_b", "index", "re", "im", "abs"});
    const std::size_t d = config.system.hilbert_dim();
    LinePlot plot{std::string("|Im lambda| with B along ") + dir, "k_b (1/us)", "|Im lambda| (rad/us)",
                  config.k_b.axis && config.k_b.axis->scale == AxisScale::Log, true, {}};
    plot.series.resize(d);
    std::size_t n_perturbed = 0;
    for (std::size_t i = 0; i < k_b.size(); ++i) {
      n_perturbed += was_perturbed[i];
      for (std::size_t m = 0; m < d; ++m) {
        const Complex l = spectra[i](static_cast<Eigen::Index>(m));
        table.add_row({format_double(k_b[i]), std::to_string(m), format_double(l.real()),
                       format_double(l.imag()), format_double(std::abs(l))});
        plot.series[m].x.push_back(k_b[i]);
        plot.series[m].y.push_back(std::abs(l.imag()));
      }
    }
    for (std::size_t m = 0; m < d; ++m) plot.series[m].name = "lambda_" + std::to_string(m);
    perturbed[std::string(1, dir)] = n_perturbed;
    const std::string base = std::string("eigen_B") + dir;
    session.write(base + ".csv", table.str());
    session.render(base + ".svg", [&] { return render_lines_svg(plot); });
  }
  session.metadata() = {{"hilbert_dim", config.system.hilbert_dim()},
                        {"k_b_points", k_b.size()},
                        {"perturbed_decompositions", perturbed},
                        {"sort_order", "real part, then imaginary part"}};
  return session.finish();
}

CommandReport cmd_coherence(const RunConfig& config, const CommandOptions& options) {
  require_scalar_rates(config, "coherence");
  if (config.relaxation.active())
    throw Error(ErrorKind::Config,
                "coherence integrates the relaxation-free dynamics; set relaxation.model: none");
  Session session("coherence", config, options);
  const OrientationSet orientations = config_orientations(config);
  const HamiltonianBuilder builder(config.system);
  const CMatrix rho0 = initial_state(config.ciss, config.system).matrix;
  const CMatrix projector = recombination_projector(config.ciss, config.system);
  const std::size_t nuc = config.system.nuclear_dim();
  const auto& parts = config.observables.partitions;
  const auto& quad = config.observables.quadrature;
  const std::size_t n = orientations.points.size();

  struct Row {
    std::vector<double> value, initial;
    std::string status = "ok";
  };
  std::vector<Row> rows(n);
  std::vector<double> initial(parts.size());
  for (std::size_t p = 0; p < parts.size(); ++p)
    initial[p] = relative_entropy_coherence(rho0, parts[p], nuc, quad.base);
  parallel_for(n, options.threads, [&](std::size_t i) {
    Row& row = rows[i];
    row.value.assign(parts.size(), 0.0);
    if (cancelled(options)) {
      row.status = "interrupted";
      return;
    }
    try {
      const EigenSystem eig = eigendecompose_with_fallback(
          builder.hamiltonian(orientations.points[i]), projector, config.k_b.value);
      for (std::size_t p = 0; p < parts.size(); ++p) {
        const auto r = time_integrated_coherence(eig, rho0, config.k_f.value, parts[p], nuc, quad);
        row.value[p] = r.value;
        if (!r.converged) row.status = "nonconverged";
      }
    } catch (const Error& e) {
      row.status = std::string("failed: ") + to_string(e.kind()) + ": " + e.what();
    }
  });
  session.report().eigendecompositions = n;
  if (cancelled(options)) {
    session.report().status = CommandStatus::Interrupted;
    return session.finish();
  }

  std::vector<std::string> header{"theta", "phi"};
  for (const auto p : parts) header.emplace_back(to_string(p));
  for (const auto p : parts) header.push_back(std::string(to_string(p)) + "_t0");
  header.emplace_back("status");
  CsvTable table(header);
  std::vector<std::vector<double>> ok_values(parts.size());
  for (std::size_t i = 0; i < n; ++i) {
    const bool failed = rows[i].status.rfind("failed", 0) == 0;
    std::vector<std::string> r{format_double(orientations.points[i].theta),
                               format_double(orientations.points[i].phi)};
    for (std::size_t p = 0; p < parts.size(); ++p)
      r.push_back(failed ? "" : format_double(rows[i].value[p]));
    for (std::size_t p = 0; p < parts.size(); ++p) r.push_back(format_double(initial[p]));
    r.push_back(rows[i].status);
    table.add_row(std::move(r));
    if (rows[i].status == "ok")
      for (std::size_t p = 0; p < parts.size(); ++p) ok_values[p].push_back(rows[i].value[p]);
    if (rows[i].status != "ok") {
      session.failures().push_back({{"theta", orientations.points[i].theta},
                                    {"phi", orientations.points[i].phi},
                                    {"error", rows[i].status}});
      ++session.report().failed_cells;
    }
  }
  session.write("coherence.csv", table.str());

  CsvTable summary({"partition", "mean", "max_difference", "orientations"});
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (ok_values[p].empty()) {
      summary.add_row({std::string(to_string(parts[p])), "", "", "0"});
      continue;
    }
    const auto s = coherence_statistics(ok_values[p]);
    summary.add_row({std::string(to_string(parts[p])), format_double(s.mean),
                     format_double(s.max_difference), std::to_string(ok_values[p].size())});
  }
  session.write("coherence_summary.csv", summary.str());
  session.metadata() = {{"quadrature", quadrature_json(quad)},
                        {"orientations", n},
                        {"orientation_scheme", std::string(to_string(orientations.scheme))}};
  if (session.report().failed_cells > 0) {
    session.report().status = CommandStatus::Partial;
    session.warn(std::to_string(session.report().failed_cells) +
                 " orientations failed or did not converge");
  }
  return session.finish();
}

}  // namespace rpzeno
