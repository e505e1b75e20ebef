#include "hitlab/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hitlab/barrier.hpp"
#include "hitlab/cli/svg.hpp"
#include "hitlab/curve.hpp"
#include "hitlab/fbm_tip.hpp"
#include "hitlab/gasket.hpp"
#include "hitlab/parallel.hpp"
#include "hitlab/paths.hpp"
#include "hitlab/stats.hpp"

namespace hitlab::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::insufficient_data: return "insufficient-data";
    case RunStatus::runtime_error: return "runtime-error";
  }
  return "?";
}

int RunReport::exit_code() const {
  switch (status) {
    case RunStatus::ok: return 0;
    case RunStatus::runtime_error: return 2;
    case RunStatus::insufficient_data: return 3;
  }
  return 2;
}

ojson to_json(const RunReport& r) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["config"] = to_json(r.config);
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  j["status"] = to_string(r.status);
  j["error"] = r.error.empty() ? ojson(nullptr) : ojson(r.error);
  j["findings"] = r.findings;
  j["files"] = r.files;
  return j;
}

namespace {

class Output {
 public:
  Output(fs::path dir, std::vector<std::string>& files) : dir_(std::move(dir)), files_(files) {}

  template <class Fn>
  void write(const std::string& name, Fn&& body) {
    std::ofstream out(dir_ / name);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out.precision(17);
    body(out);
    out.close();
    if (!out) throw std::runtime_error("error writing " + (dir_ / name).string());
    files_.push_back(name);
  }

  [[nodiscard]] const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string>& files_;
};

ojson fit_json(const std::optional<stats::FitResult>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope}, {"intercept", f->intercept}, {"half_width", f->half_width}};
}

// ----------------------------------------------------------------- barrier

RunStatus run_barrier(const ExperimentConfig& cfg, Output& out, ojson& findings) {
  const auto& p = cfg.barrier;
  const barrier::BarrierConfig bc{p.c, p.sigma, p.horizon, p.step};
  bc.validate();
  const RngStream root{cfg.seed};
  const unsigned workers = cfg.parallelism;

  findings["c_tilde"] = bc.c_tilde();
  findings["alpha"] = bc.alpha();
  findings["threshold"] = bc.threshold();

  const auto hit = barrier::estimate_hit_probability(bc, p.hit_replicates, root.fork(0), workers);
  findings["hit_probability"] = {{"replicates", hit.replicates},
                                 {"hits", hit.hits},
                                 {"p_hat", hit.p},
                                 {"std_error", hit.std_error},
                                 {"continuous_limit", barrier::tau_cdf(bc.c_tilde(), bc.horizon)}};

  const Path w = sample_bm(bc.grid(), root.fork(1));
  const auto prof = barrier::conditional_tau_profile(w, bc, p.profile_replicates, root.fork(2), workers);
  ojson entropy = ojson::array();
  for (int d = barrier::TauProfile::kMinDepth; d <= barrier::TauProfile::kMaxDepth; ++d) {
    entropy.push_back({{"depth", d}, {"entropy", prof.entropy[static_cast<std::size_t>(d - barrier::TauProfile::kMinDepth)]}});
  }
  findings["tau_profile"] = {{"replicates", prof.replicates},
                             {"hits", prof.hits},
                             {"insufficient", prof.insufficient},
                             {"entropy", entropy},
                             {"slope", prof.insufficient ? ojson(nullptr) : ojson(prof.slope)}};
  out.write("tau_profile.csv", [&](std::ostream& os) {
    os << "depth,entropy\n";
    for (int d = barrier::TauProfile::kMinDepth; d <= barrier::TauProfile::kMaxDepth; ++d) {
      os << d << ',' << prof.entropy[static_cast<std::size_t>(d - barrier::TauProfile::kMinDepth)] << '\n';
    }
  });
  out.write("tau_histogram.csv", [&](std::ostream& os) {
    const int depth = 6;
    const auto counts = prof.counts_at_depth(depth);
    const double width = bc.horizon / static_cast<double>(counts.size());
    os << "bin_start,bin_end,count\n";
    for (std::size_t i = 0; i < counts.size(); ++i) {
      os << width * static_cast<double>(i) << ',' << width * static_cast<double>(i + 1) << ',' << counts[i] << '\n';
    }
  });

  if (p.lil_paths > 0) {
    const auto grid = TimeGrid::geometric(p.lil_smallest_scale, p.lil_largest_scale, 0.5);
    const auto scales = barrier::lil_scales(p.lil_largest_scale, p.lil_smallest_scale);
    const std::size_t n = p.lil_paths;
    std::vector<double> stat(2 * n);
    const RngStream bm_rng = root.fork(3);
    const RngStream mix_rng = root.fork(4);
    const double alpha = bc.alpha();
    parallel_for(2 * n, workers, [&](std::size_t i) {
      const Path path = i < n ? sample_bm(grid, bm_rng.replicate(i))
                              : sample_mixture(alpha, grid, mix_rng.replicate(i - n));
      stat[i] = barrier::lil_statistic(path, scales).value;
    });
    std::size_t correct = 0;
    double bm_mean = 0.0, mix_mean = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      const bool bm_like = stat[i] > bc.threshold();
      if ((i < n) == bm_like) ++correct;
      (i < n ? bm_mean : mix_mean) += stat[i] / static_cast<double>(n);
    }
    const std::vector<double> bm(stat.begin(), stat.begin() + static_cast<std::ptrdiff_t>(n));
    const std::vector<double> mix(stat.begin() + static_cast<std::ptrdiff_t>(n), stat.end());
    findings["lil"] = {{"paths_per_class", n},
                       {"scales", scales.size()},
                       {"accuracy", static_cast<double>(correct) / static_cast<double>(2 * n)},
                       {"bm_mean_statistic", bm_mean},
                       {"mixture_mean_statistic", mix_mean},
                       {"rank_test_p_value", stats::rank_test_less(mix, bm)}};
    out.write("lil.csv", [&](std::ostream& os) {
      os << "class,statistic,label\n";
      for (std::size_t i = 0; i < 2 * n; ++i) {
        os << (i < n ? "bm" : "mixture") << ',' << stat[i] << ','
           << (stat[i] > bc.threshold() ? "bm-like" : "mixture-like") << '\n';
      }
    });
  }
  return prof.insufficient ? RunStatus::insufficient_data : RunStatus::ok;
}

// ------------------------------------------------------------------ gasket

RunStatus run_gasket(const ExperimentConfig& cfg, Output& out, ojson& findings) {
  const auto& p = cfg.gasket;
  const gasket::SolveOptions opt{p.solver == "lu" ? gasket::Solver::dense_lu : gasket::Solver::conjugate_gradient,
                                 1e-12, cfg.parallelism};
  const RngStream root{cfg.seed};
  const gasket::SubsetFamily family{p.bottom_side, p.all_boundary, p.random_subsets};
  const auto scan = gasket::conjecture_scan(p.n_max, family, root.fork(0), opt);

  ojson table = ojson::array(), rows = ojson::array(), violations = ojson::array();
  double max_residual = 0.0;
  for (const auto& r : scan.rows) {
    ojson row = {{"n", r.n},           {"subset", r.subset},         {"size", r.size},
                 {"entropy", r.entropy}, {"bound", r.bound},         {"pass", r.pass},
                 {"max_subset", r.max_subset}, {"max_residual", r.max_residual}};
    if (r.subset == "bottom_side") table.push_back({{"n", r.n}, {"entropy", r.entropy}, {"bound", r.bound}});
    if (!r.pass) violations.push_back(row);
    max_residual = std::max(max_residual, r.max_residual);
    rows.push_back(std::move(row));
  }
  ojson is_max = ojson::array();
  for (auto [n, flag] : scan.bottom_side_is_max) is_max.push_back({{"n", n}, {"bottom_side_is_max", flag}});
  findings["entropy_table"] = table;
  findings["scan"] = rows;
  findings["bottom_side_is_max"] = is_max;
  findings["violations"] = violations;
  findings["conjecture_holds_on_scan"] = violations.empty();
  findings["max_residual"] = max_residual;
  out.write("gasket_scan.csv", [&](std::ostream& os) { gasket::write_scan_csv(scan, os); });

  const auto g = gasket::build_gasket(p.heat_map_generation);
  const auto law = gasket::hitting_distribution(g, g.top, g.bottom_side, opt);
  ojson heat = {{"generation", p.heat_map_generation},
                {"entropy", gasket::entropy_bits(law)},
                {"max_residual", law.max_residual}};
  if (p.mc_walks > 0) {
    const auto mc = gasket::mc_srw_hitting(g, g.top, g.bottom_side, p.mc_walks, root.fork(1), cfg.parallelism);
    const double tv = gasket::total_variation(law, mc);
    const double bound = 4.0 * std::sqrt(static_cast<double>(law.targets.size()) / static_cast<double>(p.mc_walks));
    heat["monte_carlo"] = {{"walks", p.mc_walks}, {"total_variation", tv}, {"bound", bound}, {"within_bound", tv < bound}};
  }
  findings["heat_map"] = heat;
  out.write("gasket_vertices.csv", [&](std::ostream& os) { gasket::write_vertices_csv(g, os); });
  out.write("gasket_edges.csv", [&](std::ostream& os) { gasket::write_edges_csv(g, os); });
  out.write("gasket_law.csv", [&](std::ostream& os) {
    os << "id,prob\n";
    for (std::size_t k = 0; k < law.targets.size(); ++k) os << law.targets[k] << ',' << law.probs[k] << '\n';
  });
  return RunStatus::ok;
}

// ----------------------------------------------------------------- fbm-tip

RunStatus run_fbm_tip(const ExperimentConfig& cfg, Output& out, ojson& findings) {
  const auto& p = cfg.fbm_tip;
  fbm_tip::TipExperiment templ;
  templ.hurst = p.hurst.front();
  templ.epsilons = p.epsilons;
  templ.horizon = p.horizon;
  templ.steps = p.steps;
  templ.replicates = p.replicates;
  const auto sweep = fbm_tip::hurst_sweep(p.hurst, templ, RngStream{cfg.seed}, cfg.parallelism);

  bool insufficient = false;
  ojson rows = ojson::array();
  for (const auto& r : sweep.rows) {
    const auto& e = r.estimate;
    insufficient = insufficient || e.insufficient;
    rows.push_back({{"hurst", r.hurst},
                    {"replicates", e.replicates},
                    {"total_hits", e.total_hits},
                    {"hit_fraction", e.hit_fraction},
                    {"insufficient", e.insufficient},
                    {"epsilons", e.epsilons},
                    {"hits_in_tip", e.hits_in_tip},
                    {"p_hat", e.insufficient ? ojson(nullptr) : ojson(e.p_hat)},
                    {"std_error", e.insufficient ? ojson(nullptr) : ojson(e.std_error)},
                    {"exponent", fit_json(e.exponent)}});
  }
  findings["conditioning"] = "first hit before horizon " + std::to_string(p.horizon);
  findings["runs"] = rows;
  findings["monotone_in_hurst"] = sweep.monotone_in_hurst;
  findings["exponent_monotone"] = sweep.exponent_monotone;
  if (sweep.rows.size() >= 2 && !insufficient) {
    const auto* rough = &sweep.rows.front();
    const auto* smooth = &sweep.rows.front();
    for (const auto& r : sweep.rows) {
      if (r.hurst < rough->hurst) rough = &r;
      if (r.hurst > smooth->hurst) smooth = &r;
    }
    double z = 0.0;
    const auto outcome = fbm_tip::compare_tip(rough->estimate, smooth->estimate, p.compare_epsilon, &z);
    findings["comparison"] = {{"epsilon", p.compare_epsilon},
                              {"rough_hurst", rough->hurst},
                              {"smooth_hurst", smooth->hurst},
                              {"z", z},
                              {"outcome", outcome == fbm_tip::Comparison::rougher_higher ? "rougher-higher"
                                                                                       : "inconclusive"}};
  }
  out.write("tip_probabilities.csv", [&](std::ostream& os) {
    os << "H,epsilon,hits_in_tip,total_hits,p_hat,stderr\n";
    for (const auto& r : sweep.rows) {
      const auto& e = r.estimate;
      for (std::size_t k = 0; k < e.epsilons.size(); ++k) {
        os << r.hurst << ',' << e.epsilons[k] << ',' << e.hits_in_tip[k] << ',' << e.total_hits << ','
           << e.p_hat[k] << ',' << e.std_error[k] << '\n';
      }
    }
  });
  out.write("tip_exponents.csv", [&](std::ostream& os) {
    os << "H,exponent,half_width\n";
    for (const auto& r : sweep.rows) {
      if (r.estimate.exponent) {
        os << r.hurst << ',' << r.estimate.exponent->slope << ',' << r.estimate.exponent->half_width << '\n';
      }
    }
  });
  return insufficient ? RunStatus::insufficient_data : RunStatus::ok;
}

// ------------------------------------------------------------------- curve

std::vector<Point2> read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return curve::read_points_csv(in);
}

RunStatus run_curve(const ExperimentConfig& cfg, Output& out, ojson& findings) {
  const auto& p = cfg.curve;
  const RngStream root{cfg.seed};
  curve::PlanarPath c;
  if (p.curve == "brownian") {
    const auto grid = TimeGrid::uniform(p.brownian_horizon, p.brownian_steps);
    const Path x = sample_bm(grid, root.fork(0));
    const Path y = sample_bm(grid, root.fork(1));
    c.points.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) c.points.push_back({x.values[i], y.values[i]});
  } else {
    c.points = read_points_file(p.curve_file);
  }
  const curve::Domain dom = p.domain == "disk"
                                ? curve::Domain::regular_polygon(p.disk_sides, {p.center[0], p.center[1]}, p.radius)
                                : curve::Domain(read_points_file(p.domain_file));
  const Point2 r{p.root[0], p.root[1]};
  const auto m = curve::boundary_measure(c, dom, r, p.angle_samples, root.fork(2), p.d_max, cfg.parallelism);

  findings["samples"] = m.samples;
  findings["hits"] = m.hits();
  findings["hit_fraction"] = m.hit_fraction();
  findings["curve_too_short"] = m.curve_too_short();
  findings["perimeter"] = dom.perimeter();
  out.write("boundary_measure.csv", [&](std::ostream& os) { curve::write_measure_csv(m, os); });
  if (m.hits() < 1000) {
    findings["dimension"] = nullptr;
    return RunStatus::insufficient_data;
  }
  std::optional<curve::EntropyDimension> dim;
  try {
    dim = curve::entropy_dimension(m, root.fork(3));
  } catch (const std::invalid_argument&) {
    findings["dimension"] = nullptr;
    return RunStatus::insufficient_data;
  }
  findings["dimension"] = {{"proxy", "information dimension (entropy slope over dyadic arclength bins)"},
                           {"entropy", dim->entropy},
                           {"stable_depth", dim->stable_depth},
                           {"slope", dim->slope},
                           {"half_width", dim->half_width},
                           {"slope_below_one", dim->slope + dim->half_width < 1.0}};
  out.write("curve_entropy.csv", [&](std::ostream& os) {
    os << "depth,entropy\n";
    for (std::size_t d = 0; d < dim->entropy.size(); ++d) os << d + 1 << ',' << dim->entropy[d] << '\n';
  });
  return RunStatus::ok;
}

// ------------------------------------------------------------------- plots

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("csv column " + name + " missing");
  }
  [[nodiscard]] std::vector<double> numbers(const std::string& name) const {
    const std::size_t c = col(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(std::stod(r.at(c)));
    return out;
  }
};

std::optional<Table> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  Table t;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

void save(const fs::path& dir, const std::string& name, const std::string& svg, std::vector<std::string>& written) {
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  out << svg;
  written.push_back(name);
}

std::string depth_chart(const Table& t, const std::string& title) {
  const auto d = t.numbers("depth");
  const auto h = t.numbers("entropy");
  std::vector<double> ref;
  for (double v : d) ref.push_back(v - d.front() + h.front());
  const svg::Series s[] = {{"entropy", d, h, true, true}, {"slope 1", d, ref, true, false}};
  return svg::line_chart({title, "depth", "entropy (bits)", false, false}, s);
}

}  // namespace

std::vector<std::string> render_plots(const fs::path& dir, std::span<const std::string> sources) {
  std::vector<std::string> written;
  auto read_table = [&](const fs::path& path) -> std::optional<Table> {
    if (!sources.empty() && std::find(sources.begin(), sources.end(), path.filename().string()) == sources.end()) {
      return std::nullopt;
    }
    return read_csv(path);
  };
  if (auto t = read_table(dir / "tau_profile.csv")) {
    save(dir, "tau_entropy.svg", depth_chart(*t, "Conditional first-passage time: entropy vs depth"), written);
  }
  if (auto t = read_table(dir / "tau_histogram.csv")) {
    auto edges = t->numbers("bin_start");
    const auto ends = t->numbers("bin_end");
    if (!ends.empty()) edges.push_back(ends.back());
    const auto counts = t->numbers("count");
    save(dir, "tau_histogram.svg",
         svg::histogram({"First-passage times given W", "tau", "count", false, false}, edges, counts), written);
  }
  if (auto t = read_table(dir / "gasket_scan.csv")) {
    const std::size_t cn = t->col("n"), cs = t->col("subset"), ce = t->col("entropy_bits");
    std::vector<svg::Series> series;
    svg::Series bound{"bound n", {}, {}, true, false};
    for (const auto& r : t->rows) {
      const std::string& name = r.at(cs);
      // Random subsets share one series.
      const std::string label = name.rfind("random", 0) == 0 ? "random subsets" : name;
      auto it = std::find_if(series.begin(), series.end(), [&](const auto& s) { return s.label == label; });
      if (it == series.end()) {
        series.push_back({label, {}, {}, label != "random subsets", true});
        it = series.end() - 1;
      }
      it->x.push_back(std::stod(r.at(cn)));
      it->y.push_back(std::stod(r.at(ce)));
      if (bound.x.empty() || bound.x.back() != it->x.back()) {
        bound.x.push_back(it->x.back());
        bound.y.push_back(it->x.back());
      }
    }
    series.push_back(bound);
    save(dir, "gasket_entropy.svg",
         svg::line_chart({"Hitting-measure entropy on the gasket", "generation n", "entropy (bits)", false, false},
                         series),
         written);
  }
  if (auto law = read_table(dir / "gasket_law.csv")) {
    auto verts = read_table(dir / "gasket_vertices.csv");
    auto edges = read_table(dir / "gasket_edges.csv");
    if (verts && edges) {
      const auto x = verts->numbers("x");
      const auto y = verts->numbers("y");
      std::vector<svg::Segment> lines;
      for (const auto& r : edges->rows) {
        const auto u = std::stoul(r.at(0)), v = std::stoul(r.at(1));
        lines.push_back({x.at(u), y.at(u), x.at(v), y.at(v)});
      }
      std::vector<svg::Marker> marks;
      const auto ids = law->numbers("id");
      const auto probs = law->numbers("prob");
      for (std::size_t k = 0; k < ids.size(); ++k) {
        const auto id = static_cast<std::size_t>(ids[k]);
        marks.push_back({x.at(id), y.at(id), probs[k]});
      }
      save(dir, "gasket_heat_map.svg", svg::heat_map("Harmonic measure from the top vertex", lines, marks), written);
    }
  }
  if (auto t = read_table(dir / "tip_probabilities.csv")) {
    const auto h = t->numbers("H");
    const auto eps = t->numbers("epsilon");
    const auto p = t->numbers("p_hat");
    const auto hits = t->numbers("total_hits");
    std::vector<svg::Series> series;
    std::size_t i = 0;
    while (i < h.size()) {
      std::size_t j = i;
      while (j < h.size() && h[j] == h[i]) ++j;
      std::ostringstream label;
      label << "H = " << h[i];
      svg::Series pts{label.str(), {eps.begin() + static_cast<std::ptrdiff_t>(i), eps.begin() + static_cast<std::ptrdiff_t>(j)},
                      {p.begin() + static_cast<std::ptrdiff_t>(i), p.begin() + static_cast<std::ptrdiff_t>(j)}, false, true};
      std::vector<double> w;
      for (std::size_t k = i; k < j; ++k) {
        const double q = std::max(1.0 - p[k], 1.0 / std::max(hits[k], 1.0));
        w.push_back(p[k] > 0 ? hits[k] * p[k] / q : 1.0);
      }
      svg::Series fit{"no fit", {}, {}, true, false};
      try {
        const auto f = fbm_tip::fit_exponent(pts.x, pts.y, w);
        std::ostringstream fl;
        fl.precision(3);
        fl << "slope " << f.slope;
        fit.label = fl.str();
        for (double e : pts.x) {
          fit.x.push_back(e);
          fit.y.push_back(std::exp(f.intercept + f.slope * std::log(e)));
        }
      } catch (const std::invalid_argument&) {
      }
      pts.colour = fit.colour = static_cast<int>(series.size() / 2);
      series.push_back(std::move(pts));
      series.push_back(std::move(fit));
      i = j;
    }
    save(dir, "tip_loglog.svg",
         svg::line_chart({"Tip probability vs epsilon", "epsilon", "P(hit in [-eps, 0] | hit)", true, true}, series),
         written);
  }
  if (auto t = read_table(dir / "curve_entropy.csv")) {
    save(dir, "curve_entropy.svg", depth_chart(*t, "Boundary hitting measure: entropy vs depth"), written);
  }
  return written;
}

RunReport run(const ExperimentConfig& config) {
  RunReport report;
  report.config = config;
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(config.output);
  bool dir_ok = false;
  try {
    fs::create_directories(dir);
    dir_ok = fs::is_directory(dir);
    if (!dir_ok) throw std::runtime_error("output directory " + dir.string() + " is not a directory");
    Output out(dir, report.files);
    switch (config.kind) {
      case Kind::barrier: report.status = run_barrier(config, out, report.findings); break;
      case Kind::gasket: report.status = run_gasket(config, out, report.findings); break;
      case Kind::fbm_tip: report.status = run_fbm_tip(config, out, report.findings); break;
      case Kind::curve: report.status = run_curve(config, out, report.findings); break;
    }
    if (config.plots) {
      const std::vector<std::string> sources = report.files;
      for (auto& f : render_plots(dir, sources)) report.files.push_back(std::move(f));
    }
  } catch (const std::exception& e) {
    report.status = RunStatus::runtime_error;
    report.error = e.what();
  }
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (dir_ok) {
    std::ofstream out(dir / "report.json");
    out << to_json(report).dump(2) << '\n';
    if (!out && report.status != RunStatus::runtime_error) {
      report.status = RunStatus::runtime_error;
      report.error = "cannot write " + (dir / "report.json").string();
    }
  }
  return report;
}

}  // namespace hitlab::cli
