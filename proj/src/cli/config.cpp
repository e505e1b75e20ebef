#include "hitlab/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace hitlab::cli {

using nlohmann::json;

std::string_view to_string(Kind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<Kind> parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<Kind>(i);
  }
  return std::nullopt;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Reads fields of one JSON object, collecting errors instead of throwing.
class Block {
 public:
  Block(const json& obj, std::string prefix, std::vector<std::string>& errors)
      : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {}

  void error(const std::string& field, const std::string& what) {
    errors_.push_back(prefix_ + field + ": " + what);
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  void read(const std::string& key, double& out) {
    if (!take(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number()) return error(key, "must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) error(key, "must be finite");
  }

  void read(const std::string& key, std::size_t& out) {
    if (!take(key)) return;
    const json& v = obj_.at(key);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      out = v.get<std::size_t>();
    } else if (v.is_number_float() && v.get<double>() >= 0 && v.get<double>() == std::floor(v.get<double>()) &&
               v.get<double>() < 9.0e15) {
      out = static_cast<std::size_t>(v.get<double>());
    } else {
      error(key, "must be a non-negative integer");
    }
  }

  void read(const std::string& key, int& out) {
    std::size_t tmp = out < 0 ? 0 : static_cast<std::size_t>(out);
    const std::size_t before = errors_.size();
    read(key, tmp);
    if (errors_.size() != before) return;
    if (tmp > static_cast<std::size_t>(std::numeric_limits<int>::max())) return error(key, "is too large");
    out = static_cast<int>(tmp);
  }

  void read(const std::string& key, bool& out) {
    if (!take(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) return error(key, "must be true or false");
    out = v.get<bool>();
  }

  void read(const std::string& key, std::string& out) {
    if (!take(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_string()) return error(key, "must be a string");
    out = v.get<std::string>();
  }

  void read(const std::string& key, std::vector<double>& out) {
    if (!take(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array()) return error(key, "must be an array of numbers");
    std::vector<double> tmp;
    for (const auto& e : v) {
      if (!e.is_number()) return error(key, "must be an array of numbers");
      tmp.push_back(e.get<double>());
    }
    out = std::move(tmp);
  }

  void read(const std::string& key, std::array<double, 2>& out) {
    if (!take(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      return error(key, "must be a pair [x, y] of numbers");
    }
    out = {v[0].get<double>(), v[1].get<double>()};
  }

  void known(const std::string& key) { seen_.insert(key); }

  void finish() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) error(it.key(), "unknown field");
    }
  }

 private:
  bool take(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void check_positive(Block& b, const std::string& key, double v) {
  if (!(v > 0.0)) b.error(key, "must be > 0 (got " + fmt(v) + ")");
}

void check_min(Block& b, const std::string& key, std::size_t v, std::size_t lo) {
  if (v < lo) b.error(key, "must be >= " + std::to_string(lo) + " (got " + std::to_string(v) + ")");
}

void read_barrier(Block& b, BarrierParams& p) {
  b.read("c", p.c);
  b.read("sigma", p.sigma);
  b.read("horizon", p.horizon);
  b.read("step", p.step);
  b.read("hit_replicates", p.hit_replicates);
  b.read("profile_replicates", p.profile_replicates);
  b.read("lil_paths", p.lil_paths);
  b.read("lil_largest_scale", p.lil_largest_scale);
  b.read("lil_smallest_scale", p.lil_smallest_scale);
  b.finish();
  check_positive(b, "c", p.c);
  check_positive(b, "sigma", p.sigma);
  check_positive(b, "horizon", p.horizon);
  check_positive(b, "step", p.step);
  if (p.step > 0 && p.horizon > 0 && !(p.step < p.horizon)) {
    b.error("step", "must be smaller than horizon (step " + fmt(p.step) + ", horizon " + fmt(p.horizon) + ")");
  }
  if (p.step > 0 && p.horizon / p.step > 1e9) b.error("step", "gives more than 1e9 grid steps");
  check_min(b, "hit_replicates", p.hit_replicates, 1);
  check_min(b, "profile_replicates", p.profile_replicates, 1);
  const double inv_e = std::exp(-1.0);
  if (!(p.lil_largest_scale > 0.0 && p.lil_largest_scale < inv_e)) {
    b.error("lil_largest_scale", "must lie in (0, 1/e) (got " + fmt(p.lil_largest_scale) + ")");
  }
  if (!(p.lil_smallest_scale > 0.0 && p.lil_smallest_scale < p.lil_largest_scale)) {
    b.error("lil_smallest_scale", "must lie in (0, lil_largest_scale) (got " + fmt(p.lil_smallest_scale) + ")");
  }
}

void read_gasket(Block& b, GasketParams& p) {
  b.read("n_max", p.n_max);
  b.read("bottom_side", p.bottom_side);
  b.read("all_boundary", p.all_boundary);
  b.read("random_subsets", p.random_subsets);
  b.read("solver", p.solver);
  b.read("heat_map_generation", p.heat_map_generation);
  b.read("mc_walks", p.mc_walks);
  b.finish();
  if (p.n_max < 1 || p.n_max > 9) b.error("n_max", "must lie in [1, 9] (got " + std::to_string(p.n_max) + ")");
  if (p.solver != "cg" && p.solver != "lu") b.error("solver", "must be \"cg\" or \"lu\" (got \"" + p.solver + "\")");
  if (p.heat_map_generation < 1 || p.heat_map_generation > 9) {
    b.error("heat_map_generation", "must lie in [1, 9] (got " + std::to_string(p.heat_map_generation) + ")");
  }
  if (!p.bottom_side && !p.all_boundary && p.random_subsets == 0) {
    b.error("bottom_side", "at least one subset family must be enabled");
  }
}

void read_fbm_tip(Block& b, FbmTipParams& p) {
  b.read("hurst", p.hurst);
  b.read("epsilons", p.epsilons);
  b.read("horizon", p.horizon);
  b.read("steps", p.steps);
  b.read("replicates", p.replicates);
  b.read("compare_epsilon", p.compare_epsilon);
  b.finish();
  if (p.hurst.empty()) b.error("hurst", "must not be empty");
  for (double h : p.hurst) {
    if (!(h > 0.0 && h < 1.0)) b.error("hurst", "values must lie in (0, 1) (got " + fmt(h) + ")");
  }
  if (p.epsilons.size() < 3) b.error("epsilons", "needs at least 3 values for the exponent fit");
  for (std::size_t i = 0; i < p.epsilons.size(); ++i) {
    if (!(p.epsilons[i] > 0.0)) b.error("epsilons", "values must be > 0 (got " + fmt(p.epsilons[i]) + ")");
    if (i > 0 && !(p.epsilons[i] < p.epsilons[i - 1])) b.error("epsilons", "must be strictly decreasing");
  }
  check_positive(b, "horizon", p.horizon);
  if (p.steps < 2 || (p.steps & (p.steps - 1)) != 0 || p.steps > (std::size_t{1} << 24)) {
    b.error("steps", "must be a power of two in [2, 2^24] (got " + std::to_string(p.steps) + ")");
  }
  check_min(b, "replicates", p.replicates, 1000);
  bool found = false;
  for (double e : p.epsilons) found = found || std::abs(e - p.compare_epsilon) <= 1e-12 * e;
  if (!found) b.error("compare_epsilon", "must be one of epsilons (got " + fmt(p.compare_epsilon) + ")");
}

void read_curve(Block& b, CurveParams& p) {
  b.read("curve", p.curve);
  b.read("curve_file", p.curve_file);
  b.read("brownian_steps", p.brownian_steps);
  b.read("brownian_horizon", p.brownian_horizon);
  b.read("domain", p.domain);
  b.read("domain_file", p.domain_file);
  b.read("disk_sides", p.disk_sides);
  b.read("radius", p.radius);
  b.read("center", p.center);
  b.read("root", p.root);
  b.read("angle_samples", p.angle_samples);
  b.read("d_max", p.d_max);
  b.finish();
  if (p.curve != "brownian" && p.curve != "file") {
    b.error("curve", "must be \"brownian\" or \"file\" (got \"" + p.curve + "\")");
  }
  if (p.curve == "file" && p.curve_file.empty()) b.error("curve_file", "required when curve is \"file\"");
  check_min(b, "brownian_steps", p.brownian_steps, 1);
  check_positive(b, "brownian_horizon", p.brownian_horizon);
  if (p.domain != "disk" && p.domain != "file") {
    b.error("domain", "must be \"disk\" or \"file\" (got \"" + p.domain + "\")");
  }
  if (p.domain == "file" && p.domain_file.empty()) b.error("domain_file", "required when domain is \"file\"");
  check_min(b, "disk_sides", p.disk_sides, 3);
  check_positive(b, "radius", p.radius);
  if (p.domain == "disk" && std::hypot(p.root[0] - p.center[0], p.root[1] - p.center[1]) >=
                                p.radius * std::cos(3.141592653589793 / static_cast<double>(std::max<std::size_t>(p.disk_sides, 3)))) {
    b.error("root", "must lie strictly inside the disk");
  }
  check_min(b, "angle_samples", p.angle_samples, 1000);
  if (p.d_max < 1 || p.d_max > 22) b.error("d_max", "must lie in [1, 22] (got " + std::to_string(p.d_max) + ")");
}

}  // namespace

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(cfg.kind));
  j["seed"] = cfg.seed;
  j["parallelism"] = cfg.parallelism;
  j["output"] = cfg.output;
  j["plots"] = cfg.plots;
  switch (cfg.kind) {
    case Kind::barrier: {
      const auto& p = cfg.barrier;
      j["barrier"] = {{"c", p.c},
                      {"sigma", p.sigma},
                      {"horizon", p.horizon},
                      {"step", p.step},
                      {"hit_replicates", p.hit_replicates},
                      {"profile_replicates", p.profile_replicates},
                      {"lil_paths", p.lil_paths},
                      {"lil_largest_scale", p.lil_largest_scale},
                      {"lil_smallest_scale", p.lil_smallest_scale}};
      break;
    }
    case Kind::gasket: {
      const auto& p = cfg.gasket;
      j["gasket"] = {{"n_max", p.n_max},
                     {"bottom_side", p.bottom_side},
                     {"all_boundary", p.all_boundary},
                     {"random_subsets", p.random_subsets},
                     {"solver", p.solver},
                     {"heat_map_generation", p.heat_map_generation},
                     {"mc_walks", p.mc_walks}};
      break;
    }
    case Kind::fbm_tip: {
      const auto& p = cfg.fbm_tip;
      j["fbm-tip"] = {{"hurst", p.hurst},
                      {"epsilons", p.epsilons},
                      {"horizon", p.horizon},
                      {"steps", p.steps},
                      {"replicates", p.replicates},
                      {"compare_epsilon", p.compare_epsilon}};
      break;
    }
    case Kind::curve: {
      const auto& p = cfg.curve;
      j["curve"] = {{"curve", p.curve},
                    {"curve_file", p.curve_file},
                    {"brownian_steps", p.brownian_steps},
                    {"brownian_horizon", p.brownian_horizon},
                    {"domain", p.domain},
                    {"domain_file", p.domain_file},
                    {"disk_sides", p.disk_sides},
                    {"radius", p.radius},
                    {"center", p.center},
                    {"root", p.root},
                    {"angle_samples", p.angle_samples},
                    {"d_max", p.d_max}};
      break;
    }
  }
  return j;
}

ParseOutcome from_json(const json& doc) {
  ParseOutcome out;
  if (!doc.is_object()) {
    out.errors.push_back("config: top level must be an object");
    return out;
  }
  ExperimentConfig cfg;
  Block top(doc, "", out.errors);

  std::string kind_name;
  if (!doc.contains("kind")) top.error("kind", "missing (one of barrier, gasket, fbm-tip, curve)");
  top.read("kind", kind_name);
  std::optional<Kind> kind;
  if (doc.contains("kind") && doc.at("kind").is_string()) {
    kind = parse_kind(kind_name);
    if (!kind) {
      top.error("kind", "unknown kind \"" + kind_name + "\"; valid kinds: barrier, gasket, fbm-tip, curve");
    }
  }
  top.known("seed");
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      cfg.seed = s.get<std::uint64_t>();
    } else {
      top.error("seed", "must be a non-negative 64-bit integer");
    }
  }
  std::size_t workers = cfg.parallelism;
  top.read("parallelism", workers);
  if (workers > 1024) top.error("parallelism", "must be <= 1024 (got " + std::to_string(workers) + ")");
  cfg.parallelism = static_cast<unsigned>(std::min<std::size_t>(workers, 1024));
  top.read("output", cfg.output);
  if (cfg.output.empty()) top.error("output", "must not be empty");
  top.read("plots", cfg.plots);

  const std::array<const char*, 4> block_keys{"barrier", "gasket", "fbm-tip", "curve"};
  for (std::size_t i = 0; i < block_keys.size(); ++i) {
    const char* key = block_keys[i];
    top.known(key);
    if (!doc.contains(key)) continue;
    if (!doc.at(key).is_object()) {
      top.error(key, "must be an object");
    } else if (kind && static_cast<std::size_t>(*kind) != i) {
      top.error(key, "block does not match kind \"" + std::string(kKindNames[static_cast<std::size_t>(*kind)]) + "\"");
    }
  }
  top.finish();

  if (kind) {
    cfg.kind = *kind;
    static const json empty = json::object();
    const char* key = block_keys[static_cast<std::size_t>(*kind)];
    const json& blk = doc.contains(key) && doc.at(key).is_object() ? doc.at(key) : empty;
    Block b(blk, std::string(key) + ".", out.errors);
    switch (*kind) {
      case Kind::barrier: read_barrier(b, cfg.barrier); break;
      case Kind::gasket: read_gasket(b, cfg.gasket); break;
      case Kind::fbm_tip: read_fbm_tip(b, cfg.fbm_tip); break;
      case Kind::curve: read_curve(b, cfg.curve); break;
    }
  }
  if (out.errors.empty()) out.config = cfg;
  return out;
}

ParseOutcome parse_config(std::string_view text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    ParseOutcome out;
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    out.errors.push_back("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         (pos == std::string::npos ? what : what.substr(pos)));
    return out;
  }
}

ParseOutcome load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseOutcome out;
    out.errors.push_back("cannot read config file " + path);
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace hitlab::cli
