#pragma once

// Run logic behind the `subspec` command line tool. Each subcommand reads a JSON config,
// fills in defaults (the filled config is what lands in manifest.json), writes its
// artifacts atomically into the output directory and returns an exit code.

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "subspec/annihilator.hpp"
#include "subspec/expression.hpp"
#include "subspec/group_io.hpp"
#include "subspec/muckenhoupt.hpp"
#include "subspec/spectral.hpp"
#include "subspec/weighted.hpp"

namespace subspec::cli {

using nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3, kNegative = 10 };

inline int exit_code_for(const Error& e) { return e.kind() == ErrorKind::NoConvergence ? kNumerical : kUsage; }

/// 17 significant digits: round-trips and is identical across runs.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

struct RunContext {
  fs::path out = "subspec-out";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string subcommand;
  json config;  // resolved, defaults filled in
  std::string group_spec;
  std::string group_hash;
  std::vector<std::pair<std::string, std::string>> outputs;  // file, hash

  void emit(const std::string& name, const std::string& content) {
    fs::create_directories(out);
    write_atomic(out / name, content);
    outputs.emplace_back(name, content_hash(content));
  }

  void finish(int exit_code) {
    json m;
    m["subcommand"] = subcommand;
    m["config"] = config;
    m["seed"] = seed;
    m["threads"] = threads;
    m["group"] = {{"spec", group_spec}, {"fnv1a64", group_hash}};
    m["exit_code"] = exit_code;
    json outs = json::array();
    for (const auto& [f, h] : outputs) outs.push_back({{"file", f}, {"fnv1a64", h}});
    m["outputs"] = outs;
    fs::create_directories(out);
    write_atomic(out / "manifest.json", m.dump(2) + "\n");
  }
};

// ---- config helpers ----

inline std::string where(const std::string& key) { return "config key '" + key + "'"; }

template <class T>
T take(json& cfg, const std::string& key, const T& fallback) {
  if (!cfg.contains(key)) cfg[key] = fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::InvalidArgument, where(key) + " has the wrong type");
  }
}

template <class T>
T require(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw Error(ErrorKind::InvalidArgument, "missing " + where(key));
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::InvalidArgument, where(key) + " has the wrong type");
  }
}

inline json& section(json& cfg, const std::string& key) {
  if (!cfg.contains(key)) cfg[key] = json::object();
  if (!cfg[key].is_object()) throw Error(ErrorKind::InvalidArgument, where(key) + " must be an object");
  return cfg[key];
}

inline Point point_of(const GroupModel& g, const json& j, const std::string& key) {
  Point p;
  try {
    p = j.get<Point>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::InvalidArgument, where(key) + " must be an array of numbers");
  }
  if (p.size() != g.dim())
    throw Error(ErrorKind::InvalidArgument, where(key) + " has " + std::to_string(p.size()) + " coordinates, group has " +
                                                std::to_string(g.dim()));
  return p;
}

/// Grid spacing: one number for every coordinate, or one value per coordinate.
inline std::vector<double> spacing_of(const GroupModel& g, json& cfg, const std::string& key, double fallback) {
  if (!cfg.contains(key)) cfg[key] = fallback;
  const json& j = cfg[key];
  if (j.is_number()) return isotropic(g, j.get<double>());
  return point_of(g, j, key);
}

/// {"ray": [...], "K": k, "spacing": s} | {"net": {"extent": e, "spacing": s}} | {"points": [[...], ...]}
inline std::vector<Point> centers_of(const GroupModel& g, json& cfg, const std::string& key) {
  if (!cfg.contains(key) || !cfg[key].is_object()) throw Error(ErrorKind::InvalidArgument, "missing or malformed " + where(key));
  json& c = cfg[key];
  if (c.contains("ray")) {
    Point ray = point_of(g, c["ray"], key + ".ray");
    int K = take<int>(c, "K", 8);
    double s = take<double>(c, "spacing", 1.0);
    if (K < 1 || !(s > 0.0)) throw Error(ErrorKind::InvalidArgument, where(key) + ": K must be positive and spacing > 0");
    return ray_centers(g, ray, K, s);
  }
  if (c.contains("net")) {
    json& n = c["net"];
    return g.center_net(require<double>(n, "extent"), require<double>(n, "spacing"));
  }
  if (c.contains("points")) {
    std::vector<Point> out;
    for (const auto& p : c["points"]) out.push_back(point_of(g, p, key + ".points"));
    if (out.empty()) throw Error(ErrorKind::InvalidArgument, where(key) + ".points is empty");
    return out;
  }
  throw Error(ErrorKind::InvalidArgument, where(key) + " needs one of 'ray', 'net', 'points'");
}

inline std::vector<Point> rays_of(const GroupModel& g, json& cfg, const std::string& key) {
  if (!cfg.contains(key) || !cfg[key].is_array() || cfg[key].empty())
    throw Error(ErrorKind::InvalidArgument, where(key) + " must be a non-empty array of directions");
  std::vector<Point> out;
  for (const auto& r : cfg[key]) out.push_back(point_of(g, r, key));
  return out;
}

/// {"box": {"lo": [...], "hi": [...]}} | {"ball": {"center": [...], "radius": r}}
inline Domain domain_of(const GroupModel& g, json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw Error(ErrorKind::InvalidArgument, "missing " + where(key));
  json& d = cfg[key];
  if (d.contains("box")) return BoxDomain{point_of(g, d["box"].at("lo"), key + ".box.lo"), point_of(g, d["box"].at("hi"), key + ".box.hi")};
  if (d.contains("ball"))
    return BallDomain{point_of(g, d["ball"].at("center"), key + ".ball.center"), require<double>(d["ball"], "radius")};
  throw Error(ErrorKind::InvalidArgument, where(key) + " needs 'box' or 'ball'");
}

inline EigenOptions eigen_of(json& cfg, std::uint64_t seed) {
  json& e = section(cfg, "eigen");
  EigenOptions o;
  o.tol = take<double>(e, "tol", o.tol);
  o.max_krylov = take<int>(e, "max_krylov", o.max_krylov);
  o.max_restarts = take<int>(e, "max_restarts", o.max_restarts);
  o.dense_limit = take<std::size_t>(e, "dense_limit", o.dense_limit);
  o.dense_below = take<std::size_t>(e, "dense_below", o.dense_below);
  std::string m = take<std::string>(e, "method", "auto");
  if (m == "auto") o.method = EigenMethod::Auto;
  else if (m == "lanczos") o.method = EigenMethod::Lanczos;
  else if (m == "dense") o.method = EigenMethod::Dense;
  else throw Error(ErrorKind::InvalidArgument, "eigen.method must be auto, lanczos or dense");
  o.seed = seed;
  return o;
}

inline Quadrature quadrature_of(json& cfg, std::uint64_t seed) {
  json& q = section(cfg, "quadrature");
  Quadrature out;
  out.samples = take<std::size_t>(q, "samples", out.samples);
  out.shifts = take<int>(q, "shifts", out.shifts);
  out.agreement_tol = take<double>(q, "agreement_tol", out.agreement_tol);
  json& d = section(q, "delta_grid");
  out.delta_grid = geometric_grid(take<double>(d, "lo", 1e-3), take<double>(d, "hi", 1.0), take<int>(d, "count", 16));
  out.seed = seed;
  return out;
}

inline GroupModel group_of(RunContext& ctx, json& cfg) {
  ctx.group_spec = require<std::string>(cfg, "group");
  ctx.group_hash = content_hash(group_definition_text(ctx.group_spec));
  return load_group(ctx.group_spec);
}

inline std::string expression_text(const json& cfg, std::initializer_list<const char*> keys) {
  for (const char* k : keys)
    if (cfg.contains(k)) return require<std::string>(cfg, k);
  std::string names;
  for (const char* k : keys) names += std::string(names.empty() ? "" : " or ") + "'" + k + "'";
  throw Error(ErrorKind::InvalidArgument, "missing config key " + names);
}

inline std::string field_name(const GroupModel& g, std::size_t i) {
  std::string s = g.variables()[i];
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

/// Lie algebra vector as a combination of the basis fields, e.g. "X - 1/2 T".
inline std::string vector_text(const GroupModel& g, const RationalVector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    Rational a = abs(v[i]);
    std::string coef = a == 1 ? "" : to_string(a) + " ";
    if (out.empty()) out += (v[i] < 0 ? "-" : "") + coef + field_name(g, i);
    else out += (v[i] < 0 ? " - " : " + ") + coef + field_name(g, i);
  }
  return out.empty() ? "0" : out;
}

inline std::vector<std::string> point_cells(const Point& p) {
  std::vector<std::string> out;
  for (double x : p) out.push_back(fmt(x));
  return out;
}

inline std::vector<std::string> coordinate_header(const GroupModel& g, const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& v : g.variables()) out.push_back(prefix + v);
  return out;
}

template <class... Parts>
std::vector<std::string> cat(Parts&&... parts) {
  std::vector<std::string> out;
  (out.insert(out.end(), parts.begin(), parts.end()), ...);
  return out;
}

// ---- decide-poly ----

inline int decide_poly(RunContext& ctx, std::ostream& os) {
  json& cfg = ctx.config;
  GroupModel g = group_of(ctx, cfg);
  std::vector<std::string> texts;
  if (cfg.contains("potential") && cfg["potential"].is_array()) texts = require<std::vector<std::string>>(cfg, "potential");
  else texts.push_back(expression_text(cfg, {"potential"}));
  json& w = section(cfg, "witness");
  int samples = take<int>(w, "samples", 4);
  double radius = take<double>(w, "radius", 1.0);
  std::size_t points = take<std::size_t>(w, "points", 4096);

  GroupPolynomial p;
  for (const auto& t : texts) p.components.push_back(parse_polynomial(t, g.variables()));
  AnnihilatorResult res = right_annihilator(g, p);

  json report;
  report["group"] = ctx.group_spec;
  report["potential"] = texts;
  report["verdict"] = to_string(res.verdict);
  report["criterion"] = "right-invariant annihilator of the polynomial potential";
  json basis = json::array();
  for (const auto& v : res.kernel_basis) {
    json coords = json::array();
    for (const auto& c : v) coords.push_back(to_string(c));
    basis.push_back({{"field", vector_text(g, v)}, {"coordinates", coords}});
  }
  report["kernel_basis"] = basis;

  os << "group: " << ctx.group_spec << " (dim " << g.dim() << ", step " << g.step() << ", Q "
     << g.homogeneous_dimension() << ")\n";
  for (const auto& t : texts) os << "potential: " << t << "\n";
  os << "verdict: " << to_string(res.verdict) << "\n";
  os << "right annihilator: {";
  for (std::size_t i = 0; i < res.kernel_basis.size(); ++i) os << (i ? ", " : "") << vector_text(g, res.kernel_basis[i]);
  os << "}\n";
  if (res.witness) {
    WitnessReport wr = witness_check(g, p, *res.witness, samples, radius, points, ctx.seed);
    json sups = json::array();
    for (double s : wr.sup_values) sups.push_back(s);
    report["witness"] = {{"field", vector_text(g, *res.witness)}, {"identity_holds", wr.identity_holds},
                         {"sup_abs_p_squared", sups}, {"bounded", wr.bounded}, {"radius", radius}};
    std::string x = vector_text(g, *res.witness);
    os << "witness " << x << ": p(exp(t " << x << ") y) = p(y) holds; sup |p|^2 on B(exp(k " << x << "), " << radius
       << "), k = 1.." << samples << ":";
    for (double s : wr.sup_values) os << " " << fmt(s);
    os << (wr.bounded ? " (bounded)" : " (not bounded)") << "\n";
  }
  ctx.emit("decide_poly.json", report.dump(2) + "\n");
  int code = res.verdict == Verdict::Discrete ? kOk : kNegative;
  ctx.finish(code);
  return code;
}

// ---- eigen-scan ----

inline DifferenceScheme scheme_of(json& cfg) { return parse_scheme(take<std::string>(cfg, "scheme", "symmetric")); }

inline int eigen_scan(RunContext& ctx, std::ostream& os) {
  json& cfg = ctx.config;
  GroupModel g = group_of(ctx, cfg);
  std::string vtext = expression_text(cfg, {"potential"});
  ScalarField V = as_scalar_field(g, parse_expression(vtext, g.variables()));
  EigenOptions eo = eigen_of(cfg, ctx.seed);
  json& th = section(cfg, "thresholds");
  ScanThresholds thresholds;
  thresholds.growth_factor = take<double>(th, "growth_factor", thresholds.growth_factor);
  thresholds.bounded_ratio = take<double>(th, "bounded_ratio", thresholds.bounded_ratio);

  json report;
  report["group"] = ctx.group_spec;
  report["potential"] = vtext;

  json& sc = section(cfg, "scan");
  double r = take<double>(sc, "r", 1.0);
  auto h = spacing_of(g, sc, "h", 1.0 / 16);
  Boundary bc = parse_boundary(take<std::string>(sc, "bc", "dirichlet"));
  DifferenceScheme scheme = scheme_of(sc);
  auto centers = centers_of(g, sc, "centers");
  SigmaScanResult s = sigma_scan(g, V, centers, r, h, bc, eo, thresholds, ctx.threads, scheme);
  Csv csv(cat(std::vector<std::string>{"index"}, coordinate_header(g, "c_"),
              std::vector<std::string>{"sigma", "residual", "nodes"}));
  for (std::size_t i = 0; i < centers.size(); ++i)
    csv.row(cat(std::vector<std::string>{std::to_string(i)}, point_cells(centers[i]),
                std::vector<std::string>{fmt(s.values[i]), fmt(s.residuals[i]), std::to_string(s.nodes[i])}));
  ctx.emit("sigma_scan.csv", csv.str());
  report["sigma_scan"] = {{"verdict", to_string(s.verdict)},
                          {"criterion", "bottom of the " + std::string(to_string(bc)) +
                                            " spectrum on translated balls; growth/bounded envelope heuristic"},
                          {"r", r},
                          {"bc", to_string(bc)},
                          {"values", s.values}};
  os << "sigma scan (" << to_string(bc) << ", r = " << r << ", " << centers.size() << " centers): " << to_string(s.verdict)
     << "\n";

  if (cfg.contains("tail_mass")) {
    json& tm = section(cfg, "tail_mass");
    Domain dom = domain_of(g, tm, "domain");
    auto th2 = spacing_of(g, tm, "h", 1.0 / 8);
    Boundary tbc = parse_boundary(take<std::string>(tm, "bc", "dirichlet"));
    auto radii = require<std::vector<double>>(tm, "radii");
    if (radii.empty()) throw Error(ErrorKind::InvalidArgument, "tail_mass.radii is empty");
    Csv tcsv({"tail_radius", "value", "residual", "tail_nodes", "shift"});
    std::vector<double> values;
    for (double R : radii) {
      TailMassResult t = tail_mass_sup(g, V, dom, th2, R, tbc, eo, scheme);
      values.push_back(t.value);
      tcsv.row({fmt(R), fmt(t.value), fmt(t.residual), std::to_string(t.tail_nodes), fmt(t.shift)});
    }
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) decreasing = decreasing && values[i + 1] < values[i];
    ctx.emit("tail_mass.csv", tcsv.str());
    report["tail_mass"] = {{"radii", radii}, {"values", values}, {"strictly_decreasing", decreasing},
                           {"final_over_initial", values.back() / values.front()}};
    os << "tail mass: " << (decreasing ? "strictly decreasing" : "not strictly decreasing") << ", final/initial = "
       << fmt(values.back() / values.front()) << "\n";
  }
  ctx.emit("eigen_scan.json", report.dump(2) + "\n");
  ctx.finish(kOk);
  return kOk;
}

// ---- muck-check ----

inline json ball_json(const BallStatistics& b) {
  return {{"center", b.center}, {"radius", b.radius}, {"mu_B", b.mu_B}, {"avg_w", b.avg_w}, {"reliable", b.reliable}};
}

inline json verdict_json(const ClassVerdict& v) {
  json j{{"class", v.class_name}, {"R", v.R}, {"constant_estimate", v.constant_estimate}, {"cap", v.cap},
         {"pass", v.pass}, {"worst_ball", ball_json(v.worst_ball)}, {"unreliable_balls", v.unreliable}};
  if (v.delta) j["delta"] = *v.delta;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline void add_ball_rows(Csv& csv, const std::string& check, const std::vector<BallStatistics>& balls) {
  for (const auto& b : balls) {
    std::vector<std::string> row{check};
    for (double x : b.center) row.push_back(fmt(x));
    row.insert(row.end(), {fmt(b.radius), fmt(b.mu_B), fmt(b.muw_B), fmt(b.avg_w),
                           b.avg_w_neg_power ? fmt(*b.avg_w_neg_power) : std::string(), fmt(b.max_inv_w),
                           fmt(b.quadrature_error), b.reliable ? "1" : "0", std::to_string(b.samples)});
    for (const auto& s : b.sublevel) row.push_back(fmt(s.second));
    csv.row(row);
  }
}

inline int muck_check(RunContext& ctx, std::ostream& os) {
  json& cfg = ctx.config;
  GroupModel g = group_of(ctx, cfg);
  std::string wtext = expression_text(cfg, {"weight", "potential"});
  ScalarField w = as_scalar_field(g, parse_expression(wtext, g.variables()));
  Quadrature q = quadrature_of(cfg, ctx.seed);
  double R = take<double>(cfg, "R", 1.0);
  int levels = take<int>(cfg, "levels", 3);
  BallFamily family = ball_family(centers_of(g, cfg, "centers"), R, levels);
  auto ps = take<std::vector<double>>(cfg, "p", {});
  double cap = take<double>(cfg, "cap", 100.0);
  double c_min = take<double>(cfg, "c_min", 0.5);
  auto factors = take<std::vector<double>>(cfg, "factors", {2.0, 5.0});
  double cap_factor = take<double>(cfg, "doubling_cap_factor", 100.0);

  std::vector<std::string> header = cat(std::vector<std::string>{"check"}, coordinate_header(g, "c_"),
                                        std::vector<std::string>{"radius", "mu_B", "muw_B", "avg_w", "avg_w_neg_power",
                                                                 "max_inv_w", "quadrature_error", "reliable", "samples"});
  for (double d : q.delta_grid) header.push_back("sublevel_" + fmt(d));
  Csv balls(header);

  json report;
  report["group"] = ctx.group_spec;
  report["weight"] = wtext;
  json certs = json::array();
  bool all_pass = true;
  for (double p : ps) {
    ClassVerdict v = ap_constant(g, w, p, family, cap, q, ctx.threads);
    add_ball_rows(balls, v.class_name, v.balls);
    certs.push_back(verdict_json(v));
    all_pass = all_pass && v.pass;
    os << v.class_name << ": constant " << fmt(v.constant_estimate) << (v.pass ? " pass" : " fail") << "\n";
  }
  ClassVerdict ai = ainfty_check(g, w, family, c_min, q, ctx.threads);
  add_ball_rows(balls, ai.class_name, ai.balls);
  certs.push_back(verdict_json(ai));
  all_pass = all_pass && ai.pass;
  os << ai.class_name << ": delta " << fmt(*ai.delta) << ", c " << fmt(ai.constant_estimate) << (ai.pass ? " pass" : " fail")
     << "\n";
  bool doubling2 = false;
  for (double f : factors) {
    ClassVerdict v = doubling_check(g, w, family, f, cap_factor, q, ctx.threads);
    add_ball_rows(balls, v.class_name, v.balls);
    certs.push_back(verdict_json(v));
    all_pass = all_pass && v.pass;
    if (f == 2.0) doubling2 = v.pass;
    os << v.class_name << ": ratio " << fmt(v.constant_estimate) << (v.pass ? " pass" : " fail") << "\n";
  }
  report["certificates"] = certs;
  ctx.emit("ball_stats.csv", balls.str());
  bool prerequisites = ai.pass && doubling2;
  report["local_A_infty_tilde"] = prerequisites;

  bool negative = !all_pass;
  if (cfg.contains("integral_growth")) {
    json& ig = section(cfg, "integral_growth");
    auto rays = rays_of(g, ig, "rays");
    int K = take<int>(ig, "K", 8);
    double spacing = take<double>(ig, "spacing", 1.0);
    ScanThresholds thresholds;
    IntegralGrowthResult res = integral_growth_check(g, w, R, rays, K, spacing, q, thresholds, ctx.threads);
    Csv csv(cat(std::vector<std::string>{"ray", "k"}, coordinate_header(g, "c_"), std::vector<std::string>{"M"}));
    json per_ray = json::array();
    for (std::size_t j = 0; j < res.rays.size(); ++j) {
      for (std::size_t k = 0; k < res.rays[j].centers.size(); ++k)
        csv.row(cat(std::vector<std::string>{std::to_string(j), std::to_string(k + 1)}, point_cells(res.rays[j].centers[k]),
                    std::vector<std::string>{fmt(res.rays[j].values[k])}));
      per_ray.push_back({{"direction", res.rays[j].direction}, {"verdict", to_string(res.rays[j].verdict)}});
    }
    ctx.emit("integral_growth.csv", csv.str());
    std::string label;
    if (!prerequisites) label = std::string("integral growth only: ") + std::string(to_string(res.verdict));
    else if (res.verdict == ScanVerdict::Growth) label = "discrete (ball integral growth criterion; local A_infty_tilde certificate passed)";
    else if (res.verdict == ScanVerdict::Bounded) label = "not discrete (ball integrals stay bounded; local A_infty_tilde certificate passed)";
    else label = "inconclusive (ball integral growth criterion)";
    negative = negative || label.starts_with("not discrete");
    report["integral_growth"] = {{"verdict", to_string(res.verdict)}, {"rays", per_ray}, {"label", label}};
    os << "integral growth: " << label << "\n";
  }
  if (cfg.contains("sublevel_thinness")) {
    json& st = section(cfg, "sublevel_thinness");
    auto M = require<std::vector<double>>(st, "M");
    double r = take<double>(st, "r", 1.0);
    auto rays = rays_of(g, st, "rays");
    int K = take<int>(st, "K", 8);
    double spacing = take<double>(st, "spacing", 1.0);
    double tol = take<double>(st, "tol", 1e-3);
    SublevelThinnessResult res = sublevel_thinness(g, w, M, r, rays, K, spacing, tol, q, ctx.threads);
    Csv csv(cat(std::vector<std::string>{"M", "ray", "k"}, coordinate_header(g, "c_"), std::vector<std::string>{"measure"}));
    for (std::size_t m = 0; m < M.size(); ++m)
      for (std::size_t j = 0; j < rays.size(); ++j)
        for (std::size_t k = 0; k < res.centers[j].size(); ++k)
          csv.row(cat(std::vector<std::string>{fmt(M[m]), std::to_string(j), std::to_string(k + 1)},
                      point_cells(res.centers[j][k]), std::vector<std::string>{fmt(res.measures[m][j][k])}));
    ctx.emit("sublevel.csv", csv.str());
    std::string label = res.pass ? "discrete (sublevel thinness sufficient condition passed)"
                                 : "no conclusion (sublevel thinness sufficient condition not met)";
    report["sublevel_thinness"] = {{"pass", res.pass}, {"label", label}};
    os << "sublevel thinness: " << label << "\n";
  }
  ctx.emit("muck_check.json", report.dump(2) + "\n");
  int code = negative ? kNegative : kOk;
  ctx.finish(code);
  return code;
}

// ---- weight-transform ----

inline int weight_transform(RunContext& ctx, std::ostream& os) {
  json& cfg = ctx.config;
  GroupModel g = group_of(ctx, cfg);
  std::string wtext = expression_text(cfg, {"weight"});
  Expr w = parse_expression(wtext, g.variables());
  WeightPotential wp = potential_from_weight(g, w);
  Domain dom = domain_of(g, cfg, "domain");
  auto h = spacing_of(g, cfg, "h", 1.0 / 64);
  int k = take<int>(cfg, "k", 5);
  Boundary bc = parse_boundary(take<std::string>(cfg, "bc", "dirichlet"));
  std::optional<double> m;
  if (cfg.contains("m")) m = require<double>(cfg, "m");
  double tol = take<double>(cfg, "tolerance", 0.02);
  EigenOptions eo = eigen_of(cfg, ctx.seed);
  EquivalenceReport rep = equivalence_check(g, w, dom, h, k, bc, m, eo);

  std::string vtext = wp.potential.to_string(g.variables());
  double worst = 0.0;
  for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(rep.differences[i]) / std::max(1.0, std::abs(rep.schrodinger[i])));
  bool agree = worst <= tol;
  json report{{"group", ctx.group_spec},
              {"weight", wtext},
              {"potential", vtext},
              {"exponential_form", wp.exponential_form},
              {"lower_bound_on_grid", rep.lower_bound},
              {"h", rep.h},
              {"bc", to_string(bc)},
              {"nodes", rep.nodes},
              {"weighted", rep.weighted},
              {"schrodinger", rep.schrodinger},
              {"differences", rep.differences},
              {"max_relative_difference", worst},
              {"tolerance", tol},
              {"agree", agree},
              {"max_grad_w_over_w", rep.max_log_gradient},
              {"max_grad_w_over_sqrt_w", rep.max_sqrt_gradient},
              {"warnings", rep.warnings}};
  if (cfg.contains("expected")) {
    auto expected = require<std::vector<double>>(cfg, "expected");
    if (expected.size() < static_cast<std::size_t>(k))
      throw Error(ErrorKind::InvalidArgument, "config key 'expected' needs at least k values");
    double err = 0.0;
    for (int i = 0; i < k; ++i)
      for (double v : {rep.weighted[i], rep.schrodinger[i]})
        err = std::max(err, std::abs(v - expected[i]) / std::max(1.0, std::abs(expected[i])));
    report["expected"] = expected;
    report["max_relative_error_vs_expected"] = err;
  }
  Csv csv({"index", "weighted", "schrodinger", "difference"});
  for (int i = 0; i < k; ++i) csv.row({std::to_string(i), fmt(rep.weighted[i]), fmt(rep.schrodinger[i]), fmt(rep.differences[i])});
  ctx.emit("spectra.csv", csv.str());
  ctx.emit("weight_transform.json", report.dump(2) + "\n");
  os << "V_w = " << vtext << "\n";
  os << "spectra (weighted | schrodinger):";
  for (int i = 0; i < k; ++i) os << " " << fmt(rep.weighted[i]) << "|" << fmt(rep.schrodinger[i]);
  os << "\nmax relative difference " << fmt(worst) << (agree ? " (agree)" : " (disagree)") << "\n";
  for (const auto& s : rep.warnings) os << "warning: " << s << "\n";
  int code = agree ? kOk : kNegative;
  ctx.finish(code);
  return code;
}

inline json read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, "config " + path.string() + ": " + e.what());
  }
}

}  // namespace subspec::cli
