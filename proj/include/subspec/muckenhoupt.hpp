#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "subspec/discretization.hpp"
#include "subspec/error.hpp"
#include "subspec/group_model.hpp"
#include "subspec/parallel.hpp"
#include "subspec/qmc.hpp"
#include "subspec/scan_verdict.hpp"

namespace subspec {

/// Geometric grid from lo to hi with `count` points.
inline std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw Error(ErrorKind::InvalidArgument, "bad geometric grid");
  std::vector<double> out;
  for (int i = 0; i < count; ++i)
    out.push_back(count == 1 ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  out.back() = hi;
  return out;
}

struct Quadrature {
  std::size_t samples = 65536;  // accepted points per shift
  int shifts = 2;
  std::uint64_t seed = 0x5eed;
  std::vector<double> delta_grid = geometric_grid(1e-3, 1.0, 16);
  double agreement_tol = 0.05;  // relative disagreement between shifts that marks a ball unreliable
};

struct BallStatistics {
  Point center;
  double radius = 0.0;
  double mu_B = 0.0;
  double muw_B = 0.0;
  double avg_w = 0.0;
  std::optional<double> avg_w_neg_power;  // mean of w^(-p'/p), when p > 1 was requested
  double max_inv_w = 0.0;                 // sample max of 1/w, the A_1 surrogate for ess sup
  std::vector<std::pair<double, double>> sublevel;  // (delta, mu(E_delta(B)) / mu(B))
  double quadrature_error = 0.0;
  bool reliable = true;
  std::size_t samples = 0;
};

namespace detail {

inline std::uint64_t radius_salt(double r) {
  std::uint64_t bits;
  std::memcpy(&bits, &r, sizeof bits);
  return bits;
}

/// w at points of B(center, r), one block per shift. Points are center * y with y uniform in
/// the norm ball at the identity (left translation preserves Haar measure).
inline std::vector<std::vector<double>> sample_ball(const GroupModel& g, const ScalarField& w, const Point& center,
                                                    double r, const Quadrature& q) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
  if (q.samples == 0 || q.shifts < 1) throw Error(ErrorKind::InvalidArgument, "quadrature needs samples");
  if (center.size() != g.dim()) throw Error(ErrorKind::InvalidArgument, "center has the wrong dimension");
  auto hw = g.ball_box_halfwidths(r);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(q.shifts));
  Point u(g.dim()), y(g.dim());
  for (int s = 0; s < q.shifts; ++s) {
    ShiftedSobol sobol(g.dim(), seed_from_point(q.seed, center, radius_salt(r) + static_cast<std::uint64_t>(s)));
    auto& vals = out[static_cast<std::size_t>(s)];
    vals.reserve(q.samples);
    std::size_t draws = 0;
    while (vals.size() < q.samples) {
      if (++draws > 64 * q.samples) throw Error(ErrorKind::InvalidArgument, "ball sampler acceptance too low");
      sobol.next(u);
      for (std::size_t i = 0; i < g.dim(); ++i) y[i] = (2.0 * u[i] - 1.0) * hw[i];
      if (!(g.homogeneous_norm(y) < r)) continue;
      double v = w(g.multiply(center, y));
      if (!std::isfinite(v)) throw Error(ErrorKind::PotentialNotEvaluable, "function is not finite at a sample point");
      vals.push_back(v);
    }
  }
  return out;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double relative_spread(const std::vector<double>& per_shift) {
  auto [lo, hi] = std::minmax_element(per_shift.begin(), per_shift.end());
  double scale = std::max(std::abs(*lo), std::abs(*hi));
  return scale > 0.0 ? (*hi - *lo) / scale : 0.0;
}

}  // namespace detail

/// Quadrature statistics of a positive weight on B(center, radius). With p set, also the
/// mean of w^(-1/(p-1)) (p > 1).
inline BallStatistics ball_stats(const GroupModel& g, const ScalarField& w, const Point& center, double radius,
                                 std::optional<double> p = std::nullopt, const Quadrature& q = {}) {
  if (p && !(*p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be at least 1");
  auto blocks = detail::sample_ball(g, w, center, radius, q);
  BallStatistics st;
  st.center = center;
  st.radius = radius;
  st.mu_B = g.ball_volume(radius).value;
  std::vector<double> all;
  std::vector<double> avg_shift, neg_shift;
  for (const auto& b : blocks) {
    for (double v : b)
      if (!(v > 0.0)) throw Error(ErrorKind::WeightNonpositive, "weight is not positive at a sample point");
    all.insert(all.end(), b.begin(), b.end());
    avg_shift.push_back(detail::mean(b));
    if (p && *p > 1.0) {
      double e = -1.0 / (*p - 1.0);
      double s = 0.0;
      for (double v : b) s += std::pow(v, e);
      neg_shift.push_back(s / static_cast<double>(b.size()));
    }
  }
  st.samples = all.size();
  st.avg_w = detail::mean(avg_shift);
  st.muw_B = st.avg_w * st.mu_B;
  st.quadrature_error = detail::relative_spread(avg_shift);
  if (!neg_shift.empty()) {
    st.avg_w_neg_power = detail::mean(neg_shift);
    st.quadrature_error = std::max(st.quadrature_error, detail::relative_spread(neg_shift));
  }
  st.max_inv_w = 1.0 / *std::min_element(all.begin(), all.end());
  std::sort(all.begin(), all.end());
  for (double delta : q.delta_grid) {
    auto first = std::lower_bound(all.begin(), all.end(), delta * st.avg_w);
    st.sublevel.emplace_back(delta, static_cast<double>(all.end() - first) / static_cast<double>(all.size()));
  }
  st.reliable = st.quadrature_error <= q.agreement_tol;
  return st;
}

/// Centers x radii over which a class condition is tested.
struct BallFamily {
  std::vector<Point> centers;
  std::vector<double> radii;

  double scale() const { return *std::max_element(radii.begin(), radii.end()); }
};

/// Radii R, R/2, ..., R/2^(levels-1) at every center.
inline BallFamily ball_family(std::vector<Point> centers, double R, int levels = 3) {
  if (!(R > 0.0) || levels < 1 || centers.empty()) throw Error(ErrorKind::InvalidArgument, "bad ball family");
  BallFamily f{std::move(centers), {}};
  for (int i = 0; i < levels; ++i) f.radii.push_back(R / std::pow(2.0, i));
  return f;
}

struct ClassVerdict {
  std::string class_name;
  double R = 0.0;
  double constant_estimate = 0.0;
  double cap = 0.0;
  bool pass = false;
  BallStatistics worst_ball;
  std::vector<BallStatistics> balls;
  std::optional<double> delta;  // A_infty: the delta of the reported uniform pair
  std::size_t unreliable = 0;
  std::string note;
};

namespace detail {

inline std::vector<BallStatistics> family_stats(const GroupModel& g, const ScalarField& w, const BallFamily& f,
                                                std::optional<double> p, const Quadrature& q, unsigned threads,
                                                double radius_factor = 1.0) {
  if (f.centers.empty() || f.radii.empty()) throw Error(ErrorKind::InvalidArgument, "empty ball family");
  std::vector<BallStatistics> out(f.centers.size() * f.radii.size());
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const Point& c = f.centers[i / f.radii.size()];
    out[i] = ball_stats(g, w, c, radius_factor * f.radii[i % f.radii.size()], p, q);
  });
  return out;
}

inline std::size_t count_unreliable(const std::vector<BallStatistics>& balls) {
  return static_cast<std::size_t>(std::count_if(balls.begin(), balls.end(), [](const auto& b) { return !b.reliable; }));
}

inline std::string format_number(double x) {
  std::string s = std::to_string(x);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace detail

/// The A_p ball product on one ball.
inline double ap_product(const BallStatistics& b, double p) {
  if (p == 1.0) return b.avg_w * b.max_inv_w;
  if (!b.avg_w_neg_power) throw Error(ErrorKind::InvalidArgument, "ball statistics lack the negative power mean");
  return b.avg_w * std::pow(*b.avg_w_neg_power, p - 1.0);
}

/// sup over the family of the A_p product; pass iff <= cap.
inline ClassVerdict ap_constant(const GroupModel& g, const ScalarField& w, double p, const BallFamily& f,
                                double cap = 100.0, const Quadrature& q = {}, unsigned threads = 1) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be at least 1");
  ClassVerdict v;
  v.class_name = "A_p(" + detail::format_number(p) + ")";
  v.R = f.scale();
  v.cap = cap;
  v.balls = detail::family_stats(g, w, f, p, q, threads);
  std::size_t worst = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < v.balls.size(); ++i) {
    double c = ap_product(v.balls[i], p);
    if (c > best) {
      best = c;
      worst = i;
    }
  }
  v.constant_estimate = best;
  v.worst_ball = v.balls[worst];
  v.pass = best <= cap;
  v.unreliable = detail::count_unreliable(v.balls);
  if (p == 1.0) v.note = "ess sup of 1/w approximated by the sample maximum, which underestimates it";
  return v;
}

/// Uniform (delta, c) with mu(E_delta(B)) >= c mu(B) on every ball. Reports the largest delta on
/// the grid whose uniform fraction reaches c_min, or the smallest delta when none does.
inline ClassVerdict ainfty_check(const GroupModel& g, const ScalarField& w, const BallFamily& f, double c_min = 0.5,
                                 const Quadrature& q = {}, unsigned threads = 1) {
  if (q.delta_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty delta grid");
  ClassVerdict v;
  v.class_name = "A_infty";
  v.R = f.scale();
  v.cap = c_min;
  v.balls = detail::family_stats(g, w, f, std::nullopt, q, threads);
  v.unreliable = detail::count_unreliable(v.balls);
  std::optional<std::size_t> chosen;
  std::vector<double> uniform(q.delta_grid.size(), 1.0);
  std::vector<std::size_t> argmin(q.delta_grid.size(), 0);
  for (std::size_t j = 0; j < q.delta_grid.size(); ++j)
    for (std::size_t i = 0; i < v.balls.size(); ++i)
      if (v.balls[i].sublevel[j].second < uniform[j]) {
        uniform[j] = v.balls[i].sublevel[j].second;
        argmin[j] = i;
      }
  std::size_t smallest = static_cast<std::size_t>(std::min_element(q.delta_grid.begin(), q.delta_grid.end()) - q.delta_grid.begin());
  for (std::size_t j = 0; j < q.delta_grid.size(); ++j)
    if (uniform[j] >= c_min && (!chosen || q.delta_grid[j] > q.delta_grid[*chosen])) chosen = j;
  std::size_t j = chosen.value_or(smallest);
  v.delta = q.delta_grid[j];
  v.constant_estimate = uniform[j];
  v.worst_ball = v.balls[argmin[j]];
  v.pass = chosen.has_value();
  return v;
}

/// sup over the family of mu_w(factor B) / mu_w(B); pass iff <= cap_factor * factor^Q, so that
/// the unweighted ratio factor^Q passes for every group.
inline ClassVerdict doubling_check(const GroupModel& g, const ScalarField& w, const BallFamily& f, double factor = 2.0,
                                   double cap_factor = 100.0, const Quadrature& q = {}, unsigned threads = 1) {
  if (!(factor > 1.0)) throw Error(ErrorKind::InvalidArgument, "dilation factor must exceed 1");
  ClassVerdict v;
  v.class_name = "A_infty_tilde(doubling x" + detail::format_number(factor) + ")";
  v.R = f.scale();
  v.cap = cap_factor * std::pow(factor, g.homogeneous_dimension());
  auto small = detail::family_stats(g, w, f, std::nullopt, q, threads);
  auto large = detail::family_stats(g, w, f, std::nullopt, q, threads, factor);
  std::size_t worst = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < small.size(); ++i) {
    double ratio = large[i].muw_B / small[i].muw_B;
    if (ratio > best) {
      best = ratio;
      worst = i;
    }
  }
  v.constant_estimate = best;
  v.worst_ball = small[worst];
  v.pass = best <= v.cap;
  v.balls = std::move(small);
  v.balls.insert(v.balls.end(), large.begin(), large.end());
  v.unreliable = detail::count_unreliable(v.balls);
  return v;
}

struct RayScan {
  Point direction;
  std::vector<Point> centers;
  std::vector<double> values;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
};

inline std::vector<Point> ray_centers(const GroupModel& g, const Point& direction, int K, double spacing) {
  if (K < 1) throw Error(ErrorKind::InvalidArgument, "need at least one center per ray");
  return g.center_net(spacing * K, spacing, direction);
}

struct IntegralGrowthResult {
  double R = 0.0;
  std::vector<RayScan> rays;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
};

/// M(B) = R^2 times the mean of V over B(x_k, R), along each ray, with the sigma_scan heuristic.
/// Overall Growth needs every ray to grow; one Bounded ray makes it Bounded.
inline IntegralGrowthResult integral_growth_check(const GroupModel& g, const ScalarField& V, double R,
                                                  const std::vector<Point>& rays, int K, double spacing = 1.0,
                                                  const Quadrature& q = {}, const ScanThresholds& thresholds = {},
                                                  unsigned threads = 1) {
  if (K < 4) throw Error(ErrorKind::InvalidArgument, "integral growth needs at least 4 centers per ray");
  if (rays.empty()) throw Error(ErrorKind::InvalidArgument, "no rays given");
  IntegralGrowthResult out;
  out.R = R;
  for (const auto& dir : rays) {
    RayScan s;
    s.direction = dir;
    s.centers = ray_centers(g, dir, K, spacing);
    s.values.resize(s.centers.size());
    parallel_for(s.centers.size(), threads, [&](std::size_t k) {
      auto blocks = detail::sample_ball(g, V, s.centers[k], R, q);
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& b : blocks)
        for (double v : b) {
          sum += v;
          ++n;
        }
      s.values[k] = R * R * sum / static_cast<double>(n);
    });
    s.verdict = classify_scan(s.values, thresholds);
    out.rays.push_back(std::move(s));
  }
  bool all_growth = std::all_of(out.rays.begin(), out.rays.end(), [](const auto& r) { return r.verdict == ScanVerdict::Growth; });
  bool any_bounded = std::any_of(out.rays.begin(), out.rays.end(), [](const auto& r) { return r.verdict == ScanVerdict::Bounded; });
  out.verdict = all_growth ? ScanVerdict::Growth : any_bounded ? ScanVerdict::Bounded : ScanVerdict::Inconclusive;
  return out;
}

struct SublevelThinnessResult {
  double r = 0.0;
  std::vector<double> M_grid;
  std::vector<Point> directions;
  std::vector<std::vector<Point>> centers;              // [ray][k]
  std::vector<std::vector<std::vector<double>>> measures;  // [M][ray][k]: mu({V <= M} cap B(x_k, r))
  std::vector<std::vector<bool>> vanishes;              // [M][ray]
  bool pass = false;
};

/// Sublevel measures along rays. A (M, ray) sequence vanishes when its last value is at most
/// tol * mu(B(r)); the criterion passes when every sequence vanishes.
inline SublevelThinnessResult sublevel_thinness(const GroupModel& g, const ScalarField& V,
                                                const std::vector<double>& M_grid, double r,
                                                const std::vector<Point>& rays, int K, double spacing = 1.0,
                                                double tol = 1e-3, const Quadrature& q = {}, unsigned threads = 1) {
  if (M_grid.empty() || rays.empty()) throw Error(ErrorKind::InvalidArgument, "need thresholds and rays");
  SublevelThinnessResult out;
  out.r = r;
  out.M_grid = M_grid;
  out.directions = rays;
  double vol = g.ball_volume(r).value;
  out.measures.assign(M_grid.size(), std::vector<std::vector<double>>(rays.size()));
  for (std::size_t j = 0; j < rays.size(); ++j) {
    out.centers.push_back(ray_centers(g, rays[j], K, spacing));
    const auto& cs = out.centers.back();
    for (auto& m : out.measures) m[j].resize(cs.size());
    parallel_for(cs.size(), threads, [&](std::size_t k) {
      auto blocks = detail::sample_ball(g, V, cs[k], r, q);
      std::size_t n = 0;
      std::vector<std::size_t> below(M_grid.size(), 0);
      for (const auto& b : blocks)
        for (double v : b) {
          ++n;
          for (std::size_t m = 0; m < M_grid.size(); ++m)
            if (v <= M_grid[m]) ++below[m];
        }
      for (std::size_t m = 0; m < M_grid.size(); ++m)
        out.measures[m][j][k] = vol * static_cast<double>(below[m]) / static_cast<double>(n);
    });
  }
  out.pass = true;
  for (std::size_t m = 0; m < M_grid.size(); ++m) {
    out.vanishes.emplace_back();
    for (std::size_t j = 0; j < rays.size(); ++j) {
      bool v = out.measures[m][j].back() <= tol * vol;
      out.vanishes.back().push_back(v);
      out.pass = out.pass && v;
    }
  }
  return out;
}

}  // namespace subspec
