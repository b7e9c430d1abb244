#include "encompass/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace enc {

void FitOptions::validate() const {
  if (max_ils_rounds < 1) throw Error(ErrorCode::InvalidArgument, "max_ils_rounds must be >= 1");
  if (!(perturb_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "perturb_scale must be > 0");
  if (!(simplex_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "simplex_tol must be > 0");
  if (max_simplex_evals < 10) throw Error(ErrorCode::InvalidArgument, "max_simplex_evals too small");
  if (n_random_starts < 0) throw Error(ErrorCode::InvalidArgument, "n_random_starts must be >= 0");
}

Vector project_to_space(const Vector& theta, const ParamSpace& space) {
  Vector x = theta.cwiseMax(space.lower()).cwiseMin(space.upper());
  if (space.is_box()) return x;
  const Matrix& g = space.gamma();
  const Vector& r = space.r();
  for (int sweep = 0; sweep < 1000; ++sweep) {
    bool moved = false;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const double viol = g.row(i).dot(x) - r(i);
      if (viol > 0.0) {
        x -= (viol / g.row(i).squaredNorm()) * g.row(i).transpose();
        moved = true;
      }
    }
    if (!moved) break;
  }
  return x;
}

namespace {

bool is_intercept(LinkKind kind, int i) {
  switch (kind) {
    case LinkKind::linear: return i >= 4;
    case LinkKind::convex: return i >= 2;
    case LinkKind::nocross: return i >= 2;
  }
  return false;
}

struct Objective {
  const LinkDesign& design;
  const LossSpec& loss;
  std::span<const double> y;
  const ParamSpace& space;
  double alpha;
  long evals = 0;

  double operator()(const Vector& theta) {
    ++evals;
    return design_objective(design, loss, y, theta, alpha);
  }
};

struct SimplexResult {
  Vector x;
  double f;
  bool converged;
  bool flat;
};

// Nelder-Mead on the projected objective: every trial point is projected onto
// the parameter space before evaluation.
SimplexResult nelder_mead(Objective& obj, const Vector& x0, const Vector& step, double tol,
                          int max_evals) {
  const Eigen::Index k = x0.size();
  const auto& space = obj.space;
  std::vector<Vector> pts;
  std::vector<double> fv;
  pts.reserve(k + 1);
  pts.push_back(project_to_space(x0, space));
  for (Eigen::Index i = 0; i < k; ++i) {
    Vector v = pts[0];
    v(i) += step(i);
    if (v(i) > space.upper()(i)) v(i) = pts[0](i) - step(i);
    pts.push_back(project_to_space(v, space));
  }
  for (const auto& p : pts) fv.push_back(obj(p));

  std::vector<std::size_t> order(k + 1);
  const long start_evals = obj.evals;
  bool converged = false;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };

  while (obj.evals - start_evals < max_evals) {
    sort_simplex();
    const std::size_t best = order.front(), worst = order.back(), second = order[k - 1];
    const double fbest = fv[best], fworst = fv[worst];
    if (!std::isfinite(fbest)) break;
    if (std::isfinite(fworst) && fworst - fbest <= tol * (1.0 + std::abs(fbest))) {
      converged = true;
      break;
    }
    double diam = 0.0;
    for (std::size_t i = 0; i <= static_cast<std::size_t>(k); ++i) {
      diam = std::max(diam, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    }
    if (diam < 1e-12) {
      converged = true;
      break;
    }

    Vector centroid = Vector::Zero(k);
    for (std::size_t i = 0; i <= static_cast<std::size_t>(k); ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(k);

    const Vector xr = project_to_space(centroid + (centroid - pts[worst]), space);
    const double fr = obj(xr);
    if (fr < fbest) {
      const Vector xe = project_to_space(centroid + 2.0 * (centroid - pts[worst]), space);
      const double fe = obj(xe);
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fworst;
    const Vector xc = outside ? project_to_space(centroid + 0.5 * (xr - centroid), space)
                              : project_to_space(centroid + 0.5 * (pts[worst] - centroid), space);
    const double fc = obj(xc);
    if (fc < (outside ? fr : fworst)) {
      pts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= static_cast<std::size_t>(k); ++i) {
      if (i == best) continue;
      pts[i] = project_to_space(pts[best] + 0.5 * (pts[i] - pts[best]), space);
      fv[i] = obj(pts[i]);
    }
  }
  sort_simplex();
  const std::size_t best = order.front();
  bool flat = false;
  if (converged) {
    double spread = 0.0;
    for (const auto& p : pts) spread = std::max(spread, (p - pts[best]).cwiseAbs().maxCoeff());
    flat = spread > 1e-3;
  }
  return {pts[best], fv[best], converged, flat};
}

}  // namespace

SearchBox search_box(const LinkSpec& link, const ForecastPanel& panel) {
  double scale = 0.0;
  for (double v : panel.e1()) scale += std::abs(v);
  scale = std::max(scale / static_cast<double>(panel.size()), 1e-8);
  SearchBox box{Vector(link.k), Vector(link.k)};
  for (int i = 0; i < link.k; ++i) {
    const double w = 2.0 * (is_intercept(link.kind, i) ? scale : 1.0);
    box.lower(i) = std::max(link.space.lower()(i), link.theta_star(i) - w);
    box.upper(i) = std::min(link.space.upper()(i), link.theta_star(i) + w);
  }
  return box;
}

FitResult fit(const LinkSpec& link, const LossSpec& loss, const ForecastPanel& panel, double alpha,
              const FitOptions& options) {
  options.validate();
  const LinkDesign design = make_design(link, panel);
  Objective obj{design, loss, panel.y(), link.space, alpha};
  const SearchBox box = search_box(link, panel);
  const Vector range = box.upper - box.lower;
  const Vector step = (0.05 * range).cwiseMax(1e-6);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Vector> starts;
  starts.push_back(link.theta_star);
  if (!options.start_points.empty()) {
    for (const auto& s : options.start_points) {
      if (s.size() != link.k) throw Error(ErrorCode::DimensionMismatch, "start point length != k");
      starts.push_back(project_to_space(s, link.space));
    }
  } else {
    for (int i = 0; i < options.n_random_starts; ++i) {
      Vector s(link.k);
      for (int j = 0; j < link.k; ++j) s(j) = box.lower(j) + unif(rng) * range(j);
      starts.push_back(project_to_space(s, link.space));
    }
  }

  FitResult result;
  result.objective = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    if (!std::isfinite(obj(s))) continue;
    const auto local = nelder_mead(obj, s, step, options.simplex_tol, options.max_simplex_evals);
    if (local.f < result.objective) {
      result.theta_hat = local.x;
      result.objective = local.f;
      result.converged = local.converged;
      result.flat = local.flat;
    }
  }
  if (!std::isfinite(result.objective)) {
    throw Error(ErrorCode::AllStartsInfeasible,
                "objective is infinite at every start point (combined ES never negative)");
  }

  for (int round = 0; round < options.max_ils_rounds; ++round) {
    Vector cand = result.theta_hat;
    for (int j = 0; j < link.k; ++j) cand(j) += options.perturb_scale * range(j) * gauss(rng);
    cand = project_to_space(cand, link.space);
    result.rounds_used = round + 1;
    if (!std::isfinite(obj(cand))) continue;
    const auto local = nelder_mead(obj, cand, step, options.simplex_tol, options.max_simplex_evals);
    if (local.f < result.objective) {
      result.theta_hat = local.x;
      result.objective = local.f;
      result.converged = local.converged;
      result.flat = local.flat;
      ++result.n_restarts_improved;
    }
  }
  result.evaluations = obj.evals;
  return result;
}

}  // namespace enc
