#include "encompass/enctest.hpp"

#include <cmath>

namespace enc {

double wald_stat(const Vector& theta_hat, const HypothesisSpec& hyp, const Matrix& V,
                 std::size_t T) {
  const auto p1 = static_cast<Eigen::Index>(hyp.tested_indices.size());
  if (V.rows() != p1 || V.cols() != p1 || hyp.beta1_star.size() != p1) {
    throw Error(ErrorCode::DimensionMismatch, "weighting matrix does not match tested block");
  }
  Vector diff(p1);
  for (Eigen::Index i = 0; i < p1; ++i) {
    diff(i) = theta_hat(hyp.tested_indices[i]) - hyp.beta1_star(i);
  }
  const Eigen::LLT<Matrix> llt(0.5 * (V + V.transpose()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularWeight, "Wald weighting matrix is not positive definite");
  }
  return std::max(0.0, static_cast<double>(T) * diff.dot(llt.solve(diff)));
}

CovVariant default_cov_variant(int horizon) {
  return horizon > 1 ? CovVariant::hac_sclsp : CovVariant::sclsp;
}

TestReport run_encompassing_test(const ForecastPanel& panel, LinkKind kind, TestMode mode,
                                 Direction direction, const TestOptions& options) {
  const ProbabilityLevel alpha(options.alpha);
  const std::size_t T = panel.size();
  if (T < 50) {
    throw Error(ErrorCode::SeriesTooShort, "encompassing tests need at least 50 observations");
  }
  const ForecastPanel data = direction == Direction::two_encompasses_one ? panel.swapped() : panel;

  TestReport rep;
  rep.link = kind;
  rep.mode = mode;
  rep.direction = direction;
  rep.T = T;
  rep.horizon = panel.horizon();
  rep.alpha = alpha;
  rep.n_draws = options.n_draws;
  rep.seed = options.seed;
  if (T < 250) {
    rep.warnings.push_back("T < 250: few expected VaR violations, test decisions are unreliable");
  }
  if (T < 1000 && panel.horizon() >= 5) {
    rep.warnings.push_back("T < 1000 with horizon >= 5: test decisions are unreliable");
  }
  if (data.crossing_warnings() > 0) {
    rep.warnings.push_back(std::to_string(data.crossing_warnings()) +
                           " rows with ES forecast above VaR forecast");
  }

  const double box = options.box_bound ? *options.box_bound : default_box_bound(data);
  const LinkSpec link = make_link(kind, box, mode);
  const HypothesisSpec hyp = hypothesis(kind, mode, direction);
  const LossSpec loss = LossSpec::fz0();

  const FitResult fr = fit(link, loss, data, alpha, options.fit);
  rep.theta_hat = fr.theta_hat;
  rep.beta1_star = hyp.beta1_star;
  rep.objective = fr.objective;
  rep.fit_converged = fr.converged;
  rep.fit_flat = fr.flat;
  if (fr.flat) rep.warnings.push_back("objective is flat around the estimate");

  CovOptions co;
  co.variant = options.cov_variant ? *options.cov_variant : default_cov_variant(panel.horizon());
  co.c_T = options.c_T;
  co.m_T = options.m_T;
  CovEstimates cov;
  try {
    cov = estimate_covariance(data, link, loss, fr.theta_hat, alpha, co);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularBread) throw Error(ErrorCode::DegenerateFit, e.what());
    throw;
  }
  rep.cov_variant = cov.variant;
  rep.c_T = cov.c_T;
  rep.m_T = cov.m_T;
  rep.bread_condition = cov.bread_condition;
  rep.warnings.insert(rep.warnings.end(), cov.warnings.begin(), cov.warnings.end());

  rep.W = wald_stat(fr.theta_hat, hyp, cov.V, T);
  const Cone cone = binding_cone(link, hyp, fr.theta_hat, T);
  rep.cone_rows = static_cast<int>(cone.rows());
  rep.cone_plugin_rows = cone.plugin_rows;
  if (cone.plugin_rows > 0) {
    rep.warnings.push_back("beta2 bound treated as binding from the estimate");
  }
  const auto g = link.layout.gamma_dim();
  const NullDistribution null = sample_wald_null(leading_block(cov.bread, g),
                                                 leading_block(cov.meat, g), link.layout, cone,
                                                 cov.V, options.n_draws, options.seed);
  rep.pvalue = pvalue(null, rep.W);
  rep.point_mass_at_zero = null.point_mass_at_zero;
  for (double level : options.levels) rep.crit[level] = null.critical_value(level);
  return rep;
}

const char* to_string(PairOutcome outcome) {
  switch (outcome) {
    case PairOutcome::encompassing: return "encompassing";
    case PairOutcome::encompassed: return "encompassed";
    case PairOutcome::combination: return "combination";
    case PairOutcome::inconclusive: return "inconclusive";
  }
  return "?";
}

PairClassification classify_pair(const TestReport& forecast1, const TestReport& forecast2,
                                 double level) {
  if (forecast1.direction != Direction::one_encompasses_two ||
      forecast2.direction != Direction::two_encompasses_one) {
    throw Error(ErrorCode::MismatchedReports, "reports must cover both directions in order");
  }
  if (forecast1.link != forecast2.link || forecast1.mode != forecast2.mode ||
      forecast1.T != forecast2.T) {
    throw Error(ErrorCode::MismatchedReports, "reports differ in link, mode or sample");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  }
  const bool reject1 = forecast1.pvalue < level;
  const bool reject2 = forecast2.pvalue < level;
  PairOutcome out;
  if (reject2 && !reject1) {
    out = PairOutcome::encompassing;
  } else if (reject1 && !reject2) {
    out = PairOutcome::encompassed;
  } else if (reject1 && reject2) {
    out = PairOutcome::combination;
  } else {
    out = PairOutcome::inconclusive;
  }
  return {out, forecast1.pvalue, forecast2.pvalue, level,
          "two tests at level " + std::to_string(level) +
              "; the joint decision holds at a Bonferroni-corrected level of " +
              std::to_string(2.0 * level)};
}

}  // namespace enc
