#include "encompass/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "encompass/rng.hpp"

namespace enc {

Cone binding_cone(const LinkSpec& link, const HypothesisSpec& hyp, const Vector& theta_hat,
                  std::size_t T) {
  const auto& layout = link.layout;
  const int p = layout.p(), p1 = layout.p1;
  if (hyp.beta1_star.size() != p1) {
    throw Error(ErrorCode::DimensionMismatch, "beta1* length does not match layout p1");
  }
  const double kappa = std::pow(static_cast<double>(std::max<std::size_t>(T, 1)), -1.0 / 3.0);
  const Matrix& g = link.space.gamma();
  const Vector& r = link.space.r();
  std::vector<Eigen::Index> rows;
  int plugin = 0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    // only rows acting on beta alone
    if (g.row(i).tail(g.cols() - p).cwiseAbs().maxCoeff() > 0.0) continue;
    const bool touches_b1 = g.row(i).head(p1).cwiseAbs().maxCoeff() > 0.0;
    const bool touches_b2 = p > p1 && g.row(i).segment(p1, p - p1).cwiseAbs().maxCoeff() > 0.0;
    if (touches_b1 && !touches_b2) {
      if (std::abs(g.row(i).head(p1).dot(hyp.beta1_star) - r(i)) <= 1e-9) rows.push_back(i);
    } else if (touches_b2 && !touches_b1) {
      if (theta_hat.size() == g.cols() && std::abs(g.row(i).dot(theta_hat) - r(i)) <= kappa) {
        rows.push_back(i);
        ++plugin;
      }
    }
  }
  Cone cone{Matrix(static_cast<Eigen::Index>(rows.size()), p), plugin};
  for (std::size_t j = 0; j < rows.size(); ++j) cone.gamma_b.row(j) = g.row(rows[j]).head(p);
  return cone;
}

namespace {

// Lawson-Hanson active set for min ||E mu - f|| subject to mu >= 0.
Vector nnls(const Matrix& E, const Vector& f) {
  const Eigen::Index n = E.cols();
  Vector mu = Vector::Zero(n);
  std::vector<char> passive(n, 0);
  const double tol = 1e-12 * (1.0 + E.norm() * f.norm());
  Vector w = E.transpose() * f;
  for (int outer = 0; outer < 3 * static_cast<int>(n) + 10; ++outer) {
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w(j) > best) {
        best = w(j);
        t = j;
      }
    }
    if (t < 0) return mu;
    passive[t] = 1;
    for (int inner = 0; inner <= static_cast<int>(n); ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j]) idx.push_back(j);
      }
      Matrix ep(E.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) ep.col(static_cast<Eigen::Index>(k)) = E.col(idx[k]);
      const Vector sp = ep.completeOrthogonalDecomposition().solve(f);
      if (sp.minCoeff() > 0.0) {
        mu.setZero();
        for (std::size_t k = 0; k < idx.size(); ++k) mu(idx[k]) = sp(static_cast<Eigen::Index>(k));
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double s = sp(static_cast<Eigen::Index>(k));
        if (s <= 0.0) alpha = std::min(alpha, mu(idx[k]) / (mu(idx[k]) - s));
      }
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const Eigen::Index j = idx[k];
        mu(j) += alpha * (sp(static_cast<Eigen::Index>(k)) - mu(j));
        if (mu(j) <= tol) {
          mu(j) = 0.0;
          passive[j] = 0;
        }
      }
    }
    w = E.transpose() * (f - E * mu);
  }
  throw Error(ErrorCode::NotPositiveDefinite, "cone projection did not terminate");
}

}  // namespace

// With A = L L^T and y = L^T x the problem is the Euclidean projection of
// L^T z onto {y : M y <= 0}, M = G L^-T. By Moreau, that projection is
// L^T z minus its projection onto the polar cone {M^T mu : mu >= 0}.
Vector solve_cone_qp(const Matrix& A, const Vector& z, const Cone& cone) {
  const Eigen::Index p = z.size();
  if (A.rows() != p || A.cols() != p || cone.dim() != p) {
    throw Error(ErrorCode::DimensionMismatch, "QP dimensions disagree");
  }
  const Eigen::LLT<Matrix> llt(0.5 * (A + A.transpose()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "QP weight matrix is not positive definite");
  }
  if (cone.rows() == 0) return z;
  const Matrix& G = cone.gamma_b;
  if ((G * z).maxCoeff() <= 0.0) return z;

  const Matrix L = llt.matrixL();
  // M^T = L^-1 G^T
  const Matrix mt = L.triangularView<Eigen::Lower>().solve(G.transpose());
  const Vector w = L.transpose() * z;
  const Vector mu = nnls(mt, w);
  const Vector y = w - mt * mu;
  Vector x = L.transpose().triangularView<Eigen::Upper>().solve(y);
  // clear round-off on rows that end up active
  const Vector gx = G * x;
  if (gx.maxCoeff() > 0.0) {
    for (Eigen::Index i = 0; i < G.rows(); ++i) {
      if (gx(i) > 0.0) x -= (gx(i) / G.row(i).squaredNorm()) * G.row(i).transpose();
    }
  }
  return x;
}

double NullDistribution::critical_value(double level) const {
  if (samples.empty()) throw Error(ErrorCode::EmptyDistribution, "no simulated draws");
  const double pos = std::ceil((1.0 - level) * static_cast<double>(samples.size()));
  const auto idx = static_cast<std::size_t>(std::clamp(pos, 1.0, double(samples.size()))) - 1;
  return samples[idx];
}

NullDistribution sample_wald_null(const Matrix& bread_gamma, const Matrix& meat_gamma,
                                  const SubvectorLayout& layout, const Cone& cone, const Matrix& V,
                                  std::size_t n_draws, std::uint64_t seed) {
  if (n_draws == 0) throw Error(ErrorCode::EmptyDistribution, "n_draws must be positive");
  const Eigen::Index g = layout.gamma_dim(), p = layout.p(), p1 = layout.p1;
  if (bread_gamma.rows() != g || bread_gamma.cols() != g || meat_gamma.rows() != g ||
      meat_gamma.cols() != g || V.rows() != p1 || V.cols() != p1 || cone.dim() != p) {
    throw Error(ErrorCode::DimensionMismatch, "matrices inconsistent with layout");
  }
  const Eigen::LDLT<Matrix> bread_ldlt(bread_gamma);
  const Matrix bread_inv = bread_ldlt.solve(Matrix::Identity(g, g));
  const Matrix A = leading_block(bread_inv, p).inverse();
  const Eigen::LLT<Matrix> v_llt(0.5 * (V + V.transpose()));
  if (v_llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularWeight, "Wald weighting matrix is not positive definite");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (meat_gamma + meat_gamma.transpose()));
  const Matrix root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  // Z_gamma = bread^-1 * root * n with n standard normal
  const Matrix loading = bread_inv * root;

  NullDistribution dist;
  dist.n_draws = n_draws;
  dist.seed = seed;
  dist.samples.resize(n_draws);
  constexpr std::size_t kBlock = 4096;
  Vector noise(g);
  for (std::size_t start = 0; start < n_draws; start += kBlock) {
    std::mt19937_64 rng(derive_seed(seed, {start / kBlock}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t end = std::min(n_draws, start + kBlock);
    for (std::size_t i = start; i < end; ++i) {
      for (Eigen::Index j = 0; j < g; ++j) noise(j) = gauss(rng);
      const Vector z_beta = (loading * noise).head(p);
      const Vector lam = solve_cone_qp(A, z_beta, cone);
      const Vector l1 = lam.head(p1);
      dist.samples[i] = std::max(0.0, l1.dot(v_llt.solve(l1)));
    }
  }
  std::sort(dist.samples.begin(), dist.samples.end());
  const auto zeros = std::upper_bound(dist.samples.begin(), dist.samples.end(), 1e-12) -
                     dist.samples.begin();
  dist.point_mass_at_zero = static_cast<double>(zeros) / static_cast<double>(n_draws);
  return dist;
}

double pvalue(const NullDistribution& dist, double w_obs) {
  if (dist.samples.empty()) throw Error(ErrorCode::EmptyDistribution, "no simulated draws");
  const auto first_ge = std::lower_bound(dist.samples.begin(), dist.samples.end(), w_obs);
  const auto count = static_cast<double>(dist.samples.end() - first_ge);
  return (1.0 + count) / (static_cast<double>(dist.samples.size()) + 1.0);
}

}  // namespace enc
