#include "sigmalab/martingale.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigmalab::sigma {

namespace {

constexpr double kCollinearTol = 1e-9;

} // namespace

MartingaleReport martingale_regression(std::span<const MartingaleSample> samples,
                                       const std::vector<std::string>& probe_names) {
  MartingaleReport rep;
  rep.n_paths = samples.size();
  const auto n = static_cast<Eigen::Index>(samples.size());
  const std::size_t p = probe_names.size();
  for (const auto& smp : samples)
    if (smp.probes.size() != p)
      throw std::invalid_argument("martingale_regression: probe count mismatch");

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y(i) = samples[static_cast<std::size_t>(i)].increment;
  const double y_scale = n > 0 ? y.cwiseAbs().maxCoeff() : 0.0;
  if (n < 2 || y_scale == 0.0 || (y.array() - y.mean()).abs().maxCoeff() <= 1e-14 * y_scale) {
    rep.degenerate = true;
    if (y_scale == 0.0 || n < 2) {
      rep.names = {"intercept"};
      rep.t_stats = {0.0};
      rep.pass = true;
      return rep;
    }
  }

  // Greedily keep probes that add rank after centering.
  std::vector<std::size_t> kept;
  Eigen::MatrixXd basis(n, 0);
  for (std::size_t j = 0; j < p; ++j) {
    Eigen::VectorXd col(n);
    for (Eigen::Index i = 0; i < n; ++i)
      col(i) = samples[static_cast<std::size_t>(i)].probes[j];
    if (!col.allFinite()) {
      rep.dropped.push_back(probe_names[j]);
      continue;
    }
    col.array() -= col.mean();
    const double norm0 = col.norm();
    if (basis.cols() > 0)
      col -= basis * (basis.transpose() * col);
    if (norm0 == 0.0 || col.norm() <= kCollinearTol * norm0) {
      rep.dropped.push_back(probe_names[j]);
      continue;
    }
    basis.conservativeResize(n, basis.cols() + 1);
    basis.col(basis.cols() - 1) = col / col.norm();
    kept.push_back(j);
  }

  const auto q = static_cast<Eigen::Index>(kept.size() + 1);
  Eigen::MatrixXd X(n, q);
  X.col(0).setOnes();
  for (std::size_t c = 0; c < kept.size(); ++c)
    for (Eigen::Index i = 0; i < n; ++i)
      X(i, static_cast<Eigen::Index>(c + 1)) = samples[static_cast<std::size_t>(i)].probes[kept[c]];

  // Standardize columns for conditioning; t-statistics are scale-invariant.
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(q), scale = Eigen::VectorXd::Ones(q);
  for (Eigen::Index c = 1; c < q; ++c) {
    shift(c) = X.col(c).mean();
    X.col(c).array() -= shift(c);
    scale(c) = X.col(c).norm() / std::sqrt(static_cast<double>(n));
    X.col(c) /= scale(c);
  }

  const Eigen::MatrixXd xtx = X.transpose() * X;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  const Eigen::VectorXd beta = ldlt.solve(X.transpose() * y);
  const Eigen::VectorXd resid = y - X * beta;
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index i = 0; i < n; ++i)
    meat.noalias() += (resid(i) * resid(i)) * X.row(i).transpose() * X.row(i);
  const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(q, q));
  const double dof = static_cast<double>(n) / std::max<double>(1.0, static_cast<double>(n - q));
  const Eigen::MatrixXd cov = dof * inv * meat * inv;

  // With centered probes the intercept is the mean increment.
  rep.names.push_back("intercept");
  for (std::size_t j : kept)
    rep.names.push_back(probe_names[j]);
  for (Eigen::Index c = 0; c < q; ++c) {
    const double se = std::sqrt(std::max(0.0, cov(c, c)));
    const double tc = se > 0.0 ? beta(c) / se : (beta(c) == 0.0 ? 0.0 : INFINITY);
    rep.t_stats.push_back(tc);
    rep.score = std::max(rep.score, std::fabs(tc));
  }
  rep.pass = rep.score < MartingaleReport::kThreshold;
  return rep;
}

MartingaleReport martingale_test(std::span<const Path> ensemble, const std::vector<Probe>& probes,
                                 std::optional<double> s, std::optional<double> t) {
  if (ensemble.empty())
    throw std::invalid_argument("martingale_test: empty ensemble");
  const TimeGrid& grid = ensemble.front().grid();
  const double T = grid.horizon();
  const std::size_t ks = grid.index_at(s.value_or(0.5 * T));
  const std::size_t kt = grid.index_at(t.value_or(T));
  if (!(ks < kt))
    throw std::invalid_argument("martingale_test: need s < t");

  std::vector<std::string> names{"N_s"};
  for (const auto& pr : probes)
    names.push_back(pr.name);
  std::vector<MartingaleSample> samples(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const Path& p = ensemble[i];
    samples[i].increment = p[kt] - p[ks];
    samples[i].probes.reserve(names.size());
    samples[i].probes.push_back(p[ks]);
    for (const auto& pr : probes)
      samples[i].probes.push_back(pr.eval(i, ks));
  }
  MartingaleReport rep = martingale_regression(samples, names);
  rep.s = grid.time(ks);
  rep.t = grid.time(kt);
  return rep;
}

} // namespace sigmalab::sigma
