#include "wcstlab/signal/ica.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "wcstlab/errors.hpp"
#include "wcstlab/random.hpp"

namespace wcst::signal {

namespace {

// (W W^T)^{-1/2} W
Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w * w.transpose());
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * w;
}

Eigen::MatrixXd eeg_rows(const eeg::Recording& rec, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(idx.size()), rec.n_samples());
  for (std::size_t i = 0; i < idx.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = rec.data().row(static_cast<Eigen::Index>(idx[i]));
  return x;
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw InputError("pearson: inputs must be non-empty and equal length");
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

IcaModel ica_fit(const eeg::Recording& rec, const IcaOptions& options) {
  if (!(options.variance_target > 0.0 && options.variance_target <= 1.0)) {
    throw InputError(fmt::format("variance_target must be in (0, 1] (got {})", options.variance_target));
  }
  const auto eeg_idx = rec.indices(eeg::ChannelRole::EEG);
  const auto c = static_cast<Eigen::Index>(eeg_idx.size());
  const auto n = rec.n_samples();
  if (c < 1) throw InputError("ICA needs at least one EEG channel");
  if (n < 10 * c) {
    throw InputError(fmt::format("ICA needs at least 10 samples per channel ({} channels, {} samples)", c, n));
  }

  IcaModel model;
  for (auto i : eeg_idx) model.channel_names.push_back(rec.channels()[i].name);

  Eigen::MatrixXd x = eeg_rows(rec, eeg_idx);
  model.channel_means = x.rowwise().mean();
  x.colwise() -= model.channel_means;

  const Eigen::MatrixXd cov = (x * x.transpose()) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  // Descending order.
  const Eigen::VectorXd evals = es.eigenvalues().reverse();
  const Eigen::MatrixXd evecs = es.eigenvectors().rowwise().reverse();

  const double top = std::max(evals(0), 0.0);
  if (top <= 0.0) throw InputError("ICA input has zero variance");
  Eigen::Index usable = 0;
  double total = 0.0;
  while (usable < c && evals(usable) > top * 1e-10) total += evals(usable++);

  Eigen::Index m = 0;
  double cum = 0.0;
  while (m < usable) {
    cum += evals(m++);
    if (cum >= options.variance_target * total) break;
  }
  model.retained_variance = cum / total;

  const Eigen::VectorXd d = evals.head(m);
  const Eigen::MatrixXd e = evecs.leftCols(m);
  model.whitening = d.cwiseSqrt().cwiseInverse().asDiagonal() * e.transpose();
  if (options.fit_decimation < 1) {
    throw InputError(fmt::format("fit_decimation must be >= 1 (got {})", options.fit_decimation));
  }
  const Eigen::Index n_fit = (n + options.fit_decimation - 1) / options.fit_decimation;
  if (n_fit < 10 * c) {
    throw InputError(fmt::format("decimation {} leaves {} samples, fewer than 10 per channel", options.fit_decimation, n_fit));
  }
  Eigen::MatrixXd z(m, n_fit);
  for (Eigen::Index j = 0; j < n_fit; ++j) z.col(j) = model.whitening * x.col(j * options.fit_decimation);

  Rng rng(mix_seed(options.seed, 0x1CA));
  std::normal_distribution<double> normal;
  Eigen::MatrixXd w(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) w(i, j) = normal(rng);
  w = symmetric_decorrelation(w);

  const double inv_n = 1.0 / static_cast<double>(n_fit);
  double change = std::numeric_limits<double>::infinity();
  int it = 0;
  while (true) {
    if (it >= options.max_iterations) {
      throw ConvergenceError(
          fmt::format("FastICA did not converge after {} iterations (last change {:.3g}, tolerance {:.3g})", it,
                      change, options.tolerance),
          it, change);
    }
    ++it;
    Eigen::MatrixXd g = (w * z).array().tanh().matrix();
    const Eigen::VectorXd gp = (1.0 - g.array().square()).rowwise().mean().matrix();
    Eigen::MatrixXd w1 = (g * z.transpose()) * inv_n - gp.asDiagonal() * w;
    w1 = symmetric_decorrelation(w1);
    change = (1.0 - (w1 * w.transpose()).diagonal().array().abs()).abs().maxCoeff();
    w = std::move(w1);
    if (change < options.tolerance) break;
  }
  model.iterations = it;

  model.unmixing = w * model.whitening;
  model.mixing = e * d.cwiseSqrt().asDiagonal() * w.transpose();
  model.sources = model.unmixing * x;

  const auto eog_idx = rec.indices(eeg::ChannelRole::EOG);
  model.eog_correlations.assign(static_cast<std::size_t>(m), 0.0);
  for (Eigen::Index k = 0; k < m; ++k) {
    const std::span<const double> src(model.sources.row(k).data(), static_cast<std::size_t>(n));
    for (auto j : eog_idx) {
      const std::span<const double> ref(rec.data().row(static_cast<Eigen::Index>(j)).data(),
                                        static_cast<std::size_t>(n));
      const double r = std::abs(pearson(src, ref));
      model.eog_correlations[static_cast<std::size_t>(k)] = std::max(model.eog_correlations[static_cast<std::size_t>(k)], r);
    }
    if (model.eog_correlations[static_cast<std::size_t>(k)] > options.r_threshold) model.rejected.push_back(static_cast<int>(k));
  }
  return model;
}

eeg::Recording ica_clean(const eeg::Recording& rec, const IcaModel& model, double r_threshold) {
  const auto eeg_idx = rec.indices(eeg::ChannelRole::EEG);
  std::vector<std::string> names;
  for (auto i : eeg_idx) names.push_back(rec.channels()[i].name);
  if (names != model.channel_names) {
    throw InputError(fmt::format("ICA model spans {} EEG channels that do not match the recording's {}",
                                 model.channel_names.size(), names.size()));
  }
  Eigen::MatrixXd x = eeg_rows(rec, eeg_idx);
  x.colwise() -= model.channel_means;
  Eigen::MatrixXd s = model.unmixing * x;
  for (Eigen::Index k = 0; k < s.rows(); ++k) {
    if (model.eog_correlations[static_cast<std::size_t>(k)] > r_threshold) s.row(k).setZero();
  }
  Eigen::MatrixXd y = model.mixing * s;
  y.colwise() += model.channel_means;

  eeg::Matrix out = rec.data();
  for (std::size_t i = 0; i < eeg_idx.size(); ++i) out.row(static_cast<Eigen::Index>(eeg_idx[i])) = y.row(static_cast<Eigen::Index>(i));
  return rec.with_data(std::move(out));
}

}  // namespace wcst::signal
