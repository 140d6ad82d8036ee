#include "wcstlab/erp/cluster.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "wcstlab/errors.hpp"
#include "wcstlab/random.hpp"

namespace wcst::erp {

namespace {

// Participants x cells, cells ordered channel-major.
struct Stacked {
  Eigen::MatrixXd d;
  Eigen::RowVectorXd sumsq;
  Eigen::Index channels = 0;
  Eigen::Index samples = 0;
};

Stacked stack(std::span<const Eigen::MatrixXd> deltas) {
  Stacked s;
  s.channels = deltas.front().rows();
  s.samples = deltas.front().cols();
  s.d.resize(static_cast<Eigen::Index>(deltas.size()), s.channels * s.samples);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i].rows() != s.channels || deltas[i].cols() != s.samples) {
      throw InputError(fmt::format("participant {} delta is {}x{}, expected {}x{}", i, deltas[i].rows(),
                                   deltas[i].cols(), s.channels, s.samples));
    }
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = deltas[i];
    s.d.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(rm.data(), rm.size());
  }
  s.sumsq = s.d.array().square().colwise().sum();
  return s;
}

// t per cell from the signed column sums; the sum of squares does not change
// under sign flips.
void t_from_sums(const Eigen::RowVectorXd& sums, const Eigen::RowVectorXd& sumsq, double n,
                 Eigen::RowVectorXd& t) {
  t.resize(sums.size());
  for (Eigen::Index k = 0; k < sums.size(); ++k) {
    const double mean = sums(k) / n;
    const double var = (sumsq(k) - n * mean * mean) / (n - 1.0);
    t(k) = var > 1e-12 * sumsq(k) / n && var > 0.0 ? mean / std::sqrt(var / n) : 0.0;
  }
}

// Flood fill over cells; calls `emit(members, mass, polarity)` per cluster.
template <typename Emit>
void flood(const double* t, Eigen::Index channels, Eigen::Index samples, double threshold, const Adjacency& adj,
           std::vector<int>& label, std::vector<Eigen::Index>& stack, Emit&& emit) {
  const Eigen::Index n = channels * samples;
  label.assign(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> members;
  for (Eigen::Index start = 0; start < n; ++start) {
    const double v = t[start];
    const int pol = v > threshold ? 1 : (v < -threshold ? -1 : 0);
    if (pol == 0 || label[static_cast<std::size_t>(start)] != 0) continue;
    members.clear();
    double mass = 0.0;
    stack.clear();
    stack.push_back(start);
    label[static_cast<std::size_t>(start)] = pol;
    auto visit = [&](Eigen::Index k) {
      if (label[static_cast<std::size_t>(k)] != 0) return;
      const double w = t[k];
      if ((pol > 0 && w > threshold) || (pol < 0 && w < -threshold)) {
        label[static_cast<std::size_t>(k)] = pol;
        stack.push_back(k);
      }
    };
    while (!stack.empty()) {
      const Eigen::Index k = stack.back();
      stack.pop_back();
      members.push_back(k);
      mass += t[k];
      const Eigen::Index c = k / samples;
      const Eigen::Index s = k % samples;
      if (s > 0) visit(k - 1);
      if (s + 1 < samples) visit(k + 1);
      for (auto nb : adj.neighbours(static_cast<std::size_t>(c))) visit(static_cast<Eigen::Index>(nb) * samples + s);
    }
    emit(members, mass, pol);
  }
}

void check_inputs(std::span<const Eigen::MatrixXd> deltas, const Adjacency& adj) {
  if (deltas.size() < 2) throw InputError(fmt::format("cluster test needs >= 2 participants (got {})", deltas.size()));
  if (adj.size() == 0) throw InputError("cluster test needs a non-empty adjacency graph");
  if (static_cast<Eigen::Index>(adj.size()) != deltas.front().rows()) {
    throw InputError(fmt::format("adjacency covers {} channels but deltas have {}", adj.size(), deltas.front().rows()));
  }
}

}  // namespace

std::string_view to_string(Polarity p) { return p == Polarity::Positive ? "positive" : "negative"; }

double t_critical(double alpha, int df) {
  if (!(alpha > 0.0 && alpha < 1.0) || df < 1) {
    throw InputError(fmt::format("invalid t quantile request (alpha {}, df {})", alpha, df));
  }
  const boost::math::students_t dist(df);
  return boost::math::quantile(dist, 1.0 - alpha / 2.0);
}

Eigen::MatrixXd one_sample_t(std::span<const Eigen::MatrixXd> deltas) {
  if (deltas.size() < 2) throw InputError(fmt::format("one-sample t needs >= 2 participants (got {})", deltas.size()));
  const auto s = stack(deltas);
  Eigen::RowVectorXd t;
  t_from_sums(s.d.colwise().sum(), s.sumsq, static_cast<double>(deltas.size()), t);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(t.data(), s.channels,
                                                                                               s.samples);
  return out;
}

std::vector<ClusterResult> find_clusters(const Eigen::MatrixXd& t, double threshold, const Adjacency& adjacency) {
  if (static_cast<Eigen::Index>(adjacency.size()) != t.rows()) {
    throw InputError(fmt::format("adjacency covers {} channels but the map has {}", adjacency.size(), t.rows()));
  }
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = t;
  std::vector<ClusterResult> out;
  std::vector<int> label;
  std::vector<Eigen::Index> stack;
  flood(rm.data(), t.rows(), t.cols(), threshold, adjacency, label, stack,
        [&](const std::vector<Eigen::Index>& members, double mass, int pol) {
          ClusterResult r;
          r.polarity = pol > 0 ? Polarity::Positive : Polarity::Negative;
          r.mass = mass;
          for (auto k : members) r.members.push_back({static_cast<int>(k / t.cols()), static_cast<int>(k % t.cols())});
          std::sort(r.members.begin(), r.members.end());
          r.first_sample = r.members.front().sample;
          r.last_sample = r.members.front().sample;
          for (const auto& m : r.members) {
            r.first_sample = std::min(r.first_sample, m.sample);
            r.last_sample = std::max(r.last_sample, m.sample);
            if (r.channels.empty() || r.channels.back() != m.channel) r.channels.push_back(m.channel);
          }
          out.push_back(std::move(r));
        });
  std::stable_sort(out.begin(), out.end(),
                   [](const ClusterResult& a, const ClusterResult& b) { return std::abs(a.mass) > std::abs(b.mass); });
  return out;
}

ClusterAnalysis cluster_permutation(std::span<const Eigen::MatrixXd> deltas, const Adjacency& adjacency,
                                    const ClusterOptions& options) {
  check_inputs(deltas, adjacency);
  if (options.n_permutations < 1) {
    throw InputError(fmt::format("n_permutations must be >= 1 (got {})", options.n_permutations));
  }
  const auto s = stack(deltas);
  const auto n = static_cast<double>(deltas.size());

  ClusterAnalysis out;
  out.df = static_cast<int>(deltas.size()) - 1;
  out.threshold = t_critical(options.cluster_alpha, out.df);
  out.n_permutations = options.n_permutations;
  out.t_values = one_sample_t(deltas);
  out.clusters = find_clusters(out.t_values, out.threshold, adjacency);

  std::vector<int> label;
  std::vector<Eigen::Index> stack_buf;
  Eigen::RowVectorXd signs(s.d.rows());
  Eigen::RowVectorXd t;
  out.null_distribution.resize(static_cast<std::size_t>(options.n_permutations));
  for (int k = 0; k < options.n_permutations; ++k) {
    Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(k)));
    for (Eigen::Index i = 0; i < signs.size(); ++i) signs(i) = (rng() & 1u) ? -1.0 : 1.0;
    t_from_sums(signs * s.d, s.sumsq, n, t);
    double max_mass = 0.0;
    flood(t.data(), s.channels, s.samples, out.threshold, adjacency, label, stack_buf,
          [&](const std::vector<Eigen::Index>&, double mass, int) { max_mass = std::max(max_mass, std::abs(mass)); });
    out.null_distribution[static_cast<std::size_t>(k)] = max_mass;
  }

  for (auto& c : out.clusters) {
    const double obs = std::abs(c.mass) * (1.0 - 1e-12);
    const auto hits = std::count_if(out.null_distribution.begin(), out.null_distribution.end(),
                                    [&](double v) { return v >= obs; });
    c.p_value = (1.0 + static_cast<double>(hits)) / (options.n_permutations + 1.0);
    c.significant = c.p_value < options.report_alpha;
  }
  return out;
}

}  // namespace wcst::erp
