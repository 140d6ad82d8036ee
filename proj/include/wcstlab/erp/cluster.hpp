#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wcstlab/erp/adjacency.hpp"
#include "wcstlab/erp/epoch.hpp"

namespace wcst::erp {

struct ClusterOptions {
  int n_permutations = 1000;
  double cluster_alpha = 0.05;  // two-tailed cluster-forming threshold
  double report_alpha = 0.1;
  std::uint64_t seed = 0;
};

enum class Polarity { Positive, Negative };

std::string_view to_string(Polarity p);

struct Cell {
  int channel = 0;
  int sample = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct ClusterResult {
  std::vector<Cell> members;  // sorted
  Polarity polarity = Polarity::Positive;
  double mass = 0.0;  // sum of t over members
  double p_value = 1.0;
  bool significant = false;
  int first_sample = 0;
  int last_sample = 0;
  std::vector<int> channels;  // sorted, unique
};

struct ClusterAnalysis {
  Eigen::MatrixXd t_values;  // channels x samples
  double threshold = 0.0;
  int df = 0;
  int n_permutations = 0;
  std::vector<double> null_distribution;  // max |mass| per permutation
  std::vector<ClusterResult> clusters;    // by decreasing |mass|
};

// One-sample t against zero across participants at every cell. Cells with
// zero variance get t = 0.
Eigen::MatrixXd one_sample_t(std::span<const Eigen::MatrixXd> deltas);

// Connected supra-threshold sets (t > threshold or t < -threshold) under
// spatial adjacency x neighbouring samples, each polarity separately.
// p-values are left at 1.
std::vector<ClusterResult> find_clusters(const Eigen::MatrixXd& t, double threshold, const Adjacency& adjacency);

// Two-tailed critical t at `alpha` with `df` degrees of freedom.
double t_critical(double alpha, int df);

// Sign-flip cluster-mass permutation test over participant difference waves.
ClusterAnalysis cluster_permutation(std::span<const Eigen::MatrixXd> deltas, const Adjacency& adjacency,
                                    const ClusterOptions& options = {});

}  // namespace wcst::erp
