#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Core>

#include "wcstlab/erp/epoch.hpp"

namespace wcst::erp {

struct ConditionAverage {
  Condition condition = Condition::Conf;
  Eigen::MatrixXd mean;  // channels x samples
  int n_trials = 0;
};

// The larger condition is subsampled without replacement (seeded) down to
// the smaller count before averaging.
std::pair<ConditionAverage, ConditionAverage> balance_and_average(const EpochSet& epochs, Condition a, Condition b,
                                                                  std::uint64_t seed);

// a - b
Eigen::MatrixXd difference_wave(const ConditionAverage& a, const ConditionAverage& b);

}  // namespace wcst::erp
