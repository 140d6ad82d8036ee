#include "wcstlab/signal/reference.hpp"

#include "wcstlab/errors.hpp"

namespace wcst::signal {

eeg::Recording rereference_common_average(const eeg::Recording& rec) {
  const auto eeg_rows = rec.indices(eeg::ChannelRole::EEG);
  if (eeg_rows.size() < 2) throw InputError("common average reference needs at least 2 EEG channels");
  eeg::Matrix data = rec.data();
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(rec.n_samples());
  for (auto r : eeg_rows) mean += data.row(static_cast<Eigen::Index>(r));
  mean /= static_cast<double>(eeg_rows.size());
  for (auto r : eeg_rows) data.row(static_cast<Eigen::Index>(r)) -= mean;
  return rec.with_data(std::move(data));
}

}  // namespace wcst::signal
