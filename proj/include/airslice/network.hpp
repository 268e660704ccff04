#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace airslice {

/// Per-(STA, AP) PHY rates in Mbps; 0 marks an unusable link.
class RateMatrix {
 public:
  RateMatrix() = default;
  RateMatrix(std::size_t n_sta, std::size_t n_ap) : n_sta_(n_sta), n_ap_(n_ap), mbps_(n_sta * n_ap, 0.0) {}

  std::size_t n_sta() const { return n_sta_; }
  std::size_t n_ap() const { return n_ap_; }
  double& at(std::size_t sta, std::size_t ap) { return mbps_.at(sta * n_ap_ + ap); }
  double at(std::size_t sta, std::size_t ap) const { return mbps_.at(sta * n_ap_ + ap); }
  bool usable(std::size_t sta) const {
    for (std::size_t a = 0; a < n_ap_; ++a) {
      if (at(sta, a) > 0.0) return true;
    }
    return false;
  }

 private:
  std::size_t n_sta_ = 0;
  std::size_t n_ap_ = 0;
  std::vector<double> mbps_;
};

/// One virtual operator: its STAs and the aggregate airtime it is owed.
struct IspSpec {
  int id = 0;
  std::vector<std::size_t> members;
  double eta = 0;
};

/// eta_k = n_aps / n_isps for every ISP, times `scale`.
inline std::vector<IspSpec> default_isps(const std::vector<int>& isp_of_sta, int n_isps, std::size_t n_aps,
                                         double scale = 1.0) {
  if (n_isps < 1) throw std::invalid_argument("need at least one ISP");
  std::vector<IspSpec> out(static_cast<std::size_t>(n_isps));
  for (int k = 0; k < n_isps; ++k) {
    out[static_cast<std::size_t>(k)].id = k;
    out[static_cast<std::size_t>(k)].eta = scale * static_cast<double>(n_aps) / n_isps;
  }
  for (std::size_t i = 0; i < isp_of_sta.size(); ++i) {
    const int k = isp_of_sta[i];
    if (k < 0 || k >= n_isps) throw std::out_of_range("ISP label out of range");
    out[static_cast<std::size_t>(k)].members.push_back(i);
  }
  return out;
}

}  // namespace airslice
