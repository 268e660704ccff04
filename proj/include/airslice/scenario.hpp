#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "airslice/analytics.hpp"
#include "airslice/network.hpp"

namespace airslice {

struct Point {
  double x = 0;
  double y = 0;
};

enum class Placement { kHomogeneous, kNonHomogeneous };

struct TopologyConfig {
  Placement kind = Placement::kHomogeneous;
  double lambda_mean = 3.0;  // mean STAs per grid cell
  int n_aps = 4;
  int n_isps = 2;
  double rho = 0.5;          // probability a STA belongs to ISP 0
  double cell = 5.0;         // grid cell side in meters
};

void validate(const TopologyConfig& cfg);

struct Topology {
  std::vector<Point> aps;
  std::vector<int> channel;  // one per AP, pairwise distinct
  std::vector<Point> stas;
  std::vector<int> isp;      // per STA
  std::vector<int> cell_of;  // per STA
  std::vector<double> cell_lambda;  // intensity used for each cell
  double width = 0;
  double height = 0;
  int n_isps = 2;
  int regenerations = 0;     // empty draws that were redrawn
};

/// APs sit at the centers of a ceil(sqrt(n))-column grid of cells; STAs are
/// Poisson per cell and uniform inside it.
Topology generate_topology(const TopologyConfig& cfg, std::uint64_t seed);

struct ChannelModel {
  double alpha = 3.0;
  double gain_const = 1.0;
  double snr_ref_db = 10.0;  // P / sigma^2
  double min_distance = 0.1;
};

struct RateRow {
  double lo_db = 0;
  double hi_db = 0;  // +inf on the last row
  double mbps = 0;
  std::string label;
};

class RateTable {
 public:
  explicit RateTable(std::vector<RateRow> rows);
  static RateTable ieee80211a();
  /// Columns lo_db,hi_db,mbps,label with a header line; "inf" allowed for hi.
  static RateTable load_csv(std::istream& in);

  /// Rate for an SNR; 0 below the first row.
  double rate(double snr_db) const;
  const std::vector<RateRow>& rows() const { return rows_; }

 private:
  std::vector<RateRow> rows_;
};

struct LinkTable {
  RateMatrix rates;
  std::vector<double> distance;  // [sta * n_ap + ap]
  std::vector<double> snr_db;
  std::vector<std::size_t> unserved;  // STAs with no usable link
  double snr(std::size_t sta, std::size_t ap) const { return snr_db.at(sta * rates.n_ap() + ap); }
};

/// Block fading drawn once per link from the "fading" substream.
LinkTable link_rates(const Topology& topo, const ChannelModel& ch, const RateTable& table, std::uint64_t seed);

double snr_db(double distance, double fading_power, const ChannelModel& ch);

/// Index of the AP with the highest SNR among usable links, lowest index on
/// ties; -1 when the STA has no usable link.
std::vector<int> max_snr_association(const LinkTable& links);

/// Baseline: each BSS runs the default EDCA parameters and settles at the
/// symmetric fixed point. Returns x ([sta][ap]).
std::vector<std::vector<double>> max_snr_operating_point(const LinkTable& links, const std::vector<int>& choice,
                                                         const EdcaParams& params, const TimingConstants& timing);

/// (sum T)^2 / (K * sum T^2). Throws std::domain_error when all are zero.
double jain_index(const std::vector<double>& throughputs);

/// sta_id,ap_id,distance_m,snr_db,rate_mbps
void write_links_csv(std::ostream& os, const LinkTable& links);
/// key,value lines describing the topology.
void write_topology_header(std::ostream& os, const Topology& topo);

}  // namespace airslice
