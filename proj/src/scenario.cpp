#include "airslice/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "airslice/rng.hpp"

namespace airslice {

void validate(const TopologyConfig& c) {
  if (!(c.lambda_mean > 0.0) || c.lambda_mean > 500.0) throw std::invalid_argument("lambda_mean must lie in (0, 500]");
  if (c.n_aps < 1) throw std::invalid_argument("need at least one AP");
  if (c.n_isps < 1) throw std::invalid_argument("need at least one ISP");
  if (!(c.rho >= 0.0 && c.rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
  if (!(c.cell > 0.0)) throw std::invalid_argument("cell size must be positive");
}

Topology generate_topology(const TopologyConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Topology t;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.n_aps))));
  const int rows = (cfg.n_aps + cols - 1) / cols;
  t.width = cols * cfg.cell;
  t.height = rows * cfg.cell;
  t.n_isps = cfg.n_isps;
  for (int a = 0; a < cfg.n_aps; ++a) {
    t.aps.push_back({(a % cols + 0.5) * cfg.cell, (a / cols + 0.5) * cfg.cell});
    t.channel.push_back(a);
  }
  const std::uint64_t place_seed = derive_seed(seed, "placement");
  const std::uint64_t isp_seed = derive_seed(seed, "isp");
  for (std::uint64_t attempt = 0;; ++attempt) {
    Philox rng(place_seed, attempt);
    t.stas.clear();
    t.cell_of.clear();
    t.cell_lambda.clear();
    for (int a = 0; a < cfg.n_aps; ++a) {
      const double lam = cfg.kind == Placement::kHomogeneous ? cfg.lambda_mean : cfg.lambda_mean * rng.uniform();
      t.cell_lambda.push_back(lam);
      const std::int64_t n = rng.poisson(lam);
      const double x0 = (a % cols) * cfg.cell;
      const double y0 = (a / cols) * cfg.cell;
      for (std::int64_t s = 0; s < n; ++s) {
        const double px = x0 + cfg.cell * rng.uniform();
        const double py = y0 + cfg.cell * rng.uniform();
        t.stas.push_back({px, py});
        t.cell_of.push_back(a);
      }
    }
    if (!t.stas.empty()) {
      Philox lab(isp_seed, attempt);
      t.isp.clear();
      for (std::size_t s = 0; s < t.stas.size(); ++s) {
        if (cfg.n_isps == 2) {
          t.isp.push_back(lab.bernoulli(cfg.rho) ? 0 : 1);
        } else {
          t.isp.push_back(static_cast<int>(lab.below(static_cast<std::uint64_t>(cfg.n_isps))));
        }
      }
      break;
    }
    ++t.regenerations;
  }
  return t;
}

RateTable::RateTable(std::vector<RateRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("rate table is empty");
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const auto& r = rows_[k];
    if (!(r.lo_db < r.hi_db)) throw std::invalid_argument("rate table row has an empty interval");
    if (!(r.mbps > 0.0)) throw std::invalid_argument("rate table rates must be positive");
    if (k > 0) {
      if (r.lo_db != rows_[k - 1].hi_db) throw std::invalid_argument("rate table intervals must be contiguous");
      if (!(r.mbps > rows_[k - 1].mbps)) throw std::invalid_argument("rate table rates must increase");
    }
  }
}

RateTable RateTable::ieee80211a() {
  const double inf = std::numeric_limits<double>::infinity();
  return RateTable({{5, 8, 6, "BPSK 1/2"},
                    {8, 10, 9, "BPSK 3/4"},
                    {10, 13, 12, "QPSK 1/2"},
                    {13, 16, 18, "QPSK 3/4"},
                    {16, 19, 24, "16QAM 1/2"},
                    {19, 22, 36, "16QAM 3/4"},
                    {22, 25, 48, "64QAM 2/3"},
                    {25, inf, 54, "64QAM 3/4"}});
}

RateTable RateTable::load_csv(std::istream& in) {
  std::string line;
  std::vector<RateRow> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::stringstream ss(line);
    std::string lo, hi, rate, label;
    if (!std::getline(ss, lo, ',') || !std::getline(ss, hi, ',') || !std::getline(ss, rate, ',')) {
      throw std::invalid_argument("malformed rate table line: " + line);
    }
    std::getline(ss, label);
    RateRow r;
    try {
      r.lo_db = std::stod(lo);
      r.hi_db = hi == "inf" ? std::numeric_limits<double>::infinity() : std::stod(hi);
      r.mbps = std::stod(rate);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed rate table line: " + line);
    }
    r.label = label;
    rows.push_back(r);
  }
  return RateTable(std::move(rows));
}

double RateTable::rate(double snr) const {
  for (const auto& r : rows_) {
    if (snr >= r.lo_db && snr < r.hi_db) return r.mbps;
  }
  return 0.0;
}

double snr_db(double distance, double fading_power, const ChannelModel& ch) {
  const double d = std::max(distance, ch.min_distance);
  const double g = fading_power * ch.gain_const * ch.gain_const * std::pow(d, -ch.alpha);
  return ch.snr_ref_db + 10.0 * std::log10(g);
}

LinkTable link_rates(const Topology& topo, const ChannelModel& ch, const RateTable& table, std::uint64_t seed) {
  if (!(ch.alpha >= 2.0)) throw std::invalid_argument("path-loss exponent must be >= 2");
  const std::size_t ns = topo.stas.size();
  const std::size_t na = topo.aps.size();
  LinkTable out;
  out.rates = RateMatrix(ns, na);
  out.distance.resize(ns * na);
  out.snr_db.resize(ns * na);
  const std::uint64_t fade_seed = derive_seed(seed, "fading");
  for (std::size_t i = 0; i < ns; ++i) {
    Philox rng(fade_seed, i);
    for (std::size_t a = 0; a < na; ++a) {
      const double d = std::hypot(topo.stas[i].x - topo.aps[a].x, topo.stas[i].y - topo.aps[a].y);
      const double s = snr_db(d, rng.exponential(), ch);
      out.distance[i * na + a] = d;
      out.snr_db[i * na + a] = s;
      out.rates.at(i, a) = table.rate(s);
    }
    if (!out.rates.usable(i)) out.unserved.push_back(i);
  }
  return out;
}

std::vector<int> max_snr_association(const LinkTable& links) {
  const std::size_t ns = links.rates.n_sta();
  const std::size_t na = links.rates.n_ap();
  std::vector<int> choice(ns, -1);
  for (std::size_t i = 0; i < ns; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < na; ++a) {
      if (!(links.rates.at(i, a) > 0.0)) continue;
      if (links.snr(i, a) > best) {
        best = links.snr(i, a);
        choice[i] = static_cast<int>(a);
      }
    }
  }
  return choice;
}

std::vector<std::vector<double>> max_snr_operating_point(const LinkTable& links, const std::vector<int>& choice,
                                                         const EdcaParams& params, const TimingConstants& timing) {
  const std::size_t ns = links.rates.n_sta();
  const std::size_t na = links.rates.n_ap();
  std::vector<std::vector<double>> x(ns, std::vector<double>(na, 0.0));
  for (std::size_t a = 0; a < na; ++a) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ns; ++i) {
      if (choice[i] == static_cast<int>(a)) members.push_back(i);
    }
    if (members.empty()) continue;
    const std::vector<EdcaParams> p(members.size(), params);
    const BssState st = solve_bss_fixed_point(p, timing);
    for (std::size_t k = 0; k < members.size(); ++k) x[members[k]][a] = st.x[k];
  }
  return x;
}

double jain_index(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("jain index needs at least one value");
  double s = 0.0, s2 = 0.0;
  for (double t : v) {
    if (!(t >= 0.0)) throw std::domain_error("throughputs must be >= 0");
    s += t;
    s2 += t * t;
  }
  if (s2 == 0.0) throw std::domain_error("jain index undefined for all-zero throughputs");
  return s * s / (static_cast<double>(v.size()) * s2);
}

void write_links_csv(std::ostream& os, const LinkTable& links) {
  os << "sta_id,ap_id,distance_m,snr_db,rate_mbps\n";
  const std::size_t na = links.rates.n_ap();
  for (std::size_t i = 0; i < links.rates.n_sta(); ++i) {
    for (std::size_t a = 0; a < na; ++a) {
      os << fmt::format("{},{},{:.6f},{:.6f},{:g}\n", i, a, links.distance[i * na + a], links.snr(i, a),
                        links.rates.at(i, a));
    }
  }
}

void write_topology_header(std::ostream& os, const Topology& t) {
  os << "key,value\n";
  os << fmt::format("width_m,{:g}\nheight_m,{:g}\nn_aps,{}\nn_stas,{}\nn_isps,{}\nregenerations,{}\n", t.width,
                    t.height, t.aps.size(), t.stas.size(), t.n_isps, t.regenerations);
  for (std::size_t a = 0; a < t.aps.size(); ++a) {
    os << fmt::format("ap_{},{:.3f} {:.3f} ch{}\n", a, t.aps[a].x, t.aps[a].y, t.channel[a]);
  }
  for (std::size_t i = 0; i < t.stas.size(); ++i) {
    os << fmt::format("sta_{},{:.6f} {:.6f} isp{}\n", i, t.stas[i].x, t.stas[i].y, t.isp[i]);
  }
}

}  // namespace airslice
