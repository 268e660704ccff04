#include <cmath>
#include <sstream>

#include "airslice/rng.hpp"
#include "airslice/scenario.hpp"
#include "doctest.h"

using namespace airslice;
using doctest::Approx;

TEST_CASE("802.11a rate table") {
  const RateTable t = RateTable::ieee80211a();
  CHECK(t.rate(12.0) == 12.0);
  CHECK(t.rate(30.0) == 54.0);
  CHECK(t.rate(4.9) == 0.0);
  CHECK(t.rate(5.0) == 6.0);
  CHECK(t.rate(10.0) == 12.0);
  CHECK(t.rate(25.0) == 54.0);
}

TEST_CASE("SNR of a distance that maps to 12 Mbps") {
  const ChannelModel ch;
  // 12 dB = 10 + 10 log10(d^-3) -> d = 10^(-2/30)
  const double d = std::pow(10.0, -2.0 / 30.0);
  CHECK(snr_db(d, 1.0, ch) == Approx(12.0));
  CHECK(RateTable::ieee80211a().rate(snr_db(d, 1.0, ch)) == 12.0);
}

TEST_CASE("rate table from CSV") {
  std::istringstream in("lo_db,hi_db,mbps,label\n0,3,1,slow\n3,inf,2,fast\n");
  const RateTable t = RateTable::load_csv(in);
  CHECK(t.rate(-1) == 0.0);
  CHECK(t.rate(2.9) == 1.0);
  CHECK(t.rate(100) == 2.0);
  std::istringstream gap("lo_db,hi_db,mbps,label\n0,3,1,a\n4,inf,2,b\n");
  CHECK_THROWS(RateTable::load_csv(gap));
}

TEST_CASE("Jain index") {
  CHECK(jain_index({10, 10}) == Approx(1.0));
  CHECK(jain_index({10, 0}) == Approx(0.5));
  CHECK(jain_index({6, 3}) == Approx(0.9));
  CHECK_THROWS_AS(jain_index({0, 0}), std::domain_error);
}

TEST_CASE("placement statistics and labels") {
  TopologyConfig c;
  c.lambda_mean = 3.0;
  double total = 0;
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) total += static_cast<double>(generate_topology(c, derive_seed(99, static_cast<std::uint64_t>(k))).stas.size());
  // Empty draws are redrawn, so the mean sits just above lambda.
  const double expected = 4 * 3.0 / (1 - std::exp(-12.0));
  CHECK(total / draws / 4 == Approx(expected / 4).epsilon(0.1 / 3.0));
  c.rho = 1.0;
  for (int v : generate_topology(c, 5).isp) CHECK(v == 0);
}

TEST_CASE("topology and links are seed-determined") {
  TopologyConfig c;
  const Topology a = generate_topology(c, 17);
  const Topology b = generate_topology(c, 17);
  std::ostringstream sa, sb;
  write_topology_header(sa, a);
  write_topology_header(sb, b);
  CHECK(sa.str() == sb.str());
  const auto la = link_rates(a, ChannelModel{}, RateTable::ieee80211a(), 3);
  const auto lb = link_rates(b, ChannelModel{}, RateTable::ieee80211a(), 3);
  std::ostringstream ta, tb;
  write_links_csv(ta, la);
  write_links_csv(tb, lb);
  CHECK(ta.str() == tb.str());
}

TEST_CASE("Max-SNR choice") {
  Topology t;
  t.aps = {{0, 0}, {2, 0}};
  t.channel = {0, 1};
  t.stas = {{1, 0}, {0.3, 0}};
  t.isp = {0, 0};
  LinkTable l;
  l.rates = RateMatrix(2, 2);
  l.snr_db = {20, 20, 30, 10};
  l.distance = {1, 1, 0.3, 1.7};
  l.rates.at(0, 0) = 36;
  l.rates.at(0, 1) = 36;
  l.rates.at(1, 0) = 54;
  l.rates.at(1, 1) = 9;
  const auto choice = max_snr_association(l);
  CHECK(choice[0] == 0);
  CHECK(choice[1] == 0);

  ChannelModel strong;
  strong.snr_ref_db = 40;
  TopologyConfig c;
  c.lambda_mean = 4;
  const Topology topo = generate_topology(c, 8);
  const LinkTable links = link_rates(topo, strong, RateTable::ieee80211a(), 8);
  const auto pick = max_snr_association(links);
  for (std::size_t i = 0; i < pick.size(); ++i) {
    if (pick[i] < 0) continue;
    for (std::size_t a = 0; a < links.rates.n_ap(); ++a) {
      if (links.rates.at(i, a) > 0) CHECK(links.snr(i, static_cast<std::size_t>(pick[i])) >= links.snr(i, a));
    }
  }
  TopologyConfig single;
  single.n_aps = 1;
  const Topology one = generate_topology(single, 2);
  const auto l1 = link_rates(one, strong, RateTable::ieee80211a(), 2);
  for (std::size_t i = 0; i < one.stas.size(); ++i) {
    if (l1.rates.usable(i)) CHECK(max_snr_association(l1)[i] == 0);
  }
}
