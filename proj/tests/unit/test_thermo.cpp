#include <cmath>
#include <vector>

#include "derivd/metrics.hpp"
#include "derivd/thermo.hpp"
#include "doctest.h"

using namespace derivd;
using doctest::Approx;

namespace {
const ThermoParams room{};
const double unit_j = 1.38e-23 * 300.0 * std::log(2.0);
}  // namespace

TEST_CASE("landauer compute energy") {
  CHECK(room.landauer_unit() == Approx(unit_j).epsilon(1e-15));
  CHECK(landauer_compute_energy(std::uint64_t{0}, room) == 0.0);
  CHECK(landauer_compute_energy(std::uint64_t{1}, room) == Approx(2.87e-21).epsilon(1e-3));
  CHECK(landauer_compute_energy(std::uint64_t{1000000}, room) == Approx(2.87e-15).epsilon(1e-3));
  for (std::uint64_t d : {2ull, 17ull, 123456ull, 1ull << 40})
    CHECK(landauer_compute_energy(d, room) ==
          Approx(static_cast<double>(d) * landauer_compute_energy(std::uint64_t{1}, room)).epsilon(1e-12));
  CHECK_THROWS_AS(landauer_compute_energy(-1.0, room), std::invalid_argument);
}

TEST_CASE("storage maintenance energy") {
  CHECK(storage_maintenance_energy(1e6, 0.0, room) == 0.0);
  CHECK(storage_maintenance_energy(1.0, room.t_refresh, room) == Approx(unit_j));
  CHECK(storage_maintenance_energy(1e6, 10.0 * room.t_refresh, room) == Approx(2.87e-14).epsilon(1e-3));
  ThermoParams broken = room;
  broken.t_refresh = 0.0;
  CHECK_THROWS_AS(storage_maintenance_energy(1.0, 1.0, broken), std::invalid_argument);
  ThermoParams frozen = room;
  frozen.temperature = 0.0;
  CHECK_THROWS_AS(frozen.validate(), std::invalid_argument);
}

TEST_CASE("capacity bounds") {
  const auto none = capacity_bounds(1024.0, 0.0, room);
  CHECK(none.min_carrier_bits == Approx(10.0));
  CHECK(none.max_mutual_info_bits == 0.0);

  const auto four = capacity_bounds(1024.0, 4.0 * unit_j, room);
  CHECK(four.min_carrier_bits == Approx(6.0));
  CHECK(four.max_mutual_info_bits == Approx(4.0));

  // Uniform compression onto |C| states spends exactly the bound.
  for (double o : {16.0, 1024.0, 1e9})
    for (double c : {1.0, 2.0, 8.0}) {
      const double e = uniform_compression_energy(o, c, room);
      CHECK(capacity_bounds(o, e, room).min_carrier_bits == Approx(std::log2(c)).epsilon(1e-12).scale(1.0));
    }
  CHECK(capacity_bounds(4.0, 100.0 * unit_j, room).min_carrier_bits == 0.0);
}

TEST_CASE("amortized access cost") {
  CHECK(amortized_access_cost(0.0, 0.3, 7.5) == 7.5);
  CHECK(amortized_access_cost(42.0, 1.0, 0.0) == 42.0);
  CHECK(amortized_access_cost(100.0, 0.5, 10.0) == Approx(210.0));
  CHECK(amortized_access_cost_by_count(100.0, 1000.0, 10.0) == Approx(10.1));
  CHECK_THROWS_AS(amortized_access_cost(1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(amortized_access_cost_by_count(1.0, -2.0, 1.0), std::invalid_argument);
}

TEST_CASE("multi-query costs") {
  const std::vector<double> p{0.5, 0.3, 0.2}, h{10.0, 20.0, 30.0};
  const auto m = multi_query_costs(100.0, 1000, p, h);
  CHECK(std::abs(m.expected_correct - 17.1) <= 1e-9);
  CHECK(std::abs(m.naive_invalid - 317.0) <= 1e-9);
  CHECK(m.ratio == Approx(317.0 / 17.1));
  CHECK(m.ratio == Approx(18.5).epsilon(0.01));

  const auto limit = multi_query_costs(100.0, 1ull << 62, p, h);
  CHECK(limit.expected_correct == Approx(17.0).epsilon(1e-12));

  const auto free = multi_query_costs(0.0, 10, p, h);
  CHECK(free.expected_correct == Approx(17.0));
  CHECK(free.naive_invalid == Approx(17.0));

  for (double s : {0.0, 1.0, 50.0, 1e6})
    for (std::uint64_t n : {1ull, 7ull, 1000ull}) {
      const auto c = multi_query_costs(s, n, p, h);
      CHECK(c.expected_correct <= c.naive_invalid + 1e-12);
    }
  CHECK_THROWS_AS(multi_query_costs(1.0, 0, p, h), std::invalid_argument);
}

TEST_CASE("critical frequency") {
  CHECK(critical_frequency(1e9, 1.0) == Approx(1.048).epsilon(1e-3));
  CHECK(critical_frequency(std::exp(10.0), 1.0) == Approx(1.1));
  double previous = critical_frequency(10.0, 1.0);
  for (double m : {1e3, 1e6, 1e9, 1e12, 1e100}) {
    const double f = critical_frequency(m, 1.0);
    CHECK(f > 1.0);
    CHECK(f < previous);
    previous = f;
  }
  CHECK(critical_frequency(1e12, 1.0) - 1.0 < 0.037);
  CHECK_THROWS_AS(critical_frequency(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("critical storage") {
  const double floor = 1e6 * unit_j;
  CHECK(critical_storage(5e8, 2.0 * floor, 1e6, room) == Approx(5e8));
  CHECK(critical_storage(1e12, 8.0 * floor, 1e6, room) == Approx(1e12 / 3.0));
  CHECK(critical_storage(1e12, 4.0 * floor, 1e6, room) > critical_storage(1e12, 8.0 * floor, 1e6, room));
  const double worked = critical_storage(1e12, 3.6e12, 1e6, room);
  CHECK(worked == Approx(1e12 / std::log2(3.6e12 / floor)));
  CHECK(worked == Approx(1.11e10).epsilon(0.005));
  CHECK_THROWS_AS(critical_storage(1e12, floor, 1e6, room), std::domain_error);
  CHECK_THROWS_AS(critical_storage(1e12, 0.5 * floor, 1e6, room), std::domain_error);
}

TEST_CASE("triality check") {
  const auto t = triality_check(1.0, 1.0, 1.0, 1e6, room);
  CHECK(t.bound == Approx(2.87e-15).epsilon(5e-3));
  CHECK(t.satisfied);
  CHECK(t.margin() == Approx(1.0 - t.bound));

  const auto a = triality_check(3e-12, 40.0, 500.0, 1e3, room);
  const auto b = triality_check(3e-11, 4.0, 500.0, 1e3, room);
  CHECK(a.product == Approx(b.product));
  CHECK(a.satisfied == b.satisfied);
  CHECK_FALSE(triality_check(1e-30, 1.0, 1.0, 1e6, room).satisfied);
  CHECK_THROWS_AS(triality_check(1.0, 1.0, 0.0, 1.0, room), std::invalid_argument);
}

TEST_CASE("entropy production, critical alpha and weighted cost") {
  CHECK(entropy_production_min(0.0, room) == 0.0);
  CHECK(entropy_production_min(1.0, room) == Approx(1.0 / 300.0));
  CHECK(entropy_production_min(2.0, room) == Approx(2.0 * entropy_production_min(1.0, room)));

  CHECK(phase_alpha_critical(std::log(2.0), 1.0) == Approx(1.0));
  CHECK(phase_alpha_critical(1e6, 5.0) == Approx(2.885e5).epsilon(1e-3));
  CHECK(phase_regime(0.5, 1.0) == GradientRegime::exponential);
  CHECK(phase_regime(1.5, 1.0) == GradientRegime::inverse_capacity);
  CHECK_THROWS_AS(phase_alpha_critical(1.0, 0.0), std::invalid_argument);

  CHECK(weighted_strategy_cost(2.0, 3.0, 4.0, CostWeights{0.0, 0.0, 1.0}) == 4.0);
  CHECK(weighted_strategy_cost(2.0, 3.0, 4.0, CostWeights{1.0, 1.0, 1.0}) == 9.0);
  const CostWeights zero{0.0, 0.0, 0.0};
  const CostWeights negative{-1.0, 0.0, 1.0};
  CHECK_THROWS_AS(zero.validate(), std::invalid_argument);
  CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
}

TEST_CASE("cost breakdown itemizes the amortized cost") {
  const auto b = cost_breakdown(1000.0, 500.0, 100.0, 800.0, room);
  CHECK(b.storage_term == Approx(1000.0 * std::log(2.0) / 100.0));
  CHECK(b.compute_term == Approx(500.0 * std::log(2.0) / 100.0));
  CHECK(b.amortized == b.storage_term + b.compute_term);
  CHECK(b.energy == Approx(landauer_compute_energy(500.0, room) + storage_maintenance_energy(1000.0, 800.0, room)));
  CHECK(weighted_strategy_cost(b.energy, b.time, b.storage_bits, CostWeights{1.0, 1.0, 1.0}) ==
        Approx(b.energy + 800.0 + 1000.0));
  CHECK_THROWS_AS(cost_breakdown(1.0, 1.0, 0.0, 1.0, room), std::invalid_argument);
}

TEST_CASE("duality lower bound") {
  // f = 1, cost = H: the margin is H / (c ln m) + c log2 m.
  const double h = 500.0, m = 1000.0;
  const double bound = duality_lower_bound(h, 1.0, m, 1.0);
  CHECK(bound == Approx(h / std::log(m) - std::log2(m)));
  CHECK(amortized_access_cost(h, 1.0, 0.0) - bound == Approx(h - h / std::log(m) + std::log2(m)));
  CHECK(duality_lower_bound(h, 0.01, m, 1.0) < 0.0);
  CHECK_THROWS_AS(duality_lower_bound(h, 0.0, m, 1.0), std::invalid_argument);
}
