#include <cmath>
#include <vector>

#include "derivd/simulator.hpp"
#include "doctest.h"

using namespace derivd;
using doctest::Approx;

namespace {

const KnowledgeBase& medium_kb() {
  static const KnowledgeBase kb = generate_kb(2000, 6000, 5.0, 2, 42);
  return kb;
}

Scenario small_scenario(std::uint64_t seed = 42, std::size_t queries = 300, std::size_t stream = 20000) {
  WorkloadSpec w;
  w.query_count = queries;
  w.stream_length = stream;
  w.seed = seed;
  return make_scenario(medium_kb(), w, InfoModel::for_kb(medium_kb()));
}

}  // namespace

TEST_CASE("scenario construction") {
  const auto sc = small_scenario();
  CHECK(sc.query_count() == 300);
  CHECK(sc.stream.size() == 20000);
  for (std::size_t i = 0; i < sc.profiles.size(); ++i) CHECK(sc.profiles[i].query.id == i);
  const auto again = small_scenario();
  CHECK(again.stream == sc.stream);
  CHECK(sc.expected_depth() > 1.0);
  CHECK(sc.expected_content_bits() > 0.0);
}

TEST_CASE("pure compute and full storage endpoints") {
  const auto sc = small_scenario();
  SimConfig cfg;
  cfg.policy = PolicyKind::lru;
  cfg.beta = 0.0;
  const auto none = run_stream(sc, cfg);
  CHECK(none.hits == 0);
  CHECK(none.hit_rate == 0.0);
  CHECK(none.mean_latency == Approx(static_cast<double>(none.total_compute_steps) / static_cast<double>(none.accesses)));
  CHECK(none.storage_bits == 0.0);
  CHECK_FALSE(none.triality);
  CHECK(none.amortized_cost == Approx(none.mean_latency * std::log(2.0)));

  for (PolicyKind kind : {PolicyKind::lru, PolicyKind::lfu, PolicyKind::freqdepth, PolicyKind::truemi}) {
    cfg.policy = kind;
    cfg.beta = 1.0;
    cfg.warmup_fraction = kind == PolicyKind::truemi ? 0.0 : 0.5;
    const auto all = run_stream(sc, cfg);
    CAPTURE(to_string(kind));
    if (kind == PolicyKind::truemi) {
      CHECK(all.hit_rate == 1.0);
      CHECK(all.mean_latency == 1.0);
    }
    CHECK(all.capacity == sc.query_count());
    CHECK(all.evictions == 0);
  }

  // Static full storage: every access hits from the first one.
  std::vector<QueryId> every(sc.query_count());
  for (QueryId i = 0; i < every.size(); ++i) every[i] = i;
  cfg.warmup_fraction = 0.0;
  const auto fixed = run_fixed_plan(sc, every, cfg);
  CHECK(fixed.hit_rate == 1.0);
  CHECK(fixed.mean_latency == 1.0);
  CHECK(fixed.total_compute_steps == 0);
}

TEST_CASE("accounting identities and latency bounds") {
  const auto sc = small_scenario(7);
  double mean_depth_stream = 0.0;
  const auto warm = static_cast<std::size_t>(0.1 * static_cast<double>(sc.stream.size()));
  for (std::size_t t = warm; t < sc.stream.size(); ++t)
    mean_depth_stream += static_cast<double>(sc.profiles[sc.stream[t]].depth);
  mean_depth_stream /= static_cast<double>(sc.stream.size() - warm);

  for (PolicyKind kind : {PolicyKind::lru, PolicyKind::lfu, PolicyKind::freqdepth, PolicyKind::truemi,
                          PolicyKind::threshold}) {
    for (double beta : {0.0, 0.02, 0.1, 0.5}) {
      SimConfig cfg;
      cfg.policy = kind;
      cfg.params.tau_scale = 1e-6;
      cfg.beta = beta;
      const auto m = run_stream(sc, cfg);
      CAPTURE(to_string(kind));
      CAPTURE(beta);
      CHECK(m.hits + m.misses == m.accesses);
      CHECK(m.accesses == sc.stream.size() - warm);
      CHECK(m.hit_rate == Approx(static_cast<double>(m.hits) / static_cast<double>(m.accesses)));
      CHECK(m.mean_latency >= 1.0);
      CHECK(m.mean_latency <= mean_depth_stream + 1e-9);
      CHECK(m.duration == Approx(static_cast<double>(m.hits) + static_cast<double>(m.total_compute_steps)));
      const ThermoParams p;
      CHECK(m.energy == Approx(landauer_compute_energy(static_cast<double>(m.total_compute_steps), p) +
                               storage_maintenance_energy(m.storage_bits, m.duration, p)));
      if (beta > 0.0 && kind != PolicyKind::threshold) {
        REQUIRE(m.triality);
        CHECK(m.triality->satisfied);
      }
      CHECK(run_stream(sc, cfg) == m);
    }
  }
}

TEST_CASE("capacity resolution clamps to the query universe") {
  const auto sc = small_scenario();
  SimConfig cfg;
  cfg.capacity = 5000;
  bool clamped = false;
  CHECK(resolve_capacity(sc, cfg, &clamped) == sc.query_count());
  CHECK(clamped);
  CHECK(run_stream(sc, cfg).capacity_clamped);
  cfg.capacity.reset();
  cfg.beta = 0.05;
  CHECK(resolve_capacity(sc, cfg, &clamped) == 15);
  CHECK_FALSE(clamped);
  cfg.beta = 1.5;
  CHECK_THROWS_AS(run_stream(sc, cfg), std::invalid_argument);
}

TEST_CASE("sweep: two points give the endpoint gradient") {
  const auto sc = small_scenario();
  SimConfig cfg;
  cfg.policy = PolicyKind::truemi;
  cfg.warmup_fraction = 0.0;
  const std::vector<double> betas{0.0, 1.0};
  const auto sweep = sweep_storage(sc, cfg, betas, 1);
  REQUIRE(sweep.gradient.size() == 1);
  CHECK(sweep.gradient[0] == Approx(1.0 - sweep.points[0].metrics.mean_latency));
  CHECK_FALSE(sweep.transition_beta);
  const std::vector<double> unsorted{0.5, 0.2};
  CHECK_THROWS_AS(sweep_storage(sc, cfg, unsorted, 1), std::invalid_argument);
}

TEST_CASE("sweep with oracle frequencies is monotone and identical across worker counts") {
  const auto sc = small_scenario(42, 1000, 30000);
  SimConfig cfg;
  cfg.policy = PolicyKind::freqdepth;
  cfg.params.oracle_frequency = true;
  std::vector<double> betas;
  for (int i = 0; i <= 20; ++i) betas.push_back(i * 0.05);
  const auto one = sweep_storage(sc, cfg, betas, 1);
  const auto many = sweep_storage(sc, cfg, betas, 4);
  REQUIRE(one.points.size() == 21);
  CHECK(one.gradient.size() == 20);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    CHECK(one.points[i].metrics == many.points[i].metrics);
    if (i > 0) CHECK(one.points[i].metrics.mean_latency <= one.points[i - 1].metrics.mean_latency + 1e-12);
  }
  CHECK(one.transition_beta == many.transition_beta);
  REQUIRE(one.transition_beta);
  CHECK(*one.transition_beta >= 0.05);
  CHECK(*one.transition_beta <= 0.2);
}

TEST_CASE("transition detection on constructed curves") {
  std::vector<double> betas;
  for (int i = 0; i <= 20; ++i) betas.push_back(i * 0.05);

  std::vector<double> linear;
  for (double b : betas) linear.push_back(5.0 - 3.0 * b);
  CHECK_FALSE(detect_transition(betas, linear));

  std::vector<double> knee;
  for (double b : betas) knee.push_back(b <= 0.1 ? 5.0 - 35.0 * b : 1.5 - 0.5 * (b - 0.1));
  const auto t = detect_transition(betas, knee);
  REQUIRE(t);
  CHECK(std::abs(*t - 0.10) <= 0.05 + 1e-12);

  const std::vector<double> flat(21, 2.0);
  CHECK_FALSE(detect_transition(betas, flat));
  const std::vector<double> four_b{0.0, 0.1, 0.2, 0.3}, four_l{4.0, 2.0, 1.5, 1.4};
  CHECK_FALSE(detect_transition(four_b, four_l));
  CHECK_THROWS_AS(detect_transition(four_b, flat), std::invalid_argument);
}
