#include <doctest.h>

#include <cmath>
#include <random>

#include "adaprod/regret.hpp"
#include "adaprod/types.hpp"

using namespace adaprod;

namespace {

AwakeMask mask_of(std::initializer_list<int> bits) {
  AwakeMask m(static_cast<int>(bits.size()));
  int i = 0;
  for (int b : bits) {
    if (!b) m.sleep(i);
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("instantaneous regret matches the definition") {
  AwakeMask awake(2);
  ProbabilityVector p({0.5, 0.5}, awake);
  LossVector loss({0.0, 1.0}, 1);
  auto r = instantaneous_regret(p, loss, awake);
  CHECK(r[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("a lone awake expert has zero regret against itself") {
  AwakeMask awake = mask_of({1, 0});
  ProbabilityVector p({1.0, 0.0}, awake);
  LossVector loss({0.37, 0.9}, 1);
  auto r = instantaneous_regret(p, loss, awake);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 0.0);
}

TEST_CASE("identical losses give zero regret") {
  AwakeMask awake(3);
  ProbabilityVector p({1.0 / 3, 1.0 / 3, 1.0 / 3}, awake);
  LossVector loss({0.42, 0.42, 0.42}, 1);
  for (double ri : instantaneous_regret(p, loss, awake)) CHECK(ri == 0.0);
}

TEST_CASE("regret dimension mismatch is structural") {
  AwakeMask awake(2);
  ProbabilityVector p({0.5, 0.5}, awake);
  LossVector loss({0.1, 0.2, 0.3}, 1);
  AwakeMask awake3(3);
  CHECK_THROWS_AS(instantaneous_regret(p, loss, awake3), StructuralError);
}

TEST_CASE("zero-sum and range hold on random rounds") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(gen() % 8);
    AwakeMask awake(n);
    for (int i = 0; i < n - 1; ++i)
      if (unit(gen) < 0.3) awake.sleep(i);
    std::vector<double> w(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      if (awake.awake(i)) w[static_cast<size_t>(i)] = 0.01 + unit(gen);
    ProbabilityVector p = ProbabilityVector::normalized(w, awake);
    std::vector<double> l(static_cast<size_t>(n));
    for (auto& v : l) v = unit(gen);
    LossVector loss(l, 1);
    auto r = instantaneous_regret(p, loss, awake);
    double zs = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(r[static_cast<size_t>(i)] >= -1.0);
      CHECK(r[static_cast<size_t>(i)] <= 1.0);
      zs += p[i] * r[static_cast<size_t>(i)];
    }
    CHECK(std::abs(zs) <= 1e-12);
  }
}

TEST_CASE("batch regret worked example") {
  AwakeMask awake(3);
  LossVector loss({0.2, 0.4, 0.9}, 1);
  std::vector<double> rho{1.0, 1.0, 0.0};
  auto r = batch_instantaneous_regret(rho, loss, 2, awake);
  CHECK(r[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(r[2] == doctest::Approx(-0.6).epsilon(1e-12));
}

TEST_CASE("batch regret of a constant loss under uniform rho is zero") {
  AwakeMask awake(4);
  LossVector loss({0.3, 0.3, 0.3, 0.3}, 1);
  std::vector<double> rho(4, 0.5);
  for (double ri : batch_instantaneous_regret(rho, loss, 2, awake))
    CHECK(ri == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("b = 1 batch regret reduces to the point definition") {
  AwakeMask awake(3);
  ProbabilityVector p({0.2, 0.5, 0.3}, awake);
  LossVector loss({0.9, 0.1, 0.4}, 1);
  std::vector<double> rho(p.values().begin(), p.values().end());
  auto a = batch_instantaneous_regret(rho, loss, 1, awake);
  auto b = instantaneous_regret(p, loss, awake);
  for (int i = 0; i < 3; ++i)
    CHECK(a[static_cast<size_t>(i)] == b[static_cast<size_t>(i)]);
}

TEST_CASE("batch regret rejects rho that does not sum to b") {
  AwakeMask awake(3);
  LossVector loss({0.2, 0.4, 0.9}, 1);
  std::vector<double> rho{1.0, 0.7, 0.0};
  CHECK_THROWS_AS(batch_instantaneous_regret(rho, loss, 2, awake),
                  ContractError);
}

TEST_CASE("ledger prefix sum worked example") {
  RegretLedger ledger(2);
  ledger.record({1, 0.5, {0, 1}, {0.5, -0.5}, {}, 0, 0.0});
  ledger.record({2, 0.5, {0, 1}, {-0.2, 0.2}, {}, 0, 0.0});
  // comparator: point 2 at round 1, point 1 at round 2 (zero-based 1, 0)
  std::vector<int> comparator{1, 0};
  CHECK(ledger.cumulative_against(comparator) ==
        doctest::Approx(-0.7).epsilon(1e-14));
}

TEST_CASE("asleep comparator slots contribute nothing") {
  RegretLedger ledger(2);
  ledger.record({1, 0.5, {0}, {0.25}, {}, 1, 0.0});
  std::vector<int> comparator{1};  // asleep at round 1
  CHECK(ledger.cumulative_against(comparator) == 0.0);
}

TEST_CASE("ledger cumulative columns are exact prefix sums") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int n = 5, T = 60;
  RegretLedger ledger(n);
  std::vector<std::vector<double>> recorded;
  std::vector<std::vector<int>> slots;
  for (int t = 1; t <= T; ++t) {
    LedgerRound row;
    row.round = t;
    row.mixture = 0.0;
    for (int i = 0; i < n; ++i) {
      row.awake.push_back(i);
      row.regret.push_back(unit(gen));
    }
    row.comparator = {static_cast<int>(gen() % n)};
    slots.push_back(row.comparator);
    recorded.push_back(row.regret);
    ledger.record(row);
  }
  std::vector<double> cum(n, 0.0);
  double dyn = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) cum[static_cast<size_t>(i)] += recorded[t][i];
    dyn += recorded[static_cast<size_t>(t)]
                   [static_cast<size_t>(slots[static_cast<size_t>(t)][0])];
  }
  for (int i = 0; i < n; ++i)
    CHECK(ledger.per_point_cumulative()[static_cast<size_t>(i)] ==
          doctest::Approx(cum[static_cast<size_t>(i)]).epsilon(1e-15));
  CHECK(ledger.dynamic_cumulative() == doctest::Approx(dyn).epsilon(1e-15));
  CHECK(ledger.best_fixed() ==
        doctest::Approx(*std::max_element(cum.begin(), cum.end()))
            .epsilon(1e-15));
  CHECK(ledger.cumulative_against_sets(slots) ==
        doctest::Approx(dyn).epsilon(1e-15));
}

TEST_CASE("probability vector invariants") {
  AwakeMask awake = mask_of({1, 0, 1});
  CHECK_THROWS_AS(ProbabilityVector({0.5, 0.1, 0.4}, awake), ContractError);
  CHECK_THROWS_AS(ProbabilityVector({0.7, 0.0, 0.4}, awake), ContractError);
  ProbabilityVector ok({0.6, 0.0, 0.4}, awake);
  CHECK(ok.max_entry() == 0.6);

  auto p = ProbabilityVector::normalized({3.0, 5.0, 1.0}, awake);
  CHECK(p[1] == 0.0);  // asleep mass dropped before normalizing
  CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-14));
  double sum = p[0] + p[1] + p[2];
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("loss vector validation") {
  CHECK_THROWS_AS(LossVector({0.5, 1.2}, 1), ContractError);
  CHECK_THROWS_AS(LossVector({-0.1}, 1), ContractError);
  CHECK_THROWS_AS(LossVector({0.5}, 0), StructuralError);
}

TEST_CASE("awake mask transitions are one way") {
  AwakeMask m(3);
  m.sleep(1);
  CHECK(m.awake_count() == 2);
  CHECK_THROWS_AS(m.sleep(1), ContractError);
  CHECK(m.awake_indices() == std::vector<int>{0, 2});
}
