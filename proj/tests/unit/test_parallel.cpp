#include <bregman/experiments.hpp>
#include <bregman/lb.hpp>
#include <bregman/parallel.hpp>

#include "../support.hpp"

#include <doctest.h>

#include <random>

using namespace bregman;
namespace ts = testing_support;

namespace {

double worst_gap(const LbTrace& a, const LbTrace& b) {
  REQUIRE(a.records.size() == b.records.size());
  double w = 0.0;
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    REQUIRE(a.records[k].k == b.records[k].k);
    w = std::max(w, (a.records[k].beta - b.records[k].beta).cwiseAbs().maxCoeff());
  }
  return w;
}

}  // namespace

TEST_CASE("shard plans") {
  const ShardPlan p = make_shard_plan(10, 3);
  REQUIRE(p.L() == 3);
  CHECK(p.ranges[0] == std::pair<Index, Index>{0, 4});
  CHECK(p.ranges[1] == std::pair<Index, Index>{4, 7});
  CHECK(p.ranges[2] == std::pair<Index, Index>{7, 10});
  p.validate(10);
  CHECK_THROWS_AS(p.validate(11), InvalidArgument);
  CHECK_THROWS_AS(make_shard_plan(3, 4), InvalidArgument);
  CHECK_THROWS_AS(make_shard_plan(3, 0), InvalidArgument);
  ShardPlan gap;
  gap.ranges = {{0, 2}, {3, 5}};
  CHECK_THROWS_AS(gap.validate(5), InvalidArgument);
  ShardPlan empty;
  CHECK_THROWS_AS(empty.validate(5), InvalidArgument);
}

TEST_CASE("one shard is the serial iteration bit for bit") {
  std::mt19937_64 rng(1);
  const Matrix X = ts::gaussian(20, 12, rng);
  const Problem pr(X, ts::gaussian(20, rng) * 3.0);
  const LbTrace s = lb_run(pr, 10.0, 0.02, LbOptions{.max_iters = 300});
  const LbTrace p = lb_sharded(pr, make_shard_plan(12, 1), 10.0, 0.02, ShardedOptions{.iters = 300});
  REQUIRE(s.records.size() == p.records.size());
  for (std::size_t k = 0; k < s.records.size(); ++k) {
    CHECK(s.records[k].z == p.records[k].z);
    CHECK(s.records[k].beta == p.records[k].beta);
    CHECK(s.records[k].t == p.records[k].t);
  }
  CHECK(s.first_entry == p.first_entry);
}

TEST_CASE("two shards on a 6x4 instance") {
  std::mt19937_64 rng(2);
  const Matrix X = ts::gaussian(6, 4, rng);
  const Problem pr(X, ts::gaussian(6, rng) * 2.0);
  const LbTrace s = lb_run(pr, 5.0, 0.05, LbOptions{.max_iters = 50});
  const LbTrace p = lb_sharded(pr, make_shard_plan(4, 2), 5.0, 0.05, ShardedOptions{.iters = 50});
  CHECK(worst_gap(s, p) <= 1e-12);
}

TEST_CASE("shard counts agree on the simulation-size instance") {
  const ExperimentConfig c;
  const Instance inst = generate_instance(c, 0);
  const double kappa = 64.0, alpha = 0.1 / kappa;
  const LbTrace serial = lb_run(inst.problem, kappa, alpha, LbOptions{.max_iters = 1000});
  for (Index L : {1, 2, 4, 8}) {
    const LbTrace t = lb_sharded(inst.problem, make_shard_plan(100, L), kappa, alpha, ShardedOptions{.iters = 1000});
    CHECK_MESSAGE(worst_gap(serial, t) <= 1e-12, "L = " << L);
  }
  const LbTrace a = lb_sharded(inst.problem, make_shard_plan(100, 4), kappa, alpha, ShardedOptions{.iters = 200});
  const LbTrace b = lb_sharded(inst.problem, make_shard_plan(100, 4), kappa, alpha, ShardedOptions{.iters = 200});
  for (std::size_t k = 0; k < a.records.size(); ++k) CHECK(a.records[k].beta == b.records[k].beta);
}

TEST_CASE("record stride") {
  std::mt19937_64 rng(3);
  const Matrix X = ts::gaussian(10, 8, rng);
  const Problem pr(X, ts::gaussian(10, rng));
  const LbTrace t = lb_sharded(pr, make_shard_plan(8, 2), 2.0, 0.05, ShardedOptions{.iters = 25, .record_stride = 10});
  REQUIRE(t.records.size() == 4);
  CHECK(t.records[1].k == 10);
  CHECK(t.records.back().k == 25);
  CHECK_THROWS_AS(lb_sharded(pr, make_shard_plan(9, 2), 2.0, 0.05), InvalidArgument);
}

TEST_CASE("communication cost") {
  CHECK(communication_cost(make_shard_plan(100, 1), 10, 80).reduced_floats_per_iter == 0);
  const auto c = communication_cost(make_shard_plan(100, 4), 10, 80);
  CHECK(c.reduced_floats_per_iter == 240);
  CHECK(c.total_floats == 2400);
  CHECK(communication_cost(make_shard_plan(200, 4), 10, 80).reduced_floats_per_iter == 240);
}
