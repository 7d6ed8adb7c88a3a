#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "faultsort/riffle_sort.hpp"
#include "faultsort/rng.hpp"
#include "faultsort/sampling.hpp"

namespace faultsort {
namespace {

TEST(BatchPlan, SmallCases) {
  const BatchPlan n4 = batch_plan(4);
  EXPECT_EQ(n4.k, 1);
  EXPECT_EQ(n4.sizes, (std::vector<std::int64_t>{2, 2}));

  const BatchPlan n1 = batch_plan(1);
  EXPECT_EQ(n1.k, 0);
  EXPECT_EQ(n1.sizes, (std::vector<std::int64_t>{1}));
}

TEST(BatchPlan, SizesSumAndShape) {
  for (std::int64_t n = 1; n <= 3000; n += 7) {
    const BatchPlan plan = batch_plan(n);
    const std::int64_t root =
        static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    std::int64_t sum = 0;
    for (const std::int64_t s : plan.sizes) sum += s;
    ASSERT_EQ(sum, n);
    if (plan.k >= 1) {
      ASSERT_EQ(plan.sizes[0], root);
      ASSERT_GE(plan.sizes.back(), 1);
      ASSERT_LE(plan.sizes.back(), (std::int64_t{1} << plan.k) * root);
      for (std::int64_t i = 1; i < plan.k; ++i) {
        ASSERT_EQ(plan.sizes[static_cast<std::size_t>(i)], (std::int64_t{1} << (i - 1)) * root);
      }
      // k is minimal.
      ASSERT_LT(root << (plan.k - 1), n);
    }
  }
}

TEST(PartitionBatches, IsAPartitionInSprimeOrder) {
  SplitRng rng(15);
  for (int trial = 0; trial < 60; ++trial) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(sample_uniform_int(rng, 1000));
    Sequence sprime = fisher_yates(Sequence::identity(n), rng);
    const auto batches = partition_batches(sprime, rng);
    const BatchPlan plan = batch_plan(n);
    ASSERT_EQ(batches.size(), plan.sizes.size());

    std::set<std::int64_t> seen;
    sprime.ensure_index();
    for (std::size_t i = 0; i < batches.size(); ++i) {
      ASSERT_EQ(static_cast<std::int64_t>(batches[i].size()), plan.sizes[i]);
      for (std::size_t j = 0; j < batches[i].size(); ++j) {
        ASSERT_TRUE(seen.insert(batches[i][j]).second);
        if (j > 0) {
          ASSERT_LT(sprime.position_of(batches[i][j - 1]), sprime.position_of(batches[i][j]));
        }
      }
    }
    ASSERT_EQ(static_cast<std::int64_t>(seen.size()), n);
  }
}

TEST(PartitionBatches, BitSourceRouteMatchesPlan) {
  SplitRng rng(25);
  RngBitSource bits(rng.split(77));
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t n = 2 + static_cast<std::int64_t>(sample_uniform_int(rng, 500));
    const Sequence sprime = Sequence::identity(n);
    const auto batches = partition_batches(sprime, bits);
    const BatchPlan plan = batch_plan(n);
    std::set<std::int64_t> seen;
    ASSERT_EQ(batches.size(), plan.sizes.size());
    for (std::size_t i = 0; i < batches.size(); ++i) {
      ASSERT_EQ(static_cast<std::int64_t>(batches[i].size()), plan.sizes[i]);
      for (const std::int64_t v : batches[i]) ASSERT_TRUE(seen.insert(v).second);
    }
    ASSERT_EQ(static_cast<std::int64_t>(seen.size()), n);
  }
}

TEST(BatchInsert, SingleInsertion) {
  const Sequence out = batch_insert(Sequence({1, 3}), {{2, 2}}, Sequence({2}));
  EXPECT_EQ(out, Sequence({1, 2, 3}));
}

TEST(BatchInsert, TiesBreakBySprimeOrder) {
  const Sequence sprime({2, 3});
  const Sequence out = batch_insert(Sequence({1, 4}), {{3, 2}, {2, 2}}, sprime);
  EXPECT_EQ(out, Sequence({1, 2, 3, 4}));
}

TEST(BatchInsert, SimultaneousSemanticsMatchReference) {
  SplitRng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t m = 1 + static_cast<std::int64_t>(sample_uniform_int(rng, 30));
    std::vector<std::int64_t> base(static_cast<std::size_t>(m));
    std::iota(base.begin(), base.end(), 1);
    const std::int64_t extra = 1 + static_cast<std::int64_t>(sample_uniform_int(rng, 10));
    std::vector<std::int64_t> inserted(static_cast<std::size_t>(extra));
    std::iota(inserted.begin(), inserted.end(), 1000);
    fisher_yates_inplace(inserted, rng);

    std::vector<Insertion> inserts;
    for (const std::int64_t v : inserted) {
      inserts.push_back(
          {v, 1 + static_cast<std::int64_t>(sample_uniform_int(rng, static_cast<std::uint64_t>(m + 1)))});
    }
    const Sequence sprime{std::vector<std::int64_t>(inserted)};

    // Reference: decorate with keys and stable-sort. Existing element at
    // position pos has key (pos+1, 1, pos); an insert at rank r has key
    // (r, 0, sprime position), so inserts land ahead of the occupant.
    struct Key {
      std::int64_t slot;
      int kind;
      std::int64_t tie;
      std::int64_t value;
    };
    std::vector<Key> keys;
    for (std::int64_t pos = 0; pos < m; ++pos) keys.push_back({pos + 1, 1, 0, base[pos]});
    for (const Insertion& ins : inserts) {
      keys.push_back({ins.rank, 0, sprime.position_of(ins.value), ins.value});
    }
    std::stable_sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
      if (a.slot != b.slot) return a.slot < b.slot;
      if (a.kind != b.kind) return a.kind < b.kind;
      return a.tie < b.tie;
    });
    std::vector<std::int64_t> expected;
    for (const Key& k : keys) expected.push_back(k.value);

    // Processing order must not matter.
    std::vector<Insertion> shuffled = inserts;
    std::reverse(shuffled.begin(), shuffled.end());
    const Sequence a = batch_insert(Sequence{std::vector<std::int64_t>(base)}, inserts, sprime);
    const Sequence b = batch_insert(Sequence{std::vector<std::int64_t>(base)}, shuffled, sprime);
    ASSERT_EQ(a.items(), expected);
    ASSERT_EQ(b.items(), expected);
  }
}

TEST(BatchInsert, OutOfRangeRanksClampAndCount) {
  std::int64_t clamped = 0;
  const Sequence out =
      batch_insert(Sequence({1, 2}), {{9, 99}, {0, -3}}, Sequence({9, 0}), &clamped);
  EXPECT_EQ(clamped, 2);
  EXPECT_EQ(out, Sequence({0, 1, 2, 9}));
}

TEST(RiffleSort, ExactAtZeroError) {
  FaultModel model(0.0, 0.0, 5);
  for (const std::int64_t n : {1, 10, 257, 1200}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      RiffleConfig config;
      config.rng_seed = seed;
      const RiffleResult result = riffle_sort(model, Sequence::identity(n), config);
      ASSERT_EQ(result.sequence, Sequence::identity(n)) << "n=" << n;
    }
  }
}

TEST(RiffleSort, OutputIsPermutationUnderNoise) {
  SplitRng rng(2);
  for (int trial = 0; trial < 8; ++trial) {
    const std::int64_t n = 100 + static_cast<std::int64_t>(sample_uniform_int(rng, 4000));
    FaultModel model(0.15, 0.15, rng.next_u64());
    RiffleConfig config;
    config.rng_seed = rng.next_u64();
    const RiffleResult result = riffle_sort(model, fisher_yates(Sequence::identity(n), rng), config);
    std::vector<std::int64_t> sorted = result.sequence.items();
    std::sort(sorted.begin(), sorted.end());
    ASSERT_EQ(Sequence(std::move(sorted)), Sequence::identity(n));
    ASSERT_GT(result.comparisons, 0u);
  }
}

TEST(RiffleSort, SmallInputsRouteToBasketSort) {
  FaultModel model(0.1, 0.1, 6);
  RiffleConfig config;
  const RiffleResult result = riffle_sort(model, Sequence::identity(50), config);
  EXPECT_EQ(result.flags, (std::vector<std::string>{"small_n_basket"}));
  std::vector<std::int64_t> sorted = result.sequence.items();
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(Sequence(std::move(sorted)), Sequence::identity(50));
}

TEST(RiffleSort, DeterministicGivenSeeds) {
  FaultModel model(0.1, 0.1, 20);
  RiffleConfig config;
  config.rng_seed = 7;
  const RiffleResult a = riffle_sort(model, Sequence::identity(3000), config);
  const RiffleResult b = riffle_sort(model, Sequence::identity(3000), config);
  EXPECT_EQ(a.sequence, b.sequence);
  EXPECT_EQ(a.comparisons, b.comparisons);
}

TEST(RiffleSort, TheoreticalModeDegeneratesButSorts) {
  // Theoretical constants push every search to the midpoint fallback and the
  // basket window to m; at p=0 the output is still exact.
  FaultModel model(0.0, 0.0, 4);
  RiffleConfig config;
  config.mode = RunMode::theoretical;
  config.rng_seed = 3;
  const RiffleResult result = riffle_sort(model, Sequence::identity(300), config);
  EXPECT_EQ(result.sequence, Sequence::identity(300));
}

TEST(RiffleSort, ShuffleOffStillSorts) {
  FaultModel model(0.05, 0.05, 9);
  RiffleConfig config;
  config.shuffle = false;
  config.rng_seed = 1;
  const RiffleResult a = riffle_sort(model, Sequence::identity(2000), config);
  std::vector<std::int64_t> sorted = a.sequence.items();
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(Sequence(std::move(sorted)), Sequence::identity(2000));
  EXPECT_LE(dislocation_report(a.sequence).max_dislocation, 200);
}

}  // namespace
}  // namespace faultsort
