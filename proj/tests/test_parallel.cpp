#include <gtest/gtest.h>

#include <atomic>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gpusim/parallel.hpp"

using namespace gpusim;

TEST(StaticSchedule, OwnerFormula) {
  EXPECT_EQ(static_owner(0, 1, 16), 0u);
  EXPECT_EQ(static_owner(17, 1, 16), 1u);
  EXPECT_EQ(static_owner(5, 4, 2), 1u);
  EXPECT_EQ(static_owner(8, 4, 2), 0u);
}

TEST(StaticSchedule, WorkerZeroOfSixteenOverEightySms) {
  for (bool oversubscribe : {false, true}) {
    WorkerPool pool(SchedulePolicy::make_static(16), oversubscribe);
    std::vector<std::vector<std::size_t>> seen(16);
    pool.parallel_for(80, [&](std::size_t i, std::uint32_t w) { seen[w].push_back(i); });
    EXPECT_EQ(seen[0], (std::vector<std::size_t>{0, 16, 32, 48, 64}));
    for (std::uint32_t w = 0; w < 16; ++w) {
      ASSERT_EQ(seen[w].size(), 5u);
      for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(seen[w][k], w + 16 * k);
    }
  }
}

TEST(StaticSchedule, ChunkedAssignment) {
  WorkerPool pool(SchedulePolicy::make_static(3, 4), true);
  std::vector<std::vector<std::size_t>> seen(3);
  pool.parallel_for(20, [&](std::size_t i, std::uint32_t w) { seen[w].push_back(i); });
  EXPECT_EQ(seen[0], (std::vector<std::size_t>{0, 1, 2, 3, 12, 13, 14, 15}));
  EXPECT_EQ(seen[1], (std::vector<std::size_t>{4, 5, 6, 7, 16, 17, 18, 19}));
  EXPECT_EQ(seen[2], (std::vector<std::size_t>{8, 9, 10, 11}));
}

TEST(Sequential, AscendingOrder) {
  WorkerPool pool(SchedulePolicy::sequential());
  std::vector<std::size_t> order;
  pool.parallel_for(10, [&](std::size_t i, std::uint32_t w) {
    EXPECT_EQ(w, 0u);
    order.push_back(i);
  });
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(order[i], i);
}

TEST(AllPolicies, EveryIterationExactlyOnce) {
  std::vector<SchedulePolicy> policies{SchedulePolicy::sequential()};
  for (std::uint32_t w : {1u, 2u, 3u, 4u, 8u, 16u, 32u}) {
    for (std::uint32_t chunk : {1u, 3u}) {
      policies.push_back(SchedulePolicy::make_static(w, chunk));
      policies.push_back(SchedulePolicy::dynamic(w, chunk));
    }
  }
  for (const auto& p : policies) {
    for (bool oversubscribe : {false, true}) {
      WorkerPool pool(p, oversubscribe);
      for (std::size_t n : {0u, 1u, 7u, 80u, 1000u}) {
        auto hits = std::make_unique<std::atomic<int>[]>(n);
        for (int rep = 0; rep < 5; ++rep) {
          pool.parallel_for(n, [&](std::size_t i, std::uint32_t) {
            hits[i].fetch_add(1, std::memory_order_relaxed);
          });
        }
        for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(hits[i].load(), 5) << p.label() << " n=" << n;
      }
    }
  }
}

TEST(WorkerPool, ThreadsClampedUnlessOversubscribed) {
  const std::uint32_t hw = std::max(1u, std::thread::hardware_concurrency());
  WorkerPool clamped(SchedulePolicy::dynamic(hw + 4));
  EXPECT_EQ(clamped.threads(), hw);
  WorkerPool over(SchedulePolicy::dynamic(hw + 4), true);
  EXPECT_EQ(over.threads(), hw + 4);
  WorkerPool seq(SchedulePolicy::sequential(), true);
  EXPECT_EQ(seq.threads(), 1u);
}

TEST(WorkerPool, BodyExceptionReachesCaller) {
  for (auto p : {SchedulePolicy::make_static(4), SchedulePolicy::dynamic(4)}) {
    WorkerPool pool(p, true);
    EXPECT_THROW(pool.parallel_for(100,
                                   [](std::size_t i, std::uint32_t) {
                                     if (i == 57) throw std::runtime_error("boom");
                                   }),
                 std::runtime_error);
    // The pool stays usable afterwards.
    std::atomic<int> count{0};
    pool.parallel_for(10, [&](std::size_t, std::uint32_t) { ++count; });
    EXPECT_EQ(count.load(), 10);
  }
}

TEST(SchedulePolicy, LabelsAndParsing) {
  EXPECT_EQ(parse_schedule_kind("static"), SchedulePolicy::Kind::Static);
  EXPECT_EQ(parse_schedule_kind("dynamic"), SchedulePolicy::Kind::Dynamic);
  EXPECT_EQ(parse_schedule_kind("sequential"), SchedulePolicy::Kind::Sequential);
  EXPECT_THROW(parse_schedule_kind("guided"), std::invalid_argument);
  EXPECT_EQ(SchedulePolicy::sequential().effective_workers(), 1u);
  EXPECT_EQ(SchedulePolicy::dynamic(8).effective_workers(), 8u);
}
