//===--- RuntimeTests.cpp - Team runtime protocol tests ---------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/DeviceRuntime.h"

#include <doctest.h>
#include <map>
#include <random>

using namespace omplab;

namespace {

/// Heap double that hands out distinct addresses and records traffic.
class RecordingHeap : public SharedArgsAllocator {
public:
  uint64_t allocate(int64_t Bytes) override {
    if (FailAll)
      return 0;
    uint64_t Addr = Next;
    Next += static_cast<uint64_t>(Bytes) + 64;
    LiveBytes[Addr] = Bytes;
    ++Allocs;
    return Addr;
  }

  void release(uint64_t Addr) override {
    REQUIRE(LiveBytes.count(Addr) == 1);
    LiveBytes.erase(Addr);
    ++Frees;
  }

  bool FailAll = false;
  uint64_t Next = 0x1000;
  std::map<uint64_t, int64_t> LiveBytes;
  int Allocs = 0;
  int Frees = 0;
};

constexpr uint64_t PreallocBase = 0x2000;

TeamRuntime makeLive(RecordingHeap &Heap, int Workers = 8,
                     RuntimeConfig Cfg = {}) {
  TeamRuntime Rt(Cfg, PreallocBase, Heap);
  REQUIRE(Rt.kernelInit(RtRole::Master, Workers).Ok);
  return Rt;
}

/// One worker fetches and retires the staged region.
void drainRegion(TeamRuntime &Rt) {
  std::string Wf;
  uint64_t Args = 0;
  bool Participate = false;
  REQUIRE(Rt.kernelParallel(RtRole::Worker, Wf, Args, Participate).Ok);
  REQUIRE(Participate);
  REQUIRE(Rt.endParallel(RtRole::Worker).Ok);
}

} // namespace

TEST_CASE("init accepts one master call and nothing else") {
  RecordingHeap Heap;
  TeamRuntime Rt({}, PreallocBase, Heap);
  CHECK_FALSE(Rt.kernelInit(RtRole::Worker, 8).Ok);
  CHECK_FALSE(Rt.kernelInit(RtRole::Master, 0).Ok);
  CHECK(Rt.kernelInit(RtRole::Master, 8).Ok);
  CHECK_FALSE(Rt.kernelInit(RtRole::Master, 8).Ok);
  CHECK(Rt.workerCount() == 8);
}

TEST_CASE("small capture lists use the preallocated window") {
  RecordingHeap Heap;
  TeamRuntime Rt = makeLive(Heap);
  for (int64_t N : {0, 1, 19, 20}) {
    CAPTURE(N);
    uint64_t Addr = 0;
    REQUIRE(Rt.prepareParallel(RtRole::Master, "wf", N, Addr).Ok);
    CHECK(Addr == PreallocBase);
    CHECK(Heap.Allocs == 0);
    drainRegion(Rt);
  }
  CHECK(Rt.dynamicAllocs() == 0);
}

TEST_CASE("oversized capture lists fall back to the device heap") {
  RecordingHeap Heap;
  TeamRuntime Rt = makeLive(Heap);
  for (auto [N, Bytes] : {std::pair<int64_t, int64_t>{21, 168},
                          {32, 256},
                          {64, 512},
                          {128, 1024}}) {
    CAPTURE(N);
    uint64_t Addr = 0;
    REQUIRE(Rt.prepareParallel(RtRole::Master, "wf", N, Addr).Ok);
    CHECK(Addr != PreallocBase);
    CHECK(Heap.LiveBytes.size() == 1);
    CHECK(Heap.LiveBytes.begin()->second == Bytes);
    drainRegion(Rt);
    // The block is freed when the last worker retires the region.
    CHECK(Heap.LiveBytes.empty());
  }
  CHECK(Rt.dynamicAllocs() == 4);
  CHECK(Rt.dynamicFrees() == 4);
  CHECK(Rt.leakedBlocks() == 0);
}

TEST_CASE("the window boundary is exactly the entry count") {
  RecordingHeap Heap;
  RuntimeConfig Cfg;
  Cfg.PreallocEntries = 4;
  TeamRuntime Rt = makeLive(Heap, 8, Cfg);
  uint64_t Addr = 0;
  REQUIRE(Rt.prepareParallel(RtRole::Master, "wf", 4, Addr).Ok);
  CHECK(Addr == PreallocBase);
  drainRegion(Rt);
  REQUIRE(Rt.prepareParallel(RtRole::Master, "wf", 5, Addr).Ok);
  CHECK(Addr != PreallocBase);
  CHECK(Heap.LiveBytes.begin()->second == 40);
}

TEST_CASE("a failing device heap is a trap, not a silent corruption") {
  RecordingHeap Heap;
  RuntimeConfig Cfg;
  Cfg.FailDynamicAlloc = true;
  TeamRuntime Rt = makeLive(Heap, 8, Cfg);
  uint64_t Addr = 0;
  auto R = Rt.prepareParallel(RtRole::Master, "wf", 21, Addr);
  REQUIRE_FALSE(R.Ok);
  CHECK(R.TrapReason == "shared-args-alloc-failed");
}

TEST_CASE("protocol violations trap with specific reasons") {
  RecordingHeap Heap;
  uint64_t Addr = 0;

  SUBCASE("prepare before init") {
    TeamRuntime Rt({}, PreallocBase, Heap);
    auto R = Rt.prepareParallel(RtRole::Master, "wf", 1, Addr);
    REQUIRE_FALSE(R.Ok);
    CHECK(R.TrapReason == "protocol error: prepare_parallel before init");
  }
  SUBCASE("worker prepares") {
    TeamRuntime Rt = makeLive(Heap);
    CHECK_FALSE(Rt.prepareParallel(RtRole::Worker, "wf", 1, Addr).Ok);
  }
  SUBCASE("double prepare") {
    TeamRuntime Rt = makeLive(Heap);
    REQUIRE(Rt.prepareParallel(RtRole::Master, "wf", 1, Addr).Ok);
    auto R = Rt.prepareParallel(RtRole::Master, "wf", 1, Addr);
    REQUIRE_FALSE(R.Ok);
    CHECK(R.TrapReason ==
          "protocol error: prepare_parallel while a region is in flight");
  }
  SUBCASE("prepare while workers are still inside the previous region") {
    TeamRuntime Rt = makeLive(Heap);
    REQUIRE(Rt.prepareParallel(RtRole::Master, "wf", 1, Addr).Ok);
    std::string Wf;
    bool P = false;
    REQUIRE(Rt.kernelParallel(RtRole::Worker, Wf, Addr, P).Ok);
    CHECK_FALSE(Rt.prepareParallel(RtRole::Master, "wf", 1, Addr).Ok);
  }
  SUBCASE("fetch with nothing staged") {
    TeamRuntime Rt = makeLive(Heap);
    std::string Wf;
    bool P = false;
    auto R = Rt.kernelParallel(RtRole::Worker, Wf, Addr, P);
    REQUIRE_FALSE(R.Ok);
    CHECK(R.TrapReason ==
          "protocol error: kernel_parallel with no staged region");
  }
  SUBCASE("master fetches work") {
    TeamRuntime Rt = makeLive(Heap);
    REQUIRE(Rt.prepareParallel(RtRole::Master, "wf", 1, Addr).Ok);
    std::string Wf;
    bool P = false;
    CHECK_FALSE(Rt.kernelParallel(RtRole::Master, Wf, Addr, P).Ok);
  }
  SUBCASE("end with no active region") {
    TeamRuntime Rt = makeLive(Heap);
    auto R = Rt.endParallel(RtRole::Worker);
    REQUIRE_FALSE(R.Ok);
    CHECK(R.TrapReason == "protocol error: end_parallel with no active region");
  }
  SUBCASE("deinit while a region is in flight") {
    TeamRuntime Rt = makeLive(Heap);
    REQUIRE(Rt.prepareParallel(RtRole::Master, "wf", 1, Addr).Ok);
    CHECK_FALSE(Rt.kernelDeinit(RtRole::Master).Ok);
  }
  SUBCASE("double deinit") {
    TeamRuntime Rt = makeLive(Heap);
    REQUIRE(Rt.kernelDeinit(RtRole::Master).Ok);
    CHECK_FALSE(Rt.kernelDeinit(RtRole::Master).Ok);
  }
}

TEST_CASE("after deinit workers receive the termination sentinel") {
  RecordingHeap Heap;
  TeamRuntime Rt = makeLive(Heap);
  REQUIRE(Rt.kernelDeinit(RtRole::Master).Ok);
  std::string Wf = "stale";
  uint64_t Args = 99;
  bool P = true;
  REQUIRE(Rt.kernelParallel(RtRole::Worker, Wf, Args, P).Ok);
  CHECK(Wf.empty());
  CHECK(Args == 0);
  CHECK_FALSE(P);
  CHECK(Rt.terminated());
}

TEST_CASE("event log keeps the lifecycle in order") {
  RecordingHeap Heap;
  TeamRuntime Rt = makeLive(Heap);
  uint64_t Addr = 0;
  REQUIRE(Rt.prepareParallel(RtRole::Master, "region0", 21, Addr).Ok);
  std::string Wf;
  bool P = false;
  REQUIRE(Rt.kernelParallel(RtRole::Worker, Wf, Addr, P).Ok);
  CHECK(Wf == "region0");
  REQUIRE(Rt.endParallel(RtRole::Worker).Ok);
  REQUIRE(Rt.kernelDeinit(RtRole::Master).Ok);

  std::vector<RuntimeEvent::Kind> Kinds;
  for (const auto &E : Rt.events())
    Kinds.push_back(E.K);
  CHECK(Kinds == std::vector<RuntimeEvent::Kind>{
                     RuntimeEvent::Init, RuntimeEvent::PrepareDynamic,
                     RuntimeEvent::Fetch, RuntimeEvent::Retire,
                     RuntimeEvent::DynamicFree, RuntimeEvent::Deinit});
}

TEST_CASE("dynamic allocation follows the byte law for every count") {
  std::mt19937 Rng(1234);
  std::uniform_int_distribution<int64_t> Dist(0, 128);
  for (int Round = 0; Round < 200; ++Round) {
    int64_t N = Dist(Rng);
    CAPTURE(N);
    RecordingHeap Heap;
    TeamRuntime Rt = makeLive(Heap);
    uint64_t Addr = 0;
    REQUIRE(Rt.prepareParallel(RtRole::Master, "wf", N, Addr).Ok);
    int64_t Dynamic =
        Heap.LiveBytes.empty() ? 0 : Heap.LiveBytes.begin()->second;
    CHECK(Dynamic == dynamicArgsBytes(static_cast<int>(N)));
    CHECK((Dynamic == 0) == (N <= DefaultPreallocEntries));
    if (N > DefaultPreallocEntries)
      CHECK(Dynamic == SharedArgEntryBytes * N);
  }
}
