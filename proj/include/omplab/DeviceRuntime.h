//===--- DeviceRuntime.h - Team-level runtime protocol ----------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Book-keeping behind the __kmpc_kernel_* entry points, one instance per
// team. The master stages a region (work function plus a shared-args list);
// workers fetch it, run it, and retire it. The shared-args list lives in a
// fixed preallocated span of team memory unless the region needs more
// entries, in which case a block is taken from device heap and returned when
// the last participant retires the region.
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_DEVICE_RUNTIME_H
#define OMPLAB_DEVICE_RUNTIME_H

#include <cstdint>
#include <string>
#include <vector>

namespace omplab {

/// Entries in the per-team preallocated shared-args list.
inline constexpr int DefaultPreallocEntries = 20;
/// Each entry holds one pointer.
inline constexpr int64_t SharedArgEntryBytes = 8;
/// Fixed runtime-private span at the tail of each team's shared region.
inline constexpr int64_t RuntimePrivateBytes = 49;

/// Device-global bytes a region with \p NArgs captures allocates when the
/// preallocated window is too small. Regions that fit the window cost zero.
constexpr int64_t dynamicArgsBytes(int NArgs,
                                   int PreallocEntries = DefaultPreallocEntries) {
  return NArgs <= PreallocEntries ? 0 : int64_t(NArgs) * SharedArgEntryBytes;
}

struct RuntimeConfig {
  int PreallocEntries = DefaultPreallocEntries;
  bool FailDynamicAlloc = false; // test hook: dynamic requests report failure
};

/// Device-heap hooks the runtime uses for oversized shared-args lists.
class SharedArgsAllocator {
public:
  virtual ~SharedArgsAllocator() = default;
  /// Returns the block address, or 0 when the heap is exhausted.
  virtual uint64_t allocate(int64_t Bytes) = 0;
  virtual void release(uint64_t Addr) = 0;
};

enum class RtRole { Master, Worker };

struct RtResult {
  bool Ok = true;
  std::string TrapReason;

  static RtResult ok() { return {}; }
  static RtResult trap(std::string Reason) { return {false, std::move(Reason)}; }
};

struct RuntimeEvent {
  enum Kind {
    Init,
    PreparePrealloc,
    PrepareDynamic,
    Fetch,
    Retire,
    DynamicFree,
    Deinit,
  } K;
  std::string Fn;   // staged work function, when applicable
  int64_t NArgs = 0;
  int64_t Bytes = 0;

  std::string str() const;
};

class TeamRuntime {
public:
  TeamRuntime(RuntimeConfig Config, uint64_t PreallocBase,
              SharedArgsAllocator &Heap)
      : Config(Config), PreallocBase(PreallocBase), Heap(Heap) {}

  RtResult kernelInit(RtRole Role, int WorkerCount);
  RtResult prepareParallel(RtRole Role, const std::string &Fn, int64_t NArgs,
                           uint64_t &ArgsAddr);
  /// WfName comes back empty once the kernel is torn down.
  RtResult kernelParallel(RtRole Role, std::string &WfName, uint64_t &ArgsAddr,
                          bool &Participate);
  RtResult endParallel(RtRole Role);
  RtResult kernelDeinit(RtRole Role);

  int workerCount() const { return Workers; }
  int64_t dynamicAllocs() const { return DynAllocs; }
  int64_t dynamicFrees() const { return DynFrees; }
  int64_t leakedBlocks() const { return DynAllocs - DynFrees; }
  bool terminated() const { return Phase == PhaseKind::Terminated; }
  const std::vector<RuntimeEvent> &events() const { return Events; }

private:
  enum class PhaseKind { Uninitialized, Idle, Staged, Terminated };

  RuntimeConfig Config;
  uint64_t PreallocBase = 0;
  SharedArgsAllocator &Heap;

  PhaseKind Phase = PhaseKind::Uninitialized;
  int Workers = 0;
  std::string WorkFn;
  uint64_t ArgsAddr = 0;
  bool ArgsDynamic = false;
  int Active = 0;
  int64_t DynAllocs = 0;
  int64_t DynFrees = 0;
  std::vector<RuntimeEvent> Events;
};

} // namespace omplab

#endif // OMPLAB_DEVICE_RUNTIME_H
