//===--- DeviceRuntime.cpp - Team-level runtime protocol ------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/DeviceRuntime.h"

namespace omplab {

std::string RuntimeEvent::str() const {
  switch (K) {
  case Init:
    return "init workers=" + std::to_string(NArgs);
  case PreparePrealloc:
    return "prepare " + Fn + " nargs=" + std::to_string(NArgs) + " prealloc";
  case PrepareDynamic:
    return "prepare " + Fn + " nargs=" + std::to_string(NArgs) +
           " dynamic bytes=" + std::to_string(Bytes);
  case Fetch:
    return "fetch " + Fn;
  case Retire:
    return "retire remaining=" + std::to_string(NArgs);
  case DynamicFree:
    return "free bytes=" + std::to_string(Bytes);
  case Deinit:
    return "deinit";
  }
  return "?";
}

RtResult TeamRuntime::kernelInit(RtRole Role, int WorkerCount) {
  if (Role != RtRole::Master)
    return RtResult::trap("protocol error: kernel_init from a worker thread");
  if (Phase != PhaseKind::Uninitialized)
    return RtResult::trap("protocol error: kernel_init called twice");
  if (WorkerCount <= 0)
    return RtResult::trap("protocol error: kernel_init with no workers");
  Phase = PhaseKind::Idle;
  Workers = WorkerCount;
  Events.push_back({RuntimeEvent::Init, "", WorkerCount, 0});
  return RtResult::ok();
}

RtResult TeamRuntime::prepareParallel(RtRole Role, const std::string &Fn,
                                      int64_t NArgs, uint64_t &OutAddr) {
  if (Role != RtRole::Master)
    return RtResult::trap(
        "protocol error: prepare_parallel from a worker thread");
  if (Phase == PhaseKind::Uninitialized)
    return RtResult::trap("protocol error: prepare_parallel before init");
  if (Phase == PhaseKind::Terminated)
    return RtResult::trap("protocol error: prepare_parallel after deinit");
  if (Phase == PhaseKind::Staged || Active > 0)
    return RtResult::trap(
        "protocol error: prepare_parallel while a region is in flight");
  if (NArgs < 0)
    return RtResult::trap("protocol error: negative shared-args count");

  if (NArgs <= Config.PreallocEntries) {
    ArgsAddr = PreallocBase;
    ArgsDynamic = false;
    Events.push_back({RuntimeEvent::PreparePrealloc, Fn, NArgs, 0});
  } else {
    int64_t Bytes = NArgs * SharedArgEntryBytes;
    uint64_t Addr = Config.FailDynamicAlloc ? 0 : Heap.allocate(Bytes);
    if (Addr == 0)
      return RtResult::trap("shared-args-alloc-failed");
    ArgsAddr = Addr;
    ArgsDynamic = true;
    ++DynAllocs;
    Events.push_back({RuntimeEvent::PrepareDynamic, Fn, NArgs, Bytes});
  }
  WorkFn = Fn;
  Phase = PhaseKind::Staged;
  OutAddr = ArgsAddr;
  return RtResult::ok();
}

RtResult TeamRuntime::kernelParallel(RtRole Role, std::string &WfName,
                                     uint64_t &OutAddr, bool &Participate) {
  if (Role != RtRole::Worker)
    return RtResult::trap(
        "protocol error: kernel_parallel from the master thread");
  if (Phase == PhaseKind::Terminated) {
    WfName.clear();
    OutAddr = 0;
    Participate = false;
    return RtResult::ok();
  }
  if (Phase != PhaseKind::Staged)
    return RtResult::trap("protocol error: kernel_parallel with no staged region");
  WfName = WorkFn;
  OutAddr = ArgsAddr;
  Participate = true;
  ++Active;
  Events.push_back({RuntimeEvent::Fetch, WorkFn, 0, 0});
  return RtResult::ok();
}

RtResult TeamRuntime::endParallel(RtRole Role) {
  if (Role != RtRole::Worker)
    return RtResult::trap(
        "protocol error: end_parallel from the master thread");
  if (Phase != PhaseKind::Staged || Active <= 0)
    return RtResult::trap("protocol error: end_parallel with no active region");
  --Active;
  Events.push_back({RuntimeEvent::Retire, "", Active, 0});
  if (Active == 0) {
    if (ArgsDynamic) {
      int64_t Bytes = 0;
      for (auto It = Events.rbegin(); It != Events.rend(); ++It)
        if (It->K == RuntimeEvent::PrepareDynamic) {
          Bytes = It->Bytes;
          break;
        }
      Heap.release(ArgsAddr);
      ++DynFrees;
      Events.push_back({RuntimeEvent::DynamicFree, "", 0, Bytes});
    }
    WorkFn.clear();
    ArgsAddr = 0;
    ArgsDynamic = false;
    Phase = PhaseKind::Idle;
  }
  return RtResult::ok();
}

RtResult TeamRuntime::kernelDeinit(RtRole Role) {
  if (Role != RtRole::Master)
    return RtResult::trap("protocol error: kernel_deinit from a worker thread");
  if (Phase == PhaseKind::Uninitialized)
    return RtResult::trap("protocol error: kernel_deinit before init");
  if (Phase == PhaseKind::Staged || Active > 0)
    return RtResult::trap(
        "protocol error: kernel_deinit while a region is in flight");
  if (Phase == PhaseKind::Terminated)
    return RtResult::trap("protocol error: kernel_deinit called twice");
  Phase = PhaseKind::Terminated;
  Events.push_back({RuntimeEvent::Deinit, "", 0, 0});
  return RtResult::ok();
}

} // namespace omplab
