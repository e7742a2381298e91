//===--- Simulator.h - Machine-form execution model --------------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Interprets a machine-form module over an explicit memory model. Every
// launched thread gets a private local range, every team gets a shared range
// holding the depot mirror, the preallocated shared-args list, and a fixed
// runtime-private span, and module globals plus the device heap live in a
// global range. Range checks are what enforce isolation; pointer address
// spaces are advisory. Threads run round-robin, one instruction per turn, and
// a barrier releases once every live thread of the team is blocked on it.
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_SIMULATOR_H
#define OMPLAB_SIMULATOR_H

#include "omplab/DeviceRuntime.h"
#include "omplab/IR.h"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace omplab {

struct SimOptions {
  int Teams = -1;   // -1: module launch default
  int Workers = -1; // requested workers; launched team size adds the reserved warp
  RuntimeConfig Rt;
  bool Trace = false;
  bool ValidateLayout = true;
  int64_t StepLimit = 20'000'000;
  /// Pre-run overrides for module globals: a single value fills an array.
  std::map<std::string, std::vector<int64_t>> GlobalOverrides;
};

struct SimStats {
  int64_t Steps = 0;
  int Teams = 0;
  int RequestedWorkers = 0;
  int LaunchedTeamSize = 0;
  std::vector<int64_t> BarrierReleases;                // per team
  std::vector<std::vector<int64_t>> BarrierEntries;    // [team][launched tid]
  int64_t DynamicAllocBytes = 0;
  int64_t DynamicAllocs = 0;
  int64_t DynamicFrees = 0;

  int64_t leakedBlocks() const { return DynamicAllocs - DynamicFrees; }
  int64_t masterBarrierEntries(int Team) const;
};

struct SimResult {
  bool Trapped = false;
  std::string TrapReason;
  int TrapTeam = -1;
  int TrapThread = -1; // launched tid within the team
  SimStats Stats;
  /// Final values of module globals, flattened to i32 element lists.
  std::map<std::string, std::vector<int64_t>> FinalGlobals;
  std::vector<std::string> TraceLines;
  std::vector<std::vector<RuntimeEvent>> TeamEvents; // per team

  bool ok() const { return !Trapped; }
};

SimResult simulate(const Module &M, const SimOptions &Opts);

} // namespace omplab

#endif // OMPLAB_SIMULATOR_H
