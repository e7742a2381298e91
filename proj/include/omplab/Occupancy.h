//===--- Occupancy.h - Shared-memory occupancy model -------------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Models how many teams fit on one multiprocessor once every team carries a
// shared depot mirror, the preallocated shared-args list, and the runtime's
// fixed private span. Register pressure and the hardware block limit cap the
// count independently of shared memory; the gap between the two is what the
// tables quantify.
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_OCCUPANCY_H
#define OMPLAB_OCCUPANCY_H

#include "omplab/DeviceRuntime.h"

#include <cstdint>
#include <string>
#include <vector>

namespace omplab {

struct GpuSpec {
  std::string Name;
  int64_t SharedBytesPerSM = 0;
  int64_t RegistersPerSM = 65536;
  int64_t MaxBlocksPerSM = 16;
  int WarpSize = 32;
  int MaxRegsPerThread = 255;
};

const std::vector<GpuSpec> &knownGpus();
const GpuSpec *findGpu(const std::string &Name);
inline constexpr const char *DefaultGpuName = "k40-48k";

/// Per-team shared-memory ledger taken from a compiled kernel (or a fixture).
struct DepotManifest {
  std::vector<int64_t> SlotSizes; // already rounded to their slot sizes
  int PreallocEntries = DefaultPreallocEntries;

  int64_t depotBytes() const;
  int64_t preallocBytes() const {
    return int64_t{PreallocEntries} * SharedArgEntryBytes;
  }
  int64_t sharedFootprint() const {
    return depotBytes() + preallocBytes() + RuntimePrivateBytes;
  }
};

/// N standalone scalars plus the worker loop's two pointer slots.
DepotManifest scalarsFixture(int N);
/// K arrays of 96 ints plus a loop counter and the worker loop's slots.
DepotManifest arraysFixture(int K);

/// Measured register pressure of the fixture kernels at 128 threads.
int scalarsFixtureRegs(const GpuSpec &G, int N);
int arraysFixtureRegs(const GpuSpec &G, int K);
inline constexpr int FixtureThreadsPerTeam = 128;
extern const int ScalarsFixtureVars[7]; // {1, 2, 4, 8, 16, 32, 64}
extern const int ArraysFixtureVars[4];  // {1, 2, 3, 4}

struct OccupancyResult {
  int64_t TeamsByRegs = 0;
  int64_t TeamsBySmem = 0;
  int64_t Potential = 0; // register and block limits only
  int64_t Actual = 0;    // all three limits
  int64_t SmemUsed = 0;  // bytes the potential count would need
};

OccupancyResult occupancyFor(const GpuSpec &G, int64_t SharedFootprintBytes,
                             int RegsPerThread, int ThreadsPerTeam);

/// Largest per-thread register count that still lets `Teams` teams co-reside.
int64_t maxRegsForTeams(const GpuSpec &G, int64_t Teams, int ThreadsPerTeam);
/// How many 8-byte shared variables fit per team at a given team count.
int64_t maxSharedVars(const GpuSpec &G, int64_t Teams);
extern const int MaxVarsTeamPoints[9]; // {16, 15, 14, 13, 12, 8, 4, 2, 1}

// CSV tables. All values come from the model above.
std::string footprintScalarsCsv();
std::string footprintArraysCsv();
std::string occupancyScalarsCsv(const GpuSpec &G);
std::string occupancyArraysCsv(const GpuSpec &G);
std::string maxVarsCsv(const GpuSpec &G);

} // namespace omplab

#endif // OMPLAB_OCCUPANCY_H
