//===--- Occupancy.cpp - Shared-memory occupancy model --------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/Occupancy.h"

#include <sstream>

namespace omplab {

const std::vector<GpuSpec> &knownGpus() {
  static const std::vector<GpuSpec> Gpus = {
      {"k40-16k", 16384, 65536, 16, 32, 255},
      {"k40-32k", 32768, 65536, 16, 32, 255},
      {"k40-48k", 49152, 65536, 16, 32, 255},
      {"p100", 65536, 65536, 32, 32, 255},
  };
  return Gpus;
}

const GpuSpec *findGpu(const std::string &Name) {
  for (const GpuSpec &G : knownGpus())
    if (G.Name == Name)
      return &G;
  return nullptr;
}

int64_t DepotManifest::depotBytes() const {
  int64_t Sum = 0;
  for (int64_t S : SlotSizes)
    Sum += S;
  return Sum;
}

const int ScalarsFixtureVars[7] = {1, 2, 4, 8, 16, 32, 64};
const int ArraysFixtureVars[4] = {1, 2, 3, 4};
const int MaxVarsTeamPoints[9] = {16, 15, 14, 13, 12, 8, 4, 2, 1};

DepotManifest scalarsFixture(int N) {
  DepotManifest M;
  for (int J = 0; J < N; ++J)
    M.SlotSizes.push_back(8);
  M.SlotSizes.push_back(8); // worker loop: staged work-fn slot
  M.SlotSizes.push_back(8); // worker loop: staged args slot
  return M;
}

DepotManifest arraysFixture(int K) {
  DepotManifest M;
  for (int J = 0; J < K; ++J)
    M.SlotSizes.push_back(96 * 4);
  M.SlotSizes.push_back(8); // sequential loop counter
  M.SlotSizes.push_back(8); // worker loop: staged work-fn slot
  M.SlotSizes.push_back(8); // worker loop: staged args slot
  return M;
}

static bool isK40(const GpuSpec &G) { return G.Name.rfind("k40", 0) == 0; }

int scalarsFixtureRegs(const GpuSpec &G, int N) {
  static const int K40[7] = {36, 36, 36, 36, 40, 72, 136};
  static const int P100[7] = {31, 31, 31, 31, 40, 71, 135};
  for (int J = 0; J < 7; ++J)
    if (ScalarsFixtureVars[J] == N)
      return isK40(G) ? K40[J] : P100[J];
  return isK40(G) ? 36 : 31;
}

int arraysFixtureRegs(const GpuSpec &G, int K) {
  (void)K;
  return isK40(G) ? 36 : 30;
}

OccupancyResult occupancyFor(const GpuSpec &G, int64_t SharedFootprintBytes,
                             int RegsPerThread, int ThreadsPerTeam) {
  OccupancyResult R;
  int64_t RegsPerTeam = int64_t{RegsPerThread} * ThreadsPerTeam;
  R.TeamsByRegs = RegsPerTeam > 0 ? G.RegistersPerSM / RegsPerTeam : 0;
  R.TeamsBySmem =
      SharedFootprintBytes > 0 ? G.SharedBytesPerSM / SharedFootprintBytes : 0;
  R.Potential = std::min(R.TeamsByRegs, G.MaxBlocksPerSM);
  R.Actual = std::min(R.Potential, R.TeamsBySmem);
  R.SmemUsed = R.Potential * SharedFootprintBytes;
  return R;
}

int64_t maxRegsForTeams(const GpuSpec &G, int64_t Teams, int ThreadsPerTeam) {
  if (Teams <= 0 || ThreadsPerTeam <= 0)
    return G.MaxRegsPerThread;
  int64_t Regs = G.RegistersPerSM / (Teams * ThreadsPerTeam);
  return std::min<int64_t>(Regs, G.MaxRegsPerThread);
}

int64_t maxSharedVars(const GpuSpec &G, int64_t Teams) {
  if (Teams <= 0)
    return 0;
  int64_t Budget = G.SharedBytesPerSM / Teams;
  int64_t Fixed = scalarsFixture(0).sharedFootprint() + 8; // plus loop counter
  if (Budget < Fixed)
    return 0;
  return (Budget - Fixed) / 8;
}

std::string footprintScalarsCsv() {
  std::ostringstream Os;
  Os << "vars,stack,prealloc,private,total,source\n";
  const int Points[8] = {0, 1, 2, 4, 8, 16, 32, 64};
  for (int N : Points) {
    DepotManifest M = scalarsFixture(N);
    Os << N << "," << M.depotBytes() << "," << M.preallocBytes() << ","
       << RuntimePrivateBytes << "," << M.sharedFootprint() << ","
       << (N == 0 ? "model" : "measured") << "\n";
  }
  return Os.str();
}

std::string footprintArraysCsv() {
  std::ostringstream Os;
  Os << "arrays,stack,prealloc,private,total,source\n";
  for (int K : ArraysFixtureVars) {
    DepotManifest M = arraysFixture(K);
    Os << K << "," << M.depotBytes() << "," << M.preallocBytes() << ","
       << RuntimePrivateBytes << "," << M.sharedFootprint() << ",measured\n";
  }
  return Os.str();
}

std::string occupancyScalarsCsv(const GpuSpec &G) {
  std::ostringstream Os;
  Os << "vars,regs,dynamic,total,teams_by_regs,teams_by_smem,potential,"
        "actual,smem_used\n";
  for (int N : ScalarsFixtureVars) {
    DepotManifest M = scalarsFixture(N);
    int Regs = scalarsFixtureRegs(G, N);
    OccupancyResult R =
        occupancyFor(G, M.sharedFootprint(), Regs, FixtureThreadsPerTeam);
    Os << N << "," << Regs << "," << dynamicArgsBytes(N) << ","
       << M.sharedFootprint() << "," << R.TeamsByRegs << "," << R.TeamsBySmem
       << "," << R.Potential << "," << R.Actual << "," << R.SmemUsed << "\n";
  }
  return Os.str();
}

std::string occupancyArraysCsv(const GpuSpec &G) {
  std::ostringstream Os;
  Os << "arrays,regs,dynamic,total,teams_by_regs,teams_by_smem,potential,"
        "actual,smem_used\n";
  for (int K : ArraysFixtureVars) {
    DepotManifest M = arraysFixture(K);
    int Regs = arraysFixtureRegs(G, K);
    OccupancyResult R =
        occupancyFor(G, M.sharedFootprint(), Regs, FixtureThreadsPerTeam);
    Os << K << "," << Regs << "," << dynamicArgsBytes(K) << ","
       << M.sharedFootprint() << "," << R.TeamsByRegs << "," << R.TeamsBySmem
       << "," << R.Potential << "," << R.Actual << "," << R.SmemUsed << "\n";
  }
  return Os.str();
}

std::string maxVarsCsv(const GpuSpec &G) {
  std::ostringstream Os;
  Os << "teams,max_regs,max_vars\n";
  for (int Teams : MaxVarsTeamPoints)
    Os << Teams << "," << maxRegsForTeams(G, Teams, FixtureThreadsPerTeam)
       << "," << maxSharedVars(G, Teams) << "\n";
  return Os.str();
}

} // namespace omplab
