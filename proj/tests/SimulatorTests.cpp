//===--- SimulatorTests.cpp - Execution model tests -------------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/SequentialOracle.h"
#include "omplab/Simulator.h"
#include "support/ProgramGen.h"
#include "support/TestUtil.h"

#include <doctest.h>

using namespace omplab;
using namespace omplab::test;

namespace {

SimResult simProgram(const std::string &Stem, SimOptions Opts = {}) {
  CompileResult R = compileProgram(Stem);
  REQUIRE(R.Ok);
  return simulate(R.Machine, Opts);
}

/// Simulate and interpret at the same launch, then compare every global.
void checkAgainstOracle(const std::string &Source, const std::string &Stem,
                        int Teams, int Workers) {
  CompileResult C = compileSource(Source, Stem, {});
  REQUIRE(C.Ok);
  SimOptions SO;
  SO.Teams = Teams;
  SO.Workers = Workers;
  SimResult S = simulate(C.Machine, SO);
  REQUIRE_MESSAGE(S.ok(), S.TrapReason);

  OracleOptions OO;
  OO.Teams = Teams;
  OO.Workers = Workers;
  OracleResult O = runSequentialOracle(*C.Ast, OO);
  REQUIRE_MESSAGE(O.ok(), O.Error);

  CHECK(S.FinalGlobals == O.Globals);
}

} // namespace

TEST_CASE("a captured scalar reaches every worker in every team") {
  SimOptions Opts;
  Opts.Teams = 2;
  Opts.Workers = 8;
  SimResult R = simProgram("shared_scalar", Opts);
  REQUIRE_MESSAGE(R.ok(), R.TrapReason);
  REQUIRE(R.FinalGlobals.count("a") == 1);
  CHECK(R.FinalGlobals.at("a") == std::vector<int64_t>(16, 1));
  CHECK(R.Stats.Teams == 2);
  CHECK(R.Stats.LaunchedTeamSize == 40);
}

TEST_CASE("host firstprivate values survive the trip into a region") {
  SimResult R = simProgram("firstprivate");
  REQUIRE_MESSAGE(R.ok(), R.TrapReason);
  CHECK(R.FinalGlobals.at("a") == std::vector<int64_t>(8, 4));
}

TEST_CASE("sequential updates between regions are visible to the next region") {
  SimResult R = simProgram("two_regions");
  REQUIRE_MESSAGE(R.ok(), R.TrapReason);
  CHECK(R.FinalGlobals.at("a") == std::vector<int64_t>(8, 3));
}

TEST_CASE("masters pay exactly two barriers per region") {
  for (auto [Stem, PerTeam] : {std::pair<const char *, int64_t>{"seq_only", 0},
                               {"shared_scalar", 2},
                               {"two_regions", 4},
                               {"mixed_captures", 2}}) {
    CAPTURE(Stem);
    SimResult R = simProgram(Stem);
    REQUIRE_MESSAGE(R.ok(), R.TrapReason);
    for (int T = 0; T < R.Stats.Teams; ++T)
      CHECK(R.Stats.masterBarrierEntries(T) == PerTeam);
  }
}

TEST_CASE("deactivated warp lanes never enter a barrier") {
  SimResult R = simProgram("shared_scalar");
  REQUIRE_MESSAGE(R.ok(), R.TrapReason);
  const int Launched = R.Stats.LaunchedTeamSize;
  const int Workers = R.Stats.RequestedWorkers;
  for (int T = 0; T < R.Stats.Teams; ++T)
    for (int Tid = Workers + 1; Tid < Launched; ++Tid)
      CHECK(R.Stats.BarrierEntries[T][Tid] == 0);
}

TEST_CASE("teams do not share captured scalars or depots") {
  // Each team adds its own capture sum; any cross-team bleed would double it.
  checkAgainstOracle(readProgram("scalars_4"), "scalars_4", 2, 8);
  SimResult R = simProgram("scalars_4");
  REQUIRE(R.ok());
  CHECK(R.FinalGlobals.at("a") == std::vector<int64_t>(16, 10));
}

TEST_CASE("dynamic shared-args blocks are freed at region end") {
  SimResult R = simProgram("scalars_32");
  REQUIRE_MESSAGE(R.ok(), R.TrapReason);
  CHECK(R.Stats.DynamicAllocs == 2); // one per team
  CHECK(R.Stats.DynamicFrees == 2);
  CHECK(R.Stats.leakedBlocks() == 0);
  CHECK(R.Stats.DynamicAllocBytes == 2 * 256);

  SimResult Small = simProgram("scalars_16");
  REQUIRE(Small.ok());
  CHECK(Small.Stats.DynamicAllocBytes == 0);
}

TEST_CASE("global overrides seed the initial mapped values") {
  SimOptions Opts;
  Opts.GlobalOverrides["a"] = {5}; // fills the array
  SimResult R = simProgram("shared_scalar", Opts);
  REQUIRE_MESSAGE(R.ok(), R.TrapReason);
  CHECK(R.FinalGlobals.at("a") == std::vector<int64_t>(16, 6));
}

TEST_CASE("an exhausted device heap traps the launch") {
  SimOptions Opts;
  Opts.Rt.FailDynamicAlloc = true;
  SimResult R = simProgram("scalars_32", Opts);
  REQUIRE(R.Trapped);
  CHECK(R.TrapReason == "shared-args-alloc-failed");
}

TEST_CASE("out-of-range mapped indices trap instead of corrupting") {
  // scalars_1 writes a[team*8+tid] into a[16]; four teams overrun it.
  SimOptions Opts;
  Opts.Teams = 4;
  Opts.Workers = 8;
  SimResult R = simProgram("scalars_1", Opts);
  REQUIRE(R.Trapped);
  CHECK(R.TrapReason.find("out-of-bounds") != std::string::npos);
}

TEST_CASE("runaway launches hit the step limit") {
  SimOptions Opts;
  Opts.StepLimit = 50;
  SimResult R = simProgram("shared_scalar", Opts);
  REQUIRE(R.Trapped);
  CHECK(R.TrapReason == "step limit exceeded");
}

TEST_CASE("the miscompiled pass order is observable in the output") {
  CompileOptions Bad;
  Bad.Pipeline = PipelineKind::BadOrderDemo;
  CompileResult C = compileProgram("coloring_demo", Bad);
  REQUIRE(C.Ok);

  // With layout validation on, the launch refuses to run.
  SimResult Guarded = simulate(C.Machine, {});
  REQUIRE(Guarded.Trapped);
  CHECK(Guarded.TrapReason.find("layout-overlap") != std::string::npos);

  // With validation off the wrong value flows: the master's private t=7
  // lands in the slot workers read c from.
  SimOptions Opts;
  Opts.ValidateLayout = false;
  SimResult Wrong = simulate(C.Machine, Opts);
  REQUIRE_MESSAGE(Wrong.ok(), Wrong.TrapReason);
  CHECK(Wrong.FinalGlobals.at("a") == std::vector<int64_t>(8, 7));

  // The very same program, correctly ordered, writes ones.
  SimResult Good = simProgram("coloring_demo");
  REQUIRE(Good.ok());
  CHECK(Good.FinalGlobals.at("a") == std::vector<int64_t>(8, 1));
}

TEST_CASE("per-team runtime event logs start with init and end with deinit") {
  SimResult R = simProgram("two_regions");
  REQUIRE(R.ok());
  REQUIRE(R.TeamEvents.size() == 1);
  const auto &Events = R.TeamEvents[0];
  REQUIRE(Events.size() >= 2);
  CHECK(Events.front().K == RuntimeEvent::Init);
  CHECK(Events.back().K == RuntimeEvent::Deinit);
  int Prepares = 0;
  for (const auto &E : Events)
    if (E.K == RuntimeEvent::PreparePrealloc ||
        E.K == RuntimeEvent::PrepareDynamic)
      ++Prepares;
  CHECK(Prepares == 2);
}

TEST_CASE("simulation matches the interpreter on the whole corpus") {
  for (const char *Stem :
       {"shared_scalar", "private_inner", "mixed_captures", "seq_only",
        "firstprivate", "two_regions", "coloring_demo", "scalars_1",
        "scalars_8", "scalars_64", "arrays_1", "arrays_3"}) {
    CAPTURE(Stem);
    CompileResult C = compileProgram(Stem);
    REQUIRE(C.Ok);
    SimResult S = simulate(C.Machine, {});
    REQUIRE_MESSAGE(S.ok(), S.TrapReason);
    OracleResult O = runSequentialOracle(*C.Ast, {});
    REQUIRE_MESSAGE(O.ok(), O.Error);
    CHECK(S.FinalGlobals == O.Globals);
  }
}

TEST_CASE("simulation matches the interpreter on random programs") {
  auto Corpus = generateCorpus(25, corpusSeed());
  for (const auto &P : Corpus) {
    CAPTURE(P.Name);
    CAPTURE(P.Source);
    checkAgainstOracle(P.Source, P.Name, P.Teams, P.Workers);
  }
}

TEST_CASE("trace lines carry team, thread, function, and block") {
  SimOptions Opts;
  Opts.Trace = true;
  SimResult R = simProgram("seq_only", Opts);
  REQUIRE(R.ok());
  REQUIRE_FALSE(R.TraceLines.empty());
  CHECK(R.TraceLines[0].find("t0.") == 0);
  CHECK(R.TraceLines[0].find("__omp_offload_seq_only") != std::string::npos);
}
