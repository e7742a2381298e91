//===--- omplab.cpp - Command-line driver ----------------------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Verbs: compile, run, trace, occupancy, tables.
// Exit codes: 0 success, 2 diagnostics, 3 simulator trap, 4 oracle mismatch.
//
//===----------------------------------------------------------------------===//

#include "omplab/Compiler.h"
#include "omplab/IRParser.h"
#include "omplab/IRPrinter.h"
#include "omplab/Occupancy.h"
#include "omplab/SequentialOracle.h"
#include "omplab/Simulator.h"
#include "omplab/Verifier.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace omplab;
namespace fs = std::filesystem;

namespace {

constexpr int ExitOk = 0;
constexpr int ExitDiags = 2;
constexpr int ExitTrap = 3;
constexpr int ExitMismatch = 4;

bool readFile(const std::string &Path, std::string &Out) {
  std::ifstream In(Path, std::ios::binary);
  if (!In)
    return false;
  std::ostringstream Ss;
  Ss << In.rdbuf();
  Out = Ss.str();
  return true;
}

bool writeFile(const std::string &Path, const std::string &Text) {
  std::ofstream OutF(Path, std::ios::binary);
  if (!OutF)
    return false;
  OutF << Text;
  return OutF.good();
}

std::string stemOf(const std::string &Path) {
  return fs::path(Path).stem().string();
}

PipelineKind pipelineFromName(const std::string &Name, bool &Ok) {
  Ok = true;
  if (Name == "default")
    return PipelineKind::Default;
  if (Name == "O0")
    return PipelineKind::O0;
  if (Name == "bad-order")
    return PipelineKind::BadOrderDemo;
  Ok = false;
  return PipelineKind::Default;
}

bool parseSetOption(const std::vector<std::string> &Sets,
                    std::map<std::string, std::vector<int64_t>> &Out,
                    std::string &Err) {
  for (const std::string &S : Sets) {
    size_t Eq = S.find('=');
    if (Eq == std::string::npos || Eq == 0) {
      Err = "--set expects name=v0,v1,...";
      return false;
    }
    std::string Name = S.substr(0, Eq);
    std::vector<int64_t> Vals;
    std::stringstream Ss(S.substr(Eq + 1));
    std::string Item;
    while (std::getline(Ss, Item, ',')) {
      try {
        Vals.push_back(std::stoll(Item));
      } catch (...) {
        Err = "--set " + Name + ": '" + Item + "' is not an integer";
        return false;
      }
    }
    if (Vals.empty()) {
      Err = "--set " + Name + ": no values";
      return false;
    }
    Out[Name] = std::move(Vals);
  }
  return true;
}

std::string joinCsv(const std::vector<int64_t> &Vals) {
  std::string S;
  for (size_t J = 0; J < Vals.size(); ++J) {
    if (J)
      S += ",";
    S += std::to_string(Vals[J]);
  }
  return S;
}

const GpuSpec *resolveGpu(std::string Name, std::string &Err) {
  if (Name.empty()) {
    if (const char *Env = std::getenv("OMPLAB_GPU"))
      Name = Env;
    else
      Name = DefaultGpuName;
  }
  const GpuSpec *G = findGpu(Name);
  if (!G) {
    Err = "unknown GPU '" + Name + "'; known:";
    for (const GpuSpec &K : knownGpus())
      Err += " " + K.Name;
  }
  return G;
}

struct CompileArgs {
  std::string Input;
  std::string OutDir = ".";
  std::string Pipeline = "default";
  std::string DumpAfter;
  bool DumpAst = false;
  int PreallocEntries = DefaultPreallocEntries;
};

int doCompile(const CompileArgs &Args, CompileResult &R) {
  std::string Text;
  if (!readFile(Args.Input, Text)) {
    std::cerr << "error: cannot read " << Args.Input << "\n";
    return ExitDiags;
  }
  bool KindOk = false;
  CompileOptions Opts;
  Opts.Pipeline = pipelineFromName(Args.Pipeline, KindOk);
  if (!KindOk) {
    std::cerr << "error: unknown pipeline '" << Args.Pipeline << "'\n";
    return ExitDiags;
  }
  Opts.DumpAst = Args.DumpAst;
  Opts.DumpAfter = Args.DumpAfter;
  Opts.PreallocEntries = Args.PreallocEntries;

  R = compileSource(Text, stemOf(Args.Input), Opts);
  if (!R.AstJson.empty())
    std::cout << R.AstJson;
  for (const auto &KV : R.Dumps)
    std::cout << KV.second;
  if (!R.Ok) {
    std::cerr << formatDiags(R.Diags);
    return ExitDiags;
  }
  return ExitOk;
}

int cmdCompile(const CompileArgs &Args) {
  CompileResult R;
  int Rc = doCompile(Args, R);
  if (Rc != ExitOk)
    return Rc;
  fs::path Dir(Args.OutDir);
  std::error_code Ec;
  fs::create_directories(Dir, Ec);
  std::string SirPath = (Dir / (R.KernelStem + ".sir")).string();
  std::string ManPath = (Dir / (R.KernelStem + ".manifest.json")).string();
  if (!writeFile(SirPath, printModule(R.Machine)) ||
      !writeFile(ManPath, manifestJson(R.Machine, Args.PreallocEntries))) {
    std::cerr << "error: cannot write outputs under " << Args.OutDir << "\n";
    return ExitDiags;
  }
  std::cout << "wrote " << SirPath << "\n";
  std::cout << "wrote " << ManPath << "\n";
  return ExitOk;
}

struct RunArgs {
  std::string Input;
  std::string Pipeline = "default";
  int Teams = -1;
  int Workers = -1;
  int PreallocEntries = DefaultPreallocEntries;
  std::vector<std::string> Sets;
  std::string OracleSource;
  bool Trace = false;
  bool NoValidateLayout = false;
};

int cmdRun(const RunArgs &Args) {
  Module M;
  std::optional<ProgramAst> Ast;

  if (fs::path(Args.Input).extension() == ".sir") {
    std::string Text;
    if (!readFile(Args.Input, Text)) {
      std::cerr << "error: cannot read " << Args.Input << "\n";
      return ExitDiags;
    }
    IRParseResult P = parseModule(Text);
    if (!P.ok()) {
      std::cerr << formatDiags(P.Diags);
      return ExitDiags;
    }
    DiagList VDs = validate(*P.M);
    if (!VDs.empty()) {
      std::cerr << formatDiags(VDs);
      return ExitDiags;
    }
    M = std::move(*P.M);
  } else {
    CompileArgs CA;
    CA.Input = Args.Input;
    CA.Pipeline = Args.Pipeline;
    CA.PreallocEntries = Args.PreallocEntries;
    CompileResult R;
    int Rc = doCompile(CA, R);
    if (Rc != ExitOk)
      return Rc;
    M = std::move(R.Machine);
    Ast = std::move(R.Ast);
  }

  SimOptions Opts;
  Opts.Teams = Args.Teams;
  Opts.Workers = Args.Workers;
  Opts.Rt.PreallocEntries = Args.PreallocEntries;
  Opts.Trace = Args.Trace;
  Opts.ValidateLayout = !Args.NoValidateLayout;
  std::string Err;
  if (!parseSetOption(Args.Sets, Opts.GlobalOverrides, Err)) {
    std::cerr << "error: " << Err << "\n";
    return ExitDiags;
  }

  SimResult Res = simulate(M, Opts);
  for (const std::string &Line : Res.TraceLines)
    std::cout << Line << "\n";
  if (Res.Trapped) {
    std::cerr << "trap: " << Res.TrapReason;
    if (Res.TrapTeam >= 0)
      std::cerr << " (team " << Res.TrapTeam << ", thread " << Res.TrapThread
                << ")";
    std::cerr << "\n";
    return ExitTrap;
  }

  std::cout << "launch: teams=" << Res.Stats.Teams
            << " workers=" << Res.Stats.RequestedWorkers
            << " team-size=" << Res.Stats.LaunchedTeamSize << "\n";
  std::cout << "steps: " << Res.Stats.Steps << "\n";
  for (int Tm = 0; Tm < Res.Stats.Teams; ++Tm)
    std::cout << "team " << Tm
              << ": master-barriers=" << Res.Stats.masterBarrierEntries(Tm)
              << " releases=" << Res.Stats.BarrierReleases[Tm] << "\n";
  std::cout << "shared-args: dynamic-allocs=" << Res.Stats.DynamicAllocs
            << " dynamic-frees=" << Res.Stats.DynamicFrees
            << " leaked=" << Res.Stats.leakedBlocks()
            << " bytes=" << Res.Stats.DynamicAllocBytes << "\n";
  for (const auto &KV : Res.FinalGlobals)
    std::cout << "global " << KV.first << " = " << joinCsv(KV.second) << "\n";

  std::string OracleSrc = Args.OracleSource;
  if (!OracleSrc.empty()) {
    if (!Ast) {
      std::string Text;
      if (!readFile(OracleSrc, Text)) {
        std::cerr << "error: cannot read " << OracleSrc << "\n";
        return ExitDiags;
      }
      DslParseResult P = parseDsl(Text);
      if (!P.ok()) {
        std::cerr << formatDiags(P.Diags);
        return ExitDiags;
      }
      Ast = std::move(P.Ast);
    }
    OracleOptions OOpts;
    OOpts.Teams = Args.Teams;
    OOpts.Workers = Args.Workers;
    OOpts.GlobalOverrides = Opts.GlobalOverrides;
    OracleResult O = runSequentialOracle(*Ast, OOpts);
    if (O.Failed) {
      std::cerr << "oracle failed: " << O.Error << "\n";
      return ExitMismatch;
    }
    for (const auto &KV : O.Globals) {
      auto It = Res.FinalGlobals.find(KV.first);
      if (It == Res.FinalGlobals.end() || It->second != KV.second) {
        std::cerr << "oracle mismatch on " << KV.first << ":\n";
        std::cerr << "  simulator: "
                  << (It == Res.FinalGlobals.end() ? std::string("<missing>")
                                                   : joinCsv(It->second))
                  << "\n";
        std::cerr << "  oracle:    " << joinCsv(KV.second) << "\n";
        return ExitMismatch;
      }
    }
    std::cout << "oracle: match\n";
  }
  return ExitOk;
}

struct OccArgs {
  int Vars = -1;
  int Arrays = -1;
  std::string Manifest;
  int Regs = -1;
  int Threads = FixtureThreadsPerTeam;
  std::string Gpu;
  bool Json = false;
};

int cmdOccupancy(const OccArgs &Args) {
  std::string Err;
  const GpuSpec *G = resolveGpu(Args.Gpu, Err);
  if (!G) {
    std::cerr << "error: " << Err << "\n";
    return ExitDiags;
  }

  int64_t Footprint = 0;
  int Regs = Args.Regs;
  int Sources = (Args.Vars >= 0) + (Args.Arrays >= 0) + !Args.Manifest.empty();
  if (Sources != 1) {
    std::cerr << "error: pass exactly one of --vars, --arrays, --manifest\n";
    return ExitDiags;
  }
  if (Args.Vars >= 0) {
    Footprint = scalarsFixture(Args.Vars).sharedFootprint();
    if (Regs < 0)
      Regs = scalarsFixtureRegs(*G, Args.Vars);
  } else if (Args.Arrays >= 0) {
    Footprint = arraysFixture(Args.Arrays).sharedFootprint();
    if (Regs < 0)
      Regs = arraysFixtureRegs(*G, Args.Arrays);
  } else {
    std::string Text;
    if (!readFile(Args.Manifest, Text)) {
      std::cerr << "error: cannot read " << Args.Manifest << "\n";
      return ExitDiags;
    }
    nlohmann::json J = nlohmann::json::parse(Text, nullptr, false);
    if (J.is_discarded() || !J.contains("shared_footprint")) {
      std::cerr << "error: " << Args.Manifest
                << " is not a kernel manifest (no shared_footprint)\n";
      return ExitDiags;
    }
    Footprint = J["shared_footprint"].get<int64_t>();
    if (Regs < 0) {
      std::cerr << "error: --manifest needs --regs\n";
      return ExitDiags;
    }
  }

  OccupancyResult R = occupancyFor(*G, Footprint, Regs, Args.Threads);
  if (Args.Json) {
    nlohmann::json J;
    J["gpu"] = G->Name;
    J["shared_footprint"] = Footprint;
    J["regs_per_thread"] = Regs;
    J["threads_per_team"] = Args.Threads;
    J["teams_by_regs"] = R.TeamsByRegs;
    J["teams_by_smem"] = R.TeamsBySmem;
    J["potential"] = R.Potential;
    J["actual"] = R.Actual;
    J["smem_used"] = R.SmemUsed;
    std::cout << J.dump(2) << "\n";
  } else {
    std::cout << "gpu: " << G->Name << " (smem=" << G->SharedBytesPerSM
              << "B, regs=" << G->RegistersPerSM
              << ", max-blocks=" << G->MaxBlocksPerSM << ")\n";
    std::cout << "per-team shared footprint: " << Footprint << " bytes\n";
    std::cout << "regs/thread: " << Regs << ", threads/team: " << Args.Threads
              << "\n";
    std::cout << "teams by registers: " << R.TeamsByRegs << "\n";
    std::cout << "teams by shared memory: " << R.TeamsBySmem << "\n";
    std::cout << "potential teams (regs+blocks): " << R.Potential << "\n";
    std::cout << "actual teams: " << R.Actual << "\n";
    std::cout << "shared memory at potential: " << R.SmemUsed << " bytes\n";
  }
  return ExitOk;
}

struct TablesArgs {
  bool FootprintScalars = false;
  bool FootprintArrays = false;
  bool Scalars = false;
  bool Arrays = false;
  bool MaxVars = false;
  bool All = false;
  std::string OutDir;
  std::string Gpu;
};

int cmdTables(const TablesArgs &Args) {
  std::string Err;
  const GpuSpec *G = resolveGpu(Args.Gpu, Err);
  if (!G) {
    std::cerr << "error: " << Err << "\n";
    return ExitDiags;
  }
  std::vector<std::pair<std::string, std::string>> Tables;
  if (Args.FootprintScalars || Args.All)
    Tables.push_back({"footprint_scalars.csv", footprintScalarsCsv()});
  if (Args.FootprintArrays || Args.All)
    Tables.push_back({"footprint_arrays.csv", footprintArraysCsv()});
  if (Args.Scalars || Args.All)
    Tables.push_back({"occupancy_scalars_" + G->Name + ".csv",
                      occupancyScalarsCsv(*G)});
  if (Args.Arrays || Args.All)
    Tables.push_back(
        {"occupancy_arrays_" + G->Name + ".csv", occupancyArraysCsv(*G)});
  if (Args.MaxVars || Args.All)
    Tables.push_back({"max_vars_" + G->Name + ".csv", maxVarsCsv(*G)});
  if (Tables.empty()) {
    std::cerr << "error: pick a table (--footprint-scalars, "
                 "--footprint-arrays, --scalars, --arrays, --max-vars, "
                 "--all)\n";
    return ExitDiags;
  }
  if (Args.OutDir.empty()) {
    for (const auto &KV : Tables) {
      std::cout << "# " << KV.first << "\n";
      std::cout << KV.second;
    }
    return ExitOk;
  }
  fs::path Dir(Args.OutDir);
  std::error_code Ec;
  fs::create_directories(Dir, Ec);
  for (const auto &KV : Tables) {
    std::string Path = (Dir / KV.first).string();
    if (!writeFile(Path, KV.second)) {
      std::cerr << "error: cannot write " << Path << "\n";
      return ExitDiags;
    }
    std::cout << "wrote " << Path << "\n";
  }
  return ExitOk;
}

} // namespace

int main(int Argc, char **Argv) {
  CLI::App App{"offload kernel compiler, simulator, and occupancy model"};
  App.require_subcommand(1);

  CompileArgs CA;
  CLI::App *Compile =
      App.add_subcommand("compile", "compile a source kernel to .sir");
  Compile->add_option("input", CA.Input, "source kernel (.ompk)")->required();
  Compile->add_option("-o,--out-dir", CA.OutDir, "output directory");
  Compile->add_option("--pipeline", CA.Pipeline,
                      "frame pipeline: default or O0");
  Compile->add_option("--dump-after", CA.DumpAfter,
                      "print the module after a stage (frontend, codegen, or "
                      "a pass name)");
  Compile->add_flag("--dump-ast", CA.DumpAst, "print the AST as JSON");
  Compile->add_option("--prealloc-entries", CA.PreallocEntries,
                      "entries in the preallocated shared-args list");

  RunArgs RA;
  CLI::App *Run = App.add_subcommand("run", "compile and simulate a kernel");
  Run->add_option("input", RA.Input, "source kernel (.ompk) or module (.sir)")
      ->required();
  Run->add_option("--pipeline", RA.Pipeline, "frame pipeline: default or O0");
  Run->add_option("--teams", RA.Teams, "team count");
  Run->add_option("--workers", RA.Workers, "workers per team");
  Run->add_option("--prealloc-entries", RA.PreallocEntries,
                  "entries in the preallocated shared-args list");
  Run->add_option("--set", RA.Sets, "override a mapped buffer: name=v0,v1,...");
  Run->add_option("--check-oracle", RA.OracleSource,
                  "compare the final mapped state against the reference "
                  "interpreter for this source");
  Run->add_flag("--trace", RA.Trace, "print every executed instruction");
  Run->add_flag("--no-validate-layout", RA.NoValidateLayout,
                "skip the pre-run depot layout audit");

  RunArgs TA;
  CLI::App *Trace = App.add_subcommand("trace", "run with tracing enabled");
  Trace->add_option("input", TA.Input, "source kernel (.ompk) or module (.sir)")
      ->required();
  Trace->add_option("--pipeline", TA.Pipeline, "frame pipeline: default or O0");
  Trace->add_option("--teams", TA.Teams, "team count");
  Trace->add_option("--workers", TA.Workers, "workers per team");

  OccArgs OA;
  CLI::App *Occ =
      App.add_subcommand("occupancy", "teams-per-SM for a kernel footprint");
  Occ->add_option("--vars", OA.Vars, "scalar-fixture kernel with N variables");
  Occ->add_option("--arrays", OA.Arrays, "array-fixture kernel with K arrays");
  Occ->add_option("--manifest", OA.Manifest, "kernel manifest JSON");
  Occ->add_option("--regs", OA.Regs, "registers per thread");
  Occ->add_option("--threads", OA.Threads, "threads per team");
  Occ->add_option("--gpu", OA.Gpu, "GPU spec name (or OMPLAB_GPU)");
  Occ->add_flag("--json", OA.Json, "emit JSON");

  TablesArgs TB;
  CLI::App *Tables = App.add_subcommand("tables", "emit the model CSV tables");
  Tables->add_flag("--footprint-scalars", TB.FootprintScalars,
                   "per-team footprint vs scalar count");
  Tables->add_flag("--footprint-arrays", TB.FootprintArrays,
                   "per-team footprint vs array count");
  Tables->add_flag("--scalars", TB.Scalars, "occupancy for the scalar fixtures");
  Tables->add_flag("--arrays", TB.Arrays, "occupancy for the array fixtures");
  Tables->add_flag("--max-vars", TB.MaxVars,
                   "shared variables per team vs team count");
  Tables->add_flag("--all", TB.All, "every table");
  Tables->add_option("-o,--out-dir", TB.OutDir, "write CSV files here");
  Tables->add_option("--gpu", TB.Gpu, "GPU spec name (or OMPLAB_GPU)");

  // The miscompile-ordering demo stays available but undocumented.
  for (CLI::App *Sub : {Compile, Run, Trace})
    for (CLI::Option *O : Sub->get_options())
      if (O->get_name() == "--pipeline")
        O->check(CLI::IsMember({"default", "O0", "bad-order"}));

  try {
    App.parse(Argc, Argv);
  } catch (const CLI::CallForHelp &E) {
    return App.exit(E);
  } catch (const CLI::ParseError &E) {
    App.exit(E);
    return ExitDiags;
  }

  if (*Compile)
    return cmdCompile(CA);
  if (*Run)
    return cmdRun(RA);
  if (*Trace) {
    TA.Trace = true;
    return cmdRun(TA);
  }
  if (*Occ)
    return cmdOccupancy(OA);
  if (*Tables)
    return cmdTables(TB);
  return ExitDiags;
}
