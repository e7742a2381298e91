//===--- Simulator.cpp - Machine-form execution model ---------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/Simulator.h"

#include "omplab/Codegen.h"
#include "omplab/IRPrinter.h"
#include "omplab/LoweringPasses.h"

#include <cassert>
#include <memory>

namespace omplab {
namespace {

constexpr uint64_t LocalRangeBase = 0x100000000000ull;
constexpr uint64_t SharedRangeBase = 0x200000000000ull;
constexpr uint64_t GlobalRangeBase = 0x400000000000ull;
constexpr uint64_t FnRangeBase = 0x700000000000ull;
constexpr uint64_t LocalStride = 1ull << 20;
constexpr uint64_t SharedStride = 1ull << 20;
constexpr int64_t HeapCapacity = 1ll << 20;
constexpr uint64_t NullGuard = 0x10000;

int64_t signExtend(uint64_t Raw, int64_t Bytes) {
  if (Bytes >= 8)
    return static_cast<int64_t>(Raw);
  uint64_t Bit = 1ull << (Bytes * 8 - 1);
  uint64_t Mask = (1ull << (Bytes * 8)) - 1;
  Raw &= Mask;
  return static_cast<int64_t>((Raw ^ Bit) - Bit);
}

uint64_t canonical(uint64_t Raw, const Type &Ty) {
  if (!Ty.isInt())
    return Raw;
  return static_cast<uint64_t>(signExtend(Raw, Ty.sizeBytes()));
}

struct Activation {
  const Function *F = nullptr;
  size_t Block = 0;
  size_t Instr = 0;
  std::map<std::string, uint64_t> Regs;
};

struct ThreadState {
  int Team = 0;
  int Tid = 0;
  int GlobalIdx = 0;
  bool Live = true;
  bool AtBarrier = false;
  int64_t SPOff = 0;
  std::vector<Activation> Stack;
  // Group root -> (frame offset in the local arena, active member count).
  std::map<std::string, std::pair<int64_t, int>> GroupFrames;
};

class SimContext;

class CtxHeap : public SharedArgsAllocator {
public:
  explicit CtxHeap(SimContext &C) : C(C) {}
  uint64_t allocate(int64_t Bytes) override;
  void release(uint64_t Addr) override;

private:
  SimContext &C;
};

class SimContext {
public:
  SimContext(const Module &M, const SimOptions &Opts)
      : M(M), Opts(Opts), Heap(*this) {}

  SimResult run();

  uint64_t heapAlloc(int64_t Bytes);
  void heapFree(uint64_t Addr);

private:
  const Module &M;
  SimOptions Opts;
  CtxHeap Heap;
  SimResult R;

  int Teams = 1;
  int Workers = 32;
  int Launched = 64;
  int MasterTid = 32;

  std::map<std::string, std::map<std::string, size_t>> BlockIdx;
  std::map<std::string, uint64_t> FnAddr;
  std::map<uint64_t, const Function *> FnByAddr;
  std::map<std::string, std::string> GroupRootOf;
  std::map<std::string, const DepotLayout *> LayoutByRoot;
  const DepotLayout *KernelLayout = nullptr;
  std::string KernelGroupRoot;
  int64_t SharedRegionSize = 0;
  int64_t PreallocOff = 0;

  std::vector<std::vector<uint8_t>> LocalMem;
  std::vector<std::vector<uint8_t>> SharedMem;
  std::vector<uint8_t> GlobalMem;
  struct GExtent {
    uint64_t Start = 0;
    int64_t Size = 0;
    const GlobalVar *G = nullptr;
  };
  std::vector<GExtent> GlobalExtents;
  int64_t HeapStartOff = 0;
  int64_t HeapNextOff = 0;
  std::map<uint64_t, std::pair<int64_t, bool>> HeapBlocks;

  std::vector<std::unique_ptr<TeamRuntime>> Runtimes;
  std::vector<ThreadState> Threads;

  bool setup();
  bool setupGlobals();
  bool trap(const ThreadState *T, const std::string &Reason);
  uint64_t sharedBase(int Team) const {
    return SharedRangeBase + static_cast<uint64_t>(Team) * SharedStride;
  }
  uint64_t localBase(int GlobalIdx) const {
    return LocalRangeBase + static_cast<uint64_t>(GlobalIdx) * LocalStride;
  }

  uint8_t *resolve(ThreadState &T, uint64_t Addr, int64_t Bytes,
                   std::string &Err);
  bool loadBytes(ThreadState &T, uint64_t Addr, int64_t Bytes, uint64_t &Out);
  bool storeBytes(ThreadState &T, uint64_t Addr, int64_t Bytes, uint64_t Val);

  bool regValue(ThreadState &T, Activation &A, const Value &V, uint64_t &Out);
  bool pushActivation(ThreadState &T, const Function *F,
                      const std::vector<uint64_t> &Args);
  void popActivation(ThreadState &T);
  bool step(ThreadState &T);
  bool execCall(ThreadState &T, Activation &A, const Instruction &I);
  bool execBuiltin(ThreadState &T, Activation &A, const Instruction &I,
                   const std::string &Callee, const std::vector<uint64_t> &Args);
  void checkBarrierRelease(int Team);
  void readBackGlobals();
};

uint64_t CtxHeap::allocate(int64_t Bytes) { return C.heapAlloc(Bytes); }
void CtxHeap::release(uint64_t Addr) { C.heapFree(Addr); }

uint64_t SimContext::heapAlloc(int64_t Bytes) {
  int64_t Need = (Bytes + 7) & ~int64_t{7};
  if (HeapNextOff + Need > HeapStartOff + HeapCapacity)
    return 0;
  uint64_t Addr = GlobalRangeBase + static_cast<uint64_t>(HeapNextOff);
  HeapBlocks[Addr] = {Need, true};
  HeapNextOff += Need;
  if (static_cast<int64_t>(GlobalMem.size()) < HeapNextOff)
    GlobalMem.resize(HeapNextOff, 0);
  return Addr;
}

void SimContext::heapFree(uint64_t Addr) {
  auto It = HeapBlocks.find(Addr);
  if (It != HeapBlocks.end())
    It->second.second = false;
}

bool SimContext::trap(const ThreadState *T, const std::string &Reason) {
  if (R.Trapped)
    return false;
  R.Trapped = true;
  R.TrapReason = Reason;
  if (T) {
    R.TrapTeam = T->Team;
    R.TrapThread = T->Tid;
  }
  return false;
}

bool SimContext::setupGlobals() {
  int64_t Cursor = 0;
  for (const GlobalVar &G : M.Globals) {
    Cursor = (Cursor + 7) & ~int64_t{7};
    int64_t Size = G.ValTy.sizeBytes();
    GlobalExtents.push_back({GlobalRangeBase + Cursor, Size, &G});
    Cursor += Size;
  }
  HeapStartOff = (Cursor + 63) & ~int64_t{63};
  HeapNextOff = HeapStartOff;
  GlobalMem.assign(HeapStartOff, 0);

  for (const GExtent &E : GlobalExtents) {
    int64_t Elems = E.G->ValTy.isArray() ? E.G->ValTy.Count : 1;
    int64_t ElemSize = E.G->ValTy.isArray() ? E.G->ValTy.elem().sizeBytes()
                                            : E.G->ValTy.sizeBytes();
    for (int64_t J = 0; J < Elems; ++J) {
      uint64_t Raw = static_cast<uint64_t>(E.G->Init);
      int64_t Off = (E.Start - GlobalRangeBase) + J * ElemSize;
      for (int64_t B = 0; B < ElemSize; ++B)
        GlobalMem[Off + B] = static_cast<uint8_t>(Raw >> (8 * B));
    }
  }

  for (const auto &KV : Opts.GlobalOverrides) {
    const GExtent *E = nullptr;
    for (const GExtent &Cand : GlobalExtents)
      if (Cand.G->Name == KV.first)
        E = &Cand;
    if (!E)
      return trap(nullptr, "sim-setup: no global named @" + KV.first);
    int64_t Elems = E->G->ValTy.isArray() ? E->G->ValTy.Count : 1;
    int64_t ElemSize = E->G->ValTy.isArray() ? E->G->ValTy.elem().sizeBytes()
                                             : E->G->ValTy.sizeBytes();
    const std::vector<int64_t> &Vals = KV.second;
    if (static_cast<int64_t>(Vals.size()) != Elems && Vals.size() != 1)
      return trap(nullptr, "sim-setup: override for @" + KV.first +
                               " expects 1 or " + std::to_string(Elems) +
                               " values, got " + std::to_string(Vals.size()));
    for (int64_t J = 0; J < Elems; ++J) {
      uint64_t Raw =
          static_cast<uint64_t>(Vals.size() == 1 ? Vals[0] : Vals[J]);
      int64_t Off = (E->Start - GlobalRangeBase) + J * ElemSize;
      for (int64_t B = 0; B < ElemSize; ++B)
        GlobalMem[Off + B] = static_cast<uint8_t>(Raw >> (8 * B));
    }
  }
  return true;
}

bool SimContext::setup() {
  const Function *K = M.kernel();
  if (!K)
    return trap(nullptr, "sim-setup: module has no kernel");
  for (const Function &F : M.Functions) {
    if (!F.Machine)
      return trap(nullptr,
                  "sim-setup: function @" + F.Name + " is not machine form");
    uint64_t Addr = FnRangeBase + (FnAddr.size() + 1) * 16;
    FnAddr[F.Name] = Addr;
    FnByAddr[Addr] = &F;
    auto &BI = BlockIdx[F.Name];
    for (size_t J = 0; J < F.Blocks.size(); ++J)
      BI[F.Blocks[J].Name] = J;
    const FrameGroup *G = M.groupOf(F.Name);
    if (!G)
      return trap(nullptr, "sim-setup: @" + F.Name + " has no frame group");
    GroupRootOf[F.Name] = G->Root;
  }
  for (const auto &KV : M.Layouts)
    LayoutByRoot[KV.first] = &KV.second;
  for (const auto &KV : GroupRootOf)
    if (!LayoutByRoot.count(KV.second))
      return trap(nullptr, "sim-setup: no depot layout for group " + KV.second);

  KernelGroupRoot = GroupRootOf[K->Name];
  KernelLayout = LayoutByRoot[KernelGroupRoot];
  for (const auto &KV : M.Layouts)
    if (KV.second.HasSharedDepot && KV.first != KernelGroupRoot)
      return trap(nullptr,
                  "sim-setup: shared residency outside the kernel frame group");

  if (Opts.ValidateLayout) {
    DiagList Audit = auditMachineModule(M);
    if (!Audit.empty())
      return trap(nullptr, Audit.front().str());
  }

  LaunchDefaults L = M.Launch.value_or(LaunchDefaults{});
  Teams = Opts.Teams > 0 ? Opts.Teams : L.Teams;
  Workers = Opts.Workers > 0 ? Opts.Workers : L.Workers;
  if (Teams < 1 || Workers < 1)
    return trap(nullptr, "sim-setup: launch needs at least one team and one worker");
  Launched = Workers + ReservedWarpSize;
  MasterTid = masterThreadId(Launched);

  if (!setupGlobals())
    return false;

  PreallocOff = KernelLayout->TotalShared;
  SharedRegionSize = PreallocOff +
                     int64_t{Opts.Rt.PreallocEntries} * SharedArgEntryBytes +
                     RuntimePrivateBytes;
  if (SharedRegionSize > static_cast<int64_t>(SharedStride))
    return trap(nullptr, "sim-setup: shared region exceeds its range stride");

  SharedMem.assign(Teams, std::vector<uint8_t>(SharedRegionSize, 0));
  LocalMem.assign(static_cast<size_t>(Teams) * Launched, {});
  for (int Tm = 0; Tm < Teams; ++Tm)
    Runtimes.push_back(std::make_unique<TeamRuntime>(
        Opts.Rt, sharedBase(Tm) + PreallocOff, Heap));

  R.Stats.Teams = Teams;
  R.Stats.RequestedWorkers = Workers;
  R.Stats.LaunchedTeamSize = Launched;
  R.Stats.BarrierReleases.assign(Teams, 0);
  R.Stats.BarrierEntries.assign(Teams, std::vector<int64_t>(Launched, 0));

  Threads.resize(static_cast<size_t>(Teams) * Launched);
  for (int Tm = 0; Tm < Teams; ++Tm)
    for (int Td = 0; Td < Launched; ++Td) {
      ThreadState &T = Threads[static_cast<size_t>(Tm) * Launched + Td];
      T.Team = Tm;
      T.Tid = Td;
      T.GlobalIdx = Tm * Launched + Td;
      if (!pushActivation(T, K, {}))
        return false;
    }
  return true;
}

uint8_t *SimContext::resolve(ThreadState &T, uint64_t Addr, int64_t Bytes,
                             std::string &Err) {
  if (Addr < NullGuard) {
    Err = "null dereference";
    return nullptr;
  }
  if (Addr >= LocalRangeBase &&
      Addr < LocalRangeBase + LocalMem.size() * LocalStride) {
    uint64_t Owner = (Addr - LocalRangeBase) / LocalStride;
    if (Owner != static_cast<uint64_t>(T.GlobalIdx)) {
      Err = "local-owner violation: thread " + std::to_string(T.Tid) +
            " of team " + std::to_string(T.Team) +
            " touched another thread's local memory";
      return nullptr;
    }
    uint64_t Off = Addr - localBase(T.GlobalIdx);
    std::vector<uint8_t> &Mem = LocalMem[Owner];
    if (Off + Bytes > Mem.size()) {
      Err = "out-of-bounds access: past the live local frame";
      return nullptr;
    }
    return Mem.data() + Off;
  }
  if (Addr >= SharedRangeBase &&
      Addr < SharedRangeBase + SharedMem.size() * SharedStride) {
    uint64_t Owner = (Addr - SharedRangeBase) / SharedStride;
    if (Owner != static_cast<uint64_t>(T.Team)) {
      Err = "cross-team shared access: team " + std::to_string(T.Team) +
            " touched team " + std::to_string(Owner) + "'s shared memory";
      return nullptr;
    }
    uint64_t Off = Addr - sharedBase(T.Team);
    std::vector<uint8_t> &Mem = SharedMem[Owner];
    if (Off + Bytes > Mem.size()) {
      Err = "out-of-bounds access: past the shared region";
      return nullptr;
    }
    return Mem.data() + Off;
  }
  if (Addr >= GlobalRangeBase &&
      Addr < GlobalRangeBase + GlobalMem.size()) {
    uint64_t Off = Addr - GlobalRangeBase;
    if (Off + Bytes > GlobalMem.size()) {
      Err = "out-of-bounds access: past the global range";
      return nullptr;
    }
    for (const GExtent &E : GlobalExtents)
      if (Addr >= E.Start && Addr + Bytes <= E.Start + static_cast<uint64_t>(E.Size))
        return GlobalMem.data() + Off;
    for (const auto &KV : HeapBlocks) {
      if (Addr < KV.first ||
          Addr + Bytes > KV.first + static_cast<uint64_t>(KV.second.first))
        continue;
      if (!KV.second.second) {
        Err = "out-of-bounds access: freed heap block";
        return nullptr;
      }
      return GlobalMem.data() + Off;
    }
    Err = "out-of-bounds access: unmapped global address";
    return nullptr;
  }
  Err = "out-of-bounds access: address outside every range";
  return nullptr;
}

bool SimContext::loadBytes(ThreadState &T, uint64_t Addr, int64_t Bytes,
                           uint64_t &Out) {
  std::string Err;
  uint8_t *P = resolve(T, Addr, Bytes, Err);
  if (!P)
    return trap(&T, Err);
  uint64_t V = 0;
  for (int64_t B = 0; B < Bytes; ++B)
    V |= static_cast<uint64_t>(P[B]) << (8 * B);
  Out = V;
  return true;
}

bool SimContext::storeBytes(ThreadState &T, uint64_t Addr, int64_t Bytes,
                            uint64_t Val) {
  std::string Err;
  uint8_t *P = resolve(T, Addr, Bytes, Err);
  if (!P)
    return trap(&T, Err);
  for (int64_t B = 0; B < Bytes; ++B)
    P[B] = static_cast<uint8_t>(Val >> (8 * B));
  return true;
}

bool SimContext::regValue(ThreadState &T, Activation &A, const Value &V,
                          uint64_t &Out) {
  switch (V.Kind) {
  case ValueKind::ConstInt:
    Out = static_cast<uint64_t>(V.IntVal);
    return true;
  case ValueKind::Null:
    Out = 0;
    return true;
  case ValueKind::GlobalRef: {
    for (const GExtent &E : GlobalExtents)
      if (E.G->Name == V.Name) {
        Out = E.Start;
        return true;
      }
    auto It = FnAddr.find(V.Name);
    if (It != FnAddr.end()) {
      Out = It->second;
      return true;
    }
    return trap(&T, "sim-setup: unresolved symbol @" + V.Name);
  }
  case ValueKind::Temp: {
    auto It = A.Regs.find(V.Name);
    if (It == A.Regs.end())
      return trap(&T, "use of undefined value %" + V.Name + " in @" +
                          A.F->Name);
    Out = It->second;
    return true;
  }
  case ValueKind::None:
    break;
  }
  return trap(&T, "malformed operand");
}

bool SimContext::pushActivation(ThreadState &T, const Function *F,
                                const std::vector<uint64_t> &Args) {
  if (Args.size() != F->Params.size())
    return trap(&T, "bad indirect call: @" + F->Name + " takes " +
                        std::to_string(F->Params.size()) + " arguments, got " +
                        std::to_string(Args.size()));
  Activation A;
  A.F = F;
  for (size_t J = 0; J < Args.size(); ++J)
    A.Regs[F->Params[J].Name] = canonical(Args[J], F->Params[J].Ty);

  const std::string &Root = GroupRootOf.at(F->Name);
  auto &GF = T.GroupFrames[Root];
  if (GF.second++ == 0) {
    const DepotLayout *L = LayoutByRoot.at(Root);
    GF.first = T.SPOff;
    T.SPOff += L->TotalLocal;
    if (T.SPOff > static_cast<int64_t>(LocalStride))
      return trap(&T, "out-of-bounds access: local frame arena overflow");
    std::vector<uint8_t> &Mem = LocalMem[T.GlobalIdx];
    if (static_cast<int64_t>(Mem.size()) < T.SPOff)
      Mem.resize(T.SPOff, 0);
    for (int64_t B = GF.first; B < T.SPOff; ++B)
      Mem[B] = 0;
  }
  T.Stack.push_back(std::move(A));
  return true;
}

void SimContext::popActivation(ThreadState &T) {
  const Function *F = T.Stack.back().F;
  const std::string &Root = GroupRootOf.at(F->Name);
  auto &GF = T.GroupFrames[Root];
  if (--GF.second == 0)
    T.SPOff = GF.first;
  T.Stack.pop_back();
  if (T.Stack.empty()) {
    T.Live = false;
    checkBarrierRelease(T.Team);
  }
}

void SimContext::checkBarrierRelease(int Team) {
  int Waiting = 0;
  for (int Td = 0; Td < Launched; ++Td) {
    ThreadState &T = Threads[static_cast<size_t>(Team) * Launched + Td];
    if (!T.Live)
      continue;
    if (!T.AtBarrier)
      return;
    ++Waiting;
  }
  if (Waiting == 0)
    return;
  for (int Td = 0; Td < Launched; ++Td) {
    ThreadState &T = Threads[static_cast<size_t>(Team) * Launched + Td];
    if (T.Live)
      T.AtBarrier = false;
  }
  ++R.Stats.BarrierReleases[Team];
}

bool SimContext::execBuiltin(ThreadState &T, Activation &A,
                             const Instruction &I, const std::string &Callee,
                             const std::vector<uint64_t> &Args) {
  TeamRuntime &Rt = *Runtimes[T.Team];
  RtRole Role = T.Tid == MasterTid ? RtRole::Master : RtRole::Worker;
  auto setResult = [&](uint64_t V) {
    if (!I.Result.empty())
      A.Regs[I.Result] = canonical(V, I.ResultTy);
  };

  if (Callee == KernelInitFn) {
    RtResult RR = Rt.kernelInit(Role, static_cast<int>(signExtend(Args[0], 4)));
    return RR.Ok ? true : trap(&T, RR.TrapReason);
  }
  if (Callee == PrepareParallelFn) {
    const Value &FnV = I.Ops[1];
    if (!FnV.isGlobal() || !FnByAddr.count(FnAddr.count(FnV.Name)
                                               ? FnAddr[FnV.Name]
                                               : 0))
      return trap(&T, "bad indirect call: prepare names no device function");
    uint64_t ArgsAddr = 0;
    RtResult RR = Rt.prepareParallel(Role, FnV.Name, signExtend(Args[1], 4),
                                     ArgsAddr);
    if (!RR.Ok)
      return trap(&T, RR.TrapReason);
    setResult(ArgsAddr);
    return true;
  }
  if (Callee == KernelParallelFn) {
    std::string Wf;
    uint64_t ArgsAddr = 0;
    bool Participate = false;
    RtResult RR = Rt.kernelParallel(Role, Wf, ArgsAddr, Participate);
    if (!RR.Ok)
      return trap(&T, RR.TrapReason);
    uint64_t WfRaw = Wf.empty() ? 0 : FnAddr.at(Wf);
    if (!storeBytes(T, Args[0], 8, WfRaw))
      return false;
    if (!storeBytes(T, Args[1], 8, ArgsAddr))
      return false;
    setResult(Participate ? 1 : 0);
    return true;
  }
  if (Callee == EndParallelFn) {
    RtResult RR = Rt.endParallel(Role);
    return RR.Ok ? true : trap(&T, RR.TrapReason);
  }
  if (Callee == KernelDeinitFn) {
    RtResult RR = Rt.kernelDeinit(Role);
    return RR.Ok ? true : trap(&T, RR.TrapReason);
  }
  if (Callee == ThreadNumFn) {
    setResult(Role == RtRole::Worker ? static_cast<uint64_t>(T.Tid) : 0);
    return true;
  }
  if (Callee == NumThreadsFn) {
    setResult(Role == RtRole::Worker ? static_cast<uint64_t>(Workers) : 1);
    return true;
  }
  if (Callee == TeamNumFn) {
    setResult(static_cast<uint64_t>(T.Team));
    return true;
  }
  if (Callee == NumTeamsFn) {
    setResult(static_cast<uint64_t>(Teams));
    return true;
  }
  if (Callee == SimTidFn) {
    setResult(static_cast<uint64_t>(T.Tid));
    return true;
  }
  if (Callee == SimTeamSizeFn) {
    setResult(static_cast<uint64_t>(Launched));
    return true;
  }
  if (Callee == ParallelBeginFn || Callee == ParallelEndFn)
    return trap(&T, "protocol error: unlowered parallel marker reached the "
                    "simulator");
  return trap(&T, "sim-setup: unknown runtime callee @" + Callee);
}

bool SimContext::execCall(ThreadState &T, Activation &A, const Instruction &I) {
  const Value &CalleeV = I.Ops[0];
  std::vector<uint64_t> Args;
  for (size_t J = 1; J < I.Ops.size(); ++J) {
    uint64_t V = 0;
    if (!regValue(T, A, I.Ops[J], V))
      return false;
    Args.push_back(V);
  }

  if (CalleeV.isGlobal()) {
    const std::string &Name = CalleeV.Name;
    if (isRuntimeCall(Name) || builtinCallees().count(Name)) {
      if (!execBuiltin(T, A, I, Name, Args))
        return false;
      ++A.Instr;
      return true;
    }
    const Function *F = M.findFunction(Name);
    if (!F)
      return trap(&T, "bad indirect call: no device function @" + Name);
    ++A.Instr;
    return pushActivation(T, F, Args);
  }

  uint64_t Target = 0;
  if (!regValue(T, A, CalleeV, Target))
    return false;
  auto It = FnByAddr.find(Target);
  if (It == FnByAddr.end())
    return trap(&T, "bad indirect call: no device function at the target "
                    "address");
  const Function *F = It->second;
  if (F->Params.size() != Args.size())
    return trap(&T, "bad indirect call: argument count mismatch for @" +
                        F->Name);
  ++A.Instr;
  return pushActivation(T, F, Args);
}

bool SimContext::step(ThreadState &T) {
  Activation &A = T.Stack.back();
  const BasicBlock &BB = A.F->Blocks[A.Block];
  if (A.Instr >= BB.Instrs.size())
    return trap(&T, "sim-setup: fell off the end of block %" + BB.Name);
  const Instruction &I = BB.Instrs[A.Instr];

  if (Opts.Trace && R.TraceLines.size() < 200000) {
    std::string Line = "t" + std::to_string(T.Team) + "." +
                       std::to_string(T.Tid) + " " + A.F->Name + ":" +
                       BB.Name + " " + printInstruction(I);
    while (!Line.empty() && Line.back() == '\n')
      Line.pop_back();
    R.TraceLines.push_back(Line);
  }

  auto jump = [&](const std::string &Target) -> bool {
    auto &BI = BlockIdx.at(A.F->Name);
    auto It = BI.find(Target);
    if (It == BI.end())
      return trap(&T, "sim-setup: branch to unknown block %" + Target);
    A.Block = It->second;
    A.Instr = 0;
    return true;
  };

  switch (I.Op) {
  case Opcode::Alloca:
    return trap(&T, "sim-setup: alloca survived frame lowering");
  case Opcode::FrameIndex: {
    const std::string &Root = GroupRootOf.at(A.F->Name);
    const DepotLayout *L = LayoutByRoot.at(Root);
    if (I.Slot < 0 || I.Slot >= static_cast<int>(L->Slots.size()))
      return trap(&T, "sim-setup: frame index names no depot slot");
    const DepotSlot &S = L->Slots[I.Slot];
    uint64_t Addr;
    if (I.Base == BaseReg::Shared) {
      if (Root != KernelGroupRoot)
        return trap(&T,
                    "sim-setup: shared residency outside the kernel frame group");
      Addr = sharedBase(T.Team) + S.Offset;
    } else {
      Addr = localBase(T.GlobalIdx) + T.GroupFrames.at(Root).first + S.Offset;
    }
    A.Regs[I.Result] = Addr;
    ++A.Instr;
    return true;
  }
  case Opcode::Load: {
    uint64_t Addr = 0;
    if (!regValue(T, A, I.Ops[0], Addr))
      return false;
    uint64_t Raw = 0;
    if (!loadBytes(T, Addr, I.ResultTy.sizeBytes(), Raw))
      return false;
    A.Regs[I.Result] = canonical(Raw, I.ResultTy);
    ++A.Instr;
    return true;
  }
  case Opcode::Store: {
    uint64_t V = 0, Addr = 0;
    if (!regValue(T, A, I.Ops[0], V) || !regValue(T, A, I.Ops[1], Addr))
      return false;
    if (!storeBytes(T, Addr, I.Ops[0].Ty.sizeBytes(), V))
      return false;
    ++A.Instr;
    return true;
  }
  case Opcode::BitCast:
  case Opcode::AddrSpaceCast: {
    uint64_t V = 0;
    if (!regValue(T, A, I.Ops[0], V))
      return false;
    A.Regs[I.Result] = V;
    ++A.Instr;
    return true;
  }
  case Opcode::GetElement: {
    uint64_t Base = 0, Idx = 0;
    if (!regValue(T, A, I.Ops[0], Base) || !regValue(T, A, I.Ops[1], Idx))
      return false;
    int64_t Stride = I.GepElemTy.isArray() ? I.GepElemTy.elem().sizeBytes()
                                           : I.GepElemTy.sizeBytes();
    A.Regs[I.Result] =
        Base + static_cast<uint64_t>(static_cast<int64_t>(Idx) * Stride);
    ++A.Instr;
    return true;
  }
  case Opcode::BinOp: {
    uint64_t LRaw = 0, RRaw = 0;
    if (!regValue(T, A, I.Ops[0], LRaw) || !regValue(T, A, I.Ops[1], RRaw))
      return false;
    int64_t L = static_cast<int64_t>(LRaw), Rv = static_cast<int64_t>(RRaw);
    int64_t Out = 0;
    switch (I.BK) {
    case BinKind::Add:
      Out = L + Rv;
      break;
    case BinKind::Sub:
      Out = L - Rv;
      break;
    case BinKind::Mul:
      Out = L * Rv;
      break;
    }
    A.Regs[I.Result] = canonical(static_cast<uint64_t>(Out), I.ResultTy);
    ++A.Instr;
    return true;
  }
  case Opcode::Cmp: {
    uint64_t LRaw = 0, RRaw = 0;
    if (!regValue(T, A, I.Ops[0], LRaw) || !regValue(T, A, I.Ops[1], RRaw))
      return false;
    int64_t L = static_cast<int64_t>(LRaw), Rv = static_cast<int64_t>(RRaw);
    bool Out = false;
    switch (I.CK) {
    case CmpKind::Eq:
      Out = L == Rv;
      break;
    case CmpKind::Ne:
      Out = L != Rv;
      break;
    case CmpKind::Lt:
      Out = L < Rv;
      break;
    case CmpKind::Le:
      Out = L <= Rv;
      break;
    case CmpKind::Gt:
      Out = L > Rv;
      break;
    case CmpKind::Ge:
      Out = L >= Rv;
      break;
    }
    A.Regs[I.Result] = Out ? 1 : 0;
    ++A.Instr;
    return true;
  }
  case Opcode::Br:
    return jump(I.Target);
  case Opcode::CondBr: {
    uint64_t C = 0;
    if (!regValue(T, A, I.Ops[0], C))
      return false;
    return jump(C != 0 ? I.Target : I.Target2);
  }
  case Opcode::Call:
    return execCall(T, A, I);
  case Opcode::Ret:
    popActivation(T);
    return true;
  case Opcode::Barrier:
    ++R.Stats.BarrierEntries[T.Team][T.Tid];
    ++A.Instr;
    T.AtBarrier = true;
    checkBarrierRelease(T.Team);
    return true;
  }
  return trap(&T, "sim-setup: unhandled opcode");
}

void SimContext::readBackGlobals() {
  for (const GExtent &E : GlobalExtents) {
    int64_t Elems = E.G->ValTy.isArray() ? E.G->ValTy.Count : 1;
    int64_t ElemSize = E.G->ValTy.isArray() ? E.G->ValTy.elem().sizeBytes()
                                            : E.G->ValTy.sizeBytes();
    std::vector<int64_t> Vals;
    for (int64_t J = 0; J < Elems; ++J) {
      uint64_t Raw = 0;
      int64_t Off = (E.Start - GlobalRangeBase) + J * ElemSize;
      for (int64_t B = 0; B < ElemSize; ++B)
        Raw |= static_cast<uint64_t>(GlobalMem[Off + B]) << (8 * B);
      Vals.push_back(signExtend(Raw, ElemSize));
    }
    R.FinalGlobals[E.G->Name] = std::move(Vals);
  }
}

SimResult SimContext::run() {
  if (!setup())
    return R;

  bool AnyLive = true;
  while (AnyLive && !R.Trapped) {
    AnyLive = false;
    bool Progress = false;
    for (ThreadState &T : Threads) {
      if (!T.Live)
        continue;
      AnyLive = true;
      if (T.AtBarrier)
        continue;
      Progress = true;
      if (!step(T))
        return R;
      ++R.Stats.Steps;
      if (R.Stats.Steps > Opts.StepLimit) {
        trap(&T, "step limit exceeded");
        return R;
      }
    }
    if (AnyLive && !Progress) {
      trap(nullptr, "deadlock: every live thread is blocked");
      return R;
    }
  }

  readBackGlobals();
  for (auto &Rt : Runtimes) {
    R.TeamEvents.push_back(Rt->events());
    R.Stats.DynamicAllocs += Rt->dynamicAllocs();
    R.Stats.DynamicFrees += Rt->dynamicFrees();
    for (const RuntimeEvent &E : Rt->events())
      if (E.K == RuntimeEvent::PrepareDynamic)
        R.Stats.DynamicAllocBytes += E.Bytes;
  }
  return R;
}

} // namespace

int64_t SimStats::masterBarrierEntries(int Team) const {
  int Master = LaunchedTeamSize - 32;
  if (Team < 0 || Team >= static_cast<int>(BarrierEntries.size()))
    return -1;
  if (Master < 0 || Master >= static_cast<int>(BarrierEntries[Team].size()))
    return -1;
  return BarrierEntries[Team][Master];
}

SimResult simulate(const Module &M, const SimOptions &Opts) {
  SimContext C(M, Opts);
  return C.run();
}

} // namespace omplab
