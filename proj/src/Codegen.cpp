//===--- Codegen.cpp - Master/worker kernel construction ------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/Codegen.h"

#include <cassert>
#include <map>
#include <set>
#include <string>

using namespace omplab;

namespace {

struct MarkerPos {
  size_t Block = 0;
  size_t Instr = 0;
};

struct CaptureInfo {
  std::string Name; // the captured alloca result
  Type Ty;          // its pointer type
};

bool isMarker(const Instruction &I, const char *Name, int64_t *Region) {
  if (I.Op != Opcode::Call || I.Ops.empty() || !I.Ops[0].isGlobal())
    return false;
  if (I.Ops[0].Name != Name)
    return false;
  if (Region && I.Ops.size() > 1 && I.Ops[1].isConst())
    *Region = I.Ops[1].IntVal;
  return true;
}

Instruction makeCall(const std::string &Callee, Type RetTy,
                     std::vector<Value> Args, const std::string &Result = "") {
  Instruction I;
  I.Op = Opcode::Call;
  I.ResultTy = std::move(RetTy);
  I.Result = Result;
  I.Ops.push_back(Value::global(Callee, Type::fn()));
  for (auto &A : Args)
    I.Ops.push_back(std::move(A));
  return I;
}

Instruction makeBr(const std::string &Target) {
  Instruction I;
  I.Op = Opcode::Br;
  I.Target = Target;
  return I;
}

Instruction makeCondBr(Value Cond, const std::string &T, const std::string &E) {
  Instruction I;
  I.Op = Opcode::CondBr;
  I.Ops = {std::move(Cond)};
  I.Target = T;
  I.Target2 = E;
  return I;
}

Instruction makeRet() {
  Instruction I;
  I.Op = Opcode::Ret;
  return I;
}

class CodegenDriver {
public:
  explicit CodegenDriver(Module M) : M(std::move(M)) {}

  Module run() {
    Function *K = M.kernel();
    assert(K && "codegen requires a kernel");
    emitWorkerFunction();
    while (outlineNextRegion(*K))
      ;
    emitMasterWorker(*K);
    for (auto &F : NewFunctions)
      M.Functions.push_back(std::move(F));
    return std::move(M);
  }

private:
  //===--------------------------------------------------------------------===
  // Region outlining
  //===--------------------------------------------------------------------===

  /// Finds the first begin marker, outlines its region, and splices the
  /// dispatch sequence into the kernel. Returns false when no marker is left.
  bool outlineNextRegion(Function &K) {
    MarkerPos Begin, End;
    int64_t Region = -1;
    if (!findMarker(K, ParallelBeginFn, 0, 0, Begin, &Region))
      return false;
    int64_t EndRegion = -1;
    bool HaveEnd = findMarker(K, ParallelEndFn, Begin.Block, Begin.Instr + 1,
                              End, &EndRegion);
    assert(HaveEnd && EndRegion == Region && "unbalanced region markers");
    (void)HaveEnd;
    (void)EndRegion;

    std::string OutlinedName = "__omp_outlined." + std::to_string(Region);
    std::string WrapperName = OutlinedName + "_wrapper";

    // Pull the region body out of the kernel.
    std::vector<BasicBlock> Body;
    BasicBlock Entry;
    Entry.Name = "entry";
    BasicBlock &BeginBB = K.Blocks[Begin.Block];
    if (Begin.Block == End.Block) {
      Entry.Instrs.assign(
          BeginBB.Instrs.begin() + static_cast<long>(Begin.Instr) + 1,
          BeginBB.Instrs.begin() + static_cast<long>(End.Instr));
      Body.push_back(std::move(Entry));
    } else {
      Entry.Instrs.assign(
          BeginBB.Instrs.begin() + static_cast<long>(Begin.Instr) + 1,
          BeginBB.Instrs.end());
      Body.push_back(std::move(Entry));
      for (size_t B = Begin.Block + 1; B < End.Block; ++B)
        Body.push_back(K.Blocks[B]);
      BasicBlock Tail;
      Tail.Name = K.Blocks[End.Block].Name;
      Tail.Instrs.assign(K.Blocks[End.Block].Instrs.begin(),
                         K.Blocks[End.Block].Instrs.begin() +
                             static_cast<long>(End.Instr));
      Body.push_back(std::move(Tail));
    }
    Body.back().Instrs.push_back(makeRet());

    std::vector<CaptureInfo> Captures = findCaptures(K, Body);
    emitOutlined(OutlinedName, Body, Captures);
    emitWrapper(WrapperName, OutlinedName, Captures);

    // Rebuild the begin block: head, dispatch, then the tail that followed
    // the end marker. Interior blocks are consumed by the outlined body.
    std::vector<Instruction> Tail(
        K.Blocks[End.Block].Instrs.begin() + static_cast<long>(End.Instr) + 1,
        K.Blocks[End.Block].Instrs.end());
    BeginBB.Instrs.resize(Begin.Instr);
    appendDispatch(BeginBB, Region, WrapperName, Captures);
    for (auto &I : Tail)
      BeginBB.Instrs.push_back(std::move(I));
    if (End.Block > Begin.Block)
      K.Blocks.erase(K.Blocks.begin() + static_cast<long>(Begin.Block) + 1,
                     K.Blocks.begin() + static_cast<long>(End.Block) + 1);
    return true;
  }

  bool findMarker(const Function &K, const char *Name, size_t FromBlock,
                  size_t FromInstr, MarkerPos &Pos, int64_t *Region) {
    for (size_t B = FromBlock; B < K.Blocks.size(); ++B) {
      size_t I0 = B == FromBlock ? FromInstr : 0;
      for (size_t I = I0; I < K.Blocks[B].Instrs.size(); ++I) {
        if (isMarker(K.Blocks[B].Instrs[I], Name, Region)) {
          Pos = {B, I};
          return true;
        }
      }
    }
    return false;
  }

  /// Kernel-defined values the region body reads. These are always alloca
  /// results: scalars flow between the master and the workers through team
  /// memory, never through registers.
  std::vector<CaptureInfo> findCaptures(const Function &K,
                                        const std::vector<BasicBlock> &Body) {
    std::set<std::string> Defined;
    for (const auto &B : Body)
      for (const auto &I : B.Instrs)
        if (!I.Result.empty())
          Defined.insert(I.Result);

    std::set<std::string> Wanted;
    for (const auto &B : Body)
      for (const auto &I : B.Instrs)
        for (const auto &Op : I.Ops)
          if (Op.isTemp() && !Defined.count(Op.Name))
            Wanted.insert(Op.Name);

    std::vector<CaptureInfo> Captures;
    for (const auto &B : K.Blocks) {
      for (const auto &I : B.Instrs) {
        if (I.Result.empty() || !Wanted.count(I.Result))
          continue;
        assert(I.Op == Opcode::Alloca &&
               "region captures must be memory-backed");
        Captures.push_back({I.Result, I.ResultTy});
        Wanted.erase(I.Result);
      }
    }
    assert(Wanted.empty() && "capture refers to an undefined kernel value");
    return Captures;
  }

  void emitOutlined(const std::string &Name, std::vector<BasicBlock> &Body,
                    const std::vector<CaptureInfo> &Captures) {
    Function F;
    F.Name = Name;
    F.Params.push_back({".global_tid.", Type::ptr(Type::i32())});
    F.Params.push_back({".bound_tid.", Type::ptr(Type::i32())});
    for (const CaptureInfo &C : Captures)
      F.Params.push_back({C.Name, C.Ty});
    F.Blocks = std::move(Body);
    NewFunctions.push_back(std::move(F));
  }

  void emitWrapper(const std::string &Name, const std::string &Outlined,
                   const std::vector<CaptureInfo> &Captures) {
    Function F;
    F.Name = Name;
    F.Params.push_back({".unused", Type::i16()});
    F.Params.push_back({".wid", Type::i32()});
    F.Params.push_back({".args", Type::ptr(Type::ptr(Type::i8()))});
    BasicBlock B;
    B.Name = "entry";

    Value ArgsV = Value::temp(".args", Type::ptr(Type::ptr(Type::i8())));
    Instruction CallI;
    CallI.Op = Opcode::Call;
    CallI.ResultTy = Type::voidTy();
    CallI.Ops.push_back(Value::global(Outlined, Type::fn()));
    CallI.Ops.push_back(Value::null(Type::ptr(Type::i32())));
    CallI.Ops.push_back(Value::null(Type::ptr(Type::i32())));

    for (size_t J = 0; J < Captures.size(); ++J) {
      std::string Suffix = std::to_string(J);
      Value Gep = Value::temp(".gep." + Suffix,
                              Type::ptr(Type::ptr(Type::i8())));
      Instruction GepI;
      GepI.Op = Opcode::GetElement;
      GepI.GepElemTy = Type::ptr(Type::i8());
      GepI.Result = Gep.Name;
      GepI.ResultTy = Gep.Ty;
      GepI.Ops = {ArgsV, Value::constInt(static_cast<int64_t>(J))};
      B.Instrs.push_back(std::move(GepI));

      Value Ld = Value::temp(".ld." + Suffix, Type::ptr(Type::i8()));
      Instruction LdI;
      LdI.Op = Opcode::Load;
      LdI.Result = Ld.Name;
      LdI.ResultTy = Ld.Ty;
      LdI.Ops = {Gep};
      B.Instrs.push_back(std::move(LdI));

      Value Cast = Value::temp(".cap." + Suffix, Captures[J].Ty);
      Instruction CastI;
      CastI.Op = Opcode::BitCast;
      CastI.Result = Cast.Name;
      CastI.ResultTy = Cast.Ty;
      CastI.Ops = {Ld};
      B.Instrs.push_back(std::move(CastI));

      CallI.Ops.push_back(Cast);
    }
    B.Instrs.push_back(std::move(CallI));
    B.Instrs.push_back(makeRet());
    F.Blocks.push_back(std::move(B));
    NewFunctions.push_back(std::move(F));
  }

  void appendDispatch(BasicBlock &BB, int64_t Region,
                      const std::string &Wrapper,
                      const std::vector<CaptureInfo> &Captures) {
    std::string R = std::to_string(Region);
    Value ArgsV = Value::temp(".args." + R, Type::ptr(Type::ptr(Type::i8())));
    BB.Instrs.push_back(makeCall(
        PrepareParallelFn, ArgsV.Ty,
        {Value::global(Wrapper, Type::fn()),
         Value::constInt(static_cast<int64_t>(Captures.size()))},
        ArgsV.Name));
    for (size_t J = 0; J < Captures.size(); ++J) {
      std::string Suffix = R + "." + std::to_string(J);
      Value Cast = Value::temp(".cap." + Suffix, Type::ptr(Type::i8()));
      Instruction CastI;
      CastI.Op = Opcode::BitCast;
      CastI.Result = Cast.Name;
      CastI.ResultTy = Cast.Ty;
      CastI.Ops = {Value::temp(Captures[J].Name, Captures[J].Ty)};
      BB.Instrs.push_back(std::move(CastI));

      Value Slot = Value::temp(".slot." + Suffix,
                               Type::ptr(Type::ptr(Type::i8())));
      Instruction GepI;
      GepI.Op = Opcode::GetElement;
      GepI.GepElemTy = Type::ptr(Type::i8());
      GepI.Result = Slot.Name;
      GepI.ResultTy = Slot.Ty;
      GepI.Ops = {ArgsV, Value::constInt(static_cast<int64_t>(J))};
      BB.Instrs.push_back(std::move(GepI));

      Instruction StI;
      StI.Op = Opcode::Store;
      StI.Ops = {Cast, Slot};
      BB.Instrs.push_back(std::move(StI));
    }
    Instruction Release;
    Release.Op = Opcode::Barrier;
    BB.Instrs.push_back(Release);
    Instruction Join;
    Join.Op = Opcode::Barrier;
    BB.Instrs.push_back(Join);
  }

  //===--------------------------------------------------------------------===
  // Master/worker rewrite
  //===--------------------------------------------------------------------===

  void emitMasterWorker(Function &K) {
    std::vector<BasicBlock> Master = std::move(K.Blocks);
    K.Blocks.clear();

    Master.front().Name = "master";
    for (auto &B : Master)
      B.Tag = BlockTag::Seq;

    Value Wub = Value::temp(".wub", Type::i32());
    Master.front().Instrs.insert(
        Master.front().Instrs.begin(),
        makeCall(KernelInitFn, Type::voidTy(), {Wub}));

    // The master leaves through kernel teardown instead of a plain return.
    bool ReplacedRet = false;
    for (auto &B : Master) {
      for (size_t I = 0; I < B.Instrs.size(); ++I) {
        if (B.Instrs[I].Op != Opcode::Ret)
          continue;
        B.Instrs[I] = makeCall(KernelDeinitFn, Type::voidTy(), {});
        B.Instrs.insert(B.Instrs.begin() + static_cast<long>(I) + 1,
                        makeBr("exit"));
        ReplacedRet = true;
        break;
      }
    }
    assert(ReplacedRet && "kernel had no return");
    (void)ReplacedRet;

    BasicBlock EntryBB;
    EntryBB.Name = "entry";
    Value Tid = Value::temp(".tid", Type::i32());
    EntryBB.Instrs.push_back(
        makeCall(SimTidFn, Type::i32(), {}, Tid.Name));
    Value Tsz = Value::temp(".team_size", Type::i32());
    EntryBB.Instrs.push_back(
        makeCall(SimTeamSizeFn, Type::i32(), {}, Tsz.Name));
    Instruction SubI;
    SubI.Op = Opcode::BinOp;
    SubI.BK = BinKind::Sub;
    SubI.Result = Wub.Name;
    SubI.ResultTy = Type::i32();
    SubI.Ops = {Tsz, Value::constInt(ReservedWarpSize)};
    EntryBB.Instrs.push_back(std::move(SubI));
    Value IsWorker = Value::temp(".is.worker", Type::i1());
    Instruction CmpI;
    CmpI.Op = Opcode::Cmp;
    CmpI.CK = CmpKind::Lt;
    CmpI.Result = IsWorker.Name;
    CmpI.ResultTy = Type::i1();
    CmpI.Ops = {Tid, Wub};
    EntryBB.Instrs.push_back(std::move(CmpI));
    EntryBB.Instrs.push_back(makeCondBr(IsWorker, "worker", "mastercheck"));

    BasicBlock WorkerBB;
    WorkerBB.Name = "worker";
    WorkerBB.Instrs.push_back(makeCall(WorkerFnName, Type::voidTy(), {}));
    WorkerBB.Instrs.push_back(makeBr("exit"));

    BasicBlock CheckBB;
    CheckBB.Name = "mastercheck";
    Value IsMaster = Value::temp(".is.master", Type::i1());
    Instruction EqI;
    EqI.Op = Opcode::Cmp;
    EqI.CK = CmpKind::Eq;
    EqI.Result = IsMaster.Name;
    EqI.ResultTy = Type::i1();
    EqI.Ops = {Tid, Wub};
    CheckBB.Instrs.push_back(std::move(EqI));
    CheckBB.Instrs.push_back(makeCondBr(IsMaster, "master", "exit"));

    BasicBlock ExitBB;
    ExitBB.Name = "exit";
    ExitBB.Instrs.push_back(makeRet());

    K.Blocks.push_back(std::move(EntryBB));
    K.Blocks.push_back(std::move(WorkerBB));
    K.Blocks.push_back(std::move(CheckBB));
    for (auto &B : Master)
      K.Blocks.push_back(std::move(B));
    K.Blocks.push_back(std::move(ExitBB));
  }

  //===--------------------------------------------------------------------===
  // Worker scheduling loop
  //===--------------------------------------------------------------------===

  void emitWorkerFunction() {
    Function F;
    F.Name = WorkerFnName;

    Type FnPtr = Type::ptr(Type::fn());
    Type ArgsTy = Type::ptr(Type::ptr(Type::i8()));
    Type ArgsPtr = Type::ptr(ArgsTy);
    Value WfAddr = Value::temp("wf.addr", FnPtr);
    Value ArgsAddr = Value::temp("args.addr", ArgsPtr);

    BasicBlock Entry;
    Entry.Name = "entry";
    {
      Instruction A;
      A.Op = Opcode::Alloca;
      A.AllocaTy = Type::fn();
      A.Align = 8;
      A.Result = WfAddr.Name;
      A.ResultTy = FnPtr;
      Entry.Instrs.push_back(std::move(A));
      Instruction B;
      B.Op = Opcode::Alloca;
      B.AllocaTy = ArgsTy;
      B.Align = 8;
      B.Result = ArgsAddr.Name;
      B.ResultTy = ArgsPtr;
      Entry.Instrs.push_back(std::move(B));
      Entry.Instrs.push_back(makeBr("await.work"));
    }

    BasicBlock Await;
    Await.Name = "await.work";
    Await.Tag = BlockTag::Worker;
    Value Participate = Value::temp(".participate", Type::i1());
    Value Wf = Value::temp("wf", Type::fn());
    Value Finished = Value::temp(".finished", Type::i1());
    {
      Instruction Bar;
      Bar.Op = Opcode::Barrier;
      Await.Instrs.push_back(Bar);
      Await.Instrs.push_back(makeCall(KernelParallelFn, Type::i1(),
                                      {WfAddr, ArgsAddr}, Participate.Name));
      Instruction Ld;
      Ld.Op = Opcode::Load;
      Ld.Result = Wf.Name;
      Ld.ResultTy = Type::fn();
      Ld.Ops = {WfAddr};
      Await.Instrs.push_back(std::move(Ld));
      Instruction Eq;
      Eq.Op = Opcode::Cmp;
      Eq.CK = CmpKind::Eq;
      Eq.Result = Finished.Name;
      Eq.ResultTy = Type::i1();
      Eq.Ops = {Wf, Value::null(Type::fn())};
      Await.Instrs.push_back(std::move(Eq));
      Await.Instrs.push_back(
          makeCondBr(Finished, "terminate.parallel", "select.workers"));
    }

    BasicBlock Select;
    Select.Name = "select.workers";
    Select.Tag = BlockTag::Worker;
    Select.Instrs.push_back(
        makeCondBr(Participate, "execute.parallel", "barrier.parallel"));

    BasicBlock Exec;
    Exec.Name = "execute.parallel";
    Exec.Tag = BlockTag::Worker;
    {
      Value Wid = Value::temp(".wid", Type::i32());
      Exec.Instrs.push_back(makeCall(ThreadNumFn, Type::i32(), {}, Wid.Name));
      Value Args = Value::temp(".args", ArgsTy);
      Instruction Ld;
      Ld.Op = Opcode::Load;
      Ld.Result = Args.Name;
      Ld.ResultTy = ArgsTy;
      Ld.Ops = {ArgsAddr};
      Exec.Instrs.push_back(std::move(Ld));
      Instruction CallI;
      CallI.Op = Opcode::Call;
      CallI.ResultTy = Type::voidTy();
      CallI.Ops = {Wf, Value::constInt(0, Type::i16()), Wid, Args};
      Exec.Instrs.push_back(std::move(CallI));
      Exec.Instrs.push_back(makeCall(EndParallelFn, Type::voidTy(), {}));
      Exec.Instrs.push_back(makeBr("barrier.parallel"));
    }

    BasicBlock BarBB;
    BarBB.Name = "barrier.parallel";
    BarBB.Tag = BlockTag::Worker;
    {
      Instruction Bar;
      Bar.Op = Opcode::Barrier;
      BarBB.Instrs.push_back(Bar);
      BarBB.Instrs.push_back(makeBr("await.work"));
    }

    BasicBlock Term;
    Term.Name = "terminate.parallel";
    Term.Tag = BlockTag::Worker;
    Term.Instrs.push_back(makeBr("exit"));

    BasicBlock Exit;
    Exit.Name = "exit";
    Exit.Instrs.push_back(makeRet());

    F.Blocks = {std::move(Entry), std::move(Await),  std::move(Select),
                std::move(Exec),  std::move(BarBB),  std::move(Term),
                std::move(Exit)};
    NewFunctions.push_back(std::move(F));
  }

  Module M;
  std::vector<Function> NewFunctions;
};

} // namespace

Module omplab::runCodegen(const Module &Pre) {
  CodegenDriver D(Pre);
  return D.run();
}
