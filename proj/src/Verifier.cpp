//===--- Verifier.cpp - Structural and type checking ----------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/Verifier.h"

#include "omplab/IRPrinter.h"

#include <map>
#include <set>

namespace omplab {

namespace {

class VerifyCtx {
public:
  explicit VerifyCtx(const Module &M) : M(M) {}

  DiagList run() {
    checkKernelCount();
    for (const Function &F : M.Functions)
      checkFunction(F);
    checkCallGraphAcyclic();
    return Diags;
  }

private:
  const Module &M;
  DiagList Diags;

  void err(const std::string &Rule, const std::string &Fn,
           const std::string &Msg) {
    Diags.push_back({Rule, Msg, Fn, {}});
  }

  void checkKernelCount() {
    int N = 0;
    for (const Function &F : M.Functions)
      if (F.Kernel)
        ++N;
    if (N != 1)
      err("kernel-count", "",
          "module must mark exactly one kernel entry, found " +
              std::to_string(N));
  }

  void checkFunction(const Function &F) {
    std::set<std::string> BlockNames;
    for (const BasicBlock &B : F.Blocks)
      if (!BlockNames.insert(B.Name).second)
        err("duplicate-block", F.Name, "duplicate block %" + B.Name);

    // Collect defs in lexical order for def-before-use.
    std::map<std::string, int> DefIndex;
    std::map<std::string, const Instruction *> DefInstr;
    int Next = 0;
    for (const Param &P : F.Params)
      DefIndex[P.Name] = Next++;
    for (const BasicBlock &B : F.Blocks)
      for (const Instruction &I : B.Instrs)
        if (!I.Result.empty()) {
          if (DefIndex.count(I.Result))
            err("duplicate-def", F.Name, "value %" + I.Result +
                                             " defined more than once");
          DefIndex[I.Result] = Next++;
          DefInstr[I.Result] = &I;
        }

    int UseIdx = static_cast<int>(F.Params.size());
    for (const BasicBlock &B : F.Blocks) {
      if (B.Instrs.empty()) {
        err("bad-terminator", F.Name, "block %" + B.Name + " is empty");
        continue;
      }
      for (size_t K = 0; K < B.Instrs.size(); ++K) {
        const Instruction &I = B.Instrs[K];
        bool Last = K + 1 == B.Instrs.size();
        if (I.isTerminator() != Last)
          err("bad-terminator", F.Name,
              "block %" + B.Name +
                  (Last ? " does not end with a terminator"
                        : " has a terminator before its last instruction"));
        checkOperands(F, B, I, DefIndex, DefInstr, UseIdx);
        checkInstr(F, B, I, BlockNames);
        if (!I.Result.empty())
          ++UseIdx;
      }
    }
  }

  void checkOperands(const Function &F, const BasicBlock &,
                     const Instruction &I,
                     const std::map<std::string, int> &DefIndex,
                     const std::map<std::string, const Instruction *> &DefInstr,
                     int UseIdx) {
    for (const Value &V : I.Ops) {
      if (!V.isTemp())
        continue;
      auto It = DefIndex.find(V.Name);
      if (It == DefIndex.end()) {
        err("dangling-value", F.Name, "use of undefined value %" + V.Name);
        continue;
      }
      if (It->second > UseIdx)
        err("def-after-use", F.Name,
            "value %" + V.Name + " used before its definition");
      // Stated operand types must agree with the def. Frame indices are
      // untyped addresses; their uses state the access type themselves.
      auto DI = DefInstr.find(V.Name);
      if (DI != DefInstr.end() && DI->second->Op != Opcode::FrameIndex &&
          !(V.Ty == DI->second->ResultTy))
        err("type-mismatch", F.Name,
            "operand %" + V.Name + " stated as " + V.Ty.str() +
                " but defined as " + DI->second->ResultTy.str());
      if (DI == DefInstr.end()) {
        // Defined by a parameter.
        for (const Param &P : F.Params)
          if (P.Name == V.Name && !(V.Ty == P.Ty))
            err("type-mismatch", F.Name,
                "operand %" + V.Name + " stated as " + V.Ty.str() +
                    " but parameter has type " + P.Ty.str());
      }
    }
  }

  void checkInstr(const Function &F, const BasicBlock &B, const Instruction &I,
                  const std::set<std::string> &BlockNames) {
    switch (I.Op) {
    case Opcode::Alloca:
      if (F.Machine)
        err("machine-form", F.Name,
            "alloca is not valid in machine form (block %" + B.Name + ")");
      if (I.Align != 4 && I.Align != 8)
        err("bad-align", F.Name,
            "alloca %" + I.Result + " alignment must be 4 or 8");
      break;
    case Opcode::FrameIndex:
      if (!F.Machine)
        err("machine-form", F.Name,
            "frameindex requires machine form (block %" + B.Name + ")");
      break;
    case Opcode::Load:
      if (!I.Ops[0].Ty.isPtr())
        err("type-mismatch", F.Name,
            "load pointer operand has non-pointer type " + I.Ops[0].Ty.str());
      else if (!(I.Ops[0].Ty.pointee() == I.ResultTy))
        err("type-mismatch", F.Name,
            "load of " + I.ResultTy.str() + " through pointer to " +
                I.Ops[0].Ty.pointee().str());
      break;
    case Opcode::Store:
      if (!I.Ops[1].Ty.isPtr())
        err("type-mismatch", F.Name,
            "store pointer operand has non-pointer type " + I.Ops[1].Ty.str());
      else if (!(I.Ops[1].Ty.pointee() == I.Ops[0].Ty))
        err("type-mismatch", F.Name,
            "store of " + I.Ops[0].Ty.str() + " through pointer to " +
                I.Ops[1].Ty.pointee().str());
      break;
    case Opcode::BitCast:
      if (!I.Ops[0].Ty.isPtr() || !I.ResultTy.isPtr())
        err("type-mismatch", F.Name, "bitcast requires pointer types");
      else if (I.Ops[0].Ty.Space != I.ResultTy.Space)
        err("type-mismatch", F.Name,
            "bitcast may not change address space; use addrspacecast");
      break;
    case Opcode::AddrSpaceCast:
      if (!I.Ops[0].Ty.isPtr() || !I.ResultTy.isPtr())
        err("type-mismatch", F.Name, "addrspacecast requires pointer types");
      else {
        if (!(I.Ops[0].Ty.pointee() == I.ResultTy.pointee()))
          err("type-mismatch", F.Name,
              "addrspacecast may not change the pointee type");
        if (I.Ops[0].Ty.Space == I.ResultTy.Space)
          err("type-mismatch", F.Name,
              "addrspacecast must change the address space");
      }
      break;
    case Opcode::GetElement:
      if (!I.Ops[0].Ty.isPtr()) {
        err("type-mismatch", F.Name, "getelement requires a pointer operand");
      } else {
        Type Pointee = I.Ops[0].Ty.pointee();
        bool Direct = Pointee == I.GepElemTy;
        bool Decay = Pointee.isArray() && Pointee.elem() == I.GepElemTy;
        if (!Direct && !Decay)
          err("type-mismatch", F.Name,
              "getelement element type " + I.GepElemTy.str() +
                  " does not match pointee " + Pointee.str());
      }
      if (!I.Ops[1].Ty.isInt())
        err("type-mismatch", F.Name, "getelement index must be an integer");
      break;
    case Opcode::BinOp:
      if (!I.Ops[0].Ty.isInt())
        err("type-mismatch", F.Name, "arithmetic requires integer operands");
      break;
    case Opcode::Cmp:
      if (I.CK == CmpKind::Eq || I.CK == CmpKind::Ne) {
        if (!I.Ops[0].Ty.isInt() && !I.Ops[0].Ty.isPtr() &&
            !I.Ops[0].Ty.isFn())
          err("type-mismatch", F.Name, "icmp eq/ne requires int, ptr, or fn");
      } else if (!I.Ops[0].Ty.isInt()) {
        err("type-mismatch", F.Name,
            "icmp ordering predicates require integer operands");
      }
      break;
    case Opcode::Br:
      if (!BlockNames.count(I.Target))
        err("unknown-block", F.Name, "branch to undefined block %" + I.Target);
      break;
    case Opcode::CondBr:
      if (!(I.Ops[0].Ty == Type::i1()))
        err("type-mismatch", F.Name, "conditional branch requires i1");
      for (const std::string &T : {I.Target, I.Target2})
        if (!BlockNames.count(T))
          err("unknown-block", F.Name, "branch to undefined block %" + T);
      break;
    case Opcode::Call:
      checkCall(F, I);
      break;
    case Opcode::Ret:
      if (I.Ops.empty()) {
        if (!F.RetTy.isVoid())
          err("type-mismatch", F.Name, "non-void function returns void");
      } else if (!(I.Ops[0].Ty == F.RetTy)) {
        err("type-mismatch", F.Name,
            "return type " + I.Ops[0].Ty.str() + " does not match " +
                F.RetTy.str());
      }
      break;
    case Opcode::Barrier:
      break;
    }
  }

  void checkCall(const Function &F, const Instruction &I) {
    const Value &Callee = I.Ops[0];
    if (Callee.isTemp())
      return; // indirect call: checked dynamically by the simulator
    if (!Callee.isGlobal()) {
      err("unknown-callee", F.Name, "call requires a function reference");
      return;
    }
    const Type *RetTy = nullptr;
    std::vector<Type> Params;
    if (const Function *Target = M.findFunction(Callee.Name)) {
      RetTy = &Target->RetTy;
      for (const Param &P : Target->Params)
        Params.push_back(P.Ty);
    } else {
      auto It = builtinCallees().find(Callee.Name);
      if (It == builtinCallees().end()) {
        err("unknown-callee", F.Name, "call to undefined @" + Callee.Name);
        return;
      }
      RetTy = &It->second.RetTy;
      Params = It->second.Params;
    }
    if (!(I.ResultTy == *RetTy)) {
      err("type-mismatch", F.Name,
          "call to @" + Callee.Name + " states return type " +
              I.ResultTy.str() + " but callee returns " + RetTy->str());
      return;
    }
    if (I.Ops.size() - 1 != Params.size()) {
      err("type-mismatch", F.Name,
          "call to @" + Callee.Name + " passes " +
              std::to_string(I.Ops.size() - 1) + " arguments, expected " +
              std::to_string(Params.size()));
      return;
    }
    for (size_t A = 0; A < Params.size(); ++A)
      if (!(I.Ops[A + 1].Ty == Params[A]))
        err("type-mismatch", F.Name,
            "call to @" + Callee.Name + " argument " + std::to_string(A) +
                " has type " + I.Ops[A + 1].Ty.str() + ", expected " +
                Params[A].str());
  }

  void checkCallGraphAcyclic() {
    // Direct calls between module functions only.
    std::map<std::string, std::set<std::string>> Edges;
    for (const Function &F : M.Functions)
      for (const BasicBlock &B : F.Blocks)
        for (const Instruction &I : B.Instrs)
          if (I.Op == Opcode::Call && I.Ops[0].isGlobal() &&
              M.findFunction(I.Ops[0].Name))
            Edges[F.Name].insert(I.Ops[0].Name);

    std::set<std::string> Done, OnStack;
    for (const Function &F : M.Functions)
      if (!Done.count(F.Name))
        dfsCycle(F.Name, Edges, Done, OnStack);
  }

  bool dfsCycle(const std::string &N,
                const std::map<std::string, std::set<std::string>> &Edges,
                std::set<std::string> &Done, std::set<std::string> &OnStack) {
    OnStack.insert(N);
    auto It = Edges.find(N);
    if (It != Edges.end())
      for (const std::string &S : It->second) {
        if (OnStack.count(S)) {
          err("recursive-call", N, "call cycle through @" + S);
          continue;
        }
        if (!Done.count(S))
          dfsCycle(S, Edges, Done, OnStack);
      }
    OnStack.erase(N);
    Done.insert(N);
    return false;
  }
};

} // namespace

DiagList validate(const Module &M) { return VerifyCtx(M).run(); }

} // namespace omplab
