//===--- IRPrinter.cpp - Canonical textual IR emission --------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/IRPrinter.h"

#include <sstream>

namespace omplab {

namespace {

std::string valueStr(const Value &V) {
  switch (V.Kind) {
  case ValueKind::Temp:
    return "%" + V.Name;
  case ValueKind::ConstInt:
    return std::to_string(V.IntVal);
  case ValueKind::Null:
    return "null";
  case ValueKind::GlobalRef:
    return "@" + V.Name;
  case ValueKind::None:
    break;
  }
  return "<none>";
}

std::string typedValueStr(const Value &V) {
  return V.Ty.str() + " " + valueStr(V);
}

const char *binKindStr(BinKind K) {
  switch (K) {
  case BinKind::Add:
    return "add";
  case BinKind::Sub:
    return "sub";
  case BinKind::Mul:
    return "mul";
  }
  return "add";
}

const char *cmpKindStr(CmpKind K) {
  switch (K) {
  case CmpKind::Eq:
    return "eq";
  case CmpKind::Ne:
    return "ne";
  case CmpKind::Lt:
    return "lt";
  case CmpKind::Le:
    return "le";
  case CmpKind::Gt:
    return "gt";
  case CmpKind::Ge:
    return "ge";
  }
  return "eq";
}

} // namespace

std::string printInstruction(const Instruction &I) {
  std::ostringstream OS;
  if (!I.Result.empty())
    OS << "%" << I.Result << " = ";
  switch (I.Op) {
  case Opcode::Alloca:
    OS << "alloca " << I.AllocaTy.str() << ", align " << I.Align;
    if (I.Candidate)
      OS << ", candidate";
    break;
  case Opcode::Load:
    OS << "load " << I.ResultTy.str() << ", " << typedValueStr(I.Ops[0]);
    break;
  case Opcode::Store:
    OS << "store " << typedValueStr(I.Ops[0]) << ", "
       << typedValueStr(I.Ops[1]);
    break;
  case Opcode::BitCast:
    OS << "bitcast " << typedValueStr(I.Ops[0]) << " to " << I.ResultTy.str();
    break;
  case Opcode::AddrSpaceCast:
    OS << "addrspacecast " << typedValueStr(I.Ops[0]) << " to "
       << I.ResultTy.str();
    break;
  case Opcode::GetElement:
    OS << "getelement " << I.GepElemTy.str() << ", " << typedValueStr(I.Ops[0])
       << ", " << typedValueStr(I.Ops[1]);
    break;
  case Opcode::BinOp:
    OS << binKindStr(I.BK) << " " << I.Ops[0].Ty.str() << " "
       << valueStr(I.Ops[0]) << ", " << valueStr(I.Ops[1]);
    break;
  case Opcode::Cmp:
    OS << "icmp " << cmpKindStr(I.CK) << " " << I.Ops[0].Ty.str() << " "
       << valueStr(I.Ops[0]) << ", " << valueStr(I.Ops[1]);
    break;
  case Opcode::Br:
    OS << "br label %" << I.Target;
    break;
  case Opcode::CondBr:
    OS << "br i1 " << valueStr(I.Ops[0]) << ", label %" << I.Target
       << ", label %" << I.Target2;
    break;
  case Opcode::Call: {
    OS << "call " << I.ResultTy.str() << " " << valueStr(I.Ops[0]) << "(";
    for (size_t A = 1; A < I.Ops.size(); ++A) {
      if (A > 1)
        OS << ", ";
      OS << typedValueStr(I.Ops[A]);
    }
    OS << ")";
    break;
  }
  case Opcode::Ret:
    if (I.Ops.empty())
      OS << "ret void";
    else
      OS << "ret " << typedValueStr(I.Ops[0]);
    break;
  case Opcode::Barrier:
    OS << "barrier";
    break;
  case Opcode::FrameIndex:
    OS << "frameindex " << I.Slot << ", "
       << (I.Base == BaseReg::Shared ? "shared" : "local");
    if (I.Candidate)
      OS << ", candidate";
    break;
  }
  return OS.str();
}

std::string printFunction(const Function &F) {
  std::ostringstream OS;
  OS << "define " << F.RetTy.str() << " @" << F.Name << "(";
  for (size_t I = 0; I < F.Params.size(); ++I) {
    if (I)
      OS << ", ";
    OS << F.Params[I].Ty.str() << " %" << F.Params[I].Name;
  }
  OS << ")";
  if (F.Kernel)
    OS << " kernel";
  if (F.Machine)
    OS << " machine";
  OS << " {\n";
  for (const BasicBlock &B : F.Blocks) {
    OS << B.Name;
    if (B.Tag == BlockTag::Seq)
      OS << " [seq]";
    else if (B.Tag == BlockTag::Worker)
      OS << " [worker]";
    OS << ":\n";
    for (const Instruction &I : B.Instrs)
      OS << "  " << printInstruction(I) << "\n";
  }
  OS << "}\n";
  return OS.str();
}

std::string printModule(const Module &M) {
  std::ostringstream OS;
  bool Wrote = false;
  for (const GlobalVar &G : M.Globals) {
    OS << "@" << G.Name << " = global " << G.ValTy.str();
    if (G.Init != 0)
      OS << ", init(" << G.Init << ")";
    if (G.Map != MapDir::None)
      OS << ", map(" << mapDirStr(G.Map) << ")";
    OS << "\n";
    Wrote = true;
  }
  if (M.Launch) {
    OS << "launch teams(" << M.Launch->Teams << ") workers("
       << M.Launch->Workers << ")\n";
    Wrote = true;
  }
  for (const Function &F : M.Functions) {
    if (Wrote)
      OS << "\n";
    OS << printFunction(F);
    Wrote = true;
  }
  for (const FrameGroup &G : M.Groups) {
    const DepotLayout *L = nullptr;
    for (const auto &P : M.Layouts)
      if (P.first == G.Root)
        L = &P.second;
    if (!L)
      continue;
    OS << "\nframe @" << G.Root << " members [";
    for (size_t I = 0; I < G.Members.size(); ++I) {
      if (I)
        OS << ", ";
      OS << "@" << G.Members[I];
    }
    OS << "] {\n";
    for (size_t I = 0; I < L->Slots.size(); ++I) {
      const DepotSlot &S = L->Slots[I];
      OS << "  slot " << I << ": offset " << S.Offset << ", size " << S.Size
         << ", align " << S.Align << ", "
         << (S.SharedResident ? "shared" : "local");
      for (const std::string &W : S.Owners)
        OS << ", %" << W;
      OS << "\n";
    }
    OS << "  total " << L->TotalLocal;
    if (L->HasSharedDepot)
      OS << ", mirrored";
    OS << "\n}\n";
  }
  return OS.str();
}

} // namespace omplab
