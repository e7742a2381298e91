//===--- IR.cpp - IR data structure implementation ------------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/IR.h"

#include <cassert>
#include <sstream>

namespace omplab {

std::string Diagnostic::str() const {
  std::ostringstream OS;
  OS << "error[" << Rule << "]";
  if (!Function.empty())
    OS << " in @" << Function;
  if (Loc.valid())
    OS << " at " << Loc.Line << ":" << Loc.Col;
  OS << ": " << Message;
  return OS.str();
}

std::string formatDiags(const DiagList &Diags) {
  std::ostringstream OS;
  for (const Diagnostic &D : Diags)
    OS << D.str() << "\n";
  return OS.str();
}

int addrSpaceNumber(AddrSpace AS) {
  switch (AS) {
  case AddrSpace::Generic:
    return 0;
  case AddrSpace::Global:
    return 1;
  case AddrSpace::Shared:
    return 3;
  case AddrSpace::Local:
    return 5;
  }
  return 0;
}

std::optional<AddrSpace> addrSpaceFromNumber(int N) {
  switch (N) {
  case 0:
    return AddrSpace::Generic;
  case 1:
    return AddrSpace::Global;
  case 3:
    return AddrSpace::Shared;
  case 5:
    return AddrSpace::Local;
  default:
    return std::nullopt;
  }
}

Type Type::ptr(const Type &Pointee, AddrSpace AS) {
  Type T(TypeKind::Ptr);
  T.Space = AS;
  T.Elem = std::make_shared<Type>(Pointee);
  return T;
}

Type Type::array(const Type &ElemTy, int64_t N) {
  Type T(TypeKind::Array);
  T.Count = N;
  T.Elem = std::make_shared<Type>(ElemTy);
  return T;
}

int64_t Type::sizeBytes() const {
  switch (Kind) {
  case TypeKind::Void:
    return 0;
  case TypeKind::I1:
  case TypeKind::I8:
    return 1;
  case TypeKind::I16:
    return 2;
  case TypeKind::I32:
    return 4;
  case TypeKind::Fn:
  case TypeKind::Ptr:
    return 8;
  case TypeKind::Array:
    return Count * Elem->sizeBytes();
  }
  return 0;
}

Type Type::withSpace(AddrSpace AS) const {
  assert(Kind == TypeKind::Ptr);
  Type T = *this;
  T.Space = AS;
  return T;
}

bool Type::operator==(const Type &O) const {
  if (Kind != O.Kind)
    return false;
  switch (Kind) {
  case TypeKind::Ptr:
    return Space == O.Space && *Elem == *O.Elem;
  case TypeKind::Array:
    return Count == O.Count && *Elem == *O.Elem;
  default:
    return true;
  }
}

std::string Type::str() const {
  switch (Kind) {
  case TypeKind::Void:
    return "void";
  case TypeKind::I1:
    return "i1";
  case TypeKind::I8:
    return "i8";
  case TypeKind::I16:
    return "i16";
  case TypeKind::I32:
    return "i32";
  case TypeKind::Fn:
    return "fn";
  case TypeKind::Array:
    return "[" + std::to_string(Count) + " x " + Elem->str() + "]";
  case TypeKind::Ptr: {
    std::string S = Elem->str();
    if (Space != AddrSpace::Generic)
      S += " addrspace(" + std::to_string(addrSpaceNumber(Space)) + ")";
    return S + "*";
  }
  }
  return "void";
}

Value Value::temp(std::string N, Type T) {
  Value V;
  V.Kind = ValueKind::Temp;
  V.Name = std::move(N);
  V.Ty = std::move(T);
  return V;
}

Value Value::constInt(int64_t X, Type T) {
  Value V;
  V.Kind = ValueKind::ConstInt;
  V.IntVal = X;
  V.Ty = std::move(T);
  return V;
}

Value Value::null(Type T) {
  Value V;
  V.Kind = ValueKind::Null;
  V.Ty = std::move(T);
  return V;
}

Value Value::global(std::string N, Type T) {
  Value V;
  V.Kind = ValueKind::GlobalRef;
  V.Name = std::move(N);
  V.Ty = std::move(T);
  return V;
}

bool Value::operator==(const Value &O) const {
  return Kind == O.Kind && Name == O.Name && IntVal == O.IntVal && Ty == O.Ty;
}

bool Instruction::operator==(const Instruction &O) const {
  return Op == O.Op && Result == O.Result && ResultTy == O.ResultTy &&
         Ops == O.Ops && AllocaTy == O.AllocaTy && Align == O.Align &&
         Candidate == O.Candidate && BK == O.BK && CK == O.CK &&
         Target == O.Target && Target2 == O.Target2 &&
         GepElemTy == O.GepElemTy && Slot == O.Slot && Base == O.Base;
}

bool BasicBlock::operator==(const BasicBlock &O) const {
  return Name == O.Name && Tag == O.Tag && Instrs == O.Instrs;
}

BasicBlock *Function::findBlock(const std::string &N) {
  for (BasicBlock &B : Blocks)
    if (B.Name == N)
      return &B;
  return nullptr;
}

const BasicBlock *Function::findBlock(const std::string &N) const {
  return const_cast<Function *>(this)->findBlock(N);
}

bool Function::operator==(const Function &O) const {
  return Name == O.Name && RetTy == O.RetTy && Params == O.Params &&
         Kernel == O.Kernel && Machine == O.Machine && Blocks == O.Blocks;
}

std::string mapDirStr(MapDir D) {
  switch (D) {
  case MapDir::To:
    return "to";
  case MapDir::From:
    return "from";
  case MapDir::ToFrom:
    return "tofrom";
  case MapDir::None:
    break;
  }
  return "none";
}

bool GlobalVar::operator==(const GlobalVar &O) const {
  return Name == O.Name && ValTy == O.ValTy && Map == O.Map && Init == O.Init;
}

bool DepotSlot::operator==(const DepotSlot &O) const {
  return Offset == O.Offset && Size == O.Size && Align == O.Align &&
         SharedResident == O.SharedResident && Owners == O.Owners;
}

std::optional<std::string> DepotLayout::findSharedLocalOverlap() const {
  for (size_t I = 0; I < Slots.size(); ++I) {
    const DepotSlot &S = Slots[I];
    if (!S.SharedResident || S.Owners.size() < 2)
      continue;
    // SharedResident is set when any owner is shared; a second owner that
    // arrived through a merge is a local variable sharing the offset.
    std::string Desc = "slot " + std::to_string(I) + " at offset " +
                       std::to_string(S.Offset) + " hosts";
    for (const std::string &W : S.Owners)
      Desc += " %" + W;
    return Desc;
  }
  return std::nullopt;
}

bool DepotLayout::operator==(const DepotLayout &O) const {
  return Slots == O.Slots && TotalLocal == O.TotalLocal &&
         TotalShared == O.TotalShared && HasSharedDepot == O.HasSharedDepot;
}

bool FrameGroup::operator==(const FrameGroup &O) const {
  return Root == O.Root && Members == O.Members;
}

Function *Module::findFunction(const std::string &N) {
  for (Function &F : Functions)
    if (F.Name == N)
      return &F;
  return nullptr;
}

const Function *Module::findFunction(const std::string &N) const {
  return const_cast<Module *>(this)->findFunction(N);
}

const GlobalVar *Module::findGlobal(const std::string &N) const {
  for (const GlobalVar &G : Globals)
    if (G.Name == N)
      return &G;
  return nullptr;
}

Function *Module::kernel() {
  for (Function &F : Functions)
    if (F.Kernel)
      return &F;
  return nullptr;
}

const Function *Module::kernel() const {
  return const_cast<Module *>(this)->kernel();
}

const FrameGroup *Module::groupOf(const std::string &Fn) const {
  for (const FrameGroup &G : Groups)
    for (const std::string &M : G.Members)
      if (M == Fn)
        return &G;
  return nullptr;
}

DepotLayout *Module::layoutFor(const std::string &Root) {
  for (auto &P : Layouts)
    if (P.first == Root)
      return &P.second;
  return nullptr;
}

const DepotLayout *Module::layoutFor(const std::string &Root) const {
  return const_cast<Module *>(this)->layoutFor(Root);
}

bool Module::operator==(const Module &O) const {
  return Globals == O.Globals && Functions == O.Functions &&
         Launch == O.Launch && Groups == O.Groups && Layouts == O.Layouts;
}

const std::map<std::string, BuiltinSig> &builtinCallees() {
  static const std::map<std::string, BuiltinSig> Table = [] {
    std::map<std::string, BuiltinSig> T;
    Type I32 = Type::i32();
    Type I8p = Type::ptr(Type::i8());
    Type I8pp = Type::ptr(I8p);
    Type I8ppp = Type::ptr(I8pp);
    Type Fn = Type::fn();
    Type Fnp = Type::ptr(Fn);
    T[KernelInitFn] = {Type::voidTy(), {I32}};
    T[PrepareParallelFn] = {I8pp, {Fn, I32}};
    T[KernelParallelFn] = {Type::i1(), {Fnp, I8ppp}};
    T[EndParallelFn] = {Type::voidTy(), {}};
    T[KernelDeinitFn] = {Type::voidTy(), {}};
    T[ThreadNumFn] = {I32, {}};
    T[TeamNumFn] = {I32, {}};
    T[NumThreadsFn] = {I32, {}};
    T[NumTeamsFn] = {I32, {}};
    T[SimTidFn] = {I32, {}};
    T[SimTeamSizeFn] = {I32, {}};
    T[ParallelBeginFn] = {Type::voidTy(), {I32}};
    T[ParallelEndFn] = {Type::voidTy(), {I32}};
    return T;
  }();
  return Table;
}

bool isRuntimeCall(const std::string &Callee) {
  return Callee.rfind("__kmpc_", 0) == 0 || Callee.rfind("omp_", 0) == 0 ||
         Callee.rfind("omp.sim.", 0) == 0;
}

} // namespace omplab
