//===--- IR.h - Typed device IR with address spaces -------------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// A small SSA-like IR for a single offloaded target region. Values are named
// virtual registers, memory is reached through typed pointers that carry an
// address space, and a machine form replaces allocas with frame indices that
// are resolved against a per-function-group depot layout.
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_IR_H
#define OMPLAB_IR_H

#include "omplab/Diag.h"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace omplab {

enum class AddrSpace { Generic, Local, Shared, Global };

/// Numbers follow the NVPTX convention so textual IR reads familiarly.
int addrSpaceNumber(AddrSpace AS);
std::optional<AddrSpace> addrSpaceFromNumber(int N);

//===----------------------------------------------------------------------===//
// Types
//===----------------------------------------------------------------------===//

enum class TypeKind { Void, I1, I8, I16, I32, Fn, Ptr, Array };

class Type {
public:
  TypeKind Kind = TypeKind::Void;
  AddrSpace Space = AddrSpace::Generic; // pointers only
  int64_t Count = 0;                    // arrays only
  std::shared_ptr<Type> Elem;           // pointee / array element

  Type() = default;
  explicit Type(TypeKind K) : Kind(K) {}

  static Type voidTy() { return Type(TypeKind::Void); }
  static Type i1() { return Type(TypeKind::I1); }
  static Type i8() { return Type(TypeKind::I8); }
  static Type i16() { return Type(TypeKind::I16); }
  static Type i32() { return Type(TypeKind::I32); }
  static Type fn() { return Type(TypeKind::Fn); }
  static Type ptr(const Type &Pointee, AddrSpace AS = AddrSpace::Generic);
  static Type array(const Type &ElemTy, int64_t N);

  bool isVoid() const { return Kind == TypeKind::Void; }
  bool isInt() const {
    return Kind == TypeKind::I1 || Kind == TypeKind::I8 ||
           Kind == TypeKind::I16 || Kind == TypeKind::I32;
  }
  bool isPtr() const { return Kind == TypeKind::Ptr; }
  bool isFn() const { return Kind == TypeKind::Fn; }
  bool isArray() const { return Kind == TypeKind::Array; }

  const Type &pointee() const { return *Elem; }
  const Type &elem() const { return *Elem; }

  /// Storage size in bytes. Pointers and fn refs are 8, i32 is 4.
  int64_t sizeBytes() const;

  Type withSpace(AddrSpace AS) const;

  bool operator==(const Type &O) const;
  bool operator!=(const Type &O) const { return !(*this == O); }

  std::string str() const;
};

//===----------------------------------------------------------------------===//
// Values
//===----------------------------------------------------------------------===//

enum class ValueKind { None, Temp, ConstInt, Null, GlobalRef };

struct Value {
  ValueKind Kind = ValueKind::None;
  std::string Name;    // Temp (%name) / GlobalRef (@name)
  int64_t IntVal = 0;  // ConstInt
  Type Ty;

  static Value temp(std::string N, Type T);
  static Value constInt(int64_t V, Type T = Type::i32());
  static Value null(Type T);
  static Value global(std::string N, Type T);

  bool isTemp() const { return Kind == ValueKind::Temp; }
  bool isConst() const { return Kind == ValueKind::ConstInt; }
  bool isNull() const { return Kind == ValueKind::Null; }
  bool isGlobal() const { return Kind == ValueKind::GlobalRef; }

  bool operator==(const Value &O) const;
};

//===----------------------------------------------------------------------===//
// Instructions
//===----------------------------------------------------------------------===//

enum class Opcode {
  Alloca,
  Load,
  Store,
  BitCast,
  AddrSpaceCast,
  GetElement,
  BinOp,
  Cmp,
  Br,
  CondBr,
  Call,
  Ret,
  Barrier,
  FrameIndex, // machine form only
};

enum class BinKind { Add, Sub, Mul };
enum class CmpKind { Eq, Ne, Lt, Le, Gt, Ge };

/// Base register a FrameIndex resolves against after frame lowering.
enum class BaseReg { FrameLocal, Shared };

struct Instruction {
  Opcode Op;
  std::string Result; // empty when no result
  Type ResultTy = Type::voidTy();
  std::vector<Value> Ops;

  // Alloca
  Type AllocaTy;
  int Align = 0;
  bool Candidate = false; // sharing-candidate marker from the frontend

  // BinOp / Cmp
  BinKind BK = BinKind::Add;
  CmpKind CK = CmpKind::Eq;

  // Br / CondBr
  std::string Target, Target2;

  // GetElement element type
  Type GepElemTy;

  // FrameIndex
  int Slot = -1;
  BaseReg Base = BaseReg::FrameLocal;

  bool isTerminator() const {
    return Op == Opcode::Br || Op == Opcode::CondBr || Op == Opcode::Ret;
  }
  bool operator==(const Instruction &O) const;
};

/// Tags drive structural checks: [seq] blocks hold master-only sequential
/// code, [worker] blocks form the worker state machine.
enum class BlockTag { None, Seq, Worker };

struct BasicBlock {
  std::string Name;
  BlockTag Tag = BlockTag::None;
  std::vector<Instruction> Instrs;

  bool operator==(const BasicBlock &O) const;
};

struct Param {
  std::string Name;
  Type Ty;
  bool operator==(const Param &O) const {
    return Name == O.Name && Ty == O.Ty;
  }
};

struct Function {
  std::string Name;
  Type RetTy = Type::voidTy();
  std::vector<Param> Params;
  bool Kernel = false;  // the one kernel entry
  bool Machine = false; // frame-index form
  std::vector<BasicBlock> Blocks;

  BasicBlock *findBlock(const std::string &N);
  const BasicBlock *findBlock(const std::string &N) const;
  bool operator==(const Function &O) const;
};

enum class MapDir { None, To, From, ToFrom };

std::string mapDirStr(MapDir D);

/// A mapped device buffer. Lives in the Global address space and is
/// addressed by symbol; the simulator materializes and copies it.
struct GlobalVar {
  std::string Name;
  Type ValTy; // array of i32 in v1
  MapDir Map = MapDir::None;
  int64_t Init = 0; // uniform fill value for every element

  Type refType() const { return Type::ptr(ValTy, AddrSpace::Global); }
  bool operator==(const GlobalVar &O) const;
};

//===----------------------------------------------------------------------===//
// Depot layout
//===----------------------------------------------------------------------===//

struct DepotSlot {
  int64_t Offset = 0;
  int64_t Size = 0;
  int Align = 8;
  bool SharedResident = false;
  /// Variables living in this slot; more than one only after coloring merges.
  std::vector<std::string> Owners;

  bool operator==(const DepotSlot &O) const;
};

struct DepotLayout {
  std::vector<DepotSlot> Slots;
  int64_t TotalLocal = 0;
  /// Mirror of the local depot: identical size and offsets.
  int64_t TotalShared = 0;
  bool HasSharedDepot = false;

  int64_t stackBytes() const { return TotalLocal; }

  /// A slot hosting both a shared-resident variable and a plain local one is
  /// a miscompile; returns a description of the first such slot.
  std::optional<std::string> findSharedLocalOverlap() const;

  bool operator==(const DepotLayout &O) const;
};

/// Functions whose frames are folded into one depot. The kernel entry and the
/// worker loop form one group (the worker runs on the kernel's stack); every
/// outlined region and wrapper is its own group.
struct FrameGroup {
  std::string Root;
  std::vector<std::string> Members;

  bool operator==(const FrameGroup &O) const;
};

//===----------------------------------------------------------------------===//
// Module
//===----------------------------------------------------------------------===//

struct LaunchDefaults {
  int Teams = 1;
  int Workers = 32;
  bool operator==(const LaunchDefaults &O) const {
    return Teams == O.Teams && Workers == O.Workers;
  }
};

struct Module {
  std::vector<GlobalVar> Globals;
  std::vector<Function> Functions;
  std::optional<LaunchDefaults> Launch;

  // Machine form only.
  std::vector<FrameGroup> Groups;
  std::vector<std::pair<std::string, DepotLayout>> Layouts;

  Function *findFunction(const std::string &N);
  const Function *findFunction(const std::string &N) const;
  const GlobalVar *findGlobal(const std::string &N) const;
  Function *kernel();
  const Function *kernel() const;

  const FrameGroup *groupOf(const std::string &Fn) const;
  DepotLayout *layoutFor(const std::string &Root);
  const DepotLayout *layoutFor(const std::string &Root) const;

  bool operator==(const Module &O) const;
};

//===----------------------------------------------------------------------===//
// Builtin callees
//===----------------------------------------------------------------------===//

struct BuiltinSig {
  Type RetTy;
  std::vector<Type> Params;
};

/// Runtime entry points and frontend markers the verifier accepts without a
/// definition in the module.
const std::map<std::string, BuiltinSig> &builtinCallees();

bool isRuntimeCall(const std::string &Callee);

// Well-known names.
inline constexpr const char *KernelInitFn = "__kmpc_kernel_init";
inline constexpr const char *PrepareParallelFn = "__kmpc_kernel_prepare_parallel";
inline constexpr const char *KernelParallelFn = "__kmpc_kernel_parallel";
inline constexpr const char *EndParallelFn = "__kmpc_kernel_end_parallel";
inline constexpr const char *KernelDeinitFn = "__kmpc_kernel_deinit";
inline constexpr const char *ThreadNumFn = "omp_get_thread_num";
inline constexpr const char *TeamNumFn = "omp_get_team_num";
inline constexpr const char *NumThreadsFn = "omp_get_num_threads";
inline constexpr const char *NumTeamsFn = "omp_get_num_teams";
inline constexpr const char *SimTidFn = "omp.sim.tid";
inline constexpr const char *SimTeamSizeFn = "omp.sim.team_size";
inline constexpr const char *ParallelBeginFn = "omp.parallel.begin";
inline constexpr const char *ParallelEndFn = "omp.parallel.end";
inline constexpr const char *WorkerFnName = "__omp_worker";

} // namespace omplab

#endif // OMPLAB_IR_H
