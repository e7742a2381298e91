//===--- AstLowering.cpp - AST to pre-codegen IR --------------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/AstLowering.h"

#include <cassert>
#include <set>

using namespace omplab;

namespace {

class Lowerer {
public:
  Lowerer(const ProgramAst &Ast, const SharingInfo &Info,
          const std::string &Stem)
      : Ast(Ast), Info(Info), Stem(Stem) {}

  Module run() {
    collectRefs();
    emitGlobals();

    F.Name = "__omp_offload_" + Stem;
    F.Kernel = true;
    newBlock("entry");

    for (const auto &D : Ast.Host) {
      if (GlobalName.count(D.DeclId) || !Referenced.count(D.DeclId))
        continue;
      // Unmapped host scalar: materialize with its host value.
      Value Addr = emitAlloca(D.DeclId, D.Name, Type::i32());
      emit(store(Value::constInt(D.Init), Addr));
    }
    for (const auto &S : Ast.Target.Body)
      emitStmt(*S);
    Instruction RetI;
    RetI.Op = Opcode::Ret;
    emit(std::move(RetI));

    M.Functions.push_back(std::move(F));
    LaunchDefaults L;
    if (Ast.Target.NumTeams > 0)
      L.Teams = static_cast<int>(Ast.Target.NumTeams);
    if (Ast.Target.ThreadLimit > 0)
      L.Workers = static_cast<int>(Ast.Target.ThreadLimit);
    M.Launch = L;
    return std::move(M);
  }

private:
  //===--------------------------------------------------------------------===
  // Bookkeeping
  //===--------------------------------------------------------------------===

  BasicBlock &bb() { return F.Blocks[CurBlock]; }

  void emit(Instruction I) { bb().Instrs.push_back(std::move(I)); }

  size_t newBlock(const std::string &Name) {
    BasicBlock B;
    B.Name = Name;
    F.Blocks.push_back(std::move(B));
    CurBlock = F.Blocks.size() - 1;
    return CurBlock;
  }

  std::string uniqueName(const std::string &Hint) {
    if (Used.insert(Hint).second)
      return Hint;
    for (int N = 1;; ++N) {
      std::string Cand = Hint + "." + std::to_string(N);
      if (Used.insert(Cand).second)
        return Cand;
    }
  }

  Value temp(Type Ty) {
    return Value::temp(std::to_string(NextTemp++), std::move(Ty));
  }

  Instruction store(Value V, Value Addr) {
    Instruction I;
    I.Op = Opcode::Store;
    I.Ops = {std::move(V), std::move(Addr)};
    return I;
  }

  Value emitLoad(Value Addr) {
    Instruction I;
    I.Op = Opcode::Load;
    I.ResultTy = Addr.Ty.pointee();
    Value R = temp(I.ResultTy);
    I.Result = R.Name;
    I.Ops = {std::move(Addr)};
    emit(std::move(I));
    return R;
  }

  Value emitCall(const std::string &Callee, Type RetTy,
                 std::vector<Value> Args) {
    Instruction I;
    I.Op = Opcode::Call;
    I.ResultTy = RetTy;
    I.Ops.push_back(Value::global(Callee, Type::fn()));
    for (auto &A : Args)
      I.Ops.push_back(std::move(A));
    Value R;
    if (!RetTy.isVoid()) {
      R = temp(RetTy);
      I.Result = R.Name;
    }
    emit(std::move(I));
    return R;
  }

  Value emitBin(BinKind BK, Value A, Value B) {
    Instruction I;
    I.Op = Opcode::BinOp;
    I.BK = BK;
    I.ResultTy = A.Ty;
    Value R = temp(I.ResultTy);
    I.Result = R.Name;
    I.Ops = {std::move(A), std::move(B)};
    emit(std::move(I));
    return R;
  }

  void emitBr(const std::string &Target) {
    Instruction I;
    I.Op = Opcode::Br;
    I.Target = Target;
    emit(std::move(I));
  }

  void emitCondBr(Value Cond, const std::string &T, const std::string &E) {
    Instruction I;
    I.Op = Opcode::CondBr;
    I.Ops = {std::move(Cond)};
    I.Target = T;
    I.Target2 = E;
    emit(std::move(I));
  }

  Value emitAlloca(int DeclId, const std::string &Name, Type ValTy) {
    Instruction I;
    I.Op = Opcode::Alloca;
    I.AllocaTy = ValTy;
    I.Align = 8;
    I.Candidate = Info.isCandidate(DeclId);
    I.ResultTy = Type::ptr(ValTy);
    Value R = Value::temp(uniqueName(Name), I.ResultTy);
    I.Result = R.Name;
    emit(std::move(I));
    DeclAddr[DeclId] = R;
    return R;
  }

  //===--------------------------------------------------------------------===
  // Setup
  //===--------------------------------------------------------------------===

  void collectRefs() {
    for (const auto &S : Ast.Target.Body)
      refStmt(*S);
  }

  void refStmt(const Stmt &S) {
    auto RefName = [&](const std::string &N) {
      for (const auto &D : Ast.Host)
        if (D.Name == N)
          Referenced.insert(D.DeclId);
    };
    if (S.Kind == StmtKind::Assign)
      RefName(S.Name);
    if (S.Init)
      refExpr(*S.Init);
    if (S.Index)
      refExpr(*S.Index);
    if (S.Value)
      refExpr(*S.Value);
    if (S.Bound)
      refExpr(*S.Bound);
    for (const auto &Sub : S.Body)
      refStmt(*Sub);
  }

  void refExpr(const Expr &E) {
    auto RefName = [&](const std::string &N) {
      for (const auto &D : Ast.Host)
        if (D.Name == N)
          Referenced.insert(D.DeclId);
    };
    switch (E.Kind) {
    case ExprKind::VarRef:
      RefName(E.Name);
      break;
    case ExprKind::Index:
      RefName(E.Name);
      refExpr(*E.Idx);
      break;
    case ExprKind::Binary:
      refExpr(*E.L);
      refExpr(*E.R);
      break;
    default:
      break;
    }
  }

  void emitGlobals() {
    std::set<std::string> Mapped;
    for (const auto &Mc : Ast.Target.Maps)
      Mapped.insert(Mc.Name);
    for (const auto &D : Ast.Host) {
      if (!Mapped.count(D.Name))
        continue;
      GlobalVar G;
      G.Name = D.Name;
      G.ValTy = D.IsArray ? Type::array(Type::i32(), D.ArraySize) : Type::i32();
      G.Init = D.Init;
      for (const auto &Mc : Ast.Target.Maps)
        if (Mc.Name == D.Name)
          G.Map = Mc.Dir;
      GlobalName[D.DeclId] = D.Name;
      M.Globals.push_back(std::move(G));
    }
  }

  //===--------------------------------------------------------------------===
  // Expressions
  //===--------------------------------------------------------------------===

  int declIdOf(const std::string &Name) const {
    for (const auto &[Id, N] : Info.DeclName)
      if (N == Name)
        return Id;
    return -1;
  }

  Value scalarAddr(const std::string &Name) {
    int Id = declIdOf(Name);
    auto G = GlobalName.find(Id);
    if (G != GlobalName.end()) {
      const GlobalVar *GV = M.findGlobal(G->second);
      assert(GV && !GV->ValTy.isArray());
      return Value::global(GV->Name, GV->refType());
    }
    auto It = DeclAddr.find(Id);
    assert(It != DeclAddr.end() && "scalar lowered before its declaration");
    return It->second;
  }

  Value elementAddr(const std::string &Name, Value Index) {
    int Id = declIdOf(Name);
    Value Base;
    auto G = GlobalName.find(Id);
    if (G != GlobalName.end()) {
      const GlobalVar *GV = M.findGlobal(G->second);
      assert(GV);
      Base = Value::global(GV->Name, GV->refType());
    } else {
      auto It = DeclAddr.find(Id);
      assert(It != DeclAddr.end() && "array lowered before its declaration");
      Base = It->second;
    }
    return elementAddrOf(std::move(Base), std::move(Index));
  }

  Value emitExpr(const Expr &E) {
    switch (E.Kind) {
    case ExprKind::IntLit:
      return Value::constInt(E.IntVal);
    case ExprKind::VarRef:
      return emitLoad(scalarAddr(E.Name));
    case ExprKind::Index:
      return emitLoad(elementAddr(E.Name, emitExpr(*E.Idx)));
    case ExprKind::Binary: {
      Value L = emitExpr(*E.L);
      Value R = emitExpr(*E.R);
      BinKind BK = E.Op == '+' ? BinKind::Add
                               : (E.Op == '-' ? BinKind::Sub : BinKind::Mul);
      return emitBin(BK, std::move(L), std::move(R));
    }
    case ExprKind::ThreadNum:
      return emitCall(ThreadNumFn, Type::i32(), {});
    case ExprKind::TeamNum:
      return emitCall(TeamNumFn, Type::i32(), {});
    }
    assert(false && "unhandled expression");
    return Value();
  }

  //===--------------------------------------------------------------------===
  // Statements
  //===--------------------------------------------------------------------===

  void emitStmt(const Stmt &S) {
    switch (S.Kind) {
    case StmtKind::Decl:
      emitDecl(S);
      break;
    case StmtKind::Assign:
      emitAssign(S);
      break;
    case StmtKind::For:
      emitSequentialFor(S);
      break;
    case StmtKind::Parallel:
      emitParallel(S);
      break;
    case StmtKind::Block:
      for (const auto &Sub : S.Body)
        emitStmt(*Sub);
      break;
    }
  }

  void emitDecl(const Stmt &S) {
    if (S.IsArray) {
      Value Addr =
          emitAlloca(S.DeclId, S.Name, Type::array(Type::i32(), S.ArraySize));
      // Frame memory starts zeroed; only nonzero fills need stores.
      int64_t Fill = 0;
      if (S.Init) {
        if (S.Init->Kind == ExprKind::IntLit)
          Fill = S.Init->IntVal;
        else
          assert(false && "array initializer must be folded by the parser");
      }
      if (Fill != 0) {
        for (int64_t I = 0; I < S.ArraySize; ++I) {
          Value P = elementAddrOf(Addr, Value::constInt(I));
          emit(store(Value::constInt(Fill), P));
        }
      }
      return;
    }
    Value Addr = emitAlloca(S.DeclId, S.Name, Type::i32());
    if (S.Init)
      emit(store(emitExpr(*S.Init), Addr));
  }

  Value elementAddrOf(Value Base, Value Index) {
    Instruction I;
    I.Op = Opcode::GetElement;
    Type Pointee = Base.Ty.pointee();
    I.GepElemTy = Pointee.isArray() ? Pointee.elem() : Pointee;
    I.ResultTy = Type::ptr(I.GepElemTy, Base.Ty.Space);
    Value R = temp(I.ResultTy);
    I.Result = R.Name;
    I.Ops = {std::move(Base), std::move(Index)};
    emit(std::move(I));
    return R;
  }

  void emitAssign(const Stmt &S) {
    Value Addr;
    if (S.Index)
      Addr = elementAddr(S.Name, emitExpr(*S.Index));
    else
      Addr = scalarAddr(S.Name);
    Value V = emitExpr(*S.Value);
    if (S.Compound) {
      Value Old = emitLoad(Addr);
      V = emitBin(BinKind::Add, std::move(Old), std::move(V));
    }
    emit(store(std::move(V), Addr));
  }

  /// for (int i = A; i < B; i++) body
  void emitSequentialFor(const Stmt &S) {
    int Id = LoopId++;
    std::string CondBB = "for.cond." + std::to_string(Id);
    std::string BodyBB = "for.body." + std::to_string(Id);
    std::string EndBB = "for.end." + std::to_string(Id);

    Value Counter = emitAlloca(S.DeclId, S.Name, Type::i32());
    emit(store(emitExpr(*S.Init), Counter));
    emitBr(CondBB);

    newBlock(CondBB);
    Value IV = emitLoad(Counter);
    Value Bound = emitExpr(*S.Bound);
    Value Cond = emitCmp(CmpKind::Lt, IV, Bound);
    emitCondBr(Cond, BodyBB, EndBB);

    newBlock(BodyBB);
    for (const auto &Sub : S.Body)
      emitStmt(*Sub);
    Value IV2 = emitLoad(Counter);
    Value Next = emitBin(BinKind::Add, IV2, Value::constInt(1));
    emit(store(Next, Counter));
    emitBr(CondBB);

    newBlock(EndBB);
  }

  Value emitCmp(CmpKind CK, Value A, Value B) {
    Instruction I;
    I.Op = Opcode::Cmp;
    I.CK = CK;
    I.ResultTy = Type::i1();
    Value R = temp(I.ResultTy);
    I.Result = R.Name;
    I.Ops = {std::move(A), std::move(B)};
    emit(std::move(I));
    return R;
  }

  void emitParallel(const Stmt &S) {
    int Region = RegionId++;
    emitCall(ParallelBeginFn, Type::voidTy(),
             {Value::constInt(Region)});
    if (S.IsParallelFor)
      emitStripMinedFor(*S.Body[0]);
    else
      for (const auto &Sub : S.Body)
        emitStmt(*Sub);
    emitCall(ParallelEndFn, Type::voidTy(), {Value::constInt(Region)});
  }

  /// The bound form of a worksharing loop: iteration i runs on the worker
  /// with global id i mod (teams * team_size), so each worker starts at
  /// A + its global id and strides by the pool size.
  void emitStripMinedFor(const Stmt &S) {
    int Id = LoopId++;
    std::string CondBB = "for.cond." + std::to_string(Id);
    std::string BodyBB = "for.body." + std::to_string(Id);
    std::string EndBB = "for.end." + std::to_string(Id);

    Value Counter = emitAlloca(S.DeclId, S.Name, Type::i32());
    Value Tn = emitCall(ThreadNumFn, Type::i32(), {});
    Value Nt = emitCall(NumThreadsFn, Type::i32(), {});
    Value Tm = emitCall(TeamNumFn, Type::i32(), {});
    Value Nteams = emitCall(NumTeamsFn, Type::i32(), {});
    Value TeamBase = emitBin(BinKind::Mul, Tm, Nt);
    Value Gid = emitBin(BinKind::Add, TeamBase, Tn);
    Value Stride = emitBin(BinKind::Mul, Nt, Nteams);
    Value Start = emitBin(BinKind::Add, emitExpr(*S.Init), Gid);
    emit(store(Start, Counter));
    emitBr(CondBB);

    newBlock(CondBB);
    Value IV = emitLoad(Counter);
    Value Bound = emitExpr(*S.Bound);
    Value Cond = emitCmp(CmpKind::Lt, IV, Bound);
    emitCondBr(Cond, BodyBB, EndBB);

    newBlock(BodyBB);
    for (const auto &Sub : S.Body)
      emitStmt(*Sub);
    Value IV2 = emitLoad(Counter);
    Value Next = emitBin(BinKind::Add, IV2, Stride);
    emit(store(Next, Counter));
    emitBr(CondBB);

    newBlock(EndBB);
  }

  const ProgramAst &Ast;
  const SharingInfo &Info;
  std::string Stem;

  Module M;
  Function F;
  size_t CurBlock = 0;
  int NextTemp = 0;
  int LoopId = 0;
  int RegionId = 0;
  std::set<std::string> Used;
  std::set<int> Referenced;
  std::map<int, Value> DeclAddr;
  std::map<int, std::string> GlobalName;
};

} // namespace

Module omplab::lowerToIr(const ProgramAst &Ast, const SharingInfo &Info,
                         const std::string &KernelStem) {
  Lowerer L(Ast, Info, KernelStem);
  return L.run();
}
