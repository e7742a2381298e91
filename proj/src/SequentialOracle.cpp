//===--- SequentialOracle.cpp - Reference interpreter ---------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/SequentialOracle.h"

#include <set>

namespace omplab {
namespace {

struct OracleError {
  std::string Message;
};

class Interp {
public:
  Interp(const ProgramAst &Ast, const OracleOptions &Opts)
      : Ast(Ast), Opts(Opts) {}

  OracleResult run();

private:
  const ProgramAst &Ast;
  const OracleOptions &Opts;
  int Teams = 1;
  int Workers = 32;
  int64_t Steps = 0;

  // Mapped buffers, shared across teams.
  std::map<std::string, std::vector<int64_t>> Mapped;
  // Per-team storage, reset for each team.
  std::map<std::string, int64_t> Scalars;
  std::map<std::string, std::vector<int64_t>> Arrays;

  struct Ctx {
    int Team = 0;
    int ThreadNum = 0;
    bool InParallel = false;
  };

  void tick() {
    if (++Steps > Opts.StepLimit)
      throw OracleError{"oracle step limit exceeded"};
  }

  int64_t eval(const Expr &E, const Ctx &C);
  int64_t *scalarSlot(const std::string &Name, const SourceLoc &Loc);
  int64_t *elementSlot(const std::string &Name, int64_t Idx,
                       const SourceLoc &Loc);
  void exec(const Stmt &S, const Ctx &C);
  void execTeam(int Team);
};

int64_t Interp::eval(const Expr &E, const Ctx &C) {
  tick();
  switch (E.Kind) {
  case ExprKind::IntLit:
    return E.IntVal;
  case ExprKind::VarRef:
    return *scalarSlot(E.Name, E.Loc);
  case ExprKind::Index:
    return *elementSlot(E.Name, eval(*E.Idx, C), E.Loc);
  case ExprKind::Binary: {
    int64_t L = eval(*E.L, C), R = eval(*E.R, C);
    switch (E.Op) {
    case '+':
      return L + R;
    case '-':
      return L - R;
    case '*':
      return L * R;
    }
    throw OracleError{"oracle: unknown operator"};
  }
  case ExprKind::ThreadNum:
    return C.InParallel ? C.ThreadNum : 0;
  case ExprKind::TeamNum:
    return C.Team;
  }
  throw OracleError{"oracle: unknown expression"};
}

int64_t *Interp::scalarSlot(const std::string &Name, const SourceLoc &Loc) {
  auto M = Mapped.find(Name);
  if (M != Mapped.end()) {
    if (M->second.size() != 1)
      throw OracleError{"oracle: @" + Name + " is an array, not a scalar"};
    return &M->second[0];
  }
  auto S = Scalars.find(Name);
  if (S == Scalars.end())
    throw OracleError{"oracle: no scalar named " + Name + " at line " +
                      std::to_string(Loc.Line)};
  return &S->second;
}

int64_t *Interp::elementSlot(const std::string &Name, int64_t Idx,
                             const SourceLoc &Loc) {
  std::vector<int64_t> *V = nullptr;
  auto M = Mapped.find(Name);
  if (M != Mapped.end())
    V = &M->second;
  else {
    auto A = Arrays.find(Name);
    if (A == Arrays.end())
      throw OracleError{"oracle: no array named " + Name + " at line " +
                        std::to_string(Loc.Line)};
    V = &A->second;
  }
  if (Idx < 0 || Idx >= static_cast<int64_t>(V->size()))
    throw OracleError{"oracle: index " + std::to_string(Idx) +
                      " out of bounds for " + Name + "[" +
                      std::to_string(V->size()) + "] at line " +
                      std::to_string(Loc.Line)};
  return &(*V)[Idx];
}

void Interp::exec(const Stmt &S, const Ctx &C) {
  tick();
  switch (S.Kind) {
  case StmtKind::Decl:
    if (S.IsArray) {
      int64_t Fill = S.Init ? eval(*S.Init, C) : 0;
      Arrays[S.Name] = std::vector<int64_t>(S.ArraySize, Fill);
    } else {
      Scalars[S.Name] = S.Init ? eval(*S.Init, C) : 0;
    }
    return;
  case StmtKind::Assign: {
    int64_t V = eval(*S.Value, C);
    int64_t *Slot = S.Index ? elementSlot(S.Name, eval(*S.Index, C), S.Loc)
                            : scalarSlot(S.Name, S.Loc);
    *Slot = S.Compound ? *Slot + V : V;
    return;
  }
  case StmtKind::For: {
    Scalars[S.Name] = eval(*S.Init, C);
    while (*scalarSlot(S.Name, S.Loc) < eval(*S.Bound, C)) {
      for (const auto &Sub : S.Body)
        exec(*Sub, C);
      ++Scalars[S.Name];
      tick();
    }
    return;
  }
  case StmtKind::Parallel: {
    if (S.IsParallelFor) {
      const Stmt &Loop = *S.Body[0];
      int64_t Pool = static_cast<int64_t>(Workers) * Teams;
      for (int W = 0; W < Workers; ++W) {
        Ctx PC{C.Team, W, true};
        int64_t Start =
            eval(*Loop.Init, PC) + (static_cast<int64_t>(C.Team) * Workers + W);
        for (int64_t I = Start; I < eval(*Loop.Bound, PC); I += Pool) {
          Scalars[Loop.Name] = I;
          for (const auto &Sub : Loop.Body)
            exec(*Sub, PC);
          tick();
        }
      }
      return;
    }
    for (int W = 0; W < Workers; ++W) {
      Ctx PC{C.Team, W, true};
      for (const auto &Sub : S.Body)
        exec(*Sub, PC);
    }
    return;
  }
  case StmtKind::Block:
    for (const auto &Sub : S.Body)
      exec(*Sub, C);
    return;
  }
  throw OracleError{"oracle: unknown statement"};
}

void Interp::execTeam(int Team) {
  Scalars.clear();
  Arrays.clear();
  for (const HostDecl &H : Ast.Host) {
    if (Mapped.count(H.Name))
      continue;
    if (H.IsArray)
      Arrays[H.Name] = std::vector<int64_t>(H.ArraySize, H.Init);
    else
      Scalars[H.Name] = H.Init;
  }
  Ctx C{Team, 0, false};
  for (const auto &S : Ast.Target.Body)
    exec(*S, C);
}

OracleResult Interp::run() {
  OracleResult R;
  Teams = Opts.Teams > 0
              ? Opts.Teams
              : (Ast.Target.HasTeams && Ast.Target.NumTeams > 0
                     ? static_cast<int>(Ast.Target.NumTeams)
                     : 1);
  Workers = Opts.Workers > 0
                ? Opts.Workers
                : (Ast.Target.HasTeams && Ast.Target.ThreadLimit > 0
                       ? static_cast<int>(Ast.Target.ThreadLimit)
                       : 32);

  std::set<std::string> MapNames;
  for (const MapClauseAst &Mc : Ast.Target.Maps)
    MapNames.insert(Mc.Name);
  for (const HostDecl &H : Ast.Host) {
    if (!MapNames.count(H.Name))
      continue;
    int64_t Elems = H.IsArray ? H.ArraySize : 1;
    Mapped[H.Name] = std::vector<int64_t>(Elems, H.Init);
  }
  for (const auto &KV : Opts.GlobalOverrides) {
    auto It = Mapped.find(KV.first);
    if (It == Mapped.end()) {
      R.Failed = true;
      R.Error = "oracle: no mapped buffer named " + KV.first;
      return R;
    }
    if (KV.second.size() == 1)
      It->second.assign(It->second.size(), KV.second[0]);
    else if (KV.second.size() == It->second.size())
      It->second = KV.second;
    else {
      R.Failed = true;
      R.Error = "oracle: override for " + KV.first + " expects 1 or " +
                std::to_string(It->second.size()) + " values";
      return R;
    }
  }

  try {
    for (int Team = 0; Team < Teams; ++Team)
      execTeam(Team);
  } catch (const OracleError &E) {
    R.Failed = true;
    R.Error = E.Message;
    return R;
  }
  R.Globals = Mapped;
  return R;
}

} // namespace

OracleResult runSequentialOracle(const ProgramAst &Ast,
                                 const OracleOptions &Opts) {
  return Interp(Ast, Opts).run();
}

} // namespace omplab
