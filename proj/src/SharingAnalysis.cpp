//===--- SharingAnalysis.cpp - Data-sharing attribute resolution ----------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/SharingAnalysis.h"

#include <set>

using namespace omplab;

std::string omplab::sharingAttributeStr(SharingAttribute A) {
  switch (A) {
  case SharingAttribute::Shared:
    return "shared";
  case SharingAttribute::Private:
    return "private";
  case SharingAttribute::FirstPrivate:
    return "firstprivate";
  case SharingAttribute::Mapped:
    return "mapped";
  }
  return "?";
}

bool SharingInfo::isCandidate(int DeclId) const {
  for (int C : Candidates)
    if (C == DeclId)
      return true;
  return false;
}

namespace {

/// Walks the target body recording, for every declaration, whether it was
/// declared inside a parallel region and whether it is referenced from one.
class Walker {
public:
  Walker(const ProgramAst &Ast) : Ast(Ast) {
    NameToId.resize(Ast.NumDecls);
  }

  void run() {
    for (const auto &D : Ast.Host)
      bind(D.Name, D.DeclId);
    for (const auto &S : Ast.Target.Body)
      walkStmt(*S, /*InParallel=*/false);
  }

  std::set<int> DeclaredInParallel;
  std::set<int> RefInParallel;
  std::set<int> RefAnywhere;
  std::map<int, std::string> DeclName;

private:
  void bind(const std::string &Name, int Id) {
    Binding[Name] = Id;
    DeclName[Id] = Name;
  }

  void ref(const std::string &Name, bool InParallel) {
    auto It = Binding.find(Name);
    if (It == Binding.end())
      return;
    RefAnywhere.insert(It->second);
    if (InParallel)
      RefInParallel.insert(It->second);
  }

  void walkExpr(const Expr &E, bool InParallel) {
    switch (E.Kind) {
    case ExprKind::VarRef:
      ref(E.Name, InParallel);
      break;
    case ExprKind::Index:
      ref(E.Name, InParallel);
      walkExpr(*E.Idx, InParallel);
      break;
    case ExprKind::Binary:
      walkExpr(*E.L, InParallel);
      walkExpr(*E.R, InParallel);
      break;
    default:
      break;
    }
  }

  void walkStmt(const Stmt &S, bool InParallel) {
    switch (S.Kind) {
    case StmtKind::Decl:
      bind(S.Name, S.DeclId);
      if (InParallel)
        DeclaredInParallel.insert(S.DeclId);
      if (S.Init)
        walkExpr(*S.Init, InParallel);
      break;
    case StmtKind::Assign:
      ref(S.Name, InParallel);
      if (S.Index)
        walkExpr(*S.Index, InParallel);
      walkExpr(*S.Value, InParallel);
      break;
    case StmtKind::For:
      bind(S.Name, S.DeclId);
      if (InParallel)
        DeclaredInParallel.insert(S.DeclId);
      walkExpr(*S.Init, InParallel);
      walkExpr(*S.Bound, InParallel);
      for (const auto &Sub : S.Body)
        walkStmt(*Sub, InParallel);
      break;
    case StmtKind::Parallel:
      for (const auto &Sub : S.Body)
        walkStmt(*Sub, /*InParallel=*/true);
      break;
    case StmtKind::Block:
      for (const auto &Sub : S.Body)
        walkStmt(*Sub, InParallel);
      break;
    }
  }

  const ProgramAst &Ast;
  std::map<std::string, int> Binding;
  std::vector<int> NameToId;
};

} // namespace

SharingResult omplab::analyzeSharing(const ProgramAst &Ast) {
  SharingResult Res;
  Walker W(Ast);
  W.run();
  Res.Info.DeclName = W.DeclName;

  std::set<int> Mapped;
  for (const auto &M : Ast.Target.Maps) {
    for (const auto &D : Ast.Host)
      if (D.Name == M.Name)
        Mapped.insert(D.DeclId);
  }

  for (const auto &D : Ast.Host) {
    if (Mapped.count(D.DeclId)) {
      Res.Info.Attr[D.DeclId] = SharingAttribute::Mapped;
    } else {
      Res.Info.Attr[D.DeclId] = SharingAttribute::FirstPrivate;
      if (D.IsArray && W.RefAnywhere.count(D.DeclId))
        Res.Diags.push_back({"unmapped-array",
                             "array '" + D.Name +
                                 "' is used in the target region but not mapped",
                             "", D.Loc});
    }
  }

  for (const auto &[Id, Name] : W.DeclName) {
    if (Res.Info.Attr.count(Id))
      continue; // host decl, already classified
    if (W.DeclaredInParallel.count(Id)) {
      Res.Info.Attr[Id] = SharingAttribute::Private;
    } else if (W.RefInParallel.count(Id)) {
      Res.Info.Attr[Id] = SharingAttribute::Shared;
    } else {
      Res.Info.Attr[Id] = SharingAttribute::Private;
    }
  }

  for (const auto &[Id, A] : Res.Info.Attr) {
    if (!W.RefInParallel.count(Id))
      continue;
    if (W.DeclaredInParallel.count(Id))
      continue;
    switch (A) {
    case SharingAttribute::Shared:
    case SharingAttribute::FirstPrivate:
    case SharingAttribute::Mapped:
      Res.Info.Candidates.push_back(Id);
      break;
    case SharingAttribute::Private:
      break;
    }
  }
  return Res;
}
