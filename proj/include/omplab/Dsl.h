//===--- Dsl.h - Source AST for the offload kernel language -----*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The surface language is the C statement subset used by small offloading
// kernels: int scalars and fixed-size int arrays, assignments, for loops with
// constant bounds, and the directives target / teams / parallel [for].
// docs/dsl.md holds the grammar.
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_DSL_H
#define OMPLAB_DSL_H

#include "omplab/Diag.h"
#include "omplab/IR.h"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace omplab {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class ExprKind { IntLit, VarRef, Index, Binary, ThreadNum, TeamNum };

struct Expr {
  ExprKind Kind;
  SourceLoc Loc;
  int64_t IntVal = 0;   // IntLit
  std::string Name;     // VarRef / Index base
  ExprPtr Idx;          // Index
  char Op = 0;          // Binary: + - *
  ExprPtr L, R;         // Binary
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

enum class StmtKind { Decl, Assign, For, Parallel, Block };

struct Stmt {
  StmtKind Kind;
  SourceLoc Loc;

  // Decl
  int DeclId = -1;
  std::string Name;
  bool IsArray = false;
  int64_t ArraySize = 0;
  ExprPtr Init;

  // Assign: Name [Index] (Compound ? += : =) Value
  ExprPtr Index;
  bool Compound = false;
  ExprPtr Value;

  // For: Name is the counter (its own DeclId), Init is the start expr,
  // Bound the exclusive upper bound; Body a Block.
  ExprPtr Bound;

  // Parallel
  bool IsParallelFor = false;

  // For / Parallel / Block
  std::vector<StmtPtr> Body;
};

struct MapClauseAst {
  std::string Name;
  MapDir Dir = MapDir::ToFrom;
  int64_t Lower = 0;
  int64_t Length = 0;
  SourceLoc Loc;
};

struct HostDecl {
  int DeclId = -1;
  std::string Name;
  bool IsArray = false;
  int64_t ArraySize = 0;
  int64_t Init = 0;
  SourceLoc Loc;
};

struct TargetConstruct {
  SourceLoc Loc;
  std::vector<MapClauseAst> Maps;
  bool HasTeams = false;
  int64_t NumTeams = 0;
  int64_t ThreadLimit = 0;
  std::vector<StmtPtr> Body;
};

struct ProgramAst {
  std::vector<HostDecl> Host;
  TargetConstruct Target;
  int NumDecls = 0; // DeclIds are dense in [0, NumDecls)
};

enum class SharingAttribute { Shared, Private, FirstPrivate, Mapped };

std::string sharingAttributeStr(SharingAttribute A);

/// Result of attribute resolution. Candidates are the variables that must be
/// made visible to workers when a parallel region launches, in declaration
/// order: Shared and FirstPrivate locals referenced from a nested parallel
/// plus mapped arrays referenced there.
struct SharingInfo {
  std::map<int, SharingAttribute> Attr; // by DeclId
  std::vector<int> Candidates;
  std::map<int, std::string> DeclName;

  bool isCandidate(int DeclId) const;
};

struct DslParseResult {
  std::optional<ProgramAst> Ast;
  DiagList Diags;

  bool ok() const { return Ast.has_value() && Diags.empty(); }
};

DslParseResult parseDsl(const std::string &Text);

/// Stable JSON rendering of the AST plus resolved attributes (--dump-ast).
std::string dumpAst(const ProgramAst &Ast, const SharingInfo *Info);

} // namespace omplab

#endif // OMPLAB_DSL_H
