//===--- DslParser.cpp - Lexer and parser for .ompk sources ---------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/Dsl.h"

#include <json.hpp>

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cstring>
#include <sstream>

using namespace omplab;

namespace {

enum class TokKind { Ident, Int, Punct, PragmaEnd, End };

struct Tok {
  TokKind Kind = TokKind::End;
  std::string Text;
  int64_t IntVal = 0;
  SourceLoc Loc;

  bool isPunct(const char *P) const {
    return Kind == TokKind::Punct && Text == P;
  }
  bool isIdent(const char *I) const {
    return Kind == TokKind::Ident && Text == I;
  }
};

class Lexer {
public:
  Lexer(const std::string &Text, DiagList &Diags)
      : Text(Text), Diags(Diags) {}

  std::vector<Tok> run() {
    std::vector<Tok> Toks;
    bool InPragma = false;
    while (Pos < Text.size()) {
      char C = Text[Pos];
      if (C == '\n') {
        if (InPragma) {
          Toks.push_back({TokKind::PragmaEnd, "", 0, loc()});
          InPragma = false;
        }
        advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(C))) {
        advance();
        continue;
      }
      if (C == '/' && Pos + 1 < Text.size() && Text[Pos + 1] == '/') {
        while (Pos < Text.size() && Text[Pos] != '\n')
          advance();
        continue;
      }
      if (C == '#') {
        InPragma = true;
        Toks.push_back({TokKind::Punct, "#", 0, loc()});
        advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(C)) || C == '_') {
        SourceLoc L = loc();
        std::string S;
        while (Pos < Text.size() &&
               (std::isalnum(static_cast<unsigned char>(Text[Pos])) ||
                Text[Pos] == '_')) {
          S += Text[Pos];
          advance();
        }
        Toks.push_back({TokKind::Ident, S, 0, L});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(C))) {
        SourceLoc L = loc();
        int64_t V = 0;
        while (Pos < Text.size() &&
               std::isdigit(static_cast<unsigned char>(Text[Pos]))) {
          V = V * 10 + (Text[Pos] - '0');
          advance();
        }
        Toks.push_back({TokKind::Int, "", V, L});
        continue;
      }
      SourceLoc L = loc();
      auto two = [&](const char *P) {
        if (Pos + 1 < Text.size() && Text[Pos] == P[0] && Text[Pos + 1] == P[1]) {
          Toks.push_back({TokKind::Punct, P, 0, L});
          advance();
          advance();
          return true;
        }
        return false;
      };
      if (two("+=") || two("++") || two("<=") || two(">=") || two("==") ||
          two("!="))
        continue;
      static const char Singles[] = "+-*(){}[];,:=<>";
      if (std::strchr(Singles, C)) {
        Toks.push_back({TokKind::Punct, std::string(1, C), 0, L});
        advance();
        continue;
      }
      Diags.push_back({"syntax", std::string("unexpected character '") + C + "'",
                       "", L});
      advance();
    }
    if (InPragma)
      Toks.push_back({TokKind::PragmaEnd, "", 0, loc()});
    Toks.push_back({TokKind::End, "", 0, loc()});
    return Toks;
  }

private:
  SourceLoc loc() const { return {Line, Col}; }

  void advance() {
    if (Text[Pos] == '\n') {
      ++Line;
      Col = 1;
    } else {
      ++Col;
    }
    ++Pos;
  }

  const std::string &Text;
  DiagList &Diags;
  size_t Pos = 0;
  int Line = 1;
  int Col = 1;
};

struct DeclInfo {
  std::string Name;
  bool IsArray = false;
  int64_t Size = 0;
};

class Parser {
public:
  Parser(std::vector<Tok> Toks, DiagList &Diags)
      : Toks(std::move(Toks)), Diags(Diags) {}

  std::optional<ProgramAst> run() {
    ProgramAst Ast;
    pushScope();
    while (!cur().isPunct("#") && cur().Kind != TokKind::End) {
      if (!parseHostDecl(Ast))
        return std::nullopt;
    }
    if (cur().Kind == TokKind::End) {
      error("missing-target", "no target construct in program");
      return std::nullopt;
    }
    if (!parseTarget(Ast))
      return std::nullopt;
    if (cur().Kind != TokKind::End) {
      error("syntax", "trailing input after target construct");
      return std::nullopt;
    }
    Ast.NumDecls = static_cast<int>(Decls.size());
    return Ast;
  }

private:
  //===--------------------------------------------------------------------===
  // Token plumbing
  //===--------------------------------------------------------------------===

  const Tok &cur() const { return Toks[Idx]; }
  const Tok &peek(size_t N = 1) const {
    return Toks[std::min(Idx + N, Toks.size() - 1)];
  }
  Tok take() { return Toks[Idx == Toks.size() - 1 ? Idx : Idx++]; }

  void error(const std::string &Rule, const std::string &Msg) {
    Diags.push_back({Rule, Msg, "", cur().Loc});
  }
  void errorAt(const std::string &Rule, const std::string &Msg, SourceLoc L) {
    Diags.push_back({Rule, Msg, "", L});
  }

  bool expectPunct(const char *P) {
    if (cur().isPunct(P)) {
      take();
      return true;
    }
    error("syntax", std::string("expected '") + P + "'");
    return false;
  }

  bool expectIdent(const char *I) {
    if (cur().isIdent(I)) {
      take();
      return true;
    }
    error("syntax", std::string("expected '") + I + "'");
    return false;
  }

  //===--------------------------------------------------------------------===
  // Scopes
  //===--------------------------------------------------------------------===

  void pushScope() { Scopes.emplace_back(); }
  void popScope() { Scopes.pop_back(); }

  int declare(const std::string &Name, bool IsArray, int64_t Size,
              SourceLoc L) {
    for (const auto &S : Scopes) {
      if (S.count(Name)) {
        errorAt("redeclaration", "'" + Name + "' is already declared", L);
        return -1;
      }
    }
    int Id = static_cast<int>(Decls.size());
    Decls.push_back({Name, IsArray, Size});
    Scopes.back()[Name] = Id;
    return Id;
  }

  int lookup(const std::string &Name, SourceLoc L) {
    for (auto It = Scopes.rbegin(); It != Scopes.rend(); ++It) {
      auto F = It->find(Name);
      if (F != It->end())
        return F->second;
    }
    errorAt("undeclared", "use of undeclared identifier '" + Name + "'", L);
    return -1;
  }

  //===--------------------------------------------------------------------===
  // Expressions
  //===--------------------------------------------------------------------===

  ExprPtr makeInt(int64_t V, SourceLoc L) {
    auto E = std::make_unique<Expr>();
    E->Kind = ExprKind::IntLit;
    E->IntVal = V;
    E->Loc = L;
    return E;
  }

  ExprPtr parsePrimary() {
    SourceLoc L = cur().Loc;
    if (cur().Kind == TokKind::Int) {
      return makeInt(take().IntVal, L);
    }
    if (cur().isPunct("-")) {
      take();
      ExprPtr Sub = parsePrimary();
      if (!Sub)
        return nullptr;
      auto E = std::make_unique<Expr>();
      E->Kind = ExprKind::Binary;
      E->Op = '-';
      E->Loc = L;
      E->L = makeInt(0, L);
      E->R = std::move(Sub);
      return E;
    }
    if (cur().isPunct("(")) {
      take();
      ExprPtr E = parseExpr();
      if (!E || !expectPunct(")"))
        return nullptr;
      return E;
    }
    if (cur().Kind == TokKind::Ident) {
      std::string Name = take().Text;
      if (cur().isPunct("(")) {
        take();
        if (!expectPunct(")"))
          return nullptr;
        auto E = std::make_unique<Expr>();
        E->Loc = L;
        if (Name == "omp_get_thread_num") {
          E->Kind = ExprKind::ThreadNum;
        } else if (Name == "omp_get_team_num") {
          E->Kind = ExprKind::TeamNum;
        } else {
          errorAt("syntax", "unknown call '" + Name + "'", L);
          return nullptr;
        }
        return E;
      }
      int Id = lookup(Name, L);
      if (Id < 0)
        return nullptr;
      if (cur().isPunct("[")) {
        take();
        ExprPtr Idx = parseExpr();
        if (!Idx || !expectPunct("]"))
          return nullptr;
        if (!Decls[Id].IsArray) {
          errorAt("not-an-array", "'" + Name + "' is not an array", L);
          return nullptr;
        }
        auto E = std::make_unique<Expr>();
        E->Kind = ExprKind::Index;
        E->Name = Name;
        E->Loc = L;
        E->Idx = std::move(Idx);
        return E;
      }
      if (Decls[Id].IsArray) {
        errorAt("not-a-scalar", "array '" + Name + "' needs a subscript here",
                L);
        return nullptr;
      }
      auto E = std::make_unique<Expr>();
      E->Kind = ExprKind::VarRef;
      E->Name = Name;
      E->Loc = L;
      return E;
    }
    error("syntax", "expected expression");
    return nullptr;
  }

  ExprPtr parseMul() {
    ExprPtr L = parsePrimary();
    if (!L)
      return nullptr;
    while (cur().isPunct("*")) {
      SourceLoc OpLoc = take().Loc;
      ExprPtr R = parsePrimary();
      if (!R)
        return nullptr;
      auto E = std::make_unique<Expr>();
      E->Kind = ExprKind::Binary;
      E->Op = '*';
      E->Loc = OpLoc;
      E->L = std::move(L);
      E->R = std::move(R);
      L = std::move(E);
    }
    return L;
  }

  ExprPtr parseExpr() {
    ExprPtr L = parseMul();
    if (!L)
      return nullptr;
    while (cur().isPunct("+") || cur().isPunct("-")) {
      char Op = cur().Text[0];
      SourceLoc OpLoc = take().Loc;
      ExprPtr R = parseMul();
      if (!R)
        return nullptr;
      auto E = std::make_unique<Expr>();
      E->Kind = ExprKind::Binary;
      E->Op = Op;
      E->Loc = OpLoc;
      E->L = std::move(L);
      E->R = std::move(R);
      L = std::move(E);
    }
    return L;
  }

  std::optional<int64_t> foldConst(const Expr &E) {
    switch (E.Kind) {
    case ExprKind::IntLit:
      return E.IntVal;
    case ExprKind::Binary: {
      auto L = foldConst(*E.L);
      auto R = foldConst(*E.R);
      if (!L || !R)
        return std::nullopt;
      switch (E.Op) {
      case '+':
        return *L + *R;
      case '-':
        return *L - *R;
      case '*':
        return *L * *R;
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
    }
  }

  std::optional<int64_t> parsePositiveConst(const char *What) {
    SourceLoc L = cur().Loc;
    ExprPtr E = parseExpr();
    if (!E)
      return std::nullopt;
    auto V = foldConst(*E);
    if (!V || *V <= 0) {
      errorAt("const-required",
              std::string(What) + " must be a positive integer constant", L);
      return std::nullopt;
    }
    return V;
  }

  //===--------------------------------------------------------------------===
  // Declarations and statements
  //===--------------------------------------------------------------------===

  bool parseHostDecl(ProgramAst &Ast) {
    SourceLoc L = cur().Loc;
    if (!expectIdent("int"))
      return false;
    if (cur().Kind != TokKind::Ident) {
      error("syntax", "expected identifier");
      return false;
    }
    std::string Name = take().Text;
    HostDecl D;
    D.Name = Name;
    D.Loc = L;
    if (cur().isPunct("[")) {
      take();
      auto Size = parsePositiveConst("array size");
      if (!Size || !expectPunct("]"))
        return false;
      D.IsArray = true;
      D.ArraySize = *Size;
    }
    D.DeclId = declare(Name, D.IsArray, D.ArraySize, L);
    if (D.DeclId < 0)
      return false;
    if (!expectPunct("="))
      return false;
    if (D.IsArray) {
      // Only uniform initializers at host scope; the common form is {0}.
      if (!expectPunct("{"))
        return false;
      ExprPtr E = parseExpr();
      if (!E)
        return false;
      auto V = foldConst(*E);
      if (!V) {
        errorAt("const-required", "array initializer must be constant", L);
        return false;
      }
      D.Init = *V;
      if (!expectPunct("}"))
        return false;
    } else {
      ExprPtr E = parseExpr();
      if (!E)
        return false;
      auto V = foldConst(*E);
      if (!V) {
        errorAt("const-required", "host initializer must be constant", L);
        return false;
      }
      D.Init = *V;
    }
    if (!expectPunct(";"))
      return false;
    Ast.Host.push_back(std::move(D));
    return true;
  }

  bool parsePragmaIntro(const char *Directive) {
    if (!expectPunct("#") || !expectIdent("pragma") || !expectIdent("omp"))
      return false;
    if (Directive && !expectIdent(Directive))
      return false;
    return true;
  }

  bool skipPragmaEnd() {
    if (cur().Kind != TokKind::PragmaEnd) {
      error("syntax", "unexpected token in directive");
      return false;
    }
    take();
    return true;
  }

  bool parseTarget(ProgramAst &Ast) {
    SourceLoc L = cur().Loc;
    if (!parsePragmaIntro(nullptr))
      return false;
    if (!cur().isIdent("target")) {
      error("unsupported-directive",
            "expected the target directive at top level");
      return false;
    }
    take();
    Ast.Target.Loc = L;
    while (cur().Kind != TokKind::PragmaEnd) {
      if (!cur().isIdent("map")) {
        error("unsupported-directive",
              "unknown clause '" + cur().Text + "' on target");
        return false;
      }
      take();
      if (!parseMapClause(Ast))
        return false;
    }
    take(); // PragmaEnd
    if (!expectPunct("{"))
      return false;
    pushScope();
    bool SawTeams = false;
    while (!cur().isPunct("}")) {
      if (cur().Kind == TokKind::End) {
        error("syntax", "unterminated target block");
        return false;
      }
      if (cur().isPunct("#") && peek(3).isIdent("teams")) {
        if (SawTeams || !Ast.Target.Body.empty()) {
          error("teams-not-closely-nested",
                "teams must be the only statement inside target");
          return false;
        }
        if (!parseTeams(Ast))
          return false;
        SawTeams = true;
        continue;
      }
      if (SawTeams) {
        error("teams-not-closely-nested",
              "no statements may follow a teams construct inside target");
        return false;
      }
      StmtPtr S = parseStmt(/*InParallel=*/false);
      if (!S)
        return false;
      Ast.Target.Body.push_back(std::move(S));
    }
    take(); // }
    popScope();
    return true;
  }

  bool parseMapClause(ProgramAst &Ast) {
    if (!expectPunct("("))
      return false;
    MapDir Dir = MapDir::ToFrom;
    if (cur().Kind == TokKind::Ident &&
        (cur().Text == "to" || cur().Text == "from" ||
         cur().Text == "tofrom") &&
        peek().isPunct(":")) {
      std::string D = take().Text;
      take(); // :
      Dir = D == "to" ? MapDir::To : D == "from" ? MapDir::From : MapDir::ToFrom;
    }
    while (true) {
      SourceLoc L = cur().Loc;
      if (cur().Kind != TokKind::Ident) {
        error("bad-map", "expected variable name in map clause");
        return false;
      }
      std::string Name = take().Text;
      int Id = lookup(Name, L);
      if (Id < 0)
        return false;
      MapClauseAst M;
      M.Name = Name;
      M.Dir = Dir;
      M.Loc = L;
      if (cur().isPunct("[")) {
        take();
        if (!expectPunct(":"))
          return false;
        auto Len = parsePositiveConst("map length");
        if (!Len || !expectPunct("]"))
          return false;
        M.Length = *Len;
        if (!Decls[Id].IsArray) {
          errorAt("bad-map", "section on non-array '" + Name + "'", L);
          return false;
        }
        if (M.Length > Decls[Id].Size) {
          errorAt("bad-map", "map section exceeds the bounds of '" + Name + "'",
                  L);
          return false;
        }
      } else {
        M.Length = Decls[Id].IsArray ? Decls[Id].Size : 0;
      }
      for (const auto &Prev : Ast.Target.Maps) {
        if (Prev.Name == Name) {
          errorAt("bad-map", "'" + Name + "' is mapped twice", L);
          return false;
        }
      }
      Ast.Target.Maps.push_back(std::move(M));
      if (cur().isPunct(",")) {
        take();
        continue;
      }
      break;
    }
    return expectPunct(")");
  }

  bool parseTeams(ProgramAst &Ast) {
    if (!parsePragmaIntro("teams"))
      return false;
    Ast.Target.HasTeams = true;
    while (cur().Kind != TokKind::PragmaEnd) {
      if (cur().isIdent("num_teams")) {
        take();
        if (!expectPunct("("))
          return false;
        auto V = parsePositiveConst("num_teams");
        if (!V || !expectPunct(")"))
          return false;
        Ast.Target.NumTeams = *V;
      } else if (cur().isIdent("thread_limit")) {
        take();
        if (!expectPunct("("))
          return false;
        auto V = parsePositiveConst("thread_limit");
        if (!V || !expectPunct(")"))
          return false;
        Ast.Target.ThreadLimit = *V;
      } else {
        error("unsupported-directive",
              "unknown clause '" + cur().Text + "' on teams");
        return false;
      }
    }
    take(); // PragmaEnd
    if (!expectPunct("{"))
      return false;
    pushScope();
    while (!cur().isPunct("}")) {
      if (cur().Kind == TokKind::End) {
        error("syntax", "unterminated teams block");
        return false;
      }
      StmtPtr S = parseStmt(/*InParallel=*/false);
      if (!S)
        return false;
      Ast.Target.Body.push_back(std::move(S));
    }
    take(); // }
    popScope();
    return true;
  }

  StmtPtr parseStmt(bool InParallel) {
    if (cur().isPunct("#"))
      return parseParallel(InParallel);
    if (cur().isIdent("int"))
      return parseLocalDecl();
    if (cur().isIdent("for"))
      return parseFor(InParallel);
    if (cur().isPunct("{"))
      return parseBlock(InParallel);
    if (cur().Kind == TokKind::Ident)
      return parseAssign();
    error("syntax", "expected statement");
    return nullptr;
  }

  StmtPtr parseBlock(bool InParallel) {
    SourceLoc L = cur().Loc;
    if (!expectPunct("{"))
      return nullptr;
    auto S = std::make_unique<Stmt>();
    S->Kind = StmtKind::Block;
    S->Loc = L;
    pushScope();
    while (!cur().isPunct("}")) {
      if (cur().Kind == TokKind::End) {
        error("syntax", "unterminated block");
        return nullptr;
      }
      StmtPtr Sub = parseStmt(InParallel);
      if (!Sub)
        return nullptr;
      S->Body.push_back(std::move(Sub));
    }
    take();
    popScope();
    return S;
  }

  StmtPtr parseLocalDecl() {
    SourceLoc L = cur().Loc;
    take(); // int
    if (cur().Kind != TokKind::Ident) {
      error("syntax", "expected identifier");
      return nullptr;
    }
    std::string Name = take().Text;
    auto S = std::make_unique<Stmt>();
    S->Kind = StmtKind::Decl;
    S->Loc = L;
    S->Name = Name;
    if (cur().isPunct("[")) {
      take();
      auto Size = parsePositiveConst("array size");
      if (!Size || !expectPunct("]"))
        return nullptr;
      S->IsArray = true;
      S->ArraySize = *Size;
    }
    S->DeclId = declare(Name, S->IsArray, S->ArraySize, L);
    if (S->DeclId < 0)
      return nullptr;
    if (cur().isPunct("=")) {
      take();
      if (S->IsArray) {
        if (!expectPunct("{"))
          return nullptr;
        S->Init = parseExpr();
        if (!S->Init || !expectPunct("}"))
          return nullptr;
        if (!foldConst(*S->Init)) {
          errorAt("const-required", "array initializer must be constant", L);
          return nullptr;
        }
      } else {
        S->Init = parseExpr();
        if (!S->Init)
          return nullptr;
      }
    }
    if (!expectPunct(";"))
      return nullptr;
    return S;
  }

  StmtPtr parseAssign() {
    SourceLoc L = cur().Loc;
    std::string Name = take().Text;
    int Id = lookup(Name, L);
    if (Id < 0)
      return nullptr;
    auto S = std::make_unique<Stmt>();
    S->Kind = StmtKind::Assign;
    S->Loc = L;
    S->Name = Name;
    if (cur().isPunct("[")) {
      take();
      S->Index = parseExpr();
      if (!S->Index || !expectPunct("]"))
        return nullptr;
      if (!Decls[Id].IsArray) {
        errorAt("not-an-array", "'" + Name + "' is not an array", L);
        return nullptr;
      }
    } else if (Decls[Id].IsArray) {
      errorAt("not-a-scalar", "cannot assign to whole array '" + Name + "'", L);
      return nullptr;
    }
    if (cur().isPunct("+=")) {
      take();
      S->Compound = true;
    } else if (!expectPunct("=")) {
      return nullptr;
    }
    S->Value = parseExpr();
    if (!S->Value || !expectPunct(";"))
      return nullptr;
    return S;
  }

  StmtPtr parseForHeaderAndBody(bool InParallel) {
    SourceLoc L = cur().Loc;
    take(); // for
    if (!expectPunct("(") || !expectIdent("int"))
      return nullptr;
    if (cur().Kind != TokKind::Ident) {
      error("syntax", "expected loop counter name");
      return nullptr;
    }
    std::string Name = take().Text;
    auto S = std::make_unique<Stmt>();
    S->Kind = StmtKind::For;
    S->Loc = L;
    S->Name = Name;
    pushScope();
    S->DeclId = declare(Name, false, 0, L);
    if (S->DeclId < 0)
      return nullptr;
    if (!expectPunct("="))
      return nullptr;
    S->Init = parseExpr();
    if (!S->Init || !expectPunct(";"))
      return nullptr;
    if (!cur().isIdent(Name.c_str())) {
      error("syntax", "loop condition must test the counter");
      return nullptr;
    }
    take();
    if (!expectPunct("<"))
      return nullptr;
    S->Bound = parseExpr();
    if (!S->Bound || !expectPunct(";"))
      return nullptr;
    if (!cur().isIdent(Name.c_str())) {
      error("syntax", "loop increment must update the counter");
      return nullptr;
    }
    take();
    if (cur().isPunct("++")) {
      take();
    } else if (cur().isPunct("+=")) {
      take();
      if (cur().Kind != TokKind::Int || cur().IntVal != 1) {
        error("syntax", "only unit-stride loops are supported");
        return nullptr;
      }
      take();
    } else {
      error("syntax", "expected '++' or '+= 1'");
      return nullptr;
    }
    if (!expectPunct(")"))
      return nullptr;
    StmtPtr Body = cur().isPunct("{") ? parseBlock(InParallel)
                                      : parseStmt(InParallel);
    if (!Body)
      return nullptr;
    S->Body.push_back(std::move(Body));
    popScope();
    return S;
  }

  StmtPtr parseFor(bool InParallel) { return parseForHeaderAndBody(InParallel); }

  StmtPtr parseParallel(bool InParallel) {
    SourceLoc L = cur().Loc;
    if (!parsePragmaIntro(nullptr))
      return nullptr;
    if (!cur().isIdent("parallel")) {
      error("unsupported-directive",
            "directive '" + cur().Text + "' is not supported here");
      return nullptr;
    }
    take();
    if (InParallel) {
      errorAt("nested-parallel-unsupported",
              "parallel regions may not nest", L);
      return nullptr;
    }
    auto S = std::make_unique<Stmt>();
    S->Kind = StmtKind::Parallel;
    S->Loc = L;
    if (cur().isIdent("for")) {
      take();
      S->IsParallelFor = true;
    }
    if (!skipPragmaEnd())
      return nullptr;
    if (S->IsParallelFor) {
      if (!cur().isIdent("for")) {
        error("syntax", "parallel for must be followed by a for loop");
        return nullptr;
      }
      StmtPtr Loop = parseForHeaderAndBody(/*InParallel=*/true);
      if (!Loop)
        return nullptr;
      S->Body.push_back(std::move(Loop));
      return S;
    }
    StmtPtr Body = cur().isPunct("{") ? parseBlock(/*InParallel=*/true)
                                      : parseStmt(/*InParallel=*/true);
    if (!Body)
      return nullptr;
    S->Body.push_back(std::move(Body));
    return S;
  }

  std::vector<Tok> Toks;
  DiagList &Diags;
  size_t Idx = 0;
  std::vector<DeclInfo> Decls;
  std::vector<std::map<std::string, int>> Scopes;
};

} // namespace

DslParseResult omplab::parseDsl(const std::string &Text) {
  DslParseResult Res;
  Lexer Lex(Text, Res.Diags);
  std::vector<Tok> Toks = Lex.run();
  if (!Res.Diags.empty())
    return Res;
  Parser P(std::move(Toks), Res.Diags);
  Res.Ast = P.run();
  if (!Res.Diags.empty())
    Res.Ast.reset();
  return Res;
}

//===----------------------------------------------------------------------===//
// AST dumping
//===----------------------------------------------------------------------===//

namespace {

using nlohmann::json;

json exprJson(const Expr &E) {
  json J;
  switch (E.Kind) {
  case ExprKind::IntLit:
    J["kind"] = "int";
    J["value"] = E.IntVal;
    break;
  case ExprKind::VarRef:
    J["kind"] = "var";
    J["name"] = E.Name;
    break;
  case ExprKind::Index:
    J["kind"] = "index";
    J["name"] = E.Name;
    J["index"] = exprJson(*E.Idx);
    break;
  case ExprKind::Binary:
    J["kind"] = "binary";
    J["op"] = std::string(1, E.Op);
    J["lhs"] = exprJson(*E.L);
    J["rhs"] = exprJson(*E.R);
    break;
  case ExprKind::ThreadNum:
    J["kind"] = "thread_num";
    break;
  case ExprKind::TeamNum:
    J["kind"] = "team_num";
    break;
  }
  return J;
}

json stmtJson(const Stmt &S) {
  json J;
  switch (S.Kind) {
  case StmtKind::Decl:
    J["kind"] = "decl";
    J["name"] = S.Name;
    J["decl_id"] = S.DeclId;
    if (S.IsArray)
      J["array_size"] = S.ArraySize;
    if (S.Init)
      J["init"] = exprJson(*S.Init);
    break;
  case StmtKind::Assign:
    J["kind"] = "assign";
    J["name"] = S.Name;
    if (S.Index)
      J["index"] = exprJson(*S.Index);
    J["compound"] = S.Compound;
    J["value"] = exprJson(*S.Value);
    break;
  case StmtKind::For:
    J["kind"] = "for";
    J["counter"] = S.Name;
    J["decl_id"] = S.DeclId;
    J["init"] = exprJson(*S.Init);
    J["bound"] = exprJson(*S.Bound);
    break;
  case StmtKind::Parallel:
    J["kind"] = S.IsParallelFor ? "parallel_for" : "parallel";
    break;
  case StmtKind::Block:
    J["kind"] = "block";
    break;
  }
  if (!S.Body.empty()) {
    json Body = json::array();
    for (const auto &Sub : S.Body)
      Body.push_back(stmtJson(*Sub));
    J["body"] = std::move(Body);
  }
  return J;
}

} // namespace

std::string omplab::dumpAst(const ProgramAst &Ast, const SharingInfo *Info) {
  json J;
  json Host = json::array();
  for (const auto &D : Ast.Host) {
    json H;
    H["name"] = D.Name;
    H["decl_id"] = D.DeclId;
    if (D.IsArray)
      H["array_size"] = D.ArraySize;
    H["init"] = D.Init;
    Host.push_back(std::move(H));
  }
  J["host"] = std::move(Host);
  json Maps = json::array();
  for (const auto &M : Ast.Target.Maps) {
    json MJ;
    MJ["name"] = M.Name;
    MJ["dir"] = mapDirStr(M.Dir);
    MJ["length"] = M.Length;
    Maps.push_back(std::move(MJ));
  }
  J["target"]["maps"] = std::move(Maps);
  if (Ast.Target.HasTeams) {
    J["target"]["num_teams"] = Ast.Target.NumTeams;
    J["target"]["thread_limit"] = Ast.Target.ThreadLimit;
  }
  json Body = json::array();
  for (const auto &S : Ast.Target.Body)
    Body.push_back(stmtJson(*S));
  J["target"]["body"] = std::move(Body);
  if (Info) {
    json Attrs = json::object();
    for (const auto &[Id, A] : Info->Attr) {
      auto It = Info->DeclName.find(Id);
      std::string Key = It == Info->DeclName.end()
                            ? std::to_string(Id)
                            : It->second + "#" + std::to_string(Id);
      Attrs[Key] = sharingAttributeStr(A);
    }
    J["sharing"]["attributes"] = std::move(Attrs);
    json Cands = json::array();
    for (int Id : Info->Candidates) {
      auto It = Info->DeclName.find(Id);
      Cands.push_back(It == Info->DeclName.end() ? std::to_string(Id)
                                                 : It->second);
    }
    J["sharing"]["candidates"] = std::move(Cands);
  }
  return J.dump(2) + "\n";
}
