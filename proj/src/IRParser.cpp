//===--- IRParser.cpp - Textual IR parsing --------------------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/IRParser.h"

#include <cctype>
#include <set>

namespace omplab {

namespace {

enum class Tok { Ident, Local, Global, Int, Punct, End };

struct Token {
  Tok Kind = Tok::End;
  std::string Text;
  int64_t IntVal = 0;
  char Punct = 0;
  int Col = 0;
};

class LineLexer {
public:
  LineLexer(const std::string &S, int Line) : S(S), Line(Line) { advance(); }

  const Token &peek() const { return Cur; }
  Token take() {
    Token T = Cur;
    advance();
    return T;
  }
  bool atEnd() const { return Cur.Kind == Tok::End; }
  int line() const { return Line; }

  bool isPunct(char C) const {
    return Cur.Kind == Tok::Punct && Cur.Punct == C;
  }
  bool isIdent(const char *W) const {
    return Cur.Kind == Tok::Ident && Cur.Text == W;
  }

private:
  void advance() {
    while (Pos < S.size() && (S[Pos] == ' ' || S[Pos] == '\t'))
      ++Pos;
    Cur = Token();
    Cur.Col = static_cast<int>(Pos) + 1;
    if (Pos >= S.size() || S[Pos] == ';') {
      Cur.Kind = Tok::End;
      return;
    }
    char C = S[Pos];
    if (C == '%' || C == '@') {
      size_t Start = ++Pos;
      while (Pos < S.size() && (std::isalnum((unsigned char)S[Pos]) ||
                                S[Pos] == '_' || S[Pos] == '.'))
        ++Pos;
      Cur.Kind = C == '%' ? Tok::Local : Tok::Global;
      Cur.Text = S.substr(Start, Pos - Start);
      return;
    }
    if (std::isdigit((unsigned char)C) ||
        (C == '-' && Pos + 1 < S.size() &&
         std::isdigit((unsigned char)S[Pos + 1]))) {
      size_t Start = Pos;
      if (C == '-')
        ++Pos;
      while (Pos < S.size() && std::isdigit((unsigned char)S[Pos]))
        ++Pos;
      Cur.Kind = Tok::Int;
      Cur.Text = S.substr(Start, Pos - Start);
      Cur.IntVal = std::stoll(Cur.Text);
      return;
    }
    if (std::isalpha((unsigned char)C) || C == '_') {
      size_t Start = Pos;
      while (Pos < S.size() && (std::isalnum((unsigned char)S[Pos]) ||
                                S[Pos] == '_' || S[Pos] == '.'))
        ++Pos;
      Cur.Kind = Tok::Ident;
      Cur.Text = S.substr(Start, Pos - Start);
      return;
    }
    Cur.Kind = Tok::Punct;
    Cur.Punct = C;
    ++Pos;
  }

  const std::string &S;
  int Line;
  size_t Pos = 0;
  Token Cur;
};

class Parser {
public:
  explicit Parser(const std::string &Text) {
    size_t Start = 0;
    while (Start <= Text.size()) {
      size_t NL = Text.find('\n', Start);
      if (NL == std::string::npos) {
        Lines.push_back(Text.substr(Start));
        break;
      }
      Lines.push_back(Text.substr(Start, NL - Start));
      Start = NL + 1;
    }
  }

  IRParseResult run() {
    IRParseResult R;
    Module M;
    for (LineNo = 0; LineNo < Lines.size(); ++LineNo) {
      LineLexer Lex(Lines[LineNo], static_cast<int>(LineNo) + 1);
      if (Lex.atEnd())
        continue;
      if (Lex.peek().Kind == Tok::Global) {
        if (!parseGlobal(Lex, M))
          break;
      } else if (Lex.isIdent("launch")) {
        if (!parseLaunch(Lex, M))
          break;
      } else if (Lex.isIdent("define")) {
        if (!parseFunction(Lex, M))
          break;
      } else if (Lex.isIdent("frame")) {
        if (!parseFrame(Lex, M))
          break;
      } else {
        error(Lex, "syntax", "expected global, launch, define, or frame");
        break;
      }
    }
    if (Diags.empty())
      checkDanglingValues(M);
    R.Diags = Diags;
    if (Diags.empty())
      R.M = std::move(M);
    return R;
  }

private:
  std::vector<std::string> Lines;
  size_t LineNo = 0;
  DiagList Diags;

  void error(const LineLexer &Lex, const std::string &Rule,
             const std::string &Msg) {
    Diagnostic D;
    D.Rule = Rule;
    D.Message = Msg;
    D.Loc = {Lex.line(), Lex.peek().Col};
    Diags.push_back(D);
  }

  bool expectPunct(LineLexer &Lex, char C) {
    if (!Lex.isPunct(C)) {
      error(Lex, "syntax", std::string("expected '") + C + "'");
      return false;
    }
    Lex.take();
    return true;
  }

  bool expectIdent(LineLexer &Lex, const char *W) {
    if (!Lex.isIdent(W)) {
      error(Lex, "syntax", std::string("expected '") + W + "'");
      return false;
    }
    Lex.take();
    return true;
  }

  std::optional<int64_t> expectInt(LineLexer &Lex) {
    if (Lex.peek().Kind != Tok::Int) {
      error(Lex, "syntax", "expected integer");
      return std::nullopt;
    }
    return Lex.take().IntVal;
  }

  // type := base ('addrspace' '(' N ')')? '*' ...
  std::optional<Type> parseType(LineLexer &Lex) {
    Type T;
    const Token &P = Lex.peek();
    if (P.Kind == Tok::Ident) {
      std::string W = P.Text;
      if (W == "void")
        T = Type::voidTy();
      else if (W == "i1")
        T = Type::i1();
      else if (W == "i8")
        T = Type::i8();
      else if (W == "i16")
        T = Type::i16();
      else if (W == "i32")
        T = Type::i32();
      else if (W == "fn")
        T = Type::fn();
      else {
        error(Lex, "syntax", "unknown type '" + W + "'");
        return std::nullopt;
      }
      Lex.take();
    } else if (P.Kind == Tok::Punct && P.Punct == '[') {
      Lex.take();
      auto N = expectInt(Lex);
      if (!N)
        return std::nullopt;
      if (!expectIdent(Lex, "x"))
        return std::nullopt;
      auto E = parseType(Lex);
      if (!E)
        return std::nullopt;
      if (!expectPunct(Lex, ']'))
        return std::nullopt;
      T = Type::array(*E, *N);
    } else {
      error(Lex, "syntax", "expected type");
      return std::nullopt;
    }
    while (true) {
      if (Lex.isIdent("addrspace")) {
        Lex.take();
        if (!expectPunct(Lex, '('))
          return std::nullopt;
        auto N = expectInt(Lex);
        if (!N)
          return std::nullopt;
        if (!expectPunct(Lex, ')'))
          return std::nullopt;
        auto AS = addrSpaceFromNumber(static_cast<int>(*N));
        if (!AS) {
          error(Lex, "syntax", "unknown address space");
          return std::nullopt;
        }
        if (!expectPunct(Lex, '*'))
          return std::nullopt;
        T = Type::ptr(T, *AS);
      } else if (Lex.isPunct('*')) {
        Lex.take();
        T = Type::ptr(T);
      } else {
        break;
      }
    }
    return T;
  }

  std::optional<Value> parseValue(LineLexer &Lex, const Type &Ty) {
    const Token &P = Lex.peek();
    if (P.Kind == Tok::Local)
      return Value::temp(Lex.take().Text, Ty);
    if (P.Kind == Tok::Global)
      return Value::global(Lex.take().Text, Ty);
    if (P.Kind == Tok::Int)
      return Value::constInt(Lex.take().IntVal, Ty);
    if (P.Kind == Tok::Ident && P.Text == "null") {
      Lex.take();
      return Value::null(Ty);
    }
    error(Lex, "syntax", "expected value");
    return std::nullopt;
  }

  std::optional<Value> parseTypedValue(LineLexer &Lex) {
    auto T = parseType(Lex);
    if (!T)
      return std::nullopt;
    return parseValue(Lex, *T);
  }

  bool parseGlobal(LineLexer &Lex, Module &M) {
    GlobalVar G;
    G.Name = Lex.take().Text;
    if (!expectPunct(Lex, '='))
      return false;
    if (!expectIdent(Lex, "global"))
      return false;
    auto T = parseType(Lex);
    if (!T)
      return false;
    G.ValTy = *T;
    while (Lex.isPunct(',')) {
      Lex.take();
      if (Lex.isIdent("init")) {
        Lex.take();
        if (!expectPunct(Lex, '('))
          return false;
        auto V = expectInt(Lex);
        if (!V)
          return false;
        G.Init = *V;
        if (!expectPunct(Lex, ')'))
          return false;
        continue;
      }
      if (!expectIdent(Lex, "map"))
        return false;
      if (!expectPunct(Lex, '('))
        return false;
      if (Lex.peek().Kind != Tok::Ident) {
        error(Lex, "syntax", "expected map direction");
        return false;
      }
      std::string D = Lex.take().Text;
      if (D == "to")
        G.Map = MapDir::To;
      else if (D == "from")
        G.Map = MapDir::From;
      else if (D == "tofrom")
        G.Map = MapDir::ToFrom;
      else {
        error(Lex, "syntax", "unknown map direction '" + D + "'");
        return false;
      }
      if (!expectPunct(Lex, ')'))
        return false;
    }
    M.Globals.push_back(std::move(G));
    return true;
  }

  bool parseLaunch(LineLexer &Lex, Module &M) {
    Lex.take(); // launch
    LaunchDefaults L;
    if (!expectIdent(Lex, "teams") || !expectPunct(Lex, '('))
      return false;
    auto T = expectInt(Lex);
    if (!T || !expectPunct(Lex, ')'))
      return false;
    if (!expectIdent(Lex, "workers") || !expectPunct(Lex, '('))
      return false;
    auto W = expectInt(Lex);
    if (!W || !expectPunct(Lex, ')'))
      return false;
    L.Teams = static_cast<int>(*T);
    L.Workers = static_cast<int>(*W);
    M.Launch = L;
    return true;
  }

  bool parseFunction(LineLexer &Lex, Module &M) {
    Lex.take(); // define
    Function F;
    auto RT = parseType(Lex);
    if (!RT)
      return false;
    F.RetTy = *RT;
    if (Lex.peek().Kind != Tok::Global) {
      error(Lex, "syntax", "expected function name");
      return false;
    }
    F.Name = Lex.take().Text;
    if (!expectPunct(Lex, '('))
      return false;
    while (!Lex.isPunct(')')) {
      if (!F.Params.empty() && !expectPunct(Lex, ','))
        return false;
      auto PT = parseType(Lex);
      if (!PT)
        return false;
      if (Lex.peek().Kind != Tok::Local) {
        error(Lex, "syntax", "expected parameter name");
        return false;
      }
      F.Params.push_back({Lex.take().Text, *PT});
    }
    Lex.take(); // )
    while (Lex.peek().Kind == Tok::Ident) {
      std::string A = Lex.take().Text;
      if (A == "kernel")
        F.Kernel = true;
      else if (A == "machine")
        F.Machine = true;
      else {
        error(Lex, "syntax", "unknown function attribute '" + A + "'");
        return false;
      }
    }
    if (!expectPunct(Lex, '{'))
      return false;

    // Body: label lines and instruction lines until '}'.
    while (true) {
      if (++LineNo >= Lines.size()) {
        error(Lex, "syntax", "unterminated function body");
        return false;
      }
      LineLexer BL(Lines[LineNo], static_cast<int>(LineNo) + 1);
      if (BL.atEnd())
        continue;
      if (BL.isPunct('}'))
        break;
      if (BL.peek().Kind == Tok::Ident && isLabelLine(Lines[LineNo])) {
        BasicBlock B;
        B.Name = BL.take().Text;
        if (BL.isPunct('[')) {
          BL.take();
          if (BL.isIdent("seq"))
            B.Tag = BlockTag::Seq;
          else if (BL.isIdent("worker"))
            B.Tag = BlockTag::Worker;
          else {
            error(BL, "syntax", "unknown block tag");
            return false;
          }
          BL.take();
          if (!expectPunct(BL, ']'))
            return false;
        }
        if (!expectPunct(BL, ':'))
          return false;
        F.Blocks.push_back(std::move(B));
        continue;
      }
      if (F.Blocks.empty()) {
        error(BL, "syntax", "instruction before first block label");
        return false;
      }
      auto In = parseInstruction(BL);
      if (!In)
        return false;
      F.Blocks.back().Instrs.push_back(std::move(*In));
    }
    M.Functions.push_back(std::move(F));
    return true;
  }

  /// A label line is "name:" or "name [tag]:", i.e. it ends with ':' and is
  /// not an instruction (instructions never contain ':').
  static bool isLabelLine(const std::string &L) {
    size_t End = L.find(';');
    std::string S = End == std::string::npos ? L : L.substr(0, End);
    while (!S.empty() && (S.back() == ' ' || S.back() == '\t'))
      S.pop_back();
    return !S.empty() && S.back() == ':';
  }

  std::optional<Instruction> parseInstruction(LineLexer &Lex) {
    Instruction I;
    if (Lex.peek().Kind == Tok::Local) {
      I.Result = Lex.take().Text;
      if (!expectPunct(Lex, '='))
        return std::nullopt;
    }
    if (Lex.peek().Kind != Tok::Ident) {
      error(Lex, "syntax", "expected opcode");
      return std::nullopt;
    }
    std::string Op = Lex.take().Text;

    if (Op == "alloca") {
      I.Op = Opcode::Alloca;
      auto T = parseType(Lex);
      if (!T)
        return std::nullopt;
      I.AllocaTy = *T;
      I.ResultTy = Type::ptr(*T);
      if (!expectPunct(Lex, ',') || !expectIdent(Lex, "align"))
        return std::nullopt;
      auto A = expectInt(Lex);
      if (!A)
        return std::nullopt;
      I.Align = static_cast<int>(*A);
      if (Lex.isPunct(',')) {
        Lex.take();
        if (!expectIdent(Lex, "candidate"))
          return std::nullopt;
        I.Candidate = true;
      }
      return I;
    }
    if (Op == "load") {
      I.Op = Opcode::Load;
      auto T = parseType(Lex);
      if (!T || !expectPunct(Lex, ','))
        return std::nullopt;
      I.ResultTy = *T;
      auto P = parseTypedValue(Lex);
      if (!P)
        return std::nullopt;
      I.Ops.push_back(*P);
      return I;
    }
    if (Op == "store") {
      I.Op = Opcode::Store;
      auto V = parseTypedValue(Lex);
      if (!V || !expectPunct(Lex, ','))
        return std::nullopt;
      auto P = parseTypedValue(Lex);
      if (!P)
        return std::nullopt;
      I.Ops = {*V, *P};
      return I;
    }
    if (Op == "bitcast" || Op == "addrspacecast") {
      I.Op = Op == "bitcast" ? Opcode::BitCast : Opcode::AddrSpaceCast;
      auto V = parseTypedValue(Lex);
      if (!V || !expectIdent(Lex, "to"))
        return std::nullopt;
      auto T = parseType(Lex);
      if (!T)
        return std::nullopt;
      I.Ops.push_back(*V);
      I.ResultTy = *T;
      return I;
    }
    if (Op == "getelement") {
      I.Op = Opcode::GetElement;
      auto ET = parseType(Lex);
      if (!ET || !expectPunct(Lex, ','))
        return std::nullopt;
      I.GepElemTy = *ET;
      auto P = parseTypedValue(Lex);
      if (!P || !expectPunct(Lex, ','))
        return std::nullopt;
      auto Idx = parseTypedValue(Lex);
      if (!Idx)
        return std::nullopt;
      I.Ops = {*P, *Idx};
      Type Scalar = ET->isArray() ? ET->elem() : *ET;
      AddrSpace AS =
          P->Ty.isPtr() ? P->Ty.Space : AddrSpace::Generic;
      I.ResultTy = Type::ptr(Scalar, AS);
      return I;
    }
    if (Op == "add" || Op == "sub" || Op == "mul") {
      I.Op = Opcode::BinOp;
      I.BK = Op == "add" ? BinKind::Add
                         : (Op == "sub" ? BinKind::Sub : BinKind::Mul);
      auto T = parseType(Lex);
      if (!T)
        return std::nullopt;
      auto A = parseValue(Lex, *T);
      if (!A || !expectPunct(Lex, ','))
        return std::nullopt;
      auto B = parseValue(Lex, *T);
      if (!B)
        return std::nullopt;
      I.Ops = {*A, *B};
      I.ResultTy = *T;
      return I;
    }
    if (Op == "icmp") {
      I.Op = Opcode::Cmp;
      if (Lex.peek().Kind != Tok::Ident) {
        error(Lex, "syntax", "expected comparison predicate");
        return std::nullopt;
      }
      std::string P = Lex.take().Text;
      if (P == "eq")
        I.CK = CmpKind::Eq;
      else if (P == "ne")
        I.CK = CmpKind::Ne;
      else if (P == "lt")
        I.CK = CmpKind::Lt;
      else if (P == "le")
        I.CK = CmpKind::Le;
      else if (P == "gt")
        I.CK = CmpKind::Gt;
      else if (P == "ge")
        I.CK = CmpKind::Ge;
      else {
        error(Lex, "syntax", "unknown predicate '" + P + "'");
        return std::nullopt;
      }
      auto T = parseType(Lex);
      if (!T)
        return std::nullopt;
      auto A = parseValue(Lex, *T);
      if (!A || !expectPunct(Lex, ','))
        return std::nullopt;
      auto B = parseValue(Lex, *T);
      if (!B)
        return std::nullopt;
      I.Ops = {*A, *B};
      I.ResultTy = Type::i1();
      return I;
    }
    if (Op == "br") {
      if (Lex.isIdent("label")) {
        I.Op = Opcode::Br;
        Lex.take();
        if (Lex.peek().Kind != Tok::Local) {
          error(Lex, "syntax", "expected block label");
          return std::nullopt;
        }
        I.Target = Lex.take().Text;
        return I;
      }
      I.Op = Opcode::CondBr;
      if (!expectIdent(Lex, "i1"))
        return std::nullopt;
      auto C = parseValue(Lex, Type::i1());
      if (!C || !expectPunct(Lex, ',') || !expectIdent(Lex, "label"))
        return std::nullopt;
      if (Lex.peek().Kind != Tok::Local) {
        error(Lex, "syntax", "expected block label");
        return std::nullopt;
      }
      I.Target = Lex.take().Text;
      if (!expectPunct(Lex, ',') || !expectIdent(Lex, "label"))
        return std::nullopt;
      if (Lex.peek().Kind != Tok::Local) {
        error(Lex, "syntax", "expected block label");
        return std::nullopt;
      }
      I.Target2 = Lex.take().Text;
      I.Ops = {*C};
      return I;
    }
    if (Op == "call") {
      I.Op = Opcode::Call;
      auto RT = parseType(Lex);
      if (!RT)
        return std::nullopt;
      I.ResultTy = *RT;
      auto Callee = parseValue(Lex, Type::fn());
      if (!Callee)
        return std::nullopt;
      I.Ops.push_back(*Callee);
      if (!expectPunct(Lex, '('))
        return std::nullopt;
      bool First = true;
      while (!Lex.isPunct(')')) {
        if (!First && !expectPunct(Lex, ','))
          return std::nullopt;
        First = false;
        auto A = parseTypedValue(Lex);
        if (!A)
          return std::nullopt;
        I.Ops.push_back(*A);
      }
      Lex.take(); // )
      return I;
    }
    if (Op == "ret") {
      I.Op = Opcode::Ret;
      if (Lex.isIdent("void")) {
        Lex.take();
        return I;
      }
      auto V = parseTypedValue(Lex);
      if (!V)
        return std::nullopt;
      I.Ops.push_back(*V);
      return I;
    }
    if (Op == "barrier") {
      I.Op = Opcode::Barrier;
      return I;
    }
    if (Op == "frameindex") {
      I.Op = Opcode::FrameIndex;
      auto S = expectInt(Lex);
      if (!S || !expectPunct(Lex, ','))
        return std::nullopt;
      I.Slot = static_cast<int>(*S);
      if (Lex.isIdent("local"))
        I.Base = BaseReg::FrameLocal;
      else if (Lex.isIdent("shared"))
        I.Base = BaseReg::Shared;
      else {
        error(Lex, "syntax", "expected 'local' or 'shared'");
        return std::nullopt;
      }
      Lex.take();
      if (Lex.isPunct(',')) {
        Lex.take();
        if (!expectIdent(Lex, "candidate"))
          return std::nullopt;
        I.Candidate = true;
      }
      // Result type is refined by the frame-lowering pass; parsed text keeps
      // a generic i8*; printers never emit standalone frameindex types.
      I.ResultTy = Type::ptr(Type::i8());
      return I;
    }
    error(Lex, "syntax", "unknown opcode '" + Op + "'");
    return std::nullopt;
  }

  bool parseFrame(LineLexer &Lex, Module &M) {
    Lex.take(); // frame
    if (Lex.peek().Kind != Tok::Global) {
      error(Lex, "syntax", "expected frame root function");
      return false;
    }
    FrameGroup G;
    G.Root = Lex.take().Text;
    if (!expectIdent(Lex, "members") || !expectPunct(Lex, '['))
      return false;
    while (!Lex.isPunct(']')) {
      if (!G.Members.empty() && !expectPunct(Lex, ','))
        return false;
      if (Lex.peek().Kind != Tok::Global) {
        error(Lex, "syntax", "expected member function");
        return false;
      }
      G.Members.push_back(Lex.take().Text);
    }
    Lex.take(); // ]
    if (!expectPunct(Lex, '{'))
      return false;

    DepotLayout L;
    bool SawTotal = false;
    while (true) {
      if (++LineNo >= Lines.size()) {
        error(Lex, "syntax", "unterminated frame block");
        return false;
      }
      LineLexer FL(Lines[LineNo], static_cast<int>(LineNo) + 1);
      if (FL.atEnd())
        continue;
      if (FL.isPunct('}'))
        break;
      if (FL.isIdent("slot")) {
        FL.take();
        auto Idx = expectInt(FL);
        if (!Idx || !expectPunct(FL, ':'))
          return false;
        DepotSlot S;
        if (!expectIdent(FL, "offset"))
          return false;
        auto Off = expectInt(FL);
        if (!Off || !expectPunct(FL, ','))
          return false;
        S.Offset = *Off;
        if (!expectIdent(FL, "size"))
          return false;
        auto Sz = expectInt(FL);
        if (!Sz || !expectPunct(FL, ','))
          return false;
        S.Size = *Sz;
        if (!expectIdent(FL, "align"))
          return false;
        auto Al = expectInt(FL);
        if (!Al || !expectPunct(FL, ','))
          return false;
        S.Align = static_cast<int>(*Al);
        if (FL.isIdent("shared"))
          S.SharedResident = true;
        else if (!FL.isIdent("local")) {
          error(FL, "syntax", "expected 'local' or 'shared'");
          return false;
        }
        FL.take();
        while (FL.isPunct(',')) {
          FL.take();
          if (FL.peek().Kind != Tok::Local) {
            error(FL, "syntax", "expected slot owner");
            return false;
          }
          S.Owners.push_back(FL.take().Text);
        }
        if (static_cast<size_t>(*Idx) != L.Slots.size()) {
          error(FL, "syntax", "slot indices must be dense and in order");
          return false;
        }
        L.Slots.push_back(std::move(S));
        continue;
      }
      if (FL.isIdent("total")) {
        FL.take();
        auto T = expectInt(FL);
        if (!T)
          return false;
        L.TotalLocal = L.TotalShared = *T;
        if (FL.isPunct(',')) {
          FL.take();
          if (!expectIdent(FL, "mirrored"))
            return false;
          L.HasSharedDepot = true;
        }
        SawTotal = true;
        continue;
      }
      error(FL, "syntax", "expected slot, total, or '}'");
      return false;
    }
    if (!SawTotal) {
      error(Lex, "syntax", "frame block missing total");
      return false;
    }
    M.Groups.push_back(std::move(G));
    M.Layouts.emplace_back(M.Groups.back().Root, std::move(L));
    return true;
  }

  void checkDanglingValues(const Module &M) {
    for (const Function &F : M.Functions) {
      std::set<std::string> Defs;
      for (const Param &P : F.Params)
        Defs.insert(P.Name);
      for (const BasicBlock &B : F.Blocks)
        for (const Instruction &I : B.Instrs)
          if (!I.Result.empty())
            Defs.insert(I.Result);
      for (const BasicBlock &B : F.Blocks)
        for (const Instruction &I : B.Instrs)
          for (const Value &V : I.Ops)
            if (V.isTemp() && !Defs.count(V.Name)) {
              Diagnostic D;
              D.Rule = "dangling-value";
              D.Message = "use of undefined value %" + V.Name;
              D.Function = F.Name;
              Diags.push_back(D);
            }
    }
  }
};

} // namespace

IRParseResult parseModule(const std::string &Text) {
  Parser P(Text);
  return P.run();
}

} // namespace omplab
