//=--parser.hpp---------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Recursive-descent parser for mini-C, including the Checked C annotation
// subset the rewriter emits, so converted output can be re-analyzed. Parsing
// runs per file into one shared translation unit; a second pass resolves
// globals, calls, and deferred bounds expressions, and a third computes
// expression types and resolves struct fields.
//
// Grammar reference: docs/minic-grammar.md. One declarator per declaration; a
// function is either declared once (no body) or defined once.
//===----------------------------------------------------------------------===//

#ifndef MC3_PARSER_HPP
#define MC3_PARSER_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "mc3/ast.hpp"
#include "mc3/diag.hpp"
#include "mc3/lexer.hpp"

namespace mc3 {

struct InputFile {
  std::string Path;
  std::string Text;
  bool Readonly = false;
};

// Library prototypes with Checked C interop types; modeled as a readonly
// system header so their declarations are never rewritten and never become
// wildness root causes.
inline const char *preludeText() {
  return
      "itype_for_any(T) _Array_ptr<T> malloc(unsigned size) : byte_count(size);\n"
      "itype_for_any(T) _Array_ptr<T> calloc(unsigned nmemb, unsigned size);\n"
      "itype_for_any(T) void free(void *p : itype(_Array_ptr<T>));\n"
      "unsigned strlen(const char *s : itype(_Nt_array_ptr<const char>));\n"
      "itype_for_any(T) void bzero(void *dest : itype(_Array_ptr<T>) byte_count(n), unsigned n);\n";
}

class Parser {
public:
  Parser(TranslationUnit &TU, FileId File) : TU(TU), File(File) {
    Lexer L(TU.SM, File);
    Toks = L.lexAll();
  }

  void parseFile() {
    while (!cur().is(Tok::Eof))
      parseTopLevel();
  }

  // Pass 2: resolve pending identifier references against globals and
  // functions, honoring the bounds context they were parsed in.
  static void resolveProgram(TranslationUnit &TU,
                             std::vector<std::tuple<int, int, int>> &Pending) {
    for (auto &[ExprId, CtxFn, CtxStruct] : Pending) {
      Expr &E = TU.expr(ExprId);
      if (E.Kind != ExprKind::VarRef || E.RefDecl >= 0)
        continue;
      if (CtxFn >= 0) {
        for (int P : TU.decl(CtxFn).Params)
          if (TU.decl(P).Name == E.Name) {
            E.RefDecl = P;
            break;
          }
      }
      if (E.RefDecl < 0 && CtxStruct >= 0)
        E.RefDecl = TU.findField(CtxStruct, E.Name);
      if (E.RefDecl < 0) {
        auto It = TU.GlobalByName.find(E.Name);
        if (It != TU.GlobalByName.end())
          E.RefDecl = It->second;
      }
      if (E.RefDecl < 0)
        throw ParseError(E.Span, "unresolved identifier '" + E.Name + "'");
    }
    // Calls resolve by name against the function table.
    for (Expr &E : TU.Exprs) {
      if (E.Kind != ExprKind::Call)
        continue;
      auto It = TU.FuncByName.find(E.Name);
      if (It == TU.FuncByName.end())
        throw ParseError(E.Span, "call to undeclared function '" + E.Name + "'");
      E.RefDecl = It->second;
    }
  }

  std::vector<std::tuple<int, int, int>> takePending() { return std::move(Pending); }

private:
  TranslationUnit &TU;
  FileId File;
  std::vector<Token> Toks;
  size_t Pos = 0;

  // Lexical scope stack for params and locals while parsing a body.
  std::vector<std::vector<std::pair<std::string, int>>> Scopes;
  int CurFn = -1;
  // Bounds-expression resolution context (function params / struct fields).
  int BoundsCtxFn = -1, BoundsCtxStruct = -1;
  std::vector<std::string> GenericNames; // in-scope itype_for_any vars
  // (expr id, ctx fn, ctx struct) for unresolved VarRefs.
  std::vector<std::tuple<int, int, int>> Pending;

  const Token &cur() const { return Toks[Pos]; }
  const Token &ahead(size_t N = 1) const {
    return Toks[std::min(Pos + N, Toks.size() - 1)];
  }
  Token advance() { return Toks[Pos++]; }

  [[noreturn]] void fail(const std::string &Expected) {
    throw ParseError(cur().Span, "expected " + Expected + ", found '" +
                                     (cur().is(Tok::Eof) ? "<eof>" : cur().Text) +
                                     "'");
  }

  Token expect(Tok K, const char *What) {
    if (!cur().is(K))
      fail(What);
    return advance();
  }

  // '>>' may close two nested checked types at once.
  void expectCloseAngle() {
    if (cur().is(Tok::Gt)) {
      advance();
      return;
    }
    if (cur().is(Tok::Shr)) {
      Token &T = Toks[Pos];
      T.Kind = Tok::Gt;
      T.Text = ">";
      T.Span.Begin += 1;
      return; // leave the second '>' for the enclosing close
    }
    fail("'>'");
  }

  bool accept(Tok K) {
    if (cur().is(K)) {
      advance();
      return true;
    }
    return false;
  }

  int addExpr(Expr E) {
    TU.Exprs.push_back(std::move(E));
    return static_cast<int>(TU.Exprs.size()) - 1;
  }
  int addStmt(Stmt S) {
    TU.Stmts.push_back(std::move(S));
    return static_cast<int>(TU.Stmts.size()) - 1;
  }
  int addDecl(Decl D) {
    TU.Decls.push_back(std::move(D));
    return static_cast<int>(TU.Decls.size()) - 1;
  }

  SourceSpan spanBetween(uint32_t Begin, uint32_t End) const {
    SourceSpan S;
    S.File = File;
    S.Begin = Begin;
    S.End = End;
    S.Line = TU.SM.lineOf(File, Begin);
    return S;
  }

  //===------------------------------------------------------------------===//
  // Types
  //===------------------------------------------------------------------===//

  bool startsType(const Token &T) const {
    switch (T.Kind) {
    case Tok::KwVoid: case Tok::KwInt: case Tok::KwChar: case Tok::KwUnsigned:
    case Tok::KwSizeT: case Tok::KwConst: case Tok::KwStruct: case Tok::KwUnion:
    case Tok::KwPtrType: case Tok::KwArrayPtrType: case Tok::KwNtArrayPtrType:
      return true;
    case Tok::Ident:
      return std::find(GenericNames.begin(), GenericNames.end(), T.Text) !=
             GenericNames.end();
    default:
      return false;
    }
  }

  // Parses a type including any trailing '*'s, e.g. inside casts or the
  // argument of a checked type constructor.
  TypeExpr parseTypeAndStars() {
    TypeExpr T = parseTypeCore();
    while (accept(Tok::Star))
      T.Levels.insert(T.Levels.begin(), CheckedKind::None);
    return T;
  }

  TypeExpr parseTypeCore() {
    TypeExpr T;
    if (accept(Tok::KwConst))
      T.Const = true;
    switch (cur().Kind) {
    case Tok::KwVoid: advance(); T.Base = BaseType::Void; break;
    case Tok::KwInt: advance(); T.Base = BaseType::Int; break;
    case Tok::KwChar: advance(); T.Base = BaseType::Char; break;
    case Tok::KwUnsigned:
      advance();
      accept(Tok::KwInt);
      T.Base = BaseType::Unsigned;
      break;
    case Tok::KwSizeT: advance(); T.Base = BaseType::SizeT; break;
    case Tok::KwStruct:
    case Tok::KwUnion:
      advance();
      T.Base = BaseType::StructRef;
      T.Name = expect(Tok::Ident, "struct name").Text;
      break;
    case Tok::KwPtrType:
    case Tok::KwArrayPtrType:
    case Tok::KwNtArrayPtrType: {
      CheckedKind K = cur().is(Tok::KwPtrType)      ? CheckedKind::Ptr
                      : cur().is(Tok::KwArrayPtrType) ? CheckedKind::Arr
                                                      : CheckedKind::NtArr;
      advance();
      expect(Tok::Lt, "'<'");
      T = parseTypeAndStars();
      expectCloseAngle();
      T.Levels.insert(T.Levels.begin(), K);
      return T;
    }
    case Tok::Ident:
      if (startsType(cur())) {
        T.Base = BaseType::Generic;
        T.Name = advance().Text;
        break;
      }
      [[fallthrough]];
    default:
      fail("a type");
    }
    return T;
  }

  //===------------------------------------------------------------------===//
  // Declarations
  //===------------------------------------------------------------------===//

  void parseTopLevel() {
    uint32_t DeclStart = cur().Span.Begin;
    std::vector<std::string> Generics;
    if (cur().is(Tok::KwItypeForAny)) {
      advance();
      expect(Tok::LParen, "'('");
      Generics.push_back(expect(Tok::Ident, "type variable").Text);
      while (accept(Tok::Comma))
        Generics.push_back(expect(Tok::Ident, "type variable").Text);
      expect(Tok::RParen, "')'");
      GenericNames = Generics;
      DeclStart = cur().Span.Begin; // declarator text starts after the prefix
    }

    bool IsExtern = false, IsStatic = false;
    for (;;) {
      if (accept(Tok::KwExtern)) { IsExtern = true; continue; }
      if (accept(Tok::KwStatic)) { IsStatic = true; continue; }
      break;
    }

    // Struct or union definition.
    if ((cur().is(Tok::KwStruct) || cur().is(Tok::KwUnion)) &&
        ahead(1).is(Tok::Ident) && ahead(2).is(Tok::LBrace)) {
      parseRecordDef(cur().is(Tok::KwUnion));
      GenericNames.clear();
      return;
    }

    if (DeclStart == cur().Span.Begin)
      DeclStart = cur().Span.Begin;
    TypeExpr T = parseTypeCore();
    while (accept(Tok::Star))
      T.Levels.insert(T.Levels.begin(), CheckedKind::None);
    Token Name = expect(Tok::Ident, "a name");

    if (cur().is(Tok::LParen)) {
      parseFunctionRest(DeclStart, T, Name, IsExtern, IsStatic, Generics);
    } else {
      parseGlobalRest(DeclStart, T, Name, IsExtern, IsStatic);
    }
    GenericNames.clear();
  }

  void parseRecordDef(bool IsUnion) {
    advance(); // struct/union
    Token Name = expect(Tok::Ident, "record name");
    if (TU.StructByName.count(Name.Text))
      throw ParseError(Name.Span, "duplicate definition of '" + Name.Text + "'");
    expect(Tok::LBrace, "'{'");

    StructInfo SI;
    SI.Name = Name.Text;
    SI.IsUnion = IsUnion;
    SI.Span = Name.Span;
    int StructIdx = static_cast<int>(TU.Structs.size());
    TU.Structs.push_back(SI);
    BoundsCtxStruct = StructIdx;

    int Position = 0;
    while (!cur().is(Tok::RBrace)) {
      uint32_t FieldStart = cur().Span.Begin;
      TypeExpr FT = parseTypeCore();
      while (accept(Tok::Star))
        FT.Levels.insert(FT.Levels.begin(), CheckedKind::None);
      Token FName = expect(Tok::Ident, "field name");
      Decl FD;
      FD.Kind = DeclKind::Field;
      FD.Name = FName.Text;
      FD.Type = FT;
      FD.Span = FName.Span;
      FD.OwnerStruct = StructIdx;
      FD.Position = Position++;
      FD.Readonly = TU.SM.file(File).Readonly;
      parseArraySuffix(FD.Type);
      if (accept(Tok::Colon))
        parseDeclAnnots(FD);
      FD.DeclaratorSpan = spanBetween(FieldStart, prevEnd());
      expect(Tok::Semi, "';'");
      int FId = addDecl(FD);
      TU.Structs[StructIdx].Fields.push_back(FId);
    }
    expect(Tok::RBrace, "'}'");
    expect(Tok::Semi, "';'");
    BoundsCtxStruct = -1;

    Decl D;
    D.Kind = DeclKind::StructDef;
    D.Name = Name.Text;
    D.Span = Name.Span;
    D.OwnerStruct = StructIdx;
    D.Readonly = TU.SM.file(File).Readonly;
    int Id = addDecl(D);
    TU.Structs[StructIdx].DeclId = Id;
    TU.StructByName[Name.Text] = StructIdx;
    TU.TopLevel.push_back(Id);
  }

  uint32_t prevEnd() const { return Toks[Pos - 1].Span.End; }

  void parseArraySuffix(TypeExpr &T) {
    if (cur().is(Tok::LBracket) || cur().is(Tok::KwCheckedMarker) ||
        cur().is(Tok::KwNtCheckedMarker)) {
      if (cur().is(Tok::KwCheckedMarker)) {
        if (!ahead(1).is(Tok::LBracket))
          return; // body marker, not an array suffix
        advance();
        T.ArrayChecked = CheckedKind::Arr;
      } else if (cur().is(Tok::KwNtCheckedMarker)) {
        advance();
        T.ArrayChecked = CheckedKind::NtArr;
      }
      expect(Tok::LBracket, "'['");
      Token Len = expect(Tok::IntLit, "array length");
      if (Len.IntValue <= 0)
        throw ParseError(Len.Span, "array length must be positive");
      T.ArrayLen = Len.IntValue;
      expect(Tok::RBracket, "']'");
    }
  }

  // `: itype(T) [count(e)] | : count(e) | : byte_count(e)` after a declarator.
  void parseDeclAnnots(Decl &D) {
    if (cur().isIdent("itype")) {
      advance();
      expect(Tok::LParen, "'('");
      D.Itype = parseTypeAndStars();
      expect(Tok::RParen, "')'");
    }
    if (cur().isIdent("count") || cur().isIdent("byte_count")) {
      D.Bounds.Kind =
          cur().isIdent("count") ? BoundsAnnot::Count : BoundsAnnot::ByteCount;
      advance();
      expect(Tok::LParen, "'('");
      D.Bounds.Expr = parseExpr();
      expect(Tok::RParen, "')'");
    }
    if (!D.Itype && D.Bounds.Kind == BoundsAnnot::None)
      fail("itype, count, or byte_count");
  }

  void parseFunctionRest(uint32_t DeclStart, TypeExpr RetType, Token Name,
                         bool IsExtern, bool IsStatic,
                         std::vector<std::string> Generics) {
    if (TU.FuncByName.count(Name.Text) || TU.GlobalByName.count(Name.Text))
      throw ParseError(Name.Span, "duplicate definition of '" + Name.Text + "'");

    Decl Fn;
    Fn.Kind = DeclKind::Function;
    Fn.Name = Name.Text;
    Fn.Type = RetType;
    Fn.Span = Name.Span;
    Fn.IsExtern = IsExtern;
    Fn.IsStatic = IsStatic;
    Fn.GenericParams = std::move(Generics);
    Fn.Readonly = TU.SM.file(File).Readonly;
    Fn.DeclaratorSpan = spanBetween(DeclStart, Name.Span.End);
    int FnId = addDecl(Fn);
    TU.FuncByName[Name.Text] = FnId;
    TU.TopLevel.push_back(FnId);
    BoundsCtxFn = FnId;

    expect(Tok::LParen, "'('");
    int Position = 0;
    if (cur().is(Tok::KwVoid) && ahead(1).is(Tok::RParen)) {
      advance();
    } else if (!cur().is(Tok::RParen)) {
      for (;;) {
        if (accept(Tok::Ellipsis)) {
          TU.decl(FnId).Variadic = true;
          break;
        }
        uint32_t PStart = cur().Span.Begin;
        TypeExpr PT = parseTypeCore();
        while (accept(Tok::Star))
          PT.Levels.insert(PT.Levels.begin(), CheckedKind::None);
        Token PName = expect(Tok::Ident, "parameter name");
        Decl PD;
        PD.Kind = DeclKind::Param;
        PD.Name = PName.Text;
        PD.Type = PT;
        PD.Span = PName.Span;
        PD.OwnerFn = FnId;
        PD.Position = Position++;
        PD.Readonly = TU.SM.file(File).Readonly;
        parseArraySuffix(PD.Type);
        if (accept(Tok::Colon))
          parseDeclAnnots(PD);
        PD.DeclaratorSpan = spanBetween(PStart, prevEnd());
        int PId = addDecl(PD); // addDecl may reallocate the arena
        TU.decl(FnId).Params.push_back(PId);
        if (!accept(Tok::Comma))
          break;
      }
    }
    expect(Tok::RParen, "')'");

    // Return annotations: `: itype(...)` / `: count(e)` etc.
    uint32_t RetAnnotStart = prevEnd();
    if (accept(Tok::Colon)) {
      Decl Tmp;
      parseDeclAnnots(Tmp);
      TU.decl(FnId).Itype = Tmp.Itype;
      TU.decl(FnId).Bounds = Tmp.Bounds;
    }
    TU.decl(FnId).DeclaratorSpan =
        spanBetween(DeclStart, Name.Span.End); // type + name only
    // RetAnnot region sits between ')' and the body or ';'.
    SourceSpan RetSpan = spanBetween(RetAnnotStart, prevEnd());
    if (accept(Tok::KwCheckedMarker))
      TU.decl(FnId).CheckedBodyMarker = true;

    if (cur().is(Tok::LBrace)) {
      TU.decl(FnId).Defined = true;
      TU.decl(FnId).BodyOpen = cur().Span;
      Scopes.clear();
      Scopes.emplace_back();
      for (int P : TU.decl(FnId).Params)
        Scopes.back().emplace_back(TU.decl(P).Name, P);
      CurFn = FnId;
      int Body = parseBlock();
      CurFn = -1;
      Scopes.clear();
      TU.decl(FnId).Body = Body;
    } else {
      expect(Tok::Semi, "';' or a function body");
    }
    TU.RetAnnotSpans[FnId] = RetSpan;
    BoundsCtxFn = -1;
  }

  void parseGlobalRest(uint32_t DeclStart, TypeExpr T, Token Name,
                       bool IsExtern, bool IsStatic) {
    if (TU.GlobalByName.count(Name.Text) || TU.FuncByName.count(Name.Text))
      throw ParseError(Name.Span, "duplicate definition of '" + Name.Text + "'");
    Decl D;
    D.Kind = DeclKind::Global;
    D.Name = Name.Text;
    D.Type = T;
    D.Span = Name.Span;
    D.IsExtern = IsExtern;
    D.IsStatic = IsStatic;
    D.Readonly = TU.SM.file(File).Readonly;
    parseArraySuffix(D.Type);
    if (accept(Tok::Colon))
      parseDeclAnnots(D);
    D.DeclaratorSpan = spanBetween(DeclStart, prevEnd());
    D.Defined = !IsExtern;
    if (accept(Tok::Assign)) {
      D.InitExpr = parseExpr();
      D.Defined = true;
    }
    expect(Tok::Semi, "';'");
    int Id = addDecl(D);
    TU.GlobalByName[Name.Text] = Id;
    TU.TopLevel.push_back(Id);
  }

  //===------------------------------------------------------------------===//
  // Statements
  //===------------------------------------------------------------------===//

  int parseBlock() {
    Token LB = expect(Tok::LBrace, "'{'");
    Stmt S;
    S.Kind = StmtKind::Block;
    S.Span = LB.Span;
    Scopes.emplace_back();
    while (!cur().is(Tok::RBrace)) {
      if (cur().is(Tok::Eof))
        fail("'}'");
      S.Stmts.push_back(parseStmt());
    }
    Scopes.pop_back();
    S.Span = S.Span.merge(cur().Span);
    advance(); // '}'
    return addStmt(S);
  }

  int parseStmt() {
    Token T = cur();
    switch (T.Kind) {
    case Tok::LBrace:
      return parseBlock();
    case Tok::Semi: {
      advance();
      Stmt S;
      S.Kind = StmtKind::Empty;
      S.Span = T.Span;
      return addStmt(S);
    }
    case Tok::KwIf: {
      advance();
      Stmt S;
      S.Kind = StmtKind::If;
      S.Span = T.Span;
      expect(Tok::LParen, "'('");
      S.Cond = parseExpr();
      expect(Tok::RParen, "')'");
      S.Then = parseStmt();
      if (accept(Tok::KwElse))
        S.Else = parseStmt();
      return addStmt(S);
    }
    case Tok::KwWhile: {
      advance();
      Stmt S;
      S.Kind = StmtKind::While;
      S.Span = T.Span;
      expect(Tok::LParen, "'('");
      S.Cond = parseExpr();
      expect(Tok::RParen, "')'");
      S.Body = parseStmt();
      return addStmt(S);
    }
    case Tok::KwFor: {
      advance();
      Stmt S;
      S.Kind = StmtKind::For;
      S.Span = T.Span;
      expect(Tok::LParen, "'('");
      Scopes.emplace_back();
      if (!cur().is(Tok::Semi))
        S.Init = startsType(cur()) ? parseDeclStmt() : parseExprStmt(false);
      expect(Tok::Semi, "';'");
      if (!cur().is(Tok::Semi))
        S.Cond = parseExpr();
      expect(Tok::Semi, "';'");
      if (!cur().is(Tok::RParen))
        S.Inc = parseExpr();
      expect(Tok::RParen, "')'");
      S.Body = parseStmt();
      Scopes.pop_back();
      return addStmt(S);
    }
    case Tok::KwReturn: {
      advance();
      Stmt S;
      S.Kind = StmtKind::Return;
      S.Span = T.Span;
      if (!cur().is(Tok::Semi))
        S.Expr = parseExpr();
      S.Span = S.Span.merge(cur().Span);
      expect(Tok::Semi, "';'");
      return addStmt(S);
    }
    case Tok::KwBreak:
    case Tok::KwContinue: {
      advance();
      Stmt S;
      S.Kind = T.is(Tok::KwBreak) ? StmtKind::Break : StmtKind::Continue;
      S.Span = T.Span;
      expect(Tok::Semi, "';'");
      return addStmt(S);
    }
    default:
      break;
    }
    if (startsType(T)) {
      int Id = parseDeclStmt();
      expect(Tok::Semi, "';'");
      return Id;
    }
    int Id = parseExprStmt(false);
    expect(Tok::Semi, "';'");
    return Id;
  }

  int parseDeclStmt() {
    uint32_t DeclStart = cur().Span.Begin;
    TypeExpr T = parseTypeCore();
    while (accept(Tok::Star))
      T.Levels.insert(T.Levels.begin(), CheckedKind::None);
    Token Name = expect(Tok::Ident, "a name");
    Decl D;
    D.Kind = DeclKind::Local;
    D.Name = Name.Text;
    D.Type = T;
    D.Span = Name.Span;
    D.OwnerFn = CurFn;
    D.Readonly = TU.SM.file(File).Readonly;
    parseArraySuffix(D.Type);
    if (accept(Tok::Colon))
      parseDeclAnnots(D);
    D.DeclaratorSpan = spanBetween(DeclStart, prevEnd());
    D.Defined = true;
    if (accept(Tok::Assign))
      D.InitExpr = parseExpr();
    int Id = addDecl(D);
    Scopes.back().emplace_back(Name.Text, Id);
    Stmt S;
    S.Kind = StmtKind::Decl;
    S.Span = spanBetween(DeclStart, prevEnd());
    S.DeclId = Id;
    return addStmt(S);
  }

  int parseExprStmt(bool AllowEmpty) {
    (void)AllowEmpty;
    Stmt S;
    S.Kind = StmtKind::Expr;
    S.Span = cur().Span;
    S.Expr = parseExpr();
    S.Span = S.Span.merge(TU.expr(S.Expr).Span);
    return addStmt(S);
  }

  //===------------------------------------------------------------------===//
  // Expressions
  //===------------------------------------------------------------------===//

  int lookupLocal(const std::string &Name) const {
    for (auto It = Scopes.rbegin(); It != Scopes.rend(); ++It)
      for (auto FIt = It->rbegin(); FIt != It->rend(); ++FIt)
        if (FIt->first == Name)
          return FIt->second;
    return -1;
  }

  int parseExpr() { return parseAssign(); }

  int parseAssign() {
    int Lhs = parseBinary(0);
    BinOp Op = BinOp::None;
    bool IsAssign = false;
    switch (cur().Kind) {
    case Tok::Assign: IsAssign = true; break;
    case Tok::PlusAssign: IsAssign = true; Op = BinOp::Add; break;
    case Tok::MinusAssign: IsAssign = true; Op = BinOp::Sub; break;
    case Tok::StarAssign: IsAssign = true; Op = BinOp::Mul; break;
    case Tok::SlashAssign: IsAssign = true; Op = BinOp::Div; break;
    default: break;
    }
    if (!IsAssign)
      return Lhs;
    Token T = advance();
    int Rhs = parseAssign();
    Expr E;
    E.Kind = ExprKind::Assign;
    E.Op = Op;
    E.Sub = Lhs;
    E.Sub2 = Rhs;
    E.Span = TU.expr(Lhs).Span.merge(TU.expr(Rhs).Span);
    (void)T;
    return addExpr(E);
  }

  struct OpInfo {
    Tok Kind;
    BinOp Op;
    int Prec;
  };

  static const std::vector<OpInfo> &binaryOps() {
    static const std::vector<OpInfo> Ops = {
        {Tok::PipePipe, BinOp::LOr, 1},  {Tok::AmpAmp, BinOp::LAnd, 2},
        {Tok::Pipe, BinOp::BitOr, 3},    {Tok::Caret, BinOp::BitXor, 4},
        {Tok::Amp, BinOp::BitAnd, 5},    {Tok::EqEq, BinOp::Eq, 6},
        {Tok::BangEq, BinOp::Ne, 6},     {Tok::Lt, BinOp::Lt, 7},
        {Tok::LtEq, BinOp::Le, 7},       {Tok::Gt, BinOp::Gt, 7},
        {Tok::GtEq, BinOp::Ge, 7},       {Tok::Shl, BinOp::Shl, 8},
        {Tok::Shr, BinOp::Shr, 8},       {Tok::Plus, BinOp::Add, 9},
        {Tok::Minus, BinOp::Sub, 9},     {Tok::Star, BinOp::Mul, 10},
        {Tok::Slash, BinOp::Div, 10},    {Tok::Percent, BinOp::Rem, 10},
    };
    return Ops;
  }

  int parseBinary(int MinPrec) {
    int Lhs = parseUnary();
    for (;;) {
      const OpInfo *Found = nullptr;
      for (const auto &O : binaryOps())
        if (cur().is(O.Kind) && O.Prec >= MinPrec) {
          Found = &O;
          break;
        }
      if (!Found)
        return Lhs;
      advance();
      int Rhs = parseBinary(Found->Prec + 1);
      Expr E;
      E.Kind = ExprKind::Binary;
      E.Op = Found->Op;
      E.Sub = Lhs;
      E.Sub2 = Rhs;
      E.Span = TU.expr(Lhs).Span.merge(TU.expr(Rhs).Span);
      Lhs = addExpr(E);
    }
  }

  int parseUnary() {
    Token T = cur();
    switch (T.Kind) {
    case Tok::Star: {
      advance();
      Expr E;
      E.Kind = ExprKind::Deref;
      E.Sub = parseUnary();
      E.Span = T.Span.merge(TU.expr(E.Sub).Span);
      return addExpr(E);
    }
    case Tok::Amp: {
      advance();
      Expr E;
      E.Kind = ExprKind::AddrOf;
      E.Sub = parseUnary();
      E.Span = T.Span.merge(TU.expr(E.Sub).Span);
      return addExpr(E);
    }
    case Tok::Minus: case Tok::Bang: case Tok::Tilde: {
      advance();
      Expr E;
      E.Kind = T.is(Tok::Minus)  ? ExprKind::UnaryMinus
               : T.is(Tok::Bang) ? ExprKind::UnaryNot
                                 : ExprKind::UnaryBitNot;
      E.Sub = parseUnary();
      E.Span = T.Span.merge(TU.expr(E.Sub).Span);
      return addExpr(E);
    }
    case Tok::PlusPlus: case Tok::MinusMinus: {
      advance();
      Expr E;
      E.Kind = ExprKind::IncDec;
      E.IsDec = T.is(Tok::MinusMinus);
      E.IsPrefix = true;
      E.Sub = parseUnary();
      E.Span = T.Span.merge(TU.expr(E.Sub).Span);
      return addExpr(E);
    }
    case Tok::KwSizeof: {
      advance();
      expect(Tok::LParen, "'('");
      Expr E;
      E.Kind = ExprKind::SizeofType;
      E.CastType = parseTypeAndStars();
      expect(Tok::RParen, "')'");
      E.Span = spanBetween(T.Span.Begin, prevEnd());
      return addExpr(E);
    }
    case Tok::LParen:
      if (startsType(ahead(1))) {
        advance();
        Expr E;
        E.Kind = ExprKind::Cast;
        E.CastType = parseTypeAndStars();
        expect(Tok::RParen, "')'");
        E.Sub = parseUnary();
        E.Span = T.Span.merge(TU.expr(E.Sub).Span);
        return addExpr(E);
      }
      break;
    default:
      break;
    }
    return parsePostfix();
  }

  int parsePostfix() {
    int E = parsePrimary();
    for (;;) {
      if (cur().is(Tok::LBracket)) {
        advance();
        Expr N;
        N.Kind = ExprKind::Index;
        N.Sub = E;
        N.Sub2 = parseExpr();
        expect(Tok::RBracket, "']'");
        N.Span = spanBetween(TU.expr(E).Span.Begin, prevEnd());
        E = addExpr(N);
      } else if (cur().is(Tok::Dot) || cur().is(Tok::Arrow)) {
        bool Arrow = cur().is(Tok::Arrow);
        advance();
        Token F = expect(Tok::Ident, "field name");
        Expr N;
        N.Kind = ExprKind::Member;
        N.Sub = E;
        N.Name = F.Text;
        N.IsArrow = Arrow;
        N.Span = spanBetween(TU.expr(E).Span.Begin, F.Span.End);
        E = addExpr(N);
      } else if (cur().is(Tok::PlusPlus) || cur().is(Tok::MinusMinus)) {
        Token T = advance();
        Expr N;
        N.Kind = ExprKind::IncDec;
        N.IsDec = T.is(Tok::MinusMinus);
        N.Sub = E;
        N.Span = spanBetween(TU.expr(E).Span.Begin, T.Span.End);
        E = addExpr(N);
      } else {
        return E;
      }
    }
  }

  int parsePrimary() {
    Token T = cur();
    switch (T.Kind) {
    case Tok::IntLit: {
      advance();
      Expr E;
      E.Kind = ExprKind::IntLit;
      E.IntValue = T.IntValue;
      E.Span = T.Span;
      return addExpr(E);
    }
    case Tok::CharLit: {
      advance();
      Expr E;
      E.Kind = ExprKind::CharLit;
      E.IntValue = T.IntValue;
      E.Span = T.Span;
      return addExpr(E);
    }
    case Tok::StrLit: {
      advance();
      Expr E;
      E.Kind = ExprKind::StrLit;
      E.StrValue = T.StrValue;
      E.Span = T.Span;
      return addExpr(E);
    }
    case Tok::KwNull: {
      advance();
      Expr E;
      E.Kind = ExprKind::Null;
      E.Span = T.Span;
      return addExpr(E);
    }
    case Tok::KwAssumeBoundsCast: {
      advance();
      Expr E;
      E.Kind = ExprKind::AssumeBoundsCast;
      expect(Tok::Lt, "'<'");
      E.CastType = parseTypeAndStars();
      expectCloseAngle();
      expect(Tok::LParen, "'('");
      E.Sub = parseExpr();
      if (accept(Tok::Comma)) {
        if (!(cur().isIdent("count") || cur().isIdent("byte_count")))
          fail("count or byte_count");
        E.CastBounds.Kind = cur().isIdent("count") ? BoundsAnnot::Count
                                                   : BoundsAnnot::ByteCount;
        advance();
        expect(Tok::LParen, "'('");
        E.CastBounds.Expr = parseExpr();
        expect(Tok::RParen, "')'");
      }
      expect(Tok::RParen, "')'");
      E.Span = spanBetween(T.Span.Begin, prevEnd());
      return addExpr(E);
    }
    case Tok::LParen: {
      advance();
      int Inner = parseExpr();
      expect(Tok::RParen, "')'");
      return Inner;
    }
    case Tok::Ident: {
      advance();
      // Generic instantiation `f<T>(...)` or plain call `f(...)`.
      if (cur().is(Tok::Lt) && startsType(ahead(1))) {
        Expr E;
        E.Kind = ExprKind::Call;
        E.Name = T.Text;
        E.CalleeSpan = T.Span;
        advance(); // '<'
        E.CastType = parseTypeAndStars();
        E.HasTypeArg = true;
        expectCloseAngle();
        expect(Tok::LParen, "'('");
        parseArgs(E.Args);
        expect(Tok::RParen, "')'");
        E.Span = spanBetween(T.Span.Begin, prevEnd());
        return addExpr(E);
      }
      if (cur().is(Tok::LParen)) {
        Expr E;
        E.Kind = ExprKind::Call;
        E.Name = T.Text;
        E.CalleeSpan = T.Span;
        advance();
        parseArgs(E.Args);
        expect(Tok::RParen, "')'");
        E.Span = spanBetween(T.Span.Begin, prevEnd());
        return addExpr(E);
      }
      Expr E;
      E.Kind = ExprKind::VarRef;
      E.Name = T.Text;
      E.Span = T.Span;
      E.RefDecl = lookupLocal(T.Text);
      int Id = addExpr(E);
      if (TU.expr(Id).RefDecl < 0)
        Pending.emplace_back(Id, BoundsCtxFn, BoundsCtxStruct);
      return Id;
    }
    default:
      fail("an expression");
    }
  }

  void parseArgs(std::vector<int> &Args) {
    if (cur().is(Tok::RParen))
      return;
    Args.push_back(parseExpr());
    while (accept(Tok::Comma))
      Args.push_back(parseExpr());
  }
};

} // namespace mc3

#endif // MC3_PARSER_HPP
