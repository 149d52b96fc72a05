//=--ast.hpp------------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// AST for mini-C. Nodes live in per-translation-unit arenas and refer to each
// other by index, which keeps spans, resolution results, and analysis keys
// stable and cheap to copy around. The tree is immutable once parsing and
// resolution finish.
//===----------------------------------------------------------------------===//

#ifndef MC3_AST_HPP
#define MC3_AST_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mc3/source.hpp"

namespace mc3 {

enum class BaseType { Void, Int, Char, Unsigned, SizeT, StructRef, Generic };

// Checked pointer kind of one indirection level as written in the source.
enum class CheckedKind { None, Ptr, Arr, NtArr };

struct TypeExpr {
  BaseType Base = BaseType::Int;
  std::string Name;  // struct name or generic type-variable name
  bool Const = false;
  // One entry per indirection level, outermost first. Entry is the checked
  // kind the source declares for that level, or None for a plain `*`.
  std::vector<CheckedKind> Levels;
  // Fixed-size array suffix `x[N]`; the array acts as an extra outermost
  // pointer level for analysis purposes.
  std::optional<long> ArrayLen;
  CheckedKind ArrayChecked = CheckedKind::None; // _Checked[] / _Nt_checked[]

  int pointerDepth() const { return static_cast<int>(Levels.size()); }
  // Number of qualifier levels: the array dimension counts as one.
  int qualLevels() const { return pointerDepth() + (ArrayLen ? 1 : 0); }
  bool isPointerLike() const { return qualLevels() > 0; }
  bool isVoidPointer() const { return Base == BaseType::Void && pointerDepth() > 0; }
  bool isScalar() const {
    return qualLevels() == 0 &&
           (Base == BaseType::Int || Base == BaseType::Unsigned ||
            Base == BaseType::SizeT || Base == BaseType::Char);
  }
  bool isVoid() const { return Base == BaseType::Void && qualLevels() == 0; }

  // Result of removing the outermost qualifier level (array first).
  TypeExpr strippedOuter() const {
    TypeExpr T = *this;
    if (T.ArrayLen) {
      T.ArrayLen.reset();
      T.ArrayChecked = CheckedKind::None;
    } else if (!T.Levels.empty()) {
      T.Levels.erase(T.Levels.begin());
    }
    return T;
  }

  // Pointee base and depth equality; checked annotations and const do not
  // affect compatibility.
  bool sameShape(const TypeExpr &O) const {
    return Base == O.Base && Name == O.Name && qualLevels() == O.qualLevels();
  }

  static TypeExpr makeInt() { return TypeExpr{}; }
  static TypeExpr makePtr(BaseType B, int Depth, std::string StructName = "") {
    TypeExpr T;
    T.Base = B;
    T.Name = std::move(StructName);
    T.Levels.assign(Depth, CheckedKind::None);
    return T;
  }
};

inline std::string baseTypeName(const TypeExpr &T) {
  switch (T.Base) {
  case BaseType::Void: return "void";
  case BaseType::Int: return "int";
  case BaseType::Char: return "char";
  case BaseType::Unsigned: return "unsigned";
  case BaseType::SizeT: return "size_t";
  case BaseType::StructRef: return "struct " + T.Name;
  case BaseType::Generic: return T.Name;
  }
  return "?";
}

// Plain C rendering, e.g. "const char *" or "struct s **". Checked levels are
// ignored; the rewriter has its own renderer for annotated declarations.
inline std::string renderPlainType(const TypeExpr &T) {
  std::string S;
  if (T.Const)
    S += "const ";
  S += baseTypeName(T);
  for (int I = 0; I < T.pointerDepth(); ++I)
    S += (I == 0 ? " *" : "*");
  return S;
}

enum class ExprKind {
  IntLit, CharLit, StrLit, Null,
  VarRef,
  Member,   // Sub . Name or Sub -> Name (IsArrow)
  Index,    // Sub [ Sub2 ]
  Call,     // Name(Args), resolved callee in RefDecl
  Cast,     // (CastType) Sub
  AssumeBoundsCast, // _Assume_bounds_cast<CastType>(Sub [, bounds])
  AddrOf, Deref,
  UnaryMinus, UnaryNot, UnaryBitNot,
  Binary,   // Sub Op Sub2
  Assign,   // Sub Op= Sub2 (Op == None for plain `=`)
  IncDec,   // Sub ++ / --
  SizeofType,
};

enum class BinOp {
  None,
  Add, Sub, Mul, Div, Rem, Shl, Shr, BitAnd, BitOr, BitXor,
  LAnd, LOr, Eq, Ne, Lt, Le, Gt, Ge,
};

inline bool isArithOrBitwise(BinOp Op) {
  switch (Op) {
  case BinOp::Add: case BinOp::Sub: case BinOp::Mul: case BinOp::Div:
  case BinOp::Rem: case BinOp::Shl: case BinOp::Shr: case BinOp::BitAnd:
  case BinOp::BitOr: case BinOp::BitXor:
    return true;
  default:
    return false;
  }
}

inline bool isComparison(BinOp Op) {
  switch (Op) {
  case BinOp::Eq: case BinOp::Ne: case BinOp::Lt: case BinOp::Le:
  case BinOp::Gt: case BinOp::Ge:
    return true;
  default:
    return false;
  }
}

struct BoundsAnnot {
  enum Unit { None, Count, ByteCount };
  Unit Kind = None;
  int Expr = -1; // expression id of the bound
};

struct Expr {
  ExprKind Kind;
  SourceSpan Span;
  int Sub = -1;
  int Sub2 = -1;
  std::vector<int> Args;
  std::string Name;       // VarRef / Member field / Call callee
  long IntValue = 0;
  std::string StrValue;
  BinOp Op = BinOp::None;
  bool IsArrow = false;   // Member
  bool IsDec = false;     // IncDec: `--`
  bool IsPrefix = false;  // IncDec position
  TypeExpr CastType;      // Cast / AssumeBoundsCast / SizeofType / call type arg
  bool HasTypeArg = false; // Call: `f<T>(...)`
  BoundsAnnot CastBounds;  // AssumeBoundsCast
  SourceSpan CalleeSpan;   // Call: span of the callee name token

  // Filled during resolution / type inference.
  int RefDecl = -1;
  TypeExpr ValueType;
};

enum class StmtKind {
  Expr, Decl, If, While, For, Return, Break, Continue, Block, Empty
};

struct Stmt {
  StmtKind Kind;
  SourceSpan Span;
  int Expr = -1;            // ExprStmt / Return value (-1 for bare return)
  int DeclId = -1;          // DeclStmt
  int Init = -1;            // For: init statement
  int Cond = -1;            // If / While / For condition expr
  int Inc = -1;             // For increment expr
  int Then = -1, Else = -1; // If branches
  int Body = -1;            // While / For body
  std::vector<int> Stmts;   // Block
};

enum class DeclKind { Function, Param, Local, Global, StructDef, Field };

struct Decl {
  DeclKind Kind;
  std::string Name;
  TypeExpr Type; // for functions: the return type
  SourceSpan Span;           // name token
  SourceSpan DeclaratorSpan; // type start through the last annotation token
  bool IsExtern = false;
  bool IsStatic = false;
  bool Variadic = false;
  bool Readonly = false;    // declared in a readonly (system header) file
  bool IsPrelude = false;
  bool Defined = false;     // function has a body / global is a definition
  int OwnerFn = -1;
  int Position = -1;        // param or field index
  int OwnerStruct = -1;     // field: index into TranslationUnit::Structs
  std::vector<int> Params;  // function: param decl ids
  int Body = -1;            // function: block stmt id
  int InitExpr = -1;        // global/local initializer
  BoundsAnnot Bounds;       // declared bounds (function: return bounds)
  std::optional<TypeExpr> Itype; // declared interop face (function: return itype)
  std::vector<std::string> GenericParams; // itype_for_any(T, ...)
  bool CheckedBodyMarker = false;
  SourceSpan BodyOpen;      // span of the body `{`

  bool isGeneric() const { return !GenericParams.empty(); }
};

struct StructInfo {
  std::string Name;
  bool IsUnion = false;
  std::vector<int> Fields; // field decl ids
  SourceSpan Span;
  int DeclId = -1;
};

struct TranslationUnit {
  SourceManager SM;
  std::vector<Expr> Exprs;
  std::vector<Stmt> Stmts;
  std::vector<Decl> Decls;
  std::vector<StructInfo> Structs;
  std::map<std::string, int> FuncByName;
  std::map<std::string, int> StructByName;
  std::map<std::string, int> GlobalByName;
  std::vector<int> TopLevel; // decl ids of functions/globals/structs in order
  // Return-annotation region per function decl id: covers any existing
  // `: count(...)` text after the parameter list, or is empty at the point
  // where one would be inserted.
  std::map<int, SourceSpan> RetAnnotSpans;

  const Expr &expr(int Id) const { return Exprs.at(Id); }
  Expr &expr(int Id) { return Exprs.at(Id); }
  const Stmt &stmt(int Id) const { return Stmts.at(Id); }
  Stmt &stmt(int Id) { return Stmts.at(Id); }
  const Decl &decl(int Id) const { return Decls.at(Id); }
  Decl &decl(int Id) { return Decls.at(Id); }

  int findField(int StructIdx, const std::string &Name) const {
    for (int F : Structs.at(StructIdx).Fields)
      if (decl(F).Name == Name)
        return F;
    return -1;
  }

  // True when the function declaration has no body anywhere in the inputs.
  bool isUnresolvedExtern(int FnDecl) const {
    const Decl &D = decl(FnDecl);
    return D.Kind == DeclKind::Function && !D.Defined;
  }
};

} // namespace mc3

#endif // MC3_AST_HPP
