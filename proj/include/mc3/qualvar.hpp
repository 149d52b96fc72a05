//=--qualvar.hpp--------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Qualifier variable enumeration: one variable per pointer level per declared
// entity. Function parameters and returns get an internal/external pair so
// wildness can be localized at call boundaries; the external variable is the
// canonical one for reporting. Expression-level variables exist only where
// constraint rules need a node: address-of results, string literals, checked
// casts, call result temporaries, and casts that cannot be resolved to a
// declared variable.
//===----------------------------------------------------------------------===//

#ifndef MC3_QUALVAR_HPP
#define MC3_QUALVAR_HPP

#include <map>
#include <string>
#include <vector>

#include "mc3/ast.hpp"
#include "mc3/diag.hpp"

namespace mc3 {

enum class VarRole {
  Local, ParamInt, ParamExt, ReturnInt, ReturnExt, Field, Global, Expr
};

enum class ExprVarKind { None, AddrOf, StrLit, CastTemp, CallTemp, CheckedCast };

struct QualVar {
  int Id = -1;
  int DeclId = -1; // owner decl, or -1 for expression vars
  int ExprId = -1; // owner expression for expression vars
  int Level = 0;   // 0 = outermost qualifier level
  VarRole Role = VarRole::Local;
  ExprVarKind ExprKindTag = ExprVarKind::None;
  std::string Display;
  SourceSpan Span;
  int Pair = -1;      // the matching int/ext variable, or -1
  int Canonical = -1; // reporting id: external var of a pair, else self
  // Checked kind the source already declares for this level (itype face
  // included); a non-None value pins the ptyp solution.
  CheckedKind DeclaredChecked = CheckedKind::None;
  bool FromItype = false;
  bool IsFixedArrayLevel = false;
  bool CountsInTotals = true;
  bool OwnerReadonly = false;
  int OwnerFn = -1; // enclosing function for locals/params/exprs
};

class QualVarTable {
public:
  std::vector<QualVar> Vars;
  // Chains indexed by level; for params/returns Int and Ext run in parallel.
  std::map<int, std::vector<int>> DeclInt, DeclExt; // decl id -> chain
  std::map<int, std::vector<int>> RetInt, RetExt;   // function decl id -> chain
  std::map<int, std::vector<int>> ExprChain;        // expr id -> fresh levels

  const QualVar &var(int Id) const { return Vars.at(Id); }
  int size() const { return static_cast<int>(Vars.size()); }

  bool hasExprVar(int ExprId) const { return ExprChain.count(ExprId) != 0; }

  // Reporting variables in id order (canonical vars that count in totals).
  std::vector<int> reportingVars() const {
    std::vector<int> Out;
    for (const QualVar &V : Vars)
      if (V.Canonical == V.Id && V.CountsInTotals)
        Out.push_back(V.Id);
    return Out;
  }

  static std::string levelPrefix(int Level) {
    return std::string(static_cast<size_t>(Level), '*');
  }

private:
  friend class QualVarBuilder;
  int add(QualVar V) {
    V.Id = static_cast<int>(Vars.size());
    if (V.Canonical < 0)
      V.Canonical = V.Id;
    Vars.push_back(V);
    return V.Id;
  }
};

// Walks the translation unit in source order and assigns stable ids.
class QualVarBuilder {
public:
  QualVarBuilder(const TranslationUnit &TU, QualVarTable &Table)
      : TU(TU), Table(Table) {}

  void run() {
    for (int Id : TU.TopLevel) {
      const Decl &D = TU.decl(Id);
      if (D.IsPrelude)
        continue;
      switch (D.Kind) {
      case DeclKind::Global:
        addDeclChain(Id, VarRole::Global, D.Name);
        break;
      case DeclKind::StructDef:
        for (int F : TU.Structs[D.OwnerStruct].Fields)
          addDeclChain(F, VarRole::Field,
                       TU.Structs[D.OwnerStruct].Name + "." + TU.decl(F).Name);
        break;
      case DeclKind::Function:
        addFunctionVars(Id);
        break;
      default:
        break;
      }
    }
    // Expression-level vars, in AST order.
    for (int Id : TU.TopLevel) {
      const Decl &D = TU.decl(Id);
      if (D.IsPrelude)
        continue;
      if (D.Kind == DeclKind::Global && D.InitExpr >= 0)
        walkExpr(D.InitExpr, /*Consumed=*/true, /*AssignCtx=*/true, -1);
      if (D.Kind == DeclKind::Function && D.Body >= 0) {
        CurFn = Id;
        walkStmt(D.Body);
        CurFn = -1;
      }
    }
  }

  // Strips parens-free transparent casts: a cast is transparent when its
  // target shape matches the operand (or the operand is an allocator call,
  // a null, or generic-typed), so it aliases the operand's variable.
  static bool castIsTransparent(const TranslationUnit &TU, const Expr &E) {
    const Expr &Sub = TU.expr(E.Sub);
    const TypeExpr &To = E.CastType;
    const TypeExpr &From = Sub.ValueType;
    if (Sub.Kind == ExprKind::Null || isNullLiteral(TU, E.Sub))
      return true;
    if (From.Base == BaseType::Generic || To.Base == BaseType::Generic)
      return true;
    return To.sameShape(From);
  }

  static bool isNullLiteral(const TranslationUnit &TU, int ExprId) {
    const Expr &E = TU.expr(ExprId);
    if (E.Kind == ExprKind::Null)
      return true;
    if (E.Kind == ExprKind::IntLit && E.IntValue == 0)
      return true;
    if (E.Kind == ExprKind::Cast)
      return isNullLiteral(TU, E.Sub);
    return false;
  }

  static bool isAllocatorCall(const TranslationUnit &TU, int ExprId) {
    const Expr &E = TU.expr(ExprId);
    if (E.Kind != ExprKind::Call || E.RefDecl < 0)
      return false;
    const std::string &N = TU.decl(E.RefDecl).Name;
    return TU.decl(E.RefDecl).IsPrelude && (N == "malloc" || N == "calloc");
  }

  // The expression an assignment actually flows from, with transparent
  // casts stripped.
  static int strippedRhs(const TranslationUnit &TU, int ExprId) {
    const Expr &E = TU.expr(ExprId);
    if (E.Kind == ExprKind::Cast && TU.expr(E.Sub).ValueType.isPointerLike() &&
        castIsTransparent(TU, E))
      return strippedRhs(TU, E.Sub);
    if (E.Kind == ExprKind::Cast && isNullLiteral(TU, ExprId))
      return ExprId;
    return ExprId;
  }

private:
  const TranslationUnit &TU;
  QualVarTable &Table;
  int CurFn = -1;

  std::string fnQualified(const std::string &Name) const {
    if (CurFn >= 0)
      return TU.decl(CurFn).Name + "." + Name;
    return Name;
  }

  void addDeclChain(int DeclId, VarRole Role, const std::string &BaseName) {
    const Decl &D = TU.decl(DeclId);
    int Levels = D.Type.qualLevels();
    if (Levels == 0)
      return;
    std::vector<int> Chain;
    for (int L = 0; L < Levels; ++L) {
      QualVar V;
      V.DeclId = DeclId;
      V.Level = L;
      V.Role = Role;
      V.Display = QualVarTable::levelPrefix(L) + BaseName;
      V.Span = D.Span;
      V.DeclaredChecked = declaredKindAt(D.Type, L);
      V.IsFixedArrayLevel = D.Type.ArrayLen && L == 0;
      V.OwnerReadonly = D.Readonly;
      V.OwnerFn = D.OwnerFn;
      Chain.push_back(Table.add(V));
    }
    Table.DeclInt[DeclId] = Chain;
  }

  // Checked kind declared for level L, taking a fixed array dimension as the
  // outermost level and an itype face as the declaration for the pointer
  // levels it covers.
  CheckedKind declaredKindAt(const TypeExpr &T, int L) const {
    if (T.ArrayLen) {
      if (L == 0)
        return T.ArrayChecked;
      --L;
    }
    if (L < static_cast<int>(T.Levels.size()))
      return T.Levels[L];
    return CheckedKind::None;
  }

  void addPairedChains(int DeclId, VarRole IntRole, VarRole ExtRole,
                       const std::string &BaseName, const TypeExpr &T,
                       const SourceSpan &Span, bool Readonly, int OwnerFn,
                       std::map<int, std::vector<int>> &IntMap,
                       std::map<int, std::vector<int>> &ExtMap,
                       const std::optional<TypeExpr> &Itype) {
    int Levels = T.qualLevels();
    if (Levels == 0)
      return;
    std::vector<int> Ext, Int;
    for (int L = 0; L < Levels; ++L) {
      CheckedKind Declared = declaredKindAt(T, L);
      bool FromItype = false;
      if (Declared == CheckedKind::None && Itype) {
        // The itype face declares the checked kinds.
        TypeExpr Face = *Itype;
        if (L < static_cast<int>(Face.Levels.size())) {
          Declared = Face.Levels[L];
          FromItype = Declared != CheckedKind::None;
        }
      }
      QualVar VE;
      VE.DeclId = DeclId;
      VE.Level = L;
      VE.Role = ExtRole;
      VE.Display = QualVarTable::levelPrefix(L) + BaseName;
      VE.Span = Span;
      VE.DeclaredChecked = Declared;
      VE.FromItype = FromItype;
      VE.IsFixedArrayLevel = T.ArrayLen && L == 0;
      VE.OwnerReadonly = Readonly;
      VE.OwnerFn = OwnerFn;
      int ExtId = Table.add(VE);

      QualVar VI = VE;
      VI.Id = -1;
      VI.Role = IntRole;
      VI.Canonical = ExtId;
      VI.CountsInTotals = false;
      int IntId = Table.add(VI);
      Table.Vars[ExtId].Pair = IntId;
      Table.Vars[IntId].Pair = ExtId;
      Ext.push_back(ExtId);
      Int.push_back(IntId);
    }
    ExtMap[DeclId] = Ext;
    IntMap[DeclId] = Int;
  }

  void addFunctionVars(int FnId) {
    const Decl &Fn = TU.decl(FnId);
    if (Fn.Type.isPointerLike())
      addPairedChains(FnId, VarRole::ReturnInt, VarRole::ReturnExt,
                      Fn.Name + ".ret", Fn.Type, Fn.Span, Fn.Readonly, FnId,
                      Table.RetInt, Table.RetExt, Fn.Itype);
    for (int P : Fn.Params) {
      const Decl &PD = TU.decl(P);
      if (!PD.Type.isPointerLike())
        continue;
      addPairedChains(P, VarRole::ParamInt, VarRole::ParamExt,
                      Fn.Name + "." + PD.Name, PD.Type, PD.Span, PD.Readonly,
                      FnId, Table.DeclInt, Table.DeclExt, PD.Itype);
    }
  }

  void addExprVar(int ExprId, ExprVarKind Kind, int Levels,
                  CheckedKind Declared, bool InTotals) {
    const Expr &E = TU.expr(ExprId);
    std::vector<int> Chain;
    for (int L = 0; L < Levels; ++L) {
      QualVar V;
      V.ExprId = ExprId;
      V.Level = L;
      V.Role = VarRole::Expr;
      V.ExprKindTag = Kind;
      std::string Text(TU.SM.text(E.Span));
      if (Text.size() > 24)
        Text = Text.substr(0, 21) + "...";
      V.Display = QualVarTable::levelPrefix(L) + Text + "@" +
                  std::to_string(E.Span.Line);
      V.Span = E.Span;
      V.DeclaredChecked = L == 0 ? Declared : CheckedKind::None;
      V.CountsInTotals = InTotals && L == 0;
      V.OwnerFn = CurFn;
      Chain.push_back(Table.add(V));
    }
    Table.ExprChain[ExprId] = Chain;
  }

  void walkStmt(int Id) {
    const Stmt &S = TU.stmt(Id);
    switch (S.Kind) {
    case StmtKind::Expr:
      walkExpr(S.Expr, /*Consumed=*/false, /*AssignCtx=*/false, -1);
      break;
    case StmtKind::Decl: {
      const Decl &D = TU.decl(S.DeclId);
      addDeclChain(S.DeclId, VarRole::Local, fnQualified(D.Name));
      if (D.InitExpr >= 0)
        walkExpr(D.InitExpr, true, /*AssignCtx=*/true, -1);
      break;
    }
    case StmtKind::If:
      walkExpr(S.Cond, true, false, -1);
      walkStmt(S.Then);
      if (S.Else >= 0)
        walkStmt(S.Else);
      break;
    case StmtKind::While:
      walkExpr(S.Cond, true, false, -1);
      walkStmt(S.Body);
      break;
    case StmtKind::For:
      if (S.Init >= 0)
        walkStmt(S.Init);
      if (S.Cond >= 0)
        walkExpr(S.Cond, true, false, -1);
      if (S.Inc >= 0)
        walkExpr(S.Inc, false, false, -1);
      walkStmt(S.Body);
      break;
    case StmtKind::Return:
      if (S.Expr >= 0)
        walkExpr(S.Expr, true, /*AssignCtx=*/true, -1);
      break;
    case StmtKind::Block:
      for (int C : S.Stmts)
        walkStmt(C);
      break;
    default:
      break;
    }
  }

  void walkExpr(int Id, bool Consumed, bool AssignCtx, int Parent) {
    const Expr &E = TU.expr(Id);
    switch (E.Kind) {
    case ExprKind::StrLit:
      addExprVar(Id, ExprVarKind::StrLit, 1, CheckedKind::None, true);
      break;
    case ExprKind::AddrOf:
      addExprVar(Id, ExprVarKind::AddrOf, 1, CheckedKind::None, true);
      walkExpr(E.Sub, true, false, Id);
      break;
    case ExprKind::AssumeBoundsCast: {
      CheckedKind K = E.CastType.Levels.empty() ? CheckedKind::None
                                                : E.CastType.Levels.front();
      addExprVar(Id, ExprVarKind::CheckedCast,
                 std::max(1, E.CastType.qualLevels()), K, false);
      walkExpr(E.Sub, true, false, Id);
      if (E.CastBounds.Expr >= 0)
        walkExpr(E.CastBounds.Expr, true, false, Id);
      break;
    }
    case ExprKind::Cast: {
      bool Transparent = !TU.expr(E.Sub).ValueType.isPointerLike() &&
                                 !E.CastType.isPointerLike()
                             ? true
                             : castIsTransparent(TU, E);
      if (!Transparent && !AssignCtx && Consumed && E.CastType.isPointerLike())
        addExprVar(Id, ExprVarKind::CastTemp, E.CastType.qualLevels(),
                   CheckedKind::None, false);
      walkExpr(E.Sub, true, AssignCtx && Transparent, Id);
      break;
    }
    case ExprKind::Call: {
      bool PtrResult = E.ValueType.isPointerLike();
      bool Allocator = isAllocatorCall(TU, Id);
      if (PtrResult && Consumed && !(Allocator && AssignCtx))
        addExprVar(Id, ExprVarKind::CallTemp, E.ValueType.qualLevels(),
                   CheckedKind::None, false);
      for (int A : E.Args)
        walkExpr(A, true, false, Id);
      break;
    }
    case ExprKind::Assign: {
      walkExpr(E.Sub, true, false, Id);
      bool RhsAssignCtx = E.Op == BinOp::None &&
                          TU.expr(E.Sub).ValueType.isPointerLike();
      walkExpr(E.Sub2, true, RhsAssignCtx, Id);
      break;
    }
    case ExprKind::Member:
    case ExprKind::Index:
    case ExprKind::Deref:
    case ExprKind::IncDec:
    case ExprKind::UnaryMinus:
    case ExprKind::UnaryNot:
    case ExprKind::UnaryBitNot:
      if (E.Sub >= 0)
        walkExpr(E.Sub, true, false, Id);
      if (E.Sub2 >= 0)
        walkExpr(E.Sub2, true, false, Id);
      break;
    case ExprKind::Binary:
      walkExpr(E.Sub, true, false, Id);
      walkExpr(E.Sub2, true, false, Id);
      break;
    default:
      break;
    }
    (void)Parent;
  }
};

} // namespace mc3

#endif // MC3_QUALVAR_HPP
