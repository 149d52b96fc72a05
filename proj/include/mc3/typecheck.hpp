//=--typecheck.hpp------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Expression typing and struct-field resolution. Deliberately permissive:
// only the resolution the analyses depend on is enforced here; pointer
// compatibility is judged later by kind inference, which turns bad casts and
// assignments into wildness rather than errors.
//===----------------------------------------------------------------------===//

#ifndef MC3_TYPECHECK_HPP
#define MC3_TYPECHECK_HPP

#include "mc3/ast.hpp"
#include "mc3/diag.hpp"

namespace mc3 {

inline TypeExpr substituteGeneric(const TypeExpr &T, const std::string &Name,
                                  const TypeExpr &Arg) {
  if (T.Base != BaseType::Generic || T.Name != Name)
    return T;
  TypeExpr R = Arg;
  // The container's levels wrap around the substituted type.
  R.Levels.insert(R.Levels.begin(), T.Levels.begin(), T.Levels.end());
  R.Const = R.Const || T.Const;
  return R;
}

class TypeChecker {
public:
  explicit TypeChecker(TranslationUnit &TU) : TU(TU) {}

  void run() {
    for (int Id : TU.TopLevel) {
      const Decl &D = TU.decl(Id);
      if (D.Kind == DeclKind::Global && D.InitExpr >= 0)
        infer(D.InitExpr);
      if (D.Kind == DeclKind::Function) {
        for (int P : D.Params)
          if (TU.decl(P).Bounds.Expr >= 0)
            infer(TU.decl(P).Bounds.Expr);
        if (D.Bounds.Expr >= 0)
          infer(D.Bounds.Expr);
        if (D.Body >= 0)
          walkStmt(D.Body);
      }
      if (D.Kind == DeclKind::StructDef)
        for (int F : TU.Structs[D.OwnerStruct].Fields)
          if (TU.decl(F).Bounds.Expr >= 0)
            infer(TU.decl(F).Bounds.Expr);
    }
  }

private:
  TranslationUnit &TU;

  void walkStmt(int Id) {
    Stmt &S = TU.stmt(Id);
    switch (S.Kind) {
    case StmtKind::Expr:
      infer(S.Expr);
      break;
    case StmtKind::Decl: {
      Decl &D = TU.decl(S.DeclId);
      if (D.Bounds.Expr >= 0)
        infer(D.Bounds.Expr);
      if (D.InitExpr >= 0)
        infer(D.InitExpr);
      break;
    }
    case StmtKind::If:
      infer(S.Cond);
      walkStmt(S.Then);
      if (S.Else >= 0)
        walkStmt(S.Else);
      break;
    case StmtKind::While:
      infer(S.Cond);
      walkStmt(S.Body);
      break;
    case StmtKind::For:
      if (S.Init >= 0)
        walkStmt(S.Init);
      if (S.Cond >= 0)
        infer(S.Cond);
      if (S.Inc >= 0)
        infer(S.Inc);
      walkStmt(S.Body);
      break;
    case StmtKind::Return:
      if (S.Expr >= 0)
        infer(S.Expr);
      break;
    case StmtKind::Block:
      for (int C : S.Stmts)
        walkStmt(C);
      break;
    default:
      break;
    }
  }

  TypeExpr infer(int Id) {
    Expr &E = TU.expr(Id);
    switch (E.Kind) {
    case ExprKind::IntLit:
    case ExprKind::CharLit:
      E.ValueType = TypeExpr::makeInt();
      break;
    case ExprKind::StrLit:
      E.ValueType = TypeExpr::makePtr(BaseType::Char, 1);
      break;
    case ExprKind::Null:
      E.ValueType = TypeExpr::makePtr(BaseType::Void, 1);
      break;
    case ExprKind::VarRef:
      mc3Assert(E.RefDecl >= 0, "unresolved VarRef survived resolution");
      E.ValueType = TU.decl(E.RefDecl).Type;
      break;
    case ExprKind::Member: {
      TypeExpr Base = infer(E.Sub);
      int WantDepth = E.IsArrow ? 1 : 0;
      if (Base.Base != BaseType::StructRef || Base.qualLevels() != WantDepth)
        throw ParseError(E.Span, std::string("'") +
                                     (E.IsArrow ? "->" : ".") +
                                     "' applied to a non-struct value");
      auto It = TU.StructByName.find(Base.Name);
      if (It == TU.StructByName.end())
        throw ParseError(E.Span, "unknown struct '" + Base.Name + "'");
      int Field = TU.findField(It->second, E.Name);
      if (Field < 0)
        throw ParseError(E.Span, "struct '" + Base.Name + "' has no field '" +
                                     E.Name + "'");
      E.RefDecl = Field;
      E.ValueType = TU.decl(Field).Type;
      break;
    }
    case ExprKind::Index: {
      TypeExpr Base = infer(E.Sub);
      infer(E.Sub2);
      if (!Base.isPointerLike())
        throw ParseError(E.Span, "subscript of a non-pointer value");
      E.ValueType = Base.strippedOuter();
      break;
    }
    case ExprKind::Call: {
      mc3Assert(E.RefDecl >= 0, "unresolved call survived resolution");
      const Decl &Callee = TU.decl(E.RefDecl);
      if (E.Args.size() < Callee.Params.size() ||
          (E.Args.size() > Callee.Params.size() && !Callee.Variadic))
        throw ParseError(E.Span, "wrong number of arguments to '" +
                                     Callee.Name + "'");
      for (int A : E.Args)
        infer(A);
      TypeExpr Ret = Callee.Type;
      if (E.HasTypeArg && Callee.isGeneric())
        Ret = substituteGeneric(Ret, Callee.GenericParams.front(), E.CastType);
      E.ValueType = Ret;
      break;
    }
    case ExprKind::Cast:
    case ExprKind::AssumeBoundsCast:
      infer(E.Sub);
      if (E.CastBounds.Expr >= 0)
        infer(E.CastBounds.Expr);
      E.ValueType = E.CastType;
      break;
    case ExprKind::AddrOf: {
      TypeExpr T = infer(E.Sub);
      T.Levels.insert(T.Levels.begin(), CheckedKind::None);
      E.ValueType = T;
      break;
    }
    case ExprKind::Deref: {
      TypeExpr Base = infer(E.Sub);
      if (!Base.isPointerLike())
        throw ParseError(E.Span, "dereference of a non-pointer value");
      E.ValueType = Base.strippedOuter();
      break;
    }
    case ExprKind::UnaryMinus:
    case ExprKind::UnaryNot:
    case ExprKind::UnaryBitNot:
      infer(E.Sub);
      E.ValueType = TypeExpr::makeInt();
      break;
    case ExprKind::Binary: {
      TypeExpr L = infer(E.Sub);
      TypeExpr R = infer(E.Sub2);
      if ((E.Op == BinOp::Add || E.Op == BinOp::Sub) && L.isPointerLike())
        E.ValueType = L;
      else if (E.Op == BinOp::Add && R.isPointerLike())
        E.ValueType = R;
      else
        E.ValueType = TypeExpr::makeInt();
      break;
    }
    case ExprKind::Assign:
      E.ValueType = infer(E.Sub);
      infer(E.Sub2);
      break;
    case ExprKind::IncDec:
      E.ValueType = infer(E.Sub);
      break;
    case ExprKind::SizeofType: {
      TypeExpr T;
      T.Base = BaseType::Unsigned;
      E.ValueType = T;
      break;
    }
    }
    return E.ValueType;
  }
};

} // namespace mc3

#endif // MC3_TYPECHECK_HPP
