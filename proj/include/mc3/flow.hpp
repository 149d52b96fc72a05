//=--flow.hpp-----------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Shared machinery for the constraint builders: resolving an expression to
// its qualifier-variable chain (one var per pointer level of the value), and
// the flow-endpoint records the bounds analysis later turns into
// context-sensitive pointer-flow-graph nodes.
//===----------------------------------------------------------------------===//

#ifndef MC3_FLOW_HPP
#define MC3_FLOW_HPP

#include "mc3/qualvar.hpp"

namespace mc3 {

// What kind of access produced a flow endpoint; call and field endpoints get
// context-sensitive nodes in the pointer flow graph.
struct FlowEndpoint {
  enum Kind { Plain, CallParam, CallRet, FieldAccess } K = Plain;
  int Var = -1;        // level-0 qualifier var (canonical)
  int CallExpr = -1;   // CallParam / CallRet
  int ParamDecl = -1;  // CallParam
  int FieldDecl = -1;  // FieldAccess
  int MemberExpr = -1; // FieldAccess: the access expression
  int OwnerFn = -1;    // function containing the access
};

// An undirected value-flow fact between two pointer values, used to build the
// pfg. Mirrors the level-0 ptyp flow edges minus arithmetic-derived flows.
struct FlowEdge {
  FlowEndpoint A, B;
  SourceSpan Span;
};

struct VarChain {
  std::vector<int> Vars; // level 0.. of the value
  bool Null = false;
  bool ArithDerived = false; // value comes from pointer arithmetic
  FlowEndpoint::Kind TopKind = FlowEndpoint::Plain;
  int MemberExpr = -1; // when TopKind == FieldAccess
  int FieldDecl = -1;

  bool empty() const { return Vars.empty(); }
  int level0() const { return Vars.at(0); }

  FlowEndpoint endpoint(int OwnerFn) const {
    FlowEndpoint E;
    E.Var = empty() ? -1 : Vars[0];
    E.K = TopKind;
    E.MemberExpr = MemberExpr;
    E.FieldDecl = FieldDecl;
    E.OwnerFn = OwnerFn;
    return E;
  }
};

class ChainResolver {
public:
  ChainResolver(const TranslationUnit &TU, const QualVarTable &QT)
      : TU(TU), QT(QT) {}

  // Chain of the value the expression denotes, as seen from inside the
  // enclosing function body (parameters resolve to their internal vars).
  VarChain chainOf(int ExprId) const {
    const Expr &E = TU.expr(ExprId);
    VarChain C;
    switch (E.Kind) {
    case ExprKind::Null:
      C.Null = true;
      return C;
    case ExprKind::IntLit:
      if (E.IntValue == 0)
        C.Null = true;
      return C;
    case ExprKind::VarRef: {
      auto It = QT.DeclInt.find(E.RefDecl);
      if (It != QT.DeclInt.end())
        C.Vars = It->second;
      return C;
    }
    case ExprKind::Member: {
      auto It = QT.DeclInt.find(E.RefDecl);
      if (It != QT.DeclInt.end()) {
        C.Vars = It->second;
        C.TopKind = FlowEndpoint::FieldAccess;
        C.MemberExpr = ExprId;
        C.FieldDecl = E.RefDecl;
      }
      return C;
    }
    case ExprKind::Index:
    case ExprKind::Deref: {
      VarChain Inner = chainOf(E.Sub);
      if (!Inner.empty())
        C.Vars.assign(Inner.Vars.begin() + 1, Inner.Vars.end());
      return C;
    }
    case ExprKind::AddrOf: {
      auto It = QT.ExprChain.find(ExprId);
      mc3Assert(It != QT.ExprChain.end(), "missing addr-of var");
      C.Vars = It->second;
      VarChain Inner = chainOf(E.Sub);
      C.Vars.insert(C.Vars.end(), Inner.Vars.begin(), Inner.Vars.end());
      return C;
    }
    case ExprKind::StrLit: {
      C.Vars = QT.ExprChain.at(ExprId);
      return C;
    }
    case ExprKind::AssumeBoundsCast: {
      C.Vars = QT.ExprChain.at(ExprId);
      return C;
    }
    case ExprKind::Cast: {
      if (QualVarBuilder::isNullLiteral(TU, ExprId)) {
        C.Null = true;
        return C;
      }
      auto It = QT.ExprChain.find(ExprId);
      if (It != QT.ExprChain.end()) {
        C.Vars = It->second; // non-transparent cast with its own node
        return C;
      }
      if (QualVarBuilder::castIsTransparent(TU, E))
        return chainOf(E.Sub);
      return C; // invalid cast in assignment context: empty
    }
    case ExprKind::Call: {
      auto It = QT.ExprChain.find(ExprId);
      if (It != QT.ExprChain.end()) {
        C.Vars = It->second; // result temporary
        return C;
      }
      return C;
    }
    case ExprKind::Binary:
      if ((E.Op == BinOp::Add || E.Op == BinOp::Sub) &&
          E.ValueType.isPointerLike()) {
        VarChain Side = chainOf(TU.expr(E.Sub).ValueType.isPointerLike()
                                    ? E.Sub
                                    : E.Sub2);
        Side.ArithDerived = true;
        return Side;
      }
      return C;
    case ExprKind::IncDec: {
      VarChain Side = chainOf(E.Sub);
      Side.ArithDerived = true;
      return Side;
    }
    case ExprKind::Assign:
      return chainOf(E.Sub);
    default:
      return C;
    }
  }

  // Pointer-type compatibility for assignments and argument binding. Shape
  // mismatches become InvalidCast wild seeds; void* and generics bind freely.
  static bool compatibleFlow(const TypeExpr &To, const TypeExpr &From) {
    if (To.Base == BaseType::Generic || From.Base == BaseType::Generic)
      return true;
    if (To.qualLevels() != From.qualLevels())
      return false;
    if (To.Base == BaseType::Void || From.Base == BaseType::Void)
      return true;
    if (To.Base != From.Base)
      // int/unsigned/size_t/char pointers interconvert in spirit only when
      // the base is identical; everything else is an invalid cast.
      return false;
    return To.Base != BaseType::StructRef || To.Name == From.Name;
  }

private:
  const TranslationUnit &TU;
  const QualVarTable &QT;
};

} // namespace mc3

#endif // MC3_FLOW_HPP
