//=--kind.hpp-----------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Kind inference: which pointers can be checked (chk) and which stay wild.
// Wildness is localized at function boundaries: parameters and returns are
// split into external/internal nodes, the pair edge runs external→internal,
// and every call edge points away from the interface node (external param →
// argument, external return → receiver). Wild therefore spreads out of an
// interface but never across it, which is what lets a single function's
// unsafe code stay its own problem.
//===----------------------------------------------------------------------===//

#ifndef MC3_KIND_HPP
#define MC3_KIND_HPP

#include "mc3/cgraph.hpp"
#include "mc3/flow.hpp"

namespace mc3 {

enum class ParamClass { CheckedType, Itype, Unchanged };

struct CallBinding {
  int CallExpr;
  int ArgIndex;
  int ArgExpr;
  int ParamDecl;   // -1 when the binding is a call result
  int ParamExtVar; // external interface var (param or return)
  int ArgVar;      // caller-side level-0 var
  SourceSpan Span;
};

struct CastDemand {
  int CallExpr;
  int ArgIndex;
  int ArgExpr;
  int ParamDecl;
  SourceSpan Span;
};

struct KindResult {
  CGraph Graph;
  Solution Sol;
  std::vector<bool> Wild;       // per qualifier var
  std::vector<bool> ReportWild; // per canonical var: wild for reporting
  std::map<int, ParamClass> ParamClasses;  // param decl id -> class
  std::map<int, ParamClass> ReturnClasses; // function decl id -> class
  std::vector<CallBinding> Bindings;
  std::vector<CastDemand> Demands;

  KindResult() : Graph(kindLattice()) {}

  int nodeOf(int Var) const { return Var + kindLattice().size(); }
  int wildNode() const { return Graph.literalNode(1); }
  bool isWild(int Var) const { return Wild.at(Var); }
};

class KindAnalysis {
public:
  KindAnalysis(const TranslationUnit &TU, const QualVarTable &QT)
      : TU(TU), QT(QT), Chains(TU, QT) {}

  KindResult build() {
    KindResult R;
    for (const QualVar &V : QT.Vars) {
      std::string Suffix = V.Role == VarRole::ParamInt ||
                                   V.Role == VarRole::ReturnInt
                               ? " (int)"
                               : (V.Pair >= 0 ? " (ext)" : "");
      R.Graph.addNode(V.Display + Suffix);
    }
    Res = &R;
    addDeclSeeds();
    addPairEdges();
    for (int Id : TU.TopLevel) {
      const Decl &D = TU.decl(Id);
      if (D.IsPrelude)
        continue;
      if (D.Kind == DeclKind::Global && D.InitExpr >= 0)
        flowInto(QT.DeclInt.count(Id) ? QT.DeclInt.at(Id) : std::vector<int>{},
                 D.Type, D.InitExpr, D.Span);
      if (D.Kind == DeclKind::Function && D.Body >= 0) {
        CurFn = Id;
        walkStmt(D.Body);
        CurFn = -1;
      }
    }
    solve(R);
    return R;
  }

  // Re-solves after new seed edges were added (ptyp conflict demotion).
  void resolve(KindResult &R) {
    Res = &R;
    solve(R);
  }

private:
  const TranslationUnit &TU;
  const QualVarTable &QT;
  ChainResolver Chains;
  KindResult *Res = nullptr;
  int CurFn = -1;

  int node(int Var) const { return Res->nodeOf(Var); }
  int wild() const { return Res->wildNode(); }

  void seed(int Var, SourceSpan Span, EdgeReason Reason) {
    Res->Graph.addEdge(wild(), node(Var), Span, Reason);
  }

  //===--- construction ---------------------------------------------------===//

  void addDeclSeeds() {
    for (const QualVar &V : QT.Vars) {
      if (V.Role == VarRole::ParamInt || V.Role == VarRole::ReturnInt)
        continue; // interface seeds go on the external node
      if (V.Role == VarRole::Expr)
        continue;
      if (V.DeclaredChecked != CheckedKind::None || V.FromItype)
        continue; // annotated declarations are trusted
      const Decl &D = TU.decl(V.DeclId);
      const Decl *Owner =
          D.OwnerFn >= 0 ? &TU.decl(D.OwnerFn)
                         : (V.Role == VarRole::ReturnExt ? &D : nullptr);
      bool OwnerGeneric = false;
      if (V.Role == VarRole::ParamExt || V.Role == VarRole::ReturnExt) {
        const Decl &Fn = V.Role == VarRole::ReturnExt ? D : TU.decl(D.OwnerFn);
        OwnerGeneric = Fn.isGeneric();
      }
      (void)Owner;

      // Default void* type: void-based pointers without a generic interface.
      if (D.Type.Base == BaseType::Void && !OwnerGeneric)
        seed(V.Id, D.Span, EdgeReason::DefaultVoidType);

      // Source in a non-writable file, or an interface we cannot see behind.
      if (D.Readonly)
        seed(V.Id, D.Span, EdgeReason::NonWritableFile);
      if ((V.Role == VarRole::ParamExt || V.Role == VarRole::ReturnExt)) {
        const Decl &Fn = V.Role == VarRole::ReturnExt ? D : TU.decl(D.OwnerFn);
        if (!Fn.Defined && !OwnerGeneric)
          seed(V.Id, D.Span, EdgeReason::NonWritableFile);
      }

      if (V.Role == VarRole::Field &&
          TU.Structs[D.OwnerStruct].IsUnion)
        seed(V.Id, D.Span, EdgeReason::UnionField);

      if (V.Role == VarRole::Global && D.IsExtern && !D.Defined)
        seed(V.Id, D.Span, EdgeReason::ExternGlobal);
    }
  }

  void addPairEdges() {
    for (const QualVar &V : QT.Vars)
      if ((V.Role == VarRole::ParamExt || V.Role == VarRole::ReturnExt) &&
          V.Pair >= 0)
        Res->Graph.addEdge(node(V.Id), node(V.Pair), V.Span,
                           EdgeReason::ParamPair);
  }

  void walkStmt(int Id) {
    const Stmt &S = TU.stmt(Id);
    switch (S.Kind) {
    case StmtKind::Expr:
      walkExpr(S.Expr);
      break;
    case StmtKind::Decl: {
      const Decl &D = TU.decl(S.DeclId);
      if (D.InitExpr >= 0) {
        walkExpr(D.InitExpr);
        std::vector<int> Lhs;
        if (auto It = QT.DeclInt.find(S.DeclId); It != QT.DeclInt.end())
          Lhs = It->second;
        flowInto(Lhs, D.Type, D.InitExpr, S.Span);
      }
      break;
    }
    case StmtKind::If:
      walkExpr(S.Cond);
      walkStmt(S.Then);
      if (S.Else >= 0)
        walkStmt(S.Else);
      break;
    case StmtKind::While:
      walkExpr(S.Cond);
      walkStmt(S.Body);
      break;
    case StmtKind::For:
      if (S.Init >= 0)
        walkStmt(S.Init);
      if (S.Cond >= 0)
        walkExpr(S.Cond);
      if (S.Inc >= 0)
        walkExpr(S.Inc);
      walkStmt(S.Body);
      break;
    case StmtKind::Return:
      if (S.Expr >= 0) {
        walkExpr(S.Expr);
        const Decl &Fn = TU.decl(CurFn);
        std::vector<int> Ret;
        if (auto It = QT.RetInt.find(CurFn); It != QT.RetInt.end())
          Ret = It->second;
        flowInto(Ret, Fn.Type, S.Expr, S.Span);
      }
      break;
    case StmtKind::Block:
      for (int C : S.Stmts)
        walkStmt(C);
      break;
    default:
      break;
    }
  }

  void walkExpr(int Id) {
    const Expr &E = TU.expr(Id);
    switch (E.Kind) {
    case ExprKind::Assign: {
      walkExpr(E.Sub);
      walkExpr(E.Sub2);
      if (E.Op == BinOp::None) {
        VarChain Lhs = Chains.chainOf(E.Sub);
        flowInto(Lhs.Vars, TU.expr(E.Sub).ValueType, E.Sub2, E.Span);
      }
      break;
    }
    case ExprKind::Call:
      handleCall(Id);
      for (int A : E.Args)
        walkExpr(A);
      break;
    case ExprKind::Cast:
      handleCast(Id);
      walkExpr(E.Sub);
      break;
    default:
      if (E.Sub >= 0)
        walkExpr(E.Sub);
      if (E.Sub2 >= 0)
        walkExpr(E.Sub2);
      for (int A : E.Args)
        walkExpr(A);
      if (E.CastBounds.Expr >= 0)
        walkExpr(E.CastBounds.Expr);
      break;
    }
  }

  // Assignment-shaped flow: declaration init, `=`, and `return e` all
  // constrain each pointer level bidirectionally (assignments alias).
  void flowInto(const std::vector<int> &LhsChain, const TypeExpr &LhsType,
                int RhsExpr, SourceSpan Span) {
    int R = QualVarBuilder::strippedRhs(TU, RhsExpr);
    const Expr &RE = TU.expr(R);
    if (QualVarBuilder::isNullLiteral(TU, R))
      return;

    if (QualVarBuilder::isAllocatorCall(TU, R) && !QT.hasExprVar(R)) {
      checkAllocator(LhsChain, LhsType, R, Span);
      return;
    }

    VarChain Rhs = Chains.chainOf(R);
    if (Rhs.Null)
      return;
    if (Rhs.empty()) {
      if (RE.Kind == ExprKind::Cast && !LhsChain.empty()) {
        // Invalid cast folded into the assignment: the target goes wild.
        seed(LhsChain[0], RE.Span, EdgeReason::InvalidCast);
      } else if (!LhsChain.empty() && !RE.ValueType.isPointerLike()) {
        // Plain integer flowing into a pointer.
        seed(LhsChain[0], Span, EdgeReason::InvalidCast);
      }
      return;
    }
    if (LhsChain.empty()) {
      if (!LhsType.isPointerLike())
        seed(Rhs.Vars[0], Span, EdgeReason::InvalidCast);
      return;
    }
    if (!ChainResolver::compatibleFlow(LhsType, RE.ValueType)) {
      seed(LhsChain[0], Span, EdgeReason::InvalidCast);
      seed(Rhs.Vars[0], Span, EdgeReason::InvalidCast);
      return;
    }
    size_t Levels = std::min(LhsChain.size(), Rhs.Vars.size());
    for (size_t K = 0; K < Levels; ++K)
      Res->Graph.addBidirectional(node(LhsChain[K]), node(Rhs.Vars[K]), Span,
                                  EdgeReason::Assignment);
  }

  void checkAllocator(const std::vector<int> &LhsChain, const TypeExpr &LhsType,
                      int CallId, SourceSpan Span) {
    if (LhsChain.empty())
      return;
    TypeExpr SizeofTy;
    if (!allocatorSizeofType(CallId, SizeofTy))
      return; // byte-count form; nothing to verify
    if (LhsType.Base == BaseType::Void || LhsType.Base == BaseType::Generic)
      return;
    TypeExpr Elem = LhsType.strippedOuter();
    if (!Elem.sameShape(SizeofTy))
      seed(LhsChain[0], Span, EdgeReason::UnsafeAllocatorCall);
  }

  // Finds `sizeof(T)` in the size argument of malloc/calloc.
  bool allocatorSizeofType(int CallId, TypeExpr &Out) const {
    const Expr &E = TU.expr(CallId);
    const std::string &Callee = TU.decl(E.RefDecl).Name;
    int SizeArg = Callee == "calloc" && E.Args.size() > 1 ? E.Args[1]
                                                          : E.Args.empty() ? -1
                                                                           : E.Args[0];
    if (SizeArg < 0)
      return false;
    return findSizeof(SizeArg, Out);
  }

  bool findSizeof(int ExprId, TypeExpr &Out) const {
    const Expr &E = TU.expr(ExprId);
    if (E.Kind == ExprKind::SizeofType) {
      Out = E.CastType;
      return true;
    }
    if (E.Kind == ExprKind::Binary && E.Op == BinOp::Mul)
      return findSizeof(E.Sub, Out) || findSizeof(E.Sub2, Out);
    return false;
  }

  void handleCast(int Id) {
    const Expr &E = TU.expr(Id);
    if (QualVarBuilder::isNullLiteral(TU, Id))
      return;
    const Expr &Sub = TU.expr(E.Sub);
    bool SubPtr = Sub.ValueType.isPointerLike();
    bool TargetPtr = E.CastType.isPointerLike();
    if (!SubPtr && !TargetPtr)
      return;
    if (QualVarBuilder::castIsTransparent(TU, E))
      return;
    // Incompatible: taint the pointer operand and the cast's own node if any.
    VarChain SubChain = Chains.chainOf(E.Sub);
    if (SubPtr && !SubChain.empty())
      seed(SubChain.Vars[0], E.Span, EdgeReason::InvalidCast);
    if (auto It = QT.ExprChain.find(Id); It != QT.ExprChain.end())
      seed(It->second[0], E.Span, EdgeReason::InvalidCast);
  }

  void handleCall(int Id) {
    const Expr &E = TU.expr(Id);
    const Decl &Callee = TU.decl(E.RefDecl);

    if (!Callee.IsPrelude) {
      size_t N = std::min(E.Args.size(), Callee.Params.size());
      for (size_t I = 0; I < N; ++I) {
        const Decl &PD = TU.decl(Callee.Params[I]);
        if (!PD.Type.isPointerLike())
          continue;
        VarChain Arg = Chains.chainOf(E.Args[I]);
        if (Arg.Null || Arg.empty())
          continue;
        const TypeExpr &ArgTy = TU.expr(E.Args[I]).ValueType;
        if (!ChainResolver::compatibleFlow(PD.Type, ArgTy)) {
          seed(Arg.Vars[0], TU.expr(E.Args[I]).Span, EdgeReason::InvalidCast);
          continue;
        }
        auto ExtIt = QT.DeclExt.find(Callee.Params[I]);
        if (ExtIt == QT.DeclExt.end())
          continue;
        const std::vector<int> &Ext = ExtIt->second;
        size_t Levels = std::min(Ext.size(), Arg.Vars.size());
        SourceSpan Span = TU.expr(E.Args[I]).Span;
        for (size_t K = 0; K < Levels; ++K)
          Res->Graph.addEdge(node(Ext[K]), node(Arg.Vars[K]), Span,
                             EdgeReason::CallArgument);
        Res->Bindings.push_back({Id, static_cast<int>(I), E.Args[I],
                                 Callee.Params[I], Ext[0], Arg.Vars[0], Span});
      }
      if (Callee.Variadic)
        for (int A : E.Args) {
          VarChain Arg = Chains.chainOf(A);
          if (!Arg.empty())
            seed(Arg.Vars[0], TU.expr(A).Span, EdgeReason::VariadicCall);
        }
    }

    // Result temporary receives the external return face.
    if (auto It = QT.ExprChain.find(Id); It != QT.ExprChain.end()) {
      auto RetIt = QT.RetExt.find(E.RefDecl);
      if (RetIt != QT.RetExt.end()) {
        size_t Levels = std::min(RetIt->second.size(), It->second.size());
        for (size_t K = 0; K < Levels; ++K)
          Res->Graph.addEdge(node(RetIt->second[K]), node(It->second[K]),
                             E.Span, EdgeReason::CallResult);
      }
    }
  }

  //===--- solving --------------------------------------------------------===//

  void solve(KindResult &R) {
    SolveResult S = R.Graph.solveLeast({});
    mc3Assert(S.ok(), "kind constraints are always satisfiable");
    mc3Assert(R.Graph.validate(*S.Sol), "kind solution failed validation");
    R.Sol = *S.Sol;

    R.Wild.assign(QT.size(), false);
    for (int V = 0; V < QT.size(); ++V)
      R.Wild[V] = R.Sol.Values[R.nodeOf(V)] == 1;

    R.ReportWild.assign(QT.size(), false);
    for (int V = 0; V < QT.size(); ++V) {
      const QualVar &Q = QT.var(V);
      if (Q.Canonical != V)
        continue;
      bool W = R.Wild[V];
      if (Q.Pair >= 0)
        W = R.Wild[Q.Pair]; // pairs report the internal face
      R.ReportWild[V] = W;
    }

    R.ParamClasses.clear();
    R.ReturnClasses.clear();
    for (const QualVar &Q : QT.Vars) {
      if (Q.Level != 0 || Q.Pair < 0)
        continue;
      if (Q.Role != VarRole::ParamExt && Q.Role != VarRole::ReturnExt)
        continue;
      bool ExtWild = R.Wild[Q.Id];
      bool IntWild = R.Wild[Q.Pair];
      mc3Assert(!(ExtWild && !IntWild),
                "(wild external, chk internal) must be unreachable");
      ParamClass C = !IntWild   ? ParamClass::CheckedType
                     : !ExtWild ? ParamClass::Itype
                                : ParamClass::Unchanged;
      if (Q.Role == VarRole::ParamExt)
        R.ParamClasses[Q.DeclId] = C;
      else
        R.ReturnClasses[Q.DeclId] = C;
    }

    R.Demands.clear();
    for (const CallBinding &B : R.Bindings) {
      if (B.ParamDecl < 0)
        continue;
      bool ArgIsCast =
          TU.expr(B.ArgExpr).Kind == ExprKind::AssumeBoundsCast;
      if (!R.Wild[B.ParamExtVar] && R.Wild[B.ArgVar] && !ArgIsCast)
        R.Demands.push_back({B.CallExpr, B.ArgIndex, B.ArgExpr, B.ParamDecl,
                             B.Span});
    }
  }
};

} // namespace mc3

#endif // MC3_KIND_HPP
