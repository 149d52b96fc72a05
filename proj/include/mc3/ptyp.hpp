//=--ptyp.hpp-----------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Checked-type inference over the lattice ntarr ⊑ arr ⊑ ptr for pointers the
// kind analysis left checked. Solving is the three-step algorithm: greatest
// over everything pins parameters, least pins bounded returns, greatest
// finishes locals and fields. Variables whose literal constraints contradict
// each other are demoted to wild in the kind result (reason "Inferred
// conflicting types") and the kind solution is recomputed.
//
// The builder also records the level-0 value flows (with call/field context)
// that the bounds analysis turns into its pointer flow graph, and the set of
// pointers modified by arithmetic, which cannot carry count bounds.
//===----------------------------------------------------------------------===//

#ifndef MC3_PTYP_HPP
#define MC3_PTYP_HPP

#include <set>

#include "mc3/kind.hpp"

namespace mc3 {

enum class SolverMode { ThreeStep, Least, Greatest };

inline CheckedKind ptypToChecked(int Elem) {
  switch (Elem) {
  case 0: return CheckedKind::NtArr;
  case 1: return CheckedKind::Arr;
  case 2: return CheckedKind::Ptr;
  default: return CheckedKind::None;
  }
}

inline int checkedToPtyp(CheckedKind K) {
  switch (K) {
  case CheckedKind::NtArr: return 0;
  case CheckedKind::Arr: return 1;
  case CheckedKind::Ptr: return 2;
  case CheckedKind::None: return -1;
  }
  return -1;
}

struct PtypResult {
  CGraph Graph;
  Solution Sol;
  std::vector<bool> Active;  // var participates (external face is chk)
  std::vector<int> Ptyp;     // lattice element per var, -1 if inactive
  std::map<int, bool> BoundedReturn; // function decl id -> bounded
  std::vector<FlowEdge> Flows;
  std::set<int> ArithTainted; // canonical level-0 vars modified by arithmetic
  std::set<int> Demoted;      // vars demoted to wild during this analysis

  PtypResult() : Graph(ptypLattice()) {}

  int nodeOf(int Var) const { return Var + ptypLattice().size(); }
  CheckedKind checkedKind(int Var) const {
    return Var >= 0 && Active.at(Var) ? ptypToChecked(Ptyp.at(Var))
                                      : CheckedKind::None;
  }
};

class PtypAnalysis {
public:
  PtypAnalysis(const TranslationUnit &TU, const QualVarTable &QT,
               KindAnalysis &KindA, KindResult &Kinds,
               SolverMode Mode = SolverMode::ThreeStep)
      : TU(TU), QT(QT), KindA(KindA), Kinds(Kinds), Mode(Mode),
        Chains(TU, QT) {}

  PtypResult run() {
    PtypResult R;
    // Conflicting literal constraints demote pointers to wild; each round
    // rebuilds over the smaller chk set until none are left.
    for (;;) {
      R = PtypResult();
      buildGraph(R);
      std::vector<int> Conflicted = findConflicts(R);
      if (Conflicted.empty())
        break;
      for (int V : Conflicted) {
        int Canon = QT.var(V).Canonical;
        Kinds.Graph.addEdge(Kinds.wildNode(), Kinds.nodeOf(Canon),
                            QT.var(Canon).Span, EdgeReason::ConflictingTypes);
        R.Demoted.insert(Canon);
      }
      std::set<int> Demoted = R.Demoted;
      KindA.resolve(Kinds);
      AllDemoted.insert(Demoted.begin(), Demoted.end());
    }
    R.Demoted = AllDemoted;
    solve(R);
    return R;
  }

private:
  const TranslationUnit &TU;
  const QualVarTable &QT;
  KindAnalysis &KindA;
  KindResult &Kinds;
  SolverMode Mode;
  ChainResolver Chains;
  PtypResult *Res = nullptr;
  int CurFn = -1;
  std::set<int> AllDemoted;

  static constexpr int NtArrE = 0, ArrE = 1, PtrE = 2;

  int node(int Var) const { return Res->nodeOf(Var); }
  int lit(int Elem) const { return Res->Graph.literalNode(Elem); }

  bool active(int Var) const { return Res->Active.at(Var); }

  // x ⊑ y when both participate.
  void edge(int X, int Y, SourceSpan Span, EdgeReason Reason) {
    if (X >= 0 && Y >= 0 && active(X) && active(Y))
      Res->Graph.addEdge(node(X), node(Y), Span, Reason);
  }
  void edgeLitUpper(int X, int Elem, SourceSpan Span, EdgeReason Reason) {
    if (X >= 0 && active(X))
      Res->Graph.addEdge(node(X), lit(Elem), Span, Reason);
  }
  void edgeLitLower(int Elem, int X, SourceSpan Span, EdgeReason Reason) {
    if (X >= 0 && active(X))
      Res->Graph.addEdge(lit(Elem), node(X), Span, Reason);
  }

  //===--- graph construction ---------------------------------------------===//

  void buildGraph(PtypResult &R) {
    Res = &R;
    R.Active.assign(QT.size(), false);
    for (int V = 0; V < QT.size(); ++V) {
      const QualVar &Q = QT.var(V);
      bool ExtChk = !Kinds.isWild(Q.Canonical);
      R.Active[V] = ExtChk;
      std::string Suffix =
          Q.Role == VarRole::ParamInt || Q.Role == VarRole::ReturnInt
              ? " (int)"
              : (Q.Pair >= 0 ? " (ext)" : "");
      R.Graph.addNode(Q.Display + Suffix);
    }

    // Unify pairs; pin declared checked kinds; ground fixed arrays below ptr.
    for (int V = 0; V < QT.size(); ++V) {
      const QualVar &Q = QT.var(V);
      if (!R.Active[V])
        continue;
      if (Q.Pair >= 0 && V < Q.Pair && R.Active[Q.Pair])
        R.Graph.addBidirectional(node(V), node(Q.Pair), Q.Span,
                                 EdgeReason::ParamPair);
      if (Q.IsFixedArrayLevel)
        edgeLitUpper(V, ArrE, Q.Span, EdgeReason::DeclaredType);
    }

    for (int Id : TU.TopLevel) {
      const Decl &D = TU.decl(Id);
      if (D.IsPrelude)
        continue;
      if (D.Kind == DeclKind::Global && D.InitExpr >= 0) {
        CurFn = -1;
        std::vector<int> Lhs;
        if (auto It = QT.DeclInt.find(Id); It != QT.DeclInt.end())
          Lhs = It->second;
        flowInto(Lhs, FlowEndpoint{}, D.Type, D.InitExpr, D.Span);
      }
      if (D.Kind == DeclKind::Function && D.Body >= 0) {
        CurFn = Id;
        walkStmt(D.Body);
        CurFn = -1;
      }
    }
  }

  std::map<int, int> declPins() const {
    std::map<int, int> Pins;
    for (int V = 0; V < QT.size(); ++V) {
      const QualVar &Q = QT.var(V);
      if (!Res->Active[V] || Q.DeclaredChecked == CheckedKind::None)
        continue;
      Pins[node(V)] = checkedToPtyp(Q.DeclaredChecked);
    }
    return Pins;
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
        FlowEndpoint LhsEp;
        LhsEp.Var = Lhs.empty() ? -1 : canon(Lhs[0]);
        LhsEp.OwnerFn = CurFn;
        flowInto(Lhs, LhsEp, D.Type, D.InitExpr, S.Span);
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
        std::vector<int> Ret;
        if (auto It = QT.RetInt.find(CurFn); It != QT.RetInt.end())
          Ret = It->second;
        FlowEndpoint RetEp;
        RetEp.Var = Ret.empty() ? -1 : canon(Ret[0]);
        RetEp.OwnerFn = CurFn;
        flowInto(Ret, RetEp, TU.decl(CurFn).Type, S.Expr, S.Span);
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

  int canon(int Var) const { return QT.var(Var).Canonical; }

  void walkExpr(int Id) {
    const Expr &E = TU.expr(Id);
    switch (E.Kind) {
    case ExprKind::Index: {
      walkExpr(E.Sub);
      walkExpr(E.Sub2);
      VarChain Base = Chains.chainOf(E.Sub);
      if (!Base.empty())
        edgeLitUpper(Base.Vars[0], ArrE, E.Span, EdgeReason::IndexUse);
      break;
    }
    case ExprKind::Binary: {
      walkExpr(E.Sub);
      walkExpr(E.Sub2);
      // Pointer arithmetic value use: the base cannot be a plain ptr.
      if ((E.Op == BinOp::Add || E.Op == BinOp::Sub) &&
          E.ValueType.isPointerLike()) {
        VarChain Side = Chains.chainOf(
            TU.expr(E.Sub).ValueType.isPointerLike() ? E.Sub : E.Sub2);
        if (!Side.empty())
          edgeLitUpper(Side.Vars[0], ArrE, E.Span, EdgeReason::ArithUse);
      }
      break;
    }
    case ExprKind::IncDec: {
      walkExpr(E.Sub);
      if (E.ValueType.isPointerLike()) {
        VarChain C = Chains.chainOf(E.Sub);
        if (!C.empty()) {
          edgeLitUpper(C.Vars[0], ArrE, E.Span, EdgeReason::ArithUse);
          Res->ArithTainted.insert(canon(C.Vars[0]));
        }
      }
      break;
    }
    case ExprKind::AddrOf: {
      walkExpr(E.Sub);
      if (auto It = QT.ExprChain.find(Id); It != QT.ExprChain.end())
        edgeLitLower(PtrE, It->second[0], E.Span, EdgeReason::AddressOf);
      break;
    }
    case ExprKind::Assign: {
      walkExpr(E.Sub);
      walkExpr(E.Sub2);
      VarChain Lhs = Chains.chainOf(E.Sub);
      if (E.Op != BinOp::None) {
        // Compound assignment on a pointer is arithmetic modification.
        if (TU.expr(E.Sub).ValueType.isPointerLike() && !Lhs.empty()) {
          edgeLitUpper(Lhs.Vars[0], ArrE, E.Span, EdgeReason::ArithUse);
          Res->ArithTainted.insert(canon(Lhs.Vars[0]));
        }
        break;
      }
      flowInto(Lhs.Vars, Lhs.endpoint(CurFn), TU.expr(E.Sub).ValueType, E.Sub2,
               E.Span);
      break;
    }
    case ExprKind::Call:
      handleCall(Id);
      for (int A : E.Args)
        walkExpr(A);
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

  // Directed flow rhs ⊑ lhs at level 0 (an arr may flow where ptr is
  // expected); inner levels are invariant. String literals force the
  // receiver at most ntarr.
  void flowInto(const std::vector<int> &LhsChain, FlowEndpoint LhsEp,
                const TypeExpr &LhsType, int RhsExpr, SourceSpan Span) {
    int RId = QualVarBuilder::strippedRhs(TU, RhsExpr);
    const Expr &RE = TU.expr(RId);
    if (QualVarBuilder::isNullLiteral(TU, RId))
      return;

    if (QualVarBuilder::isAllocatorCall(TU, RId) && !QT.hasExprVar(RId)) {
      if (!LhsChain.empty() && TU.decl(RE.RefDecl).Name == "malloc")
        edgeLitLower(ArrE, LhsChain[0], Span, EdgeReason::AllocatorResult);
      return;
    }

    VarChain Rhs = Chains.chainOf(RId);
    if (Rhs.Null || Rhs.empty() || LhsChain.empty())
      return;
    if (!ChainResolver::compatibleFlow(LhsType, RE.ValueType))
      return; // already wild-seeded by kind inference

    if (Rhs.ArithDerived) {
      // Value is offset into an array; typing still flows, bounds must not.
      edge(Rhs.Vars[0], LhsChain[0], Span, EdgeReason::Assignment);
      Res->ArithTainted.insert(canon(LhsChain[0]));
      return;
    }

    edge(Rhs.Vars[0], LhsChain[0], Span, EdgeReason::Assignment);
    size_t Levels = std::min(LhsChain.size(), Rhs.Vars.size());
    for (size_t K = 1; K < Levels; ++K)
      if (active(LhsChain[K]) && active(Rhs.Vars[K]))
        Res->Graph.addBidirectional(node(LhsChain[K]), node(Rhs.Vars[K]), Span,
                                    EdgeReason::Assignment);

    if (RE.Kind == ExprKind::StrLit) {
      edgeLitUpper(LhsChain[0], NtArrE, Span, EdgeReason::StringLiteral);
      edgeLitLower(NtArrE, Rhs.Vars[0], Span, EdgeReason::StringLiteral);
    }

    recordFlow(Rhs.endpoint(CurFn), LhsEp, Span);
  }

  void recordFlow(FlowEndpoint A, FlowEndpoint B, SourceSpan Span) {
    if (A.Var < 0 || B.Var < 0)
      return;
    A.Var = canon(A.Var);
    B.Var = canon(B.Var);
    if (!Res->Active[A.Var] || !Res->Active[B.Var])
      return;
    if (QT.var(A.Var).Level != 0 || QT.var(B.Var).Level != 0)
      return;
    Res->Flows.push_back({A, B, Span});
  }

  void handleCall(int Id) {
    const Expr &E = TU.expr(Id);
    const Decl &Callee = TU.decl(E.RefDecl);

    size_t N = std::min(E.Args.size(), Callee.Params.size());
    for (size_t I = 0; I < N; ++I) {
      const Decl &PD = TU.decl(Callee.Params[I]);
      if (!PD.Type.isPointerLike() && !(PD.Itype && PD.Itype->isPointerLike()))
        continue;
      VarChain Arg = Chains.chainOf(E.Args[I]);
      if (Arg.Null || Arg.empty())
        continue;
      SourceSpan Span = TU.expr(E.Args[I]).Span;

      if (Callee.IsPrelude) {
        // Interop types on library prototypes: a null-terminated face upper
        // bounds the argument (e.g. strlen). Array faces stay unbounded so
        // single-element pointers may still be freed or zeroed.
        if (PD.Itype && !PD.Itype->Levels.empty() &&
            PD.Itype->Levels.front() == CheckedKind::NtArr)
          edgeLitUpper(Arg.Vars[0], NtArrE, Span, EdgeReason::ItypeBound);
        if (TU.expr(E.Args[I]).Kind == ExprKind::StrLit) {
          edgeLitLower(NtArrE, Arg.Vars[0], Span, EdgeReason::StringLiteral);
        }
        continue;
      }

      auto ExtIt = QT.DeclExt.find(Callee.Params[I]);
      if (ExtIt == QT.DeclExt.end())
        continue;
      const std::vector<int> &Ext = ExtIt->second;
      if (Arg.ArithDerived) {
        edge(Arg.Vars[0], Ext[0], Span, EdgeReason::CallArgument);
        continue;
      }
      edge(Arg.Vars[0], Ext[0], Span, EdgeReason::CallArgument);
      size_t Levels = std::min(Ext.size(), Arg.Vars.size());
      for (size_t K = 1; K < Levels; ++K)
        if (active(Ext[K]) && active(Arg.Vars[K]))
          Res->Graph.addBidirectional(node(Ext[K]), node(Arg.Vars[K]), Span,
                                      EdgeReason::CallArgument);
      if (TU.expr(E.Args[I]).Kind == ExprKind::StrLit) {
        edgeLitUpper(Ext[0], NtArrE, Span, EdgeReason::StringLiteral);
        edgeLitLower(NtArrE, Arg.Vars[0], Span, EdgeReason::StringLiteral);
      }

      FlowEndpoint ArgEp = Arg.endpoint(CurFn);
      FlowEndpoint ParamEp;
      ParamEp.K = FlowEndpoint::CallParam;
      ParamEp.Var = Ext[0];
      ParamEp.CallExpr = Id;
      ParamEp.ParamDecl = Callee.Params[I];
      ParamEp.OwnerFn = CurFn;
      recordFlow(ArgEp, ParamEp, Span);
    }

    // Result temporary: external return face flows into it.
    if (auto It = QT.ExprChain.find(Id); It != QT.ExprChain.end()) {
      auto RetIt = QT.RetExt.find(E.RefDecl);
      if (RetIt != QT.RetExt.end()) {
        edge(RetIt->second[0], It->second[0], E.Span, EdgeReason::CallResult);
        size_t Levels = std::min(RetIt->second.size(), It->second.size());
        for (size_t K = 1; K < Levels; ++K)
          if (active(RetIt->second[K]) && active(It->second[K]))
            Res->Graph.addBidirectional(node(RetIt->second[K]),
                                        node(It->second[K]), E.Span,
                                        EdgeReason::CallResult);
        FlowEndpoint RetEp;
        RetEp.K = FlowEndpoint::CallRet;
        RetEp.Var = RetIt->second[0];
        RetEp.CallExpr = Id;
        RetEp.OwnerFn = CurFn;
        recordFlow(RetEp, Chains.chainOf(Id).endpoint(CurFn), E.Span);
      }
    }
  }

  //===--- conflict detection ----------------------------------------------===//

  // Lower/upper bounds induced by literals and declaration pins; a variable
  // whose bounds cross is unsatisfiable and falls back to wild.
  std::vector<int> findConflicts(PtypResult &R) {
    Res = &R;
    const Lattice &L = ptypLattice();
    int N = R.Graph.nodeCount();
    std::map<int, int> Pins = declPins();

    std::vector<int> LB(N, L.bottom()), UB(N, L.top());
    std::vector<bool> Pinned(N, false);
    for (int E = 0; E < L.size(); ++E) {
      LB[E] = UB[E] = E;
      Pinned[E] = true;
    }
    for (auto &[Node, V] : Pins)
      Pinned[Node] = true;

    auto OutLB = [&](int Node) {
      auto It = Pins.find(Node);
      if (It != Pins.end())
        return It->second;
      return R.Graph.isLiteral(Node) ? R.Graph.literalValue(Node) : LB[Node];
    };
    auto OutUB = [&](int Node) {
      auto It = Pins.find(Node);
      if (It != Pins.end())
        return It->second;
      return R.Graph.isLiteral(Node) ? R.Graph.literalValue(Node) : UB[Node];
    };

    bool Changed = true;
    while (Changed) {
      Changed = false;
      for (const CEdge &E : R.Graph.edges()) {
        int NewLB = L.join(LB[E.To], OutLB(E.From));
        if (NewLB != LB[E.To]) {
          LB[E.To] = NewLB;
          Changed = true;
        }
        int NewUB = L.meet(UB[E.From], OutUB(E.To));
        if (NewUB != UB[E.From]) {
          UB[E.From] = NewUB;
          Changed = true;
        }
      }
    }

    std::vector<int> Conflicted;
    for (int V = 0; V < QT.size(); ++V) {
      if (!R.Active[V])
        continue;
      int Node = R.nodeOf(V);
      int Lo = LB[Node], Hi = UB[Node];
      auto It = Pins.find(Node);
      bool Bad = It != Pins.end()
                     ? !(L.leq(Lo, It->second) && L.leq(It->second, Hi))
                     : !L.leq(Lo, Hi);
      if (Bad)
        Conflicted.push_back(V);
    }
    return Conflicted;
  }

  //===--- solving ---------------------------------------------------------===//

  void solve(PtypResult &R) {
    Res = &R;
    std::map<int, int> Pins = declPins();
    Solution Final;

    if (Mode == SolverMode::Least) {
      SolveResult S = R.Graph.solveLeast(Pins);
      mc3Assert(S.ok(), "ptyp least solve failed after conflict demotion");
      Final = *S.Sol;
    } else if (Mode == SolverMode::Greatest) {
      SolveResult S = R.Graph.solveGreatest(Pins);
      mc3Assert(S.ok(), "ptyp greatest solve failed after conflict demotion");
      Final = *S.Sol;
    } else {
      // Step 1: greatest over everything; fix parameters.
      SolveResult G1 = R.Graph.solveGreatest(Pins);
      mc3Assert(G1.ok(), "ptyp step-1 solve failed");
      std::map<int, int> Step2Pins = Pins;
      for (int V = 0; V < QT.size(); ++V) {
        const QualVar &Q = QT.var(V);
        if (!R.Active[V])
          continue;
        if (Q.Role == VarRole::ParamExt || Q.Role == VarRole::ParamInt)
          Step2Pins[node(V)] = G1.Sol->Values[node(V)];
      }

      // Step 2: least; fix returns that are bounded by a literal, a pinned
      // parameter, or a declaration pin (reachability in either direction).
      SolveResult L2 = R.Graph.solveLeast(Step2Pins);
      mc3Assert(L2.ok(), "ptyp step-2 solve failed");
      std::set<int> BoundSources;
      for (int E = 0; E < ptypLattice().size(); ++E)
        BoundSources.insert(E);
      for (auto &[N, V] : Step2Pins)
        BoundSources.insert(N);
      std::set<int> Fwd = R.Graph.reachableFrom(BoundSources);
      std::set<int> Bwd = reverseReachable(R.Graph, BoundSources);

      std::map<int, int> Step3Pins = Step2Pins;
      for (int V = 0; V < QT.size(); ++V) {
        const QualVar &Q = QT.var(V);
        if (!R.Active[V])
          continue;
        if (Q.Role != VarRole::ReturnExt && Q.Role != VarRole::ReturnInt)
          continue;
        bool Bounded = Fwd.count(node(V)) || Bwd.count(node(V));
        if (Q.Role == VarRole::ReturnExt && Q.Level == 0)
          R.BoundedReturn[Q.DeclId] = Bounded;
        if (Bounded)
          Step3Pins[node(V)] = L2.Sol->Values[node(V)];
      }

      // Step 3: greatest for whatever is left (locals, fields, unbounded
      // returns).
      SolveResult G3 = R.Graph.solveGreatest(Step3Pins);
      mc3Assert(G3.ok(), "ptyp step-3 solve failed");
      Final = *G3.Sol;

      for (int V = 0; V < QT.size(); ++V) {
        const QualVar &Q = QT.var(V);
        if (R.Active[V] &&
            (Q.Role == VarRole::ParamExt || Q.Role == VarRole::ParamInt))
          mc3Assert(Final.Values[node(V)] == G1.Sol->Values[node(V)],
                    "parameter ptyp must equal its step-1 greatest value");
      }
    }

    mc3Assert(R.Graph.validate(Final), "ptyp solution failed validation");
    R.Sol = Final;
    R.Ptyp.assign(QT.size(), -1);
    for (int V = 0; V < QT.size(); ++V)
      if (R.Active[V])
        R.Ptyp[V] = Final.Values[node(V)];
  }

  static std::set<int> reverseReachable(const CGraph &G,
                                        const std::set<int> &Sources) {
    std::set<int> Seen(Sources);
    std::vector<int> Work(Sources.begin(), Sources.end());
    while (!Work.empty()) {
      int N = Work.back();
      Work.pop_back();
      for (int EI : G.predEdges(N)) {
        int F = G.edges()[EI].From;
        if (Seen.insert(F).second)
          Work.push_back(F);
      }
    }
    return Seen;
  }
};

} // namespace mc3

#endif // MC3_PTYP_HPP
