//=--cgraph.hpp---------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Generic lattice-constraint graph shared by kind and ptyp inference. An edge
// (X, Y) is the constraint X ⊑ Y. Both lattices are chains, so join/meet are
// max/min over element indices. Solving is a worklist fixpoint: the least
// solution starts everything unpinned at bottom and propagates lower bounds
// forward; the greatest solution starts at top and propagates upper bounds
// backward. Node ids are dense and iteration is in sorted order, so results
// are reproducible bit for bit.
//===----------------------------------------------------------------------===//

#ifndef MC3_CGRAPH_HPP
#define MC3_CGRAPH_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mc3/diag.hpp"
#include "mc3/source.hpp"

namespace mc3 {

struct Lattice {
  std::string Name;
  std::vector<std::string> Elems; // ordered bottom .. top

  int bottom() const { return 0; }
  int top() const { return static_cast<int>(Elems.size()) - 1; }
  int size() const { return static_cast<int>(Elems.size()); }
  bool leq(int A, int B) const { return A <= B; }
  int join(int A, int B) const { return A > B ? A : B; }
  int meet(int A, int B) const { return A < B ? A : B; }
  const std::string &name(int E) const { return Elems.at(E); }
};

inline const Lattice &kindLattice() {
  static const Lattice L{"kind", {"chk", "wild"}};
  return L;
}

// "from least to most general": ntarr ⊑ arr ⊑ ptr
inline const Lattice &ptypLattice() {
  static const Lattice L{"ptyp", {"ntarr", "arr", "ptr"}};
  return L;
}

enum class EdgeReason {
  // Structural constraints.
  Assignment,
  ParamPair,
  CallArgument,
  CallResult,
  ReturnValue,
  AddressOf,
  IndexUse,
  ArithUse,
  AllocatorResult,
  StringLiteral,
  ItypeBound,
  DeclaredType,
  // Wild seeds; these name root causes.
  InvalidCast,
  DefaultVoidType,
  NonWritableFile,
  UnionField,
  ConflictingTypes,
  UnsafeAllocatorCall,
  VariadicCall,
  ExternGlobal,
};

inline bool isSeedReason(EdgeReason R) {
  switch (R) {
  case EdgeReason::InvalidCast:
  case EdgeReason::DefaultVoidType:
  case EdgeReason::NonWritableFile:
  case EdgeReason::UnionField:
  case EdgeReason::ConflictingTypes:
  case EdgeReason::UnsafeAllocatorCall:
  case EdgeReason::VariadicCall:
  case EdgeReason::ExternGlobal:
    return true;
  default:
    return false;
  }
}

inline const char *reasonName(EdgeReason R) {
  switch (R) {
  case EdgeReason::Assignment: return "assignment";
  case EdgeReason::ParamPair: return "param pair";
  case EdgeReason::CallArgument: return "call argument";
  case EdgeReason::CallResult: return "call result";
  case EdgeReason::ReturnValue: return "return value";
  case EdgeReason::AddressOf: return "address-of";
  case EdgeReason::IndexUse: return "index use";
  case EdgeReason::ArithUse: return "pointer arithmetic";
  case EdgeReason::AllocatorResult: return "allocator result";
  case EdgeReason::StringLiteral: return "string literal";
  case EdgeReason::ItypeBound: return "itype bound";
  case EdgeReason::DeclaredType: return "declared type";
  case EdgeReason::InvalidCast: return "Invalid Cast";
  case EdgeReason::DefaultVoidType: return "Default void* type";
  case EdgeReason::NonWritableFile: return "Source code in non-writable file";
  case EdgeReason::UnionField: return "Union field encountered";
  case EdgeReason::ConflictingTypes: return "Inferred conflicting types";
  case EdgeReason::UnsafeAllocatorCall: return "Unsafe call to allocator function";
  case EdgeReason::VariadicCall: return "Variadic call argument";
  case EdgeReason::ExternGlobal: return "External global variable";
  }
  return "?";
}

struct CEdge {
  int From;
  int To;
  SourceSpan Span;
  EdgeReason Reason;
};

struct Solution {
  std::vector<int> Values;       // node -> lattice element
  std::vector<bool> Pinned;      // frozen before solving (literals included)

  int value(int Node) const { return Values.at(Node); }
};

struct UnsatError {
  // Witness chain: a path of nodes from a forcing literal/pin to the
  // literal/pin it contradicts; first found under deterministic order.
  std::vector<int> Chain;
  std::string Message;
};

struct SolveResult {
  std::optional<Solution> Sol;
  std::optional<UnsatError> Unsat;
  bool ok() const { return Sol.has_value(); }
};

class CGraph {
public:
  explicit CGraph(const Lattice &L) : L(&L) {
    // One literal node per lattice element, ids 0 .. size-1.
    for (int E = 0; E < L.size(); ++E) {
      int Id = addNode(L.name(E));
      Literals[Id] = E;
    }
  }

  const Lattice &lattice() const { return *L; }

  int addNode(const std::string &Name) {
    Names.push_back(Name);
    Adj.emplace_back();
    RAdj.emplace_back();
    return static_cast<int>(Names.size()) - 1;
  }

  int literalNode(int Elem) const { return Elem; }
  bool isLiteral(int Node) const { return Literals.count(Node) != 0; }
  int literalValue(int Node) const { return Literals.at(Node); }

  int nodeCount() const { return static_cast<int>(Names.size()); }
  const std::string &nodeName(int N) const { return Names.at(N); }
  const std::vector<CEdge> &edges() const { return Edges; }

  bool addEdge(int From, int To, SourceSpan Span, EdgeReason Reason) {
    if (From == To)
      return false;
    if (!Seen.insert({From, To}).second)
      return false;
    int Idx = static_cast<int>(Edges.size());
    Edges.push_back({From, To, Span, Reason});
    Adj[From].push_back(Idx);
    RAdj[To].push_back(Idx);
    return true;
  }

  void addBidirectional(int A, int B, SourceSpan Span, EdgeReason Reason) {
    addEdge(A, B, Span, Reason);
    addEdge(B, A, Span, Reason);
  }

  const std::vector<int> &succEdges(int N) const { return Adj.at(N); }
  const std::vector<int> &predEdges(int N) const { return RAdj.at(N); }

  // Forward reachability over directed edges.
  std::set<int> reachableFrom(const std::set<int> &Sources) const {
    std::set<int> Seen(Sources);
    std::vector<int> Work(Sources.begin(), Sources.end());
    while (!Work.empty()) {
      int N = Work.back();
      Work.pop_back();
      for (int EI : Adj[N]) {
        int T = Edges[EI].To;
        if (Seen.insert(T).second)
          Work.push_back(T);
      }
    }
    return Seen;
  }

  SolveResult solveLeast(const std::map<int, int> &Pins) const {
    return solve(Pins, /*Least=*/true);
  }
  SolveResult solveGreatest(const std::map<int, int> &Pins) const {
    return solve(Pins, /*Least=*/false);
  }

  // Every edge satisfied, literals at their own values, pins respected.
  bool validate(const Solution &S) const {
    for (const auto &[Node, Val] : Literals)
      if (S.Values[Node] != Val)
        return false;
    for (const CEdge &E : Edges)
      if (!L->leq(S.Values[E.From], S.Values[E.To]))
        return false;
    return true;
  }

  // DOT text dump: node label = name + solution, edge label = line + reason.
  std::string dumpDot(const std::string &GraphName,
                      const Solution *S = nullptr) const {
    std::ostringstream OS;
    OS << "digraph \"" << GraphName << "\" {\n";
    for (int N = 0; N < nodeCount(); ++N) {
      OS << "  n" << N << " [label=\"" << escape(Names[N]);
      if (S)
        OS << " : " << L->name(S->Values[N]);
      OS << "\"";
      if (isLiteral(N))
        OS << ", shape=box";
      OS << "];\n";
    }
    for (const CEdge &E : Edges) {
      OS << "  n" << E.From << " -> n" << E.To << " [label=\"";
      if (E.Span.isValid())
        OS << E.Span.Line << ": ";
      OS << reasonName(E.Reason) << "\"];\n";
    }
    OS << "}\n";
    return OS.str();
  }

private:
  const Lattice *L;
  std::vector<std::string> Names;
  std::vector<CEdge> Edges;
  std::vector<std::vector<int>> Adj, RAdj;
  std::set<std::pair<int, int>> Seen;
  std::map<int, int> Literals;

  static std::string escape(const std::string &S) {
    std::string Out;
    for (char C : S) {
      if (C == '"' || C == '\\')
        Out.push_back('\\');
      Out.push_back(C);
    }
    return Out;
  }

  SolveResult solve(const std::map<int, int> &Pins, bool Least) const {
    int N = nodeCount();
    Solution S;
    S.Values.assign(N, Least ? L->bottom() : L->top());
    S.Pinned.assign(N, false);
    // Which edge raised/lowered each node last, for unsat witnesses.
    std::vector<int> CauseEdge(N, -1);

    for (const auto &[Node, Val] : Literals) {
      S.Values[Node] = Val;
      S.Pinned[Node] = true;
    }
    for (const auto &[Node, Val] : Pins) {
      if (isLiteral(Node) && literalValue(Node) != Val)
        return {std::nullopt,
                UnsatError{{Node}, "pin contradicts literal node"}};
      S.Values[Node] = Val;
      S.Pinned[Node] = true;
    }

    // Deterministic round-based fixpoint; graphs are small.
    bool Changed = true;
    while (Changed) {
      Changed = false;
      for (int EI = 0; EI < static_cast<int>(Edges.size()); ++EI) {
        const CEdge &E = Edges[EI];
        if (Least) {
          if (!L->leq(S.Values[E.From], S.Values[E.To]) &&
              !S.Pinned[E.To]) {
            S.Values[E.To] = L->join(S.Values[E.To], S.Values[E.From]);
            CauseEdge[E.To] = EI;
            Changed = true;
          }
        } else {
          if (!L->leq(S.Values[E.From], S.Values[E.To]) &&
              !S.Pinned[E.From]) {
            S.Values[E.From] = L->meet(S.Values[E.From], S.Values[E.To]);
            CauseEdge[E.From] = EI;
            Changed = true;
          }
        }
      }
    }

    for (int EI = 0; EI < static_cast<int>(Edges.size()); ++EI) {
      const CEdge &E = Edges[EI];
      if (L->leq(S.Values[E.From], S.Values[E.To]))
        continue;
      // Violated edge into a pinned/literal node: build the witness chain by
      // following cause edges back to a source.
      std::vector<int> Chain;
      int Node = Least ? E.From : E.To;
      Chain.push_back(Least ? E.To : E.From);
      std::set<int> Guard;
      while (Node >= 0 && Guard.insert(Node).second) {
        Chain.push_back(Node);
        int CE = CauseEdge[Node];
        if (CE < 0)
          break;
        Node = Least ? Edges[CE].From : Edges[CE].To;
      }
      std::reverse(Chain.begin(), Chain.end());
      std::ostringstream Msg;
      Msg << "unsatisfiable constraints: ";
      for (size_t I = 0; I < Chain.size(); ++I)
        Msg << (I ? " -> " : "") << Names[Chain[I]];
      return {std::nullopt, UnsatError{Chain, Msg.str()}};
    }
    return {S, std::nullopt};
  }
};

} // namespace mc3

#endif // MC3_CGRAPH_HPP
