//=--ast_print.hpp------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Canonical mini-C printer. Output is fully parenthesized and re-parseable;
// the parse/print round trip is a frontend invariant checked by tests. The
// rewriter does not use this (it edits original file text); this exists for
// testing and debugging.
//===----------------------------------------------------------------------===//

#ifndef MC3_AST_PRINT_HPP
#define MC3_AST_PRINT_HPP

#include <sstream>
#include <string>

#include "mc3/ast.hpp"

namespace mc3 {

inline std::string checkedKindName(CheckedKind K) {
  switch (K) {
  case CheckedKind::Ptr: return "_Ptr";
  case CheckedKind::Arr: return "_Array_ptr";
  case CheckedKind::NtArr: return "_Nt_array_ptr";
  case CheckedKind::None: break;
  }
  return "";
}

// Type text without declarator name, honoring per-level checked kinds.
inline std::string renderTypeText(const TypeExpr &T, int Level = 0) {
  if (Level >= T.pointerDepth()) {
    std::string S;
    if (T.Const)
      S += "const ";
    S += baseTypeName(T);
    return S;
  }
  CheckedKind K = T.Levels[Level];
  std::string Inner = renderTypeText(T, Level + 1);
  if (K != CheckedKind::None)
    return checkedKindName(K) + "<" + Inner + ">";
  return Inner + (Inner.back() == '*' ? "*" : " *");
}

inline std::string joinTypeAndName(const std::string &TypeText,
                                   const std::string &Name) {
  if (!TypeText.empty() && TypeText.back() == '*')
    return TypeText + Name;
  return TypeText + " " + Name;
}

class AstPrinter {
public:
  explicit AstPrinter(const TranslationUnit &TU) : TU(TU) {}

  std::string printProgram() {
    std::ostringstream OS;
    for (int Id : TU.TopLevel) {
      const Decl &D = TU.decl(Id);
      if (D.IsPrelude || D.Readonly)
        continue;
      printTopLevel(OS, D);
    }
    return OS.str();
  }

  std::string exprText(int Id) const { return printExpr(Id); }

  std::string declaratorText(const Decl &D) const {
    std::string S = joinTypeAndName(renderTypeText(D.Type), D.Name);
    if (D.Type.ArrayLen) {
      if (D.Type.ArrayChecked == CheckedKind::Arr)
        S += " _Checked";
      else if (D.Type.ArrayChecked == CheckedKind::NtArr)
        S += " _Nt_checked";
      S += "[" + std::to_string(*D.Type.ArrayLen) + "]";
    }
    std::string Annots = annotText(D);
    if (!Annots.empty())
      S += " : " + Annots;
    return S;
  }

  std::string annotText(const Decl &D) const {
    std::string S;
    if (D.Itype)
      S += "itype(" + renderTypeText(*D.Itype) + ")";
    if (D.Bounds.Kind != BoundsAnnot::None) {
      if (!S.empty())
        S += " ";
      S += (D.Bounds.Kind == BoundsAnnot::Count ? "count(" : "byte_count(");
      S += printExpr(D.Bounds.Expr) + ")";
    }
    return S;
  }

private:
  const TranslationUnit &TU;

  void printTopLevel(std::ostringstream &OS, const Decl &D) {
    switch (D.Kind) {
    case DeclKind::StructDef: {
      const StructInfo &SI = TU.Structs[D.OwnerStruct];
      OS << (SI.IsUnion ? "union " : "struct ") << SI.Name << " {\n";
      for (int F : SI.Fields)
        OS << "  " << declaratorText(TU.decl(F)) << ";\n";
      OS << "};\n\n";
      break;
    }
    case DeclKind::Global:
      OS << storage(D) << declaratorText(D);
      if (D.InitExpr >= 0)
        OS << " = " << printExpr(D.InitExpr);
      OS << ";\n\n";
      break;
    case DeclKind::Function: {
      if (D.isGeneric()) {
        OS << "itype_for_any(";
        for (size_t I = 0; I < D.GenericParams.size(); ++I)
          OS << (I ? ", " : "") << D.GenericParams[I];
        OS << ") ";
      }
      OS << storage(D) << joinTypeAndName(renderTypeText(D.Type), D.Name) << "(";
      if (D.Params.empty() && !D.Variadic)
        OS << "void";
      for (size_t I = 0; I < D.Params.size(); ++I)
        OS << (I ? ", " : "") << declaratorText(TU.decl(D.Params[I]));
      if (D.Variadic)
        OS << (D.Params.empty() ? "..." : ", ...");
      OS << ")";
      std::string Annots = annotText(D);
      if (!Annots.empty())
        OS << " : " << Annots;
      if (D.CheckedBodyMarker)
        OS << " _Checked";
      if (D.Body >= 0) {
        OS << " ";
        printStmt(OS, D.Body, 0);
        OS << "\n";
      } else {
        OS << ";\n\n";
      }
      break;
    }
    default:
      break;
    }
  }

  static std::string storage(const Decl &D) {
    std::string S;
    if (D.IsExtern)
      S += "extern ";
    if (D.IsStatic)
      S += "static ";
    return S;
  }

  void printStmt(std::ostringstream &OS, int Id, int Indent) const {
    const Stmt &S = TU.stmt(Id);
    std::string Pad(Indent * 2, ' ');
    switch (S.Kind) {
    case StmtKind::Block:
      OS << "{\n";
      for (int C : S.Stmts) {
        OS << Pad << "  ";
        printStmt(OS, C, Indent + 1);
        OS << "\n";
      }
      OS << Pad << "}";
      if (Indent == 0)
        OS << "\n";
      break;
    case StmtKind::Expr:
      OS << printExpr(S.Expr) << ";";
      break;
    case StmtKind::Decl: {
      const Decl &D = TU.decl(S.DeclId);
      OS << declaratorText(D);
      if (D.InitExpr >= 0)
        OS << " = " << printExpr(D.InitExpr);
      OS << ";";
      break;
    }
    case StmtKind::If:
      OS << "if (" << printExpr(S.Cond) << ") ";
      printStmt(OS, S.Then, Indent);
      if (S.Else >= 0) {
        OS << " else ";
        printStmt(OS, S.Else, Indent);
      }
      break;
    case StmtKind::While:
      OS << "while (" << printExpr(S.Cond) << ") ";
      printStmt(OS, S.Body, Indent);
      break;
    case StmtKind::For:
      OS << "for (";
      if (S.Init >= 0)
        printStmt(OS, S.Init, 0); // prints its own ';'
      else
        OS << ";";
      OS << " ";
      if (S.Cond >= 0)
        OS << printExpr(S.Cond);
      OS << "; ";
      if (S.Inc >= 0)
        OS << printExpr(S.Inc);
      OS << ") ";
      printStmt(OS, S.Body, Indent);
      break;
    case StmtKind::Return:
      OS << "return";
      if (S.Expr >= 0)
        OS << " " << printExpr(S.Expr);
      OS << ";";
      break;
    case StmtKind::Break:
      OS << "break;";
      break;
    case StmtKind::Continue:
      OS << "continue;";
      break;
    case StmtKind::Empty:
      OS << ";";
      break;
    }
  }

  static std::string binOpText(BinOp Op) {
    switch (Op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Rem: return "%";
    case BinOp::Shl: return "<<";
    case BinOp::Shr: return ">>";
    case BinOp::BitAnd: return "&";
    case BinOp::BitOr: return "|";
    case BinOp::BitXor: return "^";
    case BinOp::LAnd: return "&&";
    case BinOp::LOr: return "||";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::None: break;
    }
    return "";
  }

  static std::string escapeString(const std::string &S) {
    std::string Out;
    for (char C : S) {
      switch (C) {
      case '\n': Out += "\\n"; break;
      case '\t': Out += "\\t"; break;
      case '\r': Out += "\\r"; break;
      case '\0': Out += "\\0"; break;
      case '\\': Out += "\\\\"; break;
      case '"': Out += "\\\""; break;
      default: Out.push_back(C);
      }
    }
    return Out;
  }

  std::string printExpr(int Id) const {
    const Expr &E = TU.expr(Id);
    switch (E.Kind) {
    case ExprKind::IntLit:
      return std::to_string(E.IntValue);
    case ExprKind::CharLit: {
      char C = static_cast<char>(E.IntValue);
      std::string Inner = escapeString(std::string(1, C));
      if (Inner == "\"")
        Inner = "\\\""; // not reachable; keep escapes simple
      if (C == '\'')
        Inner = "\\'";
      return "'" + Inner + "'";
    }
    case ExprKind::StrLit:
      return "\"" + escapeString(E.StrValue) + "\"";
    case ExprKind::Null:
      return "NULL";
    case ExprKind::VarRef:
      return E.Name;
    case ExprKind::Member:
      return printExpr(E.Sub) + (E.IsArrow ? "->" : ".") + E.Name;
    case ExprKind::Index:
      return printExpr(E.Sub) + "[" + printExpr(E.Sub2) + "]";
    case ExprKind::Call: {
      std::string S = E.Name;
      if (E.HasTypeArg)
        S += "<" + renderTypeText(E.CastType) + ">";
      S += "(";
      for (size_t I = 0; I < E.Args.size(); ++I)
        S += (I ? ", " : "") + printExpr(E.Args[I]);
      return S + ")";
    }
    case ExprKind::Cast:
      return "((" + renderTypeText(E.CastType) + ")" + printExpr(E.Sub) + ")";
    case ExprKind::AssumeBoundsCast: {
      std::string S =
          "_Assume_bounds_cast<" + renderTypeText(E.CastType) + ">(" +
          printExpr(E.Sub);
      if (E.CastBounds.Kind != BoundsAnnot::None) {
        S += std::string(", ") +
             (E.CastBounds.Kind == BoundsAnnot::Count ? "count(" : "byte_count(") +
             printExpr(E.CastBounds.Expr) + ")";
      }
      return S + ")";
    }
    case ExprKind::AddrOf:
      return "(&" + printExpr(E.Sub) + ")";
    case ExprKind::Deref:
      return "(*" + printExpr(E.Sub) + ")";
    case ExprKind::UnaryMinus:
      return "(-" + printExpr(E.Sub) + ")";
    case ExprKind::UnaryNot:
      return "(!" + printExpr(E.Sub) + ")";
    case ExprKind::UnaryBitNot:
      return "(~" + printExpr(E.Sub) + ")";
    case ExprKind::Binary:
      return "(" + printExpr(E.Sub) + " " + binOpText(E.Op) + " " +
             printExpr(E.Sub2) + ")";
    case ExprKind::Assign: {
      std::string OpText = E.Op == BinOp::None ? "=" : binOpText(E.Op) + "=";
      return "(" + printExpr(E.Sub) + " " + OpText + " " + printExpr(E.Sub2) +
             ")";
    }
    case ExprKind::IncDec: {
      std::string OpText = E.IsDec ? "--" : "++";
      if (E.IsPrefix)
        return "(" + OpText + printExpr(E.Sub) + ")";
      return "(" + printExpr(E.Sub) + OpText + ")";
    }
    case ExprKind::SizeofType:
      return "sizeof(" + renderTypeText(E.CastType) + ")";
    }
    return "";
  }
};

} // namespace mc3

#endif // MC3_AST_PRINT_HPP
