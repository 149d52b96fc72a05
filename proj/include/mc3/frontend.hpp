//=--frontend.hpp-------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Frontend entry point: lex and parse all inputs (prelude first), resolve
// names, and type expressions. The result is immutable and shared read-only
// by every analysis pass.
//===----------------------------------------------------------------------===//

#ifndef MC3_FRONTEND_HPP
#define MC3_FRONTEND_HPP

#include <memory>

#include "mc3/parser.hpp"
#include "mc3/typecheck.hpp"

namespace mc3 {

inline std::unique_ptr<TranslationUnit>
parseProgram(const std::vector<InputFile> &Files) {
  auto TU = std::make_unique<TranslationUnit>();
  std::vector<std::tuple<int, int, int>> Pending;

  FileId Prelude = TU->SM.addFile("<prelude>", preludeText(), /*Readonly=*/true);
  {
    Parser P(*TU, Prelude);
    P.parseFile();
    for (Decl &D : TU->Decls)
      D.IsPrelude = true;
    auto Pend = P.takePending();
    Pending.insert(Pending.end(), Pend.begin(), Pend.end());
  }

  for (const InputFile &F : Files) {
    FileId Id = TU->SM.addFile(F.Path, F.Text, F.Readonly);
    Parser P(*TU, Id);
    P.parseFile();
    auto Pend = P.takePending();
    Pending.insert(Pending.end(), Pend.begin(), Pend.end());
  }

  Parser::resolveProgram(*TU, Pending);
  TypeChecker(*TU).run();
  return TU;
}

} // namespace mc3

#endif // MC3_FRONTEND_HPP
