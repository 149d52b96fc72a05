//=--source.hpp---------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Source file storage, byte spans, and line lookup. Spans are half-open byte
// ranges into a single file; the rewriter relies on them being stable for the
// lifetime of a run.
//===----------------------------------------------------------------------===//

#ifndef MC3_SOURCE_HPP
#define MC3_SOURCE_HPP

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

namespace mc3 {

using FileId = int;

struct SourceSpan {
  FileId File = -1;
  uint32_t Begin = 0; // byte offset, inclusive
  uint32_t End = 0;   // byte offset, exclusive
  uint32_t Line = 0;  // 1-based line of Begin

  bool isValid() const { return File >= 0 && Begin <= End; }

  // Covering span of two spans in the same file.
  SourceSpan merge(const SourceSpan &O) const {
    if (!isValid())
      return O;
    if (!O.isValid())
      return *this;
    assert(File == O.File);
    SourceSpan S = *this;
    if (O.Begin < S.Begin) {
      S.Begin = O.Begin;
      S.Line = O.Line;
    }
    if (O.End > S.End)
      S.End = O.End;
    return S;
  }
};

struct SourceFile {
  std::string Name;
  std::string Text;
  bool Readonly = false;
  // Byte offset of the start of each line; LineStarts[0] == 0.
  std::vector<uint32_t> LineStarts;
};

class SourceManager {
public:
  FileId addFile(std::string Name, std::string Text, bool Readonly) {
    SourceFile F;
    F.Name = std::move(Name);
    F.Text = std::move(Text);
    F.Readonly = Readonly;
    F.LineStarts.push_back(0);
    for (uint32_t I = 0; I < F.Text.size(); ++I)
      if (F.Text[I] == '\n')
        F.LineStarts.push_back(I + 1);
    Files.push_back(std::move(F));
    return static_cast<FileId>(Files.size()) - 1;
  }

  const SourceFile &file(FileId Id) const { return Files.at(Id); }
  size_t fileCount() const { return Files.size(); }

  std::string_view text(const SourceSpan &S) const {
    const SourceFile &F = file(S.File);
    return std::string_view(F.Text).substr(S.Begin, S.End - S.Begin);
  }

  uint32_t lineOf(FileId Id, uint32_t Offset) const {
    const auto &LS = file(Id).LineStarts;
    // Last line start <= Offset.
    size_t Lo = 0, Hi = LS.size();
    while (Lo + 1 < Hi) {
      size_t Mid = (Lo + Hi) / 2;
      if (LS[Mid] <= Offset)
        Lo = Mid;
      else
        Hi = Mid;
    }
    return static_cast<uint32_t>(Lo) + 1;
  }

  uint32_t columnOf(FileId Id, uint32_t Offset) const {
    const auto &LS = file(Id).LineStarts;
    uint32_t Line = lineOf(Id, Offset);
    return Offset - LS[Line - 1] + 1;
  }

  std::string location(const SourceSpan &S) const {
    if (!S.isValid())
      return "<unknown>";
    return file(S.File).Name + ":" + std::to_string(S.Line) + ":" +
           std::to_string(columnOf(S.File, S.Begin));
  }

private:
  std::vector<SourceFile> Files;
};

} // namespace mc3

#endif // MC3_SOURCE_HPP
