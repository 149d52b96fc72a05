//=--diag.hpp-----------------------------------------------------*- C++-*-===//
//
// Part of the 3c-mini project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
// Error types shared by all phases. Parse and configuration problems map to
// exit code 1; violated internal invariants map to exit code 2.
//===----------------------------------------------------------------------===//

#ifndef MC3_DIAG_HPP
#define MC3_DIAG_HPP

#include <stdexcept>
#include <string>

#include "mc3/source.hpp"

namespace mc3 {

class ParseError : public std::runtime_error {
public:
  ParseError(SourceSpan Where, const std::string &Msg)
      : std::runtime_error(Msg), Where(Where) {}
  SourceSpan Where;
};

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string &Msg) : std::runtime_error(Msg) {}
};

class InternalError : public std::logic_error {
public:
  explicit InternalError(const std::string &Msg) : std::logic_error(Msg) {}
};

// Invariant check that survives NDEBUG builds; analyses use this for
// conditions the spec promises (e.g. a parameter can never solve to
// (wild external, chk internal)).
inline void mc3Assert(bool Cond, const std::string &Msg) {
  if (!Cond)
    throw InternalError(Msg);
}

} // namespace mc3

#endif // MC3_DIAG_HPP
