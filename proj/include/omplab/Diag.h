//===--- Diag.h - Diagnostics for parsing and validation --------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_DIAG_H
#define OMPLAB_DIAG_H

#include <string>
#include <vector>

namespace omplab {

struct SourceLoc {
  int Line = 0;
  int Col = 0;

  bool valid() const { return Line > 0; }
};

/// One finding from a parser, the verifier, or a lowering pass. Rule is a
/// stable machine-matchable id ("type-mismatch", "dangling-value", ...);
/// Message is for humans.
struct Diagnostic {
  std::string Rule;
  std::string Message;
  std::string Function; // enclosing function, if any
  SourceLoc Loc;

  std::string str() const;
};

using DiagList = std::vector<Diagnostic>;

std::string formatDiags(const DiagList &Diags);

} // namespace omplab

#endif // OMPLAB_DIAG_H
