//===--- IRParser.h - Textual IR parsing -------------------------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_IRPARSER_H
#define OMPLAB_IRPARSER_H

#include "omplab/Diag.h"
#include "omplab/IR.h"

#include <optional>
#include <string>

namespace omplab {

struct IRParseResult {
  std::optional<Module> M;
  DiagList Diags;

  bool ok() const { return M.has_value() && Diags.empty(); }
};

/// Parses the .sir textual form. Accepts ';' comments and blank lines;
/// canonical text round-trips byte-identically through printModule.
IRParseResult parseModule(const std::string &Text);

} // namespace omplab

#endif // OMPLAB_IRPARSER_H
