//===--- Verifier.h - Structural and type checking ---------------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_VERIFIER_H
#define OMPLAB_VERIFIER_H

#include "omplab/Diag.h"
#include "omplab/IR.h"

namespace omplab {

/// Checks type rules, address-space rules, terminator placement, lexical
/// def-before-use, callee signatures, the one-kernel rule, and call-graph
/// acyclicity. Returns every finding; an empty list means the module is
/// well formed.
DiagList validate(const Module &M);

} // namespace omplab

#endif // OMPLAB_VERIFIER_H
