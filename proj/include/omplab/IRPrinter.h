//===--- IRPrinter.h - Canonical textual IR emission ------------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_IRPRINTER_H
#define OMPLAB_IRPRINTER_H

#include "omplab/IR.h"

#include <string>

namespace omplab {

/// Prints the canonical .sir form. print(parse(print(M))) == print(M) and
/// print∘parse is the identity on canonical text.
std::string printModule(const Module &M);

std::string printFunction(const Function &F);
std::string printInstruction(const Instruction &I);

} // namespace omplab

#endif // OMPLAB_IRPRINTER_H
