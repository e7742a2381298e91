//===--- AstLowering.h - AST to pre-codegen IR ------------------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_AST_LOWERING_H
#define OMPLAB_AST_LOWERING_H

#include "omplab/Dsl.h"
#include "omplab/IR.h"

namespace omplab {

/// Lowers a program to the pre-codegen IR form: one kernel function whose
/// parallel regions sit inline between omp.parallel.begin / omp.parallel.end
/// markers. Variables become allocas (flagged `candidate` when workers must
/// see them), mapped buffers become module globals, and parallel-for loops are
/// already strip-mined over the worker pool.
Module lowerToIr(const ProgramAst &Ast, const SharingInfo &Info,
                 const std::string &KernelStem);

} // namespace omplab

#endif // OMPLAB_AST_LOWERING_H
