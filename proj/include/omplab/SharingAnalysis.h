//===--- SharingAnalysis.h - Data-sharing attribute resolution --*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Resolves the implicit data-sharing attribute of every declaration in a
// program and computes the sharing candidate set: variables defined outside a
// parallel region but referenced inside one. Candidates that are not mapped
// must be backed by team-visible storage when workers run.
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_SHARING_ANALYSIS_H
#define OMPLAB_SHARING_ANALYSIS_H

#include "omplab/Dsl.h"

namespace omplab {

struct SharingResult {
  SharingInfo Info;
  DiagList Diags;

  bool ok() const { return Diags.empty(); }
};

SharingResult analyzeSharing(const ProgramAst &Ast);

} // namespace omplab

#endif // OMPLAB_SHARING_ANALYSIS_H
