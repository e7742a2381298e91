//===--- Codegen.h - Master/worker kernel construction ----------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Rewrites the pre-codegen kernel into the fork-join execution scheme. Each
// parallel region is outlined into its own function plus a uniform wrapper;
// the kernel becomes a thread-id switch that sends one warp lane into the
// sequential master path, parks the rest of that warp, and drops every other
// thread into the worker scheduling loop.
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_CODEGEN_H
#define OMPLAB_CODEGEN_H

#include "omplab/IR.h"

namespace omplab {

/// One warp is reserved alongside the workers; its first lane is the master
/// and the remaining lanes idle for the whole kernel.
inline constexpr int ReservedWarpSize = 32;

/// Thread id of the master lane given the launched team size.
inline int masterThreadId(int LaunchedTeamSize) {
  return LaunchedTeamSize - ReservedWarpSize;
}

/// Runs outlining, wrapper emission, and the master/worker rewrite over a
/// pre-codegen module. The result still uses allocas; frame lowering is a
/// separate stage.
Module runCodegen(const Module &Pre);

} // namespace omplab

#endif // OMPLAB_CODEGEN_H
