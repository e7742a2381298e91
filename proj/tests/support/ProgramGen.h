//===--- ProgramGen.h - Race-free random program generator -------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Emits small random source programs whose parallel regions are race free by
// construction: every worker writes only the mapped element it owns, and
// sequential code alone mutates the captured scalars. Each program therefore
// has one well-defined answer that the reference interpreter can produce.
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_TESTS_PROGRAMGEN_H
#define OMPLAB_TESTS_PROGRAMGEN_H

#include <random>
#include <string>
#include <vector>

namespace omplab {

struct GeneratedProgram {
  std::string Name;
  std::string Source;
  int Teams = 1;
  int Workers = 2;
};

/// Build one random program. Layout knobs (team count, worker count, scalar
/// and array captures, region count and flavor) are drawn from \p Rng.
GeneratedProgram generateProgram(std::mt19937 &Rng, int Index);

/// Build \p Count programs from one seed.
std::vector<GeneratedProgram> generateCorpus(int Count, unsigned Seed);

/// Seed for generated corpora: OMPLAB_GEN_SEED when set, else a fixed value
/// so test runs are reproducible.
unsigned corpusSeed();

} // namespace omplab

#endif // OMPLAB_TESTS_PROGRAMGEN_H
