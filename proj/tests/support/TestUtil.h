//===--- TestUtil.h - Shared helpers for the test suite ----------*- C++ -*-===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef OMPLAB_TESTS_TESTUTIL_H
#define OMPLAB_TESTS_TESTUTIL_H

#include "omplab/Compiler.h"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace omplab {
namespace test {

inline std::string programsDir() { return OMPLAB_PROGRAMS_DIR; }
inline std::string goldenDir() { return OMPLAB_GOLDEN_DIR; }

inline std::string readFile(const std::string &Path) {
  std::ifstream In(Path, std::ios::binary);
  if (!In)
    throw std::runtime_error("cannot read " + Path);
  std::stringstream Ss;
  Ss << In.rdbuf();
  return Ss.str();
}

inline std::string readProgram(const std::string &Stem) {
  return readFile(programsDir() + "/" + Stem + ".ompk");
}

inline CompileResult compileProgram(const std::string &Stem,
                                    CompileOptions Opts = {}) {
  return compileSource(readProgram(Stem), Stem, Opts);
}

} // namespace test
} // namespace omplab

#endif // OMPLAB_TESTS_TESTUTIL_H
