//===--- IRTests.cpp - Textual IR and verifier tests ------------------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/IRParser.h"
#include "omplab/IRPrinter.h"
#include "omplab/Verifier.h"
#include "support/TestUtil.h"

#include <doctest.h>

using namespace omplab;
using namespace omplab::test;

namespace {

bool hasRule(const DiagList &Diags, const std::string &Rule) {
  for (const auto &D : Diags)
    if (D.Rule == Rule)
      return true;
  return false;
}

const char *CorpusStems[] = {
    "shared_scalar", "private_inner", "mixed_captures", "seq_only",
    "firstprivate",  "two_regions",   "coloring_demo",  "scalars_1",
    "scalars_2",     "scalars_4",     "scalars_8",      "scalars_16",
    "scalars_32",    "scalars_64",    "arrays_1",       "arrays_2",
    "arrays_3",      "arrays_4"};

} // namespace

TEST_CASE("printer and parser round-trip byte-identically") {
  for (const char *Stem : CorpusStems) {
    CAPTURE(Stem);
    CompileResult R = compileProgram(Stem);
    REQUIRE(R.Ok);
    for (const Module *M : {&R.PostCodegen, &R.Machine}) {
      std::string First = printModule(*M);
      IRParseResult P = parseModule(First);
      REQUIRE(P.ok());
      CHECK(printModule(*P.M) == First);
    }
  }
}

TEST_CASE("parsed modules satisfy the verifier") {
  for (const char *Stem : CorpusStems) {
    CAPTURE(Stem);
    CompileResult R = compileProgram(Stem);
    REQUIRE(R.Ok);
    IRParseResult P = parseModule(printModule(R.Machine));
    REQUIRE(P.ok());
    CHECK(validate(*P.M).empty());
  }
}

TEST_CASE("parser rejects malformed modules") {
  CHECK_FALSE(parseModule("define void @f() {\n").ok());
  CHECK_FALSE(parseModule("definitely not ir\n").ok());
  CHECK_FALSE(parseModule("define void @f() {\nentry:\n  frobnicate\n}\n").ok());
}

TEST_CASE("verifier: blocks must end in exactly one terminator") {
  IRParseResult P = parseModule("define void @f() kernel {\n"
                                "entry:\n"
                                "  %0 = add i32 1, 2\n"
                                "}\n");
  REQUIRE(P.M.has_value());
  CHECK(hasRule(validate(*P.M), "bad-terminator"));
}

TEST_CASE("verifier: uses must follow definitions") {
  IRParseResult P = parseModule("define void @f() kernel {\n"
                                "entry:\n"
                                "  %0 = add i32 %1, 2\n"
                                "  %1 = add i32 1, 2\n"
                                "  ret void\n"
                                "}\n");
  REQUIRE(P.M.has_value());
  CHECK(hasRule(validate(*P.M), "def-after-use"));
}

TEST_CASE("verifier: branch targets must exist") {
  IRParseResult P = parseModule("define void @f() kernel {\n"
                                "entry:\n"
                                "  br label %nowhere\n"
                                "}\n");
  REQUIRE(P.M.has_value());
  CHECK(hasRule(validate(*P.M), "unknown-block"));
}

TEST_CASE("verifier: exactly one kernel per module") {
  IRParseResult Two = parseModule("define void @f() kernel {\n"
                                  "entry:\n"
                                  "  ret void\n"
                                  "}\n"
                                  "\n"
                                  "define void @g() kernel {\n"
                                  "entry:\n"
                                  "  ret void\n"
                                  "}\n");
  REQUIRE(Two.M.has_value());
  CHECK(hasRule(validate(*Two.M), "kernel-count"));

  IRParseResult None = parseModule("define void @f() {\n"
                                   "entry:\n"
                                   "  ret void\n"
                                   "}\n");
  REQUIRE(None.M.has_value());
  CHECK(hasRule(validate(*None.M), "kernel-count"));
}

TEST_CASE("verifier: callee signatures are checked") {
  IRParseResult P = parseModule("define void @f() kernel {\n"
                                "entry:\n"
                                "  call void @g(i32 1)\n"
                                "  ret void\n"
                                "}\n"
                                "\n"
                                "define void @g() {\n"
                                "entry:\n"
                                "  ret void\n"
                                "}\n");
  REQUIRE(P.M.has_value());
  CHECK(hasRule(validate(*P.M), "type-mismatch"));
}

TEST_CASE("verifier: direct recursion is rejected") {
  IRParseResult P = parseModule("define void @f() kernel {\n"
                                "entry:\n"
                                "  call void @g()\n"
                                "  ret void\n"
                                "}\n"
                                "\n"
                                "define void @g() {\n"
                                "entry:\n"
                                "  call void @g()\n"
                                "  ret void\n"
                                "}\n");
  REQUIRE(P.M.has_value());
  CHECK(hasRule(validate(*P.M), "recursive-call"));
}

TEST_CASE("verifier: unknown callees are rejected") {
  IRParseResult P = parseModule("define void @f() kernel {\n"
                                "entry:\n"
                                "  call void @missing()\n"
                                "  ret void\n"
                                "}\n");
  REQUIRE(P.M.has_value());
  CHECK(hasRule(validate(*P.M), "unknown-callee"));
}

TEST_CASE("verifier: duplicate value names are rejected") {
  IRParseResult P = parseModule("define void @f() kernel {\n"
                                "entry:\n"
                                "  %0 = add i32 1, 2\n"
                                "  %0 = add i32 3, 4\n"
                                "  ret void\n"
                                "}\n");
  REQUIRE(P.M.has_value());
  CHECK(hasRule(validate(*P.M), "duplicate-def"));
}

TEST_CASE("golden machine form stays stable") {
  // Regenerate with tools/regen_golden.sh after intentional changes.
  for (const char *Stem : {"shared_scalar", "two_regions", "seq_only"}) {
    CAPTURE(Stem);
    CompileResult R = compileProgram(Stem);
    REQUIRE(R.Ok);
    std::string Want = readFile(goldenDir() + "/" + Stem + ".sir");
    CHECK(printModule(R.Machine) == Want);
  }
}
