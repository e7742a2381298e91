//===--- FrontendTests.cpp - Parser and sharing-analysis tests --------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/Dsl.h"
#include "omplab/SharingAnalysis.h"
#include "support/TestUtil.h"

#include <doctest.h>
#include <json.hpp>

using namespace omplab;
using namespace omplab::test;

namespace {

bool hasRule(const DiagList &Diags, const std::string &Rule) {
  for (const auto &D : Diags)
    if (D.Rule == Rule)
      return true;
  return false;
}

DiagList diagsFor(const std::string &Src) {
  DslParseResult R = parseDsl(Src);
  return R.Diags;
}

SharingInfo sharingFor(const std::string &Src) {
  DslParseResult R = parseDsl(Src);
  REQUIRE(R.ok());
  SharingResult S = analyzeSharing(*R.Ast);
  REQUIRE(S.ok());
  return S.Info;
}

SharingAttribute attrOf(const SharingInfo &Info, const std::string &Name) {
  for (const auto &[Id, N] : Info.DeclName)
    if (N == Name)
      return Info.Attr.at(Id);
  FAIL("no declaration named " << Name);
  return SharingAttribute::Private;
}

} // namespace

TEST_CASE("every corpus program parses cleanly") {
  for (const char *Stem :
       {"shared_scalar", "private_inner", "mixed_captures", "seq_only",
        "firstprivate", "two_regions", "coloring_demo", "scalars_64",
        "arrays_4"}) {
    CAPTURE(Stem);
    DslParseResult R = parseDsl(readProgram(Stem));
    CHECK(R.ok());
  }
}

TEST_CASE("scalar defined before a region and read inside it is shared") {
  SharingInfo Info = sharingFor(readProgram("shared_scalar"));
  CHECK(attrOf(Info, "c") == SharingAttribute::Shared);
  CHECK(attrOf(Info, "a") == SharingAttribute::Mapped);
  // One capture: c. The mapped array is a candidate but lives in global
  // memory, so it needs no depot slot.
  CHECK(Info.Candidates.size() == 2);
}

TEST_CASE("scalar declared inside the region stays private") {
  SharingInfo Info = sharingFor(readProgram("private_inner"));
  CHECK(attrOf(Info, "c") == SharingAttribute::Private);
  CHECK(Info.Candidates.size() == 1); // just the mapped array
}

TEST_CASE("host scalars referenced in a region are firstprivate captures") {
  SharingInfo Info = sharingFor(readProgram("mixed_captures"));
  for (const char *N : {"c1", "c2", "c3", "c4", "c5", "c6", "c7"})
    CHECK(attrOf(Info, N) == SharingAttribute::FirstPrivate);
  CHECK(attrOf(Info, "a") == SharingAttribute::Mapped);
  CHECK(Info.Candidates.size() == 8);
}

TEST_CASE("loop counters of sequential loops never leak into regions") {
  SharingInfo Info = sharingFor(readProgram("arrays_1"));
  CHECK(attrOf(Info, "i") == SharingAttribute::Private);
  CHECK(attrOf(Info, "d1") == SharingAttribute::Shared);
}

TEST_CASE("candidates keep declaration order") {
  SharingInfo Info = sharingFor(readProgram("mixed_captures"));
  std::vector<std::string> Names;
  for (int Id : Info.Candidates)
    Names.push_back(Info.DeclName.at(Id));
  CHECK(Names == std::vector<std::string>{"c1", "c2", "c3", "c4", "c5", "c6",
                                          "c7", "a"});
}

TEST_CASE("parser: nested parallel regions are rejected") {
  CHECK(hasRule(diagsFor("int a[4] = {0};\n"
                         "#pragma omp target map(tofrom: a[:4])\n"
                         "{\n"
                         "  #pragma omp parallel\n"
                         "  {\n"
                         "    #pragma omp parallel\n"
                         "    {\n"
                         "      a[0] += 1;\n"
                         "    }\n"
                         "  }\n"
                         "}\n"),
                "nested-parallel-unsupported"));
}

TEST_CASE("parser: teams must be the only statement in the target") {
  CHECK(hasRule(diagsFor("int a[4] = {0};\n"
                         "#pragma omp target map(tofrom: a[:4])\n"
                         "{\n"
                         "  a[0] = 1;\n"
                         "  #pragma omp teams num_teams(2) thread_limit(8)\n"
                         "  {\n"
                         "    a[1] = 2;\n"
                         "  }\n"
                         "}\n"),
                "teams-not-closely-nested"));
}

TEST_CASE("parser: map sections are bounds checked") {
  CHECK(hasRule(diagsFor("int a[4] = {0};\n"
                         "#pragma omp target map(tofrom: a[:9])\n"
                         "{\n"
                         "  a[0] = 1;\n"
                         "}\n"),
                "bad-map"));
  CHECK(hasRule(diagsFor("int s = 0;\n"
                         "int a[4] = {0};\n"
                         "#pragma omp target map(tofrom: s[:1])\n"
                         "{\n"
                         "  a[0] = 1;\n"
                         "}\n"),
                "bad-map"));
  CHECK(hasRule(diagsFor("int a[4] = {0};\n"
                         "#pragma omp target map(tofrom: a, a[:2])\n"
                         "{\n"
                         "  a[0] = 1;\n"
                         "}\n"),
                "bad-map"));
}

TEST_CASE("parser: undeclared and redeclared names") {
  CHECK(hasRule(diagsFor("int a[4] = {0};\n"
                         "#pragma omp target map(tofrom: a[:4])\n"
                         "{\n"
                         "  b = 1;\n"
                         "}\n"),
                "undeclared"));
  CHECK(hasRule(diagsFor("int a[4] = {0};\n"
                         "int a = 1;\n"
                         "#pragma omp target map(tofrom: a[:4])\n"
                         "{\n"
                         "  a[0] = 1;\n"
                         "}\n"),
                "redeclaration"));
}

TEST_CASE("parser: a program needs a target construct") {
  CHECK(hasRule(diagsFor("int a[4] = {0};\n"), "missing-target"));
}

TEST_CASE("analysis: arrays used on the device must be mapped") {
  DslParseResult R = parseDsl("int a[4] = {0};\n"
                              "int b[4] = {0};\n"
                              "#pragma omp target map(tofrom: a[:4])\n"
                              "{\n"
                              "  a[0] = b[0];\n"
                              "}\n");
  REQUIRE(R.ok());
  CHECK(hasRule(analyzeSharing(*R.Ast).Diags, "unmapped-array"));
}

TEST_CASE("ast dump is well-formed json") {
  CompileOptions Opts;
  Opts.DumpAst = true;
  CompileResult R = compileProgram("two_regions", Opts);
  REQUIRE(R.Ok);
  REQUIRE_FALSE(R.AstJson.empty());
  nlohmann::json J = nlohmann::json::parse(R.AstJson);
  CHECK(J.contains("host"));
  CHECK(J.contains("target"));
  CHECK(J.contains("sharing"));
  CHECK(J["target"]["num_teams"] == 1);
  CHECK(J["target"]["thread_limit"] == 8);
}
