//===--- LoweringPasses.cpp - Frame lowering pass pipeline ----------------===//
//
// Part of the omplab project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "omplab/LoweringPasses.h"

#include <algorithm>
#include <cassert>

using namespace omplab;

const char *omplab::passName(PassId P) {
  switch (P) {
  case PassId::DetectShared:
    return "detect-shared";
  case PassId::InsertCastRoundTrips:
    return "insert-cast-round-trips";
  case PassId::BuildDepots:
    return "build-depots";
  case PassId::ToMachine:
    return "to-machine";
  case PassId::LowerSharedFrames:
    return "lower-shared-frames";
  case PassId::ColorStack:
    return "color-stack";
  case PassId::RepackOffsets:
    return "repack-offsets";
  }
  return "?";
}

PassPlan omplab::planFor(PipelineKind K) {
  PassPlan P;
  switch (K) {
  case PipelineKind::Default:
    // Detection runs fused inside the cast-insertion pass.
    P.Passes = {PassId::InsertCastRoundTrips, PassId::BuildDepots,
                PassId::ToMachine,            PassId::LowerSharedFrames,
                PassId::ColorStack,           PassId::RepackOffsets};
    break;
  case PipelineKind::O0:
    P.Passes = {PassId::DetectShared, PassId::InsertCastRoundTrips,
                PassId::BuildDepots,  PassId::ToMachine,
                PassId::LowerSharedFrames, PassId::RepackOffsets};
    break;
  case PipelineKind::BadOrderDemo:
    P.Passes = {PassId::InsertCastRoundTrips, PassId::BuildDepots,
                PassId::ToMachine,            PassId::ColorStack,
                PassId::LowerSharedFrames,    PassId::RepackOffsets};
    P.AcknowledgeHazard = true;
    break;
  }
  return P;
}

DiagList omplab::validatePlan(const PassPlan &Plan) {
  DiagList Diags;
  auto Err = [&](const std::string &Msg) {
    Diags.push_back({"pipeline-order", Msg, "", {}});
  };
  auto Pos = [&](PassId P) -> int {
    for (size_t I = 0; I < Plan.Passes.size(); ++I)
      if (Plan.Passes[I] == P)
        return static_cast<int>(I);
    return -1;
  };
  int Casts = Pos(PassId::InsertCastRoundTrips);
  int Depots = Pos(PassId::BuildDepots);
  int Machine = Pos(PassId::ToMachine);
  int Lower = Pos(PassId::LowerSharedFrames);
  int Color = Pos(PassId::ColorStack);
  int Repack = Pos(PassId::RepackOffsets);

  if (Depots < 0 || Machine < 0 || Lower < 0 || Repack < 0)
    Err("plan must build depots, translate to machine form, lower shared "
        "frames, and repack");
  if (Casts >= 0 && Depots >= 0 && Casts > Depots)
    Err("cast round-trips must be inserted before depots are built");
  if (Depots >= 0 && Machine >= 0 && Depots > Machine)
    Err("depot layout must exist before machine translation");
  if (Machine >= 0 && Lower >= 0 && Machine > Lower)
    Err("shared frame lowering requires machine form");
  if (Machine >= 0 && Color >= 0 && Machine > Color)
    Err("slot coloring requires machine form");
  if (Repack >= 0) {
    if (Lower > Repack || Color > Repack)
      Err("offset repacking must run last");
  }
  if (Color >= 0 && Lower >= 0 && Color < Lower && !Plan.AcknowledgeHazard)
    Err("slot coloring scheduled before shared frame lowering: merged slots "
        "can be dragged into the shared depot; acknowledge the hazard to run "
        "this plan anyway");
  return Diags;
}

//===----------------------------------------------------------------------===//
// Shared-variable detection
//===----------------------------------------------------------------------===//

namespace {

/// The alias closure of each alloca: the alloca's value plus every cast and
/// element address derived from it.
std::set<std::string> escapedAllocas(const Function &F) {
  std::map<std::string, std::string> Origin; // derived value -> alloca
  for (const auto &B : F.Blocks) {
    for (const auto &I : B.Instrs) {
      if (I.Op == Opcode::Alloca || I.Op == Opcode::FrameIndex) {
        Origin[I.Result] = I.Result;
        continue;
      }
      if (I.Op == Opcode::BitCast || I.Op == Opcode::AddrSpaceCast ||
          I.Op == Opcode::GetElement) {
        if (!I.Ops.empty() && I.Ops[0].isTemp()) {
          auto It = Origin.find(I.Ops[0].Name);
          if (It != Origin.end())
            Origin[I.Result] = It->second;
        }
      }
    }
  }
  std::set<std::string> Escaped;
  for (const auto &B : F.Blocks) {
    for (const auto &I : B.Instrs) {
      if (I.Op != Opcode::Store)
        continue;
      const Value &V = I.Ops[0];
      if (!V.isTemp())
        continue;
      auto It = Origin.find(V.Name);
      if (It != Origin.end())
        Escaped.insert(It->second);
    }
  }
  return Escaped;
}

} // namespace

std::map<std::string, std::set<std::string>> omplab::detectSharedVariables(
    const Module &M) {
  std::map<std::string, std::set<std::string>> Result;
  for (const auto &F : M.Functions) {
    std::set<std::string> S = escapedAllocas(F);
    if (!S.empty())
      Result[F.Name] = std::move(S);
  }
  return Result;
}

//===----------------------------------------------------------------------===//
// Pass driver
//===----------------------------------------------------------------------===//

namespace {

int64_t roundUp8(int64_t N) { return (N + 7) & ~int64_t(7); }

class PassDriver {
public:
  PassDriver(Module M, const PassPlan &Plan) : M(std::move(M)), Plan(Plan) {}

  PipelineResult run() {
    DiagList PlanDiags = validatePlan(Plan);
    if (!PlanDiags.empty())
      return {std::move(M), std::move(PlanDiags)};
    for (PassId P : Plan.Passes) {
      switch (P) {
      case PassId::DetectShared:
        Shared = detectSharedVariables(M);
        HaveShared = true;
        break;
      case PassId::InsertCastRoundTrips:
        if (!HaveShared) {
          Shared = detectSharedVariables(M);
          HaveShared = true;
        }
        insertCastRoundTrips();
        break;
      case PassId::BuildDepots:
        buildDepots();
        break;
      case PassId::ToMachine:
        toMachine();
        break;
      case PassId::LowerSharedFrames:
        lowerSharedFrames();
        break;
      case PassId::ColorStack:
        colorStack();
        break;
      case PassId::RepackOffsets:
        repackOffsets();
        break;
      }
    }
    return {std::move(M), {}};
  }

private:
  //===--------------------------------------------------------------------===
  // insert-cast-round-trips
  //===--------------------------------------------------------------------===

  /// Every shared alloca is wrapped in an addrspacecast pair: a cast onto the
  /// shared depot and a cast back to a generic pointer that all existing uses
  /// are rewritten to. The pair records, in the IR itself, that the variable's
  /// home is team-visible memory while the code keeps generic addressing.
  void insertCastRoundTrips() {
    for (auto &F : M.Functions) {
      auto It = Shared.find(F.Name);
      if (It == Shared.end())
        continue;
      const std::set<std::string> &SharedHere = It->second;
      for (auto &B : F.Blocks) {
        for (size_t I = 0; I < B.Instrs.size(); ++I) {
          const Instruction &AI = B.Instrs[I];
          if (AI.Op != Opcode::Alloca || !SharedHere.count(AI.Result))
            continue;
          std::string Name = AI.Result;
          Type GenTy = AI.ResultTy;
          Type ShTy = GenTy.withSpace(AddrSpace::Shared);

          // Rewrite all existing uses first.
          std::string GenName = Name + ".gen";
          for (auto &B2 : F.Blocks) {
            for (auto &I2 : B2.Instrs) {
              for (auto &Op : I2.Ops) {
                if (Op.isTemp() && Op.Name == Name)
                  Op.Name = GenName;
              }
            }
          }

          Instruction ToShared;
          ToShared.Op = Opcode::AddrSpaceCast;
          ToShared.Result = Name + ".sh";
          ToShared.ResultTy = ShTy;
          ToShared.Ops = {Value::temp(Name, GenTy)};

          Instruction ToGeneric;
          ToGeneric.Op = Opcode::AddrSpaceCast;
          ToGeneric.Result = GenName;
          ToGeneric.ResultTy = GenTy;
          ToGeneric.Ops = {Value::temp(Name + ".sh", ShTy)};

          B.Instrs.insert(B.Instrs.begin() + static_cast<long>(I) + 1,
                          std::move(ToGeneric));
          B.Instrs.insert(B.Instrs.begin() + static_cast<long>(I) + 1,
                          std::move(ToShared));
          I += 2;
        }
      }
    }
  }

  //===--------------------------------------------------------------------===
  // build-depots
  //===--------------------------------------------------------------------===

  void buildDepots() {
    M.Groups.clear();
    M.Layouts.clear();
    const Function *K = M.kernel();
    assert(K && "depot construction requires a kernel");

    FrameGroup KG;
    KG.Root = K->Name;
    KG.Members.push_back(K->Name);
    if (M.findFunction(WorkerFnName))
      KG.Members.push_back(WorkerFnName);
    M.Groups.push_back(KG);
    for (const auto &F : M.Functions) {
      if (F.Name == K->Name || F.Name == WorkerFnName)
        continue;
      M.Groups.push_back({F.Name, {F.Name}});
    }

    for (const auto &G : M.Groups) {
      DepotLayout L;
      for (const auto &Member : G.Members) {
        const Function *F = M.findFunction(Member);
        assert(F);
        for (const auto &B : F->Blocks) {
          for (const auto &I : B.Instrs) {
            if (I.Op != Opcode::Alloca)
              continue;
            DepotSlot S;
            S.Size = roundUp8(I.AllocaTy.sizeBytes());
            S.Align = 8;
            S.Offset = L.TotalLocal;
            S.Owners = {I.Result};
            SlotOf[Member][I.Result] = static_cast<int>(L.Slots.size());
            L.TotalLocal += S.Size;
            L.Slots.push_back(std::move(S));
          }
        }
      }
      L.TotalShared = L.TotalLocal;
      M.Layouts.emplace_back(G.Root, std::move(L));
    }
  }

  //===--------------------------------------------------------------------===
  // to-machine
  //===--------------------------------------------------------------------===

  void toMachine() {
    for (auto &F : M.Functions) {
      const FrameGroup *G = M.groupOf(F.Name);
      assert(G);
      for (auto &B : F.Blocks) {
        for (auto &I : B.Instrs) {
          if (I.Op != Opcode::Alloca)
            continue;
          auto FIt = SlotOf.find(F.Name);
          assert(FIt != SlotOf.end());
          auto SIt = FIt->second.find(I.Result);
          assert(SIt != FIt->second.end());
          Instruction FI;
          FI.Op = Opcode::FrameIndex;
          FI.Result = I.Result;
          FI.ResultTy = I.ResultTy;
          FI.Candidate = I.Candidate;
          FI.Slot = SIt->second;
          FI.Base = BaseReg::FrameLocal;
          I = std::move(FI);
        }
      }
      F.Machine = true;
    }
  }

  //===--------------------------------------------------------------------===
  // lower-shared-frames
  //===--------------------------------------------------------------------===

  /// Marks the depot slots of detected-shared variables as shared-resident,
  /// retargets every frame index that refers to such a slot (the translated
  /// index list), and dissolves the to-shared half of each cast round-trip so
  /// the remaining cast reads straight off the frame index.
  void lowerSharedFrames() {
    for (auto &[Root, Layout] : M.Layouts) {
      const FrameGroup *G = M.groupOf(Root);
      assert(G);
      for (const auto &Member : G->Members) {
        auto It = Shared.find(Member);
        if (It == Shared.end())
          continue;
        const Function *F = M.findFunction(Member);
        for (const auto &B : F->Blocks) {
          for (const auto &I : B.Instrs) {
            if (I.Op != Opcode::FrameIndex || !It->second.count(I.Result))
              continue;
            assert(I.Slot >= 0 &&
                   static_cast<size_t>(I.Slot) < Layout.Slots.size());
            Layout.Slots[static_cast<size_t>(I.Slot)].SharedResident = true;
            Layout.HasSharedDepot = true;
          }
        }
      }
      // Retarget every frame index whose slot is now shared-resident. After
      // slot merging this can reach variables other than the detected ones.
      for (const auto &Member : G->Members) {
        Function *F = M.findFunction(Member);
        for (auto &B : F->Blocks) {
          for (auto &I : B.Instrs) {
            if (I.Op != Opcode::FrameIndex)
              continue;
            if (Layout.Slots[static_cast<size_t>(I.Slot)].SharedResident)
              I.Base = BaseReg::Shared;
          }
        }
      }
    }
    dissolveToSharedCasts();
  }

  void dissolveToSharedCasts() {
    for (auto &F : M.Functions) {
      std::set<std::string> FrameValues;
      for (const auto &B : F.Blocks)
        for (const auto &I : B.Instrs)
          if (I.Op == Opcode::FrameIndex)
            FrameValues.insert(I.Result);

      // cast result -> replacement operand
      std::map<std::string, Value> Replace;
      for (auto &B : F.Blocks) {
        for (size_t I = 0; I < B.Instrs.size();) {
          Instruction &C = B.Instrs[I];
          bool IsToShared = C.Op == Opcode::AddrSpaceCast &&
                            C.ResultTy.isPtr() &&
                            C.ResultTy.Space == AddrSpace::Shared &&
                            C.Ops.size() == 1 && C.Ops[0].isTemp() &&
                            FrameValues.count(C.Ops[0].Name);
          if (!IsToShared) {
            ++I;
            continue;
          }
          Replace[C.Result] = Value::temp(C.Ops[0].Name, C.ResultTy);
          B.Instrs.erase(B.Instrs.begin() + static_cast<long>(I));
        }
      }
      if (Replace.empty())
        continue;
      for (auto &B : F.Blocks) {
        for (auto &I : B.Instrs) {
          for (auto &Op : I.Ops) {
            if (!Op.isTemp())
              continue;
            auto It = Replace.find(Op.Name);
            if (It != Replace.end())
              Op = It->second;
          }
        }
      }
    }
  }

  //===--------------------------------------------------------------------===
  // color-stack
  //===--------------------------------------------------------------------===

  struct SlotLiveness {
    int First = -1;
    int Last = -1;
    bool Pinned = false;
    bool Seen = false; // has a frame index in this function

    bool empty() const { return First < 0; }
    bool disjoint(const SlotLiveness &O) const {
      if (empty() || O.empty())
        return true;
      return Last < O.First || O.Last < First;
    }
    void merge(const SlotLiveness &O) {
      if (O.empty())
        return;
      if (empty()) {
        First = O.First;
        Last = O.Last;
        return;
      }
      First = std::min(First, O.First);
      Last = std::max(Last, O.Last);
    }
  };

  /// Merges disjoint local slots within each function. Liveness is the span
  /// of positions where the frame-index value itself appears as an operand;
  /// derived pointers (casts, element addresses) have their own values and do
  /// not extend it. Slots already shared-resident, and slots whose value is
  /// passed to a call or stored, never merge.
  void colorStack() {
    for (auto &[Root, Layout] : M.Layouts) {
      const FrameGroup *G = M.groupOf(Root);
      assert(G);
      for (const auto &Member : G->Members) {
        Function *F = M.findFunction(Member);
        assert(F);
        colorFunction(*F, Layout);
      }
    }
  }

  void colorFunction(Function &F, DepotLayout &Layout) {
    std::map<std::string, int> SlotOfValue;
    for (const auto &B : F.Blocks)
      for (const auto &I : B.Instrs)
        if (I.Op == Opcode::FrameIndex)
          SlotOfValue[I.Result] = I.Slot;
    if (SlotOfValue.size() < 2)
      return;

    std::map<int, SlotLiveness> Live;
    for (const auto &[Name, Slot] : SlotOfValue) {
      (void)Name;
      Live[Slot].Seen = true;
    }
    int Pos = 0;
    for (const auto &B : F.Blocks) {
      for (const auto &I : B.Instrs) {
        for (size_t OpIdx = 0; OpIdx < I.Ops.size(); ++OpIdx) {
          const Value &Op = I.Ops[OpIdx];
          if (!Op.isTemp())
            continue;
          auto It = SlotOfValue.find(Op.Name);
          if (It == SlotOfValue.end())
            continue;
          SlotLiveness &L = Live[It->second];
          if (L.First < 0)
            L.First = Pos;
          L.Last = Pos;
          bool StoredAsValue = I.Op == Opcode::Store && OpIdx == 0;
          bool PassedToCall = I.Op == Opcode::Call && OpIdx >= 1;
          if (StoredAsValue || PassedToCall)
            L.Pinned = true;
        }
        ++Pos;
      }
    }

    std::vector<int> SlotIds;
    for (const auto &[Slot, L] : Live)
      if (L.Seen)
        SlotIds.push_back(Slot);
    std::sort(SlotIds.begin(), SlotIds.end());

    for (size_t A = 0; A < SlotIds.size(); ++A) {
      int SA = SlotIds[A];
      if (!mergeable(Layout, SA, Live[SA]))
        continue;
      for (size_t Bi = A + 1; Bi < SlotIds.size(); ++Bi) {
        int SB = SlotIds[Bi];
        if (SB == SA || Layout.Slots[static_cast<size_t>(SB)].Owners.empty())
          continue;
        if (!mergeable(Layout, SB, Live[SB]))
          continue;
        if (Live[SB].empty() || Live[SA].empty())
          continue; // dead slots are dropped by repacking, not merged
        if (!Live[SA].disjoint(Live[SB]))
          continue;
        DepotSlot &Dst = Layout.Slots[static_cast<size_t>(SA)];
        DepotSlot &Src = Layout.Slots[static_cast<size_t>(SB)];
        Dst.Size = std::max(Dst.Size, Src.Size);
        Dst.Align = std::max(Dst.Align, Src.Align);
        for (auto &O : Src.Owners)
          Dst.Owners.push_back(std::move(O));
        Src.Owners.clear();
        Live[SA].merge(Live[SB]);
        retargetSlot(F, SB, SA);
      }
    }
  }

  bool mergeable(const DepotLayout &Layout, int Slot, const SlotLiveness &L) {
    const DepotSlot &S = Layout.Slots[static_cast<size_t>(Slot)];
    return !S.SharedResident && !L.Pinned && !S.Owners.empty();
  }

  void retargetSlot(Function &F, int From, int To) {
    for (auto &B : F.Blocks)
      for (auto &I : B.Instrs)
        if (I.Op == Opcode::FrameIndex && I.Slot == From)
          I.Slot = To;
  }

  //===--------------------------------------------------------------------===
  // repack-offsets
  //===--------------------------------------------------------------------===

  void repackOffsets() {
    for (auto &[Root, Layout] : M.Layouts) {
      std::map<int, int> Renumber;
      std::vector<DepotSlot> Packed;
      int64_t Offset = 0;
      for (size_t I = 0; I < Layout.Slots.size(); ++I) {
        DepotSlot &S = Layout.Slots[I];
        if (S.Owners.empty())
          continue;
        Renumber[static_cast<int>(I)] = static_cast<int>(Packed.size());
        S.Offset = Offset;
        Offset += S.Size;
        Packed.push_back(std::move(S));
      }
      Layout.Slots = std::move(Packed);
      Layout.TotalLocal = Offset;
      Layout.TotalShared = Offset;
      Layout.HasSharedDepot = false;
      for (const auto &S : Layout.Slots)
        if (S.SharedResident)
          Layout.HasSharedDepot = true;

      const FrameGroup *G = M.groupOf(Root);
      for (const auto &Member : G->Members) {
        Function *F = M.findFunction(Member);
        for (auto &B : F->Blocks) {
          for (auto &I : B.Instrs) {
            if (I.Op != Opcode::FrameIndex)
              continue;
            auto It = Renumber.find(I.Slot);
            assert(It != Renumber.end() &&
                   "frame index refers to a dropped slot");
            I.Slot = It->second;
          }
        }
      }
    }
  }

  Module M;
  const PassPlan &Plan;
  std::map<std::string, std::set<std::string>> Shared;
  bool HaveShared = false;
  std::map<std::string, std::map<std::string, int>> SlotOf;
};

} // namespace

PipelineResult omplab::runPasses(Module M, const PassPlan &Plan) {
  PassDriver D(std::move(M), Plan);
  return D.run();
}

PipelineResult omplab::runPipeline(Module M, PipelineKind K) {
  return runPasses(std::move(M), planFor(K));
}

//===----------------------------------------------------------------------===//
// Audits
//===----------------------------------------------------------------------===//

DiagList omplab::auditMachineModule(const Module &M) {
  DiagList Diags;
  for (const auto &[Root, Layout] : M.Layouts) {
    if (auto Overlap = Layout.findSharedLocalOverlap())
      Diags.push_back({"layout-overlap", *Overlap, Root, {}});
    if (Layout.TotalShared != Layout.TotalLocal)
      Diags.push_back({"mirror-mismatch",
                       "shared depot size " +
                           std::to_string(Layout.TotalShared) +
                           " does not mirror local depot size " +
                           std::to_string(Layout.TotalLocal),
                       Root,
                       {}});
  }
  for (const auto &F : M.Functions) {
    if (!F.Machine)
      continue;
    std::set<std::string> FrameValues;
    for (const auto &B : F.Blocks)
      for (const auto &I : B.Instrs)
        if (I.Op == Opcode::FrameIndex)
          FrameValues.insert(I.Result);
    for (const auto &Name : FrameValues) {
      bool ToSharedCast = false;
      bool OtherUse = false;
      for (const auto &B : F.Blocks) {
        for (const auto &I : B.Instrs) {
          for (const auto &Op : I.Ops) {
            if (!Op.isTemp() || Op.Name != Name)
              continue;
            if (I.Op == Opcode::AddrSpaceCast && I.ResultTy.isPtr() &&
                I.ResultTy.Space == AddrSpace::Shared)
              ToSharedCast = true;
            else
              OtherUse = true;
          }
        }
      }
      if (ToSharedCast && OtherUse)
        Diags.push_back({"ambiguous-residency",
                         "frame value %" + Name +
                             " is cast onto the shared depot but also used "
                             "directly",
                         F.Name,
                         {}});
    }
  }
  return Diags;
}
