#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hardatt/align.hpp"

namespace hardatt {

// Copy-mixture inventory: WRITE, STEP, BOS, EOS.
// Edit inventory:         COPY, DELETE, WRITE, STOP.
enum class ActionKind { kWrite, kStep, kBos, kEos, kCopy, kDelete, kStop };

struct Action {
  ActionKind kind = ActionKind::kStop;
  char32_t ch = 0;  // only meaningful for kWrite

  static Action write(char32_t c) { return {ActionKind::kWrite, c}; }
  static Action step() { return {ActionKind::kStep, 0}; }
  static Action bos() { return {ActionKind::kBos, 0}; }
  static Action eos() { return {ActionKind::kEos, 0}; }
  static Action copy() { return {ActionKind::kCopy, 0}; }
  static Action del() { return {ActionKind::kDelete, 0}; }
  static Action stop() { return {ActionKind::kStop, 0}; }

  bool is_write() const { return kind == ActionKind::kWrite; }
  bool operator==(const Action& other) const {
    return kind == other.kind && (kind != ActionKind::kWrite || ch == other.ch);
  }
};

enum class Inventory { kHacm, kHaem };

std::string to_string(Inventory inventory);

struct OracleSequence {
  Inventory inventory = Inventory::kHaem;
  std::vector<Action> actions;

  bool operator==(const OracleSequence&) const = default;
};

// Attention starts on BOS (index 0) of the BOS + lemma + EOS frame. Every
// WRITE is preceded by the STEPs needed to reach the most recent lemma
// character seen in the alignment; deletions are therefore stepped over
// lazily. The sequence always contains exactly |lemma| + 1 STEPs.
OracleSequence hacm_oracle(const Alignment& alignment);

// Raw per-pair derivation, before DELETE/WRITE reordering.
OracleSequence haem_oracle_unnormalized(const Alignment& alignment);
OracleSequence haem_oracle(const Alignment& alignment);

// Moves DELETEs ahead of WRITEs inside every maximal DELETE/WRITE run.
OracleSequence normalize(const OracleSequence& sequence);

// Executes `sequence` against `lemma`. Throws TransitionError on an
// out-of-frame attention move, a missing terminal action or trailing actions.
std::u32string replay(std::u32string_view lemma, const OracleSequence& sequence);

// Attention index before each action. Copy-mixture traces live in
// [0, n+1] (BOS frame); edit traces are 1-based in [1, n+1].
std::vector<std::size_t> attention_trace(const OracleSequence& sequence);

std::string action_name(const Action& action);
// Space-separated action names; WRITE renders as the bare character.
std::string format_actions(const OracleSequence& sequence);

}  // namespace hardatt
