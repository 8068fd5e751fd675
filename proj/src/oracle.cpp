#include "hardatt/oracle.hpp"

#include <algorithm>

#include "hardatt/errors.hpp"
#include "hardatt/unicode.hpp"

namespace hardatt {

std::string to_string(Inventory inventory) {
  return inventory == Inventory::kHacm ? "HACM" : "HAEM";
}

OracleSequence hacm_oracle(const Alignment& alignment) {
  OracleSequence out{Inventory::kHacm, {Action::bos()}};
  std::size_t attended = 0;
  std::size_t lemma_seen = 0;
  for (const auto& pair : alignment) {
    if (pair.lemma_char) ++lemma_seen;
    if (!pair.form_char) continue;
    for (; attended < lemma_seen; ++attended) out.actions.push_back(Action::step());
    out.actions.push_back(Action::write(*pair.form_char));
  }
  for (; attended < lemma_seen + 1; ++attended) out.actions.push_back(Action::step());
  out.actions.push_back(Action::eos());
  return out;
}

OracleSequence haem_oracle_unnormalized(const Alignment& alignment) {
  OracleSequence out{Inventory::kHaem, {}};
  for (const auto& pair : alignment) {
    if (!pair.lemma_char) {
      out.actions.push_back(Action::write(*pair.form_char));
    } else if (!pair.form_char) {
      out.actions.push_back(Action::del());
    } else if (*pair.lemma_char == *pair.form_char) {
      out.actions.push_back(Action::copy());
    } else {
      out.actions.push_back(Action::del());
      out.actions.push_back(Action::write(*pair.form_char));
    }
  }
  out.actions.push_back(Action::stop());
  return out;
}

OracleSequence haem_oracle(const Alignment& alignment) {
  return normalize(haem_oracle_unnormalized(alignment));
}

OracleSequence normalize(const OracleSequence& sequence) {
  OracleSequence out = sequence;
  auto& actions = out.actions;
  auto in_run = [](const Action& a) {
    return a.kind == ActionKind::kDelete || a.kind == ActionKind::kWrite;
  };
  auto it = actions.begin();
  while (it != actions.end()) {
    if (!in_run(*it)) {
      ++it;
      continue;
    }
    auto run_end = std::find_if_not(it, actions.end(), in_run);
    std::stable_partition(it, run_end, [](const Action& a) { return a.kind == ActionKind::kDelete; });
    it = run_end;
  }
  return out;
}

namespace {

std::string at_step(std::size_t t) { return "action " + std::to_string(t + 1); }

std::u32string replay_hacm(std::u32string_view lemma, const std::vector<Action>& actions) {
  const std::size_t last = lemma.size() + 1;
  if (actions.empty() || actions.front().kind != ActionKind::kBos) {
    throw TransitionError("copy-mixture sequence must start with BOS");
  }
  std::u32string out;
  std::size_t i = 0;
  for (std::size_t t = 1; t < actions.size(); ++t) {
    const auto& action = actions[t];
    switch (action.kind) {
      case ActionKind::kWrite:
        out.push_back(action.ch);
        break;
      case ActionKind::kStep:
        if (i >= last) throw TransitionError(at_step(t) + ": STEP past EOS");
        ++i;
        break;
      case ActionKind::kEos:
        if (t + 1 != actions.size()) throw TransitionError(at_step(t) + ": actions after EOS");
        return out;
      default:
        throw TransitionError(at_step(t) + ": " + action_name(action) +
                              " is not a copy-mixture action");
    }
  }
  throw TransitionError("copy-mixture sequence has no terminal EOS");
}

std::u32string replay_haem(std::u32string_view lemma, const std::vector<Action>& actions) {
  std::u32string out;
  std::size_t pos = 0;  // 0-based; the 1-based attention index is pos + 1
  for (std::size_t t = 0; t < actions.size(); ++t) {
    const auto& action = actions[t];
    switch (action.kind) {
      case ActionKind::kCopy:
        if (pos >= lemma.size()) throw TransitionError(at_step(t) + ": COPY past end of lemma");
        out.push_back(lemma[pos++]);
        break;
      case ActionKind::kDelete:
        if (pos >= lemma.size()) throw TransitionError(at_step(t) + ": DELETE past end of lemma");
        ++pos;
        break;
      case ActionKind::kWrite:
        out.push_back(action.ch);
        break;
      case ActionKind::kStop:
        if (t + 1 != actions.size()) throw TransitionError(at_step(t) + ": actions after STOP");
        return out;
      default:
        throw TransitionError(at_step(t) + ": " + action_name(action) + " is not an edit action");
    }
  }
  throw TransitionError("edit sequence has no terminal STOP");
}

}  // namespace

std::u32string replay(std::u32string_view lemma, const OracleSequence& sequence) {
  return sequence.inventory == Inventory::kHacm ? replay_hacm(lemma, sequence.actions)
                                                : replay_haem(lemma, sequence.actions);
}

std::vector<std::size_t> attention_trace(const OracleSequence& sequence) {
  std::vector<std::size_t> trace;
  trace.reserve(sequence.actions.size());
  std::size_t i = sequence.inventory == Inventory::kHacm ? 0 : 1;
  for (const auto& action : sequence.actions) {
    trace.push_back(i);
    if (action.kind == ActionKind::kStep || action.kind == ActionKind::kCopy ||
        action.kind == ActionKind::kDelete) {
      ++i;
    }
  }
  return trace;
}

std::string action_name(const Action& action) {
  switch (action.kind) {
    case ActionKind::kWrite: return utf8_encode(action.ch);
    case ActionKind::kStep: return "STEP";
    case ActionKind::kBos: return "<s>";
    case ActionKind::kEos: return "</s>";
    case ActionKind::kCopy: return "COPY";
    case ActionKind::kDelete: return "DELETE";
    case ActionKind::kStop: return "STOP";
  }
  return "?";
}

std::string format_actions(const OracleSequence& sequence) {
  std::string out;
  for (std::size_t k = 0; k < sequence.actions.size(); ++k) {
    if (k) out += ' ';
    out += action_name(sequence.actions[k]);
  }
  return out;
}

}  // namespace hardatt
