#include "hardatt/hacm.hpp"

#include <cmath>

#include "hardatt/errors.hpp"
#include "hardatt/numcore/ops.hpp"
#include "hardatt/numcore/random.hpp"

namespace hardatt {

HacmModel::HacmModel(CharVocabulary vocab, FeatureAlphabet features, ModelConfig config,
                     std::uint64_t seed)
    : vocab_(std::move(vocab)),
      features_(std::move(features)),
      config_(config),
      init_rng_(seed),
      char_embedding_(params_, "hacm.char_embedding", vocab_.size(), config.embedding, init_rng_),
      encoder_(params_, "hacm.encoder", config.embedding, config.hidden, init_rng_),
      action_embedding_(params_, "hacm.action_embedding", kFirstWrite + vocab_.num_chars(),
                        config.embedding, init_rng_),
      feature_embedding_(params_, "hacm.feature_embedding", features_.size(),
                         config.feature_embedding, init_rng_),
      decoder_(params_, "hacm.decoder",
               config.embedding + 2 * config.hidden + config.feature_embedding * features_.size(),
               config.hidden, init_rng_),
      generation_(params_, "hacm.generation", config.hidden, kFirstWrite + vocab_.num_chars(),
                  init_rng_),
      gate_(params_, "hacm.gate",
            2 * config.hidden + config.feature_embedding * features_.size() + config.embedding +
                config.hidden,
            1, init_rng_) {
  config_.arch = Arch::kHacm;
}

std::size_t HacmModel::decoder_input_dim() const { return decoder_.input_dim(); }
std::size_t HacmModel::gate_input_dim() const { return gate_.in(); }

std::optional<std::size_t> HacmModel::action_id(const Action& action) const {
  switch (action.kind) {
    case ActionKind::kStep: return kStep;
    case ActionKind::kBos: return kBos;
    case ActionKind::kEos: return kEos;
    case ActionKind::kWrite: {
      const auto index = vocab_.char_index(action.ch);
      if (!index) return std::nullopt;
      return kFirstWrite + *index;
    }
    default: return std::nullopt;
  }
}

Action HacmModel::action_at(std::size_t id) const {
  if (id == kStep) return Action::step();
  if (id == kBos) return Action::bos();
  if (id == kEos) return Action::eos();
  return Action::write(vocab_.char_at(id - kFirstWrite));
}

nc::Var HacmModel::feature_vector(nc::Graph& graph, const std::vector<std::string>& features) const {
  const std::size_t slots = features_.size();
  const std::size_t width = config_.feature_embedding;
  std::vector<bool> present(slots, false);
  for (std::size_t slot : features_.known_indices(features)) present[slot] = true;
  std::vector<nc::Var> parts;
  parts.reserve(slots);
  nc::Var zero = graph.constant(nc::Tensor(nc::Shape::vector(width)));
  for (std::size_t slot = 0; slot < slots; ++slot) {
    parts.push_back(present[slot] ? feature_embedding_(graph, slot) : zero);
  }
  if (parts.empty()) return graph.constant(nc::Tensor(nc::Shape::vector(0)));
  return nc::concat(parts);
}

std::vector<nc::Var> HacmModel::encode_frame(nc::Graph& graph, const std::vector<Symbol>& frame) const {
  std::vector<std::size_t> ids;
  ids.reserve(frame.size());
  for (const auto& symbol : frame) ids.push_back(symbol.id);
  return encoder_.encode(graph, char_embedding_, ids);
}

HacmModel::Context HacmModel::prepare(nc::Graph& graph, std::u32string_view lemma,
                                      const std::vector<std::string>& features) const {
  Context context;
  context.frame.push_back({CharVocabulary::kBos, 0});
  for (const auto& symbol : vocab_.encode(lemma)) context.frame.push_back(symbol);
  context.frame.push_back({CharVocabulary::kEos, 0});
  context.encoded = encode_frame(graph, context.frame);
  context.feature_vector = feature_vector(graph, features);
  return context;
}

HacmModel::State HacmModel::initial_state(nc::Graph& graph) const {
  return {0, decoder_.zero_state(graph), kBos};
}

HacmModel::StepOutput HacmModel::step_state(nc::Graph& graph, const Context& context,
                                            const State& state, const LossOptions& options) const {
  if (state.i >= context.encoded.size()) {
    throw TransitionError("attention index " + std::to_string(state.i) + " outside frame of size " +
                          std::to_string(context.encoded.size()));
  }
  nc::Var previous = action_embedding_(graph, state.prev_action);
  nc::Var attended = context.encoded[state.i];
  nc::Var input = nc::concat({previous, attended, context.feature_vector});
  nc::Var fed = options.dropout > 0.0 ? nc::dropout(input, options.dropout, *options.rng) : input;
  StepOutput out;
  out.state = state;
  out.state.decoder = decoder_.step(graph, fed, state.decoder);
  out.s = out.state.decoder.h;
  out.gate_input = nc::concat({attended, context.feature_vector, previous, out.s});
  return out;
}

HacmModel::State HacmModel::advance(const State& state, std::size_t action) const {
  State next = state;
  if (action == kStep) ++next.i;
  next.prev_action = action;
  return next;
}

std::optional<std::size_t> HacmModel::copy_target(const Symbol& attended, std::size_t i,
                                                  std::size_t frame_size) const {
  if (i == 0) return kBos;
  if (i + 1 == frame_size) return kEos;
  if (attended.oov()) return std::nullopt;
  return kFirstWrite + (attended.id - CharVocabulary::kFirstChar);
}

HacmModel::Mixture HacmModel::mixture_parts(nc::Graph& graph, const Context& context,
                                            const State& state, const StepOutput& step) const {
  Mixture mix;
  const nc::Tensor& p = nc::softmax(generation_(graph, step.s)).value();
  mix.generation.assign(p.values().begin(), p.values().end());
  mix.gate = nc::sigmoid(gate_(graph, step.gate_input)).scalar();
  mix.copy_action = copy_target(context.frame[state.i], state.i, context.frame.size());
  mix.attended_oov = !mix.copy_action.has_value();
  return mix;
}

std::vector<double> mixture_train_form(const std::vector<double>& generation, double gate,
                                       std::optional<std::size_t> copy_action) {
  std::vector<double> out(generation.size());
  for (std::size_t a = 0; a < generation.size(); ++a) {
    out[a] = gate * generation[a] + (1.0 - gate) * (copy_action == a ? 1.0 : 0.0);
  }
  return out;
}

TestTimeMixture mixture_test_form(const std::vector<double>& generation, double gate,
                                  std::optional<std::size_t> copy_action, bool attended_oov) {
  TestTimeMixture out;
  out.probs.resize(generation.size());
  const double in_vocab = attended_oov ? 0.0 : 1.0;
  const double oov = attended_oov ? 1.0 : 0.0;
  for (std::size_t a = 0; a < generation.size(); ++a) {
    const double is_copy = copy_action == a ? 1.0 : 0.0;
    // 1{a = x_i} 1{x_i OOV} is zero for every inventory action.
    out.probs[a] = (gate * generation[a] + (1.0 - gate) * is_copy) * in_vocab;
  }
  out.oov_copy = oov;
  return out;
}

nc::Var HacmModel::sample_loss(nc::Graph& graph, const Sample& sample, const OracleSequence& oracle,
                               const LossOptions& options) const {
  if (oracle.inventory != Inventory::kHacm) throw ConfigError("copy-mixture model needs a HACM oracle");
  if (oracle.actions.size() < 2 || oracle.actions.front().kind != ActionKind::kBos) {
    throw TransitionError("copy-mixture oracle must start with BOS and contain an action");
  }
  const Context context = prepare(graph, sample.lemma, sample.features);
  State state = initial_state(graph);
  std::vector<nc::Var> terms;
  terms.reserve(oracle.actions.size());
  for (std::size_t t = 1; t < oracle.actions.size(); ++t) {
    const auto target = action_id(oracle.actions[t]);
    if (!target) {
      throw DataError("oracle action '" + action_name(oracle.actions[t]) +
                      "' is outside the training action vocabulary");
    }
    const StepOutput step = step_state(graph, context, state, options);
    nc::Var logits = generation_(graph, step.s);
    nc::Var gate_logit = gate_(graph, step.gate_input);
    const auto copy = copy_target(context.frame[state.i], state.i, context.frame.size());
    nc::Var log_p;
    if (copy == *target) {
      // log(w p + 1 - w) = log(1 + w (p - 1))
      nc::Var p = nc::pick(nc::softmax(logits), *target);
      nc::Var w = nc::sigmoid(gate_logit);
      log_p = nc::log(nc::add_scalar(nc::scale_by(nc::add_scalar(p, -1.0), w), 1.0));
    } else {
      log_p = nc::add(nc::log_sigmoid(gate_logit), nc::pick(nc::log_softmax(logits), *target));
    }
    terms.push_back(log_p);
    state = advance(step.state, *target);
  }
  return nc::scale(nc::sum(terms), -1.0);
}

DecodeResult HacmModel::greedy_decode(std::u32string_view lemma,
                                      const std::vector<std::string>& features,
                                      const DecodeObserver& observer) const {
  nc::Graph graph = nc::Graph::inference();
  const Context context = prepare(graph, lemma, features);
  const std::size_t last = context.frame.size() - 1;
  const std::size_t cap = decode_cap(lemma.size());
  DecodeResult result;
  result.trace.inventory = Inventory::kHacm;
  result.trace.actions.push_back(Action::bos());
  State state = initial_state(graph);
  while (true) {
    const StepOutput step = step_state(graph, context, state);
    const Mixture mix = mixture_parts(graph, context, state, step);
    const TestTimeMixture dist =
        mixture_test_form(mix.generation, mix.gate, mix.copy_action, mix.attended_oov);

    std::vector<bool> selectable(dist.probs.size(), true);
    selectable[kBos] = false;
    if (state.i == last) selectable[kStep] = false;

    if (mix.attended_oov) {
      // Copy the unknown character with probability one, then move on as if
      // STEP had been predicted.
      if (observer) observer({dist.probs, std::vector<bool>(dist.probs.size(), true), dist.oov_copy, num_actions()});
      if (result.prediction.size() >= cap) {
        result.terminated_by = TerminatedBy::kLengthCap;
        return result;
      }
      const char32_t ch = context.frame[state.i].ch;
      result.prediction.push_back(ch);
      result.trace.actions.push_back(Action::write(ch));
      result.trace.actions.push_back(Action::step());
      state = advance(step.state, kStep);
      continue;
    }

    std::size_t best = num_actions();
    for (std::size_t a = 0; a < dist.probs.size(); ++a) {
      if (selectable[a] && (best == num_actions() || dist.probs[a] > dist.probs[best])) best = a;
    }
    if (observer) observer({dist.probs, std::vector<bool>(dist.probs.size(), true), dist.oov_copy, best});
    if (best == kEos) {
      result.trace.actions.push_back(Action::eos());
      result.terminated_by = TerminatedBy::kEndAction;
      return result;
    }
    if (best >= kFirstWrite) {
      if (result.prediction.size() >= cap) {
        result.terminated_by = TerminatedBy::kLengthCap;
        return result;
      }
      const char32_t ch = vocab_.char_at(best - kFirstWrite);
      result.prediction.push_back(ch);
      result.trace.actions.push_back(Action::write(ch));
    } else {
      result.trace.actions.push_back(Action::step());
    }
    state = advance(step.state, best);
  }
}

}  // namespace hardatt
