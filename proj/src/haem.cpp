#include "hardatt/haem.hpp"

#include "hardatt/errors.hpp"
#include "hardatt/numcore/ops.hpp"

namespace hardatt {
namespace {

std::size_t state_input_size(const ModelConfig& config, std::size_t num_features) {
  const std::size_t H = config.hidden;
  return H + 2 * H + num_features + (config.extended ? 2 * H : 0);
}

}  // namespace

HaemModel::HaemModel(CharVocabulary vocab, FeatureAlphabet features, ModelConfig config,
                     std::uint64_t seed)
    : vocab_(std::move(vocab)),
      features_(std::move(features)),
      config_(config),
      init_rng_(seed),
      char_embedding_(params_, "haem.char_embedding", vocab_.size(), config.embedding, init_rng_),
      encoder_(params_, "haem.encoder", config.embedding, config.hidden, init_rng_),
      end_of_lemma_(&params_.add("haem.end_of_lemma", nc::Shape::vector(2 * config.hidden))),
      output_lstm_(params_, "haem.output_lstm", config.embedding, config.hidden, init_rng_),
      output_init_(params_, "haem.output_lstm", config.hidden),
      state_layer_(params_, "haem.state", state_input_size(config, features_.size()), config.hidden,
                   init_rng_),
      action_layer_(params_, "haem.action", config.hidden, kFirstWrite + vocab_.num_chars(),
                    init_rng_) {
  config_.arch = Arch::kHaem;
  nn::init_uniform(*end_of_lemma_, init_rng_);
  if (config_.extended) {
    action_embedding_.emplace(params_, "haem.action_embedding", num_actions(), config.embedding,
                              init_rng_);
    history_lstm_.emplace(params_, "haem.history_lstm", config.embedding, config.hidden, init_rng_);
    history_init_.emplace(params_, "haem.history_lstm", config.hidden);
    deletion_lstm_.emplace(params_, "haem.deletion_lstm", config.embedding, config.hidden, init_rng_);
    deletion_init_.emplace(params_, "haem.deletion_lstm", config.hidden);
  }
}

std::optional<std::size_t> HaemModel::action_id(const Action& action) const {
  switch (action.kind) {
    case ActionKind::kCopy: return kCopy;
    case ActionKind::kDelete: return kDelete;
    case ActionKind::kStop: return kStop;
    case ActionKind::kWrite: {
      const auto index = vocab_.char_index(action.ch);
      if (!index) return std::nullopt;
      return kFirstWrite + *index;
    }
    default: return std::nullopt;
  }
}

Action HaemModel::action_at(std::size_t id) const {
  if (id == kCopy) return Action::copy();
  if (id == kDelete) return Action::del();
  if (id == kStop) return Action::stop();
  return Action::write(vocab_.char_at(id - kFirstWrite));
}

nc::Tensor HaemModel::feature_indicator(const std::vector<std::string>& features) const {
  nc::Tensor out(nc::Shape::vector(features_.size()));
  for (std::size_t slot : features_.known_indices(features)) out[slot] = 1.0;
  return out;
}

HaemModel::Context HaemModel::prepare(nc::Graph& graph, std::u32string_view lemma,
                                      const std::vector<std::string>& features) const {
  Context context;
  context.lemma = std::u32string(lemma);
  context.symbols = vocab_.encode(lemma);
  std::vector<std::size_t> ids;
  ids.reserve(context.symbols.size());
  for (const auto& symbol : context.symbols) ids.push_back(symbol.id);
  context.encoded = encoder_.encode(graph, char_embedding_, ids);
  context.encoded.push_back(graph.param(*end_of_lemma_));
  context.features = graph.constant(feature_indicator(features));
  return context;
}

HaemModel::State HaemModel::initial_state(nc::Graph& graph) const {
  State state;
  state.output = output_init_(graph);
  if (config_.extended) {
    state.history = (*history_init_)(graph);
    state.deletion = (*deletion_init_)(graph);
  }
  return state;
}

std::vector<bool> HaemModel::valid_actions(const Context& context, const State& state) const {
  std::vector<bool> valid(num_actions(), true);
  if (state.i > context.lemma.size()) {
    valid[kCopy] = false;
    valid[kDelete] = false;
  }
  return valid;
}

HaemModel::StateOutput HaemModel::compute_state(nc::Graph& graph, const Context& context,
                                                const State& state,
                                                const LossOptions& options) const {
  if (state.i < 1 || state.i > context.encoded.size()) {
    throw TransitionError("attention index " + std::to_string(state.i) + " outside [1, " +
                          std::to_string(context.encoded.size()) + "]");
  }
  // The feature indicator is a handful of bits; dropout applies to the
  // dense parts only.
  std::vector<nc::Var> dense{state.output.h, context.encoded[state.i - 1]};
  if (config_.extended) {
    dense.push_back(state.history.h);
    dense.push_back(state.deletion.h);
  }
  nc::Var hidden = nc::concat(dense);
  if (options.dropout > 0.0) hidden = nc::dropout(hidden, options.dropout, *options.rng);
  nc::Var input = nc::concat({hidden, context.features});
  StateOutput out;
  out.s = nc::relu(state_layer_(graph, input));
  out.logits = action_layer_(graph, out.s);
  out.valid = valid_actions(context, state);
  return out;
}

std::vector<double> HaemModel::action_distribution(nc::Graph&, const StateOutput& output) const {
  const nc::Tensor& p = nc::softmax(output.logits, output.valid).value();
  return {p.values().begin(), p.values().end()};
}

HaemModel::State HaemModel::apply_action(nc::Graph& graph, const Context& context,
                                         const State& state, std::size_t action) const {
  if (state.stopped) throw TransitionError("action after STOP");
  if (action >= num_actions()) {
    throw TransitionError("action id " + std::to_string(action) + " outside the inventory");
  }
  if (!valid_actions(context, state)[action]) {
    throw TransitionError(action_name(action_at(action)) + " is invalid at attention index " +
                          std::to_string(state.i));
  }
  State next = state;
  switch (action) {
    case kCopy: {
      const Symbol& symbol = context.symbols[state.i - 1];
      next.emitted.push_back(symbol.ch);
      next.output = output_lstm_.step(graph, char_embedding_(graph, symbol.id), state.output);
      ++next.i;
      break;
    }
    case kDelete: {
      if (config_.extended) {
        const Symbol& symbol = context.symbols[state.i - 1];
        next.deletion = deletion_lstm_->step(graph, char_embedding_(graph, symbol.id), state.deletion);
      }
      ++next.i;
      break;
    }
    case kStop:
      next.stopped = true;
      break;
    default: {
      const char32_t ch = vocab_.char_at(action - kFirstWrite);
      next.emitted.push_back(ch);
      next.output = output_lstm_.step(graph, char_embedding_(graph, vocab_.id(ch)), state.output);
      if (config_.extended) next.deletion = (*deletion_init_)(graph);
      break;
    }
  }
  if (config_.extended && action != kStop) {
    next.history = history_lstm_->step(graph, (*action_embedding_)(graph, action), state.history);
  }
  return next;
}

nc::Var HaemModel::sample_loss(nc::Graph& graph, const Sample& sample, const OracleSequence& oracle,
                               const LossOptions& options) const {
  if (oracle.inventory != Inventory::kHaem) throw ConfigError("edit model needs a HAEM oracle");
  const Context context = prepare(graph, sample.lemma, sample.features);
  State state = initial_state(graph);
  std::vector<nc::Var> terms;
  terms.reserve(oracle.actions.size());
  for (const Action& action : oracle.actions) {
    const auto target = action_id(action);
    if (!target) {
      throw DataError("oracle action '" + action_name(action) +
                      "' is outside the training action vocabulary");
    }
    const StateOutput out = compute_state(graph, context, state, options);
    if (!out.valid[*target]) {
      throw TransitionError("oracle action " + action_name(action) + " invalid at attention index " +
                            std::to_string(state.i));
    }
    terms.push_back(nc::pick(nc::log_softmax(out.logits, out.valid), *target));
    state = apply_action(graph, context, state, *target);
  }
  if (!state.stopped) throw TransitionError("edit oracle does not end with STOP");
  return nc::scale(nc::sum(terms), -1.0);
}

DecodeResult HaemModel::greedy_decode(std::u32string_view lemma,
                                      const std::vector<std::string>& features,
                                      const DecodeObserver& observer) const {
  nc::Graph graph = nc::Graph::inference();
  const Context context = prepare(graph, lemma, features);
  const std::size_t cap = decode_cap(lemma.size());
  DecodeResult result;
  result.trace.inventory = Inventory::kHaem;
  State state = initial_state(graph);
  while (true) {
    const StateOutput out = compute_state(graph, context, state);
    const std::vector<double> probs = action_distribution(graph, out);
    std::size_t best = num_actions();
    for (std::size_t a = 0; a < probs.size(); ++a) {
      if (out.valid[a] && (best == num_actions() || probs[a] > probs[best])) best = a;
    }
    if (observer) observer({probs, out.valid, 0.0, best});
    const bool emits = best == kCopy || best >= kFirstWrite;
    if (emits && state.emitted.size() >= cap) {
      result.prediction = state.emitted;
      result.terminated_by = TerminatedBy::kLengthCap;
      return result;
    }
    result.trace.actions.push_back(action_at(best));
    state = apply_action(graph, context, state, best);
    if (state.stopped) {
      result.prediction = state.emitted;
      result.terminated_by = TerminatedBy::kEndAction;
      return result;
    }
  }
}

}  // namespace hardatt
