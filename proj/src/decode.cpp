#include "hardatt/decode.hpp"

namespace hardatt {

DecodeResult greedy_decode(const Transducer& model, std::u32string_view lemma,
                           const std::vector<std::string>& features) {
  return model.greedy_decode(lemma, features);
}

bool has_repeat_run(std::u32string_view text, std::size_t threshold) {
  std::size_t run = 0;
  for (std::size_t k = 0; k < text.size(); ++k) {
    run = (k > 0 && text[k] == text[k - 1]) ? run + 1 : 1;
    if (run >= threshold) return true;
  }
  return false;
}

std::u32string post_filter(DecodeResult& result, std::u32string_view lemma) {
  if (result.terminated_by == TerminatedBy::kLengthCap || has_repeat_run(result.prediction)) {
    result.filtered = true;
    result.prediction = std::u32string(lemma);
  }
  return result.prediction;
}

std::u32string predict(const Transducer& model, const Sample& sample) {
  DecodeResult result = model.greedy_decode(sample.lemma, sample.features);
  return post_filter(result, sample.lemma);
}

std::vector<std::u32string> predict_all(const Transducer& model, const Dataset& samples) {
  std::vector<std::u32string> out;
  out.reserve(samples.size());
  for (const auto& sample : samples) out.push_back(predict(model, sample));
  return out;
}

}  // namespace hardatt
