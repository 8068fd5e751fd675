#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hardatt/transducer.hpp"

namespace hardatt {

// A run of this many identical characters counts as endless repetition.
inline constexpr std::size_t kRepeatThreshold = 10;

DecodeResult greedy_decode(const Transducer& model, std::u32string_view lemma,
                           const std::vector<std::string>& features);

bool has_repeat_run(std::u32string_view text, std::size_t threshold = kRepeatThreshold);

// Replaces a length-capped or endlessly repeating prediction with the lemma
// and marks the result filtered. Returns the final prediction.
std::u32string post_filter(DecodeResult& result, std::u32string_view lemma);

// greedy_decode followed by post_filter.
std::u32string predict(const Transducer& model, const Sample& sample);
std::vector<std::u32string> predict_all(const Transducer& model, const Dataset& samples);

}  // namespace hardatt
