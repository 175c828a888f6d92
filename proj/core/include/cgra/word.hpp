#pragma once

#include <cstdint>

namespace cgra {

using Word = std::uint64_t;

inline Word word_mask(int width) {
  return width >= 64 ? ~Word{0} : ((Word{1} << width) - 1);
}

inline Word truncate(Word v, int width) { return v & word_mask(width); }

inline Word truncate_signed(std::int64_t v, int width) {
  return truncate(static_cast<Word>(v), width);
}

inline std::int64_t to_signed(Word v, int width) {
  v = truncate(v, width);
  if (width < 64 && (v >> (width - 1)) & 1) return static_cast<std::int64_t>(v | ~word_mask(width));
  return static_cast<std::int64_t>(v);
}

// A datapath value plus its predication tag. Invalid values never reach memory.
struct Tagged {
  Word word = 0;
  bool valid = false;

  friend bool operator==(const Tagged&, const Tagged&) = default;
};

}  // namespace cgra
