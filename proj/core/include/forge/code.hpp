#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forge/block.hpp"

namespace forge {

// A +/-1 valued function of a sliding window of `window` consecutive
// symbols. The table is total on all N^window windows, in lexicographic
// window order (first window symbol most significant).
class Code {
public:
  Code(std::uint32_t window, std::uint32_t alphabet_size, std::vector<std::int8_t> table,
       int id);

  std::uint32_t window() const { return window_; }
  std::uint32_t alphabet_size() const { return alphabet_; }
  int id() const { return id_; }
  const std::vector<std::int8_t>& table() const { return table_; }

  std::int8_t eval(std::span<const std::uint8_t> window_symbols) const;

  // Sliding application: output length |B| - window + 1.
  SignBlock apply(const Block& B) const;

  bool is_constant() const;
  // True when the value never depends on the last window coordinate, i.e.
  // the code is a lifted copy of a strictly smaller-window code.
  bool ignores_last_coordinate() const;

  // "w:<int>;table:<+/- string in lexicographic window order>"
  std::string serialize() const;
  static Code parse(const std::string& text, std::uint32_t alphabet_size, int id);

private:
  std::uint32_t window_;
  std::uint32_t alphabet_;
  std::vector<std::int8_t> table_;
  int id_;
};

struct CodeFamily {
  int step = 0;  // the k this family is attached to
  std::vector<Code> codes;
};

// All codes of window <= w_max, deduplicated so that a code lifted from a
// smaller window appears only once, at its smallest window. Ids are stable:
// enumeration order is window-major, then table order, so the family for
// w_max is a prefix-extension of the family for w_max - 1.
// Guard: N^w_max <= 16 (the enumeration has 2^(N^w) members per window).
CodeFamily enumerate_codes(std::uint32_t alphabet_size, std::uint32_t w_max);

}  // namespace forge
