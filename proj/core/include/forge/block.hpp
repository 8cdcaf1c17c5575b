#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forge/common.hpp"

namespace forge {

// Finite word over an alphabet {0,...,N-1}. Symbols are packed at
// ceil(log2 N) bits; candidate spaces are exponential, so the
// representation is the bottleneck. The packed form is canonical, so
// equality and hashing are straight word comparisons.
class Block {
public:
  Block() = default;
  Block(std::span<const std::uint8_t> symbols, std::uint32_t alphabet_size);

  static Block from_symbols(std::initializer_list<std::uint8_t> symbols,
                            std::uint32_t alphabet_size);

  std::size_t size() const { return len_; }
  std::uint32_t alphabet_size() const { return alphabet_; }

  std::uint8_t at(std::size_t i) const {  // 0-based
    // symbols never straddle a word: 64 % bits_ bits are left unused per word
    const std::uint64_t word = words_[i / per_word_];
    const unsigned off = static_cast<unsigned>((i % per_word_) * bits_);
    return static_cast<std::uint8_t>((word >> off) & mask_);
  }

  std::vector<std::uint8_t> unpack() const;

  bool operator==(const Block& o) const {
    return alphabet_ == o.alphabet_ && len_ == o.len_ && words_ == o.words_;
  }

  std::size_t hash() const;

  // Base-N digits, one character per symbol ('0'-'9' then 'a'-'z').
  std::string to_digits() const;
  static Block parse_digits(const std::string& digits, std::uint32_t alphabet_size);

private:
  friend Block concat(std::span<const Block> parts);
  std::uint32_t alphabet_ = 0;
  std::uint32_t bits_ = 0;
  std::uint64_t mask_ = 0;
  std::uint32_t per_word_ = 0;
  std::size_t len_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BlockHash {
  std::size_t operator()(const Block& b) const { return b.hash(); }
};

// Word over {-1,+1}, the image of a block under a code.
class SignBlock {
public:
  SignBlock() = default;
  explicit SignBlock(std::vector<std::int8_t> signs);
  std::size_t size() const { return signs_.size(); }
  std::int8_t at(std::size_t i) const { return signs_[i]; }
  const std::vector<std::int8_t>& raw() const { return signs_; }

private:
  std::vector<std::int8_t> signs_;
};

// Juxtaposition in order; all parts must share one alphabet.
Block concat(std::span<const Block> parts);
Block concat(std::initializer_list<Block> parts);

// (1/n) sum d_i c_i for real blocks of equal length.
double correlate(std::span<const double> d, std::span<const double> c);
double correlate(const SignBlock& d, std::span<const double> c);

// Frequency of D in C: occurrence count divided by |C| (the full length,
// not the number of window positions).
Rational freq(const Block& C, const Block& D);

// Occurrence count of D in C (helper behind freq and the frequency tables).
std::size_t count_occurrences(std::span<const std::uint8_t> C, std::span<const std::uint8_t> D);

}  // namespace forge
