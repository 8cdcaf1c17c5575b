#include "forge/block.hpp"

#include <bit>
#include <stdexcept>

namespace forge {

namespace {

std::uint32_t bits_for(std::uint32_t alphabet) {
  if (alphabet < 2) throw std::invalid_argument("Block: alphabet size must be >= 2");
  return std::bit_width(alphabet - 1);
}

constexpr char kDigits[] = "0123456789abcdefghijklmnopqrstuvwxyz";

}  // namespace

Block::Block(std::span<const std::uint8_t> symbols, std::uint32_t alphabet_size)
    : alphabet_(alphabet_size),
      bits_(bits_for(alphabet_size)),
      mask_((1ULL << bits_) - 1),
      per_word_(64 / bits_),
      len_(symbols.size()) {
  if (symbols.empty()) throw std::invalid_argument("Block: length must be >= 1");
  words_.assign((len_ + per_word_ - 1) / per_word_, 0);
  for (std::size_t i = 0; i < len_; ++i) {
    if (symbols[i] >= alphabet_)
      throw std::invalid_argument("Block: symbol out of range");
    words_[i / per_word_] |= static_cast<std::uint64_t>(symbols[i])
                             << ((i % per_word_) * bits_);
  }
}

Block Block::from_symbols(std::initializer_list<std::uint8_t> symbols,
                          std::uint32_t alphabet_size) {
  return Block(std::span<const std::uint8_t>(symbols.begin(), symbols.size()),
               alphabet_size);
}

std::vector<std::uint8_t> Block::unpack() const {
  std::vector<std::uint8_t> out(len_);
  for (std::size_t i = 0; i < len_; ++i) out[i] = at(i);
  return out;
}

std::size_t Block::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ (static_cast<std::uint64_t>(alphabet_) << 32) ^ len_;
  for (std::uint64_t w : words_) {
    h ^= w;
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

std::string Block::to_digits() const {
  if (alphabet_ > 36) throw CapacityError("Block::to_digits: alphabet size > 36");
  std::string s(len_, '0');
  for (std::size_t i = 0; i < len_; ++i) s[i] = kDigits[at(i)];
  return s;
}

Block Block::parse_digits(const std::string& digits, std::uint32_t alphabet_size) {
  if (alphabet_size > 36) throw CapacityError("Block::parse_digits: alphabet size > 36");
  std::vector<std::uint8_t> syms;
  syms.reserve(digits.size());
  for (char c : digits) {
    int v;
    if (c >= '0' && c <= '9')
      v = c - '0';
    else if (c >= 'a' && c <= 'z')
      v = 10 + (c - 'a');
    else
      throw ParseError(std::string("Block::parse_digits: bad digit '") + c + "'");
    if (v >= static_cast<int>(alphabet_size))
      throw ParseError("Block::parse_digits: digit out of alphabet range");
    syms.push_back(static_cast<std::uint8_t>(v));
  }
  return Block(syms, alphabet_size);
}

SignBlock::SignBlock(std::vector<std::int8_t> signs) : signs_(std::move(signs)) {
  for (std::int8_t s : signs_)
    if (s != 1 && s != -1) throw std::invalid_argument("SignBlock: values must be +/-1");
}

Block concat(std::span<const Block> parts) {
  if (parts.empty()) throw std::invalid_argument("concat: empty part list");
  const std::uint32_t alphabet = parts[0].alphabet_size();
  std::size_t total = 0;
  for (const Block& p : parts) {
    if (p.alphabet_size() != alphabet)
      throw std::invalid_argument("concat: mixed alphabets");
    total += p.size();
  }
  std::vector<std::uint8_t> syms;
  syms.reserve(total);
  for (const Block& p : parts)
    for (std::size_t i = 0; i < p.size(); ++i) syms.push_back(p.at(i));
  return Block(syms, alphabet);
}

Block concat(std::initializer_list<Block> parts) {
  return concat(std::span<const Block>(parts.begin(), parts.size()));
}

double correlate(std::span<const double> d, std::span<const double> c) {
  if (d.size() != c.size() || d.empty())
    throw std::invalid_argument("correlate: blocks must have equal positive length");
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) sum += d[i] * c[i];
  return sum / static_cast<double>(d.size());
}

double correlate(const SignBlock& d, std::span<const double> c) {
  if (d.size() != c.size() || d.size() == 0)
    throw std::invalid_argument("correlate: blocks must have equal positive length");
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) sum += d.at(i) * c[i];
  return sum / static_cast<double>(d.size());
}

std::size_t count_occurrences(std::span<const std::uint8_t> C,
                              std::span<const std::uint8_t> D) {
  std::size_t count = 0;
  for (std::size_t i = 0; i + D.size() <= C.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < D.size(); ++j) {
      if (C[i + j] != D[j]) {
        match = false;
        break;
      }
    }
    if (match) ++count;
  }
  return count;
}

Rational freq(const Block& C, const Block& D) {
  if (D.size() > C.size())
    throw std::invalid_argument("freq: |D| must not exceed |C|");
  const auto c = C.unpack();
  const auto d = D.unpack();
  return Rational(static_cast<long long>(count_occurrences(c, d)),
                  static_cast<long long>(C.size()));
}

}  // namespace forge
