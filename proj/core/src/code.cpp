#include "forge/code.hpp"

#include <cmath>
#include <stdexcept>

namespace forge {

namespace {

std::uint64_t ipow(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t r = 1;
  while (exp--) r *= base;
  return r;
}

}  // namespace

Code::Code(std::uint32_t window, std::uint32_t alphabet_size,
           std::vector<std::int8_t> table, int id)
    : window_(window), alphabet_(alphabet_size), table_(std::move(table)), id_(id) {
  if (window_ == 0) throw std::invalid_argument("Code: window must be >= 1");
  if (alphabet_ < 2) throw std::invalid_argument("Code: alphabet size must be >= 2");
  if (table_.size() != ipow(alphabet_, window_))
    throw std::invalid_argument("Code: table must be total on all N^w windows");
  for (std::int8_t v : table_)
    if (v != 1 && v != -1) throw std::invalid_argument("Code: outputs must be +/-1");
}

std::int8_t Code::eval(std::span<const std::uint8_t> window_symbols) const {
  std::size_t idx = 0;
  for (std::uint8_t s : window_symbols) idx = idx * alphabet_ + s;
  return table_[idx];
}

SignBlock Code::apply(const Block& B) const {
  if (B.size() < window_)
    throw std::invalid_argument("apply_code: block shorter than code window");
  if (B.alphabet_size() != alphabet_)
    throw std::invalid_argument("apply_code: alphabet mismatch");
  const auto syms = B.unpack();
  const std::size_t out_len = B.size() - window_ + 1;
  std::vector<std::int8_t> out(out_len);
  // Incremental window index: drop the leading digit, shift, append.
  const std::size_t high = ipow(alphabet_, window_ - 1);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < window_; ++i) idx = idx * alphabet_ + syms[i];
  out[0] = table_[idx];
  for (std::size_t i = 1; i < out_len; ++i) {
    idx = (idx % high) * alphabet_ + syms[i + window_ - 1];
    out[i] = table_[idx];
  }
  return SignBlock(std::move(out));
}

bool Code::is_constant() const {
  for (std::int8_t v : table_)
    if (v != table_[0]) return false;
  return true;
}

bool Code::ignores_last_coordinate() const {
  if (window_ == 1) return false;
  for (std::size_t base = 0; base < table_.size(); base += alphabet_)
    for (std::uint32_t a = 1; a < alphabet_; ++a)
      if (table_[base + a] != table_[base]) return false;
  return true;
}

std::string Code::serialize() const {
  std::string s = "w:" + std::to_string(window_) + ";table:";
  for (std::int8_t v : table_) s += (v > 0) ? '+' : '-';
  return s;
}

Code Code::parse(const std::string& text, std::uint32_t alphabet_size, int id) {
  if (text.rfind("w:", 0) != 0) throw ParseError("Code::parse: expected 'w:'");
  const auto semi = text.find(";table:");
  if (semi == std::string::npos) throw ParseError("Code::parse: expected ';table:'");
  const std::uint32_t w = static_cast<std::uint32_t>(std::stoul(text.substr(2, semi - 2)));
  std::vector<std::int8_t> table;
  for (char c : text.substr(semi + 7)) {
    if (c == '+')
      table.push_back(1);
    else if (c == '-')
      table.push_back(-1);
    else
      throw ParseError("Code::parse: table characters must be + or -");
  }
  return Code(w, alphabet_size, std::move(table), id);
}

CodeFamily enumerate_codes(std::uint32_t alphabet_size, std::uint32_t w_max) {
  if (w_max == 0) throw std::invalid_argument("enumerate_codes: w_max must be >= 1");
  // N^w_max <= 16 keeps 2^(N^w) enumerable.
  double table_size = std::pow(static_cast<double>(alphabet_size), w_max);
  if (table_size > 16.0)
    throw CapacityError(
        "enumerate_codes: N^w_max exceeds 16; supply an explicit code list instead");
  CodeFamily fam;
  int next_id = 0;
  for (std::uint32_t w = 1; w <= w_max; ++w) {
    const std::uint64_t entries = ipow(alphabet_size, w);
    const std::uint64_t total = 1ULL << entries;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      std::vector<std::int8_t> table(entries);
      for (std::uint64_t i = 0; i < entries; ++i)
        table[i] = (mask >> i) & 1 ? 1 : -1;
      Code code(w, alphabet_size, std::move(table), next_id);
      if (code.ignores_last_coordinate()) continue;  // already present at a smaller window
      fam.codes.push_back(std::move(code));
      ++next_id;
    }
  }
  return fam;
}

}  // namespace forge
