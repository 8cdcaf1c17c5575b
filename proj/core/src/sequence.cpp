#include "forge/sequence.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "forge/rng.hpp"

namespace forge {

TestSequence::TestSequence(std::vector<double> values, SequenceSource source)
    : values_(std::move(values)), source_(source) {
  if (values_.empty()) throw std::invalid_argument("TestSequence: length must be >= 1");
  integer_valued_ = true;
  for (double v : values_) {
    if (!(std::fabs(v) <= 1.0))
      throw std::invalid_argument("TestSequence: |y_i| <= 1 violated");
    if (v != std::nearbyint(v)) integer_valued_ = false;
  }
}

TestSequence mobius(std::size_t n_max) {
  if (n_max == 0) throw std::invalid_argument("mobius: n_max must be >= 1");
  // Linear sieve carrying mu directly alongside the smallest prime factor.
  std::vector<std::uint32_t> spf(n_max + 1, 0);
  std::vector<std::int8_t> mu(n_max + 1, 0);
  std::vector<std::uint32_t> primes;
  mu[1] = 1;
  for (std::size_t i = 2; i <= n_max; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
      mu[i] = -1;
    }
    for (std::uint32_t p : primes) {
      if (p > spf[i] || i * p > n_max) break;
      spf[i * p] = p;
      mu[i * p] = (i % p == 0) ? 0 : static_cast<std::int8_t>(-mu[i]);
    }
  }
  std::vector<double> vals(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) vals[n - 1] = mu[n];
  return TestSequence(std::move(vals), SequenceSource::mobius);
}

std::size_t max_ap_terms(const TestSequence& y, std::size_t t, std::size_t l) {
  if (t == 0) throw std::invalid_argument("ap_average: t must be >= 1");
  if (y.length() < t + l) return 0;
  return (y.length() - l) / t;
}

double ap_average(const TestSequence& y, std::size_t t, std::size_t l, std::size_t n) {
  if (t == 0 || n == 0) throw std::invalid_argument("ap_average: t and n must be >= 1");
  const std::size_t n_adm = max_ap_terms(y, t, l);
  if (n > n_adm) {
    std::ostringstream msg;
    msg << "ap_average: index n*t+l exceeds sequence length; largest admissible n is "
        << n_adm;
    throw std::invalid_argument(msg.str());
  }
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) sum += y.at(i * t + l);
  return sum / static_cast<double>(n);
}

AperiodicityReport verify_aperiodic(const TestSequence& y, std::size_t t_max, double tol) {
  if (t_max == 0) throw std::invalid_argument("verify_aperiodic: t_max must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("verify_aperiodic: tol must be > 0");
  AperiodicityReport rep;
  rep.t_max = t_max;
  rep.tol = tol;
  for (std::size_t t = 1; t <= t_max; ++t) {
    for (std::size_t l = 0; l < t; ++l) {
      const std::size_t n = max_ap_terms(y, t, l);
      if (n == 0) continue;
      ApTriple triple{t, l, n, ap_average(y, t, l, n)};
      rep.evaluated.push_back(triple);
      const double a = std::fabs(triple.average);
      if (a > rep.max_abs_average) {
        rep.max_abs_average = a;
        rep.worst = triple;
      }
      if (a > tol) rep.flagged.push_back(triple);
    }
  }
  return rep;
}

TestSequence load_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("load_sequence: cannot open " + path);
  std::vector<double> vals;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v;
    try {
      std::size_t pos = 0;
      v = std::stod(line, &pos);
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos != line.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw ParseError("load_sequence: " + path + ":" + std::to_string(lineno) +
                       ": not a real number: '" + line + "'");
    }
    if (!(std::fabs(v) <= 1.0))
      throw ParseError("load_sequence: " + path + ":" + std::to_string(lineno) +
                       ": value outside [-1,1]: " + line);
    vals.push_back(v);
  }
  if (vals.empty()) throw ParseError("load_sequence: " + path + ": empty sequence");
  return TestSequence(std::move(vals), SequenceSource::file);
}

TestSequence synthetic_pm1(std::uint64_t seed, std::size_t n) {
  if (n == 0) throw std::invalid_argument("synthetic_pm1: n must be >= 1");
  Rng rng(seed);
  std::vector<double> vals(n);
  for (auto& v : vals) v = (rng.next() & 1) ? 1.0 : -1.0;
  return TestSequence(std::move(vals), SequenceSource::synthetic);
}

void save_sequence(const TestSequence& y, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("save_sequence: cannot open " + path);
  for (std::size_t i = 1; i <= y.length(); ++i) out << y.at(i) << "\n";
}

}  // namespace forge
