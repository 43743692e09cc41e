#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace edgesign {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Edge label. Arithmetic uses value(); sgn(0) is +1 everywhere.
enum class Sign : std::int8_t { negative = -1, positive = 1 };

constexpr int value(Sign s) noexcept { return static_cast<int>(s); }

constexpr Sign sign_of(double x) noexcept {
  return x >= 0.0 ? Sign::positive : Sign::negative;
}

constexpr Sign flip(Sign s) noexcept {
  return s == Sign::positive ? Sign::negative : Sign::positive;
}

/// Sign of (score - threshold) with ties going to +1.
constexpr Sign threshold_sign(double score, double threshold) noexcept {
  return score >= threshold ? Sign::positive : Sign::negative;
}

// Errors carry the CLI exit code they map to.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(what, 2) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error(what, 2) {}
};

/// A parameter value outside the domain of a formula (e.g. a log of zero).
class DomainError : public ArgumentError {
 public:
  DomainError(const std::string& what, EdgeId edge) : ArgumentError(what), edge_(edge) {}
  EdgeId edge() const noexcept { return edge_; }

 private:
  EdgeId edge_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what, 3) {}
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_value)
      : Error(what, 4), best_value_(best_value) {}
  double best_value() const noexcept { return best_value_; }

 private:
  double best_value_;
};

/// Runs body(begin, end) over contiguous chunks of [0, n). Each index is
/// visited by exactly one chunk, so per-index writes are race free.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  const std::size_t grain = 4096;
  if (threads <= 1 || n < 2 * grain) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(threads, (n + grain - 1) / grain);
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * step;
    const std::size_t hi = std::min(n, lo + step);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

/// Max-reduction over chunk results of body(begin, end) -> double. Max is
/// order independent, so the result does not depend on the thread count.
template <class Body>
double parallel_max(std::size_t n, unsigned threads, Body&& body) {
  const std::size_t grain = 4096;
  if (threads <= 1 || n < 2 * grain) return body(std::size_t{0}, n);
  const std::size_t chunks = std::min<std::size_t>(threads, (n + grain - 1) / grain);
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<double> partial(chunks, 0.0);
  std::vector<std::thread> pool;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * step;
    const std::size_t hi = std::min(n, lo + step);
    if (lo >= hi) break;
    pool.emplace_back([&body, &partial, c, lo, hi] { partial[c] = body(lo, hi); });
  }
  for (auto& t : pool) t.join();
  return *std::max_element(partial.begin(), partial.end());
}

}  // namespace edgesign
