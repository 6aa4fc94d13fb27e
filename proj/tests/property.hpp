#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace prop {

// A property returns nothing when the case passes, or a description of the
// counterexample.
using Outcome = std::optional<std::string>;
using Check = std::function<Outcome(std::mt19937_64&)>;

struct Property {
  std::string module;
  std::string name;
  Check check;
  // Statistical properties tolerate a fraction of failing cases.
  double allowed_failure_rate = 0.0;
};

struct Result {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double allowed_failure_rate = 0.0;
  std::string first_failure;

  bool passed() const {
    return static_cast<double>(failures) <= allowed_failure_rate * static_cast<double>(cases);
  }
};

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Case i always sees the same generator state, whatever ran before it.
inline Result forall(const Property& p, std::size_t cases) {
  Result r;
  r.name = p.module + "/" + p.name;
  r.cases = cases;
  r.allowed_failure_rate = p.allowed_failure_rate;
  const std::uint64_t base = fnv1a(r.name);
  for (std::size_t i = 0; i < cases; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    Outcome o;
    try {
      o = p.check(rng);
    } catch (const std::exception& e) {
      o = std::string("threw: ") + e.what();
    }
    if (o) {
      if (r.failures == 0) r.first_failure = "case " + std::to_string(i) + ": " + *o;
      ++r.failures;
    }
  }
  return r;
}

}  // namespace prop
