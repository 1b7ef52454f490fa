#pragma once

#include <cstdint>
#include <random>

namespace hero {

// mt19937_64 with hand-rolled draws. The std:: distributions are
// implementation-defined, which would break checkpoint reproducibility across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

  template <class Seq>
  void shuffle(Seq& seq) {
    for (std::size_t i = seq.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(seq[i - 1], seq[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hero
