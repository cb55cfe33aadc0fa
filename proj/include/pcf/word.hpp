#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcf {

/// Finite word over the alphabet {1, ..., N}. The empty word indexes the whole set.
class Word {
public:
  Word() = default;
  Word(std::initializer_list<int> letters) : letters_(letters) {}
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}

  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  int operator[](std::size_t k) const { return letters_[k]; }
  const std::vector<int>& letters() const noexcept { return letters_; }

  void push_back(int letter) { letters_.push_back(letter); }

  /// Throws if some letter lies outside 1..alphabet_size.
  void check(int alphabet_size) const {
    for (int l : letters_)
      if (l < 1 || l > alphabet_size)
        throw std::out_of_range("letter " + std::to_string(l) + " outside alphabet 1.." +
                                std::to_string(alphabet_size));
  }

  auto operator<=>(const Word&) const = default;

private:
  std::vector<int> letters_;
};

inline Word concat(const Word& w, const Word& tail) {
  std::vector<int> out = w.letters();
  out.insert(out.end(), tail.letters().begin(), tail.letters().end());
  return Word(std::move(out));
}

/// Drops the first m letters.
inline Word shift(const Word& w, std::size_t m) {
  if (m > w.size())
    throw std::out_of_range("shift by " + std::to_string(m) + " exceeds word length " +
                            std::to_string(w.size()));
  return Word(std::vector<int>(w.letters().begin() + static_cast<std::ptrdiff_t>(m),
                               w.letters().end()));
}

inline Word prefix(const Word& w, std::size_t m) {
  if (m > w.size()) throw std::out_of_range("prefix longer than word");
  return Word(std::vector<int>(w.letters().begin(),
                               w.letters().begin() + static_cast<std::ptrdiff_t>(m)));
}

/// Dot-joined letters, e.g. "1.2.3"; the empty word prints as "".
inline std::string to_string(const Word& w) {
  std::string s;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) s += '.';
    s += std::to_string(w[k]);
  }
  return s;
}

/// N^n, or throws when it would not fit the cap.
inline std::size_t cell_count(int alphabet_size, std::size_t depth,
                              std::size_t cap = std::size_t{1} << 40) {
  std::size_t n = 1;
  for (std::size_t k = 0; k < depth; ++k) {
    if (n > cap / static_cast<std::size_t>(alphabet_size))
      throw std::overflow_error("N^n exceeds cap");
    n *= static_cast<std::size_t>(alphabet_size);
  }
  return n;
}

/// Position of w among all words of the same length in lexicographic order.
inline std::size_t word_index(const Word& w, int alphabet_size) {
  std::size_t idx = 0;
  for (int l : w.letters()) idx = idx * static_cast<std::size_t>(alphabet_size) +
                                  static_cast<std::size_t>(l - 1);
  return idx;
}

inline Word word_from_index(std::size_t index, std::size_t length, int alphabet_size) {
  std::vector<int> letters(length);
  for (std::size_t k = length; k-- > 0;) {
    letters[k] = static_cast<int>(index % static_cast<std::size_t>(alphabet_size)) + 1;
    index /= static_cast<std::size_t>(alphabet_size);
  }
  return Word(std::move(letters));
}

}  // namespace pcf
