#ifndef VERSEKIT_COMMON_HPP
#define VERSEKIT_COMMON_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace versekit {

// Malformed or inconsistent input data. CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad invocation (unknown flag, missing argument). CLI maps this to exit 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-fatal diagnostics go through a process-wide sink (stderr by default).
// Tests swap the sink to assert on emitted warnings.
using WarnSink = std::function<void(const std::string&)>;
WarnSink set_warn_sink(WarnSink sink);
void warn(const std::string& message);

// Opaque ordered verse key. Ids of the shape BOOK.chapter.verse sort
// numerically on the digit segments so GEN.1.2 < GEN.1.10; anything else
// falls back to byte order. Equality is always byte-exact.
class VerseId {
 public:
  VerseId() = default;
  explicit VerseId(std::string key) : key_(std::move(key)) {}

  const std::string& str() const { return key_; }
  bool empty() const { return key_.empty(); }

  // Prefix before the first '.' (the whole key when there is none).
  std::string_view book() const;

  friend bool operator==(const VerseId& a, const VerseId& b) {
    return a.key_ == b.key_;
  }
  friend bool operator!=(const VerseId& a, const VerseId& b) {
    return !(a == b);
  }
  friend bool operator<(const VerseId& a, const VerseId& b) {
    return compare(a, b) < 0;
  }
  friend bool operator>(const VerseId& a, const VerseId& b) {
    return compare(a, b) > 0;
  }
  friend bool operator<=(const VerseId& a, const VerseId& b) {
    return compare(a, b) <= 0;
  }
  friend bool operator>=(const VerseId& a, const VerseId& b) {
    return compare(a, b) >= 0;
  }

  static int compare(const VerseId& a, const VerseId& b);

 private:
  std::string key_;
};

struct VerseIdHash {
  size_t operator()(const VerseId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

// Unicode-whitespace split; no normalization, tokens kept verbatim.
std::vector<std::string> tokenize(std::string_view text);
size_t count_tokens(std::string_view text);

// UTF-8 <-> code points. decode throws DataError on invalid sequences.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view points);

// Shortest round-trip decimal rendering of a double (std::to_chars).
std::string format_double(double value);

// Levenshtein distance over code points.
size_t edit_distance(const std::u32string& a, const std::u32string& b);

}  // namespace versekit

#endif  // VERSEKIT_COMMON_HPP
