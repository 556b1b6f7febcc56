#include "versekit/common.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <iostream>
#include <mutex>

namespace versekit {

namespace {

std::mutex g_warn_mutex;
WarnSink g_warn_sink = [](const std::string& message) {
  std::cerr << "warning: " << message << "\n";
};

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

// Unicode code points treated as whitespace for tokenization.
bool is_space_cp(char32_t c) {
  switch (c) {
    case U'\t':
    case U'\n':
    case U'\v':
    case U'\f':
    case U'\r':
    case U' ':
    case U'':
    case U' ':
    case U' ':
    case U' ':
    case U' ':
    case U' ':
    case U' ':
    case U'　':
      return true;
    default:
      return c >= U' ' && c <= U' ';
  }
}

}  // namespace

WarnSink set_warn_sink(WarnSink sink) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  WarnSink previous = g_warn_sink;
  g_warn_sink = std::move(sink);
  return previous;
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  if (g_warn_sink) g_warn_sink(message);
}

std::string_view VerseId::book() const {
  size_t dot = key_.find('.');
  if (dot == std::string::npos) return key_;
  return std::string_view(key_).substr(0, dot);
}

int VerseId::compare(const VerseId& a, const VerseId& b) {
  std::string_view x = a.key_;
  std::string_view y = b.key_;
  while (!x.empty() && !y.empty()) {
    size_t xd = x.find('.');
    size_t yd = y.find('.');
    std::string_view xs = x.substr(0, xd);
    std::string_view ys = y.substr(0, yd);
    if (xs != ys) {
      if (all_digits(xs) && all_digits(ys)) {
        unsigned long long xv = 0, yv = 0;
        std::from_chars(xs.data(), xs.data() + xs.size(), xv);
        std::from_chars(ys.data(), ys.data() + ys.size(), yv);
        if (xv != yv) return xv < yv ? -1 : 1;
        // Equal values with different spelling (leading zeros): byte order.
      }
      return xs < ys ? -1 : 1;
    }
    if (xd == std::string_view::npos && yd == std::string_view::npos)
      return 0;
    if (xd == std::string_view::npos) return -1;
    if (yd == std::string_view::npos) return 1;
    x = x.substr(xd + 1);
    y = y.substr(yd + 1);
  }
  if (x.size() == y.size()) return 0;
  return x.size() < y.size() ? -1 : 1;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::u32string points = decode_utf8(text);
  std::u32string current;
  for (char32_t c : points) {
    if (is_space_cp(c)) {
      if (!current.empty()) {
        tokens.push_back(encode_utf8(current));
        current.clear();
      }
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(encode_utf8(current));
  return tokens;
}

size_t count_tokens(std::string_view text) {
  std::u32string points = decode_utf8(text);
  size_t count = 0;
  bool in_token = false;
  for (char32_t c : points) {
    if (is_space_cp(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  size_t i = 0;
  while (i < bytes.size()) {
    unsigned char c = static_cast<unsigned char>(bytes[i]);
    char32_t cp = 0;
    int extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      throw DataError("invalid UTF-8 byte at offset " + std::to_string(i));
    }
    if (i + extra >= bytes.size())
      throw DataError("truncated UTF-8 sequence at offset " +
                      std::to_string(i));
    for (int k = 1; k <= extra; ++k) {
      unsigned char cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80)
        throw DataError("invalid UTF-8 continuation at offset " +
                        std::to_string(i + k));
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Reject overlong encodings and surrogate range.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
        cp > 0x10FFFF)
      throw DataError("invalid UTF-8 code point at offset " +
                      std::to_string(i));
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string encode_utf8(std::u32string_view points) {
  std::string out;
  out.reserve(points.size());
  for (char32_t cp : points) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

size_t edit_distance(const std::u32string& a, const std::u32string& b) {
  const size_t n = a.size();
  const size_t m = b.size();
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<size_t> prev(m + 1);
  std::vector<size_t> curr(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    curr[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, sub});
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

}  // namespace versekit
