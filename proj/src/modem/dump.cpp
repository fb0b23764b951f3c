#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "echomod/format.hpp"
#include "echomod/modem.hpp"

namespace echomod {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_double(double v, int significant_digits) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, significant_digits);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return v;
}

std::optional<long long> parse_int(std::string_view text) {
  text = trim(text);
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return v;
}

std::optional<unsigned long long> parse_u64(std::string_view text) {
  text = trim(text);
  unsigned long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return v;
}

namespace {

// Fixed 17 significant digits so every amplitude round-trips exactly.
std::string format_amplitude(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_dump(std::ostream& out, const Constellation& c) {
  for (std::size_t i = 0; i < c.order(); ++i) {
    const IQSymbol p = c.points()[i];
    out << c.word(i).to_string() << ',' << format_amplitude(p.real()) << ','
        << format_amplitude(p.imag()) << '\n';
  }
}

std::string to_dump(const Constellation& c) {
  std::ostringstream os;
  write_dump(os, c);
  return os.str();
}

Constellation read_dump(std::istream& in) {
  std::map<unsigned, IQSymbol> points;
  unsigned bits = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto c1 = body.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : body.find(',', c1 + 1);
    if (c2 == std::string_view::npos || body.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(line_no, "expected 'word,i,q'");
    }
    const std::string_view word_text = trim(body.substr(0, c1));
    BitWord word;
    try {
      word = BitWord::parse(word_text);
    } catch (const InputError& e) {
      throw ParseError(line_no, e.what());
    }
    if (bits == 0) bits = word.length();
    if (word.length() != bits) throw ParseError(line_no, "inconsistent word length");
    const auto i = parse_double(body.substr(c1 + 1, c2 - c1 - 1));
    const auto q = parse_double(body.substr(c2 + 1));
    if (!i || !q || !std::isfinite(*i) || !std::isfinite(*q)) {
      throw ParseError(line_no, "amplitudes must be finite decimal numbers");
    }
    if (!points.emplace(word.value(), IQSymbol{*i, *q}).second) {
      throw ParseError(line_no, "duplicate word " + word.to_string());
    }
  }
  if (bits == 0) throw ParseError(line_no, "empty constellation dump");
  const std::size_t order = std::size_t{1} << bits;
  if (points.size() != order) {
    throw ParseError(line_no, "constellation has " + std::to_string(points.size()) +
                                  " words, expected " + std::to_string(order));
  }
  std::vector<IQSymbol> pts;
  pts.reserve(order);
  for (const auto& [w, p] : points) pts.push_back(p);
  return Constellation(std::move(pts));
}

Constellation parse_dump(std::string_view text) {
  std::istringstream is{std::string(text)};
  return read_dump(is);
}

}  // namespace echomod
