#include <istream>
#include <ostream>
#include <sstream>

#include "echomod/format.hpp"
#include "echomod/policy.hpp"

namespace echomod {
namespace {

constexpr std::string_view kMagic = "echomod-policy";
constexpr int kVersion = 1;

struct Block {
  std::string name;
  std::size_t offset;
  std::size_t rows;
  std::size_t cols;
};

std::vector<Block> layout(const PolicyState& s) {
  return {{"W1", s.w1_index(0, 0), s.hidden(), s.bits()},
          {"b1", s.b1_index(0), s.hidden(), 1},
          {"W2", s.w2_index(0, 0), 2, s.hidden()},
          {"log_sigma", s.log_sigma_index(0), 2, 1}};
}

void write_block(std::ostream& out, const std::string& name, const Block& b,
                 std::span<const double> values) {
  out << name << ' ' << b.rows << ' ' << b.cols;
  for (std::size_t i = 0; i < b.rows * b.cols; ++i) out << ' ' << format_double(values[b.offset + i]);
  out << '\n';
}

}  // namespace

void write_checkpoint(std::ostream& out, const PolicyState& state) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "bits " << state.bits() << '\n';
  out << "hidden " << state.hidden() << '\n';
  out << "step_count " << state.step_count << '\n';
  for (const auto& b : layout(state)) write_block(out, b.name, b, state.params());
  for (const auto& b : layout(state)) write_block(out, "adam_m." + b.name, b, state.adam_m);
  for (const auto& b : layout(state)) write_block(out, "adam_v." + b.name, b, state.adam_v);
}

PolicyState read_checkpoint(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError(line_no + 1, "unexpected end of checkpoint");
    ++line_no;
    return std::istringstream(line);
  };
  auto header_value = [&](std::string_view key) -> unsigned long long {
    auto is = next_line();
    std::string k;
    std::string v;
    is >> k >> v;
    const auto parsed = parse_u64(v);
    if (k != key || !parsed) throw ParseError(line_no, "expected '" + std::string(key) + " <n>'");
    return *parsed;
  };

  {
    auto is = next_line();
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != kMagic) throw ParseError(line_no, "not a policy checkpoint");
    if (version != kVersion) {
      throw ParseError(line_no, "unsupported checkpoint version " + std::to_string(version));
    }
  }
  const auto bits = header_value("bits");
  const auto hidden = header_value("hidden");
  const auto steps = header_value("step_count");
  PolicyState state;
  try {
    state = PolicyState(static_cast<unsigned>(bits), static_cast<std::size_t>(hidden));
  } catch (const InputError& e) {
    throw ParseError(line_no, e.what());
  }
  state.step_count = steps;

  auto read_into = [&](const std::string& name, const Block& b, std::span<double> dst) {
    auto is = next_line();
    std::string got;
    std::size_t rows = 0;
    std::size_t cols = 0;
    is >> got >> rows >> cols;
    if (got != name) throw ParseError(line_no, "expected block '" + name + "', got '" + got + "'");
    if (rows != b.rows || cols != b.cols) throw ParseError(line_no, "bad shape for " + name);
    for (std::size_t i = 0; i < rows * cols; ++i) {
      std::string tok;
      if (!(is >> tok)) throw ParseError(line_no, "too few values in " + name);
      const auto v = parse_double(tok);
      if (!v) throw ParseError(line_no, "bad number '" + tok + "' in " + name);
      dst[b.offset + i] = *v;
    }
    std::string extra;
    if (is >> extra) throw ParseError(line_no, "too many values in " + name);
  };
  for (const auto& b : layout(state)) read_into(b.name, b, state.params());
  for (const auto& b : layout(state)) read_into("adam_m." + b.name, b, state.adam_m);
  for (const auto& b : layout(state)) read_into("adam_v." + b.name, b, state.adam_v);
  return state;
}

}  // namespace echomod
